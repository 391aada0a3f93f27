"""HTTP/JSON inference service: generation, grids, readback, Turing sessions.

The loaded model is immutable; request handling is stateless except for
Turing sessions, which go through one serialized on-disk store. Error
bodies follow {"error": code, "field": optional, "message": text}.
"""

from __future__ import annotations

import hashlib
import threading
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..conditions import ConditionVector, denormalize_units, normalize_condition
from ..errors import ContrastGanError, InsufficientDataError, RangeViolationError
from ..evaluation.interpolation import montage_array, render_interpolation_grid
from ..evaluation.metrics import predict_conditions
from ..evaluation.turing import (
    TuringSession,
    build_turing_session,
    load_session,
    save_session,
    submit_grid_labels,
    turing_analytics,
)
from ..synthesis import generate_batch, latents_from_seed
from ..training.checkpoint import load_checkpoint
from .codec import image_to_b64

DEFAULT_MAX_COUNT = 16


class ApiError(ContrastGanError):
    def __init__(self, status: int, code: str, message: str, field: str | None = None):
        super().__init__(message)
        self.status = status
        self.code = code
        self.field = field


def _error_json(status: int, code: str, message: str, field: str | None = None) -> JSONResponse:
    body = {"error": code, "message": message}
    if field is not None:
        body["field"] = field
    return JSONResponse(status_code=status, content=body)


class ModelStore:
    """Holds the loaded model bundle; reloads swap it atomically."""

    def __init__(self, checkpoint_path=None):
        self._bundle = None
        if checkpoint_path is not None:
            self.load(checkpoint_path)

    def load(self, checkpoint_path) -> None:
        path = Path(checkpoint_path)
        ckpt = load_checkpoint(path)
        digest = hashlib.sha256(path.read_bytes()).hexdigest()
        bundle = {
            "checkpoint": ckpt,
            "hash": digest,
            "version": digest[:16],
            "path": str(path),
        }
        self._bundle = bundle  # single reference assignment: atomic swap

    @property
    def bundle(self) -> dict:
        if self._bundle is None:
            raise ApiError(503, "model_unavailable", "no checkpoint loaded")
        return self._bundle


class SessionStore:
    """Serialized access to Turing sessions persisted as JSON files."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    def _path(self, session_id: str) -> Path:
        return self.root / f"{session_id}.json"

    def create(self, session: TuringSession) -> None:
        with self._lock:
            save_session(session, self._path(session.session_id))

    def get(self, session_id: str) -> TuringSession:
        path = self._path(session_id)
        if not path.exists():
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        with self._lock:
            return load_session(path)

    def update(self, session_id: str, mutate) -> object:
        """Apply ``mutate(session)`` under the lock and persist the result."""
        path = self._path(session_id)
        if not path.exists():
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        with self._lock:
            session = load_session(path)
            result = mutate(session)
            save_session(session, path)
            return result


class ConditionBody(BaseModel):
    tr_ms: float
    te_ms: float
    orientation: str


class GenerateBody(BaseModel):
    condition: ConditionBody
    seed: int | None = None
    latent: list[float] | None = None
    count: int = 1


class GridBody(BaseModel):
    tr_values: list[float]
    te_values: list[float]
    orientation: str
    seed: int = 0


class PoolEntry(BaseModel):
    ref: str
    tr_ms: float
    te_ms: float
    orientation: str


class SessionBody(BaseModel):
    real: list[PoolEntry]
    synthetic: list[PoolEntry]
    n_per_class: int
    seed: int = 0
    grid_size: int = 6


class LabelsBody(BaseModel):
    reader: str
    labels: list[str]


def create_app(checkpoint_path=None, sessions_dir=None, max_count: int = DEFAULT_MAX_COUNT) -> FastAPI:
    app = FastAPI(title="contrastgan inference service")
    store = ModelStore(checkpoint_path)
    sessions = SessionStore(sessions_dir) if sessions_dir else None
    app.state.model_store = store
    app.state.session_store = sessions

    @app.exception_handler(ApiError)
    async def _api_error(request: Request, exc: ApiError):
        return _error_json(exc.status, exc.code, str(exc), exc.field)

    @app.exception_handler(RangeViolationError)
    async def _range_error(request: Request, exc: RangeViolationError):
        return _error_json(422, "range_violation", str(exc), exc.field)

    @app.exception_handler(RequestValidationError)
    async def _schema_error(request: Request, exc: RequestValidationError):
        errors = exc.errors()
        field = ".".join(str(p) for p in errors[0]["loc"] if p != "body") if errors else None
        return _error_json(422, "validation", errors[0]["msg"] if errors else "invalid body", field)

    def _condition(body: ConditionBody, space) -> ConditionVector:
        cond = ConditionVector(body.tr_ms, body.te_ms, body.orientation)
        normalize_condition(cond, space)  # raises RangeViolationError naming the field
        return cond

    def _readback(ac, images, space) -> list[dict]:
        idx, tr_unit, te_unit = predict_conditions(ac, images.astype(np.float32))
        tr_ms, te_ms = denormalize_units(tr_unit, te_unit, space)
        return [
            {
                "tr_ms": float(tr_ms[i]),
                "te_ms": float(te_ms[i]),
                "orientation": space.orientations[int(idx[i])],
            }
            for i in range(images.shape[0])
        ]

    @app.post("/generate")
    def generate(body: GenerateBody):
        bundle = store.bundle
        ckpt = bundle["checkpoint"]
        space = ckpt.space
        cond = _condition(body.condition, space)
        if not 1 <= body.count <= max_count:
            raise ApiError(422, "validation", f"count must be in 1..{max_count}", field="count")
        if body.seed is not None and body.latent is not None:
            raise ApiError(422, "validation", "supply at most one of seed/latent", field="latent")
        latent_dim = ckpt.net_config.latent_dim
        if body.latent is not None:
            if body.count != 1:
                raise ApiError(422, "validation", "explicit latent requires count=1", field="count")
            if len(body.latent) != latent_dim:
                raise ApiError(
                    422, "validation", f"latent must have length {latent_dim}", field="latent"
                )
            z = np.asarray(body.latent, dtype=np.float64)[None, :]
        else:
            seed = body.seed if body.seed is not None else int.from_bytes(
                np.random.default_rng().bytes(4), "little"
            )
            z = latents_from_seed(seed, body.count, latent_dim)
        images = generate_batch(ckpt.generator, z, [cond] * body.count, space)
        return {
            "images": [image_to_b64(img) for img in images],
            "readback": _readback(ckpt.ac, images, space),
            "model_version": bundle["version"],
        }

    @app.post("/grid")
    def grid(body: GridBody):
        bundle = store.bundle
        ckpt = bundle["checkpoint"]
        z = latents_from_seed(body.seed, 1, ckpt.net_config.latent_dim)[0]
        result = render_interpolation_grid(
            ckpt.generator, ckpt.ac, z, body.tr_values, body.te_values,
            body.orientation, ckpt.space,
        )
        return {
            "montage": image_to_b64(montage_array(result)),
            "rows": result.sidecar_rows(),
            "model_version": bundle["version"],
        }

    @app.get("/model/info")
    def model_info():
        bundle = store.bundle
        ckpt = bundle["checkpoint"]
        return {
            "model_version": bundle["version"],
            "checkpoint_hash": bundle["hash"],
            "network": {
                "latent_dim": ckpt.net_config.latent_dim,
                "base_resolution": ckpt.net_config.base_resolution,
                "final_resolution": ckpt.net_config.final_resolution,
                "resolution": ckpt.generator.resolution,
            },
            "condition_space": ckpt.space.to_dict(),
            "training": {
                "images_seen": ckpt.counters.get("images_seen"),
                "step": ckpt.counters.get("step"),
            },
        }

    def _session_store() -> SessionStore:
        if sessions is None:
            raise ApiError(503, "sessions_unavailable", "no session directory configured")
        return sessions

    def _version() -> str | None:
        try:
            return store.bundle["version"]
        except ApiError:
            return None

    @app.post("/turing/sessions")
    def create_session(body: SessionBody):
        st = _session_store()
        session = build_turing_session(
            [e.model_dump() for e in body.real],
            [e.model_dump() for e in body.synthetic],
            body.n_per_class,
            body.seed,
            grid_size=body.grid_size,
        )
        st.create(session)
        return {
            "session_id": session.session_id,
            "n_grids": session.n_grids,
            "model_version": _version(),
        }

    @app.get("/turing/sessions/{session_id}/grids/{index}")
    def get_grid(session_id: str, index: int):
        session = _session_store().get(session_id)
        if not 0 <= index < session.n_grids:
            raise ApiError(404, "unknown_grid", f"grid {index} outside 0..{session.n_grids - 1}")
        return {
            "index": index,
            "count": session.n_grids,
            "items": [session.items[i].public_view() for i in session.grids[index]],
            "model_version": _version(),
        }

    @app.post("/turing/sessions/{session_id}/grids/{index}/labels")
    def post_labels(session_id: str, index: int, body: LabelsBody):
        st = _session_store()

        def mutate(session):
            if not 0 <= index < session.n_grids:
                raise ApiError(404, "unknown_grid", f"grid {index} outside session")
            ok = submit_grid_labels(session, body.reader, index, body.labels)
            if not ok:
                half = session.grid_size // 2
                raise ApiError(
                    422,
                    "balance_violation",
                    f"labels must contain exactly {half} real and {half} synthetic",
                    field="labels",
                )
            nxt = index + 1 if index + 1 < session.n_grids else None
            return {"accepted": True, "next_grid": nxt, "model_version": _version()}

        return st.update(session_id, mutate)

    @app.get("/turing/sessions/{session_id}/report")
    def report(session_id: str, readers: str | None = None):
        session = _session_store().get(session_id)
        reader_list = [r for r in readers.split(",") if r] if readers else None
        try:
            analytics = turing_analytics(session, reader_list)
        except InsufficientDataError as exc:
            raise ApiError(409, "incomplete_session", str(exc)) from exc
        return {**analytics.to_dict(), "model_version": _version()}

    return app
