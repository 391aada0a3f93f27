"""Acceptance suite: one test per criterion, each printing a PASS line.

The heavy criteria (classifier pretraining, the end-to-end desk run,
contrast monotonicity, service determinism over the trained model)
share a single desk-scale pipeline built once per session. Run with
``pytest -sv tests/test_acceptance.py`` to see the per-criterion lines.
"""

import math
import time

import numpy as np
import pytest
import torch
from fastapi.testclient import TestClient

from contrastgan.conditions import (
    ConditionSpace,
    ConditionVector,
    denormalize_condition,
    normalize_condition,
)
from contrastgan.data.filters import filter_records
from contrastgan.data.phantom import PhantomSpec, build_phantom_dataset, layout_masks
from contrastgan.data.splits import split_by_study
from contrastgan.evaluation.metrics import eval_ac_on_synthetic
from contrastgan.evaluation.turing import (
    REAL,
    SYNTHETIC,
    ConfusionMatrix,
    build_turing_session,
    mean_error,
    submit_grid_labels,
    turing_analytics,
)
from contrastgan.losses import AdaptiveWeightState, gradient_penalty, update_adaptive_weights
from contrastgan.models import build_ac, build_discriminator, build_generator, desk_config
from contrastgan.service import create_app
from contrastgan.synthesis import generate_batch, latents_from_seed
from contrastgan.training import (
    desk_adaptive_state,
    desk_train_config,
    make_schedule,
    phase_batches,
    pretrain_ac,
    read_telemetry,
    train_gan,
)
from tests.conftest import make_record
from tests.test_turing import complete_with_total_correct

torch.set_num_threads(1)

TE_RANGE_MS = 50.0 - 12.0
TR_RANGE_MS = 5000.0 - 1800.0


def _passline(n: int, msg: str) -> None:
    print(f"\n[PASS] criterion {n}: {msg}")


# --------------------------------------------------------------------------
# shared desk-scale pipeline (criteria 6, 7, 8, 10)
# --------------------------------------------------------------------------


@pytest.fixture(scope="module")
def desk_run(tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("desk_run")
    space = ConditionSpace()
    spec = PhantomSpec()  # 64 px, noise_sigma 0.05
    records = build_phantom_dataset(3000, spec, space, seed=7)
    train, val, test = split_by_study(records, 300, 300, seed=7)
    cfg = desk_config(condition_dim=space.encoded_dim)

    t0 = time.time()
    ac = build_ac(cfg)
    pretrain = pretrain_ac(ac, train, val, space, desk_train_config(), epochs=15, seed=0)
    ac_seconds = time.time() - t0

    generator, critic = build_generator(cfg), build_discriminator(cfg)
    t0 = time.time()
    result = train_gan(
        generator, critic, ac, train, space, desk_train_config(),
        out_dir=out_dir, seed=0, adaptive_state=desk_adaptive_state(),
    )
    gan_seconds = time.time() - t0

    t0 = time.time()
    eval_ac_net = build_ac(cfg)
    eval_pretrain = pretrain_ac(
        eval_ac_net, train, val, space, desk_train_config(), epochs=15, seed=99
    )
    eval_ac_seconds = time.time() - t0

    return {
        "space": space,
        "spec": spec,
        "cfg": cfg,
        "splits": (train, val, test),
        "ac": ac,
        "pretrain": pretrain,
        "eval_ac": eval_ac_net,
        "eval_pretrain": eval_pretrain,
        "generator": generator,
        "result": result,
        "telemetry": read_telemetry(result.telemetry_path),
        "ac_seconds": ac_seconds,
        "eval_ac_seconds": eval_ac_seconds,
        "gan_seconds": gan_seconds,
    }


# --------------------------------------------------------------------------
# criterion 1: gradient penalty correctness
# --------------------------------------------------------------------------


def test_criterion_01_gradient_penalty():
    t0 = time.time()
    gen = torch.Generator().manual_seed(0)

    a = torch.randn(7, generator=gen, dtype=torch.float64)
    a = a / a.norm()
    real = torch.randn(16, 7, generator=gen, dtype=torch.float64)
    fake = torch.randn(16, 7, generator=gen, dtype=torch.float64)
    gp = gradient_penalty(lambda x: x @ a, real, fake, lambda_gp=10.0, rng=gen)
    assert abs(float(gp)) < 1e-6

    real1 = torch.randn(16, 1, generator=gen, dtype=torch.float64)
    fake1 = torch.randn(16, 1, generator=gen, dtype=torch.float64)
    gp2 = gradient_penalty(lambda x: 2.0 * x.squeeze(-1), real1, fake1, lambda_gp=10.0, rng=gen)
    assert abs(float(gp2) - 10.0) < 1e-6

    torch.manual_seed(1)
    for _ in range(10):
        critic = torch.nn.Sequential(
            torch.nn.Linear(6, 10), torch.nn.Tanh(), torch.nn.Linear(10, 1)
        ).double()
        x = torch.randn(4, 6, dtype=torch.float64, requires_grad=True)
        (auto,) = torch.autograd.grad(critic(x).sum(), x)
        h = 1e-6
        fd = torch.zeros_like(x)
        with torch.no_grad():
            for i in range(x.shape[0]):
                for j in range(x.shape[1]):
                    xp, xm = x.clone(), x.clone()
                    xp[i, j] += h
                    xm[i, j] -= h
                    fd[i, j] = (critic(xp).sum() - critic(xm).sum()) / (2 * h)
        assert float((auto - fd).norm() / fd.norm()) < 1e-4

    elapsed = time.time() - t0
    assert elapsed < 10.0
    _passline(1, f"gradient penalty analytic + finite-difference checks ({elapsed:.1f}s)")


# --------------------------------------------------------------------------
# criterion 2: adaptive controller trace
# --------------------------------------------------------------------------


def test_criterion_02_adaptive_controller_trace():
    t0 = time.time()
    r, tau, e_hat = 0.01, 100.0, 1.0
    rng = np.random.default_rng(42)
    # synthetic stream shaped to exercise both clamps: a hot start that
    # saturates, a cold stretch that pins gamma at zero, then noise
    gen_stream = np.concatenate([
        rng.uniform(200.0, 400.0, 400),   # drives gamma to tau
        np.zeros(300),                    # drives gamma to 0
        rng.uniform(0.0, 5.0, 300),
    ])
    real_stream = np.concatenate([
        np.zeros(400),
        rng.uniform(50.0, 80.0, 300),
        rng.uniform(0.0, 5.0, 300),
    ])

    state = AdaptiveWeightState(r=r, tau={k: tau for k in ("iop", "te", "tr")}, e_hat=e_hat)
    oracle_gamma = 0.0
    hit_top = hit_bottom = False
    for g, rl in zip(gen_stream, real_stream):
        state = update_adaptive_weights(
            state, {"iop": g, "te": g, "tr": g}, {"iop": rl, "te": rl, "tr": rl}
        )
        oracle_gamma = min(tau, max(0.0, oracle_gamma + r * (g - e_hat * rl)))
        hit_top |= oracle_gamma == tau
        hit_bottom |= oracle_gamma == 0.0 and hit_top
        assert state.gamma["te"] == oracle_gamma  # exact, both computed in float64

    assert hit_top and hit_bottom, "stream must exercise both clamps"

    # closed-form time to saturation with zero real losses; parameters
    # chosen so float accumulation cannot shift the boundary step
    # (binary-exact increments or fractional tau/(r*g) ratios)
    for tau_c, rr, g in ((100.0, 0.015625, 2.0), (100.0, 0.01, 1.9), (3.0, 0.05, 1.7), (1.0, 0.25, 0.5)):
        state = AdaptiveWeightState(r=rr, tau={k: tau_c for k in ("iop", "te", "tr")})
        steps = 0
        while state.gamma["te"] < tau_c:
            state = update_adaptive_weights(
                state, {"iop": g, "te": g, "tr": g}, {"iop": 0.0, "te": 0.0, "tr": 0.0}
            )
            steps += 1
        assert steps == math.ceil(tau_c / (rr * g))

    elapsed = time.time() - t0
    assert elapsed < 1.0
    _passline(2, f"1000-step gamma trace exact incl. clamps; saturation closed form ({elapsed:.2f}s)")


# --------------------------------------------------------------------------
# criterion 3: condition scaling
# --------------------------------------------------------------------------


def test_criterion_03_condition_scaling():
    space = ConditionSpace()
    assert normalize_condition(ConditionVector(1800, 12, "coronal"), space).tr_unit == 0.0
    assert normalize_condition(ConditionVector(5000, 12, "coronal"), space).tr_unit == 1.0
    assert normalize_condition(ConditionVector(1800, 12, "coronal"), space).te_unit == 0.0
    assert normalize_condition(ConditionVector(1800, 50, "coronal"), space).te_unit == 1.0

    rng = np.random.default_rng(3)
    trs = rng.uniform(1800, 5000, 10_000)
    tes = rng.uniform(12, 50, 10_000)
    orients = rng.choice(space.orientations, 10_000)
    worst = 0.0
    for tr, te, o in zip(trs, tes, orients):
        c = ConditionVector(float(tr), float(te), str(o))
        back = denormalize_condition(normalize_condition(c, space), space)
        worst = max(worst, abs(back.tr_ms - c.tr_ms), abs(back.te_ms - c.te_ms))
        assert back.orientation == c.orientation
    assert worst < 1e-9
    _passline(3, f"10k round trips, worst error {worst:.2e}; endpoints exact")


# --------------------------------------------------------------------------
# criterion 4: filter cascade and study splitting
# --------------------------------------------------------------------------


def test_criterion_04_filter_and_split():
    mk = make_record
    manifest = [
        ("r01", mk(study="r01")),                                     # keep
        ("r02", mk(study="r02", field=3.0)),                          # field_strength
        ("r03", mk(study="r03", field=1.43)),                         # field_strength
        ("r04", mk(study="r04", manufacturer="GE Medical")),          # vendor
        ("r05", mk(study="r05", manufacturer=None, coil="SIEMENS")),  # keep (deduced)
        ("r06", mk(study="r06", manufacturer=None, coil=None)),       # vendor
        ("r07", mk(study="r07", tr=1700)),                            # tr_range
        ("r08", mk(study="r08", tr=5200)),                            # tr_range
        ("r09", mk(study="r09", tr=1800)),                            # keep (edge)
        ("r10", mk(study="r10", tr=5000)),                            # keep (edge)
        ("r11", mk(study="r11", te=55)),                              # te_max
        ("r12", mk(study="r12", te=50)),                              # keep (edge)
        ("r13", mk(study="r13", fat_sat=False)),                      # fat_saturation
        ("r14", mk(study="r14", slice_index=0, slice_count=10)),      # central_slice
        ("r15", mk(study="r15", slice_index=9, slice_count=10)),      # central_slice
        ("r16", mk(study="r16", slice_index=2, slice_count=10)),      # keep
        ("r17", mk(study="r17", slice_index=7, slice_count=10)),      # keep
        ("r18", mk(study="r18", slice_index=1, slice_count=9)),       # keep (window 1..6)
        ("r19", mk(study="r19", slice_index=0, slice_count=9)),       # central_slice
        ("r20", mk(study="r20", field=3.0, fat_sat=False, tr=9000)),  # field_strength first
    ]
    kept, report = filter_records([r for _, r in manifest])
    expected_kept = {"r01", "r05", "r09", "r10", "r12", "r16", "r17", "r18"}
    assert {r.study_id for r in kept} == expected_kept
    expected_rules = {
        "r02": "field_strength", "r03": "field_strength", "r04": "vendor",
        "r06": "vendor", "r07": "tr_range", "r08": "tr_range", "r11": "te_max",
        "r13": "fat_saturation", "r14": "central_slice", "r15": "central_slice",
        "r19": "central_slice", "r20": "field_strength",
    }
    got_rules = {rid.split("/")[0]: rule for rid, rule in report.rejected}
    assert got_rules == expected_rules
    assert report.input_count == 20 and report.kept_count == 8

    corpus = [
        mk(study=f"study{s}", series=f"se{i}", slice_index=i % 6)
        for s in range(4)
        for i in range(10)
    ]
    train, val, test = split_by_study(corpus, 10, 10, seed=0)
    assert (len(train), len(val), len(test)) == (20, 10, 10)
    sets = [{r.study_id for r in part} for part in (train, val, test)]
    assert not (sets[0] & sets[1] or sets[0] & sets[2] or sets[1] & sets[2])
    again = split_by_study(corpus, 10, 10, seed=0)
    assert [r.record_id for r in again[0]] == [r.record_id for r in train]
    _passline(4, "20-record manifest filtered exactly by hand-enumerated rules; split disjoint + deterministic")


# --------------------------------------------------------------------------
# criterion 5: progressive schedule and dry-run accounting
# --------------------------------------------------------------------------


def test_criterion_05_schedule_accounting():
    paper = make_schedule(4, 256, 800_000)
    assert len(paper) == 13
    assert sum(p.image_budget for p in paper) == 10_400_000

    desk = make_schedule(4, 64, 2000)
    assert len(desk) == 9
    assert sum(p.image_budget for p in desk) == 18_000

    # dry-run accounting: exact per-phase consumption incl. continuation
    total = 60_000
    consumed_per_phase: dict[int, int] = {}
    images = 0
    for step in phase_batches(desk, total, 16):
        consumed_per_phase[step.phase_index] = (
            consumed_per_phase.get(step.phase_index, 0) + step.batch_size
        )
        assert step.images_before == images
        images += step.batch_size
    assert images == total
    for i in range(9):
        assert consumed_per_phase[i] == 2000
    assert consumed_per_phase[9] == 42_000  # conditioning continuation
    _passline(5, "13 phases / 10.4M at paper scale; 9 phases / 18k desk; dry-run accounting exact")


# --------------------------------------------------------------------------
# criterion 6: classifier pretraining quality on phantoms
# --------------------------------------------------------------------------


def test_criterion_06_ac_pretraining(desk_run):
    final = desk_run["pretrain"].final
    assert final.orientation_accuracy >= 0.95
    assert final.te_mae_ms <= 0.10 * TE_RANGE_MS
    assert desk_run["ac_seconds"] < 600
    _passline(
        6,
        f"AC val accuracy {final.orientation_accuracy:.3f}, TE MAE {final.te_mae_ms:.2f}ms "
        f"(<= {0.10 * TE_RANGE_MS:.1f}ms) in {desk_run['ac_seconds']:.0f}s",
    )


# --------------------------------------------------------------------------
# criterion 7: end-to-end desk GAN
# --------------------------------------------------------------------------


def test_criterion_07_end_to_end_desk_gan(desk_run):
    telemetry = desk_run["telemetry"]
    result = desk_run["result"]
    cfg = desk_run["cfg"]

    assert result.images_seen == 60_000
    finite = [
        math.isfinite(t["critic_loss"]) and math.isfinite(t["gen_total"]) for t in telemetry
    ]
    assert all(finite)

    pre_final = [t for t in telemetry if t["resolution"] < cfg.final_resolution]
    assert pre_final and all(v == 0.0 for t in pre_final for v in t["gamma"].values())
    assert result.adaptive_state.gamma["te"] > 0.0

    _, _, test = desk_run["splits"]
    conditions = [ConditionVector(r.tr_ms, r.te_ms, r.orientation) for r in test]
    metrics = eval_ac_on_synthetic(
        desk_run["eval_ac"], desk_run["generator"], conditions, desk_run["space"], seed=123
    )
    assert metrics.orientation_accuracy >= 0.90
    assert metrics.te_mae_ms <= 0.15 * TE_RANGE_MS
    assert desk_run["gan_seconds"] < 2700
    _passline(
        7,
        f"60k-image run finite, gamma 0 pre-final then te={result.adaptive_state.gamma['te']:.2f}; "
        f"synthetic readback acc {metrics.orientation_accuracy:.3f}, "
        f"TE MAE {metrics.te_mae_ms:.2f}ms (<= {0.15 * TE_RANGE_MS:.2f}ms) "
        f"in {desk_run['gan_seconds'] / 60:.1f} min",
    )


# --------------------------------------------------------------------------
# criterion 8: contrast monotonicity of the trained generator
# --------------------------------------------------------------------------


def test_criterion_08_contrast_monotonicity(desk_run):
    generator = desk_run["generator"]
    space = desk_run["space"]
    spec = desk_run["spec"]
    fluid_mask = layout_masks(spec, space.orientation_index("coronal"))["fluid"]
    te_values = np.linspace(12.0, 50.0, 5)
    n_latents, passing = 20, 0
    for i in range(n_latents):
        z = latents_from_seed(1000 + i, 1, generator.cfg.latent_dim)[0]
        conditions = [ConditionVector(3400.0, float(te), "coronal") for te in te_values]
        images = generate_batch(generator, np.tile(z, (5, 1)), conditions, space)
        means = np.array([img[fluid_mask].mean() for img in images])
        diffs = np.diff(means)
        # monotone up to one slack step, and a net decrease over the sweep
        if (diffs < 0).sum() >= len(diffs) - 1 and means[-1] < means[0]:
            passing += 1
    assert passing >= 0.80 * n_latents
    _passline(8, f"fluid-region mean decreases with TE for {passing}/{n_latents} latents")


# --------------------------------------------------------------------------
# criterion 9: Turing engine analytics
# --------------------------------------------------------------------------


def test_criterion_09_turing_analytics():
    # reference confusion counts reproduce the published accuracies
    assert ConfusionMatrix.from_counts(53, 22, 22, 53).accuracy == pytest.approx(0.70667, abs=5e-5)
    assert ConfusionMatrix.from_counts(36, 39, 39, 36).accuracy == pytest.approx(0.48)
    accs = [ConfusionMatrix.from_counts(53, 22, 22, 53).accuracy, 0.48]
    assert mean_error(accs, round_digits=2) == pytest.approx(0.405)

    # same numbers via the full session path
    pool = lambda p: [
        {"ref": f"{p}{i}", "tr_ms": 2500.0, "te_ms": 25.0, "orientation": "coronal"}
        for i in range(75)
    ]
    session = build_turing_session(pool("r"), pool("s"), 75, seed=7)
    complete_with_total_correct(session, "expert1", 53)
    complete_with_total_correct(session, "expert2", 36)
    report = turing_analytics(session)
    assert report.per_reader["expert1"]["accuracy"] * 100 == pytest.approx(70.7, abs=0.05)
    assert report.per_reader["expert2"]["accuracy"] * 100 == pytest.approx(48.0, abs=0.05)
    assert report.mean_error_rounded == pytest.approx(0.405, abs=1e-9)

    # forced balance under random submissions
    rng = np.random.default_rng(99)
    rejected = accepted = 0
    for _ in range(1000):
        labels = list(rng.choice([REAL, SYNTHETIC], size=6))
        before = {r: {g: list(l) for g, l in by.items()} for r, by in session.labels.items()}
        ok = submit_grid_labels(session, "rando", int(rng.integers(0, session.n_grids)), labels)
        balanced = labels.count(REAL) == 3
        assert ok == balanced
        if not ok:
            rejected += 1
            assert {r: by for r, by in session.labels.items() if r != "rando"} == {
                r: by for r, by in before.items() if r != "rando"
            }
        else:
            accepted += 1
    assert rejected > 0 and accepted > 0
    _passline(
        9,
        f"accuracies 70.7%/48.0%, rounded mean error 40.5%; "
        f"{rejected} unbalanced submissions all rejected",
    )


# --------------------------------------------------------------------------
# criterion 10: service determinism and validation errors
# --------------------------------------------------------------------------


def test_criterion_10_service_determinism(desk_run):
    client = TestClient(create_app(desk_run["result"].checkpoint_path))
    body = {"seed": 7, "condition": {"tr_ms": 3000, "te_ms": 15, "orientation": "coronal"},
            "count": 2}
    a = client.post("/generate", json=body)
    b = client.post("/generate", json=body)
    assert a.status_code == b.status_code == 200
    assert a.json()["images"] == b.json()["images"]
    assert a.json()["model_version"] == b.json()["model_version"]

    bad_te = client.post(
        "/generate",
        json={"seed": 1, "condition": {"tr_ms": 3000, "te_ms": 60, "orientation": "coronal"},
              "count": 1},
    )
    assert bad_te.status_code == 422 and bad_te.json()["field"] == "te_ms"
    bad_count = client.post(
        "/generate",
        json={"seed": 1, "condition": {"tr_ms": 3000, "te_ms": 15, "orientation": "coronal"},
              "count": 0},
    )
    assert bad_count.status_code == 422 and bad_count.json()["field"] == "count"
    _passline(10, "fixed-seed payloads byte-identical; validation errors name offending fields")
