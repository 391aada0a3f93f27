"""Adversarial training loop with progressive growing and adaptive conditioning.

Critic and generator alternate with a balanced update ratio. Conditions
are fed to the generator in every phase, but their loss weights (gamma)
stay frozen at zero until the final resolution is reached; from then on
each generator step also advances the adaptive-weight controller using
the same step's real-batch classifier losses. The (frozen, pretrained)
auxiliary classifier provides the conditioning gradients.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from ..conditions import ConditionSpace, ConditionVector, encode_conditions
from ..data.preprocess import downsample_to
from ..errors import ConfigError, DivergenceError, NumericError
from ..losses import (
    AdaptiveWeightState,
    GanLossConfig,
    ac_condition_losses,
    conditioned_generator_loss,
    critic_loss,
    generator_adv_loss,
    update_adaptive_weights,
)
from ..models import FadeState
from .checkpoint import save_checkpoint
from .config import TrainConfig
from .schedule import make_schedule, phase_batches
from .telemetry import TelemetryWriter, read_telemetry


@dataclass
class TrainResult:
    checkpoint_path: Path
    telemetry_path: Path
    images_seen: int
    critic_updates: int
    generator_updates: int
    adaptive_state: AdaptiveWeightState


def parameter_checksum(module) -> str:
    """Digest of all parameters; detects any in-place modification."""
    h = hashlib.sha256()
    for p in module.parameters():
        h.update(p.detach().numpy().tobytes())
    return h.hexdigest()


def _make_optimizers(generator, critic, cfg: TrainConfig) -> dict:
    return {
        "generator": torch.optim.Adam(generator.parameters(), lr=cfg.gan_lr, betas=cfg.gan_betas),
        "critic": torch.optim.Adam(critic.parameters(), lr=cfg.gan_lr, betas=cfg.gan_betas),
    }


def train_gan(
    generator,
    critic,
    ac,
    records,
    space: ConditionSpace,
    train_cfg: TrainConfig,
    loss_cfg: GanLossConfig | None = None,
    schedule=None,
    out_dir="runs/gan",
    seed: int = 0,
    adaptive_state: AdaptiveWeightState | None = None,
    resume=None,
    progress=None,
    progress_every: int = 50,
) -> TrainResult:
    """Run the full schedule; writes telemetry and a final checkpoint.

    ``resume`` accepts a loaded Checkpoint whose counters/optimizers/rng
    continue an interrupted run on the same dataset and configuration.
    """
    loss_cfg = loss_cfg or GanLossConfig()
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    telemetry_path = out_dir / "telemetry.jsonl"
    final_res = generator.cfg.final_resolution

    if not records:
        raise ConfigError("training needs a non-empty dataset")
    images = np.stack([r.pixels for r in records]).astype(np.float32)
    if images.shape[-1] != final_res or images.shape[-2] != final_res:
        raise ConfigError(
            f"records must be preprocessed to {final_res}px, got {images.shape[-2:]}"
        )
    cond_np = encode_conditions(
        [ConditionVector(r.tr_ms, r.te_ms, r.orientation) for r in records], space
    ).astype(np.float32)
    conditions = torch.from_numpy(cond_np)
    pyramid = {final_res: torch.from_numpy(images[:, None])}

    def reals_at(res: int) -> torch.Tensor:
        if res not in pyramid:
            pyramid[res] = torch.from_numpy(downsample_to(images, res)[:, None])
        return pyramid[res]

    if schedule is None:
        schedule = make_schedule(
            generator.cfg.base_resolution, final_res, train_cfg.images_per_phase
        )

    state = adaptive_state or AdaptiveWeightState()
    rng = np.random.default_rng(seed)
    torch_gen = torch.Generator().manual_seed(seed)
    optimizers = _make_optimizers(generator, critic, train_cfg)
    start_images = 0
    step = 0
    critic_updates = 0
    generator_updates = 0

    if resume is not None:
        state = resume.adaptive_state
        counters = resume.counters
        start_images = counters["images_seen"]
        step = counters["step"]
        critic_updates = counters.get("critic_updates", step)
        generator_updates = counters.get("generator_updates", step)
        if resume.optimizer_states:
            for key, opt in optimizers.items():
                opt.load_state_dict(resume.optimizer_states[key])
        if resume.rng_state:
            rng.bit_generator.state = resume.rng_state["numpy"]
            torch_gen.set_state(torch.as_tensor(resume.rng_state["torch"], dtype=torch.uint8))

    # the classifier only guides; its weights never move here
    ac.eval()
    for p in ac.parameters():
        p.requires_grad_(False)

    n = images.shape[0]
    latent_dim = generator.cfg.latent_dim
    k_critic = train_cfg.critic_steps_per_gen_step
    nonfinite_streak = 0
    images_seen = start_images
    phase_index = 0
    phase_consumed = 0

    writer = TelemetryWriter(telemetry_path)
    try:
        for s in phase_batches(schedule, train_cfg.total_images, train_cfg.gan_batch, start_images):
            while generator.resolution < s.resolution:
                generator.grow()
                critic.grow()
                optimizers = _make_optimizers(generator, critic, train_cfg)
            fade = (
                FadeState.fading(s.resolution, s.alpha)
                if s.mode == "fade"
                else FadeState.stable(s.resolution)
            )
            score = lambda img: critic(img, fade)  # noqa: E731
            b = s.batch_size
            at_final = s.resolution == final_res
            phase_index, phase_consumed = s.phase_index, s.phase_consumed_before + b

            # ---- critic update (consumes the real batch) ----
            idx = rng.integers(0, n, size=b)
            real = reals_at(s.resolution)[idx]
            z = torch.randn(b, latent_dim, generator=torch_gen)
            try:
                with torch.no_grad():
                    fake = generator(z, conditions[idx], fade)
                optimizers["critic"].zero_grad()
                d_loss = critic_loss(score, real, fake, loss_cfg, torch_gen)
                d_loss.backward()
                optimizers["critic"].step()
                d_val = float(d_loss.detach())
            except NumericError:
                d_val = float("nan")
            critic_updates += 1
            images_seen += b
            telemetry = None
            if critic_updates % k_critic == 0:
                # ---- generator update ----
                idx_g = rng.integers(0, n, size=b)
                z_g = torch.randn(b, latent_dim, generator=torch_gen)
                cond_g = conditions[idx_g]
                try:
                    fake_g = generator(z_g, cond_g, fade)
                    optimizers["generator"].zero_grad()
                    if at_final:
                        gl = conditioned_generator_loss(score, ac, fake_g, cond_g, state)
                        gl.total.backward()
                        optimizers["generator"].step()
                        with torch.no_grad():
                            real_parts = ac_condition_losses(
                                ac(reals_at(final_res)[idx_g]), cond_g
                            )
                        gen_parts = {key: float(v.detach()) for key, v in gl.raw_parts.items()}
                        real_vals = {key: float(v) for key, v in real_parts.items()}
                        if all(
                            math.isfinite(v) for v in (*gen_parts.values(), *real_vals.values())
                        ):
                            state = update_adaptive_weights(state, gen_parts, real_vals)
                        g_adv, g_total = float(gl.adv.detach()), float(gl.total.detach())
                        parts = gen_parts
                    else:
                        g_loss = generator_adv_loss(score, fake_g)
                        g_loss.backward()
                        optimizers["generator"].step()
                        g_adv = g_total = float(g_loss.detach())
                        parts = None
                except NumericError:
                    g_adv = g_total = float("nan")
                    parts = None
                generator_updates += 1
                step += 1
                telemetry = {
                    "step": step,
                    "images_seen": images_seen,
                    "resolution": s.resolution,
                    "mode": s.mode,
                    "alpha": round(s.alpha, 6),
                    "critic_loss": d_val,
                    "gen_adv": g_adv,
                    "gen_total": g_total,
                    "ac_parts": parts,
                    "gamma": dict(state.gamma),
                }
                writer.log(**telemetry)
                if progress is not None and step % progress_every == 0:
                    progress(telemetry)

            finite = math.isfinite(d_val) and (telemetry is None or math.isfinite(telemetry["gen_total"]))
            nonfinite_streak = 0 if finite else nonfinite_streak + 1
            if nonfinite_streak >= train_cfg.divergence_patience:
                writer.flush()
                tail = read_telemetry(telemetry_path)[-train_cfg.divergence_patience :]
                raise DivergenceError(
                    f"losses non-finite for {nonfinite_streak} consecutive steps", tail
                )
    finally:
        writer.close()

    counters = {
        "images_seen": images_seen,
        "step": step,
        "critic_updates": critic_updates,
        "generator_updates": generator_updates,
        "phase_index": phase_index,
        "phase_consumed": phase_consumed,
    }
    rng_state = {
        "numpy": rng.bit_generator.state,
        "torch": torch_gen.get_state().tolist(),
    }
    ckpt_path = save_checkpoint(
        out_dir / "checkpoint.pt",
        generator=generator,
        critic=critic,
        ac=ac,
        net_config=generator.cfg,
        space=space,
        adaptive_state=state,
        counters=counters,
        train_config=train_cfg,
        optimizers=optimizers,
        rng_state=rng_state,
    )
    return TrainResult(
        checkpoint_path=ckpt_path,
        telemetry_path=telemetry_path,
        images_seen=images_seen,
        critic_updates=critic_updates,
        generator_updates=generator_updates,
        adaptive_state=state,
    )
