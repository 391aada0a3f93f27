"""Command-line interface.

Report-producing commands write machine-readable CSV/JSON next to
rendered matplotlib figures. Training commands consume the data
directories produced by ``phantom``/``ingest`` (per-split manifests)
and a JSON run config documented in the README.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import click
import numpy as np

from .conditions import ConditionSpace, ConditionVector
from .data import (
    FilterConfig,
    PhantomSpec,
    build_phantom_dataset,
    filter_records,
    parse_manifest,
    split_by_study,
    write_manifest,
)
from .data.preprocess import preprocess_image
from .errors import ConfigError
from .losses import AdaptiveWeightState, GanLossConfig
from .models import NetConfig, build_ac, build_discriminator, build_generator, desk_config
from .training import (
    TrainConfig,
    desk_adaptive_state,
    desk_train_config,
    load_checkpoint,
    make_schedule,
    pretrain_ac,
    read_telemetry,
    train_gan,
)
from .training.checkpoint import load_ac_checkpoint, save_ac_checkpoint


@click.group()
def cli():
    """Contrast-conditioned MR-like image synthesis toolkit."""


def _write_csv(path, rows: list[dict]) -> None:
    if not rows:
        Path(path).write_text("")
        return
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)


def _load_split(data_dir, split: str):
    path = Path(data_dir) / f"{split}.csv"
    if not path.exists():
        raise ConfigError(f"no {split}.csv under {data_dir}; run `phantom` or `ingest` first")
    return parse_manifest(path)


def _space_from_records(records) -> ConditionSpace:
    # orientation vocabulary in first-seen order; ranges stay at defaults
    seen = []
    for r in records:
        if r.orientation not in seen:
            seen.append(r.orientation)
    default = ConditionSpace()
    known = [o for o in default.orientations if o in seen]
    extra = [o for o in seen if o not in default.orientations]
    return ConditionSpace(orientations=tuple(known + extra) or default.orientations)


def _write_splits(records, out_dir: Path, val_images: int, test_images: int, seed: int) -> dict:
    train, val, test = split_by_study(records, val_images, test_images, seed)
    for name, split in (("train", train), ("val", val), ("test", test)):
        write_manifest(split, out_dir / f"{name}.csv", pixels_dir="pixels")
    return {"train": len(train), "val": len(val), "test": len(test)}


@cli.command()
@click.option("--count", type=int, default=3000, show_default=True)
@click.option("--size", type=int, default=64, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--noise-sigma", type=float, default=0.05, show_default=True)
@click.option("--val-images", type=int, default=300, show_default=True)
@click.option("--test-images", type=int, default=300, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def phantom(count, size, seed, noise_sigma, val_images, test_images, out):
    """Generate a physics-based phantom dataset with split manifests."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    space = ConditionSpace()
    spec = PhantomSpec(canvas=size, noise_sigma=noise_sigma)
    records = build_phantom_dataset(count, spec, space, seed)
    write_manifest(records, out_dir / "manifest.csv", pixels_dir="pixels")
    sizes = _write_splits(records, out_dir, val_images, test_images, seed)
    click.echo(f"wrote {count} phantom slices to {out_dir} (splits: {sizes})")


@cli.command()
@click.option("--manifest", "manifest_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
@click.option("--target-size", type=int, default=256, show_default=True)
@click.option("--val-images", type=int, default=2000, show_default=True)
@click.option("--test-images", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
def ingest(manifest_path, out, target_size, val_images, test_images, seed):
    """Filter a raw manifest, preprocess pixels, and write split manifests."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = parse_manifest(manifest_path)
    kept, report = filter_records(records, FilterConfig())
    with open(out_dir / "filter_report.json", "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
    processed = [r.with_pixels(preprocess_image(r.pixels, target=target_size)) for r in kept]
    write_manifest(processed, out_dir / "manifest.csv", pixels_dir="pixels")
    sizes = _write_splits(processed, out_dir, val_images, test_images, seed)
    click.echo(
        f"kept {report.kept_count}/{report.input_count} records "
        f"({len(report.rejected)} rejected); splits: {sizes}"
    )


def _load_run_config(config_path, condition_dim: int, final_resolution: int | None = None):
    raw = {}
    if config_path:
        with open(config_path) as fh:
            raw = json.load(fh)
    profile = raw.get("profile", "desk")
    if profile == "desk":
        net = desk_config(condition_dim=condition_dim, final_resolution=final_resolution or 64)
        train = desk_train_config()
    elif profile == "full":
        net = NetConfig(condition_dim=condition_dim)
        train = TrainConfig()
    else:
        raise ConfigError(f"unknown profile {profile!r} (expected desk|full)")
    if "net" in raw:
        merged = net.to_dict()
        merged.update(raw["net"])
        net = NetConfig.from_dict(merged)
    if "train" in raw:
        merged = train.to_dict()
        merged.update(raw["train"])
        train = TrainConfig.from_dict(merged)
    loss = GanLossConfig(**raw.get("loss", {}))
    adaptive_kwargs = dict(raw.get("adaptive", {}))
    if "tau" in adaptive_kwargs and isinstance(adaptive_kwargs["tau"], (int, float)):
        adaptive_kwargs["tau"] = {k: float(adaptive_kwargs["tau"]) for k in ("iop", "te", "tr")}
    if profile == "desk":
        adaptive = desk_adaptive_state(**adaptive_kwargs)
    else:
        adaptive = AdaptiveWeightState(**adaptive_kwargs)
    return net, train, loss, adaptive


@cli.command("train-ac")
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--epochs", type=int, default=200, show_default=True)
@click.option("--batch", type=int, default=64, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), required=True)
def train_ac_cmd(data_dir, epochs, batch, seed, config_path, out):
    """Pretrain the auxiliary classifier; writes checkpoint, metrics, figure."""
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    train_records = _load_split(data_dir, "train")
    val_records = _load_split(data_dir, "val")
    space = _space_from_records(train_records)
    resolution = train_records[0].pixels.shape[0]
    net_cfg, train_cfg, loss_cfg, _ = _load_run_config(
        config_path, space.encoded_dim, final_resolution=resolution
    )
    train_cfg = TrainConfig.from_dict({**train_cfg.to_dict(), "ac_batch": batch})
    ac = build_ac(net_cfg)
    result = pretrain_ac(
        ac, train_records, val_records, space, train_cfg,
        loss_cfg, epochs=epochs, seed=seed,
        progress=lambda e: click.echo(
            f"epoch {e['epoch']}: acc={e['orientation_accuracy']:.3f} "
            f"tr_mae={e['tr_mae_ms']:.1f}ms te_mae={e['te_mae_ms']:.2f}ms"
        ),
    )
    save_ac_checkpoint(out_dir / "ac.pt", ac, net_cfg, space, result.final.to_dict())
    _write_csv(out_dir / "metrics.csv", result.epochs)
    if result.epochs and epochs > 0:
        from .evaluation import figures as _figs
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(6, 4))
        ax.plot([e["epoch"] for e in result.epochs],
                [e["orientation_accuracy"] for e in result.epochs], label="orientation acc")
        ax.plot([e["epoch"] for e in result.epochs],
                [e["te_mae_ms"] / 10 for e in result.epochs], label="te mae [10ms]")
        ax.set_xlabel("epoch")
        ax.legend()
        ax.grid(alpha=0.3)
        fig.tight_layout()
        fig.savefig(out_dir / "pretrain_curve.png", dpi=120)
        plt.close(fig)
    click.echo(f"final: {result.final.to_dict()}")


@cli.command("train-gan")
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--ac", "ac_path", type=click.Path(exists=True), default=None,
              help="pretrained classifier checkpoint (required unless resuming)")
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--resume", "resume_path", type=click.Path(exists=True), default=None)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def train_gan_cmd(data_dir, ac_path, config_path, resume_path, seed, out):
    """Run progressive adversarial training; writes checkpoint + telemetry."""
    out_dir = Path(out)
    train_records = _load_split(data_dir, "train")
    space = _space_from_records(train_records)
    resolution = train_records[0].pixels.shape[0]
    net_cfg, train_cfg, loss_cfg, adaptive = _load_run_config(
        config_path, space.encoded_dim, final_resolution=resolution
    )
    resume = None
    if resume_path:
        resume = load_checkpoint(resume_path)
        net_cfg, space = resume.net_config, resume.space
        generator, critic, ac = resume.generator, resume.critic, resume.ac
        generator.train()
        critic.train()
    else:
        if not ac_path:
            raise ConfigError("--ac is required when not resuming")
        generator = build_generator(net_cfg)
        critic = build_discriminator(net_cfg)
        ac, _, _ = load_ac_checkpoint(ac_path)
    schedule = make_schedule(
        net_cfg.base_resolution, net_cfg.final_resolution, train_cfg.images_per_phase
    )
    result = train_gan(
        generator, critic, ac, train_records, space, train_cfg, loss_cfg,
        schedule=schedule, out_dir=out_dir, seed=seed,
        adaptive_state=adaptive, resume=resume,
        progress=lambda t: click.echo(
            f"step {t['step']} ({t['images_seen']} imgs, {t['resolution']}px {t['mode']}): "
            f"d={t['critic_loss']:.3f} g={t['gen_total']:.3f} gamma_te={t['gamma']['te']:.3f}"
        ),
    )
    from .evaluation.figures import save_telemetry_figure

    save_telemetry_figure(read_telemetry(result.telemetry_path), out_dir / "telemetry.png")
    click.echo(
        f"done: {result.images_seen} images, {result.generator_updates} generator updates, "
        f"gamma={result.adaptive_state.gamma}; checkpoint at {result.checkpoint_path}"
    )


@cli.command("eval")
@click.option("--ckpt", "ckpt_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--split", default="test", show_default=True)
@click.option("--synthetic/--no-synthetic", default=True, show_default=True,
              help="also evaluate readback on generated images at the split's conditions")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def eval_cmd(ckpt_path, data_dir, split, synthetic, seed, out):
    """Conditioning metrics on real (and matched synthetic) images."""
    from .evaluation.figures import save_readback_scatter
    from .evaluation.metrics import eval_ac, eval_ac_on_synthetic, predict_conditions
    from .conditions import denormalize_units

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ckpt = load_checkpoint(ckpt_path)
    records = _load_split(data_dir, split)
    space = ckpt.space
    results = {split: eval_ac(ckpt.ac, records, space).to_dict()}
    if synthetic:
        conditions = [ConditionVector(r.tr_ms, r.te_ms, r.orientation) for r in records]
        results["synthetic"] = eval_ac_on_synthetic(
            ckpt.ac, ckpt.generator, conditions, space, seed=seed
        ).to_dict()
    with open(out_dir / "metrics.json", "w") as fh:
        json.dump(results, fh, indent=2)
    _write_csv(out_dir / "metrics.csv", [{"dataset": k, **v} for k, v in results.items()])

    images = np.stack([r.pixels for r in records]).astype(np.float32)
    _, tr_unit, te_unit = predict_conditions(ckpt.ac, images)
    tr_ms, te_ms = denormalize_units(tr_unit, te_unit, space)
    save_readback_scatter([r.tr_ms for r in records], tr_ms, "TR", out_dir / "tr_scatter.png")
    save_readback_scatter([r.te_ms for r in records], te_ms, "TE", out_dir / "te_scatter.png")
    click.echo(json.dumps(results, indent=2))


def _parse_values(raw: str) -> list[float]:
    return [float(v) for v in raw.split(",") if v.strip()]


@cli.command("grid")
@click.option("--ckpt", "ckpt_path", type=click.Path(exists=True), required=True)
@click.option("--z-seed", type=int, default=0, show_default=True)
@click.option("--tr", default="1800,3400,5000", show_default=True)
@click.option("--te", default="12,31,50", show_default=True)
@click.option("--orientation", default="coronal", show_default=True)
@click.option("--out", type=click.Path(), required=True)
def grid_cmd(ckpt_path, z_seed, tr, te, orientation, out):
    """Interpolation grid: annotated montage figure plus CSV sidecar."""
    from .evaluation.figures import save_grid_figure
    from .evaluation.interpolation import render_interpolation_grid
    from .synthesis import latents_from_seed

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    ckpt = load_checkpoint(ckpt_path)
    z = latents_from_seed(z_seed, 1, ckpt.net_config.latent_dim)[0]
    result = render_interpolation_grid(
        ckpt.generator, ckpt.ac, z, _parse_values(tr), _parse_values(te),
        orientation, ckpt.space,
    )
    save_grid_figure(result, out_dir / "montage.png")
    _write_csv(out_dir / "sidecar.csv", result.sidecar_rows())
    click.echo(f"wrote {out_dir / 'montage.png'} and sidecar.csv "
               f"({len(result.sidecar_rows())} tiles)")


@cli.command("turing-build")
@click.option("--ckpt", "ckpt_path", type=click.Path(exists=True), required=True)
@click.option("--data", "data_dir", type=click.Path(exists=True), required=True)
@click.option("--split", default="test", show_default=True)
@click.option("--n", "n_per_class", type=int, default=75, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(), required=True)
def turing_build_cmd(ckpt_path, data_dir, split, n_per_class, seed, out):
    """Build a labeling session: real items plus condition-matched synthetics."""
    from .evaluation.turing import build_turing_session, save_session
    from .service.codec import image_to_png16
    from .synthesis import generate_batch, latents_from_seed

    out_dir = Path(out)
    items_dir = out_dir / "items"
    items_dir.mkdir(parents=True, exist_ok=True)
    ckpt = load_checkpoint(ckpt_path)
    records = _load_split(data_dir, split)
    rng = np.random.default_rng(seed)
    if len(records) < n_per_class:
        raise ConfigError(f"split has {len(records)} images, need {n_per_class}")
    picks = [records[i] for i in rng.permutation(len(records))[:n_per_class]]
    conditions = [ConditionVector(r.tr_ms, r.te_ms, r.orientation) for r in picks]
    z = latents_from_seed(seed + 1, n_per_class, ckpt.net_config.latent_dim)
    synth_images = generate_batch(ckpt.generator, z, conditions, ckpt.space)

    real_pool, synth_pool = [], []
    for i, (rec, cond) in enumerate(zip(picks, conditions)):
        real_ref = items_dir / f"real_{i:04d}.png"
        real_ref.write_bytes(image_to_png16(rec.pixels))
        real_pool.append({"ref": str(real_ref), "tr_ms": rec.tr_ms,
                          "te_ms": rec.te_ms, "orientation": rec.orientation})
        synth_ref = items_dir / f"synth_{i:04d}.png"
        synth_ref.write_bytes(image_to_png16(synth_images[i]))
        synth_pool.append({"ref": str(synth_ref), "tr_ms": cond.tr_ms,
                           "te_ms": cond.te_ms, "orientation": cond.orientation})

    session = build_turing_session(real_pool, synth_pool, n_per_class, seed)
    save_session(session, out_dir / "session.json")
    click.echo(f"session {session.session_id}: {session.n_grids} grids -> {out_dir/'session.json'}")


@cli.command("turing-report")
@click.option("--session", "session_path", type=click.Path(exists=True), required=True)
@click.option("--readers", default=None, help="comma-separated; default: all complete readers")
@click.option("--out", type=click.Path(), required=True)
def turing_report_cmd(session_path, readers, out):
    """Analytics for a completed session: JSON + CSV + confusion figure."""
    from .evaluation.figures import save_confusion_figure
    from .evaluation.turing import load_session, turing_analytics

    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    session = load_session(session_path)
    reader_list = [r for r in readers.split(",") if r] if readers else None
    report = turing_analytics(session, reader_list)
    with open(out_dir / "report.json", "w") as fh:
        json.dump(report.to_dict(), fh, indent=2)
    rows = []
    for reader, d in report.per_reader.items():
        cm = d["confusion"].counts
        rows.append({
            "reader": reader, "accuracy": d["accuracy"],
            "pred_real_true_real": cm["real"]["real"],
            "pred_real_true_synthetic": cm["real"]["synthetic"],
            "pred_synthetic_true_real": cm["synthetic"]["real"],
            "pred_synthetic_true_synthetic": cm["synthetic"]["synthetic"],
        })
    _write_csv(out_dir / "report.csv", rows)
    save_confusion_figure(report, out_dir / "confusion.png")
    click.echo(
        f"mean error raw={report.mean_error_raw:.4f} "
        f"rounded={report.mean_error_rounded:.4f} over {report.n_items} items"
    )


@cli.command("plot-telemetry")
@click.option("--telemetry", "telemetry_path", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(), required=True)
def plot_telemetry_cmd(telemetry_path, out):
    """Render loss and adaptive-weight curves from a telemetry log."""
    from .evaluation.figures import save_telemetry_figure

    records = read_telemetry(telemetry_path)
    save_telemetry_figure(records, out)
    click.echo(f"plotted {len(records)} steps to {out}")


@cli.command("serve")
@click.option("--ckpt", "ckpt_path", type=click.Path(exists=True), required=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--sessions-dir", type=click.Path(), default=None)
def serve_cmd(ckpt_path, host, port, sessions_dir):
    """Serve generation, grids, and Turing sessions over HTTP."""
    import uvicorn

    from .service import create_app

    app = create_app(ckpt_path, sessions_dir=sessions_dir)
    uvicorn.run(app, host=host, port=port)


def main():
    cli()


if __name__ == "__main__":
    main()
