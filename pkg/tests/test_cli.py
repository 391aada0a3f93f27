import json
from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from contrastgan.cli import cli
from contrastgan.data.manifest import parse_manifest, write_manifest
from tests.conftest import make_record


@pytest.fixture(scope="module")
def runner():
    return CliRunner()


TINY_CONFIG = {
    "profile": "desk",
    "net": {
        "latent_dim": 8,
        "base_resolution": 4,
        "final_resolution": 16,
        "channels": {"4": 8, "8": 6, "16": 4},
        "ac_backbone": "small",
    },
    "train": {"gan_batch": 8, "images_per_phase": 24, "total_images": 120},
    "adaptive": {"r": 0.05},
}


@pytest.fixture(scope="module")
def workspace(runner, tmp_path_factory):
    """phantom -> train-ac -> train-gan pipeline shared by CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    data = root / "data"
    r = runner.invoke(cli, [
        "phantom", "--count", "60", "--size", "16", "--seed", "3",
        "--val-images", "12", "--test-images", "12", "--out", str(data),
    ])
    assert r.exit_code == 0, r.output

    cfg_path = root / "cfg.json"
    cfg_path.write_text(json.dumps(TINY_CONFIG))

    ac_dir = root / "ac"
    r = runner.invoke(cli, [
        "train-ac", "--data", str(data), "--epochs", "2", "--batch", "16",
        "--config", str(cfg_path), "--out", str(ac_dir), "--seed", "0",
    ])
    assert r.exit_code == 0, r.output

    gan_dir = root / "gan"
    r = runner.invoke(cli, [
        "train-gan", "--data", str(data), "--ac", str(ac_dir / "ac.pt"),
        "--config", str(cfg_path), "--out", str(gan_dir), "--seed", "0",
    ])
    assert r.exit_code == 0, r.output
    return {"root": root, "data": data, "ac": ac_dir, "gan": gan_dir, "cfg": cfg_path}


class TestPhantom:
    def test_outputs(self, workspace):
        data = workspace["data"]
        for name in ("manifest.csv", "train.csv", "val.csv", "test.csv"):
            assert (data / name).exists()
        records = parse_manifest(data / "val.csv")
        assert len(records) >= 12
        assert records[0].pixels.shape == (16, 16)


class TestIngest:
    def test_filter_and_split(self, runner, tmp_path):
        rng = np.random.default_rng(0)
        records = []
        for i in range(30):
            records.append(make_record(
                study=f"st{i}", series="se0", slice_index=2, slice_count=6,
                field=1.5 if i % 3 else 3.0,
                pixels=rng.uniform(0, 100, (20, 20)),
            ))
        raw = tmp_path / "raw"
        write_manifest(records, raw / "manifest.csv")
        out = tmp_path / "proc"
        r = runner.invoke(cli, [
            "ingest", "--manifest", str(raw / "manifest.csv"), "--out", str(out),
            "--target-size", "16", "--val-images", "4", "--test-images", "4",
        ])
        assert r.exit_code == 0, r.output
        report = json.loads((out / "filter_report.json").read_text())
        assert report["input_count"] == 30
        assert report["kept_count"] == 20
        assert all(e["rule"] == "field_strength" for e in report["rejected"])
        processed = parse_manifest(out / "train.csv")
        assert processed[0].pixels.shape == (16, 16)


class TestTrainCommands:
    def test_ac_artifacts(self, workspace):
        ac_dir = workspace["ac"]
        assert (ac_dir / "ac.pt").exists()
        assert (ac_dir / "metrics.csv").exists()
        assert (ac_dir / "pretrain_curve.png").exists()

    def test_gan_artifacts(self, workspace):
        gan_dir = workspace["gan"]
        assert (gan_dir / "checkpoint.pt").exists()
        assert (gan_dir / "telemetry.jsonl").exists()
        assert (gan_dir / "telemetry.png").exists()

    def test_resume_runs(self, runner, workspace, tmp_path):
        cfg = json.loads(workspace["cfg"].read_text())
        cfg["train"]["total_images"] = 160
        cfg_path = tmp_path / "resume.json"
        cfg_path.write_text(json.dumps(cfg))
        r = runner.invoke(cli, [
            "train-gan", "--data", str(workspace["data"]),
            "--config", str(cfg_path), "--resume", str(workspace["gan"] / "checkpoint.pt"),
            "--out", str(tmp_path / "resumed"), "--seed", "0",
        ])
        assert r.exit_code == 0, r.output
        assert "160 images" in r.output


class TestReportCommands:
    def test_eval(self, runner, workspace, tmp_path):
        out = tmp_path / "eval"
        r = runner.invoke(cli, [
            "eval", "--ckpt", str(workspace["gan"] / "checkpoint.pt"),
            "--data", str(workspace["data"]), "--out", str(out),
        ])
        assert r.exit_code == 0, r.output
        metrics = json.loads((out / "metrics.json").read_text())
        assert "test" in metrics and "synthetic" in metrics
        assert (out / "metrics.csv").exists()
        assert (out / "tr_scatter.png").exists()

    def test_grid(self, runner, workspace, tmp_path):
        out = tmp_path / "grid"
        r = runner.invoke(cli, [
            "grid", "--ckpt", str(workspace["gan"] / "checkpoint.pt"),
            "--z-seed", "5", "--tr", "2000,4000", "--te", "15,45",
            "--orientation", "sagittal", "--out", str(out),
        ])
        assert r.exit_code == 0, r.output
        assert (out / "montage.png").exists()
        sidecar = (out / "sidecar.csv").read_text().splitlines()
        assert len(sidecar) == 5  # header + 4 tiles

    def test_turing_cycle(self, runner, workspace, tmp_path):
        out = tmp_path / "turing"
        r = runner.invoke(cli, [
            "turing-build", "--ckpt", str(workspace["gan"] / "checkpoint.pt"),
            "--data", str(workspace["data"]), "--split", "test",
            "--n", "6", "--seed", "0", "--out", str(out),
        ])
        assert r.exit_code == 0, r.output
        session_path = out / "session.json"
        assert session_path.exists()
        session = json.loads(session_path.read_text())
        assert len(session["grids"]) == 2
        for item in session["items"].values():
            assert Path(item["ref"]).exists()

        # simulate one reader, then report
        from contrastgan.evaluation.turing import load_session, save_session, submit_grid_labels

        s = load_session(session_path)
        for g in range(s.n_grids):
            truths = [s.items[i].true_label for i in s.grids[g]]
            assert submit_grid_labels(s, "e1", g, truths)
        save_session(s, session_path)
        rep_out = tmp_path / "report"
        r = runner.invoke(cli, [
            "turing-report", "--session", str(session_path), "--out", str(rep_out),
        ])
        assert r.exit_code == 0, r.output
        report = json.loads((rep_out / "report.json").read_text())
        assert report["per_reader"]["e1"]["accuracy"] == 1.0
        assert (rep_out / "confusion.png").exists()
        assert (rep_out / "report.csv").exists()

    def test_plot_telemetry(self, runner, workspace, tmp_path):
        out = tmp_path / "fig.png"
        r = runner.invoke(cli, [
            "plot-telemetry", "--telemetry", str(workspace["gan"] / "telemetry.jsonl"),
            "--out", str(out),
        ])
        assert r.exit_code == 0, r.output
        assert out.exists()
