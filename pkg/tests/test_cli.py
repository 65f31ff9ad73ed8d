# tests/test_cli.py

import pytest

from ssvlab.core.errors import NumericalAbort
from ssvlab.crud import read_manifest, read_metric_csv, read_ordering, read_peaks, read_series
from ssvlab.main import build_parser, main
from ssvlab.schemas.manifest import CommandTag, RunStatus
from ssvlab.worker import WORKFLOWS

SMOKE = """\
SYSTEM=burgers
ARCH=mlp
WIDTH=8
DEPTH=2
T_MAX=0.5
STEPS=20
BATCH=32
RECORD_EVERY=5
N=256
T_END=1
OUTPUT_EVERY=0.05
EVAL_TIMES_START=0.5
EVAL_TIMES_STOP=1
EVAL_TIMES_COUNT=3
EVAL_RESOLUTION=64
TRIPTYCH_TIMES=1.0
"""


@pytest.fixture
def smoke_config(tmp_path):
    path = tmp_path / "smoke.env"
    path.write_text(SMOKE)
    return path


class TestExitCodes:
    def test_missing_config(self, tmp_path):
        assert main(["solve", "--config", str(tmp_path / "absent.env"), "--out", str(tmp_path / "run")]) == 2

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "bad.env"
        path.write_text("SYSTEM=burgers\nBATCH=0\n")
        assert main(["solve", "--config", str(path), "--out", str(tmp_path / "run")]) == 2

    def test_unknown_key(self, tmp_path):
        path = tmp_path / "typo.env"
        path.write_text("SYSTEM=burgers\nBATCHES=12\n")
        assert main(["train", "--config", str(path), "--out", str(tmp_path / "run")]) == 2

    def test_train_without_reference(self, tmp_path, smoke_config):
        run_dir = tmp_path / "run"
        assert main(["train", "--config", str(smoke_config), "--out", str(run_dir)]) == 3
        manifest = read_manifest(run_dir / "manifest.json")
        assert manifest.status == RunStatus.ERROR
        assert "reference.ssf" in manifest.error

    def test_numerical_abort(self, tmp_path, smoke_config, monkeypatch):
        def abort(cfg, run_dir):
            raise NumericalAbort("non-finite vorticity", {"t": 0.1})

        monkeypatch.setitem(WORKFLOWS, CommandTag.SOLVE, abort)
        assert main(["solve", "--config", str(smoke_config), "--out", str(tmp_path / "run")]) == 4

    def test_unexpected_failure(self, tmp_path, smoke_config, monkeypatch):
        def crash(cfg, run_dir):
            raise RuntimeError("boom")

        monkeypatch.setitem(WORKFLOWS, CommandTag.SOLVE, crash)
        assert main(["solve", "--config", str(smoke_config), "--out", str(tmp_path / "run")]) == 1

    def test_unknown_figure(self, tmp_path):
        assert main(["reproduce", "fig4", "--out", str(tmp_path)]) == 2

    def test_figure_system_mismatch(self, tmp_path, smoke_config):
        assert main(["reproduce", "fig1", "--config", str(smoke_config), "--out", str(tmp_path)]) == 2

    def test_truncated_reference(self, tmp_path, smoke_config):
        run_dir = tmp_path / "run"
        run_dir.mkdir()
        (run_dir / "reference.ssf").write_bytes(b"SSF1\x01\x00")
        assert main(["train", "--config", str(smoke_config), "--out", str(run_dir)]) == 3
        assert "truncated" in read_manifest(run_dir / "manifest.json").error

    def test_report_without_metrics(self, tmp_path):
        (tmp_path / "a").mkdir()
        assert main(["report", str(tmp_path / "a"), "--out", str(tmp_path / "ordering.json")]) == 3


class TestParser:
    def test_seed_list(self):
        args = build_parser().parse_args(["reproduce", "fig7", "--seeds", "0,1,2"])
        assert args.seeds == [0, 1, 2]

    def test_bad_seed_list(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["reproduce", "fig7", "--seeds", "a,b"])

    def test_config_required(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["train"])


class TestEndToEnd:
    def test_solve_train_eval(self, tmp_path, smoke_config):
        run_dir = tmp_path / "run"
        common = ["--config", str(smoke_config), "--out", str(run_dir)]

        assert main(["solve", *common]) == 0
        reference = read_series(run_dir / "reference.ssf")
        assert len(reference) == 21
        assert reference.t_last == pytest.approx(1.0)

        assert main(["train", *common]) == 0
        for name in ("ckpt_phys.ssc", "ckpt_ssv.ssc", "loss_phys.csv", "loss_ssv.csv"):
            assert (run_dir / name).is_file()
        manifest = read_manifest(run_dir / "manifest.json")
        assert manifest.command == CommandTag.TRAIN
        assert set(manifest.digests) == set(manifest.artifacts)

        assert main(["eval", *common]) == 0
        phys = read_metric_csv(run_dir / "metrics_phys.csv")
        ssv = read_metric_csv(run_dir / "metrics_ssv.csv")
        assert phys.label == "burgers-mlp-phys"
        assert ssv.label == "burgers-mlp-ssv"
        assert list(phys.times) == pytest.approx([0.5, 0.75, 1.0])
        assert (run_dir / "triptych_t1.csv").is_file()
        peaks = read_peaks(run_dir / "peaks.json")
        assert set(peaks.counts) == {"1"}
        assert peaks.at(1.0).reference >= 1
        attractor = read_metric_csv(run_dir / "attractor_distance.csv", column="l2_distance")
        assert attractor.label == "burgers-attractor"
        assert attractor.times[-1] == pytest.approx(1.0)
        manifest = read_manifest(run_dir / "manifest.json")
        assert {"peaks", "attractor_distance"} <= set(manifest.artifacts)

    def test_training_is_reproducible(self, tmp_path, smoke_config):
        run_dir = tmp_path / "run"
        assert main(["solve", "--config", str(smoke_config), "--out", str(run_dir)]) == 0
        first = tmp_path / "first"
        second = tmp_path / "second"
        reference = str(run_dir / "reference.ssf")
        config = smoke_config.read_text() + f"REFERENCE_PATH={reference}\n"
        smoke_config.write_text(config)

        assert main(["train", "--config", str(smoke_config), "--seed", "5", "--out", str(first)]) == 0
        assert main(["train", "--config", str(smoke_config), "--seed", "5", "--out", str(second)]) == 0
        for name in ("ckpt_phys.ssc", "ckpt_ssv.ssc"):
            assert (first / name).read_bytes() == (second / name).read_bytes()

    def test_reproduce_with_seeds(self, tmp_path, smoke_config):
        out = tmp_path / "out"
        assert main(["reproduce", "fig7", "--config", str(smoke_config), "--seeds", "0,1", "--out", str(out)]) == 0

        (run_dir,) = list(out.glob("fig7-*"))
        assert (run_dir / "reference.ssf").is_file()
        for seed in (0, 1):
            assert (run_dir / "mlp" / f"seed{seed}" / "metrics_ssv.csv").is_file()
        ordering = read_ordering(run_dir / "ordering.json")
        assert [entry.label for entry in ordering] == ["burgers-mlp"]
        assert ordering[0].seeds == 2
        manifest = read_manifest(run_dir / "manifest.json")
        assert manifest.command == CommandTag.REPRODUCE
        assert manifest.figure == "fig7"

        assert main(["report", str(run_dir / "mlp" / "seed0"), "--out", str(tmp_path / "again.json")]) == 0
        assert read_ordering(tmp_path / "again.json")[0].seeds == 1
