"""
Tests for the pipeline orchestrator, its stages and the artifact manager.

Most tests run on a small synthetic dataset; the end-to-end accuracy check
on a full-size scene is marked slow.
"""

import json
from dataclasses import replace

import pytest

from canopylab.managers.artifact_manager import ArtifactManager, to_json
from canopylab.manifest import read_manifest
from canopylab.pipeline import Pipeline, run_pipeline
from canopylab.raster.container import read_mask
from canopylab.raster.png import decode_png
from canopylab.stages import STAGE_ORDER
from canopylab.synthetic import SyntheticSceneSpec, write_synthetic_dataset
from canopylab.utils import config
from canopylab.utils.errors import ManifestError, MalformedFileError, StageError

ALL_STAGES = ["rasterize", "label", "train", "predict", "evaluate", "change", "overlay"]


@pytest.fixture(scope="module")
def small_manifest(tmp_path_factory):
    """Manifest of a 32 m dataset with three inference years and full truth."""
    directory = tmp_path_factory.mktemp("dataset")
    spec = SyntheticSceneSpec(
        size_m=32.0,
        point_density=6.0,
        tree_count=3,
        tree_radius=(3.0, 4.0),
        building_count=1,
        building_size=(4.0, 6.0),
    )
    path = write_synthetic_dataset(
        directory,
        seed=4,
        spec=spec,
        train_year=2020,
        years=(2010, 2012, 2014),
        removal_fractions=(0.3, 0.0),
        samples=80,
    )
    return read_manifest(path)


@pytest.fixture(scope="module")
def small_run(small_manifest):
    """One complete run over the small dataset."""
    return run_pipeline(small_manifest)


class TestFullRun:
    """Test a run with every stage active."""

    def test_every_stage_runs(self, small_run):
        """All seven stages run in order."""
        assert list(small_run.stages_run) == ALL_STAGES
        assert [stage.name for stage in STAGE_ORDER] == ALL_STAGES

    def test_expected_artifacts(self, small_run):
        """Each stage leaves its artifacts and the index lists them."""
        names = set(small_run.artifact_paths())

        expected = {
            "stats.cnpy",
            "stats_preview.png",
            "rule.txt",
            "noisy_labels.mask",
            "noisy_labels.png",
            "model_noisy.csvm",
            "model_exact.csvm",
            "training.json",
            "metrics.json",
            config.RUN_SUMMARY_FILE,
        }
        for model in ("noisy", "exact"):
            for year in (2010, 2012, 2014):
                expected |= {f"prediction_{model}_{year}.mask", f"prediction_{model}_{year}.png"}
        for t1, t2 in ((2010, 2012), (2012, 2014)):
            expected |= {
                f"change_scene_{t1}_{t2}.json",
                f"loss_scene_{t1}_{t2}.mask",
                f"overlay_scene_{t1}_{t2}.png",
            }
        assert names == expected
        for name in names:
            assert (small_run.output_dir / name).is_file()

    def test_index_records_digests(self, small_run):
        """index.json holds path, stage, kind and digest of every artifact."""
        index = json.loads((small_run.output_dir / config.RUN_INDEX_FILE).read_text())

        entries = {entry["path"]: entry for entry in index["artifacts"]}
        assert entries["model_noisy.csvm"]["stage"] == "train"
        assert entries["overlay_scene_2010_2012.png"]["kind"] == "overlay"
        assert all(len(entry["sha256"]) == 64 for entry in entries.values())

    def test_one_change_report_per_year_pair(self, small_run):
        """Three years give two change reports, each with a loss mask."""
        changes = small_run.summary["changes"]

        assert [(c["year_t1"], c["year_t2"]) for c in changes] == [(2010, 2012), (2012, 2014)]
        first = json.loads((small_run.output_dir / "change_scene_2010_2012.json").read_text())
        assert first["relative_change_pct"] < 0
        loss = read_mask((small_run.output_dir / "loss_scene_2010_2012.mask").read_bytes())
        assert loss.tree_count() == first["loss_px"]

    def test_performance_table(self, small_run):
        """Noisy labels and both models are scored against exact labels."""
        rows = small_run.summary["performance"]

        models = {row["model"] for row in rows}
        assert models == {"noisy labels", "svm (noisy labels)", "svm (exact labels)"}
        assert len(rows) == 1 + 2 * 3
        assert all(0.0 <= row["f1"] <= 1.0 for row in rows)

    def test_overlay_matches_grid(self, small_run):
        """Overlays are RGB images of the inference grid."""
        pixels = decode_png((small_run.output_dir / "overlay_scene_2010_2012.png").read_bytes())

        assert pixels.shape == (32, 32, 3)

    def test_rerun_is_byte_identical(self, small_run, small_manifest, tmp_path):
        """Running the same manifest again reproduces every artifact digest."""
        again = run_pipeline(replace(small_manifest, output_dir=tmp_path / "again"))

        assert again.artifacts == small_run.artifacts


class TestStageGating:
    """Stages without inputs are skipped."""

    def test_single_year_without_truth(self, small_manifest, tmp_path):
        """One year and no truth leaves only the four core stages."""
        year = small_manifest.years[0]
        manifest = replace(
            small_manifest,
            output_dir=tmp_path / "out",
            predict={year: small_manifest.predict[year]},
            truth={},
            aois={},
        )

        result = run_pipeline(manifest)

        assert list(result.stages_run) == ALL_STAGES[:4]
        assert not (tmp_path / "out" / "metrics.json").exists()
        assert "model_exact.csvm" not in result.artifact_paths()

    def test_whole_grid_aoi_by_default(self, small_manifest, tmp_path):
        """Without named AOIs the change covers the whole grid."""
        manifest = replace(
            small_manifest,
            output_dir=tmp_path / "out",
            predict={y: small_manifest.predict[y] for y in small_manifest.years[:2]},
            truth={},
            aois={},
        )

        result = run_pipeline(manifest)

        assert "change_all_2010_2012.json" in result.artifact_paths()
        assert result.summary["changes"][0]["aoi"] == {
            "col_off": 0,
            "row_off": 0,
            "width": 32,
            "height": 32,
        }


class TestFailures:
    """Test failure handling."""

    def test_missing_input_fails_before_any_stage(self, small_manifest, tmp_path):
        """A manifest naming an absent file is rejected up front."""
        manifest = replace(small_manifest, cloud=tmp_path / "absent.xyz")

        with pytest.raises(ManifestError):
            Pipeline(manifest)

    def test_failing_stage_leaves_marker(self, small_manifest, tmp_path):
        """A corrupt inference image stops the run in predict with a FAILED marker."""
        broken = tmp_path / "broken.cnpy"
        broken.write_bytes(b"not a container at all")
        year = small_manifest.years[0]
        out = tmp_path / "out"
        manifest = replace(
            small_manifest, output_dir=out, predict={year: broken}, truth={}, aois={}
        )

        with pytest.raises(StageError) as exc:
            run_pipeline(manifest)

        assert exc.value.stage == "predict"
        assert isinstance(exc.value.cause, MalformedFileError)
        assert exc.value.exit_code == MalformedFileError.exit_code
        marker = json.loads((out / config.FAILURE_MARKER_FILE).read_text())
        assert marker["stage"] == "predict"
        assert marker["type"] == "MalformedFileError"
        assert (out / "model_noisy.csvm").is_file()
        index = json.loads((out / config.RUN_INDEX_FILE).read_text())
        assert "stats.cnpy" in [entry["path"] for entry in index["artifacts"]]

    def test_successful_rerun_clears_marker(self, small_manifest, tmp_path):
        """A stale marker disappears when the output directory is reused."""
        out = tmp_path / "out"
        out.mkdir()
        (out / config.FAILURE_MARKER_FILE).write_text("{}")
        year = small_manifest.years[0]

        run_pipeline(
            replace(
                small_manifest,
                output_dir=out,
                predict={year: small_manifest.predict[year]},
                truth={},
            )
        )

        assert not (out / config.FAILURE_MARKER_FILE).exists()


class TestArtifactManager:
    """Test the run output manager."""

    def test_write_records_entry(self, tmp_path):
        """Writing a file records its stage, kind and digest."""
        manager = ArtifactManager(tmp_path / "run")

        path = manager.write("a.txt", "hello", "label", "rule")

        assert path.read_text() == "hello"
        entry = manager.artifact("a.txt")
        assert entry["stage"] == "label"
        assert entry["sha256"] == (
            "2cf24dba5fb0a30e26e83b2ac5b9e29e1b161e5c1fa7425e73043362938b9824"
        )
        assert manager.artifact("b.txt") is None

    def test_rewrite_replaces_entry(self, tmp_path):
        """Writing the same name twice keeps one index entry."""
        manager = ArtifactManager(tmp_path)

        manager.write("a.bin", b"1", "train", "model")
        manager.write("a.bin", b"2", "train", "model")

        index = json.loads(manager.index_path.read_text())
        assert len(index["artifacts"]) == 1

    def test_json_is_stable(self, tmp_path):
        """JSON artifacts have sorted keys and a trailing newline."""
        manager = ArtifactManager(tmp_path)

        path = manager.write_json("m.json", {"b": 1, "a": 2}, "evaluate", "metrics")

        assert path.read_text() == to_json({"a": 2, "b": 1})
        assert path.read_text().endswith("}\n")
        assert path.read_text().index('"a"') < path.read_text().index('"b"')

    def test_mark_failed(self, tmp_path):
        """The marker names the stage and the error."""
        manager = ArtifactManager(tmp_path)

        marker = manager.mark_failed("train", ValueError("boom"))

        assert json.loads(marker.read_text()) == {
            "stage": "train",
            "error": "boom",
            "type": "ValueError",
        }


@pytest.mark.slow
@pytest.mark.integration
class TestEndToEnd:
    """Full-size synthetic scene through the whole pipeline."""

    def test_accuracy_on_synthetic_scene(self, tmp_path):
        """Noisy labels are fair, and the SVM trained on them is better."""
        manifest = read_manifest(write_synthetic_dataset(tmp_path, samples=500))

        result = run_pipeline(manifest)

        rows = result.summary["performance"]
        noisy = next(row for row in rows if row["model"] == "noisy labels")
        svm = [row for row in rows if row["model"] == "svm (noisy labels)"]
        assert noisy["precision"] >= 0.7
        assert noisy["recall"] >= 0.7
        assert len(svm) == len(config.SYNTH_YEARS)
        for row in svm:
            assert row["f1"] >= 0.80
            assert row["f1"] >= noisy["f1"]

        changes = result.summary["changes"]
        first = changes[0]["relative_change_pct"]
        assert first == pytest.approx(-100 * config.SYNTH_REMOVAL_FRACTIONS[0], abs=6.0)
