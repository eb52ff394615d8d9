"""
Unit tests for run manifests.
"""

from pathlib import Path

import pytest

from canopylab.manifest import RunManifest, format_manifest, read_manifest
from canopylab.models.svm import TrainConfig
from canopylab.raster.grid import Window
from canopylab.utils import config
from canopylab.utils.errors import ManifestError

MINIMAL = """\
[run]
output_dir = out

[rasterize]
input = cloud.xyz

[train]
image = train.cnpy
year = 2017

[predict]
2011 = a.cnpy
2013 = b.cnpy
"""


def write(tmp_path, text, name="manifest.ini"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestReadManifest:
    """Test parsing manifests."""

    def test_minimal_manifest_uses_defaults(self, tmp_path):
        """Only the four required sections are needed."""
        manifest = read_manifest(write(tmp_path, MINIMAL))

        assert manifest.years == [2011, 2013]
        assert manifest.year_pairs == [(2011, 2013)]
        assert manifest.rule == config.DEFAULT_TREE_RULE
        assert manifest.train == TrainConfig(seed=config.SVM_SEED)
        assert manifest.cell_size == config.STATS_CELL_SIZE
        assert manifest.truth == {}
        assert manifest.aois == {}

    def test_relative_paths_resolve_against_manifest(self, tmp_path):
        """Relative paths are taken from the manifest's directory."""
        manifest = read_manifest(write(tmp_path, MINIMAL))
        base = tmp_path.resolve()

        assert manifest.output_dir == base / "out"
        assert manifest.cloud == base / "cloud.xyz"
        assert manifest.predict[2013] == base / "b.cnpy"

    def test_absolute_paths_are_kept(self, tmp_path):
        """Absolute paths are used as given."""
        text = MINIMAL.replace("input = cloud.xyz", "input = /data/cloud.las")

        assert read_manifest(write(tmp_path, text)).cloud == Path("/data/cloud.las")

    def test_optional_sections(self, tmp_path):
        """Truth, change, label and overlay sections are read."""
        text = MINIMAL + (
            "\n[truth]\n2011 = lc.asc\ntree_classes = 1, 4\n"
            "\n[change]\naoi.shore = 0,0,64,32\naoi.park = 10,20,5,5\n"
            "\n[label]\nrule = count > 3\n"
            "\n[overlay]\nalpha = 0.25\nbands = nir,red,green\n"
        )

        manifest = read_manifest(write(tmp_path, text))

        assert manifest.truth == {2011: tmp_path.resolve() / "lc.asc"}
        assert manifest.tree_classes == (1, 4)
        assert manifest.aois == {"shore": Window(0, 0, 64, 32), "park": Window(10, 20, 5, 5)}
        assert manifest.rule == "count > 3"
        assert manifest.overlay_alpha == 0.25
        assert manifest.overlay_bands == ("nir", "red", "green")

    def test_training_parameters(self, tmp_path):
        """SVM parameters come from [train] and the seed from [run]."""
        text = MINIMAL.replace("[run]\n", "[run]\nseed = 7\nthreads = 3\n").replace(
            "year = 2017\n", "year = 2017\nC = 2.5\ngamma = 4\nsamples = 100\n"
        )

        manifest = read_manifest(write(tmp_path, text))

        assert manifest.train == TrainConfig(C=2.5, gamma=4.0, sample_count=100, seed=7)
        assert manifest.threads == 3

    def test_rule_file(self, tmp_path):
        """A rule file is read and normalised."""
        (tmp_path / "trees.rule").write_text("# canopy\ncount > 3\n&& elevation.std >= 1\n")
        text = MINIMAL + "\n[label]\nrule_file = trees.rule\n"

        manifest = read_manifest(write(tmp_path, text))

        assert manifest.rule == "count > 3.0 && elevation.std >= 1.0"

    @pytest.mark.parametrize("section", ["run", "rasterize", "train", "predict"])
    def test_missing_required_section(self, tmp_path, section):
        """Each required section must be present."""
        text = MINIMAL.replace(f"[{section}]", "[other]")

        with pytest.raises(ManifestError):
            read_manifest(write(tmp_path, text))

    def test_missing_required_key(self, tmp_path):
        """[train] needs a year."""
        with pytest.raises(ManifestError):
            read_manifest(write(tmp_path, MINIMAL.replace("year = 2017\n", "")))

    @pytest.mark.parametrize(
        "old,new",
        [
            ("2011 = a.cnpy\n2013 = b.cnpy", "2013 = b.cnpy\n2011 = a.cnpy"),
            ("2011 = a.cnpy", "later = a.cnpy"),
            ("year = 2017", "year = soon"),
            ("[train]\n", "[train]\nC = -1\n"),
        ],
    )
    def test_invalid_values(self, tmp_path, old, new):
        """Unordered years, non-numeric values and bad parameters are rejected."""
        with pytest.raises(ManifestError):
            read_manifest(write(tmp_path, MINIMAL.replace(old, new)))

    @pytest.mark.parametrize(
        "entry", ["aoi.a = 1,2,3", "aoi.a = 0,0,1.5,2", "window = 0,0,1,1", "aoi.a = x,0,1,1"]
    )
    def test_invalid_aoi(self, tmp_path, entry):
        """AOIs need four whole numbers under an aoi. key."""
        with pytest.raises(ManifestError):
            read_manifest(write(tmp_path, MINIMAL + f"\n[change]\n{entry}\n"))

    def test_missing_file(self, tmp_path):
        """An absent manifest is a manifest error."""
        with pytest.raises(ManifestError):
            read_manifest(tmp_path / "absent.ini")


class TestRunManifest:
    """Test the manifest value object."""

    def make(self, tmp_path, **kwargs):
        fields = {
            "output_dir": tmp_path / "out",
            "cloud": tmp_path / "cloud.xyz",
            "train_image": tmp_path / "train.cnpy",
            "train_year": 2017,
            "predict": {2011: tmp_path / "a.cnpy"},
        }
        fields.update(kwargs)
        return RunManifest(**fields)

    def test_needs_an_inference_year(self, tmp_path):
        """An empty [predict] section cannot run."""
        with pytest.raises(ManifestError):
            self.make(tmp_path, predict={})

    def test_overlay_needs_three_bands(self, tmp_path):
        """The overlay renders exactly three bands."""
        with pytest.raises(ManifestError):
            self.make(tmp_path, overlay_bands=("red", "green"))

    def test_single_year_has_no_pairs(self, tmp_path):
        """Change needs two years."""
        assert self.make(tmp_path).year_pairs == []

    def test_check_files(self, tmp_path):
        """Every input must exist."""
        manifest = self.make(tmp_path, truth={2011: tmp_path / "t.mask"})
        for path in manifest.input_files()[:-1]:
            path.write_bytes(b"")

        with pytest.raises(ManifestError) as exc:
            manifest.check_files()

        assert "t.mask" in str(exc.value)

    def test_format_reads_back(self, tmp_path):
        """format_manifest writes text read_manifest parses to an equal manifest."""
        base = tmp_path.resolve()
        manifest = self.make(
            base,
            predict={2011: base / "a.cnpy", 2013: base / "b.cnpy"},
            seed=9,
            threads=2,
            radius=1.25,
            rule="count > 3.0",
            train=TrainConfig(C=3.0, gamma=0.5, tol=1e-4, max_passes=3, sample_count=70, seed=9),
            truth={2011: base / "t.mask"},
            tree_classes=(1, 2),
            aois={"x": Window(1, 2, 3, 4)},
            overlay_alpha=0.75,
        )

        path = write(base, format_manifest(manifest, relative_to=base))

        assert read_manifest(path) == manifest
        assert str(base) not in path.read_text()
