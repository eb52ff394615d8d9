"""
Unit tests for point cloud types and readers.

Tests LAS decoding, the text point format and format sniffing.
"""

import numpy as np
import pytest

from canopylab.lidar.las_reader import parse_las
from canopylab.lidar.loader import load_point_cloud, read_point_cloud
from canopylab.lidar.pointcloud import LidarPoint, PointCloud, compute_bounds
from canopylab.lidar.text_reader import format_xyz_text, parse_xyz_text
from canopylab.raster.grid import BoundingBox
from canopylab.utils.errors import (
    EmptyInputError,
    InputError,
    MalformedFileError,
    PointParseError,
    PointValidationError,
    TruncationError,
    UnsupportedFormatError,
)
from tests.oracles import write_las


@pytest.fixture
def sample_points():
    """A handful of returns on the 1 mm quantization grid."""
    return [
        LidarPoint(500000.125, 4100000.5, 12.25, 300, 1, 2),
        LidarPoint(500001.0, 4100001.75, 3.5, 40, 2, 2),
        LidarPoint(500002.5, 4099999.0, 0.0, 0, 1, 1),
        LidarPoint(499999.875, 4100002.25, 25.125, 65535, 3, 5),
    ]


def assert_same_points(cloud, points):
    assert len(cloud) == len(points)
    for got, want in zip(cloud, points):
        assert got.x == pytest.approx(want.x, abs=1e-9)
        assert got.y == pytest.approx(want.y, abs=1e-9)
        assert got.z == pytest.approx(want.z, abs=1e-9)
        assert got[3:] == want[3:]


class TestLasReader:
    """Test LAS decoding."""

    @pytest.mark.parametrize(
        "point_format,version",
        [
            (0, (1, 2)),
            (1, (1, 2)),
            (2, (1, 2)),
            (3, (1, 3)),
            (1, (1, 4)),
            (6, (1, 4)),
            (7, (1, 4)),
        ],
    )
    def test_decodes_every_supported_format(self, sample_points, point_format, version):
        """Every supported point format should decode to the written points."""
        data = write_las(sample_points, point_format=point_format, version=version)

        cloud = parse_las(data)

        assert_same_points(cloud, sample_points)

    def test_scale_and_offset_are_applied(self):
        """Stored integers should be multiplied by scale and shifted by offset."""
        points = [LidarPoint(1000.5, 2000.25, 10.0, 7, 1, 1)]
        data = write_las(points, scale=(0.01, 0.01, 0.01), offset=(1000.0, 2000.0, 5.0))

        cloud = parse_las(data)

        assert cloud[0].x == pytest.approx(1000.5)
        assert cloud[0].y == pytest.approx(2000.25)
        assert cloud[0].z == pytest.approx(10.0)

    def test_point_data_offset_skips_variable_records(self, sample_points):
        """Bytes between the header and the point data should be skipped."""
        data = write_las(sample_points, extra_vlr_bytes=54)

        assert_same_points(parse_las(data), sample_points)

    def test_extended_formats_carry_more_than_seven_returns(self):
        """Formats 6 and 7 should keep 4-bit return fields."""
        points = [LidarPoint(1.0, 2.0, 3.0, 10, 12, 15)]

        cloud = parse_las(write_las(points, point_format=6, version=(1, 4)))

        assert cloud[0].return_number == 12
        assert cloud[0].num_returns == 15

    def test_empty_file_gives_empty_cloud(self):
        """A header announcing zero points should decode to an empty cloud."""
        cloud = parse_las(write_las([]))

        assert cloud.is_empty
        assert cloud.bounds is None

    def test_missing_signature_is_malformed(self, sample_points):
        """Data without the LASF signature should be rejected."""
        data = b"XXXX" + write_las(sample_points)[4:]

        with pytest.raises(MalformedFileError):
            parse_las(data)

    def test_laz_compression_is_unsupported(self, sample_points):
        """A point format byte with the compression bits set should be named LAZ."""
        data = bytearray(write_las(sample_points))
        data[104] |= 0x80

        with pytest.raises(UnsupportedFormatError) as exc:
            parse_las(bytes(data))

        assert "LAZ" in str(exc.value)
        assert exc.value.format_id == data[104]

    def test_unknown_point_format_is_unsupported(self, sample_points):
        """Point formats outside the supported set should name the format id."""
        data = bytearray(write_las(sample_points))
        data[104] = 5

        with pytest.raises(UnsupportedFormatError) as exc:
            parse_las(bytes(data))

        assert exc.value.format_id == 5

    @pytest.mark.parametrize("version", [(2, 0), (1, 0), (1, 1)])
    def test_unsupported_version(self, sample_points, version):
        """LAS 2.x and versions before 1.2 should be rejected."""
        with pytest.raises(UnsupportedFormatError):
            parse_las(write_las(sample_points, point_format=0, version=version))

    def test_extended_format_needs_las_14(self, sample_points):
        """Formats 6 and 7 in a LAS 1.2 header name the format."""
        with pytest.raises(UnsupportedFormatError) as exc:
            parse_las(write_las(sample_points, point_format=6, version=(1, 2)))

        assert exc.value.format_id == 6

    def test_truncated_point_data(self, sample_points):
        """A header promising more records than present should report the file size."""
        data = write_las(sample_points, declared_count=len(sample_points) + 1)

        with pytest.raises(TruncationError) as exc:
            parse_las(data)

        assert exc.value.offset == len(data)

    def test_truncated_header(self):
        """A file cut inside the header should be a truncation error."""
        with pytest.raises(TruncationError):
            parse_las(b"LASF" + bytes(20) + bytes([1, 2]) + bytes(30))

    def test_invalid_return_fields_report_byte_offset(self):
        """A record whose return number exceeds the return count should be located."""
        points = [LidarPoint(0.0, 0.0, 0.0, 0, 1, 1), LidarPoint(1.0, 1.0, 1.0, 0, 3, 2)]

        with pytest.raises(PointValidationError) as exc:
            parse_las(write_las(points, point_format=1))

        assert exc.value.offset == 227 + 28


LAS_FORMATS = [(0, (1, 2)), (1, (1, 2)), (2, (1, 3)), (3, (1, 3)), (6, (1, 4)), (7, (1, 4))]


def random_points(rng, count, max_returns):
    """Returns on the 1 mm quantization grid with consistent return fields."""
    num_returns = rng.integers(1, max_returns + 1, count)
    return_number = (rng.integers(0, max_returns, count) % num_returns) + 1
    xs = rng.integers(-10**6, 10**6, (3, count)) * 0.001 + np.array([[5e5], [4e6], [10.0]])
    return [
        LidarPoint(float(x), float(y), float(z), int(i), int(r), int(n))
        for x, y, z, i, r, n in zip(
            *xs, rng.integers(0, 65536, count), return_number, num_returns
        )
    ]


class TestLasRoundTrip:
    """Random clouds written by the reference writer decode field for field."""

    @pytest.mark.parametrize("seed", range(100))
    def test_random_cloud(self, seed):
        """Every field of every record should survive in all six formats."""
        rng = np.random.default_rng(seed)
        point_format, version = LAS_FORMATS[seed % len(LAS_FORMATS)]
        max_returns = 15 if point_format >= 6 else 7
        points = random_points(rng, int(rng.integers(0, 60)), max_returns)
        offset = (5e5, 4e6, 10.0)

        cloud = parse_las(
            write_las(points, point_format=point_format, version=version, offset=offset)
        )

        assert len(cloud) == len(points)
        np.testing.assert_allclose(cloud.x, [p.x for p in points], rtol=0, atol=1e-6)
        np.testing.assert_allclose(cloud.y, [p.y for p in points], rtol=0, atol=1e-6)
        np.testing.assert_allclose(cloud.z, [p.z for p in points], rtol=0, atol=1e-6)
        assert cloud.intensity.tolist() == [p.intensity for p in points]
        assert cloud.return_number.tolist() == [p.return_number for p in points]
        assert cloud.num_returns.tolist() == [p.num_returns for p in points]


class TestTextReader:
    """Test the plain-text point format."""

    def test_parses_all_fields(self):
        """Six whitespace-separated fields should map onto a point."""
        cloud = parse_xyz_text("1.5 2.5 3.5 100 2 3\n")

        assert cloud[0] == LidarPoint(1.5, 2.5, 3.5, 100, 2, 3)

    def test_defaults_for_missing_trailing_fields(self):
        """Omitted intensity and returns should default to 0 and 1 of 1."""
        cloud = parse_xyz_text("1 2 3\n4,5,6,9\n")

        assert cloud[0] == LidarPoint(1.0, 2.0, 3.0, 0, 1, 1)
        assert cloud[1] == LidarPoint(4.0, 5.0, 6.0, 9, 1, 1)

    def test_skips_comments_and_blank_lines(self):
        """Comment and blank lines should not produce points."""
        cloud = parse_xyz_text("# header\n\n1 2 3\n   \n# trailer\n")

        assert len(cloud) == 1

    def test_too_few_fields_reports_line(self):
        """A line with two fields should fail with its line number."""
        with pytest.raises(PointParseError) as exc:
            parse_xyz_text("1 2 3\n# c\n1 2\n")

        assert exc.value.line == 3

    def test_non_numeric_field(self):
        """A non-numeric coordinate should be a parse error."""
        with pytest.raises(PointParseError):
            parse_xyz_text("1 2 abc\n")

    def test_fractional_return_count(self):
        """Integer fields holding fractions should be a parse error."""
        with pytest.raises(PointParseError):
            parse_xyz_text("1 2 3 1.5\n")

    def test_intensity_out_of_range(self):
        """Intensity above 65535 should break the point invariants."""
        with pytest.raises(PointValidationError) as exc:
            parse_xyz_text("1 2 3 70000\n")

        assert exc.value.line == 1

    def test_return_number_above_count(self):
        """Return 3 of 2 should break the point invariants."""
        with pytest.raises(PointValidationError):
            parse_xyz_text("1 2 3 5 3 2\n")

    def test_format_reads_back_exactly(self, random_cloud):
        """Formatted text should parse back to bit-identical points."""
        cloud = parse_xyz_text(format_xyz_text(random_cloud))

        np.testing.assert_array_equal(cloud.x, random_cloud.x)
        np.testing.assert_array_equal(cloud.y, random_cloud.y)
        np.testing.assert_array_equal(cloud.z, random_cloud.z)
        np.testing.assert_array_equal(cloud.num_returns, random_cloud.num_returns)


class TestLoader:
    """Test format sniffing and file loading."""

    def test_sniffs_las(self, sample_points):
        """Bytes starting with LASF should go to the LAS reader."""
        assert_same_points(read_point_cloud(write_las(sample_points)), sample_points)

    def test_sniffs_text(self):
        """Other bytes should be read as text."""
        cloud = read_point_cloud(b"1 2 3\n")

        assert cloud[0].z == 3.0

    def test_binary_garbage_is_input_error(self):
        """Bytes that are neither LAS nor UTF-8 should fail cleanly."""
        with pytest.raises(InputError):
            read_point_cloud(b"\xff\xfe\x00\x81garbage")

    def test_load_from_disk(self, tmp_path, sample_points):
        """Loading should record the path as the source description."""
        path = tmp_path / "cloud.las"
        path.write_bytes(write_las(sample_points))

        cloud = load_point_cloud(path)

        assert_same_points(cloud, sample_points)
        assert cloud.source_description == str(path)

    def test_missing_file(self, tmp_path):
        """A missing file should be an input error."""
        with pytest.raises(InputError):
            load_point_cloud(tmp_path / "absent.las")


class TestPointCloud:
    """Test the point cloud container."""

    def test_columns_are_read_only(self, random_cloud):
        """Point columns should not be writable."""
        with pytest.raises(ValueError):
            random_cloud.x[0] = 1.0

    def test_rejects_non_finite_coordinates(self):
        """NaN coordinates should break the invariants."""
        with pytest.raises(PointValidationError) as exc:
            PointCloud.from_points([LidarPoint(0, 0, 0), LidarPoint(float("nan"), 0, 0)])

        assert exc.value.index == 1

    def test_bounds_touch_extreme_points(self):
        """Bounds should be the exact min/max of x and y."""
        cloud = PointCloud.from_points(
            [LidarPoint(1, 5, 0), LidarPoint(-2, 3, 0), LidarPoint(4, 4, 0)]
        )

        assert compute_bounds(cloud) == BoundingBox(-2.0, 3.0, 4.0, 5.0)

    def test_bounds_of_empty_cloud(self):
        """An empty cloud has no bounds."""
        with pytest.raises(EmptyInputError):
            compute_bounds(PointCloud.empty())

    def test_take_and_translate(self, random_cloud):
        """Sub-clouds and shifted copies should keep the other columns."""
        part = random_cloud.take(np.array([3, 1]))
        moved = part.translated(10.0, -5.0, 1.0)

        assert part[0] == random_cloud[3]
        assert moved[1].x == pytest.approx(random_cloud[1].x + 10.0)
        assert moved[1].y == pytest.approx(random_cloud[1].y - 5.0)
        assert moved[1].intensity == random_cloud[1].intensity
