#!/usr/bin/env python3
"""
Check that canopylab can run on this machine.

Beyond importing the dependencies, each check pushes a tiny input through
the code path that relies on a dependency: a laspy-written LAS file through
the reader, a small cloud through the cKDTree rasterizer, a container and a
PNG through their codecs.
"""

import importlib
import io
import sys

# import name -> pip name
REQUIRED_PACKAGES = {
    "numpy": "numpy",
    "scipy": "scipy",
    "cv2": "opencv-python",
    "laspy": "laspy",
    "pytest": "pytest",
}


def check_python_version() -> bool:
    """Python 3.11 or newer."""
    version = sys.version_info
    ok = version >= (3, 11)
    mark = "✅" if ok else "❌"
    print(f"{mark} Python {version.major}.{version.minor}.{version.micro} (3.11+ required)")
    return ok


def check_dependencies() -> list[str]:
    """Import every required package; return the pip names of the missing ones."""
    missing = []
    for module, package in REQUIRED_PACKAGES.items():
        try:
            importlib.import_module(module)
            print(f"✅ {package}")
        except ImportError:
            print(f"❌ {package} NOT installed")
            missing.append(package)
    return missing


def check_las_decoding() -> bool:
    """A cloud written by laspy decodes to the same points."""
    import laspy
    import numpy as np

    from canopylab.lidar.las_reader import parse_las

    header = laspy.LasHeader(version="1.2", point_format=1)
    header.scales = np.array([0.01, 0.01, 0.01])
    header.offsets = np.array([0.0, 0.0, 0.0])
    las = laspy.LasData(header)
    las.x = np.array([1.0, 2.5])
    las.y = np.array([3.0, 4.25])
    las.z = np.array([10.0, 12.0])
    las.intensity = np.array([100, 200], dtype=np.uint16)
    las.return_number = np.array([1, 2], dtype=np.uint8)
    las.number_of_returns = np.array([2, 2], dtype=np.uint8)
    buffer = io.BytesIO()
    las.write(buffer)

    cloud = parse_las(buffer.getvalue())
    return cloud.x.tolist() == [1.0, 2.5] and cloud.num_returns.tolist() == [2, 2]


def check_rasterizer() -> bool:
    """Two returns in one neighbourhood give the known elevation statistics."""
    from canopylab.lidar.pointcloud import PointCloud
    from canopylab.lidar.stats_rasterizer import rasterize_stats
    from canopylab.raster.grid import GridSpec

    cloud = PointCloud(
        x=[0.5, 0.5], y=[0.5, 0.5], z=[10.0, 20.0],
        intensity=[0, 0], return_number=[1, 1], num_returns=[1, 1],
    )
    stack = rasterize_stats(cloud, GridSpec(0.0, 1.0, 1.0, 1, 1), 0.75, threads=1)
    mean = stack.band("elevation.mean").values[0, 0]
    std = stack.band("elevation.std").values[0, 0]
    return mean == 15.0 and std == 5.0


def check_codecs() -> bool:
    """A container and a PNG read back as written."""
    import numpy as np

    from canopylab.raster.container import read_container, write_container
    from canopylab.raster.grid import GridSpec
    from canopylab.raster.layers import MultibandRaster
    from canopylab.raster.png import decode_png, export_png

    values = np.arange(3 * 2 * 2, dtype=np.float64).reshape(3, 2, 2)
    raster = MultibandRaster(GridSpec(0.0, 2.0, 1.0, 2, 2), ("red", "green", "blue"), values)
    back = read_container(write_container(raster))
    pixels = decode_png(export_png(raster))
    return np.array_equal(back.values, values) and pixels.shape == (2, 2, 3)


SMOKE_CHECKS = {
    "LAS decoding (laspy)": check_las_decoding,
    "statistics rasterizer (scipy)": check_rasterizer,
    "container and PNG codecs (opencv)": check_codecs,
}


def run_smoke_checks() -> dict[str, bool]:
    """Run every smoke check; an exception counts as a failure."""
    results = {}
    for name, check in SMOKE_CHECKS.items():
        try:
            results[name] = bool(check())
        except Exception as e:  # report and keep going
            print(f"   {name}: {type(e).__name__}: {e}")
            results[name] = False
        print(f"{'✅' if results[name] else '❌'} {name}")
    return results


def main() -> int:
    """Run all verification checks."""
    print("=" * 60)
    print("canopylab setup verification")
    print("=" * 60)

    print("\n📦 Python")
    python_ok = check_python_version()

    print("\n📦 Dependencies")
    missing = check_dependencies()
    if missing:
        print("\nInstall the missing packages with:")
        print("  pip install -r requirements.txt")
        return 1

    print("\n🔬 Smoke checks")
    smoke_ok = all(run_smoke_checks().values())

    print("\n" + "=" * 60)
    if python_ok and smoke_ok:
        print("✅ ALL CHECKS PASSED")
        print("\nTry the synthetic demo:")
        print("  python main.py synth demo")
        print("  python main.py run demo/manifest.ini")
        return 0
    print("❌ SOME CHECKS FAILED")
    return 1


if __name__ == "__main__":
    sys.exit(main())
