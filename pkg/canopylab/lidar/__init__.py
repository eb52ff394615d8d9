"""LiDAR point clouds: types, readers and the statistics rasterizer."""

from .las_reader import parse_las
from .loader import load_point_cloud, read_point_cloud
from .pointcloud import LidarPoint, PointCloud, compute_bounds
from .stats_rasterizer import (
    PSEUDO_RGB_BANDS,
    STATS_BAND_NAMES,
    StatsStack,
    load_stats_stack,
    rasterize_stats,
    stack_grid_for,
    stack_to_pseudo_rgb,
)
from .text_reader import format_xyz_text, parse_xyz_text

__all__ = [
    "LidarPoint",
    "PSEUDO_RGB_BANDS",
    "PointCloud",
    "STATS_BAND_NAMES",
    "StatsStack",
    "compute_bounds",
    "format_xyz_text",
    "load_point_cloud",
    "load_stats_stack",
    "parse_las",
    "parse_xyz_text",
    "rasterize_stats",
    "read_point_cloud",
    "stack_grid_for",
    "stack_to_pseudo_rgb",
]
