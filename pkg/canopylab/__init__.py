"""
canopylab - urban tree canopy mapping with weak supervision.

LiDAR statistics and a thresholding rule produce noisy tree labels; an RBF
support vector machine trained on them maps tree cover in four-band imagery
of other years, and consecutive years are compared for canopy change.
"""

__version__ = "1.0.0"
