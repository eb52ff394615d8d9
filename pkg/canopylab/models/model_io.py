"""
SVM model file format (.svm).

Layout, all little-endian:

    magic "CSVM" | version u16 | feature dimension u16 | support count M u32
    gamma f64 | bias f64 | C f64 (NaN when unknown)
    dual coefficients f64 x M
    support vectors f64 x (M * dimension), row-major
"""

import logging
import math
import struct

import numpy as np

from ..utils import config
from ..utils.errors import ModelFormatError
from .svm import SvmModel

logger = logging.getLogger(__name__)

_HEADER = struct.Struct("<4sHHIddd")


def save_model(model: SvmModel) -> bytes:
    """Serialise a model."""
    header = _HEADER.pack(
        config.MODEL_MAGIC,
        config.MODEL_VERSION,
        model.dimension,
        model.support_count,
        model.gamma,
        model.bias,
        math.nan if model.C is None else model.C,
    )
    return b"".join(
        [
            header,
            model.dual_coefs.astype("<f8").tobytes(),
            model.support_vectors.astype("<f8").tobytes(),
        ]
    )


def load_model(data: bytes) -> SvmModel:
    """
    Parse a model file.

    Raises:
        ModelFormatError: Bad magic, unknown version, or a length that does
            not match the header
    """
    if len(data) < _HEADER.size:
        raise ModelFormatError(
            f"model file is {len(data)} bytes, shorter than its {_HEADER.size}-byte header"
        )
    magic, version, dimension, count, gamma, bias, c_value = _HEADER.unpack_from(data)
    if magic != config.MODEL_MAGIC:
        raise ModelFormatError("missing CSVM signature; not a canopylab model")
    if version != config.MODEL_VERSION:
        raise ModelFormatError(f"unsupported model version {version}")
    expected = _HEADER.size + 8 * count * (1 + dimension)
    if len(data) != expected:
        raise ModelFormatError(
            f"model file is {len(data)} bytes, header describes {expected} "
            f"({count} support vectors of dimension {dimension})"
        )
    coefs = np.frombuffer(data, dtype="<f8", count=count, offset=_HEADER.size)
    vectors = np.frombuffer(
        data, dtype="<f8", count=count * dimension, offset=_HEADER.size + 8 * count
    ).reshape(count, dimension)
    logger.debug(f"Loaded model with {count} support vectors, gamma {gamma}")
    return SvmModel(
        support_vectors=vectors,
        dual_coefs=coefs,
        bias=bias,
        gamma=gamma,
        C=None if math.isnan(c_value) else c_value,
    )
