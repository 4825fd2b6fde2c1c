"""
IDX file reader (the MNIST distribution format).

Images: magic 0x00000803, then count, rows, cols as big-endian uint32, then
count*rows*cols unsigned bytes. Labels: magic 0x00000801, then count, then
count unsigned bytes. Files ending in ``.gz`` are decompressed first.
"""

import gzip
import logging
import struct
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from ..data.dataset import Dataset
from ..errors import FormatError

logger = logging.getLogger(__name__)

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801

PathLike = Union[str, Path]


def _read_bytes(path: PathLike) -> bytes:
    path = Path(path)
    try:
        if path.suffix == ".gz":
            with gzip.open(path, "rb") as handle:
                return handle.read()
        return path.read_bytes()
    except (OSError, EOFError) as e:
        raise FormatError(f"{path}: cannot read IDX file ({e})", 0) from e


def _header(payload: bytes, words: int, path: PathLike) -> Tuple[int, ...]:
    size = 4 * words
    if len(payload) < size:
        raise FormatError(f"{path}: truncated header, {len(payload)} of {size} bytes", len(payload))
    return struct.unpack(f">{words}I", payload[:size])


def read_idx_images(path: PathLike) -> np.ndarray:
    """Images as float64 (count, rows*cols) scaled to [0, 1]."""
    payload = _read_bytes(path)
    magic = _header(payload, 1, path)[0]
    if magic != IMAGES_MAGIC:
        raise FormatError(f"{path}: bad image magic 0x{magic:08x}, expected 0x{IMAGES_MAGIC:08x}", 0)
    _, count, rows, cols = _header(payload, 4, path)
    expected = count * rows * cols
    body = payload[16:]
    if len(body) < expected:
        raise FormatError(f"{path}: truncated pixel data, {len(body)} of {expected} bytes", len(payload))
    pixels = np.frombuffer(body, dtype=np.uint8, count=expected)
    return pixels.reshape(count, rows * cols).astype(np.float64) / 255.0


def read_idx_labels(path: PathLike) -> np.ndarray:
    payload = _read_bytes(path)
    magic = _header(payload, 1, path)[0]
    if magic != LABELS_MAGIC:
        raise FormatError(f"{path}: bad label magic 0x{magic:08x}, expected 0x{LABELS_MAGIC:08x}", 0)
    _, count = _header(payload, 2, path)
    body = payload[8:]
    if len(body) < count:
        raise FormatError(f"{path}: truncated label data, {len(body)} of {count} bytes", len(payload))
    return np.frombuffer(body, dtype=np.uint8, count=count).astype(np.int64)


def load_idx(images_path: PathLike, labels_path: PathLike) -> Dataset:
    """
    Parse an image/label IDX pair into a dataset.

    Raises:
        FormatError: On bad magic, truncation or a count mismatch
    """
    images = read_idx_images(images_path)
    labels = read_idx_labels(labels_path)
    if images.shape[0] != labels.shape[0]:
        # Offset of the label count field.
        raise FormatError(
            f"{images.shape[0]} images in {images_path} but {labels.shape[0]} labels in {labels_path}", 4
        )
    logger.info("[IDX] loaded %d images of %d pixels", images.shape[0], images.shape[1])
    return Dataset(images, labels)
