# src/ssvlab/utils/hashing.py

import hashlib

import numpy as np


def digest_arrays(*arrays: np.ndarray) -> str:
    """
    SHA-256 over the little-endian float64 bytes of each array, in order.

    Shapes are folded into the digest so (M, 2) and (2M,) draws never collide.
    """
    h = hashlib.sha256()
    for array in arrays:
        a = np.ascontiguousarray(np.asarray(array, dtype="<f8"))
        h.update(str(a.shape).encode("ascii"))
        h.update(a.tobytes())
    return h.hexdigest()


def digest_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
