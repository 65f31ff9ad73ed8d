# src/ssvlab/crud/checkpoints.py
"""
SSC1 checkpoints.

Layout (little-endian): magic "SSC1", tagged architecture descriptor,
u64 parameter count, f64 parameters, u64 Adam step, f64 m, f64 v.

Architecture descriptor: u8 tag (0 = mlp, 1 = fcn). An MLP is
u8 activation (0 tanh, 1 sin, 2 softplus), u32 input_dim, u32 output_dim,
u32 hidden layer count, then u32 widths. An FCN is the branch MLP followed
by the trunk MLP.
"""

import logging
import struct
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from pydantic import ValidationError

from ssvlab.core.errors import ArtifactFormatError, MissingArtifactError, SsvlabError
from ssvlab.models.network import AdamState, NetworkParams
from ssvlab.schemas.network import Activation, AdamHyper, FcnArch, MlpArch

logger = logging.getLogger(__name__)

MAGIC = b"SSC1"
ARCH_TAGS = {"mlp": 0, "fcn": 1}
ACTIVATION_CODES = {Activation.TANH: 0, Activation.SIN: 1, Activation.SOFTPLUS: 2}
ACTIVATIONS = {code: act for act, code in ACTIVATION_CODES.items()}


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def unpack(self, fmt: str):
        try:
            values = struct.unpack_from(fmt, self.data, self.offset)
        except struct.error as e:
            raise ArtifactFormatError(f"SSC1 file is truncated at byte {self.offset}") from e
        self.offset += struct.calcsize(fmt)
        return values

    def floats(self, count: int) -> np.ndarray:
        end = self.offset + 8 * count
        if end > len(self.data):
            raise ArtifactFormatError("SSC1 file is truncated")
        out = np.frombuffer(self.data, dtype="<f8", count=count, offset=self.offset).astype(np.float64)
        self.offset = end
        return out


def _encode_mlp(arch: MlpArch) -> bytes:
    head = struct.pack("<BIII", ACTIVATION_CODES[arch.activation], arch.input_dim, arch.output_dim, len(arch.hidden))
    return head + struct.pack(f"<{len(arch.hidden)}I", *arch.hidden)


def _decode_mlp(reader: _Reader) -> MlpArch:
    code, input_dim, output_dim, depth = reader.unpack("<BIII")
    if code not in ACTIVATIONS:
        raise ArtifactFormatError(f"Unknown activation code {code} in checkpoint")
    hidden = list(reader.unpack(f"<{depth}I"))
    return MlpArch(input_dim=input_dim, hidden=hidden, output_dim=output_dim, activation=ACTIVATIONS[code])


def encode_arch(arch: Union[MlpArch, FcnArch]) -> bytes:
    if isinstance(arch, MlpArch):
        return struct.pack("<B", ARCH_TAGS["mlp"]) + _encode_mlp(arch)
    return struct.pack("<B", ARCH_TAGS["fcn"]) + _encode_mlp(arch.branch) + _encode_mlp(arch.trunk)


def decode_arch(reader: _Reader) -> Union[MlpArch, FcnArch]:
    (tag,) = reader.unpack("<B")
    if tag == ARCH_TAGS["mlp"]:
        return _decode_mlp(reader)
    if tag == ARCH_TAGS["fcn"]:
        branch = _decode_mlp(reader)
        trunk = _decode_mlp(reader)
        return FcnArch(branch=branch, trunk=trunk)
    raise ArtifactFormatError(f"Unknown architecture tag {tag} in checkpoint")


def encode_checkpoint(params: NetworkParams, state: AdamState) -> bytes:
    size = params.theta.size
    if state.m.size != size:
        raise SsvlabError(f"Adam moments ({state.m.size}) do not match parameter count ({size})")
    return b"".join([
        MAGIC,
        encode_arch(params.arch),
        struct.pack("<Q", size),
        params.theta.astype("<f8").tobytes(),
        struct.pack("<Q", state.step),
        state.m.astype("<f8").tobytes(),
        state.v.astype("<f8").tobytes(),
    ])


def decode_checkpoint(data: bytes, hyper: AdamHyper = AdamHyper()) -> Tuple[NetworkParams, AdamState]:
    """
    :param hyper: Optimizer settings to attach; they are not stored in the file
    """
    if data[:4] != MAGIC:
        raise ArtifactFormatError(f"Not an SSC1 file (magic {data[:4]!r})")
    reader = _Reader(data)
    reader.offset = 4
    try:
        arch = decode_arch(reader)
    except ValidationError as e:
        raise ArtifactFormatError(f"SSC1 architecture descriptor is invalid: {e.error_count()} errors") from e
    (size,) = reader.unpack("<Q")
    theta = reader.floats(size)
    (step,) = reader.unpack("<Q")
    m = reader.floats(size)
    v = reader.floats(size)
    if reader.offset != len(data):
        raise ArtifactFormatError(f"SSC1 file has {len(data) - reader.offset} trailing bytes")
    try:
        params = NetworkParams(arch=arch, theta=theta)
    except ValidationError as e:
        raise ArtifactFormatError(f"SSC1 parameters do not fit the stored architecture: {e.error_count()} errors") from e
    return params, AdamState(m=m, v=v, step=step, hyper=hyper)


def write_checkpoint(path: Union[str, Path], params: NetworkParams, state: AdamState) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_checkpoint(params, state))
    logger.info(f"Wrote checkpoint ({params.theta.size} parameters, step {state.step}) to {path}")
    return path


def read_checkpoint(path: Union[str, Path], hyper: AdamHyper = AdamHyper()) -> Tuple[NetworkParams, AdamState]:
    """
    :raises: MissingArtifactError if the file does not exist
    """
    path = Path(path)
    if not path.is_file():
        raise MissingArtifactError(f"Checkpoint not found: {path}")
    return decode_checkpoint(path.read_bytes(), hyper)
