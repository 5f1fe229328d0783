"""Binary model checkpoints ("CGAN" format).

Layout, all little endian (see docs/file-formats.md for the full story):

    magic "CGAN" | u32 version=1 | u32 k | u32 H | u32 z_dim | u8 flags
    f64 d_leaky_slope | f64 d_input_dropout | u32 feature_layer_index
    f64 g_leaky_slope | f64 g_output_dropout
    discriminator block, then (flags bit 0) generator block,
    then (flags bit 1) Adam state for each stored network.

A network block is ``u32 n_layers`` then per layer ``u32 in, u32 out``
followed by the f64 row-major weight matrix and f64 bias. Adam state is
``u64 t`` then first/second moment arrays in the same layer order.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import CorruptionError, FormatError, ParameterError
from .nets import DiscriminatorParams, GanModel, GeneratorParams, Layers
from .optim import AdamState

MAGIC = b"CGAN"
VERSION = 1

FLAG_GENERATOR = 1
FLAG_OPTIMIZER = 2


def _pack_layers(layers: Layers) -> bytes:
    parts = [struct.pack("<I", len(layers))]
    for w, b in layers:
        parts.append(struct.pack("<II", w.shape[0], w.shape[1]))
    for w, b in layers:
        parts.append(np.ascontiguousarray(w, dtype="<f8").tobytes())
        parts.append(np.ascontiguousarray(b, dtype="<f8").tobytes())
    return b"".join(parts)


def _pack_adam(state: AdamState) -> bytes:
    parts = [struct.pack("<Q", state.t)]
    for moment in (state.m, state.v):
        for w, b in moment:
            parts.append(np.ascontiguousarray(w, dtype="<f8").tobytes())
            parts.append(np.ascontiguousarray(b, dtype="<f8").tobytes())
    return b"".join(parts)


def save_checkpoint(
    model: GanModel,
    path,
    *,
    include_generator: bool = False,
    include_optimizer: bool = False,
) -> None:
    """Serialize the model; by default only the discriminator is kept,
    since that is all inference needs."""
    disc = model.discriminator
    gen = model.generator if include_generator else None
    if include_generator and model.generator is None:
        raise ParameterError("model has no generator to include")
    if include_optimizer:
        if model.opt_discriminator is None or (gen and model.opt_generator is None):
            raise ParameterError("model has no optimizer state to include")

    flags = (FLAG_GENERATOR if gen else 0) | (FLAG_OPTIMIZER if include_optimizer else 0)
    header = struct.pack(
        "<4sIIIIB",
        MAGIC,
        VERSION,
        disc.num_classes,
        disc.input_dim,
        gen.z_dim if gen else 0,
        flags,
    )
    header += struct.pack(
        "<ddI", disc.leaky_slope, disc.input_dropout_rate, disc.feature_layer_index
    )
    header += struct.pack(
        "<dd",
        gen.leaky_slope if gen else 0.0,
        gen.output_dropout_rate if gen else 0.0,
    )
    blob = header + _pack_layers(disc.layers)
    if gen:
        blob += _pack_layers(gen.layers)
    if include_optimizer:
        blob += _pack_adam(model.opt_discriminator)
        if gen:
            blob += _pack_adam(model.opt_generator)
    Path(path).write_bytes(blob)


class _Reader:
    def __init__(self, data: bytes, path):
        self.data = data
        self.pos = 0
        self.path = path

    def take(self, fmt: str):
        s = struct.Struct(fmt)
        if self.pos + s.size > len(self.data):
            raise CorruptionError(f"{self.path}: truncated checkpoint", self.pos)
        out = s.unpack_from(self.data, self.pos)
        self.pos += s.size
        return out

    def array(self, count: int) -> np.ndarray:
        nbytes = 8 * count
        if self.pos + nbytes > len(self.data):
            raise CorruptionError(f"{self.path}: truncated parameter array", self.pos)
        arr = np.frombuffer(self.data, dtype="<f8", count=count, offset=self.pos)
        self.pos += nbytes
        return arr.copy()

    def layers(self) -> Layers:
        (n_layers,) = self.take("<I")
        shapes = [self.take("<II") for _ in range(n_layers)]
        out: Layers = []
        for n_in, n_out in shapes:
            w = self.array(n_in * n_out).reshape(n_in, n_out)
            b = self.array(n_out)
            out.append((w, b))
        return out

    def adam(self, layers: Layers) -> AdamState:
        (t,) = self.take("<Q")
        moments = []
        for _ in range(2):
            moment = []
            for w, b in layers:
                mw = self.array(w.size).reshape(w.shape)
                mb = self.array(b.size)
                moment.append((mw, mb))
            moments.append(moment)
        return AdamState(m=moments[0], v=moments[1], t=t)


def load_checkpoint(path) -> GanModel:
    path = Path(path)
    reader = _Reader(path.read_bytes(), path)
    magic, version, k, h, z_dim, flags = reader.take("<4sIIIIB")
    if magic != MAGIC:
        raise FormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"{path}: unsupported checkpoint version {version}")
    d_slope, d_dropout, feature_idx = reader.take("<ddI")
    g_slope, g_dropout = reader.take("<dd")

    disc = DiscriminatorParams(
        layers=reader.layers(),
        input_dropout_rate=d_dropout,
        feature_layer_index=feature_idx,
        leaky_slope=d_slope,
    )
    if disc.num_classes != k or disc.input_dim != h:
        raise FormatError(
            f"{path}: header says k={k}, H={h} but layers give "
            f"k={disc.num_classes}, H={disc.input_dim}"
        )
    gen = None
    if flags & FLAG_GENERATOR:
        gen = GeneratorParams(
            layers=reader.layers(),
            z_dim=z_dim,
            leaky_slope=g_slope,
            output_dropout_rate=g_dropout,
        )
    opt_d = opt_g = None
    if flags & FLAG_OPTIMIZER:
        opt_d = reader.adam(disc.layers)
        if gen:
            opt_g = reader.adam(gen.layers)
    if reader.pos != len(reader.data):
        raise CorruptionError(f"{path}: trailing bytes after checkpoint", reader.pos)
    return GanModel(
        discriminator=disc,
        generator=gen,
        opt_discriminator=opt_d,
        opt_generator=opt_g,
    )
