"""Attention CycleGAN for abdominal-to-fetal signal translation.

Two generators (abdominal -> fetal and back) and two discriminators train
on unpaired z-scored windows with the adversarial + cycle-consistency
objective. All gradients come from the hand-derived backward passes in
:mod:`fetalsep.nn`; no autodiff anywhere.
"""

from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import nn
from .errors import (
    BadConfigError,
    CorruptFileError,
    EmptyDatasetError,
    IoError,
    ShapeMismatchError,
    TooShortError,
    VersionMismatchError,
)
from .preprocessing import PreprocessConfig, WindowSet, preprocess, slide, stitch
from .signals import Signal

REAL_COL = 1  # discriminator softmax column holding P(real)
CHECKPOINT_MAGIC = b"FSCK"
CHECKPOINT_VERSION = 1


# ---------------------------------------------------------------------------
# layer and network specs


@dataclass(frozen=True)
class LayerSpec:
    """One layer of a network stack."""

    kind: str  # conv1d | sine | leaky_relu | attention_mask | upsample2 | dense_softmax
    out_ch: int = 0
    kernel: int = 0
    stride: int = 1
    omega: float = 1.0
    slope: float = 0.2
    threshold: float = 0.8
    attn_ch: int = 16
    classes: int = 2


@dataclass(frozen=True)
class GeneratorSpec:
    """Attention gate plus a conv stack that maps a window to a window.

    ``depth`` 4 keeps all three hidden convolutions before the strided
    output layer; depth 3 drops the first hidden convolution.
    """

    attention: bool = True
    attn_ch: int = 16
    attn_threshold: float = 0.8
    channels: tuple[int, ...] = (32, 32, 64)
    kernels: tuple[int, ...] = (15, 15, 15)
    final_kernel: int = 31
    activation: str = "sine"  # sine | leaky_relu
    omega_first: float = 30.0
    depth: int = 4

    def __post_init__(self):
        if self.depth not in (3, 4):
            raise BadConfigError("generator depth must be 3 or 4")
        if len(self.channels) != len(self.kernels):
            raise BadConfigError("channels and kernels must pair up")
        if self.activation not in ("sine", "leaky_relu"):
            raise BadConfigError(f"unknown activation {self.activation!r}")
        if any(k % 2 == 0 for k in (*self.kernels, self.final_kernel)):
            raise BadConfigError("kernels must be odd")

    def layer_specs(self) -> list[LayerSpec]:
        specs: list[LayerSpec] = []
        if self.attention:
            specs.append(
                LayerSpec("attention_mask", attn_ch=self.attn_ch, threshold=self.attn_threshold)
            )
        hidden = list(zip(self.channels, self.kernels))
        if self.depth == 3:
            hidden = hidden[1:]
        for i, (ch, k) in enumerate(hidden):
            specs.append(LayerSpec("conv1d", out_ch=ch, kernel=k, stride=1))
            if self.activation == "sine":
                omega = self.omega_first if i == 0 else 1.0
                specs.append(LayerSpec("sine", omega=omega))
            else:
                specs.append(LayerSpec("leaky_relu"))
        # strided smoothing output stays linear: z-scored targets exceed [-1, 1]
        specs.append(LayerSpec("conv1d", out_ch=1, kernel=self.final_kernel, stride=2))
        specs.append(LayerSpec("upsample2"))
        return specs


@dataclass(frozen=True)
class DiscriminatorSpec:
    """Strided conv stack ending in a two-class softmax over each window."""

    channels: tuple[int, ...] = (16, 32, 32, 32)
    kernel: int = 15
    stride: int = 2
    activation: str = "sine"

    def __post_init__(self):
        if self.kernel % 2 == 0:
            raise BadConfigError("kernel must be odd")
        if self.activation not in ("sine", "leaky_relu"):
            raise BadConfigError(f"unknown activation {self.activation!r}")

    def layer_specs(self) -> list[LayerSpec]:
        specs: list[LayerSpec] = []
        for ch in self.channels:
            specs.append(LayerSpec("conv1d", out_ch=ch, kernel=self.kernel, stride=self.stride))
            if self.activation == "sine":
                specs.append(LayerSpec("sine", omega=1.0))
            else:
                specs.append(LayerSpec("leaky_relu"))
        specs.append(LayerSpec("dense_softmax", classes=2))
        return specs


@dataclass(frozen=True)
class TrainConfig:
    """Knobs of the adversarial training loop."""

    epochs: int = 50
    batch_size: int = 32
    lr: float = 2e-4
    seed: int = 0
    cycle_loss_kind: str = "logcosh"  # logcosh | l1 | l2
    lam: float = 4.0
    adversarial_form: str = "nonsaturating"  # nonsaturating | literal

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise BadConfigError("epochs and batch_size must be >= 1")
        if self.cycle_loss_kind not in nn.LOSSES:
            raise BadConfigError(f"unknown cycle loss {self.cycle_loss_kind!r}")
        if self.adversarial_form not in ("nonsaturating", "literal"):
            raise BadConfigError(f"unknown adversarial form {self.adversarial_form!r}")


# ---------------------------------------------------------------------------
# network assembly


class _Conv:
    def __init__(self, store, name, in_ch, spec, rng, omega_next, dtype):
        fan_in = in_ch * spec.kernel
        self.w = store.add(
            f"{name}.w",
            nn.uniform_init(rng, (spec.out_ch, in_ch, spec.kernel), fan_in, omega_next, dtype),
        )
        self.b = store.add(f"{name}.b", np.zeros(spec.out_ch, dtype=dtype))
        self.stride = spec.stride

    def forward(self, x):
        y, cols = nn.conv1d_forward_cols(x, self.w.value, self.b.value, self.stride)
        return y, (x, cols)

    def backward(self, grad, cache, accumulate=True):
        x, cols = cache
        gx, gw, gb = nn.conv1d_backward(x, self.w.value, grad, self.stride, cols=cols)
        if accumulate:
            self.w.grad += gw
            self.b.grad += gb
        return gx


class _Sine:
    def __init__(self, omega):
        self.omega = omega

    def forward(self, x):
        return nn.sine_act(x, self.omega), x

    def backward(self, grad, cache, accumulate=True):
        return nn.sine_backward(cache, self.omega, grad)


class _LeakyRelu:
    def __init__(self, slope):
        self.slope = slope

    def forward(self, x):
        return nn.leaky_relu(x, self.slope), x

    def backward(self, grad, cache, accumulate=True):
        return nn.leaky_relu_backward(cache, self.slope, grad)


class _Attention:
    def __init__(self, store, name, in_ch, spec, rng, dtype):
        d = spec.attn_ch
        self.threshold = spec.threshold
        self.params = []
        for tag in ("q", "k", "v"):
            w = store.add(f"{name}.w{tag}", nn.uniform_init(rng, (d, in_ch, 1), in_ch, dtype=dtype))
            b = store.add(f"{name}.b{tag}", np.zeros(d, dtype=dtype))
            self.params.extend([w, b])

    def forward(self, x):
        wq, bq, wk, bk, wv, bv = (p.value for p in self.params)
        masked, _, cache = nn.attention_forward(x, wq, bq, wk, bk, wv, bv, self.threshold)
        return masked, cache

    def backward(self, grad, cache, accumulate=True):
        wq, wk, wv = self.params[0].value, self.params[2].value, self.params[4].value
        gx, gparams = nn.attention_backward(grad, cache, wq, wk, wv)
        if accumulate:
            for p, g in zip(self.params, gparams):
                p.grad += g
        return gx


class _Upsample2:
    def forward(self, x):
        return nn.upsample2(x), None

    def backward(self, grad, cache, accumulate=True):
        return nn.upsample2_backward(grad)


class _DenseSoftmax:
    def __init__(self, store, name, in_features, classes, rng, dtype):
        self.w = store.add(
            f"{name}.w", nn.uniform_init(rng, (in_features, classes), in_features, dtype=dtype)
        )
        self.b = store.add(f"{name}.b", np.zeros(classes, dtype=dtype))

    def forward(self, x):
        probs = nn.dense_softmax(x, self.w.value, self.b.value)
        return probs, (x, probs)

    def backward(self, grad, cache, accumulate=True):
        x, probs = cache
        gx, gw, gb = nn.dense_softmax_backward(x, self.w.value, probs, grad)
        if accumulate:
            self.w.grad += gw
            self.b.grad += gb
        return gx


class Network:
    """A stack of layers over one ParamStore, with explicit caches."""

    def __init__(self, specs: list[LayerSpec], in_ch: int, in_len: int, rng, dtype=np.float64):
        self.store = nn.ParamStore()
        self.dtype = np.dtype(dtype)
        self.layers = []
        ch, ln = in_ch, in_len
        for i, spec in enumerate(specs):
            name = f"layer{i}"
            if spec.kind == "conv1d":
                omega_next = (
                    specs[i + 1].omega
                    if i + 1 < len(specs) and specs[i + 1].kind == "sine"
                    else 1.0
                )
                self.layers.append(_Conv(self.store, name, ch, spec, rng, omega_next, self.dtype))
                ch = spec.out_ch
                ln = -(-ln // spec.stride)  # ceil
            elif spec.kind == "sine":
                self.layers.append(_Sine(spec.omega))
            elif spec.kind == "leaky_relu":
                self.layers.append(_LeakyRelu(spec.slope))
            elif spec.kind == "attention_mask":
                self.layers.append(_Attention(self.store, name, ch, spec, rng, self.dtype))
            elif spec.kind == "upsample2":
                self.layers.append(_Upsample2())
                ln *= 2
            elif spec.kind == "dense_softmax":
                self.layers.append(_DenseSoftmax(self.store, name, ch * ln, spec.classes, rng, self.dtype))
                ch, ln = spec.classes, 0
            else:
                raise BadConfigError(f"unknown layer kind {spec.kind!r}")
        self.out_ch, self.out_len = ch, ln

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, list]:
        caches = []
        for layer in self.layers:
            x, cache = layer.forward(x)
            caches.append(cache)
        return x, caches

    def backward(self, grad: np.ndarray, caches: list, accumulate: bool = True) -> np.ndarray:
        for layer, cache in zip(reversed(self.layers), reversed(caches)):
            grad = layer.backward(grad, cache, accumulate)
        return grad


# ---------------------------------------------------------------------------
# the model


class CycleGanModel:
    """Generator/discriminator quartet plus training state."""

    def __init__(
        self,
        gspec: GeneratorSpec,
        dspec: DiscriminatorSpec,
        lam: float,
        seed: int,
        window_len: int = 200,
        dtype=np.float64,
    ):
        if lam < 0:
            raise BadConfigError("lambda must be non-negative")
        if window_len % 2:
            raise BadConfigError("window length must be even (stride-2 + upsample)")
        self.gspec = gspec
        self.dspec = dspec
        self.lam = float(lam)
        self.seed = int(seed)
        self.window_len = int(window_len)
        self.dtype = np.dtype(dtype)
        children = np.random.SeedSequence(seed).spawn(5)
        rngs = [np.random.default_rng(c) for c in children]
        self.g = Network(gspec.layer_specs(), 1, window_len, rngs[0], self.dtype)
        self.f = Network(gspec.layer_specs(), 1, window_len, rngs[1], self.dtype)
        self.d_x = Network(dspec.layer_specs(), 1, window_len, rngs[2], self.dtype)
        self.d_y = Network(dspec.layer_specs(), 1, window_len, rngs[3], self.dtype)
        self.rng = rngs[4]
        self.epoch = 0
        self.train_config: TrainConfig | None = None
        for net in (self.g, self.f):
            if net.out_ch != 1 or net.out_len != window_len:
                raise BadConfigError(
                    f"generator must map length {window_len} to itself, got "
                    f"({net.out_ch}, {net.out_len})"
                )

    def networks(self) -> dict[str, Network]:
        return {"g": self.g, "f": self.f, "d_x": self.d_x, "d_y": self.d_y}


def build_model(
    gspec: GeneratorSpec = GeneratorSpec(),
    dspec: DiscriminatorSpec = DiscriminatorSpec(),
    lam: float = 4.0,
    seed: int = 0,
    window_len: int = 200,
    dtype=np.float64,
) -> CycleGanModel:
    """Fresh model with seed-deterministic initialization.

    ``dtype`` selects the working precision; float32 roughly halves CPU
    training time while checkpoints stay in the 64-bit container format.
    """
    return CycleGanModel(gspec, dspec, lam, seed, window_len, dtype)


# ---------------------------------------------------------------------------
# objectives


def _as_batch(windows: np.ndarray, dtype=np.float64) -> np.ndarray:
    w = np.asarray(windows, dtype=dtype)
    if w.ndim == 2:
        w = w[:, None, :]
    if w.ndim != 3 or w.shape[1] != 1:
        raise ShapeMismatchError(f"expected (B, M) or (B, 1, M), got {w.shape}")
    return w


def cycle_loss(
    g: Network, f: Network, x_batch: np.ndarray, y_batch: np.ndarray, kind: str = "logcosh"
) -> float:
    """Round-trip reconstruction penalty in both directions."""
    x = _as_batch(x_batch)
    y = _as_batch(y_batch)
    loss_fn = nn.LOSSES[kind]
    fwd = loss_fn(f.forward(g.forward(x)[0])[0], x)[0]
    bwd = loss_fn(g.forward(f.forward(y)[0])[0], y)[0]
    return fwd + bwd


def _gen_adv(probs: np.ndarray, saturating: bool) -> tuple[float, np.ndarray]:
    """Generator adversarial term and its gradient w.r.t. the fake probs."""
    n = probs.shape[0]
    p_real = nn.clamp_probs(probs[:, REAL_COL])
    p_fake = nn.clamp_probs(probs[:, 1 - REAL_COL])
    grad = np.zeros_like(probs)
    if saturating:
        value = float(np.mean(np.log1p(-probs[:, REAL_COL].clip(None, 1 - nn.PROB_CLAMP))))
        grad[:, 1 - REAL_COL] = 1.0 / (n * p_fake)
    else:
        value = float(-np.mean(np.log(p_real)))
        grad[:, REAL_COL] = -1.0 / (n * p_real)
    return value, grad


def _disc_loss(probs: np.ndarray, n_real: int) -> tuple[float, np.ndarray]:
    """Discriminator loss on stacked [real; fake] probs, with gradient."""
    p_real = nn.clamp_probs(probs[:n_real, REAL_COL])
    p_fake_other = nn.clamp_probs(probs[n_real:, 1 - REAL_COL])  # = 1 - P(real)
    n_fake = probs.shape[0] - n_real
    value = float(-np.mean(np.log(p_real)) - np.mean(np.log(p_fake_other)))
    grad = np.zeros_like(probs)
    grad[:n_real, REAL_COL] = -1.0 / (n_real * p_real)
    grad[n_real:, 1 - REAL_COL] = -1.0 / (n_fake * p_fake_other)
    return value, grad


def total_objective(
    model: CycleGanModel, x_batch: np.ndarray, y_batch: np.ndarray, cfg: TrainConfig | None = None
) -> tuple[float, float, float, dict[str, float]]:
    """Evaluate every objective component at the current parameters."""
    cfg = cfg or model.train_config or TrainConfig()
    x = _as_batch(x_batch, model.dtype)
    y = _as_batch(y_batch, model.dtype)
    saturating = cfg.adversarial_form == "literal"
    fake_y = model.g.forward(x)[0]
    fake_x = model.f.forward(y)[0]
    adv_g, _ = _gen_adv(model.d_y.forward(fake_y)[0], saturating)
    adv_f, _ = _gen_adv(model.d_x.forward(fake_x)[0], saturating)
    cyc = cycle_loss(model.g, model.f, x, y, cfg.cycle_loss_kind)
    loss_dy, _ = _disc_loss(
        np.concatenate([model.d_y.forward(y)[0], model.d_y.forward(fake_y)[0]]), y.shape[0]
    )
    loss_dx, _ = _disc_loss(
        np.concatenate([model.d_x.forward(x)[0], model.d_x.forward(fake_x)[0]]), x.shape[0]
    )
    components = {"adv_g": adv_g, "adv_f": adv_f, "cycle": cyc, "lam": model.lam}
    loss_g_total = adv_g + adv_f + model.lam * cyc
    return loss_g_total, loss_dx, loss_dy, components


# ---------------------------------------------------------------------------
# training


def _train_batch(
    model: CycleGanModel, x: np.ndarray, y: np.ndarray, cfg: TrainConfig
) -> dict[str, float]:
    """One discriminator step followed by one generator step."""
    lam = model.lam
    saturating = cfg.adversarial_form == "literal"
    loss_fn = nn.LOSSES[cfg.cycle_loss_kind]

    fake_y, cache_g1 = model.g.forward(x)
    fake_x, cache_f2 = model.f.forward(y)

    # discriminators first, on the current fakes
    probs, cache = model.d_y.forward(np.concatenate([y, fake_y]))
    loss_dy, grad = _disc_loss(probs, y.shape[0])
    model.d_y.backward(grad, cache)
    nn.nadam_step(model.d_y.store, cfg.lr)

    probs, cache = model.d_x.forward(np.concatenate([x, fake_x]))
    loss_dx, grad = _disc_loss(probs, x.shape[0])
    model.d_x.backward(grad, cache)
    nn.nadam_step(model.d_x.store, cfg.lr)

    # generators: adversarial terms against the updated discriminators
    cyc_x_hat, cache_f1 = model.f.forward(fake_y)
    cyc_y_hat, cache_g2 = model.g.forward(fake_x)
    probs_dy, cache_dy = model.d_y.forward(fake_y)
    probs_dx, cache_dx = model.d_x.forward(fake_x)

    adv_g, grad_probs_dy = _gen_adv(probs_dy, saturating)
    adv_f, grad_probs_dx = _gen_adv(probs_dx, saturating)
    cyc_fwd, grad_cyc_fwd = loss_fn(cyc_x_hat, x)
    cyc_bwd, grad_cyc_bwd = loss_fn(cyc_y_hat, y)

    grad_fake_y = model.d_y.backward(grad_probs_dy, cache_dy, accumulate=False)
    grad_fake_y = grad_fake_y + model.f.backward(lam * grad_cyc_fwd, cache_f1)
    model.g.backward(grad_fake_y, cache_g1)

    grad_fake_x = model.d_x.backward(grad_probs_dx, cache_dx, accumulate=False)
    grad_fake_x = grad_fake_x + model.g.backward(lam * grad_cyc_bwd, cache_g2)
    model.f.backward(grad_fake_x, cache_f2)

    nn.nadam_step(model.g.store, cfg.lr)
    nn.nadam_step(model.f.store, cfg.lr)

    cycle = cyc_fwd + cyc_bwd
    return {
        "loss_g": adv_g + adv_f + lam * cycle,
        "adv_g": adv_g,
        "adv_f": adv_f,
        "cycle": cycle,
        "loss_dx": loss_dx,
        "loss_dy": loss_dy,
    }


def train(
    model: CycleGanModel, x_set: WindowSet | np.ndarray, y_set: WindowSet | np.ndarray, cfg: TrainConfig
) -> tuple[CycleGanModel, list[dict[str, float]]]:
    """Adversarial training on unpaired window sets.

    Each epoch shuffles the two domains independently (seeded by
    ``cfg.seed`` on a fresh model; a resumed model continues its own RNG
    stream) and alternates one discriminator step with one generator step
    per batch. Runs until ``cfg.epochs`` counting epochs already trained;
    lambda comes from the model. Returns the model and per-epoch mean losses.
    """
    x_windows = x_set.windows if isinstance(x_set, WindowSet) else np.asarray(x_set)
    y_windows = y_set.windows if isinstance(y_set, WindowSet) else np.asarray(y_set)
    if x_windows.shape[0] == 0 or y_windows.shape[0] == 0:
        raise EmptyDatasetError("both domains need at least one window")
    x_all = _as_batch(x_windows, model.dtype)
    y_all = _as_batch(y_windows, model.dtype)

    if model.epoch == 0:
        model.rng = np.random.default_rng(cfg.seed)
    model.train_config = cfg

    n = min(x_all.shape[0], y_all.shape[0])
    n_batches = max(1, n // cfg.batch_size)
    batch = min(cfg.batch_size, n)

    table: list[dict[str, float]] = []
    while model.epoch < cfg.epochs:
        perm_x = model.rng.permutation(x_all.shape[0])
        perm_y = model.rng.permutation(y_all.shape[0])
        sums: dict[str, float] = {}
        for b in range(n_batches):
            xb = x_all[perm_x[b * batch : (b + 1) * batch]]
            yb = y_all[perm_y[b * batch : (b + 1) * batch]]
            row = _train_batch(model, xb, yb, cfg)
            for key, value in row.items():
                sums[key] = sums.get(key, 0.0) + value
        model.epoch += 1
        means = {key: value / n_batches for key, value in sums.items()}
        table.append({"epoch": model.epoch, **means})
    return model, table


# ---------------------------------------------------------------------------
# extraction


def extract_fecg(
    model: CycleGanModel, abdominal: Signal, pp: PreprocessConfig = PreprocessConfig()
) -> Signal:
    """Run the abdominal->fetal generator over a whole recording.

    Conditions the signal, cuts non-overlapping windows (evaluation stride),
    maps each through the generator, and stitches the outputs back into one
    trace at the working rate.
    """
    conditioned = preprocess(abdominal, pp)
    if len(conditioned) < pp.window_len:
        raise TooShortError("conditioned signal shorter than one window")
    ws = slide(conditioned, pp.window_len, stride=pp.window_len)
    outputs = np.empty_like(ws.windows)
    chunk = 128
    for i in range(0, ws.n_windows, chunk):
        batch = ws.windows[i : i + chunk][:, None, :].astype(model.dtype)
        outputs[i : i + chunk] = model.g.forward(batch)[0][:, 0, :]
    out = stitch(ws, outputs)
    return Signal(out.samples, pp.target_fs, f"extracted-fetal({abdominal.label})")


# ---------------------------------------------------------------------------
# checkpoints


def _rng_state(model: CycleGanModel) -> dict:
    return model.rng.bit_generator.state


def save_checkpoint(model: CycleGanModel, path: str | Path) -> None:
    """Binary checkpoint: magic, version, JSON header, float64 LE blobs.

    Blobs appear in header order; each named parameter contributes its
    value, first moment, and second moment in that order, so a reload
    resumes training bit-for-bit.
    """
    blobs = bytearray()
    stores = {}
    for net_name, net in model.networks().items():
        entries = []
        for pname, p in net.store.items():
            entries.append({"name": pname, "shape": list(p.value.shape)})
            for arr in (p.value, p.m, p.v):
                blobs.extend(arr.astype("<f8").tobytes())
        stores[net_name] = {"t": net.store.t, "entries": entries}
    header = {
        "gspec": asdict(model.gspec),
        "dspec": asdict(model.dspec),
        "lam": model.lam,
        "seed": model.seed,
        "window_len": model.window_len,
        "dtype": model.dtype.name,
        "epoch": model.epoch,
        "train_config": asdict(model.train_config) if model.train_config else None,
        "rng_state": _rng_state(model),
        "stores": stores,
        "checksum": hashlib.sha256(bytes(blobs)).hexdigest(),
    }
    header_bytes = json.dumps(header).encode("utf-8")
    try:
        with Path(path).open("wb") as fh:
            fh.write(CHECKPOINT_MAGIC)
            fh.write(struct.pack("<I", CHECKPOINT_VERSION))
            fh.write(struct.pack("<Q", len(header_bytes)))
            fh.write(header_bytes)
            fh.write(bytes(blobs))
    except OSError as exc:
        raise IoError(f"cannot write checkpoint {path}: {exc}") from exc


def load_checkpoint(path: str | Path) -> CycleGanModel:
    """Rebuild a model from :func:`save_checkpoint` output, bit-exactly."""
    try:
        raw = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read checkpoint {path}: {exc}") from exc
    if len(raw) < 16 or raw[:4] != CHECKPOINT_MAGIC:
        raise CorruptFileError("bad magic bytes")
    (version,) = struct.unpack_from("<I", raw, 4)
    if version != CHECKPOINT_VERSION:
        raise VersionMismatchError(f"format version {version}, expected {CHECKPOINT_VERSION}")
    (header_len,) = struct.unpack_from("<Q", raw, 8)
    header_end = 16 + header_len
    if len(raw) < header_end:
        raise CorruptFileError("truncated header")
    try:
        header = json.loads(raw[16:header_end].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptFileError(f"unreadable header: {exc}") from exc
    blobs = raw[header_end:]
    if hashlib.sha256(blobs).hexdigest() != header["checksum"]:
        raise CorruptFileError("checksum mismatch")

    model = CycleGanModel(
        GeneratorSpec(
            **{
                **header["gspec"],
                "channels": tuple(header["gspec"]["channels"]),
                "kernels": tuple(header["gspec"]["kernels"]),
            }
        ),
        DiscriminatorSpec(
            **{**header["dspec"], "channels": tuple(header["dspec"]["channels"])}
        ),
        header["lam"],
        header["seed"],
        header["window_len"],
        np.dtype(header.get("dtype", "float64")),
    )
    offset = 0
    for net_name, net in model.networks().items():
        meta = header["stores"][net_name]
        net.store.t = meta["t"]
        names = net.store.names()
        if names != [e["name"] for e in meta["entries"]]:
            raise CorruptFileError(f"parameter names of {net_name} do not match the specs")
        for entry in meta["entries"]:
            p = net.store[entry["name"]]
            count = int(np.prod(entry["shape"])) if entry["shape"] else 1
            for arr in (p.value, p.m, p.v):
                end = offset + 8 * count
                if end > len(blobs):
                    raise CorruptFileError("truncated parameter blobs")
                arr[...] = np.frombuffer(blobs[offset:end], dtype="<f8").reshape(entry["shape"])
                offset = end
    if offset != len(blobs):
        raise CorruptFileError("trailing bytes after parameter blobs")
    model.epoch = header["epoch"]
    if header["train_config"]:
        model.train_config = TrainConfig(**header["train_config"])
    bg = np.random.PCG64()
    bg.state = header["rng_state"]
    model.rng = np.random.Generator(bg)
    return model
