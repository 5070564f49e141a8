"""Minimal 1-D network engine with hand-derived gradients.

Arrays are (batch, channels, length) float64 throughout. Every forward op
has an exact analytic backward (the attention gate uses a straight-through
indicator, everything else is the true derivative), verified against
central differences in the test suite. Convolutions reduce to BLAS matmuls
via windowed views, which keeps desk-scale training on CPU practical.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ShapeMismatchError

# ---------------------------------------------------------------------------
# parameters


class Param:
    """A named array with its gradient and optimizer moments."""

    __slots__ = ("value", "grad", "m", "v")

    def __init__(self, value: np.ndarray):
        value = np.asarray(value)
        if not np.issubdtype(value.dtype, np.floating):
            value = value.astype(np.float64)
        self.value = value
        self.grad = np.zeros_like(self.value)
        self.m = np.zeros_like(self.value)
        self.v = np.zeros_like(self.value)


class ParamStore:
    """Ordered map of named parameters plus the optimizer step counter."""

    def __init__(self):
        self._params: dict[str, Param] = {}
        self.t = 0

    def add(self, name: str, value: np.ndarray) -> Param:
        if name in self._params:
            raise ValueError(f"duplicate parameter name {name!r}")
        p = Param(value)
        self._params[name] = p
        return p

    def __getitem__(self, name: str) -> Param:
        return self._params[name]

    def __contains__(self, name: str) -> bool:
        return name in self._params

    def __len__(self) -> int:
        return len(self._params)

    def names(self) -> list[str]:
        return list(self._params)

    def items(self):
        return self._params.items()

    def zero_grads(self) -> None:
        for p in self._params.values():
            p.grad[...] = 0.0

    def flat_values(self) -> np.ndarray:
        return np.concatenate([p.value.ravel() for p in self._params.values()])


def nadam_step(
    store: ParamStore,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    t: int | None = None,
) -> None:
    """One Adam step with a Nesterov look-ahead on the first moment.

    Mutates parameters in place and zeroes their gradients. ``t`` defaults to
    the store's own counter (starting at 1).
    """
    if t is None:
        store.t += 1
        t = store.t
    if t < 1:
        raise ValueError("step counter must be >= 1")
    for p in store._params.values():
        g = p.grad
        p.m[...] = beta1 * p.m + (1 - beta1) * g
        p.v[...] = beta2 * p.v + (1 - beta2) * g * g
        m_hat = beta1 * p.m / (1 - beta1 ** (t + 1)) + (1 - beta1) * g / (1 - beta1**t)
        v_hat = p.v / (1 - beta2**t)
        p.value -= lr * m_hat / (np.sqrt(v_hat) + eps)
        p.grad[...] = 0.0


def uniform_init(
    rng: np.random.Generator,
    shape: tuple[int, ...],
    fan_in: int,
    omega: float = 1.0,
    dtype=np.float64,
) -> np.ndarray:
    """Uniform +/- sqrt(6/fan_in), shrunk by omega for sine-fed layers."""
    bound = math.sqrt(6.0 / fan_in) / omega
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


# ---------------------------------------------------------------------------
# convolution


def _check_conv_args(x: np.ndarray, w: np.ndarray) -> None:
    if x.ndim != 3 or w.ndim != 3:
        raise ShapeMismatchError(f"expected 3-D arrays, got x{x.shape} w{w.shape}")
    if x.shape[1] != w.shape[1]:
        raise ShapeMismatchError(f"channel mismatch: x has {x.shape[1]}, w expects {w.shape[1]}")
    if w.shape[2] % 2 == 0:
        raise ShapeMismatchError("kernel length must be odd for same padding")


def _im2col(x: np.ndarray, k: int, stride: int) -> tuple[np.ndarray, int]:
    """Stack sliding windows into a (B*L_out, C_in*k) matrix for BLAS."""
    pad = (k - 1) // 2
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad)))
    win = np.lib.stride_tricks.sliding_window_view(xp, k, axis=2)[:, :, ::stride, :]
    batch, c_in, l_out, _ = win.shape
    cols = np.ascontiguousarray(win.transpose(0, 2, 1, 3)).reshape(batch * l_out, c_in * k)
    return cols, l_out


def conv1d_forward_cols(
    x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int = 1
) -> tuple[np.ndarray, np.ndarray]:
    """Forward pass that also returns the column matrix for reuse in backward."""
    _check_conv_args(x, w)
    cols, l_out = _im2col(x, w.shape[2], stride)
    c_out = w.shape[0]
    y = (cols @ w.reshape(c_out, -1).T).reshape(x.shape[0], l_out, c_out)
    return y.transpose(0, 2, 1) + b[None, :, None], cols


def conv1d_forward(
    x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int = 1
) -> np.ndarray:
    """Same-padded cross-correlation; output length is ceil(L/stride)."""
    return conv1d_forward_cols(x, w, b, stride)[0]


def conv1d_backward(
    x: np.ndarray,
    w: np.ndarray,
    grad_out: np.ndarray,
    stride: int = 1,
    cols: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients of :func:`conv1d_forward` w.r.t. input, weights, and bias.

    ``cols`` may pass the forward's column matrix back in to skip its
    recomputation.
    """
    _check_conv_args(x, w)
    batch, c_in, length = x.shape
    c_out, _, k = w.shape
    pad = (k - 1) // 2
    l_out = -(-length // stride)
    if grad_out.shape != (batch, c_out, l_out):
        raise ShapeMismatchError(
            f"grad_out {grad_out.shape} vs expected {(batch, c_out, l_out)}"
        )
    if cols is None:
        cols, _ = _im2col(x, k, stride)
    g2 = np.ascontiguousarray(grad_out.transpose(0, 2, 1)).reshape(batch * l_out, c_out)
    grad_b = grad_out.sum(axis=(0, 2))
    grad_w = (g2.T @ cols).reshape(w.shape)
    # grad_x is the (stride-dilated) grad_out correlated with the flipped,
    # channel-swapped kernel, so it reuses the fast forward path
    if stride == 1:
        gd = grad_out
    else:
        gd = np.zeros((batch, c_out, stride * l_out), dtype=x.dtype)
        gd[:, :, ::stride] = grad_out
        gd = gd[:, :, :length]
    w_flip = np.ascontiguousarray(w[:, :, ::-1].transpose(1, 0, 2))
    grad_x = conv1d_forward(gd, w_flip, np.zeros(c_in, dtype=x.dtype), stride=1)
    return grad_x, grad_w, grad_b


# ---------------------------------------------------------------------------
# activations


def sine_act(x: np.ndarray, omega: float = 1.0) -> np.ndarray:
    return np.sin(omega * x)


def sine_backward(x: np.ndarray, omega: float, grad_out: np.ndarray) -> np.ndarray:
    return omega * np.cos(omega * x) * grad_out


def leaky_relu(x: np.ndarray, slope: float = 0.2) -> np.ndarray:
    return np.where(x >= 0, x, slope * x)


def leaky_relu_backward(x: np.ndarray, slope: float, grad_out: np.ndarray) -> np.ndarray:
    return np.where(x >= 0, 1.0, slope) * grad_out


# ---------------------------------------------------------------------------
# attention mask


def attention_forward(
    x: np.ndarray,
    wq: np.ndarray,
    bq: np.ndarray,
    wk: np.ndarray,
    bk: np.ndarray,
    wv: np.ndarray,
    bv: np.ndarray,
    threshold: float = 0.8,
) -> tuple[np.ndarray, np.ndarray, dict]:
    """Self-attention energy turned into a per-position gate.

    Scaled dot-product scores (no softmax) produce an attention output whose
    channel mean is min-max normalized per window; positions scoring at or
    above ``threshold`` keep their weight, the rest drop to zero, and the
    gate multiplies the input. A flat score profile disables the gate.
    """
    if x.shape[2] < 2:
        raise ShapeMismatchError("attention needs at least 2 positions")
    d = wq.shape[0]
    scale = 1.0 / math.sqrt(d)
    q = conv1d_forward(x, wq, bq)
    k = conv1d_forward(x, wk, bk)
    v = conv1d_forward(x, wv, bv)
    scores = np.matmul(q.transpose(0, 2, 1), k) * scale  # (B, L, L)
    attn = np.matmul(v, scores.transpose(0, 2, 1))  # (B, D, L)
    e = attn.mean(axis=1)  # (B, L)
    e_min = e.min(axis=1, keepdims=True)
    e_max = e.max(axis=1, keepdims=True)
    span = e_max - e_min
    flat = span[:, 0] < 1e-12
    safe_span = np.where(span < 1e-12, 1.0, span)
    w_norm = (e - e_min) / safe_span
    gate = w_norm >= threshold
    mask = np.where(gate, w_norm, 0.0)
    mask[flat] = 1.0
    masked = x * mask[:, None, :]
    cache = {
        "x": x, "q": q, "k": k, "v": v, "scores": scores, "scale": scale,
        "e": e, "w": w_norm, "span": safe_span, "gate": gate, "flat": flat,
        "argmin": e.argmin(axis=1), "argmax": e.argmax(axis=1), "mask": mask,
    }
    return masked, mask, cache


def attention_mask(
    x: np.ndarray,
    wq: np.ndarray,
    bq: np.ndarray,
    wk: np.ndarray,
    bk: np.ndarray,
    wv: np.ndarray,
    bv: np.ndarray,
    threshold: float = 0.8,
) -> tuple[np.ndarray, np.ndarray]:
    masked, mask, _ = attention_forward(x, wq, bq, wk, bk, wv, bv, threshold)
    return masked, mask


def attention_backward(
    grad_masked: np.ndarray, cache: dict, wq, wk, wv
) -> tuple[np.ndarray, tuple[np.ndarray, ...]]:
    """Backward of the attention gate.

    The threshold indicator is treated as a constant (straight-through);
    the retained weight, the min-max normalization (with argmin/argmax held
    fixed), the score products, and the projections are differentiated
    exactly.
    """
    x, mask = cache["x"], cache["mask"]
    grad_x = grad_masked * mask[:, None, :]
    grad_mask = (grad_masked * x).sum(axis=1)  # (B, L)
    grad_w = np.where(cache["gate"], grad_mask, 0.0)
    grad_w[cache["flat"]] = 0.0

    span = cache["span"][:, 0]
    batch = np.arange(grad_w.shape[0])
    grad_e = grad_w / span[:, None]
    sum_g = grad_w.sum(axis=1) / span
    sum_gw = (grad_w * cache["w"]).sum(axis=1) / span
    np.add.at(grad_e, (batch, cache["argmin"]), -sum_g + sum_gw)
    np.add.at(grad_e, (batch, cache["argmax"]), -sum_gw)

    d = cache["q"].shape[1]
    grad_attn = np.repeat(grad_e[:, None, :] / d, d, axis=1)  # (B, D, L)
    grad_scores = np.matmul(grad_attn.transpose(0, 2, 1), cache["v"])  # (B, L, L)
    grad_v = np.matmul(grad_attn, cache["scores"])
    scale = cache["scale"]
    grad_q = np.matmul(cache["k"], grad_scores.transpose(0, 2, 1)) * scale
    grad_k = np.matmul(cache["q"], grad_scores) * scale

    gx_q, gwq, gbq = conv1d_backward(x, wq, grad_q)
    gx_k, gwk, gbk = conv1d_backward(x, wk, grad_k)
    gx_v, gwv, gbv = conv1d_backward(x, wv, grad_v)
    grad_x = grad_x + gx_q + gx_k + gx_v
    return grad_x, (gwq, gbq, gwk, gbk, gwv, gbv)


# ---------------------------------------------------------------------------
# resampling layer


def upsample2(x: np.ndarray) -> np.ndarray:
    """Double the length by linear interpolation, replicating the right edge."""
    b, c, length = x.shape
    out = np.empty((b, c, 2 * length), dtype=x.dtype)
    out[:, :, 0::2] = x
    out[:, :, 1:-1:2] = 0.5 * (x[:, :, :-1] + x[:, :, 1:])
    out[:, :, -1] = x[:, :, -1]
    return out


def upsample2_backward(grad_out: np.ndarray) -> np.ndarray:
    g_even = grad_out[:, :, 0::2]
    g_odd = grad_out[:, :, 1::2]
    grad_x = g_even.copy()
    grad_x[:, :, :-1] += 0.5 * g_odd[:, :, :-1]
    grad_x[:, :, 1:] += 0.5 * g_odd[:, :, :-1]
    grad_x[:, :, -1] += g_odd[:, :, -1]
    return grad_x


# ---------------------------------------------------------------------------
# classification head


def dense_softmax(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Flatten, affine map to 2 classes, softmax rows."""
    flat = x.reshape(x.shape[0], -1)
    if flat.shape[1] != w.shape[0]:
        raise ShapeMismatchError(f"flattened {flat.shape[1]} features vs W {w.shape}")
    logits = flat @ w + b
    logits = logits - logits.max(axis=1, keepdims=True)
    expd = np.exp(logits)
    return expd / expd.sum(axis=1, keepdims=True)


def dense_softmax_backward(
    x: np.ndarray, w: np.ndarray, probs: np.ndarray, grad_probs: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    flat = x.reshape(x.shape[0], -1)
    inner = (grad_probs * probs).sum(axis=1, keepdims=True)
    grad_logits = probs * (grad_probs - inner)
    grad_x = (grad_logits @ w.T).reshape(x.shape)
    grad_w = flat.T @ grad_logits
    grad_b = grad_logits.sum(axis=0)
    return grad_x, grad_w, grad_b


# ---------------------------------------------------------------------------
# losses (each returns value and gradient w.r.t. the prediction)


def _residual(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    if pred.shape != target.shape:
        raise ShapeMismatchError(f"pred {pred.shape} vs target {target.shape}")
    return pred - target


def logcosh_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    r = _residual(pred, target)
    # log(cosh r) = log((e^r + e^-r)/2), computed without overflow
    value = float(np.mean(np.logaddexp(r, -r) - math.log(2.0)))
    grad = np.tanh(r) / r.size
    return value, grad


def l1_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    r = _residual(pred, target)
    return float(np.mean(np.abs(r))), np.sign(r) / r.size


def l2_loss(pred: np.ndarray, target: np.ndarray) -> tuple[float, np.ndarray]:
    r = _residual(pred, target)
    return float(np.mean(r**2)), 2.0 * r / r.size


LOSSES = {"logcosh": logcosh_loss, "l1": l1_loss, "l2": l2_loss}

PROB_CLAMP = 1e-7


def clamp_probs(p: np.ndarray) -> np.ndarray:
    return np.clip(p, PROB_CLAMP, 1.0 - PROB_CLAMP)


def adversarial_losses(
    d_real_prob: np.ndarray, d_fake_prob: np.ndarray, saturating: bool = False
) -> tuple[float, float]:
    """Discriminator loss and the generator's adversarial term.

    Inputs are the discriminator's real-class probabilities on the real and
    fake batches. The generator term defaults to the non-saturating form
    -log D(fake); the literal +log(1 - D(fake)) is available for fidelity
    runs.
    """
    p_real = clamp_probs(np.asarray(d_real_prob, dtype=np.float64))
    p_fake = clamp_probs(np.asarray(d_fake_prob, dtype=np.float64))
    loss_d = float(-np.mean(np.log(p_real)) - np.mean(np.log(1.0 - p_fake)))
    if saturating:
        loss_g = float(np.mean(np.log(1.0 - p_fake)))
    else:
        loss_g = float(-np.mean(np.log(p_fake)))
    return loss_d, loss_g
