"""ReLU multilayer perceptrons, sparsity masks and the hat/Takagi constructions.

A network with ``L`` hidden layers is the map

    w -> M_L(sigma(M_{L-1}(... sigma(M_0 w) ...))),   M_l(x) = A_l x + b_l,

with ``sigma(x) = max(0, x)`` applied after every affine map except the
last. Parameters are laid out layer by layer, each layer as ``A_l`` in
row-major order followed by ``b_l``; sparsity masks use the same layout.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import complexity as cx
from .expfam import DomainError
from .rho import CandidateFunction, Dataset


def relu(x):
    return np.maximum(x, 0.0)


@dataclass(frozen=True)
class MlpArchitecture:
    """Depth ``L`` (hidden layers), width ``p`` and input dimension ``d``."""

    L: int
    p: int
    d: int = 1

    def __post_init__(self):
        if self.L < 1 or self.p < 1 or self.d < 1:
            raise ValueError("need L, p, d >= 1")

    @property
    def param_count(self) -> int:
        return cx.param_count(self.L, self.p, self.d)

    def layer_shapes(self) -> list[tuple[int, int]]:
        """``(out, in)`` of each ``A_l``."""
        shapes = [(self.p, self.d)]
        shapes += [(self.p, self.p)] * (self.L - 1)
        shapes.append((1, self.p))
        return shapes

    def segment_sizes(self) -> list[int]:
        return [o * i + o for o, i in self.layer_shapes()]


def param_count(arch: MlpArchitecture) -> int:
    """``p^2 (L-1) + p (L + d + 1) + 1``."""
    return arch.param_count


@dataclass(frozen=True)
class SparsityMask:
    """Bit vector over the parameters; ``bits[k] = 1`` allows parameter ``k``."""

    arch: MlpArchitecture
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits).astype(bool).ravel()
        if bits.size != self.arch.param_count:
            raise ValueError(f"mask must have {self.arch.param_count} bits, got {bits.size}")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @classmethod
    def dense(cls, arch: MlpArchitecture) -> "SparsityMask":
        return cls(arch, np.ones(arch.param_count, dtype=bool))

    @classmethod
    def from_string(cls, arch: MlpArchitecture, text: str) -> "SparsityMask":
        if text == "dense":
            return cls.dense(arch)
        return cls(arch, np.array([c == "1" for c in text if c in "01"]))

    @property
    def l0(self) -> int:
        return int(self.bits.sum())

    def segment(self, l: int) -> np.ndarray:
        sizes = self.arch.segment_sizes()
        if not 0 <= l < len(sizes):
            raise ValueError(f"layer must be in 0..{self.arch.L}")
        start = sum(sizes[:l])
        return self.bits[start : start + sizes[l]]

    def layers(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return [mask_layout(self.arch, l, self.segment(l)) for l in range(self.arch.L + 1)]


def mask_layout(arch: MlpArchitecture, l: int, bits) -> tuple[np.ndarray, np.ndarray]:
    """Decode the mask segment of layer ``l`` into boolean patterns of ``A_l`` and ``b_l``."""
    if not 0 <= l <= arch.L:
        raise ValueError(f"layer must be in 0..{arch.L}")
    rows, cols = arch.layer_shapes()[l]
    bits = np.asarray(bits).astype(bool).ravel()
    if bits.size != rows * cols + rows:
        raise ValueError(f"layer {l} segment needs {rows * cols + rows} bits, got {bits.size}")
    return bits[: rows * cols].reshape(rows, cols), bits[rows * cols :]


@dataclass
class ReluNetwork:
    """Feed-forward ReLU network given by its affine layers.

    Parameters
    ----------
    layers : list of (A, b)
        ``A`` has shape ``(out, in)``; hidden widths may differ.
    mask : SparsityMask, optional
        When given, parameters outside the mask are forced to exactly zero.
    """

    layers: list
    mask: SparsityMask | None = None
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        layers = []
        for A, b in self.layers:
            A = np.atleast_2d(np.asarray(A, dtype=float)).copy()
            b = np.asarray(b, dtype=float).ravel().copy()
            if b.size != A.shape[0]:
                raise ValueError("bias length must match the rows of A")
            layers.append((A, b))
        for (A1, _), (A2, _) in zip(layers, layers[1:]):
            if A2.shape[1] != A1.shape[0]:
                raise ValueError("consecutive layers have incompatible shapes")
        if len(layers) < 2:
            raise ValueError("a network needs at least one hidden layer")
        if self.mask is not None:
            if self.arch != self.mask.arch:
                raise ValueError("mask architecture does not match the layers")
            for (A, b), (mA, mb) in zip(layers, self.mask.layers()):
                A[~mA] = 0.0
                b[~mb] = 0.0
        for A, b in layers:
            A.setflags(write=False)
            b.setflags(write=False)
        self.layers = layers

    @property
    def depth(self) -> int:
        """Number of hidden layers ``L``."""
        return len(self.layers) - 1

    @property
    def width(self) -> int:
        return max(A.shape[0] for A, _ in self.layers[:-1])

    @property
    def input_dim(self) -> int:
        return self.layers[0][0].shape[1]

    @property
    def output_dim(self) -> int:
        return self.layers[-1][0].shape[0]

    @property
    def arch(self) -> MlpArchitecture | None:
        """Architecture when every hidden layer has the same width, else None."""
        widths = {A.shape[0] for A, _ in self.layers[:-1]}
        if len(widths) != 1 or self.output_dim != 1:
            return None
        return MlpArchitecture(self.depth, widths.pop(), self.input_dim)

    @property
    def params(self) -> np.ndarray:
        return np.concatenate([np.concatenate([A.ravel(), b]) for A, b in self.layers])

    @classmethod
    def from_params(cls, arch: MlpArchitecture, params, mask: SparsityMask | None = None) -> "ReluNetwork":
        params = np.asarray(params, dtype=float).ravel()
        if params.size != arch.param_count:
            raise ValueError(f"expected {arch.param_count} parameters, got {params.size}")
        layers, pos = [], 0
        for rows, cols in arch.layer_shapes():
            A = params[pos : pos + rows * cols].reshape(rows, cols)
            pos += rows * cols
            b = params[pos : pos + rows]
            pos += rows
            layers.append((A, b))
        return cls(layers, mask)

    def with_params(self, params) -> "ReluNetwork":
        """Same architecture and mask with new parameter values."""
        arch = self.arch
        if arch is None:
            raise ValueError("with_params needs a uniform-width network")
        return ReluNetwork.from_params(arch, params, self.mask)

    def hidden(self, w) -> np.ndarray:
        """Activations of the last hidden layer, shape ``(n, width)``."""
        x = self._inputs(w)
        for A, b in self.layers[:-1]:
            x = relu(x @ A.T + b)
        return x

    def _inputs(self, w) -> np.ndarray:
        x = np.asarray(w, dtype=float)
        if x.ndim == 0:
            x = x.reshape(1, 1)
        elif x.ndim == 1:
            x = x[:, None] if self.input_dim == 1 else x[None, :]
        if x.shape[1] != self.input_dim:
            raise ValueError(f"expected inputs of dimension {self.input_dim}, got {x.shape[1]}")
        return x

    def forward(self, w) -> np.ndarray:
        A, b = self.layers[-1]
        out = self.hidden(w) @ A.T + b
        return out[:, 0] if self.output_dim == 1 else out

    __call__ = forward

    def scale_output(self, c: float) -> "ReluNetwork":
        A, b = self.layers[-1]
        return ReluNetwork(self.layers[:-1] + [(c * A, c * b)])


def forward(net: ReluNetwork, w) -> np.ndarray:
    return net.forward(w)


# --- hat and identity -----------------------------------------------------------


def hat(w):
    """``2w`` on ``[0, 1/2]`` and ``2(1-w)`` on ``[1/2, 1]``."""
    w = np.asarray(w, dtype=float)
    if np.any((w < 0) | (w > 1)):
        raise DomainError("the hat function is defined on [0, 1]")
    out = np.where(w <= 0.5, 2.0 * w, 2.0 * (1.0 - w))
    return float(out) if out.ndim == 0 else out


def hat_network() -> ReluNetwork:
    """``h(w) = 2 sigma(w) - 4 sigma(w - 1/2)``, exact on ``[0, 1]``."""
    return ReluNetwork([(np.array([[1.0], [1.0]]), np.array([0.0, -0.5])), (np.array([[2.0, -4.0]]), np.array([0.0]))])


def identity_network() -> ReluNetwork:
    """``g(x) = sigma(x + 0)``, the identity on nonnegative inputs."""
    return ReluNetwork([(np.array([[1.0]]), np.array([0.0])), (np.array([[1.0]]), np.array([0.0]))])


# --- composition ----------------------------------------------------------------------


def _stitch(first: list, second: list) -> list:
    """Layers of ``second o first``: merge the last affine map of ``first`` into the first of ``second``."""
    A_out, b_out = first[-1]
    A_in, b_in = second[0]
    if A_in.shape[1] != A_out.shape[0]:
        raise ValueError("incompatible dimensions for composition")
    merged = (A_in @ A_out, A_in @ b_out + b_in)
    return first[:-1] + [merged] + second[1:]


def compose_networks(outer: ReluNetwork, inner: ReluNetwork, k: int = 1) -> ReluNetwork:
    """Single network computing ``outer o inner^{o k}``.

    Affine maps at each seam are multiplied together, so the depth is
    ``outer.depth + k * inner.depth`` and the width the larger of the two.
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if outer.input_dim != inner.output_dim and k > 0:
        raise ValueError("inner output dimension must equal outer input dimension")
    layers = None
    for _ in range(k):
        layers = list(inner.layers) if layers is None else _stitch(layers, list(inner.layers))
    layers = list(outer.layers) if layers is None else _stitch(layers, list(outer.layers))
    return ReluNetwork(layers)


def iterate_network(net: ReluNetwork, k: int) -> ReluNetwork:
    """``net^{o k}`` for ``k >= 1``."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return compose_networks(net, net, k - 1)


# --- Takagi-type sums --------------------------------------------------------------


def _as_callable(f) -> Callable:
    return f.forward if isinstance(f, ReluNetwork) else f


def _check_unit(z, k):
    if np.any((z < 0) | (z > 1)) or np.any(np.isnan(z)):
        raise ValueError(f"h^{k} left [0, 1]; the inner map must send [0, 1] into itself")


def takagi_partial(m: int, t: float, g, h, w) -> np.ndarray:
    """``sum_{k=1}^m t^k g(h^{o k}(w))`` by repeated forward passes."""
    if m < 1:
        raise ValueError("need m >= 1")
    if not -1 < t < 1:
        raise ValueError("need |t| < 1")
    g, h = _as_callable(g), _as_callable(h)
    z = np.asarray(w, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    _check_unit(z, 0)
    total = np.zeros_like(z)
    for k in range(1, m + 1):
        z = np.asarray(h(z), dtype=float).reshape(z.shape)
        _check_unit(z, k)
        total = total + t**k * np.asarray(g(z), dtype=float).reshape(z.shape)
    return float(total[0]) if scalar else total


def _pad_depth(layers: list, depth: int) -> list:
    """Append identity hidden layers (exact on post-ReLU values) up to ``depth``."""
    layers = list(layers)
    while len(layers) - 1 < depth:
        width = layers[-2][0].shape[0]
        layers.insert(len(layers) - 1, (np.eye(width), np.zeros(width)))
    return layers


def _block_diag(*mats):
    rows = sum(M.shape[0] for M in mats)
    cols = sum(M.shape[1] for M in mats)
    out = np.zeros((rows, cols))
    r = c = 0
    for M in mats:
        out[r : r + M.shape[0], c : c + M.shape[1]] = M
        r += M.shape[0]
        c += M.shape[1]
    return out


def takagi_network(g: ReluNetwork, h: ReluNetwork, coefs: Sequence[float], bias: float = 0.0) -> ReluNetwork:
    """One network computing ``bias + sum_{k=1}^m c_k g(h^{o k}(w))``.

    The network runs ``m + 1`` blocks of ``l = max(depth g, depth h)``
    hidden layers. Block ``k`` pushes the state ``z = h^{o (k-1)}(w)``
    through ``h`` and ``g`` side by side and adds ``c_{k-1} g(z)`` to an
    accumulator carried as a pair of ReLU channels ``(acc v 0, -acc v 0)``.
    Depth is ``l (m + 1)`` and width at most ``width(g) + width(h) + 2``.
    With ``c_k = t^k`` this is the Takagi partial sum.
    """
    coefs = [float(c) for c in coefs]
    m = len(coefs)
    if m < 1:
        raise ValueError("need at least one coefficient")
    if g.input_dim != 1 or h.input_dim != 1 or g.output_dim != 1 or h.output_dim != 1:
        raise ValueError("g and h must be univariate")
    l = max(g.depth, h.depth)
    gl, hl = _pad_depth(g.layers, l), _pad_depth(h.layers, l)
    p1, p2 = gl[0][0].shape[0], hl[0][0].shape[0]
    gA_out, gb_out = gl[-1]
    hA_out, hb_out = hl[-1]

    layers = []
    hA_prev_out = hb_prev_out = None
    prev_c = 0.0
    # block 1 reads w directly; the accumulator starts at zero
    for block in range(m + 1):
        weight_g = 0.0 if block == 0 else coefs[block - 1]
        for i in range(l):
            hA, hb = hl[i]
            gA, gb = gl[i]
            if i == 0 and block == 0:
                A = np.vstack([hA, gA, np.zeros((2, 1))])
                b = np.concatenate([hb, gb, [0.0, 0.0]])
            elif i == 0:
                # previous block hidden state: [h_hidden (p2), g_hidden (p1), acc+, acc-]
                A_prev_h, b_prev_h = hA_prev_out, hb_prev_out
                # z = h output (affine in previous h hidden)
                z_row = np.concatenate([A_prev_h[0], np.zeros(p1), [0.0, 0.0]])
                z_bias = b_prev_h[0]
                # acc = (acc+ - acc-) + c * g output, re-split into (acc v 0, -acc v 0)
                acc_row = np.concatenate([np.zeros(p2), prev_c * gA_out[0], [1.0, -1.0]])
                acc_bias = prev_c * gb_out[0]
                A = np.vstack([np.outer(hA[:, 0], z_row), np.outer(gA[:, 0], z_row), acc_row, -acc_row])
                b = np.concatenate([hA[:, 0] * z_bias + hb, gA[:, 0] * z_bias + gb, [acc_bias, -acc_bias]])
            else:
                A = _block_diag(hA, gA, np.eye(2))
                b = np.concatenate([hb, gb, [0.0, 0.0]])
            layers.append((A, b))
        hA_prev_out, hb_prev_out = hA_out, hb_out
        prev_c = weight_g
    out_row = np.concatenate([np.zeros(p2), coefs[-1] * gA_out[0], [1.0, -1.0]])
    layers.append((out_row[None, :], np.array([coefs[-1] * gb_out[0] + bias])))
    return ReluNetwork(layers, info={"m": m, "block_depth": l})


# --- candidates for the selection pool ---------------------------------------------


def menu_entries(cfg: dict, d: int) -> list:
    """Models of a ``relu`` menu: dense ``(L, p)`` architectures plus Takagi builds.

    Keys: ``L_max``, ``p_max`` and optionally ``takagi: {m_max: int}``, which
    adds the architectures ``S(m + 1, 5)`` of the hat/identity Takagi
    construction for ``m = 1..m_max``.
    """
    from .models.menu import MenuEntry, _label

    out = []
    L_max, p_max = int(cfg.get("L_max", 2)), int(cfg.get("p_max", 4))
    for L in range(1, L_max + 1):
        for p in range(1, p_max + 1):
            pbar = cx.param_count(L, p, d)
            out.append(MenuEntry("relu", ("dense", L, p), cx.vc_neural(L, p, pbar), cx.weight_relu(L, p), _label("relu", L=L, p=p)))
    out.sort(key=lambda e: (e.index[1] + e.index[2], e.index))
    tk = cfg.get("takagi")
    if tk:
        if d != 1:
            raise ValueError("Takagi constructions need d = 1")
        for m in range(1, int(tk.get("m_max", 8)) + 1):
            L, p = m + 1, 5
            pbar = cx.param_count(L, p, 1)
            out.append(MenuEntry("relu", ("takagi", m), cx.vc_neural(L, p, pbar), cx.weight_relu(L, p), _label("relu", takagi=m, L=L, p=p)))
    return out


def _snap(x, step):
    return np.round(np.asarray(x, dtype=float) / step) * step


def random_feature_network(L: int, p: int, d: int, rng: np.random.Generator, pitch: float) -> ReluNetwork:
    """Hidden layers drawn with He scaling and snapped to the grid; zero output layer."""
    arch = MlpArchitecture(L, p, d)
    layers = []
    for rows, cols in arch.layer_shapes()[:-1]:
        A = _snap(rng.normal(scale=math.sqrt(2.0 / cols), size=(rows, cols)), pitch)
        b = _snap(rng.uniform(-1.0, 1.0, size=rows) * (1.0 if not layers else 0.5), pitch)
        layers.append((A, b))
    layers.append((np.zeros((1, p)), np.zeros(1)))
    return ReluNetwork(layers)


def fit_entry(data: Dataset, entry, ctx, cfg: dict) -> list:
    """Candidates of a ``relu`` model: output layer fitted by conditional MLE."""
    from .models.fitting import _constant_from_T, _glm
    from .models.piecewise import ClampedFunction

    T = ctx.parametrization.family.suff_stat(data.y)
    n = data.n
    seed = [ctx.seed, zlib.crc32(entry.label.encode())]
    if entry.index[0] == "takagi":
        m = entry.index[1]
        g, h = identity_network(), hat_network()
        feats = np.empty((n, m))
        z = data.W[:, 0].copy()
        for k in range(m):
            z = h(z)
            feats[:, k] = g(z)
        X = np.hstack([np.ones((n, 1)), feats])
        start = np.zeros(m + 1)
        start[0] = _constant_from_T(T, ctx)
        beta, _ = _glm(X, T, ctx, start)
        beta = _snap(beta, ctx.pitch / (m + 1))
        net = takagi_network(g, h, beta[1:], bias=beta[0])
        fn = ClampedFunction(net, ctx.v_minus, ctx.v_plus)
        return [CandidateFunction(fn, entry.label, (entry.label,), {"coefs": beta.tolist()})]
    _, L, p = entry.index
    rng = np.random.default_rng(seed)
    out = []
    draws = int(cfg.get("features", 1))
    for j in range(draws):
        base = random_feature_network(L, p, data.covariate_dim, rng, ctx.pitch)
        H = base.hidden(data.W)
        X = np.hstack([np.ones((n, 1)), H])
        start = np.zeros(p + 1)
        start[0] = _constant_from_T(T, ctx)
        beta, _ = _glm(X, T, ctx, start)
        beta = _snap(beta, ctx.pitch / (p + 1))
        net = ReluNetwork(base.layers[:-1] + [(beta[None, 1:], beta[:1])])
        fn = ClampedFunction(net, ctx.v_minus, ctx.v_plus)
        label = entry.label if draws == 1 else f"{entry.label}#{j}"
        out.append(CandidateFunction(fn, label, (entry.label,)))
    return out
