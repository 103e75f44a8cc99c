"""Limit kernels (graphons), their spectra and W-random graph sampling.

Both shipped families are translation invariant, W(x,y) = G(x-y) with G
even and 1-periodic, so the eigenvalues of the kernel operator are the
Fourier coefficients c_k of G and the eigenfunctions are e^(2 pi i k x).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .exceptions import NoPositiveEigenvalueError

ER = "er"
SW = "sw"


@dataclass(frozen=True)
class Graphon:
    """Erdos-Renyi (constant p) or small-world ring kernel.

    SW: W(x,y) = 1-p where the circle distance d(x,y) < r, p elsewhere.
    """

    kind: str
    p: float
    r: float = None

    def __post_init__(self):
        if self.kind == ER:
            if not 0.0 < self.p < 1.0:
                raise ValueError("ER requires p in (0,1)")
            if self.r is not None:
                raise ValueError("ER takes no range parameter")
        elif self.kind == SW:
            if not 0.0 <= self.p < 0.5:
                raise ValueError("SW requires p in [0,1/2)")
            if self.r is None or not 0.0 < self.r < 0.5:
                raise ValueError("SW requires r in (0,1/2)")
        else:
            raise ValueError(f"unknown graphon kind: {self.kind!r}")

    def eval(self, x, y):
        """Kernel value W(x,y) for x,y in [0,1]; vectorized."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.kind == ER:
            out = np.broadcast_to(self.p, np.broadcast_shapes(x.shape, y.shape))
            out = np.array(out, dtype=float)
        else:
            u = np.abs(x - y)
            d = np.minimum(u, 1.0 - u)
            out = np.where(d < self.r, 1.0 - self.p, self.p)
        return out if out.ndim else float(out)

    def fourier_coeff(self, k: int) -> float:
        """c_k = int_0^1 G(u) e^(-2 pi i k u) du, in closed form."""
        if self.kind == ER:
            return self.p if k == 0 else 0.0
        p, r = self.p, self.r
        if k == 0:
            return 2 * r + p - 4 * r * p
        return (1 - 2 * p) * math.sin(2 * math.pi * k * r) / (math.pi * k)


@dataclass(frozen=True)
class SpectrumW:
    """Spectral data of the kernel operator on the translation-invariant
    families: the extreme Fourier coefficients and their wavenumbers."""

    mu_max: float
    v_max_mode: int
    mu_min: float
    v_min_mode: int
    fourier_coeffs: dict
    mu_max_simple: bool
    mu_min_simple: bool


def spectrum(graphon: Graphon, k_range: int = 512) -> SpectrumW:
    """Scan c_k over |k| <= k_range for the extreme eigenvalues.

    A coefficient is flagged simple iff no other mode (counting the +-k
    pairing of nonzero wavenumbers) lies within 1e-12 of it.
    """
    if k_range < 64:
        raise ValueError("k_range must be at least 64")
    ks = np.arange(0, k_range + 1)
    cs = np.array([graphon.fourier_coeff(int(k)) for k in ks])
    # multiplicity over k in [-k_range, k_range]: k != 0 counts twice
    mult = np.where(ks == 0, 1, 2)

    i_max = int(np.argmax(cs))
    mu_max = float(cs[i_max])
    if mu_max <= 0:
        raise NoPositiveEigenvalueError(
            "kernel has no positive eigenvalue; the theory does not apply")
    near_max = int(np.sum(mult[np.abs(cs - mu_max) < 1e-12]))
    i_min = int(np.argmin(cs))
    mu_min = float(cs[i_min])
    near_min = int(np.sum(mult[np.abs(cs - mu_min) < 1e-12]))

    coeffs = {int(k): float(c) for k, c in zip(ks, cs)}
    return SpectrumW(
        mu_max=mu_max,
        v_max_mode=int(ks[i_max]),
        mu_min=mu_min,
        v_min_mode=int(ks[i_min]),
        fourier_coeffs=coeffs,
        mu_max_simple=near_max == 1,
        mu_min_simple=near_min == 1,
    )


@dataclass
class GraphSample:
    """A sampled n-vertex graph: symmetric 0/1 sparse adjacency, no
    self-loops, with the latent midpoint grid used to draw it."""

    n: int
    adjacency: sp.csr_matrix
    grid: np.ndarray
    seed: int = None
    _dense: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.nnz // 2)

    @property
    def edge_density(self) -> float:
        possible = self.n * (self.n - 1) / 2
        return self.edge_count / possible if possible else 0.0

    def dense(self, dtype=np.float64) -> np.ndarray:
        """Dense adjacency for BLAS-backed force evaluation; cached."""
        if self._dense is None or self._dense.dtype != dtype:
            self._dense = np.asarray(self.adjacency.todense(), dtype=dtype)
        return self._dense

    def write_edge_list(self, path) -> None:
        """Text export: header "n <count>" then one "i j" pair per line,
        0-based with i < j."""
        coo = sp.triu(self.adjacency, k=1).tocoo()
        order = np.lexsort((coo.col, coo.row))
        with open(path, "w", newline="\n") as fh:
            fh.write(f"n {self.n}\n")
            for i, j in zip(coo.row[order], coo.col[order]):
                fh.write(f"{i} {j}\n")


def sample_graph(graphon: Graphon, n: int, seed) -> GraphSample:
    """W-random graph on the midpoint grid x_i = (2i-1)/(2n).

    Each edge {i,j}, i<j, is present independently with probability
    W(x_i, x_j); reproducible bit-for-bit per seed.
    """
    if n < 2:
        raise ValueError("need at least two vertices")
    rng = np.random.default_rng(seed)
    grid = (2 * np.arange(n) + 1) / (2 * n)
    probs = graphon.eval(grid[:, None], grid[None, :])
    u = rng.random((n, n))
    upper = np.triu(u < probs, k=1)
    adj = upper | upper.T
    mat = sp.csr_matrix(adj.astype(np.float64))
    return GraphSample(n=n, adjacency=mat, grid=grid, seed=seed)


def er(p: float) -> Graphon:
    return Graphon(ER, p)


def small_world(p: float, r: float) -> Graphon:
    return Graphon(SW, p, r)


def from_spec(spec: dict) -> Graphon:
    """Build a graphon from the config-file form
    {"kind": "er", "p": ...} or {"kind": "sw", "p": ..., "r": ...}."""
    kind = spec["kind"]
    if kind == ER:
        return er(spec["p"])
    if kind == SW:
        return small_world(spec["p"], spec["r"])
    raise ValueError(f"unknown graphon kind: {kind!r}")
