"""Generators for the special instance families: the Gaussian rank-gap
family, the Min-Uncut NP-hardness reduction, and the unique-label-cover
reduction, plus the desk-scale helpers used to verify the constructions."""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass

import numpy as np

from .instance import (
    InstanceFormatError,
    InstanceValidationError,
    PointSet,
    ProblemSpec,
    normalize_measures,
)
from .moments import gamma_p


# ---------------------------------------------------------------------------
# combinatorial inputs

@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1."""

    n: int
    edges: tuple

    def __post_init__(self):
        if self.n < 1:
            raise InstanceValidationError("graph needs at least one vertex")
        seen = set()
        norm = []
        for e in self.edges:
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise InstanceValidationError(f"self-loop at vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InstanceValidationError(f"edge ({i},{j}) out of range for n={self.n}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InstanceValidationError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def m(self):
        return len(self.edges)


def load_graph(path) -> Graph:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    for field in ("n", "edges"):
        if field not in doc:
            raise InstanceFormatError(f"{path}: missing required field '{field}'")
    return Graph(n=doc["n"], edges=tuple(tuple(e) for e in doc["edges"]))


def save_graph(g: Graph, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump({"n": g.n, "edges": [list(e) for e in g.edges]}, fh, indent=1)
        fh.write("\n")


@dataclass(frozen=True)
class UlcInstance:
    """Bipartite label-cover instance: edges carry a bijection pi_vw mapping
    labels of the left endpoint v to labels of the right endpoint w."""

    nv: int
    nw: int
    R: int
    edges: tuple  # of (v, w, pi) with pi a tuple permutation of range(R)

    def __post_init__(self):
        if self.R < 1:
            raise InstanceValidationError("alphabet size R must be >= 1")
        norm = []
        touched_v, touched_w = set(), set()
        for v, w, pi in self.edges:
            v, w, pi = int(v), int(w), tuple(int(x) for x in pi)
            if not (0 <= v < self.nv and 0 <= w < self.nw):
                raise InstanceValidationError(f"edge ({v},{w}) out of range")
            if sorted(pi) != list(range(self.R)):
                raise InstanceValidationError(f"pi on edge ({v},{w}) is not a permutation of 0..{self.R - 1}")
            touched_v.add(v)
            touched_w.add(w)
            norm.append((v, w, pi))
        if touched_v != set(range(self.nv)) or touched_w != set(range(self.nw)):
            raise InstanceValidationError("every vertex must touch at least one edge")
        object.__setattr__(self, "edges", tuple(norm))

    @property
    def num_edges(self):
        return len(self.edges)

    def right_degrees(self):
        deg = np.zeros(self.nw, dtype=int)
        for _, w, _ in self.edges:
            deg[w] += 1
        return deg

    def left_neighbors(self):
        nbrs = [[] for _ in range(self.nv)]
        for v, w, pi in self.edges:
            nbrs[v].append((w, pi))
        return nbrs


def load_ulc(path) -> UlcInstance:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    for field in ("V", "W", "R", "edges"):
        if field not in doc:
            raise InstanceFormatError(f"{path}: missing required field '{field}'")
    edges = tuple((e["v"], e["w"], tuple(e["pi"])) for e in doc["edges"])
    return UlcInstance(nv=doc["V"], nw=doc["W"], R=doc["R"], edges=edges)


def save_ulc(u: UlcInstance, path):
    doc = {
        "V": u.nv,
        "W": u.nw,
        "R": u.R,
        "edges": [{"v": v, "w": w, "pi": list(pi)} for v, w, pi in u.edges],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Gaussian rank-gap family

def gaussian_gap_instance(n: int, m: int, p: float, seed: int):
    """m i.i.d. standard-normal points in R^n, each scaled by m^(-1/p); k=n-1."""
    if n < 2 or m < 1:
        raise InstanceValidationError(f"need n >= 2 and m >= 1, got n={n}, m={m}")
    rng = np.random.default_rng(seed)
    rows = rng.standard_normal((m, n)) * m ** (-1.0 / p)
    meta = {"generator": "gap", "n": n, "m": m, "p": p, "seed": seed}
    return PointSet(rows=rows, meta=meta), ProblemSpec(k=n - 1, p=p)


@dataclass(frozen=True)
class GapNetParameters:
    epsilon: float
    delta: float
    m_min: float  # astronomically large for real n; reporting only


def gap_net_parameters(n: int, p: float, eta: float) -> GapNetParameters:
    """Net/Chebyshev parameter schedule behind the discretized gap family.

    The returned m_min is the point count the union-bound argument demands;
    it grows like (9/delta)^n and is far beyond reach for realistic n, so it
    is reported for context while experiments use empirical m.
    """
    if not 0 < eta < 1:
        raise ValueError(f"eta must be in (0,1), got {eta}")
    gp = gamma_p(p)
    g2p = gamma_p(2 * p)
    epsilon = eta ** 2 / 8.0
    delta = eta ** 2 * gp ** p / ((8.0 + eta ** 2) * p * n ** ((p - 1) / 2.0))
    # log-space: (9/delta)^n overflows immediately otherwise
    log_var = 2 * p * math.log(g2p) + math.log1p(-math.exp(2 * p * (math.log(gp) - math.log(g2p))))
    log_m1 = (math.log(4.0) + n * math.log(9.0 / delta) + log_var
              - 2.0 * math.log(epsilon) - 2 * p * math.log(gp))
    m1 = math.exp(log_m1) if log_m1 < 709 else math.inf
    m_min = max(m1, 5.0 / epsilon ** 2, 9.0 / eta ** 2)
    return GapNetParameters(epsilon=epsilon, delta=delta, m_min=m_min)


# ---------------------------------------------------------------------------
# Min-Uncut reduction

def minuncut_reduce(G: Graph, p: float):
    """Min-Uncut -> Subspace(n-1, p) reduction, p > 2.

    One row e_i + e_j per edge and one row N^(1/p) e_i per vertex, where N is
    the smallest integer exceeding 2^(p+4) n^2 m (m+1)^2. The source problem
    constrains ||y|| = sqrt(n) while the instance convention is ||z|| = 1, so
    the Yes-case objective values (t 2^p + N n) are reported divided by
    n^(p/2); they are p-th powers of costs.
    """
    if p <= 2:
        raise ValueError(f"the reduction requires p > 2, got p={p}")
    n, m = G.n, G.m
    if n < 2:
        raise InstanceValidationError("need at least 2 vertices")
    N = math.floor(2.0 ** (p + 4) * n ** 2 * m * (m + 1) ** 2) + 1
    rows = np.zeros((m + n, n))
    for r, (i, j) in enumerate(G.edges):
        rows[r, i] = 1.0
        rows[r, j] = 1.0
    for i in range(n):
        rows[m + i, i] = N ** (1.0 / p)
    scale = n ** (p / 2.0)
    thresholds = {
        "N": N,
        "scale": scale,
        "yes_values_p": [(t * 2.0 ** p + N * n) / scale for t in range(m + 1)],
        "caveat": "the soundness case analysis needs p > 2(1 + 1/(n-1)) for large n; "
                  "only p > 2 is enforced at generation time",
    }
    meta = {"generator": "minuncut", "n": n, "m": m, "p": p, "N": N}
    ps = PointSet(rows=rows, meta=meta)
    return ps, ProblemSpec(k=n - 1, p=p), thresholds


def min_uncut_exhaustive(G: Graph):
    """Exact Min-Uncut by enumerating all 2^(n-1) bipartitions (n <= 20).

    Returns (t, x) with x the +-1 side vector of an optimal bipartition.
    """
    if G.n > 20:
        raise ValueError("exhaustive search limited to n <= 20")
    best_t, best_x = None, None
    for bits in range(2 ** (G.n - 1)):
        x = np.ones(G.n)
        for i in range(G.n - 1):
            if bits >> i & 1:
                x[i + 1] = -1.0
        t = sum(1 for i, j in G.edges if x[i] == x[j])
        if best_t is None or t < best_t:
            best_t, best_x = t, x
    return best_t, best_x


# ---------------------------------------------------------------------------
# unique-label-cover reduction

@dataclass(frozen=True)
class UlcParams:
    eta: float
    tau: float
    beta: float
    delta: float
    B: float
    epsilon: float


def ulc_parameters(eta: float, p: float) -> UlcParams:
    """The parameter schedule of the label-cover reduction at gap eta."""
    if p <= 2:
        raise ValueError(f"the schedule requires p > 2, got p={p}")
    if not 0 < eta < 1:
        raise ValueError(f"eta must be in (0,1), got {eta}")
    bound = 2.0 ** (-p / 2.0) / 50.0
    lhs = eta * math.log(1.0 / eta) ** (p / 2.0)
    if lhs >= bound:
        raise ValueError(
            f"eta too large: need eta*(log(1/eta))^(p/2) < 2^(-p/2)/50, "
            f"got {lhs:.3e} >= {bound:.3e}")
    gp2 = gamma_p(p) ** 2
    tau = eta ** 2 / p
    beta = tau ** 2
    delta = (eta / (p * gp2)) ** (p / (p - 2.0)) * tau ** 2 / 64.0
    B = (40.0 * p * gp2 / (eta * tau ** 2)) ** p
    epsilon = eta / (2.0 ** p * B)
    return UlcParams(eta=eta, tau=tau, beta=beta, delta=delta, B=B, epsilon=epsilon)


def _hypercube(R):
    X = np.array(list(itertools.product((-1.0, 1.0), repeat=R)))
    return X.reshape(2 ** R, R)


def ulc_reduce(U: UlcInstance, p: float, B: float):
    """Label cover -> Subspace(d-1, p) with d = |W| * R.

    Variables are the coordinates b_{w,i}, flattened as z[w*R + i]. For
    every edge (v,w) and hypercube point x, two weighted rows realize the
    linear functionals f_{b_v}(x) (weight 1/(|E| 2^R)) and
    f_{b_v}(x) - f_{pi_wv(b_w)}(x) (weight B/(|E| 2^R)), where b_v averages
    pi_wv(b_w') over the neighbors of v and pi_wv is the inverse of the
    stored pi_vw. The column measure deg(w)/|E| encodes the norm constraint;
    the returned instance is already measure-normalized so ||z~|| >= 1 is
    the standard form.
    """
    if B <= 0:
        raise ValueError("B must be positive")
    if U.R > 12:
        raise ValueError(f"R={U.R} too large: point count scales as |E| * 2^(R+1)")
    R, E = U.R, U.num_edges
    d = U.nw * R
    X = _hypercube(R)
    nbrs = U.left_neighbors()
    deg_v = [len(nb) for nb in nbrs]
    # per-v coefficient blocks of f_{b_v}: built once, reused for every edge at v
    fv_rows = []
    for v in range(U.nv):
        M = np.zeros((2 ** R, d))
        for w2, pi in nbrs[v]:
            inv = np.argsort(np.asarray(pi))
            M[:, w2 * R:(w2 + 1) * R] += X[:, inv] / deg_v[v]
        fv_rows.append(M)
    rows = np.zeros((E * 2 ** (R + 1), d))
    weights = np.zeros(E * 2 ** (R + 1))
    base_w = 1.0 / (E * 2 ** R)
    pos = 0
    for v, w, pi in U.edges:
        inv = np.argsort(np.asarray(pi))
        block = np.zeros((2 ** R, d))
        block[:, w * R:(w + 1) * R] = X[:, inv]
        rows[pos:pos + 2 ** R] = fv_rows[v]
        weights[pos:pos + 2 ** R] = base_w
        pos += 2 ** R
        rows[pos:pos + 2 ** R] = fv_rows[v] - block
        weights[pos:pos + 2 ** R] = B * base_w
        pos += 2 ** R
    nu = np.repeat(U.right_degrees() / E, R)
    meta = {
        "generator": "ulc",
        "V": U.nv,
        "W": U.nw,
        "R": R,
        "B": B,
        "p": p,
        "orientation": "pi_vw stored; b_v averages the inverse images pi_wv(b_w)",
    }
    spec = ProblemSpec(k=d - 1, p=p)
    raw = PointSet(rows=rows, row_weights=weights, col_weights=nu, meta=meta)
    return normalize_measures(raw, spec), spec


def ulc_indicator_vector(U: UlcInstance, labeling):
    """Dictator solution for a labeling of W, in normalized coordinates
    (z~ = sqrt(nu) z); unit norm by construction."""
    nu = np.repeat(U.right_degrees() / U.num_edges, U.R)
    z = np.zeros(U.nw * U.R)
    for w in range(U.nw):
        lab = int(labeling[w])
        if not 0 <= lab < U.R:
            raise ValueError(f"label {lab} out of range for R={U.R}")
        z[w * U.R + lab] = 1.0
    return np.sqrt(nu) * z


def ulc_uniform_vector(U: UlcInstance):
    """The all-(1/sqrt(R)) witness in normalized coordinates; unit norm."""
    nu = np.repeat(U.right_degrees() / U.num_edges, U.R)
    return np.sqrt(nu) / math.sqrt(U.R)
