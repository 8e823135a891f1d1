"""Lower and upper bounds on the total detection probability.

Every lower bound here has the same shape: pick two orthonormal bright
states ``d`` and ``(1 - D) K d / |(1 - D) K d|`` for some operator ``K``
(a power of the shifted Hamiltonian, or the propagator) and sum the squared
overlaps of the initial state with them. The upper bound does the same with
two dark states.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from .errors import DegenerateError, PathCountOverflowError, PreconditionError, ValidationError
from .graphs import Graph, as_matrix, as_vector
from .spectral import eigendecompose, unitary_from_spectrum

VARIANCE_TOL = 1e-14
RHS_ZERO_TOL = 1e-12
OVERLAP_TOL = 1e-12
SATURATION_REL_TOL = 1e-2
S_MAX_CAP = 200

Method = Literal["propagator-tau", "commutator-s", "path-count-s", "dark-commutator"]


@dataclass(frozen=True)
class BoundReport:
    kind: Literal["lower", "upper"]
    value: float
    raw: float
    method: Method
    s: int | None = None
    tau: float | None = None
    shift_c: float = 0.0
    rhs_zero: bool = False
    shift_retried: bool = False
    inexact: bool = False
    exact: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "raw", float(self.raw))
        object.__setattr__(self, "rhs_zero", bool(self.rhs_zero))
        if self.kind == "lower" and self.value < 0:
            raise ValidationError("lower bound must be nonnegative")
        if self.kind == "upper" and self.value > 1:
            raise ValidationError("upper bound must not exceed one")

    def to_dict(self) -> dict:
        out = {k: getattr(self, k) for k in
               ("kind", "value", "raw", "method", "s", "tau", "shift_c", "rhs_zero",
                "shift_retried", "inexact")}
        out["exact"] = None if self.exact is None else str(self.exact)
        return out


def _power_apply(m: np.ndarray, v: np.ndarray, s: int) -> np.ndarray:
    for _ in range(s):
        v = m @ v
    return v


def _shifted(m: np.ndarray, c: float) -> np.ndarray:
    return m + c * np.eye(m.shape[0]) if c else m


def variance_in_state(h, s: int, v, shift_c: float = 0.0) -> float:
    """``<v|K^2|v> - <v|K|v>^2`` with ``K = (H + c)^s``.

    Evaluated as ``|(1 - |v><v|) K v|^2``, which is algebraically identical for
    Hermitian ``K`` and free of cancellation.
    """
    if s < 0:
        raise ValidationError("s must be nonnegative")
    m = _shifted(as_matrix(h), shift_c)
    vv = as_vector(v, m.shape[0])
    kv = _power_apply(m, vv, s)
    resid = kv - vv * (vv.conj() @ kv)
    return float(np.real(resid.conj() @ resid))


def lower_bound_commutator(h, d, psi_in, s: int = 1, shift_c: float = 0.0) -> BoundReport:
    """``P_det >= |<psi|d>|^2 + |<d|[K, D]|psi>|^2 / Var(K)_d`` with ``K = (H + c)^s``.

    Raises :class:`DegenerateError` when ``d`` is (numerically) an eigenstate
    of ``K``. ``rhs_zero`` marks a vanishing commutator element, in which case
    the bound reduces to the initial overlap.
    """
    if s < 1:
        raise ValidationError(f"s must be >= 1, got {s}")
    m = _shifted(as_matrix(h), shift_c)
    dv = as_vector(d, m.shape[0])
    psi = as_vector(psi_in, m.shape[0])
    kd = _power_apply(m, dv, s)
    kd_perp = kd - dv * (dv.conj() @ kd)
    var = float(np.real(kd_perp.conj() @ kd_perp))
    scale = max(1.0, float(np.real(kd.conj() @ kd)))
    if var <= VARIANCE_TOL * scale:
        raise DegenerateError(f"Var((H+{shift_c})^{s})_d = {var:.3g}: detector state is stationary")
    # <d|[K, D]|psi> = <d|K|d><d|psi> - <d|K|psi> = -<(1-D) K d | psi>
    comm = -(kd_perp.conj() @ psi)
    overlap = abs(dv.conj() @ psi) ** 2
    rhs_zero = abs(comm) <= RHS_ZERO_TOL * math.sqrt(scale)
    raw = overlap + (0.0 if rhs_zero else abs(comm) ** 2 / var)
    return BoundReport("lower", min(1.0, raw), raw, "commutator-s", s=s, shift_c=shift_c,
                       rhs_zero=rhs_zero)


def lower_bound_propagator(h, tau: float, d, psi_in) -> BoundReport:
    """``P_det >= |<d|U|psi>|^2 / (1 - |<d|U|d>|^2)`` for ``psi`` orthogonal to ``d``."""
    m = as_matrix(h)
    dv = as_vector(d, m.shape[0])
    psi = as_vector(psi_in, m.shape[0])
    if abs(dv.conj() @ psi) > OVERLAP_TOL:
        raise PreconditionError("propagator bound needs <d|psi_in> = 0")
    u = unitary_from_spectrum(eigendecompose(m), tau)
    ud = dv.conj() @ u
    denom = 1.0 - abs(ud @ dv) ** 2
    if denom <= 1e-12:
        raise DegenerateError(f"|<d|U|d>| = 1 at tau={tau}: detector state is stationary")
    num = abs(ud @ psi) ** 2
    raw = num / denom
    return BoundReport("lower", min(1.0, raw), raw, "propagator-tau", tau=float(tau),
                       rhs_zero=num <= RHS_ZERO_TOL ** 2)


def propagator_tau_sweep(h, taus: Sequence[float], d, psi_in) -> list[BoundReport | None]:
    """Propagator bound on a caller-supplied tau grid; ``None`` where degenerate."""
    out: list[BoundReport | None] = []
    for tau in taus:
        try:
            out.append(lower_bound_propagator(h, tau, d, psi_in))
        except DegenerateError:
            out.append(None)
    return out


def upper_bound_dark(h, delta, psi_in) -> BoundReport:
    """``P_det <= 1 - |<delta|psi>|^2 - |<delta|[H, Delta]|psi>|^2 / Var(H)_delta``.

    ``delta`` must be dark (the caller vouches for it) and not stationary.
    """
    m = as_matrix(h)
    dl = as_vector(delta, m.shape[0])
    psi = as_vector(psi_in, m.shape[0])
    hd = m @ dl
    hd_perp = hd - dl * (dl.conj() @ hd)
    var = float(np.real(hd_perp.conj() @ hd_perp))
    scale = max(1.0, float(np.real(hd.conj() @ hd)))
    if var <= VARIANCE_TOL * scale:
        raise DegenerateError("Var(H)_delta vanishes: the dark state is stationary")
    comm = -(hd_perp.conj() @ psi)
    rhs_zero = abs(comm) <= RHS_ZERO_TOL * math.sqrt(scale)
    raw = 1.0 - abs(dl.conj() @ psi) ** 2 - (0.0 if rhs_zero else abs(comm) ** 2 / var)
    return BoundReport("upper", min(1.0, max(0.0, raw)), raw, "dark-commutator", s=1,
                       rhs_zero=rhs_zero)


# -- path counting ----------------------------------------------------------

_INT64_MAX = np.iinfo(np.int64).max


def _walk_counts(a: np.ndarray, start: int, s: int) -> np.ndarray:
    """Row ``A^s e_start`` in int64, raising on potential overflow."""
    a = np.asarray(a)
    if not np.issubdtype(a.dtype, np.integer):
        if not np.array_equal(a, np.round(a)):
            raise ValidationError("path counting needs an integer adjacency matrix")
        a = np.round(a.real if np.iscomplexobj(a) else a).astype(np.int64)
    a = a.astype(np.int64)
    row_abs = int(np.abs(a).sum(axis=1).max(initial=0))
    x = np.zeros(a.shape[0], dtype=np.int64)
    x[start] = 1
    for _ in range(s):
        if row_abs and int(np.abs(x).max()) > _INT64_MAX // row_abs:
            raise PathCountOverflowError(f"walk counts exceed int64 before length {s}")
        x = a @ x
    return x


def path_count(a, r: int, d: int, s: int) -> int:
    """Number of length-``s`` walks from ``r`` to ``d``, i.e. ``<r|A^s|d>``, exactly."""
    if s < 0:
        raise ValidationError("s must be nonnegative")
    n = np.asarray(a).shape[0]
    if not (0 <= r < n and 0 <= d < n):
        raise ValidationError("node index out of range")
    return int(_walk_counts(a, d, s)[r])


def path_count_bound(a, r: int, d: int, s: int) -> BoundReport:
    """``N_{r->d}(s)^2 / (N_{d->d}(2s) - N_{d->d}(s)^2)``, computed in exact arithmetic.

    Falls back to floating point (``inexact=True``) when counts overflow int64.
    """
    if r == d:
        raise PreconditionError("path-count bound needs distinct nodes")
    if s < 1:
        raise ValidationError("s must be >= 1")
    try:
        num = path_count(a, r, d, s) ** 2
        nds = path_count(a, d, d, s)
        nd2s = path_count(a, d, d, 2 * s)
        exact_den = nd2s - nds ** 2
        if exact_den == 0:
            raise DegenerateError(f"Var(A^{s})_d = 0")
        frac = Fraction(num, exact_den)
        return BoundReport("lower", float(min(frac, 1)), float(frac), "path-count-s", s=s,
                           rhs_zero=num == 0, exact=frac)
    except PathCountOverflowError:
        m = np.asarray(a, dtype=float)
        x = np.zeros(m.shape[0])
        x[d] = 1.0
        xs = _power_apply(m, x, s)
        var = float(xs @ xs - xs[d] ** 2)
        if var <= 0:
            raise DegenerateError(f"Var(A^{s})_d = 0") from None
        raw = xs[r] ** 2 / var
        return BoundReport("lower", min(1.0, raw), raw, "path-count-s", s=s,
                           rhs_zero=xs[r] == 0, inexact=True)


# -- distance and s selection -------------------------------------------------

def distance_s(g: Graph, r: int, d: int) -> float:
    """BFS distance between nodes ``r`` and ``d``; ``math.inf`` when disconnected."""
    n = g.node_count
    if not (0 <= r < n and 0 <= d < n):
        raise ValidationError("node index out of range")
    nbrs: list[list[int]] = [[] for _ in range(n)]
    for i, j in g.edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    dist = {r: 0}
    queue = deque([r])
    while queue:
        u = queue.popleft()
        if u == d:
            return dist[u]
        for w in nbrs[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return math.inf


def _coupling_graph(h) -> Graph:
    m = as_matrix(h)
    n = m.shape[0]
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if abs(m[i, j]) > 0]
    return Graph.from_edges(n, edges)


def graph_diameter(g: Graph) -> int:
    """Largest finite pairwise distance (0 for a single node)."""
    best = 0
    for r in range(g.node_count):
        for d in range(r + 1, g.node_count):
            x = distance_s(g, r, d)
            if x != math.inf:
                best = max(best, int(x))
    return best


def smallest_nonvacuous_s(h, d, psi_in, s_max: int, shift_c: float = 0.0) -> int | None:
    """Smallest ``s`` in ``1..s_max`` whose commutator element is nonzero."""
    for s in range(1, s_max + 1):
        try:
            if not lower_bound_commutator(h, d, psi_in, s, shift_c).rhs_zero:
                return s
        except DegenerateError:
            continue
    return None


# -- s sweep ------------------------------------------------------------------

@dataclass(frozen=True)
class SweepResult:
    s_values: tuple[int, ...]
    reports: tuple[BoundReport | None, ...]
    errors: dict = field(default_factory=dict)
    best_s: int | None = None
    best_value: float = 0.0
    saturated: bool = False
    oscillating: bool = False

    @property
    def values(self) -> list[float | None]:
        return [None if r is None else r.value for r in self.reports]

    def to_dict(self) -> dict:
        return {
            "s": list(self.s_values),
            "values": self.values,
            "rhs_zero": [None if r is None else r.rhs_zero for r in self.reports],
            "shift_c": [None if r is None else r.shift_c for r in self.reports],
            "errors": {str(k): v for k, v in self.errors.items()},
            "best_s": self.best_s,
            "best_value": self.best_value,
            "saturated": self.saturated,
            "oscillating": self.oscillating,
        }

    def to_csv(self) -> str:
        lines = ["s,value,rhs_zero,shift_c"]
        for s, r in zip(self.s_values, self.reports):
            if r is None:
                lines.append(f"{s},,,")
            else:
                lines.append(f"{s},{r.value:.12g},{int(r.rhs_zero)},{r.shift_c:.12g}")
        return "\n".join(lines) + "\n"


def default_s_max(dim: int) -> int:
    return min(4 * dim, S_MAX_CAP)


def _saturation(values: list[float], window: int, rel_tol: float) -> tuple[bool, bool]:
    """(running max flat over ``window`` steps, successive differences alternate in sign)."""
    if window < 1 or len(values) <= window:
        return False, False
    running = np.maximum.accumulate(values)
    flat = running[-1] - running[-window - 1] <= rel_tol * max(running[-1], 1e-300)
    diffs = np.diff(values[-window - 1:])
    signs = np.sign(diffs)
    osc = bool(np.all(signs != 0) and np.all(signs[1:] == -signs[:-1]))
    return bool(flat), osc


def sweep_s(h, d, psi_in, s_max: int | None = None, shift_c: float = 0.0, auto_shift: bool = True,
            diameter: int | None = None, saturation_tol: float = SATURATION_REL_TOL) -> SweepResult:
    """Commutator lower bound for ``s = 1..s_max``; the best one is recorded.

    Degenerate-variance points are retried once with the shift
    ``c = 1 + spectral radius`` when ``auto_shift`` is set, and otherwise
    recorded in ``errors``. ``saturated`` is raised when the running maximum
    moved by at most ``saturation_tol`` (relative) over the last
    ``2 * diameter`` values while those values alternate up and down.
    """
    m = as_matrix(h)
    if s_max is None:
        s_max = default_s_max(m.shape[0])
    if s_max < 1:
        raise ValidationError("s_max must be >= 1")
    if diameter is None:
        diameter = graph_diameter(_coupling_graph(m))
    retry_c = None
    reports: list[BoundReport | None] = []
    errors: dict[int, str] = {}
    for s in range(1, s_max + 1):
        try:
            rep = lower_bound_commutator(m, d, psi_in, s, shift_c)
        except DegenerateError as exc:
            rep = None
            if auto_shift:
                if retry_c is None:
                    retry_c = 1.0 + eigendecompose(m).spectral_radius
                try:
                    rep = replace(lower_bound_commutator(m, d, psi_in, s, shift_c + retry_c),
                                  shift_retried=True)
                except DegenerateError as exc2:
                    errors[s] = str(exc2)
            else:
                errors[s] = str(exc)
        reports.append(rep)
    valid = [(r.value, s) for s, r in zip(range(1, s_max + 1), reports) if r is not None]
    best_value, best_s = max(valid, key=lambda t: (t[0], -t[1])) if valid else (0.0, None)
    vals = [r.value for r in reports if r is not None]
    saturated, osc = _saturation(vals, 2 * max(diameter, 1), saturation_tol)
    return SweepResult(tuple(range(1, s_max + 1)), tuple(reports), errors, best_s, best_value,
                       saturated and osc, osc)
