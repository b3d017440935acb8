"""Exact desk-scale engine for chamber-walk chains.

Builds dense transition matrices over subgraph states, evaluates the
closed-form stationary law and eigenvectors of the per-edge update chain,
computes spectra of compound chains through the support lattice, and
derives mixing bounds, total-variation decay, and hitting/commute times.
Every closed-form path is paired with an independent numeric oracle
(dense eigensolve or first-step linear solve).

Two numeric modes coexist: exact rationals whenever the driving weights
and edge probabilities are Fractions (matrices become object arrays), and
float64 otherwise.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Sequence

import numpy as np

from .edits import Edit, apply, chamber_of, compose, supp
from .errors import (
    CapExceeded,
    DegenerateGap,
    LengthMismatch,
    NotIrreducible,
    NotReversible,
    SupportNotCovering,
    ValidationError,
)
from .hostgraph import ENUM_EDGE_CAP, EdgeSet, HostGraph
from .lattice import (
    SpectrumEntry,
    SpectrumReport,
    SupportLattice,
    closure,
    multiplicities,
    representatives_for,
)
from .process import WeightedEdits, _per_edge_probabilities, _is_exact

DEFAULT_STATE_CAP = 1 << 20
REVERSIBILITY_TOL = 1e-10
SOLVE_RESIDUAL_TOL = 1e-8


# ---------------------------------------------------------------------------
# transition matrices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic matrix over an ordered list of subgraph states."""

    states: tuple[EdgeSet, ...]
    entries: np.ndarray  # float64, or object dtype holding Fractions
    exact: bool

    @property
    def size(self) -> int:
        return len(self.states)

    @cached_property
    def _index(self) -> dict[int, int]:
        return {s.mask: i for i, s in enumerate(self.states)}

    def index_of(self, state: EdgeSet | int) -> int:
        mask = state.mask if isinstance(state, EdgeSet) else int(state)
        try:
            return self._index[mask]
        except KeyError:
            raise ValidationError(f"state {mask:#x} is not in this chain") from None

    def to_float(self) -> np.ndarray:
        if self.exact:
            return np.array(
                [[float(v) for v in row] for row in self.entries], dtype=float
            )
        return self.entries

    def row_sum_residual(self) -> float:
        if self.exact:
            return max(abs(sum(row) - 1) for row in self.entries)
        return float(np.abs(self.entries.sum(axis=1) - 1.0).max())

    def reorder(self, masks: Sequence[int]) -> "TransitionMatrix":
        """Same chain with states permuted into the given mask order."""
        perm = [self.index_of(mask) for mask in masks]
        if len(perm) != self.size or len(set(perm)) != self.size:
            raise ValidationError("reorder needs a permutation of all states")
        if self.exact:
            entries = np.empty((self.size, self.size), dtype=object)
            for a, i in enumerate(perm):
                for b, j in enumerate(perm):
                    entries[a, b] = self.entries[i, j]
        else:
            idx = np.array(perm)
            entries = self.entries[np.ix_(idx, idx)]
        return TransitionMatrix(
            tuple(self.states[i] for i in perm), entries, self.exact
        )


def sign_lex_order(m: int) -> list[int]:
    """State masks ordered by their sign table: edge 0 is the most
    significant digit and + sorts before -, matching the conventional
    chamber listing (full set first, empty set last)."""
    order = []
    for k in range(1 << m):
        mask = 0
        for e in range(m):
            if not (k >> (m - 1 - e)) & 1:
                mask |= 1 << e
        order.append(mask)
    return order


def permute_vector(vec, masks: Sequence[int]):
    """Reindex a state vector given in ascending-mask order."""
    if isinstance(vec, np.ndarray) and vec.dtype != object:
        return vec[np.array(masks)]
    return [vec[mask] for mask in masks]


def _require_enumerable(m: int, cap: int) -> None:
    if m > ENUM_EDGE_CAP:
        raise CapExceeded(f"m = {m} exceeds the {ENUM_EDGE_CAP}-edge enumeration cap")
    if (1 << m) > cap:
        raise CapExceeded(f"2^{m} states exceed the cap of {cap}")


def build_chain(
    dist: WeightedEdits,
    g: HostGraph,
    restrict: str = "all",
    initial: EdgeSet | None = None,
    cap: int = DEFAULT_STATE_CAP,
) -> TransitionMatrix:
    """Transition matrix of the walk driven by `dist`.

    restrict="all" enumerates every subset of host edges in ascending mask
    order; restrict="recurrent" first computes the closed communicating
    class and builds the matrix on it. Exact rational entries are produced
    whenever every weight is rational.
    """
    if dist.m != g.m:
        raise ValidationError(f"distribution edge count {dist.m} != host {g.m}")
    if dist.is_lazy:
        raise CapExceeded("cannot enumerate a lazy distribution; use explicit mode")
    if restrict == "all":
        _require_enumerable(g.m, cap)
        states = tuple(EdgeSet(g.m, mask) for mask in range(1 << g.m))
    elif restrict == "recurrent":
        states = tuple(recurrent_class(dist, g, initial=initial, cap=cap))
    else:
        raise ValidationError(f"restrict must be 'all' or 'recurrent', got {restrict!r}")

    index = {s.mask: i for i, s in enumerate(states)}
    n = len(states)
    if dist.is_exact:
        entries = np.empty((n, n), dtype=object)
        entries[:, :] = Fraction(0)
        for edit, w in dist.items:
            for i, s in enumerate(states):
                j = index[(s.mask | edit.plus) & ~edit.minus]
                entries[i, j] += w
        return TransitionMatrix(states, entries, True)

    masks = np.array([s.mask for s in states], dtype=np.int64)
    entries = np.zeros((n, n))
    rows = np.arange(n)
    for edit, w in dist.items:
        dest_masks = (masks | edit.plus) & ~edit.minus
        cols = np.array([index[int(d)] for d in dest_masks])
        np.add.at(entries, (rows, cols), float(w))
    return TransitionMatrix(states, entries, False)


def recurrent_class(
    dist: WeightedEdits,
    g: HostGraph,
    initial: EdgeSet | None = None,
    cap: int = DEFAULT_STATE_CAP,
) -> list[EdgeSet]:
    """The unique closed communicating class of the walk: states reachable
    after every edge in the covered region has been acted on at least once,
    closed under all generator applications.

    If the generator supports do not cover the host edges, a warning is
    issued and the uncovered edges stay frozen at the initial state's values.
    """
    if dist.m != g.m:
        raise ValidationError(f"distribution edge count {dist.m} != host {g.m}")
    if dist.is_lazy:
        raise CapExceeded("cannot enumerate a lazy distribution; use explicit mode")
    edits = [e for e, _ in dist.items]
    covered = 0
    for e in edits:
        covered |= e.support_mask
    full = (1 << g.m) - 1
    if covered != full:
        warnings.warn(
            f"generator supports cover only {covered:#x} of {full:#x}; "
            "uncovered edges are frozen at the initial state",
            SupportNotCovering,
            stacklevel=2,
        )
    start_state = initial if initial is not None else g.empty_set()
    saturate = Edit.identity(g.m)
    for e in edits:
        saturate = compose(saturate, e)
    start = apply(saturate, start_state)

    seen = {start.mask}
    frontier = [start.mask]
    while frontier:
        mask = frontier.pop()
        for e in edits:
            dest = (mask | e.plus) & ~e.minus
            if dest not in seen:
                if len(seen) >= cap:
                    raise CapExceeded(f"recurrent class exceeds cap of {cap} states")
                seen.add(dest)
                frontier.append(dest)
    return [EdgeSet(g.m, mask) for mask in sorted(seen)]


# ---------------------------------------------------------------------------
# stationary laws
# ---------------------------------------------------------------------------


def stationary_closed_form(g: HostGraph, p):
    """Product-form stationary law of the per-edge update chain over all
    2^m states in ascending mask order: each edge is independently present
    with its own probability.

    Returns a list of Fractions when p is rational, else a float array.
    """
    probs = _per_edge_probabilities(g, p)
    _require_enumerable(g.m, DEFAULT_STATE_CAP)
    exact = all(_is_exact(pe) for pe in probs)
    if exact:
        out = []
        for mask in range(1 << g.m):
            val = Fraction(1)
            for e, pe in enumerate(probs):
                val *= pe if mask >> e & 1 else 1 - pe
            out.append(val)
        return out
    size = 1 << g.m
    masks = np.arange(size)
    pi = np.ones(size)
    for e, pe in enumerate(probs):
        present = (masks >> e) & 1
        pi *= np.where(present, float(pe), 1.0 - float(pe))
    return pi


def stationary_numeric(tm: TransitionMatrix) -> np.ndarray:
    """Left fixed vector by linear solve; independent of any closed form."""
    P = tm.to_float()
    n = tm.size
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise NotIrreducible("stationary system is singular") from exc
    if np.abs(A @ pi - b).max() > SOLVE_RESIDUAL_TOL or pi.min() < -SOLVE_RESIDUAL_TOL:
        raise NotIrreducible("stationary solve left a large residual")
    return np.clip(pi, 0.0, None) / pi.sum()


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


def eigenvalues_simple(m: int) -> SpectrumReport:
    """Closed-form spectrum of the per-edge update chain: one eigenvalue
    |T|/m per edge subset T, each with multiplicity one (so the value k/m
    appears C(m, k) times in the multiset), independent of the edge
    probabilities."""
    if m < 1:
        raise ValidationError("need at least one edge")
    _require_enumerable(m, DEFAULT_STATE_CAP)
    entries = tuple(
        SpectrumEntry(EdgeSet(m, mask), Fraction(mask.bit_count(), m), 1)
        for mask in sorted(range(1 << m), key=lambda v: (v.bit_count(), v))
    )
    return SpectrumReport(entries)


def spectrum(
    dist: WeightedEdits,
    g: HostGraph,
    lat: SupportLattice | None = None,
    initial: EdgeSet | None = None,
    cap: int = DEFAULT_STATE_CAP,
) -> SpectrumReport:
    """Spectrum of a compound chain: one eigenvalue per flat of the support
    lattice (the weight mass inside the flat), with multiplicities obtained
    by Mobius inversion of chamber counts over the flat order."""
    if dist.is_lazy:
        raise CapExceeded("cannot enumerate a lazy distribution; use explicit mode")
    generators = [e for e, _ in dist.items]
    if lat is None:
        lat = closure([supp(e) for e in generators], cap=cap)
    chambers = [chamber_of(s) for s in recurrent_class(dist, g, initial, cap)]
    reps = representatives_for(lat, generators)
    return multiplicities(lat, chambers, reps, dist)


def numeric_eigenvalues(tm: TransitionMatrix, imag_tol: float = 1e-8) -> np.ndarray:
    """Eigenvalue multiset of the dense matrix, sorted descending.

    The chamber-walk matrices are diagonalizable with real spectrum, so any
    significant imaginary residue is reported as an error.
    """
    values = np.linalg.eigvals(tm.to_float())
    if np.abs(values.imag).max() > imag_tol:
        raise ValidationError(
            f"eigenvalues have imaginary parts up to {np.abs(values.imag).max()}"
        )
    return np.sort(values.real)[::-1]


def eigenvalue_multiset_residual(a: Sequence[float], b: Sequence[float]) -> float:
    """Largest gap after sorting both multisets; lengths must agree."""
    if len(a) != len(b):
        raise LengthMismatch(f"multiset sizes differ: {len(a)} != {len(b)}")
    if not len(a):
        return 0.0
    av = np.sort(np.asarray(a, dtype=float))
    bv = np.sort(np.asarray(b, dtype=float))
    return float(np.abs(av - bv).max())


# ---------------------------------------------------------------------------
# eigenvectors of the per-edge update chain
# ---------------------------------------------------------------------------


def phi(T: EdgeSet, g: HostGraph, p):
    """Left eigenvector indexed by an edge subset T, over all 2^m states in
    ascending mask order. Entry at state E is

        (-1)^(#edges outside E and T) * prod(p_e, e in T and E)
                                      * prod(1-p_e, e in T not in E)

    and satisfies phi_T P = (|T|/m) phi_T; at T = all edges it equals the
    stationary law."""
    probs = _per_edge_probabilities(g, p)
    if T.m != g.m:
        raise ValidationError(f"subset edge count {T.m} != host {g.m}")
    _require_enumerable(g.m, DEFAULT_STATE_CAP)
    exact = all(_is_exact(pe) for pe in probs)
    size = 1 << g.m
    if exact:
        out = []
        for mask in range(size):
            val = Fraction(1)
            for e, pe in enumerate(probs):
                in_state = mask >> e & 1
                if T.mask >> e & 1:
                    val *= pe if in_state else 1 - pe
                elif not in_state:
                    val = -val
            out.append(val)
        return out
    masks = np.arange(size)
    row = np.ones(size)
    for e, pe in enumerate(probs):
        present = (masks >> e) & 1
        if T.mask >> e & 1:
            row *= np.where(present, float(pe), 1.0 - float(pe))
        else:
            row *= np.where(present, 1.0, -1.0)
    return row


def psi(T: EdgeSet, g: HostGraph, p) -> np.ndarray:
    """Orthonormal version of phi: scaled by prod(sqrt(p_e(1-p_e)), e not
    in T) and divided by sqrt of the stationary law entrywise. These are
    left eigenvectors of the symmetrized matrix Q and form an orthonormal
    system. Always float (square roots)."""
    probs = [float(pe) for pe in _per_edge_probabilities(g, p)]
    row = np.asarray([float(v) for v in phi(T, g, probs)], dtype=float)
    scale = 1.0
    for e, pe in enumerate(probs):
        if not T.mask >> e & 1:
            scale *= math.sqrt(pe * (1.0 - pe))
    pi = stationary_closed_form(g, probs)
    return row * scale / np.sqrt(pi)


@dataclass(frozen=True)
class EigenSystem:
    """Full left eigensystem of a per-edge update chain.

    Rows of `phi` (and `psi`, float mode only) are indexed by edge subsets
    in ascending mask order, columns by states in ascending mask order.
    """

    subsets: tuple[EdgeSet, ...]
    eigenvalues: tuple
    phi: np.ndarray
    psi: np.ndarray | None
    exact: bool


def eigensystem_simple(g: HostGraph, p) -> EigenSystem:
    """All 2^m closed-form eigenvectors at once."""
    probs = _per_edge_probabilities(g, p)
    _require_enumerable(g.m, DEFAULT_STATE_CAP)
    exact = all(_is_exact(pe) for pe in probs)
    size = 1 << g.m
    subsets = tuple(EdgeSet(g.m, mask) for mask in range(size))
    values = tuple(
        Fraction(t.mask.bit_count(), g.m) if exact else t.mask.bit_count() / g.m
        for t in subsets
    )
    if exact:
        phi_rows = np.empty((size, size), dtype=object)
        for i, t in enumerate(subsets):
            phi_rows[i, :] = phi(t, g, probs)
        return EigenSystem(subsets, values, phi_rows, None, True)
    phi_rows = np.vstack([np.asarray(phi(t, g, probs)) for t in subsets])
    psi_rows = np.vstack([psi(t, g, probs) for t in subsets])
    return EigenSystem(subsets, values, phi_rows, psi_rows, False)


def q_matrix(tm: TransitionMatrix, pi: np.ndarray) -> np.ndarray:
    """Similarity transform D^(1/2) P D^(-1/2); symmetric iff the chain is
    reversible with respect to pi."""
    root = np.sqrt(np.asarray(pi, dtype=float))
    return tm.to_float() * root[:, None] / root[None, :]


def detailed_balance_residual(tm: TransitionMatrix, pi) -> float:
    """max |pi_i P_ij - pi_j P_ji| over all state pairs."""
    P = tm.to_float()
    v = np.asarray([float(x) for x in pi], dtype=float)
    flow = v[:, None] * P
    return float(np.abs(flow - flow.T).max())


# ---------------------------------------------------------------------------
# total variation and mixing bounds
# ---------------------------------------------------------------------------


def tv_distance(mu, nu) -> float:
    """Half the l1 distance between two probability vectors."""
    a = np.asarray([float(x) for x in mu], dtype=float)
    b = np.asarray([float(x) for x in nu], dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"vector lengths differ: {a.shape} != {b.shape}")
    return 0.5 * float(np.abs(a - b).sum())


def tv_decay(
    tm: TransitionMatrix, initial: EdgeSet | int, pi, t_max: int
) -> np.ndarray:
    """Exact distance-to-stationarity curve for t = 0..t_max, starting from
    a point mass and iterating row-vector products."""
    if t_max < 0:
        raise ValidationError(f"t_max must be >= 0, got {t_max}")
    P = tm.to_float()
    target = np.asarray([float(x) for x in pi], dtype=float)
    if target.shape[0] != tm.size:
        raise LengthMismatch(f"pi has {target.shape[0]} entries, chain has {tm.size}")
    dist = np.zeros(tm.size)
    dist[tm.index_of(initial)] = 1.0
    curve = np.empty(t_max + 1)
    for t in range(t_max + 1):
        curve[t] = 0.5 * np.abs(dist - target).sum()
        if t < t_max:
            dist = dist @ P
    return curve


def brown_tv_bound(report: SpectrumReport, t: int) -> float:
    """Spectral upper bound on distance to stationarity from any chamber:
    sum of m_X * lambda_X^t over all flats X below the top."""
    top_mask = report.top.mask
    total = 0.0
    for e in report.entries:
        if e.flat.mask == top_mask:
            continue
        lam = float(e.eigenvalue)
        total += e.multiplicity * (lam**t if (lam or t) else 1.0)
    return total


def simple_tv_bound(m: int, t: int) -> float:
    """Closed-form decay envelope 2m(1-1/m)^t, valid once t >= 2m ln m."""
    return 2.0 * m * (1.0 - 1.0 / m) ** t


def mixing_bound_simple(m: int, c: float) -> int:
    """Steps guaranteeing distance <= e^(-c) for the per-edge update chain:
    ceil(m(c + 2 ln m)). Natural logarithm."""
    if c <= 0:
        raise ValidationError(f"c must be positive, got {c}")
    if m < 1:
        raise ValidationError("need at least one edge")
    return math.ceil(m * (c + 2.0 * math.log(m)))


def mixing_bound_compound(
    lambda_star: float, m: int, c: float, chamber_count: int | None = None
) -> int:
    """Steps guaranteeing distance <= e^(-c) for a compound chain started
    from a chamber: ceil((m ln 2 + c) / (1 - lambda_star)), sharpened to
    ceil((ln M + c) / (1 - lambda_star)) when the chamber count M is known."""
    if c <= 0:
        raise ValidationError(f"c must be positive, got {c}")
    if not 0 <= lambda_star < 1:
        if lambda_star >= 1:
            raise DegenerateGap(f"second eigenvalue {lambda_star} leaves no gap")
        raise ValidationError(f"lambda_star {lambda_star} is outside [0, 1)")
    gap = 1.0 - float(lambda_star)
    if chamber_count is not None:
        if chamber_count < 1:
            raise ValidationError("chamber count must be positive")
        return math.ceil((math.log(chamber_count) + c) / gap)
    if m < 1:
        raise ValidationError("need at least one edge")
    return math.ceil((m * math.log(2.0) + c) / gap)


def moran_complete_mixing_bound(n: int, c: float) -> int:
    """Specialization for neighborhood resampling on the complete graph:
    ceil((n^2 ln n + c n) / 2)."""
    if n < 2:
        raise ValidationError("need at least two vertices")
    if c <= 0:
        raise ValidationError(f"c must be positive, got {c}")
    return math.ceil((n * n * math.log(n) + c * n) / 2.0)


def intersection_mixing_bound(n: int, N: int, c: float) -> int:
    """Specialization for bipartite neighborhood reassignment:
    ceil(N n^2 ln 2 + c n)."""
    if n < 1 or N < 1:
        raise ValidationError("need n, N >= 1")
    if c <= 0:
        raise ValidationError(f"c must be positive, got {c}")
    return math.ceil(N * n * n * math.log(2.0) + c * n)


# ---------------------------------------------------------------------------
# hitting and commute times
# ---------------------------------------------------------------------------


def _ratio_to_stationary(T_mask: int, state_mask: int, probs) -> object:
    """phi_T(E) / pi(E), expanded as a product over edges outside T so no
    division by tiny stationary masses occurs: the factor is 1/p_e when the
    edge is present and 1/(p_e - 1) when absent."""
    val = Fraction(1) if all(_is_exact(pe) for pe in probs) else 1.0
    for e, pe in enumerate(probs):
        if T_mask >> e & 1:
            continue
        val *= 1 / pe if state_mask >> e & 1 else 1 / (pe - 1)
    return val


def commute_terms(E: EdgeSet, F: EdgeSet, g: HostGraph, p) -> list[tuple[EdgeSet, object]]:
    """Per-subset contributions to the spectral commute time, for every
    proper subset T of the host edges:

        m/(m-|T|) * prod(p_e(1-p_e), e not in T) * (phi_T(E)/pi(E) - phi_T(F)/pi(F))^2

    Exact Fractions when p is rational. Terms whose subset contains the
    symmetric difference of E and F are identically zero since the two
    ratios then agree factor by factor.
    """
    probs = _per_edge_probabilities(g, p)
    if E.m != g.m or F.m != g.m:
        raise ValidationError("state edge count disagrees with host")
    _require_enumerable(g.m, DEFAULT_STATE_CAP)
    m = g.m
    exact = all(_is_exact(pe) for pe in probs)
    out = []
    for t_mask in range((1 << m) - 1):  # all T except the full edge set
        scale = Fraction(1) if exact else 1.0
        for e, pe in enumerate(probs):
            if not t_mask >> e & 1:
                scale *= pe * (1 - pe)
        coeff = Fraction(m, m - t_mask.bit_count()) if exact else m / (m - t_mask.bit_count())
        diff = _ratio_to_stationary(t_mask, E.mask, probs) - _ratio_to_stationary(
            t_mask, F.mask, probs
        )
        out.append((EdgeSet(m, t_mask), coeff * scale * diff * diff))
    return out


DROPPED_TERM_TOL = 1e-14


def commute_time(
    E: EdgeSet, F: EdgeSet, g: HostGraph, p, check_dropped: bool = False
):
    """Expected round-trip time between two states of the per-edge update
    chain, by the closed-form spectral sum.

    Subsets containing the symmetric difference of E and F contribute
    exactly zero and are skipped; with check_dropped=True each skipped term
    is evaluated and must vanish below DROPPED_TERM_TOL.
    """
    if E.mask == F.mask and E.m == F.m:
        return Fraction(0) if all(_is_exact(pe) for pe in _per_edge_probabilities(g, p)) else 0.0
    delta = E.mask ^ F.mask
    total = None
    for flat, term in commute_terms(E, F, g, p):
        dropped = delta & ~flat.mask == 0  # T contains the symmetric difference
        if dropped:
            if check_dropped and abs(float(term)) > DROPPED_TERM_TOL:
                raise ValidationError(
                    f"term at subset {flat.hex()} was expected to vanish, got {term}"
                )
            continue
        total = term if total is None else total + term
    return total if total is not None else 0.0


def hitting_time_closed(E: EdgeSet, F: EdgeSet, g: HostGraph, p):
    """Expected steps from E until first visiting F, per-edge update chain,
    via the closed-form spectral sum (exact for rational p)."""
    probs = _per_edge_probabilities(g, p)
    if E.m != g.m or F.m != g.m:
        raise ValidationError("state edge count disagrees with host")
    _require_enumerable(g.m, DEFAULT_STATE_CAP)
    if E.mask == F.mask:
        return Fraction(0) if all(_is_exact(pe) for pe in probs) else 0.0
    m = g.m
    exact = all(_is_exact(pe) for pe in probs)
    total = Fraction(0) if exact else 0.0
    for t_mask in range((1 << m) - 1):
        scale = Fraction(1) if exact else 1.0
        for e, pe in enumerate(probs):
            if not t_mask >> e & 1:
                scale *= pe * (1 - pe)
        coeff = Fraction(m, m - t_mask.bit_count()) if exact else m / (m - t_mask.bit_count())
        r_target = _ratio_to_stationary(t_mask, F.mask, probs)
        r_source = _ratio_to_stationary(t_mask, E.mask, probs)
        total += coeff * scale * r_target * (r_target - r_source)
    return total


def hitting_time(
    tm: TransitionMatrix,
    source: EdgeSet | int,
    target: EdgeSet | int,
    method: str = "solve",
) -> float:
    """Expected steps from source until first visiting target.

    method="solve" uses first-step analysis: delete the target row and
    column and solve (I - P) h = 1. method="spectral" requires a reversible
    chain and sums the eigendecomposition of the symmetrized matrix; the
    per-term products are insensitive to eigenvector sign choices.
    """
    i = tm.index_of(source)
    j = tm.index_of(target)
    if i == j:
        return 0.0
    if method == "solve":
        return _hitting_solve(tm, j)[_reduced_position(i, j)]
    if method == "spectral":
        return _hitting_spectral(tm, i, j)
    raise ValidationError(f"method must be 'solve' or 'spectral', got {method!r}")


def _reduced_position(i: int, removed: int) -> int:
    return i if i < removed else i - 1


def _hitting_solve(tm: TransitionMatrix, target: int) -> np.ndarray:
    P = tm.to_float()
    keep = [k for k in range(tm.size) if k != target]
    A = np.eye(len(keep)) - P[np.ix_(keep, keep)]
    b = np.ones(len(keep))
    try:
        h = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise NotIrreducible("hitting-time system is singular") from exc
    if np.abs(A @ h - b).max() > SOLVE_RESIDUAL_TOL * max(1.0, np.abs(h).max()):
        raise NotIrreducible("hitting-time solve left a large residual")
    return h


def _hitting_spectral(tm: TransitionMatrix, i: int, j: int) -> float:
    pi = stationary_numeric(tm)
    if detailed_balance_residual(tm, pi) > REVERSIBILITY_TOL:
        raise NotReversible("chain is not reversible; use method='solve'")
    Q = q_matrix(tm, pi)
    values, vectors = np.linalg.eigh((Q + Q.T) / 2.0)
    order = np.argsort(values)[::-1]
    values = values[order]
    vectors = vectors[:, order]
    if tm.size > 1 and values[1] > 1.0 - 1e-12:
        raise NotIrreducible("unit eigenvalue is not simple")
    root = np.sqrt(pi)
    total = 0.0
    for k in range(1, tm.size):
        fj = vectors[j, k] / root[j]
        fi = vectors[i, k] / root[i]
        total += fj * (fj - fi) / (1.0 - values[k])
    return total


def commute_time_chain(
    tm: TransitionMatrix,
    x: EdgeSet | int,
    y: EdgeSet | int,
    method: str = "solve",
) -> float:
    """Round trip through a generic chain: hitting there plus hitting back."""
    return hitting_time(tm, x, y, method) + hitting_time(tm, y, x, method)


# ---------------------------------------------------------------------------
# exports
# ---------------------------------------------------------------------------


def to_dot(tm: TransitionMatrix, g: HostGraph | None = None, labels: str = "hex") -> str:
    """DOT rendering of the state graph: one node per state, directed edges
    weighted by transition probability, self-loops suppressed."""
    if labels not in ("hex", "edges"):
        raise ValidationError(f"labels must be 'hex' or 'edges', got {labels!r}")
    if labels == "edges" and g is None:
        raise ValidationError("labels='edges' needs the host graph")

    def label(s: EdgeSet) -> str:
        if labels == "hex":
            return s.hex()
        return "{" + ",".join(f"{u}-{v}" for u, v in (g.edges[e] for e in s.indices())) + "}"

    P = tm.to_float()
    lines = ["digraph states {"]
    for s in tm.states:
        lines.append(f'  "{label(s)}";')
    for i in range(tm.size):
        for j in range(tm.size):
            if i != j and P[i, j] > 0.0:
                w = tm.entries[i, j] if tm.exact else f"{P[i, j]:.6g}"
                lines.append(
                    f'  "{label(tm.states[i])}" -> "{label(tm.states[j])}" [label="{w}"];'
                )
    lines.append("}")
    return "\n".join(lines) + "\n"
