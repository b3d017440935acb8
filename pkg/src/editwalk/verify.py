"""Self-checking oracle suite behind the CLI's verify command.

Each check recomputes a quantity two independent ways (closed form vs
dense numerics) and reports the residual. Checks return results rather
than raising, so the CLI can print a full table and exit nonzero only at
the end. In rational mode the residuals of the identity checks are exact
zeros.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .edits import supp
from .hostgraph import HostGraph
from .lattice import closure
from .process import WeightedEdits, _is_exact, _per_edge_probabilities
from .spectral import (
    TransitionMatrix,
    commute_time,
    commute_time_chain,
    detailed_balance_residual,
    eigensystem_simple,
    eigenvalue_multiset_residual,
    eigenvalues_simple,
    numeric_eigenvalues,
    q_matrix,
    spectrum,
    stationary_closed_form,
    stationary_numeric,
)


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    detail: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{status}  {self.name}: residual {self.residual:.3e} (tol {self.tolerance:.1e}){extra}"


def _result(name: str, residual, tol: float, detail: str = "") -> CheckResult:
    r = float(abs(residual))
    return CheckResult(name, r, tol, r <= tol, detail)


def check_row_stochastic(tm: TransitionMatrix, tol: float = 1e-12) -> CheckResult:
    return _result("row_stochastic", tm.row_sum_residual(), tol)


def check_stationary_fixed_point(
    tm: TransitionMatrix, pi, tol: float = 1e-12
) -> CheckResult:
    if tm.exact and all(_is_exact(x) for x in pi):
        rows = tm.entries
        residual = max(
            abs(sum(pi[i] * rows[i, j] for i in range(tm.size)) - pi[j])
            for j in range(tm.size)
        )
        return _result("stationary_fixed_point", residual, tol, "exact")
    v = np.asarray([float(x) for x in pi])
    residual = np.abs(v @ tm.to_float() - v).max()
    return _result("stationary_fixed_point", residual, tol)


def check_stationary_vs_solve(tm: TransitionMatrix, pi, tol: float = 1e-12) -> CheckResult:
    solved = stationary_numeric(tm)
    residual = np.abs(np.asarray([float(x) for x in pi]) - solved).max()
    return _result("stationary_vs_linear_solve", residual, tol)


def check_detailed_balance(tm: TransitionMatrix, pi, tol: float = 1e-12) -> CheckResult:
    if tm.exact and all(_is_exact(x) for x in pi):
        rows = tm.entries
        residual = max(
            abs(pi[i] * rows[i, j] - pi[j] * rows[j, i])
            for i in range(tm.size)
            for j in range(tm.size)
        )
        return _result("detailed_balance", residual, tol, "exact")
    return _result("detailed_balance", detailed_balance_residual(tm, pi), tol)


def check_eigenvector_residuals(
    g: HostGraph, p, tm: TransitionMatrix, tol: float = 1e-12
) -> CheckResult:
    system = eigensystem_simple(g, p)
    if system.exact and tm.exact:
        worst = Fraction(0)
        for i in range(tm.size):
            row = system.phi[i]
            lam = system.eigenvalues[i]
            for j in range(tm.size):
                lhs = sum(row[k] * tm.entries[k, j] for k in range(tm.size))
                worst = max(worst, abs(lhs - lam * row[j]))
        return _result("eigenvector_residual", worst, tol, "exact")
    P = tm.to_float()
    lam = np.asarray([float(v) for v in system.eigenvalues])
    residual = np.abs(system.phi.astype(float) @ P - lam[:, None] * system.phi.astype(float)).max()
    return _result("eigenvector_residual", residual, tol)


def check_orthonormality(g: HostGraph, p, tol: float = 1e-10) -> CheckResult:
    probs = [float(pe) for pe in _per_edge_probabilities(g, p)]
    system = eigensystem_simple(g, probs)
    gram = system.psi @ system.psi.T
    residual = np.abs(gram - np.eye(gram.shape[0])).max()
    return _result("orthonormality", residual, tol)


def check_q_symmetry(tm: TransitionMatrix, pi, tol: float = 1e-12) -> CheckResult:
    Q = q_matrix(tm, np.asarray([float(x) for x in pi]))
    return _result("q_symmetry", np.abs(Q - Q.T).max(), tol)


def check_spectrum_multiset(
    report, tm: TransitionMatrix, tol: float = 1e-8
) -> CheckResult:
    closed = report.eigenvalue_multiset()
    numeric = numeric_eigenvalues(tm)
    residual = eigenvalue_multiset_residual(closed, numeric)
    return _result("spectrum_multiset", residual, tol)


def check_commute_backends(
    g: HostGraph, p, tm: TransitionMatrix, pairs, tol: float = 1e-8
) -> CheckResult:
    worst = 0.0
    for E, F in pairs:
        spectral_value = float(commute_time(E, F, g, p))
        solved = commute_time_chain(tm, E, F, method="solve")
        worst = max(worst, abs(spectral_value - solved) / max(1.0, abs(solved)))
    return _result("commute_backends", worst, tol, f"{len(list(pairs))} pairs")


def check_closure_idempotent(dist: WeightedEdits) -> CheckResult:
    supports = [supp(e) for e, _ in dist.items]
    lat = closure(supports)
    again = closure(list(lat.flats))
    same = tuple(x.mask for x in lat.flats) == tuple(x.mask for x in again.flats)
    return CheckResult("closure_idempotent", 0.0 if same else 1.0, 0.0, same)


def run_verification(
    g: HostGraph,
    dist: WeightedEdits,
    p=None,
    tm: TransitionMatrix | None = None,
    rng: np.random.Generator | None = None,
) -> list[CheckResult]:
    """Full oracle suite for one model; p enables the per-edge closed forms."""
    from .spectral import build_chain, recurrent_class

    rng = rng or np.random.default_rng(0)
    results = []
    simple_model = p is not None

    if tm is None:
        restrict = "all" if simple_model else "recurrent"
        tm = build_chain(dist, g, restrict=restrict)
    results.append(check_row_stochastic(tm))

    if simple_model:
        pi = stationary_closed_form(g, p)
        results.append(check_stationary_fixed_point(tm, pi))
        results.append(check_stationary_vs_solve(tm, pi))
        results.append(check_detailed_balance(tm, pi))
        results.append(check_eigenvector_residuals(g, p, tm))
        results.append(check_orthonormality(g, p))
        results.append(check_q_symmetry(tm, pi))
        results.append(check_spectrum_multiset(eigenvalues_simple(g.m), tm))
        size = tm.size
        pairs = []
        for _ in range(min(10, size * (size - 1) // 2)):
            i, j = rng.choice(size, size=2, replace=False)
            pairs.append((tm.states[int(i)], tm.states[int(j)]))
        results.append(check_commute_backends(g, p, tm, pairs))
    else:
        report = spectrum(dist, g)
        results.append(check_spectrum_multiset(report, tm))
        chamber_total = len(recurrent_class(dist, g))
        results.append(
            CheckResult(
                "multiplicity_sum",
                abs(report.total_multiplicity - chamber_total),
                0.0,
                report.total_multiplicity == chamber_total,
                f"{chamber_total} chambers",
            )
        )
    results.append(check_closure_idempotent(dist))
    return results
