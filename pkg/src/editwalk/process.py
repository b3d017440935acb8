"""Driving distributions over edits and seeded trajectory simulation.

Built-in models:

* simple per-edge updates: pick an edge uniformly, force it present with
  its edge probability or absent otherwise (weights p_e/m and (1-p_e)/m);
* neighborhood resampling ("Moran" updates): pick an oriented edge (u, v)
  uniformly, detach u everywhere, reattach it to v;
* bipartite neighborhood reassignment ("intersection" updates): pick a
  left vertex uniformly and redraw its whole right neighborhood, first a
  size from mu then a uniform subset of that size.

Weights stay exact Fractions when the inputs are rational. Sampling uses a
Vose alias table, so a step is O(1) regardless of how many edits there are.
Trajectories are reproducible from (seed, stream) via numpy's PCG64.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Sequence

import numpy as np

from .edits import Edit, Sign, apply, simple_edit
from .errors import (
    BadDistribution,
    CapExceeded,
    EmptyEdgeSet,
    ProbabilityOutOfRange,
    ValidationError,
)
from .hostgraph import EdgeSet, HostGraph, complete_bipartite, neighborhood_edges

WEIGHT_SUM_TOL = 1e-12
EMPIRICAL_EDGE_CAP = 20


def _is_exact(value) -> bool:
    return isinstance(value, (Fraction, int))


class AliasSampler:
    """Vose alias method: O(n) setup, O(1) per draw, deterministic given rng."""

    def __init__(self, weights: Sequence[float]):
        n = len(weights)
        scaled = [float(w) * n for w in weights]
        self.prob = [0.0] * n
        self.alias = [0] * n
        small = [i for i, s in enumerate(scaled) if s < 1.0]
        large = [i for i, s in enumerate(scaled) if s >= 1.0]
        while small and large:
            s, g = small.pop(), large.pop()
            self.prob[s] = scaled[s]
            self.alias[s] = g
            scaled[g] = (scaled[g] + scaled[s]) - 1.0
            (small if scaled[g] < 1.0 else large).append(g)
        for i in small + large:
            self.prob[i] = 1.0

    def draw(self, rng: np.random.Generator) -> int:
        i = int(rng.integers(len(self.prob)))
        return i if rng.random() < self.prob[i] else self.alias[i]


@dataclass(frozen=True)
class LazySpec:
    """Closed-form sampler for distributions too large to enumerate."""

    sample: Callable[[np.random.Generator], Edit]
    support_masses: dict[int, object]
    weight_of: Callable[[Edit], float] | None = None


@dataclass(frozen=True)
class WeightedEdits:
    """Finite probability distribution over edits driving the walk."""

    m: int
    items: tuple[tuple[Edit, object], ...]
    lazy: LazySpec | None = None

    def __post_init__(self) -> None:
        if self.lazy is not None:
            return
        if not self.items:
            raise BadDistribution("explicit distribution needs at least one edit")
        total = 0
        exact = True
        for edit, w in self.items:
            if edit.m != self.m:
                raise ValidationError("edit host size disagrees with distribution")
            if w <= 0:
                raise BadDistribution(f"weight {w} is not strictly positive")
            exact = exact and _is_exact(w)
            total += w
        if exact:
            if total != 1:
                raise BadDistribution(f"weights sum to {total}, expected exactly 1")
        elif abs(float(total) - 1.0) > WEIGHT_SUM_TOL:
            raise BadDistribution(f"weights sum to {float(total)!r}, expected 1")

    @property
    def is_lazy(self) -> bool:
        return self.lazy is not None

    @property
    def is_exact(self) -> bool:
        return not self.is_lazy and all(_is_exact(w) for _, w in self.items)

    def support_masses(self) -> dict[int, object]:
        """Total weight per distinct generator support mask."""
        if self.lazy is not None:
            return dict(self.lazy.support_masses)
        masses: dict[int, object] = {}
        for edit, w in self.items:
            key = edit.support_mask
            masses[key] = masses.get(key, 0) + w
        return masses

    @cached_property
    def _sampler(self) -> AliasSampler:
        return AliasSampler([w for _, w in self.items])

    def sample(self, rng: np.random.Generator) -> Edit:
        if self.lazy is not None:
            return self.lazy.sample(rng)
        return self.items[self._sampler.draw(rng)][0]


def simple_edit_weights(g: HostGraph, p) -> WeightedEdits:
    """Per-edge distribution: force edge e present with weight p_e/m and
    absent with weight (1-p_e)/m, so each edge is examined uniformly."""
    probs = _per_edge_probabilities(g, p)
    m = g.m
    items: list[tuple[Edit, object]] = []
    for e, pe in enumerate(probs):
        items.append((simple_edit(e, Sign.PLUS, m), pe / m))
        items.append((simple_edit(e, Sign.MINUS, m), (1 - pe) / m))
    return WeightedEdits(m, tuple(items))


def _per_edge_probabilities(g: HostGraph, p) -> list:
    if g.m == 0:
        raise EmptyEdgeSet("host graph has no edges")
    probs = [p] * g.m if not isinstance(p, (Sequence, np.ndarray)) else list(p)
    if len(probs) != g.m:
        raise ValidationError(f"expected {g.m} edge probabilities, got {len(probs)}")
    for e, pe in enumerate(probs):
        if not 0 < pe < 1:
            raise ProbabilityOutOfRange(f"p[{e}] = {pe} is outside (0, 1)")
    return probs


def moran_weights(g: HostGraph) -> WeightedEdits:
    """Neighborhood-resampling distribution: one edit per oriented edge (u, v),
    clearing every edge at u and then restoring {u, v}, with weight 1/(2m)."""
    if g.m == 0:
        raise EmptyEdgeSet("host graph has no edges")
    w = Fraction(1, 2 * g.m)
    items: list[tuple[Edit, object]] = []
    for u, v in g.edges:
        for src, dst in ((u, v), (v, u)):
            star = neighborhood_edges(g, src).mask
            keep = 1 << g.index_of(src, dst)
            items.append((Edit(g.m, keep, star & ~keep), w))
    return WeightedEdits(g.m, tuple(items))


def intersection_weights(
    n: int,
    N: int,
    mu: Sequence,
    mode: str = "explicit",
    cap: int = 1 << 20,
) -> WeightedEdits:
    """Neighborhood reassignment on the complete bipartite host K_{n,N}.

    One edit per (left vertex v, right subset A): it rewires v's whole right
    neighborhood to be exactly A. Weights follow "uniform vertex, size from
    mu, uniform subset of that size": w = (1/n) * mu(|A|) / C(N, |A|).

    Host convention: ground vertices are 0..n-1, attribute vertices n..n+N-1,
    as produced by complete_bipartite(n, N); the edges at left vertex v are
    the contiguous index block [v*N, (v+1)*N).
    """
    if n < 1 or N < 1:
        raise ValidationError(f"need n, N >= 1, got ({n}, {N})")
    mu = list(mu)
    if len(mu) != N + 1:
        raise BadDistribution(f"mu must have {N + 1} entries, got {len(mu)}")
    if any(x < 0 for x in mu):
        raise BadDistribution("mu has negative entries")
    total = sum(mu)
    if _is_exact(total):
        if total != 1:
            raise BadDistribution(f"mu sums to {total}, expected exactly 1")
    elif abs(float(total) - 1.0) > WEIGHT_SUM_TOL:
        raise BadDistribution(f"mu sums to {float(total)!r}, expected 1")

    m = n * N
    star_masks = [((1 << N) - 1) << (v * N) for v in range(n)]
    masses = {star_masks[v]: (Fraction(1, n) if all(map(_is_exact, mu)) else 1.0 / n) for v in range(n)}

    if mode == "lazy":
        sizes = np.arange(N + 1)
        size_probs = np.array([float(x) for x in mu])
        size_probs = size_probs / size_probs.sum()

        def sample(rng: np.random.Generator) -> Edit:
            v = int(rng.integers(n))
            k = int(rng.choice(sizes, p=size_probs))
            chosen = rng.choice(N, size=k, replace=False)
            plus = 0
            for u in chosen:
                plus |= 1 << (v * N + int(u))
            return Edit(m, plus, star_masks[v] & ~plus)

        def weight_of(edit: Edit) -> float:
            k = edit.plus.bit_count()
            return float(mu[k]) / (n * math.comb(N, k))

        return WeightedEdits(m, (), LazySpec(sample, masses, weight_of))

    if mode != "explicit":
        raise ValidationError(f"mode must be 'explicit' or 'lazy', got {mode!r}")
    if n * (1 << N) > cap:
        raise CapExceeded(
            f"{n}*2^{N} explicit edits exceed cap {cap}; use mode='lazy'"
        )
    items: list[tuple[Edit, object]] = []
    for v in range(n):
        star = star_masks[v]
        for a in range(1 << N):
            plus = 0
            for u in range(N):
                if a >> u & 1:
                    plus |= 1 << (v * N + u)
            k = a.bit_count()
            if _is_exact(mu[k]):
                w = Fraction(mu[k], n * math.comb(N, k))
            else:
                w = float(mu[k]) / (n * math.comb(N, k))
            if w == 0:
                continue
            items.append((Edit(m, plus, star & ~plus), w))
    return WeightedEdits(m, tuple(items))


def intersection_host(n: int, N: int) -> HostGraph:
    """The host graph paired with intersection_weights(n, N, ...)."""
    return complete_bipartite(n, N)


def intersection_stationary(n: int, N: int, mu: Sequence) -> np.ndarray:
    """Closed-form stationary law of the neighborhood-reassignment chain,
    as a vector over all 2^(nN) states in ascending mask order.

    Each left vertex's neighborhood is independent with P(A) = mu(|A|)/C(N,|A|).
    """
    m = n * N
    if m > EMPIRICAL_EDGE_CAP:
        raise CapExceeded(f"2^{m} states exceed the enumeration cap")
    pi = np.ones(1 << m)
    for state in range(1 << m):
        prob = 1.0
        for v in range(n):
            k = (state >> (v * N) & ((1 << N) - 1)).bit_count()
            prob *= float(mu[k]) / math.comb(N, k)
        pi[state] = prob
    return pi


@dataclass(frozen=True)
class Trajectory:
    """Thinned record of a simulated walk, reproducible from its seed."""

    initial: EdgeSet
    states: tuple[EdgeSet, ...]
    seed: int
    steps: int
    thin: int = 1

    def edge_counts(self) -> list[int]:
        return [len(s) for s in self.states]


def make_rng(seed: int, stream: int | None = None) -> np.random.Generator:
    """Deterministic generator; independent chains pass distinct streams."""
    return np.random.default_rng(seed if stream is None else [seed, stream])


def step(dist: WeightedEdits, state: EdgeSet, rng: np.random.Generator) -> EdgeSet:
    """Draw one edit by its weight and apply it."""
    return apply(dist.sample(rng), state)


def simulate(
    dist: WeightedEdits,
    initial: EdgeSet,
    steps: int,
    seed: int = 0,
    thin: int = 1,
    stream: int | None = None,
) -> Trajectory:
    """Run the walk for `steps` edits, recording every `thin`-th state.

    The initial state is always recorded, and so is the final state even
    when `steps` is not a multiple of `thin`.
    """
    if steps < 0:
        raise ValidationError(f"step count must be >= 0, got {steps}")
    if thin < 1:
        raise ValidationError(f"thin must be >= 1, got {thin}")
    rng = make_rng(seed, stream)
    snapshots = [initial]
    state = initial
    for t in range(1, steps + 1):
        state = step(dist, state, rng)
        if t % thin == 0 or t == steps:
            snapshots.append(state)
    return Trajectory(initial, tuple(snapshots), seed, steps, thin)


def empirical_distribution(
    dist: WeightedEdits,
    initial: EdgeSet,
    burn_in: int,
    samples: int,
    stride: int = 1,
    seed: int = 0,
) -> np.ndarray:
    """Normalized histogram over all 2^m states from a thinned sample run."""
    m = dist.m
    if m > EMPIRICAL_EDGE_CAP:
        raise CapExceeded(f"2^{m} histogram bins exceed the cap of 2^{EMPIRICAL_EDGE_CAP}")
    if samples <= 0:
        raise ValidationError(f"need at least one sample, got {samples}")
    if burn_in < 0 or stride < 1:
        raise ValidationError("burn_in must be >= 0 and stride >= 1")
    rng = make_rng(seed)
    state = initial
    for _ in range(burn_in):
        state = step(dist, state, rng)
    hist = np.zeros(1 << m)
    for _ in range(samples):
        for _ in range(stride):
            state = step(dist, state, rng)
        hist[state.mask] += 1
    return hist / samples


def erdos_renyi_probabilities(g: HostGraph, p) -> list:
    """Uniform edge probability, one value per host edge."""
    if not 0 < p < 1:
        raise ProbabilityOutOfRange(f"p = {p} is outside (0, 1)")
    return [p] * g.m


def chung_lu_probabilities(g: HostGraph, expected_degrees: Sequence) -> list:
    """Expected-degree model: p_uv = k_u k_v / sum(k), per host edge.

    Requires max(k)^2 <= sum(k) so every probability stays at most 1.
    """
    k = list(expected_degrees)
    if len(k) != g.n:
        raise ValidationError(f"expected {g.n} degrees, got {len(k)}")
    total = sum(k)
    if total <= 0 or any(x <= 0 for x in k):
        raise ValidationError("expected degrees must be positive")
    if max(k) * max(k) > total:
        raise ProbabilityOutOfRange(
            "max expected degree exceeds sqrt(sum of degrees)"
        )
    probs = []
    for u, v in g.edges:
        pe = k[u] * k[v] / total if not (_is_exact(k[u]) and _is_exact(k[v]) and _is_exact(total)) else Fraction(k[u] * k[v], total)
        if not 0 < pe < 1:
            raise ProbabilityOutOfRange(f"p[{u},{v}] = {pe} is outside (0, 1)")
        probs.append(pe)
    return probs


def block_probabilities(g: HostGraph, block: Iterable[int], p_in, p_out) -> list:
    """Two-block model: probability p_in inside a block, p_out across."""
    members = set(block)
    if not members or members == set(range(g.n)):
        raise ValidationError("block must be a proper non-empty vertex subset")
    if not members <= set(range(g.n)):
        raise ValidationError("block contains vertices outside the host")
    for value in (p_in, p_out):
        if not 0 < value < 1:
            raise ProbabilityOutOfRange(f"probability {value} is outside (0, 1)")
    return [
        p_in if ((u in members) == (v in members)) else p_out for u, v in g.edges
    ]
