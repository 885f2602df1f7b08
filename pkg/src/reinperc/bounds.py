"""Closed-form bounds with certified series tails.

Every series evaluator returns the partial sum together with a tail bound
that is proved by comparison with a geometric series; callers can demand
certification rather than trusting a fixed cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .environment import MomentFunctions, PhiGrowth, l0_candidates, phi_floor_level
from .graphs import GraphSpec, ball_count, count_box_edges  # noqa: F401


class CertificationError(ValueError):
    """A requested tail certificate could not be established."""


@dataclass(frozen=True)
class SeriesValue:
    value: float
    tail: float
    cutoff: int
    certified: bool


_REL_TOL = 1e-12


def crude_growth_constant(spec: GraphSpec) -> float:
    """log(max degree + 1): every ball grows at most this fast per step."""
    return math.log(spec.max_degree + 1)


def layer_size_bound(n: int, mf: MomentFunctions, c_G: float) -> float:
    """Upper bound exp(c_G * g(2n)) on the count of radius-profiles a
    distance-n layer can contribute."""
    if n < 0:
        raise ValueError("n must be >= 0")
    return math.exp(c_G * mf.g(2 * n))


def entropy_series(n0: int, c: float, c_G: float, mf: MomentFunctions,
                   cutoff: int = 100_000) -> SeriesValue:
    """Square of sum_{n >= ceil(n0/2)} exp(c_G g(2n) - c n), tail certified.

    Certification: beyond N = certified_ratio_from(c / (4 c_G)) every
    argument m >= N has g(m) <= c m / (4 c_G), so for 2n >= N each term is
    at most e^{-c n / 2} and the tail is dominated by a geometric series
    with ratio e^{-c/2}.
    """
    if n0 < 1:
        raise ValueError("n0 must be >= 1")
    if c <= 0 or c_G <= 0:
        raise ValueError("c and c_G must be positive")
    start = (n0 + 1) // 2
    n_flat = mf.certified_ratio_from(c / (4.0 * c_G))
    ratio = math.exp(-c / 2.0)
    terms = []
    n = start
    while n <= cutoff:
        terms.append(math.exp(c_G * mf.g(2 * n) - c * n))
        if 2 * n >= n_flat:
            env_tail = math.exp(-c * (n + 1) / 2.0) / (1.0 - ratio)
            partial = math.fsum(terms)
            if env_tail <= _REL_TOL * partial:
                inner = partial + env_tail
                return SeriesValue(inner * inner, env_tail, n, True)
        n += 1
    raise CertificationError(
        f"series tail not certified within cutoff={cutoff}")


def find_n0(c: float, c_G: float, mf: MomentFunctions,
            max_n: int = 10_000) -> int:
    """Smallest n0 with entropy_series(n0) <= 1/2.

    The series value is nonincreasing in n0 (dropping positive terms), so a
    scan from 1 returns the true minimum.
    """
    for n0 in range(1, max_n + 1):
        if entropy_series(n0, c, c_G, mf).value <= 0.5:
            return n0
    raise CertificationError(f"no n0 <= {max_n} brings the series below 1/2")


def stack_series(phi: PhiGrowth, c: float, L: int, spec: GraphSpec,
                 cutoff: int = 100_000) -> SeriesValue:
    """sum_{n>=1} |B(phi^{-1}(n+L))| e^{-c n} with a certified envelope tail.

    The generalized inverse satisfies phi(phi^{-1}(y)) <= y, which unwinds
    to |B(phi^{-1}(y))| <= e^{alpha y} with alpha = phi.alpha, so
    term_n <= e^{alpha (n+L) - c n}.  Certification needs alpha < c.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    alpha = phi.alpha
    if alpha >= c:
        raise CertificationError(
            f"envelope rate {alpha:.4f} >= decay rate {c:.4f}: tail unbounded")
    terms = []
    n = 1
    while n <= cutoff:
        r = phi.inv(n + L)
        t = math.exp(math.log(ball_count(spec, r)) - c * n)
        terms.append(t)
        env_tail = (math.exp(alpha * (n + 1 + L) - c * (n + 1))
                    / (1.0 - math.exp(alpha - c)))
        if env_tail <= _REL_TOL * math.fsum(terms):
            return SeriesValue(math.fsum(terms) + env_tail, env_tail, n, True)
        n += 1
    raise CertificationError(f"stack series tail not certified by cutoff={cutoff}")


def disconnection_lower_bound(q: float, edge_count: int) -> float:
    """(1/2) (1-q)^edge_count: close every edge of a box, pay for one
    conditioning event of probability at least 1/2."""
    if not 0.0 <= q < 1.0:
        raise ValueError("q must lie in [0, 1)")
    if edge_count < 0:
        raise ValueError("edge_count must be >= 0")
    return 0.5 * (1.0 - q) ** edge_count


@dataclass(frozen=True)
class L0Certificate:
    l0: int
    series_value: float
    prob_mass: float
    check_value: float       # e^{-2 c l0} * S^2, must be <= 1/2
    previous_failed: bool    # l0 - 1 violated one of the two conditions


def find_l0(dist, phi: PhiGrowth, c: float, spec: GraphSpec,
            min_mass: float = 0.05, max_m: int = 10_000) -> L0Certificate:
    """Minimal candidate l0 with e^{-2 c l0} S^2 <= 1/2 and
    P(l0 <= X <= 2 l0) >= min_mass, where S is the stack series.

    Both conditions are re-verified at l0 and checked to fail at the
    previous candidate (or l0 is the first candidate).
    """
    L = phi_floor_level(dist, phi)
    s = stack_series(phi, c, L, spec)
    smax = dist.support_max()
    cands = l0_candidates(dist, max_m if smax is None else None)
    if not cands:
        raise CertificationError("distribution support yields no candidates")
    ssq = s.value * s.value
    chosen = None
    for l0 in cands:
        check = math.exp(-2.0 * c * l0) * ssq
        mass = dist.prob_range(l0, 2 * l0)
        if check <= 0.5 and mass >= min_mass:
            chosen = l0
            break
    if chosen is None:
        raise CertificationError(
            f"no candidate l0 <= {max_m} satisfies both conditions")
    check = math.exp(-2.0 * c * chosen) * ssq
    mass = dist.prob_range(chosen, 2 * chosen)
    assert check <= 0.5 and mass >= min_mass
    prev_failed = True
    prev = [x for x in cands if x < chosen]
    if prev:
        pl = prev[-1]
        prev_failed = (math.exp(-2.0 * c * pl) * ssq > 0.5
                       or dist.prob_range(pl, 2 * pl) < min_mass)
    return L0Certificate(chosen, s.value, mass, check, prev_failed)


class FlatPhi:
    """Degenerate profile phi == 0: inverse is identically 0, growth rate 0.

    Turns the stack series into the geometric sum 1/(1 - e^{-c}), useful as
    a closed-form identity check.
    """

    alpha = 0.0

    def inv(self, m, cap=None) -> int:
        return 0

    def __call__(self, r: int) -> float:
        return 0.0
