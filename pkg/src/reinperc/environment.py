"""Random radius sequences, reinforced regions, cones and growth functions.

Two region models over a window of G x Z:

  overlap  R = union of boxes B(n, X_n), one box centered at every height n
           of the origin axis;
  stack    R = union of boxes B(Z(n), X_n) whose centers Z(n) are chosen so
           consecutive boxes touch: Z(0) = 0 and, for n >= 1,
           Z(n) = X_0 + 2*(X_1 + ... + X_{n-1}) + X_n, mirrored for n <= -1.

Radii are sampled per index from a counter-based stream, so X_n is a pure
function of (distribution, env_seed, n): enlarging the index range or the
window never changes already-sampled values.

The module also provides the slow-growth machinery used by the bounds and
classifiers: a constructive pair (f, g) with E[X f(X)] < infinity and
g = generalized inverse of x*f(x), and the ball-growth profile phi with its
integer inverse.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .graphs import Box, GraphSpec, Window, ball_count, base_distance
from .rng import token_key, uniforms_for_indices

_RADIUS_STREAM = token_key("radius-stream")


class RegionRangeError(ValueError):
    """Environment's index range cannot cover every box meeting the window."""


OVERLAP = "overlap"
STACK = "stack"
MODELS = (OVERLAP, STACK)

# Index margin for unbounded radii: beyond the 2^-60 quantile the chance that
# any excluded box could have reached the window is negligible (< 2^-40 for
# any practical window); bounded laws use their exact support maximum.
_TAIL_EXPONENT = 60


# ------------------------------------------------------------- distributions

@dataclass(frozen=True)
class Constant:
    value: int

    def __post_init__(self):
        if self.value < 1:
            raise ValueError("constant radius must be >= 1")

    def mean(self) -> float:
        return float(self.value)

    def mean_is_finite(self) -> bool:
        return True

    def support_min(self) -> int:
        return self.value

    def support_max(self):
        return self.value

    def tail_mean(self, a: int) -> float:
        """E[X 1{X >= a}]."""
        return float(self.value) if a <= self.value else 0.0

    def prob_range(self, lo: int, hi: int) -> float:
        return 1.0 if lo <= self.value <= hi else 0.0

    def prob_ge(self, k: int) -> float:
        return 1.0 if k <= self.value else 0.0

    def index_margin(self) -> int:
        return self.value

    def sample(self, u: np.ndarray) -> np.ndarray:
        return np.full(u.shape, self.value, dtype=np.int64)


@dataclass(frozen=True)
class Geometric:
    """P(X = k) = theta (1-theta)^(k-1) on {1, 2, ...}."""

    theta: float

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ValueError("theta must be in (0, 1]")

    def mean(self) -> float:
        return 1.0 / self.theta

    def mean_is_finite(self) -> bool:
        return True

    def support_min(self) -> int:
        return 1

    def support_max(self):
        return 1 if self.theta == 1.0 else None

    def tail_mean(self, a: int) -> float:
        # sum_{k>=a} k theta (1-theta)^(k-1) = (1-theta)^(a-1) (a + (1-theta)/theta)
        if a <= 1:
            return self.mean()
        x = 1.0 - self.theta
        return x ** (a - 1) * (a + x / self.theta)

    def prob_range(self, lo: int, hi: int) -> float:
        lo = max(lo, 1)
        if hi < lo:
            return 0.0
        x = 1.0 - self.theta
        return x ** (lo - 1) - x ** hi

    def prob_ge(self, k: int) -> float:
        return 1.0 if k <= 1 else (1.0 - self.theta) ** (k - 1)

    def index_margin(self) -> int:
        if self.theta == 1.0:
            return 1
        return 1 + math.ceil(_TAIL_EXPONENT * math.log(2) / -math.log1p(-self.theta))

    def sample(self, u: np.ndarray) -> np.ndarray:
        if self.theta == 1.0:
            return np.ones(u.shape, dtype=np.int64)
        # P(X > k) = (1-theta)^k; inverse CDF on u in [0,1)
        return 1 + np.floor(np.log1p(-u) / math.log1p(-self.theta)).astype(np.int64)


@lru_cache(maxsize=8)
def _power_tables(exponent: float, cap: int):
    k = np.arange(1, cap + 1, dtype=np.float64)
    mass = k ** -exponent
    total = mass.sum()
    pmf = mass / total
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    # suffix sums of k*pmf for exact truncated tail means
    xmass_rev = np.cumsum((k * pmf)[::-1])[::-1]
    return cdf, xmass_rev


@dataclass(frozen=True)
class PowerTail:
    """P(X = k) proportional to k^-exponent on {1, ..., cap}.

    The cap keeps inverse-CDF sampling exact; the idealized uncapped law has
    finite mean only for exponent > 2, which is what mean_is_finite reports
    (the truncated table always has a finite mean numerically).
    """

    exponent: float
    cap: int = 10 ** 6

    def __post_init__(self):
        if self.exponent <= 1.0:
            raise ValueError("exponent must be > 1")
        if self.cap < 1:
            raise ValueError("cap must be >= 1")

    def mean(self) -> float:
        _, xmass = _power_tables(self.exponent, self.cap)
        return float(xmass[0])

    def mean_is_finite(self) -> bool:
        return self.exponent > 2.0

    def support_min(self) -> int:
        return 1

    def support_max(self):
        return self.cap

    def tail_mean(self, a: int) -> float:
        if a <= 1:
            return self.mean()
        if a > self.cap:
            return 0.0
        _, xmass = _power_tables(self.exponent, self.cap)
        return float(xmass[a - 1])

    def prob_range(self, lo: int, hi: int) -> float:
        lo, hi = max(lo, 1), min(hi, self.cap)
        if hi < lo:
            return 0.0
        cdf, _ = _power_tables(self.exponent, self.cap)
        low = cdf[lo - 2] if lo >= 2 else 0.0
        return float(cdf[hi - 1] - low)

    def prob_ge(self, k: int) -> float:
        if k <= 1:
            return 1.0
        if k > self.cap:
            return 0.0
        cdf, _ = _power_tables(self.exponent, self.cap)
        return float(1.0 - cdf[k - 2])

    def index_margin(self) -> int:
        return self.cap

    def sample(self, u: np.ndarray) -> np.ndarray:
        cdf, _ = _power_tables(self.exponent, self.cap)
        return np.searchsorted(cdf, u, side="right").astype(np.int64) + 1


def mean_radius(dist) -> float:
    return dist.mean()


def mean_is_finite(dist) -> bool:
    return dist.mean_is_finite()


# -------------------------------------------------------------- environments

@dataclass(frozen=True, eq=False)
class Environment:
    """A realized radius sequence X_n over a contiguous index range."""

    model: str
    dist: object
    env_seed: int
    lo: int
    hi: int
    radii: np.ndarray

    def __post_init__(self):
        if self.model not in (OVERLAP, STACK):
            raise ValueError(f"unknown model {self.model!r}")
        if self.radii.shape[0] != self.hi - self.lo + 1:
            raise ValueError("radii array does not match index range")

    def radius(self, n: int) -> int:
        if not self.lo <= n <= self.hi:
            raise IndexError(f"index {n} outside sampled range [{self.lo}, {self.hi}]")
        return int(self.radii[n - self.lo])

    def indices(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1, dtype=np.int64)

    def stack_centers(self) -> np.ndarray:
        """Z(n) for every sampled n; Z(0)=0, consecutive boxes touch."""
        if self.model != STACK:
            raise ValueError("stack centers are defined for stack environments")
        if self.lo > 0 or self.hi < 0:
            raise ValueError("stack environment must include index 0")
        r = self.radii
        i0 = -self.lo
        z = np.zeros_like(r)
        if self.hi >= 1:
            x0 = r[i0]
            up = r[i0 + 1:]
            csum = np.cumsum(up)
            z[i0 + 1:] = x0 + 2 * csum - up
        if self.lo <= -1:
            x0 = r[i0]
            down = r[i0 - 1::-1]
            csum = np.cumsum(down)
            z[i0 - 1::-1] = -(x0 + 2 * csum - down)
        return z


def sample_radii(dist, lo: int, hi: int, env_seed: int) -> np.ndarray:
    """X_n for n in [lo, hi]; each index is keyed independently."""
    if lo > hi:
        raise ValueError("empty index range")
    idx = np.arange(lo, hi + 1, dtype=np.int64)
    u = uniforms_for_indices(idx, env_seed ^ _RADIUS_STREAM)
    return dist.sample(u)


def sample_environment(dist, model: str, w: Window, env_seed: int) -> Environment:
    """Sample an environment whose index range surely covers the window.

    Overlap: indices [-H-M, H+M] where M is the distribution's index margin.
    Stack: extend outward from 0 until the running box clears the window top
    (and bottom), which is exact because stack boxes are vertically ordered.
    """
    H = w.height
    if model == OVERLAP:
        n = H + dist.index_margin()
        return Environment(OVERLAP, dist, env_seed, -n, n, sample_radii(dist, -n, n, env_seed))
    if model != STACK:
        raise ValueError(f"unknown model {model!r}")
    span = max(4, H // max(1, int(dist.mean())))
    while True:
        radii = sample_radii(dist, -span, span, env_seed)
        env = Environment(STACK, dist, env_seed, -span, span, radii)
        z = env.stack_centers()
        if (z[-1] - radii[-1] > H) and (z[0] + radii[0] < -H):
            return env
        span *= 2


def dump_environment_text(env: Environment) -> str:
    """Flat 'index radius' table, one line per sampled index."""
    lines = [f"{n} {env.radius(n)}" for n in range(env.lo, env.hi + 1)]
    return "\n".join(lines) + "\n"


def load_environment_text(text: str, model: str, dist, env_seed: int = 0) -> Environment:
    pairs = []
    for line in text.strip().splitlines():
        n, r = line.split()
        pairs.append((int(n), int(r)))
    pairs.sort()
    lo, hi = pairs[0][0], pairs[-1][0]
    if [n for n, _ in pairs] != list(range(lo, hi + 1)):
        raise ValueError("environment table must cover a contiguous index range")
    radii = np.array([r for _, r in pairs], dtype=np.int64)
    return Environment(model, dist, env_seed, lo, hi, radii)


# -------------------------------------------------------------------- region

@dataclass(eq=False)
class Region:
    """Union of boxes, reduced to a per-height covering radius profile.

    felt[h + H] is the largest box radius covering height h (-1 if none), so
    vertex membership is a single comparison: d_G(0, v) <= felt[h + H].
    Correct because every box is centered on the origin axis, hence covers a
    full base ball at each height it meets.
    """

    spec: GraphSpec
    window: Window
    model: str
    boxes: tuple
    felt: np.ndarray

    def vertex_in_region(self, v) -> bool:
        base, h = v
        if abs(h) > self.window.height:
            raise ValueError(f"height {h} outside window")
        r = int(self.felt[h + self.window.height])
        if r < 0:
            return False
        return base_distance(self.spec, self.spec.origin, base) <= r

    def edge_in_region(self, e) -> bool:
        u, v = e
        return self.vertex_in_region(u) and self.vertex_in_region(v)

    def vertex_mask(self, wg) -> np.ndarray:
        return wg.vertex_dist <= self.felt[wg.vertex_height + self.window.height]

    def edge_mask(self, wg) -> np.ndarray:
        vm = self.vertex_mask(wg)
        return vm[wg.eu] & vm[wg.ev]

    def coverage_fraction(self) -> float:
        """Exact fraction of window vertices lying in the region."""
        rho = self.window.base_radius
        total = ball_count(self.spec, rho) * (2 * self.window.height + 1)
        covered = sum(
            ball_count(self.spec, min(int(r), rho)) for r in self.felt if r >= 0
        )
        return covered / total


def build_region(env: Environment, spec: GraphSpec, w: Window) -> Region:
    H = w.height
    felt = np.full(2 * H + 1, -1, dtype=np.int64)
    boxes = []
    if env.model == OVERLAP:
        need = H + env.dist.index_margin()
        if env.lo > -need or env.hi < need:
            raise RegionRangeError(
                f"overlap region needs radii on [-{need}, {need}], "
                f"environment covers [{env.lo}, {env.hi}]"
            )
        idx = env.indices()
        rad = env.radii
        relevant = np.abs(idx) - rad <= H
        for n, r in zip(idx[relevant], rad[relevant]):
            n, r = int(n), int(r)
            boxes.append(Box(spec.origin, n, r))
            a, b = max(n - r, -H), min(n + r, H)
            seg = felt[a + H : b + H + 1]
            np.maximum(seg, r, out=seg)
    else:
        z = env.stack_centers()
        idx = env.indices()
        rad = env.radii
        if not (z[-1] - rad[-1] > H and z[0] + rad[0] < -H):
            raise RegionRangeError(
                f"stack environment [{env.lo}, {env.hi}] does not clear the "
                f"window heights [-{H}, {H}]; extend the index range"
            )
        relevant = (z - rad <= H) & (z + rad >= -H)
        for n, zc, r in zip(idx[relevant], z[relevant], rad[relevant]):
            n, zc, r = int(n), int(zc), int(r)
            boxes.append(Box(spec.origin, zc, r))
            a, b = max(zc - r, -H), min(zc + r, H)
            seg = felt[a + H : b + H + 1]
            np.maximum(seg, r, out=seg)
    return Region(spec, w, env.model, tuple(boxes), felt)


def empty_region(spec: GraphSpec, w: Window) -> Region:
    """Region covering nothing: homogeneous percolation at parameter p."""
    felt = np.full(2 * w.height + 1, -1, dtype=np.int64)
    return Region(spec, w, OVERLAP, (), felt)


def vertex_in_region(region: Region, v) -> bool:
    return region.vertex_in_region(v)


def edge_in_region(region: Region, e) -> bool:
    return region.edge_in_region(e)


# ----------------------------------------------------------- moment functions

class MomentFunctions:
    """Constructive slow-growth pair (f, g) for a finite-mean radius law.

    Block thresholds: a_{k+1} is the smallest integer a with
    E[X 1{X >= a}] <= 2^-(k+1) E[X], forced strictly increasing; f(x) counts
    thresholds <= x.  Then E[X f(X)] = sum_k E[X 1{X >= a_k}] <= E[X] and f
    is nondecreasing and unbounded.  g(n) = max{x : x f(x) <= n} so that
    g(n)/n -> 0.  Thresholds are extended lazily and cached.
    """

    def __init__(self, dist):
        if not dist.mean_is_finite():
            raise ValueError(
                "moment functions require a finite-mean radius distribution"
            )
        self.dist = dist
        self._mean = dist.mean()
        self._thresholds: list[int] = []

    def _extend(self, k: int) -> None:
        while len(self._thresholds) < k:
            j = len(self._thresholds) + 1
            target = self._mean * 2.0 ** -j
            lo = self._thresholds[-1] + 1 if self._thresholds else 1
            hi = lo
            while self.dist.tail_mean(hi) > target:
                hi *= 2
            while lo < hi:
                mid = (lo + hi) // 2
                if self.dist.tail_mean(mid) <= target:
                    hi = mid
                else:
                    lo = mid + 1
            self._thresholds.append(lo)

    def threshold(self, k: int) -> int:
        """a_k, the smallest x with f(x) >= k (k >= 1)."""
        self._extend(k)
        return self._thresholds[k - 1]

    def f(self, x: int) -> int:
        if x < 1:
            return 0
        k = len(self._thresholds)
        while not self._thresholds or self._thresholds[-1] <= x:
            k += 8
            self._extend(k)
        return bisect.bisect_right(self._thresholds, x)

    def xf(self, x: int) -> int:
        return x * self.f(x)

    def g(self, n: int) -> int:
        """max{x : x f(x) <= n} (f(x)=0 near 0, so g >= a_1 - 1 always)."""
        if n < 0:
            raise ValueError("g is defined for n >= 0")
        hi = 1
        while self.xf(hi) <= n:
            hi *= 2
        lo = 0
        while lo < hi - 1:
            mid = (lo + hi) // 2
            if self.xf(mid) <= n:
                lo = mid
            else:
                hi = mid
        return lo

    def g_array(self, ns: np.ndarray) -> np.ndarray:
        return np.array([self.g(int(n)) for n in ns], dtype=np.int64)

    def certified_ratio_from(self, eps: float) -> int:
        """Smallest certified N with g(n) <= eps*n for every n >= N.

        If f(floor(eps*n)+1) >= ceil(1/eps) =: k*, then
        (floor(eps*n)+1) f(...) > eps*n*(1/eps) = n, so g(n) <= eps*n.  The
        threshold a_{k*} marks where f reaches k*, giving N = ceil(a_{k*}/eps).
        """
        if not 0.0 < eps < 1.0:
            raise ValueError("eps must be in (0, 1)")
        kstar = math.ceil(1.0 / eps)
        xstar = self.threshold(kstar)
        return math.ceil(xstar / eps)


class ZeroGrowth:
    """Degenerate growth pair g == 0, for closed-form series identities."""

    def g(self, n: int) -> int:
        return 0

    def certified_ratio_from(self, eps: float) -> int:
        return 1


def moment_functions(dist) -> MomentFunctions:
    return MomentFunctions(dist)


# --------------------------------------------------------------- phi profile

class PhiGrowth:
    """phi(n) = (2/c) log |B_G(n)| with integer generalized inverse.

    alpha = c/2 satisfies ball_count(inv(y)) <= exp(alpha*y) by construction,
    which is what certifies the stack series tail.
    """

    def __init__(self, spec: GraphSpec, c: float):
        if c <= 0:
            raise ValueError("decay rate c must be positive")
        self.spec = spec
        self.c = c
        self.alpha = c / 2.0
        self._inv_memo: dict = {}

    def __call__(self, n: int) -> float:
        if n < 0:
            raise ValueError("phi is defined for n >= 0")
        return (2.0 / self.c) * math.log(ball_count(self.spec, n))

    def inv(self, y: float, cap: int | None = None) -> int:
        """max{n >= 0 : phi(n) <= y} (phi(0)=0, so inv(y) >= 0 for y >= 0).

        On lattices the exact inverse grows like e^(c y / 2); callers that
        only compare it against bounded quantities pass `cap` to clamp the
        search (the return value is then min(inverse, cap)).
        """
        if y < 0:
            return -1
        key = (y, cap)
        got = self._inv_memo.get(key)
        if got is not None:
            return got
        if cap is not None and self(cap) <= y:
            self._inv_memo[key] = cap
            return cap
        hi = 1
        while self(hi) <= y:
            hi *= 2
        lo = 0
        while lo < hi - 1:
            mid = (lo + hi) // 2
            if self(mid) <= y:
                lo = mid
            else:
                hi = mid
        if cap is not None:
            lo = min(lo, cap)
        self._inv_memo[key] = lo
        return lo

    def inv_array(self, ys: np.ndarray, cap: int | None = None) -> np.ndarray:
        return np.array([self.inv(float(y), cap=cap) for y in ys], dtype=np.int64)


def phi_for_graph(spec: GraphSpec, c: float) -> PhiGrowth:
    return PhiGrowth(spec, c)


def phi_floor_level(dist, phi: PhiGrowth) -> int:
    """L = min{l integer : P(phi(X) <= l) > 0} = ceil(phi(min support))."""
    return max(0, math.ceil(phi(dist.support_min()) - 1e-12))


def in_l0_set(dist, m: int) -> bool:
    """Whether m belongs to {m >= 1 : P(m <= X <= 2m) > 0}."""
    return m >= 1 and dist.prob_range(m, 2 * m) > 0.0


def l0_candidates(dist, max_m: int | None = None) -> list:
    """Elements of {m >= 1 : P(m <= X <= 2m) > 0} up to max_m.

    For bounded support max_m defaults to the support maximum (the set is
    finite); unbounded laws must pass max_m explicitly.
    """
    smax = dist.support_max()
    if max_m is None:
        if smax is None:
            raise ValueError("unbounded support: pass max_m explicitly")
        max_m = smax
    return [m for m in range(1, max_m + 1) if in_l0_set(dist, m)]


# --------------------------------------------------------------------- cones

@dataclass(frozen=True, eq=False)
class OverlapCone:
    """W+/W-: at |h| >= n0 the layer at height h is the base ball B_G(g(2|h|))."""

    direction: str  # "up" | "down"
    n0: int
    mf: object

    def __post_init__(self):
        if self.direction not in ("up", "down"):
            raise ValueError("direction must be 'up' or 'down'")
        if self.n0 < 1:
            raise ValueError("n0 must be >= 1")

    def radius_profile(self, offset: int) -> int:
        """Base radius of the layer at height n0 + offset (offset >= 0)."""
        return self.mf.g(2 * (self.n0 + offset))

    def contains(self, spec: GraphSpec, v) -> bool:
        base, h = v
        s = h if self.direction == "up" else -h
        if s < self.n0:
            return False
        return base_distance(spec, spec.origin, base) <= self.mf.g(2 * s)

    def mask(self, wg) -> np.ndarray:
        H = wg.window.height
        s = wg.vertex_height if self.direction == "up" else -wg.vertex_height
        prof = np.full(H + 1, -1, dtype=np.int64)
        if self.n0 <= H:
            ns = np.arange(self.n0, H + 1, dtype=np.int64)
            prof[self.n0:] = self.mf.g_array(2 * ns)
        inb = s >= self.n0
        out = np.zeros(wg.n_vertices, dtype=bool)
        out[inb] = wg.vertex_dist[inb] <= prof[s[inb]]
        return out


@dataclass(frozen=True, eq=False)
class StackCone:
    """W+_k / W-_k: offset n from the tip Z(k) +- l0 has radius inv(n+L+1)."""

    direction: str
    anchor_index: int
    anchor_center: int  # Z(k), fixed at construction from the environment
    l0: int
    level: int  # L
    phi: PhiGrowth

    def __post_init__(self):
        if self.direction not in ("up", "down"):
            raise ValueError("direction must be 'up' or 'down'")
        if self.l0 < 1:
            raise ValueError("l0 must be >= 1")

    def tip(self) -> int:
        return self.anchor_center + (self.l0 if self.direction == "up" else -self.l0)

    def radius_profile(self, offset: int) -> int:
        return self.phi.inv(offset + self.level + 1)

    def contains(self, spec: GraphSpec, v) -> bool:
        base, h = v
        off = h - self.tip() if self.direction == "up" else self.tip() - h
        if off < 0:
            return False
        return base_distance(spec, spec.origin, base) <= self.phi.inv(off + self.level + 1)

    def mask(self, wg) -> np.ndarray:
        H = wg.window.height
        h = wg.vertex_height
        off = h - self.tip() if self.direction == "up" else self.tip() - h
        inb = off >= 0
        out = np.zeros(wg.n_vertices, dtype=bool)
        if not inb.any():
            return out
        rho = wg.window.base_radius
        offs = np.arange(0, 2 * H + 1, dtype=np.int64)
        prof = self.phi.inv_array(offs + self.level + 1, cap=rho + 1)
        out[inb] = wg.vertex_dist[inb] <= prof[off[inb]]
        return out


def make_overlap_cones(mf: MomentFunctions, n0: int):
    return OverlapCone("up", n0, mf), OverlapCone("down", n0, mf)


def make_stack_cones(env: Environment, phi: PhiGrowth, k: int, l0: int, level: int):
    z = env.stack_centers()
    zc = int(z[k - env.lo])
    up = StackCone("up", k, zc, l0, level, phi)
    down = StackCone("down", k, zc, l0, level, phi)
    return up, down


def cone_membership(cone, aux, v, spec: GraphSpec | None = None) -> bool:
    """Membership per the cone's layer rule.

    `aux` is the mf (overlap) or phi (stack) of the op signature; cones carry
    their own, so None defers to the stored one.  `spec` defaults to the
    stored phi's graph for stack cones and must be given for overlap cones
    when base vertices are nontrivial.
    """
    if isinstance(cone, OverlapCone):
        c = cone if aux is None or aux is cone.mf else OverlapCone(cone.direction, cone.n0, aux)
        if spec is None:
            raise ValueError("overlap cone membership needs the graph spec")
        return c.contains(spec, v)
    if isinstance(cone, StackCone):
        phi = cone.phi if aux is None else aux
        c = StackCone(cone.direction, cone.anchor_index, cone.anchor_center, cone.l0, cone.level, phi)
        return c.contains(spec if spec is not None else phi.spec, v)
    raise TypeError(f"not a cone: {cone!r}")


# ----------------------------------------------------------------- classifiers

def classify_good_environment(env: Environment, mf: MomentFunctions, n0: int) -> bool:
    """Window-truncated good-environment test over the sampled index range.

    Conditions: X_n <= g(n) and X_{-n} <= g(n) for all n >= 2 n0 in range,
    and X_n <= g(2 n0) for |n| < 2 n0.  Precondition g(n) < n/2 for all
    n >= n0 is checked over the range (certified beyond it).
    """
    if env.model != OVERLAP:
        raise ValueError("good environments are defined for the overlap model")
    if n0 < 1:
        raise ValueError("n0 must be >= 1")
    top = max(abs(env.lo), env.hi)
    ncert = mf.certified_ratio_from(0.49)
    for n in range(n0, min(top, ncert) + 1):
        if not mf.g(n) < n / 2:
            raise ValueError(f"g({n}) = {mf.g(n)} is not < {n}/2; n0 too small")
    g2n0 = mf.g(2 * n0)
    idx = env.indices()
    rad = env.radii
    near = np.abs(idx) < 2 * n0
    if np.any(rad[near] > g2n0):
        return False
    far = ~near
    gvals = mf.g_array(np.abs(idx[far]))
    return bool(np.all(rad[far] <= gvals))


def stack_event_Ak(env: Environment, phi: PhiGrowth, k: int, l0: int, level: int) -> bool:
    """A_k: l0 <= X_k <= 2 l0, and X_{k +- j} <= phi^{-1}(j + L) for j >= 1 in range."""
    if env.model != STACK:
        raise ValueError("A_k is defined for the stack model")
    if env.dist.prob_range(l0, 2 * l0) <= 0.0:
        raise ValueError(f"l0={l0} has P(l0 <= X <= 2 l0) = 0")
    xk = env.radius(k)
    if not l0 <= xk <= 2 * l0:
        return False
    jmax = max(env.hi - k, k - env.lo)
    if jmax >= 1:
        cap = int(env.radii.max()) + 1
        prof = phi.inv_array(np.arange(1, jmax + 1, dtype=np.int64) + level, cap=cap)
        for j in range(1, jmax + 1):
            thr = prof[j - 1]
            if k + j <= env.hi and env.radius(k + j) > thr:
                return False
            if k - j >= env.lo and env.radius(k - j) > thr:
                return False
    return True


def stack_anchor_indices(env: Environment, phi: PhiGrowth, l0: int, level: int,
                         w: Window) -> np.ndarray:
    """Indices k >= 1 with A_k true and both cone tips inside the window."""
    if env.dist.prob_range(l0, 2 * l0) <= 0.0:
        raise ValueError(f"l0={l0} has P(l0 <= X <= 2 l0) = 0")
    z = env.stack_centers()
    rad = env.radii
    span = env.hi - env.lo
    cap = int(rad.max()) + 1
    prof = phi.inv_array(np.arange(1, span + 1, dtype=np.int64) + level, cap=cap)
    usable = []
    for k in range(max(1, env.lo), env.hi + 1):
        i = k - env.lo
        zc = int(z[i])
        if zc + l0 > w.height or zc - l0 < -w.height:
            continue
        if not l0 <= rad[i] <= 2 * l0:
            continue
        jup = env.hi - k
        if jup >= 1 and np.any(rad[i + 1:] > prof[:jup]):
            continue
        jdn = k - env.lo
        if jdn >= 1 and np.any(rad[i - 1::-1] > prof[:jdn]):
            continue
        usable.append(k)
    return np.array(usable, dtype=np.int64)
