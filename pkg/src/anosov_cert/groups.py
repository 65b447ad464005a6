"""Concrete group models, word enumeration and desk-scale Morse verification.

Two models live in SL(3, R), both inside the block copy of SL(2, R) acting
on coordinates 1 and 3 (a totally geodesic hyperbolic plane of curvature
-1/3 through the identity):

* the free group generated by ``diag(e^t, 1, e^-t)`` and the matching
  hyperbolic rotation with ``tanh t = T``;
* a genus-2 surface group generated by four conjugated diagonal matrices,
  the side pairings of a regular octagon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from anosov_cert.l2g import MorseQIParams, StraightSpacedParams
from anosov_cert.numeric import tolerances
from anosov_cert.symspace import (
    GeometryError,
    GroupElement,
    ModelConstants,
    SpdPoint,
    cartan_vector,
    killing_norm,
    zeta_angle,
)

KEY_DIGITS = 9

Word = tuple[int, ...]


@dataclass(frozen=True)
class Generator:
    label: str
    element: GroupElement
    inverse: int  # index of the inverse generator


@dataclass(frozen=True)
class GroupModel:
    """A finitely generated matrix group with a symmetric generating set.

    ``kind`` selects the word enumeration: ``"free"`` lists freely reduced
    words (geodesics in a free group), ``"cayley"`` runs a breadth-first
    search with element deduplication, so each element is reached once
    along a geodesic of the Cayley graph.
    """

    name: str
    generators: tuple[Generator, ...]
    kind: str = "cayley"
    relators: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("free", "cayley"):
            raise ValueError(f"unknown enumeration kind {self.kind!r}")
        d = self.generators[0].element.d
        for i, gen in enumerate(self.generators):
            if gen.element.d != d:
                raise ValueError("generators have different sizes")
            if element_key(gen.element.entries) == element_key(np.eye(d)):
                raise ValueError(f"generator {gen.label} is the identity")
            partner = self.generators[gen.inverse]
            if partner.inverse != i or not same_element(gen.element.entries @ partner.element.entries, np.eye(d)):
                raise ValueError(f"generator {gen.label} is not paired with its inverse")

    @property
    def d(self) -> int:
        return self.generators[0].element.d

    @property
    def labels(self) -> list[str]:
        return [g.label for g in self.generators]

    def word_label(self, word: Sequence[int]) -> str:
        return "".join(self.generators[i].label for i in word) or "1"

    def parse_word(self, text: str) -> Word:
        lookup = {g.label: i for i, g in enumerate(self.generators)}
        return tuple(lookup[c] for c in text)

    def evaluate(self, word: Sequence[int]) -> np.ndarray:
        m = np.eye(self.d)
        for i in word:
            m = m @ self.generators[i].element.entries
        return m

    def maximal_words(self, max_len: int) -> list[Word]:
        """Words whose prefixes cover every enumerated geodesic of length <= max_len."""
        if max_len < 0:
            raise ValueError("max_len must be nonnegative")
        if self.kind == "free":
            return list(reduced_words(self, max_len))
        return bfs_leaves(self, max_len)


def element_key(m: np.ndarray) -> tuple:
    """Canonical key: entries rounded to 9 decimals after fixing the overall sign."""
    flat = np.asarray(m, dtype=float).ravel()
    nz = np.flatnonzero(np.abs(flat) > 10.0**-KEY_DIGITS)
    if nz.size and flat[nz[0]] < 0:
        flat = -flat
    return tuple(np.round(flat, KEY_DIGITS) + 0.0)


def same_element(a: np.ndarray, b: np.ndarray) -> bool:
    return element_key(a) == element_key(b)


def reduced_words(model: GroupModel, n: int, prefix: Word = ()) -> Iterator[Word]:
    """Freely reduced words of length exactly n extending ``prefix``, in lexicographic order.

    Partitioning by prefix lets callers split the enumeration; the union over
    all one-letter prefixes equals the full enumeration.
    """
    if len(prefix) > n:
        return
    if len(prefix) == n:
        yield tuple(prefix)
        return
    last = prefix[-1] if prefix else None
    for i, gen in enumerate(model.generators):
        if last is not None and model.generators[last].inverse == i:
            continue
        yield from reduced_words(model, n, (*prefix, i))


def bfs_tree(model: GroupModel, max_len: int) -> dict[tuple, Word]:
    """Map element key -> one geodesic word, for all elements within word length max_len."""
    d = model.d
    seen: dict[tuple, Word] = {element_key(np.eye(d)): ()}
    frontier = [((), np.eye(d))]
    for _ in range(max_len):
        nxt = []
        for word, m in frontier:
            for i, gen in enumerate(model.generators):
                prod = m @ gen.element.entries
                key = element_key(prod)
                if key not in seen:
                    seen[key] = (*word, i)
                    nxt.append(((*word, i), prod))
        frontier = nxt
    return seen


def bfs_leaves(model: GroupModel, max_len: int) -> list[Word]:
    words = sorted(bfs_tree(model, max_len).values(), key=lambda w: (len(w), w))
    prefixes = {w[:-1] for w in words if w}
    return [w for w in words if w not in prefixes]


# -- displacement helpers ------------------------------------------------------


def displacement(m: np.ndarray) -> float:
    """d(I, m . I) for m in SL(d, R)."""
    return cartan_vector(m).norm()


def orbit_point(m: np.ndarray) -> SpdPoint:
    return SpdPoint(m @ m.T)


# -- the free group ------------------------------------------------------------


@dataclass(frozen=True)
class FreeGroupConstants:
    T: float
    t: float
    c1_inv: float
    c3: float
    R: float

    def to_json(self) -> dict:
        return {"T": self.T, "t": self.t, "c1_inv": self.c1_inv, "c3": self.c3, "R": self.R}


def _check_tanh(T: float):
    if not (math.sqrt(2) * T > 1 and T < 1):
        raise ValueError(f"need 1/sqrt(2) < T < 1 for a cocompact action on a convex subset, got T={T}")


def free_group_constants(T: float) -> FreeGroupConstants:
    """Quasi-isometry and Morse constants of the orbit map of the free model.

    c1_inv bounds the distance between non-adjacent sides of the Dirichlet
    octagon, c3 = d(p, gp) and R is its circumradius.
    """
    _check_tanh(T)
    t = math.atanh(T)
    root = math.sqrt(2 * T * T - 1)
    side_gap = 0.5 * math.log((T * T + root) / (T * T - root))
    cross = 2 * T * math.sqrt(1 - T * T)
    diagonal_gap = 0.5 * math.log((1 + cross) / (1 - cross)) if cross < 1 else math.inf
    c1_inv = math.sqrt(3) * min(t, side_gap, diagonal_gap)
    R = math.sqrt(3) * math.atanh(math.sqrt(1 / (T * T) - 2 + 2 * T * T))
    return FreeGroupConstants(T=T, t=t, c1_inv=c1_inv, c3=2 * math.sqrt(3) * t, R=R)


def free_group_generators(T: float) -> GroupModel:
    _check_tanh(T)
    t = math.atanh(T)
    g = np.diag([math.exp(t), 1.0, math.exp(-t)])
    h = np.array([[math.cosh(t), 0.0, math.sinh(t)], [0.0, 1.0, 0.0], [math.sinh(t), 0.0, math.cosh(t)]])
    g_inv = np.diag([math.exp(-t), 1.0, math.exp(t)])
    h_inv = np.array([[math.cosh(t), 0.0, -math.sinh(t)], [0.0, 1.0, 0.0], [-math.sinh(t), 0.0, math.cosh(t)]])
    gens = (
        Generator("g", GroupElement(g), 1),
        Generator("G", GroupElement(g_inv), 0),
        Generator("h", GroupElement(h), 3),
        Generator("H", GroupElement(h_inv), 2),
    )
    return GroupModel(name=f"free(T={T!r})", generators=gens, kind="free")


# -- the surface group ---------------------------------------------------------

SURFACE_ANGLES = (0.0, math.pi / 8, math.pi / 4, 3 * math.pi / 8)
SURFACE_RELATOR = "aBcDAbCd"


def surface_log_lambda() -> float:
    return math.acosh(1.0 / math.tan(math.pi / 8))


def surface_cover_radius() -> float:
    """Distance from the octagon centre to a vertex, sqrt(3) acosh(cot^2(pi/8))."""
    return math.sqrt(3) * math.acosh(1.0 / math.tan(math.pi / 8) ** 2)


def _rotation13(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def surface_group_model() -> GroupModel:
    """Genus-2 surface group: four octagon side pairings and their inverses.

    Labels a, b, c, d for the angles 0, pi/8, pi/4, 3pi/8 and upper case for
    inverses; the defining relator is ``aBcDAbCd``.
    """
    mu = surface_log_lambda()
    gens = []
    for j, theta in enumerate(SURFACE_ANGLES):
        r = _rotation13(theta)
        fwd = r @ np.diag([math.exp(mu), 1.0, math.exp(-mu)]) @ r.T
        bwd = r @ np.diag([math.exp(-mu), 1.0, math.exp(mu)]) @ r.T
        label = "abcd"[j]
        gens.append(Generator(label, GroupElement(fwd), 2 * j + 1))
        gens.append(Generator(label.upper(), GroupElement(bwd), 2 * j))
    return GroupModel(name="surface-genus-2", generators=tuple(gens), kind="cayley", relators=(SURFACE_RELATOR,))


@dataclass(frozen=True)
class BallGeneratingSet:
    radius: float
    elements: tuple[GroupElement, ...]
    words: tuple[Word, ...]
    displacements: tuple[float, ...]
    complete: bool
    depth_reached: int

    def __len__(self) -> int:
        return len(self.elements)

    def max_displacement(self) -> float:
        return max(self.displacements, default=0.0)

    def max_frobenius(self) -> float:
        return max((e.frobenius() for e in self.elements), default=0.0)

    def as_model(self, name: str = "ball") -> GroupModel:
        keys = [element_key(e.entries) for e in self.elements]
        index = {k: i for i, k in enumerate(keys)}
        gens = []
        for i, e in enumerate(self.elements):
            inv = index[element_key(np.linalg.inv(e.entries))]
            gens.append(Generator(f"s{i}", e, inv))
        return GroupModel(name=name, generators=tuple(gens), kind="cayley")


def ball_generating_set(
    model: GroupModel, radius: float, depth_cap: int = 12, prune_slack: Optional[float] = None
) -> BallGeneratingSet:
    """All non-identity elements gamma with d(p, gamma p) <= radius.

    Breadth-first search over generator products with deduplication.  Only
    elements with displacement <= radius + prune_slack are expanded further;
    the slack defaults to the largest generator displacement.  The result is
    marked incomplete when the depth cap is hit while the last layer still
    contains elements inside the ball.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    d = model.d
    gen_disp = [displacement(g.element.entries) for g in model.generators]
    slack = max(gen_disp) if prune_slack is None else prune_slack
    identity_key = element_key(np.eye(d))
    seen = {identity_key}
    found: list[tuple[Word, np.ndarray, float]] = []
    frontier: list[tuple[Word, np.ndarray]] = [((), np.eye(d))]
    depth = 0
    layer_hits = True
    while frontier and depth < depth_cap:
        depth += 1
        nxt = []
        layer_hits = False
        for word, m in frontier:
            for i, gen in enumerate(model.generators):
                prod = m @ gen.element.entries
                key = element_key(prod)
                if key in seen:
                    continue
                seen.add(key)
                disp = displacement(prod)
                if disp <= radius:
                    found.append(((*word, i), prod, disp))
                    layer_hits = True
                if disp <= radius + slack:
                    nxt.append(((*word, i), prod))
        frontier = nxt
    complete = not (frontier and depth >= depth_cap and layer_hits)
    found.sort(key=lambda item: (item[2], item[0]))
    return BallGeneratingSet(
        radius=radius,
        elements=tuple(GroupElement(m) for _, m, _ in found),
        words=tuple(w for w, _, _ in found),
        displacements=tuple(disp for _, _, disp in found),
        complete=complete,
        depth_reached=depth,
    )


# -- coarse-geometry constants -------------------------------------------------


def milnor_schwarz_constants(R: float) -> tuple[float, float, float, float]:
    """(1, 1, 2R+1, 0) for the ball generating set of radius 2R+1."""
    if not R > 0:
        raise ValueError("covering radius must be positive")
    return (1.0, 1.0, 2 * R + 1, 0.0)


@dataclass(frozen=True)
class HyperbolicityInput:
    delta_hyp: float
    M: float
    l: float
    a: float

    def __post_init__(self):
        if min(self.delta_hyp, self.M, self.l, self.a) <= 0:
            raise ValueError("delta_hyp, M, l and a must be positive")


@dataclass(frozen=True)
class ClassicalMorseConstants:
    D0: float
    R: float


def morse_excess(D: float, h: HyperbolicityInput) -> float:
    """D - 1 - delta |log2(2D + 2M^2 l + 6DMl + aM)|; the defining set is where this is <= 0."""
    arg = 2 * D + 2 * h.M**2 * h.l + 6 * D * h.M * h.l + h.a * h.M
    return D - 1 - h.delta_hyp * abs(math.log2(arg))


def classical_morse_constants(h: HyperbolicityInput, tol: float = 1e-9) -> ClassicalMorseConstants:
    """Upper bound D0 for the fellow-travel set and the Morse radius R.

    Scans D = 1, 2, 4, ... until the defining inequality fails, then bisects;
    D0 is the upper end of the final bracket, so it is a genuine upper bound.
    """
    lo, hi = 0.0, 1.0
    while morse_excess(hi, h) <= 0:
        lo, hi = hi, 2 * hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if morse_excess(mid, h) <= 0:
            lo = mid
        else:
            hi = mid
    D0 = hi
    R = D0 + h.l * h.M * D0 + h.l * h.M**2 + h.a / 2
    return ClassicalMorseConstants(D0=D0, R=R)


# -- desk-scale verification ---------------------------------------------------


@dataclass
class _Worst:
    margin: float = math.inf
    word: str = ""
    checked: int = 0
    failures: int = 0

    def update(self, margin: float, word: str, ok: bool):
        self.checked += 1
        if not ok:
            self.failures += 1
        if margin < self.margin:
            self.margin, self.word = margin, word

    def to_json(self) -> dict:
        return {
            "checked": self.checked,
            "failures": self.failures,
            "worst_margin": self.margin if self.checked else None,
            "witness": self.word if self.checked else None,
            "pass": self.failures == 0,
        }


def local_morse_verify(
    model: GroupModel,
    mc: ModelConstants,
    target: MorseQIParams,
    straightness: StraightSpacedParams,
    max_len: int,
    guard: int = 10**7,
) -> dict:
    """Check orbit sequences of all enumerated geodesic words of length <= max_len.

    Criteria, each reported with its worst margin and witnessing word:

    * ``qi``: (1/c1)|N| - c2 <= d(x_i, x_{i+N}) <= c3|N| + c4 for all pairs,
      up to the relative distance tolerance;
    * ``regularity``: regularity margin >= target.alpha0 for every
      sub-segment of length >= straightness.s (the range of margins over all
      sub-segments is reported separately);
    * ``straightness``: on the sequence coarsened greedily to spacing
      straightness.s, zeta-angles at interior points are >= pi - epsilon.
    """
    if model.d != mc.d:
        raise GeometryError("model and constants have different dimensions")
    words = model.maximal_words(max_len)
    segments = sum(len(w) * (len(w) + 1) // 2 for w in words)
    if segments > guard:
        raise ValueError(f"{segments} orbit segments exceed the enumeration guard {guard}")

    tol = tolerances().dist_rel
    identity = SpdPoint.identity(model.d)
    seg_cache: dict[Word, tuple[float, float]] = {}

    def segment(sub: Word) -> tuple[float, float]:
        if sub not in seg_cache:
            lam = cartan_vector(model.evaluate(sub)).lam
            dist = killing_norm(lam)
            margin = min(lam[i - 1] - lam[i] for i in mc.tau_mod) / dist if dist > 0 else math.nan
            seg_cache[sub] = (dist, margin)
        return seg_cache[sub]

    qi_lower, qi_upper, reg, straight = _Worst(), _Worst(), _Worst(), _Worst()
    margin_range = [math.inf, -math.inf]
    s, eps = straightness.s, straightness.epsilon

    for word in words:
        n = len(word)
        label = model.word_label(word)
        for i in range(n + 1):
            for j in range(i + 1, n + 1):
                dist, margin = segment(word[i:j])
                N = j - i
                lower = N / target.c1 - target.c2
                upper = target.c3 * N + target.c4
                slack = tol * max(1.0, dist)
                qi_lower.update(dist - lower, label, dist - lower >= -slack)
                qi_upper.update(upper - dist, label, upper - dist >= -slack)
                if not math.isnan(margin):
                    margin_range[0] = min(margin_range[0], margin)
                    margin_range[1] = max(margin_range[1], margin)
                if dist >= s:
                    reg.update(margin - target.alpha0, label, margin >= target.alpha0)
        # coarsen to spacing s and test zeta-straightness at interior points
        picks = [0]
        for j in range(1, n + 1):
            if segment(word[picks[-1]:j])[0] >= s:
                picks.append(j)
        for a, b, c in zip(picks, picks[1:], picks[2:]):
            back = orbit_point(np.linalg.inv(model.evaluate(word[a:b])))
            fwd = orbit_point(model.evaluate(word[b:c]))
            try:
                angle = zeta_angle(identity, back, fwd, mc)
            except GeometryError:
                angle = 0.0
            straight.update(angle - (math.pi - eps), label, angle >= math.pi - eps)

    criteria = {
        "qi_lower": qi_lower.to_json(),
        "qi_upper": qi_upper.to_json(),
        "regularity": reg.to_json(),
        "straightness": straight.to_json(),
    }
    verdict = all(c["pass"] for c in criteria.values())
    return {
        "model": model.name,
        "max_len": max_len,
        "words": len(words),
        "segments": segments,
        "distinct_subwords": len(seg_cache),
        "regularity_margin_range": margin_range if seg_cache else None,
        "criteria": criteria,
        "verdict": "pass" if verdict else "fail",
    }
