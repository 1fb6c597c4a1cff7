"""Concrete hyperbolically embedded instances and the relative metric.

Two decidable families are provided:

* FreeProductPairSpec: G = H_1 * ... * H_n (pairs are the main case), with
  the empty extra generating set.  The coned graph metric is the syllable
  count and the relative metric on each factor is 0 on the diagonal and
  infinite off it.
* FreeRelCyclicSpec: G = F(S) with the cyclic subgroup generated by a
  cyclically reduced non-proper-power word w, extra generating set S.

The relative distance between subgroup elements is the shortest path length
in the coned graph avoiding subgroup-labeled edges whose BOTH endpoints lie
in the subgroup; parallel edges labeled by ambient generators stay allowed,
which is why d-hat(1, x) = 1 when w = x.

Exactness bookkeeping: closed forms are marked exact; capped searches return
upper bounds and say so; budget exhaustion is distinct from proven infinity.
"""

from __future__ import annotations

import hashlib
import random
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .errors import (
    BallCapError,
    BudgetExhaustedError,
    ConfigError,
    DomainError,
    MixedContextError,
)
from .groups import (
    FiniteTableGroup,
    FreeGroup,
    FreeProduct,
    FreeProductElement,
    FreeWord,
    as_fraction,
    cyclic_group,
    is_cyclically_reduced,
    is_proper_power,
)


def seeded_rng(seed: int, label: str) -> random.Random:
    """Deterministic substream; never uses Python's salted hash()."""
    digest = hashlib.sha256(f"{seed}:{label}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


# -- alphabet letters ---------------------------------------------------------


class XLetter:
    """Edge label from the extra generating set X (one signed generator)."""

    __slots__ = ("sym", "code", "elem")

    def __init__(self, group: FreeGroup, code: int):
        sym = group.letter_symbol(code)
        object.__setattr__(self, "sym", sym if code > 0 else sym + "^-1")
        object.__setattr__(self, "code", code)
        object.__setattr__(self, "elem", FreeWord(group, (code,)))

    def __setattr__(self, name, value):
        raise AttributeError("XLetter is immutable")

    def __eq__(self, other):
        return isinstance(other, XLetter) and self.elem == other.elem

    def __hash__(self):
        return hash(("X", self.code))

    def sort_key(self):
        return (0, 2 * abs(self.code) + (0 if self.code > 0 else 1), 0)

    def __str__(self):
        return f"X:{self.sym}"

    def __repr__(self):
        return str(self)


class HLetter:
    """Edge label from one subgroup alphabet: a nontrivial subgroup element.

    `elem` is the element in ambient form; `power` is set for cyclic
    subgroups (elem = w^power) and used for deterministic ordering.
    """

    __slots__ = ("lam", "elem", "power")

    def __init__(self, lam: str, elem, power: int | None = None):
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "elem", elem)
        object.__setattr__(self, "power", power)

    def __setattr__(self, name, value):
        raise AttributeError("HLetter is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, HLetter)
            and self.lam == other.lam
            and self.elem == other.elem
        )

    def __hash__(self):
        return hash(("H", self.lam, self.elem))

    def sort_key(self):
        if self.power is not None:
            rank = 2 * abs(self.power) - (2 if self.power > 0 else 1)
        else:
            rank = str(self.elem)
        return (1, self.lam, rank)

    def __str__(self):
        return f"H:{self.elem}"

    def __repr__(self):
        return str(self)


# -- search budgets and relative distances ------------------------------------


@dataclass(frozen=True)
class SearchBudget:
    """Caps for the lazily generated graph searches."""

    max_vertices: int = 400_000
    max_depth: int = 48
    max_power: int = 24
    max_geodesics: int = 20_000
    slack: int = 2

    def to_json(self) -> dict:
        return {
            "max_vertices": self.max_vertices,
            "max_depth": self.max_depth,
            "max_power": self.max_power,
            "max_geodesics": self.max_geodesics,
            "slack": self.slack,
        }

    @staticmethod
    def from_json(data: dict) -> SearchBudget:
        if not isinstance(data, dict):
            raise ConfigError("budget must be an object")
        kwargs = {}
        for key in ("max_vertices", "max_depth", "max_power", "max_geodesics", "slack"):
            if key in data:
                v = data[key]
                if not isinstance(v, int) or v < 0:
                    raise ConfigError(f"budget.{key} must be a nonnegative integer")
                kwargs[key] = v
        extra = set(data) - {
            "max_vertices", "max_depth", "max_power", "max_geodesics", "slack",
        }
        if extra:
            raise ConfigError(f"unknown budget keys {sorted(extra)}")
        return SearchBudget(**kwargs)


INFINITE = "infinite"
FINITE = "finite"
UNKNOWN = "unknown"


@dataclass(frozen=True)
class RelativeDistance:
    """Relative metric value with its epistemic status.

    status: finite | infinite | unknown.  `exact` is True when the value is
    a proved distance (closed form or proven-infinite family fact); a capped
    search that found a path reports finite but exact=False (upper bound).
    Budget exhaustion without a path is `unknown`, never a fake infinity.
    """

    status: str
    value: int | None = None
    exact: bool = True
    note: str = ""

    def is_finite(self) -> bool:
        return self.status == FINITE

    def __str__(self):
        if self.status == FINITE:
            tag = "" if self.exact else " (upper bound)"
            return f"{self.value}{tag}"
        return self.status


def _dist_leq(d: RelativeDistance, bound: Fraction) -> bool:
    """Sound test d <= bound: upper-bound values may certify <=, never >."""
    return d.status == FINITE and Fraction(d.value) <= bound


def _dist_gt(d: RelativeDistance, bound: Fraction) -> tuple[bool, bool]:
    """(verdict, certain) for the test d > bound."""
    if d.status == INFINITE:
        return True, True
    if d.status == UNKNOWN:
        return True, False
    if Fraction(d.value) > bound:
        return True, d.exact
    return False, True


@dataclass(frozen=True)
class RelBall:
    """Listing of {h in H : d-hat(1,h) op radius} with completeness flag."""

    elements: tuple
    complete: bool
    note: str = ""


# -- family specs --------------------------------------------------------------

_DEFAULT_NAMES = ("A", "B", "C", "D", "E", "F")


class FreeProductPairSpec:
    """Factors of a free product, hyperbolically embedded with X = empty."""

    family = "free_product"

    def __init__(
        self,
        group: FreeProduct,
        names: Sequence[str] | None = None,
        c_value=Fraction(0),
        budget: SearchBudget | None = None,
    ):
        names = tuple(names) if names is not None else _DEFAULT_NAMES[: len(group.factors)]
        if len(names) != len(group.factors) or len(set(names)) != len(names):
            raise DomainError("need one distinct label per factor")
        self.group = group
        self.names = names
        self.c_value = as_fraction(c_value)
        if self.c_value < 0:
            raise DomainError("C must be nonnegative")
        self.budget = budget or SearchBudget()
        self._index = {nm: i for i, nm in enumerate(names)}

    def __repr__(self):
        return f"FreeProductPairSpec({', '.join(self.names)})"

    def lambdas(self) -> tuple[str, ...]:
        return self.names

    def factor(self, lam: str):
        return self.group.factors[self._index[lam]]

    def identity(self) -> FreeProductElement:
        return self.group.identity()

    def parse(self, text: str) -> FreeProductElement:
        return self.group.parse(text)

    def generating_letters(self) -> list[XLetter]:
        return []  # X is empty for this family

    def in_subgroup(self, g: FreeProductElement, lam: str) -> bool:
        if g.group != self.group:
            raise MixedContextError("element from a different group")
        if not g.syllables:
            return True
        return len(g.syllables) == 1 and g.syllables[0][0] == self._index[lam]

    def subgroup_letter(self, lam: str, h: FreeProductElement) -> HLetter:
        if not self.in_subgroup(h, lam) or h.is_identity():
            raise DomainError(f"{h} is not a nontrivial element of {lam}")
        return HLetter(lam, h)

    def coset_rep(self, g: FreeProductElement, lam: str) -> FreeProductElement:
        """Canonical representative of g H_lam: drop a trailing lam-syllable."""
        idx = self._index[lam]
        if g.syllables and g.syllables[-1][0] == idx:
            return FreeProductElement(self.group, g.syllables[:-1])
        return g

    def rel_distance(self, h1, h2, lam: str, budget=None) -> RelativeDistance:
        if not (self.in_subgroup(h1, lam) and self.in_subgroup(h2, lam)):
            raise DomainError("both arguments must lie in the subgroup")
        if h1 == h2:
            return RelativeDistance(FINITE, 0, exact=True)
        return RelativeDistance(INFINITE, note="distinct factor elements")

    def rel_ball(self, lam: str, radius, strict: bool = False, budget=None) -> RelBall:
        radius = as_fraction(radius)
        inside = radius > 0 if strict else radius >= 0
        elems = (self.identity(),) if inside else ()
        return RelBall(elems, complete=True)

    def theoretical_c(self) -> Fraction:
        # Off-diagonal relative distances are infinite, so no geodesic
        # polygon has an isolated component with distinct endpoints.
        return Fraction(0)

    def random_element(self, rng: random.Random, max_syllables: int = 4):
        n = rng.randint(0, max_syllables)
        out = self.group.identity()
        prev = -1
        for _ in range(n):
            choices = [i for i in range(len(self.group.factors)) if i != prev]
            i = rng.choice(choices)
            h = self.random_factor_element(i, rng)
            if h is None:
                continue
            out = out * self.group.syllable(i, h)
            prev = i
        return out

    def random_factor_element(self, idx: int, rng: random.Random, size: int = 3):
        """A nontrivial element of the chosen factor, or None if impossible."""
        factor = self.group.factors[idx]
        if isinstance(factor, FreeGroup):
            k = rng.randint(1, size)
            letters: list[int] = []
            while len(letters) < k:
                c = rng.choice([1, -1]) * rng.randint(1, len(factor.gens))
                if letters and letters[-1] == -c:
                    continue
                letters.append(c)
            return factor.word(letters)
        n = len(factor.names)
        if n < 2:
            return None
        return factor.elements()[rng.randrange(1, n)]

    def random_subgroup_element(self, lam: str, rng: random.Random, size: int = 3):
        h = self.random_factor_element(self._index[lam], rng, size)
        if h is None:
            return self.identity()
        return self.group.syllable(self._index[lam], h)

    def describe(self) -> dict:
        factors = []
        for f in self.group.factors:
            if isinstance(f, FreeGroup):
                factors.append({"kind": "free", "gens": list(f.gens)})
            else:
                factors.append(
                    {"kind": "table", "names": list(f.names),
                     "table": [list(r) for r in f.table]}
                )
        return {
            "family": self.family,
            "factors": factors,
            "names": list(self.names),
            "C": str(self.c_value),
            "budget": self.budget.to_json(),
        }


class FreeRelCyclicSpec:
    """F(S) with the cyclic subgroup generated by w, X = S."""

    family = "free_rel_cyclic"

    def __init__(
        self,
        group: FreeGroup,
        w: FreeWord,
        lam: str = "C",
        c_value=None,
        budget: SearchBudget | None = None,
    ):
        if len(group.gens) < 2:
            raise DomainError("ambient free group needs rank at least 2")
        if w.group != group:
            raise MixedContextError("w must be a word of the ambient group")
        if w.is_identity():
            raise DomainError("w must be nontrivial")
        if not is_cyclically_reduced(w):
            raise DomainError("w must be cyclically reduced")
        if is_proper_power(w):
            raise DomainError("w must not be a proper power")
        self.group = group
        self.w = w
        self.lam_name = lam
        self.is_basis = len(w.letters) == 1
        if c_value is None and self.is_basis:
            c_value = Fraction(0)
        self.c_value = None if c_value is None else as_fraction(c_value)
        if self.c_value is not None and self.c_value < 0:
            raise DomainError("C must be nonnegative")
        self.budget = budget or SearchBudget()
        self._w_inv = w.inverse()

    def __repr__(self):
        return f"FreeRelCyclicSpec(F({', '.join(self.group.gens)}) rel <{self.w}>)"

    def lambdas(self) -> tuple[str, ...]:
        return (self.lam_name,)

    def identity(self) -> FreeWord:
        return self.group.identity()

    def parse(self, text: str) -> FreeWord:
        return self.group.parse(text)

    def generating_letters(self) -> list[XLetter]:
        out = []
        for i in range(1, len(self.group.gens) + 1):
            out.append(XLetter(self.group, i))
            out.append(XLetter(self.group, -i))
        return out

    def power_of(self, g: FreeWord) -> int | None:
        """k with g = w^k, or None.  Powers of a cyclically reduced w
        concatenate without cancellation, so this is a length check."""
        if g.group != self.group:
            raise MixedContextError("element from a different group")
        n = len(self.w.letters)
        if not g.letters:
            return 0
        if len(g.letters) % n:
            return None
        k = len(g.letters) // n
        if g.letters == self.w.letters * k:
            return k
        if g.letters == self._w_inv.letters * k:
            return -k
        return None

    def in_subgroup(self, g: FreeWord, lam: str | None = None) -> bool:
        return self.power_of(g) is not None

    def subgroup_element(self, k: int) -> FreeWord:
        return self.w**k

    def subgroup_letter(self, lam: str, h: FreeWord) -> HLetter:
        k = self.power_of(h)
        if k is None or k == 0:
            raise DomainError(f"{h} is not a nontrivial power of {self.w}")
        return HLetter(self.lam_name, h, power=k)

    def coset_rep(self, g: FreeWord, lam: str | None = None) -> FreeWord:
        """Representative of g<w> minimizing (length, letters)."""
        if self.is_basis:
            # Strip the trailing run of w-letters.
            code = self.w.letters[0]
            ls = list(g.letters)
            while ls and abs(ls[-1]) == abs(code):
                ls.pop()
            return FreeWord(self.group, tuple(ls))
        best = None
        span = 2 * len(g.letters) // len(self.w.letters) + 2
        for n in range(-span, span + 1):
            cand = g * self.subgroup_element(n)
            key = (len(cand.letters), cand.letters)
            if best is None or key < best[0]:
                best = (key, cand)
        return best[1]

    def rel_distance(self, h1: FreeWord, h2: FreeWord, lam=None, budget=None) -> RelativeDistance:
        k1, k2 = self.power_of(h1), self.power_of(h2)
        if k1 is None or k2 is None:
            raise DomainError("both arguments must be powers of w")
        m = k2 - k1
        if m == 0:
            return RelativeDistance(FINITE, 0, exact=True)
        if self.is_basis:
            # A subgroup-edge-free path must spell the power one ambient
            # letter at a time; crossing each branch point of the tree
            # costs one edge, giving exactly |m|.
            return RelativeDistance(FINITE, abs(m), exact=True)
        return self._rel_bfs(self.subgroup_element(m), budget or self.budget)

    def _rel_bfs(self, target: FreeWord, budget: SearchBudget) -> RelativeDistance:
        """Capped breadth-first search for d-hat(1, target).

        Edges labeled by subgroup letters are usable only from vertices
        outside <w> (from inside, both endpoints would lie in <w>).  The
        search restricts word length and subgroup powers, so a found value
        is an upper bound; missing it within caps proves nothing.
        """
        wl = len(self.w.letters)
        cap_len = len(target.letters) + budget.slack * wl + 2
        start = self.group.identity()
        dist = {start: 0}
        queue = deque([start])
        powers = [k for k in range(-budget.max_power, budget.max_power + 1) if k]
        while queue:
            v = queue.popleft()
            d = dist[v]
            if v == target:
                return RelativeDistance(FINITE, d, exact=False, note="capped search")
            if d >= budget.max_depth:
                continue
            succs = []
            for i in range(1, len(self.group.gens) + 1):
                for code in (i, -i):
                    succs.append(v * FreeWord(self.group, (code,)))
            if self.power_of(v) is None:
                for k in powers:
                    succs.append(v * self.subgroup_element(k))
            for u in succs:
                if len(u.letters) > cap_len or u in dist:
                    continue
                dist[u] = d + 1
                queue.append(u)
                if len(dist) > budget.max_vertices:
                    return RelativeDistance(
                        UNKNOWN, note="vertex budget exhausted"
                    )
        return RelativeDistance(UNKNOWN, note="search space exhausted under caps")

    def rel_ball(self, lam, radius, strict: bool = False, budget=None) -> RelBall:
        radius = as_fraction(radius)
        budget = budget or self.budget

        def inside(v: Fraction) -> bool:
            return v < radius if strict else v <= radius

        if self.is_basis:
            if (radius <= 0 and strict) or radius < 0:
                return RelBall((), complete=True)
            # d-hat(1, w^k) = |k|; collect k with inside(|k|)
            ks = [k for k in range(-int(radius) - 1, int(radius) + 2) if inside(Fraction(abs(k)))]
            ks.sort(key=lambda k: (abs(k), -k))
            return RelBall(tuple(self.subgroup_element(k) for k in ks), complete=True)
        elems = []
        for k in range(-budget.max_power, budget.max_power + 1):
            d = self.rel_distance(self.identity(), self.subgroup_element(k), budget=budget)
            if d.status == FINITE and inside(Fraction(d.value)):
                elems.append(self.subgroup_element(k))
        # The scan is power-capped and capped searches only give upper
        # bounds, so completeness cannot be claimed for the generic family.
        return RelBall(tuple(elems), complete=False,
                       note="power-capped scan; upper-bound distances")

    def theoretical_c(self) -> Fraction | None:
        return self.c_value

    def random_element(self, rng: random.Random, max_len: int = 8) -> FreeWord:
        k = rng.randint(0, max_len)
        letters: list[int] = []
        while len(letters) < k:
            c = rng.choice([1, -1]) * rng.randint(1, len(self.group.gens))
            if letters and letters[-1] == -c:
                continue
            letters.append(c)
        return FreeWord(self.group, tuple(letters))

    def random_subgroup_element(self, lam, rng: random.Random, size: int = 5) -> FreeWord:
        return self.subgroup_element(rng.randint(-size, size))

    def describe(self) -> dict:
        return {
            "family": self.family,
            "gens": list(self.group.gens),
            "w": str(self.w),
            "C": None if self.c_value is None else str(self.c_value),
            "budget": self.budget.to_json(),
        }


EmbeddingSpec = FreeProductPairSpec | FreeRelCyclicSpec


def relative_distance(spec, lam: str, h1, h2, budget=None) -> RelativeDistance:
    """Module-level wrapper with the argument order used by reports."""
    return spec.rel_distance(h1, h2, lam, budget=budget)


def check_local_finiteness(spec, lam: str, radius, cap: int = 10_000) -> RelBall:
    """Enumerate the closed relative ball; error if the cap is exceeded."""
    ball = spec.rel_ball(lam, radius, strict=False)
    if len(ball.elements) > cap:
        raise BallCapError(
            f"local finiteness not confirmed at this budget (> {cap} elements)"
        )
    return ball


def spec_from_json(data: dict):
    """Build an embedding spec from its JSON form (CLI configs)."""
    if not isinstance(data, dict):
        raise ConfigError("embedding must be an object")
    family = data.get("family")
    budget = SearchBudget.from_json(data["budget"]) if "budget" in data else None
    c_raw = data.get("C")
    try:
        c_val = None if c_raw is None else Fraction(str(c_raw))
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"bad C value {c_raw!r}: {e}") from None
    if family == "free_product":
        factors = data.get("factors")
        if not isinstance(factors, list) or not factors:
            raise ConfigError("free_product needs a nonempty factors list")
        built = []
        for f in factors:
            if not isinstance(f, dict):
                raise ConfigError("factor must be an object")
            if f.get("kind") == "free":
                gens = f.get("gens")
                if not isinstance(gens, list) or not all(isinstance(g, str) for g in gens):
                    raise ConfigError("free factor needs a gens list of strings")
                built.append(FreeGroup(gens))
            elif f.get("kind") == "cyclic":
                order = f.get("order")
                if not isinstance(order, int) or order < 1:
                    raise ConfigError("cyclic factor needs a positive order")
                built.append(cyclic_group(order, f.get("sym", "g")))
            elif f.get("kind") == "table":
                names, table = f.get("names"), f.get("table")
                if not isinstance(names, list) or not isinstance(table, list):
                    raise ConfigError("table factor needs names and table")
                built.append(FiniteTableGroup(names, table))
            else:
                raise ConfigError(f"unknown factor kind {f.get('kind')!r}")
        names = data.get("names")
        try:
            return FreeProductPairSpec(
                FreeProduct(built),
                names=names,
                c_value=c_val if c_val is not None else Fraction(0),
                budget=budget,
            )
        except DomainError as e:
            raise ConfigError(str(e)) from None
    if family == "free_rel_cyclic":
        gens = data.get("gens")
        if not isinstance(gens, list) or not all(isinstance(g, str) for g in gens):
            raise ConfigError("free_rel_cyclic needs a gens list of strings")
        w_text = data.get("w")
        if not isinstance(w_text, str):
            raise ConfigError("free_rel_cyclic needs a word w")
        group = FreeGroup(gens)
        try:
            w = group.parse(w_text)
            return FreeRelCyclicSpec(group, w, c_value=c_val, budget=budget)
        except (DomainError, MixedContextError) as e:
            raise ConfigError(str(e)) from None
        except Exception as e:
            raise ConfigError(f"bad w: {e}") from None
    raise ConfigError(f"unknown family {family!r}")


# -- empirical calibration of the polygon constant -----------------------------


@dataclass
class CalibrationReport:
    family: str
    samples: int
    max_ratio: Fraction
    by_n: dict
    curve: list
    unresolved: int
    isolated_seen: int
    warnings: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "samples": self.samples,
            "max_ratio": str(self.max_ratio),
            "by_n": {str(k): str(v) for k, v in sorted(self.by_n.items())},
            "curve": [[i, str(v)] for i, v in self.curve],
            "unresolved": self.unresolved,
            "isolated_seen": self.isolated_seen,
            "warnings": list(self.warnings),
        }


def calibrate_c(
    spec,
    samples: int = 200,
    ngon_sizes: Sequence[int] = (3, 4, 5, 6),
    seed: int = 0,
    element_size: int = 6,
    budget: SearchBudget | None = None,
) -> CalibrationReport:
    """Empirical polygon constant: max over sampled geodesic n-gons with an
    isolated component a of d-hat(a_-, a_+)/n.

    A component counts as isolated only when no other edge of the loop has
    both endpoints in its coset; edges labeled by ambient generators count
    as de-isolating (they are parallel to subgroup edges).
    """
    from .geodesics import geodesics as enum_geodesics  # local: avoids an import cycle

    if spec.family != "free_rel_cyclic":
        raise DomainError("calibration applies to the free_rel_cyclic family")
    rng = seeded_rng(seed, "calibrate-c")
    budget = budget or spec.budget
    lam = spec.lambdas()[0]
    max_ratio = Fraction(0)
    by_n: dict[int, Fraction] = {n: Fraction(0) for n in ngon_sizes}
    curve: list[tuple[int, Fraction]] = []
    unresolved = 0
    isolated_seen = 0
    warnings: list[str] = []
    if samples <= 0:
        warnings.append("empty sample: calibrated value is vacuous")

    for s in range(samples):
        n = ngon_sizes[s % len(ngon_sizes)]
        corners = [spec.identity()] + [
            spec.random_element(rng, element_size) for _ in range(n - 1)
        ]
        letters = []
        ok = True
        try:
            for i in range(n):
                side = enum_geodesics(
                    spec, corners[i], corners[(i + 1) % n], budget=budget
                )
                if not side.geodesics:
                    if side.distance != 0:
                        ok = False
                        break
                    continue
                letters.extend(side.geodesics[0].letters)
        except BudgetExhaustedError:
            # One oversized polygon must not abort the whole calibration.
            unresolved += 1
            curve.append((s + 1, max_ratio))
            continue
        if not ok or not letters:
            curve.append((s + 1, max_ratio))
            continue
        verts = [spec.identity()]
        for letter in letters:
            verts.append(verts[-1] * letter.elem)
        m = len(letters)  # loop: verts[m] == verts[0]

        def coset_of(idx: int):
            return spec.coset_rep(verts[idx], lam)

        # Cyclic maximal runs of subgroup letters staying in one coset.
        is_h = [isinstance(letter, HLetter) for letter in letters]
        if all(is_h):
            runs = [(0, m - 1)]
        else:
            runs = []
            i = 0
            while i < m:
                if not is_h[i]:
                    i += 1
                    continue
                j = i
                while j + 1 < m and is_h[j + 1]:
                    j += 1
                runs.append((i, j))
                i = j + 1
            # Merge a run touching the seam (cyclic maximality).
            if len(runs) >= 2 and runs[0][0] == 0 and runs[-1][1] == m - 1:
                a, b = runs.pop(), runs.pop(0)
                runs.insert(0, (a[0], b[1] + m))
        for start, end in runs:
            rep = coset_of(start % m)
            a_minus = verts[start % m]
            a_plus = verts[(end + 1) % m]
            member_edges = set(range(start, end + 1))
            isolated = True
            for e in range(m):
                if e % m in {idx % m for idx in member_edges}:
                    continue
                u, v = verts[e], verts[e + 1]
                du = u.inverse() * v
                if spec.in_subgroup(du) and not du.is_identity():
                    if spec.coset_rep(u, lam) == rep:
                        isolated = False
                        break
            if not isolated:
                continue
            isolated_seen += 1
            d = spec.rel_distance(
                rep.inverse() * a_minus, rep.inverse() * a_plus, lam, budget=budget
            )
            if d.status == FINITE:
                ratio = Fraction(d.value, n)
                max_ratio = max(max_ratio, ratio)
                by_n[n] = max(by_n[n], ratio)
            else:
                unresolved += 1
        curve.append((s + 1, max_ratio))

    return CalibrationReport(
        family=spec.family,
        samples=samples,
        max_ratio=max_ratio,
        by_n=by_n,
        curve=curve,
        unresolved=unresolved,
        isolated_seen=isolated_seen,
        warnings=warnings,
    )
