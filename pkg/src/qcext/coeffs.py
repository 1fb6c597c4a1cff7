"""Coefficient modules for quasi-cocycles.

Two module shapes cover everything here:

* TrivialReals: the reals with trivial group action.  Vectors have a single
  index () and one Fraction coefficient.
* IndexedLp: finitely supported functions on (group element, tag) pairs with
  the left translation action on the first coordinate, normed as little
  l^p with integer p >= 1.

Coefficients are exact Fractions throughout; norms come in a float flavor
for reporting and an exact p-th-power flavor for certified comparisons.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .errors import DomainError, MixedContextError
from .groups import as_fraction


class TrivialReals:
    """R with the trivial action.  The only index is the empty tuple."""

    __slots__ = ("p",)

    def __init__(self):
        object.__setattr__(self, "p", 1)

    def __setattr__(self, name, value):
        raise AttributeError("TrivialReals is immutable")

    def __eq__(self, other):
        return isinstance(other, TrivialReals)

    def __hash__(self):
        return hash("TrivialReals")

    def __repr__(self):
        return "TrivialReals()"

    def valid_index(self, idx) -> bool:
        return idx == ()

    def act_index(self, g, idx):
        return idx


class IndexedLp:
    """l^p on (element, tag) indices with g . (h, t) = (g h, t)."""

    __slots__ = ("group", "p", "tags")

    def __init__(self, group, p: int = 2, tags: Sequence[str] = ("e",)):
        if not isinstance(p, int) or p < 1:
            raise DomainError("p must be an integer >= 1 for exact norms")
        tags = tuple(tags)
        if len(set(tags)) != len(tags) or not tags:
            raise DomainError("tags must be nonempty and distinct")
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "tags", tags)

    def __setattr__(self, name, value):
        raise AttributeError("IndexedLp is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, IndexedLp)
            and self.group == other.group
            and self.p == other.p
            and self.tags == other.tags
        )

    def __hash__(self):
        return hash(("IndexedLp", self.p, self.tags))

    def __repr__(self):
        return f"IndexedLp(p={self.p}, tags={self.tags})"

    def valid_index(self, idx) -> bool:
        if not (isinstance(idx, tuple) and len(idx) == 2):
            return False
        elem, tag = idx
        return tag in self.tags and getattr(elem, "group", None) == self.group

    def act_index(self, g, idx):
        elem, tag = idx
        return (g * elem, tag)


class ModuleVector:
    """Finitely supported vector in a coefficient module.

    Stores index -> Fraction with zeros dropped.  All arithmetic stays exact.
    """

    __slots__ = ("module", "coeffs")

    def __init__(self, module, coeffs: dict | None = None):
        clean = {}
        for idx, c in (coeffs or {}).items():
            c = as_fraction(c)
            if c == 0:
                continue
            if not module.valid_index(idx):
                raise DomainError(f"index {idx!r} not valid for {module!r}")
            clean[idx] = c
        object.__setattr__(self, "module", module)
        object.__setattr__(self, "coeffs", clean)

    def __setattr__(self, name, value):
        raise AttributeError("ModuleVector is immutable")

    def __eq__(self, other):
        if not isinstance(other, ModuleVector):
            return NotImplemented
        return self.module == other.module and self.coeffs == other.coeffs

    def __hash__(self):
        return hash((frozenset(self.coeffs.items()),))

    def is_zero(self) -> bool:
        return not self.coeffs

    def support(self) -> list:
        return sorted(self.coeffs, key=str)

    def coefficient(self, idx) -> Fraction:
        return self.coeffs.get(idx, Fraction(0))

    def scalar(self) -> Fraction:
        """The lone coefficient of a TrivialReals vector."""
        if not isinstance(self.module, TrivialReals):
            raise DomainError("scalar() is only for TrivialReals vectors")
        return self.coeffs.get((), Fraction(0))

    def _check(self, other: ModuleVector):
        if not isinstance(other, ModuleVector) or self.module != other.module:
            raise MixedContextError("vectors from different modules")

    def __add__(self, other: ModuleVector) -> ModuleVector:
        self._check(other)
        out = dict(self.coeffs)
        for idx, c in other.coeffs.items():
            out[idx] = out.get(idx, Fraction(0)) + c
        return ModuleVector(self.module, out)

    def __sub__(self, other: ModuleVector) -> ModuleVector:
        return self + (-other)

    def __neg__(self) -> ModuleVector:
        return ModuleVector(self.module, {i: -c for i, c in self.coeffs.items()})

    def scale(self, r) -> ModuleVector:
        r = as_fraction(r)
        return ModuleVector(self.module, {i: r * c for i, c in self.coeffs.items()})

    def __rmul__(self, r) -> ModuleVector:
        return self.scale(r)

    def act(self, g) -> ModuleVector:
        out: dict = {}
        for idx, c in self.coeffs.items():
            j = self.module.act_index(g, idx)
            out[j] = out.get(j, Fraction(0)) + c
        return ModuleVector(self.module, out)

    def norm_pth_power(self) -> Fraction:
        """Exact sum of |coeff|^p."""
        p = self.module.p
        return sum((abs(c) ** p for c in self.coeffs.values()), Fraction(0))

    def norm(self) -> float:
        power = self.norm_pth_power()
        if self.module.p == 1:
            return float(power)
        return float(power) ** (1.0 / self.module.p)

    def norm_leq_exact(self, bound) -> bool:
        """Exact test ||v||_p <= bound, done on p-th powers."""
        bound = as_fraction(bound)
        if bound < 0:
            return False
        return self.norm_pth_power() <= bound**self.module.p

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for idx in self.support():
            c = self.coeffs[idx]
            label = "1" if idx == () else str(idx)
            parts.append(f"{c}*d[{label}]")
        return " + ".join(parts)

    def __repr__(self):
        return f"<{self}>"


def zero(module) -> ModuleVector:
    return ModuleVector(module, {})

def delta(module, idx, coeff=Fraction(1)) -> ModuleVector:
    return ModuleVector(module, {idx: coeff})

def real_value(r, module: TrivialReals | None = None) -> ModuleVector:
    """Wrap an exact rational as a TrivialReals vector."""
    return ModuleVector(module or TrivialReals(), {(): as_fraction(r)})


def project_to_submodule(vec: ModuleVector, keep: Callable) -> ModuleVector:
    """Restrict a vector to the indices the predicate keeps."""
    return ModuleVector(
        vec.module, {i: c for i, c in vec.coeffs.items() if keep(i)}
    )


def sum_vectors(vectors: Iterable[ModuleVector], module=None) -> ModuleVector:
    vectors = list(vectors)
    if not vectors:
        if module is None:
            raise DomainError("empty sum needs an explicit module")
        return zero(module)
    out = vectors[0]
    for v in vectors[1:]:
        out = out + v
    return out
