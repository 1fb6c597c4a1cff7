"""Group arithmetic: free groups, finite table groups, and free products.

Elements are immutable value objects tied to their group.  Free-group words
are stored as tuples of signed ints (generator i maps to i+1, its inverse to
-(i+1)) and are always freely reduced.  Free-product elements are stored in
normal form: a tuple of (factor index, nontrivial factor element) syllables
with adjacent factor indices distinct.

Parsing uses one token grammar everywhere: tokens separated by whitespace or
'*', each token either '1' (identity) or 'sym' or 'sym^k' with k a nonzero
integer.  Symbols must be unique across a group (and across the factors of a
free product).
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    BallCapError,
    DomainError,
    GroupTableError,
    MixedContextError,
    UnknownGeneratorError,
)

_TOKEN_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def _split_tokens(text: str) -> list[str]:
    return [t for t in text.replace("*", " ").split() if t]


def _parse_token(token: str) -> tuple[str, int]:
    """Split 'sym^k' into (sym, k); bare 'sym' means k = 1."""
    m = _TOKEN_RE.match(token)
    if m is None:
        raise UnknownGeneratorError(f"cannot parse token {token!r}")
    sym, exp = m.group(1), m.group(2)
    k = 1 if exp is None else int(exp)
    if k == 0:
        raise UnknownGeneratorError(f"zero exponent in token {token!r}")
    return sym, k


class FreeGroup:
    """Finitely generated free group on named generators."""

    __slots__ = ("gens", "_index")

    def __init__(self, gens: Sequence[str]):
        gens = tuple(gens)
        if len(set(gens)) != len(gens):
            raise UnknownGeneratorError(f"duplicate generators in {gens}")
        for g in gens:
            if g == "1" or _TOKEN_RE.match(g) is None or "^" in g:
                raise UnknownGeneratorError(f"bad generator symbol {g!r}")
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "_index", {g: i + 1 for i, g in enumerate(gens)})

    def __setattr__(self, name, value):
        raise AttributeError("FreeGroup is immutable")

    def __eq__(self, other):
        return isinstance(other, FreeGroup) and self.gens == other.gens

    def __hash__(self):
        return hash(("FreeGroup", self.gens))

    def __repr__(self):
        return f"FreeGroup({', '.join(self.gens)})"

    # -- element constructors ------------------------------------------------

    def identity(self) -> FreeWord:
        return FreeWord(self, ())

    def gen(self, sym: str) -> FreeWord:
        if sym not in self._index:
            raise UnknownGeneratorError(f"{sym!r} not a generator of {self!r}")
        return FreeWord(self, (self._index[sym],))

    def word(self, letters: Iterable[int]) -> FreeWord:
        """Build a word from signed letter codes, reducing freely."""
        out: list[int] = []
        for c in letters:
            if not isinstance(c, int) or c == 0 or abs(c) > len(self.gens):
                raise UnknownGeneratorError(f"bad letter code {c!r}")
            if out and out[-1] == -c:
                out.pop()
            else:
                out.append(c)
        return FreeWord(self, tuple(out))

    def parse(self, text: str) -> FreeWord:
        letters: list[int] = []
        for token in _split_tokens(text):
            if token == "1":
                continue
            sym, k = _parse_token(token)
            if sym not in self._index:
                raise UnknownGeneratorError(f"{sym!r} not a generator of {self!r}")
            code = self._index[sym] if k > 0 else -self._index[sym]
            letters.extend([code] * abs(k))
        return self.word(letters)

    def generators(self) -> list[FreeWord]:
        return [self.gen(g) for g in self.gens]

    # -- protocol used by FreeProduct and searches ----------------------------

    def mul(self, a: FreeWord, b: FreeWord) -> FreeWord:
        return a * b

    def inv(self, a: FreeWord) -> FreeWord:
        return a.inverse()

    def is_identity(self, a: FreeWord) -> bool:
        return not a.letters

    def owns_symbol(self, sym: str) -> bool:
        return sym in self._index

    def parse_token(self, token: str) -> FreeWord:
        return self.parse(token)

    def letter_symbol(self, code: int) -> str:
        return self.gens[abs(code) - 1]


class FreeWord:
    """Freely reduced word in a FreeGroup.  Immutable and hashable."""

    __slots__ = ("group", "letters")

    def __init__(self, group: FreeGroup, letters: tuple[int, ...]):
        # Trusts callers to pass reduced tuples; FreeGroup.word reduces.
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "letters", letters)

    def __setattr__(self, name, value):
        raise AttributeError("FreeWord is immutable")

    def __eq__(self, other):
        if not isinstance(other, FreeWord):
            return NotImplemented
        return self.group == other.group and self.letters == other.letters

    def __hash__(self):
        return hash((self.group.gens, self.letters))

    def __len__(self):
        return len(self.letters)

    def __bool__(self):
        return bool(self.letters)

    def is_identity(self) -> bool:
        return not self.letters

    def __mul__(self, other: FreeWord) -> FreeWord:
        if not isinstance(other, FreeWord):
            return NotImplemented
        if self.group != other.group:
            raise MixedContextError("words from different free groups")
        a, b = list(self.letters), other.letters
        i = 0
        while a and i < len(b) and a[-1] == -b[i]:
            a.pop()
            i += 1
        return FreeWord(self.group, tuple(a) + b[i:])

    def inverse(self) -> FreeWord:
        return FreeWord(self.group, tuple(-c for c in reversed(self.letters)))

    def __pow__(self, n: int) -> FreeWord:
        if n == 0:
            return self.group.identity()
        base = self if n > 0 else self.inverse()
        out = base
        for _ in range(abs(n) - 1):
            out = out * base
        return out

    def syllables(self) -> list[tuple[str, int]]:
        """Run-length form [(symbol, exponent), ...]."""
        out: list[tuple[str, int]] = []
        for c in self.letters:
            sym = self.group.letter_symbol(c)
            step = 1 if c > 0 else -1
            if out and out[-1][0] == sym and (out[-1][1] > 0) == (step > 0):
                out[-1] = (sym, out[-1][1] + step)
            else:
                out.append((sym, step))
        return out

    def exponent_sum(self, sym: str) -> int:
        code = self.group._index.get(sym)
        if code is None:
            raise UnknownGeneratorError(f"{sym!r} not a generator")
        return sum(1 if c == code else -1 if c == -code else 0 for c in self.letters)

    def __str__(self):
        if not self.letters:
            return "1"
        parts = []
        for sym, k in self.syllables():
            parts.append(sym if k == 1 else f"{sym}^{k}")
        return " ".join(parts)

    def __repr__(self):
        return f"<{self}>"


class FiniteElement:
    """Element of a FiniteTableGroup, identified by its table index."""

    __slots__ = ("group", "index")

    def __init__(self, group: FiniteTableGroup, index: int):
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "index", index)

    def __setattr__(self, name, value):
        raise AttributeError("FiniteElement is immutable")

    @property
    def name(self) -> str:
        return self.group.names[self.index]

    def __eq__(self, other):
        if not isinstance(other, FiniteElement):
            return NotImplemented
        return self.group == other.group and self.index == other.index

    def __hash__(self):
        return hash((self.group.names, self.index))

    def __mul__(self, other: FiniteElement) -> FiniteElement:
        if not isinstance(other, FiniteElement):
            return NotImplemented
        if self.group != other.group:
            raise MixedContextError("elements from different finite groups")
        return FiniteElement(self.group, self.group.table[self.index][other.index])

    def inverse(self) -> FiniteElement:
        return FiniteElement(self.group, self.group._inverse[self.index])

    def __pow__(self, n: int) -> FiniteElement:
        out = self.group.identity()
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            out = out * base
        return out

    def is_identity(self) -> bool:
        return self.index == 0

    def __str__(self):
        return self.name

    def __repr__(self):
        return f"<{self.name}>"


class FiniteTableGroup:
    """Finite group given by a multiplication table.

    names[0] must be the identity.  table[i][j] is the index of names[i] *
    names[j].  The constructor checks closure, identity, inverses, and full
    associativity, so anything that survives construction is a group.
    """

    __slots__ = ("names", "table", "_inverse", "_name_index")

    def __init__(self, names: Sequence[str], table: Sequence[Sequence[int]]):
        names = tuple(names)
        table = tuple(tuple(row) for row in table)
        n = len(names)
        if n == 0:
            raise GroupTableError("empty group table")
        if len(set(names)) != n:
            raise GroupTableError("duplicate element names")
        for nm in names:
            if nm == "1" and names.index(nm) != 0:
                raise GroupTableError("'1' may only name the identity")
            if _TOKEN_RE.match(nm) is None and nm != "1":
                raise GroupTableError(f"bad element name {nm!r}")
        if len(table) != n or any(len(row) != n for row in table):
            raise GroupTableError("table is not square")
        for row in table:
            for v in row:
                if not isinstance(v, int) or not 0 <= v < n:
                    raise GroupTableError(f"table entry {v!r} out of range")
        for i in range(n):
            if table[0][i] != i or table[i][0] != i:
                raise GroupTableError("names[0] is not a two-sided identity")
        inverse = [-1] * n
        for i in range(n):
            for j in range(n):
                if table[i][j] == 0 and table[j][i] == 0:
                    inverse[i] = j
                    break
            if inverse[i] < 0:
                raise GroupTableError(f"no inverse for {names[i]!r}")
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if table[table[i][j]][k] != table[i][table[j][k]]:
                        raise GroupTableError(
                            f"associativity fails at ({names[i]}, {names[j]}, {names[k]})"
                        )
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "table", table)
        object.__setattr__(self, "_inverse", tuple(inverse))
        object.__setattr__(self, "_name_index", {nm: i for i, nm in enumerate(names)})

    def __setattr__(self, name, value):
        raise AttributeError("FiniteTableGroup is immutable")

    def __eq__(self, other):
        return (
            isinstance(other, FiniteTableGroup)
            and self.names == other.names
            and self.table == other.table
        )

    def __hash__(self):
        return hash(("FiniteTableGroup", self.names, self.table))

    def __repr__(self):
        return f"FiniteTableGroup({', '.join(self.names)})"

    def __len__(self):
        return len(self.names)

    def identity(self) -> FiniteElement:
        return FiniteElement(self, 0)

    def element(self, name: str) -> FiniteElement:
        if name not in self._name_index:
            raise UnknownGeneratorError(f"{name!r} not an element of {self!r}")
        return FiniteElement(self, self._name_index[name])

    def elements(self) -> list[FiniteElement]:
        return [FiniteElement(self, i) for i in range(len(self.names))]

    def mul(self, a: FiniteElement, b: FiniteElement) -> FiniteElement:
        return a * b

    def inv(self, a: FiniteElement) -> FiniteElement:
        return a.inverse()

    def is_identity(self, a: FiniteElement) -> bool:
        return a.index == 0

    def owns_symbol(self, sym: str) -> bool:
        return sym in self._name_index and sym != self.names[0]

    def parse_token(self, token: str) -> FiniteElement:
        sym, k = _parse_token(token)
        return self.element(sym) ** k

    def parse(self, text: str) -> FiniteElement:
        out = self.identity()
        for token in _split_tokens(text):
            if token == "1":
                continue
            out = out * self.parse_token(token)
        return out


def cyclic_group(order: int, sym: str = "g") -> FiniteTableGroup:
    """Z/order with elements 1, sym, sym^2, ..."""
    if order < 1:
        raise GroupTableError("order must be positive")
    names = ["1"] + [sym if k == 1 else f"{sym}{k}" for k in range(1, order)]
    table = [[(i + j) % order for j in range(order)] for i in range(order)]
    return FiniteTableGroup(names, table)


class FreeProduct:
    """Free product of a sequence of factor groups.

    Factors may be FreeGroup or FiniteTableGroup instances (anything with the
    identity/mul/inv/is_identity/owns_symbol/parse_token protocol).  Symbols
    must not collide across factors, so parsing is unambiguous.
    """

    __slots__ = ("factors",)

    def __init__(self, factors: Sequence):
        factors = tuple(factors)
        if len(factors) < 1:
            raise DomainError("free product needs at least one factor")
        object.__setattr__(self, "factors", factors)

    def __setattr__(self, name, value):
        raise AttributeError("FreeProduct is immutable")

    def __eq__(self, other):
        return isinstance(other, FreeProduct) and self.factors == other.factors

    def __hash__(self):
        return hash(("FreeProduct", self.factors))

    def __repr__(self):
        return "FreeProduct(" + " * ".join(repr(f) for f in self.factors) + ")"

    def identity(self) -> FreeProductElement:
        return FreeProductElement(self, ())

    def syllable(self, factor_index: int, elem) -> FreeProductElement:
        factor = self.factors[factor_index]
        if factor.is_identity(elem):
            return self.identity()
        return FreeProductElement(self, ((factor_index, elem),))

    def embed(self, elem) -> FreeProductElement:
        """Embed a factor element, locating its factor by the group object."""
        for i, factor in enumerate(self.factors):
            if getattr(elem, "group", None) == factor:
                return self.syllable(i, elem)
        raise MixedContextError("element does not belong to any factor")

    def _factor_for_symbol(self, sym: str) -> int:
        hits = [i for i, f in enumerate(self.factors) if f.owns_symbol(sym)]
        if not hits:
            raise UnknownGeneratorError(f"{sym!r} not in any factor")
        if len(hits) > 1:
            raise UnknownGeneratorError(f"{sym!r} is ambiguous across factors")
        return hits[0]

    def parse(self, text: str) -> FreeProductElement:
        out = self.identity()
        for token in _split_tokens(text):
            if token == "1":
                continue
            sym, _ = _parse_token(token)
            i = self._factor_for_symbol(sym)
            out = out * self.syllable(i, self.factors[i].parse_token(token))
        return out

    def mul(self, a: FreeProductElement, b: FreeProductElement) -> FreeProductElement:
        return a * b

    def inv(self, a: FreeProductElement) -> FreeProductElement:
        return a.inverse()

    def is_identity(self, a: FreeProductElement) -> bool:
        return not a.syllables


class FreeProductElement:
    """Normal-form element of a FreeProduct."""

    __slots__ = ("group", "syllables")

    def __init__(self, group: FreeProduct, syllables: tuple):
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "syllables", syllables)

    def __setattr__(self, name, value):
        raise AttributeError("FreeProductElement is immutable")

    def __eq__(self, other):
        if not isinstance(other, FreeProductElement):
            return NotImplemented
        return self.group == other.group and self.syllables == other.syllables

    def __hash__(self):
        return hash(("FPE", self.syllables))

    def __len__(self):
        return len(self.syllables)

    def is_identity(self) -> bool:
        return not self.syllables

    def __mul__(self, other: FreeProductElement) -> FreeProductElement:
        if not isinstance(other, FreeProductElement):
            return NotImplemented
        if self.group != other.group:
            raise MixedContextError("elements from different free products")
        left = list(self.syllables)
        right = list(other.syllables)
        j = 0
        # Cancellation loop: merge facing syllables from the same factor,
        # dropping identities and re-checking the new boundary.
        while left and j < len(right):
            fi, a = left[-1]
            fj, b = right[j]
            if fi != fj:
                break
            c = self.group.factors[fi].mul(a, b)
            j += 1
            if self.group.factors[fi].is_identity(c):
                left.pop()
            else:
                left[-1] = (fi, c)
                break
        return FreeProductElement(self.group, tuple(left) + tuple(right[j:]))

    def inverse(self) -> FreeProductElement:
        inv = tuple(
            (i, self.group.factors[i].inv(a)) for i, a in reversed(self.syllables)
        )
        return FreeProductElement(self.group, inv)

    def __pow__(self, n: int) -> FreeProductElement:
        out = self.group.identity()
        base = self if n >= 0 else self.inverse()
        for _ in range(abs(n)):
            out = out * base
        return out

    def __str__(self):
        if not self.syllables:
            return "1"
        return " ".join(str(a) for _, a in self.syllables)

    def __repr__(self):
        return f"<{self}>"


# -- generic helpers ----------------------------------------------------------


def conjugate(a, g):
    """a^g = g^-1 a g."""
    return g.inverse() * a * g


def commutator(a, b):
    """[a, b] = a^-1 b^-1 a b.  With this convention [a^g, b^g] = [a, b]^g
    and [x,y]^-k [x^t, y^t]^k reduces to [[x,y]^k, t]."""
    return a.inverse() * b.inverse() * a * b


def enumerate_ball(identity, generators: Sequence, radius: int, cap: int | None = None):
    """All products of at most `radius` of the given generators, BFS order.

    The generator list is used as given; pass inverses explicitly if a
    symmetric ball is wanted.  Raises BallCapError when more than `cap`
    distinct elements appear.
    """
    if radius < 0:
        raise DomainError("radius must be nonnegative")
    seen = {identity: 0}
    order = [identity]
    frontier = [identity]
    for depth in range(1, radius + 1):
        nxt = []
        for g in frontier:
            for s in generators:
                h = g * s
                if h not in seen:
                    seen[h] = depth
                    order.append(h)
                    nxt.append(h)
                    if cap is not None and len(order) > cap:
                        raise BallCapError(
                            f"ball exceeded cap {cap} at radius {depth}"
                        )
        frontier = nxt
    return order


def exponent_vector(word: FreeWord) -> dict[str, int]:
    """Abelianization of a free-group word."""
    out = {g: 0 for g in word.group.gens}
    for c in word.letters:
        out[word.group.letter_symbol(c)] += 1 if c > 0 else -1
    return out


def cyclic_reduce(word: FreeWord) -> tuple[FreeWord, FreeWord]:
    """Return (root, conj) with word == conj * root * conj^-1 and root
    cyclically reduced."""
    letters = list(word.letters)
    pre: list[int] = []
    while len(letters) >= 2 and letters[0] == -letters[-1]:
        pre.append(letters[0])
        letters = letters[1:-1]
    return FreeWord(word.group, tuple(letters)), FreeWord(word.group, tuple(pre))


def is_cyclically_reduced(word: FreeWord) -> bool:
    ls = word.letters
    return len(ls) < 2 or ls[0] != -ls[-1]


def is_proper_power(word: FreeWord) -> bool:
    """True when the word is conjugate to u^k with k >= 2."""
    root, _ = cyclic_reduce(word)
    n = len(root.letters)
    if n == 0:
        return False
    for d in range(1, n):
        if n % d:
            continue
        if root.letters == root.letters[:d] * (n // d):
            return True
    return False


def word_key(elem) -> str:
    """Deterministic sort key for elements of any supported group."""
    return str(elem)


def as_fraction(x) -> Fraction:
    """Exact conversion accepting int, Fraction, and decimal strings."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise DomainError(f"cannot convert {x!r} to an exact rational")


def ball_elements(group, radius: int, cap: int | None = None) -> list:
    """Symmetric ball in the standard generators of a FreeGroup."""
    gens = []
    for g in group.generators():
        gens.append(g)
        gens.append(g.inverse())
    return enumerate_ball(group.identity(), gens, radius, cap=cap)
