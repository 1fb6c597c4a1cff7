"""Paths and geodesics in the coned graph.

Vertices are ambient group elements; edges are labeled by XLetter or HLetter
and multiply on the right.  Three engines back `geodesics`:

* free products: the syllable normal form is the unique geodesic spelling;
* a cyclic subgroup generated by a basis letter: closed form (each maximal
  run of that letter costs one edge, runs of exponent +-1 admit the parallel
  ambient edge as a second spelling);
* generic cyclic word: pruned breadth-first search with a predecessor DAG
  and ordered enumeration of all geodesics found under the caps.

Closed forms report exhaustive=True; the pruned search never does.  The
independent `brute_force_distance_oracle` re-derives distances from scratch
over group elements (no shared code with the engines) for testing.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from .embedding import HLetter, SearchBudget, XLetter
from .errors import BudgetExhaustedError, DomainError, NotGeodesicError
from .groups import FreeGroup, FreeWord


class CayleyPath:
    """Edge path: origin vertex plus a tuple of letters, applied rightward."""

    __slots__ = ("origin", "letters", "_verts")

    def __init__(self, origin, letters: Sequence = ()):
        self.origin = origin
        self.letters = tuple(letters)
        self._verts = None

    @property
    def length(self) -> int:
        return len(self.letters)

    def vertices(self) -> tuple:
        if self._verts is None:
            out = [self.origin]
            for letter in self.letters:
                out.append(out[-1] * letter.elem)
            self._verts = tuple(out)
        return self._verts

    def endpoint(self):
        return self.vertices()[-1]

    def dump(self) -> list[str]:
        return [str(letter) for letter in self.letters]

    def __eq__(self, other):
        return (
            isinstance(other, CayleyPath)
            and self.origin == other.origin
            and self.letters == other.letters
        )

    def __hash__(self):
        return hash((self.origin, self.letters))

    def __repr__(self):
        return f"CayleyPath({self.origin}, {self.dump()})"


def concat(p: CayleyPath, q: CayleyPath) -> CayleyPath:
    if p.endpoint() != q.origin:
        raise DomainError("paths do not share an endpoint")
    return CayleyPath(p.origin, p.letters + q.letters)


@dataclass(frozen=True)
class GeodesicSet:
    """Result of a geodesic query between two fixed vertices."""

    distance: int
    geodesics: tuple
    exhaustive: bool
    truncated: bool = False
    note: str = ""


def geodesics(spec, f, g, budget: SearchBudget | None = None) -> GeodesicSet:
    """All geodesics from f to g known to the family engine, in the
    deterministic letter order (ambient letters before subgroup letters)."""
    budget = budget or spec.budget
    if spec.family == "free_product":
        return _free_product_geodesics(spec, f, g)
    if spec.is_basis:
        return _basis_geodesics(spec, f, g, budget)
    return _generic_geodesics(spec, f, g, budget)


def distance(spec, f, g, budget: SearchBudget | None = None) -> int:
    return geodesics(spec, f, g, budget=budget).distance


def _free_product_geodesics(spec, f, g) -> GeodesicSet:
    u = f.inverse() * g
    letters = []
    for idx, h in u.syllables:
        letters.append(HLetter(spec.names[idx], spec.group.syllable(idx, h)))
    # Syllable normal form is the unique geodesic spelling: every edge moves
    # within one factor, and merging or splitting syllables only lengthens.
    return GeodesicSet(
        distance=len(letters),
        geodesics=(CayleyPath(f, letters),),
        exhaustive=True,
    )


def _basis_blocks(spec, u: FreeWord) -> list[list]:
    """Per-edge letter choices for the closed-form engine, in path order."""
    wc = abs(spec.w.letters[0])
    group = spec.group
    blocks: list[list] = []
    i = 0
    ls = u.letters
    while i < len(ls):
        if abs(ls[i]) != wc:
            blocks.append([XLetter(group, ls[i])])
            i += 1
            continue
        j = i
        while j + 1 < len(ls) and abs(ls[j + 1]) == wc:
            j += 1
        # u is reduced, so the run is all one sign: k = signed run length
        k = (j - i + 1) * (1 if ls[i] > 0 else -1)
        choices = []
        if abs(k) == 1:
            choices.append(XLetter(group, ls[i]))
        choices.append(HLetter(spec.lam_name, spec.subgroup_element(k), power=k))
        blocks.append(choices)
        i = j + 1
    return blocks


def _basis_geodesics(spec, f, g, budget: SearchBudget) -> GeodesicSet:
    u = f.inverse() * g
    blocks = _basis_blocks(spec, u)
    # Every geodesic passes through the block boundary vertices; between
    # consecutive boundaries there is exactly one edge per listed choice.
    paths: list[CayleyPath] = []
    truncated = False

    def rec(i: int, acc: list) -> bool:
        nonlocal truncated
        if i == len(blocks):
            paths.append(CayleyPath(f, tuple(acc)))
            if len(paths) >= budget.max_geodesics:
                truncated = True
                return False
            return True
        for letter in blocks[i]:
            acc.append(letter)
            keep = rec(i + 1, acc)
            acc.pop()
            if not keep:
                return False
        return True

    rec(0, [])
    return GeodesicSet(
        distance=len(blocks),
        geodesics=tuple(paths),
        exhaustive=not truncated,
        truncated=truncated,
    )


# -- byte-level words for the pruned search ------------------------------------


def _to_bytes(word: FreeWord) -> bytes:
    return bytes(
        2 * (c - 1) if c > 0 else 2 * (-c - 1) + 1 for c in word.letters
    )


def _from_bytes(group: FreeGroup, data: bytes) -> FreeWord:
    letters = tuple(
        (b // 2 + 1) if b % 2 == 0 else -(b // 2 + 1) for b in data
    )
    return FreeWord(group, letters)


def _mul_bytes(a: bytes, b: bytes) -> bytes:
    i, j = len(a), 0
    while i > 0 and j < len(b) and a[i - 1] == b[j] ^ 1:
        i -= 1
        j += 1
    return a[:i] + b[j:]


def _generic_moves(spec, budget: SearchBudget, word_len: int):
    """Ordered (letter, byte-word) moves for the pruned search."""
    wl = len(spec.w.letters)
    pcap = -(-(word_len + budget.slack) // wl) + 1
    pcap = min(pcap, budget.max_power)
    moves = []
    for i in range(1, len(spec.group.gens) + 1):
        for code in (i, -i):
            moves.append((XLetter(spec.group, code), _to_bytes(FreeWord(spec.group, (code,)))))
    for a in range(1, pcap + 1):
        for k in (a, -a):
            h = spec.subgroup_element(k)
            moves.append((HLetter(spec.lam_name, h, power=k), _to_bytes(h)))
    return moves


def _generic_geodesics(spec, f, g, budget: SearchBudget) -> GeodesicSet:
    u = f.inverse() * g
    target = _to_bytes(u)
    cap_len = len(u.letters) + budget.slack * len(spec.w.letters)
    moves = _generic_moves(spec, budget, len(u.letters))
    start = b""
    dist: dict[bytes, int] = {start: 0}
    pred: dict[bytes, list] = {start: []}
    queue = deque([start])
    found = dist.get(target)
    while queue:
        v = queue.popleft()
        d = dist[v]
        if found is not None and d >= found:
            continue
        if d >= budget.max_depth:
            continue
        for letter, mb in moves:
            nv = _mul_bytes(v, mb)
            if len(nv) > cap_len:
                continue
            if nv not in dist:
                if len(dist) > budget.max_vertices:
                    raise BudgetExhaustedError(
                        "geodesic search exceeded the vertex budget"
                    )
                dist[nv] = d + 1
                pred[nv] = [(v, letter)]
                queue.append(nv)
                if nv == target:
                    found = d + 1
            elif dist[nv] == d + 1:
                pred[nv].append((v, letter))
    if target not in dist:
        raise BudgetExhaustedError("no path found within the search caps")

    # Restrict the DAG to vertices on some geodesic, then enumerate forward.
    on_geo: set[bytes] = {target}
    stack = [target]
    succ: dict[bytes, list] = {}
    while stack:
        v = stack.pop()
        for uvtx, letter in pred[v]:
            succ.setdefault(uvtx, []).append((letter, v))
            if uvtx not in on_geo:
                on_geo.add(uvtx)
                stack.append(uvtx)
    for v in succ:
        succ[v].sort(key=lambda e: e[0].sort_key())

    paths: list[CayleyPath] = []
    truncated = False

    def walk(v: bytes, acc: list) -> bool:
        nonlocal truncated
        if v == target:
            paths.append(CayleyPath(f, tuple(acc)))
            if len(paths) >= budget.max_geodesics:
                truncated = True
                return False
            return True
        for letter, nv in succ.get(v, ()):
            acc.append(letter)
            keep = walk(nv, acc)
            acc.pop()
            if not keep:
                return False
        return True

    walk(start, [])
    return GeodesicSet(
        distance=dist[target],
        geodesics=tuple(paths),
        exhaustive=False,
        truncated=truncated,
        note="pruned search: distance is an upper bound, list may be partial",
    )


# -- bulk distances and the independent oracle ---------------------------------


def free_ball_words(group: FreeGroup, radius: int) -> Iterable[FreeWord]:
    """All reduced words of length <= radius, shortest first, letter order."""
    codes = []
    for i in range(1, len(group.gens) + 1):
        codes.extend((i, -i))
    layer = [()]
    yield group.identity()
    for _ in range(radius):
        nxt = []
        for tup in layer:
            for c in codes:
                if tup and tup[-1] == -c:
                    continue
                new = tup + (c,)
                nxt.append(new)
                yield FreeWord(group, new)
        layer = nxt


def distance_map(spec, max_len: int, sweep_len: int | None = None,
                 max_power: int | None = None) -> dict:
    """Coned-graph distances from the identity to every reduced word of
    length <= max_len, as {FreeWord: int}.

    For the generic family this is one pruned breadth-first sweep over words
    of length <= sweep_len (default max_len + 2); reported values are upper
    bounds wherever a true geodesic would have to leave that ball.
    """
    if spec.family != "free_rel_cyclic":
        raise DomainError("bulk distance maps target the free_rel_cyclic family")
    group = spec.group
    if spec.is_basis:
        out = {}
        wc = abs(spec.w.letters[0])
        for v in free_ball_words(group, max_len):
            blocks = 0
            i = 0
            ls = v.letters
            while i < len(ls):
                if abs(ls[i]) == wc:
                    while i + 1 < len(ls) and abs(ls[i + 1]) == wc:
                        i += 1
                blocks += 1
                i += 1
            out[v] = blocks
        return out
    sweep_len = sweep_len if sweep_len is not None else max_len + 2
    max_power = max_power if max_power is not None else spec.budget.max_power
    xmoves = []
    for i in range(1, len(group.gens) + 1):
        for code in (i, -i):
            xmoves.append(_to_bytes(FreeWord(group, (code,))))
    hmoves = []
    for a in range(1, max_power + 1):
        for k in (a, -a):
            hmoves.append(_to_bytes(spec.subgroup_element(k)))
    dist: dict[bytes, int] = {b"": 0}
    frontier = [b""]
    d = 0
    while frontier:
        d += 1
        nxt = []
        for v in frontier:
            for mb in xmoves:
                nv = _mul_bytes(v, mb)
                if len(nv) <= sweep_len and nv not in dist:
                    dist[nv] = d
                    nxt.append(nv)
            for mb in hmoves:
                nv = _mul_bytes(v, mb)
                if len(nv) <= sweep_len and nv not in dist:
                    dist[nv] = d
                    nxt.append(nv)
        frontier = nxt
    out = {}
    for vb, dv in dist.items():
        if len(vb) <= max_len:
            out[_from_bytes(group, vb)] = dv
    return out


def brute_force_distance_oracle(
    spec,
    f,
    g,
    max_power: int = 12,
    max_s_length: int | None = None,
    max_vertices: int = 2_000_000,
) -> tuple[int, bool]:
    """Independent distance check by plain breadth-first search.

    Works on u = f^-1 g: moves act by right multiplication, so left
    translation is a graph automorphism and the distance depends on u only.
    Returns (distance, cap_touched).  The search is restricted to vertices
    with word length at most max_s_length (default: |u| + 4) and to
    subgroup edges with |power| <= max_power, so the value is in general
    only an upper bound on the uncapped distance; cap_touched reports
    whether a cap could actually have hidden a shorter path.  Pruning
    events that provably cannot matter are not reported:

    * free products: multiplying by one factor element changes the
      normal-form syllable length by at most one, so the distance is
      exact whenever every syllable of u fits the cap;
    * relative family: a vertex pruned while producing breadth layer j
      lies at depth j, so any path through it has length >= j + 1 and
      can undercut a found distance d only when j <= d - 2; subgroup
      powers are reported as binding only when a within-cap jump could
      exceed max_power (|k| |w| <= |v| + |v w^k| <= 2 max_s_length).

    Intentionally shares no machinery with the engines.
    """
    u = f.inverse() * g
    moves = []
    cap_touched = False
    power_bind = False
    if spec.family == "free_product":
        free_syllables = [
            len(w.letters)
            for idx, w in u.syllables
            if isinstance(spec.group.factors[idx], FreeGroup)
        ]
        cap = max_s_length if max_s_length is not None else max(free_syllables, default=1)
        cap_touched = any(n > cap for n in free_syllables)
        for idx, factor in enumerate(spec.group.factors):
            if isinstance(factor, FreeGroup):
                seen = set()
                stack = [()]
                while stack:
                    tup = stack.pop()
                    if tup:
                        moves.append(spec.group.syllable(idx, factor.word(tup)))
                    if len(tup) >= cap:
                        continue
                    for i in range(1, len(factor.gens) + 1):
                        for c in (i, -i):
                            if tup and tup[-1] == -c:
                                continue
                            if tup + (c,) not in seen:
                                seen.add(tup + (c,))
                                stack.append(tup + (c,))
            else:
                for h in factor.elements()[1:]:
                    moves.append(spec.group.syllable(idx, h))
        len_cap = None
    else:
        for i in range(1, len(spec.group.gens) + 1):
            for c in (i, -i):
                moves.append(FreeWord(spec.group, (c,)))
        for k in range(-max_power, max_power + 1):
            if k:
                moves.append(spec.subgroup_element(k))
        len_cap = max_s_length if max_s_length is not None else len(u.letters) + 4
        wlen = len(spec.w.letters)
        power_bind = (max_power + 1) * wlen <= 2 * len_cap

    one = spec.group.identity()
    seen = {one: 0}
    frontier = [one]
    d = 0
    relevant = False  # length prunes while producing layers 1 .. d-2
    recent = [False, False]  # same, for layers d-1 and d
    while frontier:
        if any(v == u for v in frontier):
            return d, cap_touched or relevant or (power_bind and d >= 1)
        d += 1
        pruned = False
        nxt = []
        for v in frontier:
            for mv in moves:
                nv = v * mv
                if len_cap is not None and len(nv.letters) > len_cap:
                    pruned = True
                    continue
                if nv not in seen:
                    if len(seen) > max_vertices:
                        raise BudgetExhaustedError("oracle vertex budget exceeded")
                    seen[nv] = d
                    nxt.append(nv)
        relevant = relevant or recent[0]
        recent = [recent[1], pruned]
        frontier = nxt
    raise BudgetExhaustedError("oracle found no path under its caps")


# -- components and penetration -------------------------------------------------


@dataclass(frozen=True)
class PathComponent:
    """Maximal run of subgroup letters for one subgroup label."""

    lam: str
    start: int
    end: int  # inclusive edge index
    entrance: object
    exit: object
    rep: object


def components(spec, path: CayleyPath, lam: str | None = None) -> list[PathComponent]:
    verts = path.vertices()
    out: list[PathComponent] = []
    i = 0
    while i < len(path.letters):
        letter = path.letters[i]
        if isinstance(letter, HLetter) and (lam is None or letter.lam == lam):
            j = i
            while (
                j + 1 < len(path.letters)
                and isinstance(path.letters[j + 1], HLetter)
                and path.letters[j + 1].lam == letter.lam
            ):
                j += 1
            out.append(
                PathComponent(
                    lam=letter.lam,
                    start=i,
                    end=j,
                    entrance=verts[i],
                    exit=verts[j + 1],
                    rep=spec.coset_rep(verts[i], letter.lam),
                )
            )
            i = j + 1
        else:
            i += 1
    return out


def coset_visits(spec, path: CayleyPath, lam: str, rep) -> list[tuple[int, int]]:
    """Maximal vertex-index runs of the path inside the coset rep*H_lam."""
    verts = path.vertices()
    runs: list[tuple[int, int]] = []
    i = 0
    while i < len(verts):
        if spec.coset_rep(verts[i], lam) == rep:
            j = i
            while j + 1 < len(verts) and spec.coset_rep(verts[j + 1], lam) == rep:
                j += 1
            runs.append((i, j))
            i = j + 1
        else:
            i += 1
    return runs


def penetration(spec, path: CayleyPath, lam: str, rep, geodesic: bool = True):
    """Entrance and exit of the path in the coset, or None.

    A path penetrates the coset when some edge has both endpoints inside it;
    edges labeled by ambient generators count, since they run parallel to
    subgroup-letter edges between the same vertices.  On geodesic input the
    visit is a single run of at most two vertices (a longer or repeated
    visit admits a one-edge shortcut), enforced via NotGeodesicError.
    """
    runs = coset_visits(spec, path, lam, rep)
    if geodesic:
        if len(runs) > 1 or any(j - i > 1 for i, j in runs):
            raise NotGeodesicError(
                "path visits a coset twice or lingers: not a geodesic"
            )
        if not runs or runs[0][0] == runs[0][1]:
            return None
        i, j = runs[0]
        verts = path.vertices()
        return verts[i], verts[j]
    # Non-geodesic paths: report the first run containing an edge.
    verts = path.vertices()
    for i, j in runs:
        if j > i:
            return verts[i], verts[j]
    return None


def path_has_edge_in_coset(spec, path: CayleyPath, lam: str, rep) -> bool:
    return penetration(spec, path, lam, rep, geodesic=False) is not None
