"""Separating cosets, entrance/exit pairs, and the triangle partition.

A coset separates an ordered pair (f, g) when either f != g and f^-1 g lies
in the subgroup (then the coset of f is the unique separating coset), or
some enumerated geodesic from f to g penetrates the coset essentially: its
entrance u and exit v satisfy d-hat(u, v) > 3C strictly.  Penetrations with
relative distance in (0, 3C] are excluded but logged, never silently lost.

Separating cosets are ordered by the distance from f, read off as the
geodesic prefix length at the entrance; distances are asserted strictly
increasing and the count never exceeds d(f, g).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .embedding import FINITE, RelativeDistance, _dist_gt
from .errors import DomainError, NotSeparatingError, PartitionNotFoundError
from .geodesics import CayleyPath, GeodesicSet, geodesics, path_has_edge_in_coset
from .groups import as_fraction


@dataclass(frozen=True)
class Coset:
    """Left coset rep * H_lam with a canonical representative."""

    lam: str
    rep: object

    def __str__(self):
        return f"{self.rep}*H[{self.lam}]"

    def to_json(self) -> dict:
        return {"lambda": self.lam, "rep": str(self.rep)}


@dataclass(frozen=True)
class BandExclusion:
    """Penetration whose relative width landed in the (0, 3C] band."""

    coset: Coset
    entrance: object
    exit: object
    width: RelativeDistance

    def to_json(self) -> dict:
        return {
            "coset": self.coset.to_json(),
            "entrance": str(self.entrance),
            "exit": str(self.exit),
            "width": str(self.width),
        }


@dataclass(frozen=True)
class SeparatingCosets:
    """Ordered separating cosets for one pair and one subgroup label."""

    f: object
    g: object
    lam: str
    cosets: tuple
    distances: tuple
    entrance_exits: tuple  # per coset: tuple of (entrance, exit) pairs
    trivial: bool
    exhaustive: bool
    conditional: bool = False
    band_excluded: tuple = ()
    c_value: Fraction = Fraction(0)

    def __len__(self):
        return len(self.cosets)

    def index_of(self, coset: Coset) -> int:
        return self.cosets.index(coset)

    def pairs(self, coset: Coset) -> tuple:
        return self.entrance_exits[self.index_of(coset)]

    def to_json(self) -> dict:
        return {
            "f": str(self.f),
            "g": str(self.g),
            "lambda": self.lam,
            "cosets": [c.to_json() for c in self.cosets],
            "distances": list(self.distances),
            "entrance_exits": [
                [[str(u), str(v)] for u, v in pairs] for pairs in self.entrance_exits
            ],
            "trivial": self.trivial,
            "exhaustive": self.exhaustive,
            "conditional": self.conditional,
            "band_excluded": [b.to_json() for b in self.band_excluded],
            "C": str(self.c_value),
        }


def _resolve_c(spec, c_value) -> Fraction:
    if c_value is not None:
        c = as_fraction(c_value)
    else:
        c = spec.theoretical_c()
    if c is None:
        raise DomainError(
            "no polygon constant available: supply c_value (calibrate first)"
        )
    if c < 0:
        raise DomainError("C must be nonnegative")
    return c


def separation_report(
    spec, f, g, c_value=None, budget=None, lams=None, geo: GeodesicSet | None = None
) -> dict:
    """Separating cosets for every requested subgroup label in one pass.

    Returns {lam: SeparatingCosets}.  The geodesic enumeration is shared
    across labels; pass `geo` to reuse one computed elsewhere.
    """
    c = _resolve_c(spec, c_value)
    lams = tuple(lams) if lams is not None else spec.lambdas()
    out: dict[str, SeparatingCosets] = {}
    u = f.inverse() * g
    trivial_lams = []
    for lam in lams:
        if f != g and spec.in_subgroup(u, lam):
            trivial_lams.append(lam)
    geo_needed = [lam for lam in lams if lam not in trivial_lams]
    if geo is None and geo_needed and f != g:
        geo = geodesics(spec, f, g, budget=budget)

    for lam in lams:
        if lam in trivial_lams:
            rep = spec.coset_rep(f, lam)
            out[lam] = SeparatingCosets(
                f=f,
                g=g,
                lam=lam,
                cosets=(Coset(lam, rep),),
                distances=(0,),
                entrance_exits=(((f, g),),),
                trivial=True,
                exhaustive=True,
                c_value=c,
            )
            continue
        if f == g:
            out[lam] = SeparatingCosets(
                f=f, g=g, lam=lam, cosets=(), distances=(), entrance_exits=(),
                trivial=False, exhaustive=True, c_value=c,
            )
            continue
        out[lam] = _essential_cosets(spec, f, g, lam, c, geo, budget)
    return out


def _essential_cosets(spec, f, g, lam, c: Fraction, geo: GeodesicSet, budget) -> SeparatingCosets:
    three_c = 3 * c
    # per coset key: [rep, min prefix, ordered pairs dict, essential, widths]
    info: dict = {}
    order: list = []
    for path in geo.geodesics:
        verts = path.vertices()
        for i, letter in enumerate(path.letters):
            du = verts[i].inverse() * verts[i + 1]
            if du.is_identity() or not spec.in_subgroup(du, lam):
                continue
            rep = spec.coset_rep(verts[i], lam)
            key = str(rep)
            if key not in info:
                info[key] = {
                    "rep": rep,
                    "prefix": i,
                    "pairs": {},
                    "essential": False,
                    "conditional": False,
                    "band": None,
                }
                order.append(key)
            entry = info[key]
            entry["prefix"] = min(entry["prefix"], i)
            pair = (verts[i], verts[i + 1])
            pkey = (str(pair[0]), str(pair[1]))
            if pkey not in entry["pairs"]:
                entry["pairs"][pkey] = pair
            if entry["essential"]:
                continue
            if three_c == 0:
                # positivity of the relative metric: distinct endpoints
                entry["essential"] = True
                continue
            shift = rep.inverse()
            width = spec.rel_distance(shift * verts[i], shift * verts[i + 1], lam,
                                      budget=budget)
            verdict, certain = _dist_gt(width, three_c)
            if verdict:
                entry["essential"] = True
                entry["conditional"] = not certain
            else:
                if width.status == FINITE and width.value > 0:
                    entry["band"] = width

    cosets, dists, pair_sets = [], [], []
    band: list[BandExclusion] = []
    conditional = False
    for key in order:
        entry = info[key]
        coset = Coset(lam, entry["rep"])
        if entry["essential"]:
            cosets.append((entry["prefix"], coset, tuple(entry["pairs"].values())))
            conditional = conditional or entry["conditional"]
        elif entry["band"] is not None:
            first = next(iter(entry["pairs"].values()))
            band.append(BandExclusion(coset, first[0], first[1], entry["band"]))
    cosets.sort(key=lambda t: t[0])
    dists = tuple(t[0] for t in cosets)
    assert all(a < b for a, b in zip(dists, dists[1:])), (
        "separating cosets must sit at strictly increasing distances"
    )
    assert len(cosets) <= geo.distance, "more separating cosets than the distance"
    return SeparatingCosets(
        f=f,
        g=g,
        lam=lam,
        cosets=tuple(t[1] for t in cosets),
        distances=dists,
        entrance_exits=tuple(t[2] for t in cosets),
        trivial=False,
        exhaustive=geo.exhaustive,
        conditional=conditional,
        band_excluded=tuple(band),
        c_value=c,
    )


def separating_cosets(spec, f, g, lam, c_value=None, budget=None) -> SeparatingCosets:
    return separation_report(spec, f, g, c_value=c_value, budget=budget, lams=(lam,))[lam]


def entrance_exit_set(spec, f, g, coset: Coset, c_value=None, budget=None) -> tuple:
    """All (entrance, exit) pairs over enumerated geodesics from f to g for
    one separating coset; {(f, g)} in the trivial clause."""
    report = separating_cosets(spec, f, g, coset.lam, c_value=c_value, budget=budget)
    for i, c in enumerate(report.cosets):
        if c == coset:
            return report.entrance_exits[i]
    raise NotSeparatingError(f"{coset} does not separate ({f}, {g})")


@dataclass(frozen=True)
class TrianglePartition:
    """Split of S(f, g) into pieces controlled by the other triangle sides.

    `front` has at most two cosets; `from_fh` consists of cosets that also
    separate (f, h) with identical entrance/exit data; `from_hg` likewise
    for (h, g).  `pivot` is the index used for the split (0-based; -1 when
    no coset of S(f, g) is penetrated by the f-h side).
    """

    front: tuple
    from_fh: tuple
    from_hg: tuple
    pivot: int
    verified: bool

    def to_json(self) -> dict:
        return {
            "front": [c.to_json() for c in self.front],
            "from_fh": [c.to_json() for c in self.from_fh],
            "from_hg": [c.to_json() for c in self.from_hg],
            "pivot": self.pivot,
            "verified": self.verified,
        }


def triangle_partition(
    spec, f, g, h, lam, c_value=None, budget=None
) -> TrianglePartition:
    """Partition S_lam(f, g) = from_fh | front | from_hg along a geodesic
    triangle with apex h, verifying the defining properties of each piece.

    Raises PartitionNotFoundError when the verification fails; that would
    falsify the surrounding theory, not merely this routine.
    """
    s_fg = separating_cosets(spec, f, g, lam, c_value=c_value, budget=budget)
    n = len(s_fg)
    if n <= 2:
        return TrianglePartition(
            front=s_fg.cosets, from_fh=(), from_hg=(), pivot=-1, verified=True
        )
    geo_fh = geodesics(spec, f, h, budget=budget)
    side = geo_fh.geodesics[0] if geo_fh.geodesics else CayleyPath(f)
    pivot = -1
    for j, coset in enumerate(s_fg.cosets):
        if path_has_edge_in_coset(spec, side, lam, coset.rep):
            pivot = j
    # pieces: indices < pivot from the f-h side, > pivot+1 from the h-g side
    if pivot < 0:
        front_idx = [0]
        fh_idx: list[int] = []
        hg_idx = list(range(1, n))
    else:
        fh_idx = list(range(pivot))
        front_idx = [j for j in (pivot, pivot + 1) if j < n]
        hg_idx = list(range(pivot + 2, n))

    s_fh = separating_cosets(spec, f, h, lam, c_value=c_value, budget=budget)
    s_hg = separating_cosets(spec, h, g, lam, c_value=c_value, budget=budget)

    def check(idx: list[int], inside: SeparatingCosets, outside: SeparatingCosets):
        for j in idx:
            coset = s_fg.cosets[j]
            if coset not in inside.cosets:
                raise PartitionNotFoundError(
                    f"{coset} missing from S({inside.f}, {inside.g})"
                )
            if coset in outside.cosets:
                raise PartitionNotFoundError(
                    f"{coset} separates both remaining sides"
                )
            same = set(map(_pair_key, inside.pairs(coset))) == set(
                map(_pair_key, s_fg.pairs(coset))
            )
            if not same:
                raise PartitionNotFoundError(
                    f"entrance/exit data changed for {coset}"
                )

    check(fh_idx, s_fh, s_hg)
    check(hg_idx, s_hg, s_fh)
    if len(front_idx) > 2:
        raise PartitionNotFoundError("front piece exceeds two cosets")
    return TrianglePartition(
        front=tuple(s_fg.cosets[j] for j in front_idx),
        from_fh=tuple(s_fg.cosets[j] for j in fh_idx),
        from_hg=tuple(s_fg.cosets[j] for j in hg_idx),
        pivot=pivot,
        verified=True,
    )


def _pair_key(pair) -> tuple[str, str]:
    return (str(pair[0]), str(pair[1]))
