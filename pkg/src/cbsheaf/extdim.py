"""Ext groups against Godement resolutions and injective-dimension verdicts.

Applying hom(T, -) to the resolution terms gives a complex of morphism
spaces; its cohomology computes Ext^k(T, F) because the resolution is
injective.  Verdicts combine the structural upper bound (terms vanish past
the Cantor-Bendixson rank) with witnesses found by scanning a family of test
objects; a truncated non-terminating resolution only ever yields bounds,
never an "infinite" claim.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .linalg import RatMatrix, rank, solve_matrix
from .godement import GodementResolution, build_resolution, projected_term_dims
from .sheaves import (
    Sheaf,
    SheafMap,
    constant_sheaf,
    extend_along_mono,
    hom_basis_maps,
    identity_map,
    map_to_vector,
    random_sheaf,
    simple_sheaf,
    skyscraper,
)
from .spaces import FiniteSpace

# Provenance labels used in verdicts.  The names describe the supporting
# statement; they double as the "citation" strings in JSON output.
THM_SCATTERED = "scattered_finite_rank_theorem"
THM_INFINITE_RANK = "infinite_rank_theorem"
CONJ_PERFECT_HULL = "perfect_hull_conjecture"
PROV_GODEMENT = "godement_resolution"
PROV_SUPPORT_BOUND = "derivative_support_bound"
PROV_EMPTY = "empty_space"


@dataclass
class ExtComplex:
    """hom(T, C^k) for the resolution terms, with the induced maps alpha.

    point is the base point when T is a skyscraper there, else None.
    degrees[k] is the dimension of the k-th morphism space and alphas[k] the
    matrix of composition with delta_(k+1) in the canonical bases.
    """

    point: str | None
    degrees: list[int]
    alphas: list[RatMatrix]
    bases: list[list[SheafMap]] = field(repr=False, default_factory=list)

    def validate(self) -> None:
        for k in range(len(self.alphas) - 1):
            if not (self.alphas[k + 1] @ self.alphas[k]).is_zero():
                raise ValueError(f"alpha_{k + 2} alpha_{k + 1} != 0")


@dataclass
class ExtReport:
    """Cohomology dimensions ker(alpha_(k+1)) / im(alpha_k) by degree."""

    point: str | None
    ext_dims: dict[int, int]

    def max_nonzero_degree(self) -> int | None:
        nz = [k for k, d in self.ext_dims.items() if d]
        return max(nz) if nz else None

    def to_json(self) -> dict:
        return {str(k): self.ext_dims[k] for k in sorted(self.ext_dims)}


@dataclass
class DimensionVerdict:
    """Injective-dimension statement for a sheaf or a whole category.

    kind is one of exact / bounds / infinite / conjectured_infinite /
    trivial_category; upper None means unbounded-so-far.
    """

    kind: str
    n: int | None = None
    lower: int | None = None
    upper: int | None = None
    provenance: str = ""
    witness: str | None = None

    @classmethod
    def exact(cls, n: int, provenance: str, witness: str | None = None) -> "DimensionVerdict":
        return cls("exact", n=n, lower=n, upper=n, provenance=provenance, witness=witness)

    @classmethod
    def bounds(cls, lower: int, upper: int | None, provenance: str, witness: str | None = None) -> "DimensionVerdict":
        return cls("bounds", lower=lower, upper=upper, provenance=provenance, witness=witness)

    @classmethod
    def infinite(cls, provenance: str) -> "DimensionVerdict":
        return cls("infinite", provenance=provenance)

    @classmethod
    def conjectured_infinite(cls, provenance: str) -> "DimensionVerdict":
        return cls("conjectured_infinite", provenance=provenance)

    @classmethod
    def trivial_category(cls) -> "DimensionVerdict":
        return cls("trivial_category", provenance=PROV_EMPTY)

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "lower": self.lower,
            "upper": self.upper,
            "provenance": self.provenance,
            "witness": self.witness,
        }


# -- complexes -------------------------------------------------------------------


def hom_complex(T: Sheaf, r: GodementResolution, point: str | None = None) -> ExtComplex:
    """Apply hom(T, -) to the resolution terms and drop the augmentation."""
    bases = [hom_basis_maps(T, term) for term in r.terms]
    degrees = [len(b) for b in bases]
    alphas = []
    for k in range(r.length - 1):
        delta = r.delta(k + 1)
        target = RatMatrix.hstack([map_to_vector(f) for f in bases[k + 1]]) if bases[k + 1] else RatMatrix.zeros(0, 0)
        cols = []
        for f in bases[k]:
            composed = map_to_vector(f.then(delta))
            if degrees[k + 1] == 0:
                if not composed.is_zero():
                    raise ValueError("composite escapes the morphism space")
                cols.append(RatMatrix.zeros(0, 1))
                continue
            coords = solve_matrix(target, composed)
            if coords is None:
                raise ValueError("composite escapes the morphism space")
            cols.append(coords)
        alpha = RatMatrix.hstack(cols) if cols else RatMatrix.zeros(degrees[k + 1], 0)
        alphas.append(alpha)
    return ExtComplex(point, degrees, alphas, bases)


def hom_into_resolution(x: str, r: GodementResolution) -> ExtComplex:
    """The complex hom(skyscraper at x with fiber Q, C^.)."""
    T = skyscraper(r.sheaf.base, x, 1)
    return hom_complex(T, r, point=x)


def ext_dims_of_complex(c: ExtComplex, terminated: bool, max_degree: int) -> dict[int, int]:
    """Cohomology dimensions of the complex up to max_degree.

    For a terminated resolution all degrees are available (higher terms are
    genuinely zero); a truncated resolution supports degrees only up to
    length - 2, beyond which the data is silently clipped -- hence the error.
    """
    length = len(c.degrees)
    if not terminated and max_degree > length - 2:
        raise ValueError(
            f"insufficient resolution length: degree {max_degree} exceeds "
            f"available degree {length - 2} (resolution not terminated)"
        )
    ranks = [rank(a) for a in c.alphas]
    out = {}
    for k in range(max_degree + 1):
        if k >= length:
            out[k] = 0
            continue
        r_next = ranks[k] if k < len(ranks) else 0
        r_prev = ranks[k - 1] if k >= 1 else 0
        out[k] = c.degrees[k] - r_next - r_prev
    return out


def ext_groups(
    F: Sheaf,
    x: str,
    max_degree: int | None = None,
    *,
    max_len: int | None = None,
    resolution: GodementResolution | None = None,
) -> ExtReport:
    """Ext^k(skyscraper at x with fiber Q, F) from the Godement resolution."""
    r = resolution if resolution is not None else build_resolution(F, max_len)
    c = hom_into_resolution(x, r)
    if max_degree is None:
        max_degree = r.length - 1 if r.terminated else r.length - 2
        if max_degree < 0:
            raise ValueError("insufficient resolution length: no degree is available")
    return ExtReport(x, ext_dims_of_complex(c, r.terminated, max_degree))


# -- dimension verdicts ------------------------------------------------------------


def _test_objects(space: FiniteSpace, extra: Sequence[tuple[str, Sheaf]] = ()) -> list[tuple[str, Sheaf]]:
    """Skyscrapers first (closed points by height, deepest first), then simples,
    then the constant sheaf, then any extras."""
    hts = space.heights()
    big = len(space.points) + 1

    def depth(x: str) -> int:
        return hts.get(x, big)  # hull points sort deepest

    pts = sorted(space.points, key=lambda x: (not space.is_closed_point(x), -depth(x), space.index(x)))
    tests: list[tuple[str, Sheaf]] = [(f"skyscraper at {x}", skyscraper(space, x, 1)) for x in pts]
    for x in pts:
        if len(space.point_class(x)) == 1:
            tests.append((f"simple sheaf at {x}", simple_sheaf(space, x, 1)))
    tests.append(("constant sheaf", constant_sheaf(space, 1)))
    tests.extend(extra)
    return tests


def _resolution_cap(space: FiniteSpace, dims: Mapping[str, int], requested: int | None, stalk_cap: int) -> int:
    """Longest resolution whose projected term stalks stay within stalk_cap."""
    limit = requested if requested is not None else len(space.points) + 2
    terms, _ = projected_term_dims(space, dims, limit)
    length = 0
    for term in terms:
        if max(term.values(), default=0) > stalk_cap and length >= 1:
            break
        length += 1
    return max(1, length)


def injective_dimension_bounds(
    F: Sheaf,
    *,
    max_len: int | None = None,
    stalk_cap: int = 600,
    extra_tests: Sequence[tuple[str, Sheaf]] = (),
    short_circuit: bool = True,
) -> DimensionVerdict:
    """Bound the injective dimension of F from its Godement resolution.

    Upper bound: the terminated length minus one (unbounded when the
    resolution does not terminate), refined to zero when the unit splits and
    F is therefore itself injective.  Lower bound: the highest degree with a
    non-vanishing Ext group over the test family.
    """
    space = F.base
    cap = _resolution_cap(space, F.stalk_dim, max_len, stalk_cap)
    r = build_resolution(F, cap)
    upper = r.length - 1 if r.terminated else None
    if upper != 0 and extend_along_mono(r.units[0], identity_map(F)) is not None:
        # the unit splits, so F is a direct summand of an injective sheaf
        upper = 0
    available = r.length - 1 if r.terminated else r.length - 2
    lower = 0
    witness = None
    if available >= 0:
        for label, T in _test_objects(space, extra_tests):
            c = hom_complex(T, r)
            dims = ext_dims_of_complex(c, r.terminated, available)
            top = max((k for k, d in dims.items() if d), default=None)
            if top is not None and (top > lower or witness is None):
                lower = max(lower, top)
                witness = f"Ext^{top}({label}, F) has dimension {dims[top]}"
            if short_circuit and upper is not None and lower == upper:
                break
    if upper is not None and lower == upper:
        return DimensionVerdict.exact(upper, PROV_GODEMENT, witness)
    prov = PROV_GODEMENT if upper is not None else f"{PROV_GODEMENT} (truncated); {CONJ_PERFECT_HULL} open"
    return DimensionVerdict.bounds(lower, upper, prov, witness)


def category_dimension(
    space: FiniteSpace,
    *,
    max_len: int | None = None,
    stalk_cap: int = 600,
    random_sheaves: int = 0,
    max_random_dim: int = 2,
    seed: int = 0,
) -> DimensionVerdict:
    """The injective dimension of the whole category of sheaves on the space.

    Scattered spaces get the structural upper bound rank - 1; the lower bound
    scans the constant sheaf, all skyscrapers, all simples, and optional
    random sheaves, both as resolved objects and as test objects.  On a
    non-scattered space only bounds are reported, with the perfect-hull case
    recorded as conjectural.
    """
    if not space.points:
        return DimensionVerdict.trivial_category()
    scattered_part, hull = space.decompose()
    rank_cb = space.cb_rank()
    scattered = not hull
    upper = rank_cb - 1 if scattered else None

    scan: list[tuple[str, Sheaf]] = [("constant sheaf", constant_sheaf(space, 1))]
    hts = space.heights()
    big = len(space.points) + 1
    pts = sorted(space.points, key=lambda x: (-(hts.get(x, big)), space.index(x)))
    scan.extend((f"skyscraper at {x}", skyscraper(space, x, 1)) for x in pts)
    scan.extend(
        (f"simple sheaf at {x}", simple_sheaf(space, x, 1))
        for x in pts
        if len(space.point_class(x)) == 1
    )
    for i in range(random_sheaves):
        scan.append((f"random sheaf (seed {seed + i})", random_sheaf(space, max_random_dim, seed + i)))

    lower = 0
    witness = None
    for f_label, F in scan:
        cap = _resolution_cap(space, F.stalk_dim, max_len, stalk_cap)
        r = build_resolution(F, cap)
        available = r.length - 1 if r.terminated else r.length - 2
        if available < 0:
            continue
        for t_label, T in _test_objects(space):
            c = hom_complex(T, r)
            dims = ext_dims_of_complex(c, r.terminated, available)
            top = max((k for k, d in dims.items() if d), default=None)
            if top is not None and (top > lower or witness is None):
                lower = max(lower, top)
                witness = f"Ext^{top}({t_label}, {f_label}) has dimension {dims[top]}"
            if upper is not None and lower == upper:
                return DimensionVerdict.exact(upper, f"{PROV_SUPPORT_BOUND}; witness found", witness)
    if upper is not None:
        if lower == upper:
            return DimensionVerdict.exact(upper, f"{PROV_SUPPORT_BOUND}; witness found", witness)
        return DimensionVerdict.bounds(lower, upper, PROV_SUPPORT_BOUND, witness)
    return DimensionVerdict.bounds(
        lower, None, f"non-terminating resolutions; {CONJ_PERFECT_HULL} open", witness
    )


# -- pairing check ------------------------------------------------------------------


def _block_inclusion(r: GodementResolution, k: int, x: str) -> RatMatrix:
    """Inclusion of the x-factor of the k-th cokernel into C^k at the stalk x."""
    source = r.sheaf if k == 0 else r.cokers[k - 1]
    space = r.sheaf.base
    off = 0
    for y in space.nbhd_sorted(x):
        if y == x:
            break
        off += source.stalk_dim[y]
    d = source.stalk_dim[x]
    total = r.terms[k].stalk_dim[x]
    return RatMatrix(total, d, {(off + i, i): 1 for i in range(d)})


def hom_cokernel_check(r: GodementResolution, x: str, complex_: ExtComplex | None = None) -> dict:
    """At a closed point, match hom(skyscraper, C^k) with the cokernel stalks.

    Checks, for every degree in the resolution, that the morphism space has
    the dimension of the (k-1)-st cokernel stalk at x, and that under the
    block-extraction isomorphisms the induced map alpha_(k+1) is exactly
    "include into the x-factor, then project to the next cokernel".
    """
    space = r.sheaf.base
    if not space.is_closed_point(x):
        raise ValueError(f"point is not closed: {x!r}")
    c = complex_ if complex_ is not None else hom_into_resolution(x, r)
    checks = []
    ok = True
    isos = []
    for k in range(r.length):
        source = r.sheaf if k == 0 else r.cokers[k - 1]
        expected = source.stalk_dim[x]
        got = c.degrees[k]
        # iso: extract the x-block of the component at x of each basis map
        incl = _block_inclusion(r, k, x)
        cols = []
        for f in c.bases[k]:
            block = incl.transpose() @ f.comp[x]
            cols.append(block)
        iso = RatMatrix.hstack(cols) if cols else RatMatrix.zeros(expected, 0)
        isos.append(iso)
        dim_ok = expected == got
        iso_ok = dim_ok and rank(iso) == expected
        checks.append({"degree": k, "hom_dim": got, "coker_stalk_dim": expected, "iso": iso_ok})
        ok = ok and dim_ok and iso_ok
    for k in range(r.length - 1):
        induced = r.projections[k].comp[x] @ _block_inclusion(r, k, x)
        lhs = isos[k + 1] @ c.alphas[k]
        rhs = induced @ isos[k]
        match = lhs == rhs
        checks.append({"degree": k, "alpha_matches_factor_inclusion": match})
        ok = ok and match
    if r.terminated:
        checks.append({"degree": r.length, "hom_dim": 0, "coker_stalk_dim": 0, "iso": True})
    return {"point": x, "ok": ok, "checks": checks}
