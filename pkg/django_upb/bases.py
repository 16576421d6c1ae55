"""Orthogonal product sets and the unextendibility decision."""

import itertools
import string
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .conf import settings as upb_settings
from .constants import VERDICT_LOG_FORMAT
from .exceptions import LayoutError, NotUnitaryError, OrthogonalityError
from .linalg import (
    as_ket,
    is_unitary,
    normalize,
    orthogonal_complement_sample,
    span_dimension,
    tensor_product,
)
from .loggers import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True)
class PartyLayout:
    """Local dimensions and labels of a multipartite space."""

    dims: Tuple[int, ...]
    labels: Tuple[str, ...] = ()

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        labels = tuple(self.labels) or tuple(string.ascii_uppercase[: len(dims)])
        if len(dims) < 2:
            raise LayoutError(f"a layout needs at least two parties, got {dims}")
        if any(d < 1 for d in dims):
            raise LayoutError(f"party dimensions must be positive, got {dims}")
        if len(labels) != len(dims) or len(set(labels)) != len(labels):
            raise LayoutError(f"labels {labels} do not match {len(dims)} parties")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def qubits(cls, count: int) -> "PartyLayout":
        return cls((2,) * count)

    @property
    def parties(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.dims))

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise LayoutError(f"unknown party label {label!r} in {self.labels}")

    def __str__(self) -> str:
        return "x".join(str(d) for d in self.dims)


@dataclass(frozen=True, eq=False)
class ProductVector:
    """A product vector stored as normalized local components."""

    components: Tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        components = []
        for position, component in enumerate(self.components):
            ket = as_ket(component)
            if np.linalg.norm(ket) == 0.0:
                raise LayoutError(f"component {position} of a product vector is zero")
            components.append(normalize(ket))
        object.__setattr__(self, "components", tuple(components))

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(c.size for c in self.components)

    def ket(self) -> np.ndarray:
        return tensor_product(self.components)

    def overlap(self, other: "ProductVector") -> complex:
        """Full-tensor inner product, computed factor by factor."""
        if self.dims != other.dims:
            raise LayoutError(f"dimension mismatch {self.dims} vs {other.dims}")
        return complex(
            np.prod([np.vdot(a, b) for a, b in zip(self.components, other.components)])
        )

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ProductVector) or self.dims != other.dims:
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.components, other.components))

    def __hash__(self) -> int:
        return hash(tuple(c.tobytes() for c in self.components))


@dataclass(frozen=True)
class ProductBasis:
    """An ordered set of product vectors over a layout."""

    layout: PartyLayout
    members: Tuple[ProductVector, ...]

    def __post_init__(self) -> None:
        members = tuple(self.members)
        for position, member in enumerate(members):
            if member.dims != self.layout.dims:
                raise LayoutError(
                    f"member {position} has dims {member.dims}, "
                    f"layout is {self.layout.dims}"
                )
        if len(members) > self.layout.total_dim:
            raise LayoutError(
                f"{len(members)} members exceed total dimension {self.layout.total_dim}"
            )
        object.__setattr__(self, "members", members)

    @property
    def size(self) -> int:
        return len(self.members)

    def kets(self) -> np.ndarray:
        """Full tensors of the members as rows."""
        if not self.members:
            return np.zeros((0, self.layout.total_dim), dtype=complex)
        return np.vstack([m.ket() for m in self.members])

    def column(self, party: int) -> List[np.ndarray]:
        return [m.components[party] for m in self.members]


@dataclass(frozen=True)
class OrthogonalityReport:
    orthogonal: bool
    max_overlap: float
    pair: Optional[Tuple[int, int]] = None


@dataclass(frozen=True)
class ExtendibilityVerdict:
    """
    Outcome of an unextendibility check.

    ``witness`` and ``assignment`` are filled for search verdicts that found
    an orthogonal product vector. Verdicts from the dimension-counting
    shortcut (``method == "shortcut"``) carry no witness.
    """

    unextendible: bool
    witness: Optional[ProductVector] = None
    assignment: Optional[Dict[int, int]] = None
    method: str = "search"
    nodes: int = 0


def check_pairwise_orthogonality(
    basis: ProductBasis, tol: Optional[float] = None
) -> OrthogonalityReport:
    """Largest full-tensor overlap between distinct members."""
    if tol is None:
        tol = upb_settings.ORTHOGONALITY_TOLERANCE
    worst, worst_pair = 0.0, None
    for i, j in itertools.combinations(range(basis.size), 2):
        value = abs(basis.members[i].overlap(basis.members[j]))
        if value > worst:
            worst, worst_pair = value, (i, j)
    orthogonal = worst <= tol
    return OrthogonalityReport(
        orthogonal=orthogonal,
        max_overlap=worst,
        pair=None if orthogonal else worst_pair,
    )


def require_orthogonal(basis: ProductBasis, tol: Optional[float] = None) -> None:
    """Raise OrthogonalityError naming the worst pair if ``basis`` is not orthogonal."""
    report = check_pairwise_orthogonality(basis, tol)
    if not report.orthogonal:
        i, j = report.pair
        raise OrthogonalityError(
            f"members {i} and {j} overlap by {report.max_overlap:.3e}",
            pair=report.pair,
            overlap=report.max_overlap,
        )


class _AssignmentSearch:
    """Depth-first search for a member-to-party orthogonality assignment."""

    def __init__(self, basis: ProductBasis, tol: float) -> None:
        self.basis = basis
        self.tol = tol
        self.dims = basis.layout.dims
        self.columns = [basis.column(p) for p in range(basis.layout.parties)]
        self._ranks: Dict[Tuple[int, int], int] = {}
        self.nodes = 0

    def rank(self, party: int, mask: int) -> int:
        key = (party, mask)
        if key not in self._ranks:
            picked = [
                self.columns[party][m] for m in range(self.basis.size) if mask >> m & 1
            ]
            self._ranks[key] = span_dimension(picked, self.tol)
        return self._ranks[key]

    def run(self) -> Optional[List[int]]:
        masks = [0] * len(self.dims)
        assignment: List[int] = []
        return self._descend(0, masks, assignment)

    def _descend(
        self, member: int, masks: List[int], assignment: List[int]
    ) -> Optional[List[int]]:
        if member == self.basis.size:
            return list(assignment)
        for party, dim in enumerate(self.dims):
            self.nodes += 1
            extended = masks[party] | (1 << member)
            if self.rank(party, extended) > dim - 1:
                continue
            previous = masks[party]
            masks[party] = extended
            assignment.append(party)
            found = self._descend(member + 1, masks, assignment)
            if found is not None:
                return found
            assignment.pop()
            masks[party] = previous
        return None


def _witness_for(
    basis: ProductBasis, assignment: Sequence[int], tol: float
) -> ProductVector:
    components = []
    for party, dim in enumerate(basis.layout.dims):
        assigned = [
            basis.members[m].components[party]
            for m, p in enumerate(assignment)
            if p == party
        ]
        component = orthogonal_complement_sample(assigned, dim, tol)
        if component is None:
            raise OrthogonalityError(
                f"assigned components of party {party} span the full space"
            )
        components.append(component)
    return ProductVector(tuple(components))


def check_unextendible(
    basis: ProductBasis, tol: Optional[float] = None
) -> ExtendibilityVerdict:
    """
    Decide whether some product vector is orthogonal to every member.

    A witness exists iff the members can be split among the parties so that
    the components routed to each party span a proper subspace of it.
    Members are routed in order, parties tried in layout order, and a branch
    is cut as soon as one party's span saturates. The first successful
    assignment is therefore the lexicographically smallest one.
    """
    if tol is None:
        tol = upb_settings.RANK_TOLERANCE
    search = _AssignmentSearch(basis, tol)
    assignment = search.run()
    logger.debug(
        f"assignment search over {basis.size} members in {basis.layout}: "
        f"{search.nodes} nodes, {len(search._ranks)} rank evaluations"
    )

    if assignment is None:
        verdict = ExtendibilityVerdict(unextendible=True, nodes=search.nodes)
    else:
        witness = _witness_for(basis, assignment, tol)
        worst = max((abs(witness.overlap(m)) for m in basis.members), default=0.0)
        if worst > upb_settings.ORTHOGONALITY_TOLERANCE:
            raise OrthogonalityError(
                f"witness overlaps a member by {worst:.3e}", overlap=worst
            )
        verdict = ExtendibilityVerdict(
            unextendible=False,
            witness=witness,
            assignment=dict(enumerate(assignment)),
            nodes=search.nodes,
        )

    logger.info(
        VERDICT_LOG_FORMAT.format(
            layout=basis.layout,
            size=basis.size,
            unextendible=verdict.unextendible,
            method=verdict.method,
        )
    )
    return verdict


def small_system_shortcut(basis: ProductBasis) -> Optional[ExtendibilityVerdict]:
    """
    Dimension-counting verdict for bipartite layouts with a qubit party.

    An orthogonal product set in ``C^d (x) C^2`` with fewer than ``2d``
    members is never unextendible. Returns ``None`` when the count is not
    conclusive.

    Raises:
        LayoutError: Unless the layout is bipartite with a two-dimensional party
    """
    dims = basis.layout.dims
    if len(dims) != 2 or 2 not in dims:
        raise LayoutError(f"shortcut needs a C^d x C^2 layout, got {dims}")
    other = dims[1] if dims[0] == 2 else dims[0]
    if basis.size < 2 * other:
        logger.debug(
            f"shortcut: {basis.size} members < {2 * other} in {basis.layout}"
        )
        return ExtendibilityVerdict(unextendible=False, method="shortcut")
    return None


def permute_parties(basis: ProductBasis, order: Sequence[int]) -> ProductBasis:
    """
    Reorder parties so that new party ``i`` is old party ``order[i]``.

    Raises:
        LayoutError: If ``order`` is not a permutation of the parties
    """
    order = tuple(int(p) for p in order)
    if sorted(order) != list(range(basis.layout.parties)):
        raise LayoutError(f"{order} is not a permutation of {basis.layout.parties} parties")
    layout = PartyLayout(
        tuple(basis.layout.dims[p] for p in order),
        tuple(basis.layout.labels[p] for p in order),
    )
    members = tuple(
        ProductVector(tuple(m.components[p] for p in order)) for m in basis.members
    )
    return ProductBasis(layout, members)


def apply_local_unitaries(
    basis: ProductBasis, unitaries: Sequence[np.ndarray], tol: float = 1e-12
) -> ProductBasis:
    """
    Apply one unitary per party to every member.

    Raises:
        LayoutError: If the number or size of unitaries does not match the layout
        NotUnitaryError: If some operator is not unitary within ``tol``
    """
    if len(unitaries) != basis.layout.parties:
        raise LayoutError(
            f"expected {basis.layout.parties} unitaries, got {len(unitaries)}"
        )
    checked = []
    for party, (unitary, dim) in enumerate(zip(unitaries, basis.layout.dims)):
        unitary = np.asarray(unitary, dtype=complex)
        if unitary.shape != (dim, dim):
            raise LayoutError(
                f"unitary for party {party} has shape {unitary.shape}, expected {(dim, dim)}"
            )
        if not is_unitary(unitary, tol):
            raise NotUnitaryError(f"operator for party {party} is not unitary")
        checked.append(unitary)
    members = tuple(
        ProductVector(tuple(u @ c for u, c in zip(checked, m.components)))
        for m in basis.members
    )
    return ProductBasis(basis.layout, members)


def product_basis(
    vectors: Sequence[Sequence[Sequence[complex]]],
    layout: Optional[PartyLayout] = None,
) -> ProductBasis:
    """Build a basis from nested component amplitudes (one list per member)."""
    members = tuple(ProductVector(tuple(as_ket(c) for c in v)) for v in vectors)
    if layout is None:
        if not members:
            raise LayoutError("cannot infer a layout from an empty member list")
        layout = PartyLayout(members[0].dims)
    return ProductBasis(layout, members)

