"""Coarse graining of product sets over four parties."""

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .bases import (
    ExtendibilityVerdict,
    PartyLayout,
    ProductBasis,
    ProductVector,
    check_unextendible,
    small_system_shortcut,
)
from .conf import settings as upb_settings
from .exceptions import LayoutError
from .linalg import (
    basis_ket,
    orthogonal_complement_sample,
    projectively_equal,
    span_dimension,
    tensor_product,
)
from .loggers import get_logger

logger = get_logger(__name__)

PartitionLike = Union["CoarsePartition", str]


@dataclass(frozen=True)
class CoarsePartition:
    """
    Grouping of party labels into blocks.

    Blocks are stored canonically: labels inside a block sorted, blocks
    sorted by their smallest label.
    """

    blocks: Tuple[Tuple[str, ...], ...]

    def __post_init__(self) -> None:
        blocks = tuple(tuple(sorted(block)) for block in self.blocks)
        if any(len(block) == 0 for block in blocks):
            raise LayoutError("partition blocks must be nonempty")
        labels = [label for block in blocks for label in block]
        if len(set(labels)) != len(labels):
            raise LayoutError(f"partition blocks overlap: {blocks}")
        if len(blocks) < 2:
            raise LayoutError("a partition needs at least two blocks")
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    @classmethod
    def parse(cls, text: str) -> "CoarsePartition":
        """Parse ``"AB|C|D"``; a ``:`` separator is accepted as well."""
        pieces = text.replace(":", "|").split("|")
        return cls(tuple(tuple(piece.strip()) for piece in pieces))

    @classmethod
    def finest(cls, layout: PartyLayout) -> "CoarsePartition":
        return cls(tuple((label,) for label in layout.labels))

    @property
    def labels(self) -> Tuple[str, ...]:
        return tuple(sorted(label for block in self.blocks for label in block))

    def validate(self, layout: PartyLayout) -> None:
        """
        Raises:
            LayoutError: If the blocks do not cover the layout labels exactly
        """
        if set(self.labels) != set(layout.labels) or len(self.labels) != layout.parties:
            raise LayoutError(
                f"partition {self} does not cover parties {''.join(layout.labels)}"
            )

    def indices(self, layout: PartyLayout) -> List[List[int]]:
        self.validate(layout)
        return [sorted(layout.index(label) for label in block) for block in self.blocks]

    def refines(self, other: "CoarsePartition") -> bool:
        """True when every block of ``self`` lies inside a block of ``other``."""
        if set(self.labels) != set(other.labels):
            return False
        return all(
            any(set(block) <= set(coarse) for coarse in other.blocks)
            for block in self.blocks
        )

    @property
    def shape(self) -> Tuple[int, ...]:
        return tuple(sorted((len(block) for block in self.blocks), reverse=True))

    def __str__(self) -> str:
        return "|".join("".join(block) for block in self.blocks)


def as_partition(partition: PartitionLike) -> CoarsePartition:
    if isinstance(partition, CoarsePartition):
        return partition
    return CoarsePartition.parse(partition)


def merged_layout(layout: PartyLayout, partition: PartitionLike) -> PartyLayout:
    partition = as_partition(partition)
    groups = partition.indices(layout)
    dims = tuple(
        math.prod(layout.dims[p] for p in group) for group in groups
    )
    return PartyLayout(dims, tuple("".join(block) for block in partition.blocks))


def merge_components(
    vector: ProductVector, groups: Sequence[Sequence[int]]
) -> ProductVector:
    return ProductVector(
        tuple(tensor_product([vector.components[p] for p in group]) for group in groups)
    )


def coarse_grain(basis: ProductBasis, partition: PartitionLike) -> ProductBasis:
    """
    Merge the parties of each block into one party.

    Merged components are Kronecker products of the block members in layout
    order.

    Raises:
        LayoutError: If the partition does not match the layout
    """
    partition = as_partition(partition)
    groups = partition.indices(basis.layout)
    layout = merged_layout(basis.layout, partition)
    return ProductBasis(
        layout, tuple(merge_components(m, groups) for m in basis.members)
    )


def enumerate_coarse_grainings(layout: PartyLayout) -> List[CoarsePartition]:
    """
    All proper coarse grainings of a four-party layout.

    Six partitions with one merged pair come first, then the three 2+2
    splits, then the four 3+1 splits ordered by the singleton.

    Raises:
        LayoutError: Unless the layout has exactly four parties
    """
    if layout.parties != 4:
        raise LayoutError(
            f"coarse grainings are enumerated for four parties, got {layout.parties}"
        )
    labels = layout.labels
    first = labels[0]
    partitions: List[CoarsePartition] = []
    for pair in itertools.combinations(labels, 2):
        rest = [(label,) for label in labels if label not in pair]
        partitions.append(CoarsePartition((pair, *rest)))
    for partner in labels[1:]:
        block = (first, partner)
        partitions.append(
            CoarsePartition((block, tuple(lb for lb in labels if lb not in block)))
        )
    for single in labels:
        partitions.append(
            CoarsePartition(((single,), tuple(lb for lb in labels if lb != single)))
        )
    return partitions


@dataclass(frozen=True)
class PartitionVerdict:
    partition: CoarsePartition
    layout: PartyLayout
    verdict: ExtendibilityVerdict

    @property
    def unextendible(self) -> bool:
        return self.verdict.unextendible


@dataclass
class GrainingReport:
    """Verdicts of one four-party basis across all of its coarse grainings."""

    size: int
    finest: PartitionVerdict
    entries: List[PartitionVerdict] = field(default_factory=list)

    def verdict(self, partition: PartitionLike) -> PartitionVerdict:
        partition = as_partition(partition)
        if partition == self.finest.partition:
            return self.finest
        for entry in self.entries:
            if entry.partition == partition:
                return entry
        raise LayoutError(f"partition {partition} is not part of this report")

    def upbs_of_shape(self, shape: Tuple[int, ...]) -> List[CoarsePartition]:
        return [
            e.partition
            for e in self.entries
            if e.partition.shape == shape and e.unextendible
        ]

    @property
    def three_block_upbs(self) -> List[CoarsePartition]:
        return self.upbs_of_shape((2, 1, 1))

    @property
    def two_block_upbs(self) -> List[CoarsePartition]:
        return self.upbs_of_shape((2, 2))

    @property
    def three_one_upbs(self) -> List[CoarsePartition]:
        return self.upbs_of_shape((3, 1))

    @property
    def in_224(self) -> bool:
        return bool(self.three_block_upbs)

    @property
    def in_44(self) -> bool:
        return bool(self.two_block_upbs)

    def all_verdicts(self) -> List[PartitionVerdict]:
        return [self.finest, *self.entries]


def classify_upb_across_grainings(
    basis: ProductBasis, tol: Optional[float] = None
) -> GrainingReport:
    """
    Run the unextendibility check at the full layout and at every coarse
    graining. The 3+1 splits go through the dimension-counting shortcut first.
    """
    finest = CoarsePartition.finest(basis.layout)
    report = GrainingReport(
        size=basis.size,
        finest=PartitionVerdict(finest, basis.layout, check_unextendible(basis, tol)),
    )
    for partition in enumerate_coarse_grainings(basis.layout):
        merged = coarse_grain(basis, partition)
        verdict = None
        if partition.shape == (3, 1):
            verdict = small_system_shortcut(merged)
        if verdict is None:
            verdict = check_unextendible(merged, tol)
        report.entries.append(PartitionVerdict(partition, merged.layout, verdict))

    logger.info(
        f"graining report for size {basis.size}: "
        f"2x2x4 UPBs {[str(p) for p in report.three_block_upbs]}, "
        f"4x4 UPBs {[str(p) for p in report.two_block_upbs]}"
    )
    return report


def refinement_violations(report: GrainingReport) -> List[Tuple[str, str]]:
    """
    Pairs ``(finer, coarser)`` where the coarser grouping is a UPB but the
    finer one is not. Always empty for a correct report.
    """
    violations = []
    verdicts = report.all_verdicts()
    for fine, coarse in itertools.permutations(verdicts, 2):
        if fine.partition == coarse.partition or not fine.partition.refines(coarse.partition):
            continue
        if coarse.unextendible and not fine.unextendible:
            violations.append((str(fine.partition), str(coarse.partition)))
    return violations


def split_implication_violations(report: GrainingReport) -> List[str]:
    """
    2+2 UPBs whose two single-pair refinements are not both UPBs.

    If ``AB|CD`` is a UPB then ``A|B|CD`` and ``AB|C|D`` have to be UPBs.
    """
    violations = []
    for partition in report.two_block_upbs:
        for block in partition.blocks:
            other = next(b for b in partition.blocks if b != block)
            split = CoarsePartition((*((label,) for label in block), other))
            if not report.verdict(split).unextendible:
                violations.append(f"{partition} -> {split}")
    return violations


def _collinear_classes(
    vectors: Sequence, rows: Sequence[int], tol: float
) -> List[List[int]]:
    """Group ``rows`` by projective equality of ``vectors[row]``, first occurrence first."""
    classes: List[List[int]] = []
    for row in rows:
        for cls in classes:
            if projectively_equal(vectors[cls[0]], vectors[row], tol):
                cls.append(row)
                break
        else:
            classes.append([row])
    return classes


def _complement_of(vector, dim: int):
    return orthogonal_complement_sample([vector], dim)


def merged_pair_shortcut(
    basis: ProductBasis,
    merged_pair: Union[str, Sequence[str]],
    m: int,
    tol: Optional[float] = None,
) -> Optional[ProductVector]:
    """
    Look for the structural witness of a merged-pair coarse graining.

    The members are split into ``n - 3 - m`` rows, where ``k`` share the
    same first-party component ``f`` and the rest share the same
    second-party component ``g``, and ``m + 3`` remaining rows, where
    ``m + 1`` merged components are pairwise collinear. The witness is then
    ``|f', g', phi>`` with ``phi`` orthogonal to the remaining merged
    components. Both role orders of the two unmerged parties are tried.

    Returns the witness in the canonical order of the coarse-grained layout,
    or ``None``.

    Raises:
        LayoutError: If ``m`` is outside ``0..n-4`` or the pair is invalid
    """
    if tol is None:
        tol = upb_settings.ORTHOGONALITY_TOLERANCE
    layout = basis.layout
    n = basis.size
    if layout.parties != 4:
        raise LayoutError("merged_pair_shortcut works on four-party bases")
    if not 0 <= m <= n - 4:
        raise LayoutError(f"m must lie in 0..{n - 4}, got {m}")
    pair = tuple(sorted(merged_pair))
    if len(pair) != 2 or len(set(pair)) != 2:
        raise LayoutError(f"merged pair must name two parties, got {merged_pair!r}")

    singles = [label for label in layout.labels if label not in pair]
    partition = CoarsePartition((pair, *((label,) for label in singles)))
    merged = coarse_grain(basis, partition)
    pair_position = partition.blocks.index(pair)
    merged_column = merged.column(pair_position)
    merged_dim = merged.layout.dims[pair_position]
    rows = list(range(n))
    tail_size = m + 3

    for first, second in (singles, singles[::-1]):
        first_party, second_party = layout.index(first), layout.index(second)
        first_column = basis.column(first_party)
        second_column = basis.column(second_party)
        first_classes = [[]] + _collinear_classes(first_column, rows, tol)
        for first_class in first_classes:
            left = [r for r in rows if r not in first_class]
            second_classes = [[]] + _collinear_classes(second_column, left, tol)
            for second_class in second_classes:
                rest = [r for r in left if r not in second_class]
                if len(rest) > tail_size:
                    continue
                movable = first_class + second_class
                for moved in itertools.combinations(movable, tail_size - len(rest)):
                    tail = sorted(rest + list(moved))
                    groups = _collinear_classes(merged_column, tail, tol)
                    if max(len(g) for g in groups) < m + 1:
                        continue
                    head_first = [r for r in first_class if r not in moved]
                    head_second = [r for r in second_class if r not in moved]
                    witness = _structural_witness(
                        layout, partition, pair_position, merged_dim,
                        (first_party, first_column, head_first),
                        (second_party, second_column, head_second),
                        [merged_column[r] for r in tail],
                    )
                    if witness is None:
                        continue
                    worst = max(abs(witness.overlap(v)) for v in merged.members)
                    if worst <= upb_settings.ORTHOGONALITY_TOLERANCE:
                        logger.debug(
                            f"structural witness for {partition} with m={m}: "
                            f"k={len(head_first)}, tail rows {tail}"
                        )
                        return witness
    return None


lemma3_shortcut = merged_pair_shortcut


def _structural_witness(
    layout: PartyLayout,
    partition: CoarsePartition,
    pair_position: int,
    merged_dim: int,
    first: Tuple[int, Sequence, List[int]],
    second: Tuple[int, Sequence, List[int]],
    tail_components: Sequence,
) -> Optional[ProductVector]:
    phi = orthogonal_complement_sample(tail_components, merged_dim)
    if phi is None:
        return None
    local: Dict[int, object] = {}
    for party, column, head in (first, second):
        dim = layout.dims[party]
        local[party] = (
            _complement_of(column[head[0]], dim) if head else basis_ket(dim, 0)
        )
    components = []
    for position, block in enumerate(partition.blocks):
        if position == pair_position:
            components.append(phi)
        else:
            components.append(local[layout.index(block[0])])
    return ProductVector(tuple(components))


def merged_span_profile(
    basis: ProductBasis,
    block: Union[str, Sequence[str]],
    subset_size: int,
    tol: Optional[float] = None,
) -> Dict[Tuple[int, ...], int]:
    """
    Span dimension of every ``subset_size``-subset of merged ``block`` components.

    Keys are sorted member indices. Used to certify rank patterns such as
    "every six merged AB components span the whole 4-dimensional space".

    Raises:
        LayoutError: If ``block`` names unknown parties or ``subset_size`` is
            outside ``1..size``
    """
    layout = basis.layout
    labels = tuple(sorted(block))
    if not labels or len(set(labels)) != len(labels):
        raise LayoutError(f"invalid block {block!r}")
    if not 1 <= subset_size <= basis.size:
        raise LayoutError(f"subset size must lie in 1..{basis.size}, got {subset_size}")
    group = sorted(layout.index(label) for label in labels)
    merged = [tensor_product([m.components[p] for p in group]) for m in basis.members]
    return {
        subset: span_dimension([merged[i] for i in subset], tol)
        for subset in itertools.combinations(range(basis.size), subset_size)
    }
