"""Symbolic orthogonal matrices of qubit product sets.

Each row lists the party-local qubit states of one member. Entries are
symbols: ``0`` and ``1`` for the computational pair, and a letter ``x`` with
its orthogonal partner ``x'`` for the pair

    |x>  = cos(t)|0> + sin(t)|1>
    |x'> = sin(t)|0> - cos(t)|1>

where ``t`` is the angle bound to the letter. Letters are bound per letter,
not per column, so one letter may appear in several columns.
"""

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bases import PartyLayout, ProductBasis, ProductVector, require_orthogonal
from .conf import settings as upb_settings
from .exceptions import AngleError, LayoutError, SymbolError
from .loggers import get_logger

logger = get_logger(__name__)

COMPUTATIONAL = "0"
LETTERS = ("a", "b", "c", "d")
WILDCARD = "*"
PRIMES = ("'", "′")
ANGLE_NAMES = ("alpha", "beta", "gamma", "delta")


@dataclass(frozen=True, order=True)
class Symbol:
    """
    One entry of a symbolic matrix.

    ``1`` is stored as the primed computational symbol so that every entry is
    a member of a pair ``{x, x'}``.
    """

    base: str
    primed: bool = False

    def __post_init__(self) -> None:
        if self.base not in (COMPUTATIONAL, WILDCARD, *LETTERS):
            raise SymbolError(f"unknown symbol base {self.base!r}")
        if self.base == WILDCARD and self.primed:
            raise SymbolError("the wildcard cannot be primed")

    @classmethod
    def parse(cls, text: str) -> "Symbol":
        token = text.strip()
        primed = token.endswith(PRIMES)
        if primed:
            token = token[:-1]
        if token == "1" and not primed:
            return cls(COMPUTATIONAL, True)
        if token == "1":
            raise SymbolError("1' is not a symbol")
        return cls(token, primed)

    @property
    def is_wildcard(self) -> bool:
        return self.base == WILDCARD

    @property
    def partner(self) -> "Symbol":
        return Symbol(self.base, not self.primed)

    def vector(self, angles: "AngleAssignment") -> np.ndarray:
        if self.is_wildcard:
            raise SymbolError("the wildcard cannot be instantiated")
        if self.base == COMPUTATIONAL:
            return np.array([0.0, 1.0] if self.primed else [1.0, 0.0], dtype=complex)
        theta = angles.for_letter(self.base)
        if self.primed:
            return np.array([math.sin(theta), -math.cos(theta)], dtype=complex)
        return np.array([math.cos(theta), math.sin(theta)], dtype=complex)

    def __str__(self) -> str:
        if self.base == COMPUTATIONAL:
            return "1" if self.primed else "0"
        return f"{self.base}'" if self.primed else self.base


@dataclass(frozen=True)
class AngleAssignment:
    """Angles bound to the letters a, b, c and d, each in the open interval (0, pi/2)."""

    alpha: float
    beta: float
    gamma: float
    delta: float

    def __post_init__(self) -> None:
        for name in ANGLE_NAMES:
            value = float(getattr(self, name))
            if not math.isfinite(value) or not 0.0 < value < math.pi / 2:
                raise AngleError(f"{name} must lie in (0, pi/2), got {value}")
            object.__setattr__(self, name, value)

    @classmethod
    def generic(cls) -> "AngleAssignment":
        """The configured GENERIC_ANGLES."""
        return cls(*upb_settings.GENERIC_ANGLES)

    @classmethod
    def symmetric(cls) -> "AngleAssignment":
        """All four angles equal to pi/4."""
        return cls.uniform(math.pi / 4)

    @classmethod
    def uniform(cls, angle: float) -> "AngleAssignment":
        return cls(angle, angle, angle, angle)

    @classmethod
    def from_dict(cls, data: Dict[str, float]) -> "AngleAssignment":
        try:
            return cls(*(data[name] for name in ANGLE_NAMES))
        except KeyError as e:
            raise AngleError(f"missing angle {e.args[0]!r}") from e

    def for_letter(self, letter: str) -> float:
        try:
            return getattr(self, ANGLE_NAMES[LETTERS.index(letter)])
        except ValueError:
            raise SymbolError(f"no angle is bound to {letter!r}")

    def as_tuple(self) -> Tuple[float, float, float, float]:
        return (self.alpha, self.beta, self.gamma, self.delta)

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(ANGLE_NAMES, self.as_tuple()))


def _tokenize(row: Union[str, Sequence[str]]) -> List[str]:
    if not isinstance(row, str):
        return [str(token) for token in row]
    tokens: List[str] = []
    for char in row.replace(" ", ""):
        if char in PRIMES and tokens:
            tokens[-1] += char
        else:
            tokens.append(char)
    return tokens


@dataclass(frozen=True)
class SymbolicUOM:
    """An ``s x n`` table of symbols, optionally with bound angles."""

    rows: Tuple[Tuple[Symbol, ...], ...]
    binding: Optional[AngleAssignment] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        rows = tuple(tuple(row) for row in self.rows)
        if not rows or not rows[0]:
            raise LayoutError("a symbolic matrix needs at least one row and column")
        width = len(rows[0])
        for index, row in enumerate(rows):
            if len(row) != width:
                raise LayoutError(
                    f"row {index} has {len(row)} symbols, expected {width}"
                )
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_strings(
        cls,
        rows: Sequence[Union[str, Sequence[str]]],
        binding: Optional[AngleAssignment] = None,
    ) -> "SymbolicUOM":
        """
        Build from rows like ``"01a'0"`` or ``["0", "1", "a'", "0"]``.

        Raises:
            SymbolError: Naming the row and column of an unknown symbol
        """
        parsed = []
        for r, row in enumerate(rows):
            symbols = []
            for c, token in enumerate(_tokenize(row)):
                try:
                    symbols.append(Symbol.parse(token))
                except SymbolError as e:
                    raise SymbolError(
                        f"row {r}, column {c}: {e}", row=r, column=c
                    ) from e
            parsed.append(tuple(symbols))
        return cls(tuple(parsed), binding)

    def to_strings(self) -> List[List[str]]:
        return [[str(symbol) for symbol in row] for row in self.rows]

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def column(self, index: int) -> Tuple[Symbol, ...]:
        return tuple(row[index] for row in self.rows)

    def fingerprint(self) -> Tuple[str, ...]:
        """Rows as strings, sorted: invariant under row permutation."""
        return tuple(sorted("".join(row) for row in self.to_strings()))

    def with_binding(self, binding: Optional[AngleAssignment]) -> "SymbolicUOM":
        return SymbolicUOM(self.rows, binding)

    def __str__(self) -> str:
        return "\n".join(" ".join(f"{s:2}" for s in row) for row in self.to_strings())


def symbols_used(uom: SymbolicUOM) -> List[str]:
    return sorted({str(symbol) for row in uom.rows for symbol in row})


def instantiate(
    uom: SymbolicUOM, angles: Optional[AngleAssignment] = None
) -> ProductBasis:
    """
    Numeric product basis of ``uom`` over a qubit layout.

    ``angles`` defaults to the matrix binding, then to the generic angles.

    Raises:
        SymbolError: If a wildcard is present
        OrthogonalityError: If two rows are not orthogonal once bound
    """
    if angles is None:
        angles = uom.binding or AngleAssignment.generic()
    members = []
    for r, row in enumerate(uom.rows):
        try:
            members.append(ProductVector(tuple(s.vector(angles) for s in row)))
        except SymbolError as e:
            raise SymbolError(f"row {r}: {e}", row=r) from e
    basis = ProductBasis(PartyLayout.qubits(uom.shape[1]), tuple(members))
    require_orthogonal(basis)
    return basis


class StepKind(str, enum.Enum):
    ROW_PERMUTE = "row_permute"
    COLUMN_PERMUTE = "column_permute"
    SYMBOL_SWAP = "symbol_swap"
    BASIS_RELABEL = "basis_relabel"


def _inverse_order(order: Sequence[int]) -> Tuple[int, ...]:
    inverse = [0] * len(order)
    for new, old in enumerate(order):
        inverse[old] = new
    return tuple(inverse)


@dataclass(frozen=True)
class TransformStep:
    """
    One equivalence move on a symbolic matrix.

    Permutations build the new matrix with row (column) ``i`` taken from the
    old row (column) ``order[i]``. ``symbol_swap`` exchanges ``x`` and ``x'``
    in one column (``0`` and ``1`` for the computational base).
    ``basis_relabel`` exchanges the pair of ``first`` with the pair of
    ``second`` in one column.
    """

    kind: StepKind
    params: Tuple = ()

    @classmethod
    def row_permute(cls, order: Sequence[int]) -> "TransformStep":
        return cls(StepKind.ROW_PERMUTE, tuple(int(i) for i in order))

    @classmethod
    def column_permute(cls, order: Sequence[int]) -> "TransformStep":
        return cls(StepKind.COLUMN_PERMUTE, tuple(int(i) for i in order))

    @classmethod
    def symbol_swap(cls, column: int, base: str = COMPUTATIONAL) -> "TransformStep":
        return cls(StepKind.SYMBOL_SWAP, (int(column), base))

    @classmethod
    def basis_relabel(cls, column: int, first: str, second: str) -> "TransformStep":
        return cls(StepKind.BASIS_RELABEL, (int(column), first, second))

    def inverse(self) -> "TransformStep":
        if self.kind in (StepKind.ROW_PERMUTE, StepKind.COLUMN_PERMUTE):
            return TransformStep(self.kind, _inverse_order(self.params))
        return self

    def as_dict(self) -> Dict[str, object]:
        return {"kind": self.kind.value, "params": list(self.params)}

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "TransformStep":
        try:
            kind = StepKind(data["kind"])
        except (KeyError, ValueError) as e:
            raise LayoutError(f"invalid transform step {data!r}") from e
        return cls(kind, tuple(data.get("params", ())))

    def __str__(self) -> str:
        return f"{self.kind.value}{self.params}"


def _check_order(order: Sequence[int], size: int, what: str) -> None:
    if sorted(order) != list(range(size)):
        raise LayoutError(f"{what} order {tuple(order)} is not a permutation of {size}")


def _check_column(column: int, width: int) -> None:
    if not 0 <= column < width:
        raise LayoutError(f"column {column} outside 0..{width - 1}")


def _check_base(base: str) -> None:
    if base not in (COMPUTATIONAL, *LETTERS):
        raise LayoutError(f"{base!r} does not name a symbol pair")


def apply_transform(uom: SymbolicUOM, step: TransformStep) -> SymbolicUOM:
    """
    Apply one equivalence move.

    Raises:
        LayoutError: If the step parameters do not fit the matrix
    """
    height, width = uom.shape
    rows = uom.rows

    if step.kind is StepKind.ROW_PERMUTE:
        _check_order(step.params, height, "row")
        new_rows = tuple(rows[i] for i in step.params)
    elif step.kind is StepKind.COLUMN_PERMUTE:
        _check_order(step.params, width, "column")
        new_rows = tuple(tuple(row[i] for i in step.params) for row in rows)
    elif step.kind is StepKind.SYMBOL_SWAP:
        column, base = step.params
        _check_column(column, width)
        _check_base(base)
        new_rows = tuple(
            tuple(
                s.partner if (c == column and s.base == base) else s
                for c, s in enumerate(row)
            )
            for row in rows
        )
    elif step.kind is StepKind.BASIS_RELABEL:
        column, first, second = step.params
        _check_column(column, width)
        _check_base(first)
        _check_base(second)
        swap = {first: second, second: first}

        def relabel(symbol: Symbol) -> Symbol:
            if symbol.base in swap:
                return Symbol(swap[symbol.base], symbol.primed)
            return symbol

        new_rows = tuple(
            tuple(relabel(s) if c == column else s for c, s in enumerate(row))
            for row in rows
        )
    else:
        raise LayoutError(f"unknown step kind {step.kind!r}")

    return SymbolicUOM(new_rows, uom.binding)


def apply_steps(uom: SymbolicUOM, steps: Sequence[TransformStep]) -> SymbolicUOM:
    for step in steps:
        uom = apply_transform(uom, step)
    return uom


def image_partition_labels(
    step: TransformStep, labels: Sequence[str]
) -> Dict[str, str]:
    """
    Where each party label of the old matrix lands after ``step``.

    Only column permutations move parties; every other move keeps labels.
    """
    if step.kind is not StepKind.COLUMN_PERMUTE:
        return {label: label for label in labels}
    return {labels[old]: labels[new] for new, old in enumerate(step.params)}


def verify_chain(
    chain: Sequence[Tuple[SymbolicUOM, Sequence[TransformStep]]]
) -> bool:
    """
    True when each matrix, moved by its steps, equals the next one symbol for symbol.

    The steps attached to the last matrix are ignored.

    Raises:
        LayoutError: If ``chain`` is empty
    """
    if not chain:
        raise LayoutError("a transformation chain needs at least one matrix")
    for index, ((uom, steps), (target, _)) in enumerate(zip(chain, chain[1:])):
        try:
            moved = apply_steps(uom, steps)
        except LayoutError as e:
            logger.debug(f"chain link {index} has invalid steps: {e}")
            return False
        if moved != target:
            logger.debug(f"chain link {index} does not reproduce matrix {index + 1}")
            return False
    return True


def _candidate_moves(uom: SymbolicUOM, letters: Sequence[str]) -> Iterator[TransformStep]:
    width = uom.shape[1]
    identity = tuple(range(width))
    for order in itertools.permutations(range(width)):
        if order != identity:
            yield TransformStep.column_permute(order)
    for column in range(width):
        bases = sorted({s.base for s in uom.column(column) if not s.is_wildcard})
        for base in bases:
            yield TransformStep.symbol_swap(column, base)
        for first in bases:
            for second in letters:
                if second != first and (second not in bases or first < second):
                    yield TransformStep.basis_relabel(column, first, second)


def _matching_row_order(moved: SymbolicUOM, target: SymbolicUOM) -> Tuple[int, ...]:
    available = list(range(moved.shape[0]))
    order = []
    for row in target.rows:
        index = next(i for i in available if moved.rows[i] == row)
        available.remove(index)
        order.append(index)
    return tuple(order)


def equivalent(
    first: SymbolicUOM, second: SymbolicUOM, budget: Optional[int] = None
) -> Optional[List[TransformStep]]:
    """
    Search for equivalence moves turning ``first`` into ``second``.

    Iterative deepening over column permutations, symbol swaps and pair
    relabels; matrices are compared by their sorted-row fingerprint and a
    final row permutation aligns the rows. ``None`` means nothing was found
    within ``budget`` nodes, not that the matrices are inequivalent.

    Raises:
        LayoutError: If the shapes differ
    """
    if first.shape != second.shape:
        raise LayoutError(f"shape mismatch {first.shape} vs {second.shape}")
    if budget is None:
        budget = upb_settings.EQUIVALENCE_BUDGET

    letters = sorted(
        {s.base for uom in (first, second) for row in uom.rows for s in row}
        - {WILDCARD}
    )
    goal = second.fingerprint()
    nodes = 0

    def finish(moved: SymbolicUOM, path: List[TransformStep]) -> List[TransformStep]:
        order = _matching_row_order(moved, second)
        if order != tuple(range(len(order))):
            path = path + [TransformStep.row_permute(order)]
        logger.debug(f"equivalence found after {nodes} nodes: {[str(s) for s in path]}")
        return path

    if first.fingerprint() == goal:
        return finish(first, [])

    seen: Dict[Tuple[str, ...], int] = {first.fingerprint(): 0}
    depth_limit = 1
    while nodes < budget:
        stack: List[Tuple[SymbolicUOM, List[TransformStep]]] = [(first, [])]
        grew = False
        while stack:
            uom, path = stack.pop()
            children = []
            for step in _candidate_moves(uom, letters):
                nodes += 1
                if nodes > budget:
                    logger.warning(f"equivalence search exhausted {budget} nodes")
                    return None
                child = apply_transform(uom, step)
                key = child.fingerprint()
                depth = len(path) + 1
                if key == goal:
                    return finish(child, path + [step])
                if seen.get(key, depth_limit + 1) < depth:
                    continue
                seen[key] = depth
                if depth < depth_limit:
                    children.append((child, path + [step]))
                else:
                    grew = True
            stack.extend(reversed(children))
        if not grew:
            logger.debug(f"equivalence search closed after {nodes} nodes")
            return None
        depth_limit += 1
    return None


def submatrix(
    uom: SymbolicUOM, rows: Sequence[int], columns: Sequence[int]
) -> SymbolicUOM:
    height, width = uom.shape
    if any(not 0 <= r < height for r in rows) or any(not 0 <= c < width for c in columns):
        raise LayoutError(f"submatrix indices out of range for shape {uom.shape}")
    return SymbolicUOM(
        tuple(tuple(uom.rows[r][c] for c in columns) for r in rows), uom.binding
    )


def cofactor(
    uom: SymbolicUOM, rows: Sequence[int], columns: Sequence[int]
) -> SymbolicUOM:
    """Submatrix left after deleting ``rows`` and ``columns``."""
    height, width = uom.shape
    keep_rows = [r for r in range(height) if r not in set(rows)]
    keep_columns = [c for c in range(width) if c not in set(columns)]
    if not keep_rows or not keep_columns:
        raise LayoutError("cofactor would be empty")
    return submatrix(uom, keep_rows, keep_columns)


def rename_columns(uom: SymbolicUOM) -> SymbolicUOM:
    """
    Give every column its own letter: column 0 uses a, column 1 uses b, ...

    Raises:
        SymbolError: If a column mixes two letters or there are more than
            four columns
    """
    height, width = uom.shape
    if width > len(LETTERS):
        raise SymbolError(f"cannot rename {width} columns with {len(LETTERS)} letters")
    steps = []
    for column in range(width):
        letters = sorted({s.base for s in uom.column(column)} & set(LETTERS))
        if len(letters) > 1:
            raise SymbolError(
                f"column {column} mixes letters {letters}", column=column
            )
        if letters and letters[0] != LETTERS[column]:
            steps.append(TransformStep.basis_relabel(column, letters[0], LETTERS[column]))
    return apply_steps(uom, steps)


class Size9Category(str, enum.Enum):
    CAT1 = "cat1"
    CAT2 = "cat2"
    CAT3 = "cat3"
    NONE = "none"


CATEGORY_TEMPLATES: Dict[Size9Category, Tuple[str, ...]] = {
    Size9Category.CAT1: (
        "0***", "0***", "0***", "0***", "*0**", "*0**", "****", "****", "****",
    ),
    Size9Category.CAT2: (
        "0***", "0***", "0***", "*0**", "*0**", "*0**", "****", "****", "****",
    ),
    Size9Category.CAT3: (
        "0***", "0***", "0***", "*0**", "*0**", "**0d", "**0d", "****", "****",
    ),
}


def category_templates() -> Dict[Size9Category, SymbolicUOM]:
    """Structural templates of the three size-9 categories; ``*`` matches nothing."""
    return {
        category: SymbolicUOM.from_strings(rows)
        for category, rows in CATEGORY_TEMPLATES.items()
    }


def _identical_groups(
    uom: SymbolicUOM, column: int, rows: Sequence[int], size: int
) -> Iterator[Tuple[int, ...]]:
    """Every ``size``-subset of ``rows`` sharing one non-wildcard symbol in ``column``."""
    buckets: Dict[Symbol, List[int]] = {}
    for r in rows:
        symbol = uom.rows[r][column]
        if not symbol.is_wildcard:
            buckets.setdefault(symbol, []).append(r)
    for symbol in sorted(buckets):
        yield from itertools.combinations(buckets[symbol], size)


def _splits(
    uom: SymbolicUOM, first_size: int, second_size: int
) -> Iterator[Tuple[Tuple[int, int], Tuple[int, ...], Tuple[int, ...]]]:
    height, width = uom.shape
    rows = range(height)
    for first_column, second_column in itertools.permutations(range(width), 2):
        for head in _identical_groups(uom, first_column, rows, first_size):
            remaining = [r for r in rows if r not in head]
            for tail in _identical_groups(uom, second_column, remaining, second_size):
                yield (first_column, second_column), head, tail


def _has_dependent_pair(
    uom: SymbolicUOM, columns: Sequence[int], rows: Sequence[int]
) -> bool:
    merged = {}
    for r in rows:
        entries = tuple(uom.rows[r][c] for c in columns)
        if any(s.is_wildcard for s in entries):
            continue
        if entries in merged:
            return True
        merged[entries] = r
    return False


def classify_size9_category(uom: SymbolicUOM) -> Size9Category:
    """
    Structural category of a 9 x 4 symbolic matrix.

    * cat1: one column holds four identical symbols and another column two
      identical symbols among the remaining rows.
    * cat2: the same with three and three.
    * cat3: three and two, and two further rows whose entries in the two
      untouched columns coincide (linearly dependent merged components).

    Anything else is ``none``; near misses are not promoted.

    Raises:
        LayoutError: Unless the matrix is 9 x 4
    """
    if uom.shape != (9, 4):
        raise LayoutError(f"category classification needs a 9x4 matrix, got {uom.shape}")

    if any(True for _ in _splits(uom, 4, 2)):
        return Size9Category.CAT1
    if any(True for _ in _splits(uom, 3, 3)):
        return Size9Category.CAT2
    for columns, head, tail in _splits(uom, 3, 2):
        others = [c for c in range(4) if c not in columns]
        rest = [r for r in range(9) if r not in head and r not in tail]
        if _has_dependent_pair(uom, others, rest):
            return Size9Category.CAT3
    return Size9Category.NONE
