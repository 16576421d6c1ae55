"""Bundled four-qubit UPBs, transformation chains and table ingestion."""

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .bases import check_unextendible
from .coarse import classify_upb_across_grainings
from .exceptions import CatalogError, OrthogonalityError, SymbolError, UPBError
from .loggers import get_logger
from .uom import (
    AngleAssignment,
    SymbolicUOM,
    TransformStep,
    instantiate,
)

logger = get_logger(__name__)


class Provenance(str, enum.Enum):
    BUNDLED = "bundled"
    EXTERNAL = "external-table"


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    uom: SymbolicUOM
    provenance: Provenance = Provenance.BUNDLED
    description: str = ""

    @property
    def size(self) -> int:
        return self.uom.shape[0]


# Rows as printed, one string per member.
BUILTIN_ROWS: Dict[str, Tuple[Tuple[str, ...], str]] = {
    "size6": (
        ("0000", "0aa1", "10ba", "1ab'b", "a1a'b'", "a'a'1a'"),
        "the only four-qubit UPB of size 6",
    ),
    "size7": (
        ("0000", "0aa1", "0a'1a", "100b", "1a'ab'", "aa10", "a'1a'a'"),
        "a four-qubit UPB of size 7",
    ),
    "threequbit": (
        ("000", "1aa'", "a'1a", "aa'1"),
        "the three-qubit UPB of size 4",
    ),
    "size9-11th": (
        ("001a", "01a0", "0a01", "110a", "1a10", "10a1", "a000", "a111", "a'a'a'a'"),
        "11th size-9 four-qubit UPB, chain starting form",
    ),
    "size9-11th-table": (
        ("0000", "01aa", "0a1a'", "1110", "1a0a", "10aa'", "a01a", "a10a'", "a'a'a'1"),
        "11th size-9 four-qubit UPB as listed in the external table",
    ),
    "size9-11th-renamed": (
        ("001d", "01c0", "0b01", "110d", "1b10", "10c1", "a000", "a111", "a'b'c'd'"),
        "11th size-9 four-qubit UPB with one letter per column",
    ),
}


def builtin(name: str) -> CatalogEntry:
    """
    Bundled entry by name.

    Raises:
        CatalogError: If ``name`` is unknown
    """
    try:
        rows, description = BUILTIN_ROWS[name]
    except KeyError:
        raise CatalogError(
            f"unknown builtin {name!r}; choose from {', '.join(list_builtins())}"
        )
    return CatalogEntry(name, SymbolicUOM.from_strings(rows), description=description)


def list_builtins() -> List[str]:
    return list(BUILTIN_ROWS)


# Chain of the 11th size-9 UPB showing AB|CD and AC|DB are equivalent.
FAMILY11_CHAIN: Tuple[Tuple[Tuple[str, ...], Tuple[TransformStep, ...]], ...] = (
    (
        BUILTIN_ROWS["size9-11th-table"][0],
        (
            TransformStep.symbol_swap(2, "0"),
            TransformStep.basis_relabel(3, "0", "a"),
        ),
    ),
    (
        BUILTIN_ROWS["size9-11th"][0],
        (TransformStep.column_permute((0, 2, 3, 1)),),
    ),
    (
        ("01a0", "0a01", "001a", "10a1", "110a", "1a10", "a000", "a111", "a'a'a'a'"),
        (TransformStep.row_permute((2, 0, 1, 4, 5, 3, 6, 7, 8)),),
    ),
    (
        ("001a", "01a0", "0a01", "110a", "1a10", "10a1", "a000", "a111", "a'a'a'a'"),
        (),
    ),
)

# Chain showing AB|CD and CD|BA are the same up to rows and local unitaries.
FAMILY11_1_CHAIN: Tuple[Tuple[Tuple[str, ...], Tuple[TransformStep, ...]], ...] = (
    (
        BUILTIN_ROWS["size9-11th"][0],
        (TransformStep.column_permute((2, 3, 0, 1)),),
    ),
    (
        ("1a00", "a001", "010a", "0a11", "101a", "a110", "00a0", "11a1", "a'a'a'a'"),
        (TransformStep.row_permute((6, 2, 3, 4, 0, 7, 1, 5, 8)),),
    ),
    (
        ("00a0", "010a", "0a11", "101a", "1a00", "11a1", "a001", "a110", "a'a'a'a'"),
        (TransformStep.column_permute((0, 1, 3, 2)),),
    ),
    (
        ("000a", "01a0", "0a11", "10a1", "1a00", "111a", "a010", "a101", "a'a'a'a'"),
        (TransformStep.symbol_swap(2, "0"),),
    ),
    (
        ("001a", "01a0", "0a01", "10a1", "1a10", "110a", "a000", "a111", "a'a'a'a'"),
        (TransformStep.row_permute((0, 1, 2, 5, 4, 3, 6, 7, 8)),),
    ),
    (
        ("001a", "01a0", "0a01", "110a", "1a10", "10a1", "a000", "a111", "a'a'a'a'"),
        (),
    ),
)

CHAINS = {"family11": FAMILY11_CHAIN, "family11-1": FAMILY11_1_CHAIN}


def chain(name: str) -> List[Tuple[SymbolicUOM, Tuple[TransformStep, ...]]]:
    """
    Printed transformation chain as ``(matrix, steps)`` links.

    Raises:
        CatalogError: If ``name`` is unknown
    """
    try:
        links = CHAINS[name]
    except KeyError:
        raise CatalogError(f"unknown chain {name!r}; choose from {', '.join(CHAINS)}")
    return [(SymbolicUOM.from_strings(rows), steps) for rows, steps in links]


def entry_from_dict(data: dict, index: int) -> CatalogEntry:
    """
    One table entry from its JSON object.

    Raises:
        CatalogError: With ``index`` set, for any malformed field
    """
    if not isinstance(data, dict) or "rows" not in data:
        raise CatalogError(f"entry {index}: expected an object with 'rows'", index=index)
    try:
        binding = (
            AngleAssignment.from_dict(data["angles"]) if data.get("angles") else None
        )
        uom = SymbolicUOM.from_strings(data["rows"], binding)
    except (UPBError, TypeError) as e:
        raise CatalogError(f"entry {index}: {e}", index=index) from e
    return CatalogEntry(
        name=str(data.get("name", f"entry-{index + 1}")),
        uom=uom,
        provenance=Provenance.EXTERNAL,
        description=str(data.get("description", "")),
    )


def parse_table(documents: Sequence[dict], verify: bool = False) -> List[CatalogEntry]:
    """
    Validate table entries in order.

    Every entry is instantiated (at its own angles or the generic ones) and
    checked for orthogonality. With ``verify`` the unextendibility of the
    full four-party set is re-checked as well.

    Raises:
        CatalogError: Naming the index of the first bad entry
    """
    if not isinstance(documents, list):
        raise CatalogError("a UPB table must be a JSON array")
    entries = []
    for index, data in enumerate(documents):
        entry = entry_from_dict(data, index)
        try:
            basis = instantiate(entry.uom)
        except (OrthogonalityError, SymbolError) as e:
            raise CatalogError(f"entry {index}: {e}", index=index) from e
        if verify and not check_unextendible(basis).unextendible:
            raise CatalogError(f"entry {index}: set is extendible", index=index)
        entries.append(entry)
    logger.info(f"loaded {len(entries)} table entries (verify={verify})")
    return entries


def load_table(path: Union[str, Path], verify: bool = False) -> List[CatalogEntry]:
    """
    Read a JSON array of UOM objects.

    The order of the file is kept; count reproduction relies on it.

    Raises:
        CatalogError: If the file cannot be read or parsed, or an entry is invalid
    """
    try:
        documents = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, ValueError) as e:
        raise CatalogError(f"cannot read UPB table {path}: {e}") from e
    return parse_table(documents, verify)


@dataclass
class CountReport:
    count_224: int = 0
    count_44: int = 0
    witnesses: Dict[str, Dict[str, List[str]]] = field(default_factory=dict)


def reproduce_counts(
    entries: Sequence[CatalogEntry], angles: Optional[AngleAssignment] = None
) -> CountReport:
    """
    Count coarse-grained UPBs over all entries.

    ``count_224`` sums the single-pair (2x2x4) UPBs and ``count_44`` the 2+2
    (4x4) UPBs; ``witnesses`` lists the partitions per entry name.
    """
    report = CountReport()
    for entry in entries:
        grainings = classify_upb_across_grainings(instantiate(entry.uom, angles))
        three = [str(p) for p in grainings.three_block_upbs]
        two = [str(p) for p in grainings.two_block_upbs]
        report.count_224 += len(three)
        report.count_44 += len(two)
        report.witnesses[entry.name] = {"2x2x4": three, "4x4": two}
        logger.debug(f"{entry.name}: 2x2x4 {three}, 4x4 {two}")
    return report
