"""JSON views of the objects the ``upb`` command prints."""

import dataclasses
import enum
import json
import uuid
from typing import Any, Dict, Sequence

import numpy as np

from .bases import (
    ExtendibilityVerdict,
    PartyLayout,
    ProductBasis,
    ProductVector,
    product_basis,
)
from .catalog import CatalogEntry, CountReport
from .coarse import GrainingReport, PartitionVerdict
from .constants import JSON_INDENT
from .exceptions import LayoutError
from .gme import GmeResult, MonotonicityReport
from .states import DensityMatrix, PPTResult
from .uom import SymbolicUOM, TransformStep
from .utils import format_partitions


def to_jsonable(value: Any) -> Any:
    """
    Recursively convert numpy scalars, arrays, complex numbers, enums and
    tuples into plain JSON types.

    Complex numbers always become ``[re, im]`` pairs.
    """
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, uuid.UUID):
        return str(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (float, np.floating)):
        return float(value)
    return value


def vector_to_list(vector: ProductVector) -> list:
    return [to_jsonable(component) for component in vector.components]


def basis_to_dict(basis: ProductBasis) -> Dict[str, Any]:
    return {
        "layout": list(basis.layout.dims),
        "labels": list(basis.layout.labels),
        "vectors": [vector_to_list(m) for m in basis.members],
    }


def uom_to_dict(uom: SymbolicUOM) -> Dict[str, Any]:
    data: Dict[str, Any] = {"rows": uom.to_strings()}
    if uom.binding is not None:
        data["angles"] = uom.binding.as_dict()
    return data


def entry_to_dict(entry: CatalogEntry) -> Dict[str, Any]:
    data = uom_to_dict(entry.uom)
    data.update(
        {
            "name": entry.name,
            "size": entry.size,
            "provenance": entry.provenance.value,
            "description": entry.description,
        }
    )
    return data


def steps_to_list(steps: Sequence[TransformStep]) -> list:
    return [step.as_dict() for step in steps]


def verdict_to_dict(verdict: ExtendibilityVerdict) -> Dict[str, Any]:
    return {
        "unextendible": verdict.unextendible,
        "method": verdict.method,
        "nodes": verdict.nodes,
        "witness": vector_to_list(verdict.witness) if verdict.witness is not None else None,
    }


def partition_verdict_to_dict(entry: PartitionVerdict) -> Dict[str, Any]:
    data = verdict_to_dict(entry.verdict)
    data["partition"] = str(entry.partition)
    data["layout"] = list(entry.layout.dims)
    return data


def graining_report_to_dict(report: GrainingReport) -> Dict[str, Any]:
    return {
        "size": report.size,
        "finest": partition_verdict_to_dict(report.finest),
        "partitions": [partition_verdict_to_dict(e) for e in report.entries],
        "2x2x4": format_partitions(report.three_block_upbs),
        "4x4": format_partitions(report.two_block_upbs),
    }


def count_report_to_dict(report: CountReport) -> Dict[str, Any]:
    return dataclasses.asdict(report)


def density_to_dict(rho: DensityMatrix, include_matrix: bool = False) -> Dict[str, Any]:
    """
    Summary of ``rho``; with ``include_matrix`` also the row-major ``entries``
    as ``[re, im]`` pairs, which makes the document readable by
    ``density_from_dict``.
    """
    data: Dict[str, Any] = {
        "source": rho.source,
        "dim": rho.layout.total_dim,
        "layout": list(rho.layout.dims),
        "labels": list(rho.layout.labels),
        "trace": float(np.trace(rho.op).real),
        "rank": rho.rank(),
        "spectrum": to_jsonable(rho.spectrum()),
    }
    if include_matrix:
        data["entries"] = to_jsonable(rho.op)
    return data


def ppt_to_dict(result: PPTResult) -> Dict[str, Any]:
    return to_jsonable(dataclasses.asdict(result))


def gme_result_to_dict(result: GmeResult) -> Dict[str, Any]:
    return {
        "partition": result.partition,
        "max_overlap": float(result.max_overlap),
        "G": float(result.G),
        "argmax": vector_to_list(result.argmax),
        "restarts_used": result.restarts_used,
        "converged_iterations": result.converged_iterations,
        "best_restart": result.best_restart,
        "monotone": result.monotone,
    }


def monotonicity_to_dict(report: MonotonicityReport) -> Dict[str, Any]:
    return {"ok": report.ok, "G": to_jsonable(report.values)}


def claim_to_dict(claim) -> Dict[str, Any]:
    return {
        "claim_id": claim.claim_id,
        "description": claim.description,
        "outcome": str(claim.outcome),
        "computed": to_jsonable(claim.computed),
        "expected": to_jsonable(claim.expected),
        "runtime": round(float(claim.runtime), 6),
    }


def report_to_dict(report) -> Dict[str, Any]:
    return {
        "run_id": str(report.run_id),
        "passed": report.passed,
        "claims": [claim_to_dict(c) for c in report.claims],
    }


def dumps(data: Any) -> str:
    """Deterministic JSON: sorted keys, fixed indent."""
    return json.dumps(to_jsonable(data), sort_keys=True, indent=JSON_INDENT)


def _complex(value: Any) -> complex:
    if isinstance(value, (list, tuple)):
        if len(value) != 2:
            raise LayoutError(f"complex entries are [re, im] pairs, got {value!r}")
        return complex(float(value[0]), float(value[1]))
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    raise LayoutError(f"cannot read {value!r} as a number")


def _amplitudes(values: Sequence[Any]) -> np.ndarray:
    return np.array([_complex(v) for v in values], dtype=complex)


def _layout_from_dict(data: Dict[str, Any]) -> PartyLayout:
    try:
        return PartyLayout(tuple(data["layout"]), tuple(data.get("labels") or ()))
    except (KeyError, TypeError) as e:
        raise LayoutError(f"missing or invalid 'layout': {e}") from e


def basis_from_dict(data: Dict[str, Any]) -> ProductBasis:
    """
    Read a ``{"layout", "labels", "vectors"}`` document.

    Components are normalized on construction.

    Raises:
        LayoutError: If the document is malformed or a vector does not fit the layout
    """
    if not isinstance(data, dict) or "vectors" not in data:
        raise LayoutError("a product basis document needs 'layout' and 'vectors'")
    layout = _layout_from_dict(data)
    try:
        vectors = [[_amplitudes(c) for c in vector] for vector in data["vectors"]]
    except TypeError as e:
        raise LayoutError(f"malformed vectors: {e}") from e
    basis = product_basis(vectors, layout)
    for index, member in enumerate(basis.members):
        if member.dims != layout.dims:
            raise LayoutError(f"vector {index} has dims {member.dims}, expected {layout.dims}")
    return basis


def density_from_dict(data: Dict[str, Any]) -> DensityMatrix:
    """
    Read a ``{"dim", "layout", "entries"}`` document.

    ``entries`` is row-major: either ``dim`` rows of ``dim`` numbers or one
    flat list of ``dim * dim`` numbers.

    Raises:
        LayoutError: If the entries are missing or do not match the layout
    """
    if not isinstance(data, dict) or "entries" not in data:
        raise LayoutError("a density document needs 'layout' and 'entries'")
    layout = _layout_from_dict(data)
    dim = layout.total_dim
    if "dim" in data and data["dim"] != dim:
        raise LayoutError(f"dim {data['dim']!r} does not match layout {layout.dims}")
    entries = data["entries"]
    try:
        if len(entries) == dim * dim:
            op = _amplitudes(entries).reshape(dim, dim)
        else:
            op = np.array([_amplitudes(row) for row in entries], dtype=complex)
    except (TypeError, ValueError) as e:
        raise LayoutError(f"malformed entries: {e}") from e
    if op.shape != (dim, dim):
        raise LayoutError(f"entries {op.shape} do not match layout {layout.dims}")
    return DensityMatrix(op, layout, str(data.get("source", "")))
