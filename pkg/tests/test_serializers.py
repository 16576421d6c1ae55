"""Tests for JSON views of domain objects."""

import json
import uuid

import numpy as np
import pytest

from django_upb.bases import check_unextendible
from django_upb.catalog import builtin, reproduce_counts
from django_upb.exceptions import LayoutError
from django_upb.models import Outcome
from django_upb.serializers import (
    basis_from_dict,
    basis_to_dict,
    claim_to_dict,
    count_report_to_dict,
    density_from_dict,
    density_to_dict,
    dumps,
    entry_to_dict,
    graining_report_to_dict,
    steps_to_list,
    to_jsonable,
    uom_to_dict,
    verdict_to_dict,
)
from django_upb.uom import SymbolicUOM, TransformStep, instantiate


class TestToJsonable:
    """Test conversion to plain JSON types."""

    def test_numpy_scalars(self):
        """Test numpy integers, floats and booleans."""
        assert to_jsonable({"a": np.int64(3), "b": np.float64(0.5), "c": np.bool_(True)}) == {
            "a": 3, "b": 0.5, "c": True,
        }

    def test_complex(self):
        """Test that every complex amplitude becomes an [re, im] pair."""
        assert to_jsonable(1 + 0j) == [1.0, 0.0]
        assert to_jsonable(np.array([0.5 + 0j])) == [[0.5, 0.0]]
        assert to_jsonable(np.complex128(0.5 - 0.25j)) == [0.5, -0.25]

    def test_arrays_tuples_enums_and_uuids(self):
        """Test containers and identifiers."""
        run_id = uuid.uuid4()
        data = to_jsonable({"v": np.array([1.0, 2.0]), "t": (1, 2), "o": Outcome.PASS, "r": run_id})
        assert data == {"v": [1.0, 2.0], "t": [1, 2], "o": "pass", "r": str(run_id)}

    def test_dumps_is_deterministic(self):
        """Test sorted keys."""
        assert dumps({"b": 1, "a": 2}).index('"a"') < dumps({"b": 1, "a": 2}).index('"b"')


class TestDomainViews:
    """Test JSON views of bases, reports and steps."""

    def test_basis_round_trip(self, size6_basis):
        """Test that a written basis reads back unchanged."""
        data = json.loads(dumps(basis_to_dict(size6_basis)))
        assert data["layout"] == [2, 2, 2, 2]
        assert data["labels"] == ["A", "B", "C", "D"]
        assert data["vectors"][0][0] == [[1.0, 0.0], [0.0, 0.0]]
        restored = basis_from_dict(data)
        for first, second in zip(restored.members, size6_basis.members):
            assert np.allclose(first.ket(), second.ket())

    def test_entry(self):
        """Test a catalog entry view."""
        data = entry_to_dict(builtin("threequbit"))
        assert data["rows"] == [["0", "0", "0"], ["1", "a", "a'"], ["a'", "1", "a"], ["a", "a'", "1"]]
        assert data["provenance"] == "bundled"
        assert data["size"] == 4

    def test_verdict_with_witness(self):
        """Test that witnesses are listed per party."""
        verdict = check_unextendible(instantiate(SymbolicUOM.from_strings(["00", "11"])))
        data = verdict_to_dict(verdict)
        assert data["unextendible"] is False
        assert len(data["witness"]) == 2

    def test_graining_report(self, eleventh_report):
        """Test the report of the 11th size-9 UPB."""
        data = graining_report_to_dict(eleventh_report)
        assert len(data["partitions"]) == 13
        assert data["finest"]["partition"] == "A|B|C|D"
        assert len(data["2x2x4"]) == 6

    def test_counts(self):
        """Test the count report view."""
        data = count_report_to_dict(reproduce_counts([builtin("size6")]))
        assert data["count_224"] == 1
        assert data["witnesses"]["size6"]["2x2x4"] == ["AB|C|D"]

    def test_steps(self):
        """Test transform step lists."""
        assert steps_to_list([TransformStep.symbol_swap(2)]) == [
            {"kind": "symbol_swap", "params": [2, "0"]}
        ]

    def test_claim(self, claim_result):
        """Test the claim view."""
        data = claim_to_dict(claim_result)
        assert data["outcome"] == "pass"
        assert data["runtime"] == 0.25


class TestDensityDocuments:
    """Test density matrix documents."""

    def test_round_trip(self, rho_generic):
        """Test that a written state reads back unchanged."""
        data = json.loads(dumps(density_to_dict(rho_generic, include_matrix=True)))
        assert data["rank"] == 7
        assert data["dim"] == 16
        assert data["layout"] == [2, 2, 2, 2]
        assert len(data["entries"]) == 16
        assert data["entries"][0][0] == pytest.approx([rho_generic.op[0, 0].real, 0.0], abs=1e-12)
        restored = density_from_dict(data)
        assert np.allclose(restored.op, rho_generic.op)
        assert restored.source == "size9-11th-renamed"

    def test_summary_omits_matrix(self, rho_generic):
        """Test that the matrix is opt-in."""
        assert "entries" not in density_to_dict(rho_generic)

    @pytest.mark.parametrize(
        "data",
        [
            {"layout": [2, 2]},
            {"entries": [[1]]},
            {"layout": [2, 2], "entries": [[1, 0], [0, 0]]},
            {"layout": [2, 2], "dim": 8, "entries": [[1, 0, 0, 0]] * 4},
            {"layout": [2, 1], "entries": [[1, [0, 1, 2]], [0, 0]]},
            {"layout": [2, 1], "entries": [[1, "x"], [0, 0]]},
        ],
    )
    def test_malformed(self, data):
        """Test that malformed documents raise LayoutError."""
        with pytest.raises(LayoutError):
            density_from_dict(data)

    def test_malformed_basis(self):
        """Test that basis documents need vectors that fit the layout."""
        with pytest.raises(LayoutError):
            basis_from_dict({"layout": [2, 2]})
        with pytest.raises(LayoutError):
            basis_from_dict({"layout": [2, 2], "vectors": [[[1, 0], [1, 0, 0]]]})


class TestDocumentFormats:
    """Test reading hand-written documents in the exchange format."""

    def test_product_basis_document(self):
        """Test a basis given by layout, labels and [re, im] amplitudes."""
        data = {
            "layout": [2, 2],
            "labels": ["A", "B"],
            "vectors": [
                [[[1, 0], [0, 0]], [[1, 0], [0, 0]]],
                [[[0, 0], [2, 0]], [[0, 0], [0, 3]]],
            ],
        }
        basis = basis_from_dict(data)
        assert basis.layout.labels == ("A", "B")
        assert basis.size == 2
        assert np.allclose(basis.members[1].components[0], [0, 1])
        assert np.allclose(basis.members[1].components[1], [0, 1j])
        again = basis_from_dict(json.loads(dumps(basis_to_dict(basis))))
        for first, second in zip(again.members, basis.members):
            assert np.allclose(first.ket(), second.ket())

    def test_density_document_with_nested_rows(self):
        """Test a two-qubit state given as rows of [re, im] pairs."""
        zero, half = [0, 0], [0.5, 0]
        data = {
            "dim": 4,
            "layout": [2, 2],
            "entries": [
                [half, zero, zero, half],
                [zero, zero, zero, zero],
                [zero, zero, zero, zero],
                [half, zero, zero, half],
            ],
        }
        rho = density_from_dict(data)
        assert rho.layout.dims == (2, 2)
        assert rho.op[0, 3] == pytest.approx(0.5)

    def test_density_document_with_flat_entries(self):
        """Test that a flat row-major list reads the same as nested rows."""
        flat = [[0.5, 0], [0, 0], [0, 0], [0.5, 0]] + [[0, 0]] * 8 + [[0.5, 0], [0, 0], [0, 0], [0.5, 0]]
        rho = density_from_dict({"dim": 4, "layout": [2, 2], "entries": flat})
        assert rho.op[3, 0] == pytest.approx(0.5)
        assert rho.op[1, 1] == 0

    def test_uom_rows_are_symbol_lists(self):
        """Test that symbolic rows are written one symbol per string."""
        data = uom_to_dict(SymbolicUOM.from_strings(["0a'", "1a"]))
        assert data["rows"] == [["0", "a'"], ["1", "a"]]
        assert SymbolicUOM.from_strings(data["rows"]) == SymbolicUOM.from_strings(["0a'", "1a"])
