"""Tests for coarse graining of four-party product sets."""

import numpy as np
import pytest

from django_upb.bases import PartyLayout, check_unextendible
from django_upb.catalog import builtin
from django_upb.coarse import (
    CoarsePartition,
    classify_upb_across_grainings,
    coarse_grain,
    enumerate_coarse_grainings,
    lemma3_shortcut,
    merged_layout,
    merged_pair_shortcut,
    merged_span_profile,
    refinement_violations,
    split_implication_violations,
)
from django_upb.exceptions import LayoutError
from django_upb.linalg import basis_ket, projectively_equal
from django_upb.uom import SymbolicUOM, instantiate

CAT1_COMPUTATIONAL = (
    "0000", "0001", "0010", "0011", "1000", "1001", "1100", "1101", "1110",
)
EXCEPTIONAL_FIVE_SUBSETS = [(0, 1, 2, 3, 7), (0, 1, 2, 5, 6), (0, 3, 4, 5, 6), (1, 3, 4, 5, 7)]


class TestCoarsePartition:
    """Test partition parsing and canonical form."""

    def test_parse_is_canonical(self):
        """Test that block and label order do not matter."""
        assert CoarsePartition.parse("DC|B|A") == CoarsePartition.parse("A|B|CD")
        assert str(CoarsePartition.parse("DC|B|A")) == "A|B|CD"

    def test_colon_separator(self):
        """Test the alternative separator."""
        assert CoarsePartition.parse("AB:CD") == CoarsePartition.parse("AB|CD")

    def test_overlapping_blocks(self):
        """Test that a label may appear only once."""
        with pytest.raises(LayoutError):
            CoarsePartition.parse("AB|BC")

    def test_single_block(self):
        """Test that one block is not a partition."""
        with pytest.raises(LayoutError):
            CoarsePartition.parse("ABCD")

    def test_empty_block(self):
        """Test that empty blocks are rejected."""
        with pytest.raises(LayoutError):
            CoarsePartition.parse("AB||CD")

    def test_shape(self):
        """Test block-size signatures."""
        assert CoarsePartition.parse("AB|C|D").shape == (2, 1, 1)
        assert CoarsePartition.parse("A|BCD").shape == (3, 1)

    def test_refines(self):
        """Test the refinement order."""
        assert CoarsePartition.parse("A|B|CD").refines(CoarsePartition.parse("AB|CD"))
        assert not CoarsePartition.parse("AC|B|D").refines(CoarsePartition.parse("AB|CD"))

    def test_validate_against_layout(self):
        """Test that a partition must cover the layout."""
        with pytest.raises(LayoutError):
            CoarsePartition.parse("AB|C").validate(PartyLayout.qubits(4))


class TestCoarseGrain:
    """Test merging of parties."""

    def test_enumeration_order(self):
        """Test the thirteen proper coarse grainings and their order."""
        partitions = [str(p) for p in enumerate_coarse_grainings(PartyLayout.qubits(4))]
        assert partitions == [
            "AB|C|D", "AC|B|D", "AD|B|C", "A|BC|D", "A|BD|C", "A|B|CD",
            "AB|CD", "AC|BD", "AD|BC",
            "A|BCD", "ACD|B", "ABD|C", "ABC|D",
        ]

    def test_enumeration_needs_four_parties(self):
        """Test that other party counts are rejected."""
        with pytest.raises(LayoutError):
            enumerate_coarse_grainings(PartyLayout.qubits(3))

    def test_merged_layout(self):
        """Test merged dimensions and labels."""
        layout = merged_layout(PartyLayout.qubits(4), "AB|CD")
        assert layout.dims == (4, 4)
        assert layout.labels == ("AB", "CD")

    def test_merged_components_are_kronecker_products(self, size6_basis):
        """Test that merged components keep layout order."""
        merged = coarse_grain(size6_basis, "A|B|CD")
        for fine, coarse in zip(size6_basis.members, merged.members):
            assert np.allclose(coarse.components[2], np.kron(fine.components[2], fine.components[3]))
            assert np.allclose(coarse.ket(), fine.ket())

    def test_non_adjacent_merge_keeps_overlaps(self, size6_basis):
        """Test that merging A with C preserves inner products."""
        merged = coarse_grain(size6_basis, "AC|B|D")
        for i in range(size6_basis.size):
            for j in range(size6_basis.size):
                assert np.isclose(
                    merged.members[i].overlap(merged.members[j]),
                    size6_basis.members[i].overlap(size6_basis.members[j]),
                )


class TestGrainingReports:
    """Test verdicts of the bundled UPBs across all coarse grainings."""

    def test_size6_only_one_pair_grouping(self, size6_basis):
        """Test that AB|C|D is the only coarse-grained UPB of size 6."""
        report = classify_upb_across_grainings(size6_basis)
        assert report.finest.unextendible
        assert [str(p) for p in report.three_block_upbs] == ["AB|C|D"]
        assert report.two_block_upbs == []
        assert report.three_one_upbs == []
        assert report.in_224 and not report.in_44

    def test_size7_no_grouping(self, size7_basis):
        """Test that no coarse graining of the size-7 UPB is a UPB."""
        report = classify_upb_across_grainings(size7_basis)
        assert report.finest.unextendible
        assert not any(e.unextendible for e in report.entries)

    def test_size7_extendible_groupings_have_evidence(self, size7_basis):
        """Test that every failing grouping has a witness or a shortcut verdict."""
        report = classify_upb_across_grainings(size7_basis)
        for entry in report.entries:
            if entry.partition.shape == (3, 1):
                assert entry.verdict.method == "shortcut"
                assert entry.verdict.witness is None
            else:
                witness = entry.verdict.witness
                merged = coarse_grain(size7_basis, entry.partition)
                assert all(abs(witness.overlap(m)) < 1e-10 for m in merged.members)

    def test_eleventh_counts(self, eleventh_report):
        """Test six 2x2x4 UPBs and three 4x4 UPBs."""
        assert len(eleventh_report.three_block_upbs) == 6
        assert len(eleventh_report.two_block_upbs) == 3
        assert eleventh_report.three_one_upbs == []

    def test_verdict_lookup(self, eleventh_report):
        """Test lookup by string and by partition."""
        assert eleventh_report.verdict("CD|AB").unextendible
        assert eleventh_report.verdict("A|B|C|D") is eleventh_report.finest
        with pytest.raises(LayoutError):
            eleventh_report.verdict("AB|C")

    def test_refinement_is_respected(self, size6_basis, size7_basis, eleventh_report):
        """Test that no coarser grouping is a UPB while a finer one is not."""
        assert refinement_violations(eleventh_report) == []
        for basis in (size6_basis, size7_basis):
            assert refinement_violations(classify_upb_across_grainings(basis)) == []

    def test_split_implication(self, eleventh_report):
        """Test that each 4x4 UPB splits into two 2x2x4 UPBs."""
        assert split_implication_violations(eleventh_report) == []

    def test_report_logged(self, size6_basis, caplog):
        """Test the summary log line."""
        with caplog.at_level("INFO"):
            classify_upb_across_grainings(size6_basis)
        assert "graining report for size 6" in caplog.text


class TestStructuralWitness:
    """Test the structural witness search on a merged pair."""

    def test_cat1_instance(self):
        """Test that the computational category-1 set gets |1,1,11>."""
        basis = instantiate(SymbolicUOM.from_strings(CAT1_COMPUTATIONAL))
        witness = merged_pair_shortcut(basis, "CD", 0)
        assert witness is not None
        assert projectively_equal(witness.ket(), basis_ket(16, 15))

    def test_size6_pair_cd(self, size6_basis):
        """Test the witness |1,1,phi> of A|B|CD for the size-6 UPB."""
        witness = merged_pair_shortcut(size6_basis, "CD", 0)
        assert witness is not None
        assert projectively_equal(witness.components[0], basis_ket(2, 1))
        assert projectively_equal(witness.components[1], basis_ket(2, 1))
        merged = coarse_grain(size6_basis, "A|B|CD")
        assert all(abs(witness.overlap(m)) < 1e-10 for m in merged.members)

    def test_size7_pair_cd(self, size7_basis):
        """Test the witness |1,1,phi> of A|B|CD for the size-7 UPB."""
        witness = merged_pair_shortcut(size7_basis, "DC", 0)
        assert witness is not None
        assert projectively_equal(witness.components[0], basis_ket(2, 1))
        assert projectively_equal(witness.components[1], basis_ket(2, 1))
        assert not check_unextendible(coarse_grain(size7_basis, "A|B|CD")).unextendible

    def test_no_witness_for_a_upb_grouping(self, eleventh_basis):
        """Test that a coarse-grained UPB never yields a witness."""
        for m in range(eleventh_basis.size - 3):
            assert merged_pair_shortcut(eleventh_basis, "AB", m) is None

    def test_m_out_of_range(self, size6_basis):
        """Test that m is bounded by n - 4."""
        with pytest.raises(LayoutError):
            merged_pair_shortcut(size6_basis, "CD", 3)

    def test_invalid_pair(self, size6_basis):
        """Test that the pair must name two parties."""
        with pytest.raises(LayoutError):
            merged_pair_shortcut(size6_basis, "CC", 0)

    def test_exported_under_operation_name(self, size6_basis):
        """Test that lemma3_shortcut resolves to the same search."""
        assert lemma3_shortcut is merged_pair_shortcut
        assert lemma3_shortcut(size6_basis, "CD", 0) is not None


class TestSpanProfile:
    """Test span ranks of merged AB components of the 11th UPB."""

    def test_six_subsets_span_everything(self, table_basis):
        """Test that every six AB components span C^4."""
        profile = merged_span_profile(table_basis, "AB", 6)
        assert len(profile) == 84
        assert set(profile.values()) == {4}

    def test_exceptional_five_subsets(self, table_basis):
        """Test that exactly four five-subsets have rank three."""
        profile = merged_span_profile(table_basis, "BA", 5)
        assert [s for s, r in profile.items() if r == 3] == EXCEPTIONAL_FIVE_SUBSETS
        assert {r for s, r in profile.items() if s not in EXCEPTIONAL_FIVE_SUBSETS} == {4}

    def test_bad_subset_size(self, table_basis):
        """Test subset sizes outside 1..n."""
        with pytest.raises(LayoutError):
            merged_span_profile(table_basis, "AB", 0)
        with pytest.raises(LayoutError):
            merged_span_profile(table_basis, "AB", 10)

    def test_bad_block(self, table_basis):
        """Test repeated or unknown labels."""
        with pytest.raises(LayoutError):
            merged_span_profile(table_basis, "AA", 5)
        with pytest.raises(LayoutError):
            merged_span_profile(table_basis, "AZ", 5)
