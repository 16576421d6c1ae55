"""Business logic for reproduction runs and claim bookkeeping."""

import math
import time
import uuid
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bases import PartyLayout
from .catalog import CatalogEntry, builtin, chain, reproduce_counts
from .coarse import (
    classify_upb_across_grainings,
    merged_span_profile,
    refinement_violations,
)
from .conf import settings as upb_settings
from .constants import (
    BRANCH_EXTREMA,
    CLAIM_LOG_FORMAT,
    SYMMETRIC_G,
    SYMMETRIC_MAX_OVERLAP,
    SYMMETRIC_OPTIMUM_SIN,
)
from .exceptions import UPBError
from .gme import (
    OptimizationPoint,
    general_g,
    monotonicity_check,
    overlap,
    product_state,
    seesaw_maximize,
    symmetric_h,
    symmetric_slice_oracle,
)
from .linalg import projectively_equal, random_density_matrix
from .loggers import get_logger
from .models import ClaimRecord, Outcome
from .serializers import to_jsonable
from .signals import claim_evaluated
from .states import (
    DensityMatrix,
    bipartitions,
    certify_entangled_range,
    coefficient_matrix,
    is_ppt,
    psi_states,
    rank_seven_state,
    reduced_ranks,
    renamed_upb,
    verify_rho_forms,
)
from .uom import (
    COMPUTATIONAL,
    LETTERS,
    AngleAssignment,
    StepKind,
    TransformStep,
    apply_transform,
    image_partition_labels,
    instantiate,
    verify_chain,
)
from .utils import random_angles

logger = get_logger(__name__)

CLAIMS: Dict[str, str] = {
    "size6-graining": "size-6 UPB: only AB|C|D survives coarse graining",
    "size7-graining": "size-7 UPB: no coarse graining is a UPB",
    "size9-graining": "size-9 UPBs: six 2x2x4 and three 4x4 coarse-grained UPBs",
    "transform-chains": "both printed transformation chains reproduce symbol for symbol",
    "size9-spans": "AB-side span ranks of the 11th size-9 UPB",
    "rho-certification": "rank-seven state: trace, rank, PPT, reduced ranks, entanglement",
    "coefficient-structure": "coefficient matrix orthogonality and psi expansions",
    "gme-optimum": "geometric measure of the rank-seven state at pi/4",
    "gme-monotonicity": "G is nonincreasing along A|B|C|D, A|B|CD, AB|CD",
    "property-suites": "refinement, closed-form, see-saw and equivalence-move properties",
}

EXCEPTIONAL_FIVE_SUBSETS = [(0, 1, 2, 3, 7), (0, 1, 2, 5, 6), (0, 3, 4, 5, 6), (1, 3, 4, 5, 7)]
MONOTONE_CHAIN = ("A|B|C|D", "A|B|CD", "AB|CD")
RANDOM_TUPLES = 5
CLOSED_FORM_POINTS = 100
MOVES_PER_ENTRY = 20
PROPERTY_SEED = 2024


@dataclass
class ClaimResult:
    claim_id: str
    description: str
    computed: Dict[str, Any]
    expected: Dict[str, Any]
    passed: bool
    runtime: float = 0.0

    @property
    def outcome(self) -> str:
        return Outcome.PASS if self.passed else Outcome.FAIL


@dataclass
class ReproductionReport:
    run_id: uuid.UUID
    claims: List[ClaimResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(claim.passed for claim in self.claims)


class ClaimRecordService:
    """Console logging and persistence of one evaluated claim."""

    def __init__(self, claim: ClaimResult, run_id: uuid.UUID) -> None:
        self.claim = claim
        self.run_id = run_id

    def _format_log_data(self) -> Dict[str, Any]:
        return {
            "claim_id": self.claim.claim_id,
            "description": self.claim.description,
            "outcome": self.claim.outcome,
            "computed": self.claim.computed,
            "expected": self.claim.expected,
            "runtime": self.claim.runtime,
            "run_id": self.run_id,
        }

    def log_to_console(self) -> None:
        if not upb_settings.ENABLE_CONSOLE_LOGGING:
            return
        log_text = CLAIM_LOG_FORMAT.format(**self._format_log_data())
        if self.claim.passed:
            logger.info(log_text)
        else:
            logger.warning(log_text)

    def store(self) -> ClaimRecord:
        return ClaimRecord.objects.create(
            claim_id=self.claim.claim_id,
            description=self.claim.description,
            computed=self.claim.computed,
            expected=self.claim.expected,
            outcome=self.claim.outcome,
            runtime=self.claim.runtime,
            run_id=self.run_id,
        )


class ReproductionService:
    """Evaluates claims and announces each result through ``claim_evaluated``."""

    def __init__(
        self,
        table: Optional[Sequence[CatalogEntry]] = None,
        persist: bool = False,
        seed: Optional[int] = None,
    ) -> None:
        self.table = list(table) if table else []
        self.persist = persist
        self.seed = PROPERTY_SEED if seed is None else seed
        self.run_id = uuid.uuid4()
        self._gme_cache: Dict[str, Any] = {}

    def run(self, claim_ids: Optional[Sequence[str]] = None) -> ReproductionReport:
        """
        Evaluate ``claim_ids`` (all claims by default) in registry order.

        Raises:
            KeyError: If a claim id is unknown
        """
        selected = list(CLAIMS) if not claim_ids else list(claim_ids)
        unknown = [c for c in selected if c not in CLAIMS]
        if unknown:
            raise KeyError(f"unknown claim ids: {', '.join(unknown)}")
        report = ReproductionReport(self.run_id)
        for claim_id in selected:
            result = self.evaluate(claim_id)
            report.claims.append(result)
            claim_evaluated.send(
                sender=self.__class__,
                claim=result,
                run_id=self.run_id,
                persist=self.persist,
            )
        return report

    def evaluate(self, claim_id: str) -> ClaimResult:
        method: Callable[[], Tuple[Dict, Dict, bool]] = getattr(
            self, "_" + claim_id.replace("-", "_")
        )
        start = time.perf_counter()
        try:
            computed, expected, passed = method()
        except UPBError as e:
            logger.error(f"claim {claim_id} raised {type(e).__name__}: {e}")
            computed, expected, passed = {"error": str(e)}, {}, False
        return ClaimResult(
            claim_id=claim_id,
            description=CLAIMS[claim_id],
            computed=to_jsonable(computed),
            expected=to_jsonable(expected),
            passed=bool(passed),
            runtime=time.perf_counter() - start,
        )

    def _graining_summary(self, name: str) -> Dict[str, Any]:
        basis = instantiate(builtin(name).uom)
        report = classify_upb_across_grainings(basis)
        upbs = [str(e.partition) for e in report.entries if e.unextendible]
        witnessed = [
            str(e.partition) for e in report.entries if e.verdict.witness is not None
        ]
        shortcut = [str(e.partition) for e in report.entries if e.verdict.method == "shortcut"]
        return {
            "unextendible": report.finest.unextendible,
            "upbs": upbs,
            "witnessed": witnessed,
            "shortcut": shortcut,
        }

    def _size6_graining(self):
        computed = self._graining_summary("size6")
        computed = {k: computed[k] for k in ("unextendible", "upbs")}
        expected = {"unextendible": True, "upbs": ["AB|C|D"]}
        return computed, expected, computed == expected

    def _size7_graining(self):
        summary = self._graining_summary("size7")
        computed = {
            "unextendible": summary["unextendible"],
            "upbs": summary["upbs"],
            "extendible": len(summary["witnessed"]) + len(summary["shortcut"]),
        }
        expected = {"unextendible": True, "upbs": [], "extendible": 13}
        return computed, expected, computed == expected

    def _size9_graining(self):
        eleventh = reproduce_counts([builtin("size9-11th")])
        computed: Dict[str, Any] = {
            "count_224": eleventh.count_224,
            "count_44": eleventh.count_44,
        }
        expected: Dict[str, Any] = {"count_224": 6, "count_44": 3}
        if self.table:
            totals = reproduce_counts(self.table)
            computed["table"] = {"count_224": totals.count_224, "count_44": totals.count_44}
            expected["table"] = {"count_224": 6, "count_44": 3}
        return computed, expected, computed == expected

    def _transform_chains(self):
        first = chain("family11")
        second = chain("family11-1")
        computed = {
            "family11": verify_chain(first),
            "family11-1": verify_chain(second),
            "u2_equals_u4": first[1][0] == first[3][0],
            "v6_equals_v1": second[5][0] == second[0][0],
        }
        expected = {key: True for key in computed}
        return computed, expected, computed == expected

    def _size9_spans(self):
        basis = instantiate(builtin("size9-11th-table").uom)
        sixes = merged_span_profile(basis, "AB", 6)
        fives = merged_span_profile(basis, "AB", 5)
        computed = {
            "six_subset_ranks": sorted(set(sixes.values())),
            "rank3_five_subsets": [list(s) for s, r in fives.items() if r == 3],
            "other_five_subset_ranks": sorted(
                {r for s, r in fives.items() if s not in EXCEPTIONAL_FIVE_SUBSETS}
            ),
        }
        expected = {
            "six_subset_ranks": [4],
            "rank3_five_subsets": [list(s) for s in EXCEPTIONAL_FIVE_SUBSETS],
            "other_five_subset_ranks": [4],
        }
        return computed, expected, computed == expected

    def _angle_samples(self) -> List[AngleAssignment]:
        rng = np.random.default_rng(self.seed)
        return [AngleAssignment.symmetric()] + [
            random_angles(rng) for _ in range(RANDOM_TUPLES)
        ]

    def _rho_certification(self):
        checks = []
        for angles in self._angle_samples():
            rho = rank_seven_state(angles)
            spectrum = rho.spectrum()
            nonzero = spectrum[:7]
            ranks = reduced_ranks(rho)
            upb = renamed_upb(angles)
            checks.append({
                "angles": list(angles.as_tuple()),
                "trace": abs(float(np.trace(rho.op).real) - 1.0) <= 1e-12,
                "rank": rho.rank(),
                "flat": bool(np.max(np.abs(nonzero - 1.0 / 7.0)) <= 1e-10),
                "ppt": all(is_ppt(rho, cut).ppt for cut in bipartitions(rho.layout)),
                "rank_AB": ranks["AB"],
                "rank_CD": ranks["CD"],
                "entangled_A|B|CD": certify_entangled_range(upb, "A|B|CD"),
                "entangled_AB|CD": certify_entangled_range(upb, "AB|CD"),
            })
        passed = all(
            c["trace"] and c["rank"] == 7 and c["flat"] and c["ppt"]
            and c["rank_AB"] == 4 and c["rank_CD"] == 4
            and c["entangled_A|B|CD"] and c["entangled_AB|CD"]
            for c in checks
        )
        expected = {
            "trace": True, "rank": 7, "flat": True, "ppt": True,
            "rank_AB": 4, "rank_CD": 4,
            "entangled_A|B|CD": True, "entangled_AB|CD": True,
        }
        return {"samples": checks}, expected, passed

    def _coefficient_structure(self):
        defects, psi1, forms = [], [], []
        for angles in self._angle_samples():
            defects.append(coefficient_matrix(angles).unitarity_defect())
            psi = psi_states(angles)
            psi1.append(
                projectively_equal(psi[1], renamed_upb(angles).members[-1].ket(), 1e-12)
            )
            forms.append(verify_rho_forms(angles))
        computed = {
            "max_unitarity_defect": max(defects),
            "psi1_is_product": all(psi1),
            "max_form_disagreement": max(forms),
        }
        passed = (
            computed["max_unitarity_defect"] <= 1e-12
            and computed["psi1_is_product"]
            and computed["max_form_disagreement"] <= 1e-10
        )
        expected = {
            "max_unitarity_defect": "<= 1e-12",
            "psi1_is_product": True,
            "max_form_disagreement": "<= 1e-10",
        }
        return computed, expected, passed

    def _symmetric_seesaw(self):
        if "symmetric" not in self._gme_cache:
            rho = rank_seven_state(AngleAssignment.symmetric())
            self._gme_cache["symmetric"] = (rho, seesaw_maximize(rho))
        return self._gme_cache["symmetric"]

    def _gme_optimum(self):
        rho, result = self._symmetric_seesaw()
        grid_value, _, _ = symmetric_slice_oracle(rho)
        lam = 0.5 * math.asin(SYMMETRIC_OPTIMUM_SIN)
        branch_lam = 0.5 * math.asin(2.0 / 3.0)
        branch = [
            symmetric_h(math.pi / 4, 0.0, 0.0, 0.0),
            symmetric_h(math.pi / 4, branch_lam, branch_lam, branch_lam),
        ]
        computed = {
            "max_overlap": result.max_overlap,
            "G": result.G,
            "grid": grid_value,
            "closed_form": symmetric_h(-math.pi / 4, lam, lam, lam),
            "branch_values": branch,
        }
        expected = {
            "max_overlap": SYMMETRIC_MAX_OVERLAP,
            "G": SYMMETRIC_G,
            "grid": SYMMETRIC_MAX_OVERLAP,
            "closed_form": SYMMETRIC_MAX_OVERLAP,
            "branch_values": list(BRANCH_EXTREMA),
        }
        passed = (
            abs(result.max_overlap - SYMMETRIC_MAX_OVERLAP) <= 1e-6
            and abs(result.G - SYMMETRIC_G) <= 1e-4
            and abs(grid_value - SYMMETRIC_MAX_OVERLAP) <= 1e-5
            and abs(computed["closed_form"] - SYMMETRIC_MAX_OVERLAP) <= 1e-10
            and all(abs(a - b) <= 1e-10 for a, b in zip(branch, BRANCH_EXTREMA))
        )
        return computed, expected, passed

    def _gme_monotonicity(self):
        rho = rank_seven_state(AngleAssignment.symmetric())
        report = monotonicity_check(rho, MONOTONE_CHAIN)
        return {"G": report.values, "nonincreasing": report.ok}, {"nonincreasing": True}, report.ok

    def _property_suites(self):
        rng = np.random.default_rng(self.seed)
        computed = {
            "refinement_violations": self._refinement_property(),
            "closed_form_deviation": self._closed_form_property(rng),
            "seesaw_monotone": self._seesaw_property(rng),
            "move_verdict_mismatches": self._moves_property(rng),
        }
        expected = {
            "refinement_violations": 0,
            "closed_form_deviation": "<= 1e-10",
            "seesaw_monotone": True,
            "move_verdict_mismatches": 0,
        }
        passed = (
            computed["refinement_violations"] == 0
            and computed["closed_form_deviation"] <= 1e-10
            and computed["seesaw_monotone"]
            and computed["move_verdict_mismatches"] == 0
        )
        return computed, expected, passed

    def _four_party_entries(self) -> List[CatalogEntry]:
        entries = [builtin(name) for name in ("size6", "size7", "size9-11th", "size9-11th-table")]
        return entries + list(self.table)

    def _refinement_property(self) -> int:
        return sum(
            len(refinement_violations(classify_upb_across_grainings(instantiate(e.uom))))
            for e in self._four_party_entries()
        )

    def _closed_form_property(self, rng: np.random.Generator) -> float:
        worst = 0.0
        for angles in self._angle_samples()[:3]:
            rho = rank_seven_state(angles)
            for _ in range(CLOSED_FORM_POINTS):
                point = OptimizationPoint(
                    tuple(rng.uniform(0.0, 2 * math.pi, 4)),
                    tuple(rng.uniform(0.0, math.pi / 2, 4)),
                )
                deviation = abs(general_g(angles, point) - overlap(rho, product_state(point)))
                worst = max(worst, deviation)
        return worst

    def _seesaw_property(self, rng: np.random.Generator) -> bool:
        _, symmetric = self._symmetric_seesaw()
        monotone = symmetric.monotone
        for _ in range(3):
            rho = DensityMatrix(random_density_matrix(16, rng), PartyLayout.qubits(4), "random")
            monotone = monotone and seesaw_maximize(rho, restarts=4).monotone
        return monotone

    def _random_move(self, uom, rng: np.random.Generator) -> TransformStep:
        height, width = uom.shape
        kind = list(StepKind)[int(rng.integers(len(StepKind)))]
        if kind is StepKind.ROW_PERMUTE:
            return TransformStep.row_permute(rng.permutation(height))
        if kind is StepKind.COLUMN_PERMUTE:
            return TransformStep.column_permute(rng.permutation(width))
        column = int(rng.integers(width))
        bases = sorted({s.base for s in uom.column(column)})
        first = bases[int(rng.integers(len(bases)))]
        if kind is StepKind.SYMBOL_SWAP:
            return TransformStep.symbol_swap(column, first)
        targets = [b for b in (COMPUTATIONAL, *LETTERS) if b != first]
        return TransformStep.basis_relabel(column, first, targets[int(rng.integers(len(targets)))])

    def _moves_property(self, rng: np.random.Generator) -> int:
        mismatches = 0
        for entry in self._four_party_entries():
            original = classify_upb_across_grainings(instantiate(entry.uom))
            labels = original.finest.layout.labels
            for _ in range(MOVES_PER_ENTRY):
                step = self._random_move(entry.uom, rng)
                moved = classify_upb_across_grainings(
                    instantiate(apply_transform(entry.uom, step))
                )
                mapping = image_partition_labels(step, labels)
                for verdict in original.all_verdicts():
                    image = "|".join(
                        "".join(mapping[label] for label in block)
                        for block in verdict.partition.blocks
                    )
                    if moved.verdict(image).unextendible != verdict.unextendible:
                        mismatches += 1
                        logger.warning(f"{entry.name}: {step} changes the verdict of {verdict.partition}")
        return mismatches
