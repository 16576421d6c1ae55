"""UPB-complement states: construction, PPT and range-criterion certification.

The rank-seven family is built from the 11th size-9 four-qubit UPB with one
letter per column (``size9-11th-renamed``); its complement is spanned by
eight product vectors whose real unitary mixing gives the states ``psi_i``.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bases import (
    PartyLayout,
    ProductBasis,
    check_unextendible,
    require_orthogonal,
    small_system_shortcut,
)
from .coarse import CoarsePartition, PartitionLike, as_partition, coarse_grain
from .conf import settings as upb_settings
from .exceptions import LayoutError, StateError, TranscriptionError
from .linalg import (
    hermitian_eigensystem,
    partial_trace,
    partial_transpose,
    projector,
    span_dimension,
    tensor_product,
)
from .loggers import get_logger
from .uom import AngleAssignment, SymbolicUOM, instantiate

logger = get_logger(__name__)

AnglesLike = Union[AngleAssignment, Sequence[float]]

# |psi_i> = sum_j u_ij |COMPLEMENT_ROWS[j]>
COMPLEMENT_ROWS = ("a'000", "1b'10", "10c'1", "110d'", "a'111", "0b'01", "01c'0", "001d'")

RENAMED_ROWS = (
    "001d", "01c0", "0b01", "110d", "1b10", "10c1", "a000", "a111", "a'b'c'd'",
)

# Sign pattern of u: entry (sign, k) stands for sign * x_k.
U_PATTERN = (
    ((1, 1), (1, 2), (1, 3), (1, 4), (-1, 5), (-1, 6), (-1, 7), (-1, 8)),
    ((1, 2), (-1, 1), (-1, 4), (1, 3), (1, 6), (-1, 5), (-1, 8), (1, 7)),
    ((1, 3), (1, 4), (-1, 1), (-1, 2), (1, 7), (1, 8), (-1, 5), (-1, 6)),
    ((1, 4), (-1, 3), (1, 2), (-1, 1), (1, 8), (-1, 7), (1, 6), (-1, 5)),
    ((-1, 5), (-1, 6), (-1, 7), (-1, 8), (-1, 1), (-1, 2), (-1, 3), (-1, 4)),
    ((-1, 6), (1, 5), (-1, 8), (1, 7), (1, 2), (-1, 1), (1, 4), (-1, 3)),
    ((1, 7), (-1, 8), (-1, 5), (1, 6), (-1, 3), (1, 4), (1, 1), (-1, 2)),
    ((1, 8), (1, 7), (-1, 6), (-1, 5), (-1, 4), (-1, 3), (1, 2), (1, 1)),
)

# Amplitude of |j,k> = |4j + k> in psi_i: (j, k, sign, u column, angle, trig)
AMPLITUDE_TABLE = (
    (0, 0, 1, 1, "alpha", "sin"), (0, 1, 1, 6, "beta", "sin"),
    (0, 2, 1, 8, "delta", "sin"), (0, 3, -1, 8, "delta", "cos"),
    (1, 0, 1, 7, "gamma", "sin"), (1, 1, -1, 6, "beta", "cos"),
    (1, 2, -1, 7, "gamma", "cos"), (1, 3, 1, 5, "alpha", "sin"),
    (2, 0, -1, 1, "alpha", "cos"), (2, 1, 1, 3, "gamma", "sin"),
    (2, 2, 1, 2, "beta", "sin"), (2, 3, -1, 3, "gamma", "cos"),
    (3, 0, 1, 4, "delta", "sin"), (3, 1, -1, 4, "delta", "cos"),
    (3, 2, -1, 2, "beta", "cos"), (3, 3, -1, 5, "alpha", "cos"),
)

UNITARITY_TOLERANCE = 1e-10
EXPANSION_TOLERANCE = 1e-12
FORMS_TOLERANCE = 1e-10


def as_angles(angles: AnglesLike) -> AngleAssignment:
    if isinstance(angles, AngleAssignment):
        return angles
    return AngleAssignment(*angles)


@dataclass(frozen=True)
class XCoefficients:
    values: Tuple[float, ...]

    def __getitem__(self, k: int) -> float:
        """1-based access, ``x[1]`` .. ``x[8]``."""
        if not 1 <= k <= 8:
            raise IndexError(f"x coefficients are numbered 1..8, got {k}")
        return self.values[k - 1]


def x_coefficients(angles: AnglesLike) -> XCoefficients:
    """
    Raises:
        AngleError: If an angle lies outside (0, pi/2)
    """
    t = as_angles(angles)
    sa, ca = math.sin(t.alpha), math.cos(t.alpha)
    sb, cb = math.sin(t.beta), math.cos(t.beta)
    sg, cg = math.sin(t.gamma), math.cos(t.gamma)
    sd, cd = math.sin(t.delta), math.cos(t.delta)
    return XCoefficients((
        sb * sg * sd,
        ca * cg * sd,
        ca * sb * cd,
        ca * cb * sg,
        cb * cg * cd,
        sa * sg * cd,
        sa * cb * sd,
        sa * sb * cg,
    ))


@dataclass(frozen=True, eq=False)
class CoefficientMatrix:
    u: np.ndarray

    def unitarity_defect(self) -> float:
        return float(np.max(np.abs(self.u @ self.u.T - np.eye(8))))


def coefficient_matrix(angles: AnglesLike) -> CoefficientMatrix:
    """
    The 8 x 8 real mixing matrix of the complement vectors.

    Raises:
        TranscriptionError: If ``u u^T`` deviates from the identity by more than 1e-10
    """
    x = x_coefficients(angles)
    u = np.array([[sign * x[k] for sign, k in row] for row in U_PATTERN])
    matrix = CoefficientMatrix(u)
    defect = matrix.unitarity_defect()
    if defect > UNITARITY_TOLERANCE:
        raise TranscriptionError(f"coefficient matrix is not orthogonal (defect {defect:.3e})")
    return matrix


def _row_ket(row, angles: AngleAssignment) -> np.ndarray:
    return tensor_product([symbol.vector(angles) for symbol in row])


def complement_vectors(angles: AnglesLike) -> np.ndarray:
    """The eight product vectors spanning the complement, as rows."""
    t = as_angles(angles)
    uom = SymbolicUOM.from_strings(COMPLEMENT_ROWS)
    return np.vstack([_row_ket(row, t) for row in uom.rows])


@dataclass(frozen=True, eq=False)
class PsiStates:
    states: np.ndarray

    def __getitem__(self, i: int) -> np.ndarray:
        """1-based access, ``psi[1]`` .. ``psi[8]``."""
        if not 1 <= i <= 8:
            raise IndexError(f"psi states are numbered 1..8, got {i}")
        return self.states[i - 1]

    def bipartite(self, i: int) -> np.ndarray:
        """Amplitudes of ``psi_i`` as a 4 x 4 table indexed by ``(j, k)``."""
        return self[i].reshape(4, 4)

    def gram(self) -> np.ndarray:
        return self.states.conj() @ self.states.T


def _tabulated_psi(angles: AngleAssignment, u: np.ndarray) -> np.ndarray:
    trig = {"sin": math.sin, "cos": math.cos}
    states = np.zeros((8, 16), dtype=complex)
    for j, k, sign, column, name, func in AMPLITUDE_TABLE:
        factor = sign * trig[func](getattr(angles, name))
        states[:, 4 * j + k] = factor * u[:, column - 1]
    return states


def psi_states(angles: AnglesLike) -> PsiStates:
    """
    Raises:
        TranscriptionError: If the product expansion and the tabulated
            amplitudes disagree by more than 1e-12
    """
    t = as_angles(angles)
    u = coefficient_matrix(t).u
    expanded = u @ complement_vectors(t)
    tabulated = _tabulated_psi(t, u)
    mismatch = float(np.max(np.abs(expanded - tabulated)))
    if mismatch > EXPANSION_TOLERANCE:
        raise TranscriptionError(f"psi expansions disagree by {mismatch:.3e}")
    return PsiStates(expanded)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    op: np.ndarray
    layout: PartyLayout
    source: str = ""

    @property
    def dim(self) -> int:
        return self.layout.total_dim

    def validate(self, tol: Optional[float] = None) -> None:
        """
        Raises:
            LayoutError: If the operator shape does not match the layout
            NotHermitianError: If the operator is not Hermitian
            StateError: If the trace is not 1 or the operator is not PSD
        """
        if tol is None:
            tol = upb_settings.PSD_TOLERANCE
        if self.op.shape != (self.dim, self.dim):
            raise LayoutError(f"operator {self.op.shape} does not match layout {self.layout}")
        trace = complex(np.trace(self.op))
        if abs(trace - 1.0) > 1e-10:
            raise StateError(f"trace is {trace.real:.12f}, expected 1")
        values, _ = hermitian_eigensystem(self.op)
        if values[-1] < -tol:
            raise StateError(f"operator is not PSD (min eigenvalue {values[-1]:.3e})")

    def spectrum(self) -> np.ndarray:
        return hermitian_eigensystem(self.op)[0]

    def rank(self, tol: Optional[float] = None) -> int:
        return span_dimension(list(self.op), tol)


def build_rho(upb: ProductBasis, source: str = "") -> DensityMatrix:
    """
    Normalised projector onto the orthogonal complement of ``upb``.

    Raises:
        OrthogonalityError: If the members are not pairwise orthogonal
        StateError: If the set is as large as the space
    """
    require_orthogonal(upb)
    dim = upb.layout.total_dim
    if upb.size >= dim:
        raise StateError(f"{upb.size} members leave no complement in dimension {dim}")
    op = np.eye(dim, dtype=complex)
    for member in upb.members:
        op -= projector(member.ket())
    rho = DensityMatrix(op / (dim - upb.size), upb.layout, source)
    rho.validate()
    logger.debug(f"built complement state of rank {dim - upb.size} from {source or 'basis'}")
    return rho


def renamed_upb(angles: AnglesLike) -> ProductBasis:
    return instantiate(SymbolicUOM.from_strings(RENAMED_ROWS), as_angles(angles))


def rank_seven_state(angles: AnglesLike) -> DensityMatrix:
    """The complement state of the renamed 11th size-9 UPB."""
    return build_rho(renamed_upb(angles), source="size9-11th-renamed")


def rho_forms(angles: AnglesLike) -> Dict[str, np.ndarray]:
    """
    The three expressions of the rank-seven state.

    ``identity``: (I - sum of UPB projectors) / 7.
    ``complement``: (sum of the eight complement projectors - |a'b'c'd'><a'b'c'd'|) / 7.
    ``psi``: (sum_{i=2..8} |psi_i><psi_i|) / 7.
    """
    t = as_angles(angles)
    identity = rank_seven_state(t).op
    complement = sum(projector(v) for v in complement_vectors(t))
    complement = (complement - projector(renamed_upb(t).members[-1].ket())) / 7.0
    psi = psi_states(t)
    mixture = sum(projector(psi[i]) for i in range(2, 9)) / 7.0
    return {"identity": identity, "complement": complement, "psi": mixture}


def verify_rho_forms(angles: AnglesLike) -> float:
    """
    Largest entrywise disagreement between the three forms.

    Raises:
        TranscriptionError: If it exceeds 1e-10
    """
    forms = list(rho_forms(angles).values())
    worst = max(
        float(np.max(np.abs(a - b))) for a, b in itertools.combinations(forms, 2)
    )
    if worst > FORMS_TOLERANCE:
        raise TranscriptionError(f"rho forms disagree by {worst:.3e}")
    return worst


@dataclass(frozen=True)
class PPTResult:
    cut: str
    ppt: bool
    min_eigenvalue: float


def _transposed_block(rho: DensityMatrix, cut: PartitionLike) -> Tuple[CoarsePartition, List[int]]:
    partition = as_partition(cut)
    if len(partition.blocks) != 2:
        raise LayoutError(f"{partition} is not a bipartition")
    groups = partition.indices(rho.layout)
    return partition, groups[-1]


def partial_transpose_spectrum(rho: DensityMatrix, cut: PartitionLike) -> np.ndarray:
    """Eigenvalues (descending) of the partial transpose over the block without the first party."""
    _, block = _transposed_block(rho, cut)
    transposed = partial_transpose(rho.op, rho.layout.dims, block)
    return hermitian_eigensystem(transposed)[0]


def is_ppt(
    rho: DensityMatrix, cut: PartitionLike, tol: Optional[float] = None
) -> PPTResult:
    """
    Raises:
        LayoutError: If ``cut`` is not a bipartition of the layout
    """
    if tol is None:
        tol = upb_settings.PSD_TOLERANCE
    partition, _ = _transposed_block(rho, cut)
    minimum = float(partial_transpose_spectrum(rho, partition)[-1])
    return PPTResult(str(partition), minimum >= -tol, minimum)


def bipartitions(layout: PartyLayout) -> List[CoarsePartition]:
    """Every split into two nonempty blocks, single parties first."""
    labels = layout.labels
    first, rest = labels[0], labels[1:]
    cuts = []
    for size in range(0, len(rest)):
        for others in itertools.combinations(rest, size):
            block = (first, *others)
            complement = tuple(lb for lb in labels if lb not in block)
            cuts.append(CoarsePartition((block, complement)))
    cuts.sort(key=lambda p: (min(len(b) for b in p.blocks), str(p)))
    return cuts


def ppt_spectra(rho: DensityMatrix) -> Dict[str, List[float]]:
    return {
        str(cut): [float(v) for v in partial_transpose_spectrum(rho, cut)]
        for cut in bipartitions(rho.layout)
    }


def certify_entangled_range(upb: ProductBasis, partition: PartitionLike) -> bool:
    """
    True when the complement state of ``upb`` is entangled across ``partition``.

    The complement holds no product vector of the coarse-grained layout
    exactly when the coarse-grained set is still unextendible.
    """
    partition = as_partition(partition)
    merged = coarse_grain(upb, partition)
    verdict = None
    if len(merged.layout.dims) == 2 and 2 in merged.layout.dims:
        verdict = small_system_shortcut(merged)
    if verdict is None:
        verdict = check_unextendible(merged)
    return verdict.unextendible


def reduced_ranks(rho: DensityMatrix, tol: Optional[float] = None) -> Dict[str, int]:
    """Rank of the reduced state on every proper nonempty block of parties."""
    labels = rho.layout.labels
    ranks = {}
    for size in range(1, len(labels)):
        for block in itertools.combinations(range(len(labels)), size):
            reduced = partial_trace(rho.op, rho.layout.dims, block)
            name = "".join(labels[p] for p in block)
            ranks[name] = span_dimension(list(reduced), tol)
    return ranks


def maximally_mixed(layout: PartyLayout) -> DensityMatrix:
    dim = layout.total_dim
    return DensityMatrix(np.eye(dim, dtype=complex) / dim, layout, "maximally-mixed")


def pure_state(ket: np.ndarray, layout: PartyLayout, source: str = "") -> DensityMatrix:
    ket = np.asarray(ket, dtype=complex)
    ket = ket / np.linalg.norm(ket)
    return DensityMatrix(projector(ket), layout, source)
