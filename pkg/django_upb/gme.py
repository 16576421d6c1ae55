"""Geometric measure of entanglement.

``G(sigma) = -log2 max <a_1..a_n| sigma |a_1..a_n>`` over normalised
product states. The maximum is found numerically by a see-saw over the
parties of a coarse-grained layout; closed forms for the rank-seven family
serve as cross-checks.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bases import PartyLayout, ProductVector
from .coarse import CoarsePartition, PartitionLike, as_partition, merge_components
from .conf import settings as upb_settings
from .constants import SEESAW_LOG_FORMAT
from .exceptions import AngleError, GridTooLargeError, LayoutError, StateError
from .linalg import (
    hermitian_eigensystem,
    permute_subsystems,
    projective_normalize,
    random_unit_vector,
    reduced_contraction,
)
from .loggers import get_logger
from .states import AnglesLike, DensityMatrix, as_angles

logger = get_logger(__name__)

# Party updates may lose this much overlap to rounding.
MONOTONE_SLACK = 1e-12
DEGENERACY_GAP = 1e-12
CHAIN_SLACK = 1e-6


@dataclass(frozen=True)
class OptimizationPoint:
    """
    Real-coordinate description of a four-qubit product state.

    Party ``j`` is ``cos(nu_j)|0> + exp(i mu_j) sin(nu_j)|1>``.
    """

    mu: Tuple[float, float, float, float]
    nu: Tuple[float, float, float, float]

    def __post_init__(self) -> None:
        mu = tuple(float(m) for m in self.mu)
        nu = tuple(float(n) for n in self.nu)
        if len(mu) != 4 or len(nu) != 4:
            raise LayoutError("an optimization point has four mu and four nu values")
        if any(not 0.0 <= m <= 2 * math.pi for m in mu):
            raise AngleError(f"mu values must lie in [0, 2pi], got {mu}")
        if any(not 0.0 <= n <= math.pi / 2 for n in nu):
            raise AngleError(f"nu values must lie in [0, pi/2], got {nu}")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "nu", nu)

    @property
    def is_real(self) -> bool:
        return all(abs(abs(math.cos(m)) - 1.0) <= 1e-12 for m in self.mu)


def product_state(point: OptimizationPoint) -> ProductVector:
    return ProductVector(
        tuple(
            np.array([math.cos(n), np.exp(1j * m) * math.sin(n)])
            for m, n in zip(point.mu, point.nu)
        )
    )


def fold_lambda(point: OptimizationPoint) -> Tuple[float, ...]:
    """
    ``lambda_j = nu_j cos(mu_j)``, defined when every phase is 0 or pi.

    Raises:
        AngleError: If some ``cos(mu_j)`` is not +1 or -1
    """
    if not point.is_real:
        raise AngleError("lambda folding needs every mu in {0, pi, 2pi}")
    return tuple(n * round(math.cos(m)) for m, n in zip(point.mu, point.nu))


def unfold_lambda(lambdas: Sequence[float]) -> OptimizationPoint:
    """
    Raises:
        AngleError: If some lambda lies outside [-pi/2, pi/2]
    """
    if any(abs(lam) > math.pi / 2 for lam in lambdas):
        raise AngleError(f"lambda values must lie in [-pi/2, pi/2], got {tuple(lambdas)}")
    return OptimizationPoint(
        tuple(0.0 if lam >= 0 else math.pi for lam in lambdas),
        tuple(abs(lam) for lam in lambdas),
    )


def lambdas_of(state: ProductVector, tol: float = 1e-6) -> Tuple[float, ...]:
    """
    Lambda coordinates of a real qubit product state (up to local phases).

    Raises:
        AngleError: If a component carries a relative phase other than 0 or pi
    """
    lambdas = []
    for component in state.components:
        if component.size != 2:
            raise LayoutError("lambda coordinates are defined for qubit parties")
        v = projective_normalize(component)
        if abs(v[1].imag) > tol:
            raise AngleError(f"component {v} is not real up to a phase")
        lambdas.append(math.atan2(v[1].real, v[0].real))
    return tuple(lambdas)


def _partition_view(
    rho: DensityMatrix, partition: Optional[PartitionLike]
) -> Tuple[np.ndarray, Tuple[int, ...], CoarsePartition]:
    """Operator with each block's parties contiguous, plus the block dimensions."""
    layout = rho.layout
    partition = (
        CoarsePartition.finest(layout) if partition is None else as_partition(partition)
    )
    groups = partition.indices(layout)
    order = [p for group in groups for p in group]
    op = permute_subsystems(rho.op, layout.dims, order)
    dims = tuple(math.prod(layout.dims[p] for p in group) for group in groups)
    return op, dims, partition


def overlap(
    rho: DensityMatrix,
    state: ProductVector,
    partition: Optional[PartitionLike] = None,
) -> float:
    """
    ``<state|rho|state>`` for a product state of ``partition`` (default: finest).

    Raises:
        LayoutError: If the state does not match the partition's block dimensions
    """
    op, dims, _ = _partition_view(rho, partition)
    if state.dims != dims:
        raise LayoutError(f"state dims {state.dims} do not match blocks {dims}")
    ket = state.ket()
    return float(np.real(np.vdot(ket, op @ ket)))


def general_g(angles: AnglesLike, point: OptimizationPoint) -> float:
    """Closed form of the overlap of the rank-seven state with ``product_state(point)``."""
    thetas = as_angles(angles).as_tuple()
    c = [math.cos(n) ** 2 for n in point.nu]
    s = [math.sin(n) ** 2 for n in point.nu]
    p = [
        math.sin(t) ** 2 * math.cos(n) ** 2
        + math.cos(t) ** 2 * math.sin(n) ** 2
        - 2 * math.cos(m) * math.sin(t) * math.cos(t) * math.cos(n) * math.sin(n)
        for t, m, n in zip(thetas, point.mu, point.nu)
    ]
    total = (
        p[0] * (c[1] * c[2] * c[3] + s[1] * s[2] * s[3])
        + p[1] * (s[0] * s[2] * c[3] + c[0] * c[2] * s[3])
        + p[2] * (s[0] * c[1] * s[3] + c[0] * s[1] * c[3])
        + p[3] * (s[0] * s[1] * c[2] + c[0] * c[1] * s[2])
        - p[0] * p[1] * p[2] * p[3]
    )
    return total / 7.0


def symmetric_fg(lambdas: Sequence[float]) -> Tuple[List[float], List[float]]:
    """The ``f_i`` and ``g_i`` factors of ``symmetric_h``."""
    l1, l2, l3, l4 = lambdas
    c = [math.cos(lam) ** 2 for lam in (l1, l2, l3, l4)]
    s = [math.sin(lam) ** 2 for lam in (l1, l2, l3, l4)]
    f = [0.5 - 0.5 * math.sin(2 * lam) for lam in (l1, l2, l3, l4)]
    g = [
        c[1] * c[2] * c[3] + s[1] * s[2] * s[3],
        s[0] * s[2] * c[3] + c[0] * c[2] * s[3],
        s[0] * s[3] * c[1] + c[0] * c[3] * s[1],
        s[0] * s[1] * c[2] + c[0] * c[1] * s[2],
    ]
    return f, g


def symmetric_h(l1: float, l2: float, l3: float, l4: float) -> float:
    """
    Overlap at alpha = beta = gamma = delta = pi/4 for the real product state
    ``(cos l_j, sin l_j)`` on every party.
    """
    f, g = symmetric_fg((l1, l2, l3, l4))
    return (sum(fi * gi for fi, gi in zip(f, g)) - f[0] * f[1] * f[2] * f[3]) / 7.0


@dataclass
class SeesawRun:
    restart: int
    overlap: float
    state: List[np.ndarray]
    sweeps: int
    history: List[float] = field(default_factory=list)
    monotone: bool = True


@dataclass
class GmeResult:
    max_overlap: float
    argmax: ProductVector
    partition: str
    restarts_used: int
    converged_iterations: int
    best_restart: int
    monotone: bool
    history: List[float] = field(default_factory=list)

    @property
    def G(self) -> float:
        if self.max_overlap <= 0.0:
            return math.inf
        return -math.log2(self.max_overlap)


def _top_eigenvector(matrix: np.ndarray) -> Tuple[float, np.ndarray]:
    values, vectors = hermitian_eigensystem(matrix, tol=1e-9)
    top = values[0]
    candidates = [
        projective_normalize(vectors[:, i])
        for i in range(len(values))
        if top - values[i] <= DEGENERACY_GAP
    ]
    best = max(candidates, key=lambda v: tuple(v.real))
    return float(top), best


def _seesaw_run(
    op: np.ndarray,
    dims: Tuple[int, ...],
    start: List[np.ndarray],
    restart: int,
    max_iters: int,
    tol: float,
) -> SeesawRun:
    state = [projective_normalize(v) for v in start]
    current = -math.inf
    run = SeesawRun(restart, current, state, 0)
    for sweep in range(1, max_iters + 1):
        before = current
        for party in range(len(dims)):
            fixed = {p: state[p] for p in range(len(dims)) if p != party}
            value, vector = _top_eigenvector(reduced_contraction(op, dims, fixed, party))
            if value < current - MONOTONE_SLACK:
                run.monotone = False
            state[party] = vector
            current = value
        run.history.append(current)
        run.sweeps = sweep
        if current - before < tol:
            break
    run.overlap = current
    run.state = state
    return run


def _warm_components(
    warm_start: ProductVector, rho: DensityMatrix, partition: CoarsePartition,
    dims: Tuple[int, ...],
) -> List[np.ndarray]:
    if warm_start.dims == dims:
        return list(warm_start.components)
    if warm_start.dims == rho.layout.dims:
        merged = merge_components(warm_start, partition.indices(rho.layout))
        return list(merged.components)
    raise LayoutError(f"warm start dims {warm_start.dims} fit neither {dims} nor the layout")


def _require_psd(rho: DensityMatrix) -> None:
    values, _ = hermitian_eigensystem(rho.op)
    if values[-1] < -upb_settings.PSD_TOLERANCE:
        raise StateError(f"operator is not PSD (min eigenvalue {values[-1]:.3e})")


def seesaw_maximize(
    rho: DensityMatrix,
    partition: Optional[PartitionLike] = None,
    restarts: Optional[int] = None,
    max_iters: Optional[int] = None,
    tol: Optional[float] = None,
    seed: Optional[int] = None,
    warm_start: Optional[ProductVector] = None,
) -> GmeResult:
    """
    Largest overlap of ``rho`` with a product state of ``partition``.

    Each sweep sets every block in turn to the top eigenvector of ``rho``
    contracted with the other blocks, which never decreases the overlap. A
    run stops when a sweep gains less than ``tol``. The best of ``restarts``
    seeded random starts is returned, ties going to the lowest restart index;
    a ``warm_start`` is run first as restart 0.

    Raises:
        StateError: If ``rho`` is not PSD
        LayoutError: If ``restarts`` is below 1 or the partition does not fit
    """
    restarts = upb_settings.SEESAW_RESTARTS if restarts is None else restarts
    max_iters = upb_settings.SEESAW_MAX_ITERS if max_iters is None else max_iters
    tol = upb_settings.SEESAW_TOLERANCE if tol is None else tol
    seed = upb_settings.SEESAW_SEED if seed is None else seed
    if restarts < 1:
        raise LayoutError(f"restarts must be at least 1, got {restarts}")
    _require_psd(rho)

    op, dims, partition = _partition_view(rho, partition)
    rng = np.random.default_rng(seed)
    starts = []
    if warm_start is not None:
        starts.append(_warm_components(warm_start, rho, partition, dims))
    for _ in range(restarts):
        starts.append([random_unit_vector(d, rng) for d in dims])

    best: Optional[SeesawRun] = None
    monotone = True
    for index, start in enumerate(starts):
        run = _seesaw_run(op, dims, start, index, max_iters, tol)
        monotone = monotone and run.monotone
        if best is None or run.overlap > best.overlap:
            best = run
        logger.debug(
            f"restart {index}: overlap {run.overlap:.12f} after {run.sweeps} sweeps"
        )

    result = GmeResult(
        max_overlap=best.overlap,
        argmax=ProductVector(tuple(best.state)),
        partition=str(partition),
        restarts_used=len(starts),
        converged_iterations=best.sweeps,
        best_restart=best.restart,
        monotone=monotone,
        history=best.history,
    )
    logger.info(
        SEESAW_LOG_FORMAT.format(
            partition=result.partition,
            max_overlap=result.max_overlap,
            G=result.G,
            best_restart=result.best_restart,
            restarts=result.restarts_used,
            sweeps=result.converged_iterations,
        )
    )
    return result


def _local_grid(dim: int, steps: int) -> np.ndarray:
    """
    Grid of unit vectors in ``C^dim``.

    ``dim - 1`` hyperspherical magnitude angles on [0, pi/2] and ``dim - 1``
    relative phases on [0, 2pi).
    """
    magnitudes = np.linspace(0.0, math.pi / 2, steps)
    phases = np.linspace(0.0, 2 * math.pi, steps, endpoint=False)
    vectors = []
    for angles in itertools.product(magnitudes, repeat=dim - 1):
        radii = np.ones(dim)
        for k, angle in enumerate(angles):
            radii[k] *= math.cos(angle)
            radii[k + 1:] *= math.sin(angle)
        for rel in itertools.product(phases, repeat=dim - 1):
            vectors.append(radii * np.exp(1j * np.concatenate(([0.0], rel))))
    return np.array(vectors, dtype=complex)


def grid_oracle(
    rho: DensityMatrix,
    partition: Optional[PartitionLike] = None,
    steps_per_variable: int = 8,
) -> float:
    """
    Brute-force maximum of the overlap over a product grid.

    A lower bound on the true maximum.

    Raises:
        GridTooLargeError: If the grid exceeds GRID_MAX_POINTS
    """
    if steps_per_variable < 2:
        raise LayoutError("a grid needs at least two steps per variable")
    op, dims, partition = _partition_view(rho, partition)
    variables = sum(2 * (d - 1) for d in dims)
    points = steps_per_variable ** variables
    if points > upb_settings.GRID_MAX_POINTS:
        raise GridTooLargeError(
            f"grid of {points} points exceeds {upb_settings.GRID_MAX_POINTS}"
        )

    grids = [_local_grid(d, steps_per_variable) for d in dims]
    total = op.shape[0]
    best = -math.inf
    first_rest = total // dims[0]
    tensor = op.reshape(dims[0], first_rest, dims[0], first_rest)
    for vector in grids[0]:
        current = np.einsum("i,irjs,j->rs", vector.conj(), tensor, vector)[None]
        rest = first_rest
        for d, grid in zip(dims[1:], grids[1:]):
            rest //= d
            batch = current.shape[0]
            current = current.reshape(batch, d, rest, d, rest)
            current = np.einsum("ni,birjs,nj->bnrs", grid.conj(), current, grid)
            current = current.reshape(batch * grid.shape[0], rest, rest)
        best = max(best, float(np.max(current.real)))
    logger.debug(f"grid oracle over {points} points on {partition}: {best:.10f}")
    return best


def symmetric_slice_oracle(
    rho: DensityMatrix, step: float = math.pi / 720
) -> Tuple[float, float, float]:
    """
    Brute force over real states ``(l1, l, l, l)`` of a four-qubit state.

    Returns ``(value, l1, l)`` with both lambdas on a uniform grid over
    [-pi/2, pi/2].

    Raises:
        LayoutError: Unless ``rho`` lives on four qubits
        GridTooLargeError: If the slice exceeds GRID_MAX_POINTS
    """
    if rho.layout.dims != (2, 2, 2, 2):
        raise LayoutError("the symmetric slice is defined on four qubits")
    count = int(round(math.pi / step)) + 1
    if count * count > upb_settings.GRID_MAX_POINTS:
        raise GridTooLargeError(f"slice of {count * count} points is too large")
    lambdas = np.linspace(-math.pi / 2, math.pi / 2, count)
    local = np.stack([np.cos(lambdas), np.sin(lambdas)], axis=1)
    triple = np.einsum("na,nb,nc->nabc", local, local, local).reshape(count, 8)
    best = (-math.inf, 0.0, 0.0)
    for l1, first in zip(lambdas, local):
        kets = np.kron(first[None, :], triple).astype(complex)
        values = np.einsum("ni,ij,nj->n", kets.conj(), rho.op, kets).real
        index = int(np.argmax(values))
        if values[index] > best[0]:
            best = (float(values[index]), float(l1), float(lambdas[index]))
    return best


@dataclass
class MonotonicityReport:
    ok: bool
    values: Dict[str, float]


def monotonicity_check(
    rho: DensityMatrix,
    partitions: Sequence[PartitionLike],
    **seesaw_options,
) -> MonotonicityReport:
    """
    G along a chain of partitions ordered from fine to coarse.

    Every coarser run is warm-started from the finer optimum. The chain is
    monotone when no G exceeds its predecessor by more than 1e-6.

    Raises:
        LayoutError: If some partition does not coarsen its predecessor
    """
    chain = [as_partition(p) for p in partitions]
    for finer, coarser in zip(chain, chain[1:]):
        if not finer.refines(coarser):
            raise LayoutError(f"{coarser} does not coarsen {finer}")

    values: Dict[str, float] = {}
    previous: Optional[GmeResult] = None
    previous_partition: Optional[CoarsePartition] = None
    for partition in chain:
        warm = None
        if previous is not None:
            warm = _coarsen_state(rho.layout, previous_partition, partition, previous.argmax)
        previous = seesaw_maximize(rho, partition, warm_start=warm, **seesaw_options)
        previous_partition = partition
        values[str(partition)] = previous.G

    series = list(values.values())
    ok = all(b <= a + CHAIN_SLACK for a, b in zip(series, series[1:]))
    return MonotonicityReport(ok, values)


def _coarsen_state(
    layout: PartyLayout,
    finer: CoarsePartition,
    coarser: CoarsePartition,
    state: ProductVector,
) -> ProductVector:
    """Express a product state of ``finer`` as one of ``coarser``."""
    fine_groups = finer.indices(layout)
    components = []
    for group in coarser.indices(layout):
        parts = [i for i, fine in enumerate(fine_groups) if set(fine) <= set(group)]
        factor = state.components[parts[0]]
        positions = [p for i in parts for p in fine_groups[i]]
        for i in parts[1:]:
            factor = np.kron(factor, state.components[i])
        shape = [layout.dims[p] for p in positions]
        amplitudes = factor.reshape(shape).transpose(
            [positions.index(p) for p in group]
        )
        components.append(amplitudes.reshape(-1))
    return ProductVector(tuple(components))
