"""Dense complex linear algebra for small multipartite systems.

Kets are one-dimensional complex ``numpy`` arrays and operators are square
two-dimensional arrays. Multipartite amplitudes are laid out with the leftmost
party varying slowest (``numpy.kron`` order).
"""

from functools import reduce
from typing import Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg as sla
from scipy.stats import unitary_group

from .conf import settings as upb_settings
from .exceptions import LayoutError, NotHermitianError

# Amplitudes below this are treated as zero when fixing the global phase.
PHASE_CUTOFF = 1e-12


def as_ket(amplitudes: Sequence[complex]) -> np.ndarray:
    """Return ``amplitudes`` as a finite one-dimensional complex array."""
    ket = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if ket.size == 0 or not np.all(np.isfinite(ket)):
        raise LayoutError("a ket needs at least one finite amplitude")
    return ket


def basis_ket(dim: int, index: int) -> np.ndarray:
    """Computational basis vector ``|index>`` of dimension ``dim``."""
    ket = np.zeros(dim, dtype=complex)
    ket[index] = 1.0
    return ket


def normalize(ket: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(ket)
    if norm == 0.0:
        raise LayoutError("cannot normalize the zero vector")
    return ket / norm


def tensor_product(factors: Sequence[np.ndarray]) -> np.ndarray:
    """
    Kronecker product of ``factors``, leftmost factor slowest.

    Raises:
        LayoutError: If ``factors`` is empty
    """
    if len(factors) == 0:
        raise LayoutError("tensor_product needs at least one factor")
    return reduce(np.kron, (np.asarray(f, dtype=complex) for f in factors))


def _stack(vectors: Sequence[np.ndarray]) -> Optional[np.ndarray]:
    if len(vectors) == 0:
        return None
    dims = {np.asarray(v).shape[-1] for v in vectors}
    if len(dims) != 1:
        raise LayoutError(f"vectors have mismatched dimensions {sorted(dims)}")
    return np.vstack([np.asarray(v, dtype=complex) for v in vectors])


def span_dimension(vectors: Sequence[np.ndarray], tol: Optional[float] = None) -> int:
    """
    Dimension of the span of ``vectors``.

    Singular values above ``tol`` times the largest one are counted.

    Raises:
        LayoutError: If the vectors differ in dimension
    """
    if tol is None:
        tol = upb_settings.RANK_TOLERANCE
    stacked = _stack(vectors)
    if stacked is None:
        return 0
    singular = sla.svdvals(stacked)
    if singular.size == 0 or singular[0] == 0.0:
        return 0
    return int(np.sum(singular > tol * singular[0]))


def orthogonal_complement_sample(
    vectors: Sequence[np.ndarray], dim: int, tol: Optional[float] = None
) -> Optional[np.ndarray]:
    """
    A unit vector orthogonal to every vector in ``vectors``.

    The right-singular vector of the smallest singular value of the stacked
    conjugated vectors is returned, phase normalized, so the choice is
    deterministic. ``|0>`` is returned for an empty input and ``None`` when
    the vectors span the whole space.
    """
    if tol is None:
        tol = upb_settings.RANK_TOLERANCE
    stacked = _stack(vectors)
    if stacked is None:
        return basis_ket(dim, 0)
    if stacked.shape[1] != dim:
        raise LayoutError(f"vectors have dimension {stacked.shape[1]}, expected {dim}")
    if span_dimension(vectors, tol) >= dim:
        return None
    # rows of conj(V) annihilate |w> exactly when <v|w> = 0
    _, _, vh = sla.svd(stacked.conj(), full_matrices=True)
    return projective_normalize(vh[-1].conj())


def projector(ket: np.ndarray) -> np.ndarray:
    """Rank-one operator ``|v><v|``."""
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def is_hermitian(matrix: np.ndarray, tol: Optional[float] = None) -> bool:
    if tol is None:
        tol = upb_settings.HERMITIAN_TOLERANCE
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    return bool(np.max(np.abs(matrix - matrix.conj().T), initial=0.0) <= tol)


def is_unitary(matrix: np.ndarray, tol: float = 1e-12) -> bool:
    matrix = np.asarray(matrix, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        return False
    identity = np.eye(matrix.shape[0])
    return bool(np.max(np.abs(matrix.conj().T @ matrix - identity)) <= tol)


def hermitian_eigensystem(
    matrix: np.ndarray, tol: Optional[float] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigenvalues in descending order and the matching eigenvectors as columns.

    Raises:
        NotHermitianError: If ``matrix`` deviates from its adjoint beyond ``tol``
    """
    matrix = np.asarray(matrix, dtype=complex)
    if not is_hermitian(matrix, tol):
        raise NotHermitianError("operator is not Hermitian within tolerance")
    values, vectors = sla.eigh((matrix + matrix.conj().T) / 2)
    return values[::-1], vectors[:, ::-1]


def _check_dims(matrix: np.ndarray, dims: Sequence[int]) -> Tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims):
        raise LayoutError(f"party dimensions must be positive, got {dims}")
    total = int(np.prod(dims))
    if matrix.shape != (total, total):
        raise LayoutError(
            f"operator of shape {matrix.shape} does not match layout {dims}"
        )
    return dims


def _check_parties(parties: Sequence[int], count: int, what: str) -> Tuple[int, ...]:
    parties = tuple(int(p) for p in parties)
    if len(set(parties)) != len(parties) or any(not 0 <= p < count for p in parties):
        raise LayoutError(f"invalid {what} {parties} for {count} parties")
    return parties


def partial_transpose(
    matrix: np.ndarray, dims: Sequence[int], block: Sequence[int]
) -> np.ndarray:
    """
    Transpose the parties listed in ``block``.

    Raises:
        LayoutError: If the layout or block is invalid
    """
    matrix = np.asarray(matrix, dtype=complex)
    dims = _check_dims(matrix, dims)
    n = len(dims)
    block = _check_parties(block, n, "transpose block")
    axes = list(range(2 * n))
    for party in block:
        axes[party], axes[n + party] = axes[n + party], axes[party]
    total = matrix.shape[0]
    return matrix.reshape(dims + dims).transpose(axes).reshape(total, total)


def partial_trace(
    matrix: np.ndarray, dims: Sequence[int], keep: Sequence[int]
) -> np.ndarray:
    """Trace out every party not listed in ``keep``; kept parties stay in layout order."""
    matrix = np.asarray(matrix, dtype=complex)
    dims = _check_dims(matrix, dims)
    keep = sorted(_check_parties(keep, len(dims), "kept parties"))
    tensor = matrix.reshape(dims + dims)
    remaining = len(dims)
    for party in reversed(range(len(dims))):
        if party in keep:
            continue
        tensor = np.trace(tensor, axis1=party, axis2=party + remaining)
        remaining -= 1
    kept_dim = int(np.prod([dims[p] for p in keep])) if keep else 1
    return tensor.reshape(kept_dim, kept_dim)


def permute_subsystems(
    matrix: np.ndarray, dims: Sequence[int], order: Sequence[int]
) -> np.ndarray:
    """Reorder parties so that new party ``i`` is old party ``order[i]``."""
    matrix = np.asarray(matrix, dtype=complex)
    dims = _check_dims(matrix, dims)
    n = len(dims)
    order = _check_parties(order, n, "party order")
    if len(order) != n:
        raise LayoutError(f"party order {order} is not a permutation of {n} parties")
    axes = list(order) + [n + p for p in order]
    total = matrix.shape[0]
    return matrix.reshape(dims + dims).transpose(axes).reshape(total, total)


def permute_ket(ket: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Ket counterpart of :func:`permute_subsystems`."""
    ket = np.asarray(ket, dtype=complex)
    dims = tuple(int(d) for d in dims)
    if ket.size != int(np.prod(dims)):
        raise LayoutError(f"ket of size {ket.size} does not match layout {dims}")
    order = _check_parties(order, len(dims), "party order")
    if len(order) != len(dims):
        raise LayoutError(f"party order {order} is not a permutation")
    return ket.reshape(dims).transpose(order).reshape(-1)


def reduced_contraction(
    rho: np.ndarray,
    dims: Sequence[int],
    fixed: Mapping[int, np.ndarray],
    free: int,
) -> np.ndarray:
    """
    Sandwich ``rho`` between the fixed party states, leaving party ``free`` open.

    The result ``M`` satisfies ``<w|M|w> = <fixed (x) w|rho|fixed (x) w>``.

    Raises:
        LayoutError: If a party other than ``free`` has no fixed state
    """
    rho = np.asarray(rho, dtype=complex)
    dims = _check_dims(rho, dims)
    n = len(dims)
    expected = set(range(n)) - {free}
    if not 0 <= free < n:
        raise LayoutError(f"free party {free} outside layout of {n} parties")
    if set(fixed) != expected:
        missing = sorted(expected - set(fixed))
        raise LayoutError(f"missing fixed states for parties {missing}")

    tensor = rho.reshape(dims + dims)
    remaining = n
    for party in sorted(fixed, reverse=True):
        state = np.asarray(fixed[party], dtype=complex)
        if state.shape != (dims[party],):
            raise LayoutError(
                f"fixed state for party {party} has shape {state.shape}, "
                f"expected ({dims[party]},)"
            )
        tensor = np.tensordot(state.conj(), tensor, axes=([0], [party]))
        tensor = np.tensordot(tensor, state, axes=([remaining - 1 + party], [0]))
        remaining -= 1
    return tensor.reshape(dims[free], dims[free])


def projective_normalize(ket: np.ndarray) -> np.ndarray:
    """Unit vector whose first non-negligible amplitude is real and positive."""
    ket = normalize(np.asarray(ket, dtype=complex))
    magnitudes = np.abs(ket)
    leading = int(np.argmax(magnitudes > PHASE_CUTOFF * magnitudes.max()))
    return ket * (abs(ket[leading]) / ket[leading])


def projectively_equal(first: np.ndarray, second: np.ndarray, tol: float = 1e-10) -> bool:
    """True when the kets agree up to a nonzero scalar."""
    first = np.asarray(first, dtype=complex)
    second = np.asarray(second, dtype=complex)
    if first.shape != second.shape:
        return False
    return bool(
        np.max(np.abs(projective_normalize(first) - projective_normalize(second))) <= tol
    )


def random_unit_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random pure state of dimension ``dim``."""
    ket = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return ket / np.linalg.norm(ket)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    return unitary_group.rvs(dim, random_state=rng)


def random_density_matrix(
    dim: int, rng: np.random.Generator, rank: Optional[int] = None
) -> np.ndarray:
    """Random density operator of the given rank (full rank by default)."""
    rank = dim if rank is None else rank
    ginibre = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = ginibre @ ginibre.conj().T
    return rho / np.trace(rho).real
