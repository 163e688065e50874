"""
Linear Algebra Kernel
Dense complex helpers shared by every module

Tensor convention: subsystem 0 is the most significant index, i.e. the
C-order reshape of a vector of length prod(dims) into shape `dims` addresses
subsystems left to right.
"""

from functools import reduce
from typing import Iterable, List, Sequence, Tuple
import logging

import numpy as np
from scipy.special import entr

import config

logger = logging.getLogger(__name__)


def dims_product(dims: Sequence[int]) -> int:
    return int(np.prod(dims, dtype=np.int64)) if len(dims) else 1


def check_dims(dims: Sequence[int], total: int) -> List[int]:
    """Validate a subsystem dimension list against a matrix/vector dimension"""
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise ValueError(f"Invalid dimension list: {dims}")
    if dims_product(dims) != total:
        raise ValueError(
            f"Dimension mismatch: product of {dims} is {dims_product(dims)}, expected {total}"
        )
    return dims


def _check_square(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"Expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("Matrix has non-finite entries")
    return m


def _split(keep: Iterable[int], n: int) -> Tuple[List[int], List[int]]:
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise ValueError(f"Subsystem index out of range in {keep} for {n} subsystems")
    traced = [i for i in range(n) if i not in keep]
    return keep, traced


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product, left factor most significant"""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def tensor_all(*factors: np.ndarray) -> np.ndarray:
    return reduce(tensor, factors)


def ket_to_dm(psi: np.ndarray) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())


def is_hermitian(m: np.ndarray, tol: float = config.HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def partial_trace(m: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """
    Reduced matrix on the kept subsystems

    Args:
        m: square matrix on prod(dims)
        dims: subsystem dimensions
        keep: indices of the subsystems to keep (original order is preserved)

    Returns:
        Matrix on the kept subsystems; the trace is preserved
    """
    m = _check_square(m)
    dims = check_dims(dims, m.shape[0])
    n = len(dims)
    keep, traced = _split(keep, n)

    dk = dims_product([dims[i] for i in keep])
    dt = dims_product([dims[i] for i in traced])
    perm = keep + traced + [n + i for i in keep] + [n + i for i in traced]
    t = m.reshape(dims + dims).transpose(perm).reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def ptrace_ket(psi: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix of a pure state without forming |psi><psi|"""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    dims = check_dims(dims, psi.shape[0])
    keep, traced = _split(keep, len(dims))

    dk = dims_product([dims[i] for i in keep])
    t = psi.reshape(dims).transpose(keep + traced).reshape(dk, -1)
    return t @ t.conj().T


def partial_transpose(m: np.ndarray, dims: Sequence[int], sys: int) -> np.ndarray:
    """Transpose the row/column index pair of one subsystem"""
    m = _check_square(m)
    dims = check_dims(dims, m.shape[0])
    n = len(dims)
    if not 0 <= sys < n:
        raise ValueError(f"Subsystem {sys} out of range for {n} subsystems")

    axes = list(range(2 * n))
    axes[sys], axes[n + sys] = axes[n + sys], axes[sys]
    return m.reshape(dims + dims).transpose(axes).reshape(m.shape)


def permute_subsystems(x: np.ndarray, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of a vector or square matrix; `order[k]` is the old index of new factor k"""
    x = np.asarray(x, dtype=complex)
    dims = check_dims(dims, x.shape[0])
    n = len(dims)
    order = [int(o) for o in order]
    if sorted(order) != list(range(n)):
        raise ValueError(f"Invalid subsystem permutation {order}")

    if x.ndim == 1:
        return x.reshape(dims).transpose(order).reshape(-1)
    x = _check_square(x)
    return x.reshape(dims + dims).transpose(order + [n + i for i in order]).reshape(x.shape)


def eig_hermitian(m: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigendecomposition of a Hermitian matrix

    Returns:
        (eigenvalues ascending, unitary matrix of eigenvectors as columns);
        eigenvalues in [-EIGEN_CLIP, 0) are clipped to 0
    """
    m = _check_hermitian(m)
    vals, vecs = np.linalg.eigh((m + m.conj().T) / 2)
    return _clip(vals), vecs


def eigvals_hermitian(m: np.ndarray) -> np.ndarray:
    """Eigenvalues only, with the same validation and clipping as eig_hermitian"""
    m = _check_hermitian(m)
    return _clip(np.linalg.eigvalsh((m + m.conj().T) / 2))


def _check_hermitian(m: np.ndarray) -> np.ndarray:
    m = _check_square(m)
    if not is_hermitian(m):
        raise ValueError(
            f"Matrix is not Hermitian: ||M - M^dagger|| = {np.max(np.abs(m - m.conj().T)):.3e}"
        )
    return m


def _clip(vals: np.ndarray) -> np.ndarray:
    return np.where((vals < 0) & (vals >= -config.EIGEN_CLIP), 0.0, vals)


def spectral_entropy(weights: np.ndarray, axis: int = -1) -> np.ndarray:
    """-sum w log2 w along an axis, with 0 log 0 = 0 (weights need not be normalized)"""
    w = np.clip(np.asarray(weights, dtype=float), 0.0, None)
    return np.sum(entr(w), axis=axis) / np.log(2)


def matrix_rank(m: np.ndarray, tol: float = config.RANK_TOL) -> int:
    vals, _ = eig_hermitian(m)
    return int(np.sum(vals > tol))


def purify(rho: np.ndarray, dims: Sequence[int]) -> Tuple[np.ndarray, List[int]]:
    """
    Purification of rho on original subsystems plus an ancilla of dimension rank(rho)

    Returns:
        (state vector, dims + [rank]); tracing out the last subsystem gives rho back
    """
    rho = _check_square(rho)
    dims = check_dims(dims, rho.shape[0])
    trace = np.trace(rho).real
    if abs(trace - 1) > config.TRACE_TOL:
        raise ValueError(f"Cannot purify: trace is {trace:.12f}, expected 1")

    vals, vecs = eig_hermitian(rho)
    if vals[0] < -config.PSD_TOL:
        raise ValueError(f"Cannot purify: negative eigenvalue {vals[0]:.3e}")

    support = np.flatnonzero(vals > config.RANK_TOL)[::-1]
    columns = vecs[:, support] * np.sqrt(vals[support])
    return columns.reshape(-1), dims + [len(support)]


def sqrt_psd(m: np.ndarray) -> np.ndarray:
    """Principal square root of a positive semidefinite matrix"""
    vals, vecs = eig_hermitian(m)
    if vals[0] < -config.PSD_TOL:
        raise ValueError(f"Matrix is not PSD: eigenvalue {vals[0]:.3e}")
    root = np.sqrt(np.clip(vals, 0.0, None))
    return (vecs * root) @ vecs.conj().T
