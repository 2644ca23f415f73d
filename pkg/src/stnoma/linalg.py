"""Complex dense matrix kernels used by the triangularization scheme.

Three primitives: QR with a real-nonnegative diagonal, orthonormal null-space
bases, and the joint null space of two orthonormal column families. All
functions are pure and operate on 2-D complex ndarrays.
"""

import numpy as np

__all__ = ["qr_real_diag", "null_space_basis", "joint_null_space"]

# Relative magnitude below which a triangular diagonal entry counts as zero.
# Generic Gaussian channels are full rank; this only guards degenerate
# hand-crafted inputs.
RANK_RTOL = 1e-10


def _as_complex_matrix(a, name="matrix"):
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    if a.size and not np.all(np.isfinite(a.real) & np.isfinite(a.imag)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def qr_real_diag(a):
    """Full QR decomposition with real, nonnegative diagonal entries of R.

    Parameters
    ----------
    a : (m, n) array_like, complex
        Matrix to factor. Must be finite; rank deficiency is permitted and
        simply produces zero diagonal entries.

    Returns
    -------
    q : (m, m) ndarray
        Unitary factor.
    r : (m, n) ndarray
        Upper triangular factor with ``r[i, i]`` real and >= 0. Achieved by
        post-multiplying the Householder output columns by unit phase
        factors, so ``a = q @ r`` still holds.
    """
    a = _as_complex_matrix(a)
    m, n = a.shape
    if m == 0 or n == 0:
        return np.eye(m, dtype=complex), np.zeros((m, n), dtype=complex)
    q, r = np.linalg.qr(a, mode="complete")
    # Phase normalization pass: scale column i of Q by phi and row i of R by
    # conj(phi) so the diagonal becomes |r_ii| >= 0.
    for i in range(min(m, n)):
        d = r[i, i]
        mag = abs(d)
        if mag > 0.0:
            phi = d / mag
            q[:, i] *= phi
            r[i, i:] *= np.conj(phi)
            r[i, i] = mag
    return q, r


def null_space_basis(h):
    """Orthonormal basis of the null space of ``h``.

    Computed from the full QR of ``h^H``: the trailing columns of its unitary
    factor are orthogonal to every column of ``h^H`` and therefore satisfy
    ``h @ basis == 0``. Matches the usual QR null-space recipe at O(2 n m^2).

    Parameters
    ----------
    h : (m, n) array_like, complex

    Returns
    -------
    basis : (n, d) ndarray
        Orthonormal columns spanning null(h), ``d = n - rank(h)``. A 0-column
        matrix when the null space is trivial.
    """
    h = _as_complex_matrix(h)
    m, n = h.shape
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if m == 0:
        return np.eye(n, dtype=complex)
    q, r = qr_real_diag(h.conj().T)
    diag = np.abs(np.diagonal(r))
    if diag.size:
        rank = int(np.count_nonzero(diag > RANK_RTOL * diag.max()))
    else:
        rank = 0
    return q[:, rank:].copy()


def joint_null_space(nb1, nb2):
    """Orthonormal basis orthogonal to both column families.

    Parameters
    ----------
    nb1 : (n, d1) array_like, complex
        Orthonormal columns (e.g. a null-space basis).
    nb2 : (n, d2) array_like, complex
        Orthonormal columns over the same ambient dimension.

    Returns
    -------
    k : (n, d) ndarray
        Orthonormal columns with ``nb1^H @ k == 0`` and ``nb2^H @ k == 0``.
        Returns the identity when both inputs have zero columns (both null
        spaces trivial).
    """
    nb1 = _as_complex_matrix(nb1, "nb1")
    nb2 = _as_complex_matrix(nb2, "nb2")
    if nb1.shape[0] != nb2.shape[0]:
        raise ValueError(
            f"ambient dimensions differ: {nb1.shape[0]} vs {nb2.shape[0]}"
        )
    n = nb1.shape[0]
    if nb1.shape[1] == 0 and nb2.shape[1] == 0:
        return np.eye(n, dtype=complex)
    stacked = np.vstack([nb1.conj().T, nb2.conj().T])
    return null_space_basis(stacked)
