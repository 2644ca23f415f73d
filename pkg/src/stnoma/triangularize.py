"""Simultaneous triangularization of the two users' MIMO channels.

One precoder ``x_mat`` and per-user unitary detectors ``q1``, ``q2`` render
both effective channels upper triangular:

    q1 @ h1 @ x_mat == [r1, 0]
    q2 @ h2 @ x_mat == [r2_left, 0, r2_right]

The private-stream columns of the precoder live in the other user's channel
null space, which is what produces the zero blocks. Diagonals of ``r1`` and
``r2`` are real and nonnegative so rate formulas can use them directly.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import joint_null_space, null_space_basis, qr_real_diag
from .system import ChannelPair, StreamDims, derive_dims

__all__ = ["StDecomposition", "ResidualReport", "simultaneous_triangularize",
           "verify_decomposition"]


@dataclass(frozen=True)
class StDecomposition:
    """Precoder, detectors, and triangular factors of one channel pair.

    ``r1`` is (m1, shared + private1); ``r2`` is (m2, shared + private2) and
    concatenates the shared-stream block and the private2 block (the zero
    block separating them in the full effective channel is implicit).
    """

    x_mat: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    dims: StreamDims

    @property
    def upper1(self):
        """Square upper-triangular top block of ``r1``."""
        k = self.dims.user1_streams
        return self.r1[:k, :]

    @property
    def upper2(self):
        """Square upper-triangular top block of ``r2``."""
        k = self.dims.user2_streams
        return self.r2[:k, :]

    @property
    def diag1(self):
        """Per-stream channel gains of user 1 (real, >= 0)."""
        return np.diagonal(self.r1).real

    @property
    def diag2(self):
        """Per-stream channel gains of user 2 (real, >= 0)."""
        return np.diagonal(self.r2).real

    def effective1(self):
        """Full L-wide effective channel of user 1: [r1, 0]."""
        m1 = self.r1.shape[0]
        zero = np.zeros((m1, self.dims.private2), dtype=complex)
        return np.hstack([self.r1, zero])

    def effective2(self):
        """Full L-wide effective channel of user 2: [r2_left, 0, r2_right]."""
        m2 = self.r2.shape[0]
        d = self.dims
        zero = np.zeros((m2, d.private1), dtype=complex)
        return np.hstack([self.r2[:, : d.shared], zero, self.r2[:, d.shared :]])


def simultaneous_triangularize(ch, dims=None):
    """Build the joint triangularization of a channel pair.

    The precoder stacks, in order, a basis of the joint null complement
    (shared streams), a basis of null(h2) (user 1's private streams), and a
    basis of null(h1) (user 2's private streams). The detectors come from QR
    factorizations of the effective channels with the zero columns removed.

    Parameters
    ----------
    ch : ChannelPair
    dims : StreamDims, optional
        Derived from the channel shapes when omitted.

    Raises
    ------
    ValueError
        If the configuration is unsupported or if a channel is non-generic
        (its numerical null-space dimension differs from the generic
        ``max(0, n_bs - m_k)``, breaking the stream dimensioning).
    """
    m1, n_bs = ch.h1.shape
    m2 = ch.h2.shape[0]
    if dims is None:
        dims = derive_dims(n_bs, m1, m2)
    elif dims != derive_dims(n_bs, m1, m2):
        raise ValueError("dims inconsistent with the channel shapes")

    nb_h1 = null_space_basis(ch.h1)  # carries user 2's private streams
    nb_h2 = null_space_basis(ch.h2)  # carries user 1's private streams
    if nb_h1.shape[1] != dims.private2:
        raise ValueError(
            f"h1 is non-generic: null-space dimension {nb_h1.shape[1]} != "
            f"{dims.private2}"
        )
    if nb_h2.shape[1] != dims.private1:
        raise ValueError(
            f"h2 is non-generic: null-space dimension {nb_h2.shape[1]} != "
            f"{dims.private1}"
        )

    k_mat = joint_null_space(nb_h1, nb_h2)
    if k_mat.shape[1] != dims.shared:
        raise ValueError(
            f"joint null space dimension {k_mat.shape[1]} != {dims.shared}: "
            "channels are non-generic"
        )

    x_mat = np.hstack([k_mat, nb_h2, nb_h1])

    # QR of the effective channels with the zero columns left out; the zero
    # blocks are re-inserted only in the L-wide views.
    qf1, r1 = qr_real_diag(ch.h1 @ np.hstack([k_mat, nb_h2]))
    qf2, r2 = qr_real_diag(ch.h2 @ np.hstack([k_mat, nb_h1]))

    return StDecomposition(
        x_mat=x_mat,
        q1=qf1.conj().T,
        q2=qf2.conj().T,
        r1=r1,
        r2=r2,
        dims=dims,
    )


@dataclass(frozen=True)
class ResidualReport:
    """Relative residuals of every decomposition invariant."""

    factorization1: float
    factorization2: float
    unitarity1: float
    unitarity2: float
    triangularity1: float
    triangularity2: float
    diag_imag1: float
    diag_imag2: float
    diag_negativity1: float
    diag_negativity2: float
    column_norm: float

    def as_dict(self):
        return {
            "factorization1": self.factorization1,
            "factorization2": self.factorization2,
            "unitarity1": self.unitarity1,
            "unitarity2": self.unitarity2,
            "triangularity1": self.triangularity1,
            "triangularity2": self.triangularity2,
            "diag_imag1": self.diag_imag1,
            "diag_imag2": self.diag_imag2,
            "diag_negativity1": self.diag_negativity1,
            "diag_negativity2": self.diag_negativity2,
            "column_norm": self.column_norm,
        }

    @property
    def max_residual(self):
        return max(self.as_dict().values())

    def ok(self, tol=1e-9):
        return self.max_residual <= tol

    def failures(self, tol=1e-9):
        return {k: v for k, v in self.as_dict().items() if v > tol}


def _rel(num, den):
    return num / den if den > 0.0 else num


def _triangularity(r):
    below = np.tril(r, k=-1)
    return _rel(np.linalg.norm(below), max(np.linalg.norm(r), 1e-300))


def _diag_residuals(r):
    diag = np.diagonal(r)
    scale = max(np.linalg.norm(r), 1e-300)
    imag = np.max(np.abs(diag.imag), initial=0.0) / scale
    neg = max(0.0, -np.min(diag.real, initial=0.0)) / scale
    return imag, neg


def verify_decomposition(dec, ch):
    """Measure every decomposition invariant from scratch.

    Returns a :class:`ResidualReport` of relative residuals; used by the test
    suite and by the command-line self check. All quantities are recomputed
    from the raw channels so a corrupted decomposition is caught.
    """
    h1_norm = max(np.linalg.norm(ch.h1), 1e-300)
    h2_norm = max(np.linalg.norm(ch.h2), 1e-300)

    eff1 = dec.q1 @ ch.h1 @ dec.x_mat
    eff2 = dec.q2 @ ch.h2 @ dec.x_mat
    fact1 = np.linalg.norm(eff1 - dec.effective1()) / h1_norm
    fact2 = np.linalg.norm(eff2 - dec.effective2()) / h2_norm

    m1 = ch.h1.shape[0]
    m2 = ch.h2.shape[0]
    uni1 = np.linalg.norm(dec.q1.conj().T @ dec.q1 - np.eye(m1))
    uni2 = np.linalg.norm(dec.q2.conj().T @ dec.q2 - np.eye(m2))

    tri1 = _triangularity(dec.r1)
    tri2 = _triangularity(dec.r2)
    imag1, neg1 = _diag_residuals(dec.r1)
    imag2, neg2 = _diag_residuals(dec.r2)

    if dec.x_mat.shape[1]:
        col_norms = np.linalg.norm(dec.x_mat, axis=0)
        col = float(np.max(np.abs(col_norms - 1.0)))
    else:
        col = 0.0

    return ResidualReport(
        factorization1=float(fact1),
        factorization2=float(fact2),
        unitarity1=float(uni1),
        unitarity2=float(uni2),
        triangularity1=float(tri1),
        triangularity2=float(tri2),
        diag_imag1=float(imag1),
        diag_imag2=float(imag2),
        diag_negativity1=float(neg1),
        diag_negativity2=float(neg2),
        column_norm=col,
    )
