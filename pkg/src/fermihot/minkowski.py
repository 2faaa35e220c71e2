"""Minkowski four-vectors, second-rank spinor matrices and the SL(2,C) cover.

Signature convention is (+, -, -, -) throughout the package.  A four-vector
``a`` is carried into the hermitian 2x2 matrices two ways:

    lower_matrix(a) = [[a0 + a3, a1 - i a2], [a1 + i a2, a0 - a3]]
    upper_matrix(a) = [[a0 - a3, -a1 + i a2], [-a1 - i a2, a0 + a3]]

so that lower_matrix(a) @ upper_matrix(a) = (a, a) * Id.  SL(2,C) acts on the
lower matrix by M -> A M A^dagger, which covers the proper orthochronous
Lorentz group; ``lorentz_from_sl2`` extracts the 4x4 matrix column by column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "FourVector",
    "SL2Element",
    "mink_product",
    "lower_matrix",
    "upper_matrix",
    "spinor_matrix",
    "vector_from_lower",
    "lorentz_from_sl2",
]

_METRIC = np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class FourVector:
    """Real four-vector in coordinates (t, x, y, z)."""

    t: float
    x: float
    y: float
    z: float

    @staticmethod
    def from_array(arr) -> "FourVector":
        a = np.asarray(arr, dtype=float).reshape(4)
        return FourVector(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z], dtype=float)

    @property
    def spatial_norm(self) -> float:
        return float(np.sqrt(self.x**2 + self.y**2 + self.z**2))

    def mink_sq(self) -> float:
        return mink_product(self, self)

    def is_timelike_future(self, tol: float = 0.0) -> bool:
        return self.t > tol and self.mink_sq() > tol

    def is_null(self, tol: float = 1e-12) -> bool:
        scale = max(1.0, self.t**2 + self.spatial_norm**2)
        return abs(self.mink_sq()) <= tol * scale

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t + other.t, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t - other.t, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __mul__(self, c: float) -> "FourVector":
        return FourVector(c * self.t, c * self.x, c * self.y, c * self.z)

    __rmul__ = __mul__

    def __neg__(self) -> "FourVector":
        return self * -1.0


def _as4(a) -> np.ndarray:
    if isinstance(a, FourVector):
        return a.as_array()
    return np.asarray(a, dtype=float).reshape(4)


def mink_product(a, b) -> float:
    """(a, b) = a0 b0 - a1 b1 - a2 b2 - a3 b3."""
    av, bv = _as4(a), _as4(b)
    return float(np.dot(av * _METRIC, bv))


def lower_matrix(a) -> np.ndarray:
    """a_M, hermitian for real a; accepts FourVector or any length-4 array.

    Complex arrays are allowed (the matrix is then no longer hermitian); the
    Fourier-side evaluators rely on this for complexified momenta.
    """
    v = a.as_array() if isinstance(a, FourVector) else np.asarray(a).reshape(4)
    a0, a1, a2, a3 = v
    return np.array([[a0 + a3, a1 - 1j * a2],
                     [a1 + 1j * a2, a0 - a3]])


def upper_matrix(a) -> np.ndarray:
    """a^M, satisfying lower_matrix(a) @ upper_matrix(a) = (a,a) Id."""
    v = a.as_array() if isinstance(a, FourVector) else np.asarray(a).reshape(4)
    a0, a1, a2, a3 = v
    return np.array([[a0 - a3, -a1 + 1j * a2],
                     [-a1 - 1j * a2, a0 + a3]])


def spinor_matrix(a, which: str = "lower") -> np.ndarray:
    if which == "lower":
        return lower_matrix(a)
    if which == "upper":
        return upper_matrix(a)
    raise ValueError(f"unknown spinor matrix kind {which!r}")


def vector_from_lower(mat: np.ndarray) -> np.ndarray:
    """Invert lower_matrix on (possibly non-hermitian) 2x2 matrices.

    For hermitian input the result is real up to roundoff; the tiny imaginary
    parts are kept so callers can assert on them.
    """
    m = np.asarray(mat).reshape(2, 2)
    a0 = (m[0, 0] + m[1, 1]) / 2.0
    a3 = (m[0, 0] - m[1, 1]) / 2.0
    a1 = (m[0, 1] + m[1, 0]) / 2.0
    a2 = 1j * (m[0, 1] - m[1, 0]) / 2.0
    return np.array([a0, a1, a2, a3])


@dataclass(frozen=True)
class SL2Element:
    """Unit-determinant complex 2x2 matrix; wraps the double cover."""

    m00: complex
    m01: complex
    m10: complex
    m11: complex

    def __post_init__(self):
        if abs(self.det() - 1.0) > 1e-10:
            raise ValueError(f"determinant {self.det()} != 1")

    @staticmethod
    def from_matrix(mat) -> "SL2Element":
        m = np.asarray(mat, dtype=complex).reshape(2, 2)
        return SL2Element(complex(m[0, 0]), complex(m[0, 1]),
                          complex(m[1, 0]), complex(m[1, 1]))

    @staticmethod
    def identity() -> "SL2Element":
        return SL2Element(1.0, 0.0, 0.0, 1.0)

    @staticmethod
    def boost_z(eta: float) -> "SL2Element":
        # A = diag(e^{eta/2}, e^{-eta/2}) maps e0 to (cosh eta, 0, 0, sinh eta)
        return SL2Element(np.exp(eta / 2.0), 0.0, 0.0, np.exp(-eta / 2.0))

    @staticmethod
    def rotation_z(theta: float) -> "SL2Element":
        return SL2Element(np.exp(-1j * theta / 2.0), 0.0,
                          0.0, np.exp(1j * theta / 2.0))

    def matrix(self) -> np.ndarray:
        return np.array([[self.m00, self.m01], [self.m10, self.m11]])

    def det(self) -> complex:
        return self.m00 * self.m11 - self.m01 * self.m10


def lorentz_from_sl2(a: SL2Element) -> np.ndarray:
    """4x4 proper orthochronous Lorentz matrix of the SL(2,C) element.

    Column nu is the image of the basis vector e_nu under
    lower_matrix(e_nu) -> A lower_matrix(e_nu) A^dagger.
    """
    amat = a.matrix()
    lam = np.empty((4, 4), dtype=float)
    for nu in range(4):
        e = np.zeros(4)
        e[nu] = 1.0
        img = amat @ lower_matrix(e) @ amat.conj().T
        col = vector_from_lower(img)
        if np.max(np.abs(col.imag)) > 1e-10:
            raise ValueError("SL(2,C) image produced a non-real four-vector")
        lam[:, nu] = col.real
    return lam
