"""Core algebra of the four-vector block parameterization of 4x4 complex matrices.

A 4x4 complex matrix G splits into four 2x2 blocks

    G = | K  N |
        | L  M |

and each block expands over the Pauli basis as c0*I + c1*sigma1 + c2*sigma2
+ c3*sigma3.  Collecting the coordinates of the four blocks gives four
complex 4-vectors (k, m, l, n) -- a parameter set.  The map is linear and
bijective, and matrix multiplication turns into an explicit bilinear law on
parameter sets (`compose`), built from the Pauli product rule

    (a0 + a.sigma)(b0 + b.sigma) = a0*b0 + a.b + (a0*b + b0*a + i a x b).sigma

G is real when, within every parameter vector, the second vector component
is purely imaginary and the remaining three components are real.

Conventions: a CVec4 is a shape-(4,) complex ndarray [c0, c1, c2, c3] whose
tail is the Pauli vector part; blocks are (2, 2) and full matrices (4, 4)
complex ndarrays.  Parameter sets are immutable and every function here is
pure, so the module is safe to share across threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "TOL_FLOOR",
    "SIGMA1",
    "SIGMA2",
    "SIGMA3",
    "SIGMA",
    "ParamSet",
    "block_from_pair",
    "block",
    "pair_from_block",
    "assemble",
    "disassemble",
    "compose",
    "det_block",
    "numeric_rank",
    "is_real_conditions",
    "param_norm",
    "identity_params",
    "zero_params",
    "random_cvec4",
    "random_real_cvec4",
    "random_params",
    "random_real_params",
]

# Absolute floor under every relative tolerance, so comparisons against
# exactly-zero operands stay meaningful.
TOL_FLOOR = 1e-14

SIGMA1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA3 = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA = (SIGMA1, SIGMA2, SIGMA3)

_I2 = np.eye(2, dtype=complex)


def _as_cvec4(value, name: str) -> np.ndarray:
    arr = np.asarray(value, dtype=complex)
    if arr.shape != (4,):
        raise ValueError(f"{name}: expected 4 components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name}: non-finite component")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class ParamSet:
    """The four parameter vectors (k, m, l, n) of a 4x4 complex matrix.

    k parameterizes the upper-left block, m the lower-right, n the
    upper-right and l the lower-left.  Each field is coerced to an
    immutable shape-(4,) complex array; non-finite input is rejected.
    """

    k: np.ndarray
    m: np.ndarray
    l: np.ndarray
    n: np.ndarray

    def __post_init__(self):
        for name in ("k", "m", "l", "n"):
            object.__setattr__(self, name, _as_cvec4(getattr(self, name), name))

    def components(self) -> np.ndarray:
        """All 16 components as one vector, ordered k, m, l, n."""
        return np.concatenate([self.k, self.m, self.l, self.n])

    def __eq__(self, other):
        if not isinstance(other, ParamSet):
            return NotImplemented
        return bool(np.array_equal(self.components(), other.components()))

    def __hash__(self):
        return hash(self.components().tobytes())


def block_from_pair(c0: complex, v) -> np.ndarray:
    """2x2 block c0*I + v.sigma for a scalar c0 and a 3-component Pauli vector v.

    Entrywise: [[c0 + v3, v1 - i*v2], [v1 + i*v2, c0 - v3]].
    """
    v = np.asarray(v, dtype=complex)
    if v.shape != (3,):
        raise ValueError(f"expected 3 vector components, got shape {v.shape}")
    c0 = complex(c0)
    return np.array(
        [
            [c0 + v[2], v[0] - 1j * v[1]],
            [v[0] + 1j * v[1], c0 - v[2]],
        ]
    )


def block(cv) -> np.ndarray:
    """2x2 block of a full CVec4 (scalar part followed by vector part)."""
    cv = np.asarray(cv, dtype=complex)
    return block_from_pair(cv[0], cv[1:])


def pair_from_block(b) -> np.ndarray:
    """Invert `block`: Pauli coordinates [c0, c1, c2, c3] of a 2x2 block."""
    b = np.asarray(b, dtype=complex)
    if b.shape != (2, 2):
        raise ValueError(f"expected a 2x2 block, got shape {b.shape}")
    return np.array(
        [
            (b[0, 0] + b[1, 1]) / 2,
            (b[0, 1] + b[1, 0]) / 2,
            (b[1, 0] - b[0, 1]) / 2j,
            (b[0, 0] - b[1, 1]) / 2,
        ]
    )


def assemble(p: ParamSet) -> np.ndarray:
    """4x4 matrix [[K, N], [L, M]] built from the four parameter vectors."""
    g = np.empty((4, 4), dtype=complex)
    g[:2, :2] = block(p.k)
    g[:2, 2:] = block(p.n)
    g[2:, :2] = block(p.l)
    g[2:, 2:] = block(p.m)
    return g


def disassemble(g) -> ParamSet:
    """Parameter vectors of a 4x4 complex matrix; inverse of `assemble`."""
    g = np.asarray(g, dtype=complex)
    if g.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ValueError("non-finite matrix entry")
    return ParamSet(
        k=pair_from_block(g[:2, :2]),
        m=pair_from_block(g[2:, 2:]),
        l=pair_from_block(g[2:, :2]),
        n=pair_from_block(g[:2, 2:]),
    )


def _pair_scalar(u: np.ndarray, v: np.ndarray) -> complex:
    # scalar part of (u0 + u.sigma)(v0 + v.sigma)
    return u[0] * v[0] + u[1:] @ v[1:]


def _pair_vector(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    # vector part of (u0 + u.sigma)(v0 + v.sigma)
    return u[0] * v[1:] + v[0] * u[1:] + 1j * np.cross(u[1:], v[1:])


def compose(left: ParamSet, right: ParamSet) -> ParamSet:
    """Parameter set of the matrix product assemble(left) @ assemble(right).

    Evaluated entirely in parameter space: each output vector collects two
    Pauli products, mirroring the block identities K'' = K'K + N'L,
    M'' = L'N + M'M, N'' = K'N + N'M and L'' = L'K + M'L with the left
    operand primed.
    """
    combos = {
        "k": ((left.k, right.k), (left.n, right.l)),
        "m": ((left.m, right.m), (left.l, right.n)),
        "n": ((left.k, right.n), (left.n, right.m)),
        "l": ((left.l, right.k), (left.m, right.l)),
    }
    parts = {}
    for name, ((u1, v1), (u2, v2)) in combos.items():
        c0 = _pair_scalar(u1, v1) + _pair_scalar(u2, v2)
        vec = _pair_vector(u1, v1) + _pair_vector(u2, v2)
        parts[name] = np.concatenate([[c0], vec])
    return ParamSet(**parts)


def det_block(cv) -> complex:
    """Determinant c0**2 - v.v of the block with coordinates cv."""
    cv = np.asarray(cv, dtype=complex)
    return complex(cv[0] ** 2 - cv[1:] @ cv[1:])


def numeric_rank(g, tol: float = 1e-9) -> int:
    """Number of singular values above tol times the largest one.

    The zero matrix has rank 0.  `tol` must be positive and is relative,
    so the result is scale invariant.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    g = np.asarray(g, dtype=complex)
    s = np.linalg.svd(g, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def param_norm(p: ParamSet) -> float:
    """Euclidean norm over all 16 parameter components."""
    return float(np.linalg.norm(p.components()))


def is_real_conditions(p: ParamSet, tol: float = 1e-9) -> bool:
    """True when p assembles to a real matrix, up to a relative tolerance.

    The assembled matrix is real exactly when each parameter vector has a
    purely imaginary second vector component (index 2) and real remaining
    components.  The tolerance is relative to the parameter norm with an
    absolute floor.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    thr = max(tol * param_norm(p), TOL_FLOOR)
    for cv in (p.k, p.m, p.l, p.n):
        if abs(cv[2].real) > thr:
            return False
        if max(abs(cv[0].imag), abs(cv[1].imag), abs(cv[3].imag)) > thr:
            return False
    return True


def identity_params() -> ParamSet:
    """Parameter set of the 4x4 identity matrix: k0 = m0 = 1, rest zero."""
    e = np.array([1, 0, 0, 0], dtype=complex)
    z = np.zeros(4, dtype=complex)
    return ParamSet(k=e, m=e, l=z, n=z)


def zero_params() -> ParamSet:
    """Parameter set of the zero matrix."""
    z = np.zeros(4, dtype=complex)
    return ParamSet(k=z, m=z, l=z, n=z)


def random_cvec4(rng: np.random.Generator) -> np.ndarray:
    """CVec4 with real and imaginary parts drawn uniformly from [-1, 1]."""
    return rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)


def random_real_cvec4(rng: np.random.Generator) -> np.ndarray:
    """CVec4 satisfying the reality pattern: component 2 imaginary, rest real."""
    cv = rng.uniform(-1, 1, 4).astype(complex)
    cv[2] = 1j * rng.uniform(-1, 1)
    return cv


def random_params(rng: np.random.Generator) -> ParamSet:
    """Generic parameter set; components uniform over the complex square."""
    return ParamSet(*(random_cvec4(rng) for _ in range(4)))


def random_real_params(rng: np.random.Generator) -> ParamSet:
    """Parameter set of a random real matrix (reality pattern per vector)."""
    return ParamSet(*(random_real_cvec4(rng) for _ in range(4)))
