"""Hypothesis set and linear parameterizations of the covariance structures.

Four nested hypotheses on an N x N interference covariance matrix M:

* H1 — Hermitian, no further structure.
* H2 — real symmetric.
* H3 — centrohermitian: Hermitian with ``M == J conj(M) J``.
* H4 — centrosymmetric: real symmetric with ``M == J M J``.

Each hypothesis admits an exact linear parameterization ``vec(M) = C @ theta``
with ``theta`` real and the entries of ``C`` draw
n from ``{0, +1, -1, +1j, -1j}``.
The free parameter counts are::

    m1 = N^2          m2 = m3 = N (N + 1) / 2
    m4 = (N/2)(N/2 + 1)        (N even)
    m4 = ((N + 1)/2)^2         (N odd)

The basis is built by orbit enumeration: each hypothesis is the fixed-point
set of a small group acting on matrix positions (transposition, anti-diagonal
flip, complex conjugation). Positions are walked over the lower triangle in
column-major order; the first unseen position opens a new equality class, and
the class contributes one real slot (plus one imaginary slot when the class
value may be complex).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .linalg import unvec, vec

__all__ = [
    "Hypothesis",
    "StructureViolationError",
    "StructureModel",
    "param_count",
    "structure_model",
    "project",
    "structure_residual",
    "satisfies_structure",
]

STRUCTURE_TOL = 1e-9


class Hypothesis(enum.IntEnum):
    """The four covariance structures, ordered by nesting (H2, H3, H4 in H1)."""

    H1 = 1
    H2 = 2
    H3 = 3
    H4 = 4

    @property
    def is_real(self) -> bool:
        """True when M is real-valued under this hypothesis (H2, H4)."""
        return self in (Hypothesis.H2, Hypothesis.H4)

    @property
    def label(self) -> str:
        return _LABELS[self]


_LABELS = {
    Hypothesis.H1: "hermitian",
    Hypothesis.H2: "symmetric",
    Hypothesis.H3: "centrohermitian",
    Hypothesis.H4: "centrosymmetric",
}


class StructureViolationError(ValueError):
    """A matrix handed to encode() does not satisfy the claimed structure."""


def param_count(hypothesis: Hypothesis, n: int) -> int:
    """Number of free real parameters of the structure at size n."""
    if n < 1:
        raise ValueError(f"matrix size must be positive, got {n}")
    h = Hypothesis(hypothesis)
    if h is Hypothesis.H1:
        return n * n
    if h in (Hypothesis.H2, Hypothesis.H3):
        return n * (n + 1) // 2
    if n % 2 == 0:
        half = n // 2
        return half * (half + 1)
    return ((n + 1) // 2) ** 2


# Group elements are (position_map, conjugates) pairs acting on 0-based (i, j).
# A matrix has the structure iff M[g(i, j)] == M[i, j] (conjugated when the
# element carries conjugation) for every element g of its group.


def _group(hypothesis: Hypothesis, n: int):
    idn = lambda i, j: (i, j)
    swap = lambda i, j: (j, i)
    flip = lambda i, j: (n - 1 - i, n - 1 - j)
    anti = lambda i, j: (n - 1 - j, n - 1 - i)
    h = Hypothesis(hypothesis)
    if h is Hypothesis.H1:
        return [(idn, False), (swap, True)]
    if h is Hypothesis.H2:
        return [(idn, False), (swap, False)]
    if h is Hypothesis.H3:
        return [(idn, False), (swap, True), (flip, True), (anti, False)]
    return [(idn, False), (swap, False), (flip, False), (anti, False)]


def _orbit(group, pos):
    """Equality class of a position: maps position -> conjugation parity.

    Returns (orbit, forced_real). forced_real is set when some group element
    sends a position to itself with conjugation, pinning the class value to
    the real axis.
    """
    orbit = {pos: False}
    frontier = [pos]
    forced_real = False
    while frontier:
        p = frontier.pop()
        parity = orbit[p]
        for mapper, conj in group:
            q = mapper(*p)
            q_parity = parity ^ conj
            if q not in orbit:
                orbit[q] = q_parity
                frontier.append(q)
            elif orbit[q] != q_parity:
                forced_real = True
    return orbit, forced_real


@dataclass(frozen=True)
class StructureModel:
    """Linear parameterization ``vec(M) = C @ theta`` of one hypothesis.

    Attributes
    ----------
    hypothesis : Hypothesis
    n : int
        Matrix size.
    constraint : ndarray, complex, shape (n*n, m)
        The basis matrix C. Entries are 0, +-1, or +-1j.
    slots : tuple of (kind, i, j)
        One descriptor per theta entry, in order. ``kind`` is "re" or "im"
        and (i, j) is the 0-based representative position in the lower
        triangle whose real or imaginary part the slot carries.
    """

    hypothesis: Hypothesis
    n: int
    constraint: np.ndarray = field(repr=False)
    slots: tuple[tuple[str, int, int], ...] = field(repr=False)

    @property
    def m(self) -> int:
        """Number of free real parameters."""
        return self.constraint.shape[1]

    def decode(self, theta: np.ndarray) -> np.ndarray:
        """Assemble M from a real parameter vector."""
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (self.m,):
            raise ValueError(f"theta must have shape ({self.m},), got {theta.shape}")
        m = unvec(self.constraint @ theta, self.n, self.n)
        return m.real.copy() if self.hypothesis.is_real else m

    def encode(self, matrix: np.ndarray, tol: float = STRUCTURE_TOL) -> np.ndarray:
        """Extract theta from a matrix that satisfies this structure.

        Raises StructureViolationError when the matrix does not fit. The
        columns of C are mutually orthogonal, so the extraction is a scaled
        adjoint product; decode(encode(M)) reproduces M exactly for matrices
        whose entries already satisfy the equality classes bit-for-bit.
        """
        matrix = np.asarray(matrix)
        if matrix.shape != (self.n, self.n):
            raise ValueError(f"matrix must be {self.n}x{self.n}, got {matrix.shape}")
        residual = structure_residual(self.hypothesis, matrix)
        scale = max(1.0, float(np.max(np.abs(matrix))))
        if residual > tol * scale:
            raise StructureViolationError(
                f"matrix violates {self.hypothesis.name} ({self.hypothesis.label}): "
                f"residual {residual:.3e} exceeds {tol:.0e} * {scale:.3e}"
            )
        c = self.constraint
        theta = (c.conj().T @ vec(matrix)) / self._column_norms
        return theta.real

    @property
    def _column_norms(self) -> np.ndarray:
        # C^H C is diagonal by construction; cache the diagonal.
        cached = getattr(self, "_norms_cache", None)
        if cached is None:
            cached = np.einsum("ij,ij->j", self.constraint.conj(), self.constraint).real
            object.__setattr__(self, "_norms_cache", cached)
        return cached

    def describe_slots(self) -> list[str]:
        """Human-readable slot listing, e.g. ``['Re M[0,0]', 'Im M[1,0]', ...]``."""
        return [f"{'Re' if k == 're' else 'Im'} M[{i},{j}]" for k, i, j in self.slots]


_MODEL_CACHE: dict[tuple[Hypothesis, int], StructureModel] = {}


def structure_model(hypothesis: Hypothesis, n: int) -> StructureModel:
    """Build (and cache) the parameterization of a hypothesis at size n.

    Slot order: walk the lower triangle column by column, top to bottom
    within a column. Each new equality class contributes its real slot, then
    its imaginary slot when the class is not pinned real. Under H1 this
    reproduces the ordering [M(0,0), Re M(1,0), Im M(1,0), ..., M(1,1), ...].
    """
    h = Hypothesis(hypothesis)
    key = (h, n)
    model = _MODEL_CACHE.get(key)
    if model is not None:
        return model

    group = _group(h, n)
    complex_classes = not h.is_real
    seen: set[tuple[int, int]] = set()
    columns: list[np.ndarray] = []
    slots: list[tuple[str, int, int]] = []

    for j in range(n):
        for i in range(j, n):
            if (i, j) in seen:
                continue
            orbit, forced_real = _orbit(group, (i, j))
            seen.update(orbit)
            re_col = np.zeros(n * n, dtype=complex)
            for (p, q), _parity in orbit.items():
                re_col[q * n + p] = 1.0
            columns.append(re_col)
            slots.append(("re", i, j))
            if complex_classes and not forced_real:
                im_col = np.zeros(n * n, dtype=complex)
                for (p, q), parity in orbit.items():
                    im_col[q * n + p] = -1j if parity else 1j
                columns.append(im_col)
                slots.append(("im", i, j))

    constraint = np.column_stack(columns)
    expected = param_count(h, n)
    if constraint.shape[1] != expected:
        raise AssertionError(
            f"orbit enumeration built {constraint.shape[1]} slots for "
            f"{h.name} at n={n}, expected {expected}"
        )
    model = StructureModel(hypothesis=h, n=n, constraint=constraint, slots=tuple(slots))
    _MODEL_CACHE[key] = model
    return model


def project(hypothesis: Hypothesis, matrix: np.ndarray) -> np.ndarray:
    """Project a Hermitian matrix onto the structure of a hypothesis.

    H1 returns the input unchanged; H2 takes the real part; H3 averages with
    the flipped conjugate ``J conj(M) J``; H4 is the real part of the H3
    projection (the two operations commute entrywise, so chaining them is
    exact). Positive definiteness is preserved under every branch.
    """
    h = Hypothesis(hypothesis)
    matrix = np.asarray(matrix)
    if h is Hypothesis.H1:
        return matrix
    if h is Hypothesis.H2:
        return matrix.real.copy()
    flipped = matrix[::-1, ::-1].conj()
    centro = 0.5 * (matrix + flipped)
    if h is Hypothesis.H3:
        return centro
    return centro.real.copy()


def structure_residual(hypothesis: Hypothesis, matrix: np.ndarray) -> float:
    """Max-norm violation of the constraints defining a hypothesis.

    Checks every defining identity directly (hermitianity, realness,
    flip symmetry) and returns the largest entrywise deviation.
    """
    h = Hypothesis(hypothesis)
    a = np.asarray(matrix)
    residuals = [float(np.max(np.abs(a - a.conj().T)))] if a.size else [0.0]
    if h.is_real:
        residuals.append(float(np.max(np.abs(a.imag))) if np.iscomplexobj(a) else 0.0)
    if h in (Hypothesis.H3, Hypothesis.H4):
        residuals.append(float(np.max(np.abs(a - a[::-1, ::-1].conj()))))
    return max(residuals)


def satisfies_structure(
    hypothesis: Hypothesis, matrix: np.ndarray, tol: float = STRUCTURE_TOL
) -> bool:
    """True when the matrix obeys the hypothesis within a relative tolerance."""
    scale = max(1.0, float(np.max(np.abs(matrix)))) if np.asarray(matrix).size else 1.0
    return structure_residual(hypothesis, matrix) <= tol * scale
