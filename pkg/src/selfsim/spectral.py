"""Degrees of the irreducible components of a level quasi-regular action.

The intersection numbers give the left-regular matrices of the convolution
algebra.  When the algebra is commutative its joint eigensystem is a set of
one-dimensional characters; the multiplicity attached to character row j,

    m_j = N / sum_i |P[j, i]|^2 / k_i,

is the dimension of the j-th isotypic component of the permutation module,
i.e. an irreducible degree.  A dense cross-check diagonalizes a random
combination of the N x N class adjacency matrices instead and reads the
degrees off the eigenvalue cluster sizes.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import IntegrityError, NumericalError, SizeCapError
from .scheme import OrbitalScheme, build_scheme
from .tree import DEFAULT_LEVEL_CAP, Ray
from .wreath import WreathPresentation

DEFAULT_SEED = 1729
EIG_CLUSTER_RTOL = 1e-8
INTEGER_TOL = 1e-6
RESIDUAL_TOL = 1e-6
MAX_SEED_TRIES = 5
DENSE_ORACLE_CAP = 243


def intersection_matrices(scheme: OrbitalScheme) -> np.ndarray:
    """Left-regular matrices B, B[i][k, j] = p[i][j][k]; verified to multiply
    like the classes they represent."""
    p = scheme.p
    r = scheme.rank
    B = np.stack([p[i].T.copy() for i in range(r)])
    for i in range(r):
        for j in range(r):
            lhs = B[i] @ B[j]
            rhs = np.tensordot(p[i, j, :], B, axes=(0, 0))
            if not np.array_equal(lhs, rhs):
                raise IntegrityError(
                    f"left-regular matrices violate the product rule at ({i}, {j})"
                )
    return B


def _cluster_indices(values: np.ndarray, atol: float) -> list[list[int]]:
    """Group indices whose values are chained within atol of each other."""
    k = len(values)
    parent = list(range(k))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a in range(k):
        for b in range(a + 1, k):
            if abs(values[a] - values[b]) <= atol:
                ra, rb = find(a), find(b)
                if ra != rb:
                    parent[ra] = rb
    groups: dict[int, list[int]] = {}
    for a in range(k):
        groups.setdefault(find(a), []).append(a)
    return list(groups.values())


def common_eigensystem(matrices: np.ndarray, seed: int = DEFAULT_SEED,
                       rtol: float = EIG_CLUSTER_RTOL) -> np.ndarray:
    """Character table P of a commuting family: P[j, i] is the eigenvalue of
    matrices[i] on the j-th joint eigenspace.

    Row 0 carries the valency character; the rest are sorted by multiplicity,
    then lexicographically.  Seeds are retried when a random combination
    fails to separate the eigenspaces.
    """
    B = np.asarray(matrices)
    r = B.shape[0]
    for i in range(r):
        for j in range(i + 1, r):
            if not np.array_equal(B[i] @ B[j], B[j] @ B[i]):
                raise IntegrityError(f"matrices {i} and {j} do not commute")

    valencies = B[:, 0, :].sum(axis=1)  # row sums are constant per matrix
    point_count = int(valencies.sum())
    ones = np.ones(r)
    last_error = "no attempt made"
    for attempt in range(MAX_SEED_TRIES):
        rng = np.random.default_rng(seed + attempt)
        coeffs = rng.uniform(1.0, 2.0, size=r)
        M = np.tensordot(coeffs, B, axes=(0, 0))
        evals, evecs = np.linalg.eig(M)
        atol = rtol * max(1.0, float(np.abs(evals).max()))
        clusters = _cluster_indices(evals, atol)
        if len(clusters) != r:
            last_error = (f"seed {seed + attempt} separated only {len(clusters)} "
                          f"of {r} joint eigenspaces")
            continue

        P = np.empty((r, r), dtype=complex)
        residual = 0.0
        for row, (col,) in enumerate(clusters):
            v = evecs[:, col]
            nrm = float(np.vdot(v, v).real)
            for i in range(r):
                theta = np.vdot(v, B[i] @ v) / nrm
                P[row, i] = theta
                residual = max(residual, float(np.linalg.norm(B[i] @ v - theta * v)) /
                               max(1.0, float(np.linalg.norm(B[i]))))
        if residual > RESIDUAL_TOL:
            last_error = f"seed {seed + attempt} left eigenvector residual {residual:.2e}"
            continue

        overlaps = [abs(np.vdot(evecs[:, cols[0]], ones)) /
                    np.linalg.norm(evecs[:, cols[0]]) for cols in clusters]
        trivial = int(np.argmax(overlaps))
        if np.abs(P[trivial] - valencies).max() > INTEGER_TOL * max(1, point_count):
            last_error = f"seed {seed + attempt} misidentified the valency character"
            continue

        m = _raw_multiplicities(P, valencies, point_count).real
        order = [trivial] + sorted(
            (j for j in range(r) if j != trivial),
            key=lambda j: (round(float(m[j]), 9),
                           tuple((round(x.real, 9) + 0.0, round(x.imag, 9) + 0.0)
                                 for x in P[j])),
        )
        return P[order]
    raise NumericalError(f"common eigensystem did not resolve: {last_error}")


def _raw_multiplicities(P: np.ndarray, valencies: np.ndarray,
                        point_count: int) -> np.ndarray:
    denom = (np.abs(P) ** 2 / valencies).sum(axis=1)
    return point_count / denom


def multiplicities(P: np.ndarray, valencies: np.ndarray, point_count: int,
                   tol: float = INTEGER_TOL) -> list[int]:
    """Isotypic multiplicities from the character table; must round to
    positive integers summing to the point count."""
    raw = _raw_multiplicities(P, np.asarray(valencies), point_count)
    out = []
    for j, value in enumerate(raw):
        nearest = round(float(value.real)) if np.iscomplexobj(raw) else round(float(value))
        if abs(value - nearest) > tol or nearest < 1:
            raise NumericalError(
                f"multiplicity {j} is {value!r}, not within {tol} of a positive integer"
            )
        out.append(int(nearest))
    if sum(out) != point_count:
        raise NumericalError(
            f"multiplicities {out} sum to {sum(out)}, expected {point_count}"
        )
    return out


@dataclass(frozen=True, eq=False)
class SpectralData:
    rank: int
    point_count: int
    character_table: np.ndarray
    multiplicities: tuple[int, ...]
    seed: int
    tolerance_used: float


def _orthogonality_defect(P: np.ndarray, m: list[int], valencies: np.ndarray,
                          point_count: int) -> float:
    """Max deviation of the row-orthogonality relations from the identity."""
    weights = np.sqrt(np.asarray(m, dtype=float) / point_count)
    S = (weights[:, None] * P) / np.sqrt(np.asarray(valencies, dtype=float))
    gram = S @ S.conj().T
    return float(np.abs(gram - np.eye(len(m))).max())


def spectral_data(scheme: OrbitalScheme, seed: int = DEFAULT_SEED) -> SpectralData:
    B = intersection_matrices(scheme)
    P = common_eigensystem(B, seed)
    m = multiplicities(P, scheme.valencies, scheme.point_count)
    if m[0] != 1:
        raise NumericalError(f"valency character has multiplicity {m[0]}, expected 1")
    defect = _orthogonality_defect(P, m, scheme.valencies, scheme.point_count)
    if defect > INTEGER_TOL:
        raise NumericalError(f"character rows are not orthonormal: defect {defect:.2e}")
    return SpectralData(scheme.rank, scheme.point_count, P, tuple(m), seed,
                        tolerance_used=INTEGER_TOL)


def degree_multiset_from_scheme(scheme: OrbitalScheme,
                                seed: int = DEFAULT_SEED) -> list[int]:
    return sorted(spectral_data(scheme, seed).multiplicities)


def degree_multiset(pres: WreathPresentation, n: int, ray: Ray,
                    seed: int = DEFAULT_SEED,
                    cap: int = DEFAULT_LEVEL_CAP) -> list[int]:
    """Sorted degrees of the irreducible components on level n."""
    return degree_multiset_from_scheme(build_scheme(pres, n, ray, cap), seed)


def tower_nesting_check(pres: WreathPresentation, n: int, ray: Ray,
                        seed: int = DEFAULT_SEED,
                        cap: int = DEFAULT_LEVEL_CAP) -> bool:
    """Whether the level-n degree multiset embeds in the level-(n+1) one."""
    here = Counter(degree_multiset(pres, n, ray, seed, cap))
    there = Counter(degree_multiset(pres, n + 1, ray, seed, cap))
    return all(there[deg] >= count for deg, count in here.items())


def dense_commutant_oracle(pres: WreathPresentation, n: int, ray: Ray,
                           seed: int = DEFAULT_SEED,
                           rtol: float = EIG_CLUSTER_RTOL) -> list[int]:
    """Degree multiset via the full N x N class adjacency matrices.

    Independent of the intersection-number route: diagonalizes a random real
    combination of the adjacency matrices and reads off sorted eigenvalue
    cluster sizes.  Only for N <= 243.
    """
    size = pres.degree**n
    if size > DENSE_ORACLE_CAP:
        raise SizeCapError(
            f"dense oracle needs {size} points, cap is {DENSE_ORACLE_CAP}", size=size
        )
    scheme = build_scheme(pres, n, ray)
    labels = scheme.labels
    A = np.stack([(labels == i).astype(float) for i in range(scheme.rank)])
    last_error = "no attempt made"
    for attempt in range(MAX_SEED_TRIES):
        rng = np.random.default_rng(seed + attempt)
        coeffs = rng.uniform(1.0, 2.0, size=scheme.rank)
        M = np.tensordot(coeffs, A, axes=(0, 0))
        evals = np.linalg.eigvals(M)
        atol = rtol * max(1.0, float(np.abs(evals).max()))
        clusters = _cluster_indices(evals, atol)
        if len(clusters) == scheme.rank:
            return sorted(len(c) for c in clusters)
        last_error = (f"seed {seed + attempt} gave {len(clusters)} eigenvalue "
                      f"clusters for rank {scheme.rank}")
    raise NumericalError(f"dense oracle did not resolve: {last_error}")
