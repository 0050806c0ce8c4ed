"""Level transversals, point-stabilizer generators and suborbits.

Fix a base vertex on level n (a ray prefix).  A breadth-first sweep over the
generators yields a transversal u_x with act(u_x, base) = x for every level
vertex x; the stabilizer of the base is then generated by the loop words
u_{s(x)}^-1 s u_x, and its orbits partition the level.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import NotTransitiveError, SizeCapError
from .tree import DEFAULT_LEVEL_CAP, Ray, Vertex, check_level_size, ray_prefix
from .wreath import Word, WreathPresentation, generator_level_perms

DEFAULT_GROUP_CAP = 1 << 20


@dataclass(frozen=True, eq=False)
class Transversal:
    """Coset representatives for the base-point stabilizer on one level."""

    base: Vertex
    level: int
    words: tuple[Word, ...]   # index x -> word with act(word, base) = x
    perms: np.ndarray         # perms[x] = level permutation of words[x]
    order: tuple[int, ...]    # indices in breadth-first discovery order

    def __len__(self) -> int:
        return len(self.words)


def orbit_transversal(pres: WreathPresentation, n: int, ray: Ray,
                      cap: int = DEFAULT_LEVEL_CAP) -> Transversal:
    if ray.degree != pres.degree:
        raise ValueError("ray degree does not match the presentation")
    size = check_level_size(pres.degree, n, cap)
    base = ray_prefix(ray, n)
    base_idx = base.index()
    gen_perms = generator_level_perms(pres, n, cap)

    words: list[Word | None] = [None] * size
    perms = np.empty((size, size), dtype=np.int64)
    words[base_idx] = Word()
    perms[base_idx] = np.arange(size, dtype=np.int64)
    order = [base_idx]
    queue = deque([base_idx])
    while queue:
        x = queue.popleft()
        for name in pres.generator_names:
            y = int(gen_perms[name][x])
            if words[y] is None:
                words[y] = Word.generator(name) * words[x]
                perms[y] = gen_perms[name][perms[x]]
                order.append(y)
                queue.append(y)
    if len(order) != size:
        raise NotTransitiveError(
            f"action on level {n} is not transitive: orbit of {base} has "
            f"{len(order)} of {size} vertices",
            orbit_size=len(order),
        )
    return Transversal(base, n, tuple(words), perms, tuple(order))


def _inverse_rows(perms: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perms)
    cols = np.arange(perms.shape[1], dtype=perms.dtype)
    for x in range(perms.shape[0]):
        inv[x][perms[x]] = cols
    return inv


def _schreier_perms_words(pres: WreathPresentation,
                          tv: Transversal) -> tuple[list[np.ndarray], list[Word]]:
    """Stabilizer generators as (level permutation, reduced word) pairs.

    Words reducing to the empty word are dropped; after that the first word
    per distinct permutation wins (generators in declared order, vertices in
    discovery order).
    """
    gen_perms = generator_level_perms(pres, tv.level)
    inv = _inverse_rows(tv.perms)
    seen: set[bytes] = set()
    out_perms: list[np.ndarray] = []
    out_words: list[Word] = []
    for name in pres.generator_names:
        pg = gen_perms[name]
        for x in tv.order:
            y = int(pg[x])
            word = pres.reduce(tv.words[y].inverse() * Word.generator(name) * tv.words[x])
            if len(word) == 0:
                continue
            perm = inv[y][pg[tv.perms[x]]]
            key = perm.tobytes()
            if key in seen:
                continue
            seen.add(key)
            out_perms.append(perm)
            out_words.append(word)
    return out_perms, out_words


def schreier_generators(pres: WreathPresentation, n: int, ray: Ray,
                        cap: int = DEFAULT_LEVEL_CAP) -> list[Word]:
    """Words generating the stabilizer of the level-n ray prefix."""
    tv = orbit_transversal(pres, n, ray, cap)
    _, words = _schreier_perms_words(pres, tv)
    return words


@dataclass(frozen=True)
class SuborbitPartition:
    """Orbits of the base-point stabilizer on a level, in canonical order:
    the base's own block first, the rest by (size, smallest vertex index)."""

    base: Vertex
    level: int
    blocks: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.blocks)

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def block_of_array(self, size: int) -> np.ndarray:
        out = np.empty(size, dtype=np.int64)
        for k, block in enumerate(self.blocks):
            out[list(block)] = k
        return out

    def blocks_as_vertices(self, degree: int) -> list[list[str]]:
        return [
            [str(Vertex.from_index(degree, self.level, i)) for i in block]
            for block in self.blocks
        ]


def _canonical_partition(labels: np.ndarray, base: Vertex, level: int,
                         base_idx: int) -> SuborbitPartition:
    groups: dict[int, list[int]] = {}
    for idx, lab in enumerate(labels):
        groups.setdefault(int(lab), []).append(idx)
    blocks = [tuple(b) for b in groups.values()]
    base_block = next(b for b in blocks if base_idx in b)
    rest = sorted((b for b in blocks if b is not base_block), key=lambda b: (len(b), b[0]))
    return SuborbitPartition(base, level, (base_block, *rest))


def _component_partition(perms: list[np.ndarray], size: int, base: Vertex,
                         level: int, base_idx: int) -> SuborbitPartition:
    if not perms:
        labels = np.arange(size, dtype=np.int64)
    else:
        rows = np.concatenate([np.arange(size, dtype=np.int64)] * len(perms))
        cols = np.concatenate(perms)
        data = np.ones(len(rows), dtype=np.int8)
        graph = coo_matrix((data, (rows, cols)), shape=(size, size))
        _, labels = connected_components(graph, directed=False)
    return _canonical_partition(labels, base, level, base_idx)


def stabilizer_suborbits(pres: WreathPresentation, n: int, ray: Ray,
                         cap: int = DEFAULT_LEVEL_CAP) -> SuborbitPartition:
    """Orbits on level n of the stabilizer of the ray's level-n prefix."""
    tv = orbit_transversal(pres, n, ray, cap)
    return suborbits_from_transversal(pres, tv)


def suborbits_from_transversal(pres: WreathPresentation, tv: Transversal) -> SuborbitPartition:
    perms, _ = _schreier_perms_words(pres, tv)
    return _component_partition(perms, len(tv.words), tv.base, tv.level, tv.base.index())


# ---------------------------------------------------------------------------
# brute-force oracles


def _level_group_elements(pres: WreathPresentation, n: int,
                          cap: int) -> list[np.ndarray]:
    """Every permutation of level n induced by the group, by closure sweep."""
    gen_perms = generator_level_perms(pres, n)
    size = pres.degree**n
    gens = [gen_perms[name] for name in pres.generator_names]
    identity = np.arange(size, dtype=np.int64)
    elements = {identity.tobytes(): identity}
    queue = deque([identity])
    while queue:
        p = queue.popleft()
        for g in gens:
            q = g[p]
            key = q.tobytes()
            if key not in elements:
                if len(elements) >= cap:
                    raise SizeCapError(
                        f"group on level {n} exceeds cap {cap} "
                        f"(found {len(elements)} elements so far)",
                        size=len(elements),
                    )
                elements[key] = q
                queue.append(q)
    return list(elements.values())


def bfs_group_order(pres: WreathPresentation, n: int,
                    cap: int = DEFAULT_GROUP_CAP) -> int:
    """Order of the finite permutation group induced on level n."""
    return len(_level_group_elements(pres, n, cap))


def oracle_suborbits(pres: WreathPresentation, n: int, ray: Ray,
                     cap: int = DEFAULT_GROUP_CAP) -> SuborbitPartition:
    """Suborbits computed from the full level group; exponential, small n only."""
    if ray.degree != pres.degree:
        raise ValueError("ray degree does not match the presentation")
    base = ray_prefix(ray, n)
    base_idx = base.index()
    size = pres.degree**n
    elements = _level_group_elements(pres, n, cap)
    orbit = {int(p[base_idx]) for p in elements}
    if len(orbit) != size:
        raise NotTransitiveError(
            f"action on level {n} is not transitive: orbit of {base} has "
            f"{len(orbit)} of {size} vertices",
            orbit_size=len(orbit),
        )
    stab = [p for p in elements if int(p[base_idx]) == base_idx]
    return _component_partition(stab, size, base, n, base_idx)
