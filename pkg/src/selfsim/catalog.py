"""Built-in groups acting on the binary and ternary rooted trees."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache

from .errors import UnknownGroupError
from .tree import Ray, all_d_ray
from .wreath import WreathPresentation, parse_presentation

_BUILTIN_TEXTS = {
    "grigorchuk": """\
degree: 2
involutions: a, b, c, d
gen a = perm (1 2) | e, e
gen b = perm () | a, c
gen c = perm () | a, d
gen d = perm () | e, b
""",
    "grigorchuk-tilde": """\
degree: 2
involutions: a, b, c, d
gen a = perm (1 2) | e, e
gen b = perm () | a, c
gen c = perm () | e, d
gen d = perm () | e, b
""",
    "gamma": """\
degree: 3
gen a = perm (1 2 3) | e, e, e
gen r = perm () | a, e, r
""",
    "gamma-bar": """\
degree: 3
gen a = perm (1 2 3) | e, e, e
gen s = perm () | a, a, s
""",
    "gupta-sidki": """\
degree: 3
gen a = perm (1 2 3) | e, e, e
gen t = perm () | a, a^-1, t
""",
}


@dataclass(frozen=True)
class CatalogEntry:
    key: str
    presentation: WreathPresentation
    default_ray: Ray

    @property
    def degree(self) -> int:
        return self.presentation.degree

    def expected_rank(self, n: int) -> int:
        """Number of point-stabilizer suborbits on level n."""
        if n < 0:
            raise ValueError(f"level must be >= 0, got {n}")
        if n == 0:
            return 1
        return n + 1 if self.degree == 2 else 2 * n + 1

    def expected_degrees(self, n: int) -> list[int]:
        """Sorted degree multiset of the level-n quasi-regular decomposition."""
        if n < 0:
            raise ValueError(f"level must be >= 0, got {n}")
        if n == 0:
            return [1]
        if self.degree == 2:
            return sorted([1, 1] + [2**i for i in range(1, n)])
        return sorted([1, 1, 1] + [3**i for i in range(1, n) for _ in range(2)])


@cache
def builtin(key: str) -> CatalogEntry:
    text = _BUILTIN_TEXTS.get(key)
    if text is None:
        raise UnknownGroupError(
            f"unknown group {key!r}; available: {', '.join(sorted(_BUILTIN_TEXTS))}"
        )
    pres = parse_presentation(text)
    return CatalogEntry(key, pres, all_d_ray(pres.degree))


def keys() -> tuple[str, ...]:
    return tuple(_BUILTIN_TEXTS)


def source_text(key: str) -> str:
    if key not in _BUILTIN_TEXTS:
        raise UnknownGroupError(f"unknown group {key!r}")
    return _BUILTIN_TEXTS[key]
