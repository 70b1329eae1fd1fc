"""Built-in permutation presentations of small groups."""

from typing import Dict, List, Tuple

from exceptions import UnknownGroupError
from group import Group, enumerate_group


def _cycle(n: int) -> List[int]:
    return [(i + 1) % n for i in range(n)]


def _transpositions(pairs: int) -> List[List[int]]:
    gens = []
    for k in range(pairs):
        perm = list(range(2 * pairs))
        perm[2 * k], perm[2 * k + 1] = 2 * k + 1, 2 * k
        gens.append(perm)
    return gens


CATALOG: Dict[str, Tuple[int, List[List[int]]]] = {
    "1": (1, [[0]]),
    **{f"C{n}": (n, [_cycle(n)]) for n in range(2, 10)},
    "V4": (4, [[1, 0, 2, 3], [0, 1, 3, 2]]),
    "C2xC4": (6, [[1, 0, 2, 3, 4, 5], [0, 1, 3, 4, 5, 2]]),
    "C2^3": (6, _transpositions(3)),
    "D8": (4, [[1, 2, 3, 0], [0, 3, 2, 1]]),
    "Q8": (8, [[2, 3, 1, 0, 6, 7, 5, 4], [4, 5, 7, 6, 1, 0, 2, 3]]),
    "C3xC3": (6, [[1, 2, 0, 3, 4, 5], [0, 1, 2, 4, 5, 3]]),
    "S3": (3, [[1, 0, 2], [1, 2, 0]]),
    "A4": (4, [[1, 2, 0, 3], [1, 0, 3, 2]]),
}

ALIASES = {
    "D4": "D8",
    "C2xC2": "V4",
    "trivial": "1",
    "C2xC2xC2": "C2^3",
}


def canonical_name(name: str) -> str:
    key = str(name).strip()
    key = ALIASES.get(key, key)
    if key not in CATALOG:
        raise UnknownGroupError(f"Unknown group {name!r}; known: {', '.join(catalog_names())}")
    return key


def catalog_names() -> List[str]:
    return list(CATALOG)


def group_spec(name: str) -> Dict:
    key = canonical_name(name)
    degree, gens = CATALOG[key]
    return {"name": key, "degree": degree, "generators": [list(g) for g in gens]}


def catalog_group(name: str) -> Group:
    """Enumerates a catalog group by name or alias."""
    key = canonical_name(name)
    degree, gens = CATALOG[key]
    return enumerate_group(degree, gens, name=key)
