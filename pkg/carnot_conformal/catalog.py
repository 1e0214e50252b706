"""
Carnot Conformal
Catalog - fixture algebras (Iwasawa N groups dan rigid examples) with expected verdicts
"""

from itertools import combinations
from typing import Dict, List, Optional, Tuple

from .algebra import StratifiedAlgebra
from .errors import UnknownCatalogEntryError
from .report_schema import Verdict


# ============================================================================
# BUILDERS
# ============================================================================

def build_abelian(n=3):
    """R^n with zero bracket, layers [n]"""
    if n < 3:
        raise ValueError(f"abelian needs n >= 3, got {n}")
    return StratifiedAlgebra.from_brackets(f"abelian({n})", [n], {})


def build_heisenberg(n=1):
    """
    Heisenberg algebra of dimension 2n + 1

    Basis X_1..X_n, Y_1..Y_n in layer 1 and Z in layer 2, [X_i, Y_i] = Z.
    """
    if n < 1:
        raise ValueError(f"heisenberg needs n >= 1, got {n}")
    z = 2 * n
    brackets = {(i, n + i): {z: 1} for i in range(n)}
    return StratifiedAlgebra.from_brackets(f"heisenberg({n})", [2 * n, 1], brackets)


# unit products e_a e_b = sign * e_c for the quaternion basis (1, i, j, k)
_QUATERNION_PRODUCT = {
    (0, 0): (1, 0), (0, 1): (1, 1), (0, 2): (1, 2), (0, 3): (1, 3),
    (1, 0): (1, 1), (1, 1): (-1, 0), (1, 2): (1, 3), (1, 3): (-1, 2),
    (2, 0): (1, 2), (2, 1): (-1, 3), (2, 2): (-1, 0), (2, 3): (1, 1),
    (3, 0): (1, 3), (3, 1): (1, 2), (3, 2): (-1, 1), (3, 3): (-1, 0),
}


def build_quaternionic_heisenberg():
    """
    Quaternionic Heisenberg algebra, layers [4, 3]

    Layer 1 is H with basis (1, i, j, k), layer 2 is Im H with basis
    (i, j, k), and [x, y] = conj(x) y - conj(y) x = 2 Im(conj(x) y).
    """
    brackets = {}
    for a, b in combinations(range(4), 2):
        conj_sign = 1 if a == 0 else -1
        sign, c = _QUATERNION_PRODUCT[(a, b)]
        if c == 0:
            continue
        # 2 Im(conj(e_a) e_b); the real part cancels against conj(e_b) e_a
        brackets[(a, b)] = {3 + c: 2 * conj_sign * sign}
    return StratifiedAlgebra.from_brackets("quaternionic_heisenberg", [4, 3], brackets)


def build_free_nilpotent(m=3, step=2):
    """
    Free step-2 nilpotent algebra on m generators, [e_i, e_j] = e_ij for i < j

    The e_ij follow the lexicographic order of the pairs (i, j).
    """
    if m < 2:
        raise ValueError(f"free_nilpotent needs m >= 2, got {m}")
    if step != 2:
        raise ValueError(f"free_nilpotent supports step 2 only, got {step}")
    brackets = {}
    for position, (i, j) in enumerate(combinations(range(m), 2)):
        brackets[(i, j)] = {m + position: 1}
    return StratifiedAlgebra.from_brackets(
        f"free_nilpotent({m},{step})", [m, m * (m - 1) // 2], brackets
    )


def build_engel():
    """Engel algebra, layers [2, 1, 1]: [X1, X2] = X3, [X1, X3] = X4"""
    return StratifiedAlgebra.from_brackets("engel", [2, 1, 1], {(0, 1): {2: 1}, (0, 2): {3: 1}})


# ============================================================================
# CATALOG
# ============================================================================

CATALOG = {
    "abelian": {
        "name": "Abelian R^n",
        "description": "Euclidean space as a step-1 Carnot group; conformal group is O(n+1,1)",
        "tags": ["step-1", "iwasawa", "euclidean"],
        "params": {"n": 3},
        "builder": build_abelian,
    },
    "heisenberg": {
        "name": "Heisenberg algebra",
        "description": "Complex Heisenberg group, Iwasawa N of SU(n+1,1)",
        "tags": ["step-2", "iwasawa", "h-type", "contact"],
        "params": {"n": 1},
        "builder": build_heisenberg,
    },
    "quaternionic_heisenberg": {
        "name": "Quaternionic Heisenberg algebra",
        "description": "Iwasawa N of Sp(2,1); bracket 2 Im(conj(x) y)",
        "tags": ["step-2", "iwasawa", "h-type", "quaternionic"],
        "params": {},
        "builder": build_quaternionic_heisenberg,
    },
    "free_nilpotent": {
        "name": "Free nilpotent algebra",
        "description": "Free step-2 algebra on m generators; rigid for m >= 3 (m = 2 is Heisenberg)",
        "tags": ["step-2", "rigid", "free"],
        "params": {"m": 3, "step": 2},
        "builder": build_free_nilpotent,
    },
    "engel": {
        "name": "Engel algebra",
        "description": "Step-3 filiform algebra of dimension 4; rigid",
        "tags": ["step-3", "rigid", "filiform"],
        "params": {},
        "builder": build_engel,
    },
}


# fixtures reproduced by `catalog selftest`
SELF_TEST = [
    ("abelian", {"n": 3}),
    ("heisenberg", {"n": 1}),
    ("heisenberg", {"n": 2}),
    ("quaternionic_heisenberg", {}),
    ("free_nilpotent", {"m": 3, "step": 2}),
    ("engel", {}),
]


# ============================================================================
# HELPER FUNCTIONS
# ============================================================================

def get_entry(name: str) -> Dict:
    """
    Catalog entry by name

    Raises:
        UnknownCatalogEntryError: name not in the catalog
    """
    entry = CATALOG.get(name)
    if entry is None:
        raise UnknownCatalogEntryError(
            f"unknown catalog entry '{name}'; available: {', '.join(sorted(CATALOG))}"
        )
    return entry


def resolve_params(name: str, params: Optional[Dict] = None) -> Dict:
    """Defaults of the entry overridden by params; unknown keys are rejected"""
    entry = get_entry(name)
    params = dict(params or {})
    unknown = set(params) - set(entry["params"])
    if unknown:
        raise ValueError(f"{name} takes no parameter(s) {', '.join(sorted(unknown))}")
    return {**entry["params"], **params}


def catalog_build(name: str, params: Optional[Dict] = None) -> StratifiedAlgebra:
    """
    Build fixture algebra

    Args:
        name: catalog name
        params: constructor parameters, e.g. {"n": 2}

    Returns:
        StratifiedAlgebra: fixture
    """
    resolved = resolve_params(name, params)
    return get_entry(name)["builder"](**resolved)


def expected_verdict(name: str, params: Optional[Dict] = None) -> Verdict:
    """Classification the fixture must reproduce"""
    resolved = resolve_params(name, params)
    if name == "free_nilpotent" and resolved["m"] == 2:
        return Verdict.IWASAWA
    return Verdict.IWASAWA if "iwasawa" in get_entry(name)["tags"] else Verdict.RIGID


def parse_params(pairs: List[str]) -> Dict[str, int]:
    """["n=2", "m=3"] -> {"n": 2, "m": 3}"""
    params = {}
    for pair in pairs or []:
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"parameter must look like key=value, got {pair!r}")
        try:
            params[key.strip()] = int(value)
        except ValueError:
            raise ValueError(f"parameter {key.strip()} must be an integer, got {value!r}") from None
    return params


def search_entries(query: str = None, tags: List[str] = None) -> List[Tuple[str, Dict]]:
    """Entries whose name, description or tags match"""
    results = []
    query_lower = query.lower() if query else ""
    for entry_id, entry in CATALOG.items():
        if query:
            search_in = " ".join([entry_id, entry["name"], entry["description"], " ".join(entry["tags"])]).lower()
            if query_lower not in search_in:
                continue
        if tags and not set(tags).intersection(entry["tags"]):
            continue
        results.append((entry_id, entry))
    return results


def get_entry_summary(name: str) -> str:
    entry = get_entry(name)
    params = ", ".join(f"{k}={v}" for k, v in entry["params"].items()) or "none"
    alg = catalog_build(name)
    return f"""
Algebra: {entry['name']} ({name})
Parameters: {params}
Layers: {list(alg.layer_dims)}
Expected: {expected_verdict(name).value}
Tags: {', '.join(entry['tags'])}

{entry['description']}
    """.strip()
