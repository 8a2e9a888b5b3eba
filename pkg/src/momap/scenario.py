"""Scenario files: a YAML tree whose leaves are expression strings.

Schema (keys not listed are rejected)::

    id: str                      # defaults to the file stem
    description: str
    n: int                       # omega has degree n + 1
    manifold: {torus: int, affine: int}
    algebra:
      dim: int
      brackets: [[i, j, [c_1, ..., c_dim]], ...]   # [e_i, e_j] = sum c_l e_l, 1-based
    action: [expr, ...]          # one vector field per basis element
    forms:   {omega, omega_prime, alpha}
    maps:
      f, f_prime, eta: {"i" | "i,j" | ...: expr}   # cochain entries, 1-based
      mu, mu_prime, F: [expr, ...]                  # one entry per basis element
    family:  {X_s, omega_s, mu_s: [...], f_s: {...}}  # polynomial in s
    fixomega: {x: [c_1, ..., c_dim]}
    point: {theta: [...], z: [...]}  # theta in multiples of pi

Degrees are fixed by n: omega and omega_prime n+1, alpha n, mu n-1, F n-2,
f entries of arity k degree n-k, eta entries of arity k degree n-1-k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path

import yaml

from .complex import LieAction, TotalCochain
from .forms import DifferentialForm, VectorField
from .lie import JacobiError, LieAlgebra
from .momentmap import MomentMapCandidate
from .parser import ParseError, parse_form, parse_vector_field
from .scalars import ModelManifold, Point


class ScenarioError(ValueError):
    """Malformed scenario: bad YAML, unknown keys, parse or degree errors."""


_TOP_KEYS = {"id", "description", "n", "manifold", "algebra", "action", "forms", "maps",
             "family", "fixomega", "point"}
_FORM_KEYS = {"omega", "omega_prime", "alpha"}
_TABLE_MAPS = {"f", "f_prime", "eta"}
_LIST_MAPS = {"mu", "mu_prime", "F"}
_FAMILY_KEYS = {"X_s", "omega_s", "mu_s", "f_s"}


@dataclass
class Scenario:
    id: str
    description: str
    n: int
    manifold: ModelManifold
    algebra: LieAlgebra
    action: LieAction
    forms: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    family: dict = field(default_factory=dict)
    fixomega_x: tuple | None = None
    point: Point | None = None
    source: str = ""

    @property
    def dim(self) -> int:
        return self.algebra.dim

    def require(self, *names: str):
        missing = [n for n in names if n not in self.forms and n not in self.maps and n not in self.family]
        if missing:
            raise ScenarioError(f"scenario {self.id!r} lacks required entries: {', '.join(missing)}")

    def moment_map(self, name: str = "f") -> MomentMapCandidate:
        self.require(name)
        return MomentMapCandidate(self.n, self.maps[name])

    def base_point(self) -> Point:
        return self.point or Point((0,) * self.manifold.torus_dim, (0,) * self.manifold.affine_dim)


def _expect(cond: bool, path: str, message: str):
    if not cond:
        raise ScenarioError(f"{path}: {message}")


def _check_keys(node, allowed: set, path: str):
    _expect(isinstance(node, dict), path, "expected a mapping")
    unknown = sorted(set(map(str, node)) - allowed)
    _expect(not unknown, path, f"unknown keys {unknown}; allowed {sorted(allowed)}")


def _int(node, path: str, low: int = 0) -> int:
    _expect(isinstance(node, int) and not isinstance(node, bool) and node >= low, path,
            f"expected an integer >= {low}")
    return node


def _rational(node, path: str) -> Fraction:
    try:
        if isinstance(node, bool) or isinstance(node, float):
            raise ValueError
        return Fraction(str(node))
    except (ValueError, ZeroDivisionError):
        raise ScenarioError(f"{path}: expected an exact rational like 3 or -1/2, got {node!r}") from None


def _form(text, M: ModelManifold, degree: int, path: str) -> DifferentialForm:
    _expect(isinstance(text, (str, int)) and not isinstance(text, bool), path, "expected an expression string")
    _expect(degree >= 0 or str(text).strip() == "0", path, f"no forms of degree {degree} exist")
    try:
        return parse_form(str(text), M, max(degree, 0))
    except ParseError as e:
        raise ScenarioError(f"{path}: {e}") from None


def _field(text, M: ModelManifold, path: str) -> VectorField:
    _expect(isinstance(text, str), path, "expected an expression string")
    try:
        return parse_vector_field(text, M)
    except ParseError as e:
        raise ScenarioError(f"{path}: {e}") from None


def _tuple_key(key, dim: int, path: str) -> tuple:
    try:
        idx = tuple(int(p) for p in str(key).split(","))
    except ValueError:
        raise ScenarioError(f"{path}: key {key!r} is not a comma-separated index list") from None
    _expect(all(1 <= i <= dim for i in idx), path, f"key {key!r} has indices outside 1..{dim}")
    _expect(len(set(idx)) == len(idx), path, f"key {key!r} repeats an index")
    return tuple(i - 1 for i in idx)


def _table(node, M, dim: int, total_degree: int, path: str) -> TotalCochain:
    _expect(isinstance(node, dict), path, "expected a mapping from index lists to expressions")
    values = {}
    for key, text in node.items():
        tup = _tuple_key(key, dim, path)
        sub = f"{path}.{key}"
        _expect(len(tup) <= total_degree, sub, f"arity {len(tup)} exceeds the total degree {total_degree}")
        _expect(tup not in values and tuple(sorted(tup)) not in {tuple(sorted(k)) for k in values},
                sub, "duplicate entry")
        values[tup] = _form(text, M, total_degree - len(tup), sub)
    return TotalCochain(M, dim, total_degree, values)


def _list(node, M, dim: int, degree: int, path: str) -> list:
    _expect(isinstance(node, list) and len(node) == dim, path, f"expected a list of {dim} expressions")
    return [_form(text, M, degree, f"{path}[{i + 1}]") for i, text in enumerate(node)]


def _algebra(node, path: str) -> LieAlgebra:
    _check_keys(node, {"dim", "brackets"}, path)
    dim = _int(node.get("dim"), f"{path}.dim", 1)
    triples = []
    for i, entry in enumerate(node.get("brackets") or []):
        sub = f"{path}.brackets[{i + 1}]"
        _expect(isinstance(entry, list) and len(entry) == 3 and isinstance(entry[2], list), sub,
                "expected [i, j, [c_1, ..., c_dim]]")
        a, b = _int(entry[0], sub, 1), _int(entry[1], sub, 1)
        _expect(a <= dim and b <= dim and a != b, sub, "bracket indices must be distinct and within 1..dim")
        _expect(len(entry[2]) == dim, sub, f"expected {dim} coefficients")
        triples.append((a, b, [_rational(c, sub) for c in entry[2]]))
    try:
        return LieAlgebra.from_triples(dim, triples)
    except JacobiError as e:
        raise ScenarioError(f"{path}: {e}") from None
    except ValueError as e:
        raise ScenarioError(f"{path}: {e}") from None


def _point(node, M: ModelManifold, path: str) -> Point:
    _check_keys(node, {"theta", "z"}, path)
    theta = node.get("theta", [0] * M.torus_dim)
    z = node.get("z", [0] * M.affine_dim)
    _expect(isinstance(theta, list) and len(theta) == M.torus_dim, f"{path}.theta",
            f"expected {M.torus_dim} values")
    _expect(isinstance(z, list) and len(z) == M.affine_dim, f"{path}.z", f"expected {M.affine_dim} values")
    return Point(tuple(_rational(v, f"{path}.theta") for v in theta), tuple(_rational(v, f"{path}.z") for v in z))


def build(data, default_id: str = "scenario", source: str = "") -> Scenario:
    """Validate a parsed YAML tree and build every object it describes."""
    _check_keys(data, _TOP_KEYS, "scenario")
    n = _int(data.get("n"), "n", 1)
    mnode = data.get("manifold")
    _check_keys(mnode, {"torus", "affine"}, "manifold")
    M = ModelManifold(_int(mnode.get("torus", 0), "manifold.torus"), _int(mnode.get("affine", 0), "manifold.affine"))
    _expect(M.dim > 0, "manifold", "the manifold must have positive dimension")
    algebra = _algebra(data.get("algebra"), "algebra")
    dim = algebra.dim

    act = data.get("action")
    _expect(isinstance(act, list) and len(act) == dim, "action", f"expected a list of {dim} vector fields")
    generators = [_field(text, M, f"action[{i + 1}]") for i, text in enumerate(act)]
    for i, v in enumerate(generators):
        _expect(not v.manifold.parameters, f"action[{i + 1}]", "generators may not depend on t or s")
    action = LieAction(algebra, generators, M, check=False)

    forms = {}
    fnode = data.get("forms") or {}
    _check_keys(fnode, _FORM_KEYS, "forms")
    _expect("omega" in fnode, "forms", "omega is required")
    degrees = {"omega": n + 1, "omega_prime": n + 1, "alpha": n}
    for key, text in fnode.items():
        forms[key] = _form(text, M, degrees[key], f"forms.{key}")

    maps = {}
    mapnode = data.get("maps") or {}
    _check_keys(mapnode, _TABLE_MAPS | _LIST_MAPS, "maps")
    for key, node in mapnode.items():
        if key in _TABLE_MAPS:
            maps[key] = _table(node, M, dim, n if key != "eta" else n - 1, f"maps.{key}")
        else:
            maps[key] = _list(node, M, dim, n - 1 if key != "F" else n - 2, f"maps.{key}")

    family = {}
    famnode = data.get("family")
    if famnode is not None:
        _check_keys(famnode, _FAMILY_KEYS, "family")
        _expect("X_s" in famnode and "omega_s" in famnode, "family", "X_s and omega_s are required")
        _expect("mu_s" in famnode or "f_s" in famnode, "family", "give mu_s, f_s or both")
        family["X_s"] = _field(famnode["X_s"], M, "family.X_s")
        family["omega_s"] = _form(famnode["omega_s"], M, n + 1, "family.omega_s")
        if "mu_s" in famnode:
            family["mu_s"] = _list(famnode["mu_s"], M, dim, n - 1, "family.mu_s")
        if "f_s" in famnode:
            family["f_s"] = _table(famnode["f_s"], M, dim, n, "family.f_s")
        for key, value in family.items():
            params = set(value.manifold.parameters) if not isinstance(value, list) else {
                p for v in value for p in v.manifold.parameters}
            _expect(params <= {"s"}, f"family.{key}", "families may depend on s only")

    for key in ("f", "f_prime", "eta", "mu", "mu_prime", "F"):
        value = maps.get(key)
        params = set()
        if isinstance(value, TotalCochain):
            params = {p for form in value.values.values() for p in form.manifold.parameters}
        elif isinstance(value, list):
            params = {p for form in value for p in form.manifold.parameters}
        _expect(not params, f"maps.{key}", "only family entries may depend on t or s")
    for key, value in forms.items():
        _expect(not value.manifold.parameters, f"forms.{key}", "only family entries may depend on t or s")

    fixomega_x = None
    if data.get("fixomega") is not None:
        _check_keys(data["fixomega"], {"x"}, "fixomega")
        x = data["fixomega"].get("x")
        _expect(isinstance(x, list) and len(x) == dim, "fixomega.x", f"expected {dim} coefficients")
        fixomega_x = tuple(_rational(c, "fixomega.x") for c in x)

    point = _point(data["point"], M, "point") if data.get("point") is not None else None
    sid = data.get("id", default_id)
    _expect(isinstance(sid, str) and sid, "id", "expected a non-empty string")
    description = data.get("description", "")
    _expect(isinstance(description, str), "description", "expected a string")
    return Scenario(sid, description, n, M, algebra, action, forms, maps, family, fixomega_x, point, source)


def loads(text: str, default_id: str = "scenario", source: str = "") -> Scenario:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f"{mark.line + 1}:{mark.column + 1}: " if mark else ""
        raise ScenarioError(f"{where}invalid YAML: {getattr(e, 'problem', e)}") from None
    return build(data, default_id, source)


def bundled_names() -> list:
    root = resources.files("momap") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".yaml"))


def resolve(path_or_name: str) -> tuple:
    """(text, stem, source) for a file path or a bundled scenario name."""
    path = Path(path_or_name)
    if path.is_file():
        return path.read_text(encoding="utf-8"), path.stem, str(path)
    if path_or_name in bundled_names():
        res = resources.files("momap") / "scenarios" / f"{path_or_name}.yaml"
        return res.read_text(encoding="utf-8"), path_or_name, f"bundled:{path_or_name}"
    raise ScenarioError(f"no scenario file or bundled scenario named {path_or_name!r}")


def load(path_or_name: str) -> Scenario:
    text, stem, source = resolve(path_or_name)
    return loads(text, stem, source)
