"""JSON instance files: parsing, canonical serialization and digests.

Top-level keys (``version`` is mandatory)::

    {"version": 1,
     "coefficients": [0, 4] | "Z+Z/4" | "Q/Z",
     "complex": {...}                         # single complex, or
     "poset": {"elements": [...], "relations": [[a, b], ...]},
     "complexes": {"<element>": {...}, ...},
     "bondings": [{"from": a, "to": b, "maps": [matrix, ...]}
                  | {"from": a, "to": b, "vertex_map": {"v": w, ...}}],
     "group_system": {...}, "tower": {...}, "ses": {...}}

A complex is ``{"ranks": [...], "differentials": [matrix, ...]}`` or
``{"simplicial": {"facets": [...], "subcomplex": [...]}}``.  Matrices are
lists of rows; rationals may be written ``"p/q"``.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .cone import CochainComplex, CochainMap, DimensionMismatch
from .fgab import FgAbGroup, FgMorphism, format_factors
from .linalg import Mat
from .prosys import DirectSystem, FinitePoset
from .resolution import InjectiveResolution, build_resolution, parse_coefficients
from .simplicial import NonSimplicialMap, SimplicialComplex, cochain_complex, cochain_map

__all__ = ["FORMAT_VERSION", "InstanceError", "Instance", "parse_instance", "load_instance",
           "serialize_instance", "dump_instance", "digest", "system_to_dict"]

FORMAT_VERSION = 1


class InstanceError(ValueError):
    """Schema or consistency problem; the message starts with its location."""


@dataclass
class Instance:
    version: int = FORMAT_VERSION
    coefficients: Any = None          # canonical: list of invariant factors or "Q/Z"-style string
    system: DirectSystem | None = None
    group_system: Any = None
    tower: Any = None
    ses: tuple | None = None          # (phi, psi)
    simplicial: dict = field(default_factory=dict)  # element -> (K, L) when given simplicially
    raw: dict = field(default_factory=dict)

    def resolution(self, override: str | None = None) -> InjectiveResolution:
        spec = override if override is not None else self.coefficients
        if spec is None:
            raise InstanceError("coefficients: missing (give them in the file or with --coefficients)")
        if isinstance(spec, list):
            return build_resolution(FgAbGroup.from_factors(spec))
        try:
            return parse_coefficients(str(spec))
        except ValueError as e:
            raise InstanceError(f"coefficients: {e}") from None


# ---------------------------------------------------------------------------
# parsing helpers


def _num(x, where: str):
    if isinstance(x, bool):
        raise InstanceError(f"{where}: booleans are not numbers")
    if isinstance(x, int):
        return x
    if isinstance(x, str):
        try:
            f = Fraction(x)
        except (ValueError, ZeroDivisionError):
            raise InstanceError(f"{where}: cannot parse number {x!r}") from None
        return int(f) if f.denominator == 1 else f
    raise InstanceError(f"{where}: expected an integer or \"p/q\" string, got {x!r}")


def _matrix(rows, where: str, shape: tuple[int, int] | None = None) -> Mat:
    if not isinstance(rows, list) or not all(isinstance(r, list) for r in rows):
        raise InstanceError(f"{where}: a matrix must be a list of rows")
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise InstanceError(f"{where}: rows have different lengths")
    ncols = widths.pop() if widths else (shape[1] if shape else 0)
    if shape is not None and len(rows) == 0 and shape[0] == 0:
        ncols = shape[1]
    m = Mat([[_num(x, f"{where}[{i}][{j}]") for j, x in enumerate(r)] for i, r in enumerate(rows)],
            len(rows), ncols)
    if shape is not None and m.shape != shape and not (m.nrows == 0 and shape[0] == 0):
        raise InstanceError(f"{where}: shape {m.shape}, expected {shape}")
    if shape is not None and m.nrows == 0:
        m = Mat.zeros(*shape)
    return m


def _int_matrix(rows, where: str, shape=None) -> Mat:
    m = _matrix(rows, where, shape)
    if not m.is_integral():
        raise InstanceError(f"{where}: entries must be integers")
    return m.to_int()


def _factors(x, where: str) -> list[int]:
    if isinstance(x, str):
        from .fgab import parse_factors
        try:
            return list(parse_factors(x))
        except ValueError as e:
            raise InstanceError(f"{where}: {e}") from None
    if not isinstance(x, list) or not all(isinstance(d, int) and not isinstance(d, bool) and d >= 0
                                          for d in x):
        raise InstanceError(f"{where}: expected a list of nonnegative invariant factors")
    return list(x)


def _complex(obj, where: str):
    if not isinstance(obj, dict):
        raise InstanceError(f"{where}: expected an object")
    if "simplicial" in obj:
        sd = obj["simplicial"]
        try:
            K = SimplicialComplex(sd["facets"])
            L = SimplicialComplex(sd["subcomplex"]) if sd.get("subcomplex") else None
        except (KeyError, TypeError) as e:
            raise InstanceError(f"{where}.simplicial: malformed ({e})") from None
        if L is not None and not L.is_subcomplex_of(K):
            raise InstanceError(f"{where}.simplicial.subcomplex: not a subcomplex of the facets")
        return cochain_complex(K, L), (K, L)
    try:
        ranks = obj["ranks"]
    except KeyError:
        raise InstanceError(f"{where}: missing 'ranks'") from None
    if not isinstance(ranks, list) or not all(isinstance(r, int) and r >= 0 for r in ranks):
        raise InstanceError(f"{where}.ranks: expected a list of nonnegative integers")
    diffs = obj.get("differentials", [])
    if not isinstance(diffs, list) or len(diffs) != max(len(ranks) - 1, 0):
        raise InstanceError(f"{where}.differentials: expected {max(len(ranks) - 1, 0)} matrices")
    mats = [_int_matrix(d, f"{where}.differentials[{n}] (degree {n})", (ranks[n + 1], ranks[n]))
            for n, d in enumerate(diffs)]
    try:
        return CochainComplex(tuple(ranks), tuple(mats)), None
    except (DimensionMismatch, ValueError) as e:
        raise InstanceError(f"{where}: {e}") from None


def _element_lookup(elements: list) -> dict:
    out = {}
    for e in elements:
        out[str(e)] = e
    return out


def parse_instance(data: dict) -> Instance:
    if not isinstance(data, dict):
        raise InstanceError("<root>: expected a JSON object")
    if "version" not in data:
        raise InstanceError("version: missing (mandatory)")
    if data["version"] != FORMAT_VERSION:
        raise InstanceError(f"version: unsupported format version {data['version']!r}")
    inst = Instance(raw=data)
    if "coefficients" in data:
        c = data["coefficients"]
        if isinstance(c, str) and "Q" in c:
            inst.coefficients = c
        else:
            inst.coefficients = _factors(c, "coefficients")
    if "complex" in data:
        C, simp = _complex(data["complex"], "complex")
        inst.system = DirectSystem(FinitePoset([0]), {0: C})
        if simp:
            inst.simplicial[0] = simp
    elif "poset" in data:
        inst.system = _parse_system(data, inst)
    if "group_system" in data:
        inst.group_system = _parse_group_system(data["group_system"])
    if "tower" in data:
        inst.tower = _parse_tower(data["tower"])
    if "ses" in data:
        inst.ses = _parse_ses(data["ses"])
    return inst


def _parse_poset(obj, where: str) -> FinitePoset:
    if not isinstance(obj, dict) or "elements" not in obj:
        raise InstanceError(f"{where}: expected {{'elements': [...], 'relations': [...]}}")
    elements = obj["elements"]
    if not isinstance(elements, list) or not all(isinstance(e, (int, str)) for e in elements):
        raise InstanceError(f"{where}.elements: expected a list of names")
    lookup = _element_lookup(elements)
    rels = []
    for i, pair in enumerate(obj.get("relations", obj.get("covers", []))):
        if not isinstance(pair, list) or len(pair) != 2 or str(pair[0]) not in lookup or str(pair[1]) not in lookup:
            raise InstanceError(f"{where}.relations[{i}]: unknown or malformed pair {pair!r}")
        rels.append((lookup[str(pair[0])], lookup[str(pair[1])]))
    try:
        return FinitePoset(elements, rels)
    except ValueError as e:
        raise InstanceError(f"{where}: {e}") from None


def _parse_system(data: dict, inst: Instance) -> DirectSystem:
    P = _parse_poset(data["poset"], "poset")
    lookup = _element_lookup(list(P.elements))
    cx = data.get("complexes")
    if not isinstance(cx, dict):
        raise InstanceError("complexes: expected an object keyed by element")
    complexes = {}
    for key, obj in cx.items():
        if key not in lookup:
            raise InstanceError(f"complexes.{key}: not a poset element")
        C, simp = _complex(obj, f"complexes.{key}")
        complexes[lookup[key]] = C
        if simp:
            inst.simplicial[lookup[key]] = simp
    for e in P.elements:
        if e not in complexes:
            raise InstanceError(f"complexes.{e}: missing")
    bond = {}
    for i, b in enumerate(data.get("bondings", [])):
        where = f"bondings[{i}]"
        if not isinstance(b, dict) or str(b.get("from")) not in lookup or str(b.get("to")) not in lookup:
            raise InstanceError(f"{where}: 'from'/'to' must name poset elements")
        a, c = lookup[str(b["from"])], lookup[str(b["to"])]
        if not P.le(a, c):
            raise InstanceError(f"{where}: {a!r} is not below {c!r}")
        src, tgt = complexes[a], complexes[c]
        if "vertex_map" in b:
            if a not in inst.simplicial or c not in inst.simplicial:
                raise InstanceError(f"{where}: vertex maps need simplicial complexes at both ends")
            (Ka, La), (Kc, Lc) = inst.simplicial[a], inst.simplicial[c]
            vk = {str(v): v for v in Kc.vertices}
            vt = {str(v): v for v in Ka.vertices}
            try:
                vmap = {vk[str(k)]: vt[str(v)] for k, v in b["vertex_map"].items()}
                f = cochain_map(vmap, Kc, Ka, Lc, La)
            except KeyError as e:
                raise InstanceError(f"{where}.vertex_map: unknown vertex {e}") from None
            except NonSimplicialMap as e:
                raise InstanceError(f"{where}.vertex_map: {e}") from None
            maps = f.maps
        else:
            raw = b.get("maps")
            N = max(len(src.ranks), len(tgt.ranks))
            if not isinstance(raw, list) or len(raw) != N:
                raise InstanceError(f"{where}.maps: expected {N} matrices")
            maps = tuple(_int_matrix(m, f"{where}.maps[{n}] (degree {n})", (tgt.rank(n), src.rank(n)))
                         for n, m in enumerate(raw))
        try:
            bond[(a, c)] = CochainMap(src, tgt, tuple(maps))
        except ValueError as e:
            raise InstanceError(f"{where}: {e}") from None
    return DirectSystem(P, complexes, bond)


def _parse_group_system(obj):
    from .limits import GroupSystem
    P = _parse_poset(obj.get("poset"), "group_system.poset")
    lookup = _element_lookup(list(P.elements))
    groups = {}
    for key, f in obj.get("groups", {}).items():
        if key not in lookup:
            raise InstanceError(f"group_system.groups.{key}: not a poset element")
        groups[lookup[key]] = FgAbGroup.from_factors(_factors(f, f"group_system.groups.{key}"))
    for e in P.elements:
        if e not in groups:
            raise InstanceError(f"group_system.groups.{e}: missing")
    maps = {}
    for i, m in enumerate(obj.get("maps", [])):
        where = f"group_system.maps[{i}]"
        a, b = lookup.get(str(m.get("from"))), lookup.get(str(m.get("to")))
        if a is None or b is None or not P.le(a, b):
            raise InstanceError(f"{where}: needs 'from' <= 'to' (the map goes from 'to' down to 'from')")
        M = _int_matrix(m.get("matrix"), f"{where}.matrix", (groups[a].ngens, groups[b].ngens))
        try:
            maps[(a, b)] = FgMorphism(groups[b], groups[a], M)
        except ValueError as e:
            raise InstanceError(f"{where}: {e}") from None
    if obj.get("constant") and not maps:
        maps = {(a, b): groups[a].identity() for a, b in P.covers()}
    return GroupSystem(P, groups, maps)


def _parse_tower(obj):
    from .limits import PeriodicTower
    A = FgAbGroup.from_factors(_factors(obj.get("group"), "tower.group"))
    M = _int_matrix(obj.get("map"), "tower.map", (A.ngens, A.ngens))
    try:
        return PeriodicTower(FgMorphism(A, A, M))
    except ValueError as e:
        raise InstanceError(f"tower.map: {e}") from None


def _parse_ses(obj):
    try:
        g, g1, g2 = (FgAbGroup.from_factors(_factors(x, f"ses.groups[{i}]"))
                     for i, x in enumerate(obj["groups"]))
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, InstanceError):
            raise
        raise InstanceError("ses.groups: expected three invariant-factor lists") from None
    phi = _int_matrix(obj.get("phi"), "ses.phi", (g1.ngens, g.ngens))
    psi = _int_matrix(obj.get("psi"), "ses.psi", (g2.ngens, g1.ngens))
    try:
        return FgMorphism(g, g1, phi), FgMorphism(g1, g2, psi)
    except ValueError as e:
        raise InstanceError(f"ses: {e}") from None


def load_instance(path: str) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as e:
        raise InstanceError(f"<file>: invalid JSON at line {e.lineno} column {e.colno}") from None
    return parse_instance(data)


# ---------------------------------------------------------------------------
# serialization


def _ser_num(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return int(x)


def _ser_mat(m: Mat) -> list:
    return [[_ser_num(x) for x in r] for r in m.rows]


def _ser_complex(C: CochainComplex) -> dict:
    return {"ranks": list(C.ranks), "differentials": [_ser_mat(d) for d in C.diffs]}


def system_to_dict(S: DirectSystem) -> dict:
    P = S.poset
    rels = [[a, b] for a, b in P.covers()]
    bond = []
    for a, b in P.covers():
        f = S.bonding(a, b)
        N = max(len(f.source.ranks), len(f.target.ranks))
        bond.append({"from": a, "to": b, "maps": [_ser_mat(f.at(n)) for n in range(N)]})
    return {
        "poset": {"elements": list(P.elements), "relations": rels},
        "complexes": {str(x): _ser_complex(S.complexes[x]) for x in P.elements},
        "bondings": bond,
    }


def _ser_factors(G: FgAbGroup) -> list[int]:
    return list(G.invariant_factors)


def serialize_instance(inst: Instance) -> dict:
    """Canonical dictionary: simplicial data expanded to cochain matrices, covers only."""
    out: dict = {"version": inst.version}
    if inst.coefficients is not None:
        out["coefficients"] = inst.coefficients
    if inst.system is not None:
        out.update(system_to_dict(inst.system))
    if inst.group_system is not None:
        gs = inst.group_system
        P = gs.poset
        out["group_system"] = {
            "poset": {"elements": list(P.elements), "relations": [[a, b] for a, b in P.covers()]},
            "groups": {str(x): _ser_factors(gs.groups[x]) for x in P.elements},
            "maps": [{"from": a, "to": b, "matrix": _ser_mat(gs.bonding(a, b).matrix)}
                     for a, b in P.covers()],
        }
    if inst.tower is not None:
        out["tower"] = {"group": _ser_factors(inst.tower.A), "map": _ser_mat(inst.tower.f.matrix)}
    if inst.ses is not None:
        phi, psi = inst.ses
        out["ses"] = {"groups": [_ser_factors(phi.source), _ser_factors(phi.target),
                                 _ser_factors(psi.target)],
                      "phi": _ser_mat(phi.matrix), "psi": _ser_mat(psi.matrix)}
    return out


def dump_instance(inst: Instance) -> str:
    return json.dumps(serialize_instance(inst), sort_keys=True, indent=1)


def digest(obj: Any) -> str:
    """Short sha256 of the canonical JSON rendering."""
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def coefficient_label(R: InjectiveResolution) -> str:
    return R.label()
