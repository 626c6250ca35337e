"""JSON schemas for every value the CLI reads or writes.

Rationals serialize as strings "p/q" ("p" when integral) to avoid lossy
numeric JSON.  Matrices are arrays of row arrays of such strings; shape
context always comes from the surrounding object, so empty matrices are
unambiguous.  Serialization is deterministic: keys are sorted and the
formatting is fixed, so equal values produce identical bytes.

Schemas:

  filtered space   {"dim": d, "steps": {"<weight>": [[...rows...]]}}
  nilpotent op     {"space": <filtered space>, "matrix": [[...]]}
  centered filt.   {"center": k, "dim": d, "steps": {...}}
  dual graph       {"vertices": v, "edges": [[i, j], ...], "self": [s_0...]}
  gen profile      {"seed": u64, "max_dim": n, "range": [a, b],
                    "weight_spread": w, "break": <tag or null>}
  CS instance      {"range": [kmin, kmax], "A": {"<k>": <fs>, ...}, "B": ...,
                    "C": ..., "P": ..., "N": {"<k>": [[...]]},
                    "col": {"b": ..., "a": ..., "c": ...},
                    "row": {"r": ..., "s": ...}, "purity": 0,
                    "profile": "geometric"?}          (profile key optional)
"""

from __future__ import annotations

import json
from typing import Dict, Optional

from .degenerations import DualGraph
from .filtration import (
    ExactnessVerdict,
    FilteredSpace,
    StrictnessVerdict,
)
from .generators import GenProfile
from .linalg import Matrix, Q, Subspace, canonicalize, qstr
from .monodromy import CenteredFiltration, NilpotentOp
from .verifier import CSInstance, HypothesisReport, VerdictReport


class SerializationError(ValueError):
    """Input JSON does not match the documented schema."""


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def q_from_str(s) -> object:
    if isinstance(s, int):
        return Q(s)
    if not isinstance(s, str):
        raise SerializationError(f"rational entries must be strings, got {type(s).__name__}")
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            return Q(int(num), int(den))
        return Q(int(s))
    except (ValueError, ZeroDivisionError) as exc:
        raise SerializationError(f"cannot parse rational {s!r}") from exc


def matrix_to_json(m: Matrix) -> list:
    return [[qstr(x) for x in row] for row in m.rows]


def matrix_from_json(data, nrows: int, ncols: int) -> Matrix:
    if not isinstance(data, list):
        raise SerializationError("matrix must be an array of rows")
    if len(data) != nrows:
        raise SerializationError(f"matrix has {len(data)} rows, expected {nrows}")
    rows = []
    for row in data:
        if not isinstance(row, list) or len(row) != ncols:
            raise SerializationError(f"matrix row of length {len(row)}, expected {ncols}")
        rows.append([q_from_str(x) for x in row])
    return Matrix.from_rows(rows, ncols=ncols)


def _subspace_to_json(s: Subspace) -> list:
    return matrix_to_json(s.basis)


def _subspace_from_json(data, ambient_dim: int) -> Subspace:
    if not isinstance(data, list):
        raise SerializationError("subspace must be an array of basis rows")
    rows = []
    for row in data:
        if not isinstance(row, list) or len(row) != ambient_dim:
            raise SerializationError("subspace basis row has wrong length")
        rows.append([q_from_str(x) for x in row])
    return canonicalize(Matrix.from_rows(rows, ncols=ambient_dim))


def filtered_space_to_json(v: FilteredSpace) -> dict:
    return {"dim": v.dim,
            "steps": {str(w): _subspace_to_json(sub) for w, sub in v.steps}}


def filtered_space_from_json(data) -> FilteredSpace:
    try:
        dim = int(data["dim"])
        steps = {int(w): _subspace_from_json(rows, dim) for w, rows in data.get("steps", {}).items()}
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise SerializationError(f"bad filtered space: {exc}") from exc
    return FilteredSpace(dim, steps)


def nilpotent_to_json(op: NilpotentOp) -> dict:
    return {"space": filtered_space_to_json(op.space), "matrix": matrix_to_json(op.matrix)}


def nilpotent_from_json(data) -> NilpotentOp:
    try:
        space = filtered_space_from_json(data["space"])
        matrix = matrix_from_json(data["matrix"], space.dim, space.dim)
    except (KeyError, TypeError) as exc:
        raise SerializationError(f"bad nilpotent operator: {exc}") from exc
    return NilpotentOp(space, matrix)


def centered_filtration_to_json(cf: CenteredFiltration) -> dict:
    out = filtered_space_to_json(cf.filtration)
    out["center"] = cf.center
    return out


def centered_filtration_from_json(data) -> CenteredFiltration:
    try:
        center = int(data["center"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SerializationError("centered filtration needs an integer center") from exc
    return CenteredFiltration(center, filtered_space_from_json(data))


def graph_to_json(g: DualGraph) -> dict:
    return {"vertices": g.vertices,
            "edges": [[i, j] for i, j in g.edges],
            "self": list(g.self_intersections)}


def graph_from_json(data) -> DualGraph:
    try:
        return DualGraph.make(int(data["vertices"]), data.get("edges", []), data.get("self"))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SerializationError):
            raise
        raise SerializationError(f"bad dual graph: {exc}") from exc


def profile_to_json(p: GenProfile) -> dict:
    return {"seed": p.seed, "max_dim": p.max_dim_per_node,
            "range": list(p.degree_range), "weight_spread": p.weight_spread,
            "break": p.broken_hypothesis}


def profile_from_json(data) -> GenProfile:
    try:
        return GenProfile(seed=int(data["seed"]),
                          max_dim_per_node=int(data.get("max_dim", 6)),
                          degree_range=tuple(int(x) for x in data.get("range", (0, 4))),
                          weight_spread=int(data.get("weight_spread", 3)),
                          broken_hypothesis=data.get("break"))
    except (KeyError, TypeError, ValueError) as exc:
        raise SerializationError(f"bad generation profile: {exc}") from exc


def _family_to_json(family: Dict[int, FilteredSpace]) -> dict:
    return {str(k): filtered_space_to_json(v) for k, v in family.items()}


def _maps_to_json(maps: Dict[int, Matrix]) -> dict:
    return {str(k): matrix_to_json(m) for k, m in maps.items()}


def instance_to_json(inst: CSInstance) -> dict:
    out = {
        "range": [inst.k_min, inst.k_max],
        "A": _family_to_json(inst.A),
        "B": _family_to_json(inst.B),
        "C": _family_to_json(inst.C),
        "P": _family_to_json(inst.P),
        "N": _maps_to_json(inst.N),
        "col": {"b": _maps_to_json(inst.col_b), "a": _maps_to_json(inst.col_a),
                "c": _maps_to_json(inst.col_c)},
        "row": {"r": _maps_to_json(inst.row_r), "s": _maps_to_json(inst.row_s)},
        "purity": inst.purity_weight,
    }
    if inst.profile != "abstract":
        out["profile"] = inst.profile
    return out


def instance_from_json(data) -> CSInstance:
    if not isinstance(data, dict):
        raise SerializationError("instance must be a JSON object")
    try:
        k_min, k_max = (int(x) for x in data["range"])
    except (KeyError, TypeError, ValueError) as exc:
        raise SerializationError("instance needs an integer pair under 'range'") from exc

    def family(key) -> Dict[int, FilteredSpace]:
        raw = data.get(key, {})
        if not isinstance(raw, dict):
            raise SerializationError(f"family {key!r} must be an object")
        return {int(k): filtered_space_from_json(v) for k, v in raw.items()}

    try:
        fam_a, fam_b, fam_c, fam_p = family("A"), family("B"), family("C"), family("P")
    except ValueError as exc:
        raise SerializationError(f"bad family key: {exc}") from exc

    def zdim(fam, k):
        return fam[k].dim if k in fam else 0

    def maps(raw, shape) -> Dict[int, Matrix]:
        if not isinstance(raw, dict):
            raise SerializationError("map family must be an object")
        out = {}
        for key, val in raw.items():
            k = int(key)
            nrows, ncols = shape(k)
            out[k] = matrix_from_json(val, nrows, ncols)
        return out

    col = data.get("col", {})
    row = data.get("row", {})
    try:
        n_maps = maps(data.get("N", {}), lambda k: (zdim(fam_p, k), zdim(fam_p, k)))
        b_maps = maps(col.get("b", {}), lambda k: (zdim(fam_a, k), zdim(fam_b, k)))
        a_maps = maps(col.get("a", {}), lambda k: (zdim(fam_c, k), zdim(fam_a, k)))
        c_maps = maps(col.get("c", {}), lambda k: (zdim(fam_b, k + 1), zdim(fam_c, k)))
        r_maps = maps(row.get("r", {}), lambda k: (zdim(fam_c, k), zdim(fam_p, k - 1)))
        s_maps = maps(row.get("s", {}), lambda k: (zdim(fam_p, k), zdim(fam_c, k)))
    except ValueError as exc:
        if isinstance(exc, SerializationError):
            raise
        raise SerializationError(f"bad map key: {exc}") from exc

    profile = data.get("profile", "abstract")
    if not isinstance(profile, str):
        raise SerializationError("profile must be a string")
    return CSInstance((k_min, k_max), fam_a, fam_b, fam_c, fam_p, n_maps,
                      b_maps, a_maps, c_maps, r_maps, s_maps,
                      purity_weight=int(data.get("purity", 0)), profile=profile)


def _witness_json(witness: Optional[tuple]):
    return None if witness is None else [qstr(x) for x in witness]


def exactness_verdict_to_json(v: ExactnessVerdict) -> dict:
    out = {"exact": v.exact}
    if not v.exact:
        out["reason"] = v.reason
        out["witness"] = _witness_json(v.witness)
    return out


def strictness_verdict_to_json(v: StrictnessVerdict) -> dict:
    out = {"strict": v.strict}
    if not v.strict:
        if v.failing_weight is not None:
            out["failing_weight"] = v.failing_weight
        if v.reason is not None:
            out["reason"] = v.reason
    return out


def hypothesis_report_to_json(report: HypothesisReport) -> dict:
    def keyed(d, render):
        out: Dict[str, dict] = {}
        for key, verdict in sorted(d.items()):
            k, node = key
            out.setdefault(str(k), {})[node] = render(verdict)
        return out

    strict = {}
    for (label, k), verdict in sorted(report.strictness.items()):
        strict.setdefault(label, {})[str(k)] = strictness_verdict_to_json(verdict)
    return {
        "clean": report.clean,
        "column": keyed(report.column, exactness_verdict_to_json),
        "row": keyed(report.row, exactness_verdict_to_json),
        "bounds": {
            "A": {str(k): ok for k, ok in sorted(report.bounds_a.items())},
            "B": {str(k): ok for k, ok in sorted(report.bounds_b.items())},
            "P_centering": {str(k): ok for k, ok in sorted(report.centering_p.items())},
        },
        "strictness": strict,
    }


def verdict_report_to_json(v: VerdictReport) -> dict:
    out = {"proposition": v.proposition, "k": v.degree, "exact": v.exact,
           "weights_used": list(v.weights_used)}
    if v.witness is not None:
        out["witness"] = _witness_json(v.witness)
    return out
