"""Batch command line interface: one JSON job in, one JSON/CSV document out.

Exit codes: 0 computed (including negative verdicts like NoneFound),
2 input validation failure, 3 numerical failure, 4 internal error.
Diagnostics go to stderr only; the output stream carries exactly one
document.  Complex numbers are [re, im] pairs; polynomial documents carry
the Vieta-signed z vector and an explicit convention tag.
"""

from __future__ import annotations

import argparse
import json
import sys

import jsonschema
import numpy as np

from .errors import (
    DegenerateMap,
    DimensionMismatch,
    NoRootInRegion,
    NonConvergence,
    NonRealInput,
    NotInImage,
)
from .polynomials import Poly, cluster_roots, find_roots, vieta_from_roots
from .regions import HalfPlane, Moebius, moebius_transform_poly
from .slices import (
    CompressOptions,
    Slice,
    compactness_bounds,
    compress,
    sample_slice_section,
)
from .stability import hurwitz_embed, hurwitz_unembed, is_stable, is_weakly_hurwitz
from .symmetric import (
    FoundPoint,
    SufficientForm,
    SymmetricPoly,
    coincide,
    coordinate_profile,
    eval_symmetric,
    gws_solve,
    halfdeg_optimize,
    variety_search,
    young_gws,
)

_COMPLEX = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_SCALAR = {"oneOf": [{"type": "number"}, _COMPLEX]}
_POLY = {
    "type": "object",
    "properties": {
        "z": {"type": "array", "items": _COMPLEX, "minItems": 1},
        "convention": {"const": "vieta-alternating"},
    },
    "required": ["z"],
    "additionalProperties": False,
}
_HALFPLANE = {
    "type": "object",
    "properties": {
        "theta": {"type": "number"},
        "base": _COMPLEX,
        "name": {"enum": ["upper", "left"]},
    },
    "additionalProperties": False,
}
_SLICE = {
    "type": "object",
    "properties": {
        "matrix": {"type": "array", "items": {"type": "array", "items": _SCALAR}},
        "target": {"type": "array", "items": _SCALAR},
        "field": {"enum": ["complex", "real"]},
    },
    "required": ["matrix", "target"],
    "additionalProperties": False,
}
_TERMS = {
    "type": "array",
    "items": {
        "type": "object",
        "properties": {
            "exponents": {"type": "array", "items": {"type": "integer", "minimum": 0}},
            "coefficient": _SCALAR,
        },
        "required": ["exponents", "coefficient"],
        "additionalProperties": False,
    },
}
_SYMPOLY = {
    "type": "object",
    "properties": {
        "n": {"type": "integer", "minimum": 1},
        "degree": {"type": "integer", "minimum": 0},
        "terms": _TERMS,
    },
    "required": ["n", "degree", "terms"],
    "additionalProperties": False,
}
_REAL_COEFFS = {"type": "array", "items": {"type": "number"}, "minItems": 1}

_PAYLOADS = {
    "roots": {
        "type": "object",
        "properties": {"poly": _POLY},
        "required": ["poly"],
        "additionalProperties": False,
    },
    "vieta": {
        "type": "object",
        "properties": {"roots": {"type": "array", "items": _COMPLEX, "minItems": 1}},
        "required": ["roots"],
        "additionalProperties": False,
    },
    "stable-check": {
        "type": "object",
        "properties": {"poly": _POLY, "halfplane": _HALFPLANE},
        "required": ["poly"],
        "additionalProperties": False,
    },
    "hurwitz-check": {
        "type": "object",
        "properties": {"coefficients": _REAL_COEFFS},
        "required": ["coefficients"],
        "additionalProperties": False,
    },
    "embed": {
        "type": "object",
        "properties": {"coefficients": _REAL_COEFFS},
        "required": ["coefficients"],
        "additionalProperties": False,
    },
    "unembed": {
        "type": "object",
        "properties": {"poly": _POLY},
        "required": ["poly"],
        "additionalProperties": False,
    },
    "bounds": {
        "type": "object",
        "properties": {
            "a1": _SCALAR,
            "a2": _SCALAR,
            "n": {"type": "integer", "minimum": 2},
        },
        "required": ["a1", "a2", "n"],
        "additionalProperties": False,
    },
    "compress": {
        "type": "object",
        "properties": {
            "poly": _POLY,
            "slice": _SLICE,
            "halfplane": _HALFPLANE,
            "options": {
                "type": "object",
                "properties": {
                    "max_steps": {"type": "integer", "minimum": 1},
                    "step_cap": {"type": "number", "exclusiveMinimum": 0},
                },
                "additionalProperties": False,
            },
        },
        "required": ["poly", "slice"],
        "additionalProperties": False,
    },
    "gws": {
        "type": "object",
        "properties": {
            "f": _SYMPOLY,
            "x": {"type": "array", "items": _COMPLEX, "minItems": 1},
            "halfplane": _HALFPLANE,
        },
        "required": ["f", "x"],
        "additionalProperties": False,
    },
    "coincide": {
        "type": "object",
        "properties": {
            "form": {
                "type": "object",
                "properties": {
                    "matrix": {"type": "array", "items": {"type": "array", "items": _SCALAR}},
                    "gk": _TERMS,
                },
                "required": ["matrix", "gk"],
                "additionalProperties": False,
            },
            "x": {"type": "array", "items": _COMPLEX, "minItems": 1},
            "halfplane": _HALFPLANE,
        },
        "required": ["form", "x"],
        "additionalProperties": False,
    },
    "young-gws": {
        "type": "object",
        "properties": {
            "blocks": {"type": "array", "items": {"type": "integer", "minimum": 1},
                       "minItems": 1},
            "f": _SYMPOLY,
            "block_terms": {
                "type": "array",
                "items": {
                    "type": "object",
                    "properties": {
                        "weights": {"type": "array",
                                    "items": {"type": "integer", "minimum": 0}},
                        "coefficient": _SCALAR,
                    },
                    "required": ["weights", "coefficient"],
                    "additionalProperties": False,
                },
            },
            "x": {"type": "array", "items": _COMPLEX, "minItems": 1},
            "halfplane": _HALFPLANE,
        },
        "required": ["blocks", "x"],
        "additionalProperties": False,
    },
    "variety-search": {
        "type": "object",
        "properties": {
            "polys": {"type": "array", "items": _SYMPOLY, "minItems": 1},
            "halfplane": _HALFPLANE,
            "pattern": {"oneOf": [
                {"type": "integer", "minimum": 1},
                {"type": "array", "items": {"type": "integer", "minimum": 0},
                 "minItems": 2, "maxItems": 2},
            ]},
            "budget": {"type": "integer", "minimum": 1},
            "box": {"type": "array", "items": {"type": "number"},
                    "minItems": 3, "maxItems": 3},
        },
        "required": ["polys"],
        "additionalProperties": False,
    },
    "halfdeg-opt": {
        "type": "object",
        "properties": {
            "f": _SYMPOLY,
            "lambda": {"type": "number"},
            "mu": {"type": "number"},
            "budget": {"type": "integer", "minimum": 1},
            "box": {"type": "array", "items": {"type": "number"},
                    "minItems": 3, "maxItems": 3},
        },
        "required": ["f", "lambda", "mu"],
        "additionalProperties": False,
    },
    "slice-sample": {
        "type": "object",
        "properties": {
            "slice": _SLICE,
            "halfplane": _HALFPLANE,
            "free_axes": {"type": "array", "items": {"type": "integer", "minimum": 0},
                          "minItems": 2, "maxItems": 2},
            "window": {"type": "array", "items": {"type": "number"},
                       "minItems": 4, "maxItems": 4},
            "resolution": {"type": "array", "items": {"type": "integer", "minimum": 1},
                           "minItems": 2, "maxItems": 2},
            "format": {"enum": ["csv", "json"]},
        },
        "required": ["slice", "free_axes", "window", "resolution"],
        "additionalProperties": False,
    },
    "moebius": {
        "type": "object",
        "properties": {
            "map": {
                "type": "object",
                "properties": {"a": _SCALAR, "b": _SCALAR, "c": _SCALAR, "d": _SCALAR},
                "required": ["a", "b", "c", "d"],
                "additionalProperties": False,
            },
            "poly": _POLY,
        },
        "required": ["map", "poly"],
        "additionalProperties": False,
    },
}

_JOB_SCHEMA = {
    "type": "object",
    "properties": {
        "command": {"enum": sorted(_PAYLOADS)},
        "payload": {"type": "object"},
        "tolerances": {
            "type": "object",
            "properties": {
                "boundary": {"type": "number", "exclusiveMinimum": 0},
                "cluster": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "seed": {"type": "integer", "minimum": 0},
    },
    "required": ["command", "payload"],
    "additionalProperties": False,
}


def _c(value) -> complex:
    if isinstance(value, (int, float)):
        return complex(value)
    return complex(value[0], value[1])


def _pair(value: complex) -> list[float]:
    z = complex(value)
    return [float(z.real), float(z.imag)]


def _poly_doc(p: Poly) -> dict:
    return {"convention": "vieta-alternating", "z": [_pair(v) for v in p.z]}


def _parse_poly(doc) -> Poly:
    return Poly(tuple(_c(v) for v in doc["z"]))


def _parse_halfplane(doc) -> HalfPlane:
    if doc is None:
        return HalfPlane.upper()
    if "name" in doc:
        return HalfPlane.left() if doc["name"] == "left" else HalfPlane.upper()
    theta = float(doc.get("theta", 0.0))
    base = _c(doc.get("base", [0.0, 0.0]))
    return HalfPlane(theta=theta, base=base)


def _parse_slice(doc) -> Slice:
    matrix = [[_c(v) for v in row] for row in doc["matrix"]]
    target = [_c(v) for v in doc["target"]]
    if len(matrix) != len(target):
        raise DimensionMismatch("matrix rows and target length differ")
    width = len(matrix[0]) if matrix else 0
    return Slice.from_arrays(np.asarray(matrix, dtype=complex).reshape(len(target), width),
                             target, field=doc.get("field", "complex"))


def _parse_sympoly(doc) -> SymmetricPoly:
    terms = {tuple(t["exponents"]): _c(t["coefficient"]) for t in doc["terms"]}
    return SymmetricPoly.from_terms(doc["n"], terms, doc["degree"])


def _profile_doc(profile) -> dict:
    return {
        "interior_total": profile.interior_total,
        "boundary_distinct": profile.boundary_distinct,
        "outside_total": profile.outside_total,
        "clusters": [
            {
                "center": _pair(cl.center),
                "multiplicity": cl.multiplicity,
                "side": cl.side,
                "signed_distance": float(cl.signed_distance),
            }
            for cl in profile.clusters
        ],
    }


def _report_doc(report) -> dict:
    return {
        "initial_profile": _profile_doc(report.initial_profile),
        "final_profile": _profile_doc(report.final_profile),
        "final_z": _poly_doc(report.final_z),
        "iterations": report.iterations,
        "rank": report.rank,
        "sharpened": report.sharpened,
        "targets": list(report.targets),
        "cap_reached": report.cap_reached,
        "stalled": report.stalled,
        "checkpoints": [list(m) for m in report.checkpoints],
        "origin_boundary_clusters": report.origin_boundary_clusters,
        "steps": [
            {
                "mode": st.mode,
                "direction": [_pair(v) for v in st.direction],
                "step_size": float(st.step_size),
                "event": st.event,
                "measure_after": list(st.measure_after),
                "membership_residual": float(st.membership_residual),
                "stable": bool(st.stable),
            }
            for st in report.steps
        ],
    }


def emit_section_csv(grid, stream) -> None:
    """Write the membership grid as x,y,member rows, 9 significant digits."""

    def fmt(v: float) -> str:
        text = f"{v:.9g}"
        if "." not in text and "e" not in text and "inf" not in text:
            text += ".0"
        return text

    stream.write("x,y,member\n")
    for i, y in enumerate(grid.ys):
        for j, x in enumerate(grid.xs):
            stream.write(f"{fmt(x)},{fmt(y)},{1 if grid.members[i][j] else 0}\n")


def _run_command(command: str, payload: dict, tolerances: dict, seed: int,
                 max_iters: int | None, out_stream) -> dict | None:
    boundary = tolerances.get("boundary")
    cluster = tolerances.get("cluster")

    if command == "roots":
        p = _parse_poly(payload["poly"])
        roots = find_roots(p)
        return {"roots": [_pair(r) for r in roots]}

    if command == "vieta":
        roots = tuple(_c(v) for v in payload["roots"])
        return {"poly": _poly_doc(vieta_from_roots(roots))}

    if command == "stable-check":
        p = _parse_poly(payload["poly"])
        H = _parse_halfplane(payload.get("halfplane"))
        verdict = is_stable(p, H, cluster_radius=cluster, boundary_tol=boundary)
        return {
            "stable": verdict.stable,
            "strict": verdict.strict,
            "profile": _profile_doc(verdict.profile),
            "witness_roots": [_pair(r) for r in verdict.witness],
        }

    if command == "hurwitz-check":
        p = Poly.from_raw(tuple([1.0] + [complex(v) for v in payload["coefficients"]]))
        verdict = is_weakly_hurwitz(p, cluster_radius=cluster, boundary_tol=boundary)
        return {
            "stable": verdict.stable,
            "strict": verdict.strict,
            "profile": _profile_doc(verdict.profile),
            "witness_roots": [_pair(r) for r in verdict.witness],
        }

    if command == "embed":
        p = Poly.from_raw(tuple([1.0] + [complex(v) for v in payload["coefficients"]]))
        return {"poly": _poly_doc(hurwitz_embed(p))}

    if command == "unembed":
        p = hurwitz_unembed(_parse_poly(payload["poly"]))
        raw = p.raw_coefficients()
        return {"coefficients": [float(v.real) for v in raw[1:]]}

    if command == "bounds":
        result = compactness_bounds(_c(payload["a1"]), _c(payload["a2"]), payload["n"])
        if result is None:
            return {"empty": True}
        return {"empty": False, "im": [result.im_lo, result.im_hi],
                "re_sq_bound": result.re_sq_bound}

    if command == "compress":
        p = _parse_poly(payload["poly"])
        S = _parse_slice(payload["slice"])
        H = _parse_halfplane(payload.get("halfplane"))
        odoc = payload.get("options", {})
        opts = CompressOptions(
            max_steps=odoc.get("max_steps", max_iters),
            step_cap=odoc.get("step_cap", 1e9),
            functional_seed=seed,
            cluster_radius=cluster,
            boundary_tol=boundary,
        )
        return _report_doc(compress(p, S, H, opts))

    if command == "gws":
        f = _parse_sympoly(payload["f"])
        x = tuple(_c(v) for v in payload["x"])
        H = _parse_halfplane(payload.get("halfplane"))
        y = gws_solve(f, x, H)
        residual = abs(eval_symmetric(f, (y,) * f.n) - eval_symmetric(f, x))
        return {"y": _pair(y), "residual": float(residual)}

    if command == "coincide":
        fdoc = payload["form"]
        terms = {tuple(t["exponents"]): _c(t["coefficient"]) for t in fdoc["gk"]}
        matrix = [[_c(v) for v in row] for row in fdoc["matrix"]]
        form = SufficientForm.from_data(matrix, terms)
        x = tuple(_c(v) for v in payload["x"])
        H = _parse_halfplane(payload.get("halfplane"))
        x_tilde, report = coincide(form, x, H,
                                   CompressOptions(functional_seed=seed,
                                                   cluster_radius=cluster,
                                                   boundary_tol=boundary,
                                                   max_steps=max_iters))
        prof = coordinate_profile(x_tilde, H)
        return {
            "x_tilde": [_pair(v) for v in x_tilde],
            "value_in": _pair(eval_symmetric(form, x)),
            "value_out": _pair(eval_symmetric(form, x_tilde)),
            "profile": {"boundary_distinct": prof.boundary_distinct,
                        "interior_count": prof.interior_count},
            "report": _report_doc(report),
        }

    if command == "young-gws":
        blocks = tuple(payload["blocks"])
        x = tuple(_c(v) for v in payload["x"])
        H = _parse_halfplane(payload.get("halfplane"))
        if ("f" in payload) == ("block_terms" in payload):
            raise DimensionMismatch("provide exactly one of 'f' or 'block_terms'")
        if "f" in payload:
            f = _parse_sympoly(payload["f"])
        else:
            f = {tuple(t["weights"]): _c(t["coefficient"])
                 for t in payload["block_terms"]}
        ys = young_gws(blocks, f, x, H)
        return {"y": [_pair(v) for v in ys]}

    if command == "variety-search":
        polys = [_parse_sympoly(d) for d in payload["polys"]]
        H = _parse_halfplane(payload.get("halfplane"))
        pat = payload.get("pattern")
        if isinstance(pat, list):
            pat = (pat[0], pat[1])
        box = tuple(payload["box"]) if "box" in payload else None
        outcome = variety_search(polys, H, pattern=pat,
                                 budget=payload.get("budget", 200),
                                 seed=seed, box=box)
        if isinstance(outcome, FoundPoint):
            return {
                "found": True,
                "x": [_pair(v) for v in outcome.x],
                "residuals": [float(v) for v in outcome.residuals],
                "pattern": outcome.pattern,
                "starts_used": outcome.starts_used,
            }
        return {
            "found": False,
            "patterns_tried": outcome.patterns_tried,
            "starts": outcome.starts,
            "best_residual": float(outcome.best_residual),
            "best_x": None if outcome.best_x is None
            else [_pair(v) for v in outcome.best_x],
            "note": outcome.note,
        }

    if command == "halfdeg-opt":
        f = _parse_sympoly(payload["f"])
        box = tuple(payload["box"]) if "box" in payload else None
        result = halfdeg_optimize(f, payload["lambda"], payload["mu"],
                                  budget=payload.get("budget", 20), seed=seed, box=box)
        return {
            "k": result.k,
            "inf_full": None if result.full_unbounded else result.inf_full,
            "full_unbounded": result.full_unbounded,
            "witness_full": [_pair(v) for v in result.witness_full],
            "inf_restricted": None if result.restricted_unbounded else result.inf_restricted,
            "restricted_unbounded": result.restricted_unbounded,
            "witness_restricted": [_pair(v) for v in result.witness_restricted],
        }

    if command == "slice-sample":
        S = _parse_slice(payload["slice"])
        H = _parse_halfplane(payload.get("halfplane"))
        grid = sample_slice_section(S, H, tuple(payload["free_axes"]),
                                    tuple(payload["window"]),
                                    tuple(payload["resolution"]))
        if payload.get("format", "csv") == "csv":
            emit_section_csv(grid, out_stream)
            return None
        return {
            "xs": list(grid.xs),
            "ys": list(grid.ys),
            "members": [[1 if v else 0 for v in row] for row in grid.members],
        }

    if command == "moebius":
        mdoc = payload["map"]
        M = Moebius(a=_c(mdoc["a"]), b=_c(mdoc["b"]), c=_c(mdoc["c"]), d=_c(mdoc["d"]))
        image = moebius_transform_poly(M, _parse_poly(payload["poly"]))
        return {
            "coefficients": [_pair(v) for v in image.coefficients],
            "degree_drop": image.degree_drop,
        }

    raise ValueError(f"unhandled command {command}")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="stable-slices",
        description="batch operations on stable polynomial slices (JSON in, JSON/CSV out)")
    parser.add_argument("--job", help="job file (default: stdin)")
    parser.add_argument("--out", help="output file (default: stdout)")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--tol-boundary", type=float, default=None)
    parser.add_argument("--tol-cluster", type=float, default=None)
    parser.add_argument("--max-iters", type=int, default=None)
    args = parser.parse_args(argv)

    try:
        if args.job:
            with open(args.job, "r", encoding="utf-8") as fh:
                job = json.load(fh)
        else:
            job = json.load(sys.stdin)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: cannot read job: {exc}", file=sys.stderr)
        return 2

    try:
        jsonschema.validate(job, _JOB_SCHEMA)
        jsonschema.validate(job["payload"], _PAYLOADS[job["command"]])
    except jsonschema.ValidationError as exc:
        print(f"error: invalid job: {exc.message}", file=sys.stderr)
        return 2

    tolerances = dict(job.get("tolerances", {}))
    if args.tol_boundary is not None:
        tolerances["boundary"] = args.tol_boundary
    if args.tol_cluster is not None:
        tolerances["cluster"] = args.tol_cluster
    seed = args.seed if args.seed is not None else job.get("seed", 0)

    out_stream = None
    try:
        out_stream = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    except OSError as exc:
        print(f"error: cannot open output: {exc}", file=sys.stderr)
        return 4

    try:
        result = _run_command(job["command"], job["payload"], tolerances, seed,
                              args.max_iters, out_stream)
        if result is not None:
            result["tolerances"] = {
                "boundary": tolerances.get("boundary"),
                "cluster": tolerances.get("cluster"),
            }
            json.dump(result, out_stream, sort_keys=True)
            out_stream.write("\n")
        code = 0
    except (NonConvergence, NoRootInRegion) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        code = 3
    except (DimensionMismatch, NonRealInput, NotInImage, DegenerateMap,
            ValueError, KeyError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        code = 2
    except Exception as exc:  # invariant violations surface as exit 4
        print(f"error: internal: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = 4
    finally:
        try:
            if out_stream is not None:
                out_stream.flush()
                if args.out:
                    out_stream.close()
        except OSError:
            code = 4
    return code


if __name__ == "__main__":
    sys.exit(main())
