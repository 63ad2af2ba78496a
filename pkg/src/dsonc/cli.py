"""Command line front end.

Every subcommand prints one JSON object ``{"command", "verdict",
"witnesses", "diagnostics"}`` on stdout. Exit status: 0 for Member,
Boundary or success, 1 for NotMember, 2 for errors.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import cones, mms, structure
from .documents import SignomialDocument, load_circuit, load_points, read_json
from .errors import DocumentError, DsoncError, NoCertificate
from .geometry import (
    SignedSupport,
    SimplicialCircuit,
    SupportSet,
    classify_point_set,
    enumerate_minimal_circuits,
    format_rational,
    hull_vertices,
    make_point,
)
from .signomial import (
    AgeFunction,
    CircuitFunction,
    evaluate_many,
    evaluate_polynomial,
    sign_decomposition,
)

EXIT_OK, EXIT_NOT_MEMBER, EXIT_ERROR = 0, 1, 2
SUCCESS = "Success"


def _pt(p) -> list:
    return [format_rational(x) for x in p]


def _num(x):
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None


def _witness(w: cones.DsoncWitness) -> dict:
    out = {"inner": _pt(w.inner), "tau": [float(t) for t in w.tau]}
    if w.ell is not None:
        out["ell"] = w.ell
    if w.margin is not None:
        out["margin"] = w.margin
    return out


def _circuit_json(c) -> dict:
    return {"vertices": [_pt(v) for v in c.vertices], "inner": _pt(c.inner), "lambda": [format_rational(l) for l in c.lam]}


def _result(command, verdict, witnesses=(), **diagnostics) -> dict:
    v = verdict.value if isinstance(verdict, cones.Verdict) else verdict
    return {"command": command, "verdict": v, "witnesses": list(witnesses), "diagnostics": diagnostics}


def _as_circuit_function(doc: SignomialDocument) -> CircuitFunction:
    return CircuitFunction.from_signomial(doc.to_signomial())


# ---------------------------------------------------------------------------
# check


def _check_closed_form(cf: CircuitFunction, cone: str) -> dict:
    rep = cones.certify_circuit(cf)
    verdict = rep.in_sonc if cone == "sonc" else rep.in_dsonc
    return _result(
        "check",
        verdict,
        [_witness(w) for w in rep.witnesses] if cone == "dsonc" else [],
        route="circuit",
        cone=cone,
        circuit=_circuit_json(cf.circuit),
        theta=rep.theta,
        theta_check=rep.theta_check,
        in_sonc=rep.in_sonc.value,
        in_dsonc=rep.in_dsonc.value,
    )


def _check_signomial(doc: SignomialDocument, cone: str, split: cones.SplitPolicy) -> dict:
    f = doc.to_signomial()
    kind = classify_point_set(f.support.points) if len(f.support) else None
    if isinstance(kind, SimplicialCircuit) and all(f.coefficient(v) > 0 for v in kind.circuit.vertices):
        return _check_closed_form(CircuitFunction.from_signomial(f), cone)
    signed = sign_decomposition(f)
    if not signed.negative:
        return _result("check", cones.Verdict.MEMBER, route="nonnegative-terms", cone=cone)
    if len(signed.negative) == 1:
        g = AgeFunction.from_signomial(f)
        if cone == "dsonc":
            r = cones.is_dsonc_age(g)
            wit = [_witness(r.witness)] if r.witness is not None and r.verdict.in_cone else []
            return _result("check", r.verdict, wit, route="age", cone=cone, margin=_num(r.margin), note=r.diagnostic)
        r = cones.is_sonc_age(g)
        return _result(
            "check",
            r.verdict,
            route="age",
            cone=cone,
            lam=None if r.lam is None else [float(x) for x in r.lam],
            lower=_num(r.lower),
            upper=_num(r.upper),
            target=_num(r.target),
            iterations=r.iterations,
            note=r.diagnostic,
        )
    run = cones.is_dsonc_general if cone == "dsonc" else cones.is_sonc_general
    r = run(f, split)
    return _result(
        "check",
        r.verdict,
        [_witness(w) for w in r.witnesses] if r.verdict.in_cone else [],
        route="split",
        cone=cone,
        split="uniform" if split.is_uniform else "file",
        failed=[_pt(p) for p in r.failed],
        margins=[_num(m) for m in r.margins],
    )


def _check_dual(doc: SignomialDocument) -> dict:
    pts = [make_point(e) for _, e in doc.terms]
    v = [float(c) for c, _ in doc.terms]
    base = SupportSet(doc.n, tuple(pts))
    if "negative" in doc.extra:
        neg = set(doc.extra["negative"])
        if not all(isinstance(i, int) and 0 <= i < len(pts) for i in neg):
            raise DocumentError("field 'negative' must list term indices")
    else:
        verts = set(hull_vertices(base))
        neg = {i for i, c in enumerate(v) if c < 0 and i not in verts}
    signed = SignedSupport(base, tuple(i for i in range(len(pts)) if i not in neg), tuple(neg))
    r = cones.check_dual_sonc_membership(v, signed)
    return _result(
        "check",
        r.verdict,
        route="dual-sonc",
        cone="dual-sonc",
        negative_vertex_entries=[_pt(p) for p in r.negative_positive_entries],
        checked=len(r.checks),
        violations=[
            {**_circuit_json(c.circuit), "lhs": _num(c.lhs), "rhs": _num(c.rhs)} for c in r.violations
        ],
    )


def _load_split(path) -> cones.SplitPolicy:
    """``{"n": 2, "pieces": [{"inner": [...], "shares": [{"e": [...], "s": 0.5}, ...]}]}``"""
    data = read_json(path)
    n = data.get("n")
    shares = {}
    for i, piece in enumerate(data.get("pieces", [])):
        inner = load_points({"n": n, "p": [piece.get("inner")]}, "p")[0]
        row = {}
        for j, s in enumerate(piece.get("shares", [])):
            row[load_points({"n": n, "p": [s.get("e")]}, "p")[0]] = float(s.get("s"))
        shares[inner] = row
    return cones.SplitPolicy.explicit(shares)


def _split_from_args(args) -> cones.SplitPolicy:
    if getattr(args, "split", "uniform") == "file":
        if not args.split_file:
            raise DocumentError("--split file needs --split-file PATH")
        return _load_split(args.split_file)
    return cones.SplitPolicy.uniform()


def _run_check_one(path, cone, split) -> dict:
    try:
        doc = SignomialDocument.load(path)
        out = _check_dual(doc) if cone == "dual-sonc" else _check_signomial(doc, cone, split)
    except (DsoncError, OSError, ValueError) as exc:
        out = _error("check", exc)
    out["diagnostics"]["file"] = str(path)
    return out


def cmd_check(args) -> dict:
    split = _split_from_args(args)
    if len(args.files) == 1:
        return _run_check_one(args.files[0], args.cone, split)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(lambda p: _run_check_one(p, args.cone, split), args.files))
    codes = [_exit_code(r) for r in results]
    worst = results[codes.index(max(codes))]["verdict"]
    return _result("check", worst, results=results)


# ---------------------------------------------------------------------------
# other subcommands


def cmd_bound(args) -> dict:
    doc = SignomialDocument.load(args.file)
    split = _split_from_args(args)
    try:
        b = cones.dsonc_lower_bound(doc.to_signomial(), split)
    except NoCertificate as exc:
        return _result("bound", cones.Verdict.NOT_MEMBER, code=exc.code, message=str(exc), failed=[_pt(p) for p in exc.failed])
    diag = {
        "gamma_dsonc": b.gamma_dsonc,
        "ell": b.ell,
        "constant": b.constant,
        "split": [{"inner": _pt(k), "shares": [{"e": _pt(a), "s": s} for a, s in row.items()]} for k, row in b.split.items()],
    }
    if args.boost:
        diag["gamma_sonc_boosted"] = b.gamma_sonc_boosted
        diag["lambda"] = None if b.lambda_used is None else [format_rational(x) for x in b.lambda_used]
        diag["lambda_points"] = [_pt(a) for a, _ in b.constant_piece]
    return _result("bound", SUCCESS, [_witness(w) for w in b.witnesses], **diag)


def cmd_circuits(args) -> dict:
    data = read_json(args.file)
    if "terms" in data:
        doc = SignomialDocument.from_dict(data)
        pts = [make_point(e) for _, e in doc.terms]
        n = doc.n
    else:
        pts = load_points(data, "points")
        n = data["n"]
    found = enumerate_minimal_circuits(SupportSet(n, tuple(pts)), cap=args.cap)
    return _result("circuits", SUCCESS, circuits=[_circuit_json(c) for c in found], count=len(found))


def cmd_equilibrium(args) -> dict:
    cf = _as_circuit_function(SignomialDocument.load(args.file))
    e = structure.equilibrium_point(cf)
    return _result(
        "equilibrium",
        SUCCESS,
        point=[float(x) for x in e.point],
        common_log_value=e.common_log_value,
        common_value=math.exp(e.common_log_value),
        boundary=structure.is_dsonc_boundary_via_equilibrium(cf),
        genus_zero=structure.tropical_genus_zero(cf),
    )


def cmd_minimizer(args) -> dict:
    cf = _as_circuit_function(SignomialDocument.load(args.file))
    m = structure.minimizer(cf)
    c = structure.minimizer_equals_equilibrium(cf)
    return _result(
        "minimizer",
        SUCCESS,
        point=[float(x) for x in m.point],
        scale=m.scale,
        value=_num(m.value),
        normalized_value=m.normalized_value,
        equals_equilibrium=c.coincide,
        barycentric=c.barycentric,
    )


def cmd_extreme_ray(args) -> dict:
    doc = SignomialDocument.load(args.file)
    f = doc.to_signomial()
    ambient = None
    if "ambient" in doc.extra:
        ambient = SupportSet(doc.n, tuple(load_points({"n": doc.n, "ambient": doc.extra["ambient"]}, "ambient")))
    r = cones.is_extreme_ray(f, ambient)
    verdict = cones.Verdict.MEMBER if r.extreme else cones.Verdict.NOT_MEMBER
    return _result("extreme-ray", verdict, kind=r.kind, reason=r.reason)


def cmd_mms(args) -> dict:
    data = read_json(args.file)
    if "delta" in data:
        delta = load_points(data, "delta")
    else:
        doc = SignomialDocument.from_dict(data)
        pts = [make_point(e) for _, e in doc.terms]
        delta = [pts[i] for i in hull_vertices(pts)]
    res = mms.maximal_mediated_set(mms.LatticeSimplex(tuple(delta)), cap=args.cap)
    return _result(
        "mms",
        SUCCESS,
        lattice_points=[list(map(str, p)) for p in res.lattice_points],
        mediated=[list(map(str, p)) for p in res.mediated],
        removed=[list(map(str, p)) for p in res.lattice_points if p not in res],
        iterations=res.iterations,
    )


def cmd_sos_check(args) -> dict:
    cf = _as_circuit_function(SignomialDocument.load(args.file))
    r = mms.is_sos_dsonc_circuit_poly(cf)
    verdict = cones.Verdict.MEMBER if r.sos else cones.Verdict.NOT_MEMBER
    return _result("sos-check", verdict, reason=r.reason, in_dsonc=cones.is_dsonc_circuit(cf).value)


def _floats(text: str) -> list:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise DocumentError(f"not a comma separated list of numbers: {text!r}") from None


def cmd_generate(args) -> dict:
    circ = load_circuit(read_json(args.circuit))
    f = structure.generate_boundary_function(circ, _floats(args.w), args.t)
    doc = SignomialDocument.from_signomial(f.to_signomial())
    if args.out:
        doc.save(args.out)
    return _result(
        "generate",
        SUCCESS,
        document=doc.to_dict(),
        dsonc=cones.is_dsonc_circuit(f).value,
    )


def _parse_grid(text: str, n: int) -> list:
    axes = []
    for part in text.split(","):
        bits = part.split(":")
        if len(bits) != 3:
            raise DocumentError(f"grid axis must read START:STOP:STEPS, got {part!r}")
        try:
            lo, hi, steps = float(bits[0]), float(bits[1]), int(bits[2])
        except ValueError:
            raise DocumentError(f"bad grid axis {part!r}") from None
        if steps < 1:
            raise DocumentError("grid needs at least one step")
        axes.append(np.linspace(lo, hi, steps))
    if len(axes) != n:
        raise DocumentError(f"grid has {len(axes)} axes, document has n = {n}")
    return axes


def cmd_plot(args) -> dict:
    doc = SignomialDocument.load(args.file)
    if doc.n > 2:
        raise DocumentError("plot supports n = 1 or n = 2")
    f = doc.to_signomial()
    axes = _parse_grid(args.grid, doc.n)
    mesh = np.meshgrid(*axes, indexing="ij")
    X = np.stack([m.ravel() for m in mesh], axis=1)
    vals = evaluate_polynomial(f, X) if doc.mode == "poly" else evaluate_many(f, X)
    header = ["x", "f"] if doc.n == 1 else ["x", "y", "f"]
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row, v in zip(X, vals):
            w.writerow([format(float(x), ".17g") for x in row] + [format(float(v), ".17g")])
    return _result("plot", SUCCESS, rows=len(X), out=str(args.out), mode=doc.mode)


# ---------------------------------------------------------------------------


def _error(command: str, exc: Exception) -> dict:
    if isinstance(exc, DsoncError):
        code = exc.code
    elif isinstance(exc, OSError):
        code = "IO_ERROR"
    else:
        code = "INVALID_INPUT"
    diag = {"code": code, "message": str(exc)}
    for attr in ("line", "column"):
        if getattr(exc, attr, None) is not None:
            diag[attr] = getattr(exc, attr)
    if getattr(exc, "vertices", None):
        diag["vertices"] = [_pt(v) for v in exc.vertices]
    return _result(command, "Error", **diag)


def _exit_code(result: dict) -> int:
    v = result["verdict"]
    if v == "Error":
        return EXIT_ERROR
    if v == cones.Verdict.NOT_MEMBER.value:
        return EXIT_NOT_MEMBER
    return EXIT_OK


COMMANDS = {
    "check": cmd_check,
    "bound": cmd_bound,
    "circuits": cmd_circuits,
    "equilibrium": cmd_equilibrium,
    "minimizer": cmd_minimizer,
    "extreme-ray": cmd_extreme_ray,
    "mms": cmd_mms,
    "sos-check": cmd_sos_check,
    "generate": cmd_generate,
    "plot": cmd_plot,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="dsonc", description="Circuit-based nonnegativity certificates for signomials.")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="cone membership of one or more signomial documents")
    c.add_argument("--cone", choices=["sonc", "dsonc", "dual-sonc"], required=True)
    c.add_argument("--split", choices=["uniform", "file"], default="uniform")
    c.add_argument("--split-file")
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("files", nargs="+")

    b = sub.add_parser("bound", help="DSONC lower bound via one LP")
    b.add_argument("--split", choices=["uniform", "file"], default="uniform")
    b.add_argument("--split-file")
    b.add_argument("--boost", action="store_true", help="also report the boosted SONC bound")
    b.add_argument("file")

    ci = sub.add_parser("circuits", help="list minimal circuits of a support")
    ci.add_argument("--cap", type=int, default=25)
    ci.add_argument("file")

    for name in ("equilibrium", "minimizer", "extreme-ray", "sos-check"):
        sub.add_parser(name).add_argument("file")

    m = sub.add_parser("mms", help="maximal mediated set of a lattice simplex")
    m.add_argument("--cap", type=int, default=mms.DEFAULT_BOX_CAP)
    m.add_argument("file")

    g = sub.add_parser("generate", help="DSONC boundary function with a prescribed equilibrium")
    g.add_argument("--circuit", required=True)
    g.add_argument("--w", required=True, help="comma separated equilibrium point")
    g.add_argument("--t", type=float, required=True)
    g.add_argument("--out")

    pl = sub.add_parser("plot", help="sample a signomial on a grid and write CSV")
    pl.add_argument("file")
    pl.add_argument("--grid", required=True, help="X0:X1:STEPS[,Y0:Y1:STEPS]")
    pl.add_argument("--out", required=True)
    return p


def _glue_negative_values(argv):
    # "--grid -2:2:101" and "--w -1,0" would otherwise be read as options
    out = list(argv)
    for i, tok in enumerate(out[:-1]):
        if tok in ("--grid", "--w") and out[i + 1].startswith("-"):
            out[i : i + 2] = [f"{tok}={out[i + 1]}", ""]
    return [t for t in out if t != ""]


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        result = COMMANDS[args.command](args)
    except (DsoncError, OSError, ValueError) as exc:
        result = _error(args.command, exc)
    json.dump(result, stdout, indent=2, allow_nan=False)
    stdout.write("\n")
    return _exit_code(result)


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
