"""Command line front end: ``posetunit <command> ...``.

Exit codes: 0 success, 2 parse error, 3 negative verdict, 4 engines
disagree, 5 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys
from fractions import Fraction

from .catalog import Catalog, load_catalog, verify_catalog
from .errors import BudgetExceeded, EngineDisagreement, ParseError, PosetRepError
from .flow import FlowParams, _fmt, balanced_check, flow, rationalize_destabilizer, trace_fingerprint
from .notation import parse_document, parse_poset, parse_rep, parse_row, render_rep, render_space
from .poset import Poset, contains_critical, is_primitive, n_poset, primitive, width
from .reps import SubspaceRep
from .stability import (Weight, build_A_matrix, cone_membership, extremal_rays, is_stable,
                        search_subdims)

EXIT_OK, EXIT_PARSE, EXIT_NEGATIVE, EXIT_DISAGREE, EXIT_BUDGET = 0, 2, 3, 4, 5


class Result:
    """What a command produced: a JSON-able payload, text lines and an exit code."""

    def __init__(self, payload: dict, text: list[str], code: int = EXIT_OK):
        self.payload, self.text, self.code = payload, text, code


# --------------------------------------------------------------------------
# input resolution


def parse_fraction_list(text: str) -> tuple:
    parts = [t for t in re.split(r"[,\s;]+", text.strip().strip("()")) if t]
    try:
        return tuple(Fraction(t) for t in parts)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad number list {text!r}") from exc


def parse_lambda(text: str | None):
    if text is None:
        return None
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad value for λ: {text!r}") from exc


def _read_if_file(text: str) -> str:
    return open(text, encoding="utf-8").read() if os.path.isfile(text) else text


def resolve_poset(text: str, cat: Catalog) -> Poset:
    text = _read_if_file(text).strip()
    key = re.sub(r"\s+", "", text)
    if key in cat.posets:
        return cat.posets[key]
    m = re.fullmatch(r"\(N,(\d+)\)", key)
    if m:
        return n_poset(int(m.group(1)))
    m = re.fullmatch(r"\((\d+(?:,\d+)*)\)", key)
    if m:
        return primitive(*(int(t) for t in m.group(1).split(",")))
    m = re.fullmatch(r"chain(\d+)", key)
    if m:
        return primitive(int(m.group(1)), name=f"chain{m.group(1)}")
    if text.startswith("poset"):
        return parse_poset(text)
    raise ParseError(f"cannot read a poset from {text!r}")


def resolve_rep(text: str, cat: Catalog, lam=None, poset: str | None = None):
    """Rep from a catalog id, a file, a ``rep`` literal or a row literal.

    Returns ``(rep, entry)``; ``entry`` is the catalog entry when there is one.
    """
    key = re.sub(r"\s+", "", text)
    if key in cat.entries:
        e = cat.entries[key]
        if e.parametric and lam is None:
            raise ParseError(f"{e.id} depends on λ; pass --lambda")
        return e.rep(lam), e
    body = _read_if_file(text)
    known = dict(cat.posets)
    if poset is not None:
        p = resolve_poset(poset, cat)
        known[p.name] = p
    if re.search(r"\brep\b", body):
        _, reps = parse_document(body, known, lam)
        if not reps:
            raise ParseError("no rep literal found")
        return reps[0], None
    if body.strip().startswith("("):
        if poset is None:
            raise ParseError("a row literal needs --poset")
        return parse_row(body, resolve_poset(poset, cat), lam), None
    raise ParseError(f"cannot read a representation from {text!r}")


def resolve_weight(args, rep: SubspaceRep, entry) -> Weight:
    if args.weight:
        w = parse_fraction_list(args.weight)
    elif entry is not None and entry.weight is not None:
        w = tuple(entry.weight)
    else:
        raise ParseError("no weight given and none listed; pass --weight")
    if len(w) != len(rep.poset):
        raise ParseError(f"weight has {len(w)} entries, poset has {len(rep.poset)} elements")
    return Weight(w)


# --------------------------------------------------------------------------
# formatting helpers


def _q(x) -> str:
    return str(Fraction(x))


def _vec(v) -> dict:
    return {"vector": list(v.as_tuple()),
            "witness": render_space(v.witness) if v.witness is not None else None}


def _flow_params(args) -> FlowParams:
    return FlowParams(tol=args.tol) if args.tol is not None else FlowParams()


# --------------------------------------------------------------------------
# commands


def cmd_finite_type(args, cat: Catalog) -> Result:
    p = resolve_poset(args.poset, cat)
    found = contains_critical(p)
    _, prim = is_primitive(p)
    payload = {"poset": p.describe(), "finite_type": found is None, "width": width(p),
               "primitive": list(prim) if prim else None}
    if found is not None:
        payload["critical"] = {"name": found[0], "embedding": {k: found[1][k] for k in sorted(found[1])}}
    text = [f"poset {p.name}: {'finite' if found is None else 'infinite'} type",
            f"width {width(p)}; primitive {tuple(prim) if prim else 'no'}"]
    if found is not None:
        emb = ", ".join(f"{k}->{v}" for k, v in sorted(found[1].items()))
        text.append(f"contains critical poset {found[0]}: {emb}")
    return Result(payload, text)


def _exact(rep, chi, args) -> tuple[dict, list[str], bool]:
    subdims = search_subdims(rep, budget=args.budget, seed=args.seed)
    v = is_stable(rep, chi, subdims)
    payload = {"status": v.status.value, "slope": _q(v.slope),
               "subdims": [_vec(d) for d in subdims],
               "tight": [dict(_vec(d), slope=_q(d.slope(tuple(chi)))) for d in v.tight]}
    text = [f"exact: {v.status.value}  λ = {v.slope}  ({len(subdims)} maximal subdimension vectors)"]
    for d in v.tight:
        rel = "=" if d.slope(tuple(chi)) == v.slope else ">"
        text.append(f"  {'tight' if rel == '=' else 'violating'} {d!r}  slope {d.slope(tuple(chi))} {rel} λ"
                    f"  witness {render_space(d.witness)}")
    return payload, text, v.stable


def _flow(rep, chi, args) -> tuple[dict, list[str], bool]:
    r = flow(rep, chi, _flow_params(args))
    payload = r.to_json()
    text = [f"flow: {r.status.value} after {r.iterations} iterations, residual {_fmt(r.final_residual)}"
            + (f" ({r.reason})" if not r.converged else "")]
    if not r.converged:
        cert = rationalize_destabilizer(list(r.hints), rep, chi)
        if cert is not None:
            payload["certificate"] = {"subspace": render_space(cert.subspace),
                                      "sub_slope": _q(cert.sub_slope), "slope": _q(cert.slope)}
            text.append(f"  certified destabilizer {render_space(cert.subspace)}:"
                        f" slope {cert.sub_slope} {'>' if cert.strict else '='} {cert.slope}")
        else:
            payload["certificate"] = None
            text.append("  no hint could be certified")
    return payload, text, r.converged


def cmd_stability(args, cat: Catalog) -> Result:
    rep, entry = resolve_rep(args.rep, cat, parse_lambda(args.lam), args.poset)
    chi = resolve_weight(args, rep, entry)
    payload = {"rep": render_rep(rep, rep.name or "pi"), "weight": [_q(a) for a in chi]}
    text = []
    verdicts = {}
    if args.engine in ("exact", "both"):
        payload["exact"], t, verdicts["exact"] = _exact(rep, chi, args)
        text += t
    if args.engine in ("flow", "both"):
        payload["flow"], t, verdicts["flow"] = _flow(rep, chi, args)
        text += t
    if len(set(verdicts.values())) > 1:
        payload["agreement"] = False
        text.append("engines disagree")
        return Result(payload, text, EXIT_DISAGREE)
    if args.engine == "both":
        payload["agreement"] = True
    return Result(payload, text, EXIT_OK if all(verdicts.values()) else EXIT_NEGATIVE)


def cmd_cone(args, cat: Catalog) -> Result:
    rep, _ = resolve_rep(args.rep, cat, parse_lambda(args.lam), args.poset)
    subdims = search_subdims(rep, budget=args.budget, seed=args.seed)
    A = build_A_matrix(rep, subdims)
    cone = extremal_rays(A)
    payload = {"subdims": [_vec(d) for d in subdims],
               "matrix": [[_q(x) for x in row] for row in A.rows],
               "rays": [list(r) for r in cone.rays], "queries": []}
    text = [f"{len(subdims)} maximal subdimension vectors, {len(cone.rays)} extremal rays"]
    text += ["A:"] + ["  " + " ".join(f"{_q(x):>6s}" for x in row) for row in A.rows]
    text += ["rays:"] + ["  (" + ",".join(str(x) for x in r) + ")" for r in cone.rays]
    for q in args.query or []:
        w = parse_fraction_list(q)
        m = cone_membership(cone, w)
        payload["queries"].append({"weight": [_q(x) for x in w], "membership": m.value})
        text.append(f"({', '.join(_q(x) for x in w)}): {m.value}")
    return Result(payload, text)


def cmd_unitarize(args, cat: Catalog) -> Result:
    rep, entry = resolve_rep(args.rep, cat, parse_lambda(args.lam), args.poset)
    chi = resolve_weight(args, rep, entry)
    r = flow(rep, chi, _flow_params(args))
    if not r.converged:
        payload, text, _ = _flow(rep, chi, args)
        return Result({"flow": payload}, text, EXIT_NEGATIVE)
    b = balanced_check(rep, chi, r.metric)
    fp = trace_fingerprint(rep, r.metric, args.word_len)
    payload = r.to_json(fingerprint=fp)
    payload["balance"] = {"residual": _fmt(b.residual), "trace_sum": _fmt(b.trace_sum),
                          "trace_target": _fmt(b.trace_target)}
    G = r.metric.gram
    text = [f"Converged after {r.iterations} iterations, moment map norm {_fmt(r.final_residual)}",
            f"balance residual {_fmt(b.residual)}; trace sum {_fmt(b.trace_sum)} (target {_fmt(b.trace_target)})",
            "Gram matrix (real parts):"]
    text += ["  " + " ".join(f"{_fmt(z.real):>14s}" for z in row) for row in G]
    return Result(payload, text)


def cmd_family(args, cat: Catalog) -> Result:
    lam = parse_lambda(args.lam)
    if lam is None:
        raise ParseError("family needs --lambda")
    key = re.sub(r"\s+", "", args.poset)
    e = cat.entries.get(key)
    if e is None or e.kind != "family":
        raise ParseError(f"no λ-family on {args.poset!r}")
    rep = e.rep(lam)
    payload = {"family": e.id, "lambda": _q(lam), "rep": render_rep(rep, "pi"),
               "weight": [_q(a) for a in e.weight],
               "spaces": {x: render_space(s) for x, s in rep.items()}}
    text = [render_rep(rep, "pi"), "weight (" + ", ".join(_q(a) for a in e.weight) + ")"]
    return Result(payload, text)


def cmd_verify_catalog(args, cat: Catalog) -> Result:
    engines = ("exact", "flow") if args.engine == "both" else (args.engine,)
    rep = verify_catalog(cat, engines=engines, budget=args.budget, seed=args.seed,
                         flow_params=_flow_params(args), entries=args.entry)
    text = [l.render() for l in rep.lines]
    text.append(" ".join(f"{k}={v}" for k, v in rep.counts().items()))
    return Result(rep.to_json(), text, EXIT_OK if rep.ok else EXIT_NEGATIVE)


COMMANDS = {"finite-type": cmd_finite_type, "stability": cmd_stability, "cone": cmd_cone,
            "unitarize": cmd_unitarize, "family": cmd_family, "verify-catalog": cmd_verify_catalog}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=4096)
    common.add_argument("--tol", type=float, default=None, help="flow tolerance")
    common.add_argument("--lambda", dest="lam", default=None, help="value of the family parameter")
    common.add_argument("--catalog", default=None, help="alternative catalog file")

    ap = argparse.ArgumentParser(prog="posetunit", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("finite-type", parents=[common], help="finite/infinite type of a poset")
    p.add_argument("poset")

    for name, hlp in (("stability", "stability verdict"), ("unitarize", "balanced metric"),
                      ("cone", "weight cone")):
        p = sub.add_parser(name, parents=[common], help=hlp)
        p.add_argument("rep", help="catalog id, file, rep literal or row literal")
        p.add_argument("--poset", default=None, help="poset for a row literal")
        if name != "cone":
            p.add_argument("--weight", default=None)
        if name == "stability":
            p.add_argument("--engine", choices=("exact", "flow", "both"), default="exact")
        if name == "cone":
            p.add_argument("--query", action="append", help="weight to classify (repeatable)")
        if name == "unitarize":
            p.add_argument("--word-len", type=int, default=4)

    p = sub.add_parser("family", parents=[common], help="member of a critical λ-family")
    p.add_argument("poset")

    p = sub.add_parser("verify-catalog", parents=[common], help="regression run over the catalog")
    p.add_argument("--engine", choices=("exact", "flow", "both"), default="both")
    p.add_argument("--entry", action="append", help="restrict to this entry (repeatable)")
    return ap


def run(argv=None) -> tuple[int, str]:
    """Run a command; returns ``(exit code, output text)``."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return (EXIT_PARSE if exc.code else EXIT_OK), ""
    try:
        cat = load_catalog(args.catalog)
        res = COMMANDS[args.command](args, cat)
    except ParseError as exc:
        res = Result({"error": "parse", "message": str(exc)}, [f"parse error: {exc}"], EXIT_PARSE)
    except BudgetExceeded as exc:
        res = Result({"error": "budget", "message": str(exc)}, [f"budget exceeded: {exc}"], EXIT_BUDGET)
    except EngineDisagreement as exc:
        res = Result({"error": "disagreement", "message": str(exc)}, [str(exc)], EXIT_DISAGREE)
    except PosetRepError as exc:
        res = Result({"error": type(exc).__name__, "message": str(exc)},
                     [f"{type(exc).__name__}: {exc}"], EXIT_PARSE)
    res.payload = dict(res.payload, seed=args.seed, command=args.command)
    if args.json:
        out = json.dumps(res.payload, sort_keys=True, ensure_ascii=False, indent=2)
    else:
        out = "\n".join(res.text + [f"seed {args.seed}"])
    return res.code, out


def main(argv=None) -> int:
    code, out = run(argv)
    if out:
        print(out)
    return code


if __name__ == "__main__":
    sys.exit(main())
