"""Command line entry point.

Every command prints a single JSON report to stdout (or --out) with the
shape

    {"command": ..., "inputs": ..., "results": ...,
     "version": {"tool": ..., "graph_format": ..., "action_format": ...},
     "determinism_seed": ...}

serialized with sorted keys and no float formatting surprises, so the same
invocation yields byte-identical output.  Failures exit with code 2 and a
JSON diagnostic on stderr; size-cap refusals exit with code 3.
"""

import argparse
import csv
import io as _stringio
import json
import os
import sys
from dataclasses import asdict, is_dataclass
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import FormatError, QtlabError, SizeLimitExceeded, UnknownFixture
from .io import (ACTION_FORMAT, GRAPH_FORMAT, load_action, load_graph,
                 save_action, save_graph)
from .metric_graph import (bottleneck_constant, ends_profile,
                           enumerate_geodesics, hyperbolicity_delta)
from .group_action import (Word, check_locally_finite_orbit, classify_action_type,
                           classify_isometry, connectivity_radius, orbit,
                           properness_profiles, rips_orbit_graph,
                           stable_translation_length)
from . import constructions as C
from .products import (ProductIsometry, ProductSpace, distortion_profile,
                       factor_preservation_check, l1_geodesic_uniqueness,
                       point_id, product_action, product_distance)
from .leary_minasyan import (conjugation_exponents, fit_translation_homomorphism,
                             gaussian_power_check, lm_obstruction_check,
                             parse_samples, seminorm_audit)

MANIFEST_FORMAT = "qtlab-manifest-v1"

FIXTURES = ("bs12-r8", "cone-z-r10", "coset-c30", "doubleline-n16",
            "f2-r5", "farey-Q20", "horoball-line-d7")


def _plain(x):
    """Recursively convert report values to JSON-encodable data."""
    if isinstance(x, Word):
        return x.display()
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if is_dataclass(x) and not isinstance(x, type):
        return {k: _plain(v) for k, v in asdict(x).items()}
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        return [_plain(v) for v in x]
    return x


def _report(command: str, inputs: dict, results, seed: int) -> dict:
    return {
        "command": command,
        "inputs": _plain(inputs),
        "results": _plain(results),
        "version": {"tool": __version__, "graph_format": GRAPH_FORMAT,
                    "action_format": ACTION_FORMAT},
        "determinism_seed": seed,
    }


def _emit(text: str, out):
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_report(rep: dict, args, csv_rows=None):
    fmt = getattr(args, "format", "json") or "json"
    if fmt == "csv":
        if csv_rows is None:
            raise FormatError("csv output is only available for profile tables")
        buf = _stringio.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for row in csv_rows:
            w.writerow(row)
        _emit(buf.getvalue(), getattr(args, "out", None))
        return
    _emit(json.dumps(rep, sort_keys=True, separators=(",", ":")) + "\n",
          getattr(args, "out", None))


def _load_json_arg(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{what}: not valid JSON ({exc})") from exc


def _point_arg(text: str):
    val = _load_json_arg(text, "point")
    if not isinstance(val, list):
        raise FormatError(f"point must be a JSON array of vertex ids, got {val!r}")
    return tuple(str(v) for v in val)


# ---------------------------------------------------------------------------
# command handlers
# ---------------------------------------------------------------------------


def cmd_analyze(args):
    g = load_graph(args.graph)
    hyp = hyperbolicity_delta(g)
    bot = bottleneck_constant(g)
    results = {
        "n_vertices": g.n,
        "n_edges": len(g.edges()),
        "is_tree": g.is_tree(),
        "diameter": int(g.dist.max()),
        "two_delta": hyp.two_delta,
        "delta": hyp.delta,
        "delta_witness": hyp.witness,
        "bottleneck_constant": bot.constant,
        "bottleneck_witness": bot.witness,
    }
    return _report("analyze", {"graph": args.graph}, results, args.seed), None


def _as_gen_steps(family: str, gens):
    if gens is None:
        return None
    if family == "Z":
        return tuple(int(v) for v in gens)
    if family == "Z2":
        return tuple((int(a), int(b)) for a, b in gens)
    return tuple(str(v) for v in gens)


def cmd_construct(args):
    params = _load_json_arg(args.params or "{}", "--params")
    if not isinstance(params, dict):
        raise FormatError("--params must be a JSON object")
    name = args.family
    base = load_graph(args.graph, allow_disconnected=True) if args.graph else None
    base_action = load_action(args.action) if args.action else None

    action = None
    basepoint = None
    extras = {}
    if name == "path":
        graph = C.path_graph(int(params["n"]))
    elif name == "cycle":
        graph = C.cycle_graph(int(params["n"]))
    elif name == "grid":
        graph = C.grid_graph(int(params["m"]), int(params["n"]))
    elif name == "star":
        graph = C.star_graph(int(params["leaves"]))
    elif name == "tree":
        graph = C.regular_tree(int(params["degree"]), int(params["depth"]))
    elif name == "rips":
        if base is None:
            raise FormatError("construct rips needs --graph for the base")
        graph = C.rips_graph(base, int(params["r"]))
    elif name == "cayley":
        con = C.cayley_graph(str(params["family"]), int(params["radius"]),
                             gens=_as_gen_steps(str(params["family"]), params.get("gens")))
        graph, action, basepoint, extras = con.graph, con.action, con.basepoint, con.extras
    elif name == "farey":
        con = C.farey_graph(int(params["Q"]),
                            int(params["P"]) if "P" in params else None)
        graph, action, basepoint, extras = con.graph, con.action, con.basepoint, con.extras
    elif name == "bs12":
        con = C.bass_serre_tree_bs12(int(params["radius"]))
        graph, action, basepoint, extras = con.graph, con.action, con.basepoint, con.extras
    elif name == "coset":
        chain = str(params.get("chain", "c30"))
        if chain == "c6":
            table, ch = C.c6_chain()
        elif chain == "c30":
            table, ch = C.c30_chain()
        else:
            raise FormatError(f"unknown chain {chain!r}; have c6, c30")
        con = C.coset_tree(table, ch)
        graph, action, basepoint, extras = con.graph, con.action, con.basepoint, con.extras
    elif name == "doubleline":
        con = C.double_line_graph(int(params["n"]),
                                  tuple(params.get("swaps", (0, 3))))
        graph, action, basepoint, extras = con.graph, con.action, con.basepoint, con.extras
    elif name == "cone":
        if base is None:
            raise FormatError("construct cone needs --graph for the base")
        con = C.cone_graph(base, base_action, basepoint=params.get("basepoint"))
        graph, action, basepoint, extras = con.graph, con.action, con.basepoint, con.extras
    elif name == "horoball":
        if base is None:
            raise FormatError("construct horoball needs --graph for the base")
        con = C.horoball(base, base_action, depth=int(params.get("depth", 1)),
                         basepoint=params.get("basepoint"))
        graph, action, basepoint, extras = con.graph, con.action, con.basepoint, con.extras
    else:
        raise FormatError(
            f"unknown construction {name!r}; have path, cycle, grid, star, tree, "
            "rips, cayley, farey, bs12, coset, doubleline, cone, horoball")

    written = {}
    if args.out:
        save_graph(graph, args.out)
        written["graph"] = args.out
    if action is not None and args.action_out:
        save_action(action, args.action_out,
                    graph_ref=os.path.basename(args.out) if args.out else None)
        written["action"] = args.action_out
    args.out = None   # the report goes to stdout; --out named the graph file
    results = {
        "family": name,
        "n_vertices": graph.n,
        "n_edges": len(graph.edges()),
        "basepoint": basepoint,
        "has_action": action is not None,
        "extras": extras,
        "written": written,
    }
    return _report("construct", {"family": name, "params": params,
                                 "graph": args.graph, "action": args.action},
                   results, args.seed), None


def cmd_orbit(args):
    a = load_action(args.action, allow_disconnected=True)
    horizon = args.horizon
    res = orbit(a, args.basepoint, horizon)
    rho_max = args.radius if args.radius is not None else horizon
    fin = check_locally_finite_orbit(a, args.basepoint, rho_max, horizon)
    results = {
        "basepoint": res.basepoint,
        "horizon": horizon,
        "size": res.size,
        "complete": res.complete,
        "exhausted": res.exhausted,
        "sample": res.vertices[:10],
        "ball_counts": fin.counts,
        "ball_counts_half_horizon": fin.counts_half_horizon,
        "growth_warning": fin.growth_warning,
        "verdict": fin.verdict,
    }
    return _report("orbit", {"action": args.action, "basepoint": args.basepoint,
                             "horizon": horizon, "radius": rho_max},
                   results, args.seed), None


def cmd_rips_orbit(args):
    a = load_action(args.action, allow_disconnected=True)
    rg = rips_orbit_graph(a, args.basepoint, args.r, args.horizon)
    results = {
        "r": rg.r,
        "basepoint": rg.basepoint,
        "horizon": rg.horizon,
        "orbit_size": rg.orbit.size,
        "n_edges": len(rg.graph.edges()),
        "connected": rg.graph.connected,
        "connectivity_radius": connectivity_radius(a, args.basepoint),
    }
    if args.out:
        save_graph(rg.graph, args.out)
        results["written"] = args.out
        args.out = None   # report still goes to stdout
    return _report("rips-orbit", {"action": args.action, "basepoint": args.basepoint,
                                  "r": args.r, "horizon": args.horizon},
                   results, args.seed), None


def cmd_classify(args):
    a = load_action(args.action, allow_disconnected=True)
    if args.word:
        w = Word.parse(args.word)
        rep = classify_isometry(a, w, args.basepoint, horizon=args.horizon)
        results = {
            "kind": "isometry",
            "word": w,
            "verdict": rep.verdict,
            "confidence": rep.confidence,
            "method": rep.method,
            "tau_upper": rep.tau_upper,
            "tau_lower": rep.tau_lower,
            "certificate": rep.certificate,
            "truncated": rep.truncated,
            "notes": rep.notes,
        }
    else:
        rep = classify_action_type(a, args.basepoint, horizon=args.horizon)
        results = {
            "kind": "action",
            "verdict": rep.verdict,
            "confidence": rep.confidence,
            "evidence": rep.evidence,
            "loxodromics": rep.loxodromics,
        }
    return _report("classify", {"action": args.action, "basepoint": args.basepoint,
                                "word": args.word, "horizon": args.horizon},
                   results, args.seed), None


def cmd_properness(args):
    a = load_action(args.action, allow_disconnected=True)
    rep = properness_profiles(a, epsilons=(0, 1, 2), radii=(2, 4, 8),
                              rs=(0, 1, 2), horizon=args.horizon)
    results = {
        "horizon": rep.horizon,
        "n_elements": rep.n_elements,
        "acylindricity": rep.acylindricity,
        "uniform": rep.uniform,
        "max_stabilizer": rep.max_stabilizer,
        "stabilizer_growth_warning": rep.stabilizer_growth_warning,
        "no_pair_flags": rep.no_pair_flags,
    }
    rows = [("table", "epsilon_or_r", "R", "count")]
    for eps, R, N in rep.acylindricity:
        rows.append(("acylindricity", eps, R, N))
    for r, N in rep.uniform:
        rows.append(("uniform", r, "", N))
    return _report("properness", {"action": args.action, "horizon": args.horizon},
                   results, args.seed), rows


def _load_factors(paths):
    if not paths:
        raise FormatError("need at least one factor file via --factors")
    return [load_graph(p) for p in paths]


def cmd_product(args):
    sub = args.product_cmd
    if sub == "distance":
        space = ProductSpace(_load_factors(args.factors), args.norm)
        x, y = _point_arg(args.x), _point_arg(args.y)
        d = product_distance(space, x, y)
        results = {"norm": d.norm, "exact": d.exact, "squared": d.squared,
                   "approx": d.approx, "x": x, "y": y}
    elif sub == "geodesics":
        space = ProductSpace(_load_factors(args.factors), args.norm)
        x, y = _point_arg(args.x), _point_arg(args.y)
        rep = l1_geodesic_uniqueness(space, x, y)
        results = {
            "x": rep.x, "y": rep.y,
            "differing_coordinates": rep.differing,
            "geodesic_count": rep.count,
            "passed": rep.passed,
            "examples": rep.examples,
            "witness": rep.witness,
            "overflow": rep.overflow,
        }
    elif sub == "factor-check":
        space = ProductSpace(_load_factors(args.factors), args.norm)
        payload = _load_json_arg(open(args.map).read(), args.map)
        pairs = payload.get("mapping") if isinstance(payload, dict) else payload
        if pairs is None:
            raise FormatError(f"{args.map}: no 'mapping' array")
        mapping = {tuple(map(str, src)): tuple(map(str, dst)) for src, dst in pairs}
        iso = ProductIsometry(space, mapping)
        rep = factor_preservation_check(space, iso)
        results = {
            "is_isometry": iso.verified,
            "preserves_factors": rep.preserves,
            "permutation": rep.perm,
            "witness": rep.witness,
        }
    elif sub == "distortion":
        actions = [load_action(p, allow_disconnected=True) for p in args.factors]
        built = product_action(actions)
        x0 = point_id(_point_arg(args.basepoint)) if args.basepoint else (
            point_id(tuple(sorted(a.space.vertex_ids)[0] for a in actions)))
        prof = distortion_profile(built.action, x0, args.horizon)
        results = {
            "basepoint": prof.basepoint,
            "horizon": prof.horizon,
            "raw": prof.raw,
            "envelope": prof.envelope,
            "witnesses": prof.witnesses,
            "final": prof.final,
        }
        rows = [("n", "raw", "envelope", "witness")]
        for k in range(prof.horizon):
            rows.append((k + 1, str(prof.raw[k]), str(prof.envelope[k]),
                         prof.witnesses[k] or ""))
        return _report("product", {"sub": sub, "factors": args.factors,
                                   "basepoint": args.basepoint,
                                   "horizon": args.horizon},
                       results, args.seed), rows
    else:
        raise FormatError(f"unknown product subcommand {sub!r}")
    inputs = {"sub": sub, "factors": args.factors, "norm": args.norm}
    for key in ("x", "y", "map"):
        if getattr(args, key, None) is not None:
            inputs[key] = getattr(args, key)
    return _report("product", inputs, results, args.seed), None


def cmd_lm(args):
    sub = args.lm_cmd
    if sub == "exponents":
        n = args.n
        alpha, beta, gamma, delta = conjugation_exponents(n)
        gp = gaussian_power_check(n)
        results = {
            "n": n,
            "alpha": alpha, "beta": beta, "gamma": gamma, "delta": delta,
            "norm_identity": alpha * alpha + beta * beta == 25 ** n,
            "gaussian": {"re": gp.re, "im": gp.im, "nonreal": gp.nonreal,
                         "congruent_mod5": gp.congruent},
        }
        inputs = {"sub": sub, "n": n}
    elif sub == "obstruction":
        kmax = args.k_max
        override = _load_json_arg(args.matrix, "--matrix") if args.matrix else None
        failures = []
        reports = []
        for k in range(1, kmax + 1):
            rep = lm_obstruction_check(k, matrix_override=override)
            reports.append({"k": k, "det_plus": rep.det_plus,
                            "det_minus": rep.det_minus,
                            "obstructed": rep.obstructed,
                            "witness": rep.witness})
            if not rep.obstructed:
                failures.append(k)
        results = {
            "k_max": kmax,
            "all_obstructed": not failures,
            "unobstructed_k": failures,
            "first_rows": reports[:5],
        }
        inputs = {"sub": sub, "k_max": kmax, "matrix": args.matrix}
    elif sub == "fit":
        with open(args.samples) as fh:
            payload = json.load(fh)
        samples = parse_samples(payload)
        fit = fit_translation_homomorphism(samples)
        audit = seminorm_audit(samples)
        results = {
            "x": fit.x, "y": fit.y,
            "residual": fit.residual,
            "method": fit.method,
            "n_samples": fit.n_samples,
            "audit": {
                "passed": audit.passed,
                "homogeneity_violations": audit.homogeneity_violations,
                "subadditivity_violations": audit.subadditivity_violations,
                "checked_homogeneity": audit.checked_homogeneity,
                "checked_subadditivity": audit.checked_subadditivity,
            },
        }
        inputs = {"sub": sub, "samples": args.samples}
    else:
        raise FormatError(f"unknown lm subcommand {sub!r}")
    return _report("lm", inputs, results, args.seed), None


# ---------------------------------------------------------------------------
# fixtures
# ---------------------------------------------------------------------------


def _build_fixture(name: str):
    if name == "farey-Q20":
        return C.farey_graph(20)
    if name == "bs12-r8":
        return C.bass_serre_tree_bs12(8)
    if name == "coset-c30":
        table, chain = C.c30_chain()
        return C.coset_tree(table, chain)
    if name == "horoball-line-d7":
        base = C.cayley_graph("Z", 64)
        return C.horoball(base.graph, base.action, depth=7, basepoint="0|0")
    if name == "doubleline-n16":
        return C.double_line_graph(16)
    if name == "cone-z-r10":
        base = C.cayley_graph("Z", 10)
        return C.cone_graph(base.graph, base.action, basepoint="0")
    if name == "f2-r5":
        return C.cayley_graph("F2", 5)
    raise UnknownFixture(f"no fixture {name!r}; have {', '.join(FIXTURES)}")


def cmd_fixtures(args):
    if args.name == "list":
        return _report("fixtures", {"name": "list"},
                       {"available": list(FIXTURES)}, args.seed), None
    con = _build_fixture(args.name)
    outdir = args.out or "."
    os.makedirs(outdir, exist_ok=True)
    gpath = os.path.join(outdir, f"{args.name}.graph.json")
    apath = os.path.join(outdir, f"{args.name}.action.json")
    mpath = os.path.join(outdir, f"{args.name}.manifest.json")
    save_graph(con.graph, gpath)
    files = {"graph": gpath}
    manifest = {
        "format": MANIFEST_FORMAT,
        "fixture": args.name,
        "graph": os.path.basename(gpath),
        "basepoint": con.basepoint,
        "n_vertices": con.graph.n,
        "n_edges": len(con.graph.edges()),
        "extras": _plain(con.extras),
    }
    if con.action is not None:
        save_action(con.action, apath, graph_ref=os.path.basename(gpath))
        files["action"] = apath
        manifest["action"] = os.path.basename(apath)
        manifest["connectivity_radius"] = connectivity_radius(con.action, con.basepoint)
    with open(mpath, "w") as fh:
        json.dump(manifest, fh, sort_keys=True, separators=(",", ":"))
        fh.write("\n")
    files["manifest"] = mpath
    results = {"fixture": args.name, "files": files,
               "n_vertices": con.graph.n, "basepoint": con.basepoint}
    rep = _report("fixtures", {"name": args.name, "out": outdir}, results, args.seed)
    args.out = None   # files already written; report goes to stdout
    return rep, None


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="qtlab",
        description="metric graphs, group actions and their orbit geometry")
    p.add_argument("--seed", type=int, default=0,
                   help="recorded in every report; fixes any randomized choices")
    p.add_argument("--max-vertices", type=int, default=None,
                   help="global size cap (sets QTLAB_MAX_VERTICES)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, out=True, fmt=True):
        if out:
            sp.add_argument("--out", default=None, help="write output here instead of stdout")
        if fmt:
            sp.add_argument("--format", choices=("json", "csv"), default="json")

    s = sub.add_parser("analyze", help="hyperbolicity and bottleneck constants of a graph")
    s.add_argument("--graph", required=True)
    common(s)
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("construct", help="build a graph family, optionally with its action")
    s.add_argument("family")
    s.add_argument("--params", default="{}", help="JSON object of family parameters")
    s.add_argument("--graph", default=None, help="base graph for rips/cone/horoball")
    s.add_argument("--action", default=None, help="base action for cone/horoball")
    s.add_argument("--out", default=None, help="write the graph JSON here")
    s.add_argument("--action-out", default=None, help="write the action JSON here")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_construct)

    s = sub.add_parser("orbit", help="BFS orbit of a basepoint with ball counts")
    s.add_argument("--action", required=True)
    s.add_argument("--basepoint", required=True)
    s.add_argument("--horizon", type=int, default=8)
    s.add_argument("--radius", type=int, default=None, help="max ball radius for counts")
    common(s)
    s.set_defaults(func=cmd_orbit)

    s = sub.add_parser("rips-orbit", help="Rips graph of an orbit")
    s.add_argument("--action", required=True)
    s.add_argument("--basepoint", required=True)
    s.add_argument("--r", type=int, required=True)
    s.add_argument("--horizon", type=int, default=8)
    common(s)
    s.set_defaults(func=cmd_rips_orbit)

    s = sub.add_parser("classify", help="classify a word (with --word) or the whole action")
    s.add_argument("--action", required=True)
    s.add_argument("--basepoint", required=True)
    s.add_argument("--word", default=None, help="e.g. 't a^-1 t'")
    s.add_argument("--horizon", type=int, default=16)
    common(s)
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("properness", help="acylindricity and uniform properness tables")
    s.add_argument("--action", required=True)
    s.add_argument("--horizon", type=int, default=4)
    common(s)
    s.set_defaults(func=cmd_properness)

    s = sub.add_parser("product", help="product-space tools")
    ps = s.add_subparsers(dest="product_cmd", required=True)
    for nm in ("distance", "geodesics", "factor-check", "distortion"):
        q = ps.add_parser(nm)
        q.add_argument("--factors", nargs="+", required=True,
                       help="factor graph files (action files for distortion)")
        q.add_argument("--norm", choices=("l1", "l2", "linf"), default="l1")
        if nm in ("distance", "geodesics"):
            q.add_argument("--x", required=True, help='JSON point, e.g. \'["0","1"]\'')
            q.add_argument("--y", required=True)
        if nm == "factor-check":
            q.add_argument("--map", required=True,
                           help='JSON file {"mapping": [[src, dst], ...]}')
        if nm == "distortion":
            q.add_argument("--basepoint", default=None, help="JSON product point")
            q.add_argument("--horizon", type=int, default=8)
        common(q)
        q.set_defaults(func=cmd_product)

    s = sub.add_parser("lm", help="exact arithmetic for the lattice extension family")
    ls = s.add_subparsers(dest="lm_cmd", required=True)
    q = ls.add_parser("exponents")
    q.add_argument("--n", type=int, required=True)
    common(q)
    q.set_defaults(func=cmd_lm)
    q = ls.add_parser("obstruction")
    q.add_argument("--k-max", type=int, required=True)
    q.add_argument("--matrix", default=None, help="JSON 2x2 integer matrix override")
    common(q)
    q.set_defaults(func=cmd_lm)
    q = ls.add_parser("fit")
    q.add_argument("--samples", required=True, help='JSON file {"samples": [[[m,n],"tau"],...]}')
    common(q)
    q.set_defaults(func=cmd_lm)

    s = sub.add_parser("fixtures", help="write a named fixture (or 'list')")
    s.add_argument("name")
    s.add_argument("--out", default=None, help="output directory")
    s.add_argument("--format", choices=("json", "csv"), default="json")
    s.set_defaults(func=cmd_fixtures)

    return p


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    saved_cap = os.environ.get("QTLAB_MAX_VERTICES")
    if args.max_vertices is not None:
        os.environ["QTLAB_MAX_VERTICES"] = str(args.max_vertices)
    try:
        return _dispatch(args)
    finally:
        # keep the cap scoped to this invocation so embedding main() in a
        # longer-lived process does not change later calls
        if args.max_vertices is not None:
            if saved_cap is None:
                os.environ.pop("QTLAB_MAX_VERTICES", None)
            else:
                os.environ["QTLAB_MAX_VERTICES"] = saved_cap


def _dispatch(args) -> int:
    try:
        rep, csv_rows = args.func(args)
        _emit_report(rep, args, csv_rows)
    except SizeLimitExceeded as exc:
        sys.stderr.write(json.dumps(
            {"command": args.command, "error": {"type": "SizeLimitExceeded",
                                                "message": str(exc)}},
            sort_keys=True, separators=(",", ":")) + "\n")
        return 3
    except QtlabError as exc:
        sys.stderr.write(json.dumps(
            {"command": args.command, "error": {"type": type(exc).__name__,
                                                "message": str(exc)}},
            sort_keys=True, separators=(",", ":")) + "\n")
        return 2
    except OSError as exc:
        sys.stderr.write(json.dumps(
            {"command": args.command, "error": {"type": "FileError",
                                                "message": str(exc)}},
            sort_keys=True, separators=(",", ":")) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
