"""Command line interface.

Every command prints deterministic JSON (or an aligned table with
``--format table``) that embeds the run configuration and library version.
Exit codes: 0 when every check passes, 2 on a falsified check (a
reproduction bundle is written), 1 on usage or resource-guard errors.
With ``--report PATH`` the JSON is also written to PATH and figures/CSV are
rendered next to it.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import gflinear as gf
from . import report
from .config import LIMITS, FalsificationError, ResourceLimitError

EXIT_OK, EXIT_USAGE, EXIT_FALSIFIED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _prime(text):
    d = int(text)
    if d < 2 or any(d % p == 0 for p in range(2, int(d**0.5) + 1)):
        raise argparse.ArgumentTypeError(f"d must be prime, got {d}")
    return d


def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def _pos(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _rs(args):
    if args.r + args.s < 1:
        raise UsageError("need t = r + s >= 1")
    return args.r, args.s, args.d


# ---------------------------------------------------------------- commands
# Each handler returns (payload, checks, figures) where checks maps names to
# bools and figures is a callable taking the report stem (or None).


def cmd_forms_classify(args):
    from .forms import equivalent, garf, invariants, model_classes, model_form

    r, s, d = _rs(args)
    q = model_form(r, s, d)
    inv = invariants(q)
    payload = {"r": r, "s": s, "d": d, "t": r + s, "invariants": inv.to_json(),
               "model_classes": [list(c) for c in model_classes(q)]}
    checks = {}
    if d == 2:
        g = garf(q)
        payload["garf"] = g
        checks["garf = r - s mod 8"] = g == (r - s) % 8
    if args.to is not None:
        r2, s2 = args.to
        if r2 + s2 != r + s:
            raise UsageError("--to must have the same t = r + s")
        same, g = equivalent(q, model_form(r2, s2, d))
        payload["equivalent_to"] = {"r": r2, "s": s2, "equivalent": same,
                                    "witness": None if g is None else g.tolist()}
    return payload, checks, None


def cmd_iso_enum(args):
    from .isotropic import enumerate_strata, witt_transporter

    r, s, d = _rs(args)
    subs = enumerate_strata(r, s, d, m=args.m, stratum=args.stratum)
    if not args.include_zero:
        subs = [N for N in subs if N.m > 0]
    records = [{"index": i, "m": N.m, "stratum": N.stratum, "contains_ones": bool(N.contains_ones),
                "basis": [gf.digits(v) for v in N.N.basis]} for i, N in enumerate(subs)]
    counts = {}
    for rec in records:
        k = f"{rec['stratum']}_{rec['m']}"
        counts[k] = counts.get(k, 0) + 1
    payload = {"r": r, "s": s, "d": d, "t": r + s, "count": len(records), "counts": counts,
               "records": records}
    checks = {}
    if args.orbits:
        # one orbit per (stratum, m) iff every member is reached from the first
        orbit = {}
        for N in subs:
            k = f"{N.stratum}_{N.m}"
            if k not in orbit:
                orbit[k] = [N, True]
            elif witt_transporter(orbit[k][0], N) is None:
                orbit[k][1] = False
        payload["single_orbit"] = {k: v[1] for k, v in orbit.items()}
        checks.update({f"single orbit {k}": v[1] for k, v in orbit.items()})

    def figs(stem):
        if counts:
            return [report.plot_counts(counts, f"{stem}_counts.png", "stratum_m", f"strata of q(r={r}, s={s}), d={d}"),
                    report.write_csv(records, ["index", "m", "stratum", "contains_ones", "basis"],
                                     f"{stem}_records.csv")]
        return []

    return payload, checks, figs


def cmd_group_enum(args):
    from .orthostoch import character_table, enumerate_O1

    r, s, d = _rs(args)
    G = enumerate_O1(r, s, d)
    classes = G.conjugacy_classes()
    payload = {"r": r, "s": s, "d": d, "t": r + s, "order": G.order, "classes": len(classes),
               "class_sizes": [len(c) for c in classes],
               "generators": [G.elements[i].tolist() for i in G.generators()]}
    checks = {"closed": G.is_closed()}
    if args.table:
        T = character_table(G)
        payload["character_table"] = T.to_json()
        payload["degrees"] = T.degrees
        checks["orthogonality"] = T.check_orthogonality()
        checks["sum of squared degrees = order"] = sum(x * x for x in T.degrees) == G.order
    return payload, checks, None


def cmd_commutant_gram(args):
    from .commutant import exact_rank, gram_matrix_S

    r, s, d = _rs(args)
    els, G = gram_matrix_S(r, s, d, args.n)
    rank = exact_rank(G)
    payload = {"r": r, "s": s, "d": d, "n": args.n, "size": len(els), "rank": rank,
               "diagonal": [G[i][i] for i in range(len(els))]}
    checks = {}
    if r + s <= args.n - 1:
        checks["full rank (t <= n-1)"] = rank == len(els)

    def figs(stem):
        M = np.array([[float(x) for x in row] for row in G])
        return [report.plot_matrix(M, f"{stem}_gram.png", f"Gram matrix of S(r={r}, s={s}), n={args.n}")]

    return payload, checks, figs


def cmd_commutant_verify(args):
    from .commutant import commutant_dimension, commutes_with_generators, semigroup_elements

    r, s, d = _rs(args)
    els = semigroup_elements(r, s, d)
    fails = []
    for i, el in enumerate(els):
        res = commutes_with_generators(el.column, r, s, d)
        if not all(res.values()):
            fails.append({"index": i, "element": el.to_json(), "result": res})
    payload = {"r": r, "s": s, "d": d, "elements": len(els), "failures": fails}
    checks = {"all elements commute with generators": not fails}
    if args.dimension:
        dim = commutant_dimension(r, s, args.n, d)
        payload["commutant_dimension"] = dim
        payload["n"] = args.n
        if r + s <= args.n + 1:
            checks["dimension = |S|"] = dim == len(els)
    return payload, checks, None


def cmd_decompose_t5(args):
    from .decompose import T5Span, t5_pipeline, t5_span_analysis

    n = args.n
    payload = {"n": n, "span": t5_span_analysis(n)}
    checks = {}
    if n >= 4:  # independence is guaranteed once t - 1 <= n
        checks["rank = 5*2^(3n)"] = payload["span"]["rank"] == payload["span"]["expected_rank"]
        checks["spectrum within eps"] = payload["span"]["within_epsilon"]
    if n <= 3:
        pipe = t5_pipeline(n, rng=np.random.default_rng(args.seed), tol=args.tol)
        payload["pipeline"] = pipe
        for k in ("complete", "idempotent", "orthogonal", "character_consistent", "clifford_commuting"):
            checks[k] = pipe[k]
        checks["dimensions sum"] = pipe["total_dim"] == pipe["hilbert_dim"]

    def figs(stem):
        out = [report.plot_spectrum(T5Span(n).spectrum(), f"{stem}_spectrum.png",
                                    payload["span"]["epsilon"], f"Gram spectrum, t=5, n={n}")]
        if "pipeline" in payload:
            comps = payload["pipeline"]["components"]
            out.append(report.plot_components(comps, f"{stem}_components.png", f"isotypic components, t=5, n={n}"))
            rows = [{"component": k, **v} for k, v in comps.items()]
            out.append(report.write_csv(rows, ["component", "dim", "degree", "multiplicity"],
                                        f"{stem}_components.csv"))
        return out

    return payload, checks, figs


def cmd_decompose_stab(args):
    from .decompose import layer_commutation_suite, stab_subspace_ops

    r, s, d = _rs(args)
    res = stab_subspace_ops(r, s, d, args.n)
    L = res.pop("layers")
    res.pop("P_stab")
    layers = layer_commutation_suite(L)
    payload = {"r": r, "s": s, "d": d, "n": args.n, "compression": res, "layers": layers["layers"],
               "ones_isotropic": layers["ones_isotropic"]}
    checks = {"P idempotent": res["P_idempotent"], "P self-adjoint": res["P_selfadjoint"]}
    checks.update({k: v for k, v in res["commutators"].items()})
    for m, lay in layers["layers"].items():
        for k in ("[C',P1]=0", "C'P1=d^m D", "R-invariant", "Clifford-commuting", "D_next_zero"):
            if k in lay:
                checks[f"layer {m}: {k}"] = lay[k]
    if args.spectra:
        spectra = {}
        ops = {f"C{m}": L.C[m] for m in L.C} | {f"D{m}": L.D[m] for m in L.D if len(L.D[m])}
        for name, op in sorted(ops.items()):
            X, den = op.dense_ints()
            if X is None:  # empty sum: the zero operator
                spectra[name] = [[0.0, d ** ((r + s) * args.n)]]
                continue
            ev = np.linalg.eigvalsh(X.astype(float) / den)
            vals, mult = np.unique(np.round(ev, 9), return_counts=True)
            spectra[name] = [[float(v), int(c)] for v, c in zip(vals, mult)]
        payload["spectra"] = spectra
    return payload, checks, None


def cmd_decompose_real(args):
    from .decompose import real_clifford_suite

    res = real_clifford_suite(args.n, args.t)
    checks = {
        "basis size": res["size"] == res["expected_size"],
        "orthonormal": res["orthonormal"],
        "in C_1": res["in_C1"],
        "Weyl stabilized": res["weyl_stabilized"],
    }
    checks.update({f"commute {k}": v for k, v in res["commute"].items() if isinstance(v, bool)})
    if "weyl_transform" in res:
        checks["Weyl transform"] = res["weyl_transform"]
    return {"n": args.n, "t": args.t, **res}, checks, None


def _plan_for(args):
    from .conjugate import build_plan, load_plan

    if getattr(args, "plan", None):
        return load_plan(args.plan)
    if args.d is None:
        raise UsageError("give --plan FILE or --d")
    return build_plan(args.d, rng=np.random.default_rng(args.seed))


def cmd_conjugate_plan(args):
    from .conjugate import dump_plan

    plan = _plan_for(args)
    payload = {"d": plan.d, "t": plan.t, "m": plan.m, "plan": plan.to_json()}
    enc = plan.encoder_states(1)
    payload["encoder_supports"] = [len(st.support()) for st in enc]
    if args.save:
        dump_plan(plan, args.save)
        payload["saved"] = str(args.save)
    return payload, {}, None


def cmd_conjugate_verify(args):
    from .cliffordrep import parse_word, random_word
    from .conjugate import verify_words

    plan = _plan_for(args)
    n = args.n
    if args.words:
        lines = [ln.strip() for ln in Path(args.words).read_text().splitlines()]
        words = [parse_word(ln, n, plan.d) for ln in lines if ln and not ln.startswith("#")]
    else:
        rng = np.random.default_rng(args.seed)
        words = [random_word(n, plan.d, args.length, rng) for _ in range(args.random)]
    exact = args.backend == "exact"
    res = verify_words(plan, words, exact=exact, tol=args.tol)
    payload = {"d": plan.d, "t": plan.t, "n": n, "backend": args.backend, "words": len(words),
               "results": res, "max_residual": max((r["residual"] for r in res), default=0.0)}
    checks = {"all words conjugate": all(r["ok"] for r in res)}
    return payload, checks, None


def cmd_selftest(args):
    from . import selftest

    suites = selftest.SUITES if args.suite == "all" else {args.suite: selftest.SUITES[args.suite]}
    payload, checks = {}, {}
    for name, fn in suites.items():
        res = fn()
        payload[name] = {"passed": sum(map(bool, res.values())), "total": len(res)}
        checks.update({f"{name}: {k}": v for k, v in res.items()})
    return payload, checks, None


# ---------------------------------------------------------------- plumbing


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--tol", type=float, default=1e-9, help="float tolerance (default 1e-9)")
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--out", type=Path, help="write the JSON result to this file instead of stdout")
    common.add_argument("--report", type=Path, help="JSON report path; figures and CSV are written next to it")
    common.add_argument("--bundle-dir", type=Path, default=Path("."),
                        help="where falsification bundles go (default: current directory)")

    def rsd(p, r=None, s=0, d=2):
        p.add_argument("--r", type=_nonneg, required=r is None, default=r)
        p.add_argument("--s", type=_nonneg, default=s)
        p.add_argument("--d", type=_prime, default=d)

    parser = _Parser(prog="cliffdual", description="Exact checks on Clifford tensor powers, their commutants and codes.",
                     epilog="Exit codes: 0 all checks pass, 1 usage or resource error, 2 falsified check.")
    parser.add_argument("--version", action="version", version=f"cliffdual {__version__}")
    sub = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    g = sub.add_parser("forms", help="quadratic form invariants").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("classify", parents=[common], help="invariants and model class of q_{r,s}")
    rsd(p)
    p.add_argument("--to", type=_nonneg, nargs=2, metavar=("R", "S"), help="also decide q_{r,s} ~ q_{R,S}")
    p.set_defaults(fn=cmd_forms_classify)

    g = sub.add_parser("iso", help="stochastic isotropic subspaces").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("enum", parents=[common], help="enumerate Gr and Gr0 strata")
    rsd(p)
    p.add_argument("--m", type=_nonneg, help="only this dimension")
    p.add_argument("--stratum", choices=("Gr", "Gr0", "both"), default="both")
    p.add_argument("--include-zero", action="store_true", help="keep the zero subspace")
    p.add_argument("--orbits", action="store_true", help="check each stratum is one O_1 orbit")
    p.set_defaults(fn=cmd_iso_enum)

    g = sub.add_parser("group", help="orthogonal stochastic groups").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("enum", parents=[common], help="enumerate O_1(T)")
    rsd(p)
    p.add_argument("--table", action="store_true", help="include the character table")
    p.set_defaults(fn=cmd_group_enum)

    g = sub.add_parser("commutant", help="the operators R(O)P(N)").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("gram", parents=[common], help="exact Gram matrix and rank of S_{r,s}")
    rsd(p)
    p.add_argument("--n", type=_pos, required=True)
    p.set_defaults(fn=cmd_commutant_gram)
    p = g.add_parser("verify", parents=[common], help="commutation of S_{r,s} with the generators")
    rsd(p)
    p.add_argument("--n", type=_pos, default=2)
    p.add_argument("--dimension", action="store_true", help="also run the commutant dimension oracle")
    p.set_defaults(fn=cmd_commutant_verify)

    g = sub.add_parser("decompose", help="decompositions").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("t5", parents=[common], help="five-code span and isotypic components at t = 5")
    p.add_argument("--n", type=_pos, required=True)
    p.set_defaults(fn=cmd_decompose_t5)
    p = g.add_parser("stab", parents=[common], help="layer operators and their group-average compression")
    rsd(p)
    p.add_argument("--n", type=_pos, required=True)
    p.add_argument("--spectra", action="store_true", help="raw spectra of C_m and D_m")
    p.set_defaults(fn=cmd_decompose_stab)
    p = g.add_parser("real", parents=[common], help="real-Clifford Weyl basis suite")
    p.add_argument("--n", type=_pos, required=True)
    p.add_argument("--t", type=_pos, required=True)
    p.set_defaults(fn=cmd_decompose_real)

    g = sub.add_parser("conjugate", help="complex conjugation protocol").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("plan", parents=[common], help="build the code and encoder")
    p.add_argument("--d", type=_prime)
    p.add_argument("--plan", type=Path, help="load an existing plan")
    p.add_argument("--save", type=Path, help="write the plan JSON here")
    p.set_defaults(fn=cmd_conjugate_plan)
    p = g.add_parser("verify", parents=[common], help="check encoder^dag Delta(U) encoder = phase conj(U)")
    p.add_argument("--d", type=_prime)
    p.add_argument("--plan", type=Path)
    p.add_argument("--n", type=_pos, default=1)
    p.add_argument("--words", type=Path, help="file with one Clifford word per line")
    p.add_argument("--random", type=_pos, default=10, help="number of random words (default 10)")
    p.add_argument("--length", type=_pos, default=20)
    p.add_argument("--backend", choices=("exact", "float"), default="exact")
    p.set_defaults(fn=cmd_conjugate_verify)

    p = sub.add_parser("selftest", parents=[common], help="fast internal checks")
    from .selftest import SUITES

    p.add_argument("--suite", choices=sorted(SUITES) + ["all"], default="all")
    p.set_defaults(fn=cmd_selftest, cmd=None)
    return parser


def _config(args) -> dict:
    skip = {"fn", "out", "report", "bundle_dir", "format"}
    vals = {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(vars(args).items()) if k not in skip}
    return {"tool": "cliffdual", "version": __version__, "args": vals, "limits": dict(LIMITS)}


def _bundle(args, config, payload, checks, error=None) -> Path:
    doc = {"config": config, "checks": checks, "result": payload}
    if error:
        doc["error"] = error
    text = report.dumps(doc)
    name = "-".join(x for x in (args.group, args.cmd) if x)
    path = Path(args.bundle_dir) / f"falsification-{name}-{hashlib.sha256(text.encode()).hexdigest()[:10]}.json"
    return report.write_json(doc, path)


def _emit(args, doc):
    if args.format == "table":
        text = _table_view(args, doc)
    else:
        text = report.dumps(doc)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _table_view(args, doc) -> str:
    res = doc["result"]
    head = [f"cliffdual {doc['config']['version']}", " ".join(x for x in (args.group, args.cmd) if x)]
    head += [f"{k}={res[k]}" for k in ("r", "s", "d", "t", "n", "m") if k in res]
    parts = ["  ".join(head) + "\n"]
    if doc["checks"]:
        rows = [{"check": k, "ok": v} for k, v in doc["checks"].items()]
        parts.append(report.format_table(rows, ["check", "ok"]))
    tables = {k: v for k, v in res.items() if isinstance(v, list) and v and all(isinstance(x, dict) for x in v)}
    scalars = report.flatten({k: v for k, v in res.items() if k not in tables})
    if scalars:
        parts.append(report.format_table(scalars, ["key", "value"]))
    for name, rows in tables.items():
        cols = list(dict.fromkeys(c for row in rows for c in row))
        parts.append(f"{name}:\n" + report.format_table(rows, cols))
    return "\n".join(parts)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # usage errors, --help and --version
        return int(e.code or 0)
    config = _config(args)
    t0 = time.perf_counter()
    try:
        payload, checks, figs = args.fn(args)
    except (UsageError, ResourceLimitError, ValueError) as e:
        sys.stderr.write(f"cliffdual: error: {e}\n")
        return EXIT_USAGE
    except FalsificationError as e:
        path = _bundle(args, config, {}, {}, error=str(e))
        sys.stderr.write(f"cliffdual: FALSIFIED: {e}\nreproduction bundle: {path}\n")
        return EXIT_FALSIFIED
    doc = {"config": config, "checks": checks, "result": payload}
    if args.report:
        report.write_json(doc, args.report)
        if figs is not None:
            stem = str(Path(args.report).with_suffix(""))
            for p in figs(stem):
                sys.stderr.write(f"wrote {p}\n")
    _emit(args, doc)
    sys.stderr.write(f"elapsed {time.perf_counter() - t0:.2f}s\n")
    if not all(checks.values()):
        path = _bundle(args, config, payload, checks)
        bad = [k for k, v in checks.items() if not v]
        sys.stderr.write(f"cliffdual: FALSIFIED: {', '.join(bad)}\nreproduction bundle: {path}\n")
        return EXIT_FALSIFIED
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
