"""Command-line front end.

Every subcommand except ``preset`` takes a scenario file, or ``preset:NAME``
for a shipped preset.  Exit status is 0 when every record passes, 1 when an
identity fails (the report is still written) and 2 for malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from . import __version__
from .bv import build_pi, build_theta, bv_variations, compare_variations, graded_target, master_residual, pi_poisson_residual
from .cohomology import CapTooLarge, CochainSpace, Defect, apply_delta_bar, closure_residual_explicit, solve_cohomology
from .covariance import covariance_report, glx_transition_check
from .galgebra import AlgebraError, format_poly
from .paction import build_double_complex, check_complex, validate_sigma
from .report import IdentityReport
from .scenarios import PRESETS, Scenario, ScenarioError, load_scenario, preset, save_scenario

REPORT_SCHEMA = "lapsm-report/1"

COMMANDS = ("check", "master", "variations", "complex", "cocycles", "covariance")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lapsm", description="Exact identity checks for Lie algebroid Poisson sigma model targets.")
    p.add_argument("--version", action="version", version=f"lapsm {__version__}")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    common = _Parser(add_help=False)
    common.add_argument("scenario", help="scenario JSON file or preset:NAME")
    common.add_argument("--json", metavar="PATH", help="write the JSON report to PATH ('-' for stdout)")
    common.add_argument("--sample-points", type=int, default=5, metavar="N",
                        help="sample points for pointwise rank checks (default 5)")
    common.add_argument("--seed", type=int, default=0, metavar="S", help="seed for sample points")
    common.add_argument("--threads", type=int, default=1, metavar="T",
                        help="run independent check groups concurrently")
    sub.add_parser("check", parents=[common], help="algebroid, action, Poisson and moment identities")
    sub.add_parser("master", parents=[common], help="classical master equation on the target")
    sub.add_parser("variations", parents=[common], help="Hamiltonian field against the closed forms")
    cx = sub.add_parser("complex", parents=[common], help="double complex commutators")
    cx.add_argument("--cap", type=int, default=3, help="polynomial cap for kernel generators")
    co = sub.add_parser("cocycles", parents=[common], help="solve for cocycles by exact linear algebra")
    co.add_argument("--degree", type=int, required=True, metavar="K")
    co.add_argument("--cap", type=int, required=True, metavar="D")
    sub.add_parser("covariance", parents=[common], help="change-of-trivialization laws")
    pr = sub.add_parser("preset", help="print a shipped preset as a scenario document")
    pr.add_argument("name", help=", ".join(sorted(PRESETS)))
    pr.add_argument("--output", "-o", metavar="PATH", help="write to PATH instead of stdout")
    return p


def load_input(source: str) -> Scenario:
    if source.startswith("preset:"):
        return preset(source[len("preset:"):])
    try:
        with open(source, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ScenarioError(f"{source}: {exc.strerror}") from None
    return load_scenario(text)


# ---------------------------------------------------------------------------
# check groups: (group name, zero-argument callable returning a report)

def _groups_check(sc, args):
    S = sc.sigma
    return [("identities", lambda: validate_sigma(S, sample_count=args.sample_points, seed=args.seed))]


def _groups_master(sc, args):
    S = sc.sigma

    def master():
        G = graded_target(S)
        theta = build_theta(S, G)
        rep = IdentityReport()
        rep.add("master_equation", (), master_residual(theta, G))
        rep.add("pi_poisson", (), pi_poisson_residual(build_pi(S, G)))
        Q = bv_variations(theta, G)
        sq = Q.commutator(Q)
        for g in G.gens.names:
            rep.add("q_nilpotent", (g,), sq.component(g))
        return rep

    return [("master", master)]


def _groups_variations(sc, args):
    return [("variations", lambda: compare_variations(sc.sigma))]


def _groups_complex(sc, args):
    return [("double_complex", lambda: check_complex(build_double_complex(sc.sigma), cap=args.cap))]


def _groups_covariance(sc, args):
    S = sc.sigma
    groups = []
    for tr in sc.trivializations:
        if tr.x_gens is not None:
            groups.append((f"covariance:{tr.name}", lambda tr=tr: covariance_report(S, tr)))
    if sc.glx is not None:
        for a, b in sc.glx.pairs:
            t1, t2 = sc.trivialization(a), sc.trivialization(b)
            groups.append((f"glx:{a},{b}", lambda t1=t1, t2=t2: glx_transition_check(t1, t2, sc.glx.connection)))
    return groups


def _groups_cocycles(sc, args, results):
    def run():
        sp = CochainSpace(sc.sigma)
        res = solve_cohomology(sp, args.degree, args.cap)
        results["cocycles"] = res.as_dict()
        rep = IdentityReport()
        for n, c in enumerate(res.cocycles):
            img = apply_delta_bar(c, sp)
            if isinstance(img, Defect):
                rep.add("cocycle_closed", (n,), ok=False, detail=f"defect: {img.reason}")
            else:
                rep.add("cocycle_closed", (n,), ok=img.is_zero(),
                        detail="" if img.is_zero() else "delta-bar image is nonzero")
            explicit = closure_residual_explicit(c, sp)
            rep.add("cocycle_explicit", (n,), ok=explicit.passed,
                    detail="" if explicit.passed else explicit.summary())
        if not res.cocycles:
            rep.add("cocycle_closed", (), ok=True, detail="no cocycles within the cap")
        return rep

    return [("cocycles", run)]


def _expectation(sc: Scenario, command: str, verdict: str) -> IdentityReport | None:
    want = sc.expect.get(command)
    if want is None:
        return None
    rep = IdentityReport()
    rep.add("expectation", (command,), ok=(want == verdict),
            detail=f"expected {want}, computed {verdict}")
    return rep


def _record_json(rec) -> dict:
    return {
        "id": rec.identity,
        "instance": [str(i) for i in rec.instance],
        "verdict": "pass" if rec.ok else "fail",
        "residual": None if rec.residual is None else format_poly(rec.residual),
        "detail": rec.detail,
    }


def run_checks(sc: Scenario, args) -> tuple[dict, dict]:
    results: dict = {}
    if args.command == "cocycles":
        groups = _groups_cocycles(sc, args, results)
    else:
        groups = {
            "check": _groups_check,
            "master": _groups_master,
            "variations": _groups_variations,
            "complex": _groups_complex,
            "covariance": _groups_covariance,
        }[args.command](sc, args)

    def timed(fn):
        t0 = time.perf_counter()
        rep = fn()
        return rep, time.perf_counter() - t0

    if args.threads > 1 and len(groups) > 1:
        with ThreadPoolExecutor(max_workers=args.threads) as pool:
            outs = list(pool.map(lambda g: timed(g[1]), groups))
    else:
        outs = [timed(fn) for _, fn in groups]
    checks = []
    timing = {}
    all_ok = True
    for (name, _), (rep, dt) in zip(groups, outs):
        checks.append({"check": name, "verdict": rep.verdict, "records": [_record_json(r) for r in rep]})
        timing[name] = round(dt, 6)
        all_ok = all_ok and rep.passed
    exp = _expectation(sc, args.command, "pass" if all_ok else "fail")
    if exp is not None:
        checks.append({"check": "expectation", "verdict": exp.verdict,
                       "records": [_record_json(r) for r in exp]})
        # a matching expectation makes an intended failure a pass
        all_ok = exp.passed
    report = {
        "schema": REPORT_SCHEMA,
        "tool": {"name": "lapsm", "version": __version__},
        "command": args.command,
        "scenario": sc.name,
        "options": _options(args),
        "status": "pass" if all_ok else "fail",
        "checks": checks,
    }
    if results:
        report["results"] = results
    return report, timing


def _options(args) -> dict:
    out = {"sample_points": args.sample_points, "seed": args.seed}
    for key in ("cap", "degree"):
        if hasattr(args, key):
            out[key] = getattr(args, key)
    return out


def render_text(report: dict) -> str:
    lines = [f"{report['command']} {report['scenario']}: {report['status']}"]
    for chk in report["checks"]:
        recs = chk["records"]
        bad = [r for r in recs if r["verdict"] == "fail"]
        lines.append(f"  {chk['check']}: {chk['verdict']} ({len(recs)} records, {len(bad)} failing)")
        for r in bad:
            inst = ",".join(r["instance"])
            label = f"{r['id']}[{inst}]" if inst else r["id"]
            msg = r["residual"] if r["residual"] is not None else r["detail"]
            lines.append(f"    FAIL {label}: {msg}")
    res = report.get("results", {}).get("cocycles")
    if res:
        lines.append(
            f"  degree {res['degree']} cap {res['cap']}: {res['cocycle_dimension']} cocycles, "
            f"{res['coboundary_dimension']} coboundaries, quotient dimension {res['quotient_dimension']}"
        )
    return "\n".join(lines)


def dump_report(report: dict, timing: dict) -> str:
    doc = dict(report)
    doc["timing"] = timing
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage())
    except UsageError as exc:
        sys.stderr.write(str(exc))
        return 2
    if args.command == "preset":
        try:
            text = save_scenario(preset(args.name))
        except ScenarioError as exc:
            sys.stderr.write(f"lapsm: {exc}\n")
            return 2
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return 0
    if args.sample_points < 1 or args.threads < 1:
        sys.stderr.write("lapsm: --sample-points and --threads must be positive\n")
        return 2
    try:
        sc = load_input(args.scenario)
        report, timing = run_checks(sc, args)
    except (ScenarioError, CapTooLarge) as exc:
        sys.stderr.write(f"lapsm: {exc}\n")
        return 2
    except AlgebraError as exc:
        sys.stderr.write(f"lapsm: malformed input: {exc}\n")
        return 2
    print(render_text(report))
    if args.json:
        text = dump_report(report, timing)
        if args.json == "-":
            sys.stdout.write(text)
        else:
            with open(args.json, "w", encoding="utf-8") as fh:
                fh.write(text)
    return 0 if report["status"] == "pass" else 1


if __name__ == "__main__":
    sys.exit(main())
