"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 validation error,
4 a verification returned false.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

from . import catalog, charts, flows, invariants, lattice, laurent, weyl
from .dsl import format_map, parse_map
from .errors import Painleve4DError, ParseError, ValidationError
from .maps import map_equal, symbolic_degree_tables

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_FAILED = 0, 2, 3, 4


class _Out:
    """Collects text lines or a JSON document for one run."""

    def __init__(self, as_json: bool):
        self.as_json = as_json
        self.lines: list[str] = []
        self.doc: dict = {}

    def line(self, text: str = ""):
        self.lines.append(text)

    def emit(self, stream):
        if self.as_json:
            stream.write(json.dumps(self.doc, sort_keys=True, indent=2) + "\n")
        elif self.lines:
            stream.write("\n".join(self.lines) + "\n")


def _default_jobs() -> int:
    raw = os.environ.get("PAINLEVE4D_JOBS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"PAINLEVE4D_JOBS must be an integer, got {raw!r}") from None
    if n < 1:
        raise ValidationError("PAINLEVE4D_JOBS must be at least 1")
    return n


def _pmap(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _load_map(args):
    if getattr(args, "map_file", None):
        with open(args.map_file, encoding="utf-8") as fh:
            return parse_map(fh.read())
    return catalog.get_map(args.map)


# ---------------------------------------------------------------- confine


def _check_one(item):
    case, index, window = item
    return laurent.check_pattern(laurent.PATTERNS[case][index], window)


def _step_text(i, s: laurent.OrbitStep) -> str:
    lab = f"C{s.blowup_label}" if s.blowup_label else "-"
    cen = ",".join(f"C{c}" for c in s.centres) or "-"
    return f"  step {i}: orders {s.leading_orders} dim {s.component_dimension} label {lab} centres {cen}"


def cmd_confine(args, out: _Out) -> int:
    if args.all:
        if not args.case:
            raise ValidationError("--all needs --case")
        pats = laurent.PATTERNS[args.case]
        checks = _pmap(_check_one, [(args.case, i, args.window) for i in range(len(pats))], args.jobs)
        failed = sum(not c.ok for c in checks)
        out.doc = {"case": args.case, "patterns": []}
        for c in checks:
            rep = c.report
            out.line(f"{'PASS' if c.ok else 'FAIL'} {c.pattern.seed:<22} {rep.verdict_text:<12} labels {list(rep.labels())}")
            out.doc["patterns"].append({**rep.to_json(), "expected": c.pattern.verdict, "ok": c.ok})
        return EXIT_FAILED if failed else EXIT_OK
    if not args.seed:
        raise ValidationError("--seed is required (or use --all)")
    f = _load_map(args)
    seed = laurent.SeedSpec.parse(args.seed, args.depth)
    rep = laurent.push_orbit(f, seed, max_steps=args.max_steps, window=args.window, case=args.case,
                             rng_seed=args.rng_seed, mode=args.mode)
    out.doc = rep.to_json()
    out.doc["recovered_constants"] = rep.recovered_constants
    out.line(f"{f.name}, seed {rep.seed}: {rep.verdict_text}")
    for i, s in enumerate(rep.steps):
        out.line(_step_text(i, s))
    if rep.recovered_constants:
        out.line(f"  recovered constants: {', '.join(rep.recovered_constants)}")
    for n in rep.notes:
        out.line(f"  note: {n}")
    if args.expect and rep.verdict_text != args.expect:
        out.line(f"  expected {args.expect}")
        return EXIT_FAILED
    return EXIT_OK


# ---------------------------------------------------------------- degrees


def cmd_degrees(args, out: _Out) -> int:
    act = lattice.builtin_action(args.case)
    tables = [lattice.degree_table(act, n) for n in range(1, args.iters + 1)]
    out.doc = {"case": args.case, "predicted": tables}
    out.line(f"{args.case}: degree of each image coordinate (rows) in each initial variable (columns)")
    for n, t in enumerate(tables, start=1):
        out.line(f"  n={n:<3} " + "  ".join(" ".join(f"{d:3d}" for d in row) for row in t))
    seq = lattice.degree_sequence(act, max(args.iters, 3), "q1", "q1")
    d2 = [seq[i + 2] - 2 * seq[i + 1] + seq[i] for i in range(len(seq) - 2)]
    out.line(f"  second differences (q1 in q1): {d2}")
    out.doc["second_differences_q1_q1"] = d2
    status = EXIT_OK
    if args.cross_check:
        sym = symbolic_degree_tables(catalog.get_map(args.case), args.cross_check)
        pred = [lattice.degree_table(act, n) for n in range(1, args.cross_check + 1)]
        match = [s == p for s, p in zip(sym, pred)]
        out.doc["cross_check"] = {"n": args.cross_check, "match": match}
        out.line(f"  symbolic cross-check n=1..{args.cross_check}: " + ("match" if all(match) else f"MISMATCH at n={match.index(False) + 1}"))
        if not all(match):
            status = EXIT_FAILED
    return status


# ---------------------------------------------------------------- lattice


def cmd_lattice(args, out: _Out) -> int:
    act = lattice.builtin_action(args.case)
    iso = act.is_isometry()
    js = lattice.jordan_signature(act)
    try:
        perm = lattice.anticanonical_check(args.case, act)
        perm_err = ""
    except Painleve4DError as exc:
        perm, perm_err = None, str(exc)
    can = lattice.canonical_class(args.case)
    out.doc = {
        "case": args.case, "isometry": iso, "det": act.det(), "jordan": js.describe(),
        "single_3x3_block_at_1": js.single_3x3_at_one(), "anticanonical_permutation": perm,
        "canonical_forms_consistent": can.consistent,
    }
    out.line(f"{args.case}: isometry {iso}, det {act.det()}")
    out.line(f"  {js.describe()}")
    out.line(f"  unipotent part has a single 3x3 block: {js.single_3x3_at_one()}")
    out.line(f"  anticanonical components: " + (" ".join(f"D{i}->D{j}" for i, j in enumerate(perm, 1)) if perm else perm_err))
    out.line(f"  symplectic form classes sum to K: {can.consistent}")
    if args.table:
        out.doc["table"] = act.table()
        for k, v in act.table():
            out.line(f"  {k} -> {v}")
    return EXIT_OK if iso and perm and can.consistent else EXIT_FAILED


# ---------------------------------------------------------------- weyl


def _word_check(item):
    case, word = item
    el = weyl.realize_word(case, word)
    return el.lattice_action.is_isometry() and el.is_cremona_ab()


def cmd_weyl(args, out: _Out) -> int:
    case = args.case
    run_all = not (args.check_relations or args.check_phi or args.check_translation or args.twin or args.random_words)
    ok = True
    out.doc = {"case": case}
    if run_all or args.check_relations:
        rep = weyl.check_coxeter_relations(case)
        bad = [r for r in rep.results if not r.ok]
        out.doc["relations"] = {"count": len(rep.results), "failed": [{"name": r.name, "detail": r.detail} for r in bad]}
        out.line(f"relations: {len(rep.results) - len(bad)}/{len(rep.results)} hold")
        for r in bad:
            out.line(f"  FAIL {r.name}: {r.detail}")
        ok &= rep.ok
    if run_all or args.check_phi:
        r = weyl.check_phi_decomposition(case)
        out.doc["phi_decomposition"] = {"ok": r.ok, "birational": r.birational_ok, "lattice": r.lattice_ok, "diff": r.diff}
        out.line(f"mapping as a word in the generators: {'holds' if r.ok else 'FAILS'}")
        ok &= r.ok
    if run_all or args.check_translation:
        r = weyl.check_translation(case)
        out.doc["translation"] = {"ok": r.ok, "shifts": r.shifts}
        out.line(f"power {weyl.TRANSLATION_POWER[case]} acts as a translation: {r.ok} shifts {r.shifts}")
        ok &= r.ok
    if run_all or args.twin:
        r = weyl.twin_root_check(case)
        out.doc["twin"] = {"ok": r.ok, "cartan": r.cartan_ok, "isometries": r.isometries_ok,
                           "decomposition_fixed": r.decomposition_fixed, "printed_basis_cartan_ok": r.printed_cartan_ok,
                           "non_effective": [list(x) for x in r.non_effective]}
        out.line(f"twin {r.twin_type} roots on the {case} variety: cartan {r.cartan_ok}, isometries {r.isometries_ok}, "
                 f"decomposition fixed {r.decomposition_fixed}, non-effective images {len(r.non_effective)}")
        for w, b, img in r.non_effective[:6]:
            out.line(f"  {w}({b}) = {img}")
        ok &= r.ok
    if args.random_words:
        words = weyl.random_words(case, args.random_words, args.max_len, args.rng_seed)
        res = _pmap(_word_check, [(case, w) for w in words], args.jobs)
        out.doc["random_words"] = {"count": len(words), "cremona": res}
        out.line(f"random words: {sum(res)}/{len(res)} give Cremona isometries")
        ok &= all(res)
    return EXIT_OK if ok else EXIT_FAILED


# ---------------------------------------------------------------- invariants and lax


def _residual_doc(res: dict) -> dict:
    return {k: str(v) for k, v in res.items()}


EXPECTED_OUTCOME = {"a2a2": ("swapped", "symmetric"), "a5": ("fixed",)}


def cmd_invariants(args, out: _Out) -> int:
    cases = [args.case] if args.case else list(catalog.CASES)
    ok = True
    out.doc = {}
    for case in cases:
        I1, I2 = invariants.conserved_quantities(case)
        f = catalog.get_map(case)
        br = invariants.poisson_bracket(I1.polynomial, I2.polynomial)
        outcome = invariants.invariance_outcome(case)
        sym = invariants.check_symplectic(f)
        trips = invariants.chart_round_trips((case,))
        trips_ok = all(a and b for a, b in trips.values())
        d = {"bracket_zero": br.is_zero(), "invariance": outcome, "symplectic": sym.ok,
             "det_jacobian_one": sym.volume_preserving, "chart_round_trips": trips_ok}
        if outcome == "none":
            d["residuals"] = _residual_doc(invariants.check_invariance(f, (I1, I2), "fixed").residuals)
        out.line(f"{case}: {{I1,I2}} = 0 {br.is_zero()}; invariance {outcome}; symplectic {sym.ok}; det J = 1 {sym.volume_preserving}; "
                 f"chart round trips {sum(a and b for a, b in trips.values())}/{len(trips)}")
        good = br.is_zero() and outcome in EXPECTED_OUTCOME[case] and sym.ok and sym.volume_preserving and trips_ok
        if case == "a5":
            tr = invariants.u4_to_u8_check()
            d["u4_to_u8"] = {"matches": tr.matches, "exceptional_divisor_maps_into_E8": tr.divisor_ok,
                             "images": [str(e) for e in tr.images]}
            out.line(f"  U4 -> U8 transfer matches display {tr.matches}; E4 -> E8 {tr.divisor_ok}")
            good &= tr.ok
        if args.pencil:
            coeffs = _parse_pencil(case, args.pencil)
            m = invariants.anticanonical_pencil(case, coeffs)
            d["pencil"] = {"member": m.describe(), "multidegree": list(m.multidegree), "degenerate": m.degenerate,
                           "preserved": invariants.pencil_preserved(case, coeffs)}
            out.line(f"  {m.describe()}")
        out.doc[case] = d
        ok &= good
    return EXIT_OK if ok else EXIT_FAILED


def _parse_pencil(case: str, text: str):
    try:
        if case == "a2a2":
            a, b = text.split(";")
            return tuple(int(x) for x in a.split(",")), tuple(int(x) for x in b.split(","))
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise ValidationError("pencil coefficients: 'a0,a1;b0,b1' for a2a2, 'a0,a1,a2' for a5") from None


def cmd_lax(args, out: _Out) -> int:
    pair = invariants.lax_pair({"a": "a + 1"} if args.perturb else None)
    R = invariants.lax_residual(pair)
    zero = invariants.is_zero_matrix(R)
    spec = invariants.lax_spectral_check()
    nonzero = {f"{i},{j}": str(x) for i, row in enumerate(R) for j, x in enumerate(row) if not x.is_zero()}
    out.doc = {"residual_zero": zero, "nonzero_entries": nonzero, "perturbed": args.perturb,
               "spectral": {f"x^{k[0]} h^{k[1]}": v for k, v in spec.matches.items()},
               "all_coefficients_invariant": spec.all_invariant}
    out.line(f"Lax compatibility residual is zero: {zero}" + (" (M perturbed)" if args.perturb else ""))
    for k, v in list(nonzero.items())[:6]:
        out.line(f"  R[{k}] = {v}")
    for (i, j), (name, sign) in invariants.LAX_GOLDEN.items():
        out.line(f"  coefficient of x^{i} h^{j} in det(x - L) equals {'-' if sign < 0 else ''}({name}): {spec.matches[(i, j)]}")
    out.line(f"  every coefficient is invariant: {spec.all_invariant}")
    if args.perturb:
        return EXIT_OK if not zero else EXIT_FAILED
    return EXIT_OK if zero and spec.ok else EXIT_FAILED


# ---------------------------------------------------------------- flow

DEFAULT_FLOW_PARAMS = {
    "a2a2": {"a": 0.7, "b": 0.3},
    "a5": {"a": 0.7, "b1": 0.3, "b2": -0.4},
}
DEFAULT_POINT = (0.3, 0.2, -0.25, 0.4)


def _parse_kv(text: str) -> dict[str, float]:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(","))):
        if "=" not in part:
            raise ValidationError(f"parameter {part!r} is not of the form name=value")
        k, v = part.split("=", 1)
        out[k.strip()] = float(v)
    return out


def cmd_flow(args, out: _Out) -> int:
    if args.structure:
        ny = flows.noumi_yamada_check()
        cr = flows.chart_regularity_check()
        out.doc = {"noumi_yamada_zero": ny.ok, "chart_U4_regular": cr.ok,
                   "chart_U4_leftovers": [str(x) for x in cr.leftovers]}
        out.line(f"A5 system in f-variables: residuals zero {ny.ok}, sum rule {ny.sum_consistent}")
        out.line(f"A5 flow in chart U4: only denominator factor v2*u4 - 1: {cr.ok}")
        return EXIT_OK if ny.ok and cr.ok else EXIT_FAILED
    sys_ = flows.hamiltonian_system(args.case, args.hamiltonian)
    params = dict(DEFAULT_FLOW_PARAMS[args.case]) if sys_.autonomous else {p: 0.1 * (i + 1) for i, p in enumerate(sys_.params)}
    params.update(_parse_kv(args.params or ""))
    point = tuple(float(x) for x in args.point.split(",")) if args.point else DEFAULT_POINT
    state = flows.FlowState(0.0, point, params)
    tr = flows.integrate(sys_, state, args.t_end, args.step)
    drifts = {k: tr.drift(k) for k in tr.monitors}
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", *catalog.PHASE, *tr.monitors])
        for row in tr.rows()[:: max(1, args.every)]:
            w.writerow([f"{x:.12g}" for x in row])
        out.lines = [buf.getvalue().rstrip("\n")]
        out.as_json = False
    else:
        out.doc = {"case": args.case, "hamiltonian": args.hamiltonian, "steps": len(tr.times) - 1,
                   "final": list(tr.states[-1]), "drift": drifts, "singular": tr.singular, "message": tr.message}
        out.line(f"{args.case} flow of {args.hamiltonian}: {len(tr.times) - 1} steps to t={tr.times[-1]:g}")
        out.line(f"  final point {tuple(round(x, 10) for x in tr.states[-1])}")
        for k, v in drifts.items():
            out.line(f"  drift of {k}: {v:.3e}")
        if tr.singular:
            out.line(f"  stopped: {tr.message}")
    return EXIT_FAILED if tr.singular else EXIT_OK


# ---------------------------------------------------------------- parse


def cmd_parse(args, out: _Out) -> int:
    src = sys.stdin.read() if args.file == "-" else open(args.file, encoding="utf-8").read()
    m = parse_map(src)
    out.doc = {"name": m.name, "params": list(m.params), "canonical": format_map(m)}
    out.line(format_map(m))
    if args.compare:
        ref = catalog.get_map(args.compare)
        same = ref.registry == m.registry and map_equal(m, ref)
        out.doc["equal_to"] = {args.compare: same}
        out.line(f"# equal to {args.compare}: {same}")
        return EXIT_OK if same else EXIT_FAILED
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="painleve4d", description="Exact checks for two four-dimensional discrete Painleve mappings.")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def common(sp):
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.add_argument("--rng-seed", type=int, default=0, help="seed for every random choice (default 0)")
        sp.add_argument("--jobs", type=int, default=None, help="worker processes (default $PAINLEVE4D_JOBS or 1)")

    cases = list(catalog.CASES)

    s = sub.add_parser("confine", help="singularity confinement scan on Laurent series in eps",
                       description="Iterate a map on a singular family of Laurent series and classify the orbit "
                                   "as confined(n), cyclic(n) or open(max), labelling blow-up centres.")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--map", default="a2a2", help="built-in map key (default a2a2)")
    g.add_argument("--map-file", help="map in the DSL")
    s.add_argument("--case", choices=cases, help="case whose centres label the steps (detected for built-in maps)")
    s.add_argument("--seed", help="e.g. 'q1=eps' or 'q1=1/eps,p1=eps'")
    s.add_argument("--window", type=int, default=laurent.DEFAULT_WINDOW, help="series truncation window (default 8)")
    s.add_argument("--max-steps", type=int, default=12)
    s.add_argument("--depth", type=int, default=1, help="free lower-order terms per singular coordinate")
    s.add_argument("--mode", choices=laurent.MODES, default="jet", help="coefficient domain (default jet)")
    s.add_argument("--expect", help="exit 4 unless the verdict equals this, e.g. confined(4)")
    s.add_argument("--all", action="store_true", help="run and compare every catalogued pattern of --case")
    common(s)
    s.set_defaults(run=cmd_confine)

    s = sub.add_parser("degrees", help="degree growth predicted by the lattice action",
                       description="Degrees of iterates from powers of the pull-back on the Neron-Severi lattice, "
                                   "optionally cross-checked against exact symbolic iteration.")
    s.add_argument("--case", choices=cases, required=True)
    s.add_argument("--iters", type=int, default=8)
    s.add_argument("--cross-check", type=int, default=0, metavar="N", help="compare with symbolic iterates for n <= N")
    common(s)
    s.set_defaults(run=cmd_degrees)

    s = sub.add_parser("lattice", help="Neron-Severi action: isometry, Jordan form, anticanonical components",
                       description="Push-forward action of the mapping on the rank-20 lattice.")
    s.add_argument("--case", choices=cases, required=True)
    s.add_argument("--table", action="store_true", help="print the image of every basis class")
    common(s)
    s.set_defaults(run=cmd_lattice)

    s = sub.add_parser("weyl", help="affine Weyl group generators, relations and translations",
                       description="Coxeter relations, the mapping as a word in the generators, the translation "
                                   "power, and twin root systems; with no check flags all but --random-words run.")
    s.add_argument("--case", choices=cases, required=True)
    s.add_argument("--check-relations", action="store_true")
    s.add_argument("--check-phi", action="store_true", help="the non-autonomous mapping as a word in the generators")
    s.add_argument("--check-translation", action="store_true")
    s.add_argument("--twin", action="store_true", help="roots of the other type on this variety")
    s.add_argument("--random-words", type=int, default=0, metavar="N")
    s.add_argument("--max-len", type=int, default=6)
    common(s)
    s.set_defaults(run=cmd_weyl)

    s = sub.add_parser("invariants", help="conserved quantities, Poisson bracket, symplectic form, chart checks",
                       description="Exact identities for the conserved quantities and the blow-up charts.")
    s.add_argument("--case", choices=cases, help="default: both")
    s.add_argument("--pencil", help="anticanonical member: 'a0,a1;b0,b1' (a2a2) or 'a0,a1,a2' (a5)")
    common(s)
    s.set_defaults(run=cmd_invariants)

    s = sub.add_parser("lax", help="Lax pair compatibility of the first mapping",
                       description="Residual of the Lax compatibility condition and the conserved quantities "
                                   "in the characteristic polynomial of L.")
    s.add_argument("--perturb", action="store_true", help="negative control: shift a inside M only")
    common(s)
    s.set_defaults(run=cmd_lax)

    s = sub.add_parser("flow", help="continuous Hamiltonian flows of the conserved quantities",
                       description="RK4 integration of the Hamiltonian flows; --structure runs the symbolic "
                                   "checks of the non-autonomous A5 system.")
    s.add_argument("--case", choices=cases, default="a2a2")
    s.add_argument("--hamiltonian", default="I1", choices=["I1", "I2", "I1NA", "I2NA"])
    s.add_argument("--t-end", type=float, default=1.0)
    s.add_argument("--step", type=float, default=1e-3)
    s.add_argument("--point", help="q1,p1,q2,p2 (default 0.3,0.2,-0.25,0.4)")
    s.add_argument("--params", help="e.g. 'a=0.7,b=0.3'")
    s.add_argument("--format", choices=["text", "csv"], default="text")
    s.add_argument("--every", type=int, default=1, help="CSV: keep every k-th row")
    s.add_argument("--structure", action="store_true")
    common(s)
    s.set_defaults(run=cmd_flow)

    s = sub.add_parser("parse", help="parse a map written in the DSL",
                       description="Parse and validate a map in the DSL and print it in canonical form.")
    s.add_argument("file", help="DSL file, or - for standard input")
    s.add_argument("--compare", metavar="KEY", help="exit 4 unless equal to this built-in map")
    common(s)
    s.set_defaults(run=cmd_parse)
    return p


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    out = _Out(args.json)
    try:
        if args.jobs is None:
            args.jobs = _default_jobs()
        elif args.jobs < 1:
            raise ValidationError("--jobs must be at least 1")
        code = args.run(args, out)
    except ParseError as exc:
        stderr.write(f"parse error: {exc}\n")
        return EXIT_USAGE
    except (Painleve4DError, OSError) as exc:
        stderr.write(f"error: {exc}\n")
        return EXIT_INVALID
    out.emit(stdout)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
