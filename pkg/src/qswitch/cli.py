"""Command-line front end: ``qswitch {invariant,protocol,simulate-switch,verify,perm}``.

Exit codes: 0 success, 1 verification failure, 2 input or validation error,
3 size-cap error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import re
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone

from qswitch import __version__, perm, protocol
from qswitch.errors import SizeCapError, ValidationError
from qswitch.invariants import (
    StateTuple,
    bargmann_product_trace,
    evaluate_all,
    is_pure,
    random_tuple,
)
from qswitch.kernels import BACKEND
from qswitch.linalg import (
    SIZE_CAP,
    TOL_DERIVED,
    TOL_DIRECT,
    make_rng,
    random_state,
    random_unitary,
)
from qswitch.statefile import complex_json, load_states, load_unitaries

log = logging.getLogger("qswitch")

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_CAP = 0, 1, 2, 3
TOL_DET = 1e-9


@dataclass
class Report:
    """JSON document plus a flat table used for the CSV and human views."""

    command: str
    doc: dict = field(default_factory=dict)
    table: list = field(default_factory=list)
    ok: bool = True

    def finish(self, args):
        head = {"tool": "qswitch", "version": __version__, "command": self.command, "backend": BACKEND}
        head["seed"] = getattr(args, "seed", None)
        if not args.deterministic:
            head["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        head.update(self.doc)
        head["ok"] = self.ok
        return head


def tagged(value, method, tolerance):
    return {"method": method, "value": complex_json(value), "tolerance": tolerance}


def tagged_real(value, method, tolerance):
    return {"method": method, "value": float(value), "tolerance": tolerance}


# --- inputs -----------------------------------------------------------------


def _states(args) -> StateTuple:
    if (args.states is None) == (args.random is None):
        raise ValidationError("give exactly one of --states PATH or --random COUNT")
    if args.states is not None:
        t = load_states(args.states)
        if args.n is not None and args.n != t.n:
            raise ValidationError(f"--n {args.n} but the state file holds {t.n} states")
        return t
    if args.random < 1:
        raise ValidationError("--random needs a positive count")
    return random_tuple(make_rng(args.seed), args.random, args.dim, args.purity, args.rank)


def _state_config(args, t):
    source = {"path": str(args.states)} if args.states else {
        "generator": "haar" if args.purity == "pure" else "ginibre",
        "count": args.random,
        "dim": args.dim,
        "purity": args.purity,
        "rank": args.rank,
    }
    return {"n": t.n, "local_dim": t.local_dim, "source": source}


# --- commands ---------------------------------------------------------------


def cmd_invariant(args) -> Report:
    t = _states(args)
    rep = Report("invariant")
    values = evaluate_all(t)
    rep.doc["input"] = _state_config(args, t)
    rep.doc["values"] = [tagged(v.value, m, TOL_DIRECT) for m, v in values.items()]
    residuals = []
    names = list(values)
    for i, a in enumerate(names):
        for b in names[i + 1 :]:
            r = abs(values[a].value - values[b].value)
            ok = r <= TOL_DERIVED
            rep.ok &= ok
            residuals.append({"a": a, "b": b, "residual": r, "tolerance": TOL_DERIVED, "pass": ok})
    rep.doc["residuals"] = residuals
    rep.table = [
        {"method": m, "re": v.real, "im": v.imag, "tolerance": TOL_DIRECT} for m, v in values.items()
    ]
    return rep


def _route(t, spec):
    if t.n % 2:
        return "odd"
    if spec.even_strategy != "auto":
        return spec.even_strategy
    return "repeat" if is_pure(t.states[spec.strategy_index - 1]) else "convex"


def cmd_protocol(args) -> Report:
    t = _states(args)
    even = t.n % 2 == 0
    spec = protocol.ProtocolSpec(
        n=t.n,
        local_dim=t.local_dim,
        family=args.family,
        even_strategy=args.even_strategy if even else None,
        strategy_index=args.repeat_index if even else 1,
        shots=args.shots,
        seed=args.seed,
    )
    effective = t.n if t.n % 2 else t.n + 1
    if t.local_dim**effective > SIZE_CAP:
        raise SizeCapError(
            t.local_dim**effective, SIZE_CAP, "use `qswitch invariant` for product-trace-only evaluation"
        )
    result = protocol.sample_protocol(t, spec)
    oracle = bargmann_product_trace(t).value
    rep = Report("protocol")
    rep.doc["input"] = _state_config(args, t)
    rep.doc["protocol"] = {
        "family": spec.family,
        "route": _route(t, spec),
        "strategy_index": spec.strategy_index if even else None,
        "shots": spec.shots,
        "effective_order": effective,
    }
    tol = TOL_DERIVED if result.exact else None
    rep.doc["estimate"] = {
        "value": tagged(result.value, "switch-protocol", tol),
        "p_minus": tagged_real(result.p_minus, "born" if result.exact else "frequency", tol),
        "p_minus_i": tagged_real(result.p_minus_i, "born" if result.exact else "frequency", tol),
        "stderr_re": result.stderr_re,
        "stderr_im": result.stderr_im,
        "shots_x": result.shots_x,
        "shots_y": result.shots_y,
        "exact": result.exact,
    }
    rep.doc["oracle"] = tagged(oracle, "product-trace", TOL_DIRECT)
    residual = abs(result.value - oracle)
    rep.doc["residual"] = {"value": residual, "tolerance": tol}
    if result.exact:
        rep.ok = residual <= TOL_DERIVED
    rep.table = [
        {"method": "switch-protocol", "re": result.re_estimate, "im": result.im_estimate,
         "stderr_re": result.stderr_re, "stderr_im": result.stderr_im},
        {"method": "product-trace", "re": oracle.real, "im": oracle.imag, "stderr_re": 0.0, "stderr_im": 0.0},
    ]
    return rep


def cmd_simulate_switch(args) -> Report:
    psi = None
    if args.unitaries:
        a, b, psi = load_unitaries(args.unitaries)
        source = {"path": str(args.unitaries)}
    else:
        rng = make_rng(args.seed)
        a, b = random_unitary(rng, args.dim), random_unitary(rng, args.dim)
        source = {"generator": "haar", "dim": args.dim}
    if psi is None:
        psi = random_state(make_rng([args.seed, 1]), a.dim)
    _, sim = protocol.simulate_switch_hadamard(a, b, psi)
    rep = Report("simulate-switch")
    rep.doc["input"] = {"dim": a.dim, "source": source}
    rep.doc["max_deviation"] = tagged_real(sim.max_deviation, "hadamard-vs-direct", TOL_DERIVED)
    ea, eb = sim.expanded
    rep.doc["queries"] = {
        "raw": [sim.k_a, sim.k_b],
        "inverse": [sim.inverse_queries_a, sim.inverse_queries_b],
        "expanded": [ea, eb],
        "inverse_cost": protocol.INVERSE_QUERY_COST,
        "summary": sim.describe(),
    }
    rep.ok = sim.max_deviation <= TOL_DERIVED
    rep.table = [{"max_deviation": sim.max_deviation, "k_a": sim.k_a, "k_b": sim.k_b,
                  "inverse_a": sim.inverse_queries_a, "inverse_b": sim.inverse_queries_b,
                  "expanded_a": ea, "expanded_b": eb}]
    return rep


def _check(name, ok, residual=None, tolerance=None, detail=None):
    out = {"name": name, "pass": bool(ok), "residual": residual, "tolerance": tolerance}
    if detail is not None:
        out["detail"] = detail
    return out


def _verify_checks(args):
    checks = []
    odd = range(3, args.max_symbolic + 1, 2)
    for n in odd:
        checks.append(_check(f"conjugacy/n={n}", perm.verify_conjugacy(n), 0, 0))
    for n in odd:
        checks.append(_check(f"commutator/n={n}", perm.verify_commutator_identity(n), 0, 0))
    for n in range(7, args.lemma5 + 1, 2):
        ok = perm.lemma5_step(perm.main_pair_set(n - 2)) == perm.main_pair_set(n)
        checks.append(_check(f"pair-recursion/n={n}", ok, 0, 0))
    rng = make_rng([args.seed, 2])
    for n in range(3, args.lemma5 + 1, 2):
        worst = 0.0
        for _ in range(args.samples):
            t = random_tuple(rng, n, 2)
            worst = max(worst, abs(protocol.pair_product(perm.main_pair_set(n), t) - protocol.switch_input_trace(t)))
        checks.append(_check(f"pair-product/n={n}", worst <= TOL_DIRECT, worst, TOL_DIRECT))
    rng = make_rng([args.seed, 3])
    for family in ("main", "alt"):
        for n in range(3, args.max_numeric + 1, 2):
            worst = 0.0
            for kind in ("pure", "mixed"):
                for _ in range(args.samples):
                    t = random_tuple(rng, n, 2, kind)
                    got = protocol.odd_invariant_via_switch(t, family).value
                    worst = max(worst, abs(got - bargmann_product_trace(t).value))
            checks.append(_check(f"protocol/{family}/n={n}/d=2", worst <= TOL_DERIVED, worst, TOL_DERIVED))
    rng = make_rng([args.seed, 4])
    for d in (2, 4, 8, 16):
        worst = 0.0
        for _ in range(args.samples):
            a, b = random_unitary(rng, d), random_unitary(rng, d)
            _, sim = protocol.simulate_switch_hadamard(a, b, random_state(rng, d))
            worst = max(worst, sim.max_deviation)
        checks.append(_check(f"simulation/d={d}", worst <= TOL_DERIVED, worst, TOL_DERIVED))
    return checks


def _nogo_block(args):
    n = args.nogo
    base = protocol.nogo_witness(n, 2, trials=args.trials, seed=args.seed)
    checks = [
        _check(f"nogo/n={n}/parity", base.cycle_parity == "odd", detail=base.cycle_parity),
        _check(f"nogo/n={n}/rhs-det", base.rhs_det_max_deviation <= TOL_DET, base.rhs_det_max_deviation, TOL_DET),
    ]
    if base.exhaustive_solutions is not None:
        checks.append(_check(
            f"nogo/n={n}/exhaustive", base.exhaustive_solutions == 0, detail=
            f"{base.exhaustive_solutions} solutions among {base.triples_checked} triples",
        ))
    table = []
    for d in (2, 3, 4, 5):
        if d**n > 1 << 22:
            break
        sign = perm.unitary_determinant_sign(perm.cycle_shift(n), d)
        table.append({
            "local_dim": d,
            "det_sign": sign,
            "det_sign_formula": perm.determinant_sign_formula(perm.cycle_shift(n), d),
            "premise_flag": sign == 1,
            "d_mod4_flag": d % 4 in (0, 1),
        })
    block = {
        "n": n,
        "cycle_parity": base.cycle_parity,
        "exhaustive_solutions": base.exhaustive_solutions,
        "triples_checked": base.triples_checked,
        "trials": base.trials,
        "rhs_det_max_deviation": tagged_real(base.rhs_det_max_deviation, "haar-trials", TOL_DET),
        "determinants": table,
    }
    return checks, block


def _natural_key(name):
    return [int(tok) if tok.isdigit() else tok for tok in re.split(r"(\d+)", name)]


def cmd_verify(args) -> Report:
    rep = Report("verify")
    checks = _verify_checks(args)
    if args.nogo is not None:
        nogo_checks, block = _nogo_block(args)
        checks += nogo_checks
        rep.doc["nogo"] = block
    checks.sort(key=lambda c: _natural_key(c["name"]))
    failed = [c["name"] for c in checks if not c["pass"]]
    rep.doc["ranges"] = {
        "max_symbolic": args.max_symbolic,
        "max_numeric": args.max_numeric,
        "lemma5": args.lemma5,
        "samples": args.samples,
    }
    rep.doc["checks"] = checks
    rep.doc["summary"] = {"passed": len(checks) - len(failed), "failed": len(failed), "failures": failed}
    rep.ok = not failed
    rep.table = [{k: c.get(k) for k in ("name", "pass", "residual", "tolerance")} for c in checks]
    return rep


def cmd_perm(args) -> Report:
    rep = Report("perm")
    if args.action == "families":
        if args.n is None:
            raise ValidationError("perm families needs --n")
        a, b = perm.main_family(args.n)
        fam = {
            "main": {
                "A": perm.format_cycles(a),
                "B": perm.format_cycles(b),
                "labels": list(perm.preprocess_labels(args.n)),
                "P": perm.format_cycles(perm.preprocess_perm(args.n)),
            }
        }
        a2, b2 = perm.alt_family(args.n)
        fam["alt"] = {
            "A": perm.format_cycles(a2),
            "B": perm.format_cycles(b2),
            "P": perm.format_cycles(perm.cycle_conjugator(perm.switch_difference(a2, b2))),
        }
        fam["C_n"] = perm.format_cycles(perm.cycle_shift(args.n))
        rep.doc["families"] = fam
        rep.table = [{"family": k, **v} for k, v in fam.items() if isinstance(v, dict)]
        return rep
    ps = [perm.parse_permutation(text, args.n) for text in args.perms]
    if not ps:
        raise ValidationError(f"perm {args.action} needs at least one permutation")
    size = max(p.n for p in ps)
    ps = [perm.parse_permutation(text, size) for text in args.perms]
    if args.action == "compose":
        result = perm.compose_all(*ps)
    elif args.action == "invert":
        if len(ps) != 1:
            raise ValidationError("perm invert takes one permutation")
        result = perm.inverse(ps[0])
    else:
        if len(ps) != 1:
            raise ValidationError("perm parity takes one permutation")
        result = ps[0]
    rep.doc["result"] = {
        "cycles": perm.format_cycles(result),
        "oneline": perm.format_oneline(result),
        "parity": perm.parity(result),
    }
    rep.table = [rep.doc["result"]]
    return rep


COMMANDS = {
    "invariant": cmd_invariant,
    "protocol": cmd_protocol,
    "simulate-switch": cmd_simulate_switch,
    "verify": cmd_verify,
    "perm": cmd_perm,
}


# --- output -----------------------------------------------------------------


def render(rep: Report, args) -> str:
    doc = rep.finish(args)
    if args.format == "json":
        return json.dumps(doc, indent=2) + "\n"
    if args.format == "csv":
        buf = io.StringIO()
        if rep.table:
            fields = list(dict.fromkeys(k for row in rep.table for k in row))
            writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rep.table)
        return buf.getvalue()
    lines = [f"qswitch {doc['command']} ({'ok' if rep.ok else 'FAILED'})"]
    for row in rep.table:
        lines.append("  " + "  ".join(f"{k}={_fmt(v)}" for k, v in row.items()))
    return "\n".join(lines) + "\n"


def _fmt(v):
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


# --- argument parsing -------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, help="number of states / permutation size")
    common.add_argument("--dim", type=int, default=2, help="local dimension of generated states")
    common.add_argument("--family", choices=("main", "alt"), default="main")
    common.add_argument("--shots", type=int, default=0, help="0 for the exact readout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--even-strategy", choices=("repeat", "convex", "auto"), default="auto")
    common.add_argument("--repeat-index", type=int, default=1, help="1-based state used by even strategies")
    common.add_argument("--states", help="state file (JSON)")
    common.add_argument("--random", type=int, metavar="COUNT", help="generate COUNT seeded random states")
    common.add_argument("--purity", choices=("pure", "mixed"), default="pure")
    common.add_argument("--rank", type=int, help="rank of generated mixed states")
    common.add_argument("--format", choices=("json", "csv", "human"), default="json")
    common.add_argument("--deterministic", action="store_true", help="omit the timestamp")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="qswitch", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"qswitch {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("invariant", parents=[common], help="Bargmann invariant by every applicable method")
    sub.add_parser("protocol", parents=[common], help="switch measurement protocol, exact or sampled")
    sim = sub.add_parser("simulate-switch", parents=[common], help="Hadamard-test simulation of the switch")
    sim.add_argument("--unitaries", help="JSON file with matrices a and b, optionally a state psi")
    ver = sub.add_parser("verify", parents=[common], help="identity and fidelity suite")
    ver.add_argument("--max-symbolic", type=int, default=21)
    ver.add_argument("--max-numeric", type=int, default=9)
    ver.add_argument("--lemma5", type=int, default=11, metavar="N")
    ver.add_argument("--nogo", type=int, metavar="N", help="even order for the no-go witness")
    ver.add_argument("--trials", type=int, default=100)
    ver.add_argument("--samples", type=int, default=5, help="random instances per numeric check")
    pp = sub.add_parser("perm", parents=[common], help="permutation utilities")
    pp.add_argument("action", choices=("compose", "invert", "parity", "families"))
    pp.add_argument("perms", nargs="*", help='cycle "(1 2 3)" or one-line "[2,3,1]" forms')
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "verify" and args.nogo is not None and (args.nogo < 2 or args.nogo % 2):
            raise ValidationError(f"--nogo needs an even order >= 2, got {args.nogo}")
        rep = COMMANDS[args.command](args)
    except SizeCapError as exc:
        print(f"qswitch: size cap: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValidationError, ValueError) as exc:
        print(f"qswitch: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(render(rep, args))
    return EXIT_OK if rep.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
