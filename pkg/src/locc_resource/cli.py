"""Command-line entry point.

Every subcommand prints a report (an aligned table, or sorted
``key=value`` lines with ``--format machine``) and optionally writes its
artifact (state, operator, POVM or the report itself) to ``--out``.

Exit codes: 0 all checks passed, 1 a check failed, 2 usage error or
unknown subcommand, 3 malformed input file, 4 dimension mismatch,
5 input rejected by the operation (rank-deficient basis, invalid POVM,
missing precondition).
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

import numpy as np

from . import io
from .constants import ALS_MAX_ITER, ALS_NORM_CAP, ALS_RESTARTS, TOL_ALS, TOL_NORM
from .discrimination import (
    POVMError,
    build_unambiguous_povm,
    check_unambiguous,
    perfect_discrimination_bell,
)
from .dual import BasisSet, RankDeficientBasis, check_identity_decomposition, check_mes_decomposition, dual_basis
from .resources import (
    classify3,
    make_named,
    schmidt_measure,
    three_qubit_maximal_reps,
    universality_unambiguous,
)
from .tensor import (
    ProductOperator,
    ShapeError,
    bipartitions,
    conjugate,
    cut_entropy,
    max_entangled,
)
from .transform import (
    PreconditionError,
    ZeroImageError,
    find_transform,
    protocol_from_measurement,
    teleport_branches,
    verify_transform,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_SHAPE = 4
EXIT_INPUT = 5


class Report:
    """Ordered records of scalar fields plus an overall verdict."""

    def __init__(self, title: str):
        self.title = title
        self.records: list[dict] = []
        self.passed = True

    def add(self, **fields) -> None:
        self.records.append(fields)

    def fail(self) -> None:
        self.passed = False

    def to_dict(self) -> dict:
        return {
            "title": self.title,
            "passed": self.passed,
            "records": [{k: _plain(v) for k, v in r.items()} for r in self.records],
        }


def _plain(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, (complex, np.complexfloating)):
        return [float(v.real), float(v.imag)]
    if v is None:
        return None
    return str(v)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if v is None:
        return "none"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.6g}" if abs(v) >= 1e-3 or v == 0 else f"{float(v):.3e}"
    if isinstance(v, (complex, np.complexfloating)):
        return f"{_fmt(float(v.real))}{'+' if v.imag >= 0 else '-'}{_fmt(abs(float(v.imag)))}j"
    return str(v)


def render_machine(report: Report) -> str:
    lines = []
    for r in report.records:
        parts = []
        for k in sorted(r):
            s = _fmt(r[k])
            parts.append(f"{k}={json.dumps(s) if (' ' in s or not s) else s}")
        lines.append(" ".join(parts))
    lines.append(f"passed={_fmt(report.passed)} report={json.dumps(report.title)}")
    return "\n".join(lines) + "\n"


def render_human(report: Report) -> str:
    cols: list[str] = []
    for r in report.records:
        cols.extend(k for k in r if k not in cols)
    rows = [[_fmt(r.get(k, "")) if k in r else "" for k in cols] for r in report.records]
    widths = [max([len(c)] + [len(row[i]) for row in rows]) for i, c in enumerate(cols)]
    out = [report.title]
    if cols:
        out.append("  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip())
        out.append("  ".join("-" * w for w in widths))
        out.extend("  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in rows)
    out.append(f"result: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(out) + "\n"


# -- subcommands --------------------------------------------------------------


def _basis(paths) -> BasisSet:
    if isinstance(paths, str):
        paths = [paths]
    return BasisSet(tuple(io.read_states(paths)))


def cmd_dual(args) -> tuple[Report, dict | None]:
    b = _basis(args.basis)
    d = dual_basis(b)
    rep = Report("dual basis")
    id_res = check_identity_decomposition(b, d)
    mes_res = check_mes_decomposition(b, d)
    tol = args.tol * b.dim
    rep.add(check="Lemma 1 identity decomposition", residual=id_res, passed=id_res < tol)
    rep.add(check="Lemma 1 MES decomposition", residual=mes_res, passed=mes_res < tol)
    for i, c in enumerate(d.overlaps):
        rep.add(check=f"overlap {i}", residual=None, passed=True, value=float(c))
    rep.add(check="condition number", residual=None, passed=True, value=d.condition)
    if id_res >= tol or mes_res >= tol:
        rep.fail()
    return rep, {"states": [io.state_to_dict(s) for s in d.duals]}


def cmd_transform(args) -> tuple[Report, dict | None]:
    phi = io.read_state(args.phi)
    target = io.read_state(args.target)
    if args.action == "verify":
        op = io.read_operator(args.operator)
        check = verify_transform(phi, target, op, tol=args.tol)
        rep = Report("transform verify")
        rep.add(check="M|phi> proportional to target", mu=check.mu, residual=check.residual, passed=check.ok)
        if not check.ok:
            rep.fail()
        return rep, None
    search = find_transform(
        phi, target, args.restarts, args.max_iter, args.norm_cap, args.seed, args.tol
    )
    rep = Report("transform find")
    rep.add(check="product transformation", found=search.found, residual=search.residual,
            restarts=search.restarts, border_rank_escape=search.border_rank_escape, reason=search.reason)
    artifact = None
    if search.found:
        check = verify_transform(phi, target, search.operator)
        rep.add(check="certificate", found=True, residual=check.residual, mu=check.mu)
        artifact = io.operator_to_dict(search.operator, "transform")
    else:
        rep.fail()
    return rep, artifact


def _certificates(phi, b, paths, args) -> list[ProductOperator]:
    duals = dual_basis(b)
    if paths:
        ms = [io.read_operator(p) for p in paths]
        if len(ms) != len(b):
            raise ShapeError(f"{len(ms)} operators for {len(b)} basis states")
        return ms
    ms = []
    for i in range(len(b)):
        search = find_transform(conjugate(phi), duals[i], args.restarts, args.max_iter,
                                args.norm_cap, args.seed, TOL_ALS)
        if not search.found:
            raise PreconditionError(f"no product transformation Phi* -> dual {i} ({search.reason})")
        ms.append(search.operator)
    return ms


def cmd_discriminate(args) -> tuple[Report, dict | None]:
    b = _basis(args.basis)
    if args.action == "bell":
        res = perfect_discrimination_bell(b, tol=args.tol)
        rep = Report("perfect discrimination through Phi_Bell")
        rep.add(check="Example 1 teleport-then-measure", branches=res.branches,
                min_correct=res.min_correct, max_wrong=res.max_wrong, passed=res.passed)
        if not res.passed:
            rep.fail()
        return rep, None
    phi = io.read_state(args.phi)
    if args.action == "build":
        povm = build_unambiguous_povm(phi, b, _certificates(phi, b, args.ops, args), tol=args.tol)
        artifact = io.povm_to_dict(povm)
    else:
        povm = io.read_povm(args.povm)
        artifact = None
    table = check_unambiguous(povm, phi, b, tol=args.tol)
    rep = Report(f"unambiguous discrimination ({args.action})")
    for i, e in enumerate(table.eps):
        rep.add(check=f"outcome {i}", eps=float(e), offdiag=float(np.abs(np.delete(table.table[i], i)).max(initial=0.0)))
    rep.add(check="Theorem 1 unambiguity pattern", eps=float(table.eps.min()), offdiag=table.offdiag_max,
            passed=table.passed)
    if not table.passed:
        rep.fail()
    return rep, artifact


def cmd_protocol(args) -> tuple[Report, dict | None]:
    phi = io.read_state(args.phi)
    b = _basis(args.basis)
    povm = io.read_povm(args.povm)
    table = check_unambiguous(povm, phi, b)
    branches = protocol_from_measurement(phi, b, povm, tol=args.tol)
    duals = dual_basis(b)
    rep = Report("measurement to transformation")
    ok = True
    for br, e in zip(branches, table.eps):
        bound = float(e / b.dim)
        exact = bound / float(duals.overlaps[br.outcome]) ** 2
        good = br.fidelity > 1 - 1e-9 and abs(br.probability - exact) < args.tol and br.probability >= bound - args.tol
        ok &= good
        rep.add(outcome=br.outcome, probability=br.probability, eps_over_D=bound,
                fidelity=br.fidelity, purity=br.purity, passed=good)
    inc = branches[-1]
    rep.add(outcome="inconclusive", probability=inc.probability, purity=inc.purity)
    if not ok:
        rep.fail()
    return rep, None


def cmd_teleport(args) -> tuple[Report, dict | None]:
    state = io.read_state(args.state)
    if not 0 <= args.party < state.shape.n:
        raise ShapeError(f"no party {args.party} in a {state.shape.n}-party state")
    d = state.dims[args.party]
    branches = teleport_branches(state, max_entangled(d), args.party)
    rep = Report(f"teleport party {args.party} through a {d}x{d} maximally entangled pair")
    for br in branches:
        err = float(np.linalg.norm(br.state.amps - state.amps))
        good = abs(br.probability - 1 / d**2) < args.tol and err < args.tol
        rep.add(outcome=f"{br.outcome[0]},{br.outcome[1]}", probability=br.probability, error=err, passed=good)
        if not good:
            rep.fail()
    return rep, io.state_to_dict(branches[0].state)


def _named_params(args) -> dict:
    params = {}
    if args.n is not None:
        params["n"] = args.n
    if args.r is not None:
        params["r"] = args.r
    if args.d is not None:
        params["d"] = args.d
    if args.dims is not None:
        params["dims"] = tuple(int(x) for x in args.dims.split(","))
    return params


def cmd_resource(args) -> tuple[Report, dict | None]:
    try:
        s = make_named(args.name, **_named_params(args))
    except ValueError as exc:
        if isinstance(exc, ShapeError):
            raise
        raise ShapeError(str(exc)) from exc
    rep = Report(f"state {s.label} on shape {list(s.dims)}")
    for idx in np.flatnonzero(np.abs(s.amps) > 0):
        rep.add(index=int(idx), basis="".join(str(i) for i in np.unravel_index(idx, s.dims)), amplitude=s.amps[idx])
    return rep, io.state_to_dict(s)


def cmd_schmidt(args) -> tuple[Report, dict | None]:
    s = io.read_state(args.state)
    res = schmidt_measure(s, args.r_max, args.restarts, args.max_iter, args.norm_cap, args.seed, args.tol)
    rep = Report("Schmidt measure (tensor rank)")
    for r, val in res.residuals.items():
        rep.add(candidate_rank=r, residual=val, skipped=val is None, border_rank_escape=r in res.border_ranks)
    rep.add(rank=res.rank, lower=res.lower, upper=res.upper, schmidt_measure_bits=res.schmidt_measure,
            certified=res.certified, border_rank_flag=res.border_rank_flag)
    artifact = None
    if res.rank is None:
        rep.fail()
    else:
        # the rank-r certificate: a product map from GHZ(N, r) onto the state
        search = find_transform(make_named("ghz", n=s.shape.n, r=res.rank), s, args.restarts,
                                args.max_iter, args.norm_cap, args.seed, args.tol)
        artifact = io.operator_to_dict(search.operator, f"GHZ{s.shape.n}^{res.rank} -> state")
    return rep, artifact


def cmd_classify(args) -> tuple[Report, dict | None]:
    s = io.read_state(args.state)
    c = classify3(s)
    rep = Report("three-qubit SLOCC class")
    rep.add(quantity="class", value=c.tag.value, confident=c.confident)
    rep.add(quantity="local ranks", value=",".join(map(str, c.ranks)))
    rep.add(quantity="3-tangle", value=c.tangle)
    for cut in bipartitions(s.shape.n):
        rest = [k for k in range(s.shape.n) if k not in cut]
        name = "".join("ABC"[k] for k in cut) + ":" + "".join("ABC"[k] for k in rest)
        rep.add(quantity=f"entropy {name}", value=cut_entropy(s, cut))
    return rep, None


def cmd_entropy(args) -> tuple[Report, dict | None]:
    s = io.read_state(args.state)
    rep = Report("bipartite entanglement entropy (bits)")
    for cut in bipartitions(s.shape.n):
        rest = [k for k in range(s.shape.n) if k not in cut]
        rep.add(cut=",".join(map(str, cut)) + "|" + ",".join(map(str, rest)), entropy=cut_entropy(s, cut))
    return rep, None


def _parse_cert(spec: str) -> tuple[int, str]:
    idx, _, path = spec.partition(":")
    if not path or not idx.isdigit():
        raise argparse.ArgumentTypeError(f"certificate must be INDEX:PATH, got {spec!r}")
    return int(idx), path


def cmd_universal(args) -> tuple[Report, dict | None]:
    phi = io.read_state(args.phi)
    reps = io.read_states(args.reps) if args.reps else three_qubit_maximal_reps()
    certs = {i: io.read_operator(p) for i, p in (args.cert or [])}
    verdict = universality_unambiguous(phi, reps, certs, args.restarts, args.max_iter, args.norm_cap,
                                       args.seed, args.tol)
    rep = Report("universality for unambiguous discrimination")
    artifact = {"certificates": []}
    for w in verdict.witnesses:
        rep.add(target=w.label, reached=w.reached, method=w.method, residual=w.residual, mu=w.mu,
                source_class=w.source_class.value if w.source_class else None,
                target_class=w.target_class.value if w.target_class else None)
        if w.reached and w.operator is not None:
            artifact["certificates"].append({"target": w.label, **io.operator_to_dict(w.operator)})
    rep.add(target="all", reached=verdict.universal, method="verdict")
    if not verdict.universal:
        rep.fail()
    return rep, artifact


def cmd_verify_paper(args) -> tuple[Report, dict | None]:
    from .verify import run_acceptance

    rep = Report("reproduction checks")
    for res in run_acceptance(args.seed):
        rep.add(**res.record())
        if not res.passed:
            rep.fail()
    return rep, None


# -- parser -------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=7, help="RNG seed for searches and random checks")
    p.add_argument("--tol", type=float, default=None, help="override the check tolerance")
    p.add_argument("--out", help="write the artifact (or the report) to this file")
    p.add_argument("--format", choices=["human", "machine"], default="human")
    return p


def _search_opts() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--restarts", type=int, default=ALS_RESTARTS)
    p.add_argument("--max-iter", type=int, default=ALS_MAX_ITER)
    p.add_argument("--norm-cap", type=float, default=ALS_NORM_CAP)
    return p


def build_parser() -> argparse.ArgumentParser:
    common, search = _common(), _search_opts()
    parser = argparse.ArgumentParser(
        prog="locc-resource",
        description="Resource states for local unambiguous discrimination and SLOCC conversion.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("dual", parents=[common], help="dual basis and its decomposition checks")
    p.add_argument("basis", nargs="+", help="basis file(s)")
    p.set_defaults(func=cmd_dual, tol_default=TOL_NORM)

    p = sub.add_parser("transform", help="verify or search product transformations")
    tsub = p.add_subparsers(dest="action", required=True, metavar="ACTION")
    q = tsub.add_parser("verify", parents=[common])
    q.add_argument("phi")
    q.add_argument("operator")
    q.add_argument("target")
    q.set_defaults(func=cmd_transform, tol_default=TOL_NORM)
    q = tsub.add_parser("find", parents=[common, search])
    q.add_argument("phi")
    q.add_argument("target")
    q.set_defaults(func=cmd_transform, tol_default=TOL_ALS)

    p = sub.add_parser("protocol", help="measurement-to-transformation protocol")
    psub = p.add_subparsers(dest="action", required=True, metavar="ACTION")
    q = psub.add_parser("forward", parents=[common])
    q.add_argument("phi")
    q.add_argument("basis")
    q.add_argument("povm")
    q.set_defaults(func=cmd_protocol, tol_default=TOL_NORM)

    p = sub.add_parser("teleport", parents=[common], help="teleport one party of a state")
    p.add_argument("state")
    p.add_argument("--party", type=int, default=0)
    p.set_defaults(func=cmd_teleport, tol_default=TOL_NORM)

    p = sub.add_parser("discriminate", help="build or check discrimination measurements")
    dsub = p.add_subparsers(dest="action", required=True, metavar="ACTION")
    q = dsub.add_parser("build", parents=[common, search])
    q.add_argument("phi")
    q.add_argument("basis")
    q.add_argument("--ops", nargs="+", help="operator files taking Phi* to each dual (searched if omitted)")
    q.set_defaults(func=cmd_discriminate, tol_default=TOL_NORM)
    q = dsub.add_parser("check", parents=[common])
    q.add_argument("phi")
    q.add_argument("basis")
    q.add_argument("povm")
    q.set_defaults(func=cmd_discriminate, tol_default=TOL_NORM)
    q = dsub.add_parser("bell", parents=[common])
    q.add_argument("basis")
    q.set_defaults(func=cmd_discriminate, tol_default=1e-9)

    p = sub.add_parser("resource", help="named resource states")
    rsub = p.add_subparsers(dest="action", required=True, metavar="ACTION")
    q = rsub.add_parser("make", parents=[common])
    q.add_argument("name", choices=["w", "ghz", "bell", "ex3", "mes"])
    q.add_argument("--n", type=int)
    q.add_argument("--r", type=int)
    q.add_argument("--d", type=int)
    q.add_argument("--dims", help="comma-separated party dimensions (bell)")
    q.set_defaults(func=cmd_resource, tol_default=TOL_NORM)

    p = sub.add_parser("schmidt", parents=[common, search], help="tensor rank and Schmidt measure")
    p.add_argument("state")
    p.add_argument("--r-max", type=int)
    p.set_defaults(func=cmd_schmidt, tol_default=TOL_ALS)

    p = sub.add_parser("classify", parents=[common], help="three-qubit SLOCC class and cut entropies")
    p.add_argument("state")
    p.set_defaults(func=cmd_classify, tol_default=TOL_NORM)

    p = sub.add_parser("entropy", parents=[common], help="entropy of every bipartition")
    p.add_argument("state")
    p.set_defaults(func=cmd_entropy, tol_default=TOL_NORM)

    p = sub.add_parser("universal", parents=[common, search], help="universality for unambiguous discrimination")
    p.add_argument("phi")
    p.add_argument("--reps", nargs="+", help="maximally entangled representatives (default: GHZ and W)")
    p.add_argument("--cert", action="append", type=_parse_cert, metavar="INDEX:PATH",
                   help="certificate operator for representative INDEX")
    p.set_defaults(func=cmd_universal, tol_default=TOL_ALS)

    p = sub.add_parser("verify-paper", parents=[common], help="run the reproduction checks")
    p.set_defaults(func=cmd_verify_paper, tol_default=TOL_NORM)
    return parser


def _diagnose(code: int, msg: str) -> int:
    print(f"error: {msg}", file=sys.stderr)
    return code


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.tol is None:
        args.tol = args.tol_default
    try:
        report, artifact = args.func(args)
    except io.FormatError as exc:
        return _diagnose(EXIT_FORMAT, f"malformed input: {exc}")
    except ShapeError as exc:
        return _diagnose(EXIT_SHAPE, f"dimension mismatch: {exc}")
    except (RankDeficientBasis, POVMError, PreconditionError, ZeroImageError) as exc:
        return _diagnose(EXIT_INPUT, f"rejected input: {exc}")
    except ValueError as exc:
        # e.g. unnormalizable or otherwise invalid states from files
        return _diagnose(EXIT_FORMAT, f"malformed input: {exc}")

    text = render_machine(report) if args.format == "machine" else render_human(report)
    sys.stdout.write(text)
    if args.out:
        io.write_json(args.out, artifact if artifact is not None else report.to_dict())
    return EXIT_OK if report.passed else EXIT_FAIL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
