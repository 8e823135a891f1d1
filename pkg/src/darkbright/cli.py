"""Command-line front end.

    darkbright pdet --system line:5 --detector 2 --initial 1
    darkbright bounds --system dangling --detector 0 --initial 5
    darkbright simulate --system ring:6 --detector 0 --initial 1 --tau 1 --csv run.csv
    darkbright spectrum --system ring:6 --tau 6.283185307179586
    darkbright reproduce table1

Exit codes: 0 success, 1 golden mismatch (reproduce), 2 invalid input,
3 numerical degeneracy.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import bounds as bd
from .errors import DegenerateError, PreconditionError, ValidationError
from .monitor import reference_pdet, run_to_convergence, sample_trajectories
from .reproduce import OUTPUT_ENV, TARGETS, reproduce_many
from .serialize import as_fraction, dumps
from .spectral import check_resonant_tau, eigendecompose
from .subspaces import dark_complement, detection_probability_exact, krylov_bright_basis
from .systems import Scenario, build_system, parse_state

EXIT_MISMATCH, EXIT_INVALID, EXIT_DEGENERATE = 1, 2, 3
COINCIDE_TOL = 1e-9


def _fmt(x) -> str:
    if x is None:
        return "n/a"
    return f"{x:.9g}  (~{as_fraction(x)})"


def _emit(args, payload: dict, lines: list[str]):
    if args.json:
        sys.stdout.write(dumps(payload))
    else:
        print("\n".join(lines))


def _output_path(name: str) -> Path:
    p = Path(name)
    base = os.environ.get(OUTPUT_ENV)
    return p if p.is_absolute() or base is None else Path(base) / p


def _scenario(args) -> Scenario:
    return Scenario(args.system, args.detector, args.initial, args.tau, args.smax, args.gamma)


def _localized_index(psi: np.ndarray) -> int | None:
    nz = np.flatnonzero(np.abs(psi) > 1e-12)
    return int(nz[0]) if nz.size == 1 else None


def cmd_pdet(args) -> int:
    g, h, d, psi = _scenario(args).resolve()
    bright = krylov_bright_basis(h, d, rank_tol=args.tol)
    dark = dark_complement(bright)
    by_bright = detection_probability_exact(bright, psi)
    by_dark = detection_probability_exact(dark, psi)
    diff = abs(by_bright.raw - by_dark.raw)
    agree = diff <= 1e-10
    payload = {
        "system": args.system, "detector": args.detector, "initial": args.initial,
        "bright_dim": bright.rank, "dark_dim": dark.rank,
        "p_det_bright_sum": by_bright.p_det, "p_det_dark_complement": by_dark.p_det,
        "agreement": diff, "consistent": agree,
    }
    _emit(args, payload, [
        f"{'P_det':<24}{by_bright.p_det:.9g}",
        f"{'  bright-sum':<24}{_fmt(by_bright.p_det)}",
        f"{'  dark-complement':<24}{_fmt(by_dark.p_det)}",
        f"{'  |difference|':<24}{diff:.3g} ({'ok' if agree else 'MISMATCH'})",
        f"{'bright / dark dims':<24}{bright.rank} / {dark.rank}",
    ])
    return 0 if agree else EXIT_DEGENERATE


def _best_upper(h, dark, psi, explicit=None):
    """Tightest dark-state upper bound over a few natural candidate dark states."""
    if explicit is not None:
        return bd.upper_bound_dark(h, explicit, psi), explicit
    proj = dark.projector @ psi
    cands = []
    if np.linalg.norm(proj) > 1e-12:
        cands.append(proj / np.linalg.norm(proj))
        hp = dark.projector @ (h.matrix @ proj)
        if np.linalg.norm(hp) > 1e-12:
            cands.append(hp / np.linalg.norm(hp))
    cands.extend(dark.vectors.T)
    best = None
    for c in cands:
        try:
            rep = bd.upper_bound_dark(h, c, psi)
        except DegenerateError:
            continue
        if best is None or rep.value < best[0].value:
            best = (rep, c)
    return best if best is not None else (None, None)


def cmd_bounds(args) -> int:
    g, h, d, psi = _scenario(args).resolve()
    dv, pv = d.amplitudes, psi.amplitudes
    s_max = args.smax or bd.default_s_max(g.node_count)
    r_idx, d_idx = _localized_index(pv), _localized_index(dv)
    bright = krylov_bright_basis(h, d, rank_tol=args.tol)
    dark = dark_complement(bright)
    exact = detection_probability_exact(bright, psi).p_det
    payload: dict = {"system": args.system, "detector": args.detector, "initial": args.initial,
                     "exact_p_det": exact, "initial_overlap": float(abs(np.vdot(dv, pv)) ** 2)}
    lines = [f"{'exact P_det':<28}{_fmt(exact)}"]

    if r_idx is not None and d_idx is not None and r_idx != d_idx:
        s0 = bd.distance_s(g, r_idx, d_idx)
        s_rule = "distance"
    else:
        s0 = bd.smallest_nonvacuous_s(h, d, psi, s_max, args.shift)
        s_rule = "first nonzero"
    single = None
    if s0 not in (None, float("inf")) and s0 >= 1:
        single = bd.lower_bound_commutator(h, d, psi, int(s0), args.shift)
    elif r_idx is not None and r_idx == d_idx:
        single = bd.lower_bound_commutator(h, d, psi, 1, args.shift)
        s_rule = "return"
    payload["lower_single"] = single
    payload["lower_single_rule"] = s_rule
    lines.append(f"{'lower (s=' + str(None if single is None else single.s) + ', ' + s_rule + ')':<28}"
                 f"{_fmt(None if single is None else single.value)}"
                 f"{'  [vacuous]' if single is not None and single.rhs_zero else ''}")

    localized_pair = r_idx is not None and d_idx is not None and r_idx != d_idx
    if localized_pair and single is not None and np.array_equal(h.matrix, g.adjacency()):
        pc = bd.path_count_bound(g.adjacency(), r_idx, d_idx, single.s)
        payload["lower_path_count"] = pc
        lines.append(f"{'lower (path counting)':<28}{_fmt(pc.value)}  exact {pc.exact}")

    sweep = bd.sweep_s(h, d, psi, s_max, args.shift)
    payload["sweep"] = sweep
    lines.append(f"{'lower (best s<=' + str(s_max) + ')':<28}{_fmt(sweep.best_value)}  at s={sweep.best_s}"
                 f"{'  [saturated, odd/even oscillation]' if sweep.saturated else ''}")

    if abs(np.vdot(dv, pv)) <= bd.OVERLAP_TOL:
        try:
            prop = bd.lower_bound_propagator(h, args.tau, d, psi)
            payload["lower_propagator"] = prop
            lines.append(f"{'lower (propagator, tau=' + format(args.tau, 'g') + ')':<28}{_fmt(prop.value)}")
        except DegenerateError as exc:
            lines.append(f"{'lower (propagator)':<28}n/a ({exc})")

    upper = None
    if dark.rank:
        explicit = parse_state(g, args.dark).amplitudes if args.dark else None
        upper, delta = _best_upper(h, dark, pv, explicit)
        payload["upper_dark"] = upper
        if delta is not None:
            delta = np.where(np.abs(delta) < 1e-14, 0, delta)
        payload["dark_state"] = None if delta is None else [[float(z.real), float(z.imag)] for z in delta]
        if upper is None:
            lines.append(f"{'upper (dark state)':<28}n/a (every candidate dark state is stationary)")
        else:
            lines.append(f"{'upper (dark state)':<28}{_fmt(upper.value)}")
    else:
        lines.append(f"{'upper (dark state)':<28}n/a (no dark subspace; P_det = 1 for every start)")
    best_lower = max(sweep.best_value, single.value if single else 0.0)
    coincide = upper is not None and abs(upper.value - best_lower) <= COINCIDE_TOL
    payload["coincide"] = coincide
    if coincide:
        lines.append("lower and upper bounds coincide")
    _emit(args, payload, lines)
    return 0


def cmd_simulate(args) -> int:
    g, h, d, psi = _scenario(args).resolve()
    run = run_to_convergence(h, args.tau, d, psi, tol=args.tol, n_cap=args.ncap)
    ref, which = reference_pdet(h, args.tau, d, psi)
    summary = run.summary()
    summary.update({"exact_p_det": ref, "exact_construction": which,
                    "abs_error": abs(run.p_det - ref)})
    if args.trajectories:
        times = sample_trajectories(h, args.tau, d, psi, args.trajectories, args.seed,
                                    n_cap=min(run.n_max, args.ncap))
        summary["trajectories"] = {"n": args.trajectories, "seed": args.seed,
                                   "detected_fraction": float(np.mean(times > 0))}
    if args.csv:
        path = _output_path(args.csv)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(run.to_csv())
        summary["csv"] = str(path)
    if args.json:
        sys.stdout.write(dumps(summary))
    else:
        print(f"{'steps':<22}{run.n_max} ({'converged' if run.converged else 'NOT converged'})")
        print(f"{'P(n) at last step':<22}{_fmt(run.p_det)}")
        print(f"{'exact (' + which + ')':<22}{_fmt(ref)}")
        print(f"{'tail estimate':<22}{run.tail_estimate:.3g}")
        print(f"{'bookkeeping error':<22}{run.bookkeeping_error():.3g}")
        if "trajectories" in summary:
            print(f"{'trajectory yes-rate':<22}{summary['trajectories']['detected_fraction']:.6f}")
        for note in run.notes:
            print(f"warning: {note}")
    return 0


def cmd_spectrum(args) -> int:
    _, h = build_system(args.system)
    spec = eigendecompose(h, tol=args.degeneracy_tol)
    payload = spec.to_dict()
    payload["resonance"] = check_resonant_tau(spec, args.tau).to_dict()
    if args.json:
        sys.stdout.write(dumps(payload))
    else:
        for lvl in payload["levels"]:
            print(f"E = {lvl['energy']:+.9g}   multiplicity {lvl['multiplicity']}")
        res = payload["resonance"]
        print(f"tau = {args.tau:g}: {'RESONANT' if res['resonant'] else 'generic'}"
              f" ({len(res['pairs'])} resonant level pairs)")
    return 0


def cmd_reproduce(args) -> int:
    targets = list(TARGETS) if "all" in args.targets else args.targets
    out = args.out or os.environ.get(OUTPUT_ENV) or "reproduce_out"
    results = reproduce_many(targets, out)
    status = 0
    for res in results:
        tag = "ok" if res["ok"] else f"{len(res['mismatches'])} MISMATCH(ES)"
        print(f"{res['target']:<10}{len(res['golden']):>4} golden values  {tag}")
        for m in res["mismatches"]:
            print(f"    {m['key']}: expected {m['expected']}, got {m['got']}")
        if not res["ok"]:
            status = EXIT_MISMATCH
    print(f"written to {out}")
    return status


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="darkbright",
                                description="Dark/bright subspaces and detection-probability bounds "
                                            "for monitored quantum walks.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def scenario_args(sp, tol_default=1e-10):
        sp.add_argument("--system", required=True, help="line:L, ring:L, dangling or a graph JSON file")
        sp.add_argument("--detector", required=True, help="detector node label")
        sp.add_argument("--initial", default="uniform", help="node label, 'uniform' or vec:a,b,...")
        sp.add_argument("--gamma", type=float, default=1.0)
        sp.add_argument("--tau", type=float, default=1.0)
        sp.add_argument("--smax", type=int, default=None)
        sp.add_argument("--tol", type=float, default=tol_default)
        sp.add_argument("--json", action="store_true")

    sp = sub.add_parser("pdet", help="exact total detection probability")
    scenario_args(sp)
    sp.set_defaults(func=cmd_pdet)

    sp = sub.add_parser("bounds", help="lower and upper bounds")
    scenario_args(sp)
    sp.add_argument("--shift", type=float, default=0.0, help="energy shift c in (H + c)^s")
    sp.add_argument("--dark", default=None, help="explicit dark state (vec:... or node label)")
    sp.set_defaults(func=cmd_bounds)

    sp = sub.add_parser("simulate", help="stroboscopic monitoring simulation")
    scenario_args(sp, tol_default=1e-12)
    sp.add_argument("--ncap", type=int, default=10**6)
    sp.add_argument("--csv", default=None, help="write (n, |phi_n|^2, P(n)) rows here")
    sp.add_argument("--trajectories", type=int, default=0)
    sp.add_argument("--seed", type=int, default=0)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("spectrum", help="energy levels and resonance check")
    sp.add_argument("--system", required=True)
    sp.add_argument("--tau", type=float, default=1.0)
    sp.add_argument("--degeneracy-tol", type=float, default=None)
    sp.add_argument("--json", action="store_true")
    sp.set_defaults(func=cmd_spectrum)

    sp = sub.add_parser("reproduce", help="regenerate reference figures/tables and diff with goldens")
    sp.add_argument("targets", nargs="+", choices=TARGETS + ("all",))
    sp.add_argument("--out", default=None, help=f"output directory (default ${OUTPUT_ENV} or ./reproduce_out)")
    sp.set_defaults(func=cmd_reproduce)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except DegenerateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (ValidationError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
