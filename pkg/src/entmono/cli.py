"""Command-line entry point: ``entmono {compute,fig1,fig2,verify,oracle-check}``.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

import argparse
import csv
import io
import itertools
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .measures import (RoofConfig, concurrence, concurrence_assist,
                       concurrence_pure, concurrence_two_qubit, cren, crenoa,
                       squared_concurrence_pure,
                       negativity, negativity_pure, roof_extremize,
                       wclass_one_vs_rest, wclass_pair_value)
from .monogamy import (MARGIN_TOL, THEOREM_KINDS, BoundKind, DomainError,
                       bound_rhs, classify_ordering, verify_theorem)
from .states import (Bipartition, DensityOperator, PureState,
                     StateParseError, WClassParams, load_state, make_wclass,
                     purify, reduce, sample_wclass, save_state, uniform_w,
                     wclass_from_state)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

FIG2_NOTE = ("pairwise factor is (2/5)^x, the pairwise negativity of |W>_5; "
             "the printed (1/2)^x factor would put the bound above the exact "
             "value (1.0 > 0.64 at x=2)")


class UsageError(Exception):
    pass


def _fmt(v: float) -> str:
    return f"{v:.17g}"


def x_grid(x_min: float, x_max: float, x_step: float) -> np.ndarray:
    if x_min < 2:
        raise UsageError(f"--x-min must be >= 2 (bounds hold for x >= 2), got {x_min}")
    if x_step <= 0:
        raise UsageError("--x-step must be positive")
    if x_max < x_min:
        raise UsageError("--x-max must be >= --x-min")
    count = int(np.floor((x_max - x_min) / x_step + 1e-9)) + 1
    return np.round(x_min + x_step * np.arange(count), 12)


def _grid_from_args(args) -> np.ndarray:
    if getattr(args, "x_values", None):
        try:
            xs = np.array([float(v) for v in args.x_values.split(",")])
        except ValueError:
            raise UsageError(f"bad --x-values {args.x_values!r}") from None
        if np.any(xs < 2):
            raise UsageError("x values must be >= 2 (bounds hold for x >= 2)")
        return xs
    return x_grid(args.x_min, args.x_max, args.x_step)


def _roof_cfg(args) -> RoofConfig:
    return RoofConfig(restarts=args.restarts, max_iters=args.max_iters,
                      rng_seed=args.seed)


def write_csv(path, header_lines, columns, rows) -> str:
    buf = io.StringIO()
    for line in header_lines:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])
    text = buf.getvalue()
    if path is None or str(path) == "-":
        sys.stdout.write(text)
    else:
        try:
            Path(path).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot write {path}: {exc}") from None
    return text


def _provenance(args, title):
    return [f"entmono {title}", f"command: entmono {' '.join(args.argv)}",
            f"seed: {args.seed}", f"version: {__version__}"]


# -- figure curves ---------------------------------------------------------

def fig1_rows(xs):
    """Exact C_a^x of |W>_4 and three lower bounds, one row per x."""
    params = uniform_w(4)
    psi = make_wclass(params)
    exact_sq = squared_concurrence_pure(psi, Bipartition.of(4, [0]))
    subset = [1, 2, 3]
    pairs = [wclass_pair_value(params, j) for j in subset]
    t = classify_ordering(params, subset).t
    rows = []
    for x in xs:
        rows.append((float(x), exact_sq ** (x / 2),
                     bound_rhs(BoundKind.H_C_T1, pairs, x, t),
                     bound_rhs(BoundKind.XHALF_C, pairs, x, t),
                     bound_rhs(BoundKind.FLAT_C, pairs, x)))
    return rows


def fig2_rows(xs):
    """Exact N_a^x of |W>_5 and two lower bounds, one row per x."""
    params = uniform_w(5)
    psi = make_wclass(params)
    exact = negativity_pure(psi, Bipartition.of(5, [0])).value
    subset = [1, 2, 3, 4]
    pairs = [wclass_pair_value(params, j, "negativity") for j in subset]
    t = classify_ordering(params, subset, "negativity").t
    return [(float(x), exact ** x,
             bound_rhs(BoundKind.H_N_T3, pairs, x, t),
             bound_rhs(BoundKind.XHALF_N, pairs, x, t)) for x in xs]


def cmd_fig1(args) -> int:
    rows = fig1_rows(_grid_from_args(args))
    write_csv(args.out, _provenance(args, "fig1"),
              ["x", "exact", "thm1", "jzx", "zxn"], rows)
    return EXIT_OK


def cmd_fig2(args) -> int:
    rows = fig2_rows(_grid_from_args(args))
    header = _provenance(args, "fig2") + [f"note: {FIG2_NOTE}"]
    write_csv(args.out, header, ["x", "exact", "thm3", "jzx"], rows)
    return EXIT_OK


# -- compute ---------------------------------------------------------------

MEASURES = ("concurrence", "concurrence-assist", "negativity", "cren", "crenoa")


def _parse_qubits(text, n, flag):
    try:
        qs = [int(q) for q in text.split(",") if q.strip()]
    except ValueError:
        raise UsageError(f"bad {flag} {text!r}") from None
    if not qs or any(not 0 <= q < n for q in qs):
        raise UsageError(f"{flag} {text!r} must list qubits in 0..{n - 1}")
    return qs


def cmd_compute(args) -> int:
    try:
        psi = load_state(args.state_file)
    except (OSError, StateParseError) as exc:
        raise UsageError(str(exc)) from None
    state = psi
    n = psi.num_qubits
    if args.keep:
        keep = _parse_qubits(args.keep, n, "--keep")
        state = reduce(psi, keep)
        # side labels refer to the original qubit numbering
        relabel = {q: i for i, q in enumerate(sorted(set(keep)))}
    else:
        relabel = {q: q for q in range(n)}
    side = _parse_qubits(args.side_a, n, "--side-a")
    if any(q not in relabel for q in side):
        raise UsageError("--side-a must be a subset of the kept qubits")
    split = Bipartition.of(state.num_qubits, [relabel[q] for q in side])
    if not split.side_b:
        raise UsageError("--side-a must leave at least one qubit on side B")
    cfg = _roof_cfg(args)
    if isinstance(state, DensityOperator) and state.rank() == 1:
        w, v = state.eig()
        state = PureState.from_vector(v[:, -1], normalize=True)
    fn = {"concurrence": concurrence, "concurrence-assist": concurrence_assist,
          "negativity": negativity, "cren": cren, "crenoa": crenoa}[args.measure]
    res = fn(state, split, cfg) if args.measure != "negativity" else fn(state, split)
    print(f"{args.measure} {_fmt(res.value)} method={res.method}"
          + ("" if res.converged else " converged=false"))
    if args.dump_ensemble and res.ensemble is not None:
        for p, member in zip(res.ensemble.weights, res.ensemble.members):
            amps = " ".join(f"{_fmt(a.real)}{a.imag:+.17g}j" for a in member)
            print(f"  p={_fmt(p)} psi=[{amps}]")
    return EXIT_OK


# -- verify ----------------------------------------------------------------

def instance_subsets(params: WClassParams):
    """Ordered pair-index subsets tested per sampled state.

    All ascending subsets with at least three indices, plus the full set
    sorted by decreasing pair value.
    """
    n_b = len(params.b)
    out = []
    for size in range(3, n_b + 1):
        out.extend(list(c) for c in itertools.combinations(range(1, n_b + 1), size))
    ranked = sorted(range(1, n_b + 1), key=lambda j: (-abs(params.b[j - 1]), j))
    if ranked != list(range(1, n_b + 1)):
        out.append(ranked)
    return out


def sample_seeds(seed: int, samples: int):
    return [int(c.generate_state(1)[0]) for c in np.random.SeedSequence(seed).spawn(samples)]


def run_verify(params_list, families, xs, lhs_mode, cfg, oracle_count=0):
    """Verify the theorem families on every instance; returns (rows, stats)."""
    rows = []
    stats = {"instances": 0, "satisfied": 0, "nonneg": 0, "violations": [],
             "min_margin": np.inf, "oracle_instances": 0, "oracle_min_margin": np.inf,
             "unconverged": 0}
    oracle_left = oracle_count
    for idx, params in enumerate(params_list):
        n = params.num_qubits
        for subset in instance_subsets(params):
            modes = [lhs_mode]
            full = len(subset) == len(params.b)
            if oracle_left > 0 and n == 4 and full and lhs_mode != "oracle":
                modes.append("oracle")
                oracle_left -= 1
                stats["oracle_instances"] += 1
            for family in families:
                kinds = THEOREM_KINDS[family]
                for mode in modes:
                    rep = verify_theorem(params, subset, kinds, xs, cfg, mode)
                    if not rep.converged:
                        stats["unconverged"] += 1
                    for kind in kinds:
                        status = rep.hypothesis_status[kind]
                        if mode == lhs_mode:
                            stats["instances"] += 1
                        marg = rep.margin[kind]
                        if marg is not None:
                            if mode == lhs_mode:
                                stats["satisfied"] += 1
                                stats["min_margin"] = min(stats["min_margin"], float(marg.min()))
                                if marg.min() >= -MARGIN_TOL:
                                    stats["nonneg"] += 1
                            else:
                                stats["oracle_min_margin"] = min(stats["oracle_min_margin"],
                                                                 float(marg.min()))
                        for kk, x, v in rep.violations():
                            if kk is kind:
                                stats["violations"].append((idx, params, subset, kind, x, v, mode))
                        for j, x in enumerate(xs):
                            rows.append((idx, n, " ".join(map(str, subset)),
                                         "" if rep.profile.t is None else rep.profile.t,
                                         rep.profile.regime(), kind.name, mode, float(x),
                                         float(rep.lhs[j]),
                                         "" if marg is None else float(rep.rhs[kind][j]),
                                         "" if marg is None else float(marg[j]), status))
    return rows, stats


def cmd_verify(args) -> int:
    xs = _grid_from_args(args)
    if args.samples is not None and args.samples < 1:
        raise UsageError("--samples must be >= 1")
    if args.params_file:
        try:
            params_list = [wclass_from_state(load_state(args.params_file))]
        except (OSError, ValueError) as exc:
            raise UsageError(str(exc)) from None
        params_list = params_list * (args.samples or 1)
    else:
        samples = args.samples or 100
        seeds = sample_seeds(args.seed, samples)
        if args.qubits is not None:
            if args.qubits < 4:
                raise UsageError("--qubits must be >= 4")
            sizes = [args.qubits] * samples
        else:
            sizes = [(4, 5, 6)[i % 3] for i in range(samples)]
        params_list = [sample_wclass(n, s) for n, s in zip(sizes, seeds)]
    families = ["concurrence", "negativity"] if args.family == "both" else [args.family]
    cfg = _roof_cfg(args)
    rows, stats = run_verify(params_list, families, xs, args.lhs_mode, cfg, args.oracle_samples)
    if args.out:
        write_csv(args.out, _provenance(args, "verify"),
                  ["sample", "qubits", "subset", "t", "regime", "kind", "lhs_mode", "x",
                   "lhs", "rhs", "margin", "hypothesis"], rows)
    print(f"instances: {stats['instances']}")
    print(f"satisfied-hypothesis: {stats['satisfied']}")
    print(f"margin>=0: {stats['nonneg']}")
    print(f"min-margin: {_fmt(stats['min_margin'])}")
    if stats["oracle_instances"]:
        print(f"oracle-instances: {stats['oracle_instances']}")
        print(f"oracle-min-margin: {_fmt(stats['oracle_min_margin'])}")
    if stats["unconverged"]:
        print(f"unconverged-roof-runs: {stats['unconverged']}")
    if stats["violations"]:
        for idx, params, subset, kind, x, v, mode in stats["violations"]:
            coeffs = " ".join(f"{_fmt(c.real)}{c.imag:+.17g}j" for c in params.coefficients())
            print(f"VIOLATION sample={idx} kind={kind.name} mode={mode} x={_fmt(x)} "
                  f"margin={_fmt(v)} subset={subset} params=[{coeffs}]")
        return EXIT_FAIL
    return EXIT_OK


# -- oracle-check ----------------------------------------------------------

def random_rank2_two_qubit(rng) -> DensityOperator:
    a = rng.standard_normal((4, 2)) + 1j * rng.standard_normal((4, 2))
    r = a @ a.conj().T
    return DensityOperator.from_matrix(r / np.trace(r).real)


def oracle_suites(samples, cfg, seed):
    """Run the closed-form vs roof comparisons; yields (suite, deviation, state)."""
    rng = np.random.default_rng(seed)
    split2 = Bipartition.of(2, [0])
    for _ in range(samples):
        rho = random_rank2_two_qubit(rng)
        dev = abs(roof_extremize(rho, split2, "concurrence", "min", cfg).value
                  - concurrence_two_qubit(rho).value)
        yield "two-qubit roof-min vs closed form", dev, rho
    for k in range(samples):
        params = sample_wclass((4, 5, 6)[k % 3], int(rng.integers(2 ** 31)))
        psi = make_wclass(params)
        for i in range(1, params.num_qubits):
            rho = reduce(psi, [0, i])
            for kernel in ("concurrence", "negativity"):
                hi = roof_extremize(rho, split2, kernel, "max", cfg).value
                lo = roof_extremize(rho, split2, kernel, "min", cfg).value
                ref = wclass_pair_value(params, i, kernel)
                yield f"w-class pair max=min ({kernel})", abs(hi - lo), rho
                yield f"w-class pair vs 2|a||b_i| ({kernel})", max(abs(hi - ref), abs(lo - ref)), rho
    for k in range(max(1, samples // 5)):
        n = (4, 5)[k % 2]
        params = sample_wclass(n, int(rng.integers(2 ** 31)))
        psi = make_wclass(params)
        for size in (2, 3):
            subset = sorted(rng.choice(np.arange(1, n), size=size, replace=False).tolist())
            if size == n - 1:
                continue
            keep = [0] + subset
            rho = reduce(psi, keep)
            split = Bipartition.of(len(keep), [0])
            ref = wclass_one_vs_rest(params, subset)
            dev = abs(roof_extremize(rho, split, "concurrence", "min", cfg).value - ref)
            yield "w-class one-vs-rest vs closed form", dev, rho
    for k in range(samples):
        v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        psi = PureState.from_vector(v, normalize=True)
        split = Bipartition.of(3, [0])
        dev = abs(roof_extremize(psi.density(), split, "concurrence", "max", cfg).value
                  - concurrence_pure(psi, split).value)
        dev = max(dev, abs(roof_extremize(psi.density(), split, "negativity", "min", cfg).value
                           - negativity_pure(psi, split).value))
        yield "pure-state collapse", dev, psi.density()


def cmd_oracle_check(args) -> int:
    cfg = _roof_cfg(args)
    samples = args.samples or 10
    worst = {}
    for suite, dev, rho in oracle_suites(samples, cfg, args.seed):
        if suite not in worst or dev > worst[suite][0]:
            worst[suite] = (dev, rho)
    failed = False
    overall = (-1.0, None, None)
    for suite, (dev, rho) in worst.items():
        ok = dev <= args.tolerance
        failed |= not ok
        print(f"{suite}: max deviation {dev:.3e} {'ok' if ok else 'FAIL'}")
        if dev > overall[0]:
            overall = (dev, suite, rho)
    if failed:
        dev, suite, rho = overall
        out = args.out or "oracle_worst.state"
        try:
            save_state(purify(rho), out)
        except OSError as exc:
            raise UsageError(f"cannot write {out}: {exc}") from None
        print(f"worst case ({suite}, deviation {dev:.3e}) written to {out} "
              f"as a purification; reduce to the first {rho.num_qubits} qubits to recover it")
        return EXIT_FAIL
    return EXIT_OK


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=None)
    common.add_argument("--x-min", type=float, default=2.0)
    common.add_argument("--x-max", type=float, default=10.0)
    common.add_argument("--x-step", type=float, default=0.1)
    common.add_argument("--restarts", type=int, default=200)
    common.add_argument("--max-iters", type=int, default=2000)
    common.add_argument("--qubits", type=int, default=None)
    common.add_argument("--out", default=None)

    p = argparse.ArgumentParser(prog="entmono", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"entmono {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", parents=[common], help="measure a state file")
    c.add_argument("state_file")
    c.add_argument("--measure", choices=MEASURES, default="concurrence")
    c.add_argument("--side-a", default="0", help="comma-separated qubits on side A")
    c.add_argument("--keep", default=None, help="reduce to these qubits first")
    c.add_argument("--dump-ensemble", action="store_true")
    c.set_defaults(func=cmd_compute)

    for name, func, helptext in (("fig1", cmd_fig1, "C_a^x of |W>_4 against its lower bounds"),
                                 ("fig2", cmd_fig2, "N_a^x of |W>_5 against its lower bounds")):
        f = sub.add_parser(name, parents=[common], help=helptext)
        f.add_argument("--x-values", default=None)
        f.set_defaults(func=func)

    v = sub.add_parser("verify", parents=[common], help="randomized theorem sweep")
    v.add_argument("--family", choices=("concurrence", "negativity", "both"), default="both")
    v.add_argument("--lhs-mode", choices=("analytic", "oracle", "chain"), default="chain")
    v.add_argument("--x-values", default=None, help="comma-separated exponents")
    v.add_argument("--oracle-samples", type=int, default=20,
                   help="N=4 instances also checked with a roof-oracle LHS")
    v.add_argument("--params-file", default=None, help="W-class state file to verify")
    v.set_defaults(func=cmd_verify)

    o = sub.add_parser("oracle-check", parents=[common], help="closed forms vs roof oracles")
    o.add_argument("--tolerance", type=float, default=1e-3)
    o.set_defaults(func=cmd_oracle_check)
    return p


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        if args.restarts < 1 or args.max_iters < 1:
            raise UsageError("--restarts and --max-iters must be >= 1")
        return args.func(args)
    except (UsageError, DomainError, StateParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
