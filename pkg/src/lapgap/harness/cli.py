"""``lapgap`` command-line interface.

Exit codes: 0 success or pass, 1 invalid input, 2 acceptance failure,
3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .. import anticonc, deloc, lcd, overcrowd, qwalk, spectra
from ..graphs import (GraphFormatError, centered_laplacian, laplacian, load_graph, rotate_last_two,
                      sample_gnp, store_graph)
from ..rng import stream
from . import experiments, runner
from .config import ConfigError, output_dir, parse_text

EXIT_OK, EXIT_INVALID, EXIT_FAILED, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise ConfigError(f"expected comma-separated numbers, got {text!r}") from None


def _vector(args) -> np.ndarray:
    if args.values:
        return _floats(args.values)
    if args.vector_file:
        return np.loadtxt(args.vector_file, dtype=float, ndmin=1)
    raise ConfigError("give --values or --vector-file")


def _matrix(g, kind: str):
    if kind == "laplacian":
        return laplacian(g)
    if kind == "centered":
        return centered_laplacian(g)
    return rotate_last_two(centered_laplacian(g))


def _emit(obj, out: str | None = None) -> None:
    text = json.dumps(runner._jsonable(obj), indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _write_csv(columns, rows, out: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(columns)
    w.writerows(runner.format_rows(rows))
    if out:
        Path(out).write_text(buf.getvalue(), encoding="utf-8", newline="")
    else:
        sys.stdout.write(buf.getvalue())


# --- subcommands ----------------------------------------------------------------------------

def cmd_sample(args) -> int:
    g = sample_gnp(args.n, args.p, args.seed, allow_degenerate=args.p in (0.0, 1.0))
    if args.out:
        store_graph(g, args.out)
    else:
        print(f"{g.n} {g.edge_count} {g.p:.17g} {g.seed} {g.generation}")
        for u, v in g.edges:
            print(u, v)
    return EXIT_OK


def cmd_spectrum(args) -> int:
    lam = spectra.eigvalsh(_matrix(load_graph(args.graph), args.matrix))
    _write_csv(("index", "eigenvalue"), [(i + 1, x) for i, x in enumerate(lam)], args.out)
    return EXIT_OK


def cmd_gaps(args) -> int:
    rep = spectra.gaps(spectra.eigvalsh(_matrix(load_graph(args.graph), args.matrix)), args.tau)
    _emit({"min_gap": rep.min_gap, "argmin": rep.argmin + 1, "simple": rep.simple,
           "tolerance": rep.tolerance})
    return EXIT_OK


def cmd_deloc(args) -> int:
    g = load_graph(args.graph)
    m = _matrix(g, args.matrix)
    s = spectra.eigh(m)
    n0 = args.n0 if args.n0 else max(1, g.n // 8)
    sup = deloc.sup_norm_profile(s)
    rows = []
    for j in range(s.n):
        v = s.eigenvectors[:, j]
        rows.append((g.generation, j + 1, sup[j], deloc.affine_window_stat(v, n0)[0],
                     deloc.small_coordinate_count(v, args.B)))
    _write_csv(("trial", "eig_index", "sup_norm", "affine_window_value", "small_coord_count"), rows, args.out)
    return EXIT_OK


def cmd_lcd(args) -> int:
    x = _vector(args)
    theta_max = args.theta_max if args.theta_max else float(x.size) ** 2
    res = lcd.lcd_scan(x, lcd.LcdParams(args.kappa, args.gamma, theta_max, args.step))
    _emit(res.to_dict())
    return EXIT_OK


def cmd_smallball(args) -> int:
    w = _vector(args)
    dist = anticonc.AtomDistribution(args.atoms, args.bernoulli_p, not args.raw)
    rng = stream(args.seed)
    if args.affine:
        est = (anticonc.levy_affine_exact(w, args.eps, dist) if args.exact
               else anticonc.levy_affine(w, args.eps, dist, args.N, rng))
    else:
        est = anticonc.levy_exact(w, args.eps, dist) if args.exact else anticonc.levy_mc(w, args.eps, dist, args.N, rng)
    _emit(est.to_dict())
    return EXIT_OK


def cmd_overcrowd(args) -> int:
    F = overcrowd.ZERO if args.f_kind == "zero" else overcrowd.Perturbation.shift(args.p * args.n)
    ks = [int(k) for k in _floats(args.ks)]
    curve = overcrowd.overcrowding_curve(args.n, args.p, ks, args.trials, args.seed, F, args.c)
    rows = [(args.n, args.p, r["k"], args.c, curve.f_kind, r["p_hat"], r["ci_lo"], r["ci_hi"], args.trials)
            for r in curve.rows]
    _write_csv(("n", "p", "k", "c", "F_kind", "p_hat", "ci_lo", "ci_hi", "trials"), rows, args.out)
    return EXIT_OK


def cmd_qwalk(args) -> int:
    g = load_graph(args.graph)
    s = spectra.eigh(laplacian(g))
    cfg = qwalk.WalkConfig.at_vertex(g.n, args.vertex, args.gamma, args.T)
    rep = qwalk.discrepancy(s, cfg)
    _emit({"T": args.T, "gamma": args.gamma, "discrepancy": rep.discrepancy, "bound": rep.bound,
           "holds": rep.holds, "min_gap": rep.min_gap, "n": g.n,
           "P_T": rep.p_t.tolist(), "P_inf": rep.p_inf.tolist()})
    return EXIT_OK


def _overrides(args) -> tuple[str | None, dict]:
    name, raw = None, {}
    if args.config:
        name, raw = parse_text(Path(args.config).read_text(encoding="utf-8"))
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        raw[k.strip()] = v.strip()
    if args.workers:
        raw["workers"] = str(args.workers)
    return name, raw


def _report(res: runner.RunResult) -> None:
    status = {True: "PASS", False: "FAIL", None: "DONE"}[res.passed]
    print(f"{status} {res.config.experiment}: {res.csv_path}")


def cmd_run(args) -> int:
    name, raw = _overrides(args)
    name = args.experiment or name
    if not name:
        raise ConfigError("no experiment given (use --experiment or a config file)")
    cfg = runner.make_config(name, raw, quick=args.quick)
    res = runner.run_experiment(cfg, output_dir(args.out))
    _report(res)
    return EXIT_FAILED if res.passed is False else EXIT_OK


def reproducibility_check(out: Path, workers: int = 1) -> bool:
    """Run one small experiment twice (serial and parallel) and replay a trial."""
    overrides = {"trials": 20, "n": 60}
    a = runner.run_experiment(runner.make_config("simplicity", overrides), out / "repro-a")
    b = runner.run_experiment(runner.make_config("simplicity", {**overrides, "workers": max(2, workers)}),
                              out / "repro-b")
    same = runner.csv_body(a.csv_path) == runner.csv_body(b.csv_path)
    rep = runner.replay(a.csv_path, 17)
    return same and rep.matches


def cmd_suite(args) -> int:
    out = output_dir(args.out)
    names = args.only.split(",") if args.only else list(experiments.REGISTRY)
    failed = []
    for name in names:
        extra = {"workers": args.workers} if args.workers else {}
        res = runner.run_experiment(runner.make_config(name, extra, quick=args.quick), out)
        _report(res)
        if res.passed is False:
            failed.append(name)
    ok = reproducibility_check(out, args.workers or 1)
    print(f"{'PASS' if ok else 'FAIL'} reproducibility")
    if not ok:
        failed.append("reproducibility")
    if failed:
        print(f"failed: {', '.join(failed)}")
    return EXIT_FAILED if failed else EXIT_OK


def cmd_replay(args) -> int:
    rep = runner.replay(args.file, args.trial)
    if not rep.recorded:
        raise ConfigError(f"no rows for trial {args.trial} in {args.file}")
    for row in rep.replayed:
        print(",".join(row))
    print("MATCH" if rep.matches else "MISMATCH", file=sys.stderr)
    return EXIT_OK if rep.matches else EXIT_FAILED


# --- parser ---------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lapgap", description="Spectral experiments on random graph Laplacians.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def graph_args(p):
        p.add_argument("--graph", required=True, help="graph file written by 'sample'")
        p.add_argument("--matrix", choices=("laplacian", "centered", "rotated"), default="laplacian")

    def vector_args(p):
        p.add_argument("--values", help="comma-separated coordinates")
        p.add_argument("--vector-file", help="text file with one coordinate per line")

    p = sub.add_parser("sample", help="draw a G(n, p) graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("spectrum", help="eigenvalues of a stored graph's matrix")
    graph_args(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("gaps", help="minimum eigenvalue gap and simplicity")
    graph_args(p)
    p.add_argument("--tau", type=float, default=spectra.TAU_SIMPLE)
    p.set_defaults(func=cmd_gaps)

    p = sub.add_parser("deloc", help="per-eigenvector delocalization statistics")
    graph_args(p)
    p.add_argument("--n0", type=int, default=0, help="window size (default n/8)")
    p.add_argument("--B", type=float, default=6.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_deloc)

    p = sub.add_parser("lcd", help="certified LCD of a vector")
    vector_args(p)
    p.add_argument("--kappa", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)
    p.add_argument("--theta-max", type=float, default=0.0, help="default n^2")
    p.add_argument("--step", type=float, default=None)
    p.set_defaults(func=cmd_lcd)

    p = sub.add_parser("smallball", help="small-ball probability of a weighted sum")
    vector_args(p)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--atoms", choices=("sign", "bernoulli", "gaussian"), default="sign")
    p.add_argument("--bernoulli-p", type=float, default=0.5)
    p.add_argument("--raw", action="store_true", help="do not rescale Bernoulli atoms to variance 1")
    p.add_argument("--N", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact", action="store_true", help="enumerate all outcomes (n <= 24)")
    p.add_argument("--affine", action="store_true", help="optimize over constant shifts as well")
    p.set_defaults(func=cmd_smallball)

    p = sub.add_parser("overcrowd", help="overcrowding probability curve")
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--ks", default="10,20,40")
    p.add_argument("--c", type=float, default=overcrowd.DEFAULT_C)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--f-kind", choices=("zero", "shift"), default="zero")
    p.add_argument("--out")
    p.set_defaults(func=cmd_overcrowd)

    p = sub.add_parser("qwalk", help="quantum walk discrepancy on a stored graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--vertex", type=int, default=0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--T", type=float, default=100.0)
    p.set_defaults(func=cmd_qwalk)

    def run_args(p):
        p.add_argument("--out", help="output directory (default $LAPGAP_OUTPUT_DIR or ./lapgap-out)")
        p.add_argument("--workers", type=int, default=0)
        p.add_argument("--quick", action="store_true", help="reduced trial counts")

    p = sub.add_parser("run", help="run one experiment")
    p.add_argument("--experiment", choices=sorted(experiments.REGISTRY))
    p.add_argument("--config", help="key = value config file")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    run_args(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("suite", help="run every acceptance experiment")
    p.add_argument("--only", help="comma-separated experiment names")
    run_args(p)
    p.set_defaults(func=cmd_suite)

    p = sub.add_parser("replay", help="re-execute one trial of a result file")
    p.add_argument("--file", required=True)
    p.add_argument("--trial", type=int, required=True)
    p.set_defaults(func=cmd_replay)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, GraphFormatError, ValueError, OSError) as err:
        print(f"lapgap: error: {err}", file=sys.stderr)
        return EXIT_INVALID
    except Exception as err:  # noqa: BLE001
        print(f"lapgap: internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
