"""Command-line experiment harness.

Every subcommand writes a CSV file. The first line is a ``#`` comment with
the artifact version and every parameter. It is followed by a fixed header
and the rows. Reals are printed with 17 significant digits, so identical
flags give byte-identical output.

    qgamelab bomb-zeno --n 10 --trials 100000 --seed 7
    qgamelab sweep --param n --values 1,2,4,8 supply-demand --trials 10000 --seed 1
    qgamelab ising --cells 16 --beta-j 0.5 --sweeps 20000 --burn-in 2000 --seed 3 --output chain.csv
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Callable

import numpy as np

from . import __version__
from .core import SingleQubitGate, equal_up_to_phase, gate
from .games import (BreakerKind, BombState, estimate_tester, forgery_experiment,
                    run_bomb_tester_antizeno, run_newcomb, supply_demand_survival, zeno_survival)
from .games.zeno import ev_breaker_exact
from .ising import (ActivationSchedule, IsingChain, MetropolisParams, exact_correlation,
                    simulate)
from .rng import RngStream

TACTICS = {"0": [1, 0], "1": [0, 1], "plus": [1, 1]}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    return str(value)


def render(meta: dict, header: list[str], rows: list[list]) -> str:
    meta_line = "# " + " ".join(f"{k}={fmt(v)}" for k, v in meta.items())
    lines = [meta_line, ",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


# Each experiment returns (header, rows). ``summary`` experiments are the
# one-row-per-run form used by ``sweep``.

def _newcomb(a, rng, summary=False):
    breaker = (BreakerKind.qutrojan() if a.breaker == "qutrojan"
               else BreakerKind.classical_switch(a.prob_not))
    res = run_newcomb(TACTICS[a.tactic], breaker, a.trials, rng, workers=a.workers)
    emp = res.empirical
    if summary:
        return (["lower0_mc", "lower0_exact", "upper1_mc", "upper1_exact"],
                [[res.lower_marginal(exact=False)[0], res.lower_marginal()[0],
                  res.upper_marginal(exact=False)[1], res.upper_marginal()[1]]])
    rows = [[u, l, emp[(u, l)], res.exact[(u, l)]] for u, l in sorted(res.exact)]
    return ["upper", "lower", "freq_mc", "prob_exact"], rows


def _ev_breaker(a, rng, summary=False):
    est = estimate_tester("ev_breaker", a.n, a.trials, rng, first_qubit=a.first_qubit,
                          workers=a.workers)
    exact = ev_breaker_exact(a.n, a.first_qubit)
    return (["n", "first_qubit", "survival_mc", "survival_exact", "verdict1_mc",
             "verdict1_exact", "std_err"],
            [[a.n, a.first_qubit, est.survival, exact.survival, est.verdict1 / est.trials,
              exact.verdict1, est.std_err]])


def _bomb_zeno(a, rng, summary=False):
    bomb = BombState.parse(a.bomb)
    est = estimate_tester("zeno", a.n, a.trials, rng, bomb=bomb, workers=a.workers)
    exact = zeno_survival(a.n) if bomb.working else 1.0
    return ["n", "survival_mc", "survival_exact", "std_err"], [[a.n, est.survival, exact, est.std_err]]


def _supply_demand(a, rng, summary=False):
    bomb = BombState.parse(a.bomb)
    est = estimate_tester("supply_demand", a.n, a.trials, rng, bomb=bomb, workers=a.workers)
    exact = supply_demand_survival(a.n) if bomb.working else 1.0
    zeno = zeno_survival(a.n)
    return (["n", "survival_mc", "survival_exact", "zeno_exact", "dominates", "std_err"],
            [[a.n, est.survival, exact, zeno, exact > zeno, est.std_err]])


def _bomb_antizeno(a, rng, summary=False):
    d = run_bomb_tester_antizeno(a.n, a.alpha, BombState.parse(a.bomb))
    return ["n", "alpha", "bomb", "verdict0", "verdict1"], [[a.n, a.alpha, a.bomb, d.verdict0, d.verdict1]]


def _wiesner(a, rng, summary=False):
    est = forgery_experiment(a.k, a.trials, a.variant, a.policy, a.forger, rng, workers=a.workers)
    return ["k", "pass_rate", "std_err"], [[a.k, est.pass_rate, est.std_err]]


def _ising_params(a) -> tuple[MetropolisParams, float]:
    if a.p is not None:
        params = MetropolisParams(a.p)
        beta = math.inf if a.p >= 1 else -math.log1p(-a.p) / 4
        return params, beta
    if a.beta_j < 0:
        raise ValueError("--beta-j must be >= 0")
    return MetropolisParams.from_beta(a.beta_j), a.beta_j


def _ising(a, rng, summary=False):
    params, beta = _ising_params(a)
    if a.init == "aligned":
        chain = IsingChain.aligned(a.cells)
    else:
        chain = IsingChain.random(a.cells, rng.derive(1))
    series = simulate(chain, params, ActivationSchedule.parse(a.schedule), a.sweeps, a.burn_in,
                      a.mode, rng.derive(0))
    if summary:
        return (["mean_magnetization", "mean_energy", "mean_nn_correlation",
                 "std_err_nn_correlation", "exact_nn_correlation"],
                [[series.mean("magnetization"), series.mean("energy"),
                  series.mean("nn_correlation"), series.std_err("nn_correlation"),
                  exact_correlation(a.cells, beta, 1)]])
    rows = [list(r) for r in zip(series.sweep, series.magnetization, series.energy,
                                 series.nn_correlation)]
    return ["sweep", "magnetization", "energy", "nn_correlation"], rows


def identity_checks(tol: float, draws: int, rng: RngStream) -> list[tuple[str, float, bool]]:
    """Catalog identities with their worst entrywise deviation over ``draws`` samples."""
    NOT, H = gate("not"), gate("hadamard")
    results = []

    def dev(g1, g2):
        return float(np.max(np.abs(g1.matrix - g2.matrix)))

    def record(name, pairs):
        worst = max(dev(g1, g2) for g1, g2 in pairs)
        results.append((name, worst, all(equal_up_to_phase(g1, g2, tol) for g1, g2 in pairs)))

    minus_i = SingleQubitGate(-np.eye(2))
    record("not_squared_is_minus_identity", [(NOT @ NOT, minus_i)])
    record("hadamard_squared_is_minus_identity", [(H @ H, minus_i)])
    record("h_not_h_is_diag_minus_i_i",
           [(H @ NOT @ H, SingleQubitGate(np.diag([-1j, 1j])))])
    roots = []
    for n in range(1, 65):
        r = gate("root_not", n)
        roots.append((r ** n, NOT))
    record("root_not_to_the_n_is_not_n1_64", roots)
    phis = rng.uniform((draws, 2)) * 4 * math.pi - 2 * math.pi
    record("exp_not_additive",
           [(gate("exp_not", p2) @ gate("exp_not", p1), gate("exp_not", p1 + p2)) for p1, p2 in phis])
    params = rng.uniform((draws, 3)) * 2 * math.pi
    not3 = NOT ** 3
    record("v_beta2_not3_v_beta1_is_v_sum",
           [(gate("v", al, b2) @ not3 @ gate("v", al, b1), gate("v", al, b1 + b2))
            for al, b1, b2 in params])
    return results


def _identities(a, rng, summary=False):
    rows = [[name, worst, ok] for name, worst, ok in identity_checks(a.tol, a.draws, rng)]
    return ["identity", "max_deviation", "pass"], rows


EXPERIMENTS: dict[str, Callable] = {
    "newcomb": _newcomb,
    "ev-breaker": _ev_breaker,
    "bomb-zeno": _bomb_zeno,
    "bomb-antizeno": _bomb_antizeno,
    "supply-demand": _supply_demand,
    "wiesner": _wiesner,
    "ising": _ising,
    "identities": _identities,
}
STOCHASTIC = {"newcomb", "ev-breaker", "bomb-zeno", "supply-demand", "wiesner", "ising"}


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {text}")
    return v


def _unit_interval(text):
    v = float(text)
    if not 0.0 <= v <= 1.0:
        raise argparse.ArgumentTypeError(f"expected a value in [0, 1], got {text}")
    return v


def _add_common(p, stochastic, trials=True):
    p.add_argument("--output", default="-", help="CSV path, '-' for stdout (default: -)")
    p.add_argument("--config", default=None, help="flat 'key = value' file supplying defaults")
    if stochastic:
        p.add_argument("--seed", type=int, required=True, help="base seed (required)")
    if stochastic and trials:
        p.add_argument("--trials", type=_positive_int, default=100000,
                       help="Monte Carlo trials (default: 100000)")
        p.add_argument("--workers", type=_positive_int, default=1,
                       help="worker processes; does not change results (default: 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qgamelab", description="Quantum game circuits and Zeno testers.")
    parser.add_argument("--version", action="version", version=f"qgamelab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    p = subs["newcomb"] = sub.add_parser("newcomb", help="Newcomb breaker / qutrojan")
    _add_common(p, True)
    p.add_argument("--tactic", choices=sorted(TACTICS), default="plus",
                   help="upper-qubit tactic: 0, 1 or plus = (|0>+|1>)/sqrt2 (default: plus)")
    p.add_argument("--breaker", choices=["qutrojan", "classical_switch"], default="qutrojan",
                   help="(default: qutrojan)")
    p.add_argument("--prob-not", type=_unit_interval, default=0.5,
                   help="chance the classical switch fires NOT (default: 0.5)")

    p = subs["ev-breaker"] = sub.add_parser("ev-breaker", help="Elitzur-Vaidman circuit-breaker")
    _add_common(p, True)
    p.add_argument("--n", type=_positive_int, default=10, help="unblocking steps (default: 10)")
    p.add_argument("--first-qubit", type=int, choices=[0, 1], default=1, help="(default: 1)")

    for name, helptext in (("bomb-zeno", "safe Zeno bomb tester"),
                           ("supply-demand", "supply-demand switch")):
        p = subs[name] = sub.add_parser(name, help=helptext)
        _add_common(p, True)
        p.add_argument("--n", type=_positive_int, default=10, help="stages (default: 10)")
        p.add_argument("--bomb", choices=["working", "damaged"], default="working",
                       help="(default: working)")

    p = subs["bomb-antizeno"] = sub.add_parser("bomb-antizeno", help="anti-Zeno tester (exact)")
    _add_common(p, False)
    p.add_argument("--n", type=_positive_int, default=4, help="stages (default: 4)")
    p.add_argument("--alpha", type=float, default=0.0, help="V gate angle (default: 0)")
    p.add_argument("--bomb", choices=["working", "damaged"], default="working",
                   help="(default: working)")

    p = subs["wiesner"] = sub.add_parser("wiesner", help="banknote forgery experiment")
    _add_common(p, True)
    p.add_argument("--k", type=_positive_int, default=16, help="sub-games per note (default: 16)")
    p.add_argument("--variant", choices=["swap", "hadamard"], default="swap", help="(default: swap)")
    p.add_argument("--policy", choices=["haar", "haar_random", "computational_pair"],
                   default="haar", help="(default: haar)")
    p.add_argument("--forger", choices=["uniform_guess", "measure_resend", "legitimate"],
                   default="uniform_guess", help="(default: uniform_guess)")

    p = subs["ising"] = sub.add_parser("ising", help="Metropolis Ising automaton time series")
    _add_common(p, True, trials=False)
    p.add_argument("--cells", type=int, default=16, help="chain length N >= 3 (default: 16)")
    p.add_argument("--beta-j", type=float, default=0.5, help="beta*J (default: 0.5)")
    p.add_argument("--p", type=_unit_interval, default=None,
                   help="switch probability; overrides --beta-j (default: from beta-j)")
    p.add_argument("--sweeps", type=_positive_int, default=10000,
                   help="total sweeps including burn-in (default: 10000)")
    p.add_argument("--burn-in", type=int, default=1000, help="(default: 1000)")
    p.add_argument("--schedule", choices=["single_random", "even_odd"], default="single_random",
                   help="(default: single_random)")
    p.add_argument("--mode", choices=["classical", "quantum_cell"], default="classical",
                   help="(default: classical)")
    p.add_argument("--init", choices=["aligned", "random"], default="aligned",
                   help="initial chain (default: aligned)")

    p = subs["identities"] = sub.add_parser("identities", help="catalog gate identities")
    _add_common(p, False)
    p.add_argument("--tol", type=float, default=1e-10, help="(default: 1e-10)")
    p.add_argument("--draws", type=_positive_int, default=100,
                   help="random parameter draws per identity (default: 100)")
    p.add_argument("--seed", type=int, default=0, help="seed for parameter draws (default: 0)")

    p = sub.add_parser("sweep", help="one summary row per value of a numeric parameter")
    p.add_argument("--param", required=True, help="flag name to vary, e.g. n, k, beta_j")
    p.add_argument("--values", required=True, help="comma-separated numeric values")
    p.add_argument("rest", nargs=argparse.REMAINDER, help="subcommand and its flags")
    return parser, subs


def _read_config(path: str) -> dict[str, str]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _parse_sub(subs, argv):
    if not argv or argv[0] not in subs:
        raise UsageError(f"expected a subcommand from {sorted(subs)}")
    name, args = argv[0], list(argv[1:])
    if "--config" in args:
        i = args.index("--config")
        if i + 1 >= len(args):
            raise UsageError("--config needs a path")
        given = {a.split("=", 1)[0] for a in args if a.startswith("--")}
        for key, value in _read_config(args[i + 1]).items():
            flag = "--" + key.replace("_", "-")
            if flag not in given:
                args = [flag, value] + args
    return name, subs[name].parse_args(args)


def _meta(name, ns, extra=None) -> dict:
    meta = {"artifact": "qgamelab", "version": __version__, "subcommand": name}
    meta.update(extra or {})
    for key in sorted(vars(ns)):
        if key not in ("output", "config", "workers") and getattr(ns, key) is not None:
            meta[key] = getattr(ns, key)
    return meta


def run_experiment(argv: list[str]) -> tuple[str, str]:
    """Parse ``argv`` (without the program name); return (CSV text, output path)."""
    parser, subs = build_parser()
    if argv and argv[0] == "sweep":
        ns = parser.parse_args(argv)
        return _run_sweep(subs, ns)
    if argv and argv[0] in ("-h", "--help", "--version"):
        parser.parse_args(argv)
    name, ns = _parse_sub(subs, argv)
    rng = RngStream(getattr(ns, "seed", 0))
    header, rows = EXPERIMENTS[name](ns, rng)
    return render(_meta(name, ns), header, rows), ns.output


def _run_sweep(subs, ns):
    name, base = _parse_sub(subs, ns.rest)
    key = ns.param.replace("-", "_")
    if key not in vars(base) or key in ("output", "config", "seed", "workers"):
        raise UsageError(f"{name} has no sweepable parameter {ns.param!r}")
    current = getattr(base, key)
    if isinstance(current, bool) or not isinstance(current, (int, float)) and current is not None:
        raise UsageError(f"parameter {ns.param!r} is not numeric")
    cast = int if isinstance(current, int) else float
    try:
        values = sorted(cast(v) for v in ns.values.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"could not parse --values {ns.values!r}") from None
    if not values:
        raise UsageError("--values is empty")
    base_rng = RngStream(base.seed)
    header, rows = None, []
    for i, v in enumerate(values):
        flag = "--" + key.replace("_", "-")
        _, row_ns = _parse_sub(subs, ns.rest + [flag, str(v)])
        h, r = EXPERIMENTS[name](row_ns, base_rng.derive(i), summary=True)
        if key in h:
            idx = h.index(key)
            h = h[:idx] + h[idx + 1:]
            r = [row[:idx] + row[idx + 1:] for row in r]
        header = [key] + h
        rows += [[v] + row for row in r]
    meta = _meta(name, base, {"sweep_param": key, "sweep_values": ";".join(fmt(v) for v in values)})
    meta.pop(key, None)
    return render(meta, header, rows), base.output


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        text, output = run_experiment(argv)
    except (UsageError, ValueError, OSError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"qgamelab: error: {msg}", file=sys.stderr)
        return 2
    if output == "-":
        sys.stdout.write(text)
    else:
        with open(output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
