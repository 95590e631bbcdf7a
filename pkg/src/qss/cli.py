"""``qss`` command-line front end.

Exit codes: 0 ok, 2 config error, 3 physicality violation, 4 I/O error,
5 Monte Carlo mismatch.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from . import metrics, protocol, validation
from .config import ConfigError, ScenarioConfig
from .errors import InvalidArgument, PhysicalityError
from .gaussian import coherent
from .protocol import AccessStructure

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PHYSICALITY = 3
EXIT_IO = 4
EXIT_MC = 5

SWEEP_COLUMNS = ["G", "g_plus", "g_minus", "gain_product", "fidelity_23", "fidelity_adv1"]
TV_COLUMNS = ["G", "gain_product", "T_23", "V_23", "T_adv", "V_adv", "unitary_gain"]


class _IOFailure(Exception):
    pass


def fmt(x) -> str:
    """Locale-independent number formatting with 9 significant digits."""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return f"{float(x):.9g}"


def csv_text(header: list[str], rows: list[list]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _write(path: str | None, text: str) -> None:
    if path is None:
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(f"cannot write {path}: {exc.strerror or exc}") from exc


def _load_config(path: str | None) -> ScenarioConfig:
    if path is None:
        return ScenarioConfig.experiment()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
    return cfgmod.loads(text)


def _check_physical(state, what: str) -> None:
    try:
        state.check_physical()
    except PhysicalityError as exc:
        raise PhysicalityError(f"{what}: {exc}") from None


def _observed(result, cfg: ScenarioConfig, raw_detection: bool):
    return protocol.detect(result, cfg.homodyne_efficiency) if raw_detection else result


def _structure_reports(cfg: ScenarioConfig, raw_detection: bool = False):
    shares = protocol.dealer_encode(cfg)
    _check_physical(shares.state, "shares")
    secret = coherent(*cfg.secret_amp)
    epr = protocol.make_epr(cfg.sqz1, cfg.sqz2, cfg.epr_visibility)
    duan = metrics.duan_product(epr)
    reports, finals = {}, {}
    for s in AccessStructure:
        raw = _observed(protocol.reconstruct(shares, s, cfg, parametric=False), cfg, raw_detection)
        _check_physical(raw.out_state, f"output of {s.value}")
        final = protocol.apply_parametric(raw) if s in (AccessStructure.S23, AccessStructure.S13) else raw
        reports[s] = metrics.evaluate(secret, final, tv_result=raw, duan=duan)
        finals[s] = final
    return reports, finals, duan


def report_text(cfg: ScenarioConfig, raw_detection: bool = False) -> tuple[str, float]:
    reports, finals, duan = _structure_reports(cfg, raw_detection)
    bounds = metrics.classical_bounds(2, 3)
    f_avg = metrics.average_fidelity(*(reports[s].fidelity for s in protocol.ACCESS_STRUCTURES))
    lines = [
        "(2,3) quantum state sharing report",
        f"secret mean = ({fmt(cfg.secret_amp[0])}, {fmt(cfg.secret_amp[1])})",
        f"electronic gain G = {_gain_text(cfg)}",
        f"detection = {'raw (eta_hom not inferred out)' if raw_detection else 'state level (eta_hom inferred out)'}",
        f"Duan product = {fmt(duan)} ({'inseparable' if duan < 1 else 'not certified'})",
        "",
        f"{'structure':<9} {'F':>10} {'g+':>10} {'g-':>10} {'g+g-':>10} {'T':>10} {'V':>10}  flags",
    ]
    for s, r in reports.items():
        flags = [name for name in ("beats_F_bound", "beats_T_cloning", "below_V_unity") if getattr(r, name)]
        lines.append(
            f"{s.value:<9} {fmt(r.fidelity):>10} {fmt(r.g_plus):>10} {fmt(r.g_minus):>10} "
            f"{fmt(r.gain_product):>10} {fmt(r.T):>10} {fmt(r.V):>10}  {','.join(flags) or '-'}"
        )
    lines += [
        "",
        f"average fidelity = {fmt(f_avg)}",
        f"classical bound  = {fmt(bounds.avg)} -> {'exceeded (quantum)' if f_avg > bounds.avg + 1e-9 else 'not exceeded'}",
        "",
        "Wigner contours (center, semi-axes, angle):",
    ]
    lines.append(f"  secret    {_contour(coherent(*cfg.secret_amp))}")
    for s, final in finals.items():
        lines.append(f"  {s.value:<9} {_contour(final.out_state)}")
    return "\n".join(lines) + "\n", f_avg


def _gain_text(cfg: ScenarioConfig) -> str:
    shares = protocol.dealer_encode(cfg)
    G = [protocol.feedforward_gain(shares, s, cfg) for s in (AccessStructure.S23, AccessStructure.S13)]
    text = fmt(G[0]) if abs(G[0] - G[1]) < 1e-12 else f"{fmt(G[0])} ({{2,3}}), {fmt(G[1])} ({{1,3}})"
    return text + (" (unitary gain point)" if cfg.electronic_gain is None else "")


def _contour(state) -> str:
    c = metrics.wigner_contour(state)
    return (
        f"({fmt(c.center[0])}, {fmt(c.center[1])}) "
        f"({fmt(c.semi_axes[0])}, {fmt(c.semi_axes[1])}) {fmt(c.angle)}"
    )


def _grid(args) -> np.ndarray:
    if args.steps < 2:
        raise ConfigError("--steps must be >= 2")
    if not args.g_max > args.g_min:
        raise ConfigError("--g-max must exceed --g-min")
    return np.linspace(args.g_min, args.g_max, args.steps)


def sweep_rows(cfg: ScenarioConfig, gains, raw_detection: bool = False) -> list[list]:
    shares = protocol.dealer_encode(cfg)
    adv = _observed(protocol.adversary_state(shares, AccessStructure.ADV1), cfg, raw_detection)
    f_adv = metrics.fidelity(cfg.secret_amp, adv)
    rows = []
    for G in sorted(gains):
        raw = protocol.reconstruct_feedforward(shares, AccessStructure.S23, cfg.with_gain(float(G)))
        raw = _observed(raw, cfg, raw_detection)
        final = protocol.apply_parametric(raw)
        rows.append([G, raw.g_plus, raw.g_minus, raw.gain_product, metrics.fidelity(cfg.secret_amp, final), f_adv])
    return rows


def tv_rows(cfg: ScenarioConfig, gains, raw_detection: bool = False) -> list[list]:
    shares = protocol.dealer_encode(cfg)
    secret = coherent(*cfg.secret_amp)
    adv = _observed(protocol.adversary_state(shares, AccessStructure.ADV1), cfg, raw_detection)
    t_adv = metrics.signal_transfer(secret, adv)[0]
    v_adv = metrics.reconstruction_noise(adv)[0]
    g_unit = protocol.solve_unitary_gain(shares, AccessStructure.S23, cfg)
    grid = [float(G) for G in gains]
    if not any(abs(G - g_unit) < 1e-12 for G in grid):
        grid.append(g_unit)
    rows = []
    for G in sorted(grid):
        raw = _observed(
            protocol.reconstruct_feedforward(shares, AccessStructure.S23, cfg.with_gain(G)), cfg, raw_detection
        )
        T = metrics.signal_transfer(secret, raw)[0]
        V = metrics.reconstruction_noise(raw)[0]
        rows.append([G, raw.gain_product, T, V, t_adv, v_adv, abs(G - g_unit) < 1e-12])
    return rows


def _cmd_report(args) -> int:
    cfg = _load_config(args.config)
    text, _ = report_text(cfg, args.raw_detection)
    sys.stdout.write(text)
    _write(args.out, text)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _load_config(args.config)
    text = csv_text(SWEEP_COLUMNS, sweep_rows(cfg, _grid(args), args.raw_detection))
    if args.out is None:
        sys.stdout.write(text)
    _write(args.out, text)
    return EXIT_OK


def _cmd_tv(args) -> int:
    cfg = _load_config(args.config)
    text = csv_text(TV_COLUMNS, tv_rows(cfg, _grid(args), args.raw_detection))
    if args.out is None:
        sys.stdout.write(text)
    _write(args.out, text)
    return EXIT_OK


def _cmd_mc_validate(args) -> int:
    cfg = _load_config(args.config)
    seed = cfg.seed if args.seed is None else args.seed
    rows = validation.compare(cfg, n_shots=args.shots, seed=seed, coefficient_error=args.corrupt_coefficient)
    header = ["structure", "quantity", "analytic", "mc", "std_error", "z"]
    table = [[r.structure.value, r.quantity, r.analytic, r.mc, r.std_error, r.z] for r in rows]
    lines = [f"MC validation: {args.shots} shots, seed {seed}", f"{'structure':<9} {'quantity':<12} {'analytic':>14} {'mc':>14} {'|d|/sigma':>10}"]
    lines += [f"{r[0]:<9} {r[1]:<12} {fmt(r[2]):>14} {fmt(r[3]):>14} {r[5]:>10.3f}" for r in table]
    bad = [r for r in rows if not r.ok]
    if bad:
        lines.append("MISMATCH (>= 5 sigma): " + ", ".join(f"{r.structure.value}:{r.quantity}" for r in bad))
    else:
        lines.append("all quantities within 5 sigma")
    sys.stdout.write("\n".join(lines) + "\n")
    _write(args.out, csv_text(header, table))
    return EXIT_MC if bad else EXIT_OK


def _cmd_bounds(args) -> int:
    b = metrics.classical_bounds(args.k, args.n)
    rows = [["avg", b.avg]]
    if b.asymmetric is not None:
        rows += [["asymmetric", b.asymmetric], ["mz", b.mz]]
    text = csv_text(["bound", "fidelity"], rows)
    sys.stdout.write(text)
    _write(args.out, text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qss", description="(2,3) continuous-variable quantum state sharing")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sweep=False):
        p.add_argument("--config", help="flat key = value scenario file (default: experimental parameters)")
        p.add_argument("--out", help="output file")
        p.add_argument("--raw-detection", action="store_true", help="report values seen through eta_hom")
        if sweep:
            p.add_argument("--g-min", type=float, default=0.0)
            p.add_argument("--g-max", type=float, default=6.0)
            p.add_argument("--steps", type=int, default=200)

    common(sub.add_parser("report", help="all access and adversary structures"))
    common(sub.add_parser("sweep", help="{2,3} fidelity versus feedforward gain (CSV)"), sweep=True)
    common(sub.add_parser("tv", help="{2,3} and adversary T, V versus feedforward gain (CSV)"), sweep=True)
    mc = sub.add_parser("mc-validate", help="compare analytic engine with Monte Carlo")
    common(mc)
    mc.add_argument("--shots", type=int, default=1_000_000)
    mc.add_argument("--seed", type=int, default=None)
    mc.add_argument("--corrupt-coefficient", type=float, default=0.0, help=argparse.SUPPRESS)
    b = sub.add_parser("bounds", help="classical fidelity bounds for a (k,n) scheme")
    b.add_argument("--config", help=argparse.SUPPRESS)
    b.add_argument("--out")
    b.add_argument("--k", type=int, default=2)
    b.add_argument("--n", type=int, default=3)
    return parser


COMMANDS = {
    "report": _cmd_report,
    "sweep": _cmd_sweep,
    "tv": _cmd_tv,
    "mc-validate": _cmd_mc_validate,
    "bounds": _cmd_bounds,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except PhysicalityError as exc:
        print(f"physicality violation: {exc}", file=sys.stderr)
        return EXIT_PHYSICALITY
    except _IOFailure as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvalidArgument as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
