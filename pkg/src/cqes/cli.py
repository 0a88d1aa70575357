"""Command-line front end.

Exit codes: 0 success, 1 validation/usage error, 2 numerical failure (always for
broken analytic checks; for convergence and box problems only under --strict).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from cqes import __version__
from cqes.core import CiLabel, CouplingParams, Irrep, SystemKind, params_from_eta_zeta
from cqes.errors import (
    AnalyticMismatch,
    BoxTooSmall,
    CqesError,
    DegenerateBlock,
    Indeterminate,
    NotConverged,
)
from cqes.operator import build_operator
from cqes.reproduce import TARGETS, reproduce
from cqes.solve_analytic import analytic_spectrum, razavy_spectrum_analytic
from cqes.solve_numeric import FghConfig, fgh_spectrum, truncated_eigenvector, truncated_spectrum
from cqes.spectra import eta_scan, verify_ais
from cqes.wavefn import assemble

COMMANDS = ("build-matrix", "analytic", "spectrum", "fgh", "wavefunction", "scan", "verify",
            "reproduce")

# hard defaults; None in the parser means "not given" so a config file can fill it
DEFAULTS = {
    "dim": None,
    "grid": 1024,
    "levels": 10,
    "box": None,
    "irrep": None,
    "system": "trig",
    "format": "csv",
    "method": "truncated",
    "n": 0,
    "points": 1024,
    "kappa_min": 0.25,
    "kappa_max": 6.5,
    "tol": 1e-3,
    "source": "fgh",
    "strict": False,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def fmt(value) -> str:
    """17 significant digits for floats, locale-independent; empty for NaN/None."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        v = float(value)
        if math.isnan(v):
            return ""
        return "%.17g" % v
    return str(value)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cqes", description="Conditional quasi-exact solvability toolkit.")
    parser.add_argument("--version", action="version", version=f"cqes {__version__}")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p, params=True):
        if params:
            p.add_argument("--beta", type=float)
            p.add_argument("--kappa", type=float)
            p.add_argument("--eta", type=float)
            p.add_argument("--zeta", type=float)
        p.add_argument("--output", "-o", help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"))
        p.add_argument("--strict", action="store_true", default=None)
        p.add_argument("--config", help="JSON file supplying defaults for any flag")
        return p

    p = common(sub.add_parser("build-matrix", help="symmetry-adapted tridiagonal operator"))
    p.add_argument("--irrep")
    p.add_argument("--dim", type=int)

    p = common(sub.add_parser("analytic", help="analytic C-QES levels"))
    p.add_argument("--irrep")
    p.add_argument("--system", choices=("trig", "hyp"))

    p = common(sub.add_parser("spectrum", help="pendular spectrum (truncated matrix or FGH)"))
    p.add_argument("--irrep")
    p.add_argument("--method", choices=("truncated", "fgh"))
    p.add_argument("--dim", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--levels", type=int)

    p = common(sub.add_parser("fgh", help="Fourier grid Hamiltonian spectrum"))
    p.add_argument("--system", choices=("trig", "hyp"))
    p.add_argument("--grid", type=int)
    p.add_argument("--levels", type=int)
    p.add_argument("--box", type=float)

    p = common(sub.add_parser("wavefunction", help="sample an eigenfunction"))
    p.add_argument("--system", choices=("trig", "hyp"))
    p.add_argument("--irrep")
    p.add_argument("--n", type=int, help="level index within the irrep")
    p.add_argument("--points", type=int)
    p.add_argument("--dim", type=int)

    p = common(sub.add_parser("scan", help="kappa sweep at fixed beta"), params=False)
    p.add_argument("--beta", type=float)
    p.add_argument("--kappa-min", type=float)
    p.add_argument("--kappa-max", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--levels", type=int)
    p.add_argument("--grid", type=int)
    p.add_argument("--events", help="events CSV path (default <output stem>_events.csv)")

    p = common(sub.add_parser("verify", help="anti-isospectrality report (JSON)"))
    p.add_argument("--tol", type=float)
    p.add_argument("--source", choices=("fgh", "analytic"))
    p.add_argument("--grid", type=int)

    p = common(sub.add_parser("reproduce", help="reproduce reference tables / figure data"),
               params=False)
    p.add_argument("target", choices=TARGETS)
    p.add_argument("--grid", type=int)
    p.add_argument("--steps", type=int)
    return parser


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    cfg = {}
    if getattr(args, "config", None):
        try:
            cfg = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from None
        if not isinstance(cfg, dict):
            raise UsageError("config file must hold a JSON object")
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if getattr(args, attr, None) is None:
            setattr(args, attr, value)
    for key, value in DEFAULTS.items():
        if getattr(args, key, None) is None and hasattr(args, key):
            setattr(args, key, value)
    for key, value in vars(args).items():
        if isinstance(value, float) and not math.isfinite(value):
            raise UsageError(f"--{key.replace('_', '-')} must be finite")
    return args


def _params(args) -> CouplingParams:
    bk = (args.beta, args.kappa)
    ez = (args.eta, args.zeta)
    if any(v is not None for v in bk) and any(v is not None for v in ez):
        raise UsageError("give either --beta/--kappa or --eta/--zeta, not both")
    if all(v is not None for v in bk):
        return CouplingParams(float(args.beta), float(args.kappa))
    if all(v is not None for v in ez):
        return params_from_eta_zeta(float(args.eta), float(args.zeta))
    raise UsageError("coupling parameters required: --beta and --kappa, or --eta and --zeta")


def _header(args, p: CouplingParams | None) -> str:
    skip = {"config", "output", "events", "format"}
    items = [f"cqes {__version__}", f"command={args.command}"]
    if p is not None:
        items += [f"{k}={fmt(v)}" for k, v in p.to_dict().items()]
    for key in sorted(vars(args)):
        if key in skip or key in ("command", "beta", "kappa", "eta", "zeta"):
            continue
        value = getattr(args, key)
        if value is not None:
            items.append(f"{key}={fmt(value)}")
    return "# " + " ".join(items)


def _csv(header_line: str, columns: list[str], rows) -> str:
    buf = io.StringIO()
    buf.write(header_line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


def _emit(args, text: str, path: str | None = None) -> None:
    path = path or args.output
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _table(args, p, columns, rows, meta=None) -> None:
    if args.format == "json":
        payload = {"version": __version__, "command": args.command,
                   "params": p.to_dict() if p else None,
                   "rows": [dict(zip(columns, r)) for r in rows]}
        if meta:
            payload.update(meta)
        _emit(args, _json(payload))
    else:
        _emit(args, _csv(_header(args, p), columns, rows))


def _irreps_for(args, p: CouplingParams) -> list[Irrep]:
    if args.irrep:
        key = str(args.irrep).upper()
        if key in ("A", "B"):
            return [Irrep.A1, Irrep.A2] if key == "A" else [Irrep.B1, Irrep.B2]
        return [Irrep.parse(args.irrep)]
    return list(Irrep)


# --- commands ------------------------------------------------------------------------


def cmd_build_matrix(args) -> int:
    p = _params(args)
    irrep = Irrep.parse(args.irrep or "A1")
    op = build_operator(irrep, p, args.dim)
    if args.format == "json":
        _emit(args, _json({"version": __version__, **op.to_dict()}))
    else:
        rows = []
        for ell in range(op.dim):
            sub = op.sub[ell - 1] if ell else None
            sup = op.sup[ell - 1] if ell else None
            rows.append([ell, op.diag[ell], sub, sup])
        _emit(args, _csv(_header(args, p) + f" split_index={fmt(op.split_index)}",
                         ["ell", "diag", "sub", "sup"], rows))
    return 0


def cmd_analytic(args) -> int:
    p = _params(args)
    if not p.is_integer_kappa():
        raise CqesError(f"kappa={p.kappa} is not an integer; no analytic block")
    k = int(round(p.kappa))
    system = SystemKind.parse(args.system)
    if args.irrep:
        irreps = _irreps_for(args, p)
    else:
        irreps = [Irrep.A1, Irrep.A2] if k % 2 else [Irrep.B1, Irrep.B2]
    levels = []
    for irrep in irreps:
        if system is SystemKind.HYPERBOLIC:
            levels += razavy_spectrum_analytic(irrep.ci_label, k, p.beta)
        else:
            levels += analytic_spectrum(irrep, k, p.beta)
    width = max((len(lv.coefficients) for lv in levels), default=0)
    columns = ["kappa", "irrep", "n", "E_t", "E_h"] + [f"coeff_{i}" for i in range(width)]
    rows = []
    for lv in levels:
        label = lv.irrep.value if system is SystemKind.TRIGONOMETRIC else lv.irrep.ci_label.value
        coeffs = list(lv.coefficients) + [None] * (width - len(lv.coefficients))
        rows.append([k, label, lv.n, lv.energy_t, lv.energy_h, *coeffs])
    _table(args, p, columns, rows)
    return 0


def _spectrum_rows(res):
    return [list(r) for r in res.rows()]


def _check_converged(args, res) -> int:
    bad = [n for n, ok in enumerate(res.convergence.converged) if not ok]
    if bad:
        msg = f"levels {bad} not converged (error estimate above 1e-6)"
        if args.strict:
            raise NotConverged(msg)
        print(f"warning: {msg}", file=sys.stderr)
    return 0


def cmd_spectrum(args) -> int:
    p = _params(args)
    if args.method == "fgh":
        res = fgh_spectrum("trig", p, FghConfig(args.grid, None, args.levels))
        res = _filter_labels(res, _irreps_for(args, p))
    else:
        res = truncated_spectrum(_irreps_for(args, p), p, args.dim, args.levels)
    _table(args, p, ["n", "irrep", "energy", "method", "error_estimate"], _spectrum_rows(res))
    return _check_converged(args, res)


def _filter_labels(res, irreps):
    keep = {i.value for i in irreps}
    if keep == {i.value for i in Irrep}:
        return res
    from dataclasses import replace

    idx = [n for n, lab in enumerate(res.labels) if lab in keep]
    conv = replace(res.convergence,
                   estimated_error=tuple(res.convergence.estimated_error[n] for n in idx),
                   converged=tuple(res.convergence.converged[n] for n in idx))
    return replace(res, labels=tuple(res.labels[n] for n in idx),
                   energies=tuple(res.energies[n] for n in idx), convergence=conv)


def cmd_fgh(args) -> int:
    p = _params(args)
    system = SystemKind.parse(args.system)
    cfg = FghConfig(args.grid, args.box, args.levels)
    try:
        res = fgh_spectrum(system, p, cfg)
    except BoxTooSmall as exc:
        if args.strict:
            raise
        print(f"warning: {exc}", file=sys.stderr)
        res = fgh_spectrum(system, p, FghConfig(args.grid, args.box, args.levels,
                                                check_box=False))
    _table(args, p, ["n", "irrep", "energy", "method", "error_estimate"], _spectrum_rows(res),
           {"box_half_width": res.convergence.box_half_width})
    return _check_converged(args, res)


def cmd_wavefunction(args) -> int:
    p = _params(args)
    system = SystemKind.parse(args.system)
    if system is SystemKind.HYPERBOLIC:
        label = args.irrep or "A'"
        try:
            irrep = Irrep.parse(label)
            ci = irrep.ci_label
        except ValueError:
            ci = CiLabel.parse(label)
        levels = razavy_spectrum_analytic(ci, int(round(p.kappa)), p.beta) \
            if p.is_integer_kappa() else []
        if args.n >= len(levels):
            raise CqesError(f"only {len(levels)} analytic {ci.value} states at kappa={p.kappa}")
        lv = levels[args.n]
        wf = assemble(system, ci, p, lv.coefficients)
        energy, source = lv.energy_h, "analytic"
    else:
        irrep = Irrep.parse(args.irrep or "A1")
        from cqes.operator import block_dimension

        n_block = block_dimension(irrep, p.kappa)
        if n_block is not None and args.n < n_block:
            lv = analytic_spectrum(irrep, int(round(p.kappa)), p.beta)[args.n]
            coeffs, energy, source = lv.coefficients, lv.energy_t, "analytic"
        else:
            if p.beta > 0:
                raise NotConverged("the truncated expansion needs beta < 0; use the shifted "
                                   "coupling (theta -> theta + pi maps beta to -beta)")
            energy, coeffs = truncated_eigenvector(irrep, p, args.n, args.dim or 100)
            source = "truncated"
        wf = assemble(system, irrep, p, coeffs)
    if system is SystemKind.TRIGONOMETRIC:
        coords = -2 * np.pi + 4 * np.pi * np.arange(args.points) / args.points
    else:
        from cqes.wavefn import hyperbolic_extent

        half = 1.5 * hyperbolic_extent(wf.seed, wf.beta, wf.coefficients)
        coords = np.linspace(-half, half, args.points)
    values = wf(coords)
    head = _header(args, p) + f" energy={fmt(energy)} source={source} normalization=unit-L2"
    if args.format == "json":
        _emit(args, _json({"version": __version__, "params": p.to_dict(), "energy": energy,
                           "source": source, "normalization": "unit-L2",
                           "coord": coords, "value": values}))
    else:
        _emit(args, _csv(head, ["coord", "value"], zip(coords, values)))
    return 0


def cmd_scan(args) -> int:
    if args.beta is None:
        raise UsageError("--beta is required")
    scan = eta_scan(float(args.beta), (args.kappa_min, args.kappa_max), n_levels=args.levels,
                    steps=args.steps or 61, grid=args.grid)
    head = _header(args, None) + f" beta={fmt(float(args.beta))}"
    curves = _csv(head, ["kappa", "level", "irrep", "E_t", "minus_E_h"], scan.curve_rows())
    ev_rows = [[e.kind.value, e.kappa_location, "/".join(e.irreps), e.gap] for e in scan.events]
    events = _csv(head, ["kind", "kappa", "irreps", "gap"], ev_rows)
    if args.output:
        _emit(args, curves)
        out = Path(args.output)
        _emit(args, events, args.events or str(out.with_name(out.stem + "_events.csv")))
    else:
        sys.stdout.write(curves + "\n" + events)
    return 0


def cmd_verify(args) -> int:
    p = _params(args)
    cfg = FghConfig(args.grid, None, max(1, math.ceil(p.kappa)) + 1, check_box=False)
    report = verify_ais(p.kappa, p.beta, args.tol, args.source, cfg)
    _emit(args, _json({"version": __version__, **report.to_dict()}))
    return 0


def cmd_reproduce(args) -> int:
    man = reproduce(args.target, grid=args.grid, steps=args.steps or 126)
    out = Path(args.output or f"reproduce-{args.target}")
    out.mkdir(parents=True, exist_ok=True)
    head = f"# cqes {__version__} command=reproduce target={args.target} grid={args.grid}"
    for name, rows in man.files.items():
        (out / name).write_text(_csv(head, [str(c) for c in rows[0]], rows[1:]))
    (out / "manifest.json").write_text(_json({"version": __version__, **man.to_dict()}))
    n_fail = len(man.failures())
    status = "PASS" if man.passed else "FAIL"
    print(f"{status} {args.target}: {len(man.records) - n_fail}/{len(man.records)} cells "
          f"within tolerance -> {out}")
    if not man.passed and args.strict:
        return 2
    return 0


HANDLERS = {
    "build-matrix": cmd_build_matrix,
    "analytic": cmd_analytic,
    "spectrum": cmd_spectrum,
    "fgh": cmd_fgh,
    "wavefunction": cmd_wavefunction,
    "scan": cmd_scan,
    "verify": cmd_verify,
    "reproduce": cmd_reproduce,
}

NUMERICAL = (NotConverged, BoxTooSmall, AnalyticMismatch, DegenerateBlock, Indeterminate)


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError(parser.format_help())
        args = _merge_config(args)
        return HANDLERS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except NUMERICAL as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (CqesError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
