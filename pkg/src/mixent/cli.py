"""Command-line reproduction harness: parameter sweeps, validation, CSV output.

Subcommands::

    mixent sweep --scheme jc --set p=1 --set lam=0.999 --set n=0 \\
                 --sweep gt:0:6.2832:400 --out curve.csv [--validate[=tol]]
    mixent validate {jc-grid,kerr-grid,bs-grid,tt-grid,direct-grid,all}
    mixent preset list
    mixent preset run fig2a [--out path] [--set key=value] [--validate[=tol]]

Exit codes: 0 success, 2 invalid specification, 3 oracle deviation above
tolerance.  CSV files start with the schema comment ``# mixent-csv v1``,
use 17 significant digits and ``\\n`` line endings, and are byte-identical
across runs of the same binary.  Set ``MIXENT_THREADS`` to run sweep rows in
parallel (row order in the file is spec order regardless).
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import oracle, qlinalg, schemes
from .oracle import QuadratureGrid, TruncationTailError, fock_space_for
from .qlinalg import BipartiteMatrix, DegenerateStateError
from .states import AtomFieldParams, CatBasis, MicroState, ThermalParams

__all__ = ["SweepSpec", "main", "run_sweep", "run_validation", "PRESETS"]

CSV_SCHEMA = "# mixent-csv v1"

_JC_TOL = 1e-10
_KERR_TOL = 1e-8


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: a scheme, fixed parameters, one linearly swept parameter."""

    scheme: str
    fixed: dict
    sweep: tuple  # (name, start, stop, count)
    out: str | None = None
    validate_tol: float | None = None


class SpecError(ValueError):
    """Invalid sweep/validation specification (CLI exit code 2)."""


# ---------------------------------------------------------------------------
# scheme registry


def _as_int(value, name):
    x = float(value)
    if x != int(x):
        raise SpecError(f"{name} must be an integer, got {value}")
    return int(x)


def _as_sign(value):
    if value in (1, -1):
        return int(value)
    text = str(value).strip()
    if text in ("+", "+1", "1", "plus"):
        return 1
    if text in ("-", "-1", "minus"):
        return -1
    raise SpecError(f"sign must be + or -, got {value!r}")


def _jc_output(v):
    return schemes.jc_projected(
        AtomFieldParams(p=v["p"], lam=v["lam"], gt=v["gt"], n=_as_int(v["n"], "n"))
    )


def _jc_oracle(v, grid):
    n = _as_int(v["n"], "n")
    lam = float(v["lam"])
    try:
        space = fock_space_for(lam, n)
    except TruncationTailError:
        # The projected block only involves the doublets around n, so it is
        # exact for any truncation containing them; near-unit lam just cannot
        # meet the default tail budget, and the budget is relaxed to what the
        # capped truncation achieves.
        n_max = max(n + 2, 2000)
        budget = min(0.999, max(lam**n_max, 1e-300))
        space = oracle.FockSpace(n_max=n_max, tail_tolerance=budget)
    params = AtomFieldParams(p=v["p"], lam=lam, gt=v["gt"], n=n)
    return oracle.jc_fock_projected(params, space)


def _kerr_args(v):
    return (
        MicroState(v["r"]),
        ThermalParams(v["V"], v["d"]),
        CatBasis(v["gamma"]),
    )


def _kerr_output(v):
    return schemes.kerr_micro_thermal_projected(*_kerr_args(v))


def _kerr_oracle(v, grid):
    m, t, b = _kerr_args(v)
    return oracle.quadrature_projected(
        "kerr_micro_thermal", thermal=t, basis=b, micro=m, grid=grid
    )


def _bs_output(v):
    m, t, b = _kerr_args(v)
    return schemes.bs_scheme_projected(m, t, b, _as_sign(v["sign"]))


def _bs_closed(v):
    m, t, b = _kerr_args(v)
    return schemes.bs_projected_kernel(m, t, b, _as_sign(v["sign"]))


def _bs_oracle(v, grid):
    m, t, b = _kerr_args(v)
    return oracle.quadrature_projected(
        "bs", thermal=t, basis=b, micro=m, sign=_as_sign(v["sign"]), grid=grid
    )


def _tt_output(v):
    m, t, b = _kerr_args(v)
    return schemes.tt_scheme_projected(m, t, b, _as_sign(v["sign"]))


def _tt_closed(v):
    m, t, b = _kerr_args(v)
    return schemes.tt_projected_kernel(m, t, b, _as_sign(v["sign"]))


def _tt_oracle(v, grid):
    m, t, b = _kerr_args(v)
    return oracle.quadrature_projected(
        "tt", thermal=t, basis=b, micro=m, sign=_as_sign(v["sign"]), grid=grid
    )


def _direct_output(v):
    return schemes.direct_kerr_projected(ThermalParams(v["V"], v["d"]), CatBasis(v["gamma"]))


def _direct_oracle(v, grid):
    return oracle.quadrature_projected(
        "direct_kerr",
        thermal=ThermalParams(v["V"], v["d"]),
        basis=CatBasis(v["gamma"]),
        grid=grid,
    )


@dataclass(frozen=True)
class _SchemeDef:
    params: tuple
    sweepable: tuple
    build: callable
    oracle_matrix: callable
    tolerance: float
    closed_matrix: callable = None  # falls back to build(...).matrix


SCHEMES = {
    "jc": _SchemeDef(("p", "lam", "gt", "n"), ("p", "lam", "gt"), _jc_output, _jc_oracle, _JC_TOL),
    "kerr_micro_thermal": _SchemeDef(
        ("r", "V", "d", "gamma"), ("r", "V", "d", "gamma"), _kerr_output, _kerr_oracle, _KERR_TOL
    ),
    "bs": _SchemeDef(
        ("r", "V", "d", "gamma", "sign"),
        ("r", "V", "d", "gamma"),
        _bs_output,
        _bs_oracle,
        _KERR_TOL,
        _bs_closed,
    ),
    "tt": _SchemeDef(
        ("r", "V", "d", "gamma", "sign"),
        ("r", "V", "d", "gamma"),
        _tt_output,
        _tt_oracle,
        _KERR_TOL,
        _tt_closed,
    ),
    "direct_kerr": _SchemeDef(
        ("V", "d", "gamma"), ("V", "d", "gamma"), _direct_output, _direct_oracle, _KERR_TOL
    ),
}


# ---------------------------------------------------------------------------
# figure presets: one representative curve each, gamma = 2 for every
# cross-Kerr panel

# 401 points over a full period put sample points exactly on gt = k pi/2,
# where the n = 0 curve has its exact zeros
_FIG1_SWEEP = ("gt", 0.0, 2.0 * math.pi, 401)

PRESETS = {
    "fig1a": SweepSpec("jc", {"p": 1.0, "lam": 0.999, "n": 0}, _FIG1_SWEEP),
    "fig1b": SweepSpec("jc", {"p": 0.9, "lam": 0.999, "n": 0}, _FIG1_SWEEP),
    "fig1c": SweepSpec("jc", {"p": 0.8, "lam": 0.999, "n": 0}, _FIG1_SWEEP),
    "fig1d": SweepSpec("jc", {"p": 0.5, "lam": 0.0, "n": 0}, _FIG1_SWEEP),
    "fig1e": SweepSpec("jc", {"p": 0.5, "lam": 0.1, "n": 0}, _FIG1_SWEEP),
    "fig1f": SweepSpec("jc", {"p": 0.5, "lam": 0.2, "n": 0}, _FIG1_SWEEP),
    "fig2a": SweepSpec(
        "kerr_micro_thermal", {"gamma": 2.0, "r": 1.0, "V": 10.0}, ("d", 0.0, 40.0, 201)
    ),
    "fig2b": SweepSpec(
        "kerr_micro_thermal", {"gamma": 2.0, "r": 0.1, "V": 10.0}, ("d", 0.0, 40.0, 201)
    ),
    "fig3a": SweepSpec(
        "bs", {"gamma": 2.0, "r": 1.0, "d": 0.0, "sign": 1}, ("V", 1.0, 1000.0, 400)
    ),
    "fig3b": SweepSpec(
        "bs", {"gamma": 2.0, "r": 0.1, "d": 0.0, "sign": 1}, ("V", 1.0, 1000.0, 400)
    ),
    "fig4a": SweepSpec(
        "tt", {"gamma": 2.0, "r": 1.0, "V": 10.0, "sign": 1}, ("d", 0.0, 100.0, 201)
    ),
    "fig4b": SweepSpec(
        "tt", {"gamma": 2.0, "r": 0.1, "V": 10.0, "sign": 1}, ("d", 0.0, 100.0, 201)
    ),
    "fig5": SweepSpec("direct_kerr", {"gamma": 2.0, "V": 1000.0}, ("d", 0.0, 500.0, 251)),
}


# ---------------------------------------------------------------------------
# sweep machinery


def _check_spec(spec: SweepSpec) -> SweepSpec:
    if spec.scheme not in SCHEMES:
        raise SpecError(f"unknown scheme {spec.scheme!r}; choose from {sorted(SCHEMES)}")
    sdef = SCHEMES[spec.scheme]
    name, start, stop, count = spec.sweep
    if name not in sdef.sweepable:
        raise SpecError(
            f"cannot sweep {name!r} for scheme {spec.scheme}; sweepable: {sdef.sweepable}"
        )
    if count < 2:
        raise SpecError(f"sweep count must be >= 2, got {count}")
    if not start < stop:
        raise SpecError(f"sweep needs start < stop, got {start} .. {stop}")
    given = set(spec.fixed) | {name}
    missing = [k for k in sdef.params if k not in given]
    if missing:
        raise SpecError(f"missing parameters for {spec.scheme}: {missing}")
    extra = [k for k in spec.fixed if k not in sdef.params]
    if extra:
        raise SpecError(f"unknown parameters for {spec.scheme}: {extra}")
    if name in spec.fixed:
        raise SpecError(f"{name!r} is both fixed and swept")
    return spec


def _fmt(x: float) -> str:
    return f"{float(x):.17g}"


def _safe_npt(matrix: BipartiteMatrix) -> float:
    try:
        return qlinalg.npt(matrix)
    except DegenerateStateError:
        return float("nan")


def _sweep_row(spec: SweepSpec, sdef: _SchemeDef, value: float):
    values = dict(spec.fixed)
    values[spec.sweep[0]] = value
    out = sdef.build(values)
    row = [value, out.npt_normalized, out.trace]
    deviation = None
    if spec.validate_tol is not None:
        closed = sdef.closed_matrix(values) if sdef.closed_matrix else out.matrix
        ref = sdef.oracle_matrix(values, QuadratureGrid())
        deviation = qlinalg.max_abs_deviation(closed, ref)
        row.extend([_safe_npt(ref), deviation])
    return row, deviation


def run_sweep(spec: SweepSpec):
    """Execute a sweep; returns (exit_code, csv_text, failures).

    ``failures`` lists (row_index, deviation) for validated rows above
    tolerance; the CSV is complete either way.
    """
    spec = _check_spec(spec)
    sdef = SCHEMES[spec.scheme]
    name, start, stop, count = spec.sweep
    xs = np.linspace(float(start), float(stop), int(count))

    threads = int(os.environ.get("MIXENT_THREADS", "1") or "1")
    worker = lambda x: _sweep_row(spec, sdef, float(x))  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(worker, xs))
    else:
        results = [worker(x) for x in xs]

    header = [name, "npt", "trace"]
    if spec.validate_tol is not None:
        header += ["oracle_npt", "max_dev"]
    lines = [CSV_SCHEMA, ",".join(header)]
    failures = []
    for i, (row, deviation) in enumerate(results):
        lines.append(",".join(_fmt(x) for x in row))
        if deviation is not None and deviation > spec.validate_tol:
            failures.append((i, deviation))
    csv_text = "\n".join(lines) + "\n"
    if spec.out:
        with open(spec.out, "w", newline="\n") as fh:
            fh.write(csv_text)
    return (3 if failures else 0), csv_text, failures


# ---------------------------------------------------------------------------
# validation grids


def _kerr_family_grid():
    for v in (1.0, 2.0, 10.0, 100.0, 1000.0):
        for d in (0.0, 1.0, math.sqrt(v), 5.0 * math.sqrt(v)):
            for gamma in (1.0, 2.0, 3.0):
                yield {"V": v, "d": d, "gamma": gamma}


def _grid_points(name: str):
    if name == "jc-grid":
        return [
            {"p": p, "lam": lam, "gt": gt, "n": n}
            for p in (0.0, 0.5, 1.0)
            for lam in (0.0, 0.5, 0.9, 0.99)
            for gt in (0.1, 0.7, 1.3, 2.9)
            for n in (0, 3, 10)
        ]
    if name == "direct-grid":
        return list(_kerr_family_grid())
    points = []
    for base in _kerr_family_grid():
        for r in (0.0, 0.1, 1.0):
            if name == "kerr-grid":
                points.append({**base, "r": r})
            else:
                for sign in (1, -1):
                    points.append({**base, "r": r, "sign": sign})
    return points


VALIDATION_GRIDS = {
    "jc-grid": "jc",
    "kerr-grid": "kerr_micro_thermal",
    "bs-grid": "bs",
    "tt-grid": "tt",
    "direct-grid": "direct_kerr",
}


def validate_grid(name: str, tol: float | None = None):
    """Closed form vs oracle over one named grid; returns (max_dev, worst, tol)."""
    scheme = VALIDATION_GRIDS[name]
    sdef = SCHEMES[scheme]
    tol = sdef.tolerance if tol is None else tol
    grid = QuadratureGrid()
    worst_dev, worst_at = -1.0, None
    for values in _grid_points(name):
        if sdef.closed_matrix:
            closed = sdef.closed_matrix(values)
        else:
            closed = sdef.build(values).matrix
        ref = sdef.oracle_matrix(values, grid)
        dev = qlinalg.max_abs_deviation(closed, ref)
        if dev > worst_dev:
            worst_dev, worst_at = dev, values
    return worst_dev, worst_at, tol


def run_validation(preset: str, tol: float | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    names = list(VALIDATION_GRIDS) if preset == "all" else [preset]
    for name in names:
        if name not in VALIDATION_GRIDS:
            raise SpecError(f"unknown validation preset {name!r}")
    code = 0
    for name in names:
        dev, at, used_tol = validate_grid(name, tol)
        status = "PASS" if dev <= used_tol else "FAIL"
        print(f"{name}: max deviation {dev:.3e} (tol {used_tol:.0e}) {status}", file=out)
        if dev > used_tol:
            print(f"  worst case: {at}", file=out)
            code = 3
    return code


# ---------------------------------------------------------------------------
# argument parsing


def _parse_set(items) -> dict:
    values = {}
    for item in items or ():
        if "=" not in item:
            raise SpecError(f"--set expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        key = key.strip()
        raw = raw.strip()
        if key == "sign":
            values[key] = _as_sign(raw)
            continue
        try:
            values[key] = float(raw)
        except ValueError:
            raise SpecError(f"cannot parse value for {key!r}: {raw!r}") from None
    return values


def _parse_sweep(text: str) -> tuple:
    parts = text.split(":")
    if len(parts) != 4:
        raise SpecError(f"--sweep expects name:start:stop:count, got {text!r}")
    name = parts[0].strip()
    try:
        start, stop = float(parts[1]), float(parts[2])
        count = int(parts[3])
    except ValueError:
        raise SpecError(f"cannot parse sweep range {text!r}") from None
    return (name, start, stop, count)


def _read_config(path: str) -> dict:
    options = {}
    try:
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise SpecError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, value = line.partition("=")
                options[key.strip()] = value.strip()
    except OSError as exc:
        raise SpecError(f"cannot read config {path}: {exc}") from None
    return options


def _parse_validate(value) -> float | None:
    if value is None:
        return None
    if value == "default":
        return -1.0  # sentinel: use the scheme default
    try:
        return float(value)
    except ValueError:
        raise SpecError(f"--validate expects a tolerance, got {value!r}") from None


def _resolve_tol(tol_request, scheme: str) -> float | None:
    if tol_request is None:
        return None
    if tol_request == -1.0:
        return SCHEMES[scheme].tolerance
    return tol_request


def _spec_from_args(args) -> SweepSpec:
    fixed = {}
    sweep = None
    out = args.out
    scheme = args.scheme
    validate = _parse_validate(args.validate)
    if getattr(args, "config", None):
        config = _read_config(args.config)
        scheme = config.pop("scheme", scheme)
        if "sweep" in config:
            sweep = _parse_sweep(config.pop("sweep"))
        out = config.pop("out", out)
        if "validate" in config:
            validate = _parse_validate(config.pop("validate"))
        fixed.update(_parse_set(f"{k}={v}" for k, v in config.items()))
    fixed.update(_parse_set(args.set))
    if args.sweep:
        sweep = _parse_sweep(args.sweep)
    if scheme is None:
        raise SpecError("no scheme given (use --scheme or a config file)")
    if sweep is None:
        raise SpecError("no sweep given (use --sweep name:start:stop:count)")
    tol = _resolve_tol(validate, scheme) if scheme in SCHEMES else None
    return SweepSpec(scheme=scheme, fixed=fixed, sweep=sweep, out=out, validate_tol=tol)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixent", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a parameter sweep and emit CSV")
    sweep.add_argument("--scheme", choices=sorted(SCHEMES), help="interaction scheme")
    sweep.add_argument("--set", action="append", metavar="KEY=VALUE", help="fix a parameter")
    sweep.add_argument("--sweep", metavar="NAME:START:STOP:COUNT", help="swept parameter")
    sweep.add_argument("--out", metavar="PATH", help="CSV output path (default stdout)")
    sweep.add_argument(
        "--validate",
        nargs="?",
        const="default",
        metavar="TOL",
        help="run the oracle per row; optional tolerance override",
    )
    sweep.add_argument("--config", metavar="PATH", help="flat key=value config file")

    val = sub.add_parser("validate", help="closed form vs oracle on a named grid")
    val.add_argument("grid", choices=sorted(VALIDATION_GRIDS) + ["all"])
    val.add_argument("--tol", type=float, default=None, help="tolerance override")

    preset = sub.add_parser("preset", help="list or run figure presets")
    psub = preset.add_subparsers(dest="preset_command", required=True)
    psub.add_parser("list", help="list available presets")
    prun = psub.add_parser("run", help="run a preset sweep")
    prun.add_argument("name", choices=sorted(PRESETS))
    prun.add_argument("--set", action="append", metavar="KEY=VALUE")
    prun.add_argument("--out", metavar="PATH")
    prun.add_argument("--validate", nargs="?", const="default", metavar="TOL")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "sweep":
            spec = _spec_from_args(args)
            code, csv_text, failures = run_sweep(spec)
            if not spec.out:
                sys.stdout.write(csv_text)
            for index, dev in failures[:5]:
                print(f"validation failure at row {index}: deviation {dev:.3e}", file=sys.stderr)
            return code

        if args.command == "validate":
            return run_validation(args.grid, args.tol)

        if args.command == "preset":
            if args.preset_command == "list":
                for name in sorted(PRESETS):
                    spec = PRESETS[name]
                    swept, start, stop, count = spec.sweep
                    fixed = " ".join(f"{k}={v}" for k, v in sorted(spec.fixed.items()))
                    print(
                        f"{name}: scheme={spec.scheme} {fixed} "
                        f"sweep {swept}:{_fmt(start)}..{_fmt(stop)} x{count}"
                    )
                return 0
            base = PRESETS[args.name]
            overrides = _parse_set(args.set)
            fixed = {**base.fixed, **{k: v for k, v in overrides.items() if k != base.sweep[0]}}
            tol = _resolve_tol(_parse_validate(args.validate), base.scheme)
            spec = replace(
                base,
                fixed=fixed,
                out=args.out or f"{args.name}.csv",
                validate_tol=tol,
            )
            code, _, failures = run_sweep(spec)
            for index, dev in failures[:5]:
                print(f"validation failure at row {index}: deviation {dev:.3e}", file=sys.stderr)
            return code
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TruncationTailError, DegenerateStateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except oracle.OracleUnstableError as exc:
        print(f"oracle error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
