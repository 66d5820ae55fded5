"""Command-line driver.

Subcommands: spectrum, profile, converge, table1, fit. Every flag can be
overridden by an environment variable with the DICKE_ prefix (flag --xmax-range
-> DICKE_XMAX_RANGE); precedence is flag > environment > default. Outputs are
CSV (default) or JSON, one analysis series per file, each carrying the full
resolved configuration for provenance. Re-running a command with the same
configuration produces byte-identical files.

Exit codes: 0 success, 2 configuration error, 3 dimension cap exceeded,
4 eigensolver non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import convergence as conv
from .build import build_hamiltonian, solve
from .eigensolver import eigenvalues_only
from .matrixio import write_matrix_dump
from .model import (
    DEFAULT_DIMENSION_CAP,
    BasisKind,
    BasisSpec,
    DimensionCapError,
    make_params,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAP = 3
EXIT_SOLVER = 4

ENV_PREFIX = "DICKE_"


class ConfigError(ValueError):
    """Invalid run configuration; maps to exit code 2."""


def _parse_range(text: str) -> tuple[int, int]:
    try:
        lo, hi = text.split(":")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise ConfigError(f"expected a range like A:B, got {text!r}") from None
    if lo < 0 or hi < lo:
        raise ConfigError(f"range must satisfy 0 <= A <= B, got {text!r}")
    return lo, hi


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.replace(",", " ").split()]


def _parse_ints(text: str) -> list[int]:
    return [int(tok) for tok in text.replace(",", " ").split()]


def _resolve(args: argparse.Namespace, dest: str, env_cast: Callable, default=None):
    """Flag value if given, else DICKE_<DEST> from the environment, else default."""
    value = getattr(args, dest, None)
    if value is not None:
        return value
    env_key = ENV_PREFIX + dest.upper()
    if env_key in os.environ:
        try:
            return env_cast(os.environ[env_key])
        except (ValueError, ConfigError) as exc:
            raise ConfigError(f"invalid {env_key}={os.environ[env_key]!r}: {exc}") from None
    return default


def _basis_kinds(value: str) -> list[BasisKind]:
    if value == "both":
        return [BasisKind.FOCK, BasisKind.COHERENT]
    try:
        return [BasisKind(value)]
    except ValueError:
        raise ConfigError(f"basis must be fock, coherent, or both, got {value!r}") from None


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


class OutputWriter:
    """Serializes result tables; atomic per file, removable as a group on failure."""

    def __init__(self, out_dir: str, fmt: str, config: dict):
        if fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {fmt!r}")
        self.out_dir = Path(out_dir)
        self.fmt = fmt
        self.config = config
        self.written: list[Path] = []
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def _commit(self, path: Path, data: bytes) -> Path:
        tmp = path.with_name(path.name + ".tmp")
        tmp.write_bytes(data)
        os.replace(tmp, path)
        self.written.append(path)
        return path

    def write_table(
        self,
        stem: str,
        columns: Sequence[str],
        rows: Sequence[Sequence],
        comments: Sequence[str] = (),
        extra: Optional[dict] = None,
    ) -> Path:
        config_json = json.dumps(self.config, sort_keys=True)
        if self.fmt == "csv":
            lines = [f"# config: {config_json}"]
            lines.extend(f"# {comment}" for comment in comments)
            lines.append(",".join(columns))
            lines.extend(",".join(_cell(v) for v in row) for row in rows)
            data = ("\n".join(lines) + "\n").encode()
            return self._commit(self.out_dir / f"{stem}.csv", data)
        payload = {
            "config": self.config,
            "columns": list(columns),
            "rows": [[None if v is None else v for v in row] for row in rows],
        }
        if comments:
            payload["comments"] = list(comments)
        if extra:
            payload.update(extra)
        data = (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode()
        return self._commit(self.out_dir / f"{stem}.json", data)

    def write_matrix(self, stem: str, entries: np.ndarray) -> Path:
        path = self.out_dir / f"{stem}.bin"
        tmp = path.with_name(path.name + ".tmp")
        write_matrix_dump(tmp, entries)
        os.replace(tmp, path)
        self.written.append(path)
        return path

    def discard_all(self) -> None:
        for path in self.written:
            path.unlink(missing_ok=True)
        self.written.clear()


def _fit_block(fit: conv.FitResult) -> tuple[str, dict]:
    as_dict = {
        "intercept": fit.intercept,
        "slope": fit.slope,
        "rms_residual": fit.rms_residual,
        "n_points": fit.n_points,
    }
    return f"fit: {json.dumps(as_dict, sort_keys=True)}", {"fit": as_dict}


def _common_params(args: argparse.Namespace):
    omega = _resolve(args, "omega", float, 1.0)
    omega0 = _resolve(args, "omega0", float, 1.0)
    gamma = _resolve(args, "gamma", float, None)
    j = _resolve(args, "j", float, None)
    if gamma is None:
        raise ConfigError("missing --gamma")
    if j is None:
        raise ConfigError("missing --j")
    return make_params(omega, omega0, gamma, j)


def _out_fmt_cap(args: argparse.Namespace):
    out = _resolve(args, "out", str, ".")
    fmt = _resolve(args, "format", str, "csv")
    cap = _resolve(args, "cap", int, DEFAULT_DIMENSION_CAP)
    if cap < 1:
        raise ConfigError(f"cap must be >= 1, got {cap!r}")
    return out, fmt, cap


def cmd_spectrum(args, register) -> None:
    params = _common_params(args)
    kinds = _basis_kinds(_resolve(args, "basis", str, "both"))
    x_max = _resolve(args, "xmax", int, None)
    if x_max is None:
        raise ConfigError("missing --xmax")
    out, fmt, cap = _out_fmt_cap(args)
    dump = bool(getattr(args, "dump_matrix", False))

    config = {
        "command": "spectrum", "omega": params.omega, "omega0": params.omega0,
        "gamma": params.gamma, "j": params.j, "basis": [k.value for k in kinds],
        "xmax": x_max, "out": out, "format": fmt, "cap": cap,
        "dump_matrix": dump, "seed": None,
    }
    writer = register(OutputWriter(out, fmt, config))
    for kind in kinds:
        matrix = build_hamiltonian(params, BasisSpec(kind=kind, x_max=x_max), cap=cap)
        energies = eigenvalues_only(matrix)
        rows = [(k + 1, float(e)) for k, e in enumerate(energies)]
        writer.write_table(f"spectrum_{kind.value}", ("k", "E"), rows)
        if dump:
            writer.write_matrix(f"hamiltonian_{kind.value}", matrix.entries)


def cmd_profile(args, register) -> None:
    params = _common_params(args)
    kinds = _basis_kinds(_resolve(args, "basis", str, "both"))
    x_max = _resolve(args, "xmax", int, None)
    if x_max is None:
        raise ConfigError("missing --xmax")
    ks = _resolve(args, "k", _parse_ints, [1])
    if not ks:
        raise ConfigError("state selection is empty")
    out, fmt, cap = _out_fmt_cap(args)
    dim = (x_max + 1) * (params.two_j + 1)
    for k in ks:
        if not 1 <= k <= dim:
            raise ConfigError(f"state k={k} outside 1..{dim}")

    config = {
        "command": "profile", "omega": params.omega, "omega0": params.omega0,
        "gamma": params.gamma, "j": params.j, "basis": [k.value for k in kinds],
        "xmax": x_max, "k": list(ks), "out": out, "format": fmt, "cap": cap,
        "seed": None,
    }
    writer = register(OutputWriter(out, fmt, config))
    for kind in kinds:
        solution = solve(params, BasisSpec(kind=kind, x_max=x_max), cap=cap)
        for k in ks:
            profile = conv.probability_profile(solution, k)
            rows = list(zip(profile.x_values.tolist(), (float(p) for p in profile.p)))
            writer.write_table(f"profile_k{k}_{kind.value}", ("x", "P"), rows)


def cmd_converge(args, register) -> None:
    params = _common_params(args)
    kinds = _basis_kinds(_resolve(args, "basis", str, "both"))
    x_range = _resolve(args, "xmax_range", _parse_range, None)
    x_max = _resolve(args, "xmax", int, None)
    eps = _resolve(args, "eps", _parse_floats, [1e-6, 1e-4])
    want_fit = bool(getattr(args, "fit", False))
    out, fmt, cap = _out_fmt_cap(args)
    if (x_range is None) == (x_max is None):
        raise ConfigError("exactly one of --xmax or --xmax-range is required")
    if not eps or any(e <= 0 for e in eps):
        raise ConfigError(f"tolerances must be positive, got {eps!r}")

    config = {
        "command": "converge", "omega": params.omega, "omega0": params.omega0,
        "gamma": params.gamma, "j": params.j, "basis": [k.value for k in kinds],
        "eps": list(eps), "out": out, "format": fmt, "cap": cap,
        "fit": want_fit, "seed": None,
    }

    if x_range is not None:
        k = _resolve(args, "k", int, 1)
        if k < 1:
            raise ConfigError(f"k must be >= 1, got {k}")
        config.update({"xmax_range": list(x_range), "k": k})
        writer = register(OutputWriter(out, fmt, config))
        lo, hi = x_range
        for kind in kinds:
            rows = []
            previous = None
            if lo >= 1:
                previous = eigenvalues_only(
                    build_hamiltonian(params, BasisSpec(kind=kind, x_max=lo - 1), cap=cap)
                )
            for x in range(lo, hi + 1):
                solution = solve(params, BasisSpec(kind=kind, x_max=x), cap=cap)
                dim = solution.dimension
                weight = conv.delta_p(solution, k) if k <= dim else None
                diff = None
                if previous is not None and k <= previous.size:
                    diff = float(abs(solution.energies[k - 1] - previous[k - 1]))
                rows.append((x, weight, diff))
                previous = solution.energies
            comments, extra = [], None
            if want_fit:
                points = [(x, -math.log10(w)) for x, w, _ in rows if w and w > 0.0]
                fit = conv.linear_fit([p[0] for p in points], [p[1] for p in points])
                comment, extra = _fit_block(fit)
                comments.append(comment)
            writer.write_table(
                f"scan_{kind.value}", ("x_max", "delta_p", "delta_e"), rows, comments, extra
            )
        return

    kmax = _resolve(args, "kmax", int, None)
    if kmax is not None and kmax < 1:
        raise ConfigError(f"state selection is empty (kmax={kmax})")
    config.update({"xmax": x_max, "kmax": kmax})
    writer = register(OutputWriter(out, fmt, config))
    for kind in kinds:
        report = conv.convergence_report(
            params, kind, x_max, tolerances=eps, kmax=kmax, cap=cap
        )
        rows = [
            (r.k, r.energy, r.delta_p, r.delta_e, r.degenerate_suspect)
            for r in report.rows
        ]
        comments = [
            "counts: " + json.dumps({repr(e): c for e, c in report.counts.items()}, sort_keys=True)
        ]
        extra = {"counts": {repr(e): c for e, c in report.counts.items()}}
        if want_fit:
            xs, ys, _ = conv.energy_precision_points(
                params, kind, x_max, epsilon=max(eps), kmax=kmax or 250, cap=cap
            )
            fit = conv.linear_fit(xs, ys)
            comment, fit_extra = _fit_block(fit)
            comments.append(comment)
            extra.update(fit_extra)
        writer.write_table(
            f"states_{kind.value}",
            ("k", "E", "delta_p", "delta_e", "degenerate_suspect"),
            rows, comments, extra,
        )


def cmd_table1(args, register) -> None:
    omega = _resolve(args, "omega", float, 1.0)
    omega0 = _resolve(args, "omega0", float, 1.0)
    gamma = _resolve(args, "gamma", float, 0.5)
    j_values = _resolve(args, "j", _parse_floats, [10.0, 20.0, 40.0])
    x_values = _resolve(args, "xmax", _parse_ints, [10, 15, 20])
    eps = _resolve(args, "eps", _parse_floats, [1e-6, 1e-4])
    jobs = _resolve(args, "jobs", int, 1)
    out, fmt, cap = _out_fmt_cap(args)
    if not eps or any(e <= 0 for e in eps):
        raise ConfigError(f"tolerances must be positive, got {eps!r}")
    if not j_values or not x_values:
        raise ConfigError("j and truncation lists must be non-empty")
    if jobs < 1:
        raise ConfigError(f"jobs must be >= 1, got {jobs}")

    config = {
        "command": "table1", "omega": omega, "omega0": omega0, "gamma": gamma,
        "j": list(j_values), "xmax": list(x_values), "eps": list(eps),
        "out": out, "format": fmt, "cap": cap, "jobs": jobs, "seed": None,
    }
    writer = register(OutputWriter(out, fmt, config))
    grid = conv.convergence_count_grid(
        j_values, x_values, tolerances=eps,
        omega=omega, omega0=omega0, gamma=gamma, jobs=jobs, cap=cap,
    )
    columns = ["j", "x_max"]
    for i in range(1, len(eps) + 1):
        columns += [f"fock_eps{i}", f"coherent_eps{i}"]
    rows = []
    for row in grid:
        cells: list = [row.j, row.x_max]
        for e in eps:
            cells.append(row.counts[(BasisKind.FOCK.value, float(e))])
            cells.append(row.counts[(BasisKind.COHERENT.value, float(e))])
        rows.append(cells)
    writer.write_table("table1", columns, rows)


def cmd_fit(args, register) -> None:
    relation = _resolve(args, "relation", str, None)
    if relation not in ("truncation", "energy"):
        raise ConfigError(f"--relation must be truncation or energy, got {relation!r}")
    params = _common_params(args)
    kinds = _basis_kinds(_resolve(args, "basis", str, "coherent"))
    out, fmt, cap = _out_fmt_cap(args)

    if relation == "truncation":
        x_range = _resolve(args, "xmax_range", _parse_range, (2, 20))
        k = _resolve(args, "k", int, 1)
        if k < 1:
            raise ConfigError(f"k must be >= 1, got {k}")
        config = {
            "command": "fit", "relation": "truncation", "omega": params.omega,
            "omega0": params.omega0, "gamma": params.gamma, "j": params.j,
            "basis": [kd.value for kd in kinds], "xmax_range": list(x_range),
            "k": k, "out": out, "format": fmt, "cap": cap, "seed": None,
        }
        writer = register(OutputWriter(out, fmt, config))
        for kind in kinds:
            xs, ys = conv.truncation_precision_points(
                params, kind, range(x_range[0], x_range[1] + 1), k=k, cap=cap
            )
            fit = conv.linear_fit(xs, ys)
            comment, extra = _fit_block(fit)
            rows = list(zip((int(x) for x in xs), (float(y) for y in ys)))
            writer.write_table(
                f"fit_truncation_{kind.value}",
                ("x_max", "neg_log10_delta_p"), rows, [comment], extra,
            )
        return

    x_max = _resolve(args, "xmax", int, None)
    if x_max is None:
        raise ConfigError("missing --xmax")
    eps_list = _resolve(args, "eps", _parse_floats, [1e-4])
    if len(eps_list) != 1 or eps_list[0] <= 0:
        raise ConfigError(f"energy relation takes one positive tolerance, got {eps_list!r}")
    kmax = _resolve(args, "kmax", int, 250)
    if kmax < 1:
        raise ConfigError(f"state selection is empty (kmax={kmax})")
    config = {
        "command": "fit", "relation": "energy", "omega": params.omega,
        "omega0": params.omega0, "gamma": params.gamma, "j": params.j,
        "basis": [kd.value for kd in kinds], "xmax": x_max, "eps": eps_list,
        "kmax": kmax, "out": out, "format": fmt, "cap": cap, "seed": None,
    }
    writer = register(OutputWriter(out, fmt, config))
    for kind in kinds:
        xs, ys, ks = conv.energy_precision_points(
            params, kind, x_max, epsilon=eps_list[0], kmax=kmax, cap=cap
        )
        fit = conv.linear_fit(xs, ys)
        comment, extra = _fit_block(fit)
        rows = [
            (int(k), float(x), float(y)) for k, x, y in zip(ks, xs, ys)
        ]
        writer.write_table(
            f"fit_energy_{kind.value}",
            ("k", "log10_delta_e", "neg_log10_delta_p"), rows, [comment], extra,
        )


def _add_common(sub: argparse.ArgumentParser, *, gamma_required: bool = True) -> None:
    sub.add_argument("--omega", type=float, default=None, help="boson frequency (default 1)")
    sub.add_argument("--omega0", type=float, default=None, help="atomic splitting (default 1)")
    sub.add_argument("--gamma", type=float, default=None, help="coupling strength")
    sub.add_argument("--out", type=str, default=None, help="output directory (default .)")
    sub.add_argument("--format", type=str, default=None, choices=("csv", "json"),
                     help="output format (default csv)")
    sub.add_argument("--cap", type=int, default=None,
                     help=f"dimension cap (default {DEFAULT_DIMENSION_CAP})")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dicke",
        description="Finite-size Dicke model: spectra, profiles, and truncation convergence "
                    "in the Fock and extended coherent bases.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    spectrum = subs.add_parser("spectrum", help="eigenvalues at one truncation")
    _add_common(spectrum)
    spectrum.add_argument("--j", type=float, default=None, help="pseudo-spin length")
    spectrum.add_argument("--basis", type=str, default=None,
                          choices=("fock", "coherent", "both"))
    spectrum.add_argument("--xmax", type=int, default=None, help="boson truncation")
    spectrum.add_argument("--dump-matrix", action="store_true",
                          help="also dump the assembled Hamiltonian (binary)")

    profile = subs.add_parser("profile", help="boson-layer probability profile of selected states")
    _add_common(profile)
    profile.add_argument("--j", type=float, default=None, help="pseudo-spin length")
    profile.add_argument("--basis", type=str, default=None,
                         choices=("fock", "coherent", "both"))
    profile.add_argument("--xmax", type=int, default=None, help="boson truncation")
    profile.add_argument("--k", type=int, nargs="+", default=None,
                         help="state indices, 1-based (default 1)")

    converge = subs.add_parser(
        "converge", help="per-state convergence table at one truncation, or a truncation scan"
    )
    _add_common(converge)
    converge.add_argument("--j", type=float, default=None, help="pseudo-spin length")
    converge.add_argument("--basis", type=str, default=None,
                          choices=("fock", "coherent", "both"))
    converge.add_argument("--xmax", type=int, default=None, help="single truncation (per-state table)")
    converge.add_argument("--xmax-range", dest="xmax_range", type=_parse_range, default=None,
                          help="A:B truncation scan for one state")
    converge.add_argument("--k", type=int, default=None, help="state for the scan (default 1)")
    converge.add_argument("--kmax", type=int, default=None, help="limit per-state table to k <= kmax")
    converge.add_argument("--eps", type=float, nargs="+", default=None,
                          help="tolerances for counts (default 1e-6 1e-4)")
    converge.add_argument("--fit", action="store_true", help="append a least-squares fit block")

    table1 = subs.add_parser(
        "table1", help="converged-state count grid over (j, truncation) for both bases"
    )
    _add_common(table1)
    table1.add_argument("--j", type=float, nargs="+", default=None,
                        help="pseudo-spin lengths (default 10 20 40)")
    table1.add_argument("--xmax", type=int, nargs="+", default=None,
                        help="truncations (default 10 15 20)")
    table1.add_argument("--eps", type=float, nargs="+", default=None,
                        help="tolerances (default 1e-6 1e-4)")
    table1.add_argument("--jobs", type=int, default=None,
                        help="worker threads for independent cells (default 1)")

    fit = subs.add_parser("fit", help="least-squares fits of wave-function precision")
    _add_common(fit)
    fit.add_argument("--relation", type=str, default=None, choices=("truncation", "energy"),
                     help="precision vs truncation, or precision vs energy difference")
    fit.add_argument("--j", type=float, default=None, help="pseudo-spin length")
    fit.add_argument("--basis", type=str, default=None,
                     choices=("fock", "coherent", "both"))
    fit.add_argument("--xmax", type=int, default=None, help="truncation (energy relation)")
    fit.add_argument("--xmax-range", dest="xmax_range", type=_parse_range, default=None,
                     help="A:B truncations (truncation relation; default 2:20)")
    fit.add_argument("--k", type=int, default=None, help="state for the truncation relation (default 1)")
    fit.add_argument("--kmax", type=int, default=None,
                     help="max states for the energy relation (default 250)")
    fit.add_argument("--eps", type=float, nargs="+", default=None,
                     help="energy-difference threshold (default 1e-4)")

    return parser


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "profile": cmd_profile,
    "converge": cmd_converge,
    "table1": cmd_table1,
    "fit": cmd_fit,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    active: dict[str, OutputWriter] = {}

    def register(writer: OutputWriter) -> OutputWriter:
        active["writer"] = writer
        return writer

    try:
        _COMMANDS[args.command](args, register)
    except (ConfigError, ValueError) as exc:
        if "writer" in active:
            active["writer"].discard_all()
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DimensionCapError as exc:
        if "writer" in active:
            active["writer"].discard_all()
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except np.linalg.LinAlgError as exc:
        if "writer" in active:
            active["writer"].discard_all()
        print(f"error: eigensolver did not converge: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
