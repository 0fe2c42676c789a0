"""Command-line front end.

Subcommands: trajectory, metrics, sweep, critical, oracle-check, figure.
Parameters come from flags or from a `--config` key-value file (flags win).
Exit codes: 0 success, 1 numerical failure, 2 usage error; failures print
one `error: <reason>: <detail>` line on stderr.

Units are canonical: gamma0 = 1 for the Lorentzian family and omega0 = 1
for the Ohmic family; other values are rejected rather than rescaled.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from itertools import product

from .amplitude import QubitState, sample_trajectory
from .metrics import evaluate_metrics
from .oracle import (
    OracleConvergenceError,
    decay_rate_bruteforce,
    evolve_dressed,
    evolve_time_local,
    pair_search,
)
from .spectral import LorentzianBath, OhmicBath, SystemParams, beta, decay_rate
from .sweep import (
    CSV_HEADER,
    NoBracketError,
    SweepSpec,
    figure_dataset,
    find_critical,
    run_sweep,
    write_csv,
)

__all__ = ["main"]


class UsageError(Exception):
    """Bad or missing command-line input."""


# ---------------------------------------------------------------------------
# Argument plumbing.  Every value flag defaults to None so that explicit
# flags, config-file entries, and built-in defaults can be layered in that
# order of precedence.

_DEST_TO_KEY = {"lam": "lambda", "fmt": "format", "range_": "range"}


def _key(dest: str) -> str:
    return _DEST_TO_KEY.get(dest, dest.replace("_", "-"))


def _add_system_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", choices=("lorentzian", "ohmic"))
    p.add_argument("--gamma0", type=float)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--omega-c", dest="omega_c", type=float)
    p.add_argument("--omega0", type=float)
    p.add_argument("--coupling", type=float)
    p.add_argument("--tau", type=float)


def _add_io_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out")
    p.add_argument("--format", dest="fmt", choices=("csv", "json-lines"))
    p.add_argument("--config")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cavityqsl",
        description="Backflow and speed-limit metrics of a lossy-cavity qubit.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("trajectory", help="sample population and rates over [0, tau]")
    _add_system_flags(p)
    p.add_argument("--steps", type=int)
    _add_io_flags(p)

    p = sub.add_parser("metrics", help="N, QSLT ratio, and identity residual")
    _add_system_flags(p)
    _add_io_flags(p)

    for name in ("sweep", "critical"):
        p = sub.add_parser(
            name,
            help="grid sweep of the metrics" if name == "sweep" else "bisect the backflow onset",
        )
        _add_system_flags(p)
        p.add_argument("--sweep-param", dest="sweep_param", choices=("coupling", "delta"))
        p.add_argument("--range", dest="range_", metavar="LO:HI")
        p.add_argument("--steps", type=int)
        p.add_argument("--threshold", type=float)
        p.add_argument("--workers", type=int)
        _add_io_flags(p)

    p = sub.add_parser("oracle-check", help="run the brute-force validation battery")
    p.add_argument("--workers", type=int)
    p.add_argument("--config")

    p = sub.add_parser("figure", help="compute a preset curve family")
    p.add_argument("figure", nargs="?", choices=("fig1", "fig2", "fig3"))
    p.add_argument("--tau", type=float)
    p.add_argument("--steps", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--no-plots", dest="no_plots", action="store_true")
    _add_io_flags(p)
    return parser


def _load_config(path: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                body = line.split("#", 1)[0].strip()
                if not body:
                    continue
                if "=" not in body:
                    raise UsageError(f"{path}:{lineno}: expected `key = value`")
                key, _, value = body.partition("=")
                cfg[key.strip()] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    return cfg


class _Resolver:
    """Layer flag values over config entries over defaults."""

    def __init__(self, args: argparse.Namespace):
        self.args = args
        path = getattr(args, "config", None)
        self.cfg = _load_config(path) if path else {}

    def given(self, dest: str) -> bool:
        return getattr(self.args, dest, None) is not None or _key(dest) in self.cfg

    def get(self, dest, cast, default=None, required=False, choices=None):
        value = getattr(self.args, dest, None)
        if value is None and _key(dest) in self.cfg:
            raw = self.cfg[_key(dest)]
            try:
                value = cast(raw)
            except ValueError:
                raise UsageError(f"config key {_key(dest)}: bad value {raw!r}") from None
        if value is None:
            value = default
        if value is None and required:
            raise UsageError(f"missing required parameter --{_key(dest)}")
        if choices is not None and value is not None and value not in choices:
            raise UsageError(f"--{_key(dest)} must be one of {choices}, got {value!r}")
        return value

    def flag(self, dest: str) -> bool:
        if getattr(self.args, dest, False):
            return True
        raw = self.cfg.get(_key(dest), "")
        return raw.lower() in ("1", "true", "yes", "on")


def _default_workers() -> int:
    return os.cpu_count() or 1


def _build_system(r: _Resolver) -> tuple[SystemParams, float]:
    """System parameters plus the family default tau."""
    family = r.get("family", str, required=True, choices=("lorentzian", "ohmic"))
    if family == "lorentzian":
        for dest in ("omega_c",):
            if r.given(dest):
                raise UsageError(f"--{_key(dest)} is not a lorentzian parameter")
        gamma0 = r.get("gamma0", float, default=1.0)
        if gamma0 != 1.0:
            raise UsageError("gamma0 is the lorentzian reference unit and must be 1")
        model = LorentzianBath(
            gamma0=gamma0,
            lam=r.get("lam", float, default=5.0),
            delta=r.get("delta", float, default=0.0),
        )
        omega0 = r.get("omega0", float, default=50.0)
        tau_default = 1.0
    else:
        for dest in ("gamma0", "lam", "delta"):
            if r.given(dest):
                raise UsageError(f"--{_key(dest)} is not an ohmic parameter")
        omega0 = r.get("omega0", float, default=1.0)
        if omega0 != 1.0:
            raise UsageError("omega0 is the ohmic reference unit and must be 1")
        model = OhmicBath(omega_c=r.get("omega_c", float, default=1.0))
        tau_default = 8.73
    coupling = r.get("coupling", float, default=0.0)
    return SystemParams(omega0=omega0, coupling=coupling, model=model), tau_default


def _parse_range(raw: str) -> tuple[float, float]:
    lo, sep, hi = raw.partition(":")
    if not sep:
        raise UsageError(f"malformed range {raw!r}, expected LO:HI")
    try:
        return float(lo), float(hi)
    except ValueError:
        raise UsageError(f"malformed range {raw!r}, expected LO:HI") from None


def _write_text(path: str, content: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(content)
    os.replace(tmp, path)


def _emit(content: str, out: str | None) -> None:
    if out:
        _write_text(out, content)
    else:
        sys.stdout.write(content)


def _rows_text(rows, fmt: str) -> str:
    if fmt == "csv":
        lines = [CSV_HEADER]
        lines += [
            f"{r.param:.12g},{r.n_blp:.12g},{r.qslt_ratio:.12g},{r.final_pop:.12g}"
            for r in rows
        ]
    else:
        lines = []
        for r in rows:
            obj = {
                "param": r.param,
                "n_blp": r.n_blp,
                "qslt_ratio": r.qslt_ratio,
                "final_pop": r.final_pop,
            }
            if r.error is not None:
                obj["error"] = r.error
            lines.append(json.dumps(obj))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Subcommands


def _cmd_trajectory(r: _Resolver) -> int:
    sys_params, tau_default = _build_system(r)
    tau = r.get("tau", float, default=tau_default)
    steps = r.get("steps", int, default=400)
    traj = sample_trajectory(sys_params, tau, n=steps)
    fmt = r.get("fmt", str, default="csv", choices=("csv", "json-lines"))
    cols = ("t", "population", "population_rate", "decay_rate", "frequency_shift")
    data = zip(traj.times, traj.pop, traj.pop_rate, traj.gamma_t, traj.shift_t)
    if fmt == "csv":
        lines = [",".join(cols)]
        lines += [",".join(f"{v:.12g}" for v in row) for row in data]
        text = "\n".join(lines) + "\n"
    else:
        text = "".join(
            json.dumps(dict(zip(cols, map(float, row)))) + "\n" for row in data
        )
    _emit(text, r.get("out", str))
    return 0


def _cmd_metrics(r: _Resolver) -> int:
    sys_params, tau_default = _build_system(r)
    tau = r.get("tau", float, default=tau_default)
    m = evaluate_metrics(sys_params, tau)
    obj = {
        "n_blp": m.n_blp,
        "qslt_ratio": m.qslt_ratio,
        "final_pop": m.final_pop,
        "relation_residual": m.relation_residual,
        "literal_ratio": m.literal_ratio,
    }
    _emit(json.dumps(obj) + "\n", r.get("out", str))
    return 0


def _sweep_spec(r: _Resolver) -> tuple[SweepSpec, dict[str, str]]:
    sys_params, tau_default = _build_system(r)
    tau = r.get("tau", float, default=tau_default)
    param = r.get("sweep_param", str, required=True, choices=("coupling", "delta"))
    target = "Omega" if param == "coupling" else "delta"
    lo, hi = _parse_range(r.get("range_", str, required=True))
    steps = r.get("steps", int, default=400)
    spec = SweepSpec(target, lo, hi, steps, tau, sys_params)

    manifest: dict[str, str] = {}
    m = sys_params.model
    if isinstance(m, LorentzianBath):
        manifest["family"] = "lorentzian"
        manifest["gamma0"] = f"{m.gamma0:.12g}"
        manifest["lambda"] = f"{m.lam:.12g}"
        manifest["delta"] = f"{m.delta:.12g}"
    else:
        manifest["family"] = "ohmic"
        manifest["omega-c"] = f"{m.omega_c:.12g}"
    manifest["omega0"] = f"{sys_params.omega0:.12g}"
    manifest["coupling"] = f"{sys_params.coupling:.12g}"
    manifest["tau"] = f"{tau:.12g}"
    manifest["sweep-param"] = param
    manifest["range"] = f"{lo:.12g}:{hi:.12g}"
    manifest["steps"] = str(steps)
    return spec, manifest


def _cmd_sweep(r: _Resolver) -> int:
    spec, manifest = _sweep_spec(r)
    workers = r.get("workers", int, default=_default_workers())
    fmt = r.get("fmt", str, default="csv", choices=("csv", "json-lines"))
    rows = run_sweep(spec, workers=workers)
    out = r.get("out", str)
    _emit(_rows_text(rows, fmt), out)
    if out:
        manifest["threshold"] = f"{r.get('threshold', float, default=1e-6):.12g}"
        manifest["workers"] = str(workers)
        manifest["format"] = fmt
        manifest["out"] = out
        stem, _ = os.path.splitext(out)
        _write_text(f"{stem}_manifest.txt", _manifest_text(manifest))
    return 0


def _cmd_critical(r: _Resolver) -> int:
    spec, _ = _sweep_spec(r)
    threshold = r.get("threshold", float, default=1e-6)
    cp = find_critical(spec, threshold=threshold)
    obj = {
        "value": cp.value,
        "bracket": [cp.bracket[0], cp.bracket[1]],
        "threshold": cp.threshold,
        "tau": cp.tau,
    }
    _emit(json.dumps(obj) + "\n", r.get("out", str))
    return 0


def _manifest_text(pairs: dict[str, str]) -> str:
    return "".join(f"{k} = {v}\n" for k, v in pairs.items())


def _cmd_figure(r: _Resolver) -> int:
    figure_id = getattr(r.args, "figure", None) or r.get("figure", str)
    if figure_id is None:
        raise UsageError("missing figure id (fig1|fig2|fig3)")
    if figure_id not in ("fig1", "fig2", "fig3"):
        raise UsageError(f"unknown figure id {figure_id!r}")
    tau = r.get("tau", float)
    steps = r.get("steps", int, default=400)
    workers = r.get("workers", int, default=_default_workers())
    fmt = r.get("fmt", str, default="csv", choices=("csv", "json-lines"))
    out_dir = r.get("out", str, default=".")
    ds = figure_dataset(figure_id, tau=tau, steps=steps, workers=workers)

    os.makedirs(out_dir, exist_ok=True)
    manifest: dict[str, str] = {
        "figure": figure_id,
        "tau": f"{ds.tau:.12g}",
        "steps": str(steps),
        "workers": str(workers),
        "format": fmt,
        "threshold": f"{r.get('threshold', float, default=1e-6):.12g}",
    }
    written = []
    for curve in ds.curves:
        rows = ds.tables[curve.label]
        ext = "csv" if fmt == "csv" else "jsonl"
        path = os.path.join(out_dir, f"{figure_id}_{curve.label}.{ext}")
        if fmt == "csv":
            write_csv(rows, path)
        else:
            _write_text(path, _rows_text(rows, fmt))
        written.append(path)
        base = curve.spec.base
        prefix = f"curve.{curve.label}"
        manifest[f"{prefix}.file"] = os.path.basename(path)
        if isinstance(base.model, LorentzianBath):
            manifest[f"{prefix}.family"] = "lorentzian"
            manifest[f"{prefix}.lambda"] = f"{base.model.lam:.12g}"
            manifest[f"{prefix}.delta"] = f"{base.model.delta:.12g}"
        else:
            manifest[f"{prefix}.family"] = "ohmic"
            manifest[f"{prefix}.omega-c"] = f"{base.model.omega_c:.12g}"
        manifest[f"{prefix}.omega0"] = f"{base.omega0:.12g}"
        manifest[f"{prefix}.coupling"] = f"{base.coupling:.12g}"
        manifest[f"{prefix}.sweep-param"] = (
            "coupling" if curve.spec.target == "Omega" else "delta"
        )
        manifest[f"{prefix}.range"] = f"{curve.spec.lo:.12g}:{curve.spec.hi:.12g}"
    manifest_path = os.path.join(out_dir, f"{figure_id}_manifest.txt")
    _write_text(manifest_path, _manifest_text(manifest))
    written.append(manifest_path)

    if not r.flag("no_plots"):
        from .plots import render_metric_curves

        target = ds.curves[0].spec.target
        written += render_metric_curves(ds.tables, target, out_dir, figure_id)
    for path in written:
        print(path)
    return 0


# ---------------------------------------------------------------------------
# Oracle battery

_T_GRID = (0.3, 0.7, 1.0, 1.6, 2.0)

_LOR_RATE_SYS = (
    SystemParams(50.0, 2.0, LorentzianBath(1.0, 5.0, 0.0)),
    SystemParams(50.0, 3.0, LorentzianBath(1.0, 0.01, 0.0)),
    SystemParams(50.0, 0.01, LorentzianBath(1.0, 0.5, 5.0)),
    SystemParams(50.0, 1.0, LorentzianBath(1.0, 1.0, 10.0)),
    SystemParams(50.0, 0.5, LorentzianBath(1.0, 3.0, 2.0)),
)
_OHM_RATE_SYS = (
    SystemParams(1.0, 0.5, OhmicBath(1.0)),
    SystemParams(1.0, 0.9, OhmicBath(10.0)),
    SystemParams(1.0, 0.2, OhmicBath(0.1)),
    SystemParams(1.0, 0.7, OhmicBath(2.0)),
    SystemParams(1.0, 0.1, OhmicBath(0.3)),
)

_DYN_SYS = (
    ("lorentzian strong", SystemParams(10.0, 2.0, LorentzianBath(1.0, 0.01, 0.0)), 2.0),
    ("lorentzian detuned", SystemParams(10.0, 0.01, LorentzianBath(1.0, 0.5, 5.0)), 2.0),
    ("ohmic weak", SystemParams(1.0, 0.3, OhmicBath(5.0)), 3.0),
    ("ohmic strong", SystemParams(1.0, 0.9, OhmicBath(0.1)), 8.73),
)


def _rate_gap(job: tuple[SystemParams, int, float]) -> float:
    s, j, t = job
    bf = decay_rate_bruteforce(s, j, t)
    cf = float(decay_rate(s, j, t))
    # Relative with a small absolute floor, since gamma crosses zero.
    return abs(bf - cf) / max(abs(cf), 1e-4)


def _beta_gap(s: SystemParams, t: float) -> float:
    from scipy.integrate import quad

    worst = 0.0
    for j in (1, 2):
        ref = float(beta(s, j, t))
        val = quad(
            lambda u: float(decay_rate(s, j, u)), 0.0, t, epsabs=1e-13, epsrel=1e-12
        )[0]
        worst = max(worst, abs(val - ref) / max(1.0, abs(ref)))
    return worst


def _dyn_gap(res, s: SystemParams, rho0: QubitState) -> float:
    from .amplitude import atom_state

    worst = 0.0
    for t, st in zip(res.times, res.states):
        ref = atom_state(s, rho0, float(t))
        worst = max(worst, abs(st.rho11 - ref.rho11), abs(st.rho10 - ref.rho10))
    return worst


def _cmd_oracle_check(r: _Resolver) -> int:
    workers = r.get("workers", int, default=1)
    checks: list[tuple[str, float, float]] = []

    for fam, systems in (("lorentzian", _LOR_RATE_SYS), ("ohmic", _OHM_RATE_SYS)):
        jobs = [(s, j, t) for s, t in product(systems, _T_GRID) for j in (1, 2)]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                gaps = list(pool.map(_rate_gap, jobs))
        else:
            gaps = [_rate_gap(job) for job in jobs]
        checks.append((f"rates {fam} (grid)", max(gaps), 1e-5))
        checks.append(
            (f"beta {fam} (quadrature)", max(_beta_gap(s, 1.3) for s in systems), 1e-6)
        )

    excited = QubitState.excited()
    tilted = QubitState.from_bloch(1.1, 0.7)
    for name, s, tau in _DYN_SYS:
        res = evolve_dressed(s, tau, n_samples=120)
        checks.append((f"dressed {name}", _dyn_gap(res, s, excited), 1e-6))
    for name, s, tau in (_DYN_SYS[1], _DYN_SYS[2]):
        res = evolve_time_local(s, tilted, tau, n_samples=120)
        checks.append((f"time-local {name}", _dyn_gap(res, s, tilted), 1e-6))

    shallow = SystemParams(50.0, 0.01, LorentzianBath(1.0, 0.5, 5.0))
    ps = pair_search(shallow, 1.0, samples=200, seed=0)
    n_ref = evaluate_metrics(shallow, 1.0).n_blp
    checks.append(("pair search vs closed N", abs(ps.best_n - n_ref), 1e-8))

    width = max(len(name) for name, _, _ in checks)
    failures = 0
    for name, gap, tol in checks:
        status = "pass" if gap < tol else "FAIL"
        failures += status == "FAIL"
        print(f"{name:<{width}}  max_error={gap:.3e}  threshold={tol:.0e}  {status}")
    if failures:
        raise OracleConvergenceError(f"{failures} oracle check(s) above threshold")
    return 0


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        r = _Resolver(args)
        handler = {
            "trajectory": _cmd_trajectory,
            "metrics": _cmd_metrics,
            "sweep": _cmd_sweep,
            "critical": _cmd_critical,
            "oracle-check": _cmd_oracle_check,
            "figure": _cmd_figure,
        }[args.command]
        return handler(r)
    except UsageError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except NoBracketError as exc:
        print(f"error: no-bracket: {exc}", file=sys.stderr)
        return 1
    except OracleConvergenceError as exc:
        print(f"error: oracle-mismatch: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: usage: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - one-line reason, nonzero exit
        print(f"error: runtime: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
