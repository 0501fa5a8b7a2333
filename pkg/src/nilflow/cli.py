"""Command-line entry point: ``nilflow <subcommand> [flags]``.

Exit codes: 0 success, 1 checks failed, 2 parse or configuration error,
3 resource (degree) limit, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from . import __version__
from .algebra import AlgebraFormatError, load_algebra, validate_algebra
from .poisson import (
    DegreeLimitError,
    Polynomial,
    casimirs,
    centralizer_basis,
    dual_names,
    is_casimir,
    poisson_bracket,
    sub_riemannian_hamiltonian,
)

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_LIMIT, EXIT_NUMERIC = 0, 1, 2, 3, 4

SYSTEMS = ("full", "reduced", "yang_mills", "heisenberg_reduced")

# defaults for options that a config file may also set
DEFAULTS = {
    "algebra": "n4",
    "output_dir": ".",
    "seed": 0,
    "mode": "poisson",
    "degree": 2,
    "system": "full",
    "initial": None,
    "energy": None,
    "w0": None,
    "C": None,
    "coupling": 0.0,
    "method": "implicit_midpoint",
    "dt": 1e-3,
    "T": 10.0,
    "stride": 1,
    "newton_tol": 1e-12,
    "newton_max_iters": 50,
    "horizon": 1e3,
    "renorm_interval": 1.0,
    "index": 0,
    "value": 0.0,
    "direction": 1,
    "target": None,
    "guess": None,
    "tol": 1e-8,
    "max_iters": 200,
    "points": 1000,
}


class ConfigError(ValueError):
    pass


def _floats(text, n: int | None = None, what: str = "value") -> np.ndarray:
    if text is None:
        raise ConfigError(f"{what} is required")
    if isinstance(text, str):
        parts = [p for p in text.replace(",", " ").split() if p]
    else:
        parts = list(text)
    try:
        arr = np.array([float(p) for p in parts])
    except ValueError as exc:
        raise ConfigError(f"{what}: {exc}") from None
    if n is not None and arr.size != n:
        raise ConfigError(f"{what} needs {n} numbers, got {arr.size}")
    return arr


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def write_atomic(path: Path, data: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: Path, header, rows) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    write_atomic(path, buf.getvalue())


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return _jsonable(o.tolist())
    if isinstance(o, (np.bool_, bool)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    return o


def write_json(path: Path, obj) -> None:
    write_atomic(path, json.dumps(_jsonable(obj), indent=2, sort_keys=True) + "\n")


def _sidecar(opts: dict, command: str, payload: dict) -> dict:
    return {
        "command": command,
        "version": __version__,
        "config": {k: v for k, v in sorted(opts.items()) if k != "config"},
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        **payload,
    }


def _build_system(opts: dict):
    from .dynamics import (
        full_system,
        heisenberg_reduced_system,
        reduced_system,
        reduce_to_orbit,
        sample_energy_shell,
        yang_mills_system,
    )

    name = opts["system"]
    if name not in SYSTEMS:
        raise ConfigError(f"unknown system {name!r}; choose from {', '.join(SYSTEMS)}")
    rng = np.random.default_rng(int(opts["seed"]))
    init = opts["initial"]
    if name == "full":
        alg = load_algebra(opts["algebra"])
        system = full_system(alg)
    elif name == "reduced":
        if init is not None and _floats(init, what="--initial").size == 6:
            chart, q = reduce_to_orbit(_floats(init, 6, "--initial"))
            return reduced_system(chart.w0, chart.C), q
        if opts["w0"] is None or opts["C"] is None:
            raise ConfigError("reduced system needs --w0 and --C, or a 6-entry --initial")
        system = reduced_system(float(opts["w0"]), float(opts["C"]))
    elif name == "yang_mills":
        system = yang_mills_system(float(opts["coupling"]))
    else:
        if opts["w0"] is None:
            raise ConfigError("heisenberg_reduced system needs --w0")
        system = heisenberg_reduced_system(float(opts["w0"]))
    if init is not None:
        y0 = _floats(init, system.dim, "--initial")
    elif opts["energy"] is not None:
        y0 = sample_energy_shell(system, float(opts["energy"]), rng)
    else:
        raise ConfigError("pass --initial or --energy")
    return system, y0


def _integrator(opts: dict, T=None):
    from .dynamics import IntegratorConfig

    return IntegratorConfig(
        method=opts["method"],
        dt=float(opts["dt"]),
        T=float(opts["T"] if T is None else T),
        newton_tol=float(opts["newton_tol"]),
        newton_max_iters=int(opts["newton_max_iters"]),
        stride=int(opts["stride"]),
    )


# --- subcommands ------------------------------------------------------------


def cmd_verify(opts: dict, out: Path) -> int:
    alg = load_algebra(opts["algebra"])
    violations = validate_algebra(alg)
    names = dual_names(alg)
    coords = [Polynomial.variable(alg, i) for i in range(alg.dim)]
    table = {}
    for i in range(alg.dim):
        for j in range(i + 1, alg.dim):
            b = poisson_bracket(coords[i], coords[j])
            if b != Polynomial.constant(alg, 0):
                table[f"{{{names[i]},{names[j]}}}"] = str(b)
    H = sub_riemannian_hamiltonian(alg) if not violations else None
    cas = {}
    for C in casimirs(alg):
        entry = {"casimir": is_casimir(C)}
        if H is not None:
            entry["conserved"] = poisson_bracket(C, H) == Polynomial.constant(alg, 0)
        cas[str(C)] = entry
    ok = not violations and all(all(e.values()) for e in cas.values())
    report = {
        "algebra": alg.name,
        "dim": alg.dim,
        "layers": list(alg.layers),
        "violations": [{"axiom": v.axiom, "indices": list(v.indices), "detail": v.detail} for v in violations],
        "poisson_brackets": table,
        "casimirs": cas,
        "ok": ok,
    }
    print(f"algebra {alg.name} (dim {alg.dim}, layers {list(alg.layers)})")
    for v in violations:
        print(f"  violation [{v.axiom}] {v.indices}: {v.detail}")
    print("nonzero Poisson brackets of coordinates:")
    for k, v in table.items():
        print(f"  {k} = {v}")
    for k, v in cas.items():
        print(f"  casimir {k}: {v}")
    print("OK" if ok else "FAILED")
    write_json(out / "verify.json", _sidecar(opts, "verify", {"report": report}))
    return EXIT_OK if ok else EXIT_FAILED


def cmd_centralizer(opts: dict, out: Path) -> int:
    alg = load_algebra(opts["algebra"])
    d = int(opts["degree"])
    if opts["mode"] == "poisson":
        rep = centralizer_basis(sub_riemannian_hamiltonian(alg), d)
    elif opts["mode"] == "uea":
        from .uea import commutant_basis, quantized_hamiltonian

        rep = commutant_basis(quantized_hamiltonian(alg), d)
    else:
        raise ConfigError("--mode must be poisson or uea")
    data = rep.to_dict()
    print(
        f"{opts['mode']} commutant of H on {alg.name}, degree <= {d}: dimension "
        f"{rep.nullspace_dimension}, predicted {rep.predicted_dimension}, holds={rep.holds_at_degree}"
    )
    for b in data["nullspace_basis"]:
        print(f"  {b}")
    write_json(out / f"centralizer_{opts['mode']}_d{d}.json", _sidecar(opts, "centralizer", {"report": data}))
    return EXIT_OK if rep.holds_at_degree else EXIT_FAILED


def cmd_integrate(opts: dict, out: Path) -> int:
    from .dynamics import integrate

    system, y0 = _build_system(opts)
    cfg = _integrator(opts)
    traj = integrate(system, y0, cfg)
    write_csv(out / "trajectory.csv", traj.columns(), traj.rows())
    drift = traj.drift()
    payload = {"system": system.name, "params": system.params, "initial": y0, "drift": drift,
               "samples": len(traj.times)}
    write_json(out / "trajectory.json", _sidecar(opts, "integrate", payload))
    print(f"{len(traj.times)} samples; drift " + ", ".join(f"{k}={v:.3e}" for k, v in drift.items()))
    return EXIT_OK


def cmd_lyapunov(opts: dict, out: Path) -> int:
    from .dynamics import lyapunov_max

    system, y0 = _build_system(opts)
    cfg = _integrator(opts, T=opts["renorm_interval"])
    res = lyapunov_max(
        system, y0, cfg, float(opts["renorm_interval"]), float(opts["horizon"]), seed=int(opts["seed"])
    )
    write_csv(
        out / "lyapunov.csv", ["t", "lambda", "log_stretch"],
        zip(res.times, res.series, res.log_stretches),
    )
    payload = {"system": system.name, "params": system.params, "initial": y0, **res.to_dict()}
    write_json(out / "lyapunov.json", _sidecar(opts, "lyapunov", payload))
    print(f"lambda_max = {res.estimate!r} over horizon {res.horizon}")
    return EXIT_OK


def cmd_poincare(opts: dict, out: Path) -> int:
    from .dynamics import poincare_section

    system, y0 = _build_system(opts)
    cfg = _integrator(opts)
    sec = poincare_section(
        system, y0, cfg, int(opts["index"]), float(opts["value"]), int(opts["direction"])
    )
    write_csv(out / "section.csv", sec.columns(), sec.rows())
    payload = {"system": system.name, "params": system.params, "initial": y0, "crossings": len(sec),
               "section": {"index": sec.index, "name": system.state_names[sec.index],
                           "value": sec.value, "direction": sec.direction}}
    write_json(out / "section.json", _sidecar(opts, "poincare", payload))
    print(f"{len(sec)} crossings of {system.state_names[sec.index]} = {sec.value}")
    return EXIT_OK


def cmd_shoot(opts: dict, out: Path) -> int:
    from .dynamics import GroupElement, full_system, integrate, reconstruct_group, shoot_endpoint
    from .dynamics.group import ENTRY_NAMES

    T = float(opts["T"])
    dt = float(opts["dt"])
    target = GroupElement(tuple(_floats(opts["target"], 6, "--target")))
    if opts["guess"] is not None:
        guess = _floats(opts["guess"], 6, "--guess")
    else:
        guess = 0.1 * np.random.default_rng(int(opts["seed"])).standard_normal(6)
    res = shoot_endpoint(target, T, guess, dt=dt, tol=float(opts["tol"]), max_iters=int(opts["max_iters"]))
    traj = integrate(full_system(), res.p0, _integrator({**opts, "stride": 1}, T=T))
    path = reconstruct_group(traj)
    write_csv(out / "shoot_path.csv", ["t", *ENTRY_NAMES], ([t, *g] for t, g in zip(path.times, path.entries)))
    write_json(out / "shoot.json", _sidecar(opts, "shoot", {"result": res.to_dict(), "target": target.entries}))
    print(f"residual {res.residual:.3e} after {res.iterations} evaluations; converged={res.converged}")
    return EXIT_OK if res.converged else EXIT_FAILED


def cmd_scale_check(opts: dict, out: Path) -> int:
    from .dynamics import scale_check

    w0 = 1.7 if opts["w0"] is None else float(opts["w0"])
    C = -0.6 if opts["C"] is None else float(opts["C"])
    rep = scale_check(int(opts["points"]), int(opts["seed"]), w0, C)
    ok = (
        rep["max_relative_energy_error"] < 1e-10
        and all(rep["brackets"].values())
        and rep["has_quartic_uv_term"]
    )
    rep["ok"] = ok
    write_json(out / "scale_check.json", _sidecar(opts, "scale-check", {"report": rep}))
    print(f"rescaled form: {rep['rescaled_form']}")
    print(f"max relative energy error {rep['max_relative_energy_error']:.3e}; brackets {rep['brackets']}")
    print("OK" if ok else "FAILED")
    return EXIT_OK if ok else EXIT_FAILED


COMMANDS = {
    "verify": cmd_verify,
    "centralizer": cmd_centralizer,
    "integrate": cmd_integrate,
    "lyapunov": cmd_lyapunov,
    "poincare": cmd_poincare,
    "shoot": cmd_shoot,
    "scale-check": cmd_scale_check,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--algebra", help="builtin name (n4, heisenberg3) or JSON definition file")
    common.add_argument("--config", help="JSON file setting any flag; explicit flags win")
    common.add_argument("--output-dir", dest="output_dir")
    common.add_argument("--seed", type=int)

    dyn = argparse.ArgumentParser(add_help=False)
    dyn.add_argument("--system", choices=SYSTEMS)
    dyn.add_argument("--initial", help="comma or space separated initial state")
    dyn.add_argument("--energy", type=float, help="sample a seeded initial state at this energy")
    dyn.add_argument("--w0", type=float)
    dyn.add_argument("--C", type=float)
    dyn.add_argument("--coupling", type=float)
    dyn.add_argument("--method", choices=("implicit_midpoint", "rk4"))
    dyn.add_argument("--dt", type=float)
    dyn.add_argument("--T", type=float)
    dyn.add_argument("--stride", type=int)
    dyn.add_argument("--newton-tol", dest="newton_tol", type=float)
    dyn.add_argument("--newton-max-iters", dest="newton_max_iters", type=int)

    p = argparse.ArgumentParser(prog="nilflow", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="validate an algebra and its Casimirs")
    c = sub.add_parser("centralizer", parents=[common], help="bounded-degree commutant of H")
    c.add_argument("--mode", choices=("poisson", "uea"))
    c.add_argument("--degree", type=int)
    sub.add_parser("integrate", parents=[common, dyn], help="integrate a flow to CSV")
    ly = sub.add_parser("lyapunov", parents=[common, dyn], help="largest Lyapunov exponent")
    ly.add_argument("--horizon", type=float)
    ly.add_argument("--renorm-interval", dest="renorm_interval", type=float)
    po = sub.add_parser("poincare", parents=[common, dyn], help="Poincare section crossings")
    po.add_argument("--index", type=int, help="state coordinate defining the section")
    po.add_argument("--value", type=float)
    po.add_argument("--direction", type=int, choices=(-1, 0, 1))
    sh = sub.add_parser("shoot", parents=[common, dyn], help="initial momentum reaching a group element")
    sh.add_argument("--target", help="six entries g21,g32,g43,g31,g42,g41")
    sh.add_argument("--guess", help="six-entry initial momentum guess")
    sh.add_argument("--tol", type=float)
    sh.add_argument("--max-iters", dest="max_iters", type=int)
    sc = sub.add_parser("scale-check", parents=[common], help="audit the cube-root rescaling")
    sc.add_argument("--w0", type=float)
    sc.add_argument("--C", type=float)
    sc.add_argument("--points", type=int)
    return p


def resolve_options(ns: argparse.Namespace) -> dict:
    """Merge built-in defaults, the optional config file and explicit flags."""
    opts = dict(DEFAULTS)
    if ns.config:
        try:
            with open(ns.config) as fh:
                conf = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{ns.config}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        if not isinstance(conf, dict):
            raise ConfigError(f"{ns.config}: top level must be an object")
        for k, v in conf.items():
            key = k.replace("-", "_")
            if key not in DEFAULTS:
                raise ConfigError(f"{ns.config}: unknown option {k!r}")
            opts[key] = v
    for k, v in vars(ns).items():
        if k in DEFAULTS and v is not None:
            opts[k] = v
    return opts


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    from .dynamics import DynamicsError

    try:
        opts = resolve_options(ns)
        out = Path(opts["output_dir"])
        return COMMANDS[ns.command](opts, out)
    except DegreeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except DynamicsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (AlgebraFormatError, ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
