"""Command-line front end.

Every subcommand reads its parameters from (in increasing precedence) the
built-in defaults, an optional JSON config file and the command-line flags.
Single evaluations print a JSON record; sweeps print CSV.  Complex numbers
are always written as ``[re, im]`` pairs.

Exit codes: 0 success, 2 configuration/input error, 3 violated numerical
contract, 4 non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from . import __version__
from .asymptotics import asymptotic_ff, regularized_det
from .bethe_core import ModelGeometry, QuantumNumbers, solve_bae
from .cache import ThermoCache
from .determinants import (
    ff_det_continuum,
    ff_det_lattice,
    ff_lattice_via_overlap,
    log_gaudin_norm,
    normalized_ff_parts,
    slavnov_overlap,
)
from .errors import ConvergenceError, InputError, NLSError, NumericalContractError
from .oracles import continuum_ff_oracle, continuum_overlap_oracle, lattice_ff_oracle, lattice_overlap_oracle
from .thermo import DEFAULT_NODES, ExcitationThermo, shift_thermo, solve_dressed

EXIT_OK, EXIT_CONFIG, EXIT_CONTRACT, EXIT_CONVERGENCE = 0, 2, 3, 4


class ConfigError(InputError):
    pass


# -- value parsing -----------------------------------------------------------
def _split(value) -> list:
    if isinstance(value, (list, tuple)):
        return list(value)
    if isinstance(value, (int, float)):
        return [value]
    text = str(value).strip()
    return [v for v in text.replace(";", ",").split(",") if v.strip()] if text else []


def _positive(value) -> float:
    x = float(value)
    if not (x > 0 and np.isfinite(x)):
        raise ConfigError(f"expected a positive number, got {value!r}")
    return x


def _real(value) -> float:
    x = float(value)
    if not np.isfinite(x):
        raise ConfigError(f"expected a finite number, got {value!r}")
    return x


def _nonneg_int(value) -> int:
    x = int(value)
    if x < 0:
        raise ConfigError(f"expected a nonnegative integer, got {value!r}")
    return x


def _complex(value) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    return complex(str(value).replace(" ", "").replace("i", "j"))


def _int_list(value) -> List[int]:
    return [int(v) for v in _split(value)]


def _float_list(value) -> List[float]:
    return [_real(v) for v in _split(value)]


def _positive_list(value) -> List[float]:
    return [_positive(v) for v in _split(value)]


def _regime(value) -> str:
    v = str(value).lower()
    if v not in ("continuum", "lattice"):
        raise ConfigError(f"regime must be 'continuum' or 'lattice', got {value!r}")
    return v


def _quantity(value) -> str:
    v = str(value).lower()
    if v not in ("formfactor", "overlap"):
        raise ConfigError(f"quantity must be 'formfactor' or 'overlap', got {value!r}")
    return v


def _bool(value) -> bool:
    if isinstance(value, bool):
        return value
    v = str(value).lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {value!r}")


@dataclass(frozen=True)
class Param:
    convert: Callable
    default: Any
    help: str
    flag: bool = False  # store_true switch


P = Param
GEOMETRY = {
    "regime": P(_regime, "continuum", "continuum or lattice"),
    "c": P(_positive, 2.0, "coupling c > 0"),
    "L": P(_positive, 10.0, "volume L"),
    "delta": P(_positive, None, "lattice spacing (lattice regime)"),
    "tol": P(_positive, 1e-12, "Bethe-equation tolerance"),
}
THERMO = {
    "c": P(_positive, 2.0, "coupling c > 0"),
    "q": P(_positive, None, "Fermi boundary (alternative to --D)"),
    "D": P(_positive, 0.5, "density N/L fixing the Fermi boundary"),
    "m": P(_nonneg_int, DEFAULT_NODES, "Gauss-Legendre nodes on [-q, q]"),
}
EXCITATION = {
    "hole_fractions": P(_float_list, [], "holes at round(f*(N+1)) for each fraction f"),
    "particle_offsets": P(_int_list, [], "particles at N+1+k (k>0) or 1+k (k<0)"),
    "half_height": P(_positive, None, "half height of the stadium contour"),
    "nodes": P(_nonneg_int, 128, "base node budget on the contour"),
}
COMMANDS: Dict[str, Dict[str, Param]] = {
    "solve": {**GEOMETRY, "ells": P(_int_list, [1], "quantum numbers")},
    "norm": {**GEOMETRY, "N": P(_nonneg_int, None, "particle number (ground state if --ells absent)"),
             "ells": P(_int_list, None, "quantum numbers")},
    "overlap": {**GEOMETRY, "ells": P(_int_list, [1], "quantum numbers of the on-shell state"),
                "lam": P(_float_list, None, "off-shell rapidities"),
                "ells_lam": P(_int_list, None, "quantum numbers of a second on-shell state"),
                "oracle": P(_bool, False, "also evaluate the brute-force oracle", flag=True)},
    "formfactor": {**GEOMETRY, "N": P(_nonneg_int, 1, "particles in the smaller state"),
                   "ells_mu": P(_int_list, None, "quantum numbers of the (N+1)-particle state"),
                   "ells_lam": P(_int_list, None, "quantum numbers of the N-particle state"),
                   "oracle": P(_bool, False, "also evaluate the brute-force oracle", flag=True)},
    "converge-delta": {"c": GEOMETRY["c"], "L": GEOMETRY["L"], "tol": GEOMETRY["tol"],
                       "N": P(_nonneg_int, 1, "particles in the smaller state"),
                       "deltas": P(_positive_list, [0.02, 0.01, 0.005, 0.0025], "lattice spacings"),
                       "quantity": P(_quantity, "formfactor", "formfactor or overlap"),
                       "ells_mu": P(_int_list, None, "quantum numbers of the (N+1)-particle state"),
                       "ells_lam": P(_int_list, None, "quantum numbers of the N-particle state"),
                       "lam": P(_float_list, None, "off-shell rapidities for the overlap")},
    "thermo": dict(THERMO),
    "asymptotics": {**THERMO, **EXCITATION, "Ns": P(_int_list, [32, 64, 128], "particle numbers")},
    "fredholm": {**THERMO, **EXCITATION, "N": P(_nonneg_int, 64, "particle number fixing the excitation"),
                 "beta": P(_complex, 0.0, "beta"), "gamma": P(_complex, 1.0, "gamma"),
                 "h_coeffs": P(_float_list, [1.0], "coefficients of h(lambda), lowest order first")},
}
SWEEPS = {"converge-delta", "asymptotics"}
COMMON = {"config", "output", "csv", "jobs", "cache_dir"}


def _flag(name: str) -> str:
    return "--" + name.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nlsff", description="Bethe-ansatz form factors of the NLS model")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, table in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config file (flags override its keys)")
        p.add_argument("--output", "-o", default=None, help="write the JSON record here")
        p.add_argument("--cache-dir", default=None, help="thermodynamic cache directory")
        p.add_argument("--jobs", type=int, default=None, help="worker processes for sweeps (default: 1)")
        if name in SWEEPS:
            p.add_argument("--csv", default=None, help="write the sweep CSV here")
        for key, param in table.items():
            default_txt = f" (default: {param.default})" if param.default not in (None, []) else ""
            if param.flag:
                p.add_argument(_flag(key), dest=key, action="store_true", default=argparse.SUPPRESS,
                               help=param.help + default_txt)
            else:
                p.add_argument(_flag(key), dest=key, default=argparse.SUPPRESS, help=param.help + default_txt)
    return parser


def _load_config(path: Optional[str], command: str) -> dict:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    flat = {k: v for k, v in data.items() if not isinstance(v, dict)}
    section = data.get(command, {})
    if not isinstance(section, dict):
        raise ConfigError(f"config section {command!r} must be an object")
    flat.update(section)
    return {k.replace("-", "_"): v for k, v in flat.items()}


def resolve_params(command: str, flags: dict, config: dict) -> dict:
    """Merge defaults < config < flags and convert every value."""
    table = COMMANDS[command]
    known = set(table) | COMMON
    unknown = sorted(k for k in config if k not in known and k not in _other_command_keys())
    if unknown:
        raise ConfigError(f"unknown config key(s) {unknown}; valid for {command}: {sorted(table)}")
    params = {}
    for key, param in table.items():
        raw = flags[key] if key in flags else config.get(key, param.default)
        if raw is None:
            params[key] = None
            continue
        try:
            params[key] = param.convert(raw)
        except ConfigError as exc:
            raise ConfigError(f"{_flag(key)}: {exc}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{_flag(key)}: cannot parse {raw!r} ({exc})") from None
    return params


def _other_command_keys() -> set:
    return {k for t in COMMANDS.values() for k in t}


# -- serialisation ---------------------------------------------------------
def to_jsonable(x):
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [to_jsonable(v) for v in x.tolist()]
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float(x)
    return x


def dumps_record(record: dict) -> str:
    return json.dumps(to_jsonable(record), indent=1, sort_keys=True)


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(["" if v is None else repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


# -- geometry helpers ----------------------------------------------------------
def _geometry(p: dict) -> ModelGeometry:
    if p["regime"] == "lattice":
        if p.get("delta") is None:
            raise ConfigError("--delta is required in the lattice regime")
        return ModelGeometry.lattice(p["c"], p["L"], delta=p["delta"])
    return ModelGeometry.continuum(p["c"], p["L"])


def _state(ells, geometry, tol):
    return solve_bae(QuantumNumbers(tuple(ells)), geometry, tol=tol)


def _state_info(state) -> dict:
    return {"ells": list(state.qn.ells), "roots": state.roots, "residual": state.residual,
            "iterations": state.iterations}


def _ff_pair(p: dict):
    N = p["N"]
    mu = p["ells_mu"] if p["ells_mu"] is not None else list(range(1, N + 2))
    lam = p["ells_lam"] if p["ells_lam"] is not None else list(range(1, N + 1))
    if len(mu) != len(lam) + 1:
        raise ConfigError(f"need len(ells_mu) = len(ells_lam) + 1, got {len(mu)} and {len(lam)}")
    return mu, lam


def _thermo_model(p: dict, cache: ThermoCache):
    if p["q"] is not None:
        return cache.model(p["c"], p["q"], p["m"])
    return cache.model_for_density(p["c"], p["D"], p["m"])


def excitation_integers(N: int, hole_fractions: Sequence[float], particle_offsets: Sequence[int]):
    """Integer data of an excitation of the (N+1)-particle ground state."""
    if len(hole_fractions) != len(particle_offsets):
        raise ConfigError("give as many hole fractions as particle offsets")
    holes = [min(max(int(round(f * (N + 1))), 1), N + 1) for f in hole_fractions]
    parts = []
    for k in particle_offsets:
        if k == 0:
            raise ConfigError("particle offsets must be nonzero")
        parts.append(N + 1 + k if k > 0 else 1 + k)
    if len(set(holes)) != len(holes) or len(set(parts)) != len(parts):
        raise ConfigError(f"repeated hole or particle integers: holes={holes}, particles={parts}")
    return holes, parts


# -- commands ------------------------------------------------------------------------
def cmd_solve(p, cache):
    state = _state(p["ells"], _geometry(p), p["tol"])
    return {"roots": state.roots}, {"residual": state.residual, "iterations": state.iterations,
                                    "sites": state.geometry.M}


def cmd_norm(p, cache):
    ells = p["ells"]
    if ells is None:
        if p["N"] is None:
            raise ConfigError("give --N or --ells")
        ells = list(range(1, p["N"] + 1))
    elif p["N"] is not None and p["N"] != len(ells):
        raise ConfigError(f"--N {p['N']} does not match {len(ells)} quantum numbers")
    state = _state(ells, _geometry(p), p["tol"])
    ln = log_gaudin_norm(state)
    return {"norm": float(np.exp(ln)), "log_norm": ln, "roots": state.roots}, {"residual": state.residual}


def cmd_overlap(p, cache):
    g = _geometry(p)
    mu = _state(p["ells"], g, p["tol"])
    if (p["lam"] is None) == (p["ells_lam"] is None):
        raise ConfigError("give exactly one of --lam and --ells-lam")
    lam = np.asarray(p["lam"], dtype=float) if p["lam"] is not None else _state(p["ells_lam"], g, p["tol"]).roots
    if lam.size != mu.n:
        raise ConfigError(f"need {mu.n} rapidities, got {lam.size}")
    val = slavnov_overlap(mu, lam)
    out = {"overlap": val, "mu_roots": mu.roots, "lam": lam}
    diag = {"residual": mu.residual}
    if p["oracle"]:
        ref = (lattice_overlap_oracle(mu.roots, lam, g) if g.is_lattice
               else continuum_overlap_oracle(mu.roots, lam, g.c, g.L))
        out["oracle"] = ref
        diag["relative_difference"] = abs(val - ref) / max(abs(ref), 1e-300)
    return out, diag


def cmd_formfactor(p, cache):
    g = _geometry(p)
    ells_mu, ells_lam = _ff_pair(p)
    mu, lam = _state(ells_mu, g, p["tol"]), _state(ells_lam, g, p["tol"])
    diag = {"mu": _state_info(mu), "lam": _state_info(lam)}
    if g.is_lattice:
        ff = ff_det_lattice(mu, lam)
        out = {"form_factor": ff.value, "log_form_factor": ff.parts["log_value"]}
        diag["via_overlap"] = ff_lattice_via_overlap(mu, lam)
        if p["oracle"]:
            ref = lattice_ff_oracle(mu.roots, lam.roots, g)
            out["oracle_leading"] = ref
            diag["relative_difference_leading"] = abs(ff.value - ref) / max(abs(ref), 1e-300)
        return out, diag
    ff = ff_det_continuum(mu, lam)
    parts = normalized_ff_parts(mu, lam)
    out = {"form_factor": ff.value, "log_form_factor": ff.parts["log_value"],
           "normalized_squared": parts.direct, "smooth_part": parts.smooth_part,
           "discrete_part": parts.discrete_part}
    diag["factorization_relative_difference"] = abs(parts.product - parts.direct) / abs(parts.direct)
    if p["oracle"]:
        ref = continuum_ff_oracle(mu.roots, lam.roots, g.c, g.L)
        out["oracle"] = ref
        diag["relative_difference"] = abs(ff.value - ref) / max(abs(ref), 1e-300)
    return out, diag


def _converge_point(args):
    p, delta = args
    g = ModelGeometry.lattice(p["c"], p["L"], delta=delta)
    ells_mu, ells_lam = _ff_pair(p)
    lam = _state(ells_lam, g, p["tol"])
    if p["quantity"] == "overlap":
        return slavnov_overlap(lam, _overlap_rapidities(p))
    return ff_det_lattice(_state(ells_mu, g, p["tol"]), lam).value


def _overlap_rapidities(p):
    if p["lam"] is not None:
        if len(p["lam"]) != p["N"]:
            raise ConfigError(f"--lam needs {p['N']} values")
        return np.asarray(p["lam"], dtype=float)
    return np.linspace(-0.3, 0.4, p["N"]) + 0.05


def cmd_converge_delta(p, cache, jobs):
    g = ModelGeometry.continuum(p["c"], p["L"])
    ells_mu, ells_lam = _ff_pair(p)
    lam = _state(ells_lam, g, p["tol"])
    if p["quantity"] == "overlap":
        ref = slavnov_overlap(lam, _overlap_rapidities(p))
    else:
        ref = ff_det_continuum(_state(ells_mu, g, p["tol"]), lam).value
    values = _map(_converge_point, [(p, d) for d in p["deltas"]], jobs)
    errors = [abs(v - ref) / abs(ref) for v in values]
    rows = []
    for i, (d, e) in enumerate(zip(p["deltas"], errors)):
        order = None
        if i:
            order = float(np.log(errors[i - 1] / e) / np.log(p["deltas"][i - 1] / d))
        rows.append((d, e, order))
    header = ("delta", "error", "observed_order")
    out = {"reference": ref, "lattice_values": values, "rows": [list(r) for r in rows]}
    return out, {}, (header, rows)


def cmd_thermo(p, cache):
    model = _thermo_model(p, cache)
    q = model.q
    fine = solve_dressed(model.c, q, 2 * model.m)
    out = {"q": q, "density": float(model.p(q).real / np.pi), "Z_q": float(model.dressed_charge(q)),
           "p_prime_q": float(model.p_prime_at(q)), "fredholm_det": model.fredholm_det()}
    x = model.nodes
    diag = {"max_Z_minus_p_prime": float(np.max(np.abs(model.Z - model.p_prime))),
            "node_doubling_change_Z_q": float(abs(fine.dressed_charge(q) - model.dressed_charge(q))),
            "nodes": int(x.size)}
    return out, diag


def _excitation(p, model, N):
    density = p["D"] if p["q"] is None else float(model.p(model.q).real) / np.pi
    L = N / density
    holes, parts = excitation_integers(N, p["hole_fractions"], p["particle_offsets"])
    exc = ExcitationThermo.from_integers(model, parts, holes, L) if holes else ExcitationThermo()
    return exc, L, holes, parts


def _asymptotics_point(args):
    p, N, cache_dir = args
    model = _thermo_model(p, ThermoCache(cache_dir))
    exc, L, holes, parts = _excitation(p, model, N)
    asym = asymptotic_ff(model, exc, N, L, p["half_height"], p["nodes"])
    g = ModelGeometry.continuum(model.c, L)
    qn = QuantumNumbers.particle_hole(N + 1, holes, parts) if holes else QuantumNumbers.ground(N + 1)
    fin = normalized_ff_parts(solve_bae(qn, g), solve_bae(QuantumNumbers.ground(N), g))
    dev = abs(fin.direct / asym.total - 1.0)
    return (N, L, fin.direct, fin.smooth_part, fin.discrete_part, asym.smooth, asym.discrete, asym.total, dev)


def cmd_asymptotics(p, cache, jobs):
    rows = _map(_asymptotics_point, [(p, N, str(cache.directory)) for N in p["Ns"]], jobs)
    header = ("N", "L", "direct", "smooth_finite", "discrete_finite", "smooth_asymptotic",
              "discrete_asymptotic", "asymptotic", "relative_deviation")
    out = {"rows": [list(r) for r in rows]}
    return out, {}, (header, rows)


def cmd_fredholm(p, cache):
    model = _thermo_model(p, cache)
    exc, L, holes, parts = _excitation(p, model, p["N"])
    F = shift_thermo(model, exc)
    coeffs = np.asarray(p["h_coeffs"], dtype=float)
    h = lambda z: np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), coeffs)
    res = regularized_det(F, h, p["beta"], p["gamma"], exc, model, p["half_height"], p["nodes"])
    out = {"value": res.value, "barnes": res.barnes, "hole_product": res.hole_product, "det": res.det}
    diag = {"zeros_excised": res.zeros_excised, "cut_sagitta": res.cut_sagitta,
            "node_doubling_change": res.node_doubling_change, "holes": holes, "particles": parts, "L": L}
    return out, diag


HANDLERS = {
    "solve": cmd_solve, "norm": cmd_norm, "overlap": cmd_overlap, "formfactor": cmd_formfactor,
    "thermo": cmd_thermo, "fredholm": cmd_fredholm,
}
SWEEP_HANDLERS = {"converge-delta": cmd_converge_delta, "asymptotics": cmd_asymptotics}


def _map(fn, items, jobs: int):
    """Order-preserving map, in worker processes when ``jobs > 1``."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))


# -- entry points -------------------------------------------------------------------
def run(command: str, params: dict, cache: Optional[ThermoCache] = None, jobs: int = 1) -> dict:
    """Run one command on already-resolved parameters; returns the result record
    (with a ``csv`` entry holding the sweep table for sweep commands)."""
    cache = cache or ThermoCache()
    t0 = time.perf_counter()
    if command in SWEEP_HANDLERS:
        out, diag, (header, rows) = SWEEP_HANDLERS[command](params, cache, jobs)
        table = _csv_text(header, rows)
    else:
        out, diag = HANDLERS[command](params, cache)
        table = None
    record = {"command": command, "inputs": params, "outputs": out, "diagnostics": diag,
              "wall_time": time.perf_counter() - t0, "version": __version__}
    if table is not None:
        record["csv"] = table
    return record


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k not in COMMON | {"command"}}
    try:
        config = _load_config(args.config, args.command)
        params = resolve_params(args.command, flags, config)
        jobs = args.jobs if args.jobs is not None else int(config.get("jobs", 1))
        if jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        cache = ThermoCache(args.cache_dir or config.get("cache_dir"))
        record = run(args.command, params, cache, jobs)
    except InputError as exc:
        print(f"nlsff {args.command}: configuration error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ConvergenceError as exc:
        print(f"nlsff {args.command}: no convergence: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except (NumericalContractError, NLSError) as exc:
        print(f"nlsff {args.command}: numerical contract violated: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    table = record.pop("csv", None)
    text = dumps_record(record) + "\n"
    if table is None:
        _write(args.output, text)
    else:
        csv_path = args.csv or config.get("csv")
        if args.output is not None:
            _write(args.output, text)
        if csv_path is not None or args.output is None:
            _write(csv_path, table)
    return EXIT_OK
