"""Experiment runner: every paper-style figure and gate-verification sweep as
a subcommand driven by a sectioned key-value (INI) config file.

    sgsim <evolve|qite|correlator|kink|gatecheck> --config FILE
          [--out DIR] [--format csv|json] [--dump-circuit FILE]

Each run writes ``<command>.csv`` (or ``.json``) plus a ``<command>.manifest``
JSON document carrying the resolved config, its hash, and derived reference
quantities.  Exit codes: 0 success, 2 config error, 3 dimension guard,
4 numerical failure.  Output is deterministic: identical configs produce
bit-identical CSV files.
"""

from __future__ import annotations

import argparse
import configparser
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .circuits import PostselectionError, simulate, to_text
from .fock import DimensionGuardError, HybridState
from .gates import displacement
from .lattice import (
    MODE_COMPILED,
    MODE_REFERENCE,
    SineGordonParams,
    evolution_shape,
    fourier_data,
    ground_state,
    position_basis,
    resolve_trotter_steps,
    survival_series,
    u_pot_circuit,
    u_quad_circuit,
)
from .observables import (
    GROUND_ED,
    GROUND_QITE,
    KinkConfig,
    VertexConfig,
    kink_profile,
    vertex_correlator_series,
)
from .qite import POT_COMPILED, POT_REFERENCE, QiteConfig, qite_run
from .trig import LinearInX, TrotterSchedule, cosine_x_circuit, nonunitary_trig_circuit

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_GUARD = 3
EXIT_NUMERIC = 4


class ConfigError(ValueError):
    pass


def _parse_float(v: str) -> float:
    try:
        return float(v)
    except ValueError as exc:
        raise ConfigError(f"expected a number, got {v!r}") from exc


def _parse_int(v: str) -> int:
    try:
        return int(v)
    except ValueError as exc:
        raise ConfigError(f"expected an integer, got {v!r}") from exc


def _parse_float_list(v: str) -> tuple[float, ...]:
    return tuple(_parse_float(x) for x in v.split(",") if x.strip())


def _parse_int_list(v: str) -> tuple[int, ...]:
    return tuple(_parse_int(x) for x in v.split(",") if x.strip())


def _parse_enum(options):
    def parse(v: str):
        if v not in options:
            raise ConfigError(f"expected one of {sorted(options)}, got {v!r}")
        return v

    return parse


def _parse_steps(v: str):
    return "auto" if v == "auto" else _parse_int(v)


_ORDERS = {"first", "second_symmetric"}

# section -> key -> parser; unknown sections/keys are rejected
SCHEMA = {
    "lattice": {"L": _parse_int, "m": _parse_float, "beta": _parse_float_list},
    "sim": {
        "lambda": _parse_int,
        "lambda_list": _parse_int_list,
        "trotter_order": _parse_enum(_ORDERS),
        "trotter_steps": _parse_steps,
        "t_max": _parse_float,
        "n_points": _parse_int,
        "mode": _parse_enum({MODE_REFERENCE, MODE_COMPILED}),
    },
    "qite": {
        "dtau": _parse_float,
        "steps": _parse_int,
        "pot_mode": _parse_enum({POT_REFERENCE, POT_COMPILED}),
    },
    "correlator": {
        "alpha": _parse_float,
        "n": _parse_int,
        "k": _parse_int,
        "ground_source": _parse_enum({GROUND_ED, GROUND_QITE}),
    },
    "kink": {
        "phi_left": _parse_float,
        "phi_right": _parse_float,
        "ground_source": _parse_enum({GROUND_ED, GROUND_QITE}),
    },
    "gatecheck": {
        "c": _parse_float,
        "lambda": _parse_int,
        "t_list": _parse_float_list,
        "orders": lambda v: tuple(_parse_enum(_ORDERS)(x.strip()) for x in v.split(",")),
        "steps": _parse_int,
    },
    "output": {"dir": str, "format": _parse_enum({"csv", "json"})},
}


def load_config(path: Path) -> dict:
    raw = path.read_text()
    parser = configparser.ConfigParser()
    parser.optionxform = str  # keys are case-sensitive (L vs l)
    try:
        parser.read_string(raw)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from exc
    cfg: dict = {"_hash": hashlib.sha256(raw.encode()).hexdigest()}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        cfg[section] = {}
        for key, value in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            cfg[section][key] = SCHEMA[section][key](value)
    return cfg


def _need(cfg: dict, section: str, key: str, default=None):
    try:
        return cfg[section][key]
    except KeyError:
        if default is not None:
            return default
        raise ConfigError(f"missing required key {key!r} in section [{section}]")


def _lattice_params(cfg, allow_beta_list=False):
    L = _need(cfg, "lattice", "L")
    m = _need(cfg, "lattice", "m")
    betas = _need(cfg, "lattice", "beta")
    if len(betas) != 1 and not allow_beta_list:
        raise ConfigError("this command takes a single beta value")
    return L, m, betas


def _fmt(value) -> str:
    if isinstance(value, float):
        if math.isnan(value):
            return ""
        return repr(value)
    return str(value)


def write_rows(rows, columns, out_dir: Path, name: str, fmt: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        path = out_dir / f"{name}.csv"
        lines = [",".join(columns)]
        lines += [",".join(_fmt(row[c]) for c in columns) for row in rows]
        path.write_text("\n".join(lines) + "\n")
    else:
        path = out_dir / f"{name}.json"
        clean = [
            {c: (None if isinstance(r[c], float) and math.isnan(r[c]) else r[c]) for c in columns}
            for r in rows
        ]
        path.write_text(json.dumps(clean, indent=1) + "\n")
    return path


def write_manifest(out_dir: Path, name: str, cfg: dict, derived: dict, started: float):
    manifest = {
        "run": name,
        "version": __version__,
        "config_hash": cfg["_hash"],
        "config": {k: v for k, v in cfg.items() if not k.startswith("_")},
        "derived": derived,
        "wall_clock_s": round(time.time() - started, 3),
    }
    (out_dir / f"{name}.manifest").write_text(json.dumps(manifest, indent=1, default=str) + "\n")


def _dump(circuit, path: str | None):
    if path:
        Path(path).write_text(to_text(circuit))


def cmd_evolve(cfg, out_dir: Path, fmt: str, dump: str | None) -> dict:
    L, m, (beta,) = _lattice_params(cfg)
    params = SineGordonParams(L, m, beta)
    lams = cfg.get("sim", {}).get("lambda_list") or (_need(cfg, "sim", "lambda"),)
    order = _need(cfg, "sim", "trotter_order", "second_symmetric")
    steps_cfg = _need(cfg, "sim", "trotter_steps", "auto")
    t_max = _need(cfg, "sim", "t_max")
    n_points = _need(cfg, "sim", "n_points")
    mode = _need(cfg, "sim", "mode", MODE_REFERENCE)
    if t_max < 0 or n_points < 1:
        raise ConfigError("need t_max >= 0 and n_points >= 1")
    rows, derived = [], {}
    for lam in lams:
        if t_max == 0 or n_points == 1:
            rows.append({"t": 0.0, "survival_prob": 1.0, "L": L, "m": m, "beta": beta,
                         "lambda": lam, "trotter_steps": 0, "mode": mode})
            continue
        steps = steps_cfg
        if steps == "auto":
            steps = resolve_trotter_steps(params, lam, t_max, order)
        t_grid = np.linspace(0.0, t_max, n_points)
        ts, probs, meta = survival_series(params, lam, t_grid, TrotterSchedule(order, steps), mode)
        derived[f"lambda_{lam}"] = {"trotter_steps": meta["total_steps"]}
        for t, p in zip(ts, probs):
            rows.append({"t": float(t), "survival_prob": float(p), "L": L, "m": m,
                         "beta": beta, "lambda": lam, "trotter_steps": meta["total_steps"],
                         "mode": mode})
    if dump:
        lam = lams[0]
        shape = evolution_shape(params, lam, MODE_COMPILED)
        dt = t_max / max(1, 16) if t_max else 0.1
        step = u_pot_circuit(params, dt, TrotterSchedule(), MODE_COMPILED, shape).extended(
            u_quad_circuit(params, dt, shape)
        )
        _dump(step, dump)
    write_rows(rows, ["t", "survival_prob", "L", "m", "beta", "lambda", "trotter_steps", "mode"],
               out_dir, "evolve", fmt)
    return derived


def cmd_qite(cfg, out_dir: Path, fmt: str, dump: str | None) -> dict:
    L, m, betas = _lattice_params(cfg, allow_beta_list=True)
    lam = _need(cfg, "sim", "lambda")
    dtau = _need(cfg, "qite", "dtau")
    steps = _need(cfg, "qite", "steps")
    pot_mode = _need(cfg, "qite", "pot_mode", POT_REFERENCE)
    rows, derived = [], {}
    for beta in betas:
        try:
            params = SineGordonParams(L, m, beta)
            config = QiteConfig(dtau=dtau, steps=steps, pot_mode=pot_mode)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        trace, _ = qite_run(params, lam, config)
        try:
            (e0, _), = ground_state(params, lam, k=1)
            derived[f"beta_{beta}"] = {"e0_ed": e0}
        except DimensionGuardError:
            derived[f"beta_{beta}"] = {"e0_ed": None}
        for tau, e, f, p in zip(trace.tau, trace.energy, trace.fidelity, trace.success_prob):
            rows.append({"tau": float(tau), "energy": float(e), "fidelity": float(f),
                         "success_prob": float(p), "L": L, "m": m, "beta": beta,
                         "lambda": lam, "dtau": dtau, "mode": pot_mode})
    if dump:
        params = SineGordonParams(L, m, betas[0])
        fd = fourier_data(L)
        coeffs = tuple(betas[0] * fd.v[0, s] for s in range(L))
        circ = nonunitary_trig_circuit("cos", LinearInX(coeffs),
                                       -2.0 * dtau * params.pot_amplitude, cutoff=lam)
        _dump(circ, dump)
    write_rows(rows, ["tau", "energy", "fidelity", "success_prob", "L", "m", "beta",
                      "lambda", "dtau", "mode"], out_dir, "qite", fmt)
    return derived


def cmd_correlator(cfg, out_dir: Path, fmt: str, dump: str | None) -> dict:
    L, m, (beta,) = _lattice_params(cfg)
    params = SineGordonParams(L, m, beta)
    lam = _need(cfg, "sim", "lambda")
    alpha = _need(cfg, "correlator", "alpha")
    n = _need(cfg, "correlator", "n")
    k = _need(cfg, "correlator", "k")
    source = _need(cfg, "correlator", "ground_source", GROUND_ED)
    t_max = _need(cfg, "sim", "t_max")
    n_points = _need(cfg, "sim", "n_points")
    qcfg = None
    if source == GROUND_QITE:
        qcfg = QiteConfig(dtau=_need(cfg, "qite", "dtau", 0.5),
                          steps=_need(cfg, "qite", "steps", 10),
                          pot_mode=_need(cfg, "qite", "pot_mode", POT_REFERENCE))
    config = VertexConfig(alpha, n, k, tuple(np.linspace(0.0, t_max, n_points)), source)
    ts, gc, meta = vertex_correlator_series(params, lam, config, qcfg)
    rows = [{"t": float(t), "re_gc": float(g.real), "im_gc": float(g.imag),
             "abs_gc": float(abs(g)), "alpha": alpha, "n": n, "k": k,
             "ground_source": source} for t, g in zip(ts, gc)]
    if dump:
        shape = evolution_shape(params, lam, MODE_COMPILED)
        _dump(u_quad_circuit(params, t_max / max(1, n_points - 1), shape), dump)
    write_rows(rows, ["t", "re_gc", "im_gc", "abs_gc", "alpha", "n", "k", "ground_source"],
               out_dir, "correlator", fmt)
    return {"e0": meta["e0"]}


def cmd_kink(cfg, out_dir: Path, fmt: str, dump: str | None) -> dict:
    L, m, betas = _lattice_params(cfg, allow_beta_list=True)
    lam = _need(cfg, "sim", "lambda")
    source = _need(cfg, "kink", "ground_source", GROUND_QITE)
    rows, derived = [], {}
    for beta in betas:
        params = SineGordonParams(L, m, beta)
        phi_left = _need(cfg, "kink", "phi_left", 0.0)
        phi_right = _need(cfg, "kink", "phi_right", 2.0 * math.pi / beta)
        kcfg = KinkConfig(phi_left, phi_right)
        qcfg = QiteConfig(dtau=_need(cfg, "qite", "dtau", 0.5),
                          steps=_need(cfg, "qite", "steps", 10),
                          pot_mode=_need(cfg, "qite", "pot_mode", POT_REFERENCE))
        profile = kink_profile(params, lam, kcfg, source, qcfg)
        charge = (profile.mean_phi[-1] - profile.mean_phi[0]) * beta / (2.0 * math.pi)
        derived[f"beta_{beta}"] = {"charge": charge}
        for site in range(L):
            rows.append({"site": site, "mean_phi": float(profile.mean_phi[site]),
                         "variance": float(profile.variance[site]),
                         "classical_phi": float(profile.classical_phi[site]),
                         "beta": beta, "lambda": lam, "ground_source": source})
    if dump:
        params = SineGordonParams(L, m, betas[0])
        fd = fourier_data(L)
        coeffs = tuple(betas[0] * fd.v[0, s] for s in range(L))
        circ = nonunitary_trig_circuit(
            "cos", LinearInX(coeffs),
            -2.0 * _need(cfg, "qite", "dtau", 0.5) * params.pot_amplitude, cutoff=lam)
        _dump(circ, dump)
    write_rows(rows, ["site", "mean_phi", "variance", "classical_phi", "beta", "lambda",
                      "ground_source"], out_dir, "kink", fmt)
    return derived


def cmd_gatecheck(cfg, out_dir: Path, fmt: str, dump: str | None) -> dict:
    c = _need(cfg, "gatecheck", "c")
    lam = _need(cfg, "gatecheck", "lambda")
    t_list = _need(cfg, "gatecheck", "t_list")
    orders = _need(cfg, "gatecheck", "orders", ("first",))
    steps = _need(cfg, "gatecheck", "steps", 1)
    xi, q = position_basis(lam)
    rows = []
    mode_in = displacement(0.5, lam).mat[:, 0]  # coherent alpha = 0.5 test state
    for order in orders:
        for t in t_list:
            circ = cosine_x_circuit(c, t, TrotterSchedule(order, steps), lam)
            amp = np.zeros(circ.shape.dim, dtype=complex)
            amp.reshape(2, 2, lam)[0, 0, :] = mode_in
            out = simulate(circ, HybridState(circ.shape, amp))
            target = (q * np.exp(-1j * t * np.cos(c * xi))) @ q.conj().T @ mode_in
            ideal = np.zeros_like(amp)
            ideal.reshape(2, 2, lam)[0, 0, :] = target
            overlap = abs(np.vdot(ideal, out.amplitudes)) ** 2
            err = math.sqrt(max(0.0, 1.0 - overlap))
            rows.append({"t": t, "c": c, "order": order, "steps": steps,
                         "circuit_error": err})
    if dump:
        _dump(cosine_x_circuit(c, t_list[0], TrotterSchedule(orders[0], steps), lam), dump)
    write_rows(rows, ["t", "c", "order", "steps", "circuit_error"], out_dir, "gatecheck", fmt)
    return {}


COMMANDS = {
    "evolve": cmd_evolve,
    "qite": cmd_qite,
    "correlator": cmd_correlator,
    "kink": cmd_kink,
    "gatecheck": cmd_gatecheck,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="sgsim", description=__doc__)
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", default=None, help="output directory (overrides [output] dir)")
    parser.add_argument("--format", choices=["csv", "json"], default=None)
    parser.add_argument("--dump-circuit", default=None, metavar="FILE")
    args = parser.parse_args(argv)
    started = time.time()
    try:
        cfg = load_config(Path(args.config))
        out_dir = Path(args.out or cfg.get("output", {}).get("dir", "."))
        fmt = args.format or cfg.get("output", {}).get("format", "csv")
        derived = COMMANDS[args.command](cfg, out_dir, fmt, args.dump_circuit)
        write_manifest(out_dir, args.command, cfg, derived, started)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DimensionGuardError as exc:
        print(f"dimension guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (PostselectionError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
