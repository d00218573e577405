"""Scenario runner: ``mtcavity <command> [key=value ...] [--config FILE]``.

Config files hold flat ``key=value`` lines with ``#`` comments; a
``command=`` line may stand in for the positional command.  Every run
writes its outputs plus ``manifest.txt`` (all resolved parameters and the
seed) into the output directory.  Failures print one JSON line on stderr
and exit 2 (config), 3 (precondition) or 4 (numerical abort).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import cavity, gates, lattice, qteleport, soliton, transfer

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "MTCAVITY_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "mtcavity_out"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PRECONDITION = 3
EXIT_NUMERICAL = 4


class ConfigError(Exception):
    pass


REQUIRED = object()

DEFAULTS: dict[str, dict] = {
    "lattice": {
        "n_rings": 125,
        "n_protofilaments": 13,
        "inner_radius_nm": 7.0,
        "outer_radius_nm": 12.5,
        "height_nm": 8.0,
        "mobile_electrons": 36,
        "pocket_separation_nm": 4.0,
        "epsilon_rel": 80.0,
        "flip_angle_free_deg": 27.7,
        "flip_angle_trunk_deg": 2.0,
    },
    "soliton": {
        "n_points": 4096,
        "length": 163.84,
        "speed": 0.2,
        "x0": -40.0,
        "dt_factor": 0.1,
        "n_steps": 20000,
        "sample_every": 500,
        "gamma": 0.0,
        "force": 0.0,
        "delta_g": 0.0,
        "boundary": "fixed",
        "vacuum": 1.0,
        "coupling": 1.0,
        "L_m": 1e-6,
        "v_m_per_s": 2.0,
    },
    "collide": {
        "mode": "pair",
        "n_points": 2001,
        "length": 100.0,
        "separation": 20.0,
        "speed": 0.8,
        "gamma": 0.1,
        "dt_factor": 0.5,
        "t_final": 200.0,
        "launch_offset": 0.0,
    },
    "cavity": {
        "omega_c": 6e12,
        "omega_0": 1e12,
        "epsilon_rel": 80.0,
        "volume": cavity.DEFAULT_VOLUME_M3,
        "N": 111,
        "dipole_Cm": 3e-28,
        "polarization_cos": 1.0,
        "T_r": 1e-4,
        "coupling_field": "1e4",
        "resonant": True,
        "t_collapse_lo": 1e-7,
        "t_collapse_hi": 1e-6,
        "L_m": 1e-6,
        "v_m_per_s": 2.0,
        "n_omega": 2001,
        "half_width": 0.0,
    },
    "teleport": {
        "amp0": "0.6",
        "amp1": "0.8",
        "trials": 1,
        "forced": "",
    },
    "gate": {
        "network": "",
        "p": 1.0,
        "inputs": "",
        "layer": "abstract",
        "monte_carlo": False,
        "trials": 10000,
        "same_phase": "coalesce",
        "length_midpoint_um": math.inf,
        "length_width_um": 1.0,
        "n_points": 2001,
        "t_final": 200.0,
        "gamma": 0.1,
        "speed": 0.8,
        "launch_offset": 0.0,
    },
    "forster": {
        "T1": REQUIRED,
        "r0_angstrom": 2.1,
        "r_angstrom": 2.8,
        "hop_distance_m": 2.8e-10,
        "chain_length_m": 1e-6,
        "L_m": 1e-6,
        "v_m_per_s": 2.0,
    },
    "report": {
        "L_m": 1e-6,
        "v_m_per_s": 2.0,
    },
}

COMMON_KEYS = ("seed", "output_dir", "command")


@dataclass
class Scenario:
    command: str
    parameters: dict
    seed: int
    output_dir: Path


# ---------------------------------------------------------------------------
# parsing
# ---------------------------------------------------------------------------


def parse_kv_lines(text: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw.strip()!r}")
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def _coerce(key: str, raw: str, default):
    try:
        if isinstance(default, bool):
            low = raw.lower()
            if low in ("1", "true", "yes", "on"):
                return True
            if low in ("0", "false", "no", "off"):
                return False
            raise ValueError(raw)
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float) or default is REQUIRED:
            return float(raw)
        return raw
    except ValueError:
        raise ConfigError(f"bad value for {key}: {raw!r}") from None


def resolve(command: str | None, pairs: dict[str, str], env: dict | None = None) -> Scenario:
    env = os.environ if env is None else env
    pairs = dict(pairs)
    cmd = pairs.pop("command", None) if command is None else command
    pairs.pop("command", None)
    if not cmd:
        raise ConfigError("no command given")
    if cmd not in DEFAULTS:
        raise ConfigError(f"unknown command {cmd!r}; choose from {sorted(DEFAULTS)}")
    defaults = DEFAULTS[cmd]
    unknown = sorted(set(pairs) - set(defaults) - set(COMMON_KEYS))
    if unknown:
        raise ConfigError(f"unknown keys for {cmd}: {unknown}")
    params = {}
    for key, default in defaults.items():
        if key in pairs:
            params[key] = _coerce(key, pairs[key], default)
        elif default is REQUIRED:
            raise ConfigError(f"{cmd} requires {key}")
        else:
            params[key] = default
    try:
        seed = int(pairs.get("seed", "0"))
    except ValueError:
        raise ConfigError(f"bad seed {pairs['seed']!r}") from None
    if seed < 0:
        raise ConfigError("seed must be an unsigned integer")
    out = env.get(OUTPUT_DIR_ENV) or pairs.get("output_dir") or DEFAULT_OUTPUT_DIR
    return Scenario(cmd, params, seed, Path(out))


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mtcavity", description="Microtubule QED-cavity workbench")
    parser.add_argument("command", nargs="?", help="|".join(DEFAULTS))
    parser.add_argument("params", nargs="*", help="key=value overrides")
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--output-dir", help="output directory")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def scenario_from_argv(argv) -> Scenario:
    args = build_parser().parse_args(argv)
    pairs: dict[str, str] = {}
    if args.config:
        try:
            pairs.update(parse_kv_lines(Path(args.config).read_text()))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    command = args.command
    tokens = list(args.params)
    if command and "=" in command:
        tokens.insert(0, command)
        command = None
    for tok in tokens:
        if "=" not in tok:
            raise ConfigError(f"expected key=value, got {tok!r}")
        key, _, value = tok.partition("=")
        pairs[key.strip()] = value.strip()
    if args.output_dir:
        pairs["output_dir"] = args.output_dir
    return resolve(command, pairs)


# ---------------------------------------------------------------------------
# commands; each returns {filename: text}
# ---------------------------------------------------------------------------


def _kv(rows) -> str:
    out = []
    for key, value in rows:
        if isinstance(value, bool):
            out.append(f"{key}={str(value).lower()}")
        elif isinstance(value, (int, np.integer)):
            out.append(f"{key}={value}")
        elif isinstance(value, float):
            out.append(f"{key}={value:.12e}")
        else:
            out.append(f"{key}={value}")
    return "\n".join(out) + "\n"


def run_lattice(sc: Scenario) -> dict[str, str]:
    p = sc.parameters
    spec = lattice.DimerSpec(
        height_nm=p["height_nm"],
        mobile_electrons=p["mobile_electrons"],
        pocket_separation_nm=p["pocket_separation_nm"],
        flip_angle_free_deg=p["flip_angle_free_deg"],
        flip_angle_trunk_deg=p["flip_angle_trunk_deg"],
    )
    lat = lattice.build_lattice(
        p["n_rings"],
        spec,
        n_protofilaments=p["n_protofilaments"],
        inner_radius_nm=p["inner_radius_nm"],
        outer_radius_nm=p["outer_radius_nm"],
    )
    d = lattice.estimate_dipole(spec, p["epsilon_rel"])
    report = _kv(
        [
            ("n_sites", lat.n_sites),
            ("length_m", lat.length_m),
            ("dipole_raw_Cm", d.raw_Cm),
            ("dipole_screened_Cm", d.screened_Cm),
            ("dipole_raw_debye", d.debye),
            ("u0_free", lattice.longitudinal_projection(spec, d.screened_Cm, trunk=False)),
            ("u0_trunk", lattice.longitudinal_projection(spec, d.screened_Cm, trunk=True)),
            ("note", "dipole_raw_debye is the direct unit conversion of dipole_raw_Cm"),
        ]
    )
    return {"lattice.csv": lattice.lattice_csv(lat), "lattice_report.txt": report}


def run_soliton(sc: Scenario) -> dict[str, str]:
    p = sc.parameters
    boundary = soliton.Boundary(p["boundary"])
    grid = soliton.Grid.centered(p["length"], p["n_points"], periodic=boundary is soliton.Boundary.PERIODIC)
    U = soliton.PotentialPoly.double_well(p["vacuum"], p["coupling"])
    k = soliton.boosted_double_well_kink(p["speed"], p["x0"], p["vacuum"], p["coupling"])
    state = soliton.FieldState.from_profiles(
        grid, [k], background=-p["vacuum"], boundary=boundary, gamma=p["gamma"], force=p["force"]
    )
    q = soliton.NO_CORRECTION
    if p["delta_g"] > 0:
        q = soliton.QuantumCorrection(p["delta_g"], soliton.CorrectionMode.CONSTANT)
    res = soliton.evolve(
        state, U, q, dt=p["dt_factor"] * grid.dx, n_steps=p["n_steps"], sample_every=p["sample_every"], reference=k
    )
    energies = [s.energy for s in res.samples]
    report = _kv(
        [
            ("fitted_speed", res.fitted_speed()),
            ("max_shape_l2", max(s.shape_l2 for s in res.samples)),
            ("energy_rel_drift", max(abs(e - energies[0]) for e in energies) / abs(energies[0])),
            ("transit_time_s", soliton.transit_time(p["L_m"], p["v_m_per_s"])),
        ]
    )
    return {
        "trajectory.csv": soliton.trajectory_csv(res.samples),
        "snapshot.csv": soliton.snapshot_csv(res.state),
        "soliton_report.txt": report,
    }


def run_collide(sc: Scenario) -> dict[str, str]:
    p = sc.parameters
    cfg = gates.PhysicalGateConfig(
        n_points=p["n_points"],
        length=p["length"],
        dt_factor=p["dt_factor"],
        t_final=p["t_final"],
        gamma=p["gamma"],
        speed=p["speed"],
        separation=p["separation"],
        launch_offset=p["launch_offset"],
    )
    arrivals = {"pair": (True, True), "single": (True, False), "empty": (False, False)}
    if p["mode"] not in arrivals:
        raise ValueError(f"mode must be one of {sorted(arrivals)}")
    state = gates.output_field(arrivals[p["mode"]], cfg)
    rep = soliton.collide(state, soliton.PotentialPoly.double_well(), dt=cfg.dt, n_steps=cfg.n_steps)
    report = _kv([("survivors", rep.survivors), ("final_vacuum_residual", rep.final_vacuum_residual)])
    return {"collision_report.txt": report, "snapshot.csv": soliton.snapshot_csv(rep.state)}


def _cavity_params(p: dict) -> cavity.CavityParams:
    field = p["coupling_field"]
    coupling_field = None if field == "computed" else float(field)
    return cavity.CavityParams(
        omega_c=p["omega_c"],
        omega_0=p["omega_0"],
        epsilon_rel=p["epsilon_rel"],
        volume=p["volume"],
        N=p["N"],
        dipole_Cm=p["dipole_Cm"],
        polarization_cos=p["polarization_cos"],
        T_r=p["T_r"],
        coupling_field_V_per_m=coupling_field,
        resonant=p["resonant"],
        t_collapse_range=(p["t_collapse_lo"], p["t_collapse_hi"]),
    )


def run_cavity(sc: Scenario) -> dict[str, str]:
    p = sc.parameters
    try:
        params = _cavity_params(p)
    except ValueError as exc:
        if "could not convert" in str(exc):
            raise ConfigError(f"coupling_field must be a number or 'computed': {exc}") from None
        raise
    res = cavity.analyze(params)
    fom = cavity.figures_of_merit(params, p["L_m"], p["v_m_per_s"])
    text = cavity.report_text(res) + _kv(
        [("transit_time_s", fom.transit_time), ("outlasts_transit", fom.outlasts_transit)]
    )
    hw = p["half_width"] if p["half_width"] > 0 else None
    plus, minus = res.peaks
    span = max(plus - minus, hw or cavity.linewidth(params), 1.0)
    omega = np.linspace(minus - span, plus + span, p["n_omega"])
    curve = cavity.spectrum(params, res.lambda0, omega, hw)
    rows = "".join(f"{w:.12e},{a:.12e}\n" for w, a in zip(omega, curve))
    return {"cavity_report.txt": text, "spectrum.csv": "omega,absorption\n" + rows}


def run_teleport(sc: Scenario) -> dict[str, str]:
    p = sc.parameters
    try:
        amp = (complex(p["amp0"].replace(" ", "")), complex(p["amp1"].replace(" ", "")))
    except ValueError:
        raise ConfigError("amp0/amp1 must be complex literals such as 0.6 or 0.5+0.5j") from None
    if p["trials"] < 1:
        raise ValueError("trials must be >= 1")
    if p["forced"]:
        forced = qteleport.BellOutcome(p["forced"])
        transcripts = [qteleport.teleport(amp, forced=forced) for _ in range(p["trials"])]
    else:
        transcripts = qteleport.teleport_batch(amp, p["trials"], sc.seed)
    return {"transcript.csv": qteleport.transcript_csv(transcripts)}


def _truth_rows(n: int) -> list[tuple[int, ...]]:
    return [tuple((code >> (n - 1 - i)) & 1 for i in range(n)) for code in range(2**n)]


def run_gate(sc: Scenario) -> dict[str, str]:
    p = sc.parameters
    if p["network"]:
        try:
            net = gates.parse_network(Path(p["network"]).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read network file: {exc}") from None
    else:
        net = gates.xor_network(p["p"])
    if math.isfinite(p["length_midpoint_um"]):
        net = gates.with_length_bias(net, p["length_midpoint_um"], p["length_width_um"])
    n_in = len(net.input_segments)
    if p["inputs"]:
        rows = [tuple(int(b) for b in p["inputs"].split(","))]
    else:
        rows = _truth_rows(n_in)
    if p["layer"] not in ("abstract", "physical"):
        raise ConfigError("layer must be abstract or physical")
    cfg = gates.PhysicalGateConfig(
        n_points=p["n_points"], t_final=p["t_final"], gamma=p["gamma"], speed=p["speed"], launch_offset=p["launch_offset"]
    )
    results = []
    for row in rows:
        if p["layer"] == "abstract":
            out = gates.eval_abstract(
                net, row, p["same_phase"], monte_carlo=p["monte_carlo"], trials=p["trials"], seed=sc.seed
            )
        else:
            out = gates.eval_physical(net, row, cfg)
        results.append(("".join(map(str, row)), out))
    return {"outcome.csv": gates.outcome_csv(results)}


def run_forster(sc: Scenario) -> dict[str, str]:
    p = sc.parameters
    fp = transfer.ForsterParams(p["T1"], p["r0_angstrom"], p["r_angstrom"])
    cmp = transfer.compare_channels(fp, p["hop_distance_m"], p["chain_length_m"], (p["L_m"], p["v_m_per_s"]))
    return {"forster_report.txt": cmp.report_text()}


@dataclass(frozen=True)
class ReportRow:
    quantity: str
    computed: float
    paper: float
    passed: bool

    @property
    def ratio(self) -> float:
        return self.computed / self.paper


def reference_numbers(L_m: float = 1e-6, v_m_per_s: float = 2.0) -> list[ReportRow]:
    """All-defaults bundle compared against the reference orders of magnitude."""

    def within(computed, paper):
        return 0.1 <= computed / paper <= 10.0

    params = cavity.CavityParams()
    res = cavity.analyze(params)
    t_f = soliton.transit_time(L_m, v_m_per_s)
    fom = cavity.figures_of_merit(params, L_m, v_m_per_s)
    d = lattice.estimate_dipole()
    values = [
        ("t_F_s", t_f, 5e-7),
        ("E_c_V_per_m", res.E_c, 1e4),
        ("lambda_sqrtN_per_s", res.lambda_collective, 3e11),
        ("Q", res.Q, 1e8),
        ("dipole_raw_Cm", d.raw_Cm, 2.3e-26),
        ("dipole_screened_Cm", d.screened_Cm, 3e-28),
    ]
    rows = [ReportRow(q, c, ref, within(c, ref)) for q, c, ref in values]
    # the collapse band must outlast the transit: compare upper end with t_F
    hi = fom.t_collapse_range[1]
    rows.append(ReportRow("t_collapse_hi_over_t_F", hi / t_f, 1.0, bool(fom.outlasts_transit) and within(hi, t_f)))
    return rows


def report_csv(rows) -> str:
    lines = ["quantity,computed,paper,ratio,pass"]
    for r in rows:
        lines.append(f"{r.quantity},{r.computed:.6e},{r.paper:.6e},{r.ratio:.6e},{str(r.passed).lower()}")
    return "\n".join(lines) + "\n"


def run_report(sc: Scenario) -> dict[str, str]:
    rows = reference_numbers(sc.parameters["L_m"], sc.parameters["v_m_per_s"])
    return {"report.csv": report_csv(rows)}


COMMANDS: dict[str, Callable[[Scenario], dict[str, str]]] = {
    "lattice": run_lattice,
    "soliton": run_soliton,
    "collide": run_collide,
    "cavity": run_cavity,
    "teleport": run_teleport,
    "gate": run_gate,
    "forster": run_forster,
    "report": run_report,
}


def manifest_text(sc: Scenario, files) -> str:
    lines = [f"command={sc.command}", f"seed={sc.seed}"]
    for key in sorted(sc.parameters):
        lines.append(f"{key}={sc.parameters[key]!r}")
    lines.append("outputs=" + ",".join(sorted(files)))
    return "\n".join(lines) + "\n"


def run(sc: Scenario) -> dict[str, str]:
    files = COMMANDS[sc.command](sc)
    sc.output_dir.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (sc.output_dir / name).write_text(text)
    (sc.output_dir / "manifest.txt").write_text(manifest_text(sc, files))
    return files


def _fail(code: int, kind: str, message: str) -> int:
    sys.stderr.write(json.dumps({"error": kind, "exit": code, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        sc = scenario_from_argv(argv)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", str(exc))
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        files = run(sc)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, "config", str(exc))
    except (soliton.NumericalAbort, soliton.SolitonError) as exc:
        return _fail(EXIT_NUMERICAL, "numerical", str(exc))
    except ValueError as exc:
        return _fail(EXIT_PRECONDITION, "precondition", str(exc))
    print(f"{sc.command}: wrote {', '.join(sorted(files))} and manifest.txt to {sc.output_dir}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
