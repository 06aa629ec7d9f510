"""``bb84opt`` command-line entry point.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
Flag values override a JSON ``--config`` file, which overrides defaults.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import info
from .linalg import pairs_to_complex
from .optimality import nsc_battery, perturb_ivs
from .sim import SimConfig, brute_force_ig, cell_comparison_csv, eve_reduced_density, run_eb_chsh_detail, run_pm
from .states import (
    Basis,
    ErrorRates,
    MeasurementSetup,
    computational_setup,
    fuchs_setup,
    ivs_from_pijs,
    optimal_ivs,
    optimal_pijs,
    random_setup,
)
from .synth import INITIAL_STATES, AttackUnitary, synth_chain

COMMANDS = ("sweep", "verify", "synth", "simulate", "chsh", "oracle")
MEASUREMENTS = ("computational", "fuchs", "random", "file")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str = "sweep"
    d_xy: float = 0.1
    d_uv: float | None = None
    start: float = 0.0
    stop: float = 0.25
    step: float = 0.005
    seed: int = 7
    n: int = 1_000_000
    out: str | None = None
    format: str = "json"
    measurement: str = "computational"
    measurement_file: str | None = None
    initial_state: str = "delta_hadamard"
    state_file: str | None = None
    perturb: float | None = None
    attack: str | None = None
    n_povms: int = 10_000
    workers: int = 1
    cells: str | None = None

    def validate(self) -> "RunConfig":
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.step <= 0:
            raise UsageError("grid step must be positive")
        if self.start > self.stop:
            raise UsageError("grid start exceeds stop")
        for name in ("d_xy", "d_uv", "start", "stop"):
            v = getattr(self, name)
            if v is not None and not 0 <= v <= 0.5:
                raise UsageError(f"{name}={v} outside [0, 1/2]")
        if self.n <= 0 or self.n_povms <= 0:
            raise UsageError("sample counts must be positive")
        if self.format not in ("csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.measurement not in MEASUREMENTS:
            raise UsageError(f"unknown measurement {self.measurement!r}")
        if self.initial_state not in INITIAL_STATES + ("file",):
            raise UsageError(f"unknown initial state {self.initial_state!r}")
        return self

    @property
    def rates(self) -> ErrorRates:
        return ErrorRates(self.d_xy, self.d_xy if self.d_uv is None else self.d_uv)


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def load_measurement(cfg: RunConfig) -> MeasurementSetup:
    if cfg.measurement == "computational":
        return computational_setup()
    if cfg.measurement == "fuchs":
        return fuchs_setup()
    if cfg.measurement == "random":
        return random_setup(cfg.seed)
    if not cfg.measurement_file:
        raise UsageError("--measurement file needs --measurement-file")
    try:
        m = MeasurementSetup.from_dict(_read_json(cfg.measurement_file))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"invalid measurement file: {exc}") from exc
    if m.basis is not Basis.COMPUTATIONAL:
        raise UsageError("the measurement file must describe an xy-basis setup")
    return m


def load_initial_state(cfg: RunConfig):
    if cfg.initial_state != "file":
        return cfg.initial_state
    if not cfg.state_file:
        raise UsageError("--initial-state file needs --state-file")
    try:
        v = pairs_to_complex(_read_json(cfg.state_file)).reshape(-1)
    except ValueError as exc:
        raise UsageError(f"invalid state file: {exc}") from exc
    if v.shape != (4,) or abs(np.linalg.norm(v) - 1) > 1e-10:
        raise UsageError("initial state must be a normalized 4-vector of [re, im] pairs")
    return v


def build_attack(cfg: RunConfig) -> AttackUnitary:
    try:
        return synth_chain(cfg.rates, load_initial_state(cfg), load_measurement(cfg)).validate()
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_sweep(cfg: RunConfig) -> tuple[str, int]:
    points = info.sweep(cfg.start, cfg.stop, cfg.step)
    if cfg.format == "csv":
        return info.sweep_csv(points), EXIT_OK
    return _json([asdict(p) for p in points]), EXIT_OK


def _verify_attack(cfg: RunConfig) -> tuple[str, int]:
    try:
        attack = AttackUnitary.from_dict(_read_json(cfg.attack))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"invalid attack file: {exc}") from exc
    result = {"unitarity_defect": attack.unitarity_defect(), "anchor_defect": attack.anchor_defect()}
    ok = result["unitarity_defect"] <= 1e-9 and result["anchor_defect"] <= 1e-9
    for basis in (Basis.COMPUTATIONAL, Basis.HADAMARD):
        pijs = attack.joint_states(basis)
        report = nsc_battery(ivs_from_pijs(pijs), pijs.measurement, attack.rates)
        result[basis.value] = report.to_dict()
        ok = ok and report.passed
    result["passed"] = ok
    return _json(result), EXIT_OK if ok else EXIT_FAIL


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    if cfg.attack:
        return _verify_attack(cfg)
    m = load_measurement(cfg)
    ivs = optimal_ivs(Basis.COMPUTATIONAL, cfg.rates, m)
    if cfg.perturb is not None:
        ivs = perturb_ivs(ivs, cfg.perturb, cfg.seed)
    report = nsc_battery(ivs, m, cfg.rates)
    out = report.to_dict()
    out["rates"] = {"d_xy": cfg.rates.d_xy, "d_uv": cfg.rates.d_uv}
    out["measurement"] = cfg.measurement
    out["perturb"] = cfg.perturb
    return _json(out), EXIT_OK if report.passed else EXIT_FAIL


def cmd_synth(cfg: RunConfig) -> tuple[str, int]:
    attack = build_attack(cfg)
    if cfg.format == "csv":
        return attack.to_csv(), EXIT_OK
    return attack.to_json(indent=2, sort_keys=True) + "\n", EXIT_OK


def cmd_simulate(cfg: RunConfig) -> tuple[str, int]:
    attack = build_attack(cfg)
    sim_cfg = SimConfig(cfg.rates, cfg.n, cfg.seed, attack, workers=cfg.workers)
    stats = run_pm(sim_cfg)
    if cfg.cells:
        _write(cfg.cells, cell_comparison_csv(stats, sim_cfg))
    return _json(stats.to_dict()), EXIT_OK


def cmd_chsh(cfg: RunConfig) -> tuple[str, int]:
    s, err = run_eb_chsh_detail(cfg.d_xy, cfg.n, cfg.seed)
    out = {"d": cfg.d_xy, "n": cfg.n, "seed": cfg.seed, "S": s, "stderr": err, "closed_form": info.chsh_sum(cfg.d_xy)}
    return _json(out), EXIT_OK


def cmd_oracle(cfg: RunConfig) -> tuple[str, int]:
    pijs = optimal_pijs(Basis.COMPUTATIONAL, cfg.rates, load_measurement(cfg))
    best, eigen = brute_force_ig(eve_reduced_density(pijs, 0), eve_reduced_density(pijs, 1), cfg.n_povms, cfg.seed)
    ok = best <= eigen + 1e-9
    out = {"rates": {"d_xy": cfg.rates.d_xy, "d_uv": cfg.rates.d_uv}, "n_povms": cfg.n_povms,
           "best_ig": best, "eigen_ig": eigen, "ig_star": info.ig_star(cfg.rates.d_uv), "bound_holds": ok}
    return _json(out), EXIT_OK if ok else EXIT_FAIL


HANDLERS = {
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "synth": cmd_synth,
    "simulate": cmd_simulate,
    "chsh": cmd_chsh,
    "oracle": cmd_oracle,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # defaults are SUPPRESS so that only flags actually given override the config file
    opt = dict(default=argparse.SUPPRESS)
    common.add_argument("--config", help="JSON file with RunConfig fields", **opt)
    common.add_argument("--d-xy", dest="d_xy", type=float, **opt)
    common.add_argument("--d-uv", dest="d_uv", type=float, **opt)
    common.add_argument("--start", type=float, **opt)
    common.add_argument("--stop", type=float, **opt)
    common.add_argument("--step", type=float, **opt)
    common.add_argument("--seed", type=int, **opt)
    common.add_argument("--n", type=int, **opt)
    common.add_argument("--out", **opt)
    common.add_argument("--format", choices=("csv", "json"), **opt)
    common.add_argument("--measurement", choices=MEASUREMENTS, **opt)
    common.add_argument("--measurement-file", dest="measurement_file", **opt)
    common.add_argument("--initial-state", dest="initial_state", choices=INITIAL_STATES + ("file",), **opt)
    common.add_argument("--state-file", dest="state_file", **opt)
    common.add_argument("--perturb", type=float, metavar="ANGLE", **opt)
    common.add_argument("--attack", metavar="FILE", help="verify an exported attack unitary", **opt)
    common.add_argument("--n-povms", dest="n_povms", type=int, **opt)
    common.add_argument("--workers", type=int, **opt)
    common.add_argument("--cells", metavar="CSV", help="simulate: exact vs empirical per-cell table", **opt)

    parser = argparse.ArgumentParser(prog="bb84opt", description="Optimal BB84 eavesdropping toolkit")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "sweep": "key-rate curves over a disturbance grid",
        "verify": "run the optimality battery",
        "synth": "synthesize an optimal attack unitary",
        "simulate": "Monte Carlo prepare-and-measure run",
        "chsh": "entanglement-based CHSH estimate",
        "oracle": "brute-force information-gain oracle",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def resolve_config(ns: argparse.Namespace) -> RunConfig:
    values = {}
    if getattr(ns, "config", None):
        data = _read_json(ns.config)
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        values.update(data)
    flags = {k: v for k, v in vars(ns).items() if k != "config"}
    values.update(flags)
    defaults = {"format": "csv"} if values.get("command") == "sweep" else {}
    for k, v in defaults.items():
        values.setdefault(k, v)
    try:
        return RunConfig(**values).validate()
    except TypeError as exc:
        raise UsageError(str(exc)) from exc


def _write(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc}") from exc


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve_config(ns)
        text, code = HANDLERS[cfg.command](cfg)
        _write(cfg.out, text)
    except UsageError as exc:
        print(f"bb84opt: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
