"""Batch front door: run | exact | diagnostics | count | convert-traces.

Run configurations are flat ``key = value`` text files ('#' starts a
comment) with command-line ``--set key=value`` overrides.  Reports are JSON
with stable field names and no timestamps, so identical configurations with
the same seed and deterministic reductions reproduce byte-identical files.

Exit codes: 0 converged, 1 I/O error, 2 finished without convergence
(best-so-far results are still written), 3 infeasible spin state, 4
non-finite objective (trace dumped for diagnosis).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .ansatz import (
    AnsatzSpec,
    apply_ansatz,
    build_reference,
    compile_ansatz,
)
from .diagnostics import diagnostics_report
from .exact import NoSpinStateError, casci_energy, sector_spectrum
from .integrals import load_fcidump
from .mapping import build_qubit_hamiltonian
from .orbital_opt import MacroTrace, OrbitalOptConfig, compute_rdms, run_oo_vqe
from .statevector import (
    PRECISION_DTYPES,
    load_state,
    set_deterministic_reduction,
)
from .vqe import (
    AdamParams,
    SaVqeProblem,
    ScheduleParams,
    VqeDivergenceError,
    VqeTrace,
    run_vqe,
)

#: CODATA-derived Hartree to kcal/mol conversion.
HARTREE_TO_KCAL = 627.5094740631

EXIT_OK = 0
EXIT_IO = 1
EXIT_NOT_CONVERGED = 2
EXIT_INFEASIBLE = 3
EXIT_NAN = 4


@dataclass
class RunConfig:
    fcidump: str = ""
    output_dir: str = ""
    ansatz: str = "kupccgsd"
    k: int = 4
    tying: str = "independent"
    spin_adapted_singles: bool = False
    reference_family: str = "T0"
    spin_states: tuple[int, ...] = (0, 1, 2)
    weights: tuple[float, ...] | None = None
    schedule_initial: float = 1e-2
    schedule_end: float = 1e-3
    schedule_boundary: int = 35000
    schedule_width: int = 10000
    schedule_power: float = 2.0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    tolerance: float = 1e-7
    window: int = 50
    max_steps: int = 50000
    max_macros: int = 100
    orbital_optimization: bool = True
    orbital_step: float = 0.1
    orbital_gradient_tol: float = 1e-5
    precision: str = "f64"
    deterministic_reduction: bool = False
    seed: int = 0
    theta_init: str = "zeros"
    theta_scale: float = 1e-2
    trace_every: int = 1

    def __post_init__(self) -> None:
        if not self.spin_states:
            raise ValueError("spin_states must be nonempty")
        if self.precision not in PRECISION_DTYPES:
            raise ValueError("precision must be f32 or f64")
        if self.theta_init not in ("zeros", "random"):
            raise ValueError("theta_init must be zeros or random")
        for name in ("tolerance", "orbital_gradient_tol", "orbital_step"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.weights is not None and len(self.weights) != len(self.spin_states):
            raise ValueError("one weight per spin state")

    def resolved_weights(self) -> np.ndarray:
        if self.weights is None:
            return np.full(len(self.spin_states), 1.0 / len(self.spin_states))
        w = np.asarray(self.weights, dtype=np.float64)
        return w / w.sum()

    def echo(self) -> dict:
        out = {}
        for name, value in self.__dict__.items():
            if isinstance(value, tuple):
                out[name] = list(value)
            else:
                out[name] = value
        out["weights"] = [float(w) for w in self.resolved_weights()]
        return out


_BOOL_KEYS = {"spin_adapted_singles", "orbital_optimization", "deterministic_reduction"}
_INT_KEYS = {
    "k", "schedule_boundary", "schedule_width", "window", "max_steps",
    "max_macros", "seed", "trace_every",
}
_FLOAT_KEYS = {
    "schedule_initial", "schedule_end", "schedule_power", "adam_beta1",
    "adam_beta2", "adam_eps", "tolerance", "orbital_step",
    "orbital_gradient_tol", "theta_scale",
}


def _parse_bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def parse_config_text(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key = value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def build_run_config(pairs: dict[str, str]) -> RunConfig:
    kwargs: dict = {}
    for key, raw in pairs.items():
        if key in _BOOL_KEYS:
            kwargs[key] = _parse_bool(raw)
        elif key in _INT_KEYS:
            kwargs[key] = int(raw)
        elif key in _FLOAT_KEYS:
            kwargs[key] = float(raw)
        elif key == "spin_states":
            kwargs[key] = tuple(int(v) for v in raw.replace(",", " ").split())
        elif key == "weights":
            kwargs[key] = tuple(float(v) for v in raw.replace(",", " ").split())
        elif key in RunConfig.__dataclass_fields__:
            kwargs[key] = raw
        else:
            raise ValueError(f"unknown config key {key!r}")
    return RunConfig(**kwargs)


# ---------------------------------------------------------------------------
# Trace serialization
# ---------------------------------------------------------------------------

def _vqe_trace_rows(trace_arrays: dict, spins: list[int], step_offset: int) -> list[list]:
    rows = []
    steps = trace_arrays["step"]
    for i in range(steps.size):
        row = [int(steps[i]) + step_offset, trace_arrays["learning_rate"][i],
               trace_arrays["energy_avg"][i]]
        row.extend(trace_arrays["energy_states"][i])
        row.extend(trace_arrays["s_squared"][i])
        rows.append(row)
    return rows


def write_vqe_trace_csv(path: Path, traces: list[VqeTrace], spins: list[int]) -> None:
    header = ["step", "lr", "E_avg"]
    header += [f"E_S{s}" for s in spins]
    header += [f"S2_S{s}" for s in spins]
    offset = 0
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for trace in traces:
            arrays = trace.arrays()
            for row in _vqe_trace_rows(arrays, spins, offset):
                writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
            if arrays["step"].size:
                offset += int(arrays["step"][-1]) + 1


def write_macro_trace_csv(path: Path, trace: MacroTrace) -> None:
    arrays = trace.arrays()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["macro", "E_avg_pre", "E_avg_post", "grad_max", "kappa_step_norm"])
        for i in range(arrays["macro"].size):
            writer.writerow([
                int(arrays["macro"][i]),
                repr(float(arrays["energy_pre"][i])),
                repr(float(arrays["energy_post"][i])),
                repr(float(arrays["gradient_max"][i])),
                repr(float(arrays["kappa_step_norm"][i])),
            ])


def save_trace_archive(path: Path, vqe_traces: list[VqeTrace], spins: list[int],
                       macro_trace: MacroTrace | None) -> None:
    payload: dict[str, np.ndarray] = {"spins": np.asarray(spins, dtype=np.int64)}
    for i, trace in enumerate(vqe_traces):
        for key, arr in trace.arrays().items():
            payload[f"vqe{i}_{key}"] = arr
    if macro_trace is not None:
        for key, arr in macro_trace.arrays().items():
            payload[f"macro_{key}"] = arr
    np.savez(path, **payload)


def convert_trace_archive(archive: Path, out_dir: Path) -> list[Path]:
    data = np.load(archive)
    spins = [int(s) for s in data["spins"]]
    n_runs = 0
    while f"vqe{n_runs}_step" in data:
        n_runs += 1
    traces = []
    for i in range(n_runs):
        trace = VqeTrace()
        trace.step = [int(v) for v in data[f"vqe{i}_step"]]
        trace.learning_rate = list(data[f"vqe{i}_learning_rate"])
        trace.energy_avg = list(data[f"vqe{i}_energy_avg"])
        trace.energy_states = list(data[f"vqe{i}_energy_states"])
        trace.s_squared = list(data[f"vqe{i}_s_squared"])
        trace.s_z = list(data[f"vqe{i}_s_z"])
        trace.n_electrons = list(data[f"vqe{i}_n_electrons"])
        trace.max_overlap = list(data[f"vqe{i}_max_overlap"])
        traces.append(trace)
    written = []
    out_dir.mkdir(parents=True, exist_ok=True)
    vqe_path = out_dir / "vqe_trace.csv"
    write_vqe_trace_csv(vqe_path, traces, spins)
    written.append(vqe_path)
    if "macro_macro" in data:
        macro = MacroTrace()
        macro.macro = [int(v) for v in data["macro_macro"]]
        macro.energy_pre = list(data["macro_energy_pre"])
        macro.energy_post = list(data["macro_energy_post"])
        macro.gradient_max = list(data["macro_gradient_max"])
        macro.kappa_step_norm = list(data["macro_kappa_step_norm"])
        macro_path = out_dir / "macro_trace.csv"
        write_macro_trace_csv(macro_path, macro)
        written.append(macro_path)
    return written


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _cmd_run(args: argparse.Namespace) -> int:
    pairs: dict[str, str] = {}
    if args.config:
        try:
            pairs.update(parse_config_text(Path(args.config).read_text()))
        except OSError as exc:
            print(f"error: cannot read config: {exc}", file=sys.stderr)
            return EXIT_IO
    for item in args.set or []:
        if "=" not in item:
            print(f"error: --set expects key=value, got {item!r}", file=sys.stderr)
            return EXIT_IO
        key, value = item.split("=", 1)
        pairs[key.strip()] = value.strip()
    try:
        config = build_run_config(pairs)
    except (ValueError, TypeError) as exc:
        print(f"error: bad configuration: {exc}", file=sys.stderr)
        return EXIT_IO
    if not config.fcidump or not config.output_dir:
        print("error: fcidump and output_dir are required", file=sys.stderr)
        return EXIT_IO

    try:
        ints = load_fcidump(config.fcidump)
    except OSError as exc:
        print(f"error: cannot read FCIDUMP: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    out_dir = Path(config.output_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output dir: {exc}", file=sys.stderr)
        return EXIT_IO

    set_deterministic_reduction(config.deterministic_reduction)
    dtype = PRECISION_DTYPES[config.precision]
    spins = list(config.spin_states)
    try:
        references = [
            build_reference(config.reference_family, ints.n_orb, ints.n_electrons, s)
            for s in spins
        ]
    except ValueError as exc:
        print(f"error: infeasible spin state: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE

    spec = AnsatzSpec(
        flavor=config.ansatz,
        k=config.k,
        spin_adapted_singles=config.spin_adapted_singles,
        tying=config.tying,
    )
    program = compile_ansatz(spec, ints.n_orb, ints.n_alpha, ints.n_beta)
    weights = config.resolved_weights()
    schedule = ScheduleParams(
        initial=config.schedule_initial,
        end=config.schedule_end,
        boundary=config.schedule_boundary,
        width=config.schedule_width,
        power=config.schedule_power,
    )
    adam = AdamParams(beta1=config.adam_beta1, beta2=config.adam_beta2, eps=config.adam_eps)
    rng = np.random.default_rng(config.seed)
    if config.theta_init == "random":
        theta0 = rng.uniform(-config.theta_scale, config.theta_scale, program.n_parameters)
    else:
        theta0 = np.zeros(program.n_parameters)

    vqe_traces: list[VqeTrace] = []
    macro_trace = None
    try:
        if config.orbital_optimization:
            oo = OrbitalOptConfig(
                step_size=config.orbital_step,
                max_macros=config.max_macros,
                energy_tol=config.tolerance,
                gradient_tol=config.orbital_gradient_tol,
            )
            result = run_oo_vqe(
                ints, references, weights, program,
                schedule=schedule, adam=adam, tolerance=config.tolerance,
                max_steps=config.max_steps, window=config.window, oo=oo,
                dtype=dtype, trace_every=config.trace_every, theta0=theta0,
            )
            converged = result.converged
            energies = result.energies
            theta = result.theta
            vqe_traces = [r.trace for r in result.vqe_results]
            macro_trace = result.macro_trace
            states = [s.state for s in result.spin_states]
            kappa_total = result.kappa_total
        else:
            hamiltonian = build_qubit_hamiltonian(ints)
            problem = SaVqeProblem(
                hamiltonian=hamiltonian,
                references=references,
                weights=weights,
                program=program,
                tolerance=config.tolerance,
                max_steps=config.max_steps,
                window=config.window,
                dtype=dtype,
            )
            vres = run_vqe(problem, schedule, adam, theta0=theta0,
                           trace_every=config.trace_every)
            converged = vres.converged
            energies = vres.energies
            theta = vres.theta
            vqe_traces = [vres.trace]
            states = [
                apply_ansatz(ref.to_statevector(dtype), program, theta)
                for ref in references
            ]
            kappa_total = None
    except VqeDivergenceError as exc:
        write_vqe_trace_csv(out_dir / "vqe_trace.csv", [exc.trace], spins)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NAN

    energy_by_spin = {s: float(e) for s, e in zip(spins, energies)}
    relative = {}
    if 2 in energy_by_spin:
        for s in spins:
            if s == 2:
                continue
            relative[f"E_S{s}_minus_S2_kcal"] = (
                (energy_by_spin[s] - energy_by_spin[2]) * HARTREE_TO_KCAL
            )

    diagnostics = {}
    for s, state in zip(spins, states):
        report = diagnostics_report(state, label=f"S={s}")
        diagnostics[f"S={s}"] = report.to_dict()

    write_vqe_trace_csv(out_dir / "vqe_trace.csv", vqe_traces, spins)
    if macro_trace is not None:
        write_macro_trace_csv(out_dir / "macro_trace.csv", macro_trace)
    save_trace_archive(out_dir / "traces.npz", vqe_traces, spins, macro_trace)

    report = {
        "config": config.echo(),
        "converged": bool(converged),
        "n_orbitals": ints.n_orb,
        "n_electrons": ints.n_electrons,
        "n_generators": len(program),
        "n_parameters": program.n_parameters,
        "energies_hartree": {f"S={s}": energy_by_spin[s] for s in spins},
        "relative_energies_kcal": relative,
        "hartree_to_kcal": HARTREE_TO_KCAL,
        "diagnostics": diagnostics,
        "trace_files": {
            "vqe": "vqe_trace.csv",
            "macro": "macro_trace.csv" if macro_trace is not None else None,
            "archive": "traces.npz",
        },
    }
    if kappa_total is not None:
        report["kappa_total"] = [[float(v) for v in row] for row in kappa_total]
    (out_dir / "report.json").write_text(
        json.dumps(report, indent=2, sort_keys=True) + "\n"
    )
    print(f"report written to {out_dir / 'report.json'}")
    return EXIT_OK if converged else EXIT_NOT_CONVERGED


def _cmd_exact(args: argparse.Namespace) -> int:
    try:
        ints = load_fcidump(args.fcidump)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    spins = [int(s) for s in args.spins.replace(",", " ").split()]
    hamiltonian = build_qubit_hamiltonian(ints)
    out = {"fcidump": str(args.fcidump), "n_orbitals": ints.n_orb,
           "n_electrons": ints.n_electrons, "states": {}}
    for s in spins:
        try:
            spec = sector_spectrum(hamiltonian, ints.n_electrons, 2 * s)
        except ValueError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        try:
            energy = casci_energy(ints, ints.n_electrons, s, hamiltonian=hamiltonian)
        except NoSpinStateError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INFEASIBLE
        out["states"][f"S={s}"] = {
            "energy_hartree": float(energy),
            "sector_dimension": int(spec.eigenvalues.size),
            "lowest_eigenvalues": [float(e) for e in spec.eigenvalues[:10]],
            "s_squared": [float(v) for v in spec.s_squared[:10]],
        }
    text = json.dumps(out, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_diagnostics(args: argparse.Namespace) -> int:
    try:
        state = load_state(args.snapshot)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    report = diagnostics_report(state, label=args.label)
    text = json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            writer = csv.writer(fh)
            for row in report.mutual_information:
                writer.writerow([repr(float(v)) for v in row])
    return EXIT_OK


def _cmd_count(args: argparse.Namespace) -> int:
    spec = AnsatzSpec(
        flavor=args.flavor,
        k=args.k,
        spin_adapted_singles=args.spin_adapted,
        tying=args.tying,
    )
    n_alpha = args.n_alpha if args.n_alpha is not None else min(args.n_orb, 1)
    n_beta = args.n_beta if args.n_beta is not None else n_alpha
    if n_beta > n_alpha:
        n_alpha, n_beta = n_beta, n_alpha
    program = compile_ansatz(spec, args.n_orb, n_alpha, n_beta)
    print(f"generators {len(program)}")
    print(f"parameters {program.n_parameters}")
    return EXIT_OK


def _cmd_convert_traces(args: argparse.Namespace) -> int:
    try:
        written = convert_trace_archive(Path(args.archive), Path(args.out_dir))
    except (OSError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in written:
        print(f"wrote {path}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spinvqe",
        description="State-averaged orbital-optimized VQE for spin-state energetics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="optimize spin states from an FCIDUMP")
    p_run.add_argument("config", nargs="?", help="flat key = value config file")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a config key")
    p_run.set_defaults(func=_cmd_run)

    p_exact = sub.add_parser("exact", help="exact sector spectra from an FCIDUMP")
    p_exact.add_argument("fcidump")
    p_exact.add_argument("--spins", default="0,1,2")
    p_exact.add_argument("--out", help="write JSON here instead of stdout")
    p_exact.set_defaults(func=_cmd_exact)

    p_diag = sub.add_parser("diagnostics", help="entropy diagnostics of a state snapshot")
    p_diag.add_argument("snapshot")
    p_diag.add_argument("--label", default="")
    p_diag.add_argument("--out", help="write JSON here instead of stdout")
    p_diag.add_argument("--csv", help="also dump the mutual-information matrix as CSV")
    p_diag.set_defaults(func=_cmd_diagnostics)

    p_count = sub.add_parser("count", help="generator/parameter counts for an ansatz")
    p_count.add_argument("--flavor", default="kupccgsd")
    p_count.add_argument("--k", type=int, default=4)
    p_count.add_argument("--n-orb", type=int, required=True)
    p_count.add_argument("--tying", default="independent")
    p_count.add_argument("--spin-adapted", action="store_true")
    p_count.add_argument("--n-alpha", type=int)
    p_count.add_argument("--n-beta", type=int)
    p_count.set_defaults(func=_cmd_count)

    p_conv = sub.add_parser("convert-traces", help="expand a traces.npz archive to CSV")
    p_conv.add_argument("archive")
    p_conv.add_argument("--out-dir", required=True)
    p_conv.set_defaults(func=_cmd_convert_traces)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


def app() -> None:
    raise SystemExit(main(sys.argv[1:]))
