"""Batch front door: subcommands, manifest validation, deterministic outputs.

Exit codes: 0 success, 1 contract error (bad inputs, violated invariants,
failed verification sweep), 2 numerical failure (blow-up outside a stability
run, non-convergent scan), 3 I/O error.  Every failure prints a single
machine-parsable line  ``error: kind=<Class> detail=<message>``  to stderr.

Lengths accept a literal "pi" suffix (e.g. ``--Lx 64pi``) so configurations
never carry truncated decimal representations of pi.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field

from . import analysis, fieldio, solver, soliton
from .errors import ComputeError, ContractError, DomainError
from .spectral import FrequencyPair, Grid, RealField

__all__ = ["RunManifest", "build_manifest", "main", "parse_length", "run"]


def parse_length(text: str) -> float:
    """Parse a length, allowing an exact multiple-of-pi suffix ('64pi', 'pi')."""
    raw = text.strip().lower()
    if raw.endswith("pi"):
        head = raw[:-2].strip()
        factor = 1.0 if head in ("", "+") else (-1.0 if head == "-" else float(head))
        return factor * math.pi
    return float(raw)


@dataclass
class RunManifest:
    """One validated unit of work for ``run``."""

    subcommand: str
    parameters: dict
    seed: int = 0
    outputs: dict[str, str] = field(default_factory=dict)


def _grid_from(params: dict) -> Grid:
    return Grid(params["nx"], params["ny"], params["length_x"], params["lambda_y"])


def _cmd_soliton(m: RunManifest) -> int:
    grid = _grid_from(m.parameters)
    profile = soliton.soliton_profile(
        soliton.SolitonParams(m.parameters["c"], m.parameters["x0"]), grid
    )
    fieldio.write_field(m.outputs["field"], profile, t=0.0)
    print(f"soliton c={m.parameters['c']!r} peak={profile.linf()!r} -> {m.outputs['field']}")
    return 0


def _load_initial(m: RunManifest) -> tuple[RealField, float]:
    params = m.parameters
    if params.get("input") is not None:
        return fieldio.read_field(params["input"])
    grid = _grid_from(params)
    profile = soliton.soliton_profile(soliton.SolitonParams(params["c"], params["x0"]), grid)
    return profile, 0.0


def _cmd_evolve(m: RunManifest) -> int:
    params = m.parameters
    u0, _ = _load_initial(m)
    cfg = solver.SolverConfig(
        dt=params["dt"],
        t_end=params["t_end"],
        dealias=params["dealias"],
        moving_frame_speed=params["frame_speed"],
        record_every=params["record_every"],
    )
    final, records = solver.evolve(u0, cfg)
    if "diagnostics" in m.outputs:
        fieldio.write_diagnostics_csv(m.outputs["diagnostics"], records)
    if "field" in m.outputs:
        fieldio.write_field(m.outputs["field"], final, t=cfg.t_end)
    drift = abs(records[-1].mass - records[0].mass) / max(abs(records[0].mass), 1e-300)
    print(f"evolve t_end={cfg.t_end!r} steps={round(cfg.t_end / cfg.dt)} mass_drift={drift!r}")
    return 0


def _cmd_stability(m: RunManifest) -> int:
    params = m.parameters
    grid = _grid_from(params)
    mode = FrequencyPair(
        params["pert_xi_index"] * 2.0 * math.pi / grid.length_x,
        params["pert_q_index"] / grid.lambda_y,
    )
    cfg = soliton.StabilityRunConfig(
        c=params["c"],
        delta=params["delta"],
        perturbation_mode=mode,
        t_end=params["t_end"],
        solver=solver.SolverConfig(
            dt=params["dt"], t_end=params["t_end"], record_every=params["record_every"]
        ),
    )
    result = soliton.run_stability_experiment(grid, cfg)
    if "diagnostics" in m.outputs:
        fieldio.write_diagnostics_csv(m.outputs["diagnostics"], result.records)
    sup = result.sup_distance()
    threshold = 10.0 * params["delta"]
    verdict = "unstable" if (result.unstable or sup > threshold) else "stable"
    print(f"stability c={params['c']!r} delta={params['delta']!r} sup_distance={sup!r} "
          f"threshold={threshold!r} verdict={verdict}")
    return 0


def _cmd_spectrum(m: RunManifest) -> int:
    params = m.parameters
    if params["bisect"]:
        crossing = soliton.critical_speed_scan(
            params["c_min"], params["c_max"], steps=params["steps"],
            n=params["n"], half_width=params["half_width"],
        )
        print(f"critical speed crossing = {crossing!r} (4/sqrt(3) = {soliton.CRITICAL_SPEED!r})")
        return 0
    results = []
    count = params["steps"]
    for i in range(count):
        c = params["c_min"] + (params["c_max"] - params["c_min"]) * i / max(count - 1, 1)
        results.append(soliton.min_eigenvalue(c, n=params["n"], half_width=params["half_width"]))
    if "spectrum" in m.outputs:
        fieldio.write_spectrum_csv(m.outputs["spectrum"], results)
    for r in results:
        print(f"c={r.c!r} min_eigenvalue={r.min_eigenvalue!r} +/- {r.error_estimate!r}")
    return 0


def _cmd_verify(m: RunManifest) -> int:
    params = m.parameters
    names = analysis.suite_names() if params["suite"] == "all" else [params["suite"]]
    report = analysis.run_verify(names, params["samples"], m.seed)
    if "report" in m.outputs:
        fieldio.write_report_json(m.outputs["report"], report)
    for s in report["suites"]:
        print(f"suite={s['name']} samples={s['samples']} failures={s['failures']} "
              f"worst_ratio={s['worst_ratio']!r}")
    if report["total_failures"]:
        raise DomainError(f"{report['total_failures']} verification failures")
    return 0


def _cmd_rescale(m: RunManifest) -> int:
    params = m.parameters
    u, t = fieldio.read_field(params["input"])
    out = solver.rescale(u, params["lam"])
    fieldio.write_field(m.outputs["field"], out, t=t * params["lam"] ** 1.5)
    print(f"rescale lam={params['lam']!r} -> {m.outputs['field']}")
    return 0


_COMMANDS = {
    "soliton": _cmd_soliton,
    "evolve": _cmd_evolve,
    "stability": _cmd_stability,
    "spectrum": _cmd_spectrum,
    "verify": _cmd_verify,
    "rescale": _cmd_rescale,
}


def run(manifest: RunManifest) -> int:
    """Execute one manifest; exceptions are the caller's to map to exit codes."""
    if manifest.subcommand not in _COMMANDS:
        raise DomainError(f"unknown subcommand {manifest.subcommand!r}")
    return _COMMANDS[manifest.subcommand](manifest)


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kpilab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_grid(p: argparse.ArgumentParser) -> None:
        p.add_argument("--nx", type=int, default=512)
        p.add_argument("--ny", type=int, default=64)
        p.add_argument("--Lx", type=parse_length, default=64.0 * math.pi, dest="length_x")
        p.add_argument("--lambda-y", type=float, default=1.0, dest="lambda_y")

    p = sub.add_parser("soliton", help="write a line-soliton snapshot")
    add_grid(p)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--x0", type=parse_length, default=0.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("evolve", help="integrate KP-I from a snapshot or a fresh soliton")
    add_grid(p)
    p.add_argument("--in", dest="input", default=None, help="KPF1 initial data")
    p.add_argument("--c", type=float, default=1.0, help="soliton speed when no --in is given")
    p.add_argument("--x0", type=parse_length, default=0.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--t-end", type=float, required=True)
    p.add_argument("--record-every", type=int, default=100)
    p.add_argument("--frame-speed", type=float, default=0.0)
    p.add_argument("--no-dealias", action="store_false", dest="dealias")
    p.add_argument("--diag", default=None, help="diagnostics CSV path")
    p.add_argument("--out", default=None, help="final KPF1 snapshot path")

    p = sub.add_parser("stability", help="perturbed-soliton run in the moving frame")
    add_grid(p)
    p.add_argument("--c", type=float, required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--pert-xi-index", type=int, default=1)
    p.add_argument("--pert-q-index", type=int, default=1)
    p.add_argument("--dt", type=float, default=2e-3)
    p.add_argument("--t-end", type=float, default=20.0)
    p.add_argument("--record-every", type=int, default=100)
    p.add_argument("--diag", default=None)

    p = sub.add_parser("spectrum", help="eigenvalue scan of the linearized operator")
    p.add_argument("--c-min", type=float, required=True)
    p.add_argument("--c-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=13)
    p.add_argument("--n", type=int, default=1024)
    p.add_argument("--half-width", type=float, default=40.0)
    p.add_argument("--bisect", action="store_true")
    p.add_argument("--out", default=None, help="spectrum CSV path")

    p = sub.add_parser("verify", help="run the analysis verification suites")
    p.add_argument("--suite", default="all", choices=["all", *analysis.suite_names()])
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--report", default=None, help="JSON report path")

    p = sub.add_parser("rescale", help="apply the exact scaling symmetry to a snapshot")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--out", required=True)
    return parser


def build_manifest(argv: list[str]) -> RunManifest:
    args = vars(_parser().parse_args(argv))
    sub = args.pop("subcommand")
    outputs = {}
    if args.get("out") is not None:
        outputs["field" if sub != "spectrum" else "spectrum"] = args.pop("out")
    else:
        args.pop("out", None)
    if args.get("diag") is not None:
        outputs["diagnostics"] = args.pop("diag")
    else:
        args.pop("diag", None)
    if args.get("report") is not None:
        outputs["report"] = args.pop("report")
    else:
        args.pop("report", None)
    seed = args.pop("seed", 0)
    return RunManifest(subcommand=sub, parameters=args, seed=seed, outputs=outputs)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        manifest = build_manifest(argv)
        return run(manifest)
    except ContractError as exc:
        print(f"error: kind={type(exc).__name__} detail={exc}", file=sys.stderr)
        return 1
    except ComputeError as exc:
        print(f"error: kind={type(exc).__name__} detail={exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: kind={type(exc).__name__} detail={exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
