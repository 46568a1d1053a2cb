"""
Command-line interface for softpulse.

Usage:
    softpulse bs --config alanine.json            # BS shifts of a 0.7 ms hard pulse
    softpulse solve --config alanine.json --alpha pi
    softpulse landscape --nx 101 --ny 101 > landscape.csv
    softpulse optimize --store                    # optimum, archived to sqlite
    softpulse qec --full --trials 50
    softpulse report                              # every step as one JSON document

Numbers are printed with 6 significant digits; tables are CSV, records JSON.
Frequencies are in Hz at this boundary.
"""

import dataclasses
import functools
import json
import logging
import re
import sys
from typing import Any, Optional, Sequence

import click
import numpy as np
import pandas as pd

from analysis.bloch_siegert import BS_COLUMNS, bs_table
from analysis.gate_design import (
    fidelity_profile,
    landscape_scan,
    optimize_fidelity,
    propagator_fidelity,
    soft_amplitude,
    solve_soft_pulse,
    verify_cancellation,
)
from analysis.qec import (
    DEFAULT_SEED,
    CorrelatedChannel,
    identity_records,
    operator_identity_check,
    soft_pulse_recovery_fidelity,
)
from core.exceptions import BadChannelError, ConfigParseError, ConfigValidationError, SoftPulseError
from core.linalg import identity, max_norm
from core.pulses import (
    Model,
    PulseSegment,
    PulseSequence,
    propagate,
    refocusing_sequence,
    sequence_records,
    total_duration,
)
from core.spin_system import TWO_PI, SpinChainParams, target_common_frame, target_entangler
from database import DatabaseManager
from workflow import SoftPulseWorkflow

from .config import Settings, parse_config

__all__ = ["cli", "run", "main"]

logger = logging.getLogger(__name__)

SIG_DIGITS = 6
ANGLE_RE = re.compile(r"([+-]?(?:\d+(?:\.\d*)?|\.\d+)?)\*?pi(?:/(\d+(?:\.\d*)?))?")
LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR"]


class CommandError(click.ClickException):
    """A library error surfaced with its exit code."""

    def __init__(self, message: str, exit_code: int = 1):
        super().__init__(message)
        self.exit_code = exit_code


class AngleType(click.ParamType):
    """Angles in radians; accepts ``pi``, ``pi/2``, ``-2*pi`` or plain numbers."""

    name = "angle"

    def convert(self, value, param, ctx):
        if isinstance(value, (int, float)):
            return float(value)
        text = str(value).strip().lower().replace(" ", "")
        match = ANGLE_RE.fullmatch(text)
        if match:
            coeff = match.group(1)
            factor = {"": 1.0, "+": 1.0, "-": -1.0}.get(coeff)
            factor = float(coeff) if factor is None else factor
            divisor = float(match.group(2)) if match.group(2) else 1.0
            if divisor == 0:
                self.fail(f"{value!r} divides by zero", param, ctx)
            return factor * np.pi / divisor
        try:
            return float(text)
        except ValueError:
            self.fail(f"{value!r} is not an angle", param, ctx)


ANGLE = AngleType()


def significant(value: Any, digits: int = SIG_DIGITS) -> Any:
    """Round every float in a JSON-like structure to ``digits`` significant digits."""
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(f"{float(value):.{digits}g}")
    if isinstance(value, dict):
        return {str(k): significant(v, digits) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [significant(v, digits) for v in value]
    return value


def emit_json(payload: Any):
    click.echo(json.dumps(significant(payload), indent=2))


def emit_csv(frame: pd.DataFrame):
    click.echo(frame.to_csv(index=False, float_format=f"%.{SIG_DIGITS}g", lineterminator="\n"), nl=False)


def handle_errors(func):
    """Turn library errors into click errors: config problems exit 2, the rest 1."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (ConfigParseError, ConfigValidationError) as e:
            raise CommandError(str(e), exit_code=2) from e
        except SoftPulseError as e:
            logger.debug("command failed", exc_info=True)
            raise CommandError(str(e), exit_code=1) from e

    return wrapper


def load_params(settings: Settings, config_path: Optional[str]) -> SpinChainParams:
    return parse_config(config_path or settings.molecule).to_params()


def parse_probabilities(ctx, param, value: str):
    try:
        probabilities = tuple(float(part) for part in value.split(","))
        return CorrelatedChannel(probabilities)
    except ValueError as e:
        raise click.BadParameter(f"expected four comma-separated numbers: {e}")
    except BadChannelError as e:
        raise click.BadParameter(str(e))


config_option = click.option(
    "--config", "config_path", default=None,
    help="Molecule JSON file or bundled molecule name (default: $SOFTPULSE_MOLECULE or alanine).",
)


@click.group()
@click.option("--log-level", type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None,
              help="Diagnostics level on stderr (default: $SOFTPULSE_LOG_LEVEL or WARNING).")
@click.option("--db-path", default=None, help="Run archive (default: $SOFTPULSE_DB_PATH).")
@click.pass_context
def cli(ctx, log_level: Optional[str], db_path: Optional[str]):
    """
    Soft-pulse entangling gates for a three-spin chain.

    Designs and checks selective two-qubit gates, Bloch-Siegert phase
    shifts, propagator-fidelity optima and the correlated-noise code.
    """
    settings = Settings.from_env()
    if db_path:
        settings = dataclasses.replace(settings, db_path=db_path)
    logging.basicConfig(
        level=(log_level or settings.log_level).upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    ctx.obj = settings


@cli.command()
@config_option
@click.option("--tau-ms", type=float, default=0.700, show_default=True, help="Pulse width (ms).")
@click.option("--omega1-hz", type=float, default=None, help="Pulse amplitude (Hz); default makes a pi-pulse.")
@click.option("--soft", is_flag=True, help="Use the soft-pulse solution for amplitude and width.")
@click.option("--alpha", type=ANGLE, default="pi", show_default=True, help="Entangling angle for --soft.")
@click.option("--pulses", type=click.IntRange(min=1), default=1, show_default=True,
              help="Number of identical pulses to total.")
@click.pass_obj
@handle_errors
def bs(settings: Settings, config_path, tau_ms, omega1_hz, soft, alpha, pulses):
    """Bloch-Siegert shifts on spectators 2 and 3 (CSV)."""
    p = load_params(settings, config_path)
    if soft:
        solution = solve_soft_pulse(alpha, p.j12, p.j23)
        omega1, tau = solution.omega_plus, solution.tau
    else:
        if not tau_ms > 0:
            raise click.BadParameter("must be positive", param_hint="--tau-ms")
        tau = tau_ms * 1e-3
        omega1 = TWO_PI * omega1_hz if omega1_hz is not None else np.pi / tau
    emit_csv(bs_table(p, omega1, tau, pulses=pulses)[BS_COLUMNS])


@cli.command()
@config_option
@click.option("--alpha", type=ANGLE, default="pi", show_default=True, help="Entangling angle.")
@click.option("--n", "branch", type=click.IntRange(min=1), default=None,
              help="Amplitude branch; default is the smallest valid one.")
@click.pass_obj
@handle_errors
def solve(settings: Settings, config_path, alpha, branch):
    """Soft-pulse amplitude and width for an entangling angle (JSON)."""
    p = load_params(settings, config_path)
    if branch is None:
        solution = solve_soft_pulse(alpha, p.j12, p.j23)
    else:
        solution = soft_amplitude(alpha, p.j12, p.j23, branch)
    check = verify_cancellation(solution.omega_plus, alpha, p)
    table = bs_table(p, solution.omega_plus, solution.tau).set_index("spectator")
    emit_json({
        "n": solution.n,
        "omega1_hz": solution.omega_plus / TWO_PI,
        "tau_ms": solution.tau * 1e3,
        "phi_rad": check.phi,
        "cancellation_ok": check.ok,
        "bs_q2_rad": table.loc[2, "approx_rad"],
        "bs_q3_rad": table.loc[3, "approx_rad"],
    })


@cli.command()
@config_option
@click.option("--model", type=click.Choice([m.value for m in Model]), default=Model.FULL.value,
              show_default=True, help="Hamiltonian for every segment.")
@click.option("--tau-ms", type=float, default=0.700, show_default=True, help="Refocusing pulse width (ms).")
@click.option("--omega1-hz", type=float, default=None, help="Pulse amplitude (Hz); default makes pi-pulses.")
@click.option("--t-star-ms", type=float, default=None, help="Total gate time (ms); default pi/J23.")
@click.option("--soft", is_flag=True, help="Simulate the soft pulse instead of refocusing.")
@click.option("--alpha", type=ANGLE, default="pi", show_default=True, help="Entangling angle for --soft.")
@click.option("--dump", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write the segment list as JSON.")
@click.pass_obj
@handle_errors
def simulate(settings: Settings, config_path, model, tau_ms, omega1_hz, t_star_ms, soft, alpha, dump):
    """
    Propagate a pulse sequence and score it against the entangling target (JSON).

    The reduced model is scored against exp(-i J23 T Iz Iz) for the total time
    T; the full model against the common-frame pi gate, so only when T = pi/J23.
    """
    p = load_params(settings, config_path)
    model = Model(model)
    if soft:
        solution = solve_soft_pulse(alpha, p.j12, p.j23)
        seq = PulseSequence((PulseSegment(solution.tau, solution.omega_plus, 0.0, model),))
    else:
        t_star = t_star_ms * 1e-3 if t_star_ms is not None else np.pi / p.j23
        tau = tau_ms * 1e-3
        omega1 = TWO_PI * omega1_hz if omega1_hz is not None else (np.pi / tau if tau > 0 else 0.0)
        seq = refocusing_sequence(t_star, tau, omega1, model)

    u = propagate(seq, p)
    duration = total_duration(seq)

    if model is Model.REDUCED:
        fidelity = propagator_fidelity(target_entangler(p.j23 * duration), u)
    elif np.isclose(duration, np.pi / p.j23, rtol=1e-12, atol=0.0):
        fidelity = propagator_fidelity(target_common_frame(p), u)
    else:
        fidelity = None

    if dump:
        with open(dump, "w", encoding="utf-8") as handle:
            json.dump(sequence_records(seq), handle, indent=2)
            handle.write("\n")

    emit_json({
        "model": model.value,
        "segments": len(seq),
        "duration_ms": duration * 1e3,
        "fidelity": fidelity,
        "unitarity_error": max_norm(u.conj().T @ u - identity(8)),
    })


@cli.command()
@config_option
@click.option("--nx", type=click.IntRange(min=2), default=101, show_default=True, help="tau~ samples.")
@click.option("--ny", type=click.IntRange(min=2), default=101, show_default=True, help="omega~ samples.")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True,
              help="Threads; output does not depend on it.")
@click.option("--profile", type=click.Choice(["tau", "omega"]), default=None,
              help="Emit one line cut (--nx samples) instead of the grid.")
@click.option("--fixed", type=click.FloatRange(0.0, 1.0), default=1.0, show_default=True,
              help="Value of the other coordinate for --profile.")
@click.pass_obj
@handle_errors
def landscape(settings: Settings, config_path, nx, ny, workers, profile, fixed):
    """
    Fidelity over the normalized pulse square (CSV: tau_tilde, omega_tilde, fidelity).

    The tau_tilde = 0 rows are pure free evolution: a zero-width pulse is a no-op.
    """
    p = load_params(settings, config_path)
    if profile:
        emit_csv(fidelity_profile(p, profile, fixed=fixed, n=nx))
    else:
        emit_csv(landscape_scan(p, nx, ny, workers=workers).to_frame())


@cli.command()
@config_option
@click.option("--nx", type=click.IntRange(min=3), default=101, show_default=True, help="Coarse tau~ samples.")
@click.option("--ny", type=click.IntRange(min=2), default=101, show_default=True, help="Coarse omega~ samples.")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True, help="Threads for the scan.")
@click.option("--store", is_flag=True, help="Archive the result.")
@click.pass_obj
@handle_errors
def optimize(settings: Settings, config_path, nx, ny, workers, store):
    """Grid scan plus simplex refinement of the refocusing fidelity (JSON)."""
    p = load_params(settings, config_path)
    result = optimize_fidelity(p, nx=nx, ny=ny, workers=workers)
    if store:
        run_id = DatabaseManager(settings.db_path).save_optimization(p.label, result)
        logger.info("archived optimization run %s", run_id)
    emit_json({
        "tau_tilde": result.tau_tilde,
        "omega_tilde": result.omega_tilde,
        "fidelity": result.fidelity,
        "tau_s": result.tau_s,
        "omega1_hz": result.omega1 / TWO_PI,
    })


@cli.command()
@config_option
@click.option("--full/--ideal", "full", default=False, show_default=True,
              help="Soft-pulse gates under the full model, or ideal gates.")
@click.option("--probs", "channel", default="0.25,0.25,0.25,0.25", show_default=True,
              callback=parse_probabilities, help="Probabilities of I, X, Y, Z errors.")
@click.option("--trials", type=click.IntRange(min=1), default=50, show_default=True, help="Random trials.")
@click.option("--seed", type=int, default=DEFAULT_SEED, show_default=True, help="Base seed.")
@click.option("--tol", type=float, default=1e-9, show_default=True, help="Identity residual tolerance.")
@click.option("--store", is_flag=True, help="Archive the result.")
@click.pass_obj
@handle_errors
def qec(settings: Settings, config_path, full, channel: CorrelatedChannel, trials, seed, tol, store):
    """Encode/decode identities and recovery fidelity under correlated noise (JSON)."""
    p = load_params(settings, config_path)
    ideal = not full
    checks = operator_identity_check(tol=tol, ideal=ideal, p=p)
    stats = soft_pulse_recovery_fidelity(p, channel, trials, seed=seed, ideal=ideal)
    report = {
        "identities": identity_records(checks),
        "recovery_min": stats.min,
        "recovery_mean": stats.mean,
    }
    if store:
        record = dict(report, mode="ideal" if ideal else "full",
                      probabilities=channel.p, trials=trials, seed=seed)
        run_id = DatabaseManager(settings.db_path).save_qec_run(p.label, record)
        logger.info("archived qec run %s", run_id)
    emit_json(report)


@cli.command()
@config_option
@click.option("--no-optimize", is_flag=True, help="Skip the landscape optimization.")
@click.option("--trials", type=click.IntRange(min=0), default=50, show_default=True,
              help="Soft-pulse QEC trials; 0 skips them.")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True, help="Threads for the scan.")
@click.pass_obj
@handle_errors
def report(settings: Settings, config_path, no_optimize, trials, workers):
    """Every analysis step for one molecule as a single JSON document."""
    p = load_params(settings, config_path)
    workflow = SoftPulseWorkflow(p, on_step=lambda name: logger.info("step %s", name))
    result = workflow.run_analysis(optimize=not no_optimize, qec_trials=trials, landscape_workers=workers)
    result["summary"] = workflow.get_workflow_summary(result)
    emit_json(result)
    if result["errors"]:
        raise CommandError(f"{len(result['errors'])} step(s) failed: {', '.join(result['errors'])}")


@cli.command()
@click.option("--kind", type=click.Choice(["optimize", "qec"]), default="optimize", show_default=True)
@click.option("--limit", type=click.IntRange(min=1), default=20, show_default=True)
@click.pass_obj
@handle_errors
def history(settings: Settings, kind, limit):
    """Archived runs, newest first (JSON)."""
    emit_json(DatabaseManager(settings.db_path).get_recent_runs(kind, limit))


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code instead of exiting."""
    try:
        rv = cli.main(args=list(argv) if argv is not None else None,
                      prog_name="softpulse", standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.Abort:
        click.echo("Aborted!", err=True)
        return 1
    return rv if isinstance(rv, int) else 0


def main():
    from dotenv import load_dotenv

    load_dotenv()
    sys.exit(run())


if __name__ == "__main__":
    main()
