"""Config-driven experiment pipeline and artifact I/O.

Stage order: sample -> (perturb) -> close -> partition -> pencil ->
svd -> reduce -> analyze -> (plots).  Every stage writes its artifacts
as soon as they exist, so partial output survives a downstream failure.
All delimited output uses shortest round-trip float formatting, which
makes reruns of the same config byte-identical (summary timings aside).
"""

import csv
import json
import time
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import beam, loewner, plots, rom
from .config import ExperimentConfig, config_echo, resolve_verification_grid
from .data import FrequencyDataSet
from .exceptions import BeamLoewnerError
from .noise import NoiseSpec, perturb

SAMPLES_CSV = "samples.csv"
SAMPLES_NOISY_CSV = "samples_noisy.csv"
SINGVALS_CSV = "singvals.csv"
ROM_JSON = "rom.json"
POLES_CSV = "poles.csv"
ERROR_CSV = "error.csv"
SUMMARY_JSON = "summary.json"
SWEEP_JSON = "sweep.json"


class PipelineStageError(BeamLoewnerError):
    """Failure wrapped with the pipeline stage it occurred in."""

    def __init__(self, stage, cause):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")


@dataclass(frozen=True)
class RunSummary:
    order: int
    max_abs_err: float
    max_rel_err: float
    max_pole_re: float
    stable: bool
    timings_ms: dict
    config_echo: dict

    def to_dict(self):
        return {
            "order": self.order,
            "max_abs_err": self.max_abs_err,
            "max_rel_err": self.max_rel_err,
            "max_pole_re": self.max_pole_re,
            "stable": self.stable,
            "timings_ms": self.timings_ms,
            "config_echo": self.config_echo,
        }


@contextmanager
def _stage(name, timings):
    start = time.perf_counter()
    try:
        yield
    except BeamLoewnerError as exc:
        raise PipelineStageError(name, exc) from exc
    finally:
        timings[name] = (time.perf_counter() - start) * 1000.0


# ---------------------------------------------------------------------------
# artifact writers/readers

def _fmt(x):
    return repr(float(x))


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_samples_csv(path, data: FrequencyDataSet):
    rows = [
        [_fmt(node.imag / (2 * np.pi)), _fmt(node.real), _fmt(node.imag),
         _fmt(val.real), _fmt(val.imag)]
        for node, val in zip(data.nodes, data.values)
    ]
    _write_csv(path, ["freq_hz", "s_re", "s_im", "H_re", "H_im"], rows)


def read_samples_csv(path) -> FrequencyDataSet:
    nodes, values = [], []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            nodes.append(complex(float(row["s_re"]), float(row["s_im"])))
            values.append(complex(float(row["H_re"]), float(row["H_im"])))
    return FrequencyDataSet(np.array(nodes), np.array(values))


def write_singvals_csv(path, report: loewner.SvdReport):
    srow, scol = report.sigma_row, report.sigma_col
    srow_n, scol_n = report.sigma_row_norm, report.sigma_col_norm
    rows = []
    for i in range(max(srow.size, scol.size)):
        rows.append([
            str(i + 1),
            _fmt(srow[i]) if i < srow.size else "",
            _fmt(scol[i]) if i < scol.size else "",
            _fmt(srow_n[i]) if i < srow.size else "",
            _fmt(scol_n[i]) if i < scol.size else "",
        ])
    _write_csv(
        path,
        ["index", "sigma_row", "sigma_col", "sigma_row_norm", "sigma_col_norm"],
        rows,
    )


def read_singvals_csv(path):
    """Returns (sigma_row, sigma_col) as float arrays."""
    srow, scol = [], []
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh):
            if row["sigma_row"]:
                srow.append(float(row["sigma_row"]))
            if row["sigma_col"]:
                scol.append(float(row["sigma_col"]))
    return np.array(srow), np.array(scol)


def write_poles_csv(path, report: rom.PoleReport):
    rows = [[_fmt(p.real), _fmt(p.imag)] for p in report.poles]
    _write_csv(path, ["pole_re", "pole_im"], rows)


def write_error_csv(path, err: rom.ErrorReport):
    rows = []
    for node, ae, re_ in zip(err.nodes, err.abs_err, err.rel_err):
        rows.append([
            _fmt(node.imag / (2 * np.pi)),
            _fmt(ae),
            _fmt(re_) if np.isfinite(re_) else "",
        ])
    _write_csv(path, ["freq_hz", "abs_err", "rel_err"], rows)


def write_rom_json(path, model: rom.ReducedModel):
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n", encoding="utf-8")


def read_rom_json(path) -> rom.ReducedModel:
    return rom.ReducedModel.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def write_summary_json(path, summary: RunSummary):
    Path(path).write_text(json.dumps(summary.to_dict(), indent=2) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# pipeline stages

def run_sample(cfg: ExperimentConfig) -> FrequencyDataSet:
    """Sample the analytic transfer function on the configured grid."""
    return beam.sample_grid(
        cfg.beam, cfg.grid.f_min_hz, cfg.grid.f_max_hz, cfg.grid.count
    )


def _reference_data(cfg: ExperimentConfig, samples: FrequencyDataSet) -> FrequencyDataSet:
    vgrid = resolve_verification_grid(cfg)
    if vgrid == cfg.grid:
        return samples
    return beam.sample_grid(cfg.beam, vgrid.f_min_hz, vgrid.f_max_hz, vgrid.count)


def run_pipeline(cfg: ExperimentConfig, render_plots: bool = True) -> RunSummary:
    """Full chain on one configuration; writes all artifacts.

    Returns the run summary (also written to summary.json).  The error
    report always compares against noiseless reference samples, so for
    noisy runs it measures deviation from the true transfer function.
    """
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    timings = {}

    with _stage("sample", timings):
        samples = run_sample(cfg)
    write_samples_csv(out / SAMPLES_CSV, samples)

    fit_input = samples
    if cfg.noise is not None:
        with _stage("perturb", timings):
            fit_input = perturb(samples, cfg.noise)
        write_samples_csv(out / SAMPLES_NOISY_CSV, fit_input)

    with _stage("close", timings):
        closed = loewner.conjugate_close(fit_input)
    with _stage("partition", timings):
        pd = loewner.partition(closed, cfg.partition_scheme)
    with _stage("pencil", timings):
        pencil = loewner.realify(loewner.build_pencil(pd))
    with _stage("svd", timings):
        report = loewner.svd_augmented(pencil)
    write_singvals_csv(out / SINGVALS_CSV, report)

    with _stage("reduce", timings):
        model = loewner.reduce(
            pencil, r=cfg.truncation.order, tol=cfg.truncation.tol, report=report
        )
    write_rom_json(out / ROM_JSON, model)

    with _stage("analyze", timings):
        pole_report = rom.poles(model)
        reference = _reference_data(cfg, samples)
        err = rom.error_report(model, reference)
    write_poles_csv(out / POLES_CSV, pole_report)
    write_error_csv(out / ERROR_CSV, err)

    if render_plots:
        with _stage("plots", timings):
            plots.render_run(out, samples, fit_input, model, report, pole_report, err)

    summary = RunSummary(
        order=model.order,
        max_abs_err=err.max_abs,
        max_rel_err=err.max_rel,
        max_pole_re=pole_report.max_real_part,
        stable=pole_report.stable,
        timings_ms=timings,
        config_echo=config_echo(cfg),
    )
    write_summary_json(out / SUMMARY_JSON, summary)
    return summary


def run_fit(cfg: ExperimentConfig) -> rom.ReducedModel:
    """Fit stage for the CLI: reads samples.csv, writes singvals and rom."""
    out = Path(cfg.output_dir)
    samples_path = out / SAMPLES_CSV
    if not samples_path.exists():
        raise PipelineStageError(
            "fit", FileNotFoundError(f"{samples_path} missing; run 'sample' first")
        )
    timings = {}
    samples = read_samples_csv(samples_path)
    fit_input = samples
    if cfg.noise is not None:
        with _stage("perturb", timings):
            fit_input = perturb(samples, cfg.noise)
        write_samples_csv(out / SAMPLES_NOISY_CSV, fit_input)
    with _stage("close", timings):
        closed = loewner.conjugate_close(fit_input)
    with _stage("partition", timings):
        pd = loewner.partition(closed, cfg.partition_scheme)
    with _stage("pencil", timings):
        pencil = loewner.realify(loewner.build_pencil(pd))
    with _stage("svd", timings):
        report = loewner.svd_augmented(pencil)
    write_singvals_csv(out / SINGVALS_CSV, report)
    with _stage("reduce", timings):
        model = loewner.reduce(
            pencil, r=cfg.truncation.order, tol=cfg.truncation.tol, report=report
        )
    write_rom_json(out / ROM_JSON, model)
    return model


def run_analyze(cfg: ExperimentConfig, render_plots: bool = True) -> RunSummary:
    """Analysis stage for the CLI: reads rom.json, writes reports."""
    out = Path(cfg.output_dir)
    rom_path = out / ROM_JSON
    if not rom_path.exists():
        raise PipelineStageError(
            "analyze", FileNotFoundError(f"{rom_path} missing; run 'fit' first")
        )
    timings = {}
    model = read_rom_json(rom_path)
    with _stage("analyze", timings):
        pole_report = rom.poles(model)
        samples_path = out / SAMPLES_CSV
        if samples_path.exists():
            samples = read_samples_csv(samples_path)
        else:
            samples = run_sample(cfg)
        reference = _reference_data(cfg, samples)
        err = rom.error_report(model, reference)
    write_poles_csv(out / POLES_CSV, pole_report)
    write_error_csv(out / ERROR_CSV, err)
    if render_plots:
        with _stage("plots", timings):
            noisy_path = out / SAMPLES_NOISY_CSV
            fit_input = read_samples_csv(noisy_path) if noisy_path.exists() else samples
            plots.render_run(out, samples, fit_input, model, None, pole_report, err)
    summary = RunSummary(
        order=model.order,
        max_abs_err=err.max_abs,
        max_rel_err=err.max_rel,
        max_pole_re=pole_report.max_real_part,
        stable=pole_report.stable,
        timings_ms=timings,
        config_echo=config_echo(cfg),
    )
    write_summary_json(out / SUMMARY_JSON, summary)
    return summary


def run_noise_sweep(cfg: ExperimentConfig, nus=(1, 2, 3, 4),
                    render_plots: bool = True) -> dict:
    """Refit on perturbed data for each noise level, one seed throughout.

    Each level writes a full artifact set under <output_dir>/nu<level>/;
    the reduced order per level is chosen from the stagnation index of
    its noisy singular value decay.  The sweep summary (sweep.json)
    records those indices together with the deviation of each noisy
    model from the noiseless transfer function.
    """
    if cfg.noise is None:
        raise PipelineStageError(
            "noise-sweep", ValueError("config needs a noise block (seed source)")
        )
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    samples = run_sample(cfg)
    write_samples_csv(out / SAMPLES_CSV, samples)
    reference = _reference_data(cfg, samples)
    peak = float(np.abs(samples.values).max())

    # noiseless baseline decay, for the overlay plot and the summary
    closed = loewner.conjugate_close(samples)
    pencil = loewner.realify(loewner.build_pencil(
        loewner.partition(closed, cfg.partition_scheme)))
    baseline = loewner.svd_augmented(pencil)
    write_singvals_csv(out / SINGVALS_CSV, baseline)

    sweep = {
        "seed": cfg.noise.seed,
        "baseline_stagnation_index": loewner.stagnation_index(baseline.sigma_col_norm),
        "levels": [],
    }
    decays = {0: baseline.sigma_col_norm}
    for nu in nus:
        spec = NoiseSpec(nu=int(nu), seed=cfg.noise.seed)
        sub = out / f"nu{nu}"
        sub.mkdir(exist_ok=True)
        noisy = perturb(samples, spec)
        write_samples_csv(sub / SAMPLES_NOISY_CSV, noisy)
        closed = loewner.conjugate_close(noisy)
        pencil = loewner.realify(loewner.build_pencil(
            loewner.partition(closed, cfg.partition_scheme)))
        report = loewner.svd_augmented(pencil)
        write_singvals_csv(sub / SINGVALS_CSV, report)
        stag = loewner.stagnation_index(report.sigma_col_norm)
        order = min(stag, report.X.shape[1], report.Y.shape[1])
        model = loewner.reduce(pencil, r=order, report=report)
        write_rom_json(sub / ROM_JSON, model)
        pole_report = rom.poles(model)
        err = rom.error_report(model, reference)
        write_poles_csv(sub / POLES_CSV, pole_report)
        write_error_csv(sub / ERROR_CSV, err)
        level_cfg = config_echo(cfg)
        level_cfg["noise"] = {"nu": int(nu), "seed": spec.seed, "epsilon": spec.epsilon}
        level_cfg["truncation"] = {"order": order}
        write_summary_json(
            sub / SUMMARY_JSON,
            RunSummary(
                order=model.order,
                max_abs_err=err.max_abs,
                max_rel_err=err.max_rel,
                max_pole_re=pole_report.max_real_part,
                stable=pole_report.stable,
                timings_ms={},
                config_echo=level_cfg,
            ),
        )
        decays[int(nu)] = report.sigma_col_norm
        sweep["levels"].append({
            "nu": int(nu),
            "epsilon": spec.epsilon,
            "stagnation_index": stag,
            "order": model.order,
            "max_abs_err": err.max_abs,
            "max_rel_err": err.max_rel,
            "max_dev_rel_to_peak": err.max_abs / peak,
            "max_pole_re": pole_report.max_real_part,
            "stable": pole_report.stable,
        })

    (out / SWEEP_JSON).write_text(json.dumps(sweep, indent=2) + "\n", encoding="utf-8")
    if render_plots:
        plots.render_sweep(out, decays)
    return sweep
