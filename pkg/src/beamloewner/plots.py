"""Figure rendering for run reports.

Renders the standard diagnostic figures next to the CSV artifacts:
singular value decay, model fit against the sampled response, pointwise
approximation error, and the pole map.  Uses the Agg backend so runs
work headless; figures are PNG at a fixed size/dpi.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import rom

FIGSIZE = (6.4, 4.0)
DPI = 150

SINGVALS_PNG = "singvals.png"
FIT_PNG = "fit.png"
ERROR_PNG = "error.png"
POLES_PNG = "poles.png"
SWEEP_PNG = "sweep_singvals.png"


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def render_singular_values(path, sigma_col_norm, n_show=50):
    fig, ax = plt.subplots(figsize=FIGSIZE)
    sig = np.asarray(sigma_col_norm)[:n_show]
    ax.semilogy(np.arange(1, sig.size + 1), sig, "o-", ms=3.5)
    ax.set_xlabel("index")
    ax.set_ylabel(r"$\sigma_i / \sigma_1$")
    ax.set_title("Normalized singular value decay (stacked augmentation)")
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, path)


def render_fit(path, samples, fit_input, model):
    freq = samples.freq_hz
    h_model = rom.eval_tf_grid(model, samples.nodes)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    if fit_input is not samples:
        ax.semilogy(fit_input.freq_hz, np.abs(fit_input.values), ".", ms=2,
                    color="0.6", label="fitted (noisy) data")
    ax.semilogy(freq, np.abs(samples.values), lw=1.6, label="sampled response")
    ax.semilogy(freq, np.abs(h_model), "--", lw=1.2, label=f"model (r = {model.order})")
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel("|H|")
    ax.set_title("Transfer function magnitude: data vs fitted model")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    _save(fig, path)


def render_error(path, err):
    freq = err.nodes.imag / (2 * np.pi)
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.semilogy(freq, np.maximum(err.abs_err, 1e-300), lw=1.0)
    ax.set_xlabel("frequency [Hz]")
    ax.set_ylabel("|H - H_model|")
    ax.set_title("Pointwise approximation error")
    ax.grid(True, which="both", alpha=0.3)
    _save(fig, path)


def render_poles(path, pole_report):
    poles = pole_report.poles
    fig, ax = plt.subplots(figsize=FIGSIZE)
    ax.plot(poles.real, poles.imag, "x", ms=7)
    ax.axvline(0.0, color="0.5", lw=0.8)
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title(
        f"Model poles (max Re = {pole_report.max_real_part:.4e}, "
        f"{'stable' if pole_report.stable else 'UNSTABLE'})"
    )
    ax.grid(True, alpha=0.3)
    _save(fig, path)


def render_run(out_dir, samples, fit_input, model, report, pole_report, err):
    """All per-run figures; report may be None (analyze-only runs)."""
    if report is not None:
        render_singular_values(out_dir / SINGVALS_PNG, report.sigma_col_norm)
    render_fit(out_dir / FIT_PNG, samples, fit_input, model)
    render_error(out_dir / ERROR_PNG, err)
    render_poles(out_dir / POLES_PNG, pole_report)


def render_sweep(out_dir, decays, n_show=60):
    """Overlay of normalized singular value decays per noise level.

    decays maps level -> normalized sigma array; level 0 is the
    noiseless baseline.
    """
    fig, ax = plt.subplots(figsize=FIGSIZE)
    for nu in sorted(decays):
        sig = np.asarray(decays[nu])[:n_show]
        label = "noiseless" if nu == 0 else rf"$\nu = {nu}$"
        style = "k--" if nu == 0 else "o-"
        ax.semilogy(np.arange(1, sig.size + 1), sig, style, ms=2.5, lw=1.0, label=label)
    ax.set_xlabel("index")
    ax.set_ylabel(r"$\sigma_i / \sigma_1$")
    ax.set_title("Singular value decay under increasing noise")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    _save(fig, out_dir / SWEEP_PNG)
