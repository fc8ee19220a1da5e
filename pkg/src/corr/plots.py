"""SVG charts drawn from result CSVs.

Charts are views: each function reads only CSV files written by
:mod:`corr.bench`, so any chart can be regenerated from a run directory.
Output is fixed at 960x540 with a fixed hash salt and no date stamp, so
regenerating from the same CSV gives the same bytes.
"""

from __future__ import annotations

import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

FIGSIZE = (9.6, 5.4)
DPI = 100
_RC = {"svg.hashsalt": "corr", "svg.fonttype": "path"}


def _rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _save(fig, path):
    fig.savefig(path, format="svg", dpi=DPI, metadata={"Date": None})
    plt.close(fig)


def _floor(values, eps=1e-16):
    # log axes cannot show exact zeros
    return np.maximum(np.asarray(values, dtype=float), eps)


def plot_sweep(aggregate_csv, path):
    """Log-log mean error against T, one line per (function, dim)."""
    rows = _rows(aggregate_csv)
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        keys = []
        for r in rows:
            k = (r["function"], r["dim"])
            if k not in keys:
                keys.append(k)
        for name, dim in keys:
            sel = [r for r in rows if (r["function"], r["dim"]) == (name, dim)]
            T = [int(r["T"]) for r in sel]
            ax.loglog(T, _floor([r["mean"] for r in sel]), marker="o", label=f"{name} (n={dim})")
        ax.set_xlabel("function evaluations T")
        ax.set_ylabel("mean error f(x_hat) - f*")
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        _save(fig, path)


def plot_scale(matrix_csv, path):
    """Heatmap of log10 mean error over dimension and T."""
    rows = _rows(matrix_csv)
    cols = [c for c in rows[0] if c != "dim"]
    dims = [r["dim"] for r in rows]
    vals = np.log10(_floor([[float(r[c]) for c in cols] for r in rows]))
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        im = ax.imshow(vals, aspect="auto", origin="lower", cmap="viridis")
        ax.set_xticks(range(len(cols)), cols)
        ax.set_yticks(range(len(dims)), dims)
        ax.set_xlabel("samples")
        ax.set_ylabel("dimension")
        for i in range(vals.shape[0]):
            for j in range(vals.shape[1]):
                ax.text(j, i, f"{vals[i, j]:.1f}", ha="center", va="center", color="w")
        fig.colorbar(im, ax=ax, label="log10 mean error")
        _save(fig, path)


def plot_compare(table_csv, path):
    """Median error against dimension, one line per method."""
    rows = _rows(table_csv)
    methods = [c for c in rows[0] if c != "dim"]
    dims = [int(r["dim"]) for r in rows]
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=FIGSIZE)
        for m in methods:
            ax.semilogy(dims, _floor([r[m] for r in rows]), marker="o", label=m)
        ax.set_xlabel("dimension")
        ax.set_ylabel("median error")
        ax.legend()
        ax.grid(True, which="both", alpha=0.3)
        _save(fig, path)


def plot_mu_trace(profile_csv, trace_csv, path):
    """Surrogates over f (top, when a trace exists) and the mu profile (bottom)."""
    prof = _rows(profile_csv)
    mu = np.array([float(r["mu"]) for r in prof])
    err = np.array([float(r["error"]) for r in prof])
    with plt.rc_context(_RC):
        if trace_csv is None:
            fig, ax_p = plt.subplots(figsize=FIGSIZE)
        else:
            fig, (ax_t, ax_p) = plt.subplots(2, 1, figsize=FIGSIZE)
            tr = _rows(trace_csv)
            x = np.array([float(r["x"]) for r in tr])
            ax_t.plot(x, [float(r["f"]) for r in tr], color="k", lw=1, label="f")
            ax_t.plot(x, [float(r["envelope"]) for r in tr], color="k", ls="--", lw=1, label="envelope")
            for c in tr[0]:
                if c.startswith("h_mu="):
                    ax_t.plot(x, [float(r[c]) for r in tr], lw=1, label=c.replace("h_mu=", "mu="))
            ax_t.set_xlabel("x")
            ax_t.legend(fontsize="small")
        order = np.argsort(mu)
        ax_p.semilogy(mu[order], _floor(err[order]), marker=".")
        ax_p.set_xlabel("mu")
        ax_p.set_ylabel("f(x_mu) - f*")
        fig.tight_layout()
        _save(fig, path)
