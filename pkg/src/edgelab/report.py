"""Figure rendering for experiment results.

Every report-producing CLI path can render a matplotlib figure next to its
delimited output: ECDF-versus-target curves for edge Monte Carlo runs, tail
probabilities with Wilson bars for deviation sweeps, and the three CDF
curves for the edge-law table.  The Agg backend is forced so the renderer
works headless.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def plot_edge_mc(result, png_path: str) -> None:
    """Empirical CDF step function against the target Tracy-Widom CDF."""
    rows = result.details.get("ecdf_rows", [])
    if not rows:
        return
    xs = [r[0] for r in rows]
    emp = [r[1] for r in rows]
    tgt = [r[2] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.step(xs, emp, where="post", label="empirical CDF", lw=1.2)
    ax.plot(xs, tgt, label="Tracy-Widom target", lw=1.2)
    ax.set_xlabel("rescaled eigenvalue")
    ax.set_ylabel("CDF")
    ks = result.ks if result.ks is not None else float("nan")
    ax.set_title(f"{result.config.role}: KS = {ks:.4f}")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)


def plot_deviation(result, png_path: str) -> None:
    """log10 tail probabilities per epsilon, one line per dimension."""
    cells = result.details.get("cells", {})
    if not cells:
        return
    dims = sorted({c["N"] for c in cells.values()})
    fig, ax = plt.subplots(figsize=(6, 4))
    for N in dims:
        row = sorted((c for c in cells.values() if c["N"] == N),
                     key=lambda c: c["eps"])
        eps = [c["eps"] for c in row]
        p = [c["p_hat"] for c in row]
        lo = [c["wilson_lo"] for c in row]
        hi = [c["wilson_hi"] for c in row]
        ax.errorbar(eps, p,
                    yerr=[[pi - l for pi, l in zip(p, lo)],
                          [h - pi for pi, h in zip(p, hi)]],
                    marker="o", capsize=3, label=f"N = {N}")
    ax.set_yscale("log")
    ax.set_xlabel("epsilon")
    ax.set_ylabel("P(||A|| >= 2 sqrt(N) (1+eps))")
    ax.set_title("operator-norm deviation tails (Wilson 95%)")
    ax.legend()
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)


def plot_edge_law_table(table, png_path: str) -> None:
    """F_1, F_2, F_4 over the table grid."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(table.x, table.f1, label="F1")
    ax.plot(table.x, table.f2, label="F2")
    ax.plot(table.x, table.f4, label="F4")
    ax.set_xlabel("x")
    ax.set_ylabel("CDF")
    ax.set_title("Tracy-Widom distribution functions")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(png_path, dpi=150)
    plt.close(fig)
