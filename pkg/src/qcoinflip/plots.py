"""Figure rendering for sweep reports (written next to the CSV output)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def render_sweep_figure(rows, path: str, alpha_star: float | None = None) -> None:
    """Plot the four cheating limits and the achieved values against alpha.

    PNG output carries fixed metadata so repeated renders are byte-identical.
    """
    alphas = [r.alpha for r in rows]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    ax.plot(alphas, [r.alice_weak_bound for r in rows], color="tab:blue",
            label="alice weak bound")
    ax.plot(alphas, [r.bob_weak_bound for r in rows], color="tab:red",
            label="bob weak bound")
    ax.plot(alphas, [r.alice_weak_achieved for r in rows], linestyle="none",
            marker="x", color="tab:blue", markersize=5, label="alice achieved")
    ax.plot(alphas, [r.bob_weak_achieved for r in rows], linestyle="none",
            marker="+", color="tab:red", markersize=6, label="bob achieved")
    ax.plot(alphas, [r.alice_strong_bound for r in rows], color="tab:blue",
            linestyle="--", linewidth=1.0, label="alice strong bound")
    ax.plot(alphas, [r.bob_strong_bound for r in rows], color="tab:red",
            linestyle="--", linewidth=1.0, label="bob strong bound")
    if alpha_star is not None:
        ax.axvline(alpha_star, color="gray", linestyle=":", linewidth=1.0,
                   label=f"equalization {alpha_star:.4f}")
    ax.set_xlabel("alpha (radians)")
    ax.set_ylabel("winning probability")
    ax.set_ylim(0.45, 1.02)
    ax.grid(True, alpha=0.3)
    ax.legend(loc="center right", fontsize=8)
    fig.tight_layout()
    if str(path).lower().endswith(".png"):
        fig.savefig(path, dpi=150, metadata={"Software": "qcoinflip"})
    else:
        fig.savefig(path, dpi=150)
    plt.close(fig)
