"""Matplotlib rendering of the figure CSV data.

Each renderer takes the DataFrame produced by the matching pipeline in
figures.py and writes a PNG next to the delimited output.  All quantities
are dimensionless; times are in units of the inverse loss rate and
frequencies in units of the loss rate.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .vlf import VLF_BOUND  # noqa: E402

_OPERATOR_COLORS = ("tab:blue", "tab:orange", "tab:green", "tab:red")


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_correlations_vs_time(df, path, title=""):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(df["t"], df["I36"], "k-", label=r"$I_{36}$, $I_{45}$")
    ax.plot(df["t"], df["I56"], "r-.", label=r"$I_{56}$")
    ax.axhline(VLF_BOUND, color="gray", lw=0.8, ls=":")
    ax.set_xlabel(r"$\xi_1 t$")
    ax.set_ylabel("optimized correlations")
    ax.set_ylim(0, 5)
    ax.legend()
    if title:
        ax.set_title(title)
    _save(fig, path)


def render_intensities(df, path, title=""):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(df["zeta_t"], df["n1"], "r-.", label=r"$N_1$")
    ax.plot(df["zeta_t"], df["n2"], "b-", label=r"$N_2$")
    for mode, style in ((3, "g--"), (4, "m:"), (5, "c--"), (6, "y:")):
        ax.plot(df["zeta_t"], df[f"n{mode}"], style, label=rf"$N_{mode}$")
    for mode in (3, 4, 5, 6):
        ax.plot(df["zeta_t"], df[f"n{mode}_undepleted"], "k-", lw=0.8)
    ax.set_xlabel(r"$\zeta t$")
    ax.set_ylabel("intensity")
    ax.legend(ncol=2, fontsize=8)
    if title:
        ax.set_title(title)
    _save(fig, path)


def render_spectra(df, path, title=""):
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(df["omega"], df["I36"], "k-", label=r"$I^{out}_{36}$, $I^{out}_{45}$")
    ax.plot(df["omega"], df["I56"], "r-.", label=r"$I^{out}_{56}$")
    ax.axhline(VLF_BOUND, color="gray", lw=0.8, ls=":")
    ax.set_xlabel(r"$\omega$  (units of $\gamma$)")
    ax.set_ylabel("output spectral correlations")
    top = min(12.0, max(6.0, float(df[["I36", "I56"]].quantile(0.98).max())))
    ax.set_ylim(0, top)
    ax.legend()
    if title:
        ax.set_title(title)
    _save(fig, path)


def render_scan(df, path, title=""):
    valid = df[df["valid"]]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(valid["eps_ratio"], valid["min_I36"], "ks-", ms=3,
            label=r"min $I^{out}_{36}$, $I^{out}_{45}$")
    ax.plot(valid["eps_ratio"], valid["min_I56"], "r^-.", ms=3,
            label=r"min $I^{out}_{56}$")
    ax.axhline(VLF_BOUND, color="gray", lw=0.8, ls=":")
    ax.set_xlabel(r"$\epsilon / \epsilon_c$")
    ax.set_ylabel("best violation over frequency")
    ax.legend()
    if title:
        ax.set_title(title)
    _save(fig, path)


def render_joint_operators_free(df, path, title=""):
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, color in enumerate(_OPERATOR_COLORS, start=1):
        ax.plot(df["xi_t"], df[f"V_O{i}"], color=color, ls="-",
                label=rf"$V(O_{i})$")
        ax.plot(df["xi_t"], df[f"V_O{i}_pp"], color=color, ls="--")
    ax.set_xlabel(r"$\xi t$")
    ax.set_ylabel("joint-operator variance")
    ax.set_yscale("log")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title + " (solid: undepleted, dashed: positive-P)")
    _save(fig, path)


def render_joint_operators_cavity(df, path, title=""):
    fig, ax = plt.subplots(figsize=(6, 4))
    for i, color in enumerate(_OPERATOR_COLORS, start=1):
        ax.errorbar(df["t"], df[f"V_O{i}"], yerr=df[f"V_O{i}_stderr"],
                    color=color, ls="-", lw=1.0, label=rf"$V(O_{i})$")
    ax.set_xlabel(r"$t$  (units of $1/\gamma$)")
    ax.set_ylabel("joint-operator variance")
    ax.legend(fontsize=8)
    if title:
        ax.set_title(title)
    _save(fig, path)


RENDERERS = {
    "fig02": render_correlations_vs_time,
    "fig03": render_correlations_vs_time,
    "fig04": render_intensities,
    "fig06": render_spectra,
    "fig08": render_spectra,
    "fig09": render_scan,
    "fig10": render_joint_operators_free,
    "fig11": render_joint_operators_cavity,
}


def render(name: str, df, path, title="") -> None:
    RENDERERS[name](df, path, title=title)
