"""The four figure experiments and their qualitative checks.

Recipe parameters that the figures leave open (exciton energy, dipole
moment, dipolar coupling) live in :data:`RECIPE`.  The exciton energy is
taken as a detuning of zero: with hbar*omega on the eV scale every
Boltzmann weight except the ground state's underflows and all
correlations vanish.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import NoiseParams
from .model import EV, NM, CLOSED_FORM_SOURCE, ModelParams, omega_from_field
from .sweep import Axis, SweepResult, concat_results, run_grid

ZERO_TOL = 1e-10
REVIVAL_TOL = 1e-4
SURVIVAL_TOL = 1e-3
ORDER_TOL = 1e-10


@dataclass(frozen=True)
class Recipe:
    a: float = 0.9
    omega_ev: float = 0.0
    jz_ev: float = 0.004
    dipole_e_nm: float = 0.1

    def field_energy_ev(self, field_v_per_m: float) -> float:
        """hbar*Omega in eV for a field applied along the dipole."""
        return omega_from_field(self.dipole_e_nm * EV * NM, field_v_per_m) / EV

    def params(self, temperature: float, Omega_ev: float = 0.0, lambda_ev: float = 0.0) -> ModelParams:
        return ModelParams.from_ev(self.omega_ev, Omega_ev, self.jz_ev, lambda_ev, temperature)


RECIPE = Recipe()

FIG1_TAUS = (0.5, 2.0, 5.0)
FIG1_PANELS = ((14.0, 0.0), (25.0, 0.0), (25.0, 25e6))  # (T in K, field in V/m)
FIG2_LAMBDAS_EV = (0.0, 0.001, 0.002, 0.004)
FIG2_FIELD = 30e6
FIG3_FIELD = 25e6


def default_nu_grid(count: int = 600) -> tuple[float, ...]:
    return tuple(float(v) for v in np.linspace(0.0, 6.0, count))


def run_figure1(tau_list=FIG1_TAUS, T: float = 25.0, Omega_ev: float = 0.0, lambda_ev: float = 0.0,
                nu_grid=None, recipe: Recipe = RECIPE, state_source: str = CLOSED_FORM_SOURCE,
                discord_method: str = "x-formula", workers: int | None = None) -> SweepResult:
    """One panel pair of figure 1: curves versus nu for each memory time."""
    nu_grid = default_nu_grid() if nu_grid is None else tuple(nu_grid)
    axes = (Axis("tau", tuple(tau_list)), Axis("nu", nu_grid))
    return run_grid(recipe.params(T, Omega_ev, lambda_ev), NoiseParams(recipe.a, tau_list[0]), 0.0,
                    axes, state_source, discord_method, workers=workers,
                    metadata={"figure": 1})


def figure1_panels(recipe: Recipe = RECIPE, **kwargs) -> list[SweepResult]:
    return [run_figure1(T=T, Omega_ev=recipe.field_energy_ev(f), recipe=recipe, **kwargs)
            for T, f in FIG1_PANELS]


def run_figure2(lambda_list_ev=FIG2_LAMBDAS_EV, tau: float = 5.0, T: float = 20.0,
                Omega_ev: float | None = None, nu_grid=None, recipe: Recipe = RECIPE,
                state_source: str = CLOSED_FORM_SOURCE, discord_method: str = "x-formula",
                workers: int | None = None) -> SweepResult:
    """Curves versus nu for several Foerster couplings."""
    lams = tuple(lambda_list_ev)
    if any(b <= a for a, b in zip(lams, lams[1:])) or lams[0] < 0:
        raise ValueError("lambda list must be non-negative and strictly increasing")
    Omega_ev = recipe.field_energy_ev(FIG2_FIELD) if Omega_ev is None else Omega_ev
    nu_grid = default_nu_grid() if nu_grid is None else tuple(nu_grid)
    axes = (Axis("lambda", lams), Axis("nu", nu_grid))
    return run_grid(recipe.params(T, Omega_ev), NoiseParams(recipe.a, tau), 0.0, axes,
                    state_source, discord_method, workers=workers, metadata={"figure": 2})


def run_figure3(T_grid=None, nu_grid=None, tau: float = 5.0, lambda_ev: float = 0.0,
                Omega_ev: float | None = None, recipe: Recipe = RECIPE,
                state_source: str = CLOSED_FORM_SOURCE, discord_method: str = "x-formula",
                workers: int | None = None) -> SweepResult:
    """Surface over temperature and nu."""
    T_grid = tuple(float(t) for t in np.linspace(0.5, 50.0, 100)) if T_grid is None else tuple(T_grid)
    if min(T_grid) <= 0 or max(T_grid) > 50.0:
        raise ValueError("temperature grid must lie in (0, 50] K")
    nu_grid = default_nu_grid(100) if nu_grid is None else tuple(nu_grid)
    Omega_ev = recipe.field_energy_ev(FIG3_FIELD) if Omega_ev is None else Omega_ev
    axes = (Axis("T", T_grid), Axis("nu", nu_grid))
    return run_grid(recipe.params(T_grid[0], Omega_ev, lambda_ev), NoiseParams(recipe.a, tau), 0.0,
                    axes, state_source, discord_method, workers=workers, metadata={"figure": 3})


def run_figure4(lambda_grid_ev=None, Omega_grid_ev=None, tau: float = 5.0, T: float = 25.0,
                nu: float = 0.01, recipe: Recipe = RECIPE, state_source: str = CLOSED_FORM_SOURCE,
                discord_method: str = "x-formula", workers: int | None = None) -> SweepResult:
    """Surface over Foerster coupling and field energy at a fixed early time."""
    lams = tuple(float(v) for v in np.linspace(0.0, 0.01, 100)) if lambda_grid_ev is None else tuple(lambda_grid_ev)
    oms = tuple(float(v) for v in np.linspace(0.0, 0.01, 100)) if Omega_grid_ev is None else tuple(Omega_grid_ev)
    if min(lams) < 0 or min(oms) < 0:
        raise ValueError("grids must be non-negative")
    axes = (Axis("lambda", lams), Axis("Omega", oms))
    return run_grid(recipe.params(T), NoiseParams(recipe.a, tau), nu, axes,
                    state_source, discord_method, workers=workers, metadata={"figure": 4})


def run_figure(number: int, **kwargs) -> SweepResult:
    if number == 1:
        return concat_results(figure1_panels(**kwargs))
    runner = {2: run_figure2, 3: run_figure3, 4: run_figure4}.get(number)
    if runner is None:
        raise ValueError(f"no figure {number}; expected 1-4")
    return runner(**kwargs)


# --- qualitative checks -------------------------------------------------------

def revival_count(curve, zero_tol: float = ZERO_TOL, revive_tol: float = REVIVAL_TOL) -> int:
    """Number of death-revival events: the curve sits at zero, then climbs above ``revive_tol``."""
    count = 0
    dead = False
    for v in np.asarray(curve):
        if v <= zero_tol:
            dead = True
        elif dead and v > revive_tol:
            count += 1
            dead = False
    return count


def stays_dead(curve, zero_tol: float = ZERO_TOL) -> bool:
    """Once the curve reaches zero it never leaves it."""
    c = np.asarray(curve)
    hits = np.nonzero(c <= zero_tol)[0]
    return hits.size == 0 or bool(np.all(c[hits[0]:] <= zero_tol))


def first_local_max(curve) -> int:
    c = np.asarray(curve)
    for k in range(1, len(c) - 1):
        if c[k] > c[k - 1] and c[k] >= c[k + 1]:
            return k
    raise ValueError("curve has no interior local maximum")


def _nonincreasing(values, tol: float = ORDER_TOL) -> bool:
    return bool(np.all(np.diff(values) <= tol))


def _nondecreasing(values, tol: float = ORDER_TOL) -> bool:
    return bool(np.all(np.diff(values) >= -tol))


def check_figure1(panels: list[SweepResult]) -> dict[str, bool]:
    """``panels`` in :data:`FIG1_PANELS` order: (14 K, off), (25 K, off), (25 K, on)."""
    out = {}
    cold, warm, field = panels
    taus = np.array(cold.axes[0].values)
    for name, panel in zip(("14K", "25K", "25K-field"), panels):
        c = panel.grid("concurrence")
        d = panel.grid("discord")
        for k, tau in enumerate(taus):
            if tau < 1.0:
                out[f"{name} tau={tau:g}: no revival"] = stays_dead(c[k])
            else:
                out[f"{name} tau={tau:g}: death-revival"] = revival_count(c[k]) >= 1
        out[f"{name}: nu=0 independent of tau"] = bool(
            np.all(c[:, 0] == c[0, 0]) and np.all(d[:, 0] == d[0, 0]))
    for m in ("concurrence", "discord"):
        out[f"{m}: 25K <= 14K"] = bool(np.all(warm.grid(m) <= cold.grid(m) + ORDER_TOL))
        out[f"{m}: field on <= field off"] = bool(np.all(field.grid(m) <= warm.grid(m) + ORDER_TOL))
    c, d = warm.grid("concurrence"), warm.grid("discord")
    out["25K: discord survives where concurrence vanishes"] = bool(
        np.any((c <= ZERO_TOL) & (d >= SURVIVAL_TOL)))
    return out


def check_figure2(result: SweepResult) -> dict[str, bool]:
    c = result.grid("concurrence")
    d = result.grid("discord")
    k = first_local_max(d[0])
    out = {
        "discord non-decreasing in lambda at first peak": _nondecreasing(d[:, k]),
        "concurrence non-decreasing in lambda at first peak": _nondecreasing(c[:, k]),
    }
    for i, lam in enumerate(result.axes[0].values):
        out[f"lambda={lam:g} eV: death-revival"] = revival_count(c[i]) >= 1
    return out


def check_figure3(result: SweepResult) -> dict[str, bool]:
    c = result.grid("concurrence")
    d = result.grid("discord")
    past_max = True
    for j in range(c.shape[1]):
        for m in (c[:, j], d[:, j]):
            past_max &= _nonincreasing(m[int(np.argmax(m)):])
    return {
        "non-increasing in T past the maximum": past_max,
        "region with concurrence 0 and discord >= 1e-3": bool(np.any((c <= ZERO_TOL) & (d >= SURVIVAL_TOL))),
        "highest T: concurrence dies before discord": bool(
            np.any((c[-1] <= ZERO_TOL) & (d[-1] >= SURVIVAL_TOL))),
    }


def check_figure4(result: SweepResult) -> dict[str, bool]:
    c = result.grid("concurrence")
    d = result.grid("discord")
    return {
        "concurrence non-increasing in Omega": all(_nonincreasing(row) for row in c),
        "discord non-increasing in Omega": all(_nonincreasing(row) for row in d),
        "concurrence non-decreasing in lambda at largest Omega": _nondecreasing(c[:, -1]),
        "discord non-decreasing in lambda at largest Omega": _nondecreasing(d[:, -1]),
    }


def check_figure(number: int, result) -> dict[str, bool]:
    if number == 1:
        return check_figure1(result)
    return {2: check_figure2, 3: check_figure3, 4: check_figure4}[number](result)


PLOT_SCRIPT = '''\
"""Render {csv} as a figure-{figure} analogue (needs pandas and matplotlib)."""
import matplotlib.pyplot as plt
import pandas as pd

df = pd.read_csv({csv!r}, comment="#")
x, y, group = {x!r}, {y!r}, {group!r}
fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for ax, measure in zip(axes, ("concurrence", "discord")):
    if y is None:
        for key, sub in df.groupby(group):
            key = key if isinstance(key, tuple) else (key,)
            ax.plot(sub[x], sub[measure], label=", ".join(f"{{g}}={{k:g}}" for g, k in zip(group, key)))
        ax.legend(fontsize="small")
        ax.set_xlabel(x)
    else:
        table = df.pivot_table(index=y, columns=x, values=measure)
        mesh = ax.pcolormesh(table.columns, table.index, table.values, shading="auto")
        fig.colorbar(mesh, ax=ax)
        ax.set_xlabel(x)
        ax.set_ylabel(y)
    ax.set_title(measure)
fig.tight_layout()
fig.savefig({png!r}, dpi=150)
'''

_PLOT_LAYOUT = {
    1: ("nu", None, ["T_K", "Omega_eV", "tau"]),
    2: ("nu", None, ["lambda_eV"]),
    3: ("nu", "T_K", None),
    4: ("Omega_eV", "lambda_eV", None),
}


def plot_script(number: int, csv_path: str) -> str:
    x, y, group = _PLOT_LAYOUT[number]
    png = csv_path.rsplit(".", 1)[0] + ".png"
    return PLOT_SCRIPT.format(csv=csv_path, figure=number, x=x, y=y, group=group, png=png)
