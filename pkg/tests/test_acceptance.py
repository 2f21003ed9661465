"""One check per acceptance criterion, each printing a PASS/FAIL line with its runtime."""

import time

import numpy as np
import pytest

from qdcorr.channel import NoiseParams, memory_amplitude, rtn_coherence
from qdcorr.cli import main
from qdcorr.correlations import (
    concurrence,
    concurrence_x,
    discord_numeric,
    discord_x,
    mutual_information,
)
from qdcorr.figures import (
    FIG1_PANELS,
    FIG1_TAUS,
    RECIPE,
    check_figure1,
    check_figure2,
    check_figure3,
    check_figure4,
    default_nu_grid,
    figure1_panels,
    run_figure,
    run_figure2,
    run_figure3,
    run_figure4,
)
from qdcorr.model import HAMILTONIAN_SOURCE, CLOSED_FORM_SOURCE, coherence_prefactor, x_state_source
from qdcorr.qmat import hermitian_eigenvalues, hermiticity_error, partial_trace, von_neumann_entropy
from qdcorr.validation import model_family_state

A = 0.9
RTN_SEED = 42
RTN_TRAJECTORIES = 1_000_000


def _failed(checks: dict) -> str:
    bad = [k for k, v in checks.items() if not v]
    return "all checks hold" if not bad else "failed: " + "; ".join(bad)


def test_criterion_1_prefactor_equals_lambda_squared(acceptance):
    start = time.perf_counter()
    nu = np.linspace(0.0, 6.0, 600)
    gap = max(float(np.max(np.abs(coherence_prefactor(NoiseParams(A, tau), nu)
                                  - memory_amplitude(NoiseParams(A, tau), nu) ** 2)))
              for tau in (2.0, 5.0))
    acceptance.record(1, "printed coherence prefactor == Lambda^2", gap <= 1e-10,
                      f"max gap {gap:.2e} (tol 1e-10)", time.perf_counter() - start, 1.0)


def test_criterion_2_rtn_oracle(acceptance):
    start = time.perf_counter()
    nu = np.linspace(0.0, 4.0, 9)
    worst, details = 0.0, []
    for tau in (0.5, 5.0):
        noise = NoiseParams(A, tau)
        mean, err, _ = rtn_coherence(noise, nu, RTN_TRAJECTORIES, RTN_SEED)
        z = np.abs(mean - memory_amplitude(noise, nu)) / np.where(err > 0, err, 1.0)
        worst = max(worst, float(z.max()))
        details.append(f"tau={tau:g} (4a tau={4 * A * tau:g}, {noise.branch}) max |z|={z.max():.2f}")
    acceptance.record(2, "RTN Monte Carlo matches Lambda within 3 standard errors", worst <= 3.0,
                      f"{RTN_TRAJECTORIES} trajectories, seed {RTN_SEED}; " + ", ".join(details),
                      time.perf_counter() - start, 120.0)


def test_rtn_oracle_overdamped_branch():
    # the criterion's taus are both oscillatory for a = 0.9; cover 4 a tau < 1 and the seam too
    nu = np.linspace(0.0, 4.0, 9)
    for a, tau in ((0.9, 0.2), (0.25, 1.0)):
        noise = NoiseParams(a, tau)
        mean, err, _ = rtn_coherence(noise, nu, RTN_TRAJECTORIES, RTN_SEED)
        z = np.abs(mean - memory_amplitude(noise, nu)) / np.where(err > 0, err, 1.0)
        assert np.all(z <= 3.0), (noise.branch, z)


def test_criterion_3_measure_oracles(acceptance):
    start = time.perf_counter()
    rng = np.random.default_rng(2025)
    worst_c = worst_d = worst_split = 0.0
    for k in range(500):
        source = CLOSED_FORM_SOURCE if k % 2 == 0 else HAMILTONIAN_SOURCE
        x = model_family_state(rng, source)
        rho = x.to_matrix()
        res = discord_numeric(rho)
        classical = von_neumann_entropy(partial_trace(rho, "A")) - res.conditional_entropy
        worst_c = max(worst_c, abs(concurrence_x(x) - concurrence(rho)))
        worst_d = max(worst_d, abs(discord_x(x) - res.discord))
        worst_split = max(worst_split, abs(mutual_information(rho) - classical - res.discord))
    ok = worst_c <= 1e-10 and worst_d <= 1e-4 and worst_split <= 1e-6
    acceptance.record(3, "closed-form measures agree with numeric oracles on 500 model states", ok,
                      f"|dC| {worst_c:.1e} (1e-10), |dD| {worst_d:.1e} (1e-4), |I-C-D| {worst_split:.1e} (1e-6)",
                      time.perf_counter() - start, 300.0)


def test_criterion_4_figure1(acceptance):
    start = time.perf_counter()
    checks = check_figure1(figure1_panels())
    acceptance.record(4, "figure 1 revivals and amplitude ordering", all(checks.values()),
                      f"{len(checks)} checks, {_failed(checks)}", time.perf_counter() - start, 30.0)


def test_criterion_5_discord_outlives_entanglement(acceptance):
    start = time.perf_counter()
    res = run_figure3()
    c, d = res.grid("concurrence"), res.grid("discord")
    region = (c <= 1e-10) & (d >= 1e-3)
    checks = check_figure3(res)
    acceptance.record(5, "figure 3 region with zero concurrence and discord >= 1e-3", bool(region.any()),
                      f"{int(region.sum())} of {region.size} grid points; other figure-3 checks: {_failed(checks)}",
                      time.perf_counter() - start, 60.0)


def test_criterion_6_foerster_and_field_ordering(acceptance):
    start = time.perf_counter()
    checks = {f"fig2 {k}": v for k, v in check_figure2(run_figure2()).items()}
    checks.update({f"fig4 {k}": v for k, v in check_figure4(run_figure4()).items()})
    acceptance.record(6, "figure 2 lambda ordering, figure 4 monotonicity", all(checks.values()),
                      f"{len(checks)} checks, {_failed(checks)}", time.perf_counter() - start, 120.0)


def _figure_states():
    nu600 = default_nu_grid()
    for T, field in FIG1_PANELS:
        p = RECIPE.params(T, RECIPE.field_energy_ev(field))
        for tau in FIG1_TAUS:
            for nu in nu600:
                yield p, tau, nu
    om2 = RECIPE.field_energy_ev(30e6)
    for lam in (0.0, 0.001, 0.002, 0.004):
        for nu in nu600:
            yield RECIPE.params(20.0, om2, lam), 5.0, nu
    om3 = RECIPE.field_energy_ev(25e6)
    for T in np.linspace(0.5, 50.0, 100):
        for nu in default_nu_grid(100):
            yield RECIPE.params(float(T), om3), 5.0, nu
    for lam in np.linspace(0.0, 0.01, 100):
        for om in np.linspace(0.0, 0.01, 100):
            yield RECIPE.params(25.0, float(om), float(lam)), 5.0, 0.01


def test_criterion_7_state_validity(acceptance, capsys):
    start = time.perf_counter()
    worst_trace = worst_eig = worst_herm = 0.0
    count = 0
    for p, tau, nu in _figure_states():
        for source in (CLOSED_FORM_SOURCE, HAMILTONIAN_SOURCE):
            rho = x_state_source(source, p, nu, NoiseParams(A, tau)).to_matrix()
            worst_trace = max(worst_trace, abs(np.trace(rho).real - 1.0))
            worst_eig = min(worst_eig, float(hermitian_eigenvalues(rho)[0]))
            worst_herm = max(worst_herm, hermiticity_error(rho))
            count += 1
    code = main(["validate"])
    capsys.readouterr()
    ok = worst_trace <= 1e-10 and worst_eig >= -1e-10 and worst_herm <= 1e-12 and code == 0
    acceptance.record(7, "state validity on every sweep point, validate exits 0", ok,
                      f"{count} states: |tr-1| {worst_trace:.1e}, min eig {worst_eig:.1e}, "
                      f"hermiticity {worst_herm:.1e}; validate exit {code}",
                      time.perf_counter() - start, 300.0)


def test_criterion_8_determinism(acceptance):
    start = time.perf_counter()
    mismatched = []
    for n in (1, 2, 3, 4):
        first = run_figure(n, workers=1).csv_body()
        if run_figure(n, workers=1).csv_body() != first:
            mismatched.append(f"fig{n} rerun")
        if run_figure(n, workers=4).csv_body() != first:
            mismatched.append(f"fig{n} workers=4")
    noise = NoiseParams(A, 5.0)
    nu = np.linspace(0, 4, 9)
    serial = rtn_coherence(noise, nu, 100_000, RTN_SEED, workers=1)
    pooled = rtn_coherence(noise, nu, 100_000, RTN_SEED, workers=4)
    if not all(np.array_equal(s, p) for s, p in zip(serial, pooled)):
        mismatched.append("rtn workers=4")
    acceptance.record(8, "byte-identical CSV bodies across reruns and worker counts {1, 4}", not mismatched,
                      "all four figures and the RTN oracle identical" if not mismatched else ", ".join(mismatched),
                      time.perf_counter() - start, 300.0)


@pytest.mark.parametrize("number", [1, 2, 3, 4])
def test_figure_runtime_budget(number):
    # default figure sweeps stay desk-scale on one worker
    start = time.perf_counter()
    run_figure(number, workers=1)
    assert time.perf_counter() - start < 60.0
