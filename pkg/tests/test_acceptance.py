"""End-to-end acceptance checks, one test per criterion.

The terminal summary prints one PASS/FAIL line per criterion.
"""

import math
import time

import numpy as np
import pytest
from scipy import integrate

from mtcavity import cavity, cli, gates, qteleport, soliton, transfer
from mtcavity.cavity import CavityParams

crit = pytest.mark.criterion


@crit(1, "transit time of a 1 um tube at 2 m/s is 5e-7 s")
def test_criterion_01_transit_time():
    assert soliton.transit_time(1e-6, 2) == 5e-7


@crit(2, "vacuum field within 10x of 1e4 V/m and 1% of the CGS oracle")
def test_criterion_02_vacuum_field():
    E = cavity.vacuum_field(6e12, 80, cavity.DEFAULT_VOLUME_M3)
    v_cm3 = math.pi * (7e-7) ** 2 * 1e-4
    oracle = math.sqrt(2 * math.pi * 1.054571817e-27 * 6e12 / (80 * v_cm3)) * 2.99792458e4
    assert 0.1 <= E / 1e4 <= 10
    assert E == pytest.approx(oracle, rel=0.01)
    assert E == pytest.approx(5.4e4, rel=0.01)


@crit(3, "Rabi coupling 2.84e10/s, collective 3e11/s, exact sqrt(N) scaling")
def test_criterion_03_rabi_coupling():
    lam0 = cavity.rabi_coupling(1e4, 3e-28, 1.0)
    assert lam0 == pytest.approx(3e-28 * 1e4 / 1.054571817e-34, rel=1e-12)
    assert lam0 == pytest.approx(2.84e10, rel=0.01)
    assert analyze_default().lambda_collective == pytest.approx(3e11, rel=0.05)
    one = cavity.doublet_peaks(1e12, 0.0, 1, lam0)
    for n in (1, 4, 16, 100):
        many = cavity.doublet_peaks(1e12, 0.0, n, lam0)
        assert (many[0] - many[1]) / (one[0] - one[1]) == pytest.approx(math.sqrt(n), rel=1e-14)


def analyze_default():
    return cavity.analyze(CavityParams())


@crit(4, "quality factor 6e8 with defaults, order 1e8")
def test_criterion_04_quality_factor():
    Q = cavity.figures_of_merit(CavityParams()).Q
    assert Q == 6e12 * 1e-4
    assert Q == pytest.approx(6e8, rel=1e-15)
    assert math.floor(math.log10(Q)) == 8


@crit(5, "doublet sum rule and splitting to 1e-12 over 1000 samples")
def test_criterion_05_doublet_algebra():
    rng = np.random.default_rng(20240501)
    for _ in range(1000):
        w0 = 10 ** rng.uniform(10, 13)
        det = rng.uniform(-1, 1) * w0
        n = int(rng.integers(1, 10_000))
        lam = 10 ** rng.uniform(-3, 0) * w0 / math.sqrt(n)
        plus, minus = cavity.doublet_peaks(w0, det, n, lam)
        scale = max(abs(plus), abs(minus))
        assert abs(plus + minus - (2 * w0 - det)) <= 1e-12 * scale
        assert (plus - minus) == pytest.approx(math.sqrt(det**2 + 4 * n * lam**2), rel=1e-12)


@crit(6, "teleportation fidelity, quarter weights and seeded frequencies")
def test_criterion_06_teleportation():
    start = time.perf_counter()
    rng = np.random.default_rng(7)
    z = rng.normal(size=(100, 2)) + 1j * rng.normal(size=(100, 2))
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    for amp in z:
        amp = tuple(amp)
        for br in qteleport.bell_expand(qteleport.tensor(qteleport.qubit(*amp), qteleport.make_epr())):
            assert abs(br.weight - 0.25) <= 1e-12
        for o in qteleport.OUTCOME_ORDER:
            assert qteleport.teleport(amp, forced=o).fidelity >= 1 - 1e-12
    trials = 10_000
    runs = qteleport.teleport_batch((0.6, 0.8), trials, seed=7)
    counts = np.array([sum(t.outcome is o for t in runs) for o in qteleport.OUTCOME_ORDER])
    sigma = math.sqrt(0.25 * 0.75 / trials)
    assert np.all(np.abs(counts / trials - 0.25) <= 3 * sigma)
    assert time.perf_counter() - start < 5.0


@crit(7, "kink PDE: matched residual, 4096 x 1e5 speed and shape, periodic energy")
def test_criterion_07_kink_pde():
    start = time.perf_counter()
    DW = soliton.PotentialPoly.double_well()

    k = soliton.KinkProfile(0.9, 1.2, 0.1)
    P = soliton.matched_cubic(k, 0.25)
    assert soliton.traveling_residual(k, P, 0.25, np.linspace(-30, 30, 6001)).max_residual < 1e-10

    grid = soliton.Grid.centered(163.84, 4096)
    kink = soliton.boosted_double_well_kink(0.2, -40.0)
    state = soliton.FieldState.from_profiles(grid, [kink], background=-1.0)
    res = soliton.evolve(state, DW, dt=0.1 * grid.dx, n_steps=100_000, sample_every=2000, reference=kink)
    assert res.fitted_speed() == pytest.approx(0.2, rel=0.02)
    assert max(s.shape_l2 for s in res.samples) < 0.01

    pgrid = soliton.Grid.centered(80.0, 1600, periodic=True)
    pstate = soliton.kink_antikink_state(pgrid, 40.0, 0.3, boundary=soliton.Boundary.PERIODIC)
    pres = soliton.evolve(pstate, DW, dt=0.1 * pgrid.dx, n_steps=10_000, sample_every=500)
    e = np.array([s.energy for s in pres.samples])
    assert np.max(np.abs(e - e[0])) / abs(e[0]) < 1e-6
    assert time.perf_counter() - start < 60.0


def _heat_kernel(p, variance, z):
    if variance == 0:
        return float(np.polynomial.polynomial.polyval(z, p))
    sd = math.sqrt(variance)

    def f(y):
        return np.polynomial.polynomial.polyval(z + y, p) * math.exp(-0.5 * y * y / variance)

    val, _ = integrate.quad(f, -12 * sd, 12 * sd, epsabs=1e-12, epsrel=1e-10, limit=200)
    return val / (sd * math.sqrt(2 * math.pi))


@crit(8, "quantum-corrected force matches heat-kernel oracle, identity at deltaG=0")
def test_criterion_08_corrected_force():
    rng = np.random.default_rng(8)
    z = np.linspace(-2, 2, 9)
    for degree in range(2, 7):
        U = soliton.PotentialPoly(tuple(rng.uniform(-2, 2, degree + 1)))
        zero = soliton.QuantumCorrection(0.0, "constant")
        assert np.array_equal(soliton.corrected_force(U, zero, z), U.P(z))
        for dg in np.linspace(0.0, 1.0, 6):
            q = soliton.QuantumCorrection(float(dg), "constant")
            got = soliton.corrected_force(U, q, z)
            want = np.array([_heat_kernel(U.p_coeffs, dg, zi) for zi in z])
            scale = np.abs(U.p_coeffs).sum()
            assert np.all(np.abs(got - want) <= 1e-6 * np.maximum(np.abs(want), 1e-3 * scale))


@crit(9, "XOR truth table in the abstract and collision layers agree")
def test_criterion_09_xor_gate():
    start = time.perf_counter()
    table = {(0, 0): 0, (0, 1): 1, (1, 0): 1, (1, 1): 0}
    net = gates.xor_network(1.0)
    for inputs, out in table.items():
        abstract = gates.eval_abstract(net, inputs)
        physical = gates.eval_physical(net, inputs)
        assert abstract.bit("b") == out
        assert physical.bit("b") == out
        assert abstract.distribution == physical.distribution
    assert time.perf_counter() - start < 60.0


@crit(10, "Forster rate: 1/T1 at r0, (2.1/2.8)^6 = 0.178, sixth power law")
def test_criterion_10_forster():
    assert transfer.forster_rate(transfer.ForsterParams(T1=3e-12, r0_angstrom=2.1, r_angstrom=2.1)) == 1 / 3e-12
    assert transfer.forster_rate(transfer.ForsterParams(T1=1.0)) == pytest.approx(0.178, abs=1e-3)
    base = transfer.forster_rate(transfer.ForsterParams(T1=1.0, r0_angstrom=1.0, r_angstrom=1.0))
    for r in np.logspace(0, 2, 9):
        k = transfer.forster_rate(transfer.ForsterParams(T1=1.0, r0_angstrom=1.0, r_angstrom=float(r)))
        assert k == pytest.approx(base * r**-6, rel=1e-12)


@crit(11, "report command passes every reference-value row")
def test_criterion_11_report(tmp_path, monkeypatch):
    monkeypatch.delenv(cli.OUTPUT_DIR_ENV, raising=False)
    assert cli.main(["report", "--output-dir", str(tmp_path)]) == 0
    lines = (tmp_path / "report.csv").read_text().splitlines()
    rows = {ln.split(",")[0]: ln.split(",") for ln in lines[1:]}
    assert {"t_F_s", "E_c_V_per_m", "lambda_sqrtN_per_s", "Q", "t_collapse_hi_over_t_F"} <= set(rows)
    for name, row in rows.items():
        assert row[4] == "true", name
        assert 0.1 <= float(row[3]) <= 10, name
