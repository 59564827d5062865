import numpy as np
import pytest

from sonicflow.field2d import Field2D, field_csv_text
from sonicflow.keldysh import (InsufficientGradingError, KeldyshBC,
                               KeldyshCoefficients, KeldyshConvergenceError,
                               KeldyshDomain, KeldyshOptions, corner_probe,
                               solve_model, sonic_derivative_scan,
                               reference_scenario, verify_bounds)

A = 4.0


@pytest.fixture(scope="module")
def domain():
    return KeldyshDomain(eps0=0.5, f=lambda x: 1.0 + x, fp=lambda x: 1.0,
                         fpp=lambda x: 0.0, omega=1.0)


@pytest.fixture(scope="module")
def plain_coeffs():
    return KeldyshCoefficients(a=A, b=1.0)


def manufactured_bc(eps0=0.5):
    exact = lambda x: x * x / (2.0 * A)
    return KeldyshBC(top_mode="dirichlet", top_data=exact,
                     right_data=lambda y: exact(eps0))


@pytest.fixture(scope="module")
def manufactured_fields(domain, plain_coeffs):
    out = {}
    for n in (17, 33, 65):
        opts = KeldyshOptions(nx=n, ny=n, tol=1e-12, max_iter=120)
        out[n] = solve_model(domain, plain_coeffs, opts, manufactured_bc())
    return out


@pytest.fixture(scope="module")
def scenario_field():
    dom, coeffs, bc = reference_scenario()
    fld = solve_model(dom, coeffs, KeldyshOptions(nx=97, ny=97, tol=1e-11, max_iter=160), bc)
    return fld, coeffs


# ---------------------------------------------------------------------------
# domain / coefficient validation
# ---------------------------------------------------------------------------

def test_domain_validation():
    with pytest.raises(ValueError, match="f\\(0\\)"):
        KeldyshDomain(eps0=0.5, f=lambda x: x, omega=1.0)
    with pytest.raises(ValueError, match="df/dx"):
        KeldyshDomain(eps0=0.5, f=lambda x: 1.0 - x, omega=0.5)
    with pytest.raises(ValueError, match="eps0"):
        KeldyshDomain(eps0=-1.0, f=lambda x: 1.0 + x)


def test_coefficient_bounds(domain):
    good = KeldyshCoefficients(a=A, b=1.0, O1=lambda x, y: 0.05 * x * x, N=0.1)
    good.validate_bounds(domain)
    bad = KeldyshCoefficients(a=A, b=1.0, O1=lambda x, y: 0.5 * x, N=0.1)
    with pytest.raises(ValueError, match="O1"):
        bad.validate_bounds(domain)
    skew = KeldyshCoefficients(a=A, b=1.0, beta1=lambda x, y: 0.1, lam=0.5)
    with pytest.raises(ValueError, match="beta1"):
        skew.validate_bounds(domain)


# ---------------------------------------------------------------------------
# manufactured solution
# ---------------------------------------------------------------------------

def test_manufactured_reproduced(manufactured_fields):
    fld = manufactured_fields[65]
    err = np.max(np.abs(fld.values - fld.x ** 2 / (2 * A)))
    assert err < 5e-4
    assert fld.metadata["residual"] < 1e-8
    assert not fld.metadata["clamp_active"]


def test_manufactured_convergence_order(manufactured_fields):
    errs = [float(np.max(np.abs(f.values - f.x ** 2 / (2 * A))))
            for f in (manufactured_fields[17], manufactured_fields[33],
                      manufactured_fields[65])]
    slope = np.polyfit(np.log2([1 / 16, 1 / 32, 1 / 64]), np.log2(errs), 1)[0]
    # nominal first order (upwinded first-derivative term)
    assert abs(slope - 1.0) <= 0.3


def test_zero_data_gives_zero(domain, plain_coeffs):
    fld = solve_model(domain, plain_coeffs, KeldyshOptions(nx=17, ny=17), KeldyshBC())
    assert np.max(np.abs(fld.values)) == 0.0


def test_determinism(domain, plain_coeffs):
    opts = KeldyshOptions(nx=21, ny=21)
    f1 = solve_model(domain, plain_coeffs, opts, manufactured_bc())
    f2 = solve_model(domain, plain_coeffs, opts, manufactured_bc())
    assert np.array_equal(f1.values, f2.values)


def test_convergence_error(domain, plain_coeffs):
    with pytest.raises(KeldyshConvergenceError):
        solve_model(domain, plain_coeffs, KeldyshOptions(nx=17, ny=17, max_iter=2, tol=1e-14),
                    manufactured_bc())


# ---------------------------------------------------------------------------
# derivative scan
# ---------------------------------------------------------------------------

def test_scan_manufactured(manufactured_fields):
    fld = manufactured_fields[65]
    scan = sonic_derivative_scan(fld, [0.25, 0.5])
    assert not scan.corner_contaminated.any()
    assert np.all(np.abs(scan.limits - 0.25) < 0.02)


def test_scan_corner_contamination_flag(manufactured_fields):
    fld = manufactured_fields[65]
    f0 = float(fld.y[0, -1])
    scan = sonic_derivative_scan(fld, [0.5 * f0, f0 - 1e-6])
    assert scan.corner_contaminated.tolist() == [False, True]


def test_scan_insufficient_grading(domain, plain_coeffs):
    fld = solve_model(domain, plain_coeffs, KeldyshOptions(nx=4, ny=8), manufactured_bc())
    with pytest.raises(InsufficientGradingError):
        sonic_derivative_scan(fld, [0.5])


def test_scan_mesh_consistency(domain, plain_coeffs):
    """Scan limits move monotonically and Richardson estimates stabilize."""
    dom, coeffs, bc = reference_scenario()
    limits = []
    for n in (33, 65, 97):
        fld = solve_model(dom, coeffs, KeldyshOptions(nx=n, ny=n, max_iter=160), bc)
        limits.append(sonic_derivative_scan(fld, [0.25]).limits[0])
    d1, d2 = limits[1] - limits[0], limits[2] - limits[1]
    assert d1 * d2 >= 0.0  # monotone approach
    assert abs(limits[2] - limits[1]) / abs(limits[2]) < 0.10


# ---------------------------------------------------------------------------
# corner probe
# ---------------------------------------------------------------------------

def test_corner_probe_manufactured_no_gap(manufactured_fields):
    probe = corner_probe(manufactured_fields[65])
    assert probe.limit_tangential == pytest.approx(0.25, abs=0.02)
    assert probe.limit_hugging == pytest.approx(0.25, abs=0.02)
    assert probe.gap < 0.01


def test_corner_probe_zero_field(domain, plain_coeffs):
    fld = solve_model(domain, plain_coeffs, KeldyshOptions(nx=33, ny=33), KeldyshBC())
    probe = corner_probe(fld)
    assert probe.limit_tangential == 0.0
    assert probe.limit_hugging == 0.0


def test_corner_probe_scenario_gap(scenario_field):
    fld, _ = scenario_field
    probe = corner_probe(fld)
    assert probe.gap > 0.5 / A


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def test_bounds_manufactured(manufactured_fields, plain_coeffs):
    checks = verify_bounds(manufactured_fields[65], plain_coeffs)
    assert checks.psi_nonneg
    # constant ratio psi_x/x = 1/a = (2-delta)/a for any delta < 1; the
    # discrete ratio drifts high near the degenerate edge, so the margin is
    # asserted rather than delta = 1 exactly
    assert checks.slope_upper_holds and checks.delta > 0.5
    assert checks.quadratic_L == pytest.approx(1.0 / (2 * A), abs=0.03)
    assert checks.mu == pytest.approx(0.0, abs=1e-6)


def test_bounds_zero_field(domain, plain_coeffs):
    fld = solve_model(domain, plain_coeffs, KeldyshOptions(nx=17, ny=17), KeldyshBC())
    checks = verify_bounds(fld, plain_coeffs)
    assert checks.psi_nonneg and checks.quadratic_holds


def test_bounds_negative_control(manufactured_fields, plain_coeffs):
    fld = manufactured_fields[33]
    flipped = Field2D(x=fld.x, y=fld.y, values=-fld.values, metadata={})
    checks = verify_bounds(flipped, plain_coeffs)
    assert not checks.psi_nonneg


def test_scenario_bounds(scenario_field):
    fld, coeffs = scenario_field
    checks = verify_bounds(fld, coeffs)
    assert checks.psi_nonneg
    assert checks.quadratic_holds and checks.quadratic_L < 10.0


def test_max_principle_zero_perturbations(domain, plain_coeffs):
    """O_i = 0 and nonnegative top data give a nonnegative solution."""
    bc = KeldyshBC(top_mode="oblique", top_data=lambda x: 0.1 * x,
                   right_data=lambda y: 0.0)
    fld = solve_model(domain, plain_coeffs, KeldyshOptions(nx=33, ny=33), bc)
    assert float(np.min(fld.values)) >= -1e-10 * max(1.0, float(np.max(np.abs(fld.values))))


# ---------------------------------------------------------------------------
# scenario sanity + serialization
# ---------------------------------------------------------------------------

def test_scenario_scan(scenario_field):
    fld, _ = scenario_field
    f0 = float(fld.y[0, -1])
    scan = sonic_derivative_scan(fld, [0.25 * f0, 0.5 * f0])
    assert np.all(np.abs(scan.limits - 0.25) <= 0.15 * 0.25)


def test_field_csv(manufactured_fields, tmp_path):
    fld = manufactured_fields[17]
    text = field_csv_text(fld)
    lines = text.strip().split("\n")
    assert lines[0] == "x,y,psi"
    assert len(lines) == fld.values.size + 1
