"""Series evaluators and closed-form bound certificates."""

import math

import pytest

from reinperc.bounds import (
    CertificationError,
    FlatPhi,
    crude_growth_constant,
    disconnection_lower_bound,
    entropy_series,
    find_l0,
    find_n0,
    layer_size_bound,
    stack_series,
)
from reinperc.environment import (
    Constant,
    Geometric,
    ZeroGrowth,
    moment_functions,
    phi_floor_level,
    phi_for_graph,
)
from reinperc.graphs import ball_count, integer_lattice, regular_tree

Z1 = integer_lattice(1)
Z2 = integer_lattice(2)
T3 = regular_tree(3)


def test_crude_growth_constant():
    assert crude_growth_constant(Z1) == pytest.approx(math.log(3))
    assert crude_growth_constant(Z2) == pytest.approx(math.log(5))
    assert crude_growth_constant(T3) == pytest.approx(math.log(4))


def test_layer_size_bound():
    mf = moment_functions(Geometric(0.5))
    assert layer_size_bound(0, mf, 1.0) == math.exp(mf.g(0))
    vals = [layer_size_bound(n, mf, math.log(3)) for n in range(0, 40, 5)]
    assert vals == sorted(vals)
    with pytest.raises(ValueError):
        layer_size_bound(-1, mf, 1.0)


# -------------------------------------------------------------- entropy series

@pytest.mark.parametrize("n0", [2, 5])
def test_entropy_series_flat_closed_form(n0):
    # with g == 0 the inner sum is geometric from ceil(n0/2)
    c = 0.7
    start = (n0 + 1) // 2
    inner = math.exp(-c * start) / (1.0 - math.exp(-c))
    sv = entropy_series(n0, c, math.log(3), ZeroGrowth())
    assert sv.certified
    assert sv.value == pytest.approx(inner * inner, rel=1e-10)


def test_entropy_series_monotone_in_n0():
    mf = moment_functions(Geometric(0.5))
    c, cg = 0.6, math.log(5)
    vals = [entropy_series(n0, c, cg, mf).value for n0 in range(1, 30, 4)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))
    assert all(v > 0 for v in vals)


def test_entropy_series_tail_and_validation():
    mf = moment_functions(Geometric(0.5))
    sv = entropy_series(3, 0.8, math.log(3), mf)
    assert sv.tail <= 1e-12 * math.sqrt(sv.value) * 1.01
    assert sv.cutoff >= 2
    with pytest.raises(ValueError):
        entropy_series(0, 0.8, 1.0, mf)
    with pytest.raises(ValueError):
        entropy_series(3, 0.0, 1.0, mf)
    with pytest.raises(ValueError):
        entropy_series(3, 0.8, -1.0, mf)


def test_find_n0_is_minimal():
    mf = moment_functions(Geometric(0.5))
    c, cg = 0.9, math.log(3)
    n0 = find_n0(c, cg, mf)
    assert entropy_series(n0, c, cg, mf).value <= 0.5
    if n0 > 1:
        assert entropy_series(n0 - 1, c, cg, mf).value > 0.5
    with pytest.raises(CertificationError):
        find_n0(0.9, cg, mf, max_n=1) if n0 > 1 else find_n0(
            1e-9, cg, mf, max_n=3)


# ---------------------------------------------------------------- stack series

def test_stack_series_flat_phi_identity():
    c = 1.3
    sv = stack_series(FlatPhi(), c, 3, Z1)
    assert sv.certified
    assert sv.value == pytest.approx(1.0 / (math.exp(c) - 1.0), rel=1e-10)


def test_stack_series_envelope_dominates():
    phi = phi_for_graph(Z1, 1.0)
    c, L = 1.2, 2
    sv = stack_series(phi, c, L, Z1)
    a = phi.alpha
    envelope = (math.exp(a * (1 + L) - c)
                / (1.0 - math.exp(a - c)))
    assert 0.0 < sv.value <= envelope * (1.0 + 1e-9)
    # terms really are ball counts of the integer inverse
    first = math.exp(math.log(ball_count(Z1, phi.inv(1 + L))) - c)
    assert sv.value >= first


def test_stack_series_certification_failure():
    phi = phi_for_graph(Z1, 2.0)  # alpha == 1.0
    with pytest.raises(CertificationError):
        stack_series(phi, 0.9, 3, Z1)
    with pytest.raises(ValueError):
        stack_series(phi, 0.0, 3, Z1)


# ----------------------------------------------------------------- flat pieces

def test_flat_phi_degenerate():
    fp = FlatPhi()
    assert fp.alpha == 0.0
    assert fp.inv(50) == 0
    assert fp(7) == 0.0


def test_disconnection_lower_bound():
    assert math.isclose(disconnection_lower_bound(0.9, 12), 0.5e-12,
                        rel_tol=1e-9)
    assert disconnection_lower_bound(0.0, 5) == 0.5
    assert disconnection_lower_bound(0.3, 4) > disconnection_lower_bound(0.6, 4)
    assert disconnection_lower_bound(0.3, 4) > disconnection_lower_bound(0.3, 9)
    with pytest.raises(ValueError):
        disconnection_lower_bound(1.0, 3)
    with pytest.raises(ValueError):
        disconnection_lower_bound(0.5, -1)


# --------------------------------------------------------------- l0 certificate

def test_find_l0_geometric():
    phi = phi_for_graph(Z1, 1.0)
    cert = find_l0(Geometric(0.5), phi, 1.0, Z1)
    assert cert.l0 == 3
    assert cert.previous_failed
    assert cert.check_value <= 0.5
    assert cert.prob_mass >= 0.05
    # the certificate re-derives from its own fields
    assert cert.check_value == pytest.approx(
        math.exp(-2.0 * cert.l0) * cert.series_value**2)
    assert cert.prob_mass == pytest.approx(
        Geometric(0.5).prob_range(cert.l0, 2 * cert.l0))
    looser = find_l0(Geometric(0.5), phi, 0.8, Z1)
    assert looser.l0 == 4


def test_find_l0_constant_radius_fails():
    phi = phi_for_graph(Z1, 1.0)
    with pytest.raises(CertificationError):
        find_l0(Constant(2), phi, 1.0, Z1)


def test_find_l0_uses_floor_level():
    dist = Geometric(0.5)
    phi = phi_for_graph(Z1, 1.0)
    L = phi_floor_level(dist, phi)
    cert = find_l0(dist, phi, 1.0, Z1)
    assert cert.series_value == pytest.approx(
        stack_series(phi, 1.0, L, Z1).value)
