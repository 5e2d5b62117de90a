import pytest

from gpchain.coeffs import ParamCoeff
from gpchain.opalg import Algebra, Statistics
from gpchain.symbolmap import (
    FieldPoly,
    naive_symbol,
    ordering_correction,
    wick_symbol,
)

B = Algebra(Statistics.BOSE)


def phi(i):
    return FieldPoly.phi(i)


def phi_s(i):
    return FieldPoly.phi_star(i)


def test_naive_symbol_positional():
    assert naive_symbol(B.ad(2) * B.a(2)) == phi_s(2) * phi(2)
    assert naive_symbol(B.a(1)) == phi(1)
    assert naive_symbol(B.identity()) == FieldPoly.scalar(1)


def test_wick_symbol_reorders_first():
    # a_i ad_i -> |phi_i|^2 + 1
    expr = B.a(1) * B.ad(1)
    assert wick_symbol(expr) == phi_s(1) * phi(1) + FieldPoly.scalar(1)
    assert naive_symbol(expr) == phi_s(1) * phi(1)
    assert ordering_correction(expr) == FieldPoly.scalar(1)


def test_wick_symbol_three_factor_example():
    # a_{i+1} ad_{i+1} a_i -> (|phi_{i+1}|^2 + 1) phi_i
    expr = B.a(2) * B.ad(2) * B.a(1)
    expect = (phi_s(2) * phi(2) + FieldPoly.scalar(1)) * phi(1)
    assert wick_symbol(expr) == expect
    assert ordering_correction(expr) == phi(1)


def test_wick_refuses_fermi():
    F = Algebra(Statistics.FERMI)
    with pytest.raises(ValueError):
        wick_symbol(F.a(1) * F.ad(1))
    # naive symbol still reads the canonical form
    assert naive_symbol(F.a(1)) == phi(1)


def test_field_poly_arithmetic_and_conjugate():
    p = phi(1) * phi_s(2) + FieldPoly.scalar(ParamCoeff.symbol("s"))
    q = p.conjugate()
    assert q == phi_s(1) * phi(2) + FieldPoly.scalar(ParamCoeff.symbol("s"))
    assert (p - p).is_zero()
    assert p.degree() == 2
    assert p.sites() == frozenset({1, 2})


def test_field_poly_powers_and_str():
    dens = phi_s(1) * phi(1) * phi_s(1) * phi(1)
    s = str(dens)
    assert "^2" in s
    assert dens.degree() == 4


def test_field_poly_filter_degree():
    p = phi(1) + phi_s(2) * phi(2) * phi(1)
    assert p.filter_degree(1) == phi(1)
    assert p.filter_degree(3) == phi_s(2) * phi(2) * phi(1)
    assert p.filter_degree(2).is_zero()


def test_field_poly_evaluate_mappings():
    p = phi_s(0) * phi(1)
    val = p.evaluate({(0, 0): 2 - 1j, (1, 0): 1 + 1j})
    assert val == (2 + 1j) * (1 + 1j)
    arr = p.evaluate([2 - 1j, 1 + 1j])
    assert arr == val


def test_field_poly_evaluate_with_parameters():
    p = phi(0).scale(ParamCoeff.symbol("J[0,1]"))
    v = p.evaluate([0.5j], {"J[0,1]": 2.0})
    assert v == 1j


def test_correction_is_zero_for_normal_ordered():
    expr = B.ad(1) * B.a(1) * B.a(2)
    assert ordering_correction(expr).is_zero()


def test_symbol_is_additive():
    x = B.a(1) * B.ad(1)
    y = B.ad(2) * B.a(2)
    assert naive_symbol(x + y) == naive_symbol(x) + naive_symbol(y)
    assert wick_symbol(x + y) == wick_symbol(x) + wick_symbol(y)
