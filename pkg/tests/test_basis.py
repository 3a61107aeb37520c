import numpy as np
import pytest
import sympy as sp
from scipy.interpolate import BSpline

from kdvb.basis import BasisConfig, classical_cubic_bspline, eval_basis, eval_basis_deriv, nodal_table

LAMBDAS = (-1.969, -1.0, 0.0, 0.5, 1.0)


def _sympy_basis(lam, h, i=0, origin=0.0):
    """The piecewise quartic written in global coordinates, transcribed independently."""
    x = sp.Symbol("x")
    lam = sp.nsimplify(lam)
    h = sp.nsimplify(h)
    xk = [sp.nsimplify(origin) + (i + k) * h for k in (-2, -1, 0, 1, 2)]
    p1 = 4 * h * (1 - lam) * (x - xk[0]) ** 3 + 3 * lam * (x - xk[0]) ** 4
    p2 = ((4 - lam) * h**4 + 12 * h**3 * (x - xk[1]) + 6 * h**2 * (2 + lam) * (x - xk[1]) ** 2
          - 12 * h * (x - xk[1]) ** 3 - 3 * lam * (x - xk[1]) ** 4)
    p3 = ((4 - lam) * h**4 - 12 * h**3 * (x - xk[3]) + 6 * h**2 * (2 + lam) * (x - xk[3]) ** 2
          + 12 * h * (x - xk[3]) ** 3 - 3 * lam * (x - xk[3]) ** 4)
    p4 = 4 * h * (lam - 1) * (x - xk[4]) ** 3 + 3 * lam * (x - xk[4]) ** 4
    pieces = [sp.expand(p / (24 * h**4)) for p in (p1, p2, p3, p4)]
    return x, pieces, [float(v) for v in xk]


def _oracle(lam, h, xs, order=0):
    x, pieces, xk = _sympy_basis(lam, h)
    fns = [sp.lambdify(x, sp.diff(p, x, order)) for p in pieces]
    out = []
    for v in xs:
        k = np.searchsorted(xk, v, side="right") - 1
        if v == xk[-1]:
            k = 3
        out.append(0.0 if k < 0 or k > 3 else float(fns[k](v)))
    return np.array(out)


class TestEvaluation:
    def test_centre_value_classical(self):
        assert eval_basis(BasisConfig(0.0, 0.7), 0, 0.0) == pytest.approx(2.0 / 3.0, abs=1e-15)

    def test_support_endpoints_vanish(self):
        for lam in LAMBDAS:
            cfg = BasisConfig(lam, 0.5)
            assert eval_basis(cfg, 3, 0.5) == 0.0
            assert eval_basis(cfg, 3, 2.5) == 0.0

    def test_first_piece_value(self):
        assert eval_basis(BasisConfig(0.0, 1.0), 0, -1.5) == pytest.approx(0.5**3 / 6.0, abs=1e-15)

    def test_outside_support_zero(self):
        cfg = BasisConfig(-1.0, 0.4)
        x = np.array([-10.0, -0.81, 0.81, 3.0])
        np.testing.assert_array_equal(eval_basis(cfg, 0, x), 0.0)
        np.testing.assert_array_equal(eval_basis_deriv(cfg, 0, x, 2), 0.0)

    def test_scalar_in_scalar_out(self):
        assert isinstance(eval_basis(BasisConfig(0.0, 1.0), 0, 0.3), float)

    @pytest.mark.parametrize("lam", LAMBDAS)
    @pytest.mark.parametrize("order", [0, 1, 2])
    def test_matches_symbolic_oracle(self, lam, order):
        h = 0.5
        xs = np.linspace(-1.1, 1.1, 97)
        cfg = BasisConfig(lam, h)
        got = eval_basis(cfg, 0, xs) if order == 0 else eval_basis_deriv(cfg, 0, xs, order)
        np.testing.assert_allclose(got, _oracle(lam, h, xs, order), rtol=0, atol=1e-12 / h**order)

    def test_origin_and_centre_shift(self):
        cfg = BasisConfig(0.25, 0.3)
        x = np.linspace(-1, 4, 41)
        # E_5 on a grid starting at -0.5 is centred at -0.5 + 5*0.3 = 1.0
        np.testing.assert_allclose(eval_basis(cfg, 5, x, origin=-0.5), eval_basis(cfg, 0, x - 1.0), atol=1e-14)

    def test_deriv_order_rejected(self):
        cfg = BasisConfig(0.0, 1.0)
        for order in (0, 3, -1):
            with pytest.raises(ValueError):
                eval_basis_deriv(cfg, 0, 0.0, order)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            BasisConfig(0.0, 0.0)
        with pytest.raises(ValueError):
            BasisConfig(0.0, -1.0)
        with pytest.raises(ValueError):
            BasisConfig(float("nan"), 1.0)


class TestKnotValues:
    @pytest.mark.parametrize("lam", LAMBDAS)
    def test_values_at_support_knots(self, lam):
        h = 0.5
        cfg = BasisConfig(lam, h)
        knots = np.array([-2, -1, 0, 1, 2]) * h
        np.testing.assert_allclose(24 * eval_basis(cfg, 0, knots), [0, 4 - lam, 16 + 2 * lam, 4 - lam, 0], atol=1e-13)
        np.testing.assert_allclose(2 * h * eval_basis_deriv(cfg, 0, knots, 1), [0, 1, 0, -1, 0], atol=1e-13)
        np.testing.assert_allclose(2 * h * h * eval_basis_deriv(cfg, 0, knots, 2),
                                   [0, 2 + lam, -4 - 2 * lam, 2 + lam, 0], atol=1e-13)

    def test_second_derivative_example(self):
        cfg = BasisConfig(0.0, 0.5)
        assert eval_basis_deriv(cfg, 0, -0.5, 2) == pytest.approx(4.0, abs=1e-13)

    def test_nodal_table_classical(self):
        t = nodal_table(BasisConfig(0.0, 0.5))
        np.testing.assert_allclose([t.alpha1, t.alpha2, t.beta1, t.gamma1, t.gamma2], [1 / 6, 2 / 3, -1, 4, -8], atol=1e-15)

    def test_nodal_table_extended(self):
        t = nodal_table(BasisConfig(-1.969, 0.5))
        assert t.alpha1 == pytest.approx(5.969 / 24)
        assert t.alpha2 == pytest.approx(6.031 / 12)

    @pytest.mark.parametrize("lam", np.linspace(-2, 1, 7))
    def test_nodal_table_identities(self, lam):
        t = nodal_table(BasisConfig(lam, 0.37))
        assert 2 * t.alpha1 + t.alpha2 == pytest.approx(1.0, abs=1e-15)
        assert 2 * t.gamma1 + t.gamma2 == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("lam", LAMBDAS)
    def test_table_agrees_with_evaluation(self, lam):
        h = 0.3
        cfg = BasisConfig(lam, h)
        t = nodal_table(cfg)
        assert eval_basis(cfg, 1, 0.0) == pytest.approx(t.alpha1, abs=1e-14)
        assert eval_basis(cfg, 0, 0.0) == pytest.approx(t.alpha2, abs=1e-14)
        assert eval_basis_deriv(cfg, -1, 0.0, 1) == pytest.approx(t.beta1, abs=1e-12)
        assert eval_basis_deriv(cfg, 1, 0.0, 2) == pytest.approx(t.gamma1, abs=1e-10)
        assert eval_basis_deriv(cfg, 0, 0.0, 2) == pytest.approx(t.gamma2, abs=1e-10)


class TestGlobalProperties:
    @pytest.mark.parametrize("lam", [-8.0, -1.969, -1.0, 0.0, 0.5, 1.0])
    def test_partition_of_unity(self, lam):
        h, n = 0.4, 25
        cfg = BasisConfig(lam, h)
        x = np.random.default_rng(0).uniform(0.0, n * h, 1000)
        total = sum(eval_basis(cfg, i, x) for i in range(-1, n + 2))
        assert np.max(np.abs(total - 1.0)) <= 1e-12

    def test_partition_of_unity_at_knots(self):
        cfg = BasisConfig(-1.0, 0.5)
        x = np.arange(0, 11) * 0.5
        total = sum(eval_basis(cfg, i, x) for i in range(-1, 12))
        np.testing.assert_allclose(total, 1.0, atol=1e-14)

    @pytest.mark.parametrize("lam", LAMBDAS)
    def test_c2_continuity_at_knots(self, lam):
        # evaluate adjacent symbolic pieces at the shared knot: a check of the formula itself
        x, pieces, xk = _sympy_basis(lam, 0.5)
        for k in range(3):
            for order in range(3):
                a = sp.diff(pieces[k], x, order).subs(x, sp.nsimplify(xk[k + 1]))
                b = sp.diff(pieces[k + 1], x, order).subs(x, sp.nsimplify(xk[k + 1]))
                assert abs(float(a - b)) <= 1e-12
        # and the implementation at the knots matches both pieces
        cfg = BasisConfig(lam, 0.5)
        for k in range(1, 4):
            for order in range(3):
                left = float(sp.diff(pieces[k - 1], x, order).subs(x, sp.nsimplify(xk[k])))
                got = eval_basis(cfg, 0, xk[k]) if order == 0 else eval_basis_deriv(cfg, 0, xk[k], order)
                assert got == pytest.approx(left, abs=1e-12)

    def test_classical_equivalence(self):
        rng = np.random.default_rng(1)
        h = 0.7
        x = rng.uniform(-2.5 * h, 2.5 * h, 100)
        cfg = BasisConfig(0.0, h)
        ref = BSpline.basis_element(np.array([-2, -1, 0, 1, 2]) * h, extrapolate=False)(x)
        ref = np.nan_to_num(ref)
        np.testing.assert_allclose(eval_basis(cfg, 0, x), ref, atol=1e-14)
        np.testing.assert_allclose(classical_cubic_bspline(x / h), ref, atol=1e-14)
