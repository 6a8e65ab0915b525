import math

import numpy as np
import pytest

from bftk.core.errors import ArityCapError, PreconditionError
from bftk.core.polynomial import MultilinearPolynomial, degree
from bftk.core.truth_table import TruthTable
from bftk.services.approx import (
    Convention,
    approx_degree,
    check_cibj,
    check_quadratic_form_bound,
    check_sparsity,
    composition_adeg_ratio,
    r_tilde,
    solve_degree_lp,
)
from bftk.services.gamma2 import exact_signed_polynomial
from bftk.services.spectral import spectral_sensitivity

from .conftest import all_tables, fam


class TestApproxDegree:
    @pytest.mark.parametrize("name,n,expected", [("and", 2, 1), ("or", 2, 1), ("parity", 2, 2), ("const", 2, 0)])
    def test_small_values(self, name, n, expected):
        params = (n, 1) if name == "const" else (n,)
        assert approx_degree(fam(name, *params)).degree == expected

    def test_witness_respects_bounds(self):
        result = approx_degree(fam("majority", 3))
        assert result.slack >= -1e-7
        assert result.witness.degree() <= result.degree

    def test_infeasibility_certificate_below_optimum(self):
        result = approx_degree(fam("parity", 2))
        cert = result.infeasibility
        assert cert is not None and cert.degree == 1
        assert cert.valid
        assert cert.gap < 0

    def test_zero_error_gives_exact_degree(self):
        for f in all_tables(2):
            assert approx_degree(f, 0.0).degree == degree(f)

    @pytest.mark.slow
    def test_conventions_agree(self):
        for n in (1, 2, 3):
            for f in all_tables(n):
                unit = approx_degree(f, 1 / 3, "unit").degree
                signed = approx_degree(f, 1 / 3, Convention.SIGNED).degree
                assert unit == signed, f.spec

    @pytest.mark.slow
    def test_monotone_in_epsilon(self, rng):
        for _ in range(200):
            f = TruthTable.from_values(rng.integers(0, 2, size=16))
            degrees = [approx_degree(f, eps).degree for eps in (0.0, 0.1, 1 / 3, 0.49)]
            assert degrees == sorted(degrees, reverse=True), f.spec

    def test_tight_bound_against_lambda(self):
        for f in all_tables(3):
            adeg = approx_degree(f).degree
            assert spectral_sensitivity(f).value <= 3 * adeg + 1e-6
            assert degree(f) <= 9 * adeg ** 2

    def test_lp_reports_positive_violation_below_optimum(self):
        lp = solve_degree_lp(fam("and", 3), 0, 1 / 3, Convention.UNIT)
        assert lp.delta > 0

    def test_epsilon_range(self):
        with pytest.raises(PreconditionError):
            approx_degree(fam("or", 2), 0.5)

    def test_unknown_convention(self):
        with pytest.raises(PreconditionError):
            approx_degree(fam("or", 2), 0.2, "percent")

    def test_cap(self):
        with pytest.raises(ArityCapError):
            approx_degree(fam("or", 6))

    def test_composition_ratio_is_reported(self):
        ratio = composition_adeg_ratio(fam("or", 2), fam("and", 2))
        assert ratio is not None and ratio > 0


class TestOperatorChecks:
    def test_r_tilde_norm_is_sup_norm(self):
        q = exact_signed_polynomial(fam("majority", 3))
        norm = np.linalg.norm(r_tilde(q).to_dense(), 2)
        assert norm == pytest.approx(1.0)

    def test_r_tilde_rejects_large_polynomials(self):
        with pytest.raises(PreconditionError):
            r_tilde(MultilinearPolynomial(2, {0: 2}))

    def test_sparsity(self):
        for name, params in [("and_or", (2, 2)), ("majority", (3,)), ("dictator", (4, 2))]:
            check = check_sparsity(exact_signed_polynomial(fam(name, *params)))
            assert check.holds

    def test_lp_witness_sparsity(self):
        q = approx_degree(fam("or", 3), 1 / 3, "signed").witness
        assert check_sparsity(q).holds

    def test_tail_masses(self, rng):
        r = r_tilde(exact_signed_polynomial(fam("dictator", 4, 1)))
        for _ in range(20):
            v = rng.normal(size=16)
            v /= np.linalg.norm(v)
            assert check_cibj(r, v, 1).holds

    def test_tail_masses_of_random_quadratic(self, rng):
        masks = [m for m in range(16) if bin(m).count("1") <= 2]
        q = MultilinearPolynomial(4, {m: float(c) for m, c in zip(masks, rng.normal(size=len(masks)))})
        q = q.affine(0.999 / q.sup_norm(), 0.0)
        assert q.degree() <= 2
        r = r_tilde(q)
        for _ in range(100):
            v = rng.normal(size=16)
            v /= np.linalg.norm(v)
            assert check_cibj(r, v, 2).holds

    def test_cibj_needs_band(self, rng):
        q = exact_signed_polynomial(fam("parity", 3))
        with pytest.raises(PreconditionError):
            check_cibj(r_tilde(q), rng.normal(size=8), 1)

    def test_quadratic_form_exact_polynomial(self):
        for f in all_tables(3):
            check = check_quadratic_form_bound(f, exact_signed_polynomial(f), 0.0)
            assert check.holds
            assert check.mu == pytest.approx(check.lambda_value, abs=1e-6)

    def test_quadratic_form_lp_witness(self):
        f = fam("majority", 3)
        result = approx_degree(f, 0.1, "signed")
        check = check_quadratic_form_bound(f, result.witness, 0.2 + 1e-6)
        assert check.holds

    def test_quadratic_form_rejects_far_polynomials(self):
        f = fam("or", 2)
        with pytest.raises(PreconditionError):
            check_quadratic_form_bound(f, MultilinearPolynomial(2, {}), 0.1)
