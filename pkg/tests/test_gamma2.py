import math

import numpy as np
import pytest

from bftk.core.errors import CertificateError, ConventionError, DimensionMismatchError, PreconditionError
from bftk.core.polynomial import mobius
from bftk.services.approx import approx_degree, r_tilde
from bftk.services.gamma2 import (
    Gamma2Certificate,
    build_bq,
    build_gamma2_certificate,
    certificate_chain,
    exact_signed_polynomial,
    gamma2_upper,
    hadamard_product_bound,
    lift_certificate,
    max_column_norm,
    weight_difference,
)

from .conftest import all_tables, fam

# M_st = w[(s - t) mod 12] for n = 12, d = 3
TRIANGLE = [0, 1, 2, 3, 2, 1, 0, -1, -2, -3, -2, -1]


class TestGamma2Certificate:
    def test_printed_matrix(self):
        cert = build_gamma2_certificate(12, 3)
        expected = np.array([[TRIANGLE[(s - t) % 12] for t in range(13)] for s in range(13)])
        assert np.array_equal(cert.m, expected)
        assert np.array_equal(cert.s.T @ cert.t, cert.m)

    def test_column_norms_are_sqrt_d(self):
        cert = build_gamma2_certificate(12, 3)
        assert max_column_norm(cert.s) == pytest.approx(math.sqrt(3), abs=1e-15)
        assert max_column_norm(cert.t) == pytest.approx(math.sqrt(3), abs=1e-15)
        assert cert.bound == pytest.approx(3.0)

    @pytest.mark.parametrize("n,d", [(1, 1), (4, 2), (7, 7), (20, 5)])
    def test_band_identity(self, n, d):
        cert = build_gamma2_certificate(n, d)
        idx = np.arange(n + 1)
        diff = idx[:, None] - idx[None, :]
        band = np.abs(diff) <= d
        assert np.array_equal(cert.m[band], diff[band])
        assert cert.band_holds

    def test_band_check_detects_a_wrong_entry(self):
        cert = build_gamma2_certificate(4, 2)
        m = cert.m.copy()
        m[0, 1] += 1
        assert not Gamma2Certificate(cert.n, cert.d, cert.s, cert.t, m).band_holds

    def test_d_out_of_range(self):
        with pytest.raises(PreconditionError):
            build_gamma2_certificate(3, 4)
        with pytest.raises(PreconditionError):
            build_gamma2_certificate(3, 0)

    def test_json_shape(self):
        data = build_gamma2_certificate(2, 1).to_json()
        assert data["d"] == 1 and len(data["S"]) == 2 and len(data["S"][0]) == 3

    def test_mismatched_factorization(self):
        with pytest.raises(DimensionMismatchError):
            gamma2_upper(np.ones((2, 3)), np.ones((3, 3)))


class TestLiftedCertificate:
    def test_lift_agrees_with_weight_difference_in_band(self):
        n, d = 4, 2
        v, x, y = lift_certificate(build_gamma2_certificate(n, d))
        w = weight_difference(n)
        idx = np.arange(1 << n)
        distance = np.array([[bin(a ^ b).count("1") for b in idx] for a in idx])
        assert np.array_equal(v[distance <= d], w[distance <= d])
        assert np.array_equal(x.T @ y, v)

    def test_hadamard_product_bound(self):
        f = fam("majority", 3)
        q = approx_degree(f, 1 / 3, "signed").witness
        cert = build_gamma2_certificate(3, max(q.degree(), 1))
        v, x, y = lift_certificate(cert)
        check = hadamard_product_bound(v, r_tilde(q).to_dense(), (x, y))
        assert check.holds

    def test_wrong_factorization_is_caught(self):
        cert = build_gamma2_certificate(3, 1)
        v, x, y = lift_certificate(cert)
        with pytest.raises(CertificateError):
            hadamard_product_bound(v + 1, np.eye(8), (x, y))


class TestBq:
    def test_or2_norm(self, or2):
        bq = build_bq(or2, exact_signed_polynomial(or2))
        assert bq.norm == pytest.approx(math.sqrt(2))
        assert bq.wr_norm == pytest.approx(bq.norm, abs=1e-7)

    def test_unit_convention_rejected(self, or2):
        with pytest.raises(ConventionError):
            build_bq(or2, mobius(or2))

    def test_lp_witness(self):
        f = fam("and_or", 2, 2)
        q = approx_degree(f, 1 / 3, "signed").witness
        bq = build_bq(f, q)
        assert bq.norm == pytest.approx(bq.wr_norm, abs=1e-7)


class TestCertificateChain:
    @pytest.mark.parametrize("epsilon", [0.0, 1 / 3])
    def test_all_functions_n3(self, epsilon):
        for f in all_tables(3):
            assert certificate_chain(f, epsilon).holds

    def test_links_for_or3(self):
        report = certificate_chain(fam("or", 3), 1 / 3)
        assert report.lambda_value == pytest.approx(math.sqrt(3))
        assert report.lambda_value <= report.bq_norm * 3 + 1e-6
        assert report.gamma2 == pytest.approx(report.degree)

    def test_constant_function(self):
        report = certificate_chain(fam("const", 2, 0), 1 / 3)
        assert report.degree == 0 and report.gamma2 == 0.0 and report.holds
