from fractions import Fraction

import numpy as np
import pytest

from bftk.core.errors import DimensionMismatchError
from bftk.core.polynomial import (
    MultilinearPolynomial,
    degree,
    degree_gf2,
    fourier,
    mobius,
    mobius_transform,
    subset_sum_transform,
    top_monomial_restriction,
    walsh_hadamard,
    xor_mobius_transform,
)
from bftk.core.truth_table import TruthTable, compose

from .conftest import all_tables, fam


class TestTransforms:
    def test_mobius_inverts_subset_sum(self, rng):
        a = rng.integers(-5, 5, size=32)
        assert np.array_equal(mobius_transform(subset_sum_transform(a, 5), 5), a)

    def test_xor_mobius_is_an_involution(self, rng):
        a = rng.integers(0, 2, size=16).astype(np.uint8)
        assert np.array_equal(xor_mobius_transform(xor_mobius_transform(a, 4), 4), a)

    def test_walsh_hadamard_squares_to_scaled_identity(self, rng):
        a = rng.integers(-3, 3, size=8)
        assert np.array_equal(walsh_hadamard(walsh_hadamard(a, 3), 3), 8 * a)


class TestMobius:
    def test_parity3_top_coefficient(self):
        poly = mobius(fam("parity", 3))
        assert poly.coeffs[0b111] == 4
        assert poly.coeffs[0b011] == -2
        assert poly.coeffs[0b001] == 1

    def test_polynomial_agrees_with_table(self):
        for f in all_tables(3):
            poly = mobius(f)
            assert poly.is_exact
            assert list(poly.values_on_cube()) == list(f.values)

    def test_degrees_of_families(self):
        assert degree(fam("or", 4)) == 4
        assert degree(fam("and_or", 2, 2)) == 4
        assert degree(fam("const", 3, 1)) == 0

    def test_composition_multiplies_degree(self):
        functions = [f for n in (1, 2) for f in all_tables(n) if not f.is_constant]
        for f in functions:
            for g in functions:
                assert degree(compose(f, g)) == degree(f) * degree(g), (f.spec, g.spec)

    def test_gf2_degree(self):
        assert degree_gf2(fam("parity", 5)) == 1
        assert degree_gf2(fam("or", 3)) == 3
        assert degree_gf2(fam("majority", 3)) == 2

    def test_gf2_degree_never_exceeds_degree(self):
        for f in all_tables(3):
            assert degree_gf2(f) <= degree(f)

    def test_from_terms_and_affine(self):
        q = MultilinearPolynomial.from_terms(2, [([1], 1), ([2], 1), ([1, 2], -1)])
        assert q == mobius(fam("or", 2))
        assert list(q.affine(2, -1).values_on_cube()) == [-1, 1, 1, 1]

    def test_to_json(self):
        q = mobius(fam("and", 2))
        assert q.to_json() == {"n": 2, "coeffs": [{"vars": [1, 2], "value": 1.0}]}

    def test_mask_outside_arity_is_rejected(self):
        with pytest.raises(DimensionMismatchError):
            MultilinearPolynomial(2, {0b1000: 1})


class TestFourier:
    def test_parity2_coefficient(self):
        spectrum = fourier(fam("parity", 2))
        assert spectrum.coefficient([1, 2]) == Fraction(-1, 2)
        assert spectrum.coefficient([]) == Fraction(1, 2)

    def test_parseval(self):
        for f in all_tables(3):
            assert fourier(f).parseval_gap(f) == 0

    def test_fourier_degree_equals_degree(self):
        for f in all_tables(3):
            if not f.is_constant:
                assert fourier(f).degree() == degree(f)

    def test_level_weights_sum_to_mean(self):
        f = fam("majority", 3)
        assert sum(fourier(f).weights_by_level()) == pytest.approx(f.values.mean())


class TestTopMonomial:
    def test_restriction_has_full_degree(self):
        for f in all_tables(3):
            if f.is_constant:
                continue
            restricted, kept = top_monomial_restriction(f)
            assert restricted.n == len(kept) == degree(f)
            assert degree(restricted) == restricted.n

    def test_kept_variables(self):
        f = TruthTable.from_function(3, lambda x: (x >> 1) & (x >> 2) & 1)
        restricted, kept = top_monomial_restriction(f)
        assert kept == [2, 3]
        assert restricted == fam("and", 2)
