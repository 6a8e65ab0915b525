import itertools

import pytest

from bftk.core.errors import ArityCapError
from bftk.core.polynomial import degree
from bftk.core.truth_table import TruthTable
from bftk.services.combinatorial import (
    block_sensitivity,
    certificate_complexity,
    check_midrijanis,
    decision_tree,
    det_query_complexity,
    minimal_sensitive_blocks,
    point_measures,
    sensitivity,
)

from .conftest import all_tables, fam


class TestSensitivity:
    def test_or(self):
        m = sensitivity(fam("or", 3))
        assert (m.s0, m.s1, m.s) == (3, 1, 3)
        assert m.avg_sensitivity == pytest.approx(6 / 8)

    def test_xor_or_is_balanced(self):
        m = sensitivity(fam("xor_or", 4))
        assert m.s0 == m.s1 == 4

    def test_constant(self):
        m = sensitivity(fam("const", 3, 0))
        assert (m.s0, m.s1, m.s) == (0, 0, 0)


class TestBlockSensitivity:
    def test_and_of_ors_at_zero(self, and_or22):
        m = block_sensitivity(and_or22)
        assert m.bs_x[0] == 2
        assert m.bs == 2

    def test_minimal_blocks_of_and_or(self, and_or22):
        blocks = minimal_sensitive_blocks(and_or22)
        # at 0000 the minimal blocks pick one bit from each OR
        assert sorted(b for b in range(16) if blocks[0, b]) == [0b0101, 0b0110, 0b1001, 0b1010]

    def test_cap(self):
        with pytest.raises(ArityCapError) as err:
            block_sensitivity(fam("or", 7))
        assert err.value.measure == "bs"


class TestCertificates:
    def test_and_of_ors(self, and_or22):
        m = certificate_complexity(and_or22)
        assert (m.c0, m.c1, m.c) == (2, 2, 2)

    def test_or(self):
        m = certificate_complexity(fam("or", 4))
        assert (m.c0, m.c1) == (4, 1)

    def test_chain_s_bs_c_d(self):
        for f in all_tables(3):
            m = point_measures(f)
            d = det_query_complexity(f)
            assert m.s <= m.bs <= m.c <= d
            assert m.c <= m.bs * m.s


class TestQueryComplexity:
    def test_families(self, and_or22):
        assert det_query_complexity(and_or22) == 4
        assert det_query_complexity(fam("parity", 5)) == 5
        assert det_query_complexity(fam("dictator", 4, 3)) == 1
        assert det_query_complexity(fam("const", 2, 1)) == 0

    def test_decision_tree_computes_f(self, and_or22):
        tree = decision_tree(and_or22)
        assert tree.depth == 4
        assert all(tree.evaluate(x) == and_or22(x) for x in range(16))

    def test_tree_json_leaf(self):
        assert decision_tree(fam("const", 2, 1)).to_json() == 1

    def test_deg_le_d(self):
        for f in all_tables(3):
            assert degree(f) <= det_query_complexity(f)

    def test_midrijanis_all_small_functions(self):
        for f in all_tables(3):
            assert check_midrijanis(f).holds

    def test_invariant_under_permutation_and_negation(self, rng):
        for f in all_tables(3):
            d = det_query_complexity(f)
            assert det_query_complexity(f.negate()) == d
            for perm in itertools.permutations(range(3)):
                assert det_query_complexity(f.permute(perm)) == d
        for _ in range(50):
            f = TruthTable.from_values(rng.integers(0, 2, size=32))
            d = det_query_complexity(f)
            assert det_query_complexity(f.negate()) == d
            assert det_query_complexity(f.permute([int(i) for i in rng.permutation(5)])) == d

    def test_canonical_memo_gives_same_answers(self, monkeypatch):
        from bftk.core.config import settings

        expected = [det_query_complexity(f) for f in all_tables(2)]
        monkeypatch.setattr(settings, "D_CANONICAL", True)
        assert [det_query_complexity(f) for f in all_tables(2)] == expected
