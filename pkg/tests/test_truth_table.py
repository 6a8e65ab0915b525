import numpy as np
import pytest

from bftk.core.errors import ArityCapError, PreconditionError, SpecParseError, UnknownFamilyError
from bftk.core.families import FamilyRegistry
from bftk.core.truth_table import TruthTable, canonical_form, compose, load_function, restrict
from bftk.utils.bits import hamming_weights, mask_to_vars, vars_to_mask

from .conftest import all_tables, fam


class TestTruthTable:
    def test_hex_is_read_most_significant_first(self):
        f = load_function("tt:2:7")
        assert list(f.values) == [0, 1, 1, 1]
        assert f == fam("or", 2)

    def test_spec_round_trips_through_loader(self):
        f = fam("or", 4)
        assert f.spec == "tt:4:7fff"
        assert load_function(f.spec) == f

    def test_hex_longer_than_table_is_rejected(self):
        with pytest.raises(SpecParseError):
            TruthTable.from_hex(2, "1f")

    def test_values_are_read_only(self):
        f = fam("parity", 3)
        with pytest.raises(ValueError):
            f.values[0] = 1

    def test_signs(self):
        f = fam("and", 2)
        assert list(f.signs) == [1, 1, 1, -1]

    def test_equal_tables_hash_equal(self):
        a = TruthTable.from_values([0, 1, 1, 0])
        b = fam("parity", 2)
        assert a == b and hash(a) == hash(b)

    def test_from_values_rejects_bad_length(self):
        with pytest.raises(PreconditionError):
            TruthTable.from_values([0, 1, 1])

    def test_negate(self):
        assert fam("or", 3).negate() == TruthTable.from_values(1 - fam("or", 3).values)

    def test_all_tables_enumeration_matches_hex(self):
        tables = list(all_tables(2))
        assert len(tables) == 16
        assert [int(t.to_hex(), 16) for t in tables] == list(range(16))


class TestRestrictAndCompose:
    def test_restrict_fixes_variables(self):
        assert restrict(fam("or", 3), {1: 1}).is_constant
        assert restrict(fam("or", 3), {1: 0}) == fam("or", 2)

    def test_free_variables_keep_their_order(self):
        assert restrict(fam("dictator", 3, 2), {1: 0}) == fam("dictator", 2, 1)
        assert restrict(fam("dictator", 3, 3), {2: 1}) == fam("dictator", 2, 2)

    def test_restrict_rejects_bad_variable(self):
        with pytest.raises(PreconditionError):
            restrict(fam("or", 2), {3: 0})

    def test_compose_matches_family(self):
        assert compose(fam("and", 2), fam("or", 2)) == fam("and_or", 2, 2)

    def test_compose_blocks_are_contiguous(self):
        f = compose(fam("dictator", 2, 2), fam("dictator", 2, 1))
        # second block starts at x3
        assert f == fam("dictator", 4, 3)

    def test_permute_relabels(self):
        assert fam("dictator", 3, 1).permute([2, 0, 1]) == fam("dictator", 3, 2)

    def test_canonical_form_identifies_relabelings(self):
        assert canonical_form(fam("dictator", 3, 3)) == canonical_form(fam("dictator", 3, 1))

    def test_canonical_form_cap(self):
        with pytest.raises(ArityCapError):
            canonical_form(fam("or", 7))


class TestFamilies:
    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_basic_families(self, n):
        weights = hamming_weights(n)
        assert np.array_equal(fam("or", n).values, (weights > 0).astype(np.uint8))
        assert np.array_equal(fam("and", n).values, (weights == n).astype(np.uint8))
        assert np.array_equal(fam("parity", n).values, (weights & 1).astype(np.uint8))

    def test_threshold_and_majority(self):
        assert fam("threshold", 3, 2) == fam("majority", 3)

    def test_nand_tree_arity(self):
        assert fam("nand_tree", 2).n == 4

    def test_unknown_family(self):
        with pytest.raises(UnknownFamilyError):
            load_function("fam:nope:3")

    def test_wrong_parameter_count(self):
        with pytest.raises(PreconditionError):
            FamilyRegistry.build("and_or", [2])

    def test_listing_has_descriptions(self):
        listing = FamilyRegistry.list_families()
        assert "and_or" in listing and listing["and_or"]["params"] == "k,l"

    @pytest.mark.parametrize("spec", ["tt:0:1", "tt:2", "foo:1", "fam:or:x"])
    def test_bad_specs(self, spec):
        with pytest.raises(SpecParseError):
            load_function(spec)


class TestBits:
    def test_masks(self):
        assert mask_to_vars(0b101) == [1, 3]
        assert vars_to_mask([1, 3]) == 0b101

    def test_weights(self):
        assert list(hamming_weights(2)) == [0, 1, 1, 2]
