import pytest

from bftk.core.errors import FormulaSyntaxError, RepeatedVariableError
from bftk.core.truth_table import TruthTable, load_function
from bftk.services.formulas import (
    format_formula,
    formula_to_table,
    normalize,
    parse_formula,
    random_read_once,
    readonce_adeg_window,
    readonce_degree_check,
)

from .conftest import fam


class TestParser:
    def test_simple_formula(self):
        ast = parse_formula("(x1 & (x2 | ~x3))")
        assert ast.n == 3
        expected = TruthTable.from_function(3, lambda x: (x & 1) and ((x >> 1) & 1 or not (x >> 2) & 1))
        assert formula_to_table(ast) == expected

    def test_variables_are_renumbered_in_order_of_appearance(self):
        ast = normalize(parse_formula("(x5 | x2)"))
        assert format_formula(ast) == "(x1 | x2)"

    def test_whitespace_is_ignored(self):
        assert formula_to_table(parse_formula(" ( x1&x2 ) ")) == fam("and", 2)

    def test_wide_groups(self):
        assert formula_to_table(parse_formula("(x1 | x2 | x3)")) == fam("or", 3)

    def test_negated_group(self):
        assert formula_to_table(parse_formula("~(x1 | x2)")) == fam("or", 2).negate()

    def test_printed_formula_parses_back(self, rng):
        for _ in range(200):
            ast = normalize(random_read_once(int(rng.integers(1, 11)), rng))
            assert parse_formula(format_formula(ast)) == ast

    def test_loader_prefix(self):
        assert load_function("formula:(x1 & x2)") == fam("and", 2)

    def test_repeated_variable(self):
        with pytest.raises(RepeatedVariableError) as err:
            parse_formula("(x1 & x1)")
        assert err.value.position == 6

    @pytest.mark.parametrize(
        "text,message",
        [
            ("", "empty"),
            ("(x1 & x2", "missing ')'"),
            ("(x1 & x2 | x3)", "mixed operators"),
            ("(x1)", "at least two operands"),
            ("x1 x2", "trailing"),
            ("(x1 & y2)", "unexpected character"),
        ],
    )
    def test_syntax_errors(self, text, message):
        with pytest.raises(FormulaSyntaxError) as err:
            parse_formula(text)
        assert message in str(err.value)


class TestReadOnceDegree:
    def test_degree_equals_leaf_count(self):
        check = readonce_degree_check(parse_formula("((x1 & x2) | ~(x3 & (x4 | x5)))"))
        assert check.holds and check.degree == 5

    def test_random_formulas(self, rng):
        for _ in range(200):
            n = int(rng.integers(1, 11))
            ast = random_read_once(n, rng)
            assert sorted(ast.variables) == list(range(1, n + 1))
            assert readonce_degree_check(ast).holds

    def test_adeg_window(self):
        window = readonce_adeg_window(parse_formula("((x1 | x2) & (x3 | x4))"))
        assert window.adeg <= 4
        assert window.holds
        assert window.lower_bound == pytest.approx(2 / 3)
