"""Surface syntax: parsing, printing, and the shipped script files."""

import pathlib

import pytest

from ellkit.errors import ScriptSyntaxError
from ellkit.kernel import check_proof
from ellkit.script import parse_script, show_script
from ellkit.syntax import show_formula

CORPUS = pathlib.Path(__file__).resolve().parent.parent / "corpus"

# file -> (signature entries, equations, formulas, proofs)
FILE_COUNTS = {
    "stdlib.ell": (8, 14, 1, 15),
    "mixed_check.ell": (8, 14, 0, 2),
    "custom_theory.ell": (3, 1, 1, 1),
}


def read(name: str) -> str:
    return (CORPUS / name).read_text(encoding="utf-8")


class TestRoundTrip:
    @pytest.mark.parametrize("name", sorted(FILE_COUNTS))
    def test_shipped_files_parse_with_expected_counts(self, name):
        parsed = parse_script(read(name))
        got = (
            len(parsed.signature_entries),
            len(parsed.equations),
            len(parsed.formulas),
            len(parsed.proofs),
        )
        assert got == FILE_COUNTS[name]

    @pytest.mark.parametrize("name", sorted(FILE_COUNTS))
    def test_print_parse_is_a_fixpoint(self, name):
        parsed = parse_script(read(name))
        shown = show_script(parsed)
        assert show_script(parse_script(shown)) == shown

    @pytest.mark.parametrize("name", sorted(FILE_COUNTS))
    def test_reparse_preserves_every_declaration(self, name):
        parsed = parse_script(read(name))
        again = parse_script(show_script(parsed))
        assert again.signature_entries == parsed.signature_entries
        assert again.equations == parsed.equations
        assert again.formulas == parsed.formulas
        assert again.proofs == parsed.proofs


class TestDefaults:
    def test_scripts_without_a_signature_inherit_arithmetic(self):
        parsed = parse_script("-- just a comment\n")
        names = [n for n, _ in parsed.signature_entries]
        assert names == ["0", "s", "pred", "mult", "minus", "plus", "sum", "prod"]
        assert len(parsed.equations) == 14

    def test_an_explicit_signature_replaces_the_default(self):
        parsed = parse_script(read("custom_theory.ell"))
        assert [n for n, _ in parsed.signature_entries] == ["z", "inc", "twice"]
        assert [e.name for e in parsed.equations] == ["twice_def"]

    def test_theory_property_is_checkable(self):
        parsed = parse_script(read("mixed_check.ell"))
        cp = check_proof(parsed.proof("identity_at_zero"), parsed.theory)
        assert show_formula(cp.sequent.goal).startswith("All X : ")

    def test_unknown_proof_name(self):
        parsed = parse_script(read("mixed_check.ell"))
        with pytest.raises(KeyError):
            parsed.proof("missing")


class TestCustomTheory:
    def test_rewrite_step_against_a_user_equation(self):
        parsed = parse_script(read("custom_theory.ell"))
        cp = check_proof(parsed.proof("twice_unfold"), parsed.theory)
        (fname, formula) = parsed.formulas[0]
        assert fname == "twice_shape"
        assert cp.sequent.goal == formula

    def test_bad_proof_in_mixed_file_is_rejected(self):
        parsed = parse_script(read("mixed_check.ell"))
        from ellkit.kernel import NonBangContraction

        with pytest.raises(NonBangContraction):
            check_proof(parsed.proof("contract_unbanged"), parsed.theory)


class TestSyntaxErrors:
    def test_reserved_marker_in_names(self):
        with pytest.raises(ScriptSyntaxError, match="reserved for generated names"):
            parse_script("proof p = (axiom %h {X(0)});")

    def test_stray_character(self):
        with pytest.raises(ScriptSyntaxError, match="stray character '\\^'"):
            parse_script("proof p = (axiom h {X(0)}) ^;")

    def test_unbalanced_delimiter(self):
        with pytest.raises(ScriptSyntaxError, match=r"expected '\)'"):
            parse_script("proof p = (abs (axiom h {X(0)}) h;")

    def test_unknown_rule_keyword_is_named(self):
        with pytest.raises(ScriptSyntaxError, match="frobnicate"):
            parse_script("proof p = (frobnicate (axiom h {X(0)}) h);")

    def test_missing_terminator_reports_end_of_file(self):
        with pytest.raises(ScriptSyntaxError, match="end of file"):
            parse_script("proof p = (axiom h {X(0)})")

    def test_positions_are_line_and_column(self):
        with pytest.raises(ScriptSyntaxError, match=r"^2:"):
            parse_script("\nproof p = (axiom %h {X(0)});")

    def test_primes_are_ordinary_name_characters(self):
        parsed = parse_script("proof p' = (axiom h {X(0)});")
        assert parsed.proofs[0][0] == "p'"
