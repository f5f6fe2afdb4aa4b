"""Regenerate corpus/stdlib.ell from the in-code proof library.

Run from the repository root:

    python3 tools/make_corpus.py
"""

from __future__ import annotations

import pathlib

from ellkit.library import equations, nat, nat_formula
from ellkit.script import ParsedScript, parse_script, show_script, _std_entries
from ellkit.stdlib import corpus
from ellkit.syntax import Var, all_term

OUT = pathlib.Path(__file__).resolve().parent.parent / "corpus" / "stdlib.ell"

HEADER = """\
-- The proof library in script form, one named proof per statement.
-- Generated by tools/make_corpus.py; edit there, not here.
-- The signature and equations blocks are omitted: the defaults apply.

"""


def main() -> None:
    parsed = ParsedScript(
        _std_entries(),
        equations,
        (("numeral_pred", all_term("x", nat, nat_formula(Var("x")))),),
        tuple(corpus().items()),
    )
    text = HEADER + show_script(parsed)
    if parse_script(text) != parsed:
        raise AssertionError("generated file does not round-trip")
    OUT.parent.mkdir(parents=True, exist_ok=True)
    OUT.write_text(text, encoding="utf-8")
    print(f"wrote {OUT} ({len(text)} bytes, {len(parsed.proofs)} proofs)")


if __name__ == "__main__":
    main()
