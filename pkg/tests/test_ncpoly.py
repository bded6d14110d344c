"""
tests/test_ncpoly.py
~~~~~~~~~~~~~~~~~~~~
Exact scalars, noncommutative polynomials, the expression parser and SOS
verification against the shipped identities.
"""
from __future__ import annotations

from fractions import Fraction
from math import sqrt

import pytest
import sympy

from apps.core.exceptions import InputRangeError, ParseError
from apps.graphs.services import GraphFactory
from apps.ncpoly.models import SQRT2, SQRT5, SQRT10, ExtScalar, NcPolynomial, canonical_word
from apps.ncpoly.serializers import SosIdentitySerializer, SosReportSerializer
from apps.ncpoly.services import ExpressionService, SosService

A0, A1 = NcPolynomial.letter(0, 0), NcPolynomial.letter(0, 1)
B0, B1 = NcPolynomial.letter(1, 0), NcPolynomial.letter(1, 1)
P3_CHSH_TEXT = "2 - (A0*B0 + A0*B1 + A1*B0 - A1*B1 + B0*C0 + B0*C1 + B1*C0 - B1*C1)/2"


# ===========================================================================
# Exact scalars
# ===========================================================================

class TestExtScalar:

    def test_products_of_roots(self):
        assert SQRT2 * SQRT5 == SQRT10
        assert SQRT10 * SQRT10 == ExtScalar(10)
        assert SQRT2 * SQRT10 == ExtScalar(c=2)

    def test_inverse(self):
        assert (1 + SQRT2).inverse() == SQRT2 - 1
        value = ExtScalar(3, Fraction(-1, 2), 2, Fraction(1, 7))
        assert value * value.inverse() == ExtScalar(1)
        assert ExtScalar(1) / SQRT10 == SQRT10 / 10

    def test_zero_has_no_inverse(self):
        with pytest.raises(ZeroDivisionError):
            ExtScalar().inverse()

    def test_float_embedding(self):
        assert float(SQRT10 * 2 + Fraction(1, 2)) == pytest.approx(2 * sqrt(10) + 0.5)

    def test_positivity(self):
        assert ExtScalar(-3, d=1).is_positive()
        assert not ExtScalar(-4, d=1).is_positive()

    def test_from_sympy(self):
        assert ExtScalar.from_sympy(sympy.sqrt(8) + sympy.Rational(1, 3)) == ExtScalar(Fraction(1, 3), 2)

    def test_from_sympy_outside_the_field(self):
        with pytest.raises(InputRangeError):
            ExtScalar.from_sympy(sympy.sqrt(3))

    def test_floats_are_not_exact(self):
        with pytest.raises(TypeError):
            ExtScalar.coerce(0.5)


# ===========================================================================
# Words and polynomials
# ===========================================================================

class TestNcPolynomial:

    def test_letters_are_involutions(self):
        assert A0 * A0 == 1

    def test_parties_commute(self):
        assert A0 * B1 == B1 * A0

    def test_same_party_does_not_commute(self):
        assert A0 * A1 != A1 * A0

    def test_canonical_form_cancels_across_parties(self):
        assert canonical_word(((1, 0), (0, 1), (0, 1), (1, 0))) == ()

    @pytest.mark.parametrize("word", [
        ((2, 1), (0, 0), (0, 1), (2, 1), (1, 0)),
        ((0, 0), (0, 1), (0, 0)),
        ((1, 1), (1, 1), (1, 0)),
    ])
    def test_canonical_form_is_idempotent(self, word):
        assert canonical_word(canonical_word(word)) == canonical_word(word)

    def test_reduction_order_does_not_matter(self):
        # reduce A0 A1 B0 A1 in two different ways
        left = (A0 * A1 * B0) * A1
        right = A0 * (A1 * (B0 * A1))
        assert left == right == A0 * B0

    def test_adjoint_reverses_words(self):
        assert (A0 * A1).adjoint() == A1 * A0
        assert (A0 * B0 + A1 * B1).is_hermitian()
        assert not (A0 * A1).is_hermitian()

    def test_zero_terms_are_dropped(self):
        assert len(A0 - A0) == 0
        assert (A0 - A0).is_zero()

    def test_negative_letter_rejected(self):
        with pytest.raises(InputRangeError):
            NcPolynomial.letter(-1, 0)


# ===========================================================================
# Expression parser
# ===========================================================================

class TestExpressionParser:

    def test_chsh_expression(self):
        poly = ExpressionService.parse_expression("2 - (A0*B0 + A0*B1 + A1*B0 - A1*B1)/2")
        assert poly.coefficient(()) == ExtScalar(2)
        assert poly.coefficient(((0, 1), (1, 1))) == ExtScalar(Fraction(1, 2))
        assert poly.coefficient(((0, 0), (1, 0))) == ExtScalar(Fraction(-1, 2))

    def test_word_order_is_canonicalised(self):
        assert ExpressionService.parse_expression("B0*A0") == A0 * B0

    def test_powers_reduce(self):
        assert ExpressionService.parse_expression("A0*A0 + A1**3") == 1 + A1

    def test_radicals(self):
        poly = ExpressionService.parse_expression("sqrt2*sqrt5*A0 + 1/sqrt10")
        assert poly.coefficient(((0, 0),)) == SQRT10
        assert poly.coefficient(()) == SQRT10 / 10

    def test_unicode_minus(self):
        assert ExpressionService.parse_expression("1 − A0") == 1 - A0

    @pytest.mark.parametrize("text", ["A0 $ B0", "G0 + 1", "sqrt3*A0", "(A0 + ", "A2"])
    def test_malformed_input(self, text):
        with pytest.raises(ParseError):
            ExpressionService.parse_expression(text)


# ===========================================================================
# Bell chains and SOS verification
# ===========================================================================

class TestBellChain:

    @pytest.mark.parametrize("name, terms", [("P3", 8), ("P4", 12), ("P6", 20)])
    def test_term_counts(self, name, terms):
        assert len(SosService.bell_chain(GraphFactory.named_graph(name))) == terms

    def test_chain_signs(self):
        chain = SosService.bell_chain([(0, 1)])
        assert chain.coefficient(((0, 1), (1, 1))) == ExtScalar(-1)
        assert chain == A0 * B0 + A0 * B1 + A1 * B0 - A1 * B1

    def test_three_settings_rejected(self):
        with pytest.raises(InputRangeError):
            SosService.bell_chain([(0, 1)], settings=3)

    def test_chain_multiple(self):
        mu, edges = SosService.chain_multiple(SosService.bell_chain([(0, 1), (1, 2)]) * Fraction(1, 3))
        assert mu == ExtScalar(Fraction(1, 3))
        assert edges == [(0, 1), (1, 2)]

    def test_not_a_chain(self):
        with pytest.raises(InputRangeError, match="not a multiple"):
            SosService.chain_multiple(A0 * B0 - A1 * B1)


class TestVerifySos:

    def test_p3_identity_is_exact(self):
        identity = SosService.identity("p3")
        verdict = SosService.verify_sos(identity["target"], identity["squares"])
        assert verdict.verdict == "exact"
        assert verdict.certified

    def test_p3_identity_matches_parsed_target(self):
        assert SosService.identity("p3")["target"] == ExpressionService.parse_expression(P3_CHSH_TEXT)

    def test_empty_identity(self):
        verdict = SosService.verify_sos(NcPolynomial(), [])
        assert verdict.exact_match

    def test_p4_identity_needs_weights(self):
        identity = SosService.identity("p4")
        verdict = SosService.verify_sos(identity["target"], identity["squares"])
        assert verdict.verdict == "weighted"
        assert verdict.weights == (
            ExtScalar(d=Fraction(1, 80)),
            ExtScalar(d=1),
            ExtScalar(d=Fraction(3, 40)),
            ExtScalar(d=Fraction(1, 15)),
        )
        assert verdict.certified

    def test_p4_main_identity_scales_the_weights(self):
        identity = SosService.identity("p4-main")
        verdict = SosService.verify_sos(identity["target"], identity["squares"])
        assert verdict.weights[1] == SQRT10 / 3

    def test_global_scale(self):
        identity = SosService.identity("p3")
        verdict = SosService.verify_sos(identity["target"] * 2, identity["squares"])
        assert verdict.verdict == "scaled"
        assert verdict.scale == ExtScalar(2)

    def test_rescaled_squares_are_exact(self):
        identity = SosService.identity("p3")
        squares = [s * SQRT2 for s in identity["squares"]]
        assert SosService.verify_sos(identity["target"] * 2, squares).exact_match

    def test_mismatch(self):
        verdict = SosService.verify_sos(SosService.identity("p3")["target"], [A0])
        assert verdict.verdict == "mismatch"
        assert not verdict.certified
        assert not verdict.residual.is_zero()

    def test_non_hermitian_square_is_noted(self):
        verdict = SosService.verify_sos(NcPolynomial.constant(1), [A0 * A1])
        assert verdict.exact_match
        assert len(verdict.notes) == 1

    def test_unknown_identity(self):
        with pytest.raises(ParseError):
            SosService.identity("p5")


class TestCertifiedBounds:

    def test_p3_bound_is_classical(self):
        identity = SosService.identity("p3")
        bound = SosService.certified_bound_from_sos(identity["squares"], identity["bell"], identity["constant"])
        assert bound == ExtScalar(Fraction(3, 4))

    @pytest.mark.parametrize("name", ["p4", "p4-main"])
    def test_p4_bound(self, name):
        identity = SosService.identity(name)
        bound = SosService.certified_bound_from_sos(identity["squares"], identity["bell"], identity["constant"])
        assert bound == ExtScalar(Fraction(1, 2), d=Fraction(1, 12))
        assert float(bound) == pytest.approx(0.5 + sqrt(10) / 12)

    def test_scaled_identity_gives_the_same_bound(self):
        identity = SosService.identity("p3")
        squares = [s * SQRT2 for s in identity["squares"]]
        bound = SosService.certified_bound_from_sos(squares, identity["bell"] * 2, identity["constant"] * 2)
        assert bound == ExtScalar(Fraction(3, 4))

    def test_unverified_identity_raises(self):
        identity = SosService.identity("p3")
        with pytest.raises(InputRangeError, match="not verified"):
            SosService.certified_bound_from_sos([A0], identity["bell"], identity["constant"])


# ===========================================================================
# Identity JSON
# ===========================================================================

class TestSosSerializers:

    def test_identity_from_json(self):
        identity = SosService.identity("p3")
        parsed = SosIdentitySerializer.to_identity({"target": P3_CHSH_TEXT, "squares": [
            "1/(2*sqrt2) * (A0*(B0 - B1) + C1*(B0 + B1) - 2*A0*C1)",
            "1/(2*sqrt2) * (A1*(B0 + B1) + C0*(B0 - B1) - 2*A1*C0)",
        ]})
        assert parsed["constant"] == ExtScalar(2)
        assert parsed["bell"] == identity["bell"]
        assert SosService.verify_sos(parsed["target"], parsed["squares"]).exact_match

    def test_empty_identity_is_valid(self):
        parsed = SosIdentitySerializer.to_identity({"target": "0", "squares": []})
        assert parsed["target"].is_zero()
        assert parsed["squares"] == []

    def test_missing_target(self):
        with pytest.raises(InputRangeError, match="Invalid identity JSON"):
            SosIdentitySerializer.to_identity({"squares": []})

    def test_report(self):
        identity = SosService.identity("p4")
        verdict = SosService.verify_sos(identity["target"], identity["squares"])
        bound = SosService.certified_bound_from_sos(identity["squares"], identity["bell"], identity["constant"])
        report = SosReportSerializer.from_verdict("p4", verdict, bound)
        assert report["verdict"] == "weighted"
        assert len(report["weights"]) == 4
        assert report["certified_bound_float"] == pytest.approx(0.5 + sqrt(10) / 12)
