import re
from fractions import Fraction
from tokenize import TokenError

import structlog
import sympy
from sympy.parsing.sympy_parser import parse_expr, standard_transformations
from sympy.polys.matrices import DomainMatrix

from apps.core.exceptions import InputRangeError, ParseError
from apps.graphs.models import Graph
from apps.ncpoly.models import SQRT10, ExtScalar, NcPolynomial, SosVerdict

logger = structlog.get_logger(__name__)

CHSH_SIGNS = {(0, 0): 1, (0, 1): 1, (1, 0): 1, (1, 1): -1}
TOKEN = re.compile(r"\s*(?:(?P<letter>[A-F][01])|(?P<sqrt>sqrt(?:10|2|5))|(?P<int>\d+)|(?P<op>[-+*/()]))")
SCALARS = {"sqrt2": sympy.sqrt(2), "sqrt5": sympy.sqrt(5), "sqrt10": sympy.sqrt(10)}


class ExpressionService:
    """Text expressions <-> NcPolynomial."""

    @staticmethod
    def parse_expression(text: str) -> NcPolynomial:
        """
        Letters A0..F1, integers, p/q, sqrt2, sqrt5, sqrt10, + - * / and
        parentheses. Letters are noncommutative sympy symbols; the expanded
        expression is read term by term into canonical words.
        """
        text = text.replace("−", "-")
        position, letters = 0, set()
        while position < len(text.rstrip()):
            match = TOKEN.match(text, position)
            if not match:
                raise ParseError(f"Unexpected input at offset {position}: {text[position:position + 10]!r}")
            if match["letter"]:
                letters.add(match["letter"])
            position = match.end()

        local = dict(SCALARS)
        local.update({name: sympy.Symbol(name, commutative=False) for name in letters})
        try:
            expr = parse_expr(text, local_dict=local, transformations=standard_transformations)
        except (SyntaxError, TypeError, ZeroDivisionError, TokenError, sympy.SympifyError) as exc:
            raise ParseError(f"Cannot parse {text!r}: {exc}") from exc
        return ExpressionService.from_sympy(expr)

    @staticmethod
    def from_sympy(expr) -> NcPolynomial:
        terms: dict = {}
        for term in sympy.Add.make_args(sympy.expand(expr)):
            commutative, noncommutative = term.args_cnc()
            coeff = ExtScalar.from_sympy(sympy.Mul(*commutative))
            word = []
            for factor in noncommutative:
                base, power = factor.as_base_exp()
                if not isinstance(base, sympy.Symbol) or not power.is_Integer or power < 1:
                    raise ParseError(f"Unsupported factor {factor} in expression.")
                name = base.name
                word.extend([(ord(name[0]) - ord("A"), int(name[1:]))] * int(power))
            key = tuple(word)
            terms[key] = terms.get(key, ExtScalar()) + coeff
        return NcPolynomial(terms)


class SosService:
    """Bell chains, exact SOS verification and the shipped identities."""

    # ------------------------------------------------------------------
    # Bell operators
    # ------------------------------------------------------------------

    @staticmethod
    def chsh_operator(first: int, second: int, signs: dict | None = None) -> NcPolynomial:
        """sum_xy s_xy U_x V_y for parties (first, second)."""
        signs = CHSH_SIGNS if signs is None else signs
        return NcPolynomial(
            {((first, x), (second, y)): ExtScalar(sign) for (x, y), sign in signs.items()}
        )

    @staticmethod
    def bell_chain(edges, signs: dict | None = None, settings: int = 2) -> NcPolynomial:
        """Sum of CHSH operators over the edges of a graph (or an explicit edge list)."""
        if settings != 2:
            raise InputRangeError(f"CHSH chains need two settings per party, got {settings}.")
        if isinstance(edges, Graph):
            edges = edges.sorted_edges
        total = NcPolynomial()
        for u, v in edges:
            total = total + SosService.chsh_operator(u, v, signs)
        return total

    # ------------------------------------------------------------------
    # Verification
    # ------------------------------------------------------------------

    @staticmethod
    def _square(s: NcPolynomial) -> tuple[NcPolynomial, str | None]:
        if s.is_hermitian():
            return s * s, None
        return s.adjoint() * s, f"non-Hermitian square root replaced by s*s: {s}"

    @staticmethod
    def verify_sos(target: NcPolynomial, squares: list[NcPolynomial]) -> SosVerdict:
        """
        Exact check of target = sum s_i^2, then of target = lambda sum s_i^2,
        then of target = sum w_i s_i^2. Each found multiplier is re-verified
        in exact arithmetic before it is reported.
        """
        expanded, notes = [], []
        for s in squares:
            sq, note = SosService._square(s)
            expanded.append(sq)
            if note:
                notes.append(note)

        total = sum(expanded, NcPolynomial())
        residual = target - total
        if residual.is_zero():
            logger.info("sos_verified", verdict="exact", squares=len(squares))
            return SosVerdict(exact_match=True, residual=residual, notes=tuple(notes))

        scale = SosService._global_scale(target, total)
        if scale is not None:
            logger.info("sos_verified", verdict="scaled", scale=str(scale))
            return SosVerdict(exact_match=False, residual=residual, scale=scale, notes=tuple(notes))

        weights = SosService._square_weights(target, expanded)
        if weights is not None:
            logger.info("sos_verified", verdict="weighted", weights=[str(w) for w in weights])
            return SosVerdict(exact_match=False, residual=residual, weights=weights, notes=tuple(notes))

        logger.warning("sos_mismatch", residual_terms=len(residual))
        return SosVerdict(exact_match=False, residual=residual, notes=tuple(notes))

    @staticmethod
    def _global_scale(target: NcPolynomial, total: NcPolynomial) -> ExtScalar | None:
        if total.is_zero() or target.is_zero():
            return None
        word, coeff = next(iter(total.terms.items()))
        scale = target.coefficient(word) / coeff
        return scale if (target - total * scale).is_zero() else None

    @staticmethod
    def _square_weights(target: NcPolynomial, expanded: list[NcPolynomial]) -> tuple[ExtScalar, ...] | None:
        """Solve sum_i w_i [s_i^2]_w = [target]_w for every word w over Q(sqrt2, sqrt5)."""
        if not expanded:
            return None
        words = sorted(set(target.terms).union(*(sq.terms for sq in expanded)))
        rows = [
            [sq.coefficient(w).to_sympy() for sq in expanded] + [target.coefficient(w).to_sympy()]
            for w in words
        ]
        augmented = DomainMatrix.from_list_sympy(len(rows), len(expanded) + 1, rows, extension=True)
        reduced, pivots = augmented.rref()
        if len(expanded) in pivots:
            return None
        solution = reduced.to_Matrix()
        weights = [ExtScalar()] * len(expanded)
        for row, column in enumerate(pivots):
            weights[column] = ExtScalar.from_sympy(solution[row, len(expanded)])

        check = target - sum((sq * w for sq, w in zip(expanded, weights)), NcPolynomial())
        return tuple(weights) if check.is_zero() else None

    # ------------------------------------------------------------------
    # Certified bounds
    # ------------------------------------------------------------------

    @staticmethod
    def chain_multiple(bell: NcPolynomial) -> tuple[ExtScalar, list[tuple[int, int]]]:
        """Write bell = mu * bell_chain(E); returns (mu, E)."""
        edges = sorted({(word[0][0], word[1][0]) for word in bell.terms if len(word) == 2})
        if not edges:
            raise InputRangeError("Expression contains no two-party correlators.")
        chain = SosService.bell_chain(edges)
        word, coeff = next(iter(chain.terms.items()))
        mu = bell.coefficient(word) / coeff
        if mu.is_zero() or not (bell - chain * mu).is_zero():
            raise InputRangeError("Expression is not a multiple of a CHSH chain.")
        return mu, edges

    @staticmethod
    def certified_bound_from_sos(
        squares: list[NcPolynomial],
        bell: NcPolynomial,
        constant,
    ) -> ExtScalar:
        """
        From a verified identity constant - bell = sum w_i s_i^2 (w_i > 0) and
        bell = mu * sum_e B_e, the winning probability on the chain's graph is
        at most 1/2 + (constant / mu) / (8 |E|).
        """
        constant = ExtScalar.coerce(constant)
        verdict = SosService.verify_sos(NcPolynomial.constant(constant) - bell, squares)
        if not verdict.certified:
            raise InputRangeError(f"SOS identity not verified (verdict: {verdict.verdict}).")
        mu, edges = SosService.chain_multiple(bell)
        if not mu.is_positive():
            raise InputRangeError("The Bell chain enters with a non-positive multiplier.")
        bias = constant / mu
        return ExtScalar(Fraction(1, 2)) + bias / (8 * len(edges))

    # ------------------------------------------------------------------
    # Shipped identities
    # ------------------------------------------------------------------

    @staticmethod
    def identity(name: str) -> dict:
        """
        Named SOS identities as {"target", "bell", "constant", "squares"}:
          p3       2 - (B_AB + B_BC)/2 = Q1^2 + Q2^2
          p4       2 sqrt10 - (B_AB + B_BC + B_CD) with R1..R4
          p4-main  the same squares against (2 sqrt10 - (B_AB + B_BC + B_CD)) / 3
        """
        parse = ExpressionService.parse_expression
        if name == "p3":
            bell = SosService.bell_chain([(0, 1), (1, 2)]) * Fraction(1, 2)
            constant = ExtScalar(2)
            squares = [
                parse("1/(2*sqrt2) * (A0*(B0 - B1) + C1*(B0 + B1) - 2*A0*C1)"),
                parse("1/(2*sqrt2) * (A1*(B0 + B1) + C0*(B0 - B1) - 2*A1*C0)"),
            ]
        elif name in ("p4", "p4-main"):
            scale = Fraction(1) if name == "p4" else Fraction(1, 3)
            bell = SosService.bell_chain([(0, 1), (1, 2), (2, 3)]) * scale
            constant = SQRT10 * 2 * scale
            squares = [
                parse("C0*(B0 - B1) + C1*(B0 + B1) - 2*D0*(C0 + C1) + 2*D1*(C0 - C1)"),
                parse(
                    "1 - 1/(2*sqrt10) * (B0*(A0 + A1) + B1*(A0 - A1) + C0*(B0 + B1)"
                    " + C1*(B0 - B1) + D0*(C0 + C1) + D1*(C0 - C1))"
                ),
                parse(
                    "1/3 * (B0*(3*A0 - A1) + B1*(3*A0 + A1) - C0*(B0 + B1) + C1*(B0 - B1)"
                    " - D0*(C0 + C1) - D1*(C0 - C1))"
                ),
                parse(
                    "1/4 * (4*A1*(B0 - B1) + C0*(B0 + B1) - C1*(B0 - B1)"
                    " - 2*D0*(C0 + C1) - 2*D1*(C0 - C1))"
                ),
            ]
        else:
            raise ParseError(f"Unknown identity {name!r}; expected p3, p4 or p4-main.")
        return {
            "target": NcPolynomial.constant(constant) - bell,
            "bell": bell,
            "constant": constant,
            "squares": squares,
        }
