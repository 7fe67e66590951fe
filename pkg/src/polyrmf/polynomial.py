"""Exact integer polynomials and their admissibility classification.

Everything here is exact: evaluation uses arbitrary-precision integers,
and all structural checks (pure-power form, rational roots, symmetry
centers) are decided in rational arithmetic with no floating point.

The three structural questions answered by :func:`classify` are

* is P(x) = w*(x+c)^d for an integer w and rational c?  (the degenerate
  form for which normalized partial sums of f(P(n)) collapse),
* does P factor into linear factors over the rationals?
* is there a rational beta with P(beta - x) = P(x)?  ("generalized even"
  polynomials, which carry an enlarged family of trivial product
  coincidences P(x) = P(beta - x)).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd, isqrt


@dataclass(frozen=True)
class IntPolynomial:
    """Univariate polynomial with exact integer coefficients.

    ``coeffs`` is ordered lowest degree first, so ``coeffs[k]`` multiplies
    x^k.  The leading coefficient must be nonzero and the degree at least 1.
    """

    coeffs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))
        if len(self.coeffs) < 2:
            raise ValueError("polynomial degree must be at least 1")
        if self.coeffs[-1] == 0:
            raise ValueError("leading coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, n: int) -> int:
        """Exact value at an integer via Horner's scheme."""
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * n + c
        return acc

    def eval_fraction(self, x: Fraction) -> Fraction:
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def to_coeff_text(self) -> str:
        return ",".join(str(c) for c in self.coeffs)

    def __str__(self) -> str:
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coeffs[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                x = "x" if k == 1 else f"x^{k}"
                body = x if mag == 1 else f"{mag}{x}"
            terms.append((sign, body))
        if not terms:
            return "0"
        first_sign, first_body = terms[0]
        out = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out


_TERM_RE = re.compile(r"^([+-]?)(\d+)?(?:\*)?(x(?:\^(\d+))?)?$")


def parse_polynomial(text: str) -> IntPolynomial:
    """Parse either coefficient form "c0,c1,...,cd" or human form "x^2+1".

    The coefficient form lists exact integers lowest degree first.  The
    human form accepts terms like ``2x^3``, ``-x``, ``+5`` with optional
    ``*`` between coefficient and variable; ``**`` is accepted for ``^``.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial text")
    if "," in s:
        try:
            coeffs = [int(tok.strip()) for tok in s.split(",")]
        except ValueError as exc:
            raise ValueError(f"bad coefficient list {text!r}") from exc
        return IntPolynomial(tuple(coeffs))

    compact = s.replace("**", "^").replace(" ", "")
    if not compact:
        raise ValueError("empty polynomial text")
    chunks = re.findall(r"[+-]?[^+-]+", compact)
    if "".join(chunks) != compact:
        raise ValueError(f"cannot parse polynomial {text!r}")
    powers: dict[int, int] = {}
    for chunk in chunks:
        m = _TERM_RE.match(chunk)
        if not m or (m.group(2) is None and m.group(3) is None):
            raise ValueError(f"cannot parse term {chunk!r} in {text!r}")
        sign = -1 if m.group(1) == "-" else 1
        coeff = int(m.group(2)) if m.group(2) is not None else 1
        if m.group(3) is None:
            power = 0
        elif m.group(4) is not None:
            power = int(m.group(4))
        else:
            power = 1
        powers[power] = powers.get(power, 0) + sign * coeff
    deg = max(powers)
    coeffs = [powers.get(k, 0) for k in range(deg + 1)]
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return IntPolynomial(tuple(coeffs))


@dataclass(frozen=True)
class PurePowerWitness:
    w: int
    c: Fraction


@dataclass(frozen=True)
class PolynomialClass:
    """Structural classification of an integer polynomial.

    ``rational_roots`` holds (root, multiplicity) pairs sorted by root;
    ``is_product_of_linear_factors`` is true when the multiplicities sum
    to the degree.  ``clt_admissible`` requires degree >= 2 and not being
    of the pure-power form w*(x+c)^d; ``fluct_admissible`` requires degree
    >= 2 and not splitting into rational linear factors.
    """

    degree: int
    is_pure_power: bool
    pure_power_witness: PurePowerWitness | None
    rational_roots: tuple[tuple[Fraction, int], ...]
    is_product_of_linear_factors: bool
    generalized_even_center: Fraction | None
    clt_admissible: bool
    fluct_admissible: bool


def compose_linear(p: IntPolynomial, alpha: Fraction, beta: Fraction) -> list[Fraction]:
    """Coefficients of P(alpha*x + beta), lowest degree first, exact."""
    acc = [Fraction(0)]
    for c in reversed(p.coeffs):
        # acc <- acc * (alpha*x + beta) + c
        shifted = [Fraction(0)] + [a * alpha for a in acc]
        for i, a in enumerate(acc):
            shifted[i] += a * beta
        shifted[0] += c
        while len(shifted) > 1 and shifted[-1] == 0:
            shifted.pop()
        acc = shifted
    return acc


def shifted_even_check(p: IntPolynomial, beta: Fraction | int) -> bool:
    """True iff P(beta - x) - P(x) is identically zero, exactly."""
    beta = Fraction(beta)
    reflected = compose_linear(p, Fraction(-1), beta)
    direct = [Fraction(c) for c in p.coeffs]
    return reflected == direct


def pure_power_witness(p: IntPolynomial) -> PurePowerWitness | None:
    """Witness (w, c) with P(x) = w*(x+c)^d, if one exists.

    Matching leading coefficients forces w = coeffs[d] (an integer), and
    the x^(d-1) coefficient then forces c = coeffs[d-1] / (d*w); the single
    candidate is confirmed by exact expansion.
    """
    d = p.degree
    w = p.coeffs[d]
    c = Fraction(p.coeffs[d - 1], d * w)
    for k in range(d + 1):
        if Fraction(p.coeffs[k]) != w * comb(d, k) * c ** (d - k):
            return None
    return PurePowerWitness(w=w, c=c)


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    for i in range(1, isqrt(n) + 1):
        if n % i == 0:
            out.append(i)
            if i != n // i:
                out.append(n // i)
    return sorted(out)


def _deflate(coeffs: list[Fraction], root: Fraction) -> list[Fraction]:
    """Exact synthetic division by (x - root); assumes root is a root."""
    out: list[Fraction] = [Fraction(0)] * (len(coeffs) - 1)
    acc = Fraction(0)
    for k in range(len(coeffs) - 1, 0, -1):
        acc = coeffs[k] + acc * root
        out[k - 1] = acc
    return out


def rational_roots(p: IntPolynomial) -> list[tuple[Fraction, int]]:
    """All rational roots with multiplicities, via the rational root theorem.

    Roots at zero are stripped first; remaining candidates are +-num/den
    with num dividing the trailing and den dividing the leading integer
    coefficient, each confirmed and deflated in exact rational arithmetic.
    """
    work = [Fraction(c) for c in p.coeffs]
    roots: dict[Fraction, int] = {}
    zero_mult = 0
    while work[0] == 0 and len(work) > 1:
        work = work[1:]
        zero_mult += 1
    if zero_mult:
        roots[Fraction(0)] = zero_mult
    if len(work) > 1:
        # clear denominators (all integer here, but stay general)
        den_lcm = 1
        for c in work:
            den_lcm = den_lcm * c.denominator // gcd(den_lcm, c.denominator)
        ints = [int(c * den_lcm) for c in work]
        trailing, leading = ints[0], ints[-1]
        candidates = []
        for num in _divisors(trailing):
            for den in _divisors(leading):
                if gcd(num, den) == 1:
                    candidates.append(Fraction(num, den))
                    candidates.append(Fraction(-num, den))
        for cand in sorted(set(candidates)):
            while len(work) > 1 and _eval_fracs(work, cand) == 0:
                work = _deflate(work, cand)
                roots[cand] = roots.get(cand, 0) + 1
    return sorted(roots.items())


def _eval_fracs(coeffs: list[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def generalized_even_center(p: IntPolynomial) -> Fraction | None:
    """The unique rational beta with P(beta - x) = P(x), when it exists.

    Odd degrees admit no such symmetry (the leading term flips sign); for
    even degree the x^(d-1) coefficient forces beta = -2*a_{d-1}/(d*a_d).
    """
    d = p.degree
    if d % 2 == 1:
        return None
    beta = Fraction(-2 * p.coeffs[d - 1], d * p.coeffs[d])
    return beta if shifted_even_check(p, beta) else None


def classify(p: IntPolynomial) -> PolynomialClass:
    witness = pure_power_witness(p)
    roots = tuple(rational_roots(p))
    total_mult = sum(m for _, m in roots)
    is_linear_product = total_mult == p.degree
    center = generalized_even_center(p)
    d = p.degree
    return PolynomialClass(
        degree=d,
        is_pure_power=witness is not None,
        pure_power_witness=witness,
        rational_roots=roots,
        is_product_of_linear_factors=is_linear_product,
        generalized_even_center=center,
        clt_admissible=(d >= 2 and witness is None),
        fluct_admissible=(d >= 2 and not is_linear_product),
    )
