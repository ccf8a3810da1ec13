"""Confirmation measures for weighing evidence against claims.

A confirmation measure quantifies how much a piece of evidence E raises
(or lowers) support for a claim C, as a function of elicited subjective
probabilities.  Sign convention throughout: positive means confirmation,
zero means irrelevance, negative means disconfirmation.

Four ratio/difference measures are provided:

* ``keynes``    -- log of posterior over prior, log(P(C|E) / P(C))
* ``l_keynes``  -- likelihood variant, log(P(E|C) / P(E))
* ``good``      -- discrimination against the counterclaim,
                   log(P(E|C) / P(E|~C)), equal to the log odds-ratio
* ``carnap``    -- P(C&E) - P(C)*P(E) (no logarithm)

Zero posteriors or likelihoods are legitimate expert judgments, so the
logarithmic measures return a signed infinity sentinel rather than raising.
Undefined denominators (e.g. a zero prior) raise :class:`DomainError`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from enum import Enum
from typing import Optional, Union

DEFAULT_BASE = 10.0

#: Slack used when checking coherence constraints between probabilities that
#: were themselves derived by floating-point arithmetic.
_COHERENCE_SLACK = 1e-12


class DomainError(ValueError):
    """An input lies outside the domain on which a measure is defined."""


class Level(str, Enum):
    """Qualitative elicitation scale for expert probability judgments."""

    CERTAIN = "certain"
    VERY_CONFIDENT = "very_confident"
    CONFIDENT = "confident"
    NEUTRAL = "neutral"
    SURPRISED = "surprised"
    VERY_SURPRISED = "very_surprised"


#: Representative numerical assignment for each qualitative level.
LEVEL_PROBABILITY = {
    Level.CERTAIN: 1.0,
    Level.VERY_CONFIDENT: 0.99,
    Level.CONFIDENT: 0.9,
    Level.NEUTRAL: 0.5,
    Level.SURPRISED: 0.1,
    Level.VERY_SURPRISED: 0.01,
}

#: An elicited judgment is either a numeric probability or a qualitative
#: level; the distinction is preserved so serialization can round-trip it.
Judgment = Union[float, Level]


def qualitative_to_probability(level: Level) -> float:
    """Map a qualitative level to its fixed numeric probability."""
    try:
        return LEVEL_PROBABILITY[Level(level)]
    except (KeyError, ValueError):
        raise DomainError(f"unknown qualitative level: {level!r}") from None


def judgment_value(j: Judgment) -> float:
    """Numeric value of a judgment (identity for numbers)."""
    if isinstance(j, Level):
        return LEVEL_PROBABILITY[j]
    return float(j)


@dataclass(frozen=True)
class Elicitation:
    """Expert probability judgments on one claim/evidence pair.

    All entries are optional; measures are computed from whichever
    subsets are present.  Symbols: prior P(C), posterior P(C|E),
    likelihood P(E|C), likelihood_not P(E|~C), marginal P(E).
    """

    prior: Optional[Judgment] = None
    posterior: Optional[Judgment] = None
    likelihood: Optional[Judgment] = None
    likelihood_not: Optional[Judgment] = None
    marginal: Optional[Judgment] = None

    ENTRY_NAMES = ("prior", "posterior", "likelihood", "likelihood_not", "marginal")

    def entries(self) -> dict:
        """Present entries as a name -> judgment mapping."""
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            if v is not None:
                out[f.name] = v
        return out

    def value(self, name: str) -> Optional[float]:
        """Numeric value of the named entry, or None if absent."""
        v = getattr(self, name)
        return None if v is None else judgment_value(v)

    def is_empty(self) -> bool:
        return not self.entries()


@dataclass(frozen=True)
class MeasureResult:
    """A computed confirmation measure.

    ``value`` may be ``+inf``/``-inf``: these are sentinels for judgments
    involving certainty (e.g. evidence impossible under the claim), not
    arithmetic failures.  ``base`` is None for measures with no logarithm.
    """

    measure: str
    value: float
    base: Optional[float] = DEFAULT_BASE


def _check_prob(name: str, value: float, positive: bool = False) -> float:
    value = float(value)
    if math.isnan(value) or not 0.0 <= value <= 1.0:
        raise DomainError(f"{name} must be a probability in [0,1], got {value!r}")
    if positive and value == 0.0:
        raise DomainError(f"{name} must be nonzero (measure undefined at 0)")
    return value


def _check_base(base: float) -> float:
    base = float(base)
    if not base > 1.0:
        raise DomainError(f"log base must be > 1, got {base!r}")
    return base


def _log_ratio(numerator: float, denominator: float, base: float) -> float:
    # denominator validated nonzero by callers
    if numerator == 0.0:
        return -math.inf
    return math.log(numerator / denominator, base)


def keynes(prior: float, posterior: float, base: float = DEFAULT_BASE) -> MeasureResult:
    """Keynes' measure: log_base(P(C|E) / P(C)).

    Raises DomainError for a zero prior (the ratio is undefined); a zero
    posterior yields the -inf sentinel.
    """
    base = _check_base(base)
    prior = _check_prob("prior", prior, positive=True)
    posterior = _check_prob("posterior", posterior)
    return MeasureResult("keynes", _log_ratio(posterior, prior, base), base)


def l_keynes(likelihood: float, marginal: float, base: float = DEFAULT_BASE) -> MeasureResult:
    """Likelihood variant of Keynes' measure: log_base(P(E|C) / P(E)).

    By Bayes' theorem this equals ``keynes`` on any coherent set of
    judgments, which is the basis of the cross-check below.
    """
    base = _check_base(base)
    marginal = _check_prob("marginal", marginal, positive=True)
    likelihood = _check_prob("likelihood", likelihood)
    return MeasureResult("l_keynes", _log_ratio(likelihood, marginal, base), base)


def good(likelihood: float, likelihood_not: float, base: float = DEFAULT_BASE) -> MeasureResult:
    """Good's measure: log_base(P(E|C) / P(E|~C)), the log odds-ratio."""
    base = _check_base(base)
    likelihood_not = _check_prob("likelihood_not", likelihood_not, positive=True)
    likelihood = _check_prob("likelihood", likelihood)
    return MeasureResult("good", _log_ratio(likelihood, likelihood_not, base), base)


def carnap(p_joint: float, prior: float, marginal: float) -> MeasureResult:
    """Carnap's measure: P(C&E) - P(C)*P(E).  No logarithm, no base.

    Unlike the other measures this depends nontrivially on P(E) and can be
    manipulated by irrelevant evidence, so it is reported but never counted
    toward acceptance gates.
    """
    p_joint = _check_prob("p_joint", p_joint)
    prior = _check_prob("prior", prior)
    marginal = _check_prob("marginal", marginal)
    if p_joint > min(prior, marginal) + _COHERENCE_SLACK:
        raise DomainError(
            f"incoherent inputs: P(C&E)={p_joint} exceeds min(P(C), P(E))={min(prior, marginal)}"
        )
    return MeasureResult("carnap", p_joint - prior * marginal, base=None)


def diversity_boost(
    p_e2_given_c_e1: float, p_e2_given_e1: float, base: float = DEFAULT_BASE
) -> float:
    """Boost to Keynes' measure from adding evidence E2 after E1.

    Computes log_base(P(E2|C&E1) / P(E2|E1)): the gain is largest when E2
    would be surprising given E1 alone but not given the claim as well,
    i.e. when E2 is diverse from E1.  Zero means E2 adds nothing.
    """
    base = _check_base(base)
    if p_e2_given_e1 == 0.0:
        raise DomainError("P(E2|E1) must be nonzero")
    p_e2_given_e1 = _check_prob("p_e2_given_e1", p_e2_given_e1)
    p_e2_given_c_e1 = _check_prob("p_e2_given_c_e1", p_e2_given_c_e1)
    return _log_ratio(p_e2_given_c_e1, p_e2_given_e1, base)


def available_measures(e: Elicitation, base: float = DEFAULT_BASE) -> list[MeasureResult]:
    """All measures computable from the elicited subsets, in fixed order.

    Measures whose inputs are present but outside their domain (e.g. zero
    prior) are skipped rather than raised: partially incoherent judgments
    are reported by :func:`cross_check`, not here.
    """
    prior = e.value("prior")
    posterior = e.value("posterior")
    likelihood = e.value("likelihood")
    likelihood_not = e.value("likelihood_not")
    marginal = e.value("marginal")

    out: list[MeasureResult] = []
    if prior is not None and posterior is not None and prior > 0.0:
        out.append(keynes(prior, posterior, base))
    if likelihood is not None and marginal is not None and marginal > 0.0:
        out.append(l_keynes(likelihood, marginal, base))
    if likelihood is not None and likelihood_not is not None and likelihood_not > 0.0:
        out.append(good(likelihood, likelihood_not, base))
    if prior is not None and marginal is not None:
        p_joint = None
        if posterior is not None:
            p_joint = posterior * marginal
        elif likelihood is not None:
            p_joint = likelihood * prior
        if p_joint is not None:
            try:
                out.append(carnap(p_joint, prior, marginal))
            except DomainError:
                pass
    return out


@dataclass(frozen=True)
class ConsistencyFinding:
    """A detected inconsistency among elicited judgments."""

    code: str  # measure-mismatch | bayes-violation | total-probability-violation
    message: str
    delta: float


def cross_check(e: Elicitation, tolerance: float = 1e-6) -> list[ConsistencyFinding]:
    """Flag elicited judgments that are mutually inconsistent.

    Three checks run, each only when its inputs are present:

    * Keynes vs L-Keynes must agree (they are equal under Bayes' theorem).
    * Bayes product rule: P(C|E) * P(E) = P(E|C) * P(C).
    * Total probability: P(E) = P(E|C) * P(C) + P(E|~C) * (1 - P(C)).

    Findings are feedback for the assessor; nothing is auto-corrected.
    """
    prior = e.value("prior")
    posterior = e.value("posterior")
    likelihood = e.value("likelihood")
    likelihood_not = e.value("likelihood_not")
    marginal = e.value("marginal")

    findings: list[ConsistencyFinding] = []

    if None not in (prior, posterior, likelihood, marginal) and prior > 0.0 and marginal > 0.0:
        k = keynes(prior, posterior).value
        lk = l_keynes(likelihood, marginal).value
        if math.isinf(k) or math.isinf(lk):
            mismatch, delta = k != lk, math.inf if k != lk else 0.0
        else:
            delta = abs(k - lk)
            mismatch = delta > tolerance
        if mismatch:
            findings.append(
                ConsistencyFinding(
                    "measure-mismatch",
                    f"keynes={k:.6g} and l_keynes={lk:.6g} disagree; "
                    "by Bayes' theorem they must be equal",
                    delta,
                )
            )

    if None not in (prior, posterior, likelihood, marginal):
        lhs = posterior * marginal
        rhs = likelihood * prior
        if abs(lhs - rhs) > tolerance:
            findings.append(
                ConsistencyFinding(
                    "bayes-violation",
                    f"P(C|E)*P(E)={lhs:.6g} but P(E|C)*P(C)={rhs:.6g}",
                    abs(lhs - rhs),
                )
            )

    if None not in (prior, likelihood, likelihood_not, marginal):
        expected = likelihood * prior + likelihood_not * (1.0 - prior)
        if abs(marginal - expected) > tolerance:
            findings.append(
                ConsistencyFinding(
                    "total-probability-violation",
                    f"P(E)={marginal:.6g} but P(E|C)P(C)+P(E|~C)(1-P(C))={expected:.6g}",
                    abs(marginal - expected),
                )
            )

    return findings
