"""Binary diagnosis models: weight-of-evidence updating and act/no-act thresholds.

A model consists of a prior p(H), a list of conditionally independent binary
evidence variables with likelihoods p(E|H) and p(E|not-H), a 2x2 utility table
over (hypothesis, action), and cost constants used by the policy analysis.

Belief updating is done in odds form: observing evidence multiplies the prior
odds by the likelihood ratio, or equivalently adds the log-likelihood ratio
("weight of evidence") in log space.  The decision rule reduces to a single
threshold: act if and only if the summed weight reaches ``w_star``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Literal, Mapping

from .errors import DomainError, FormatError, UnknownEvidenceError


class Action(Enum):
    """The two possible prescriptions for a case."""

    ACT = "D"
    NO_ACT = "notD"

    def __str__(self) -> str:
        return self.value


# Which hypothesis a conditional quantity is taken under.
Side = Literal["H", "notH"]

# An observation assigns a truth value to each evidence id it covers.
Observation = Mapping[str, bool]


@dataclass(frozen=True)
class EvidenceVariable:
    """A binary finding with likelihoods under the hypothesis and its negation.

    ``alpha`` is p(E|H) and ``beta`` is p(E|not-H).  Both must lie strictly
    inside (0, 1) so that both log-likelihood weights are finite.
    """

    id: str
    alpha: float
    beta: float


@dataclass(frozen=True)
class UtilityTable:
    """Utilities of the four (hypothesis, action) outcomes.

    Acting must be strictly better than not acting when H holds
    (``u_h_d > u_h_nd``) and strictly worse when it does not
    (``u_nh_nd > u_nh_d``); together these keep the threshold probability
    strictly inside (0, 1).
    """

    u_h_d: float
    u_h_nd: float
    u_nh_d: float
    u_nh_nd: float


@dataclass(frozen=True)
class CostModel:
    """Linear processing/memory cost constants and the lifetime factor.

    k1, k2: run-time processing cost per evidence item when H is true / false.
    k3, k4: lookup processing cost per compiled item when H is true / false.
    k5:     memory cost per stored cell.
    k6:     cost of a tree node relative to an array cell.
    r:      converts one episode's expected value into a lifetime value.
    """

    k1: float
    k2: float
    k3: float
    k4: float
    k5: float
    k6: float
    r: float


@dataclass(frozen=True)
class DiagnosisModel:
    """The single input artifact: prior, evidence list, utilities, costs."""

    p_h: float
    evidence: tuple[EvidenceVariable, ...]
    utilities: UtilityTable
    costs: CostModel

    def evidence_map(self) -> dict[str, EvidenceVariable]:
        return {item.id: item for item in self.evidence}


@dataclass(frozen=True)
class WeightPair:
    """Log-likelihood weights of one evidence variable.

    ``w_pos = ln(alpha/beta)`` applies when the evidence is observed true,
    ``w_neg = ln((1-alpha)/(1-beta))`` when observed false.
    """

    w_pos: float
    w_neg: float


@dataclass(frozen=True)
class Threshold:
    """The act/don't-act boundary.

    ``p_star`` is the posterior probability of H at which acting and not
    acting have equal expected utility; ``w_star`` is the same boundary
    expressed as a required sum of evidence weights:
    ``w_star = ln(p_star/(1-p_star)) - ln(p_h/(1-p_h))``.
    """

    p_star: float
    w_star: float


@dataclass(frozen=True)
class Violation:
    """One invariant violation found by :func:`validate_model`."""

    code: str
    field: str
    message: str

    def to_dict(self) -> dict[str, str]:
        return {"code": self.code, "field": self.field, "message": self.message}


def _check_probability(value: float, field: str, code: str, out: list[Violation]) -> None:
    # NaN fails the chained comparison, so it is reported like any other
    # out-of-range value.
    if not (0.0 < value < 1.0):
        out.append(
            Violation(code, field, f"{field} = {value!r} is outside the open interval (0, 1)")
        )


def validate_model(model: DiagnosisModel) -> list[Violation]:
    """Check every model invariant and report violations as data.

    Returns an empty list for a valid model.  Violations carry a
    machine-readable ``code`` and the offending ``field``.
    """
    out: list[Violation] = []
    _check_probability(model.p_h, "p_h", "prior_out_of_range", out)

    seen: set[str] = set()
    for i, item in enumerate(model.evidence):
        if not item.id:
            out.append(
                Violation("empty_evidence_id", f"evidence[{i}].id", "evidence id must be nonempty")
            )
        elif item.id in seen:
            out.append(
                Violation(
                    "duplicate_evidence_id",
                    f"evidence[{i}].id",
                    f"evidence id {item.id!r} appears more than once",
                )
            )
        else:
            seen.add(item.id)
        _check_probability(item.alpha, f"evidence[{i}].alpha", "alpha_out_of_range", out)
        _check_probability(item.beta, f"evidence[{i}].beta", "beta_out_of_range", out)

    u = model.utilities
    if not (u.u_h_d > u.u_h_nd):
        out.append(
            Violation(
                "degenerate_utility_ordering",
                "utilities.u_h_d",
                "acting must be strictly better than not acting when H is true",
            )
        )
    if not (u.u_nh_nd > u.u_nh_d):
        out.append(
            Violation(
                "degenerate_utility_ordering",
                "utilities.u_nh_nd",
                "not acting must be strictly better than acting when H is false",
            )
        )

    c = model.costs
    for name in ("k1", "k2", "k3", "k4", "k5", "k6"):
        value = getattr(c, name)
        if not (value >= 0.0):
            out.append(
                Violation("negative_cost", f"costs.{name}", f"costs.{name} = {value!r} must be >= 0")
            )
    if not (c.r > 0.0):
        out.append(
            Violation("nonpositive_rate", "costs.r", f"costs.r = {c.r!r} must be > 0")
        )
    return out


def weight_pair(alpha: float, beta: float) -> WeightPair:
    """Log-likelihood weights for one evidence variable.

    w_pos = ln(alpha/beta);  w_neg = ln((1-alpha)/(1-beta)).
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha = {alpha!r} must lie strictly inside (0, 1)")
    if not (0.0 < beta < 1.0):
        raise DomainError(f"beta = {beta!r} must lie strictly inside (0, 1)")
    return WeightPair(math.log(alpha / beta), math.log((1.0 - alpha) / (1.0 - beta)))


def threshold(utilities: UtilityTable, p_h: float) -> Threshold:
    """Solve the indifference equation for the decision threshold.

    p_star solves
        p*·U(H,D) + (1-p*)·U(¬H,D) = p*·U(H,¬D) + (1-p*)·U(¬H,¬D)
    giving ``p_star = (u_nh_nd - u_nh_d) / ((u_h_d - u_h_nd) + (u_nh_nd - u_nh_d))``.
    ``w_star`` subtracts the prior log-odds so the rule can be applied to a
    plain sum of evidence weights.
    """
    gain_act = utilities.u_h_d - utilities.u_h_nd
    gain_wait = utilities.u_nh_nd - utilities.u_nh_d
    if not (gain_act > 0.0) or not (gain_wait > 0.0):
        raise DomainError(
            "degenerate utilities: need u_h_d > u_h_nd and u_nh_nd > u_nh_d "
            f"(got differences {gain_act!r} and {gain_wait!r})"
        )
    if not (0.0 < p_h < 1.0):
        raise DomainError(f"p_h = {p_h!r} must lie strictly inside (0, 1)")
    p_star = gain_wait / (gain_act + gain_wait)
    w_star = math.log(p_star / (1.0 - p_star)) - math.log(p_h / (1.0 - p_h))
    return Threshold(p_star, w_star)


def posterior_odds(model: DiagnosisModel, observation: Observation) -> float:
    """Posterior odds of H after multiplying in each observed likelihood ratio.

    The observation may cover any subset of the model's evidence.  Factors are
    multiplied in the observation's iteration order.
    """
    lookup = model.evidence_map()
    odds = model.p_h / (1.0 - model.p_h)
    for evidence_id, value in observation.items():
        try:
            item = lookup[evidence_id]
        except KeyError:
            raise UnknownEvidenceError(f"unknown evidence id {evidence_id!r}") from None
        if value:
            odds *= item.alpha / item.beta
        else:
            odds *= (1.0 - item.alpha) / (1.0 - item.beta)
    return odds


def optimal_action(weight_sum: float, thr: Threshold) -> Action:
    """Act if and only if the summed weight reaches the threshold.

    The boundary is inclusive (``>=``), applied as an exact floating
    comparison with no epsilon; every consumer in this package uses the same
    convention.
    """
    return Action.ACT if weight_sum >= thr.w_star else Action.NO_ACT


# ---------------------------------------------------------------------------
# Canonical JSON form.  This object layout is the file contract for the CLI.
# ---------------------------------------------------------------------------

_MODEL_KEYS = frozenset({"p_h", "evidence", "utilities", "costs"})
_EVIDENCE_KEYS = frozenset({"id", "alpha", "beta"})
_UTILITY_KEYS = frozenset({"u_h_d", "u_h_nd", "u_nh_d", "u_nh_nd"})
_COST_KEYS = frozenset({"k1", "k2", "k3", "k4", "k5", "k6", "r"})


def _require_keys(data: Mapping, expected: frozenset, where: str) -> None:
    if not isinstance(data, Mapping):
        raise FormatError(f"{where}: expected an object, got {type(data).__name__}")
    unknown = set(data) - expected
    if unknown:
        raise FormatError(f"{where}: unknown keys {sorted(unknown)}")
    missing = expected - set(data)
    if missing:
        raise FormatError(f"{where}: missing keys {sorted(missing)}")


def _number(value: object, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise FormatError(f"{where}: expected a number, got {type(value).__name__}")
    return float(value)


def model_from_dict(data: Mapping) -> DiagnosisModel:
    """Build a model from its canonical JSON object form.

    Structural problems (wrong types, unknown or missing keys) raise
    :class:`FormatError`; invariant checks are left to :func:`validate_model`.
    """
    _require_keys(data, _MODEL_KEYS, "model")
    raw_evidence = data["evidence"]
    if not isinstance(raw_evidence, list):
        raise FormatError("model.evidence: expected an array")
    evidence = []
    for i, entry in enumerate(raw_evidence):
        _require_keys(entry, _EVIDENCE_KEYS, f"evidence[{i}]")
        if not isinstance(entry["id"], str):
            raise FormatError(f"evidence[{i}].id: expected a string")
        evidence.append(
            EvidenceVariable(
                entry["id"],
                _number(entry["alpha"], f"evidence[{i}].alpha"),
                _number(entry["beta"], f"evidence[{i}].beta"),
            )
        )
    _require_keys(data["utilities"], _UTILITY_KEYS, "utilities")
    utilities = UtilityTable(**{k: _number(data["utilities"][k], f"utilities.{k}") for k in _UTILITY_KEYS})
    _require_keys(data["costs"], _COST_KEYS, "costs")
    costs = CostModel(**{k: _number(data["costs"][k], f"costs.{k}") for k in _COST_KEYS})
    return DiagnosisModel(_number(data["p_h"], "p_h"), tuple(evidence), utilities, costs)


def model_to_dict(model: DiagnosisModel) -> dict:
    return {
        "p_h": model.p_h,
        "evidence": [
            {"id": e.id, "alpha": e.alpha, "beta": e.beta} for e in model.evidence
        ],
        "utilities": {
            "u_h_d": model.utilities.u_h_d,
            "u_h_nd": model.utilities.u_h_nd,
            "u_nh_d": model.utilities.u_nh_d,
            "u_nh_nd": model.utilities.u_nh_nd,
        },
        "costs": {
            "k1": model.costs.k1,
            "k2": model.costs.k2,
            "k3": model.costs.k3,
            "k4": model.costs.k4,
            "k5": model.costs.k5,
            "k6": model.costs.k6,
            "r": model.costs.r,
        },
    }


def model_from_json(text: str) -> DiagnosisModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"model file is not valid JSON: {exc}") from None
    return model_from_dict(data)


def model_to_json(model: DiagnosisModel) -> str:
    return json.dumps(model_to_dict(model), indent=2, sort_keys=True) + "\n"


def model_digest(model: DiagnosisModel) -> bytes:
    """32-byte content hash of the model's canonical JSON form.

    Compiled artifacts embed this digest so stale tables and trees can be
    detected at load time.
    """
    canonical = json.dumps(model_to_dict(model), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).digest()
