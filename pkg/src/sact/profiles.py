"""Weight-frequency profiles under the symmetric-evidence assumption.

Instead of a fully specified model, a domain can be summarized by a frequency
distribution over evidence weights.  Imposing the symmetry
``p(E|H) = 1 - p(E|not-H)`` pins each item's probabilities from its weight
alone (``alpha`` is the logistic of the weight), and makes stronger evidence
also more likely to be observed, so subset selection reduces to ranking by
weight.  This module realizes such profiles into evidence lists and produces
fractional-loss-versus-n curves as tabular data.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Literal, Sequence

from .errors import CapExceededError, DomainError, FormatError
from .exact import DEFAULT_ENUMERATION_CAP, exact_ev_subset
from .gaussian import evidence_moments, gaussian_ev_subset
from .model import CostModel, DiagnosisModel, EvidenceVariable, UtilityTable
from .niv import Method

Normalization = Literal["relative-to-compute", "range-normalized"]

_ZERO_COSTS = CostModel(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0)


@dataclass(frozen=True)
class WeightProfile:
    """A named frequency distribution over strictly positive evidence weights.

    ``linear-decay`` profiles have density ``max(0, intercept - slope*w)`` on
    ``(0, w_max]`` and are realized by sampling ``count`` weights at the
    midpoint quantiles of the normalized density (deterministic, no RNG).
    ``explicit`` profiles list their weights directly.
    """

    name: str
    kind: Literal["linear-decay", "explicit"]
    intercept: float = 0.0
    slope: float = 0.0
    w_max: float = 0.0
    count: int = 0
    weights: tuple[float, ...] = ()

    @classmethod
    def linear_decay(
        cls, name: str, *, intercept: float, slope: float, w_max: float, count: int
    ) -> "WeightProfile":
        return cls(name=name, kind="linear-decay", intercept=intercept, slope=slope,
                   w_max=w_max, count=count)

    @classmethod
    def explicit(cls, name: str, weights: Sequence[float]) -> "WeightProfile":
        return cls(name=name, kind="explicit", weights=tuple(weights), count=len(weights))


# Shipped reconstructions of three uncertainty levels.  All three use the same
# triangular decay shape; only the weight scale differs ("high" uncertainty =
# weights nearest zero).  Scales are chosen so that each profile's fully
# compiled policy saturates decision quality: the loss curves then start from
# a common point and differ in how fast they decay, which keeps the
# high >= moderate >= low loss ordering meaningful at every n.
PRESETS: dict[str, WeightProfile] = {
    "high": WeightProfile.linear_decay(
        "high", intercept=1.0, slope=1.0 / 3.5, w_max=3.5, count=60
    ),
    "moderate": WeightProfile.linear_decay(
        "moderate", intercept=1.0, slope=1.0 / 4.5, w_max=4.5, count=60
    ),
    "low": WeightProfile.linear_decay(
        "low", intercept=1.0, slope=1.0 / 5.0, w_max=5.0, count=60
    ),
}


def profile_from_dict(data: object) -> WeightProfile:
    """Load a profile from its JSON object form: {name, kind, params...}."""
    if not isinstance(data, dict):
        raise FormatError("profile: expected an object")
    kind = data.get("kind")
    if kind == "linear-decay":
        expected = {"name", "kind", "intercept", "slope", "w_max", "count"}
        if set(data) != expected:
            raise FormatError(f"linear-decay profile keys must be exactly {sorted(expected)}")
        if not isinstance(data["name"], str):
            raise FormatError("profile.name: expected a string")
        if isinstance(data["count"], bool) or not isinstance(data["count"], int):
            raise FormatError("profile.count: expected an integer")
        numbers = {}
        for key in ("intercept", "slope", "w_max"):
            value = data[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise FormatError(f"profile.{key}: expected a number")
            numbers[key] = float(value)
        return WeightProfile.linear_decay(data["name"], count=data["count"], **numbers)
    if kind == "explicit":
        expected = {"name", "kind", "weights"}
        if set(data) != expected:
            raise FormatError(f"explicit profile keys must be exactly {sorted(expected)}")
        if not isinstance(data["name"], str):
            raise FormatError("profile.name: expected a string")
        if not isinstance(data["weights"], list):
            raise FormatError("profile.weights: expected an array")
        weights = []
        for i, value in enumerate(data["weights"]):
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise FormatError(f"profile.weights[{i}]: expected a number")
            weights.append(float(value))
        return WeightProfile.explicit(data["name"], weights)
    raise FormatError(f"profile.kind must be 'linear-decay' or 'explicit', got {kind!r}")


def _decay_weights(profile: WeightProfile) -> list[float]:
    a, b, w_max, m = profile.intercept, profile.slope, profile.w_max, profile.count
    if m < 1:
        raise DomainError("linear-decay profile needs count >= 1")
    if not (w_max > 0.0) or a < 0.0 or b < 0.0:
        raise DomainError("linear-decay profile needs w_max > 0, intercept >= 0, slope >= 0")
    support = min(w_max, a / b) if b > 0.0 else w_max
    total = a * support - 0.5 * b * support * support
    if not (total > 0.0):
        raise DomainError("profile density integrates to zero on (0, w_max]")
    weights = []
    for i in range(1, m + 1):
        q = (i - 0.5) / m
        if b == 0.0:
            weights.append(q * support)
        else:
            # Solve (a*w - b*w^2/2) / total = q for w on (0, support].
            discriminant = max(a * a - 2.0 * b * q * total, 0.0)
            weights.append((a - math.sqrt(discriminant)) / b)
    return weights


def realize_profile(profile: WeightProfile) -> list[EvidenceVariable]:
    """Turn a profile into concrete evidence variables under symmetry.

    Each weight w becomes an item with ``alpha = e^w / (1 + e^w)`` and
    ``beta = 1 - alpha``, so the true-branch weight is exactly w and the
    false-branch weight is -w.  Ids are sequential in sampling order and
    zero-padded so lexicographic order matches index order.
    """
    if profile.kind == "explicit":
        weights = list(profile.weights)
        if not weights:
            raise DomainError("explicit profile has no weights")
    else:
        weights = _decay_weights(profile)
    width = len(str(len(weights)))
    out = []
    for i, w in enumerate(weights, start=1):
        if not (w > 0.0) or math.isinf(w):
            raise DomainError(f"profile weight {w!r} must be strictly positive and finite")
        alpha = 1.0 / (1.0 + math.exp(-w))
        beta = 1.0 - alpha
        if not (0.0 < alpha < 1.0) or not (0.0 < beta < 1.0):
            raise DomainError(f"profile weight {w!r} is too large to realize as probabilities")
        out.append(EvidenceVariable(f"e{i:0{width}d}", alpha, beta))
    return out


def topn_subset(evidence: Sequence[EvidenceVariable], n: int) -> list[str]:
    """Ids of the n items with the largest true-branch weights (ties by id)."""
    if not (0 <= n <= len(evidence)):
        raise DomainError(f"n = {n} out of range for {len(evidence)} evidence items")
    ranked = sorted(evidence, key=lambda item: (-math.log(item.alpha / item.beta), item.id))
    return [item.id for item in ranked[:n]]


@dataclass(frozen=True)
class LossRow:
    n: int
    ev_compile: float
    ev_compute: float
    fractional_loss: float


@dataclass(frozen=True)
class LossCurve:
    profile: str
    normalization: Normalization
    method: Method
    rows: tuple[LossRow, ...] = ()


def loss_curve(
    profile: WeightProfile,
    p_h: float,
    utilities: UtilityTable,
    *,
    method: Method = "gaussian",
    normalization: Normalization = "relative-to-compute",
    enum_cap: int = DEFAULT_ENUMERATION_CAP,
) -> LossCurve:
    """Fractional loss of compiling the top-n items, for n = 0 .. m.

    The compute baseline is evaluated with the same method and the same
    item ordering as the n = m row, so the loss at full compilation is
    exactly zero.  ``relative-to-compute`` divides the EV gap by the compute
    EV (which must be positive); ``range-normalized`` divides by the gap at
    n = 0 (which must be positive).
    """
    realized = realize_profile(profile)
    model = DiagnosisModel(p_h, tuple(realized), utilities, _ZERO_COSTS)
    ranking = topn_subset(realized, len(realized))
    if method == "exact":
        if len(realized) > enum_cap:
            raise CapExceededError(
                f"profile has {len(realized)} items, above the enumeration cap of "
                f"{enum_cap}; use method='gaussian'"
            )
        values = [exact_ev_subset(model, ranking[:n], cap=enum_cap).ev
                  for n in range(len(ranking) + 1)]
    elif method == "gaussian":
        values = [gaussian_ev_subset(model, ranking[:n]).ev for n in range(len(ranking) + 1)]
    else:
        raise DomainError(f"unknown method {method!r}")
    ev_compute = values[-1]
    if normalization == "relative-to-compute":
        if not (ev_compute > 0.0):
            raise DomainError(
                f"relative-to-compute normalization needs ev_compute > 0, got {ev_compute!r}"
            )
        denominator = ev_compute
    elif normalization == "range-normalized":
        denominator = ev_compute - values[0]
        if not (denominator > 0.0):
            raise DomainError(
                "range-normalized normalization needs ev_compute > ev_compile at n = 0, "
                f"got a range of {denominator!r}"
            )
    else:
        raise DomainError(f"unknown normalization {normalization!r}")
    rows = tuple(
        LossRow(n, values[n], ev_compute, (ev_compute - values[n]) / denominator)
        for n in range(len(values))
    )
    return LossCurve(profile=profile.name, normalization=normalization, method=method, rows=rows)


def _format(value: float) -> str:
    return f"{value:.12g}"


def export_analysis(curves: Sequence[LossCurve]) -> str:
    """Deterministic CSV of loss curves: profile,n,ev_compile,ev_compute,fractional_loss."""
    if not curves:
        raise DomainError("no curves to export")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["profile", "n", "ev_compile", "ev_compute", "fractional_loss"])
    for curve in curves:
        for row in curve.rows:
            writer.writerow(
                [curve.profile, row.n, _format(row.ev_compile), _format(row.ev_compute),
                 _format(row.fractional_loss)]
            )
    return buffer.getvalue()


def export_moments(profiles: Sequence[WeightProfile]) -> str:
    """Companion CSV of summed-weight moments over the top-n items.

    Columns: profile,n,mean_h,var_h for n = 0 .. m, suitable for plotting the
    family of weight-sum distributions as compilation deepens.
    """
    if not profiles:
        raise DomainError("no profiles to export")
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["profile", "n", "mean_h", "var_h"])
    for profile in profiles:
        realized = {item.id: item for item in realize_profile(profile)}
        ranking = topn_subset(list(realized.values()), len(realized))
        mean_h = var_h = 0.0
        writer.writerow([profile.name, 0, _format(0.0), _format(0.0)])
        for n, evidence_id in enumerate(ranking, start=1):
            item = realized[evidence_id]
            moments = evidence_moments(item.alpha, item.beta)
            mean_h += moments.mean_h
            var_h += moments.var_h
            writer.writerow([profile.name, n, _format(mean_h), _format(var_h)])
    return buffer.getvalue()
