"""Ground-truth policy evaluation by exhaustive enumeration of evidence assignments.

Everything here enumerates all 2^n truth assignments of a chosen evidence
subset, so results are exact up to floating-point rounding.  The Gaussian
approximation and both compilers are tested against this module.

Index convention (shared with the table compiler): assignments are numbered
0 .. 2^n - 1 and bit i of the index, least significant first, is the truth
value of ``subset[i]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import CapExceededError, DomainError, UnknownEvidenceError
from .model import DiagnosisModel, EvidenceVariable, Side, threshold, weight_pair
from .niv import NivReport, TablePolicy, niv

DEFAULT_ENUMERATION_CAP = 25
DEFAULT_SEARCH_CAP = 15


@dataclass(frozen=True)
class ExactEvaluation:
    """Expected value and action probabilities of a committed policy.

    ``ev`` recomposes from the other fields as
    ``(p_act_given_h*u_h_d + (1-p_act_given_h)*u_h_nd) * p_h
    + (p_act_given_nh*u_nh_d + (1-p_act_given_nh)*u_nh_nd) * (1-p_h)``.
    """

    ev: float
    p_act_given_h: float
    p_act_given_nh: float
    enumerated_count: int


def resolve_subset(model: DiagnosisModel, subset: Sequence[str]) -> list[EvidenceVariable]:
    """Map subset ids to evidence variables, rejecting unknowns and duplicates."""
    lookup = model.evidence_map()
    seen: set[str] = set()
    out = []
    for evidence_id in subset:
        if evidence_id not in lookup:
            raise UnknownEvidenceError(f"unknown evidence id {evidence_id!r}")
        if evidence_id in seen:
            raise UnknownEvidenceError(f"duplicate evidence id {evidence_id!r} in subset")
        seen.add(evidence_id)
        out.append(lookup[evidence_id])
    return out


def assignment_arrays(
    model: DiagnosisModel, subset: Sequence[str], *, cap: int = DEFAULT_ENUMERATION_CAP
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-assignment weight sums and probabilities for a subset.

    Returns three arrays of length 2^n indexed by the assignment convention
    above: the summed evidence weight, the assignment probability given H,
    and the assignment probability given not-H.

    Entries are built by extending the arrays one evidence item at a time, so
    every entry is bit-identical to a sequential left-to-right accumulation
    over the subset; probabilities are running products in linear space.
    """
    items = resolve_subset(model, subset)
    if len(items) > cap:
        raise CapExceededError(
            f"subset of {len(items)} items exceeds the enumeration cap of {cap} "
            f"(would require 2^{len(items)} assignments)"
        )
    weights = np.zeros(1)
    p_given_h = np.ones(1)
    p_given_nh = np.ones(1)
    for item in items:
        pair = weight_pair(item.alpha, item.beta)
        weights = np.concatenate([weights + pair.w_neg, weights + pair.w_pos])
        p_given_h = np.concatenate([p_given_h * (1.0 - item.alpha), p_given_h * item.alpha])
        p_given_nh = np.concatenate([p_given_nh * (1.0 - item.beta), p_given_nh * item.beta])
    return weights, p_given_h, p_given_nh


def compose_ev(model: DiagnosisModel, p_act_given_h: float, p_act_given_nh: float) -> float:
    """Expected utility of acting with the given per-hypothesis probabilities."""
    u = model.utilities
    return (p_act_given_h * u.u_h_d + (1.0 - p_act_given_h) * u.u_h_nd) * model.p_h + (
        p_act_given_nh * u.u_nh_d + (1.0 - p_act_given_nh) * u.u_nh_nd
    ) * (1.0 - model.p_h)


def exact_ev_subset(
    model: DiagnosisModel, subset: Sequence[str], *, cap: int = DEFAULT_ENUMERATION_CAP
) -> ExactEvaluation:
    """Exact expected value of acting on a compiled evidence subset.

    Enumerates every assignment of the subset, decides each by the threshold
    rule, and accumulates the probability of acting under each hypothesis.
    """
    weights, p_given_h, p_given_nh = assignment_arrays(model, subset, cap=cap)
    thr = threshold(model.utilities, model.p_h)
    acts = weights >= thr.w_star
    p_act_h = float(p_given_h[acts].sum())
    p_act_nh = float(p_given_nh[acts].sum())
    return ExactEvaluation(
        ev=compose_ev(model, p_act_h, p_act_nh),
        p_act_given_h=p_act_h,
        p_act_given_nh=p_act_nh,
        enumerated_count=len(weights),
    )


def exact_ev_compute(model: DiagnosisModel, *, cap: int = DEFAULT_ENUMERATION_CAP) -> ExactEvaluation:
    """Exact expected value of the run-time compute policy (all evidence)."""
    return exact_ev_subset(model, [item.id for item in model.evidence], cap=cap)


def exact_tail(
    model: DiagnosisModel,
    subset: Sequence[str],
    w_star: float,
    given: Side,
    *,
    cap: int = DEFAULT_ENUMERATION_CAP,
) -> float:
    """Exact probability that the subset's weight sum reaches ``w_star``.

    The boundary is inclusive, matching the action convention.
    """
    if given not in ("H", "notH"):
        raise DomainError(f"given must be 'H' or 'notH', not {given!r}")
    weights, p_given_h, p_given_nh = assignment_arrays(model, subset, cap=cap)
    probabilities = p_given_h if given == "H" else p_given_nh
    return float(probabilities[weights >= w_star].sum())


def exhaustive_subset_search(
    model: DiagnosisModel,
    *,
    cap: int = DEFAULT_SEARCH_CAP,
    eval_cap: int = DEFAULT_ENUMERATION_CAP,
) -> tuple[tuple[str, ...], NivReport]:
    """Best evidence subset to compile, by net inferential value, over all 2^m subsets.

    Ties are broken toward the smaller subset, then lexicographically by the
    id tuple.  Candidate subsets keep the model's evidence order.
    """
    ids = [item.id for item in model.evidence]
    if len(ids) > cap:
        raise CapExceededError(
            f"model has {len(ids)} evidence items, above the exhaustive search cap of {cap}"
        )
    best_subset: tuple[str, ...] | None = None
    best_report: NivReport | None = None
    for mask in range(1 << len(ids)):
        subset = tuple(ids[i] for i in range(len(ids)) if (mask >> i) & 1)
        result = exact_ev_subset(model, subset, cap=eval_cap)
        report = niv(model, TablePolicy(subset), result.ev, method="exact")
        if (
            best_report is None
            or report.niv > best_report.niv
            or (
                report.niv == best_report.niv
                and (len(subset), subset) < (len(best_subset), best_subset)
            )
        ):
            best_subset = subset
            best_report = report
    assert best_subset is not None and best_report is not None
    return best_subset, best_report
