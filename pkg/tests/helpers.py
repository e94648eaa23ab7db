"""Shared builders for the test suite."""

from __future__ import annotations

import random

from sact import (
    CostModel,
    DiagnosisModel,
    EvidenceVariable,
    Internal,
    Leaf,
    SituationActionTree,
    UtilityTable,
    model_digest,
    optimal_action,
    threshold,
    weight_pair,
)

ZERO_COSTS = CostModel(k1=0.0, k2=0.0, k3=0.0, k4=0.0, k5=0.0, k6=0.0, r=1.0)
UNIT_COSTS = CostModel(k1=1.0, k2=1.0, k3=1.0, k4=1.0, k5=1.0, k6=1.0, r=1.0)
SYMMETRIC_UTILITIES = UtilityTable(u_h_d=1.0, u_h_nd=0.0, u_nh_d=0.0, u_nh_nd=1.0)


def make_model(evidence_params, *, p_h=0.5, utilities=SYMMETRIC_UTILITIES, costs=ZERO_COSTS,
               ids=None):
    if ids is None:
        ids = [f"e{i + 1}" for i in range(len(evidence_params))]
    evidence = tuple(
        EvidenceVariable(ids[i], alpha, beta)
        for i, (alpha, beta) in enumerate(evidence_params)
    )
    return DiagnosisModel(p_h, evidence, utilities, costs)


def m1(**kwargs):
    """One strong evidence item (0.8, 0.2), even prior, symmetric utilities."""
    return make_model([(0.8, 0.2)], **kwargs)


def random_model(rng: random.Random, m: int, *, p_h=None, costs=None) -> DiagnosisModel:
    evidence = tuple(
        EvidenceVariable(f"e{i:02d}", rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95))
        for i in range(m)
    )
    if p_h is None:
        p_h = rng.uniform(0.1, 0.9)
    u_h_nd = rng.uniform(-5.0, 5.0)
    u_nh_d = rng.uniform(-5.0, 5.0)
    utilities = UtilityTable(
        u_h_d=u_h_nd + rng.uniform(0.1, 10.0),
        u_h_nd=u_h_nd,
        u_nh_d=u_nh_d,
        u_nh_nd=u_nh_d + rng.uniform(0.1, 10.0),
    )
    if costs is None:
        costs = CostModel(
            k1=rng.uniform(0.0, 2.0),
            k2=rng.uniform(0.0, 2.0),
            k3=rng.uniform(0.0, 2.0),
            k4=rng.uniform(0.0, 2.0),
            k5=rng.uniform(0.0, 2.0),
            k6=rng.uniform(0.0, 2.0),
            r=rng.uniform(0.2, 5.0),
        )
    return DiagnosisModel(p_h, evidence, utilities, costs)


def brute_force_evaluation(model: DiagnosisModel, subset):
    """Independent oracle: per-assignment Python loops, no shared kernel.

    Enumerates assignments in the package's index convention but recomputes
    every weight sum and probability product from scratch.
    """
    lookup = model.evidence_map()
    items = [lookup[evidence_id] for evidence_id in subset]
    thr = threshold(model.utilities, model.p_h)
    p_act_h = 0.0
    p_act_nh = 0.0
    for index in range(1 << len(items)):
        weight = 0.0
        p_h = 1.0
        p_nh = 1.0
        for i, item in enumerate(items):
            pair = weight_pair(item.alpha, item.beta)
            if (index >> i) & 1:
                weight += pair.w_pos
                p_h *= item.alpha
                p_nh *= item.beta
            else:
                weight += pair.w_neg
                p_h *= 1.0 - item.alpha
                p_nh *= 1.0 - item.beta
        if weight >= thr.w_star:
            p_act_h += p_h
            p_act_nh += p_nh
    u = model.utilities
    ev = (p_act_h * u.u_h_d + (1.0 - p_act_h) * u.u_h_nd) * model.p_h + (
        p_act_nh * u.u_nh_d + (1.0 - p_act_nh) * u.u_nh_nd
    ) * (1.0 - model.p_h)
    return ev, p_act_h, p_act_nh


def complete_tree(model: DiagnosisModel, subset) -> SituationActionTree:
    """Full depth-n tree over a subset, leaf actions by the threshold rule."""
    thr = threshold(model.utilities, model.p_h)
    lookup = model.evidence_map()

    def build(i: int, w_path: float):
        if i == len(subset):
            return Leaf(optimal_action(w_path, thr))
        item = lookup[subset[i]]
        pair = weight_pair(item.alpha, item.beta)
        return Internal(
            subset[i],
            build(i + 1, w_path + pair.w_pos),
            build(i + 1, w_path + pair.w_neg),
        )

    return SituationActionTree.from_root(build(0, 0.0), model_digest(model))


def example_action_tree() -> Internal:
    """The worked three-test tree: act if e7, else if e3 and e6."""
    from sact import Action

    return Internal(
        "e7",
        Leaf(Action.ACT),
        Internal(
            "e3",
            Internal("e6", Leaf(Action.ACT), Leaf(Action.NO_ACT)),
            Leaf(Action.NO_ACT),
        ),
    )
