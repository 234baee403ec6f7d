"""Independent reference implementations used to cross-check the package.

Everything here is written as a literal, naive transcription of the intended
behavior, with no shared code paths into briefmix itself.
"""
from __future__ import annotations

import itertools


def naive_scores(profile, ann, gate: str = "and"):
    """Six preference quantities computed straight from their definitions.

    Returns (emp_interest, emp_relevance, emp_pref, org_relevance,
    org_importance, org_pref).
    """
    own = profile.campus in ann.target_campuses
    int_bits = [1 if profile.interest.get(t, 0) else 0 for t in ann.topics]
    rel_bits = [1 if profile.relevance.get(t, 0) else 0 for t in ann.topics]

    if profile.cross_campus_interest == 0 and not own:
        ei = 0.0
    else:
        ei = sum(int_bits) / len(int_bits)

    if gate == "or":
        blocked = profile.cross_campus_relevance == 0 or not own
    else:
        blocked = profile.cross_campus_relevance == 0 and not own
    er = 0.0 if blocked else sum(rel_bits) / len(rel_bits)

    ep = (ei + er) / 2.0
    orel = 1.0 if (own and profile.job in ann.target_jobs) else 0.0
    oimp = (ann.importance - 1) / 3.0
    op = (orel + oimp) / 2.0
    return ei, er, ep, orel, oimp, op


def scoring_grid(topic_ids, campus_id, other_campus_id, job_id, other_job_id):
    """Yield (profile_kwargs, ann_kwargs) covering every combination of
    topic count 1..4, interest/relevance bit patterns, importance 1..4,
    campus/job membership, and both cross-campus bits."""
    for t in range(1, 5):
        topics = tuple(topic_ids[:t])
        for int_bits in itertools.product((0, 1), repeat=t):
            for rel_bits in itertools.product((0, 1), repeat=t):
                for importance in (1, 2, 3, 4):
                    for campus_in in (False, True):
                        for job_in in (False, True):
                            for ci in (0, 1):
                                for cr in (0, 1):
                                    profile = dict(
                                        id="e",
                                        campus=campus_id,
                                        job=job_id if job_in else other_job_id,
                                        interest=dict(zip(topics, int_bits)),
                                        relevance=dict(zip(topics, rel_bits)),
                                        cross_campus_interest=ci,
                                        cross_campus_relevance=cr,
                                    )
                                    ann = dict(
                                        importance=importance,
                                        target_jobs=frozenset({job_id}),
                                        target_campuses=frozenset(
                                            {campus_id if campus_in
                                             else other_campus_id}),
                                        topics=topics,
                                    )
                                    yield profile, ann


def zipper_reference(primary, secondary):
    """Alternate primary/secondary, skipping anything already taken; when
    one side runs out, the untaken remainder of the other follows in order."""
    out = []
    taken = set()
    lists = [list(primary), list(secondary)]
    pos = [0, 0]
    turn = 0
    while True:
        lst, p = lists[turn], pos[turn]
        while p < len(lst) and lst[p] in taken:
            p += 1
        if p < len(lst):
            out.append(lst[p])
            taken.add(lst[p])
            pos[turn] = p + 1
            turn = 1 - turn
            continue
        pos[turn] = p
        other = lists[1 - turn]
        for item in other[pos[1 - turn]:]:
            if item not in taken:
                out.append(item)
                taken.add(item)
        break
    return out


def holm_reference(pvals):
    """Step-down Holm adjustment, the slow obvious way."""
    m = len(pvals)
    order = sorted(range(m), key=lambda i: pvals[i])
    adjusted = [0.0] * m
    running = 0.0
    for rank, idx in enumerate(order):
        candidate = min(1.0, (m - rank) * pvals[idx])
        running = max(running, candidate)
        adjusted[idx] = running
    return adjusted
