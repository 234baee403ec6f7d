"""Two-stakeholder preference scores for messages.

Employee-side scores come from the preference survey bits averaged over a
message's topics, gated by campus targeting and the employee's appetite for
other campuses' news. Organization-side scores come from the editor's
annotation: audience targeting and a 1-4 importance rating. Both sides also
get a combined score that is the plain midpoint of their two components.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .catalog import load_topic_catalog
from .model import (Draft, EmployeeProfile, MessageAnnotation, UnknownTopic,
                    ValidationIssue)

__all__ = [
    "ScoringOptions",
    "PreferenceScore",
    "ScoreMatrix",
    "emp_interest",
    "emp_relevance",
    "emp_pref",
    "org_relevance",
    "org_importance",
    "org_pref",
    "score_message",
    "score_matrix",
]

_REGULAR_TOPIC_IDS = frozenset(
    t.id for t in load_topic_catalog() if not t.special)

SCORE_FIELDS = ("emp_interest", "emp_relevance", "emp_pref",
                "org_relevance", "org_importance", "org_pref")


@dataclass(frozen=True)
class ScoringOptions:
    # connective of the relevance zero-branch; "or" zeroes relevance whenever
    # the employee's cross-campus bit is off, even for own-campus messages
    cross_campus_gate: str = "and"

    def __post_init__(self):
        if self.cross_campus_gate not in ("and", "or"):
            raise ValueError("cross_campus_gate must be 'and' or 'or'")


DEFAULT_OPTIONS = ScoringOptions()


@dataclass(frozen=True)
class PreferenceScore:
    emp_interest: float
    emp_relevance: float
    emp_pref: float
    org_relevance: float
    org_importance: float
    org_pref: float


def _check_topics(ann: MessageAnnotation) -> None:
    for t in ann.topics:
        if t not in _REGULAR_TOPIC_IDS:
            raise UnknownTopic([ValidationIssue(
                "topics", UnknownTopic.code, f"unknown topic {t!r}")])


def _topic_mean(bits: dict, topics: tuple[str, ...]) -> float:
    return sum(1 if bits.get(t, 0) else 0 for t in topics) / len(topics)


def emp_interest(profile: EmployeeProfile, ann: MessageAnnotation,
                 options: ScoringOptions = DEFAULT_OPTIONS) -> float:
    _check_topics(ann)
    own = profile.campus in ann.target_campuses
    if profile.cross_campus_interest == 0 and not own:
        return 0.0
    return _topic_mean(profile.interest, ann.topics)


def emp_relevance(profile: EmployeeProfile, ann: MessageAnnotation,
                  options: ScoringOptions = DEFAULT_OPTIONS) -> float:
    _check_topics(ann)
    own = profile.campus in ann.target_campuses
    off = profile.cross_campus_relevance == 0
    blocked = (off or not own) if options.cross_campus_gate == "or" \
        else (off and not own)
    if blocked:
        return 0.0
    return _topic_mean(profile.relevance, ann.topics)


def emp_pref(profile: EmployeeProfile, ann: MessageAnnotation,
             options: ScoringOptions = DEFAULT_OPTIONS) -> float:
    return (emp_interest(profile, ann, options)
            + emp_relevance(profile, ann, options)) / 2.0


def org_relevance(profile: EmployeeProfile, ann: MessageAnnotation) -> float:
    on_campus = profile.campus in ann.target_campuses
    on_job = profile.job in ann.target_jobs
    return 1.0 if (on_campus and on_job) else 0.0


def org_importance(ann: MessageAnnotation) -> float:
    return (ann.importance - 1) / 3.0


def org_pref(profile: EmployeeProfile, ann: MessageAnnotation) -> float:
    return (org_relevance(profile, ann) + org_importance(ann)) / 2.0


def score_message(profile: EmployeeProfile, ann: MessageAnnotation,
                  options: ScoringOptions = DEFAULT_OPTIONS) -> PreferenceScore:
    ei = emp_interest(profile, ann, options)
    er = emp_relevance(profile, ann, options)
    orel = org_relevance(profile, ann)
    oimp = org_importance(ann)
    return PreferenceScore(
        emp_interest=ei,
        emp_relevance=er,
        emp_pref=(ei + er) / 2.0,
        org_relevance=orel,
        org_importance=oimp,
        org_pref=(orel + oimp) / 2.0,
    )


class ScoreMatrix:
    """Scores for every (employee, message) pair of one draft."""

    def __init__(self, draft_id: str,
                 scores: dict[tuple[str, str], PreferenceScore]):
        self.draft_id = draft_id
        self._scores = scores

    def get(self, employee_id: str, message_id: str) -> PreferenceScore:
        return self._scores[(employee_id, message_id)]

    def keys(self):
        return self._scores.keys()

    def items(self):
        return self._scores.items()

    def __len__(self):
        return len(self._scores)

    def to_rows(self) -> list[dict]:
        rows = []
        for (emp, msg), s in sorted(self._scores.items()):
            row = {"employee_id": emp, "message_id": msg}
            row.update({f: getattr(s, f) for f in SCORE_FIELDS})
            rows.append(row)
        return rows


def score_matrix(draft: Draft, profiles: Iterable[EmployeeProfile],
                 options: ScoringOptions = DEFAULT_OPTIONS) -> ScoreMatrix:
    """Score every message of the draft for every profile.

    Requires a fully annotated draft; raises KeyError on a message without
    an annotation and UnknownTopic on annotations outside the catalog.
    """
    scores: dict[tuple[str, str], PreferenceScore] = {}
    for profile in profiles:
        for m in draft.messages:
            ann = draft.annotations[m.id]
            scores[(profile.id, m.id)] = score_message(profile, ann, options)
    return ScoreMatrix(draft.id, scores)
