"""Core newsletter domain: messages, annotations, employee profiles, drafts.

A draft is the editor's weekly newsletter before personalization: messages
grouped into sections (top news, university-wide, one per campus), each with
a position inside its section. Annotations attach the editor's judgment
(importance, audience targeting, topics) to each message; employee profiles
hold the per-topic preference survey bits.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

from .catalog import Campus, Topic, load_topic_catalog

__all__ = [
    "TOP_NEWS",
    "U_WIDE",
    "campus_section",
    "is_campus_section",
    "section_campus",
    "Message",
    "MessageAnnotation",
    "EmployeeProfile",
    "Draft",
    "ValidationIssue",
    "DraftInvalid",
    "MissingAnnotation",
    "DuplicatePosition",
    "BadImportance",
    "TooManyTopics",
    "EmptyTargetCampuses",
    "SpecialTopicNotAllowed",
    "UnknownTopic",
    "BadStructure",
    "validate_draft",
    "draft_to_dict",
    "draft_from_dict",
    "annotation_to_dict",
    "annotation_from_dict",
    "profile_to_dict",
    "profile_from_dict",
]

TOP_NEWS = "top-news"
U_WIDE = "u-wide"
_CAMPUS_PREFIX = "campus:"


def campus_section(campus_id: str) -> str:
    return _CAMPUS_PREFIX + campus_id


def is_campus_section(section: str) -> bool:
    return section.startswith(_CAMPUS_PREFIX)


def section_campus(section: str) -> Optional[str]:
    if is_campus_section(section):
        return section[len(_CAMPUS_PREFIX):]
    return None


@dataclass(frozen=True)
class Message:
    id: str
    title: str
    body_html: str
    link: str
    section: str  # TOP_NEWS | U_WIDE | campus_section(id)
    position: int  # original position within its section


@dataclass(frozen=True)
class MessageAnnotation:
    importance: int  # 1..4
    target_jobs: frozenset[str]
    target_campuses: frozenset[str]
    topics: tuple[str, ...]  # 1..4 distinct regular topic ids

    def __post_init__(self):
        object.__setattr__(self, "target_jobs", frozenset(self.target_jobs))
        object.__setattr__(self, "target_campuses",
                           frozenset(self.target_campuses))
        object.__setattr__(self, "topics", tuple(self.topics))


@dataclass(frozen=True)
class EmployeeProfile:
    id: str
    campus: str
    job: str
    interest: Mapping[str, int] = field(default_factory=dict)  # topic -> 0/1
    relevance: Mapping[str, int] = field(default_factory=dict)
    cross_campus_interest: int = 0
    cross_campus_relevance: int = 0

    def interested_in(self, topic: str) -> int:
        return 1 if self.interest.get(topic, 0) else 0

    def finds_relevant(self, topic: str) -> int:
        return 1 if self.relevance.get(topic, 0) else 0


@dataclass(frozen=True)
class Draft:
    id: str
    issue_date: dt.date
    messages: tuple[Message, ...]
    annotations: Mapping[str, MessageAnnotation] = field(default_factory=dict)

    def message(self, message_id: str) -> Message:
        for m in self.messages:
            if m.id == message_id:
                return m
        raise KeyError(message_id)

    def section_members(self, section: str) -> list[Message]:
        ms = [m for m in self.messages if m.section == section]
        ms.sort(key=lambda m: m.position)
        return ms

    def campus_sections(self) -> list[str]:
        seen: list[str] = []
        for m in self.messages:
            if is_campus_section(m.section) and m.section not in seen:
                seen.append(m.section)
        return seen


# --- validation -----------------------------------------------------------

@dataclass(frozen=True)
class ValidationIssue:
    field: str
    code: str
    message: str


class DraftInvalid(ValueError):
    """One or more validation failures; .issues lists all of them."""

    code = "invalid"

    def __init__(self, issues: list[ValidationIssue]):
        self.issues = issues
        super().__init__("; ".join(f"{i.field}: {i.message}" for i in issues))


class MissingAnnotation(DraftInvalid):
    code = "missing-annotation"


class DuplicatePosition(DraftInvalid):
    code = "duplicate-position"


class BadImportance(DraftInvalid):
    code = "bad-importance"


class TooManyTopics(DraftInvalid):
    code = "too-many-topics"


class EmptyTargetCampuses(DraftInvalid):
    code = "empty-target-campuses"


class SpecialTopicNotAllowed(DraftInvalid):
    code = "special-topic"


class UnknownTopic(DraftInvalid):
    code = "unknown-topic"


class BadStructure(DraftInvalid):
    code = "bad-structure"


_ISSUE_CLASSES = {
    cls.code: cls
    for cls in (MissingAnnotation, DuplicatePosition, BadImportance,
                TooManyTopics, EmptyTargetCampuses, SpecialTopicNotAllowed,
                UnknownTopic, BadStructure)
}


def _raise_issues(issues: list[ValidationIssue]) -> None:
    if issues:
        cls = _ISSUE_CLASSES.get(issues[0].code, DraftInvalid)
        raise cls(issues)


def check_annotation(ann: MessageAnnotation, *, field_prefix: str = "",
                     topic_catalog: Optional[Iterable[Topic]] = None,
                     campuses: Optional[Iterable[Campus]] = None,
                     ) -> list[ValidationIssue]:
    """Field-level issues for a single annotation (empty list when clean)."""
    topics = list(topic_catalog) if topic_catalog is not None \
        else load_topic_catalog()
    regular = {t.id for t in topics if not t.special}
    special = {t.id for t in topics if t.special}
    issues: list[ValidationIssue] = []

    def issue(fld: str, code: str, msg: str) -> None:
        issues.append(ValidationIssue(field_prefix + fld, code, msg))

    if not isinstance(ann.importance, int) or isinstance(ann.importance, bool) \
            or not 1 <= ann.importance <= 4:
        issue("importance", BadImportance.code,
              f"importance must be an integer in 1..4, got {ann.importance!r}")
    if not ann.target_campuses:
        issue("target_campuses", EmptyTargetCampuses.code,
              "target_campuses must name at least one campus")
    elif campuses is not None:
        known = {c.id for c in campuses}
        for cid in sorted(set(ann.target_campuses) - known):
            issue("target_campuses", BadStructure.code,
                  f"unknown campus {cid!r}")
    if not 1 <= len(ann.topics) <= 4:
        issue("topics", TooManyTopics.code,
              f"a message carries 1 to 4 topics, got {len(ann.topics)}")
    if len(set(ann.topics)) != len(ann.topics):
        issue("topics", TooManyTopics.code, "topics must be distinct")
    for t in ann.topics:
        if t in special:
            issue("topics", SpecialTopicNotAllowed.code,
                  f"campus-scope topic {t!r} cannot be assigned to a message")
        elif t not in regular:
            issue("topics", UnknownTopic.code, f"unknown topic {t!r}")
    return issues


def validate_draft(draft: Draft, *, require_annotations: bool = True,
                   topic_catalog: Optional[Iterable[Topic]] = None,
                   campuses: Optional[Iterable[Campus]] = None) -> Draft:
    """Check a draft and return it with per-section positions normalized.

    Collects every problem it can find; raises a DraftInvalid subclass
    matching the first issue, carrying the full list in .issues.
    Normalization renumbers positions 0..k-1 within each section, keeping
    the stated order; running it twice changes nothing.
    """
    issues: list[ValidationIssue] = []

    seen_ids: set[str] = set()
    for idx, m in enumerate(draft.messages):
        fld = f"messages[{m.id or idx}]"
        if not m.id:
            issues.append(ValidationIssue(fld + ".id", BadStructure.code,
                                          "message id must be non-empty"))
        elif m.id in seen_ids:
            issues.append(ValidationIssue(fld + ".id", BadStructure.code,
                                          f"duplicate message id {m.id!r}"))
        seen_ids.add(m.id)
        if not m.title or not m.title.strip():
            issues.append(ValidationIssue(fld + ".title", BadStructure.code,
                                          "title must be non-empty"))
        if m.section != TOP_NEWS and m.section != U_WIDE \
                and not (is_campus_section(m.section) and section_campus(m.section)):
            issues.append(ValidationIssue(
                fld + ".section", BadStructure.code,
                f"section must be top-news, u-wide or campus:<id>,"
                f" got {m.section!r}"))
        elif campuses is not None and is_campus_section(m.section):
            known = {c.id for c in campuses}
            if section_campus(m.section) not in known:
                issues.append(ValidationIssue(
                    fld + ".section", BadStructure.code,
                    f"unknown campus {section_campus(m.section)!r}"))

    # duplicate (section, position) pairs make the stated order ambiguous
    by_slot: dict[tuple[str, int], list[str]] = {}
    for m in draft.messages:
        by_slot.setdefault((m.section, m.position), []).append(m.id)
    for (section, pos), ids in sorted(by_slot.items()):
        if len(ids) > 1:
            issues.append(ValidationIssue(
                f"messages[{ids[1]}].position", DuplicatePosition.code,
                f"position {pos} in section {section!r} is taken by"
                f" {ids[0]!r}"))

    for mid in sorted(draft.annotations):
        if mid not in seen_ids:
            issues.append(ValidationIssue(
                f"annotations[{mid}]", BadStructure.code,
                f"annotation for unknown message {mid!r}"))
    for m in draft.messages:
        ann = draft.annotations.get(m.id)
        if ann is None:
            if require_annotations:
                issues.append(ValidationIssue(
                    f"annotations[{m.id}]", MissingAnnotation.code,
                    f"message {m.id!r} has no annotation"))
            continue
        issues.extend(check_annotation(
            ann, field_prefix=f"annotations[{m.id}].",
            topic_catalog=topic_catalog, campuses=campuses))

    _raise_issues(issues)

    sections: dict[str, list[Message]] = {}
    for m in draft.messages:
        sections.setdefault(m.section, []).append(m)
    renumbered: dict[str, Message] = {}
    for members in sections.values():
        members.sort(key=lambda m: m.position)
        for new_pos, m in enumerate(members):
            renumbered[m.id] = replace(m, position=new_pos)
    messages = tuple(renumbered[m.id] for m in draft.messages)
    return replace(draft, messages=messages)


# --- serialization --------------------------------------------------------

def annotation_to_dict(ann: MessageAnnotation) -> dict:
    return {
        "importance": ann.importance,
        "target_jobs": sorted(ann.target_jobs),
        "target_campuses": sorted(ann.target_campuses),
        "topics": list(ann.topics),
    }


def annotation_from_dict(d: Mapping) -> MessageAnnotation:
    return MessageAnnotation(
        importance=d["importance"],
        target_jobs=frozenset(d.get("target_jobs", [])),
        target_campuses=frozenset(d.get("target_campuses", [])),
        topics=tuple(d.get("topics", [])),
    )


def draft_to_dict(draft: Draft) -> dict:
    return {
        "id": draft.id,
        "issue_date": draft.issue_date.isoformat(),
        "messages": [
            {
                "id": m.id,
                "title": m.title,
                "body_html": m.body_html,
                "link": m.link,
                "section": m.section,
                "position": m.position,
            }
            for m in draft.messages
        ],
        "annotations": {
            mid: annotation_to_dict(a)
            for mid, a in sorted(draft.annotations.items())
        },
    }


def draft_from_dict(d: Mapping) -> Draft:
    return Draft(
        id=d["id"],
        issue_date=dt.date.fromisoformat(d["issue_date"]),
        messages=tuple(
            Message(
                id=m["id"],
                title=m["title"],
                body_html=m.get("body_html", ""),
                link=m.get("link", ""),
                section=m["section"],
                position=m["position"],
            )
            for m in d.get("messages", [])
        ),
        annotations={
            mid: annotation_from_dict(a)
            for mid, a in d.get("annotations", {}).items()
        },
    )


def profile_to_dict(p: EmployeeProfile) -> dict:
    return {
        "id": p.id,
        "campus": p.campus,
        "job": p.job,
        "interest": {k: v for k, v in sorted(p.interest.items())},
        "relevance": {k: v for k, v in sorted(p.relevance.items())},
        "cross_campus_interest": p.cross_campus_interest,
        "cross_campus_relevance": p.cross_campus_relevance,
    }


def profile_from_dict(d: Mapping) -> EmployeeProfile:
    return EmployeeProfile(
        id=d["id"],
        campus=d["campus"],
        job=d["job"],
        interest=dict(d.get("interest", {})),
        relevance=dict(d.get("relevance", {})),
        cross_campus_interest=int(d.get("cross_campus_interest", 0)),
        cross_campus_relevance=int(d.get("cross_campus_relevance", 0)),
    )
