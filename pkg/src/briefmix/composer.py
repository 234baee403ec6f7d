"""Personalized newsletter composition.

One treatment cell fixes three choices: how the subject line is built (A),
which messages lead as top news (B), and how each remaining section is
ordered (C). Composition never drops or duplicates a message: top news and
the reordered sections together are always a permutation of the draft.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .catalog import Campus, default_campuses
from .model import (TOP_NEWS, U_WIDE, Draft, EmployeeProfile, Message,
                    is_campus_section, section_campus)
from .scoring import PreferenceScore, ScoreMatrix

__all__ = [
    "TreatmentCell",
    "all_cells",
    "ComposeConfig",
    "PersonalizedNewsletter",
    "EmptyDraft",
    "DraftTooSmall",
    "MismatchedSets",
    "make_subject",
    "select_top_news",
    "zipper_interleave",
    "order_sections",
    "compose",
]

SUBJECT_TITLE_LIMIT = 78


class EmptyDraft(ValueError):
    pass


class DraftTooSmall(ValueError):
    pass


class MismatchedSets(ValueError):
    pass


@dataclass(frozen=True, order=True)
class TreatmentCell:
    a: int  # subject line: 1 original, 2 random, 3 org pick, 4 emp pick
    b: int  # top news: 1 original, 2 random, 3 org, 4 emp, 5 mixed
    c: int  # section order: 1 original, 2 shuffle, 3 org, 4 emp, 5 zipper

    def __post_init__(self):
        if not 1 <= self.a <= 4:
            raise ValueError(f"a must be 1..4, got {self.a}")
        if not 1 <= self.b <= 5:
            raise ValueError(f"b must be 1..5, got {self.b}")
        if not 1 <= self.c <= 5:
            raise ValueError(f"c must be 1..5, got {self.c}")

    @property
    def label(self) -> str:
        return f"A{self.a}B{self.b}C{self.c}"


def all_cells() -> list[TreatmentCell]:
    return [TreatmentCell(a, b, c)
            for a in range(1, 5) for b in range(1, 6) for c in range(1, 6)]


@dataclass(frozen=True)
class ComposeConfig:
    brand: str = "U of M Brief"
    campuses: tuple[Campus, ...] = tuple(default_campuses(5))

    def campus_index(self) -> dict[str, int]:
        return {c.id: i for i, c in enumerate(self.campuses)}

    def campus_name(self, campus_id: str) -> str:
        for c in self.campuses:
            if c.id == campus_id:
                return c.name
        return campus_id


DEFAULT_CONFIG = ComposeConfig()

Scores = Mapping[str, PreferenceScore]


@dataclass(frozen=True)
class PersonalizedNewsletter:
    employee_id: str
    draft_id: str
    subject: str
    subject_message: Optional[str]
    top_news: list[str]
    sections: list[tuple[str, list[str]]]
    # campus-name prefixes for campus messages shown in top news
    display_titles: dict[str, str] = field(default_factory=dict)

    def all_message_ids(self) -> list[str]:
        out = list(self.top_news)
        for _, ids in self.sections:
            out.extend(ids)
        return out


def _campus_rank(campus_id: str, campus_index: Mapping[str, int]) -> tuple:
    return (campus_index.get(campus_id, len(campus_index)), campus_id)


def _sort_key(m: Message, campus_index: Mapping[str, int]) -> tuple:
    if m.section == TOP_NEWS:
        rank = (0, "")
    elif m.section == U_WIDE:
        rank = (1, "")
    else:
        cr = _campus_rank(section_campus(m.section) or "", campus_index)
        rank = (2 + cr[0], cr[1])
    return (rank, m.position, m.id)


def _canonical(draft: Draft, campus_index: Mapping[str, int]) -> list[Message]:
    return sorted(draft.messages, key=lambda m: _sort_key(m, campus_index))


def _ranked(messages: Sequence[Message], scores: Scores, attr: str,
            campus_index: Mapping[str, int]) -> list[Message]:
    return sorted(messages,
                  key=lambda m: (-getattr(scores[m.id], attr),
                                 _sort_key(m, campus_index)))


def _truncate_title(title: str) -> str:
    if len(title) > SUBJECT_TITLE_LIMIT:
        return title[:SUBJECT_TITLE_LIMIT - 1] + "…"
    return title


def _base_subject(draft: Draft, brand: str) -> str:
    d = draft.issue_date
    return f"{brand} ({d.strftime('%B')} {d.day}, {d.year})"


def make_subject(draft: Draft, a: int, scores: Scores,
                 rng: np.random.Generator, *, brand: str = "U of M Brief",
                 campus_index: Optional[Mapping[str, int]] = None,
                 ) -> tuple[str, Optional[str]]:
    """Subject line and, for levels 2-4, the message it advertises."""
    if not draft.messages:
        raise EmptyDraft(draft.id)
    idx = campus_index if campus_index is not None \
        else DEFAULT_CONFIG.campus_index()
    base = _base_subject(draft, brand)
    if a == 1:
        return base, None
    if a == 2:
        ordered = _canonical(draft, idx)
        pick = ordered[int(rng.integers(len(ordered)))]
    elif a == 3:
        pick = _ranked(draft.messages, scores, "org_pref", idx)[0]
    elif a == 4:
        pick = _ranked(draft.messages, scores, "emp_pref", idx)[0]
    else:
        raise ValueError(f"subject level must be 1..4, got {a}")
    return f"{base} - {_truncate_title(pick.title)}", pick.id


def select_top_news(draft: Draft, b: int, scores: Scores,
                    rng: np.random.Generator, *,
                    campus_index: Optional[Mapping[str, int]] = None,
                    ) -> list[str]:
    """The ids leading the newsletter, before the subject-append rule."""
    if not draft.messages:
        raise EmptyDraft(draft.id)
    if len(draft.messages) < 4:
        raise DraftTooSmall(
            f"{draft.id}: {len(draft.messages)} messages, need 4")
    idx = campus_index if campus_index is not None \
        else DEFAULT_CONFIG.campus_index()
    if b == 1:
        return [m.id for m in draft.section_members(TOP_NEWS)]
    if b == 2:
        ordered = _canonical(draft, idx)
        picks = rng.choice(len(ordered), size=4, replace=False)
        return [ordered[int(i)].id for i in picks]
    if b == 3:
        return [m.id for m in _ranked(draft.messages, scores, "org_pref",
                                      idx)[:4]]
    if b == 4:
        return [m.id for m in _ranked(draft.messages, scores, "emp_pref",
                                      idx)[:4]]
    if b == 5:
        emp = [m.id for m in _ranked(draft.messages, scores, "emp_pref", idx)]
        org = [m.id for m in _ranked(draft.messages, scores, "org_pref", idx)]
        return zipper_interleave(emp, org)[:4]
    raise ValueError(f"top-news level must be 1..5, got {b}")


def zipper_interleave(emp_ranked: Sequence, org_ranked: Sequence) -> list:
    """Alternate between the two rankings, never repeating an id.

    Takes the highest not-yet-output id from the employee list, then from
    the organization list, and so on; when one side is exhausted the rest
    of the other follows in rank order.
    """
    if set(emp_ranked) != set(org_ranked) \
            or len(emp_ranked) != len(org_ranked):
        raise MismatchedSets("rankings must order the same id set")
    out: list = []
    taken: set = set()
    lists = (list(emp_ranked), list(org_ranked))
    pos = [0, 0]
    turn = 0
    total = len(set(emp_ranked))
    while len(out) < total:
        lst = lists[turn]
        p = pos[turn]
        while p < len(lst) and lst[p] in taken:
            p += 1
        pos[turn] = p
        if p < len(lst):
            out.append(lst[p])
            taken.add(lst[p])
            pos[turn] = p + 1
        turn = 1 - turn
    return out


def order_sections(draft: Draft, c: int, scores: Scores,
                   rng: np.random.Generator, removed: set[str], *,
                   campus_index: Optional[Mapping[str, int]] = None,
                   ) -> list[tuple[str, list[str]]]:
    """Order the non-top sections, one entry per section, U-wide first.

    Original top-news messages that were not promoted land at the head of
    the U-wide pool before the ordering rule runs. Promoted messages
    (already shown in top news) are left out of their home sections.
    """
    if c not in (1, 2, 3, 4, 5):
        raise ValueError(f"order level must be 1..5, got {c}")
    idx = campus_index if campus_index is not None \
        else DEFAULT_CONFIG.campus_index()

    displaced = [m for m in draft.section_members(TOP_NEWS)
                 if m.id not in removed]
    uwide = displaced + [m for m in draft.section_members(U_WIDE)
                         if m.id not in removed]

    campus_keys = sorted(draft.campus_sections(),
                         key=lambda s: _campus_rank(section_campus(s) or "",
                                                    idx))
    pools = [(U_WIDE, uwide)]
    for key in campus_keys:
        pools.append((key, [m for m in draft.section_members(key)
                            if m.id not in removed]))

    out: list[tuple[str, list[str]]] = []
    for key, members in pools:
        if c == 1:
            ordered = list(members)
        elif c == 2:
            perm = rng.permutation(len(members))
            ordered = [members[int(i)] for i in perm]
        elif c == 3:
            ordered = _ranked(members, scores, "org_pref", idx)
        elif c == 4:
            ordered = _ranked(members, scores, "emp_pref", idx)
        else:
            emp = [m.id for m in _ranked(members, scores, "emp_pref", idx)]
            org = [m.id for m in _ranked(members, scores, "org_pref", idx)]
            by_id = {m.id: m for m in members}
            ordered = [by_id[i] for i in zipper_interleave(emp, org)]
        out.append((key, [m.id for m in ordered]))
    return out


def compose(draft: Draft, profile: EmployeeProfile, cell: TreatmentCell,
            matrix: ScoreMatrix, rng: np.random.Generator,
            config: ComposeConfig = DEFAULT_CONFIG) -> PersonalizedNewsletter:
    """Build one employee's newsletter for one draft and treatment cell.

    Randomness is consumed in a fixed order (subject, top news, sections),
    so a given rng substream always yields the same newsletter.
    """
    idx = config.campus_index()
    scores = {m.id: matrix.get(profile.id, m.id) for m in draft.messages}

    subject, subject_message = make_subject(
        draft, cell.a, scores, rng, brand=config.brand, campus_index=idx)
    selected = select_top_news(draft, cell.b, scores, rng, campus_index=idx)
    if cell.b != 1 and len(selected) != 4:
        raise RuntimeError("top-news selection must pick exactly 4")

    top_news = list(selected)
    if subject_message is not None and subject_message not in top_news:
        top_news.append(subject_message)  # the advertised message leads too

    removed = set(top_news)
    sections = order_sections(draft, cell.c, scores, rng, removed,
                              campus_index=idx)

    display_titles: dict[str, str] = {}
    for mid in top_news:
        m = draft.message(mid)
        if is_campus_section(m.section):
            name = config.campus_name(section_campus(m.section) or "")
            display_titles[mid] = f"{name}: {m.title}"

    nl = PersonalizedNewsletter(
        employee_id=profile.id,
        draft_id=draft.id,
        subject=subject,
        subject_message=subject_message,
        top_news=top_news,
        sections=sections,
        display_titles=display_titles,
    )
    if sorted(nl.all_message_ids()) != sorted(m.id for m in draft.messages):
        raise RuntimeError("composition must permute the draft exactly")
    return nl
