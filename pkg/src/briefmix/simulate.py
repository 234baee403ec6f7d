"""Experiment mechanics: treatment assignment, synthetic populations and
drafts, and a stochastic model of how employees read their newsletters.

The behavior model turns one week's personalized newsletters into the two
data streams the real study collected: browser-style reading logs and
survey answers (message recognition plus a 1-4 interest rating). All
randomness flows through per-employee substreams, so results are
reproducible and independent of iteration order.
"""
from __future__ import annotations

import csv
import datetime as dt
import hashlib
import io
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np

from .catalog import Campus, load_job_catalog, load_topic_catalog
from .catalog import default_campuses
from .composer import PersonalizedNewsletter, TreatmentCell, all_cells
from .fixtures import (CROSS_CAMPUS_INTEREST_RATE,
                       CROSS_CAMPUS_RELEVANCE_RATE, TopicStats,
                       survey_marginals)
from .model import (TOP_NEWS, U_WIDE, Draft, EmployeeProfile, Message,
                    MessageAnnotation, campus_section, validate_draft)
from .render import newsletter_path
from .scoring import ScoreMatrix
from .seeding import substream

__all__ = [
    "BadStats",
    "TreatmentAssignment",
    "assign_treatments",
    "generate_population",
    "synthesize_draft",
    "BehaviorParams",
    "SurveyAnswer",
    "ReadingLogRow",
    "simulate_week",
    "LOG_DOMAIN",
    "logs_to_csv",
    "logs_from_csv",
    "answers_to_csv",
    "answers_from_csv",
]

LOG_DOMAIN = "newsletters.example"

RECOGNITION_VALUES = ("No", "NotSure", "Skimmed", "ReadFully")


class BadStats(ValueError):
    """Topic statistics or distribution weights outside [0, 1]."""


@dataclass(frozen=True)
class TreatmentAssignment:
    employee_id: str
    cell: TreatmentCell
    persistent: bool = True  # same cell every week of the experiment


def assign_treatments(employee_ids: Sequence[str], seed: int,
                      mode: str = "balanced") -> list[TreatmentAssignment]:
    """Assign each employee a treatment cell for the whole experiment.

    "balanced" deals cells round-robin over a seeded shuffle of the
    participants, so cell counts never differ by more than one. "uniform"
    draws each cell independently.
    """
    if mode not in ("balanced", "uniform"):
        raise ValueError(f"unknown assignment mode: {mode!r}")
    rng = substream(seed, "assignment")
    cells = all_cells()
    ids = list(employee_ids)
    out: dict[str, TreatmentCell] = {}
    if mode == "uniform":
        picks = rng.integers(0, len(cells), size=len(ids))
        for emp, k in zip(ids, picks):
            out[emp] = cells[k]
    else:
        order = rng.permutation(len(ids))
        cell_order = rng.permutation(len(cells))
        for slot, idx in enumerate(order):
            out[ids[idx]] = cells[cell_order[slot % len(cells)]]
    return [TreatmentAssignment(emp, out[emp]) for emp in ids]


def _normalize_dist(dist: Mapping[str, float], what: str) -> tuple[list[str], np.ndarray]:
    keys = sorted(dist)
    weights = np.array([float(dist[k]) for k in keys])
    if (weights < 0).any() or weights.sum() <= 0:
        raise BadStats(f"{what} weights must be nonnegative with a positive sum")
    return keys, weights / weights.sum()


def generate_population(n: int, topic_stats: Mapping[str, TopicStats],
                        seed: int, *,
                        campus_dist: Optional[Mapping[str, float]] = None,
                        job_dist: Optional[Mapping[str, float]] = None,
                        cross_interest_rate: float = CROSS_CAMPUS_INTEREST_RATE,
                        cross_relevance_rate: float = CROSS_CAMPUS_RELEVANCE_RATE,
                        ) -> list[EmployeeProfile]:
    """Draw n synthetic employees whose survey bits match the given marginals.

    Each topic's interest and relevance bits are independent Bernoulli draws
    at that topic's observed rate; campus and job default to uniform over
    the built-in catalogs.
    """
    for tid, st in topic_stats.items():
        for val in (st.org_importance_rate, st.relevance_rate, st.interest_rate):
            if not (0.0 <= val <= 1.0):
                raise BadStats(f"topic {tid}: rate {val} outside [0, 1]")
    for rate in (cross_interest_rate, cross_relevance_rate):
        if not (0.0 <= rate <= 1.0):
            raise BadStats(f"cross-campus rate {rate} outside [0, 1]")
    if n <= 0:
        return []

    campuses, campus_w = _normalize_dist(
        campus_dist or {c.id: 1.0 for c in default_campuses()}, "campus")
    jobs, job_w = _normalize_dist(
        job_dist or {j.id: 1.0 for j in load_job_catalog()}, "job")
    topics = sorted(topic_stats)
    i_rates = np.array([topic_stats[t].interest_rate for t in topics])
    r_rates = np.array([topic_stats[t].relevance_rate for t in topics])

    rng = substream(seed, "population")
    campus_pick = rng.choice(len(campuses), size=n, p=campus_w)
    job_pick = rng.choice(len(jobs), size=n, p=job_w)
    interest = rng.random((n, len(topics))) < i_rates
    relevance = rng.random((n, len(topics))) < r_rates
    cross_i = rng.random(n) < cross_interest_rate
    cross_r = rng.random(n) < cross_relevance_rate

    width = max(5, len(str(n)))
    out = []
    for i in range(n):
        out.append(EmployeeProfile(
            id=f"emp-{i:0{width}d}",
            campus=campuses[campus_pick[i]],
            job=jobs[job_pick[i]],
            interest={t: int(interest[i, j]) for j, t in enumerate(topics)},
            relevance={t: int(relevance[i, j]) for j, t in enumerate(topics)},
            cross_campus_interest=int(cross_i[i]),
            cross_campus_relevance=int(cross_r[i]),
        ))
    return out


_TOPIC_COUNT_WEIGHTS = (0.15, 0.35, 0.30, 0.20)  # P(1..4 topics per message)
_CAMPUS_MESSAGE_SHARE = 0.2


def synthesize_draft(draft_id: str, issue_date: dt.date, n_messages: int,
                     seed: int, *,
                     topic_stats: Optional[Mapping[str, TopicStats]] = None,
                     campuses: Optional[Sequence[Campus]] = None) -> Draft:
    """Generate a plausible weekly draft: 4 top news, a university-wide
    section, and a few campus messages, with topics drawn in proportion to
    how often each topic showed up in real issues."""
    if n_messages < 5:
        raise ValueError("a draft needs at least 5 messages")
    stats = dict(topic_stats or survey_marginals())
    campuses = list(campuses or default_campuses())
    topics = sorted(stats)
    # smooth so topics with no observed messages still appear occasionally
    weights = np.array([stats[t].messages + 0.5 for t in topics])
    weights = weights / weights.sum()
    all_jobs = [j.id for j in load_job_catalog()]
    all_campus_ids = [c.id for c in campuses]

    rng = substream(seed, "draft", draft_id)
    rest = n_messages - 4
    n_campus = int(round(_CAMPUS_MESSAGE_SHARE * rest))
    campus_slots = set(rng.choice(rest, size=n_campus, replace=False).tolist())

    messages: list[Message] = []
    annotations: dict[str, MessageAnnotation] = {}
    positions = {U_WIDE: 0}
    for i in range(n_messages):
        mid = f"{draft_id}-m{i:02d}"
        k = rng.choice(4, p=_TOPIC_COUNT_WEIGHTS) + 1
        picked = rng.choice(len(topics), size=k, replace=False, p=weights)
        msg_topics = tuple(topics[j] for j in picked)
        primary = stats[msg_topics[0]]
        if rng.random() < primary.org_importance_rate:
            importance = 3 + int(rng.random() < 0.5)
        else:
            importance = 1 + int(rng.random() < 0.5)
        if rng.random() < 0.6:
            target_jobs = frozenset(all_jobs)
        else:
            nj = int(rng.integers(1, 4))
            jp = rng.choice(len(all_jobs), size=nj, replace=False)
            target_jobs = frozenset(all_jobs[j] for j in jp)

        if i < 4:
            section = TOP_NEWS
            position = i
            target_campuses = frozenset(all_campus_ids)
        elif (i - 4) in campus_slots:
            cid = all_campus_ids[int(rng.integers(0, len(all_campus_ids)))]
            section = campus_section(cid)
            position = positions.get(section, 0)
            positions[section] = position + 1
            target_campuses = frozenset([cid])
        else:
            section = U_WIDE
            position = positions[U_WIDE]
            positions[U_WIDE] = position + 1
            target_campuses = frozenset(all_campus_ids)

        display = msg_topics[0].replace("-", " ").title()
        messages.append(Message(
            id=mid,
            title=f"{display} update {i + 1}",
            body_html=f"<p>This week's roundup item {i + 1} covers {display.lower()}.</p>",
            link=f"https://news.example/{draft_id}/{mid}",
            section=section,
            position=position,
        ))
        annotations[mid] = MessageAnnotation(
            importance=importance,
            target_jobs=target_jobs,
            target_campuses=target_campuses,
            topics=msg_topics,
        )

    draft = Draft(id=draft_id, issue_date=issue_date,
                  messages=tuple(messages), annotations=annotations)
    return validate_draft(draft, topic_catalog=load_topic_catalog(),
                          campuses=campuses)


@dataclass(frozen=True)
class BehaviorParams:
    """Knobs of the reading model; defaults are calibrated so a large run
    lands near the real study's open, recognition, and placement effects."""

    base_open_prob: float = 0.60
    open_pref_gain: float = 0.0
    recognition_base: float = 0.37
    top_news_boost: float = 0.12
    subject_boost: float = 0.17
    pref_recognition_gain: float = 0.15
    read_detail_base: float = 0.13
    pref_read_gain: float = 0.10
    not_sure_rate: float = 0.05
    base_session_seconds: float = 60.0
    seconds_per_recognized_mean: float = 4.0
    seconds_per_recognized_sd: float = 1.0
    interest_noise_sd: float = 0.25
    survey_scope: str = "paper"  # "paper" | "full"

    def __post_init__(self):
        for name in ("base_open_prob", "recognition_base",
                     "read_detail_base", "not_sure_rate"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"{name} must be in [0, 1], got {v}")
        for name in ("seconds_per_recognized_sd", "interest_noise_sd",
                     "base_session_seconds"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if self.survey_scope not in ("paper", "full"):
            raise ValueError(f"unknown survey_scope: {self.survey_scope!r}")


@dataclass(frozen=True)
class SurveyAnswer:
    employee_id: str
    draft_id: str
    kind: str  # "recognition" | "interest"
    value: object  # recognition: one of RECOGNITION_VALUES; interest: 1..4
    message_id: Optional[str] = None  # set for recognition answers


@dataclass(frozen=True)
class ReadingLogRow:
    domain: str
    path: str
    start_ts: dt.datetime
    end_ts: dt.datetime
    url: str
    tab_title: str


def _clip01(x: float) -> float:
    return min(1.0, max(0.0, x))


def _session_start(issue_date: dt.date, employee_id: str) -> dt.datetime:
    """Mailing goes out at 09:00 UTC; each employee opens at a fixed
    per-person offset within the workday, stable across weeks and seeds."""
    digest = hashlib.sha256(employee_id.encode("utf-8")).digest()
    offset = int.from_bytes(digest[:4], "big") % 480
    base = dt.datetime.combine(issue_date, dt.time(9, 0, tzinfo=dt.timezone.utc))
    return base + dt.timedelta(minutes=offset)


def _surveyed_ids(nl: PersonalizedNewsletter, profile: EmployeeProfile,
                  scope: str) -> list[str]:
    if scope == "full":
        return nl.all_message_ids()
    out = list(nl.top_news)
    seen = set(out)
    sections = dict(nl.sections)
    for mid in sections.get(U_WIDE, [])[:10]:
        if mid not in seen:
            out.append(mid)
            seen.add(mid)
    for mid in sections.get(campus_section(profile.campus), [])[:2]:
        if mid not in seen:
            out.append(mid)
            seen.add(mid)
    if nl.subject_message and nl.subject_message not in seen:
        out.append(nl.subject_message)
    return out


def simulate_week(newsletters: Sequence[PersonalizedNewsletter],
                  matrix: ScoreMatrix, params: BehaviorParams, seed: int, *,
                  profiles: Sequence[EmployeeProfile],
                  issue_date: dt.date,
                  ) -> tuple[list[ReadingLogRow], list[SurveyAnswer]]:
    """Simulate one week of reading and surveying.

    Per employee: an open draw, then for each surveyed message a recognition
    draw (base rate plus a placement boost and a preference slope), and for
    recognized messages a read-in-detail draw. Placement boosts do not
    stack; being the subject-line message supersedes the top-news boost.
    Session length is a fixed base plus a per-recognized-message increment.
    Employees who never open answer "No" across the board, rate interest 1,
    and leave no log row.

    Everyone answers the weekly survey either way: recognition for the top
    news, the leading university-wide and own-campus items, and the subject
    message ("paper" scope), or for every message ("full" scope).
    """
    profile_by_id = {p.id: p for p in profiles}
    logs: list[ReadingLogRow] = []
    answers: list[SurveyAnswer] = []
    for nl in newsletters:
        profile = profile_by_id[nl.employee_id]
        rng = substream(seed, "behavior", nl.draft_id,
                        issue_date.isoformat(), nl.employee_id)
        ep = {mid: matrix.get(nl.employee_id, mid).emp_pref
              for mid in nl.all_message_ids()}
        top_pref = float(np.mean([ep[m] for m in nl.top_news])) if nl.top_news else 0.0

        open_p = _clip01(params.base_open_prob + params.open_pref_gain * top_pref)
        opened = rng.random() < open_p
        surveyed = _surveyed_ids(nl, profile, params.survey_scope)

        if not opened:
            for mid in surveyed:
                answers.append(SurveyAnswer(nl.employee_id, nl.draft_id,
                                            "recognition", "No", mid))
            answers.append(SurveyAnswer(nl.employee_id, nl.draft_id,
                                        "interest", 1))
            continue

        top_set = set(nl.top_news)
        seconds = params.base_session_seconds
        for mid in surveyed:
            if mid == nl.subject_message:
                boost = params.subject_boost
            elif mid in top_set:
                boost = params.top_news_boost
            else:
                boost = 0.0
            p_rec = _clip01(params.recognition_base + boost
                            + params.pref_recognition_gain * ep[mid])
            if rng.random() < p_rec:
                p_read = _clip01(params.read_detail_base
                                 + params.pref_read_gain * ep[mid])
                value = "ReadFully" if rng.random() < p_read else "Skimmed"
                seconds += max(0.0, rng.normal(
                    params.seconds_per_recognized_mean,
                    params.seconds_per_recognized_sd))
            else:
                value = "NotSure" if rng.random() < params.not_sure_rate else "No"
            answers.append(SurveyAnswer(nl.employee_id, nl.draft_id,
                                        "recognition", value, mid))

        noisy = _clip01(top_pref + rng.normal(0.0, params.interest_noise_sd))
        rating = int(1 + round(3 * noisy))
        answers.append(SurveyAnswer(nl.employee_id, nl.draft_id,
                                    "interest", rating))

        start = _session_start(issue_date, nl.employee_id)
        path = "/" + newsletter_path(nl.draft_id, nl.employee_id)
        logs.append(ReadingLogRow(
            domain=LOG_DOMAIN,
            path=path,
            start_ts=start,
            end_ts=start + dt.timedelta(seconds=seconds),
            url=f"https://{LOG_DOMAIN}{path}",
            tab_title=nl.subject,
        ))
    return logs, answers


_LOG_FIELDS = ("domain", "path", "start_ts", "end_ts", "url", "tab_title")
_ANSWER_FIELDS = ("employee_id", "draft_id", "message_id", "kind", "value")


def logs_to_csv(rows: Sequence[ReadingLogRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_LOG_FIELDS)
    for r in rows:
        w.writerow([r.domain, r.path, r.start_ts.isoformat(),
                    r.end_ts.isoformat(), r.url, r.tab_title])
    return buf.getvalue()


def logs_from_csv(text: str) -> list[ReadingLogRow]:
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for rec in reader:
        out.append(ReadingLogRow(
            domain=rec["domain"],
            path=rec["path"],
            start_ts=dt.datetime.fromisoformat(rec["start_ts"]),
            end_ts=dt.datetime.fromisoformat(rec["end_ts"]),
            url=rec["url"],
            tab_title=rec["tab_title"],
        ))
    return out


def answers_to_csv(rows: Sequence[SurveyAnswer]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(_ANSWER_FIELDS)
    for a in rows:
        w.writerow([a.employee_id, a.draft_id, a.message_id or "",
                    a.kind, a.value])
    return buf.getvalue()


def answers_from_csv(text: str) -> list[SurveyAnswer]:
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for rec in reader:
        value: object = rec["value"]
        if rec["kind"] == "interest":
            value = int(value)
        out.append(SurveyAnswer(
            employee_id=rec["employee_id"],
            draft_id=rec["draft_id"],
            kind=rec["kind"],
            value=value,
            message_id=rec["message_id"] or None,
        ))
    return out
