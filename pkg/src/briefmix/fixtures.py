"""Bundled fixtures: a small demo draft, three personas, survey marginals.

The marginals table carries, per topic, the share of messages the editor
rated important (score >= 3) and the share of employees who tagged the topic
work-relevant / interesting in the deployment's preference survey, plus the
number of messages that carried the topic over the study period. The
population synthesizer uses these as sampling weights and rates.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

from .catalog import default_campuses, load_job_catalog, slugify
from .model import (TOP_NEWS, U_WIDE, Draft, EmployeeProfile, Message,
                    MessageAnnotation, campus_section, validate_draft)

__all__ = [
    "TopicStats",
    "survey_marginals",
    "CROSS_CAMPUS_RELEVANCE_RATE",
    "CROSS_CAMPUS_INTEREST_RATE",
    "demo_draft",
    "demo_profiles",
    "DemoStudy",
    "demo_study",
]


@dataclass(frozen=True)
class TopicStats:
    messages: int  # messages carrying the topic over the study period
    org_importance_rate: float  # share rated important (>= 3) by the editor
    relevance_rate: float  # share of employees tagging it work-relevant
    interest_rate: float  # share of employees tagging it interesting


# (name variant as printed in the survey summary, #messages, org_imp, rel, int)
_MARGINALS = [
    ("Talk/ Symposium/ Lectures Announcements", 29, 0.034, 0.049, 0.385),
    ("Student/ Alumni Stories", 27, 0.370, 0.049, 0.148),
    ("Community Service/ Social Justice/ Underserved Population",
     21, 0.524, 0.352, 0.730),
    ("Faculty  Staff Stories", 20, 0.200, 0.090, 0.172),
    ("Health/ Biology Research Stories", 15, 0.533, 0.090, 0.607),
    ("Climate/ Eco/ Agriculture", 15, 0.400, 0.180, 0.697),
    ("Health Wellness Resources/ COVID", 12, 0.167, 0.672, 0.738),
    ("Award/ Recognition to University, Faculty, Staff, Students",
     11, 0.455, 0.066, 0.197),
    ("Program  Award Applications/Announcements", 10, 0.200, 0.607, 0.549),
    ("Fundraising  Development", 9, 0.556, 0.180, 0.385),
    ("History/ Social Science Research Stories", 9, 0.222, 0.156, 0.385),
    ("Policies/ Admin News/ Governance", 8, 0.625, 0.393, 0.148),
    ("Tech Tool Updates/ Workshops", 8, 0.000, 0.262, 0.131),
    ("Sports  Spirit", 6, 0.833, 0.057, 0.238),
    ("University History/ Celebrations", 6, 0.667, 0.295, 0.221),
    ("Art  Museums", 4, 0.000, 0.066, 0.639),
    ("University Program Success Stories", 4, 0.500, 0.172, 0.279),
    ("Operations Awareness/ Facility Closures", 3, 0.333, 0.820, 0.492),
    ("Engineering Science Research Stories", 3, 0.000, 0.033, 0.525),
    ("Youth, Children", 0, 0.000, 0.082, 0.311),
]

# share of employees who look for relevant / interesting messages from
# campuses other than their own
CROSS_CAMPUS_RELEVANCE_RATE = 0.25
CROSS_CAMPUS_INTEREST_RATE = 0.32


def survey_marginals() -> dict[str, TopicStats]:
    out = {}
    for name, n, imp, rel, interest in _MARGINALS:
        out[slugify(name)] = TopicStats(n, imp, rel, interest)
    if len(out) != len(_MARGINALS):
        raise ValueError("marginal topic ids collide")
    return out


_ALL_JOBS = frozenset(j.id for j in load_job_catalog())
_ALL_CAMPUSES = frozenset(c.id for c in default_campuses(5))


def demo_draft() -> Draft:
    """Six-message draft whose rankings exercise every composition rule."""
    messages = (
        Message("m-regents", "Board of Regents meeting highlights",
                "<p>The Board of Regents met Friday.</p>",
                "https://example.edu/regents", TOP_NEWS, 0),
        Message("m-justice", "Work for social justice",
                "<p>A new initiative opens for volunteers.</p>",
                "https://example.edu/justice", TOP_NEWS, 1),
        Message("m-hockey", "Men's hockey return to ACHA",
                "<p>The club team rejoins the league.</p>",
                "https://example.edu/hockey", U_WIDE, 0),
        Message("m-pathway", "A key biological pathway",
                "<p>Researchers mapped a signaling pathway.</p>",
                "https://example.edu/pathway", U_WIDE, 1),
        Message("m-capstone", "Fall 2021 Capstone presentations",
                "<p>Students present their capstone projects.</p>",
                "https://example.edu/capstone", U_WIDE, 2),
        Message("m-dining", "New dining hours at the commons",
                "<p>The commons opens earlier on weekdays.</p>",
                "https://example.edu/dining", campus_section("campus-2"), 0),
    )
    annotations = {
        "m-regents": MessageAnnotation(
            importance=4, target_jobs=_ALL_JOBS,
            target_campuses=_ALL_CAMPUSES,
            topics=("policies-admin-news-governance",)),
        "m-justice": MessageAnnotation(
            importance=3, target_jobs=_ALL_JOBS,
            target_campuses=_ALL_CAMPUSES,
            topics=("community-service-social-justice-underserved-population",)),
        "m-hockey": MessageAnnotation(
            importance=2, target_jobs=frozenset({"student-services"}),
            target_campuses=_ALL_CAMPUSES, topics=("sports-spirit",)),
        "m-pathway": MessageAnnotation(
            importance=1, target_jobs=frozenset({"faculty-research"}),
            target_campuses=_ALL_CAMPUSES,
            topics=("health-biology-research-stories",)),
        "m-capstone": MessageAnnotation(
            importance=2,
            target_jobs=frozenset({"faculty-research", "student-services"}),
            target_campuses=_ALL_CAMPUSES,
            topics=("talk-symposium-lectures-announcements",)),
        "m-dining": MessageAnnotation(
            importance=1, target_jobs=_ALL_JOBS,
            target_campuses=frozenset({"campus-2"}),
            topics=("operations-awareness-facility-closures",)),
    }
    return validate_draft(Draft(
        id="brief-2021-10-27",
        issue_date=dt.date(2021, 10, 27),
        messages=messages,
        annotations=annotations,
    ))


def demo_profiles() -> list[EmployeeProfile]:
    return [
        # sports-loving student-services staffer on the main campus
        EmployeeProfile(
            id="emp-ada", campus="campus-1", job="student-services",
            interest={"sports-spirit": 1,
                      "health-biology-research-stories": 1},
            relevance={"talk-symposium-lectures-announcements": 1},
        ),
        # operations staffer on campus 2, keeps an eye on everything local
        EmployeeProfile(
            id="emp-bo", campus="campus-2", job="campus-operations",
            interest={"operations-awareness-facility-closures": 1,
                      "community-service-social-justice-underserved-population": 1},
            relevance={"operations-awareness-facility-closures": 1,
                       "policies-admin-news-governance": 1},
            cross_campus_interest=1,
        ),
        # researcher who reads broadly across campuses
        EmployeeProfile(
            id="emp-cy", campus="campus-1", job="faculty-research",
            interest={"health-biology-research-stories": 1,
                      "talk-symposium-lectures-announcements": 1},
            relevance={"health-biology-research-stories": 1},
            cross_campus_interest=1,
            cross_campus_relevance=1,
        ),
    ]


@dataclass(frozen=True)
class DemoStudy:
    """Hand-built three-participant study for checking analytics by hand."""

    logs: list
    answers: list
    assignments: list
    newsletters: list
    week_drafts: dict


def demo_study() -> DemoStudy:
    """Three participants, three weeks, six messages per brief.

    Week 1 is the all-original baseline; weeks 2 and 3 are experimental.
    The data is small enough that every group rate in the report has a
    pencil-and-paper value, e.g. ada's brief recognition over weeks 2 and
    3 is (2/6 + 1/6) / 2 = 0.25 and the non-top pool recognizes nothing.
    cy's week 3 session runs past the 30 minute cutoff on purpose, and
    bo answers the interest question with the same rating twice, so the
    outlier and exclusion paths are exercised too.
    """
    # imported here: simulate pulls the marginals from this module at load
    from .composer import PersonalizedNewsletter, TreatmentCell
    from .simulate import (LOG_DOMAIN, ReadingLogRow, SurveyAnswer,
                           TreatmentAssignment)

    def ids(week):
        return [f"fx{week}m{j}" for j in range(1, 7)]

    def nl(emp, draft, subject_message, top_news, uwide):
        return PersonalizedNewsletter(
            employee_id=emp, draft_id=draft,
            subject=f"Brief {draft}",
            subject_message=subject_message,
            top_news=list(top_news),
            sections=[("u-wide", list(uwide))],
        )

    def row(emp, draft, seconds, hour=9):
        start = dt.datetime(2021, 11, 3, hour, 0, tzinfo=dt.timezone.utc)
        return ReadingLogRow(
            domain=LOG_DOMAIN, path=f"/{draft}/{emp}.html",
            start_ts=start, end_ts=start + dt.timedelta(seconds=seconds),
            url=f"https://{LOG_DOMAIN}/{draft}/{emp}.html",
            tab_title=f"Brief {draft}")

    def survey(emp, draft, recognized, interest, all_ids):
        out = [SurveyAnswer(emp, draft, "recognition",
                            recognized.get(mid, "No"), mid)
               for mid in all_ids]
        out.append(SurveyAnswer(emp, draft, "interest", interest))
        return out

    assignments = [
        TreatmentAssignment("ada", TreatmentCell(3, 3, 1)),
        TreatmentAssignment("bo", TreatmentCell(1, 1, 1)),
        TreatmentAssignment("cy", TreatmentCell(4, 4, 2)),
    ]

    newsletters = []
    for emp in ("ada", "bo", "cy"):
        newsletters.append(nl(emp, "fx1", None, ids(1)[:2], ids(1)[2:]))
    for week in (2, 3):
        m = ids(week)
        newsletters.append(nl("ada", f"fx{week}", m[0], m[:4], m[4:]))
        newsletters.append(nl("bo", f"fx{week}", None, m[:2], m[2:]))
        newsletters.append(nl("cy", f"fx{week}", m[4], m[:5], [m[5]]))

    answers = []
    answers += survey("ada", "fx1",
                      {"fx1m1": "Skimmed", "fx1m3": "ReadFully"}, 3, ids(1))
    answers += survey("bo", "fx1", {}, 1, ids(1))
    answers += survey("cy", "fx1",
                      {m: "ReadFully" for m in ids(1)}, 4, ids(1))

    answers += survey("ada", "fx2",
                      {"fx2m1": "ReadFully", "fx2m2": "Skimmed"}, 4, ids(2))
    answers += survey("bo", "fx2", {}, 2, ids(2))
    answers += survey("cy", "fx2",
                      {"fx2m5": "ReadFully", "fx2m1": "Skimmed"}, 3, ids(2))

    answers += survey("ada", "fx3", {"fx3m1": "Skimmed"}, 3, ids(3))
    answers += survey("bo", "fx3", {"fx3m2": "ReadFully"}, 2, ids(3))
    answers += survey("cy", "fx3",
                      {"fx3m5": "Skimmed", "fx3m2": "ReadFully"}, 2, ids(3))

    logs = [
        row("ada", "fx1", 100),
        row("cy", "fx1", 200),
        row("ada", "fx2", 70, hour=9),
        row("ada", "fx2", 50, hour=11),  # split session, sums to 120
        row("cy", "fx2", 150),
        row("ada", "fx3", 80),
        row("bo", "fx3", 90),
        row("cy", "fx3", 2000),  # past the 30 minute cutoff, dropped
    ]
    return DemoStudy(logs=logs, answers=answers, assignments=assignments,
                     newsletters=newsletters,
                     week_drafts={1: "fx1", 2: "fx2", 3: "fx3"})
