"""Preference scoring, cross-checked against a naive transcription.

The exhaustive grid walks every topic count, bit pattern, importance level,
membership combination and both cross-campus gate modes, and demands
agreement with the reference to 1e-12.
"""
import datetime as dt
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from briefmix.catalog import default_campuses, load_job_catalog, load_topic_catalog
from briefmix.model import (TOP_NEWS, U_WIDE, Draft, EmployeeProfile, Message,
                            MessageAnnotation, UnknownTopic)
from briefmix.scoring import ScoringOptions, score_matrix, score_message
from oracles import naive_scores, scoring_grid

REGULAR = [t.id for t in load_topic_catalog() if not t.special]
JOBS = [j.id for j in load_job_catalog()]
CAMPUS_IDS = [c.id for c in default_campuses(5)]

FIELDS = ("emp_interest", "emp_relevance", "emp_pref",
          "org_relevance", "org_importance", "org_pref")


def as_tuple(score):
    return tuple(getattr(score, f) for f in FIELDS)


def test_exhaustive_grid_matches_reference():
    for gate in ("and", "or"):
        opts = ScoringOptions(cross_campus_gate=gate)
        for pkw, akw in scoring_grid(REGULAR[:4], CAMPUS_IDS[0],
                                     CAMPUS_IDS[1], JOBS[0], JOBS[1]):
            profile = EmployeeProfile(**pkw)
            ann = MessageAnnotation(**akw)
            got = as_tuple(score_message(profile, ann, opts))
            want = naive_scores(profile, ann, gate)
            assert all(abs(g - w) <= 1e-12 for g, w in zip(got, want)), \
                (pkw, akw, gate, got, want)


def test_worked_example():
    # single interesting topic, own campus, targeted job, max importance
    profile = EmployeeProfile(id="e1", campus=CAMPUS_IDS[0], job=JOBS[0],
                              interest={REGULAR[0]: 1},
                              relevance={})
    ann = MessageAnnotation(importance=4, target_jobs=frozenset({JOBS[0]}),
                            target_campuses=frozenset({CAMPUS_IDS[0]}),
                            topics=(REGULAR[0],))
    s = score_message(profile, ann)
    assert s.emp_interest == 1.0
    assert s.emp_relevance == 0.0
    assert s.emp_pref == 0.5
    assert s.org_relevance == 1.0
    assert s.org_importance == 1.0
    assert s.org_pref == 1.0


def test_gate_modes_differ_only_in_relevance_zeroing():
    # own-campus message, but the employee never looks across campuses:
    # the literal "or" reading zeroes relevance even here
    profile = EmployeeProfile(id="e1", campus=CAMPUS_IDS[0], job=JOBS[0],
                              relevance={REGULAR[0]: 1},
                              cross_campus_relevance=0)
    ann = MessageAnnotation(importance=2, target_jobs=frozenset(),
                            target_campuses=frozenset({CAMPUS_IDS[0]}),
                            topics=(REGULAR[0],))
    assert score_message(profile, ann, ScoringOptions("and")).emp_relevance == 1.0
    assert score_message(profile, ann, ScoringOptions("or")).emp_relevance == 0.0


def test_unanswered_topics_count_as_zero():
    profile = EmployeeProfile(id="e1", campus=CAMPUS_IDS[0], job=JOBS[0],
                              interest={REGULAR[0]: 1})
    ann = MessageAnnotation(importance=1, target_jobs=frozenset(),
                            target_campuses=frozenset({CAMPUS_IDS[0]}),
                            topics=(REGULAR[0], REGULAR[1]))
    assert score_message(profile, ann).emp_interest == 0.5


def test_unknown_topic_rejected():
    profile = EmployeeProfile(id="e1", campus=CAMPUS_IDS[0], job=JOBS[0])
    ann = MessageAnnotation(importance=1, target_jobs=frozenset(),
                            target_campuses=frozenset({CAMPUS_IDS[0]}),
                            topics=("no-such-topic",))
    with pytest.raises(UnknownTopic):
        score_message(profile, ann)


campuses_st = st.sampled_from(CAMPUS_IDS[:2])
profiles_st = st.builds(
    EmployeeProfile,
    id=st.just("e"),
    campus=campuses_st,
    job=st.sampled_from(JOBS),
    interest=st.dictionaries(st.sampled_from(REGULAR), st.integers(0, 1)),
    relevance=st.dictionaries(st.sampled_from(REGULAR), st.integers(0, 1)),
    cross_campus_interest=st.integers(0, 1),
    cross_campus_relevance=st.integers(0, 1),
)
annotations_st = st.builds(
    MessageAnnotation,
    importance=st.integers(1, 4),
    target_jobs=st.frozensets(st.sampled_from(JOBS)),
    target_campuses=st.frozensets(campuses_st, min_size=1),
    topics=st.lists(st.sampled_from(REGULAR), min_size=1, max_size=4,
                    unique=True).map(tuple),
)
gates_st = st.sampled_from(["and", "or"])


@settings(max_examples=300, deadline=None)
@given(profiles_st, annotations_st, gates_st)
def test_midpoints_and_bounds(profile, ann, gate):
    s = score_message(profile, ann, ScoringOptions(gate))
    assert abs(s.emp_pref - (s.emp_interest + s.emp_relevance) / 2) <= 1e-12
    assert abs(s.org_pref - (s.org_relevance + s.org_importance) / 2) <= 1e-12
    for f in FIELDS:
        assert 0.0 <= getattr(s, f) <= 1.0
    assert s.org_relevance in (0.0, 1.0)
    assert abs(s.org_importance - (ann.importance - 1) / 3) <= 1e-12


@settings(max_examples=300, deadline=None)
@given(profiles_st, annotations_st, gates_st)
def test_flipping_interest_bit_never_lowers_interest(profile, ann, gate):
    opts = ScoringOptions(gate)
    before = score_message(profile, ann, opts).emp_interest
    boosted = dict(profile.interest)
    boosted[ann.topics[0]] = 1
    richer = EmployeeProfile(id=profile.id, campus=profile.campus,
                             job=profile.job, interest=boosted,
                             relevance=profile.relevance,
                             cross_campus_interest=profile.cross_campus_interest,
                             cross_campus_relevance=profile.cross_campus_relevance)
    after = score_message(richer, ann, opts).emp_interest
    assert after >= before - 1e-12


def test_score_matrix_covers_all_pairs():
    ann = MessageAnnotation(importance=3, target_jobs=frozenset({JOBS[0]}),
                            target_campuses=frozenset(CAMPUS_IDS),
                            topics=(REGULAR[0],))
    draft = Draft(
        id="d1", issue_date=dt.date(2021, 10, 27),
        messages=tuple(
            Message(f"m{i}", f"Title {i}", "", "", U_WIDE if i else TOP_NEWS, i)
            for i in range(3)),
        annotations={f"m{i}": ann for i in range(3)},
    )
    profiles = [
        EmployeeProfile(id=f"e{j}", campus=CAMPUS_IDS[0], job=JOBS[0])
        for j in range(2)
    ]
    matrix = score_matrix(draft, profiles)
    assert set(matrix.keys()) == {(f"e{j}", f"m{i}")
                                  for j in range(2) for i in range(3)}
    rows = matrix.to_rows()
    assert len(rows) == 6
    header = rows[0].keys()
    assert {"employee_id", "message_id", *FIELDS} == set(header)
