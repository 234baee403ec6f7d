"""Analytics: outcome mapping, reading time, group metrics, report grids.

The core fixture is a tiny three-participant study built entirely by hand
(newsletters, answers, log rows), so every group rate has a pencil-and-paper
value the code must reproduce exactly.
"""
import datetime as dt
import json
import random

import numpy as np
import pytest

from briefmix.composer import PersonalizedNewsletter, TreatmentCell
from briefmix.metrics import (MissingRoleTags, build_report, group_metrics,
                              reading_time_from_logs, recognition_outcomes)
from briefmix.simulate import (LOG_DOMAIN, ReadingLogRow, SurveyAnswer,
                               TreatmentAssignment)

UTC = dt.timezone.utc


def _nl(emp, draft, subject_message, top_news, uwide):
    return PersonalizedNewsletter(
        employee_id=emp, draft_id=draft,
        subject=f"Brief {draft}",
        subject_message=subject_message,
        top_news=list(top_news),
        sections=[("u-wide", list(uwide))],
    )


def _row(emp, draft, seconds, hour=9):
    start = dt.datetime(2021, 11, 3, hour, 0, tzinfo=UTC)
    return ReadingLogRow(
        domain=LOG_DOMAIN, path=f"/{draft}/{emp}.html",
        start_ts=start, end_ts=start + dt.timedelta(seconds=seconds),
        url=f"https://{LOG_DOMAIN}/{draft}/{emp}.html",
        tab_title=f"Brief {draft}")


def _answers(emp, draft, recognized, interest, all_ids):
    out = []
    for mid in all_ids:
        out.append(SurveyAnswer(emp, draft, "recognition",
                                recognized.get(mid, "No"), mid))
    out.append(SurveyAnswer(emp, draft, "interest", interest))
    return out


def ids(week):
    return [f"w{week}m{j}" for j in range(1, 9)]


def build_fixture():
    """Three participants, one baseline week plus two experimental weeks."""
    assignments = [
        TreatmentAssignment("ada", TreatmentCell(3, 3, 1)),
        TreatmentAssignment("bo", TreatmentCell(1, 1, 1)),
        TreatmentAssignment("cy", TreatmentCell(4, 4, 2)),
    ]
    newsletters = []
    # week 1: everyone gets the untouched original layout
    for emp in ("ada", "bo", "cy"):
        newsletters.append(_nl(emp, "wk1", None, ids(1)[:2], ids(1)[2:]))
    for week in (2, 3):
        m = ids(week)
        newsletters.append(_nl("ada", f"wk{week}", m[0], m[:4], m[4:]))
        newsletters.append(_nl("bo", f"wk{week}", None, m[:2], m[2:]))
        newsletters.append(_nl("cy", f"wk{week}", m[4], m[:5],
                               [m[5], m[7], m[6]]))

    answers = []
    answers += _answers("ada", "wk1", {"w1m1": "Skimmed", "w1m3": "ReadFully"},
                        3, ids(1))
    answers += _answers("bo", "wk1", {}, 1, ids(1))
    answers += _answers("cy", "wk1", {m: "ReadFully" for m in ids(1)}, 4, ids(1))

    answers += _answers("ada", "wk2", {"w2m1": "ReadFully", "w2m2": "Skimmed"},
                        4, ids(2))
    answers += _answers("bo", "wk2", {}, 2, ids(2))
    answers += _answers("cy", "wk2", {"w2m5": "ReadFully", "w2m1": "Skimmed"},
                        3, ids(2))

    answers += _answers("ada", "wk3", {"w3m1": "Skimmed"}, 3, ids(3))
    answers += _answers("bo", "wk3", {"w3m2": "ReadFully"}, 2, ids(3))
    answers += _answers("cy", "wk3", {"w3m5": "Skimmed", "w3m2": "ReadFully"},
                        2, ids(3))

    logs = [
        _row("ada", "wk1", 100),
        _row("cy", "wk1", 200),
        _row("ada", "wk2", 70, hour=9),
        _row("ada", "wk2", 50, hour=11),  # split session, sums to 120
        _row("cy", "wk2", 150),
        _row("ada", "wk3", 80),
        _row("bo", "wk3", 90),
        _row("cy", "wk3", 2000),  # past the 30-minute cutoff, dropped
    ]
    week_drafts = {1: "wk1", 2: "wk2", 3: "wk3"}
    return logs, answers, assignments, newsletters, week_drafts


def fixture_report():
    logs, answers, assignments, newsletters, week_drafts = build_fixture()
    return group_metrics(logs, answers, assignments, newsletters,
                         week_drafts=week_drafts, baseline_week=1)


def cell(report, label, metric):
    row = {g.label: g for g in report.groups}[label]
    return row.metrics[metric]


# --- small mappings ---------------------------------------------------------

def test_recognition_outcome_mapping():
    rec, read = recognition_outcomes(["Skimmed", "No", "ReadFully", "NotSure"])
    assert rec == [1, 0, 1, 0]
    assert read == [0, 0, 1, 0]
    rec, read = recognition_outcomes(["No", "No"])
    assert rec == [0, 0] and read == [0, 0]
    rec, read = recognition_outcomes(["ReadFully"])
    assert rec == [1] and read == [1]


def test_reading_time_sums_matching_rows():
    rows = [_row("ada", "wk2", 40), _row("ada", "wk2", 20, hour=14),
            _row("bo", "wk2", 500)]
    seconds, outliers = reading_time_from_logs(rows, "wk2/ada.html")
    assert seconds == 60.0 and outliers == 0


def test_reading_time_outlier_dropped():
    rows = [_row("cy", "wk3", 31 * 60)]
    seconds, outliers = reading_time_from_logs(rows, "wk3/cy.html")
    assert seconds == 0.0 and outliers == 1


def test_reading_time_no_match():
    rows = [_row("cy", "wk3", 120)]
    assert reading_time_from_logs(rows, "wk9/zz.html") == (0.0, 0)


# --- fixture: exclusions ----------------------------------------------------

def test_exclusions_found():
    report = fixture_report()
    assert report.exclusions.interest_constant == ["bo"]
    assert report.exclusions.opened_all == ["ada", "cy"]
    assert report.exclusions.opened_none == []
    assert report.exclusions.outlier_sessions == 1


# --- fixture: hand-computed cells -------------------------------------------

def test_interest_rates_exact():
    report = fixture_report()
    assert cell(report, "A3", "interest_rate").mean == 1.0
    assert cell(report, "A4", "interest_rate").mean == 0.5
    assert cell(report, "A1", "interest_rate") is None  # bo excluded
    assert cell(report, "C1", "interest_rate").mean == 1.0  # ada only


def test_open_rates_exact():
    report = fixture_report()
    assert cell(report, "A1", "open_rate").mean == 0.5  # bo, 1 of 2 weeks
    assert cell(report, "A3", "open_rate") is None  # ada opened all
    assert cell(report, "A4", "open_rate") is None
    assert cell(report, "C1", "open_rate").mean == 0.5


def test_reading_seconds_exact():
    report = fixture_report()
    assert cell(report, "A3", "reading_seconds").mean == 100.0  # (120+80)/2
    assert cell(report, "A1", "reading_seconds").mean == 90.0
    # cy's week-3 session is an outlier, so only week 2 counts
    assert cell(report, "A4", "reading_seconds").mean == 150.0
    c1 = cell(report, "C1", "reading_seconds")
    assert c1.mean == 95.0 and c1.sd == 5.0 and c1.n == 2


def test_brief_recognition_exact():
    report = fixture_report()
    assert cell(report, "A3", "brief_recognition_rate").mean == \
        pytest.approx((2 / 8 + 1 / 8) / 2, abs=1e-12)
    assert cell(report, "A1", "brief_recognition_rate").mean == \
        pytest.approx(1 / 8, abs=1e-12)
    assert cell(report, "A4", "brief_recognition_rate").mean == \
        pytest.approx(1 / 4, abs=1e-12)
    c1 = cell(report, "C1", "brief_recognition_rate")
    assert c1.mean == pytest.approx((0.1875 + 0.125) / 2, abs=1e-12)


def test_subject_message_cells_exact():
    report = fixture_report()
    assert cell(report, "A3", "message_recognition_rate").mean == 1.0
    assert cell(report, "A3", "message_read_rate").mean == 0.5
    assert cell(report, "A4", "message_recognition_rate").mean == 1.0
    assert cell(report, "A4", "message_read_rate").mean == 0.5
    assert cell(report, "A1", "message_recognition_rate") is None


def test_top_news_cells_exact():
    report = fixture_report()
    assert cell(report, "B3", "message_recognition_rate").mean == \
        pytest.approx((2 / 4 + 1 / 4) / 2, abs=1e-12)
    assert cell(report, "B3", "message_read_rate").mean == \
        pytest.approx((1 / 4 + 0 / 4) / 2, abs=1e-12)
    assert cell(report, "B1", "message_recognition_rate").mean == 0.5
    assert cell(report, "B4", "message_recognition_rate").mean == \
        pytest.approx(2 / 5, abs=1e-12)
    assert cell(report, "B4", "message_read_rate").mean == \
        pytest.approx(1 / 5, abs=1e-12)


def test_pool_cells_exact():
    report = fixture_report()
    non_s = cell(report, "non-s", "message_recognition_rate")
    expected = (1 / 14 + 1 / 8 + 1 / 7) / 3
    assert non_s.mean == pytest.approx(expected, abs=1e-12)
    assert non_s.n == 3
    non_s_read = cell(report, "non-s", "message_read_rate")
    assert non_s_read.mean == pytest.approx((0 + 1 / 8 + 1 / 14) / 3, abs=1e-12)
    non_t = cell(report, "non-t", "message_recognition_rate")
    assert non_t.mean == 0.0 and non_t.sd == 0.0
    assert cell(report, "non-s", "interest_rate") is None


def test_c_rows_have_no_message_cells():
    report = fixture_report()
    assert cell(report, "C1", "message_recognition_rate") is None
    assert cell(report, "C2", "message_read_rate") is None


# --- structure and errors ----------------------------------------------------

def test_grid_has_every_level_and_pools():
    report = fixture_report()
    labels = [g.label for g in report.groups]
    assert labels == (["non-s"] + [f"A{i}" for i in range(1, 5)]
                      + ["non-t"] + [f"B{i}" for i in range(1, 6)]
                      + [f"C{i}" for i in range(1, 6)])
    for g in report.groups:
        for key, c in g.metrics.items():
            if c is None or key == "reading_seconds":
                continue
            assert 0.0 <= c.mean <= 1.0


def test_missing_role_tags():
    logs, answers, assignments, newsletters, week_drafts = build_fixture()
    short = [nl for nl in newsletters
             if not (nl.employee_id == "cy" and nl.draft_id == "wk3")]
    with pytest.raises(MissingRoleTags):
        group_metrics(logs, answers, assignments, short,
                      week_drafts=week_drafts, baseline_week=1)


def test_repeated_draft_rejected():
    logs, answers, assignments, newsletters, week_drafts = build_fixture()
    week_drafts = dict(week_drafts)
    week_drafts[3] = "wk2"
    with pytest.raises(ValueError):
        group_metrics(logs, answers, assignments, newsletters,
                      week_drafts=week_drafts, baseline_week=1)


def test_input_order_does_not_matter():
    logs, answers, assignments, newsletters, week_drafts = build_fixture()
    base = group_metrics(logs, answers, assignments, newsletters,
                         week_drafts=week_drafts, baseline_week=1)
    rnd = random.Random(7)
    for _ in range(3):
        rnd.shuffle(logs)
        rnd.shuffle(answers)
        rnd.shuffle(newsletters)
        rnd.shuffle(assignments)
        again = group_metrics(logs, answers, assignments, newsletters,
                              week_drafts=week_drafts, baseline_week=1)
        assert again.to_dict() == base.to_dict()


def test_no_opens_anywhere():
    logs, answers, assignments, newsletters, week_drafts = build_fixture()
    quiet = [a for a in answers if a.kind == "interest"]
    quiet += [SurveyAnswer(a.employee_id, a.draft_id, "recognition", "No",
                           a.message_id)
              for a in answers if a.kind == "recognition"]
    report = group_metrics([], quiet, assignments, newsletters,
                           week_drafts=week_drafts, baseline_week=1)
    # everyone opened none, so the open-rate analysis has nobody left
    assert sorted(report.exclusions.opened_none) == ["ada", "bo", "cy"]
    for label in ("A1", "A3", "A4"):
        assert cell(report, label, "open_rate") is None
        assert cell(report, label, "reading_seconds") is None


def test_everything_read_means_rates_one():
    logs, answers, assignments, newsletters, week_drafts = build_fixture()
    full = [a for a in answers if a.kind == "interest"]
    # vary the ratings so nobody trips the constant-interest exclusion
    full = [SurveyAnswer(a.employee_id, a.draft_id, "interest",
                         3 + (len(a.employee_id) + int(a.draft_id[-1])) % 2)
            for a in full]
    full += [SurveyAnswer(a.employee_id, a.draft_id, "recognition",
                          "ReadFully", a.message_id)
             for a in answers if a.kind == "recognition"]
    opened = [_row(emp, wk, 100 + 10 * i)
              for i, (emp, wk) in enumerate(
                  (e, w) for e in ("ada", "bo", "cy")
                  for w in ("wk1", "wk2", "wk3"))]
    report = group_metrics(opened, full, assignments, newsletters,
                           week_drafts=week_drafts, baseline_week=1)
    for label in ("A1", "A3", "A4", "B1", "B3", "B4", "C1", "C2",
                  "non-s", "non-t"):
        for metric in ("brief_recognition_rate", "message_recognition_rate",
                       "message_read_rate", "interest_rate"):
            c = cell(report, label, metric)
            if c is not None:
                assert c.mean == 1.0


# --- report assembly ---------------------------------------------------------

def test_build_report_hypothesis_grid():
    from briefmix.stats import holm_bonferroni

    logs, answers, assignments, newsletters, week_drafts = build_fixture()
    report = build_report(logs, answers, assignments, newsletters,
                          week_drafts=week_drafts, baseline_week=1)
    assert report.groups  # carries the same grid
    families = {}
    for h in report.hypotheses:
        if h.p_raw is not None:
            families.setdefault(h.family, []).append((h.p_raw, h.p_adj))
    assert families
    for fam, pairs in families.items():
        raw = [p for p, _ in pairs]
        adj = [a for _, a in pairs]
        assert adj == pytest.approx(holm_bonferroni(raw), abs=1e-12)
    # single-participant strategic contrasts cannot be tested
    strategic = [h for h in report.hypotheses
                 if h.metric == "open_rate"]
    assert strategic and all(h.p_raw is None for h in strategic)


def test_build_report_planted_contrasts():
    logs, answers, assignments, newsletters, week_drafts = build_fixture()
    report = build_report(logs, answers, assignments, newsletters,
                          week_drafts=week_drafts, baseline_week=1)
    assert [p.treatment for p in report.planted] == \
        ["subject-pool", "top-news-pool"]
    subject = report.planted[0]
    assert subject.control == "non-s"
    assert subject.treatment_mean == 1.0  # four subject answers, all seen
    assert subject.p_raw is not None and 0.0 <= subject.p_raw <= 1.0
    top = report.planted[1]
    assert top.control == "non-t"
    assert top.difference == pytest.approx(
        top.treatment_mean - top.control_mean, abs=1e-12)


def test_report_serializes_and_renders():
    logs, answers, assignments, newsletters, week_drafts = build_fixture()
    report = build_report(logs, answers, assignments, newsletters,
                          week_drafts=week_drafts, baseline_week=1)
    blob = json.dumps(report.to_dict())
    assert "A3" in blob and "non-t" in blob
    text = report.render_markdown()
    assert "| A3 |" in text or "| A3" in text
    assert "non-s" in text
    assert "%" in text
