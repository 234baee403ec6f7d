"""Turn logs, survey answers, and newsletters into the experiment report.

The report mirrors how the study presented results: a group grid (one row
per treatment level plus the non-subject/non-top-news message pools) over
six metrics, and a hypothesis grid of treatment-versus-control tests with
Holm-adjusted p-values. Message-level claims need to know each message's
role in each reader's newsletter (subject line, top news, neither), which
is exactly what the composer's output carries.

Conventions, following the study's analysis section:
- a newsletter counts as opened when any log session exists for it;
- recognition means an answer of Skimmed or ReadFully; read-in-detail
  means ReadFully; interest means a rating of 3 or higher;
- message-level rates condition on opened newsletters;
- participants with identical interest ratings across all experimental
  weeks leave the interest analysis; participants who opened all or none
  of them leave the open-rate analysis;
- sessions longer than 30 minutes are dropped as outliers;
- per-participant baselines come from the designated all-original week.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np

from .composer import PersonalizedNewsletter
from .simulate import ReadingLogRow, SurveyAnswer, TreatmentAssignment
from .stats import holm_bonferroni, linear_lrt, pairwise_test

__all__ = [
    "MissingRoleTags",
    "MetricCell",
    "GroupRow",
    "HypothesisRow",
    "Exclusions",
    "MetricsReport",
    "recognition_outcomes",
    "reading_time_from_logs",
    "group_metrics",
    "build_report",
    "METRIC_KEYS",
]

OUTLIER_SECONDS = 30 * 60

METRIC_KEYS = ("interest_rate", "reading_seconds", "brief_recognition_rate",
               "open_rate", "message_recognition_rate", "message_read_rate")

_RATE_KEYS = tuple(k for k in METRIC_KEYS if k != "reading_seconds")


class MissingRoleTags(ValueError):
    """Survey rows reference a newsletter or message with no role tags."""


def recognition_outcomes(values: Sequence[str]) -> tuple[list[int], list[int]]:
    """Map survey options to (recognition, read_in_detail) binary lists."""
    recognition = [1 if v in ("Skimmed", "ReadFully") else 0 for v in values]
    read_in_detail = [1 if v == "ReadFully" else 0 for v in values]
    return recognition, read_in_detail


def reading_time_from_logs(rows: Sequence[ReadingLogRow],
                           identifier: str) -> tuple[float, int]:
    """Total seconds across sessions matching one newsletter, dropping
    sessions over 30 minutes; returns (seconds, dropped-session count)."""
    total = 0.0
    outliers = 0
    for row in rows:
        if identifier not in row.path and identifier != row.tab_title:
            continue
        seconds = (row.end_ts - row.start_ts).total_seconds()
        if seconds > OUTLIER_SECONDS:
            outliers += 1
            continue
        total += seconds
    return total, outliers


@dataclass(frozen=True)
class MetricCell:
    mean: float
    sd: float
    n: int


@dataclass
class GroupRow:
    label: str  # "A3", "non-s", ...
    factor: str  # "A" | "B" | "C" | "pool"
    level: Optional[int]
    metrics: dict[str, Optional[MetricCell]]


@dataclass
class HypothesisRow:
    family: str
    metric: str
    treatment: str
    control: str
    treatment_mean: Optional[float]
    control_mean: Optional[float]
    difference: Optional[float]
    p_raw: Optional[float]
    p_adj: Optional[float] = None


@dataclass
class Exclusions:
    interest_constant: list[str] = field(default_factory=list)
    opened_all: list[str] = field(default_factory=list)
    opened_none: list[str] = field(default_factory=list)
    outlier_sessions: int = 0


@dataclass
class MetricsReport:
    baseline_week: int
    weeks: list[int]
    groups: list[GroupRow]
    exclusions: Exclusions
    hypotheses: list[HypothesisRow] = field(default_factory=list)
    planted: list[HypothesisRow] = field(default_factory=list)

    def group(self, label: str) -> GroupRow:
        for g in self.groups:
            if g.label == label:
                return g
        raise KeyError(label)

    def to_dict(self) -> dict:
        def cell(c):
            return None if c is None else {"mean": c.mean, "sd": c.sd, "n": c.n}

        def hyp(h):
            return {
                "family": h.family, "metric": h.metric,
                "treatment": h.treatment, "control": h.control,
                "treatment_mean": h.treatment_mean,
                "control_mean": h.control_mean,
                "difference": h.difference,
                "p_raw": h.p_raw, "p_adj": h.p_adj,
            }

        return {
            "baseline_week": self.baseline_week,
            "weeks": self.weeks,
            "groups": [{
                "label": g.label, "factor": g.factor, "level": g.level,
                "metrics": {k: cell(c) for k, c in g.metrics.items()},
            } for g in self.groups],
            "exclusions": {
                "interest_constant": self.exclusions.interest_constant,
                "opened_all": self.exclusions.opened_all,
                "opened_none": self.exclusions.opened_none,
                "outlier_sessions": self.exclusions.outlier_sessions,
            },
            "hypotheses": [hyp(h) for h in self.hypotheses],
            "planted": [hyp(h) for h in self.planted],
        }

    def render_markdown(self) -> str:
        def fmt(key, c):
            if c is None:
                return ""
            if key == "reading_seconds":
                return f"{c.mean:.0f}s (sd {c.sd:.0f}, n {c.n})"
            return f"{100 * c.mean:.1f}% (sd {100 * c.sd:.1f}, n {c.n})"

        def fmt_p(p):
            return "" if p is None else f"{p:.4g}"

        def fmt_mean(metric, v):
            if v is None:
                return ""
            return f"{v:.0f}s" if metric == "reading_seconds" else f"{100 * v:.1f}%"

        lines = ["# Experiment report", ""]
        exp_weeks = [w for w in self.weeks if w != self.baseline_week]
        lines.append(f"Baseline week: {self.baseline_week}. "
                     f"Experimental weeks: {', '.join(map(str, exp_weeks))}.")
        ex = self.exclusions
        lines.append(
            f"Excluded from interest analysis (flat ratings): "
            f"{', '.join(ex.interest_constant) or 'none'}. "
            f"Excluded from open analysis: "
            f"{', '.join(ex.opened_all + ex.opened_none) or 'none'}. "
            f"Outlier sessions dropped: {ex.outlier_sessions}.")
        lines += ["", "## Group performance", ""]
        header = ("| Group | Interest % | Reading time | Brief recognition % "
                  "| Open % | Message recognition % | Read-in-detail % |")
        lines.append(header)
        lines.append("|" + "---|" * 7)
        for g in self.groups:
            cells = [fmt(k, g.metrics[k]) for k in METRIC_KEYS]
            lines.append("| " + " | ".join([g.label] + cells) + " |")

        def hyp_table(rows):
            out = ["| Contrast | Metric | Treatment | Control | Diff "
                   "| p | p (Holm) |", "|" + "---|" * 7]
            for h in rows:
                out.append("| " + " | ".join([
                    f"{h.treatment} vs {h.control}", h.metric,
                    fmt_mean(h.metric, h.treatment_mean),
                    fmt_mean(h.metric, h.control_mean),
                    fmt_mean(h.metric, h.difference),
                    fmt_p(h.p_raw), fmt_p(h.p_adj),
                ]) + " |")
            return out

        if self.hypotheses:
            lines += ["", "## Treatment contrasts", ""]
            lines += hyp_table(self.hypotheses)
        if self.planted:
            lines += ["", "## Placement contrasts", ""]
            lines += hyp_table(self.planted)
        return "\n".join(lines) + "\n"


@dataclass
class _WeekObs:
    """One participant's data for one experimental week."""
    week: int
    opened: bool
    interest: Optional[int]  # raw 1..4 rating
    seconds: Optional[float]  # None when unopened or all sessions dropped
    brief_outcomes: list[int]  # recognition per surveyed message
    subject_rec: list[int]
    subject_read: list[int]
    top_rec: list[int]  # every top-news message, subject included
    top_read: list[int]
    top_ns_rec: list[int]  # top news minus the subject message
    top_ns_read: list[int]
    non_s_rec: list[int]
    non_s_read: list[int]
    non_t_rec: list[int]
    non_t_read: list[int]


@dataclass
class _Participant:
    employee_id: str
    cell: tuple[int, int, int]
    weeks: list[_WeekObs] = field(default_factory=list)
    base_open: float = 0.0
    base_interest: float = 0.0
    base_recognition: float = 0.0
    base_seconds: float = 0.0


def _collect(logs, answers, assignments, newsletters, week_drafts,
             baseline_week) -> tuple[dict[str, _Participant], Exclusions]:
    week_of = {}
    for week, draft in week_drafts.items():
        if draft in week_of:
            raise ValueError(f"draft {draft} serves weeks {week_of[draft]} "
                             f"and {week}; weekly drafts must be distinct")
        week_of[draft] = week
    if baseline_week not in week_drafts:
        raise ValueError(f"baseline week {baseline_week} has no draft")

    nl_by_key: dict[tuple[str, str], PersonalizedNewsletter] = {}
    for nl in newsletters:
        nl_by_key[(nl.employee_id, nl.draft_id)] = nl

    sessions: dict[tuple[str, str], list[float]] = {}
    outliers = 0
    for row in logs:
        parts = row.path.strip("/").split("/")
        if len(parts) != 2 or not parts[1].endswith(".html"):
            continue
        key = (parts[1][:-len(".html")], parts[0])
        seconds = (row.end_ts - row.start_ts).total_seconds()
        if seconds > OUTLIER_SECONDS:
            outliers += 1
            sessions.setdefault(key, [])
            continue
        sessions.setdefault(key, []).append(seconds)

    recog: dict[tuple[str, str], dict[str, str]] = {}
    interest: dict[tuple[str, str], int] = {}
    for a in answers:
        key = (a.employee_id, a.draft_id)
        if key not in nl_by_key:
            raise MissingRoleTags(
                f"answers reference {a.employee_id} x {a.draft_id} "
                f"but no composed newsletter was provided")
        if a.kind == "interest":
            interest[key] = int(a.value)
        elif a.kind == "recognition":
            recog.setdefault(key, {})[a.message_id] = str(a.value)

    participants: dict[str, _Participant] = {}
    for asg in assignments:
        participants[asg.employee_id] = _Participant(
            employee_id=asg.employee_id,
            cell=(asg.cell.a, asg.cell.b, asg.cell.c))

    exp_weeks = sorted(w for w in week_drafts if w != baseline_week)
    for emp, part in participants.items():
        base_key = (emp, week_drafts[baseline_week])
        base_answers = recog.get(base_key, {})
        base_sessions = sessions.get(base_key, [])
        part.base_open = 1.0 if base_key in sessions else 0.0
        part.base_interest = 1.0 if interest.get(base_key, 0) >= 3 else 0.0
        if part.base_open and base_answers:
            rec, _ = recognition_outcomes(list(base_answers.values()))
            part.base_recognition = float(np.mean(rec))
        part.base_seconds = float(sum(base_sessions))

        for week in exp_weeks:
            draft = week_drafts[week]
            key = (emp, draft)
            nl = nl_by_key.get(key)
            if nl is None:
                if key in recog or key in interest or key in sessions:
                    raise MissingRoleTags(
                        f"data present for {emp} x {draft} "
                        f"but no composed newsletter was provided")
                continue
            week_answers = recog.get(key, {})
            known = set(nl.all_message_ids())
            stray = set(week_answers) - known
            if stray:
                raise MissingRoleTags(
                    f"answers for {emp} x {draft} name messages outside "
                    f"the newsletter: {sorted(stray)}")
            opened = key in sessions
            measured = sessions.get(key, [])
            obs = _WeekObs(
                week=week, opened=opened,
                interest=interest.get(key),
                seconds=float(sum(measured)) if (opened and measured) else None,
                brief_outcomes=[], subject_rec=[], subject_read=[],
                top_rec=[], top_read=[], top_ns_rec=[], top_ns_read=[],
                non_s_rec=[], non_s_read=[], non_t_rec=[], non_t_read=[])
            if opened and week_answers:
                top_set = set(nl.top_news)
                for mid, value in week_answers.items():
                    rec, read = recognition_outcomes([value])
                    obs.brief_outcomes.append(rec[0])
                    if mid == nl.subject_message:
                        obs.subject_rec.append(rec[0])
                        obs.subject_read.append(read[0])
                    else:
                        obs.non_s_rec.append(rec[0])
                        obs.non_s_read.append(read[0])
                    if mid in top_set:
                        obs.top_rec.append(rec[0])
                        obs.top_read.append(read[0])
                        if mid != nl.subject_message:
                            obs.top_ns_rec.append(rec[0])
                            obs.top_ns_read.append(read[0])
                    else:
                        obs.non_t_rec.append(rec[0])
                        obs.non_t_read.append(read[0])
            part.weeks.append(obs)

    exclusions = Exclusions(outlier_sessions=outliers)
    for emp in sorted(participants):
        part = participants[emp]
        ratings = [o.interest for o in part.weeks if o.interest is not None]
        if len(ratings) >= 2 and len(set(ratings)) == 1:
            exclusions.interest_constant.append(emp)
        opens = [o.opened for o in part.weeks]
        if opens and all(opens):
            exclusions.opened_all.append(emp)
        elif opens and not any(opens):
            exclusions.opened_none.append(emp)
    return participants, exclusions


def _cell_from(values: Sequence[float]) -> Optional[MetricCell]:
    if not values:
        return None
    arr = np.asarray(values, dtype=float)
    return MetricCell(mean=float(arr.mean()), sd=float(arr.std()),
                      n=int(arr.size))


def _pooled_rate(pairs: list[tuple[int, int]]) -> Optional[float]:
    hits = sum(h for h, _ in pairs)
    total = sum(t for _, t in pairs)
    return hits / total if total else None


def _participant_values(parts: Sequence[_Participant], metric: str,
                        exclusions: Exclusions,
                        role_fields: Optional[tuple[str, str]] = None,
                        ) -> list[float]:
    """Per-participant aggregates for one metric, applying exclusions."""
    skip_interest = set(exclusions.interest_constant)
    skip_open = set(exclusions.opened_all) | set(exclusions.opened_none)
    out = []
    for part in parts:
        if metric == "interest_rate":
            if part.employee_id in skip_interest:
                continue
            flags = [1.0 if o.interest is not None and o.interest >= 3 else 0.0
                     for o in part.weeks if o.interest is not None]
            if flags:
                out.append(float(np.mean(flags)))
        elif metric == "open_rate":
            if part.employee_id in skip_open:
                continue
            opens = [1.0 if o.opened else 0.0 for o in part.weeks]
            if opens:
                out.append(float(np.mean(opens)))
        elif metric == "reading_seconds":
            times = [o.seconds for o in part.weeks if o.seconds is not None]
            if times:
                out.append(float(np.mean(times)))
        elif metric == "brief_recognition_rate":
            rates = [float(np.mean(o.brief_outcomes))
                     for o in part.weeks if o.brief_outcomes]
            if rates:
                out.append(float(np.mean(rates)))
        else:
            rec_field, read_field = role_fields
            name = rec_field if metric == "message_recognition_rate" else read_field
            pairs = [(sum(getattr(o, name)), len(getattr(o, name)))
                     for o in part.weeks]
            rate = _pooled_rate(pairs)
            if rate is not None:
                out.append(rate)
    return out


_ROLE_FOR_FACTOR = {"A": ("subject_rec", "subject_read"),
                    "B": ("top_rec", "top_read")}


def group_metrics(logs: Sequence[ReadingLogRow],
                  answers: Sequence[SurveyAnswer],
                  assignments: Sequence[TreatmentAssignment],
                  newsletters: Sequence[PersonalizedNewsletter], *,
                  week_drafts: Mapping[int, str],
                  baseline_week: int = 1) -> MetricsReport:
    """Compute the group grid: every treatment level of each factor plus
    the non-subject and non-top-news message pools."""
    participants, exclusions = _collect(
        logs, answers, assignments, newsletters, week_drafts, baseline_week)
    everyone = [participants[e] for e in sorted(participants)]

    def row_for(factor: str, level: int, members) -> GroupRow:
        metrics: dict[str, Optional[MetricCell]] = {}
        role = _ROLE_FOR_FACTOR.get(factor)
        for key in METRIC_KEYS:
            if key in ("message_recognition_rate", "message_read_rate"):
                if role is None or (factor == "A" and level == 1):
                    metrics[key] = None
                    continue
                metrics[key] = _cell_from(_participant_values(
                    members, key, exclusions, role_fields=role))
            else:
                metrics[key] = _cell_from(_participant_values(
                    members, key, exclusions))
        return GroupRow(label=f"{factor}{level}", factor=factor,
                        level=level, metrics=metrics)

    def pool_row(label: str, role: tuple[str, str]) -> GroupRow:
        metrics = {key: None for key in METRIC_KEYS}
        for key in ("message_recognition_rate", "message_read_rate"):
            metrics[key] = _cell_from(_participant_values(
                everyone, key, exclusions, role_fields=role))
        return GroupRow(label=label, factor="pool", level=None,
                        metrics=metrics)

    groups = [pool_row("non-s", ("non_s_rec", "non_s_read"))]
    for level in range(1, 5):
        members = [p for p in everyone if p.cell[0] == level]
        groups.append(row_for("A", level, members))
    groups.append(pool_row("non-t", ("non_t_rec", "non_t_read")))
    for level in range(1, 6):
        members = [p for p in everyone if p.cell[1] == level]
        groups.append(row_for("B", level, members))
    for level in range(1, 6):
        members = [p for p in everyone if p.cell[2] == level]
        groups.append(row_for("C", level, members))

    weeks = sorted(week_drafts)
    return MetricsReport(baseline_week=baseline_week, weeks=weeks,
                         groups=groups, exclusions=exclusions)


def _rows_for_test(parts, metric, exclusions,
                   role_fields=None) -> tuple[list[float], list[float]]:
    """Flat (outcome, baseline covariate) rows for one group and metric."""
    skip_interest = set(exclusions.interest_constant)
    skip_open = set(exclusions.opened_all) | set(exclusions.opened_none)
    ys: list[float] = []
    cov: list[float] = []
    for part in parts:
        if metric == "interest_rate":
            if part.employee_id in skip_interest:
                continue
            for o in part.weeks:
                if o.interest is not None:
                    ys.append(1.0 if o.interest >= 3 else 0.0)
                    cov.append(part.base_interest)
        elif metric == "open_rate":
            if part.employee_id in skip_open:
                continue
            for o in part.weeks:
                ys.append(1.0 if o.opened else 0.0)
                cov.append(part.base_open)
        elif metric == "reading_seconds":
            for o in part.weeks:
                if o.seconds is not None:
                    ys.append(o.seconds)
                    cov.append(part.base_seconds)
        elif metric == "brief_recognition_rate":
            for o in part.weeks:
                for y in o.brief_outcomes:
                    ys.append(float(y))
                    cov.append(part.base_recognition)
        else:
            rec_field, read_field = role_fields
            name = rec_field if metric == "message_recognition_rate" else read_field
            for o in part.weeks:
                for y in getattr(o, name):
                    ys.append(float(y))
                    cov.append(part.base_recognition)
    return ys, cov


def _contrast(metric, treat_rows, ctrl_rows) -> tuple[Optional[float],
                                                      Optional[float],
                                                      Optional[float]]:
    t_y, t_cov = treat_rows
    c_y, c_cov = ctrl_rows
    t_mean = float(np.mean(t_y)) if t_y else None
    c_mean = float(np.mean(c_y)) if c_y else None
    if len(t_y) < 2 or len(c_y) < 2:
        return t_mean, c_mean, None
    if metric == "reading_seconds":
        y = np.concatenate([c_y, t_y])
        treat = np.concatenate([np.zeros(len(c_y)), np.ones(len(t_y))])
        p = linear_lrt(y, treat, np.concatenate([c_cov, t_cov]))
    else:
        p = pairwise_test(c_y, t_y, base_a=c_cov, base_b=t_cov)
    return t_mean, c_mean, p


_STRATEGIC = ("interest_rate", "reading_seconds", "brief_recognition_rate",
              "open_rate")


def build_report(logs, answers, assignments, newsletters, *,
                 week_drafts: Mapping[int, str],
                 baseline_week: int = 1) -> MetricsReport:
    """group_metrics plus the hypothesis grid and the placement contrasts."""
    report = group_metrics(logs, answers, assignments, newsletters,
                           week_drafts=week_drafts,
                           baseline_week=baseline_week)
    participants, exclusions = _collect(
        logs, answers, assignments, newsletters, week_drafts, baseline_week)
    everyone = [participants[e] for e in sorted(participants)]
    by_factor_level = {}
    for idx, factor in enumerate("ABC"):
        levels = range(1, 5) if factor == "A" else range(1, 6)
        for level in levels:
            by_factor_level[(factor, level)] = [
                p for p in everyone if p.cell[idx] == level]

    hypotheses: list[HypothesisRow] = []
    for factor in "ABC":
        levels = range(2, 5) if factor == "A" else range(2, 6)
        for metric in _STRATEGIC:
            family = f"{factor}:{metric}"
            ctrl = _rows_for_test(by_factor_level[(factor, 1)], metric,
                                  exclusions)
            for level in levels:
                treat = _rows_for_test(by_factor_level[(factor, level)],
                                       metric, exclusions)
                t_mean, c_mean, p = _contrast(metric, treat, ctrl)
                diff = (t_mean - c_mean
                        if t_mean is not None and c_mean is not None else None)
                hypotheses.append(HypothesisRow(
                    family=family, metric=metric,
                    treatment=f"{factor}{level}", control=f"{factor}1",
                    treatment_mean=t_mean, control_mean=c_mean,
                    difference=diff, p_raw=p))

    pool_roles = {"non-s": ("non_s_rec", "non_s_read"),
                  "non-t": ("non_t_rec", "non_t_read")}
    for factor, pool in (("A", "non-s"), ("B", "non-t")):
        role = _ROLE_FOR_FACTOR[factor]
        for metric in ("message_recognition_rate", "message_read_rate"):
            family = f"{factor}:{metric}"
            ctrl = _rows_for_test(everyone, metric, exclusions,
                                  role_fields=pool_roles[pool])
            levels = range(2, 5) if factor == "A" else range(1, 6)
            for level in levels:
                treat = _rows_for_test(by_factor_level[(factor, level)],
                                       metric, exclusions, role_fields=role)
                t_mean, c_mean, p = _contrast(metric, treat, ctrl)
                diff = (t_mean - c_mean
                        if t_mean is not None and c_mean is not None else None)
                hypotheses.append(HypothesisRow(
                    family=family, metric=metric,
                    treatment=f"{factor}{level}", control=pool,
                    treatment_mean=t_mean, control_mean=c_mean,
                    difference=diff, p_raw=p))

    families: dict[str, list[HypothesisRow]] = {}
    for h in hypotheses:
        if h.p_raw is not None:
            families.setdefault(h.family, []).append(h)
    for rows in families.values():
        adjusted = holm_bonferroni([h.p_raw for h in rows])
        for h, adj in zip(rows, adjusted):
            h.p_adj = adj

    # placement contrasts: preferred subject messages vs everything else,
    # and top-news messages vs the rest of the newsletter
    subject_pool = [p for p in everyone if p.cell[0] in (3, 4)]
    planted = []
    for name, members, role, pool in (
            ("subject-pool", subject_pool,
             ("subject_rec", "subject_read"), "non-s"),
            ("top-news-pool", everyone,
             ("top_ns_rec", "top_ns_read"), "non-t")):
        treat = _rows_for_test(members, "message_recognition_rate",
                               exclusions, role_fields=role)
        ctrl = _rows_for_test(everyone, "message_recognition_rate",
                              exclusions, role_fields=pool_roles[pool])
        t_mean, c_mean, p = _contrast("message_recognition_rate", treat, ctrl)
        diff = (t_mean - c_mean
                if t_mean is not None and c_mean is not None else None)
        planted.append(HypothesisRow(
            family="placement", metric="message_recognition_rate",
            treatment=name, control=pool, treatment_mean=t_mean,
            control_mean=c_mean, difference=diff, p_raw=p))
    adjustable = [h for h in planted if h.p_raw is not None]
    for h, adj in zip(adjustable,
                      holm_bonferroni([h.p_raw for h in adjustable])):
        h.p_adj = adj

    report.hypotheses = hypotheses
    report.planted = planted
    return report
