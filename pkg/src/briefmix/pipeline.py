"""End-to-end experiment orchestration.

One run is: a participant roster with persistent treatment assignments, a
distinct draft per week, per-employee newsletters composed from each
participant's cell, and a simulated week of reading for every issue. The
first week is the baseline: everyone receives the untouched original
layout (cell A1 B1 C1) so per-participant base rates exist for the
analysis covariates.
"""
from __future__ import annotations

import datetime as dt
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .composer import (ComposeConfig, DEFAULT_CONFIG, PersonalizedNewsletter,
                       TreatmentCell, compose)
from .metrics import MetricsReport, build_report
from .model import Draft, EmployeeProfile
from .scoring import ScoringOptions, ScoreMatrix, score_matrix
from .seeding import substream
from .simulate import (BehaviorParams, ReadingLogRow, SurveyAnswer,
                       TreatmentAssignment, assign_treatments,
                       generate_population, simulate_week, synthesize_draft)

__all__ = ["WeekData", "ExperimentRun", "compose_newsletter",
           "run_experiment", "synth_experiment", "BASELINE_CELL"]

BASELINE_CELL = TreatmentCell(1, 1, 1)


def compose_newsletter(draft: Draft, profile: EmployeeProfile,
                       cell: TreatmentCell, matrix: ScoreMatrix, seed: int,
                       config: ComposeConfig = DEFAULT_CONFIG,
                       ) -> PersonalizedNewsletter:
    """The one compose entry point shared by runs, the CLI, and previews.

    Same (draft, employee, cell, seed) always yields the same newsletter,
    whichever surface asked for it.
    """
    rng = substream(seed, "compose", draft.id, profile.id)
    return compose(draft, profile, cell, matrix, rng, config)


@dataclass
class WeekData:
    week: int
    draft: Draft
    scores: ScoreMatrix
    newsletters: list[PersonalizedNewsletter]
    logs: list[ReadingLogRow]
    answers: list[SurveyAnswer]


@dataclass
class ExperimentRun:
    seed: int
    profiles: list[EmployeeProfile]
    assignments: list[TreatmentAssignment]
    weeks: list[WeekData] = field(default_factory=list)

    @property
    def week_drafts(self) -> dict[int, str]:
        return {w.week: w.draft.id for w in self.weeks}

    def all_newsletters(self) -> list[PersonalizedNewsletter]:
        return [nl for w in self.weeks for nl in w.newsletters]

    def all_logs(self) -> list[ReadingLogRow]:
        return [row for w in self.weeks for row in w.logs]

    def all_answers(self) -> list[SurveyAnswer]:
        return [a for w in self.weeks for a in w.answers]

    def report(self, baseline_week: int = 1) -> MetricsReport:
        return build_report(self.all_logs(), self.all_answers(),
                            self.assignments, self.all_newsletters(),
                            week_drafts=self.week_drafts,
                            baseline_week=baseline_week)


def run_experiment(profiles: Sequence[EmployeeProfile],
                   assignments: Sequence[TreatmentAssignment],
                   drafts: Sequence[Draft], seed: int, *,
                   params: Optional[BehaviorParams] = None,
                   config: ComposeConfig = DEFAULT_CONFIG,
                   options: Optional[ScoringOptions] = None,
                   baseline_week: int = 1) -> ExperimentRun:
    """Compose and simulate every week; drafts[i] serves week i+1.

    Weekly draft ids must be distinct or the collected data cannot be
    attributed to weeks.
    """
    ids = [d.id for d in drafts]
    if len(set(ids)) != len(ids):
        raise ValueError("weekly drafts must have distinct ids")
    params = params or BehaviorParams()
    cell_of = {a.employee_id: a.cell for a in assignments}
    missing = [p.id for p in profiles if p.id not in cell_of]
    if missing:
        raise ValueError(f"no treatment assignment for: {missing[:5]}")

    run = ExperimentRun(seed=seed, profiles=list(profiles),
                        assignments=list(assignments))
    scoring = options or ScoringOptions()
    for i, draft in enumerate(drafts):
        week = i + 1
        matrix = score_matrix(draft, profiles, scoring)
        newsletters = []
        for p in profiles:
            cell = BASELINE_CELL if week == baseline_week else cell_of[p.id]
            newsletters.append(
                compose_newsletter(draft, p, cell, matrix, seed, config))
        logs, answers = simulate_week(newsletters, matrix, params, seed,
                                      profiles=profiles,
                                      issue_date=draft.issue_date)
        run.weeks.append(WeekData(week=week, draft=draft, scores=matrix,
                                  newsletters=newsletters, logs=logs,
                                  answers=answers))
    return run


def synth_experiment(n_participants: int, n_weeks: int, seed: int, *,
                     start_date: dt.date = dt.date(2021, 10, 27),
                     messages_per_draft: int = 30,
                     params: Optional[BehaviorParams] = None,
                     config: ComposeConfig = DEFAULT_CONFIG,
                     options: Optional[ScoringOptions] = None,
                     assignment_mode: str = "balanced") -> ExperimentRun:
    """Fully synthetic study: population, weekly drafts, assignment, run."""
    if n_weeks < 2:
        raise ValueError("an experiment needs a baseline week plus at "
                         "least one treatment week")
    from .fixtures import survey_marginals

    profiles = generate_population(n_participants, survey_marginals(), seed)
    assignments = assign_treatments([p.id for p in profiles], seed,
                                    mode=assignment_mode)
    drafts = [
        synthesize_draft(f"week-{w:02d}", start_date + dt.timedelta(weeks=w - 1),
                         messages_per_draft, seed)
        for w in range(1, n_weeks + 1)
    ]
    return run_experiment(profiles, assignments, drafts, seed, params=params,
                          config=config, options=options)
