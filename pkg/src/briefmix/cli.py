"""Command line for the whole workflow, one verb per pipeline step.

Typical sequence for a study directory P:

    briefmix --root P ingest draft.json
    briefmix --root P annotate brief-2021-10-27 annotations.json
    briefmix --root P synth --n 141 --seed 7      (or: profiles roster.json)
    briefmix --root P assign --seed 7 --balanced
    briefmix --root P generate brief-2021-10-27 --seed 7
    briefmix --root P simulate --weeks 5 --seed 7
    briefmix --root P analyze --baseline-week 1
    briefmix --root P serve --port 8000

Exit codes: 0 ok, 1 user error (bad input, unknown id, missing data),
2 internal error. Nothing is written unless the verb's inputs validate.
"""
from __future__ import annotations

import argparse
import datetime as dt
import json
import sys
from pathlib import Path

from .fixtures import survey_marginals
from .metrics import build_report
from .model import (Draft, DraftInvalid, annotation_from_dict, validate_draft)
from .pipeline import compose_newsletter, run_experiment
from .render import render_html
from .scoring import score_matrix
from .simulate import (BehaviorParams, assign_treatments, generate_population,
                       synthesize_draft)
from .store import ProjectStore, UnknownId

__all__ = ["main", "build_parser"]

_DEFAULT_START = dt.date(2021, 10, 27)


class _Parser(argparse.ArgumentParser):
    # usage mistakes are user errors, not internal ones
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="briefmix",
                description="newsletter personalization experiment harness")
    p.add_argument("--root", default=".",
                   help="project directory (default: current)")
    sub = p.add_subparsers(dest="verb", required=True, metavar="verb")

    q = sub.add_parser("ingest", parents=[], help="validate and store a draft",
                       description="Validate a draft file and store it; "
                                   "annotations may come later.")
    q.add_argument("draft_file")
    q.set_defaults(func=_cmd_ingest)

    q = sub.add_parser("export", help="print a stored draft verbatim")
    q.add_argument("draft_id")
    q.set_defaults(func=_cmd_export)

    q = sub.add_parser("annotate",
                       help="attach editor annotations to a draft")
    q.add_argument("draft_id")
    q.add_argument("annotations_file")
    q.set_defaults(func=_cmd_annotate)

    q = sub.add_parser("profiles", help="load the employee roster from a file")
    q.add_argument("profiles_file")
    q.set_defaults(func=_cmd_profiles)

    q = sub.add_parser("synth", help="generate a synthetic roster")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.set_defaults(func=_cmd_synth)

    q = sub.add_parser("assign", help="create persistent treatment assignments")
    q.add_argument("--seed", type=int, required=True)
    g = q.add_mutually_exclusive_group()
    g.add_argument("--balanced", dest="mode", action="store_const",
                   const="balanced", help="near-equal cell counts (default)")
    g.add_argument("--uniform", dest="mode", action="store_const",
                   const="uniform", help="independent uniform draws")
    q.set_defaults(func=_cmd_assign, mode="balanced")

    q = sub.add_parser("score", help="compute and export the score matrix")
    q.add_argument("draft_id")
    q.set_defaults(func=_cmd_score)

    q = sub.add_parser("generate",
                       help="compose and render every personalized issue")
    q.add_argument("draft_id")
    q.add_argument("--seed", type=int, required=True)
    q.set_defaults(func=_cmd_generate)

    q = sub.add_parser("simulate",
                       help="run the behavior model for K weekly issues")
    q.add_argument("--weeks", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.add_argument("--params", help="behavior parameter overrides (JSON)")
    q.add_argument("--messages", type=int, default=30,
                   help="messages per synthesized draft (default 30)")
    q.set_defaults(func=_cmd_simulate)

    q = sub.add_parser("analyze", help="build the metrics report")
    q.add_argument("--baseline-week", type=int, default=1)
    q.add_argument("--run-id", default="latest")
    q.set_defaults(func=_cmd_analyze)

    q = sub.add_parser("power", help="estimate detection power by simulation")
    q.add_argument("--n", type=int, required=True,
                   help="total participants, split half and half")
    q.add_argument("--effect", type=float, required=True)
    q.add_argument("--sd", type=float, required=True)
    q.add_argument("--sims", type=int, required=True)
    q.add_argument("--seed", type=int, required=True)
    q.set_defaults(func=_cmd_power)

    q = sub.add_parser("serve", help="start the HTTP API for the console")
    q.add_argument("--port", type=int, default=8000)
    q.add_argument("--host", default="127.0.0.1")
    q.add_argument("--frontend",
                   help="directory of built console assets to serve at /")
    q.set_defaults(func=_cmd_serve)
    return p


# --- verb bodies ------------------------------------------------------------


def _cmd_ingest(store: ProjectStore, args) -> int:
    text = Path(args.draft_file).read_text(encoding="utf-8")
    draft = store.ingest_draft(text)
    n_ann = len(draft.annotations)
    print(f"stored draft {draft.id}: {len(draft.messages)} messages, "
          f"{n_ann} annotated")
    return 0


def _cmd_export(store: ProjectStore, args) -> int:
    sys.stdout.write(store.export_draft(args.draft_id))
    return 0


def _cmd_annotate(store: ProjectStore, args) -> int:
    draft = store.load_draft(args.draft_id)
    raw = json.loads(Path(args.annotations_file).read_text(encoding="utf-8"))
    known = {m.id for m in draft.messages}
    stray = sorted(set(raw) - known)
    if stray:
        raise ValueError(f"draft {args.draft_id}: annotations for unknown "
                         f"messages: {stray[:5]}")
    incoming = {mid: annotation_from_dict(a) for mid, a in raw.items()}
    merged = dict(draft.annotations)
    merged.update(incoming)
    validate_draft(Draft(id=draft.id, issue_date=draft.issue_date,
                         messages=draft.messages, annotations=merged),
                   require_annotations=False)
    store.save_annotations(args.draft_id, merged)
    missing = len(known) - len(merged)
    print(f"annotated {len(incoming)} messages of {args.draft_id}"
          + (f" ({missing} still missing)" if missing else ""))
    return 0


def _cmd_profiles(store: ProjectStore, args) -> int:
    from .model import profile_from_dict

    raw = json.loads(Path(args.profiles_file).read_text(encoding="utf-8"))
    profiles = [profile_from_dict(d) for d in raw]
    ids = [p.id for p in profiles]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate employee ids in roster")
    store.save_profiles(profiles)
    print(f"stored roster: {len(profiles)} employees")
    return 0


def _cmd_synth(store: ProjectStore, args) -> int:
    profiles = generate_population(args.n, survey_marginals(), args.seed)
    store.save_profiles(profiles)
    print(f"stored synthetic roster: {len(profiles)} employees")
    return 0


def _cmd_assign(store: ProjectStore, args) -> int:
    profiles = store.load_profiles()
    assignments = assign_treatments([p.id for p in profiles], args.seed,
                                    mode=args.mode)
    store.save_assignments(assignments)
    print(f"assigned {len(assignments)} employees ({args.mode})")
    return 0


def _cmd_score(store: ProjectStore, args) -> int:
    draft = validate_draft(store.load_draft(args.draft_id))
    matrix = score_matrix(draft, store.load_profiles())
    store.save_scores(matrix)
    print(f"scored {args.draft_id}: {len(matrix)} employee-message pairs")
    return 0


def _cmd_generate(store: ProjectStore, args) -> int:
    draft = validate_draft(store.load_draft(args.draft_id))
    profiles = store.load_profiles()
    cells = {a.employee_id: a.cell for a in store.load_assignments()}
    missing = [p.id for p in profiles if p.id not in cells]
    if missing:
        raise ValueError(f"no treatment assignment for: {missing[:5]}")
    matrix = score_matrix(draft, profiles)
    pairs = []
    for p in profiles:
        nl = compose_newsletter(draft, p, cells[p.id], matrix, args.seed)
        pairs.append((nl, render_html(nl, draft)))
    store.save_newsletters(draft.id, pairs, seed=args.seed)
    print(f"generated {len(pairs)} newsletters for {draft.id}")
    return 0


def _cmd_simulate(store: ProjectStore, args) -> int:
    if args.weeks < 2:
        raise ValueError("need at least 2 weeks: one baseline plus "
                         "one treatment week")
    profiles = store.load_profiles()
    assignments = store.load_assignments()
    drafts = [store.load_draft(i) for i in store.draft_ids()]
    drafts.sort(key=lambda d: (d.issue_date, d.id))
    drafts = drafts[:args.weeks]
    for d in drafts:
        validate_draft(d)
    # stretch the study with synthetic issues when the store runs short
    while len(drafts) < args.weeks:
        w = len(drafts) + 1
        issue = (drafts[-1].issue_date + dt.timedelta(weeks=1) if drafts
                 else _DEFAULT_START + dt.timedelta(weeks=w - 1))
        drafts.append(synthesize_draft(f"synth-week-{w:02d}", issue,
                                       args.messages, args.seed))
    params = BehaviorParams()
    if args.params:
        overrides = json.loads(Path(args.params).read_text(encoding="utf-8"))
        try:
            params = BehaviorParams(**overrides)
        except TypeError as e:
            raise ValueError(f"bad behavior params: {e}") from None

    run = run_experiment(profiles, assignments, drafts, args.seed,
                         params=params)
    store.save_weeks(run.week_drafts)
    for week in run.weeks:
        store.save_newsletters(
            week.draft.id,
            [(nl, render_html(nl, week.draft)) for nl in week.newsletters],
            seed=args.seed)
        store.save_week_logs(week.week, week.logs)
        store.save_week_answers(week.week, week.answers)
    print(f"simulated {args.weeks} weeks x {len(profiles)} employees: "
          f"{len(run.all_logs())} sessions, {len(run.all_answers())} answers")
    return 0


def _cmd_analyze(store: ProjectStore, args) -> int:
    weeks = store.load_weeks()
    if args.baseline_week not in weeks:
        raise ValueError(f"baseline week {args.baseline_week} not in "
                         f"simulated weeks {sorted(weeks)}")
    newsletters = [nl for draft_id in weeks.values()
                   for nl in store.load_newsletters(draft_id)]
    report = build_report(store.load_all_logs(), store.load_all_answers(),
                          store.load_assignments(), newsletters,
                          week_drafts=weeks,
                          baseline_week=args.baseline_week)
    store.save_report(args.run_id, report)
    print(f"report {args.run_id}: {len(report.groups)} groups, "
          f"{len(report.hypotheses)} contrasts "
          f"-> reports/{args.run_id}.json")
    return 0


def _cmd_power(store: ProjectStore, args) -> int:
    from .power import simulate_power

    p = simulate_power(args.n, args.effect, args.sd, args.sims, args.seed)
    print(f"{p:.4f}")
    return 0


def _cmd_serve(store: ProjectStore, args) -> int:
    import uvicorn

    from .api import create_app

    app = create_app(store, frontend_dir=args.frontend)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    store = ProjectStore(args.root)
    try:
        return args.func(store, args)
    except DraftInvalid as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return 1
    except UnknownId as e:
        print(f"error: {e.args[0]}", file=sys.stderr)
        return 1
    except FileNotFoundError as e:
        print(f"error: file not found: {e.filename or e}", file=sys.stderr)
        return 1
    except KeyError as e:
        print(f"error: missing field {e}", file=sys.stderr)
        return 1
    except (ValueError, json.JSONDecodeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except Exception as e:  # anything else is a bug in this program
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
