"""Rendered newsletters: determinism, coverage, display rules."""
import datetime as dt

from briefmix.composer import TreatmentCell, compose
from briefmix.fixtures import demo_draft, demo_profiles
from briefmix.model import TOP_NEWS, Draft, Message, MessageAnnotation, validate_draft
from briefmix.render import newsletter_path, render_html
from briefmix.scoring import score_matrix
from briefmix.seeding import substream

DRAFT = demo_draft()
ADA, BO, CY = demo_profiles()
MATRIX = score_matrix(DRAFT, [ADA, BO, CY])


def composed(profile, cell):
    return compose(DRAFT, profile, cell, MATRIX,
                   substream(3, profile.id, DRAFT.id))


def test_render_is_deterministic():
    nl = composed(ADA, TreatmentCell(4, 5, 5))
    assert render_html(nl, DRAFT) == render_html(nl, DRAFT)


def test_every_message_rendered_exactly_once():
    for cell in (TreatmentCell(1, 1, 1), TreatmentCell(3, 4, 2),
                 TreatmentCell(4, 5, 5)):
        doc = render_html(composed(BO, cell), DRAFT)
        for m in DRAFT.messages:
            assert doc.count(f'data-message-id="{m.id}"') == 1, (cell, m.id)


def test_ids_and_subject_embedded():
    nl = composed(CY, TreatmentCell(1, 1, 1))
    doc = render_html(nl, DRAFT)
    assert f'data-employee-id="{CY.id}"' in doc
    assert f'data-draft-id="{DRAFT.id}"' in doc
    assert "<title>U of M Brief (October 27, 2021)</title>" in doc


def test_campus_prefix_shows_in_top_news_only():
    nl = composed(BO, TreatmentCell(1, 4, 1))
    assert nl.top_news[0] == "m-dining"
    doc = render_html(nl, DRAFT)
    assert doc.count("Campus 2: New dining hours at the commons") == 1
    plain = render_html(composed(BO, TreatmentCell(1, 1, 1)), DRAFT)
    assert "Campus 2: New dining hours" not in plain
    assert "New dining hours at the commons" in plain


def test_body_snippet_strips_markup_and_empty_body_is_fine():
    messages = (
        Message("m-a", "With markup", "<p>Hello <b>bold</b> world</p>",
                "https://example.edu/a", TOP_NEWS, 0),
        Message("m-b", "No body at all", "", "https://example.edu/b",
                TOP_NEWS, 1),
        Message("m-c", "Filler one", "x", "https://example.edu/c",
                TOP_NEWS, 2),
        Message("m-d", "Filler two", "y", "https://example.edu/d",
                TOP_NEWS, 3),
    )
    ann = MessageAnnotation(importance=1, target_jobs=frozenset(),
                            target_campuses=frozenset({"campus-1"}),
                            topics=("sports-spirit",))
    d = validate_draft(Draft(id="d-r", issue_date=dt.date(2021, 11, 10),
                             messages=messages,
                             annotations={m.id: ann for m in messages}))
    from briefmix.model import EmployeeProfile
    profile = EmployeeProfile(id="e", campus="campus-1", job="it")
    matrix = score_matrix(d, [profile])
    nl = compose(d, profile, TreatmentCell(1, 1, 1), matrix,
                 substream(1, "r"))
    doc = render_html(nl, d)
    assert "Hello bold world" in doc
    assert "<b>bold</b>" not in doc
    assert 'href="https://example.edu/b">No body at all</a>' in doc


def test_newsletter_path_convention():
    assert newsletter_path("brief-2021-10-27", "emp-ada") == \
        "brief-2021-10-27/emp-ada.html"
