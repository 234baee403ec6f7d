"""Built-in catalogs: message topics, job categories, campuses.

Topic and job display names are kept verbatim from the deployment's survey
instruments, including irregular spacing. Ids are derived slugs so that the
name variants floating around internal documents (ampersands swapped for
spaces, extra spaces around slashes) all land on the same id.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = [
    "Topic",
    "JobCategory",
    "Campus",
    "slugify",
    "load_topic_catalog",
    "load_job_catalog",
    "default_campuses",
    "SPECIAL_TOPIC_MY_CAMPUS",
    "SPECIAL_TOPIC_OTHER_CAMPUSES",
]


@dataclass(frozen=True)
class Topic:
    id: str
    name: str
    special: bool = False  # campus-scope pseudo-topics, not annotatable


@dataclass(frozen=True)
class JobCategory:
    id: str
    name: str


@dataclass(frozen=True)
class Campus:
    id: str
    name: str


def slugify(name: str) -> str:
    """Lowercase, fold separators (&, /, comma, whitespace), hyphen-join."""
    s = name.lower().replace(" ", " ")
    s = re.sub(r"[&/,]", " ", s)
    s = re.sub(r"[^a-z0-9 ]", "", s)
    return "-".join(s.split())


# Display names verbatim; double spaces are intentional.
_TOPIC_NAMES = [
    "Talk/Symposium/Lectures Announcements",
    "Student/Alumni Stories",
    "Community Service/ Social Justice/Underserved Population",
    "Faculty  Staff Stories",
    "Health/Biology Research Stories",
    "Climate/Eco/Agriculture",
    "Health Wellness Resources/COVID",
    "Award/Recognition to University, Faculty, Staff, Students",
    "Program & Award Applications/Announcements",
    "Fundraising & Development",
    "History/Social Science Research Stories",
    "Policies/Admin News/Governance",
    "Tech Tool Updates/Workshops",
    "Sports  Spirit",
    "University History/Celebrations",
    "Art  Museums",
    "University Program Success Stories",
    "Operations Awareness/Facility Closures",
    "Engineering Science Research Stories",
    "Youth, Children",
]

_SPECIAL_TOPIC_NAMES = [
    "news from my campus",
    "news from other campuses",
]

SPECIAL_TOPIC_MY_CAMPUS = slugify(_SPECIAL_TOPIC_NAMES[0])
SPECIAL_TOPIC_OTHER_CAMPUSES = slugify(_SPECIAL_TOPIC_NAMES[1])

_JOBS = [
    ("admin-advancement-communication",
     "Administration & Advancement & Communication Staff"),
    ("campus-operations",
     "Campus Operation Staff (e.g., facilitates maintenance, dining services,"
     " police, bookstore, athletics operations.)"),
    ("faculty-research",
     "Faculty, Teaching & Research Staff, Librarians, Museum Curators and"
     " Directors, etc."),
    ("healthcare",
     "Healthcare Staff (nurses, doctors, athletic trainers, etc.)"),
    ("hr-finance",
     "Human Resource & Finance Staff (e.g., accountants, HR specialists)"),
    ("it", "Information Technology Staff"),
    ("student-services",
     "Student Services Staff (advisors, student union staff, financial aid"
     " staff, etc.)"),
]


def load_topic_catalog() -> list[Topic]:
    """All annotatable topics plus the two campus-scope pseudo-topics."""
    topics = [Topic(slugify(n), n) for n in _TOPIC_NAMES]
    topics += [Topic(slugify(n), n, special=True) for n in _SPECIAL_TOPIC_NAMES]
    ids = [t.id for t in topics]
    if len(set(ids)) != len(ids):
        raise ValueError("topic catalog ids collide")
    return topics


def load_job_catalog() -> list[JobCategory]:
    return [JobCategory(i, n) for i, n in _JOBS]


def default_campuses(count: int = 5) -> list[Campus]:
    """Generic campus list; real deployments supply their own via config."""
    if count < 1:
        raise ValueError("need at least one campus")
    return [Campus(f"campus-{i + 1}", f"Campus {i + 1}") for i in range(count)]
