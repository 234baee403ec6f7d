"""Catalog fixtures: counts, verbatim display names, slug stability."""
from briefmix.catalog import (default_campuses, load_job_catalog,
                              load_topic_catalog, slugify)


def test_topic_catalog_shape():
    topics = load_topic_catalog()
    assert len(topics) == 22
    assert len({t.id for t in topics}) == 22
    assert sum(1 for t in topics if t.special) == 2
    assert sum(1 for t in topics if not t.special) == 20


def test_display_names_kept_verbatim():
    names = {t.name for t in load_topic_catalog()}
    # the double spaces are in the source material on purpose
    assert "Sports  Spirit" in names
    assert "Art  Museums" in names
    assert "Faculty  Staff Stories" in names
    assert "news from my campus" in names
    assert "news from other campuses" in names


def test_special_topics_flagged():
    by_id = {t.id: t for t in load_topic_catalog()}
    assert by_id["news-from-my-campus"].special
    assert by_id["news-from-other-campuses"].special
    assert not by_id["sports-spirit"].special


def test_slugify_folds_name_variants():
    pairs = [
        ("Program & Award Applications/Announcements",
         "Program  Award Applications/Announcements"),
        ("Fundraising & Development", "Fundraising  Development"),
        ("Talk/Symposium/Lectures Announcements",
         "Talk/ Symposium/ Lectures Announcements"),
        ("Community Service/ Social Justice/Underserved Population",
         "Community Service/ Social Justice/ Underserved Population"),
    ]
    for a, b in pairs:
        assert slugify(a) == slugify(b)


def test_job_catalog():
    jobs = load_job_catalog()
    assert len(jobs) == 7
    assert len({j.id for j in jobs}) == 7
    assert "Information Technology Staff" in {j.name for j in jobs}


def test_default_campuses_configurable():
    assert len(default_campuses()) == 5
    assert len(default_campuses(3)) == 3
    assert [c.id for c in default_campuses(2)] == ["campus-1", "campus-2"]
