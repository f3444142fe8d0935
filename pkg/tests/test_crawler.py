from __future__ import annotations

import pytest

from conftest import (
    SITES, RecordingFileFetcher, ScriptedFetcher, html, json_document, offline_config, redirect,
)
from site_census.machinery.census import DEFAULT_POLICY, ElementCensus, Lexicon, ScormFindings
from site_census.machinery.crawler import (
    CrawlConfig, PageSource, SeedUnreachableError, SiteCensus, VisitedSet,
    crawl, fetch, iter_crawl,
)
from site_census.machinery.fetchers import FetchError, LeftSiteError, TooManyRedirectsError, register_fetcher_type
from site_census.machinery.report import build_comparison, export_json

S_EDU_ORDER = [
    "http://s.edu/",
    "http://s.edu/a.html",
    "http://s.edu/b.html",
    "http://s.edu/c.html",
    "http://s.edu/d.html",
    "http://s.edu/e.html",
    "http://s.edu/f.html",
    "http://s.edu/g.html",
    "http://s.edu/h.html",
]


def scripted_config(seed_url: str = "http://r.edu/", **kwargs):
    kwargs.setdefault("delay_ms", 0)
    kwargs.setdefault("respect_robots", False)
    return CrawlConfig(seed_url, **kwargs)


@pytest.mark.parametrize("kwargs", [
    dict(seed_url="ftp://s.edu/"),
    dict(seed_url="http:///index.html"),
    dict(seed_url="file:///"),
    dict(seed_url="http://s.edu/", max_pages=0),
    dict(seed_url="http://s.edu/", max_depth=-1),
    dict(seed_url="http://s.edu/", delay_ms=-5),
    dict(seed_url="http://s.edu/", timeout_ms=0),
    dict(seed_url="http://s.edu/", parallelism=0),
])
def test_crawl_config_validation(kwargs):
    with pytest.raises(ValueError):
        CrawlConfig(**kwargs)


def test_crawl_config_fetcher_name():
    assert CrawlConfig("http://s.edu/").fetcher_name == "http"
    assert CrawlConfig("http://s.edu/", offline_root=SITES).fetcher_name == "file"
    assert CrawlConfig("http://s.edu/", offline_root=SITES, backend="x").fetcher_name == "x"


def test_visited_set():
    visited = VisitedSet(["http://s.edu/"])
    assert not visited.add("http://s.edu/")
    assert visited.add("http://s.edu/a.html")
    assert "http://s.edu/a.html" in visited
    assert len(visited) == 2


def test_page_source_body_only_on_success():
    with pytest.raises(AssertionError):
        PageSource("http://s.edu/", "http://s.edu/", 404, None, b"not found")
    with pytest.raises(AssertionError):
        PageSource("http://s.edu/", "http://s.edu/", 200, "text/html", None)


@pytest.mark.parametrize("url, content_type, expected", [
    ("http://s.edu/a.pdf", "text/html; charset=utf-8", True),
    ("http://s.edu/a.html", "application/pdf", False),
    ("http://s.edu/a.html", "APPLICATION/XHTML+XML", True),
    ("http://s.edu/a.HTM", None, True),
    ("http://s.edu/lesson", None, True),
    ("http://s.edu/", None, True),
    ("http://s.edu/a.pdf", None, False),
])
def test_page_source_is_html(url, content_type, expected):
    assert PageSource(url, url, 200, content_type, b"").is_html == expected


def test_site_census_invariants():
    page = ElementCensus(image_count=1, pages_counted=1)
    SiteCensus("http://s.edu/", page, ScormFindings(), 1, per_page=(("http://s.edu/", page),))

    with pytest.raises(AssertionError):
        SiteCensus("http://s.edu/", page, ScormFindings(), 2, per_page=(("http://s.edu/", page),))

    with pytest.raises(AssertionError):
        SiteCensus("http://s.edu/", page + page, ScormFindings(), 1, per_page=(("http://s.edu/", page),))


def test_fetch_existing_file():
    page = fetch("http://s.edu/a.html", offline_config("http://s.edu/"))
    assert page.status == 200
    assert page.body == (SITES / "s.edu" / "a.html").read_bytes()
    assert page.final_url == page.requested_url == "http://s.edu/a.html"


def test_fetch_missing_file():
    page = fetch("http://s.edu/missing.html", offline_config("http://s.edu/"))
    assert page.status == 404
    assert page.body is None


def test_fetch_follows_redirect_chain():
    fetcher = ScriptedFetcher(scripted_config(), {
        "http://r.edu/a.html": redirect("http://r.edu/a.html", "/b.html"),
        "http://r.edu/b.html": redirect("http://r.edu/b.html", "sub/../c.html#x", 301),
        "http://r.edu/c.html": html("http://r.edu/c.html", "<p>c</p>"),
    })

    page = fetch("http://r.edu/a.html", scripted_config(), fetcher, depth=3)
    assert page.requested_url == "http://r.edu/a.html"
    assert page.final_url == "http://r.edu/c.html"
    assert page.body == b"<p>c</p>"
    assert page.depth == 3
    assert fetcher.requested == ["http://r.edu/a.html", "http://r.edu/b.html", "http://r.edu/c.html"]


def test_fetch_redirect_leaving_site():
    fetcher = ScriptedFetcher(scripted_config(), {
        "http://r.edu/a.html": redirect("http://r.edu/a.html", "http://other.org/"),
    })

    with pytest.raises(LeftSiteError):
        fetch("http://r.edu/a.html", scripted_config(), fetcher)
    assert fetcher.requested == ["http://r.edu/a.html"]


def test_fetch_too_many_redirects():
    responses = {
        f"http://r.edu/{i}": redirect(f"http://r.edu/{i}", f"/{i + 1}")
        for i in range(10)
    }
    fetcher = ScriptedFetcher(scripted_config(), responses)

    with pytest.raises(TooManyRedirectsError):
        fetch("http://r.edu/0", scripted_config(), fetcher)
    assert len(fetcher.requested) == 6

    # Five redirects are fine.
    responses["http://r.edu/5"] = html("http://r.edu/5", "<p>five</p>")
    assert fetch("http://r.edu/0", scripted_config(), fetcher).final_url == "http://r.edu/5"


def test_fetch_redirect_without_location():
    fetcher = ScriptedFetcher(scripted_config(), {
        "http://r.edu/a": redirect("http://r.edu/a", "mailto:x@r.edu"),
    })

    with pytest.raises(FetchError):
        fetch("http://r.edu/a", scripted_config(), fetcher)


def test_crawl_fixture_site():
    config = offline_config("http://s.edu/")
    fetcher = RecordingFileFetcher(config)
    site = crawl(config, fetcher=fetcher)

    assert site.pages_visited == 9
    assert site.pages_failed == 1
    assert [url for url, _ in site.per_page] == S_EDU_ORDER

    assert site.census.image_count == 9
    assert site.census.downloadable_content_count == 1
    assert site.census.outbound_link_count == 1
    assert site.census.inbound_link_count == 13
    assert site.census.pages_counted == 9
    assert site.census == ElementCensus.total(c for _, c in site.per_page)

    assert not any("other.org" in url for url in fetcher.requested)
    assert "http://s.edu/handout.pdf" not in fetcher.requested
    assert "http://s.edu/missing.html" in fetcher.requested


def test_crawl_max_pages():
    site = crawl(offline_config("http://s.edu/", max_pages=5))
    assert site.pages_visited == 5
    assert [url for url, _ in site.per_page] == S_EDU_ORDER[:5]


def test_crawl_max_depth():
    site = crawl(offline_config("http://s.edu/", max_depth=1))
    assert [url for url, _ in site.per_page] == S_EDU_ORDER[:3]

    site = crawl(offline_config("http://s.edu/", max_depth=0))
    assert site.pages_visited == 1


def test_crawl_order_independent_of_parallelism():
    sequential = crawl(offline_config("http://s.edu/", parallelism=1))
    parallel = crawl(offline_config("http://s.edu/", parallelism=4))

    assert sequential == parallel
    assert export_json(build_comparison([("s.edu", sequential)])) == \
        export_json(build_comparison([("s.edu", parallel)]))


def test_crawl_progress():
    config = offline_config("http://s.edu/", max_pages=7)
    generator = iter_crawl(config)

    progress = []
    while True:
        try:
            progress.append(next(generator))
        except StopIteration as e:
            site = e.value
            break

    assert progress[0] == (0, 7)
    assert progress[-1] == (7, 7)
    assert all(total == 7 for _, total in progress)
    assert [done for done, _ in progress] == sorted(done for done, _ in progress)
    assert site.pages_visited == 7


def test_crawl_single_page():
    config = scripted_config()
    fetcher = ScriptedFetcher(config, {
        "http://r.edu/": html("http://r.edu/", '<p>Only page</p><img src="a.gif">'),
    })

    site = crawl(config, fetcher=fetcher)
    assert site.pages_visited == 1
    assert site.census == site.per_page[0][1]
    assert site.census.image_count == 1


def test_crawl_cycle_terminates():
    config = scripted_config()
    fetcher = ScriptedFetcher(config, {
        "http://r.edu/": html("http://r.edu/", '<a href="/">self</a><a href="b.html">b</a>'),
        "http://r.edu/b.html": html("http://r.edu/b.html", '<a href="b.html">self</a><a href="/">a</a>'),
    })

    site = crawl(config, fetcher=fetcher)
    assert site.pages_visited == 2
    assert sorted(fetcher.requested) == ["http://r.edu/", "http://r.edu/b.html"]


def test_crawl_skips_redirect_to_visited():
    config = scripted_config()
    fetcher = ScriptedFetcher(config, {
        "http://r.edu/": html("http://r.edu/", '<a href="old.html">old</a><a href="new.html">new</a>'),
        "http://r.edu/old.html": redirect("http://r.edu/old.html", "new.html", 301),
        "http://r.edu/new.html": html("http://r.edu/new.html", "<p>new</p>"),
    })

    site = crawl(config, fetcher=fetcher)
    assert [url for url, _ in site.per_page] == ["http://r.edu/", "http://r.edu/new.html"]
    assert site.pages_failed == 0


def test_crawl_counts_non_html():
    config = scripted_config()
    fetcher = ScriptedFetcher(config, {
        "http://r.edu/": html("http://r.edu/", '<a href="data.json">data</a>'),
        "http://r.edu/data.json": json_document("http://r.edu/data.json"),
    })

    site = crawl(config, fetcher=fetcher)
    assert site.pages_visited == 1
    assert site.non_html == 1
    assert site.pages_failed == 0


def test_crawl_links_skipped():
    config = scripted_config()
    fetcher = ScriptedFetcher(config, {
        "http://r.edu/": html("http://r.edu/", '<a href="#top">top</a><a href="mailto:x@r.edu">mail</a>'),
    })

    assert crawl(config, fetcher=fetcher).links_skipped == 2


@pytest.mark.parametrize("responses", [
    {},
    {"http://r.edu/": redirect("http://r.edu/", "http://elsewhere.org/")},
    {"http://r.edu/": json_document("http://r.edu/")},
])
def test_crawl_seed_unreachable(responses):
    config = scripted_config()
    with pytest.raises(SeedUnreachableError):
        crawl(config, fetcher=ScriptedFetcher(config, responses))


def test_crawl_seed_failure_raises_from_backend_error():
    class Down(ScriptedFetcher):
        def get(self, url):
            raise FetchError("down")

    config = scripted_config()
    with pytest.raises(SeedUnreachableError):
        crawl(config, fetcher=Down(config))


def test_crawl_respects_robots():
    site = crawl(offline_config("http://t.edu/"))
    assert site.pages_visited == 3
    assert site.robots_disallowed == 1
    assert "http://t.edu/private/secret.html" not in [url for url, _ in site.per_page]
    assert site.scorm.looks_scorm

    site = crawl(offline_config("http://t.edu/", respect_robots=False))
    assert site.pages_visited == 4
    assert site.robots_disallowed == 0


def test_crawl_file_urls():
    site = crawl(offline_config("file:///u-course/index.html"))
    assert [url for url, _ in site.per_page] == [
        "file:///u-course/index.html", "file:///u-course/page2.html"]
    assert site.census.outbound_link_count == 1
    assert site.census.active_content_count == 1


def test_crawl_directory_seed_stays_in_directory():
    site = crawl(offline_config("file:///u-course"))

    urls = [url for url, _ in site.per_page]
    assert urls[0] == "file:///u-course/"
    assert all(url.startswith("file:///u-course/") for url in urls)
    assert "file:///t.edu/index.html" not in urls
    assert site.census.outbound_link_count >= 1


def test_crawl_dotted_directory_seed():
    # g.html links "/", the offline root itself, which is outside the site.
    site = crawl(offline_config("file:///s.edu"))

    assert all(url.startswith("file:///s.edu/") for url, _ in site.per_page)
    assert site.pages_visited == 9
    assert site.pages_failed == 1


def test_crawl_through_registered_backend():
    responses = {"http://r.edu/": html("http://r.edu/", "<p>registered</p>")}
    register_fetcher_type("scripted-crawl", ScriptedFetcher, responses=responses)

    site = crawl(scripted_config(backend="scripted-crawl"), Lexicon(), DEFAULT_POLICY)
    assert site.pages_visited == 1
    assert site.census.word_count == 1
