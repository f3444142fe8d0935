from __future__ import annotations

import time

import pytest

from conftest import SITES, ScriptedFetcher, offline_config
from site_census.machinery.crawler import CrawlConfig
from site_census.machinery.fetchers import (
    FetchError, FileFetcher, HTTPFetcher, HostThrottle, OutsideRootError, Response,
    RobotsPolicy, init_fetcher, register_fetcher_type,
)


@pytest.fixture
def file_fetcher():
    return FileFetcher(offline_config("http://s.edu/"))


def test_file_fetcher_serves_file(file_fetcher):
    response = file_fetcher.get("http://s.edu/a.html")
    assert response.status == 200
    assert response.ok
    assert response.body == (SITES / "s.edu" / "a.html").read_bytes()
    assert response.content_type == "text/html"


def test_file_fetcher_serves_index(file_fetcher):
    response = file_fetcher.get("http://s.edu/")
    assert response.status == 200
    assert response.body == (SITES / "s.edu" / "index.html").read_bytes()


def test_file_fetcher_missing(file_fetcher):
    response = file_fetcher.get("http://s.edu/missing.html")
    assert response.status == 404
    assert response.body is None
    assert not response.ok


def test_file_fetcher_directory_redirect(file_fetcher):
    response = file_fetcher.get("http://t.edu/private")
    assert response.is_redirect
    assert response.location == "http://t.edu/private/"

    # No index file in there.
    assert file_fetcher.get("http://t.edu/private/").status == 404


def test_file_fetcher_rejects_escape(file_fetcher):
    with pytest.raises(OutsideRootError):
        file_fetcher.get("http://s.edu/../../../etc/passwd")


def test_file_fetcher_file_urls(file_fetcher):
    response = file_fetcher.get("file:///u-course/page2.html")
    assert response.status == 200
    assert b"notes.doc" in response.body


def test_file_fetcher_needs_root():
    with pytest.raises(ValueError):
        FileFetcher(CrawlConfig("http://s.edu/"))


def test_http_fetcher_user_agent():
    fetcher = HTTPFetcher(CrawlConfig("http://s.edu/", user_agent="census-test/1"))
    try:
        assert fetcher.session.headers["User-Agent"] == "census-test/1"
    finally:
        fetcher.close()


def test_fetcher_registry():
    config = CrawlConfig("http://s.edu/", offline_root=SITES)
    assert isinstance(init_fetcher("file", config), FileFetcher)
    assert isinstance(init_fetcher("http", config), HTTPFetcher)

    register_fetcher_type("scripted-empty", ScriptedFetcher, responses={})
    fetcher = init_fetcher("scripted-empty", config)
    assert isinstance(fetcher, ScriptedFetcher)
    assert fetcher.get("http://s.edu/").status == 404

    with pytest.raises(ValueError, match="Unknown fetch backend"):
        init_fetcher("gopher", config)


def test_host_throttle_spaces_requests():
    throttle = HostThrottle(60)

    start = time.monotonic()
    throttle.wait("http://s.edu/a")
    throttle.wait("http://other.org/a")
    assert time.monotonic() - start < 0.05

    throttle.wait("http://s.edu/b")
    assert time.monotonic() - start >= 0.055


def test_host_throttle_disabled():
    throttle = HostThrottle(0)
    start = time.monotonic()
    for _ in range(100):
        throttle.wait("http://s.edu/")
    assert time.monotonic() - start < 0.05


def robots_getter(status: int, text: str | dict[str, str] = "", *, fail: bool = False):
    """
    `text` is the robots.txt of every host, or a robots.txt URL to body map.
    """

    requested: list[str] = []

    def get(url: str):
        requested.append(url)
        if fail:
            raise FetchError("down")
        body_text = text if isinstance(text, str) else text.get(url, "")
        body = body_text.encode() if 200 <= status < 300 else None
        return Response(url, status, "text/plain", body)

    return get, requested


def test_robots_policy_disallows():
    get, requested = robots_getter(200, {
        "http://s.edu/robots.txt": "User-agent: *\nDisallow: /private/\n",
        "http://other.org/robots.txt": "User-agent: *\nDisallow: /drafts/\n",
    })
    robots = RobotsPolicy(get, "site_census/test")

    assert robots.allowed("http://s.edu/lesson.html")
    assert not robots.allowed("http://s.edu/private/answers.html")
    assert requested == ["http://s.edu/robots.txt"]

    assert robots.allowed("http://other.org/private/x")
    assert not robots.allowed("http://other.org/drafts/y")
    assert requested == ["http://s.edu/robots.txt", "http://other.org/robots.txt"]


@pytest.mark.parametrize("status, allowed", [(401, False), (403, False), (404, True), (500, True)])
def test_robots_policy_statuses(status, allowed):
    get, _ = robots_getter(status)
    assert RobotsPolicy(get, "site_census/test").allowed("http://s.edu/x") == allowed


def test_robots_policy_unreachable_allows():
    get, _ = robots_getter(200, fail=True)
    assert RobotsPolicy(get, "site_census/test").allowed("http://s.edu/x")


def test_robots_policy_ignores_files():
    get, requested = robots_getter(403)
    assert RobotsPolicy(get, "site_census/test").allowed("file:///site/index.html")
    assert requested == []
