from __future__ import annotations

import json
import threading

from pathlib import Path

import pytest

from site_census.machinery.census import ElementCensus, Lexicon, ScormFindings
from site_census.machinery.crawler import CrawlConfig, SiteCensus
from site_census.machinery.fetchers import Fetcher, FileFetcher, Response

TESTS_DIR = Path(__file__).parent
FIXTURES = TESTS_DIR / "fixtures"
PAGES = FIXTURES / "pages"
SITES = FIXTURES / "sites"
GOLDEN = TESTS_DIR / "golden"
SRC = TESTS_DIR.parent / "src"


class ScriptedFetcher(Fetcher):
    """
    Answers with canned responses, 404 for anything else.
    """

    def __init__(self, config: CrawlConfig, responses: dict[str, Response] | None = None):
        super().__init__(config)
        self.responses = responses or {}
        self.requested: list[str] = []
        self._lock = threading.Lock()

    def get(self, url: str) -> Response:
        with self._lock:
            self.requested.append(url)

        return self.responses.get(url, Response(url, 404))


class RecordingFileFetcher(FileFetcher):
    def __init__(self, config: CrawlConfig, root: Path | None = None):
        super().__init__(config, root)
        self.requested: list[str] = []
        self._lock = threading.Lock()

    def get(self, url: str) -> Response:
        with self._lock:
            self.requested.append(url)
        return super().get(url)


def html(url: str, body: str) -> Response:
    return Response(url, 200, "text/html; charset=utf-8", body.encode())


def redirect(url: str, location: str, status: int = 302) -> Response:
    return Response(url, status, location=location)


def json_document(url: str) -> Response:
    return Response(url, 200, "application/json", b"{}")


def offline_config(seed_url: str, **kwargs) -> CrawlConfig:
    kwargs.setdefault("delay_ms", 0)
    return CrawlConfig(seed_url, offline_root=SITES, **kwargs)


@pytest.fixture(scope="session")
def manifest():
    return json.loads((PAGES / "manifest.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def lexicon():
    return Lexicon.load(FIXTURES / "lexicon.txt")


def golden_sites() -> list[tuple[str, SiteCensus]]:
    """
    The two sites of the golden comparison.
    """

    alpha = ElementCensus(
        word_count=120, image_count=2, audio_count=1, video_count=1,
        downloadable_content_count=1, script_functions=3, form_control_count=2,
        inbound_link_count=3, outbound_link_count=2, keyword_count=4, pages_counted=4)
    beta = ElementCensus(
        word_count=45, image_count=1, active_content_count=1,
        inbound_link_count=2, pages_counted=2)

    return [
        ("alpha", SiteCensus(
            "http://alpha.edu/", alpha, ScormFindings.from_names(["LMSInitialize", "LMSFinish"]),
            pages_visited=4, detailed=False)),
        ("beta", SiteCensus(
            "http://beta.org/", beta, ScormFindings(), pages_visited=2, detailed=False)),
    ]
