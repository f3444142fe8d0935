# Copyright 2023 Andrej Klychin <klyuchin.a@gmail.com>
#
# Permission is hereby granted, free of charge, to any person
# obtaining a copy of this software and associated documentation files
# (the "Software"), to deal in the Software without restriction,
# including without limitation the rights to use, copy, modify, merge,
# publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so,
# subject to the following conditions:
#
# The above copyright notice and this permission notice shall be
# included in all copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND,
# EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF
# MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND
# NONINFRINGEMENT. IN NO EVENT SHALL THE AUTHORS OR COPYRIGHT HOLDERS BE
# LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION
# WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE SOFTWARE.

from __future__ import annotations

import threading
import collections
import dataclasses

import concurrent.futures as futures

from pathlib import Path
from typing import Final, Iterable
from urllib.parse import urlsplit

from .census import (
    DEFAULT_POLICY, ElementCensus, ExtensionPolicy, Lexicon, ScormFindings, census_page,
)
from .fetchers import (
    Fetcher, FetchError, HostThrottle, LeftSiteError, RobotsPolicy,
    TooManyRedirectsError, init_fetcher,
)
from .interface import PoolGenerator
from .markup_partition import extension_of
from .types import TOOL_VERSION, CensusError
from .urls import SUPPORTED_SCHEMES, is_outbound, normalize_url

MAX_REDIRECTS: Final = 5
HTML_EXTENSIONS: Final = frozenset({None, "htm", "html"})


class SeedUnreachableError(CensusError):
    """
    The seed page of a crawl could not be fetched or is not HTML.
    """


@dataclasses.dataclass(frozen=True)
class CrawlConfig:
    """
    Settings of a single site crawl.

    `seed_url`
        The index/home page the crawl starts from.

    `delay_ms`
        Minimal delay between two requests to the same host.

    `treat_subdomains_inbound`
        If true, links to subdomains of the seed host are inbound.

    `respect_robots`
        If false, robots.txt is not consulted.

    `offline_root`
        If set, pages are read from this directory instead of the network.

    `backend`
        Name of a registered fetch backend overriding the choice made
        from `offline_root`.
    """

    seed_url: str
    max_pages: int = 200
    max_depth: int = 10
    delay_ms: int = 500
    timeout_ms: int = 10000
    user_agent: str = f"site_census/{TOOL_VERSION}"
    treat_subdomains_inbound: bool = False
    parallelism: int = 1
    respect_robots: bool = True
    offline_root: Path | None = None
    backend: str | None = None

    def __post_init__(self):
        parts = urlsplit(self.seed_url)
        if parts.scheme.lower() not in SUPPORTED_SCHEMES:
            raise ValueError(f"Seed URL {self.seed_url!r} should use http, https or file scheme.")
        if parts.scheme.lower() == "file":
            if not parts.path.strip("/"):
                raise ValueError(f"Seed URL {self.seed_url!r} has no path.")
        elif not parts.hostname:
            raise ValueError(f"Seed URL {self.seed_url!r} has no host.")

        if self.max_pages < 1:
            raise ValueError("max_pages should be positive.")
        if self.max_depth < 0:
            raise ValueError("max_depth can not be negative.")
        if self.delay_ms < 0:
            raise ValueError("delay_ms can not be negative.")
        if self.timeout_ms < 1:
            raise ValueError("timeout_ms should be positive.")
        if self.parallelism < 1:
            raise ValueError("parallelism should be positive.")

    @property
    def fetcher_name(self):
        if self.backend is not None:
            return self.backend
        return "file" if self.offline_root is not None else "http"


class VisitedSet:
    """
    Normalized URLs already claimed by a crawl.
    """

    def __init__(self, urls: Iterable[str] = ()):
        self._lock = threading.Lock()
        self._urls = set(urls)

    def add(self, url: str) -> bool:
        """
        Adds `url` if it is absent. Returns True if it was added.
        """

        with self._lock:
            if url in self._urls:
                return False
            self._urls.add(url)
            return True

    def __contains__(self, url: object):
        with self._lock:
            return url in self._urls

    def __len__(self):
        with self._lock:
            return len(self._urls)


@dataclasses.dataclass(frozen=True)
class PageSource:
    """
    A fetched page. `body` is present iff the status is a success.
    """

    requested_url: str
    final_url: str
    status: int
    content_type: str | None = None
    body: bytes | None = None
    depth: int = 0

    def __post_init__(self):
        assert (self.body is not None) == self.ok, \
            f"Page {self.final_url} with status {self.status} should have a body only on success."

    @property
    def ok(self):
        return 200 <= self.status < 300

    @property
    def is_html(self):
        if self.content_type is not None:
            return "html" in self.content_type.lower()

        return extension_of(urlsplit(self.final_url).path) in HTML_EXTENSIONS


@dataclasses.dataclass(frozen=True)
class SiteCensus:
    """
    The aggregated census of a crawled site.

    `per_page`
        (final url, census) of every censused page in visiting order.
        Empty for a site loaded from a report, which is not `detailed`.

    `robots_disallowed`, `non_html`
        URLs skipped because of robots.txt, and fetched pages which
        were not HTML.
    """

    seed_url: str
    census: ElementCensus
    scorm: ScormFindings
    pages_visited: int
    pages_failed: int = 0
    links_skipped: int = 0
    per_page: tuple[tuple[str, ElementCensus], ...] = ()
    robots_disallowed: int = 0
    non_html: int = 0
    detailed: bool = True

    def __post_init__(self):
        if not self.detailed:
            return

        assert self.pages_visited == len(self.per_page), \
            f"Site {self.seed_url}: {self.pages_visited} pages visited, but {len(self.per_page)} censused."
        assert self.census == ElementCensus.total(c for _, c in self.per_page), \
            f"Site {self.seed_url}: census is not the sum of its pages."


def fetch(
    url: str, config: CrawlConfig, fetcher: Fetcher | None = None, *,
    throttle: HostThrottle | None = None, depth: int = 0,
) -> PageSource:
    """
    Fetches `url`, following up to MAX_REDIRECTS redirects within the site.

    Raises LeftSiteError for a redirect leaving the site,
    TooManyRedirectsError, and FetchError for network failures.
    """

    own_fetcher = fetcher is None
    if fetcher is None:
        fetcher = init_fetcher(config.fetcher_name, config)

    try:
        current = url
        for _ in range(MAX_REDIRECTS + 1):
            if throttle is not None:
                throttle.wait(current)

            response = fetcher.get(current)
            if not response.is_redirect:
                return PageSource(
                    url, current, response.status, response.content_type,
                    response.body if response.ok else None, depth)

            target = normalize_url(current, response.location or "")
            if target is None:
                raise FetchError(f"{current} redirects to unsupported {response.location!r}.")
            if is_outbound(target, config):
                raise LeftSiteError(f"{current} redirects out of the site to {target}.")

            current = target

        raise TooManyRedirectsError(f"{url} redirects more than {MAX_REDIRECTS} times.")

    finally:
        if own_fetcher:
            fetcher.close()


def iter_crawl(
    config: CrawlConfig,
    lexicon: Lexicon = Lexicon(),
    policy: ExtensionPolicy = DEFAULT_POLICY,
    fetcher: Fetcher | None = None,
) -> PoolGenerator[SiteCensus]:
    """
    Crawls the site breadth-first from the seed, yielding
    (pages censused, max pages) as it goes, and returns the SiteCensus.

    Up to `config.parallelism` URLs are taken from the frontier and
    fetched at once, but their results are processed in frontier order,
    so the outcome does not depend on the parallelism.

    Raises SeedUnreachableError if the seed can not be censused.
    """

    seed = normalize_url(config.seed_url, config.seed_url)
    if seed is None:
        raise SeedUnreachableError(f"Seed URL {config.seed_url!r} can not be crawled.")

    own_fetcher = fetcher is None
    if fetcher is None:
        fetcher = init_fetcher(config.fetcher_name, config)

    throttle = HostThrottle(config.delay_ms)

    robots: RobotsPolicy | None = None
    if config.respect_robots:
        def get_robots(url: str):
            throttle.wait(url)
            return fetcher.get(url)

        robots = RobotsPolicy(get_robots, config.user_agent)

    # A file seed redirected to its directory, "/course" to "/course/",
    # is rescoped onto that directory.
    scope = config

    visited = VisitedSet([seed])
    frontier = collections.deque([(seed, 0)])

    per_page: list[tuple[str, ElementCensus]] = []
    scorm = ScormFindings()
    pages_failed = 0
    links_skipped = 0
    robots_disallowed = 0
    non_html = 0

    def process(url: str, depth: int, future: futures.Future[PageSource] | None):
        nonlocal scope, scorm, pages_failed, links_skipped, robots_disallowed, non_html

        is_seed = url == seed and not per_page

        if future is None:
            if is_seed:
                raise SeedUnreachableError(f"Seed {url} is disallowed by robots.txt.")
            robots_disallowed += 1
            return

        try:
            page = future.result()
        except FetchError as e:
            if is_seed:
                raise SeedUnreachableError(f"Seed {url} can not be fetched: {e}") from e
            pages_failed += 1
            return

        if not page.ok:
            if is_seed:
                raise SeedUnreachableError(f"Seed {url} answered with status {page.status}.")
            pages_failed += 1
            return

        # Redirected onto a page which is already claimed.
        if page.final_url != url and not visited.add(page.final_url):
            return

        if not page.is_html:
            if is_seed:
                raise SeedUnreachableError(f"Seed {page.final_url} is not an HTML page.")
            non_html += 1
            return

        if is_seed and page.final_url != url and urlsplit(url).scheme == "file":
            scope = dataclasses.replace(config, seed_url=page.final_url)

        result = census_page(page, lexicon, policy, scope)
        per_page.append((page.final_url, result.census))
        scorm |= result.scorm
        links_skipped += result.links.skipped

        if depth >= config.max_depth:
            return

        for link in result.inbound_urls:
            if visited.add(link):
                frontier.append((link, depth + 1))

    yield 0, config.max_pages

    try:
        with futures.ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            while frontier and len(per_page) < config.max_pages:
                batch: list[tuple[str, int, futures.Future[PageSource] | None]] = []
                while frontier and len(batch) < config.parallelism:
                    url, depth = frontier.popleft()

                    assert not is_outbound(url, scope), f"Outbound {url} in the frontier."

                    if robots is not None and not robots.allowed(url):
                        batch.append((url, depth, None))
                        continue

                    future = pool.submit(fetch, url, scope, fetcher, throttle=throttle, depth=depth)
                    batch.append((url, depth, future))

                for url, depth, future in batch:
                    if len(per_page) >= config.max_pages:
                        break

                    process(url, depth, future)

                yield len(per_page), config.max_pages

    finally:
        if own_fetcher:
            fetcher.close()

    return SiteCensus(
        seed_url=seed,
        census=ElementCensus.total(c for _, c in per_page),
        scorm=scorm,
        pages_visited=len(per_page),
        pages_failed=pages_failed,
        links_skipped=links_skipped,
        per_page=tuple(per_page),
        robots_disallowed=robots_disallowed,
        non_html=non_html,
    )


def crawl(
    config: CrawlConfig,
    lexicon: Lexicon = Lexicon(),
    policy: ExtensionPolicy = DEFAULT_POLICY,
    fetcher: Fetcher | None = None,
) -> SiteCensus:
    """
    Crawls the site of `config.seed_url` and returns its census.
    See `iter_crawl`.
    """

    generator = iter_crawl(config, lexicon, policy, fetcher)
    while True:
        try:
            next(generator)
        except StopIteration as e:
            return e.value
