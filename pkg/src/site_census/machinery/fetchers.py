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

import abc
import time
import mimetypes
import threading
import dataclasses

from pathlib import Path
from typing import Any, Callable, ClassVar, Final, TYPE_CHECKING
from urllib.parse import urlsplit, unquote
from urllib.robotparser import RobotFileParser

import requests

from .types import CensusError
from .urls import host_key

if TYPE_CHECKING:
    from .crawler import CrawlConfig


class FetchError(CensusError):
    """
    A page could not be fetched. Never fatal to a crawl.
    """


class LeftSiteError(FetchError):
    pass


class TooManyRedirectsError(FetchError):
    pass


class OutsideRootError(FetchError):
    pass


REDIRECT_STATUSES: Final = frozenset({301, 302, 303, 307, 308})


@dataclasses.dataclass(frozen=True)
class Response:
    """
    The answer of a backend to a single request, redirects not followed.
    """

    url: str
    status: int
    content_type: str | None = None
    body: bytes | None = None
    location: str | None = None

    @property
    def ok(self):
        return 200 <= self.status < 300

    @property
    def is_redirect(self):
        return self.status in REDIRECT_STATUSES and bool(self.location)


_registry: dict[str, tuple[type[Fetcher], dict[str, Any]]] = {}
KNOWN_FETCHERS: set[str] = set()


def register_fetcher_type(name: str, type: type[Fetcher], /, **extra_kwargs: Any):
    """
    Registers a fetch backend under `name`. `extra_kwargs` are passed
    to the backend constructor together with the crawl config.
    """

    _registry[name] = type, extra_kwargs
    KNOWN_FETCHERS.add(name)


def init_fetcher(name: str, config: CrawlConfig, /, **extra_kwargs: Any) -> Fetcher:
    try:
        type, default_extra_kwargs = _registry[name]
    except KeyError:
        raise ValueError(f"Unknown fetch backend {name!r}, known: {', '.join(sorted(KNOWN_FETCHERS))}.") from None

    return type(config, **(default_extra_kwargs | extra_kwargs))


class Fetcher(abc.ABC):
    """
    A backend retrieving single documents. Must be safe to call from
    several threads at once.
    """

    def __init__(self, config: CrawlConfig):
        self.config = config

    @abc.abstractmethod
    def get(self, url: str) -> Response:
        """
        Requests `url` without following redirects. Raises FetchError
        when no response could be obtained at all.
        """

    def close(self) -> None:
        pass


class HTTPFetcher(Fetcher):
    """
    Fetches http and https URLs with requests.
    """

    def __init__(self, config: CrawlConfig):
        super().__init__(config)

        self.session = requests.Session()
        self.session.headers["User-Agent"] = config.user_agent

    def get(self, url: str) -> Response:
        try:
            response = self.session.get(
                url, timeout=self.config.timeout_ms / 1000, allow_redirects=False)
        except requests.Timeout as e:
            raise FetchError(f"Timed out fetching {url}") from e
        except requests.RequestException as e:
            raise FetchError(f"Can not fetch {url}: {e}") from e

        status = response.status_code
        return Response(
            url,
            status,
            response.headers.get("Content-Type"),
            response.content if 200 <= status < 300 else None,
            response.headers.get("Location"),
        )

    def close(self):
        self.session.close()


class FileFetcher(Fetcher):
    """
    Serves URLs from a directory tree, for offline and hermetic crawls.

    http://host/path is read from ROOT/host/path and file:///path from
    ROOT/path. A directory is served through its index.html (or
    index.htm); a directory URL without the trailing slash is answered
    with a redirect to the slashed URL, as web servers do.
    """

    INDEX_FILES: ClassVar = ("index.html", "index.htm")

    def __init__(self, config: CrawlConfig, root: Path | None = None):
        super().__init__(config)

        root = root or config.offline_root
        if root is None:
            raise ValueError("The file backend needs an offline root directory.")
        self.root = Path(root).resolve()

    def _path(self, url: str) -> Path:
        parts = urlsplit(url)
        rel = unquote(parts.path)
        if parts.scheme in ("http", "https"):
            rel = f"{parts.hostname}/{rel}"

        path = (self.root / rel.lstrip("/")).resolve()
        if not path.is_relative_to(self.root):
            raise OutsideRootError(f"{url} is outside of the offline root.")

        return path

    def get(self, url: str) -> Response:
        path = self._path(url)

        if path.is_dir():
            if not urlsplit(url).path.endswith("/"):
                parts = urlsplit(url)
                return Response(url, 301, location=parts._replace(path=parts.path + "/").geturl())

            for index in self.INDEX_FILES:
                if (path / index).is_file():
                    path = path / index
                    break
            else:
                return Response(url, 404)

        if not path.is_file():
            return Response(url, 404)

        try:
            body = path.read_bytes()
        except OSError as e:
            raise FetchError(f"Can not read {path}") from e

        content_type, _ = mimetypes.guess_type(path.name)
        return Response(url, 200, content_type, body)


class HostThrottle:
    """
    Keeps at least `delay_ms` between two requests to the same host,
    shared by all the workers of a crawl.
    """

    def __init__(self, delay_ms: int):
        self.delay = delay_ms / 1000
        self._lock = threading.Lock()
        self._next_slot: dict[str, float] = {}

    def wait(self, url: str):
        if self.delay <= 0:
            return

        key = host_key(url)
        with self._lock:
            now = time.monotonic()
            slot = max(now, self._next_slot.get(key, now))
            self._next_slot[key] = slot + self.delay

        if slot > now:
            time.sleep(slot - now)


class RobotsPolicy:
    """
    Fetches robots.txt once per host and answers whether a URL may be
    crawled. Missing or unreadable robots.txt allows everything, 401
    and 403 disallow everything.
    """

    def __init__(self, get: Callable[[str], Response], user_agent: str):
        self._get = get
        self.user_agent = user_agent

        self._lock = threading.Lock()
        self._cache: dict[str, RobotFileParser] = {}

    def _load(self, robots_url: str):
        parser = RobotFileParser(robots_url)

        try:
            response = self._get(robots_url)
        except FetchError:
            parser.allow_all = True
            return parser

        if response.status in (401, 403):
            parser.disallow_all = True
        elif response.ok and response.body is not None:
            parser.parse(response.body.decode("utf-8", errors="replace").splitlines())
        else:
            parser.allow_all = True

        return parser

    def allowed(self, url: str) -> bool:
        if urlsplit(url).scheme not in ("http", "https"):
            return True

        key = host_key(url)
        with self._lock:
            if (parser := self._cache.get(key)) is None:
                parser = self._cache[key] = self._load(f"{key}/robots.txt")

        return parser.can_fetch(self.user_agent, url)
