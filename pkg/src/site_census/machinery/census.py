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

import re
import dataclasses

from pathlib import Path
from typing import Any, ClassVar, Final, Iterable, TYPE_CHECKING

from .markup_partition import SegmentStream, TagToken, scan, extension_of
from .types import COUNTERS, CensusError
from .urls import SiteScope, normalize_url, is_outbound

if TYPE_CHECKING:
    from .crawler import PageSource


class NotCensusableError(CensusError):
    """
    Raised for a page whose content is not HTML.
    """


class LexiconError(CensusError):
    pass


class PolicyError(CensusError):
    pass


@dataclasses.dataclass(frozen=True)
class ElementCensus:
    """
    Per-category element counts of a page or of a whole site.
    Censuses are aggregated with `+`, a field-wise sum.
    """

    word_count: int = 0
    image_count: int = 0
    audio_count: int = 0
    video_count: int = 0
    active_content_count: int = 0
    downloadable_content_count: int = 0
    script_functions: int = 0
    form_control_count: int = 0
    inbound_link_count: int = 0
    outbound_link_count: int = 0
    keyword_count: int = 0

    pages_counted: int = 0

    def __post_init__(self):
        for field in dataclasses.fields(self):
            value = getattr(self, field.name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ValueError(f"Census field {field.name!r} must be a non-negative integer, got {value!r}.")

    def __add__(self, other: Any):
        if not isinstance(other, ElementCensus):
            return NotImplemented

        return ElementCensus(**{
            field.name: getattr(self, field.name) + getattr(other, field.name)
            for field in dataclasses.fields(self)
        })

    def counters(self) -> dict[str, int]:
        """
        Returns the eleven counters in export order.
        """

        return {name: getattr(self, name) for name in COUNTERS}

    @classmethod
    def total(cls, censuses: Iterable[ElementCensus]) -> ElementCensus:
        return sum(censuses, cls())


@dataclasses.dataclass(frozen=True)
class Lexicon:
    """
    Set of lowercase domain terms of one to three words.
    """

    MAX_WORDS: ClassVar = 3

    entries: frozenset[str] = frozenset()

    def __post_init__(self):
        for entry in self.entries:
            words = entry.split()
            if not words:
                raise LexiconError("Lexicon entries can not be empty.")
            if len(words) > self.MAX_WORDS:
                raise LexiconError(f"Lexicon entry {entry!r} has more than {self.MAX_WORDS} words.")

    @property
    def longest(self):
        return max((len(e.split()) for e in self.entries), default=0)

    @classmethod
    def from_lines(cls, lines: Iterable[str], source: str = "<lexicon>"):
        """
        Builds a lexicon from one-term-per-line text. Blank lines and
        lines starting with '#' are ignored; terms are lowercased.
        """

        entries: set[str] = set()
        for line_no, line in enumerate(lines, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue

            words = line.lower().split()
            if len(words) > cls.MAX_WORDS:
                raise LexiconError(
                    f"Lexicon term has more than {cls.MAX_WORDS} words at {source}:{line_no}")

            entries.add(" ".join(words))

        return cls(frozenset(entries))

    @classmethod
    def load(cls, path: Path):
        try:
            with path.open("r", encoding="utf-8") as f:
                return cls.from_lines(f, str(path))
        except (OSError, UnicodeDecodeError) as e:
            raise LexiconError(f"Can not read lexicon file: {path}") from e


@dataclasses.dataclass(frozen=True)
class ScormFindings:
    """
    SCORM run-time API names found in the scripts of a page or site.

    `looks_scorm`
        True iff a name of the initialize family and a name of the
        terminate family were both found.
    """

    INITIALIZE_FAMILY: ClassVar = frozenset({"LMSInitialize", "Initialize"})
    TERMINATE_FAMILY: ClassVar = frozenset({"LMSFinish", "Terminate"})

    api_names_found: frozenset[str] = frozenset()
    looks_scorm: bool = False

    def __post_init__(self):
        if self.looks_scorm and not self.api_names_found:
            raise ValueError("SCORM findings can not look like SCORM without API names.")

    @classmethod
    def from_names(cls, names: Iterable[str]):
        found = frozenset(names)
        looks_scorm = bool(found & cls.INITIALIZE_FAMILY) and bool(found & cls.TERMINATE_FAMILY)
        return cls(found, looks_scorm)

    def __or__(self, other: Any):
        if not isinstance(other, ScormFindings):
            return NotImplemented

        return ScormFindings.from_names(self.api_names_found | other.api_names_found)


# SCORM 1.2 and SCORM 2004 run-time API verbs.
SCORM_API_NAMES: Final = frozenset({
    "LMSInitialize", "LMSFinish", "LMSCommit",
    "LMSGetValue", "LMSSetValue", "LMSGetLastError",
    "Initialize", "Terminate", "Commit", "GetValue", "SetValue",
})

_scorm_re = re.compile(
    r"(?<![A-Za-z0-9_])(" + "|".join(sorted(SCORM_API_NAMES)) + r")(?![A-Za-z0-9_])")


@dataclasses.dataclass(frozen=True)
class ExtensionPolicy:
    """
    File extensions which make a src or href count in a category.
    The defaults are the lists of the original counting algorithm.

    `count_activex`
        If true, <object classid=...> tags count as active content too.
    """

    image_exts: frozenset[str] = frozenset({"bmp", "jpg", "gif"})
    audio_exts: frozenset[str] = frozenset({"wav", "mp3"})
    video_exts: frozenset[str] = frozenset({"dat", "avi"})
    active_exts: frozenset[str] = frozenset({"swf"})
    downloadable_exts: frozenset[str] = frozenset({"doc", "pdf", "ppt"})

    count_activex: bool = False

    def __post_init__(self):
        sets = {
            "image": self.image_exts,
            "audio": self.audio_exts,
            "video": self.video_exts,
            "active": self.active_exts,
            "downloadable": self.downloadable_exts,
        }

        for name, exts in sets.items():
            if any(not e or e != e.lower() or e.startswith(".") for e in exts):
                raise PolicyError(f"The {name} extensions should be lowercase and without a dot: {sorted(exts)}.")

        names = list(sets)
        for i, first in enumerate(names):
            for second in names[i + 1:]:
                if common := sets[first] & sets[second]:
                    raise PolicyError(
                        f"The {first} and {second} extensions overlap: {', '.join(sorted(common))}.")

    def with_overrides(self, count_activex: bool | None = None, **exts: Iterable[str] | None):
        """
        Returns a copy with the given extension sets replaced, for example
        `policy.with_overrides(image_exts=["png", "jpg"])`. None values
        keep the current set.
        """

        changes: dict[str, Any] = {
            name: frozenset(e.strip().lstrip(".").lower() for e in value if e.strip())
            for name, value in exts.items() if value is not None
        }
        if count_activex is not None:
            changes["count_activex"] = count_activex

        return dataclasses.replace(self, **changes)


DEFAULT_POLICY: Final = ExtensionPolicy()


@dataclasses.dataclass(frozen=True)
class Link:
    """
    A href found on a page. `url` is None for a skipped link.
    """

    href: str
    url: str | None
    outbound: bool = False


@dataclasses.dataclass(frozen=True)
class LinkTally:
    inbound: int = 0
    outbound: int = 0
    skipped: int = 0


@dataclasses.dataclass(frozen=True)
class PageCensus:
    """
    Everything counted on a single page.
    """

    census: ElementCensus
    scorm: ScormFindings
    links: LinkTally

    # Inbound link targets in document order, what the crawler follows.
    inbound_urls: tuple[str, ...] = ()


def _elements(stream: SegmentStream) -> Iterable[TagToken]:
    return (token for token in stream.tags() if token.is_element)


def _count_src(stream: SegmentStream, exts: frozenset[str]):
    count = 0
    for token in _elements(stream):
        src = token.get("src")
        if src is not None and extension_of(src.strip()) in exts:
            count += 1
    return count


def _count_opening(stream: SegmentStream, names: frozenset[str]):
    return sum(1 for t in _elements(stream) if t.is_opening and t.name in names)


def count_words(stream: SegmentStream) -> int:
    return sum(len(text.split()) for text in stream.texts())


def count_images(stream: SegmentStream, policy: ExtensionPolicy = DEFAULT_POLICY) -> int:
    return _count_src(stream, policy.image_exts)


def count_audio(stream: SegmentStream, policy: ExtensionPolicy = DEFAULT_POLICY) -> int:
    return _count_src(stream, policy.audio_exts)


def count_video(stream: SegmentStream, policy: ExtensionPolicy = DEFAULT_POLICY) -> int:
    return _count_src(stream, policy.video_exts)


def count_active(stream: SegmentStream, policy: ExtensionPolicy = DEFAULT_POLICY) -> int:
    """
    Counts applets, active content files (Flash) and, when enabled by
    the policy, ActiveX objects.
    """

    count = _count_opening(stream, frozenset({"applet"}))
    count += _count_src(stream, policy.active_exts)

    if policy.count_activex:
        count += sum(1 for t in _elements(stream)
                     if t.is_opening and t.name == "object" and "classid" in t)

    return count


def count_downloadables(stream: SegmentStream, policy: ExtensionPolicy = DEFAULT_POLICY) -> int:
    count = 0
    for token in _elements(stream):
        href = token.get("href")
        if href is not None and extension_of(href.strip()) in policy.downloadable_exts:
            count += 1
    return count


def resolve_links(
    stream: SegmentStream, page_url: str, scope: SiteScope,
    policy: ExtensionPolicy = DEFAULT_POLICY,
) -> list[Link]:
    """
    Returns every href of the page which is a link, that is not a
    downloadable, resolved against `page_url` and classified.
    Fragment-only hrefs and unresolvable ones have url None.
    """

    rv: list[Link] = []
    for token in _elements(stream):
        href = token.get("href")
        if href is None:
            continue

        href = href.strip()
        if extension_of(href) in policy.downloadable_exts:
            continue

        if not href or href.startswith("#"):
            rv.append(Link(href, None))
            continue

        url = normalize_url(page_url, href)
        if url is None:
            rv.append(Link(href, None))
        else:
            rv.append(Link(href, url, is_outbound(url, scope)))

    return rv


def classify_links(
    stream: SegmentStream, page_url: str, scope: SiteScope,
    policy: ExtensionPolicy = DEFAULT_POLICY,
) -> LinkTally:
    return _tally(resolve_links(stream, page_url, scope, policy))


def _tally(links: list[Link]):
    inbound = outbound = skipped = 0
    for link in links:
        if link.url is None:
            skipped += 1
        elif link.outbound:
            outbound += 1
        else:
            inbound += 1

    return LinkTally(inbound, outbound, skipped)


def count_script_functions(stream: SegmentStream) -> int:
    """
    Counts the top-level brace groups of every script element. A group
    ends each time the brace depth returns to zero; an unmatched '}'
    is ignored and a group left open at the end of the script is not
    counted.
    """

    count = 0
    for block in stream.raw_text_blocks("script"):
        depth = 0
        for c in block:
            if c == "{":
                depth += 1
            elif c == "}" and depth:
                depth -= 1
                if not depth:
                    count += 1

    return count


def detect_scorm_api(stream: SegmentStream) -> ScormFindings:
    names: set[str] = set()
    for block in stream.raw_text_blocks("script"):
        names.update(_scorm_re.findall(block))

    return ScormFindings.from_names(names)


def count_form_controls(stream: SegmentStream) -> int:
    return _count_opening(stream, frozenset({"input", "textarea", "select", "button"}))


_punctuation_re = re.compile(r"^[^A-Za-z0-9-]+|[^A-Za-z0-9-]+$")


def keyword_tokens(stream: SegmentStream) -> list[str]:
    """
    Returns the learner-facing words, lowercased and stripped of
    leading and trailing punctuation (inner hyphens are kept).
    """

    return [
        _punctuation_re.sub("", word.lower())
        for text in stream.texts()
        for word in text.split()
    ]


def count_keywords(stream: SegmentStream, lexicon: Lexicon) -> int:
    """
    Counts lexicon matches, preferring the longest term at each word
    and never matching a word twice.
    """

    if not lexicon.entries:
        return 0

    tokens = keyword_tokens(stream)
    longest = lexicon.longest

    count = 0
    i = 0
    while i < len(tokens):
        for size in range(min(longest, len(tokens) - i), 0, -1):
            if " ".join(tokens[i:i + size]) in lexicon.entries:
                count += 1
                i += size
                break
        else:
            i += 1

    return count


def census_page(
    page: PageSource, lexicon: Lexicon, policy: ExtensionPolicy, scope: SiteScope,
) -> PageCensus:
    """
    Scans the page once and runs every counter over it.
    Raises NotCensusableError for a page without HTML content.
    """

    if page.body is None or not page.is_html:
        raise NotCensusableError(f"{page.final_url} is not an HTML page.")

    stream = scan(page.body)

    links = resolve_links(stream, page.final_url, scope, policy)
    tally = _tally(links)

    census = ElementCensus(
        word_count=count_words(stream),
        image_count=count_images(stream, policy),
        audio_count=count_audio(stream, policy),
        video_count=count_video(stream, policy),
        active_content_count=count_active(stream, policy),
        downloadable_content_count=count_downloadables(stream, policy),
        script_functions=count_script_functions(stream),
        form_control_count=count_form_controls(stream),
        inbound_link_count=tally.inbound,
        outbound_link_count=tally.outbound,
        keyword_count=count_keywords(stream, lexicon),
        pages_counted=1,
    )

    inbound_urls = tuple(link.url for link in links if link.url is not None and not link.outbound)
    return PageCensus(census, detect_scorm_api(stream), tally, inbound_urls)
