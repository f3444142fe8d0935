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

from typing import Final, Iterator

from .types import SegmentKind

# Elements whose bodies are not learner-facing text.
RAW_TEXT_ELEMENTS: Final = frozenset({"script", "style"})

# Only the end tag of its own element closes a raw text element.
_RAW_TEXT_END: Final = {
    name: re.compile(rf"</{name}(?=[\s/>]|\Z)", re.IGNORECASE) for name in RAW_TEXT_ELEMENTS
}

# Reserved tag names for markup that is not an element.
COMMENT: Final = "#comment"
DECLARATION: Final = "#declaration"
INSTRUCTION: Final = "#instruction"


@dataclasses.dataclass(frozen=True)
class TagToken:
    """
    Structured content of a tag segment.

    `name`
        Lowercase tag name, or one of the reserved names
        (COMMENT, DECLARATION, INSTRUCTION) for non-element markup.

    `attributes`
        (lowercase name, raw value) pairs in source order. The first
        occurrence of a duplicated name wins.

    `is_void_style`
        True if the tag was written in the self-closing `<x ... />` form.
    """

    name: str
    is_closing: bool = False
    attributes: tuple[tuple[str, str], ...] = ()
    is_void_style: bool = False

    @property
    def is_element(self):
        return bool(self.name) and not self.name.startswith("#")

    @property
    def is_opening(self):
        return self.is_element and not self.is_closing

    def get(self, name: str) -> str | None:
        for aname, value in self.attributes:
            if aname == name:
                return value
        return None

    def __contains__(self, name: str):
        return self.get(name) is not None


@dataclasses.dataclass(frozen=True)
class Segment:
    kind: SegmentKind
    content: str

    # Start position of the segment in the source.
    offset: int

    # Tag segment cut by the end of input, without the closing '>'.
    terminated: bool = True

    # For text segments, the raw-text element (script or style) the
    # segment is in, and the ordinal of that element in the document.
    enclosing: str | None = None
    element: int = -1

    token: TagToken | None = dataclasses.field(default=None, compare=False, repr=False)

    @property
    def source(self):
        """
        The exact source text this segment was cut from.
        """

        if self.kind == "text":
            return self.content
        elif self.terminated:
            return f"<{self.content}>"
        else:
            return f"<{self.content}"


@dataclasses.dataclass(frozen=True)
class SegmentStream:
    """
    Ordered alternation of text and tag segments of a page.
    """

    segments: tuple[Segment, ...] = ()

    def __iter__(self):
        return iter(self.segments)

    def __len__(self):
        return len(self.segments)

    def reassemble(self) -> str:
        return "".join(s.source for s in self.segments)

    def tags(self) -> Iterator[TagToken]:
        """
        Yields the token of every tag segment, non-element markup included.
        """

        for segment in self.segments:
            if segment.token is not None:
                yield segment.token

    def texts(self) -> Iterator[str]:
        """
        Yields learner-facing text, that is text outside script and style.
        """

        for segment in self.segments:
            if segment.kind == "text" and segment.enclosing is None:
                yield segment.content

    def raw_text_blocks(self, name: str) -> list[str]:
        """
        Returns the text of every `name` element (script or style),
        one string per element in document order.
        """

        blocks: dict[int, list[str]] = {}
        for segment in self.segments:
            if segment.kind == "text" and segment.enclosing == name:
                blocks.setdefault(segment.element, []).append(segment.content)

        return ["".join(parts) for parts in blocks.values()]


def scan(html: str | bytes) -> SegmentStream:
    """
    Splits `html` into text segments (outside tags) and tag segments
    (inside tags, delimiters stripped). Never fails: an unterminated
    '<' at the end of input becomes a final unterminated tag segment
    and a comment runs through the closing "-->".

    The body of a script or style element is raw text up to the end
    tag of that element, even when it holds '<' or other markup. The
    self-closing form `<script />` opens the element too.
    """

    if isinstance(html, bytes):
        html = html.decode("utf-8", errors="replace")

    segments: list[Segment] = []

    enclosing: str | None = None
    element = -1

    pos = 0
    length = len(html)
    while pos < length:
        if enclosing is None:
            lt = html.find("<", pos)
            if lt == -1:
                lt = length
        else:
            match = _RAW_TEXT_END[enclosing].search(html, pos)
            lt = match.start() if match else length

        if lt > pos:
            if enclosing is None:
                segments.append(Segment("text", html[pos:lt], pos))
            else:
                segments.append(Segment("text", html[pos:lt], pos,
                                        enclosing=enclosing, element=element))

        if lt == length:
            break

        terminated = True
        if html.startswith("!--", lt + 1):
            end = html.find("-->", lt + 2)
            if end == -1:
                content = html[lt + 1:]
                terminated = False
                pos = length
            else:
                content = html[lt + 1:end + 2]
                pos = end + 3

        else:
            gt = html.find(">", lt + 1)
            if gt == -1:
                content = html[lt + 1:]
                terminated = False
                pos = length
            else:
                content = html[lt + 1:gt]
                pos = gt + 1

        token = parse_tag(content)
        segments.append(Segment("tag", content, lt, terminated, token=token))

        if enclosing is None:
            if token.is_opening and token.name in RAW_TEXT_ELEMENTS:
                enclosing = token.name
                element += 1
        else:
            # The tag is the end tag found by _RAW_TEXT_END.
            enclosing = None

    return SegmentStream(tuple(segments))


def parse_tag(tag_content: str) -> TagToken:
    """
    Parses the content of a tag segment into a TagToken. Attribute values
    may be double-quoted, single-quoted, unquoted or absent (bare
    attributes get an empty value). Comments, declarations and processing
    instructions get a reserved name.
    """

    if tag_content.startswith("!--"):
        return TagToken(COMMENT)
    elif tag_content.startswith("!"):
        return TagToken(DECLARATION)
    elif tag_content.startswith("?"):
        return TagToken(INSTRUCTION)

    s = tag_content
    n = len(s)
    i = 0

    is_closing = s.startswith("/")
    if is_closing:
        i = 1

    start = i
    while i < n and not s[i].isspace() and s[i] != "/":
        i += 1
    name = s[start:i].lower()

    attributes: dict[str, str] = {}
    is_void_style = False

    while True:
        while i < n and (s[i].isspace() or s[i] == "/"):
            if s[i] == "/" and not s[i + 1:].strip():
                is_void_style = True
            i += 1

        if i >= n:
            break

        start = i
        while i < n and not s[i].isspace() and s[i] not in "=/":
            i += 1

        # Stray '=' where a name is expected.
        if i == start:
            i += 1
            continue

        aname = s[start:i].lower()
        value = ""

        k = i
        while k < n and s[k].isspace():
            k += 1

        if k < n and s[k] == "=":
            k += 1
            while k < n and s[k].isspace():
                k += 1

            if k < n and s[k] in "\"'":
                end = s.find(s[k], k + 1)
                if end == -1:
                    value = s[k + 1:]
                    i = n
                else:
                    value = s[k + 1:end]
                    i = end + 1

            else:
                start = k
                while k < n and not s[k].isspace():
                    k += 1
                value = s[start:k]
                i = k

        if aname not in attributes:
            attributes[aname] = value

    return TagToken(name, is_closing, tuple(attributes.items()), is_void_style)


# "scheme://host" or "//host" in front of a path.
_AUTHORITY_RE: Final = re.compile(r"^(?:[A-Za-z][A-Za-z0-9+.-]*:)?//[^/]*")


def extension_of(url_or_path: str) -> str | None:
    """
    Returns the lowercase extension (without dot) of the last path
    component of `url_or_path`, ignoring the query and the fragment.
    A URL without a path, like "http://example.com", has none.
    Returns None if there is no extension.
    """

    cut = len(url_or_path)
    for delimiter in "?#":
        index = url_or_path.find(delimiter)
        if index != -1:
            cut = min(cut, index)

    path = _AUTHORITY_RE.sub("", url_or_path[:cut], count=1)
    component = path.rsplit("/", 1)[-1]
    dot = component.rfind(".")
    if dot <= 0:
        return None

    return component[dot + 1:].lower() or None
