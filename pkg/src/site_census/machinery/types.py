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

import typing as t

TOOL_VERSION: t.Final = "0.1.0"

SegmentKind = t.Literal["text", "tag"]
FormatKind = t.Literal["json", "csv", "svg", "ascii"]
CommandKind = t.Literal["scan", "compare", "render"]

KNOWN_FORMATS: tuple[FormatKind, ...] = ("json", "csv", "svg", "ascii")
KNOWN_COMMANDS: set[CommandKind] = {"scan", "compare", "render"}

# File extension of every output format.
FORMAT_EXTENSIONS: dict[FormatKind, str] = {
    "json": ".json",
    "csv": ".csv",
    "svg": ".svg",
    "ascii": ".txt",
}

# Chart categories in their fixed order, mapped to the census counter feeding them.
CategoryName = t.Literal[
    "images", "audio", "video", "active", "downloadable",
    "inbound_links", "outbound_links",
]
CATEGORIES: dict[CategoryName, str] = {
    "images": "image_count",
    "audio": "audio_count",
    "video": "video_count",
    "active": "active_content_count",
    "downloadable": "downloadable_content_count",
    "inbound_links": "inbound_link_count",
    "outbound_links": "outbound_link_count",
}

# Every counter of a census, in export order.
COUNTERS: tuple[str, ...] = (
    "word_count",
    "image_count",
    "audio_count",
    "video_count",
    "active_content_count",
    "downloadable_content_count",
    "script_functions",
    "form_control_count",
    "inbound_link_count",
    "outbound_link_count",
    "keyword_count",
)


class CensusError(Exception):
    """
    Base class of the errors raised by the census machinery.
    """


del t
