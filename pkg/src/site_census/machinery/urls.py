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

import posixpath

from typing import Final, Protocol
from urllib.parse import urljoin, urlsplit, urlunsplit

from .markup_partition import extension_of

SUPPORTED_SCHEMES: Final = frozenset({"http", "https", "file"})
DEFAULT_PORTS: Final = {"http": 80, "https": 443}


class SiteScope(Protocol):
    """
    What decides whether a URL belongs to the crawled site.
    """

    seed_url: str
    treat_subdomains_inbound: bool


def remove_dot_segments(path: str) -> str:
    """
    Collapses "." and ".." segments of a path.
    """

    segments = path.split("/")
    output: list[str] = []
    for segment in segments:
        if segment == ".":
            continue
        elif segment == "..":
            # Never pop the root of an absolute path.
            if output and (len(output) > 1 or output[0] != ""):
                output.pop()
        else:
            output.append(segment)

    # "/a/." and "/a/.." still denote directories.
    if segments[-1] in (".", ".."):
        output.append("")

    return "/".join(output)


def normalize_url(base: str, ref: str) -> str | None:
    """
    Resolves `ref` against the absolute URL `base` and normalizes it:
    lowercase scheme and host, no fragment, no default port, no dot
    segments, query preserved. Returns None if `ref` is not a
    fetchable http, https or file URL.
    """

    try:
        parts = urlsplit(urljoin(base, ref.strip()))
        port = parts.port
    except ValueError:
        return None

    scheme = parts.scheme.lower()
    if scheme not in SUPPORTED_SCHEMES:
        return None

    host = parts.hostname or ""
    if scheme != "file" and not host:
        return None

    if ":" in host:
        host = f"[{host}]"

    netloc = host
    if port is not None and port != DEFAULT_PORTS.get(scheme):
        netloc = f"{host}:{port}"

    path = remove_dot_segments(parts.path)
    if not path and scheme != "file":
        path = "/"

    return urlunsplit((scheme, netloc, path, parts.query, ""))


def seed_directory(seed_path: str) -> str:
    """
    Returns the directory (with a trailing slash) a file seed lives in.
    A last component without an extension, like "/course", is taken
    for the directory itself.
    """

    if seed_path.endswith("/"):
        return seed_path

    if extension_of(seed_path) is None:
        return seed_path + "/"

    directory = posixpath.dirname(seed_path)
    if not directory.endswith("/"):
        directory += "/"
    return directory


def is_outbound(url: str, scope: SiteScope) -> bool:
    """
    Returns False if the normalized `url` belongs to the site of
    `scope.seed_url`, and True otherwise.

    For http(s) the host must equal the seed host, or be its subdomain
    when `scope.treat_subdomains_inbound` is set. For file URLs the path
    must be within the seed's directory tree.
    """

    seed = urlsplit(scope.seed_url)
    target = urlsplit(url)

    if seed.scheme.lower() == "file":
        if target.scheme.lower() != "file":
            return True

        # The directory itself, with or without its slash, is in the site.
        return not (target.path + "/").startswith(seed_directory(seed.path))

    if target.scheme.lower() not in ("http", "https"):
        return True

    seed_host = seed.hostname or ""
    host = target.hostname or ""

    if host == seed_host:
        return False

    if scope.treat_subdomains_inbound and host.endswith("." + seed_host):
        return False

    return True


def host_key(url: str) -> str:
    """
    Returns "scheme://host[:port]" of `url`, the unit of politeness.
    """

    parts = urlsplit(url)
    return f"{parts.scheme}://{parts.netloc}"
