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
import sys
import pathlib
import textwrap
import traceback
import typing as t

from site_census import machinery


class CensusContext(machinery.Context):
    """
    Namespace created once per run representing the command line and
    everything computed from it by the tasks.
    """

    def __init__(
        self,
        targets: t.Iterable[str] = (),
        label: t.Iterable[str] | None = None,
        format: t.Iterable[machinery.FormatKind] | None = None,
        **kwargs: t.Any,
    ):
        super().__init__(**kwargs)
        self.targets = tuple(targets)
        self.labels = tuple(label or ())
        self.formats = tuple(dict.fromkeys(format or self.DEFAULT_FORMATS))

    DEFAULT_FORMATS: t.ClassVar = ("json", "svg")

    # URLs to scan, or report files to compare and render.
    targets: tuple[str, ...]

    # Labels given on the command line, pairing with the targets.
    labels: tuple[str, ...]

    # Requested output formats, without repeats.
    formats: tuple[machinery.FormatKind, ...]

    # Path to the lexicon file. If None, keywords are not counted.
    lexicon: pathlib.Path | None = None

    # Comma-separated extension overrides.
    ext_image: str | None = None
    ext_audio: str | None = None
    ext_video: str | None = None
    ext_active: str | None = None
    ext_downloadable: str | None = None
    count_activex: bool = False

    # Crawl settings, see machinery.CrawlConfig.
    max_pages: int = 200
    max_depth: int = 10
    delay_ms: int = 500
    timeout_ms: int = 10000
    parallelism: int = 1
    user_agent: str | None = None
    treat_subdomains_inbound: bool = False
    respect_robots: bool = True
    offline_root: pathlib.Path | None = None

    # Should per-page tables be written?
    per_page: bool = False

    lexicon_terms: machinery.Lexicon
    policy: machinery.ExtensionPolicy

    # Crawl configs of the scan targets with their labels.
    crawl_configs: list[tuple[str, machinery.CrawlConfig]]

    # Censused sites in the target order.
    sites: list[tuple[str, machinery.SiteCensus]]

    # Scan targets which could not be censused at all.
    unusable_seeds: list[str]

    # Report files of render with their sites.
    reports: list[tuple[pathlib.Path, list[tuple[str, machinery.SiteCensus]]]]

    comparison: machinery.ComparisonReport

    def crawl_config(self, seed_url: str) -> machinery.CrawlConfig:
        """
        Creates a crawl config for `seed_url` from the command line.
        Raises ValueError for bad settings.
        """

        extra: dict[str, t.Any] = {}
        if self.user_agent:
            extra["user_agent"] = self.user_agent

        return machinery.CrawlConfig(
            seed_url=seed_url,
            max_pages=self.max_pages,
            max_depth=self.max_depth,
            delay_ms=self.delay_ms,
            timeout_ms=self.timeout_ms,
            treat_subdomains_inbound=self.treat_subdomains_inbound,
            parallelism=self.parallelism,
            respect_robots=self.respect_robots,
            offline_root=self.offline_root,
            **extra,
        )

    @staticmethod
    def artifact_name(stem: str, format: machinery.FormatKind):
        """
        Returns a file name for the artifact, replacing characters not
        safe in file names.
        """

        stem = re.sub(r"[^A-Za-z0-9._-]", "_", stem).lstrip(".") or "site"
        return stem + machinery.FORMAT_EXTENSIONS[format]


class CLIInterface(machinery.Interface):
    """
    Displays progress and diagnostics on the error stream, so the data
    written to the standard output is never mixed with them.
    """

    progress_bar: machinery.interface.ProgressBar[str] | None

    def __init__(self, verbose: bool, silent: bool):
        super().__init__(verbose, silent)

        # Progress is redrawn in place only on a terminal.
        self.redraw = sys.stderr.isatty()

    def _write(self, s: str, *, log: bool = True, force: bool = False, wrap: bool = True):
        if not s:
            return

        if wrap and set(s) != {"\n"}:
            s = "\n".join(textwrap.fill(p, width=160) for p in s.split("\n\n"))

        if force or not self.silent:
            print(s, file=sys.stderr, flush=True)

        if log:
            self.interactions.append(s)

    def info(self, prompt: str, verbose: bool = False):
        if verbose and not self.verbose:
            return

        self._write(prompt)

    def warning(self, prompt: str):
        self._write(f"WARNING: {prompt}", force=True)

    def exception(self, prompt: str, exception: BaseException | None = None):
        exc = exception or sys.exc_info()[1]
        if exc is None:
            return

        self._write(f"{prompt} - {exc}", force=True, wrap=False)
        self.interactions.extend(
            traceback.format_exception(type(exc), exc, exc.__traceback__))

    def fail(self, prompt: str):
        self._write(f"ERROR: {prompt}", force=True)
        super().fail(prompt)

    @staticmethod
    def _progress_lines(bar: machinery.interface.ProgressBar[str]):
        suffixes = {"progress": "", "done": " - DONE", "error": " - ERROR"}
        return "\n".join(
            f"{caption}: {'?' if value is None else value} pages{suffixes[status]}"
            for caption, value, status in bar.iter_entities())

    def start_progress_bar(self, *entities_prompt: str):
        progress_bar = super().start_progress_bar(*entities_prompt)
        if self.redraw:
            self._write(self._progress_lines(progress_bar), log=False, wrap=False)
        return progress_bar

    def update_progress_bar(self) -> None:
        super().update_progress_bar()
        if not self.redraw:
            return

        bar = t.cast("machinery.interface.ProgressBar[str]", self.progress_bar)
        self._write(f"\033[{bar.length}F{self._progress_lines(bar)}", log=False, wrap=False)

    def end_progress_bar(self) -> None:
        if self.progress_bar is None:
            return

        # The final state is printed once, and logged, either way.
        if self.redraw:
            self._write(f"\033[{self.progress_bar.length + 1}F", log=False, wrap=False)
        self._write(self._progress_lines(self.progress_bar), wrap=False)
        super().end_progress_bar()
