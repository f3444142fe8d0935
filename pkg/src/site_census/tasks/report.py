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

from pathlib import Path
from typing import Callable

from ..machinery import Interface, FormatKind, TaskResult, task
from ..machinery.report import (
    ComparisonReport, ReportError, build_comparison, export_csv, export_json,
    load_report, render_ascii, render_svg,
)
from .. import CensusContext as Context

RENDERERS: dict[FormatKind, Callable[[ComparisonReport], str]] = {
    "json": export_json,
    "csv": export_csv,
    "svg": render_svg,
    "ascii": render_ascii,
}


def _write(context: Context, interface: Interface, stem: str, format: FormatKind, report: ComparisonReport):
    try:
        data = RENDERERS[format](report)
    except ReportError as e:
        interface.fail(f"Can not render {format}: {e}")

    path = context.write_artifact(context.artifact_name(stem, format), data)
    if path is not None:
        interface.info(f"Wrote {path.as_posix()}.", verbose=True)


@task("Loading reports...", kind="compare render", requires="check_properties")
def load_reports(context: Context, interface: Interface):
    context.reports = []
    for i, target in enumerate(context.targets):
        path = Path(target)
        try:
            sites = load_report(path)
        except ReportError as e:
            interface.fail(str(e))

        if context.labels:
            if len(sites) != 1:
                interface.fail(
                    f"{target} holds {len(sites)} sites, --label can only rename single-site reports.")
            sites = [(context.labels[i], sites[0][1])]

        context.reports.append((path, sites))

    return True


@task("Building comparison...", kind="scan compare", requires="crawl_sites load_reports")
def compare_sites(context: Context, interface: Interface):
    if context.command == "scan":
        sites = context.sites
        if not sites:
            return TaskResult.SKIPPED
    else:
        sites = [site for _, report in context.reports for site in report]

    try:
        context.comparison = build_comparison(sites)
    except ReportError as e:
        interface.fail(str(e))

    return True


@task("Writing outputs...", kind="scan compare", requires="compare_sites")
def write_outputs(context: Context, interface: Interface):
    if context.command == "scan":
        if not context.sites:
            return TaskResult.SKIPPED

        # Per-site json reports are written by write_site_reports.
        stem = "scan"
        formats = [f for f in context.formats if f != "json"]
    else:
        stem = "comparison"
        formats = list(context.formats)

    for format in formats:
        _write(context, interface, stem, format, context.comparison)

    return True


@task("Rendering reports...", kind="render", requires="load_reports")
def render_reports(context: Context, interface: Interface):
    formats = [f for f in context.formats if f != "json"]
    if not formats:
        interface.warning("Reports are already json, nothing to render.")
        return True

    for path, sites in context.reports:
        try:
            report = build_comparison(sites)
        except ReportError as e:
            interface.fail(f"{path}: {e}")

        for format in formats:
            _write(context, interface, path.stem, format, report)

    return True
