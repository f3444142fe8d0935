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

import io
import csv
import json
import dataclasses

from pathlib import Path
from typing import Any, ClassVar, Final, Iterable, Sequence
from xml.sax.saxutils import escape

from .census import ElementCensus, ScormFindings
from .crawler import SiteCensus
from .types import CATEGORIES, COUNTERS, TOOL_VERSION, CategoryName, CensusError

EMPTY_ROW: Final = "(no countable elements)"
BAR_WIDTH: Final = 50

# Tableau 10, first eight colors.
PALETTE: Final = (
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2",
    "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
)


class ReportError(CensusError):
    pass


class ReportFormatError(ReportError):
    """
    A report file which does not follow the report schema.
    """

    def __init__(self, path: Path | str, problem: str):
        super().__init__(f"{path}: {problem}")
        self.path = path


@dataclasses.dataclass(frozen=True)
class CategoryShares:
    """
    Percentages of each chart category in the total element usage.
    All shares are zero and `empty` is set when nothing was counted.
    """

    images: float = 0.0
    audio: float = 0.0
    video: float = 0.0
    active: float = 0.0
    downloadable: float = 0.0
    inbound_links: float = 0.0
    outbound_links: float = 0.0

    denominator: int = 0

    def __post_init__(self):
        if self.denominator < 0:
            raise ValueError("Denominator can not be negative.")

        values = self.values()
        if any(not 0 <= v <= 100 for v in values):
            raise ValueError(f"Shares should lie in [0, 100], got {values}.")
        if self.empty and any(values):
            raise ValueError("Shares of an empty census should all be zero.")

    @property
    def empty(self):
        return self.denominator == 0

    def values(self) -> tuple[float, ...]:
        return tuple(getattr(self, c) for c in CATEGORIES)

    def items(self) -> Iterable[tuple[CategoryName, float]]:
        return ((c, getattr(self, c)) for c in CATEGORIES)


def category_counts(census: ElementCensus) -> dict[CategoryName, int]:
    return {category: getattr(census, field) for category, field in CATEGORIES.items()}


def compute_shares(census: ElementCensus) -> CategoryShares:
    counts = category_counts(census)
    denominator = sum(counts.values())
    if not denominator:
        return CategoryShares()

    return CategoryShares(
        **{category: 100 * count / denominator for category, count in counts.items()},
        denominator=denominator,
    )


@dataclasses.dataclass(frozen=True)
class ReportEntry:
    label: str
    site: SiteCensus
    shares: CategoryShares


@dataclasses.dataclass(frozen=True)
class SideRow:
    """
    Counters which are not chart categories.
    """

    label: str
    word_count: int
    keyword_count: int
    script_functions: int
    form_control_count: int
    scorm: ScormFindings


@dataclasses.dataclass(frozen=True)
class ComparisonReport:
    entries: tuple[ReportEntry, ...]

    def __post_init__(self):
        labels = self.labels
        if not labels:
            raise ReportError("A report needs at least one site.")
        if duplicates := sorted({l for l in labels if labels.count(l) > 1}):
            raise ReportError(f"Duplicate site labels: {', '.join(duplicates)}.")

    @property
    def labels(self) -> list[str]:
        return [e.label for e in self.entries]

    @property
    def side_table(self) -> list[SideRow]:
        return [
            SideRow(
                e.label,
                e.site.census.word_count,
                e.site.census.keyword_count,
                e.site.census.script_functions,
                e.site.census.form_control_count,
                e.site.scorm,
            )
            for e in self.entries
        ]


def build_comparison(sites: Iterable[tuple[str, SiteCensus]]) -> ComparisonReport:
    """
    Builds a report of the sites, keeping their order.
    Raises ReportError for no sites or duplicate labels.
    """

    return ComparisonReport(tuple(
        ReportEntry(label, site, compute_shares(site.census))
        for label, site in sites
    ))


@dataclasses.dataclass(frozen=True)
class ChartSeries:
    label: str
    values: tuple[float, ...]
    empty: bool = False


@dataclasses.dataclass(frozen=True)
class ChartSpec:
    """
    A grouped bar chart: a group per category, a bar per series,
    on a 0-100 percent value axis.
    """

    categories: tuple[CategoryName, ...]
    series: tuple[ChartSeries, ...]

    def __post_init__(self):
        for s in self.series:
            assert len(s.values) == len(self.categories), \
                f"Series {s.label!r} has {len(s.values)} values for {len(self.categories)} categories."


def build_chart_spec(report: ComparisonReport) -> ChartSpec:
    return ChartSpec(
        tuple(CATEGORIES),
        tuple(ChartSeries(e.label, e.shares.values(), e.shares.empty) for e in report.entries),
    )


def _scorm_summary(scorm: ScormFindings):
    rv = "yes" if scorm.looks_scorm else "no"
    if scorm.api_names_found:
        rv += f" ({', '.join(sorted(scorm.api_names_found))})"
    return rv


def render_ascii(report: ComparisonReport) -> str:
    """
    Renders the report as grouped horizontal bars, 50 characters
    being 100 percent, followed by the side table.
    """

    spec = build_chart_spec(report)
    width = max(len(s.label) for s in spec.series)

    lines = [f"Element shares, percent (bar of {BAR_WIDTH} characters = 100%)", ""]

    for index, category in enumerate(spec.categories):
        lines.append(category)
        for s in spec.series:
            if s.empty:
                lines.append(f"  {s.label:<{width}} {EMPTY_ROW}")
                continue

            share = s.values[index]
            # Half-up rounding, round() would round half to even.
            bar = "#" * int(share / 2 + 0.5)
            lines.append(f"  {s.label:<{width}} |{bar:<{BAR_WIDTH}}| {share:5.1f}")
        lines.append("")

    columns = ("elements", "words", "keywords", "functions", "controls")
    lines.append("Side table")
    lines.append(f"  {'site':<{width}}" + "".join(f"  {c:>9}" for c in columns) + "  scorm")
    for entry, row in zip(report.entries, report.side_table):
        values = (
            entry.shares.denominator, row.word_count, row.keyword_count,
            row.script_functions, row.form_control_count,
        )
        lines.append(
            f"  {row.label:<{width}}" + "".join(f"  {v:>9}" for v in values)
            + f"  {_scorm_summary(row.scorm)}")

    return "\n".join(lines) + "\n"


class SVGBuilder:
    """
    Accumulates SVG 1.1 elements. Coordinates are written with two
    decimals, so equal charts give equal bytes.
    """

    def __init__(self, width: int, height: int):
        self.parts = [
            '<?xml version="1.0" encoding="UTF-8"?>\n',
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">\n',
        ]

    def rect(self, x: float, y: float, width: float, height: float, fill: str, extra: str = ""):
        self.parts.append(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{width:.2f}" height="{height:.2f}" fill="{fill}"{extra}/>\n')

    def line(self, x1: float, y1: float, x2: float, y2: float, stroke: str):
        self.parts.append(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" stroke="{stroke}"/>\n')

    def text(self, x: float, y: float, text: str, anchor: str = "start", size: int = 12):
        self.parts.append(
            f'<text x="{x:.2f}" y="{y:.2f}" font-size="{size}" text-anchor="{anchor}">{escape(text)}</text>\n')

    def get_svg(self):
        return "".join(self.parts) + "</svg>\n"


class SVGLayout:
    WIDTH: ClassVar = 900
    HEIGHT: ClassVar = 480

    LEFT: ClassVar = 60
    TOP: ClassVar = 30
    PLOT_WIDTH: ClassVar = 630
    PLOT_HEIGHT: ClassVar = 400

    # Part of a group width taken by bars, the rest pads both sides.
    BAR_FILL: ClassVar = 0.8

    LEGEND_X: ClassVar = 710


def render_svg(report: ComparisonReport) -> str:
    """
    Renders the report as a grouped vertical bar chart.
    Raises ReportError for more series than colors in the palette.
    """

    spec = build_chart_spec(report)
    if len(spec.series) > len(PALETTE):
        raise ReportError(
            f"Can not chart {len(spec.series)} sites, at most {len(PALETTE)} fit. "
            "Split the comparison into several reports.")

    L = SVGLayout
    bottom = L.TOP + L.PLOT_HEIGHT
    svg = SVGBuilder(L.WIDTH, L.HEIGHT)

    svg.rect(0, 0, L.WIDTH, L.HEIGHT, "#ffffff")
    svg.text(L.LEFT, L.TOP - 12, "Element shares, percent", size=14)

    for value in range(0, 101, 10):
        y = bottom - value * L.PLOT_HEIGHT / 100
        svg.line(L.LEFT, y, L.LEFT + L.PLOT_WIDTH, y, "#d0d0d0")
        svg.text(L.LEFT - 6, y + 4, str(value), anchor="end")

    group_width = L.PLOT_WIDTH / len(spec.categories)
    bar_width = group_width * L.BAR_FILL / len(spec.series)
    padding = group_width * (1 - L.BAR_FILL) / 2

    for index, category in enumerate(spec.categories):
        group_x = L.LEFT + index * group_width
        for number, series in enumerate(spec.series):
            height = series.values[index] * L.PLOT_HEIGHT / 100
            svg.rect(
                group_x + padding + number * bar_width, bottom - height,
                bar_width, height, PALETTE[number], ' class="bar"')

        svg.text(group_x + group_width / 2, bottom + 18, category.replace("_", " "), anchor="middle")

    for number, series in enumerate(spec.series):
        y = L.TOP + number * 20
        svg.rect(L.LEGEND_X, y, 12, 12, PALETTE[number])
        svg.text(L.LEGEND_X + 18, y + 11, series.label)

    return svg.get_svg()


def _number(value: float) -> int | float:
    """
    Integral values as ints, others with up to 6 fractional digits.
    """

    if float(value).is_integer():
        return int(value)
    return round(value, 6)


def _site_json(entry: ReportEntry) -> dict[str, Any]:
    site = entry.site
    return {
        "label": entry.label,
        "seed_url": site.seed_url,
        "pages_visited": site.pages_visited,
        "pages_failed": site.pages_failed,
        "census": site.census.counters(),
        "shares": {
            **{category: _number(share) for category, share in entry.shares.items()},
            "denominator": entry.shares.denominator,
        },
        "scorm": {
            "api_names_found": sorted(site.scorm.api_names_found),
            "looks_scorm": site.scorm.looks_scorm,
        },
    }


def export_json(report: ComparisonReport) -> str:
    data = {
        "tool_version": TOOL_VERSION,
        "generated_for": report.labels,
        "sites": [_site_json(e) for e in report.entries],
    }
    return json.dumps(data, indent=2) + "\n"


def _csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def export_csv(report: ComparisonReport) -> str:
    """
    One row per site and category, with the share and the raw count.
    """

    rows = []
    for entry in report.entries:
        counts = category_counts(entry.site.census)
        for category, share in entry.shares.items():
            rows.append((entry.label, category, _number(share), counts[category]))

    return _csv_text(("label", "category", "share", "count"), rows)


def export_pages_csv(site: SiteCensus) -> str:
    """
    One row per censused page with its eleven counters.
    """

    return _csv_text(
        ("url", *COUNTERS),
        ((url, *census.counters().values()) for url, census in site.per_page),
    )


def _require(path: Path | str, data: dict[str, Any], key: str, kind: type | tuple[type, ...]) -> Any:
    if key not in data:
        raise ReportFormatError(path, f"missing {key!r}.")

    value = data[key]
    if not isinstance(value, kind) or (kind is int and isinstance(value, bool)):
        raise ReportFormatError(path, f"{key!r} has a wrong type.")

    return value


def parse_report(text: str, path: Path | str = "<report>") -> list[tuple[str, SiteCensus]]:
    """
    Parses the JSON written by `export_json`. The shares are not read,
    they are recomputed from the census. Sites have no per-page data.
    """

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ReportFormatError(path, f"not JSON ({e}).") from e

    if not isinstance(data, dict):
        raise ReportFormatError(path, "not a report object.")

    _require(path, data, "tool_version", str)
    sites = _require(path, data, "sites", list)
    if not sites:
        raise ReportFormatError(path, "no sites.")

    rv: list[tuple[str, SiteCensus]] = []
    for site in sites:
        if not isinstance(site, dict):
            raise ReportFormatError(path, "a site is not an object.")

        label = _require(path, site, "label", str)
        census = _require(path, site, "census", dict)
        scorm = _require(path, site, "scorm", dict)
        pages_visited = _require(path, site, "pages_visited", int)

        counters = {name: _require(path, census, name, int) for name in COUNTERS}
        names = _require(path, scorm, "api_names_found", list)
        if not all(isinstance(n, str) for n in names):
            raise ReportFormatError(path, "'api_names_found' has a wrong type.")

        try:
            rv.append((label, SiteCensus(
                seed_url=_require(path, site, "seed_url", str),
                census=ElementCensus(**counters, pages_counted=pages_visited),
                scorm=ScormFindings.from_names(names),
                pages_visited=pages_visited,
                pages_failed=_require(path, site, "pages_failed", int),
                detailed=False,
            )))
        except ValueError as e:
            raise ReportFormatError(path, str(e)) from e

    return rv


def load_report(path: Path) -> list[tuple[str, SiteCensus]]:
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ReportFormatError(path, f"can not be read ({e}).") from e

    return parse_report(text, path)
