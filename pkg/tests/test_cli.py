from __future__ import annotations

import json
import os
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import pytest

from conftest import GOLDEN, SITES, SRC

SVG = "{http://www.w3.org/2000/svg}"
ALL_FORMATS = ["--format", "json", "--format", "csv", "--format", "svg", "--format", "ascii"]


def run_cli(*args: str | Path) -> subprocess.CompletedProcess[str]:
    env = dict(os.environ)
    env["PYTHONPATH"] = os.pathsep.join(filter(None, [str(SRC), env.get("PYTHONPATH")]))

    return subprocess.run(
        [sys.executable, "-m", "site_census", *map(str, args)],
        capture_output=True,
        text=True,
        env=env,
        check=False,
    )


def scan(out: Path, *args: str | Path):
    return run_cli(
        "scan", *args, "--out", out, "--delay-ms", "0", "--offline-root", SITES)


def read_outputs(out: Path) -> dict[str, bytes]:
    return {p.name: p.read_bytes() for p in sorted(out.iterdir())}


def test_help():
    result = run_cli("--help")
    assert result.returncode == 0
    assert "scan" in result.stdout

    result = run_cli("scan", "--help")
    assert result.returncode == 0
    assert "--max-pages" in result.stdout


def test_scan_two_sites(tmp_path):
    out = tmp_path / "out"
    result = scan(out, "http://t.edu/", "file:///u-course/index.html", *ALL_FORMATS)

    assert result.returncode == 0, result.stderr
    assert sorted(p.name for p in out.iterdir()) == [
        "scan.csv", "scan.svg", "scan.txt", "t.edu.json", "u-course.json"]

    t_edu = json.loads((out / "t.edu.json").read_text(encoding="utf-8"))
    (site,) = t_edu["sites"]
    assert site["label"] == "t.edu"
    assert site["pages_visited"] == 3
    assert site["pages_failed"] == 0
    assert site["scorm"]["looks_scorm"]

    u_course = json.loads((out / "u-course.json").read_text(encoding="utf-8"))
    assert u_course["sites"][0]["census"]["outbound_link_count"] == 1

    text = (out / "scan.txt").read_text(encoding="utf-8")
    assert "  t.edu" in text
    assert "  u-course" in text


def test_scan_is_reproducible(tmp_path):
    args = ("http://t.edu/", "file:///u-course/index.html", *ALL_FORMATS)

    first = scan(tmp_path / "first", *args)
    second = scan(tmp_path / "second", "--parallelism", "4", *args)

    assert first.returncode == second.returncode == 0
    assert read_outputs(tmp_path / "first") == read_outputs(tmp_path / "second")


def test_scan_ignoring_robots(tmp_path):
    result = scan(tmp_path, "http://t.edu/", "--no-robots", "--format", "json")

    assert result.returncode == 0, result.stderr
    report = json.loads((tmp_path / "t.edu.json").read_text(encoding="utf-8"))
    assert report["sites"][0]["pages_visited"] == 4


def test_scan_partial(tmp_path):
    result = scan(tmp_path, "http://s.edu/", "--format", "json")

    assert result.returncode == 2
    assert "WARNING" in result.stderr

    (site,) = json.loads((tmp_path / "s.edu.json").read_text(encoding="utf-8"))["sites"]
    assert site["pages_visited"] == 9
    assert site["pages_failed"] == 1
    assert site["census"]["image_count"] == 9


def test_scan_per_page(tmp_path):
    result = scan(tmp_path, "http://s.edu/", "--format", "json", "--per-page", "--label", "course")

    assert result.returncode == 2
    lines = (tmp_path / "course.pages.csv").read_text(encoding="utf-8").splitlines()

    assert lines[0].startswith("url,word_count,image_count,")
    assert len(lines) == 10
    assert lines[1].startswith("http://s.edu/,")


def test_scan_max_pages(tmp_path):
    result = scan(tmp_path, "http://s.edu/", "--format", "json", "--max-pages", "3")

    assert result.returncode == 0, result.stderr
    (site,) = json.loads((tmp_path / "s.edu.json").read_text(encoding="utf-8"))["sites"]
    assert site["pages_visited"] == 3


def test_scan_bad_scheme(tmp_path):
    out = tmp_path / "out"
    result = scan(out, "ftp://s.edu/")

    assert result.returncode == 1
    assert "ftp://s.edu/" in result.stderr
    assert not out.exists()


def test_scan_unreachable_seed(tmp_path):
    result = scan(tmp_path, "http://nowhere.edu/", "--format", "json")

    assert result.returncode == 1
    assert "nowhere.edu" in result.stderr
    assert not (tmp_path / "nowhere.edu.json").exists()


def test_scan_label_count_mismatch(tmp_path):
    result = scan(tmp_path, "http://s.edu/", "http://t.edu/", "--label", "one")
    assert result.returncode == 1
    assert "labels" in result.stderr


def test_compare_golden(tmp_path):
    result = run_cli(
        "compare", GOLDEN / "alpha.json", GOLDEN / "beta.json",
        "--out", tmp_path, "--format", "ascii", "--format", "svg")

    assert result.returncode == 0, result.stderr
    assert sorted(p.name for p in tmp_path.iterdir()) == ["comparison.svg", "comparison.txt"]
    for name in ("comparison.svg", "comparison.txt"):
        assert (tmp_path / name).read_text(encoding="utf-8") == (GOLDEN / name).read_text(encoding="utf-8")


def test_compare_to_stdout():
    result = run_cli(
        "compare", GOLDEN / "alpha.json", GOLDEN / "beta.json", "--out", "-", "--format", "ascii")

    assert result.returncode == 0, result.stderr
    assert result.stdout == (GOLDEN / "comparison.txt").read_text(encoding="utf-8")


def test_compare_json_merges_reports(tmp_path):
    result = run_cli(
        "compare", GOLDEN / "alpha.json", GOLDEN / "beta.json", "--out", tmp_path, "--format", "json")

    assert result.returncode == 0, result.stderr
    data = json.loads((tmp_path / "comparison.json").read_text(encoding="utf-8"))
    assert data["generated_for"] == ["alpha", "beta"]


def test_compare_relabels(tmp_path):
    result = run_cli(
        "compare", GOLDEN / "alpha.json", GOLDEN / "alpha.json",
        "--label", "before", "--label", "after", "--out", tmp_path, "--format", "json")

    assert result.returncode == 0, result.stderr
    data = json.loads((tmp_path / "comparison.json").read_text(encoding="utf-8"))
    assert data["generated_for"] == ["before", "after"]


def test_compare_duplicate_labels(tmp_path):
    result = run_cli("compare", GOLDEN / "alpha.json", GOLDEN / "alpha.json", "--out", tmp_path)
    assert result.returncode == 1
    assert "alpha" in result.stderr


def test_compare_without_reports():
    result = run_cli("compare")
    assert result.returncode == 1


@pytest.mark.parametrize("content", ["not json", '{"tool_version": "0.1.0", "sites": []}'])
def test_compare_bad_report(tmp_path, content):
    bad = tmp_path / "broken.json"
    bad.write_text(content, encoding="utf-8")

    result = run_cli("compare", GOLDEN / "alpha.json", bad, "--out", tmp_path / "out")

    assert result.returncode == 1
    assert "broken.json" in result.stderr


def test_compare_missing_report(tmp_path):
    result = run_cli("compare", tmp_path / "absent.json", "--out", tmp_path)
    assert result.returncode == 1
    assert "absent.json" in result.stderr


def test_render(tmp_path):
    result = run_cli("render", GOLDEN / "alpha.json", "--out", tmp_path, "--format", "ascii")

    assert result.returncode == 0, result.stderr
    text = (tmp_path / "alpha.txt").read_text(encoding="utf-8")
    assert text.startswith("Element shares, percent")
    assert "  alpha |##########" in text


def test_render_json_only(tmp_path):
    result = run_cli("render", GOLDEN / "alpha.json", "--out", tmp_path, "--format", "json")

    assert result.returncode == 0
    assert "nothing to render" in result.stderr
    assert not list(tmp_path.iterdir())


def test_scan_then_compare(tmp_path):
    sites = tmp_path / "sites"
    assert scan(sites, "http://t.edu/", "file:///u-course/index.html", "--format", "json").returncode == 0

    charts = []
    for name in ("first", "second"):
        result = run_cli(
            "compare", sites / "t.edu.json", sites / "u-course.json",
            "--out", tmp_path / name, "--format", "svg", "--format", "ascii")
        assert result.returncode == 0, result.stderr
        charts.append(read_outputs(tmp_path / name))

    assert charts[0] == charts[1]
    root = ET.fromstring(charts[0]["comparison.svg"])
    assert [t.text for t in root.iter(f"{SVG}text")][-2:] == ["t.edu", "u-course"]
