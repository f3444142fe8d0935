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

from ..machinery import Interface, TaskResult, task
from ..machinery.crawler import SeedUnreachableError, iter_crawl
from ..machinery.report import ComparisonReport, export_json, export_pages_csv
from .. import CensusContext as Context


@task("Crawling sites...", kind="scan", requires="load_lexicon init_policy")
def crawl_sites(context: Context, interface: Interface):
    context.sites = []
    context.unusable_seeds = []

    # Sites are crawled one after another, pages of a site in parallel.
    for label, config in context.crawl_configs:
        interface.info(f"Crawling {config.seed_url} as {label}...", verbose=True)

        try:
            ((_, site),) = interface.execute_in_thread_pool(
                iter_crawl, [label], [(config, context.lexicon_terms, context.policy)])
        except SeedUnreachableError as e:
            interface.exception(f"Site {label} can not be censused", e)
            context.unusable_seeds.append(config.seed_url)
            continue

        context.sites.append((label, site))
        interface.info(
            f"{label}: {site.pages_visited} pages censused, {site.pages_failed} failed, "
            f"{site.links_skipped} links skipped, {site.robots_disallowed} disallowed by robots.txt, "
            f"{site.non_html} not HTML.")

    return True


@task("Writing site reports...", kind="scan", requires="compare_sites")
def write_site_reports(context: Context, interface: Interface):
    if not context.sites:
        return TaskResult.SKIPPED

    for entry in context.comparison.entries:
        path = context.write_artifact(
            context.artifact_name(entry.label, "json"), export_json(ComparisonReport((entry,))))
        if path is not None:
            interface.info(f"Wrote {path.as_posix()}.", verbose=True)

        if context.per_page:
            path = context.write_artifact(
                context.artifact_name(f"{entry.label}.pages", "csv"), export_pages_csv(entry.site))
            if path is not None:
                interface.info(f"Wrote {path.as_posix()}.", verbose=True)

    return True


@task("Checking crawl outcome...", kind="scan", requires="write_site_reports write_outputs")
def report_crawl_outcome(context: Context, interface: Interface):
    if context.unusable_seeds:
        for seed in context.unusable_seeds:
            interface.warning(f"{seed} could not be censused.")
        return TaskResult.FAILURE

    failed = sum(site.pages_failed for _, site in context.sites)
    if failed:
        interface.warning(f"{failed} pages could not be fetched.")
        return TaskResult.PARTIAL

    return True
