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

import sys
import pathlib
import argparse

from site_census import machinery, CensusContext, CLIInterface


class ArgumentParser(argparse.ArgumentParser):
    """
    Usage errors exit with 1 like every other bad input.
    """

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(machinery.model.EXIT_FAILURE, f"{self.prog}: error: {message}\n")


parser = ArgumentParser(
    "python -m site_census",
    description="Census of multimedia elements of e-learning sites.",
    epilog="Use COMMAND -h to get help for needed command.",
    formatter_class=argparse.ArgumentDefaultsHelpFormatter)

parser.add_argument(
    "--log-file", type=pathlib.Path,
    help="The name of the log file to write progress to. "
    "If omitted, only prints to the console.")
parser.add_argument(
    "--silent", action="store_true",
    help="Prints only error, warning or success messages to the console"
    " (but the log output remains unchanged).")
parser.add_argument(
    "--verbose", action="store_true",
    help="Prints a more verbose output in the console and log.")

# Options shared by all commands.
_output_parser = ArgumentParser(add_help=False)
_output_parser.add_argument(
    "--out", default=".",
    help="Directory the artifacts are written to, or - for the standard output.")
_output_parser.add_argument(
    "--format", action="append", choices=machinery.KNOWN_FORMATS,
    help="Artifact format, may be repeated. Default: json and svg.")
_output_parser.add_argument(
    "--label", action="append",
    help="Site label, may be repeated to pair with each target. "
    "Default: the host of the seed, or the label stored in the report.")

_subparsers = parser.add_subparsers(
    required=True, dest="command", metavar="COMMAND", title="subcommands")


# Scan parser.
scan_parser = _subparsers.add_parser(
    "scan", parents=[_output_parser], help="Crawl sites and census their elements.",
    formatter_class=argparse.ArgumentDefaultsHelpFormatter)
scan_parser.add_argument("targets", nargs="+", metavar="URL", help="Seed page of a site.")
scan_parser.add_argument(
    "--max-pages", type=int, default=200,
    help="Maximal number of pages censused per site.")
scan_parser.add_argument(
    "--max-depth", type=int, default=10,
    help="Maximal number of links followed from the seed.")
scan_parser.add_argument(
    "--delay-ms", type=int, default=500,
    help="Minimal delay between requests to the same host.")
scan_parser.add_argument(
    "--timeout-ms", type=int, default=10000,
    help="Timeout of a single request.")
scan_parser.add_argument(
    "--parallelism", type=int, default=1,
    help="Number of pages fetched at once.")
scan_parser.add_argument(
    "--user-agent", default=machinery.CrawlConfig.user_agent,
    help="User agent sent with requests and matched against robots.txt.")
scan_parser.add_argument(
    "--subdomains-inbound", action="store_true", dest="treat_subdomains_inbound",
    help="Counts links to subdomains of the seed host as inbound.")
scan_parser.add_argument(
    "--no-robots", action="store_false", dest="respect_robots",
    help="Does not consult robots.txt.")
scan_parser.add_argument(
    "--lexicon", type=pathlib.Path,
    help="File of domain terms of up to three words, one per line. "
    "If omitted, keywords are not counted.")
for _category in ("image", "audio", "video", "active", "downloadable"):
    scan_parser.add_argument(
        f"--ext-{_category}", metavar="LIST",
        help=f"Comma-separated {_category} extensions replacing the default ones.")
del _category
scan_parser.add_argument(
    "--count-activex", action="store_true",
    help="Counts <object classid=...> elements as active content.")
scan_parser.add_argument(
    "--offline-root", type=pathlib.Path,
    help="Reads the pages from this directory instead of the network: "
    "http://host/path maps to OFFLINE_ROOT/host/path.")
scan_parser.add_argument(
    "--per-page", action="store_true",
    help="Also writes a table of the counters of every page.")


# Compare parser.
compare_parser = _subparsers.add_parser(
    "compare", parents=[_output_parser], help="Combine scan reports into a comparison.",
    formatter_class=argparse.ArgumentDefaultsHelpFormatter)
compare_parser.add_argument("targets", nargs="+", metavar="REPORT", type=str, help="JSON scan report.")


# Render parser.
render_parser = _subparsers.add_parser(
    "render", parents=[_output_parser], help="Render every report on its own.",
    formatter_class=argparse.ArgumentDefaultsHelpFormatter)
render_parser.add_argument("targets", nargs="+", metavar="REPORT", type=str, help="JSON report.")


if __name__ == "__main__":
    from .tasks import system, scan, report

    args = parser.parse_args()
    context = CensusContext(**args.__dict__)
    interface = CLIInterface(context.verbose, context.silent)
    runner = machinery.Runner(context, interface)

    runner.register_tasks_from(system)
    runner.register_tasks_from(scan)
    runner.register_tasks_from(report)

    sys.exit(runner.run())
