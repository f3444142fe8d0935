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

# Export typing helpers.
from .types import *

# Export submodules.
from . import (
    model as model,
    interface as interface,
    markup_partition as markup_partition,
    census as census,
    urls as urls,
    fetchers as fetchers,
    crawler as crawler,
    report as report,
)

# Export abstract types to extend by third party.
from .interface import Interface as Interface
from .fetchers import Fetcher as Fetcher

# Export value types.
from .census import (
    ElementCensus as ElementCensus,
    ExtensionPolicy as ExtensionPolicy,
    Lexicon as Lexicon,
    ScormFindings as ScormFindings,
)
from .crawler import (
    CrawlConfig as CrawlConfig,
    PageSource as PageSource,
    SiteCensus as SiteCensus,
)
from .report import (
    CategoryShares as CategoryShares,
    ComparisonReport as ComparisonReport,
)

# Export functions to register and init fetch backends.
from .fetchers import (
    init_fetcher as init_fetcher,
    register_fetcher_type as register_fetcher_type,
)

# Export all the needed stuff from model.
from .model import (
    TaskResult as TaskResult,
    Context as Context,
    Runner as Runner,
    task as task,
    create_task as create_task,
)

# Register base backends.
register_fetcher_type("http", fetchers.HTTPFetcher)
register_fetcher_type("file", fetchers.FileFetcher)
