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
from urllib.parse import urlsplit

from ..machinery import CensusError, Interface, Lexicon, task
from ..machinery.census import DEFAULT_POLICY
from .. import CensusContext as Context


def default_label(seed_url: str):
    """
    Host of the seed, or the name of the seed directory for file URLs.
    """

    parts = urlsplit(seed_url)
    if parts.scheme.lower() == "file":
        path = Path(parts.path)
        return (path.parent if path.suffix else path).name or "site"

    return (parts.hostname or "site").lower()


def _check_out(interface: Interface, out: str):
    if out == "-":
        return

    path = Path(out)
    if path.is_file():
        interface.fail(f"--out {out} can not refer to a file.")

    try:
        path.mkdir(parents=True, exist_ok=True)
        (path / ".write-test").open("w").close()
        (path / ".write-test").unlink()
    except OSError:
        interface.fail(f"--out {out} is not writable.")


def _check_labels(interface: Interface, context: Context):
    if context.labels and len(context.labels) != len(context.targets):
        interface.fail(
            f"Got {len(context.labels)} labels for {len(context.targets)} targets, "
            "--label should be given for each target or for none.")

    if any(not label.strip() for label in context.labels):
        interface.fail("Labels can not be empty.")


@task("Checking properties...")
def check_properties(context: Context, interface: Interface):
    if not context.targets:
        interface.fail(f"The {context.command} needs at least one target.")

    _check_labels(interface, context)

    if context.command == "scan":
        context.crawl_configs = []
        for i, target in enumerate(context.targets):
            if urlsplit(target).scheme.lower() == "file" and context.offline_root is None:
                interface.fail(f"{target}: file URLs need --offline-root.")

            try:
                config = context.crawl_config(target)
            except ValueError as e:
                interface.fail(f"{target}: {e}")

            label = context.labels[i] if context.labels else default_label(target)
            context.crawl_configs.append((label, config))

        labels = [label for label, _ in context.crawl_configs]
        if duplicates := sorted({l for l in labels if labels.count(l) > 1}):
            interface.fail(f"Several sites are labeled {', '.join(duplicates)}, use --label to tell them apart.")

        if context.offline_root is not None and not context.offline_root.is_dir():
            interface.fail(f"--offline-root {context.offline_root} is not a directory.")

    else:
        for target in context.targets:
            if not Path(target).is_file():
                interface.fail(f"Report file {target} does not exist.")

    _check_out(interface, context.out)
    return True


@task("Loading lexicon...", kind="scan", requires="check_properties")
def load_lexicon(context: Context, interface: Interface):
    if context.lexicon is None:
        context.lexicon_terms = Lexicon()
        interface.info("No lexicon given, keywords are not counted.", verbose=True)
        return True

    try:
        context.lexicon_terms = Lexicon.load(context.lexicon)
    except CensusError as e:
        interface.fail(str(e))

    interface.info(f"Loaded {len(context.lexicon_terms.entries)} lexicon terms.", verbose=True)
    return True


def _split_list(value: str | None):
    if value is None:
        return None
    return [e for e in value.split(",") if e.strip()]


@task("Initializing extension policy...", kind="scan", requires="check_properties")
def init_policy(context: Context, interface: Interface):
    try:
        context.policy = DEFAULT_POLICY.with_overrides(
            count_activex=context.count_activex,
            image_exts=_split_list(context.ext_image),
            audio_exts=_split_list(context.ext_audio),
            video_exts=_split_list(context.ext_video),
            active_exts=_split_list(context.ext_active),
            downloadable_exts=_split_list(context.ext_downloadable),
        )
    except CensusError as e:
        interface.fail(str(e))

    return True
