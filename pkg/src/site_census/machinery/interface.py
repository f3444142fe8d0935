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
import abc
import sys

import concurrent.futures as futures

from typing import Any, Callable, Generator, Generic, Iterable, Literal, NoReturn, TypeVar


_T = TypeVar("_T")

# Generators driven by `Interface.execute_in_thread_pool` yield
# (done, total) pairs and return their result.
PoolGenerator = Generator[tuple[int, int], None, _T]

StatusKind = Literal["progress", "done", "error"]


class ProgressBar(Generic[_T]):
    """
    One line per entity, e.g. a site being crawled, with its latest
    progress value and status.
    """

    def __init__(self, *entities: str) -> None:
        self.entities = entities
        self._values: list[_T | None] = [None] * len(entities)
        self._statuses: list[StatusKind] = ["progress"] * len(entities)

    @property
    def length(self):
        return len(self.entities)

    def update_entity(self, index: int, value: _T):
        if self._statuses[index] == "progress":
            self._values[index] = value

    def done_entity(self, index: int):
        if self._statuses[index] == "progress":
            self._statuses[index] = "done"

    def error_entity(self, index: int):
        self._statuses[index] = "error"

    def iter_entities(self):
        return zip(self.entities, self._values, self._statuses)


class Interface(abc.ABC):
    """
    Reports progress and diagnostics of a run to the user.
    """

    @abc.abstractmethod
    def __init__(self, verbose: bool, silent: bool):
        self.verbose = verbose
        self.silent = silent

        self.progress_bar: ProgressBar[Any] | None = None

        # Messages not yet written to the log file.
        self.interactions: list[str] = []

    def system_info(self, prompt: str):
        sys.__stderr__.write(prompt + "\n")

    def log(self, file: io.TextIOWrapper):
        for line in self.interactions:
            print(line, file=file)
        file.flush()
        self.interactions.clear()

    @abc.abstractmethod
    def info(self, prompt: str, verbose: bool = False) -> None:
        """
        Displays `prompt` as an informational message. Verbose messages
        are shown only with --verbose.
        """

    @abc.abstractmethod
    def warning(self, prompt: str) -> None:
        """
        Displays `prompt` as a warning. Warnings are shown even in silent mode.
        """

    @abc.abstractmethod
    def exception(self, prompt: str, exception: BaseException | None = None) -> None:
        """
        Displays `prompt` with the exception, the last raised one if
        `exception` is None, and logs its traceback.
        """

    @abc.abstractmethod
    def fail(self, prompt: str) -> NoReturn:
        """
        Terminates the current task with `prompt` and a failure exit code.
        """
        raise SystemExit(1)

    def execute_in_thread_pool(
            self, func: Callable[..., PoolGenerator[_T]],
            tasks_prompts: Iterable[str],
            tasks_args: Iterable[Iterable[Any]], *,
            timeout: float = 0.33,
    ) -> tuple[tuple[int, _T], ...]:
        """
        Runs the `func(*args)` generator for every args in `tasks_args`
        in a thread pool, showing the (done, total) pairs they yield
        under the matching prompt. Returns (index, result) pairs in the
        order of `tasks_args`. The first exception of a generator is
        raised once every generator has stopped.
        """

        tasks_prompts = list(tasks_prompts)
        tasks_args = list(tasks_args)
        assert len(tasks_prompts) == len(tasks_args), \
            f"Got {len(tasks_prompts)} prompts for {len(tasks_args)} argument lists."

        progress_bar = self.start_progress_bar(*tasks_prompts)

        def drive(index: int, *args: Any) -> _T:
            generator = func(*args)
            while True:
                try:
                    done, total = next(generator)
                except StopIteration as e:
                    return e.value

                progress_bar.update_entity(index, f"{done}/{total}")

        results: dict[int, _T] = {}
        error: BaseException | None = None

        with futures.ThreadPoolExecutor() as pool:
            pending = {pool.submit(drive, i, *args): i for i, args in enumerate(tasks_args)}

            while pending:
                finished, _ = futures.wait(pending, timeout=timeout, return_when=futures.FIRST_COMPLETED)
                for future in finished:
                    i = pending.pop(future)
                    try:
                        results[i] = future.result()
                    except BaseException as e:
                        progress_bar.error_entity(i)
                        error = error or e
                    else:
                        progress_bar.done_entity(i)

                self.update_progress_bar()

        self.end_progress_bar()
        if error is not None:
            raise error

        return tuple(sorted(results.items()))

    @abc.abstractmethod
    def start_progress_bar(self, *entities_prompt: str) -> ProgressBar[Any]:
        if self.progress_bar is not None:
            raise RuntimeError("Can not start progress bar with another one in progress.")

        self.progress_bar = ProgressBar(*entities_prompt)
        return self.progress_bar

    @abc.abstractmethod
    def update_progress_bar(self) -> None:
        if self.progress_bar is None:
            raise RuntimeError("There is no current progress bar to update.")

    @abc.abstractmethod
    def end_progress_bar(self) -> None:
        self.progress_bar = None
