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

import os
import sys
import time
import enum
import types

from pathlib import Path
from typing import Any, Callable, Final, Generic, Iterator, Literal, NoReturn, TypeVar, Union

from .interface import Interface
from .types import CommandKind, KNOWN_COMMANDS

DEBUG: Final[bool] = bool(int(os.getenv("SITE_CENSUS_DEBUG", "0")))


class TaskResult(enum.IntEnum):
    KEYBOARD_INTERRUPT = -3
    FAILURE_EXIT = -2
    EXCEPTION = -1
    FAILURE = 0
    SUCCESS = 1
    SKIPPED = 2

    # The task did its job, but some of the input could not be processed.
    PARTIAL = 3

    def __bool__(self):
        return self._value_ > 0


# Exit codes of the whole run.
EXIT_SUCCESS: Final = 0
EXIT_FAILURE: Final = 1
EXIT_PARTIAL: Final = 2
EXIT_INTERRUPTED: Final = 130


class Context:
    """
    Namespace created once per run with the fields every command has.
    """

    # Log file path, devnull if not given.
    log_file: Path

    command: CommandKind

    # Directory the artifacts are written to, or "-" for stdout.
    out: str = "."

    silent: bool = False
    verbose: bool = False

    def __init__(self, log_file: str | Path | None = None, **kwargs: Any):
        self.log_file = Path(log_file if log_file is not None else os.devnull)
        self.__dict__.update(kwargs)

    @property
    def to_stdout(self):
        return self.out == "-"

    def output_path(self, name: str):
        rv = Path(self.out, name)
        rv.parent.mkdir(parents=True, exist_ok=True)
        return rv

    def write_artifact(self, name: str, data: str) -> Path | None:
        """
        Writes `data` as the artifact `name` into the output directory,
        or to stdout when the output is "-". Returns the written path.
        """

        if self.to_stdout:
            sys.stdout.write(data)
            sys.stdout.flush()
            return None

        path = self.output_path(name)
        with path.open("w", encoding="utf-8", newline="") as f:
            f.write(data)
        return path


TaskFunction = Callable[..., Union[TaskResult, bool, NoReturn]]


class Task:
    """
    A step of a command: a (Context, Interface) function with the
    commands it runs for and the tasks it has to run after.
    """

    def __init__(
        self,
        description: str,
        function: TaskFunction,
        kind: frozenset[CommandKind],
        requires: tuple[str, ...] = (),
    ) -> None:
        self.name = function.__name__
        self.description = description
        self.function = function
        self.kind = kind
        self.requires = requires

    def __repr__(self):
        return f"<Task: {self.name}>"

    def _call(self, context: Context, interface: Interface) -> TaskResult:
        try:
            result = self.function(context, interface)
        except Exception:
            interface.end_progress_bar()
            interface.exception(f"Exception in {self}")
            return TaskResult.EXCEPTION
        except SystemExit:
            # Raised by Interface.fail.
            return TaskResult.FAILURE_EXIT
        except KeyboardInterrupt:
            interface.end_progress_bar()
            return TaskResult.KEYBOARD_INTERRUPT

        if isinstance(result, TaskResult):
            return result
        return TaskResult.SUCCESS if result else TaskResult.FAILURE

    def run(self, context: Context, interface: Interface) -> TaskResult:
        if context.command not in self.kind:
            return TaskResult.SKIPPED

        start = time.perf_counter_ns()
        interface.info(self.description, verbose=True)

        result = self._call(context, interface)

        if DEBUG:
            elapsed = (time.perf_counter_ns() - start) / 1_000_000_000
            interface.system_info(f"DEBUG: {self!r} has ended with {result.name}, took {elapsed:.3f}s.")

        return result


_ContextT_co = TypeVar("_ContextT_co", bound=Context, covariant=True)


class Runner(Generic[_ContextT_co]):
    """
    Runs the registered tasks of the context's command in registration
    order, each one after the tasks it requires.
    """

    def __init__(self, context: _ContextT_co, interface: Interface):
        self._context = context
        self._interface = interface

        self._tasks: dict[str, Task] = {}

    def register_task(self, name: str, task: Task):
        if name in self._tasks:
            raise ValueError(f"{name!r} already registered as a task.")

        self._tasks[name] = task

    def register_tasks_from(self, module: types.ModuleType):
        for name, value in vars(module).items():
            if isinstance(value, Task):
                self.register_task(name, value)

    def _ordered(self) -> Iterator[Task]:
        placed: dict[str, Task] = {}
        visiting: list[str] = []

        def place(name: str):
            if name in placed:
                return
            if name in visiting:
                loop = " -> ".join(visiting[visiting.index(name):] + [name])
                raise ValueError(f"Tasks require each other in a loop: {loop}.")

            visiting.append(name)
            for required in self._tasks[name].requires:
                if required not in self._tasks:
                    raise ValueError(f"Task {name!r} requires unknown task {required!r}.")
                place(required)
            visiting.pop()

            placed[name] = self._tasks[name]

        for name in self._tasks:
            place(name)

        if DEBUG:
            self._interface.system_info(f"DEBUG: Tasks: {', '.join(placed)}")

        return iter(placed.values())

    @staticmethod
    def _exit_code(result: TaskResult) -> int | None:
        """
        Exit code a task result ends the run with, None to go on.
        """

        if result == TaskResult.KEYBOARD_INTERRUPT:
            return EXIT_INTERRUPTED
        if not result:
            return EXIT_FAILURE
        return None

    def run(self) -> int:
        start = time.perf_counter_ns()

        self._context.log_file.parent.mkdir(parents=True, exist_ok=True)

        partial = False
        code: int | None = None
        with self._context.log_file.open("w", encoding="utf-8") as log_f:
            for task in self._ordered():
                result = task.run(self._context, self._interface)
                self._interface.log(log_f)

                partial = partial or result == TaskResult.PARTIAL
                code = self._exit_code(result)
                if code is not None:
                    break

            if code is None:
                code = EXIT_PARTIAL if partial else EXIT_SUCCESS

            elapsed = (time.perf_counter_ns() - start) / 1_000_000_000
            command = self._context.command
            if code == EXIT_SUCCESS:
                self._interface.info(f"The {command} has ended successfully, took {elapsed:.3f}s.")
            elif code == EXIT_PARTIAL:
                self._interface.warning(f"The {command} has ended, but some pages failed, took {elapsed:.3f}s.")
            else:
                self._interface.info(f"The {command} has ended with failure, took {elapsed:.3f}s.")
            self._interface.log(log_f)

        return code


def create_task(
    description: str,
    function: TaskFunction, /, *,
    kind: Literal["all"] | str = "all",
    requires: str | None = None,
) -> Task:
    """
    Creates a Task from a task function.

    `kind`
        "all" (default) to run the task for every command, otherwise a
        space-separated list of the commands it runs for.

    `requires`
        Space-separated names of the tasks to run before this one. A
        required task skipped for the command still orders the two.
    """

    if kind == "all":
        commands = frozenset(KNOWN_COMMANDS)
    else:
        names = kind.split()
        if unknown := sorted(set(names) - KNOWN_COMMANDS):
            raise ValueError(f"Unknown command(s) {', '.join(map(repr, unknown))} in task {function.__name__!r}.")
        commands = frozenset(names)  # type: ignore[arg-type]

    return Task(description, function, commands, tuple((requires or "").split()))


def task(
    description: str, /, *,
    kind: Literal["all"] | str = "all",
    requires: str | None = None,
) -> Callable[[TaskFunction], Task]:
    """
    Decorator form of `create_task`.
    """

    def deco(function: TaskFunction):
        return create_task(description, function, kind=kind, requires=requires)
    return deco
