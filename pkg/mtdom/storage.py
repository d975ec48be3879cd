"""File I/O for problem files, reports and DOT diagrams."""

import json
from importlib import resources
from pathlib import Path
from typing import Union

from pydantic import ValidationError

from .exceptions import ProblemFileError
from .models import ProblemFile, Report

PathLike = Union[str, Path]

EXAMPLE_NAME = "algorithm_comparison.json"


def _describe(error: ValidationError) -> str:
    messages = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"])
        message = item["msg"].removeprefix("Value error, ")
        messages.append(f"{location}: {message}" if location else message)
    return "; ".join(messages)


def parse_problem(text: str, source: str = "<string>") -> ProblemFile:
    """Parse and validate problem JSON; errors name the line or field at fault."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ProblemFileError(f"{source}:{e.lineno}:{e.colno}: invalid JSON: {e.msg}")
    try:
        return ProblemFile.model_validate(data)
    except ValidationError as e:
        raise ProblemFileError(f"{source}: {_describe(e)}")


def load_problem(path: PathLike) -> ProblemFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ProblemFileError(f"cannot read {path}: {e.strerror}")
    return parse_problem(text, str(path))


def dump_problem(problem: ProblemFile) -> str:
    return json.dumps(problem.model_dump(mode="json", exclude_none=True), indent=2) + "\n"


def save_problem(problem: ProblemFile, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_problem(problem))
    return path


def dump_report(report: Report) -> str:
    return json.dumps(report.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"


def write_report(report: Report, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dump_report(report))
    return path


def dot_file_name(delta: float) -> str:
    """hasse_delta_<delta>.dot, with delta at the 12 decimals reports keep."""
    digits = f"{round(float(delta), 12):.12f}".rstrip("0").rstrip(".")
    return f"hasse_delta_{digits}.dot"


def write_dot_files(dots: dict[float, str], directory: PathLike) -> list[Path]:
    """One hasse_delta_<value>.dot file per delta, in delta order."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for delta in sorted(dots):
        path = directory / dot_file_name(delta)
        path.write_text(dots[delta])
        written.append(path)
    return written


def example_text() -> str:
    """The bundled algorithm-comparison problem, as JSON text."""
    return resources.files("mtdom").joinpath("data", EXAMPLE_NAME).read_text()


def load_example() -> ProblemFile:
    return parse_problem(example_text(), EXAMPLE_NAME)
