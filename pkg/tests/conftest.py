import io
import json
from contextlib import redirect_stderr, redirect_stdout
from importlib import resources

import jsonschema
import pytest
from referencing import Registry, Resource

from extremal_risk.cli import main

ACCEPTANCE_LINES: list[str] = []


def _schema_registry():
    files = resources.files("extremal_risk") / "schemas"
    registry = Registry()
    schemas = {}
    for entry in files.iterdir():
        if entry.name.endswith(".json"):
            doc = json.loads(entry.read_text(encoding="utf-8"))
            schemas[entry.name] = doc
            registry = registry.with_resource(doc["$id"], Resource.from_contents(doc))
    return registry, schemas


@pytest.fixture(scope="session")
def validate():
    registry, schemas = _schema_registry()

    def check(payload: dict, name: str) -> None:
        validator = jsonschema.Draft202012Validator(schemas[name], registry=registry)
        validator.validate(payload)

    return check


def run_cli(*argv) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main([str(a) for a in argv])
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def cli():
    return run_cli


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
