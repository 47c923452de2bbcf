import os
import tempfile

import pytest

from qtree import TreeKind, build_tree


ALL_KINDS = list(TreeKind)


@pytest.fixture(params=ALL_KINDS, ids=lambda k: k.value)
def kind(request):
    """Fixture that runs a test once per tree kind."""
    return request.param


@pytest.fixture
def small_trees():
    """Fixture that provides one small tree of every kind."""
    return {k: build_tree(k, 3) for k in ALL_KINDS}


@pytest.fixture
def tmp_output():
    """Fixture that provides a writable temporary file path."""
    with tempfile.NamedTemporaryFile(suffix=".csv", delete=False) as tmp:
        path = tmp.name

    yield path

    if os.path.exists(path):
        os.unlink(path)


@pytest.fixture
def config_file():
    """Fixture that writes a config file from a dict and cleans it up afterwards."""
    paths = []

    def _write(values, extra_lines=()):
        with tempfile.NamedTemporaryFile("w", suffix=".cfg", delete=False) as tmp:
            for line in extra_lines:
                tmp.write(line + "\n")
            for key, value in values.items():
                tmp.write(f"{key} = {value}\n")
            paths.append(tmp.name)
            return tmp.name

    yield _write

    for path in paths:
        if os.path.exists(path):
            os.unlink(path)
