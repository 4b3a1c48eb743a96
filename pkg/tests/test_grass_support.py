import logging
import sys
import types

import pytest

from google_matrix.errors import ConvergenceError, InputFormatError
from google_matrix.grass_support import (
    LIBRARY_LOGGER,
    GrassMessageHandler,
    fail,
    keep_output_dir,
    prepare_output_dir,
    route_library_messages,
)


@pytest.fixture
def fake_grass(monkeypatch):
    """Stand-in for grass.script recording every message call."""
    calls = []
    script = types.ModuleType("grass.script")
    for name in ("error", "warning", "verbose", "debug", "message"):
        setattr(script, name, lambda text, _name=name: calls.append((_name, text)))
    package = types.ModuleType("grass")
    package.script = script
    monkeypatch.setitem(sys.modules, "grass", package)
    monkeypatch.setitem(sys.modules, "grass.script", script)
    return calls


@pytest.fixture
def library_logger():
    logger = logging.getLogger(LIBRARY_LOGGER)
    state = (list(logger.handlers), logger.level, logger.propagate)
    yield logger
    logger.handlers[:] = state[0]
    logger.setLevel(state[1])
    logger.propagate = state[2]


def test_records_are_routed_by_level(fake_grass, library_logger):
    route_library_messages()
    child = logging.getLogger(f"{LIBRARY_LOGGER}.google")
    child.debug("iteration 3")
    child.info("converged")
    child.warning("stopped early")
    child.error("broken")
    assert fake_grass == [
        ("debug", "iteration 3"),
        ("verbose", "converged"),
        ("warning", "stopped early"),
        ("error", "broken"),
    ]


def test_routing_is_installed_once(fake_grass, library_logger):
    route_library_messages()
    route_library_messages()
    handlers = [
        handler
        for handler in library_logger.handlers
        if isinstance(handler, GrassMessageHandler)
    ]
    assert len(handlers) == 1
    assert not library_logger.propagate


def test_level_filters_debug_messages(fake_grass, library_logger):
    route_library_messages(level=logging.INFO)
    logging.getLogger(f"{LIBRARY_LOGGER}.reduced").debug("hidden")
    assert fake_grass == []


@pytest.mark.parametrize(
    ("err", "code"),
    [
        (InputFormatError("bad line", "edges.tsv", 7), 2),
        (ConvergenceError("no convergence"), 4),
        (RuntimeError("unexpected"), 1),
    ],
)
def test_fail_exits_with_error_code(fake_grass, err, code):
    with pytest.raises(SystemExit) as excinfo:
        fail(err)
    assert excinfo.value.code == code
    assert fake_grass == [("error", str(err))]


def test_new_output_dir_is_removed_unless_kept(tmp_path):
    rm_dirs = []
    output = str(tmp_path / "run")
    prepare_output_dir(output, rm_dirs)
    assert rm_dirs == [output]
    keep_output_dir(output, rm_dirs)
    assert rm_dirs == []


def test_existing_output_dir_is_never_registered(tmp_path):
    rm_dirs = []
    prepare_output_dir(str(tmp_path), rm_dirs)
    assert rm_dirs == []
