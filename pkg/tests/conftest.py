import functools

import pytest

from lapsm.scenarios import PRESETS, preset

PRESET_NAMES = sorted(PRESETS)


@functools.lru_cache(maxsize=None)
def cached_preset(name):
    return preset(name)


@pytest.fixture(params=PRESET_NAMES)
def scenario(request):
    return cached_preset(request.param)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
