import os

import hypothesis
import numpy as np
import pytest

from mhiforge import netpbm

hypothesis.settings.register_profile("ci", max_examples=100, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "ci"))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_video(rng, n, h, w, color=False):
    shape = (n, h, w, 3) if color else (n, h, w)
    return rng.integers(0, 256, size=shape, dtype=np.uint8)


def write_frames(directory, video, prefix="f"):
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for t, frame in enumerate(video, start=1):
        p = directory / f"{prefix}{t:03d}.{'pgm' if frame.ndim == 2 else 'ppm'}"
        netpbm.write(p, frame)
        paths.append(p)
    return paths


_acceptance = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        item = report.nodeid.split("::")[-1]
        _acceptance[item] = (report.outcome, getattr(report, "acceptance_title", item))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    doc = (item.function.__doc__ or "").strip().splitlines()
    rep.acceptance_title = doc[0] if doc else item.name


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, (outcome, title) in _acceptance.items():
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{verdict}  {title}")
