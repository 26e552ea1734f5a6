import os
import sys

from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "suite",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def pytest_runtest_logreport(report):
    """Surface one PASS/FAIL line per acceptance criterion on the terminal."""
    if report.when != "call":
        return
    for name, value in report.user_properties:
        if name == "acceptance":
            print(f"\n{value}", file=sys.stderr, flush=True)
