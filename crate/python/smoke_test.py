"""Smoke test for the tproj extension module.

Build and install first:  pip install --no-build-isolation ./crates/py
"""

import csv
import io
import random
import tempfile
from pathlib import Path

import tproj

FIXTURES = Path(__file__).resolve().parent.parent / "crates" / "core" / "fixtures"


def fred(hazards="fred.hazards"):
    return tproj.Corpus.from_files(
        [str(FIXTURES / n) for n in ("fred.kb", "fred.events", hazards)]
    )


def test_fred():
    c = fred()
    verdict, interval, source = c.ask("(isa Fred Married)", "1992")
    assert verdict == "True", verdict
    assert interval[0] == "1988-07-01", interval
    assert c.ask("(isa Fred Married)", "1992", mode="m1")[0] == "Unknown"

    short = fred("fred_short.hazards").project("(isa Fred Married)", "1992")
    assert short["source"] == "hazard-subsumed", short
    assert short["interval"] == ("1988-07-01", "1994-06-30"), short
    assert abs(c.prob("(isa Fred Married)", "1990-01-01") - 0.967**2) < 1e-9


def test_hazard_spec():
    spec = tproj.HazardSpec.parse("(hazard :for (isa ?x Married) :period 365 :h (0.2))")
    assert abs(spec.survival(3) - 0.512) < 1e-12
    total = sum(spec.event_time_pmf(k) for k in range(1, 31)) + spec.survival(30)
    assert abs(total - 1.0) < 1e-12
    # Three 365-day periods survive; 2000 is a leap year.
    start, end = spec.forward_interval("2000-01-01", 0.5)
    assert start == "2000-01-01" and end == "2002-12-31", (start, end)


def test_learn():
    rng = random.Random(1)
    buf = io.StringIO()
    w = csv.writer(buf)
    w.writerow(["individual", "risk_start", "observed_until", "event_time", "covariates"])
    for i in range(3000):
        k = next((k for k in range(1, 11) if rng.random() < 0.2), None)
        ev = "" if k is None else f"{2000 + k - 1}-06-01"
        w.writerow([f"I{i}", "2000-01-01", "2009-12-31", ev, ""])
    fit = tproj.fit_episodes(buf.getvalue(), "(isa ?x Married)")
    assert fit["converged"]
    assert abs(fit["hazards"][0] - 0.2) < 0.03, fit["hazards"]
    assert fit["spec"].startswith("(hazard :for (isa ?x Married)")


def test_world_and_eval():
    with tempfile.TemporaryDirectory() as d:
        files = tproj.generate_world(seed=3, individuals=120, queries_per_set=20, out=d)
        assert "world.kb" in files and "answers.csv" in files
        assert files == tproj.generate_world(seed=3, individuals=120, queries_per_set=20)
        report = list(csv.DictReader(io.StringIO(tproj.run_eval(d))))
        totals = {r["mode"]: float(r["pct_correct"]) for r in report if r["query_set"] == "total"}
        assert totals["m2"] >= totals["m1"], totals


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_"):
            fn()
            print(f"{name} ok")
