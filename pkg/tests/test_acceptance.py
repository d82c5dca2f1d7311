"""The seven acceptance criteria, run at their full windows.

The default battery runs once in-process; a second, independent run of
``voa suite`` with the same seed runs concurrently in a subprocess so that
criterion 7 can compare the two reports byte for byte.
"""

import json
import os
import subprocess
import sys

import pytest

from voa.cli import dumps
from voa.suite import CRITERIA, FULL, run_suite

SEED = 0


@pytest.fixture(scope="module")
def battery():
    second = subprocess.Popen([sys.executable, "-m", "voa", "suite", "--seed", str(SEED)],
                              stdout=subprocess.PIPE, stderr=subprocess.PIPE, env=dict(os.environ))
    report = run_suite(seed=SEED)
    out, err = second.communicate()
    return {"report": report, "by_id": {c["id"]: c for c in report["criteria"]},
            "second": out, "second_code": second.returncode, "second_err": err.decode()}


def announce(capsys, cid, name, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {cid} {name}: {'PASS' if ok else 'FAIL'} ({detail})", flush=True)


def check(battery, capsys, cid):
    res = battery["by_id"][cid]
    announce(capsys, cid, res["name"], res["passed"], f"{res['assertions']} assertions")
    assert res["passed"], json.dumps(res["failures"][:3], default=str)
    assert res["assertions"] > 0
    return res


def test_criterion_1_jacobi(battery, capsys):
    res = check(battery, capsys, 1)
    assert set(res["fixtures"]) == {"heisenberg", "fock:1", "twisted"}
    assert all(f["nontrivial"] > 0 for f in res["fixtures"].values())
    assert res["window"] == {k: FULL["jacobi"][k] for k in sorted(FULL["jacobi"])}


def test_criterion_2_relations(battery, capsys):
    check(battery, capsys, 2)


def test_criterion_3_twisted_lowest_weight(battery, capsys):
    res = check(battery, capsys, 3)
    assert res["lowest_weight"] == "1/16"


def test_criterion_4_radical(battery, capsys):
    res = check(battery, capsys, 4)
    assert set(res["fixtures"]) == {"heisenberg", "fock:1", "twisted"}
    assert all(f["verdict"] == "holds" for f in res["fixtures"].values())


def test_criterion_5_zhu(battery, capsys):
    res = check(battery, capsys, 5)
    assert sorted(res["algebras"]) == sorted(["A_0", "A_1", "A_g_0", "A_g_1/2", "A_g_1"])


def test_criterion_6_irreducibility(battery, capsys):
    res = check(battery, capsys, 6)
    fx = res["fixtures"]
    assert fx["sum:1,-1"]["pieces"][0][:3] == ["0", 2, 2]
    assert fx["trivial"]["applies"] is False and fx["trivial"]["witness"] is not None


def test_criterion_7_windows_and_reproducibility(battery, capsys):
    res = battery["by_id"][7]
    first = dumps(battery["report"]).encode()
    identical = battery["second_code"] == 0 and battery["second"] == first
    ok = res["passed"] and identical
    announce(capsys, 7, res["name"], ok,
             f"{res['assertions']} assertions, second run {'byte-identical' if identical else 'DIFFERS'}")
    assert res["passed"], res["failures"][:3]
    assert battery["second_code"] == 0, battery["second_err"][-2000:]
    assert battery["second"] == first


def test_battery_totals(battery):
    rep = battery["report"]
    assert [c["id"] for c in rep["criteria"]] == [cid for cid, *_ in CRITERIA]
    assert rep["passed"] and rep["certified"] is False
    assert rep["assertions"] == sum(c["assertions"] for c in rep["criteria"])
