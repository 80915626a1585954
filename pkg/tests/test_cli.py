import json
from pathlib import Path

import pytest

from lattfree import serialize
from lattfree.cli import main
from lattfree.instances import quadratic_integers, regular, split_c2, twisted_regular

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_wedderburn(capsys):
    code, out, _ = run(capsys, "wedderburn", "Q8")
    assert code == 0
    assert "5 components" in out and "(-1,-1|Q)" in out


def test_conductor(capsys, tmp_path):
    dest = tmp_path / "c.json"
    code, out, _ = run(capsys, "conductor", "C2", "--json-out", dest)
    assert code == 0
    assert json.loads(dest.read_text())["g_generators"] == [2, 2]


def test_isfree_exit_codes(capsys):
    assert run(capsys, "isfree", FIXTURES / "c2_sqrt5.json")[0] == 0
    code, out, _ = run(capsys, "isfree", FIXTURES / "c2_split.json")
    assert code == 2 and "NOT_LOCALLY_FREE" in out
    code, out, _ = run(capsys, "isfree", FIXTURES / "q8_twisted.json", "--tuple-cap", "1")
    assert code in (0, 3)


def test_isfree_unknown_exit_code(capsys, tmp_path):
    path = tmp_path / "d4.json"
    path.write_text(serialize.dumps(serialize.instance_to_json(regular("D4"))))
    code, out, _ = run(capsys, "isfree", path, "--closure-cap", "10")
    assert code == 3 and "UNKNOWN" in out


def test_verify_round_trip(capsys, tmp_path):
    cert = tmp_path / "cert.json"
    assert run(capsys, "isfree", FIXTURES / "c2_sqrt5.json", "--json-out", cert)[0] == 0
    assert run(capsys, "verify", cert, FIXTURES / "c2_sqrt5.json")[0] == 0
    doc = json.loads(cert.read_text())
    doc["generators"] = [["1", "0"]]
    cert.write_text(json.dumps(doc))
    code, out, _ = run(capsys, "verify", cert, FIXTURES / "c2_sqrt5.json")
    assert code == 2 and "rejected" in out


def test_pip_and_steinitz(capsys, tmp_path):
    dest = tmp_path / "p.json"
    code, out, _ = run(capsys, "pip", FIXTURES / "pip_sqrt_minus5.json", "--json-out", dest)
    assert code == 0 and out.strip() == "not principal"
    assert json.loads(dest.read_text()) == {"principal": False, "generator": None}
    code, out, _ = run(capsys, "steinitz", FIXTURES / "steinitz_sqrt_minus5.json")
    assert code == 0 and "Steinitz form" in out


def test_sk1(capsys):
    code, out, _ = run(capsys, "sk1", "--algebra=-1,-1")
    assert code == 0
    assert "p = 2: cyclic SK1 factor of order 3" in out


def test_unit_reps_cross_check(capsys):
    code, out, _ = run(capsys, "unit-reps", "--algebra=-1,-1", "--modulus", "2", "--cross-check")
    assert code == 0
    assert "12 elements" in out and "equal = True" in out
    code, out, _ = run(capsys, "unit-reps", "--modulus", "4", "--rank", "2")
    assert code == 0 and "96 elements" in out


def test_assoc_order(capsys):
    code, out, _ = run(capsys, "assoc-order", FIXTURES / "c2_sqrt_minus1_associated.json")
    assert code == 0
    assert "1/2 1/2" in out


def test_schema_error_names_the_path(capsys, tmp_path):
    doc = serialize.instance_to_json(regular("C2"))
    doc["lattice"]["pseudo_basis"][1]["coords"][0] = "one"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "isfree", path)
    assert code == 1
    assert "lattice/pseudo_basis/1/coords/0" in err


def test_missing_action_and_malformed_json(capsys, tmp_path):
    doc = serialize.instance_to_json(regular("C2"))
    del doc["lattice"]["action"]["g"]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "isfree", path)
    assert code == 1 and "missing matrix" in err
    path.write_text("{")
    code, _, err = run(capsys, "isfree", path)
    assert code == 1 and "line 1" in err


def test_json_output_is_byte_identical(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for dest in (a, b):
        run(capsys, "isfree", FIXTURES / "q8_twisted.json", "--seed", "7", "--json-out", dest)
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize("inst", [regular("C2"), split_c2(), quadratic_integers(13),
                                  quadratic_integers(-1, order="associated"),
                                  twisted_regular("C4", [1, 2, 0, -1])],
                         ids=["regular", "split", "sqrt13", "associated", "twisted"])
def test_instance_serialization_round_trip(inst):
    doc = serialize.instance_to_json(inst)
    again = serialize.instance_to_json(serialize.instance_from_json(json.loads(serialize.dumps(doc))))
    assert again == doc


def test_fixtures_are_normalized():
    for path in sorted(FIXTURES.glob("c2_*.json")) + [FIXTURES / "q8_twisted.json"]:
        doc = serialize.read_json(path)
        assert serialize.instance_to_json(serialize.instance_from_json(doc)) == doc
