import json
from pathlib import Path

import pytest

from stronghom.cli import main
from stronghom.instance_io import InstanceError, dump_instance, load_instance, parse_instance, serialize_instance

INST = Path(__file__).resolve().parent.parent / "instances"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out.strip(), out.err


@pytest.mark.parametrize("name,coeff,expected", [
    ("rp2.json", None, "H0=Z/2 H1=Z/2 H2=Z/2"),
    ("point.json", None, "H0=Z"),
    ("rp2.json", "Q/Z", "H0=Q/Z H1=0 H2=Z/2"),
    ("rp2_simplicial.json", "Z", "H0=Z H1=Z/2 H2=0"),
])
def test_homology_command(capsys, name, coeff, expected):
    args = ["homology", INST / name] + (["-G", coeff] if coeff else [])
    code, out, _ = run(capsys, *args)
    assert code == 0 and out == expected


def test_bad_shape_exits_2_naming_degree(capsys):
    code, _, err = run(capsys, "homology", INST / "bad_shape.json")
    assert code == 2 and "degree" in err


def test_lim_commands(capsys):
    assert run(capsys, "lim", INST / "pseudo_circle_groups.json", "--i", 1)[1] == "lim1 = Z"
    code, out, _ = run(capsys, "lim", INST / "tower_times2.json")
    assert code == 0 and out == "not-ML; lim = 0; lim1 = nonzero-unrepresentable"
    assert run(capsys, "lim", INST / "tower_times2_mod4.json")[1] == "ML; lim = 0; lim1 = 0"


def test_total_command(capsys):
    code, out, _ = run(capsys, "total", INST / "chain_point.json", "--height", 1, "--degree", 0)
    assert code == 0 and out.startswith("n=0:") and "Hinf=Z" in out


def test_total_infinity_out_of_scope(capsys):
    code, out, err = run(capsys, "total", INST / "pseudo_circle.json", "--infinity")
    assert "out of scope" in out and err


def test_verify_exit_codes(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", INST / "rp2.json", "--theorem", "theorem1", "--report", report)
    assert code == 0
    data = json.loads(report.read_text())
    assert data["verdict"] == "pass" and data["theorem"] == "theorem1"
    assert run(capsys, "verify", INST / "pseudo_circle.json", "--theorem", "theorem1")[0] == 2
    assert run(capsys, "verify", INST / "rp2_bockstein.json", "--theorem", "lemma4")[0] == 0


def test_reruns_are_byte_identical(capsys):
    args = ("verify", INST / "wedge3.json", "--theorem", "theorem2", "--json")
    first = run(capsys, *args)[1]
    assert first == run(capsys, *args)[1]


@pytest.mark.parametrize("path", sorted(p for p in INST.glob("*.json") if p.name != "bad_shape.json"))
def test_instance_roundtrip(path, tmp_path):
    inst = load_instance(path)
    again = parse_instance(serialize_instance(inst))
    assert serialize_instance(again) == serialize_instance(inst)
    (tmp_path / "x.json").write_text(dump_instance(inst))
    assert dump_instance(load_instance(tmp_path / "x.json")) == dump_instance(inst)


def test_missing_version_rejected():
    with pytest.raises(InstanceError, match="version"):
        parse_instance({"complex": {"ranks": [1], "differentials": []}})
