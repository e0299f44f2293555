import json

import numpy as np
import pytest

from gptlab import io
from gptlab.cli import main
from gptlab.fixtures import square
from gptlab.programming import build_channel_programmer, cyclic_shift_channels
from gptlab.core import simplex


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def files(tmp_path, capsys):
    for M in (4, 5):
        main(["polygon", "--sides", str(M), "--out", str(tmp_path / f"p{M}.json")])
    main(["simplex", "--size", "3", "--out", str(tmp_path / "s3.json")])
    capsys.readouterr()
    return tmp_path


def test_theory_round_trip(files):
    sq = io.theory_from_dict(io.load(files / "p4.json"))
    np.testing.assert_array_equal(sq.extreme_points, square().extreme_points)


def test_game(capsys):
    code, out, _ = run(capsys, "game", "--sides", "4", "--system", "8")
    assert code == 0
    assert out.splitlines()[1].split("\t") == ["4", "8", "0.5", "0.5", "0.5", "0.5", "PASS"]


def test_game_json(capsys):
    code, out, _ = run(capsys, "--format", "json", "game", "--sides", "5", "--system", "10")
    row = json.loads(out)[0]
    assert row["lp_value"] == pytest.approx(0.4472136, abs=1e-7) and row["verdict"] == "PASS"


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep-game", "--sides-from", "3", "--sides-to", "6", "--jobs", "2")
    assert code == 0 and len(out.splitlines()) == 5


def test_qc_find(files, capsys):
    code, out, _ = run(capsys, "qc-find", "--theory", str(files / "p4.json"), "--max-degree", "2")
    assert code == 0
    assert [line.split("\t")[2] for line in out.splitlines()[1:]] == ["0,1|2,3", "0,3|1,2"]


def test_distinguish(files, capsys):
    code, out, _ = run(capsys, "distinguish", "--theory", str(files / "p5.json"), "--states", "0,1")
    assert code == 0 and out.strip() == "NOT_DISTINGUISHABLE"
    code, out, _ = run(capsys, "distinguish", "--theory", str(files / "p4.json"), "--states", "0,2")
    assert out.startswith("DISTINGUISHABLE")


def test_fidelity_and_decompose(files, capsys):
    code, out, _ = run(capsys, "fidelity", "--theory", str(files / "p4.json"), "--a", "0", "--b", "2")
    assert out.splitlines()[1] == "0\t2\t0\ttrue"
    code, out, _ = run(capsys, "decompose", "--theory", str(files / "p5.json"))
    assert out.splitlines()[1:] == ["0\t0,1,2,3,4"]


def test_program_commands(files, capsys):
    inst_path = files / "inst.json"
    code, _, _ = run(capsys, "program-build-channel", "--system-size", "3", "--apparatus", str(files / "s3.json"),
                     "--programs", "0,1,2", "--dynamics", "0,1,2;1,2,0;2,0,1", "--out", str(inst_path))
    assert code == 0
    code, out, _ = run(capsys, "program-verify", "--instance", str(inst_path))
    assert code == 0 and out.count("PASS") == 3
    code, out, _ = run(capsys, "audit", "--instance", str(inst_path))
    assert code == 0 and out.count("PASS") == 3


def test_program_verify_fails(files, capsys):
    inst = build_channel_programmer(simplex(3), simplex(3), np.eye(3), None, cyclic_shift_channels(3))
    obj = io.instance_to_dict(inst)
    obj["programs"][0]["dynamics"] = obj["programs"][1]["dynamics"]
    io.dump(obj, files / "bad.json")
    code, out, _ = run(capsys, "program-verify", "--instance", str(files / "bad.json"))
    assert code == 1 and "FAIL" in out


def test_reversible_build_refused(files, capsys):
    code, _, err = run(capsys, "program-build-reversible", "--system-size", "3", "--apparatus",
                       str(files / "p4.json"), "--blocks", "0,1;2,3", "--dynamics", "0,1,2;1,2,0")
    assert code == 1 and "not linear" in err


def test_usage_errors(files, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["nonsense"])
    assert exc.value.code == 2
    (files / "broken.json").write_text('{"name": "x", "unit_effect": [1]}')
    code, _, err = run(capsys, "decompose", "--theory", str(files / "broken.json"))
    assert code == 2 and "extreme_points" in err
    code, _, err = run(capsys, "distinguish", "--theory", str(files / "p4.json"), "--states", "0,x")
    assert code == 2
    code, _, err = run(capsys, "game", "--sides", "5", "--system", "3")
    assert code == 2


def test_deterministic_output(files, capsys):
    outs = [run(capsys, "fidelity", "--theory", str(files / "p5.json"), "--a", "0", "--b", "1")[1] for _ in range(2)]
    assert outs[0] == outs[1]
