import json
import os
import subprocess
import sys

import pytest

from tga.cli import main, run

DATA = os.path.join(os.path.dirname(__file__), "..", "data")


def d(name):
    return os.path.join(DATA, name)


def report(*argv):
    text, code = run(list(argv))
    assert code == 0, text
    return json.loads(text)


def test_simplicity_o2():
    r = report("simplicity", d("o2.json"))
    assert r["simple"] is True
    assert r["schema_version"] == "1" and r["tolerances"]["identity"] == 1e-12


def test_bundle_hopf():
    r = report("bundle", d("hopf.json"))
    assert r["euler"] == 1 and r["pi1"] == "trivial"
    r = report("bundle", d("trivial_bundle.json"))
    assert r["euler"] == 0 and r["pi1"] == "Z"


def test_cohomology_sphere():
    assert report("cohomology", d("sphere.json"))["H2"] == {"rank": 1, "torsion": []}
    assert report("cohomology", d("circle.json"))["H2"] == {"rank": 0, "torsion": []}


def test_cocycle_commands():
    r = report("classify-cocycle", d("sphere.json"), d("sphere_generator.json"))
    assert r["class"]["free"] == [1] and r["trivializable"] is False
    r = report("cocycle-check", d("sphere.json"), d("sphere_bad.json"))
    assert r["check"]["ok"] is False
    assert r["check"]["violations"][0]["defect"] == "2/5"


def test_graph_commands():
    assert report("classify", d("edge.json"))["classification"]["rg"] == ["v"]
    assert report("paths", d("o2.json"), "--n", "2")["count"] == 4
    assert report("cycles", d("loop_with_exit.json"))["topologically_free"] is False
    assert report("ideals", d("infinite_family.json"))["ideal_count"] == 4
    r = report("surgery", d("loop.json"), "--Y", "v")
    assert len(r["graph"]["vertices"]) == 2
    r = report("paths", d("twisted_loop.json"), "--n", "2")
    assert len(r["product_cover"]) == 4


def test_verify_correspondence(monkeypatch):
    monkeypatch.setenv("TGA_SEED", "4")
    r = report("verify-correspondence", d("o2_model.json"), "--samples", "2")
    assert r["all_passed"] and r["seed"] == 4


def test_exit_codes(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"vertices": ["u"], "edges": [{"id": "e", "src": "u", "rng": "w"}]}')
    text, code = run(["classify", str(bad)])
    assert code == 2 and "graph" in text
    text, code = run(["classify", str(tmp_path / "missing.json")])
    assert code == 2
    text, code = run(["surgery", d("edge.json"), "--Y", "u"])
    assert code == 3 and "offending" in text
    text, code = run(["paths", d("o2.json"), "--n", "0"])
    assert code == 3
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert run(["ideals", str(broken)])[1] == 2


def test_determinism_and_out_file(tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["ideals", d("infinite_family.json"), "--out", str(out1)]) == 0
    assert main(["ideals", d("infinite_family.json"), "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert b"\r" not in out1.read_bytes()
    text = out1.read_text()
    assert text == json.dumps(json.loads(text), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def test_text_format():
    text, code = run(["simplicity", d("loop.json"), "--format", "text"])
    assert code == 0 and "simple: false" in text


def test_max_vertices_guard(tmp_path):
    big = tmp_path / "big.json"
    big.write_text(json.dumps({"vertices": list(range(6)), "edges": []}))
    assert run(["ideals", str(big), "--max-vertices", "5"])[1] == 3


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "tga.cli", "cohomology", d("sphere.json")], capture_output=True, text=True
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["H2"]["rank"] == 1


@pytest.mark.parametrize("cmd", ["classify", "cycles", "ideals", "simplicity"])
def test_every_report_embeds_version(cmd):
    r = report(cmd, d("o2.json"))
    assert r["schema_version"] == "1" and "positivity" in r["tolerances"]
