import json

import pytest

from kcube.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_validate_presets(capsys):
    code, out, _ = run(capsys, "validate", "--preset", "gamma1", "--axioms", "vh,f1,f2")
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(capsys, "validate", "--preset", "vh44", "--axioms", "f1,rigidity")
    assert code == 0


def test_validate_all_axioms(capsys):
    code, out, _ = run(capsys, "validate", "--preset", "gamma2",
                       "--axioms", "vh,f1,f2,rigidity,cubes,connected,factorization", "--max-degree-sum", "2")
    report = json.loads(out)
    assert code == 0
    assert report["results"]["cubes"]["count"] == 24


def test_validate_digraph_file(capsys, tmp_path):
    from conftest import digraph

    mutant = digraph("gamma1").mutate_swap(("a1", "b2"), ("a1", "b6"))
    mutant.dump(tmp_path / "m.json")
    code, out, _ = run(capsys, "validate", "--in", str(tmp_path / "m.json"), "--axioms", "f1,f2")
    assert code == 1
    assert not json.loads(out)["results"]["f2"]["passed"]


def test_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "validate", "--in", str(bad))[0] == 2
    assert run(capsys, "validate", "--in", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "validate")[0] == 2
    assert run(capsys, "validate", "--preset", "gamma1", "--in", str(bad))[0] == 2
    assert run(capsys, "validate", "--preset", "nope")[0] == 2
    assert run(capsys, "validate", "--preset", "gamma1", "--axioms", "zz")[0] == 2
    assert run(capsys, "pipeline", "--preset", "gamma1", "--cover", "abelian:5")[0] == 2


def test_pipeline_cubes(capsys):
    code, out, _ = run(capsys, "pipeline", "--preset", "gamma2", "--report", "cubes")
    assert code == 0 and json.loads(out)["cubes"] == 24


def test_pipeline_factor_type(capsys):
    code, out, _ = run(capsys, "pipeline", "--preset", "free_product:2,2", "--cover", "double", "--report", "factor-type")
    summary = json.loads(out)
    assert code == 0
    assert summary["factor_type"]["exact"] == "1/16"
    assert abs(summary["factor_type"]["lambda"] - 1 / 16) < 1e-12


def test_pipeline_order25(capsys, tmp_path):
    out_dir = tmp_path / "run"
    code, out, _ = run(capsys, "pipeline", "--preset", "gamma1", "--cover", "abelian:5,2",
                       "--spectra", "kgraph", "--out", str(out_dir))
    summary = json.loads(out)
    assert code == 0
    assert summary["complex"]["vertices"] == 25 and summary["ramanujan"]
    assert summary["abelian"]["each_alphabet_generates"]
    blocks = (out_dir / "matrices.txt").read_text().splitlines()
    assert blocks[0] == "25 3" and len(blocks) == 76
    spectrum = (out_dir / "spectrum_1.txt").read_text().split()
    assert spectrum[0] == "6.000000000" and len(spectrum) == 25
    assert sorted(p.name for p in out_dir.iterdir()) == [
        "complex.json", "digraph.json", "matrices.txt",
        "spectrum_1.txt", "spectrum_2.txt", "spectrum_3.txt", "summary.json",
    ]


def test_pipeline_deterministic(capsys, tmp_path):
    outputs = []
    for n in range(2):
        d = tmp_path / str(n)
        run(capsys, "pipeline", "--preset", "vh44", "--cover", "double", "--spectra", "cubical",
            "--report", "period", "--out", str(d))
        outputs.append({p.name: p.read_bytes() for p in d.iterdir()})
    assert outputs[0] == outputs[1]


def test_pipeline_hom_file(capsys, tmp_path):
    from kcube.covers import solve_abelian_quotient
    from conftest import structure

    sol = solve_abelian_quotient(structure("vh44"), 3, 1)[0]
    sol.assignment.dump(tmp_path / "q.json")
    code, out, _ = run(capsys, "pipeline", "--preset", "vh44", "--cover", f"hom:{tmp_path / 'q.json'}")
    assert code == 0 and json.loads(out)["hom"]["passed"]
    images = json.loads((tmp_path / "q.json").read_text())
    images["images"]["a1"] = list(range(1, images["N"] + 1))
    (tmp_path / "q.json").write_text(json.dumps(images))
    assert run(capsys, "pipeline", "--preset", "vh44", "--cover", f"hom:{tmp_path / 'q.json'}")[0] == 1


def test_matrix_command(capsys, tmp_path):
    code, out, _ = run(capsys, "matrix", "--preset", "matrix25", "--mode", "cubical")
    rep = json.loads(out)
    assert code == 0 and rep["ramanujan"]["ramanujan"]
    assert rep["ramanujan"]["lambda2"] <= 3.24 and rep["relabel_invariant"]
    code, out, _ = run(capsys, "matrix", "--preset", "matrix25", "--power", "3", "--check-entries",
                       "--expect-diag", "12", "--expect-offdiag", "6,7,15")
    power = json.loads(out)["power"]
    assert code == 0 and power["diagonal"] == [12] and set(power["off_diagonal"]) <= {6, 7, 15}
    assert run(capsys, "matrix", "--preset", "matrix25", "--power", "3", "--check-entries",
               "--expect-diag", "11")[0] == 1


def test_matrix_files(capsys, tmp_path):
    eye = tmp_path / "eye.txt"
    eye.write_text("1 0 0\n0 1 0\n0 0 1\n")
    code, out, _ = run(capsys, "matrix", "--in", str(eye))
    assert code == 0 and json.loads(out)["eigenvalues"] == [1.0, 1.0, 1.0]
    asym = tmp_path / "asym.txt"
    asym.write_text("0 1\n2 0\n")
    assert run(capsys, "matrix", "--in", str(asym))[0] == 2
    irregular = tmp_path / "irr.txt"
    irregular.write_text("0 1\n1 1\n")
    assert run(capsys, "matrix", "--in", str(irregular))[0] == 1


def test_preset_command(capsys, tmp_path):
    code, out, _ = run(capsys, "preset", "list")
    assert code == 0 and "gamma1" in out.split()
    code, out, _ = run(capsys, "preset", "export", "gamma1", "--relators")
    assert len(json.loads(out)["relators"]) == 27
    run(capsys, "preset", "export", "vh44", "--out", str(tmp_path / "vh44.json"))
    code, out, _ = run(capsys, "validate", "--in", str(tmp_path / "vh44.json"))
    assert code == 0
    assert run(capsys, "preset", "export")[0] == 2


def test_fixture_override(capsys, tmp_path, monkeypatch):
    from kcube import fixtures

    (tmp_path / "matrix25.txt").write_text("0 2\n2 0\n")
    monkeypatch.setenv("KCUBE_FIXTURES", str(tmp_path))
    M = fixtures.preset("matrix25")
    assert M.tolist() == [[0, 2], [2, 0]]
