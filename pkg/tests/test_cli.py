import io
import subprocess
import sys

import pytest

from padickit.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def mats(tmp_path):
    files = {
        "negI": "2\n-1 0\n0 -1\n",
        "d31": "2\n3 0\n0 1\n",
        "rot": "2\n0 -1\n1 0\n",
        "flip": "2\n1 0\n0 -1\n",
        "half": "2\n1/2 0\n0 1\n",
        "bad": "2\n1 x\n0 1\n",
    }
    out = {}
    for name, text in files.items():
        path = tmp_path / f"{name}.txt"
        path.write_text(text)
        out[name] = str(path)
    return out


def test_val_and_abs():
    assert call("val", "5", "50") == (0, "2\n", "")
    assert call("abs", "7", "0") == (0, "0\n", "")
    assert call("abs", "2", "48")[1] == "1/16\n"
    assert call("val", "2", "--", "-7/8")[1] == "-3\n"


def test_root_example():
    code, out, _ = call("root", "5", "2", "--", "-1", "--prec", "10")
    assert code == 0
    assert out == "p-adic(5; 0; 2 1 2 1 3 4 2 3 0 3; O(5^10))\ncheck: x^2 ≡ -1 (mod 5^10) OK\n"


def test_root_no_root_is_a_result():
    assert call("root", "2", "2", "3")[:2] == (0, "no root: mod 8 obstruction\n")
    assert call("root", "5", "2", "2")[1].startswith("no root: residue")
    assert call("root", "5", "2", "5")[1].startswith("no root:")


def test_parse_errors_exit_1():
    code, out, err = call("val", "five", "50")
    assert code == 1 and out == "" and "usage" in err
    assert call("nonsense")[0] == 1
    assert call()[0] == 1
    assert call("val", "5", "1", "--prec", "zero")[0] == 1
    assert call("val", "5", "1", "--format", "json")[0] == 1
    assert call("embed", "5", "p-adic(5; 0; 9; O(5^1))")[0] == 1


def test_hypothesis_errors_exit_2():
    code, out, err = call("val", "5", "0")
    assert code == 2 and out == "" and "valuation of zero" in err
    code, _, err = call("geom-sum", "5", "3")
    assert code == 2 and "hypothesis violated: |x|_p < 1" in err
    code, _, err = call("integrate", "5", "2", "--ell", "5")
    assert code == 2 and "ell != p" in err
    code, _, err = call("hensel", "5; 1, 0, 1", "1")
    assert code == 2 and "f(z) in pZ_p" in err
    assert call("val", "4", "8")[0] == 2


def test_embed_arith_digits():
    assert call("embed", "5", "--", "-1/4", "--prec", "4")[1] == "p-adic(5; 0; 1 1 1 1; O(5^4))\n"
    assert call("arith", "5", "p-adic(5; 0; 1 0 0; O(5^3))", "+", "p-adic(5; 0; 4 4 4; O(5^3))")[1] == "O(5^3)\n"
    out = call("--format", "tabular", "digits", "5", "--", "-1/4", "--prec", "3")[1]
    assert out == "0\t1\n1\t1\n2\t1\n"
    assert call("arith", "3", "1", "/", "0")[0] == 2


def test_geom_sum():
    assert call("geom-sum", "2", "2", "--prec", "6")[1] == "p-adic(2; 0; 1 1 1 1 1 1; O(2^6))\n"


def test_hensel_cmd():
    code, out, _ = call("hensel", "2; -17, 0, 1", "1", "--refined", "--prec", "12")
    assert code == 0
    assert out.splitlines()[-1] == "check: f(x) ≡ 0 (mod 2^12) OK"
    assert out.startswith("p-adic(2; 0; 1 0 0 1")


def test_cells_cmd():
    out = call("cells", "cell(5; 7; 1)", "--compare", "cell(5; 0; 0)", "--subdivide", "1")[1]
    lines = out.splitlines()
    assert lines[:3] == ["cell: cell(5; 2; 1)", "diameter: 1/5", "relation: first inside second"]
    assert len([ln for ln in lines if ln.startswith("subcell")]) == 5
    assert call("cells", "cell(3; 0; 1)", "--contains", "1/3")[1].endswith("contains: no\n")
    assert call("cells", "ball(3; 0; 1)")[0] == 1


def test_integrate_cmd(tmp_path):
    code, out, _ = call("integrate", "2", "4", "--function", "abs")
    assert code == 0 and out == "85/128\nerror: 1/16\n"
    assert call("integrate", "5", "3", "--function", "identity", "--measure", "haar", "--prec", "6")[1] \
        == "p-adic(5; 0; 2 2 2 0 0 0; O(5^6))\n"
    table = tmp_path / "mu.csv"
    table.write_text("scale,residue,value\n0,0,1\n1,0,1\n1,1,0\n1,2,1\n")
    code, _, err = call("integrate", "3", "1", "--measure", str(table))
    assert code == 2 and "measure inconsistent" in err


def test_reduce_and_char():
    assert call("reduce", "5", "--", "-1/4", "1")[1] == "1\n"
    assert call("char", "5", "1", "1", "3")[1] == "3/5\n"
    assert call("char", "3", "2", "4", "5")[1] == "2/9\n"


def test_matrix_cmds(mats):
    assert call("matrix-order", mats["negI"], "2")[1] == "order 2\n"
    assert call("matrix-order", mats["d31"], "2")[1] == "infinite order\n"
    assert call("matrix-order", mats["rot"], "5")[1] == "order 4\n"
    assert call("matrix-order", mats["half"], "2")[0] == 2
    assert call("matrix-order", mats["bad"], "2")[0] == 1
    assert call("matrix-order", "/nonexistent/file", "2")[0] == 1
    out = call("subgroup-check", "5", mats["rot"], "--generate")[1]
    assert "distinct_images: 4" in out and out.endswith("passed: yes\n")
    out = call("subgroup-check", "2", mats["negI"], mats["flip"], "--generate")[1]
    assert "kernel_size: 4" in out and out.endswith("passed: yes\n")
    out = call("involution", mats["flip"])[1]
    assert "P1:\n  0 0\n  0 1" in out and out.count("OK") == 5
    assert call("involution", mats["rot"])[0] == 2


def test_classify_norm_cmd(tmp_path):
    f = tmp_path / "n.txt"
    f.write_text("".join(f"{n}\t{n}\n" for n in range(1, 40)))
    assert call("classify-norm", str(f))[1] == "archimedean 1\n"
    code, out, _ = call("classify-norm", str(f), "--check", "ultrametric")
    assert code == 0 and "violations: " in out and "violations: 0" not in out
    g = tmp_path / "t.txt"
    g.write_text("".join(f"{n}\t1\n" for n in range(1, 40)))
    assert call("classify-norm", str(g))[1] == "trivial\n"
    h = tmp_path / "h.txt"
    h.write_text("1\t2\n2\t1\n")
    assert call("classify-norm", str(h))[0] == 2


def test_tabular_format():
    out = call("root", "5", "2", "--", "-1", "--prec", "4", "--format", "tabular")[1]
    assert out == "value\tp-adic(5; 0; 2 1 2 1; O(5^4))\ncheck\tx^2 ≡ -1 (mod 5^4) OK\n"


def test_deterministic_subprocess():
    argv = [sys.executable, "-m", "padickit", "root", "7", "3", "--", "-1", "--prec", "12"]
    runs = [subprocess.run(argv, capture_output=True) for _ in range(2)]
    assert runs[0].returncode == 0
    assert runs[0].stdout == runs[1].stdout and runs[0].stdout
