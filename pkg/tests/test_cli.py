import json
import subprocess
import sys

import pytest

from ehclab import cli
from ehclab.core import Tournament, from_text
from ehclab.families import Component, FamilySpec
from ehclab.mutants import corresponding_digraph

from test_smooth import planted_left_beta1


def call(capsys, *argv):
    code = cli.run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path):
    paths = {}

    def write(name, text):
        path = tmp_path / name
        path.write_text(text)
        paths[name] = path
        return path
    write.dir = tmp_path
    return write


# ---------------------------------------------------------------- basic verbs

def test_gen_asteroid_then_tr(capsys, files):
    out_path = files.dir / "a.trn"
    assert call(capsys, "gen", "asteroid", "-o", out_path)[0] == 0
    code, out, _ = call(capsys, "tr", out_path)
    assert code == 0 and out == "4\nwitness: 0,1,4,2\n"


def test_tr_transitive_five(capsys, files):
    path = files("t5.trn", Tournament.transitive(5).to_text())
    code, out, _ = call(capsys, "tr", path)
    assert code == 0 and out == "5\nwitness: 0,1,2,3,4\n"


def test_gen_golden(capsys):
    assert call(capsys, "gen", "transitive", "--n", 3)[1] == "trn 3\n111\n"
    code, out, _ = call(capsys, "gen", "beta", "--kind", "left-beta1")
    assert code == 0 and out.startswith("trn 7\n")


def test_gen_random_needs_seed(capsys):
    code, _, err = call(capsys, "gen", "random", "--n", 5)
    assert code == 2 and "--seed" in err
    a = call(capsys, "gen", "random", "--n", 6, "--seed", 9)[1]
    assert a == call(capsys, "gen", "random", "--n", 6, "--seed", 9)[1]


def test_gen_family_from_spec(capsys, files):
    spec = FamilySpec("asterism", 7, [Component("beta", tuple(range(7)), {"kind": "right-beta2"})])
    path = files("spec.json", spec.to_json())
    code, out, _ = call(capsys, "gen", "asterism", "--spec", path)
    assert code == 0 and from_text(out).n == 7
    assert call(capsys, "gen", "galaxy", "--spec", path)[0] == 2


def test_contains_exit_codes(capsys, files):
    host = files("t.trn", Tournament.transitive(6).to_text())
    cyc = files("c.trn", Tournament.from_arcs(3, [(0, 1), (1, 2), (2, 0)]).to_text())
    tri = files("t3.trn", Tournament.transitive(3).to_text())
    code, out, _ = call(capsys, "contains", host, cyc)
    assert code == 1 and out == "absent\n"
    code, out, _ = call(capsys, "contains", host, tri)
    assert code == 0 and out == "found\n0->0 1->1 2->2\n"


def test_recognize(capsys, files):
    path = files("b.trn", cli.families.build_beta_asteroid("left-beta1")[0].to_text())
    code, out, _ = call(capsys, "recognize", path, "--family", "asterism")
    assert code == 0 and "ordering" in json.loads(out)
    # the rotational 5-vertex tournament is the only 5-vertex non-asterism
    rotational = Tournament.from_arcs(5, [(i, (i + d) % 5) for i in range(5) for d in (1, 2)])
    code, out, _ = call(capsys, "recognize", files("r.trn", rotational.to_text()), "--family", "asterism")
    assert code == 1 and out == "not a asterism\n"


def test_mutant_kind(capsys):
    code, out, _ = call(capsys, "mutant", "--kind", "left-beta1")
    assert code == 0 and out.startswith("dgr 13\n") and out.count("-") == 3


def test_ops_alpha(capsys):
    code, out, _ = call(capsys, "ops", "apply", "--op", "alpha", "--ordering", "1,2,3,4,5")
    assert code == 0 and out == "4,1,3,5,2\n"
    assert call(capsys, "ops", "apply", "--op", "1", "--ordering", "1,2,3")[0] == 2


# ---------------------------------------------------------------- smooth, embed, extract

def test_smooth_verify_and_search(capsys, files):
    host = files("t8.trn", Tournament.transitive(8).to_text())
    code, out, _ = call(capsys, "smooth", "search", "--host", host, "--c", "1/2", "--lambda", "1/3", "--w", "1")
    assert code == 0
    structure = files("s.json", out)
    code, out, _ = call(capsys, "smooth", "verify", "--host", host, "--structure", structure)
    assert code == 0 and out == "smooth\n"
    t5 = files("t5.trn", Tournament.transitive(5).to_text())
    code, out, _ = call(capsys, "smooth", "search", "--host", t5, "--c", "1", "--lambda", "1/2",
                        "--w", "1", "--divisor", 2)
    assert code == 1 and out.startswith("absent")


def test_embed_found_and_absent(capsys, files):
    m, host, s, planted, bound = planted_left_beta1()
    d = files("m.dgr", m.digraph.to_text())
    h = files("h.trn", host.to_text())
    st = files("s.json", s.to_json())
    code, out, _ = call(capsys, "embed", d, "--structure", st, "--host", h)
    assert code == 0
    assert json.loads(out)["embedding"] == [planted[u] for u in range(13)]
    code, out, _ = call(capsys, "embed", d, "--structure", st, "--host", h, "--budget", 2)
    assert code == 1 and out.startswith("budget exhausted")


def test_extract(capsys, files):
    spec = FamilySpec("asterism", 7, [Component("beta", tuple(range(7)), {"kind": "left-beta1"})])
    cd = corresponding_digraph(spec)
    comp = next(iter(cd.digraph.completions()))
    code, out, _ = call(capsys, "extract", "--spec", files("spec.json", spec.to_json()),
                        "--host", files("h.trn", Tournament(13, comp.out).to_text()),
                        "--copy", files("c.json", json.dumps(list(range(13)))))
    assert code == 0 and len(json.loads(out)["embedding"]) == 7


# ---------------------------------------------------------------- lab verbs

def test_scan_three_cycle(capsys, files):
    c3 = files("c3.trn", Tournament.from_arcs(3, [(0, 1), (1, 2), (2, 0)]).to_text())
    code, out, _ = call(capsys, "ehc", "scan", "--h", c3, "--n-max", 5, "--mode", "exhaustive")
    data = json.loads(out)
    assert code == 0 and data["epsilon"] == 1.0 and len(data["rows"]) == 4
    code, out, _ = call(capsys, "ehc", "scan", "--h", c3, "--n-max", 5, "--format", "csv")
    assert out.splitlines()[0] == "n,min_tr,count,witness_canonical,eps_running"


def test_scan_sample_needs_seed(capsys, files):
    c3 = files("c3.trn", Tournament.from_arcs(3, [(0, 1), (1, 2), (2, 0)]).to_text())
    assert call(capsys, "ehc", "scan", "--h", c3, "--n-max", 4, "--mode", "sample", "--samples", 10)[0] == 2


def test_scan_no_free(capsys, files):
    one = files("one.trn", "trn 1\n\n")
    assert call(capsys, "ehc", "scan", "--h", one, "--n-max", 3)[0] == 1


def test_sweep_golden(capsys):
    assert call(capsys, "sweep", "--target", "left-beta1") == (0, "8/8 pass\n", "")
    code, out, _ = call(capsys, "sweep", "--target", "all-betas")
    assert code == 0 and out.splitlines()[-1] == "32/32 pass"
    assert call(capsys, "sweep", "--target", "spider:middle:1:1")[1] == "4/4 pass\n"
    assert call(capsys, "sweep", "--target", "bogus")[0] == 2


def test_critical_golden(capsys):
    assert call(capsys, "critical", "--eps", "7/10", "--n-max", 4) == (0, "trn 3 010\n", "")
    assert call(capsys, "critical", "--eps", "2/10", "--n-max", 5)[1] == "none\n"
    assert call(capsys, "critical", "--eps", "x", "--n-max", 5)[0] == 2


def test_lemma_check(capsys):
    code, out, _ = call(capsys, "lemma", "check", "--id", "h", "--params", "k=3")
    assert code == 0 and out == "lemma h k=3 n=4 exhaustive: 64 checked, 0 counterexamples\npass\n"
    code, out, _ = call(capsys, "lemma", "check", "--id", "b", "--params", "instances=50,seed=2")
    assert code == 0 and out.endswith("pass\n")
    assert call(capsys, "lemma", "check", "--id", "g", "--params", "instances")[0] == 2


# ---------------------------------------------------------------- usage and reproducibility

def test_usage_errors(capsys, files):
    assert call(capsys, "frobnicate")[0] == 2
    assert call(capsys, "tr", "--bogus", "x")[0] == 2
    assert call(capsys, "tr", files.dir / "missing.trn")[0] == 2
    bad = files("bad.trn", "trn 3\n1\n")
    code, _, err = call(capsys, "tr", bad)
    assert code == 2 and err.startswith("ehc-lab tr:")


def test_help_lists_every_verb(capsys):
    code, out, _ = call(capsys, "--help")
    assert code == 0
    for verb in ["gen", "tr", "contains", "recognize", "mutant", "ops", "smooth", "embed",
                 "extract", "ehc", "sweep", "critical", "lemma"]:
        assert f"\n    {verb} " in out


def test_out_file_matches_stdout(capsys, files):
    path = files.dir / "o.txt"
    _, out, _ = call(capsys, "critical", "--eps", "1", "--n-max", 3)
    call(capsys, "critical", "--eps", "1", "--n-max", 3, "-o", path)
    assert path.read_text() == out


def test_seeded_scan_identical_across_jobs(capsys, files):
    ast = files("a.trn", cli.families.build_asteroid()[0].to_text())
    argv = ["ehc", "scan", "--h", ast, "--n-max", 7, "--mode", "sample", "--samples", 5000, "--seed", 4]
    one = call(capsys, "--jobs", 1, *argv)[1]
    two = call(capsys, "--jobs", 2, *argv)[1]
    assert one == two == call(capsys, "--jobs", 1, *argv)[1]


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ehclab", "ops", "apply", "--op", "alpha",
                           "--ordering", "1,2,3,4,5"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "4,1,3,5,2\n"
    proc = subprocess.run([sys.executable, "-m", "ehclab"], capture_output=True, text=True)
    assert proc.returncode == 2
