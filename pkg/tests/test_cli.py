import csv
import io
import json
from math import gamma

import pytest

from tamarilab.cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_counts_small(capsys):
    code, out, _ = run(capsys, "counts", "--n-max", "0")
    assert code == EXIT_OK
    assert rows(out) == [{"n": "0", "contacts": "1", "count": "1", "row_sum": "1", "closed_form_total": "1"}]
    code, out, _ = run(capsys, "counts", "--n-max", "5", "--method", "closed")
    last = [r for r in rows(out) if r["n"] == "5"]
    assert sum(int(r["count"]) for r in last) == 399
    assert all(r["row_sum"] == r["closed_form_total"] for r in rows(out))


def test_verify_selected_checks(capsys):
    code, out, _ = run(capsys, "verify", "--checks", "F,H", "--order", "6")
    assert code == EXIT_OK
    report = json.loads(out)
    assert [c["check"] for c in report["checks"]] == ["F", "H"]
    assert all(c["passed"] for c in report["checks"])


def test_verify_oracle(capsys):
    code, out, _ = run(capsys, "verify", "--checks", "oracle-M", "--order", "5")
    assert code == EXIT_OK
    assert json.loads(out)["checks"][0]["passed"]


@pytest.mark.parametrize("checks", ["", "F,nope"])
def test_verify_usage_errors(capsys, checks):
    code, _, err = run(capsys, "verify", "--checks", checks)
    assert code == EXIT_USAGE and "error" in err


def test_sample_size_one(capsys):
    code, out, _ = run(capsys, "sample", "--n", "1", "--count", "3", "--seed", "5")
    assert code == EXIT_OK
    got = rows(out)
    assert len(got) == 3
    assert len({tuple(r[k] for k in r if k != "sample") for r in got}) == 1


def test_sample_exact_cap(capsys):
    code, _, err = run(capsys, "sample", "--n", "5000", "--seed", "1", "--mode", "exact")
    assert code == EXIT_USAGE and "log-float" in err


def test_sample_missing_seed(capsys):
    code, _, _ = run(capsys, "sample", "--n", "3")
    assert code == EXIT_USAGE


def test_sample_rerun_is_byte_identical(tmp_path, capsys):
    digests = []
    for name in ("a.csv", "b.csv"):
        out = tmp_path / name
        code, _, _ = run(capsys, "sample", "--n", "40", "--count", "5", "--seed", "7",
                         "--stats", "paths", "--out", str(out))
        assert code == EXIT_OK
        manifest = json.loads((tmp_path / (name + ".manifest.json")).read_text())
        assert manifest["seed"] == 7 and manifest["subcommand"] == "sample"
        digests.append(manifest["outputs"][str(out)])
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    assert digests[0] == digests[1]


def test_sample_coupling_and_profile(capsys):
    code, out, _ = run(capsys, "sample", "--n", "20", "--count", "2", "--seed", "3", "--stats", "coupling")
    assert code == EXIT_OK and len(rows(out)) == 2
    code, out, _ = run(capsys, "sample", "--n", "20", "--count", "2", "--seed", "3", "--stats", "profile")
    assert code == EXIT_OK and rows(out)


def test_mixed_second_moment(capsys):
    code, out, _ = run(capsys, "mixed", "--n-max", "3")
    assert code == EXIT_OK
    by_n = {r["n"]: r for r in rows(out)}
    assert by_n["2"]["second_moment"] == "5/6"
    assert by_n["1"]["second_moment"] == "0"


def test_moments_dyck_limits(capsys):
    code, out, _ = run(capsys, "moments", "--instance", "dyck", "--k-max", "3", "--n-max", "4")
    assert code == EXIT_OK
    for r in rows(out):
        k = int(r["k"])
        assert float(r["limit_moment"]) == pytest.approx(gamma(k / 2 + 1), rel=1e-12)


def test_pump_output(capsys):
    code, out, _ = run(capsys, "pump", "--k-max", "8")
    assert code == EXIT_OK
    by_k = {r["k"]: r for r in rows(out)}
    assert by_k["2"]["c_k"] == "8/27"
    assert by_k["8"]["c_k"] == "700*sqrt(6)/243"


def test_pump_bad_beta(capsys):
    code, _, _ = run(capsys, "pump", "--instance", "dyck", "--beta", "1/4")
    assert code == EXIT_USAGE


def test_pump_spec_file(tmp_path, capsys):
    from tamarilab.moment_pump import lower_instance
    spec = tmp_path / "spec.json"
    spec.write_text(lower_instance().to_json())
    code, out, _ = run(capsys, "pump", "--spec", str(spec), "--k-max", "2")
    assert code == EXIT_OK
    assert rows(out)[2]["c_k"] == "8/243"


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 1, "seed": 2, "count": 2}))
    code, out, _ = run(capsys, "sample", "--config", str(cfg))
    assert code == EXIT_OK and len(rows(out)) == 2
    # flags on the command line win over the file
    code, out, _ = run(capsys, "sample", "--config", str(cfg), "--count", "4")
    assert len(rows(out)) == 4


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n": 1, "seed": 2, "colour": "red"}))
    code, _, err = run(capsys, "sample", "--config", str(cfg))
    assert code == EXIT_USAGE and "colour" in err


def test_failed_check_exit_code(capsys, monkeypatch):
    from tamarilab import closed_form
    monkeypatch.setattr(closed_form, "G_ANNIHILATOR", closed_form.G_ANNIHILATOR + "+z^5")
    code, out, _ = run(capsys, "verify", "--checks", "G", "--order", "8")
    assert code == EXIT_FAIL
    assert json.loads(out)["checks"][0]["discrepancy"]["order"] == 5
