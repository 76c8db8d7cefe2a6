import json

from tdcheck.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_verify_appendix_passes_and_prints_json(capsys):
    code, out, err = run_cli(
        capsys, "verify-appendix", "--d", "1", "--trials", "2", "--field", "fp",
        "--seed", "7",
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["overall"] is True
    assert rep["command"] == "verify-appendix"
    assert rep["field"] == {
        "kind": "fp",
        "prime": 4611686018427387847,
        "rng": "splitmix64",
    }
    assert rep["trials"] == 2
    assert "all passed" in err


def test_identical_invocations_are_byte_identical(capsys):
    args = ["mu-certificate", "--d", "2", "--trials", "3", "--seed", "11"]
    _, out1, _ = run_cli(capsys, *args)
    _, out2, _ = run_cli(capsys, *args)
    assert out1 == out2


def test_jobs_do_not_change_the_report(capsys):
    base = ["shape", "--d", "1", "--trials", "4", "--seed", "5"]
    _, out1, _ = run_cli(capsys, *base, "--jobs", "1")
    _, out2, _ = run_cli(capsys, *base, "--jobs", "2")
    assert out1 == out2


def test_check_params_rejects_bad_zeta0(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(
        json.dumps(
            {
                "d": 1,
                "theta": ["1", "-1"],
                "theta_star": ["1", "-1"],
                "zeta": ["2", "1"],
            }
        )
    )
    code, out, err = run_cli(capsys, "check-params", "--input", str(bad))
    assert code == 1
    rep = json.loads(out)
    assert rep["overall"] is False
    failed = [c["id"] for c in rep["checks"] if not c["passed"]]
    assert "(ii) zeta_0=1" in failed


def test_check_params_accepts_valid_array(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(
        json.dumps(
            {
                "d": 1,
                "theta": ["1", "-1"],
                "theta_star": ["1", "-1"],
                "zeta": ["1", "1"],
            }
        )
    )
    code, out, _ = run_cli(capsys, "check-params", "--input", str(good))
    assert code == 0
    assert json.loads(out)["overall"] is True


def test_zz_enumerate_feasible_d2(capsys):
    code, out, err = run_cli(capsys, "zz", "enumerate", "--d", "2", "--feasible")
    assert code == 0
    expected = ["e*0", "e1 e*0", "e2 e*0", "e*1 e2 e*0"]
    words = [line for line in err.strip().splitlines() if line.startswith("e")]
    assert words == expected
    rep = json.loads(out)
    assert rep["overall"] is True
    words_check = next(c for c in rep["checks"] if c["id"] == "zz.words")
    assert json.loads(words_check["detail"]) == expected


def test_convex_subcommand(capsys):
    code, out, err = run_cli(capsys, "convex", "--r", "3")
    assert code == 0
    assert "[1]" in err and "[2, 1]" in err


def test_tds_roundtrip_subcommand(capsys):
    code, out, _ = run_cli(
        capsys, "tds", "roundtrip", "--d", "1", "--trials", "2", "--seed", "3"
    )
    assert code == 0
    assert json.loads(out)["command"] == "tds-roundtrip"


def test_tds_roundtrip_from_input_file(tmp_path, capsys):
    array = tmp_path / "array.json"
    array.write_text(
        json.dumps(
            {
                "d": 1,
                "theta": ["1", "-1"],
                "theta_star": ["1", "-1"],
                "zeta": ["1", "1"],
            }
        )
    )
    code, out, _ = run_cli(
        capsys, "tds", "roundtrip", "--input", str(array), "--field", "qq"
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["overall"] is True
    extracted = next(c for c in rep["checks"] if c["id"] == "tds.extracted")
    tds = json.loads(extracted["detail"])
    assert tds["diameter"] == 1
    assert tds["split"] == ["1", "1"]
    assert tds["sharp"] is True


def test_tds_roundtrip_requires_d_or_input(capsys):
    assert run_cli(capsys, "tds", "roundtrip")[0] == 2


def test_usage_error_exit_code(capsys):
    assert run_cli(capsys, "verify-appendix", "--nope")[0] == 2
    assert run_cli(capsys, "verify-appendix")[0] == 2  # missing --d
    assert run_cli(capsys, "no-such-command")[0] == 2


def test_prime_flag_rejected_for_rationals(capsys):
    code, _, err = run_cli(
        capsys, "verify-appendix", "--d", "0", "--field", "qq", "--prime", "7",
        "--trials", "1",
    )
    assert code == 2
    assert "--prime" in err


def test_output_flag_writes_report(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out, _ = run_cli(
        capsys, "shape", "--d", "0", "--trials", "1", "--output", str(target)
    )
    assert code == 0
    assert target.read_text().strip() == out.strip()


def test_failing_verification_exits_one(tmp_path, capsys):
    # a corrupted asset directory: flip one coefficient sign in the d=1 table
    from tdcheck.tables import bundled_table_text

    assets = tmp_path
    for d in range(6):
        (assets / f"d{d}.txt").write_text(bundled_table_text(d))
    (assets / "d1.txt").write_text(
        bundled_table_text(1).replace("ths1*r + y1*phi", "ths1*r - y1*phi")
    )
    code, out, _ = run_cli(
        capsys, "verify-appendix", "--d", "1", "--trials", "2", "--seed", "1",
        "--assets", str(assets),
    )
    assert code == 1
    assert json.loads(out)["overall"] is False
