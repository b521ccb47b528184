import json

import numpy as np

from warpknot.cli import main


def run(args):
    return main(args)


def test_build_writes_reports(tmp_path):
    out = tmp_path / "b"
    code = run(["build", "-m", "2", "-n", "3", "--rho", "0.25",
                "--out", str(out), "--no-figures"])
    assert code == 0
    metric = json.loads((out / "metric.json").read_text())
    assert metric["m"] == 2 and metric["n"] == 3
    report = json.loads((out / "warp_report.json").read_text())
    assert report["f"]["passed"] and report["h"]["passed"]
    assert max(report["f"]["seam_jumps_a"]) < 1e-8


def test_build_round_notice(tmp_path, capsys):
    code = run(["build", "-m", "1", "-n", "1", "--out", str(tmp_path / "r"),
                "--no-figures"])
    assert code == 0
    assert "round metric" in capsys.readouterr().out


def test_build_rejects_non_coprime(tmp_path):
    code = run(["build", "-m", "2", "-n", "4", "--out", str(tmp_path / "x"),
                "--no-figures"])
    assert code == 2


def test_usage_error_is_exit_1(tmp_path):
    assert run(["build", "--rho", "not-a-number"]) == 1
    assert run(["knot", "--unknown-flag"]) == 1
    assert run(["build", "--rho", "2.0", "--no-figures"]) == 1  # out of range


def test_certify_ok(tmp_path):
    out = tmp_path / "c"
    code = run(["certify", "-m", "2", "-n", "3", "--rho", "0.25",
                "--out", str(out), "--oracle-samples", "60", "--no-figures"])
    assert code == 0
    summary = json.loads((out / "certify.json").read_text())
    assert summary["passed"] and summary["min_curvature"] > 0
    data = np.genfromtxt(out / "curvature.csv", delimiter=",", names=True)
    assert set(data.dtype.names) == {"r", "K23", "K13", "K12"}
    assert np.all(data["K12"] > 0)


def test_certify_corruption_hook_fails_positivity(tmp_path):
    out = tmp_path / "bad"
    code = run(["certify", "-m", "2", "-n", "3", "--rho", "0.25",
                "--out", str(out), "--oracle-samples", "5", "--corrupt-warp",
                "--no-figures"])
    assert code == 3
    summary = json.loads((out / "certify.json").read_text())
    assert summary["min_curvature"] < 0


def test_knot_pipeline(tmp_path):
    out = tmp_path / "k"
    code = run(["knot", "-m", "2", "-n", "3", "--rho", "0.25",
                "--out", str(out), "--format", "csv,json,obj", "--no-figures"])
    assert code == 0
    info = json.loads((out / "knot.json").read_text())
    assert info["knot"]["label"] == "T(2,3)"
    assert info["windings"] == [3, 2]
    assert abs(info["period"] - 2 * np.pi) < 1e-6
    assert info["geodesic_residual"] < 1e-6
    header = (out / "curve_hopf.csv").read_text().splitlines()[0]
    assert header == "s,r,theta_unwrapped,t_unwrapped,x,y,z"
    obj = (out / "curve_hopf.obj").read_text().splitlines()
    assert obj[0].startswith("v ") and obj[-1].startswith("l ")


def test_knot_conjugated_mirror(tmp_path):
    out = tmp_path / "km"
    code = run(["knot", "-m", "2", "-n", "3", "--rho", "0.25", "--conjugated",
                "--out", str(out), "--no-figures"])
    assert code == 0
    info = json.loads((out / "knot.json").read_text())
    assert info["windings"] == [-3, 2]
    assert info["knot"]["label"] == "T(2,-3)"
    assert info["knot"]["mirror_label"] == "T(2,3)"


def test_knot_collar_violation_exit_1(tmp_path):
    code = run(["knot", "-m", "2", "-n", "3", "--lambda-re", "1e6",
                "--out", str(tmp_path / "cv"), "--no-figures"])
    assert code == 1


def test_census_rows_and_determinism(tmp_path):
    args = ["census", "-m", "2", "-n", "3", "--rho", "0.25",
            "--p-max", "4", "--q-max", "3", "--no-figures"]
    out1, out2 = tmp_path / "c1", tmp_path / "c2"
    assert run(args + ["--out", str(out1)]) == 0
    assert run(args + ["--out", str(out2)]) == 0
    assert (out1 / "census.csv").read_bytes() == (out2 / "census.csv").read_bytes()
    assert (out1 / "census.json").read_bytes() == (out2 / "census.json").read_bytes()
    rows = {(r["p"], r["q"]): r for r in json.loads((out1 / "census.json").read_text())["rows"]}
    assert rows[(3, 2)]["kind"] == "band"
    assert rows[(1, 1)]["kind"] == "root"
    assert rows[(4, 1)]["kind"] == "none"
    assert rows[(0, 1)]["kind"] == "none"


def test_certify_determinism(tmp_path):
    args = ["certify", "-m", "2", "-n", "3", "--rho", "0.25", "--seed", "7",
            "--oracle-samples", "40", "--no-figures"]
    out1, out2 = tmp_path / "d1", tmp_path / "d2"
    assert run(args + ["--out", str(out1)]) == 0
    assert run(args + ["--out", str(out2)]) == 0
    assert (out1 / "certify.json").read_bytes() == (out2 / "certify.json").read_bytes()
    assert (out1 / "curvature.csv").read_bytes() == (out2 / "curvature.csv").read_bytes()


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"m": 2, "n": 4, "rho": 0.25}))
    # config alone is rejected (non-coprime), flag override fixes it
    assert run(["build", "--config", str(cfg), "--out", str(tmp_path / "c1"),
                "--no-figures"]) == 2
    assert run(["build", "--config", str(cfg), "-n", "3",
                "--out", str(tmp_path / "c2"), "--no-figures"]) == 0


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(["build", "--config", str(cfg), "--no-figures"]) == 1


def test_geodesic_subcommand(tmp_path):
    out = tmp_path / "g"
    code = run(["geodesic", "-m", "2", "-n", "3", "--rho", "0.25",
                "--length", "10", "--r0", "0.7", "--vr", "0.2",
                "--vtheta", "1.0", "--vt", "1.0", "--out", str(out),
                "--no-figures"])
    assert code == 0
    cons = json.loads((out / "conservation.json").read_text())
    assert cons["passed"] and cons["max_drift"] < 1e-8
    header = (out / "trajectory.csv").read_text().splitlines()[0]
    assert header == "s,r,theta,t,vr,vtheta,vt,E,p_theta,p_t"
    data = np.genfromtxt(out / "trajectory.csv", delimiter=",", names=True)
    assert np.max(np.abs(data["E"] - 1.0)) < 1e-8


def test_geodesic_core_approach_exit_4(tmp_path):
    code = run(["geodesic", "-m", "2", "-n", "3", "--length", "3",
                "--r0", "0.4", "--vr", "-1.0", "--vtheta", "0", "--vt", "0",
                "--out", str(tmp_path / "gc"), "--no-figures"])
    assert code == 4


def test_figures_rendered(tmp_path):
    out = tmp_path / "fig"
    assert run(["build", "-m", "2", "-n", "3", "--out", str(out)]) == 0
    png = out / "warp_profile.png"
    assert png.exists() and png.stat().st_size > 1000
