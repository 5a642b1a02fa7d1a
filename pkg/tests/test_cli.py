"""End-to-end checks of the command line driver.

Everything runs in-process through quatlat.cli.main so exit codes and
output bytes are exactly what a shell user would see.
"""

import json
import math
from fractions import Fraction

import pytest

from quatlat import eichler_order
from quatlat.cli import ZBox, main, parse_factored, sample_points
from quatlat.errors import UsageError


def run_cli(args, tmp_path, name="out.txt"):
    out = tmp_path / name
    code = main(list(args) + ["--out", str(out)])
    text = out.read_text() if out.exists() else ""
    return code, text


def write_order_file(path, lat):
    dens = [c.denominator for q in lat.basis_quats() for c in q.coords()]
    den = math.lcm(*dens)
    mat = [int(c * den) for q in lat.basis_quats() for c in q.coords()]
    path.write_text(json.dumps({"mat": mat, "den": den}))


def test_parse_factored_round_trip():
    assert parse_factored("1") == {}
    assert parse_factored("  ") == {}
    assert parse_factored("2^3*3") == {2: 3, 3: 1}
    assert parse_factored("2*2") == {2: 2}  # repeats accumulate
    with pytest.raises(UsageError):
        parse_factored("x^2")
    with pytest.raises(UsageError):
        parse_factored("0^2")
    with pytest.raises(UsageError):
        parse_factored("5^-1")


def test_sample_points_are_deterministic_and_in_box():
    box = ZBox(-0.5, 0.5, 0.8, 1.2)
    a = sample_points(box, 12, seed=7)
    b = sample_points(box, 12, seed=7)
    assert a == b
    c = sample_points(box, 12, seed=8)
    assert a != c
    for z in a:
        assert box.x_min <= z.x <= box.x_max
        assert box.y_min <= z.y <= box.y_max


def test_count_identical_across_thread_counts(tmp_path):
    outputs = []
    for threads in (1, 4, 8):
        code, text = run_cli(
            ["count", "--seed", "7", "--lmax", "6", "--threads", str(threads)],
            tmp_path,
            name=f"count{threads}.csv",
        )
        assert code == 0
        outputs.append(text)
    assert outputs[0] == outputs[1] == outputs[2]


def test_count_seed_changes_rows(tmp_path):
    _, a = run_cli(["count", "--seed", "1", "--lmax", "4"], tmp_path, "a.csv")
    _, b = run_cli(["count", "--seed", "1", "--lmax", "4"], tmp_path, "b.csv")
    _, c = run_cli(["count", "--seed", "2", "--lmax", "4"], tmp_path, "c.csv")
    assert a == b
    assert a != c


def test_count_csv_shape_and_bound_column(tmp_path):
    code, text = run_cli(["count", "--seed", "3", "--lmax", "6"], tmp_path)
    assert code == 0
    lines = text.splitlines()
    meta = [l for l in lines if l.startswith("#")]
    assert len(meta) == 3 or len(meta) == 4
    header = lines[len(meta)]
    assert header.split(",")[0] == "run_id"
    rows = lines[len(meta) + 1 :]
    assert len(rows) == 4  # default sample count
    for row in rows:
        cells = row.split(",")
        assert cells[0].startswith("3-")
        total, bound = int(cells[12]), int(cells[13])
        assert 0 <= total <= bound
        assert float(cells[14]) == total / bound
        assert float(cells[15]) == 0.0  # no --timing, so wall time is blanked


def test_count_config_rationals_and_squares(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "algebra": {"p": 3, "q": -1},
                "delta": "1/2",
                "z_box": ["-1/4", "1/4", "9/10", "23/20"],
                "sweep": {"l_max": 5, "samples": 2, "seed": 11},
            }
        )
    )
    code, text = run_cli(["count", "--config", str(cfg), "--squares"], tmp_path)
    assert code == 0
    assert "seed=11 delta=0.5" in text
    assert "z_box=(-0.25,0.25,0.9,1.15)" in text
    rows = [l for l in text.splitlines() if not l.startswith(("#", "run_id"))]
    assert len(rows) == 2
    assert all(r.split(",")[7] == "1" for r in rows)  # squares_only flag column


def test_algebra_and_order_reports(tmp_path):
    code, text = run_cli(["algebra"], tmp_path)
    assert code == 0
    assert "algebra: (3, -1)" in text
    assert "ramified: [2, 3]" in text
    assert "discriminant: 6" in text

    code, text = run_cli(["order"], tmp_path)
    assert code == 0
    assert "level: 1" in text
    assert "is_order: True" in text
    assert "is_balanced: True" in text


def test_exponent_maingen_frozen_value(tmp_path):
    code, text = run_cli(
        ["exponent", "--n", "2^4*3^4", "--mode", "maingen"], tmp_path
    )
    assert code == 0
    assert "branch: N^(1/3)" in text
    assert "value^24: 7958661109946400884391936" in text
    assert str((2**4 * 3**4) ** 8) == "7958661109946400884391936"


def test_exponent_newform_mode(tmp_path):
    code, text = run_cli(
        ["exponent", "--n", "2^4", "--mode", "newform", "--m", "1"], tmp_path
    )
    assert code == 0
    assert "branch: C'^(-1/24) * lcm(M,C1)^(1/2)" in text
    assert f"value^24: {2**24}" in text


def test_amp_command_fixed_window(tmp_path):
    code, text = run_cli(["amp", "--lambda", "5"], tmp_path)
    assert code == 0
    assert "primes: (5, 7)" in text
    assert "y[1] = 4" in text
    assert "y[25] = " in text
    assert "y[1225] = " in text

    sat = tmp_path / "satake.json"
    sat.write_text(json.dumps({"5": "2", "7": "3/2"}))
    code, text = run_cli(
        ["amp", "--lambda", "5", "--satake", str(sat)], tmp_path, "amp2.txt"
    )
    assert code == 0
    assert "eigenvalue: " in text
    assert ">= |P|^2/8" in text


def test_coprime_from_file_with_comments(tmp_path):
    infile = tmp_path / "problems.txt"
    infile.write_text("# header comment\n\n0,1;6;2;10\n")
    code, text = run_cli(["coprime", "--in", str(infile)], tmp_path)
    assert code == 0
    assert text == "1 5\n"


def test_coprime_bad_line_is_usage_error(tmp_path):
    infile = tmp_path / "problems.txt"
    infile.write_text("0,1\n")
    code, _ = run_cli(["coprime", "--in", str(infile)], tmp_path)
    assert code == 1


def test_usage_errors_exit_1(tmp_path):
    code, _ = run_cli(["exponent", "--n", "x^2"], tmp_path)
    assert code == 1

    cfg = tmp_path / "broken.json"
    cfg.write_text("{not json")
    code, _ = run_cli(["count", "--config", str(cfg)], tmp_path, "x.csv")
    assert code == 1

    cfg2 = tmp_path / "badbox.json"
    cfg2.write_text(json.dumps({"z_box": [0, 1, 2]}))
    code, _ = run_cli(["count", "--config", str(cfg2)], tmp_path, "y.csv")
    assert code == 1

    code, _ = run_cli(["count", "--threads", "0"], tmp_path, "z.csv")
    assert code == 1

    missing = tmp_path / "nowhere.json"
    code, _ = run_cli(["amp", "--lambda", "5", "--satake", str(missing)], tmp_path)
    assert code == 1
    code, _ = run_cli(["balance", "--order", str(missing)], tmp_path)
    assert code == 1
    code, _ = run_cli(["coprime", "--in", str(missing)], tmp_path)
    assert code == 1


def test_balance_round_trip_and_exhaustion(tmp_path, mo):
    lat = eichler_order(mo, 25)[0]
    order_file = tmp_path / "order25.json"
    write_order_file(order_file, lat)

    code, text = run_cli(
        ["balance", "--order", str(order_file), "--kmax", "2", "--height", "8"],
        tmp_path,
    )
    assert code == 0
    assert "(nrd 5)" in text
    assert "balanced: True" in text

    # a unit-height search cannot reach the norm-5 conjugator
    code, _ = run_cli(
        ["balance", "--order", str(order_file), "--kmax", "1", "--height", "1"],
        tmp_path,
        "bal2.txt",
    )
    assert code == 3


def test_out_file_is_only_written_on_success(tmp_path):
    out = tmp_path / "never.csv"
    code = main(["exponent", "--n", "x^2", "--out", str(out)])
    assert code == 1
    assert not out.exists()
