import csv

import pytest

from uamm_lab import cli

QUOTE_ARGS = [
    "quote", "--k", "2", "--probs", "0.5,0.5", "--funding", "10000",
    "--outcome", "1", "--wager", "10",
]

SMALL_CFG = (
    "k = 2\nprobs = 0.5,0.5\nn_bets = 50\nn_markets = 3\nseed = 5\n"
)


def write_cfg(tmp_path, text=SMALL_CFG, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_quote_reference_value(capsys):
    assert cli.main(QUOTE_ARGS) == 0
    out = capsys.readouterr().out
    assert "odd            19.990010" in out
    assert "decimal odds   1.999001" in out


def test_quote_zero_wager(capsys):
    args = QUOTE_ARGS[:-1] + ["0"]
    assert cli.main(args) == 0
    assert "odd            0.000000" in capsys.readouterr().out


def test_quote_csv_format(capsys):
    assert cli.main(QUOTE_ARGS + ["--format", "csv"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    header = lines[0].split(",")
    assert header[0] == "engine"
    assert "odd" in header


def test_quote_rejects_bad_probabilities(capsys):
    args = ["quote", "--k", "2", "--probs", "0.5,0.6", "--funding", "10000",
            "--outcome", "1", "--wager", "10"]
    assert cli.main(args) == 1
    assert "error" in capsys.readouterr().err


def test_quote_rejects_mismatched_prob_count(capsys):
    args = ["quote", "--k", "2", "--probs", "0.5", "--funding", "10000",
            "--outcome", "1", "--wager", "10"]
    assert cli.main(args) == 1


def test_unknown_flag_exits_one(capsys):
    assert cli.main(QUOTE_ARGS + ["--frobnicate"]) == 1


def test_missing_subcommand_exits_one():
    assert cli.main([]) == 1


def test_simulate_single_outputs(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", cfg, "--mode", "single",
                     "--out", str(out)]) == 0
    for name in ("bets.csv", "markets.csv", "summary.csv",
                 "plot_single_market.csv"):
        assert (out / name).exists(), name
    traj = read_rows(out / "plot_single_market.csv")
    assert len(traj) == 50
    assert set(traj[0]) == {"step", "balance_1", "balance_2",
                            "rejected_cum", "eip"}


def test_simulate_multi_outputs(tmp_path, capsys):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", cfg, "--mode", "multi",
                     "--out", str(out)]) == 0
    markets = read_rows(out / "markets.csv")
    assert len(markets) == 3
    summary = read_rows(out / "summary.csv")
    assert summary[0]["mode"] == "multi"
    assert summary[0]["engine"] == "uamm"
    bets = read_rows(out / "bets.csv")
    assert len(bets) == 150
    plot = read_rows(out / "plot_markets.csv")
    assert len(plot) == 3


def test_simulate_full_mode_defaults(tmp_path, capsys):
    out = tmp_path / "out"
    assert cli.main(["simulate", "--mode", "full", "--seed", "2",
                     "--out", str(out)]) == 0
    summary = read_rows(out / "summary.csv")[0]
    for col in ("total_bets", "volume", "epp_mean", "epp_plus_fee"):
        assert col in summary
    line = capsys.readouterr().out
    assert "total_bets=" in line


def test_simulate_sweep_outputs(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "n_bets = 20\nn_markets = 4\nseed = 1\n")
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", cfg, "--mode", "sweep",
                     "--out", str(out)]) == 0
    rows = read_rows(out / "plot_prob_sweep.csv")
    assert len(rows) == 14  # 7 probabilities x 2 side modes
    probs = sorted({r["prob"] for r in rows})
    assert probs == ["0.2", "0.3", "0.4", "0.5", "0.6", "0.7", "0.8"]
    assert {r["side_mode"] for r in rows} == {"true-prob", "uniform"}
    rej = read_rows(out / "plot_rejection_sweep.csv")
    assert [r["threshold"] for r in rej] == ["0.025", "0.035", "0.045",
                                             "0.065", "1.0"]
    bands = read_rows(out / "sweep_bands.csv")
    assert {b["side_mode"] for b in bands} == {"true-prob", "uniform"}
    assert "declared band" in capsys.readouterr().out


def test_simulate_unknown_config_key(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "bankroll = 7\n")
    assert cli.main(["simulate", "--config", cfg]) == 1
    assert "bankroll" in capsys.readouterr().err


def test_simulate_missing_config_file(tmp_path):
    assert cli.main(["simulate", "--config", str(tmp_path / "nope.cfg")]) == 1


def test_engine_override(tmp_path):
    cfg = write_cfg(tmp_path)
    out = tmp_path / "out"
    assert cli.main(["simulate", "--config", cfg, "--engine", "cpmm",
                     "--out", str(out)]) == 0
    assert read_rows(out / "summary.csv")[0]["engine"] == "cpmm"


def test_seed_precedence_env_over_flag_over_config(tmp_path, monkeypatch):
    cfg = write_cfg(tmp_path)

    def summary_seed(out):
        return read_rows(out / "summary.csv")[0]["seed"]

    out1 = tmp_path / "o1"
    cli.main(["simulate", "--config", cfg, "--out", str(out1)])
    assert summary_seed(out1) == "5"  # from config

    out2 = tmp_path / "o2"
    cli.main(["simulate", "--config", cfg, "--seed", "8", "--out", str(out2)])
    assert summary_seed(out2) == "8"  # flag beats config

    monkeypatch.setenv("UAMM_LAB_SEED", "13")
    out3 = tmp_path / "o3"
    cli.main(["simulate", "--config", cfg, "--seed", "8", "--out", str(out3)])
    assert summary_seed(out3) == "13"  # env beats flag


def test_same_seed_twice_is_byte_identical(tmp_path):
    cfg = write_cfg(tmp_path)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    cli.main(["simulate", "--config", cfg, "--out", str(out1)])
    cli.main(["simulate", "--config", cfg, "--out", str(out2)])
    for name in ("bets.csv", "markets.csv", "summary.csv", "plot_markets.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_probe_default_runs_both_suites(capsys):
    assert cli.main(["probe"]) == 0
    out = capsys.readouterr().out
    assert "liquidity properties" in out
    assert "continuity" in out


def test_probe_properties_only(capsys):
    assert cli.main(["probe", "--properties"]) == 0
    out = capsys.readouterr().out
    assert "continuity" not in out


def test_console_script_is_registered():
    import importlib.metadata as md

    eps = md.entry_points(group="console_scripts")
    assert any(ep.name == "uamm-lab" for ep in eps)
