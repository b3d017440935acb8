import json
from fractions import Fraction

import numpy as np
import pytest

from editwalk import EdgeSet, build_chain, complete_graph, simple_edit_weights
from editwalk.cli import main
from editwalk.serialize import read_csv, read_json, read_jsonl
from editwalk.verify import (
    check_row_stochastic,
    check_spectrum_multiset,
    run_verification,
)
from editwalk.spectral import TransitionMatrix, eigenvalues_simple


def write_config(tmp_path, name="config.json", **overrides):
    cfg = {
        "host": {"n": 3, "edges": [[0, 1], [1, 2]]},
        "model": {"name": "simple", "p": 0.25},
        "T": 20,
        "seed": 7,
        "thin": 1,
    }
    cfg.update(overrides)
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def test_simulate_writes_trajectory_and_summary(tmp_path):
    cfg = write_config(tmp_path)
    rc = main(["simulate", "--config", str(cfg), "--out", str(tmp_path)])
    assert rc == 0
    meta, records = read_jsonl(tmp_path / "trajectory.jsonl")
    assert meta["version"] and meta["host_hash"] and meta["seed"] == 7
    assert len(records) == 21
    assert records[0]["t"] == 0 and records[-1]["t"] == 20
    meta2, summary = read_json(tmp_path / "summary.json")
    assert summary["final_state"] == records[-1]["state"]
    assert len(summary["edge_counts"]) == 21


def test_simulate_zero_steps_writes_summary_only(tmp_path):
    cfg = write_config(tmp_path, T=0)
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert not (tmp_path / "trajectory.jsonl").exists()
    _, summary = read_json(tmp_path / "summary.json")
    assert summary["edge_counts"] == [0]


def test_simulate_is_deterministic(tmp_path):
    cfg = write_config(tmp_path, T=200)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    main(["simulate", "--config", str(cfg), "--out", str(out1)])
    main(["simulate", "--config", str(cfg), "--out", str(out2)])
    assert (out1 / "trajectory.jsonl").read_text() == (
        out2 / "trajectory.jsonl"
    ).read_text()
    # a different seed changes the walk
    out3 = tmp_path / "c"
    main(["simulate", "--config", str(cfg), "--out", str(out3), "--seed", "8"])
    assert (out1 / "trajectory.jsonl").read_text() != (
        out3 / "trajectory.jsonl"
    ).read_text()


def test_simulate_figure_scale_configuration(tmp_path):
    # K_100 with uniform edge probability runs through the simulation-only
    # path (m = 4950 far exceeds any enumeration cap) and is reproducible
    cfg = write_config(
        tmp_path,
        host={"preset": "complete", "params": [100]},
        model={"name": "simple", "p": 0.075},
        T=60,
        thin=10,
    )
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    assert main(["simulate", "--config", str(cfg), "--out", str(out1)]) == 0
    assert main(["simulate", "--config", str(cfg), "--out", str(out2)]) == 0
    assert (out1 / "trajectory.jsonl").read_text() == (
        out2 / "trajectory.jsonl"
    ).read_text()
    _, records = read_jsonl(out1 / "trajectory.jsonl")
    assert len(records) == 7  # t = 0, 10, ..., 60


def test_missing_host_is_validation_error(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"model": {"name": "simple", "p": 0.5}}))
    assert main(["simulate", "--config", str(path), "--out", str(tmp_path)]) == 1


def test_malformed_json_reports_position(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"host": }')
    assert main(["simulate", "--config", str(path)]) == 1
    assert "line 1" in capsys.readouterr().err


def test_unknown_model_rejected(tmp_path):
    cfg = write_config(tmp_path, model={"name": "nonsense"})
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 1


def test_spectrum_csv_simple(tmp_path):
    cfg = write_config(tmp_path)
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    meta, header, rows = read_csv(tmp_path / "spectrum.csv")
    assert header == ["flat", "size", "eigenvalue", "multiplicity"]
    assert [r[2] for r in rows] == ["0", "1/2", "1/2", "1"]
    assert {r[3] for r in rows} == {"1"}
    assert meta["host_hash"]
    # aggregated view in the header: value x total multiplicity, descending
    assert meta["by_value"] == "1x1; 0.5x2; 0x1"


def test_spectrum_json_moran(tmp_path):
    cfg = write_config(
        tmp_path,
        host={"preset": "complete", "params": [4]},
        model={"name": "moran"},
    )
    assert (
        main(
            ["spectrum", "--config", str(cfg), "--out", str(tmp_path),
             "--format", "json"]
        )
        == 0
    )
    meta, data = read_json(tmp_path / "spectrum.json")
    assert {entry["eigenvalue"] for entry in data} == {"0", "1/4", "1/2", "1"}


def test_stationary_rational(tmp_path):
    cfg = write_config(tmp_path, mode="rational")
    assert main(["stationary", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    meta, header, rows = read_csv(tmp_path / "stationary.csv")
    assert header == ["state", "pi"]
    values = {r[0]: r[1] for r in rows}
    assert values["0x0"] == "9/16"
    assert values["0x3"] == "1/16"


def test_mixing_curve_stays_under_bound(tmp_path):
    cfg = write_config(tmp_path)
    assert main(
        ["mixing", "--config", str(cfg), "--out", str(tmp_path), "--c", "1.0"]
    ) == 0
    meta, header, rows = read_csv(tmp_path / "mixing.csv")
    assert header == ["t", "tv", "bound"]
    assert int(meta["bound_steps"]) == 5
    final_t, final_tv, _ = rows[-1]
    assert int(final_t) == 5
    assert float(final_tv) <= np.exp(-1.0)


def test_mixing_compound_uses_chamber_sharpening(tmp_path):
    cfg = write_config(
        tmp_path,
        host={"preset": "complete", "params": [4]},
        model={"name": "moran"},
    )
    assert main(
        ["mixing", "--config", str(cfg), "--out", str(tmp_path), "--c", "1.0"]
    ) == 0
    meta, header, rows = read_csv(tmp_path / "mixing.csv")
    assert float(meta["lambda_star"]) == 0.5
    assert int(meta["chambers"]) > 0
    assert float(rows[-1][1]) <= np.exp(-1.0)


def test_commute_matrix_matches_library(tmp_path):
    cfg = write_config(tmp_path, mode="rational")
    assert main(["commute", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    meta, header, rows = read_csv(tmp_path / "commute.csv")
    assert header == ["state", "0x0", "0x1", "0x2", "0x3"]
    from editwalk import commute_time, from_edge_list

    g = from_edge_list(3, [(0, 1), (1, 2)])
    p = [Fraction(1, 4)] * 2
    for row in rows:
        a = EdgeSet(2, int(row[0], 16))
        for j, cell in enumerate(row[1:]):
            assert Fraction(cell) == commute_time(a, EdgeSet(2, j), g, p)


def test_commute_cap(tmp_path):
    cfg = write_config(
        tmp_path,
        host={"preset": "complete", "params": [6]},  # m = 15
        model={"name": "simple", "p": 0.5},
        caps={"commute_states": 64},
    )
    assert main(["commute", "--config", str(cfg), "--out", str(tmp_path)]) == 2


def test_export_dot_cycle5(tmp_path):
    cfg = write_config(
        tmp_path,
        host={"n": 5, "edges": [[0, 1], [1, 2], [2, 3], [3, 4], [0, 4]]},
        model={"name": "simple", "p": 0.5},
    )
    assert main(["export-dot", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    text = (tmp_path / "states.dot").read_text()
    assert text.startswith("// version:")
    assert sum(1 for line in text.splitlines() if line.endswith('";')) == 32


def test_export_dot_moran_restricted(tmp_path):
    cfg = write_config(
        tmp_path,
        host={"preset": "complete", "params": [4]},
        model={"name": "moran"},
    )
    assert main(["export-dot", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    text = (tmp_path / "states.dot").read_text()
    from editwalk import moran_weights, recurrent_class

    k4 = complete_graph(4)
    expected = len(recurrent_class(moran_weights(k4), k4))
    assert sum(1 for line in text.splitlines() if line.endswith('";')) == expected


def test_custom_model_notation(tmp_path):
    cfg = write_config(
        tmp_path,
        model={
            "name": "custom",
            "edits": [
                {"edit": "+0 -1", "weight": "1/2"},
                {"edit": "-0 +1", "weight": "1/2"},
            ],
        },
        mode="rational",
        initial="full",
    )
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    _, records = read_jsonl(tmp_path / "trajectory.jsonl")
    assert {r["state"] for r in records[1:]} <= {"0x1", "0x2"}


def test_intersection_model_host_is_implied(tmp_path):
    cfg = tmp_path / "inter.json"
    cfg.write_text(
        json.dumps(
            {
                "model": {"name": "intersection", "n": 2, "N": 2,
                          "mu": ["1/4", "1/2", "1/4"]},
                "T": 10,
                "seed": 1,
                "mode": "rational",
            }
        )
    )
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    _, _, rows = read_csv(tmp_path / "spectrum.csv")
    assert [r[2] for r in rows] == ["0", "1/2", "1/2", "1"]


class TestVerify:
    def test_simple_rational_all_exact(self, tmp_path, capsys):
        cfg = write_config(tmp_path, mode="rational")
        assert main(["verify", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert "eigenvector_residual: residual 0.000e+00" in out

    def test_random_double_host(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            host={"n": 5, "edges": [[0, 1], [1, 2], [2, 3], [3, 4], [0, 2], [1, 4]]},
            model={"name": "simple", "p": [0.3, 0.7, 0.4, 0.6, 0.5, 0.2]},
        )
        assert main(["verify", "--config", str(cfg)]) == 0
        assert "FAIL" not in capsys.readouterr().out

    def test_moran_verify(self, tmp_path, capsys):
        cfg = write_config(
            tmp_path,
            host={"preset": "complete", "params": [4]},
            model={"name": "moran"},
        )
        assert main(["verify", "--config", str(cfg)]) == 0
        out = capsys.readouterr().out
        assert "multiplicity_sum" in out and "FAIL" not in out

    def test_perturbed_matrix_fails_named_check(self):
        # negative control: a deliberately broken matrix must fail loudly
        g = complete_graph(3)
        tm = build_chain(simple_edit_weights(g, 0.4), g)
        entries = tm.entries.copy()
        entries[0, 0] += 1e-3
        bad = TransitionMatrix(tm.states, entries, False)
        result = check_row_stochastic(bad)
        assert not result.passed and result.name == "row_stochastic"
        report = eigenvalues_simple(g.m)
        result2 = check_spectrum_multiset(report, bad)
        assert not result2.passed and result2.name == "spectrum_multiset"

    def test_run_verification_collects_all_checks(self):
        g = complete_graph(3)
        dist = simple_edit_weights(g, [Fraction(1, 3)] * 3)
        results = run_verification(g, dist, p=[Fraction(1, 3)] * 3)
        names = {r.name for r in results}
        assert {
            "row_stochastic",
            "stationary_fixed_point",
            "detailed_balance",
            "eigenvector_residual",
            "orthonormality",
            "q_symmetry",
            "spectrum_multiset",
            "commute_backends",
            "closure_idempotent",
        } <= names
        assert all(r.passed for r in results)


def test_usage_error_exits_one():
    with pytest.raises(SystemExit) as exc:
        main(["simulate"])  # missing --config
    assert exc.value.code == 1


def test_raising_caps_needs_explicit_flag(tmp_path):
    cfg = write_config(tmp_path, caps={"states": 1 << 22})
    assert main(["spectrum", "--config", str(cfg), "--out", str(tmp_path)]) == 1
    assert (
        main(
            ["spectrum", "--config", str(cfg), "--out", str(tmp_path),
             "--cap-states", str(1 << 22)]
        )
        == 0
    )


def test_transient_initial_state_warns(tmp_path, capsys):
    # the full graph is cyclic, so it sits outside the recurrent class of
    # the neighborhood-resampling walk: the CLI should say so once
    cfg = write_config(
        tmp_path,
        host={"preset": "complete", "params": [4]},
        model={"name": "moran"},
        initial="full",
        T=5,
    )
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path)]) == 0
    assert "recurrent class" in capsys.readouterr().err

    simple_cfg = write_config(tmp_path, name="simple.json", T=5)
    assert main(["simulate", "--config", str(simple_cfg), "--out", str(tmp_path)]) == 0
    assert "recurrent class" not in capsys.readouterr().err


def test_serialize_round_trips(tmp_path):
    from editwalk.serialize import write_csv, write_json, write_jsonl

    meta = {"version": "0.1.0", "seed": 3, "host_hash": "abc"}
    write_csv(tmp_path / "t.csv", meta, ["a", "b"], [[1, "x"], [2, "y"]])
    m, header, rows = read_csv(tmp_path / "t.csv")
    assert m == {k: str(v) for k, v in meta.items()}
    assert header == ["a", "b"] and rows == [["1", "x"], ["2", "y"]]

    write_json(tmp_path / "t.json", meta, {"k": [1, 2]})
    m2, payload = read_json(tmp_path / "t.json")
    assert m2 == meta and payload == {"k": [1, 2]}

    write_jsonl(tmp_path / "t.jsonl", meta, [{"t": 0}, {"t": 1}])
    m3, records = read_jsonl(tmp_path / "t.jsonl")
    assert m3 == meta and records == [{"t": 0}, {"t": 1}]
