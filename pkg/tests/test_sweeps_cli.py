import json
import time

import pytest

import casimir_sc.sweeps as sweeps_mod
from casimir_sc.cli import main as cli_main
from casimir_sc.errors import ConfigError, ConvergenceError, DomainError
from casimir_sc.lifshitz import EngineConfig
from casimir_sc.materials import LEAD, default_gap, mattis_bardeen_g
from casimir_sc.sc_state import ModulationSpec, shifted_tc
from casimir_sc.sweeps import (
    RunConfig,
    SweepSpec,
    g_function_table,
    load_config,
    point_eval,
    render_rows,
    run_sweep,
    waveform_samples,
)

COARSE = EngineConfig(rel_tol_quadrature=1e-6, rel_tol_series=1e-6)


def coarse_config(**kwargs) -> RunConfig:
    base = RunConfig(engine=COARSE, compute_full=False)
    from dataclasses import replace
    return replace(base, **kwargs)


# ---------------------------------------------------------------------------
# configuration


def test_defaults_are_paper_values():
    cfg = load_config()
    assert cfg.material_a.rrr == 1.0 and cfg.material_b.rrr == 2.0
    assert cfg.radius_um == 150.0 and cfg.gap_nm == 70.0
    assert cfg.field_oe == 200.0
    assert cfg.sweep == SweepSpec("field_Oe", 25.0, 775.0, 31)
    assert cfg.engine == EngineConfig()


def test_gap_sweep_defaults():
    cfg = load_config(overrides={"sweep_variable": "gap_nm"})
    assert cfg.sweep == SweepSpec("gap_nm", 40.0, 300.0, 27)


def test_config_file_parsing(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\nradius_um = 100\ngap_nm=90  # inline\nrrr_pb=3\n")
    cfg = load_config(str(path))
    assert cfg.radius_um == 100.0 and cfg.gap_nm == 90.0
    assert cfg.material_b.rrr == 3.0


def test_config_file_unknown_key_has_line_number(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("radius_um=100\nbogus_key=1\n")
    with pytest.raises(ConfigError, match=r":2: unknown key 'bogus_key'"):
        load_config(str(path))


def test_config_file_malformed_line(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("radius_um=100\njust words\n")
    with pytest.raises(ConfigError, match=r":2"):
        load_config(str(path))


def test_config_file_bad_number(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("gap_nm=wide\n")
    with pytest.raises(ConfigError, match="gap_nm"):
        load_config(str(path))


def test_validation_names_the_field():
    with pytest.raises(ConfigError, match="rrr_pb"):
        load_config(overrides={"rrr_pb": 0.5})
    with pytest.raises(ConfigError, match="field sweep"):
        load_config(overrides={"sweep_stop": 900.0})
    with pytest.raises(ConfigError, match="sweep_points"):
        load_config(overrides={"sweep_points": 1})
    with pytest.raises(ConfigError, match="gap_nm"):
        load_config(overrides={"gap_nm": 5.0})
    with pytest.raises(ConfigError, match="format"):
        load_config(overrides={"format": "xml"})
    with pytest.raises(ConfigError, match="temperature_k"):
        load_config(overrides={"temperature_k": 9.0})


def test_flags_override_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("gap_nm=90\nradius_um=100\n")
    cfg = load_config(str(path), overrides={"gap_nm": 120.0})
    assert cfg.gap_nm == 120.0 and cfg.radius_um == 100.0


# ---------------------------------------------------------------------------
# sweeps


def small_field_cfg(points=3):
    return coarse_config(sweep=SweepSpec("field_Oe", 150.0, 250.0, points))


def test_sweep_rows_ordered_and_converged():
    rows = run_sweep(small_field_cfg())
    assert [r.x for r in rows] == [150.0, 200.0, 250.0]
    assert all(r.error is None for r in rows)
    assert all(r.delta_f_fn > 0.0 for r in rows)
    assert rows[0].delta_f_fn < rows[1].delta_f_fn < rows[2].delta_f_fn
    assert rows[1].t_prime_c_k == pytest.approx(6.24, abs=0.01)


def test_sweep_concurrent_rows_identical(monkeypatch):
    cfg = small_field_cfg()
    rows_serial = run_sweep(cfg)
    monkeypatch.setenv("CASIMIR_SC_THREADS", "4")
    rows_parallel = run_sweep(cfg)
    assert render_rows(cfg, rows_serial) == render_rows(cfg, rows_parallel)


def test_sweep_cross_consistency():
    field_cfg = small_field_cfg()
    gap_cfg = coarse_config(sweep=SweepSpec("gap_nm", 60.0, 80.0, 3), field_oe=200.0)
    row_f = run_sweep(field_cfg)[1]   # H = 200 Oe at d = 70 nm
    row_g = run_sweep(gap_cfg)[1]     # d = 70 nm at H = 200 Oe
    assert row_f.delta_f_fn == pytest.approx(row_g.delta_f_fn, rel=1e-9)


def test_sweep_records_failures_and_continues(monkeypatch):
    real = sweeps_mod.delta_force_pfa

    def flaky(mat_a, mat_b, radius, temperature, d, engine, **kwargs):
        if abs(d - 70.0) < 1e-9:
            raise ConvergenceError("synthetic stall", error_estimate=1.0)
        return real(mat_a, mat_b, radius, temperature, d, engine, **kwargs)

    monkeypatch.setattr(sweeps_mod, "delta_force_pfa", flaky)
    cfg = coarse_config(sweep=SweepSpec("gap_nm", 60.0, 80.0, 3))
    rows = run_sweep(cfg)
    assert rows[1].error is not None and "synthetic stall" in rows[1].error
    assert rows[0].error is None and rows[2].error is None
    text = render_rows(cfg, rows)
    assert "# FAILED x=7.0e+01 error=synthetic stall" in text
    assert "# rows_converged=2/3" in text


def test_temperature_sweep_variable():
    cfg = coarse_config(sweep=SweepSpec("temperature_K", 4.0, 6.0, 2))
    rows = run_sweep(cfg)
    assert all(r.error is None for r in rows)
    assert rows[0].delta_f_fn > rows[1].delta_f_fn > 0.0


# ---------------------------------------------------------------------------
# output rendering


def test_csv_layout_and_determinism():
    cfg = small_field_cfg()
    rows = run_sweep(cfg)
    text = render_rows(cfg, rows)
    lines = text.splitlines()
    assert lines[0] == "# casimir-sc v0.1.0"
    assert any(line == "# constants_version=1" for line in lines)
    header_idx = lines.index(
        "x,t_prime_c_K,delta_f_fN,f_normal_eV_nm2,f_super_eV_nm2,terms_used,pfa_bound")
    data = [ln for ln in lines[header_idx + 1:] if not ln.startswith("#")]
    assert len(data) == 3
    for ln in data:
        fields = ln.split(",")
        assert len(fields) == 7
        float(fields[0]); float(fields[1]); float(fields[2])
    # a second full evaluation reproduces the exact bytes
    assert render_rows(cfg, run_sweep(cfg)) == text


def test_json_rendering():
    cfg = coarse_config(sweep=SweepSpec("field_Oe", 150.0, 250.0, 2),
                        output_format="json")
    rows = run_sweep(cfg)
    text = render_rows(cfg, rows)
    payload = json.loads(text)
    assert payload["rows_converged"] == 2
    assert payload["config"]["sweep_variable"] == "field_Oe"
    assert len(payload["rows"]) == 2
    assert render_rows(cfg, rows) == text


# ---------------------------------------------------------------------------
# point evaluation


def test_point_reports_shifted_tc_fast():
    cfg = coarse_config()
    point_eval(cfg, include_force=False)  # warm up
    t0 = time.perf_counter()
    result = point_eval(cfg, include_force=False)
    elapsed = time.perf_counter() - t0
    assert result["t_prime_c_K"] == pytest.approx(6.24, abs=0.01)
    assert elapsed < 1e-3


def test_point_with_force():
    cfg = coarse_config()
    result = point_eval(cfg)
    assert result["delta_f_fN"] == pytest.approx(18.58, rel=1e-2)
    assert result["pfa_bound"] == pytest.approx(4.67e-4, rel=1e-2)
    assert "f_normal_eV_nm2" not in result  # compute_full disabled


# ---------------------------------------------------------------------------
# g-function table


def test_g_function_table_layout_and_ordering():
    cfg = coarse_config()
    grid = [0.25, 1.0, 10.0, 100.0]
    text = g_function_table(cfg, [0.1, 0.9], grid=grid)
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    assert lines[0] == "xi_over_2delta0,g_t1.0e-01,g_t9.0e-01"
    rows = [list(map(float, ln.split(","))) for ln in lines[1:]]
    assert len(rows) == 4
    for _, g_cold, g_warm in rows:
        assert g_cold >= g_warm >= 0.0
    # decay: by xi/2D0 = 100 both columns sit below 2.5% of the static
    # limit (the logarithmic tail reaches the 1% level near 240 * 2D0;
    # see the acceptance notes on the decay-bound criterion)
    gap = default_gap(LEAD.tc)
    for col, tfrac in ((1, 0.1), (2, 0.9)):
        g0 = mattis_bardeen_g(LEAD, gap, 1e-8, tfrac * LEAD.tc)
        assert rows[-1][col] < 2.5e-2 * g0


def test_g_function_rejects_tc():
    cfg = coarse_config()
    with pytest.raises(DomainError):
        g_function_table(cfg, [1.0])
    with pytest.raises(DomainError):
        g_function_table(cfg, [0.0])


# ---------------------------------------------------------------------------
# waveform sampling


def test_waveform_phases_and_levels():
    cfg = coarse_config()
    spec = ModulationSpec(base_temperature=shifted_tc(LEAD, 200.0), h=20.0,
                          frequency=300.0)
    text = waveform_samples(cfg, spec, 4)
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    assert lines[0] == "t_s,H_Oe,phase,F_fN"
    rows = [ln.split(",") for ln in lines[1:]]
    assert [r[2] for r in rows] == ["normal", "normal",
                                    "superconducting", "superconducting"]
    forces = [float(r[3]) for r in rows]
    assert len(set(forces)) == 2
    jump = forces[0] - forces[-1]
    header = [ln for ln in text.splitlines() if ln.startswith("# mean_force_fN")][0]
    mean_decl = float(header.split("mean_force_fN=")[1].split(" ")[0])
    jump_decl = float(header.split("delta_f_fN=")[1])
    assert jump == pytest.approx(jump_decl, rel=1e-12)
    assert sum(forces) / len(forces) == pytest.approx(mean_decl, rel=1e-12)


def test_waveform_needs_even_samples():
    cfg = coarse_config()
    spec = ModulationSpec(base_temperature=5.0, h=10.0, frequency=100.0)
    with pytest.raises(DomainError):
        waveform_samples(cfg, spec, 5)


# ---------------------------------------------------------------------------
# CLI


def test_cli_point_skip_force(tmp_path, capsys):
    code = cli_main(["point", "--skip-force"])
    out = capsys.readouterr().out
    assert code == 0
    assert "t_prime_c_K=6.235382907247958e+00" in out


def test_cli_sweep_writes_file(tmp_path):
    out = tmp_path / "sweep.csv"
    code = cli_main(["sweep-field", "--start", "150", "--stop", "250",
                     "--points", "2", "--no-full", "--rel-tol", "1e-6",
                     "--output", str(out)])
    assert code == 0
    text = out.read_text()
    assert text.startswith("# casimir-sc v0.1.0\n")
    assert "# rows_converged=2/2" in text


def test_cli_config_error_exit_code(capsys):
    code = cli_main(["sweep-field", "--stop", "900"])
    assert code == 1
    assert "configuration error" in capsys.readouterr().err


def test_cli_partial_exit_code(monkeypatch, tmp_path):
    real = sweeps_mod.delta_force_pfa

    def flaky(mat_a, mat_b, radius, temperature, d, engine, **kwargs):
        if abs(d - 70.0) < 1e-9:
            raise ConvergenceError("synthetic stall", error_estimate=1.0)
        return real(mat_a, mat_b, radius, temperature, d, engine, **kwargs)

    monkeypatch.setattr(sweeps_mod, "delta_force_pfa", flaky)
    out = tmp_path / "sweep.csv"
    code = cli_main(["sweep-gap", "--start", "60", "--stop", "80",
                     "--points", "3", "--no-full", "--rel-tol", "1e-6",
                     "--output", str(out)])
    assert code == 2
    assert "# FAILED" in out.read_text()


def test_cli_gfunction_and_waveform(tmp_path):
    out = tmp_path / "g.csv"
    assert cli_main(["g-function", "--t-over-tc", "0.5", "--output", str(out)]) == 0
    assert "xi_over_2delta0,g_t5.0e-01" in out.read_text()
    out2 = tmp_path / "wave.csv"
    assert cli_main(["waveform", "--samples", "4", "--rel-tol", "1e-6",
                     "--output", str(out2)]) == 0
    assert "t_s,H_Oe,phase,F_fN" in out2.read_text()


def test_cli_point_full_output(capsys):
    code = cli_main(["point", "--rel-tol", "1e-6"])
    out = capsys.readouterr().out
    assert code == 0
    force_line = [ln for ln in out.splitlines() if ln.startswith("delta_f_fN=")][0]
    assert float(force_line.split("=")[1]) == pytest.approx(18.58, rel=1e-2)
    assert any(ln.startswith("f_normal_eV_nm2=") for ln in out.splitlines())
    assert any(ln.startswith("f_super_eV_nm2=") for ln in out.splitlines())


def test_cli_json_format(tmp_path):
    out = tmp_path / "sweep.json"
    code = cli_main(["sweep-field", "--start", "150", "--stop", "250",
                     "--points", "2", "--no-full", "--rel-tol", "1e-6",
                     "--format", "json", "--output", str(out)])
    assert code == 0
    payload = json.loads(out.read_text())
    assert payload["rows_converged"] == 2


def test_missing_config_file_is_config_error():
    with pytest.raises(ConfigError, match="cannot read config file"):
        load_config("/nonexistent/path.cfg")


def test_free_energy_columns_present_when_full(tmp_path):
    out = tmp_path / "full.csv"
    code = cli_main(["sweep-gap", "--start", "65", "--stop", "75",
                     "--points", "2", "--rel-tol", "1e-6",
                     "--output", str(out)])
    assert code == 0
    data = [ln for ln in out.read_text().splitlines()
            if ln and not ln.startswith(("#", "x,"))]
    for ln in data:
        fields = ln.split(",")
        f_normal, f_super = float(fields[3]), float(fields[4])
        assert f_normal < 0.0 and f_super < 0.0
        assert f_super < f_normal  # superconducting state binds more strongly
