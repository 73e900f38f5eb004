"""Trace ingestion, synthesis, resampling, and trajectory files."""

import math

import pytest

from stickslip.exceptions import InputError, InvalidParameterError, TraceParseError, TraceValidationError
from stickslip.friction import FrictionParams, Phase
from stickslip.traces import (
    InputSample,
    load_trace,
    load_trajectory,
    save_trace,
    save_trajectory,
    simulate_trace,
    synth_constant_velocity,
)


class TestSynth:
    def test_sample_count_includes_endpoint(self):
        samples = synth_constant_velocity(0.0, 1.0, sim_rate=100.0)
        assert len(samples) == 101
        assert all(s.q == 0.0 for s in samples)

    def test_final_position_is_exact(self):
        samples = synth_constant_velocity(100.0, 0.7, sim_rate=100.0)
        assert len(samples) == 71
        assert samples[-1].q == pytest.approx(70.0)
        assert samples[-1].t == pytest.approx(0.7)

    def test_contact_always_on(self):
        assert all(s.contact for s in synth_constant_velocity(10.0, 0.5))

    @pytest.mark.parametrize("kwargs", [
        {"velocity": 10.0, "duration": 0.0},
        {"velocity": 10.0, "duration": -1.0},
        {"velocity": 10.0, "duration": 1.0, "sim_rate": 0.0},
        {"velocity": math.nan, "duration": 1.0},
    ])
    def test_rejects_bad_arguments(self, kwargs):
        with pytest.raises(InputError):
            synth_constant_velocity(**kwargs)


class TestTraceFiles:
    def test_round_trip_is_exact_on_ms_grid(self, tmp_path):
        samples = synth_constant_velocity(35.0, 10.0, sim_rate=100.0)
        path = tmp_path / "trace.jsonl"
        save_trace(samples, path)
        back = load_trace(path)
        assert back == list(samples)

    def test_empty_file_is_an_error(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("")
        with pytest.raises(InputError):
            load_trace(path)

    def test_blank_lines_are_skipped(self, tmp_path):
        path = tmp_path / "trace.jsonl"
        path.write_text('{"t_ms": 0, "x_px": 0.0, "contact": 1}\n'
                        "\n"
                        '{"t_ms": 10, "x_px": 1.0, "contact": 1}\n')
        assert len(load_trace(path)) == 2

    @pytest.mark.parametrize("line,lineno", [
        ("not json", 2),
        ('{"t_ms": 10, "contact": 1}', 2),
        ('{"t_ms": true, "x_px": 1.0, "contact": 1}', 2),
        ('{"t_ms": 10, "x_px": 1.0, "contact": 7}', 2),
    ])
    def test_parse_errors_name_the_line(self, tmp_path, line, lineno):
        path = tmp_path / "trace.jsonl"
        path.write_text('{"t_ms": 0, "x_px": 0.0, "contact": 1}\n' + line + "\n")
        with pytest.raises(TraceParseError, match=f"line {lineno}"):
            load_trace(path)

    @pytest.mark.parametrize("line", [
        '{"t_ms": 10, "x_px": NaN, "contact": 1}',
        '{"t_ms": 0, "x_px": 1.0, "contact": 1}',
    ])
    def test_validation_errors_name_the_line(self, tmp_path, line):
        path = tmp_path / "trace.jsonl"
        path.write_text('{"t_ms": 0, "x_px": 0.0, "contact": 1}\n' + line + "\n")
        with pytest.raises(TraceValidationError, match="line 2"):
            load_trace(path)

    def test_missing_file_is_input_error(self, tmp_path):
        with pytest.raises(InputError):
            load_trace(tmp_path / "absent.jsonl")


class TestSimulateTrace:
    def test_row_count_and_initial_row(self):
        p = FrictionParams(mu_s=0.7)
        samples = synth_constant_velocity(50.0, 2.0, sim_rate=p.sim_rate)
        trace = simulate_trace(samples, p)
        assert len(trace.rows) == 201
        first = trace.rows[0]
        assert first.t == 0.0 and first.p == first.q == 0.0
        assert first.phase is Phase.STICK

    def test_rows_are_on_the_tick_grid(self):
        p = FrictionParams(mu_s=0.7)
        trace = simulate_trace(synth_constant_velocity(50.0, 1.0), p)
        for i, row in enumerate(trace.rows):
            assert row.t == pytest.approx(i * p.dt, abs=1e-12)

    def test_empty_input_rejected(self):
        with pytest.raises(InputError):
            simulate_trace([], FrictionParams(mu_s=0.7))

    def test_non_monotone_timestamps_rejected(self):
        p = FrictionParams(mu_s=0.7)
        samples = [InputSample(t=0.0, q=0.0), InputSample(t=0.02, q=1.0),
                   InputSample(t=0.01, q=2.0)]
        with pytest.raises(TraceValidationError, match="line 3"):
            simulate_trace(samples, p)

    def test_resamples_coarse_input_linearly(self):
        # 10 Hz input against a 100 Hz simulation grid: the q fed to the
        # stepper is the linear interpolant. With zero friction and a
        # strong spring the pointer hugs it, and separately the row q
        # column must be exactly the interpolated input.
        p = FrictionParams(mu_s=0.0, mu_k=0.0)
        coarse = [InputSample(t=i / 10.0, q=5.0 * i) for i in range(11)]
        trace = simulate_trace(coarse, p)
        assert len(trace.rows) == 101
        for i, row in enumerate(trace.rows):
            t = i / 100.0
            assert row.q == pytest.approx(50.0 * t, abs=1e-9)

    def test_simulation_window_clipped_to_input_span(self):
        p = FrictionParams(mu_s=0.7)
        samples = [InputSample(t=0.5, q=0.0), InputSample(t=1.0, q=10.0)]
        trace = simulate_trace(samples, p)
        assert trace.rows[0].t == pytest.approx(0.5)
        assert trace.rows[-1].t == pytest.approx(1.0)
        assert len(trace.rows) == 51


class TestTrajectoryFiles:
    def make_trace(self):
        p = FrictionParams(mu_s=0.7)
        return simulate_trace(synth_constant_velocity(50.0, 1.0), p), p

    def test_header_and_width(self, tmp_path):
        trace, _ = self.make_trace()
        path = tmp_path / "run.csv"
        save_trajectory(trace, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,q,p,phase,spring_force,string_len"
        assert all(line.count(",") == 5 for line in lines[1:])

    def test_save_load_save_is_a_fixpoint(self, tmp_path):
        trace, _ = self.make_trace()
        first = tmp_path / "a.csv"
        second = tmp_path / "b.csv"
        save_trajectory(trace, first)
        save_trajectory(load_trajectory(first), second)
        assert first.read_bytes() == second.read_bytes()

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("time,q,p,phase,spring_force,string_len\n")
        with pytest.raises(TraceParseError, match="header"):
            load_trajectory(path)

    def test_short_row_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,q,p,phase,spring_force,string_len\n"
                        "0.000000,0.000000,0.000000,stick,0.000000\n")
        with pytest.raises(TraceParseError, match="line 2"):
            load_trajectory(path)

    def test_unknown_phase_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("t,q,p,phase,spring_force,string_len\n"
                        "0.000000,0.000000,0.000000,wobble,0.000000,0.000000\n")
        with pytest.raises(TraceParseError, match="line 2"):
            load_trajectory(path)
