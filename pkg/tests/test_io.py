import json
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_matrix, random_params, random_states
from siruv.core import EQ1_MATRIX, PatchParams, ResidenceMatrix, SystemState
from siruv.errors import ParseError, RowSumViolation, ValidationError
from siruv.integrate import Method, SolverConfig, Trajectory
from siruv.io import (
    PRESETS,
    ScenarioConfig,
    get_preset,
    parse_config,
    read_trajectory,
    write_config,
    write_trajectory,
)
from siruv.models import ModelKind


class TestPresets:
    def test_paper_three_patch(self):
        cfg = get_preset("paper-3patch")
        assert cfg.n == 3
        for p in cfg.params:
            assert p.mu == 10 / (1000 * 365)
            assert (p.alpha, p.beta, p.theta) == (0.008, 0.01, 0.4)
            assert p.nu == 1 / 14
            assert (p.host_pop, p.vector_pop) == (20000.0, 100000.0)
        np.testing.assert_array_equal(cfg.P.entries, [[0.2, 0.7, 0.1], [0.5, 0.1, 0.4], [0.3, 0.6, 0.1]])
        np.testing.assert_array_equal(np.asarray(cfg.initial)[:, 1], [0.01, 0, 0])

    def test_unknown(self):
        with pytest.raises(ValidationError):
            get_preset("nope")

    @pytest.mark.parametrize("name", sorted(PRESETS))
    def test_presets_round_trip(self, name):
        assert parse_config(write_config(PRESETS[name])) == PRESETS[name]


class TestParseConfig:
    @pytest.mark.parametrize("text", ["", "  \n", "{}"])
    def test_empty_is_paper_preset(self, text):
        assert parse_config(text) == get_preset("paper-3patch")

    def test_row_sum_violation(self):
        doc = {"n": 2, "P": [[0.5, 0.6], [0.5, 0.5]]}
        with pytest.raises(RowSumViolation):
            parse_config(json.dumps(doc))

    def test_parse_error_position(self):
        with pytest.raises(ParseError) as err:
            parse_config('{\n  "n": 3,\n  "model": }')
        assert err.value.line == 3

    def test_partial_patch_uses_table1(self):
        cfg = parse_config(json.dumps({"patches": [{"N": 500}, {}, {"beta": 0.2}]}))
        assert cfg.params[0] == PatchParams(host_pop=500.0)
        assert cfg.params[2].beta == 0.2
        assert cfg.P == EQ1_MATRIX

    def test_other_patch_counts_default_to_identity(self):
        cfg = parse_config('{"n": 2}')
        assert cfg.P == ResidenceMatrix.identity(2)
        assert cfg.initial == SystemState.seeded(2)

    def test_initial_as_lists(self):
        cfg = parse_config('{"n": 1, "initial": [[0.5, 0.25, 0.25, 0.9, 0.1]]}')
        assert cfg.initial.patches[0].v == 0.1

    def test_solver_fields(self):
        cfg = parse_config('{"solver": {"method": "rkf45", "dt": 0.5, "t_end": 10, "rel_tol": 1e-6}}')
        assert cfg.solver.method is Method.RKF45
        assert (cfg.solver.dt, cfg.solver.t_end, cfg.solver.rel_tol) == (0.5, 10.0, 1e-6)

    @pytest.mark.parametrize(
        "doc",
        [
            {"schema_version": 2},
            {"colour": "red"},
            {"n": 2, "patches": [{}, {}, {}]},
            {"n": 0},
            {"patches": [{"mu": -1}, {}, {}]},
            {"patches": [{"mu": "fast"}, {}, {}]},
            {"patches": [{"delta": 1}, {}, {}]},
            {"n": 1, "initial": [{"S": 0.5, "I": 0.0, "R": 0.0, "U": 1.0, "V": 0.0}]},
            {"n": 1, "initial": [{"S": 1.0}]},
            {"solver": {"dt": -1}},
            {"solver": {"dt": "small"}},
            {"solver": {"order": 4}},
            {"model": "sir"},
            {"P": "identity"},
            {"outputs": {"plot": "x.png"}},
        ],
    )
    def test_invalid(self, doc):
        with pytest.raises(ValidationError):
            parse_config(json.dumps(doc))

    def test_not_an_object(self):
        with pytest.raises(ValidationError):
            parse_config("[1, 2]")


@st.composite
def scenarios(draw):
    n = draw(st.integers(1, 4))
    rng = np.random.default_rng(draw(st.integers(0, 2**32 - 1)))
    solver = SolverConfig(
        method=draw(st.sampled_from(list(Method))),
        dt=draw(st.floats(1e-3, 1.0)),
        t_end=draw(st.floats(1.0, 1e4)),
        rel_tol=draw(st.floats(1e-12, 1e-2)),
        abs_tol=draw(st.floats(1e-15, 1e-2)),
        sample_every=draw(st.floats(0.1, 10.0)),
    )
    return ScenarioConfig(
        name=draw(st.text(max_size=12)),
        model=draw(st.sampled_from(list(ModelKind))),
        params=tuple(random_params(rng, n)),
        P=ResidenceMatrix(random_matrix(rng, n)),
        initial=SystemState.from_array(random_states(rng, n)),
        solver=solver,
    )


@settings(max_examples=100, deadline=None)
@given(scenarios())
def test_config_round_trip(cfg):
    assert parse_config(write_config(cfg)) == cfg


def test_write_config_is_stable():
    cfg = replace(get_preset("paper-3patch"), name="x")
    assert write_config(cfg) == write_config(parse_config(write_config(cfg)))


class TestTrajectoryCSV:
    def test_single_disease_free_sample(self, tmp_path):
        traj = Trajectory([0.0], np.asarray(SystemState.disease_free(1))[None])
        path = tmp_path / "t.csv"
        write_trajectory(traj, path)
        assert path.read_bytes() == b"t,patch,S,I,R,U,V\n0,0,1,0,0,1,0\n"

    def test_shape(self, tmp_path):
        T = 7
        states = random_states(np.random.default_rng(3), 3, T)
        path = tmp_path / "t.csv"
        write_trajectory(Trajectory(np.arange(T) * 0.5, states), path)
        lines = path.read_text().splitlines()
        assert len(lines) == 1 + 3 * T
        assert lines[1].split(",")[:2] == ["0", "0"]
        assert lines[3].split(",")[:2] == ["0", "2"]
        assert lines[4].split(",")[:2] == ["0.5", "0"]

    def test_round_trip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(4)
        times = np.cumsum(rng.uniform(0.01, 3.0, 50))
        times[0] = 0.0
        states = rng.uniform(-1e-3, 1.0, (50, 4, 5)) * 10.0 ** rng.integers(-300, 1, (50, 4, 5))
        path = tmp_path / "t.csv"
        write_trajectory(Trajectory(times, states), path)
        back = read_trajectory(path)
        assert back.times.tobytes() == times.tobytes()
        assert back.states.tobytes() == states.tobytes()

    def test_deterministic(self, tmp_path):
        states = random_states(np.random.default_rng(5), 2, 4)
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_trajectory(Trajectory(np.arange(4.0), states), a)
        write_trajectory(Trajectory(np.arange(4.0), states.copy()), b)
        assert a.read_bytes() == b.read_bytes()
        assert b"\r" not in a.read_bytes()

    def test_empty_trajectory(self, tmp_path):
        with pytest.raises(ValidationError):
            write_trajectory(Trajectory(np.zeros(0), np.zeros((0, 1, 5))), tmp_path / "t.csv")

    def test_bad_header(self, tmp_path):
        path = tmp_path / "t.csv"
        path.write_text("time,S\n0,1\n")
        with pytest.raises(ParseError):
            read_trajectory(path)
