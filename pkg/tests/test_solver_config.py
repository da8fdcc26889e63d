#!/usr/bin/env python3
"""
Tests for solver configuration, config files, harness settings and the solver registry.
"""

import pytest
from pydantic import ValidationError

from src.models.errors import ConfigError
from src.models.factorization_models import InstanceKind, OrthogonalityMode, ProblemSpec
from src.models.solver_config import (
    DingConfig, MirzalConfig, PGConfig, load_harness_settings, overrides_for, read_config_file
)
from src.services.instance_generator import generate_instance
from src.services.solver_common import random_factor_pair
from src.services.solver_registry import build_config, default_config, run_solver


class TestSolverConfigs:

    def test_defaults(self):
        ding, mirzal = DingConfig(), MirzalConfig()
        assert (ding.delta, ding.max_iters, ding.time_limit) == (1e-9, 1000, 60.0)
        assert (mirzal.nu, mirzal.delta0, mirzal.step, mirzal.max_inner_tries) == (1e-8, 1e-9, 10.0, 64)

    @pytest.mark.parametrize("cls, values", [
        (PGConfig, {'sigma': 1.5}),
        (PGConfig, {'gamma': 0.0}),
        (MirzalConfig, {'step': 1.0}),
        (DingConfig, {'delta': 0.0}),
        (DingConfig, {'time_limit': -1.0}),
        (DingConfig, {'unknown': 1}),
    ])
    def test_invalid_values(self, cls, values):
        with pytest.raises(ValidationError):
            cls(**values)

    def test_frozen(self):
        with pytest.raises(ValidationError):
            DingConfig().delta = 1.0

    def test_with_overrides(self):
        cfg = PGConfig().with_overrides({'sigma': '0.01', 'max_outer_iters': '30'})
        assert cfg.sigma == 0.01
        assert cfg.max_outer_iters == 30
        with pytest.raises(ConfigError):
            PGConfig().with_overrides({'tau': 2.0})

    def test_config_hash(self):
        a = PGConfig.union_preset()
        assert a.config_hash() == PGConfig.union_preset().config_hash()
        assert len(a.config_hash()) == 12
        assert a.config_hash() != PGConfig.bion_preset().config_hash()
        assert DingConfig().config_hash() != MirzalConfig().config_hash()


class TestConfigFiles:

    def test_bare_and_prefixed_keys(self, tmp_path):
        path = tmp_path / 'solvers.cfg'
        path.write_text('time_limit=5\npg.sigma=0.01\nmirzal.step=4\n')
        raw = read_config_file(str(path))
        assert overrides_for('ding', raw) == {'time_limit': '5'}
        assert overrides_for('pg', raw) == {'time_limit': '5', 'sigma': '0.01'}
        assert overrides_for('mirzal', raw) == {'time_limit': '5', 'step': '4'}

    def test_bare_key_skips_solvers_without_the_field(self):
        assert overrides_for('ding', {'sigma': '0.01'}) == {}
        assert overrides_for('pg', {'sigma': '0.01'}) == {'sigma': '0.01'}

    @pytest.mark.parametrize("raw", [{'foo': '1'}, {'pg.delta': '1'}, {'lbfgs.sigma': '1'}])
    def test_unknown_keys(self, raw):
        with pytest.raises(ConfigError):
            overrides_for('pg', raw)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            read_config_file(str(tmp_path / 'absent.cfg'))


class TestHarnessSettings:

    def test_environment(self, monkeypatch, tmp_path):
        monkeypatch.setenv('ORTHOFACT_WORKERS', '4')
        monkeypatch.setenv('ORTHOFACT_MASTER_SEED', '7')
        monkeypatch.delenv('ORTHOFACT_OUTPUT_DIR', raising=False)
        settings = load_harness_settings(str(tmp_path / 'none.env'))
        assert settings.workers == 4
        assert settings.master_seed == 7
        assert settings.output_dir == 'output'

    def test_invalid_environment(self, monkeypatch, tmp_path):
        monkeypatch.setenv('ORTHOFACT_WORKERS', '0')
        with pytest.raises(ConfigError):
            load_harness_settings(str(tmp_path / 'none.env'))


class TestRegistry:

    def test_default_config_follows_dataset(self):
        assert default_config('pg', InstanceKind.BION).gamma == 0.75
        assert default_config('pg', InstanceKind.UNION).gamma == 0.1
        assert isinstance(default_config('ding'), DingConfig)
        with pytest.raises(ConfigError):
            default_config('als')

    def test_build_config_overrides(self):
        cfg = build_config('pg', InstanceKind.BION, {'pg.sigma': '0.01'}, time_limit=5.0, max_iters=7)
        assert (cfg.sigma, cfg.gamma, cfg.time_limit, cfg.max_outer_iters) == (0.01, 0.75, 5.0, 7)
        assert build_config('ding', max_iters=9).max_iters == 9

    def test_run_solver_dispatch(self):
        t = generate_instance(10, 2, InstanceKind.UNION, 1, seed=5)
        spec = ProblemSpec(t.R, 2, OrthogonalityMode.UNI, beta=1.0)
        init = random_factor_pair(10, 10, 2, seed=1)
        report = run_solver('mirzal', spec, MirzalConfig(max_outer_iters=2), init)
        assert report.algorithm == 'mirzal'
        with pytest.raises(ConfigError):
            run_solver('mirzal', spec, DingConfig(), init)
        with pytest.raises(ConfigError):
            run_solver('als', spec, DingConfig(), init)
