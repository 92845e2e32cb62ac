"""
Integration tests for bessel-rkbs
Tests the predicate, numerics and report layers working together
"""
import json
from fractions import Fraction

import numpy as np
import pytest

import spectral
from admissibility import kernel_interval, norming_partner, rkbs_pair_check
from cli import main
from config import Config
from experiments import run_suite, verify_reproducing
from reports import ReportStore
from spectral import Gaussian, GridSpec, kernel_section, pairing
from utils import Logger


@pytest.mark.integration
class TestFullWorkflow:
    """Test complete workflows across modules"""

    def test_interval_kernels_reproduce(self, reference_grid):
        """Test every integer kernel order in the interval for H^{3,2}(R) reproduces a Gaussian"""
        interval = kernel_interval(1, 3, 3, 2, 2)
        orders = [s for s in (Fraction(2), Fraction(5, 2), Fraction(3)) if interval.contains(s)]
        assert orders == [Fraction(2), Fraction(5, 2), Fraction(3)]

        psi = spectral.test_function(Gaussian(1.0), reference_grid)
        for s in orders:
            assert rkbs_pair_check(1, 3, 2, 3, 2, s).admissible
            section = kernel_section(float(s), 1.0, reference_grid)
            assert pairing(psi, section, float(s)) == pytest.approx(np.exp(-1.0), abs=1e-8)

    def test_norming_partner_feeds_pair_check(self):
        """Test a completed norming pair is admissible with equality in the sum"""
        v, q = norming_partner(1, 3, 2, 2)
        verdict = rkbs_pair_check(1, 3, 2, v, q, 2)
        assert verdict.admissible
        assert verdict.condition("sum-condition").status == "satisfied-equality"

    def test_suite_to_store(self, temp_dir, mock_env_file):
        """Test a suite run through config, logger and store"""
        config = Config(env_file=str(mock_env_file), config_file=str(temp_dir / "config.json"))
        logger = Logger(config.log_dir, config.debug_mode)
        store = ReportStore(config.output_dir, logger)

        result = run_suite("integrability", {"d": 2, "s": Fraction(3), "p": 2},
                           seed=config.default_seed, logger=logger)
        store.save_report(result.suite, result.to_dict())

        saved = store.load_report("integrability")
        assert saved["status"] == "pass"
        assert saved["seed"] == 11
        for handler in logger.numerics_logger.handlers:
            handler.flush()
        numerics = (temp_dir / "logs" / "numerics_debug.log").read_text(encoding="utf-8")
        assert "SUITE START | integrability" in numerics

    def test_two_dimensional_reproducing(self):
        """Test the reproducing identity on a 2-D grid with s = 3/2"""
        grid = GridSpec(2, 128, 16.0)
        report = verify_reproducing(2, 1.5, grid, functions=[Gaussian(1.0)],
                                    points=[(0.0, 0.0), (1.0, -0.5)], tolerance=1e-8,
                                    rkhs_route=False)
        assert report.passed

    def test_cli_round_trip_through_files(self, cli_workspace):
        """Test CLI output written to a file matches the library verdict"""
        target = cli_workspace / "verdict.json"
        code = main(["check-pair", "-d", "1", "-u", "3", "-p", "1", "-v", "2", "-q", "2", "-s", "2",
                     "--output", str(target)])

        assert code == 0
        payload = json.loads(target.read_text(encoding="utf-8"))
        assert payload == rkbs_pair_check(1, 3, 1, 2, 2, 2).to_dict()
