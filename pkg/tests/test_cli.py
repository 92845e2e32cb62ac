"""
Tests for the command-line interface
"""
import io
import json
import math

import pytest

import cli
from admissibility import Verdict, rkbs_pair_check
from cli import EXIT_FAIL, EXIT_INPUT_ERROR, EXIT_OK, main
from experiments import STATUS_FAIL, STATUS_NOT_APPLICABLE, STATUS_PASS, SuiteResult
from reports import CSV_HEADER, read_field_csv


EXIT_CASES = [
    # (argv, expected exit code, description)
    (["check-pair", "-d", "1", "-u", "3", "-p", "2", "-v", "3", "-q", "2", "-s", "2"], EXIT_OK, "admissible pair"),
    (["check-pair", "-d", "1", "-u", "3", "-p", "2", "-v", "3", "-q", "2", "-s", "4"], EXIT_FAIL, "sum condition fails"),
    (["check-pair", "-d", "1", "-u", "2", "-p", "1", "-v", "2", "-q", "1", "-s", "3/2"], EXIT_FAIL, "strict equality case"),
    (["check-pair", "-d", "1", "-u", "3", "-p", "inf", "-v", "1", "-q", "1", "-s", "2"], EXIT_OK, "endpoint exponent"),
    (["check-pair", "-d", "0", "-u", "3", "-p", "2", "-v", "3", "-q", "2", "-s", "2"], EXIT_INPUT_ERROR, "zero dimension"),
    (["check-pair", "-d", "1", "-u", "3", "-p", "1/2", "-v", "3", "-q", "2", "-s", "2"], EXIT_INPUT_ERROR, "exponent below one"),
    (["check-pair", "-d", "1", "-u", "0.5", "-p", "2", "-v", "3", "-q", "2", "-s", "2"], EXIT_INPUT_ERROR, "decimal smoothness"),
    (["check-pair", "-d", "1", "-u", "3", "-p", "2", "-v", "3", "-q", "2"], EXIT_INPUT_ERROR, "missing s"),
    (["kernel-interval", "-d", "1", "-u", "2", "-p", "1", "-v", "2", "-q", "1"], EXIT_OK, "proper interval"),
    (["kernel-interval", "-d", "4", "-u", "1", "-p", "2", "-v", "1", "-q", "2"], EXIT_FAIL, "empty interval"),
    (["eval-kernel", "-d", "1", "-s", "1", "-r", "1"], EXIT_OK, "one radius"),
    (["eval-kernel", "-d", "1", "-s", "1", "-r", "-1"], EXIT_INPUT_ERROR, "negative radius"),
    (["eval-kernel", "-d", "1", "-s", "0", "-r", "1"], EXIT_INPUT_ERROR, "zero order"),
    (["eval-kernel", "-d", "1", "-s", "1"], EXIT_INPUT_ERROR, "no radii and no grid"),
    (["eval-kernel", "-d", "1", "-s", "1", "--L", "32", "--n", "1000"], EXIT_INPUT_ERROR, "invalid grid"),
    (["eval-kernel", "-d", "1", "-s", "1/4", "--L", "32", "--n", "64"], EXIT_INPUT_ERROR, "unbounded section"),
    (["eval-kernel", "-d", "1", "-s", "1", "--L", "32"], EXIT_INPUT_ERROR, "section without n"),
    (["check-space", "-d", "1", "-s", "1", "-p", "2"], EXIT_OK, "RKBS space"),
    (["check-space", "-d", "2", "-s", "1", "-p", "2"], EXIT_FAIL, "boundary space"),
    (["check-self-pair", "-d", "1", "-u", "2", "-p", "1"], EXIT_OK, "self-pair interval"),
    (["check-self-pair", "-d", "1", "-u", "2", "-p", "3"], EXIT_FAIL, "p above 2"),
    (["check-self-pair", "-d", "1", "-u", "2", "-p", "1", "-s", "5/4"], EXIT_OK, "self-pair with kernel"),
    (["check-self-pair", "-d", "1", "-u", "2", "-p", "1", "-s", "3/2"], EXIT_FAIL, "upper end excluded"),
    (["check-norming", "-d", "1", "-u", "3", "-p", "2", "-s", "2"], EXIT_OK, "partner mode"),
    (["check-norming", "-d", "1", "-u", "3", "-p", "1", "-s", "2"], EXIT_FAIL, "partner at endpoint"),
    (["check-norming", "-d", "1", "-u", "3", "-p", "2", "-v", "1", "-q", "2"], EXIT_OK, "kernel mode"),
    (["check-norming", "-d", "1", "-u", "3", "-p", "2", "-v", "3", "-q", "2", "-s", "2"], EXIT_FAIL, "check mode fails"),
    (["check-norming", "-d", "1", "-u", "3", "-p", "2", "-v", "1"], EXIT_INPUT_ERROR, "v without q"),
    (["check-embedding", "-d", "1", "-u", "2", "-p", "2", "-v", "1", "-q", "4"], EXIT_OK, "embeds"),
    (["check-embedding", "-d", "1", "-u", "2", "-p", "1", "-v", "1", "-q", "4"], EXIT_FAIL, "endpoint not applicable"),
    (["check-sequence", "-p", "1", "-q", "3"], EXIT_OK, "sequence pair"),
    (["check-sequence", "-p", "3", "-q", "3"], EXIT_FAIL, "no sequence pair"),
    (["no-such-command"], EXIT_INPUT_ERROR, "unknown command"),
    (["verify", "no-such-suite"], EXIT_INPUT_ERROR, "unknown suite"),
    (["verify", "blowup-rescaled", "-p", "inf"], EXIT_FAIL, "suite not applicable"),
    (["--help"], EXIT_OK, "help"),
]


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


class TestExitCodes:
    """Test the exit-code contract"""

    @pytest.mark.parametrize("argv,expected,description", EXIT_CASES)
    def test_exit_code(self, cli_workspace, argv, expected, description):
        """Parameterized test for 0 ok, 1 failed, 2 input error"""
        assert main(argv) == expected, f"Failed for case: {description}"

    def test_input_error_reported_on_stderr(self, cli_workspace, capsys):
        """Test input errors print a message to stderr"""
        main(["check-pair", "-d", "1", "-u", "3", "-p", "1/2", "-v", "3", "-q", "2", "-s", "2"])
        assert capsys.readouterr().err.startswith("error:")

    def test_command_logged(self, cli_workspace):
        """Test each command is logged with its exit code"""
        main(["check-sequence", "-p", "3", "-q", "3"])
        log = (cli_workspace / "logs" / "rkbs.log").read_text(encoding="utf-8")
        assert "COMMAND | check-sequence | Exit: 1" in log


class TestCheckCommands:
    """Test predicate command output"""

    def test_check_pair_json_round_trip(self, cli_workspace, capsys):
        """Test the JSON verdict reloads to the library verdict"""
        main(["check-pair", "-d", "1", "-u", "2", "-p", "1", "-v", "2", "-q", "1", "-s", "3/2"])
        payload = _stdout_json(capsys)

        assert payload["failed"] == ["sum-condition"]
        assert Verdict.from_dict(payload) == rkbs_pair_check(1, 2, 1, 2, 1, "3/2")

    def test_check_pair_deterministic(self, cli_workspace, capsys):
        """Test identical invocations print identical bytes"""
        argv = ["check-pair", "-d", "2", "-u", "3", "-p", "4/3", "-v", "2", "-q", "3", "-s", "2"]
        main(argv)
        first = capsys.readouterr().out
        main(argv)
        assert capsys.readouterr().out == first

    def test_check_pair_pretty(self, cli_workspace, capsys):
        """Test the pretty table lists every condition"""
        main(["check-pair", "-d", "1", "-u", "3", "-p", "2", "-v", "3", "-q", "2", "-s", "4", "--pretty"])
        out = capsys.readouterr().out
        assert out.startswith("not admissible")
        for condition in ("dual-exponent", "u-window", "v-window", "sum-condition"):
            assert condition in out

    def test_kernel_interval_json(self, cli_workspace, capsys):
        """Test bounds are exact rationals"""
        main(["kernel-interval", "-d", "1", "-u", "3", "-p", "2", "-v", "3", "-q", "2"])
        payload = _stdout_json(capsys)
        assert (payload["lower"], payload["upper"], payload["upper_strict"]) == ("7/4", "3/1", False)

    def test_norming_partner_output(self, cli_workspace, capsys):
        """Test partner mode reports v = 2s - u and q = p'"""
        main(["check-norming", "-d", "1", "-u", "3", "-p", "3", "-s", "2"])
        payload = _stdout_json(capsys)
        assert payload == {"mode": "partner", "applicable": True, "v": "1/1", "q": "3/2"}

    def test_output_file(self, cli_workspace, capsys):
        """Test --output writes the result instead of printing it"""
        target = cli_workspace / "out" / "space.json"
        main(["check-space", "-d", "1", "-s", "2", "-p", "3", "--output", str(target)])

        assert capsys.readouterr().out == ""
        payload = json.loads(target.read_text(encoding="utf-8"))
        assert payload["dual"] == {"d": 1, "s": "-2/1", "p": "3/2"}


class TestEvalKernel:
    """Test kernel evaluation output"""

    def test_csv_values(self, cli_workspace, capsys):
        """Test K_1 = G_2 = e^-r/2 in d = 1, comma-separated radii"""
        main(["eval-kernel", "-d", "1", "-s", "1", "-r", "0,1", "2"])
        lines = capsys.readouterr().out.splitlines()

        assert lines[0] == CSV_HEADER
        assert lines[1] == "r,kernel,near_field_class"
        values = [line.split(",") for line in lines[2:]]
        assert [float(row[0]) for row in values] == [0.0, 1.0, 2.0]
        for r, value, _ in values:
            assert float(value) == pytest.approx(math.exp(-float(r)) / 2.0, rel=1e-12)
        assert {row[2] for row in values} == {"Bounded"}

    def test_singular_origin(self, cli_workspace, capsys):
        """Test the origin of a singular kernel is reported, not evaluated"""
        main(["eval-kernel", "-d", "1", "-s", "1/2", "-r", "0", "1", "--format", "json"])
        payload = _stdout_json(capsys)
        assert payload["kernel_order"] == "1/1"
        assert payload["values"][0] == {"r": 0.0, "kernel": "singular", "near_field_class": "Logarithmic"}
        assert payload["values"][1]["kernel"] > 0

    def test_section_field(self, cli_workspace, capsys):
        """Test a section is written as a field file"""
        main(["eval-kernel", "-d", "1", "-s", "1", "--L", "32", "--n", "1024", "--x", "1"])
        field = read_field_csv(io.StringIO(capsys.readouterr().out))

        assert field.grid.n == 1024
        assert field.value_at(1.0) == pytest.approx(0.5, rel=1e-12)
        assert field.value_at(2.0) == pytest.approx(math.exp(-1.0) / 2.0, rel=1e-12)


class TestVerify:
    """Test the verify command"""

    def test_single_suite_saves_reports(self, cli_workspace, capsys):
        """Test the suite report and observations land in the output directory"""
        code = main(["verify", "integrability", "-d", "1", "-s", "2", "-p", "2"])
        payload = _stdout_json(capsys)

        assert code == EXIT_OK
        assert payload["status"] == STATUS_PASS
        saved = json.loads((cli_workspace / "reports" / "integrability.json").read_text(encoding="utf-8"))
        assert saved == payload
        observations = (cli_workspace / "reports" / "integrability.csv").read_text(encoding="utf-8")
        assert observations.splitlines()[1] == "d,s,p,analytic,empirical"

    def test_csv_format(self, cli_workspace, capsys):
        """Test --format csv prints the observation rows"""
        main(["verify", "integrability", "-d", "1", "-s", "2", "-p", "2", "--format", "csv"])
        lines = capsys.readouterr().out.splitlines()
        assert lines[2] == "1,2/1,2/1,1,convergent"

    @pytest.mark.filterwarnings("ignore::scipy.integrate.IntegrationWarning")
    def test_huge_conjugate_exponent(self, cli_workspace, capsys):
        """Test p just above one is reported divergent, not a crash"""
        code = main(["verify", "integrability", "-d", "1", "-s", "1/2", "-p", "1001/1000"])
        payload = _stdout_json(capsys)

        assert code == EXIT_OK
        assert payload["reports"][0]["empirical_verdict"] == "divergent"

    def test_configured_grids_reach_suites(self, cli_workspace, capsys, mocker, monkeypatch):
        """Test GRID_BUDGET and the reference grid are handed to the suite"""
        monkeypatch.setenv("GRID_BUDGET", "1024")
        monkeypatch.setenv("REFERENCE_PERIOD", "40")
        monkeypatch.setenv("REFERENCE_POINTS", "512")
        run_suite = mocker.patch("cli.run_suite",
                                 return_value=SuiteResult("reproducing", STATUS_PASS, 7))

        assert main(["verify", "reproducing"]) == EXIT_OK
        kwargs = run_suite.call_args.kwargs
        assert kwargs["budget"] == 1024
        assert (kwargs["reference"].n, kwargs["reference"].L) == (512, 40.0)

    def test_grid_over_budget(self, cli_workspace, capsys, monkeypatch):
        """Test a default grid above GRID_BUDGET is an input error"""
        monkeypatch.setenv("GRID_BUDGET", "1024")
        monkeypatch.setenv("REFERENCE_POINTS", "512")

        assert main(["verify", "blowup-dilation"]) == EXIT_INPUT_ERROR
        assert "exceeds the budget of 1024" in capsys.readouterr().err

    def test_unusable_configuration(self, cli_workspace, capsys, monkeypatch):
        """Test verify refuses a reference grid that is not a power of two"""
        monkeypatch.setenv("REFERENCE_POINTS", "3000")

        assert main(["verify", "integrability", "-d", "1", "-s", "2", "-p", "2"]) == EXIT_INPUT_ERROR
        assert "REFERENCE_POINTS" in capsys.readouterr().err

    def test_not_applicable_report(self, cli_workspace, capsys):
        """Test a not-applicable suite is saved with its reason"""
        main(["verify", "blowup-rescaled", "-p", "inf"])
        payload = _stdout_json(capsys)
        assert payload["status"] == STATUS_NOT_APPLICABLE
        assert payload["message"]

    def test_all_aggregates(self, cli_workspace, capsys, mocker):
        """Test verify all saves one report per suite plus the aggregate"""
        results = [SuiteResult("norming", STATUS_PASS, 5, [{}]),
                   SuiteResult("young", STATUS_FAIL, 5, [{}], [["inf", 10, 1, 1.2]])]
        run_all = mocker.patch("cli.run_all", return_value=results)

        code = main(["verify", "all", "--seed", "5", "--workers", "3"])
        payload = _stdout_json(capsys)

        assert code == EXIT_FAIL
        run_all.assert_called_once()
        assert run_all.call_args.kwargs["seed"] == 5
        assert run_all.call_args.kwargs["max_workers"] == 3
        assert payload == {"seed": 5, "passed": False,
                           "suites": [{"suite": "norming", "status": STATUS_PASS},
                                      {"suite": "young", "status": STATUS_FAIL}]}
        reports = cli_workspace / "reports"
        assert {path.name for path in reports.iterdir()} == {"all.json", "norming.json",
                                                            "young.json", "young.csv"}

    def test_seed_defaults_to_config(self, cli_workspace, capsys, mocker, monkeypatch):
        """Test DEFAULT_SEED feeds the suites when --seed is absent"""
        monkeypatch.setenv("DEFAULT_SEED", "23")
        run_suite = mocker.patch("cli.run_suite", return_value=SuiteResult("young", STATUS_PASS, 23))
        assert main(["verify", "young", "-s", "1"]) == EXIT_OK
        assert run_suite.call_args.kwargs["seed"] == 23
        assert run_suite.call_args.args[1] == {"s": cli._numeric("1")}
