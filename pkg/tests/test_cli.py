"""Command dispatch, document parsing, report rendering and exit codes."""

import io
import json

import numpy as np
import pytest

from nusamp import SystemDocumentError
from nusamp.cli import (
    EXIT_NEGATIVE,
    EXIT_NOT_MINIMAL,
    EXIT_OK,
    EXIT_USAGE,
    SystemDocument,
    Tolerances,
    document_to_json,
    main,
    parse_system_document,
)

PI_16 = "3.141592653589793"


@pytest.fixture
def rotation_file(tmp_path):
    path = tmp_path / "rotation.json"
    path.write_text(
        json.dumps({"order": 2, "A": [0, -1, 1, 0], "b": [1, 0], "c": [1, 0]})
    )
    return str(path)


@pytest.fixture
def diag_file(tmp_path):
    path = tmp_path / "diag.json"
    path.write_text(
        json.dumps({"order": 2, "A": [0, 0, 0, -1], "b": [1, 1], "c": [1, 1]})
    )
    return str(path)


@pytest.fixture
def scalar_file(tmp_path):
    path = tmp_path / "scalar.json"
    path.write_text(json.dumps({"order": 1, "A": [-1], "b": [1], "c": [1]}))
    return str(path)


def run_cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


class TestDocumentParsing:
    def test_roundtrip(self):
        document = SystemDocument(
            order=2,
            A=np.array([[0.0, -1.0], [1.0, 0.0]]),
            b=np.array([1.0, 0.0]),
            c=np.array([1.0, 0.0]),
            schedule=(0.0, 1.5),
            x0=(0.5, -0.25),
            tolerances=Tolerances(singularity=1e-8),
        )
        parsed = parse_system_document(document_to_json(document))
        assert parsed.order == document.order
        assert np.array_equal(parsed.A, document.A)
        assert np.array_equal(parsed.b, document.b)
        assert np.array_equal(parsed.c, document.c)
        assert parsed.schedule == document.schedule
        assert parsed.x0 == document.x0
        assert parsed.tolerances == document.tolerances

    def test_field_length_message(self):
        with pytest.raises(SystemDocumentError, match="field b: expected 2 entries, found 3"):
            parse_system_document(
                json.dumps({"order": 2, "A": [0, -1, 1, 0], "b": [1, 0, 0], "c": [1, 0]})
            )

    def test_missing_field(self):
        with pytest.raises(SystemDocumentError, match="field c: missing"):
            parse_system_document(json.dumps({"order": 1, "A": [1], "b": [1]}))

    def test_bad_schedule(self):
        with pytest.raises(SystemDocumentError, match="strictly increasing"):
            parse_system_document(
                json.dumps(
                    {
                        "order": 1,
                        "A": [-1],
                        "b": [1],
                        "c": [1],
                        "schedule": [1.0, 0.5],
                    }
                )
            )

    def test_unknown_field(self):
        with pytest.raises(SystemDocumentError, match="field extra: unknown"):
            parse_system_document(
                json.dumps({"order": 1, "A": [-1], "b": [1], "c": [1], "extra": 1})
            )


class TestAnalyze:
    def test_quarter_turn_exit_zero(self, rotation_file):
        code, out, _ = run_cli("analyze", rotation_file, "--schedule", "0,1.5707963")
        assert code == EXIT_OK
        assert "jointly reachable and observable: yes" in out

    def test_half_turn_exit_two(self, rotation_file):
        code, out, _ = run_cli("analyze", rotation_file, "--schedule", "0," + PI_16)
        assert code == EXIT_NEGATIVE
        assert "jointly reachable and observable: no" in out
        assert "sigma ratio" in out

    def test_non_minimal_exit_three(self, tmp_path):
        path = tmp_path / "badmin.json"
        path.write_text(
            json.dumps({"order": 2, "A": [0, 0, 0, -1], "b": [1, 0], "c": [1, 1]})
        )
        code, out, _ = run_cli("analyze", str(path), "--schedule", "0,1")
        assert code == EXIT_NOT_MINIMAL
        assert "minimal: no" in out

    def test_malformed_file_exit_one(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(
            json.dumps({"order": 2, "A": [0, -1, 1, 0], "b": [1, 0, 0], "c": [1, 0]})
        )
        code, _, err = run_cli("analyze", str(path), "--schedule", "0,1")
        assert code == EXIT_USAGE
        assert "field b: expected 2 entries, found 3" in err

    def test_json_and_text_carry_identical_values(self, rotation_file):
        code_t, text, _ = run_cli("analyze", rotation_file, "--schedule", "0,0.8")
        code_j, raw, _ = run_cli(
            "analyze", rotation_file, "--schedule", "0,0.8", "--format", "json"
        )
        assert code_t == code_j == EXIT_OK
        payload = json.loads(raw)
        sigma = payload["criterion"]["sigma_ratio"]
        assert f"{sigma:.6g}" in text
        mode_abs = payload["criterion"]["mode_determinant"]["abs"]
        assert f"{mode_abs:.6g}" in text

    def test_schedule_flag_overrides_file(self, tmp_path):
        path = tmp_path / "withsched.json"
        path.write_text(
            json.dumps(
                {
                    "order": 2,
                    "A": [0, -1, 1, 0],
                    "b": [1, 0],
                    "c": [1, 0],
                    "schedule": [0.0, float(PI_16)],
                }
            )
        )
        code, out, err = run_cli("analyze", str(path), "--schedule", "0,1.5707963")
        assert code == EXIT_OK
        assert "overrides" in err

    def test_schedule_from_file(self, tmp_path):
        path = tmp_path / "filesched.json"
        path.write_text(
            json.dumps(
                {
                    "order": 2,
                    "A": [0, -1, 1, 0],
                    "b": [1, 0],
                    "c": [1, 0],
                    "schedule": [0.0, 1.0],
                }
            )
        )
        code, _, _ = run_cli("analyze", str(path))
        assert code == EXIT_OK

    def test_missing_schedule(self, rotation_file):
        code, _, err = run_cli("analyze", rotation_file)
        assert code == EXIT_USAGE
        assert "no schedule" in err

    def test_case_label_reported(self, rotation_file):
        code, raw, _ = run_cli(
            "analyze",
            rotation_file,
            "--schedule",
            f"0,{PI_16},{2 * float(PI_16)}",
            "--format",
            "json",
        )
        assert code == EXIT_NEGATIVE
        payload = json.loads(raw)
        assert payload["case"]["label"] == "b"
        assert payload["criterion"]["controllable"] is True

    def test_x0_specific_controllability(self, tmp_path):
        path = tmp_path / "withx0.json"
        path.write_text(
            json.dumps(
                {
                    "order": 2,
                    "A": [0, -1, 1, 0],
                    "b": [1, 0],
                    "c": [1, 0],
                    "x0": [0.0, 1.0],
                }
            )
        )
        code, raw, _ = run_cli(
            "analyze",
            str(path),
            "--schedule",
            f"0,{PI_16},{float(PI_16) + 1.5}",
            "--format",
            "json",
        )
        assert code == EXIT_NEGATIVE
        payload = json.loads(raw)
        assert payload["oracle"]["controllable_x0"] is False

    def test_oracle_agreement_in_report(self, diag_file):
        code, raw, _ = run_cli(
            "analyze", diag_file, "--schedule", "0,1", "--format", "json"
        )
        assert code == EXIT_OK
        payload = json.loads(raw)
        assert payload["oracle"]["agrees_with_criterion"] is True


class TestForbidden:
    def test_lists_instants(self, rotation_file):
        code, out, _ = run_cli("forbidden", rotation_file, "--t0", "0", "--window", "0,7")
        assert code == EXIT_OK
        assert "3.14159" in out
        assert "6.28319" in out

    def test_real_eigenvalues_exit_two(self, diag_file):
        code, _, err = run_cli("forbidden", diag_file, "--t0", "0", "--window", "0,7")
        assert code == EXIT_NEGATIVE
        assert "real distinct" in err

    def test_frequency_two(self, tmp_path):
        path = tmp_path / "b2.json"
        path.write_text(
            json.dumps({"order": 2, "A": [0, -2, 2, 0], "b": [1, 0], "c": [1, 0]})
        )
        code, raw, _ = run_cli(
            "forbidden", str(path), "--t0", "0", "--window", "0.1,2", "--format", "json"
        )
        assert code == EXIT_OK
        payload = json.loads(raw)
        assert payload["forbidden"] == pytest.approx([np.pi / 2])


class TestSuggest:
    def test_rotation(self, rotation_file):
        code, raw, _ = run_cli(
            "suggest",
            rotation_file,
            "--window",
            "0,2",
            "--count",
            "2",
            "--min-spacing",
            "0.1",
            "--format",
            "json",
        )
        assert code == EXIT_OK
        payload = json.loads(raw)
        spacing = payload["schedule"][1] - payload["schedule"][0]
        assert abs(spacing - np.pi / 2) < 1e-2
        assert payload["sigma_ratio"] > 0.99


class TestDeadbeatAndReconstruct:
    def test_deadbeat_scalar(self, scalar_file):
        code, raw, _ = run_cli(
            "deadbeat",
            scalar_file,
            "--schedule",
            "0",
            "--x0",
            "0",
            "--target",
            "1",
            "--final-time",
            "1",
            "--format",
            "json",
        )
        assert code == EXIT_OK
        payload = json.loads(raw)
        assert payload["inputs"][0] == pytest.approx(np.e, abs=1e-10)
        assert payload["resimulation_residual"] < 1e-10

    def test_deadbeat_singular_schedule(self, rotation_file):
        code, _, err = run_cli(
            "deadbeat",
            rotation_file,
            "--schedule",
            "0," + PI_16,
            "--x0",
            "0,0",
            "--target",
            "1,1",
        )
        assert code == EXIT_NEGATIVE
        assert "singular" in err

    def test_reconstruct(self, rotation_file):
        code, raw, _ = run_cli(
            "reconstruct",
            rotation_file,
            "--schedule",
            "0,1.5707963267948966",
            "--outputs",
            "2,1",
            "--format",
            "json",
        )
        assert code == EXIT_OK
        payload = json.loads(raw)
        assert payload["x0"] == pytest.approx([2.0, -1.0])
        assert payload["resimulation_residual"] < 1e-10


class TestUniform:
    def test_pass_and_fail(self, rotation_file):
        code, out, _ = run_cli("uniform", rotation_file, "--interval", "1.0")
        assert code == EXIT_OK
        assert "pass" in out
        code, out, _ = run_cli("uniform", rotation_file, "--interval", PI_16)
        assert code == EXIT_NEGATIVE
        assert "fail" in out

    def test_exit_codes_stable(self, rotation_file):
        results = {run_cli("uniform", rotation_file, "--interval", "1.0")[0] for _ in range(3)}
        assert results == {EXIT_OK}
