"""Spec parsing, strict validation, and result serialization."""

import json
import os

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scmimo.config import (ConfigError, apply_overrides, load_spec,
                           parse_spec)
from scmimo.reporting import (COLUMNS, ResultRow, emit_results, load_results,
                              rows_to_csv, rows_to_json)


def minimal(**extra):
    obj = {"kind": "single",
           "system": {"num_antennas": 8, "num_terminals": 3, "num_paths": 2}}
    obj.update(extra)
    return obj


class TestParseSpec:
    def test_minimal_defaults(self):
        spec = parse_spec(minimal())
        assert spec.name == "single"
        assert spec.seed == 0
        assert spec.num_antennas == (8,)
        assert spec.aperture_wl == 8.0
        assert spec.snr_db == (0.0,)
        assert spec.correlation == "unequal"
        assert spec.k_mode == "sampled"
        assert spec.limit_mode == "plain"
        assert spec.out_format == "csv"
        assert spec.calibration.target_db == 0.0

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError, match="snr_dbs"):
            parse_spec(minimal(snr_dbs=[0.0]))

    def test_unknown_nested_key_names_the_path(self):
        bad = minimal()
        bad["system"]["antenna_count"] = 4
        with pytest.raises(ConfigError, match="system"):
            parse_spec(bad)

    def test_wrong_type_reports_the_key(self):
        with pytest.raises(ConfigError, match="seed"):
            parse_spec(minimal(seed="zero"))
        with pytest.raises(ConfigError, match="n_fading"):
            parse_spec(minimal(n_fading=True))

    def test_antenna_list_only_for_sweeps(self):
        bad = minimal()
        bad["system"]["num_antennas"] = [8, 16]
        with pytest.raises(ConfigError, match="antenna_sweep"):
            parse_spec(bad)
        ok = minimal(kind="antenna_sweep")
        ok["system"]["num_antennas"] = [8, 16]
        assert parse_spec(ok).num_antennas == (8, 16)

    def test_single_snr_kinds_refuse_grids(self):
        with pytest.raises(ConfigError, match="exactly one"):
            parse_spec(minimal(kind="sum_se_cdf", snr_db=[0.0, 5.0]))

    def test_scalar_snr_is_promoted(self):
        assert parse_spec(minimal(snr_db=7.5)).snr_db == (7.5,)

    def test_k_mode_forms(self):
        assert parse_spec(minimal(k_mode="zero")).k_mode == "zero"
        spec = parse_spec(minimal(k_mode={"fixed_db": 6.0}))
        assert spec.k_mode == "fixed" and spec.k_fixed_db == 6.0
        with pytest.raises(ConfigError, match="k_mode"):
            parse_spec(minimal(k_mode="fixed"))

    def test_track_terminal_range(self):
        with pytest.raises(ConfigError, match="track_terminal"):
            parse_spec(minimal(track_terminal=3))

    def test_variant_labels_must_be_unique(self):
        with pytest.raises(ConfigError, match="unique"):
            parse_spec(minimal(variants=[{"label": "a"}, {"label": "a"}]))

    def test_variant_overrides_resolve(self):
        spec = parse_spec(minimal(variants=[
            {"label": "a"},
            {"label": "b", "k_mode": "zero", "aperture_wl": 4.0,
             "correlation": "equal"},
        ]))
        resolved = spec.resolve_variants()
        assert [v.label for v in resolved] == ["a", "b"]
        assert resolved[0].k_mode == "sampled"
        assert resolved[0].aperture_wl == 8.0
        assert resolved[1].k_mode == "zero"
        assert resolved[1].aperture_wl == 4.0
        assert spec.experiment_id(resolved[1]) == "single/b"

    def test_inline_profile(self):
        spec = parse_spec(minimal(profile={
            "name": "flat", "band": "microwave", "carrier_ghz": 2.0,
            "alpha_los": 2.0, "alpha_nlos": 3.0, "shadow_std_los_db": 1.0,
            "shadow_std_nlos_db": 2.0, "k_mean_db": 5.0, "k_std_db": 1.0}))
        assert spec.profile.name == "flat"
        with pytest.raises(ConfigError, match="profile"):
            parse_spec(minimal(profile="marine-vhf"))

    def test_calibration_bounds(self):
        with pytest.raises(ConfigError, match="percentile"):
            parse_spec(minimal(calibration={"percentile": 0.0}))

    def test_materialization_errors_become_config_errors(self):
        bad = minimal()
        bad["system"]["num_antennas"] = 1
        with pytest.raises(ConfigError, match="num_antennas"):
            parse_spec(bad)
        with pytest.raises(ConfigError):
            parse_spec(minimal(cell={"exclusion_radius_m": 200.0}))

    def test_output_format_enum(self):
        with pytest.raises(ConfigError, match="format"):
            parse_spec(minimal(output={"format": "parquet"}))

    def test_load_spec_round_trip(self, tmp_path):
        path = tmp_path / "spec.json"
        path.write_text(json.dumps(minimal(seed=5)), encoding="utf-8")
        assert load_spec(str(path)).seed == 5
        bad = tmp_path / "broken.json"
        bad.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigError, match="JSON"):
            load_spec(str(bad))
        with pytest.raises(ConfigError, match="cannot read"):
            load_spec(str(tmp_path / "missing.json"))

    def test_apply_overrides(self):
        spec = parse_spec(minimal())
        out = apply_overrides(spec, seed=9, limit_mode="both",
                              out_path="x.csv", out_format="json")
        assert (out.seed, out.limit_mode) == (9, "both")
        assert (out.out_path, out.out_format) == ("x.csv", "json")
        same = apply_overrides(spec)
        assert same.seed == spec.seed


def _rows():
    return [
        ResultRow("exp", "snr_db", 0.0, "0", "monte_carlo",
                  1.2345678901234567, 0.915122, 0.01, 7),
        ResultRow("exp", "snr_db", 0.0, "avg", "closed_form",
                  1.0 / 3.0, -4.771212547196624, None, 7),
    ]


class TestReporting:
    def test_csv_layout(self):
        text = rows_to_csv(_rows())
        lines = text.splitlines()
        assert lines[0] == ",".join(COLUMNS)
        assert len(lines) == 3
        assert text.endswith("\n")
        # Blank std_err for analytic rows.
        assert lines[2].split(",")[7] == ""

    def test_json_document(self):
        doc = json.loads(rows_to_json(_rows(), {"kind": "single"}))
        assert doc["columns"] == list(COLUMNS)
        assert doc["spec"] == {"kind": "single"}
        assert doc["rows"][0]["method"] == "monte_carlo"

    def test_file_round_trip(self, tmp_path):
        path = str(tmp_path / "out.csv")
        emit_results(_rows(), path)
        assert load_results(path) == _rows()
        # Atomic write leaves no droppings next to the target.
        assert os.listdir(tmp_path) == ["out.csv"]

    def test_json_file_round_trip(self, tmp_path):
        path = str(tmp_path / "out.json")
        emit_results(_rows(), path, "json")
        assert load_results(path) == _rows()

    def test_emit_creates_missing_parent_directories(self, tmp_path):
        path = str(tmp_path / "reports" / "run7" / "out.csv")
        emit_results(_rows(), path)
        assert load_results(path) == _rows()

    @given(st.floats(allow_nan=False, allow_infinity=False),
           st.floats(allow_nan=False, allow_infinity=False))
    def test_floats_survive_the_csv_byte_for_byte(self, linear, db):
        row = ResultRow("e", "snr_db", 1.0, "0", "closed_form",
                        linear, db, None, 0)
        line = rows_to_csv([row]).splitlines()[1]
        cells = line.split(",")
        assert float(cells[5]) == linear
        assert float(cells[6]) == db

    def test_identical_rows_identical_bytes(self):
        assert rows_to_csv(_rows()) == rows_to_csv(_rows())
