import csv
import io
import json

import numpy as np
import pytest

from negaspec import rh, spectra
from negaspec.cli import (
    DENSITY_COLUMNS,
    SPECTRUM_COLUMNS,
    build_config,
    main,
    match_spectra,
)
from negaspec.errors import ValidationError
from negaspec.lattice import make_geometry, make_state

HALF = make_state("1/2")


def _rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_spectrum_csv(tmp_path):
    out = tmp_path / "s.csv"
    svg = tmp_path / "s.svg"
    assert main(["spectrum", "--k", "29", "--l", "29", "--gap", "15", "--pf", "1/2", "--out", str(out), "--svg", str(svg)]) == 0
    rows = _rows(out.read_text())
    assert tuple(rows[0]) == SPECTRUM_COLUMNS
    assert len(rows) == 61
    lam = np.array([complex(float(r[1]), float(r[2])) for r in rows[1:]])
    ref = spectra.exact_spectrum(make_geometry(29, 29, 15), HALF).lambdas
    assert np.array_equal(lam, ref)  # 17 significant digits round-trip exactly
    text = svg.read_text()
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--k", "1", "--l", "1", "--gap", "1", "--pf", "3/2"],
        ["spectrum", "--k", "1", "--l", "1", "--gap", "0"],
        ["spectrum", "--k", "1", "--gap", "1"],
        ["predict", "--k", "1", "--l", "1", "--gap", "1", "--window", "-1", "0.5"],
        ["compare", "--k", "1", "--l", "1", "--gap", "1", "--match-cap", "-1"],
        ["sweep", "--sweep-k", "3"],
    ],
)
def test_validation_exit_code(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_numerical_failure_exit_code(monkeypatch, capsys):
    from negaspec import linalg
    from negaspec.errors import ConvergenceError

    def broken(*a, **k):
        raise ConvergenceError("no convergence")

    monkeypatch.setattr(spectra, "eigenvalues", broken)
    assert main(["spectrum", "--k", "2", "--l", "2", "--gap", "1"]) == 3
    assert "numerical failure" in capsys.readouterr().err
    assert linalg.eigenvalues is not broken


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "negativity", "k": 0, "l": 0, "gap": 1, "pf": "1/3"}))
    assert main(["--config", str(cfg), "--pf", "1/2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["geometry"] == {"k": 0, "l": 0, "gap": 1, "pf": "1/2"}
    assert doc["exact"] == pytest.approx(np.log(1 + 4 / np.pi**2), abs=1e-12)
    assert doc["closed_form"] is not None and doc["ratio"] == pytest.approx(doc["exact"] / doc["closed_form"])


def test_unknown_config_key(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "spectrum", "k": 1, "l": 1, "gap": 1, "colour": "red"}))
    assert main(["--config", str(cfg)]) == 2
    with pytest.raises(ValidationError):
        build_config({"command": "spectrum", "k": 1, "l": 1, "gap": 1, "thresholds": {"speed": 1}}, {})


def test_negativity_off_half_filling(capsys):
    assert main(["negativity", "--k", "5", "--l", "5", "--gap", "3", "--pf", "1/3"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert set(doc) == {"exact", "closed_form", "ratio", "geometry"}
    assert doc["closed_form"] is None and doc["ratio"] is None


def test_density_csv(capsys, tmp_path):
    svg = tmp_path / "d.svg"
    assert main(["density", "--k", "40", "--l", "40", "--gap", "20", "--bins", "6", "--svg", str(svg)]) == 0
    rows = _rows(capsys.readouterr().out)
    assert tuple(rows[0]) == DENSITY_COLUMNS and len(rows) == 7
    widths = [float(r[3]) for r in rows[1:]]
    assert sum(widths) == pytest.approx(1.8)
    assert svg.exists()


def test_predict_csv(capsys):
    assert main(["predict", "--k", "29", "--l", "29", "--gap", "16"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert all(r[0] == "rh-prediction" and r[3] in ("plus", "minus") for r in rows[1:])
    assert all(float(r[4]) < 1e-8 for r in rows[1:])


def test_compare_flags_classification(capsys, tmp_path):
    svg = tmp_path / "c.svg"
    assert main(["compare", "--k", "29", "--l", "29", "--gap", "15", "--svg", str(svg)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["classification"]["agrees"] is True
    assert doc["classification"]["exact"] == "complex-pairs"
    n = doc["n_exact_in_window"]
    assert len(doc["matched"]) + len(doc["unmatched_exact"]) == n


def test_sweep_flags(capsys):
    assert main(["sweep", "--sweep-k", "5", "9", "--sweep-gap", "3", "4", "--threads", "3"]) == 0
    rows = _rows(capsys.readouterr().out)
    assert [(r[0], r[2]) for r in rows[1:]] == [("5", "3"), ("5", "4"), ("9", "3"), ("9", "4")]


def test_sweep_thread_env(monkeypatch, capsys):
    outputs = []
    for n in ("1", "5"):
        monkeypatch.setenv("NEGASPEC_THREADS", n)
        assert main(["sweep", "--sweep-k", "4", "7", "11", "--sweep-gap", "3", "5"]) == 0
        outputs.append(capsys.readouterr().out)
    assert outputs[0] == outputs[1]
    monkeypatch.setenv("NEGASPEC_THREADS", "zero")
    assert main(["sweep", "--sweep-k", "4", "--sweep-gap", "3"]) == 2


def test_repeat_runs_identical(tmp_path):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        assert main(["compare", "--k", "20", "--l", "31", "--gap", "9", "--pf", "2/5", "--out", str(p)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()


# --- matching ----------------------------------------------------------------


def test_match_identical_and_empty():
    geom = make_geometry(40, 40, 21)
    exact = spectra.exact_spectrum(geom, HALF)
    rep = match_spectra(exact, exact.lambdas)
    assert rep.match_fraction == 1.0 and all(d == 0 for _, _, d, _ in rep.matched)
    rep = match_spectra(exact, [])
    assert not rep.matched
    inside = exact.lambdas[np.abs(exact.lambdas.real) <= 0.9]
    assert sorted(rep.unmatched_exact, key=lambda z: (z.real, z.imag)) == sorted(
        inside.tolist(), key=lambda z: (z.real, z.imag)
    )


def test_match_is_symmetric():
    geom = make_geometry(60, 60, 31)
    exact = spectra.exact_spectrum(geom, HALF)
    pred = rh.predict_fine_structure(geom, HALF)
    ab = match_spectra(exact, pred)
    ba = match_spectra(pred, exact)
    key = lambda m: (m[0].real, m[0].imag, m[1].real, m[1].imag)
    assert sorted(ab.transposed().matched, key=key) == sorted(ba.matched, key=key)
    assert sorted(ab.unmatched_exact, key=abs) == sorted(ba.unmatched_predicted, key=abs)


def test_match_cap_respected():
    rep = match_spectra([0.0, 0.5], [0.3, 0.5], window=(-0.9, 0.9))
    for a, b, d, s in rep.matched:
        assert d <= 0.5 * s
    assert [m[:2] for m in rep.matched] == [(0.5, 0.5)]
