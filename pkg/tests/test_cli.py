import csv
import io
import json
import math
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import norm

from levysinh import cli
from levysinh import models as M

DATA = Path(__file__).parent / "data"
NIG = str(DATA / "nig.json")
BM = str(DATA / "bm.json")


def _run(capsys, *argv):
    rc = cli.run(list(argv))
    cap = capsys.readouterr()
    return rc, cap.out, cap.err


def _table(text):
    header = {}
    body = []
    for line in text.splitlines():
        if line.startswith("# "):
            k, _, v = line[2:].partition("=")
            header[k] = v
        else:
            body.append(line)
    return header, list(csv.DictReader(io.StringIO("\n".join(body))))


def test_classify(capsys):
    rc, out, _ = _run(capsys, "classify", "--model", NIG)
    assert rc == 0
    assert "strip=-1.5,2.5" in out and "sl=SL" in out


def test_psi_negative_range(capsys):
    rc, out, _ = _run(capsys, "psi", "--model", NIG, "--xi", "-2:2:0.5")
    assert rc == 0
    hdr, rows = _table(out)
    assert hdr["family"] and len(rows) == 9
    xi = np.array([float(r["xi"]) for r in rows])
    got = np.array([complex(float(r["re_psi"]), float(r["im_psi"])) for r in rows])
    np.testing.assert_allclose(got, M.NIG(alpha=2.0, beta=0.5).psi(xi), rtol=1e-15)


def test_pdf_csv_and_certificate(capsys):
    rc, out, _ = _run(capsys, "pdf", "--model", BM, "--t", "1", "--x", "-2:2:0.1")
    assert rc == 0
    hdr, rows = _table(out)
    assert len(rows) == 41
    assert float(hdr["max_predicted_error"]) <= 1e-10 * (1 + 1e-9)  # rounding in the step formula
    x = np.array([float(r["x"]) for r in rows])
    np.testing.assert_allclose([float(r["pdf"]) for r in rows], norm.pdf(x), atol=1e-10)


def test_tail_writes_file(tmp_path, capsys):
    dest = tmp_path / "tail.csv"
    rc, out, _ = _run(capsys, "tail", "--model", BM, "--t", "1", "--x", "0:1:1", "--out", str(dest))
    assert rc == 0 and out == ""
    _, rows = _table(dest.read_text())
    assert float(rows[1]["tail"]) == pytest.approx(norm.sf(1.0), abs=1e-10)


def test_price_eur_black_scholes(capsys):
    rc, out, _ = _run(capsys, "price-eur", "--model", BM, "--K", "90:110:10", "--S0", "100", "--T", "1",
                      "--r", "0.05", "--risk-neutral")
    assert rc == 0
    _, rows = _table(out)
    for r in rows:
        K = float(r["K"])
        d1 = (math.log(100 / K) + 0.55) / 1.0
        ref = 100 * norm.cdf(d1) - K * math.exp(-0.05) * norm.cdf(d1 - 1.0)
        assert float(r["price"]) == pytest.approx(ref, abs=1e-7)


def test_price_barrier_both(capsys):
    rc, out, _ = _run(capsys, "price-barrier", "--model", str(DATA / "kou.json"), "--H", "90", "--S0", "100",
                      "--T", "1", "--r", "0.02", "--risk-neutral", "--method", "both")
    assert rc == 0
    hdr, rows = _table(out)
    assert [r["method"] for r in rows] == ["GS", "Bromwich"]
    assert float(hdr["method_gap"]) < 1e-5


def test_wh_and_roots(capsys):
    rc, out, _ = _run(capsys, "wh", "--model", NIG, "--q", "1", "--xi", "-2:2:2")
    assert rc == 0
    hdr, rows = _table(out)
    assert len(rows) == 3 and float(hdr["max_identity_defect"]) < 1e-9
    rc, out, _ = _run(capsys, "roots", "--model", NIG, "--q", "1")
    _, rows = _table(out)
    assert rc == 0 and [r["side"] for r in rows] == ["lower", "upper"]
    assert all(float(r["residual"]) < 1e-12 for r in rows)


def test_sl_measure_header(capsys):
    rc, out, _ = _run(capsys, "sl-measure", "--model", NIG, "--side", "-", "--t-max", "50")
    assert rc == 0
    hdr, rows = _table(out)
    assert {"family", "side", "method", "max_residual"} <= set(hdr)
    assert list(rows[0]) == ["t_lo", "t_hi", "mass", "residual"]


def test_subordinate_ig(capsys):
    rc, out, _ = _run(capsys, "subordinate", "--Y", BM, "--Z", str(DATA / "ig_sub.json"), "--xi", "0:2:1")
    assert rc == 0
    _, rows = _table(out)
    assert float(rows[2]["re_psi"]) == pytest.approx(2 * math.sqrt(2) - 2, rel=1e-12)


def test_exit_codes(capsys, tmp_path):
    assert _run(capsys, "nope")[0] == 2
    assert _run(capsys, "psi", "--model", NIG, "--xi", "0:1:1", "--tol", "5")[0] == 2
    rc, _, err = _run(capsys, "pdf", "--model", NIG, "--t", "-1", "--x", "0:1:1")
    assert rc == 2 and "DomainError" in err
    assert _run(capsys, "pdf", "--model", str(tmp_path / "missing.json"), "--t", "1", "--x", "0:1:1")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"family": "NIG", "alpha": 1.0, "beta": 2.0}))
    assert _run(capsys, "classify", "--model", str(bad))[0] == 2
    rc, _, err = _run(capsys, "subordinate", "--bm-subordinand", "--model", str(DATA / "kou.json"))
    assert rc in (2, 3) and "error" in err


def test_help_exits_zero(capsys):
    assert _run(capsys, "--help")[0] == 0
