"""Command-line front end: levysinh <subcommand> --model file.json ...

Numeric output is CSV with a leading block of ``# key=value`` lines and
17 significant digits.  Exit codes: 0 success, 2 invalid input, 3 numerical
infeasibility.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import LevySinhError

log = logging.getLogger("levysinh")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def parse_range(text: str) -> np.ndarray:
    """'lo:hi:step' (inclusive), 'a,b,c' or a single number."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"range must be lo:hi:step, got {text!r}")
        lo, hi, step = map(float, parts)
        if not step > 0 or hi < lo:
            raise ValueError(f"bad range {text!r}")
        n = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return lo + step * np.arange(n)
    return np.array([float(v) for v in text.split(",") if v.strip()])


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return f"{float(v):.17g}"


def write_csv(out, header: dict, columns: Sequence[str], rows: Iterable[Sequence]):
    for k, v in header.items():
        out.write(f"# {k}={v if isinstance(v, str) else _fmt(v)}\n")
    out.write(",".join(columns) + "\n")
    for r in rows:
        out.write(",".join(_fmt(v) for v in r) + "\n")


def _load_model(path: str):
    from .models import model_from_dict

    with open(path) as fh:
        return model_from_dict(json.load(fh))


def _cert_header(certs) -> dict:
    certs = [c for c in certs if c is not None]
    if not certs:
        return {}
    c0 = certs[0]
    h = {f"cert_{k}": v for k, v in c0.header().items()}
    h["max_predicted_error"] = max(c.predicted_error for c in certs)
    h["max_N"] = max(c.N for c in certs)
    return h


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_classify(a, out):
    from .stieltjes import verify_sl

    m = _load_model(a.model)
    st = m.sinh_type()
    d = st.describe()
    out.write(f"family={m.family}\n")
    out.write(f"strip={_fmt(d['strip'][0])},{_fmt(d['strip'][1])}\n")
    out.write(f"cone_C={d['cone_C']}\n")
    out.write(f"cone_Cplus={_fmt(d['cone_Cplus'][0])},{_fmt(d['cone_Cplus'][1])}\n")
    out.write(f"order={d['order'][0]},{d['order'][1]}\n")
    if not a.no_sl:
        v = verify_sl(m)
        out.write(f"sl={v.kind}\n")
    return EXIT_OK


def cmd_psi(a, out):
    m = _load_model(a.model)
    xs = parse_range(a.xi)
    vals = np.asarray(m.psi(xs + 1j * a.im))
    write_csv(out, {"family": m.family, "im": a.im}, ["xi", "re_psi", "im_psi"],
              ((x, v.real, v.imag) for x, v in zip(xs, vals)))
    return EXIT_OK


def cmd_pdf(a, out):
    from . import inversion, oracle

    m = _load_model(a.model)
    xs = parse_range(a.x)
    rows, certs = [], []
    for x in xs:
        if a.oracle:
            rows.append((x, oracle.flat_pdf(m, a.t, x)))
            continue
        v, c = inversion.pdf(m, a.t, x, eps=a.tol, return_cert=True)
        rows.append((x, v))
        certs.append(c)
    write_csv(out, {"family": m.family, "t": a.t, "tol": a.tol, **_cert_header(certs)}, ["x", "pdf"], rows)
    return EXIT_OK


def cmd_tail(a, out):
    from . import inversion

    m = _load_model(a.model)
    xs = parse_range(a.x)
    rows, certs = [], []
    for x in xs:
        v, c = inversion.tail_prob(m, a.t, x, eps=a.tol, return_cert=True)
        rows.append((x, v))
        certs.append(c)
    write_csv(out, {"family": m.family, "t": a.t, "tol": a.tol, **_cert_header(certs)}, ["x", "tail"], rows)
    return EXIT_OK


def cmd_price_eur(a, out):
    from . import inversion, oracle
    from .inversion import PayoffTransform

    m = _load_model(a.model)
    if a.risk_neutral:
        m = inversion.risk_neutral(m, a.r)
    Ks = parse_range(a.K)
    make = {"call": PayoffTransform.call, "put": PayoffTransform.put,
            "digital": PayoffTransform.digital_call}[a.type]
    x = math.log(a.S0)
    rows, certs = [], []
    for K in Ks:
        p = make(K)
        if a.oracle:
            lo, hi = p.admissible_strip
            mm, mp = m.strip().mu_minus, m.strip().mu_plus
            w = 0.5 * (max(lo, mm) + min(hi, mp)) if math.isfinite(max(lo, mm)) else min(hi, mp) - 0.5
            xp = x + m.mu * a.T
            v = oracle.flat_inverse(lambda xi: np.exp(1j * xp * xi - a.T * (a.r + m.psi0(xi))) * p(xi), w).real
            rows.append((K, v))
            continue
        v, c = inversion.price_european(m, a.r, a.T, x, p, eps=a.tol, return_cert=True)
        rows.append((K, v))
        certs.append(c)
    write_csv(out, {"family": m.family, "type": a.type, "S0": a.S0, "r": a.r, "T": a.T, "tol": a.tol,
                    **_cert_header(certs)}, ["K", "price"], rows)
    return EXIT_OK


def cmd_price_barrier(a, out):
    from . import inversion, laplace

    m = _load_model(a.model)
    if a.risk_neutral:
        m = inversion.risk_neutral(m, a.r)
    methods = ["GS", "Bromwich"] if a.method == "both" else [a.method]
    rows = []
    for meth in methods:
        res = laplace.price_no_touch(m, a.H, a.T, a.S0, a.r, eps=a.tol, method=meth, M=a.M,
                                     return_result=True)
        rows.append((res.method, a.H, a.T, res.price, res.predicted_error,
                     a.M if meth == "GS" else None, res.nodes if meth != "GS" else None))
    hdr = {"family": m.family, "S0": a.S0, "r": a.r, "tol": a.tol}
    if len(rows) == 2:
        hdr["method_gap"] = abs(rows[0][3] - rows[1][3])
    write_csv(out, hdr, ["method", "H", "T", "price", "predicted_error", "gs_M", "bromwich_N"], rows)
    return EXIT_OK


def cmd_wh(a, out):
    from . import wiener_hopf as wh

    m = _load_model(a.model)
    xs = parse_range(a.xi)
    pp = np.atleast_1d(wh.phi_plus(m, a.q, xs, eps=a.tol))
    pm = np.atleast_1d(wh.phi_minus(m, a.q, xs, eps=a.tol))
    ident = np.abs(pp * pm * (a.q + np.asarray(m.psi(xs))) / a.q - 1.0)
    write_csv(out, {"family": m.family, "q": a.q, "tol": a.tol, "max_identity_defect": float(np.max(ident))},
              ["xi", "re_phi_plus", "im_phi_plus", "re_phi_minus", "im_phi_minus"],
              ((x, p.real, p.imag, n.real, n.imag) for x, p, n in zip(xs, pp, pm)))
    return EXIT_OK


def cmd_roots(a, out):
    from . import wiener_hopf as wh

    m = _load_model(a.model)
    rep = wh.strip_roots(m, a.q)
    rows = []
    for side, r in (("lower", rep.root_lower), ("upper", rep.root_upper)):
        rows.append((side, r[0] if r else None, r[1] if r else None, rep.flags.get(side, "")))
    write_csv(out, {"family": m.family, "q": a.q}, ["side", "beta", "residual", "flag"], rows)
    return EXIT_OK


def cmd_sl_measure(a, out):
    from . import stieltjes

    m = _load_model(a.model)
    if a.t_grid:
        grid = parse_range(a.t_grid)
    else:
        grid = stieltjes.default_grid(m, a.side, t_max=a.t_max, ratio=a.ratio)
    em = stieltjes.extract_measure(m, a.side, grid, on_residual="report")
    for k, v in {"family": m.family, "side": a.side, "method": "|".join(sorted(set(map(str, em.method)))),
                 "max_residual": float(np.max(np.asarray(em.residual, dtype=float), initial=0.0))}.items():
        out.write(f"# {k}={v if isinstance(v, str) else _fmt(v)}\n")
    out.write(em.to_csv())
    return EXIT_OK


def cmd_subordinate(a, out):
    from . import construct

    if a.bm_subordinand:
        X = _load_model(a.model)
        Z, _ = construct.bm_subordinand(X, a.beta)
        qs = parse_range(a.q)
        vals = np.asarray(Z(qs))
        write_csv(out, {"family": X.family, "drift": Z.drift, "mu_cut": Z.mu_cut, "order": str(Z.order)},
                  ["q", "re_Psi", "im_Psi"], ((q, v.real, v.imag) for q, v in zip(qs, vals)))
        return EXIT_OK
    if not (a.Y and a.Z):
        raise argparse.ArgumentTypeError("need --Y and --Z (or --bm-subordinand --model)")
    Y = _load_model(a.Y)
    Zm = _load_model(a.Z)
    X = construct.subordinate(Y, Zm)
    if a.out_model:
        with open(a.out_model, "w") as fh:
            json.dump(X.to_dict(), fh, indent=2, sort_keys=True)
    xs = parse_range(a.xi)
    vals = np.asarray(X.psi(xs))
    st = X.sinh_type()
    s = st.strip
    write_csv(out, {"family": X.family, "strip": f"{_fmt(s.mu_minus)},{_fmt(s.mu_plus)}",
                    "order": f"{st.order[0]},{st.order[1]}"},
              ["xi", "re_psi", "im_psi"], ((x, v.real, v.imag) for x, v in zip(xs, vals)))
    return EXIT_OK


# ---------------------------------------------------------------------------

def _tol(text: str) -> float:
    v = float(text)
    if not 1e-14 <= v <= 1e-1:
        raise argparse.ArgumentTypeError("tolerance must lie in [1e-14, 1e-1]")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="levysinh", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="cmd", required=True)

    def add(name, func, model=True, help=None):
        sp = sub.add_parser(name, help=help)
        if model:
            sp.add_argument("--model", required=True, help="model JSON file")
        sp.add_argument("--out", default="-", help="output file (default stdout)")
        sp.add_argument("--tol", type=_tol, default=1e-10)
        sp.add_argument("--seed", type=int, default=None, help=argparse.SUPPRESS)
        sp.add_argument("--oracle", action="store_true", help=argparse.SUPPRESS)
        sp.set_defaults(func=func)
        return sp

    sp = add("classify", cmd_classify, help="strip, cones, order and SL verdict")
    sp.add_argument("--no-sl", action="store_true", help="skip the SL classification")
    sp = add("psi", cmd_psi, help="characteristic exponent on a line")
    sp.add_argument("--xi", required=True)
    sp.add_argument("--im", type=float, default=0.0)
    sp = add("pdf", cmd_pdf, help="density of X_t")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--x", required=True)
    sp = add("tail", cmd_tail, help="P(X_t > x)")
    sp.add_argument("--t", type=float, required=True)
    sp.add_argument("--x", required=True)
    sp = add("price-eur", cmd_price_eur, help="European call/put/digital prices")
    sp.add_argument("--type", choices=["call", "put", "digital"], default="call")
    sp.add_argument("--K", required=True)
    sp.add_argument("--S0", type=float, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--r", type=float, default=0.0)
    sp.add_argument("--risk-neutral", action="store_true", help="replace the drift by the risk-neutral one")
    sp = add("price-barrier", cmd_price_barrier, help="no-touch claim with a lower barrier")
    sp.add_argument("--H", type=float, required=True)
    sp.add_argument("--S0", type=float, required=True)
    sp.add_argument("--T", type=float, required=True)
    sp.add_argument("--r", type=float, default=0.0)
    sp.add_argument("--method", choices=["GS", "Bromwich", "both"], default="Bromwich")
    sp.add_argument("--M", type=int, default=8)
    sp.add_argument("--risk-neutral", action="store_true")
    sp = add("wh", cmd_wh, help="Wiener-Hopf factors on a real grid")
    sp.add_argument("--q", type=float, required=True)
    sp.add_argument("--xi", required=True)
    sp = add("roots", cmd_roots, help="roots of q + psi on the imaginary axis")
    sp.add_argument("--q", type=float, required=True)
    sp = add("sl-measure", cmd_sl_measure, help="extract the SL measure of one side")
    sp.add_argument("--side", choices=["+", "-"], required=True)
    sp.add_argument("--t-grid", default=None, help="cell edges lo:hi:step (default geometric)")
    sp.add_argument("--t-max", type=float, default=1e4)
    sp.add_argument("--ratio", type=float, default=1.3)
    sp = add("subordinate", cmd_subordinate, model=False, help="compose Y with a subordinator Z")
    sp.add_argument("--Y")
    sp.add_argument("--Z")
    sp.add_argument("--xi", default="-5:5:1")
    sp.add_argument("--out-model", default=None)
    sp.add_argument("--bm-subordinand", action="store_true", help="Brownian subordinand of --model")
    sp.add_argument("--model")
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--q", default="0:10:1")
    return p


_NEG_VALUE = re.compile(r"^-[0-9.]")


def _glue_negative_values(argv: Sequence[str]) -> list:
    """'--x -2:2:0.1' -> '--x=-2:2:0.1' so argparse does not read the value as an option."""
    out = []
    it = list(argv)
    i = 0
    while i < len(it):
        tok = it[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(it) and _NEG_VALUE.match(it[i + 1]):
            out.append(f"{tok}={it[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    argv = _glue_negative_values(sys.argv[1:] if argv is None else argv)
    try:
        a = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    out = sys.stdout if a.out == "-" else open(a.out, "w", newline="")
    try:
        return a.func(a, out)
    except LevySinhError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return e.exit_code
    except (OSError, ValueError, KeyError, json.JSONDecodeError, argparse.ArgumentTypeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        if out is not sys.stdout:
            out.close()


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
