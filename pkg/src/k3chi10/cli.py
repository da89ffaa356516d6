"""Command line front end.  Results go to stdout as canonical JSON, diagnostics to stderr."""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from fractions import Fraction

from . import __version__, enumerative, fock, forms, igusa, verify
from .series import HalfLaurent, SeriesError, TruncSeries, _coeff_to_json, series_to_json

# ---------------------------------------------------------------------------
# encoding


def encode(obj):
    """JSON-ready form of results: series, Fractions, states and nested containers."""
    if isinstance(obj, TruncSeries):
        return {"series": series_to_json(obj)}
    if isinstance(obj, HalfLaurent):
        return _coeff_to_json(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {_key(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(x) for x in obj]
    return obj


def _key(k) -> str:
    if isinstance(k, tuple):
        return ",".join(str(x) for x in k)
    return str(k)


def _state_json(st) -> list:
    return [[m, g] for m, g in st]


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def emit(subcommand: str, limits: dict, result, timing: bool, t0: float) -> None:
    body = encode(result)
    digest = hashlib.sha256(canonical(body).encode()).hexdigest()
    wall = round(time.perf_counter() - t0, 3)
    manifest = {"subcommand": subcommand, "limits": limits, "engine_version": __version__,
                "digest": digest}
    if timing:
        manifest["wall_time"] = wall
    print(canonical({"manifest": manifest, "result": body}))
    print(f"{subcommand}: digest {digest[:16]} in {wall}s", file=sys.stderr)


def parse_window(s: str) -> tuple:
    try:
        a, b = (int(x) for x in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"window must be 'a,b', got {s!r}")
    if a > b:
        raise argparse.ArgumentTypeError("window needs a <= b")
    return (a, b)


def parse_keys(s: str) -> list:
    out = []
    for part in s.split(";"):
        part = part.strip()
        if part:
            m, l = (int(x) for x in part.split(","))
            out.append((m, l))
    if not out:
        raise argparse.ArgumentTypeError("no keys given")
    return out


# ---------------------------------------------------------------------------
# forms

FORM_NAMES = ("E2", "E4", "E6", "E8", "E10", "Delta", "Delta_inv", "K", "F2", "G", "Z", "wp", "wp_theta")


def form_series(name: str, N: int, window) -> TruncSeries:
    tt = 2 * window[1] + 1
    if name.startswith("E") and name[1:].isdigit():
        return forms.eisenstein(int(name[1:]), N)
    table = {
        "Delta": lambda: forms.delta(N),
        "Delta_inv": lambda: forms.delta_inverse(N),
        "K": lambda: forms.theta_K(N),
        "F2": lambda: forms.theta_F_squared(N),
        "G": lambda: forms.g_function(N),
        "Z": lambda: forms.z_function(N),
        "wp": lambda: forms.weierstrass_p(N, t_trunc=tt, method="series"),
        "wp_theta": lambda: forms.weierstrass_p(N, t_trunc=tt, method="theta"),
    }
    if name not in table:
        raise SeriesError(f"unknown form {name!r}")
    s = table[name]()
    return TruncSeries(s.var, s.val, s.coeffs, s.trunc)


def cmd_forms(a):
    return {"name": a.name, "series": form_series(a.name, a.qmax, a.window)}, \
        {"qmax": a.qmax, "window": list(a.window)}


# ---------------------------------------------------------------------------
# igusa

CHI10_METHODS = {"product": igusa.chi10_product, "hecke": igusa.chi10_exp_hecke,
                 "lift": igusa.chi10_additive_lift}


def cmd_igusa(a):
    if a.what == "chi10":
        S = CHI10_METHODS[a.method](a.qmax, a.qtmax)
        return {"chi10": S}, {"qmax": a.qmax, "qtmax": a.qtmax, "method": a.method}
    fam = igusa.inverse_chi10(a.qmax + 2, a.d + 3, a.window)
    lim = {"d": a.d, "qmax": a.qmax, "window": list(a.window)}
    if a.what == "psi":
        return {"psi": fam.psi[a.d].truncate(a.qmax)}, lim
    psi = fam.psi[a.d].truncate(a.qmax)
    phi = igusa.polar_part(a.d, a.qmax, a.window)
    H = igusa.hilb_H(a.d, a.qmax, a.window, fam=fam)
    return {"psi": psi, "phi": phi, "H": TruncSeries(H.var, H.val, H.coeffs, H.trunc)}, lim


# ---------------------------------------------------------------------------
# fock

EXAMPLES = {"i": fock.example_i, "ii": fock.example_ii, "iii": fock.example_iii}


SEEDS = {"printed": fock.printed_seeds, "wdvv": fock.wdvv_seeds}


def cmd_fock(a):
    if a.what == "example":
        s = EXAMPLES[a.which](a.d, a.qmax, a.window)
        return {"example": a.which, "d": a.d, "value": s}, {"d": a.d, "qmax": a.qmax, "window": list(a.window)}
    if a.what == "trace":
        tr = fock.trace_E0(a.dmax, a.qmax, a.window)
        return {"trace": tr}, {"dmax": a.dmax, "qmax": a.qmax, "window": list(a.window)}
    if a.what == "wdvv":
        phi = SEEDS[a.seeds](a.qmax + 2)
        bad = fock.wdvv_check(a.d, a.gamma, a.gamma2, a.qmax, phi=phi, window=a.window, max_part=a.max_part)
        res = {kind: [{"bra": _state_json(mu), "ket": _state_json(nu), "residual": s}
                      for (mu, nu), s in sorted(ent.items())] for kind, ent in bad.items()}
        return {"vanishes": not any(bad.values()), "nonzero": res}, \
            {"d": a.d, "gamma": a.gamma, "gamma2": a.gamma2, "qmax": a.qmax,
             "window": list(a.window), "max_part": a.max_part, "seeds": a.seeds}
    rep = fock.phi_solve(a.keys, a.qmax, d=a.d, window=a.window, max_part=a.max_part)
    reps = sorted({fock.PhiTable.representative(k) for k in a.keys})
    out = {"status": rep.status,
           "orders": {str(j): v for j, v in sorted(rep.orders.items())},
           "undetermined": [[list(k), j, e] for k, j, e in rep.undetermined],
           "entries": {_key(k): rep.table[k] for k in reps if k in rep.table}}
    return out, {"keys": [list(k) for k in a.keys], "qmax": a.qmax, "d": a.d,
                 "window": list(a.window), "max_part": a.max_part}


# ---------------------------------------------------------------------------
# enumerative


def cmd_enum(a):
    if a.what == "gw":
        gw = enumerative.gw_disconnected(a.umax, a.qmax, a.qtmax)
        if a.connected:
            gw = enumerative.connect(gw)
        return {"connected": gw.connected, "series": gw.series}, \
            {"umax": a.umax, "qmax": a.qmax, "qtmax": a.qtmax, "connected": a.connected}
    if a.what == "multiple-cover":
        need = max(a.m ** 2 * (a.h - 1) + 1, 1) + 2
        conn = enumerative.connect(enumerative.gw_disconnected(a.umax, need + 1, a.qtmax))
        tab = enumerative.primitive_table(conn)
        return {"m": a.m, "h": a.h, "series": enumerative.conjecture_B(a.m, a.h, tab)}, \
            {"m": a.m, "h": a.h, "umax": a.umax, "qtmax": a.qtmax}
    if a.what == "c2":
        fx = enumerative.load_fixtures(a.fixtures)
        out = {}
        for name in sorted(fx["primitive"]):
            g, dl, prim = enumerative.fixture_primitive(fx, name)
            vals = {}
            for h in a.h or [1, 2]:
                for m in range(1, a.mmax + 1):
                    try:
                        vals[f"h={h},m={m}"] = enumerative.conjecture_C2(m, g, dl, prim, h)
                    except enumerative.MissingPrimitive:
                        continue
            out[name] = vals
        geo = enumerative.genus2_geometric_total(fx) if "imprimitive_geometry" in fx else ()
        return {"c2": out, "geometric_terms": list(geo)}, {"fixtures": a.fixtures or "bundled", "h": a.h or [1, 2],
                                                            "mmax": a.mmax}
    ky = enumerative.kawai_yoshioka(a.wmax, a.ymax, a.qmax)
    rows = []
    for (q, y), wp in sorted(ky.terms.items()):
        for w, c in sorted(wp.items()):
            if c and (a.wmax is None or abs(w) <= a.wmax):
                rows.append([q, y, w, c])
    return {"region": "ascending in y, exact in w, q-exponent h-1", "terms": rows}, \
        {"wmax": a.wmax, "ymax": a.ymax, "qmax": a.qmax}


# ---------------------------------------------------------------------------
# dump and verify

DUMP_OBJECTS = ("chi10", "psi", "H", "phi-table", "E-matrix", "gw", "ky")


def cmd_dump(a):
    lim = {"object": a.object, "qmax": a.qmax, "qtmax": a.qtmax, "d": a.d, "window": list(a.window)}
    if a.object == "chi10":
        return {"chi10": igusa.chi10_product(a.qmax, a.qtmax)}, lim
    if a.object == "psi":
        fam = igusa.inverse_chi10(a.qmax + 2, a.d + 3, a.window)
        return {"psi": fam.psi[a.d].truncate(a.qmax)}, lim
    if a.object == "H":
        # -d counts points here: n points sit at qt^(n-1)
        H = igusa.hilb_H_points(a.d, a.qmax, a.window)
        return {"points": a.d, "H": TruncSeries(H.var, H.val, H.coeffs, H.trunc)}, lim
    if a.object == "phi-table":
        tab = fock.printed_seeds(a.qmax)
        return {"seeds": {_key(k): v for k, v in sorted(tab.seeds.items())}}, lim
    if a.object == "E-matrix":
        tt = 2 * a.window[1] + 1

        def run():
            return fock.E_matrix(a.d, a.r, fock.printed_seeds(a.qmax + 2), a.qmax)
        M = fock.adaptive(run, tt)
        lim["r"] = a.r
        entries = [{"row": _state_json(r), "col": _state_json(c), "value": fock._cap(v, tt)}
                   for (r, c), v in sorted(M.items())]
        return {"entries": entries}, lim
    if a.object == "gw":
        gw = enumerative.gw_disconnected(a.umax, a.qmax, a.qtmax)
        row = enumerative.yau_zaslow_row(a.qmax)
        lim["umax"] = a.umax
        return {"series": gw.series, "genus0_row": row}, lim
    ky = enumerative.kawai_yoshioka(None, a.ymax, a.qmax)
    lim["ymax"] = a.ymax
    return {"terms": [[q, y, w, c] for (q, y), wp in sorted(ky.terms.items())
                      for w, c in sorted(wp.items()) if c]}, lim


def cmd_verify(a):
    results = verify.run_level(a.level, log=lambda s: print(s, file=sys.stderr))
    report = [{"name": r.name, "anchor": r.anchor, "ok": r.ok, "details": r.details} for r in results]
    return {"level": a.level, "passed": all(r.ok for r in results), "checks": report}, {"level": a.level}


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="k3chi10", description=__doc__)
    p.add_argument("--timing", action="store_true", help="record wall time in the manifest")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command")

    def win(sp, default="-10,10"):
        sp.add_argument("--window", type=parse_window, default=parse_window(default))

    f = sub.add_parser("forms", help="classical special functions")
    fsub = f.add_subparsers(dest="action", required=True)
    fd = fsub.add_parser("dump")
    fd.add_argument("name", choices=FORM_NAMES)
    fd.add_argument("--qmax", type=int, default=6)
    win(fd)

    ig = sub.add_parser("igusa", help="chi_10 and its inverse")
    isub = ig.add_subparsers(dest="what", required=True)
    c = isub.add_parser("chi10")
    c.add_argument("--qmax", type=int, default=5)
    c.add_argument("--qtmax", type=int, default=5)
    c.add_argument("--method", choices=sorted(CHI10_METHODS), default="product")
    for name in ("psi", "split"):
        s = isub.add_parser(name)
        s.add_argument("-d", type=int, required=True, help="index of psi_d, the qt^d coefficient")
        s.add_argument("--qmax", type=int, default=5)
        win(s)

    fk = sub.add_parser("fock", help="the operators E^(r) on the Fock space")
    ksub = fk.add_subparsers(dest="what", required=True)
    e = ksub.add_parser("example")
    e.add_argument("which", choices=sorted(EXAMPLES))
    e.add_argument("-d", type=int, required=True)
    e.add_argument("--qmax", type=int, default=5)
    win(e)
    t = ksub.add_parser("trace")
    t.add_argument("--dmax", type=int, default=2)
    t.add_argument("--qmax", type=int, default=5)
    win(t)
    w = ksub.add_parser("wdvv")
    w.add_argument("-d", type=int, required=True)
    w.add_argument("--gamma", default="B")
    w.add_argument("--gamma2", default="F")
    w.add_argument("--qmax", type=int, default=4)
    w.add_argument("--max-part", type=int, default=None)
    w.add_argument("--seeds", choices=sorted(SEEDS), default="printed",
                   help="'wdvv' reverses the sign of phi_{2,-1}, which F_3 requires")
    win(w)
    so = ksub.add_parser("solve")
    so.add_argument("--keys", type=parse_keys, required=True)
    so.add_argument("--qmax", type=int, default=2)
    so.add_argument("-d", type=int, default=None)
    so.add_argument("--max-part", type=int, default=None)
    win(so)

    en = sub.add_parser("enum", help="curve-counting series")
    esub = en.add_subparsers(dest="what", required=True)
    g = esub.add_parser("gw")
    g.add_argument("--umax", type=int, default=6)
    g.add_argument("--qmax", type=int, default=4)
    g.add_argument("--qtmax", type=int, default=4)
    g.add_argument("--connected", action="store_true")
    mc = esub.add_parser("multiple-cover")
    mc.add_argument("-m", type=int, required=True)
    mc.add_argument("-H", "--h", dest="h", type=int, required=True)
    mc.add_argument("--umax", type=int, default=4)
    mc.add_argument("--qtmax", type=int, default=3)
    c2 = esub.add_parser("c2")
    c2.add_argument("--fixtures", default=None)
    c2.add_argument("--mmax", type=int, default=6)
    c2.add_argument("-H", "--h", dest="h", type=int, action="append")
    ky = esub.add_parser("ky")
    ky.add_argument("--wmax", type=int, default=None)
    ky.add_argument("--ymax", type=int, default=5)
    ky.add_argument("--qmax", type=int, default=4)

    d = sub.add_parser("dump", help="dump a registered object")
    d.add_argument("object", choices=DUMP_OBJECTS)
    d.add_argument("--qmax", type=int, default=4)
    d.add_argument("--qtmax", type=int, default=4)
    d.add_argument("--umax", type=int, default=6)
    d.add_argument("--ymax", type=int, default=5)
    d.add_argument("-d", type=int, default=1,
                   help="degree; for H it counts points, so H with d points is the qt^(d-1) part")
    d.add_argument("-r", type=int, default=0)
    win(d)

    v = sub.add_parser("verify", help="run the identity suite")
    v.add_argument("level", choices=sorted(verify.LEVELS))
    return p


HANDLERS = {"forms": cmd_forms, "igusa": cmd_igusa, "fock": cmd_fock, "enum": cmd_enum,
            "dump": cmd_dump, "verify": cmd_verify}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return 2
    t0 = time.perf_counter()
    try:
        result, limits = HANDLERS[args.command](args)
    except (SeriesError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    name = args.command + "".join(f" {getattr(args, k)}" for k in ("action", "what", "object")
                                  if getattr(args, k, None))
    emit(name, limits, result, args.timing, t0)
    if args.command == "verify" and not result["passed"]:
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
