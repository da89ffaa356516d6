import json
import subprocess
import sys

import pytest

from k3chi10 import cli, enumerative, fock, forms, igusa
from k3chi10.series import series_from_json


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr().out
    return code, (json.loads(out) if out else None), out


def series_of(blob):
    return series_from_json(blob["series"])


def test_no_arguments_prints_usage(capsys):
    assert cli.main([]) == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_dump_object(capsys):
    with pytest.raises(SystemExit) as e:
        cli.main(["dump", "nope"])
    assert e.value.code == 2


def test_forms_dump_roundtrip(capsys):
    code, doc, _ = run(capsys, "forms", "dump", "G", "--qmax", "4")
    assert code == 0
    assert series_of(doc["result"]["series"]) == forms.g_function(4)
    assert doc["manifest"]["limits"] == {"qmax": 4, "window": [-10, 10]}


def test_forms_dump_windowed(capsys):
    _, doc, _ = run(capsys, "forms", "dump", "wp", "--qmax", "3", "--window=-4,4")
    s = series_of(doc["result"]["series"])
    assert s[0].trunc == 9


@pytest.mark.parametrize("method", ["product", "hecke", "lift"])
def test_igusa_chi10(capsys, method):
    _, doc, _ = run(capsys, "igusa", "chi10", "--qmax", "3", "--qtmax", "3", "--method", method)
    assert series_of(doc["result"]["chi10"]) == igusa.chi10_product(3, 3)


def test_igusa_psi_and_split(capsys):
    _, doc, _ = run(capsys, "igusa", "psi", "-d", "0", "--qmax", "3", "--window=-6,6")
    fam = igusa.inverse_chi10(5, 3, (-6, 6))
    assert series_of(doc["result"]["psi"]) == fam.psi[0].truncate(3)
    _, doc, _ = run(capsys, "igusa", "split", "-d", "0", "--qmax", "3", "--window=-8,8")
    r = doc["result"]
    psi, phi, H = (series_of(r[k]) for k in ("psi", "phi", "H"))
    for n in range(-1, 3):
        assert (-psi[n] - phi[n]).agrees_with(H[n])


def test_fock_example_trace_wdvv(capsys):
    _, doc, _ = run(capsys, "fock", "example", "i", "-d", "2", "--qmax", "3", "--window=-6,6")
    assert series_of(doc["result"]["value"]) == fock.example_i(2, 3, (-6, 6))
    _, doc, _ = run(capsys, "fock", "trace", "--dmax", "1", "--qmax", "3", "--window=-6,6")
    assert set(doc["result"]["trace"]) == {"0", "1"}
    _, doc, _ = run(capsys, "fock", "wdvv", "-d", "1", "--qmax", "3", "--window=-6,6")
    assert doc["result"]["vanishes"] is True


def test_fock_wdvv_seed_choice(capsys):
    args = ("fock", "wdvv", "-d", "3", "--max-part", "1", "--qmax", "2", "--window=-6,6")
    _, doc, _ = run(capsys, *args)
    assert doc["result"]["vanishes"] is False and doc["result"]["nonzero"]["second"]
    _, doc, _ = run(capsys, *args, "--seeds", "wdvv")
    assert doc["result"]["vanishes"] is True
    assert doc["manifest"]["limits"]["seeds"] == "wdvv"


def test_fock_solve(capsys):
    _, doc, _ = run(capsys, "fock", "solve", "--keys", "2,0", "--qmax", "1", "-d", "2")
    r = doc["result"]
    assert r["status"] == "unique"
    got = series_of(r["entries"]["-2,0"])
    assert got == fock.printed_seeds(1)[(-2, 0)]


def test_enum_commands(capsys):
    _, doc, _ = run(capsys, "enum", "gw", "--umax", "2", "--qmax", "3", "--qtmax", "3")
    assert series_of(doc["result"]["series"]) == enumerative.gw_disconnected(2, 3, 3).series
    _, doc, _ = run(capsys, "enum", "multiple-cover", "-m", "2", "-H", "1")
    assert doc["result"]["m"] == 2
    _, doc, _ = run(capsys, "enum", "c2")
    assert doc["result"]["c2"]["tau0(p),tau0(p)|g=2"]["h=2,m=2"] == "8760"
    assert doc["result"]["c2"]["tau0(p)|g=1"]["h=1,m=6"] == "12"
    _, doc, _ = run(capsys, "enum", "ky", "--ymax", "3", "--qmax", "3")
    ky = enumerative.KYSeries(3, 3)
    rows = {(q, y, w): c for q, y, w, c in doc["result"]["terms"]}
    assert rows == {(q, y, w): c for (q, y), wp in ky.terms.items() for w, c in wp.items() if c}


def test_dump_chi10_first_block(capsys):
    _, doc, _ = run(capsys, "dump", "chi10", "--qmax", "3", "--qtmax", "3")
    S = series_of(doc["result"]["chi10"])
    K = forms.theta_K(3)
    assert S[1].equal_upto(K * K * forms.delta(3).map(lambda c: c * forms.ONE), 3)  # -F^2 Delta


def test_dump_H_one_point(capsys):
    _, doc, _ = run(capsys, "dump", "H", "-d", "1", "--qmax", "3")
    H = series_of(doc["result"]["H"])
    ref = forms.eisenstein(2, 4) * forms.delta_inverse(3) * -2
    assert all(H[n] == ref[n] * forms.ONE for n in range(-1, 3))


def test_dump_gw_and_others(capsys):
    _, doc, _ = run(capsys, "dump", "gw", "--qmax", "4", "--umax", "2")
    assert doc["result"]["genus0_row"] == ["1", "24", "324", "3200"]
    _, doc, _ = run(capsys, "dump", "phi-table", "--qmax", "2")
    assert series_of(doc["result"]["seeds"]["1,0"]) == fock.printed_seeds(2)[(1, 0)]
    _, doc, _ = run(capsys, "dump", "E-matrix", "-d", "1", "--qmax", "2", "--window=-5,5")
    assert doc["result"]["entries"]
    _, doc, _ = run(capsys, "dump", "psi", "-d", "-1", "--qmax", "2")
    assert series_of(doc["result"]["psi"])[-1][2] == 1
    _, doc, _ = run(capsys, "dump", "ky", "--qmax", "2", "--ymax", "2")
    assert [-1, 1, 0, 1] in doc["result"]["terms"]


def test_deterministic_output(capsys):
    _, _, a = run(capsys, "igusa", "split", "-d", "1", "--qmax", "3")
    _, _, b = run(capsys, "igusa", "split", "-d", "1", "--qmax", "3")
    assert a == b


def test_digest_covers_result(capsys):
    import hashlib
    _, doc, _ = run(capsys, "enum", "c2")
    digest = hashlib.sha256(cli.canonical(doc["result"]).encode()).hexdigest()
    assert doc["manifest"]["digest"] == digest


def test_timing_flag(capsys):
    _, doc, _ = run(capsys, "--timing", "enum", "c2")
    assert "wall_time" in doc["manifest"]


def test_bad_window():
    with pytest.raises(SystemExit):
        cli.main(["forms", "dump", "G", "--window=5,1"])


def test_verify_quick_subprocess():
    p = subprocess.run([sys.executable, "-m", "k3chi10", "verify", "quick"], capture_output=True,
                       text=True, timeout=900)
    assert p.returncode == 0, p.stderr
    doc = json.loads(p.stdout)
    assert doc["result"]["passed"]
    assert len(doc["result"]["checks"]) == 12
    assert all(line.startswith("PASS") for line in p.stderr.splitlines() if line[:4] in ("PASS", "FAIL"))
