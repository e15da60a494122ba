"""Smoke test for the Python bindings; exits non-zero on the first failed check."""

from fractions import Fraction

import closefield as cf


def main() -> None:
    wild = cf.Field.padic(2, 8).eisenstein("Q2(sqrt2)", "pi", 2)
    h = wild.herbrand()
    assert h.psi(3) == 4, h
    assert h.phi(Fraction(9, 2)) == Fraction(13, 4)
    assert h.different == 3 and not h.is_tame()

    cert = cf.Certificate.quartic_pair()
    assert cert.level == 4 and cert.is_standard()
    gm = cf.Torus.split("Gm", cert.left)
    datum = cf.Datum(cert, gm)
    iso = datum.standard_iso(2)
    assert iso.kind == "standard"
    assert iso.check_correspondence().passed
    assert iso.verify_kottwitz().passed
    x = [1] * len(iso.source.group.split(" x "))
    assert iso.corresponds(x, iso.apply(x))

    e = cert.left.eisenstein("E", "s", 2)
    n = cf.Torus.norm_one("N", cert.left, e)
    pts = n.points(1)
    assert pts.kottwitz_target() == "Z/2", pts.kottwitz_target()
    assert pts.collapses(Fraction(1, 2))
    rep = cf.Datum(cert, n).verify_equivariance(1)
    assert rep.passed, str(rep)

    q3, f3 = cf.Field.padic(3, 4), cf.Field.laurent(3, 8)
    try:
        cf.Certificate.certify(q3, f3, 2)
    except cf.ClosefieldError as err:
        assert "not 2-close" in str(err)
    else:
        raise AssertionError("Q3 and F3((t)) certified at level 2")

    ok, report = cf.run_scenario(
        "[field F]\nbase = laurent 3 8\n[torus T]\nkind = split\nfield = F\n"
        "[close C]\nleft = F\nright = F\nlevel = 2\n"
        "[task iso]\nop = standard_iso\npair = C\ntorus = T\nr = 1\n"
    )
    assert ok, report
    assert "SUMMARY: 1/1" in report
    assert "out of scope" in cf.explain("neron").lower()
    print("python smoke test: all checks passed")


if __name__ == "__main__":
    main()
