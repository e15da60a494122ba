//! Acceptance suite. Each test prints one `PASS criterion N: ...` or `FAIL criterion N: ...` line
//! (run with `-- --nocapture --test-threads=1` to see them in order).

use std::collections::HashSet;
use std::fmt::Display;
use std::sync::Arc;

use closefield::abelian::subgroup;
use closefield::arith::Tower;
use closefield::fixtures::{eisenstein, laurent, padic, padic_root, quadratic_pair, quartic_pair, self_pair, tame_quadratic, unramified, wild_quadratic};
use closefield::ramification::{
    certify_close, different_from_polynomial, q, qf, relative_herbrand, transfer_extension, ClosePairCertificate, GaloisGroup, Q,
};
use closefield::tori::{diagonal_and_norm, TorusPointsQuotient, TorusSpec};
use closefield::transfer::{
    build_congruent_iso, build_standard_iso, check_all, sample, uniqueness_scan, verify_equivariance, verify_functoriality, verify_kottwitz,
    verify_level_reduction, verify_self_identity, verify_symmetry, CheckLine, ClosePairDatum, Report, SplitTransfer,
};
use closefield::units::{unit_inclusion, DeligneIso, UnitQuotient};
use closefield::Error;

const CAP: usize = 10_000;
/// The degree-2 stage of Res over the tame quadratic has 129600 split points.
const STAGE_CAP: usize = 200_000;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

trait Ctx<T> {
    fn ctx(self, what: &str) -> Result<T, String>;
}

impl<T, E: Display> Ctx<T> for Result<T, E> {
    fn ctx(self, what: &str) -> Result<T, String> {
        self.map_err(|e| format!("{what}: {e}"))
    }
}

fn report(n: usize, name: &str, outcome: Check) {
    match outcome {
        Ok(detail) => println!("PASS criterion {n}: {name} ({detail})"),
        Err(why) => {
            println!("FAIL criterion {n}: {name}: {why}");
            panic!("criterion {n} failed: {why}");
        }
    }
}

/// Element checks made, and how many check lines fell back to generators.
#[derive(Default)]
struct Tally {
    checks: usize,
    partial: usize,
}

impl Tally {
    fn line(&mut self, l: &CheckLine) {
        self.checks += l.count;
        if l.label.contains("[generators only]") {
            self.partial += 1;
        }
    }

    fn report(&mut self, r: &Report) {
        r.lines.iter().for_each(|l| self.line(l));
    }
}

impl Display for Tally {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} element checks, {} lines on generators only", self.checks, self.partial)
    }
}

fn grid() -> Vec<Q> {
    (0..20).map(|k| qf(k, 3)).collect()
}

// ---------------------------------------------------------------- criterion 1

/// phi(u) = (1/e) sum over inertia of min(i(s), u + 1), minus 1.
fn phi_oracle(g: &GaloisGroup, u: Q) -> Q {
    let e = g.inertia.len() as i64;
    let total: Q = g
        .inertia
        .iter()
        .map(|&s| match g.indices[s] {
            Some(i) if s != g.identity() => q(i as i64).min(u + q(1)),
            _ => u + q(1),
        })
        .sum();
    total / q(e) - q(1)
}

/// psi of a totally ramified extension of prime degree p, from its different d = (p - 1)(b + 1).
fn psi_from_different(p: i64, d: i64, x: Q) -> Q {
    let b = q(d / (p - 1) - 1);
    if x <= b {
        x
    } else {
        b + q(p) * (x - b)
    }
}

fn herbrand_fixture(name: &str, top: &Arc<Tower>) -> Result<usize, String> {
    let base = top.levels() - 1;
    let g = GaloisGroup::compute(top, base).ctx(name)?;
    let h = g.herbrand();
    let composed = relative_herbrand(top, base).ctx(name)?;
    let mut checks = 0;
    for x in grid() {
        ensure(h.phi.eval(h.psi.eval(x)) == x && h.psi.eval(h.phi.eval(x)) == x, || format!("{name}: phi o psi != id at {x}"))?;
        ensure(h.phi.eval(x) == phi_oracle(&g, x), || format!("{name}: phi({x}) = {} but the index sum gives {}", h.phi.eval(x), phi_oracle(&g, x)))?;
        ensure(composed.psi.eval(x) == h.psi.eval(x), || format!("{name}: step-composed psi differs at {x}"))?;
        checks += 3;
    }
    let hilbert: usize = g.indices.iter().flatten().sum();
    let from_poly = different_from_polynomial(top, base).ctx(name)?;
    ensure(hilbert == from_poly && h.different_val == from_poly, || {
        format!("{name}: different {} (breaks) vs {hilbert} (Hilbert) vs {from_poly} (derivative)", h.different_val)
    })?;
    for l in 1..=5 {
        if !h.at_most_ramified(l) {
            continue;
        }
        let l1 = h.l_one(l).ctx(name)?;
        let e = h.e;
        ensure(l <= l1 && l1 <= l * e, || format!("{name}: l(1) = {l1} outside [{l}, {}]", l * e))?;
        ensure((l1 == l * e) == h.is_tame(), || format!("{name}: l(1) = {l1} = le is {} but tame is {}", l1 == l * e, h.is_tame()))?;
        checks += 2;
    }
    Ok(checks + 1)
}

fn transitivity(name: &str, middle: &Arc<Tower>, top: &Arc<Tower>) -> Result<usize, String> {
    let direct = GaloisGroup::compute(top, 0).ctx(name)?.herbrand();
    let lower = GaloisGroup::compute(middle, 0).ctx(name)?.herbrand();
    let upper = GaloisGroup::compute(top, 1).ctx(name)?.herbrand();
    for x in grid() {
        let via = upper.psi.eval(lower.psi.eval(x));
        ensure(direct.psi.eval(x) == via, || format!("{name}: psi({x}) = {} directly but {via} through the middle field", direct.psi.eval(x)))?;
    }
    Ok(20)
}

fn criterion_1() -> Check {
    let f3 = laurent(3, 8).ctx("F3t")?;
    let f7 = laurent(7, 6).ctx("F7t")?;
    let (q2, wild) = wild_quadratic().ctx("wild fixture")?;
    let fixtures: Vec<(&str, Arc<Tower>)> = vec![
        ("unramified quadratic over F3t", unramified(&f3, 2).ctx("ext")?),
        ("unramified cubic over F3t", unramified(&f3, 3).ctx("ext")?),
        ("unramified quadratic over Q3", unramified(&padic(3, 4).ctx("Q3")?, 2).ctx("ext")?),
        ("tame quadratic over F3t", tame_quadratic(&f3).ctx("ext")?),
        ("Q3(3^1/2)/Q3", padic_root(3, 2, 4).ctx("ext")?),
        ("tame cubic over F7t", eisenstein(&f7, "F7t(s)", "s", 3, 1).ctx("ext")?),
        ("Q7(7^1/3)/Q7", padic_root(7, 3, 3).ctx("ext")?),
        ("Q2(sqrt2)/Q2", wild.clone()),
    ];
    let mut checks = 0;
    for (name, top) in &fixtures {
        checks += herbrand_fixture(name, top)?;
    }

    let g = GaloisGroup::compute(&wild, 0).ctx("wild")?;
    let h = g.herbrand();
    let d = different_from_polynomial(&wild, 0).ctx("wild")? as i64;
    ensure(h.psi.eval(q(3)) == q(4), || format!("break oracle gives psi(3) = {}", h.psi.eval(q(3))))?;
    ensure(psi_from_different(2, d, q(3)) == q(4), || format!("different {d} gives psi(3) = {}", psi_from_different(2, d, q(3))))?;
    for x in grid() {
        ensure(psi_from_different(2, d, x) == h.psi.eval(x), || format!("wild psi disagrees with the different at {x}"))?;
    }
    ensure(h.l_one(3) == Ok(4), || format!("l(1) at l = 3 is {:?}", h.l_one(3)))?;
    checks += 23;

    let w3 = unramified(&f3, 2).ctx("ext")?;
    let s3 = tame_quadratic(&f3).ctx("ext")?;
    let w2 = unramified(&q2, 2).ctx("ext")?;
    let towers: Vec<(&str, Arc<Tower>, Arc<Tower>)> = vec![
        ("F3t < unramified < tame", w3.clone(), tame_quadratic(&w3).ctx("ext")?),
        ("F3t < tame < unramified", s3.clone(), unramified(&s3, 2).ctx("ext")?),
        ("Q2 < Q2(sqrt2) < unramified", wild.clone(), unramified(&wild, 2).ctx("ext")?),
        ("Q2 < unramified < sqrt2", w2.clone(), eisenstein(&w2, "Q2(w2)(pi)", "pi", 2, 1).ctx("ext")?),
    ];
    for (name, mid, top) in &towers {
        checks += transitivity(name, mid, top)?;
    }
    Ok(format!("{} extensions, {} towers, {checks} exact checks", fixtures.len(), towers.len()))
}

#[test]
fn criterion_1_herbrand_suite() {
    report(1, "Herbrand suite", criterion_1());
}

// ---------------------------------------------------------------- criterion 2

fn criterion_2() -> Check {
    let cert = quadratic_pair().ctx("certificate")?;
    let ua = UnitQuotient::new(&cert.left, 2).ctx("units")?;
    let ub = UnitQuotient::new(&cert.right, 2).ctx("units")?;
    ensure(ua.group().to_string() == "Z/6 x Z" && ub.group().to_string() == "Z/6 x Z", || format!("unit groups {} / {}", ua.group(), ub.group()))?;
    let d = DeligneIso::new(&cert, &ua, &ub).ctx("Deligne")?;
    ensure(d.hom.is_isomorphism(), || "map is not an isomorphism of groups".into())?;
    let units = ua.elements(0);
    ensure(units.len() == 6, || format!("{} unit classes", units.len()))?;
    let pi = ua.uniformizer();
    let mut checks = 0;
    for a in &units {
        for b in &units {
            for va in -2..=2 {
                for vb in -2..=2 {
                    let x = ua.mul(a, &ua.pow(&pi, va));
                    let y = ua.mul(b, &ua.pow(&pi, vb));
                    let lhs = d.map(&ua, &ub, &ua.mul(&x, &y));
                    let rhs = ub.mul(&d.map(&ua, &ub, &x), &d.map(&ua, &ub, &y));
                    ensure(lhs == rhs, || format!("D({x} * {y}) = {lhs} but D({x}) D({y}) = {rhs}"))?;
                    checks += 1;
                }
            }
        }
    }
    // the standard certificate matches digit expansions in the two uniformizers
    let window = ua.elements(2);
    let mut images = HashSet::new();
    for x in &window {
        let y = d.map(&ua, &ub, x);
        ensure(y.val == x.val && y.digits == x.digits, || format!("{x} maps to {y}"))?;
        images.insert(y);
    }
    let target: HashSet<_> = ub.elements(2).into_iter().collect();
    ensure(images == target, || "map is not a bijection on the valuation window".into())?;

    let e = tame_quadratic(&cert.left).ctx("extension")?;
    let te = transfer_extension(&cert, &e, "E'").ctx("transfer")?;
    ensure(te.cert.level == 4, || format!("transferred level {}", te.cert.level))?;
    let (ha, hb) = (UnitQuotient::new(&te.left, 4).ctx("units")?, UnitQuotient::new(&te.right, 4).ctx("units")?);
    let high = DeligneIso::new(&te.cert, &ha, &hb).ctx("Deligne")?;
    let ia = unit_inclusion(&ua, &ha).ctx("inclusion")?;
    let ib = unit_inclusion(&ub, &hb).ctx("inclusion")?;
    let (xs, all) = sample(ua.group(), CAP);
    ensure(all, || "window not exhaustive".into())?;
    let line = check_all("inclusion square", &xs, |x| {
        let a = high.hom.apply(&ia.apply(x));
        let b = ib.apply(&d.hom.apply(x));
        (a != b).then(|| ua.format(&ua.from_group(x)))
    });
    ensure(line.passed, || line.to_string())?;
    Ok(format!("{checks} product checks, {} window elements, inclusion square on {} elements", window.len(), line.count))
}

#[test]
fn criterion_2_deligne_unit_isomorphism() {
    report(2, "Deligne unit isomorphism", criterion_2());
}

// ---------------------------------------------------------------- fixtures for criteria 3-7

struct QuarticTori {
    gm: ClosePairDatum,
    gm_e: ClosePairDatum,
    res: ClosePairDatum,
    norm: ClosePairDatum,
    gm_u: ClosePairDatum,
    res_u: ClosePairDatum,
    norm_u: ClosePairDatum,
}

fn quartic_tori() -> Result<QuarticTori, String> {
    let cert = quartic_pair().ctx("certificate")?;
    let f = cert.left.clone();
    let gm = ClosePairDatum::new(&cert, &TorusSpec::split("Gm", &f, 1).ctx("Gm")?).ctx("Gm")?;
    let e = tame_quadratic(&f).ctx("E")?;
    let res = TorusSpec::weil_restriction("R", &f, &e, 1).ctx("R")?;
    let tr = Arc::new(SplitTransfer::new(&cert, &res.galois).ctx("transfer")?);
    let with = |t: TorusSpec| ClosePairDatum::with_transfer(&tr, &t).ctx("datum");
    let gm_e = with(TorusSpec::split_over("Gm", &f, &e, 1).ctx("Gm")?)?;
    let norm = with(TorusSpec::norm_one("N", &f, &e).ctx("N")?)?;
    let res = with(res)?;
    let u = unramified(&f, 2).ctx("unramified")?;
    let res_u = TorusSpec::weil_restriction("Ru", &f, &u, 1).ctx("Ru")?;
    let tu = Arc::new(SplitTransfer::new(&cert, &res_u.galois).ctx("transfer")?);
    let with_u = |t: TorusSpec| ClosePairDatum::with_transfer(&tu, &t).ctx("datum");
    let gm_u = with_u(TorusSpec::split_over("Gm", &f, &u, 1).ctx("Gm")?)?;
    let norm_u = with_u(TorusSpec::norm_one("Nu", &f, &u).ctx("Nu")?)?;
    let res_u = with_u(res_u)?;
    Ok(QuarticTori { gm, gm_e, res, norm, gm_u, res_u, norm_u })
}

fn standard_suite(d: &ClosePairDatum, r: Q, tally: &mut Tally) -> Result<(), String> {
    let what = format!("{} at r = {r}", d.left.name);
    let iso = build_standard_iso(d, r).ctx(&what)?.built().ctx(&what)?;
    for line in [iso.check_correspondence(CAP), uniqueness_scan(&iso.pair, CAP), verify_symmetry(&iso, CAP).ctx(&what)?] {
        ensure(line.passed, || format!("{what}: {line}"))?;
        tally.line(&line);
    }
    Ok(())
}

// ---------------------------------------------------------------- criterion 3

fn criterion_3() -> Check {
    let cert = self_pair(4).ctx("self pair")?;
    let f = cert.left.clone();
    let e = tame_quadratic(&f).ctx("E")?;
    let u = unramified(&f, 2).ctx("U")?;
    let catalog = vec![
        TorusSpec::split("Gm", &f, 1).ctx("Gm")?,
        TorusSpec::split("Gm2", &f, 2).ctx("Gm2")?,
        TorusSpec::weil_restriction("R", &f, &e, 1).ctx("R")?,
        TorusSpec::norm_one("N", &f, &e).ctx("N")?,
        TorusSpec::weil_restriction("Ru", &f, &u, 1).ctx("Ru")?,
        TorusSpec::norm_one("Nu", &f, &u).ctx("Nu")?,
    ];
    let mut tally = Tally::default();
    for spec in &catalog {
        let d = ClosePairDatum::new(&cert, spec).ctx(&spec.name)?;
        for r in [q(1), q(2)] {
            let iso = build_standard_iso(&d, r).ctx(&spec.name)?.built().ctx(&spec.name)?;
            let line = verify_self_identity(&iso, CAP);
            ensure(line.passed, || format!("{} at r = {r}: {line}", spec.name))?;
            tally.line(&line);
        }
    }

    let t = quartic_tori()?;
    let mut cases = 0;
    for r in [qf(1, 2), q(1), qf(3, 2), q(2), qf(5, 2), q(3), q(4)] {
        standard_suite(&t.gm, r, &mut tally)?;
        cases += 1;
    }
    for d in [&t.res, &t.norm] {
        for r in [qf(1, 2), q(1), qf(3, 2), q(2)] {
            standard_suite(d, r, &mut tally)?;
            cases += 1;
        }
    }
    Ok(format!("{} self-pair tori at r = 1, 2; {cases} cross-characteristic isomorphisms; {tally}", catalog.len()))
}

#[test]
fn criterion_3_standard_isomorphisms() {
    report(3, "standard-isomorphism suite", criterion_3());
}

// ---------------------------------------------------------------- criterion 4

fn criterion_4() -> Check {
    let t = quartic_tori()?;
    let mut tally = Tally::default();
    for (gm, res) in [(&t.gm_e, &t.res), (&t.gm_u, &t.res_u)] {
        let maps = diagonal_and_norm(&gm.left.lattice, &[gm.left.galois.identity()]).ctx("lattice maps")?;
        for r in [q(1), q(2)] {
            for (label, from, to, f) in [("diagonal", gm, res, &maps.diagonal_dual), ("norm", res, gm, &maps.norm_dual)] {
                let rep = verify_functoriality(from, to, f, r, CAP).ctx(label)?;
                ensure(rep.passed(), || format!("{label}: {rep}"))?;
                tally.report(&rep);
            }
        }
    }
    Ok(format!("diagonal and norm squares over tame and unramified quadratics at r = 1, 2; {tally}"))
}

#[test]
fn criterion_4_functoriality() {
    report(4, "functoriality", criterion_4());
}

// ---------------------------------------------------------------- criterion 5

fn criterion_5() -> Check {
    let t = quartic_tori()?;
    let mut tally = Tally::default();
    let cases: [(&ClosePairDatum, Q, Option<usize>); 6] = [
        (&t.res, q(1), Some(2)),
        (&t.norm, q(1), Some(2)),
        (&t.norm, q(2), None),
        (&t.res_u, q(1), Some(2)),
        (&t.norm_u, q(1), Some(2)),
        (&t.norm_u, q(2), None),
    ];
    for (d, r, stage) in cases {
        let rep = verify_equivariance(d, r, stage, STAGE_CAP).ctx(&d.left.name)?;
        ensure(rep.passed(), || format!("{rep}"))?;
        tally.report(&rep);
    }
    Ok(format!("{} cases, {tally}", cases.len()))
}

#[test]
fn criterion_5_galois_equivariance() {
    report(5, "Galois equivariance", criterion_5());
}

// ---------------------------------------------------------------- criterion 6

fn criterion_6() -> Check {
    let t = quartic_tori()?;
    let mut tally = Tally::default();
    for d in [&t.gm, &t.res, &t.norm, &t.res_u, &t.norm_u] {
        for r in [q(1), q(2)] {
            let iso = build_standard_iso(d, r).ctx(&d.left.name)?.built().ctx(&d.left.name)?;
            let rep = verify_kottwitz(&iso, CAP).ctx(&d.left.name)?;
            ensure(rep.passed(), || format!("{rep}"))?;
            tally.report(&rep);
        }
    }
    for side in [&t.norm_u.left, &t.norm_u.right] {
        let k = TorusPointsQuotient::new(side, q(1)).ctx("Nu")?.kottwitz().ctx("Nu")?;
        ensure(k.target().is_trivial(), || format!("unramified norm-one target is {}", k.target()))?;
    }
    let k = TorusPointsQuotient::new(&t.norm.left, q(1)).ctx("N")?.kottwitz().ctx("N")?;
    ensure(k.target().to_string() == "Z/2", || format!("tame norm-one target is {}", k.target()))?;
    Ok(format!("split, Res and norm-one at r = 1, 2; {tally}; unramified norm-one target is 0"))
}

#[test]
fn criterion_6_kottwitz_compatibility() {
    report(6, "Kottwitz compatibility", criterion_6());
}

// ---------------------------------------------------------------- criterion 7

fn criterion_7() -> Check {
    let t = quartic_tori()?;
    let selfp = self_pair(4).ctx("self pair")?;
    let f = selfp.left.clone();
    let mut specs: Vec<TorusSpec> = [&t.gm, &t.gm_e, &t.res, &t.norm, &t.gm_u, &t.res_u, &t.norm_u].iter().flat_map(|d| [d.left.clone(), d.right.clone()]).collect();
    specs.push(TorusSpec::norm_one("N", &f, &tame_quadratic(&f).ctx("E")?).ctx("N")?);
    let mut collapses = 0;
    for spec in &specs {
        let qt = TorusPointsQuotient::new(spec, q(3)).ctx(&spec.name)?;
        ensure(subgroup::equal(&qt.naive(q(0)).ctx(&spec.name)?, &qt.bounded()), || format!("{}: naive_0 is not the bounded part", spec.name))?;
        ensure(spec.is_weakly_induced(), || format!("{} is not weakly induced", spec.name))?;
        for s in [qf(1, 2), q(1), qf(3, 2), q(2), q(3)] {
            let naive = qt.naive(s).ctx(&spec.name)?;
            let standard = qt.standard(s).ctx(&spec.name)?;
            let congruent = qt.congruent(s).ctx(&spec.name)?;
            ensure(subgroup::equal(&naive, &standard) && subgroup::equal(&standard, &congruent), || {
                format!("{}: filtrations differ at s = {s}", spec.name)
            })?;
            collapses += 1;
        }
    }
    let mut tally = Tally::default();
    for d in [&t.gm, &t.res, &t.norm] {
        for s in [q(1), q(2)] {
            let rep = verify_level_reduction(d, q(3), s, CAP).ctx(&d.left.name)?;
            ensure(rep.passed(), || format!("{rep}"))?;
            tally.report(&rep);
        }
    }
    Ok(format!("{} tori, {collapses} collapse equalities, level reduction 3 -> 1, 2 with {tally}", specs.len()))
}

#[test]
fn criterion_7_filtration_coherence() {
    report(7, "filtration coherence", criterion_7());
}

// ---------------------------------------------------------------- criterion 8

fn criterion_8() -> Check {
    let good = quartic_pair().ctx("certificate")?;
    let two_t = good.right.uniformizer().mul(&good.right.from_int(2)).ctx("2t")?;
    let bad_cert = ClosePairCertificate::certify_with(&good.left, &good.right, 4, &good.left.uniformizer(), &two_t).ctx("corrupted certificate")?;
    let gm = TorusSpec::split("Gm", &good.left, 1).ctx("Gm")?;
    let honest = ClosePairDatum::new(&good, &gm).ctx("datum")?.pair(q(1)).ctx("pair")?;
    let bad = build_standard_iso(&ClosePairDatum::new(&bad_cert, &gm).ctx("datum")?, q(1)).ctx("iso")?.built().ctx("iso")?;
    let (xs, _) = sample(honest.left.group(), CAP);
    let line = check_all("corrupted map sends elements to standard correspondents", &xs, |x| {
        let y = bad.apply(x);
        (!honest.correspond(x, &y)).then(|| format!("{} -> {}", honest.format_left(x), honest.format_right(&y)))
    });
    ensure(!line.passed && line.witness.is_some(), || format!("corrupted certificate was not detected: {line}"))?;
    println!("  control: {line}");

    let (q2, wild) = wild_quadratic().ctx("wild")?;
    let wcert = certify_close(&q2, &q2, 3).ctx("Q2 self pair")?;
    let n = TorusSpec::norm_one("N", &q2, &wild).ctx("N")?;
    let datum = ClosePairDatum::new(&wcert, &n).ctx("datum")?;
    match build_congruent_iso(&datum, 1, None, CAP) {
        Err(Error::NotWeaklyInduced) => {}
        other => return Err(format!("non-weakly-induced congruent request returned {:?}", other.map(|o| o.is_built()))),
    }

    let q3 = padic(3, 4).ctx("Q3")?;
    let f3 = laurent(3, 8).ctx("F3t")?;
    match certify_close(&q3, &f3, 2) {
        Err(Error::NotClose { level: 2, .. }) => {}
        other => return Err(format!("Q3 vs F3t at l = 2 returned {:?}", other.map(|c| c.level))),
    }
    ensure(certify_close(&q3, &f3, 1).is_ok(), || "Q3 vs F3t rejected at l = 1 as well".into())?;
    Ok("corrupted certificate FAILs with a witness; congruent request on a wild norm-one torus errors; Q3/F3t rejected at l = 2".into())
}

#[test]
fn criterion_8_negative_controls() {
    report(8, "negative controls", criterion_8());
}
