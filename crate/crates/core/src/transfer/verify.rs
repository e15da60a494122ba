use std::collections::HashMap;
use std::sync::Arc;

use crate::abelian::{subgroup, GroupHom, IntMatrix};
use crate::error::{Error, Result};
use crate::ramification::Q;
use crate::tori::TorusPointsQuotient;
use crate::units::UnitElem;

use super::datum::{ClosePairDatum, LevelPair};
use super::iso::{build_standard_iso, StagePair, TransferIso};
use super::report::{check_all, sample, sample_label, CheckLine, Report};

fn lattice_hom(from: &TorusPointsQuotient, to: &TorusPointsQuotient, f: &IntMatrix) -> Result<GroupHom> {
    from.split.lattice_map(&to.split, f)?.restrict(&from.inclusion, &to.inclusion)
}

/// The square for a morphism T1 -> T2 given by f: X*(T2) -> X*(T1) (rows indexed by X*(T2)).
pub fn verify_functoriality(d1: &ClosePairDatum, d2: &ClosePairDatum, f: &IntMatrix, r: Q, cap: usize) -> Result<Report> {
    if !d2.left.lattice.is_equivariant(&d1.left.lattice, f) {
        return Err(Error::NotEquivariant(format!("lattice map {} -> {}", d1.left.name, d2.left.name)));
    }
    let iso1 = build_standard_iso(d1, r)?.built()?;
    let iso2 = build_standard_iso(d2, r)?.built()?;
    let fl = lattice_hom(iso1.source(), iso2.source(), f)?;
    let fr = lattice_hom(iso1.target(), iso2.target(), f)?;
    let mut rep = Report::new(format!("functoriality {} -> {} at r = {r}", d1.left.name, d2.left.name));
    let (xs, all) = sample(iso1.source().group(), cap);
    rep.push(check_all(sample_label("transfer commutes with the induced map on points", all), &xs, |x| {
        let a = iso2.apply(&fl.apply(x));
        let b = fr.apply(&iso1.apply(x));
        (a != b).then(|| format!("{}: {} vs {}", iso1.source().format(x), iso2.target().format(&a), iso2.target().format(&b)))
    }));
    Ok(rep)
}

fn equivariance_line(label: &str, left: &crate::tori::SplitPoints, right: &crate::tori::SplitPoints, d: &GroupHom, perm: &[usize], cap: usize) -> CheckLine {
    let (xs, all) = sample(left.group(), cap);
    let g = &left.galois;
    check_all(sample_label(label, all), &xs, |a| {
        (0..g.order()).find_map(|s| {
            let lhs = d.apply(&left.actions[s].apply(a));
            let rhs = right.actions[perm[s]].apply(&d.apply(a));
            (lhs != rhs).then(|| format!("{} under {}", fmt_tuple(&left.tuple(a)), g.name_of(s)))
        })
    })
}

fn fmt_tuple(t: &[UnitElem]) -> String {
    format!("[{}]", t.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(" "))
}

/// s' o D = D o s on the split-level quotient over L, and over the unramified stage of degree f*.
pub fn verify_equivariance(datum: &ClosePairDatum, r: Q, stage_degree: Option<usize>, cap: usize) -> Result<Report> {
    let pair = datum.pair(r)?;
    let mut rep = Report::new(format!("Galois equivariance for {} at r = {r}", datum.left.name));
    rep.push(equivariance_line(
        "split-level transfer commutes with every automorphism",
        &pair.left.split,
        &pair.right.split,
        &pair.split_map,
        &datum.transfer.perm,
        cap,
    ));
    if let Some(deg) = stage_degree {
        let st = StagePair::new(datum, r, deg)?;
        rep.push(equivariance_line(
            &format!("stage-level transfer (degree {deg}) commutes with every automorphism"),
            &st.left.split,
            &st.right.split,
            &st.split_map,
            &st.perm,
            cap,
        ));
    }
    Ok(rep)
}

pub fn verify_kottwitz(iso: &TransferIso, cap: usize) -> Result<Report> {
    let kl = iso.source().kottwitz()?;
    let kr = iso.target().kottwitz()?;
    let mut rep = Report::new(format!("Kottwitz compatibility for {} at r = {}", iso.source().spec.name, iso.r()));
    rep.note(format!("Kottwitz target {} / {}", kl.target(), kr.target()));
    let same_shape = kl.target().torsion() == kr.target().torsion() && kl.target().rank() == kr.target().rank();
    rep.push(if same_shape {
        CheckLine::pass("Kottwitz targets agree", 1)
    } else {
        CheckLine::fail("Kottwitz targets agree", 1, format!("{} vs {}", kl.target(), kr.target()))
    });
    let (xs, all) = sample(iso.source().group(), cap);
    rep.push(check_all(sample_label("Kottwitz square commutes", all), &xs, |x| {
        let v = kl.value(x);
        let lift = kl.coinvariants.preimage(&v).expect("coinvariants are a quotient");
        let via_lattice = kr.coinvariants.apply(&lift);
        let via_transfer = kr.value(&iso.apply(x));
        (via_lattice != via_transfer).then(|| format!("{}: {:?} vs {:?}", iso.source().format(x), via_lattice, via_transfer))
    }));
    Ok(rep)
}

/// The level-r isomorphism induces the level-s one, and restricts to the bounded parts.
pub fn verify_level_reduction(datum: &ClosePairDatum, r: Q, s: Q, cap: usize) -> Result<Report> {
    if s > r {
        return Err(Error::LevelCondition(format!("s = {s} exceeds r = {r}")));
    }
    let big = build_standard_iso(datum, r)?.built()?;
    let small = build_standard_iso(datum, s)?.built()?;
    let red_l = big.source().reduction_to(small.source())?;
    let red_r = big.target().reduction_to(small.target())?;
    let mut rep = Report::new(format!("level reduction {r} -> {s} for {}", datum.left.name));
    let (xs, all) = sample(big.source().group(), cap);
    rep.push(check_all(sample_label("induced map on the coarser quotient is the standard isomorphism", all), &xs, |x| {
        let a = red_r.apply(&big.apply(x));
        let b = small.apply(&red_l.apply(x));
        (a != b).then(|| big.source().format(x))
    }));
    let bl = big.source().bounded();
    let br = big.target().bounded();
    let img = big.map.compose(&bl)?.image_inclusion();
    rep.push(if subgroup::equal(&img, &br) {
        CheckLine::pass("bounded part maps onto bounded part", bl.source.ngens())
    } else {
        CheckLine::fail("bounded part maps onto bounded part", bl.source.ngens(), "images differ")
    });
    Ok(rep)
}

/// At most one standard correspondent per source element, by scanning the target's field tuples.
pub fn uniqueness_scan(pair: &LevelPair, cap: usize) -> CheckLine {
    let (ys, all_y) = sample(pair.right.group(), cap);
    let mut sig: HashMap<Vec<UnitElem>, usize> = HashMap::new();
    for y in &ys {
        *sig.entry(pair.right.tuple(y)).or_default() += 1;
    }
    let (xs, all_x) = sample(pair.left.group(), cap);
    check_all(sample_label("at most one standard correspondent per element", all_x && all_y), &xs, |x| {
        let c = pair.correspondent_tuple(&pair.left.tuple(x));
        let n = sig.get(&c).copied().unwrap_or(0);
        (n > 1).then(|| format!("{} has {n} correspondents", pair.left.format(x)))
    })
}

/// The transfer of the reversed datum is the inverse map.
pub fn verify_symmetry(iso: &TransferIso, cap: usize) -> Result<CheckLine> {
    let back = build_standard_iso(&iso.pair.datum.reversed(), iso.r())?.built()?;
    let (xs, all) = sample(iso.source().group(), cap);
    Ok(check_all(sample_label("reversed transfer is the inverse", all), &xs, |x| {
        let y = back.apply(&iso.apply(x));
        (y != *x).then(|| iso.source().format(x))
    }))
}

/// For F = F' with the identity certificate, the transfer is the identity on field tuples.
pub fn verify_self_identity(iso: &TransferIso, cap: usize) -> CheckLine {
    let (xs, all) = sample(iso.source().group(), cap);
    check_all(sample_label("self-pair transfer is the identity", all), &xs, |x| {
        let a = iso.source().tuple(x);
        let b = iso.target().tuple(&iso.apply(x));
        (a != b).then(|| iso.source().format(x))
    })
}

/// Two presentations of the same split torus (split by F and by a larger L) give the same
/// correspondence, compared through the inclusions of point groups.
pub fn verify_choice_independence(small: &ClosePairDatum, big: &ClosePairDatum, r: Q, cap: usize) -> Result<CheckLine> {
    let p1 = Arc::new(small.pair(r)?);
    let p2 = Arc::new(big.pair(r)?);
    let emb = |a: &TorusPointsQuotient, b: &TorusPointsQuotient| -> Result<GroupHom> {
        if a.split.lattice.rank() != b.split.lattice.rank() {
            return Err(Error::InvalidParameter("presentations of different rank".into()));
        }
        StagePair::embedding(a, b)
    };
    let el = emb(&p1.left, &p2.left)?;
    let er = emb(&p1.right, &p2.right)?;
    let (xs, ax) = sample(p1.left.group(), cap);
    let (ys, ay) = sample(p1.right.group(), 64);
    let label = sample_label("correspondence is independent of the splitting presentation", ax && ay);
    Ok(check_all(label, &xs, |x| {
        ys.iter().find_map(|y| {
            let a = p1.correspond(x, y);
            let b = p2.correspond(&el.apply(x), &er.apply(y));
            (a != b).then(|| format!("{} vs {}", p1.left.format(x), p1.right.format(y)))
        })
    }))
}

/// The congruent isomorphism at level m induces the standard ones at every integer s <= m.
pub fn verify_congruent_coherence(iso: &TransferIso, cap: usize) -> Result<Report> {
    let m = iso.r();
    let mut rep = Report::new(format!("congruent/standard coherence at m = {m}"));
    let mut s = Q::from_integer(1);
    while s <= m {
        let rr = verify_level_reduction(&iso.pair.datum, m, s, cap)?;
        for mut line in rr.lines {
            line.label = format!("{} (s = {s})", line.label);
            rep.push(line);
        }
        s += Q::from_integer(1);
    }
    Ok(rep)
}
