use std::sync::OnceLock;

use num_bigint::BigInt;
use proptest::prelude::*;

use closefield::abelian::{big_vec, subgroup, FgAbelianGroup, IntMatrix};
use closefield::fixtures::{laurent, quartic_pair, tame_quadratic};
use closefield::ramification::{q, qf, ClosePairCertificate, HerbrandData};
use closefield::tori::{TorusPointsQuotient, TorusSpec};
use closefield::transfer::{build_standard_iso, ClosePairDatum, TransferIso};
use closefield::units::{DeligneIso, UnitElem, UnitQuotient};

struct Units {
    cert: ClosePairCertificate,
    left: UnitQuotient,
    right: UnitQuotient,
    deligne: DeligneIso,
    back: DeligneIso,
}

fn units() -> &'static Units {
    static U: OnceLock<Units> = OnceLock::new();
    U.get_or_init(|| {
        let cert = quartic_pair().unwrap();
        let left = UnitQuotient::new(&cert.left, 4).unwrap();
        let right = UnitQuotient::new(&cert.right, 4).unwrap();
        let deligne = DeligneIso::new(&cert, &left, &right).unwrap();
        let back = DeligneIso::new(&cert.inverse(), &right, &left).unwrap();
        Units { cert, left, right, deligne, back }
    })
}

fn unit(u: &UnitQuotient, class: usize, val: i64) -> UnitElem {
    let classes = u.unit_classes();
    UnitElem { val, digits: classes[class % classes.len()].clone() }
}

fn norm_one() -> &'static TorusPointsQuotient {
    static N: OnceLock<TorusPointsQuotient> = OnceLock::new();
    N.get_or_init(|| {
        let f = laurent(3, 12).unwrap();
        let e = tame_quadratic(&f).unwrap();
        TorusPointsQuotient::new(&TorusSpec::norm_one("N", &f, &e).unwrap(), q(3)).unwrap()
    })
}

fn gm_iso() -> &'static TransferIso {
    static I: OnceLock<TransferIso> = OnceLock::new();
    I.get_or_init(|| {
        let cert = &units().cert;
        let t = TorusSpec::split("Gm", &cert.left, 1).unwrap();
        build_standard_iso(&ClosePairDatum::new(cert, &t).unwrap(), q(3)).unwrap().built().unwrap()
    })
}

fn elem(g: &FgAbelianGroup, coords: &[i64]) -> Vec<BigInt> {
    let n = g.ngens();
    assert!(n <= coords.len(), "group {g} has more generators than sampled coordinates");
    g.normalize(&big_vec(&coords[..n]))
}

fn det3(m: &[i64]) -> i64 {
    m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6])
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn finite_group_order_is_the_determinant(m in prop::collection::vec(-6i64..=6, 9)) {
        let d = det3(&m);
        prop_assume!(d != 0);
        let rows: Vec<Vec<i64>> = m.chunks(3).map(|r| r.to_vec()).collect();
        let g = FgAbelianGroup::from_relations(3, &IntMatrix::from_rows(&rows));
        prop_assert_eq!(g.rank(), 0);
        prop_assert_eq!(g.order(), Some(BigInt::from(d.abs())));
        // invariant factors divide each other
        for w in g.torsion().windows(2) {
            prop_assert_eq!(&w[1] % &w[0], BigInt::from(0));
        }
    }

    #[test]
    fn unit_group_roundtrip(a in 0usize..10_000, b in 0usize..10_000, va in -20i64..20, vb in -20i64..20) {
        let u = &units().left;
        let (x, y) = (unit(u, a, va), unit(u, b, vb));
        let gx = u.to_group(&x).unwrap();
        prop_assert_eq!(&u.from_group(&gx), &x);
        let gxy = u.to_group(&u.mul(&x, &y)).unwrap();
        prop_assert_eq!(gxy, u.group().add(&gx, &u.to_group(&y).unwrap()));
    }

    #[test]
    fn unit_multiplication_matches_ring_arithmetic(a in 0usize..10_000, b in 0usize..10_000, va in 0i64..3, vb in 0i64..3) {
        let u = &units().left;
        let (x, y) = (unit(u, a, va), unit(u, b, vb));
        let prod = u.lift(&x).unwrap().mul(&u.lift(&y).unwrap()).unwrap();
        prop_assert_eq!(u.project(&prod).unwrap(), u.mul(&x, &y));
    }

    #[test]
    fn deligne_map_is_multiplicative_and_invertible(a in 0usize..10_000, b in 0usize..10_000, va in -30i64..30, vb in -30i64..30) {
        let us = units();
        let (l, r) = (&us.left, &us.right);
        let (x, y) = (unit(l, a, va), unit(l, b, vb));
        let d = |e: &UnitElem| us.deligne.map(l, r, e);
        prop_assert_eq!(d(&l.mul(&x, &y)), r.mul(&d(&x), &d(&y)));
        prop_assert_eq!(us.back.map(r, l, &d(&x)), x.clone());
        prop_assert_eq!(d(&x).val, x.val);
    }

    #[test]
    fn phi_and_psi_are_inverse(num in 0i64..400, den in 1i64..12, idx in prop::collection::vec(0usize..9, 1..6)) {
        let x = qf(num, den);
        for h in [HerbrandData::from_indices(&idx), HerbrandData::tame(idx.len() + 1)] {
            prop_assert_eq!(h.phi.eval(h.psi.eval(x)), x);
            prop_assert_eq!(h.psi.eval(h.phi.eval(x)), x);
            prop_assert!(h.phi.is_concave());
        }
    }

    #[test]
    fn herbrand_composition_is_transitive(num in 0i64..400, den in 1i64..12, outer in prop::collection::vec(0usize..9, 1..4), e in 1usize..5) {
        let x = qf(num, den);
        let (o, i) = (HerbrandData::from_indices(&outer), HerbrandData::tame(e));
        for (a, b) in [(&o, &i), (&i, &o)] {
            let c = HerbrandData::compose(a, b);
            prop_assert_eq!(c.psi.eval(x), b.psi.eval(a.psi.eval(x)));
            prop_assert_eq!(c.e, a.e * b.e);
        }
    }

    #[test]
    fn kottwitz_map_is_a_homomorphism(a in prop::collection::vec(-50i64..50, 4), b in prop::collection::vec(-50i64..50, 4)) {
        let qt = norm_one();
        let k = qt.kottwitz().unwrap();
        let g = qt.group();
        let (x, y) = (elem(g, &a), elem(g, &b));
        let lhs = k.value(&g.add(&x, &y));
        prop_assert_eq!(lhs, k.target().add(&k.value(&x), &k.value(&y)));
    }

    #[test]
    fn naive_filtration_decreases(s1 in 0i64..12, s2 in 0i64..12) {
        let qt = norm_one();
        let (lo, hi) = (qf(s1.min(s2), 4), qf(s1.max(s2), 4));
        prop_assert!(subgroup::contains(&qt.naive(lo).unwrap(), &qt.naive(hi).unwrap()));
        if lo > q(0) {
            prop_assert!(subgroup::equal(&qt.naive(lo).unwrap(), &qt.standard(lo).unwrap()));
        }
    }

    #[test]
    fn standard_isomorphism_matches_correspondents_far_out(a in prop::collection::vec(-10_000i64..10_000, 4), b in prop::collection::vec(-10_000i64..10_000, 4)) {
        let iso = gm_iso();
        let g = iso.source().group();
        let (x, y) = (elem(g, &a), elem(g, &b));
        prop_assert!(iso.pair.correspond(&x, &iso.apply(&x)));
        prop_assert_eq!(iso.apply(&g.add(&x, &y)), iso.target().group().add(&iso.apply(&x), &iso.apply(&y)));
    }
}
