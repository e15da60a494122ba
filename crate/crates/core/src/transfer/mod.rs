mod datum;
mod iso;
mod report;
mod verify;

pub use datum::{ClosePairDatum, LevelPair, SplitTransfer};
pub use iso::{build_congruent_iso, build_standard_iso, IsoKind, IsoOutcome, StagePair, TransferIso};
pub use report::{check_all, sample, CheckLine, Report, ENUM_WINDOW};
pub use verify::{
    uniqueness_scan, verify_choice_independence, verify_congruent_coherence, verify_equivariance, verify_functoriality,
    verify_kottwitz, verify_level_reduction, verify_self_identity, verify_symmetry,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{quadratic_pair, quartic_pair, self_pair, tame_quadratic};
    use crate::ramification::{q, ClosePairCertificate};
    use crate::tori::TorusSpec;
    use crate::Error;

    const CAP: usize = 10_000;

    #[test]
    fn uniformizers_correspond() {
        let cert = quadratic_pair().unwrap();
        let t = TorusSpec::split("Gm", &cert.left, 1).unwrap();
        let d = ClosePairDatum::new(&cert, &t).unwrap();
        let p = d.pair(q(1)).unwrap();
        let pi = p.left.split.units.uniformizer();
        let tt = p.right.split.units.uniformizer();
        assert!(p.is_standard_correspondent(std::slice::from_ref(&pi), std::slice::from_ref(&tt)));
        let two_t = p.right.split.units.mul(&tt, &p.right.split.units.project(&cert.right.from_int(2)).unwrap());
        assert!(!p.is_standard_correspondent(&[pi], &[two_t]));
        assert!(matches!(d.pair(q(3)), Err(Error::LevelCondition(_))));
    }

    #[test]
    fn split_standard_iso_across_characteristics() {
        let cert = quartic_pair().unwrap();
        let t = TorusSpec::split("Gm", &cert.left, 1).unwrap();
        let d = ClosePairDatum::new(&cert, &t).unwrap();
        for r in 1..=4 {
            let iso = build_standard_iso(&d, q(r)).unwrap().built().unwrap();
            assert!(iso.check_correspondence(CAP).passed);
            assert!(uniqueness_scan(&iso.pair, CAP).passed);
            assert!(verify_symmetry(&iso, CAP).unwrap().passed);
        }
        let iso = build_congruent_iso(&d, 2, None, CAP).unwrap().built().unwrap();
        assert_eq!(iso.kind, IsoKind::Congruent);
        assert!(verify_kottwitz(&iso, CAP).unwrap().passed());
        assert!(verify_level_reduction(&d, q(3), q(1), CAP).unwrap().passed());
    }

    #[test]
    fn tame_quadratic_tori() {
        let cert = quartic_pair().unwrap();
        let e = tame_quadratic(&cert.left).unwrap();
        let res = TorusSpec::weil_restriction("R", &cert.left, &e, 1).unwrap();
        let n1 = TorusSpec::norm_one("N", &cert.left, &e).unwrap();
        let gm = TorusSpec::split_over("Gm", &cert.left, &e, 1).unwrap();
        let tr = std::sync::Arc::new(SplitTransfer::new(&cert, &res.galois).unwrap());
        let dr = ClosePairDatum::with_transfer(&tr, &res).unwrap();
        let dn = ClosePairDatum::with_transfer(&tr, &n1).unwrap();
        let dg = ClosePairDatum::with_transfer(&tr, &gm).unwrap();
        for r in [q(1), q(2)] {
            for d in [&dr, &dn, &dg] {
                let iso = build_standard_iso(d, r).unwrap().built().unwrap();
                assert!(iso.check_correspondence(CAP).passed, "{}", d.left.name);
                assert!(verify_kottwitz(&iso, CAP).unwrap().passed(), "{}", d.left.name);
            }
        }
        let dn_maps = crate::tori::diagonal_and_norm(&gm.lattice, &[gm.galois.identity()]).unwrap();
        let rep = verify_functoriality(&dg, &dr, &dn_maps.diagonal_dual, q(1), CAP).unwrap();
        assert!(rep.passed(), "{rep}");
        let rep = verify_functoriality(&dr, &dg, &dn_maps.norm_dual, q(1), CAP).unwrap();
        assert!(rep.passed(), "{rep}");
        assert!(verify_equivariance(&dr, q(2), None, CAP).unwrap().passed());
        let rep = verify_equivariance(&dn, q(1), Some(2), CAP).unwrap();
        assert!(rep.passed(), "{rep}");
    }

    #[test]
    fn self_pair_is_identity() {
        let cert = self_pair(4).unwrap();
        let t = TorusSpec::split("Gm", &cert.left, 2).unwrap();
        let d = ClosePairDatum::new(&cert, &t).unwrap();
        let iso = build_standard_iso(&d, q(2)).unwrap().built().unwrap();
        assert!(verify_self_identity(&iso, CAP).passed);
    }

    #[test]
    fn corrupted_uniformizer_fails_correspondence() {
        let good = quadratic_pair().unwrap();
        let two_t = good.right.uniformizer().mul(&good.right.from_int(2)).unwrap();
        let cert = ClosePairCertificate::certify_with(&good.left, &good.right, 2, &good.left.uniformizer(), &two_t).unwrap();
        let t = TorusSpec::split("Gm", &cert.left, 1).unwrap();
        let bad = ClosePairDatum::new(&cert, &t).unwrap();
        let honest = ClosePairDatum::new(&good, &t).unwrap();
        let p = honest.pair(q(1)).unwrap();
        let iso = build_standard_iso(&bad, q(1)).unwrap().built().unwrap();
        // judged against the honest identification, the corrupted map sends pi to 2t
        let x = p.left.from_tuple(&[p.left.split.units.uniformizer()]).unwrap();
        assert!(!p.correspond(&x, &iso.apply(&x)));
    }
}
