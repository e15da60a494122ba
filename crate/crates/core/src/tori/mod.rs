mod lattice;
mod points;
mod spec;

pub use lattice::{character, GaloisLattice};
pub use points::{ceil_level, KottwitzMap, Param, SplitPoints, TorusPointsQuotient};
pub use spec::{diagonal_and_norm, restriction_indices, restriction_map, Catalog, DiagonalAndNorm, Stage, TorusSpec};

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::abelian::subgroup;
    use crate::arith::{BaseField, Tower};
    use crate::ramification::q;
    use crate::Error;

    fn f3t() -> Arc<Tower> {
        Tower::new("F3t", BaseField::equal(3, 8).unwrap()).unwrap()
    }

    fn tame(f: &Arc<Tower>) -> Arc<Tower> {
        f.extend_eisenstein("E", "s", &[f.uniformizer().neg(), f.zero()]).unwrap()
    }

    fn order(h: &crate::abelian::GroupHom) -> String {
        h.source.to_string()
    }

    #[test]
    fn split_gm_points() {
        let f = f3t();
        let t = TorusSpec::split("Gm", &f, 1).unwrap();
        let qt = TorusPointsQuotient::new(&t, q(2)).unwrap();
        assert_eq!(qt.group().to_string(), "Z/6 x Z");
        assert_eq!(order(&qt.bounded()), "Z/6");
        assert_eq!(order(&qt.iwahori().unwrap()), "Z/6");
        assert_eq!(order(&qt.standard(q(1)).unwrap()), "Z/3");
        assert_eq!(order(&qt.naive(q(0)).unwrap()), "Z/6");
        let k = qt.kottwitz().unwrap();
        assert_eq!(k.target().to_string(), "Z");
        let pi = qt.from_tuple(&[qt.split.units.uniformizer()]).unwrap();
        assert_eq!(k.value(&pi), vec![1.into()]);
    }

    #[test]
    fn weil_restriction_of_tame_quadratic() {
        let f = f3t();
        let e = tame(&f);
        let t = TorusSpec::weil_restriction("R", &f, &e, 1).unwrap();
        let qt = TorusPointsQuotient::new(&t, q(1)).unwrap();
        assert_eq!(qt.level, 2);
        assert_eq!(qt.group().to_string(), "Z/6 x Z");
        let s = qt.from_params(&[qt.split.units.uniformizer()]).unwrap();
        let k = qt.kottwitz().unwrap();
        assert_eq!(k.target().to_string(), "Z");
        assert_eq!(k.value(&s), vec![1.into()]);
        assert_eq!(order(&qt.iwahori().unwrap()), "Z/6");
    }

    #[test]
    fn norm_one_unramified_has_trivial_kottwitz_target() {
        let f = f3t();
        let e = f.extend_unramified("F9t", "w", 2).unwrap();
        let t = TorusSpec::norm_one("N", &f, &e).unwrap();
        let qt = TorusPointsQuotient::new(&t, q(1)).unwrap();
        assert_eq!(qt.group().to_string(), "Z/4");
        let k = qt.kottwitz().unwrap();
        assert!(k.target().is_trivial());
        assert!(subgroup::equal(&qt.iwahori().unwrap(), &qt.bounded()));
    }

    #[test]
    fn norm_one_ramified_has_index_two_parahoric() {
        let f = f3t();
        let e = tame(&f);
        let t = TorusSpec::norm_one("N", &f, &e).unwrap();
        let qt = TorusPointsQuotient::new(&t, q(1)).unwrap();
        let k = qt.kottwitz().unwrap();
        assert_eq!(k.target().to_string(), "Z/2");
        let t0 = qt.iwahori().unwrap();
        assert_eq!(subgroup::index(&t0), Some(2.into()));
        assert!(subgroup::contains(&qt.bounded(), &t0));
        assert!(!subgroup::equal(&qt.bounded(), &t0));
        let minus = qt.from_params(&[qt.split.units.uniformizer()]).unwrap();
        assert!(!subgroup::contains_elem(&t0, &minus));
        assert!(t.is_weakly_induced());
        assert!(qt.congruent(q(1)).is_ok());
    }

    #[test]
    fn wild_norm_one_is_not_weakly_induced() {
        let q2 = Tower::new("Q2", BaseField::mixed(2, 8).unwrap()).unwrap();
        let e = q2.extend_eisenstein("Q2s2", "pi", &[q2.from_int(-2), q2.zero()]).unwrap();
        let t = TorusSpec::norm_one("N", &q2, &e).unwrap();
        assert!(!t.is_weakly_induced());
        let qt = TorusPointsQuotient::new(&t, q(1)).unwrap();
        assert!(matches!(qt.congruent(q(1)), Err(Error::NotWeaklyInduced)));
        // -1 = s/σ(s) is naive at level 1 but has nonzero Kottwitz value
        assert!(matches!(qt.kottwitz(), Err(Error::Undetermined(_))));
    }

    #[test]
    fn action_matches_tuple_formula() {
        let f = f3t();
        let e = tame(&f);
        let t = TorusSpec::norm_one("N", &f, &e).unwrap();
        let sp = SplitPoints::new(&e, &t.galois, &t.lattice, 2).unwrap();
        let elems = sp.group().elements(1, 2000).unwrap();
        for x in elems.iter().take(200) {
            for s in 0..t.galois.order() {
                let via_group = sp.tuple(&sp.actions[s].apply(x));
                let direct = sp.act_tuple(s, &sp.tuple(x)).unwrap();
                assert_eq!(via_group, direct);
            }
        }
    }
}
