use std::collections::{BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::abelian::{smith_normal_form, FiniteGroup, IntMatrix};
use crate::error::{Error, Result};

/// Z^n with a left action of a finite group; matrices act on row vectors, chi -> chi * M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisLattice {
    rank: usize,
    group: FiniteGroup,
    action: Vec<IntMatrix>,
}

impl GaloisLattice {
    pub fn new(group: FiniteGroup, action: Vec<IntMatrix>) -> Result<Self> {
        if action.len() != group.order() {
            return Err(Error::NotGroupAction(format!("{} matrices for a group of order {}", action.len(), group.order())));
        }
        let rank = action.first().map_or(0, |m| m.rows());
        for m in &action {
            if m.rows() != rank || m.cols() != rank {
                return Err(Error::NotGroupAction("action matrices must be square of equal size".into()));
            }
            if !m.det().abs().is_one() && rank > 0 {
                return Err(Error::NotGroupAction("action matrix is not invertible over Z".into()));
            }
        }
        if action[group.identity()] != IntMatrix::identity(rank) {
            return Err(Error::NotGroupAction("identity does not act trivially".into()));
        }
        for a in 0..group.order() {
            for b in 0..group.order() {
                // a(b(chi)) = chi * M_b * M_a
                if action[group.mul(a, b)] != action[b].mul(&action[a]) {
                    return Err(Error::NotGroupAction(format!("matrices violate the group law at ({a}, {b})")));
                }
            }
        }
        Ok(GaloisLattice { rank, group, action })
    }

    /// Extends matrices given on generators to the whole group.
    pub fn from_generators(group: FiniteGroup, rank: usize, gens: &[(usize, IntMatrix)]) -> Result<Self> {
        let n = group.order();
        let mut mats: Vec<Option<IntMatrix>> = vec![None; n];
        mats[group.identity()] = Some(IntMatrix::identity(rank));
        let mut queue = VecDeque::from([group.identity()]);
        while let Some(x) = queue.pop_front() {
            for (g, mg) in gens {
                let y = group.mul(*g, x);
                let my = mats[x].as_ref().unwrap().mul(mg);
                match &mats[y] {
                    Some(m) if *m != my => {
                        return Err(Error::NotGroupAction("generator matrices violate a group relation".into()))
                    }
                    Some(_) => {}
                    None => {
                        mats[y] = Some(my);
                        queue.push_back(y);
                    }
                }
            }
        }
        let action = mats
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::NotGroupAction("generators do not generate the group".into()))?;
        Self::new(group, action)
    }

    pub fn trivial(group: FiniteGroup, rank: usize) -> Self {
        let action = vec![IntMatrix::identity(rank); group.order()];
        GaloisLattice { rank, group, action }
    }

    /// Z[G] with basis e_tau and s(e_tau) = e_{s tau}.
    pub fn regular(group: FiniteGroup) -> Self {
        let n = group.order();
        let action = (0..n)
            .map(|s| {
                let mut m = IntMatrix::zeros(n, n);
                for t in 0..n {
                    m.set(t, group.mul(s, t), BigInt::one());
                }
                m
            })
            .collect();
        GaloisLattice { rank: n, group, action }
    }

    /// Z[G]/(sum of G) for G cyclic generated by `sigma`, on the images of e_1, ..., e_{sigma^{d-2}}.
    pub fn norm_one(group: FiniteGroup, sigma: usize) -> Result<Self> {
        let d = group.order();
        if group.element_order(sigma) != d {
            return Err(Error::InvalidParameter("norm-one lattices need a cyclic group and a generator".into()));
        }
        let n = d - 1;
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            if i + 1 < n {
                m.set(i, i + 1, BigInt::one());
            } else {
                for j in 0..n {
                    m.set(i, j, BigInt::from(-1));
                }
            }
        }
        Self::from_generators(group, n, &[(sigma, m)])
    }

    /// Ind_H^G of an H-lattice, H given by the G-indices of its elements (in H's index order).
    /// Basis g_i (x) x_b at position i * n + b; coset representatives are the first members of
    /// each coset g H in index order.
    pub fn induce(group: &FiniteGroup, sub: &[usize], small: &GaloisLattice) -> Result<(Self, Vec<usize>)> {
        if sub.len() != small.group.order() || !group.is_subgroup(sub) {
            return Err(Error::InvalidParameter("induction needs a subgroup matching the lattice's group".into()));
        }
        let mut reps: Vec<usize> = vec![];
        let mut covered = vec![false; group.order()];
        for g in 0..group.order() {
            if !covered[g] {
                reps.push(g);
                for &h in sub {
                    covered[group.mul(g, h)] = true;
                }
            }
        }
        let n = small.rank;
        let k = reps.len();
        let h_index = |x: usize| sub.iter().position(|&h| h == x);
        let action = (0..group.order())
            .map(|s| {
                let mut m = IntMatrix::zeros(k * n, k * n);
                for (i, &gi) in reps.iter().enumerate() {
                    let sg = group.mul(s, gi);
                    let (j, h) = reps
                        .iter()
                        .enumerate()
                        .find_map(|(j, &gj)| h_index(group.mul(group.inv(gj), sg)).map(|h| (j, h)))
                        .expect("cosets cover the group");
                    let mh = &small.action[h];
                    for b in 0..n {
                        for c in 0..n {
                            m.set(i * n + b, j * n + c, mh.get(b, c).clone());
                        }
                    }
                }
                m
            })
            .collect();
        Ok((Self::new(group.clone(), action)?, reps))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn matrix(&self, s: usize) -> &IntMatrix {
        &self.action[s]
    }

    /// Action on the dual lattice: <s chi, s lambda> = <chi, lambda>.
    pub fn dual_matrix(&self, s: usize) -> IntMatrix {
        self.action[self.group.inv(s)].transpose()
    }

    pub fn dual(&self) -> GaloisLattice {
        let action = (0..self.group.order()).map(|s| self.dual_matrix(s)).collect();
        GaloisLattice { rank: self.rank, group: self.group.clone(), action }
    }

    /// The same lattice for a group identified with this one by `perm` (old index -> new index).
    pub fn reindex(&self, group: FiniteGroup, perm: &[usize]) -> Result<Self> {
        let mut action = vec![IntMatrix::zeros(0, 0); group.order()];
        for (s, m) in self.action.iter().enumerate() {
            action[perm[s]] = m.clone();
        }
        Self::new(group, action)
    }

    /// The lattice viewed through a homomorphism rho from a larger group.
    pub fn pullback(&self, group: FiniteGroup, rho: &[usize]) -> Result<Self> {
        let action = rho.iter().map(|&s| self.action[s].clone()).collect();
        Self::new(group, action)
    }

    /// Whether chi -> chi * f is a G-map from this lattice to `other`.
    pub fn is_equivariant(&self, other: &GaloisLattice, f: &IntMatrix) -> bool {
        self.group == other.group
            && f.rows() == self.rank
            && f.cols() == other.rank
            && (0..self.group.order()).all(|s| self.action[s].mul(f) == f.mul(&other.action[s]))
    }

    /// A basis permuted by the subgroup `sub`, searching vectors with entries in {-1, 0, 1}.
    pub fn permuted_basis(&self, sub: &[usize]) -> Option<Vec<Vec<i64>>> {
        let n = self.rank;
        if sub.iter().all(|&s| self.action[s] == IntMatrix::identity(n)) {
            return Some((0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect());
        }
        if n > 8 {
            return None;
        }
        let mut orbits: BTreeSet<Vec<Vec<i64>>> = BTreeSet::new();
        let total = 3usize.pow(n as u32);
        for code in 1..total {
            let mut c = code;
            let v: Vec<i64> = (0..n)
                .map(|_| {
                    let d = (c % 3) as i64 - 1;
                    c /= 3;
                    d
                })
                .collect();
            let row = IntMatrix::from_rows(std::slice::from_ref(&v));
            let mut orbit: Vec<Vec<i64>> = sub
                .iter()
                .map(|&s| row.mul(&self.action[s]).row(0).iter().map(|x| x.to_i64().unwrap()).collect())
                .collect();
            orbit.sort();
            orbit.dedup();
            orbits.insert(orbit);
        }
        let mut orbits: Vec<Vec<Vec<i64>>> = orbits.into_iter().collect();
        orbits.sort_by_key(|o| (o.iter().map(|v| v.iter().map(|x| x.abs()).sum::<i64>()).sum::<i64>(), o.len()));
        let mut chosen: Vec<Vec<i64>> = vec![];
        if search(&orbits, 0, n, &mut chosen) {
            Some(chosen)
        } else {
            None
        }
    }
}

fn rank_of(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    smith_normal_form(&IntMatrix::from_rows(rows)).rank
}

fn search(orbits: &[Vec<Vec<i64>>], start: usize, n: usize, chosen: &mut Vec<Vec<i64>>) -> bool {
    if chosen.len() == n {
        let d = IntMatrix::from_rows(chosen).det();
        return d.abs().is_one();
    }
    for i in start..orbits.len() {
        let o = &orbits[i];
        if chosen.len() + o.len() > n {
            continue;
        }
        let before = chosen.len();
        chosen.extend(o.iter().cloned());
        if rank_of(chosen) == chosen.len() && search(orbits, i + 1, n, chosen) {
            return true;
        }
        chosen.truncate(before);
    }
    false
}

/// Trace of each group element, the character of the lattice.
pub fn character(l: &GaloisLattice) -> Vec<BigInt> {
    (0..l.group().order())
        .map(|s| (0..l.rank()).fold(BigInt::zero(), |acc, i| acc + l.matrix(s).get(i, i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regular_and_norm_one() {
        let g = FiniteGroup::cyclic(2);
        let r = GaloisLattice::regular(g.clone());
        assert_eq!(r.matrix(1), &IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]));
        let n = GaloisLattice::norm_one(g.clone(), 1).unwrap();
        assert_eq!(n.matrix(1), &IntMatrix::from_rows(&[vec![-1]]));
        assert!(r.permuted_basis(&[0, 1]).is_some());
        assert!(n.permuted_basis(&[0, 1]).is_none());
        let c3 = GaloisLattice::norm_one(FiniteGroup::cyclic(3), 1).unwrap();
        assert_eq!(c3.rank(), 2);
        assert_eq!(character(&c3), vec![BigInt::from(2), BigInt::from(-1), BigInt::from(-1)]);
    }

    #[test]
    fn bad_generators_rejected() {
        let g = FiniteGroup::cyclic(2);
        let m = IntMatrix::from_rows(&[vec![2]]);
        assert!(GaloisLattice::from_generators(g, 1, &[(1, m)]).is_err());
    }

    #[test]
    fn induction_from_trivial_is_regular() {
        let g = FiniteGroup::cyclic(3);
        let t = GaloisLattice::trivial(FiniteGroup::trivial(), 1);
        let (ind, reps) = GaloisLattice::induce(&g, &[0], &t).unwrap();
        assert_eq!(reps, vec![0, 1, 2]);
        assert_eq!(ind, GaloisLattice::regular(g));
    }

    #[test]
    fn equivariance_of_sum_map() {
        let g = FiniteGroup::cyclic(2);
        let r = GaloisLattice::regular(g.clone());
        let t = GaloisLattice::trivial(g, 1);
        assert!(r.is_equivariant(&t, &IntMatrix::from_rows(&[vec![1], vec![1]])));
        assert!(t.is_equivariant(&r, &IntMatrix::from_rows(&[vec![1, 1]])));
        assert!(!t.is_equivariant(&r, &IntMatrix::from_rows(&[vec![1, 0]])));
    }
}
