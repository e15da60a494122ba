use std::sync::Arc;

use super::group::{DirectSum, FgAbelianGroup, GroupHom};
use super::matrix::IntMatrix;
use crate::error::{Error, Result};

/// A finite group given by its multiplication table; element 0 need not be the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    table: Vec<Vec<usize>>,
    identity: usize,
    inverses: Vec<usize>,
}

impl FiniteGroup {
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 || table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::NotGroupAction("malformed multiplication table".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| table[e][a] == a && table[a][e] == a))
            .ok_or_else(|| Error::NotGroupAction("no identity element".into()))?;
        let mut inverses = vec![0; n];
        for a in 0..n {
            inverses[a] = (0..n)
                .find(|&b| table[a][b] == identity)
                .ok_or_else(|| Error::NotGroupAction(format!("element {a} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::NotGroupAction("multiplication is not associative".into()));
                    }
                }
            }
        }
        Ok(FiniteGroup { table, identity, inverses })
    }

    pub fn trivial() -> Self {
        FiniteGroup { table: vec![vec![0]], identity: 0, inverses: vec![0] }
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        FiniteGroup::new(table).expect("cyclic group")
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn pow(&self, a: usize, n: usize) -> usize {
        (0..n).fold(self.identity, |acc, _| self.mul(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    /// Closure of a set of elements under multiplication.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order()];
        seen[self.identity] = true;
        let mut out = vec![self.identity];
        let mut i = 0;
        while i < out.len() {
            let x = out[i];
            for &g in gens {
                let y = self.mul(x, g);
                if !seen[y] {
                    seen[y] = true;
                    out.push(y);
                }
            }
            i += 1;
        }
        out.sort_unstable();
        out
    }

    pub fn is_subgroup(&self, elems: &[usize]) -> bool {
        elems.contains(&self.identity)
            && elems.iter().all(|&a| elems.iter().all(|&b| elems.contains(&self.mul(a, self.inv(b)))))
    }
}

/// Checks that `maps[g]` (endomorphisms of `m`) form a left action: maps[gh] = maps[g] o maps[h].
pub fn check_action(group: &FiniteGroup, maps: &[GroupHom], m: &FgAbelianGroup) -> Result<()> {
    if maps.len() != group.order() {
        return Err(Error::NotGroupAction(format!("{} maps for a group of order {}", maps.len(), group.order())));
    }
    for f in maps {
        if *f.source != *m || *f.target != *m {
            return Err(Error::NotGroupAction("map is not an endomorphism of the module".into()));
        }
    }
    if !maps[group.identity()].same_map(&GroupHom::identity(Arc::new(m.clone()))) {
        return Err(Error::NotGroupAction("identity does not act trivially".into()));
    }
    for a in 0..group.order() {
        for b in 0..group.order() {
            let comp = maps[a].compose(&maps[b])?;
            if !comp.same_map(&maps[group.mul(a, b)]) {
                return Err(Error::NotGroupAction(format!("composition table fails at ({a}, {b})")));
            }
        }
    }
    Ok(())
}

/// The subgroup of elements fixed by every map, as an inclusion into `m`.
pub fn fixed_points(group: &FiniteGroup, maps: &[GroupHom], m: &Arc<FgAbelianGroup>) -> Result<GroupHom> {
    check_action(group, maps, m)?;
    let n = m.ngens();
    let sum = DirectSum::new(vec![m.clone(); maps.len()]);
    let mut joint = IntMatrix::zeros(n, 0);
    for f in maps {
        joint = joint.hstack(&f.matrix().sub(&IntMatrix::identity(n)));
    }
    let h = GroupHom::new(m.clone(), sum.group.clone(), joint.mul(sum.pack_matrix()))?;
    Ok(h.kernel())
}

/// M / <(g - 1) m>, as the projection from `m`.
pub fn coinvariants(group: &FiniteGroup, maps: &[GroupHom], m: &Arc<FgAbelianGroup>) -> Result<GroupHom> {
    check_action(group, maps, m)?;
    let n = m.ngens();
    let mut rows = IntMatrix::zeros(0, n);
    for f in maps {
        rows = rows.vstack(&f.matrix().sub(&IntMatrix::identity(n)));
    }
    let free = Arc::new(FgAbelianGroup::free(rows.rows()));
    let h = GroupHom::new(free, m.clone(), rows)?;
    Ok(h.cokernel())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn action(m: &Arc<FgAbelianGroup>, mats: &[IntMatrix]) -> Vec<GroupHom> {
        mats.iter().map(|a| GroupHom::new(m.clone(), m.clone(), a.clone()).unwrap()).collect()
    }

    #[test]
    fn sign_action_on_z() {
        let z = Arc::new(FgAbelianGroup::free(1));
        let g = FiniteGroup::cyclic(2);
        let maps = action(&z, &[IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]])]);
        assert!(fixed_points(&g, &maps, &z).unwrap().source.is_trivial());
        assert_eq!(coinvariants(&g, &maps, &z).unwrap().target.to_string(), "Z/2");
    }

    #[test]
    fn swap_action_on_z2() {
        let z2 = Arc::new(FgAbelianGroup::free(2));
        let g = FiniteGroup::cyclic(2);
        let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        let maps = action(&z2, &[IntMatrix::identity(2), swap]);
        let fix = fixed_points(&g, &maps, &z2).unwrap();
        assert_eq!(fix.source.to_string(), "Z");
        let img = fix.apply(&fix.source.generator(0));
        assert!(img == vec![BigInt::from(1), BigInt::from(1)] || img == vec![BigInt::from(-1), BigInt::from(-1)]);
        let co = coinvariants(&g, &maps, &z2).unwrap();
        assert_eq!(co.target.to_string(), "Z");
        assert!(co.is_surjective());
    }

    #[test]
    fn bad_composition_table_rejected() {
        let z = Arc::new(FgAbelianGroup::free(1));
        let g = FiniteGroup::cyclic(3);
        let maps = action(&z, &[IntMatrix::identity(1), IntMatrix::from_rows(&[vec![-1]]), IntMatrix::identity(1)]);
        assert!(matches!(fixed_points(&g, &maps, &z), Err(Error::NotGroupAction(_))));
    }
}
