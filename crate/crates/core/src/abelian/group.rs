use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use super::matrix::IntMatrix;
use super::snf::{left_kernel, smith_normal_form, solve_left};
use crate::error::{Error, Result};

/// Element in normal form: torsion coordinates (reduced mod d_i) followed by free coordinates.
pub type GroupElem = Vec<BigInt>;

/// Z/d_1 x ... x Z/d_t x Z^r, remembering the presentation it came from.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FgAbelianGroup {
    torsion: Vec<BigInt>,
    rank: usize,
    pres_gens: usize,
    relations: IntMatrix,
    /// presentation coordinates (row) -> normal coordinates
    to_normal: IntMatrix,
    /// normal coordinates (row) -> presentation coordinates
    from_normal: IntMatrix,
}

impl fmt::Debug for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for FgAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.rank {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" x "))
        }
    }
}

impl FgAbelianGroup {
    /// Z^n modulo the row span of `relations` (any number of rows, n columns).
    pub fn from_relations(n: usize, relations: &IntMatrix) -> Self {
        assert_eq!(relations.cols(), n, "relation matrix width");
        let s = smith_normal_form(relations);
        let diag = s.diagonal();
        let mut torsion_idx = vec![];
        let mut torsion = vec![];
        let mut free_idx = vec![];
        for j in 0..n {
            let d = diag.get(j).cloned().unwrap_or_else(BigInt::zero);
            if d.is_zero() {
                free_idx.push(j);
            } else if !d.is_one() {
                torsion_idx.push(j);
                torsion.push(d);
            }
        }
        let mut kept = torsion_idx;
        kept.extend(&free_idx);
        let mut to_normal = s.v.select_cols(&kept);
        to_normal.reduce_cols(&torsion);
        FgAbelianGroup {
            rank: free_idx.len(),
            torsion,
            pres_gens: n,
            relations: relations.clone(),
            to_normal,
            from_normal: s.v_inv.select_rows(&kept),
        }
    }

    pub fn from_invariants(torsion: &[i64], rank: usize) -> Self {
        let n = torsion.len() + rank;
        let mut rel = IntMatrix::zeros(torsion.len(), n);
        for (i, &d) in torsion.iter().enumerate() {
            rel.set(i, i, BigInt::from(d));
        }
        Self::from_relations(n, &rel)
    }

    pub fn trivial() -> Self {
        Self::from_relations(0, &IntMatrix::zeros(0, 0))
    }

    pub fn free(rank: usize) -> Self {
        Self::from_relations(rank, &IntMatrix::zeros(0, rank))
    }

    pub fn torsion(&self) -> &[BigInt] {
        &self.torsion
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ngens(&self) -> usize {
        self.torsion.len() + self.rank
    }

    pub fn presentation_gens(&self) -> usize {
        self.pres_gens
    }

    pub fn relations(&self) -> &IntMatrix {
        &self.relations
    }

    pub fn is_trivial(&self) -> bool {
        self.ngens() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.rank == 0
    }

    pub fn torsion_order(&self) -> BigInt {
        self.torsion.iter().product()
    }

    pub fn order(&self) -> Option<BigInt> {
        self.is_finite().then(|| self.torsion_order())
    }

    /// Diagonal relation rows of the normal form.
    pub fn normal_relations(&self) -> IntMatrix {
        let mut rel = IntMatrix::zeros(self.torsion.len(), self.ngens());
        for (i, d) in self.torsion.iter().enumerate() {
            rel.set(i, i, d.clone());
        }
        rel
    }

    pub fn normalize(&self, x: &[BigInt]) -> GroupElem {
        assert_eq!(x.len(), self.ngens(), "element length");
        x.iter()
            .enumerate()
            .map(|(i, v)| if i < self.torsion.len() { v.mod_floor(&self.torsion[i]) } else { v.clone() })
            .collect()
    }

    pub fn zero(&self) -> GroupElem {
        vec![BigInt::zero(); self.ngens()]
    }

    pub fn generator(&self, i: usize) -> GroupElem {
        let mut g = self.zero();
        g[i] = BigInt::one();
        g
    }

    pub fn is_zero(&self, x: &[BigInt]) -> bool {
        self.normalize(x).iter().all(|c| c.is_zero())
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> GroupElem {
        let s: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        self.normalize(&s)
    }

    pub fn sub(&self, a: &[BigInt], b: &[BigInt]) -> GroupElem {
        let s: Vec<BigInt> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        self.normalize(&s)
    }

    pub fn neg(&self, a: &[BigInt]) -> GroupElem {
        let s: Vec<BigInt> = a.iter().map(|x| -x).collect();
        self.normalize(&s)
    }

    pub fn scale(&self, a: &[BigInt], c: i64) -> GroupElem {
        let c = BigInt::from(c);
        let s: Vec<BigInt> = a.iter().map(|x| x * &c).collect();
        self.normalize(&s)
    }

    pub fn from_presentation(&self, x: &[BigInt]) -> GroupElem {
        self.normalize(&self.to_normal.left_apply(x))
    }

    pub fn to_presentation(&self, y: &[BigInt]) -> Vec<BigInt> {
        self.from_normal.left_apply(y)
    }

    /// Matrix sending presentation coordinates to (unreduced) normal coordinates.
    pub fn presentation_map(&self) -> &IntMatrix {
        &self.to_normal
    }

    pub fn element_count(&self, window: i64) -> Option<u128> {
        let t = self.torsion_order().to_u128()?;
        let w = (2 * window + 1) as u128;
        w.checked_pow(self.rank as u32).and_then(|f| f.checked_mul(t))
    }

    /// All elements whose free coordinates lie in [-window, window].
    pub fn elements(&self, window: i64, cap: usize) -> Result<Vec<GroupElem>> {
        match self.element_count(window) {
            Some(c) if c <= cap as u128 => {}
            _ => return Err(Error::EnumerationLimit { what: format!("group {self}"), bound: cap }),
        }
        let mut ranges: Vec<(BigInt, BigInt)> = self.torsion.iter().map(|d| (BigInt::zero(), d.clone())).collect();
        ranges.extend((0..self.rank).map(|_| (BigInt::from(-window), BigInt::from(window + 1))));
        let mut out = vec![];
        let mut cur: Vec<BigInt> = ranges.iter().map(|r| r.0.clone()).collect();
        loop {
            out.push(cur.clone());
            let mut i = 0;
            loop {
                if i == cur.len() {
                    return Ok(out);
                }
                cur[i] += 1;
                if cur[i] < ranges[i].1 {
                    break;
                }
                cur[i] = ranges[i].0.clone();
                i += 1;
            }
        }
    }

    pub fn format_elem(&self, x: &[BigInt]) -> String {
        format!("({})", x.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
    }
}

/// A finite direct sum with its structure maps.
#[derive(Clone, Debug)]
pub struct DirectSum {
    pub group: Arc<FgAbelianGroup>,
    pub summands: Vec<Arc<FgAbelianGroup>>,
    offsets: Vec<usize>,
}

impl DirectSum {
    pub fn new(summands: Vec<Arc<FgAbelianGroup>>) -> Self {
        let blocks: Vec<IntMatrix> = summands.iter().map(|g| g.normal_relations()).collect();
        let rel = IntMatrix::block_diagonal(&blocks);
        let mut offsets = vec![0];
        for g in &summands {
            offsets.push(offsets.last().unwrap() + g.ngens());
        }
        let n = *offsets.last().unwrap();
        DirectSum { group: Arc::new(FgAbelianGroup::from_relations(n, &rel)), summands, offsets }
    }

    pub fn offset(&self, i: usize) -> usize {
        self.offsets[i]
    }

    /// Concatenated summand coordinates -> element.
    pub fn pack(&self, parts: &[GroupElem]) -> GroupElem {
        let flat: Vec<BigInt> = parts.iter().flatten().cloned().collect();
        self.group.from_presentation(&flat)
    }

    pub fn unpack(&self, x: &[BigInt]) -> Vec<GroupElem> {
        let flat = self.group.to_presentation(x);
        self.summands
            .iter()
            .enumerate()
            .map(|(i, g)| g.normalize(&flat[self.offsets[i]..self.offsets[i + 1]]))
            .collect()
    }

    /// Matrix from concatenated summand coordinates to normal coordinates.
    pub fn pack_matrix(&self) -> &IntMatrix {
        self.group.presentation_map()
    }

    pub fn injection(&self, i: usize) -> GroupHom {
        let rows: Vec<usize> = (self.offsets[i]..self.offsets[i + 1]).collect();
        let m = self.pack_matrix().select_rows(&rows);
        GroupHom::new(self.summands[i].clone(), self.group.clone(), m).expect("injection is well defined")
    }

    pub fn projection(&self, i: usize) -> GroupHom {
        let m = self.group.from_normal.col_range(self.offsets[i], self.offsets[i + 1]);
        GroupHom::new(self.group.clone(), self.summands[i].clone(), m).expect("projection is well defined")
    }
}

/// Homomorphism given by a matrix acting on row vectors of normal coordinates.
#[derive(Clone, Debug)]
pub struct GroupHom {
    pub source: Arc<FgAbelianGroup>,
    pub target: Arc<FgAbelianGroup>,
    matrix: IntMatrix,
}

impl PartialEq for GroupHom {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.matrix == other.matrix
    }
}

impl GroupHom {
    pub fn new(source: Arc<FgAbelianGroup>, target: Arc<FgAbelianGroup>, matrix: IntMatrix) -> Result<Self> {
        if matrix.rows() != source.ngens() || matrix.cols() != target.ngens() {
            return Err(Error::IllDefined(format!(
                "matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                source.ngens(),
                target.ngens()
            )));
        }
        let mut matrix = matrix;
        matrix.reduce_cols(target.torsion());
        for (i, d) in source.torsion().iter().enumerate() {
            let img: Vec<BigInt> = matrix.row(i).iter().map(|x| x * d).collect();
            if !target.is_zero(&img) {
                return Err(Error::IllDefined(format!("relation {d}*e_{i} is not sent to zero")));
            }
        }
        Ok(GroupHom { source, target, matrix })
    }

    /// The map determined by the images of the source generators.
    pub fn from_images(source: Arc<FgAbelianGroup>, target: Arc<FgAbelianGroup>, images: &[GroupElem]) -> Result<Self> {
        let cols = target.ngens();
        let m = IntMatrix::from_big_rows(cols, images.to_vec());
        Self::new(source, target, m)
    }

    /// The map sending each normal generator of the source to f(generator).
    pub fn from_fn<F>(source: Arc<FgAbelianGroup>, target: Arc<FgAbelianGroup>, f: F) -> Result<Self>
    where
        F: Fn(&[BigInt]) -> Result<GroupElem>,
    {
        let images = (0..source.ngens()).map(|i| f(&source.generator(i))).collect::<Result<Vec<_>>>()?;
        Self::from_images(source, target, &images)
    }

    pub fn identity(g: Arc<FgAbelianGroup>) -> Self {
        let n = g.ngens();
        GroupHom { source: g.clone(), target: g, matrix: IntMatrix::identity(n) }
    }

    pub fn zero(source: Arc<FgAbelianGroup>, target: Arc<FgAbelianGroup>) -> Self {
        let m = IntMatrix::zeros(source.ngens(), target.ngens());
        GroupHom { source, target, matrix: m }
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn apply(&self, x: &[BigInt]) -> GroupElem {
        self.target.normalize(&self.matrix.left_apply(x))
    }

    /// self after other.
    pub fn compose(&self, other: &GroupHom) -> Result<GroupHom> {
        if *other.target != *self.source {
            return Err(Error::IllDefined("composition of incompatible maps".into()));
        }
        GroupHom::new(other.source.clone(), self.target.clone(), other.matrix.mul(&self.matrix))
    }

    pub fn add(&self, other: &GroupHom) -> GroupHom {
        let mut m = self.matrix.add(&other.matrix);
        m.reduce_cols(self.target.torsion());
        GroupHom { source: self.source.clone(), target: self.target.clone(), matrix: m }
    }

    pub fn sub(&self, other: &GroupHom) -> GroupHom {
        let mut m = self.matrix.sub(&other.matrix);
        m.reduce_cols(self.target.torsion());
        GroupHom { source: self.source.clone(), target: self.target.clone(), matrix: m }
    }

    pub fn is_zero(&self) -> bool {
        (0..self.source.ngens()).all(|i| self.target.is_zero(self.matrix.row(i)))
    }

    /// Same map (same groups, same images of generators).
    pub fn same_map(&self, other: &GroupHom) -> bool {
        *self.source == *other.source && *self.target == *other.target && self.sub(other).is_zero()
    }

    fn stacked(&self) -> IntMatrix {
        self.matrix.vstack(&self.target.normal_relations())
    }

    /// Rows of source coordinates spanning the preimage of zero.
    fn kernel_lattice(&self) -> IntMatrix {
        let lk = left_kernel(&self.stacked());
        lk.col_range(0, self.source.ngens())
    }

    /// The kernel with its inclusion into the source.
    pub fn kernel(&self) -> GroupHom {
        let kmat = self.kernel_lattice();
        let s = kmat.rows();
        let rel = left_kernel(&kmat.vstack(&self.source.normal_relations())).col_range(0, s);
        let k = Arc::new(FgAbelianGroup::from_relations(s, &rel));
        let m = k.from_normal.mul(&kmat);
        GroupHom::new(k, self.source.clone(), m).expect("kernel inclusion is well defined")
    }

    /// Returns (image group, surjection source -> image, inclusion image -> target).
    pub fn image(&self) -> (Arc<FgAbelianGroup>, GroupHom, GroupHom) {
        let a = self.source.ngens();
        let rel = self.kernel_lattice().vstack(&self.source.normal_relations());
        let img = Arc::new(FgAbelianGroup::from_relations(a, &rel));
        let surj = GroupHom::new(self.source.clone(), img.clone(), img.to_normal.clone()).expect("surjection");
        let incl = GroupHom::new(img.clone(), self.target.clone(), img.from_normal.mul(&self.matrix)).expect("inclusion");
        (img, surj, incl)
    }

    /// The inclusion of the image subgroup into the target.
    pub fn image_inclusion(&self) -> GroupHom {
        self.image().2
    }

    /// The cokernel with its projection from the target.
    pub fn cokernel(&self) -> GroupHom {
        let b = self.target.ngens();
        let rel = self.target.normal_relations().vstack(&self.matrix);
        let c = Arc::new(FgAbelianGroup::from_relations(b, &rel));
        GroupHom::new(self.target.clone(), c.clone(), c.to_normal.clone()).expect("projection")
    }

    /// Some x with self(x) = y.
    pub fn preimage(&self, y: &[BigInt]) -> Option<GroupElem> {
        let x = solve_left(&self.stacked(), y)?;
        Some(self.source.normalize(&x[..self.source.ngens()]))
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().source.is_trivial()
    }

    pub fn is_surjective(&self) -> bool {
        self.cokernel().target.is_trivial()
    }

    pub fn is_isomorphism(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    /// Inverse of an isomorphism.
    pub fn inverse(&self) -> Result<GroupHom> {
        if !self.is_isomorphism() {
            return Err(Error::IllDefined("map is not an isomorphism".into()));
        }
        let images: Vec<GroupElem> = (0..self.target.ngens())
            .map(|i| self.preimage(&self.target.generator(i)).expect("surjective"))
            .collect();
        GroupHom::from_images(self.target.clone(), self.source.clone(), &images)
    }

    /// Restriction to the subgroup `incl: H -> source`, corestricted to `into: K -> target`.
    pub fn restrict(&self, incl: &GroupHom, into: &GroupHom) -> Result<GroupHom> {
        let comp = self.compose(incl)?;
        let images = (0..incl.source.ngens())
            .map(|i| {
                into.preimage(&comp.apply(&incl.source.generator(i)))
                    .ok_or_else(|| Error::IllDefined("image leaves the target subgroup".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        GroupHom::from_images(incl.source.clone(), into.source.clone(), &images)
    }
}

/// Subgroups are represented by their inclusion maps.
pub mod subgroup {
    use super::*;

    /// Is the image of `a` contained in the image of `b` (same ambient group)?
    pub fn contains(b: &GroupHom, a: &GroupHom) -> bool {
        let proj = b.cokernel();
        proj.compose(a).map(|c| c.is_zero()).unwrap_or(false)
    }

    pub fn equal(a: &GroupHom, b: &GroupHom) -> bool {
        contains(a, b) && contains(b, a)
    }

    pub fn intersection(a: &GroupHom, b: &GroupHom) -> GroupHom {
        let pa = a.cokernel();
        let pb = b.cokernel();
        let sum = DirectSum::new(vec![pa.target.clone(), pb.target.clone()]);
        let joint = pa.matrix.hstack(&pb.matrix).mul(sum.pack_matrix());
        let h = GroupHom::new(a.target.clone(), sum.group.clone(), joint).expect("joint projection");
        h.kernel()
    }

    /// Preimage of the subgroup `s` under `f`.
    pub fn preimage(f: &GroupHom, s: &GroupHom) -> GroupHom {
        let p = s.cokernel();
        p.compose(f).expect("compatible").kernel()
    }

    pub fn index(sub: &GroupHom) -> Option<BigInt> {
        sub.cokernel().target.order()
    }

    pub fn contains_elem(sub: &GroupHom, x: &[BigInt]) -> bool {
        sub.preimage(x).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Arc<FgAbelianGroup> {
        Arc::new(FgAbelianGroup::free(1))
    }

    #[test]
    fn times_two_on_z() {
        let h = GroupHom::new(z(), z(), IntMatrix::from_rows(&[vec![2]])).unwrap();
        assert!(h.kernel().source.is_trivial());
        assert_eq!(h.cokernel().target.to_string(), "Z/2");
    }

    #[test]
    fn zero_map_on_z() {
        let h = GroupHom::zero(z(), z());
        assert_eq!(h.kernel().source.to_string(), "Z");
        assert!(h.image().0.is_trivial());
    }

    #[test]
    fn squaring_on_units_mod_8() {
        // (Z/8)^x = Z/2 x Z/2 with generators 3, 5; squaring is zero
        let u = Arc::new(FgAbelianGroup::from_invariants(&[2, 2], 0));
        let sq = GroupHom::new(u.clone(), u.clone(), IntMatrix::from_rows(&[vec![2, 0], vec![0, 2]])).unwrap();
        assert!(sq.image().0.is_trivial());
        assert_eq!(sq.cokernel().target.order(), Some(BigInt::from(4)));
    }

    #[test]
    fn ill_defined_map_rejected() {
        let z2 = Arc::new(FgAbelianGroup::from_invariants(&[2], 0));
        let z3 = Arc::new(FgAbelianGroup::from_invariants(&[3], 0));
        assert!(GroupHom::new(z2, z3, IntMatrix::from_rows(&[vec![1]])).is_err());
    }

    #[test]
    fn direct_sum_merges_coprime_factors() {
        let a = Arc::new(FgAbelianGroup::from_invariants(&[2], 0));
        let b = Arc::new(FgAbelianGroup::from_invariants(&[3], 1));
        let s = DirectSum::new(vec![a, b]);
        assert_eq!(s.group.to_string(), "Z/6 x Z");
        let x = s.pack(&[vec![BigInt::from(1)], vec![BigInt::from(2), BigInt::from(-4)]]);
        assert_eq!(s.unpack(&x), vec![vec![BigInt::from(1)], vec![BigInt::from(2), BigInt::from(-4)]]);
        let inj = s.injection(1);
        let proj = s.projection(1);
        assert!(proj.compose(&inj).unwrap().same_map(&GroupHom::identity(s.summands[1].clone())));
    }

    #[test]
    fn subgroup_intersection() {
        // 2Z and 3Z inside Z meet in 6Z
        let two = GroupHom::new(z(), z(), IntMatrix::from_rows(&[vec![2]])).unwrap();
        let three = GroupHom::new(z(), z(), IntMatrix::from_rows(&[vec![3]])).unwrap();
        let i = subgroup::intersection(&two, &three);
        assert_eq!(subgroup::index(&i), Some(BigInt::from(6)));
        assert!(subgroup::contains(&two, &i) && !subgroup::contains(&i, &two));
    }
}
