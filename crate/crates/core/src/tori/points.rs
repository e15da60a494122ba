use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::abelian::{subgroup, DirectSum, FgAbelianGroup, GroupElem, GroupHom, IntMatrix};
use crate::arith::Tower;
use crate::error::{Error, Result};
use crate::ramification::{GaloisGroup, Q};
use crate::units::{level_reduction, unit_inclusion, UnitElem, UnitQuotient};

use super::lattice::GaloisLattice;
use super::spec::{Catalog, Stage, TorusSpec};

/// A = Hom(X, L^x / (1 + p_L^N)) = (L^x / (1 + p_L^N))^n with (s h)(chi) = s(h(s^{-1} chi)).
#[derive(Clone, Debug)]
pub struct SplitPoints {
    pub tower: Arc<Tower>,
    pub galois: Arc<GaloisGroup>,
    pub lattice: GaloisLattice,
    pub units: Arc<UnitQuotient>,
    pub sum: DirectSum,
    /// The action of each automorphism on L^x / (1 + p^N).
    pub unit_autos: Vec<GroupHom>,
    pub actions: Vec<GroupHom>,
    /// A -> X_* = Z^n, coordinate-wise valuation.
    pub valuation: GroupHom,
}

impl SplitPoints {
    pub fn new(tower: &Arc<Tower>, galois: &Arc<GaloisGroup>, lattice: &GaloisLattice, level: usize) -> Result<Self> {
        let units = Arc::new(UnitQuotient::new(tower, level)?);
        let n = lattice.rank();
        let sum = DirectSum::new(vec![units.group().clone(); n]);
        let unit_autos = galois.autos.iter().map(|s| units.automorphism_hom(s)).collect::<Result<Vec<_>>>()?;
        let ug = units.group().clone();
        let mut actions = vec![];
        for (s, auto) in unit_autos.iter().enumerate() {
            let minv = lattice.matrix(galois.group.inv(s));
            let h = GroupHom::from_fn(sum.group.clone(), sum.group.clone(), |x| {
                let parts = sum.unpack(x);
                let out: Vec<GroupElem> = (0..n)
                    .map(|j| {
                        let mut acc = ug.zero();
                        for (i, p) in parts.iter().enumerate() {
                            let c = minv.get(j, i).to_i64().expect("small lattice entries");
                            acc = ug.add(&acc, &ug.scale(p, c));
                        }
                        auto.apply(&acc)
                    })
                    .collect();
                Ok(sum.pack(&out))
            })?;
            actions.push(h);
        }
        let free = Arc::new(FgAbelianGroup::free(n));
        let valuation = GroupHom::from_fn(sum.group.clone(), free, |x| {
            Ok(sum.unpack(x).iter().map(|p| ug.to_presentation(p)[0].clone()).collect())
        })?;
        Ok(SplitPoints { tower: tower.clone(), galois: galois.clone(), lattice: lattice.clone(), units, sum, unit_autos, actions, valuation })
    }

    pub fn group(&self) -> &Arc<FgAbelianGroup> {
        &self.sum.group
    }

    pub fn level(&self) -> usize {
        self.units.level()
    }

    pub fn rank(&self) -> usize {
        self.lattice.rank()
    }

    pub fn tuple(&self, x: &[BigInt]) -> Vec<UnitElem> {
        self.sum.unpack(x).iter().map(|p| self.units.from_group(p)).collect()
    }

    pub fn pack(&self, t: &[UnitElem]) -> Result<GroupElem> {
        if t.len() != self.rank() {
            return Err(Error::InvalidParameter(format!("tuple of length {} for rank {}", t.len(), self.rank())));
        }
        let parts = t.iter().map(|u| self.units.to_group(u)).collect::<Result<Vec<_>>>()?;
        Ok(self.sum.pack(&parts))
    }

    /// The action computed directly on tuples of field classes.
    pub fn act_tuple(&self, s: usize, t: &[UnitElem]) -> Result<Vec<UnitElem>> {
        let minv = self.lattice.matrix(self.galois.group.inv(s));
        let u = &self.units;
        (0..self.rank())
            .map(|j| {
                let mut acc = u.one();
                for (i, x) in t.iter().enumerate() {
                    let c = minv.get(j, i).to_i64().expect("small lattice entries");
                    acc = u.mul(&acc, &u.pow(x, c));
                }
                u.apply_automorphism(&self.galois.autos[s], &acc)
            })
            .collect()
    }

    /// Sum of the actions of the given elements.
    pub fn norm(&self, elems: &[usize]) -> GroupHom {
        let mut n = GroupHom::zero(self.group().clone(), self.group().clone());
        for &s in elems {
            n = n.add(&self.actions[s]);
        }
        n
    }

    /// The map induced by a lattice map f: X*(T2) -> X*(T1) (rows: characters of `target`'s lattice),
    /// h -> h o f, from these points (of T1) to `target` (of T2) over the same tower and level.
    pub fn lattice_map(&self, target: &SplitPoints, f: &IntMatrix) -> Result<GroupHom> {
        self.tower.check_same(&target.tower)?;
        if f.rows() != target.rank() || f.cols() != self.rank() || self.level() != target.level() {
            return Err(Error::InvalidParameter("lattice map has the wrong shape or levels differ".into()));
        }
        let ug = self.units.group().clone();
        GroupHom::from_fn(self.group().clone(), target.group().clone(), |x| {
            let parts = self.sum.unpack(x);
            let out: Vec<GroupElem> = (0..target.rank())
                .map(|j| {
                    let mut acc = ug.zero();
                    for (i, p) in parts.iter().enumerate() {
                        acc = ug.add(&acc, &ug.scale(p, f.get(j, i).to_i64().expect("small entries")));
                    }
                    acc
                })
                .collect();
            Ok(target.sum.pack(&out))
        })
    }

    /// Component-wise application of a unit-quotient map into `target`.
    pub fn componentwise(&self, target: &SplitPoints, h: &GroupHom) -> Result<GroupHom> {
        GroupHom::from_fn(self.group().clone(), target.group().clone(), |x| {
            let parts: Vec<GroupElem> = self.sum.unpack(x).iter().map(|p| h.apply(p)).collect();
            Ok(target.sum.pack(&parts))
        })
    }
}

/// Parametrization of the F-points by unit groups, for catalog tori.
#[derive(Clone, Debug)]
pub struct Param {
    pub units: Arc<UnitQuotient>,
    pub sum: DirectSum,
    /// S -> A
    pub map: GroupHom,
}

/// T(K) / T(K)^naive_r inside A, for K = F or an unramified stage.
#[derive(Clone, Debug)]
pub struct TorusPointsQuotient {
    pub spec: TorusSpec,
    pub r: Q,
    pub level: usize,
    pub split: Arc<SplitPoints>,
    pub inclusion: GroupHom,
    pub param: Option<Param>,
    /// false when the group is the fixed-point upper bound
    pub exact: bool,
    pub stage: Option<Arc<Stage>>,
}

pub fn ceil_level(e: usize, r: Q) -> usize {
    let x = r * Q::from_integer(e as i64);
    x.ceil().to_integer() as usize
}

impl TorusPointsQuotient {
    pub fn new(spec: &TorusSpec, r: Q) -> Result<Self> {
        Self::build(spec, r, None)
    }

    pub fn at_stage(spec: &TorusSpec, stage: &Arc<Stage>, r: Q) -> Result<Self> {
        Self::build(spec, r, Some(stage.clone()))
    }

    fn build(spec: &TorusSpec, r: Q, stage: Option<Arc<Stage>>) -> Result<Self> {
        if r <= Q::zero() {
            return Err(Error::InvalidParameter("filtration level must be positive".into()));
        }
        let level = ceil_level(spec.e(), r);
        let (tower, galois, rho, base) = match &stage {
            Some(st) => (st.tower.clone(), st.galois.clone(), st.rho.clone(), st.base.clone()),
            None => (spec.splitting.clone(), spec.galois.clone(), (0..spec.galois.order()).collect(), (0..spec.galois.order()).collect()),
        };
        let lattice = spec.lattice.pullback(galois.group.clone(), &rho)?;
        let split = Arc::new(SplitPoints::new(&tower, &galois, &lattice, level)?);
        let a = split.group().clone();
        let id = galois.identity();
        let lift = |t: usize| {
            base.iter()
                .copied()
                .find(|&s| rho[s] == t)
                .ok_or_else(|| Error::Undetermined("no automorphism of the stage restricts to the given one".into()))
        };
        let mut param = None;
        let mut exact = true;
        let inclusion = if base == [id] {
            GroupHom::identity(a.clone())
        } else {
            match &spec.catalog {
                Catalog::Split => {
                    if stage.is_some() {
                        return Err(Error::Unsupported("split torus with a nontrivial splitting field at a stage".into()));
                    }
                    let fu = Arc::new(UnitQuotient::new(&spec.field, r.ceil().to_integer() as usize)?);
                    let inc = unit_inclusion(&fu, &split.units)?;
                    let sum = DirectSum::new(vec![fu.group().clone(); spec.rank()]);
                    let map = GroupHom::from_fn(sum.group.clone(), a.clone(), |x| {
                        let parts: Vec<GroupElem> = sum.unpack(x).iter().map(|p| inc.apply(p)).collect();
                        Ok(split.sum.pack(&parts))
                    })?;
                    let incl = map.image_inclusion();
                    param = Some(Param { units: fu, sum, map });
                    incl
                }
                Catalog::WeilRestriction { rank } => {
                    let m = *rank;
                    let lifts = (0..spec.galois.order()).map(lift).collect::<Result<Vec<_>>>()?;
                    let sum = DirectSum::new(vec![split.units.group().clone(); m]);
                    let map = GroupHom::from_fn(sum.group.clone(), a.clone(), |x| {
                        let ys = sum.unpack(x);
                        let mut parts = vec![];
                        for &t in &lifts {
                            for y in &ys {
                                parts.push(split.unit_autos[t].apply(y));
                            }
                        }
                        Ok(split.sum.pack(&parts))
                    })?;
                    let incl = map.image_inclusion();
                    param = Some(Param { units: split.units.clone(), sum, map });
                    incl
                }
                Catalog::NormOne { sigma } => {
                    let s = lift(*sigma)?;
                    let d = spec.galois.order();
                    let ug = split.units.group().clone();
                    let sum = DirectSum::new(vec![ug.clone()]);
                    let map = GroupHom::from_fn(sum.group.clone(), a.clone(), |x| {
                        let y = &sum.unpack(x)[0];
                        let mut t = ug.sub(y, &split.unit_autos[s].apply(y));
                        let mut parts = vec![];
                        for _ in 0..d - 1 {
                            parts.push(t.clone());
                            t = split.unit_autos[s].apply(&t);
                        }
                        Ok(split.sum.pack(&parts))
                    })?;
                    let incl = map.image_inclusion();
                    param = Some(Param { units: split.units.clone(), sum, map });
                    incl
                }
                Catalog::General => {
                    exact = false;
                    let mut k = GroupHom::identity(a.clone());
                    for &h in &base {
                        let diff = split.actions[h].sub(&GroupHom::identity(a.clone()));
                        k = subgroup::intersection(&k, &diff.kernel());
                    }
                    k
                }
            }
        };
        for i in 0..inclusion.source.ngens() {
            let x = inclusion.apply(&inclusion.source.generator(i));
            for &h in &base {
                if split.actions[h].apply(&x) != x {
                    return Err(Error::NotEquivariant(format!("point parametrization of {} is not Galois-fixed", spec.name)));
                }
            }
        }
        Ok(TorusPointsQuotient { spec: spec.clone(), r, level, split, inclusion, param, exact, stage })
    }

    pub fn group(&self) -> &Arc<FgAbelianGroup> {
        &self.inclusion.source
    }

    pub fn to_ambient(&self, x: &[BigInt]) -> GroupElem {
        self.inclusion.apply(x)
    }

    pub fn tuple(&self, x: &[BigInt]) -> Vec<UnitElem> {
        self.split.tuple(&self.to_ambient(x))
    }

    pub fn from_tuple(&self, t: &[UnitElem]) -> Result<GroupElem> {
        let a = self.split.pack(t)?;
        self.inclusion.preimage(&a).ok_or(Error::NotFixed)
    }

    /// The point with the given parameters (units of F for split tori, of L otherwise).
    pub fn from_params(&self, ys: &[UnitElem]) -> Result<GroupElem> {
        let p = self.param.as_ref().ok_or_else(|| Error::Unsupported("torus has no parametrization".into()))?;
        let parts = ys.iter().map(|y| p.units.to_group(y)).collect::<Result<Vec<_>>>()?;
        let a = p.map.apply(&p.sum.pack(&parts));
        self.inclusion.preimage(&a).ok_or(Error::NotFixed)
    }

    pub fn elements(&self, window: i64, cap: usize) -> Result<Vec<GroupElem>> {
        self.group().elements(window, cap)
    }

    /// Q -> X_*, coordinate-wise valuation in L.
    pub fn valuation(&self) -> GroupHom {
        self.split.valuation.compose(&self.inclusion).expect("composable")
    }

    /// The bounded part: classes of finite order.
    pub fn bounded(&self) -> GroupHom {
        let g = self.group().clone();
        let t = g.torsion().len();
        let mut m = IntMatrix::zeros(g.ngens(), g.rank());
        for j in 0..g.rank() {
            m.set(t + j, j, BigInt::from(1));
        }
        let free = Arc::new(FgAbelianGroup::free(g.rank()));
        GroupHom::new(g, free, m).expect("projection to free part").kernel()
    }

    pub fn same_model(&self, lower: &TorusPointsQuotient) -> Result<()> {
        self.split.tower.check_same(&lower.split.tower)?;
        if self.spec.lattice != lower.spec.lattice || self.stage.is_some() != lower.stage.is_some() {
            return Err(Error::InvalidParameter("point groups of different tori".into()));
        }
        Ok(())
    }

    /// Q_r -> Q_s for s <= r.
    pub fn reduction_to(&self, lower: &TorusPointsQuotient) -> Result<GroupHom> {
        self.same_model(lower)?;
        let red = level_reduction(&self.split.units, &lower.split.units)?;
        let a = self.split.componentwise(&lower.split, &red)?;
        a.restrict(&self.inclusion, &lower.inclusion)
    }

    fn at_level(&self, s: Q) -> Result<TorusPointsQuotient> {
        Self::build(&self.spec, s, self.stage.clone())
    }

    /// T^naive_s / T^naive_r inside this quotient (s = 0 gives the valuation-zero part).
    pub fn naive(&self, s: Q) -> Result<GroupHom> {
        if s > self.r {
            return Err(Error::LevelCondition(format!("naive level {s} above the quotient level {}", self.r)));
        }
        if s.is_zero() {
            return Ok(self.valuation().kernel());
        }
        let lower = self.at_level(s)?;
        Ok(self.reduction_to(&lower)?.kernel())
    }

    pub fn kottwitz(&self) -> Result<KottwitzMap> {
        if self.stage.is_some() {
            return Err(Error::Unsupported("Kottwitz maps are computed over the base field".into()));
        }
        KottwitzMap::new(self)
    }

    /// T(F)^0 = ker(kappa).
    pub fn iwahori(&self) -> Result<GroupHom> {
        Ok(self.kottwitz()?.hom.kernel())
    }

    pub fn standard(&self, s: Q) -> Result<GroupHom> {
        Ok(subgroup::intersection(&self.naive(s)?, &self.iwahori()?))
    }

    /// The minimal congruent filtration, available for weakly induced tori at s > 0.
    pub fn congruent(&self, s: Q) -> Result<GroupHom> {
        if !self.spec.is_weakly_induced() {
            return Err(Error::NotWeaklyInduced);
        }
        if s <= Q::zero() {
            return Err(Error::Unsupported("congruent filtration at level 0".into()));
        }
        self.standard(s)
    }

    /// Order of the cokernel of the norm from A onto this quotient (diagnostic only).
    pub fn norm_cokernel_order(&self) -> Result<Option<BigInt>> {
        let base: Vec<usize> = match &self.stage {
            Some(st) => st.base.clone(),
            None => (0..self.spec.galois.order()).collect(),
        };
        let n = self.split.norm(&base);
        let into = n.restrict(&GroupHom::identity(self.split.group().clone()), &self.inclusion)?;
        Ok(into.cokernel().target.order())
    }

    pub fn format(&self, x: &[BigInt]) -> String {
        let t: Vec<String> = self.tuple(x).iter().map(|u| u.to_string()).collect();
        format!("[{}]", t.join(" "))
    }
}

/// kappa: T(F) -> (X_*(T)_I)^Frob on the quotient Q.
#[derive(Clone, Debug)]
pub struct KottwitzMap {
    /// X_* -> X_*_I
    pub coinvariants: GroupHom,
    /// Frobenius-fixed part of X_*_I, as an inclusion.
    pub fixed: GroupHom,
    /// Q -> fixed.source
    pub hom: GroupHom,
}

impl KottwitzMap {
    fn new(q: &TorusPointsQuotient) -> Result<Self> {
        let spec = &q.spec;
        let g = &spec.galois;
        let lat = &spec.lattice;
        let n = lat.rank();
        let xstar = Arc::new(FgAbelianGroup::free(n));
        let mut rows = IntMatrix::zeros(0, n);
        for &i in &g.inertia {
            rows = rows.vstack(&lat.dual_matrix(i).sub(&IntMatrix::identity(n)));
        }
        let coinv = GroupHom::new(Arc::new(FgAbelianGroup::free(rows.rows())), xstar.clone(), rows)?.cokernel();
        let c = coinv.target.clone();
        let on_c = |m: &IntMatrix| {
            GroupHom::from_fn(c.clone(), c.clone(), |x| {
                let lift = coinv.preimage(x).expect("projection is onto");
                Ok(coinv.apply(&m.left_apply(&lift)))
            })
        };
        let frob = on_c(&lat.dual_matrix(g.frobenius))?;
        let fixed = frob.sub(&GroupHom::identity(c.clone())).kernel();
        let cosets = g.inertia_cosets();
        let cores = |v: &[BigInt]| {
            let mut acc = c.zero();
            for &s in &cosets {
                acc = c.add(&acc, &coinv.apply(&lat.dual_matrix(s).left_apply(v)));
            }
            acc
        };
        // sum over inertia, X_*_I -> X_*
        let norm_i = GroupHom::from_fn(c.clone(), xstar.clone(), |x| {
            let lift = coinv.preimage(x).expect("projection is onto");
            let mut acc = vec![BigInt::zero(); n];
            for &i in &g.inertia {
                let y = lat.dual_matrix(i).left_apply(&lift);
                acc = acc.iter().zip(&y).map(|(a, b)| a + b).collect();
            }
            Ok(acc)
        })?;
        let all: Vec<usize> = (0..g.order()).collect();
        let norm = q.split.norm(&all);
        for k in 0..norm.kernel().source.ngens() {
            let ker = norm.kernel();
            let x = ker.apply(&ker.source.generator(k));
            if !c.is_zero(&cores(&q.split.valuation.apply(&x))) {
                return Err(Error::Undetermined("the Kottwitz homomorphism does not factor through this quotient".into()));
            }
        }
        let c_torsion_free = c.torsion().is_empty();
        let mut images = vec![];
        for i in 0..q.group().ngens() {
            let t = q.to_ambient(&q.group().generator(i));
            let val_t = q.split.valuation.apply(&t);
            let k = match norm.preimage(&t) {
                Some(s) => cores(&q.split.valuation.apply(&s)),
                None if c_torsion_free => norm_i
                    .preimage(&val_t)
                    .ok_or_else(|| Error::Undetermined("valuation is not an inertia norm".into()))?,
                None => return Err(Error::Undetermined(format!("no norm preimage for a generator of {}", spec.name))),
            };
            if norm_i.apply(&k) != val_t {
                return Err(Error::Undetermined("Kottwitz value is inconsistent with the valuation".into()));
            }
            images.push(fixed.preimage(&k).ok_or(Error::NotFixed)?);
        }
        let hom = GroupHom::from_images(q.group().clone(), fixed.source.clone(), &images)?;
        Ok(KottwitzMap { coinvariants: coinv, fixed, hom })
    }

    /// `fixed` maps X_*_I into the coinvariants, so its source is the target of kappa.
    #[allow(clippy::misnamed_getters)]
    pub fn target(&self) -> &Arc<FgAbelianGroup> {
        &self.fixed.source
    }

    /// kappa(x) as an element of X_*_I.
    pub fn value(&self, x: &[BigInt]) -> GroupElem {
        self.fixed.apply(&self.hom.apply(x))
    }
}
