use std::sync::Arc;

use super::herbrand::HerbrandData;
use crate::abelian::FiniteGroup;
use crate::arith::{RingElem, StepKind, Tower};
use crate::error::{Error, Result};

/// Ring map between towers over the same base, given by the images of the step generators.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TowerMap {
    source: Arc<Tower>,
    target: Arc<Tower>,
    images: Vec<Vec<u64>>,
}

impl TowerMap {
    pub fn new(source: &Arc<Tower>, target: &Arc<Tower>, images: Vec<Vec<u64>>) -> Result<Self> {
        if source.base != target.base || images.len() != source.levels() {
            return Err(Error::InvalidParameter("tower map needs one image per step over a common base".into()));
        }
        Ok(TowerMap { source: source.clone(), target: target.clone(), images })
    }

    pub fn identity(t: &Arc<Tower>) -> Self {
        let images = (0..t.levels()).map(|k| t.generator(k).coeffs).collect();
        TowerMap { source: t.clone(), target: t.clone(), images }
    }

    /// The inclusion of a prefix tower.
    pub fn inclusion(sub: &Arc<Tower>, top: &Arc<Tower>) -> Result<Self> {
        if top.level_of(sub).is_none() {
            return Err(Error::InvalidParameter(format!("{} is not a subtower of {}", sub.name, top.name)));
        }
        let images = (0..sub.levels()).map(|k| top.generator(k).coeffs).collect();
        Ok(TowerMap { source: sub.clone(), target: top.clone(), images })
    }

    pub fn source(&self) -> &Arc<Tower> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Tower> {
        &self.target
    }

    pub fn images(&self) -> &[Vec<u64>] {
        &self.images
    }

    fn apply_level(&self, k: usize, x: &[u64]) -> Vec<u64> {
        let t = &self.target;
        if k == 0 {
            return t.embed_from(0, x);
        }
        let bl = self.source.core.len(k - 1);
        let img = &self.images[k - 1];
        let mut acc = t.core.zero(t.top());
        for block in x.chunks(bl).rev() {
            acc = t.mul_raw(&acc, img);
            let c = self.apply_level(k - 1, block);
            t.core.add_assign(&mut acc, &c);
        }
        acc
    }

    pub(crate) fn apply_raw(&self, x: &[u64]) -> Vec<u64> {
        self.apply_level(self.source.levels(), x)
    }

    pub fn apply(&self, x: &RingElem) -> Result<RingElem> {
        self.source.check_same(&x.tower)?;
        Ok(self.target.elem(self.apply_raw(&x.coeffs)))
    }

    /// self o other.
    pub fn compose(&self, other: &TowerMap) -> Result<TowerMap> {
        other.target.check_same(&self.source)?;
        let images = other.images.iter().map(|x| self.apply_raw(x)).collect();
        Ok(TowerMap { source: other.source.clone(), target: self.target.clone(), images })
    }
}

/// Gal(L/F) for F a prefix of the tower L, materialized as automorphisms of L.
#[derive(Clone, Debug)]
pub struct GaloisGroup {
    pub top: Arc<Tower>,
    pub base_level: usize,
    pub autos: Vec<TowerMap>,
    pub group: FiniteGroup,
    /// i(s) = min over the generators above F of val(s(g) - g); None for the identity.
    pub indices: Vec<Option<usize>>,
    pub inertia: Vec<usize>,
    /// An element inducing x -> x^{q_F} on the residue field of L.
    pub frobenius: usize,
    /// For each step above F that has one: the element acting by the step's canonical
    /// generator on that step and fixing the other generators.
    pub generators: Vec<(String, usize)>,
}

impl GaloisGroup {
    pub fn compute(top: &Arc<Tower>, base_level: usize) -> Result<Self> {
        let n = top.levels();
        if base_level > n {
            return Err(Error::InvalidParameter("base level above the tower".into()));
        }
        let mut partial: Vec<Vec<Vec<u64>>> = vec![(0..base_level).map(|k| top.generator(k).coeffs).collect()];
        for k in base_level..n {
            let step = &top.steps[k];
            let mut next = vec![];
            for images in &partial {
                let tau = PartialMap { top, images };
                let coeffs: Vec<Vec<u64>> = step.poly.iter().map(|c| tau.apply(k, c)).collect();
                let roots = match step.kind {
                    StepKind::Unramified => unramified_roots(top, k, &coeffs)?,
                    StepKind::Eisenstein => {
                        let own: Vec<Vec<u64>> = step.poly.iter().map(|c| top.embed_from(k, c)).collect();
                        if coeffs != own {
                            return Err(Error::Unsupported(format!(
                                "step {} is not stable under the automorphisms below it",
                                step.generator
                            )));
                        }
                        let g = step.galois.as_ref().ok_or_else(|| {
                            Error::MissingGaloisAction(format!("Eisenstein step {} is not a supported Galois step", step.generator))
                        })?;
                        g.iter().map(|r| top.embed_from(k + 1, r)).collect()
                    }
                };
                for r in roots {
                    let mut im = images.clone();
                    im.push(r);
                    next.push(im);
                }
            }
            partial = next;
        }
        let autos: Vec<TowerMap> = partial.into_iter().map(|im| TowerMap::new(top, top, im)).collect::<Result<_>>()?;
        let degree: usize = top.steps[base_level..].iter().map(|s| s.degree).product();
        if autos.len() != degree {
            return Err(Error::MissingGaloisAction(format!(
                "found {} automorphisms for an extension of degree {degree}",
                autos.len()
            )));
        }
        let find = |m: &TowerMap| autos.iter().position(|a| a.images == m.images);
        let mut table = vec![vec![0; degree]; degree];
        for a in 0..degree {
            for b in 0..degree {
                let c = autos[a].compose(&autos[b])?;
                table[a][b] = find(&c).ok_or_else(|| Error::Undetermined("automorphisms are not closed under composition".into()))?;
            }
        }
        let group = FiniteGroup::new(table)?;

        let indices = autos
            .iter()
            .map(|s| {
                (base_level..n)
                    .filter_map(|k| {
                        let g = top.generator(k).coeffs;
                        let d = top.core.sub(&s.images[k], &g);
                        top.val_raw(&d)
                    })
                    .min()
            })
            .collect::<Vec<_>>();

        let rf = top.residue_field();
        let qf = top.residue_field_at(base_level).size();
        let unram: Vec<usize> =
            (base_level..n).filter(|&k| top.steps[k].kind == StepKind::Unramified).collect();
        let residue_action = |s: &TowerMap, power: u64| {
            unram.iter().all(|&k| {
                let g = top.generator(k).coeffs;
                top.residue_raw(&s.images[k]) == rf.pow(&top.residue_raw(&g), power)
            })
        };
        let inertia: Vec<usize> = (0..degree).filter(|&i| residue_action(&autos[i], 1)).collect();
        let frobenius = (0..degree)
            .find(|&i| residue_action(&autos[i], qf))
            .ok_or_else(|| Error::Undetermined("no Frobenius element".into()))?;

        let mut generators = vec![];
        for k in base_level..n {
            let step = &top.steps[k];
            let Some(roots) = &step.galois else { continue };
            if roots.len() < 2 {
                continue;
            }
            let target: Vec<Vec<u64>> = (0..n)
                .map(|j| if j == k { top.embed_from(k + 1, &roots[1]) } else { top.generator(j).coeffs })
                .collect();
            if let Some(i) = autos.iter().position(|a| a.images == target) {
                generators.push((step.generator.clone(), i));
            }
        }

        Ok(GaloisGroup { top: top.clone(), base_level, autos, group, indices, inertia, frobenius, generators })
    }

    pub fn order(&self) -> usize {
        self.autos.len()
    }

    pub fn identity(&self) -> usize {
        self.group.identity()
    }

    pub fn herbrand(&self) -> HerbrandData {
        let idx: Vec<usize> = self.indices.iter().filter_map(|i| *i).collect();
        HerbrandData::from_indices(&idx)
    }

    /// Elements of the p-Sylow subgroup of inertia (wild inertia).
    pub fn wild_inertia(&self) -> Vec<usize> {
        let p = self.top.p() as usize;
        self.inertia
            .iter()
            .copied()
            .filter(|&s| {
                let o = self.group.element_order(s);
                let mut m = o;
                while m.is_multiple_of(p) {
                    m /= p;
                }
                m == 1
            })
            .collect()
    }

    /// Coset representatives of the inertia subgroup.
    pub fn inertia_cosets(&self) -> Vec<usize> {
        let mut covered = vec![false; self.order()];
        let mut reps = vec![];
        for s in 0..self.order() {
            if covered[s] {
                continue;
            }
            reps.push(s);
            for &i in &self.inertia {
                covered[self.group.mul(s, i)] = true;
            }
        }
        reps
    }

    pub fn apply(&self, s: usize, x: &RingElem) -> Result<RingElem> {
        self.autos[s].apply(x)
    }

    pub fn name_of(&self, s: usize) -> String {
        if s == self.identity() {
            return "id".into();
        }
        for (name, g) in &self.generators {
            if *g == s {
                return format!("sigma_{name}");
            }
        }
        format!("s{s}")
    }
}

struct PartialMap<'a> {
    top: &'a Arc<Tower>,
    images: &'a [Vec<u64>],
}

impl PartialMap<'_> {
    /// Image of a level-k element of the tower under the map fixed on generators below k.
    fn apply(&self, k: usize, x: &[u64]) -> Vec<u64> {
        let t = self.top;
        if k == 0 {
            return t.embed_from(0, x);
        }
        let bl = t.core.len(k - 1);
        let img = &self.images[k - 1];
        let mut acc = t.core.zero(t.top());
        for block in x.chunks(bl).rev() {
            acc = t.mul_raw(&acc, img);
            let c = self.apply(k - 1, block);
            t.core.add_assign(&mut acc, &c);
        }
        acc
    }
}

/// Roots in the top tower of the monic x^d + coeffs, for the unramified step k.
fn unramified_roots(top: &Arc<Tower>, k: usize, coeffs: &[Vec<u64>]) -> Result<Vec<Vec<u64>>> {
    let rf = top.residue_field();
    let rf_step = top.residue_field_at(k + 1);
    let res: Vec<Vec<u64>> = coeffs.iter().map(|c| top.residue_raw(c)).collect();
    let mut out = vec![];
    for r in rf_step.elements() {
        let r = rf_step.embed(&r, rf);
        let mut acc = rf.one();
        for c in res.iter().rev() {
            acc = rf.add(&rf.mul(&acc, &r), c);
        }
        if rf.is_zero(&acc) {
            out.push(top.hensel_root(top.top(), coeffs, top.lift_residue(&r))?);
        }
    }
    Ok(out)
}

/// Herbrand data of step k of a tower (relative to the level below it).
pub fn ramification_breaks(tower: &Arc<Tower>, k: usize) -> Result<HerbrandData> {
    let step = tower.steps.get(k).ok_or_else(|| Error::InvalidParameter(format!("no step {k}")))?;
    if step.galois.is_none() {
        return Err(Error::MissingGaloisAction(format!("step {} has no supported Galois action", step.generator)));
    }
    let sub = Arc::new(tower.prefix(k + 1, &tower.name));
    Ok(GaloisGroup::compute(&sub, k)?.herbrand())
}

/// Herbrand data of step k; tame Eisenstein steps without a materialized action use phi(r) = r/e.
pub fn step_herbrand(tower: &Arc<Tower>, k: usize) -> Result<HerbrandData> {
    let step = &tower.steps[k];
    match step.kind {
        StepKind::Unramified => Ok(HerbrandData::identity()),
        StepKind::Eisenstein if step.galois.is_some() => ramification_breaks(tower, k),
        StepKind::Eisenstein if !(step.degree as u64).is_multiple_of(tower.p()) => Ok(HerbrandData::tame(step.degree)),
        StepKind::Eisenstein => Err(Error::MissingGaloisAction(format!(
            "wild step {} has no supported Galois action",
            step.generator
        ))),
    }
}

/// Herbrand data of L/F (F = level `base_level`) by composing the steps.
pub fn relative_herbrand(top: &Arc<Tower>, base_level: usize) -> Result<HerbrandData> {
    let mut h = HerbrandData::identity();
    for k in base_level..top.levels() {
        h = HerbrandData::compose(&h, &step_herbrand(top, k)?);
    }
    Ok(h)
}

/// val(P'(g)) for the Eisenstein step k, in the valuation of level k+1.
pub fn different_from_polynomial(tower: &Arc<Tower>, k: usize) -> Result<usize> {
    let step = &tower.steps[k];
    if step.kind != StepKind::Eisenstein {
        return Ok(0);
    }
    let sub = Arc::new(tower.prefix(k + 1, &tower.name));
    let d = step.degree;
    let g = sub.generator(k);
    let mut acc = sub.zero();
    for i in 1..=d {
        let c = if i == d { sub.one() } else { sub.elem(sub.embed_from(k, &step.poly[i])) };
        let term = c.mul(&g.pow(i as u64 - 1))?.mul(&sub.from_int(i as i64))?;
        acc = acc.add(&term)?;
    }
    acc.valuation().finite().ok_or_else(|| Error::Undetermined("derivative vanishes at working precision".into()))
}
