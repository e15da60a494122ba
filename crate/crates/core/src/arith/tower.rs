use std::fmt;
use std::sync::Arc;

use super::base::{BaseField, Characteristic};
use super::residue::{ResidueElem, ResidueField, ResiduePoly};
use super::ring::RingCore;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    Unramified,
    Eisenstein,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExtensionStep {
    pub kind: StepKind,
    pub degree: usize,
    pub generator: String,
    /// Unramified steps: the defining polynomial over the residue field below.
    pub(crate) residue_poly: Option<ResiduePoly>,
    /// Monic relation, coefficients c_0..c_{d-1} as elements of the level below.
    pub(crate) poly: Vec<Vec<u64>>,
    /// Eisenstein steps: (a_0/pi)^{-1} at the level below.
    pub(crate) w_inv: Vec<u64>,
    /// Eisenstein steps: g^{d-1} + a_{d-1} g^{d-2} + ... + a_1 at this level.
    pub(crate) h: Vec<u64>,
    /// Images of the generator under the step automorphisms, identity first.
    pub(crate) galois: Option<Vec<Vec<u64>>>,
}

impl ExtensionStep {
    pub fn ramification(&self) -> usize {
        match self.kind {
            StepKind::Unramified => 1,
            StepKind::Eisenstein => self.degree,
        }
    }

    pub fn residue_degree(&self) -> usize {
        match self.kind {
            StepKind::Unramified => self.degree,
            StepKind::Eisenstein => 1,
        }
    }

    pub fn has_galois_action(&self) -> bool {
        self.galois.is_some()
    }
}

/// A base field followed by unramified and Eisenstein steps, at fixed working precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tower {
    pub name: String,
    pub base: BaseField,
    pub(crate) core: RingCore,
    pub(crate) steps: Vec<ExtensionStep>,
    pub(crate) residue_fields: Vec<ResidueField>,
    pub(crate) uniformizers: Vec<Vec<u64>>,
    pub(crate) e_levels: Vec<usize>,
    pub(crate) residue_positions: Vec<Vec<usize>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(usize),
    /// The element is zero at working precision; its valuation is at least this.
    AtLeast(usize),
}

impl Valuation {
    pub fn finite(self) -> Option<usize> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::AtLeast(v) => write!(f, ">={v}"),
        }
    }
}

impl Tower {
    pub fn new(name: &str, base: BaseField) -> Result<Arc<Tower>> {
        let core = RingCore::new(base.prime_ring());
        let tower = Tower {
            name: name.to_string(),
            base: base.clone(),
            uniformizers: vec![core.base.uniformizer()],
            core,
            steps: vec![],
            residue_fields: vec![ResidueField::prime(base.p)],
            e_levels: vec![1],
            residue_positions: vec![vec![0]],
        };
        if base.f > 1 {
            let poly = tower.residue_field().default_irreducible(base.f);
            let t = tower.push_unramified(name, "u", poly)?;
            return Ok(Arc::new(t));
        }
        Ok(Arc::new(tower))
    }

    pub fn levels(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[ExtensionStep] {
        &self.steps
    }

    pub fn p(&self) -> u64 {
        self.base.p
    }

    pub fn kind(&self) -> Characteristic {
        self.base.kind
    }

    /// Absolute ramification over the base field.
    pub fn e(&self) -> usize {
        *self.e_levels.last().unwrap()
    }

    pub fn f(&self) -> usize {
        self.residue_field().degree()
    }

    pub fn residue_field(&self) -> &ResidueField {
        self.residue_fields.last().unwrap()
    }

    pub fn residue_field_at(&self, k: usize) -> &ResidueField {
        &self.residue_fields[k]
    }

    pub fn q(&self) -> u64 {
        self.residue_field().size()
    }

    /// Working precision in digits of the tower uniformizer.
    pub fn precision(&self) -> usize {
        self.precision_at(self.levels())
    }

    pub(crate) fn precision_at(&self, k: usize) -> usize {
        self.e_levels[k] * self.base.precision
    }

    pub(crate) fn top(&self) -> usize {
        self.levels()
    }

    pub(crate) fn len(&self) -> usize {
        self.core.top_len()
    }

    /// The tower consisting of the first k steps.
    pub fn prefix(&self, k: usize, name: &str) -> Tower {
        let mut core = self.core.clone();
        core.degrees.truncate(k);
        core.polys.truncate(k);
        core.dims.truncate(k + 1);
        Tower {
            name: name.to_string(),
            base: self.base.clone(),
            core,
            steps: self.steps[..k].to_vec(),
            residue_fields: self.residue_fields[..=k].to_vec(),
            uniformizers: self.uniformizers[..=k].to_vec(),
            e_levels: self.e_levels[..=k].to_vec(),
            residue_positions: self.residue_positions[..=k].to_vec(),
        }
    }

    /// If `sub` is a prefix of this tower (same base, same leading steps), its level index.
    pub fn level_of(&self, sub: &Tower) -> Option<usize> {
        let k = sub.levels();
        if k > self.levels() || sub.base != self.base || sub.steps[..] != self.steps[..k] {
            return None;
        }
        Some(k)
    }

    pub fn with_name(&self, name: &str) -> Arc<Tower> {
        let mut t = self.clone();
        t.name = name.to_string();
        Arc::new(t)
    }

    // ---------------------------------------------------------------- extension

    pub fn extend_unramified(self: &Arc<Self>, name: &str, generator: &str, degree: usize) -> Result<Arc<Tower>> {
        if degree == 0 {
            return Err(Error::InvalidParameter("degree must be positive".into()));
        }
        if degree == 1 {
            return Ok(self.with_name(name));
        }
        let poly = self.residue_field().default_irreducible(degree);
        Ok(Arc::new(self.push_unramified(name, generator, poly)?))
    }

    /// Unramified step defined by x^d + poly over the residue field.
    pub fn extend_unramified_with(self: &Arc<Self>, name: &str, generator: &str, poly: ResiduePoly) -> Result<Arc<Tower>> {
        Ok(Arc::new(self.push_unramified(name, generator, poly)?))
    }

    fn push_unramified(&self, name: &str, generator: &str, poly: ResiduePoly) -> Result<Tower> {
        let rf = self.residue_field();
        if poly.len() < 2 {
            return Err(Error::InvalidParameter("unramified step needs degree at least 2".into()));
        }
        let new_rf = rf.extend(&poly)?;
        let k = self.levels();
        let lifted: Vec<Vec<u64>> = poly.iter().map(|c| self.lift_residue(c)).collect();
        let mut t = self.clone();
        t.name = name.to_string();
        t.core.push(lifted.clone());
        let d = poly.len();
        let block = t.core.len(k);
        let prev = &self.residue_positions[k];
        let mut positions = Vec::with_capacity(prev.len() * d);
        for a in 0..d {
            for &pos in prev {
                positions.push(pos + a * block);
            }
        }
        t.residue_positions.push(positions);
        t.residue_fields.push(new_rf);
        t.e_levels.push(self.e());
        t.uniformizers.push(t.core.embed(&self.uniformizers[k], k + 1));
        t.steps.push(ExtensionStep {
            kind: StepKind::Unramified,
            degree: d,
            generator: generator.to_string(),
            residue_poly: Some(poly),
            poly: lifted,
            w_inv: vec![],
            h: vec![],
            galois: None,
        });
        let galois = t.unramified_roots(k)?;
        t.steps[k].galois = Some(galois);
        Ok(t)
    }

    /// Eisenstein step x^d + c_{d-1} x^{d-1} + ... + c_0 with coefficients in this tower.
    pub fn extend_eisenstein(self: &Arc<Self>, name: &str, generator: &str, coeffs: &[RingElem]) -> Result<Arc<Tower>> {
        let d = coeffs.len();
        if d < 2 {
            return Err(Error::NotEisenstein("degree must be at least 2".into()));
        }
        for c in coeffs {
            self.check_same(&c.tower)?;
        }
        let k = self.levels();
        match self.val_at(k, &coeffs[0].coeffs) {
            Some(1) => {}
            v => {
                return Err(Error::NotEisenstein(format!(
                    "constant term has valuation {}",
                    v.map_or(">= precision".to_string(), |v| v.to_string())
                )))
            }
        }
        for (i, c) in coeffs.iter().enumerate().skip(1) {
            if self.val_at(k, &c.coeffs) == Some(0) {
                return Err(Error::NotEisenstein(format!("coefficient of x^{i} is a unit")));
            }
        }
        let poly: Vec<Vec<u64>> = coeffs.iter().map(|c| c.coeffs.clone()).collect();
        let w = self.div_pi_at(k, &poly[0]);
        let w_inv = self.inv_at(k, &w)?;
        let mut t = (**self).clone();
        t.name = name.to_string();
        t.core.push(poly.clone());
        let bl = t.core.len(k);
        let mut h = t.core.zero(k + 1);
        for i in 0..d - 1 {
            h[i * bl..(i + 1) * bl].copy_from_slice(&poly[i + 1]);
        }
        h[(d - 1) * bl] = 1;
        t.residue_positions.push(self.residue_positions[k].clone());
        t.residue_fields.push(self.residue_field().clone());
        t.e_levels.push(self.e() * d);
        t.uniformizers.push(t.core.generator(k));
        t.steps.push(ExtensionStep {
            kind: StepKind::Eisenstein,
            degree: d,
            generator: generator.to_string(),
            residue_poly: None,
            poly,
            w_inv,
            h,
            galois: None,
        });
        t.steps[k].galois = t.eisenstein_roots(k)?;
        Ok(Arc::new(t))
    }

    /// Roots of an unramified step's relation, Frobenius powers in order.
    fn unramified_roots(&self, k: usize) -> Result<Vec<Vec<u64>>> {
        let rf_low = &self.residue_fields[k];
        let rf = &self.residue_fields[k + 1];
        let step = &self.steps[k];
        let poly: Vec<Vec<u64>> = step.poly.iter().map(|c| self.core.embed(c, k + 1)).collect();
        let gen_res = self.residue_at(k + 1, &self.core.generator(k));
        let mut roots = vec![];
        let mut r = gen_res;
        for _ in 0..step.degree {
            let approx = self.lift_residue_at(k + 1, &r);
            roots.push(self.hensel_root(k + 1, &poly, approx)?);
            r = rf.pow(&r, rf_low.size());
        }
        Ok(roots)
    }

    fn eisenstein_roots(&self, k: usize) -> Result<Option<Vec<Vec<u64>>>> {
        let step = &self.steps[k];
        let d = step.degree;
        let g = self.core.generator(k);
        if d == 2 {
            // g -> -g - c_1
            let mut other = self.core.neg(&g);
            let c1 = self.core.embed(&step.poly[1], k + 1);
            self.core.sub_assign(&mut other, &c1);
            return Ok(Some(vec![g, other]));
        }
        let q = self.residue_fields[k].size();
        let pure = step.poly[1..].iter().all(|c| RingCore::is_zero(c));
        if !pure || (d as u64).is_multiple_of(self.p()) || !(q - 1).is_multiple_of(d as u64) {
            return Ok(None);
        }
        let zeta = self.root_of_unity(k, d)?;
        let zeta = self.core.embed(&zeta, k + 1);
        let mut images = vec![g.clone()];
        for i in 1..d {
            let prev = &images[i - 1];
            images.push(self.core.mul(k + 1, prev, &zeta));
        }
        Ok(Some(images))
    }

    /// Canonical primitive d-th root of unity at level k: Hensel lift of prim^{(q-1)/d}.
    pub(crate) fn root_of_unity(&self, k: usize, d: usize) -> Result<Vec<u64>> {
        let rf = &self.residue_fields[k];
        let q = rf.size();
        if !(q - 1).is_multiple_of(d as u64) {
            return Err(Error::Unsupported(format!("no primitive {d}-th root of unity in the residue field")));
        }
        let zbar = rf.pow(&rf.primitive_element(), (q - 1) / d as u64);
        let mut poly = vec![self.core.zero(k); d];
        poly[0] = self.core.embed_i64(k, -1);
        self.hensel_root(k, &poly, self.lift_residue_at(k, &zbar))
    }

    /// Newton iteration for a simple root of the monic x^d + poly at level k.
    pub(crate) fn hensel_root(&self, k: usize, poly: &[Vec<u64>], approx: Vec<u64>) -> Result<Vec<u64>> {
        let d = poly.len();
        let mut full = poly.to_vec();
        full.push(self.core.one(k));
        let deriv: Vec<Vec<u64>> = (1..=d).map(|i| self.core.scale(&full[i], i as u64)).collect();
        let mut y = approx;
        let max_iter = 2 + (usize::BITS - self.precision_at(k).leading_zeros()) as usize;
        for _ in 0..=max_iter + 2 {
            let val = self.core.eval(k, &full, &y);
            if RingCore::is_zero(&val) {
                return Ok(y);
            }
            let dv = self.core.eval(k, &deriv, &y);
            let step = self.core.mul(k, &val, &self.inv_at(k, &dv)?);
            self.core.sub_assign(&mut y, &step);
        }
        Err(Error::Undetermined("Hensel lifting did not converge".into()))
    }

    // ---------------------------------------------------------------- level arithmetic

    pub(crate) fn val_at(&self, k: usize, x: &[u64]) -> Option<usize> {
        if k == 0 {
            return self.core.base.valuation(x);
        }
        let step = &self.steps[k - 1];
        let bl = self.core.len(k - 1);
        let mut best: Option<usize> = None;
        for (i, c) in x.chunks(bl).enumerate() {
            if let Some(v) = self.val_at(k - 1, c) {
                let w = match step.kind {
                    StepKind::Unramified => v,
                    StepKind::Eisenstein => step.degree * v + i,
                };
                best = Some(best.map_or(w, |b| b.min(w)));
            }
        }
        best
    }

    /// Divides by the level-k uniformizer; the caller guarantees divisibility.
    pub(crate) fn div_pi_at(&self, k: usize, x: &[u64]) -> Vec<u64> {
        if k == 0 {
            return self.core.base.div_uniformizer(x);
        }
        let step = &self.steps[k - 1];
        let bl = self.core.len(k - 1);
        match step.kind {
            StepKind::Unramified => x.chunks(bl).flat_map(|c| self.div_pi_at(k - 1, c)).collect(),
            StepKind::Eisenstein => {
                let c0 = self.div_pi_at(k - 1, &x[..bl]);
                let t = self.core.mul(k - 1, &c0, &step.w_inv);
                let mut out = x[bl..].to_vec();
                out.resize(x.len(), 0);
                let corr = self.core.mul(k, &step.h, &self.core.embed(&t, k));
                self.core.sub_assign(&mut out, &corr);
                out
            }
        }
    }

    pub(crate) fn residue_at(&self, k: usize, x: &[u64]) -> ResidueElem {
        self.residue_positions[k].iter().map(|&pos| self.core.base.residue(&x[pos..])).collect()
    }

    pub(crate) fn lift_residue_at(&self, k: usize, r: &[u64]) -> Vec<u64> {
        let mut out = self.core.zero(k);
        for (&pos, &c) in self.residue_positions[k].iter().zip(r) {
            out[pos] = c;
        }
        out
    }

    pub(crate) fn lift_residue(&self, r: &[u64]) -> Vec<u64> {
        self.lift_residue_at(self.top(), r)
    }

    pub(crate) fn inv_at(&self, k: usize, x: &[u64]) -> Result<Vec<u64>> {
        if self.val_at(k, x) != Some(0) {
            return Err(Error::NonUnit);
        }
        let q = self.residue_fields[k].size();
        let mut y = self.core.pow(k, x, q - 2);
        let two = self.core.embed_i64(k, 2);
        let one = self.core.one(k);
        for _ in 0..64 {
            let xy = self.core.mul(k, x, &y);
            if xy == one {
                return Ok(y);
            }
            y = self.core.mul(k, &y, &self.core.sub(&two, &xy));
        }
        Err(Error::Undetermined("unit inversion did not converge".into()))
    }

    pub(crate) fn mul_raw(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.core.mul(self.top(), a, b)
    }

    pub(crate) fn inv_raw(&self, a: &[u64]) -> Result<Vec<u64>> {
        self.inv_at(self.top(), a)
    }

    pub(crate) fn val_raw(&self, a: &[u64]) -> Option<usize> {
        self.val_at(self.top(), a)
    }

    pub(crate) fn div_pi_raw(&self, a: &[u64]) -> Vec<u64> {
        self.div_pi_at(self.top(), a)
    }

    pub(crate) fn residue_raw(&self, a: &[u64]) -> ResidueElem {
        self.residue_at(self.top(), a)
    }

    pub(crate) fn pow_raw(&self, a: &[u64], e: u64) -> Vec<u64> {
        self.core.pow(self.top(), a, e)
    }

    pub(crate) fn embed_from(&self, k: usize, x: &[u64]) -> Vec<u64> {
        debug_assert_eq!(x.len(), self.core.len(k));
        self.core.embed(x, self.top())
    }

    /// Digits of x w.r.t. the uniformizer `varpi = pi * unit`, given `pi_over_varpi = unit^{-1}`.
    pub(crate) fn digits_raw(&self, x: &[u64], l: usize, pi_over_varpi: Option<&[u64]>) -> Vec<u64> {
        let rf = self.residue_field();
        let mut x = x.to_vec();
        let mut out = Vec::with_capacity(l);
        for i in 0..l {
            let r = self.residue_raw(&x);
            out.push(rf.index(&r));
            if i + 1 == l {
                break;
            }
            let lift = self.lift_residue(&r);
            self.core.sub_assign(&mut x, &lift);
            x = self.div_pi_raw(&x);
            if let Some(c) = pi_over_varpi {
                x = self.mul_raw(&x, c);
            }
        }
        out
    }

    pub(crate) fn reassemble_raw(&self, digits: &[u64], varpi: &[u64]) -> Vec<u64> {
        let rf = self.residue_field();
        let mut acc = self.core.zero(self.top());
        for &d in digits.iter().rev() {
            acc = self.mul_raw(&acc, varpi);
            self.core.add_assign(&mut acc, &self.lift_residue(&rf.from_index(d)));
        }
        acc
    }

    // ---------------------------------------------------------------- elements

    pub(crate) fn check_same(&self, other: &Tower) -> Result<()> {
        if std::ptr::eq(self, other) || (self.core == other.core && self.steps == other.steps && self.base == other.base) {
            Ok(())
        } else {
            Err(Error::TowerMismatch(self.name.clone(), other.name.clone()))
        }
    }

    pub fn elem(self: &Arc<Self>, coeffs: Vec<u64>) -> RingElem {
        debug_assert_eq!(coeffs.len(), self.len());
        RingElem { tower: self.clone(), coeffs }
    }

    pub fn zero(self: &Arc<Self>) -> RingElem {
        self.elem(self.core.zero(self.top()))
    }

    pub fn one(self: &Arc<Self>) -> RingElem {
        self.elem(self.core.one(self.top()))
    }

    pub fn from_int(self: &Arc<Self>, c: i64) -> RingElem {
        self.elem(self.core.embed_i64(self.top(), c))
    }

    pub fn uniformizer(self: &Arc<Self>) -> RingElem {
        self.elem(self.uniformizers[self.top()].clone())
    }

    /// The base uniformizer p (mixed) or t (equal).
    pub fn base_uniformizer(self: &Arc<Self>) -> RingElem {
        self.elem(self.embed_from(0, &self.uniformizers[0]))
    }

    /// Generator of step k as an element of the tower.
    pub fn generator(self: &Arc<Self>, k: usize) -> RingElem {
        self.elem(self.embed_from(k + 1, &self.core.generator(k)))
    }

    pub fn generator_named(self: &Arc<Self>, name: &str) -> Option<RingElem> {
        self.steps.iter().position(|s| s.generator == name).map(|k| self.generator(k))
    }

    pub fn lift(self: &Arc<Self>, r: &[u64]) -> RingElem {
        self.elem(self.lift_residue(r))
    }

    pub fn digit_lift(self: &Arc<Self>, index: u64) -> RingElem {
        self.lift(&self.residue_field().from_index(index))
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("tower {}\nbase {}\n", self.name, self.base);
        for (k, s) in self.steps.iter().enumerate() {
            let kind = match s.kind {
                StepKind::Unramified => "unramified",
                StepKind::Eisenstein => "eisenstein",
            };
            out.push_str(&format!("step {k} kind={kind} degree={} generator={}", s.degree, s.generator));
            match &s.residue_poly {
                Some(rp) => out.push_str(&format!(
                    " residue_poly=[{}]",
                    rp.iter().map(|c| self.residue_fields[k].index(c).to_string()).collect::<Vec<_>>().join(",")
                )),
                None => out.push_str(&format!(
                    " coeffs=[{}]",
                    s.poly.iter().map(|c| format!("{c:?}")).collect::<Vec<_>>().join(",")
                )),
            }
            out.push_str(&format!(" galois={}\n", s.galois.as_ref().map_or(0, |g| g.len())));
        }
        out.push_str(&format!("e={} f={} q={} precision={}\n", self.e(), self.f(), self.q(), self.precision()));
        out
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)
    }
}

#[derive(Clone, Debug)]
pub struct RingElem {
    pub(crate) tower: Arc<Tower>,
    pub(crate) coeffs: Vec<u64>,
}

impl PartialEq for RingElem {
    fn eq(&self, other: &Self) -> bool {
        self.tower.check_same(&other.tower).is_ok() && self.coeffs == other.coeffs
    }
}

impl Eq for RingElem {}

impl RingElem {
    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    fn same(&self, other: &RingElem) -> Result<()> {
        self.tower.check_same(&other.tower)
    }

    pub fn add(&self, other: &RingElem) -> Result<RingElem> {
        self.same(other)?;
        Ok(self.tower.elem(self.tower.core.add(&self.coeffs, &other.coeffs)))
    }

    pub fn sub(&self, other: &RingElem) -> Result<RingElem> {
        self.same(other)?;
        Ok(self.tower.elem(self.tower.core.sub(&self.coeffs, &other.coeffs)))
    }

    pub fn neg(&self) -> RingElem {
        self.tower.elem(self.tower.core.neg(&self.coeffs))
    }

    pub fn mul(&self, other: &RingElem) -> Result<RingElem> {
        self.same(other)?;
        Ok(self.tower.elem(self.tower.mul_raw(&self.coeffs, &other.coeffs)))
    }

    pub fn pow(&self, e: u64) -> RingElem {
        self.tower.elem(self.tower.pow_raw(&self.coeffs, e))
    }

    pub fn inv(&self) -> Result<RingElem> {
        Ok(self.tower.elem(self.tower.inv_raw(&self.coeffs)?))
    }

    pub fn is_zero(&self) -> bool {
        RingCore::is_zero(&self.coeffs)
    }

    pub fn valuation(&self) -> Valuation {
        match self.tower.val_raw(&self.coeffs) {
            Some(v) => Valuation::Finite(v),
            None => Valuation::AtLeast(self.tower.precision()),
        }
    }

    /// Exact division by pi^n; fails when x is not divisible. The top n digits of the
    /// quotient are not determined by the truncation and are returned as zero-padded noise.
    pub fn div_uniformizer_pow(&self, n: usize) -> Result<RingElem> {
        if let Some(v) = self.tower.val_raw(&self.coeffs) {
            if v < n {
                return Err(Error::InvalidParameter(format!("element has valuation {v} < {n}")));
            }
        }
        let mut x = self.coeffs.clone();
        for _ in 0..n {
            x = self.tower.div_pi_raw(&x);
        }
        Ok(self.tower.elem(x))
    }

    pub fn residue(&self) -> ResidueElem {
        self.tower.residue_raw(&self.coeffs)
    }

    pub fn digits(&self, l: usize) -> Result<Vec<u64>> {
        if l > self.tower.precision() {
            return Err(Error::PrecisionExceeded { requested: l, available: self.tower.precision() });
        }
        Ok(self.tower.digits_raw(&self.coeffs, l, None))
    }

    pub fn to_text(&self) -> String {
        format!("elem tower={} coeffs={:?}", self.tower.name, self.coeffs)
    }
}

impl fmt::Display for RingElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.tower.precision().min(8);
        let digits = self.tower.digits_raw(&self.coeffs, n, None);
        write!(f, "{}{:?}", self.tower.name, digits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q3pi() -> Arc<Tower> {
        let q3 = Tower::new("Q3", BaseField::mixed(3, 4).unwrap()).unwrap();
        let three = q3.from_int(3);
        q3.extend_eisenstein("Q3pi", "pi", &[three.neg(), q3.zero()]).unwrap()
    }

    #[test]
    fn inverse_in_z_mod_256() {
        let z = Tower::new("Q2", BaseField::mixed(2, 8).unwrap()).unwrap();
        let inv = z.from_int(3).inv().unwrap();
        assert_eq!(inv.coeffs, vec![171]);
        assert_eq!(z.from_int(2).inv(), Err(Error::NonUnit));
    }

    #[test]
    fn laurent_series_identities() {
        let f = Tower::new("F3t", BaseField::equal(3, 8).unwrap()).unwrap();
        let t = f.uniformizer();
        let one = f.one();
        let prod = one.add(&t).unwrap().mul(&one.sub(&t).unwrap()).unwrap();
        assert_eq!(prod, one.sub(&t.pow(2)).unwrap());
        assert_eq!(t.inv(), Err(Error::NonUnit));
        assert_eq!(t.pow(3).valuation(), Valuation::Finite(3));
        assert_eq!(f.zero().valuation(), Valuation::AtLeast(8));
    }

    #[test]
    fn ramified_valuations_and_digits() {
        let t = q3pi();
        let pi = t.uniformizer();
        assert_eq!(t.from_int(3).valuation(), Valuation::Finite(2));
        assert_eq!(pi.pow(3).valuation(), Valuation::Finite(3));
        // 1 + pi + pi^5 -> (1, 1)
        let x = t.one().add(&pi).unwrap().add(&pi.pow(5)).unwrap();
        assert_eq!(x.digits(2).unwrap(), vec![1, 1]);
        assert_eq!(t.from_int(3).digits(2).unwrap(), vec![0, 0]);
        assert!(x.digits(t.precision() + 1).is_err());
        // 2 = 2 mod pi^2 and -1 = 2 + 2*3 + ... = 2 + 2 pi^2 + ...
        assert_eq!(t.from_int(-1).digits(4).unwrap(), vec![2, 0, 2, 0]);
    }

    #[test]
    fn eisenstein_rejections_and_galois() {
        let q2 = Tower::new("Q2", BaseField::mixed(2, 8).unwrap()).unwrap();
        let bad = q2.extend_eisenstein("x", "pi", &[q2.from_int(-1), q2.zero()]);
        assert!(matches!(bad, Err(Error::NotEisenstein(_))));
        let e = q2.extend_eisenstein("Q2s2", "pi", &[q2.from_int(-2), q2.zero()]).unwrap();
        let g = e.steps[0].galois.as_ref().unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(e.elem(g[1].clone()), e.uniformizer().neg());
    }

    #[test]
    fn unramified_frobenius_root() {
        let q2 = Tower::new("Q2", BaseField::mixed(2, 6).unwrap()).unwrap();
        let rf = q2.residue_field().clone();
        let poly = vec![rf.one(), rf.one()];
        let e = q2.extend_unramified_with("Q4", "u", poly).unwrap();
        let roots = e.steps[0].galois.as_ref().unwrap();
        let u = e.generator(0);
        let frob = e.elem(roots[1].clone());
        // frob(u) satisfies x^2 + x + 1 and reduces to u^2
        let val = frob.mul(&frob).unwrap().add(&frob).unwrap().add(&e.one()).unwrap();
        assert!(val.is_zero());
        assert_eq!(frob.residue(), u.pow(2).residue());
        assert_ne!(frob, u);
    }

    #[test]
    fn division_by_uniformizer_is_exact() {
        let t = q3pi();
        let x = t.from_int(7).mul(&t.uniformizer()).unwrap();
        let y = x.div_uniformizer_pow(1).unwrap();
        assert_eq!(y.mul(&t.uniformizer()).unwrap(), x);
    }
}
