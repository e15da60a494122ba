use std::sync::Arc;

use super::galois::{step_herbrand, GaloisGroup};
use super::herbrand::HerbrandData;
use crate::arith::{Digits, RingElem, StepKind, Tower};
use crate::error::{Error, Result};

/// A chosen identification O_F/p_F^l = O_F'/p_F'^l: digit-wise on residue digits, with the
/// uniformizer `varpi` of F sent to `varpi` of F'. By default both are the tower uniformizers.
#[derive(Clone, Debug)]
pub struct ClosePairCertificate {
    pub left: Arc<Tower>,
    pub right: Arc<Tower>,
    pub level: usize,
    left_varpi: Vec<u64>,
    right_varpi: Vec<u64>,
    /// pi / varpi, present when varpi is not the tower uniformizer
    left_ratio: Option<Vec<u64>>,
    right_ratio: Option<Vec<u64>>,
}

fn ratio(t: &Arc<Tower>, varpi: &RingElem) -> Result<Option<Vec<u64>>> {
    if varpi.valuation().finite() != Some(1) {
        return Err(Error::InvalidParameter("matched uniformizer must have valuation 1".into()));
    }
    if *varpi == t.uniformizer() {
        return Ok(None);
    }
    let unit = varpi.div_uniformizer_pow(1)?;
    Ok(Some(unit.inv()?.coeffs))
}

impl ClosePairCertificate {
    pub fn certify(left: &Arc<Tower>, right: &Arc<Tower>, level: usize) -> Result<Self> {
        Self::certify_with(left, right, level, &left.uniformizer(), &right.uniformizer())
    }

    pub fn certify_with(
        left: &Arc<Tower>,
        right: &Arc<Tower>,
        level: usize,
        left_varpi: &RingElem,
        right_varpi: &RingElem,
    ) -> Result<Self> {
        left.check_same(&left_varpi.tower)?;
        right.check_same(&right_varpi.tower)?;
        if left.residue_field() != right.residue_field() {
            return Err(Error::ResidueMismatch(format!(
                "{} has residue field of size {}, {} of size {}",
                left.name,
                left.q(),
                right.name,
                right.q()
            )));
        }
        let avail = left.precision().min(right.precision());
        if level == 0 || level > avail {
            return Err(Error::PrecisionExceeded { requested: level, available: avail });
        }
        let cert = ClosePairCertificate {
            left: left.clone(),
            right: right.clone(),
            level,
            left_ratio: ratio(left, left_varpi)?,
            right_ratio: ratio(right, right_varpi)?,
            left_varpi: left_varpi.coeffs.clone(),
            right_varpi: right_varpi.coeffs.clone(),
        };
        cert.check_carry_tables()?;
        Ok(cert)
    }

    /// Digit-pair sums and products expand identically on both sides.
    fn check_carry_tables(&self) -> Result<()> {
        let q = self.left.q();
        for a in 0..q {
            for b in a..q {
                for (op, name) in [(0, "+"), (1, "*")] {
                    let side = |t: &Arc<Tower>, ratio: &Option<Vec<u64>>| {
                        let x = t.lift_residue(&t.residue_field().from_index(a));
                        let y = t.lift_residue(&t.residue_field().from_index(b));
                        let z = if op == 0 { t.core.add(&x, &y) } else { t.mul_raw(&x, &y) };
                        t.digits_raw(&z, self.level, ratio.as_deref())
                    };
                    let l = side(&self.left, &self.left_ratio);
                    let r = side(&self.right, &self.right_ratio);
                    if l != r {
                        return Err(Error::NotClose {
                            level: self.level,
                            reason: format!("digit {a} {name} {b} expands to {l:?} in {} but {r:?} in {}", self.left.name, self.right.name),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> ClosePairCertificate {
        ClosePairCertificate {
            left: self.right.clone(),
            right: self.left.clone(),
            level: self.level,
            left_varpi: self.right_varpi.clone(),
            right_varpi: self.left_varpi.clone(),
            left_ratio: self.right_ratio.clone(),
            right_ratio: self.left_ratio.clone(),
        }
    }

    pub fn left_varpi(&self) -> RingElem {
        self.left.elem(self.left_varpi.clone())
    }

    pub fn right_varpi(&self) -> RingElem {
        self.right.elem(self.right_varpi.clone())
    }

    pub(crate) fn left_ratio(&self) -> Option<&[u64]> {
        self.left_ratio.as_deref()
    }

    pub(crate) fn right_ratio(&self) -> Option<&[u64]> {
        self.right_ratio.as_deref()
    }

    pub fn is_standard(&self) -> bool {
        self.left_ratio.is_none() && self.right_ratio.is_none()
    }

    /// Same towers, level and matched uniformizers.
    pub fn same_as(&self, other: &ClosePairCertificate) -> bool {
        self.left.check_same(&other.left).is_ok()
            && self.right.check_same(&other.right).is_ok()
            && self.level == other.level
            && self.left_varpi == other.left_varpi
            && self.right_varpi == other.right_varpi
    }

    /// Image of a raw element of the left tower, as a raw right element, modulo p^n (n <= level).
    pub(crate) fn map_raw(&self, x: &[u64], n: usize) -> Vec<u64> {
        let d = self.left.digits_raw(x, n, self.left_ratio.as_deref());
        self.right.reassemble_raw(&d, &self.right_varpi)
    }

    /// Standard digits of the image of x in O_F'/p^n.
    pub fn map_digits(&self, x: &RingElem, n: usize) -> Result<Digits> {
        self.left.check_same(&x.tower)?;
        if n > self.level {
            return Err(Error::LevelMismatch(format!("certificate level {} < {n}", self.level)));
        }
        let y = self.map_raw(&x.coeffs, n);
        Ok(self.right.digits_raw(&y, n, None))
    }

    pub fn map_elem(&self, x: &RingElem, n: usize) -> Result<RingElem> {
        self.left.check_same(&x.tower)?;
        Ok(self.right.elem(self.map_raw(&x.coeffs, n)))
    }

    /// The induced map p/p^{l+1} -> p'/p'^{l+1}, on an element of valuation >= 1.
    pub fn map_ideal_elem(&self, x: &RingElem) -> Result<RingElem> {
        self.left.check_same(&x.tower)?;
        if x.valuation().finite() == Some(0) {
            return Err(Error::InvalidParameter("element is a unit".into()));
        }
        let mut y = self.left.div_pi_raw(&x.coeffs);
        if let Some(r) = &self.left_ratio {
            y = self.left.mul_raw(&y, r);
        }
        let mapped = self.map_raw(&y, self.level);
        Ok(self.right.elem(self.right.mul_raw(&mapped, &self.right_varpi)))
    }

    pub fn to_text(&self) -> String {
        format!(
            "certificate left={} right={} level={} left_uniformizer={:?} right_uniformizer={:?}",
            self.left.name,
            self.right.name,
            self.level,
            self.left.digits_raw(&self.left_varpi, self.level.min(self.left.precision()), None),
            self.right.digits_raw(&self.right_varpi, self.level.min(self.right.precision()), None)
        )
    }
}

pub fn certify_close(left: &Arc<Tower>, right: &Arc<Tower>, level: usize) -> Result<ClosePairCertificate> {
    ClosePairCertificate::certify(left, right, level)
}

/// E = F + one step, transferred across a certificate on F.
#[derive(Clone, Debug)]
pub struct TransferredExtension {
    pub left: Arc<Tower>,
    pub right: Arc<Tower>,
    pub herbrand: HerbrandData,
    pub cert: ClosePairCertificate,
}

/// Transfers the top step of `ext` (whose prefix is `cert.left`) to the right side.
pub fn transfer_extension(cert: &ClosePairCertificate, ext: &Arc<Tower>, name: &str) -> Result<TransferredExtension> {
    let k = cert.left.levels();
    if ext.level_of(&cert.left) != Some(k) || ext.levels() != k + 1 {
        return Err(Error::TransferFailed(format!("{} is not a one-step extension of {}", ext.name, cert.left.name)));
    }
    let step = &ext.steps[k];
    let h = step_herbrand(ext, k)?;
    let l1 = h.l_one(cert.level)?;
    let right = match step.kind {
        StepKind::Unramified => {
            let poly = step.residue_poly.clone().expect("unramified step stores its residue polynomial");
            cert.right.extend_unramified_with(name, &step.generator, poly)?
        }
        StepKind::Eisenstein => {
            let coeffs = step
                .poly
                .iter()
                .map(|c| cert.map_ideal_elem(&ext_sub(cert, c)))
                .collect::<Result<Vec<_>>>()?;
            cert.right.extend_eisenstein(name, &step.generator, &coeffs)?
        }
    };
    let h_right = step_herbrand(&right, k.min(right.levels() - 1)).map_err(|e| Error::TransferFailed(e.to_string()))?;
    if h_right != h {
        return Err(Error::TransferFailed(format!("ramification data differ: {h} vs {h_right}")));
    }
    let l1_right = h_right.l_one(cert.level)?;
    if l1 != l1_right {
        return Err(Error::TransferFailed(format!("psi(l) differs: {l1} vs {l1_right}")));
    }
    let (lv, rv) = match step.kind {
        StepKind::Unramified => (
            ext.elem(ext.embed_from(k, &cert.left_varpi)),
            right.elem(right.embed_from(right.levels() - 1, &cert.right_varpi)),
        ),
        StepKind::Eisenstein => (ext.uniformizer(), right.uniformizer()),
    };
    let new_cert = ClosePairCertificate::certify_with(ext, &right, l1, &lv, &rv)
        .map_err(|e| Error::TransferFailed(format!("defining data not determined at level {}: {e}", cert.level)))?;
    // the new identification must restrict to the old one on F
    let fv = ext.elem(ext.embed_from(k, &cert.left_varpi));
    let image = new_cert.map_digits(&fv, l1)?;
    let expected = right.elem(right.embed_from(right.levels() - 1, &cert.right_varpi)).digits(l1)?;
    if image != expected {
        return Err(Error::TransferFailed("extended identification does not restrict to the given one".into()));
    }
    Ok(TransferredExtension { left: ext.clone(), right, herbrand: h, cert: new_cert })
}

fn ext_sub(cert: &ClosePairCertificate, c: &[u64]) -> RingElem {
    cert.left.elem(c.to_vec())
}

/// Transfers every step of `top` above `cert.left`, returning the chain of transfers.
pub fn transfer_tower(cert: &ClosePairCertificate, top: &Arc<Tower>, names: &[String]) -> Result<Vec<TransferredExtension>> {
    let k0 = top.level_of(&cert.left).ok_or_else(|| {
        Error::TransferFailed(format!("{} does not contain {}", top.name, cert.left.name))
    })?;
    let mut out: Vec<TransferredExtension> = vec![];
    let mut c = cert.clone();
    for k in k0..top.levels() {
        let ext = if k + 1 == top.levels() { top.clone() } else { Arc::new(top.prefix(k + 1, &format!("{}_{}", top.name, k + 1))) };
        let base = Arc::new(ext.prefix(k, &c.left.name));
        let c_base = rebase(&c, &base);
        let name = names.get(k - k0).cloned().unwrap_or_else(|| format!("{}'", ext.name));
        let t = transfer_extension(&c_base, &ext, &name)?;
        c = t.cert.clone();
        out.push(t);
    }
    Ok(out)
}

fn rebase(c: &ClosePairCertificate, left: &Arc<Tower>) -> ClosePairCertificate {
    let mut c = c.clone();
    c.left = left.clone();
    c
}

/// Matches Gal(L/F) with Gal(L'/F') through a certificate on L: s' corresponds to s when
/// s' o D = D o s on the generators above F, modulo p^{level}.
pub fn match_galois(cert: &ClosePairCertificate, left: &GaloisGroup, right: &GaloisGroup) -> Result<Vec<usize>> {
    if left.order() != right.order() {
        return Err(Error::TransferFailed("Galois groups have different orders".into()));
    }
    let l = cert.level;
    let gens: Vec<usize> = (left.base_level..left.top.levels()).collect();
    let mut perm = vec![];
    for s in &left.autos {
        let mut matches = vec![];
        for (j, s2) in right.autos.iter().enumerate() {
            let ok = gens.iter().all(|&k| {
                let g = left.top.generator(k).coeffs;
                let lhs = cert.map_raw(&s.images()[k], l);
                let dg = cert.map_raw(&g, l);
                let rhs = s2.apply_raw(&dg);
                cert.right.digits_raw(&lhs, l, None) == cert.right.digits_raw(&rhs, l, None)
            });
            if ok {
                matches.push(j);
            }
        }
        match matches.as_slice() {
            [j] => perm.push(*j),
            [] => return Err(Error::TransferFailed("an automorphism has no counterpart".into())),
            _ => return Err(Error::TransferFailed("Galois identification is ambiguous at this level".into())),
        }
    }
    for a in 0..left.order() {
        for b in 0..left.order() {
            if perm[left.group.mul(a, b)] != right.group.mul(perm[a], perm[b]) {
                return Err(Error::TransferFailed("matched automorphisms do not respect composition".into()));
            }
        }
    }
    Ok(perm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::BaseField;
    use crate::ramification::{different_from_polynomial, pwl::q};

    fn q3pi() -> Arc<Tower> {
        let q3 = Tower::new("Q3", BaseField::mixed(3, 4).unwrap()).unwrap();
        q3.extend_eisenstein("Q3pi", "pi", &[q3.from_int(-3), q3.zero()]).unwrap()
    }

    fn f3t() -> Arc<Tower> {
        Tower::new("F3t", BaseField::equal(3, 8).unwrap()).unwrap()
    }

    #[test]
    fn wild_quadratic_breaks() {
        let q2 = Tower::new("Q2", BaseField::mixed(2, 8).unwrap()).unwrap();
        let e = q2.extend_eisenstein("Q2s2", "pi", &[q2.from_int(-2), q2.zero()]).unwrap();
        let g = GaloisGroup::compute(&e, 0).unwrap();
        assert_eq!(g.order(), 2);
        assert_eq!(g.indices.iter().flatten().copied().collect::<Vec<_>>(), vec![3]);
        let h = ramification_breaks_of(&e);
        assert_eq!(h.psi.eval(q(3)), q(4));
        assert_eq!(h.l_one(3).unwrap(), 4);
        assert!(matches!(h.l_one(2), Err(Error::NotAtMostRamified(..))));
        assert_eq!(h.different_val, different_from_polynomial(&e, 0).unwrap());
    }

    fn ramification_breaks_of(t: &Arc<Tower>) -> HerbrandData {
        super::super::ramification_breaks(t, t.levels() - 1).unwrap()
    }

    #[test]
    fn tame_quadratic_action() {
        let f = f3t();
        let e = f.extend_eisenstein("E", "pi", &[f.uniformizer().neg(), f.zero()]).unwrap();
        let h = ramification_breaks_of(&e);
        assert_eq!(h, HerbrandData::tame(2));
        assert_eq!(h.different_val, different_from_polynomial(&e, 0).unwrap());
    }

    #[test]
    fn certificate_between_close_fields() {
        let (a, b) = (q3pi(), f3t());
        let c = certify_close(&a, &b, 2).unwrap();
        let x = a.one().add(&a.uniformizer()).unwrap();
        assert_eq!(c.map_digits(&x, 2).unwrap(), vec![1, 1]);
        let back = c.inverse();
        assert!(back.same_as(&certify_close(&b, &a, 2).unwrap()));
        assert!(certify_close(&a, &b, 3).is_err());
    }

    #[test]
    fn unramified_base_is_not_close_at_level_two() {
        let q3 = Tower::new("Q3", BaseField::mixed(3, 4).unwrap()).unwrap();
        assert!(matches!(certify_close(&q3, &f3t(), 2), Err(Error::NotClose { .. })));
        assert!(certify_close(&q3, &f3t(), 1).is_ok());
    }

    #[test]
    fn corrupted_uniformizer_is_rejected() {
        let (a, b) = (q3pi(), f3t());
        let two_t = b.from_int(2).mul(&b.uniformizer()).unwrap();
        // pi -> 2t respects the carry tables, but not the standard matching
        let c = ClosePairCertificate::certify_with(&a, &b, 2, &a.uniformizer(), &two_t).unwrap();
        assert!(!c.is_standard());
        let x = a.uniformizer();
        assert_eq!(c.map_digits(&x, 2).unwrap(), vec![0, 2]);
    }

    #[test]
    fn transfer_tame_quadratic() {
        let (a, b) = (q3pi(), f3t());
        let c = certify_close(&a, &b, 2).unwrap();
        let e = a.extend_eisenstein("E", "rho", &[a.uniformizer().neg(), a.zero()]).unwrap();
        let t = transfer_extension(&c, &e, "E'").unwrap();
        assert_eq!(t.cert.level, 4);
        assert_eq!(t.right.steps()[0].poly, vec![b.uniformizer().neg().coeffs, b.zero().coeffs]);
        let expected = b.extend_eisenstein("E'", "rho", &[b.uniformizer().neg(), b.zero()]).unwrap();
        assert_eq!(t.right.steps(), expected.steps());
        let ga = GaloisGroup::compute(&t.left, 1).unwrap();
        let gb = GaloisGroup::compute(&t.right, 0).unwrap();
        let perm = match_galois(&t.cert, &ga, &gb).unwrap();
        assert_eq!(perm.len(), 2);
        assert_eq!(perm[ga.identity()], gb.identity());
    }

    #[test]
    fn transfer_unramified_keeps_level() {
        let (a, b) = (q3pi(), f3t());
        let c = certify_close(&a, &b, 2).unwrap();
        let e = a.extend_unramified("E", "u", 2).unwrap();
        let t = transfer_extension(&c, &e, "E'").unwrap();
        assert_eq!(t.cert.level, 2);
        assert_eq!(t.right.q(), 9);
        let ga = GaloisGroup::compute(&t.left, 1).unwrap();
        let gb = GaloisGroup::compute(&t.right, 0).unwrap();
        assert!(match_galois(&t.cert, &ga, &gb).is_ok());
    }
}
