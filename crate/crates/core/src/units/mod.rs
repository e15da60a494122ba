use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::abelian::{FgAbelianGroup, GroupElem, GroupHom, IntMatrix};
use crate::arith::{Digits, RingElem, Tower, TruncatedTriple};
use crate::error::{Error, Result};
use crate::ramification::{ClosePairCertificate, TowerMap};

/// Largest unit group that is enumerated.
pub const MAX_UNITS: u64 = 10_000;

/// pi^val times a unit, known modulo 1 + p^l.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitElem {
    pub val: i64,
    pub digits: Digits,
}

impl fmt::Display for UnitElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d: Vec<String> = self.digits.iter().map(|c| c.to_string()).collect();
        write!(f, "({}, [{}])", self.val, d.join(","))
    }
}

/// F^x / (1 + p^l) = Z x (O/p^l)^x, presented on the uniformizer class and unit generators.
#[derive(Clone, Debug)]
pub struct UnitQuotient {
    triple: TruncatedTriple,
    gens: Vec<Digits>,
    gen_orders: Vec<u64>,
    dlog: HashMap<Digits, Vec<i64>>,
    group: Arc<FgAbelianGroup>,
}

impl UnitQuotient {
    pub fn new(tower: &Arc<Tower>, level: usize) -> Result<Self> {
        let triple = TruncatedTriple::new(tower, level)?;
        let q = tower.q();
        let count = (q - 1).saturating_mul(q.checked_pow(level as u32 - 1).unwrap_or(u64::MAX));
        if count > MAX_UNITS {
            return Err(Error::EnumerationLimit { what: format!("units of {} mod p^{level}", tower.name), bound: MAX_UNITS as usize });
        }
        let mut uq = UnitQuotient { triple, gens: vec![], gen_orders: vec![], dlog: HashMap::new(), group: Arc::new(FgAbelianGroup::free(1)) };
        uq.discover(count as usize);
        Ok(uq)
    }

    /// Grows the subgroup generated so far one cyclic piece at a time.
    fn discover(&mut self, count: usize) {
        let one = self.one_digits();
        let mut members: Vec<Digits> = vec![one.clone()];
        self.dlog.insert(one, vec![]);
        let mut relations: Vec<(Vec<i64>, i64)> = vec![];
        let size = self.triple.size() as u64;
        let mut cand = 0u64;
        while members.len() < count {
            let x = loop {
                let d = self.triple.from_class_index(cand);
                cand += 1;
                if d[0] != 0 && !self.dlog.contains_key(&d) {
                    break d;
                }
                assert!(cand <= size, "unit enumeration exhausted");
            };
            let k = self.gens.len();
            let mut y = x.clone();
            let mut m = 1i64;
            while !self.dlog.contains_key(&y) {
                y = self.mul_digits(&y, &x);
                m += 1;
            }
            relations.push((self.dlog[&y].clone(), m));
            let base = members.clone();
            let mut power = x.clone();
            for j in 1..m {
                for h in &base {
                    let z = self.mul_digits(&power, h);
                    let mut c = self.dlog[h].clone();
                    c.resize(k + 1, 0);
                    c[k] = j;
                    self.dlog.insert(z.clone(), c);
                    members.push(z);
                }
                power = self.mul_digits(&power, &x);
            }
            self.gens.push(x);
        }
        let k = self.gens.len();
        for c in self.dlog.values_mut() {
            c.resize(k, 0);
        }
        let mut rows = vec![];
        for (i, (prev, m)) in relations.iter().enumerate() {
            let mut row = vec![0i64; k + 1];
            row[i + 1] = *m;
            for (j, c) in prev.iter().enumerate() {
                row[j + 1] -= c;
            }
            rows.push(row);
        }
        let rel = if rows.is_empty() { IntMatrix::zeros(0, k + 1) } else { IntMatrix::from_rows(&rows) };
        self.group = Arc::new(FgAbelianGroup::from_relations(k + 1, &rel));
        self.gen_orders = self.gens.iter().map(|g| self.digit_order(g)).collect();
    }

    fn digit_order(&self, g: &[u64]) -> u64 {
        let one = self.one_digits();
        let mut y = g.to_vec();
        let mut n = 1;
        while y != one {
            y = self.mul_digits(&y, g);
            n += 1;
        }
        n
    }

    pub fn tower(&self) -> &Arc<Tower> {
        self.triple.tower()
    }

    pub fn level(&self) -> usize {
        self.triple.level()
    }

    pub fn group(&self) -> &Arc<FgAbelianGroup> {
        &self.group
    }

    pub fn unit_order(&self) -> u64 {
        self.dlog.len() as u64
    }

    pub fn unit_generators(&self) -> &[Digits] {
        &self.gens
    }

    fn one_digits(&self) -> Digits {
        let mut d = vec![0; self.level()];
        d[0] = 1;
        d
    }

    pub fn one(&self) -> UnitElem {
        UnitElem { val: 0, digits: self.one_digits() }
    }

    pub fn uniformizer(&self) -> UnitElem {
        UnitElem { val: 1, digits: self.one_digits() }
    }

    pub(crate) fn raw(&self, d: &[u64]) -> Vec<u64> {
        let t = self.tower();
        t.reassemble_raw(d, &t.uniformizer().coeffs)
    }

    pub(crate) fn digits_of(&self, x: &[u64]) -> Digits {
        self.tower().digits_raw(x, self.level(), None)
    }

    pub(crate) fn mul_digits(&self, a: &[u64], b: &[u64]) -> Digits {
        let t = self.tower();
        self.digits_of(&t.mul_raw(&self.raw(a), &self.raw(b)))
    }

    fn inv_digits(&self, a: &[u64]) -> Digits {
        let t = self.tower();
        self.digits_of(&t.inv_raw(&self.raw(a)).expect("unit class"))
    }

    fn pow_digits(&self, a: &[u64], n: i64) -> Digits {
        let base = if n < 0 { self.inv_digits(a) } else { a.to_vec() };
        let t = self.tower();
        self.digits_of(&t.pow_raw(&self.raw(&base), n.unsigned_abs()))
    }

    pub fn element(&self, val: i64, digits: Digits) -> Result<UnitElem> {
        if digits.len() != self.level() {
            return Err(Error::LevelMismatch(format!("{} digits at level {}", digits.len(), self.level())));
        }
        if digits[0] == 0 || digits.iter().any(|&d| d >= self.tower().q()) {
            return Err(Error::InvalidParameter(format!("{digits:?} is not a unit class")));
        }
        Ok(UnitElem { val, digits })
    }

    /// The class of a unit of the tower.
    pub fn unit_class(&self, u: &RingElem) -> Result<UnitElem> {
        self.tower().check_same(u.tower())?;
        if u.valuation().finite() != Some(0) {
            return Err(Error::NonUnit);
        }
        Ok(UnitElem { val: 0, digits: u.digits(self.level())? })
    }

    /// (val x, class of x pi^{-val x}).
    pub fn project(&self, x: &RingElem) -> Result<UnitElem> {
        self.tower().check_same(x.tower())?;
        let v = x.valuation().finite().ok_or(Error::ZeroElement)?;
        let avail = self.tower().precision();
        if v + self.level() > avail {
            return Err(Error::PrecisionExceeded { requested: v + self.level(), available: avail });
        }
        let u = x.div_uniformizer_pow(v)?;
        Ok(UnitElem { val: v as i64, digits: u.digits(self.level())? })
    }

    /// A representative pi^val * u when val >= 0.
    pub fn lift(&self, e: &UnitElem) -> Result<RingElem> {
        if e.val < 0 {
            return Err(Error::InvalidParameter("negative valuation has no integral representative".into()));
        }
        let t = self.tower();
        let u = t.elem(self.raw(&e.digits));
        t.uniformizer().pow(e.val as u64).mul(&u)
    }

    pub fn mul(&self, a: &UnitElem, b: &UnitElem) -> UnitElem {
        UnitElem { val: a.val + b.val, digits: self.mul_digits(&a.digits, &b.digits) }
    }

    pub fn inv(&self, a: &UnitElem) -> UnitElem {
        UnitElem { val: -a.val, digits: self.inv_digits(&a.digits) }
    }

    pub fn pow(&self, a: &UnitElem, n: i64) -> UnitElem {
        UnitElem { val: a.val * n, digits: self.pow_digits(&a.digits, n) }
    }

    pub fn to_group(&self, e: &UnitElem) -> Result<GroupElem> {
        let c = self.dlog.get(&e.digits).ok_or_else(|| Error::InvalidParameter(format!("{e} is not a unit class at this level")))?;
        let mut pres = vec![BigInt::from(e.val)];
        pres.extend(c.iter().map(|&x| BigInt::from(x)));
        Ok(self.group.from_presentation(&pres))
    }

    pub fn from_group(&self, g: &[BigInt]) -> UnitElem {
        let pres = self.group.to_presentation(g);
        let val = pres[0].to_i64().expect("valuation fits in i64");
        let mut digits = self.one_digits();
        for (i, c) in pres[1..].iter().enumerate() {
            let ord = BigInt::from(self.gen_orders[i]);
            let e = ((c % &ord) + &ord) % &ord;
            let e = e.to_i64().unwrap();
            if e != 0 {
                digits = self.mul_digits(&digits, &self.pow_digits(&self.gens[i], e));
            }
        }
        UnitElem { val, digits }
    }

    /// All unit classes, in class-index order.
    pub fn unit_classes(&self) -> Vec<Digits> {
        let mut v: Vec<Digits> = self.dlog.keys().cloned().collect();
        v.sort_by_key(|d| self.triple.class_index(d));
        v
    }

    /// Elements with valuation in [-window, window].
    pub fn elements(&self, window: i64) -> Vec<UnitElem> {
        let classes = self.unit_classes();
        (-window..=window)
            .flat_map(|v| classes.iter().map(move |d| UnitElem { val: v, digits: d.clone() }))
            .collect()
    }

    /// The hom determined by an element-level function that is known to be multiplicative.
    pub fn hom_to<F>(&self, target: &UnitQuotient, f: F) -> Result<GroupHom>
    where
        F: Fn(&UnitElem) -> Result<UnitElem>,
    {
        GroupHom::from_fn(self.group.clone(), target.group.clone(), |g| target.to_group(&f(&self.from_group(g))?))
    }

    /// sigma(pi^v u) = pi^v (sigma(pi)/pi)^v sigma(u), for an automorphism of the tower.
    pub fn apply_automorphism(&self, s: &TowerMap, e: &UnitElem) -> Result<UnitElem> {
        let t = self.tower();
        t.check_same(s.source())?;
        t.check_same(s.target())?;
        if self.level() >= t.precision() {
            return Err(Error::PrecisionExceeded { requested: self.level() + 1, available: t.precision() });
        }
        let su = self.digits_of(&s.apply_raw(&self.raw(&e.digits)));
        let ratio = self.digits_of(&t.div_pi_raw(&s.apply_raw(&t.uniformizer().coeffs)));
        Ok(UnitElem { val: e.val, digits: self.mul_digits(&su, &self.pow_digits(&ratio, e.val)) })
    }

    pub fn automorphism_hom(&self, s: &TowerMap) -> Result<GroupHom> {
        self.hom_to(self, |e| self.apply_automorphism(s, e))
    }

    pub fn format(&self, e: &UnitElem) -> String {
        format!("{}:{e}", self.tower().name)
    }
}

/// The Deligne isomorphism of unit quotients attached to a close-pair certificate.
#[derive(Clone, Debug)]
pub struct DeligneIso {
    pub cert: ClosePairCertificate,
    pub level: usize,
    pub hom: GroupHom,
    /// pi/varpi on the left, varpi'/pi' on the right (as classes), when not trivial
    left_ratio: Option<Digits>,
    right_ratio_inv: Option<Digits>,
}

impl DeligneIso {
    pub fn new(cert: &ClosePairCertificate, left: &UnitQuotient, right: &UnitQuotient) -> Result<Self> {
        let n = left.level();
        if right.level() != n || n > cert.level {
            return Err(Error::LevelMismatch(format!(
                "unit quotients at levels {} and {} for a certificate of level {}",
                n,
                right.level(),
                cert.level
            )));
        }
        left.tower().check_same(&cert.left)?;
        right.tower().check_same(&cert.right)?;
        let left_ratio = cert.left_ratio().map(|r| left.digits_of(r));
        let right_ratio_inv = cert.right_ratio().map(|r| right.inv_digits(&right.digits_of(r)));
        let mut iso = DeligneIso { cert: cert.clone(), level: n, hom: GroupHom::identity(left.group.clone()), left_ratio, right_ratio_inv };
        iso.hom = left.hom_to(right, |e| Ok(iso.map(left, right, e)))?;
        Ok(iso)
    }

    pub fn map(&self, left: &UnitQuotient, right: &UnitQuotient, e: &UnitElem) -> UnitElem {
        let mut w = e.digits.clone();
        if let Some(r) = &self.left_ratio {
            w = left.mul_digits(&w, &left.pow_digits(r, e.val));
        }
        let mut w2 = right.digits_of(&self.cert.map_raw(&left.raw(&w), self.level));
        if let Some(r) = &self.right_ratio_inv {
            w2 = right.mul_digits(&w2, &right.pow_digits(r, e.val));
        }
        UnitElem { val: e.val, digits: w2 }
    }
}

/// The map F^x/(1 + p_F^l) -> L^x/(1 + p_L^{l'}) induced by an inclusion F in L.
pub fn unit_inclusion(lower: &UnitQuotient, upper: &UnitQuotient) -> Result<GroupHom> {
    let (f, l) = (lower.tower(), upper.tower());
    let k = l.level_of(f).ok_or_else(|| Error::LevelCondition(format!("{} is not a subfield of {}", f.name, l.name)))?;
    let e = l.e() / f.e();
    if upper.level() > e * lower.level() {
        return Err(Error::LevelCondition(format!(
            "level {} exceeds e * {} = {}",
            upper.level(),
            lower.level(),
            e * lower.level()
        )));
    }
    if l.precision() < e + upper.level() {
        return Err(Error::PrecisionExceeded { requested: e + upper.level(), available: l.precision() });
    }
    let pi_f = l.embed_from(k, &f.uniformizer().coeffs);
    let mut w = pi_f;
    for _ in 0..e {
        w = l.div_pi_raw(&w);
    }
    let w = upper.digits_of(&w);
    lower.hom_to(upper, |x| {
        let u = upper.digits_of(&l.embed_from(k, &lower.raw(&x.digits)));
        Ok(UnitElem { val: x.val * e as i64, digits: upper.mul_digits(&u, &upper.pow_digits(&w, x.val)) })
    })
}

/// Reduction from level l to a level s <= l of the same tower.
pub fn level_reduction(from: &UnitQuotient, to: &UnitQuotient) -> Result<GroupHom> {
    from.tower().check_same(to.tower())?;
    if to.level() > from.level() {
        return Err(Error::LevelCondition(format!("cannot reduce level {} to {}", from.level(), to.level())));
    }
    let s = to.level();
    from.hom_to(to, |x| Ok(UnitElem { val: x.val, digits: x.digits[..s].to_vec() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::BaseField;
    use crate::ramification::{certify_close, transfer_extension};

    fn q3pi() -> Arc<Tower> {
        let q3 = Tower::new("Q3", BaseField::mixed(3, 4).unwrap()).unwrap();
        q3.extend_eisenstein("Q3pi", "pi", &[q3.from_int(-3), q3.zero()]).unwrap()
    }

    fn f3t() -> Arc<Tower> {
        Tower::new("F3t", BaseField::equal(3, 8).unwrap()).unwrap()
    }

    #[test]
    fn structures() {
        let u = UnitQuotient::new(&f3t(), 2).unwrap();
        assert_eq!(u.group().to_string(), "Z/6 x Z");
        assert_eq!(u.unit_order(), 6);
        let q2 = Tower::new("Q2", BaseField::mixed(2, 8).unwrap()).unwrap();
        let u = UnitQuotient::new(&q2, 3).unwrap();
        assert_eq!(u.group().to_string(), "Z/2 x Z/2 x Z");
        let f9 = Tower::new("F9t", BaseField::new(crate::arith::Characteristic::Equal, 3, 2, 4).unwrap()).unwrap();
        let u = UnitQuotient::new(&f9, 1).unwrap();
        assert_eq!(u.group().to_string(), "Z/8 x Z");
    }

    #[test]
    fn group_roundtrip_and_multiplication() {
        let u = UnitQuotient::new(&q3pi(), 3).unwrap();
        let g = u.group().clone();
        let elems = u.elements(1);
        for a in &elems {
            let ga = u.to_group(a).unwrap();
            assert_eq!(&u.from_group(&ga), a);
            for b in elems.iter().step_by(7) {
                let prod = u.to_group(&u.mul(a, b)).unwrap();
                assert_eq!(prod, g.add(&ga, &u.to_group(b).unwrap()));
            }
        }
    }

    #[test]
    fn projection() {
        let t = q3pi();
        let u = UnitQuotient::new(&t, 2).unwrap();
        let pi = t.uniformizer();
        let x = pi.pow(2).mul(&t.one().add(&pi).unwrap()).unwrap();
        let u1 = UnitQuotient::new(&t, 1).unwrap();
        assert_eq!(u1.project(&x).unwrap(), UnitElem { val: 2, digits: vec![1] });
        assert_eq!(u.project(&t.from_int(2)).unwrap(), UnitElem { val: 0, digits: vec![2, 0] });
        assert_eq!(u.project(&t.zero()), Err(Error::ZeroElement));
    }

    #[test]
    fn deligne_iso_across_characteristics() {
        let (a, b) = (q3pi(), f3t());
        let c = certify_close(&a, &b, 2).unwrap();
        let (ua, ub) = (UnitQuotient::new(&a, 2).unwrap(), UnitQuotient::new(&b, 2).unwrap());
        let d = DeligneIso::new(&c, &ua, &ub).unwrap();
        assert!(d.hom.is_isomorphism());
        let x = UnitElem { val: 1, digits: vec![1, 1] };
        assert_eq!(d.map(&ua, &ub, &x), x);
        for x in ua.elements(2) {
            for y in ua.elements(0) {
                assert_eq!(d.map(&ua, &ub, &ua.mul(&x, &y)), ub.mul(&d.map(&ua, &ub, &x), &d.map(&ua, &ub, &y)));
            }
        }
    }

    #[test]
    fn inclusion_square_commutes() {
        let (a, b) = (q3pi(), f3t());
        let c = certify_close(&a, &b, 2).unwrap();
        let e = a.extend_eisenstein("E", "rho", &[a.uniformizer().neg(), a.zero()]).unwrap();
        let t = transfer_extension(&c, &e, "E'").unwrap();
        let (la, lb) = (UnitQuotient::new(&a, 2).unwrap(), UnitQuotient::new(&b, 2).unwrap());
        let (ua, ub) = (UnitQuotient::new(&t.left, 4).unwrap(), UnitQuotient::new(&t.right, 4).unwrap());
        let low = DeligneIso::new(&c, &la, &lb).unwrap();
        let high = DeligneIso::new(&t.cert, &ua, &ub).unwrap();
        let ia = unit_inclusion(&la, &ua).unwrap();
        let ib = unit_inclusion(&lb, &ub).unwrap();
        assert!(high.hom.compose(&ia).unwrap().same_map(&ib.compose(&low.hom).unwrap()));
        assert_eq!(ia.apply(&la.to_group(&la.uniformizer()).unwrap()), ua.to_group(&ua.pow(&ua.uniformizer(), 2)).unwrap());
        assert!(unit_inclusion(&la, &UnitQuotient::new(&t.left, 5).unwrap()).is_err());
    }

    #[test]
    fn reduction_is_surjective() {
        let t = f3t();
        let (u3, u1) = (UnitQuotient::new(&t, 3).unwrap(), UnitQuotient::new(&t, 1).unwrap());
        let r = level_reduction(&u3, &u1).unwrap();
        assert!(r.is_surjective());
        assert_eq!(r.kernel().source.to_string(), "Z/3 x Z/3");
    }
}
