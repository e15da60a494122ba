use super::base::{Characteristic, PrimeRing};
use super::ring::RingCore;
use crate::error::{Error, Result};

/// A finite field F_p[u_1,...]/(...) built by successive irreducible extensions.
/// Elements are coordinate vectors over F_p in the monomial basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ResidueField {
    pub(crate) core: RingCore,
}

pub type ResidueElem = Vec<u64>;
/// Polynomial over a residue field, coefficients in increasing degree.
pub type ResiduePoly = Vec<ResidueElem>;

impl ResidueField {
    pub fn prime(p: u64) -> Self {
        ResidueField { core: RingCore::new(PrimeRing::new(Characteristic::Equal, p, 1)) }
    }

    pub fn p(&self) -> u64 {
        self.core.base.p
    }

    pub fn degree(&self) -> usize {
        *self.core.dims.last().unwrap()
    }

    pub fn size(&self) -> u64 {
        self.p().pow(self.degree() as u32)
    }

    fn k(&self) -> usize {
        self.core.levels()
    }

    pub fn zero(&self) -> ResidueElem {
        self.core.zero(self.k())
    }

    pub fn one(&self) -> ResidueElem {
        self.core.one(self.k())
    }

    pub fn from_int(&self, c: i64) -> ResidueElem {
        self.core.embed_i64(self.k(), c)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> ResidueElem {
        self.core.add(a, b)
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> ResidueElem {
        self.core.sub(a, b)
    }

    pub fn neg(&self, a: &[u64]) -> ResidueElem {
        self.core.neg(a)
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> ResidueElem {
        self.core.mul(self.k(), a, b)
    }

    pub fn pow(&self, a: &[u64], e: u64) -> ResidueElem {
        self.core.pow(self.k(), a, e)
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        RingCore::is_zero(a)
    }

    pub fn inv(&self, a: &[u64]) -> Result<ResidueElem> {
        if self.is_zero(a) {
            return Err(Error::NonUnit);
        }
        Ok(self.pow(a, self.size() - 2))
    }

    pub fn index(&self, a: &[u64]) -> u64 {
        a.iter().rev().fold(0, |acc, &c| acc * self.p() + c)
    }

    pub fn from_index(&self, mut idx: u64) -> ResidueElem {
        let mut out = self.zero();
        for c in out.iter_mut() {
            *c = idx % self.p();
            idx /= self.p();
        }
        out
    }

    pub fn elements(&self) -> impl Iterator<Item = ResidueElem> + '_ {
        (0..self.size()).map(move |i| self.from_index(i))
    }

    pub fn embed(&self, a: &[u64], into: &ResidueField) -> ResidueElem {
        self.core.embed(a, into.k())
    }

    /// Extends by a root of `poly` (monic, given without its leading coefficient).
    pub fn extend(&self, poly: &[ResidueElem]) -> Result<ResidueField> {
        if !self.is_irreducible(poly) {
            return Err(Error::Reducible(self.poly_to_string(poly)));
        }
        let mut core = self.core.clone();
        core.push(poly.to_vec());
        Ok(ResidueField { core })
    }

    /// Smallest generator of the multiplicative group in index order.
    pub fn primitive_element(&self) -> ResidueElem {
        let q1 = self.size() - 1;
        let primes = prime_factors(q1);
        for i in 1..self.size() {
            let a = self.from_index(i);
            if primes.iter().all(|&r| self.pow(&a, q1 / r) != self.one()) {
                return a;
            }
        }
        unreachable!("finite field has a primitive element")
    }

    pub fn poly_to_string(&self, poly: &[ResidueElem]) -> String {
        let mut terms = vec![format!("x^{}", poly.len())];
        for (i, c) in poly.iter().enumerate().rev() {
            if !self.is_zero(c) {
                terms.push(format!("[{}]x^{i}", self.index(c)));
            }
        }
        terms.join(" + ")
    }

    // ----- polynomial arithmetic over the field (full coefficient lists, lowest first) -----

    fn trim(&self, a: &mut Vec<ResidueElem>) {
        while a.last().is_some_and(|c| self.is_zero(c)) {
            a.pop();
        }
    }

    fn poly_rem(&self, a: &[ResidueElem], m: &[ResidueElem]) -> Vec<ResidueElem> {
        let mut r = a.to_vec();
        self.trim(&mut r);
        let dm = m.len() - 1;
        let lead_inv = self.inv(&m[dm]).expect("nonzero leading coefficient");
        while r.len() > dm {
            let top = r.len() - 1;
            let c = self.mul(r.last().unwrap(), &lead_inv);
            for i in 0..=dm {
                let t = self.mul(&c, &m[i]);
                r[top - dm + i] = self.sub(&r[top - dm + i], &t);
            }
            self.trim(&mut r);
        }
        r
    }

    fn poly_mulmod(&self, a: &[ResidueElem], b: &[ResidueElem], m: &[ResidueElem]) -> Vec<ResidueElem> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut prod = vec![self.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                prod[i + j] = self.add(&prod[i + j], &self.mul(x, y));
            }
        }
        self.poly_rem(&prod, m)
    }

    fn poly_powmod(&self, a: &[ResidueElem], mut e: u64, m: &[ResidueElem]) -> Vec<ResidueElem> {
        let mut result = vec![self.one()];
        let mut base = self.poly_rem(a, m);
        while e > 0 {
            if e & 1 == 1 {
                result = self.poly_mulmod(&result, &base, m);
            }
            e >>= 1;
            if e > 0 {
                base = self.poly_mulmod(&base, &base, m);
            }
        }
        result
    }

    fn poly_gcd(&self, a: &[ResidueElem], b: &[ResidueElem]) -> Vec<ResidueElem> {
        let mut a = a.to_vec();
        let mut b = b.to_vec();
        self.trim(&mut a);
        self.trim(&mut b);
        while !b.is_empty() {
            let r = self.poly_rem(&a, &b);
            a = b;
            b = r;
        }
        a
    }

    /// Ben-Or irreducibility test for the monic polynomial x^d + poly.
    pub fn is_irreducible(&self, poly: &[ResidueElem]) -> bool {
        let d = poly.len();
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let mut m = poly.to_vec();
        m.push(self.one());
        let x = vec![self.zero(), self.one()];
        let mut xq = x.clone();
        for _ in 1..=d / 2 {
            xq = self.poly_powmod(&xq, self.size(), &m);
            let mut diff = xq.clone();
            diff.resize(2.max(diff.len()), self.zero());
            diff[1] = self.sub(&diff[1], &self.one());
            let g = self.poly_gcd(&m, &diff);
            if g.len() != 1 {
                return false;
            }
        }
        true
    }

    /// The irreducible monic polynomial of degree d with the smallest coefficient index,
    /// reading coefficient i as digit i of the index in base q.
    pub fn default_irreducible(&self, d: usize) -> ResiduePoly {
        let q = self.size();
        let mut n: u64 = 0;
        loop {
            let mut idx = n;
            let poly: Vec<_> = (0..d)
                .map(|_| {
                    let c = self.from_index(idx % q);
                    idx /= q;
                    c
                })
                .collect();
            if self.is_irreducible(&poly) {
                return poly;
            }
            n += 1;
        }
    }

    /// Roots in this field of the monic polynomial x^d + poly.
    pub fn roots(&self, poly: &[ResidueElem]) -> Vec<ResidueElem> {
        self.elements()
            .filter(|x| {
                let mut acc = self.one();
                for c in poly.iter().rev() {
                    acc = self.add(&self.mul(&acc, x), c);
                }
                self.is_zero(&acc)
            })
            .collect()
    }
}

pub(crate) fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = vec![];
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(k: &ResidueField, v: &[i64]) -> ResiduePoly {
        v.iter().map(|&x| k.from_int(x)).collect()
    }

    #[test]
    fn irreducibility_matches_root_search_over_f2() {
        let f2 = ResidueField::prime(2);
        // x^2 + x + 1 irreducible, x^2 + 1 = (x+1)^2 not
        assert!(f2.is_irreducible(&c(&f2, &[1, 1])));
        assert!(!f2.is_irreducible(&c(&f2, &[1, 0])));
        assert!(f2.extend(&c(&f2, &[1, 0])).is_err());
        for n in 0..4 {
            let poly = c(&f2, &[n & 1, n >> 1]);
            assert_eq!(f2.is_irreducible(&poly), f2.roots(&poly).is_empty());
        }
    }

    #[test]
    fn quartic_over_f2_without_roots_can_be_reducible() {
        let f2 = ResidueField::prime(2);
        // (x^2+x+1)^2 = x^4 + x^2 + 1 has no roots yet is reducible
        let poly = c(&f2, &[1, 0, 1, 0]);
        assert!(f2.roots(&poly).is_empty());
        assert!(!f2.is_irreducible(&poly));
    }

    #[test]
    fn default_table_and_field_size() {
        let f3 = ResidueField::prime(3);
        let poly = f3.default_irreducible(2);
        assert_eq!(poly, c(&f3, &[1, 0]));
        let f9 = f3.extend(&poly).unwrap();
        assert_eq!(f9.size(), 9);
        let g = f9.primitive_element();
        let mut seen = std::collections::HashSet::new();
        let mut x = f9.one();
        for _ in 0..8 {
            seen.insert(f9.index(&x));
            x = f9.mul(&x, &g);
        }
        assert_eq!(seen.len(), 8);
        for a in f9.elements().skip(1) {
            assert_eq!(f9.mul(&a, &f9.inv(&a).unwrap()), f9.one());
        }
    }
}
