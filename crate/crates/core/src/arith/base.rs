use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Characteristic {
    /// Unramified extension of Q_p, truncated mod p^M.
    Mixed,
    /// Laurent series over F_{p^f}, truncated mod t^M.
    Equal,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BaseField {
    pub kind: Characteristic,
    pub p: u64,
    pub f: usize,
    pub precision: usize,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl BaseField {
    pub fn new(kind: Characteristic, p: u64, f: usize, precision: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NonPrime(p));
        }
        if f == 0 || precision == 0 {
            return Err(Error::InvalidParameter("f and M must be positive".into()));
        }
        if kind == Characteristic::Mixed {
            let bits = 64 - p.leading_zeros() as usize;
            if bits * precision > 62 {
                return Err(Error::InvalidParameter(format!(
                    "p^M = {p}^{precision} does not fit the 62-bit base ring"
                )));
            }
        }
        Ok(BaseField { kind, p, f, precision })
    }

    pub fn mixed(p: u64, precision: usize) -> Result<Self> {
        Self::new(Characteristic::Mixed, p, 1, precision)
    }

    pub fn equal(p: u64, precision: usize) -> Result<Self> {
        Self::new(Characteristic::Equal, p, 1, precision)
    }

    pub(crate) fn prime_ring(&self) -> PrimeRing {
        PrimeRing::new(self.kind, self.p, self.precision)
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = if self.f == 1 { format!("{}", self.p) } else { format!("{}^{}", self.p, self.f) };
        match self.kind {
            Characteristic::Mixed => write!(f, "Q_{q} mod p^{}", self.precision),
            Characteristic::Equal => write!(f, "F_{q}((t)) mod t^{}", self.precision),
        }
    }
}

/// Z/p^N or F_p[t]/t^N. Elements are slices of length `stride()`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct PrimeRing {
    pub kind: Characteristic,
    pub p: u64,
    pub n: usize,
    pub modulus: u64,
}

impl PrimeRing {
    pub fn new(kind: Characteristic, p: u64, n: usize) -> Self {
        let modulus = match kind {
            Characteristic::Mixed => p.pow(n as u32),
            Characteristic::Equal => p,
        };
        PrimeRing { kind, p, n, modulus }
    }

    pub fn stride(&self) -> usize {
        match self.kind {
            Characteristic::Mixed => 1,
            Characteristic::Equal => self.n,
        }
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.stride()]
    }

    pub fn embed_i64(&self, v: i64) -> Vec<u64> {
        let mut out = self.zero();
        out[0] = v.rem_euclid(self.modulus as i64) as u64;
        out
    }

    #[inline]
    fn addm(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.modulus {
            s - self.modulus
        } else {
            s
        }
    }

    #[inline]
    fn subm(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.modulus - b
        }
    }

    #[inline]
    fn mulm(&self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.modulus as u128) as u64
    }

    pub fn add_assign(&self, a: &mut [u64], b: &[u64]) {
        for (x, y) in a.iter_mut().zip(b) {
            *x = self.addm(*x, *y);
        }
    }

    pub fn sub_assign(&self, a: &mut [u64], b: &[u64]) {
        for (x, y) in a.iter_mut().zip(b) {
            *x = self.subm(*x, *y);
        }
    }

    pub fn neg_assign(&self, a: &mut [u64]) {
        for x in a.iter_mut() {
            *x = self.subm(0, *x);
        }
    }

    /// acc += a * b on a single base element.
    pub fn mul_acc(&self, acc: &mut [u64], a: &[u64], b: &[u64]) {
        match self.kind {
            Characteristic::Mixed => acc[0] = self.addm(acc[0], self.mulm(a[0], b[0])),
            Characteristic::Equal => {
                let n = self.n;
                for i in 0..n {
                    if a[i] == 0 {
                        continue;
                    }
                    for j in 0..n - i {
                        if b[j] != 0 {
                            acc[i + j] = self.addm(acc[i + j], self.mulm(a[i], b[j]));
                        }
                    }
                }
            }
        }
    }

    /// acc -= a * b on a single base element.
    pub fn mul_sub(&self, acc: &mut [u64], a: &[u64], b: &[u64]) {
        match self.kind {
            Characteristic::Mixed => acc[0] = self.subm(acc[0], self.mulm(a[0], b[0])),
            Characteristic::Equal => {
                let n = self.n;
                for i in 0..n {
                    if a[i] == 0 {
                        continue;
                    }
                    for j in 0..n - i {
                        if b[j] != 0 {
                            acc[i + j] = self.subm(acc[i + j], self.mulm(a[i], b[j]));
                        }
                    }
                }
            }
        }
    }

    pub fn scale_assign(&self, a: &mut [u64], c: u64) {
        let c = c % self.modulus;
        for x in a.iter_mut() {
            *x = self.mulm(*x, c);
        }
    }

    pub fn valuation(&self, a: &[u64]) -> Option<usize> {
        match self.kind {
            Characteristic::Mixed => {
                let mut x = a[0];
                if x == 0 {
                    return None;
                }
                let mut v = 0;
                while x.is_multiple_of(self.p) {
                    x /= self.p;
                    v += 1;
                }
                Some(v)
            }
            Characteristic::Equal => a.iter().position(|&c| c != 0),
        }
    }

    pub fn residue(&self, a: &[u64]) -> u64 {
        a[0] % self.p
    }

    /// Divides by p (resp. t). The top digit of the quotient is undetermined and set to zero.
    pub fn div_uniformizer(&self, a: &[u64]) -> Vec<u64> {
        match self.kind {
            Characteristic::Mixed => vec![a[0] / self.p],
            Characteristic::Equal => {
                let mut out = a[1..].to_vec();
                out.push(0);
                out
            }
        }
    }

    pub fn uniformizer(&self) -> Vec<u64> {
        let mut out = self.zero();
        match self.kind {
            Characteristic::Mixed => out[0] = self.p % self.modulus,
            Characteristic::Equal => {
                if self.n > 1 {
                    out[1] = 1
                }
            }
        }
        out
    }
}
