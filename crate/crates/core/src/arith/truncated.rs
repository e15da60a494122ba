use std::sync::Arc;

use super::tower::{RingElem, Tower};
use crate::error::{Error, Result};

/// A class of O/p^l written as its digit vector (c_0, ..., c_{l-1}); each digit is the
/// index of a residue-field element, lifted through the polynomial basis.
pub type Digits = Vec<u64>;

/// The truncation O/p^l together with the class of the uniformizer in p/p^{l+1}.
#[derive(Clone, Debug)]
pub struct TruncatedTriple {
    tower: Arc<Tower>,
    level: usize,
}

impl TruncatedTriple {
    pub fn new(tower: &Arc<Tower>, level: usize) -> Result<Self> {
        if level == 0 || level > tower.precision() {
            return Err(Error::PrecisionExceeded { requested: level, available: tower.precision() });
        }
        Ok(TruncatedTriple { tower: tower.clone(), level })
    }

    pub fn tower(&self) -> &Arc<Tower> {
        &self.tower
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// |O/p^l| = q^l.
    pub fn size(&self) -> u128 {
        (self.tower.q() as u128).pow(self.level as u32)
    }

    pub fn truncate(&self, x: &RingElem) -> Result<Digits> {
        self.tower.check_same(&x.tower)?;
        x.digits(self.level)
    }

    pub fn reassemble(&self, d: &[u64]) -> RingElem {
        let pi = self.tower.uniformizer();
        self.tower.elem(self.tower.reassemble_raw(d, &pi.coeffs))
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Result<Digits> {
        self.truncate(&self.reassemble(a).add(&self.reassemble(b))?)
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Result<Digits> {
        self.truncate(&self.reassemble(a).mul(&self.reassemble(b))?)
    }

    /// Digits of the uniformizer class in p/p^{l+1}, read from position 1.
    pub fn module_generator(&self) -> Digits {
        let d = self.tower.uniformizer().digits(self.level + 1).expect("precision");
        d[1..].to_vec()
    }

    pub fn class_index(&self, d: &[u64]) -> u64 {
        let q = self.tower.q();
        d.iter().rev().fold(0, |acc, &c| acc * q + c)
    }

    pub fn from_class_index(&self, mut idx: u64) -> Digits {
        let q = self.tower.q();
        (0..self.level)
            .map(|_| {
                let c = idx % q;
                idx /= q;
                c
            })
            .collect()
    }

    pub fn to_text(&self, d: &[u64]) -> String {
        format!(
            "class tower={} level={} digits=[{}]",
            self.tower.name,
            self.level,
            d.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",")
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::BaseField;

    #[test]
    fn roundtrip_and_module_generator() {
        let f = Tower::new("F3t", BaseField::equal(3, 6).unwrap()).unwrap();
        let tr = TruncatedTriple::new(&f, 3).unwrap();
        for idx in 0..27 {
            let d = tr.from_class_index(idx);
            assert_eq!(tr.truncate(&tr.reassemble(&d)).unwrap(), d);
            assert_eq!(tr.class_index(&d), idx);
        }
        assert_eq!(tr.module_generator(), vec![1, 0, 0]);
        assert!(TruncatedTriple::new(&f, 7).is_err());
    }
}
