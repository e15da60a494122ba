//! Fields, extensions and close pairs used by the bundled scenarios and the acceptance suite.

use std::sync::Arc;

use crate::arith::{BaseField, Tower};
use crate::error::Result;
use crate::ramification::{certify_close, ClosePairCertificate};

/// F_p((t)) with `precision` t-adic digits.
pub fn laurent(p: u64, precision: usize) -> Result<Arc<Tower>> {
    Tower::new(&format!("F{p}t"), BaseField::equal(p, precision)?)
}

pub fn padic(p: u64, precision: usize) -> Result<Arc<Tower>> {
    Tower::new(&format!("Q{p}"), BaseField::mixed(p, precision)?)
}

/// x^e - c * (uniformizer of `base`), c a small integer.
pub fn eisenstein(base: &Arc<Tower>, name: &str, generator: &str, e: usize, c: i64) -> Result<Arc<Tower>> {
    let mut coeffs = vec![base.uniformizer().mul(&base.from_int(-c))?];
    coeffs.extend((1..e).map(|_| base.zero()));
    base.extend_eisenstein(name, generator, &coeffs)
}

/// Q_p(p^{1/e}) with `digits` p-adic digits of precision (so e * digits in the new uniformizer).
pub fn padic_root(p: u64, e: usize, digits: usize) -> Result<Arc<Tower>> {
    let qp = padic(p, digits)?;
    if e == 1 {
        return Ok(qp);
    }
    eisenstein(&qp, &format!("Q{p}({p}^1/{e})"), "pi", e, 1)
}

/// Q_3(3^{1/4}) and F_3((t)), 4-close.
pub fn quartic_pair() -> Result<ClosePairCertificate> {
    let f = padic_root(3, 4, 3)?;
    let g = laurent(3, 12)?;
    certify_close(&f, &g, 4)
}

/// Q_3(sqrt 3) and F_3((t)), 2-close.
pub fn quadratic_pair() -> Result<ClosePairCertificate> {
    let f = padic_root(3, 2, 3)?;
    let g = laurent(3, 6)?;
    certify_close(&f, &g, 2)
}

/// The identity certificate of F_3((t)) at level l.
pub fn self_pair(l: usize) -> Result<ClosePairCertificate> {
    let f = laurent(3, 12)?;
    certify_close(&f, &f, l)
}

/// F(sqrt(uniformizer)).
pub fn tame_quadratic(f: &Arc<Tower>) -> Result<Arc<Tower>> {
    eisenstein(f, &format!("{}(s)", f.name), "s", 2, 1)
}

pub fn unramified(f: &Arc<Tower>, degree: usize) -> Result<Arc<Tower>> {
    f.extend_unramified(&format!("{}(w{degree})", f.name), "w", degree)
}

/// Q_2(sqrt 2) / Q_2, the wild quadratic fixture.
pub fn wild_quadratic() -> Result<(Arc<Tower>, Arc<Tower>)> {
    let q2 = padic(2, 8)?;
    let e = eisenstein(&q2, "Q2(sqrt2)", "pi", 2, 1)?;
    Ok((q2, e))
}
