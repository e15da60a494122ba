use std::fmt;

use num_traits::{One, Zero};

use super::pwl::{q, PiecewiseLinear, Q};
use crate::error::{Error, Result};

/// Ramification data of a finite extension: lower breaks, Herbrand functions and the different.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HerbrandData {
    /// (lower break, number of group elements whose break it is)
    pub breaks: Vec<(Q, Q)>,
    pub e: usize,
    pub phi: PiecewiseLinear,
    pub psi: PiecewiseLinear,
    /// Valuation of the different, in the normalized valuation of the top field.
    pub different_val: usize,
}

impl HerbrandData {
    fn from_phi(phi: PiecewiseLinear, e: usize, different_val: usize) -> Self {
        let eq = q(e as i64);
        let mut breaks = vec![];
        for b in phi.kinks() {
            let before = if b.is_zero() { Q::one() } else { slope_before(&phi, b) };
            breaks.push((b, eq * (before - phi.slope_after(b))));
        }
        let psi = phi.inverse();
        HerbrandData { breaks, e, phi, psi, different_val }
    }

    pub fn identity() -> Self {
        Self::from_phi(PiecewiseLinear::identity(), 1, 0)
    }

    /// Tamely ramified of degree e: phi(r) = r/e, different e - 1.
    pub fn tame(e: usize) -> Self {
        Self::from_phi(PiecewiseLinear::linear(Q::new(1, e as i64)), e, e - 1)
    }

    /// From the indices i(s) = val(s(x) - x) of the nontrivial elements of a Galois group
    /// (0 for elements outside inertia).
    pub fn from_indices(indices: &[usize]) -> Self {
        let e = 1 + indices.iter().filter(|&&i| i >= 1).count();
        let mut lower: Vec<usize> = indices.iter().filter(|&&i| i >= 1).map(|&i| i - 1).collect();
        lower.sort_unstable();
        lower.dedup();
        let eq = q(e as i64);
        // slope on (prev, b] is g_b / g_0 with g_b = #{s in inertia : i(s) - 1 >= b}
        let mut xs = vec![];
        let mut slopes = vec![];
        for &b in &lower {
            if b == 0 {
                continue;
            }
            let g = 1 + indices.iter().filter(|&&i| i >= 1 && i > b).count();
            xs.push(q(b as i64));
            slopes.push(q(g as i64) / eq);
        }
        let phi = PiecewiseLinear::from_slopes(&xs, &slopes, Q::one() / eq);
        Self::from_phi(phi, e, indices.iter().sum())
    }

    /// Data of the composite E2/F from outer = E1/F and inner = E2/E1.
    pub fn compose(outer: &HerbrandData, inner: &HerbrandData) -> Self {
        let phi = outer.phi.compose(&inner.phi);
        let different = inner.different_val + inner.e * outer.different_val;
        Self::from_phi(phi, outer.e * inner.e, different)
    }

    pub fn upper_breaks(&self) -> Vec<Q> {
        self.breaks.iter().map(|(b, _)| self.phi.eval(*b)).collect()
    }

    pub fn largest_upper_break(&self) -> Option<Q> {
        self.upper_breaks().into_iter().max()
    }

    pub fn is_tame(&self) -> bool {
        self.breaks.iter().all(|(b, _)| b.is_zero())
    }

    /// Largest upper break strictly below l.
    pub fn at_most_ramified(&self, l: usize) -> bool {
        self.largest_upper_break().is_none_or(|u| u < q(l as i64))
    }

    /// l(1) = psi(l), with l <= l(1) <= l e asserted.
    pub fn l_one(&self, l: usize) -> Result<usize> {
        if !self.at_most_ramified(l) {
            return Err(Error::NotAtMostRamified(l, format!("{}", self.largest_upper_break().unwrap_or_default())));
        }
        let v = self.psi.eval(q(l as i64));
        if !v.is_integer() {
            return Err(Error::Undetermined(format!("psi({l}) = {v} is not an integer")));
        }
        let v = v.to_integer() as usize;
        assert!(l <= v && v <= l * self.e, "l <= l(1) <= le violated: l = {l}, l(1) = {v}, e = {}", self.e);
        Ok(v)
    }

    /// r << l: at most l-ramified and r <= psi(l)/e.
    pub fn lleq(&self, r: Q, l: usize) -> bool {
        self.at_most_ramified(l) && r <= self.psi.eval(q(l as i64)) / q(self.e as i64)
    }
}

fn slope_before(phi: &PiecewiseLinear, x: Q) -> Q {
    let pts = phi.breakpoints();
    for w in pts.windows(2) {
        if x > w[0].0 && x <= w[1].0 {
            return (w[1].1 - w[0].1) / (w[1].0 - w[0].0);
        }
    }
    phi.tail_slope()
}

impl fmt::Display for HerbrandData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let br: Vec<String> = self.breaks.iter().map(|(b, j)| format!("{b}:{j}")).collect();
        write!(f, "e={} breaks=[{}] different={} phi={}", self.e, br.join(","), self.different_val, self.phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ramification::pwl::qf;

    #[test]
    fn tame_cubic() {
        let h = HerbrandData::tame(3);
        assert_eq!(h.phi.eval(q(6)), q(2));
        assert_eq!(h.l_one(2).unwrap(), 6);
        assert!(h.is_tame());
        assert_eq!(h.breaks, vec![(q(0), q(2))]);
        assert_eq!(HerbrandData::from_indices(&[1, 1]), h);
    }

    #[test]
    fn wild_quadratic_from_index() {
        let h = HerbrandData::from_indices(&[3]);
        assert_eq!(h.breaks, vec![(q(2), q(1))]);
        assert_eq!(h.psi.eval(q(3)), q(4));
        assert_eq!(h.l_one(3).unwrap(), 4);
        assert!(h.l_one(2).is_err());
        assert!(!h.lleq(q(3), 3));
        assert!(h.lleq(q(2), 3));
        assert_eq!(h.different_val, 3);
    }

    #[test]
    fn lleq_tame() {
        let h = HerbrandData::tame(2);
        assert!(h.lleq(q(4), 4));
        assert!(!h.lleq(qf(9, 2), 4));
        assert!(h.lleq(q(0), 1));
    }

    #[test]
    fn composition_with_identity() {
        let w = HerbrandData::from_indices(&[3]);
        assert_eq!(HerbrandData::compose(&HerbrandData::identity(), &w), w);
        let t = HerbrandData::compose(&HerbrandData::tame(2), &HerbrandData::tame(3));
        assert_eq!(t.phi, PiecewiseLinear::linear(qf(1, 6)));
        assert_eq!(t.different_val, 5);
    }

    #[test]
    fn unramified_group_is_identity() {
        assert_eq!(HerbrandData::from_indices(&[0]), HerbrandData::identity());
    }
}
