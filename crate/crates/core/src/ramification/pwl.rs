use std::fmt;

use num_rational::Rational64;
use num_traits::{One, Zero};

pub type Q = Rational64;

pub fn q(n: i64) -> Q {
    Q::from_integer(n)
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// Continuous piecewise-linear bijection of [0, inf) with f(0) = 0 and positive slopes.
/// Stored as the breakpoints after 0 and the slope after the last one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiecewiseLinear {
    /// (x_i, f(x_i)) with x strictly increasing, starting at (0, 0).
    points: Vec<(Q, Q)>,
    tail_slope: Q,
}

impl PiecewiseLinear {
    pub fn identity() -> Self {
        Self::linear(Q::one())
    }

    pub fn linear(slope: Q) -> Self {
        PiecewiseLinear { points: vec![(Q::zero(), Q::zero())], tail_slope: slope }
    }

    /// From segment slopes: slopes[i] applies on (breaks[i-1], breaks[i]], then `tail` after.
    pub fn from_slopes(breaks: &[Q], slopes: &[Q], tail: Q) -> Self {
        assert_eq!(breaks.len(), slopes.len());
        let mut points = vec![(Q::zero(), Q::zero())];
        let (mut x, mut y) = (Q::zero(), Q::zero());
        for (b, s) in breaks.iter().zip(slopes) {
            y += (b - x) * s;
            x = *b;
            points.push((x, y));
        }
        PiecewiseLinear { points, tail_slope: tail }.simplified()
    }

    fn simplified(mut self) -> Self {
        self.points.dedup_by(|b, a| b.0 == a.0);
        let mut slopes = self.slopes();
        let mut i = 1;
        while i < self.points.len() {
            let after = if i + 1 < self.points.len() { slopes[i] } else { self.tail_slope };
            if slopes[i - 1] == after {
                self.points.remove(i);
                slopes.remove(i - 1);
            } else {
                i += 1;
            }
        }
        self
    }

    /// Slope on each finite segment (x_{i}, x_{i+1}].
    fn slopes(&self) -> Vec<Q> {
        self.points.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)).collect()
    }

    pub fn breakpoints(&self) -> &[(Q, Q)] {
        &self.points
    }

    pub fn tail_slope(&self) -> Q {
        self.tail_slope
    }

    /// Slope just to the right of x.
    pub fn slope_after(&self, x: Q) -> Q {
        let slopes = self.slopes();
        for (i, w) in self.points.windows(2).enumerate() {
            if x >= w[0].0 && x < w[1].0 {
                return slopes[i];
            }
        }
        self.tail_slope
    }

    /// Points where the slope changes (kinks), including 0 when the initial slope is not 1.
    pub fn kinks(&self) -> Vec<Q> {
        let mut out = vec![];
        if self.slope_after(Q::zero()) != Q::one() {
            out.push(Q::zero());
        }
        out.extend(self.points.iter().skip(1).map(|p| p.0));
        out
    }

    pub fn eval(&self, x: Q) -> Q {
        assert!(x >= Q::zero(), "piecewise-linear functions are defined on [0, inf)");
        let slopes = self.slopes();
        for (i, w) in self.points.windows(2).enumerate() {
            if x <= w[1].0 {
                return w[0].1 + (x - w[0].0) * slopes[i];
            }
        }
        let last = self.points.last().unwrap();
        last.1 + (x - last.0) * self.tail_slope
    }

    pub fn inverse(&self) -> Self {
        PiecewiseLinear {
            points: self.points.iter().map(|&(x, y)| (y, x)).collect(),
            tail_slope: Q::one() / self.tail_slope,
        }
    }

    /// self o inner.
    pub fn compose(&self, inner: &PiecewiseLinear) -> Self {
        let inv = inner.inverse();
        let mut xs: Vec<Q> = inner.points.iter().map(|p| p.0).collect();
        xs.extend(self.points.iter().map(|p| inv.eval(p.0)));
        xs.sort();
        xs.dedup();
        let points = xs.iter().map(|&x| (x, self.eval(inner.eval(x)))).collect();
        PiecewiseLinear { points, tail_slope: self.tail_slope * inner.tail_slope }.simplified()
    }

    pub fn is_concave(&self) -> bool {
        let mut s = self.slopes();
        s.push(self.tail_slope);
        s.windows(2).all(|w| w[0] >= w[1])
    }
}

impl fmt::Display for PiecewiseLinear {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pts: Vec<String> = self.points.iter().map(|(x, y)| format!("({x},{y})")).collect();
        write!(f, "[{}] then slope {}", pts.join(" "), self.tail_slope)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_linear_maps() {
        let a = PiecewiseLinear::linear(qf(1, 2));
        let b = PiecewiseLinear::linear(qf(1, 3));
        assert_eq!(a.compose(&b), PiecewiseLinear::linear(qf(1, 6)));
        assert_eq!(PiecewiseLinear::identity().compose(&a), a);
    }

    #[test]
    fn wild_quadratic_shape() {
        // slope 1 up to 2, then 1/2
        let phi = PiecewiseLinear::from_slopes(&[q(2)], &[q(1)], qf(1, 2));
        assert_eq!(phi.eval(q(4)), q(3));
        let psi = phi.inverse();
        assert_eq!(psi.eval(q(3)), q(4));
        assert!(phi.is_concave());
        assert_eq!(phi.kinks(), vec![q(2)]);
        for k in 0..20 {
            let x = qf(k, 3);
            assert_eq!(phi.eval(psi.eval(x)), x);
            assert_eq!(psi.eval(phi.eval(x)), x);
        }
    }

    #[test]
    fn collinear_points_are_dropped() {
        let f = PiecewiseLinear::from_slopes(&[q(1), q(2)], &[q(1), q(1)], q(1));
        assert_eq!(f, PiecewiseLinear::identity());
    }
}
