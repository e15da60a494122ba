use super::base::PrimeRing;

/// Iterated monic extensions of a prime ring. A level-k element is a flat vector of
/// `dims[k] * stride` base digits; coefficient i of the top generator occupies block i.
/// Level j < k elements embed into level k by zero padding.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct RingCore {
    pub base: PrimeRing,
    pub degrees: Vec<usize>,
    /// polys[k][i]: coefficient of x^i (level-k element) in the monic relation of generator k.
    pub polys: Vec<Vec<Vec<u64>>>,
    pub dims: Vec<usize>,
}

impl RingCore {
    pub fn new(base: PrimeRing) -> Self {
        RingCore { base, degrees: vec![], polys: vec![], dims: vec![1] }
    }

    pub fn push(&mut self, poly: Vec<Vec<u64>>) {
        let d = poly.len();
        let last = *self.dims.last().unwrap();
        self.degrees.push(d);
        self.polys.push(poly);
        self.dims.push(last * d);
    }

    pub fn levels(&self) -> usize {
        self.degrees.len()
    }

    pub fn len(&self, k: usize) -> usize {
        self.dims[k] * self.base.stride()
    }

    pub fn top_len(&self) -> usize {
        self.len(self.levels())
    }

    pub fn zero(&self, k: usize) -> Vec<u64> {
        vec![0; self.len(k)]
    }

    pub fn one(&self, k: usize) -> Vec<u64> {
        let mut v = self.zero(k);
        v[0] = 1 % self.base.modulus;
        v
    }

    pub fn embed_i64(&self, k: usize, c: i64) -> Vec<u64> {
        let mut v = self.zero(k);
        let b = self.base.embed_i64(c);
        v[..b.len()].copy_from_slice(&b);
        v
    }

    pub fn embed(&self, x: &[u64], k: usize) -> Vec<u64> {
        let mut v = x.to_vec();
        v.resize(self.len(k), 0);
        v
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = a.to_vec();
        self.add_assign(&mut out, b);
        out
    }

    pub fn add_assign(&self, a: &mut [u64], b: &[u64]) {
        let s = self.base.stride();
        for (x, y) in a.chunks_mut(s).zip(b.chunks(s)) {
            self.base.add_assign(x, y);
        }
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = a.to_vec();
        self.sub_assign(&mut out, b);
        out
    }

    pub fn sub_assign(&self, a: &mut [u64], b: &[u64]) {
        let s = self.base.stride();
        for (x, y) in a.chunks_mut(s).zip(b.chunks(s)) {
            self.base.sub_assign(x, y);
        }
    }

    pub fn neg(&self, a: &[u64]) -> Vec<u64> {
        let mut out = a.to_vec();
        let s = self.base.stride();
        for x in out.chunks_mut(s) {
            self.base.neg_assign(x);
        }
        out
    }

    pub fn scale(&self, a: &[u64], c: u64) -> Vec<u64> {
        let mut out = a.to_vec();
        self.base.scale_assign(&mut out, c);
        out
    }

    pub fn is_zero(x: &[u64]) -> bool {
        x.iter().all(|&c| c == 0)
    }

    pub fn mul(&self, k: usize, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = self.zero(k);
        self.mul_into(k, &mut out, a, b, false);
        out
    }

    /// acc += a*b (or acc -= a*b when `subtract`) at level k.
    fn mul_into(&self, k: usize, acc: &mut [u64], a: &[u64], b: &[u64], subtract: bool) {
        if k == 0 {
            if subtract {
                self.base.mul_sub(acc, a, b);
            } else {
                self.base.mul_acc(acc, a, b);
            }
            return;
        }
        let d = self.degrees[k - 1];
        let bl = self.len(k - 1);
        let mut prod = vec![0u64; (2 * d - 1) * bl];
        for i in 0..d {
            let ai = &a[i * bl..(i + 1) * bl];
            if Self::is_zero(ai) {
                continue;
            }
            for j in 0..d {
                let bj = &b[j * bl..(j + 1) * bl];
                if Self::is_zero(bj) {
                    continue;
                }
                self.mul_into(k - 1, &mut prod[(i + j) * bl..(i + j + 1) * bl], ai, bj, false);
            }
        }
        for j in (d..2 * d - 1).rev() {
            let c = prod[j * bl..(j + 1) * bl].to_vec();
            if Self::is_zero(&c) {
                continue;
            }
            for i in 0..d {
                let coeff = &self.polys[k - 1][i];
                if Self::is_zero(coeff) {
                    continue;
                }
                self.mul_into(k - 1, &mut prod[(j - d + i) * bl..(j - d + i + 1) * bl], &c, coeff, true);
            }
        }
        if subtract {
            self.sub_assign(acc, &prod[..d * bl]);
        } else {
            self.add_assign(acc, &prod[..d * bl]);
        }
    }

    pub fn pow(&self, k: usize, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut result = self.one(k);
        let mut base = a.to_vec();
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(k, &result, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(k, &base, &base);
            }
        }
        result
    }

    /// Evaluates a polynomial with level-k coefficients at x (level k).
    pub fn eval(&self, k: usize, coeffs: &[Vec<u64>], x: &[u64]) -> Vec<u64> {
        let mut acc = self.zero(k);
        for c in coeffs.iter().rev() {
            acc = self.mul(k, &acc, x);
            self.add_assign(&mut acc, c);
        }
        acc
    }

    /// The monomial generator of level k+1 (class of x), as a level-(k+1) element.
    pub fn generator(&self, k: usize) -> Vec<u64> {
        let mut v = self.zero(k + 1);
        if self.degrees[k] == 1 {
            // degree-one relation x = -c_0
            let c = self.neg(&self.polys[k][0]);
            v[..c.len()].copy_from_slice(&c);
        } else {
            v[self.len(k)] = 1 % self.base.modulus;
        }
        v
    }
}
