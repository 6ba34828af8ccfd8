//! Monomial moments: normalized sphere moments, orbit averages of monomials
//! and Dirichlet(1/2, ..., 1/2) moments on the simplex.
//!
//! Everything is expressed through squared coordinates. For an even exponent
//! `lambda = 2 mu` with `k` nonzero parts, the `B_n` average of `x^lambda` over
//! `v_{a,s}` counts injective placements of the support into the head, tail
//! and zero coordinates:
//!
//! `[(s)_k + (s)_{k-1} sum_j A^{mu_j}] / [(n)_k (A+s)^{|mu|}]`
//!
//! which is also correct at `A = 1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::orbits::{GcvOrbit, DEFAULT_CAP};
use crate::qpoly::QPoly;
use crate::scalars::{ExactScalar, ScalarError};

/// Falling factorial `(x)_k = x (x-1) ... (x-k+1)`.
pub fn falling(x: i64, k: usize) -> BigInt {
    (0..k as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(x - i))
}

/// `(2m-1)!!`, with `(-1)!! = 1`.
pub fn odd_double_factorial(m: u32) -> BigInt {
    (1..=m as i64).fold(BigInt::one(), |acc, i| acc * BigInt::from(2 * i - 1))
}

/// Halves an exponent vector, or `None` if some entry is odd.
pub fn halve(lambda: &[u32]) -> Option<Vec<u32>> {
    lambda.iter().map(|&l| (l % 2 == 0).then_some(l / 2)).collect()
}

/// `prod (2 mu_i - 1)!! / prod_{j < |mu|} (n + 2j)`: the Dirichlet(1/2)
/// moment, shared by the sphere (with `mu = lambda/2`) and the simplex.
fn half_dirichlet(n: usize, mu: &[u32]) -> BigRational {
    let m: u32 = mu.iter().sum();
    let num = mu.iter().fold(BigInt::one(), |acc, &x| acc * odd_double_factorial(x));
    let den = (0..m as i64).fold(BigInt::one(), |acc, j| acc * BigInt::from(n as i64 + 2 * j));
    BigRational::new(num, den)
}

/// `(1/|S^{n-1}|) int y^lambda d rho`; zero unless every entry is even.
pub fn sphere_moment(n: usize, lambda: &[u32]) -> ExactScalar {
    match halve(lambda) {
        Some(mu) => ExactScalar::Rational(half_dirichlet(n, &mu)),
        None => ExactScalar::zero(),
    }
}

/// Normalized moment of `y^alpha` on `T^{n-1}` under the weight
/// `1/sqrt((1-|y|_1) y_1 ... y_{n-1})`.
pub fn simplex_moment(n: usize, alpha: &[u32]) -> ExactScalar {
    ExactScalar::Rational(half_dirichlet(n, alpha))
}

/// Orbit average of `x^{2 mu}` as `num(A) / (A+s)^power` with `num` a
/// polynomial in `A` over `Q` (the `(n)_k` denominator already folded in).
#[derive(Debug, Clone, PartialEq)]
pub struct MomentPoly {
    pub num: QPoly,
    pub power: u32,
    pub s: usize,
}

impl MomentPoly {
    /// Builds the moment polynomial for half-exponents `mu` (zeros ignored).
    pub fn new(n: usize, s: usize, mu: &[u32]) -> Self {
        let parts: Vec<u32> = mu.iter().copied().filter(|&x| x > 0).collect();
        let k = parts.len();
        let power: u32 = parts.iter().sum();
        let den = falling(n as i64, k);
        if den.is_zero() {
            return MomentPoly { num: QPoly::zero(), power, s };
        }
        let mut num = QPoly::constant(BigRational::from_integer(falling(s as i64, k)));
        if k > 0 {
            let c = BigRational::from_integer(falling(s as i64, k - 1));
            for &p in &parts {
                num = num.add(&QPoly::monomial(c.clone(), p as usize));
            }
        }
        let num = num.scale(&BigRational::new(BigInt::one(), den));
        MomentPoly { num, power, s }
    }

    pub fn eval(&self, a2: &ExactScalar) -> Result<ExactScalar, ScalarError> {
        let base = a2.try_add(&ExactScalar::int(self.s as i64))?;
        self.num.eval(a2)?.try_div(&base.pow_int(self.power as i64)?)
    }

    pub fn eval_f64(&self, a2: f64) -> f64 {
        self.num.eval_f64(a2) / (a2 + self.s as f64).powi(self.power as i32)
    }

    /// Derivative in `A` (closed form, quotient rule).
    pub fn deriv_f64(&self, a2: f64) -> f64 {
        let base = a2 + self.s as f64;
        let d = self.num.derivative().eval_f64(a2) / base.powi(self.power as i32);
        d - self.power as f64 * self.num.eval_f64(a2) / base.powi(self.power as i32 + 1)
    }
}

/// Orbit average of `x^lambda`, computed combinatorially (never enumerates).
pub fn orbit_moment(o: &GcvOrbit, lambda: &[u32]) -> Result<ExactScalar, ScalarError> {
    match halve(lambda) {
        Some(mu) => MomentPoly::new(o.n(), o.s(), &mu).eval(o.a2()),
        None => Ok(ExactScalar::zero()),
    }
}

/// Orbit average of `x^lambda` by summing over the enumerated orbit; the
/// test oracle for [`orbit_moment`].
///
/// Points are grouped by their magnitude pattern; within a group the
/// monomial is `(signed count) * prod |x_i|^{lambda_i}`. Every group of a
/// `B_n` orbit has signed count zero for odd `lambda`, which is checked
/// rather than assumed (a nonzero count would need square roots).
pub fn orbit_moment_enumerated(o: &GcvOrbit, lambda: &[u32]) -> Result<ExactScalar, ScalarError> {
    use crate::orbits::Slot;
    use std::collections::BTreeMap;
    let pts = o
        .enumerate(DEFAULT_CAP)
        .map_err(|e| ScalarError::Parse(e.to_string()))?;
    let mut groups: BTreeMap<Vec<Slot>, i64> = BTreeMap::new();
    for p in &pts {
        let sign: i64 = lambda
            .iter()
            .zip(&p.signs)
            .map(|(&l, &sg)| if l % 2 == 1 { sg as i64 } else { 1 })
            .product();
        *groups.entry(p.slots.clone()).or_default() += sign;
    }
    let odd = lambda.iter().any(|l| l % 2 == 1);
    let mut total = ExactScalar::zero();
    for (slots, count) in groups {
        if count == 0 {
            continue;
        }
        if odd {
            return Err(ScalarError::Parse("odd monomial with nonzero signed count".into()));
        }
        let mut term = ExactScalar::int(count);
        for (&l, &slot) in lambda.iter().zip(&slots) {
            if l > 0 {
                term = term.try_mul(&o.slot_square(slot)?.pow_int((l / 2) as i64)?)?;
            }
        }
        total = total.try_add(&term)?;
    }
    total.try_div(&ExactScalar::int(pts.len() as i64))
}

/// Partitions of `total` into at most `max_parts` positive parts,
/// nonincreasing, in reverse lexicographic order.
pub fn partitions(total: u32, max_parts: usize) -> Vec<Vec<u32>> {
    fn rec(rem: u32, max: u32, slots: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rem == 0 {
            out.push(cur.clone());
            return;
        }
        if slots == 0 {
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            rec(rem - p, p, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(total, total, max_parts, &mut Vec::new(), &mut out);
    out
}

/// All exponent vectors of length `n` with entries summing to `total`.
pub fn compositions(total: u32, n: usize) -> Vec<Vec<u32>> {
    fn rec(rem: u32, idx: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if idx + 1 == cur.len() {
            cur[idx] = rem;
            out.push(cur.clone());
            return;
        }
        for v in (0..=rem).rev() {
            cur[idx] = v;
            rec(rem - v, idx + 1, cur, out);
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if total == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(total, 0, &mut vec![0; n], &mut out);
    out
}

/// Pads a partition of half-exponents to a length-`n` exponent vector `2 mu`.
pub fn exponent_of(mu: &[u32], n: usize) -> Vec<u32> {
    let mut v: Vec<u32> = mu.iter().map(|&m| 2 * m).collect();
    v.resize(n, 0);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn orbit(n: usize, a2: &str, s: usize) -> GcvOrbit {
        GcvOrbit::new(n, a2.parse().unwrap(), s).unwrap()
    }

    #[test]
    fn sphere_moment_values() {
        assert_eq!(sphere_moment(3, &[2, 0, 0]), ExactScalar::ratio(1, 3));
        assert_eq!(sphere_moment(3, &[4, 0, 0]), ExactScalar::ratio(1, 5));
        assert_eq!(sphere_moment(4, &[10, 0, 0, 0]), ExactScalar::ratio(21, 512));
        assert_eq!(sphere_moment(4, &[3, 1, 0, 0]), ExactScalar::zero());
        assert_eq!(sphere_moment(5, &[]), ExactScalar::one());
    }

    #[test]
    fn sphere_moment_matches_gamma_formula() {
        // Gamma(n/2) / (2^|l| Gamma((|l|+n)/2)) * prod Gamma((l_i+1)/2)/Gamma(1/2), in f64
        fn lgamma(x: f64) -> f64 {
            // Lanczos approximation, adequate for a cross-check
            let g = 7.0;
            let c = [
                0.999_999_999_999_809_9,
                676.520_368_121_885_1,
                -1_259.139_216_722_402_8,
                771.323_428_777_653_1,
                -176.615_029_162_140_6,
                12.507_343_278_686_905,
                -0.138_571_095_265_720_12,
                9.984_369_578_019_572e-6,
                1.505_632_735_149_311_6e-7,
            ];
            let x = x - 1.0;
            let mut a = c[0];
            let t = x + g + 0.5;
            for (i, ci) in c.iter().enumerate().skip(1) {
                a += ci / (x + i as f64);
            }
            0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
        }
        for (n, lam) in [(4usize, vec![10u32, 0, 0, 0]), (3, vec![4, 2, 0]), (6, vec![2, 2, 2, 4, 0, 0])] {
            let tot: u32 = lam.iter().sum();
            let mut l = lgamma(n as f64 / 2.0) - lgamma((tot as f64 + n as f64) / 2.0);
            for &x in &lam {
                l += lgamma((x as f64 + 1.0) / 2.0) - lgamma(0.5);
            }
            let exact = sphere_moment(n, &lam).to_f64();
            assert!((l.exp() - exact).abs() < 1e-12 * exact, "{n} {lam:?}");
        }
    }

    #[test]
    fn simplex_moment_values() {
        assert_eq!(simplex_moment(3, &[1, 0]), ExactScalar::ratio(1, 3));
        assert_eq!(simplex_moment(3, &[0, 0]), ExactScalar::one());
        assert_eq!(simplex_moment(3, &[1, 1]), ExactScalar::ratio(1, 15));
        assert_eq!(simplex_moment(3, &[2, 0]), ExactScalar::ratio(1, 5));
    }

    #[test]
    fn orbit_moment_values() {
        assert_eq!(orbit_moment(&orbit(4, "1", 0), &[2, 0, 0, 0]).unwrap(), ExactScalar::ratio(1, 4));
        // (16 + 1 + 1) / (4 * 36): each coordinate sees the head once and the
        // tails twice among the four slots
        let o = orbit(4, "4", 2);
        assert_eq!(orbit_moment(&o, &[4, 0, 0, 0]).unwrap(), ExactScalar::ratio(1, 8));
        assert_eq!(orbit_moment_enumerated(&o, &[4, 0, 0, 0]).unwrap(), ExactScalar::ratio(1, 8));
        let big = orbit(16, "4", 8);
        let small = orbit(6, "4", 3);
        let mut lam = vec![0u32; 16];
        lam[0] = 2;
        lam[1] = 2;
        let v = orbit_moment(&big, &lam).unwrap();
        // placements: tail-tail 8*7, head-tail 2*8, over 16*15 slots, /12^2
        assert_eq!(v, ExactScalar::ratio(8 * 7 + 2 * 8 * 4, 16 * 15 * 144));
        assert_eq!(
            orbit_moment(&small, &[2, 2, 0, 0, 0, 0]).unwrap(),
            orbit_moment_enumerated(&small, &[2, 2, 0, 0, 0, 0]).unwrap()
        );
    }

    #[test]
    fn second_moments_sum_to_one() {
        for o in [orbit(5, "7/3", 2), orbit(4, "1", 3), orbit(3, "4-sqrt(15)", 2)] {
            let n = o.n();
            let mut total = ExactScalar::zero();
            for i in 0..n {
                let mut lam = vec![0; n];
                lam[i] = 2;
                total = total.try_add(&orbit_moment(&o, &lam).unwrap()).unwrap();
            }
            assert_eq!(total, ExactScalar::one());
        }
    }

    #[test]
    fn partitions_and_compositions() {
        assert_eq!(partitions(4, 4).len(), 5);
        assert_eq!(partitions(4, 2), vec![vec![4], vec![3, 1], vec![2, 2]]);
        assert_eq!(partitions(0, 3), vec![Vec::<u32>::new()]);
        assert_eq!(compositions(2, 3).len(), 6);
        assert_eq!(exponent_of(&[2, 1], 4), vec![4, 2, 0, 0]);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let m = MomentPoly::new(5, 2, &[3, 1, 1]);
        for a in [0.3, 1.7, 4.0] {
            let h = 1e-6;
            let fd = (m.eval_f64(a + h) - m.eval_f64(a - h)) / (2.0 * h);
            assert!((fd - m.deriv_f64(a)).abs() < 1e-7 * (1.0 + fd.abs()));
        }
    }

    proptest! {
        #[test]
        fn sphere_moment_is_permutation_invariant(
            lam in proptest::collection::vec(0u32..4, 4),
            perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle(),
        ) {
            let lam: Vec<u32> = lam.iter().map(|x| 2 * x).collect();
            let permuted: Vec<u32> = perm.iter().map(|&i| lam[i]).collect();
            prop_assert_eq!(sphere_moment(4, &lam), sphere_moment(4, &permuted));
        }
    }
}
