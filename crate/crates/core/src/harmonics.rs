//! `B_n`-invariant harmonics of degree 4 to 10, as symmetrized polynomials
//! and through their closed-form values on generalized corner vectors.
//!
//! `sym(x^lambda)` is the stabilizer-normalized symmetrization: every
//! distinct monomial in the permutation orbit of `x^lambda` appears once.

use std::collections::HashMap;
use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orbits::GcvOrbit;
use crate::qpoly::{q, qr, QPoly};
use crate::scalars::{ExactScalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarmonicError {
    #[error("{id} needs n >= {min}, got n = {n}")]
    DimensionTooSmall { id: InvariantId, n: usize, min: usize },
    #[error("point has {got} coordinates, expected {want}")]
    PointDimension { got: usize, want: usize },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InvariantId {
    F4,
    F6,
    F81,
    F82,
    F101,
    F102,
}

impl InvariantId {
    pub const ALL: [InvariantId; 6] = [
        InvariantId::F4,
        InvariantId::F6,
        InvariantId::F81,
        InvariantId::F82,
        InvariantId::F101,
        InvariantId::F102,
    ];

    pub fn min_dimension(self) -> usize {
        match self {
            InvariantId::F82 => 4,
            InvariantId::F102 => 5,
            _ => 3,
        }
    }

    pub fn degree(self) -> u32 {
        match self {
            InvariantId::F4 => 4,
            InvariantId::F6 => 6,
            InvariantId::F81 | InvariantId::F82 => 8,
            InvariantId::F101 | InvariantId::F102 => 10,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            InvariantId::F4 => "f4",
            InvariantId::F6 => "f6",
            InvariantId::F81 => "f8,1",
            InvariantId::F82 => "f8,2",
            InvariantId::F101 => "f10,1",
            InvariantId::F102 => "f10,2",
        }
    }

    fn check(self, n: usize) -> Result<(), HarmonicError> {
        if n < self.min_dimension() {
            return Err(HarmonicError::DimensionTooSmall { id: self, n, min: self.min_dimension() });
        }
        Ok(())
    }
}

impl fmt::Display for InvariantId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A linear combination of `sym(x^lambda)` in `n` variables; patterns are
/// exponent vectors sorted nonincreasing without zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SymPolynomial {
    pub n: usize,
    pub terms: Vec<(Vec<u32>, ExactScalar)>,
}

impl SymPolynomial {
    pub fn degree(&self) -> Option<u32> {
        self.terms.first().map(|(p, _)| p.iter().sum())
    }

    /// Every distinct monomial with its coefficient.
    pub fn expand(&self) -> HashMap<Vec<u32>, ExactScalar> {
        let mut out: HashMap<Vec<u32>, ExactScalar> = HashMap::new();
        for (pat, c) in &self.terms {
            let mut padded = pat.clone();
            padded.resize(self.n, 0);
            for mono in distinct_permutations(&padded) {
                let e = out.entry(mono).or_insert_with(ExactScalar::zero);
                *e = e.try_add(c).expect("rational coefficients");
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// Value at a point given by its squared coordinates (all patterns are
    /// even, so signs never matter).
    pub fn eval_squares(&self, squares: &[ExactScalar]) -> Result<ExactScalar, HarmonicError> {
        if squares.len() != self.n {
            return Err(HarmonicError::PointDimension { got: squares.len(), want: self.n });
        }
        let mut total = ExactScalar::zero();
        for (pat, c) in &self.terms {
            let half: Vec<u32> = pat.iter().map(|&e| e / 2).collect();
            let m = monomial_symmetric(&half, squares)?;
            total = total.try_add(&c.try_mul(&m)?)?;
        }
        Ok(total)
    }
}

/// Distinct permutations of a multiset, lexicographically decreasing.
pub fn distinct_permutations(v: &[u32]) -> Vec<Vec<u32>> {
    let mut sorted = v.to_vec();
    sorted.sort_unstable_by(|a, b| b.cmp(a));
    let mut out = vec![sorted.clone()];
    // prev_permutation on a nonincreasing start walks every distinct one
    loop {
        let n = sorted.len();
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| sorted[i] > sorted[i + 1]) else {
            return out;
        };
        let j = (i + 1..n).rev().find(|&j| sorted[j] < sorted[i]).expect("exists");
        sorted.swap(i, j);
        sorted[i + 1..].reverse();
        out.push(sorted.clone());
    }
}

/// Monomial symmetric function `m_mu(y)`: the sum of `y^beta` over the
/// distinct rearrangements `beta` of `mu` (padded to the length of `y`).
pub fn monomial_symmetric(mu: &[u32], y: &[ExactScalar]) -> Result<ExactScalar, ScalarError> {
    let mut parts: Vec<u32> = mu.iter().copied().filter(|&p| p > 0).collect();
    parts.sort_unstable_by(|a, b| b.cmp(a));
    let mut memo: HashMap<(usize, Vec<u32>), ExactScalar> = HashMap::new();
    ms_rec(0, parts, y, &mut memo)
}

fn ms_rec(
    i: usize,
    parts: Vec<u32>,
    y: &[ExactScalar],
    memo: &mut HashMap<(usize, Vec<u32>), ExactScalar>,
) -> Result<ExactScalar, ScalarError> {
    if parts.is_empty() {
        return Ok(ExactScalar::one());
    }
    if y.len() - i < parts.len() {
        return Ok(ExactScalar::zero());
    }
    if let Some(v) = memo.get(&(i, parts.clone())) {
        return Ok(v.clone());
    }
    // coordinate i takes no part, or one copy of each distinct part value
    let mut total = ms_rec(i + 1, parts.clone(), y, memo)?;
    if !y[i].is_zero() {
        let mut seen = Vec::new();
        for (k, &p) in parts.iter().enumerate() {
            if seen.contains(&p) {
                continue;
            }
            seen.push(p);
            let mut rest = parts.clone();
            rest.remove(k);
            let sub = ms_rec(i + 1, rest, y, memo)?;
            if !sub.is_zero() {
                total = total.try_add(&y[i].pow_int(p as i64)?.try_mul(&sub)?)?;
            }
        }
    }
    memo.insert((i, parts), total.clone());
    Ok(total)
}

/// Patterns in squared exponents with their `n`-dependent coefficients.
fn half_patterns(id: InvariantId, n: usize) -> Vec<(Vec<u32>, BigRational)> {
    let n = n as i64;
    let (n1, n2, n3, n4) = (n - 1, n - 2, n - 3, n - 4);
    match id {
        InvariantId::F4 => vec![(vec![2], q(1)), (vec![1, 1], qr(-6, n1))],
        InvariantId::F6 => vec![
            (vec![3], q(1)),
            (vec![2, 1], qr(-15, n1)),
            (vec![1, 1, 1], qr(180, n1 * n2)),
        ],
        InvariantId::F81 => vec![
            (vec![4], q(1)),
            (vec![3, 1], qr(-28, n1)),
            (vec![2, 2], qr(70, n1)),
        ],
        InvariantId::F82 => vec![
            (vec![2, 2], q(1)),
            (vec![2, 1, 1], qr(-6, n2)),
            (vec![1, 1, 1, 1], qr(108, n2 * n3)),
        ],
        InvariantId::F101 => vec![
            (vec![5], q(1)),
            (vec![4, 1], qr(-45, n1)),
            (vec![3, 2], qr(42, n1)),
            (vec![3, 1, 1], qr(1008, n1 * n2)),
            (vec![2, 2, 1], qr(-1260, n1 * n2)),
        ],
        InvariantId::F102 => vec![
            (vec![3, 2], q(1)),
            (vec![3, 1, 1], qr(-6, n2)),
            (vec![2, 2, 1], qr(-30, n2)),
            (vec![2, 1, 1, 1], qr(450, n2 * n3)),
            (vec![1, 1, 1, 1, 1], qr(-10800, n2 * n3 * n4)),
        ],
    }
}

/// The invariant harmonic `id` in `n` variables.
pub fn build_invariant(id: InvariantId, n: usize) -> Result<SymPolynomial, HarmonicError> {
    id.check(n)?;
    let terms = half_patterns(id, n)
        .into_iter()
        .map(|(p, c)| (p.iter().map(|x| 2 * x).collect(), ExactScalar::Rational(c)))
        .collect();
    Ok(SymPolynomial { n, terms })
}

/// Direct evaluation of a symmetrized polynomial at an orbit's canonical
/// representative.
pub fn eval_invariant_direct(p: &SymPolynomial, o: &GcvOrbit) -> Result<ExactScalar, HarmonicError> {
    p.eval_squares(&o.canonical_rep().squares(o)?)
}

/// `f~_id(v_{a,s}) = (A+s)^{deg/2} f_id(v_{a,s})` as a polynomial in `A`.
///
/// The `f8,2` line is `s` times the commonly printed expression; the printed
/// form does not vanish at `s = 0`, where the true value is zero.
pub fn closed_form(id: InvariantId, n: usize, s: usize) -> Result<QPoly, HarmonicError> {
    id.check(n)?;
    let a = QPoly::var();
    let c = |x: BigRational| QPoly::constant(x);
    let ints = |v: &[i64]| QPoly::from_ints(v);
    let n = n as i64;
    let s = s as i64;
    let sr = q(s);
    let (n1, n2, n3, n4) = (n - 1, n - 2, n - 3, n - 4);
    let poly = match id {
        InvariantId::F4 => ints(&[0, 0, 1])
            .add(&c(sr.clone()))
            .add(&a.scale(&qr(-6 * s, n1)))
            .add(&c(qr(-3 * s * (s - 1), n1))),
        InvariantId::F6 => ints(&[s, 0, 0, 1])
            .add(&ints(&[s - 1, 1, 1]).scale(&qr(-15 * s, n1)))
            .add(&a.scale(&qr(90 * s * (s - 1), n1 * n2)))
            .add(&c(qr(30 * s * (s - 1) * (s - 2), n1 * n2))),
        InvariantId::F81 => ints(&[s, 0, 0, 0, 1])
            .add(&ints(&[s - 1, 1, 0, 1]).scale(&qr(-28 * s, n1)))
            .add(&QPoly::new(vec![qr(s - 1, 2), q(0), q(1)]).scale(&qr(70 * s, n1))),
        InvariantId::F82 => QPoly::new(vec![qr(s - 1, 2), q(0), q(1)])
            .add(&ints(&[s - 2, 2, 1]).scale(&qr(-3 * (s - 1), n2)))
            .add(&ints(&[s - 3, 4]).scale(&qr(9 * (s - 1) * (s - 2), 2 * n2 * n3)))
            .scale(&sr),
        InvariantId::F101 => ints(&[s, 0, 0, 0, 0, 1])
            .add(&ints(&[s - 1, 15, -14, -14, 15]).scale(&qr(-3 * s, n1)))
            .add(&ints(&[2 - s, 3, -10, 4]).scale(&qr(126 * s * (s - 1), n1 * n2))),
        InvariantId::F102 => ints(&[s * (s - 1), 0, s, s])
            .add(&ints(&[6 * s - 12, 7, 10, 1]).scale(&qr(-3 * s * (s - 1), n2)))
            .add(&ints(&[s - 3, 3, 1]).scale(&qr(75 * s * (s - 1) * (s - 2), n2 * n3)))
            .add(&ints(&[s - 4, 5]).scale(&qr(-90 * s * (s - 1) * (s - 2) * (s - 3), n2 * n3 * n4))),
    };
    Ok(poly)
}

/// `f~_id` at an orbit (closed form).
pub fn eval_invariant_closed(id: InvariantId, o: &GcvOrbit) -> Result<ExactScalar, HarmonicError> {
    Ok(closed_form(id, o.n(), o.s())?.eval(o.a2())?)
}

/// `f_id(v_{a,s})`, the value on the unit vector.
pub fn eval_invariant_normalized(id: InvariantId, o: &GcvOrbit) -> Result<ExactScalar, HarmonicError> {
    let tilde = eval_invariant_closed(id, o)?;
    Ok(tilde.try_div(&o.norm2().pow_int(id.degree() as i64 / 2)?)?)
}

/// `(degree, dim Harm_degree(S^{n-1})^{B_n})` for degrees `0..=max_degree`,
/// from the series `1/((1-l^4)(1-l^6)...(1-l^{2n}))`.
pub fn invariant_harmonic_dims(n: usize, max_degree: usize) -> Vec<(usize, u64)> {
    let mut c = vec![0u64; max_degree + 1];
    c[0] = 1;
    for k in 2..=n {
        let step = 2 * k;
        for d in step..=max_degree {
            c[d] += c[d - step];
        }
    }
    c.into_iter().enumerate().collect()
}

/// The invariants of a given degree available in dimension `n`, checked
/// against the harmonic dimension count.
pub fn invariants_of_degree(n: usize, degree: u32) -> Vec<InvariantId> {
    let ids: Vec<InvariantId> = InvariantId::ALL
        .into_iter()
        .filter(|id| id.degree() == degree && n >= id.min_dimension())
        .collect();
    if n >= 3 && degree <= 10 {
        let dims = invariant_harmonic_dims(n, degree as usize);
        debug_assert_eq!(dims[degree as usize].1 as usize, ids.len(), "n={n} degree={degree}");
    }
    ids
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    fn orbit(n: usize, a2: &str, s: usize) -> GcvOrbit {
        GcvOrbit::new(n, a2.parse().unwrap(), s).unwrap()
    }

    fn term(p: &[u32], c: &str) -> (Vec<u32>, ExactScalar) {
        (p.to_vec(), c.parse().unwrap())
    }

    #[test]
    fn built_polynomials() {
        let f4 = build_invariant(InvariantId::F4, 3).unwrap();
        assert_eq!(f4.terms, vec![term(&[4], "1"), term(&[2, 2], "-3")]);
        let f6 = build_invariant(InvariantId::F6, 4).unwrap();
        assert_eq!(f6.terms, vec![term(&[6], "1"), term(&[4, 2], "-5"), term(&[2, 2, 2], "30")]);
        assert!(matches!(
            build_invariant(InvariantId::F82, 3),
            Err(HarmonicError::DimensionTooSmall { min: 4, .. })
        ));
        assert!(build_invariant(InvariantId::F102, 4).is_err());
    }

    #[test]
    fn direct_values() {
        for n in 3..7 {
            let f4 = build_invariant(InvariantId::F4, n).unwrap();
            assert_eq!(eval_invariant_direct(&f4, &orbit(n, "1", 0)).unwrap(), ExactScalar::one());
        }
        let f4 = build_invariant(InvariantId::F4, 4).unwrap();
        assert!(eval_invariant_direct(&f4, &orbit(4, "4", 2)).unwrap().is_zero());
        let f6 = build_invariant(InvariantId::F6, 4).unwrap();
        assert_eq!(eval_invariant_direct(&f6, &orbit(4, "1", 1)).unwrap(), ExactScalar::int(-1));
    }

    #[test]
    fn closed_values() {
        let o = orbit(16, "4", 8);
        assert!(eval_invariant_closed(InvariantId::F4, &o).unwrap().is_zero());
        assert_eq!(eval_invariant_closed(InvariantId::F81, &o).unwrap(), ExactScalar::int(-128));
        let o = orbit(4, "4", 2);
        assert_eq!(eval_invariant_closed(InvariantId::F6, &o).unwrap(), ExactScalar::int(-24));
        assert_eq!(eval_invariant_normalized(InvariantId::F6, &o).unwrap(), ExactScalar::ratio(-1, 9));
    }

    #[test]
    fn closed_forms_match_direct_evaluation() {
        for id in InvariantId::ALL {
            for n in id.min_dimension()..=8 {
                let p = build_invariant(id, n).unwrap();
                for s in 0..n {
                    for a2 in ["1", "4", "2/7", "(3+sqrt(5))/2"] {
                        let o = orbit(n, a2, s);
                        let direct = eval_invariant_direct(&p, &o)
                            .unwrap()
                            .try_mul(&o.norm2().pow_int(id.degree() as i64 / 2).unwrap())
                            .unwrap();
                        assert_eq!(eval_invariant_closed(id, &o).unwrap(), direct, "{id} {o}");
                    }
                }
            }
        }
    }

    #[test]
    fn printed_f82_line_is_off_by_a_factor_s() {
        // the commonly printed expression, without the leading s
        let printed = |n: i64, s: i64, a: BigRational| {
            let a2 = &a * &a;
            a2.clone() + qr(s - 1, 2) - (a2.clone() + q(2) * &a + q(s - 2)) * qr(3 * (s - 1), n - 2)
                + (q(4) * &a + q(s - 3)) * qr(9 * (s - 1) * (s - 2), 2 * (n - 2) * (n - 3))
        };
        let o = orbit(5, "3", 0);
        let direct = eval_invariant_closed(InvariantId::F82, &o).unwrap();
        assert!(direct.is_zero());
        assert_ne!(printed(5, 0, q(3)), BigRational::zero());
        let o = orbit(6, "3", 2);
        let v = eval_invariant_closed(InvariantId::F82, &o).unwrap();
        assert_eq!(v, ExactScalar::Rational(printed(6, 2, q(3)) * q(2)));
    }

    #[test]
    fn molien_dimensions() {
        let dims = invariant_harmonic_dims(4, 8);
        assert_eq!(dims.iter().map(|d| d.1).collect::<Vec<_>>(), vec![1, 0, 0, 0, 1, 0, 1, 0, 2]);
        assert_eq!(invariant_harmonic_dims(3, 10)[10].1, 1);
        assert_eq!(invariant_harmonic_dims(5, 0), vec![(0, 1)]);
        for n in 3..=10 {
            for d in (4..=10).step_by(2) {
                let _ = invariants_of_degree(n, d);
            }
        }
    }

    /// Applies the Laplacian to the expanded polynomial.
    fn laplacian(p: &HashMap<Vec<u32>, ExactScalar>) -> HashMap<Vec<u32>, ExactScalar> {
        let mut out: HashMap<Vec<u32>, ExactScalar> = HashMap::new();
        for (mono, c) in p {
            for i in 0..mono.len() {
                let e = mono[i];
                if e < 2 {
                    continue;
                }
                let mut m = mono.clone();
                m[i] -= 2;
                let add = c.scale_int((e * (e - 1)) as i64);
                let slot = out.entry(m).or_insert_with(ExactScalar::zero);
                *slot = slot.try_add(&add).unwrap();
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    #[test]
    fn invariants_are_harmonic() {
        for id in InvariantId::ALL {
            for n in id.min_dimension()..=6 {
                let p = build_invariant(id, n).unwrap();
                let expanded = p.expand();
                assert!(expanded.keys().all(|m| m.iter().sum::<u32>() == id.degree()));
                assert!(laplacian(&expanded).is_empty(), "{id} n={n}");
            }
        }
    }

    #[test]
    fn bn_invariance_on_orbit_points() {
        let o = orbit(5, "7/2", 2);
        let pts = o.enumerate(1000).unwrap();
        for id in InvariantId::ALL {
            let p = build_invariant(id, 5).unwrap();
            let want = eval_invariant_direct(&p, &o).unwrap();
            for pt in pts.iter().step_by(pts.len() / 20) {
                assert_eq!(p.eval_squares(&pt.squares(&o).unwrap()).unwrap(), want);
            }
        }
    }

    #[test]
    fn monomial_symmetric_counts_distinct_monomials() {
        let ones = vec![ExactScalar::one(); 5];
        // number of distinct rearrangements of (2,1,1,0,0) is 5!/(2!2!) = 30
        assert_eq!(monomial_symmetric(&[2, 1, 1], &ones).unwrap(), ExactScalar::int(30));
        assert_eq!(distinct_permutations(&[2, 1, 1, 0, 0]).len(), 30);
    }
}
