//! Parameter searches: single-orbit 7-designs, integer points of the
//! associated plane curve, the two-orbit cubic, admissible tail lengths, the
//! case-iii elimination scan, and Gauss-Newton refinement of numeric designs.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::design::{Convention, DesignError, WeightedDesign};
use crate::harmonics::{closed_form, eval_invariant_closed, InvariantId};
use crate::moments::{partitions, sphere_moment, MomentPoly};
use crate::orbits::GcvOrbit;
use crate::qpoly::{q, qr};
use crate::scalars::{ExactScalar, ScalarError, DEFAULT_PRECISION};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SearchError {
    #[error("seed residual {residual:.3e} is above the refinement limit {limit:.1e}")]
    SeedTooFar { residual: f64, limit: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("weight {index} became non-positive ({value:.3e})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Hits of a scan with the bounds that were covered.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult<H> {
    pub hits: Vec<H>,
    pub bounds: String,
    pub cells: u64,
    pub elapsed_ms: f64,
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Exact sign of `p + q sqrt(d)` for integers with `d >= 0`.
fn sign_plus_root(p: &BigInt, q: &BigInt, d: &BigInt) -> i8 {
    let sp = sign(p);
    let sq = if d.is_zero() { 0 } else { sign(q) };
    if sp == 0 {
        return sq;
    }
    if sq == 0 || sp == sq {
        return sp;
    }
    // opposite signs: compare p^2 with q^2 d
    match (p * p).cmp(&(q * q * d)) {
        std::cmp::Ordering::Greater => sp,
        std::cmp::Ordering::Less => sq,
        std::cmp::Ordering::Equal => 0,
    }
}

fn sign(x: &BigInt) -> i8 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

/// The three integer pieces of `h_{+-}(n, s) = P +- Q sqrt(D)`.
pub fn single_orbit_parts(n: i64, s: i64) -> (BigInt, BigInt, BigInt) {
    let (n, s) = (big(n), big(s));
    let p = &n * &n * &n + (big(2) - big(9) * &s) * &n * &n
        + (big(-7) - big(9) * &s + big(12) * &s * &s) * &n
        + big(6) * &s * &s
        + big(18) * &s
        + 4;
    let q = &n * &n - big(3) * (&s - 2) * &n - big(3) * &s - 7;
    let d = (&n + 2) * &s * (big(1) - &n + big(3) * &s);
    (p, q, d)
}

/// Which of `h_+` and `h_-` vanish, decided exactly; `None` when the
/// radicand is negative.
pub fn h_vanishes(n: i64, s: i64) -> Option<[bool; 2]> {
    let (p, q, d) = single_orbit_parts(n, s);
    if d.is_negative() {
        return None;
    }
    Some([sign_plus_root(&p, &q, &d) == 0, sign_plus_root(&p, &(-&q), &d) == 0])
}

/// The two roots `A = (3s +- sqrt(D)) / (n-1)` of `f~4 = 0`.
pub fn single_orbit_heads(n: i64, s: i64) -> Result<Option<[ExactScalar; 2]>, ScalarError> {
    let d = (n + 2) * s * (1 - n + 3 * s);
    if d < 0 {
        return Ok(None);
    }
    let root = ExactScalar::sqrt_rational(&q(d))?;
    let base = ExactScalar::int(3 * s);
    let den = ExactScalar::int(n - 1);
    Ok(Some([base.try_add(&root)?.try_div(&den)?, base.try_sub(&root)?.try_div(&den)?]))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingleOrbitHit {
    pub n: usize,
    pub s: usize,
    #[serde(rename = "A")]
    pub a2: ExactScalar,
    /// `+1` if `h_+` vanishes, `-1` for `h_-`.
    pub h_sign: i8,
    /// Equations that vanish exactly at the hit.
    pub certificate: Vec<String>,
    /// `f~8,1` at the hit; nonzero means the orbit is not a 9-design.
    pub f81: ExactScalar,
}

/// Single-orbit 7-designs `v_{a,s}` in dimensions `3..=n_max` with `s >= 1`.
pub fn search_single_orbit_7(n_max: usize) -> Result<SearchResult<SingleOrbitHit>, SearchError> {
    if n_max < 3 {
        return Err(SearchError::Invalid(format!("n_max must be at least 3, got {n_max}")));
    }
    let start = Instant::now();
    let per_n = (3..=n_max)
        .into_par_iter()
        .map(|n| -> Result<Vec<SingleOrbitHit>, SearchError> {
            let mut hits = Vec::new();
            for s in 1..n {
                let Some(which) = h_vanishes(n as i64, s as i64) else { continue };
                if !which[0] && !which[1] {
                    continue;
                }
                let h_sign = if which[0] { 1 } else { -1 };
                let Some(heads) = single_orbit_heads(n as i64, s as i64)? else { continue };
                for a2 in heads {
                    if a2.sign() <= 0 {
                        continue;
                    }
                    let o = GcvOrbit::new(n, a2.clone(), s).map_err(DesignError::from)?;
                    let f4 = eval_invariant_closed(InvariantId::F4, &o).map_err(DesignError::from)?;
                    let f6 = eval_invariant_closed(InvariantId::F6, &o).map_err(DesignError::from)?;
                    if f4.is_zero() && f6.is_zero() {
                        let f81 = eval_invariant_closed(InvariantId::F81, &o).map_err(DesignError::from)?;
                        let certificate = vec!["f4".into(), "f6".into(), if h_sign > 0 { "h+" } else { "h-" }.into()];
                        hits.push(SingleOrbitHit { n, s, a2, h_sign, certificate, f81 });
                    }
                }
            }
            Ok(hits)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let hits: Vec<SingleOrbitHit> = per_n.into_iter().flatten().collect();
    Ok(SearchResult {
        hits,
        bounds: format!("3 <= n <= {n_max}, 1 <= s <= n-1"),
        cells: ((n_max - 2) * (n_max - 1) / 2) as u64,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Integer solutions `(s, m)` of `9s^2 - 24s + 64 = m^2`, i.e. of
/// `m^2 - (3s-4)^2 = 48`, from the factorizations of 48.
pub fn discriminant_square_solutions() -> Vec<(i64, i64)> {
    let mut out = Vec::new();
    for d1 in 1..=48i64 {
        if 48 % d1 != 0 {
            continue;
        }
        let d2 = 48 / d1;
        // m - u = d1, m + u = d2 with u = 3s - 4
        if (d1 + d2) % 2 != 0 {
            continue;
        }
        let m = (d1 + d2) / 2;
        let u = (d2 - d1) / 2;
        for u in [u, -u] {
            if (u + 4) % 3 == 0 {
                let s = (u + 4) / 3;
                out.push((s, m));
                out.push((s, -m));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Integer roots `n` of `n^2 - 3(s-2) n - 3s - 7 = 0`.
pub fn q_integer_roots(s: i64) -> Vec<i64> {
    let b = -3 * (s - 2);
    let c = -3 * s - 7;
    let disc = b * b - 4 * c;
    if disc < 0 {
        return Vec::new();
    }
    let r = disc.isqrt();
    if r * r != disc {
        return Vec::new();
    }
    let mut out: Vec<i64> = [(-b + r), (-b - r)].into_iter().filter(|x| x % 2 == 0).map(|x| x / 2).collect();
    out.dedup();
    out
}

/// The quartic curve `f(x, y)` on which all single-orbit 7-designs lie.
pub fn curve_f(x: &BigInt, y: &BigInt) -> BigInt {
    let x2 = x * x;
    let y2 = y * y;
    let y3 = &y2 * y;
    &x2 * &x2 + (big(6) - big(9) * y) * &x2 * x + (big(27) * &y2 - big(30) * y + 1) * &x2
        - (big(27) * &y3 - big(54) * &y2 - big(9) * y + 24) * x
        - big(18) * &y3
        - big(36) * &y2
        + big(30) * y
        + 16
}

/// `df/dy` in factored form `-3 (x - 3y + 1)(3x^2 - 9xy + 7x - 6y - 10)`.
pub fn curve_fy(x: &BigInt, y: &BigInt) -> BigInt {
    big(-3) * (x - big(3) * y + 1) * (big(3) * x * x - big(9) * x * y + big(7) * x - big(6) * y - 10)
}

/// `df/dx`.
pub fn curve_fx(x: &BigInt, y: &BigInt) -> BigInt {
    big(4) * x * x * x - big(9) * x * x * (big(3) * y - 2) + x * (big(54) * y * y - big(60) * y + 2)
        - big(27) * y * y * y
        + big(54) * y * y
        + big(9) * y
        - 24
}

/// Integer points of `f(x, y) = 0` with `0 <= x <= x_max`, `0 <= y <= y_max`.
pub fn curve_integer_points(x_max: i64, y_max: i64) -> Vec<(i64, i64)> {
    let mut out: Vec<(i64, i64)> = (0..=x_max)
        .into_par_iter()
        .flat_map_iter(|x| {
            (0..=y_max).filter(move |&y| curve_f(&big(x), &big(y)).is_zero()).map(move |y| (x, y))
        })
        .collect();
    out.sort_unstable();
    out
}

/// The cubic in `n` obtained by subtracting the curve equations for `s1`
/// and `s2` and dividing by `3 (s2 - s1)`.
pub fn tanino_cubic(n: i64, s1: i64, s2: i64) -> i128 {
    let (n, s1, s2) = (n as i128, s1 as i128, s2 as i128);
    3 * n * n * n + (10 - 9 * s1 - 9 * s2) * n * n
        - 3 * (1 + 6 * s1 + 6 * s2 - 3 * s1 * s1 - 3 * s1 * s2 - 3 * s2 * s2) * n
        - 10
        + 12 * s1
        + 12 * s2
        + 6 * s1 * s1
        + 6 * s1 * s2
        + 6 * s2 * s2
}

fn positive_divisors(m: i128) -> Vec<i128> {
    let m = m.abs();
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= m {
        if m % d == 0 {
            out.push(d);
            if d * d != m {
                out.push(m / d);
            }
        }
        d += 1;
    }
    out
}

/// Positive integer roots of the cubic for `1 <= s1 <= s2 <= s_max`, by the
/// rational root test (an integer root divides the constant term, after
/// removing factors of `n`).
pub fn tanino_scan(s_max: i64) -> SearchResult<(i64, i64, i64)> {
    let start = Instant::now();
    let mut hits: Vec<(i64, i64, i64)> = (1..=s_max)
        .into_par_iter()
        .flat_map_iter(|s1| {
            (s1..=s_max).flat_map(move |s2| {
                let c0 = tanino_cubic(0, s1, s2);
                let cands = if c0 == 0 {
                    // n divides the cubic; the quotient's constant is the linear coefficient
                    let c1 = tanino_cubic(1, s1, s2) - tanino_cubic(-1, s1, s2);
                    if c1 == 0 { vec![] } else { positive_divisors(c1 / 2) }
                } else {
                    positive_divisors(c0)
                };
                cands
                    .into_iter()
                    .filter(move |&n| tanino_cubic(n as i64, s1, s2) == 0)
                    .map(move |n| (n as i64, s1, s2))
            })
        })
        .collect();
    hits.sort_unstable_by(|a, b| b.cmp(a));
    hits.dedup();
    let cells = (s_max * (s_max + 1) / 2).max(0) as u64;
    SearchResult {
        hits,
        bounds: format!("1 <= s1 <= s2 <= {s_max}"),
        cells,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    }
}

/// `3n^4 - 200n^3 - 1412n^2 - 32752n - 277504`, whose integer roots would
/// be needed for a single-orbit 9-design.
pub fn single_orbit_9_quartic(n: i64) -> i128 {
    let n = n as i128;
    3 * n * n * n * n - 200 * n * n * n - 1412 * n * n - 32752 * n - 277504
}

/// Integer roots of the quartic in `1..=n_max`.
pub fn single_orbit_9_quartic_roots(n_max: i64) -> Vec<i64> {
    (1..=n_max).into_par_iter().filter(|&n| single_orbit_9_quartic(n) == 0).collect()
}

/// Integer roots anywhere, by the rational root test (an integer root of a
/// polynomial with leading coefficient 3 divides the constant term).
pub fn single_orbit_9_quartic_integer_roots() -> Vec<i64> {
    let mut out = Vec::new();
    for d in positive_divisors(277504) {
        for r in [d, -d] {
            if single_orbit_9_quartic(r as i64) == 0 {
                out.push(r as i64);
            }
        }
    }
    out
}

/// `((5n^2+15n-20)/(12n+6), (5n^2+15n-20)/(9n+12))`: the open lower and
/// closed upper limits for `s` in a case-iii two-orbit 9-design.
pub fn admissible_s_range(n: i64) -> (BigRational, BigRational) {
    let num = 5 * n * n + 15 * n - 20;
    (qr(num, 12 * n + 6), qr(num, 9 * n + 12))
}

/// Integers `s` with `lower < s <= upper` and `s <= n - 1`.
pub fn admissible_s_values(n: i64) -> Vec<i64> {
    let (lo, hi) = admissible_s_range(n);
    let first: BigInt = lo.floor().to_integer() + 1;
    let last = hi.floor().to_integer().min(BigInt::from(n - 1));
    let (Some(first), Some(last)) = (first.to_i64(), last.to_i64()) else { return Vec::new() };
    (first.max(0)..=last).collect()
}

/// Outcome of the case-iii scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseIiiScan {
    pub n_max: i64,
    /// `(n, s)` cells with an admissible integer `s`.
    pub cells: Vec<(i64, i64)>,
    /// Cells where two distinct positive heads satisfy `f4 = f6 = 0`.
    pub zero_pairs: Vec<(i64, i64)>,
    /// Cells that additionally meet the remaining case-iii conditions.
    pub case_iii: Vec<(i64, i64)>,
}

/// For every admissible `(n, s)`, takes the two roots of `f~4 = 0` in `A`
/// and checks exactly whether both also satisfy `f~6 = 0` (then `f8,1`
/// signs and `G8,1,8,2`).
pub fn case_iii_scan(n_max: i64) -> Result<CaseIiiScan, SearchError> {
    let rows = (3..=n_max)
        .into_par_iter()
        .map(|n| -> Result<Vec<(i64, i64, bool, bool)>, SearchError> {
            let mut out = Vec::new();
            for s in admissible_s_values(n) {
                let mut zero_pair = false;
                let mut full = false;
                if let Some([a1, a2]) = single_orbit_heads(n, s)? {
                    if a1.sign() > 0 && a2.sign() > 0 && a1 != a2 {
                        let f6 = closed_form(InvariantId::F6, n as usize, s as usize).map_err(DesignError::from)?;
                        if f6.eval(&a1)?.is_zero() && f6.eval(&a2)?.is_zero() {
                            zero_pair = true;
                            let o1 = GcvOrbit::new(n as usize, a1, s as usize).map_err(DesignError::from)?;
                            let o2 = GcvOrbit::new(n as usize, a2, s as usize).map_err(DesignError::from)?;
                            let c = crate::design::classify_9(&o1, &o2, crate::design::Mode::Exact)?;
                            full = c.case == crate::design::Case::III;
                        }
                    }
                }
                out.push((n, s, zero_pair, full));
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let rows: Vec<_> = rows.into_iter().flatten().collect();
    Ok(CaseIiiScan {
        n_max,
        cells: rows.iter().map(|r| (r.0, r.1)).collect(),
        zero_pairs: rows.iter().filter(|r| r.2).map(|r| (r.0, r.1)).collect(),
        case_iii: rows.iter().filter(|r| r.3).map(|r| (r.0, r.1)).collect(),
    })
}

/// `g3` with `A1 + A2 = 6s/(n-1)` substituted; it depends on the heads only
/// through their sum. Its vanishing forces `n = 6s - 3` or `n = s + 1`.
pub fn g3_on_f4_line(n: i64, s: i64) -> BigRational {
    let sum = qr(6 * s, n - 1);
    let lin = q(3 + 2 * n - n * n - 9 * s + 3 * n * s);
    q(-18 - 6 * n + 36 * s + 6 * n * s - 18 * s * s) + sum * lin
}

/// `A1 A2` forced on the `n = 6s - 3` branch: `-3s(27s^2 - 15s - 5) / ((3s-2)^2 (6s-5))`.
pub fn head_product_on_branch(s: i64) -> BigRational {
    qr(-3 * s * (27 * s * s - 15 * s - 5), (3 * s - 2) * (3 * s - 2) * (6 * s - 5))
}

/// The `n = 3` candidate `A1 = (3 -+ sqrt5)/2`, `A2 = ((+-1 + sqrt5)/2)^2`,
/// `s = 1`, substituted into the `f6` difference equation; returns the two
/// values (both should be `-44`).
pub fn golden_candidate_residuals() -> Result<Vec<ExactScalar>, ScalarError> {
    let mut out = Vec::new();
    for sg in [1i64, -1] {
        let r5: ExactScalar = "sqrt(5)".parse()?;
        let a1 = ExactScalar::int(3).try_sub(&r5.scale_int(sg))?.try_div(&ExactScalar::int(2))?;
        let a2 = ExactScalar::int(sg).try_add(&r5)?.try_div(&ExactScalar::int(2))?.pow_int(2)?;
        let (n, s) = (ExactScalar::int(3), ExactScalar::int(1));
        let sum = a1.try_add(&a2)?;
        let quad = a1.pow_int(2)?.try_add(&a1.try_mul(&a2)?)?.try_add(&a2.pow_int(2)?)?;
        let nm2 = n.try_sub(&ExactScalar::int(2))?;
        let nm1 = n.try_sub(&ExactScalar::one())?;
        let v = quad
            .try_mul(&nm2)?
            .try_mul(&nm1)?
            .try_sub(&s.scale_int(60))?
            .try_sub(&sum.try_mul(&nm2)?.try_mul(&s)?.scale_int(15))?
            .try_sub(&n.try_mul(&s)?.scale_int(15))?
            .try_add(&s.pow_int(2)?.scale_int(90))?;
        out.push(v);
    }
    Ok(out)
}

/// The two-orbit 9-design systems for the `n = 3` examples, in the squared
/// heads and the first orbit's total weight `W~_1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum QuarticSystem {
    /// `s = (1, 2)`.
    Row1,
    /// `s = (2, 2)`.
    Row2,
}

impl QuarticSystem {
    /// The monomial terms of each equation at `(A1, A2, W~_1)`.
    pub fn terms(&self, a1: f64, a2: f64, w1: f64) -> [Vec<f64>; 3] {
        match self {
            QuarticSystem::Row1 => [
                vec![17.0, -92.0 * a2, 78.0 * a2.powi(2), -44.0 * a2.powi(3), 5.0 * a2.powi(4)],
                vec![24.0, -167.0 * a1, 24.0 * a1 * a1, 57.0 * a1 * a2, -39.0 * a1 * a2 * a2, 5.0 * a1 * a2.powi(3)],
                vec![-845.0, -522.0 * a2, 369.0 * a2 * a2, -40.0 * a2.powi(3), 1785.0 * w1],
            ],
            QuarticSystem::Row2 => [
                vec![-19.0, 116.0 * a2, 66.0 * a2 * a2, -20.0 * a2.powi(3), a2.powi(4)],
                vec![-175.0, 12.0 * a1, -47.0 * a2, 19.0 * a2 * a2, -a2.powi(3)],
                vec![-3956.0, 2291.0 * a2, -349.0 * a2 * a2, 13.0 * a2.powi(3), 7770.0 * w1],
            ],
        }
    }

    /// Absolute residuals of the three equations.
    pub fn residuals(&self, a1: f64, a2: f64, w1: f64) -> [f64; 3] {
        self.terms(a1, a2, w1).map(|t| t.iter().sum::<f64>())
    }

    /// `|sum of terms| / sum |terms|` per equation: the size-independent
    /// measure used for 6-digit inputs.
    pub fn normalized_residuals(&self, a1: f64, a2: f64, w1: f64) -> [f64; 3] {
        self.terms(a1, a2, w1)
            .map(|t| t.iter().sum::<f64>().abs() / t.iter().map(|x| x.abs()).sum::<f64>())
    }
}

/// Options for [`refine_design`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    /// Stop once the max moment residual is at most this.
    pub target: f64,
    /// Refuse seeds whose residual is above this.
    pub seed_limit: f64,
    pub max_iterations: usize,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions { target: 1e-12, seed_limit: 1e-3, max_iterations: 100 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refined {
    pub design: WeightedDesign,
    pub initial_residual: f64,
    pub final_residual: f64,
    pub iterations: usize,
}

/// The degree-`t` moment system of a fixed orbit structure, in `f64`.
struct MomentSystem {
    n: usize,
    s: Vec<usize>,
    /// Orbits whose head is a free unknown (not exactly a corner).
    free: Vec<bool>,
    counts: Vec<f64>,
    rows: Vec<(Vec<MomentPoly>, f64)>,
}

impl MomentSystem {
    fn new(d: &WeightedDesign, t: u32) -> Self {
        let n = d.n();
        let s: Vec<usize> = d.orbits().iter().map(|(o, _)| o.s()).collect();
        let free = d.orbits().iter().map(|(o, _)| !o.is_corner()).collect();
        let counts = d.orbits().iter().map(|(o, _)| d.effective_count(o).to_f64().unwrap_or(f64::NAN)).collect();
        let mut rows = Vec::new();
        for half in 0..=t / 2 {
            for mu in partitions(half, n) {
                let polys = s.iter().map(|&si| MomentPoly::new(n, si, &mu)).collect();
                let mut lambda: Vec<u32> = mu.iter().map(|m| 2 * m).collect();
                lambda.resize(n, 0);
                rows.push((polys, sphere_moment(n, &lambda).to_f64()));
            }
        }
        MomentSystem { n, s, free, counts, rows }
    }

    fn residuals(&self, a: &[f64], w: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.rows.len(),
            self.rows.iter().map(|(polys, rhs)| {
                polys
                    .iter()
                    .enumerate()
                    .map(|(i, p)| w[i] * self.counts[i] * p.eval_f64(a[i]))
                    .sum::<f64>()
                    - rhs
            }),
        )
    }

    /// Columns: free heads first (in orbit order), then all weights.
    fn jacobian(&self, a: &[f64], w: &[f64]) -> DMatrix<f64> {
        let heads: Vec<usize> = (0..a.len()).filter(|&i| self.free[i]).collect();
        let cols = heads.len() + w.len();
        let mut j = DMatrix::zeros(self.rows.len(), cols);
        for (r, (polys, _)) in self.rows.iter().enumerate() {
            for (c, &i) in heads.iter().enumerate() {
                j[(r, c)] = w[i] * self.counts[i] * polys[i].deriv_f64(a[i]);
            }
            for i in 0..w.len() {
                j[(r, heads.len() + i)] = self.counts[i] * polys[i].eval_f64(a[i]);
            }
        }
        j
    }
}

fn max_abs(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Least-squares Gauss-Newton step with column equilibration.
fn gauss_newton_step(j: &DMatrix<f64>, r: &DVector<f64>) -> Option<DVector<f64>> {
    let scales: Vec<f64> = (0..j.ncols()).map(|c| j.column(c).norm().max(1e-300)).collect();
    let mut js = j.clone();
    for (c, sc) in scales.iter().enumerate() {
        js.column_mut(c).scale_mut(1.0 / sc);
    }
    let step = js.svd(true, true).solve(&(-r), 1e-14).ok()?;
    Some(DVector::from_iterator(step.len(), step.iter().zip(&scales).map(|(x, sc)| x / sc)))
}

/// Polishes a numeric design so that every moment equation of degree
/// `<= t` holds to `opts.target`. Heads of corner orbits (exactly `A = 1`)
/// stay fixed; all other heads and all weights move.
pub fn refine_design(d: &WeightedDesign, t: u32, opts: RefineOptions) -> Result<Refined, SearchError> {
    let sys = MomentSystem::new(d, t);
    let mut a: Vec<f64> = d.orbits().iter().map(|(o, _)| o.a2().to_f64()).collect();
    let mut w: Vec<f64> = d.orbits().iter().map(|(_, w)| w.to_f64()).collect();
    let initial = max_abs(&sys.residuals(&a, &w));
    if initial <= opts.target {
        return Ok(Refined { design: d.clone(), initial_residual: initial, final_residual: initial, iterations: 0 });
    }
    if initial.is_nan() || initial >= opts.seed_limit {
        return Err(SearchError::SeedTooFar { residual: initial, limit: opts.seed_limit });
    }
    let (a, w, res, iterations) = gauss_newton(&sys, &mut a, &mut w, opts)?;
    let orbits = d
        .orbits()
        .iter()
        .enumerate()
        .map(|(i, (o, _))| {
            let head = if sys.free[i] { ExactScalar::from_f64(a[i], DEFAULT_PRECISION) } else { o.a2().clone() };
            Ok((GcvOrbit::new(sys.n, head, sys.s[i]).map_err(DesignError::from)?, ExactScalar::from_f64(w[i], DEFAULT_PRECISION)))
        })
        .collect::<Result<Vec<_>, SearchError>>()?;
    let design = WeightedDesign::new(sys.n, d.convention(), orbits)?;
    Ok(Refined { design, initial_residual: initial, final_residual: res, iterations })
}

fn gauss_newton(
    sys: &MomentSystem,
    a: &mut [f64],
    w: &mut [f64],
    opts: RefineOptions,
) -> Result<(Vec<f64>, Vec<f64>, f64, usize), SearchError> {
    let heads: Vec<usize> = (0..a.len()).filter(|&i| sys.free[i]).collect();
    let mut res = max_abs(&sys.residuals(a, w));
    for it in 1..=opts.max_iterations {
        let r = sys.residuals(a, w);
        let j = sys.jacobian(a, w);
        let Some(step) = gauss_newton_step(&j, &r) else {
            return Err(SearchError::NoConvergence { iterations: it, residual: res });
        };
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let mut a2 = a.to_vec();
            let mut w2 = w.to_vec();
            for (c, &i) in heads.iter().enumerate() {
                a2[i] += lambda * step[c];
            }
            for i in 0..w.len() {
                w2[i] += lambda * step[heads.len() + i];
            }
            if a2.iter().all(|&x| x > 0.0) {
                let r2 = max_abs(&sys.residuals(&a2, &w2));
                if r2 < res {
                    a.copy_from_slice(&a2);
                    w.copy_from_slice(&w2);
                    res = r2;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if let Some((index, &value)) = w.iter().enumerate().find(|(_, &x)| x <= 0.0) {
            return Err(SearchError::NegativeWeight { index, value });
        }
        if res <= opts.target {
            return Ok((a.to_vec(), w.to_vec(), res, it));
        }
        if !accepted {
            return Err(SearchError::NoConvergence { iterations: it, residual: res });
        }
    }
    Err(SearchError::NoConvergence { iterations: opts.max_iterations, residual: res })
}

/// Best attempt of [`multistart_search`].
#[derive(Debug, Clone, PartialEq)]
pub struct MultistartReport {
    pub starts: usize,
    pub best_residual: f64,
    /// A positive-weight design reaching `target`, if one was found.
    pub design: Option<WeightedDesign>,
}

/// Generic multistart harness for a fixed orbit structure: random heads,
/// least-squares weights, then Gauss-Newton. `corner[i]` pins orbit `i` to
/// `A = 1`. It reports the best residual reached; it proves nothing.
pub fn multistart_search<R: Rng>(
    n: usize,
    structure: &[(usize, bool)],
    t: u32,
    starts: usize,
    target: f64,
    rng: &mut R,
) -> Result<MultistartReport, SearchError> {
    let mut best = f64::INFINITY;
    for _ in 0..starts {
        let orbits = structure
            .iter()
            .map(|&(s, corner)| {
                let a = if corner { ExactScalar::one() } else { ExactScalar::from_f64(10f64.powf(rng.gen_range(-1.3..1.3)), 64) };
                Ok((GcvOrbit::new(n, a, s).map_err(DesignError::from)?, ExactScalar::one()))
            })
            .collect::<Result<Vec<_>, SearchError>>()?;
        let seed = WeightedDesign::new(n, Convention::FullOrbit, orbits)?;
        let sys = MomentSystem::new(&seed, t);
        let mut a: Vec<f64> = seed.orbits().iter().map(|(o, _)| o.a2().to_f64()).collect();
        // weights from the linear least-squares problem at fixed heads
        let j = sys.jacobian(&a, &vec![0.0; a.len()]);
        let wcols = j.columns(j.ncols() - a.len(), a.len()).into_owned();
        let rhs = DVector::from_iterator(sys.rows.len(), sys.rows.iter().map(|r| r.1));
        let Ok(w0) = wcols.svd(true, true).solve(&rhs, 1e-14) else { continue };
        let mut w: Vec<f64> = w0.iter().copied().collect();
        if w.iter().any(|&x| x <= 0.0) {
            best = best.min(max_abs(&sys.residuals(&a, &w)));
            continue;
        }
        let opts = RefineOptions { target, seed_limit: f64::INFINITY, max_iterations: 100 };
        match gauss_newton(&sys, &mut a, &mut w, opts) {
            Ok((a, w, res, _)) => {
                let orbits = structure
                    .iter()
                    .enumerate()
                    .map(|(i, &(s, corner))| {
                        let head = if corner { ExactScalar::one() } else { ExactScalar::from_f64(a[i], DEFAULT_PRECISION) };
                        Ok((GcvOrbit::new(n, head, s).map_err(DesignError::from)?, ExactScalar::from_f64(w[i], DEFAULT_PRECISION)))
                    })
                    .collect::<Result<Vec<_>, SearchError>>()?;
                return Ok(MultistartReport {
                    starts,
                    best_residual: res,
                    design: Some(WeightedDesign::new(n, Convention::FullOrbit, orbits)?),
                });
            }
            Err(SearchError::NoConvergence { residual, .. }) => best = best.min(residual),
            Err(SearchError::NegativeWeight { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(MultistartReport { starts, best_residual: best, design: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{verify_design, Mode};
    use rand::SeedableRng;

    #[test]
    fn single_orbit_hits() {
        let r = search_single_orbit_7(30).unwrap();
        let got: Vec<(usize, usize, ExactScalar)> = r.hits.iter().map(|h| (h.n, h.s, h.a2.clone())).collect();
        assert_eq!(got, vec![(16, 8, ExactScalar::int(4)), (23, 11, ExactScalar::int(4))]);
        assert!(search_single_orbit_7(15).unwrap().hits.is_empty());
        for h in &r.hits {
            assert!(!h.f81.is_zero());
        }
        assert_eq!(r.hits[0].f81, ExactScalar::int(-128));
        assert!(search_single_orbit_7(2).is_err());
    }

    #[test]
    fn h_product_is_the_curve() {
        for n in 2..40i64 {
            for s in 0..n {
                let (p, qq, d) = single_orbit_parts(n, s);
                let lhs = &p * &p - &qq * &qq * &d;
                let rhs = big((n - 1) * (n - 1) * (1 + s)) * curve_f(&big(n), &big(s));
                assert_eq!(lhs, rhs, "n={n} s={s}");
            }
        }
    }

    #[test]
    fn curve_points_and_derivatives() {
        let pts = curve_integer_points(30, 30);
        for p in [(2, 1), (1, 0), (16, 8), (23, 11)] {
            assert!(pts.contains(&p), "{p:?} in {pts:?}");
        }
        // (1, 1) also lies on the curve; it is outside n >= 3
        assert_eq!(curve_integer_points(5, 5), vec![(1, 0), (1, 1), (2, 1)]);
        for (x, y) in [(2, 1), (1, 0)] {
            assert!(curve_fx(&big(x), &big(y)).is_zero());
            assert!(curve_fy(&big(x), &big(y)).is_zero());
        }
        // factored f_y equals the expanded form
        for x in -5..6i64 {
            for y in -5..6i64 {
                let expanded = -9 * x.pow(3) + 6 * x * x * (9 * y - 5) + x * (-81 * y * y + 108 * y + 9) - 54 * y * y - 72 * y + 30;
                assert_eq!(curve_fy(&big(x), &big(y)), big(expanded));
            }
        }
    }

    #[test]
    fn discriminant_squares() {
        assert_eq!(discriminant_square_solutions(), vec![(0, -8), (0, 8), (1, -7), (1, 7), (5, -13), (5, 13)]);
        // with n >= 3 only s = 5, n = 11 makes Q vanish, and there P != 0
        let mut with_root = Vec::new();
        for (s, _) in discriminant_square_solutions() {
            for n in q_integer_roots(s).into_iter().filter(|&n| n >= 3) {
                with_root.push((n, s));
                let (p, _, _) = single_orbit_parts(n, s);
                assert_eq!(p, big(-900));
            }
        }
        with_root.dedup();
        assert_eq!(with_root, vec![(11, 5)]);
        assert_eq!(q_integer_roots(0), vec![1, -7]);
    }

    #[test]
    fn tanino_family() {
        assert_eq!(tanino_scan(1).hits, vec![(2, 1, 1)]);
        let r = tanino_scan(40);
        assert_eq!(r.hits.len(), 40);
        assert!(r.hits.iter().all(|&(n, s1, s2)| s1 == s2 && n == 3 * s1 - 1));
        assert!(r.hits.iter().all(|&(n, s1, s2)| tanino_cubic(n, s1, s2) == 0));
        assert_eq!(&r.hits[37..], &[(8, 3, 3), (5, 2, 2), (2, 1, 1)]);
        // with s1 = s2 = 0 the cubic has the root n = 1
        assert_eq!(tanino_cubic(1, 0, 0), 0);
    }

    #[test]
    fn quartic_has_no_integer_roots() {
        assert!(single_orbit_9_quartic_integer_roots().is_empty());
        assert!(single_orbit_9_quartic_roots(10_000).is_empty());
    }

    #[test]
    fn admissible_ranges() {
        let (lo, hi) = admissible_s_range(16);
        assert_eq!((lo, hi), (qr(1500, 198), qr(1500, 156)));
        assert_eq!(admissible_s_values(16), vec![8, 9]);
        assert!(admissible_s_values(3).is_empty());
    }

    #[test]
    fn case_iii_never_occurs() {
        let scan = case_iii_scan(691).unwrap();
        assert!(!scan.cells.is_empty());
        assert!(scan.zero_pairs.is_empty());
        assert!(scan.case_iii.is_empty());
    }

    #[test]
    fn six_s_minus_three_branch() {
        for n in 4..60i64 {
            for s in 1..n {
                let zero = g3_on_f4_line(n, s).is_zero();
                assert_eq!(zero, n == 6 * s - 3 || n == s + 1, "n={n} s={s}");
            }
        }
        for s in 1..200 {
            assert!(head_product_on_branch(s).is_negative());
        }
        for v in golden_candidate_residuals().unwrap() {
            assert_eq!(v, ExactScalar::int(-44));
        }
    }

    fn design(n: usize, conv: Convention, rows: &[(f64, usize, f64)]) -> WeightedDesign {
        let orbits = rows
            .iter()
            .map(|&(a, s, w)| {
                let head = if a == 1.0 { ExactScalar::one() } else { ExactScalar::from_f64(a * a, 64) };
                (GcvOrbit::new(n, head, s).unwrap(), ExactScalar::from_f64(w, 64))
            })
            .collect();
        WeightedDesign::new(n, conv, orbits).unwrap()
    }

    #[test]
    fn refine_table2_row1() {
        let d = design(3, Convention::FullOrbit, &[(0.396751, 1, 0.0220088), (0.470350, 2, 0.0196579)]);
        let r = refine_design(&d, 9, RefineOptions::default()).unwrap();
        assert!(r.final_residual < 1e-12 && r.final_residual <= r.initial_residual);
        let rep = verify_design(&r.design, 9, Mode::float()).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures);
        for ((o0, w0), (o1, w1)) in d.orbits().iter().zip(r.design.orbits()) {
            assert!(((o1.a2().to_f64() - o0.a2().to_f64()) / o0.a2().to_f64()).abs() < 1e-4);
            assert!(((w1.to_f64() - w0.to_f64()) / w0.to_f64()).abs() < 1e-4);
        }
        let a1 = r.design.orbits()[0].0.a2().to_f64();
        let a2 = r.design.orbits()[1].0.a2().to_f64();
        let w1 = r.design.tilde_weights().unwrap()[0].to_f64();
        for x in QuarticSystem::Row1.residuals(a1, a2, w1) {
            assert!(x.abs() < 1e-10, "{x}");
        }
    }

    #[test]
    fn refine_preconditions() {
        let schur = crate::design::WeightedDesign::new(
            4,
            Convention::AntipodalPairs,
            vec![
                (GcvOrbit::new(4, ExactScalar::int(4), 2).unwrap(), ExactScalar::ratio(9, 640)),
                (GcvOrbit::new(4, ExactScalar::one(), 0).unwrap(), ExactScalar::ratio(1, 60)),
                (GcvOrbit::new(4, ExactScalar::one(), 1).unwrap(), ExactScalar::ratio(1, 96)),
                (GcvOrbit::new(4, ExactScalar::one(), 3).unwrap(), ExactScalar::ratio(1, 60)),
            ],
        )
        .unwrap();
        let r = refine_design(&schur, 11, RefineOptions::default()).unwrap();
        assert_eq!(r.design, schur);
        assert_eq!(r.iterations, 0);
        let far = design(3, Convention::FullOrbit, &[(0.5, 1, 0.02), (0.9, 2, 0.02)]);
        assert!(matches!(refine_design(&far, 9, RefineOptions::default()), Err(SearchError::SeedTooFar { .. })));
    }

    #[test]
    fn multistart_finds_a_seven_design() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let rep = multistart_search(3, &[(0, true), (2, false)], 7, 50, 1e-12, &mut rng).unwrap();
        let d = rep.design.expect("a 7-design from v_{1,0} and one v_{a,2}");
        assert!(verify_design(&d, 7, Mode::float()).unwrap().passed());
    }
}
