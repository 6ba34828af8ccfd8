//! Weighted designs made of generalized corner-vector orbits: verification
//! to any degree, weight solving, two-orbit classification at degrees 7 and
//! 9, degree upper bounds and the cross-ratio diagnostic.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::harmonics::{eval_invariant_normalized, invariants_of_degree, HarmonicError, InvariantId};
use crate::moments::{exponent_of, orbit_moment, partitions, sphere_moment};
use crate::orbits::{binomial, GcvOrbit, OrbitError};
use crate::scalars::{ExactScalar, ScalarError, DEFAULT_PRECISION};

/// Default absolute residual tolerance in float mode.
pub const DEFAULT_RESIDUAL_TOL: f64 = 1e-10;
/// Default zero band for sign tests on floats.
pub const DEFAULT_SIGN_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error("orbit {index} lives in dimension {got}, design in {want}")]
    DimensionMismatch { index: usize, got: usize, want: usize },
    #[error("weight {index} is not positive: {value}")]
    NonPositiveWeight { index: usize, value: String },
    #[error("design has no orbits")]
    Empty,
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Harmonic(#[from] HarmonicError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// How a weight multiplies an orbit: once per point, or once per antipodal
/// pair `{x, -x}` (so the effective count is half the orbit size).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Convention {
    #[default]
    #[serde(rename = "full-orbit")]
    FullOrbit,
    #[serde(rename = "antipodal-pairs")]
    AntipodalPairs,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Convention::FullOrbit => "full-orbit",
            Convention::AntipodalPairs => "antipodal-pairs",
        })
    }
}

/// A union of orbits with one positive weight per orbit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDesign", into = "RawDesign")]
pub struct WeightedDesign {
    n: usize,
    convention: Convention,
    orbits: Vec<(GcvOrbit, ExactScalar)>,
}

#[derive(Serialize, Deserialize)]
struct RawEntry {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    a2: Option<ExactScalar>,
    /// The head value `a = sqrt(A)`, accepted on input instead of `A`.
    #[serde(default, skip_serializing)]
    a: Option<ExactScalar>,
    s: usize,
    #[serde(rename = "W")]
    w: ExactScalar,
}

#[derive(Serialize, Deserialize)]
struct RawDesign {
    n: usize,
    #[serde(default)]
    convention: Convention,
    orbits: Vec<RawEntry>,
}

impl TryFrom<RawDesign> for WeightedDesign {
    type Error = DesignError;
    fn try_from(r: RawDesign) -> Result<Self, Self::Error> {
        let orbits = r
            .orbits
            .into_iter()
            .map(|e| {
                let a2 = match (e.a2, e.a) {
                    (Some(a2), None) => a2,
                    (None, Some(a)) if a.is_one() => ExactScalar::one(),
                    (None, Some(a)) => a.try_mul(&a)?,
                    _ => return Err(DesignError::Invalid("each orbit needs exactly one of A and a".into())),
                };
                Ok((GcvOrbit::new(r.n, a2, e.s)?, e.w))
            })
            .collect::<Result<Vec<_>, DesignError>>()?;
        WeightedDesign::new(r.n, r.convention, orbits)
    }
}

impl From<WeightedDesign> for RawDesign {
    fn from(d: WeightedDesign) -> Self {
        RawDesign {
            n: d.n,
            convention: d.convention,
            orbits: d
                .orbits
                .into_iter()
                .map(|(o, w)| RawEntry { a2: Some(o.a2().clone()), a: None, s: o.s(), w })
                .collect(),
        }
    }
}

impl WeightedDesign {
    pub fn new(
        n: usize,
        convention: Convention,
        orbits: Vec<(GcvOrbit, ExactScalar)>,
    ) -> Result<Self, DesignError> {
        if orbits.is_empty() {
            return Err(DesignError::Empty);
        }
        for (i, (o, w)) in orbits.iter().enumerate() {
            if o.n() != n {
                return Err(DesignError::DimensionMismatch { index: i, got: o.n(), want: n });
            }
            if w.sign() <= 0 {
                return Err(DesignError::NonPositiveWeight { index: i, value: w.to_string() });
            }
        }
        Ok(WeightedDesign { n, convention, orbits })
    }

    /// Builds a full-orbit design from weights `W~_i = W_i |orbit_i|`.
    pub fn from_tilde(orbits: Vec<GcvOrbit>, tilde: &[ExactScalar]) -> Result<Self, DesignError> {
        let n = orbits.first().ok_or(DesignError::Empty)?.n();
        let entries = orbits
            .into_iter()
            .zip(tilde)
            .map(|(o, t)| {
                let w = t.try_div(&ExactScalar::from(o.size()))?;
                Ok((o, w))
            })
            .collect::<Result<Vec<_>, DesignError>>()?;
        WeightedDesign::new(n, Convention::FullOrbit, entries)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn orbits(&self) -> &[(GcvOrbit, ExactScalar)] {
        &self.orbits
    }

    /// Number of weighted terms an orbit contributes.
    pub fn effective_count(&self, o: &GcvOrbit) -> BigInt {
        match self.convention {
            Convention::FullOrbit => o.size(),
            Convention::AntipodalPairs => o.size() / 2,
        }
    }

    /// `W~_i = W_i * effective count`, the share of orbit `i` in the mass.
    pub fn tilde_weights(&self) -> Result<Vec<ExactScalar>, ScalarError> {
        self.orbits
            .iter()
            .map(|(o, w)| w.try_mul(&ExactScalar::from(self.effective_count(o))))
            .collect()
    }

    /// `sum W~_i`, which must be 1.
    pub fn mass(&self) -> Result<ExactScalar, ScalarError> {
        self.tilde_weights()?
            .iter()
            .try_fold(ExactScalar::zero(), |acc, w| acc.try_add(w))
    }

    /// The same cubature expressed in another counting convention.
    pub fn with_convention(&self, c: Convention) -> WeightedDesign {
        let factor = match (self.convention, c) {
            (a, b) if a == b => ExactScalar::one(),
            (Convention::FullOrbit, _) => ExactScalar::int(2),
            _ => ExactScalar::ratio(1, 2),
        };
        WeightedDesign {
            n: self.n,
            convention: c,
            orbits: self
                .orbits
                .iter()
                .map(|(o, w)| (o.clone(), w.try_mul(&factor).expect("rational factor")))
                .collect(),
        }
    }

    /// Downgrades surd heads and weights to floats; rationals stay exact so
    /// corner orbits keep their size.
    pub fn to_float(&self, bits: usize) -> WeightedDesign {
        let down = |x: &ExactScalar| match x {
            ExactScalar::Surd(_) => x.to_float_scalar(bits),
            _ => x.clone(),
        };
        WeightedDesign {
            n: self.n,
            convention: self.convention,
            orbits: self
                .orbits
                .iter()
                .map(|(o, w)| (o.with_a2(down(o.a2())).expect("same value"), down(w)))
                .collect(),
        }
    }

    pub fn total_points(&self) -> BigInt {
        self.orbits.iter().map(|(o, _)| o.size()).sum()
    }

    pub fn is_exact(&self) -> bool {
        self.orbits.iter().all(|(o, w)| o.a2().is_exact() && w.is_exact())
    }
}

impl fmt::Display for WeightedDesign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "n = {}, {} convention, {} orbits", self.n, self.convention, self.orbits.len())?;
        for (o, w) in &self.orbits {
            writeln!(f, "  A = {}, s = {}, |orbit| = {}, W = {}", o.a2(), o.s(), o.size(), w)?;
        }
        Ok(())
    }
}

/// Exact arithmetic, or floats of `bits` precision with an absolute
/// residual tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    Exact,
    Float { tol: f64, bits: usize },
}

impl Mode {
    pub fn float() -> Self {
        Mode::Float { tol: DEFAULT_RESIDUAL_TOL, bits: DEFAULT_PRECISION }
    }

    fn fails(&self, r: &ExactScalar) -> bool {
        match self {
            Mode::Exact => !r.is_zero(),
            Mode::Float { tol, .. } => {
                let x = r.to_f64().abs();
                x.is_nan() || x > *tol
            }
        }
    }
}

/// Which set of equations was checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum VerifyPath {
    Moments,
    Invariants,
}

/// One checked equation: its degree, what was tested, and the residual.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residual {
    pub degree: u32,
    pub label: String,
    pub value: ExactScalar,
}

impl Residual {
    fn magnitude(&self) -> f64 {
        self.value.to_f64().abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub n: usize,
    pub requested_degree: u32,
    /// Largest `t' <= requested` for which every equation holds, or `None`
    /// when even the mass fails.
    pub verified_degree: Option<u32>,
    /// Worst residual per checked even degree.
    pub per_degree: Vec<Residual>,
    /// Every failing equation, in degree order.
    pub failures: Vec<Residual>,
    pub exact: bool,
    pub path: VerifyPath,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verified_degree == Some(self.requested_degree)
    }

    pub fn first_failure(&self) -> Option<&Residual> {
        self.failures.first()
    }

    /// Largest residual magnitude over all checked equations.
    pub fn max_residual(&self) -> f64 {
        self.per_degree.iter().map(Residual::magnitude).fold(0.0, f64::max)
    }

    fn build(n: usize, t: u32, by_degree: Vec<(u32, Vec<Residual>)>, mode: Mode, path: VerifyPath) -> Self {
        let mut per_degree = Vec::new();
        let mut failures = Vec::new();
        let mut verified = Some(t);
        for (deg, rs) in by_degree {
            let mut bad: Vec<Residual> = rs.iter().filter(|r| mode.fails(&r.value)).cloned().collect();
            if !bad.is_empty() && verified == Some(t) {
                verified = deg.checked_sub(1);
            }
            failures.append(&mut bad);
            if let Some(w) = rs
                .into_iter()
                .max_by(|a, b| a.magnitude().partial_cmp(&b.magnitude()).unwrap_or(Ordering::Equal))
            {
                per_degree.push(w);
            }
        }
        VerificationReport {
            n,
            requested_degree: t,
            verified_degree: verified,
            per_degree,
            failures,
            exact: mode == Mode::Exact,
            path,
        }
    }
}

fn monomial_label(lambda: &[u32]) -> String {
    let parts: Vec<String> = lambda
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

fn prepared(d: &WeightedDesign, mode: Mode) -> WeightedDesign {
    match mode {
        Mode::Exact => d.clone(),
        Mode::Float { bits, .. } => d.to_float(bits),
    }
}

/// Moment residual `sum_i W~_i avg_{orbit_i} x^lambda - sphere moment`.
pub fn moment_residual(d: &WeightedDesign, tilde: &[ExactScalar], lambda: &[u32]) -> Result<ExactScalar, ScalarError> {
    let mut acc = sphere_moment(d.n, lambda).neg();
    for ((o, _), w) in d.orbits.iter().zip(tilde) {
        acc = acc.try_add(&w.try_mul(&orbit_moment(o, lambda)?)?)?;
    }
    Ok(acc)
}

/// Checks every even monomial of degree `<= t`. Both sides are invariant
/// under coordinate permutations, so one exponent per partition suffices;
/// odd monomials vanish on both sides.
pub fn verify_design(d: &WeightedDesign, t: u32, mode: Mode) -> Result<VerificationReport, DesignError> {
    let d = prepared(d, mode);
    let tilde = d.tilde_weights()?;
    let mut by_degree = Vec::new();
    for half in 0..=t / 2 {
        let lambdas: Vec<Vec<u32>> = partitions(half, d.n).into_iter().map(|mu| exponent_of(&mu, d.n)).collect();
        let rs = lambdas
            .par_iter()
            .map(|l| {
                Ok(Residual {
                    degree: 2 * half,
                    label: monomial_label(l),
                    value: moment_residual(&d, &tilde, l)?,
                })
            })
            .collect::<Result<Vec<_>, ScalarError>>()?;
        by_degree.push((2 * half, rs));
    }
    Ok(VerificationReport::build(d.n, t, by_degree, mode, VerifyPath::Moments))
}

/// The invariant-harmonic test for `t <= 11`: mass 1 and
/// `sum_i W~_i f(v_i) = 0` for every invariant harmonic of degree `<= t`.
pub fn verify_design_invariants(d: &WeightedDesign, t: u32, mode: Mode) -> Result<VerificationReport, DesignError> {
    if t > 11 {
        return Err(DesignError::Invalid(format!("invariant harmonics are only available up to degree 11, got {t}")));
    }
    let d = prepared(d, mode);
    let tilde = d.tilde_weights()?;
    let mass = d.mass()?.try_sub(&ExactScalar::one())?;
    let mut by_degree = vec![(0, vec![Residual { degree: 0, label: "mass".into(), value: mass }])];
    for deg in (2..=t).step_by(2) {
        let mut rs = Vec::new();
        for id in invariants_of_degree(d.n, deg) {
            let mut acc = ExactScalar::zero();
            for ((o, _), w) in d.orbits.iter().zip(&tilde) {
                acc = acc.try_add(&w.try_mul(&eval_invariant_normalized(id, o)?)?)?;
            }
            rs.push(Residual { degree: deg, label: id.label().into(), value: acc });
        }
        if !rs.is_empty() {
            by_degree.push((deg, rs));
        }
    }
    Ok(VerificationReport::build(d.n, t, by_degree, mode, VerifyPath::Invariants))
}

/// Result of [`solve_weights`].
#[derive(Debug, Clone, PartialEq)]
pub enum SolveOutcome {
    /// Unique positive solution; the design uses full-orbit counting.
    Solved { design: WeightedDesign, tilde: Vec<ExactScalar> },
    Infeasible(Infeasibility),
    /// Consistent but underdetermined.
    NonUnique { rank: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub enum Infeasibility {
    /// An equation is left with a nonzero right-hand side after elimination.
    Inconsistent { row: String, residual: ExactScalar },
    /// The unique solution has a weight that is not positive.
    NonPositiveWeight { index: usize, value: ExactScalar },
}

impl fmt::Display for Infeasibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Infeasibility::Inconsistent { row, residual } => {
                write!(f, "row {row} is inconsistent (reduced right-hand side {residual})")
            }
            Infeasibility::NonPositiveWeight { index, value } => {
                write!(f, "weight of orbit {index} is not positive: {value}")
            }
        }
    }
}

/// Zero test used during elimination: exact for exact scalars, a small
/// absolute band for floats.
fn negligible(x: &ExactScalar) -> bool {
    match x {
        ExactScalar::Float(_) => x.to_f64().abs() <= 1e-12,
        _ => x.is_zero(),
    }
}

/// Rows of the linear system `M W~ = b`, lowest degree first.
fn weight_system(orbits: &[GcvOrbit], t: u32) -> Result<Vec<(String, Vec<ExactScalar>, ExactScalar)>, DesignError> {
    let n = orbits[0].n();
    let mut rows = vec![("mass".to_string(), vec![ExactScalar::one(); orbits.len()], ExactScalar::one())];
    if t <= 11 {
        for deg in (4..=t).step_by(2) {
            for id in invariants_of_degree(n, deg) {
                let coeffs = orbits
                    .iter()
                    .map(|o| eval_invariant_normalized(id, o))
                    .collect::<Result<Vec<_>, _>>()?;
                rows.push((id.label().to_string(), coeffs, ExactScalar::zero()));
            }
        }
    } else {
        for half in 1..=t / 2 {
            for mu in partitions(half, n) {
                let l = exponent_of(&mu, n);
                let coeffs = orbits.iter().map(|o| orbit_moment(o, &l)).collect::<Result<Vec<_>, _>>()?;
                rows.push((monomial_label(&l), coeffs, sphere_moment(n, &l)));
            }
        }
    }
    Ok(rows)
}

/// Solves for the orbit weights of a degree-`t` design by exact row
/// reduction, pivoting on the lowest-degree available row.
pub fn solve_weights(orbits: &[GcvOrbit], t: u32) -> Result<SolveOutcome, DesignError> {
    let k = orbits.len();
    if k == 0 {
        return Err(DesignError::Empty);
    }
    let n = orbits[0].n();
    if let Some((i, o)) = orbits.iter().enumerate().find(|(_, o)| o.n() != n) {
        return Err(DesignError::DimensionMismatch { index: i, got: o.n(), want: n });
    }
    let mut rows = weight_system(orbits, t)?;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut used = vec![false; rows.len()];
    for col in 0..k {
        let Some(p) = (0..rows.len()).find(|&r| !used[r] && !negligible(&rows[r].1[col])) else {
            continue;
        };
        used[p] = true;
        let inv = rows[p].1[col].recip()?;
        let (coeffs, rhs) = (&rows[p].1, &rows[p].2);
        let coeffs: Vec<ExactScalar> = coeffs.iter().map(|c| c.try_mul(&inv)).collect::<Result<_, _>>()?;
        let rhs = rhs.try_mul(&inv)?;
        rows[p].1 = coeffs.clone();
        rows[p].2 = rhs.clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r == p || row.1[col].is_zero() {
                continue;
            }
            let f = row.1[col].clone();
            for (x, c) in row.1.iter_mut().zip(&coeffs).take(k) {
                *x = x.try_sub(&f.try_mul(c)?)?;
            }
            row.1[col] = ExactScalar::zero();
            row.2 = row.2.try_sub(&f.try_mul(&rhs)?)?;
        }
        pivots.push((p, col));
    }
    for (r, row) in rows.iter().enumerate() {
        if !used[r] && !negligible(&row.2) {
            return Ok(SolveOutcome::Infeasible(Infeasibility::Inconsistent {
                row: row.0.clone(),
                residual: row.2.clone(),
            }));
        }
    }
    if pivots.len() < k {
        return Ok(SolveOutcome::NonUnique { rank: pivots.len() });
    }
    let mut tilde = vec![ExactScalar::zero(); k];
    for &(r, c) in &pivots {
        tilde[c] = rows[r].2.clone();
    }
    if let Some((index, value)) = tilde.iter().enumerate().find(|(_, w)| w.sign() <= 0) {
        return Ok(SolveOutcome::Infeasible(Infeasibility::NonPositiveWeight { index, value: value.clone() }));
    }
    let design = WeightedDesign::from_tilde(orbits.to_vec(), &tilde)?;
    Ok(SolveOutcome::Solved { design, tilde })
}

/// Cases of the two-orbit classifications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case {
    I,
    II,
    III,
    IV,
    V,
    None,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Case::I => "case-i",
            Case::II => "case-ii",
            Case::III => "case-iii",
            Case::IV => "case-iv",
            Case::V => "case-v",
            Case::None => "none",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub case: Case,
    /// `(W~_1, W~_2)` for cases with a unique positive solution.
    pub tilde_weights: Option<(ExactScalar, ExactScalar)>,
    /// The case cannot occur for these parameters by the elimination
    /// theorems (equal-`s` heads for degree 7; always for degree 9).
    pub theoretically_impossible: bool,
    /// Normalized invariant values `(f(v1), f(v2))` used in the decision.
    pub values: Vec<(InvariantId, ExactScalar, ExactScalar)>,
    pub g_values: Vec<(String, ExactScalar)>,
}

impl Classification {
    /// The full-orbit design with the returned weights.
    pub fn design(&self, o1: &GcvOrbit, o2: &GcvOrbit) -> Option<Result<WeightedDesign, DesignError>> {
        self.tilde_weights
            .as_ref()
            .map(|(w1, w2)| WeightedDesign::from_tilde(vec![o1.clone(), o2.clone()], &[w1.clone(), w2.clone()]))
    }
}

/// Sign and zero tests for classification.
#[derive(Debug, Clone, Copy)]
struct Tester {
    tol: f64,
}

impl Tester {
    fn zero(&self, x: &ExactScalar) -> bool {
        x.sign_tol(self.tol) == 0
    }
    fn opposite(&self, a: &ExactScalar, b: &ExactScalar) -> bool {
        a.sign_tol(self.tol) * b.sign_tol(self.tol) < 0
    }
}

struct Pair {
    vals: Vec<(InvariantId, ExactScalar, ExactScalar)>,
}

impl Pair {
    fn new(o1: &GcvOrbit, o2: &GcvOrbit, ids: &[InvariantId]) -> Result<Self, DesignError> {
        let vals = ids
            .iter()
            .map(|&id| Ok((id, eval_invariant_normalized(id, o1)?, eval_invariant_normalized(id, o2)?)))
            .collect::<Result<Vec<_>, DesignError>>()?;
        Ok(Pair { vals })
    }

    fn get(&self, id: InvariantId) -> (&ExactScalar, &ExactScalar) {
        let v = self.vals.iter().find(|v| v.0 == id).expect("requested invariant");
        (&v.1, &v.2)
    }

    /// `G_{p,q} = f_p(v1) f_q(v2) - f_q(v1) f_p(v2)`.
    fn g(&self, p: InvariantId, q: InvariantId) -> Result<ExactScalar, ScalarError> {
        let (p1, p2) = self.get(p);
        let (q1, q2) = self.get(q);
        p1.try_mul(q2)?.try_sub(&q1.try_mul(p2)?)
    }

    /// Table weights `W~_1 = f(v2)/(f(v2)-f(v1))`, `W~_2 = -f(v1)/(f(v2)-f(v1))`.
    fn weights(&self, id: InvariantId) -> Result<(ExactScalar, ExactScalar), ScalarError> {
        let (f1, f2) = self.get(id);
        let den = f2.try_sub(f1)?;
        Ok((f2.try_div(&den)?, f1.neg().try_div(&den)?))
    }

    fn both_zero(&self, id: InvariantId, t: Tester) -> bool {
        let (a, b) = self.get(id);
        t.zero(a) && t.zero(b)
    }

    fn opposite(&self, id: InvariantId, t: Tester) -> bool {
        let (a, b) = self.get(id);
        t.opposite(a, b)
    }
}

fn check_pair(o1: &GcvOrbit, o2: &GcvOrbit) -> Result<(), DesignError> {
    if o1.n() != o2.n() {
        return Err(DesignError::DimensionMismatch { index: 1, got: o2.n(), want: o1.n() });
    }
    if o1.n() < 3 {
        return Err(DesignError::Invalid(format!("classification needs n >= 3, got {}", o1.n())));
    }
    Ok(())
}

/// Sign zero band: exact comparisons in exact mode, `tol` on floats.
fn tester(mode: Mode) -> Tester {
    match mode {
        Mode::Exact => Tester { tol: 0.0 },
        Mode::Float { tol, .. } => Tester { tol },
    }
}

/// Two-orbit 7-designs: which of the three cases holds.
pub fn classify_7(o1: &GcvOrbit, o2: &GcvOrbit, mode: Mode) -> Result<Classification, DesignError> {
    use InvariantId::*;
    check_pair(o1, o2)?;
    let t = tester(mode);
    let p = Pair::new(o1, o2, &[F4, F6])?;
    let g46 = p.g(F4, F6)?;
    let g_values = vec![("G4,6".to_string(), g46.clone())];
    let mut out = Classification {
        case: Case::None,
        tilde_weights: None,
        theoretically_impossible: false,
        values: p.vals.clone(),
        g_values,
    };
    if o1 == o2 {
        return Ok(out);
    }
    if p.opposite(F4, t) && t.zero(&g46) {
        out.case = Case::I;
        out.tilde_weights = Some(p.weights(F4)?);
    } else if p.both_zero(F4, t) && p.opposite(F6, t) {
        out.case = Case::II;
        out.tilde_weights = Some(p.weights(F6)?);
    } else if p.both_zero(F4, t) && p.both_zero(F6, t) {
        out.case = Case::III;
        out.theoretically_impossible = o1.s() != o2.s();
    }
    Ok(out)
}

/// Two-orbit 9-designs: which of the five cases holds. In dimension 3 the
/// conditions on `f8,2` are dropped (it does not exist), and cases iv and v
/// merge into v.
pub fn classify_9(o1: &GcvOrbit, o2: &GcvOrbit, mode: Mode) -> Result<Classification, DesignError> {
    use InvariantId::*;
    check_pair(o1, o2)?;
    let t = tester(mode);
    let has82 = o1.n() >= 4;
    let ids: Vec<InvariantId> = if has82 { vec![F4, F6, F81, F82] } else { vec![F4, F6, F81] };
    let p = Pair::new(o1, o2, &ids)?;
    let mut g_values = Vec::new();
    let mut g = |a: InvariantId, b: InvariantId| -> Result<ExactScalar, ScalarError> {
        let v = p.g(a, b)?;
        g_values.push((format!("G{},{}", &a.label()[1..], &b.label()[1..]), v.clone()));
        Ok(v)
    };
    let g46 = g(F4, F6)?;
    let g481 = g(F4, F81)?;
    let g681 = g(F6, F81)?;
    let (g482, g682, g8182) = if has82 {
        (Some(g(F4, F82)?), Some(g(F6, F82)?), Some(g(F81, F82)?))
    } else {
        (None, None, None)
    };
    let zero_opt = |x: &Option<ExactScalar>| x.as_ref().is_none_or(|v| t.zero(v));
    let mut out = Classification {
        case: Case::None,
        tilde_weights: None,
        theoretically_impossible: false,
        values: p.vals.clone(),
        g_values,
    };
    if o1 == o2 {
        return Ok(out);
    }
    let z4 = p.both_zero(F4, t);
    let z6 = p.both_zero(F6, t);
    let z81 = p.both_zero(F81, t);
    if p.opposite(F4, t) && t.zero(&g46) && t.zero(&g481) && zero_opt(&g482) {
        out.case = Case::I;
        out.tilde_weights = Some(p.weights(F4)?);
    } else if z4 && p.opposite(F6, t) && t.zero(&g681) && zero_opt(&g682) {
        out.case = Case::II;
        out.tilde_weights = Some(p.weights(F6)?);
    } else if z4 && z6 && p.opposite(F81, t) && zero_opt(&g8182) {
        out.case = Case::III;
        out.tilde_weights = Some(p.weights(F81)?);
    } else if has82 && z4 && z6 && z81 && p.opposite(F82, t) {
        out.case = Case::IV;
        out.tilde_weights = Some(p.weights(F82)?);
    } else if z4 && z6 && z81 && (!has82 || p.both_zero(F82, t)) {
        out.case = Case::V;
    }
    out.theoretically_impossible = matches!(out.case, Case::III | Case::IV | Case::V);
    Ok(out)
}

/// Which result supplies a degree bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BoundSource {
    /// The dimension-3 bound 17.
    Sphere2,
    /// The general bound 15 for `n >= 4` (cross-ratio comparison when some
    /// `s >= 3`).
    General,
    /// Bound 7 for `n >= 8` with all `s <= 2`, from `f8,1`.
    Harmonic8,
    /// Bound `2n - 1` when all `s <= n - 2`, via the simplex.
    Simplex,
}

/// Every applicable bound with its source: the general bound (17 for
/// `n = 3`, 15 otherwise), 7 for `n >= 8` with all `s <= 2`, and `2n - 1`
/// when all `s <= n - 2`.
pub fn lemma_bounds(n: usize, s_list: &[usize]) -> Result<Vec<(BoundSource, u32)>, DesignError> {
    if n < 3 {
        return Err(DesignError::Invalid(format!("degree bounds need n >= 3, got {n}")));
    }
    if let Some(&s) = s_list.iter().find(|&&s| s > n - 1) {
        return Err(DesignError::Invalid(format!("tail length {s} exceeds n - 1 = {}", n - 1)));
    }
    let mut out = vec![if n == 3 { (BoundSource::Sphere2, 17) } else { (BoundSource::General, 15) }];
    if n >= 8 && s_list.iter().all(|&s| s <= 2) {
        out.push((BoundSource::Harmonic8, 7));
    }
    if s_list.iter().all(|&s| s + 2 <= n) {
        out.push((BoundSource::Simplex, 2 * n as u32 - 1));
    }
    Ok(out)
}

/// The smallest applicable bound and where it comes from (the earliest
/// source wins ties).
pub fn degree_upper_bound_with_source(n: usize, s_list: &[usize]) -> Result<(u32, BoundSource), DesignError> {
    let all = lemma_bounds(n, s_list)?;
    let best = all.iter().fold(all[0], |b, &c| if c.1 < b.1 { c } else { b });
    Ok((best.1, best.0))
}

pub fn degree_upper_bound(n: usize, s_list: &[usize]) -> Result<u32, DesignError> {
    Ok(degree_upper_bound_with_source(n, s_list)?.0)
}

/// `sum_i W_i 2^{s_i} C(n-4, s_i-3) A_i (A_i-1)^2` over orbits with
/// `s_i >= 3`; a positive value rules out degree 16 or more.
pub fn cross_ratio_check(d: &WeightedDesign) -> Result<ExactScalar, DesignError> {
    if d.n < 4 {
        return Err(DesignError::Invalid(format!("cross-ratio check needs n >= 4, got {}", d.n)));
    }
    let mut acc = ExactScalar::zero();
    for (o, w) in &d.orbits {
        if o.s() < 3 {
            continue;
        }
        let a = o.a2();
        let am1 = a.try_sub(&ExactScalar::one())?;
        let c = binomial((d.n - 4) as u64, (o.s() - 3) as u64) << o.s();
        let term = w.try_mul(&ExactScalar::from(c))?.try_mul(a)?.try_mul(&am1.try_mul(&am1)?)?;
        acc = acc.try_add(&term)?;
    }
    Ok(acc)
}

/// Total point count as `u64` where it fits.
pub fn point_count(d: &WeightedDesign) -> Option<u64> {
    d.total_points().to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn orbit(n: usize, a2: &str, s: usize) -> GcvOrbit {
        GcvOrbit::new(n, a2.parse().unwrap(), s).unwrap()
    }

    fn x(s: &str) -> ExactScalar {
        s.parse().unwrap()
    }

    pub(crate) fn schur() -> WeightedDesign {
        WeightedDesign::new(
            4,
            Convention::AntipodalPairs,
            vec![
                (orbit(4, "4", 2), x("9/640")),
                (orbit(4, "1", 0), x("1/60")),
                (orbit(4, "1", 1), x("1/96")),
                (orbit(4, "1", 3), x("1/60")),
            ],
        )
        .unwrap()
    }

    #[test]
    fn schur_is_an_exact_11_design() {
        let d = schur();
        assert!(d.mass().unwrap().is_one());
        let r = verify_design(&d, 11, Mode::Exact).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let r = verify_design(&d, 12, Mode::Exact).unwrap();
        assert_eq!(r.verified_degree, Some(11));
        assert_eq!(r.first_failure().unwrap().degree, 12);
        let fast = verify_design_invariants(&d, 11, Mode::Exact).unwrap();
        assert!(fast.passed());
        // Under full-orbit counting the same numbers have mass 2.
        let full = WeightedDesign::new(4, Convention::FullOrbit, d.orbits().to_vec()).unwrap();
        assert_eq!(full.mass().unwrap(), ExactScalar::int(2));
        let r = verify_design(&full, 3, Mode::Exact).unwrap();
        assert_eq!(r.verified_degree, None);
        assert!(verify_design(&d.with_convention(Convention::FullOrbit), 11, Mode::Exact).unwrap().passed());
    }

    #[test]
    fn float_mode_agrees() {
        let r = verify_design(&schur(), 11, Mode::float()).unwrap();
        assert!(r.passed() && !r.exact);
        assert!(r.max_residual() < 1e-60);
    }

    #[test]
    fn octahedron_and_single_orbit_designs() {
        let d = WeightedDesign::new(3, Convention::FullOrbit, vec![(orbit(3, "1", 0), x("1/6"))]).unwrap();
        assert!(verify_design(&d, 3, Mode::Exact).unwrap().passed());
        assert_eq!(verify_design(&d, 5, Mode::Exact).unwrap().verified_degree, Some(3));
        let o = orbit(16, "4", 8);
        let w = ExactScalar::one().try_div(&ExactScalar::from(o.size())).unwrap();
        let d = WeightedDesign::new(16, Convention::FullOrbit, vec![(o.clone(), w)]).unwrap();
        assert!(verify_design(&d, 7, Mode::Exact).unwrap().passed());
        let r = verify_design_invariants(&d, 9, Mode::Exact).unwrap();
        assert_eq!(r.verified_degree, Some(7));
        let f81 = r.failures.iter().find(|f| f.label == "f8,1").unwrap();
        // f~ = -128 at A + s = 12, so the normalized value is -128/12^4
        assert_eq!(f81.value, ExactScalar::ratio(-128, 20736));
        assert!(!verify_design(&d, 9, Mode::Exact).unwrap().passed());
    }

    #[test]
    fn solve_schur_weights() {
        let orbits: Vec<GcvOrbit> = schur().orbits().iter().map(|(o, _)| o.clone()).collect();
        let SolveOutcome::Solved { design, .. } = solve_weights(&orbits, 11).unwrap() else {
            panic!("expected a solution");
        };
        assert_eq!(design, schur().with_convention(Convention::FullOrbit));
        let SolveOutcome::Solved { design, .. } = solve_weights(&orbits, 13).unwrap_or(SolveOutcome::NonUnique { rank: 0 }) else {
            // degree 13 is out of reach: anything but a solution is fine
            return;
        };
        panic!("unexpected 13-design {design}");
    }

    #[test]
    fn solve_edge_cases() {
        let o = orbit(3, "1", 0);
        let SolveOutcome::Solved { design, .. } = solve_weights(&[o], 1).unwrap() else { panic!() };
        assert_eq!(design.orbits()[0].1, x("1/6"));
        let out = solve_weights(&[orbit(3, "1", 0), orbit(3, "1", 2)], 7).unwrap();
        match out {
            SolveOutcome::Infeasible(Infeasibility::Inconsistent { row, .. }) => assert_eq!(row, "f6"),
            other => panic!("{other:?}"),
        }
        let g = Pair::new(&orbit(3, "1", 0), &orbit(3, "1", 2), &[InvariantId::F4, InvariantId::F6]).unwrap();
        assert_eq!(g.g(InvariantId::F4, InvariantId::F6).unwrap(), x("22/9"));
        let out = solve_weights(&[orbit(3, "1", 1), orbit(3, "1", 1)], 3).unwrap();
        assert_eq!(out, SolveOutcome::NonUnique { rank: 1 });
    }

    #[test]
    fn classify_7_examples() {
        let o1 = orbit(3, "1", 0);
        let o2 = orbit(3, "4-sqrt(15)", 2);
        let c = classify_7(&o1, &o2, Mode::Exact).unwrap();
        assert_eq!(c.case, Case::I);
        let (w1, w2) = c.tilde_weights.clone().unwrap();
        assert!((w1.to_f64() - 0.27846).abs() < 1e-5);
        assert!((w2.to_f64() - 0.72154).abs() < 1e-5);
        let d = c.design(&o1, &o2).unwrap().unwrap();
        assert!(verify_design(&d, 7, Mode::Exact).unwrap().passed());
        assert_eq!(classify_7(&o1, &orbit(3, "1", 2), Mode::Exact).unwrap().case, Case::None);
        let o = orbit(3, "1", 1);
        assert_eq!(classify_7(&o, &o, Mode::Exact).unwrap().case, Case::None);
        // G4,6 for this pair is -11 (A^2 - 8A + 1)/(A+2)^3
        let a = x("3");
        let g = classify_7(&o1, &orbit(3, "3", 2), Mode::Exact).unwrap().g_values[0].1.clone();
        let want = ExactScalar::int(-11 * (9 - 24 + 1)).try_div(&a.try_add(&x("2")).unwrap().pow_int(3).unwrap()).unwrap();
        assert_eq!(g, want);
    }

    #[test]
    fn classify_9_examples() {
        let c = classify_9(&orbit(5, "(3+sqrt(7))/2", 2), &orbit(5, "(3-sqrt(7))/2", 2), Mode::Exact);
        // the two heads live in the same field, so the check is exact
        let c = c.unwrap();
        assert_ne!(c.case, Case::III);
        assert!(!c.values.iter().find(|v| v.0 == InvariantId::F6).unwrap().1.is_zero());
        let o = orbit(4, "3", 1);
        assert_eq!(classify_9(&o, &o, Mode::Exact).unwrap().case, Case::None);
        let o1 = orbit(3, "1", 0);
        let o2 = orbit(3, "4-sqrt(15)", 2);
        assert_eq!(classify_9(&o1, &o2, Mode::Exact).unwrap().case, Case::None);
    }

    #[test]
    fn bounds() {
        for n in 4..=9 {
            // a full-support orbit keeps only the general bound
            assert_eq!(degree_upper_bound(n, &[0, 3, n - 1]).unwrap(), 15);
            let want = [7, 9, 11, 13, 7, 7][n - 4];
            assert_eq!(degree_upper_bound(n, &[0, 1, 2]).unwrap(), want, "n={n}");
            let per = lemma_bounds(n, &[0, 1, 2]).unwrap();
            assert!(per.contains(&(BoundSource::Simplex, 2 * n as u32 - 1)));
            assert_eq!(per.iter().any(|b| b.0 == BoundSource::Harmonic8), n >= 8);
        }
        // s = 3 <= n - 2 still admits the simplex bound
        assert_eq!(degree_upper_bound(5, &[0, 3]).unwrap(), 9);
        assert_eq!(degree_upper_bound(3, &[0, 2]).unwrap(), 17);
        assert_eq!(degree_upper_bound(3, &[0, 1]).unwrap(), 5);
        assert!(degree_upper_bound(4, &[4]).is_err());
    }

    #[test]
    fn cross_ratio() {
        assert!(cross_ratio_check(&schur()).unwrap().is_zero());
        let d = WeightedDesign::new(5, Convention::FullOrbit, vec![(orbit(5, "4", 3), x("1/7"))]).unwrap();
        assert_eq!(cross_ratio_check(&d).unwrap(), x("288/7"));
    }

    #[test]
    fn json_round_trip() {
        let json = r#"{"n":4,"convention":"antipodal-pairs","orbits":[{"A":"4","s":2,"W":"9/640"},{"A":"1","s":0,"W":"1/60"},{"A":"1","s":1,"W":"1/96"},{"A":"1","s":3,"W":"1/60"}]}"#;
        let d: WeightedDesign = serde_json::from_str(json).unwrap();
        assert_eq!(d, schur());
        let back: WeightedDesign = serde_json::from_str(&serde_json::to_string(&d).unwrap()).unwrap();
        assert_eq!(back, d);
        let bad = r#"{"n":4,"orbits":[{"A":"4","s":2,"W":"-1"}]}"#;
        assert!(serde_json::from_str::<WeightedDesign>(bad).is_err());
    }
}
