//! Hilbert identities `c (X_1^2+...+X_n^2)^t = sum c_i (a_i . X)^{2t}` and
//! their equivalence with spherical designs of index `2t`.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::{verify_design, Convention, DesignError, Mode, WeightedDesign};
use crate::moments::{compositions, sphere_moment};
use crate::orbits::{OrbitError, Slot, DEFAULT_CAP};
use crate::scalars::{ExactScalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HilbertError {
    #[error("the design fails at index {index}: {detail}")]
    NotAnIndexDesign { index: u32, detail: String },
    #[error("orbit head A = {0} has no square root in a quadratic field")]
    NonQuadraticForm(String),
    #[error("identity has mixed surd fields: {0}")]
    MixedFields(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// One summand `coef * (form . X)^{2t}`; `group` tags the orbit it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertTerm {
    pub coef: ExactScalar,
    pub form: Vec<ExactScalar>,
    #[serde(default)]
    pub group: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertIdentity {
    pub n: usize,
    pub t: u32,
    pub c: ExactScalar,
    pub terms: Vec<HilbertTerm>,
}

impl HilbertIdentity {
    /// All data rational.
    pub fn is_rational(&self) -> bool {
        self.c.as_rational().is_some()
            && self
                .terms
                .iter()
                .all(|t| t.coef.as_rational().is_some() && t.form.iter().all(|a| a.as_rational().is_some()))
    }

    /// Applies a permutation of the variables to every form.
    pub fn permuted(&self, perm: &[usize]) -> HilbertIdentity {
        let terms = self
            .terms
            .iter()
            .map(|t| HilbertTerm {
                coef: t.coef.clone(),
                form: perm.iter().map(|&p| t.form[p].clone()).collect(),
                group: t.group,
            })
            .collect();
        HilbertIdentity { n: self.n, t: self.t, c: self.c.clone(), terms }
    }
}

/// `c_{n,t}`: the normalized sphere moment of `y_1^{2t}`.
pub fn c_nt(n: usize, t: u32) -> ExactScalar {
    let mut lambda = vec![0u32; n.max(1)];
    lambda[0] = 2 * t;
    sphere_moment(n, &lambda)
}

/// `m!/prod alpha_j!`.
pub fn multinomial(alpha: &[u32]) -> BigInt {
    let m: u32 = alpha.iter().sum();
    let fact = |k: u32| (1..=k as u64).fold(BigInt::one(), |acc, i| acc * i);
    alpha.iter().fold(fact(m), |acc, &a| acc / fact(a))
}

/// Signed permutations of `base`, one per antipodal pair (the first
/// nonzero entry positive), in lexicographic order.
pub fn orbit_forms(base: &[i64]) -> Vec<Vec<i64>> {
    let mut mags: Vec<i64> = base.iter().map(|x| x.abs()).collect();
    mags.sort_unstable();
    let perms = crate::harmonics::distinct_permutations(&mags.iter().map(|&x| x as u32).collect::<Vec<_>>());
    let mut out = Vec::new();
    for p in perms {
        let support: Vec<usize> = (0..p.len()).filter(|&i| p[i] != 0).collect();
        for mask in 0u64..(1 << support.len()) {
            let mut v: Vec<i64> = p.iter().map(|&x| x as i64).collect();
            for (b, &i) in support.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    v[i] = -v[i];
                }
            }
            if v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
                out.push(v);
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// The identity as printed for Schur's design:
/// `22680 (sum X_i^2)^5 = sum_48 (2X_i +- X_j +- X_k)^10 + 9 sum_4 (2X_i)^10
///  + 180 sum_12 (X_i +- X_j)^10 + 9 sum_8 (X_1 +- X_2 +- X_3 +- X_4)^10`.
pub fn schur_identity() -> HilbertIdentity {
    let groups: [(&[i64], i64); 4] = [(&[2, 1, 1, 0], 1), (&[2, 0, 0, 0], 9), (&[1, 1, 0, 0], 180), (&[1, 1, 1, 1], 9)];
    let mut terms = Vec::new();
    for (g, (base, coef)) in groups.iter().enumerate() {
        for f in orbit_forms(base) {
            terms.push(HilbertTerm {
                coef: ExactScalar::int(*coef),
                form: f.into_iter().map(ExactScalar::int).collect(),
                group: g,
            });
        }
    }
    HilbertIdentity { n: 4, t: 5, c: ExactScalar::int(22680), terms }
}

/// A failing monomial (exponent vector) and `rhs - lhs` there.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientResidual {
    pub monomial: Vec<u32>,
    pub residual: ExactScalar,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub passed: bool,
    pub monomials_checked: usize,
    /// Every monomial whose coefficients differ, sorted by monomial.
    pub failures: Vec<CoefficientResidual>,
    pub worst: Option<CoefficientResidual>,
}

fn add_into(map: &mut HashMap<Vec<u32>, ExactScalar>, k: Vec<u32>, v: ExactScalar) -> Result<(), ScalarError> {
    match map.get_mut(&k) {
        Some(e) => *e = e.try_add(&v)?,
        None => {
            map.insert(k, v);
        }
    }
    Ok(())
}

/// `coef * (form . X)^{2t}` expanded over the form's support only.
fn expand_term(n: usize, two_t: u32, term: &HilbertTerm) -> Result<HashMap<Vec<u32>, ExactScalar>, ScalarError> {
    let support: Vec<usize> = (0..n).filter(|&i| !term.form[i].is_zero()).collect();
    let mut out = HashMap::new();
    if support.is_empty() {
        return Ok(out);
    }
    let powers: Vec<Vec<ExactScalar>> = support
        .iter()
        .map(|&i| {
            let mut p = vec![ExactScalar::one()];
            for k in 1..=two_t as usize {
                let next = p[k - 1].try_mul(&term.form[i])?;
                p.push(next);
            }
            Ok(p)
        })
        .collect::<Result<_, ScalarError>>()?;
    for alpha in compositions(two_t, support.len()) {
        let mut c = term.coef.try_mul(&ExactScalar::from(multinomial(&alpha)))?;
        for (j, &a) in alpha.iter().enumerate() {
            c = c.try_mul(&powers[j][a as usize])?;
        }
        let mut mono = vec![0u32; n];
        for (j, &i) in support.iter().enumerate() {
            mono[i] = alpha[j];
        }
        add_into(&mut out, mono, c)?;
    }
    Ok(out)
}

/// Per-term contributions to one monomial's coefficient.
pub fn contributions(h: &HilbertIdentity, monomial: &[u32]) -> Result<Vec<(usize, ExactScalar)>, ScalarError> {
    let mut out = Vec::new();
    for (i, term) in h.terms.iter().enumerate() {
        if monomial.iter().zip(&term.form).any(|(&e, a)| e > 0 && a.is_zero()) {
            continue;
        }
        let mut c = term.coef.try_mul(&ExactScalar::from(multinomial(monomial)))?;
        for (&e, a) in monomial.iter().zip(&term.form) {
            c = c.try_mul(&a.pow_int(e as i64)?)?;
        }
        out.push((i, c));
    }
    Ok(out)
}

/// Expands both sides and compares every monomial that either side reaches.
pub fn verify_identity(h: &HilbertIdentity) -> Result<IdentityReport, HilbertError> {
    let two_t = 2 * h.t;
    if let Some(bad) = h.terms.iter().position(|t| t.form.len() != h.n) {
        return Err(HilbertError::Invalid(format!("term {bad} has the wrong number of coefficients")));
    }
    let parts = h
        .terms
        .par_iter()
        .map(|t| expand_term(h.n, two_t, t))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rhs: HashMap<Vec<u32>, ExactScalar> = HashMap::new();
    for p in parts {
        for (k, v) in p {
            add_into(&mut rhs, k, v)?;
        }
    }
    let mut lhs: HashMap<Vec<u32>, ExactScalar> = HashMap::new();
    for beta in compositions(h.t, h.n) {
        let c = h.c.try_mul(&ExactScalar::from(multinomial(&beta)))?;
        add_into(&mut lhs, beta.iter().map(|b| 2 * b).collect(), c)?;
    }
    let mut keys: Vec<Vec<u32>> = lhs.keys().chain(rhs.keys()).cloned().collect();
    keys.sort_unstable_by(|a, b| b.cmp(a));
    keys.dedup();
    let mut failures = Vec::new();
    for k in &keys {
        let l = lhs.get(k).cloned().unwrap_or_else(ExactScalar::zero);
        let r = rhs.get(k).cloned().unwrap_or_else(ExactScalar::zero);
        let diff = r.try_sub(&l)?;
        let fails = match &diff {
            ExactScalar::Float(_) => diff.to_f64().abs() > 1e-9 * l.to_f64().abs().max(1.0),
            _ => !diff.is_zero(),
        };
        if fails {
            failures.push(CoefficientResidual { monomial: k.clone(), residual: diff });
        }
    }
    let worst = failures
        .iter()
        .max_by(|a, b| a.residual.abs().to_f64().total_cmp(&b.residual.abs().to_f64()))
        .cloned();
    Ok(IdentityReport { passed: failures.is_empty(), monomials_checked: keys.len(), failures, worst })
}

/// `sqrt(x)` for a rational `x`, as a rational or a quadratic surd.
fn sqrt_exact(x: &ExactScalar) -> Result<ExactScalar, HilbertError> {
    match x {
        ExactScalar::Rational(r) => Ok(ExactScalar::sqrt_rational(r)?),
        _ => Err(HilbertError::NonQuadraticForm(x.to_string())),
    }
}

/// Converts a design of index `2t` into its Hilbert identity: one term per
/// antipodal pair with form `w = (a, 1, ..., 1, 0, ...)` up to signs and
/// order (`a = sqrt(A)`), coefficient `2 w(x) / |w|^{2t}` where `w(x)` is
/// the per-point weight. With `clear`, the identity is scaled to coprime
/// integers and perfect `2t`-th powers are moved into the forms.
pub fn design_to_identity(d: &WeightedDesign, t: u32, clear: bool) -> Result<HilbertIdentity, HilbertError> {
    let rep = verify_design(d, 2 * t, Mode::Exact)?;
    if let Some(f) = rep.failures.iter().find(|f| f.degree == 2 * t || f.degree == 0) {
        return Err(HilbertError::NotAnIndexDesign { index: 2 * t, detail: format!("{} residual {}", f.label, f.value) });
    }
    let n = d.n();
    let mut terms = Vec::new();
    for (g, (o, w)) in d.orbits().iter().enumerate() {
        let a = sqrt_exact(o.a2())?;
        let norm2 = o.norm2();
        let per_point = match d.convention() {
            Convention::FullOrbit => w.clone(),
            Convention::AntipodalPairs => w.try_div(&ExactScalar::int(2))?,
        };
        let coef = per_point.scale_int(2).try_div(&norm2.pow_int(t as i64)?)?;
        for p in o.enumerate(DEFAULT_CAP)? {
            // keep the pair member whose first nonzero sign is positive
            if p.signs.iter().find(|&&s| s != 0).is_some_and(|&s| s < 0) {
                continue;
            }
            let form = p
                .signs
                .iter()
                .zip(&p.slots)
                .map(|(&s, slot)| match slot {
                    Slot::Zero => ExactScalar::zero(),
                    Slot::Tail => ExactScalar::int(s as i64),
                    Slot::Head => a.scale_int(s as i64),
                })
                .collect();
            terms.push(HilbertTerm { coef: coef.clone(), form, group: g });
        }
    }
    let mut h = HilbertIdentity { n, t, c: c_nt(n, t), terms };
    if clear {
        h = clear_denominators(&h)?;
    }
    check_fields(&h)?;
    Ok(h)
}

fn check_fields(h: &HilbertIdentity) -> Result<(), HilbertError> {
    let mut field: Option<BigInt> = None;
    for t in &h.terms {
        for a in t.form.iter().chain(std::iter::once(&t.coef)) {
            if let Some((_, _, d)) = a.surd_parts().filter(|_| a.as_rational().is_none()) {
                match &field {
                    None => field = Some(d),
                    Some(f) if *f == d => {}
                    Some(f) => return Err(HilbertError::MixedFields(format!("sqrt({f}) and sqrt({d})"))),
                }
            }
        }
    }
    Ok(())
}

/// Scales to coprime integer coefficients (when all coefficients are
/// rational) and moves perfect `2t`-th power factors into the forms.
pub fn clear_denominators(h: &HilbertIdentity) -> Result<HilbertIdentity, HilbertError> {
    let mut rats: Vec<BigRational> = Vec::new();
    for x in std::iter::once(&h.c).chain(h.terms.iter().map(|t| &t.coef)) {
        match x.as_rational() {
            Some(r) => rats.push(r.clone()),
            None => return Ok(h.clone()),
        }
    }
    let lcm = rats.iter().fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
    let ints: Vec<BigInt> = rats.iter().map(|r| (r * BigRational::from_integer(lcm.clone())).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let ints: Vec<BigInt> = ints.iter().map(|x| x / &g).collect();
    let two_t = 2 * h.t;
    let terms = h
        .terms
        .iter()
        .zip(&ints[1..])
        .map(|(t, c)| {
            let (k, rest) = extract_power(c, two_t);
            HilbertTerm {
                coef: ExactScalar::from(rest),
                form: t.form.iter().map(|a| a.scale_int(k)).collect(),
                group: t.group,
            }
        })
        .collect();
    Ok(HilbertIdentity { n: h.n, t: h.t, c: ExactScalar::from(ints[0].clone()), terms })
}

/// Largest `k` with `k^e | c`, and `c / k^e`.
fn extract_power(c: &BigInt, e: u32) -> (i64, BigInt) {
    let mut best = (1i64, c.clone());
    if e == 0 {
        return best;
    }
    let mut k = 2i64;
    loop {
        let p = BigInt::from(k).pow(e);
        if &p > c {
            break;
        }
        if (c % &p).is_zero() {
            best = (k, c / &p);
        }
        k += 1;
    }
    best
}

/// `cos(deg)` and `sin(deg)` for angles that are multiples of 30 or 45
/// degrees.
fn unit_vector(deg: i64) -> Result<(ExactScalar, ExactScalar), HilbertError> {
    let deg = deg.rem_euclid(360);
    let half = ExactScalar::ratio(1, 2);
    let r2 = "sqrt(2)/2".parse::<ExactScalar>()?;
    let r3 = "sqrt(3)/2".parse::<ExactScalar>()?;
    let first = |d: i64| -> Option<(ExactScalar, ExactScalar)> {
        Some(match d {
            0 => (ExactScalar::one(), ExactScalar::zero()),
            30 => (r3.clone(), half.clone()),
            45 => (r2.clone(), r2.clone()),
            60 => (half.clone(), r3.clone()),
            90 => (ExactScalar::zero(), ExactScalar::one()),
            _ => return None,
        })
    };
    let (q, r) = (deg / 90, deg % 90);
    let (c, s) = first(r).ok_or_else(|| HilbertError::Invalid(format!("angle {deg} is not exact")))?;
    // rotate by q quarter turns
    Ok(match q {
        0 => (c, s),
        1 => (s.neg(), c),
        2 => (c.neg(), s.neg()),
        _ => (s, c.neg()),
    })
}

/// The regular `4k`-gon (`k` in 1..=3, vertices at angles `j pi/(2k)`) as
/// an index-`2t` identity in two variables: `2k` pair forms with
/// coefficient `1/(2k)` each.
pub fn polygon_identity(k: usize, t: u32) -> Result<HilbertIdentity, HilbertError> {
    if !(1..=3).contains(&k) {
        return Err(HilbertError::Invalid(format!("exact vertices need k in 1..=3, got {k}")));
    }
    let step = 90 / k as i64;
    let coef = ExactScalar::ratio(1, 2 * k as i64);
    let terms = (0..2 * k as i64)
        .map(|j| {
            let (c, s) = unit_vector(j * step)?;
            Ok(HilbertTerm { coef: coef.clone(), form: vec![c, s], group: 0 })
        })
        .collect::<Result<Vec<_>, HilbertError>>()?;
    Ok(HilbertIdentity { n: 2, t, c: c_nt(2, t), terms })
}

/// Flags a verified identity built from generalized corner-vector forms
/// with `t >= 8`, which the degree bound says cannot exist.
pub fn bound_tripwire(h: &HilbertIdentity, report: &IdentityReport) -> Option<String> {
    if !report.passed || h.t < 8 || h.n < 4 {
        return None;
    }
    let corner = h.terms.iter().all(|t| {
        let mut mags: BTreeMap<String, usize> = BTreeMap::new();
        for a in t.form.iter().filter(|a| !a.is_zero()) {
            *mags.entry(a.abs().to_string()).or_default() += 1;
        }
        mags.len() == 1 || (mags.len() == 2 && mags.values().any(|&c| c == 1))
    });
    corner.then(|| format!("verified corner-vector identity with exponent 2t = {} contradicts the bound t <= 7", 2 * h.t))
}

/// Sum of the coefficient contributions grouped by orbit group and by the
/// absolute value of the form entry at `var`.
pub fn decomposition(h: &HilbertIdentity, monomial: &[u32], var: usize) -> Result<Vec<ExactScalar>, ScalarError> {
    let mut groups: BTreeMap<(usize, String), ExactScalar> = BTreeMap::new();
    for (i, c) in contributions(h, monomial)? {
        let key = (h.terms[i].group, h.terms[i].form[var].abs().to_string());
        let e = groups.entry(key).or_insert_with(ExactScalar::zero);
        *e = e.try_add(&c)?;
    }
    Ok(groups.into_values().collect())
}

/// Convenience: the integer value of a rational scalar.
pub fn as_i64(x: &ExactScalar) -> Option<i64> {
    x.as_rational().filter(|r| r.is_integer()).and_then(|r| r.to_integer().to_i64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbits::GcvOrbit;

    fn schur_design() -> WeightedDesign {
        let o = |a: i64, s| GcvOrbit::new(4, ExactScalar::int(a), s).unwrap();
        WeightedDesign::new(
            4,
            Convention::AntipodalPairs,
            vec![
                (o(4, 2), ExactScalar::ratio(9, 640)),
                (o(1, 0), ExactScalar::ratio(1, 60)),
                (o(1, 1), ExactScalar::ratio(1, 96)),
                (o(1, 3), ExactScalar::ratio(1, 60)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn constants() {
        assert_eq!(c_nt(4, 5), ExactScalar::ratio(21, 512));
        assert_eq!(c_nt(3, 2), ExactScalar::ratio(1, 5));
        for n in 2..8 {
            assert_eq!(c_nt(n, 1), ExactScalar::ratio(1, n as i64));
        }
        assert_eq!(multinomial(&[8, 2]), BigInt::from(45));
    }

    #[test]
    fn printed_schur_identity() {
        let h = schur_identity();
        assert_eq!(h.terms.len(), 72);
        let r = verify_identity(&h).unwrap();
        assert!(r.passed, "{:?}", r.worst);
        let mut parts: Vec<i64> = decomposition(&h, &[10, 0, 0, 0], 0).unwrap().iter().map(|x| as_i64(x).unwrap()).collect();
        parts.retain(|&x| x != 0);
        parts.sort_unstable();
        assert_eq!(parts, vec![24, 72, 1080, 9216, 12288]);
        assert_eq!(parts.iter().sum::<i64>(), 22680);
    }

    #[test]
    fn perturbed_schur_identity() {
        let mut h = schur_identity();
        for t in h.terms.iter_mut().filter(|t| t.group == 2) {
            t.coef = ExactScalar::int(181);
        }
        let r = verify_identity(&h).unwrap();
        assert!(!r.passed);
        let at = r.failures.iter().find(|f| f.monomial == vec![8, 2, 0, 0]).unwrap();
        assert_eq!(at.residual, ExactScalar::int(90));
        // every failure is a multiple of the per-term change
        assert!(r.failures.len() > 1);
    }

    #[test]
    fn schur_design_gives_the_printed_identity() {
        let h = design_to_identity(&schur_design(), 5, true).unwrap();
        assert_eq!(h.c, ExactScalar::int(22680));
        let mut got: Vec<(usize, Vec<i64>, i64)> = h
            .terms
            .iter()
            .map(|t| (t.group, t.form.iter().map(|a| as_i64(a).unwrap()).collect(), as_i64(&t.coef).unwrap()))
            .collect();
        got.sort();
        let mut want: Vec<(usize, Vec<i64>, i64)> = schur_identity()
            .terms
            .iter()
            .map(|t| (t.group, t.form.iter().map(|a| as_i64(a).unwrap()).collect(), as_i64(&t.coef).unwrap()))
            .collect();
        want.sort();
        assert_eq!(got, want);
        assert!(verify_identity(&h).unwrap().passed);
        let raw = design_to_identity(&schur_design(), 5, false).unwrap();
        assert!(verify_identity(&raw).unwrap().passed);
        assert!(design_to_identity(&schur_design(), 6, true).is_err());
    }

    #[test]
    fn octahedron_identity() {
        let o = GcvOrbit::new(3, ExactScalar::one(), 0).unwrap();
        let d = WeightedDesign::new(3, Convention::FullOrbit, vec![(o, ExactScalar::ratio(1, 6))]).unwrap();
        let h = design_to_identity(&d, 1, false).unwrap();
        assert_eq!(h.c, ExactScalar::ratio(1, 3));
        assert!(h.terms.iter().all(|t| t.coef == ExactScalar::ratio(1, 3)));
        assert!(verify_identity(&h).unwrap().passed);
        assert!(design_to_identity(&d, 2, false).is_err());
    }

    #[test]
    fn polygons() {
        for k in 1..=3usize {
            for t in 1..=(2 * k as u32 - 1) {
                let h = polygon_identity(k, t).unwrap();
                assert!(verify_identity(&h).unwrap().passed, "k={k} t={t}");
            }
            let h = polygon_identity(k, 2 * k as u32).unwrap();
            assert!(!verify_identity(&h).unwrap().passed, "k={k} fails at index 4k");
        }
        assert!(polygon_identity(4, 1).is_err());
    }

    #[test]
    fn trivial_and_permuted() {
        let h = HilbertIdentity {
            n: 1,
            t: 3,
            c: ExactScalar::one(),
            terms: vec![HilbertTerm { coef: ExactScalar::one(), form: vec![ExactScalar::one()], group: 0 }],
        };
        assert!(verify_identity(&h).unwrap().passed);
        let s = schur_identity().permuted(&[2, 0, 3, 1]);
        assert!(verify_identity(&s).unwrap().passed);
    }

    #[test]
    fn surd_forms_and_field_mixing() {
        // v_{2,1} in n = 2 has forms (sqrt2, 1): a surd identity
        let o = GcvOrbit::new(2, ExactScalar::int(2), 1).unwrap();
        let d = WeightedDesign::new(2, Convention::FullOrbit, vec![(o, ExactScalar::ratio(1, 8))]).unwrap();
        let h = design_to_identity(&d, 1, true).unwrap();
        assert!(!h.is_rational());
        assert!(verify_identity(&h).unwrap().passed);
        let mut bad = h.clone();
        bad.terms[0].form[0] = "sqrt(3)".parse().unwrap();
        assert!(check_fields(&bad).is_err());
    }

    #[test]
    fn tripwire() {
        let h = schur_identity();
        let r = verify_identity(&h).unwrap();
        assert!(bound_tripwire(&h, &r).is_none());
        let fake = HilbertIdentity { t: 8, ..h.clone() };
        let pass = IdentityReport { passed: true, ..r };
        assert!(bound_tripwire(&fake, &pass).is_some());
    }
}
