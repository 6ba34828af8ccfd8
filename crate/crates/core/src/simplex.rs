//! Cubature on the simplex `T^{n-1}` with the weight
//! `1/sqrt((1-|y|_1) y_1 ... y_{n-1})`, and its correspondence with
//! sign-symmetric cubature on `S^{n-1}` via `psi(x) = (x_1^2, ..., x_{n-1}^2)`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::{Convention, WeightedDesign};
use crate::moments::{compositions, simplex_moment};
use crate::orbits::{GcvOrbit, OrbitError, DEFAULT_CAP};
use crate::scalars::{ExactScalar, ScalarError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimplexError {
    #[error("sphere degree must be odd, got {0}")]
    EvenDegree(u32),
    #[error("point set is not sign-symmetric: {0}")]
    NonSymmetric(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// Nodes in `T^{n-1}` (so `n - 1` coordinates each) with weights and the
/// claimed polynomial degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexCubature {
    pub n: usize,
    pub nodes: Vec<Vec<ExactScalar>>,
    pub weights: Vec<ExactScalar>,
    pub degree: u32,
}

impl SimplexCubature {
    pub fn new(n: usize, nodes: Vec<Vec<ExactScalar>>, weights: Vec<ExactScalar>, degree: u32) -> Result<Self, SimplexError> {
        if n < 1 || nodes.len() != weights.len() {
            return Err(SimplexError::Invalid("nodes and weights differ in length".into()));
        }
        for z in &nodes {
            if z.len() != n - 1 {
                return Err(SimplexError::Invalid(format!("node has {} coordinates, expected {}", z.len(), n - 1)));
            }
            let total = z.iter().try_fold(ExactScalar::zero(), |acc, x| acc.try_add(x))?;
            if z.iter().any(|x| x.sign() < 0) || ExactScalar::one().try_sub(&total)?.sign() < 0 {
                return Err(SimplexError::Invalid("node outside the simplex".into()));
            }
        }
        if weights.iter().any(|w| w.sign() <= 0) {
            return Err(SimplexError::Invalid("weights must be positive".into()));
        }
        Ok(SimplexCubature { n, nodes, weights, degree })
    }

    /// Nodes sorted lexicographically by their printed coordinates, with
    /// weights; a canonical form for comparisons.
    pub fn sorted(&self) -> Vec<(Vec<String>, ExactScalar)> {
        let mut v: Vec<(Vec<String>, ExactScalar)> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(z, w)| (z.iter().map(|x| x.to_string()).collect(), w.clone()))
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0));
        v
    }
}

/// A point of `S^{n-1}` given by its signs and squared coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedPoint {
    pub signs: Vec<i8>,
    pub squares: Vec<ExactScalar>,
    pub weight: ExactScalar,
}

impl LiftedPoint {
    pub fn coords_f64(&self) -> Vec<f64> {
        self.signs.iter().zip(&self.squares).map(|(&s, q)| s as f64 * q.to_f64().max(0.0).sqrt()).collect()
    }
}

/// Sums weights of coinciding images.
fn aggregate(n: usize, images: impl Iterator<Item = (Vec<ExactScalar>, ExactScalar)>, degree: u32) -> Result<SimplexCubature, SimplexError> {
    let mut acc: BTreeMap<Vec<String>, (Vec<ExactScalar>, ExactScalar)> = BTreeMap::new();
    for (z, w) in images {
        let key: Vec<String> = z.iter().map(|x| x.to_string()).collect();
        match acc.get_mut(&key) {
            Some(e) => e.1 = e.1.try_add(&w)?,
            None => {
                acc.insert(key, (z, w));
            }
        }
    }
    let (nodes, weights) = acc.into_values().unzip();
    SimplexCubature::new(n, nodes, weights, degree)
}

fn claimed_degree(t_sphere: u32) -> Result<u32, SimplexError> {
    if t_sphere.is_multiple_of(2) {
        return Err(SimplexError::EvenDegree(t_sphere));
    }
    Ok((t_sphere - 1) / 2)
}

/// Pushes a union of signed-permutation orbits forward under `psi`.
pub fn sphere_to_simplex(d: &WeightedDesign, t_sphere: u32) -> Result<SimplexCubature, SimplexError> {
    let degree = claimed_degree(t_sphere)?;
    let n = d.n();
    let mut images = Vec::new();
    for (o, w) in d.orbits() {
        let per_point = match d.convention() {
            Convention::FullOrbit => w.clone(),
            Convention::AntipodalPairs => w.try_div(&ExactScalar::int(2))?,
        };
        for p in o.enumerate(DEFAULT_CAP)? {
            let mut sq = p.squares(o)?;
            sq.truncate(n - 1);
            images.push((sq, per_point.clone()));
        }
    }
    aggregate(n, images.into_iter(), degree)
}

/// Pushes an explicit weighted point set forward under `psi`, after
/// checking that it is invariant under every coordinate sign change.
pub fn points_to_simplex(n: usize, points: &[(Vec<ExactScalar>, ExactScalar)], t_sphere: u32) -> Result<SimplexCubature, SimplexError> {
    let degree = claimed_degree(t_sphere)?;
    let key = |x: &[ExactScalar]| x.iter().map(|c| c.to_string()).collect::<Vec<_>>();
    let mut index: BTreeMap<Vec<String>, ExactScalar> = BTreeMap::new();
    for (x, w) in points {
        if x.len() != n {
            return Err(SimplexError::Invalid(format!("point has {} coordinates, expected {n}", x.len())));
        }
        let e = index.entry(key(x)).or_insert_with(ExactScalar::zero);
        *e = e.try_add(w)?;
    }
    for (x, w) in points {
        for i in (0..n).filter(|&i| !x[i].is_zero()) {
            let mut y = x.clone();
            y[i] = y[i].neg();
            if index.get(&key(&y)) != Some(&index[&key(x)]) {
                return Err(SimplexError::NonSymmetric(format!("flipping coordinate {} of {:?} (weight {w})", i + 1, key(x))));
            }
        }
    }
    let images = points
        .iter()
        .map(|(x, w)| {
            let sq = x[..n - 1].iter().map(|c| c.try_mul(c)).collect::<Result<Vec<_>, _>>()?;
            Ok((sq, w.clone()))
        })
        .collect::<Result<Vec<_>, ScalarError>>()?;
    aggregate(n, images.into_iter(), degree)
}

/// Lifts every node to its `2^wt` signed points, `wt` counting the nonzero
/// coordinates among all `n` squared coordinates `(z, 1 - |z|_1)`.
pub fn simplex_to_sphere(sc: &SimplexCubature) -> Result<Vec<LiftedPoint>, ScalarError> {
    let mut out = Vec::new();
    for (z, c) in sc.nodes.iter().zip(&sc.weights) {
        let total = z.iter().try_fold(ExactScalar::zero(), |acc, x| acc.try_add(x))?;
        let mut squares = z.clone();
        squares.push(ExactScalar::one().try_sub(&total)?);
        let support: Vec<usize> = (0..squares.len()).filter(|&i| !squares[i].is_zero()).collect();
        let weight = c.try_div(&ExactScalar::int(1i64 << support.len()))?;
        for mask in 0u64..(1 << support.len()) {
            let mut signs = vec![0i8; squares.len()];
            for (b, &i) in support.iter().enumerate() {
                signs[i] = if mask >> b & 1 == 1 { -1 } else { 1 };
            }
            out.push(LiftedPoint { signs, squares: squares.clone(), weight: weight.clone() });
        }
    }
    Ok(out)
}

/// Pushes lifted points back down; inverse of [`simplex_to_sphere`].
pub fn lifted_to_simplex(n: usize, points: &[LiftedPoint], t_sphere: u32) -> Result<SimplexCubature, SimplexError> {
    let degree = claimed_degree(t_sphere)?;
    aggregate(n, points.iter().map(|p| (p.squares[..n - 1].to_vec(), p.weight.clone())), degree)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexFailure {
    pub alpha: Vec<u32>,
    pub residual: ExactScalar,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexReport {
    pub requested_degree: u32,
    /// Largest `k <= t` with every moment of degree `<= k` exact.
    pub verified_degree: Option<u32>,
    pub failures: Vec<SimplexFailure>,
    pub max_residual: f64,
}

impl SimplexReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn node_sum(sc: &SimplexCubature, alpha: &[u32]) -> Result<ExactScalar, ScalarError> {
    let mut total = ExactScalar::zero();
    for (z, c) in sc.nodes.iter().zip(&sc.weights) {
        let mut term = c.clone();
        for (x, &a) in z.iter().zip(alpha) {
            if a > 0 {
                term = term.try_mul(&x.pow_int(a as i64)?)?;
            }
        }
        total = total.try_add(&term)?;
    }
    Ok(total)
}

fn is_nonzero(r: &ExactScalar) -> bool {
    match r {
        ExactScalar::Float(_) => r.to_f64().abs() > 1e-10,
        _ => !r.is_zero(),
    }
}

/// Checks `sum c z^alpha = simplex_moment(n, alpha)` for every `|alpha| <= t`.
pub fn verify_simplex_cubature(sc: &SimplexCubature, t: u32) -> Result<SimplexReport, ScalarError> {
    let dim = sc.n - 1;
    let mut failures = Vec::new();
    let mut verified = None;
    for k in 0..=t {
        let rows = compositions(k, dim)
            .into_par_iter()
            .map(|alpha| {
                let r = node_sum(sc, &alpha)?.try_sub(&simplex_moment(sc.n, &alpha))?;
                Ok((alpha, r))
            })
            .collect::<Result<Vec<_>, ScalarError>>()?;
        let before = failures.len();
        failures.extend(rows.into_iter().filter(|(_, r)| is_nonzero(r)).map(|(alpha, residual)| SimplexFailure { alpha, residual }));
        if failures.len() == before && verified == k.checked_sub(1) {
            verified = Some(k);
        }
    }
    let max_residual = failures.iter().map(|f| f.residual.to_f64().abs()).fold(0.0, f64::max);
    Ok(SimplexReport { requested_degree: t, verified_degree: verified, failures, max_residual })
}

/// Where `psi(orbit)` sits in `T^{n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "placement", content = "facets")]
pub enum Placement {
    VertexSet,
    /// Every image point lies on one of the listed facets.
    Boundary(Vec<String>),
    Median,
    Interior,
}

/// Facets are `y_i = 0` for `i < n` and `y_1 + ... + y_{n-1} = 1`.
pub fn boundary_classify(o: &GcvOrbit) -> Placement {
    let n = o.n();
    let s = o.s();
    if s == 0 {
        return Placement::VertexSet;
    }
    if s + 2 <= n {
        let mut facets: Vec<String> = (1..n).map(|i| format!("y{i}=0")).collect();
        facets.push("sum=1".into());
        return Placement::Boundary(facets);
    }
    if n == 3 {
        Placement::Median
    } else {
        Placement::Interior
    }
}

/// `(y_1 ... y_{n-1}) (1 - |y|_1)`: returns its node sum and its integral.
/// The integral is positive while the node sum vanishes whenever every
/// node lies on the boundary.
pub fn boundary_product(sc: &SimplexCubature) -> Result<(ExactScalar, ExactScalar), ScalarError> {
    let dim = sc.n - 1;
    let ones = vec![1u32; dim];
    let mut nodes = node_sum(sc, &ones)?;
    let mut integral = simplex_moment(sc.n, &ones);
    for j in 0..dim {
        let mut a = ones.clone();
        a[j] += 1;
        nodes = nodes.try_sub(&node_sum(sc, &a)?)?;
        integral = integral.try_sub(&simplex_moment(sc.n, &a))?;
    }
    Ok((nodes, integral))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> ExactScalar {
        ExactScalar::ratio(a, b)
    }

    fn octahedron() -> WeightedDesign {
        let o = GcvOrbit::new(3, ExactScalar::one(), 0).unwrap();
        WeightedDesign::new(3, Convention::FullOrbit, vec![(o, q(1, 6))]).unwrap()
    }

    #[test]
    fn octahedron_image() {
        let sc = sphere_to_simplex(&octahedron(), 3).unwrap();
        assert_eq!(sc.degree, 1);
        let got = sc.sorted();
        assert_eq!(got.len(), 3);
        assert!(got.iter().all(|(_, w)| *w == q(1, 3)));
        let nodes: Vec<Vec<String>> = got.into_iter().map(|(z, _)| z).collect();
        assert_eq!(nodes, vec![vec!["0", "0"], vec!["0", "1"], vec!["1", "0"]]);
        let r = verify_simplex_cubature(&sc, 1).unwrap();
        assert!(r.passed());
        let r = verify_simplex_cubature(&sc, 2).unwrap();
        assert_eq!(r.verified_degree, Some(1));
        let f = r.failures.iter().find(|f| f.alpha == vec![2, 0]).unwrap();
        assert_eq!(f.residual, q(1, 3).try_sub(&q(1, 5)).unwrap());
        assert!(sphere_to_simplex(&octahedron(), 2).is_err());
    }

    #[test]
    fn midpoint_orbit_image() {
        let o = GcvOrbit::new(3, ExactScalar::one(), 1).unwrap();
        let d = WeightedDesign::new(3, Convention::FullOrbit, vec![(o, q(1, 12))]).unwrap();
        let sc = sphere_to_simplex(&d, 3).unwrap();
        let nodes: Vec<Vec<String>> = sc.sorted().into_iter().map(|(z, _)| z).collect();
        assert_eq!(nodes, vec![vec!["0", "1/2"], vec!["1/2", "0"], vec!["1/2", "1/2"]]);
        assert!(sc.weights.iter().all(|w| *w == q(1, 3)));
    }

    #[test]
    fn hypercube_collapses() {
        let o = GcvOrbit::new(4, ExactScalar::one(), 3).unwrap();
        let d = WeightedDesign::new(4, Convention::FullOrbit, vec![(o, q(1, 16))]).unwrap();
        let sc = sphere_to_simplex(&d, 3).unwrap();
        assert_eq!(sc.nodes, vec![vec![q(1, 4); 3]]);
        assert_eq!(sc.weights, vec![ExactScalar::one()]);
        let lifted = simplex_to_sphere(&sc).unwrap();
        assert_eq!(lifted.len(), 16);
        assert!(lifted.iter().all(|p| p.weight == q(1, 16)));
        assert!(lifted[0].coords_f64().iter().all(|x| (x.abs() - 0.5).abs() < 1e-15));
    }

    #[test]
    fn lift_and_round_trip() {
        let sc = SimplexCubature::new(
            3,
            vec![vec![ExactScalar::one(), ExactScalar::zero()], vec![ExactScalar::zero(), ExactScalar::one()], vec![ExactScalar::zero(); 2]],
            vec![q(1, 3); 3],
            1,
        )
        .unwrap();
        let lifted = simplex_to_sphere(&sc).unwrap();
        assert_eq!(lifted.len(), 6);
        assert!(lifted.iter().all(|p| p.weight == q(1, 6)));
        let back = lifted_to_simplex(3, &lifted, 3).unwrap();
        assert_eq!(back.sorted(), sc.sorted());
    }

    #[test]
    fn explicit_points_need_symmetry() {
        let one = ExactScalar::one;
        let z = ExactScalar::zero;
        let mut pts = Vec::new();
        for i in 0..3 {
            for s in [1i64, -1] {
                let mut x = vec![z(), z(), z()];
                x[i] = ExactScalar::int(s);
                pts.push((x, q(1, 6)));
            }
        }
        let sc = points_to_simplex(3, &pts, 3).unwrap();
        assert_eq!(sc.sorted(), sphere_to_simplex(&octahedron(), 3).unwrap().sorted());
        pts.pop();
        pts.push((vec![one(), one(), z()], q(1, 6)));
        assert!(matches!(points_to_simplex(3, &pts, 3), Err(SimplexError::NonSymmetric(_))));
    }

    #[test]
    fn empty_degree_checks_mass() {
        let sc = SimplexCubature::new(3, vec![vec![q(1, 3), q(1, 3)]], vec![q(1, 2)], 0).unwrap();
        assert!(!verify_simplex_cubature(&sc, 0).unwrap().passed());
        let sc = SimplexCubature::new(3, vec![vec![q(1, 3), q(1, 3)]], vec![ExactScalar::one()], 0).unwrap();
        assert!(verify_simplex_cubature(&sc, 0).unwrap().passed());
        assert!(SimplexCubature::new(3, vec![vec![q(2, 3), q(2, 3)]], vec![ExactScalar::one()], 0).is_err());
    }

    #[test]
    fn placements() {
        for a in [1, 2, 5] {
            let o = GcvOrbit::new(3, ExactScalar::int(a), 0).unwrap();
            assert_eq!(boundary_classify(&o), Placement::VertexSet);
        }
        let o = GcvOrbit::new(3, ExactScalar::int(3), 2).unwrap();
        assert_eq!(boundary_classify(&o), Placement::Median);
        let o = GcvOrbit::new(4, ExactScalar::int(2), 3).unwrap();
        assert_eq!(boundary_classify(&o), Placement::Interior);
        let o = GcvOrbit::new(5, ExactScalar::int(2), 2).unwrap();
        assert!(matches!(boundary_classify(&o), Placement::Boundary(f) if f.len() == 5));
    }

    #[test]
    fn boundary_product_vanishes_on_boundary_nodes() {
        let sc = sphere_to_simplex(&octahedron(), 3).unwrap();
        let (nodes, integral) = boundary_product(&sc).unwrap();
        assert!(nodes.is_zero());
        assert!(integral.sign() > 0);
    }
}
