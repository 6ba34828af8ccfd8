//! Generalized corner vectors `v_{a,s} = (a, 1^s, 0^{n-1-s}) / sqrt(a^2 + s)`
//! and their orbits under the signed permutation group `B_n`.
//!
//! The head parameter is carried only through `A = a^2`, so every coordinate
//! is stored as a sign together with the index of its squared value.

use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalars::{ExactScalar, ScalarError};

/// Default enumeration cap (number of points).
pub const DEFAULT_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrbitError {
    #[error("dimension n = {0} must be at least 2")]
    Dimension(usize),
    #[error("tail length s = {s} outside 0..={max}")]
    TailLength { s: usize, max: usize },
    #[error("head parameter A = {0} must be positive")]
    NonPositiveHead(String),
    #[error("orbit has {size} points, above the enumeration cap {cap}")]
    CapExceeded { size: BigInt, cap: u64 },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

/// One `B_n` orbit of a generalized corner vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOrbit", into = "RawOrbit")]
pub struct GcvOrbit {
    n: usize,
    a2: ExactScalar,
    s: usize,
}

#[derive(Serialize, Deserialize)]
struct RawOrbit {
    n: usize,
    #[serde(rename = "A")]
    a2: ExactScalar,
    s: usize,
}

impl TryFrom<RawOrbit> for GcvOrbit {
    type Error = OrbitError;
    fn try_from(r: RawOrbit) -> Result<Self, Self::Error> {
        GcvOrbit::new(r.n, r.a2, r.s)
    }
}

impl From<GcvOrbit> for RawOrbit {
    fn from(o: GcvOrbit) -> Self {
        RawOrbit { n: o.n, a2: o.a2, s: o.s }
    }
}

/// Squared-value class of a coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Zero,
    Tail,
    Head,
}

/// A point of an orbit: per-coordinate sign and squared-value class.
/// Corner orbits (`A = 1`) mark every nonzero coordinate as `Tail`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrbitPoint {
    pub signs: Vec<i8>,
    pub slots: Vec<Slot>,
}

pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

impl GcvOrbit {
    pub fn new(n: usize, a2: ExactScalar, s: usize) -> Result<Self, OrbitError> {
        if n < 2 {
            return Err(OrbitError::Dimension(n));
        }
        if s > n - 1 {
            return Err(OrbitError::TailLength { s, max: n - 1 });
        }
        if a2.sign() <= 0 {
            return Err(OrbitError::NonPositiveHead(a2.to_string()));
        }
        Ok(GcvOrbit { n, a2, s })
    }

    /// The corner vector `v_{k}` with `k` equal nonzero entries, i.e. `v_{1,k-1}`.
    pub fn corner(n: usize, k: usize) -> Result<Self, OrbitError> {
        if k == 0 {
            return Err(OrbitError::TailLength { s: 0, max: n.saturating_sub(1) });
        }
        GcvOrbit::new(n, ExactScalar::one(), k - 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `A = a^2`.
    pub fn a2(&self) -> &ExactScalar {
        &self.a2
    }

    pub fn s(&self) -> usize {
        self.s
    }

    /// Exactly `A = 1`: the head merges with the tail.
    pub fn is_corner(&self) -> bool {
        self.a2.is_one()
    }

    /// `A + s`, the squared norm of the unnormalized representative.
    pub fn norm2(&self) -> ExactScalar {
        self.a2
            .try_add(&ExactScalar::int(self.s as i64))
            .expect("integer offset")
    }

    /// Squared head coordinate `A/(A+s)`.
    pub fn head_square(&self) -> Result<ExactScalar, ScalarError> {
        self.a2.try_div(&self.norm2())
    }

    /// Squared tail coordinate `1/(A+s)`.
    pub fn tail_square(&self) -> Result<ExactScalar, ScalarError> {
        self.norm2().recip()
    }

    pub fn with_a2(&self, a2: ExactScalar) -> Result<Self, OrbitError> {
        GcvOrbit::new(self.n, a2, self.s)
    }

    /// Number of points: `2^{s+1} n C(n-1,s)` for proper orbits and
    /// `2^{s+1} C(n, s+1)` when `A = 1`.
    pub fn size(&self) -> BigInt {
        let (n, s) = (self.n as u64, self.s as u64);
        let signs = BigInt::one() << (s + 1);
        if self.is_corner() {
            signs * binomial(n, s + 1)
        } else {
            signs * BigInt::from(n) * binomial(n - 1, s)
        }
    }

    /// The representative `(a, 1^s, 0^{n-1-s})/sqrt(A+s)`.
    pub fn canonical_rep(&self) -> OrbitPoint {
        let mut signs = vec![0i8; self.n];
        let mut slots = vec![Slot::Zero; self.n];
        for i in 0..=self.s {
            signs[i] = 1;
            slots[i] = Slot::Tail;
        }
        if !self.is_corner() {
            slots[0] = Slot::Head;
        }
        OrbitPoint { signs, slots }
    }

    /// Squared value of a slot in this orbit.
    pub fn slot_square(&self, slot: Slot) -> Result<ExactScalar, ScalarError> {
        match slot {
            Slot::Zero => Ok(ExactScalar::zero()),
            Slot::Tail => self.tail_square(),
            Slot::Head => self.head_square(),
        }
    }

    /// All distinct points of the orbit, in lexicographic order of their
    /// (sign, slot) encoding.
    pub fn enumerate(&self, cap: u64) -> Result<Vec<OrbitPoint>, OrbitError> {
        let size = self.size();
        if size > BigInt::from(cap) {
            return Err(OrbitError::CapExceeded { size, cap });
        }
        let n = self.n;
        let mut out = Vec::with_capacity(size.to_usize().unwrap_or(0));
        let nonzero = self.s + 1;
        let heads: Vec<Option<usize>> = if self.is_corner() {
            vec![None]
        } else {
            (0..n).map(Some).collect()
        };
        for head in heads {
            let pool: Vec<usize> = (0..n).filter(|&i| Some(i) != head).collect();
            let tails = if head.is_some() { self.s } else { nonzero };
            for combo in (0..pool.len()).combinations(tails) {
                let mut support: Vec<usize> = combo.iter().map(|&i| pool[i]).collect();
                let mut slots = vec![Slot::Zero; n];
                for &i in &support {
                    slots[i] = Slot::Tail;
                }
                if let Some(h) = head {
                    slots[h] = Slot::Head;
                    support.push(h);
                }
                support.sort_unstable();
                for mask in 0u64..(1u64 << support.len()) {
                    let mut signs = vec![0i8; n];
                    for (b, &i) in support.iter().enumerate() {
                        signs[i] = if mask >> b & 1 == 1 { -1 } else { 1 };
                    }
                    out.push(OrbitPoint { signs, slots: slots.clone() });
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Float coordinates of all points.
    pub fn enumerate_f64(&self, cap: u64) -> Result<Vec<Vec<f64>>, OrbitError> {
        let head = self.head_square()?.to_f64().sqrt();
        let tail = self.tail_square()?.to_f64().sqrt();
        Ok(self
            .enumerate(cap)?
            .into_iter()
            .map(|p| p.coords_f64(head, tail))
            .collect())
    }
}

impl OrbitPoint {
    /// Squared coordinates in the orbit's field.
    pub fn squares(&self, o: &GcvOrbit) -> Result<Vec<ExactScalar>, ScalarError> {
        let head = o.head_square()?;
        let tail = o.tail_square()?;
        Ok(self
            .slots
            .iter()
            .map(|s| match s {
                Slot::Zero => ExactScalar::zero(),
                Slot::Tail => tail.clone(),
                Slot::Head => head.clone(),
            })
            .collect())
    }

    pub fn coords_f64(&self, head: f64, tail: f64) -> Vec<f64> {
        self.signs
            .iter()
            .zip(&self.slots)
            .map(|(&sg, s)| {
                sg as f64
                    * match s {
                        Slot::Zero => 0.0,
                        Slot::Tail => tail,
                        Slot::Head => head,
                    }
            })
            .collect()
    }

    pub fn negated(&self) -> OrbitPoint {
        OrbitPoint {
            signs: self.signs.iter().map(|s| -s).collect(),
            slots: self.slots.clone(),
        }
    }
}

impl fmt::Display for GcvOrbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v[A={}, s={}] in n={}", self.a2, self.s, self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn orbit(n: usize, a2: &str, s: usize) -> GcvOrbit {
        GcvOrbit::new(n, a2.parse().unwrap(), s).unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(orbit(3, "1", 1).size(), 12.into());
        assert_eq!(orbit(4, "4", 2).size(), 96.into());
        assert_eq!(orbit(4, "1", 3).size(), 16.into());
        assert_eq!(orbit(23, "4", 11).size(), BigInt::from(2u64.pow(12) * 23) * binomial(22, 11));
    }

    #[test]
    fn validation() {
        assert!(GcvOrbit::new(1, ExactScalar::one(), 0).is_err());
        assert!(GcvOrbit::new(3, ExactScalar::one(), 3).is_err());
        assert!(GcvOrbit::new(3, ExactScalar::int(-2), 1).is_err());
        assert!(GcvOrbit::new(3, "4-sqrt(15)".parse().unwrap(), 2).is_ok());
        assert!(GcvOrbit::new(3, "4-sqrt(17)".parse().unwrap(), 2).is_err());
        assert!(orbit(4, "1", 2).is_corner());
        assert_eq!(GcvOrbit::corner(4, 3).unwrap(), orbit(4, "1", 2));
    }

    #[test]
    fn octahedron_vertices() {
        let pts = orbit(3, "1", 0).enumerate_f64(DEFAULT_CAP).unwrap();
        let mut want: Vec<Vec<f64>> = Vec::new();
        for i in 0..3 {
            for sg in [1.0, -1.0] {
                let mut v = vec![0.0; 3];
                v[i] = sg;
                want.push(v);
            }
        }
        assert_eq!(pts.len(), 6);
        for w in want {
            assert!(pts.iter().any(|p| p == &w));
        }
    }

    #[test]
    fn dodecagon_subfamily() {
        let pts = orbit(2, "3", 1).enumerate_f64(DEFAULT_CAP).unwrap();
        assert_eq!(pts.len(), 8);
        let r3 = 3f64.sqrt() / 2.0;
        for p in &pts {
            let mut m = [p[0].abs(), p[1].abs()];
            m.sort_by(f64::total_cmp);
            assert!((m[0] - 0.5).abs() < 1e-15 && (m[1] - r3).abs() < 1e-15);
        }
    }

    #[test]
    fn cap_exceeded() {
        let err = orbit(23, "4", 11).enumerate(DEFAULT_CAP).unwrap_err();
        assert!(matches!(err, OrbitError::CapExceeded { .. }));
    }

    #[test]
    fn canonical_representatives() {
        let o = orbit(4, "4", 2);
        let sq = o.canonical_rep().squares(&o).unwrap();
        let want: Vec<ExactScalar> = ["2/3", "1/6", "1/6", "0"].iter().map(|t| t.parse().unwrap()).collect();
        assert_eq!(sq, want);
        let c = orbit(3, "1", 2);
        assert!(c.canonical_rep().squares(&c).unwrap().iter().all(|x| *x == ExactScalar::ratio(1, 3)));
        let big = orbit(16, "4", 8);
        let sq = big.canonical_rep().squares(&big).unwrap();
        assert_eq!(sq[0], ExactScalar::ratio(1, 3));
        assert_eq!(sq[8], ExactScalar::ratio(1, 12));
        assert_eq!(sq[9], ExactScalar::zero());
    }

    #[test]
    fn enumeration_invariants() {
        let cases = [("1", 0), ("1", 2), ("4", 2), ("2/7", 1), ("(3+sqrt(5))/2", 3), ("9", 0)];
        for n in 2..=6 {
            for (a2, s) in cases {
                if s > n - 1 {
                    continue;
                }
                let o = orbit(n, a2, s);
                let pts = o.enumerate(DEFAULT_CAP).unwrap();
                assert_eq!(BigInt::from(pts.len()), o.size(), "{o}");
                let set: BTreeSet<_> = pts.iter().cloned().collect();
                assert_eq!(set.len(), pts.len());
                for p in &pts {
                    assert!(set.contains(&p.negated()));
                    let sq = p.squares(&o).unwrap();
                    let norm = sq.iter().fold(ExactScalar::zero(), |a, x| a.try_add(x).unwrap());
                    assert_eq!(norm, ExactScalar::one());
                }
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let o = orbit(4, "4", 2);
        let text = serde_json::to_string(&o).unwrap();
        assert_eq!(text, r#"{"n":4,"A":"4","s":2}"#);
        let back: GcvOrbit = serde_json::from_str(&text).unwrap();
        assert_eq!(back, o);
        assert!(serde_json::from_str::<GcvOrbit>(r#"{"n":4,"A":"-1","s":2}"#).is_err());
    }
}
