//! Integral lattices whose shells carry corner-vector designs: the D4
//! family, the extended Golay code, the Leech lattice (and its shorter
//! relative in dimension 23) and the Barnes-Wall lattice in dimension 16.

use std::collections::{BTreeMap, HashSet};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::design::{Convention, WeightedDesign};
use crate::moments::{compositions, sphere_moment};
use crate::orbits::GcvOrbit;
use crate::scalars::ExactScalar;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LatticeError {
    #[error("image is not integral at coordinate {0}")]
    NonIntegralImage(usize),
    #[error("expected {expected} coordinates, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("{0}")]
    Invalid(String),
}

const GOLAY_ASSET: &str = include_str!("../assets/golay.txt");
const BW16_ASSET: &str = include_str!("../assets/bw16.txt");

fn asset_rows(text: &str) -> Vec<Vec<i64>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.split_whitespace().map(|x| x.parse().expect("integer asset entry")).collect())
        .collect()
}

/// 24-bit words; bit `i` is coordinate `i`.
pub type CodeWord = u32;

pub fn weight(c: CodeWord) -> u32 {
    c.count_ones()
}

pub fn bits(c: CodeWord) -> Vec<usize> {
    (0..24).filter(|&i| c >> i & 1 == 1).collect()
}

/// The 12 generator rows: cyclic shifts of the generator polynomial over
/// the first 23 coordinates, each extended by a parity bit.
pub fn golay_generators() -> Vec<CodeWord> {
    let g: CodeWord = asset_rows(GOLAY_ASSET)[0].iter().fold(0, |acc, &e| acc | 1 << e);
    (0..12)
        .map(|i| {
            let w = g << i;
            w | (weight(w) % 2) << 23
        })
        .collect()
}

/// All 4096 codewords, sorted.
pub fn golay_code() -> &'static [CodeWord] {
    static CODE: OnceLock<Vec<CodeWord>> = OnceLock::new();
    CODE.get_or_init(|| {
        let gens = golay_generators();
        let mut words: Vec<CodeWord> = (0u32..1 << 12)
            .map(|m| (0..12).filter(|&i| m >> i & 1 == 1).fold(0, |acc, i| acc ^ gens[i]))
            .collect();
        words.sort_unstable();
        words
    })
}

fn golay_set() -> &'static HashSet<CodeWord> {
    static SET: OnceLock<HashSet<CodeWord>> = OnceLock::new();
    SET.get_or_init(|| golay_code().iter().copied().collect())
}

pub fn golay_contains(c: CodeWord) -> bool {
    golay_set().contains(&c)
}

pub fn weight_distribution(words: &[CodeWord]) -> BTreeMap<u32, usize> {
    let mut m = BTreeMap::new();
    for &w in words {
        *m.entry(weight(w)).or_default() += 1;
    }
    m
}

pub fn octads() -> Vec<CodeWord> {
    golay_code().iter().copied().filter(|&w| weight(w) == 8).collect()
}

/// Membership of `u / sqrt(8)` in the Leech lattice. Even vectors need
/// `u/2 mod 2` in the code and an even sum of `x = (u - 2c)/4`; odd ones
/// need `(u-1)/2 mod 2` in the code and an odd sum of `x = (u - 1 - 2c)/4`.
pub fn leech_contains(u: &[i64]) -> bool {
    if u.len() != 24 {
        return false;
    }
    let odd = u[0].rem_euclid(2);
    if u.iter().any(|x| x.rem_euclid(2) != odd) {
        return false;
    }
    let half: Vec<i64> = u.iter().map(|x| (x - odd).div_euclid(2)).collect();
    let c: CodeWord = half.iter().enumerate().fold(0, |acc, (i, h)| acc | (h.rem_euclid(2) as u32) << i);
    if !golay_contains(c) {
        return false;
    }
    let xsum: i64 = half.iter().enumerate().map(|(i, h)| (h - (c >> i & 1) as i64) / 2).sum();
    xsum.rem_euclid(2) == odd
}

/// The 196560 vectors of norm 4, as `sqrt(8)`-scaled integer coordinates:
/// `(+-4^2, 0^22)`, `(+-2^8, 0^16)` on octads with an even number of minus
/// signs, and `(-3, 1^23)` moved by permutations of the 3 and by sign
/// changes on codewords.
pub fn leech_min_shell() -> Vec<[i8; 24]> {
    let mut out = Vec::with_capacity(196_560);
    for i in 0..24 {
        for j in i + 1..24 {
            for (a, b) in [(4, 4), (4, -4), (-4, 4), (-4, -4)] {
                let mut u = [0i8; 24];
                u[i] = a;
                u[j] = b;
                out.push(u);
            }
        }
    }
    for o in octads() {
        let pos = bits(o);
        for m in 0u32..256 {
            if m.count_ones() % 2 == 0 {
                let mut u = [0i8; 24];
                for (k, &p) in pos.iter().enumerate() {
                    u[p] = if m >> k & 1 == 1 { -2 } else { 2 };
                }
                out.push(u);
            }
        }
    }
    for i in 0..24 {
        for &c in golay_code() {
            let mut u = [1i8; 24];
            u[i] = -3;
            for p in bits(c) {
                u[p] = -u[p];
            }
            out.push(u);
        }
    }
    out
}

/// Result of the exact design check on the Leech minimal shell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShellDesignReport {
    pub points: usize,
    pub sign_symmetric_under_code: bool,
    /// Every class of points with equal squared coordinates is a single
    /// orbit under the code's sign changes.
    pub classes_are_orbits: bool,
    pub classes: usize,
    pub even_monomials: usize,
    pub octad_monomials: usize,
    /// Failing exponent vectors of degree `<= t`.
    pub failures: Vec<Vec<u32>>,
}

impl ShellDesignReport {
    pub fn passed(&self) -> bool {
        self.sign_symmetric_under_code && self.classes_are_orbits && self.failures.is_empty()
    }
}

/// Rank over GF(2) of the words masked to `support`.
fn masked_rank(gens: &[CodeWord], support: CodeWord) -> u32 {
    let mut rows: Vec<CodeWord> = gens.iter().map(|g| g & support).collect();
    let mut rank = 0;
    for bit in 0..24 {
        if let Some(p) = (rank as usize..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) {
            rows.swap(rank as usize, p);
            let pivot = rows[rank as usize];
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank as usize && *row >> bit & 1 == 1 {
                    *row ^= pivot;
                }
            }
            rank += 1;
        }
    }
    rank
}

/// `sum_points u^alpha` from class representatives, `alpha` given sparsely.
fn class_sum(classes: &[([i8; 24], i128)], alpha: &[(usize, u32)]) -> i128 {
    classes
        .iter()
        .map(|(u, m)| {
            let mut acc = *m;
            for &(i, e) in alpha {
                if u[i] == 0 {
                    return 0;
                }
                acc *= (u[i] as i128).pow(e);
            }
            acc
        })
        .sum()
}

/// Exact check that the equally weighted normalized minimal shell is a
/// spherical `t`-design (`t <= 11`). The shell is invariant under sign
/// changes on codewords, so a monomial with odd-exponent set `S` sums to
/// zero unless `S` is a codeword; for degree `<= 11` that leaves the
/// all-even monomials and `x_S * x^{2 mu}` with `S` an octad, `|mu| <= 1`.
/// Those monomials are constant on sign orbits, so each class of equal
/// squared coordinates (checked to be one orbit) is summed through a
/// single representative.
pub fn leech_shell_design_check(shell: &[[i8; 24]], t: u32) -> ShellDesignReport {
    assert!(t <= 11, "the reduction covers t <= 11");
    let gens = golay_generators();
    let index: HashSet<[i8; 24]> = shell.iter().copied().collect();
    let sign_symmetric = index.len() == shell.len()
        && gens.iter().all(|&c| {
            let flip = bits(c);
            shell.iter().all(|u| {
                let mut v = *u;
                for &p in &flip {
                    v[p] = -v[p];
                }
                index.contains(&v)
            })
        });
    let mut by_square: BTreeMap<[u8; 24], ([i8; 24], i128)> = BTreeMap::new();
    for u in shell {
        let y: [u8; 24] = std::array::from_fn(|i| u[i].unsigned_abs());
        by_square.entry(y).or_insert((*u, 0)).1 += 1;
    }
    let classes: Vec<([i8; 24], i128)> = by_square.into_values().collect();
    let classes_are_orbits = classes.iter().all(|(u, m)| {
        let support: CodeWord = (0..24).filter(|&i| u[i] != 0).fold(0, |acc, i| acc | 1 << i);
        1i128 << masked_rank(&gens, support) == *m
    });
    let npts = BigInt::from(shell.len());
    let sparse = |alpha: &[u32]| -> Vec<(usize, u32)> { alpha.iter().enumerate().filter(|(_, &e)| e > 0).map(|(i, &e)| (i, e)).collect() };
    let mut failures = Vec::new();
    let mut even = 0;
    for k in 0..=t / 2 {
        let mus = compositions(k, 24);
        even += mus.len();
        let scale = BigRational::from_integer(&npts * BigInt::from(32).pow(k));
        let bad: Vec<Vec<u32>> = mus
            .into_par_iter()
            .map(|mu| mu.iter().map(|e| 2 * e).collect::<Vec<u32>>())
            .filter(|lambda| {
                let lhs = class_sum(&classes, &sparse(lambda));
                let r = sphere_moment(24, lambda).as_rational().cloned().expect("rational moment");
                BigRational::from_integer(BigInt::from(lhs)) != r * &scale
            })
            .collect();
        failures.extend(bad);
    }
    let mut octad = 0;
    if t >= 8 {
        let rows: Vec<Vec<u32>> = octads()
            .into_iter()
            .flat_map(|o| {
                let base: Vec<u32> = (0..24).map(|i| o >> i & 1).collect();
                let mut v = vec![base.clone()];
                if t >= 10 {
                    for j in 0..24 {
                        let mut a = base.clone();
                        a[j] += 2;
                        v.push(a);
                    }
                }
                v
            })
            .collect();
        octad = rows.len();
        let bad: Vec<Vec<u32>> = rows.into_par_iter().filter(|alpha| class_sum(&classes, &sparse(alpha)) != 0).collect();
        failures.extend(bad);
    }
    ShellDesignReport {
        points: shell.len(),
        sign_symmetric_under_code: sign_symmetric,
        classes_are_orbits,
        classes: classes.len(),
        even_monomials: even,
        octad_monomials: octad,
        failures,
    }
}

/// `sqrt(8) * Upsilon((y, 0))` for `y` in `R^23`:
/// `2 (y1, y1, y2 - y3, y2 + y3, ..., y22 - y23, y22 + y23)`.
pub fn upsilon_scaled(y: &[ExactScalar]) -> Result<Vec<i64>, LatticeError> {
    if y.len() != 23 {
        return Err(LatticeError::Dimension { expected: 23, got: y.len() });
    }
    let two = ExactScalar::int(2);
    let mut u = vec![y[0].try_mul(&two), y[0].try_mul(&two)];
    for k in 0..11 {
        let (a, b) = (&y[1 + 2 * k], &y[2 + 2 * k]);
        u.push(a.try_sub(b).and_then(|d| d.try_mul(&two)));
        u.push(a.try_add(b).and_then(|d| d.try_mul(&two)));
    }
    u.into_iter()
        .enumerate()
        .map(|(i, x)| {
            x.ok()
                .and_then(|x| x.as_rational().filter(|r| r.is_integer()).and_then(|r| r.to_integer().to_i64()))
                .ok_or(LatticeError::NonIntegralImage(i))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShorterLeechEmbedding {
    pub u: Vec<i64>,
    pub leech_member: bool,
    pub on_projection: bool,
    /// Norm of `u / sqrt(8)`.
    pub norm: ExactScalar,
}

impl ShorterLeechEmbedding {
    pub fn member(&self) -> bool {
        self.leech_member && self.on_projection
    }
}

pub fn shorter_leech_embed(y: &[ExactScalar]) -> Result<ShorterLeechEmbedding, LatticeError> {
    let u = upsilon_scaled(y)?;
    let norm = ExactScalar::from(BigRational::new(u.iter().map(|x| BigInt::from(x * x)).sum(), BigInt::from(8)));
    Ok(ShorterLeechEmbedding { leech_member: leech_contains(&u), on_projection: u[0] == u[1], u, norm })
}

/// Rows of a lattice basis in Hermite normal form (lower triangular,
/// positive diagonal, entries left of the diagonal reduced).
#[derive(Debug, Clone, PartialEq)]
pub struct IntegerLattice {
    basis: Vec<Vec<BigInt>>,
}

impl IntegerLattice {
    /// Full-rank lattice spanned by integer rows.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, LatticeError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(LatticeError::Invalid("generator matrix must be square".into()));
        }
        let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        // column n-1 down to 0: gather the gcd into row `col`
        for col in (0..n).rev() {
            loop {
                let pivot = (0..=col).filter(|&r| !m[r][col].is_zero()).min_by_key(|&r| m[r][col].magnitude().clone());
                let Some(p) = pivot else {
                    return Err(LatticeError::Invalid("generator matrix is singular".into()));
                };
                m.swap(p, col);
                let mut done = true;
                for r in 0..col {
                    if !m[r][col].is_zero() {
                        let q = num_integer::Integer::div_floor(&m[r][col], &m[col][col]);
                        let pivot_row = m[col].clone();
                        for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                            *x -= &q * y;
                        }
                        if !m[r][col].is_zero() {
                            done = false;
                        }
                    }
                }
                if done {
                    break;
                }
            }
            if m[col][col] < BigInt::zero() {
                for x in m[col].iter_mut() {
                    *x = -x.clone();
                }
            }
        }
        // reduce entries left of each diagonal by the rows above
        for r in 0..n {
            for c in (0..r).rev() {
                let q = num_integer::Integer::div_floor(&m[r][c], &m[c][c]);
                if !q.is_zero() {
                    let row_c = m[c].clone();
                    for (x, y) in m[r].iter_mut().zip(&row_c) {
                        *x -= &q * y;
                    }
                }
            }
        }
        Ok(IntegerLattice { basis: m })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// `|det|`, the covolume.
    pub fn determinant(&self) -> BigInt {
        (0..self.dim()).fold(BigInt::one(), |acc, i| acc * &self.basis[i][i])
    }

    /// Integer coefficients expressing `u` in the basis, if any.
    pub fn solve(&self, u: &[i64]) -> Option<Vec<BigInt>> {
        if u.len() != self.dim() {
            return None;
        }
        let mut r: Vec<BigInt> = u.iter().map(|&x| BigInt::from(x)).collect();
        let mut coef = vec![BigInt::zero(); self.dim()];
        for j in (0..self.dim()).rev() {
            let d = &self.basis[j][j];
            if !(&r[j] % d).is_zero() {
                return None;
            }
            let c = &r[j] / d;
            for (x, y) in r.iter_mut().zip(&self.basis[j]) {
                *x -= &c * y;
            }
            coef[j] = c;
        }
        Some(coef)
    }

    pub fn contains(&self, u: &[i64]) -> bool {
        self.solve(u).is_some()
    }
}

pub fn bw16_generator() -> Vec<Vec<i64>> {
    asset_rows(BW16_ASSET)
}

pub fn bw16() -> &'static IntegerLattice {
    static L: OnceLock<IntegerLattice> = OnceLock::new();
    L.get_or_init(|| IntegerLattice::from_rows(&bw16_generator()).expect("nonsingular generator"))
}

pub fn bw16_contains(u: &[i64]) -> bool {
    bw16().contains(u)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum D4Kind {
    D4,
    D4Star,
    D4Prime,
}

impl std::str::FromStr for D4Kind {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "d4" => Ok(D4Kind::D4),
            "d4star" | "d4*" => Ok(D4Kind::D4Star),
            "d4prime" | "d4'" => Ok(D4Kind::D4Prime),
            _ => Err(LatticeError::Invalid(format!("unknown lattice {s}"))),
        }
    }
}

/// A shell of a D4-family lattice. Points are stored as integer vectors
/// `w` with the actual point `w * sqrt(scale2)` where `scale2` is 1 for D4,
/// 1/4 for D4* and 1/2 for D4'.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Shell {
    pub kind: D4Kind,
    pub norm: ExactScalar,
    pub scale2: ExactScalar,
    pub points: Vec<Vec<i64>>,
    /// The shell as a union of unit-sphere orbits (scaled by `sqrt(norm)`).
    pub orbits: Vec<GcvOrbit>,
    /// Absolute-value patterns that are not corner-vector orbits.
    pub other: Vec<Vec<i64>>,
}

/// The orbit `v_{A,s}` through a point with the given absolute values.
pub fn orbit_of_pattern(n: usize, abs: &[i64]) -> Option<GcvOrbit> {
    let nz: Vec<i64> = abs.iter().copied().filter(|&x| x != 0).collect();
    let mut distinct: BTreeMap<i64, usize> = BTreeMap::new();
    for &x in &nz {
        *distinct.entry(x).or_default() += 1;
    }
    let s = nz.len().checked_sub(1)?;
    match distinct.len() {
        1 => GcvOrbit::new(n, ExactScalar::one(), s).ok(),
        2 => {
            let (&a, _) = distinct.iter().find(|(_, &c)| c == 1)?;
            let (&b, _) = distinct.iter().find(|(&v, _)| v != a)?;
            if distinct[&b] == 1 && nz.len() == 2 {
                // two distinct singletons: take the larger as head
                let (hi, lo) = (a.max(b), a.min(b));
                return GcvOrbit::new(n, ExactScalar::ratio(hi * hi, lo * lo), 1).ok();
            }
            GcvOrbit::new(n, ExactScalar::ratio(a * a, b * b), s).ok()
        }
        _ => None,
    }
}

pub fn d4_shell(kind: D4Kind, norm: &BigRational) -> Shell {
    let scale2 = match kind {
        D4Kind::D4 => BigRational::one(),
        D4Kind::D4Star => BigRational::new(1.into(), 4.into()),
        D4Kind::D4Prime => BigRational::new(1.into(), 2.into()),
    };
    // |w|^2 * scale2 = norm
    let target = norm / &scale2;
    let mut points = Vec::new();
    if target.is_integer() {
        let t = target.to_integer().to_i64().unwrap_or(0);
        let bound = (t as f64).sqrt() as i64 + 1;
        let member = |w: &[i64; 4]| match kind {
            D4Kind::D4 => w.iter().sum::<i64>() % 2 == 0,
            _ => w.iter().all(|x| x.rem_euclid(2) == 0) || w.iter().all(|x| x.rem_euclid(2) == 1),
        };
        for a in -bound..=bound {
            for b in -bound..=bound {
                for c in -bound..=bound {
                    let r = t - a * a - b * b - c * c;
                    if r < 0 {
                        continue;
                    }
                    let d = (r as f64).sqrt().round() as i64;
                    if d * d != r {
                        continue;
                    }
                    for dd in if d == 0 { vec![0] } else { vec![d, -d] } {
                        let w = [a, b, c, dd];
                        if member(&w) {
                            points.push(w.to_vec());
                        }
                    }
                }
            }
        }
    }
    points.sort();
    let mut patterns: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for w in &points {
        let mut a: Vec<i64> = w.iter().map(|x| x.abs()).collect();
        a.sort_unstable_by(|x, y| y.cmp(x));
        *patterns.entry(a).or_default() += 1;
    }
    let mut orbits = Vec::new();
    let mut other = Vec::new();
    for (p, _) in patterns.into_iter().rev() {
        match orbit_of_pattern(4, &p) {
            Some(o) => orbits.push(o),
            None => other.push(p),
        }
    }
    Shell { kind, norm: ExactScalar::from(norm.clone()), scale2: ExactScalar::from(scale2), points, orbits, other }
}

/// `E_{2m} = (D4)_{2m} u (D4')_{2m}` normalized to the unit sphere with
/// equal weight on every point.
pub fn e_shell_design(m: i64) -> Result<WeightedDesign, LatticeError> {
    let norm = BigRational::from_integer(BigInt::from(2 * m));
    let a = d4_shell(D4Kind::D4, &norm);
    let b = d4_shell(D4Kind::D4Prime, &norm);
    if !a.other.is_empty() || !b.other.is_empty() {
        return Err(LatticeError::Invalid(format!("shell {} is not a union of corner-vector orbits", 2 * m)));
    }
    let total = (a.points.len() + b.points.len()) as i64;
    let orbits = a.orbits.into_iter().chain(b.orbits).map(|o| (o, ExactScalar::ratio(1, total))).collect();
    WeightedDesign::new(4, Convention::FullOrbit, orbits).map_err(|e| LatticeError::Invalid(e.to_string()))
}
