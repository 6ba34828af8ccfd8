//! Sampled orbit inclusions for the Barnes-Wall and shorter Leech lattices.

use cornerdesigns::lattice::{bw16_contains, shorter_leech_embed};
use cornerdesigns::scalars::ExactScalar;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

/// A uniformly random signed permutation of `base`.
fn signed_image<R: Rng>(rng: &mut R, base: &[i64]) -> Vec<i64> {
    let mut v: Vec<i64> = base.iter().map(|&x| if rng.gen() { x } else { -x }).collect();
    v.shuffle(rng);
    v
}

fn pattern(head: i64, mid: i64, k: usize, len: usize) -> Vec<i64> {
    let mut v = vec![0; len];
    v[0] = head;
    v[1..=k].fill(mid);
    v
}

#[test]
fn bw16_contains_the_eight_four_orbit() {
    let base = pattern(8, 4, 8, 16);
    assert!(bw16_contains(&base));
    let mut rng = StdRng::seed_from_u64(16);
    for _ in 0..100 {
        let u = signed_image(&mut rng, &base);
        assert!(bw16_contains(&u), "{u:?}");
    }
}

#[test]
fn shorter_leech_contains_the_eight_four_orbit() {
    let base = pattern(8, 4, 11, 23);
    let mut rng = StdRng::seed_from_u64(23);
    let mut misses = Vec::new();
    for _ in 0..10_000 {
        let y: Vec<ExactScalar> = signed_image(&mut rng, &base).into_iter().map(ExactScalar::int).collect();
        let e = shorter_leech_embed(&y).unwrap();
        assert_eq!(e.norm, ExactScalar::int(240));
        if !e.member() {
            misses.push(e.u);
        }
    }
    assert!(misses.is_empty(), "{} of 10000 images outside the lattice, e.g. {:?}", misses.len(), misses.first());
}
