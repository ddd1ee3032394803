#![allow(dead_code)]

use plopen::generators::{generate, GenKind, GenSpec};
use plopen::linalg::{rat, Rational, Vector};
use plopen::polyhedra::BoundingBox;
use plopen::PLMap;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn pts(raw: &[&[i64]]) -> Vec<Vector> {
    raw.iter().map(|p| p.iter().map(|&v| rat(v)).collect()).collect()
}

pub fn gen(kind: GenKind, dim: usize, seed: u64) -> PLMap {
    generate(&GenSpec::new(kind, dim, seed)).unwrap()
}

/// Kinds that accept any dimension in 1..=3.
pub const FREE_KINDS: [GenKind; 4] = [
    GenKind::Identity,
    GenKind::SingularCell,
    GenKind::RandomOrientationPreserving,
    GenKind::RandomMixedSigns,
];

pub fn named_fixtures() -> Vec<PLMap> {
    vec![
        gen(GenKind::Fold1d, 1, 0),
        gen(GenKind::InteriorFold1d, 1, 0),
        gen(GenKind::Doubling2d, 2, 0),
        gen(GenKind::Shear, 2, 0),
        gen(GenKind::Identity, 1, 0),
        gen(GenKind::Identity, 2, 0),
    ]
}

/// Seeded rational points in a slightly enlarged bounding box of the image.
pub fn query_points(f: &PLMap, count: usize, seed: u64) -> Vec<Vector> {
    let bbox = BoundingBox::of(f.images());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            bbox.lo
                .iter()
                .zip(&bbox.hi)
                .map(|(lo, hi)| {
                    let t = Rational::new(rng.gen_range(-8i64..=136).into(), 128.into());
                    lo + (hi - lo) * t
                })
                .collect()
        })
        .collect()
}
