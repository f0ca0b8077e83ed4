#![allow(dead_code)]

use grushin::rearrange::{Affine, Interval, Rational, Slab, SlabSet};
use grushin::SampledProfile;
use num_bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// A random rational in `[0, max]` with denominator `den`.
fn rational_upto(rng: &mut impl Rng, max: i64, den: i64) -> Rational {
    frac(rng.gen_range(0..=max * den), den)
}

/// Splits `(a, b)` into the section one level up: each endpoint moves
/// inwards, the interval may vanish, and it may break in two.
fn shrink(rng: &mut impl Rng, family: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    let mut out = Vec::new();
    for (a, b) in family {
        if rng.gen_bool(0.1) {
            continue;
        }
        let width = b - a;
        let t1 = frac(rng.gen_range(0..=3), 12);
        let t2 = frac(rng.gen_range(0..=3), 12);
        let (na, nb) = (a + &width * t1, b - &width * t2);
        if na >= nb {
            continue;
        }
        if rng.gen_bool(0.25) {
            let w = &nb - &na;
            let c1 = &na + &w * frac(rng.gen_range(2..=5), 12);
            let c2 = &na + &w * frac(rng.gen_range(7..=10), 12);
            out.push((na, c1));
            out.push((c2, nb));
        } else {
            out.push((na, nb));
        }
    }
    out
}

/// A random y-Schwarz symmetric set: contiguous slabs from `y = 0`, nested
/// sections, rational coordinates, several intervals per section.
pub fn random_schwarz_set(rng: &mut impl Rng) -> SlabSet {
    let n_intervals = rng.gen_range(1..=4);
    let mut cuts: Vec<Rational> = (0..2 * n_intervals).map(|_| rational_upto(rng, 10, 4)).collect();
    cuts.sort();
    cuts.dedup();
    if rng.gen_bool(0.3) {
        cuts[0] = Rational::from_integer(0.into());
    }
    let mut family: Vec<(Rational, Rational)> = cuts
        .chunks(2)
        .filter(|c| c.len() == 2)
        .map(|c| (c[0].clone(), c[1].clone()))
        .collect();
    let n_slabs = rng.gen_range(1..=5);
    let mut y = Rational::from_integer(0.into());
    let mut slabs = Vec::new();
    for _ in 0..n_slabs {
        if family.is_empty() {
            break;
        }
        let h = frac(rng.gen_range(1..=8), 4);
        let top: Vec<(Rational, Rational)> = family
            .iter()
            .map(|(a, b)| {
                if rng.gen_bool(0.4) {
                    (a.clone(), b.clone())
                } else {
                    let w = b - a;
                    (a + &w * frac(rng.gen_range(0..=4), 10), b - &w * frac(rng.gen_range(0..=4), 10))
                }
            })
            .collect();
        let intervals = family
            .iter()
            .zip(&top)
            .map(|((a, b), (c, d))| Interval {
                u: Affine::new(a.clone(), c.clone()),
                v: Affine::new(b.clone(), d.clone()),
            })
            .collect();
        let y_hi = &y + h;
        slabs.push(Slab {
            y_lo: y.clone(),
            y_hi: y_hi.clone(),
            intervals,
        });
        y = y_hi;
        family = shrink(rng, &top);
    }
    SlabSet::new(slabs).expect("generator produces valid slab sets")
}

/// A random set with a single interval per section and nested sections.
pub fn random_x_convex_set(rng: &mut impl Rng) -> SlabSet {
    loop {
        let s = random_schwarz_set(rng);
        let single: Vec<Slab> = s
            .slabs()
            .iter()
            .map(|slab| {
                let first = &slab.intervals[0];
                let last = slab.intervals.last().unwrap();
                Slab {
                    y_lo: slab.y_lo.clone(),
                    y_hi: slab.y_hi.clone(),
                    intervals: vec![Interval {
                        u: first.u.clone(),
                        v: last.v.clone(),
                    }],
                }
            })
            .collect();
        if let Ok(s) = SlabSet::new(single) {
            if s.validate_schwarz().is_ok() && !s.is_empty() {
                return s;
            }
        }
    }
}

/// A random piecewise-linear profile on `[a, b]` with values in `[lo, hi]`.
pub fn random_profile(rng: &mut impl Rng, a: f64, b: f64, lo: f64, hi: f64) -> SampledProfile {
    let n = rng.gen_range(3..=12);
    let mut xs: Vec<f64> = (0..n - 2).map(|_| rng.gen_range(a..b)).collect();
    xs.push(a);
    xs.push(b);
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    xs.dedup_by(|p, q| (*p - *q).abs() < 1e-3 * (b - a));
    *xs.last_mut().unwrap() = b;
    let ys = xs.iter().map(|_| rng.gen_range(lo..hi)).collect();
    SampledProfile::new(xs, ys).unwrap()
}

/// A random list of `1..=6` plane vectors of norm at most 10.
pub fn random_vectors(rng: &mut impl Rng) -> Vec<[f64; 2]> {
    let n = rng.gen_range(1..=6);
    (0..n)
        .map(|_| {
            let r = 10.0 * rng.gen::<f64>();
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            [r * t.cos(), r * t.sin()]
        })
        .collect()
}
