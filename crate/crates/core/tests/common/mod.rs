//! Shared test support: the brute-force energy oracle and the seeded corpus
//! of random non-obtuse configuration spaces.
#![allow(dead_code)]
//!
//! The oracle estimates `sup a' D a` over unit mass-zero vectors from below
//! using only energy evaluations (random grid plus exact line maximization
//! over great circles), staying independent of the spectral kernel the
//! library itself uses.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qhm::{
    config_to_metric, diameter, gen_random_nonobtuse, gen_random_nonobtuse_on_sphere, m_value,
    rank_distance_matrix, validate_metric, DistanceMatrix, MValue, PointConfig, DEFAULT_TOL,
};

pub fn quad_form(d: &DistanceMatrix, v: &[f64]) -> f64 {
    let n = d.n();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            total += v[i] * d.get(i, j) * v[j];
        }
    }
    total
}

fn bilinear(d: &DistanceMatrix, v: &[f64], w: &[f64]) -> f64 {
    let mut total = 0.0;
    for (i, vi) in v.iter().enumerate() {
        for (j, wj) in w.iter().enumerate() {
            total += vi * d.get(i, j) * wj;
        }
    }
    total
}

/// Projects onto the mass-zero hyperplane and normalizes. False if nothing
/// significant remains.
fn project_unit(v: &mut [f64]) -> bool {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    v.iter_mut().for_each(|x| *x -= mean);
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-12 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

/// Lower estimate of `sup a' D a` over unit mass-zero vectors.
///
/// Random starts followed by exact maximization along great circles spanned
/// with (projected) coordinate-difference directions. Converges to the true
/// supremum on these small instances; used to fix classification verdicts
/// independently of the eigensolver.
pub fn grid_sup_mass_zero(d: &DistanceMatrix, samples: usize, sweeps: usize, seed: u64) -> f64 {
    let n = d.n();
    assert!(n >= 2, "mass-zero directions need at least two points");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..samples {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        if !project_unit(&mut v) {
            continue;
        }
        let value = quad_form(d, &v);
        if best.as_ref().is_none_or(|(b, _)| value > *b) {
            best = Some((value, v));
        }
    }
    let (_, mut v) = best.expect("at least one valid sample");

    for _ in 0..sweeps {
        for i in 0..n {
            for j in (i + 1)..n {
                let mut w = vec![0.0; n];
                w[i] = 1.0;
                w[j] = -1.0;
                // stay in the mass-zero sphere: orthogonalize against v
                let along: f64 = w.iter().zip(&v).map(|(a, b)| a * b).sum();
                for (wt, vt) in w.iter_mut().zip(&v) {
                    *wt -= along * vt;
                }
                if !project_unit(&mut w) {
                    continue;
                }
                let fvv = quad_form(d, &v);
                let fww = quad_form(d, &w);
                let fvw = bilinear(d, &v, &w);
                let theta = 0.5 * (2.0 * fvw).atan2(fvv - fww);
                let (c, s) = (theta.cos(), theta.sin());
                let cand: Vec<f64> = v.iter().zip(&w).map(|(a, b)| c * a + s * b).collect();
                if quad_form(d, &cand) > fvv {
                    v = cand;
                    project_unit(&mut v);
                }
            }
        }
    }
    quad_form(d, &v)
}

pub struct CorpusSpace {
    pub name: String,
    pub config: PointConfig,
    pub metric: DistanceMatrix,
}

/// Seeded corpus of random non-obtuse configuration spaces with 3 to 8
/// points, mixing three regimes: full-dimensional simplexes (strict, finite
/// M), general-position configurations (mostly infinite M), and
/// on-sphere configurations (finite M, mostly non-strict). Ill-conditioned
/// draws whose numerical rank depends on the cutoff are redrawn.
pub fn build_corpus(count: usize, seed: u64) -> Vec<CorpusSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut draw = 0u64;
    while out.len() < count {
        draw += 1;
        let mode = out.len() % 3;
        let sample_seed = seed ^ draw.wrapping_mul(0x9e37_79b9_85eb_ca87);
        let config = match mode {
            0 => {
                let n = rng.gen_range(3..=6usize);
                gen_random_nonobtuse(n, n - 1, sample_seed, 30)
            }
            1 => {
                let n = rng.gen_range(3..=8usize);
                let dim = match n {
                    3 => 2,
                    4..=7 => 3,
                    _ => 4,
                };
                gen_random_nonobtuse(n, dim, sample_seed, 30)
            }
            _ => {
                let n = rng.gen_range(4..=7usize);
                let dim = match n {
                    4 => 3,
                    5 => 3,
                    6 => 4,
                    _ => 4,
                };
                gen_random_nonobtuse_on_sphere(n, dim, sample_seed, 30)
            }
        };
        let Ok(config) = config else { continue };
        let Ok(raw_metric) = config_to_metric(&config) else {
            continue;
        };
        // normalize to diameter 1 (repair can inflate the sampled points);
        // squared distances scale with the square of the coordinates
        let shrink = 1.0 / diameter(&raw_metric).sqrt();
        let config = PointConfig::new(
            config
                .points()
                .iter()
                .map(|p| p.iter().map(|x| x * shrink).collect())
                .collect(),
        )
        .unwrap();
        let Ok(metric) = config_to_metric(&config) else {
            continue;
        };
        if !validate_metric(&metric, DEFAULT_TOL).ok {
            continue;
        }
        // conditioning screen: the rank must be stable across four decades
        // of spectral cutoff
        let r_lo = rank_distance_matrix(&metric, 1e-11).unwrap();
        let r_hi = rank_distance_matrix(&metric, 1e-5).unwrap();
        if r_lo != r_hi {
            continue;
        }
        // boundary screen: draws straddling the finite/infinite divide come
        // out with enormous M; their behavior is reported, not guaranteed
        match m_value(&metric, DEFAULT_TOL) {
            Ok(MValue::Finite { value, .. }) if value <= 50.0 * diameter(&metric) => {}
            Ok(MValue::Infinite) => {}
            _ => continue,
        }
        out.push(CorpusSpace {
            name: format!("corpus[{}] mode{} n{}", out.len(), mode, metric.n()),
            config,
            metric,
        });
    }
    out
}
