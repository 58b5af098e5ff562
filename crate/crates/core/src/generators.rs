//! Constructors for the example families used throughout the crate: discrete
//! spaces, arc-length circles, box-corner configurations, the L1 star, block
//! joins, and seeded random non-obtuse configurations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::embed::{self, AngleClassification, PointConfig};
use crate::error::{Error, Result};
use crate::l1geom::{l1_metric, L1Config};
use crate::measures::WeightVector;
use crate::metric::{diameter, validate_metric, DistanceMatrix, DEFAULT_TOL};

/// Discrete metric: every pair at distance 1.
pub fn gen_discrete(n: usize) -> DistanceMatrix {
    assert!(n >= 1);
    let mut data = vec![1.0; n * n];
    for i in 0..n {
        data[i * n + i] = 0.0;
    }
    DistanceMatrix::new(n, data).expect("discrete metric is well formed")
}

/// `k` equally spaced points on a circle of radius `rho` under the
/// arc-length metric: `d(i, j) = (2 pi rho / k) min(|i-j|, k-|i-j|)`.
pub fn gen_circle(k: usize, rho: f64) -> Result<DistanceMatrix> {
    if k < 2 {
        return Err(Error::Infeasible("a circle space needs at least two points".into()));
    }
    if rho <= 0.0 {
        return Err(Error::Infeasible("radius must be positive".into()));
    }
    let step = 2.0 * PI * rho / k as f64;
    let mut data = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            let gap = i.abs_diff(j);
            let hops = gap.min(k - gap) as f64;
            data[i * k + j] = step * hops;
        }
    }
    DistanceMatrix::new(k, data)
}

/// Indices of the canonical affinely independent corner subset: the all-plus
/// corner together with every single-sign-flip corner, `m + 1` points.
pub fn canonical_box_subset(m: usize) -> Vec<usize> {
    let mut indices = vec![0];
    indices.extend((0..m).map(|s| 1usize << s));
    indices
}

/// Corners `(+-a_1, ..., +-a_m)` of a rectangular box, or the chosen subset
/// of them, with the squared-Euclidean metric. Corner `mask` negates
/// coordinate `s` when bit `s` of `mask` is set.
pub fn gen_box_corners(
    half_sides: &[f64],
    subset: Option<&[usize]>,
) -> Result<(PointConfig, DistanceMatrix)> {
    let m = half_sides.len();
    if m == 0 {
        return Err(Error::Infeasible("box needs at least one coordinate".into()));
    }
    if half_sides.iter().any(|a| *a <= 0.0) {
        return Err(Error::Infeasible("half sides must be positive".into()));
    }
    let total = 1usize << m;
    let chosen: Vec<usize> = match subset {
        Some(list) => {
            for &i in list {
                if i >= total {
                    return Err(Error::Infeasible(format!(
                        "corner index {i} out of range for a {m}-coordinate box"
                    )));
                }
            }
            list.to_vec()
        }
        None => (0..total).collect(),
    };
    if chosen.is_empty() {
        return Err(Error::Infeasible("empty corner subset".into()));
    }

    let points: Vec<Vec<f64>> = chosen
        .iter()
        .map(|&mask| {
            (0..m)
                .map(|s| {
                    if mask & (1 << s) != 0 {
                        -half_sides[s]
                    } else {
                        half_sides[s]
                    }
                })
                .collect()
        })
        .collect();
    let labels = chosen.iter().map(|mask| format!("c{mask}")).collect();
    let config = PointConfig::with_labels(points, labels)?;
    let metric = embed::config_to_metric(&config)?;
    Ok((config, metric))
}

/// The star `{+-e_1, ..., +-e_n, 0}` in `(R^n, l1)`, its metric, and the
/// mass-1 measure with constant potential `n` (weight 1/2 on each unit
/// point, `-(n-1)` at the origin).
pub fn gen_star(n: usize) -> Result<(L1Config, DistanceMatrix, WeightVector)> {
    if n < 2 {
        return Err(Error::Infeasible("the star family starts at dimension 2".into()));
    }
    let mut points = Vec::with_capacity(2 * n + 1);
    let mut labels = Vec::with_capacity(2 * n + 1);
    let mut weights = Vec::with_capacity(2 * n + 1);
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut p = vec![0.0; n];
            p[i] = sign;
            points.push(p);
            labels.push(format!("{}e{}", if sign > 0.0 { "+" } else { "-" }, i + 1));
            weights.push(0.5);
        }
    }
    points.push(vec![0.0; n]);
    labels.push("z".into());
    weights.push(-(n as f64 - 1.0));

    let config = L1Config::with_labels(points, labels)?;
    let metric = l1_metric(&config)?;
    Ok((config, metric, WeightVector::new(weights)))
}

/// Two component spaces glued at a constant cross distance.
#[derive(Debug, Clone)]
pub struct JoinSpec {
    pub first: DistanceMatrix,
    pub second: DistanceMatrix,
    /// Distance between any point of `first` and any point of `second`.
    pub cross: f64,
}

/// Block metric of a join: the components keep their metrics and every
/// cross pair sits at distance `cross`. Requires `2 cross >= max(diam)`,
/// otherwise the triangle inequality fails through the other block.
pub fn gen_join(spec: &JoinSpec) -> Result<DistanceMatrix> {
    if spec.cross <= 0.0 {
        return Err(Error::Infeasible("cross distance must be positive".into()));
    }
    let max_diam = diameter(&spec.first).max(diameter(&spec.second));
    if 2.0 * spec.cross < max_diam * (1.0 - 1e-12) {
        return Err(Error::Infeasible(format!(
            "cross distance {} too small for component diameter {max_diam}",
            spec.cross
        )));
    }
    let n1 = spec.first.n();
    let n2 = spec.second.n();
    let n = n1 + n2;
    let mut data = vec![spec.cross; n * n];
    for i in 0..n1 {
        for j in 0..n1 {
            data[i * n + j] = spec.first.get(i, j);
        }
    }
    for i in 0..n2 {
        for j in 0..n2 {
            data[(n1 + i) * n + (n1 + j)] = spec.second.get(i, j);
        }
    }
    let d = DistanceMatrix::new(n, data)?;
    let report = validate_metric(&d, DEFAULT_TOL);
    if !report.ok {
        return Err(Error::Internal(format!(
            "join violated the metric axioms: {:?}",
            report.violations.first()
        )));
    }
    Ok(d)
}

/// Join of a discrete `m`-point space with a discrete pair at the critical
/// cross distance `(m-1)/(2m) + 1/4 + eps`. Strictly quasihypermetric, and
/// for `0 < eps <= (m+2)/(4m)` it has diameter 1 while M grows like
/// `1/(32 eps)`; the small-`eps` end is the standard witness that M is
/// unbounded over diameter-1 strict spaces.
pub fn gen_join_discrete_pair(m: usize, eps: f64) -> Result<DistanceMatrix> {
    if m < 3 {
        return Err(Error::Infeasible("the pair join needs at least three left points".into()));
    }
    if eps <= 0.0 {
        return Err(Error::Infeasible("eps must be positive".into()));
    }
    let mf = m as f64;
    let cross = (mf - 1.0) / (2.0 * mf) + 0.25 + eps;
    gen_join(&JoinSpec {
        first: gen_discrete(m),
        second: gen_discrete(2),
        cross,
    })
}

/// Join of a discrete `m`-point space with four equally spaced circle points
/// of radius `2/(pi m)` at cross distance `1/2 + eps`. Quasihypermetric but
/// not strictly so; dropping one circle point restores strictness. For
/// `0 < eps <= 1/2` the diameter is 1 while M grows like `1/(8 eps)`.
pub fn gen_join_discrete_cycle(m: usize, eps: f64) -> Result<DistanceMatrix> {
    if m < 3 {
        return Err(Error::Infeasible("the cycle join needs at least three left points".into()));
    }
    if eps <= 0.0 {
        return Err(Error::Infeasible("eps must be positive".into()));
    }
    gen_join(&JoinSpec {
        first: gen_discrete(m),
        second: gen_circle(4, 2.0 / (PI * m as f64))?,
        cross: 0.5 + eps,
    })
}

const REPAIR_ITERS: usize = 400;
const SEPARATION_FLOOR: f64 = 1e-3;

fn max_sq_dist_of(points: &[Vec<f64>]) -> f64 {
    let k = points.len();
    let mut best = 0.0_f64;
    for i in 0..k {
        for j in (i + 1)..k {
            best = best.max(embed::euclid_sq(&points[i], &points[j]));
        }
    }
    best.max(f64::MIN_POSITIVE)
}

/// Pushes the configuration into the non-obtuse region. Each sweep walks all
/// triples and moves the vertex of any obtuse angle along the gradient of
/// the violated dot product (the exact step that zeroes it), optionally
/// reprojecting onto the unit sphere. Returns success.
pub(crate) fn repair_nonobtuse(
    points: &mut [Vec<f64>],
    on_sphere: bool,
    rng: &mut ChaCha8Rng,
) -> bool {
    let k = points.len();
    if k < 3 {
        return true;
    }
    let dim = points[0].len();
    for _ in 0..REPAIR_ITERS {
        let scale = max_sq_dist_of(points);
        // the fix target must sit well inside the acceptance band, or the
        // sweeps see-saw at the band edge forever
        let stop = -1e-12 * scale;
        let mut clean = true;
        for at in 0..k {
            for a in 0..k {
                if a == at {
                    continue;
                }
                for b in (a + 1)..k {
                    if b == at {
                        continue;
                    }
                    let dot: f64 = (0..dim)
                        .map(|t| (points[a][t] - points[at][t]) * (points[b][t] - points[at][t]))
                        .sum();
                    if dot >= stop {
                        continue;
                    }
                    clean = false;
                    // gradient of (p_a - q).(p_b - q) in q is 2q - p_a - p_b;
                    // on the sphere only its tangential part is usable, and
                    // the renormalization error is then second order
                    let mut grad: Vec<f64> = (0..dim)
                        .map(|t| 2.0 * points[at][t] - points[a][t] - points[b][t])
                        .collect();
                    if on_sphere {
                        let radial: f64 = grad
                            .iter()
                            .zip(&points[at])
                            .map(|(g, q)| g * q)
                            .sum();
                        for (g, q) in grad.iter_mut().zip(&points[at]) {
                            *g -= radial * q;
                        }
                    }
                    let g2: f64 = grad.iter().map(|x| x * x).sum();
                    if g2 <= 1e-18 * scale {
                        for coord in points[at].iter_mut() {
                            *coord += 1e-3 * scale.sqrt() * rng.gen_range(-1.0..1.0);
                        }
                    } else {
                        // along the (tangential) gradient the dot evolves as
                        // f + t (1 + t) |g|^2; solve for the target exactly
                        let target = -dot + 1e-14 * scale;
                        let step = 0.5 * ((1.0 + 4.0 * target / g2).sqrt() - 1.0);
                        for t in 0..dim {
                            points[at][t] += step * grad[t];
                        }
                    }
                    if on_sphere {
                        let norm: f64 =
                            points[at].iter().map(|x| x * x).sum::<f64>().sqrt();
                        if norm > 1e-12 {
                            points[at].iter_mut().for_each(|x| *x /= norm);
                        }
                    }
                }
            }
        }
        if clean {
            return true;
        }
    }
    false
}

fn min_separation(points: &[Vec<f64>]) -> f64 {
    let k = points.len();
    let mut best = f64::INFINITY;
    for i in 0..k {
        for j in (i + 1)..k {
            best = best.min(embed::euclid(&points[i], &points[j]));
        }
    }
    best
}

fn sample_config(
    n: usize,
    dim: usize,
    on_sphere: bool,
    seed: u64,
    attempts: usize,
) -> Result<PointConfig> {
    if n > (1usize << dim) {
        return Err(Error::Infeasible(format!(
            "no non-obtuse configuration of {n} points fits in dimension {dim} \
             (limit {})",
            1usize << dim
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..attempts {
        let mut points: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        if on_sphere {
            for p in points.iter_mut() {
                let norm: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm < 1e-6 {
                    p[0] = 1.0;
                } else {
                    p.iter_mut().for_each(|x| *x /= norm);
                }
            }
        }
        if !repair_nonobtuse(&mut points, on_sphere, &mut rng) {
            continue;
        }
        if min_separation(&points) < SEPARATION_FLOOR {
            continue;
        }
        let config = PointConfig::new(points)?;
        if !matches!(
            embed::angle_classification(&config, DEFAULT_TOL)?,
            AngleClassification::Obtuse { .. }
        ) {
            return Ok(config);
        }
    }
    Err(Error::AttemptsExhausted(attempts))
}

/// Seeded random non-obtuse configuration of `n` points in dimension `dim`.
/// Infeasible when `n > 2^dim`. Deterministic for a given seed.
pub fn gen_random_nonobtuse(
    n: usize,
    dim: usize,
    seed: u64,
    attempts: usize,
) -> Result<PointConfig> {
    sample_config(n, dim, false, seed, attempts)
}

/// Like [`gen_random_nonobtuse`], with the points constrained to the unit
/// sphere. Such configurations always carry finite M.
pub fn gen_random_nonobtuse_on_sphere(
    n: usize,
    dim: usize,
    seed: u64,
    attempts: usize,
) -> Result<PointConfig> {
    sample_config(n, dim, true, seed, attempts)
}
