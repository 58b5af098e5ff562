//! Randomized lower-bound search for the extremal ratio M/D over spaces of a
//! given cardinality whose maximal strict subspaces have a given size.
//!
//! Candidate spaces are realized as point configurations on the unit sphere
//! in dimension `r - 1`: squared distances of a non-obtuse spherical
//! configuration form a quasihypermetric metric with finite M, and when the
//! configuration spans, the distance matrix has rank exactly `r`, which
//! pins the maximal strict cardinality at `r`. The ratio M/D is invariant
//! under similarity, so growing the sphere against a fixed diameter and
//! shrinking the diameter on a fixed sphere are the same search; the
//! implementation does the latter.
//!
//! Moves are tangent perturbations of a single point followed by a repair
//! pass that projects back into the non-obtuse region. Equal-ratio moves are
//! accepted, which lets the walk drift along the flat ridges these
//! constraint surfaces are full of.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{self};
use crate::embed::{self, AngleClassification, PointConfig};
use crate::error::{Error, Result};
use crate::generators;
use crate::measures::{self, MValue};
use crate::metric::{DistanceMatrix, DEFAULT_TOL};
use crate::par;
use crate::subspace;

const RESTARTS: usize = 8;
// keeps configurations away from coincidence; also bounds how close the
// flattening families can push their ratios toward the open suprema
const SEPARATION_FLOOR: f64 = 1e-2;

#[derive(Debug, Clone, serde::Serialize)]
pub struct KnrResult {
    pub n: usize,
    pub r: usize,
    /// Best M/D found across restarts.
    pub best_ratio: f64,
    /// Unit-sphere configuration attaining the best ratio (serialized as raw
    /// coordinate rows).
    #[serde(serialize_with = "serialize_config")]
    pub config: PointConfig,
    /// (move index, ratio) samples from the winning restart, recorded at
    /// each improvement.
    pub history: Vec<(u64, f64)>,
}

fn serialize_config<S: serde::Serializer>(p: &PointConfig, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::Serialize;
    p.points().serialize(s)
}

pub fn feasible_cell(n: usize, r: usize) -> bool {
    n >= 2 && r >= 2 && r <= n && (r - 1) < usize::BITS as usize && n <= (1usize << (r - 1))
}

/// Squared distances without the angle gate; candidates are certified
/// spectrally instead.
fn squared_metric(points: &[Vec<f64>]) -> Result<DistanceMatrix> {
    let k = points.len();
    let mut data = vec![0.0; k * k];
    for i in 0..k {
        for j in (i + 1)..k {
            let ds = embed::euclid_sq(&points[i], &points[j]);
            data[i * k + j] = ds;
            data[j * k + i] = ds;
        }
    }
    DistanceMatrix::new(k, data)
}

/// M/D when the space carries the full type certificate: quasihypermetric,
/// finite M, and distance-matrix rank `r` (which fixes the maximal strict
/// cardinality at `r`). `None` otherwise.
fn certified_ratio(d: &DistanceMatrix, r: usize, tol: f64) -> Option<f64> {
    let analysis = classify::analyze(d, tol);
    if !analysis.quasihypermetric {
        return None;
    }
    if subspace::rank_unchecked(d) != r {
        return None;
    }
    match measures::m_value_with_analysis(d, tol, &analysis).ok()? {
        MValue::Finite { value, .. } => Some(value / d.max_entry()),
        _ => None,
    }
}

/// Box corners scaled onto the unit sphere: the canonical affinely
/// independent subset first, then further corners in mask order.
fn box_start(n: usize, r: usize) -> Vec<Vec<f64>> {
    let m = r - 1;
    let side = 1.0 / (m as f64).sqrt();
    let mut order = generators::canonical_box_subset(m);
    for mask in 0..(1usize << m) {
        if !order.contains(&mask) {
            order.push(mask);
        }
    }
    order.truncate(n);
    order
        .into_iter()
        .map(|mask| {
            (0..m)
                .map(|s| if mask & (1 << s) != 0 { -side } else { side })
                .collect()
        })
        .collect()
}

/// Regular simplex on the unit sphere (the embedding of the discrete
/// space), for cells with n = r.
fn simplex_start(n: usize) -> Result<Vec<Vec<f64>>> {
    let p = embed::schoenberg_embed(&generators::gen_discrete(n), DEFAULT_TOL)?;
    let radius: f64 = p.points()[0].iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(p.points()
        .iter()
        .map(|pt| pt.iter().map(|x| x / radius).collect())
        .collect())
}

/// Two parallel regular simplices at heights +-h, for cells with
/// n = 2 (r - 1). The prism family reaches ratios approaching the known
/// suprema as it flattens.
fn prism_start(n: usize, r: usize, h: f64) -> Result<Vec<Vec<f64>>> {
    let per_level = n / 2;
    debug_assert_eq!(per_level, r - 2 + 1);
    let horizontal = simplex_start(per_level)?;
    let horiz_dim = per_level - 1;
    let rho = (1.0 - h * h).sqrt();
    let mut points = Vec::with_capacity(n);
    for level in [h, -h] {
        for base in &horizontal {
            let mut p = vec![0.0; r - 1];
            p[..horiz_dim.min(r - 1)].copy_from_slice(&base[..horiz_dim.min(r - 1)]);
            p.iter_mut().take(horiz_dim).for_each(|x| *x *= rho);
            p[r - 2] = level;
            points.push(p);
        }
    }
    Ok(points)
}

fn start_points(
    n: usize,
    r: usize,
    restart: usize,
    seed: u64,
) -> Option<Vec<Vec<f64>>> {
    match restart {
        0 => Some(box_start(n, r)),
        1 if n == r => simplex_start(n).ok(),
        1 | 2 if n == 2 * (r - 1) && n >= 4 => prism_start(n, r, 0.5).ok(),
        _ => generators::gen_random_nonobtuse_on_sphere(
            n,
            r - 1,
            seed ^ 0xabc0_de00 ^ restart as u64,
            60,
        )
        .ok()
        .map(|c| c.points().to_vec()),
    }
}

struct RestartOutcome {
    best_ratio: f64,
    best_points: Vec<Vec<f64>>,
    history: Vec<(u64, f64)>,
}

fn run_restart(
    n: usize,
    r: usize,
    moves: u64,
    seed: u64,
    restart: usize,
    threshold: Option<f64>,
    tol: f64,
) -> Option<RestartOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (restart as u64).wrapping_mul(0x9e37_79b9_85eb_ca87));
    let mut points = start_points(n, r, restart, seed)?;
    let d = squared_metric(&points).ok()?;
    let mut current = certified_ratio(&d, r, tol)?;

    let mut best_ratio = current;
    let mut best_points = points.clone();
    let mut history = vec![(0u64, current)];

    let sigma_hi = 0.15_f64;
    let sigma_lo = 0.004_f64;

    for step in 0..moves {
        if let Some(t) = threshold {
            if best_ratio >= t {
                break;
            }
        }
        let frac = step as f64 / moves.max(1) as f64;
        let sigma = sigma_hi * (sigma_lo / sigma_hi).powf(frac);

        // mix of local and global proposals: single-point tangent jitter
        // explores, the squash and contraction families walk the flat
        // ridges (prisms, boxes) that single-point moves cannot follow
        let kind = rng.gen_range(0..5u8);
        let Some(mut cand) = propose(&points, kind, sigma, &mut rng) else {
            continue;
        };

        if !generators::repair_nonobtuse(&mut cand, true, &mut rng) {
            continue;
        }
        if min_sep(&cand) < SEPARATION_FLOOR {
            continue;
        }
        let Ok(dm) = squared_metric(&cand) else { continue };
        let Some(ratio) = certified_ratio(&dm, r, tol) else {
            continue;
        };
        if ratio >= current {
            points = cand;
            current = ratio;
            if ratio > best_ratio {
                best_ratio = ratio;
                best_points = points.clone();
                history.push((step + 1, ratio));
            }
        }
    }

    Some(RestartOutcome {
        best_ratio,
        best_points,
        history,
    })
}

fn renormalize(v: &mut [f64]) -> bool {
    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm < 1e-9 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= norm);
    true
}

fn propose(
    points: &[Vec<f64>],
    kind: u8,
    sigma: f64,
    rng: &mut ChaCha8Rng,
) -> Option<Vec<Vec<f64>>> {
    let n = points.len();
    let dim = points[0].len();
    let mut cand = points.to_vec();
    match kind {
        0 | 1 => {
            let idx = rng.gen_range(0..n);
            for coord in cand[idx].iter_mut() {
                *coord += sigma * gauss(rng);
            }
            if !renormalize(&mut cand[idx]) {
                return None;
            }
        }
        2 => {
            // squash along a coordinate axis
            // TODO: squash along principal axes of the current configuration
            // instead, so the walk stops relying on structured inits being
            // axis-aligned
            let axis = rng.gen_range(0..dim);
            let delta = sigma * rng.gen_range(0.0..1.0);
            for p in cand.iter_mut() {
                p[axis] *= 1.0 - delta;
                if !renormalize(p) {
                    return None;
                }
            }
        }
        3 => {
            // squash along a random direction
            let mut u: Vec<f64> = (0..dim).map(|_| gauss(rng)).collect();
            if !renormalize(&mut u) {
                return None;
            }
            let delta = sigma * rng.gen_range(0.0..1.0);
            for p in cand.iter_mut() {
                let along: f64 = p.iter().zip(&u).map(|(a, b)| a * b).sum();
                for (pt, ut) in p.iter_mut().zip(&u) {
                    *pt -= delta * along * ut;
                }
                if !renormalize(p) {
                    return None;
                }
            }
        }
        _ => {
            // contract the whole configuration toward a sphere point
            let mut c: Vec<f64> = (0..dim).map(|_| gauss(rng)).collect();
            if !renormalize(&mut c) {
                return None;
            }
            let delta = sigma * rng.gen_range(0.0..1.0);
            for p in cand.iter_mut() {
                for (pt, ct) in p.iter_mut().zip(&c) {
                    *pt += delta * (ct - *pt);
                }
                if !renormalize(p) {
                    return None;
                }
            }
        }
    }
    Some(cand)
}

fn min_sep(points: &[Vec<f64>]) -> f64 {
    let k = points.len();
    let mut best = f64::INFINITY;
    for i in 0..k {
        for j in (i + 1)..k {
            best = best.min(embed::euclid(&points[i], &points[j]));
        }
    }
    best
}

fn gauss(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller; two uniforms per draw keeps the stream deterministic
    let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let v: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    (-2.0 * u.ln()).sqrt() * v.cos()
}

/// Hill-climbing lower-bound search over certified configurations.
///
/// `budget` counts move proposals across all restarts; the search is
/// deterministic given `(budget, seed)` and independent of thread count.
/// With `threshold` set, restarts stop as soon as they reach it (used for
/// cells where the supremum is known to be infinite). The returned
/// configuration is re-verified end to end.
pub fn knr_lower_bound_search(
    n: usize,
    r: usize,
    budget: u64,
    seed: u64,
    threshold: Option<f64>,
) -> Result<KnrResult> {
    if !feasible_cell(n, r) {
        return Err(Error::Infeasible(format!(
            "no space of type ({n}, {r}): need 2 <= r <= n <= 2^(r-1)"
        )));
    }
    let tol = DEFAULT_TOL;
    let moves = (budget / RESTARTS as u64).max(1);
    let outcomes = par::indexed_map(RESTARTS, |restart| {
        run_restart(n, r, moves, seed, restart, threshold, tol)
    });

    let mut best: Option<(usize, RestartOutcome)> = None;
    for (idx, outcome) in outcomes.into_iter().enumerate() {
        let Some(o) = outcome else { continue };
        let better = match &best {
            None => true,
            Some((_, b)) => o.best_ratio > b.best_ratio,
        };
        if better {
            best = Some((idx, o));
        }
    }
    let (_, winner) = best.ok_or(Error::AttemptsExhausted(RESTARTS))?;

    let config = PointConfig::new(winner.best_points)?;
    verify_result(&config, r, tol)?;
    Ok(KnrResult {
        n,
        r,
        best_ratio: winner.best_ratio,
        config,
        history: winner.history,
    })
}

/// Full re-validation of a reported configuration: non-obtuse angles, a
/// quasihypermetric metric, finite M, and maximal strict cardinality `r`.
fn verify_result(config: &PointConfig, r: usize, tol: f64) -> Result<()> {
    if matches!(
        embed::angle_classification(config, tol)?,
        AngleClassification::Obtuse { .. }
    ) {
        return Err(Error::Internal("reported configuration has an obtuse angle".into()));
    }
    let d = embed::config_to_metric(config)?;
    let sub = subspace::maximal_strict_subspace(&d, tol)?;
    if sub.cardinality != r {
        return Err(Error::Internal(format!(
            "reported configuration has maximal strict cardinality {} instead of {r}",
            sub.cardinality
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct MonotonicityEntry {
    pub n: usize,
    pub best_ratio: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct MonotonicityReport {
    pub r: usize,
    pub entries: Vec<MonotonicityEntry>,
    /// Whether the empirical lower bounds weakly decrease in n. Informational
    /// only: lower bounds need not inherit the monotonicity of the suprema.
    pub consistent: bool,
}

/// Runs the search across a range of cardinalities at fixed `r` and reports
/// whether the empirical bounds are consistent with the monotone decrease of
/// the true suprema.
pub fn knr_monotonicity_probe(
    r: usize,
    n_values: &[usize],
    budget: u64,
    seed: u64,
) -> Result<MonotonicityReport> {
    for &n in n_values {
        if !feasible_cell(n, r) {
            return Err(Error::Infeasible(format!("cell ({n}, {r}) is infeasible")));
        }
    }
    let mut entries = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let result = knr_lower_bound_search(n, r, budget, seed, None)?;
        entries.push(MonotonicityEntry {
            n,
            best_ratio: result.best_ratio,
        });
    }
    let consistent = entries
        .windows(2)
        .all(|w| w[0].best_ratio >= w[1].best_ratio - 1e-9);
    Ok(MonotonicityReport {
        r,
        entries,
        consistent,
    })
}
