//! Signed measures on a finite space as weight vectors: energies, potentials,
//! d-invariant measures, and the constant M(X) with its finite/infinite
//! dichotomy.
//!
//! With weights `a` for the measure `sum_i a_i delta_{x_i}`, the energy is
//! `I = a' D a`, the potential is `D a`, and a d-invariant measure solves
//! `D a = c 1`. On a quasihypermetric space a mass-1 d-invariant measure is
//! maximal with `M(X) = c`, and `M(X)` is finite exactly when the all-ones
//! vector lies in the column space of `D`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{self, SpectralAnalysis};
use crate::error::{Error, Result};
use crate::matrix::{self};
use crate::metric::{require_metric, DistanceMatrix, EIG_REL_TOL};
use crate::par;

/// Coefficients of a signed measure supported on the points of a space.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(from = "Vec<f64>", into = "Vec<f64>")]
pub struct WeightVector {
    weights: Vec<f64>,
    mass: f64,
}

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Self {
        let mut terms = weights.clone();
        let mass = matrix::pairwise_sum(&mut terms);
        Self { weights, mass }
    }

    /// Point measure at index `i` on an `n`-point space.
    pub fn delta(n: usize, i: usize) -> Self {
        let mut w = vec![0.0; n];
        w[i] = 1.0;
        Self::new(w)
    }

    pub fn uniform(n: usize) -> Self {
        Self::new(vec![1.0 / n as f64; n])
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(self.weights.iter().map(|x| factor * x).collect())
    }

    /// Componentwise difference; lengths must match.
    pub fn minus(&self, other: &WeightVector) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self::new(
            self.weights
                .iter()
                .zip(&other.weights)
                .map(|(a, b)| a - b)
                .collect(),
        ))
    }
}

impl From<Vec<f64>> for WeightVector {
    fn from(weights: Vec<f64>) -> Self {
        Self::new(weights)
    }
}

impl From<WeightVector> for Vec<f64> {
    fn from(w: WeightVector) -> Self {
        w.weights
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Energy `I(mu) = a' D a`.
pub fn energy(d: &DistanceMatrix, mu: &WeightVector) -> Result<f64> {
    energy_pair(d, mu, mu)
}

/// Bilinear energy `I(mu, nu) = a' D b`; symmetric in its arguments.
/// `(mu | nu) = -I(mu, nu)` is a semi-inner product on mass-zero measures of
/// a quasihypermetric space.
pub fn energy_pair(d: &DistanceMatrix, mu: &WeightVector, nu: &WeightVector) -> Result<f64> {
    check_len(d.n(), mu.len())?;
    check_len(d.n(), nu.len())?;
    let n = d.n();
    let mut terms = Vec::with_capacity(n);
    for i in 0..n {
        if mu.weights()[i] == 0.0 {
            terms.push(0.0);
            continue;
        }
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(d.get(i, j) * nu.weights()[j]);
        }
        terms.push(mu.weights()[i] * matrix::pairwise_sum(&mut row));
    }
    Ok(matrix::pairwise_sum(&mut terms))
}

/// Potential `d_mu`: the function `x -> integral of d(x, .) against mu`,
/// sampled at every point. In coordinates this is `D a`.
pub fn potential(d: &DistanceMatrix, mu: &WeightVector) -> Result<Vec<f64>> {
    check_len(d.n(), mu.len())?;
    Ok(matrix::mat_vec(d.n(), d.as_slice(), mu.weights()))
}

/// Mass-1 measure with constant potential, together with its value `c`.
///
/// Solves `D a = 1` by minimum-norm least squares. A mass-1 invariant
/// measure exists exactly when the system is consistent (relative residual
/// below `tol`) with a solution of nonzero mass; the mass-1 rescaling then
/// has value `c = 1 / sum(a)`. Returns `None` otherwise — note that a
/// nonsingular distance matrix makes the system consistent while the
/// solution mass can still vanish, which is how finite spaces with
/// unbounded energy and nonsingular matrices show up.
pub fn invariant_measure(
    d: &DistanceMatrix,
    tol: f64,
) -> Result<Option<(WeightVector, f64)>> {
    require_metric(d, tol)?;
    invariant_measure_unchecked(d, tol)
}

const MASS_REL_FLOOR: f64 = 1e-10;

pub(crate) fn invariant_measure_unchecked(
    d: &DistanceMatrix,
    tol: f64,
) -> Result<Option<(WeightVector, f64)>> {
    let n = d.n();
    let ones = vec![1.0; n];
    let eig = matrix::sym_eigen(n, d.as_slice());
    let x = eig.min_norm_solve(&ones, EIG_REL_TOL);
    let dx = matrix::mat_vec(n, d.as_slice(), &x);
    let residual: f64 = dx
        .iter()
        .zip(&ones)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    if residual > tol.max(1e-12) * (n as f64).sqrt() {
        return Ok(None);
    }
    let solution = WeightVector::new(x);
    let mass = solution.mass();
    let size: f64 = solution.weights().iter().map(|v| v.abs()).sum();
    if mass.abs() <= MASS_REL_FLOOR * size.max(1.0) {
        return Ok(None);
    }
    let c = 1.0 / mass;
    Ok(Some((solution.scaled(c), c)))
}

/// The constant `M(X) = sup I(mu)` over mass-1 measures.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum MValue {
    Finite {
        value: f64,
        /// The mass-1 d-invariant (maximal) measure attaining the supremum.
        invariant: WeightVector,
    },
    Infinite,
    NotQuasihypermetric,
}

impl MValue {
    pub fn finite_value(&self) -> Option<f64> {
        match self {
            MValue::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }
}

/// Computes `M(X)` with the finite/infinite dichotomy.
///
/// Spaces failing the quasihypermetric test get `NotQuasihypermetric` (the
/// supremum theory presumes the property). Otherwise `M` is finite exactly
/// when a mass-1 d-invariant measure exists, which then attains the
/// supremum; with no such measure the supremum is unbounded.
pub fn m_value(d: &DistanceMatrix, tol: f64) -> Result<MValue> {
    require_metric(d, tol)?;
    let analysis = classify::analyze(d, tol);
    m_value_with_analysis(d, tol, &analysis)
}

pub(crate) fn m_value_with_analysis(
    d: &DistanceMatrix,
    tol: f64,
    analysis: &SpectralAnalysis,
) -> Result<MValue> {
    if !analysis.quasihypermetric {
        return Ok(MValue::NotQuasihypermetric);
    }
    let n = d.n();
    if n == 1 {
        return Ok(MValue::Finite {
            value: 0.0,
            invariant: WeightVector::new(vec![1.0]),
        });
    }
    match invariant_measure_unchecked(d, tol)? {
        Some((invariant, value)) => {
            if value <= 0.0 {
                return Err(Error::Internal(format!(
                    "nonpositive invariant value {value:.3e} on a {n}-point quasihypermetric space"
                )));
            }
            Ok(MValue::Finite { value, invariant })
        }
        None => Ok(MValue::Infinite),
    }
}

const ORACLE_RESTARTS: usize = 32;
const ORACLE_SEED: u64 = 0x7d5f_23a1;

/// Independent estimate of `M(X)`: projected first-order ascent of `a' D a`
/// over the affine set `sum(a) = 1`, with random restarts. Conjugate update
/// directions with exact line search make the ascent finite-step-exact on
/// these quadratics up to roundoff, so ill conditioning costs iterations,
/// not accuracy. The form is concave on the affine set of a
/// quasihypermetric space, so the best value found approaches `M(X)` from
/// below. Uses only matrix-vector products; best-effort, never errors.
pub fn m_value_oracle(d: &DistanceMatrix, budget: usize) -> Result<f64> {
    require_metric(d, crate::metric::DEFAULT_TOL)?;
    let n = d.n();
    if n == 1 {
        return Ok(0.0);
    }

    let runs = par::indexed_map(ORACLE_RESTARTS, |restart| {
        let mut rng = ChaCha8Rng::seed_from_u64(ORACLE_SEED ^ (restart as u64).wrapping_mul(0x9e37_79b9));
        let mut x = start_point(n, restart, &mut rng);
        ascend(d, &mut x, budget);
        quad(d, &x)
    });

    Ok(runs.into_iter().fold(f64::NEG_INFINITY, f64::max))
}

/// Conjugate-direction ascent restricted to the mass-zero tangent space.
fn ascend(d: &DistanceMatrix, x: &mut [f64], budget: usize) {
    let n = d.n();
    let project = |v: &mut [f64]| {
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|t| *t -= mean);
    };

    let mut prev_pg: Option<Vec<f64>> = None;
    let mut dir = vec![0.0; n];
    for _ in 0..budget {
        let mut pg = matrix::mat_vec(n, d.as_slice(), x);
        pg.iter_mut().for_each(|t| *t *= 2.0);
        project(&mut pg);
        if matrix::norm2(&pg) <= 1e-10 {
            break;
        }

        // Polak-Ribiere memory, reset on loss of conjugacy
        let beta = match &prev_pg {
            Some(old) => {
                let denom = matrix::dot(old, old);
                if denom > 0.0 {
                    let num: f64 = pg.iter().zip(old).map(|(a, b)| a * (a - b)).sum();
                    (num / denom).max(0.0)
                } else {
                    0.0
                }
            }
            None => 0.0,
        };
        for i in 0..n {
            dir[i] = pg[i] + beta * dir[i];
        }
        project(&mut dir);

        let d_dir = matrix::mat_vec(n, d.as_slice(), &dir);
        let curvature = matrix::dot(&dir, &d_dir);
        let slope = matrix::dot(x, &d_dir);
        if curvature >= -1e-14 * matrix::dot(&dir, &dir).max(f64::MIN_POSITIVE) {
            // flat or invalid direction: drop the memory and retry steepest
            if prev_pg.is_some() {
                prev_pg = None;
                dir.iter_mut().for_each(|t| *t = 0.0);
                continue;
            }
            break;
        }
        let step = -slope / curvature;
        for i in 0..n {
            x[i] += step * dir[i];
        }
        prev_pg = Some(pg);
    }
}

fn start_point(n: usize, restart: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x: Vec<f64> = match restart % 3 {
        0 => vec![1.0 / n as f64; n],
        1 => (0..n).map(|_| rng.gen_range(0.0..1.0)).collect(),
        _ => (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    };
    let sum: f64 = x.iter().sum();
    if sum.abs() > 1e-9 {
        x.iter_mut().for_each(|v| *v /= sum);
    } else {
        let shift = (1.0 - sum) / n as f64;
        x.iter_mut().for_each(|v| *v += shift);
    }
    x
}

fn quad(d: &DistanceMatrix, x: &[f64]) -> f64 {
    let n = d.n();
    let dx = matrix::mat_vec(n, d.as_slice(), x);
    matrix::dot(x, &dx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_circle, gen_discrete, gen_star};
    use crate::metric::DEFAULT_TOL;
    use approx::assert_relative_eq;

    #[test]
    fn point_measure_has_zero_energy() {
        let d = gen_discrete(4);
        let mu = WeightVector::delta(4, 0);
        assert_relative_eq!(energy(&d, &mu).unwrap(), 0.0);
    }

    #[test]
    fn energy_pair_of_point_measures_is_the_distance() {
        let d = gen_circle(4, 1.0).unwrap();
        let mu = WeightVector::delta(4, 0);
        let nu = WeightVector::delta(4, 2);
        assert_relative_eq!(
            energy_pair(&d, &mu, &nu).unwrap(),
            std::f64::consts::PI,
            max_relative = 1e-12
        );
    }

    #[test]
    fn star_measure_has_constant_potential_and_energy_n() {
        for n in 2..=4 {
            let (_, d, mu) = gen_star(n).unwrap();
            let pot = potential(&d, &mu).unwrap();
            for p in &pot {
                assert_relative_eq!(*p, n as f64, max_relative = 1e-12);
            }
            assert_relative_eq!(energy(&d, &mu).unwrap(), n as f64, max_relative = 1e-12);
            assert_relative_eq!(mu.mass(), 1.0, max_relative = 1e-12);
        }
    }

    #[test]
    fn alternating_measure_on_circle_has_zero_potential() {
        let d = gen_circle(4, 1.5).unwrap();
        let nu = WeightVector::new(vec![1.0, -1.0, 1.0, -1.0]);
        let pot = potential(&d, &nu).unwrap();
        for p in pot {
            assert_relative_eq!(p, 0.0, epsilon = 1e-12);
        }
        assert_relative_eq!(energy(&d, &nu).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn uniform_potential_on_discrete() {
        let n = 5;
        let d = gen_discrete(n);
        let mu = WeightVector::uniform(n);
        let pot = potential(&d, &mu).unwrap();
        for p in pot {
            assert_relative_eq!(p, (n as f64 - 1.0) / n as f64, max_relative = 1e-12);
        }
    }

    #[test]
    fn invariant_measure_two_points() {
        let d = DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let (mu, c) = invariant_measure(&d, DEFAULT_TOL).unwrap().unwrap();
        assert_relative_eq!(c, 0.5, max_relative = 1e-12);
        assert_relative_eq!(mu.weights()[0], 0.5, max_relative = 1e-12);
        assert_relative_eq!(mu.weights()[1], 0.5, max_relative = 1e-12);
    }

    #[test]
    fn invariant_measure_discrete_is_uniform() {
        for n in 2..=6 {
            let d = gen_discrete(n);
            let (mu, c) = invariant_measure(&d, DEFAULT_TOL).unwrap().unwrap();
            assert_relative_eq!(c, (n as f64 - 1.0) / n as f64, max_relative = 1e-10);
            for w in mu.weights() {
                assert_relative_eq!(*w, 1.0 / n as f64, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn m_value_of_discrete_spaces() {
        let m3 = m_value(&gen_discrete(3), DEFAULT_TOL).unwrap();
        assert_relative_eq!(m3.finite_value().unwrap(), 2.0 / 3.0, max_relative = 1e-12);
        let m4 = m_value(&gen_discrete(4), DEFAULT_TOL).unwrap();
        assert_relative_eq!(m4.finite_value().unwrap(), 0.75, max_relative = 1e-12);
    }

    #[test]
    fn m_value_of_star_is_the_dimension() {
        for n in 2..=6 {
            let (_, d, _) = gen_star(n).unwrap();
            let m = m_value(&d, DEFAULT_TOL).unwrap();
            assert_relative_eq!(m.finite_value().unwrap(), n as f64, max_relative = 1e-9);
        }
    }

    #[test]
    fn m_value_single_point_is_zero() {
        let d = DistanceMatrix::new(1, vec![0.0]).unwrap();
        match m_value(&d, DEFAULT_TOL).unwrap() {
            MValue::Finite { value, invariant } => {
                assert_eq!(value, 0.0);
                assert_eq!(invariant.weights(), &[1.0]);
            }
            other => panic!("expected finite, got {other:?}"),
        }
    }

    #[test]
    fn m_value_not_qh_space() {
        let d = crate::classify::k23();
        assert_eq!(m_value(&d, DEFAULT_TOL).unwrap(), MValue::NotQuasihypermetric);
    }

    #[test]
    fn m_value_infinite_off_sphere() {
        // five points spanning three-space but not on a common sphere: the
        // distance matrix is nonsingular yet no mass-1 invariant measure
        // exists and the supremum is unbounded
        let config = crate::generators::gen_random_nonobtuse(5, 3, 155, 30).unwrap();
        let d = crate::embed::config_to_metric(&config).unwrap();
        assert!(crate::embed::circumsphere(&config, 1e-9).unwrap().is_none());
        assert_eq!(m_value(&d, DEFAULT_TOL).unwrap(), MValue::Infinite);
        assert!(invariant_measure(&d, DEFAULT_TOL).unwrap().is_none());
    }

    #[test]
    fn m_value_homogeneous_under_scaling() {
        let d = gen_circle(4, 1.0).unwrap();
        let m1 = m_value(&d, DEFAULT_TOL).unwrap().finite_value().unwrap();
        let m3 = m_value(&d.scaled(3.0), DEFAULT_TOL)
            .unwrap()
            .finite_value()
            .unwrap();
        assert_relative_eq!(m3, 3.0 * m1, max_relative = 1e-10);
    }

    #[test]
    fn oracle_matches_closed_forms() {
        let got = m_value_oracle(&gen_discrete(3), 10_000).unwrap();
        assert_relative_eq!(got, 2.0 / 3.0, epsilon = 1e-6);
        let (_, star2, _) = gen_star(2).unwrap();
        let got = m_value_oracle(&star2, 10_000).unwrap();
        assert_relative_eq!(got, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let d = gen_discrete(3);
        let mu = WeightVector::uniform(4);
        assert!(energy(&d, &mu).is_err());
        assert!(potential(&d, &mu).is_err());
    }
}
