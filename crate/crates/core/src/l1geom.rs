//! Finite subsets of R^n under the 1-norm: the induced metric, coordinate
//! projections, the upper bounds they impose on M, and the one-dimensional
//! weight-folding reduction behind those bounds.

use crate::error::{Error, Result};
use crate::matrix::{self};
use crate::measures::{self, MValue};
use crate::metric::DistanceMatrix;

/// Labeled points in R^n carrying the 1-norm metric.
#[derive(Debug, Clone, PartialEq)]
pub struct L1Config {
    points: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
}

impl L1Config {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Degenerate("a configuration needs at least one point".into()));
        }
        let dim = points[0].len();
        for p in &points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
        }
        Ok(Self {
            points,
            labels: None,
        })
    }

    pub fn with_labels(points: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::DimensionMismatch {
                expected: points.len(),
                got: labels.len(),
            });
        }
        let mut config = Self::new(points)?;
        config.labels = Some(labels);
        Ok(config)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label_of(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => format!("p{i}"),
        }
    }
}

fn l1_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Pairwise 1-norm distance matrix; always a metric. Coincident points are
/// rejected.
pub fn l1_metric(p: &L1Config) -> Result<DistanceMatrix> {
    let k = p.len();
    let mut data = vec![0.0; k * k];
    for i in 0..k {
        for j in (i + 1)..k {
            let dist = l1_dist(&p.points()[i], &p.points()[j]);
            if dist <= 0.0 {
                return Err(Error::Degenerate(format!("points {i} and {j} coincide")));
            }
            data[i * k + j] = dist;
            data[j * k + i] = dist;
        }
    }
    DistanceMatrix::new(k, data)
}

/// Per-coordinate diameters: max minus min of each projection.
pub fn coordinate_diameters(p: &L1Config) -> Vec<f64> {
    (0..p.dim())
        .map(|s| {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for pt in p.points() {
                lo = lo.min(pt[s]);
                hi = hi.max(pt[s]);
            }
            hi - lo
        })
        .collect()
}

/// The upper bounds on M available for an L1-embedded space, against the
/// actual value.
#[derive(Debug, Clone, serde::Serialize)]
pub struct BoundsReport {
    /// Half the sum of coordinate-projection diameters.
    pub sum_proj_bound: f64,
    /// n D / 2 for ambient dimension n.
    pub dim_bound: f64,
    /// k D / 4 for cardinality k.
    pub card_bound: f64,
    /// min(k/4, n/2 - 1/4) D, available when k <= 2n and n >= 2.
    pub refined_bound: Option<f64>,
    pub m_actual: f64,
}

/// Evaluates every applicable bound and M itself; the bounds are theorems,
/// so exceeding one is reported as an internal fault.
pub fn l1_upper_bounds(p: &L1Config, tol: f64) -> Result<BoundsReport> {
    let d = l1_metric(p)?;
    let diam = d.max_entry();
    let k = p.len() as f64;
    let n = p.dim() as f64;

    let sum_proj_bound = 0.5 * coordinate_diameters(p).iter().sum::<f64>();
    let dim_bound = 0.5 * n * diam;
    let card_bound = 0.25 * k * diam;
    let refined_bound = if p.dim() >= 2 && p.len() <= 2 * p.dim() {
        Some((0.25 * k).min(0.5 * n - 0.25) * diam)
    } else {
        None
    };

    let m_actual = match measures::m_value(&d, tol)? {
        MValue::Finite { value, .. } => value,
        other => {
            return Err(Error::Internal(format!(
                "an L1-embedded space must have finite M, got {other:?}"
            )))
        }
    };

    let slack = tol * diam.max(1.0);
    let mut checks = vec![
        ("sum of projection diameters", sum_proj_bound),
        ("dimension", dim_bound),
        ("cardinality", card_bound),
    ];
    if let Some(b) = refined_bound {
        checks.push(("refined cardinality", b));
    }
    for (name, bound) in checks {
        if m_actual > bound + slack {
            return Err(Error::Internal(format!(
                "M = {m_actual} exceeds the {name} bound {bound}"
            )));
        }
    }

    Ok(BoundsReport {
        sum_proj_bound,
        dim_bound,
        card_bound,
        refined_bound,
        m_actual,
    })
}

/// Necessary condition for L1-embeddability of an abstract finite space:
/// a k-point L1-embeddable space satisfies M <= k D / 4, so a larger M (or
/// an infinite one) rules the embedding out. `true` means "possibly
/// embeddable", never a proof.
pub fn l1_necessary_condition(d: &DistanceMatrix, tol: f64) -> Result<bool> {
    let bound = 0.25 * d.n() as f64 * d.max_entry();
    match measures::m_value(d, tol)? {
        MValue::Finite { value, .. } => Ok(value <= bound + tol * bound.max(1.0)),
        MValue::Infinite => Ok(false),
        MValue::NotQuasihypermetric => Ok(false),
    }
}

/// Energy of a weighted point set on the line:
/// `sum_{i,j} a_i a_j |x_i - x_j|`.
pub fn one_dim_energy(xs: &[f64], weights: &[f64]) -> f64 {
    assert_eq!(xs.len(), weights.len());
    let k = xs.len();
    let mut terms = Vec::with_capacity(k * k);
    for i in 0..k {
        for j in 0..k {
            terms.push(weights[i] * weights[j] * (xs[i] - xs[j]).abs());
        }
    }
    matrix::pairwise_sum(&mut terms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FoldSide {
    Low,
    High,
}

/// One folding step of the weight-reduction argument: merges an extreme
/// negative weight into its neighbor. The line energy never decreases, the
/// weight sum is preserved, and the point list shrinks by one.
///
/// `xs` must be ascending and the extreme weight on the chosen side must be
/// negative.
pub fn fold_negative_weight(
    xs: &[f64],
    weights: &[f64],
    side: FoldSide,
) -> Result<(Vec<f64>, Vec<f64>)> {
    if xs.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: weights.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::Degenerate("folding needs at least two points".into()));
    }
    if xs.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Infeasible("xs must be ascending".into()));
    }
    let k = xs.len();
    match side {
        FoldSide::Low => {
            if weights[0] >= 0.0 {
                return Err(Error::Infeasible("low-side weight is not negative".into()));
            }
            let mut new_w = weights[1..].to_vec();
            new_w[0] = weights[0] + weights[1];
            Ok((xs[1..].to_vec(), new_w))
        }
        FoldSide::High => {
            if weights[k - 1] >= 0.0 {
                return Err(Error::Infeasible("high-side weight is not negative".into()));
            }
            let mut new_w = weights[..k - 1].to_vec();
            new_w[k - 2] = weights[k - 2] + weights[k - 1];
            Ok((xs[..k - 1].to_vec(), new_w))
        }
    }
}

/// The refined line-energy bound `(x_s - x_r) / 2`, where `r` and `s` are
/// the extreme indices carrying nonnegative weight (after sorting by
/// position). Requires weight sum 1; the energy provably never exceeds the
/// bound, which is re-checked.
pub fn one_dim_energy_bound(xs: &[f64], weights: &[f64]) -> Result<f64> {
    if xs.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: xs.len(),
            got: weights.len(),
        });
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Infeasible(format!("weights must sum to 1, got {total}")));
    }
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].partial_cmp(&xs[j]).unwrap_or(std::cmp::Ordering::Equal));
    let nonneg: Vec<usize> = order.iter().copied().filter(|&i| weights[i] >= 0.0).collect();
    let (first, last) = match (nonneg.first(), nonneg.last()) {
        (Some(&f), Some(&l)) => (f, l),
        // impossible at weight sum 1 > 0
        _ => return Err(Error::Internal("no nonnegative weight exists".into())),
    };
    let bound = 0.5 * (xs[last] - xs[first]);
    let energy = one_dim_energy(xs, weights);
    let scale = xs
        .iter()
        .fold(0.0_f64, |m, x| m.max(x.abs()))
        .max(1.0);
    if energy > bound + 1e-9 * scale {
        return Err(Error::Internal(format!(
            "line energy {energy} exceeds its bound {bound}"
        )));
    }
    Ok(bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::DEFAULT_TOL;
    use approx::assert_relative_eq;

    #[test]
    fn two_points_on_the_line() {
        let p = L1Config::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let d = l1_metric(&p).unwrap();
        assert_relative_eq!(d.get(0, 1), 1.0);
    }

    #[test]
    fn unit_square_corners_l1() {
        let p = L1Config::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ])
        .unwrap();
        let d = l1_metric(&p).unwrap();
        assert_relative_eq!(d.get(0, 1), 1.0);
        assert_relative_eq!(d.get(0, 3), 2.0);
        assert_relative_eq!(d.get(1, 2), 2.0);
    }

    #[test]
    fn coincident_points_rejected() {
        let p = L1Config::new(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(l1_metric(&p).is_err());
    }

    #[test]
    fn coordinate_diameters_example() {
        let p = L1Config::new(vec![vec![0.0, 0.0], vec![1.0, 3.0]]).unwrap();
        assert_eq!(coordinate_diameters(&p), vec![1.0, 3.0]);
    }

    #[test]
    fn star_bounds_are_tight_in_the_dimension() {
        for n in 2..=4 {
            let (config, _, _) = crate::generators::gen_star(n).unwrap();
            let report = l1_upper_bounds(&config, DEFAULT_TOL).unwrap();
            assert_relative_eq!(report.m_actual, n as f64, max_relative = 1e-9);
            assert_relative_eq!(report.dim_bound, n as f64, max_relative = 1e-12);
            // 2n + 1 > 2n points, so the refined bound must not apply
            assert!(report.refined_bound.is_none());
        }
    }

    #[test]
    fn four_point_l1_sets_stay_under_three_quarters() {
        let p = L1Config::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.3, 0.9],
            vec![0.8, 0.7],
        ])
        .unwrap();
        let report = l1_upper_bounds(&p, DEFAULT_TOL).unwrap();
        let d = l1_metric(&p).unwrap();
        assert!(report.m_actual <= 0.75 * d.max_entry() + 1e-9);
    }

    #[test]
    fn fold_example_from_the_low_side() {
        let (xs, ws) = fold_negative_weight(&[0.0, 1.0], &[-1.0, 2.0], FoldSide::Low).unwrap();
        assert_eq!(xs, vec![1.0]);
        assert_eq!(ws, vec![1.0]);
        // energy rises from -4 to 0
        assert_relative_eq!(one_dim_energy(&[0.0, 1.0], &[-1.0, 2.0]), -4.0);
        assert_relative_eq!(one_dim_energy(&xs, &ws), 0.0);
    }

    #[test]
    fn fold_rejects_nonnegative_extremes() {
        assert!(fold_negative_weight(&[0.0, 1.0], &[0.5, 0.5], FoldSide::Low).is_err());
        assert!(fold_negative_weight(&[0.0, 1.0], &[0.5, 0.5], FoldSide::High).is_err());
        assert!(fold_negative_weight(&[1.0, 0.0], &[-1.0, 2.0], FoldSide::Low).is_err());
    }

    #[test]
    fn fold_high_side() {
        let (xs, ws) =
            fold_negative_weight(&[0.0, 1.0, 2.0], &[1.5, 0.5, -1.0], FoldSide::High).unwrap();
        assert_eq!(xs, vec![0.0, 1.0]);
        assert_eq!(ws, vec![1.5, -0.5]);
        assert!(one_dim_energy(&[0.0, 1.0, 2.0], &[1.5, 0.5, -1.0]) <= one_dim_energy(&xs, &ws));
    }

    #[test]
    fn line_bound_equality_case() {
        let bound = one_dim_energy_bound(&[0.0, 1.0, 2.0], &[0.5, 0.0, 0.5]).unwrap();
        assert_relative_eq!(bound, 1.0);
        assert_relative_eq!(one_dim_energy(&[0.0, 1.0, 2.0], &[0.5, 0.0, 0.5]), 1.0);
    }

    #[test]
    fn line_bound_singleton() {
        let bound = one_dim_energy_bound(&[5.0], &[1.0]).unwrap();
        assert_relative_eq!(bound, 0.0);
    }

    #[test]
    fn l1_necessary_condition_flags() {
        // any 3-point metric is L1-embeddable, so the flag must pass
        let d = crate::generators::gen_discrete(3);
        assert!(l1_necessary_condition(&d, DEFAULT_TOL).unwrap());
    }
}
