//! The Schoenberg correspondence for finite spaces: embed `(X, sqrt(d))`
//! isometrically into Euclidean space, map point configurations back to
//! metrics, classify angle structure, and fit circumspheres.
//!
//! A finite space is quasihypermetric exactly when the Gram matrix
//! `G = -1/2 P D P` is positive semidefinite; the embedding coordinates are
//! the scaled eigenvectors of `G`. The image of such an embedding is a
//! configuration in which every angle is at most a right angle, and
//! conversely squared distances of any such configuration form a metric.

use crate::error::{Error, Result};
use crate::matrix::{self};
use crate::metric::{require_metric, validate_metric, DistanceMatrix, DEFAULT_TOL, EIG_REL_TOL};

/// Labeled points in a Euclidean space.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    points: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
}

impl PointConfig {
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

    /// Smallest pairwise Euclidean distance; zero-length configs excluded by
    /// construction.
    pub fn min_separation(&self) -> f64 {
        let k = self.len();
        let mut best = f64::INFINITY;
        for i in 0..k {
            for j in (i + 1)..k {
                best = best.min(euclid(&self.points[i], &self.points[j]));
            }
        }
        best
    }
}

pub(crate) fn euclid_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    euclid_sq(a, b).sqrt()
}

/// Angle structure of a configuration, examined over all triples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AngleClassification {
    /// Every angle strictly below a right angle.
    Acute,
    /// No angle above a right angle, at least one right angle.
    NonObtuse,
    /// Witness triple: the angle at `at` spanned by the other two.
    Obtuse {
        at: usize,
        other_a: usize,
        other_b: usize,
    },
}

/// Classifies all angles of the configuration. Dot products are compared
/// against `tol` scaled by the largest squared distance, so the verdict does
/// not depend on the units of the coordinates. Fewer than three points are
/// vacuously acute.
pub fn angle_classification(p: &PointConfig, tol: f64) -> Result<AngleClassification> {
    let k = p.len();
    if k >= 2 {
        let scale = max_sq_dist(p);
        if p.min_separation() * p.min_separation() <= (tol * scale).max(0.0) {
            return Err(Error::Degenerate("coincident points".into()));
        }
    }
    if k < 3 {
        return Ok(AngleClassification::Acute);
    }
    let scale = max_sq_dist(p);
    let band = tol * scale;
    let mut saw_right = false;
    // lexicographic scan returns the first obtuse witness deterministically
    for at in 0..k {
        for a in 0..k {
            if a == at {
                continue;
            }
            for b in (a + 1)..k {
                if b == at {
                    continue;
                }
                let dot = dot_at(p, at, a, b);
                if dot < -band {
                    return Ok(AngleClassification::Obtuse {
                        at,
                        other_a: a,
                        other_b: b,
                    });
                }
                if dot <= band {
                    saw_right = true;
                }
            }
        }
    }
    Ok(if saw_right {
        AngleClassification::NonObtuse
    } else {
        AngleClassification::Acute
    })
}

fn dot_at(p: &PointConfig, at: usize, a: usize, b: usize) -> f64 {
    let q = &p.points()[at];
    let pa = &p.points()[a];
    let pb = &p.points()[b];
    (0..q.len()).map(|t| (pa[t] - q[t]) * (pb[t] - q[t])).sum()
}

fn max_sq_dist(p: &PointConfig) -> f64 {
    let k = p.len();
    let mut best = 0.0_f64;
    for i in 0..k {
        for j in (i + 1)..k {
            best = best.max(euclid_sq(&p.points[i], &p.points[j]));
        }
    }
    best.max(f64::MIN_POSITIVE)
}

/// Isometric embedding of `(X, sqrt(d))`: returns points with
/// `|p_i - p_j|^2 = d(i, j)`.
///
/// Factors the double-centered Gram matrix; the ambient dimension is its
/// numerical rank, coordinates come in decreasing eigenvalue order, and each
/// coordinate's sign is fixed by making its first significant entry
/// positive. Eigenvalues in `[-eps, 0]` are clamped to zero (boundary,
/// non-strict spaces sit exactly there); anything more negative means the
/// space is not quasihypermetric and the offending direction is reported.
pub fn schoenberg_embed(d: &DistanceMatrix, tol: f64) -> Result<PointConfig> {
    require_metric(d, tol)?;
    let n = d.n();
    let mut gram = matrix::double_center(n, d.as_slice());
    gram.iter_mut().for_each(|x| *x *= -0.5);
    let eig = matrix::sym_eigen(n, &gram);
    let lambda_max = eig.max_abs_value();
    let floor = -(EIG_REL_TOL.max(tol)) * lambda_max;

    if let Some((lambda, vec)) = eig
        .values
        .iter()
        .zip(&eig.vectors)
        .find(|(l, _)| **l < floor)
    {
        return Err(Error::NotNegativeSemidefinite {
            // the Gram eigenvalue is -1/2 times the centered-form one
            eigenvalue: -2.0 * lambda,
            direction: vec.clone(),
        });
    }

    let kept: Vec<usize> = (0..n)
        .filter(|&k| eig.values[k] > EIG_REL_TOL * lambda_max)
        .collect();
    let points: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            kept.iter()
                .map(|&k| eig.vectors[k][i] * eig.values[k].sqrt())
                .collect()
        })
        .collect();
    PointConfig::new(points)
}

/// Squared-distance metric of a non-obtuse configuration.
///
/// The angle condition is exactly what makes the squared distances satisfy
/// the triangle inequality; an obtuse triple is returned as the error
/// witness. The output is re-validated as a metric.
pub fn config_to_metric(p: &PointConfig) -> Result<DistanceMatrix> {
    match angle_classification(p, DEFAULT_TOL)? {
        AngleClassification::Obtuse { at, other_a, other_b } => {
            return Err(Error::ObtuseTriple { at, other_a, other_b });
        }
        AngleClassification::Acute | AngleClassification::NonObtuse => {}
    }
    let k = p.len();
    let mut data = vec![0.0; k * k];
    for i in 0..k {
        for j in (i + 1)..k {
            let ds = euclid_sq(&p.points()[i], &p.points()[j]);
            data[i * k + j] = ds;
            data[j * k + i] = ds;
        }
    }
    let d = DistanceMatrix::new(k, data)?;
    let report = validate_metric(&d, DEFAULT_TOL);
    if !report.ok {
        return Err(Error::Internal(format!(
            "squared distances of a non-obtuse configuration failed metric validation: {:?}",
            report.violations.first()
        )));
    }
    Ok(d)
}

/// Least-squares sphere through a configuration.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SphereFit {
    pub center: Vec<f64>,
    pub radius: f64,
    pub max_residual: f64,
}

/// Fits a sphere through all points (linear system in the center from
/// equal-radius differences) and accepts it only when the worst radial
/// residual is below `tol * radius`. `None` when no common sphere exists.
pub fn circumsphere(p: &PointConfig, tol: f64) -> Result<Option<SphereFit>> {
    let k = p.len();
    if k < 2 {
        return Err(Error::Degenerate("sphere fit needs at least two points".into()));
    }
    let dim = p.dim();
    let pts = p.points();

    // rows: 2 (p_0 - p_i) . c = |p_0|^2 - |p_i|^2
    let sq = |v: &[f64]| matrix::dot(v, v);
    let mut ata = vec![0.0; dim * dim];
    let mut atb = vec![0.0; dim];
    for i in 1..k {
        let row: Vec<f64> = (0..dim).map(|t| 2.0 * (pts[0][t] - pts[i][t])).collect();
        let rhs = sq(&pts[0]) - sq(&pts[i]);
        for s in 0..dim {
            for t in 0..dim {
                ata[s * dim + t] += row[s] * row[t];
            }
            atb[s] += row[s] * rhs;
        }
    }
    let eig = matrix::sym_eigen(dim, &ata);
    let center = eig.min_norm_solve(&atb, EIG_REL_TOL);

    let radii: Vec<f64> = pts.iter().map(|pt| euclid(pt, &center)).collect();
    let radius = radii.iter().sum::<f64>() / k as f64;
    if radius <= 0.0 {
        return Ok(None);
    }
    let max_residual = radii
        .iter()
        .map(|r| (r - radius).abs())
        .fold(0.0_f64, f64::max);
    if max_residual <= tol * radius {
        Ok(Some(SphereFit {
            center,
            radius,
            max_residual,
        }))
    } else {
        Ok(None)
    }
}

/// Indices of a diametrically opposite pair on the fitted sphere, if any.
/// First pair in lexicographic order.
pub fn antipodal_pair(p: &PointConfig, fit: &SphereFit, tol: f64) -> Option<(usize, usize)> {
    let k = p.len();
    for i in 0..k {
        for j in (i + 1)..k {
            let mid_offset: f64 = (0..p.dim())
                .map(|t| {
                    let m = p.points()[i][t] + p.points()[j][t] - 2.0 * fit.center[t];
                    m * m
                })
                .sum::<f64>()
                .sqrt();
            if mid_offset <= tol * fit.radius {
                return Some((i, j));
            }
        }
    }
    None
}

/// Affine rank: dimension of the span of the differences from the centroid.
pub fn affine_rank(p: &PointConfig, tol: f64) -> usize {
    let k = p.len();
    let dim = p.dim();
    if k < 2 || dim == 0 {
        return 0;
    }
    let centroid: Vec<f64> = (0..dim)
        .map(|t| p.points().iter().map(|pt| pt[t]).sum::<f64>() / k as f64)
        .collect();
    let mut gram = vec![0.0; dim * dim];
    for pt in p.points() {
        for s in 0..dim {
            for t in 0..dim {
                gram[s * dim + t] += (pt[s] - centroid[s]) * (pt[t] - centroid[t]);
            }
        }
    }
    matrix::sym_eigen(dim, &gram).rank(tol.max(EIG_REL_TOL))
}
