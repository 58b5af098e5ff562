//! Canonical representation and validation of finite metric spaces given as
//! distance matrices.

use crate::error::{Error, Result};

/// Default relative tolerance for metric validation and most spectral tests.
pub const DEFAULT_TOL: f64 = 1e-9;

/// An eigenvalue counts as zero when its magnitude is below this fraction of
/// the largest one. Separates the forced zero of the centered form from
/// genuine near-degeneracy at the scales of the example families.
pub const EIG_REL_TOL: f64 = 1e-8;

/// Symmetric nonnegative matrix with zero diagonal: a finite metric space.
///
/// Stored dense and row-major; the intended regime is up to a few hundred
/// points. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds from a row-major buffer of length `n * n`. Only the shape is
    /// checked here; use [`validate_metric`] for the metric axioms.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Degenerate("a metric space needs at least one point".into()));
        }
        if data.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self { n, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: row.len(),
                });
            }
        }
        Self::new(n, rows.iter().flatten().copied().collect())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].to_vec())
            .collect()
    }

    /// Largest entry; equals the metric diameter on valid input.
    pub fn max_entry(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, &x| m.max(x))
    }

    pub fn scaled(&self, factor: f64) -> DistanceMatrix {
        DistanceMatrix {
            n: self.n,
            data: self.data.iter().map(|x| factor * x).collect(),
        }
    }

    /// Submatrix on the given (strictly increasing) index set.
    pub fn restrict(&self, indices: &[usize]) -> Result<DistanceMatrix> {
        if indices.is_empty() {
            return Err(Error::Degenerate("empty index set".into()));
        }
        let mut last = None;
        for &i in indices {
            if i >= self.n {
                return Err(Error::Infeasible(format!("index {i} out of range for n = {}", self.n)));
            }
            if let Some(prev) = last {
                if i <= prev {
                    return Err(Error::Infeasible("indices must be strictly increasing".into()));
                }
            }
            last = Some(i);
        }
        let k = indices.len();
        let mut data = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                data.push(self.get(i, j));
            }
        }
        DistanceMatrix::new(k, data)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    Asymmetry,
    NonzeroDiagonal,
    NonPositive,
    Triangle,
}

/// One metric-axiom violation: the offending indices and its size.
/// For triangle violations `indices` is `(i, j, k)` with the path through
/// `j`; for pairwise kinds the third index repeats the second.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub indices: (usize, usize, usize),
    pub magnitude: f64,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Reports every symmetry, diagonal, positivity, and triangle violation
/// exceeding `tol` relative to the diameter.
pub fn validate_metric(d: &DistanceMatrix, tol: f64) -> ValidationReport {
    let n = d.n();
    let scale = d.max_entry().abs();
    let thresh = tol * scale;
    let mut violations = Vec::new();

    for i in 0..n {
        if d.get(i, i).abs() > thresh {
            violations.push(Violation {
                kind: ViolationKind::NonzeroDiagonal,
                indices: (i, i, i),
                magnitude: d.get(i, i).abs(),
            });
        }
        for j in (i + 1)..n {
            let gap = (d.get(i, j) - d.get(j, i)).abs();
            if gap > thresh {
                violations.push(Violation {
                    kind: ViolationKind::Asymmetry,
                    indices: (i, j, j),
                    magnitude: gap,
                });
            }
            if d.get(i, j) <= thresh {
                violations.push(Violation {
                    kind: ViolationKind::NonPositive,
                    indices: (i, j, j),
                    magnitude: d.get(i, j),
                });
            }
        }
    }
    // symmetry makes (i, j, k) and (k, j, i) the same inequality
    for i in 0..n {
        for k in (i + 1)..n {
            for j in 0..n {
                if j == i || j == k {
                    continue;
                }
                let excess = d.get(i, k) - d.get(i, j) - d.get(j, k);
                if excess > thresh {
                    violations.push(Violation {
                        kind: ViolationKind::Triangle,
                        indices: (i, j, k),
                        magnitude: excess,
                    });
                }
            }
        }
    }

    ValidationReport {
        ok: violations.is_empty(),
        violations,
    }
}

pub(crate) fn require_metric(d: &DistanceMatrix, tol: f64) -> Result<()> {
    let report = validate_metric(d, tol);
    if report.ok {
        Ok(())
    } else {
        let v = &report.violations[0];
        Err(Error::InvalidMetric(format!(
            "{} violations, first: {:?} at {:?} (magnitude {:.3e})",
            report.violations.len(),
            v.kind,
            v.indices,
            v.magnitude
        )))
    }
}

/// Metric diameter: the largest pairwise distance.
pub fn diameter(d: &DistanceMatrix) -> f64 {
    d.max_entry()
}

/// Rescales so the diameter is exactly 1. The constant `M` scales by the
/// same factor.
pub fn normalize_diameter(d: &DistanceMatrix) -> Result<DistanceMatrix> {
    if d.n() < 2 {
        return Err(Error::Degenerate("normalization needs at least two points".into()));
    }
    let diam = diameter(d);
    if diam <= 0.0 {
        return Err(Error::Degenerate("zero diameter".into()));
    }
    Ok(d.scaled(1.0 / diam))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn two_point() -> DistanceMatrix {
        DistanceMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn smallest_metric_space_is_ok() {
        let report = validate_metric(&two_point(), DEFAULT_TOL);
        assert!(report.ok);
        assert_relative_eq!(diameter(&two_point()), 1.0);
    }

    #[test]
    fn triangle_violation_is_reported() {
        let d = DistanceMatrix::from_rows(&[
            vec![0.0, 1.0, 3.0],
            vec![1.0, 0.0, 1.0],
            vec![3.0, 1.0, 0.0],
        ])
        .unwrap();
        let report = validate_metric(&d, DEFAULT_TOL);
        assert!(!report.ok);
        let v = report
            .violations
            .iter()
            .find(|v| v.kind == ViolationKind::Triangle)
            .expect("triangle violation");
        assert_eq!(v.indices, (0, 1, 2));
        assert_relative_eq!(v.magnitude, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn asymmetry_and_diagonal_are_reported() {
        let d = DistanceMatrix::from_rows(&[vec![0.5, 1.0], vec![2.0, 0.0]]).unwrap();
        let report = validate_metric(&d, DEFAULT_TOL);
        let kinds: Vec<_> = report.violations.iter().map(|v| v.kind).collect();
        assert!(kinds.contains(&ViolationKind::Asymmetry));
        assert!(kinds.contains(&ViolationKind::NonzeroDiagonal));
    }

    #[test]
    fn normalize_diameter_scales_to_one() {
        let d = DistanceMatrix::from_rows(&[vec![0.0, 2.0], vec![2.0, 0.0]]).unwrap();
        let nd = normalize_diameter(&d).unwrap();
        assert_relative_eq!(nd.get(0, 1), 1.0);
        // idempotent on diameter-1 input
        let again = normalize_diameter(&nd).unwrap();
        assert_eq!(nd, again);
    }

    #[test]
    fn normalize_rejects_degenerate() {
        let single = DistanceMatrix::new(1, vec![0.0]).unwrap();
        assert!(normalize_diameter(&single).is_err());
    }

    #[test]
    fn restrict_picks_submatrix() {
        let d = DistanceMatrix::from_rows(&[
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 1.0],
            vec![2.0, 1.0, 0.0],
        ])
        .unwrap();
        let r = d.restrict(&[0, 2]).unwrap();
        assert_eq!(r.n(), 2);
        assert_relative_eq!(r.get(0, 1), 2.0);
        assert!(d.restrict(&[2, 0]).is_err());
        assert!(d.restrict(&[0, 5]).is_err());
    }
}
