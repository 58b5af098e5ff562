//! Spectral classification of finite metric spaces: the quasihypermetric and
//! strictly quasihypermetric properties with machine-checkable certificates,
//! a bounded hypermetric check, and the consistency cross-check between the
//! spectral verdict and the rank/finiteness criterion.
//!
//! The quadratic form `a' D a` restricted to the mass-zero hyperplane is
//! represented by the centered matrix `P D P` with `P = I - J/n`. The space
//! is quasihypermetric exactly when that form is negative semidefinite, and
//! strictly so when the only zero eigenvalue is the one forced by the
//! all-ones kernel of `P`.

use crate::error::{Error, Result};
use crate::matrix::{self, SymEigen};
use crate::measures::{self, MValue, WeightVector};
use crate::metric::{require_metric, DistanceMatrix, EIG_REL_TOL};
use crate::par;

/// Outcome of one spectral pass over the centered form. Shared by the public
/// predicates so each matrix is decomposed once.
#[derive(Debug, Clone)]
pub(crate) struct SpectralAnalysis {
    /// Eigenvalues of `P D P`, descending.
    pub eigenvalues: Vec<f64>,
    pub quasihypermetric: bool,
    pub strict: bool,
    /// Mass-zero direction with positive energy (present iff not QH).
    pub positive_witness: Option<WeightVector>,
    /// Nonzero mass-zero direction with (numerically) zero energy
    /// (present iff QH but not strict).
    pub null_witness: Option<WeightVector>,
}

pub(crate) fn analyze(d: &DistanceMatrix, tol: f64) -> SpectralAnalysis {
    let n = d.n();
    let centered = matrix::double_center(n, d.as_slice());
    let eig = matrix::sym_eigen(n, &centered);
    let scale = eig.max_abs_value();
    let qh_cut = tol * scale;
    let zero_cut = EIG_REL_TOL * scale;

    let lambda_max = eig.values.first().copied().unwrap_or(0.0);
    let quasihypermetric = lambda_max <= qh_cut;

    // Zero eigenspace always contains the all-ones vector; a second zero
    // direction is exactly a non-strictness witness.
    let zero_count = eig.values.iter().filter(|x| x.abs() <= zero_cut).count();
    let strict = quasihypermetric && zero_count <= 1;

    let positive_witness = if quasihypermetric {
        None
    } else {
        mass_zero_part(&eig.vectors[0]).map(WeightVector::new)
    };

    let null_witness = if quasihypermetric && !strict {
        best_null_direction(&eig, zero_cut).map(WeightVector::new)
    } else {
        None
    };

    SpectralAnalysis {
        eigenvalues: eig.values,
        quasihypermetric,
        strict,
        positive_witness,
        null_witness,
    }
}

/// Removes the mean and normalizes; None if nothing significant remains.
fn mass_zero_part(v: &[f64]) -> Option<Vec<f64>> {
    let n = v.len();
    let mean = v.iter().sum::<f64>() / n as f64;
    let mut w: Vec<f64> = v.iter().map(|x| x - mean).collect();
    let norm = matrix::norm2(&w);
    if norm < 1e-9 {
        return None;
    }
    w.iter_mut().for_each(|x| *x /= norm);
    Some(w)
}

/// Among the zero eigenvectors, picks the direction farthest from the
/// all-ones line. With two or more zeros one always exists.
fn best_null_direction(eig: &SymEigen, zero_cut: f64) -> Option<Vec<f64>> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (lambda, vec) in eig.values.iter().zip(&eig.vectors) {
        if lambda.abs() > zero_cut {
            continue;
        }
        let n = vec.len();
        let mean = vec.iter().sum::<f64>() / n as f64;
        let w: Vec<f64> = vec.iter().map(|x| x - mean).collect();
        let norm = matrix::norm2(&w);
        if best.as_ref().is_none_or(|(b, _)| norm > *b) {
            best = Some((norm, w));
        }
    }
    best.and_then(|(norm, mut w)| {
        if norm < 1e-9 {
            return None;
        }
        w.iter_mut().for_each(|x| *x /= norm);
        Some(w)
    })
}

/// True iff the energy form is nonpositive on mass-zero weights. On failure
/// also returns a mass-zero witness with positive energy.
pub fn is_quasihypermetric(
    d: &DistanceMatrix,
    tol: f64,
) -> Result<(bool, Option<WeightVector>)> {
    require_metric(d, tol)?;
    let a = analyze(d, tol);
    Ok((a.quasihypermetric, a.positive_witness))
}

/// True iff quasihypermetric and the centered form is negative definite on
/// the mass-zero hyperplane. When quasihypermetric but not strict, returns a
/// nonzero mass-zero witness with zero energy.
pub fn is_strictly_quasihypermetric(
    d: &DistanceMatrix,
    tol: f64,
) -> Result<(bool, Option<WeightVector>)> {
    require_metric(d, tol)?;
    let a = analyze(d, tol);
    if a.strict {
        Ok((true, None))
    } else if a.quasihypermetric {
        Ok((false, a.null_witness))
    } else {
        Ok((false, a.positive_witness))
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
#[serde(rename_all = "snake_case", tag = "verdict")]
pub enum HypermetricVerdict {
    /// No violating integer vector with entries bounded by `bound` exists.
    /// This is a necessary-condition check, never a proof of hypermetricity.
    NoViolationUpTo { bound: i64 },
    Violation { coefficients: Vec<i64>, value: f64 },
}

pub const DEFAULT_ENUM_CAP: u128 = 2_000_000;

/// Scans integer weight vectors `b` with `sum(b) = 1` and `|b_i| <= bound`
/// for violations `b' D b > 0` of the hypermetric inequalities. Vectors are
/// visited by increasing l1 norm and lexicographically within, and the first
/// violation in that order is returned.
pub fn hypermetric_check_bounded(
    d: &DistanceMatrix,
    bound: i64,
    cap: u128,
) -> Result<HypermetricVerdict> {
    require_metric(d, crate::metric::DEFAULT_TOL)?;
    if bound < 1 {
        return Err(Error::Infeasible("bound must be at least 1".into()));
    }
    let n = d.n();
    let candidates = (2 * bound as u128 + 1).checked_pow(n as u32);
    match candidates {
        Some(c) if c <= cap => {}
        _ => {
            return Err(Error::EnumerationBudget {
                needed: candidates.unwrap_or(u128::MAX),
                cap,
            })
        }
    }

    let scale = d.max_entry().max(1.0);
    let thresh = crate::metric::DEFAULT_TOL * scale;

    // l1 norm of any mass-1 integer vector is odd
    let max_norm = n as i64 * bound;
    let mut norm = 1;
    while norm <= max_norm {
        // split the first coordinate across workers; merging in coordinate
        // order keeps the result deterministic
        let firsts: Vec<i64> = (-bound..=bound).collect();
        let found = par::indexed_map(firsts.len(), |fi| {
            let b0 = firsts[fi];
            let mut prefix = vec![b0];
            first_violation(d, bound, norm - b0.abs(), 1 - b0, &mut prefix, n, thresh)
        });
        if let Some(hit) = found.into_iter().flatten().next() {
            return Ok(HypermetricVerdict::Violation {
                value: quad_form_int(d, &hit),
                coefficients: hit,
            });
        }
        norm += 2;
    }
    Ok(HypermetricVerdict::NoViolationUpTo { bound })
}

/// Depth-first lexicographic scan of completions of `prefix` with the given
/// remaining l1 norm and remaining sum; returns the first violating vector.
fn first_violation(
    d: &DistanceMatrix,
    bound: i64,
    rem_norm: i64,
    rem_sum: i64,
    prefix: &mut Vec<i64>,
    n: usize,
    thresh: f64,
) -> Option<Vec<i64>> {
    let slots = (n - prefix.len()) as i64;
    if rem_norm < 0 || rem_norm < rem_sum.abs() || rem_norm > slots * bound {
        return None;
    }
    if (rem_norm - rem_sum).rem_euclid(2) != 0 {
        return None;
    }
    if prefix.len() == n {
        if quad_form_int(d, prefix) > thresh {
            return Some(prefix.clone());
        }
        return None;
    }
    for b in -bound..=bound {
        prefix.push(b);
        let hit = first_violation(d, bound, rem_norm - b.abs(), rem_sum - b, prefix, n, thresh);
        prefix.pop();
        if hit.is_some() {
            return hit;
        }
    }
    None
}

fn quad_form_int(d: &DistanceMatrix, b: &[i64]) -> f64 {
    let n = d.n();
    let mut total = 0.0;
    for i in 0..n {
        if b[i] == 0 {
            continue;
        }
        for j in 0..n {
            if b[j] == 0 {
                continue;
            }
            total += (b[i] * b[j]) as f64 * d.get(i, j);
        }
    }
    total
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MFiniteness {
    Finite,
    Infinite,
    NotApplicable,
}

/// Full classification verdicts with certificates.
#[derive(Debug, Clone, serde::Serialize)]
pub struct Classification {
    pub quasihypermetric: bool,
    pub strictly_quasihypermetric: bool,
    pub m_finite: MFiniteness,
    /// Numerical rank of the distance matrix itself.
    pub rank: usize,
    /// Mass-zero witness: positive energy when not QH, zero energy when QH
    /// but not strict. Absent for strict spaces.
    pub certificate: Option<WeightVector>,
    /// Eigenvalues of the centered form, descending.
    pub spectrum_summary: Vec<f64>,
}

/// Computes all classification fields. For `n > 1` the spectral strictness
/// verdict is cross-checked against the equivalent criterion
/// "QH, M finite and D nonsingular"; a discrepancy indicates a numerical
/// fault and is returned as an error rather than a verdict.
pub fn classify(d: &DistanceMatrix, tol: f64) -> Result<Classification> {
    require_metric(d, tol)?;
    let a = analyze(d, tol);
    let n = d.n();

    let rank = matrix::sym_eigen(n, d.as_slice()).rank(EIG_REL_TOL);

    let m_finite = if !a.quasihypermetric {
        MFiniteness::NotApplicable
    } else {
        match measures::m_value_with_analysis(d, tol, &a)? {
            MValue::Finite { .. } => MFiniteness::Finite,
            MValue::Infinite => MFiniteness::Infinite,
            MValue::NotQuasihypermetric => MFiniteness::NotApplicable,
        }
    };

    if n > 1 {
        let alt = a.quasihypermetric && m_finite == MFiniteness::Finite && rank == n;
        if alt != a.strict {
            return Err(Error::Internal(format!(
                "strictness criteria disagree: spectral says {}, (QH && M finite && rank = n) says {} \
                 (rank {rank} of {n})",
                a.strict, alt
            )));
        }
    }

    let certificate = if a.strict {
        None
    } else if a.quasihypermetric {
        a.null_witness
    } else {
        a.positive_witness
    };

    Ok(Classification {
        quasihypermetric: a.quasihypermetric,
        strictly_quasihypermetric: a.strict,
        m_finite,
        rank,
        certificate,
        spectrum_summary: a.eigenvalues,
    })
}

/// Shortest-path metric of the complete bipartite graph K_{2,3}; the
/// classic small space that is not of negative type. Test fixture.
#[cfg(test)]
pub(crate) fn k23() -> DistanceMatrix {
    let left = |x: usize| x < 2;
    let mut rows = vec![vec![0.0; 5]; 5];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            if i != j {
                *entry = if left(i) != left(j) { 1.0 } else { 2.0 };
            }
        }
    }
    DistanceMatrix::from_rows(&rows).unwrap()
}
