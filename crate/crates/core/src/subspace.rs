//! Maximal strictly quasihypermetric subspaces: greedy extraction, the rank
//! cardinality law, exhaustive enumeration, extension measures, and the fact
//! that a maximal strict subspace carries the same M as the whole space.
//!
//! Strictness is hereditary downward, so a point rejected by the greedy scan
//! can never become addable later; the greedy result is maximal. Its
//! cardinality must equal the rank of the distance matrix when M is finite
//! and rank minus one when M is infinite, and all maximal strict subsets
//! share one cardinality.

use crate::classify::{self};
use crate::error::{Error, Result};
use crate::matrix;
use crate::measures::{self, MValue, WeightVector};
use crate::metric::{require_metric, DistanceMatrix, EIG_REL_TOL};
use crate::par;

/// Numerical rank of the distance matrix: eigenvalue count above `tol`
/// relative to the largest magnitude.
pub fn rank_distance_matrix(d: &DistanceMatrix, tol: f64) -> Result<usize> {
    require_metric(d, crate::metric::DEFAULT_TOL)?;
    Ok(matrix::sym_eigen(d.n(), d.as_slice()).rank(tol))
}

pub(crate) fn rank_unchecked(d: &DistanceMatrix) -> usize {
    matrix::sym_eigen(d.n(), d.as_slice()).rank(EIG_REL_TOL)
}

fn strict_subset(d: &DistanceMatrix, indices: &[usize], tol: f64) -> Result<bool> {
    let sub = d.restrict(indices)?;
    Ok(classify::analyze(&sub, tol).strict)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct SubspaceResult {
    /// Sorted index set of the extracted maximal strict subspace.
    pub indices: Vec<usize>,
    pub cardinality: usize,
    /// Rank of the full distance matrix.
    pub rank: usize,
    pub m_finite: bool,
    /// r when M is finite, r - 1 when infinite.
    pub predicted_cardinality: usize,
}

/// Greedy extraction of a maximal strictly quasihypermetric subspace,
/// scanning points in ascending index order. The cardinality is checked
/// against the rank prediction; a mismatch is reported as an internal fault.
pub fn maximal_strict_subspace(d: &DistanceMatrix, tol: f64) -> Result<SubspaceResult> {
    require_metric(d, tol)?;
    let analysis = classify::analyze(d, tol);
    if !analysis.quasihypermetric {
        return Err(Error::NotQuasihypermetric);
    }
    let n = d.n();
    let rank = rank_unchecked(d);
    let m_finite = matches!(
        measures::m_value_with_analysis(d, tol, &analysis)?,
        MValue::Finite { .. }
    );

    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..n {
        chosen.push(i);
        if !strict_subset(d, &chosen, tol)? {
            chosen.pop();
        }
    }

    let predicted = if n == 1 {
        1
    } else if m_finite {
        rank
    } else {
        rank - 1
    };
    if chosen.len() != predicted {
        return Err(Error::Internal(format!(
            "greedy maximal strict subspace has {} points but rank {} with M {} predicts {}",
            chosen.len(),
            rank,
            if m_finite { "finite" } else { "infinite" },
            predicted
        )));
    }

    Ok(SubspaceResult {
        cardinality: chosen.len(),
        indices: chosen,
        rank,
        m_finite,
        predicted_cardinality: predicted,
    })
}

pub const DEFAULT_SUBSET_CAP: u128 = 4096;

/// All maximal strictly quasihypermetric subsets, by exhaustive scan over
/// the power set. They provably share one cardinality; that is re-checked
/// and a violation reported as an internal fault. Subsets are returned in
/// ascending bitmask order.
pub fn enumerate_maximal_strict_subspaces(
    d: &DistanceMatrix,
    tol: f64,
    cap: u128,
) -> Result<Vec<Vec<usize>>> {
    require_metric(d, tol)?;
    let n = d.n();
    let total = 1u128 << n;
    if total > cap {
        return Err(Error::EnumerationBudget { needed: total, cap });
    }
    let (qh, _) = classify::is_quasihypermetric(d, tol)?;
    if !qh {
        return Err(Error::NotQuasihypermetric);
    }

    let masks = (1usize..(1 << n)).collect::<Vec<_>>();
    let strict_flags = par::indexed_map(masks.len(), |k| {
        let mask = masks[k];
        let indices = mask_to_indices(mask, n);
        strict_subset(d, &indices, tol).unwrap_or(false)
    });
    let strict_of = |mask: usize| strict_flags[mask - 1];

    let mut result = Vec::new();
    for mask in 1usize..(1 << n) {
        if !strict_of(mask) {
            continue;
        }
        let extendable = (0..n).any(|i| mask & (1 << i) == 0 && strict_of(mask | (1 << i)));
        if !extendable {
            result.push(mask_to_indices(mask, n));
        }
    }

    if let Some(first) = result.first() {
        if result.iter().any(|s| s.len() != first.len()) {
            return Err(Error::Internal(
                "maximal strict subsets of differing cardinality found".into(),
            ));
        }
    }
    Ok(result)
}

fn mask_to_indices(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|i| mask & (1 << i) != 0).collect()
}

/// The unique mass-1 measure `mu` supported on a maximal strict subspace `Y`
/// with `I(mu - delta_x) = 0` for an outside point `x`.
///
/// Found from the one-dimensional null direction of the energy form on
/// `Y + {x}`: that direction must load on `x` (otherwise `Y` would not be
/// strict), and rescaling it to cancel the point mass at `x` gives `mu`.
/// The returned weights live on the full space, supported on `Y`.
pub fn extension_measure(
    d: &DistanceMatrix,
    subspace: &[usize],
    x: usize,
    tol: f64,
) -> Result<WeightVector> {
    require_metric(d, tol)?;
    if subspace.contains(&x) {
        return Err(Error::Infeasible(format!("point {x} already lies in the subspace")));
    }
    if !strict_subset(d, subspace, tol)? {
        return Err(Error::Infeasible("subspace is not strictly quasihypermetric".into()));
    }

    let mut extended: Vec<usize> = subspace.to_vec();
    extended.push(x);
    extended.sort_unstable();
    let x_pos = extended.iter().position(|&i| i == x).unwrap();

    let sub = d.restrict(&extended)?;
    let analysis = classify::analyze(&sub, tol);
    let Some(null) = analysis.null_witness else {
        return Err(Error::Infeasible(
            "extension stays strict: the subspace is not maximal".into(),
        ));
    };
    let coeff_x = null.weights()[x_pos];
    let peak = null.weights().iter().fold(0.0_f64, |m, w| m.max(w.abs()));
    if coeff_x.abs() <= 1e-9 * peak.max(1.0) {
        return Err(Error::Internal(
            "null direction does not load on the extension point".into(),
        ));
    }

    let mut weights = vec![0.0; d.n()];
    for (pos, &orig) in extended.iter().enumerate() {
        if orig == x {
            continue;
        }
        weights[orig] = -null.weights()[pos] / coeff_x;
    }
    let mu = WeightVector::new(weights);
    debug_assert!((mu.mass() - 1.0).abs() < 1e-8);
    Ok(mu)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct MPreservationReport {
    pub m_subspace: f64,
    pub m_full: f64,
    /// Max minus min of the zero-extended invariant measure's potential over
    /// the full space.
    pub potential_spread: f64,
}

/// Checks that a maximal strict subspace carries the whole space's M: the
/// two values agree and the subspace's invariant measure, extended by zeros,
/// has constant potential everywhere. A violation is an internal fault.
pub fn verify_m_preservation(
    d: &DistanceMatrix,
    subspace: &[usize],
    tol: f64,
) -> Result<MPreservationReport> {
    require_metric(d, tol)?;
    let m_full = match measures::m_value(d, tol)? {
        MValue::Finite { value, .. } => value,
        MValue::Infinite => {
            return Err(Error::Infeasible("M of the full space is infinite".into()))
        }
        MValue::NotQuasihypermetric => return Err(Error::NotQuasihypermetric),
    };
    let sub = d.restrict(subspace)?;
    let (m_sub, invariant_sub) = match measures::m_value(&sub, tol)? {
        MValue::Finite { value, invariant } => (value, invariant),
        other => {
            return Err(Error::Internal(format!(
                "subspace of an M-finite space has M = {other:?}"
            )))
        }
    };

    let mut weights = vec![0.0; d.n()];
    for (pos, &orig) in subspace.iter().enumerate() {
        weights[orig] = invariant_sub.weights()[pos];
    }
    let extended = WeightVector::new(weights);
    let pot = measures::potential(d, &extended)?;
    let spread = pot.iter().fold(f64::NEG_INFINITY, |m, x| m.max(*x))
        - pot.iter().fold(f64::INFINITY, |m, x| m.min(*x));

    let scale = m_full.abs().max(1.0);
    if (m_sub - m_full).abs() > tol * scale || spread > tol * scale {
        return Err(Error::Internal(format!(
            "M preservation violated: M(Y) = {m_sub}, M(X) = {m_full}, potential spread {spread:.3e}"
        )));
    }
    Ok(MPreservationReport {
        m_subspace: m_sub,
        m_full,
        potential_spread: spread,
    })
}
