//! Dense symmetric linear algebra used throughout the crate: cyclic Jacobi
//! eigendecomposition, numerical rank, and minimum-norm least squares through
//! the spectral pseudo-inverse. Self-contained so results are reproducible
//! across platforms.

/// Eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues are sorted in descending order; `vectors[k]` is the unit
/// eigenvector for `values[k]`. Vector signs are fixed so the first entry of
/// significant magnitude is positive.
#[derive(Debug, Clone)]
pub(crate) struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

const MAX_SWEEPS: usize = 60;

/// Cyclic Jacobi on a symmetric `n x n` matrix given in row-major order.
///
/// Converges quadratically; 60 sweeps is far beyond what any matrix in this
/// crate's size regime (n up to a few hundred) needs.
pub(crate) fn sym_eigen(n: usize, matrix: &[f64]) -> SymEigen {
    assert_eq!(matrix.len(), n * n, "matrix must be square");
    if n == 0 {
        return SymEigen {
            values: Vec::new(),
            vectors: Vec::new(),
        };
    }

    let mut a = matrix.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }

    let frob: f64 = matrix.iter().map(|x| x * x).sum::<f64>().sqrt();
    let stop = 1e-15 * frob.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= stop {
            break;
        }

        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= stop / (n as f64) {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                // tan of the rotation angle, smaller root for stability
                let t = if theta >= 0.0 {
                    1.0 / (theta + (1.0 + theta * theta).sqrt())
                } else {
                    1.0 / (theta - (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                for j in 0..n {
                    if j == p || j == q {
                        continue;
                    }
                    let ajp = a[j * n + p];
                    let ajq = a[j * n + q];
                    a[j * n + p] = c * ajp - s * ajq;
                    a[p * n + j] = a[j * n + p];
                    a[j * n + q] = s * ajp + c * ajq;
                    a[q * n + j] = a[j * n + q];
                }
                for j in 0..n {
                    let vjp = v[j * n + p];
                    let vjq = v[j * n + q];
                    v[j * n + p] = c * vjp - s * vjq;
                    v[j * n + q] = s * vjp + c * vjq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[j * n + j]
            .partial_cmp(&a[i * n + i])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });

    let mut values = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    for &k in &order {
        values.push(a[k * n + k]);
        let mut col: Vec<f64> = (0..n).map(|i| v[i * n + k]).collect();
        fix_sign(&mut col);
        vectors.push(col);
    }
    SymEigen { values, vectors }
}

/// Flips the vector so its first entry of significant magnitude is positive.
fn fix_sign(v: &mut [f64]) {
    let peak = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if peak == 0.0 {
        return;
    }
    for &x in v.iter() {
        if x.abs() > 1e-12 * peak {
            if x < 0.0 {
                v.iter_mut().for_each(|y| *y = -*y);
            }
            return;
        }
    }
}

impl SymEigen {
    pub fn max_abs_value(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    /// Count of eigenvalues with magnitude above `rel_cut` times the largest.
    pub fn rank(&self, rel_cut: f64) -> usize {
        let cut = rel_cut * self.max_abs_value();
        self.values.iter().filter(|x| x.abs() > cut).count()
    }

    /// Minimum-norm least-squares solution of `A x = b` via the spectral
    /// pseudo-inverse, zeroing modes below `rel_cut` relative magnitude.
    pub fn min_norm_solve(&self, b: &[f64], rel_cut: f64) -> Vec<f64> {
        let n = self.values.len();
        assert_eq!(b.len(), n);
        let cut = rel_cut * self.max_abs_value();
        let mut x = vec![0.0; n];
        for (lambda, vec) in self.values.iter().zip(&self.vectors) {
            if lambda.abs() <= cut {
                continue;
            }
            let coef = dot(vec, b) / lambda;
            for (xi, vi) in x.iter_mut().zip(vec) {
                *xi += coef * vi;
            }
        }
        x
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn mat_vec(n: usize, matrix: &[f64], x: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = dot(&matrix[i * n..(i + 1) * n], x);
    }
    out
}

/// Double centering: returns `P A P` where `P = I - J/n` is the projector
/// onto the zero-mean hyperplane. `A` must be symmetric.
pub(crate) fn double_center(n: usize, matrix: &[f64]) -> Vec<f64> {
    let nf = n as f64;
    let mut row_mean = vec![0.0; n];
    for i in 0..n {
        row_mean[i] = matrix[i * n..(i + 1) * n].iter().sum::<f64>() / nf;
    }
    let grand: f64 = row_mean.iter().sum::<f64>() / nf;
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = matrix[i * n + j] - row_mean[i] - row_mean[j] + grand;
        }
    }
    out
}

/// Pairwise (cascade) summation; limits floating-point drift on long sums.
pub(crate) fn pairwise_sum(terms: &mut [f64]) -> f64 {
    let mut len = terms.len();
    if len == 0 {
        return 0.0;
    }
    while len > 1 {
        let half = len / 2;
        for i in 0..half {
            terms[i] = terms[2 * i] + terms[2 * i + 1];
        }
        if len % 2 == 1 {
            terms[half] = terms[len - 1];
            len = half + 1;
        } else {
            len = half;
        }
    }
    terms[0]
}
