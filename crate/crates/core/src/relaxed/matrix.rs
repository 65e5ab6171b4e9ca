//! Numerical checks of the linear-algebra facts behind the uniqueness of the
//! relaxed minimiser: the Lagrange matrix `B(y)`, its kernel, the residue
//! identity `B(y) p_y = ((-1)^m/m) e`, and the Jordan form of its square
//! extension. These are validation paths and are only meant for small `m`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, integrate};

/// `(y_0, ..., y_{m-1})` with `y_0 ≡ 1`, rejecting coincident coordinates.
fn extended(y: &[f64]) -> Result<Vec<f64>> {
    let full: Vec<f64> = std::iter::once(1.0).chain(y.iter().copied()).collect();
    for i in 0..full.len() {
        for j in i + 1..full.len() {
            if full[i] == full[j] {
                return Err(Error::SingularPoint(i, j));
            }
        }
    }
    Ok(full)
}

/// `b_j(y) = ∏'_i 1/(y_i - y_j)`.
fn b_values(full: &[f64]) -> Vec<f64> {
    (0..full.len())
        .map(|j| {
            (0..full.len())
                .filter(|&i| i != j)
                .map(|i| 1.0 / (full[i] - full[j]))
                .product()
        })
        .collect()
}

/// The `(m-1) × m` matrix `B(y)`: row `k` (for `y_k`, `k = 1..m-1`) has
/// `b_j/(y_k - y_j)` in column `j ≠ k` and `Σ'_l b_k/(y_k - y_l)` in column `k`.
pub fn build_b_matrix(y: &[f64]) -> Result<DMatrix<f64>> {
    let full = extended(y)?;
    let m = full.len();
    let b = b_values(&full);
    Ok(DMatrix::from_fn(m - 1, m, |r, j| {
        let k = r + 1;
        if j == k {
            (0..m).filter(|&l| l != k).map(|l| b[k] / (full[k] - full[l])).sum()
        } else {
            b[j] / (full[k] - full[j])
        }
    }))
}

/// `(p(y_0), ..., p(y_{m-1}))` for the polynomial with
/// `p'(s) = ∏_{j≥1} (s - y_j)` and `p(0) = 0`.
///
/// Each value is an exact Gauss–Legendre integral of `p'` over `[0, y_i]`.
pub fn p_vector(y: &[f64]) -> Vec<f64> {
    let rule = gauss_legendre(y.len() / 2 + 1);
    let deriv = |s: f64| y.iter().map(|&yj| s - yj).product::<f64>();
    std::iter::once(1.0)
        .chain(y.iter().copied())
        .map(|yi| integrate(&rule, 0.0, yi, deriv))
        .collect()
}

/// Outcome of the Jordan-form check for the square extension `B̃(y)`.
#[derive(Debug, Clone)]
pub struct JordanReport {
    /// `‖B̃P - PJ‖_max / ‖B̃P‖_max`.
    pub residual: f64,
    /// Singular values of `B̃`, largest first.
    pub singular_values: Vec<f64>,
}

impl JordanReport {
    /// Exactly one singular value below `1e-8` times the largest.
    pub fn has_corank_one(&self) -> bool {
        let top = self.singular_values[0];
        self.singular_values.iter().filter(|&&s| s < 1e-8 * top).count() == 1
    }

    /// Second-smallest over largest singular value.
    pub fn second_smallest_ratio(&self) -> f64 {
        let n = self.singular_values.len();
        if n < 2 {
            return 0.0;
        }
        self.singular_values[n - 2] / self.singular_values[0]
    }
}

/// Forms `B̃(y)` (columns of `B` divided by `b_j`, completed by the row that
/// makes every column sum vanish) and `P(y)` with
/// `P_{jn} = b_j (y_j - y_{m-1})^n / n!`, and measures how far
/// `B̃ P = P J` is from holding, `J` the nilpotent Jordan block.
pub fn jordan_residual(y: &[f64]) -> Result<JordanReport> {
    let full = extended(y)?;
    let m = full.len();
    let b = b_values(&full);
    let tilde = DMatrix::from_fn(m, m, |j, k| {
        if j == k {
            (0..m).filter(|&l| l != j).map(|l| 1.0 / (full[j] - full[l])).sum()
        } else {
            1.0 / (full[j] - full[k])
        }
    });
    let last = full[m - 1];
    let p = DMatrix::from_fn(m, m, |j, n| {
        let mut v = b[j];
        for i in 1..=n {
            v *= (full[j] - last) / i as f64;
        }
        v
    });
    let mut pj = DMatrix::zeros(m, m);
    for n in 1..m {
        pj.set_column(n, &p.column(n - 1));
    }
    let bp = &tilde * &p;
    let residual = (&bp - &pj).amax() / bp.amax();
    let mut singular_values: Vec<f64> = tilde.singular_values().iter().copied().collect();
    singular_values.sort_by(|a, b| b.total_cmp(a));
    Ok(JordanReport { residual, singular_values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Random coordinates in (1.5, 50), pairwise at least 0.1 apart.
    fn random_y(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
        let mut y: Vec<f64> = Vec::with_capacity(len);
        while y.len() < len {
            let c = rng.random_range(1.5..50.0);
            if y.iter().all(|v: &f64| (v - c).abs() >= 0.1) {
                y.push(c);
            }
        }
        y
    }

    fn inf_norm(b: &DMatrix<f64>) -> f64 {
        b.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }

    #[test]
    fn hand_sized_case() {
        // m = 2, y = (3): b_0 = 1/2, b_1 = -1/2, B = [b_0/(3-1), b_1/(3-1)].
        let b = build_b_matrix(&[3.0]).unwrap();
        assert_eq!(b.shape(), (1, 2));
        assert!((b[(0, 0)] - 0.25).abs() < 1e-15);
        assert!((b[(0, 1)] + 0.25).abs() < 1e-15);
        assert!((b[(0, 0)] + b[(0, 1)]).abs() < 1e-15);
        let rep = jordan_residual(&[3.0]).unwrap();
        assert!(rep.residual < 1e-12);
        assert!(rep.has_corank_one());
    }

    #[test]
    fn p_vector_small_case() {
        // p'(s) = s - 3, p(s) = s²/2 - 3s
        let p = p_vector(&[3.0]);
        assert!((p[0] - (0.5 - 3.0)).abs() < 1e-14);
        assert!((p[1] - (4.5 - 9.0)).abs() < 1e-14);
    }

    #[test]
    fn coincident_coordinates_rejected() {
        assert_eq!(build_b_matrix(&[2.0, 2.0]).unwrap_err(), Error::SingularPoint(1, 2));
        assert_eq!(jordan_residual(&[1.0]).unwrap_err(), Error::SingularPoint(0, 1));
    }

    #[test]
    fn kernel_residue_and_jordan_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for m in 2..=12 {
            for _ in 0..20 {
                let y = random_y(&mut rng, m - 1);
                let b = build_b_matrix(&y).unwrap();
                let scale = inf_norm(&b);
                let e = nalgebra::DVector::from_element(m, 1.0);
                assert!((&b * &e).amax() <= 1e-9 * scale, "m={m}");

                let p = nalgebra::DVector::from_vec(p_vector(&y));
                let target = if m % 2 == 0 { 1.0 } else { -1.0 } / m as f64;
                let bp = &b * &p;
                let tol = 1e-9 * (scale * p.amax()).max(1.0);
                assert!(bp.iter().all(|v| (v - target).abs() <= tol), "m={m} bp={bp}");

                let rep = jordan_residual(&y).unwrap();
                assert!(rep.residual < 1e-8, "m={m} residual={}", rep.residual);
                assert!(rep.has_corank_one(), "m={m} sv={:?}", rep.singular_values);
                assert!(rep.second_smallest_ratio() > 1e-4, "m={m} sv={:?}", rep.singular_values);
            }
        }
    }
}
