//! Geometric discord (measurement on qubit A) and concurrence.
//!
//! Three routes to the geometric discord are provided and kept mutually
//! consistent: the correlation-matrix eigenvalue form, the singular values of
//! the truncated expectation matrix, and the X-state closed form. None of them
//! checks physicality; callers validate first.

use nalgebra::{Matrix3, Matrix3x4, Matrix4, SymmetricEigen};

use crate::error::{Error, Result};
use crate::linalg::{pauli_pair, symmetric_max_eigenvalue, C64};
use crate::state::{BlochState, DensityMatrix, XStateParams, PSD_TOL};

/// Expectation matrix `𝓡ᵢⱼ = Tr ρ(σᵢ ⊗ σⱼ)` for `i, j ∈ {0..3}`.
///
/// Row 0 is `(1, yᵀ)`, column 0 is `(1, x)ᵀ` and the lower-right block is the
/// correlation tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectationMatrix(Matrix4<f64>);

impl ExpectationMatrix {
    pub fn from_bloch(b: &BlochState) -> Self {
        let mut m = Matrix4::zeros();
        m[(0, 0)] = 1.0;
        for i in 0..3 {
            m[(0, i + 1)] = b.y[i];
            m[(i + 1, 0)] = b.x[i];
            for j in 0..3 {
                m[(i + 1, j + 1)] = b.corr[(i, j)];
            }
        }
        Self(m)
    }

    /// Wraps a raw matrix. The `(0, 0)` entry is not forced to 1.
    pub fn from_matrix(m: Matrix4<f64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn to_bloch(&self) -> BlochState {
        let m = &self.0;
        BlochState::new(
            m.fixed_view::<3, 1>(1, 0).into_owned(),
            m.fixed_view::<1, 3>(0, 1).transpose(),
            m.fixed_view::<3, 3>(1, 1).into_owned(),
        )
    }

    /// The 3×4 matrix obtained by deleting row 0, i.e. `[x | R]`.
    pub fn truncated(&self) -> Matrix3x4<f64> {
        self.0.fixed_view::<3, 4>(1, 0).into_owned()
    }
}

pub fn expectation_matrix(b: &BlochState) -> ExpectationMatrix {
    ExpectationMatrix::from_bloch(b)
}

/// `¼(‖x‖² + ‖R‖²_F − k_max)` with `k_max` the top eigenvalue of `xxᵀ + RRᵀ`.
pub fn gmqd_bloch(b: &BlochState) -> f64 {
    let k: Matrix3<f64> = b.x * b.x.transpose() + b.corr * b.corr.transpose();
    let k_max = symmetric_max_eigenvalue(&k);
    (0.25 * (b.x.norm_squared() + b.corr.norm_squared() - k_max)).max(0.0)
}

/// `¼(Σλₖ² − max λₖ²)` over the singular values of `[x | R]`.
pub fn gmqd_svd(b: &BlochState) -> f64 {
    gmqd_from_truncated(&expectation_matrix(b).truncated())
}

pub(crate) fn gmqd_from_truncated(m: &Matrix3x4<f64>) -> f64 {
    let sv = m.singular_values();
    let squares = sv.map(|v| v * v);
    let max = squares.iter().copied().fold(0.0, f64::max);
    (0.25 * (squares.sum() - max)).max(0.0)
}

/// X-state closed form `¼(c1² + c2² + c3² + r² − max(c1², c2², c3² + r²))`.
///
/// Depends on `r` but never on `s`: the measurement is on qubit A.
pub fn gmqd_xstate(p: &XStateParams) -> f64 {
    let a = p.c1 * p.c1;
    let b = p.c2 * p.c2;
    let c = p.c3 * p.c3 + p.r * p.r;
    0.25 * (a + b + c - a.max(b).max(c))
}

/// Wootters concurrence `max{0, λ₁ − λ₂ − λ₃ − λ₄}` of a general two-qubit state.
///
/// The `λᵢ` (square roots of the spectrum of `ρ(σ_y⊗σ_y)ρ*(σ_y⊗σ_y)`) are
/// obtained as singular values of `τ = Wᵀ(σ_y⊗σ_y)W` with `ρ = WW†`, which
/// avoids taking square roots of near-zero eigenvalues of the non-Hermitian
/// product.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    let eig = SymmetricEigen::new(*rho.matrix());
    let min_eigenvalue = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::NotPositive { min_eigenvalue });
    }
    let mut w = eig.eigenvectors;
    for (k, mut col) in w.column_iter_mut().enumerate() {
        col *= C64::from(eig.eigenvalues[k].max(0.0).sqrt());
    }
    let flip = pauli_pair(2, 2);
    let tau = w.transpose() * flip * w;
    let mut lambdas: Vec<f64> = tau.singular_values().iter().copied().collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// X-state concurrence
/// `2·max{0, |ρ₂₃| − √(ρ₁₁ρ₄₄), |ρ₁₄| − √(ρ₂₂ρ₃₃)}`.
pub fn concurrence_xstate(p: &XStateParams) -> f64 {
    let XStateParams { r, s, c1, c2, c3 } = *p;
    let rho11 = 0.25 * (1.0 + r + s + c3);
    let rho44 = 0.25 * (1.0 - r - s + c3);
    let rho22 = 0.25 * (1.0 + r - s - c3);
    let rho33 = 0.25 * (1.0 - r + s - c3);
    let coherent_odd = 0.25 * (c1 + c2).abs() - (rho11 * rho44).max(0.0).sqrt();
    let coherent_even = 0.25 * (c1 - c2).abs() - (rho22 * rho33).max(0.0).sqrt();
    2.0 * coherent_odd.max(coherent_even).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::{bell_state, BellLabel};
    use approx::assert_abs_diff_eq;
    use nalgebra::Vector3;
    use proptest::prelude::*;

    #[test]
    fn expectation_matrix_layout() {
        let e = expectation_matrix(&BlochState::zero());
        let mut expected = Matrix4::zeros();
        expected[(0, 0)] = 1.0;
        assert_eq!(*e.matrix(), expected);

        let p = XStateParams::new(0.4, 0.1, 0.2, 0.05, 0.3);
        let e = expectation_matrix(&p.to_bloch());
        #[rustfmt::skip]
        let expected = Matrix4::new(
            1.0, 0.0, 0.0, 0.1,
            0.0, 0.2, 0.0, 0.0,
            0.0, 0.0, 0.05, 0.0,
            0.4, 0.0, 0.0, 0.3,
        );
        assert_eq!(*e.matrix(), expected);
        assert_eq!(e.to_bloch(), p.to_bloch());
    }

    #[test]
    fn expectation_matrix_matches_traces() {
        let p = XStateParams::new(0.3, -0.2, 0.1, 0.4, -0.3);
        let rho = p.to_density();
        let e = expectation_matrix(&p.to_bloch());
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(e.matrix()[(i, j)], rho.expectation(i, j), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn zero_discord_product_states() {
        let b = BlochState::new(
            Vector3::new(0.3, -0.4, 0.5),
            Vector3::new(0.1, 0.2, 0.3),
            Matrix3::zeros(),
        );
        assert_abs_diff_eq!(gmqd_bloch(&b), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(gmqd_svd(&b), 0.0, epsilon = 1e-15);
        assert_eq!(
            gmqd_xstate(&XStateParams::new(0.5, 0.2, 0.0, 0.0, 0.0)),
            0.0
        );
        assert_eq!(gmqd_svd(&BlochState::zero()), 0.0);
    }

    #[test]
    fn bell_vertices_are_maximal() {
        for label in BellLabel::ALL {
            let p = bell_state(label);
            assert_abs_diff_eq!(gmqd_xstate(&p), 0.5, epsilon = 1e-15);
            assert_abs_diff_eq!(gmqd_bloch(&p.to_bloch()), 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(gmqd_svd(&p.to_bloch()), 0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(concurrence(&p.to_density()).unwrap(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(concurrence_xstate(&p), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn figure_four_initial_value() {
        // ¼(0.01 + 0.01 + 0.04 + 0.09 − 0.13)
        let p = XStateParams::new(0.3, 0.3, 0.1, 0.1, 0.2);
        assert_abs_diff_eq!(gmqd_xstate(&p), 0.005, epsilon = 1e-15);
        assert_abs_diff_eq!(gmqd_bloch(&p.to_bloch()), 0.005, epsilon = 1e-12);
    }

    #[test]
    fn concurrence_examples() {
        let mixed = XStateParams::new(0.0, 0.0, 0.0, 0.0, 0.0);
        assert_abs_diff_eq!(
            concurrence(&mixed.to_density()).unwrap(),
            0.0,
            epsilon = 1e-15
        );
        let werner = XStateParams::bell_diagonal(0.6, -0.6, 0.6);
        assert_abs_diff_eq!(
            concurrence(&werner.to_density()).unwrap(),
            0.4,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(concurrence_xstate(&werner), 0.4, epsilon = 1e-15);
        assert_eq!(
            concurrence_xstate(&XStateParams::new(0.3, -0.2, 0.0, 0.0, 0.0)),
            0.0
        );

        let p = XStateParams::new(0.3, 0.3, 0.1, 0.1, 0.2);
        assert_abs_diff_eq!(
            concurrence_xstate(&p),
            concurrence(&p.to_density()).unwrap(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn concurrence_rejects_non_positive() {
        let p = XStateParams::new(0.5, 0.5, 1.0, -1.0, 1.0);
        assert!(matches!(
            concurrence(&p.to_density()),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn concurrence_of_partially_entangled_pure_state() {
        // cos θ|00⟩ + sin θ|11⟩ has C = sin 2θ.
        let theta = 0.3f64;
        let (c, s) = (theta.cos(), theta.sin());
        let mut m = Matrix4::<C64>::zeros();
        m[(0, 0)] = C64::from(c * c);
        m[(3, 3)] = C64::from(s * s);
        m[(0, 3)] = C64::from(c * s);
        m[(3, 0)] = C64::from(c * s);
        let rho = DensityMatrix::try_new(m).unwrap();
        assert_abs_diff_eq!(
            concurrence(&rho).unwrap(),
            (2.0 * theta).sin(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn permuting_bell_diagonal_coefficients() {
        let (a, b, c) = (0.2, -0.5, 0.3);
        let base = gmqd_xstate(&XStateParams::bell_diagonal(a, b, c));
        for (x, y, z) in [(a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)] {
            assert_abs_diff_eq!(
                gmqd_xstate(&XStateParams::bell_diagonal(x, y, z)),
                base,
                epsilon = 1e-15
            );
        }
    }

    fn physical_xstate() -> impl Strategy<Value = XStateParams> {
        let u = || -1.0f64..=1.0;
        (u(), u(), u(), u(), u())
            .prop_map(|(r, s, c1, c2, c3)| XStateParams::new(r, s, c1, c2, c3))
            .prop_filter("physical", |p| p.is_physical(0.0))
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 500, max_global_rejects: 1 << 20, ..ProptestConfig::default() })]

        #[test]
        fn discord_routes_agree(p in physical_xstate()) {
            let b = p.to_bloch();
            let closed = gmqd_xstate(&p);
            prop_assert!((gmqd_bloch(&b) - gmqd_svd(&b)).abs() <= 1e-10);
            prop_assert!((closed - gmqd_bloch(&b)).abs() <= 1e-10);
            prop_assert!((0.0..=0.5).contains(&closed));
        }

        #[test]
        fn concurrence_fast_path_agrees(p in physical_xstate()) {
            let general = concurrence(&p.to_density()).unwrap();
            let fast = concurrence_xstate(&p);
            prop_assert!((general - fast).abs() <= 1e-10);
            prop_assert!((0.0..=1.0 + 1e-12).contains(&general));
        }
    }
}
