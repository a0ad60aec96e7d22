//! Two-qubit state representations: Bloch form, the five-parameter X-state
//! family and the 4×4 density matrix, plus physicality queries.
//!
//! Basis ordering is `|00⟩, |01⟩, |10⟩, |11⟩` with the first qubit (A) on the
//! high bit. Unphysical parameter points are representable everywhere;
//! physicality is always an explicit query.

use nalgebra::{Matrix3, Matrix4, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect, pauli_pair, C64};

/// Default tolerance on negative eigenvalues when deciding physicality.
pub const PSD_TOL: f64 = 1e-9;

/// Tolerance used when validating Hermiticity and unit trace of raw matrices.
pub const MATRIX_TOL: f64 = 1e-12;

/// Local Bloch vectors and correlation tensor of a two-qubit state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    /// Bloch vector of qubit A, `xᵢ = Tr ρ(σᵢ ⊗ I)`.
    pub x: Vector3<f64>,
    /// Bloch vector of qubit B, `yᵢ = Tr ρ(I ⊗ σᵢ)`.
    pub y: Vector3<f64>,
    /// Correlation tensor, `Rᵢⱼ = Tr ρ(σᵢ ⊗ σⱼ)`.
    pub corr: Matrix3<f64>,
}

impl BlochState {
    pub fn new(x: Vector3<f64>, y: Vector3<f64>, corr: Matrix3<f64>) -> Self {
        Self { x, y, corr }
    }

    pub fn zero() -> Self {
        Self::new(Vector3::zeros(), Vector3::zeros(), Matrix3::zeros())
    }

    pub fn to_density(&self) -> DensityMatrix {
        density_from_bloch(self)
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.to_density().min_eigenvalue() >= -tol
    }
}

/// X-state with z-directional local Bloch vectors `(0,0,r)`, `(0,0,s)` and
/// diagonal correlation tensor `diag(c1, c2, c3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateParams {
    pub r: f64,
    pub s: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl XStateParams {
    pub const fn new(r: f64, s: f64, c1: f64, c2: f64, c3: f64) -> Self {
        Self { r, s, c1, c2, c3 }
    }

    /// Bell-diagonal state (`r = s = 0`).
    pub const fn bell_diagonal(c1: f64, c2: f64, c3: f64) -> Self {
        Self::new(0.0, 0.0, c1, c2, c3)
    }

    pub fn is_bell_diagonal(&self) -> bool {
        self.r == 0.0 && self.s == 0.0
    }

    /// All five parameters multiplied by `factor` (mixing with the identity).
    pub fn scaled(&self, factor: f64) -> Self {
        Self::new(
            factor * self.r,
            factor * self.s,
            factor * self.c1,
            factor * self.c2,
            factor * self.c3,
        )
    }

    pub fn to_bloch(&self) -> BlochState {
        xstate_to_bloch(self)
    }

    pub fn to_density(&self) -> DensityMatrix {
        density_from_bloch(&self.to_bloch())
    }

    pub fn eigenvalues(&self) -> [f64; 4] {
        xstate_eigenvalues(self)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[3]
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        is_physical(self, tol)
    }
}

/// Hermitian, unit-trace 4×4 complex matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix4<C64>);

impl DensityMatrix {
    /// Validates Hermiticity and unit trace within [`MATRIX_TOL`].
    pub fn try_new(m: Matrix4<C64>) -> Result<Self> {
        let deviation = hermiticity_defect(&m);
        if deviation > MATRIX_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > MATRIX_TOL || trace.im.abs() > MATRIX_TOL {
            return Err(Error::NotUnitTrace { trace: trace.re });
        }
        Ok(Self(m))
    }

    pub(crate) fn from_matrix_unchecked(m: Matrix4<C64>) -> Self {
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<C64> {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix4<C64> {
        self.0
    }

    /// Eigenvalues, descending.
    pub fn eigenvalues(&self) -> [f64; 4] {
        hermitian_eigenvalues(&self.0)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[3]
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// `Tr ρ²`.
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// `Tr ρ(σᵢ ⊗ σⱼ)`.
    pub fn expectation(&self, i: usize, j: usize) -> f64 {
        (self.0 * pauli_pair(i, j)).trace().re
    }

    pub fn to_bloch(&self) -> BlochState {
        let x = Vector3::from_fn(|i, _| self.expectation(i + 1, 0));
        let y = Vector3::from_fn(|j, _| self.expectation(0, j + 1));
        let corr = Matrix3::from_fn(|i, j| self.expectation(i + 1, j + 1));
        BlochState::new(x, y, corr)
    }
}

/// The four Bell states, identified with the vertices of the Bell-diagonal
/// tetrahedron in `(c1, c2, c3)` space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellLabel {
    /// `(|00⟩ + |11⟩)/√2`, vertex `(1, −1, 1)`.
    PhiPlus,
    /// `(|00⟩ − |11⟩)/√2`, vertex `(−1, 1, 1)`.
    PhiMinus,
    /// `(|01⟩ + |10⟩)/√2`, vertex `(1, 1, −1)`.
    PsiPlus,
    /// `(|01⟩ − |10⟩)/√2`, vertex `(−1, −1, −1)`.
    PsiMinus,
}

impl BellLabel {
    pub const ALL: [BellLabel; 4] = [
        BellLabel::PhiPlus,
        BellLabel::PhiMinus,
        BellLabel::PsiPlus,
        BellLabel::PsiMinus,
    ];

    pub fn vertex(self) -> [f64; 3] {
        match self {
            BellLabel::PhiPlus => [1.0, -1.0, 1.0],
            BellLabel::PhiMinus => [-1.0, 1.0, 1.0],
            BellLabel::PsiPlus => [1.0, 1.0, -1.0],
            BellLabel::PsiMinus => [-1.0, -1.0, -1.0],
        }
    }
}

pub fn bell_state(label: BellLabel) -> XStateParams {
    let [c1, c2, c3] = label.vertex();
    XStateParams::bell_diagonal(c1, c2, c3)
}

/// `ρ = ¼[I⊗I + Σ xᵢ σᵢ⊗I + Σ yᵢ I⊗σᵢ + Σ Rᵢⱼ σᵢ⊗σⱼ]`.
pub fn density_from_bloch(b: &BlochState) -> DensityMatrix {
    let mut m = pauli_pair(0, 0);
    for i in 0..3 {
        m += pauli_pair(i + 1, 0) * C64::from(b.x[i]);
        m += pauli_pair(0, i + 1) * C64::from(b.y[i]);
        for j in 0..3 {
            m += pauli_pair(i + 1, j + 1) * C64::from(b.corr[(i, j)]);
        }
    }
    DensityMatrix(m * C64::from(0.25))
}

/// Inverse of [`density_from_bloch`]; rejects matrices that are not Hermitian
/// with unit trace.
pub fn bloch_from_density(m: &Matrix4<C64>) -> Result<BlochState> {
    DensityMatrix::try_new(*m).map(|rho| rho.to_bloch())
}

pub fn xstate_to_bloch(p: &XStateParams) -> BlochState {
    BlochState::new(
        Vector3::new(0.0, 0.0, p.r),
        Vector3::new(0.0, 0.0, p.s),
        Matrix3::from_diagonal(&Vector3::new(p.c1, p.c2, p.c3)),
    )
}

/// Closed-form spectrum of an X-state, descending.
///
/// The `{|01⟩, |10⟩}` block gives `¼(1 ± √((r−s)² + (c1+c2)²) − c3)` and the
/// `{|00⟩, |11⟩}` block gives `¼(1 ± √((r+s)² + (c1−c2)²) + c3)`.
pub fn xstate_eigenvalues(p: &XStateParams) -> [f64; 4] {
    let XStateParams { r, s, c1, c2, c3 } = *p;
    let odd = (r - s).hypot(c1 + c2);
    let even = (r + s).hypot(c1 - c2);
    let mut values = [
        0.25 * (1.0 - odd - c3),
        0.25 * (1.0 + odd - c3),
        0.25 * (1.0 - even + c3),
        0.25 * (1.0 + even + c3),
    ];
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

pub fn is_physical(p: &XStateParams, tol: f64) -> bool {
    xstate_eigenvalues(p)[3] >= -tol
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::Matrix4;
    use proptest::prelude::*;

    fn real_matrix(m: &DensityMatrix) -> Matrix4<f64> {
        m.matrix().map(|z| {
            assert!(z.im.abs() < 1e-15);
            z.re
        })
    }

    #[test]
    fn maximally_mixed_density() {
        let rho = density_from_bloch(&BlochState::zero());
        assert_eq!(real_matrix(&rho), Matrix4::identity() * 0.25);
        let b = rho.to_bloch();
        assert_eq!(b, BlochState::zero());
    }

    #[test]
    fn phi_plus_density_by_hand() {
        let rho = bell_state(BellLabel::PhiPlus).to_density();
        let mut expected = Matrix4::zeros();
        expected[(0, 0)] = 0.5;
        expected[(3, 3)] = 0.5;
        expected[(0, 3)] = 0.5;
        expected[(3, 0)] = 0.5;
        assert_eq!(real_matrix(&rho), expected);
    }

    #[test]
    fn product_ket_zero_zero() {
        let b = BlochState::new(
            Vector3::new(0.0, 0.0, 1.0),
            Vector3::new(0.0, 0.0, 1.0),
            Matrix3::from_diagonal(&Vector3::new(0.0, 0.0, 1.0)),
        );
        let rho = density_from_bloch(&b);
        let mut expected = Matrix4::zeros();
        expected[(0, 0)] = 1.0;
        assert_eq!(real_matrix(&rho), expected);
        assert_eq!(rho.to_bloch(), b);
    }

    #[test]
    fn rejects_bad_matrices() {
        let mut m = Matrix4::<C64>::identity() * C64::from(0.25);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(matches!(
            bloch_from_density(&m),
            Err(Error::NotHermitian { .. })
        ));

        let m = Matrix4::<C64>::identity() * C64::from(0.3);
        assert!(matches!(
            bloch_from_density(&m),
            Err(Error::NotUnitTrace { .. })
        ));
    }

    #[test]
    fn xstate_bloch_layout() {
        assert_eq!(
            XStateParams::new(0.0, 0.0, 0.0, 0.0, 0.0).to_bloch(),
            BlochState::zero()
        );
        let b = XStateParams::new(0.3, 0.3, 0.1, 0.1, 0.2).to_bloch();
        assert_eq!(b.x, Vector3::new(0.0, 0.0, 0.3));
        assert_eq!(b.y, Vector3::new(0.0, 0.0, 0.3));
        assert_eq!(b.corr, Matrix3::from_diagonal(&Vector3::new(0.1, 0.1, 0.2)));
        let b = bell_state(BellLabel::PhiPlus).to_bloch();
        assert_eq!(
            b.corr,
            Matrix3::from_diagonal(&Vector3::new(1.0, -1.0, 1.0))
        );
    }

    #[test]
    fn closed_form_eigenvalues() {
        assert_eq!(
            XStateParams::new(0.0, 0.0, 0.0, 0.0, 0.0).eigenvalues(),
            [0.25; 4]
        );
        let bell = bell_state(BellLabel::PhiPlus).eigenvalues();
        for (got, want) in bell.iter().zip([1.0, 0.0, 0.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
        let p = XStateParams::new(0.3, 0.3, 0.1, 0.1, 0.2);
        let closed = p.eigenvalues();
        let direct = p.to_density().eigenvalues();
        for k in 0..4 {
            assert_abs_diff_eq!(closed[k], direct[k], epsilon = 1e-12);
        }
        assert_abs_diff_eq!(closed.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn physicality_examples() {
        assert!(is_physical(
            &XStateParams::new(0.3, 0.3, 0.0, 0.0, 0.0),
            PSD_TOL
        ));
        let p = XStateParams::new(0.5, 0.5, 1.0, -1.0, 1.0);
        // ¼(1 − √(1 + 4) + 1) < 0
        assert!(p.eigenvalues()[3] < 0.0);
        assert!(!is_physical(&p, PSD_TOL));
        for label in BellLabel::ALL {
            let p = bell_state(label);
            assert!(p.is_bell_diagonal());
            assert!(is_physical(&p, PSD_TOL));
            assert_abs_diff_eq!(p.to_density().purity(), 1.0, epsilon = 1e-15);
        }
        assert_eq!(
            bell_state(BellLabel::ALL[0]),
            XStateParams::new(0.0, 0.0, 1.0, -1.0, 1.0)
        );
    }

    fn unit() -> impl Strategy<Value = f64> {
        -1.0f64..=1.0
    }

    fn any_bloch() -> impl Strategy<Value = BlochState> {
        (
            proptest::array::uniform3(unit()),
            proptest::array::uniform3(unit()),
            proptest::array::uniform9(unit()),
        )
            .prop_map(|(x, y, r)| {
                BlochState::new(
                    Vector3::from(x),
                    Vector3::from(y),
                    Matrix3::from_row_slice(&r),
                )
            })
    }

    fn any_xstate() -> impl Strategy<Value = XStateParams> {
        (unit(), unit(), unit(), unit(), unit())
            .prop_map(|(r, s, c1, c2, c3)| XStateParams::new(r, s, c1, c2, c3))
    }

    #[test]
    fn eigenvalues_finite_when_blocks_cancel() {
        let p = XStateParams::new(
            0.3,
            0.3,
            0.46666666666666656,
            -0.46666666666666684,
            0.2666666666666666,
        );
        let values = xstate_eigenvalues(&p);
        assert!(values.iter().all(|v| v.is_finite()));
        assert!(is_physical(&p, PSD_TOL));
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 1000, max_global_rejects: 1 << 20, ..ProptestConfig::default() })]

        #[test]
        fn bloch_density_round_trip(b in any_bloch()) {
            let rho = density_from_bloch(&b);
            prop_assert!(hermiticity_defect(rho.matrix()) <= 1e-15);
            prop_assert!((rho.matrix().trace().re - 1.0).abs() <= 1e-15);
            let back = bloch_from_density(rho.matrix()).unwrap();
            prop_assert!((back.x - b.x).amax() <= 1e-12);
            prop_assert!((back.y - b.y).amax() <= 1e-12);
            prop_assert!((back.corr - b.corr).amax() <= 1e-12);
        }

        #[test]
        fn closed_eigenvalues_match_dense_solver(p in any_xstate()) {
            let closed = xstate_eigenvalues(&p);
            let direct = p.to_density().eigenvalues();
            for k in 0..4 {
                prop_assert!((closed[k] - direct[k]).abs() <= 1e-10);
            }
            prop_assert!((closed.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn physicality_survives_mixing_with_identity(p in any_xstate(), lambda in 0.0f64..=1.0) {
            prop_assume!(is_physical(&p, PSD_TOL));
            prop_assert!(is_physical(&p.scaled(lambda), PSD_TOL));
        }
    }
}
