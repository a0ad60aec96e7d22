//! Small dense helpers shared by the state, correlation and channel modules.

use nalgebra::{Complex, Matrix2, Matrix3, Matrix4, SymmetricEigen};

pub type C64 = Complex<f64>;

pub(crate) const ZERO: C64 = Complex::new(0.0, 0.0);
pub(crate) const ONE: C64 = Complex::new(1.0, 0.0);
pub(crate) const I: C64 = Complex::new(0.0, 1.0);

/// `I, σ₁, σ₂, σ₃` in the computational basis.
pub fn pauli(index: usize) -> Matrix2<C64> {
    match index {
        0 => Matrix2::new(ONE, ZERO, ZERO, ONE),
        1 => Matrix2::new(ZERO, ONE, ONE, ZERO),
        2 => Matrix2::new(ZERO, -I, I, ZERO),
        3 => Matrix2::new(ONE, ZERO, ZERO, -ONE),
        _ => panic!("Pauli index {index} out of range"),
    }
}

/// Kronecker product of two single-qubit operators, first factor on the high bit.
pub fn kron(a: &Matrix2<C64>, b: &Matrix2<C64>) -> Matrix4<C64> {
    Matrix4::from_fn(|row, col| a[(row / 2, col / 2)] * b[(row % 2, col % 2)])
}

/// `σᵢ ⊗ σⱼ` for `i, j ∈ {0, 1, 2, 3}`.
pub fn pauli_pair(i: usize, j: usize) -> Matrix4<C64> {
    kron(&pauli(i), &pauli(j))
}

/// Eigenvalues of a Hermitian 4×4 matrix in descending order.
pub fn hermitian_eigenvalues(m: &Matrix4<C64>) -> [f64; 4] {
    let eig = SymmetricEigen::new(*m);
    let mut values: [f64; 4] = std::array::from_fn(|k| eig.eigenvalues[k]);
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Largest eigenvalue of a real symmetric 3×3 matrix.
pub fn symmetric_max_eigenvalue(m: &Matrix3<f64>) -> f64 {
    SymmetricEigen::new(*m)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Largest entrywise modulus of `m - m†`.
pub fn hermiticity_defect(m: &Matrix4<C64>) -> f64 {
    let adjoint = m.adjoint();
    (m - adjoint).iter().map(|z| z.norm()).fold(0.0, f64::max)
}
