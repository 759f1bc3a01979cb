//! Dense complex matrix aliases and small helpers shared by the other modules.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

pub type C64 = Complex64;
/// Dense complex matrix. Data sets store one sample per row.
pub type ComplexMatrix = DMatrix<C64>;
pub type RealMatrix = DMatrix<f64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Draws one circularly-symmetric complex Gaussian sample with total variance
/// `var` (each of the real and imaginary parts has variance `var / 2`).
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> C64 {
    let s = (0.5 * var).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

/// Matrix with i.i.d. unit-variance circular complex Gaussian entries.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng, 1.0))
}

/// Orthonormal basis for the column span of a full-column-rank matrix.
pub fn orthonormalize(a: &ComplexMatrix) -> ComplexMatrix {
    a.clone().qr().q()
}

/// Random point on the Grassmannian: an `ambient x dim` matrix with
/// orthonormal columns, Haar-distributed up to the QR phase convention.
pub fn random_orthonormal<R: Rng + ?Sized>(
    rng: &mut R,
    ambient: usize,
    dim: usize,
) -> ComplexMatrix {
    orthonormalize(&random_complex(rng, ambient, dim))
}

pub fn frobenius(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn max_abs(a: &ComplexMatrix) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |A^H A - I|`, the orthonormality defect of the columns of `a`.
pub fn orthonormality_defect(a: &ComplexMatrix) -> f64 {
    let g = a.adjoint() * a;
    max_abs(&(g - ComplexMatrix::identity(a.ncols(), a.ncols())))
}

/// `B B^H` for a basis matrix `B`.
pub fn projector(b: &ComplexMatrix) -> ComplexMatrix {
    b * b.adjoint()
}

/// Eigen-decomposition of a Hermitian matrix with eigenpairs sorted by
/// descending eigenvalue. Returns `(values, vectors)`.
pub fn hermitian_eigen_desc(h: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..h.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors =
        ComplexMatrix::from_fn(h.nrows(), h.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Copies row `i` of `m` into a contiguous vector.
pub fn row_vec(m: &ComplexMatrix, i: usize) -> Vec<C64> {
    m.row(i).iter().copied().collect()
}

/// Stacks equally long row vectors into a matrix.
pub fn rows_to_matrix(rows: &[Vec<C64>]) -> Option<ComplexMatrix> {
    let n = rows.len();
    let width = rows.first()?.len();
    if rows.iter().any(|r| r.len() != width) {
        return None;
    }
    Some(ComplexMatrix::from_fn(n, width, |i, j| rows[i][j]))
}
