//! Closed-form geodesic flow kernel.
//!
//! `F = 2 * int_0^1 Phi(q) Phi(q)^H dq`, assembled as
//!
//! ```text
//! F = [S_r U1, R_r U2] [[Y1, Y2], [Y2, Y3]] [S_r U1, R_r U2]^H
//! ```
//!
//! with diagonal blocks `Y1 = diag(1 + sin(2 phi)/(2 phi))`,
//! `Y2 = diag((cos(2 phi) - 1)/(2 phi))` and `Y3 = diag(1 - sin(2 phi)/(2 phi))`.
//! The factor 2 relative to the plain integral is a global scale; kernel SVM
//! decisions do not depend on it once the box constraint is rescaled.

use crate::error::{mismatch, Result};
use crate::grassmann::{GeodesicPath, PrincipalAngles};
use crate::linalg::{ComplexMatrix, RealMatrix, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct SigmaDiagonals {
    pub sigma1: Vec<f64>,
    pub sigma2: Vec<f64>,
    pub sigma3: Vec<f64>,
}

/// `(x - sin x) / x`, accurate to full relative precision near zero.
fn one_minus_sinc(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.abs() >= 0.5 {
        return 1.0 - x.sin() / x;
    }
    // sum_{k>=1} (-1)^{k+1} x^{2k} / (2k+1)!
    let x2 = x * x;
    let mut term = x2 / 6.0;
    let mut sum = 0.0_f64;
    let mut k = 1.0;
    while term.abs() > 1e-18 * sum.abs() || sum == 0.0 {
        sum += term;
        term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
        k += 1.0;
        if k > 30.0 {
            break;
        }
    }
    sum
}

/// Diagonal entries of the three middle blocks for each principal angle.
///
/// Evaluated in cancellation-free forms: `sigma2 = -sin^2(phi) / phi` and
/// `sigma3 = (2 phi - sin 2 phi) / (2 phi)`; as `phi -> 0` these reduce to
/// `(2 - 2 phi^2 / 3, -phi, 2 phi^2 / 3)`.
pub fn sigma_entries(angles: &PrincipalAngles) -> SigmaDiagonals {
    let d = angles.len();
    let mut out = SigmaDiagonals {
        sigma1: Vec::with_capacity(d),
        sigma2: Vec::with_capacity(d),
        sigma3: Vec::with_capacity(d),
    };
    for &phi in angles.as_slice() {
        let s3 = one_minus_sinc(2.0 * phi);
        let s2 = if phi == 0.0 {
            0.0
        } else {
            -phi.sin().powi(2) / phi
        };
        out.sigma1.push(2.0 - s3);
        out.sigma2.push(s2);
        out.sigma3.push(s3);
    }
    out
}

/// Hermitian positive-semidefinite `L' x L'` kernel matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct GfkMatrix {
    f: ComplexMatrix,
}

impl GfkMatrix {
    /// Wraps an arbitrary Hermitian matrix; used for the identity-domain
    /// limit and for kernels supplied from elsewhere.
    pub fn from_matrix(f: ComplexMatrix) -> Result<Self> {
        if !f.is_square() {
            return Err(mismatch(format!(
                "kernel matrix {:?} is not square",
                f.shape()
            )));
        }
        Ok(Self { f })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.f
    }

    pub fn ambient(&self) -> usize {
        self.f.nrows()
    }

    /// `lambda * F`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            f: &self.f * C64::new(lambda, 0.0),
        }
    }
}

/// Assembles `F` from a geodesic path.
pub fn build_kernel(path: &GeodesicPath) -> GfkMatrix {
    let sig = sigma_entries(&path.angles);
    let d = path.dim();
    let l = path.ambient();
    let mut outer = ComplexMatrix::zeros(l, 2 * d);
    outer.columns_mut(0, d).copy_from(&path.source_frame());
    outer.columns_mut(d, d).copy_from(&path.complement_frame());
    // outer * middle, exploiting the diagonal blocks.
    let mut scaled = ComplexMatrix::zeros(l, 2 * d);
    for j in 0..d {
        let a = outer.column(j);
        let b = outer.column(d + j);
        scaled.set_column(
            j,
            &(a * C64::new(sig.sigma1[j], 0.0) + b * C64::new(sig.sigma2[j], 0.0)),
        );
        scaled.set_column(
            d + j,
            &(a * C64::new(sig.sigma2[j], 0.0) + b * C64::new(sig.sigma3[j], 0.0)),
        );
    }
    let f = scaled * outer.adjoint();
    let f = (&f + f.adjoint()) * C64::new(0.5, 0.0);
    GfkMatrix { f }
}

/// `Re(a F b^H)`, evaluated symmetrically so that swapping `a` and `b`
/// returns the bit-identical value.
pub fn kernel_eval(f: &GfkMatrix, a: &[C64], b: &[C64]) -> Result<f64> {
    let l = f.ambient();
    if a.len() != l || b.len() != l {
        return Err(mismatch(format!(
            "kernel expects length {l}, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let one_way = |x: &[C64], y: &[C64]| {
        let mut acc = C64::new(0.0, 0.0);
        for (i, xi) in x.iter().enumerate() {
            let row: C64 = y
                .iter()
                .enumerate()
                .map(|(j, yj)| f.f[(i, j)] * yj.conj())
                .sum();
            acc += xi * row;
        }
        acc.re
    };
    Ok(0.5 * (one_way(a, b) + one_way(b, a)))
}

/// Entry `(i, j)` is `Re(A_i F B_j^H)` for rows `A_i` of `a` and `B_j` of `b`.
pub fn gram_matrix(f: &GfkMatrix, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<RealMatrix> {
    let l = f.ambient();
    if a.ncols() != l || b.ncols() != l {
        return Err(mismatch(format!(
            "kernel expects rows of length {l}, got {} and {}",
            a.ncols(),
            b.ncols()
        )));
    }
    let projected = a * &f.f;
    let k = projected * b.adjoint();
    Ok(k.map(|z| z.re))
}

/// Gram matrix of a row set with itself; exactly symmetric.
pub fn gram_matrix_symmetric(f: &GfkMatrix, a: &ComplexMatrix) -> Result<RealMatrix> {
    let mut k = gram_matrix(f, a, a)?;
    let n = k.nrows();
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (k[(i, j)] + k[(j, i)]);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    Ok(k)
}
