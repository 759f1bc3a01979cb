//! Subspaces on the Grassmannian `G(L', d)`: PCA extraction, orthonormal
//! complements, principal angles and the geodesic flow between two subspaces.
//!
//! The flow from `S_r` (`q = 0`) to `S_s` (`q = 1`) is
//!
//! ```text
//! Phi(q) = S_r U1 cos(q Phi) - R_r U2 sin(q Phi)
//! ```
//!
//! where `S_r^H S_s = U1 cos(Phi) V^H` and `R_r^H S_s = -U2 sin(Phi) V^H`
//! share the same `V`. Both end points hold as subspaces: `Phi(0) = S_r U1`
//! and `Phi(1) = S_s V`.

use std::f64::consts::FRAC_PI_2;

use log::warn;
use nalgebra::SVD;

use crate::error::{invalid, mismatch, Result};
use crate::linalg::{
    hermitian_eigen_desc, max_abs, orthonormality_defect, ComplexMatrix, C64, ZERO,
};

/// Basis vectors whose norm falls below this after orthogonalisation are
/// treated as numerically absent.
const NEGLIGIBLE: f64 = 1e-12;
const ORTHONORMAL_TOL: f64 = 1e-10;

/// `L' x d` matrix with orthonormal columns.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis(ComplexMatrix);

impl SubspaceBasis {
    /// Wraps `b` after checking `B^H B = I` within 1e-10.
    pub fn new(b: ComplexMatrix) -> Result<Self> {
        if b.ncols() == 0 || b.nrows() < b.ncols() {
            return Err(invalid(format!("basis shape {:?} is not tall", b.shape())));
        }
        let defect = orthonormality_defect(&b);
        if defect > ORTHONORMAL_TOL {
            return Err(invalid(format!(
                "basis columns not orthonormal (defect {defect:.2e})"
            )));
        }
        Ok(Self(b))
    }

    pub fn ambient(&self) -> usize {
        self.0.nrows()
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    /// Orthogonal projector `B B^H`.
    pub fn projector(&self) -> ComplexMatrix {
        &self.0 * self.0.adjoint()
    }

    /// Same subspace, different basis: `B Q` for unitary `Q`.
    pub fn rotated(&self, q: &ComplexMatrix) -> Result<Self> {
        Self::new(&self.0 * q)
    }
}

/// `L' x (L' - d)` orthonormal basis of the orthogonal complement.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoComplement(ComplexMatrix);

impl OrthoComplement {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.ncols()
    }
}

/// Principal angles in ascending order, each in `[0, pi/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalAngles(Vec<f64>);

impl PrincipalAngles {
    pub fn new(angles: Vec<f64>) -> Result<Self> {
        if angles.iter().any(|a| !(0.0..=FRAC_PI_2).contains(a)) {
            return Err(invalid("principal angles must lie in [0, pi/2]"));
        }
        if angles.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid("principal angles must be sorted ascending"));
        }
        Ok(Self(angles))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> f64 {
        self.0.last().copied().unwrap_or(0.0)
    }
}

/// PCA output: the leading subspace plus the full covariance spectrum.
#[derive(Debug, Clone)]
pub struct PrincipalComponents {
    pub basis: SubspaceBasis,
    /// All covariance eigenvalues, descending.
    pub spectrum: Vec<f64>,
    /// Eigenvalue `d` ties eigenvalue `d + 1`, so the subspace is not unique.
    pub degenerate: bool,
}

/// Top-`d` principal subspace of the mean-centred rows of `rows` (`n x L'`).
pub fn pca(rows: &ComplexMatrix, d: usize) -> Result<PrincipalComponents> {
    let (n, width) = rows.shape();
    if d == 0 || d > width {
        return Err(invalid(format!(
            "subspace dimension {d} outside 1..={width}"
        )));
    }
    if n < d {
        return Err(invalid(format!("need at least {d} rows, got {n}")));
    }
    let mean = rows.row_mean();
    let mut centred = rows.clone();
    for mut r in centred.row_iter_mut() {
        r -= &mean;
    }
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
    let mut cov = centred.adjoint() * &centred / C64::new(denom, 0.0);
    // Exact Hermitian symmetry for the eigen solver.
    cov = (&cov + cov.adjoint()) * C64::new(0.5, 0.0);
    let (spectrum, vectors) = hermitian_eigen_desc(&cov);
    let degenerate = d < width && {
        let scale = spectrum[0].abs().max(1.0);
        (spectrum[d - 1] - spectrum[d]).abs() <= 1e-12 * scale
    };
    if degenerate {
        warn!(
            "covariance eigenvalues {} and {} tie ({:e}); principal subspace is not unique",
            d,
            d + 1,
            spectrum[d - 1]
        );
    }
    let basis = SubspaceBasis::new(vectors.columns(0, d).into_owned())?;
    Ok(PrincipalComponents {
        basis,
        spectrum,
        degenerate,
    })
}

/// Convenience wrapper around [`pca`] that keeps only the basis.
pub fn pca_subspace(rows: &ComplexMatrix, d: usize) -> Result<SubspaceBasis> {
    Ok(pca(rows, d)?.basis)
}

/// Orthonormal complement via Householder QR of `[S | I]`.
pub fn complement(s: &SubspaceBasis) -> Result<OrthoComplement> {
    let (l, d) = (s.ambient(), s.dim());
    if d >= l {
        return Err(invalid("full-dimensional subspace has an empty complement"));
    }
    let mut stacked = ComplexMatrix::zeros(l, d + l);
    stacked.columns_mut(0, d).copy_from(s.matrix());
    stacked.columns_mut(d, l).fill_with_identity();
    let q = stacked.qr().q();
    Ok(OrthoComplement(q.columns(d, l - d).into_owned()))
}

/// Principal angles together with the singular-vector factors of
/// `S_r^H S_s = U1 diag(cos phi) V^H`, columns ordered by ascending angle.
#[derive(Debug, Clone)]
pub struct AngleDecomposition {
    pub angles: PrincipalAngles,
    pub u1: ComplexMatrix,
    pub v: ComplexMatrix,
    /// Clamped singular values `cos phi_j`.
    pub cosines: Vec<f64>,
}

pub fn principal_angles(sr: &SubspaceBasis, ss: &SubspaceBasis) -> Result<AngleDecomposition> {
    if sr.ambient() != ss.ambient() || sr.dim() != ss.dim() {
        return Err(mismatch(format!(
            "subspaces {}x{} and {}x{} differ",
            sr.ambient(),
            sr.dim(),
            ss.ambient(),
            ss.dim()
        )));
    }
    let m = sr.matrix().adjoint() * ss.matrix();
    let svd = SVD::new(m.clone(), true, true);
    let d = sr.dim();
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^H").adjoint();
    // SVD::new sorts singular values descending, i.e. angles ascending.
    let cosines: Vec<f64> = svd
        .singular_values
        .iter()
        .map(|s| s.clamp(0.0, 1.0))
        .collect();
    // acos loses half the digits near 0; the residual norm keeps them.
    let sv = ss.matrix() * &v;
    let residual = &sv - sr.matrix() * (&m * &v);
    let mut angles: Vec<f64> = (0..d)
        .map(|j| residual.column(j).norm().atan2(cosines[j]))
        .collect();
    for j in 1..d {
        if angles[j] < angles[j - 1] {
            angles[j] = angles[j - 1];
        }
    }
    Ok(AngleDecomposition {
        angles: PrincipalAngles::new(angles)?,
        u1: u,
        v,
        cosines,
    })
}

/// Precomputed factors of the geodesic flow from `S_r` to `S_s`.
#[derive(Debug, Clone)]
pub struct GeodesicPath {
    pub sr: SubspaceBasis,
    pub rr: OrthoComplement,
    pub u1: ComplexMatrix,
    pub u2: ComplexMatrix,
    pub v: ComplexMatrix,
    pub angles: PrincipalAngles,
}

impl GeodesicPath {
    pub fn ambient(&self) -> usize {
        self.sr.ambient()
    }

    pub fn dim(&self) -> usize {
        self.sr.dim()
    }

    /// `S_r U1`, the first half of the kernel's outer factor.
    pub fn source_frame(&self) -> ComplexMatrix {
        self.sr.matrix() * &self.u1
    }

    /// `R_r U2`, the second half of the kernel's outer factor.
    pub fn complement_frame(&self) -> ComplexMatrix {
        self.rr.matrix() * &self.u2
    }
}

/// Builds the geodesic with a single shared `V`.
///
/// `U2` comes from `B = -R_r^H S_s V`, whose columns are mutually orthogonal
/// with norms `sin phi_j`. Angles are refined as `atan2(|B_j|, cos phi_j)` so
/// that small angles keep full relative precision. Columns of `B` that vanish
/// (`phi_j` numerically zero) are replaced by any unit vector orthogonal to the
/// rest of `U2`; they are multiplied by `sin(q phi_j) = 0` anyway.
pub fn geodesic(sr: &SubspaceBasis, ss: &SubspaceBasis) -> Result<GeodesicPath> {
    let dec = principal_angles(sr, ss)?;
    let rr = complement(sr)?;
    let d = sr.dim();
    let b = -(rr.matrix().adjoint() * ss.matrix() * &dec.v);
    let sines: Vec<f64> = (0..d).map(|j| b.column(j).norm()).collect();

    let mut angles: Vec<f64> = (0..d).map(|j| sines[j].atan2(dec.cosines[j])).collect();
    for j in 1..d {
        if angles[j] < angles[j - 1] {
            angles[j] = angles[j - 1];
        }
    }
    let angles: Vec<f64> = angles
        .into_iter()
        .map(|a| a.clamp(0.0, FRAC_PI_2))
        .collect();

    let rows = rr.dim();
    let mut u2 = ComplexMatrix::zeros(rows, d);
    let mut filled = vec![false; d];
    // Largest sines first: the best-conditioned directions anchor the rest.
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &c| sines[c].total_cmp(&sines[a]));
    for &j in &order {
        if sines[j] <= NEGLIGIBLE {
            continue;
        }
        let mut col = b.column(j).into_owned();
        for &k in order.iter().filter(|&&k| filled[k]) {
            let proj = u2.column(k).dotc(&col);
            col -= u2.column(k) * proj;
        }
        let norm = col.norm();
        if norm <= NEGLIGIBLE {
            continue;
        }
        u2.set_column(j, &(col / C64::new(norm, 0.0)));
        filled[j] = true;
    }
    for j in 0..d {
        if !filled[j] {
            let col = completion_vector(&u2, &filled)
                .ok_or_else(|| invalid("complement too small to complete U2"))?;
            u2.set_column(j, &col);
            filled[j] = true;
        }
    }

    Ok(GeodesicPath {
        sr: sr.clone(),
        rr,
        u1: dec.u1,
        u2,
        v: dec.v,
        angles: PrincipalAngles::new(angles)?,
    })
}

/// Canonical basis vector with the largest residual after projecting out the
/// filled columns of `u`, normalised.
fn completion_vector(u: &ComplexMatrix, filled: &[bool]) -> Option<nalgebra::DVector<C64>> {
    let mut best: Option<(f64, nalgebra::DVector<C64>)> = None;
    for e in 0..u.nrows() {
        let mut v = nalgebra::DVector::from_element(u.nrows(), ZERO);
        v[e] = C64::new(1.0, 0.0);
        for (k, _) in filled.iter().enumerate().filter(|(_, f)| **f) {
            let proj = u.column(k).dotc(&v);
            v -= u.column(k) * proj;
        }
        let n = v.norm();
        if best.as_ref().is_none_or(|(bn, _)| n > *bn) {
            best = Some((n, v));
        }
    }
    let (n, v) = best?;
    (n > NEGLIGIBLE).then(|| v / C64::new(n, 0.0))
}

/// Point `Phi(q)` on the geodesic, an `L' x d` matrix with orthonormal columns.
pub fn flow_point(path: &GeodesicPath, q: f64) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&q) {
        return Err(invalid(format!("flow parameter {q} outside [0, 1]")));
    }
    let d = path.dim();
    let mut gamma = ComplexMatrix::zeros(d, d);
    let mut sigma = ComplexMatrix::zeros(d, d);
    for (j, phi) in path.angles.as_slice().iter().enumerate() {
        gamma[(j, j)] = C64::new((q * phi).cos(), 0.0);
        sigma[(j, j)] = C64::new((q * phi).sin(), 0.0);
    }
    Ok(path.source_frame() * gamma - path.complement_frame() * sigma)
}

/// Residuals of the two factorisation identities: `(|S_r^H S_s - U1 G V^H|,
/// |R_r^H S_s + U2 S V^H|)` in max-abs norm.
pub fn factorization_residuals(path: &GeodesicPath, ss: &SubspaceBasis) -> (f64, f64) {
    let d = path.dim();
    let mut g = ComplexMatrix::zeros(d, d);
    let mut s = ComplexMatrix::zeros(d, d);
    for (j, phi) in path.angles.as_slice().iter().enumerate() {
        g[(j, j)] = C64::new(phi.cos(), 0.0);
        s[(j, j)] = C64::new(phi.sin(), 0.0);
    }
    let vh = path.v.adjoint();
    let first = path.sr.matrix().adjoint() * ss.matrix() - &path.u1 * g * &vh;
    let second = path.rr.matrix().adjoint() * ss.matrix() + &path.u2 * s * &vh;
    (max_abs(&first), max_abs(&second))
}
