//! Dense complex linear algebra: Haar-random unitaries, Hermitian
//! eigendecomposition, and low-rank determinant-ratio updates for
//! mode-removal submatrices.
//!
//! The removal update is the kernel that makes moment computation
//! polynomial. For a complex symmetric `B` with spectral norm < 1 and a
//! unit-circle point `w`, deleting a row/column set `T` satisfies
//!
//! ```text
//! det(I - w B̄†B̄) / det(I - w B†B) = det C_T,
//! ```
//!
//! where `C_T` is the 2|T|×2|T| compression of the inverse of the block
//! matrix `[[I, √w B†], [√w B, I]]` onto the removed indices (Jacobi's
//! complementary-minor identity). All blocks of that inverse are bilinear
//! forms of the resolvent `G = (I - w B†B)⁻¹`, so after an `O(n³)` setup
//! per grid point every removal costs only an 8×8 determinant.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = DMatrix<Complex64>;

const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Standard-normal stream with a frozen byte-to-float mapping.
///
/// The generator is Xoshiro256++ seeded from the 64-bit seed through
/// SplitMix64 (`SeedableRng::seed_from_u64`). Normals are produced in
/// pairs by the Box–Muller transform
///
/// ```text
/// z0 = sqrt(-2 ln u1) · cos(2π u2),   z1 = sqrt(-2 ln u1) · sin(2π u2)
/// ```
///
/// from two consecutive `next_u64` outputs `x, y` mapped to
/// `u1 = ((x >> 11) + 1) · 2⁻⁵³ ∈ (0, 1]` and
/// `u2 = (y >> 11) · 2⁻⁵³ ∈ [0, 1)`. `z0` is returned first.
struct NormalSource {
    rng: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl NormalSource {
    fn new(seed: u64) -> Self {
        Self {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            spare: None,
        }
    }

    fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let x = self.rng.next_u64();
        let y = self.rng.next_u64();
        let u1 = ((x >> 11) + 1) as f64 * 2f64.powi(-53);
        let u2 = (y >> 11) as f64 * 2f64.powi(-53);
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (std::f64::consts::TAU * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

/// Haar-distributed `m × m` random unitary.
///
/// QR decomposition of an i.i.d. complex standard-Gaussian matrix with the
/// Q columns multiplied by the phases of R's diagonal, which makes the
/// distribution exactly Haar. Entries of the Gaussian matrix are drawn
/// row-major, real part before imaginary part, from the stream documented
/// on [`NormalSource`]; identical seeds give bitwise-identical matrices.
pub fn haar_unitary(m: usize, seed: u64) -> Result<CMatrix> {
    if m == 0 {
        return Err(Error::Dimension(
            "interferometer needs at least one mode".into(),
        ));
    }
    let mut src = NormalSource::new(seed);
    let mut data = Vec::with_capacity(m * m);
    for _ in 0..m * m {
        let re = src.next_normal();
        let im = src.next_normal();
        data.push(Complex64::new(re, im));
    }
    let a = CMatrix::from_row_iterator(m, m, data);
    let qr = a.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { ONE };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    Ok(q)
}

/// Max-entry deviation from unitarity, `‖U†U − I‖_max`.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let m = u.adjoint() * u;
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let expect = if i == j { ONE } else { Complex64::new(0.0, 0.0) };
            dev = dev.max((m[(i, j)] - expect).norm());
        }
    }
    dev
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
pub struct HermEigen {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermEigen {
    /// `V Λ V†`, for reconstruction checks.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.eigenvalues.len();
        let mut lam = CMatrix::zeros(n, n);
        for (i, &v) in self.eigenvalues.iter().enumerate() {
            lam[(i, i)] = Complex64::new(v, 0.0);
        }
        &self.eigenvectors * lam * self.eigenvectors.adjoint()
    }

    /// Relative Frobenius reconstruction error against the original matrix.
    pub fn reconstruction_error(&self, h: &CMatrix) -> f64 {
        let diff = self.reconstruct() - h;
        let hn = h.norm();
        if hn == 0.0 {
            diff.norm()
        } else {
            diff.norm() / hn
        }
    }
}

fn hermiticity_deviation(h: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..h.nrows() {
        for j in i..h.ncols() {
            dev = dev.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigendecomposition of a Hermitian matrix (tolerance 1e-12 on the
/// Hermiticity defect, scaled by the largest entry). Eigenvalues ascending,
/// eigenvector columns aligned with them.
pub fn herm_eigen(h: &CMatrix) -> Result<HermEigen> {
    if h.nrows() != h.ncols() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let n = h.nrows();
    if n == 0 {
        return Ok(HermEigen {
            eigenvalues: Vec::new(),
            eigenvectors: CMatrix::zeros(0, 0),
        });
    }
    let scale = h.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
    let dev = hermiticity_deviation(h);
    let tolerance = 1e-12 * scale.max(1.0);
    if dev > tolerance {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance,
        });
    }
    // symmetrize before factoring so the defect cannot leak into the result
    let hs = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let se = hs.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.column_mut(dst).copy_from(&se.eigenvectors.column(src));
    }
    Ok(HermEigen {
        eigenvalues,
        eigenvectors,
    })
}

/// Ascending real eigenvalues of a Hermitian matrix.
pub fn herm_eigvals(h: &CMatrix) -> Result<Vec<f64>> {
    Ok(herm_eigen(h)?.eigenvalues)
}

/// Ascending eigenvalues of the Gram matrix `B†B`.
///
/// Eigenvalues in `[-1e-12, 0)` are rounding residue of a PSD matrix and
/// clamp to zero; anything more negative signals a broken input and is an
/// error.
pub fn gram_eigvals(b: &CMatrix) -> Result<Vec<f64>> {
    if b.nrows() == 0 {
        return Ok(Vec::new());
    }
    let gram = b.adjoint() * b;
    let mut vals = herm_eigvals(&gram)?;
    for v in &mut vals {
        if *v < -1e-12 {
            return Err(Error::NegativeGram { value: *v });
        }
        if *v < 0.0 {
            *v = 0.0;
        }
    }
    Ok(vals)
}

/// `∏ᵢ (1 − w λᵢ)^(−1/2)` with the principal branch taken factor by
/// factor. Each factor has positive real part whenever `0 ≤ λᵢ < 1` and
/// `|w| = 1`, so the product is branch-unambiguous.
pub fn char_from_eigs(eigs: &[f64], w: Complex64) -> Complex64 {
    let mut lnsum = Complex64::new(0.0, 0.0);
    for &l in eigs {
        lnsum += (ONE - w * l).ln();
    }
    (-0.5 * lnsum).exp()
}

/// `∏ᵢ (1 − w λᵢ)`.
pub fn det_from_eigs(eigs: &[f64], w: Complex64) -> Complex64 {
    let mut det = ONE;
    for &l in eigs {
        det *= ONE - w * l;
    }
    det
}

/// Spectral factorization of `B†B` shared by every grid point of a
/// removal-resolvent sweep: `B†B = V Λ V†` plus the product `W = B V`.
pub struct GramFactors {
    v: CMatrix,
    w: CMatrix,
    lambda: Vec<f64>,
    n: usize,
}

impl GramFactors {
    pub fn new(b: &CMatrix) -> Result<Self> {
        if b.nrows() != b.ncols() {
            return Err(Error::Dimension(format!(
                "kernel must be square, got {}x{}",
                b.nrows(),
                b.ncols()
            )));
        }
        let n = b.nrows();
        if n == 0 {
            return Ok(Self {
                v: CMatrix::zeros(0, 0),
                w: CMatrix::zeros(0, 0),
                lambda: Vec::new(),
                n,
            });
        }
        let gram = b.adjoint() * b;
        let eig = herm_eigen(&gram)?;
        let mut lambda = eig.eigenvalues;
        for v in &mut lambda {
            if *v < -1e-12 {
                return Err(Error::NegativeGram { value: *v });
            }
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        let w = b * &eig.eigenvectors;
        Ok(Self {
            v: eig.eigenvectors,
            w,
            lambda,
            n,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda.last().copied().unwrap_or(0.0)
    }

    pub fn char_at(&self, w: Complex64) -> Complex64 {
        char_from_eigs(&self.lambda, w)
    }

    pub fn det_at(&self, w: Complex64) -> Complex64 {
        det_from_eigs(&self.lambda, w)
    }
}

/// Per-grid-point resolvent cache supporting `O(1)`-in-`n` removal
/// determinant ratios for subsets of up to four modes.
pub struct RemovalResolvent {
    n: usize,
    w: Complex64,
    g: Vec<Complex64>,
    g_bdag: Vec<Complex64>,
    b_g: Vec<Complex64>,
    gbar: Vec<Complex64>,
    det_base: Complex64,
    char_base: Complex64,
}

fn flatten_row_major(m: &CMatrix) -> Vec<Complex64> {
    let (r, c) = (m.nrows(), m.ncols());
    let mut out = Vec::with_capacity(r * c);
    for i in 0..r {
        for j in 0..c {
            out.push(m[(i, j)]);
        }
    }
    out
}

impl RemovalResolvent {
    /// Build the cache for one unit-circle point `w`. Costs four `n³`
    /// products; everything afterwards is immutable and shareable.
    pub fn new(f: &GramFactors, w: Complex64) -> Self {
        let n = f.n;
        if n == 0 {
            return Self {
                n,
                w,
                g: Vec::new(),
                g_bdag: Vec::new(),
                b_g: Vec::new(),
                gbar: Vec::new(),
                det_base: ONE,
                char_base: ONE,
            };
        }
        let mut vd = f.v.clone();
        let mut wd = f.w.clone();
        for j in 0..n {
            let d = ONE / (ONE - w * f.lambda[j]);
            let mut cv = vd.column_mut(j);
            cv *= d;
            let mut cw = wd.column_mut(j);
            cw *= d;
        }
        let vh = f.v.adjoint();
        let wh = f.w.adjoint();
        let g = &vd * &vh;
        let g_bdag = &vd * &wh;
        let b_g = &wd * &vh;
        let mut gbar = &wd * &wh;
        gbar *= w;
        for i in 0..n {
            gbar[(i, i)] += ONE;
        }
        Self {
            n,
            w,
            g: flatten_row_major(&g),
            g_bdag: flatten_row_major(&g_bdag),
            b_g: flatten_row_major(&b_g),
            gbar: flatten_row_major(&gbar),
            det_base: f.det_at(w),
            char_base: f.char_at(w),
        }
    }

    pub fn grid_point(&self) -> Complex64 {
        self.w
    }

    /// `det(I − w B†B)` of the undeleted matrix.
    pub fn det_base(&self) -> Complex64 {
        self.det_base
    }

    /// `det(I − w B†B)^(−1/2)`, principal branch per eigenvalue factor.
    pub fn char_base(&self) -> Complex64 {
        self.char_base
    }

    /// `det(I − w B̄†B̄) / det(I − w B†B)` where `B̄` deletes the rows and
    /// columns in `t`. Empty `t` returns exactly 1; more than four indices
    /// is outside the supported moment order.
    pub fn det_ratio(&self, t: &[usize]) -> Result<Complex64> {
        let s = t.len();
        if s == 0 {
            return Ok(ONE);
        }
        if s > 4 {
            return Err(Error::SubsetTooLarge(s));
        }
        for (pos, &i) in t.iter().enumerate() {
            if i >= self.n {
                return Err(Error::Dimension(format!(
                    "removal index {i} out of range for dimension {}",
                    self.n
                )));
            }
            for &j in &t[pos + 1..] {
                if i == j {
                    return Err(Error::Dimension(format!("duplicate removal index {i}")));
                }
            }
        }
        let d = 2 * s;
        let mut cap = [Complex64::new(0.0, 0.0); 64];
        let n = self.n;
        for (a, &i) in t.iter().enumerate() {
            for (b, &j) in t.iter().enumerate() {
                let e = i * n + j;
                cap[a * d + b] = self.g[e];
                cap[a * d + s + b] = -self.w * self.g_bdag[e];
                cap[(s + a) * d + b] = -self.b_g[e];
                cap[(s + a) * d + s + b] = self.gbar[e];
            }
        }
        Ok(det_in_place(&mut cap[..d * d], d))
    }
}

/// Determinant of a small dense complex matrix stored row-major in `buf`,
/// by in-place partially pivoted LU. Intended for dimensions ≤ 8.
pub fn det_in_place(buf: &mut [Complex64], d: usize) -> Complex64 {
    debug_assert_eq!(buf.len(), d * d);
    let mut det = ONE;
    for k in 0..d {
        let mut piv_row = k;
        let mut piv_mag = buf[k * d + k].norm_sqr();
        for r in k + 1..d {
            let m = buf[r * d + k].norm_sqr();
            if m > piv_mag {
                piv_mag = m;
                piv_row = r;
            }
        }
        if piv_mag == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if piv_row != k {
            for c in k..d {
                buf.swap(k * d + c, piv_row * d + c);
            }
            det = -det;
        }
        let piv = buf[k * d + k];
        det *= piv;
        for r in k + 1..d {
            let f = buf[r * d + k] / piv;
            buf[r * d + k] = f;
            for c in k + 1..d {
                let sub = f * buf[k * d + c];
                buf[r * d + c] -= sub;
            }
        }
    }
    det
}

/// Determinant of a dense complex matrix (0×0 gives 1). Test/oracle path.
pub fn det_dense(m: &CMatrix) -> Complex64 {
    if m.nrows() == 0 {
        return ONE;
    }
    m.clone().lu().determinant()
}

/// In-place Cholesky log-determinant of a Hermitian positive definite
/// matrix stored row-major in `a` (lower triangle consumed). Returns
/// `None` when a pivot is non-positive, i.e. the matrix is not PD.
pub fn herm_cholesky_logdet(a: &mut [Complex64], n: usize) -> Option<f64> {
    debug_assert_eq!(a.len(), n * n);
    let mut logdet = 0.0;
    for k in 0..n {
        let mut diag = a[k * n + k].re;
        for j in 0..k {
            diag -= a[k * n + j].norm_sqr();
        }
        if diag <= 0.0 {
            return None;
        }
        let l = diag.sqrt();
        logdet += 2.0 * l.ln();
        a[k * n + k] = Complex64::new(l, 0.0);
        for i in k + 1..n {
            let mut v = a[i * n + k];
            for j in 0..k {
                v -= a[i * n + j] * a[k * n + j].conj();
            }
            a[i * n + k] = v / l;
        }
    }
    Some(logdet)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_symmetric(n: usize, sigma_max: f64, seed: u64) -> CMatrix {
        // Takagi-style construction: B = U diag(σ) Uᵀ is complex symmetric
        // with singular values σ.
        let u = haar_unitary(n, seed).unwrap();
        let mut d = CMatrix::zeros(n, n);
        let mut src = NormalSource::new(seed ^ 0x9e37_79b9_7f4a_7c15);
        for i in 0..n {
            // uniform-ish in (0, sigma_max) from a folded normal
            let x = (src.next_normal().abs() / 3.0).min(0.999);
            d[(i, i)] = Complex64::new(sigma_max * x, 0.0);
        }
        &u * d * u.transpose()
    }

    #[test]
    fn haar_rejects_zero_modes() {
        assert!(haar_unitary(0, 1).is_err());
    }

    #[test]
    fn haar_single_mode_is_unimodular() {
        for seed in [0u64, 1, 42, u64::MAX] {
            let u = haar_unitary(1, seed).unwrap();
            assert!((u[(0, 0)].norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn haar_is_deterministic() {
        let a = haar_unitary(8, 42).unwrap();
        let b = haar_unitary(8, 42).unwrap();
        assert_eq!(a.as_slice(), b.as_slice());
        let c = haar_unitary(8, 43).unwrap();
        assert_ne!(a.as_slice(), c.as_slice());
    }

    #[test]
    fn haar_is_unitary() {
        for (m, seed) in [(2usize, 7u64), (8, 42), (30, 9)] {
            let u = haar_unitary(m, seed).unwrap();
            assert!(
                unitarity_deviation(&u) < 1e-12,
                "m={m} deviation {}",
                unitarity_deviation(&u)
            );
        }
    }

    #[test]
    fn herm_eigvals_identity_and_diag() {
        let id = CMatrix::identity(3, 3);
        let v = herm_eigvals(&id).unwrap();
        for x in v {
            assert!((x - 1.0).abs() < 1e-13);
        }
        let mut d = CMatrix::zeros(2, 2);
        d[(0, 0)] = Complex64::new(0.7, 0.0);
        d[(1, 1)] = Complex64::new(0.3, 0.0);
        let v = herm_eigvals(&d).unwrap();
        assert!((v[0] - 0.3).abs() < 1e-14);
        assert!((v[1] - 0.7).abs() < 1e-14);
    }

    #[test]
    fn herm_eigvals_single_mode_gram() {
        let t = 1.0f64.tanh();
        let b = CMatrix::from_row_slice(1, 1, &[Complex64::new(t, 0.0)]);
        let v = gram_eigvals(&b).unwrap();
        assert!((v[0] - t * t).abs() < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut h = CMatrix::identity(2, 2);
        h[(0, 1)] = Complex64::new(0.5, 0.0);
        assert!(matches!(
            herm_eigvals(&h),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigen_reconstructs() {
        let a = random_symmetric(9, 0.9, 11);
        let h = a.adjoint() * &a;
        let eig = herm_eigen(&h).unwrap();
        assert!(eig.reconstruction_error(&h) < 1e-10);
    }

    #[test]
    fn empty_matrix_conventions() {
        let b = CMatrix::zeros(0, 0);
        assert_eq!(det_dense(&b), ONE);
        let f = GramFactors::new(&b).unwrap();
        let rr = RemovalResolvent::new(&f, ONE);
        assert_eq!(rr.det_base(), ONE);
        assert_eq!(rr.det_ratio(&[]).unwrap(), ONE);
    }

    #[test]
    fn det_ratio_empty_subset_is_one() {
        let b = random_symmetric(5, 0.8, 3);
        let f = GramFactors::new(&b).unwrap();
        let rr = RemovalResolvent::new(&f, Complex64::from_polar(1.0, 0.9));
        assert_eq!(rr.det_ratio(&[]).unwrap(), ONE);
    }

    #[test]
    fn det_ratio_single_mode() {
        let t = 1.0f64.tanh();
        let b = CMatrix::from_row_slice(1, 1, &[Complex64::new(t, 0.0)]);
        let f = GramFactors::new(&b).unwrap();
        let rr = RemovalResolvent::new(&f, ONE);
        let ratio = rr.det_ratio(&[0]).unwrap();
        let expect = 1.0 / (1.0 - t * t);
        assert!((ratio.re - expect).abs() < 1e-12 * expect);
        assert!(ratio.im.abs() < 1e-14);
        // removing every mode leaves the 0×0 matrix: ratio = 1/det(I − wB†B)
        assert!((expect - 2.381_098_2).abs() < 1e-6);
    }

    fn direct_ratio(b: &CMatrix, w: Complex64, t: &[usize]) -> Complex64 {
        let n = b.nrows();
        let keep: Vec<usize> = (0..n).filter(|i| !t.contains(i)).collect();
        let k = keep.len();
        let mut sub = CMatrix::zeros(k, k);
        for (a, &i) in keep.iter().enumerate() {
            for (c, &j) in keep.iter().enumerate() {
                sub[(a, c)] = b[(i, j)];
            }
        }
        let num_m = CMatrix::identity(k, k) - (sub.adjoint() * &sub) * w;
        let den_m = CMatrix::identity(n, n) - (b.adjoint() * b) * w;
        det_dense(&num_m) / det_dense(&den_m)
    }

    #[test]
    fn det_ratio_matches_direct_determinants() {
        let b = random_symmetric(6, 0.9, 17);
        let f = GramFactors::new(&b).unwrap();
        for (theta, t) in [
            (0.0, vec![2usize, 4]),
            (1.3, vec![0usize]),
            (2.9, vec![1usize, 2, 5]),
            (4.2, vec![0usize, 1, 3, 5]),
            (5.8, vec![3usize, 4]),
        ] {
            let w = Complex64::from_polar(1.0, theta);
            let rr = RemovalResolvent::new(&f, w);
            let fast = rr.det_ratio(&t).unwrap();
            let direct = direct_ratio(&b, w, &t);
            assert!(
                (fast - direct).norm() <= 1e-10 * direct.norm(),
                "theta={theta} t={t:?} fast={fast} direct={direct}"
            );
        }
    }

    #[test]
    fn det_ratio_removing_all_modes() {
        for n in 1..=4usize {
            let b = random_symmetric(n, 0.85, 23 + n as u64);
            let f = GramFactors::new(&b).unwrap();
            let w = Complex64::from_polar(1.0, 2.2);
            let rr = RemovalResolvent::new(&f, w);
            let all: Vec<usize> = (0..n).collect();
            let fast = rr.det_ratio(&all).unwrap();
            let expect = ONE / rr.det_base();
            assert!((fast - expect).norm() < 1e-10 * expect.norm());
        }
    }

    #[test]
    fn det_ratio_guards() {
        let b = random_symmetric(6, 0.8, 5);
        let f = GramFactors::new(&b).unwrap();
        let rr = RemovalResolvent::new(&f, ONE);
        assert!(matches!(
            rr.det_ratio(&[0, 1, 2, 3, 4]),
            Err(Error::SubsetTooLarge(5))
        ));
        assert!(rr.det_ratio(&[6]).is_err());
        assert!(rr.det_ratio(&[1, 1]).is_err());
    }

    #[test]
    fn small_det_matches_dense() {
        let m = random_symmetric(7, 0.9, 31);
        for d in 1..=7usize {
            let mut buf: Vec<Complex64> = Vec::with_capacity(d * d);
            for i in 0..d {
                for j in 0..d {
                    buf.push(m[(i, j)]);
                }
            }
            let sub = m.view((0, 0), (d, d)).into_owned();
            let expect = det_dense(&sub);
            let got = det_in_place(&mut buf, d);
            assert!((got - expect).norm() <= 1e-11 * expect.norm().max(1e-3));
        }
    }

    #[test]
    fn cholesky_logdet_matches_eigs() {
        let b = random_symmetric(8, 0.9, 47);
        let gram = b.adjoint() * &b;
        let n = 8;
        let mut buf: Vec<Complex64> = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let v = if i == j { ONE - gram[(i, j)] } else { -gram[(i, j)] };
                buf.push(v);
            }
        }
        let logdet = herm_cholesky_logdet(&mut buf, n).unwrap();
        let eigs = gram_eigvals(&b).unwrap();
        let expect: f64 = eigs.iter().map(|l| (1.0 - l).ln()).sum();
        assert!((logdet - expect).abs() < 1e-11);
    }

    #[test]
    fn char_at_theta_zero_is_real() {
        let b = random_symmetric(5, 0.9, 53);
        let f = GramFactors::new(&b).unwrap();
        let c = f.char_at(ONE);
        assert!(c.im.abs() < 1e-13 * c.re);
        assert!(c.re >= 1.0);
    }
}
