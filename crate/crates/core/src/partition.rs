//! Partition function and photon-number sector spectra.
//!
//! The squared norm of the output state is `Z = det(I − B†B)^(−1/2)`.
//! Squeezed vacuum contains only even photon totals, so the spectrum is
//! indexed by the photon-pair count `l` (photon number `k = 2l`). With
//! `λᵢ` the eigenvalues of `B†B`, the pair-sector generating function is
//!
//! ```text
//! Z(θ) = ∏ᵢ (1 − e^{iθ} λᵢ)^(−1/2) = Σ_l g_l e^{ilθ},
//! ```
//!
//! evaluated factor-by-factor with the principal branch (each factor has
//! positive real part for `0 ≤ λᵢ < 1`, so no branch tracking is needed).
//! The unnormalized sector weights `g_l ≥ 0` come back by inverse DFT on
//! an adaptively refined grid: the grid is accepted once the retained
//! weights are stable to 1e-10 under doubling and carry all but `tail_eps`
//! of the total mass.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{char_from_eigs, gram_eigvals};
use crate::model::KernelMatrix;
use crate::util::{next_pow2, rel_close, KahanComplex, KahanSum};

/// Default Fourier-node cap for the adaptive grid search.
pub const DEFAULT_GRID_CAP: usize = 1 << 20;

/// Fourier grid shared across the submatrix spectra of one computation,
/// so sector indices align: `n_points` nodes `θ_j = 2πj/N`, sectors
/// retained for `l = 0..=l_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SharedGrid {
    pub n_points: usize,
    pub l_max: usize,
}

impl SharedGrid {
    pub fn theta(&self, j: usize) -> f64 {
        std::f64::consts::TAU * j as f64 / self.n_points as f64
    }

    pub fn point(&self, j: usize) -> Complex64 {
        Complex64::from_polar(1.0, self.theta(j))
    }

    /// Number of retained sectors (`l = 0..=l_max`).
    pub fn sectors(&self) -> usize {
        self.l_max + 1
    }

    /// Enlarge the grid so that branch tracking of removal determinants
    /// stays safe: the winding rate of `det(I − e^{iθ} B̄†B̄)/det(I −
    /// e^{iθ} B†B)` is bounded by `2n·λmax/(1−λmax)` per unit `θ`, so
    /// `N ≥ 8n·λmax/(1−λmax)` keeps every phase step below π/2. Grids may
    /// only grow here; retained weights are already stable under
    /// refinement.
    pub fn with_phase_floor(&self, n_sub: usize, lambda_max: f64) -> SharedGrid {
        let mut n = self.n_points.max(2 * (self.l_max + 1));
        if lambda_max > 0.0 && lambda_max < 1.0 {
            let floor = (8.0 * n_sub as f64 * lambda_max / (1.0 - lambda_max)).ceil() as usize;
            n = n.max(floor);
        }
        SharedGrid {
            n_points: next_pow2(n),
            l_max: self.l_max,
        }
    }
}

/// Unnormalized photon-pair-sector weights of a kernel on a Fourier grid.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    weights: Vec<f64>,
    tail_eps: f64,
    grid_size: usize,
    z: f64,
    truncated_mass: f64,
    max_imag_residue: f64,
    single_peaked: bool,
}

impl SectorSpectrum {
    /// Weight of pair sector `l` (photon number `2l`); zero beyond `l_max`.
    pub fn weight(&self, l: usize) -> f64 {
        self.weights.get(l).copied().unwrap_or(0.0)
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn l_max(&self) -> usize {
        self.weights.len() - 1
    }

    /// Photon number of pair sector `l`.
    pub fn photon_number(l: usize) -> usize {
        2 * l
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    pub fn tail_eps(&self) -> f64 {
        self.tail_eps
    }

    /// Partition function `Z` of the kernel.
    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn retained_mass(&self) -> f64 {
        let mut k = KahanSum::new();
        for &w in &self.weights {
            k.add(w);
        }
        k.value()
    }

    /// Mass beyond `l_max`, bounded by `tail_eps · Z`.
    pub fn truncated_mass(&self) -> f64 {
        self.truncated_mass
    }

    pub fn max_imag_residue(&self) -> f64 {
        self.max_imag_residue
    }

    /// Diagnostic: whether the retained weights rise to a single peak and
    /// fall afterwards.
    pub fn is_single_peaked(&self) -> bool {
        self.single_peaked
    }

    pub fn grid(&self) -> SharedGrid {
        SharedGrid {
            n_points: self.grid_size,
            l_max: self.l_max(),
        }
    }
}

/// Eigenvalues of `B†B` checked for physicality (spectral norm < 1).
pub(crate) fn physical_eigs(kernel: &KernelMatrix) -> Result<Vec<f64>> {
    let eigs = gram_eigvals(kernel.matrix())?;
    if let Some(&max) = eigs.last() {
        if max >= 1.0 {
            return Err(Error::NonPhysicalKernel { norm: max });
        }
    }
    Ok(eigs)
}

/// `Z` from Gram eigenvalues.
pub(crate) fn z_from_eigs(eigs: &[f64]) -> f64 {
    let mut lnsum = KahanSum::new();
    for &l in eigs {
        lnsum.add((1.0 - l).ln());
    }
    (-0.5 * lnsum.value()).exp()
}

/// Partition function `Z = det(I − B†B)^(−1/2) = ∏ᵢ (1 − λᵢ)^(−1/2)`.
/// The 0×0 kernel gives 1.
pub fn norm_z(kernel: &KernelMatrix) -> Result<f64> {
    Ok(z_from_eigs(&physical_eigs(kernel)?))
}

/// Sector characteristic function `Z(θ) = ∏ᵢ (1 − e^{iθ} λᵢ)^(−1/2)`;
/// `θ` is conjugate to the photon-pair count. `char_fn(·, 0) = Z`.
pub fn char_fn(kernel: &KernelMatrix, theta: f64) -> Result<Complex64> {
    let eigs = physical_eigs(kernel)?;
    Ok(char_from_eigs(&eigs, Complex64::from_polar(1.0, theta)))
}

/// Inverse DFT of characteristic samples for sectors `l ∈ [l_start,
/// l_end)`, fixed summation order with compensated accumulation.
fn idft_range(samples: &[Complex64], l_start: usize, l_end: usize) -> Vec<Complex64> {
    let n = samples.len();
    let inv = 1.0 / n as f64;
    let mut out = Vec::with_capacity(l_end - l_start);
    for l in l_start..l_end {
        let mut acc = KahanComplex::new();
        for (j, &c) in samples.iter().enumerate() {
            let angle = -std::f64::consts::TAU * (l as f64) * (j as f64) / n as f64;
            acc.add(c * Complex64::from_polar(1.0, angle));
        }
        out.push(acc.value() * inv);
    }
    out
}

fn char_samples(eigs: &[f64], n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|j| {
            let theta = std::f64::consts::TAU * j as f64 / n as f64;
            char_from_eigs(eigs, Complex64::from_polar(1.0, theta))
        })
        .collect()
}

fn single_peaked(weights: &[f64], tol: f64) -> bool {
    let mut peak = 0usize;
    for (i, &w) in weights.iter().enumerate() {
        if w > weights[peak] {
            peak = i;
        }
    }
    let rising_ok = weights[..peak]
        .iter()
        .zip(weights[1..=peak].iter())
        .all(|(a, b)| *b >= *a - tol);
    let falling_ok = weights[peak..]
        .iter()
        .zip(weights[peak + 1..].iter())
        .all(|(a, b)| *b <= *a + tol);
    rising_ok && falling_ok
}

/// Adaptive sector spectrum from Gram eigenvalues; see [`sector_spectrum`].
pub fn spectrum_from_eigs(
    eigs: &[f64],
    tail_eps: f64,
    l_min_required: usize,
    grid_cap: usize,
) -> Result<SectorSpectrum> {
    if !(tail_eps > 0.0 && tail_eps < 1.0) {
        return Err(Error::Dimension(format!(
            "tail_eps must be in (0,1), got {tail_eps}"
        )));
    }
    if let Some(&max) = eigs.last() {
        if max >= 1.0 {
            return Err(Error::NonPhysicalKernel { norm: max });
        }
    }
    let z = z_from_eigs(eigs);

    // first-guess grid from the pair-count statistics: each eigenvalue
    // contributes mean λ/(2(1−λ)) and variance λ/(2(1−λ)²) pairs
    let mut mean = 0.0;
    let mut var = 0.0;
    for &l in eigs {
        mean += l / (2.0 * (1.0 - l));
        var += l / (2.0 * (1.0 - l) * (1.0 - l));
    }
    let l_hint = (mean + 6.0 * var.sqrt()).ceil() as usize + 10;
    let mut n = next_pow2(
        32usize
            .max(2 * (l_min_required + 1))
            .max(2 * (l_hint + 1)),
    );

    let target = (1.0 - tail_eps) * z;
    let mut coarse: Option<(usize, Vec<Complex64>, usize)> = None; // (n, ghat, l_max)
    let mut worst_delta = f64::NAN;
    loop {
        if n > grid_cap {
            return Err(Error::GridConvergence {
                cap: grid_cap,
                worst: worst_delta,
            });
        }
        let samples = char_samples(eigs, n);
        // Absolute accuracy floor of the inverse DFT: compensated sums keep
        // the error near ε times the mean sample magnitude, so weights at or
        // below this scale cannot meet a purely relative stability bar.
        let mean_abs: f64 = samples.iter().map(|c| c.norm()).sum::<f64>() / n as f64;
        let fp_floor = 64.0 * f64::EPSILON * mean_abs;
        // scan the sector prefix in chunks until the mass target is met
        let l_probe_cap = n / 2; // keeps n ≥ 2(l_max+1)
        let mut ghat: Vec<Complex64> = Vec::new();
        let mut mass = KahanSum::new();
        let mut l_max: Option<usize> = None;
        'scan: while ghat.len() < l_probe_cap {
            let start = ghat.len();
            let end = (start + 64).min(l_probe_cap);
            ghat.extend(idft_range(&samples, start, end));
            for l in start..end {
                mass.add(ghat[l].re);
                if mass.value() >= target && l >= l_min_required {
                    l_max = Some(l);
                    break 'scan;
                }
            }
        }
        let Some(l_max) = l_max else {
            n *= 2;
            coarse = None;
            continue;
        };
        if 2 * (l_max + 1) > n {
            n *= 2;
            coarse = None;
            continue;
        }
        if let Some((cn, cghat, cl_max)) = &coarse {
            // `n` doubles the previous grid: accept the previous grid once
            // all its retained weights are reproduced to 1e-10 relative
            if ghat.len() <= *cl_max {
                let ext = idft_range(&samples, ghat.len(), *cl_max + 1);
                ghat.extend(ext);
            }
            let mut stable = true;
            let mut local_worst: f64 = 0.0;
            for l in 0..=*cl_max {
                let a = cghat[l].re;
                let b = ghat[l].re;
                let delta = (a - b).abs() / a.abs().max(b.abs()).max(fp_floor / 1e-10);
                local_worst = local_worst.max(delta);
                if (a - b).abs() > (1e-10 * a.abs().max(b.abs())).max(fp_floor) {
                    stable = false;
                }
            }
            worst_delta = local_worst;
            if stable {
                return finalize_spectrum(*cn, &cghat[..=*cl_max], tail_eps, z);
            }
        }
        coarse = Some((n, ghat, l_max));
        n *= 2;
    }
}

fn finalize_spectrum(
    grid_size: usize,
    ghat: &[Complex64],
    tail_eps: f64,
    z: f64,
) -> Result<SectorSpectrum> {
    let imag_tol = 1e-10 * z.max(1.0);
    let neg_tol = 1e-12 * z.max(1.0);
    let mut weights = Vec::with_capacity(ghat.len());
    let mut max_imag: f64 = 0.0;
    for (l, g) in ghat.iter().enumerate() {
        max_imag = max_imag.max(g.im.abs());
        if g.im.abs() > imag_tol {
            return Err(Error::Numerical(format!(
                "sector weight g_{l} has imaginary residue {:.3e}",
                g.im
            )));
        }
        if g.re < -neg_tol {
            return Err(Error::Numerical(format!(
                "sector weight g_{l} = {:.3e} is negative beyond clamp window",
                g.re
            )));
        }
        weights.push(g.re.max(0.0));
    }
    let mut retained = KahanSum::new();
    for &w in &weights {
        retained.add(w);
    }
    let truncated_mass = (z - retained.value()).max(0.0);
    let peaked = single_peaked(&weights, 1e-12 * z.max(1.0));
    Ok(SectorSpectrum {
        weights,
        tail_eps,
        grid_size,
        z,
        truncated_mass,
        max_imag_residue: max_imag,
        single_peaked: peaked,
    })
}

/// Unnormalized sector weights `g_l` of a kernel by discrete Fourier
/// inversion of the characteristic function.
///
/// The grid `(N, l_max)` is chosen adaptively so that `N ≥ 2(l_max+1)`,
/// the retained mass is at least `(1 − tail_eps)·Z`, `l_max ≥
/// l_min_required`, and doubling `N` changes no retained weight by more
/// than 1e-10 relative. Failure to converge within [`DEFAULT_GRID_CAP`]
/// nodes is a diagnostic error.
pub fn sector_spectrum(
    kernel: &KernelMatrix,
    tail_eps: f64,
    l_min_required: usize,
) -> Result<SectorSpectrum> {
    let eigs = physical_eigs(kernel)?;
    spectrum_from_eigs(&eigs, tail_eps, l_min_required, DEFAULT_GRID_CAP)
}
