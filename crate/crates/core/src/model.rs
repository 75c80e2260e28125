//! GBS device description and its Gaussian kernel matrix.
//!
//! An instance is an `m`-mode interferometer unitary `U` together with
//! per-mode squeezing parameters `r_j ≥ 0` (`r_j = 0` is a vacuum input).
//! The output Gaussian state is `exp(−½ Σ B_{ii'} a_i† a_{i'}†)|0⟩` with
//! the complex symmetric kernel
//!
//! ```text
//! B = Uᵀ · diag(tanh r) · U,
//! ```
//!
//! whose squared norm is `det(I − B†B)^(−1/2)`. Measurement patterns act
//! on the kernel by deleting dark modes' rows and columns.
//!
//! Modes are 1-based in file formats and CLI strings, 0-based in this API.

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{unitarity_deviation, CMatrix};

/// Unitarity tolerance for programmatically constructed instances.
const UNITARY_TOL_STRICT: f64 = 1e-10;
/// Looser tolerance applied when loading instance files, which may have
/// been written by other tools with limited precision.
const UNITARY_TOL_FILE: f64 = 1e-6;

/// Interferometer unitary plus per-mode squeezing parameters.
#[derive(Debug, Clone)]
pub struct GBSInstance {
    r: Vec<f64>,
    u: CMatrix,
    seed: Option<u64>,
}

impl GBSInstance {
    /// Validated constructor: `u` must be square and unitary to 1e-10,
    /// `r` of matching length with finite non-negative entries.
    pub fn new(u: CMatrix, r: Vec<f64>) -> Result<Self> {
        Self::with_tolerance(u, r, UNITARY_TOL_STRICT)
    }

    fn with_tolerance(u: CMatrix, r: Vec<f64>, tol: f64) -> Result<Self> {
        if u.nrows() != u.ncols() {
            return Err(Error::Dimension(format!(
                "interferometer matrix must be square, got {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        if u.nrows() == 0 {
            return Err(Error::Dimension("instance needs at least one mode".into()));
        }
        if r.len() != u.nrows() {
            return Err(Error::Dimension(format!(
                "squeezing vector length {} does not match mode count {}",
                r.len(),
                u.nrows()
            )));
        }
        for (j, &rj) in r.iter().enumerate() {
            if !rj.is_finite() || rj < 0.0 {
                return Err(Error::Squeezing(format!(
                    "r[{}] = {rj} must be finite and ≥ 0",
                    j + 1
                )));
            }
        }
        let deviation = unitarity_deviation(&u);
        if deviation > tol {
            return Err(Error::NotUnitary {
                deviation,
                tolerance: tol,
            });
        }
        Ok(Self { r, u, seed: None })
    }

    /// Number of modes.
    pub fn modes(&self) -> usize {
        self.r.len()
    }

    /// Squeezing parameters, one per mode.
    pub fn squeezing(&self) -> &[f64] {
        &self.r
    }

    /// Interferometer unitary.
    pub fn unitary(&self) -> &CMatrix {
        &self.u
    }

    /// Seed recorded at generation time, if any.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = Some(seed);
    }
}

/// Complex symmetric kernel `B` of the output Gaussian state, stored
/// exactly symmetric.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    b: CMatrix,
}

impl KernelMatrix {
    /// Wrap a complex symmetric matrix. Symmetry defects up to rounding
    /// noise are symmetrized away; larger ones are rejected.
    pub fn new(b: CMatrix) -> Result<Self> {
        if b.nrows() != b.ncols() {
            return Err(Error::Dimension(format!(
                "kernel must be square, got {}x{}",
                b.nrows(),
                b.ncols()
            )));
        }
        let scale = b.iter().map(|z| z.norm()).fold(0.0f64, f64::max);
        let mut sym = b;
        let n = sym.nrows();
        for i in 0..n {
            for j in i + 1..n {
                let a = sym[(i, j)];
                let c = sym[(j, i)];
                if (a - c).norm() > 1e-10 * scale.max(1.0) {
                    return Err(Error::Dimension(format!(
                        "kernel is not symmetric at ({i},{j})"
                    )));
                }
                let avg = (a + c) * Complex64::new(0.5, 0.0);
                sym[(i, j)] = avg;
                sym[(j, i)] = avg;
            }
        }
        for z in sym.iter() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::Dimension("kernel has non-finite entries".into()));
            }
        }
        Ok(Self { b: sym })
    }

    /// The 0×0 kernel (squared norm 1).
    pub fn empty() -> Self {
        Self {
            b: CMatrix::zeros(0, 0),
        }
    }

    pub fn dim(&self) -> usize {
        self.b.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.b
    }

    /// Principal submatrix with the rows and columns in `t` deleted
    /// (0-based, distinct). Removing every mode yields the 0×0 kernel.
    pub fn remove_modes(&self, t: &[usize]) -> Result<KernelMatrix> {
        let n = self.dim();
        let mut removed = vec![false; n];
        for &i in t {
            if i >= n {
                return Err(Error::Dimension(format!(
                    "mode index {i} out of range for dimension {n}"
                )));
            }
            if removed[i] {
                return Err(Error::Dimension(format!("duplicate mode index {i}")));
            }
            removed[i] = true;
        }
        let keep: Vec<usize> = (0..n).filter(|&i| !removed[i]).collect();
        Ok(self.select(&keep))
    }

    /// Submatrix keeping exactly the clicked modes of `pattern`.
    pub fn pattern_submatrix(&self, pattern: &OutcomePattern) -> Result<KernelMatrix> {
        if pattern.len() != self.dim() {
            return Err(Error::Pattern(format!(
                "pattern length {} does not match kernel dimension {}",
                pattern.len(),
                self.dim()
            )));
        }
        Ok(self.select(&pattern.clicked_indices()))
    }

    fn select(&self, keep: &[usize]) -> KernelMatrix {
        let k = keep.len();
        let mut sub = CMatrix::zeros(k, k);
        for (a, &i) in keep.iter().enumerate() {
            for (c, &j) in keep.iter().enumerate() {
                sub[(a, c)] = self.b[(i, j)];
            }
        }
        KernelMatrix { b: sub }
    }
}

/// Build the kernel `B = Uᵀ diag(tanh r) U` of an instance.
///
/// `|tanh r| < 1` and unitary `U` guarantee the spectral norm of `B†B`
/// stays strictly below one, so every valid instance yields a physical
/// kernel.
pub fn build_kernel(instance: &GBSInstance) -> KernelMatrix {
    let m = instance.modes();
    let u = instance.unitary();
    let mut scaled = CMatrix::zeros(m, m);
    // diag(tanh r) · U, then Uᵀ · that
    for j in 0..m {
        let t = instance.squeezing()[j].tanh();
        for c in 0..m {
            scaled[(j, c)] = u[(j, c)] * t;
        }
    }
    let b = u.transpose() * scaled;
    // (B + Bᵀ)/2 is exactly symmetric in floating point
    KernelMatrix::new(b).expect("kernel from a valid instance is symmetric")
}

/// Threshold-detector outcome: one click/dark flag per mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutcomePattern {
    bits: Vec<bool>,
}

impl OutcomePattern {
    /// Parse a '0'/'1' string, character `i` (1-based) = mode `i`,
    /// '1' = click.
    pub fn parse(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Pattern("pattern string is empty".into()));
        }
        let mut bits = Vec::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => bits.push(false),
                '1' => bits.push(true),
                other => {
                    return Err(Error::Pattern(format!(
                        "invalid character {other:?} at position {}",
                        i + 1
                    )))
                }
            }
        }
        Ok(Self { bits })
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    /// Pattern with clicks exactly on `clicked` (0-based).
    pub fn from_clicked(m: usize, clicked: &[usize]) -> Result<Self> {
        let mut bits = vec![false; m];
        for &i in clicked {
            if i >= m {
                return Err(Error::Pattern(format!(
                    "clicked index {i} out of range for {m} modes"
                )));
            }
            bits[i] = true;
        }
        Ok(Self { bits })
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn n_clicked(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_clicked(&self, mode: usize) -> bool {
        self.bits[mode]
    }

    pub fn clicked_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.bits[i]).collect()
    }

    pub fn dark_indices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.bits[i]).collect()
    }

    pub fn to_string_bits(&self) -> String {
        self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

impl std::fmt::Display for OutcomePattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.to_string_bits())
    }
}

/// On-disk instance schema. `U_re`/`U_im` are row-major nested arrays.
#[derive(Serialize, Deserialize)]
struct InstanceFile {
    m: usize,
    r: Vec<f64>,
    #[serde(rename = "U_re")]
    u_re: Vec<Vec<f64>>,
    #[serde(rename = "U_im")]
    u_im: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    version: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<serde_json::Value>,
}

/// Serialize an instance to JSON. Round-trips are bit-exact on `r` and
/// the entries of `U`.
pub fn save_instance(instance: &GBSInstance, path: &Path) -> Result<()> {
    save_instance_with_config(instance, path, None)
}

/// Like [`save_instance`], embedding a provenance blob (the CLI stores
/// its full run configuration here).
pub fn save_instance_with_config(
    instance: &GBSInstance,
    path: &Path,
    config: Option<serde_json::Value>,
) -> Result<()> {
    let m = instance.modes();
    let u = instance.unitary();
    let mut u_re = vec![vec![0.0; m]; m];
    let mut u_im = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..m {
            u_re[i][j] = u[(i, j)].re;
            u_im[i][j] = u[(i, j)].im;
        }
    }
    let file = InstanceFile {
        m,
        r: instance.squeezing().to_vec(),
        u_re,
        u_im,
        seed: instance.seed(),
        version: Some(crate::VERSION.to_string()),
        config,
    };
    let mut body = serde_json::to_string_pretty(&file)?;
    body.push('\n');
    fs::write(path, body)?;
    Ok(())
}

/// Load and validate an instance file (unitarity tolerance 1e-6 for
/// hand-authored files).
pub fn load_instance(path: &Path) -> Result<GBSInstance> {
    let body = fs::read_to_string(path)
        .map_err(|e| Error::InstanceFile(format!("{}: {e}", path.display())))?;
    let file: InstanceFile = serde_json::from_str(&body)
        .map_err(|e| Error::InstanceFile(format!("{}: {e}", path.display())))?;
    if file.r.len() != file.m {
        return Err(Error::InstanceFile(format!(
            "r has length {} but m = {}",
            file.r.len(),
            file.m
        )));
    }
    if file.u_re.len() != file.m || file.u_im.len() != file.m {
        return Err(Error::InstanceFile("U_re/U_im row count != m".into()));
    }
    let mut u = CMatrix::zeros(file.m, file.m);
    for i in 0..file.m {
        if file.u_re[i].len() != file.m || file.u_im[i].len() != file.m {
            return Err(Error::InstanceFile(format!("U row {i} has wrong length")));
        }
        for j in 0..file.m {
            u[(i, j)] = Complex64::new(file.u_re[i][j], file.u_im[i][j]);
        }
    }
    let mut instance = GBSInstance::with_tolerance(u, file.r, UNITARY_TOL_FILE)?;
    if let Some(seed) = file.seed {
        instance.set_seed(seed);
    }
    Ok(instance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_unitary;

    fn beamsplitter_instance() -> GBSInstance {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(s, 0.0),
                Complex64::new(-s, 0.0),
            ],
        );
        GBSInstance::new(u, vec![1.0, 0.0]).unwrap()
    }

    #[test]
    fn build_kernel_single_mode() {
        let u = CMatrix::identity(1, 1);
        let inst = GBSInstance::new(u, vec![1.0]).unwrap();
        let k = build_kernel(&inst);
        assert!((k.matrix()[(0, 0)].re - 1.0f64.tanh()).abs() < 1e-15);
        assert_eq!(k.matrix()[(0, 0)].im, 0.0);
    }

    #[test]
    fn build_kernel_vacuum_is_zero() {
        let u = haar_unitary(5, 3).unwrap();
        let inst = GBSInstance::new(u, vec![0.0; 5]).unwrap();
        let k = build_kernel(&inst);
        assert!(k.matrix().iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn build_kernel_beamsplitter() {
        let k = build_kernel(&beamsplitter_instance());
        let expect = 1.0f64.tanh() / 2.0;
        for i in 0..2 {
            for j in 0..2 {
                let z = k.matrix()[(i, j)];
                assert!((z.re - expect).abs() < 1e-14, "entry ({i},{j}) = {z}");
                assert!(z.im.abs() < 1e-15);
            }
        }
    }

    #[test]
    fn kernel_is_stored_symmetric() {
        let u = haar_unitary(7, 11).unwrap();
        let inst = GBSInstance::new(u, vec![0.9, 0.0, 1.3, 0.2, 0.0, 0.7, 1.1]).unwrap();
        let k = build_kernel(&inst);
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(k.matrix()[(i, j)], k.matrix()[(j, i)]);
            }
        }
    }

    #[test]
    fn remove_modes_cases() {
        let k = build_kernel(&beamsplitter_instance());
        let same = k.remove_modes(&[]).unwrap();
        assert_eq!(same.matrix(), k.matrix());
        let empty = k.remove_modes(&[0, 1]).unwrap();
        assert_eq!(empty.dim(), 0);
        let one = k.remove_modes(&[1]).unwrap();
        assert_eq!(one.dim(), 1);
        assert!((one.matrix()[(0, 0)].re - 1.0f64.tanh() / 2.0).abs() < 1e-14);
        assert!(k.remove_modes(&[2]).is_err());
        assert!(k.remove_modes(&[0, 0]).is_err());
    }

    #[test]
    fn pattern_submatrix_cases() {
        let u = haar_unitary(3, 5).unwrap();
        let inst = GBSInstance::new(u, vec![1.0, 0.5, 0.2]).unwrap();
        let k = build_kernel(&inst);
        let all = OutcomePattern::parse("111").unwrap();
        assert_eq!(k.pattern_submatrix(&all).unwrap().matrix(), k.matrix());
        let dark = OutcomePattern::parse("000").unwrap();
        assert_eq!(k.pattern_submatrix(&dark).unwrap().dim(), 0);
        let pick = OutcomePattern::parse("101").unwrap();
        let sub = k.pattern_submatrix(&pick).unwrap();
        assert_eq!(sub.dim(), 2);
        assert_eq!(sub.matrix()[(0, 1)], k.matrix()[(0, 2)]);
        let wrong = OutcomePattern::parse("10").unwrap();
        assert!(k.pattern_submatrix(&wrong).is_err());
    }

    #[test]
    fn submatrix_commutation() {
        let u = haar_unitary(6, 13).unwrap();
        let inst = GBSInstance::new(u, vec![0.8; 6]).unwrap();
        let k = build_kernel(&inst);
        // remove {1,4} then (reindexed) {2} == remove {1,3,4} directly
        let a = k.remove_modes(&[1, 4]).unwrap().remove_modes(&[2]).unwrap();
        let b = k.remove_modes(&[1, 3, 4]).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }

    #[test]
    fn pattern_parsing() {
        let p = OutcomePattern::parse("0110").unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(p.n_clicked(), 2);
        assert_eq!(p.clicked_indices(), vec![1, 2]);
        assert_eq!(p.dark_indices(), vec![0, 3]);
        assert_eq!(p.to_string_bits(), "0110");
        assert!(OutcomePattern::parse("01x0").is_err());
        assert!(OutcomePattern::parse("").is_err());
    }

    #[test]
    fn instance_validation() {
        let u = haar_unitary(3, 1).unwrap();
        assert!(GBSInstance::new(u.clone(), vec![1.0, 1.0]).is_err());
        assert!(GBSInstance::new(u.clone(), vec![1.0, -0.1, 0.0]).is_err());
        assert!(GBSInstance::new(u.clone(), vec![1.0, f64::NAN, 0.0]).is_err());
        let mut bad = u;
        bad[(0, 0)] += Complex64::new(0.1, 0.0);
        assert!(matches!(
            GBSInstance::new(bad, vec![1.0, 1.0, 1.0]),
            Err(Error::NotUnitary { .. })
        ));
    }

    #[test]
    fn save_load_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("inst.json");
        let u = haar_unitary(5, 77).unwrap();
        let mut inst = GBSInstance::new(u, vec![1.4, 0.0, 0.3, 0.0, 0.9]).unwrap();
        inst.set_seed(77);
        save_instance(&inst, &path).unwrap();
        let loaded = load_instance(&path).unwrap();
        assert_eq!(loaded.modes(), 5);
        assert_eq!(loaded.squeezing(), inst.squeezing());
        assert_eq!(loaded.seed(), Some(77));
        for i in 0..5 {
            for j in 0..5 {
                assert_eq!(loaded.unitary()[(i, j)], inst.unitary()[(i, j)]);
            }
        }
    }

    #[test]
    fn load_rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.json");

        // non-unitary U
        std::fs::write(
            &path,
            r#"{"m":2,"r":[0.5,0.5],"U_re":[[1.0,0.0],[0.0,0.9]],"U_im":[[0.0,0.0],[0.0,0.0]]}"#,
        )
        .unwrap();
        assert!(matches!(
            load_instance(&path),
            Err(Error::NotUnitary { .. })
        ));

        // r length mismatch
        std::fs::write(
            &path,
            r#"{"m":2,"r":[0.5],"U_re":[[1.0,0.0],[0.0,1.0]],"U_im":[[0.0,0.0],[0.0,0.0]]}"#,
        )
        .unwrap();
        assert!(matches!(load_instance(&path), Err(Error::InstanceFile(_))));

        // malformed JSON
        std::fs::write(&path, "{not json").unwrap();
        assert!(matches!(load_instance(&path), Err(Error::InstanceFile(_))));
    }
}
