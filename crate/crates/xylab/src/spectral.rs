//! Eigendecomposition of the effective Hamiltonians, spectral projections,
//! matrix functions, and the eigenfunction-correlator estimator.
//!
//! For flavor M the eigenvalues come in +-lambda pairs and the reordered
//! eigenvector rows form the Bogoliubov matrix `W` with
//! `W M W^T = diag(lambda_1, -lambda_1, ..., lambda_n, -lambda_n)`,
//! `0 <= lambda_1 <= ... <= lambda_n`.
//!
//! The correlator estimate is the eigenprojection sum
//! `Q_{jk} = sum_E || (P_E)_{jk} ||_2` over all eigenprojections `P_E`,
//! with the 2x2-block Euclidean norm at (j,k) for flavor M and plain
//! absolute values for flavor A. It dominates `sup_{|g|<=1} |g(H)_{jk}|`
//! by the triangle inequality, so every bound it certifies is valid.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::entanglement::{CorrelationMatrix, OccupationPattern, Provenance};
use crate::error::{Result, XyError};
use crate::model::{BlockMatrix, Flavor};
use crate::C64;

/// Minimum relative spectral gap below which a sample counts as degenerate
/// and is rejected rather than perturbed.
pub const SIMPLICITY_GAP: f64 = 1e-10;

/// Absolute tolerance on the +-lambda pairing of flavor-M spectra; a worse
/// mismatch signals broken symmetry upstream.
const PAIRING_TOL: f64 = 1e-8;

/// Full eigendecomposition of `A` or `M`, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenSystem {
    flavor: Flavor,
    n_sites: usize,
    /// Ascending eigenvalues, length n (flavor A) or 2n (flavor M).
    pub eigenvalues: DVector<f64>,
    /// Orthonormal eigenvectors, one column per eigenvalue.
    pub eigenvectors: DMatrix<f64>,
    /// Flavor M: paired magnitudes `0 <= lambda_1 <= ... <= lambda_n`.
    lambdas: Vec<f64>,
    /// Flavor A: `E_0 = sum_j nu_j`; flavor M: 0.
    pub e0: f64,
    /// Flavor M: `E_1 = sum_j lambda_j`; flavor A: 0.
    pub e1: f64,
}

impl EigenSystem {
    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Paired eigenvalue magnitudes (flavor M only).
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Column index of the eigenvector to `+lambda_j` (0-based j).
    pub fn plus_col(&self, j: usize) -> usize {
        self.n_sites + j
    }

    /// Column index of the eigenvector to `-lambda_j` (0-based j).
    pub fn minus_col(&self, j: usize) -> usize {
        self.n_sites - 1 - j
    }

    /// The Bogoliubov matrix `W`: row 2j holds the `+lambda_j` eigenvector,
    /// row 2j+1 the `-lambda_j` one, so `W M W^T` is the paired block
    /// diagonal.
    pub fn bogoliubov_w(&self) -> DMatrix<f64> {
        assert_eq!(self.flavor, Flavor::AnisotropicM);
        let d = self.dim();
        let mut w = DMatrix::zeros(d, d);
        for j in 0..self.n_sites {
            w.row_mut(2 * j).copy_from(&self.eigenvectors.column(self.plus_col(j)).transpose());
            w.row_mut(2 * j + 1)
                .copy_from(&self.eigenvectors.column(self.minus_col(j)).transpose());
        }
        w
    }

    /// Minimum gap between consecutive (sorted) eigenvalues.
    pub fn min_gap(&self) -> f64 {
        let ev = &self.eigenvalues;
        (1..ev.len())
            .map(|i| ev[i] - ev[i - 1])
            .fold(f64::INFINITY, f64::min)
    }

    /// `E_alpha = 2 sum_{j: alpha_j = 1} lambda_j - E_1` (flavor M).
    pub fn free_fermion_energy(&self, pattern: &OccupationPattern) -> f64 {
        assert_eq!(pattern.len(), self.n_sites);
        let occupied: f64 = pattern
            .bits()
            .iter()
            .zip(&self.lambdas)
            .filter(|(&b, _)| b == 1)
            .map(|(_, &l)| l)
            .sum();
        2.0 * occupied - self.e1
    }
}

fn fingerprint(mat: &DMatrix<f64>) -> String {
    let norm = mat.norm();
    let amax = mat.amax();
    format!("dim {}, frobenius {norm:.6e}, amax {amax:.6e}", mat.nrows())
}

/// Full real-symmetric eigendecomposition; for flavor M the +-pairing is
/// verified and the paired magnitudes recorded.
pub fn diagonalize(matrix: &BlockMatrix) -> Result<EigenSystem> {
    let mat = matrix.matrix();
    let (eigenvalues, eigenvectors) = crate::linalg::symmetric_eigen(mat).map_err(|e| {
        XyError::numeric(format!("eigensolver failed ({}): {e}", fingerprint(mat)))
    })?;

    let n = matrix.n();
    let mut lambdas = Vec::new();
    let mut e0 = 0.0;
    let mut e1 = 0.0;
    match matrix.flavor() {
        Flavor::IsotropicA => {
            e0 = -mat.trace();
        }
        Flavor::AnisotropicM => {
            let scale = eigenvalues.amax().max(1.0);
            for j in 0..n {
                let plus = eigenvalues[n + j];
                let minus = eigenvalues[n - 1 - j];
                if (plus + minus).abs() > PAIRING_TOL * scale {
                    return Err(XyError::structural(format!(
                        "eigenvalue pairing mismatch at pair {j}: {plus:.12e} vs {minus:.12e} ({})",
                        fingerprint(mat)
                    )));
                }
                lambdas.push(plus);
            }
            e1 = lambdas.iter().sum();
        }
    }

    Ok(EigenSystem {
        flavor: matrix.flavor(),
        n_sites: n,
        eigenvalues,
        eigenvectors,
        lambdas,
        e0,
        e1,
    })
}

/// Columns spanning the range of `chi_{Delta_alpha}(M)`: the `+lambda_j`
/// eigenvector where `alpha_j = 0`, the `-lambda_j` one where `alpha_j = 1`.
pub(crate) fn projection_basis(eig: &EigenSystem, pattern: &OccupationPattern) -> DMatrix<f64> {
    let n = eig.n_sites();
    let mut q = DMatrix::zeros(eig.dim(), n);
    for j in 0..n {
        let col = if pattern.bits()[j] == 0 {
            eig.plus_col(j)
        } else {
            eig.minus_col(j)
        };
        q.column_mut(j).copy_from(&eig.eigenvectors.column(col));
    }
    q
}

/// Orthogonal projection onto the spectral set
/// `Delta_alpha = {lambda_j : alpha_j = 0} u {-lambda_j : alpha_j = 1}`:
/// the correlation matrix of the fermionic eigenstate `psi_alpha`.
///
/// Rejects near-degenerate spectra (gap <= 1e-10): the pattern-to-subspace
/// map is then ill-defined and the disorder sample must be discarded.
pub fn spectral_projection(
    eig: &EigenSystem,
    pattern: &OccupationPattern,
) -> Result<CorrelationMatrix> {
    if eig.flavor() != Flavor::AnisotropicM {
        return Err(XyError::structural(
            "spectral_projection requires a flavor-M eigensystem",
        ));
    }
    if pattern.len() != eig.n_sites() {
        return Err(XyError::structural(format!(
            "pattern length {} does not match n = {}",
            pattern.len(),
            eig.n_sites()
        )));
    }
    let gap = eig.min_gap();
    if gap <= SIMPLICITY_GAP {
        return Err(XyError::Degenerate { gap, tol: SIMPLICITY_GAP });
    }
    let q = projection_basis(eig, pattern);
    let p = &q * q.transpose();
    Ok(CorrelationMatrix::from_real(p, Provenance::Projection))
}

/// `g(H) = V diag(g(lambda)) V^T` through the functional calculus.
pub fn matrix_function<F>(eig: &EigenSystem, g: F) -> DMatrix<C64>
where
    F: Fn(f64) -> C64,
{
    let d = eig.dim();
    let vals: Vec<C64> = eig.eigenvalues.iter().map(|&l| g(l)).collect();
    // Split into real and imaginary parts so both products run as real GEMM.
    let mut vre = eig.eigenvectors.clone();
    let mut vim = eig.eigenvectors.clone();
    for (k, gv) in vals.iter().enumerate() {
        vre.column_mut(k).scale_mut(gv.re);
        vim.column_mut(k).scale_mut(gv.im);
    }
    let re = &vre * eig.eigenvectors.transpose();
    let im = &vim * eig.eigenvectors.transpose();
    DMatrix::from_fn(d, d, |i, j| C64::new(re[(i, j)], im[(i, j)]))
}

/// Eigenfunction-correlator estimate `Q_{jk} = sum_E ||(P_E)_{jk}||`.
///
/// Each eigenprojection contributes the rank-one block
/// `v_E[rows j] (v_E[rows k])^T`, whose 2x2 spectral norm factors into site
/// norms, so `Q = N N^T` with `N[j, E]` the norm of eigenvector `E` on the
/// rows of site `j`.
pub fn eigencorrelator(eig: &EigenSystem) -> DMatrix<f64> {
    let n = eig.n_sites();
    let d = eig.dim();
    let mut site_norms = DMatrix::zeros(n, d);
    match eig.flavor() {
        Flavor::IsotropicA => {
            for e in 0..d {
                for j in 0..n {
                    site_norms[(j, e)] = eig.eigenvectors[(j, e)].abs();
                }
            }
        }
        Flavor::AnisotropicM => {
            for e in 0..d {
                for j in 0..n {
                    let x = eig.eigenvectors[(2 * j, e)];
                    let y = eig.eigenvectors[(2 * j + 1, e)];
                    site_norms[(j, e)] = x.hypot(y);
                }
            }
        }
    }
    &site_norms * site_norms.transpose()
}

/// Decay model for the disorder-averaged correlator profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    /// `F(r) = C exp(-r / xi)`
    Exponential,
    /// `F(r) = C / (1 + r)^beta`
    Power,
}

/// Least-squares fit of `log Q(r)` against a decay model.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DecayFit {
    pub model: DecayModel,
    pub amplitude: f64,
    /// `xi` for the exponential model, `beta` for the power model.
    pub rate: f64,
    /// RMS residual of `log Q` over the fit window.
    pub residual: f64,
    pub window: (usize, usize),
}

/// Disorder-averaged correlator profile over pair distances.
///
/// `q_max[r]` is `max_{|j-k| = r}` of the ensemble-averaged `Q_{jk}` (the
/// uniform-in-(j,k) form used as `F`); `q_mean[r]` the mean over pairs,
/// recorded for diagnostics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrelatorProfile {
    pub q_max: Vec<f64>,
    pub q_mean: Vec<f64>,
    pub samples: usize,
    pub fit: Option<DecayFit>,
}

impl CorrelatorProfile {
    /// Collapse an averaged per-pair matrix onto distances `0 ..= n-1`.
    pub fn from_mean_q(qbar: &DMatrix<f64>, samples: usize) -> Self {
        let n = qbar.nrows();
        let mut q_max = vec![0.0f64; n];
        let mut q_mean = vec![0.0f64; n];
        let mut count = vec![0usize; n];
        for j in 0..n {
            for k in j..n {
                let r = k - j;
                let v = qbar[(j, k)];
                q_max[r] = q_max[r].max(v);
                q_mean[r] += v;
                count[r] += 1;
            }
        }
        for r in 0..n {
            q_mean[r] /= count[r] as f64;
        }
        CorrelatorProfile {
            q_max,
            q_mean,
            samples,
            fit: None,
        }
    }

    pub fn max_distance(&self) -> usize {
        self.q_max.len() - 1
    }

    /// `F(r)` lookup; distances past the profile end count as 0 (the chain
    /// cannot separate sites further than n-1).
    pub fn f(&self, r: usize) -> f64 {
        self.q_max.get(r).copied().unwrap_or(0.0)
    }
}

/// Fit `log Q(r)` over `window = (r_lo, r_hi)` (inclusive) against the
/// requested model. Points with `Q(r) = 0` are skipped; at least 4 distinct
/// usable distances are required.
pub fn fit_decay(
    profile: &CorrelatorProfile,
    model: DecayModel,
    window: (usize, usize),
) -> Result<DecayFit> {
    let (lo, hi) = window;
    let hi = hi.min(profile.max_distance());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut any_above_floor = false;
    for r in lo..=hi {
        let q = profile.q_max[r];
        if q > 0.0 {
            if q > 1e-15 {
                any_above_floor = true;
            }
            let x = match model {
                DecayModel::Exponential => r as f64,
                DecayModel::Power => (1.0 + r as f64).ln(),
            };
            xs.push(x);
            ys.push(q.ln());
        }
    }
    if xs.len() < 4 {
        return Err(XyError::config(format!(
            "fit window [{lo},{hi}] has {} usable points, need >= 4",
            xs.len()
        )));
    }
    if !any_above_floor {
        return Err(XyError::Underflow(format!(
            "all Q(r) in window [{lo},{hi}] below 1e-15; disorder too strong or distances too large"
        )));
    }

    let m = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let denom = m * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return Err(XyError::numeric("degenerate fit window".to_string()));
    }
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum::<f64>()
        / m)
        .sqrt();

    let rate = match model {
        DecayModel::Exponential => -1.0 / slope,
        DecayModel::Power => -slope,
    };
    Ok(DecayFit {
        model,
        amplitude: intercept.exp(),
        rate,
        residual,
        window: (lo, hi),
    })
}
