//! Correlation matrices of the initial-state families, subsystem
//! restriction, and bipartite entanglement entropy of quasi-free states.
//!
//! A quasi-free state is fully described by the 2n x 2n matrix
//! `Gamma = <C C*>` over the interleaved Jordan-Wigner system
//! `C = (c_1, c_1*, ..., c_n, c_n*)^T`; site j owns rows 2j-1, 2j
//! (1-based). The entanglement entropy of a subinterval equals
//! `-tr Gamma_1 log Gamma_1` where `Gamma_1` is the principal submatrix on
//! the subinterval's rows. Its 2|B| eigenvalues come in pairs
//! `(xi, 1 - xi)`: `J Gamma J = I - Gamma^T` holds for every state, with
//! `J` the per-site swap of `c` and `c*`.

use nalgebra::DMatrix;

use crate::dynamics::{DensityProfile, TimeGrid};
use crate::error::{Result, XyError};
use crate::model::{build_anisotropic, ChainParameters, Partition, Subinterval};
use crate::spectral::{diagonalize, projection_basis, spectral_projection, EigenSystem};
use crate::spectral::SIMPLICITY_GAP;
use crate::C64;

/// Eigenvalues may leak this far out of [0,1] before the state counts as
/// corrupted; leakage within the window is clamped before the entropy sum.
const CORRUPTION_TOL: f64 = 1e-8;

const LN2: f64 = std::f64::consts::LN_2;

/// Fermionic occupation pattern `alpha` selecting the eigenstate
/// `psi_alpha = (b_1*)^{a_1} ... (b_n*)^{a_n} Omega`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OccupationPattern(Vec<u8>);

impl OccupationPattern {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if bits.iter().any(|&b| b > 1) {
            return Err(XyError::config("occupation pattern entries must be 0 or 1"));
        }
        if bits.is_empty() {
            return Err(XyError::config("occupation pattern must be nonempty"));
        }
        Ok(OccupationPattern(bits))
    }

    pub fn zeros(n: usize) -> Self {
        OccupationPattern(vec![0; n])
    }

    pub fn ones(n: usize) -> Self {
        OccupationPattern(vec![1; n])
    }

    pub fn alternating(n: usize) -> Self {
        OccupationPattern((0..n).map(|j| (j % 2) as u8).collect())
    }

    pub fn random<R: rand::Rng>(rng: &mut R, n: usize) -> Self {
        OccupationPattern((0..n).map(|_| u8::from(rng.gen::<bool>())).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b == 1).count()
    }

    pub fn complement(&self) -> Self {
        OccupationPattern(self.0.iter().map(|&b| 1 - b).collect())
    }

    /// Split along a partition into per-block patterns.
    pub fn split(&self, partition: &Partition) -> Result<Vec<OccupationPattern>> {
        if partition.n() != self.len() {
            return Err(XyError::structural(format!(
                "pattern length {} does not match partition over n = {}",
                self.len(),
                partition.n()
            )));
        }
        Ok(partition
            .blocks()
            .iter()
            .map(|b| OccupationPattern(self.0[b.a - 1..b.b].to_vec()))
            .collect())
    }
}

/// How a correlation matrix was produced; restrictions and evolutions keep
/// track of whether a global orthogonal projection sits underneath.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Projection,
    DensityProfile,
    Evolved { from_projection: bool },
}

/// `Gamma = <C C*>`: 2n x 2n complex Hermitian, spectrum in [0,1].
#[derive(Debug, Clone)]
pub struct CorrelationMatrix {
    mat: DMatrix<C64>,
    provenance: Provenance,
}

impl CorrelationMatrix {
    pub fn new(mat: DMatrix<C64>, provenance: Provenance) -> Self {
        CorrelationMatrix { mat, provenance }
    }

    pub fn from_real(mat: DMatrix<f64>, provenance: Provenance) -> Self {
        let c = mat.map(|x| C64::new(x, 0.0));
        CorrelationMatrix { mat: c, provenance }
    }

    /// `Gamma = I`; fixed by every conjugation.
    pub fn identity(n_sites: usize) -> Self {
        CorrelationMatrix {
            mat: DMatrix::identity(2 * n_sites, 2 * n_sites),
            provenance: Provenance::DensityProfile,
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn n_sites(&self) -> usize {
        self.dim() / 2
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.mat
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn real_part(&self) -> DMatrix<f64> {
        self.mat.map(|c| c.re)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..self.dim() {
            for j in i..self.dim() {
                d = d.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        d
    }

    pub fn trace_re(&self) -> f64 {
        (0..self.dim()).map(|i| self.mat[(i, i)].re).sum()
    }
}

/// Correlation matrix of the product state with density profile `eta`:
/// per-site blocks `diag(1 - eta_j, eta_j)`, no anomalous entries.
pub fn gamma_density_profile(profile: &DensityProfile) -> CorrelationMatrix {
    let n = profile.len();
    let mut mat = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        mat[(2 * j, 2 * j)] = 1.0 - profile.eta()[j];
        mat[(2 * j + 1, 2 * j + 1)] = profile.eta()[j];
    }
    CorrelationMatrix::from_real(mat, Provenance::DensityProfile)
}

/// Correlation matrix of a product of block eigenstates:
/// the direct sum of the per-block spectral projections
/// `chi_{Delta_{alpha(k)}}(M_k)`. A global orthogonal projection of rank n.
pub fn gamma_eigenstate_product(
    params: &ChainParameters,
    partition: &Partition,
    patterns: &[OccupationPattern],
) -> Result<CorrelationMatrix> {
    params.validate()?;
    if partition.n() != params.n() {
        return Err(XyError::structural("partition does not cover the chain"));
    }
    if patterns.len() != partition.m() {
        return Err(XyError::structural(format!(
            "{} patterns for {} blocks",
            patterns.len(),
            partition.m()
        )));
    }
    let n = params.n();
    let mut mat = DMatrix::zeros(2 * n, 2 * n);
    for (block, pattern) in partition.blocks().iter().zip(patterns) {
        if pattern.len() != block.len() {
            return Err(XyError::structural(format!(
                "pattern length {} does not match block [{}, {}]",
                pattern.len(),
                block.a,
                block.b
            )));
        }
        let sub = params.restrict(*block)?;
        let eig = diagonalize(&build_anisotropic(&sub))?;
        let proj = spectral_projection(&eig, pattern)?;
        let off = 2 * (block.a - 1);
        let d = 2 * block.len();
        mat.view_mut((off, off), (d, d))
            .copy_from(&proj.real_part());
    }
    Ok(CorrelationMatrix::from_real(mat, Provenance::Projection))
}

/// Row/column indices (0-based) of a site block in the interleaved layout.
fn block_rows(block: Subinterval) -> Vec<usize> {
    block
        .sites()
        .flat_map(|j| [2 * (j - 1), 2 * (j - 1) + 1])
        .collect()
}

/// Principal submatrix of `Gamma` on `span{e_{2j-1}, e_{2j} : j in block}`.
pub fn restrict_gamma(gamma: &CorrelationMatrix, block: Subinterval) -> Result<CorrelationMatrix> {
    block.check_in(gamma.n_sites())?;
    let rows = block_rows(block);
    let d = rows.len();
    let mat = DMatrix::from_fn(d, d, |i, j| gamma.matrix()[(rows[i], rows[j])]);
    Ok(CorrelationMatrix::new(mat, gamma.provenance()))
}

/// Eigenvalue spectrum of a restricted correlation matrix together with the
/// entropy `-tr Gamma_1 log Gamma_1`.
#[derive(Debug, Clone)]
pub struct EntropySpectrum {
    /// Lower halves `xi_j` of the eigenvalue pairs `(xi, 1-xi)`, ascending.
    pub xi: Vec<f64>,
    pub entropy_nats: f64,
    /// Worst deviation of `xi_j + (1 - xi_j)` pairing from 1.
    pub pairing_defect: f64,
    pub trace: f64,
}

impl EntropySpectrum {
    pub fn entropy_qubits(&self) -> f64 {
        self.entropy_nats / LN2
    }
}

/// Clamp an eigenvalue of a correlation matrix into [0,1]; outside the
/// corruption window this is an error, inside it is floating-point leakage.
fn clamp_eigenvalue(e: f64) -> Result<f64> {
    if !(-CORRUPTION_TOL..=1.0 + CORRUPTION_TOL).contains(&e) {
        return Err(XyError::StateCorruption { value: e });
    }
    Ok(e.clamp(0.0, 1.0))
}

fn entropy_term(e: f64) -> f64 {
    if e > 0.0 && e < 1.0 {
        -e * e.ln()
    } else {
        0.0
    }
}

pub(crate) fn entropy_from_eigenvalues(evs: &[f64]) -> Result<f64> {
    let mut s = 0.0;
    for &e in evs {
        s += entropy_term(clamp_eigenvalue(e)?);
    }
    Ok(s)
}

/// Von Neumann entropy of the quasi-free reduced state:
/// `-sum_eps eps ln eps` over all eigenvalues of `Gamma_1`, natural log,
/// `0 ln 0 = 0`.
pub fn entanglement_entropy(gamma1: &CorrelationMatrix) -> Result<EntropySpectrum> {
    let herm = gamma1.hermiticity_defect();
    if herm > 1e-10 {
        return Err(XyError::structural(format!(
            "correlation matrix not Hermitian (defect {herm:.3e})"
        )));
    }
    let raw = crate::linalg::hermitian_eigenvalues(gamma1.matrix())?;
    let mut evs: Vec<f64> = Vec::with_capacity(raw.len());
    for &e in &raw {
        evs.push(clamp_eigenvalue(e)?);
    }
    evs.sort_by(f64::total_cmp);
    let entropy_nats = evs.iter().map(|&e| entropy_term(e)).sum();

    let d = evs.len();
    let a = d / 2;
    let mut xi = Vec::with_capacity(a);
    let mut pairing_defect: f64 = 0.0;
    for j in 0..a {
        xi.push(evs[j]);
        pairing_defect = pairing_defect.max((evs[j] + evs[d - 1 - j] - 1.0).abs());
    }
    let trace = evs.iter().sum();
    Ok(EntropySpectrum {
        xi,
        entropy_nats,
        pairing_defect,
        trace,
    })
}

/// Spectral norm of a complex 2x2 block.
fn block_norm_2x2(b00: C64, b01: C64, b10: C64, b11: C64) -> f64 {
    let f2 = b00.norm_sqr() + b01.norm_sqr() + b10.norm_sqr() + b11.norm_sqr();
    let det = b00 * b11 - b01 * b10;
    let disc = (f2 * f2 - 4.0 * det.norm_sqr()).max(0.0);
    (0.5 * (f2 + disc.sqrt())).sqrt()
}

/// Cross-boundary diagnostic `2 log 2 * sum_{l in B, l' not in B}
/// ||Gamma_{l,l'}||`. For an evolved projection this upper-bounds the
/// entanglement entropy of `B`.
pub fn entropy_upper_diagnostic(gamma: &CorrelationMatrix, block: Subinterval) -> Result<f64> {
    let n = gamma.n_sites();
    block.check_in(n)?;
    let g = gamma.matrix();
    let mut total = 0.0;
    for l in block.sites() {
        let r = 2 * (l - 1);
        for lp in 1..=n {
            if block.contains(lp) {
                continue;
            }
            let c = 2 * (lp - 1);
            total += block_norm_2x2(g[(r, c)], g[(r, c + 1)], g[(r + 1, c)], g[(r + 1, c + 1)]);
        }
    }
    Ok(2.0 * LN2 * total)
}

/// One sampled point of an entropy sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub pattern_id: usize,
    pub t: f64,
    pub entropy_nats: f64,
    pub diagnostic: f64,
}

/// Entropy time series over a grid and a battery of occupation patterns,
/// with the running maximum (the per-realization inner supremum of the
/// area-law statement).
#[derive(Debug, Clone)]
pub struct EntropySweep {
    pub rows: Vec<SweepRow>,
    pub sup_entropy: f64,
    pub sup_pattern: usize,
    pub sup_t: f64,
}

/// Evolve products of block eigenstates and record the entanglement entropy
/// of `block` at every grid time, for every pattern in the battery.
///
/// The initial correlation matrix is the rank-n projection `Q Q^T` with
/// block-diagonal `Q`; the restriction of the evolved matrix is computed as
/// `X X*` with `X = P e^{-2itM} Q` (P = rows of the block), which is
/// algebraically identical to restricting the conjugated matrix but stays
/// low-rank. Also records the cross-boundary diagnostic per point.
pub fn evolved_entropy_sweep(
    params: &ChainParameters,
    partition: &Partition,
    battery: &[OccupationPattern],
    block: Subinterval,
    grid: &TimeGrid,
) -> Result<EntropySweep> {
    params.validate()?;
    let n = params.n();
    block.check_in(n)?;
    if battery.is_empty() {
        return Err(XyError::config("empty pattern battery"));
    }

    let eig = diagonalize(&build_anisotropic(params))?;
    let block_eigs: Vec<EigenSystem> = partition
        .blocks()
        .iter()
        .map(|b| diagonalize(&build_anisotropic(&params.restrict(*b)?)))
        .collect::<Result<_>>()?;
    for be in &block_eigs {
        let gap = be.min_gap();
        if gap <= SIMPLICITY_GAP {
            return Err(XyError::Degenerate { gap, tol: SIMPLICITY_GAP });
        }
    }

    let d = 2 * n;
    let rows_in = block_rows(block);
    let rows_out: Vec<usize> = (0..d).filter(|r| !rows_in.contains(r)).collect();
    let a2 = rows_in.len();
    let b2 = rows_out.len();
    let select = |rows: &[usize]| {
        DMatrix::from_fn(rows.len(), d, |i, j| eig.eigenvectors[(rows[i], j)])
    };
    let v_in = select(&rows_in);
    let v_out = select(&rows_out);

    let times = grid.times();
    let mut rows = Vec::with_capacity(battery.len() * times.len());
    let (mut sup_entropy, mut sup_pattern, mut sup_t) = (f64::NEG_INFINITY, 0, 0.0);

    let mut wc = DMatrix::<f64>::zeros(d, n);
    let mut ws = DMatrix::<f64>::zeros(d, n);

    for (pid, pattern) in battery.iter().enumerate() {
        let parts = pattern.split(partition)?;
        // block-diagonal basis of the initial projection
        let mut q = DMatrix::<f64>::zeros(d, n);
        let mut col = 0;
        for ((blk, be), part) in partition.blocks().iter().zip(&block_eigs).zip(&parts) {
            let basis = projection_basis(be, part);
            let off = 2 * (blk.a - 1);
            q.view_mut((off, col), (basis.nrows(), basis.ncols()))
                .copy_from(&basis);
            col += basis.ncols();
        }
        let w = eig.eigenvectors.transpose() * &q;

        for &t in times {
            // rows of W scaled by the eigenphases of e^{-2itM}
            for k in 0..d {
                let (sin, cos) = (2.0 * t * eig.eigenvalues[k]).sin_cos();
                for c in 0..n {
                    let wkc = w[(k, c)];
                    wc[(k, c)] = cos * wkc;
                    ws[(k, c)] = -sin * wkc;
                }
            }
            let xr_in = &v_in * &wc;
            let xi_in = &v_in * &ws;
            let gr = &xr_in * xr_in.transpose() + &xi_in * xi_in.transpose();
            let gi = &xi_in * xr_in.transpose() - &xr_in * xi_in.transpose();
            let evs = crate::linalg::hermitian_eigenvalues_from_parts(&gr, &gi)?;
            let entropy = entropy_from_eigenvalues(&evs)?;

            let xr_out = &v_out * &wc;
            let xi_out = &v_out * &ws;
            let cr = &xr_in * xr_out.transpose() + &xi_in * xi_out.transpose();
            let ci = &xi_in * xr_out.transpose() - &xr_in * xi_out.transpose();
            let mut cross = 0.0;
            for bi in (0..a2).step_by(2) {
                for bj in (0..b2).step_by(2) {
                    let g = |i: usize, j: usize| C64::new(cr[(i, j)], ci[(i, j)]);
                    cross += block_norm_2x2(
                        g(bi, bj),
                        g(bi, bj + 1),
                        g(bi + 1, bj),
                        g(bi + 1, bj + 1),
                    );
                }
            }
            let diagnostic = 2.0 * LN2 * cross;

            rows.push(SweepRow {
                pattern_id: pid,
                t,
                entropy_nats: entropy,
                diagnostic,
            });
            if entropy > sup_entropy {
                sup_entropy = entropy;
                sup_pattern = pid;
                sup_t = t;
            }
        }
    }

    Ok(EntropySweep {
        rows,
        sup_entropy,
        sup_pattern,
        sup_t,
    })
}
