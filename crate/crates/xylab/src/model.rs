//! Chain parameters, disorder distributions, lattice geometry, and the
//! effective one-particle matrices.
//!
//! The isotropic chain is governed by the symmetric Jacobi matrix
//!
//! ```text
//! A = tridiag(mu_j ; -nu_j ; mu_j)        (n x n)
//! ```
//!
//! and the general anisotropic chain by the block-tridiagonal
//!
//! ```text
//! M = [ -nu_1 sz   mu_1 S(g_1)                    ]
//!     [ mu_1 S^T   -nu_2 sz     ...               ]      (2n x 2n)
//!     [            ...          mu_{n-1} S(g_{n-1}) ]
//!     [            mu_{n-1} S^T  -nu_n sz          ]
//!
//! S(g) = [ 1   g ]
//!        [ -g -1 ]
//! ```
//!
//! `M` anticommutes with `J = sx + sx + ...` (one sx per site), which forces
//! the +-lambda pairing of its spectrum.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, XyError};

/// Fixed stream labels so each parameter sequence has its own RNG stream
/// derived from the master seed; adding a parameter never perturbs the
/// draws of another.
const STREAM_MU: u64 = 0;
const STREAM_GAMMA: u64 = 1;
const STREAM_NU: u64 = 2;
/// Reserved for the random pattern battery in the ensemble module.
pub(crate) const STREAM_PATTERNS: u64 = 3;

/// One bounded-support distribution for a parameter sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Distribution {
    Constant { value: f64 },
    Uniform { low: f64, high: f64 },
    /// Takes `v1` with probability `p`, else `v2`.
    TwoPoint { v1: f64, v2: f64, p: f64 },
}

impl Distribution {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Distribution::Constant { value } => {
                if !value.is_finite() {
                    return Err(XyError::config("constant distribution value not finite"));
                }
            }
            Distribution::Uniform { low, high } => {
                if !(low.is_finite() && high.is_finite()) {
                    return Err(XyError::config("uniform bounds not finite"));
                }
                if low > high {
                    return Err(XyError::config(format!(
                        "uniform bounds out of order: low {low} > high {high}"
                    )));
                }
            }
            Distribution::TwoPoint { v1, v2, p } => {
                if !(v1.is_finite() && v2.is_finite()) {
                    return Err(XyError::config("two_point values not finite"));
                }
                if !(0.0..=1.0).contains(&p) {
                    return Err(XyError::config(format!("two_point p = {p} outside [0,1]")));
                }
            }
        }
        Ok(())
    }

    fn sample(&self, rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
        match *self {
            Distribution::Constant { value } => vec![value; len],
            Distribution::Uniform { low, high } => {
                if low == high {
                    vec![low; len]
                } else {
                    (0..len).map(|_| rng.gen_range(low..high)).collect()
                }
            }
            Distribution::TwoPoint { v1, v2, p } => (0..len)
                .map(|_| if rng.gen::<f64>() < p { v1 } else { v2 })
                .collect(),
        }
    }
}

/// Per-parameter disorder distributions plus the master seed. All three
/// sequences are i.i.d. and mutually independent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisorderSpec {
    pub mu: Distribution,
    pub gamma: Distribution,
    pub nu: Distribution,
    pub seed: u64,
}

impl DisorderSpec {
    pub fn validate(&self) -> Result<()> {
        self.mu.validate()?;
        self.gamma.validate()?;
        self.nu.validate()
    }

    /// Same distributions, different seed. Used by the ensemble runner to
    /// derive per-realization sub-seeds.
    pub fn with_seed(&self, seed: u64) -> Self {
        DisorderSpec { seed, ..*self }
    }
}

/// The sequences `mu_j` (length n-1), `gamma_j` (length n-1), `nu_j`
/// (length n) of one disorder realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainParameters {
    pub mu: Vec<f64>,
    pub gamma: Vec<f64>,
    pub nu: Vec<f64>,
}

impl ChainParameters {
    pub fn new(mu: Vec<f64>, gamma: Vec<f64>, nu: Vec<f64>) -> Result<Self> {
        let p = ChainParameters { mu, gamma, nu };
        p.validate()?;
        Ok(p)
    }

    /// Clean chain: constant coupling, no anisotropy, constant field.
    pub fn constant(n: usize, mu: f64, gamma: f64, nu: f64) -> Self {
        ChainParameters {
            mu: vec![mu; n.saturating_sub(1)],
            gamma: vec![gamma; n.saturating_sub(1)],
            nu: vec![nu; n],
        }
    }

    pub fn n(&self) -> usize {
        self.nu.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.nu.len();
        if n == 0 {
            return Err(XyError::config("chain must have at least one site"));
        }
        if self.mu.len() != n - 1 || self.gamma.len() != n - 1 {
            return Err(XyError::config(format!(
                "sequence lengths (mu {}, gamma {}, nu {}) incompatible; want (n-1, n-1, n)",
                self.mu.len(),
                self.gamma.len(),
                n
            )));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !(finite(&self.mu) && finite(&self.gamma) && finite(&self.nu)) {
            return Err(XyError::config("non-finite chain parameter"));
        }
        Ok(())
    }

    pub fn is_isotropic(&self) -> bool {
        self.gamma.iter().all(|&g| g == 0.0)
    }

    /// Parameters of the restriction of the chain to `block`; the coupling
    /// across each cut is dropped on both sides.
    pub fn restrict(&self, block: Subinterval) -> Result<ChainParameters> {
        block.check_in(self.n())?;
        let (a, b) = (block.a, block.b);
        Ok(ChainParameters {
            mu: self.mu[a - 1..b - 1].to_vec(),
            gamma: self.gamma[a - 1..b - 1].to_vec(),
            nu: self.nu[a - 1..b].to_vec(),
        })
    }
}

/// Draw one realization of the three parameter sequences. Deterministic
/// given `(spec.seed, n)`: each sequence reads its own ChaCha stream.
pub fn sample_parameters(spec: &DisorderSpec, n: usize) -> Result<ChainParameters> {
    if n == 0 {
        return Err(XyError::config("n must be >= 1"));
    }
    spec.validate()?;
    let draw = |dist: &Distribution, stream: u64, len: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(stream);
        dist.sample(&mut rng, len)
    };
    Ok(ChainParameters {
        mu: draw(&spec.mu, STREAM_MU, n - 1),
        gamma: draw(&spec.gamma, STREAM_GAMMA, n - 1),
        nu: draw(&spec.nu, STREAM_NU, n),
    })
}

/// RNG stream for experiment-level sampling (pattern batteries and other
/// auxiliary draws), separated from the parameter streams.
pub fn pattern_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(STREAM_PATTERNS);
    rng
}

/// Closed subinterval `[a, b]` of the chain, 1-based, `a <= b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subinterval {
    pub a: usize,
    pub b: usize,
}

impl Subinterval {
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == 0 || a > b {
            return Err(XyError::range(format!("subinterval [{a},{b}] invalid")));
        }
        Ok(Subinterval { a, b })
    }

    pub fn len(&self) -> usize {
        self.b - self.a + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, j: usize) -> bool {
        (self.a..=self.b).contains(&j)
    }

    pub fn sites(&self) -> impl Iterator<Item = usize> {
        self.a..=self.b
    }

    pub fn check_in(&self, n: usize) -> Result<()> {
        if self.b > n {
            return Err(XyError::range(format!(
                "subinterval [{},{}] outside [1,{n}]",
                self.a, self.b
            )));
        }
        Ok(())
    }
}

/// A general site set `S`, kept as a sorted, deduplicated 1-based list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SiteSet(Vec<usize>);

impl SiteSet {
    pub fn new(mut sites: Vec<usize>) -> Result<Self> {
        sites.sort_unstable();
        sites.dedup();
        if sites.first() == Some(&0) {
            return Err(XyError::range("site indices are 1-based".to_string()));
        }
        if sites.is_empty() {
            return Err(XyError::range("empty site set".to_string()));
        }
        Ok(SiteSet(sites))
    }

    pub fn full(n: usize) -> Self {
        SiteSet((1..=n).collect())
    }

    pub fn sites(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.0.binary_search(&j).is_ok()
    }

    pub fn check_in(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&m) if m > n => Err(XyError::range(format!("site {m} outside [1,{n}]"))),
            _ => Ok(()),
        }
    }

    /// Complement within `[1, n]`.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        (1..=n).filter(|j| !self.contains(*j)).collect()
    }

    /// `d(S, T) = min |s - t|`.
    pub fn distance_to(&self, other: &SiteSet) -> usize {
        let mut d = usize::MAX;
        for &s in &self.0 {
            for &t in other.sites() {
                d = d.min(s.abs_diff(t));
            }
        }
        d
    }
}

impl From<Subinterval> for SiteSet {
    fn from(iv: Subinterval) -> Self {
        SiteSet(iv.sites().collect())
    }
}

/// Decomposition of `[1, n]` into consecutive blocks `Lambda_1 .. Lambda_m`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Partition {
    blocks: Vec<Subinterval>,
}

impl Partition {
    /// From consecutive blocks covering `[1, n]` without gaps.
    pub fn from_blocks(blocks: Vec<Subinterval>, n: usize) -> Result<Self> {
        if blocks.is_empty() {
            return Err(XyError::config("partition needs at least one block"));
        }
        let mut next = 1;
        for b in &blocks {
            if b.a != next {
                return Err(XyError::config(format!(
                    "partition blocks not consecutive at site {next}"
                )));
            }
            next = b.b + 1;
        }
        if next != n + 1 {
            return Err(XyError::config(format!(
                "partition covers [1,{}], chain has n = {n}",
                next - 1
            )));
        }
        Ok(Partition { blocks })
    }

    /// Paper-style cut points `1 = r_0 < r_1 < ... < r_m = n`; block k < m is
    /// `[r_{k-1}, r_k - 1]`, the final block is `[r_{m-1}, r_m]`.
    pub fn from_cut_points(cuts: &[usize], n: usize) -> Result<Self> {
        if cuts.len() < 2 || cuts[0] != 1 || *cuts.last().unwrap() != n {
            return Err(XyError::config(
                "cut points must run from 1 to n with at least one interval",
            ));
        }
        if !cuts.windows(2).all(|w| w[0] < w[1]) && n > 1 {
            return Err(XyError::config("cut points must be strictly increasing"));
        }
        let m = cuts.len() - 1;
        let mut blocks = Vec::with_capacity(m);
        for k in 1..=m {
            let hi = if k < m { cuts[k] - 1 } else { cuts[k] };
            blocks.push(Subinterval::new(cuts[k - 1], hi)?);
        }
        Partition::from_blocks(blocks, n)
    }

    /// Whole chain as a single block (m = 1).
    pub fn whole(n: usize) -> Self {
        Partition {
            blocks: vec![Subinterval { a: 1, b: n }],
        }
    }

    /// All singleton blocks (m = n). Not reachable through strictly
    /// increasing cut points; provided directly.
    pub fn singletons(n: usize) -> Self {
        Partition {
            blocks: (1..=n).map(|j| Subinterval { a: j, b: j }).collect(),
        }
    }

    /// Two blocks split after site `split`.
    pub fn two_blocks(n: usize, split: usize) -> Result<Self> {
        Partition::from_blocks(
            vec![Subinterval::new(1, split)?, Subinterval::new(split + 1, n)?],
            n,
        )
    }

    pub fn blocks(&self) -> &[Subinterval] {
        &self.blocks
    }

    pub fn m(&self) -> usize {
        self.blocks.len()
    }

    pub fn n(&self) -> usize {
        self.blocks.last().unwrap().b
    }
}

/// Which effective Hamiltonian a matrix (or its eigensystem) represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flavor {
    /// `A`: n x n Jacobi matrix of the isotropic chain.
    IsotropicA,
    /// `M`: 2n x 2n block-tridiagonal matrix of the general chain.
    AnisotropicM,
}

/// Dense real-symmetric storage of `A` or `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix {
    n: usize,
    flavor: Flavor,
    mat: DMatrix<f64>,
}

impl BlockMatrix {
    /// Number of chain sites.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    /// Matrix dimension: n for flavor A, 2n for flavor M.
    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }
}

/// The Jacobi matrix `A` with diagonal `-nu_j` and off-diagonal `mu_j`.
/// `gamma` is ignored; the caller asserts isotropic semantics.
pub fn build_isotropic(params: &ChainParameters) -> BlockMatrix {
    let n = params.n();
    let mut mat = DMatrix::zeros(n, n);
    for j in 0..n {
        mat[(j, j)] = -params.nu[j];
    }
    for j in 0..n - 1 {
        mat[(j, j + 1)] = params.mu[j];
        mat[(j + 1, j)] = params.mu[j];
    }
    BlockMatrix {
        n,
        flavor: Flavor::IsotropicA,
        mat,
    }
}

/// The 2n x 2n effective Hamiltonian `M` with diagonal blocks `-nu_j sz`,
/// upper blocks `mu_j S(gamma_j)` and lower blocks `mu_j S(gamma_j)^T`.
pub fn build_anisotropic(params: &ChainParameters) -> BlockMatrix {
    let n = params.n();
    let mut mat = DMatrix::zeros(2 * n, 2 * n);
    for j in 0..n {
        mat[(2 * j, 2 * j)] = -params.nu[j];
        mat[(2 * j + 1, 2 * j + 1)] = params.nu[j];
    }
    for j in 0..n - 1 {
        let (m, g) = (params.mu[j], params.gamma[j]);
        // S(g) = [[1, g], [-g, -1]] scaled by mu_j, and its transpose below.
        let (r, c) = (2 * j, 2 * j + 2);
        mat[(r, c)] = m;
        mat[(r, c + 1)] = m * g;
        mat[(r + 1, c)] = -m * g;
        mat[(r + 1, c + 1)] = -m;
        mat[(c, r)] = m;
        mat[(c + 1, r)] = m * g;
        mat[(c, r + 1)] = -m * g;
        mat[(c + 1, r + 1)] = -m;
    }
    BlockMatrix {
        n,
        flavor: Flavor::AnisotropicM,
        mat,
    }
}

/// Principal submatrix on the sites of `block`: one row/column per site for
/// flavor A, the full 2x2 block per site for flavor M.
pub fn restrict(matrix: &BlockMatrix, block: Subinterval) -> Result<BlockMatrix> {
    block.check_in(matrix.n)?;
    let (a, b) = (block.a - 1, block.b - 1);
    let (lo, len) = match matrix.flavor {
        Flavor::IsotropicA => (a, b - a + 1),
        Flavor::AnisotropicM => (2 * a, 2 * (b - a + 1)),
    };
    Ok(BlockMatrix {
        n: block.len(),
        flavor: matrix.flavor,
        mat: matrix.mat.view((lo, lo), (len, len)).into_owned(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_distribution_sampling() {
        let spec = DisorderSpec {
            mu: Distribution::Constant { value: 1.0 },
            gamma: Distribution::Constant { value: 0.0 },
            nu: Distribution::Constant { value: 0.5 },
            seed: 0,
        };
        let p = sample_parameters(&spec, 3).unwrap();
        assert_eq!(p.mu, vec![1.0, 1.0]);
        assert_eq!(p.gamma, vec![0.0, 0.0]);
        assert_eq!(p.nu, vec![0.5, 0.5, 0.5]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let spec = DisorderSpec {
            mu: Distribution::Uniform { low: 0.0, high: 4.0 },
            gamma: Distribution::Uniform { low: -0.5, high: 0.5 },
            nu: Distribution::Uniform { low: 0.0, high: 4.0 },
            seed: 42,
        };
        let p1 = sample_parameters(&spec, 10).unwrap();
        let p2 = sample_parameters(&spec, 10).unwrap();
        assert_eq!(p1, p2);
    }

    #[test]
    fn parameter_streams_are_independent() {
        // Changing the nu distribution must not change the mu draw.
        let spec1 = DisorderSpec {
            mu: Distribution::Uniform { low: 0.0, high: 1.0 },
            gamma: Distribution::Constant { value: 0.0 },
            nu: Distribution::Uniform { low: 0.0, high: 4.0 },
            seed: 9,
        };
        let spec2 = DisorderSpec {
            nu: Distribution::TwoPoint { v1: 1.0, v2: -1.0, p: 0.5 },
            ..spec1
        };
        let p1 = sample_parameters(&spec1, 20).unwrap();
        let p2 = sample_parameters(&spec2, 20).unwrap();
        assert_eq!(p1.mu, p2.mu);
        assert_eq!(p1.gamma, p2.gamma);
        assert_ne!(p1.nu, p2.nu);
    }

    #[test]
    fn two_point_law_of_large_numbers() {
        let spec = DisorderSpec {
            mu: Distribution::Constant { value: 1.0 },
            gamma: Distribution::Constant { value: 0.0 },
            nu: Distribution::TwoPoint { v1: 1.0, v2: -1.0, p: 0.5 },
            seed: 7,
        };
        let n = 100_000;
        let p = sample_parameters(&spec, n).unwrap();
        let mean = p.nu.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 0.02, "sample mean {mean} too far from 0");
    }

    #[test]
    fn invalid_distributions_rejected() {
        assert!(Distribution::Uniform { low: 2.0, high: 1.0 }.validate().is_err());
        assert!(Distribution::TwoPoint { v1: 0.0, v2: 1.0, p: 1.5 }.validate().is_err());
        assert!(Distribution::Constant { value: f64::NAN }.validate().is_err());
    }

    #[test]
    fn jacobi_matrix_entries() {
        let p = ChainParameters::new(vec![1.0], vec![0.0], vec![0.0, 0.0]).unwrap();
        let a = build_isotropic(&p);
        assert_eq!(a.matrix().as_slice(), &[0.0, 1.0, 1.0, 0.0]);

        let p = ChainParameters::new(vec![], vec![], vec![2.0]).unwrap();
        assert_eq!(build_isotropic(&p).matrix()[(0, 0)], -2.0);

        let p = ChainParameters::new(vec![1.0, 2.0], vec![0.0, 0.0], vec![3.0, 4.0, 5.0]).unwrap();
        let a = build_isotropic(&p);
        let want = DMatrix::from_row_slice(
            3,
            3,
            &[-3.0, 1.0, 0.0, 1.0, -4.0, 2.0, 0.0, 2.0, -5.0],
        );
        assert_eq!(a.matrix(), &want);
    }

    #[test]
    fn anisotropic_single_site() {
        let p = ChainParameters::new(vec![], vec![], vec![2.0]).unwrap();
        let m = build_anisotropic(&p);
        assert_eq!(m.matrix().as_slice(), &[-2.0, 0.0, 0.0, 2.0]);
    }

    #[test]
    fn anisotropic_off_diagonal_block() {
        let p = ChainParameters::new(vec![1.0], vec![0.3], vec![0.0, 0.0]).unwrap();
        let m = build_anisotropic(&p);
        let mm = m.matrix();
        assert_eq!(mm[(0, 2)], 1.0);
        assert_eq!(mm[(0, 3)], 0.3);
        assert_eq!(mm[(1, 2)], -0.3);
        assert_eq!(mm[(1, 3)], -1.0);
        // exact symmetry of stored entries
        assert_eq!(mm.transpose(), *mm);
    }

    #[test]
    fn particle_hole_symmetry_exact() {
        let spec = DisorderSpec {
            mu: Distribution::Uniform { low: 0.5, high: 1.5 },
            gamma: Distribution::Uniform { low: -0.5, high: 0.5 },
            nu: Distribution::Uniform { low: 0.0, high: 4.0 },
            seed: 3,
        };
        let p = sample_parameters(&spec, 7).unwrap();
        let m = build_anisotropic(&p);
        let n = p.n();
        // J M J = -M with J = sx on every site, checked entrywise exactly.
        let mut j = DMatrix::zeros(2 * n, 2 * n);
        for s in 0..n {
            j[(2 * s, 2 * s + 1)] = 1.0;
            j[(2 * s + 1, 2 * s)] = 1.0;
        }
        let lhs = &j * m.matrix() * &j;
        assert_eq!(lhs, -m.matrix());
    }

    #[test]
    fn restriction_reads_off_submatrix() {
        let p = ChainParameters::new(vec![1.0, 2.0], vec![0.0, 0.0], vec![3.0, 4.0, 5.0]).unwrap();
        let a = build_isotropic(&p);
        let full = restrict(&a, Subinterval::new(1, 3).unwrap()).unwrap();
        assert_eq!(full.matrix(), a.matrix());
        let sub = restrict(&a, Subinterval::new(2, 3).unwrap()).unwrap();
        let want = DMatrix::from_row_slice(2, 2, &[-4.0, 2.0, 2.0, -5.0]);
        assert_eq!(sub.matrix(), &want);

        let pm = ChainParameters::new(vec![1.0], vec![0.2], vec![1.5, 2.5]).unwrap();
        let m = build_anisotropic(&pm);
        let one = restrict(&m, Subinterval::new(1, 1).unwrap()).unwrap();
        assert_eq!(one.matrix().as_slice(), &[-1.5, 0.0, 0.0, 1.5]);
        assert!(restrict(&m, Subinterval::new(2, 3).unwrap()).is_err());
    }

    #[test]
    fn restrict_commutes_with_build() {
        let spec = DisorderSpec {
            mu: Distribution::Uniform { low: 0.5, high: 1.5 },
            gamma: Distribution::Uniform { low: -0.5, high: 0.5 },
            nu: Distribution::Uniform { low: 0.0, high: 4.0 },
            seed: 11,
        };
        let p = sample_parameters(&spec, 9).unwrap();
        let block = Subinterval::new(3, 7).unwrap();
        let direct = build_anisotropic(&p.restrict(block).unwrap());
        let restricted = restrict(&build_anisotropic(&p), block).unwrap();
        assert_eq!(direct.matrix(), restricted.matrix());
    }

    #[test]
    fn partition_conventions() {
        let part = Partition::from_cut_points(&[1, 4, 6], 6).unwrap();
        assert_eq!(
            part.blocks(),
            &[Subinterval { a: 1, b: 3 }, Subinterval { a: 4, b: 6 }]
        );
        let whole = Partition::whole(5);
        assert_eq!(whole.m(), 1);
        assert_eq!(whole.blocks()[0], Subinterval { a: 1, b: 5 });
        let single = Partition::singletons(3);
        assert_eq!(single.m(), 3);
        assert!(Partition::from_cut_points(&[1, 3], 6).is_err());
        assert!(Partition::from_cut_points(&[2, 6], 6).is_err());
    }

    #[test]
    fn site_set_basics() {
        let s = SiteSet::new(vec![5, 2, 5, 9]).unwrap();
        assert_eq!(s.sites(), &[2, 5, 9]);
        assert!(s.contains(5) && !s.contains(3));
        let t = SiteSet::from(Subinterval::new(11, 12).unwrap());
        assert_eq!(s.distance_to(&t), 2);
        assert!(SiteSet::new(vec![0, 1]).is_err());
        assert!(s.check_in(8).is_err());
    }
}
