//! Disorder-ensemble execution: deterministic seeding, parallel
//! realization runs, sup-over-time/pattern aggregation, disorder averaging,
//! and the transport / area-law verdicts.
//!
//! Determinism contract: realization `r` draws its parameters from a
//! sub-seed derived from `(master seed, r)` by a counter scheme, so any
//! slot can be re-run in isolation; results are collected into slots
//! indexed by `r` and every average runs in slot order afterwards.
//! Output is byte-identical at any worker count.
//!
//! Realizations whose restricted one-particle spectra fall below the
//! simplicity gap are rejected: the slot stays empty and is counted, never
//! resampled (resampling would bias the ensemble toward non-degenerate
//! configurations).

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    EigencorrelatorConfig, EntanglementConfig, ExperimentConfig, FlavorSpec, TransportConfig,
};
use crate::dynamics::{density_snapshot, DensityProfile, TimeGrid};
use crate::entanglement::{evolved_entropy_sweep, OccupationPattern, SweepRow};
use crate::error::{Result, XyError};
use crate::model::{build_anisotropic, build_isotropic, pattern_rng, sample_parameters, SiteSet};
use crate::spectral::{
    diagonalize, eigencorrelator, fit_decay, CorrelatorProfile, DecayFit, DecayModel,
};

/// Sub-seed of realization `index` under `master`: splitmix64 of the
/// counter, so adding realizations never perturbs earlier ones.
pub fn realization_seed(master: u64, index: usize) -> u64 {
    let mut z = master.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mean / standard error / max of the accepted per-realization scalars.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalarAggregate {
    pub mean: f64,
    pub std_error: f64,
    pub max: f64,
    pub count: usize,
}

impl ScalarAggregate {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(XyError::numeric(
                "no accepted realizations to aggregate".to_string(),
            ));
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let var = if count > 1 {
            values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (count - 1) as f64
        } else {
            0.0
        };
        let std_error = (var / count as f64).sqrt();
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok(ScalarAggregate {
            mean,
            std_error,
            max,
            count,
        })
    }
}

/// Run `realizations` independent jobs in parallel, mapping degenerate
/// spectra to empty slots and keeping everything else an error.
fn run_slots<T, F>(realizations: usize, master: u64, job: F) -> Result<(Vec<Option<T>>, usize)>
where
    T: Send,
    F: Fn(usize, u64) -> Result<T> + Sync,
{
    let slots: Vec<Result<Option<T>>> = (0..realizations)
        .into_par_iter()
        .map(|r| {
            let seed = realization_seed(master, r);
            match job(r, seed) {
                Ok(v) => Ok(Some(v)),
                Err(XyError::Degenerate { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut out = Vec::with_capacity(realizations);
    let mut rejected = 0;
    for s in slots {
        let v = s?;
        if v.is_none() {
            rejected += 1;
        }
        out.push(v);
    }
    if rejected == realizations {
        return Err(XyError::numeric(format!(
            "all {realizations} realizations rejected as degenerate"
        )));
    }
    if rejected * 100 > realizations {
        eprintln!(
            "warning: {rejected}/{realizations} realizations rejected (degenerate spectra); \
             expected 0 for absolutely continuous field distributions"
        );
    }
    Ok((out, rejected))
}

// ---------------------------------------------------------------------------
// transport experiment
// ---------------------------------------------------------------------------

/// Per-realization transport record.
#[derive(Debug, Clone)]
pub struct TransportRealization {
    pub id: usize,
    pub seed: u64,
    /// `<N_S>_t` series per target, indexed `[target][grid point]`.
    pub series: Vec<Vec<f64>>,
    /// Running max over the grid per target, with the attaining time.
    pub sup: Vec<(f64, f64)>,
    /// Density snapshots `[grid point][site]`.
    pub densities: Vec<Vec<f64>>,
    /// This realization's eigencorrelator matrix.
    pub q: DMatrix<f64>,
    /// Per-target RHS assembled from this realization's own Q (domination).
    pub rhs_own: Vec<f64>,
    /// Estimator domination `<N_S>_t <= rhs_own` at every grid point.
    pub domination_ok: bool,
}

/// Aggregated transport ensemble.
#[derive(Debug, Clone)]
pub struct TransportEnsemble {
    pub config: TransportConfig,
    pub grid: TimeGrid,
    pub records: Vec<Option<TransportRealization>>,
    pub rejected: usize,
    /// Mean density profile `[grid point][site]` over accepted slots.
    pub mean_density: Vec<Vec<f64>>,
    /// Disorder-averaged correlator profile.
    pub correlator: CorrelatorProfile,
    pub fit_exponential: Option<DecayFit>,
    pub fit_power: Option<DecayFit>,
    /// Aggregate of `sup_t <N_S>_t` per target.
    pub sup_aggregate: Vec<ScalarAggregate>,
}

fn transport_realization(
    cfg: &TransportConfig,
    id: usize,
    seed: u64,
    grid: &TimeGrid,
    profile: &DensityProfile,
    targets: &[SiteSet],
) -> Result<TransportRealization> {
    let spec = cfg.disorder.to_spec(seed);
    let params = sample_parameters(&spec, cfg.n)?;
    let eig = diagonalize(&build_isotropic(&params))?;
    let q = eigencorrelator(&eig);

    let rhs_own: Vec<f64> = targets
        .iter()
        .map(|s| {
            s.sites()
                .iter()
                .map(|&j| {
                    (1..=cfg.n)
                        .map(|k| profile.eta()[k - 1] * q[(j - 1, k - 1)])
                        .sum::<f64>()
                })
                .sum()
        })
        .collect();

    let mut series = vec![Vec::with_capacity(grid.len()); targets.len()];
    let mut densities = Vec::with_capacity(grid.len());
    let mut sup = vec![(f64::NEG_INFINITY, 0.0); targets.len()];
    let mut domination_ok = true;
    for &t in grid.times() {
        let snapshot = density_snapshot(&eig, profile, t)?;
        for (ti, s) in targets.iter().enumerate() {
            let ns: f64 = s.sites().iter().map(|&j| snapshot[j - 1]).sum();
            if ns > rhs_own[ti] {
                domination_ok = false;
            }
            if ns > sup[ti].0 {
                sup[ti] = (ns, t);
            }
            series[ti].push(ns);
        }
        densities.push(snapshot);
    }

    Ok(TransportRealization {
        id,
        seed,
        series,
        sup,
        densities,
        q,
        rhs_own,
        domination_ok,
    })
}

pub fn run_transport(cfg: &TransportConfig) -> Result<TransportEnsemble> {
    cfg.validate()?;
    let grid = cfg.grid.to_grid()?;
    let profile = cfg.profile.to_profile(cfg.n)?;
    let targets: Vec<SiteSet> = cfg
        .targets
        .iter()
        .map(|t| SiteSet::new(t.clone()))
        .collect::<Result<_>>()?;

    let (records, rejected) = run_slots(cfg.realizations, cfg.seed, |id, seed| {
        transport_realization(cfg, id, seed, &grid, &profile, &targets)
    })?;

    // slot-order averages
    let accepted: Vec<&TransportRealization> = records.iter().flatten().collect();
    let m = accepted.len() as f64;
    let mut mean_density = vec![vec![0.0; cfg.n]; grid.len()];
    let mut mean_q = DMatrix::zeros(cfg.n, cfg.n);
    for rec in &accepted {
        for (ti, row) in rec.densities.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                mean_density[ti][j] += v / m;
            }
        }
        mean_q += &rec.q / m;
    }
    let mut correlator = CorrelatorProfile::from_mean_q(&mean_q, accepted.len());
    let window = cfg.fit_window.unwrap_or((1, cfg.n / 2));
    let fit_exponential = fit_decay(&correlator, DecayModel::Exponential, window).ok();
    let fit_power = fit_decay(&correlator, DecayModel::Power, window).ok();
    correlator.fit = fit_exponential;

    let sup_aggregate: Vec<ScalarAggregate> = (0..targets.len())
        .map(|ti| {
            let vals: Vec<f64> = accepted.iter().map(|r| r.sup[ti].0).collect();
            ScalarAggregate::from_values(&vals)
        })
        .collect::<Result<_>>()?;

    Ok(TransportEnsemble {
        config: cfg.clone(),
        grid,
        records,
        rejected,
        mean_density,
        correlator,
        fit_exponential,
        fit_power,
        sup_aggregate,
    })
}

/// Verdict of the transport theorem on one ensemble.
#[derive(Debug, Clone, Serialize)]
pub struct TransportVerdict {
    pub per_target: Vec<TargetVerdict>,
    /// Per-realization estimator domination held in every slot.
    pub domination_ok: bool,
    /// Ensemble means decrease with distance.
    pub monotone_ok: bool,
    /// Distance-decay exponent comparison (needs >= 3 targets at distinct
    /// positive distances and a power fit of Q).
    pub exponent: Option<ExponentCheck>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TargetVerdict {
    pub sites: Vec<usize>,
    pub distance: Option<usize>,
    pub mean_sup: f64,
    pub std_error: f64,
    /// `sum_{j in S} sum_k eta_k Q(|j-k|)` from the ensemble-averaged
    /// profile.
    pub rhs: f64,
    /// Domain-wall tail bound when the geometry admits it.
    pub rhs_tail: Option<f64>,
    pub bound_ok: bool,
}

/// Log-log decay comparison: the empirical mean must fall at least as fast
/// as `(beta - 2)` from the correlator's power fit over the same distance
/// range, within two standard errors of the empirical slope.
#[derive(Debug, Clone, Serialize)]
pub struct ExponentCheck {
    pub empirical_exponent: f64,
    pub empirical_se: f64,
    pub beta_minus_two: f64,
    pub ok: bool,
}

pub fn check_transport_theorem(ens: &TransportEnsemble) -> Result<TransportVerdict> {
    let profile = ens.config.profile.to_profile(ens.config.n)?;
    let wall = profile.as_domain_wall().map(SiteSet::from);
    let targets: Vec<SiteSet> = ens
        .config
        .targets
        .iter()
        .map(|t| SiteSet::new(t.clone()))
        .collect::<Result<_>>()?;

    let mut per_target = Vec::new();
    for (ti, s) in targets.iter().enumerate() {
        let bound = crate::dynamics::transport_bound_rhs(&profile, s, &ens.correlator);
        let agg = &ens.sup_aggregate[ti];
        per_target.push(TargetVerdict {
            sites: s.sites().to_vec(),
            distance: wall.as_ref().map(|w| s.distance_to(w)),
            mean_sup: agg.mean,
            std_error: agg.std_error,
            rhs: bound.direct,
            rhs_tail: bound.domain_wall_tail,
            bound_ok: agg.mean <= bound.direct,
        })
    }

    let domination_ok = ens.records.iter().flatten().all(|r| r.domination_ok);

    // monotone decrease along the configured target order
    let monotone_ok = per_target
        .windows(2)
        .all(|w| w[1].mean_sup <= w[0].mean_sup);

    let exponent = exponent_check(&per_target, ens);

    let pass = domination_ok
        && monotone_ok
        && per_target.iter().all(|t| t.bound_ok)
        && exponent.as_ref().is_none_or(|e| e.ok);
    Ok(TransportVerdict {
        per_target,
        domination_ok,
        monotone_ok,
        exponent,
        pass,
    })
}

fn exponent_check(targets: &[TargetVerdict], ens: &TransportEnsemble) -> Option<ExponentCheck> {
    let pts: Vec<(f64, f64, f64)> = targets
        .iter()
        .filter_map(|t| {
            let d = t.distance? as f64;
            if d > 0.0 && t.mean_sup > 0.0 {
                Some((d, t.mean_sup, t.std_error))
            } else {
                None
            }
        })
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let d_min = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min) as usize;
    let d_max = pts.iter().map(|p| p.0).fold(0.0, f64::max) as usize;
    // fit Q as a power law over the same distance range so both exponents
    // describe the same scale
    let beta = fit_decay(&ens.correlator, DecayModel::Power, (d_min, d_max))
        .ok()?
        .rate;

    // log-log least squares with delta-method variances on the means
    let xs: Vec<f64> = pts.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let vars: Vec<f64> = pts.iter().map(|p| (p.2 / p.1).powi(2).max(1e-30)).collect();
    let xbar = xs.iter().sum::<f64>() / xs.len() as f64;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let slope: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - xbar) * y)
        .sum::<f64>()
        / sxx;
    let var_slope: f64 = xs
        .iter()
        .zip(&vars)
        .map(|(x, v)| ((x - xbar) / sxx).powi(2) * v)
        .sum();
    let empirical_exponent = -slope;
    let empirical_se = var_slope.sqrt();
    let ok = empirical_exponent >= (beta - 2.0) - 2.0 * empirical_se;
    Some(ExponentCheck {
        empirical_exponent,
        empirical_se,
        beta_minus_two: beta - 2.0,
        ok,
    })
}

// ---------------------------------------------------------------------------
// entanglement experiment
// ---------------------------------------------------------------------------

/// Pattern battery for one realization: exhaustive below the threshold,
/// otherwise the three fixed patterns plus seeded random ones.
pub fn pattern_battery(
    n: usize,
    spec: &crate::config::BatterySpec,
    seed: u64,
) -> Vec<OccupationPattern> {
    if n <= spec.exhaustive_below {
        return (0u64..(1 << n))
            .map(|mask| {
                OccupationPattern::new((0..n).map(|j| ((mask >> j) & 1) as u8).collect()).unwrap()
            })
            .collect();
    }
    let mut battery = vec![
        OccupationPattern::zeros(n),
        OccupationPattern::ones(n),
        OccupationPattern::alternating(n),
    ];
    let mut rng = pattern_rng(seed);
    for _ in 0..spec.random_patterns {
        battery.push(OccupationPattern::random(&mut rng, n));
    }
    battery
}

/// Per-realization entanglement record.
#[derive(Debug, Clone)]
pub struct EntanglementRealization {
    pub id: usize,
    pub seed: u64,
    pub rows: Vec<SweepRow>,
    pub sup_entropy: f64,
    pub sup_pattern: usize,
    pub sup_t: f64,
}

/// One chain size of the sweep.
#[derive(Debug, Clone)]
pub struct SizeResult {
    pub n: usize,
    pub records: Vec<Option<EntanglementRealization>>,
    pub rejected: usize,
    pub sup_aggregate: ScalarAggregate,
}

/// Aggregated entanglement ensemble over the size sweep, with the optional
/// clean-chain control.
#[derive(Debug, Clone)]
pub struct EntanglementEnsemble {
    pub config: EntanglementConfig,
    pub grid: TimeGrid,
    pub sizes: Vec<SizeResult>,
    pub control: Option<SizeResult>,
}

fn entanglement_size(
    cfg: &EntanglementConfig,
    n: usize,
    realizations: usize,
    seed: u64,
    grid: &TimeGrid,
    disorder: &crate::config::DisorderTriple,
) -> Result<SizeResult> {
    let partition = cfg.partition.to_partition(n)?;
    let block = cfg.cut.to_block(n)?;
    let (records, rejected) = run_slots(realizations, seed, |id, sub_seed| {
        let params = sample_parameters(&disorder.to_spec(sub_seed), n)?;
        let battery = pattern_battery(n, &cfg.battery, sub_seed);
        let sweep = evolved_entropy_sweep(&params, &partition, &battery, block, grid)?;
        Ok(EntanglementRealization {
            id,
            seed: sub_seed,
            rows: sweep.rows,
            sup_entropy: sweep.sup_entropy,
            sup_pattern: sweep.sup_pattern,
            sup_t: sweep.sup_t,
        })
    })?;
    let vals: Vec<f64> = records.iter().flatten().map(|r| r.sup_entropy).collect();
    let sup_aggregate = ScalarAggregate::from_values(&vals)?;
    Ok(SizeResult {
        n,
        records,
        rejected,
        sup_aggregate,
    })
}

pub fn run_entanglement(cfg: &EntanglementConfig) -> Result<EntanglementEnsemble> {
    cfg.validate()?;
    let grid = cfg.grid.to_grid()?;
    let mut sizes = Vec::new();
    for &n in &cfg.sizes {
        sizes.push(entanglement_size(
            cfg,
            n,
            cfg.realizations,
            cfg.seed,
            &grid,
            &cfg.disorder,
        )?);
    }
    let control = match &cfg.control {
        Some(ctrl) => {
            let n = *cfg.sizes.iter().max().unwrap();
            let disorder = crate::config::DisorderTriple {
                mu: crate::model::Distribution::Constant { value: 1.0 },
                gamma: crate::model::Distribution::Constant { value: 0.0 },
                nu: crate::model::Distribution::Constant { value: ctrl.nu },
            };
            Some(entanglement_size(
                cfg,
                n,
                ctrl.realizations,
                cfg.seed,
                &grid,
                &disorder,
            )?)
        }
        None => None,
    };
    Ok(EntanglementEnsemble {
        config: cfg.clone(),
        grid,
        sizes,
        control,
    })
}

/// Area-law verdict: the size sweep of `E[sup entropy]` is flat, and the
/// clean control sits above the disordered ensemble.
#[derive(Debug, Clone, Serialize)]
pub struct AreaLawVerdict {
    pub smallest_n: usize,
    pub largest_n: usize,
    pub smallest_mean: f64,
    pub smallest_se: f64,
    pub largest_mean: f64,
    pub largest_se: f64,
    /// `smallest_mean + 2*combined SE + 10% of smallest_mean`.
    pub threshold: f64,
    pub flat_ok: bool,
    pub control: Option<ControlVerdict>,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ControlVerdict {
    pub control_mean: f64,
    pub disordered_max: f64,
    pub ok: bool,
}

pub fn check_area_law(ens: &EntanglementEnsemble) -> Result<AreaLawVerdict> {
    if ens.sizes.len() < 3 {
        return Err(XyError::config(
            "area-law flatness test needs a sweep over at least 3 sizes",
        ));
    }
    let smallest = ens.sizes.iter().min_by_key(|s| s.n).unwrap();
    let largest = ens.sizes.iter().max_by_key(|s| s.n).unwrap();
    let (m_s, se_s) = (
        smallest.sup_aggregate.mean,
        smallest.sup_aggregate.std_error,
    );
    let (m_l, se_l) = (largest.sup_aggregate.mean, largest.sup_aggregate.std_error);
    let threshold = m_s + 2.0 * se_s.hypot(se_l) + 0.10 * m_s;
    let flat_ok = m_l <= threshold;

    let control = ens.control.as_ref().map(|c| {
        let disordered_max = largest.sup_aggregate.max;
        ControlVerdict {
            control_mean: c.sup_aggregate.mean,
            disordered_max,
            ok: c.sup_aggregate.mean > disordered_max,
        }
    });

    let pass = flat_ok && control.as_ref().is_none_or(|c| c.ok);
    Ok(AreaLawVerdict {
        smallest_n: smallest.n,
        largest_n: largest.n,
        smallest_mean: m_s,
        smallest_se: se_s,
        largest_mean: m_l,
        largest_se: se_l,
        threshold,
        flat_ok,
        control,
        pass,
    })
}

// ---------------------------------------------------------------------------
// eigencorrelator experiment
// ---------------------------------------------------------------------------

#[derive(Debug, Clone)]
pub struct CorrelatorRealization {
    pub id: usize,
    pub seed: u64,
    pub q: DMatrix<f64>,
}

#[derive(Debug, Clone)]
pub struct CorrelatorEnsemble {
    pub config: EigencorrelatorConfig,
    pub records: Vec<Option<CorrelatorRealization>>,
    pub rejected: usize,
    pub profile: CorrelatorProfile,
    pub fit_exponential: Option<DecayFit>,
    pub fit_power: Option<DecayFit>,
}

pub fn run_eigencorrelator(cfg: &EigencorrelatorConfig) -> Result<CorrelatorEnsemble> {
    cfg.validate()?;
    let (records, rejected) = run_slots(cfg.realizations, cfg.seed, |id, seed| {
        let params = sample_parameters(&cfg.disorder.to_spec(seed), cfg.n)?;
        let matrix = match cfg.flavor {
            FlavorSpec::IsotropicA => build_isotropic(&params),
            FlavorSpec::AnisotropicM => build_anisotropic(&params),
        };
        let eig = diagonalize(&matrix)?;
        Ok(CorrelatorRealization {
            id,
            seed,
            q: eigencorrelator(&eig),
        })
    })?;

    let accepted: Vec<&CorrelatorRealization> = records.iter().flatten().collect();
    let m = accepted.len() as f64;
    let mut mean_q = DMatrix::zeros(cfg.n, cfg.n);
    for rec in &accepted {
        mean_q += &rec.q / m;
    }
    let mut profile = CorrelatorProfile::from_mean_q(&mean_q, accepted.len());
    let window = cfg.window();
    let fit_exponential = fit_decay(&profile, DecayModel::Exponential, window).ok();
    let fit_power = fit_decay(&profile, DecayModel::Power, window).ok();
    profile.fit = fit_exponential;
    Ok(CorrelatorEnsemble {
        config: cfg.clone(),
        records,
        rejected,
        profile,
        fit_exponential,
        fit_power,
    })
}

// ---------------------------------------------------------------------------
// dispatch
// ---------------------------------------------------------------------------

/// Result of a full ensemble run, by experiment kind.
pub enum EnsembleResult {
    Transport(Box<TransportEnsemble>),
    Entanglement(Box<EntanglementEnsemble>),
    Eigencorrelator(Box<CorrelatorEnsemble>),
}

/// Run the experiment described by a config. Deterministic given the
/// config, independent of worker count.
pub fn run_ensemble(config: &ExperimentConfig) -> Result<EnsembleResult> {
    match config {
        ExperimentConfig::Transport(c) => {
            Ok(EnsembleResult::Transport(Box::new(run_transport(c)?)))
        }
        ExperimentConfig::Entanglement(c) => Ok(EnsembleResult::Entanglement(Box::new(
            run_entanglement(c)?,
        ))),
        ExperimentConfig::Eigencorrelator(c) => Ok(EnsembleResult::Eigencorrelator(Box::new(
            run_eigencorrelator(c)?,
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{
        BatterySpec, CutSpec, DisorderTriple, GridSpec, PartitionSpec, ProfileSpec,
    };
    use crate::model::Distribution;
    use approx::assert_abs_diff_eq;

    fn small_grid() -> GridSpec {
        GridSpec {
            t_min: 0.05,
            t_max: 20.0,
            points: 12,
        }
    }

    fn uniform_field() -> DisorderTriple {
        DisorderTriple {
            mu: Distribution::Constant { value: 1.0 },
            gamma: Distribution::Constant { value: 0.0 },
            nu: Distribution::Uniform { low: 0.0, high: 4.0 },
        }
    }

    fn transport_cfg() -> TransportConfig {
        TransportConfig {
            n: 16,
            realizations: 6,
            seed: 11,
            disorder: uniform_field(),
            grid: small_grid(),
            profile: ProfileSpec::DomainWall { a: 5, b: 8 },
            targets: vec![vec![11], vec![13], vec![15]],
            fit_window: None,
        }
    }

    #[test]
    fn sub_seeds_are_distinct_and_stable() {
        let a = realization_seed(42, 0);
        let b = realization_seed(42, 1);
        assert_ne!(a, b);
        assert_eq!(a, realization_seed(42, 0));
        let seeds: Vec<u64> = (0..100).map(|r| realization_seed(7, r)).collect();
        assert_eq!(
            seeds[..50],
            (0..50).map(|r| realization_seed(7, r)).collect::<Vec<_>>()[..]
        );
    }

    #[test]
    fn transport_runs_deterministically() {
        let cfg = transport_cfg();
        let a = run_transport(&cfg).unwrap();
        let b = run_transport(&cfg).unwrap();
        assert_eq!(a.rejected, 0);
        for (ra, rb) in a.records.iter().zip(&b.records) {
            let (ra, rb) = (ra.as_ref().unwrap(), rb.as_ref().unwrap());
            assert_eq!(ra.series, rb.series);
            assert_eq!(ra.sup, rb.sup);
        }
        assert_eq!(a.mean_density, b.mean_density);
        // aggregate recomputable from records
        for (ti, agg) in a.sup_aggregate.iter().enumerate() {
            let vals: Vec<f64> = a.records.iter().flatten().map(|r| r.sup[ti].0).collect();
            let re = ScalarAggregate::from_values(&vals).unwrap();
            assert_eq!(agg, &re);
        }
    }

    #[test]
    fn transport_single_constant_realization() {
        let mut cfg = transport_cfg();
        cfg.realizations = 1;
        cfg.disorder.nu = Distribution::Constant { value: 1.3 };
        let ens = run_transport(&cfg).unwrap();
        let rec = ens.records[0].as_ref().unwrap();
        assert_abs_diff_eq!(ens.sup_aggregate[0].mean, rec.sup[0].0, epsilon = 1e-15);
        assert_eq!(ens.sup_aggregate[0].count, 1);
    }

    #[test]
    fn transport_verdict_on_localized_chain() {
        let ens = run_transport(&transport_cfg()).unwrap();
        let verdict = check_transport_theorem(&ens).unwrap();
        assert!(verdict.domination_ok, "per-realization domination failed");
        for t in &verdict.per_target {
            assert!(t.bound_ok, "mean sup {} above rhs {}", t.mean_sup, t.rhs);
        }
        // strict per-step monotonicity needs ensemble statistics; at this
        // toy size only the overall decay is reliable
        let first = verdict.per_target.first().unwrap().mean_sup;
        let last = verdict.per_target.last().unwrap().mean_sup;
        assert!(last < first, "no decay with distance: {first} -> {last}");
    }

    #[test]
    fn frozen_chain_transport_is_trivial() {
        let mut cfg = transport_cfg();
        cfg.disorder.mu = Distribution::Constant { value: 0.0 };
        cfg.realizations = 2;
        let ens = run_transport(&cfg).unwrap();
        for rec in ens.records.iter().flatten() {
            for series in &rec.series {
                for &v in series {
                    assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
                }
            }
        }
        let verdict = check_transport_theorem(&ens).unwrap();
        assert!(verdict.pass);
    }

    fn entanglement_cfg() -> EntanglementConfig {
        EntanglementConfig {
            sizes: vec![8, 12, 16],
            realizations: 4,
            seed: 5,
            disorder: uniform_field(),
            grid: small_grid(),
            partition: PartitionSpec::TwoBlocks { split: None },
            cut: CutSpec::HalfChain,
            battery: BatterySpec {
                random_patterns: 4,
                exhaustive_below: 0,
            },
            // nu = 1 with blocks of 8 has an exact zero mode (every clean
            // realization rejected); 0.7 keeps the control non-degenerate
            control: Some(crate::config::ControlSpec {
                nu: 0.7,
                realizations: 2,
            }),
        }
    }

    #[test]
    fn entanglement_sweep_and_verdict() {
        let ens = run_entanglement(&entanglement_cfg()).unwrap();
        assert_eq!(ens.sizes.len(), 3);
        for s in &ens.sizes {
            assert_eq!(s.rejected, 0);
            for rec in s.records.iter().flatten() {
                // t = 0 rows are block-aligned products: zero entropy
                for row in rec.rows.iter().filter(|r| r.t == 0.0) {
                    assert_abs_diff_eq!(row.entropy_nats, 0.0, epsilon = 1e-10);
                }
                assert!(rec.sup_entropy <= (s.n / 2) as f64 * std::f64::consts::LN_2 + 1e-9);
            }
        }
        let verdict = check_area_law(&ens).unwrap();
        assert_eq!(verdict.smallest_n, 8);
        assert_eq!(verdict.largest_n, 16);
        let control = verdict.control.as_ref().unwrap();
        assert!(control.control_mean > 0.0);
    }

    #[test]
    fn entanglement_determinism() {
        let cfg = entanglement_cfg();
        let a = run_entanglement(&cfg).unwrap();
        let b = run_entanglement(&cfg).unwrap();
        for (sa, sb) in a.sizes.iter().zip(&b.sizes) {
            assert_eq!(sa.sup_aggregate, sb.sup_aggregate);
            for (ra, rb) in sa.records.iter().zip(&sb.records) {
                let (ra, rb) = (ra.as_ref().unwrap(), rb.as_ref().unwrap());
                assert_eq!(ra.rows.len(), rb.rows.len());
                for (xa, xb) in ra.rows.iter().zip(&rb.rows) {
                    assert_eq!(xa.entropy_nats.to_bits(), xb.entropy_nats.to_bits());
                }
            }
        }
    }

    #[test]
    fn area_law_needs_three_sizes() {
        let mut cfg = entanglement_cfg();
        cfg.sizes = vec![8, 12];
        let ens = run_entanglement(&cfg).unwrap();
        assert!(check_area_law(&ens).is_err());
    }

    #[test]
    fn exhaustive_battery_below_threshold() {
        let spec = BatterySpec {
            random_patterns: 4,
            exhaustive_below: 6,
        };
        assert_eq!(pattern_battery(4, &spec, 0).len(), 16);
        assert_eq!(pattern_battery(8, &spec, 0).len(), 7);
        let a = pattern_battery(8, &spec, 3);
        let b = pattern_battery(8, &spec, 3);
        assert_eq!(a, b);
    }

    #[test]
    fn correlator_ensemble_prefers_exponential() {
        let cfg = EigencorrelatorConfig {
            n: 40,
            realizations: 30,
            seed: 2,
            disorder: uniform_field(),
            flavor: FlavorSpec::IsotropicA,
            fit_window: None,
        };
        let ens = run_eigencorrelator(&cfg).unwrap();
        assert_eq!(ens.rejected, 0);
        let fe = ens.fit_exponential.unwrap();
        let fp = ens.fit_power.unwrap();
        assert!(
            fe.residual < fp.residual,
            "exponential {:.3e} should beat power {:.3e} in the localized regime",
            fe.residual,
            fp.residual
        );
        assert!(fe.rate > 0.0, "localization length must be positive");
        assert!(ens.profile.q_max[1] > ens.profile.q_max[20]);
    }

    #[test]
    fn run_ensemble_dispatch() {
        let cfg = ExperimentConfig::Transport(transport_cfg());
        match run_ensemble(&cfg).unwrap() {
            EnsembleResult::Transport(t) => assert_eq!(t.records.len(), 6),
            _ => panic!("wrong dispatch"),
        }
    }
}
