//! Command-line front end: experiment execution, the dense-oracle
//! verification suite, and plot-ready CSV/JSON emission.
//!
//! Exit codes: 0 success, 1 configuration error, 2 numeric failure,
//! 3 verdict failure (a bound was violated beyond its margins). All floats
//! in CSV files carry 17 significant digits so downstream regression
//! comparisons can be exact; JSON numbers round-trip via the shortest
//! representation. Data files are byte-reproducible from the manifest's
//! echoed config; the manifest itself carries wall-clock timestamps.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::config::{self, ExperimentConfig, RunManifest};
use crate::ensemble::{
    check_area_law, check_transport_theorem, run_eigencorrelator, run_entanglement,
    run_transport,
};
use crate::error::{Result, XyError};

/// Exit code classification for errors (verdict failures are not errors;
/// commands return code 3 themselves).
pub fn exit_code(err: &XyError) -> i32 {
    match err {
        XyError::Config(_) | XyError::Range(_) => 1,
        _ => 2,
    }
}

/// Resolve the worker count: `--threads` flag, then `XYLAB_THREADS`, then
/// all available cores. Results are identical at any setting.
pub fn init_threads(flag: Option<usize>) {
    let n = flag.or_else(|| {
        std::env::var("XYLAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

/// 17 significant digits, fixed exponent form.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

struct OutputTracker {
    dir: PathBuf,
    files: Vec<String>,
}

impl OutputTracker {
    fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(OutputTracker {
            dir: dir.to_path_buf(),
            files: Vec::new(),
        })
    }

    fn create(&mut self, name: &str) -> Result<BufWriter<fs::File>> {
        let path = self.dir.join(name);
        let file = fs::File::create(&path)?;
        self.files.push(name.to_string());
        Ok(BufWriter::new(file))
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        w.write_all(b"\n")?;
        w.flush()?;
        Ok(())
    }

    fn finish(mut self, command: &str, cfg_echo: serde_json::Value, seed: u64, started: u64) -> Result<()> {
        let manifest = RunManifest {
            command: command.to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: config::SCHEMA_VERSION,
            master_seed: seed,
            started_unix: started,
            finished_unix: now_unix(),
            outputs: {
                let mut o = self.files.clone();
                o.push("manifest.json".to_string());
                o
            },
            config: cfg_echo,
        };
        self.write_json("manifest.json", &manifest)?;
        for name in &self.files {
            if !self.dir.join(name).exists() {
                return Err(XyError::numeric(format!("output {name} missing after run")));
            }
        }
        Ok(())
    }
}

fn load_for(kind: &str, path: &Path, seed_override: Option<u64>) -> Result<ExperimentConfig> {
    let mut cfg = config::load_config(path)?;
    if let Some(seed) = seed_override {
        cfg.set_seed(seed);
    }
    if cfg.name() != kind {
        return Err(XyError::config(format!(
            "config describes a '{}' experiment, command expects '{kind}'",
            cfg.name()
        )));
    }
    Ok(cfg)
}

/// `xylab transport --config ...`: domain-wall / density-profile transport
/// with the theorem verdict.
pub fn cmd_transport(config_path: &Path, out_dir: &Path, seed_override: Option<u64>) -> Result<i32> {
    let started = now_unix();
    let cfg = load_for("transport", config_path, seed_override)?;
    let ExperimentConfig::Transport(tcfg) = &cfg else { unreachable!() };
    let ens = run_transport(tcfg)?;
    let verdict = check_transport_theorem(&ens)?;

    let mut out = OutputTracker::new(out_dir)?;

    // per-target per-realization time series
    for (ti, _) in tcfg.targets.iter().enumerate() {
        let mut w = out.create(&format!("transport_series_target{ti}.csv"))?;
        writeln!(w, "t,observable,realization_id")?;
        for rec in ens.records.iter().flatten() {
            for (k, &t) in ens.grid.times().iter().enumerate() {
                writeln!(w, "{},{},{}", fmt(t), fmt(rec.series[ti][k]), rec.id)?;
            }
        }
        w.flush()?;
    }

    // ensemble-mean density snapshots
    {
        let mut w = out.create("density_profile.csv")?;
        writeln!(w, "t,site,density")?;
        for (k, &t) in ens.grid.times().iter().enumerate() {
            for j in 1..=tcfg.n {
                writeln!(w, "{},{j},{}", fmt(t), fmt(ens.mean_density[k][j - 1]))?;
            }
        }
        w.flush()?;
    }

    write_correlator_csv(&mut out, &ens.correlator)?;

    #[derive(Serialize)]
    struct Summary<'a> {
        schema_version: u32,
        experiment: &'a str,
        seed: u64,
        realizations: usize,
        rejected: usize,
        grid_points: usize,
        sup_aggregate: &'a [crate::ensemble::ScalarAggregate],
        fit_exponential: &'a Option<crate::spectral::DecayFit>,
        fit_power: &'a Option<crate::spectral::DecayFit>,
        verdict: &'a crate::ensemble::TransportVerdict,
        config: &'a ExperimentConfig,
    }
    out.write_json(
        "summary.json",
        &Summary {
            schema_version: config::SCHEMA_VERSION,
            experiment: "transport",
            seed: tcfg.seed,
            realizations: tcfg.realizations,
            rejected: ens.rejected,
            grid_points: ens.grid.len(),
            sup_aggregate: &ens.sup_aggregate,
            fit_exponential: &ens.fit_exponential,
            fit_power: &ens.fit_power,
            verdict: &verdict,
            config: &cfg,
        },
    )?;

    out.finish("transport", serde_json::to_value(&cfg)?, tcfg.seed, started)?;
    Ok(if verdict.pass { 0 } else { 3 })
}

/// `xylab entanglement --config ...`: entropy sweep over sizes with the
/// area-law flatness verdict and the clean-chain contrast.
pub fn cmd_entanglement(
    config_path: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<i32> {
    let started = now_unix();
    let cfg = load_for("entanglement", config_path, seed_override)?;
    let ExperimentConfig::Entanglement(ecfg) = &cfg else { unreachable!() };
    let ens = run_entanglement(ecfg)?;
    // the flatness test is defined for sweeps; single-size runs just emit
    // their series and aggregates
    let verdict = if ens.sizes.len() >= 3 {
        Some(check_area_law(&ens)?)
    } else {
        None
    };

    let mut out = OutputTracker::new(out_dir)?;
    let ln2 = std::f64::consts::LN_2;
    let write_series = |out: &mut OutputTracker, name: &str, size: &crate::ensemble::SizeResult| -> Result<()> {
        let mut w = out.create(name)?;
        writeln!(
            w,
            "realization_id,pattern_id,t,entropy_nats,entropy_qubits,diagnostic_bound"
        )?;
        for rec in size.records.iter().flatten() {
            for row in &rec.rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    rec.id,
                    row.pattern_id,
                    fmt(row.t),
                    fmt(row.entropy_nats),
                    fmt(row.entropy_nats / ln2),
                    fmt(row.diagnostic)
                )?;
            }
        }
        w.flush()?;
        Ok(())
    };
    for size in &ens.sizes {
        write_series(&mut out, &format!("entropy_series_n{}.csv", size.n), size)?;
    }
    if let Some(control) = &ens.control {
        write_series(
            &mut out,
            &format!("entropy_series_control_n{}.csv", control.n),
            control,
        )?;
    }

    #[derive(Serialize)]
    struct SizeSummary {
        n: usize,
        rejected: usize,
        sup_aggregate: crate::ensemble::ScalarAggregate,
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        schema_version: u32,
        experiment: &'a str,
        seed: u64,
        realizations: usize,
        grid_points: usize,
        sizes: Vec<SizeSummary>,
        control: Option<SizeSummary>,
        verdict: &'a Option<crate::ensemble::AreaLawVerdict>,
        config: &'a ExperimentConfig,
    }
    let summarize = |s: &crate::ensemble::SizeResult| SizeSummary {
        n: s.n,
        rejected: s.rejected,
        sup_aggregate: s.sup_aggregate,
    };
    out.write_json(
        "summary.json",
        &Summary {
            schema_version: config::SCHEMA_VERSION,
            experiment: "entanglement",
            seed: ecfg.seed,
            realizations: ecfg.realizations,
            grid_points: ens.grid.len(),
            sizes: ens.sizes.iter().map(summarize).collect(),
            control: ens.control.as_ref().map(summarize),
            verdict: &verdict,
            config: &cfg,
        },
    )?;

    out.finish("entanglement", serde_json::to_value(&cfg)?, ecfg.seed, started)?;
    Ok(match &verdict {
        Some(v) if !v.pass => 3,
        _ => 0,
    })
}

fn write_correlator_csv(
    out: &mut OutputTracker,
    profile: &crate::spectral::CorrelatorProfile,
) -> Result<()> {
    let mut w = out.create("correlator.csv")?;
    writeln!(w, "r,Q_max,Q_mean,samples")?;
    for r in 0..=profile.max_distance() {
        writeln!(
            w,
            "{r},{},{},{}",
            fmt(profile.q_max[r]),
            fmt(profile.q_mean[r]),
            profile.samples
        )?;
    }
    w.flush()?;
    Ok(())
}

/// `xylab eigencorrelator --config ...`: Q(r) estimation and decay fits.
pub fn cmd_eigencorrelator(
    config_path: &Path,
    out_dir: &Path,
    seed_override: Option<u64>,
) -> Result<i32> {
    let started = now_unix();
    let cfg = load_for("eigencorrelator", config_path, seed_override)?;
    let ExperimentConfig::Eigencorrelator(ccfg) = &cfg else { unreachable!() };
    let ens = run_eigencorrelator(ccfg)?;

    let mut out = OutputTracker::new(out_dir)?;
    write_correlator_csv(&mut out, &ens.profile)?;

    #[derive(Serialize)]
    struct Fits<'a> {
        window: (usize, usize),
        exponential: &'a Option<crate::spectral::DecayFit>,
        power: &'a Option<crate::spectral::DecayFit>,
        /// Model with the lower residual, when both fits exist.
        preferred: Option<&'a str>,
    }
    let preferred = match (&ens.fit_exponential, &ens.fit_power) {
        (Some(e), Some(p)) => Some(if e.residual <= p.residual {
            "exponential"
        } else {
            "power"
        }),
        _ => None,
    };
    out.write_json(
        "fits.json",
        &Fits {
            window: ccfg.window(),
            exponential: &ens.fit_exponential,
            power: &ens.fit_power,
            preferred,
        },
    )?;

    #[derive(Serialize)]
    struct Summary<'a> {
        schema_version: u32,
        experiment: &'a str,
        seed: u64,
        realizations: usize,
        rejected: usize,
        config: &'a ExperimentConfig,
    }
    out.write_json(
        "summary.json",
        &Summary {
            schema_version: config::SCHEMA_VERSION,
            experiment: "eigencorrelator",
            seed: ccfg.seed,
            realizations: ccfg.realizations,
            rejected: ens.rejected,
            config: &cfg,
        },
    )?;

    out.finish(
        "eigencorrelator",
        serde_json::to_value(&cfg)?,
        ccfg.seed,
        started,
    )?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verification suite
// ---------------------------------------------------------------------------

/// One named verification check.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyCheck {
    pub name: &'static str,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl VerifyCheck {
    fn new(name: &'static str, residual: f64, tolerance: f64) -> Self {
        VerifyCheck {
            name,
            residual,
            tolerance,
            pass: residual <= tolerance,
        }
    }
}

/// Run the full oracle suite: every structural identity of the fermionic
/// reduction checked against the dense path at small n.
pub fn verify_suite(seed: u64) -> Result<Vec<VerifyCheck>> {
    use crate::dynamics::{evolve_correlation, propagator, transport_expectation, DensityProfile};
    use crate::entanglement::{
        entanglement_entropy, gamma_density_profile, gamma_eigenstate_product, restrict_gamma,
        OccupationPattern,
    };
    use crate::model::{
        build_anisotropic, sample_parameters, DisorderSpec, Distribution, Partition, SiteSet,
        Subinterval,
    };
    use crate::oracle;
    use crate::spectral::{diagonalize, spectral_projection};
    use nalgebra::DMatrix;

    let mut checks = Vec::new();
    let spec = DisorderSpec {
        mu: Distribution::Uniform { low: 0.5, high: 1.5 },
        gamma: Distribution::Uniform { low: -0.5, high: 0.5 },
        nu: Distribution::Uniform { low: 0.0, high: 4.0 },
        seed,
    };

    // CAR relations and the particle-count identity, entrywise at n = 6
    {
        let n = 6;
        let cs = oracle::build_jordan_wigner(n)?;
        let d = 1 << n;
        let id = DMatrix::<crate::C64>::identity(d, d);
        let mut worst: f64 = 0.0;
        for j in 0..n {
            for k in 0..n {
                let anti = &cs[j].mat * &cs[k].mat + &cs[k].mat * &cs[j].mat;
                worst = worst.max(anti.map(|c| c.norm()).max());
                let ckd = cs[k].mat.adjoint();
                let mut anti = &cs[j].mat * &ckd + &ckd * &cs[j].mat;
                if j == k {
                    anti -= &id;
                }
                worst = worst.max(anti.map(|c| c.norm()).max());
            }
        }
        checks.push(VerifyCheck::new("car_relations", worst, 1e-12));

        let mut worst: f64 = 0.0;
        for j in 1..=n {
            let cdc = cs[j - 1].mat.adjoint() * &cs[j - 1].mat;
            let njop = oracle::number_operator(n, &SiteSet::new(vec![j])?)?;
            worst = worst.max((cdc - njop.mat).map(|c| c.norm()).max());
        }
        checks.push(VerifyCheck::new("jw_number_identity", worst, 1e-12));
    }

    // quadratic forms H = C*MC and H_iso = 2c*Ac + E0 at n = 8
    {
        let params = sample_parameters(&spec, 8)?;
        let report = oracle::verify_quadratic_form(&params)?;
        checks.push(VerifyCheck::new(
            "quadratic_form_anisotropic",
            report.anisotropic_residual,
            1e-10,
        ));
        checks.push(VerifyCheck::new(
            "quadratic_form_isotropic",
            report.isotropic_residual,
            1e-10,
        ));
    }

    // dense spectrum against the free-fermion energies; +- pairing
    {
        let params = sample_parameters(&spec.with_seed(seed ^ 0x5bd1), 8)?;
        let h = oracle::build_hamiltonian(&params)?;
        let dense = oracle::DenseEigen::new(&h)?;
        let eig = diagonalize(&build_anisotropic(&params))?;
        let free = oracle::free_fermion_spectrum(&eig)?;
        let mut worst: f64 = 0.0;
        for (k, &e) in free.iter().enumerate() {
            worst = worst.max((dense.eigenvalues[k] - e).abs());
        }
        checks.push(VerifyCheck::new("spectrum_free_fermion_match", worst, 1e-9));

        let mut pairing: f64 = 0.0;
        let dim = eig.dim();
        for j in 0..dim / 2 {
            pairing = pairing.max((eig.eigenvalues[dim / 2 + j] + eig.eigenvalues[dim / 2 - 1 - j]).abs());
        }
        checks.push(VerifyCheck::new("pairing_symmetry", pairing, 1e-10));
    }

    // pfaffian against the determinant, m = 10
    {
        let mut rng = crate::model::pattern_rng(seed ^ 0xabcd);
        use rand::Rng;
        let m = 10;
        let mut x = DMatrix::<crate::C64>::zeros(m, m);
        for i in 0..m {
            for j in i + 1..m {
                let v = crate::C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                x[(i, j)] = v;
                x[(j, i)] = -v;
            }
        }
        let pf = oracle::pfaffian(&x)?;
        let det = x.determinant();
        let rel = (pf * pf - det).norm() / det.norm().max(1e-300);
        checks.push(VerifyCheck::new("pfaffian_determinant", rel, 1e-10));
    }

    // Wick's rule on an eigenstate: even moments, odd moments
    {
        let n = 6;
        let params = sample_parameters(&spec.with_seed(seed ^ 0x77), n)?;
        let h = oracle::build_hamiltonian(&params)?;
        let dense = oracle::DenseEigen::new(&h)?;
        let eig = diagonalize(&build_anisotropic(&params))?;
        let alpha = OccupationPattern::new(vec![1, 0, 1, 0, 0, 1])?;
        let psi = oracle::eigenstate_by_pattern(&dense, &eig, &alpha)?;
        let mut rng = crate::model::pattern_rng(seed ^ 0x99);
        for (name, m, tol) in [
            ("wick_even_4", 4usize, 1e-9),
            ("wick_even_6", 6, 1e-9),
            ("wick_odd_3", 3, 1e-12),
        ] {
            let ops: Vec<oracle::CarElement> = (0..m)
                .map(|_| oracle::CarElement::random(&mut rng, n))
                .collect();
            let check = oracle::verify_wick(&psi, &ops)?;
            checks.push(VerifyCheck::new(name, check.error, tol));
        }
    }

    // products of quasi-free states: direct sum + cross terms + Wick
    {
        let params = sample_parameters(&spec.with_seed(seed ^ 0x1111), 6)?;
        let partition = Partition::two_blocks(6, 3)?;
        let pats = vec![
            OccupationPattern::new(vec![1, 0, 1])?,
            OccupationPattern::new(vec![0, 1, 1])?,
        ];
        let report = oracle::verify_product_quasifree(&params, &partition, &pats, seed)?;
        checks.push(VerifyCheck::new(
            "product_quasifree_directsum",
            report.directsum_residual,
            1e-10,
        ));
        checks.push(VerifyCheck::new(
            "product_quasifree_cross",
            report.cross_residual,
            1e-12,
        ));
    }

    // correlation matrix of an eigenstate = spectral projection (specproj),
    // and its time evolution = conjugation (the correlation evolution law)
    {
        let n = 6;
        let params = sample_parameters(&spec.with_seed(seed ^ 0x2222), n)?;
        let h = oracle::build_hamiltonian(&params)?;
        let dense = oracle::DenseEigen::new(&h)?;
        let eig = diagonalize(&build_anisotropic(&params))?;
        let alpha = OccupationPattern::new(vec![0, 1, 1, 0, 1, 0])?;
        let psi = oracle::eigenstate_by_pattern(&dense, &eig, &alpha)?;
        let g_dense = oracle::exact_correlation_matrix(&oracle::DenseState::Vector(psi.clone()))?;
        let g_ff = spectral_projection(&eig, &alpha)?;
        let worst = (g_dense.matrix() - g_ff.matrix()).map(|c| c.norm()).max();
        checks.push(VerifyCheck::new("correlation_eigenstate_projection", worst, 1e-10));

        // evolve a product state both ways
        let profile = DensityProfile::new(vec![0.9, 0.1, 0.7, 0.3, 1.0, 0.0])?;
        let rho0 = oracle::DenseState::density_profile(&profile)?;
        let t = 1.7;
        let rho_t = dense.evolve(&rho0, t);
        let gt_dense = oracle::exact_correlation_matrix(&rho_t)?;
        let g0 = gamma_density_profile(&profile);
        let gt_ff = evolve_correlation(&g0, &propagator(&eig, t))?;
        let worst = (gt_dense.matrix() - gt_ff.matrix()).map(|c| c.norm()).max();
        checks.push(VerifyCheck::new("correlation_evolution_conjugation", worst, 1e-10));

        // entropy equality for the evolved product of eigenstates
        let partition = Partition::two_blocks(n, 3)?;
        let pats = vec![
            OccupationPattern::new(vec![1, 0, 1])?,
            OccupationPattern::new(vec![0, 1, 1])?,
        ];
        let psi_p = oracle::eigenstate_product_vector(&params, &partition, &pats)?;
        let block = Subinterval::new(1, 3)?;
        let g0 = gamma_eigenstate_product(&params, &partition, &pats)?;
        let mut worst: f64 = 0.0;
        for &t in &[0.0, 2.0, 20.0] {
            let psi_t = dense.evolve(&oracle::DenseState::Vector(psi_p.clone()), t);
            let s_dense = oracle::exact_entropy(&psi_t, block)?;
            let gt = evolve_correlation(&g0, &propagator(&eig, t))?;
            let s_ff = entanglement_entropy(&restrict_gamma(&gt, block)?)?.entropy_nats;
            worst = worst.max((s_dense - s_ff).abs());
        }
        checks.push(VerifyCheck::new("entropy_eigenstate_product", worst, 1e-8));

        // entropy equality for the mixed density-profile state
        let g0_profile = gamma_density_profile(&profile);
        let mut worst: f64 = 0.0;
        for &t in &[0.0, 3.1] {
            let rho_t = dense.evolve(&rho0, t);
            let s_dense = oracle::exact_entropy(&rho_t, block)?;
            let gt = evolve_correlation(&g0_profile, &propagator(&eig, t))?;
            let s_ff = entanglement_entropy(&restrict_gamma(&gt, block)?)?.entropy_nats;
            worst = worst.max((s_dense - s_ff).abs());
        }
        checks.push(VerifyCheck::new("entropy_density_profile", worst, 1e-8));

        // density-profile correlation matrix has the advertised block form
        let g_dense0 = oracle::exact_correlation_matrix(&rho0)?;
        let worst = (g_dense0.matrix() - gamma_density_profile(&profile).matrix())
            .map(|c| c.norm())
            .max();
        checks.push(VerifyCheck::new("density_profile_gamma", worst, 1e-10));
    }

    // isotropic transport formula against the dense expectation
    {
        let n = 6;
        let mut params = sample_parameters(&spec.with_seed(seed ^ 0x3333), n)?;
        params.gamma.iter_mut().for_each(|g| *g = 0.0);
        let h = oracle::build_hamiltonian(&params)?;
        let dense = oracle::DenseEigen::new(&h)?;
        let eig_a = diagonalize(&crate::model::build_isotropic(&params))?;
        let profile = DensityProfile::new(vec![1.0, 1.0, 0.0, 0.5, 0.0, 0.2])?;
        let rho0 = oracle::DenseState::density_profile(&profile)?;
        let s = SiteSet::new(vec![3, 5, 6])?;
        let mut worst: f64 = 0.0;
        for &t in &[0.0, 0.9, 7.3] {
            let rho_t = dense.evolve(&rho0, t);
            let dense_val = oracle::exact_number_expectation(&rho_t, &s)?;
            let ff_val = transport_expectation(&eig_a, &profile, &s, t)?;
            worst = worst.max((dense_val - ff_val).abs());
        }
        checks.push(VerifyCheck::new("transport_isotropic_match", worst, 1e-8));
    }

    // restriction commutes with building on a sub-block
    {
        let params = sample_parameters(&spec.with_seed(seed ^ 0x4444), 9)?;
        let block = Subinterval::new(3, 7)?;
        let direct = build_anisotropic(&params.restrict(block)?);
        let restricted = crate::model::restrict(&build_anisotropic(&params), block)?;
        let worst = (direct.matrix() - restricted.matrix()).amax();
        checks.push(VerifyCheck::new("restriction_commutes", worst, 0.0));
    }

    Ok(checks)
}

/// `xylab verify`: run the suite, print one line per check, emit the
/// machine-readable report. Exit 0 iff every residual is within tolerance.
pub fn cmd_verify(out_dir: &Path, seed: u64) -> Result<i32> {
    let started = now_unix();
    let checks = verify_suite(seed)?;
    let mut out = OutputTracker::new(out_dir)?;

    for c in &checks {
        println!(
            "{:<36} residual {:>12.3e}  tol {:>8.1e}  {}",
            c.name,
            c.residual,
            c.tolerance,
            if c.pass { "pass" } else { "FAIL" }
        );
    }
    #[derive(Serialize)]
    struct Report<'a> {
        schema_version: u32,
        seed: u64,
        checks: &'a [VerifyCheck],
        pass: bool,
    }
    let pass = checks.iter().all(|c| c.pass);
    out.write_json(
        "verify_report.json",
        &Report {
            schema_version: config::SCHEMA_VERSION,
            seed,
            checks: &checks,
            pass,
        },
    )?;
    out.finish("verify", serde_json::Value::Null, seed, started)?;
    Ok(if pass { 0 } else { 2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_suite_is_green_and_complete() {
        let checks = verify_suite(20240581).unwrap();
        assert!(checks.len() >= 12, "suite has only {} checks", checks.len());
        for c in &checks {
            assert!(
                c.pass,
                "check {} failed: residual {:.3e} > tol {:.3e}",
                c.name, c.residual, c.tolerance
            );
        }
    }
}
