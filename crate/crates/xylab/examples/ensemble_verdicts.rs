//! Run small transport and entanglement ensembles and print the theorem
//! verdicts: the transport bound with the measured Q(r) on the right-hand
//! side, and the area-law flatness test across chain sizes.

use xylab::config::{
    BatterySpec, ControlSpec, CutSpec, DisorderTriple, EntanglementConfig, GridSpec,
    PartitionSpec, ProfileSpec, TransportConfig,
};
use xylab::ensemble::{check_area_law, check_transport_theorem, run_entanglement, run_transport};
use xylab::model::Distribution;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let disorder = DisorderTriple {
        mu: Distribution::Constant { value: 1.0 },
        gamma: Distribution::Constant { value: 0.0 },
        nu: Distribution::Uniform { low: 0.0, high: 4.0 },
    };

    let tcfg = TransportConfig {
        n: 50,
        realizations: 50,
        seed: 1,
        disorder,
        grid: GridSpec::default(),
        profile: ProfileSpec::DomainWall { a: 21, b: 30 },
        targets: vec![
            (35..=39).collect(),
            (40..=44).collect(),
            (45..=49).collect(),
        ],
        fit_window: None,
    };
    let ens = run_transport(&tcfg)?;
    let verdict = check_transport_theorem(&ens)?;
    println!("transport (n = 50, domain wall [21,30], R = 50):");
    for t in &verdict.per_target {
        println!(
            "  d = {:>2}: E[sup_t <N_S>] = {:.4e} +- {:.1e}  <=  RHS {:.4e}   [{}]",
            t.distance.unwrap_or(0),
            t.mean_sup,
            t.std_error,
            t.rhs,
            if t.bound_ok { "ok" } else { "VIOLATED" }
        );
    }
    println!(
        "  domination {} | monotone {} | overall {}",
        verdict.domination_ok, verdict.monotone_ok, verdict.pass
    );

    let ecfg = EntanglementConfig {
        sizes: vec![16, 24, 32],
        realizations: 20,
        seed: 2,
        disorder,
        grid: GridSpec {
            t_min: 0.05,
            t_max: 100.0,
            points: 40,
        },
        partition: PartitionSpec::TwoBlocks { split: None },
        cut: CutSpec::HalfChain,
        battery: BatterySpec {
            random_patterns: 8,
            exhaustive_below: 0,
        },
        control: Some(ControlSpec {
            nu: 0.9,
            realizations: 4,
        }),
    };
    let ens = run_entanglement(&ecfg)?;
    let verdict = check_area_law(&ens)?;
    println!("\nentanglement (half-chain cut, two blocks, R = 20):");
    for s in &ens.sizes {
        println!(
            "  n = {:>3}: E[sup entropy] = {:.4} +- {:.4} (max {:.4})",
            s.n, s.sup_aggregate.mean, s.sup_aggregate.std_error, s.sup_aggregate.max
        );
    }
    println!(
        "  flatness: mean(n={}) = {:.4} vs threshold {:.4}  [{}]",
        verdict.largest_n,
        verdict.largest_mean,
        verdict.threshold,
        if verdict.flat_ok { "ok" } else { "VIOLATED" }
    );
    if let Some(c) = &verdict.control {
        println!(
            "  clean control mean {:.4} > disordered max {:.4}  [{}]",
            c.control_mean,
            c.disordered_max,
            if c.ok { "ok" } else { "VIOLATED" }
        );
    }
    Ok(())
}
