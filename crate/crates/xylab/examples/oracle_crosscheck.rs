//! Cross-check the free-fermion reduction against the dense many-body
//! path on a small chain: same Hamiltonian, same initial states, entropy
//! and particle counts computed both ways.

use xylab::dynamics::{evolve_correlation, propagator, transport_expectation, DensityProfile};
use xylab::entanglement::{
    entanglement_entropy, gamma_density_profile, gamma_eigenstate_product, restrict_gamma,
    OccupationPattern,
};
use xylab::model::{
    build_anisotropic, build_isotropic, sample_parameters, DisorderSpec, Distribution, Partition,
    SiteSet, Subinterval,
};
use xylab::oracle::{
    build_hamiltonian, eigenstate_product_vector, exact_entropy, exact_number_expectation,
    DenseEigen, DenseState,
};
use xylab::spectral::diagonalize;

const N: usize = 6;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = DisorderSpec {
        mu: Distribution::Uniform { low: 0.5, high: 1.5 },
        gamma: Distribution::Uniform { low: -0.5, high: 0.5 },
        nu: Distribution::Uniform { low: 0.0, high: 4.0 },
        seed: 12,
    };
    let params = sample_parameters(&spec, N)?;
    let block = Subinterval::new(1, 3)?;

    // product of two block eigenstates, evolved under the full chain
    let partition = Partition::two_blocks(N, 3)?;
    let patterns = vec![
        OccupationPattern::new(vec![1, 0, 1])?,
        OccupationPattern::new(vec![0, 1, 1])?,
    ];
    let h = build_hamiltonian(&params)?;
    let dense = DenseEigen::new(&h)?;
    let psi = eigenstate_product_vector(&params, &partition, &patterns)?;
    let eig_m = diagonalize(&build_anisotropic(&params))?;
    let gamma0 = gamma_eigenstate_product(&params, &partition, &patterns)?;

    println!("eigenstate product, entropy of sites [1,3]:");
    println!("{:>8} {:>18} {:>18} {:>10}", "t", "free-fermion", "dense oracle", "diff");
    for t in [0.0, 0.5, 2.0, 8.0, 50.0] {
        let gt = evolve_correlation(&gamma0, &propagator(&eig_m, t))?;
        let s_ff = entanglement_entropy(&restrict_gamma(&gt, block)?)?.entropy_nats;
        let psi_t = dense.evolve(&DenseState::Vector(psi.clone()), t);
        let s_dense = exact_entropy(&psi_t, block)?;
        println!(
            "{t:>8.2} {s_ff:>18.12} {s_dense:>18.12} {:>10.2e}",
            (s_ff - s_dense).abs()
        );
    }

    // a mixed density-profile state on the same disorder
    let profile = DensityProfile::new(vec![1.0, 0.8, 0.1, 0.0, 0.5, 0.9])?;
    let g0 = gamma_density_profile(&profile);
    let rho0 = DenseState::density_profile(&profile)?;
    println!("\ndensity-profile state, entropy of sites [1,3]:");
    for t in [0.0, 1.3, 10.0] {
        let gt = evolve_correlation(&g0, &propagator(&eig_m, t))?;
        let s_ff = entanglement_entropy(&restrict_gamma(&gt, block)?)?.entropy_nats;
        let rho_t = dense.evolve(&rho0, t);
        let s_dense = exact_entropy(&rho_t, block)?;
        println!(
            "{t:>8.2} {s_ff:>18.12} {s_dense:>18.12} {:>10.2e}",
            (s_ff - s_dense).abs()
        );
    }

    // isotropic transport: the |(e^{2itA})_{jk}|^2 formula vs dense <N_S>
    let mut iso = params.clone();
    iso.gamma.iter_mut().for_each(|g| *g = 0.0);
    let h_iso = build_hamiltonian(&iso)?;
    let dense_iso = DenseEigen::new(&h_iso)?;
    let eig_a = diagonalize(&build_isotropic(&iso))?;
    let s_set = SiteSet::new(vec![4, 5, 6])?;
    let rho0 = DenseState::density_profile(&profile)?;
    println!("\nisotropic transport, <N_S> for S = {{4,5,6}}:");
    for t in [0.0, 0.7, 3.0, 25.0] {
        let ff = transport_expectation(&eig_a, &profile, &s_set, t)?;
        let rho_t = dense_iso.evolve(&rho0, t);
        let dn = exact_number_expectation(&rho_t, &s_set)?;
        println!("{t:>8.2} {ff:>18.12} {dn:>18.12} {:>10.2e}", (ff - dn).abs());
    }

    Ok(())
}
