//! The sampling guarantee evaluated step by step for an Ising chain, next to
//! the filter certificate built from the actual Krylov states.
//!
//! `cargo run --release --example guarantee_chain -- [n] [d]`

use skqd::bounds::{filter_certificate, guarantee_report, KqdBoundInputs};
use skqd::propagate::{choose_dt, krylov_states, EvolutionMethod, EvolutionPlan};
use skqd::spin::build_tfim_open;
use skqd::sqd::sparsity_profile;
use skqd::{spectrum_summary, Basis, SpectrumLimits, StateVector};

fn main() -> skqd::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(8, |s| s.parse().expect("n"));
    let d: usize = args.get(1).map_or(15, |s| s.parse().expect("d"));

    let h = build_tfim_open(n, 0.1, 0.1)?;
    let s = spectrum_summary(&h, &SpectrumLimits::default())?;
    let psi0 = StateVector::basis_state(Basis::spin(n), 0)?;
    let inputs = KqdBoundInputs::from_summary(&s, &psi0, d)?;
    let profile = sparsity_profile(&s.ground)?;
    let l = profile.smallest_l_reaching(0.99);
    let (alpha, beta) = profile.at(l);

    let report = guarantee_report(&inputs, s.norm(), alpha, beta, l, 0.01)?;
    println!("{}", serde_json::to_string_pretty(&report)?);

    let dt = choose_dt(&s)?;
    let states = krylov_states(
        &h,
        &psi0,
        &EvolutionPlan::new(dt, inputs.odd_d(), EvolutionMethod::ExactEigen)?,
    )?;
    let cert = filter_certificate(&states, s.e0, dt, s.gap() * dt)?;
    let fidelity = cert.state.inner(&s.ground)?.norm_sqr();
    println!(
        "filter certificate: raw norm {:.6}, fidelity with ground state {:.12}",
        cert.raw_norm, fidelity
    );
    println!(
        "squared distance {:.3e} vs bound {:.3e}",
        2.0 * (1.0 - fidelity.sqrt()),
        report.eps_tilde
    );
    Ok(())
}
