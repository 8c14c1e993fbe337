//! Noiseless KQD with its error bound, noisy KQD, and SKQD on one chain.
//!
//! `cargo run --release --example kqd_vs_skqd -- [n] [d]`

use skqd::bounds::{eps_kqd, KqdBoundInputs};
use skqd::krylov::{assemble_toeplitz, default_threshold, inject_noise, solve_gevp, NoiseTarget};
use skqd::propagate::{choose_dt, krylov_states, EvolutionMethod, EvolutionPlan};
use skqd::spin::build_tfim_open;
use skqd::sqd::{best_of, skqd_estimate, SkqdOptions};
use skqd::{spectrum_summary, Basis, SpectrumLimits, StateVector};

fn main() -> skqd::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(8, |s| s.parse().expect("n"));
    let d: usize = args.get(1).map_or(15, |s| s.parse().expect("d"));

    let h = build_tfim_open(n, 0.1, 0.1)?;
    let s = spectrum_summary(&h, &SpectrumLimits::default())?;
    let psi0 = StateVector::basis_state(Basis::spin(n), 0)?;
    let plan = EvolutionPlan::new(choose_dt(&s)?, d, EvolutionMethod::default_for(1 << n))?;
    let states = krylov_states(&h, &psi0, &plan)?;
    let clean = assemble_toeplitz(&h, &states)?;

    println!("{:>3} {:>12} {:>12}", "d", "kqd error", "bound");
    for k in (1..=d).step_by(2) {
        let e = solve_gevp(&clean.leading(k)?, default_threshold(0.0))?.energy - s.e0;
        let bound = eps_kqd(&KqdBoundInputs::from_summary(&s, &psi0, k)?)?;
        println!("{k:>3} {e:>12.3e} {bound:>12.3e}");
    }

    let sigma = 1.0 / 5000f64.sqrt();
    for target in [NoiseTarget::HAndS, NoiseTarget::HOnly] {
        let mut errs: Vec<f64> = (0..100)
            .map(|seed| {
                let m = inject_noise(&clean, sigma, seed, target)?;
                Ok((solve_gevp(&m, default_threshold(sigma))?.energy - s.e0).abs())
            })
            .collect::<skqd::Result<_>>()?;
        errs.sort_by(f64::total_cmp);
        println!(
            "noisy kqd ({}): median error {:.3e}",
            target.label(),
            errs[50]
        );
    }

    for m in [10, 100, 1000] {
        let (seed, best) = best_of(
            (0..100)
                .map(|seed| Ok(skqd_estimate(&h, &states, m, seed, &SkqdOptions::default())?.0)),
        )?;
        println!(
            "skqd M = {m:>4}: best error {:.3e} (seed {seed}, D = {})",
            best.energy - s.e0,
            best.dim()
        );
    }
    Ok(())
}
