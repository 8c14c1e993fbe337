//! Open Ising chain: spectrum summary, time step and ground-state sparsity.
//!
//! `cargo run --release --example tfim_spectrum -- [n] [h1] [h2]`

use skqd::propagate::choose_dt;
use skqd::spin::build_tfim_open;
use skqd::sqd::sparsity_profile;
use skqd::state::format_bits;
use skqd::{spectrum_summary, Basis, SpectrumLimits, StateVector};

fn main() -> skqd::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(8, |s| s.parse().expect("n"));
    let h1: f64 = args.get(1).map_or(0.1, |s| s.parse().expect("h1"));
    let h2: f64 = args.get(2).map_or(0.1, |s| s.parse().expect("h2"));

    let h = build_tfim_open(n, h1, h2)?;
    let s = spectrum_summary(&h, &SpectrumLimits::default())?;
    let psi0 = StateVector::basis_state(Basis::spin(n), 0)?;
    let overlap = psi0.inner(&s.ground)?.norm_sqr();
    println!("n = {n}, h1 = {h1}, h2 = {h2}, {} terms", h.terms().len());
    println!(
        "E0 = {:.12}  E1 = {:.12}  Emax = {:.12}",
        s.e0, s.e1, s.emax
    );
    println!(
        "gap = {:.6}  width = {:.6}  |H| = {:.6}",
        s.gap(),
        s.width(),
        s.norm()
    );
    println!("dt = {:.6}  |<0..0|g>|^2 = {overlap:.6}", choose_dt(&s)?);

    let profile = sparsity_profile(&s.ground)?;
    for target in [0.9, 0.99, 0.999] {
        println!("L({target}) = {}", profile.smallest_l_reaching(target));
    }
    println!("heaviest bitstrings:");
    for (b, w) in profile.order.iter().zip(&profile.sorted_weights).take(6) {
        println!("  {}  {w:.3e}", format_bits(*b, n));
    }
    Ok(())
}
