//! Impurity model at desk scale: two-stage SKQD against exact
//! diagonalization, plus the uniform-sampling baseline.
//!
//! `cargo run --release --example siam_pipeline -- [U] [shots]`

use skqd::experiment::siam::{compare_with_uniform, SiamSetup};
use skqd::fermion::SiamParams;
use skqd::propagate::{EvolutionMethod, EvolutionPlan};

fn main() -> skqd::Result<()> {
    let mut args = std::env::args().skip(1);
    let us: Vec<f64> = match args.next() {
        Some(u) => vec![u.parse().expect("U")],
        None => vec![1.0, 3.0, 7.0, 10.0],
    };
    let shots: Vec<usize> = match args.next() {
        Some(m) => vec![m.parse().expect("shots")],
        None => vec![1_000, 10_000, 100_000],
    };
    let plan = EvolutionPlan::new(0.1, 25, EvolutionMethod::LanczosExpmv)?;
    for u in us {
        let setup = SiamSetup::new(SiamParams::symmetric(7, u))?;
        let reference = setup.reference()?;
        println!(
            "U = {u}: sector dim {}, exact E0 = {:.10}",
            setup.sector.dim(),
            reference.energy
        );
        for &m in &shots {
            let t = std::time::Instant::now();
            let (first, second) = setup.two_stage(&plan, m, 7)?;
            let rel = |e: f64| (e - reference.energy).abs() / reference.energy.abs();
            let corr = second.correlations(&setup.sector)?;
            let dev = corr
                .iter()
                .zip(&reference.correlations)
                .map(|(a, b)| (a.spin - b.spin).abs().max((a.density - b.density).abs()))
                .fold(0.0, f64::max);
            println!(
                "  M = {m:>6}: momentum D = {:>4} rel {:.2e} | natural D = {:>4} rel {:.2e} | corr dev {:.2e} ({:.1?})",
                first.problem.dim(),
                rel(first.problem.energy),
                second.problem.dim(),
                rel(second.problem.energy),
                dev,
                t.elapsed()
            );
        }
        let (_, second) = setup.two_stage(&plan, 1_000, 7)?;
        let cmp = compare_with_uniform(&setup, &second, &plan, 1_000, 11)?;
        let err = |e: f64| (e - reference.energy).abs() / reference.energy.abs();
        println!(
            "  uniform baseline at D = {}: skqd rel {:.2e}, uniform rel {:.2e}",
            cmp.dim,
            err(cmp.skqd_energy),
            err(cmp.uniform_energy)
        );
    }
    Ok(())
}
