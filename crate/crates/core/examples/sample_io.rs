//! Sampling, persistence, post-selection and the uniform baseline for a
//! half-filled fermionic sector.
//!
//! `cargo run --release --example sample_io -- [out.tsv]`

use std::sync::Arc;

use skqd::fermion::{build_siam_position, DeterminantSector, SectorHamiltonian, SiamParams};
use skqd::propagate::{krylov_states, siam_initial_state, EvolutionMethod, EvolutionPlan};
use skqd::sqd::{collect_samples, corrupt, postselect, uniform_baseline, SampleSet, SectorRule};

fn main() -> skqd::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| {
        std::env::temp_dir()
            .join("skqd_samples.tsv")
            .display()
            .to_string()
    });

    let ham = build_siam_position(&SiamParams::symmetric(7, 3.0))?;
    let sector = Arc::new(DeterminantSector::half_filling(ham.n_modes())?);
    let h = SectorHamiltonian::new(ham, sector.clone())?;
    let psi0 = siam_initial_state(&sector, 3)?;
    let states = krylov_states(
        &h,
        &psi0,
        &EvolutionPlan::new(0.1, 5, EvolutionMethod::LanczosExpmv)?,
    )?;
    let samples = collect_samples(&states, 2_000, 1)?;
    println!(
        "{} shots, {} distinct bitstrings",
        samples.total(),
        samples.distinct()
    );

    samples.write_tsv(std::fs::File::create(&path)?)?;
    let back = SampleSet::read_tsv(std::io::BufReader::new(std::fs::File::open(&path)?))?;
    println!(
        "wrote and re-read {path}: identical = {}",
        back.counts() == samples.counts()
    );

    let rule = SectorRule::for_sector(&sector);
    let noisy = corrupt(&samples, 0.01, 2)?;
    let (kept, dropped) = postselect(&noisy, rule);
    println!(
        "1% bit flips: {:.1}% of shots leave the sector, {} distinct survive",
        100.0 * dropped,
        kept.distinct()
    );

    let uniform = uniform_baseline(2 * sector.n_modes(), 10_000, 3, None)?;
    let (in_sector, dropped) = postselect(&uniform, rule);
    println!(
        "uniform over all strings: {:.1}% rejected, {} distinct in sector",
        100.0 * dropped,
        in_sector.distinct()
    );
    Ok(())
}
