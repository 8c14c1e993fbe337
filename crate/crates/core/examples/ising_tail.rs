//! Tail weight of the periodic Ising ground state across flip sectors.
//!
//! `cargo run --release --example ising_tail -- [n] [h]`

use skqd::bounds::ising_sparsity;

fn main() -> skqd::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: usize = args.first().map_or(12, |s| s.parse().expect("n"));
    let h: f64 = args.get(1).map_or(0.5, |s| s.parse().expect("h"));

    let s = ising_sparsity(n, h, 20)?;
    println!("n = {n}, h = {h}: magnetization {:.10}", s.magnetization);
    if let Some(m) = s.thermodynamic_magnetization() {
        println!(
            "infinite chain: {m:.10} (deviation {:.2e})",
            (s.magnetization - m).abs()
        );
    }
    println!("{:>3} {:>12} {:>12}", "k", "tail", "bound");
    for k in 0..n.div_ceil(2) {
        println!("{k:>3} {:>12.4e} {:>12.4e}", s.tail(k), s.bound(k));
    }
    Ok(())
}
