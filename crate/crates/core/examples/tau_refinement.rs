//! Betti numbers of `t̃Ch^log(n)` at points that only avoid the zeros of
//! `τ_n`, including low-entropy points with values in {1, 2, 3}, and the
//! degenerate point t = 1 where `τ_n` vanishes.

use braidlog::modp::MERSENNE_61;
use braidlog::spectral::verify_tau_refinement;

fn main() -> braidlog::Result<()> {
    let max: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(5);
    for n in 3..=max {
        let r = verify_tau_refinement(n, 3, MERSENNE_61, 0)?;
        println!("n = {n}: expected {:?}", r.expected);
        println!("  uniform points:     {:?}", r.uniform.betti);
        for p in &r.low_entropy {
            println!("  point {:?}: {:?}", p.values, p.betti);
        }
        println!("  all ones:           {:?}", r.degenerate.betti);
        println!("  pass: {}", r.pass);
    }
    Ok(())
}
