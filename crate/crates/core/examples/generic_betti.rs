//! Dimensions of homology over the fraction field, estimated by evaluating
//! at random points modulo 2^61 - 1.
//!
//! `t̃Ch^log(n)` has a single nonzero Betti number `(n-2)!` in degree `n-2`;
//! `Ch^log(n)` is acyclic over the fraction field.

use braidlog::braid::{build_chlog, build_tchlog};
use braidlog::complex::generic_betti;
use braidlog::modp::MERSENNE_61;

fn main() -> braidlog::Result<()> {
    let max: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(5);
    let seed = 0;
    for n in 2..=max {
        let c = build_tchlog(n)?;
        let r = generic_betti(&c, 3, MERSENNE_61, seed, &[])?;
        println!(
            "t̃Ch^log({n}): dims {:?} → Betti {:?}, trials agree: {}",
            r.dims, r.betti, r.agreement
        );
    }
    for n in 2..=max.min(5) {
        let r = generic_betti(&build_chlog(n)?, 3, MERSENNE_61, seed, &[])?;
        println!("Ch^log({n}): Betti {:?}", r.betti);
    }
    Ok(())
}
