//! Integral homology of the Salvetti complex `Ch(n)` and of `t̃Ch^log(n)`
//! with every variable sent to 1, by Smith normal form.
//!
//! The Poincaré polynomials are `∏_{i<n} (1 + i·t)` and `∏_{2≤j<n} (1 + j·t)`.

use braidlog::braid::{build_ch, build_tchlog};
use braidlog::cli::linear_product_coefficients;
use braidlog::complex::{check_d_squared, integral_homology};

fn main() -> braidlog::Result<()> {
    let max: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(5);
    for n in 2..=max {
        let ch = build_ch(n)?;
        let h = integral_homology(&ch);
        println!(
            "Ch({n}): dims {:?}, d² = 0: {}, Betti {:?} (expected {:?}), torsion: {}",
            ch.dims(),
            check_d_squared(&ch),
            h.betti,
            linear_product_coefficients(1..n),
            h.has_torsion()
        );
        let one = integral_homology(&build_tchlog(n)?.augment());
        println!(
            "  t̃Ch^log({n}) at t = 1: Betti {:?} (expected {:?})",
            one.betti,
            linear_product_coefficients(2..n)
        );
    }
    Ok(())
}
