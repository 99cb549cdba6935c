//! Height strata of the Morse complex, their block decomposition into
//! shifted copies of `Ch^{log,S}`, and the E¹ page.

use braidlog::modp::MERSENNE_61;
use braidlog::morse::morse_complex;
use braidlog::spectral::{e1_page_of, strata_decomposition_of};

fn main() -> braidlog::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(5);
    let m = morse_complex(n)?;

    for p in 0..=n - 2 {
        let d = strata_decomposition_of(&m, p)?;
        let subsets: Vec<_> = d
            .blocks
            .iter()
            .map(|b| &b.subset)
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        println!(
            "p = {p}: stratum dims {:?}, {} blocks over S in {:?}, entrywise match: {}",
            d.stratum_dims,
            d.blocks.len(),
            subsets,
            d.pass
        );
    }

    let e1 = e1_page_of(m.complex(), n, 3, MERSENNE_61, 0)?;
    println!("\nE¹[p][q] for n = {n}:");
    for (p, row) in e1.table.iter().enumerate() {
        println!("  p = {p}: {row:?}");
    }
    println!("collapses to (n-2)! at (n-2, 0): {}", e1.collapses());
    Ok(())
}
