//! Cells of the Salvetti complex as ordered partitions, their facets and
//! the admissible cells of the subcomplex.
//!
//! ```text
//! cargo run --example enumerate_cells -- 4
//! ```

use braidlog::braid::is_admissible;
use braidlog::partitions::{cell_count, enumerate_cells, facets, height, iota, OrderedPartition};

fn main() -> braidlog::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(4);

    println!("n = {n}");
    for k in 0..n {
        let cells = enumerate_cells(n, k)?;
        let admissible = cells.iter().filter(|c| is_admissible(c)).count();
        println!(
            "  degree {k}: {:>6} cells (n!·C(n-1,k) = {}), {admissible} admissible",
            cells.len(),
            cell_count(n, k)
        );
    }

    let cell = OrderedPartition::parse("3 1 | 2")?;
    println!(
        "\n[{cell}] has degree {}, ι = {}, height {}",
        cell.degree(),
        iota(&cell),
        height(&cell)
    );

    let top = OrderedPartition::parse("2 3 1")?;
    println!("facets of [{top}]:");
    for f in facets(&top) {
        println!("  {:+} [{}]", f.sign, f.cell);
    }
    Ok(())
}
