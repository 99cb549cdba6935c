//! The discrete Morse matching on `t̃Ch^log(n)`: verification of the
//! matching and the reduced complex on critical cells.

use braidlog::braid::build_tchlog;
use braidlog::complex::{check_d_squared, generic_betti};
use braidlog::laurent::Specialization;
use braidlog::modp::MERSENNE_61;
use braidlog::morse::{
    classify, morse_complex, morse_equivalence_check, verify_matching, CellClass,
};
use braidlog::partitions::OrderedPartition;

fn main() -> braidlog::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(4);

    for text in ["3 1 | 2", "1 3 | 2", "3 | 1 | 2"] {
        let cell = OrderedPartition::parse(text)?;
        let role = match classify(&cell) {
            CellClass::Critical => "critical".to_string(),
            CellClass::Collapsible(p) => format!("collapsible, partner [{p}]"),
            CellClass::Redundant(p) => format!("redundant, partner [{p}]"),
        };
        println!("[{cell}]: {role}");
    }

    let report = verify_matching(n)?;
    println!(
        "\nmatching on t̃Ch^log({n}): pass = {} (acyclic {}, involution {}, units {}, heights {})",
        report.pass,
        report.acyclic,
        report.involution,
        report.invertible_indices,
        report.equal_heights
    );

    let full = build_tchlog(n)?;
    let m = morse_complex(n)?;
    println!("cells {:?} → critical {:?}", full.dims(), m.complex.dims());
    println!(
        "d² = 0 on the Morse complex: {}",
        check_d_squared(&m.complex)
    );
    println!(
        "generic Betti of the Morse complex: {:?}",
        generic_betti(&m.complex, 3, MERSENNE_61, 0, &[])?.betti
    );
    let ones = Specialization::ones(full.vars(), MERSENNE_61)?;
    let e = morse_equivalence_check(n, &ones)?;
    println!(
        "at t = 1: Morse {:?}, full {:?}",
        e.morse_betti, e.tchlog_betti
    );
    Ok(())
}
