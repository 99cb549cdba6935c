//! Write boundary matrices and basis tables the way `braidlog export`
//! does, then read a matrix back and compare.

use braidlog::braid::build_tchlog;
use braidlog::cli::{basis_csv, MatrixFile};
use braidlog::morse::MorseClassification;

fn main() -> braidlog::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .and_then(|a| a.parse().ok())
        .unwrap_or(3);
    let c = build_tchlog(n)?;
    let tags = MorseClassification::of(&c)?;
    let dir = std::env::temp_dir().join(format!("braidlog-export-{n}"));
    std::fs::create_dir_all(&dir)?;

    for k in 0..c.len() {
        let file = MatrixFile::from_laurent(c.boundary(k), c.vars());
        let path = dir.join(format!("tchlog_n{n}_d{k}.json"));
        std::fs::write(&path, serde_json::to_string(&file)?)?;
        std::fs::write(
            dir.join(format!("tchlog_n{n}_basis{k}.csv")),
            basis_csv(&c, Some(&tags), k),
        )?;

        let back: MatrixFile = serde_json::from_str(&std::fs::read_to_string(&path)?)?;
        let parsed = back.to_laurent()?;
        println!(
            "d_{k}: {}×{} with {} entries → {} (round trip equal: {})",
            file.rows,
            file.cols,
            file.entries.len(),
            path.display(),
            &parsed == c.boundary(k)
        );
    }
    print!("\n{}", basis_csv(&c, Some(&tags), n - 2));
    Ok(())
}
