//! Command-line front end: argument parsing, the four commands and their
//! JSON/CSV reports.
//!
//! Exit codes: 0 success, 1 verification or I/O failure, 2 usage error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ibig::IBig;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::braid::{build_ch, build_chlog, build_chlog_s, build_tchlog};
use crate::complex::{
    betti_mod_p, check_d_squared, generic_betti, integral_homology, HomologyReport, IntegerComplex,
    LaurentComplex, SparseMatrix,
};
use crate::error::{Error, Result};
use crate::laurent::{derive_seed, random_specialization, LaurentPoly, Specialization, VarSet};
use crate::modp::{is_prime, MERSENNE_61};
use crate::morse::{
    morse_complex, morse_equivalence_check_of, verify_matching_of, MorseClassification,
    MorseComplex, MorseTag,
};
use crate::spectral::{e1_page_of, strata_decomposition_of, subsets_with_two, tau_refinement_of};

pub const HOMOLOGY_MAX_N: usize = 6;
pub const ENUMERATION_MAX_N: usize = 7;
pub const UNSAFE_MAX_N: usize = 9;

#[derive(Debug, Parser)]
#[command(
    name = "braidlog",
    version,
    about = "Salvetti complexes, Morse reduction and generic homology"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Cells,
    Homology,
    Verify,
    Export,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Cell counts per degree (and per height for filtered complexes).
    Cells(RunArgs),
    /// Homology in the requested coefficient mode.
    Homology(RunArgs),
    /// Run the full verification battery for one n.
    Verify(RunArgs),
    /// Write boundary matrices and basis tables.
    Export(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComplexKind {
    Ch,
    Chlog,
    Tchlog,
    ChlogS,
    Morse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coeff {
    Integer,
    Fp,
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, value_enum, default_value = "tchlog")]
    pub complex: ComplexKind,
    #[arg(long)]
    pub n: usize,
    /// Labels of `S`, comma separated (for `chlog-s`).
    #[arg(long, value_delimiter = ',')]
    pub subset: Vec<u8>,
    #[arg(long)]
    pub degree: Option<usize>,
    #[arg(long, value_enum)]
    pub coeff: Option<Coeff>,
    /// Send every variable to 1 before computing over ℤ or F_p.
    #[arg(long)]
    pub at_one: bool,
    #[arg(long, default_value_t = MERSENNE_61)]
    pub prime: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    /// Output file (directory for `export`); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    /// Lift the default size limits (up to n = 9).
    #[arg(long)]
    pub max_n_unsafe: bool,
}

/// Validated settings for one command.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    #[serde(skip)]
    pub command: CommandKind,
    pub n: usize,
    pub complex: ComplexKind,
    pub subset: Vec<u8>,
    pub degree: Option<usize>,
    pub coeff: Coeff,
    pub at_one: bool,
    pub prime: u64,
    pub seed: u64,
    pub trials: usize,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    pub fn from_args(command: CommandKind, a: RunArgs) -> Result<Self> {
        let limit = match (a.max_n_unsafe, command) {
            (true, _) => UNSAFE_MAX_N,
            (false, CommandKind::Cells | CommandKind::Export) => ENUMERATION_MAX_N,
            (false, _) => HOMOLOGY_MAX_N,
        };
        if a.n < 2 || a.n > limit {
            return Err(Error::usage(format!(
                "n must lie in 2..={limit} for this command (see --max-n-unsafe)"
            )));
        }
        if a.complex == ComplexKind::ChlogS && a.subset.is_empty() {
            return Err(Error::usage("--complex chlog-s needs --subset"));
        }
        if a.complex != ComplexKind::ChlogS && !a.subset.is_empty() {
            return Err(Error::usage("--subset only applies to chlog-s"));
        }
        let laurent = a.complex != ComplexKind::Ch;
        let coeff = a.coeff.unwrap_or(if laurent && !a.at_one {
            Coeff::Generic
        } else {
            Coeff::Integer
        });
        if command == CommandKind::Homology {
            match coeff {
                Coeff::Integer | Coeff::Fp if laurent && !a.at_one => {
                    return Err(Error::usage(
                        "integer and fp coefficients need a ℤ complex or --at-one for Laurent complexes",
                    ))
                }
                Coeff::Generic if !laurent => {
                    return Err(Error::usage("generic coefficients need a Laurent complex"))
                }
                Coeff::Generic if a.at_one => return Err(Error::usage("--at-one conflicts with --coeff generic")),
                _ => {}
            }
        }
        let needs_prime = matches!(command, CommandKind::Verify)
            || (command == CommandKind::Homology && coeff != Coeff::Integer);
        if needs_prime && !is_prime(a.prime) {
            return Err(Error::usage(format!("--prime {} is not prime", a.prime)));
        }
        if needs_prime && a.trials == 0 {
            return Err(Error::usage("--trials must be positive"));
        }
        Ok(Self {
            command,
            n: a.n,
            complex: a.complex,
            subset: a.subset,
            degree: a.degree,
            coeff,
            at_one: a.at_one,
            prime: a.prime,
            seed: a.seed,
            trials: a.trials,
            out: a.out,
            format: a.format,
        })
    }
}

/// A built complex of either coefficient type.
pub enum Built {
    Integer(IntegerComplex),
    Laurent(LaurentComplex),
}

impl Built {
    fn dims(&self) -> Vec<usize> {
        match self {
            Built::Integer(c) => c.dims(),
            Built::Laurent(c) => c.dims(),
        }
    }

    fn height_profile(&self) -> Option<Vec<Vec<usize>>> {
        match self {
            Built::Integer(c) => c.height_profile(),
            Built::Laurent(c) => c.height_profile(),
        }
    }
}

pub fn build_complex(cfg: &RunConfig) -> Result<Built> {
    Ok(match cfg.complex {
        ComplexKind::Ch => Built::Integer(build_ch(cfg.n)?),
        ComplexKind::Chlog => Built::Laurent(build_chlog(cfg.n)?),
        ComplexKind::Tchlog => Built::Laurent(build_tchlog(cfg.n)?),
        ComplexKind::ChlogS => Built::Laurent(build_chlog_s(cfg.n, &cfg.subset)?),
        ComplexKind::Morse => Built::Laurent(morse_complex(cfg.n)?.complex),
    })
}

/// A command's output, already rendered as JSON and as CSV.
#[derive(Debug, Clone)]
pub struct Report {
    pub json: Value,
    pub csv: String,
    pub pass: bool,
}

impl Report {
    fn new(json: Value, csv: String) -> Self {
        Self {
            json,
            csv,
            pass: true,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json).expect("reports serialize");
                s.push('\n');
                s
            }
            Format::Csv => self.csv.clone(),
        }
    }
}

pub fn cmd_cells(cfg: &RunConfig) -> Result<Report> {
    let c = build_complex(cfg)?;
    let counts = c.dims();
    let heights = c.height_profile();
    let mut csv = String::from("degree,count");
    let width = heights
        .as_ref()
        .map_or(0, |h| h.iter().map(Vec::len).max().unwrap_or(0));
    for p in 0..width {
        write!(csv, ",height_{p}").unwrap();
    }
    csv.push('\n');
    for (k, count) in counts.iter().enumerate() {
        write!(csv, "{k},{count}").unwrap();
        if let Some(h) = &heights {
            for p in 0..width {
                write!(csv, ",{}", h[k].get(p).copied().unwrap_or(0)).unwrap();
            }
        }
        csv.push('\n');
    }
    let json = json!({
        "command": "cells",
        "complex": cfg.complex,
        "n": cfg.n,
        "subset": cfg.subset,
        "degrees": (0..counts.len()).collect::<Vec<_>>(),
        "counts": counts,
        "heights": heights,
    });
    Ok(Report::new(json, csv))
}

fn homology_csv(r: &HomologyReport) -> String {
    let mut csv = String::from("degree,dim,rank,betti,torsion\n");
    for k in 0..r.dims.len() {
        let torsion = r.torsion[k]
            .iter()
            .map(IBig::to_string)
            .collect::<Vec<_>>()
            .join(" ");
        writeln!(
            csv,
            "{k},{},{},{},{torsion}",
            r.dims[k], r.ranks[k], r.betti[k]
        )
        .unwrap();
    }
    csv
}

pub fn cmd_homology(cfg: &RunConfig) -> Result<Report> {
    let c = build_complex(cfg)?;
    let integral = |c: &IntegerComplex| match cfg.coeff {
        Coeff::Integer => integral_homology(c),
        _ => betti_mod_p(c, cfg.prime),
    };
    let report = match (&c, cfg.coeff) {
        (Built::Integer(c), _) => integral(c),
        (Built::Laurent(c), Coeff::Generic) => {
            generic_betti(c, cfg.trials, cfg.prime, cfg.seed, &[])?
        }
        (Built::Laurent(c), _) => integral(&c.augment()),
    };
    let csv = homology_csv(&report);
    let mut json = json!({
        "command": "homology",
        "config": cfg,
    });
    let obj = json.as_object_mut().unwrap();
    for (k, v) in serde_json::to_value(&report)?.as_object().unwrap() {
        obj.insert(k.clone(), v.clone());
    }
    Ok(Report::new(json, csv))
}

#[derive(Debug, Clone, Serialize)]
pub struct Step {
    pub name: &'static str,
    pub pass: bool,
    pub details: Value,
}

/// Coefficients of `∏_{i ∈ factors} (1 + i·t)`.
pub fn linear_product_coefficients(factors: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut poly = vec![1usize];
    for i in factors {
        let mut next = vec![0; poly.len() + 1];
        for (k, &c) in poly.iter().enumerate() {
            next[k] += c;
            next[k + 1] += c * i;
        }
        poly = next;
    }
    poly
}

/// The verification battery for one `n`.
pub fn run_battery(n: usize, prime: u64, seed: u64, trials: usize) -> Result<Vec<Step>> {
    let mut steps = Vec::new();
    let tchlog = build_tchlog(n)?;
    let ch = build_ch(n)?;
    let morse: MorseComplex = morse_complex(n)?;

    let mut d2 = vec![
        ("ch".to_string(), check_d_squared(&ch)),
        ("chlog".to_string(), check_d_squared(&build_chlog(n)?)),
        ("tchlog".to_string(), check_d_squared(&tchlog)),
    ];
    for size in 1..=4.min(n - 1) {
        for s in subsets_with_two(n, size) {
            let name = format!(
                "chlog-s {{{}}}",
                s.iter().map(u8::to_string).collect::<Vec<_>>().join(",")
            );
            d2.push((name, check_d_squared(&build_chlog_s(n, &s)?)));
        }
    }
    d2.push(("morse".to_string(), check_d_squared(morse.complex())));
    steps.push(Step {
        name: "d_squared",
        pass: d2.iter().all(|x| x.1),
        details: json!(d2
            .iter()
            .map(|(k, v)| json!({"complex": k, "pass": v}))
            .collect::<Vec<_>>()),
    });

    let classification = MorseClassification::of(&tchlog)?;
    let matching = verify_matching_of(n, &tchlog, &classification);
    steps.push(Step {
        name: "matching",
        pass: matching.pass,
        details: serde_json::to_value(&matching)?,
    });

    let vars = tchlog.vars().clone();
    let mut points: Vec<Specialization> = (0..trials)
        .map(|t| random_specialization(&vars, prime, derive_seed(seed, t as u64), &[]))
        .collect::<Result<_>>()?;
    points.push(Specialization::ones(&vars, prime)?);
    let checks: Vec<_> = points
        .iter()
        .map(|at| morse_equivalence_check_of(&tchlog, &morse, at))
        .collect();
    steps.push(Step {
        name: "morse_equivalence",
        pass: checks.iter().all(|c| c.equal),
        details: serde_json::to_value(&checks)?,
    });

    let generic = generic_betti(&tchlog, trials, prime, seed, &[])?;
    let mut expected = vec![0; n - 1];
    expected[n - 2] = (1..=n - 2).product();
    steps.push(Step {
        name: "generic_betti",
        pass: generic.betti == expected && generic.agreement,
        details: json!({"expected": expected, "report": generic}),
    });

    let strata = (0..=n - 2)
        .map(|p| strata_decomposition_of(&morse, p))
        .collect::<Result<Vec<_>>>()?;
    steps.push(Step {
        name: "strata_decomposition",
        pass: strata.iter().all(|s| s.pass),
        details: json!(strata
            .iter()
            .map(
                |s| json!({"p": s.p, "pass": s.pass, "blocks": s.blocks.len(),
                "stratum_dims": s.stratum_dims, "mismatches": s.mismatches})
            )
            .collect::<Vec<_>>()),
    });

    let e1 = e1_page_of(morse.complex(), n, trials, prime, seed)?;
    steps.push(Step {
        name: "e1_page",
        pass: e1.collapses() && e1.agreement,
        details: serde_json::to_value(&e1)?,
    });

    if n >= 3 {
        let tau = tau_refinement_of(&tchlog, n, trials, prime, seed)?;
        steps.push(Step {
            name: "tau_refinement",
            pass: tau.pass,
            details: serde_json::to_value(&tau)?,
        });
    } else {
        steps.push(Step {
            name: "tau_refinement",
            pass: true,
            details: json!({"skipped": "no τ_n for n = 2"}),
        });
    }

    let ch_h = integral_homology(&ch);
    let ch_expected = linear_product_coefficients(1..n);
    let one_h = integral_homology(&tchlog.augment());
    let one_expected = linear_product_coefficients(2..n);
    steps.push(Step {
        name: "integral_at_one",
        pass: ch_h.betti == ch_expected
            && !ch_h.has_torsion()
            && one_h.betti == one_expected
            && !one_h.has_torsion(),
        details: json!({
            "ch": {"expected": ch_expected, "report": ch_h},
            "tchlog_at_one": {"expected": one_expected, "report": one_h},
        }),
    });
    Ok(steps)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Report> {
    let steps = run_battery(cfg.n, cfg.prime, cfg.seed, cfg.trials)?;
    let pass = steps.iter().all(|s| s.pass);
    let failures: Vec<&str> = steps.iter().filter(|s| !s.pass).map(|s| s.name).collect();
    let mut csv = String::from("step,pass\n");
    for s in &steps {
        writeln!(csv, "{},{}", s.name, s.pass).unwrap();
    }
    let json = json!({
        "command": "verify",
        "n": cfg.n,
        "prime": cfg.prime,
        "seed": cfg.seed,
        "trials": cfg.trials,
        "pass": pass,
        "failures": failures,
        "steps": steps,
    });
    Ok(Report { json, csv, pass })
}

/// Sparse boundary matrix as written by `export`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub ring: String,
    pub entries: Vec<(usize, usize, String)>,
}

impl MatrixFile {
    pub fn from_laurent(m: &SparseMatrix<LaurentPoly>, vars: &VarSet) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            ring: vars.describe(),
            entries: m
                .entries()
                .iter()
                .map(|(i, j, v)| (*i, *j, v.to_string()))
                .collect(),
        }
    }

    pub fn from_integer(m: &SparseMatrix<IBig>) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            ring: "integer".into(),
            entries: m
                .entries()
                .iter()
                .map(|(i, j, v)| (*i, *j, v.to_string()))
                .collect(),
        }
    }

    pub fn to_laurent(&self) -> Result<SparseMatrix<LaurentPoly>> {
        let vars = VarSet::from_description(&self.ring)?;
        let trip = self
            .entries
            .iter()
            .map(|(i, j, s)| Ok((*i, *j, LaurentPoly::parse(&vars, s)?)))
            .collect::<Result<Vec<_>>>()?;
        self.checked(trip)
    }

    pub fn to_integer(&self) -> Result<SparseMatrix<IBig>> {
        if self.ring != "integer" {
            return Err(Error::parse(format!(
                "expected an integer matrix, found `{}`",
                self.ring
            )));
        }
        let trip = self
            .entries
            .iter()
            .map(|(i, j, s)| {
                let v: IBig = s
                    .parse()
                    .map_err(|_| Error::parse(format!("bad integer `{s}`")))?;
                Ok((*i, *j, v))
            })
            .collect::<Result<Vec<_>>>()?;
        self.checked(trip)
    }

    fn checked<T: crate::complex::Scalar>(
        &self,
        trip: Vec<(usize, usize, T)>,
    ) -> Result<SparseMatrix<T>> {
        if let Some((i, j, _)) = trip
            .iter()
            .find(|(i, j, _)| *i >= self.rows || *j >= self.cols)
        {
            return Err(Error::parse(format!(
                "entry ({i}, {j}) outside {}×{}",
                self.rows, self.cols
            )));
        }
        Ok(SparseMatrix::from_triplets(self.rows, self.cols, trip))
    }
}

fn file_stem(cfg: &RunConfig) -> String {
    let kind = serde_json::to_value(cfg.complex).unwrap();
    let mut stem = format!("{}_n{}", kind.as_str().unwrap(), cfg.n);
    if !cfg.subset.is_empty() {
        stem.push_str("_s");
        for x in &cfg.subset {
            stem.push_str(&x.to_string());
        }
    }
    stem
}

/// Basis table: `cell_id,partition,height,morse_tag`, one row per cell.
pub fn basis_csv(c: &LaurentComplex, tags: Option<&MorseClassification>, k: usize) -> String {
    let mut csv = String::from("cell_id,partition,height,morse_tag\n");
    for (i, cell) in c.basis(k).iter().enumerate() {
        let h = c.height(k, i).map_or(String::new(), |h| h.to_string());
        let tag = tags.map_or("", |t| t.tag(k, i).name());
        writeln!(csv, "{i},{cell},{h},{tag}").unwrap();
    }
    csv
}

fn integer_basis_csv(c: &IntegerComplex, k: usize) -> String {
    let mut csv = String::from("cell_id,partition,height,morse_tag\n");
    for (i, cell) in c.basis(k).iter().enumerate() {
        let h = c.height(k, i).map_or(String::new(), |h| h.to_string());
        writeln!(csv, "{i},{cell},{h},").unwrap();
    }
    csv
}

pub fn cmd_export(cfg: &RunConfig) -> Result<Report> {
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    let c = build_complex(cfg)?;
    let len = c.dims().len();
    let degrees: Vec<usize> = match cfg.degree {
        Some(k) if k >= len => {
            return Err(Error::usage(format!("degree {k} out of range 0..{len}")));
        }
        Some(k) => vec![k],
        None => (0..len).collect(),
    };
    let stem = file_stem(cfg);
    let mut written = Vec::new();
    let tags = match (&c, cfg.complex) {
        (Built::Laurent(lc), ComplexKind::Tchlog) => Some(MorseClassification::of(lc)?),
        (Built::Laurent(lc), ComplexKind::Morse) => Some(MorseClassification::from_tags(
            lc.dims()
                .iter()
                .map(|&d| vec![MorseTag::Critical; d])
                .collect(),
        )),
        _ => None,
    };
    for &k in &degrees {
        let (matrix, basis) = match &c {
            Built::Integer(ic) => (
                MatrixFile::from_integer(ic.boundary(k)),
                integer_basis_csv(ic, k),
            ),
            Built::Laurent(lc) => (
                MatrixFile::from_laurent(lc.boundary(k), lc.vars()),
                basis_csv(lc, tags.as_ref(), k),
            ),
        };
        let mpath = dir.join(format!("{stem}_d{k}.json"));
        let bpath = dir.join(format!("{stem}_basis{k}.csv"));
        let text = match cfg.format {
            Format::Json => serde_json::to_string(&matrix)? + "\n",
            Format::Csv => {
                let mut s = format!(
                    "# rows={} cols={} ring={}\nrow,col,coeff\n",
                    matrix.rows, matrix.cols, matrix.ring
                );
                for (i, j, v) in &matrix.entries {
                    writeln!(s, "{i},{j},{v}").unwrap();
                }
                s
            }
        };
        let mpath = if cfg.format == Format::Csv {
            mpath.with_extension("csv")
        } else {
            mpath
        };
        write_file(&mpath, &text)?;
        write_file(&bpath, &basis)?;
        written.push(
            json!({"degree": k, "rows": matrix.rows, "cols": matrix.cols,
            "matrix": mpath.display().to_string(), "basis": bpath.display().to_string()}),
        );
    }
    let mut csv = String::from("degree,rows,cols,matrix,basis\n");
    for w in &written {
        writeln!(
            csv,
            "{},{},{},{},{}",
            w["degree"],
            w["rows"],
            w["cols"],
            w["matrix"].as_str().unwrap(),
            w["basis"].as_str().unwrap()
        )
        .unwrap();
    }
    let json = json!({"command": "export", "complex": cfg.complex, "n": cfg.n, "files": written});
    Ok(Report::new(json, csv))
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(Error::from)
}

/// Parse, run and print; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("braidlog: {e}");
            match e {
                Error::Usage(_) => 2,
                _ => 1,
            }
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    let (kind, args) = match command {
        Command::Cells(a) => (CommandKind::Cells, a),
        Command::Homology(a) => (CommandKind::Homology, a),
        Command::Verify(a) => (CommandKind::Verify, a),
        Command::Export(a) => (CommandKind::Export, a),
    };
    let cfg = RunConfig::from_args(kind, args)?;
    let report = match kind {
        CommandKind::Cells => cmd_cells(&cfg)?,
        CommandKind::Homology => cmd_homology(&cfg)?,
        CommandKind::Verify => cmd_verify(&cfg)?,
        CommandKind::Export => cmd_export(&cfg)?,
    };
    let text = report.render(cfg.format);
    match (&cfg.out, kind) {
        (Some(path), CommandKind::Cells | CommandKind::Homology | CommandKind::Verify) => {
            write_file(path, &text)?
        }
        _ => print!("{text}"),
    }
    Ok(if report.pass { 0 } else { 1 })
}
