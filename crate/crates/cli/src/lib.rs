//! `modinv` command line: argument parsing, file loading and report
//! rendering over the `modinv` library.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check
//! fails (the report is still printed), 2 for unusable input.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use modinv::characters::{verify_ortho1, verify_ortho2, verify_trace_formula, CharacterReport};
use modinv::interface::{
    decode_chi_tables, decode_context, decode_modular_data, decode_z_matrix, encode_modular_data,
    encode_report, encode_z_matrix, DataFile,
};
use modinv::invariant_search::{
    enumerate_invariants_with, is_modular_invariant, EnumerationConfig, Mode, SearchError, ZMatrix,
};
use modinv::modular_data::{catalog, CatalogId, ModularData, ModularDataError};
use modinv::morita_context::{exponents_check, MoritaContextData};
use modinv::obstruction::{check_obstruction, check_series, double_z, trace_identities};

#[derive(Parser)]
#[command(name = "modinv", version, about = "Exact modular data and modular invariant checks")]
struct Cli {
    /// `text` prints a human-readable table, `structured` a JSON report.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Command {
    /// Check the modular data axioms of a file or catalog entry.
    Validate { md: String },
    /// List or export the built-in catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Print the Verlinde fusion rules.
    Fusion { md: String },
    /// Enumerate modular invariants.
    Enumerate {
        md: String,
        /// Only invariants with Σ z d d = μ (the default).
        #[arg(long, conflicts_with = "bound")]
        physical: bool,
        /// Every normalized commutant point with entries at most B.
        #[arg(long, value_name = "B")]
        bound: Option<u64>,
        /// Also write one z_matrix file per invariant into this directory.
        #[arg(long, value_name = "DIR")]
        out_dir: Option<PathBuf>,
    },
    /// Check that a Z-matrix is a modular invariant.
    Check { md: String, z: PathBuf },
    /// Evaluate the integral identities on every multiset of the given Z-matrices.
    Obstruct {
        md: String,
        #[arg(required = true)]
        z: Vec<PathBuf>,
        #[arg(short = 'n', default_value_t = 3)]
        n: usize,
    },
    /// Compare the generating series against the identity for one Z-matrix.
    Series {
        md: String,
        z: PathBuf,
        #[arg(short = 'n', default_value_t = 4)]
        n: usize,
    },
    /// Power-sum check of the exponents of a context.
    Exponents { context: PathBuf },
    /// Form μ⁻¹ Z₁ Z₂ᵗ and check its invariance.
    DoubleZ { md: String, z1: PathBuf, z2: PathBuf },
    /// Verify a character relation on a context.
    Ortho {
        context: PathBuf,
        chi: PathBuf,
        #[arg(long, value_enum)]
        relation: Relation,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    List,
    Export {
        id: String,
        /// Write to this path instead of stdout.
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Relation {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    Trace,
}

/// Input problems; always exit code 2.
struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

struct Output<'a> {
    format: Format,
    out: &'a mut dyn Write,
}

impl Output<'_> {
    fn line(&mut self, s: impl AsRef<str>) {
        let _ = writeln!(self.out, "{}", s.as_ref());
    }

    /// In structured mode the payload is the whole output; text mode
    /// calls `text` instead.
    fn emit<T: Serialize>(&mut self, payload: &T, text: impl FnOnce(&mut Self)) {
        match self.format {
            Format::Structured => {
                let _ = self.out.write_all(encode_report(payload).to_text().as_bytes());
            }
            Format::Text => text(self),
        }
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

fn load_md(arg: &str) -> Result<ModularData, InputError> {
    let path = Path::new(arg);
    if path.exists() {
        return Ok(decode_modular_data(&DataFile::read(path)?)?);
    }
    let id: CatalogId = arg
        .parse()
        .map_err(|e: ModularDataError| InputError(format!("{arg}: not a file and {e}")))?;
    Ok(catalog(&id)?)
}

fn load_z(path: &Path) -> Result<ZMatrix, InputError> {
    decode_z_matrix(&DataFile::read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn load_context(path: &Path) -> Result<MoritaContextData, InputError> {
    decode_context(&DataFile::read(path)?).map_err(|e| InputError(format!("{}: {e}", path.display())))
}

fn show_matrix(o: &mut Output<'_>, rows: &[Vec<i64>]) {
    for row in rows {
        o.line(format!(
            "  [{}]",
            row.iter().map(|x| format!("{x:>2}")).collect::<Vec<_>>().join(" ")
        ));
    }
}

/// Run the command line on `argv` (program name first).
pub fn cli_dispatch<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    2
                }
            };
        }
    };
    let mut o = Output {
        format: cli.format,
        out,
    };
    match run(cli.command, &mut o) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn run(command: Command, o: &mut Output<'_>) -> Result<bool, InputError> {
    match command {
        Command::Validate { md } => {
            let md = load_md(&md)?;
            let report = md.validate();
            let ok = report.passed();
            o.emit(&report, |o| {
                o.line(format!("modular data {} (rank {}, conductor {})", md.name(), md.rank(), md.conductor()));
                for c in &report.checks {
                    o.line(format!("  {:<4} {:?}: {}", verdict(c.passed), c.axiom, c.detail));
                }
                o.line(verdict(ok));
            });
            Ok(ok)
        }
        Command::Catalog { action: CatalogAction::List } => {
            let ids: Vec<String> = CatalogId::listing().iter().map(|i| i.to_string()).collect();
            o.emit(&ids, |o| ids.iter().for_each(|i| o.line(i)));
            Ok(true)
        }
        Command::Catalog {
            action: CatalogAction::Export { id, output },
        } => {
            let id: CatalogId = id.parse()?;
            let f = encode_modular_data(&catalog(&id)?);
            match output {
                Some(p) => f.write(&p)?,
                None => {
                    let _ = o.out.write_all(f.to_text().as_bytes());
                }
            }
            Ok(true)
        }
        Command::Fusion { md } => {
            let md = load_md(&md)?;
            let fr = match md.verlinde_fusion() {
                Ok(fr) => fr,
                Err(e @ ModularDataError::NonIntegralFusion { .. }) => {
                    o.line(format!("FAIL {e}"));
                    return Ok(false);
                }
                Err(e) => return Err(e.into()),
            };
            let labels = md.labels();
            let mut rules = Vec::new();
            for i in 0..fr.rank() {
                for j in i..fr.rank() {
                    let terms: Vec<(String, u64)> = (0..fr.rank())
                        .filter(|k| fr.get(i, j, *k) > 0)
                        .map(|k| (labels[k].clone(), fr.get(i, j, k)))
                        .collect();
                    rules.push((labels[i].clone(), labels[j].clone(), terms));
                }
            }
            o.emit(&rules, |o| {
                for (a, b, terms) in &rules {
                    let rhs: Vec<String> = terms
                        .iter()
                        .map(|(l, m)| if *m == 1 { l.clone() } else { format!("{m}*{l}") })
                        .collect();
                    o.line(format!("{a} x {b} = {}", rhs.join(" + ")));
                }
            });
            Ok(true)
        }
        Command::Enumerate {
            md,
            physical: _,
            bound,
            out_dir,
        } => {
            let md = load_md(&md)?;
            let mode = bound.map_or(Mode::Physical, Mode::Bounded);
            let zs = match enumerate_invariants_with(&md, &EnumerationConfig::new(mode)) {
                Ok(zs) => zs,
                Err(e @ SearchError::SearchBudgetExceeded { .. }) => {
                    return Err(InputError(format!("{e}; raise MODINV_NODE_BUDGET")))
                }
                Err(e) => return Err(e.into()),
            };
            if let Some(dir) = out_dir {
                std::fs::create_dir_all(&dir).map_err(|e| InputError(format!("{}: {e}", dir.display())))?;
                for (i, z) in zs.iter().enumerate() {
                    encode_z_matrix(z, Some(md.name())).write(&dir.join(format!("{}.z{i}.json", md.name())))?;
                }
            }
            let rows: Vec<Vec<Vec<i64>>> = zs.iter().map(|z| z.to_i64_rows()).collect();
            o.emit(&rows, |o| {
                o.line(format!("{} invariant(s) for {}", rows.len(), md.name()));
                for (i, (z, r)) in zs.iter().zip(&rows).enumerate() {
                    let t = trace_identities(z);
                    o.line(format!("Z{i}: Tr Z = {}, Tr ZZt = {}", t.tr_z, t.tr_zzt));
                    show_matrix(o, r);
                }
            });
            Ok(true)
        }
        Command::Check { md, z } => {
            let md = load_md(&md)?;
            let z = load_z(&z)?;
            let check = is_modular_invariant(&md, &z.to_i64_rows())?;
            let dims = md.dims_unchecked();
            let physical = check.is_invariant && z.dimension_pairing(&dims) == md.global_dim_unchecked();
            let normalized = z.is_normalized(md.unit());
            #[derive(Serialize)]
            struct CheckReport<'a> {
                modular_data: &'a str,
                invariant: &'a modinv::invariant_search::InvariantCheck,
                normalized: bool,
                physical: bool,
            }
            let ok = check.is_invariant && normalized;
            o.emit(
                &CheckReport {
                    modular_data: md.name(),
                    invariant: &check,
                    normalized,
                    physical,
                },
                |o| {
                    o.line(format!("commutes with S and T: {}", verdict(check.is_invariant)));
                    if let Some(w) = &check.witness {
                        o.line(format!("  {w}"));
                    }
                    o.line(format!("unit entry is 1:       {}", verdict(normalized)));
                    o.line(format!("physical (sum z d d = mu): {}", if physical { "yes" } else { "no" }));
                    o.line(verdict(ok));
                },
            );
            Ok(ok)
        }
        Command::Obstruct { md, z, n } => {
            let md = load_md(&md)?;
            let zs = z.iter().map(|p| load_z(p)).collect::<Result<Vec<_>, _>>()?;
            let report = check_obstruction(&md, &zs, n)?;
            o.emit(&report, |o| {
                o.line(format!("{}: {} records up to n = {}", md.name(), report.records.len(), n));
                for r in &report.records {
                    let rhs = r.rhs.map_or("-".to_string(), |v| v.to_string());
                    let eq = match r.equal {
                        Some(true) => "equal",
                        Some(false) => "DIFFER",
                        None => "",
                    };
                    o.line(format!(
                        "  {:<4} {:?} n={} tuple={:?} lhs={} rhs={} {}",
                        verdict(r.holds()),
                        r.variant,
                        r.n,
                        r.tuple,
                        r.lhs,
                        rhs,
                        eq
                    ));
                }
                o.line(verdict(report.passed));
            });
            Ok(report.passed)
        }
        Command::Series { md, z, n } => {
            let md = load_md(&md)?;
            let z = load_z(&z)?;
            let checks = check_series(&md, &z, n)?;
            let ok = checks.iter().all(|c| c.equal);
            o.emit(&checks, |o| {
                for c in &checks {
                    let lhs = c.lhs.as_ref().map_or("-".to_string(), |v| v.to_string());
                    o.line(format!(
                        "  {:<4} n={} coefficient={} lhs={} rhs={}",
                        verdict(c.equal),
                        c.n,
                        c.coefficient,
                        lhs,
                        c.rhs
                    ));
                }
                o.line(verdict(ok));
            });
            Ok(ok)
        }
        Command::Exponents { context } => {
            let ctx = load_context(&context)?;
            let report = exponents_check(&ctx)?;
            o.emit(&report, |o| {
                o.line(format!(
                    "{}: sum of exponents {} vs module rank {}",
                    report.context, report.diagonal_sum, report.module_rank
                ));
                let failed: Vec<_> = report.checks.iter().filter(|c| !c.equal).collect();
                o.line(format!("  {} power sums checked, {} failed", report.checks.len(), failed.len()));
                for c in failed {
                    o.line(format!(
                        "  FAIL generator {} power {}: trace {} vs {}",
                        c.generator, c.power, c.trace, c.spectral_sum
                    ));
                }
                o.line(verdict(report.passed));
            });
            Ok(report.passed)
        }
        Command::DoubleZ { md, z1, z2 } => {
            let md = load_md(&md)?;
            let (z1, z2) = (load_z(&z1)?, load_z(&z2)?);
            let d = double_z(&md, &z1, &z2)?;
            let ok = d.passed();
            o.emit(&d, |o| {
                o.line("Z1 Z2t:");
                let rows: Vec<Vec<i64>> = d
                    .integer_part
                    .iter()
                    .map(|r| r.iter().map(|x| *x as i64).collect())
                    .collect();
                show_matrix(o, &rows);
                o.line(format!("commutes with S: {}", verdict(d.commutes_with_s)));
                o.line(format!("commutes with T: {}", verdict(d.commutes_with_t)));
                o.line(format!(
                    "mu Tr = {}: {}",
                    d.mu_trace,
                    verdict(d.mu_trace_is_nonneg_integer)
                ));
                o.line(verdict(ok));
            });
            Ok(ok)
        }
        Command::Ortho { context, chi, relation } => {
            let ctx = load_context(&context)?;
            let tables = decode_chi_tables(&DataFile::read(&chi)?)
                .map_err(|e| InputError(format!("{}: {e}", chi.display())))?;
            let reports = ortho_reports(&ctx, &tables, relation)?;
            let ok = reports.iter().all(|r| r.passed);
            o.emit(&reports, |o| {
                for r in &reports {
                    o.line(format!("{} {}: {} cells", verdict(r.passed), r.relation, r.checks.len()));
                    for c in r.failures() {
                        o.line(format!("  FAIL at {:?}: lhs={} rhs={}", c.indices, c.lhs, c.rhs));
                    }
                    for d in &r.diagnostics {
                        o.line(format!("  note: {d}"));
                    }
                }
                o.line(verdict(ok));
            });
            Ok(ok)
        }
    }
}

/// One report per simple `Ỹ` (ortho1), per pair of simples (ortho2), or a
/// single trace-formula report.
fn ortho_reports(
    ctx: &MoritaContextData,
    tables: &modinv::interface::CharacterTables,
    relation: Relation,
) -> Result<Vec<CharacterReport>, InputError> {
    if relation == Relation::Trace {
        let xi = tables
            .double
            .as_ref()
            .ok_or_else(|| InputError("character file has no double table".into()))?;
        return Ok(vec![verify_trace_formula(ctx, xi)?]);
    }
    let chi = tables
        .single
        .as_ref()
        .ok_or_else(|| InputError("character file has no single table".into()))?;
    let fr = ctx
        .dual_fusion
        .as_ref()
        .ok_or_else(|| InputError("context has no dual fusion ring".into()))?;
    let simples: Vec<Vec<u64>> = (0..fr.rank()).map(|y| fr.simple(y)).collect();
    let mut out = Vec::new();
    for y in &simples {
        match relation {
            Relation::One => out.push(verify_ortho1(ctx, chi, y)?),
            _ => {
                for yp in &simples {
                    out.push(verify_ortho2(ctx, chi, y, yp)?);
                }
            }
        }
    }
    Ok(out)
}
