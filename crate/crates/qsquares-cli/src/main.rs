use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use qsquares::corpus::{builtin, parse_corpus, CorpusEntry};
use qsquares::partitions::{conjecture_scan, Conjecture};
use qsquares::squares::{parametric_instances, sign_pattern, Family, SquareComponent};
use qsquares::weierstrass::{instantiate_tadd, reduce_threl, search_specialization};
use qsquares::{
    prove, EProduct, Exponent, PochProduct, QSeries, SignedMonomial, Verdict, WeierstrassInstance,
};

#[derive(Parser)]
#[command(
    name = "qsquares",
    version,
    about = "Prove and explore product formulae for signed square-sequence series"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Prove corpus statements with the valence bound.
    Prove {
        /// Corpus file in TOML; the built-in corpus is used when omitted.
        #[arg(long)]
        corpus: Option<PathBuf>,
        /// Restrict to these tags.
        #[arg(long)]
        only: Vec<String>,
        /// Write one JSON certificate per statement into this directory.
        #[arg(long)]
        emit_certs: Option<PathBuf>,
        /// Also compare coefficients below `q^T` (never fewer than the bound requires).
        #[arg(long = "check-through")]
        check_through: Option<i64>,
    },
    /// Expand a product below `q^T`.
    Expand {
        /// Theta quotient such as `105: E22 / E43`.
        #[arg(
            long,
            conflicts_with = "poch",
            required_unless_present = "poch",
            allow_hyphen_values = true
        )]
        eproduct: Option<String>,
        /// Pochhammer product such as `(q,q^6,q^7;q^7) / (q,q^4;q^5)`.
        #[arg(long, allow_hyphen_values = true)]
        poch: Option<String>,
        #[arg(long = "T", default_value_t = 20)]
        t: i64,
    },
    /// Square-class specifications and parametric families.
    Squares {
        #[command(subcommand)]
        command: SquaresCommand,
    },
    /// Three-term theta relations.
    Weierstrass {
        #[command(subcommand)]
        command: WeierstrassCommand,
    },
    /// Partition identities and conjecture scans.
    Partitions {
        #[command(subcommand)]
        command: PartitionsCommand,
    },
}

#[derive(Subcommand)]
enum SquaresCommand {
    /// Compile a specification into theta products.
    Compile {
        /// For example `K=840 bsq=361 pattern=floor(n+4,8)`.
        #[arg(long)]
        spec: String,
    },
    /// Print the sign bits `t(n)` of a specification.
    Pattern {
        #[arg(long)]
        spec: String,
        #[arg(long, default_value_t = 32)]
        terms: usize,
    },
    /// Prove every admissible member of a family with `P <= pmax`.
    Sweep {
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 60)]
        pmax: i64,
    },
}

#[derive(Subcommand)]
enum WeierstrassCommand {
    /// Check `X1 + X2 + X3 = 0` for one instance.
    Verify {
        /// For example `base=35 u=q^10 v=q^3 x=q^14 y=q^6`.
        #[arg(long)]
        instance: String,
        /// Truncation; defaults to six times the base modulus.
        #[arg(long = "T")]
        t: Option<i64>,
    },
    /// Search for instances collapsing a two-term target to one product.
    Search {
        /// File with the two target products, one per line (`#` starts a comment).
        #[arg(long)]
        target: PathBuf,
        /// Largest exponent tried for u, v, x, y.
        #[arg(long)]
        bound: i64,
        /// Base modulus; inferred when every atom of the target shares one modulus.
        #[arg(long)]
        base: Option<i64>,
        #[arg(long = "T")]
        t: Option<i64>,
    },
}

#[derive(Subcommand)]
enum PartitionsCommand {
    /// Scan a conjecture for sign or zero violations.
    Scan {
        /// One of `c41`, `c41-inequalities`, `cexp`.
        #[arg(long)]
        conjecture: String,
        #[arg(long, default_value_t = 3)]
        kmax: i64,
        /// Values of `S` (used by `cexp`).
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2, 3, 4, 5, 6])]
        s: Vec<i64>,
        #[arg(long = "T", default_value_t = 300)]
        t: i64,
    },
}

struct Out {
    json: bool,
}

impl Out {
    fn emit(&self, text: impl AsRef<str>, value: Value) {
        if self.json {
            println!("{}", value);
        } else {
            println!("{}", text.as_ref());
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {}", e);
            return ExitCode::from(2);
        }
    }
    let out = Out {
        json: cli.format == Format::Json,
    };
    match run(cli.command, &out) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(2)
        }
    }
}

/// Returns whether every requested verification succeeded.
fn run(command: Command, out: &Out) -> Result<bool> {
    match command {
        Command::Prove {
            corpus,
            only,
            emit_certs,
            check_through,
        } => cmd_prove(
            corpus.as_deref(),
            &only,
            emit_certs.as_deref(),
            check_through,
            out,
        ),
        Command::Expand { eproduct, poch, t } => cmd_expand(eproduct, poch, t, out),
        Command::Squares { command } => match command {
            SquaresCommand::Compile { spec } => cmd_compile(&spec, out),
            SquaresCommand::Pattern { spec, terms } => cmd_pattern(&spec, terms, out),
            SquaresCommand::Sweep { family, pmax } => cmd_sweep(&family, pmax, out),
        },
        Command::Weierstrass { command } => match command {
            WeierstrassCommand::Verify { instance, t } => cmd_tadd(&instance, t, out),
            WeierstrassCommand::Search {
                target,
                bound,
                base,
                t,
            } => cmd_search(&target, bound, base, t, out),
        },
        Command::Partitions { command } => match command {
            PartitionsCommand::Scan {
                conjecture,
                kmax,
                s,
                t,
            } => cmd_scan(&conjecture, kmax, &s, t, out),
        },
    }
}

fn load_corpus(path: Option<&Path>) -> Result<Vec<CorpusEntry>> {
    let Some(path) = path else {
        return Ok(builtin());
    };
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_corpus(&text).map_err(|e| anyhow!("{}: {}", path.display(), e))
}

fn cmd_prove(
    corpus: Option<&Path>,
    only: &[String],
    certs_dir: Option<&Path>,
    check_through: Option<i64>,
    out: &Out,
) -> Result<bool> {
    let mut entries = load_corpus(corpus)?;
    if !only.is_empty() {
        for tag in only {
            if !entries.iter().any(|e| &e.tag == tag) {
                bail!("no statement tagged '{}'", tag);
            }
        }
        entries.retain(|e| only.contains(&e.tag));
    }
    if let Some(dir) = certs_dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let results: Vec<Result<(CorpusEntry, qsquares::ProofCertificate, Option<String>)>> = entries
        .into_par_iter()
        .map(|entry| {
            let stmt = entry
                .to_statement()
                .map_err(|e| anyhow!("{}: {}", entry.tag, e))?;
            let cert = prove(&stmt).map_err(|e| anyhow!("{}: {}", entry.tag, e))?;
            let mut extra = None;
            if let Some(t) = check_through {
                if t < cert.checked_through {
                    bail!(
                        "{}: --check-through {} is below the bound {}",
                        entry.tag,
                        t,
                        cert.checked_through
                    );
                }
                if cert.verdict.is_proven() {
                    if let Some((i, den, c)) = stmt.residual(t + 1)? {
                        extra = Some(format!("coefficient {} at q^{}", c, Exponent::new(i, den)));
                    }
                }
            }
            Ok((entry, cert, extra))
        })
        .collect();
    let mut ok = true;
    for r in results {
        let (entry, cert, extra) = r?;
        if let Some(dir) = certs_dir {
            let file = dir.join(format!("{}.json", entry.tag.replace(['/', '\\'], "_")));
            fs::write(&file, cert.to_json())
                .with_context(|| format!("writing {}", file.display()))?;
        }
        ok &= cert.verdict.is_proven() && extra.is_none();
        let mut text = format!(
            "{:<12} N={:<4} U={:<4} {}",
            entry.tag, cert.level, cert.bound, cert.verdict
        );
        if let Some(x) = &extra {
            text.push_str(&format!("; extra check failed: {}", x));
        }
        out.emit(
            text,
            json!({
                "tag": entry.tag,
                "level": cert.level,
                "bound": cert.bound,
                "checked_through": cert.checked_through,
                "verdict": cert.verdict,
                "extra_check_failure": extra,
            }),
        );
    }
    Ok(ok)
}

fn series_record(s: &QSeries) -> Vec<Value> {
    s.terms()
        .map(|(i, c)| json!([Exponent::new(i, s.den()).to_string(), c.to_string()]))
        .collect()
}

fn cmd_expand(eproduct: Option<String>, poch: Option<String>, t: i64, out: &Out) -> Result<bool> {
    if t < 0 {
        bail!("--T must be nonnegative");
    }
    let product = match (eproduct, poch) {
        (Some(e), _) => e
            .parse::<EProduct>()
            .map_err(|x| anyhow!("{}", x))?
            .to_poch(),
        (None, Some(p)) => p.parse::<PochProduct>().map_err(|x| anyhow!("{}", x))?,
        (None, None) => bail!("give --eproduct or --poch"),
    };
    let canon = product.canonical()?;
    let series = canon.expand_unit(t)?;
    let scalar = canon.scalar.to_string();
    let text = if scalar == "1" {
        series.to_string()
    } else {
        format!("{} * ({})", scalar, series)
    };
    out.emit(
        text,
        json!({ "product": product.to_string(), "scalar": scalar, "truncation": t, "terms": series_record(&series) }),
    );
    Ok(true)
}

fn parse_component(spec: &str) -> Result<SquareComponent> {
    spec.parse::<SquareComponent>()
        .map_err(|e| anyhow!("{}", e))
}

fn cmd_compile(spec: &str, out: &Out) -> Result<bool> {
    let component = parse_component(spec)?;
    let products = component.compile()?;
    let text: Vec<String> = products.iter().map(|p| p.to_string()).collect();
    out.emit(
        text.join("\n"),
        json!({ "spec": component.to_string(), "products": text }),
    );
    Ok(true)
}

fn cmd_pattern(spec: &str, terms: usize, out: &Out) -> Result<bool> {
    let component = parse_component(spec)?;
    let bits = sign_pattern(&component.spec, terms)?;
    let text: String = bits.iter().map(|b| char::from(b'0' + b)).collect();
    out.emit(text, json!({ "spec": component.to_string(), "bits": bits }));
    Ok(true)
}

fn cmd_sweep(family: &str, pmax: i64, out: &Out) -> Result<bool> {
    let family: Family = family.parse()?;
    let (instances, skipped) = parametric_instances(family, pmax);
    let results: Vec<Result<(Verdict, bool)>> = instances
        .par_iter()
        .map(|inst| {
            let cert = prove(&inst.statement)?;
            if cert.verdict.is_proven() {
                return Ok((cert.verdict, false));
            }
            let Some(th) = inst.threl else {
                return Ok((cert.verdict, false));
            };
            let r = reduce_threl(th.which, th.n, SignedMonomial::q(th.u_exp), 18 * th.n)?;
            Ok((
                if r.verified {
                    Verdict::Proven
                } else {
                    cert.verdict
                },
                r.verified,
            ))
        })
        .collect();
    let mut ok = true;
    for (inst, r) in instances.iter().zip(results) {
        let (verdict, via_relation) = r?;
        ok &= verdict.is_proven();
        let how = if via_relation {
            " (three-term relation)"
        } else {
            ""
        };
        let case = if inst.case == "-" {
            String::new()
        } else {
            format!(" {}", inst.case)
        };
        out.emit(
            format!(
                "{} P={} a={}{}: {}{}",
                family, inst.p, inst.a, case, verdict, how
            ),
            json!({
                "family": family.name(),
                "p": inst.p,
                "a": inst.a,
                "case": inst.case,
                "rhs": inst.statement.rhs.to_string(),
                "verdict": verdict,
                "via_relation": via_relation,
            }),
        );
    }
    for (p, a, e) in skipped {
        out.emit(
            format!("{} P={} a={} skipped: {}", family, p, a, e),
            json!({ "family": family.name(), "p": p, "a": a, "skipped": e.to_string() }),
        );
    }
    Ok(ok)
}

fn cmd_tadd(instance: &str, t: Option<i64>, out: &Out) -> Result<bool> {
    let inst: WeierstrassInstance = instance.parse().map_err(|e| anyhow!("{}", e))?;
    let report = instantiate_tadd(&inst, t.unwrap_or(6 * inst.base_modulus))?;
    let text = match report.first_discrepancy {
        None => format!("{}: holds below q^{}", report.instance, report.truncation),
        Some((i, den)) => format!("{}: fails at q^{}", report.instance, Exponent::new(i, den)),
    };
    out.emit(text, serde_json::to_value(&report)?);
    Ok(report.holds)
}

fn read_target(path: &Path) -> Result<(PochProduct, PochProduct)> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut products = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let p = line
            .parse::<PochProduct>()
            .map_err(|e| anyhow!("{}:{}: {}", path.display(), n + 1, e))?;
        products.push(p);
    }
    match <[PochProduct; 2]>::try_from(products) {
        Ok([a, b]) => Ok((a, b)),
        Err(v) => bail!(
            "{}: expected two products, found {}",
            path.display(),
            v.len()
        ),
    }
}

fn cmd_search(
    target: &Path,
    bound: i64,
    base: Option<i64>,
    t: Option<i64>,
    out: &Out,
) -> Result<bool> {
    let (a, b) = read_target(target)?;
    let base = match base {
        Some(m) => m,
        None => {
            let mut moduli: Vec<i64> = a.atoms.iter().chain(&b.atoms).map(|x| x.modulus).collect();
            moduli.sort_unstable();
            moduli.dedup();
            match moduli[..] {
                [m] => m,
                _ => bail!(
                    "cannot infer the base modulus from {:?}; pass --base",
                    moduli
                ),
            }
        }
    };
    let hits = search_specialization((&a, &b), base, bound, t.unwrap_or(6 * base))?;
    for h in &hits {
        out.emit(h.to_string(), json!({ "instance": h.to_string() }));
    }
    if !out.json {
        eprintln!("{} instances", hits.len());
    }
    Ok(!hits.is_empty())
}

fn cmd_scan(conjecture: &str, kmax: i64, s: &[i64], t: i64, out: &Out) -> Result<bool> {
    let which: Conjecture = conjecture.parse()?;
    let report = conjecture_scan(which, kmax, s, t)?;
    if out.json {
        println!("{}", serde_json::to_string(&report)?);
    } else {
        for cell in &report.cells {
            let mut label = format!("k={}", cell.k);
            if let Some(s) = cell.s {
                label.push_str(&format!(" S={}", s));
            }
            if let Some(d) = &cell.denominator {
                label.push_str(&format!(" over {}", d));
            }
            if cell.violations.is_empty() {
                println!("{}: clean below q^{}", label, t);
            } else {
                let list: Vec<String> = cell
                    .violations
                    .iter()
                    .map(|v| format!("n={} got {} want {}", v.n, v.coefficient, v.expected))
                    .collect();
                println!("{}: {}", label, list.join(", "));
            }
        }
    }
    Ok(report.violation_count() == 0)
}
