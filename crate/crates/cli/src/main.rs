//! Command line frontend for the largeness pipeline.
//!
//! Exit codes: 0 for success (including a Refuted verdict and a found
//! certificate), 1 for usage, parse, or verification failures, 2 for a
//! negative but well-formed answer (certificate not found, refutation
//! inconclusive).

use anyhow::{bail, Context, Result};
use bplarge::euclid::growth_experiment;
use bplarge::lowindex::RefutationDto;
use bplarge::{
    certify_large, cyclic_cover, make_good, refute_largeness_at_index, verify_subgroup,
    Automorphism, CertificateDto, CertifyOptions, CertifyOutcome, GoodPresentation, KStat,
    LargenessCertificate, Presentation, PresentationDto, SubgroupDto, Verdict,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "bplarge",
    version,
    about = "Largeness certificates for group presentations of deficiency at least two"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a presentation file and echo its canonical form
    Parse(ParseArgs),
    /// Normalize so a distinguished generator has zero exponent sum in
    /// every relator; reports the automorphism and its growth accounting
    Goodpres(GoodpresArgs),
    /// Build the index-k cyclic cover subgroup presentation
    Cover(CoverArgs),
    /// Search covers of increasing index for a rank-2 surjection witness
    Certify(CertifyArgs),
    /// Re-check a certificate file from scratch
    Verify(VerifyArgs),
    /// Check that no subgroup up to an index bound can surject rank 2
    Refute(RefuteArgs),
    /// Measure word growth under the exponent elimination automorphisms
    Growth(GrowthArgs),
}

#[derive(Args)]
struct ParseArgs {
    /// Presentation file
    input: PathBuf,
    /// Write output here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GoodpresArgs {
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CoverArgs {
    input: PathBuf,
    /// Cover index
    #[arg(short, long)]
    k: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CertifyArgs {
    input: PathBuf,
    /// Largest cover index to try (default: longest relator + 1)
    #[arg(long)]
    kmax: Option<usize>,
    /// Search node budget per cover index
    #[arg(long, default_value_t = 200_000)]
    budget: u64,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Certificate JSON file
    certificate: PathBuf,
}

#[derive(Args)]
struct RefuteArgs {
    input: PathBuf,
    /// Index bound to exhaust
    #[arg(long)]
    index: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GrowthArgs {
    /// Rank of the free group sampled from
    #[arg(long, default_value_t = 2)]
    rank: usize,
    /// Comma separated word lengths
    #[arg(long, value_delimiter = ',', required = true)]
    lengths: Vec<usize>,
    /// Samples per length
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Master seed; every row derives from it deterministically
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    // Exit 2 is reserved for well-formed negative answers (no certificate
    // found, sweep inconclusive); usage problems exit 1 like other errors.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Parse(a) => cmd_parse(&a),
        Command::Goodpres(a) => cmd_goodpres(&a),
        Command::Cover(a) => cmd_cover(&a),
        Command::Certify(a) => cmd_certify(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Refute(a) => cmd_refute(&a),
        Command::Growth(a) => cmd_growth(&a),
    }
}

fn read_presentation(path: &Path) -> Result<Presentation> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Presentation::parse(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn emit_json<T: Serialize>(out: &Option<PathBuf>, value: &T) -> Result<u8> {
    let mut json = serde_json::to_string_pretty(value)?;
    json.push('\n');
    emit(out, &json)?;
    Ok(0)
}

fn cmd_parse(a: &ParseArgs) -> Result<u8> {
    let p = read_presentation(&a.input)?;
    let mut text = String::new();
    writeln!(text, "# rank: {}", p.rank())?;
    writeln!(text, "# relators: {}", p.relators().len())?;
    writeln!(text, "# deficiency: {}", p.deficiency())?;
    writeln!(text, "# deficiency at least two: {}", p.is_bp())?;
    text.push_str(&p.to_text());
    emit(&a.out, &text)?;
    Ok(0)
}

/// Growth accounting of one relator's normalization.
#[derive(Serialize)]
struct TraceSummary {
    relator: usize,
    initial_length: usize,
    final_length: usize,
    steps: usize,
    product_p: String,
}

#[derive(Serialize)]
struct GoodReport {
    format: u32,
    kind: &'static str,
    original: PresentationDto,
    base: PresentationDto,
    t_index: usize,
    t: String,
    automorphism: Automorphism,
    growth: Vec<TraceSummary>,
}

fn good_report(original: &Presentation, g: &GoodPresentation) -> GoodReport {
    GoodReport {
        format: 1,
        kind: "good_presentation",
        original: PresentationDto::from(original),
        base: PresentationDto::from(&g.base),
        t_index: g.t_index,
        t: g.base.generator_names()[g.t_index].clone(),
        automorphism: g.automorphism.clone(),
        growth: g
            .traces
            .iter()
            .enumerate()
            .map(|(i, t)| TraceSummary {
                relator: i,
                initial_length: t.initial_length,
                final_length: t.final_length,
                steps: t.steps.len(),
                product_p: t.product_p.to_string(),
            })
            .collect(),
    }
}

fn cmd_goodpres(a: &GoodpresArgs) -> Result<u8> {
    let p = read_presentation(&a.input)?;
    let g = make_good(&p).context("normalization failed")?;
    emit_json(&a.out, &good_report(&p, &g))
}

/// Reuse a presentation that is already good, distinguishing the first
/// generator with zero exponent sum everywhere; otherwise normalize.
fn good_form_of(p: &Presentation) -> Result<GoodPresentation> {
    let matrix = p.exponent_matrix();
    for col in 0..p.rank() {
        if matrix.column_all_zero(col) {
            return GoodPresentation::already_good(p, col).map_err(Into::into);
        }
    }
    make_good(p).map_err(Into::into)
}

#[derive(Serialize)]
struct CoverReport {
    format: u32,
    kind: &'static str,
    base: PresentationDto,
    t_index: usize,
    k: usize,
    generator_count: usize,
    relator_count: usize,
    deficiency: i64,
    subgroup: SubgroupDto,
}

fn cmd_cover(a: &CoverArgs) -> Result<u8> {
    let p = read_presentation(&a.input)?;
    let g = good_form_of(&p).context("no usable distinguished generator")?;
    let sub = cyclic_cover(&g, a.k).context("cover construction failed")?;
    if !verify_subgroup(&sub, &g, a.k) {
        bail!("internal consistency check failed on the cover");
    }
    let report = CoverReport {
        format: 1,
        kind: "cyclic_cover",
        base: PresentationDto::from(&g.base),
        t_index: g.t_index,
        k: a.k,
        generator_count: sub.generator_count(),
        relator_count: sub.relator_count(),
        deficiency: sub.deficiency(),
        subgroup: SubgroupDto::new(&sub, g.base.generator_names()),
    };
    emit_json(&a.out, &report)
}

#[derive(Serialize)]
struct NotFoundReport {
    format: u32,
    kind: &'static str,
    k_stats: Vec<KStat>,
}

fn cmd_certify(a: &CertifyArgs) -> Result<u8> {
    let p = read_presentation(&a.input)?;
    let opts = CertifyOptions {
        k_max: a.kmax,
        budget: a.budget,
        jobs: a.jobs,
    };
    match certify_large(&p, &opts).context("certification failed")? {
        CertifyOutcome::Found(cert) => {
            emit_json(&a.out, &CertificateDto::from(cert.as_ref()))?;
            Ok(0)
        }
        CertifyOutcome::NotFound { k_stats } => {
            let report = NotFoundReport {
                format: 1,
                kind: "certify_not_found",
                k_stats,
            };
            emit_json(&a.out, &report)?;
            Ok(2)
        }
    }
}

fn cmd_verify(a: &VerifyArgs) -> Result<u8> {
    let text = fs::read_to_string(&a.certificate)
        .with_context(|| format!("cannot read {}", a.certificate.display()))?;
    let dto: CertificateDto = serde_json::from_str(&text)
        .with_context(|| format!("cannot parse {}", a.certificate.display()))?;
    let cert = LargenessCertificate::try_from(&dto).context("malformed certificate")?;
    cert.audit().context("certificate audit failed")?;
    println!(
        "certificate ok: cover index {}, subgroup on {} generators, target letters assigned",
        cert.k,
        cert.subgroup.generator_count()
    );
    Ok(0)
}

fn cmd_refute(a: &RefuteArgs) -> Result<u8> {
    if a.index == 0 {
        bail!("--index must be at least 1");
    }
    let p = read_presentation(&a.input)?;
    let refutation = refute_largeness_at_index(&p, a.index).context("refutation sweep failed")?;
    emit_json(&a.out, &RefutationDto::from(&refutation))?;
    Ok(match refutation.verdict {
        Verdict::Refuted => 0,
        Verdict::Inconclusive => 2,
    })
}

fn cmd_growth(a: &GrowthArgs) -> Result<u8> {
    if a.rank < 2 {
        bail!("--rank must be at least 2");
    }
    if a.lengths.is_empty() {
        bail!("--lengths must name at least one length");
    }
    let samples = growth_experiment(a.rank, &a.lengths, a.samples, a.seed, a.jobs);
    let mut csv = format!("# seed: {}\n", a.seed);
    csv.push_str("length,final_length,steps,productP,seed,sample\n");
    for s in &samples {
        writeln!(
            csv,
            "{},{},{},{},{},{}",
            s.length, s.final_length, s.steps, s.product_p, s.seed, s.sample
        )?;
    }
    emit(&a.out, &csv)?;
    Ok(0)
}
