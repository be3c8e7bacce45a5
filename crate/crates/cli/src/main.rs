use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use semijulia::constructions::ConstructionSpec;
use semijulia::dynamics::{
    fiberwise_filled, julia_chaos, julia_survivor_default, julia_word_union, DEFAULT_ESCAPE_ITERS,
};
use semijulia::semigroup::filled_in_window;
use semijulia::topology::{
    classify_fatou_components, containment_report, find_jmin_jmax, label_components, order_components,
    ComponentSummary, OrderResult,
};
use semijulia::verify::{generator_julia_rasters, run_suite, SuiteConfig, DEFAULT_SURVIVOR_ITERS};
use semijulia::{GeneratorSet, GridSpec, RasterSet};

#[derive(Parser)]
#[command(name = "semijulia", version, about = "Julia sets of polynomial semigroups on pixel grids")]
struct Cli {
    /// Cap on worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one of the explicit semigroups and write its GeneratorSet JSON.
    Construct {
        #[command(subcommand)]
        which: Construction,
        #[command(flatten)]
        out: ConstructOut,
    },
    /// Render a raster from a GeneratorSet JSON.
    Render(RenderArgs),
    /// Topological analysis of a rendered raster.
    Analyze {
        #[command(subcommand)]
        what: Analysis,
    },
    /// Run checks.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
}

#[derive(Args)]
struct ConstructOut {
    /// GeneratorSet JSON output.
    #[arg(short = 'o', long = "out", global = true)]
    out: Option<PathBuf>,
    /// Parameters, derived constants, assumption checks and window as JSON.
    #[arg(long, global = true)]
    constants: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Construction {
    Cantor {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: Complex64,
        #[arg(long)]
        k: u32,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        b: Complex64,
        #[arg(long)]
        j: u32,
        #[arg(long, default_value_t = 1)]
        m1: u32,
        #[arg(long, default_value_t = 1)]
        m2: u32,
    },
    Figure1,
    HminNot {
        #[arg(long, default_value_t = 5)]
        m2: u32,
        /// Searched when omitted.
        #[arg(long)]
        m3: Option<u32>,
    },
    KComponents {
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 5)]
        m2: u32,
        #[arg(long)]
        m3: Option<u32>,
        #[arg(long)]
        m4: Option<u32>,
    },
    Nothyp {
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1)]
        m1: u32,
        #[arg(long, default_value_t = 1)]
        m2: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Algo {
    Survivor,
    Chaos,
    WordUnion,
    Fiberwise,
    /// Raster of the smallest filled-in Julia set.
    Khat,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    gens: PathBuf,
    #[arg(long, value_enum)]
    algo: Algo,
    /// `xmin:ymin:xmax:ymax:width`.
    #[arg(long, value_parser = parse_grid, allow_hyphen_values = true)]
    grid: GridSpec,
    /// Survivor / K-hat iterations, or escape iterations for word-union.
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long = "word-len", default_value_t = 6)]
    word_len: usize,
    /// Generator indices for the fiberwise algorithm, e.g. `0,1,1,0`.
    #[arg(long, value_delimiter = ',')]
    prefix: Vec<usize>,
    #[arg(short = 'o', long = "out")]
    out: PathBuf,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Julia raster (PGM with grid comment).
    #[arg(long)]
    julia: PathBuf,
    /// GeneratorSet JSON, for K-hat and generator Julia rasters.
    #[arg(long)]
    gens: Option<PathBuf>,
    /// K-hat raster; computed from --gens when absent.
    #[arg(long)]
    khat: Option<PathBuf>,
    /// Anchor for the surrounding order; the centroid of K-hat by default.
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    anchor: Option<Complex64>,
    #[arg(short = 'o', long = "out")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Analysis {
    Components(AnalyzeArgs),
    Order(AnalyzeArgs),
    Classify(AnalyzeArgs),
    Containment(AnalyzeArgs),
}

#[derive(Subcommand)]
enum VerifyCmd {
    Suite {
        #[arg(long)]
        config: PathBuf,
        /// Report JSON output.
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
}

fn parse_grid(s: &str) -> Result<GridSpec, String> {
    GridSpec::parse(s).map_err(|e| e.to_string())
}

/// `1`, `-0.5`, `2i`, `1+2i`, `1-2.5i` or `re,im`.
fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    let bad = || format!("not a complex number: {s:?}");
    if let Some((re, im)) = s.split_once(',') {
        let re = re.trim().parse().map_err(|_| bad())?;
        let im = im.trim().parse().map_err(|_| bad())?;
        return Ok(Complex64::new(re, im));
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not an exponent sign or the leading one
    let bytes = body.as_bytes();
    let cut = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match cut {
        Some(k) => (body[..k].parse().map_err(|_| bad())?, &body[k..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

/// Error with exit status 2; the message names the offending flag.
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

fn flag_err(flag: &str, path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure(format!("{flag} {}: {e}", path.display()))
}

fn load_gens(flag: &str, path: &Path) -> Result<GeneratorSet, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| flag_err(flag, path, e))?;
    GeneratorSet::from_json(&text).map_err(|e| flag_err(flag, path, e))
}

fn load_raster(flag: &str, path: &Path) -> Result<RasterSet, Failure> {
    RasterSet::load_pgm(path).map_err(|e| flag_err(flag, path, e))
}

fn write_json(path: Option<&Path>, json: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, json).map_err(|e| flag_err("-o", p, e)),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn construct(which: &Construction, out: &ConstructOut) -> Result<(), Failure> {
    let spec = match *which {
        Construction::Cantor { a, k, b, j, m1, m2 } => ConstructionSpec::Cantor { a, k, b, j, m1, m2 },
        Construction::Figure1 => ConstructionSpec::Figure1,
        Construction::HminNot { m2, m3 } => ConstructionSpec::HminNot { m2, m3 },
        Construction::KComponents { k, m2, m3, m4 } => ConstructionSpec::KComponents { k, m2, m3, m4 },
        Construction::Nothyp { c, m1, m2 } => ConstructionSpec::Nothyp { c, m1, m2 },
    };
    let res = spec.build()?;
    let Some(path) = &out.out else {
        return Err(Failure("-o: output path required".into()));
    };
    std::fs::write(path, res.gens.to_json()?).map_err(|e| flag_err("-o", path, e))?;
    if let Some(c) = &out.constants {
        std::fs::write(c, serde_json::to_string_pretty(&res)?).map_err(|e| flag_err("--constants", c, e))?;
    }
    let w = res.window;
    println!(
        "{}: {} generators, {} assumption checks passed, window {}:{}:{}:{}",
        path.display(),
        res.gens.len(),
        res.assumption_checks.len(),
        w.xmin,
        w.ymin,
        w.xmax,
        w.ymax
    );
    Ok(())
}

fn render(a: &RenderArgs) -> Result<(), Failure> {
    let gens = load_gens("--gens", &a.gens)?;
    let raster = match a.algo {
        Algo::Survivor => julia_survivor_default(&gens, &a.grid, a.iters.unwrap_or(DEFAULT_SURVIVOR_ITERS))?,
        Algo::Chaos => julia_chaos(&gens, None, a.samples, &a.grid, a.seed)?,
        Algo::WordUnion => julia_word_union(&gens, a.word_len, &a.grid, a.iters.unwrap_or(DEFAULT_ESCAPE_ITERS))?,
        Algo::Fiberwise => {
            if a.prefix.is_empty() {
                return Err(Failure("--prefix: required for --algo fiberwise".into()));
            }
            fiberwise_filled(&gens, &a.prefix, &a.grid).map_err(|e| Failure(format!("--prefix: {e}")))?.boundary()
        }
        Algo::Khat => filled_in_window(&gens, &a.grid, a.iters.unwrap_or(DEFAULT_ESCAPE_ITERS)),
    };
    raster.save_pgm(&a.out).map_err(|e| flag_err("-o", &a.out, e))?;
    println!(
        "{}: {}x{}, {} pixels set, {} components",
        a.out.display(),
        a.grid.width,
        a.grid.height,
        raster.count(),
        label_components(&raster).count
    );
    Ok(())
}

fn khat_for(a: &AnalyzeArgs, grid: &GridSpec) -> Result<Option<RasterSet>, Failure> {
    if let Some(p) = &a.khat {
        let k = load_raster("--khat", p)?;
        if k.grid != *grid {
            return Err(Failure("--khat: grid differs from --julia".into()));
        }
        return Ok(Some(k));
    }
    match &a.gens {
        Some(p) => Ok(Some(filled_in_window(&load_gens("--gens", p)?, grid, DEFAULT_ESCAPE_ITERS))),
        None => Ok(None),
    }
}

fn analyze(what: &Analysis) -> Result<(), Failure> {
    let (a, kind) = match what {
        Analysis::Components(a) => (a, "components"),
        Analysis::Order(a) => (a, "order"),
        Analysis::Classify(a) => (a, "classify"),
        Analysis::Containment(a) => (a, "containment"),
    };
    let julia = load_raster("--julia", &a.julia)?;
    let l = label_components(&julia);
    let (json, summary) = match what {
        Analysis::Components(_) => {
            let s = ComponentSummary::new(&l, None, None);
            (serde_json::to_string_pretty(&s)?, format!("{} components", l.count))
        }
        Analysis::Order(_) => {
            let khat = khat_for(a, &julia.grid)?;
            let anchor = match (a.anchor, &khat) {
                (Some(z), _) => z,
                (None, Some(k)) => k.centroid().ok_or(Failure("--gens: K-hat raster is empty".into()))?,
                (None, None) => return Err(Failure("--anchor: give --anchor, --khat or --gens".into())),
            };
            let order = order_components(&l, anchor)?;
            let extremes = match &khat {
                Some(k) if order.is_total() => Some(find_jmin_jmax(&l, k)?),
                _ => None,
            };
            let (ids, summary) = match &order {
                OrderResult::TotalOrder(ids) => (Some(ids.clone()), format!("{} components, totally ordered", l.count)),
                OrderResult::NotTotal { first, second, verdict } => (
                    None,
                    format!("not totally ordered: components {first} and {second} are {:?}", verdict.relation),
                ),
            };
            (serde_json::to_string_pretty(&ComponentSummary::new(&l, ids, extremes))?, summary)
        }
        Analysis::Classify(_) => {
            let f = classify_fatou_components(&julia);
            let n_other = f
                .iter()
                .filter(|c| matches!(c.class, semijulia::topology::FatouClass::Other { .. }))
                .count();
            (
                serde_json::to_string_pretty(&f)?,
                format!("{} Fatou components, {} neither simply nor doubly connected", f.len(), n_other),
            )
        }
        Analysis::Containment(_) => {
            let Some(gp) = &a.gens else {
                return Err(Failure("--gens: required for containment".into()));
            };
            let gens = load_gens("--gens", gp)?;
            let khat = khat_for(a, &julia.grid)?.expect("gens given");
            let (jmin, jmax) = find_jmin_jmax(&l, &khat)?;
            let gj = generator_julia_rasters(&gens, &julia.grid)?;
            let r = containment_report(&l, &gj, jmin, jmax)?;
            let summary = format!(
                "jmin {jmin}, jmax {jmax}, J_min contains M': {}, J_max contains M'': {}",
                r.jmin_contains_m_prime, r.jmax_contains_m_double_prime
            );
            (serde_json::to_string_pretty(&r)?, summary)
        }
    };
    write_json(a.out.as_deref(), &json)?;
    if a.out.is_some() {
        println!("{kind}: {summary}");
    } else {
        eprintln!("{kind}: {summary}");
    }
    Ok(())
}

fn verify(cmd: &VerifyCmd) -> Result<bool, Failure> {
    let VerifyCmd::Suite { config, out } = cmd;
    let (cfg, base) = SuiteConfig::load(config).map_err(|e| flag_err("--config", config, e))?;
    let report = run_suite(&cfg, &base)?;
    let json = report.to_json()?;
    if let Some(p) = out {
        std::fs::write(p, &json).map_err(|e| flag_err("-o", p, e))?;
    }
    let failed: Vec<&str> = report
        .checks
        .iter()
        .filter(|c| c.verdict == semijulia::verify::Verdict::Fail)
        .map(|c| c.name.as_str())
        .collect();
    println!(
        "suite {}: {:?}, {} checks, {} failed{}",
        report.suite,
        report.overall,
        report.checks.len(),
        failed.len(),
        if failed.is_empty() { String::new() } else { format!(" ({})", failed.join(", ")) }
    );
    Ok(report.passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("--threads: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.cmd {
        Command::Construct { which, out } => construct(which, out).map(|_| true),
        Command::Render(a) => render(a).map(|_| true),
        Command::Analyze { what } => analyze(what).map(|_| true),
        Command::Verify { what } => verify(what),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        let c = |re, im| Complex64::new(re, im);
        assert_eq!(parse_complex("1").unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("-0.25").unwrap(), c(-0.25, 0.0));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1+2i").unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex("1e-3-2.5i").unwrap(), c(1e-3, -2.5));
        assert_eq!(parse_complex("0.5,-1").unwrap(), c(0.5, -1.0));
        assert!(parse_complex("x").is_err());
    }
}
