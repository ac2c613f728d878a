//! Command-line front end: spectra, gap labels, component counts, phase
//! diagram rendering, coexistence verification, and the verification
//! suites, all with reproducible file-based outputs.
//!
//! Exit codes: 0 success/pass, 1 verification failure or runtime error,
//! 2 usage error.

mod suites;

use std::fs::File;
use std::io::{BufWriter, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use butterfly_core::coexist::{non_coexistence_check, verify_proposition, Side};
use butterfly_core::combinatorics::{asymptotic_ratio, component_count};
use butterfly_core::flux::gcd;
use butterfly_core::labels::label_spectrum;
use butterfly_core::raster::{render, RenderConfig};
use butterfly_core::spectral::compute_spectrum;
use butterfly_core::RationalFlux;

#[derive(Parser)]
#[command(
    name = "butterfly",
    about = "Hofstadter phase diagram: spectra, Hall-conductance gap labels, component counts, coexistence checks, and colored renders",
    version
)]
struct Cli {
    /// Worker thread cap (env BUTTERFLY_THREADS as fallback; default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Band structure at one rational flux
    Spectrum {
        /// Flux as P/Q (unreduced input is reduced with a warning)
        #[arg(long, value_parser = parse_flux)]
        flux: RationalFlux,
        /// Emit JSON instead of the table
        #[arg(long, conflicts_with = "csv")]
        json: bool,
        /// Emit CSV band rows instead of the table
        #[arg(long)]
        csv: bool,
    },
    /// Hall-conductance labels for every gap at one flux
    Labels {
        #[arg(long, value_parser = parse_flux)]
        flux: RationalFlux,
        /// Emit the records as JSON
        #[arg(long)]
        json: bool,
    },
    /// Phase component counts (CSV: k, count, ratio)
    Count {
        /// Single Hall conductance
        #[arg(long, conflicts_with = "k_max", required_unless_present = "k_max", allow_hyphen_values = true)]
        k: Option<i64>,
        /// All conductances 1..=K
        #[arg(long)]
        k_max: Option<i64>,
    },
    /// Render the colored phase diagram to PPM plus a JSON sidecar
    Render(RenderArgs),
    /// Verify phase coexistence along Bezout approximants (JSON report)
    Coexist {
        #[arg(long, value_parser = parse_flux)]
        flux: RationalFlux,
        /// Hall conductance of the base phase
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, default_value_t = 12)]
        n_max: i64,
        #[arg(long, default_value_t = 3)]
        l_max: i64,
        /// Boundary side: left or right
        #[arg(long, default_value = "right")]
        side: Side,
        /// Also check these non-coset labels for non-coexistence
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        exclude: Vec<i64>,
    },
    /// Run a verification suite; exits 1 if any check fails
    Verify {
        /// symmetry | bounds | proposition | wada | dimension
        #[arg(long)]
        suite: suites::Suite,
        #[arg(long, default_value_t = 40)]
        q_max: i64,
        /// Seed for the randomized checks
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct RenderArgs {
    /// Output PPM path
    #[arg(long)]
    out: PathBuf,
    /// Sidecar JSON path (default: output path with .json extension)
    #[arg(long)]
    sidecar: Option<PathBuf>,
    #[arg(long, default_value_t = 512)]
    width: u32,
    #[arg(long, default_value_t = 512)]
    height: u32,
    #[arg(long, default_value_t = 30)]
    q_cap: i64,
    #[arg(long, default_value_t = 0.0)]
    phi_min: f64,
    #[arg(long, default_value_t = 1.0)]
    phi_max: f64,
    #[arg(long, default_value_t = -4.0, allow_hyphen_values = true)]
    e_min: f64,
    #[arg(long, default_value_t = 4.0, allow_hyphen_values = true)]
    e_max: f64,
    /// Paint bands black instead of blank (debugging aid)
    #[arg(long)]
    spectrum_black: bool,
}

fn parse_flux(s: &str) -> Result<RationalFlux, String> {
    let (ps, qs) = s
        .split_once('/')
        .ok_or_else(|| format!("flux must be P/Q, got {s:?}"))?;
    let p: i64 = ps
        .trim()
        .parse()
        .map_err(|_| format!("bad numerator {ps:?}"))?;
    let q: i64 = qs
        .trim()
        .parse()
        .map_err(|_| format!("bad denominator {qs:?}"))?;
    if q != 0 && gcd(p, q) != 1 {
        eprintln!(
            "warning: flux {p}/{q} is not reduced; using {}/{}",
            p / gcd(p, q),
            q / gcd(p, q)
        );
    }
    RationalFlux::new(p, q).map_err(|e| e.to_string())
}

/// Format with 12 significant digits.
fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = 11 - exp;
    if (0..=17).contains(&decimals) {
        format!("{x:.*}", decimals as usize)
    } else {
        format!("{x:.11e}")
    }
}

fn opt_sig12(x: f64) -> String {
    if x.is_finite() {
        sig12(x)
    } else if x > 0.0 {
        "+inf".into()
    } else {
        "-inf".into()
    }
}

fn init_threads(cap: Option<usize>) {
    let n = cap.or_else(|| {
        std::env::var("BUTTERFLY_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = n {
        // builder errors only if a global pool already exists
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    init_threads(cli.threads);
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> anyhow::Result<bool> {
    match command {
        Command::Spectrum { flux, json, csv } => cmd_spectrum(flux, json, csv),
        Command::Labels { flux, json } => cmd_labels(flux, json),
        Command::Count { k, k_max } => cmd_count(k, k_max),
        Command::Render(args) => cmd_render(args),
        Command::Coexist {
            flux,
            k,
            n_max,
            l_max,
            side,
            exclude,
        } => cmd_coexist(flux, k, n_max, l_max, side, &exclude),
        Command::Verify { suite, q_max, seed } => suites::run(suite, q_max, seed),
    }
}

fn cmd_spectrum(flux: RationalFlux, json: bool, csv: bool) -> anyhow::Result<bool> {
    let spectrum = compute_spectrum(flux);
    if json {
        println!("{}", serde_json::to_string(&spectrum)?);
        return Ok(true);
    }
    if csv {
        println!("band,lo,hi");
        for (i, band) in spectrum.bands().iter().enumerate() {
            println!("{i},{},{}", sig12(band.lo), sig12(band.hi));
        }
        return Ok(true);
    }
    println!("flux {flux}: {} bands", spectrum.bands().len());
    for (i, band) in spectrum.bands().iter().enumerate() {
        println!(
            "  band {i:3}  [{}, {}]  width {}",
            sig12(band.lo),
            sig12(band.hi),
            sig12(band.width())
        );
    }
    println!("  total bandwidth {}", sig12(spectrum.total_bandwidth()));
    Ok(true)
}

fn cmd_labels(flux: RationalFlux, json: bool) -> anyhow::Result<bool> {
    let records = label_spectrum(&compute_spectrum(flux));
    if json {
        println!("{}", serde_json::to_string(&records)?);
        return Ok(true);
    }
    println!("flux {flux}: {} gaps", records.len());
    println!(
        "  {:>3} {:>5} {:>7} {:>8}  interval",
        "j", "k", "closed", "rho"
    );
    for rec in &records {
        println!(
            "  {:>3} {:>5} {:>7} {:>5}/{:<2}  [{}, {}]",
            rec.j,
            rec.k,
            if rec.central_closed { "yes" } else { "" },
            rec.j,
            rec.flux.q(),
            opt_sig12(rec.lo),
            opt_sig12(rec.hi),
        );
    }
    Ok(true)
}

fn cmd_count(k: Option<i64>, k_max: Option<i64>) -> anyhow::Result<bool> {
    let ks: Vec<i64> = match (k, k_max) {
        (Some(k), None) => vec![k],
        (None, Some(m)) => (1..=m).collect(),
        _ => unreachable!("clap enforces exactly one"),
    };
    println!("k,count,ratio");
    for k in ks {
        let c = component_count(k);
        let ratio = asymptotic_ratio(k).map(sig12).unwrap_or_default();
        println!("{k},{},{ratio}", c.count);
    }
    Ok(true)
}

fn cmd_render(args: RenderArgs) -> anyhow::Result<bool> {
    let config = RenderConfig {
        width: args.width,
        height: args.height,
        phi_min: args.phi_min,
        phi_max: args.phi_max,
        e_min: args.e_min,
        e_max: args.e_max,
        q_cap: args.q_cap,
        spectrum_black: args.spectrum_black,
        ..RenderConfig::default()
    };
    let output = render(&config)?;
    std::fs::write(&args.out, output.ppm_bytes())
        .with_context(|| format!("writing {}", args.out.display()))?;
    let sidecar_path = args
        .sidecar
        .unwrap_or_else(|| args.out.with_extension("json"));
    let file = File::create(&sidecar_path)
        .with_context(|| format!("writing {}", sidecar_path.display()))?;
    let mut writer = BufWriter::new(file);
    serde_json::to_writer(&mut writer, &output.sidecar())?;
    writer.flush()?;
    println!(
        "wrote {} ({}x{}, q_cap {}) and {}",
        args.out.display(),
        config.width,
        config.height,
        config.q_cap,
        sidecar_path.display()
    );
    Ok(true)
}

fn cmd_coexist(
    flux: RationalFlux,
    k: i64,
    n_max: i64,
    l_max: i64,
    side: Side,
    exclude: &[i64],
) -> anyhow::Result<bool> {
    let report = verify_proposition(k, flux, side, n_max, l_max)?;
    let mut pass = report.pass;
    println!("{}", serde_json::to_string_pretty(&report)?);
    for &kprime in exclude {
        let r = non_coexistence_check(k, kprime, flux, n_max)?;
        eprintln!(
            "non-coexistence k'={kprime}: min dist {} -> {}",
            sig12(r.min_dist),
            if r.pass { "pass" } else { "FAIL" }
        );
        pass &= r.pass;
    }
    Ok(pass)
}
