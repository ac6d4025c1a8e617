use clap::{Parser, Subcommand};
use cwmr::fields::TestField;
use cwmr::harness::{convergence_study, run_function_experiment};
use cwmr::image::{
    compress_image, decompress_image, read_image, reconstruct_channels, write_image,
    CompressionSettings,
};
use cwmr_core::codec::deserialize;
use cwmr_core::filters::{fraction_string, FilterLadder};
use cwmr_core::mra::{metrics, nnz, Metrics};
use cwmr_core::{Epsilon, Predictor, PredictorKind, WenoParams};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

/// Cell-average multiresolution codec and prediction test bench.
#[derive(Parser)]
#[command(name = "cwmr", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compress a PGM/PPM image into the sparse multiresolution container
    Compress {
        input: PathBuf,
        output: PathBuf,
        /// Number of decimation levels
        #[arg(long)]
        levels: u32,
        /// Detail threshold at the finest level (halved per coarser level)
        #[arg(long)]
        eps: f64,
        /// Prediction operator: linear | weno | weno-classical
        #[arg(long)]
        predictor: String,
        /// Interpolation order parameter (window is (2r-1)^2 cells)
        #[arg(long, default_value_t = 3)]
        r: usize,
        /// Fixed epsilon in the nonlinear weights (default: (1/n)^2 per level)
        #[arg(long = "epsilon-weno")]
        epsilon_weno: Option<f64>,
        /// Exponent on the smoothness indicators in the nonlinear weights
        #[arg(long, default_value_t = 2.0)]
        t: f64,
    },
    /// Reconstruct an image from a compressed container
    Decompress { input: PathBuf, output: PathBuf },
    /// Report per-channel and averaged reconstruction errors as CSV
    Analyze {
        orig: PathBuf,
        recon: PathBuf,
        /// Compressed container; enables real-valued (pre-rounding) metrics
        /// and the retained-coefficient count
        #[arg(long)]
        cwmr: Option<PathBuf>,
        /// Compare rounded 8-bit samples instead of real-valued reconstructions
        #[arg(long)]
        post_round: bool,
    },
    /// Prediction-error experiment on an analytic test field (CSV)
    BenchFunctions {
        /// poly | poly-jump | exp-diag | franke-h | franke-v | smooth-trig
        #[arg(long)]
        field: String,
        /// Fine-grid resolution
        #[arg(long)]
        n: usize,
        /// Prediction operator: linear | weno | weno-classical
        #[arg(long)]
        predictor: String,
    },
    /// Convergence study on the smooth trigonometric field (CSV)
    Convergence {
        /// Prediction operator: linear | weno | weno-classical
        #[arg(long)]
        predictor: String,
        /// Interpolation order parameter
        #[arg(long, default_value_t = 3)]
        r: usize,
        /// Comma-separated doubling resolutions
        #[arg(long, default_value = "64,128,256,512")]
        ns: String,
    },
    /// Print the prediction filter ladder as exact fractions (CSV)
    DumpFilters {
        /// Interpolation order parameter
        #[arg(long)]
        r: usize,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.cmd {
        Cmd::Compress {
            input,
            output,
            levels,
            eps,
            predictor,
            r,
            epsilon_weno,
            t,
        } => cmd_compress(&input, &output, levels, eps, &predictor, r, epsilon_weno, t),
        Cmd::Decompress { input, output } => cmd_decompress(&input, &output),
        Cmd::Analyze {
            orig,
            recon,
            cwmr,
            post_round,
        } => cmd_analyze(&orig, &recon, cwmr.as_deref(), post_round),
        Cmd::BenchFunctions {
            field,
            n,
            predictor,
        } => cmd_bench_functions(&field, n, &predictor),
        Cmd::Convergence { predictor, r, ns } => cmd_convergence(&predictor, r, &ns),
        Cmd::DumpFilters { r } => cmd_dump_filters(r),
    }
}

fn parse_predictor(name: &str) -> Result<PredictorKind, String> {
    match name {
        "linear" => Ok(PredictorKind::Linear),
        "weno" => Ok(PredictorKind::WenoProgressive),
        "weno-classical" => Ok(PredictorKind::WenoClassical),
        _ => Err(format!(
            "unknown predictor '{name}'; expected linear, weno, or weno-classical"
        )),
    }
}

fn parse_field(name: &str) -> Result<TestField, String> {
    TestField::parse(name).ok_or_else(|| {
        format!(
            "unknown field '{name}'; expected poly, poly-jump, exp-diag, franke-h, \
             franke-v, or smooth-trig"
        )
    })
}

#[allow(clippy::too_many_arguments)]
fn cmd_compress(
    input: &Path,
    output: &Path,
    levels: u32,
    eps: f64,
    predictor: &str,
    r: usize,
    epsilon_weno: Option<f64>,
    t: f64,
) -> Result<(), String> {
    let kind = parse_predictor(predictor)?;
    let params = WenoParams {
        epsilon: epsilon_weno.map(Epsilon::Fixed).unwrap_or(Epsilon::GridScaled),
        power: t,
    };
    let img = read_image(input).map_err(|e| e.to_string())?;
    let settings = CompressionSettings {
        levels,
        eps_finest: eps,
        kind,
        r,
        params,
    };
    let (bytes, kept) = compress_image(&img, &settings).map_err(|e| e.to_string())?;
    std::fs::write(output, &bytes).map_err(|e| format!("{}: {e}", output.display()))?;
    println!("input,n,channels,levels,eps,predictor,r,nnz,bytes");
    println!(
        "{},{},{},{},{},{},{},{},{}",
        input.display(),
        img.width(),
        img.channels(),
        levels,
        fmt_f64(eps),
        predictor,
        r,
        kept,
        bytes.len()
    );
    Ok(())
}

fn cmd_decompress(input: &Path, output: &Path) -> Result<(), String> {
    let bytes = std::fs::read(input).map_err(|e| format!("{}: {e}", input.display()))?;
    let img = decompress_image(&bytes).map_err(|e| e.to_string())?;
    write_image(&img, output).map_err(|e| e.to_string())
}

fn cmd_analyze(
    orig: &Path,
    recon: &Path,
    cwmr: Option<&Path>,
    post_round: bool,
) -> Result<(), String> {
    let a = read_image(orig).map_err(|e| e.to_string())?;
    let b = read_image(recon).map_err(|e| e.to_string())?;
    if (a.width(), a.height(), a.channels()) != (b.width(), b.height(), b.channels()) {
        return Err(format!(
            "shape mismatch: {}x{}x{} vs {}x{}x{}",
            a.width(),
            a.height(),
            a.channels(),
            b.width(),
            b.height(),
            b.channels()
        ));
    }
    let stored = match cwmr {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let grids = reconstruct_channels(&bytes).map_err(|e| e.to_string())?;
            let (reps, _) = deserialize(&bytes).map_err(|e| e.to_string())?;
            if grids.len() != a.channels() || grids[0].n() != a.width() {
                return Err("compressed container does not match the image shape".into());
            }
            let counts: Vec<usize> = reps.iter().map(nnz).collect();
            Some((grids, counts))
        }
        None => None,
    };

    println!("channel,e1,e2,nnz");
    let mut per_channel: Vec<Metrics> = Vec::new();
    for ch in 0..a.channels() {
        let ga = a.channel_grid(ch).map_err(|e| e.to_string())?;
        let m = match (&stored, post_round) {
            // real-valued reconstruction straight from the container
            (Some((grids, _)), false) => metrics(&ga, &grids[ch]).map_err(|e| e.to_string())?,
            _ => {
                let gb = b.channel_grid(ch).map_err(|e| e.to_string())?;
                metrics(&ga, &gb).map_err(|e| e.to_string())?
            }
        };
        let count = stored
            .as_ref()
            .map(|(_, c)| c[ch].to_string())
            .unwrap_or_default();
        println!("{ch},{},{},{count}", fmt_f64(m.e1), fmt_f64(m.e2));
        per_channel.push(m);
    }
    let k = per_channel.len() as f64;
    let e1: f64 = per_channel.iter().map(|m| m.e1).sum::<f64>() / k;
    let e2: f64 = per_channel.iter().map(|m| m.e2).sum::<f64>() / k;
    let total = stored
        .as_ref()
        .map(|(_, c)| c.iter().sum::<usize>().to_string())
        .unwrap_or_default();
    println!("average,{},{},{total}", fmt_f64(e1), fmt_f64(e2));
    Ok(())
}

fn cmd_bench_functions(field: &str, n: usize, predictor: &str) -> Result<(), String> {
    let f = parse_field(field)?;
    let kind = parse_predictor(predictor)?;
    let p = Predictor::new(kind, 3, WenoParams::default()).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let e2 = run_function_experiment(f, n, &p).map_err(|e| e.to_string())?;
    let ms = start.elapsed().as_millis();
    println!("field,n,predictor,e2,runtime_ms");
    println!("{},{},{},{},{}", f.name(), n, predictor, fmt_f64(e2), ms);
    Ok(())
}

fn cmd_convergence(predictor: &str, r: usize, ns: &str) -> Result<(), String> {
    let kind = parse_predictor(predictor)?;
    let p = Predictor::new(kind, r, WenoParams::default()).map_err(|e| e.to_string())?;
    let sizes: Vec<usize> = ns
        .split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|e| format!("--ns: {e}")))
        .collect::<Result<_, _>>()?;
    let rows =
        convergence_study(TestField::SmoothTrig, &p, &sizes).map_err(|e| e.to_string())?;
    println!("field,n,predictor,e2,order");
    for (n, e2, order) in rows {
        let o = order.map(|v| format!("{v:.3}")).unwrap_or_default();
        println!("smooth-trig,{},{},{},{}", n, predictor, fmt_f64(e2), o);
    }
    Ok(())
}

fn cmd_dump_filters(r: usize) -> Result<(), String> {
    let ladder = FilterLadder::build(r).map_err(|e| e.to_string())?;
    for s in r..=2 * r - 1 {
        for k in 0..ladder.stage_len(s) {
            let coefs: Vec<String> = ladder
                .stage_filter_rational(s, k)
                .iter()
                .map(fraction_string)
                .collect();
            println!("filter,{},{},{}", s, k, coefs.join(","));
        }
    }
    for s in r..2 * r - 1 {
        for k in 0..ladder.stage_len(s + 1) {
            let (a, b) = ladder.stage_pair_rational(s, k);
            println!("pair,{},{},{},{}", s, k, fraction_string(a), fraction_string(b));
        }
    }
    for (k, g) in ladder.flattened_rational().iter().enumerate() {
        println!("flattened,,{},{}", k, fraction_string(g));
    }
    Ok(())
}

/// Deterministic full-precision float rendering for CSV cells.
fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}
