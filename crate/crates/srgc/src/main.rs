use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use srgc::config_file::load_config;
use srgc::{io, report, scene_file, ThreadPool};
use srgc_core::codec::{decode_with, encode_with, ChannelMode, CodecConfig, ResidualMode};
use srgc_core::metrics::{bpp, psnr, rd_sweep, to_csv};
use srgc_core::scene::synthesize_light_field;
use srgc_core::DisparityMap;

/// Super-ray grouping light-field codec.
#[derive(Parser)]
#[command(name = "srgc", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a synthetic light field and its ground-truth disparity map.
    Synth(SynthArgs),
    /// Compress a view directory into a .srgc stream.
    Encode(EncodeArgs),
    /// Reconstruct a view directory from a .srgc stream.
    Decode(DecodeArgs),
    /// Print stream layout and decoder statistics.
    Analyze(AnalyzeArgs),
    /// Encode and decode at several GFT steps and emit a CSV table.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SynthArgs {
    /// Scene description file.
    #[arg(long)]
    spec: PathBuf,
    /// Output directory for the views and gt.lfdm.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct EncodeArgs {
    /// Directory of view_SS_TT.pgm|ppm files.
    input: PathBuf,
    /// LFDM disparity map of the reference view [default: zero disparity].
    #[arg(long)]
    disparity: Option<PathBuf>,
    /// Output stream.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    codec: CodecArgs,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct DecodeArgs {
    /// Input .srgc stream.
    input: PathBuf,
    /// Output view directory.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Input .srgc stream.
    input: PathBuf,
    /// Original view directory; adds psnr_y to the report.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args)]
struct SweepArgs {
    /// Directory of view_SS_TT.pgm|ppm files.
    input: PathBuf,
    /// LFDM disparity map of the reference view [default: zero disparity].
    #[arg(long)]
    disparity: Option<PathBuf>,
    /// Comma-separated GFT quantizer steps, one CSV row each.
    #[arg(long = "q", value_delimiter = ',', required = true)]
    q_list: Vec<f64>,
    #[command(flatten)]
    codec: CodecArgs,
    #[command(flatten)]
    run: RunArgs,
}

/// Codec parameters. Precedence: built-in defaults < --config file < flags.
#[derive(Args)]
struct CodecArgs {
    /// key = value file with codec parameters (same names as the flags, with underscores).
    #[arg(long)]
    config: Option<PathBuf>,
    /// GFT coefficient quantizer step [default: 16].
    #[arg(long)]
    q_gft: Option<f64>,
    /// Residual DCT quantizer step [default: 1].
    #[arg(long)]
    q_dct: Option<f64>,
    /// Vertex count of coarsened super-rays [default: 256].
    #[arg(long)]
    n_target: Option<usize>,
    /// Largest partition part in vertices [default: 512].
    #[arg(long)]
    max_vertices: Option<usize>,
    /// Coarsen when q-gft >= q-switch, otherwise partition [default: 16].
    #[arg(long)]
    q_switch: Option<u32>,
    /// Number of super-pixels in the reference view [default: 16].
    #[arg(long)]
    slic_k: Option<usize>,
    /// SLIC compactness [default: 10].
    #[arg(long)]
    compactness: Option<f64>,
    /// Histogram bin width of the grouping threshold [default: 5].
    #[arg(long)]
    bin_width: Option<f64>,
    /// Transmit group membership explicitly.
    #[arg(long)]
    explicit_groups: bool,
    /// Disable grouping (one eigen-decomposition per super-ray at the decoder).
    #[arg(long)]
    no_grouping: bool,
    /// Residual coding [default: raw; dct for sweep].
    #[arg(long, value_enum)]
    residual_mode: Option<ResidualArg>,
    /// Channels to code [default: luma].
    #[arg(long, value_enum)]
    channels: Option<ChannelArg>,
}

#[derive(Args)]
struct RunArgs {
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Write the report to this file instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResidualArg {
    Raw,
    Dct,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChannelArg {
    Luma,
    All,
}

/// Invalid combination of otherwise well-formed arguments.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

impl CodecArgs {
    fn resolve(&self, mut cfg: CodecConfig) -> anyhow::Result<CodecConfig> {
        if let Some(path) = &self.config {
            load_config(path, &mut cfg)?;
        }
        macro_rules! apply {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = v;
                }
            )*};
        }
        apply!(q_gft, q_dct, n_target, max_vertices, q_switch, slic_k, compactness, bin_width);
        if self.explicit_groups {
            cfg.explicit_groups = true;
        }
        if self.no_grouping {
            cfg.grouping = false;
        }
        if let Some(m) = self.residual_mode {
            cfg.residual_mode = match m {
                ResidualArg::Raw => ResidualMode::Raw,
                ResidualArg::Dct => ResidualMode::Dct,
            };
        }
        if let Some(c) = self.channels {
            cfg.channels = match c {
                ChannelArg::Luma => ChannelMode::Luma,
                ChannelArg::All => ChannelMode::All,
            };
        }
        cfg.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(cfg)
    }
}

impl RunArgs {
    fn pool(&self) -> anyhow::Result<ThreadPool> {
        ThreadPool::new(self.threads).context("cannot start worker pool")
    }

    fn emit(&self, text: &str) -> anyhow::Result<()> {
        match &self.report {
            Some(path) => std::fs::write(path, text)
                .map_err(|source| srgc::Error::Io { path: path.clone(), source }.into()),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn disparity_for(path: Option<&Path>, width: usize, height: usize) -> anyhow::Result<DisparityMap> {
    Ok(match path {
        Some(p) => io::load_disparity(p)?,
        None => DisparityMap::constant(width, height, 0.0),
    })
}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Synth(a) => {
            let spec = scene_file::load_scene(&a.spec)?;
            let (lf, dmap) = synthesize_light_field(&spec).map_err(srgc::Error::from)?;
            io::save_light_field(&lf, &a.out)?;
            io::save_disparity(&dmap, &a.out.join("gt.lfdm"))?;
            let (rows, cols) = lf.angular_dims();
            println!(
                "views={}x{} size={}x{} bit_depth={} out={}",
                rows,
                cols,
                lf.width(),
                lf.height(),
                lf.bit_depth(),
                a.out.display()
            );
        }
        Command::Encode(a) => {
            let cfg = a.codec.resolve(CodecConfig::default())?;
            let lf = io::load_light_field(&a.input)?;
            let dmap = disparity_for(a.disparity.as_deref(), lf.width(), lf.height())?;
            let pool = a.run.pool()?;
            let out = encode_with(&pool, &lf, &dmap, &cfg).map_err(srgc::Error::from)?;
            io::save_stream(&out.bitstream, &a.out)?;
            a.run.emit(&report::encode_report(&out.report))?;
        }
        Command::Decode(a) => {
            let bs = io::load_stream(&a.input)?;
            let pool = a.run.pool()?;
            let out = decode_with(&pool, &bs).map_err(srgc::Error::from)?;
            io::save_light_field(&out.light_field, &a.out)?;
            a.run.emit(&report::decode_report(&out.report))?;
        }
        Command::Analyze(a) => {
            let bs = io::load_stream(&a.input)?;
            let pool = a.run.pool()?;
            let out = decode_with(&pool, &bs).map_err(srgc::Error::from)?;
            let h = &bs.header;
            let mut text = format!(
                "views={}x{}\nsize={}x{}\nbit_depth={}\nchannels={}\nq_gft={}\nq_dct={}\nexplicit_groups={}\ngrouping={}\nresidual_mode={}\nstream_bytes={}\nbpp={:.6}\n",
                h.rows,
                h.cols,
                h.width,
                h.height,
                h.bit_depth,
                h.channels,
                h.q_gft,
                h.q_dct,
                h.explicit_groups(),
                h.grouping(),
                if h.raw_residuals() { "raw" } else { "dct" },
                bs.byte_len(),
                bpp(&bs),
            );
            for s in srgc_core::bitstream::Section::ALL {
                text.push_str(&format!("section_{}_bytes={}\n", s.name(), bs.section(s).len()));
            }
            text.push_str(&report::decode_report(&out.report));
            if let Some(dir) = &a.reference {
                let reference = io::load_light_field(dir)?;
                let p = psnr(&out.light_field, &reference).map_err(srgc::Error::from)?;
                text.push_str(&format!("psnr_y={}\n", if p.is_infinite() { "inf".into() } else { format!("{p:.4}") }));
            }
            a.run.emit(&text)?;
        }
        Command::Sweep(a) => {
            let base = CodecConfig { residual_mode: ResidualMode::Dct, ..CodecConfig::default() };
            let cfg = a.codec.resolve(base)?;
            if let Some(q) = a.q_list.iter().find(|q| !(q.is_finite() && **q > 0.0)) {
                return Err(UsageError(format!("quantizer step {q} must be positive")).into());
            }
            let lf = io::load_light_field(&a.input)?;
            let dmap = disparity_for(a.disparity.as_deref(), lf.width(), lf.height())?;
            let pool = a.run.pool()?;
            let points = rd_sweep(&pool, &lf, &dmap, &a.q_list, &cfg).map_err(srgc::Error::from)?;
            a.run.emit(&to_csv(&points))?;
        }
    }
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        1
    } else if let Some(e) = err.downcast_ref::<srgc::Error>() {
        if e.is_internal() {
            3
        } else {
            2
        }
    } else {
        3
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("srgc: {e:#}");
            ExitCode::from(exit_code(&e))
        }
        Err(_) => ExitCode::from(3),
    }
}
