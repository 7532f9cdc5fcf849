//! Command-line front end. `main` only forwards to [`run`].

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand};

use crate::config::PipelineConfig;
use crate::dataset::{read_json, write_json, Mode, MANIFEST_FILE};
use crate::encoders::{encode_channel, Encoding};
use crate::error::{Error, Result};
use crate::ingest::{channel_index, derive_channels, parse_recording, CHANNEL_NAMES};
use crate::pipeline::{build_dataset, encode_corpus, segment_dir, subject_dirs, CONFIG_FILE, STRIDES_FILE};
use crate::preprocess::preprocess_all;
use crate::segmentation::HeelStrikeParams;
use crate::synth::{generate_group, write_subject, ProfileKind};

#[derive(Debug, Parser)]
#[command(name = "gaitframe", version, about = "Gait IMU recordings to STFT / CWT / GASF image-stack datasets")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "GAITFRAME_THREADS")]
    pub threads: Option<usize>,

    /// Pipeline config JSON; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse one subject directory and report its channels.
    Ingest {
        #[arg(long)]
        input: PathBuf,
        /// Write the 14 derived channels as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Band-pass, upsample and normalize one subject.
    Preprocess {
        #[arg(long)]
        input: PathBuf,
        /// Write the preprocessed channels as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        signal: SignalArgs,
    },
    /// Detect heel strikes and cut strides; writes strides.json per subject.
    Segment {
        /// Subject directory or a directory of subjects.
        #[arg(long)]
        input: PathBuf,
        /// Output directory (default: next to each subject's CSVs).
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        signal: SignalArgs,
    },
    /// Encode every stride of a corpus into .gft tensors.
    Encode {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        encoding: Encoding,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        signal: SignalArgs,
    },
    /// Encode (or reuse) tensors and write a manifest with stratified folds.
    BuildDataset {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        encoding: Encoding,
        #[arg(long, value_enum, default_value = "ss")]
        mode: Mode,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        group_by_subject: bool,
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        test_frac: Option<f64>,
        #[arg(long, default_value = MANIFEST_FILE)]
        manifest_name: String,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        signal: SignalArgs,
    },
    /// Write synthetic subjects with ground-truth heel strikes.
    Synth {
        #[arg(long, value_enum)]
        profile: ProfileKind,
        #[arg(long, default_value_t = 10)]
        subjects: usize,
        #[arg(long, default_value_t = 30)]
        strides: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print stride statistics for a subject and render one channel image.
    Inspect {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 0)]
        stride: usize,
        #[arg(long, default_value = "pelvis_ax")]
        channel: String,
        #[arg(long, value_enum, default_value = "stft")]
        encoding: Encoding,
        /// PNG path for the rendered image.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        signal: SignalArgs,
    },
}

/// Preprocessing and segmentation overrides shared by several commands.
#[derive(Debug, Clone, Default, Args)]
pub struct SignalArgs {
    #[arg(long)]
    pub band_low: Option<f64>,
    #[arg(long)]
    pub band_high: Option<f64>,
    #[arg(long)]
    pub target_rate: Option<f64>,
    #[arg(long)]
    pub filter_order: Option<usize>,
    /// HeelStrikeParams JSON.
    #[arg(long)]
    pub params: Option<PathBuf>,
}

impl SignalArgs {
    fn apply(&self, cfg: &mut PipelineConfig) -> Result<()> {
        if let Some(p) = &self.params {
            cfg.heel_strike = read_json::<HeelStrikeParams>(p)?;
        }
        let pre = &mut cfg.preprocess;
        if let Some(v) = self.band_low {
            pre.band_low_hz = v;
        }
        if let Some(v) = self.band_high {
            pre.band_high_hz = v;
        }
        if let Some(v) = self.target_rate {
            pre.target_rate_hz = v;
        }
        if let Some(v) = self.filter_order {
            pre.filter_order = v;
        }
        Ok(())
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout(), &mut std::io::stderr())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let mut rendered = e.render().to_string();
            if e.use_stderr() && !rendered.contains("Usage:") {
                rendered.push('\n');
                rendered.push_str(&Cli::command().render_usage().to_string());
                rendered.push('\n');
            }
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match execute_with_threads(&cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            let _ = writeln!(err, "error: kind={} msg={msg}", e.kind());
            1
        }
    }
}

fn execute_with_threads(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match cli.threads {
        Some(0) => Err(Error::InvalidConfig("--threads must be >= 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
            let mut buf = Vec::new();
            let result = pool.install(|| execute(cli, &mut buf));
            out.write_all(&buf).map_err(|e| Error::io("<stdout>", e))?;
            result
        }
        None => execute(cli, out),
    }
}

fn base_config(cli: &Cli) -> Result<PipelineConfig> {
    match &cli.config {
        Some(p) => PipelineConfig::load(p),
        None => Ok(PipelineConfig::default()),
    }
}

fn config_with(cli: &Cli, signal: &SignalArgs) -> Result<PipelineConfig> {
    let mut cfg = base_config(cli)?;
    signal.apply(&mut cfg)?;
    cfg.validate()?;
    Ok(cfg)
}

fn say(out: &mut dyn Write, line: String) -> Result<()> {
    writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Ingest { input, out: dest } => {
            let rec = parse_recording(input)?;
            let cs = derive_channels(&rec)?;
            say(
                out,
                format!(
                    "subject={} label={} frail_score={} fs={:.3} samples={} duration_s={:.3} channels={}",
                    rec.subject_id,
                    rec.label().as_str(),
                    rec.frail_score,
                    rec.sample_rate_hz,
                    rec.len(),
                    rec.len() as f64 / rec.sample_rate_hz,
                    CHANNEL_NAMES.join(",")
                ),
            )?;
            if let Some(dest) = dest {
                write_json(dest, &cs)?;
            }
            Ok(())
        }
        Command::Preprocess { input, out: dest, signal } => {
            let cfg = config_with(cli, signal)?;
            let cs = preprocess_all(&derive_channels(&parse_recording(input)?)?, &cfg.preprocess)?;
            say(
                out,
                format!(
                    "subject={} fs={} samples={} fingerprint={}",
                    cs.subject_id,
                    cs.sample_rate_hz,
                    cs.len(),
                    cfg.signal_fingerprint()
                ),
            )?;
            if let Some(dest) = dest {
                write_json(dest, &cs)?;
            }
            Ok(())
        }
        Command::Segment { input, out: dest, signal } => {
            let cfg = config_with(cli, signal)?;
            let fingerprint = cfg.signal_fingerprint();
            for dir in subject_dirs(input)? {
                let seg = segment_dir(&dir, &cfg)?;
                let report = seg.report(&fingerprint);
                let path = match dest {
                    Some(d) => d.join(&report.subject_id).join(STRIDES_FILE),
                    None => dir.join(STRIDES_FILE),
                };
                write_json(&path, &report)?;
                say(
                    out,
                    format!(
                        "subject={} hs_right={} hs_left={} strides={} triples={} -> {}",
                        report.subject_id,
                        report.hs_right.len(),
                        report.hs_left.len(),
                        report.strides.len(),
                        report.triple_count,
                        path.display()
                    ),
                )?;
            }
            if let Some(d) = dest {
                write_json(&d.join(CONFIG_FILE), &cfg.record())?;
            }
            Ok(())
        }
        Command::Encode {
            input,
            encoding,
            out: dest,
            signal,
        } => {
            let cfg = config_with(cli, signal)?;
            let index = encode_corpus(input, *encoding, &cfg, dest)?;
            say(
                out,
                format!(
                    "encoding={} strides={} images={} fingerprint={}",
                    encoding,
                    index.strides.len(),
                    index.strides.len() * crate::ingest::CHANNEL_COUNT,
                    index.signal_fingerprint
                ),
            )
        }
        Command::BuildDataset {
            input,
            encoding,
            mode,
            seed,
            group_by_subject,
            folds,
            test_frac,
            manifest_name,
            out: dest,
            signal,
        } => {
            let mut cfg = config_with(cli, signal)?;
            if let Some(s) = seed {
                cfg.split.seed = *s;
            }
            if *group_by_subject {
                cfg.split.group_by_subject = true;
            }
            if let Some(f) = folds {
                cfg.split.folds = *f;
            }
            if let Some(t) = test_frac {
                cfg.split.test_frac = *t;
            }
            cfg.validate()?;
            let m = build_dataset(input, *encoding, *mode, &cfg, dest, manifest_name)?;
            say(
                out,
                format!(
                    "encoding={} mode={:?} items={} robust={} non_robust={} strides={} images={} folds={} fingerprint={}",
                    m.encoding,
                    m.mode,
                    m.items.len(),
                    m.class_counts.robust,
                    m.class_counts.non_robust,
                    m.stride_count,
                    m.image_count,
                    m.folds.len(),
                    m.config_fingerprint
                ),
            )
        }
        Command::Synth {
            profile,
            subjects,
            strides,
            seed,
            out: dest,
        } => {
            for s in generate_group(*profile, *subjects, *strides, *seed)? {
                let dir = dest.join(&s.recording.subject_id);
                write_subject(&s, &dir)?;
                say(
                    out,
                    format!(
                        "subject={} label={} samples={} right_hs={} -> {}",
                        s.recording.subject_id,
                        s.recording.label().as_str(),
                        s.recording.len(),
                        s.truth.right_hs_s.len(),
                        dir.display()
                    ),
                )?;
            }
            Ok(())
        }
        Command::Inspect {
            input,
            stride,
            channel,
            encoding,
            out: dest,
            signal,
        } => {
            let cfg = config_with(cli, signal)?;
            let c = channel_index(channel)
                .ok_or_else(|| Error::InvalidInput(format!("unknown channel `{channel}`; one of {}", CHANNEL_NAMES.join(", "))))?;
            let seg = segment_dir(input, &cfg)?;
            let durations: Vec<f64> = seg.strides.iter().map(|s| s.duration_s()).collect();
            let (lo, hi) = durations
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
            let mean = durations.iter().sum::<f64>() / durations.len().max(1) as f64;
            say(
                out,
                format!(
                    "subject={} label={} hs_right={} hs_left={} strides={} duration_s min={:.3} mean={:.3} max={:.3}",
                    seg.channels.subject_id,
                    seg.channels.label.as_str(),
                    seg.hs_right.len(),
                    seg.hs_left.len(),
                    seg.strides.len(),
                    if durations.is_empty() { 0.0 } else { lo },
                    mean,
                    if durations.is_empty() { 0.0 } else { hi },
                ),
            )?;
            let s = seg
                .strides
                .iter()
                .find(|s| s.index == *stride)
                .ok_or_else(|| Error::InvalidInput(format!("no stride with index {stride}")))?;
            let img = encode_channel(s, c, *encoding, &cfg.encoders)?;
            let default_png = PathBuf::from(format!(
                "{}_s{:04}_{}_{}.png",
                seg.channels.subject_id, s.index, channel, encoding
            ));
            let png = dest.clone().unwrap_or(default_png);
            img.save_png(&png)?;
            say(
                out,
                format!(
                    "stride={} start={} end={} duration_s={:.3} -> {}",
                    s.index,
                    s.start_idx,
                    s.end_idx,
                    s.duration_s(),
                    png.display()
                ),
            )
        }
    }
}
