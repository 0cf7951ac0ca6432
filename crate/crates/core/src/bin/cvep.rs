use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cvep::code::{self, build_codebook, generate_msequence};
use cvep::dsp::{average_repetitions, bandpass_filter, FilterSpec};
use cvep::harness::{
    format_epochs, load_dictionary, load_epochs, write_epochs, write_report, Experiment,
    ExperimentConfig, LengthPolicy, LoadedDictionary, Mode, Report, ReportFormat, BUNDLED_WORDS,
};
use cvep::lagdec::{decode_absolute, estimate_relative_lag, promote_to_absolute};
use cvep::lexicon::{filter_candidates, KeyboardLayout, LagSignature, Resolution, DEFAULT_KEYS};
use cvep::synth::{synth_epoch, SynthConfig, VepKernel, DEFAULT_BIT_RATE};
use cvep::Result;

#[derive(Parser)]
#[command(name = "cvep", version, about = "Zero-calibration c-VEP speller toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the m-sequence and the per-character codebook.
    GenCode(CodeArgs),
    /// Band-pass every epoch of an epoch file.
    Filter(FilterArgs),
    /// Synthesize per-letter epochs for a word.
    Synth(SynthArgs),
    /// Run the zero-calibration sweep and write a report.
    Simulate(ExperimentArgs),
    /// Run the calibrated-template sweep and write a report.
    Baseline(BaselineArgs),
    /// Decode a word from one epoch per letter without calibration.
    Decode(DecodeArgs),
}

#[derive(Args, Clone)]
struct CodeArgs {
    /// LFSR register length.
    #[arg(long, default_value_t = code::DEFAULT_ORDER)]
    order: usize,
    /// Feedback taps as 1-based stage numbers.
    #[arg(long, value_delimiter = ',', default_values_t = code::DEFAULT_TAPS.to_vec())]
    taps: Vec<usize>,
    /// Initial register state; all ones when omitted.
    #[arg(long)]
    register_seed: Option<u32>,
    /// Keyboard size L.
    #[arg(long, default_value_t = code::DEFAULT_NUM_CHARS)]
    num_chars: usize,
    /// Code bits between adjacent characters.
    #[arg(long, default_value_t = code::DEFAULT_BITS_PER_SHIFT)]
    bits_per_shift: usize,
}

impl CodeArgs {
    fn codebook(&self) -> Result<code::Codebook> {
        let seed = self.register_seed.unwrap_or_else(|| code::all_ones(self.order));
        build_codebook(
            generate_msequence(self.order, &self.taps, seed)?,
            self.num_chars,
            self.bits_per_shift,
        )
    }
}

#[derive(Args, Clone)]
struct BandArgs {
    #[arg(long, default_value_t = cvep::dsp::DEFAULT_LOW_CUT)]
    low_cut: f64,
    #[arg(long, default_value_t = cvep::dsp::DEFAULT_HIGH_CUT)]
    high_cut: f64,
    /// Band-pass order (even; two poles per section).
    #[arg(long, default_value_t = cvep::dsp::DEFAULT_FILTER_ORDER)]
    filter_order: usize,
}

impl BandArgs {
    fn spec(&self, sampling_rate: f64) -> Result<FilterSpec> {
        FilterSpec::new(self.low_cut, self.high_cut, self.filter_order, sampling_rate)
    }
}

#[derive(Args)]
struct FilterArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[command(flatten)]
    band: BandArgs,
}

#[derive(Args, Clone)]
struct SignalArgs {
    #[command(flatten)]
    code: CodeArgs,
    #[arg(long, default_value_t = cvep::synth::DEFAULT_SAMPLES_PER_BIT)]
    samples_per_bit: usize,
    #[arg(long, default_value_t = 1)]
    channels: usize,
    /// Standard deviation of the additive white noise.
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    /// Keys in position order; only uppercase letters appear in words.
    #[arg(long, default_value = DEFAULT_KEYS)]
    keys: String,
    #[command(flatten)]
    band: BandArgs,
    /// Skip the band-pass stage.
    #[arg(long)]
    no_filter: bool,
}

impl SignalArgs {
    fn synth(&self, rng_seed: u64) -> Result<SynthConfig> {
        let fs = DEFAULT_BIT_RATE * self.samples_per_bit as f64;
        SynthConfig::new(
            self.code.codebook()?,
            self.samples_per_bit,
            self.channels,
            VepKernel::default_for(fs)?,
            self.noise_sigma,
            rng_seed,
        )
    }

    fn layout(&self, synth: &SynthConfig) -> Result<KeyboardLayout> {
        KeyboardLayout::new(self.keys.chars(), synth.lag_spacing())
    }

    fn filter(&self, sampling_rate: f64) -> Result<Option<FilterSpec>> {
        if self.no_filter {
            Ok(None)
        } else {
            self.band.spec(sampling_rate).map(Some)
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    #[command(flatten)]
    signal: SignalArgs,
    /// Word to spell, one epoch per letter.
    #[arg(long)]
    word: String,
    #[arg(long, default_value_t = 8)]
    repetitions: usize,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    signal: SignalArgs,
    /// Master seed; required so every report is reproducible.
    #[arg(long)]
    seed: u64,
    /// Repetition counts to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = vec![2usize, 4, 8, 12])]
    repetitions: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 3)]
    word_length: usize,
    /// Allow candidates longer than the word length.
    #[arg(long)]
    any_length: bool,
    /// Word list, one word per line; the bundled three-letter list when omitted.
    #[arg(long)]
    dictionary: Option<PathBuf>,
    /// Report destination; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: ReportFormat,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Known characters recorded to build the template.
    #[arg(long, value_delimiter = ',', default_values_t = cvep::harness::DEFAULT_CALIBRATION_CHARS.to_vec())]
    calibration_chars: Vec<usize>,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    signal: SignalArgs,
    /// Epoch file with one epoch per spelled letter.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    dictionary: Option<PathBuf>,
    #[arg(long)]
    word_length: Option<usize>,
}

fn dictionary(path: Option<&Path>, layout: &KeyboardLayout) -> Result<LoadedDictionary> {
    match path {
        Some(p) => load_dictionary(p, layout),
        None => LoadedDictionary::parse(BUNDLED_WORDS, layout),
    }
}

fn experiment_config(args: &ExperimentArgs, mode: Mode, calibration: &[usize]) -> Result<ExperimentConfig> {
    let synth = args.signal.synth(args.seed)?;
    let mut config = ExperimentConfig::with_defaults(args.signal.noise_sigma, args.seed)?;
    config.layout = args.signal.layout(&synth)?;
    config.filter = args.signal.filter(synth.sampling_rate())?;
    config.synth = synth;
    config.repetitions_list = args.repetitions.clone();
    config.trials = args.trials;
    config.word_length = args.word_length;
    config.length_policy = if args.any_length {
        LengthPolicy::AnyLength
    } else {
        LengthPolicy::Exact
    };
    config.dictionary_path = args.dictionary.clone();
    config.mode = mode;
    config.calibration_chars = calibration.to_vec();
    Ok(config)
}

fn run_sweep(args: &ExperimentArgs, config: ExperimentConfig) -> Result<()> {
    let experiment = Experiment::from_config(config)?;
    let report = experiment.run()?;
    summarize(&report);
    match &args.output {
        Some(path) => write_report(&report, path, args.format),
        None => {
            print!("{}", report.render(args.format)?);
            Ok(())
        }
    }
}

fn summarize(report: &Report) {
    eprintln!("dictionary: {} words, seed {}", report.dictionary_words, report.seed);
    for c in &report.cells {
        eprintln!(
            "{} N={:>2}: lag accuracy {:.4}, word accuracy {:.4}, mean letters {:.3} \
             (unresolved {}, empty {}, wrong word {}, errors {})",
            c.mode,
            c.repetitions,
            c.lag_accuracy,
            c.word_accuracy,
            c.mean_letters,
            c.unresolved,
            c.empty,
            c.wrong_word,
            c.signal_errors
        );
    }
}

fn gen_code(args: &CodeArgs) -> Result<()> {
    let book = args.codebook()?;
    let mut out = io::stdout().lock();
    writeln!(out, "{}", book.base().to_bit_string())?;
    for (p, c) in book.codes().iter().enumerate() {
        let bits: String = c.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect();
        writeln!(out, "{p},{},{bits}", book.lag_bits(p))?;
    }
    Ok(())
}

fn filter(args: &FilterArgs) -> Result<()> {
    let epochs = load_epochs(&args.input)?;
    let filtered = epochs
        .iter()
        .map(|e| bandpass_filter(e, &args.band.spec(e.sampling_rate())?))
        .collect::<Result<Vec<_>>>()?;
    write_epochs(&args.output, &filtered)
}

fn synth(args: &SynthArgs) -> Result<()> {
    let config = args.signal.synth(args.seed)?;
    let layout = args.signal.layout(&config)?;
    let epochs = layout
        .positions_of(&args.word.to_uppercase())?
        .into_iter()
        .enumerate()
        .map(|(i, p)| synth_epoch(&config, p, args.repetitions, i as u64))
        .collect::<Result<Vec<_>>>()?;
    std::fs::write(&args.output, format_epochs(&epochs))?;
    Ok(())
}

fn decode(args: &DecodeArgs) -> Result<()> {
    let synth = args.signal.synth(0)?;
    let layout = args.signal.layout(&synth)?;
    let (num_chars, spacing) = (layout.len(), layout.lag_spacing());
    let mut dict = dictionary(args.dictionary.as_deref(), &layout)?.dictionary;
    let epochs = load_epochs(&args.input)?;
    if epochs.len() < 2 {
        return Err(cvep::Error::InvalidParameter(
            "decoding needs at least two letters".into(),
        ));
    }
    if let Some(k) = args.word_length {
        dict = dict.restrict_to_length(k)?;
    }
    let responses = epochs
        .iter()
        .map(|e| {
            let e = match args.signal.filter(e.sampling_rate())? {
                Some(spec) => bandpass_filter(e, &spec)?,
                None => e.clone(),
            };
            Ok(average_repetitions(&e))
        })
        .collect::<Result<Vec<_>>>()?;

    println!("letter 1: reference recorded");
    let x_ref = &responses[0];
    let mut candidates = None;
    let mut template = None;
    for (i, x) in responses.iter().enumerate().skip(1) {
        if let Some((first, t)) = &template {
            let est = decode_absolute(t, x, num_chars, spacing)?;
            println!(
                "letter {}: position {} ({:?}) score {:.4}, relative lag {}",
                i + 1,
                est.lag,
                layout.character(est.lag)?,
                est.best_score,
                (est.lag + num_chars - first) % num_chars
            );
            continue;
        }
        let est = estimate_relative_lag(x_ref, x, num_chars, spacing)?;
        let next = match candidates.take() {
            None => filter_candidates(&dict, &layout, &LagSignature(vec![est.lag])),
            Some(c) => cvep::lexicon::CandidateSet::refine(&c, &layout, est.lag),
        };
        let prefixes = next.display_prefixes();
        println!(
            "letter {}: relative lag {} score {:.4}, {} candidates: {}",
            i + 1,
            est.lag,
            est.best_score,
            next.len(),
            prefixes.join(" ")
        );
        match next.resolution() {
            Resolution::Unique(word) => {
                println!("resolved: {word}");
                let first = layout.position(word.chars().next().expect("non-empty"))?;
                template = Some((first, promote_to_absolute(x_ref, first, num_chars, spacing)?));
            }
            Resolution::Empty => {
                println!("no dictionary word matches the observed lags");
                return Ok(());
            }
            Resolution::Unresolved => {}
        }
        candidates = Some(next);
    }
    if template.is_none() {
        println!("unresolved");
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenCode(args) => gen_code(&args),
        Command::Filter(args) => filter(&args),
        Command::Synth(args) => synth(&args),
        Command::Simulate(args) => {
            let config = experiment_config(&args, Mode::ZeroCalibration, &[])?;
            run_sweep(&args, config)
        }
        Command::Baseline(args) => {
            let config = experiment_config(&args.experiment, Mode::Calibrated, &args.calibration_chars)?;
            run_sweep(&args.experiment, config)
        }
        Command::Decode(args) => decode(&args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
