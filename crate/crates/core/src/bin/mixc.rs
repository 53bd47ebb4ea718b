//! `mixc`: synthetic spray data, mixup training and reporting from the shell.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use mixc::augment::{AugmentConfig, Pipeline};
use mixc::metrics::{compare_runs, evaluate, NamedRun};
use mixc::netcore::{Model, ModelSpec};
use mixc::store::{
    load_checkpoint, load_split_sized, read_history, read_run_metrics, resolve_path,
    to_canonical_string, write_report, write_rgb_png, LoadedDataset, RunArtifact, RunConfig, RunMetrics,
};
use mixc::synthgen::{
    corrupt_labels_in, generate_dataset, CorruptionMode, DatasetManifest, GenConfig, Split, DEFAULT_COUNTS,
    MIN_IMAGE_SIZE,
};
use mixc::trainer::{kfold_cv, train, train_val_gap, TrainConfig};
use mixc::ImageTensor;

#[derive(Parser)]
#[command(name = "mixc", version, about = "Mixup training for spray-regime classification")]
struct Cli {
    /// Directory relative paths resolve against (default: $MIXC_RUN_ROOT, else the working directory).
    #[arg(long, global = true)]
    run_root: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Render a labelled synthetic dataset.
    GenData(GenArgs),
    /// Train SprayNet and write a run directory.
    Train(TrainArgs),
    /// Stratified k-fold cross-validation.
    Cv(CvArgs),
    /// Evaluate a checkpoint on a dataset split.
    Eval(EvalArgs),
    /// Write a grid of pipeline outputs with a λ sidecar.
    MixupPreview(PreviewArgs),
    /// Tabulate train accuracy, gap and test accuracy across run directories.
    Compare(CompareArgs),
    /// Write a copy of a dataset with corrupted labels.
    Corrupt(CorruptArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    out: PathBuf,
    /// Per-class counts: Pre/Post, NoCollapse, Transitional, Collapse.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_COUNTS)]
    counts: Vec<usize>,
    #[arg(long, default_value_t = 64)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Pgm)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Pgm,
    Png,
}

#[derive(Args, Clone)]
struct TrainFlags {
    /// Mixup Beta(α, α) shape; 0 disables mixup.
    #[arg(long, default_value_t = 0.0)]
    alpha: f64,
    /// Maximum random rotation in degrees.
    #[arg(long, default_value_t = 0.0)]
    rot: f64,
    /// Maximum random shift as a fraction of the image size.
    #[arg(long, default_value_t = 0.0)]
    shift: f64,
    #[arg(long)]
    hflip: bool,
    /// Allow rotation above 20 degrees or shift above 0.2.
    #[arg(long)]
    extended_range: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Desk-scale schedule: 40 epochs, patiences 3/15, 10-epoch gap window.
    #[arg(long)]
    desk: bool,
    #[arg(long)]
    max_epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    /// Resize images to this size (default: the dataset's).
    #[arg(long)]
    image_size: Option<usize>,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    flags: TrainFlags,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// Write the fold report as JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    flags: TrainFlags,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    checkpoint: PathBuf,
    #[arg(long, value_enum, default_value_t = SplitArg::Test)]
    split: SplitArg,
    /// Directory for report.json and report.txt.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SplitArg {
    Train,
    Val,
    Test,
}

impl From<SplitArg> for Split {
    fn from(s: SplitArg) -> Split {
        match s {
            SplitArg::Train => Split::Train,
            SplitArg::Val => Split::Val,
            SplitArg::Test => Split::Test,
        }
    }
}

#[derive(Args)]
struct PreviewArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 0.2)]
    alpha: f64,
    /// Rows x columns.
    #[arg(long, default_value = "4x5")]
    grid: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CompareArgs {
    /// Run directories written by `train`.
    #[arg(long, num_args = 2.., required = true)]
    runs: Vec<PathBuf>,
    /// Row names (default: directory names).
    #[arg(long, value_delimiter = ',')]
    names: Vec<String>,
    #[arg(long, default_value_t = 50)]
    last_n: usize,
    /// Write the table as CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorruptArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long)]
    fraction: f64,
    /// Boundary half-width on the collapse parameter.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Splits to corrupt.
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [SplitArg::Train])]
    splits: Vec<SplitArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Boundary,
    Random,
}

enum Failure {
    Usage(String),
    Runtime(mixc::Error),
}

impl From<mixc::Error> for Failure {
    fn from(e: mixc::Error) -> Self {
        Failure::Runtime(e)
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

fn io_err(path: &Path, e: std::io::Error) -> Failure {
    Failure::Runtime(mixc::Error::Io {
        path: path.to_path_buf(),
        source: e,
    })
}

struct Ctx {
    root: Option<PathBuf>,
}

impl Ctx {
    fn path(&self, p: &Path) -> PathBuf {
        resolve_path(p, self.root.as_deref())
    }

    /// Resolves a dataset directory, which must contain a manifest.
    fn data_dir(&self, p: &Path) -> Outcome<PathBuf> {
        let dir = self.path(p);
        if !dir.join("manifest.json").is_file() {
            return usage(format!("no dataset manifest under {}", dir.display()));
        }
        Ok(dir)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let ctx = Ctx { root: cli.run_root };
    let result = match cli.command {
        Command::GenData(a) => gen_data(&ctx, a),
        Command::Train(a) => train_cmd(&ctx, a),
        Command::Cv(a) => cv_cmd(&ctx, a),
        Command::Eval(a) => eval_cmd(&ctx, a),
        Command::MixupPreview(a) => preview_cmd(&ctx, a),
        Command::Compare(a) => compare_cmd(&ctx, a),
        Command::Corrupt(a) => corrupt_cmd(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn gen_data(ctx: &Ctx, a: GenArgs) -> Outcome {
    if a.size < MIN_IMAGE_SIZE {
        return usage(format!("size {} < {MIN_IMAGE_SIZE}", a.size));
    }
    let Ok(counts) = <[usize; 4]>::try_from(a.counts.as_slice()) else {
        return usage(format!("--counts needs 4 values, got {}", a.counts.len()));
    };
    if counts.contains(&0) {
        return usage("every class count must be positive");
    }
    let config = GenConfig {
        counts,
        size: a.size,
        seed: a.seed,
        format: match a.format {
            Format::Pgm => mixc::store::ImageFormat::Pgm,
            Format::Png => mixc::store::ImageFormat::Png,
        },
    };
    let manifest = generate_dataset(&config, &ctx.path(&a.out))?;
    println!("{}", manifest.summary());
    Ok(())
}

fn train_config(flags: &TrainFlags) -> Outcome<TrainConfig> {
    let mut config = if flags.desk { TrainConfig::desk() } else { TrainConfig::default() };
    config.augment = AugmentConfig {
        alpha: flags.alpha,
        rotation_max: flags.rot,
        shift_max: flags.shift,
        hflip: flags.hflip,
        extended_range: flags.extended_range,
    };
    config.seed = flags.seed;
    if let Some(n) = flags.max_epochs {
        config.max_epochs = n;
    }
    if let Some(b) = flags.batch_size {
        config.batch_size = b;
    }
    if let Some(lr) = flags.lr {
        config.init_lr = lr;
    }
    if let Some(s) = flags.image_size {
        if s < MIN_IMAGE_SIZE {
            return usage(format!("image size {s} < {MIN_IMAGE_SIZE}"));
        }
    }
    config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(config)
}

/// Loads the dataset and fixes `config.image_size` to the size actually trained on.
fn load_for(dir: &Path, flags: &TrainFlags, config: &mut TrainConfig) -> Outcome<LoadedDataset> {
    let data = LoadedDataset::load_sized(dir, flags.image_size)?;
    config.image_size = flags.image_size.unwrap_or(data.manifest.image_size);
    Ok(data)
}

fn train_cmd(ctx: &Ctx, a: TrainArgs) -> Outcome {
    let mut config = train_config(&a.flags)?;
    let data_dir = ctx.data_dir(&a.data)?;
    let out = ctx.path(&a.out);
    let data = load_for(&data_dir, &a.flags, &mut config)?;
    let run_config = RunConfig {
        data: a.data.display().to_string(),
        train: config.clone(),
    };
    println!("config {}", to_canonical_string(&run_config)?);
    println!("pipeline {}", Pipeline::new(config.augment)?.describe());

    let spec = ModelSpec::spray_net(3, config.image_size, config.image_size);
    let outcome = train(Model::new(spec, config.seed)?, &data.train, &data.val, &config)?;
    let evaluation = evaluate(&outcome.best_model, &data.test)?;
    let history = &outcome.history;
    let metrics = RunMetrics {
        epochs: history.epochs.len(),
        stop_reason: history.stop_reason.as_str().to_string(),
        best_epoch: history.best_epoch,
        gap: train_val_gap(history, config.gap_window),
        train_acc: history.mean_train_acc(config.gap_window),
        test_acc: evaluation.report.accuracy,
    };
    let artifact = RunArtifact::write(&out, &run_config, history, &outcome.best_model, &metrics, Some(&evaluation))?;
    println!(
        "{} epochs ({}), best epoch {}",
        metrics.epochs, metrics.stop_reason, metrics.best_epoch
    );
    println!(
        "gap {:.1}% test accuracy {:.1}%",
        100.0 * metrics.gap,
        100.0 * metrics.test_acc
    );
    println!("wrote {}", artifact.dir.display());
    Ok(())
}

fn cv_cmd(ctx: &Ctx, a: CvArgs) -> Outcome {
    if a.k < 2 {
        return usage(format!("k must be >= 2, got {}", a.k));
    }
    let mut config = train_config(&a.flags)?;
    let data_dir = ctx.data_dir(&a.data)?;
    let data = load_for(&data_dir, &a.flags, &mut config)?;
    let mut samples = data.train;
    samples.extend(data.val);
    samples.extend(data.test);
    println!("config {}", to_canonical_string(&config)?);
    let spec = ModelSpec::spray_net(3, config.image_size, config.image_size);
    let report = kfold_cv(&samples, a.k, &config, &spec)?;
    for (i, (size, acc)) in report.fold_sizes.iter().zip(&report.accuracies).enumerate() {
        println!("fold {i}: {size} samples, test accuracy {:.1}%", 100.0 * acc);
    }
    println!("mean {:.1}% std {:.1}%", 100.0 * report.mean, 100.0 * report.std);
    if let Some(out) = a.out {
        let path = ctx.path(&out);
        fs::write(&path, to_canonical_string(&report)? + "\n").map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

fn eval_cmd(ctx: &Ctx, a: EvalArgs) -> Outcome {
    let data_dir = ctx.data_dir(&a.data)?;
    let checkpoint = ctx.path(&a.checkpoint);
    if !checkpoint.is_file() {
        return usage(format!("no checkpoint at {}", checkpoint.display()));
    }
    let model = load_checkpoint(&checkpoint)?;
    let manifest = DatasetManifest::read(&data_dir.join("manifest.json"))?;
    let size = model.spec().input_height;
    let samples = load_split_sized(&manifest, &data_dir, a.split.into(), Some(size))?;
    let evaluation = evaluate(&model, &samples)?;
    print!("{}", evaluation.report.to_text());
    if let Some(out) = a.out {
        let dir = ctx.path(&out);
        fs::create_dir_all(&dir).map_err(|e| io_err(&dir, e))?;
        write_report(&evaluation, &dir)?;
    }
    Ok(())
}

fn parse_grid(s: &str) -> Option<(usize, usize)> {
    let (r, c) = s.split_once(['x', 'X'])?;
    let (r, c) = (r.trim().parse().ok()?, c.trim().parse().ok()?);
    (r > 0 && c > 0).then_some((r, c))
}

#[derive(Serialize)]
struct PreviewCell {
    row: usize,
    col: usize,
    lambda: f64,
    index_a: usize,
    index_b: usize,
}

#[derive(Serialize)]
struct PreviewSidecar {
    alpha: f64,
    seed: u64,
    rows: usize,
    cols: usize,
    cells: Vec<PreviewCell>,
}

fn preview_cmd(ctx: &Ctx, a: PreviewArgs) -> Outcome {
    let Some((rows, cols)) = parse_grid(&a.grid) else {
        return usage(format!("grid must look like 4x5, got {:?}", a.grid));
    };
    let pipeline = Pipeline::new(AugmentConfig::mixup(a.alpha)).map_err(|e| Failure::Usage(e.to_string()))?;
    let data_dir = ctx.data_dir(&a.data)?;
    let out = ctx.path(&a.out);
    let manifest = DatasetManifest::read(&data_dir.join("manifest.json"))?;
    let train_set = load_split_sized(&manifest, &data_dir, Split::Train, None)?;
    let n = rows * cols;
    // mixup needs a partner even for a single cell
    let sources: Vec<_> = train_set.iter().cycle().take(n.max(2)).cloned().collect();
    let batch = pipeline.run(&sources, a.seed, 0)?;

    let first = &batch.samples[0].image;
    let (h, w) = (first.height(), first.width());
    let mut grid = ImageTensor::zeros(rows * h, cols * w, 3);
    let mut cells = Vec::with_capacity(n);
    for k in 0..n {
        let (row, col) = (k / cols, k % cols);
        let img = &batch.samples[k].image;
        for c in 0..3 {
            let src = c.min(img.channels() - 1);
            for y in 0..h {
                for x in 0..w {
                    grid.set(c, row * h + y, col * w + x, img.get(src, y, x));
                }
            }
        }
        let (lambda, index_a, index_b) = match batch.records.get(k) {
            Some(r) => (r.lambda, r.index_a, r.index_b),
            None => (1.0, k, k),
        };
        cells.push(PreviewCell {
            row,
            col,
            lambda,
            index_a,
            index_b,
        });
    }
    write_rgb_png(&grid, &out)?;
    let sidecar = out.with_extension("json");
    let body = to_canonical_string(&PreviewSidecar {
        alpha: a.alpha,
        seed: a.seed,
        rows,
        cols,
        cells,
    })? + "\n";
    fs::write(&sidecar, body).map_err(|e| io_err(&sidecar, e))?;
    println!("wrote {} and {}", out.display(), sidecar.display());
    Ok(())
}

fn compare_cmd(ctx: &Ctx, a: CompareArgs) -> Outcome {
    if !a.names.is_empty() && a.names.len() != a.runs.len() {
        return usage(format!("{} names for {} runs", a.names.len(), a.runs.len()));
    }
    let dirs: Vec<PathBuf> = a.runs.iter().map(|r| ctx.path(r)).collect();
    for d in &dirs {
        if !d.join("history.csv").is_file() {
            return usage(format!("{} is not a run directory", d.display()));
        }
    }
    let names: Vec<String> = if a.names.is_empty() {
        dirs.iter()
            .map(|d| d.file_name().map_or_else(|| d.display().to_string(), |n| n.to_string_lossy().into_owned()))
            .collect()
    } else {
        a.names
    };
    let mut loaded = Vec::new();
    for d in &dirs {
        let history = read_history(d)?;
        let metrics = read_run_metrics(&d.join("metrics.json"))?;
        loaded.push((history, metrics.test_acc));
    }
    let runs: Vec<NamedRun> = names
        .iter()
        .zip(&loaded)
        .map(|(name, (history, test_acc))| NamedRun {
            name,
            history,
            test_acc: *test_acc,
        })
        .collect();
    let table = compare_runs(&runs, a.last_n)?;
    print!("{}", table.to_text());
    if let Some(out) = a.out {
        let path = ctx.path(&out);
        fs::write(&path, table.to_csv()).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

fn corrupt_cmd(ctx: &Ctx, a: CorruptArgs) -> Outcome {
    if !(0.0..=1.0).contains(&a.fraction) {
        return usage(format!("fraction {} outside [0,1]", a.fraction));
    }
    if a.delta.is_nan() || a.delta <= 0.0 {
        return usage(format!("delta must be > 0, got {}", a.delta));
    }
    let data_dir = ctx.data_dir(&a.data)?;
    let out = ctx.path(&a.out);
    let mode = match a.mode {
        ModeArg::Boundary => CorruptionMode::Boundary {
            fraction: a.fraction,
            delta: a.delta,
        },
        ModeArg::Random => CorruptionMode::Random { fraction: a.fraction },
    };
    let splits: Vec<Split> = a.splits.iter().map(|&s| s.into()).collect();
    let manifest = DatasetManifest::read(&data_dir.join("manifest.json"))?;
    let (corrupted, report) = corrupt_labels_in(&manifest, mode, a.seed, &splits)?;

    for entry in &corrupted.entries {
        let dst = out.join(&entry.path);
        if let Some(parent) = dst.parent() {
            fs::create_dir_all(parent).map_err(|e| io_err(parent, e))?;
        }
        let src = data_dir.join(&entry.path);
        fs::copy(&src, &dst).map_err(|e| io_err(&src, e))?;
    }
    corrupted.write(&out.join("manifest.json"))?;
    println!(
        "{mode}: corrupted {} of {} ({} eligible, {} requested), achieved fraction {:.4}",
        report.corrupted, report.population, report.eligible, report.requested, report.achieved_fraction
    );
    Ok(())
}
