use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use rayon::prelude::*;
use specamc::channel::apply_channel;
use specamc::dataset::{
    build_dataset, kfold_split, load_entries, sha256_hex, write_iq_archive, Sample, MANIFEST_FILE,
};
use specamc::dataset::{ingest_iq_archive, DatasetManifest};
use specamc::dnn::{self, load_checkpoint, save_checkpoint, Shape};
use specamc::seed::{self, stage};
use specamc::stft::{cost_report, render_image, speed, write_raw, StftEngine};
use specamc::wavegen::synthesize_clean_frame;
use specamc::{CostModel, ModulationScheme, NetSpec};

use crate::config::PipelineConfig;
use crate::{
    BenchArgs, DatasetArgs, EvalArgs, SpectrogramArgs, SplitArgs, SynthArgs, TrainArgs, UsageError,
};

fn write(path: &Path, bytes: impl AsRef<[u8]>) -> anyhow::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn require(path: &Path, what: &str, hint: &str) -> anyhow::Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(UsageError(format!("{what} {} not found; {hint}", path.display())).into())
    }
}

pub fn synth(cfg: &PipelineConfig, a: SynthArgs) -> anyhow::Result<()> {
    let schemes = if a.schemes.is_empty() {
        ModulationScheme::ALL.to_vec()
    } else {
        a.schemes
    };
    if a.count == 0 {
        return Err(UsageError("--count must be at least 1".into()).into());
    }
    let path = a
        .file
        .unwrap_or_else(|| cfg.out.join("iq").join("frames.iqf"));
    let mut frames = Vec::with_capacity(schemes.len() * a.count);
    println!(
        "{:<8} {:>6} {:>10} {:>10} {:>10}",
        "scheme", "frames", "min_pow", "mean_pow", "max_pow"
    );
    for &scheme in &schemes {
        let batch: Vec<_> = (0..a.count as u64)
            .into_par_iter()
            .map(|i| {
                let clean = synthesize_clean_frame(scheme, &cfg.frame, i)?;
                match a.snr {
                    None => Ok(clean),
                    Some(snr) => {
                        let ch = cfg
                            .channel
                            .sample(Some(snr), seed::derive(clean.frame_seed, &[stage::CHANNEL]));
                        apply_channel(&clean, &ch)
                    }
                }
            })
            .collect::<specamc::Result<_>>()?;
        let powers: Vec<f64> = batch.iter().map(|f| f.mean_power()).collect();
        let mean = powers.iter().sum::<f64>() / powers.len() as f64;
        let min = powers.iter().copied().fold(f64::INFINITY, f64::min);
        let max = powers.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        println!(
            "{:<8} {:>6} {min:>10.4} {mean:>10.4} {max:>10.4}",
            scheme.name(),
            batch.len()
        );
        frames.extend(batch);
    }
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    write_iq_archive(&path, &frames)?;
    let digest =
        sha256_hex(&fs::read(&path).with_context(|| format!("reading {}", path.display()))?);
    println!(
        "wrote {} ({} frames, sha256 {digest})",
        path.display(),
        frames.len()
    );
    Ok(())
}

pub fn spectrogram(cfg: &PipelineConfig, a: SpectrogramArgs) -> anyhow::Result<()> {
    require(&a.input, "IQ archive", "run `specamc synth` first")?;
    let frames = ingest_iq_archive(&a.input)?;
    let engine = StftEngine::new(cfg.spectrogram_config()?)?;
    let dir = cfg.out.join("spectrograms");
    fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let d = &cfg.dataset;
    let written: Vec<PathBuf> = frames
        .par_iter()
        .enumerate()
        .map(|(i, frame)| -> anyhow::Result<PathBuf> {
            let spec = engine.compute(frame)?;
            let stem = format!("{i:05}_{}", frame.scheme.name());
            let png = dir.join(format!("{stem}.png"));
            render_image(&spec, d.image_height, d.image_width, d.palette)?
                .save(&png)
                .with_context(|| format!("writing {}", png.display()))?;
            if a.raw {
                write_raw(&spec, &dir.join(format!("{stem}.f32")))?;
            }
            Ok(png)
        })
        .collect::<anyhow::Result<_>>()?;
    let c = engine.config();
    println!(
        "{} spectrograms (W={}, O={}, nfft={}) -> {}",
        written.len(),
        c.window_len,
        c.overlap,
        c.nfft,
        dir.display()
    );
    Ok(())
}

pub fn dataset(cfg: &mut PipelineConfig, a: DatasetArgs, jobs: usize) -> anyhow::Result<()> {
    if !a.schemes.is_empty() {
        cfg.dataset.schemes = a.schemes;
    }
    if let Some(n) = a.samples_per_class {
        cfg.dataset.samples_per_class = n;
    }
    if !a.snrs.is_empty() {
        cfg.dataset.snr_list_db = a.snrs;
    }
    let dcfg = cfg.dataset_config()?;
    dcfg.validate()
        .map_err(|e| UsageError(format!("invalid dataset config: {e}")))?;
    let root = cfg.dataset_dir();
    let m = build_dataset(&dcfg, &root, jobs)?;
    for (class, n) in &m.totals.per_class {
        println!("{class:<8} {n}");
    }
    let digest = sha256_hex(&fs::read(root.join(MANIFEST_FILE)).context("reading manifest")?);
    println!(
        "{} entries -> {} (manifest sha256 {digest})",
        m.entries.len(),
        root.display()
    );
    Ok(())
}

fn read_manifest(cfg: &PipelineConfig) -> anyhow::Result<(DatasetManifest, PathBuf)> {
    let root = cfg.dataset_dir();
    require(
        &root.join(MANIFEST_FILE),
        "manifest",
        "run `specamc dataset` first",
    )?;
    Ok((DatasetManifest::read(&root)?, root))
}

pub fn split(cfg: &PipelineConfig, a: SplitArgs) -> anyhow::Result<()> {
    let (m, root) = read_manifest(cfg)?;
    let m = kfold_split(&m, a.k, m.config.master_seed)?;
    m.write(&root)?;
    for f in 0..a.k {
        let n = m.entries.iter().filter(|e| e.fold == Some(f)).count();
        println!("fold {f}: {n} entries");
    }
    Ok(())
}

fn folds_of(m: &DatasetManifest, kfold: bool, fold: usize) -> anyhow::Result<(usize, Vec<usize>)> {
    let k =
        m.k.ok_or_else(|| UsageError("manifest has no folds; run `specamc split` first".into()))?;
    if !kfold && fold >= k {
        return Err(UsageError(format!("--fold {fold} out of range for {k} folds")).into());
    }
    Ok((k, if kfold { (0..k).collect() } else { vec![fold] }))
}

fn checkpoint_path(cfg: &PipelineConfig, fold: usize) -> PathBuf {
    cfg.models_dir().join(format!("fold{fold}.ckpt"))
}

fn partition(m: &DatasetManifest, samples: &[Sample], pick: impl Fn(usize) -> bool) -> Vec<Sample> {
    m.entries
        .iter()
        .zip(samples)
        .filter(|(e, _)| e.fold.is_some_and(&pick))
        .map(|(_, s)| s.clone())
        .collect()
}

pub fn train(cfg: &PipelineConfig, a: TrainArgs) -> anyhow::Result<()> {
    let (m, root) = read_manifest(cfg)?;
    let (k, folds) = folds_of(&m, a.kfold, a.fold)?;
    let mut tc = cfg.train.clone();
    if let Some(e) = a.epochs {
        tc.max_epochs = e;
    }
    if let Some(lr) = a.lr {
        tc.initial_lr = lr;
    }
    tc.validate()
        .map_err(|e| UsageError(format!("invalid training config: {e}")))?;
    let samples = load_entries(&m, &root, |_| true)?;
    let shape = Shape::new(m.image.channels, m.image.height, m.image.width);
    let spec = NetSpec::default_for(m.num_classes(), shape, cfg.net_init_seed());
    fs::create_dir_all(cfg.models_dir()).context("creating models directory")?;
    for f in folds {
        // the fold after the test fold is used for validation
        let val_fold = (f + 1) % k;
        let test_set = partition(&m, &samples, |x| x == f);
        let val_set = partition(&m, &samples, |x| x == val_fold);
        let train_set = partition(&m, &samples, |x| x != f && x != val_fold);
        println!(
            "fold {f}: train {} / val {} / test {} samples, {} parameters",
            train_set.len(),
            val_set.len(),
            test_set.len(),
            dnn::Network::new(spec.clone())?.num_params()
        );
        let (net, hist) = dnn::train_with(&spec, &tc, &train_set, &val_set, |r| {
            println!(
                "  iter {:>5} epoch {:>2} lr {:.0e} train_loss {:.4} val_loss {:.4} val_acc {:.3}",
                r.iteration, r.epoch, r.lr, r.train_loss, r.val_loss, r.val_accuracy
            );
        })?;
        let ckpt = checkpoint_path(cfg, f);
        save_checkpoint(&net, &ckpt)?;
        write(
            &cfg.models_dir().join(format!("fold{f}_history.csv")),
            hist.to_csv(),
        )?;
        println!(
            "fold {f}: best val_loss {:.4} at iteration {} ({:?}) -> {}",
            hist.best_val_loss,
            hist.best_iteration,
            hist.stop,
            ckpt.display()
        );
    }
    Ok(())
}

pub fn eval(cfg: &PipelineConfig, a: EvalArgs) -> anyhow::Result<()> {
    let (m, root) = read_manifest(cfg)?;
    let (_, folds) = folds_of(&m, a.kfold, a.fold)?;
    for &f in &folds {
        require(
            &checkpoint_path(cfg, f),
            "checkpoint",
            "run `specamc train` first",
        )?;
    }
    let reports = cfg.reports_dir();
    let mut pooled: Vec<(Sample, usize)> = Vec::new();
    for &f in &folds {
        let net = load_checkpoint(&checkpoint_path(cfg, f))?;
        let test = load_entries(&m, &root, |e| e.fold == Some(f))?;
        let pred = dnn::predict(&net, &test)?;
        let report = dnn::report_from_predictions(&test, &pred, &m.classes)?;
        emit_report(&reports, &format!("fold{f}"), &report)?;
        pooled.extend(test.into_iter().zip(pred));
    }
    if folds.len() > 1 {
        let (samples, pred): (Vec<Sample>, Vec<usize>) = pooled.into_iter().unzip();
        let report = dnn::report_from_predictions(&samples, &pred, &m.classes)?;
        emit_report(&reports, "pooled", &report)?;
    }
    Ok(())
}

fn emit_report(dir: &Path, stem: &str, r: &dnn::EvalReport) -> anyhow::Result<()> {
    println!("== {stem} ==\n{}", r.to_text());
    write(
        &dir.join(format!("{stem}_confusion.csv")),
        r.confusion.to_csv(),
    )?;
    write(
        &dir.join(format!("{stem}_per_class.csv")),
        r.per_class_csv(),
    )?;
    write(&dir.join(format!("{stem}_per_snr.csv")), r.per_snr_csv())?;
    write(&dir.join(format!("{stem}_report.txt")), r.to_text())?;
    let png = dir.join(format!("{stem}_confusion.png"));
    r.confusion
        .heatmap(24)
        .save(&png)
        .with_context(|| format!("writing {}", png.display()))?;
    Ok(())
}

pub fn bench(cfg: &PipelineConfig, a: BenchArgs) -> anyhow::Result<()> {
    if a.n == 0 || a.runs < 5 {
        return Err(UsageError("bench needs --n >= 1 and --runs >= 5".into()).into());
    }
    let fs_hz = cfg.frame.sample_rate_hz;
    let timing = speed::measure(a.n, a.runs, cfg.seed)?;
    let (hi, lo) = (timing.median_highres(), timing.median_transformed());
    let mut csv = String::from(
        "model,nfft_hi,nfft_lo,reduction_pct,span_ratio,n_spectrograms,runs,median_highres_s,median_transformed_s,speedup\n",
    );
    for model in [CostModel::Linear, CostModel::NLogN] {
        let r = cost_report(8192, 32, model)?
            .with_spans(speed::HIGHRES_SPAN, speed::TRANSFORMED_SPAN, fs_hz)
            .with_wall_clock(hi, lo);
        let span = r.span_ratio.unwrap_or(f64::NAN);
        println!(
            "cost model {:<7} nfft 8192 -> 32: {:.2}% reduction",
            format!("{model:?}").to_lowercase(),
            r.reduction_pct
        );
        csv.push_str(&format!(
            "{},{},{},{:.6},{span:.4},{},{},{hi:.6},{lo:.6},{:.3}\n",
            format!("{model:?}").to_lowercase(),
            r.nfft_hi,
            r.nfft_lo,
            r.reduction_pct,
            a.n,
            a.runs,
            timing.speedup()
        ));
    }
    let t_hi = speed::HIGHRES_SPAN as f64 / fs_hz;
    let t_lo = speed::TRANSFORMED_SPAN as f64 / fs_hz;
    println!(
        "acquisition span: {:.2} ms vs {:.2} ms, ratio {:.2}",
        t_hi * 1e3,
        t_lo * 1e3,
        t_hi / t_lo
    );
    println!(
        "wall clock, {} spectrograms, median of {} runs: highres {hi:.4} s, transformed {lo:.4} s, speedup {:.1}x",
        a.n,
        a.runs,
        timing.speedup()
    );
    let path = cfg.out.join("bench.csv");
    write(&path, csv)?;
    println!("wrote {}", path.display());
    Ok(())
}
