use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use graph_energy::ensemble::{
    estimate_effective_threshold, run_sweep, Baseline, ExecConfig, PlateauReference, SweepMode,
    SweepSpec,
};
use graph_energy::graph_gen::{generate_ppm_with, Adjacency, GraphSample, PpmParams, Sampler};
use graph_energy::io::{self, RunManifest};
use graph_energy::spectral::{self, Tolerances, DEFAULT_BINS};
use graph_energy::theory::{detectability_threshold, TheoryPrediction};
use graph_energy::{resolve_params, Error, VERSION};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::{GenerateArgs, SpectrumArgs, SweepArgs, TheoryArgs};

type Result<T> = std::result::Result<T, Error>;

/// Default worker-thread count for sweeps.
const THREADS_ENV: &str = "GRAPH_ENERGY_THREADS";

fn required<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidParameter(format!("missing --{flag}")))
}

/// Parses a snake_case enum name the same way the library's serde does.
fn parse_choice<T: DeserializeOwned>(value: &str, flag: &str) -> Result<T> {
    serde_json::from_value(Value::String(value.to_string()))
        .map_err(|_| Error::InvalidParameter(format!("unknown --{flag} value {value:?}")))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn write_manifest(path: &Path, manifest: &RunManifest) -> Result<()> {
    let mut w = create(path)?;
    io::write_manifest(&mut w, manifest)?;
    w.flush()?;
    Ok(())
}

fn manifest(command: &str, parameters: &impl Serialize, started: Instant, outputs: &[&Path]) -> Result<RunManifest> {
    Ok(RunManifest {
        command: command.to_string(),
        version: VERSION.to_string(),
        parameters: serde_json::to_value(parameters)?,
        sweep: None,
        threads: 1,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
        attempted: 1,
        failures: Vec::new(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    })
}

fn model_params(n: usize, k: f64, k_ab: Option<f64>, model: &str) -> Result<PpmParams> {
    match model {
        "planted" => resolve_params(n, k, required(k_ab, "kab")?),
        "erdos_renyi" | "er" => PpmParams::erdos_renyi(n, k),
        other => Err(Error::InvalidParameter(format!("unknown --model value {other:?}"))),
    }
}

pub fn generate(mut a: GenerateArgs) -> Result<()> {
    let started = Instant::now();
    let n = required(a.n, "n")?;
    let k = required(a.k, "k")?;
    let model = a.model.get_or_insert_with(|| "planted".into()).clone();
    let sampler: Sampler = parse_choice(a.sampler.get_or_insert_with(|| "pair_loop".into()), "sampler")?;
    let seed = *a.seed.get_or_insert(0);
    let out = a.out.get_or_insert_with(|| PathBuf::from("graph.edgelist")).clone();

    let params = model_params(n, k, a.k_ab, &model)?;
    let graph = generate_ppm_with(&params, seed, sampler)?;

    let mut w = create(&out)?;
    io::write_edge_list(&mut w, &graph)?;
    w.flush()?;
    let manifest_path = with_suffix(&out, ".manifest.json");
    write_manifest(&manifest_path, &manifest("generate", &a, started, &[&out])?)?;
    eprintln!("wrote {} ({} edges)", out.display(), graph.edge_count());
    Ok(())
}

#[derive(Debug, Serialize)]
struct SpectrumReport {
    n: usize,
    m: usize,
    energy: f64,
    lambda1: f64,
    lambda2: Option<f64>,
    lambda2_magnitude: Option<f64>,
    lambda_min: Option<f64>,
    sigma2: f64,
    bulk_edge_pred: f64,
    outlier_count: usize,
    trace: f64,
    second_moment: f64,
}

fn print_report(value: &Value, format: &str) -> Result<()> {
    match format {
        "json" => println!("{}", serde_json::to_string_pretty(value)?),
        "text" => {
            let obj = value.as_object().expect("reports are objects");
            let width = obj.keys().map(String::len).max().unwrap_or(0);
            for (key, v) in obj {
                let shown = match v {
                    Value::Number(x) => x.as_f64().map(io::fmt_num).unwrap_or_else(|| x.to_string()),
                    Value::Null => "-".to_string(),
                    other => other.to_string(),
                };
                println!("{key:<width$}  {shown}");
            }
        }
        other => return Err(Error::InvalidParameter(format!("unknown --format value {other:?}"))),
    }
    Ok(())
}

pub fn spectrum(mut a: SpectrumArgs) -> Result<()> {
    let started = Instant::now();
    let bins = *a.bins.get_or_insert(DEFAULT_BINS);
    if bins == 0 {
        return Err(Error::InvalidParameter("bins must be at least 1".into()));
    }
    let format = a.format.get_or_insert_with(|| "json".into()).clone();
    let prefix = a.out.get_or_insert_with(|| PathBuf::from("spectrum")).clone();

    let (adjacency, seed, sigma2) = match &a.input {
        Some(path) => {
            let list = io::read_edge_list(BufReader::new(File::open(path)?))?;
            let n = match (a.n, list.declared_n()?) {
                (Some(n), _) | (None, Some(n)) => n,
                (None, None) => list.implied_n(),
            };
            if list.edges.is_empty() && n == 0 {
                return Err(Error::InvalidParameter("no edges / empty graph".into()));
            }
            if list.edges.is_empty() {
                eprintln!("warning: no edges / empty graph; energy is 0");
            }
            let adjacency = Adjacency::from_edges(n, &list.edges)?;
            let seed = list.header.get("seed").and_then(|s| s.parse().ok()).unwrap_or(0);
            let header_f64 = |key: &str| list.header.get(key).and_then(|s| s.parse::<f64>().ok());
            // Model variance when the parameters are known, otherwise the
            // ER variance at the observed density.
            let er = list.header.get("model").is_some_and(|m| m == "erdos_renyi");
            let sigma2 = match (a.k.or(header_f64("k")), a.k_ab.or(header_f64("k_ab"))) {
                (Some(k), _) if er => PpmParams::erdos_renyi(n, k)?.sigma2,
                (Some(k), Some(k_ab)) if n >= 4 && n % 2 == 0 => resolve_params(n, k, k_ab)?.sigma2,
                _ => {
                    let pairs = n as f64 * (n as f64 - 1.0) / 2.0;
                    let p = if pairs > 0.0 { adjacency.edge_count() as f64 / pairs } else { 0.0 };
                    p * (1.0 - p)
                }
            };
            (adjacency, seed, sigma2)
        }
        None => {
            let n = required(a.n, "n")?;
            let k = required(a.k, "k")?;
            let model = a.model.get_or_insert_with(|| "planted".into()).clone();
            let sampler: Sampler =
                parse_choice(a.sampler.get_or_insert_with(|| "pair_loop".into()), "sampler")?;
            let seed = *a.seed.get_or_insert(0);
            let params = model_params(n, k, a.k_ab, &model)?;
            let GraphSample { adjacency, .. } = generate_ppm_with(&params, seed, sampler)?;
            (adjacency, seed, params.sigma2)
        }
    };

    let spec = spectral::spectrum_of(&adjacency, seed)?;
    spec.verify(&Tolerances::default(), seed)?;
    let bulk = spectral::bulk_stats_with(&spec, sigma2, bins);
    let report = SpectrumReport {
        n: spec.n,
        m: spec.m,
        energy: spec.energy,
        lambda1: spec.lambda1,
        lambda2: spec.lambda2_alg,
        lambda2_magnitude: spec.lambda2_mag,
        lambda_min: spec.eigenvalues.last().copied(),
        sigma2,
        bulk_edge_pred: bulk.bulk_edge_pred,
        outlier_count: bulk.outlier_count,
        trace: spec.moment(1),
        second_moment: spec.moment(2),
    };

    let spectrum_path = with_suffix(&prefix, ".spectrum.csv");
    let histogram_path = with_suffix(&prefix, ".histogram.csv");
    let report_path = with_suffix(&prefix, ".report.json");
    let mut w = create(&spectrum_path)?;
    io::write_spectrum_csv(&mut w, &spec.eigenvalues)?;
    w.flush()?;
    let mut w = create(&histogram_path)?;
    io::write_histogram_csv(&mut w, &bulk.histogram)?;
    w.flush()?;
    let report = serde_json::to_value(&report)?;
    let mut w = create(&report_path)?;
    serde_json::to_writer_pretty(&mut w, &report)?;
    writeln!(w)?;
    w.flush()?;
    write_manifest(
        &with_suffix(&prefix, ".manifest.json"),
        &manifest("spectrum", &a, started, &[&spectrum_path, &histogram_path, &report_path])?,
    )?;
    print_report(&report, &format)
}

/// `"a,b,c"` or inclusive `"start:stop:step"` (step may be negative).
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("bad --kab-grid {text:?}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    if text.contains(':') {
        let parts: Vec<f64> = text.split(':').map(num).collect::<Result<_>>()?;
        let [start, stop, step] = parts[..] else { return Err(bad()) };
        if step == 0.0 || !step.is_finite() || (stop - start) * step < 0.0 {
            return Err(bad());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count).map(|i| start + step * i as f64).collect())
    } else {
        text.split(',').map(num).collect()
    }
}

fn default_reps(n: usize) -> usize {
    if n <= 500 {
        2000
    } else {
        1000
    }
}

pub fn sweep(mut a: SweepArgs) -> Result<()> {
    let started = Instant::now();
    if a.threads.is_none() {
        a.threads = match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| {
                Error::InvalidParameter(format!("{THREADS_ENV} must be a thread count (got {v:?})"))
            })?),
            Err(_) => Some(0),
        };
    }
    let threads = a.threads.unwrap_or(0);
    let prefix = a.out.get_or_insert_with(|| PathBuf::from("sweep")).clone();

    let (spec, plateau) = match &a.replay {
        Some(path) => {
            let old = io::read_manifest(BufReader::new(File::open(path)?))?;
            let spec = old
                .sweep
                .ok_or_else(|| Error::InvalidParameter(format!("{} records no sweep", path.display())))?;
            let plateau = old
                .parameters
                .get("plateau")
                .and_then(Value::as_str)
                .unwrap_or("empirical")
                .to_string();
            (spec, plateau)
        }
        None => {
            let n = required(a.n, "n")?;
            let k = required(a.k, "k")?;
            let grid = match &a.k_ab_grid {
                Some(g) => parse_grid(g)?,
                None => SweepSpec::default_grid(k),
            };
            let spec = SweepSpec {
                n,
                k,
                k_ab_grid: grid,
                reps: *a.reps.get_or_insert(default_reps(n)),
                master_seed: *a.seed.get_or_insert(0),
                mode: parse_choice::<SweepMode>(a.mode.get_or_insert_with(|| "both".into()), "mode")?,
                sampler: parse_choice::<Sampler>(a.sampler.get_or_insert_with(|| "pair_loop".into()), "sampler")?,
                baseline: parse_choice::<Baseline>(
                    a.baseline.get_or_insert_with(|| "planted_at_k".into()),
                    "baseline",
                )?,
            };
            let plateau = a.plateau.get_or_insert_with(|| "empirical".into()).clone();
            (spec, plateau)
        }
    };
    let reference: PlateauReference = parse_choice(&plateau, "plateau")?;
    a.plateau = Some(plateau);
    spec.validate()?;

    let exec = ExecConfig {
        threads,
        ..ExecConfig::default()
    };
    let mut summary = run_sweep(&spec, &exec)?;
    summary.effective_threshold = estimate_effective_threshold(&summary, reference);

    let rows = io::summary_rows(&summary);
    let summary_path = with_suffix(&prefix, ".summary.csv");
    let plot_path = with_suffix(&prefix, ".plot.dat");
    let mut w = create(&summary_path)?;
    io::write_summary_csv(&mut w, &rows)?;
    w.flush()?;
    let mut w = create(&plot_path)?;
    io::write_plot_data(&mut w, &rows)?;
    w.flush()?;

    let mut m = manifest("sweep", &a, started, &[&summary_path, &plot_path])?;
    m.sweep = Some(spec.clone());
    m.threads = threads;
    m.attempted = summary.attempted;
    m.failures = summary.failures.clone();
    write_manifest(&with_suffix(&prefix, ".manifest.json"), &m)?;

    if !summary.failures.is_empty() {
        eprintln!(
            "warning: {} of {} instantiations failed and were excluded",
            summary.failures.len(),
            summary.attempted
        );
    }
    let result = json!({
        "summary": summary_path.display().to_string(),
        "plot_data": plot_path.display().to_string(),
        "effective_threshold": summary.effective_threshold,
        "theoretical_threshold": 2.0 * spec.k.sqrt(),
        "baseline_mean_energy": summary.baseline_energy.mean(),
    });
    println!("{}", serde_json::to_string_pretty(&result)?);
    Ok(())
}

pub fn theory(mut a: TheoryArgs) -> Result<()> {
    let started = Instant::now();
    let k = required(a.k, "k")?;
    let q = *a.q.get_or_insert(2);
    let format = a.format.get_or_insert_with(|| "json".into()).clone();
    let threshold = detectability_threshold(k, q)?;

    let mut value = match (a.n, a.k_ab) {
        (Some(n), Some(k_ab)) => {
            let params = resolve_params(n, k, k_ab)?;
            serde_json::to_value(TheoryPrediction::evaluate_for(&params, q)?)?
        }
        (None, None) => json!({ "k": k }),
        _ => return Err(Error::InvalidParameter("--n and --kab go together".into())),
    };
    let obj = value.as_object_mut().expect("object");
    obj.insert("q".into(), json!(q));
    obj.insert("threshold".into(), json!(threshold));

    if let Some(out) = &a.out {
        let mut w = create(out)?;
        serde_json::to_writer_pretty(&mut w, &value)?;
        writeln!(w)?;
        w.flush()?;
        write_manifest(
            &with_suffix(out, ".manifest.json"),
            &manifest("theory", &a, started, &[out])?,
        )?;
    }
    print_report(&value, &format)
}
