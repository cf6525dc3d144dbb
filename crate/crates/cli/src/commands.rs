use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;
use woodleaf::estimate::estimate_angular_step;
use woodleaf::io::{read_cloud, read_labels, write_cloud, write_cloud_colored, write_labels, CloudFileFormat, IoError};
use woodleaf::metrics::{confusion, throughput_report, AccuracyReport};
use woodleaf::model::validate_params;
use woodleaf::synth::{generate_tree, SyntheticTreeSpec};
use woodleaf::{classify, LabeledCloud, PipelineParams, Point, ScanConfig};

use crate::{ClassifyArgs, EvaluateArgs, ParamArgs, SynthArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Pipeline(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) | CliError::Input(_) => 2,
            CliError::Pipeline(_) => 3,
        }
    }
}

fn with_path(path: &Path, e: impl std::fmt::Display) -> String {
    format!("{}: {e}", path.display())
}

fn infer_format(path: &Path, explicit: Option<CloudFileFormat>) -> CloudFileFormat {
    explicit.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("ply") => CloudFileFormat::PlyBinaryLittleEndian,
        _ => CloudFileFormat::XyziText,
    })
}

fn scanner_position(flag: &Option<Vec<f64>>) -> [f64; 3] {
    match flag.as_deref() {
        Some([x, y, z]) => [*x, *y, *z],
        _ => [0.0; 3],
    }
}

fn pipeline_params(flags: &ParamArgs) -> Result<PipelineParams, CliError> {
    let d = PipelineParams::default();
    let params = PipelineParams {
        n_seeds: flags.n_seeds.unwrap_or(d.n_seeds),
        sphere_radius: flags.radius.unwrap_or(d.sphere_radius),
        k_neighbors: flags.k.unwrap_or(d.k_neighbors),
        neighbor_ratio_threshold: flags.thr.unwrap_or(d.neighbor_ratio_threshold),
        voxel_divisions: flags.divisions.unwrap_or(d.voxel_divisions),
        voxel_ratio_threshold: flags.voxel_ratio.unwrap_or(d.voxel_ratio_threshold),
        sd1: flags.sd1.unwrap_or(d.sd1),
        sd2: flags.sd2.unwrap_or(d.sd2),
        height_fraction: flags.height_fraction.unwrap_or(d.height_fraction),
        rng_seed: flags.seed.unwrap_or(d.rng_seed),
    };
    validate_params(params).map_err(|e| CliError::Usage(e.to_string()))
}

struct Job {
    input: PathBuf,
    labels: PathBuf,
}

impl Job {
    fn sibling(&self, suffix: &str) -> PathBuf {
        let stem = self.labels.file_stem().unwrap_or_default().to_string_lossy();
        self.labels.with_file_name(format!("{stem}.{suffix}"))
    }
}

fn plan_jobs(args: &ClassifyArgs) -> Result<Vec<Job>, CliError> {
    if args.input.len() == 1 {
        return Ok(vec![Job {
            input: args.input[0].clone(),
            labels: args.output.clone(),
        }]);
    }
    if args.reference.is_some() {
        return Err(CliError::Usage("--reference needs exactly one --input".into()));
    }
    fs::create_dir_all(&args.output).map_err(|source| IoError::Io {
        path: args.output.clone(),
        source,
    })?;
    let mut seen = HashSet::new();
    args.input
        .iter()
        .map(|input| {
            let stem = input.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            if !seen.insert(stem.clone()) {
                return Err(CliError::Usage(format!("two inputs share the file stem `{stem}`")));
            }
            Ok(Job {
                input: input.clone(),
                labels: args.output.join(format!("{stem}.labels")),
            })
        })
        .collect()
}

fn classify_one(job: &Job, args: &ClassifyArgs, params: &PipelineParams) -> Result<String, CliError> {
    let format = infer_format(&job.input, args.format);
    let cloud = read_cloud(&job.input, format, scanner_position(&args.scanner_pos))?;
    let angular_step = match args.angular_step {
        Some(step) => step,
        None => {
            let est = estimate_angular_step(&cloud, params)
                .map_err(|e| CliError::Pipeline(with_path(&job.input, format!("angular step estimate: {e}"))))?;
            if !est.from_dense_spheres {
                log::warn!("{}: no dense sampling spheres; angular step estimated from all usable ones", job.input.display());
            }
            est.angular_step
        }
    };
    let scan = ScanConfig::new(cloud.origin(), angular_step).map_err(|e| CliError::Usage(e.to_string()))?;

    let start = Instant::now();
    let (labels, trace) =
        classify(&cloud, &scan, params).map_err(|e| CliError::Pipeline(with_path(&job.input, e)))?;
    let elapsed = start.elapsed().as_secs_f64();

    write_labels(&labels, &job.labels)?;
    if args.colored_ply {
        let colored = cloud.relabel(labels.clone()).map_err(|e| CliError::Pipeline(e.to_string()))?;
        write_cloud_colored(&colored, &job.sibling("colored.ply"), CloudFileFormat::PlyBinaryLittleEndian)?;
    }

    let timing = throughput_report(trace.times.total().as_secs_f64().max(f64::MIN_POSITIVE), cloud.len())
        .map_err(|e| CliError::Pipeline(e.to_string()))?;
    let mut report = format!("input {}\npoints {}\n{}", job.input.display(), cloud.len(), trace.to_table());
    report.push_str(&format!(
        "wall time ms {:.1}, ms per million points {:.1}\n",
        elapsed * 1e3,
        timing.ms_per_million
    ));

    if let Some(reference) = &args.reference {
        let truth = read_labels(reference)?;
        let counts = confusion(&labels, &truth).map_err(|e| CliError::Input(e.to_string()))?;
        let accuracy = AccuracyReport::from_counts(counts)
            .map_err(|e| CliError::Input(e.to_string()))?
            .with_timing(timing);
        let report_path = job.sibling("report.txt");
        fs::write(&report_path, accuracy.to_key_values()).map_err(|source| IoError::Io {
            path: report_path,
            source,
        })?;
        report.push_str(&accuracy.to_table());
    }

    let trace_path = job.sibling("trace.txt");
    fs::write(&trace_path, &report).map_err(|source| IoError::Io {
        path: trace_path,
        source,
    })?;
    Ok(report)
}

pub fn run_classify(args: &ClassifyArgs) -> Result<(), CliError> {
    let params = pipeline_params(&args.params)?;
    if let Some(step) = args.angular_step {
        ScanConfig::new([0.0; 3], step).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let jobs = plan_jobs(args)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs)
        .build()
        .map_err(|e| CliError::Usage(format!("--jobs: {e}")))?;
    let results: Vec<Result<String, CliError>> =
        pool.install(|| jobs.par_iter().map(|job| classify_one(job, args, &params)).collect());

    let mut first_error = None;
    for result in results {
        match result {
            Ok(report) => print!("{report}"),
            Err(e) => {
                if first_error.is_some() {
                    eprintln!("error: {e}");
                } else {
                    first_error = Some(e);
                }
            }
        }
    }
    first_error.map_or(Ok(()), Err)
}

pub fn run_evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let predicted = read_labels(&args.labels)?;
    let reference = read_labels(&args.reference)?;
    let counts = confusion(&predicted, &reference).map_err(|e| CliError::Input(e.to_string()))?;
    let mut report = AccuracyReport::from_counts(counts).map_err(|e| CliError::Input(e.to_string()))?;
    if let Some(ms) = args.elapsed_ms {
        let timing =
            throughput_report(ms / 1e3, predicted.len()).map_err(|e| CliError::Usage(format!("--elapsed-ms: {e}")))?;
        report = report.with_timing(timing);
    }
    print!("{}", report.to_table());
    if let Some(path) = &args.output {
        fs::write(path, report.to_key_values()).map_err(|source| IoError::Io {
            path: path.clone(),
            source,
        })?;
    }
    Ok(())
}

pub fn run_synth(args: &SynthArgs) -> Result<(), CliError> {
    let mut spec = SyntheticTreeSpec::default();
    if let Some(step) = args.angular_step {
        spec.angular_step = step;
    }
    if let Some(seed) = args.seed {
        spec.rng_seed = seed;
    }
    spec.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let generated = generate_tree(&spec).map_err(|e| CliError::Usage(e.to_string()))?;

    let origin = scanner_position(&args.scanner_pos);
    let shifted: Vec<Point> = generated
        .points()
        .iter()
        .map(|p| Point::new(p.x + origin[0], p.y + origin[1], p.z + origin[2], p.intensity))
        .collect();
    let cloud = LabeledCloud::from_world(shifted, origin)
        .and_then(|c| c.relabel(generated.labels().to_vec()))
        .map_err(|e| CliError::Usage(e.to_string()))?;

    let format = infer_format(&args.output, args.format);
    write_cloud(&cloud, &args.output, format)?;
    let labels_path = args.labels.clone().unwrap_or_else(|| args.output.with_extension("labels"));
    write_labels(cloud.labels(), &labels_path)?;
    log::info!(
        "wrote {} points to {} and labels to {}",
        cloud.len(),
        args.output.display(),
        labels_path.display()
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn format_follows_extension_unless_given() {
        assert_eq!(infer_format(Path::new("a.PLY"), None), CloudFileFormat::PlyBinaryLittleEndian);
        assert_eq!(infer_format(Path::new("a.txt"), None), CloudFileFormat::XyziText);
        assert_eq!(infer_format(Path::new("a"), None), CloudFileFormat::XyziText);
        assert_eq!(infer_format(Path::new("a.ply"), Some(CloudFileFormat::PlyAscii)), CloudFileFormat::PlyAscii);
    }

    #[test]
    fn unset_flags_keep_defaults_and_set_ones_override() {
        assert_eq!(pipeline_params(&ParamArgs::default()).unwrap(), PipelineParams::default());
        let flags = ParamArgs {
            k: Some(12),
            sd2: Some(2.5),
            ..ParamArgs::default()
        };
        let p = pipeline_params(&flags).unwrap();
        assert_eq!((p.k_neighbors, p.sd2), (12, 2.5));
        let bad = ParamArgs {
            radius: Some(-1.0),
            ..ParamArgs::default()
        };
        assert_eq!(pipeline_params(&bad).unwrap_err().exit_code(), 1);
    }

    #[test]
    fn report_files_sit_next_to_labels() {
        let job = Job {
            input: PathBuf::from("in/tree.xyz"),
            labels: PathBuf::from("out/tree.labels"),
        };
        assert_eq!(job.sibling("trace.txt"), PathBuf::from("out/tree.trace.txt"));
        assert_eq!(scanner_position(&Some(vec![1.0, 2.0, 3.0])), [1.0, 2.0, 3.0]);
        assert_eq!(scanner_position(&None), [0.0; 3]);
    }
}
