//! Run manifests for `latmn sample`.

use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use latmn::bases::{import_moveset, pivotal_lattice_basis, subbasis_from_fiber, theorem1_basis};
use latmn::fiber::{enumerate_fiber, EnumerationOptions};
use latmn::lattice::kernel_lattice_basis;
use latmn::mass::{LatentModel, MassModel};
use latmn::models::{build, Family, ModelSpec};
use latmn::sampler::{run_chains, ChainOutput, SamplerConfig};
use latmn::summary::summarize;
use latmn::{IntMoveSet, IntVector};
use serde::Deserialize;

use crate::io::{load_model, load_vector, resolve_columns, write_file};

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ModelSource {
    File { matrix: PathBuf },
    Family(Family),
}

#[derive(Debug, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase", deny_unknown_fields)]
pub enum BasisSource {
    Hnf,
    Theorem1,
    Pivotal { pivots: Vec<String> },
    Import { file: PathBuf },
    /// Spanning-tree moves of the explicitly enumerated fiber.
    Subbasis {
        #[serde(default)]
        bound: Option<u64>,
    },
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum VectorSource {
    Inline(IntVector),
    File(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainSpec {
    pub seed: u64,
    #[serde(default)]
    pub init: Option<VectorSource>,
}

/// Everything `sample` needs. Relative paths are resolved against the
/// manifest's directory.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunManifest {
    pub model: ModelSource,
    #[serde(default = "uniform")]
    pub mass: MassModel,
    pub basis: BasisSource,
    pub init: VectorSource,
    pub sampler: SamplerConfig,
    /// Extra chains; each overrides the seed and optionally the start.
    #[serde(default)]
    pub chains: Vec<ChainSpec>,
    /// Fields to write histogram CSVs for.
    #[serde(default)]
    pub histograms: Vec<String>,
    #[serde(default)]
    pub bin_width: Option<f64>,
    pub output: PathBuf,
}

fn uniform() -> MassModel {
    MassModel::Uniform
}

fn rebase(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn vector(base: &Path, v: &VectorSource) -> Result<IntVector> {
    match v {
        VectorSource::Inline(x) => Ok(x.clone()),
        VectorSource::File(f) => {
            let p = rebase(base, Path::new(f));
            load_vector(p.to_str().context("non-UTF-8 path")?)
        }
    }
}

pub fn load_basis(spec: &ModelSpec, source: &BasisSource, base: &Path, y: &[i64]) -> Result<IntMoveSet> {
    let a = &spec.matrix;
    Ok(match source {
        BasisSource::Hnf => kernel_lattice_basis(a)?,
        BasisSource::Theorem1 => theorem1_basis(a)?,
        BasisSource::Pivotal { pivots } => pivotal_lattice_basis(a, &resolve_columns(spec, pivots)?)?,
        BasisSource::Import { file } => {
            let p = rebase(base, file);
            import_moveset(&p, a).with_context(|| format!("importing {}", p.display()))?
        }
        BasisSource::Subbasis { bound } => {
            let opts = EnumerationOptions { zero_column_bound: *bound, ..EnumerationOptions::default() };
            subbasis_from_fiber(&enumerate_fiber(a, y, opts)?)?
        }
    })
}

pub struct SampleReport {
    pub files: Vec<PathBuf>,
    pub chains: Vec<(u64, usize, f64)>,
}

pub fn run(manifest_path: &Path) -> Result<SampleReport> {
    let text = std::fs::read_to_string(manifest_path).with_context(|| format!("reading {}", manifest_path.display()))?;
    let manifest: RunManifest =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", manifest_path.display()))?;
    let base = manifest_path.parent().unwrap_or(Path::new("."));

    let spec = match &manifest.model {
        ModelSource::File { matrix } => load_model(&rebase(base, matrix))?,
        ModelSource::Family(f) => build(*f)?,
    };
    let init = vector(base, &manifest.init)?;
    ensure!(init.len() == spec.matrix.cols(), "initial state has {} entries, A has {} columns", init.len(), spec.matrix.cols());
    let y = spec.matrix.mul_vec(&init)?;
    let moves = load_basis(&spec, &manifest.basis, base, &y)?;
    let model = LatentModel::new(spec, manifest.mass.clone())?;

    let mut runs = vec![(manifest.sampler.clone(), init.clone())];
    for c in &manifest.chains {
        let mut cfg = manifest.sampler.clone();
        cfg.seed = c.seed;
        let x0 = match &c.init {
            Some(v) => vector(base, v)?,
            None => init.clone(),
        };
        ensure!(model.spec.matrix.mul_vec(&x0)? == y, "chain with seed {} starts outside the fiber", c.seed);
        runs.push((cfg, x0));
    }
    let mut seeds: Vec<u64> = runs.iter().map(|(c, _)| c.seed).collect();
    seeds.sort_unstable();
    seeds.dedup();
    if seeds.len() != runs.len() {
        bail!("chain seeds must be distinct");
    }

    let out_dir = rebase(base, &manifest.output);
    std::fs::create_dir_all(&out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let outputs: Vec<ChainOutput> = run_chains(&model, &moves, &runs).into_iter().collect::<Result<_, _>>()?;

    let mut report = SampleReport { files: Vec::new(), chains: Vec::new() };
    for out in &outputs {
        let seed = out.metadata.seed;
        let prefix = out_dir.join(format!("chain-{seed}"));
        out.write(&prefix)?;
        report.files.push(prefix.with_extension("csv"));
        report.files.push(prefix.with_extension("json"));
        for field in &manifest.histograms {
            let s = summarize(out, field, manifest.bin_width)?;
            let path = out_dir.join(format!("chain-{seed}-{field}-hist.csv"));
            write_file(&path, &s.to_csv())?;
            report.files.push(path);
        }
        report.chains.push((seed, out.len(), out.acceptance_rate()));
    }
    Ok(report)
}
