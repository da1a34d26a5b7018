use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use latmn::fourti2;
use latmn::models::ModelSpec;
use latmn::{IntMatrix, IntVector};

/// Environment variable naming the default output directory.
pub const OUT_DIR_VAR: &str = "LATMN_OUT_DIR";

pub fn default_out_dir() -> PathBuf {
    std::env::var_os(OUT_DIR_VAR).map_or_else(|| PathBuf::from("."), PathBuf::from)
}

/// Reads a 4ti2 matrix, together with its label sidecar (`<stem>.json`)
/// when one sits next to it.
pub fn load_model(path: &Path) -> Result<ModelSpec> {
    let sidecar = path.with_extension("json");
    if sidecar.is_file() {
        return ModelSpec::read(path, &sidecar)
            .with_context(|| format!("reading {} with sidecar {}", path.display(), sidecar.display()));
    }
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let matrix = IntMatrix::from_4ti2(&text).with_context(|| format!("parsing {}", path.display()))?;
    Ok(ModelSpec::custom(matrix))
}

/// A vector given inline as `a,b,c` or as a 4ti2 file.
pub fn load_vector(arg: &str) -> Result<IntVector> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        return fourti2::parse_vector(&text).with_context(|| format!("parsing {arg}"));
    }
    arg.split(',')
        .map(|t| t.trim().parse::<i64>().with_context(|| format!("`{arg}` is neither a file nor a comma-separated vector")))
        .collect()
}

/// Column references by index or, with a labelled model, by label.
pub fn resolve_columns(spec: &ModelSpec, refs: &[String]) -> Result<Vec<usize>> {
    refs.iter()
        .map(|r| {
            if let Ok(j) = r.parse::<usize>() {
                if spec.x_labels.get(j).is_some() && spec.column(r).is_none() {
                    return Ok(j);
                }
            }
            match spec.column(r) {
                Some(j) => Ok(j),
                None => bail!("unknown column `{r}`"),
            }
        })
        .collect()
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    std::fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use latmn::models::build_mta;

    #[test]
    fn labels_win_over_indices() {
        let spec = build_mta(2).unwrap();
        let refs: Vec<String> = ["01", "10", "11", "0", "8"].iter().map(|s| s.to_string()).collect();
        assert_eq!(resolve_columns(&spec, &refs).unwrap(), vec![1, 3, 4, 0, 8]);
        assert!(resolve_columns(&spec, &["9".to_string()]).is_err());
    }

    #[test]
    fn inline_vectors() {
        assert_eq!(load_vector("1, -2,3").unwrap(), vec![1, -2, 3]);
        assert!(load_vector("1,x").is_err());
    }
}
