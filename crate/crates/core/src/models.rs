//! Configuration matrices and labels for the supported model families.
//!
//! Column orders are fixed so that hand-written fixture vectors line up
//! index by index:
//!
//! * contingency tables: cells vectorized column-major (`x11, x21, …, x12, …`);
//! * `mta(K)`: all `3^K` event histories in ascending base-3 order;
//! * `suffstats(K)`: the `2^K − 1` nonzero capture histories in ascending
//!   binary order, occasion 1 most significant;
//! * `bandmisread(K)`: histories over `{0,1,2,3}` whose first nonzero digit is
//!   1, in ascending base-4 order.
//!
//! Observable capture histories (rows) are always in ascending binary order.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::IntMatrix;

pub const MAX_MTA_OCCASIONS: usize = 8;
pub const MAX_SUFFSTATS_OCCASIONS: usize = 16;
pub const MAX_BANDMISREAD_OCCASIONS: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Alphabet {
    /// 0 = not caught, 1 = caught.
    Binary,
    /// 0 = not caught, 1 = caught and identified, 2 = caught and misidentified.
    Ternary,
    /// Ternary plus 3 = another individual recorded as this one.
    Quaternary,
}

impl Alphabet {
    pub fn base(self) -> u8 {
        match self {
            Alphabet::Binary => 2,
            Alphabet::Ternary => 3,
            Alphabet::Quaternary => 4,
        }
    }
}

/// Per-occasion event codes of one (true or observed) history.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HistoryCode {
    alphabet: Alphabet,
    digits: Vec<u8>,
}

impl HistoryCode {
    pub fn new(alphabet: Alphabet, digits: Vec<u8>) -> Result<Self> {
        if digits.is_empty() {
            return Err(Error::InvalidModel("history must cover at least one occasion".into()));
        }
        if let Some(d) = digits.iter().find(|&&d| d >= alphabet.base()) {
            return Err(Error::InvalidModel(format!("digit {d} invalid for {alphabet:?} alphabet")));
        }
        Ok(HistoryCode { alphabet, digits })
    }

    /// A band-misreading history: the first nonzero event must be a correct
    /// identification (marking cannot be misread).
    pub fn band(digits: Vec<u8>) -> Result<Self> {
        let code = HistoryCode::new(Alphabet::Quaternary, digits)?;
        match code.digits.iter().find(|&&d| d != 0) {
            Some(1) => Ok(code),
            _ => Err(Error::InvalidModel(format!(
                "band history {} must have 1 as its first nonzero event",
                code.label()
            ))),
        }
    }

    /// The `index`-th history of length `occasions` in ascending base order.
    pub fn from_index(alphabet: Alphabet, occasions: usize, mut index: usize) -> Self {
        let base = alphabet.base() as usize;
        let mut digits = vec![0u8; occasions];
        for d in digits.iter_mut().rev() {
            *d = (index % base) as u8;
            index /= base;
        }
        HistoryCode { alphabet, digits }
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn digits(&self) -> &[u8] {
        &self.digits
    }

    pub fn occasions(&self) -> usize {
        self.digits.len()
    }

    pub fn count(&self, event: u8) -> usize {
        self.digits.iter().filter(|&&d| d == event).count()
    }

    pub fn label(&self) -> String {
        self.digits.iter().map(|d| char::from(b'0' + d)).collect()
    }
}

impl fmt::Display for HistoryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum Family {
    Contingency { r: usize, c: usize },
    Mta {
        #[serde(rename = "K")]
        k: usize,
    },
    SuffStats {
        #[serde(rename = "K")]
        k: usize,
    },
    BandMisread {
        #[serde(rename = "K")]
        k: usize,
    },
    /// A matrix read from disk without a known generator.
    Custom,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Contingency { .. } => "contingency",
            Family::Mta { .. } => "mta",
            Family::SuffStats { .. } => "suffstats",
            Family::BandMisread { .. } => "bandmisread",
            Family::Custom => "custom",
        }
    }
}

/// Configuration matrix with labelled rows (observed statistics) and
/// columns (true histories / cells).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelSpec {
    pub family: Family,
    pub matrix: IntMatrix,
    pub x_labels: Vec<String>,
    pub y_labels: Vec<String>,
    /// Column histories; empty for contingency tables and custom matrices.
    pub histories: Vec<HistoryCode>,
}

#[derive(Serialize, Deserialize)]
struct Sidecar {
    #[serde(flatten)]
    family: Family,
    #[serde(rename = "xLabels")]
    x_labels: Vec<String>,
    #[serde(rename = "yLabels")]
    y_labels: Vec<String>,
}

impl ModelSpec {
    pub fn column(&self, label: &str) -> Option<usize> {
        self.x_labels.iter().position(|l| l == label)
    }

    pub fn row(&self, label: &str) -> Option<usize> {
        self.y_labels.iter().position(|l| l == label)
    }

    /// Label sidecar: `{"family":…, "K":…, "xLabels":[…], "yLabels":[…]}`.
    pub fn sidecar_json(&self) -> String {
        let s = Sidecar { family: self.family, x_labels: self.x_labels.clone(), y_labels: self.y_labels.clone() };
        serde_json::to_string_pretty(&s).expect("sidecar serializes")
    }

    /// Writes `<prefix>.mat` and `<prefix>.json`.
    pub fn write(&self, prefix: impl AsRef<Path>) -> Result<()> {
        let prefix = prefix.as_ref();
        std::fs::write(prefix.with_extension("mat"), self.matrix.to_4ti2())?;
        std::fs::write(prefix.with_extension("json"), self.sidecar_json() + "\n")?;
        Ok(())
    }

    /// Reads a matrix and its sidecar. Known families are rebuilt and compared
    /// against the file so that histories are available downstream.
    pub fn read(matrix_path: impl AsRef<Path>, sidecar_path: impl AsRef<Path>) -> Result<Self> {
        let matrix = IntMatrix::from_4ti2(&std::fs::read_to_string(matrix_path)?)?;
        let side: Sidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path)?)?;
        ModelSpec::from_parts(matrix, side.family, side.x_labels, side.y_labels)
    }

    pub fn from_parts(matrix: IntMatrix, family: Family, x_labels: Vec<String>, y_labels: Vec<String>) -> Result<Self> {
        if x_labels.len() != matrix.cols() {
            return Err(Error::Dimension { expected: matrix.cols(), found: x_labels.len() });
        }
        if y_labels.len() != matrix.rows() {
            return Err(Error::Dimension { expected: matrix.rows(), found: y_labels.len() });
        }
        if family == Family::Custom {
            return Ok(ModelSpec { family, matrix, x_labels, y_labels, histories: Vec::new() });
        }
        let built = build(family)?;
        if built.matrix != matrix {
            return Err(Error::InvalidModel(format!("matrix does not match a {} model", family.name())));
        }
        Ok(ModelSpec { x_labels, y_labels, ..built })
    }

    /// Wraps an arbitrary matrix with positional labels.
    pub fn custom(matrix: IntMatrix) -> Self {
        let x_labels = (1..=matrix.cols()).map(|j| format!("x{j}")).collect();
        let y_labels = (1..=matrix.rows()).map(|i| format!("y{i}")).collect();
        ModelSpec { family: Family::Custom, matrix, x_labels, y_labels, histories: Vec::new() }
    }
}

pub fn build(family: Family) -> Result<ModelSpec> {
    match family {
        Family::Contingency { r, c } => build_contingency(r, c),
        Family::Mta { k } => build_mta(k),
        Family::SuffStats { k } => build_suffstats(k),
        Family::BandMisread { k } => build_bandmisread(k),
        Family::Custom => Err(Error::InvalidModel("custom matrices have no generator".into())),
    }
}

fn binary_histories(k: usize) -> Vec<HistoryCode> {
    (1..1usize << k).map(|i| HistoryCode::from_index(Alphabet::Binary, k, i)).collect()
}

fn to_matrix(rows: Vec<Vec<i64>>) -> Result<IntMatrix> {
    Matrix::from_rows(&rows)
}

/// `r × c` table with the `c` column sums and the first `r − 1` row sums.
pub fn build_contingency(r: usize, c: usize) -> Result<ModelSpec> {
    if r < 2 || c < 2 {
        return Err(Error::InvalidModel(format!("contingency table needs r, c >= 2 (got {r}x{c})")));
    }
    let cell = |i: usize, j: usize| j * r + i;
    let mut rows = Vec::with_capacity(c + r - 1);
    for j in 0..c {
        let mut row = vec![0i64; r * c];
        for i in 0..r {
            row[cell(i, j)] = 1;
        }
        rows.push(row);
    }
    for i in 0..r - 1 {
        let mut row = vec![0i64; r * c];
        for j in 0..c {
            row[cell(i, j)] = 1;
        }
        rows.push(row);
    }
    let mut x_labels = vec![String::new(); r * c];
    for j in 0..c {
        for i in 0..r {
            x_labels[cell(i, j)] = format!("{}{}", i + 1, j + 1);
        }
    }
    let y_labels = (1..=c).map(|j| format!("col{j}")).chain((1..r).map(|i| format!("row{i}"))).collect();
    Ok(ModelSpec {
        family: Family::Contingency { r, c },
        matrix: to_matrix(rows)?,
        x_labels,
        y_labels,
        histories: Vec::new(),
    })
}

/// Observed histories produced by one `mta` event history: the correctly
/// identified captures form one history (if any), and each misidentified
/// capture produces its own single-capture ghost.
pub fn mta_observed(history: &HistoryCode) -> Vec<HistoryCode> {
    let k = history.occasions();
    let mut out = Vec::new();
    if history.count(1) > 0 {
        let base = history.digits().iter().map(|&d| u8::from(d == 1)).collect();
        out.push(HistoryCode { alphabet: Alphabet::Binary, digits: base });
    }
    for (j, &d) in history.digits().iter().enumerate() {
        if d == 2 {
            let mut ghost = vec![0u8; k];
            ghost[j] = 1;
            out.push(HistoryCode { alphabet: Alphabet::Binary, digits: ghost });
        }
    }
    out
}

fn binary_index(h: &HistoryCode) -> usize {
    h.digits().iter().fold(0usize, |acc, &d| acc * 2 + d as usize)
}

pub fn build_mta(k: usize) -> Result<ModelSpec> {
    if k == 0 || k > MAX_MTA_OCCASIONS {
        return Err(Error::InvalidModel(format!("mta needs 1 <= K <= {MAX_MTA_OCCASIONS} (got {k})")));
    }
    let observed = binary_histories(k);
    let histories: Vec<HistoryCode> =
        (0..3usize.pow(k as u32)).map(|i| HistoryCode::from_index(Alphabet::Ternary, k, i)).collect();
    let mut rows = vec![vec![0i64; histories.len()]; observed.len()];
    for (col, h) in histories.iter().enumerate() {
        for o in mta_observed(h) {
            rows[binary_index(&o) - 1][col] = 1;
        }
    }
    Ok(ModelSpec {
        family: Family::Mta { k },
        matrix: to_matrix(rows)?,
        x_labels: histories.iter().map(HistoryCode::label).collect(),
        y_labels: observed.iter().map(HistoryCode::label).collect(),
        histories,
    })
}

/// Rows `f_1..f_K` (caught exactly j times), `n_1..n_K` (caught on occasion
/// j) and `M` (total marked animals available over all occasions).
pub fn build_suffstats(k: usize) -> Result<ModelSpec> {
    if !(2..=MAX_SUFFSTATS_OCCASIONS).contains(&k) {
        return Err(Error::InvalidModel(format!("suffstats needs 2 <= K <= {MAX_SUFFSTATS_OCCASIONS} (got {k})")));
    }
    let histories = binary_histories(k);
    let mut rows = Vec::with_capacity(2 * k + 1);
    for j in 1..=k {
        rows.push(histories.iter().map(|h| i64::from(h.count(1) == j)).collect());
    }
    for j in 0..k {
        rows.push(histories.iter().map(|h| i64::from(h.digits()[j])).collect());
    }
    rows.push(
        histories
            .iter()
            .map(|h| {
                let first = h.digits().iter().position(|&d| d == 1).expect("nonzero history") + 1;
                (k - first) as i64
            })
            .collect(),
    );
    let y_labels = (1..=k).map(|j| format!("f{j}")).chain((1..=k).map(|j| format!("n{j}"))).chain(["M".to_string()]);
    Ok(ModelSpec {
        family: Family::SuffStats { k },
        matrix: to_matrix(rows)?,
        x_labels: histories.iter().map(HistoryCode::label).collect(),
        y_labels: y_labels.collect(),
        histories,
    })
}

pub fn build_bandmisread(k: usize) -> Result<ModelSpec> {
    if !(2..=MAX_BANDMISREAD_OCCASIONS).contains(&k) {
        return Err(Error::InvalidModel(format!("bandmisread needs 2 <= K <= {MAX_BANDMISREAD_OCCASIONS} (got {k})")));
    }
    let histories: Vec<HistoryCode> = (0..4usize.pow(k as u32))
        .map(|i| HistoryCode::from_index(Alphabet::Quaternary, k, i))
        .filter(|h| h.digits().iter().find(|&&d| d != 0) == Some(&1))
        .collect();
    let observed = binary_histories(k);
    let mut rows = vec![vec![0i64; histories.len()]; observed.len()];
    for (col, h) in histories.iter().enumerate() {
        let seen: usize = h.digits().iter().fold(0, |acc, &d| acc * 2 + usize::from(d == 1 || d == 3));
        rows[seen - 1][col] = 1;
    }
    for j in 1..k {
        rows.push(
            histories
                .iter()
                .map(|h| i64::from(h.digits()[j] == 2) - i64::from(h.digits()[j] == 3))
                .collect(),
        );
    }
    let y_labels = observed.iter().map(HistoryCode::label).chain((2..=k).map(|j| format!("balance{j}")));
    Ok(ModelSpec {
        family: Family::BandMisread { k },
        matrix: to_matrix(rows)?,
        x_labels: histories.iter().map(HistoryCode::label).collect(),
        y_labels: y_labels.collect(),
        histories,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rank;

    #[test]
    fn contingency_three_by_three_matches_displayed_matrix() {
        let spec = build_contingency(3, 3).unwrap();
        let expected = IntMatrix::from_i64_rows(&[
            &[1, 1, 1, 0, 0, 0, 0, 0, 0],
            &[0, 0, 0, 1, 1, 1, 0, 0, 0],
            &[0, 0, 0, 0, 0, 0, 1, 1, 1],
            &[1, 0, 0, 1, 0, 0, 1, 0, 0],
            &[0, 1, 0, 0, 1, 0, 0, 1, 0],
        ])
        .unwrap();
        assert_eq!(spec.matrix, expected);
        assert_eq!(spec.x_labels[..4], ["11", "21", "31", "12"]);
        let x1 = [0, 2, 3, 0, 1, 2, 0, 1, 1];
        assert_eq!(spec.matrix.mul_vec(&x1).unwrap(), vec![5, 3, 2, 0, 4]);
    }

    #[test]
    fn contingency_two_by_two() {
        let spec = build_contingency(2, 2).unwrap();
        assert_eq!((spec.matrix.rows(), spec.matrix.cols()), (3, 4));
        assert_eq!(rank(&spec.matrix).unwrap(), 3);
        assert!(build_contingency(1, 3).is_err());
    }

    #[test]
    fn mta_columns() {
        let spec = build_mta(2).unwrap();
        assert_eq!(spec.y_labels, ["01", "10", "11"]);
        assert_eq!(spec.x_labels, ["00", "01", "02", "10", "11", "12", "20", "21", "22"]);
        let col = |l: &str| spec.matrix.column(spec.column(l).unwrap());
        assert_eq!(col("12"), vec![1, 1, 0]);
        assert_eq!(col("01"), vec![1, 0, 0]);
        assert_eq!(col("02"), vec![1, 0, 0]);
        assert_eq!(col("00"), vec![0, 0, 0]);
        assert_eq!(col("22"), vec![1, 1, 0]);
        let x1 = [0, 363, 0, 22, 174, 0, 0, 0, 0];
        assert_eq!(spec.matrix.mul_vec(&x1).unwrap(), vec![363, 22, 174]);
    }

    #[test]
    fn mta_ghosts_for_five_occasions() {
        let h = HistoryCode::new(Alphabet::Ternary, vec![0, 1, 2, 2, 1]).unwrap();
        let labels: Vec<String> = mta_observed(&h).iter().map(HistoryCode::label).collect();
        assert_eq!(labels, ["01001", "00100", "00010"]);
    }

    #[test]
    fn suffstats_column_for_both_captured() {
        let spec = build_suffstats(2).unwrap();
        assert_eq!(spec.y_labels, ["f1", "f2", "n1", "n2", "M"]);
        assert_eq!(spec.matrix.column(spec.column("11").unwrap()), vec![0, 1, 1, 1, 1]);
        assert_eq!(spec.matrix.column(spec.column("01").unwrap()), vec![1, 0, 0, 1, 0]);
    }

    #[test]
    fn suffstats_diabetes_fixtures() {
        let spec = build_suffstats(4).unwrap();
        assert_eq!(spec.x_labels.first().unwrap(), "0001");
        assert_eq!(spec.x_labels.last().unwrap(), "1111");
        let y = vec![6030, 1312, 161, 4, 629, 622, 6279, 1623, 8680];
        let x1 = [652, 4865, 794, 253, 18, 234, 62, 260, 26, 221, 67, 19, 0, 32, 4];
        let x2 = [684, 4901, 694, 253, 31, 154, 161, 192, 49, 365, 0, 19, 0, 0, 4];
        assert_eq!(spec.matrix.mul_vec(&x1).unwrap(), y);
        assert_eq!(spec.matrix.mul_vec(&x2).unwrap(), y);
    }

    #[test]
    fn bandmisread_three_occasions() {
        let spec = build_bandmisread(3).unwrap();
        assert_eq!((spec.matrix.rows(), spec.matrix.cols()), (9, 21));
        let col = |l: &str| spec.matrix.column(spec.column(l).unwrap());
        assert_eq!(col("122"), vec![0, 0, 0, 1, 0, 0, 0, 1, 1]);
        assert_eq!(col("111"), vec![0, 0, 0, 0, 0, 0, 1, 0, 0]);
        assert_eq!(col("013"), vec![0, 0, 1, 0, 0, 0, 0, 0, -1]);
    }

    #[test]
    fn band_history_validation() {
        assert!(HistoryCode::band(vec![0, 1, 3]).is_ok());
        assert!(HistoryCode::band(vec![0, 2, 1]).is_err());
        assert!(HistoryCode::band(vec![0, 0, 0]).is_err());
        assert!(HistoryCode::new(Alphabet::Ternary, vec![3]).is_err());
    }

    #[test]
    fn dimension_identities() {
        for k in 1..=6 {
            let s = build_mta(k).unwrap();
            assert_eq!(s.matrix.rows(), (1 << k) - 1);
            assert_eq!(s.matrix.cols(), 3usize.pow(k as u32));
            assert!(s.matrix.entries().iter().all(|&v| v == 0 || v == 1));
            // every unit column is present
            for i in 0..s.matrix.rows() {
                assert!((0..s.matrix.cols()).any(|j| {
                    let c = s.matrix.column(j);
                    c.iter().enumerate().all(|(r, &v)| v == i64::from(r == i))
                }));
            }
        }
        for k in 2..=6 {
            let s = build_suffstats(k).unwrap();
            assert_eq!((s.matrix.rows(), s.matrix.cols()), (2 * k + 1, (1 << k) - 1));
        }
        for k in 2..=4 {
            let s = build_bandmisread(k).unwrap();
            let obs = (1 << k) - 1;
            assert_eq!((s.matrix.rows(), s.matrix.cols()), ((1 << k) + k - 2, (4usize.pow(k as u32) - 1) / 3));
            for (j, h) in s.histories.iter().enumerate() {
                let col = s.matrix.column(j);
                assert_eq!(col[..obs].iter().sum::<i64>(), 1);
                let row = col.iter().position(|&v| v == 1).unwrap();
                assert_eq!(s.y_labels[row].matches('1').count(), h.count(1) + h.count(3));
                assert!(col[..obs].iter().all(|&v| v >= 0));
                assert!(col.iter().all(|&v| (-1..=1).contains(&v)));
            }
        }
        for c in 2..=4 {
            for r in 2..=4 {
                let s = build_contingency(r, c).unwrap();
                assert_eq!((s.matrix.rows(), s.matrix.cols()), (c + r - 1, r * c));
            }
        }
    }

    #[test]
    fn sidecar_round_trip() {
        let dir = std::env::temp_dir().join(format!("latmn-models-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let spec = build_mta(2).unwrap();
        let prefix = dir.join("mta2");
        spec.write(&prefix).unwrap();
        let json = std::fs::read_to_string(prefix.with_extension("json")).unwrap();
        assert!(json.contains("\"family\": \"mta\""));
        assert!(json.contains("\"K\": 2"));
        assert!(json.contains("\"xLabels\""));
        let back = ModelSpec::read(prefix.with_extension("mat"), prefix.with_extension("json")).unwrap();
        assert_eq!(back, spec);
        let ct = build_contingency(3, 2).unwrap();
        assert!(ct.sidecar_json().contains("\"r\": 3"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
