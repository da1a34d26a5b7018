use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourti2::{self, Table};
use crate::matrix::{Fingerprint, Matrix};
use crate::scalar::LatticeInt;

/// Where a move set came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Provenance {
    #[serde(rename = "lattice")]
    Lattice,
    /// Pivot construction on a simple-corruption matrix; a Markov basis.
    #[serde(rename = "theorem1")]
    SimpleCorruption,
    #[serde(rename = "imported")]
    Imported,
    #[serde(rename = "subbasis")]
    Subbasis,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Lattice => "lattice",
            Provenance::SimpleCorruption => "theorem1",
            Provenance::Imported => "imported",
            Provenance::Subbasis => "subbasis",
        })
    }
}

/// Ordered kernel elements of one configuration matrix.
///
/// Every move is checked on construction: `A·v = 0`, `v ≠ 0`, and no two
/// moves agree up to sign.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveSet<T> {
    moves: Vec<Vec<T>>,
    provenance: Provenance,
    fingerprint: Fingerprint,
    dim: usize,
}

impl<T: LatticeInt> MoveSet<T> {
    pub fn new(matrix: &Matrix<T>, moves: Vec<Vec<T>>, provenance: Provenance) -> Result<Self> {
        let mut seen: HashMap<Vec<T>, usize> = HashMap::with_capacity(moves.len());
        for (index, v) in moves.iter().enumerate() {
            if v.len() != matrix.cols() {
                return Err(Error::Dimension { expected: matrix.cols(), found: v.len() });
            }
            if v.iter().all(|x| x.is_zero()) {
                return Err(Error::ZeroMove { index });
            }
            if !matrix.annihilates(v)? {
                return Err(Error::NotInKernel { index });
            }
            if let Some(&other) = seen.get(&sign_normalized(v)) {
                return Err(Error::DuplicateMove { index, other });
            }
            seen.insert(sign_normalized(v), index);
        }
        Ok(MoveSet { moves, provenance, fingerprint: matrix.fingerprint(), dim: matrix.cols() })
    }

    /// Builds a move set, silently dropping zero vectors and sign duplicates.
    pub fn deduplicated(matrix: &Matrix<T>, moves: Vec<Vec<T>>, provenance: Provenance) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let kept = moves
            .into_iter()
            .filter(|v| !v.iter().all(|x| x.is_zero()))
            .filter(|v| seen.insert(sign_normalized(v)))
            .collect();
        MoveSet::new(matrix, kept, provenance)
    }

    pub fn moves(&self) -> &[Vec<T>] {
        &self.moves
    }

    pub fn get(&self, k: usize) -> &[T] {
        &self.moves[k]
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vec<T>> {
        self.moves.iter()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    /// Length of each move (columns of the configuration matrix).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Moves with first nonzero entry positive, as a sorted set.
    pub fn canonical_set(&self) -> BTreeSet<Vec<T>> {
        self.moves.iter().map(|v| sign_normalized(v)).collect()
    }

    /// True when both sets contain the same moves up to order and sign.
    pub fn same_moves(&self, other: &MoveSet<T>) -> bool {
        self.canonical_set() == other.canonical_set()
    }

    pub fn to_table(&self) -> Table<T> {
        Table { rows: self.moves.len(), cols: self.dim, data: self.moves.concat() }
    }

    pub fn to_4ti2(&self) -> String {
        fourti2::format(&self.to_table())
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }
}

/// Flips `v` so that its first nonzero entry is positive.
pub fn sign_normalized<T: LatticeInt>(v: &[T]) -> Vec<T> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.iter().map(|&e| T::zero() - e).collect(),
        _ => v.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Matrix<i64> {
        Matrix::from_i64_rows(&[&[1, 1, 0], &[0, 1, 1]]).unwrap()
    }

    #[test]
    fn validates_kernel_membership() {
        let err = MoveSet::new(&a(), vec![vec![1, -1, 1], vec![1, 0, 0]], Provenance::Imported).unwrap_err();
        assert!(matches!(err, Error::NotInKernel { index: 1 }));
    }

    #[test]
    fn rejects_zero_and_sign_duplicates() {
        assert!(matches!(
            MoveSet::new(&a(), vec![vec![0, 0, 0]], Provenance::Imported),
            Err(Error::ZeroMove { index: 0 })
        ));
        assert!(matches!(
            MoveSet::new(&a(), vec![vec![1, -1, 1], vec![-1, 1, -1]], Provenance::Imported),
            Err(Error::DuplicateMove { index: 1, other: 0 })
        ));
        let d = MoveSet::deduplicated(&a(), vec![vec![1, -1, 1], vec![0, 0, 0], vec![-1, 1, -1]], Provenance::Subbasis)
            .unwrap();
        assert_eq!(d.len(), 1);
    }

    #[test]
    fn canonical_comparison_ignores_sign_and_order() {
        let m = a();
        let x = MoveSet::new(&m, vec![vec![1, -1, 1], vec![2, -2, 2]], Provenance::Lattice).unwrap();
        let y = MoveSet::new(&m, vec![vec![-2, 2, -2], vec![-1, 1, -1]], Provenance::Imported).unwrap();
        assert!(x.same_moves(&y));
    }
}
