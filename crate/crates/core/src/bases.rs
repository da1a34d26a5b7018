//! Move-set constructors: the constructive Markov basis for simple-corruption
//! matrices, pivotal lattice bases, 4ti2 imports and fiber subbases.

use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fiber::Fiber;
use crate::fourti2;
use crate::lattice::{hermite_normal_form, rank};
use crate::matrix::Matrix;
use crate::moves::{MoveSet, Provenance};
use crate::scalar::{axpy, LatticeInt};

/// Outcome of testing the simple-corruption conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SimpleCorruptionCheck<T> {
    /// `sigma[i]` is the first column of `A` equal to the unit vector `e_i`.
    Holds { sigma: Vec<usize> },
    NonBinaryEntry { row: usize, column: usize, value: T },
    MissingUnitColumn { row: usize },
}

impl<T> SimpleCorruptionCheck<T> {
    pub fn holds(&self) -> bool {
        matches!(self, SimpleCorruptionCheck::Holds { .. })
    }

    pub fn sigma(&self) -> Option<&[usize]> {
        match self {
            SimpleCorruptionCheck::Holds { sigma } => Some(sigma),
            _ => None,
        }
    }
}

impl<T: fmt::Display> fmt::Display for SimpleCorruptionCheck<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimpleCorruptionCheck::Holds { sigma } => write!(f, "simple corruption, unit columns {sigma:?}"),
            SimpleCorruptionCheck::NonBinaryEntry { row, column, value } => {
                write!(f, "entry ({row}, {column}) is {value}, not 0 or 1")
            }
            SimpleCorruptionCheck::MissingUnitColumn { row } => write!(f, "no column equals unit vector e_{row}"),
        }
    }
}

fn is_unit_column<T: LatticeInt>(a: &Matrix<T>, j: usize, i: usize) -> bool {
    (0..a.rows()).all(|r| a.get(r, j) == if r == i { T::one() } else { T::zero() })
}

/// Checks that `A` has only 0/1 entries and contains every unit column.
pub fn check_simple_corruption<T: LatticeInt>(a: &Matrix<T>) -> SimpleCorruptionCheck<T> {
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let v = a.get(i, j);
            if !v.is_zero() && !v.is_one() {
                return SimpleCorruptionCheck::NonBinaryEntry { row: i, column: j, value: v };
            }
        }
    }
    let mut sigma = Vec::with_capacity(a.rows());
    for i in 0..a.rows() {
        match (0..a.cols()).find(|&j| is_unit_column(a, j, i)) {
            Some(j) => sigma.push(j),
            None => return SimpleCorruptionCheck::MissingUnitColumn { row: i },
        }
    }
    SimpleCorruptionCheck::Holds { sigma }
}

/// The constructive Markov basis of a simple-corruption matrix, with each
/// row pivoting on its first unit column.
pub fn theorem1_basis<T: LatticeInt>(a: &Matrix<T>) -> Result<MoveSet<T>> {
    match check_simple_corruption(a) {
        SimpleCorruptionCheck::Holds { sigma } => theorem1_basis_with(a, &sigma),
        other => Err(Error::NotSimpleCorruption(other.to_string())),
    }
}

/// As [`theorem1_basis`] with an explicit pivot column `sigma[i]` for each
/// row; every `sigma[i]` must be a copy of `e_i`.
///
/// One move per non-pivot column `k`, in column order:
/// `v_k = e_k − Σ_{i : A[i,k] = 1} e_{σ(i)}`.
pub fn theorem1_basis_with<T: LatticeInt>(a: &Matrix<T>, sigma: &[usize]) -> Result<MoveSet<T>> {
    let check = check_simple_corruption(a);
    if let SimpleCorruptionCheck::NonBinaryEntry { .. } = check {
        return Err(Error::NotSimpleCorruption(check.to_string()));
    }
    if sigma.len() != a.rows() {
        return Err(Error::Dimension { expected: a.rows(), found: sigma.len() });
    }
    for (i, &j) in sigma.iter().enumerate() {
        if j >= a.cols() || !is_unit_column(a, j, i) {
            return Err(Error::InvalidPivots(format!("column {j} is not the unit vector e_{i}")));
        }
    }
    let mut moves = Vec::with_capacity(a.cols() - a.rows());
    for k in (0..a.cols()).filter(|k| !sigma.contains(k)) {
        let mut v = vec![T::zero(); a.cols()];
        v[k] = T::one();
        for (i, &s) in sigma.iter().enumerate() {
            if a.get(i, k).is_one() {
                v[s] = v[s].sub_c(T::one())?;
            }
        }
        moves.push(v);
    }
    MoveSet::new(a, moves, Provenance::SimpleCorruption)
}

/// Pivot columns of the row echelon form of `A`, in increasing order.
pub fn echelon_pivots<T: LatticeInt>(a: &Matrix<T>) -> Result<Vec<usize>> {
    Ok(hermite_normal_form(a)?.pivots)
}

/// Kernel vectors obtained by solving `A·x = 0` for the pivot columns.
///
/// For each non-pivot column `k` (in column order) the move has free
/// coordinate `k` equal to 1, the other free coordinates 0, and pivot
/// coordinates from the exact solution of `A_P·z = −A_k`. The number of
/// pivots must equal `rank(A)`; redundant rows of `A` are dropped before
/// solving.
pub fn pivotal_lattice_basis<T: LatticeInt>(a: &Matrix<T>, pivots: &[usize]) -> Result<MoveSet<T>> {
    let mut seen = vec![false; a.cols()];
    for &p in pivots {
        if p >= a.cols() {
            return Err(Error::InvalidPivots(format!("column {p} out of range 0..{}", a.cols())));
        }
        if std::mem::replace(&mut seen[p], true) {
            return Err(Error::InvalidPivots(format!("column {p} listed twice")));
        }
    }
    let r = rank(a)?;
    if pivots.len() != r {
        return Err(Error::InvalidPivots(format!("{} pivots given but rank(A) = {r}", pivots.len())));
    }
    let free: Vec<usize> = (0..a.cols()).filter(|&j| !seen[j]).collect();
    if free.is_empty() {
        return MoveSet::new(a, Vec::new(), Provenance::Lattice);
    }
    if r == 0 {
        let moves = free
            .iter()
            .map(|&k| (0..a.cols()).map(|j| if j == k { T::one() } else { T::zero() }).collect())
            .collect();
        return MoveSet::new(a, moves, Provenance::Lattice);
    }

    // Independent rows restricted to the pivot columns.
    let ap = a.select_columns(pivots)?;
    let mut rows: Vec<usize> = Vec::with_capacity(r);
    for i in 0..a.rows() {
        let mut trial: Vec<Vec<T>> = rows.iter().map(|&k| ap.row(k).to_vec()).collect();
        trial.push(ap.row(i).to_vec());
        if rank(&Matrix::from_rows(&trial)?)? == trial.len() {
            rows.push(i);
            if rows.len() == r {
                break;
            }
        }
    }
    if rows.len() < r {
        return Err(Error::SingularPivots);
    }

    // Fraction-free Gauss–Jordan on [A_P | −A_F]; the left block ends as d·I.
    let m = r;
    let mut aug: Vec<Vec<T>> = Vec::with_capacity(m);
    for &i in &rows {
        let mut row: Vec<T> = pivots.iter().map(|&j| a.get(i, j)).collect();
        for &k in &free {
            row.push(a.get(i, k).neg_c()?);
        }
        aug.push(row);
    }
    let width = m + free.len();
    let mut prev = T::one();
    for k in 0..m {
        let p = (k..m).find(|&i| !aug[i][k].is_zero()).ok_or(Error::SingularPivots)?;
        aug.swap(p, k);
        for i in (0..m).filter(|&i| i != k) {
            for j in (0..width).filter(|&j| j != k) {
                let num = aug[k][k].mul_c(aug[i][j])?.sub_c(aug[i][k].mul_c(aug[k][j])?)?;
                debug_assert!((num % prev).is_zero());
                aug[i][j] = num.div_c(prev)?;
            }
            aug[i][k] = T::zero();
        }
        prev = aug[k][k];
    }
    let d = prev;

    let mut moves = Vec::with_capacity(free.len());
    for (t, &k) in free.iter().enumerate() {
        let mut v = vec![T::zero(); a.cols()];
        v[k] = T::one();
        for (i, &p) in pivots.iter().enumerate() {
            let num = aug[i][m + t];
            if !(num % d).is_zero() {
                return Err(Error::NonIntegralPivotSolution { column: k });
            }
            v[p] = num.div_c(d)?;
        }
        moves.push(v);
    }
    MoveSet::new(a, moves, Provenance::Lattice)
}

/// Parses a 4ti2 move file (moves as rows) and validates it against `A`.
pub fn parse_moveset<T: LatticeInt>(text: &str, a: &Matrix<T>) -> Result<MoveSet<T>> {
    let table = fourti2::parse::<T>(text)?;
    if table.rows > 0 && table.cols != a.cols() {
        return Err(Error::Dimension { expected: a.cols(), found: table.cols });
    }
    MoveSet::new(a, table.to_rows(), Provenance::Imported)
}

pub fn import_moveset<T: LatticeInt>(path: impl AsRef<Path>, a: &Matrix<T>) -> Result<MoveSet<T>> {
    parse_moveset(&std::fs::read_to_string(path)?, a)
}

pub fn export_moveset<T: LatticeInt>(moves: &MoveSet<T>, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, moves.to_4ti2())?;
    Ok(())
}

/// Above this size the spanning tree follows element order instead of the
/// O(n²) minimum tree.
const MST_LIMIT: usize = 5000;

fn l1_distance<T: LatticeInt>(x: &[T], y: &[T]) -> u128 {
    x.iter()
        .zip(y)
        .map(|(&a, &b)| (a.to_i128().unwrap_or(0) - b.to_i128().unwrap_or(0)).unsigned_abs())
        .sum()
}

/// A move set that connects this fiber: the edge differences of a spanning
/// tree over its elements, deduplicated up to sign.
///
/// Each difference `x′ − x` takes `x` to `x′` in one step, so any spanning
/// tree works; a minimum tree under the L1 distance keeps the moves small.
pub fn subbasis_from_fiber<T: LatticeInt>(fiber: &Fiber<T>) -> Result<MoveSet<T>> {
    let elems = fiber.elements();
    if elems.is_empty() {
        return Err(Error::EmptyFiber);
    }
    let n = elems.len();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(n.saturating_sub(1));
    if n <= MST_LIMIT {
        let mut in_tree = vec![false; n];
        let mut best = vec![(u128::MAX, 0usize); n];
        in_tree[0] = true;
        for j in 1..n {
            best[j] = (l1_distance(&elems[0], &elems[j]), 0);
        }
        for _ in 1..n {
            let next = (0..n).filter(|&j| !in_tree[j]).min_by_key(|&j| best[j].0).expect("vertices remain");
            in_tree[next] = true;
            edges.push((best[next].1, next));
            for j in 0..n {
                if !in_tree[j] {
                    let dist = l1_distance(&elems[next], &elems[j]);
                    if dist < best[j].0 {
                        best[j] = (dist, next);
                    }
                }
            }
        }
    } else {
        edges.extend((1..n).map(|j| (j - 1, j)));
    }
    let moves = edges
        .into_iter()
        .map(|(i, j)| axpy(&elems[j], T::zero() - T::one(), &elems[i]))
        .collect::<Result<Vec<_>>>()?;
    MoveSet::deduplicated(fiber.matrix(), moves, Provenance::Subbasis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fiber::{connectivity, enumerate_fiber, EnumerationOptions};
    use crate::lattice::{kernel_lattice_basis, lattice_member};
    use crate::models::{build_bandmisread, build_contingency, build_mta};
    use crate::IntMatrix;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_i64_rows(rows).unwrap()
    }

    fn eq5() -> MoveSet<i64> {
        let a = build_mta(2).unwrap().matrix;
        parse_moveset(include_str!("../data/mta2_markov.mar"), &a).unwrap()
    }

    #[test]
    fn mta2_is_simple_corruption() {
        let spec = build_mta(2).unwrap();
        let check = check_simple_corruption(&spec.matrix);
        let cols: Vec<usize> = ["01", "10", "11"].iter().map(|l| spec.column(l).unwrap()).collect();
        assert_eq!(check.sigma(), Some(cols.as_slice()));
    }

    #[test]
    fn check_reports_witnesses() {
        let band = build_bandmisread(3).unwrap().matrix;
        assert!(matches!(check_simple_corruption(&band), SimpleCorruptionCheck::NonBinaryEntry { value: -1, .. }));
        let missing = m(&[&[1, 1], &[0, 1]]);
        assert_eq!(check_simple_corruption(&missing), SimpleCorruptionCheck::MissingUnitColumn { row: 1 });
        let id = IntMatrix::identity(3).unwrap();
        assert_eq!(check_simple_corruption(&id).sigma(), Some(&[0, 1, 2][..]));
        assert!(theorem1_basis(&band).is_err());
    }

    #[test]
    fn theorem1_matches_eq5_row_for_row() {
        let a = build_mta(2).unwrap().matrix;
        let basis = theorem1_basis(&a).unwrap();
        assert_eq!(basis.moves(), eq5().moves());
        assert_eq!(basis.provenance(), Provenance::SimpleCorruption);
    }

    #[test]
    fn theorem1_small_cases() {
        let basis = theorem1_basis(&m(&[&[1, 0, 1], &[0, 1, 1]])).unwrap();
        assert_eq!(basis.moves(), &[vec![-1, -1, 1]]);
        assert!(theorem1_basis(&IntMatrix::identity(4).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn sigma_override_must_be_unit_columns() {
        let a = m(&[&[1, 0, 1, 1], &[0, 1, 1, 0]]);
        let default = theorem1_basis(&a).unwrap();
        let alt = theorem1_basis_with(&a, &[3, 1]).unwrap();
        assert!(!default.same_moves(&alt));
        assert_eq!(alt.len(), 2);
        assert!(matches!(theorem1_basis_with(&a, &[2, 1]), Err(Error::InvalidPivots(_))));
    }

    #[test]
    fn theorem1_is_a_lattice_basis() {
        for k in 1..=4 {
            let a = build_mta(k).unwrap().matrix;
            let t1 = theorem1_basis(&a).unwrap();
            assert_eq!(t1.len(), a.cols() - rank(&a).unwrap());
            for v in kernel_lattice_basis(&a).unwrap().moves() {
                assert!(lattice_member(&t1, v).unwrap().is_some());
            }
        }
    }

    #[test]
    fn pivotal_reproduces_eq5_and_differs_for_other_pivots() {
        let spec = build_mta(2).unwrap();
        let cols = |ls: &[&str]| ls.iter().map(|l| spec.column(l).unwrap()).collect::<Vec<_>>();
        let leading = pivotal_lattice_basis(&spec.matrix, &cols(&["01", "10", "11"])).unwrap();
        assert!(leading.same_moves(&eq5()));
        let other = pivotal_lattice_basis(&spec.matrix, &cols(&["22", "20", "11"])).unwrap();
        assert!(!other.same_moves(&eq5()));
        assert_eq!(other.len(), 6);
    }

    #[test]
    fn pivotal_contingency() {
        let a = build_contingency(3, 3).unwrap().matrix;
        let pivots = echelon_pivots(&a).unwrap();
        assert_eq!(pivots, vec![0, 1, 2, 3, 6]);
        let basis = pivotal_lattice_basis(&a, &pivots).unwrap();
        assert_eq!(basis.len(), 4);
        for v in basis.moves() {
            assert!(a.annihilates(v).unwrap());
        }
        assert!(matches!(pivotal_lattice_basis(&a, &[0, 1, 2, 3, 4]), Err(Error::SingularPivots)));
    }

    #[test]
    fn pivotal_errors() {
        let a = m(&[&[2, 1, 0]]);
        assert!(matches!(pivotal_lattice_basis(&a, &[0]), Err(Error::NonIntegralPivotSolution { column: 1 })));
        assert!(pivotal_lattice_basis(&a, &[1]).is_ok());
        assert!(matches!(pivotal_lattice_basis(&a, &[1, 1]), Err(Error::InvalidPivots(_))));
        assert!(matches!(pivotal_lattice_basis(&a, &[7]), Err(Error::InvalidPivots(_))));
        assert!(matches!(pivotal_lattice_basis(&a, &[0, 1]), Err(Error::InvalidPivots(_))));
    }

    #[test]
    fn import_and_export() {
        let a = build_contingency(3, 3).unwrap().matrix;
        let text = include_str!("../data/contingency3x3_markov.mar");
        let ms = parse_moveset(text, &a).unwrap();
        assert_eq!(ms.len(), 9);
        assert_eq!(ms.provenance(), Provenance::Imported);
        assert_eq!(ms.to_4ti2(), text);

        let bad = "2 9\n1 -1 0 -1 1 0 0 0 0\n1 0 0 0 0 0 0 0 0\n";
        assert!(matches!(parse_moveset(bad, &a), Err(Error::NotInKernel { index: 1 })));
        assert!(parse_moveset("1 9\n1 2\n", &a).is_err());

        let band = build_bandmisread(3).unwrap().matrix;
        assert_eq!(parse_moveset(include_str!("../data/bandmisread3_markov.mar"), &band).unwrap().len(), 63);
    }

    #[test]
    fn subbasis_connects_its_fiber() {
        let a = build_contingency(3, 3).unwrap().matrix;
        let fiber = enumerate_fiber(&a, &[5, 3, 2, 0, 4], EnumerationOptions::default()).unwrap();
        let sub = subbasis_from_fiber(&fiber).unwrap();
        assert_eq!(sub.provenance(), Provenance::Subbasis);
        assert!(sub.len() < fiber.len());
        assert_eq!(connectivity(&fiber, &sub).unwrap().component_count, 1);

        let single = enumerate_fiber(&a, &[0; 5], EnumerationOptions::default()).unwrap();
        assert!(subbasis_from_fiber(&single).unwrap().is_empty());
        let empty = enumerate_fiber(&a, &[1, 0, 0, 0, 2], EnumerationOptions::default()).unwrap();
        assert!(matches!(subbasis_from_fiber(&empty), Err(Error::EmptyFiber)));
    }
}
