//! Explicit fibers `{x ∈ ℕᵈ : A·x = y}` and connectivity audits under a
//! move set.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fourti2::Table;
use crate::matrix::{Fingerprint, Matrix};
use crate::models::{Family, ModelSpec};
use crate::moves::MoveSet;
use crate::scalar::{axpy, LatticeInt};

pub const DEFAULT_FIBER_CAP: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumerationOptions {
    /// Upper bound for columns that no nonnegative row constrains
    /// (e.g. the null history of `mta`).
    pub zero_column_bound: Option<u64>,
    /// Maximum number of elements before enumeration aborts.
    pub cap: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions { zero_column_bound: None, cap: DEFAULT_FIBER_CAP }
    }
}

impl EnumerationOptions {
    pub fn with_bound(bound: u64) -> Self {
        EnumerationOptions { zero_column_bound: Some(bound), ..Self::default() }
    }
}

/// An explicitly enumerated fiber. Elements are distinct, nonnegative and
/// satisfy `A·x = y`; their order is deterministic (lexicographic for
/// enumerated fibers).
#[derive(Clone, Debug)]
pub struct Fiber<T> {
    matrix: Matrix<T>,
    fingerprint: Fingerprint,
    y: Vec<T>,
    elements: Vec<Vec<T>>,
    index: HashMap<Vec<T>, usize>,
    zero_column_bound: Option<u64>,
}

impl<T: LatticeInt> Fiber<T> {
    /// Wraps a list of elements, checking every fiber invariant.
    pub fn from_elements(matrix: &Matrix<T>, y: &[T], elements: Vec<Vec<T>>) -> Result<Self> {
        if y.len() != matrix.rows() {
            return Err(Error::Dimension { expected: matrix.rows(), found: y.len() });
        }
        let mut index = HashMap::with_capacity(elements.len());
        for (i, x) in elements.iter().enumerate() {
            if x.iter().any(|v| v.is_negative()) || matrix.mul_vec(x)? != y {
                return Err(Error::NotInFiber);
            }
            if index.insert(x.clone(), i).is_some() {
                return Err(Error::InvalidModel(format!("fiber element {i} is repeated")));
            }
        }
        Ok(Fiber {
            matrix: matrix.clone(),
            fingerprint: matrix.fingerprint(),
            y: y.to_vec(),
            elements,
            index,
            zero_column_bound: None,
        })
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.matrix
    }

    pub fn fingerprint(&self) -> &Fingerprint {
        &self.fingerprint
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn elements(&self) -> &[Vec<T>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn zero_column_bound(&self) -> Option<u64> {
        self.zero_column_bound
    }

    pub fn position(&self, x: &[T]) -> Option<usize> {
        self.index.get(x).copied()
    }

    pub fn contains(&self, x: &[T]) -> bool {
        self.index.contains_key(x)
    }

    /// Elements as rows of a 4ti2 table.
    pub fn to_table(&self) -> Table<T> {
        Table { rows: self.elements.len(), cols: self.matrix.cols(), data: self.elements.concat() }
    }

    fn check_moves(&self, moves: &MoveSet<T>) -> Result<()> {
        if moves.fingerprint() != &self.fingerprint {
            return Err(Error::FingerprintMismatch {
                left: self.fingerprint.to_string(),
                right: moves.fingerprint().to_string(),
            });
        }
        Ok(())
    }

    /// Fiber indices reachable from element `i` by one signed move.
    fn neighbours<'a>(&'a self, i: usize, moves: &'a MoveSet<T>) -> impl Iterator<Item = (usize, usize, i8)> + 'a {
        let x = &self.elements[i];
        moves.iter().enumerate().flat_map(move |(k, v)| {
            [1i8, -1].into_iter().filter_map(move |s| {
                let scale = if s > 0 { T::one() } else { T::zero() - T::one() };
                let y = axpy(x, scale, v).ok()?;
                self.index.get(&y).map(|&j| (j, k, s))
            })
        })
    }
}

struct Enumerator<T> {
    cols: Vec<Vec<T>>,
    nonneg_rows: Vec<bool>,
    /// Upper limit for each column when no nonnegative row bounds it.
    fixed_bound: Vec<Option<T>>,
    /// Nonnegative rows whose last positive column is `j`; their residual
    /// must be zero once column `j` is assigned.
    closes_after: Vec<Vec<usize>>,
    cap: usize,
}

impl<T: LatticeInt> Enumerator<T> {
    fn run(&self, j: usize, residual: &mut [T], x: &mut Vec<T>, out: &mut Vec<Vec<T>>) -> Result<()> {
        if j == self.cols.len() {
            if residual.iter().all(|r| r.is_zero()) {
                if out.len() == self.cap {
                    return Err(Error::FiberTooLarge { cap: self.cap });
                }
                out.push(x.clone());
            }
            return Ok(());
        }
        let col = &self.cols[j];
        let upper = match self.fixed_bound[j] {
            Some(b) => b,
            None => {
                let mut m: Option<T> = None;
                for (i, &a) in col.iter().enumerate() {
                    if self.nonneg_rows[i] && a > T::zero() {
                        let q = residual[i].div_c(a)?;
                        m = Some(m.map_or(q, |m: T| m.min(q)));
                    }
                }
                m.expect("bounded column has a positive entry")
            }
        };
        let mut v = T::zero();
        while v <= upper {
            if !v.is_zero() {
                for (r, &a) in residual.iter_mut().zip(col) {
                    *r = r.sub_c(a)?;
                }
            }
            if self.closes_after[j].iter().all(|&i| residual[i].is_zero()) {
                x.push(v);
                self.run(j + 1, residual, x, out)?;
                x.pop();
            }
            v = v.add_c(T::one())?;
        }
        // undo the `upper` subtractions
        for (r, &a) in residual.iter_mut().zip(col) {
            *r = r.add_c(a.mul_c(upper)?)?;
        }
        Ok(())
    }
}

/// Enumerates the fiber by depth-first search over columns with residual
/// pruning.
///
/// Rows whose entries are all nonnegative bound each column by
/// `min_i ⌊residual_i / A_ij⌋`; rows with mixed signs are checked when an
/// assignment is complete. Columns that no nonnegative row constrains need
/// `options.zero_column_bound`.
pub fn enumerate_fiber<T: LatticeInt>(a: &Matrix<T>, y: &[T], options: EnumerationOptions) -> Result<Fiber<T>> {
    if y.len() != a.rows() {
        return Err(Error::Dimension { expected: a.rows(), found: y.len() });
    }
    let nonneg_rows: Vec<bool> = (0..a.rows()).map(|i| a.row(i).iter().all(|v| !v.is_negative())).collect();
    let cols: Vec<Vec<T>> = (0..a.cols()).map(|j| a.column(j)).collect();

    let mut fixed_bound = Vec::with_capacity(cols.len());
    for (j, col) in cols.iter().enumerate() {
        let bounded = col.iter().enumerate().any(|(i, &v)| nonneg_rows[i] && v > T::zero());
        if bounded {
            fixed_bound.push(None);
        } else {
            let b = options.zero_column_bound.ok_or(Error::MissingBound { column: j })?;
            fixed_bound.push(Some(T::from(b).ok_or(Error::Overflow)?));
        }
    }

    let mut closes_after = vec![Vec::new(); cols.len()];
    let mut out = Vec::new();
    let mut feasible = true;
    for i in (0..a.rows()).filter(|&i| nonneg_rows[i]) {
        if y[i].is_negative() {
            feasible = false;
        }
        match (0..cols.len()).rev().find(|&j| cols[j][i] > T::zero()) {
            Some(last) => closes_after[last].push(i),
            None if !y[i].is_zero() => feasible = false,
            None => {}
        }
    }

    if feasible {
        let e = Enumerator { cols, nonneg_rows, fixed_bound, closes_after, cap: options.cap };
        let mut residual = y.to_vec();
        e.run(0, &mut residual, &mut Vec::with_capacity(a.cols()), &mut out)?;
    }

    let mut fiber = Fiber::from_elements(a, y, out)?;
    fiber.zero_column_bound = options.zero_column_bound;
    Ok(fiber)
}

/// Components of the graph on fiber elements whose edges are single
/// applications of `±v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityReport {
    pub component_count: usize,
    /// Sorted descending.
    pub component_sizes: Vec<usize>,
    pub isolated: usize,
    /// Component id of each fiber element; ids are assigned in element order.
    pub component_of: Vec<usize>,
}

impl ConnectivityReport {
    pub fn is_connected(&self) -> bool {
        self.component_count <= 1
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Size of the component containing element `i`.
    pub fn size_of(&self, i: usize) -> usize {
        let c = self.component_of[i];
        self.component_of.iter().filter(|&&d| d == c).count()
    }
}

pub fn connectivity<T: LatticeInt>(fiber: &Fiber<T>, moves: &MoveSet<T>) -> Result<ConnectivityReport> {
    fiber.check_moves(moves)?;
    let n = fiber.len();
    let mut component_of = vec![usize::MAX; n];
    let mut sizes = Vec::new();
    let mut queue = VecDeque::new();
    for start in 0..n {
        if component_of[start] != usize::MAX {
            continue;
        }
        let id = sizes.len();
        component_of[start] = id;
        queue.push_back(start);
        let mut size = 0;
        while let Some(i) = queue.pop_front() {
            size += 1;
            for (j, _, _) in fiber.neighbours(i, moves) {
                if component_of[j] == usize::MAX {
                    component_of[j] = id;
                    queue.push_back(j);
                }
            }
        }
        sizes.push(size);
    }
    let isolated = sizes.iter().filter(|&&s| s == 1).count();
    let component_count = sizes.len();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok(ConnectivityReport { component_count, component_sizes: sizes, isolated, component_of })
}

/// One signed application of a move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub move_index: usize,
    /// `+1` or `−1`.
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessPath {
    Connected(Vec<Step>),
    Disconnected { from_component: usize, to_component: usize },
}

/// Shortest sequence of signed moves from `from` to `to` staying in the fiber.
pub fn witness_path<T: LatticeInt>(fiber: &Fiber<T>, moves: &MoveSet<T>, from: &[T], to: &[T]) -> Result<WitnessPath> {
    fiber.check_moves(moves)?;
    let start = fiber.position(from).ok_or(Error::NotInFiber)?;
    let goal = fiber.position(to).ok_or(Error::NotInFiber)?;
    let mut parent: Vec<Option<(usize, Step)>> = vec![None; fiber.len()];
    let mut seen = vec![false; fiber.len()];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(i) = queue.pop_front() {
        if i == goal {
            let mut steps = Vec::new();
            let mut cur = goal;
            while let Some((prev, step)) = parent[cur] {
                steps.push(step);
                cur = prev;
            }
            steps.reverse();
            return Ok(WitnessPath::Connected(steps));
        }
        for (j, k, s) in fiber.neighbours(i, moves) {
            if !seen[j] {
                seen[j] = true;
                parent[j] = Some((i, Step { move_index: k, sign: s }));
                queue.push_back(j);
            }
        }
    }
    let report = connectivity(fiber, moves)?;
    Ok(WitnessPath::Disconnected {
        from_component: report.component_of[start],
        to_component: report.component_of[goal],
    })
}

/// Columns of `A` that no all-nonnegative row bounds.
fn unbounded_columns<T: LatticeInt>(a: &Matrix<T>) -> Vec<bool> {
    let nonneg: Vec<bool> = (0..a.rows()).map(|i| a.row(i).iter().all(|v| !v.is_negative())).collect();
    (0..a.cols()).map(|j| !(0..a.rows()).any(|i| nonneg[i] && a.get(i, j) > T::zero())).collect()
}

/// As [`witness_path`] without materializing the fiber: breadth-first search
/// from `from` over the fiber of `A·from`, stopping at `to`. Columns that no
/// nonnegative row bounds are capped by `options.zero_column_bound`, as in
/// [`enumerate_fiber`]; at most `options.cap` states are visited. A
/// disconnected verdict labels the component of `from` 0 and that of `to` 1.
pub fn witness_path_implicit<T: LatticeInt>(
    moves: &MoveSet<T>,
    a: &Matrix<T>,
    from: &[T],
    to: &[T],
    options: EnumerationOptions,
) -> Result<WitnessPath> {
    if moves.fingerprint() != &a.fingerprint() {
        return Err(Error::FingerprintMismatch {
            left: a.fingerprint().to_string(),
            right: moves.fingerprint().to_string(),
        });
    }
    let unbounded = unbounded_columns(a);
    let bound = match options.zero_column_bound {
        Some(b) => Some(T::from(b).ok_or(Error::Overflow)?),
        None => None,
    };
    let admissible = |x: &[T]| -> Result<bool> {
        for (j, &v) in x.iter().enumerate() {
            if v.is_negative() {
                return Ok(false);
            }
            if unbounded[j] {
                match bound {
                    Some(b) if v > b => return Ok(false),
                    Some(_) => {}
                    None => return Err(Error::MissingBound { column: j }),
                }
            }
        }
        Ok(true)
    };
    if !admissible(from)? || !admissible(to)? || a.mul_vec(from)? != a.mul_vec(to)? {
        return Err(Error::NotInFiber);
    }

    let mut parent: HashMap<Vec<T>, Option<(Vec<T>, Step)>> = HashMap::from([(from.to_vec(), None)]);
    let mut queue = VecDeque::from([from.to_vec()]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut steps = Vec::new();
            let mut cur = x;
            while let Some(Some((prev, step))) = parent.get(&cur) {
                steps.push(*step);
                cur = prev.clone();
            }
            steps.reverse();
            return Ok(WitnessPath::Connected(steps));
        }
        for (k, v) in moves.iter().enumerate() {
            for s in [1i8, -1] {
                let scale = if s > 0 { T::one() } else { T::zero() - T::one() };
                let y = axpy(&x, scale, v)?;
                if parent.contains_key(&y) || !admissible(&y)? {
                    continue;
                }
                if parent.len() == options.cap {
                    return Err(Error::FiberTooLarge { cap: options.cap });
                }
                parent.insert(y.clone(), Some((x.clone(), Step { move_index: k, sign: s })));
                queue.push_back(y);
            }
        }
    }
    Ok(WitnessPath::Disconnected { from_component: 0, to_component: 1 })
}

/// Replays a path, returning every intermediate state (including both ends)
/// or `None` if some partial sum leaves the nonnegative orthant.
pub fn replay<T: LatticeInt>(from: &[T], moves: &MoveSet<T>, steps: &[Step]) -> Result<Option<Vec<Vec<T>>>> {
    let mut states = vec![from.to_vec()];
    for st in steps {
        let scale = if st.sign > 0 { T::one() } else { T::zero() - T::one() };
        let next = axpy(states.last().expect("nonempty"), scale, moves.get(st.move_index))?;
        if next.iter().any(|v| v.is_negative()) {
            return Ok(None);
        }
        states.push(next);
    }
    Ok(Some(states))
}

/// Indices of moves `v` for which both `x + v` and `x − v` have a negative entry.
pub fn stuck_moves<T: LatticeInt>(x: &[T], moves: &MoveSet<T>) -> Result<Vec<usize>> {
    if x.len() != moves.dim() {
        return Err(Error::Dimension { expected: moves.dim(), found: x.len() });
    }
    let mut out = Vec::new();
    for (k, v) in moves.iter().enumerate() {
        let mut up = false;
        let mut down = false;
        for (&a, &b) in x.iter().zip(v) {
            up |= a.add_c(b)?.is_negative();
            down |= a.sub_c(b)?.is_negative();
        }
        if up && down {
            out.push(k);
        }
    }
    Ok(out)
}

/// Number of misidentification events (`2` digits) carried by `x`.
pub fn error_count(spec: &ModelSpec, x: &[i64]) -> Result<u64> {
    match spec.family {
        Family::Mta { .. } | Family::BandMisread { .. } => {}
        f => return Err(Error::UnsupportedFamily(format!("error counts on a {} model", f.name()))),
    }
    if x.len() != spec.histories.len() {
        return Err(Error::Dimension { expected: spec.histories.len(), found: x.len() });
    }
    Ok(spec.histories.iter().zip(x).map(|(h, &c)| c.max(0) as u64 * h.count(2) as u64).sum())
}

/// Exact histogram of fiber elements by error count.
pub fn error_count_distribution(fiber: &Fiber<i64>, spec: &ModelSpec) -> Result<BTreeMap<u64, usize>> {
    if spec.matrix.fingerprint() != *fiber.fingerprint() {
        return Err(Error::FingerprintMismatch {
            left: fiber.fingerprint().to_string(),
            right: spec.matrix.fingerprint().to_string(),
        });
    }
    let mut hist = BTreeMap::new();
    for x in fiber.elements() {
        *hist.entry(error_count(spec, x)?).or_insert(0) += 1;
    }
    Ok(hist)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build_bandmisread, build_contingency, build_mta};
    use crate::moves::Provenance;
    use crate::IntMatrix;

    fn contingency_fiber() -> (IntMatrix, Fiber<i64>) {
        let spec = build_contingency(3, 3).unwrap();
        let fiber = enumerate_fiber(&spec.matrix, &[5, 3, 2, 0, 4], EnumerationOptions::default()).unwrap();
        (spec.matrix, fiber)
    }

    #[test]
    fn contingency_fiber_contains_both_tables() {
        let (_, fiber) = contingency_fiber();
        assert!(fiber.contains(&[0, 2, 3, 0, 1, 2, 0, 1, 1]));
        assert!(fiber.contains(&[0, 3, 2, 0, 0, 3, 0, 1, 1]));
        assert_eq!(fiber.len(), 11);
    }

    #[test]
    fn zero_target_gives_singleton() {
        let a = IntMatrix::from_i64_rows(&[&[1, 2, 0], &[0, 1, 1]]).unwrap();
        let f = enumerate_fiber(&a, &[0, 0], EnumerationOptions::default()).unwrap();
        assert_eq!(f.elements(), &[vec![0, 0, 0]]);
    }

    #[test]
    fn infeasible_target_gives_empty_fiber() {
        let a = IntMatrix::from_i64_rows(&[&[1, 1], &[1, 1]]).unwrap();
        assert!(enumerate_fiber(&a, &[1, 2], EnumerationOptions::default()).unwrap().is_empty());
        assert!(enumerate_fiber(&a, &[-1, -1], EnumerationOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn zero_column_needs_bound() {
        let spec = build_mta(2).unwrap();
        let err = enumerate_fiber(&spec.matrix, &[2, 1, 1], EnumerationOptions::default()).unwrap_err();
        assert!(matches!(err, Error::MissingBound { column: 0 }));
        let f = enumerate_fiber(&spec.matrix, &[2, 1, 1], EnumerationOptions::with_bound(3)).unwrap();
        assert!(f.elements().iter().all(|x| x[0] <= 3));
        assert!(f.contains(&[3, 2, 0, 1, 1, 0, 0, 0, 0]));
    }

    #[test]
    fn cap_is_enforced() {
        let spec = build_contingency(3, 3).unwrap();
        let opts = EnumerationOptions { cap: 5, ..Default::default() };
        assert!(matches!(enumerate_fiber(&spec.matrix, &[5, 3, 2, 0, 4], opts), Err(Error::FiberTooLarge { cap: 5 })));
    }

    #[test]
    fn band_misreading_fiber_has_120_elements() {
        let spec = build_bandmisread(3).unwrap();
        let f = enumerate_fiber(&spec.matrix, &[1, 1, 1, 1, 1, 1, 1, 0, 0], EnumerationOptions::default()).unwrap();
        assert_eq!(f.len(), 120);
        let hist = error_count_distribution(&f, &spec).unwrap();
        assert_eq!(hist.values().sum::<usize>(), 120);
        for e in 1..=5 {
            assert!(hist.contains_key(&e), "missing error count {e}: {hist:?}");
        }
    }

    #[test]
    fn stuck_moves_examples() {
        let a = IntMatrix::from_i64_rows(&[&[1, 1, 0, 0], &[0, 0, 1, 1]]).unwrap();
        let ms = MoveSet::new(&a, vec![vec![1, -1, 0, 0], vec![0, 0, 1, -1]], Provenance::Lattice).unwrap();
        assert_eq!(stuck_moves(&[1, 1, 1, 1], &ms).unwrap(), Vec::<usize>::new());
        assert_eq!(stuck_moves(&[0, 0, 1, 0], &ms).unwrap(), vec![0]);
    }

    #[test]
    fn fingerprint_mismatch_is_an_error() {
        let (_, fiber) = contingency_fiber();
        let other = IntMatrix::from_i64_rows(&[&[1, 1]]).unwrap();
        let ms = MoveSet::new(&other, vec![vec![1, -1]], Provenance::Lattice).unwrap();
        assert!(matches!(connectivity(&fiber, &ms), Err(Error::FingerprintMismatch { .. })));
    }

    #[test]
    fn error_counts_need_an_error_model() {
        let spec = build_contingency(3, 3).unwrap();
        let (_, fiber) = contingency_fiber();
        assert!(matches!(error_count_distribution(&fiber, &spec), Err(Error::UnsupportedFamily(_))));

        let mta = build_mta(2).unwrap();
        let f = Fiber::from_elements(&mta.matrix, &[0, 0, 0], vec![vec![0; 9]]).unwrap();
        assert_eq!(error_count_distribution(&f, &mta).unwrap(), BTreeMap::from([(0, 1)]));
    }

    #[test]
    fn trivial_witness_path() {
        let (a, fiber) = contingency_fiber();
        let ms = MoveSet::new(&a, vec![vec![1, -1, 0, -1, 1, 0, 0, 0, 0]], Provenance::Lattice).unwrap();
        let x = [0, 2, 3, 0, 1, 2, 0, 1, 1];
        assert_eq!(witness_path(&fiber, &ms, &x, &x).unwrap(), WitnessPath::Connected(vec![]));
        assert!(matches!(witness_path(&fiber, &ms, &[0; 9], &x), Err(Error::NotInFiber)));
    }

    #[test]
    fn implicit_search_agrees_with_enumerated_fiber() {
        let ex = crate::fixtures::contingency().unwrap();
        let fiber = enumerate_fiber(&ex.spec.matrix, &ex.y, EnumerationOptions::default()).unwrap();
        let (x1, x2) = (&ex.solutions[0], &ex.solutions[1]);
        let opts = EnumerationOptions::default();
        for ms in [&ex.markov, ex.lattice.as_ref().unwrap()] {
            let full = witness_path(&fiber, ms, x1, x2).unwrap();
            let implicit = witness_path_implicit(ms, &ex.spec.matrix, x1, x2, opts).unwrap();
            match (full, implicit) {
                (WitnessPath::Connected(a), WitnessPath::Connected(b)) => {
                    assert_eq!(a.len(), b.len());
                    let states = replay(x1, ms, &b).unwrap().unwrap();
                    assert_eq!(states.last().unwrap(), x2);
                }
                (WitnessPath::Disconnected { .. }, WitnessPath::Disconnected { from_component: 0, to_component: 1 }) => {}
                other => panic!("verdicts differ: {other:?}"),
            }
        }
        let mta = build_mta(2).unwrap();
        let ms = crate::bases::theorem1_basis(&mta.matrix).unwrap();
        let x = [0, 1, 0, 0, 0, 0, 0, 0, 0];
        assert!(matches!(
            witness_path_implicit(&ms, &mta.matrix, &x, &x, opts),
            Err(Error::MissingBound { column: 0 })
        ));
    }
}
