//! Exact integer linear algebra: rank, Hermite normal form, integer kernels
//! and lattice membership.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::moves::{MoveSet, Provenance};
use crate::scalar::{axpy, LatticeInt};

/// `U·M = H` with `U` unimodular and `H` in row-style Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteDecomposition<T> {
    pub h: Matrix<T>,
    pub u: Matrix<T>,
    /// Pivot column of each nonzero row of `h`, strictly increasing.
    pub pivots: Vec<usize>,
}

impl<T> HermiteDecomposition<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

fn abs_c<T: LatticeInt>(v: T) -> Result<T> {
    if v.is_negative() {
        v.neg_c()
    } else {
        Ok(v)
    }
}

/// Rank over the rationals by fraction-free (Bareiss) elimination.
pub fn rank<T: LatticeInt>(m: &Matrix<T>) -> Result<usize> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.to_rows();
    let mut prev = T::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(p, r);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let num = a[i][j].mul_c(a[r][c])?.sub_c(a[i][c].mul_c(a[r][j])?)?;
                a[i][j] = num.div_c(prev)?;
            }
            a[i][c] = T::zero();
        }
        prev = a[r][c];
        r += 1;
    }
    Ok(r)
}

/// Row-style Hermite normal form.
///
/// Columns are scanned left to right. Below each pivot the column is cleared
/// by repeated remainder steps against the smallest nonzero entry; the pivot
/// is made positive and the entries above it reduced into `[0, pivot)`. Zero
/// rows end up last.
pub fn hermite_normal_form<T: LatticeInt>(m: &Matrix<T>) -> Result<HermiteDecomposition<T>> {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.to_rows();
    let mut u = Matrix::<T>::identity(rows)?.to_rows();
    let mut pivots = Vec::new();
    let mut r = 0;

    for c in 0..cols {
        if r == rows {
            break;
        }
        loop {
            let mut best: Option<(T, usize)> = None;
            for i in r..rows {
                if !h[i][c].is_zero() {
                    let a = abs_c(h[i][c])?;
                    if best.is_none_or(|(b, _)| a < b) {
                        best = Some((a, i));
                    }
                }
            }
            let Some((_, p)) = best else { break };
            h.swap(p, r);
            u.swap(p, r);
            let mut cleared = true;
            for i in r + 1..rows {
                if h[i][c].is_zero() {
                    continue;
                }
                let q = h[i][c].div_c(h[r][c])?.neg_c()?;
                h[i] = axpy(&h[i], q, &h[r])?;
                u[i] = axpy(&u[i], q, &u[r])?;
                if !h[i][c].is_zero() {
                    cleared = false;
                }
            }
            if cleared {
                break;
            }
        }
        if h[r][c].is_zero() {
            continue;
        }
        if h[r][c].is_negative() {
            h[r] = h[r].iter().map(|v| v.neg_c()).collect::<Result<_>>()?;
            u[r] = u[r].iter().map(|v| v.neg_c()).collect::<Result<_>>()?;
        }
        for i in 0..r {
            let q = h[i][c].div_floor_c(h[r][c])?;
            if !q.is_zero() {
                let q = q.neg_c()?;
                h[i] = axpy(&h[i], q, &h[r])?;
                u[i] = axpy(&u[i], q, &u[r])?;
            }
        }
        pivots.push(c);
        r += 1;
    }

    Ok(HermiteDecomposition { h: Matrix::from_rows(&h)?, u: Matrix::from_rows(&u)?, pivots })
}

/// A basis of the integer kernel `{v ∈ Zᵈ : A·v = 0}`.
///
/// Computed from the Hermite form of `Aᵀ`: the rows of the unimodular
/// multiplier that pair with zero rows of `H` span the kernel. Those rows are
/// then put into their own Hermite normal form so the returned basis depends
/// only on the lattice, not on elimination details.
pub fn kernel_lattice_basis<T: LatticeInt>(a: &Matrix<T>) -> Result<MoveSet<T>> {
    let dec = hermite_normal_form(&a.transpose())?;
    let r = dec.rank();
    let raw: Vec<Vec<T>> = (r..a.cols()).map(|i| dec.u.row(i).to_vec()).collect();
    if raw.is_empty() {
        return MoveSet::new(a, Vec::new(), Provenance::Lattice);
    }
    let canon = hermite_normal_form(&Matrix::from_rows(&raw)?)?;
    let basis = (0..canon.rank()).map(|i| canon.h.row(i).to_vec()).collect();
    MoveSet::new(a, basis, Provenance::Lattice)
}

/// Integer coefficients `c` with `Σ cᵢ bᵢ = v`, or `None` when `v` is not in
/// the lattice spanned by `basis`.
pub fn lattice_member<T: LatticeInt>(basis: &MoveSet<T>, v: &[T]) -> Result<Option<Vec<T>>> {
    if v.len() != basis.dim() {
        return Err(Error::Dimension { expected: basis.dim(), found: v.len() });
    }
    if basis.is_empty() {
        return Ok(v.iter().all(|x| x.is_zero()).then(Vec::new));
    }
    let b = Matrix::from_rows(basis.moves())?;
    let dec = hermite_normal_form(&b)?;
    if dec.rank() < basis.len() {
        return Err(Error::DependentBasis);
    }

    let mut residual = v.to_vec();
    let mut y = Vec::with_capacity(dec.rank());
    for (i, &p) in dec.pivots.iter().enumerate() {
        let pivot = dec.h.get(i, p);
        if !(residual[p] % pivot).is_zero() {
            return Ok(None);
        }
        let yi = residual[p].div_c(pivot)?;
        residual = axpy(&residual, yi.neg_c()?, dec.h.row(i))?;
        y.push(yi);
    }
    if residual.iter().any(|x| !x.is_zero()) {
        return Ok(None);
    }

    let mut c = vec![T::zero(); basis.len()];
    for (i, &yi) in y.iter().enumerate() {
        c = axpy(&c, yi, dec.u.row(i))?;
    }
    Ok(Some(c))
}
