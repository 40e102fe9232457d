//! Reduction from zero-one equations (`A x = 1` over binary `x`) to
//! `p`-splitting.
//!
//! For `0 < p ≤ 1/2` and `q = (1-p)/p`, the matrix `A` is embedded as the
//! upper-left block of
//!
//! ```text
//!     [ A  B  C ]
//! M = [ 0  D  E ]
//! ```
//!
//! whose `p`-splitters are exactly the extensions of solutions of `A x = 1`
//! by ones on the `T` columns and zeros on the `F` columns (or, at
//! `p = 1/2`, complements of such extensions).

use itertools::Itertools;

use crate::collection::{IncidenceMatrix, TargetSpec};
use crate::error::{Error, Result};
use crate::rational::{Proportion, Rational};

/// Widest instance [`solve_zoe`] will enumerate.
pub const MAX_ZOE_COLUMNS: usize = 24;

/// A binary matrix with no zero rows and some row of weight at least 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZoeInstance {
    a: IncidenceMatrix,
}

impl ZoeInstance {
    pub fn new(a: IncidenceMatrix) -> Result<Self> {
        let sums = a.row_sums();
        if let Some(i) = sums.iter().position(|&s| s == 0) {
            return Err(Error::Precondition(format!("row {} of A is zero", i + 1)));
        }
        if !sums.iter().any(|&s| s >= 2) {
            return Err(Error::Precondition("no row of A has two or more ones".into()));
        }
        Ok(ZoeInstance { a })
    }

    pub fn matrix(&self) -> &IncidenceMatrix {
        &self.a
    }

    pub fn rows(&self) -> usize {
        self.a.rows()
    }

    pub fn cols(&self) -> usize {
        self.a.cols()
    }

    pub fn is_solution(&self, x: &[bool]) -> bool {
        x.len() == self.cols() && self.a.mul_vec(x).iter().all(|&v| v == 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionOutput {
    pub m: IncidenceMatrix,
    /// Column indices of the `T` block (`s - 1` columns after `A`).
    pub t_cols: Vec<usize>,
    /// Column indices of the `F` block.
    pub f_cols: Vec<usize>,
    /// `nint(p M_i 1)` for every row.
    pub rhs: Vec<u64>,
    pub p: Proportion,
    pub q: Rational,
    /// Largest row weight of `A`.
    pub s: u64,
}

impl ReductionOutput {
    pub fn targets(&self) -> TargetSpec {
        TargetSpec::points(&self.rhs)
    }

    pub fn satisfies(&self, y: &[bool]) -> bool {
        y.len() == self.m.cols() && self.m.mul_vec(y) == self.rhs
    }
}

/// `max(⌈qs⌉ - s + 1, ⌈q⌉ + 1)`.
fn f_width(q: Rational, s: u64) -> u64 {
    let qs = q.mul_int(s).ceil() as u64;
    (qs + 1 - s).max(q.ceil() as u64 + 1)
}

/// Builds `M` and its right-hand sides.
pub fn reduce(z: &ZoeInstance, p: Proportion) -> Result<ReductionOutput> {
    if p.value() <= Rational::ZERO || !p.is_at_most_half() {
        return Err(Error::Precondition(format!("p = {p} must lie in (0, 1/2]")));
    }
    let q = (Rational::ONE - p.value()) / p.value();
    let ceil_q = q.ceil() as usize;
    let sums = z.a.row_sums();
    let s = *sums.iter().max().expect("instance has rows");
    let (ar, ac) = (z.rows(), z.cols());
    let t_len = (s - 1) as usize;
    let f_len = f_width(q, s) as usize;
    let subsets: Vec<Vec<usize>> = (0..f_len).combinations(ceil_q).collect();

    let rows = ar + t_len * subsets.len();
    let cols = ac + t_len + f_len;
    let t_cols: Vec<usize> = (ac..ac + t_len).collect();
    let f_cols: Vec<usize> = (ac + t_len..cols).collect();
    let mut m = IncidenceMatrix::zeros(rows, cols);

    for (i, &w) in sums.iter().enumerate() {
        for j in 0..ac {
            m.set(i, j, z.a.get(i, j));
        }
        for &j in &t_cols[..(w - 1) as usize] {
            m.set(i, j, true);
        }
        let c_ones = (q.mul_int(w).ceil() as u64 + 1 - w) as usize;
        for &j in &f_cols[..c_ones] {
            m.set(i, j, true);
        }
    }
    // one copy of E0 per T column, each row paired with that column of D
    for (k, (t, subset)) in (0..t_len).cartesian_product(&subsets).enumerate() {
        let row = ar + k;
        m.set(row, t_cols[t], true);
        for &f in subset {
            m.set(row, f_cols[f], true);
        }
    }

    let rhs: Vec<u64> = m
        .row_sums()
        .iter()
        .map(|&w| {
            let r = p.value().mul_int(w).nint();
            assert!(!r.is_tie(), "row weight {w} rounds ambiguously at p = {p}");
            r.lo() as u64
        })
        .collect();
    for (i, &r) in rhs.iter().enumerate() {
        let expected = if i < ar { sums[i] } else { 1 };
        assert_eq!(r, expected, "right-hand side of row {} at p = {p}", i + 1);
    }

    Ok(ReductionOutput {
        m,
        t_cols,
        f_cols,
        rhs,
        p,
        q,
        s,
    })
}

/// Appends ones on `T` and zeros on `F` to a solution of `A x = 1`.
pub fn extend_solution(z: &ZoeInstance, out: &ReductionOutput, x: &[bool]) -> Result<Vec<bool>> {
    if !z.is_solution(x) {
        return Err(Error::NotASolution("x does not satisfy A x = 1".into()));
    }
    let mut y = x.to_vec();
    y.extend(out.t_cols.iter().map(|_| true));
    y.extend(out.f_cols.iter().map(|_| false));
    debug_assert!(out.satisfies(&y));
    Ok(y)
}

/// Recovers a solution of `A x = 1` from a splitter vector `y`.
///
/// At `p = 1/2` a splitter may have all `T` columns zero; its complement is
/// then also a splitter and is the one restricted.
pub fn restrict_solution(z: &ZoeInstance, out: &ReductionOutput, y: &[bool]) -> Result<Vec<bool>> {
    if !out.satisfies(y) {
        return Err(Error::NotASolution("y does not meet the right-hand sides of M".into()));
    }
    let complement = out.t_cols.iter().all(|&j| !y[j]);
    let x: Vec<bool> = y[..z.cols()].iter().map(|&b| b ^ complement).collect();
    if complement && out.p != Proportion::HALF {
        return Err(Error::NotASolution("T columns of y are all zero".into()));
    }
    if !z.is_solution(&x) {
        return Err(Error::NotASolution("restriction does not satisfy A x = 1".into()));
    }
    Ok(x)
}

/// Lexicographically least binary `x` with `A x = 1`, by depth-first search
/// trying `x_j = 0` before `x_j = 1`.
pub fn solve_zoe(z: &ZoeInstance) -> Result<Option<Vec<bool>>> {
    let n = z.cols();
    if n > MAX_ZOE_COLUMNS {
        return Err(Error::OutOfRange(format!(
            "{n} columns exceeds the limit of {MAX_ZOE_COLUMNS}"
        )));
    }
    let rows: Vec<u32> = (0..z.rows())
        .map(|i| (0..n).filter(|&j| z.a.get(i, j)).fold(0, |acc, j| acc | 1 << j))
        .collect();

    fn dfs(rows: &[u32], n: usize, j: usize, x: u32) -> Option<u32> {
        let undecided = if j >= 32 { 0 } else { !0u32 << j };
        for &r in rows {
            let hit = (r & x).count_ones();
            if hit > 1 || (hit == 0 && r & undecided == 0) {
                return None;
            }
        }
        if j == n {
            return Some(x);
        }
        dfs(rows, n, j + 1, x).or_else(|| dfs(rows, n, j + 1, x | 1 << j))
    }

    Ok(dfs(&rows, n, 0, 0).map(|x| (0..n).map(|j| x >> j & 1 == 1).collect()))
}
