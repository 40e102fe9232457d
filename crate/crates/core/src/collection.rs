//! Set collections in two views: an incidence matrix (sets × elements) and a
//! Venn profile (element count per membership mask).
//!
//! Region masks use bit `i` for membership in set `i` (zero-based). Mask 0
//! holds elements that lie in no set; solvers ignore it.

use std::fmt;

use crate::error::{Error, Result};
use crate::rational::Proportion;

/// Largest number of sets a [`VennProfile`] can hold.
pub const MAX_PROFILE_SETS: usize = 16;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl IncidenceMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IncidenceMatrix {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    /// Builds from 0/1 rows; every row must have the same length.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = IncidenceMatrix::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::Parse(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    cols
                )));
            }
            for (j, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m.set(i, j, true),
                    _ => {
                        return Err(Error::Parse(format!(
                            "entry ({}, {}) is {b}, expected 0 or 1",
                            i + 1,
                            j + 1
                        )))
                    }
                }
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        self.bits[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.bits[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.row(i).iter().filter(|&&b| b).count() as u64
    }

    pub fn row_sums(&self) -> Vec<u64> {
        (0..self.rows).map(|i| self.row_sum(i)).collect()
    }

    /// `M y` for a binary vector `y`.
    pub fn mul_vec(&self, y: &[bool]) -> Vec<u64> {
        assert_eq!(y.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(y)
                    .filter(|(&a, &b)| a && b)
                    .count() as u64
            })
            .collect()
    }

    /// Membership mask of column `j` (requires at most 16 rows).
    pub fn column_mask(&self, j: usize) -> usize {
        (0..self.rows)
            .filter(|&i| self.get(i, j))
            .fold(0, |m, i| m | (1 << i))
    }

    /// Column indices grouped by region mask, each group in ascending order.
    pub fn region_columns(&self) -> Result<Vec<Vec<usize>>> {
        check_sets(self.rows)?;
        let mut groups = vec![Vec::new(); 1 << self.rows];
        for j in 0..self.cols {
            groups[self.column_mask(j)].push(j);
        }
        Ok(groups)
    }
}

impl fmt::Debug for IncidenceMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IncidenceMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            let line: String = self.row(i).iter().map(|&b| if b { '1' } else { '0' }).collect();
            writeln!(f, "  {line}")?;
        }
        Ok(())
    }
}

fn check_sets(n: usize) -> Result<()> {
    if n > MAX_PROFILE_SETS {
        Err(Error::TooManySets {
            n,
            max: MAX_PROFILE_SETS,
        })
    } else {
        Ok(())
    }
}

/// Element counts for every Venn region of an `n`-set collection.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct VennProfile {
    n: usize,
    counts: Vec<u64>,
}

impl VennProfile {
    pub fn empty(n: usize) -> Result<Self> {
        check_sets(n)?;
        Ok(VennProfile {
            n,
            counts: vec![0; 1 << n],
        })
    }

    /// `counts[mask]` for every mask in `0..2^n`.
    pub fn from_counts(n: usize, counts: Vec<u64>) -> Result<Self> {
        check_sets(n)?;
        if counts.len() != 1 << n {
            return Err(Error::Precondition(format!(
                "expected {} region counts for {n} sets, got {}",
                1usize << n,
                counts.len()
            )));
        }
        Ok(VennProfile { n, counts })
    }

    /// Builds from `(mask, count)` pairs; repeated masks accumulate.
    pub fn from_regions(n: usize, regions: &[(usize, u64)]) -> Result<Self> {
        let mut v = VennProfile::empty(n)?;
        for &(mask, c) in regions {
            if mask >> n != 0 {
                return Err(Error::Precondition(format!(
                    "mask {mask:#b} out of range for {n} sets"
                )));
            }
            v.counts[mask] += c;
        }
        Ok(v)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full_mask(&self) -> usize {
        (1 << self.n) - 1
    }

    pub fn count(&self, mask: usize) -> u64 {
        self.counts[mask]
    }

    pub fn set_count(&mut self, mask: usize, c: u64) {
        self.counts[mask] = c;
    }

    pub fn add_count(&mut self, mask: usize, c: u64) {
        self.counts[mask] += c;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn outside_count(&self) -> u64 {
        self.counts[0]
    }

    /// Masks `1..2^n` with a positive count.
    pub fn nonempty_regions(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.counts.len()).filter(move |&m| self.counts[m] > 0)
    }

    /// `|B_i|` for the zero-based set index `i`.
    pub fn set_size(&self, i: usize) -> u64 {
        self.counts
            .iter()
            .enumerate()
            .filter(|(m, _)| m >> i & 1 == 1)
            .map(|(_, &c)| c)
            .sum()
    }

    pub fn set_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0; self.n];
        for (mask, &c) in self.counts.iter().enumerate().skip(1) {
            if c == 0 {
                continue;
            }
            for (i, s) in sizes.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    *s += c;
                }
            }
        }
        sizes
    }

    /// Total number of elements, including those outside every set.
    pub fn total_elements(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Relabels sets: set `i` becomes set `perm[i]` (zero-based).
    pub fn permute_sets(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::Precondition(format!(
                "permutation has length {}, expected {}",
                perm.len(),
                self.n
            )));
        }
        let mut seen = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Precondition(format!("{perm:?} is not a permutation")));
            }
        }
        let mut out = VennProfile::empty(self.n)?;
        for (mask, &c) in self.counts.iter().enumerate() {
            out.counts[permute_mask(mask, perm)] += c;
        }
        Ok(out)
    }

    /// The subcollection formed by `sets` (zero-based, in the given order).
    /// Elements that fall outside the chosen sets land in mask 0.
    pub fn restrict(&self, sets: &[usize]) -> Result<Self> {
        if sets.iter().any(|&s| s >= self.n) {
            return Err(Error::Precondition(format!("set index out of range in {sets:?}")));
        }
        let mut out = VennProfile::empty(sets.len())?;
        for (mask, &c) in self.counts.iter().enumerate() {
            let sub = sets
                .iter()
                .enumerate()
                .filter(|(_, &s)| mask >> s & 1 == 1)
                .fold(0, |m, (k, _)| m | (1 << k));
            out.counts[sub] += c;
        }
        Ok(out)
    }

    /// Expands into an incidence matrix. Columns are grouped by mask in
    /// ascending order from mask 1; elements outside every set come last.
    pub fn to_matrix(&self) -> IncidenceMatrix {
        let cols = self.total_elements() as usize;
        let mut m = IncidenceMatrix::zeros(self.n, cols);
        let mut j = 0;
        for mask in self.element_order() {
            for _ in 0..self.counts[mask] {
                for i in 0..self.n {
                    if mask >> i & 1 == 1 {
                        m.set(i, j, true);
                    }
                }
                j += 1;
            }
        }
        m
    }

    fn element_order(&self) -> impl Iterator<Item = usize> {
        (1..self.counts.len()).chain(std::iter::once(0))
    }

    /// Zero-based element indices of a selection under the [`Self::to_matrix`]
    /// numbering: the first `s_R` elements of each region block.
    pub fn selection_elements(&self, sel: &RegionSelection) -> Vec<usize> {
        let mut out = Vec::new();
        let mut start = 0usize;
        for mask in self.element_order() {
            let take = sel.count(mask) as usize;
            out.extend(start..start + take);
            start += self.counts[mask] as usize;
        }
        out.sort_unstable();
        out
    }
}

impl fmt::Debug for VennProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VennProfile(n={}; ", self.n)?;
        let mut first = true;
        for (mask, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "{}:{c}", mask_string(mask, self.n))?;
            }
        }
        write!(f, ")")
    }
}

/// A mask as a binary string of length `n`, leftmost character for set 0.
pub fn mask_string(mask: usize, n: usize) -> String {
    (0..n).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn permute_mask(mask: usize, perm: &[usize]) -> usize {
    perm.iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .fold(0, |m, (_, &p)| m | (1 << p))
}

pub fn profile_of_matrix(m: &IncidenceMatrix) -> Result<VennProfile> {
    let mut v = VennProfile::empty(m.rows())?;
    for j in 0..m.cols() {
        v.counts[m.column_mask(j)] += 1;
    }
    Ok(v)
}

pub fn matrix_of_profile(v: &VennProfile) -> IncidenceMatrix {
    v.to_matrix()
}

/// Closed interval of admissible values for `|S ∩ B_i|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    pub lo: u64,
    pub hi: u64,
}

impl Interval {
    pub fn point(v: u64) -> Self {
        Interval { lo: v, hi: v }
    }

    pub fn contains(&self, v: u64) -> bool {
        self.lo <= v && v <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// One admissible interval per set.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TargetSpec {
    bounds: Vec<Interval>,
}

impl TargetSpec {
    pub fn new(bounds: Vec<Interval>) -> Self {
        TargetSpec { bounds }
    }

    pub fn points(values: &[u64]) -> Self {
        TargetSpec::new(values.iter().map(|&v| Interval::point(v)).collect())
    }

    pub fn bounds(&self) -> &[Interval] {
        &self.bounds
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    /// Checks `lo <= hi <= |B_i|` for every set.
    pub fn validate(&self, sizes: &[u64]) -> Result<()> {
        if self.bounds.len() != sizes.len() {
            return Err(Error::MalformedTargets(format!(
                "{} intervals for {} sets",
                self.bounds.len(),
                sizes.len()
            )));
        }
        for (i, (iv, &size)) in self.bounds.iter().zip(sizes).enumerate() {
            if iv.lo > iv.hi || iv.hi > size {
                return Err(Error::MalformedTargets(format!(
                    "set {}: interval {iv} not within [0, {size}]",
                    i + 1
                )));
            }
        }
        Ok(())
    }

    /// Targets for the complementary selection: `[|B_i| - hi, |B_i| - lo]`.
    pub fn complement(&self, sizes: &[u64]) -> Self {
        TargetSpec::new(
            self.bounds
                .iter()
                .zip(sizes)
                .map(|(iv, &s)| Interval {
                    lo: s - iv.hi,
                    hi: s - iv.lo,
                })
                .collect(),
        )
    }

    pub fn accepts(&self, sums: &[u64]) -> bool {
        sums.len() == self.bounds.len() && self.bounds.iter().zip(sums).all(|(iv, &s)| iv.contains(s))
    }
}

/// `nint(p |B_i|)` per set size, widened to both neighbours at a tie.
pub fn targets_for_sizes(sizes: &[u64], p: Proportion) -> TargetSpec {
    TargetSpec::new(
        sizes
            .iter()
            .map(|&s| {
                let r = p.value().mul_int(s).nint();
                Interval {
                    lo: r.lo() as u64,
                    hi: r.hi() as u64,
                }
            })
            .collect(),
    )
}

pub fn p_targets(v: &VennProfile, p: Proportion) -> TargetSpec {
    targets_for_sizes(&v.set_sizes(), p)
}

/// How many elements a splitter takes from each Venn region.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RegionSelection {
    n: usize,
    counts: Vec<u64>,
}

impl RegionSelection {
    pub fn empty(n: usize) -> Self {
        RegionSelection {
            n,
            counts: vec![0; 1 << n],
        }
    }

    pub fn from_counts(n: usize, counts: Vec<u64>) -> Self {
        assert_eq!(counts.len(), 1 << n);
        RegionSelection { n, counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self, mask: usize) -> u64 {
        self.counts[mask]
    }

    pub fn set_count(&mut self, mask: usize, c: u64) {
        self.counts[mask] = c;
    }

    pub fn add_count(&mut self, mask: usize, c: u64) {
        self.counts[mask] += c;
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.counts[1..].iter().sum()
    }

    /// `|S ∩ B_i|` for every set.
    pub fn set_sums(&self) -> Vec<u64> {
        let mut sums = vec![0; self.n];
        for (mask, &c) in self.counts.iter().enumerate().skip(1) {
            if c == 0 {
                continue;
            }
            for (i, s) in sums.iter_mut().enumerate() {
                if mask >> i & 1 == 1 {
                    *s += c;
                }
            }
        }
        sums
    }

    /// Region counts stay within the profile.
    pub fn fits(&self, v: &VennProfile) -> bool {
        self.n == v.n() && self.counts.iter().zip(v.counts()).all(|(s, c)| s <= c)
    }

    /// True when the selection fits `v` and meets every interval of `t`.
    pub fn satisfies(&self, v: &VennProfile, t: &TargetSpec) -> bool {
        self.fits(v) && t.accepts(&self.set_sums())
    }

    /// `counts - self` region by region.
    pub fn complement(&self, v: &VennProfile) -> RegionSelection {
        RegionSelection {
            n: self.n,
            counts: v.counts().iter().zip(&self.counts).map(|(c, s)| c - s).collect(),
        }
    }
}

impl fmt::Debug for RegionSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RegionSelection(")?;
        let mut first = true;
        for (mask, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                if !first {
                    write!(f, ", ")?;
                }
                first = false;
                write!(f, "{}:{c}", mask_string(mask, self.n))?;
            }
        }
        write!(f, ")")
    }
}
