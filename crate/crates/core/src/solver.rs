//! Exact search for selections that meet per-set interval targets.
//!
//! The search runs over Venn region counts rather than element subsets:
//! elements of one region are interchangeable, so a profile with region
//! counts `c_R` has `Π (c_R + 1)` candidate selections instead of `2^elements`.

use crate::collection::{
    p_targets, IncidenceMatrix, Interval, RegionSelection, TargetSpec, VennProfile,
};
use crate::error::Result;
use crate::rational::Proportion;

/// Result of a feasibility search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOutcome<W = RegionSelection> {
    pub witness: Option<W>,
    pub nodes_explored: u64,
}

impl<W> SolveOutcome<W> {
    pub fn feasible(&self) -> bool {
        self.witness.is_some()
    }
}

/// One search variable: how many of `capacity` interchangeable elements to
/// take, each contributing 1 to every set in `sets`.
struct Item {
    sets: Vec<usize>,
    capacity: u64,
}

/// Depth-first search with per-set bound propagation. Items are decided in
/// the given order and each takes the smallest admissible value first, so
/// the first witness found is the lexicographically least one.
fn bounded_search(n_sets: usize, items: &[Item], bounds: &[Interval]) -> (Option<Vec<u64>>, u64) {
    let k = items.len();
    // remaining[j * n + i]: most set i can still gain from items j..
    let mut remaining = vec![0u64; (k + 1) * n_sets];
    for j in (0..k).rev() {
        let (head, tail) = remaining.split_at_mut((j + 1) * n_sets);
        head[j * n_sets..].copy_from_slice(&tail[..n_sets]);
        for &i in &items[j].sets {
            head[j * n_sets + i] += items[j].capacity;
        }
    }
    if (0..n_sets).any(|i| remaining[i] < bounds[i].lo) {
        return (None, 0);
    }

    let mut sums = vec![0u64; n_sets];
    let mut value = vec![0u64; k];
    let mut limit = vec![0u64; k];
    let mut nodes = 0u64;
    let mut level = 0usize;

    'descend: loop {
        if level == k {
            return (Some(value), nodes);
        }
        let item = &items[level];
        let rest = &remaining[(level + 1) * n_sets..(level + 2) * n_sets];
        let mut lo = 0u64;
        let mut hi = item.capacity;
        for &i in &item.sets {
            let reach = sums[i] + rest[i];
            lo = lo.max(bounds[i].lo.saturating_sub(reach));
            hi = hi.min(bounds[i].hi - sums[i]);
        }
        if lo <= hi {
            nodes += 1;
            value[level] = lo;
            limit[level] = hi;
            for &i in &item.sets {
                sums[i] += lo;
            }
            level += 1;
            continue 'descend;
        }
        // backtrack to the deepest level with an untried value
        loop {
            if level == 0 {
                return (None, nodes);
            }
            level -= 1;
            let item = &items[level];
            if value[level] < limit[level] {
                nodes += 1;
                value[level] += 1;
                for &i in &item.sets {
                    sums[i] += 1;
                }
                level += 1;
                continue 'descend;
            }
            for &i in &item.sets {
                sums[i] -= value[level];
            }
        }
    }
}

fn mask_sets(mask: usize, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask >> i & 1 == 1).collect()
}

/// Decides whether some region selection meets every interval of `t`.
///
/// Regions are processed in descending mask order with counts tried in
/// ascending order; a partial assignment is cut as soon as some set can no
/// longer reach its lower bound or has exceeded its upper bound.
pub fn find_selection(v: &VennProfile, t: &TargetSpec) -> Result<SolveOutcome> {
    let n = v.n();
    t.validate(&v.set_sizes())?;
    let masks: Vec<usize> = (1..=v.full_mask()).rev().filter(|&m| v.count(m) > 0).collect();
    let items: Vec<Item> = masks
        .iter()
        .map(|&m| Item {
            sets: mask_sets(m, n),
            capacity: v.count(m),
        })
        .collect();
    let (found, nodes) = bounded_search(n, &items, t.bounds());
    let witness = found.map(|vals| {
        let mut sel = RegionSelection::empty(n);
        for (&m, c) in masks.iter().zip(vals) {
            sel.set_count(m, c);
        }
        sel
    });
    Ok(SolveOutcome {
        witness,
        nodes_explored: nodes,
    })
}

/// Searches for a `p`-splitter: `|S ∩ B_i| = nint(p |B_i|)`, either rounding
/// at a half-integer.
pub fn is_p_splittable(v: &VennProfile, p: Proportion) -> SolveOutcome {
    find_selection(v, &p_targets(v, p)).expect("p-targets are always well formed")
}

/// Interval of `|S ∩ B|` values whose imbalance `|2x - |B||` is at most `d`.
pub fn discrepancy_interval(size: u64, d: u64) -> Interval {
    let lo = if d >= size { 0 } else { (size - d).div_ceil(2) };
    let hi = ((size + d) / 2).min(size);
    Interval { lo, hi }
}

/// Exact discrepancy `min_S max_i | |B_i ∩ S| - |B_i \ S| |` with a witness
/// at the optimum.
pub fn discrepancy(v: &VennProfile) -> (u64, RegionSelection) {
    let sizes = v.set_sizes();
    let max = sizes.iter().copied().max().unwrap_or(0);
    for d in 0..=max {
        let t = TargetSpec::new(sizes.iter().map(|&s| discrepancy_interval(s, d)).collect());
        // odd sets admit no selection at d = 0
        if t.bounds().iter().any(|iv| iv.lo > iv.hi) {
            continue;
        }
        if let Some(w) = find_selection(v, &t).expect("well formed").witness {
            return (d, w);
        }
    }
    unreachable!("the empty selection has discrepancy at most max |B_i|")
}

/// Decides existence of a binary `y` with `(M y)_i ∈ [lo_i, hi_i]`, searching
/// columns in index order with `y_j = 0` tried before `y_j = 1`.
pub fn solve_matrix(m: &IncidenceMatrix, t: &TargetSpec) -> Result<SolveOutcome<Vec<bool>>> {
    t.validate(&m.row_sums())?;
    let items: Vec<Item> = (0..m.cols())
        .map(|j| Item {
            sets: (0..m.rows()).filter(|&i| m.get(i, j)).collect(),
            capacity: 1,
        })
        .collect();
    let (found, nodes) = bounded_search(m.rows(), &items, t.bounds());
    Ok(SolveOutcome {
        witness: found.map(|vals| vals.into_iter().map(|x| x == 1).collect()),
        nodes_explored: nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collection::profile_of_matrix;
    use crate::error::Error;
    use crate::rational::Rational;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn b0() -> VennProfile {
        VennProfile::from_regions(3, &[(0b011, 1), (0b101, 1), (0b110, 1)]).unwrap()
    }

    /// Independent oracle: expand into elements and record `M y` for every
    /// subset `y`.
    fn achievable(v: &VennProfile) -> HashSet<Vec<u64>> {
        let m = v.to_matrix();
        let cols = m.cols();
        assert!(cols <= 20);
        (0u32..1 << cols)
            .map(|bits| {
                let y: Vec<bool> = (0..cols).map(|j| bits >> j & 1 == 1).collect();
                m.mul_vec(&y)
            })
            .collect()
    }

    fn brute_force(v: &VennProfile, t: &TargetSpec) -> bool {
        achievable(v).iter().any(|s| t.accepts(s))
    }

    fn brute_disc(v: &VennProfile) -> u64 {
        let m = v.to_matrix();
        let sizes = m.row_sums();
        (0u32..1 << m.cols())
            .map(|bits| {
                let y: Vec<bool> = (0..m.cols()).map(|j| bits >> j & 1 == 1).collect();
                m.mul_vec(&y)
                    .iter()
                    .zip(&sizes)
                    .map(|(&x, &s)| (2 * x as i64 - s as i64).unsigned_abs())
                    .max()
                    .unwrap_or(0)
            })
            .min()
            .unwrap()
    }

    #[test]
    fn b0_examples() {
        let v = b0();
        let ones = TargetSpec::points(&[1, 1, 1]);
        assert!(!find_selection(&v, &ones).unwrap().feasible());
        assert!(!brute_force(&v, &ones));
        let wide = TargetSpec::new(vec![Interval { lo: 0, hi: 2 }; 3]);
        let out = find_selection(&v, &wide).unwrap();
        assert_eq!(out.witness.unwrap().total(), 0);
        assert!(!is_p_splittable(&v, Proportion::HALF).feasible());
        assert_eq!(discrepancy(&v).0, 2);
        assert_eq!(brute_disc(&v), 2);
    }

    #[test]
    fn zero_profile() {
        let v = VennProfile::empty(4).unwrap();
        let out = find_selection(&v, &TargetSpec::points(&[0; 4])).unwrap();
        assert_eq!(out.witness.unwrap(), RegionSelection::empty(4));
    }

    #[test]
    fn malformed_targets() {
        let v = b0();
        let t = TargetSpec::new(vec![Interval { lo: 2, hi: 1 }; 3]);
        assert!(matches!(find_selection(&v, &t), Err(Error::MalformedTargets(_))));
        assert!(find_selection(&v, &TargetSpec::points(&[3, 0, 0])).is_err());
        assert!(find_selection(&v, &TargetSpec::points(&[1, 1])).is_err());
    }

    #[test]
    fn two_sets_always_split() {
        for a1 in 0..5 {
            for a2 in 0..5 {
                for b in 0..5 {
                    let v = VennProfile::from_regions(2, &[(1, a1), (2, a2), (3, b)]).unwrap();
                    assert!(is_p_splittable(&v, Proportion::HALF).feasible());
                }
            }
        }
    }

    #[test]
    fn full_intersection_of_four() {
        let v = VennProfile::from_regions(4, &[(0b1111, 2)]).unwrap();
        let w = is_p_splittable(&v, Proportion::HALF).witness.unwrap();
        assert_eq!(w.count(0b1111), 1);
    }

    #[test]
    fn single_set_discrepancy() {
        let v4 = VennProfile::from_regions(1, &[(1, 4)]).unwrap();
        assert_eq!(discrepancy(&v4).0, 0);
        let v5 = VennProfile::from_regions(1, &[(1, 5)]).unwrap();
        assert_eq!(discrepancy(&v5).0, 1);
    }

    #[test]
    fn zero_column_matrix() {
        let m = IncidenceMatrix::zeros(2, 0);
        let out = solve_matrix(&m, &TargetSpec::points(&[0, 0])).unwrap();
        assert_eq!(out.witness, Some(vec![]));
    }

    #[test]
    fn oracle_completeness_small_profiles() {
        // every 3-set profile with counts <= 2, all point/interval targets
        // derived from a few proportions
        let props = ["1/2", "1/3", "1/4", "2/5", "0", "1"];
        for code in 0..3usize.pow(7) {
            let mut c = vec![0u64; 8];
            let mut x = code;
            for slot in c.iter_mut().skip(1) {
                *slot = (x % 3) as u64;
                x /= 3;
            }
            let v = VennProfile::from_counts(3, c).unwrap();
            let sums = achievable(&v);
            for p in props {
                let p: Proportion = p.parse().unwrap();
                let t = p_targets(&v, p);
                let out = find_selection(&v, &t).unwrap();
                assert_eq!(out.feasible(), sums.iter().any(|s| t.accepts(s)), "{v:?} p={p}");
                if let Some(w) = &out.witness {
                    assert!(w.satisfies(&v, &t));
                }
            }
        }
    }

    #[test]
    fn discrepancy_matches_brute_force() {
        for code in 0..3usize.pow(7) {
            let mut c = vec![0u64; 8];
            let mut x = code;
            for slot in c.iter_mut().skip(1) {
                *slot = (x % 3) as u64;
                x /= 3;
            }
            let v = VennProfile::from_counts(3, c).unwrap();
            let (d, w) = discrepancy(&v);
            assert_eq!(d, brute_disc(&v), "{v:?}");
            let sizes = v.set_sizes();
            for (s, x) in sizes.iter().zip(w.set_sums()) {
                assert!((2 * x as i64 - *s as i64).unsigned_abs() <= d);
            }
            let split = is_p_splittable(&v, Proportion::HALF).feasible();
            assert_eq!(d <= 1, split);
            let even_split = sizes.iter().all(|s| s % 2 == 0)
                && find_selection(&v, &TargetSpec::points(&sizes.iter().map(|s| s / 2).collect::<Vec<_>>()))
                    .unwrap()
                    .feasible();
            assert_eq!(d == 0, even_split);
        }
    }

    fn arb_profile(n: usize, max: u64) -> impl Strategy<Value = VennProfile> {
        proptest::collection::vec(0..=max, 1 << n)
            .prop_map(move |c| VennProfile::from_counts(n, c).unwrap())
    }

    proptest! {
        #[test]
        fn oracle_completeness_four_sets(v in arb_profile(4, 2), lo in proptest::collection::vec(0u64..6, 4), w in proptest::collection::vec(0u64..3, 4)) {
            prop_assume!(v.total_elements() - v.outside_count() <= 14);
            let sizes = v.set_sizes();
            let t = TargetSpec::new(
                (0..4)
                    .map(|i| {
                        let lo = lo[i].min(sizes[i]);
                        Interval { lo, hi: (lo + w[i]).min(sizes[i]) }
                    })
                    .collect(),
            );
            let mut compact = v.clone();
            compact.set_count(0, 0);
            let out = find_selection(&v, &t).unwrap();
            prop_assert_eq!(out.feasible(), brute_force(&compact, &t));
        }

        #[test]
        fn widening_never_hurts(v in arb_profile(4, 3), grow in proptest::collection::vec(0u64..2, 8)) {
            let sizes = v.set_sizes();
            let t = p_targets(&v, Proportion::HALF);
            let wide = TargetSpec::new(
                t.bounds()
                    .iter()
                    .zip(&sizes)
                    .enumerate()
                    .map(|(i, (iv, &s))| Interval {
                        lo: iv.lo.saturating_sub(grow[2 * i]),
                        hi: (iv.hi + grow[2 * i + 1]).min(s),
                    })
                    .collect(),
            );
            if find_selection(&v, &t).unwrap().feasible() {
                prop_assert!(find_selection(&v, &wide).unwrap().feasible());
            }
        }

        #[test]
        fn complement_symmetry(v in arb_profile(4, 3), num in 0i64..=6) {
            let p = Proportion::new(Rational::new(num, 6).unwrap()).unwrap();
            let sizes = v.set_sizes();
            let t = p_targets(&v, p);
            let out = find_selection(&v, &t).unwrap();
            let out_c = find_selection(&v, &t.complement(&sizes)).unwrap();
            prop_assert_eq!(out.feasible(), out_c.feasible());
            if let Some(w) = out.witness {
                prop_assert!(w.complement(&v).satisfies(&v, &t.complement(&sizes)));
            }
        }

        #[test]
        fn matrix_and_profile_agree(bits in proptest::collection::vec(0u8..=1, 32)) {
            let rows: Vec<Vec<u8>> = bits.chunks(8).map(|c| c.to_vec()).collect();
            let m = IncidenceMatrix::from_rows(&rows).unwrap();
            let v = profile_of_matrix(&m).unwrap();
            let t = p_targets(&v, Proportion::HALF);
            let by_matrix = solve_matrix(&m, &t).unwrap();
            prop_assert_eq!(by_matrix.feasible(), is_p_splittable(&v, Proportion::HALF).feasible());
            if let Some(y) = by_matrix.witness {
                prop_assert!(t.accepts(&m.mul_vec(&y)));
            }
        }
    }
}
