//! The unsplittable four-set configurations at `p = 1/2`.
//!
//! A four-set collection is unsplittable exactly when it is one of eleven
//! types. Type 0 covers collections with an unsplittable three-set
//! subcollection; Types 1 to 10 are region patterns matched up to a
//! permutation of the sets.
//!
//! Patterns below write a region as a string `B1 B2 B3 B4` of membership
//! digits, so `"1110"` is the region inside `B1`, `B2`, `B3` and outside
//! `B4`.

use std::fmt;
use std::sync::OnceLock;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::collection::{permute_mask, VennProfile};
use crate::criteria::{decide3, Decision, ThreeSetShape};
use crate::error::{Error, Result};
use crate::rational::{Proportion, Rational};
use crate::solver::is_p_splittable;

const REGIONS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RegionConstraint {
    Zero,
    One,
    ZeroOrOne,
    Odd,
    Even,
    Any,
}

impl RegionConstraint {
    pub fn admits(self, count: u64) -> bool {
        match self {
            RegionConstraint::Zero => count == 0,
            RegionConstraint::One => count == 1,
            RegionConstraint::ZeroOrOne => count <= 1,
            RegionConstraint::Odd => count % 2 == 1,
            RegionConstraint::Even => count % 2 == 0,
            RegionConstraint::Any => true,
        }
    }

    /// A uniformly random admissible count in `0..=max`, if any exists.
    fn sample<R: Rng>(self, max: u64, rng: &mut R) -> Option<u64> {
        let options: Vec<u64> = (0..=max).filter(|&c| self.admits(c)).collect();
        options.choose(rng).copied()
    }

    fn symbol(self) -> &'static str {
        match self {
            RegionConstraint::Zero => "",
            RegionConstraint::One => "1",
            RegionConstraint::ZeroOrOne => "0/1",
            RegionConstraint::Odd => "o",
            RegionConstraint::Even => "e",
            RegionConstraint::Any => "x",
        }
    }
}

/// A constraint for every region of a four-set collection. The outside
/// region (mask 0) is unconstrained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RegionPattern {
    constraints: [RegionConstraint; REGIONS],
}

fn parse_region(s: &str) -> usize {
    assert_eq!(s.len(), 4, "region {s:?}");
    s.bytes()
        .enumerate()
        .map(|(i, b)| match b {
            b'1' => 1 << i,
            b'0' => 0,
            _ => panic!("region {s:?}"),
        })
        .sum()
}

impl RegionPattern {
    /// Listed regions get their constraint, every other region must be
    /// empty.
    pub fn from_regions(regions: &[(&str, RegionConstraint)]) -> Self {
        let mut constraints = [RegionConstraint::Zero; REGIONS];
        constraints[0] = RegionConstraint::Any;
        for &(r, c) in regions {
            constraints[parse_region(r)] = c;
        }
        RegionPattern { constraints }
    }

    pub fn constraint(&self, mask: usize) -> RegionConstraint {
        self.constraints[mask]
    }

    pub fn matches(&self, v: &VennProfile) -> bool {
        v.n() == 4
            && self
                .constraints
                .iter()
                .zip(v.counts())
                .all(|(c, &x)| c.admits(x))
    }

    /// The pattern obtained by renaming set `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut constraints = [RegionConstraint::Zero; REGIONS];
        for (mask, &c) in self.constraints.iter().enumerate() {
            constraints[permute_mask(mask, perm)] = c;
        }
        RegionPattern { constraints }
    }

    fn sample<R: Rng>(&self, max_count: u64, rng: &mut R) -> Option<VennProfile> {
        let mut v = VennProfile::empty(4).expect("n = 4");
        for (mask, c) in self.constraints.iter().enumerate() {
            v.set_count(mask, c.sample(max_count, rng)?);
        }
        Some(v)
    }
}

impl fmt::Display for RegionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = (1..REGIONS)
            .filter(|&m| self.constraints[m] != RegionConstraint::Zero)
            .map(|m| {
                let name: String = (0..4).map(|i| if m >> i & 1 == 1 { '1' } else { '0' }).collect();
                format!("{name}:{}", self.constraints[m].symbol())
            })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// One catalogued type with all its distinct permuted variants.
#[derive(Clone, Debug)]
pub struct CatalogType {
    pub id: u8,
    pub base: RegionPattern,
    pub variants: Vec<RegionPattern>,
}

impl CatalogType {
    pub fn matches(&self, v: &VennProfile) -> bool {
        self.variants.iter().any(|p| p.matches(v))
    }
}

#[derive(Clone, Debug)]
pub struct TypeCatalog {
    /// Types 1 to 10 in order; Type 0 is a side condition, not a pattern.
    pub types: Vec<CatalogType>,
}

pub const TYPE_COUNT: usize = 11;

fn base_patterns() -> Vec<RegionPattern> {
    use RegionConstraint::*;
    let p = RegionPattern::from_regions;
    vec![
        p(&[("1110", Odd), ("0111", Odd), ("1011", Odd), ("1101", Odd), ("1111", One)]),
        p(&[("1110", Odd), ("0111", Even), ("1011", Odd), ("1101", Even), ("0101", One)]),
        // the 0/1 region belongs to the set missing from the even triple
        p(&[("1110", Odd), ("0111", Odd), ("1011", Even), ("1101", Odd), ("0100", ZeroOrOne)]),
        p(&[
            ("1100", Even),
            ("1010", Even),
            ("0110", Even),
            ("1111", Odd),
            ("0011", Odd),
            ("1001", Odd),
            ("0101", Odd),
        ]),
        p(&[
            ("1100", Odd),
            ("1010", Odd),
            ("0110", Odd),
            ("1111", Even),
            ("0011", Even),
            ("1001", Even),
            ("0101", Even),
        ]),
        p(&[("1110", Odd), ("0011", Even), ("1001", Even), ("0101", Odd), ("1011", One)]),
        // fixed by exhaustive search: the odd pairs form a triangle on B2, B3, B4
        p(&[("0110", One), ("1110", Even), ("1001", Even), ("0101", Odd), ("0011", Odd)]),
        p(&[("1110", Even), ("1111", One), ("0011", Odd), ("1001", Odd), ("0101", Odd)]),
        p(&[("1100", Odd), ("0100", ZeroOrOne), ("0110", Odd), ("1011", Odd), ("0101", Odd)]),
        p(&[("1000", ZeroOrOne), ("1100", Even), ("0110", Odd), ("1011", Odd), ("0101", Odd)]),
    ]
}

pub fn catalog() -> &'static TypeCatalog {
    static CATALOG: OnceLock<TypeCatalog> = OnceLock::new();
    CATALOG.get_or_init(|| {
        let perms: Vec<Vec<usize>> = (0..4).permutations(4).collect();
        let types = base_patterns()
            .into_iter()
            .enumerate()
            .map(|(k, base)| {
                let mut variants: Vec<RegionPattern> = Vec::new();
                for perm in &perms {
                    let v = base.permuted(perm);
                    if !variants.contains(&v) {
                        variants.push(v);
                    }
                }
                CatalogType {
                    id: k as u8 + 1,
                    base,
                    variants,
                }
            })
            .collect();
        TypeCatalog { types }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub decision: Decision,
    pub matched_type: Option<u8>,
}

/// True when dropping some set leaves an unsplittable three-set collection.
pub fn has_unsplittable_triple(v: &VennProfile) -> bool {
    (0..4).any(|drop| {
        let keep: Vec<usize> = (0..4).filter(|&i| i != drop).collect();
        let sub = v.restrict(&keep).expect("subset of four sets");
        let shape = ThreeSetShape::from_profile(&sub).expect("three sets");
        decide3(&shape, Proportion::HALF).decision == Decision::Unsplittable
    })
}

/// Classifies a four-set collection at `p = 1/2`. The lowest matching type
/// id is reported.
pub fn classify4(v: &VennProfile) -> Result<Classification> {
    if v.n() != 4 {
        return Err(Error::Precondition(format!("expected 4 sets, got {}", v.n())));
    }
    let matched_type = if has_unsplittable_triple(v) {
        Some(0)
    } else {
        catalog().types.iter().find(|t| t.matches(v)).map(|t| t.id)
    };
    Ok(Classification {
        decision: if matched_type.is_some() {
            Decision::Unsplittable
        } else {
            Decision::Splittable
        },
        matched_type,
    })
}

/// A random instance of type `id` with every region count at most
/// `max_count`, with the sets randomly relabelled.
pub fn sample_type<R: Rng>(id: u8, max_count: u64, rng: &mut R) -> Result<VennProfile> {
    if max_count == 0 {
        return Err(Error::OutOfRange("odd regions need max_count >= 1".into()));
    }
    let v = match id {
        0 => {
            // B1, B2, B3 restrict to three odd pair regions; each pair count
            // is split between the parts inside and outside B4
            let mut v = VennProfile::empty(4).expect("n = 4");
            v.set_count(0, rng.gen_range(0..=max_count));
            v.set_count(0b1000, rng.gen_range(0..=max_count));
            for pair in [0b011, 0b101, 0b110] {
                let total = RegionConstraint::Odd
                    .sample(2 * max_count, rng)
                    .expect("max_count >= 1");
                let lo = total.saturating_sub(max_count);
                let hi = total.min(max_count);
                let inside = rng.gen_range(lo..=hi);
                v.set_count(pair, inside);
                v.set_count(pair | 0b1000, total - inside);
            }
            v
        }
        1..=10 => catalog().types[id as usize - 1]
            .base
            .sample(max_count, rng)
            .expect("max_count >= 1 admits every constraint"),
        _ => return Err(Error::OutOfRange(format!("type id {id}"))),
    };
    let mut perm: Vec<usize> = (0..4).collect();
    perm.shuffle(rng);
    v.permute_sets(&perm)
}

/// Contradiction certificate for a Type 1 collection with pair-free
/// regions `o_i` (elements in every set but `B_i`) and one central element.
///
/// With targets `t_i = (1 + Σ_{j≠i} o_j)/2` the splitter equations force
/// `a_i = (Σ t - b - 3 t_i)/3` elements from region `i` when `b` central
/// elements are taken. Both choices of `b` give non-integral `a_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Type1Certificate {
    pub o: [u64; 4],
    pub targets: [u64; 4],
    /// `forced[b][i]` is the forced value of `a_i` when `b` central
    /// elements are selected.
    pub forced: [[Rational; 4]; 2],
}

impl Type1Certificate {
    pub fn is_contradiction(&self) -> bool {
        self.forced.iter().all(|row| row.iter().all(|a| !a.is_integer()))
    }
}

pub fn verify_type1(o: [u64; 4]) -> Result<Type1Certificate> {
    if let Some(i) = o.iter().position(|x| x % 2 == 0) {
        return Err(Error::Precondition(format!("o_{} = {} is even", i + 1, o[i])));
    }
    let total: u64 = o.iter().sum();
    let targets = o.map(|oi| (1 + total - oi) / 2);
    let t_sum: u64 = targets.iter().sum();
    let forced = [0i64, 1].map(|b| {
        targets.map(|ti| {
            Rational::new(t_sum as i64 - b - 3 * ti as i64, 3).expect("nonzero denominator")
        })
    });
    Ok(Type1Certificate { o, targets, forced })
}

/// Outcome of comparing the classifier with the exact solver over a family
/// of profiles.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepReport {
    pub profiles: u64,
    pub per_type: [u64; TYPE_COUNT],
    pub mismatches: u64,
    /// The first few mismatching profiles.
    pub examples: Vec<VennProfile>,
}

const KEPT_EXAMPLES: usize = 16;

impl Default for SweepReport {
    fn default() -> Self {
        SweepReport {
            profiles: 0,
            per_type: [0; TYPE_COUNT],
            mismatches: 0,
            examples: Vec::new(),
        }
    }
}

impl SweepReport {
    pub fn record(&mut self, v: &VennProfile) {
        self.profiles += 1;
        let class = classify4(v).expect("four sets");
        if let Some(id) = class.matched_type {
            self.per_type[id as usize] += 1;
        }
        let oracle = is_p_splittable(v, Proportion::HALF).feasible();
        if oracle != (class.decision == Decision::Splittable) {
            self.mismatches += 1;
            if self.examples.len() < KEPT_EXAMPLES {
                self.examples.push(v.clone());
            }
        }
    }

    pub fn merge(mut self, other: SweepReport) -> SweepReport {
        self.profiles += other.profiles;
        for (a, b) in self.per_type.iter_mut().zip(other.per_type) {
            *a += b;
        }
        self.mismatches += other.mismatches;
        self.examples.extend(other.examples);
        self.examples.truncate(KEPT_EXAMPLES);
        self
    }

    pub fn unsplittable(&self) -> u64 {
        self.per_type.iter().sum()
    }
}

impl fmt::Display for SweepReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "profiles: {}", self.profiles)?;
        for (id, count) in self.per_type.iter().enumerate() {
            writeln!(f, "type {id}: {count}")?;
        }
        writeln!(f, "mismatches: {}", self.mismatches)
    }
}

/// Regions fixed per task in [`sweep4`]; the rest are enumerated inside it.
const PREFIX_REGIONS: usize = 3;

/// Compares [`classify4`] with the exact solver on every four-set profile
/// whose fifteen non-outside regions hold at most `max_count` elements.
///
/// Work is split by the counts of regions 15, 14 and 13 and run on the
/// current rayon pool; the merged report does not depend on scheduling.
pub fn sweep4(max_count: u64) -> Result<SweepReport> {
    if !(1..=3).contains(&max_count) {
        return Err(Error::OutOfRange(format!("max_count {max_count} not in 1..=3")));
    }
    let base = max_count + 1;
    let tasks = base.pow(PREFIX_REGIONS as u32);
    let report = (0..tasks)
        .into_par_iter()
        .map(|task| {
            let mut v = VennProfile::empty(4).expect("n = 4");
            let mut x = task;
            for mask in (REGIONS - PREFIX_REGIONS..REGIONS).rev() {
                v.set_count(mask, x % base);
                x /= base;
            }
            let free: Vec<usize> = (1..REGIONS - PREFIX_REGIONS).collect();
            let mut report = SweepReport::default();
            loop {
                report.record(&v);
                // odometer over the free regions
                let mut k = 0;
                loop {
                    if k == free.len() {
                        return report;
                    }
                    let c = v.count(free[k]);
                    if c < max_count {
                        v.set_count(free[k], c + 1);
                        break;
                    }
                    v.set_count(free[k], 0);
                    k += 1;
                }
            }
        })
        .reduce(SweepReport::default, SweepReport::merge);
    Ok(report)
}

/// Samples per independently seeded chunk in [`random_sweep4`].
const CHUNK: u64 = 4096;

/// Like [`sweep4`] on `samples` profiles with independent uniform counts in
/// `0..=max_count`. Chunk `j` draws from stream `j` of a ChaCha8 generator
/// seeded with `seed`, so results are independent of thread count.
pub fn random_sweep4(samples: u64, max_count: u64, seed: u64) -> SweepReport {
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|j| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j);
            let n = CHUNK.min(samples - j * CHUNK);
            let mut report = SweepReport::default();
            for _ in 0..n {
                let mut v = VennProfile::empty(4).expect("n = 4");
                for mask in 1..REGIONS {
                    v.set_count(mask, rng.gen_range(0..=max_count));
                }
                report.record(&v);
            }
            report
        })
        .reduce(SweepReport::default, SweepReport::merge)
}
