//! Ground truth at tiny scale: exact generalized Turán numbers by branch
//! and bound, and the leading term of the complete-partite upper bound.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicI64, Ordering};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::hypergraph::{factorial, for_each_combination, Hypergraph, Pattern};

/// Default cap on the number of edge slots `C(n, r)`.
pub const DEFAULT_SLOT_CAP: usize = 24;
const MAX_SLOTS: usize = 32;
/// Number of leading slots fixed per parallel task.
const PREFIX_SLOTS: usize = 5;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("C(n, r) = {slots} edge slots exceeds the cap {cap}")]
    TooLarge { slots: u128, cap: usize },
    #[error("pattern `{pattern}` is not {r}-uniform")]
    UniformityMismatch { pattern: String, r: usize },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("cache: {0}")]
    Cache(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TuranInstance {
    pub n: usize,
    pub r: usize,
    pub forbidden: Pattern,
    pub counted: Pattern,
}

impl TuranInstance {
    pub fn new(n: usize, forbidden: Pattern, counted: Pattern) -> Result<Self, OracleError> {
        let r = forbidden.uniformity();
        if counted.uniformity() != r {
            return Err(OracleError::UniformityMismatch { pattern: counted.canonical(), r });
        }
        Ok(TuranInstance { n, r, forbidden, counted })
    }

    pub fn canonical(&self) -> String {
        format!("n={};r={};forbidden={};counted={}", self.n, self.r, self.forbidden.canonical(), self.counted.canonical())
    }

    pub fn cache_key(&self) -> String {
        hex::encode(Sha256::digest(self.canonical().as_bytes()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuranResult {
    pub max_count: u64,
    pub witness: Hypergraph,
}

/// The `r`-subsets of `0..n` in lexicographic order.
pub fn edge_slots(n: usize, r: usize) -> Vec<Vec<u32>> {
    let mut slots = Vec::new();
    for_each_combination(n, r, |c| slots.push(c.to_vec()));
    slots
}

/// Slot masks of every copy of `h` in the complete `r`-graph on `n` vertices.
pub fn copy_masks(n: usize, slots: &[Vec<u32>], h: &Pattern) -> Vec<u32> {
    let v = h.vertex_count();
    if v > n {
        return Vec::new();
    }
    let edges = h.edge_list();
    let index = |e: &mut Vec<u32>| {
        e.sort_unstable();
        slots.binary_search(e).unwrap()
    };
    let mut masks = HashSet::new();
    let mut img = vec![0u32; v];
    let mut used = vec![false; n];
    fn rec(
        k: usize,
        n: usize,
        img: &mut [u32],
        used: &mut [bool],
        edges: &[Vec<u32>],
        index: &dyn Fn(&mut Vec<u32>) -> usize,
        out: &mut HashSet<u32>,
    ) {
        if k == img.len() {
            let mask = edges.iter().fold(0u32, |m, e| {
                let mut t: Vec<u32> = e.iter().map(|&x| img[x as usize]).collect();
                m | 1 << index(&mut t)
            });
            out.insert(mask);
            return;
        }
        for x in 0..n {
            if !used[x] {
                used[x] = true;
                img[k] = x as u32;
                rec(k + 1, n, img, used, edges, index, out);
                used[x] = false;
            }
        }
    }
    rec(0, n, &mut img, &mut used, &edges, &index, &mut masks);
    let mut out: Vec<u32> = masks.into_iter().collect();
    out.sort_unstable();
    out
}

struct Search {
    slots: usize,
    /// Forbidden copies through each slot.
    forbidden_at: Vec<Vec<u32>>,
    /// Counted copies through each slot.
    counted_at: Vec<Vec<u32>>,
    counted: Vec<u32>,
}

impl Search {
    fn blocked(&self, included: u32, i: usize) -> bool {
        let with = included | 1 << i;
        self.forbidden_at[i].iter().any(|&m| m & !with == 0)
    }

    fn completed(&self, included: u32, i: usize) -> u64 {
        let with = included | 1 << i;
        self.counted_at[i].iter().filter(|&&m| m & !with == 0).count() as u64
    }

    /// Copies still attainable: those avoiding every excluded slot.
    fn bound(&self, included: u32, decided: usize) -> u64 {
        let decided_mask = if decided >= 32 { u32::MAX } else { (1u32 << decided) - 1 };
        let excluded = decided_mask & !included;
        self.counted.iter().filter(|&&m| m & excluded == 0).count() as u64
    }

    fn run(&self, i: usize, included: u32, count: u64, local: &mut (i64, u32), global: &AtomicI64) {
        let bound = self.bound(included, i) as i64;
        if bound <= local.0 || bound < global.load(Ordering::Relaxed) {
            return;
        }
        if i == self.slots {
            *local = (count as i64, included);
            global.fetch_max(count as i64, Ordering::Relaxed);
            return;
        }
        if !self.blocked(included, i) {
            self.run(i + 1, included | 1 << i, count + self.completed(included, i), local, global);
        }
        self.run(i + 1, included, count, local, global);
    }
}

/// Feasible fixed assignments of slots `from..to`, in include-first order.
fn prefixes(search: &Search, base: u32, base_count: u64, from: usize, to: usize) -> Vec<(u32, u64)> {
    let mut out = vec![(base, base_count)];
    for i in from..to {
        out = out
            .into_iter()
            .flat_map(|(m, c)| {
                let mut next = Vec::with_capacity(2);
                if !search.blocked(m, i) {
                    next.push((m | 1 << i, c + search.completed(m, i)));
                }
                next.push((m, c));
                next
            })
            .collect();
    }
    out
}

/// Maximum number of unordered copies of `counted` over `forbidden`-free
/// `r`-graphs on `n` labeled vertices.
///
/// Slots are decided in lexicographic order, inclusion first. Since the
/// symmetric group is transitive on slots, a positive optimum is attained
/// with slot 0 included, so the exclusion branch of slot 0 is searched only
/// when that optimum is zero. Ties go to the first witness in inclusion-first
/// order, independent of the worker count.
pub fn exact_turan(inst: &TuranInstance, slot_cap: usize) -> Result<TuranResult, OracleError> {
    if inst.forbidden.uniformity() != inst.r {
        return Err(OracleError::UniformityMismatch { pattern: inst.forbidden.canonical(), r: inst.r });
    }
    if inst.counted.uniformity() != inst.r {
        return Err(OracleError::UniformityMismatch { pattern: inst.counted.canonical(), r: inst.r });
    }
    let total = crate::hypergraph::binomial(inst.n as u128, inst.r as u128);
    let cap = slot_cap.min(MAX_SLOTS);
    if total > cap as u128 {
        return Err(OracleError::TooLarge { slots: total, cap });
    }
    let slots = edge_slots(inst.n, inst.r);
    let m = slots.len();
    let forbidden = copy_masks(inst.n, &slots, &inst.forbidden);
    let counted = copy_masks(inst.n, &slots, &inst.counted);
    let through = |masks: &[u32]| -> Vec<Vec<u32>> {
        (0..m).map(|i| masks.iter().copied().filter(|&c| c >> i & 1 == 1).collect()).collect()
    };
    let search = Search { slots: m, forbidden_at: through(&forbidden), counted_at: through(&counted), counted };
    let to_graph = |mask: u32| {
        let edges = (0..m).filter(|&i| mask >> i & 1 == 1).map(|i| slots[i].clone());
        Hypergraph::new(inst.r, inst.n, edges).expect("slots are valid edges")
    };
    if m == 0 {
        let count = search.counted.iter().filter(|&&c| c == 0).count() as u64;
        return Ok(TuranResult { max_count: count, witness: to_graph(0) });
    }

    let global = AtomicI64::new(-1);
    let solve = |tasks: Vec<(u32, u64)>, depth: usize| -> (i64, u32) {
        let results: Vec<(i64, u32)> = tasks
            .into_par_iter()
            .map(|(mask, count)| {
                let mut local = (-1i64, 0u32);
                search.run(depth, mask, count, &mut local, &global);
                local
            })
            .collect();
        // first maximum in task order
        results.into_iter().fold((-1, 0), |best, r| if r.0 > best.0 { r } else { best })
    };
    let depth = m.min(PREFIX_SLOTS);
    let empty_count = search.counted.iter().filter(|&&c| c == 0).count() as u64;
    let mut best = (-1i64, 0u32);
    if !search.blocked(0, 0) {
        let first = prefixes(&search, 1, empty_count + search.completed(0, 0), 1, depth);
        best = solve(first, depth);
    }
    if best.0 <= 0 {
        let second = prefixes(&search, 0, empty_count, 1, depth);
        let alt = solve(second, depth);
        if alt.0 > best.0 {
            best = alt;
        }
    }
    Ok(TuranResult { max_count: best.0.max(0) as u64, witness: to_graph(best.1) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
struct CacheEntry {
    instance: String,
    max_count: u64,
    witness: String,
}

/// On-disk results keyed by the SHA-256 of the instance's canonical form.
#[derive(Debug, Clone)]
pub struct TuranCache {
    dir: PathBuf,
}

impl TuranCache {
    pub fn new(dir: impl AsRef<Path>) -> Self {
        TuranCache { dir: dir.as_ref().to_path_buf() }
    }

    fn path(&self, inst: &TuranInstance) -> PathBuf {
        self.dir.join(format!("{}.json", inst.cache_key()))
    }

    pub fn get(&self, inst: &TuranInstance) -> Result<Option<TuranResult>, OracleError> {
        let path = self.path(inst);
        if !path.exists() {
            return Ok(None);
        }
        let text = std::fs::read_to_string(&path).map_err(|e| OracleError::Cache(format!("{}: {e}", path.display())))?;
        let entry: CacheEntry =
            serde_json::from_str(&text).map_err(|e| OracleError::Cache(format!("{}: {e}", path.display())))?;
        if entry.instance != inst.canonical() {
            return Err(OracleError::Cache(format!("{}: key collision", path.display())));
        }
        let witness = Hypergraph::from_text(&entry.witness).map_err(|e| OracleError::Cache(e.to_string()))?;
        Ok(Some(TuranResult { max_count: entry.max_count, witness }))
    }

    pub fn put(&self, inst: &TuranInstance, res: &TuranResult) -> Result<(), OracleError> {
        std::fs::create_dir_all(&self.dir).map_err(|e| OracleError::Cache(e.to_string()))?;
        let entry = CacheEntry { instance: inst.canonical(), max_count: res.max_count, witness: res.witness.to_text() };
        let json = serde_json::to_string_pretty(&entry).map_err(|e| OracleError::Cache(e.to_string()))?;
        std::fs::write(self.path(inst), json).map_err(|e| OracleError::Cache(e.to_string()))
    }
}

/// [`exact_turan`] through an optional cache.
pub fn exact_turan_cached(
    inst: &TuranInstance,
    slot_cap: usize,
    cache: Option<&TuranCache>,
) -> Result<(TuranResult, bool), OracleError> {
    if let Some(c) = cache {
        if let Some(hit) = c.get(inst)? {
            return Ok((hit, true));
        }
    }
    let res = exact_turan(inst, slot_cap)?;
    if let Some(c) = cache {
        c.put(inst, &res)?;
    }
    Ok((res, false))
}

/// Leading term `coefficient * n^exponent` of the upper bound on copies of
/// `K^{(r)}_{a_1,...,a_r}` in `K^{(r)}_{s_1,...,s_r}`-free `r`-graphs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundTerm {
    pub coefficient: f64,
    #[serde(with = "ratio_string")]
    pub exponent: Ratio<i64>,
    pub gamma: u64,
}

mod ratio_string {
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<i64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<i64>, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Requires `a_1 < s_1 <= ... <= s_{r-1}` and `a_i <= s_{i-1}`, except that
/// any positive `s` is accepted when every `a_i = 1`.
pub fn upper_bound_leading(a: &[usize], s: &[usize]) -> Result<UpperBoundTerm, OracleError> {
    let r = a.len();
    if r < 2 || s.len() != r {
        return Err(OracleError::HypothesisViolated(format!(
            "need r >= 2 and matching lengths, got a = {a:?}, s = {s:?}"
        )));
    }
    if let Some(i) = a.iter().position(|&x| x == 0) {
        return Err(OracleError::HypothesisViolated(format!("a_{} = 0", i + 1)));
    }
    if let Some(i) = s.iter().position(|&x| x == 0) {
        return Err(OracleError::HypothesisViolated(format!("s_{} = 0", i + 1)));
    }
    if a.iter().any(|&x| x != 1) {
        if a[0] >= s[0] {
            return Err(OracleError::HypothesisViolated(format!("a_1 = {} < s_1 = {} fails", a[0], s[0])));
        }
        for i in 1..r - 1 {
            if s[i - 1] > s[i] {
                return Err(OracleError::HypothesisViolated(format!(
                    "s_{i} = {} <= s_{} = {} fails",
                    s[i - 1],
                    i + 1,
                    s[i]
                )));
            }
        }
        for i in 1..r {
            if a[i] > s[i - 1] {
                return Err(OracleError::HypothesisViolated(format!(
                    "a_{} = {} <= s_{i} = {} fails",
                    i + 1,
                    a[i],
                    s[i - 1]
                )));
            }
        }
    }
    let prod_a: i64 = a.iter().map(|&x| x as i64).product();
    let prod_s: i64 = s[..r - 1].iter().map(|&x| x as i64).product();
    let sum_a: i64 = a.iter().map(|&x| x as i64).sum();
    let ratio = Ratio::new(prod_a, prod_s);
    let exponent = Ratio::from_integer(sum_a) - ratio;
    let power = *ratio.numer() as f64 / *ratio.denom() as f64;
    let denom: f64 = a.iter().map(|&x| factorial(x as u64) as f64).product();
    let coefficient = ((s[r - 1] - 1) as f64).powf(power) / denom;
    let gamma = Pattern::CompleteRPartite { parts: a.to_vec() }.gamma().unwrap();
    Ok(UpperBoundTerm { coefficient, exponent, gamma })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(n: usize, forbidden: &str, counted: &str) -> TuranInstance {
        TuranInstance::new(n, Pattern::parse(forbidden, 2).unwrap(), Pattern::parse(counted, 2).unwrap()).unwrap()
    }

    #[test]
    fn small_values() {
        assert_eq!(exact_turan(&inst(5, "K3", "edge"), DEFAULT_SLOT_CAP).unwrap().max_count, 6);
        assert_eq!(exact_turan(&inst(4, "K2,2", "edge"), DEFAULT_SLOT_CAP).unwrap().max_count, 4);
        let none = exact_turan(&inst(4, "edge", "edge"), DEFAULT_SLOT_CAP).unwrap();
        assert_eq!(none.max_count, 0);
        assert_eq!(none.witness.edge_count(), 0);
    }

    #[test]
    fn witness_attains_and_avoids() {
        let i = inst(6, "K3", "edge");
        let res = exact_turan(&i, DEFAULT_SLOT_CAP).unwrap();
        assert_eq!(res.witness.edge_count() as u64, res.max_count);
        assert_eq!(crate::hypergraph::count_pattern(&res.witness, &i.forbidden).unwrap().unordered_copies, 0);
    }

    #[test]
    fn slot_cap() {
        assert!(matches!(
            exact_turan(&inst(8, "K3", "edge"), DEFAULT_SLOT_CAP),
            Err(OracleError::TooLarge { slots: 28, cap: 24 })
        ));
        let bad = TuranInstance::new(4, Pattern::edge(3), Pattern::edge(2));
        assert!(matches!(bad, Err(OracleError::UniformityMismatch { .. })));
    }

    #[test]
    fn tiny_hosts() {
        // fewer vertices than the pattern: every graph is allowed
        assert_eq!(exact_turan(&inst(2, "K3", "edge"), DEFAULT_SLOT_CAP).unwrap().max_count, 1);
        assert_eq!(exact_turan(&inst(1, "K3", "edge"), DEFAULT_SLOT_CAP).unwrap().max_count, 0);
    }

    #[test]
    fn cache_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cache = TuranCache::new(dir.path());
        let i = inst(5, "K3", "edge");
        let (a, hit_a) = exact_turan_cached(&i, DEFAULT_SLOT_CAP, Some(&cache)).unwrap();
        let (b, hit_b) = exact_turan_cached(&i, DEFAULT_SLOT_CAP, Some(&cache)).unwrap();
        assert!(!hit_a && hit_b);
        assert_eq!(a, b);
        std::fs::write(dir.path().join(format!("{}.json", i.cache_key())), "{").unwrap();
        assert!(matches!(cache.get(&i), Err(OracleError::Cache(_))));
    }

    #[test]
    fn upper_bound_examples() {
        let t = upper_bound_leading(&[1, 1], &[2, 3]).unwrap();
        assert_eq!(t.exponent, Ratio::new(3, 2));
        assert!((t.coefficient - 2f64.sqrt()).abs() < 1e-12);
        let box3 = upper_bound_leading(&[1, 1, 1], &[2, 2, 5]).unwrap();
        assert_eq!(box3.exponent, Ratio::new(11, 4));
        let deg = upper_bound_leading(&[1, 1], &[1, 4]).unwrap();
        assert_eq!((deg.exponent, deg.gamma), (Ratio::from_integer(1), 2));
        let mixed = upper_bound_leading(&[1, 2, 2], &[2, 2, 3]).unwrap();
        assert_eq!(mixed.exponent, Ratio::from_integer(4));
        assert_eq!(mixed.gamma, 2);
        assert!((mixed.coefficient - 2.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn upper_bound_hypotheses() {
        for (a, s, needle) in [
            (vec![2, 1], vec![2, 3], "a_1"),
            (vec![1, 2, 1], vec![3, 2, 2], "s_1"),
            (vec![1, 3], vec![2, 3], "a_2"),
            (vec![1], vec![1], "r >= 2"),
            (vec![0, 1], vec![1, 1], "a_1 = 0"),
        ] {
            match upper_bound_leading(&a, &s) {
                Err(OracleError::HypothesisViolated(msg)) => assert!(msg.contains(needle), "{msg}"),
                other => panic!("{a:?} {s:?}: {other:?}"),
            }
        }
    }
}
