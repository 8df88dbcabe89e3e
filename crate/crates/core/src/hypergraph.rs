//! `r`-uniform hypergraphs, zero-set hypergraphs of symmetric polynomials,
//! pattern counting and scans for complete `r`-partite configurations.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::field::Fe;
use crate::poly::{all_points, BlockPolynomial, PointBlock};

/// Largest pattern (in vertices) accepted by [`count_pattern`].
pub const MAX_PATTERN_VERTICES: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("invalid edge {edge:?}: {msg}")]
    InvalidEdge { edge: Vec<u32>, msg: String },
    #[error("{what}: estimate {estimate} exceeds cap {cap}")]
    TooLarge { what: &'static str, estimate: u128, cap: u128 },
    #[error("polynomial is not symmetric; its zero set does not define an unordered hypergraph")]
    NotSymmetric,
    #[error("pattern has {v} vertices, the counting limit is {MAX_PATTERN_VERTICES}")]
    PatternTooLarge { v: usize },
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("pattern is {pattern}-uniform but the host is {host}-uniform")]
    UniformityMismatch { pattern: usize, host: usize },
    #[error("invalid grouped sequence: {0}")]
    InvalidSequence(String),
    #[error("sequence scan of {estimate} canonical sequences exceeds the budget {cap}")]
    ScanBudgetExceeded { estimate: u128, cap: u128 },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

pub(crate) fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// An `r`-uniform hypergraph on vertices `0..n`.
///
/// Edges are kept as one flat, lexicographically sorted array of ascending
/// `r`-tuples; membership is a binary search. Vertices may carry a label,
/// the encoding of the field point they came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    r: usize,
    n: usize,
    edges: Vec<u32>,
    incidence: Vec<Vec<u32>>,
    labels: Option<Vec<u64>>,
}

impl Hypergraph {
    /// Builds a hypergraph from arbitrary-order edges. Duplicates are merged.
    pub fn new(r: usize, n: usize, edges: impl IntoIterator<Item = Vec<u32>>) -> Result<Self, GraphError> {
        let mut list: Vec<Vec<u32>> = Vec::new();
        for mut e in edges {
            e.sort_unstable();
            Self::check_edge(r, n, &e)?;
            list.push(e);
        }
        list.sort_unstable();
        list.dedup();
        Ok(Self::from_sorted(r, n, list.concat(), None))
    }

    fn check_edge(r: usize, n: usize, e: &[u32]) -> Result<(), GraphError> {
        let bad = |msg: &str| GraphError::InvalidEdge { edge: e.to_vec(), msg: msg.into() };
        if e.len() != r {
            return Err(bad(&format!("expected {r} vertices")));
        }
        if e.windows(2).any(|w| w[0] == w[1]) {
            return Err(bad("repeated vertex"));
        }
        if e.iter().any(|&v| v as usize >= n) {
            return Err(bad(&format!("vertex out of range 0..{n}")));
        }
        Ok(())
    }

    fn from_sorted(r: usize, n: usize, edges: Vec<u32>, labels: Option<Vec<u64>>) -> Self {
        let mut incidence = vec![Vec::new(); n];
        for (i, e) in edges.chunks(r).enumerate() {
            for &v in e {
                incidence[v as usize].push(i as u32);
            }
        }
        Hypergraph { r, n, edges, incidence, labels }
    }

    pub fn empty(r: usize, n: usize) -> Self {
        Self::from_sorted(r, n, Vec::new(), None)
    }

    /// The complete `r`-uniform hypergraph on `n` vertices.
    pub fn complete(r: usize, n: usize) -> Self {
        let mut edges = Vec::new();
        for_each_combination(n, r, |c| edges.extend_from_slice(c));
        Self::from_sorted(r, n, edges, None)
    }

    /// The complete `r`-partite hypergraph with the given part sizes; part `i`
    /// occupies a contiguous id range.
    pub fn complete_partite(parts: &[usize]) -> Self {
        let r = parts.len();
        let mut starts = Vec::with_capacity(r);
        let mut n = 0;
        for &p in parts {
            starts.push(n);
            n += p;
        }
        let mut edges = Vec::new();
        let mut idx = vec![0usize; r];
        if parts.iter().all(|&p| p > 0) {
            'outer: loop {
                edges.extend(idx.iter().zip(&starts).map(|(i, s)| (i + s) as u32));
                for j in (0..r).rev() {
                    idx[j] += 1;
                    if idx[j] < parts[j] {
                        continue 'outer;
                    }
                    idx[j] = 0;
                }
                break;
            }
        }
        // Lexicographic order of the index vector is lexicographic order of the tuples.
        Self::from_sorted(r, n, edges, None)
    }

    pub fn with_labels(mut self, labels: Vec<u64>) -> Self {
        assert_eq!(labels.len(), self.n);
        self.labels = Some(labels);
        self
    }

    pub fn uniformity(&self) -> usize {
        self.r
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len() / self.r.max(1)
    }

    pub fn edges(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.edges.chunks(self.r)
    }

    pub fn edge(&self, i: usize) -> &[u32] {
        &self.edges[i * self.r..(i + 1) * self.r]
    }

    /// Indices of the edges containing `v`.
    pub fn incident(&self, v: u32) -> &[u32] {
        &self.incidence[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.incidence[v as usize].len()
    }

    pub fn label(&self, v: u32) -> Option<u64> {
        self.labels.as_ref().map(|l| l[v as usize])
    }

    pub fn labels(&self) -> Option<&[u64]> {
        self.labels.as_deref()
    }

    /// Membership test for an ascending tuple.
    pub fn has_sorted_edge(&self, tuple: &[u32]) -> bool {
        let (mut lo, mut hi) = (0usize, self.edge_count());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.edge(mid).cmp(tuple) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn has_edge(&self, vertices: &[u32]) -> bool {
        let mut t = vertices.to_vec();
        t.sort_unstable();
        t.len() == self.r && self.has_sorted_edge(&t)
    }

    /// Deletes the given vertices and their edges. Survivors are renumbered
    /// densely in increasing order and keep their labels; unlabeled graphs
    /// get their old ids as labels.
    pub fn remove_vertices(&self, removed: &BTreeSet<u32>) -> Hypergraph {
        let mut map = vec![u32::MAX; self.n];
        let mut labels = Vec::with_capacity(self.n - removed.len().min(self.n));
        let mut next = 0u32;
        for v in 0..self.n as u32 {
            if !removed.contains(&v) {
                map[v as usize] = next;
                labels.push(self.label(v).unwrap_or(v as u64));
                next += 1;
            }
        }
        let mut edges = Vec::with_capacity(self.edges.len());
        for e in self.edges() {
            if e.iter().all(|&v| map[v as usize] != u32::MAX) {
                // the relabeling is monotone, so tuples stay ascending and sorted
                edges.extend(e.iter().map(|&v| map[v as usize]));
            }
        }
        Self::from_sorted(self.r, next as usize, edges, Some(labels))
    }

    /// Text form: `r n m`, then `m` lines of `r` ascending vertex ids.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {}", self.r, self.n, self.edge_count());
        for e in self.edges() {
            let ids: Vec<String> = e.iter().map(u32::to_string).collect();
            let _ = writeln!(s, "{}", ids.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, GraphError> {
        let err = |line: usize, msg: String| GraphError::Parse { line, msg };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines.next().ok_or_else(|| err(1, "missing header `r n m`".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<_, _>>()
            .map_err(|_| err(ln, "header must be three integers `r n m`".into()))?;
        let [r, n, m] = nums[..] else {
            return Err(err(ln, "header must be three integers `r n m`".into()));
        };
        if r == 0 {
            return Err(err(ln, "uniformity must be positive".into()));
        }
        if n > u32::MAX as usize {
            return Err(err(ln, "vertex count too large".into()));
        }
        let mut edges = Vec::with_capacity(m * r);
        let mut prev: Option<Vec<u32>> = None;
        let mut seen = 0;
        for (ln, line) in lines {
            if seen == m {
                return Err(err(ln, format!("more than the declared {m} edges")));
            }
            let e: Vec<u32> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<Result<_, _>>()
                .map_err(|_| err(ln, "edge ids must be non-negative integers".into()))?;
            if e.len() != r {
                return Err(err(ln, format!("expected {r} ids, found {}", e.len())));
            }
            if e.windows(2).any(|w| w[0] >= w[1]) {
                return Err(err(ln, "ids must be strictly ascending".into()));
            }
            if let Some(&v) = e.iter().find(|&&v| v as usize >= n) {
                return Err(err(ln, format!("vertex {v} out of range 0..{n}")));
            }
            if let Some(p) = &prev {
                if *p >= e {
                    return Err(err(ln, "edges must be sorted and distinct".into()));
                }
            }
            edges.extend_from_slice(&e);
            prev = Some(e);
            seen += 1;
        }
        if seen != m {
            return Err(err(0, format!("declared {m} edges, found {seen}")));
        }
        Ok(Self::from_sorted(r, n, edges, None))
    }
}

/// Calls `f` on every ascending `k`-subset of `0..n`, in lexicographic order.
pub fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[u32])) {
    if k > n {
        return;
    }
    let mut c: Vec<u32> = (0..k as u32).collect();
    loop {
        f(&c);
        let Some(i) = (0..k).rev().find(|&i| (c[i] as usize) < n - k + i) else {
            return;
        };
        c[i] += 1;
        for j in i + 1..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// The target subhypergraph `H`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Pattern {
    General { r: usize, v: usize, edges: Vec<Vec<u32>> },
    CompleteRPartite { parts: Vec<usize> },
}

impl Pattern {
    pub fn general(r: usize, v: usize, edges: Vec<Vec<u32>>) -> Result<Self, GraphError> {
        let mut edges: Vec<Vec<u32>> = edges
            .into_iter()
            .map(|mut e| {
                e.sort_unstable();
                e
            })
            .collect();
        for e in &edges {
            Hypergraph::check_edge(r, v, e)?;
        }
        edges.sort_unstable();
        edges.dedup();
        Ok(Pattern::General { r, v, edges })
    }

    pub fn complete_partite(parts: Vec<usize>) -> Result<Self, GraphError> {
        if parts.len() < 2 || parts.iter().any(|&a| a == 0) {
            return Err(GraphError::InvalidPattern(format!("complete partite parts {parts:?}")));
        }
        Ok(Pattern::CompleteRPartite { parts })
    }

    /// A single `r`-edge.
    pub fn edge(r: usize) -> Self {
        Pattern::General { r, v: r, edges: vec![(0..r as u32).collect()] }
    }

    /// The complete `r`-uniform hypergraph on `m` vertices.
    pub fn clique(r: usize, m: usize) -> Self {
        let mut edges = Vec::new();
        for_each_combination(m, r, |c| edges.push(c.to_vec()));
        Pattern::General { r, v: m, edges }
    }

    /// The graph path on `v` vertices.
    pub fn path(v: usize) -> Self {
        let edges = (1..v as u32).map(|i| vec![i - 1, i]).collect();
        Pattern::General { r: 2, v, edges }
    }

    /// Parses `edge`, `K<m>`, `K<a>,<b>,...` (one part per block), `P<v>`, or
    /// the canonical `general:` form. `r` is the default uniformity.
    pub fn parse(s: &str, r: usize) -> Result<Self, GraphError> {
        let bad = || GraphError::InvalidPattern(format!("cannot parse pattern `{s}`"));
        let s = s.trim();
        if s == "edge" {
            return Ok(Pattern::edge(r));
        }
        if let Some(rest) = s.strip_prefix("general:") {
            return Self::parse_general(rest).ok_or_else(bad);
        }
        if let Some(rest) = s.strip_prefix('P') {
            let v: usize = rest.parse().map_err(|_| bad())?;
            if r != 2 || v < 2 {
                return Err(bad());
            }
            return Ok(Pattern::path(v));
        }
        if let Some(rest) = s.strip_prefix('K') {
            let nums: Vec<usize> = rest.split(',').map(str::parse).collect::<Result<_, _>>().map_err(|_| bad())?;
            return match nums[..] {
                [m] if m >= r => Ok(Pattern::clique(r, m)),
                [_] => Err(bad()),
                _ if nums.len() == r => Pattern::complete_partite(nums),
                _ => Err(GraphError::InvalidPattern(format!(
                    "`{s}` has {} parts but the uniformity is {r}",
                    nums.len()
                ))),
            };
        }
        Err(bad())
    }

    fn parse_general(rest: &str) -> Option<Self> {
        let mut r = None;
        let mut v = None;
        let mut edges = Vec::new();
        for part in rest.split(';') {
            let (k, val) = part.split_once('=')?;
            match k {
                "r" => r = val.parse().ok(),
                "v" => v = val.parse().ok(),
                "edges" if !val.is_empty() => {
                    for e in val.split(',') {
                        edges.push(e.split('-').map(str::parse).collect::<Result<Vec<u32>, _>>().ok()?);
                    }
                }
                "edges" => {}
                _ => return None,
            }
        }
        Pattern::general(r?, v?, edges).ok()
    }

    /// Stable text form, also used as a cache key.
    pub fn canonical(&self) -> String {
        match self {
            Pattern::General { r, v, edges } => {
                let es: Vec<String> = edges
                    .iter()
                    .map(|e| e.iter().map(u32::to_string).collect::<Vec<_>>().join("-"))
                    .collect();
                format!("general:r={r};v={v};edges={}", es.join(","))
            }
            Pattern::CompleteRPartite { parts } => format!(
                "K{}",
                parts.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
            ),
        }
    }

    pub fn uniformity(&self) -> usize {
        match self {
            Pattern::General { r, .. } => *r,
            Pattern::CompleteRPartite { parts } => parts.len(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Pattern::General { v, .. } => *v,
            Pattern::CompleteRPartite { parts } => parts.iter().sum(),
        }
    }

    pub fn edge_count(&self) -> usize {
        match self {
            Pattern::General { edges, .. } => edges.len(),
            Pattern::CompleteRPartite { parts } => parts.iter().product(),
        }
    }

    /// Explicit edge list; complete partite patterns put part `i` on a
    /// contiguous id range.
    pub fn edge_list(&self) -> Vec<Vec<u32>> {
        match self {
            Pattern::General { edges, .. } => edges.clone(),
            Pattern::CompleteRPartite { parts } => {
                Hypergraph::complete_partite(parts).edges().map(<[u32]>::to_vec).collect()
            }
        }
    }

    /// `gamma = beta_1! ... beta_l!`, where `beta_j` counts parts of equal size.
    /// Only meaningful for complete partite patterns.
    pub fn gamma(&self) -> Option<u64> {
        let Pattern::CompleteRPartite { parts } = self else {
            return None;
        };
        let mut sorted = parts.clone();
        sorted.sort_unstable();
        let mut gamma = 1;
        let mut run = 1;
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                run += 1;
            } else {
                gamma *= factorial(run);
                run = 1;
            }
        }
        Some(gamma * factorial(run))
    }

    /// Order of the automorphism group. Complete partite patterns use
    /// `prod a_i! * gamma`; general ones are brute-forced over all `v!` maps.
    pub fn automorphism_count(&self) -> Result<u64, GraphError> {
        match self {
            Pattern::CompleteRPartite { parts } => {
                Ok(parts.iter().map(|&a| factorial(a as u64)).product::<u64>() * self.gamma().unwrap())
            }
            Pattern::General { v, edges, .. } => brute_force_automorphisms(*v, edges),
        }
    }
}

/// Counts vertex permutations mapping the edge set onto itself.
pub fn brute_force_automorphisms(v: usize, edges: &[Vec<u32>]) -> Result<u64, GraphError> {
    if v > MAX_PATTERN_VERTICES {
        return Err(GraphError::PatternTooLarge { v });
    }
    let set: HashSet<Vec<u32>> = edges.iter().cloned().collect();
    let mut perm: Vec<u32> = (0..v as u32).collect();
    let mut count = 0u64;
    let is_aut = |p: &[u32]| {
        edges.iter().all(|e| {
            let mut img: Vec<u32> = e.iter().map(|&x| p[x as usize]).collect();
            img.sort_unstable();
            set.contains(&img)
        })
    };
    // Heap's algorithm
    let mut c = vec![0usize; v];
    if is_aut(&perm) {
        count += 1;
    }
    let mut i = 0;
    while i < v {
        if c[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(c[i], i);
            }
            if is_aut(&perm) {
                count += 1;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    Ok(count)
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct PatternCount {
    pub labeled_embeddings: u64,
    pub automorphisms: u64,
    pub unordered_copies: u64,
    /// Ordered tuples `(A_1, ..., A_r)` of parts, `gamma * unordered_copies`;
    /// complete partite patterns only.
    pub ordered_tuples: Option<u64>,
}

struct EmbeddingPlan {
    order: Vec<usize>,
    /// Edges (as pattern vertex lists) fully assigned once position `k` is placed.
    closing: Vec<Vec<Vec<usize>>>,
    /// An earlier-positioned vertex sharing an edge with position `k`.
    anchor: Vec<Option<usize>>,
}

impl EmbeddingPlan {
    fn new(v: usize, edges: &[Vec<u32>]) -> Self {
        let mut deg = vec![0usize; v];
        for e in edges {
            for &x in e {
                deg[x as usize] += 1;
            }
        }
        let mut order: Vec<usize> = (0..v).collect();
        order.sort_by(|&a, &b| deg[b].cmp(&deg[a]).then(a.cmp(&b)));
        let mut pos = vec![0usize; v];
        for (k, &h) in order.iter().enumerate() {
            pos[h] = k;
        }
        let mut closing = vec![Vec::new(); v];
        let mut anchor = vec![None; v];
        for e in edges {
            let last = e.iter().map(|&x| pos[x as usize]).max().unwrap();
            closing[last].push(e.iter().map(|&x| x as usize).collect());
            for &x in e {
                let k = pos[x as usize];
                if let Some(earliest) = e.iter().map(|&y| pos[y as usize]).filter(|&p| p < k).min() {
                    if anchor[k].map_or(true, |a| earliest < pos[a]) {
                        anchor[k] = Some(order[earliest]);
                    }
                }
            }
        }
        EmbeddingPlan { order, closing, anchor }
    }
}

fn extend_embedding(g: &Hypergraph, plan: &EmbeddingPlan, k: usize, img: &mut [u32], used: &mut [bool]) -> u64 {
    if k == plan.order.len() {
        return 1;
    }
    let h = plan.order[k];
    let candidates: Vec<u32> = match plan.anchor[k] {
        Some(a) => {
            let mut c: Vec<u32> =
                g.incident(img[a]).iter().flat_map(|&e| g.edge(e as usize).iter().copied()).collect();
            c.sort_unstable();
            c.dedup();
            c
        }
        None => (0..g.vertex_count() as u32).collect(),
    };
    let mut total = 0;
    let mut tuple = Vec::with_capacity(g.uniformity());
    for x in candidates {
        if used[x as usize] {
            continue;
        }
        img[h] = x;
        let ok = plan.closing[k].iter().all(|e| {
            tuple.clear();
            tuple.extend(e.iter().map(|&y| img[y]));
            tuple.sort_unstable();
            g.has_sorted_edge(&tuple)
        });
        if ok {
            used[x as usize] = true;
            total += extend_embedding(g, plan, k + 1, img, used);
            used[x as usize] = false;
        }
    }
    total
}

/// Number of injective vertex maps sending every pattern edge to a host edge.
pub fn count_embeddings(g: &Hypergraph, v: usize, edges: &[Vec<u32>]) -> u64 {
    if v == 0 {
        return 1;
    }
    if v > g.vertex_count() {
        return 0;
    }
    let plan = EmbeddingPlan::new(v, edges);
    // anchor of position 0 is always None: partition on its image
    (0..g.vertex_count() as u32)
        .into_par_iter()
        .map(|x0| {
            let mut img = vec![0u32; v];
            let mut used = vec![false; g.vertex_count()];
            img[plan.order[0]] = x0;
            let ok = plan.closing[0].is_empty();
            debug_assert!(ok || g.uniformity() == 1);
            used[x0 as usize] = true;
            extend_embedding(g, &plan, 1, &mut img, &mut used)
        })
        .sum()
}

pub fn count_pattern(g: &Hypergraph, h: &Pattern) -> Result<PatternCount, GraphError> {
    if h.uniformity() != g.uniformity() {
        return Err(GraphError::UniformityMismatch { pattern: h.uniformity(), host: g.uniformity() });
    }
    let v = h.vertex_count();
    if v > MAX_PATTERN_VERTICES {
        return Err(GraphError::PatternTooLarge { v });
    }
    let labeled = count_embeddings(g, v, &h.edge_list());
    let automorphisms = h.automorphism_count()?;
    debug_assert_eq!(labeled % automorphisms, 0);
    let unordered = labeled / automorphisms;
    Ok(PatternCount {
        labeled_embeddings: labeled,
        automorphisms,
        unordered_copies: unordered,
        ordered_tuples: h.gamma().map(|gamma| gamma * unordered),
    })
}

/// Vertices `w^i_j` split into `r - 1` groups of sizes `s_1 <= ... <= s_{r-1}`.
///
/// Canonical form: ascending within each group, and consecutive groups of
/// equal size ordered by their leading vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct GroupedSequence {
    groups: Vec<Vec<u32>>,
}

impl GroupedSequence {
    pub fn new(mut groups: Vec<Vec<u32>>) -> Result<Self, GraphError> {
        if groups.is_empty() || groups.iter().any(Vec::is_empty) {
            return Err(GraphError::InvalidSequence("groups must be nonempty".into()));
        }
        if groups.windows(2).any(|w| w[0].len() > w[1].len()) {
            return Err(GraphError::InvalidSequence("group sizes must be ascending".into()));
        }
        for g in groups.iter_mut() {
            g.sort_unstable();
        }
        let mut all: Vec<u32> = groups.concat();
        all.sort_unstable();
        if all.windows(2).any(|w| w[0] == w[1]) {
            return Err(GraphError::InvalidSequence("vertices must be distinct".into()));
        }
        // stable sort by size then leading vertex keeps the size order
        groups.sort_by(|a, b| a.len().cmp(&b.len()).then(a[0].cmp(&b[0])));
        Ok(GroupedSequence { groups })
    }

    pub fn groups(&self) -> &[Vec<u32>] {
        &self.groups
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn vertices(&self) -> impl Iterator<Item = u32> + '_ {
        self.groups.iter().flatten().copied()
    }

    pub fn contains(&self, v: u32) -> bool {
        self.groups.iter().any(|g| g.contains(&v))
    }

    /// The smallest vertex id in the sequence.
    pub fn min_vertex(&self) -> u32 {
        self.vertices().min().unwrap()
    }

    /// All transversals `(w^1_{j_1}, ..., w^{r-1}_{j_{r-1}})`, `prod s_i` of them.
    pub fn transversals(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new()];
        for g in &self.groups {
            out = out
                .into_iter()
                .flat_map(|t| {
                    g.iter().map(move |&x| {
                        let mut t = t.clone();
                        t.push(x);
                        t
                    })
                })
                .collect();
        }
        out
    }
}

/// The vertices completing every transversal of a grouped sequence to an edge.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ExtensionSet {
    pub sequence: GroupedSequence,
    pub members: Vec<u32>,
}

impl ExtensionSet {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

fn validate_sequence(g: &Hypergraph, seq: &GroupedSequence) -> Result<(), GraphError> {
    if seq.groups.len() + 1 != g.uniformity() {
        return Err(GraphError::InvalidSequence(format!(
            "{} groups for a {}-uniform hypergraph",
            seq.groups.len(),
            g.uniformity()
        )));
    }
    if let Some(v) = seq.vertices().find(|&v| v as usize >= g.vertex_count()) {
        return Err(GraphError::InvalidSequence(format!("vertex {v} out of range")));
    }
    Ok(())
}

fn extension_members(g: &Hypergraph, seq: &GroupedSequence) -> Vec<u32> {
    let trans = seq.transversals();
    let first = &trans[0];
    let pivot = *first.iter().min_by_key(|&&v| g.degree(v)).unwrap();
    let mut first_sorted = first.clone();
    first_sorted.sort_unstable();
    let mut candidates = Vec::new();
    for &ei in g.incident(pivot) {
        let e = g.edge(ei as usize);
        // e contains every vertex of `first` plus exactly one other
        if first_sorted.iter().all(|v| e.binary_search(v).is_ok()) {
            let x = *e.iter().find(|v| first_sorted.binary_search(v).is_err()).unwrap();
            if !seq.contains(x) {
                candidates.push(x);
            }
        }
    }
    candidates.sort_unstable();
    let mut tuple = Vec::with_capacity(g.uniformity());
    candidates.retain(|&x| {
        trans[1..].iter().all(|t| {
            tuple.clear();
            tuple.extend_from_slice(t);
            tuple.push(x);
            tuple.sort_unstable();
            g.has_sorted_edge(&tuple)
        })
    });
    candidates
}

/// Adjacency route: intersects the completions of every transversal.
pub fn extension_set(g: &Hypergraph, seq: &GroupedSequence) -> Result<ExtensionSet, GraphError> {
    validate_sequence(g, seq)?;
    Ok(ExtensionSet { sequence: seq.clone(), members: extension_members(g, seq) })
}

/// Number of canonical grouped sequences with the given sizes on `n` vertices.
pub fn canonical_sequence_count(n: usize, sizes: &[usize]) -> u128 {
    let mut left = n as u128;
    let mut total: u128 = 1;
    for &s in sizes {
        total = total.saturating_mul(binomial(left, s as u128));
        left = left.saturating_sub(s as u128);
    }
    let mut i = 0;
    while i < sizes.len() {
        let j = (i..sizes.len()).take_while(|&j| sizes[j] == sizes[i]).count();
        total /= factorial(j as u64) as u128;
        i += j;
    }
    total
}

pub(crate) fn check_sizes(sizes: &[usize]) -> Result<(), GraphError> {
    if sizes.is_empty() || sizes.contains(&0) || sizes.windows(2).any(|w| w[0] > w[1]) {
        return Err(GraphError::InvalidSequence(format!("sizes {sizes:?} must be positive and ascending")));
    }
    Ok(())
}

/// Visits every canonical sequence whose first group starts at `lead`, in
/// lexicographic order; stops early when `f` returns `Some`.
pub fn scan_sequences_from<T>(
    n: usize,
    sizes: &[usize],
    lead: u32,
    f: &mut impl FnMut(&GroupedSequence) -> Option<T>,
) -> Option<T> {
    fn rec<T>(
        n: u32,
        sizes: &[usize],
        groups: &mut Vec<Vec<u32>>,
        used: &mut [bool],
        f: &mut impl FnMut(&GroupedSequence) -> Option<T>,
    ) -> Option<T> {
        let g = groups.len() - 1;
        if groups[g].len() == sizes[g] {
            if g + 1 == sizes.len() {
                let seq = GroupedSequence { groups: groups.clone() };
                return f(&seq);
            }
            // open the next group; equal-size groups need an increasing leader
            let min_lead = if sizes[g + 1] == sizes[g] { groups[g][0] + 1 } else { 0 };
            for x in min_lead..n {
                if used[x as usize] {
                    continue;
                }
                used[x as usize] = true;
                groups.push(vec![x]);
                let out = rec(n, sizes, groups, used, f);
                groups.pop();
                used[x as usize] = false;
                if out.is_some() {
                    return out;
                }
            }
            return None;
        }
        let start = *groups[g].last().unwrap() + 1;
        for x in start..n {
            if used[x as usize] {
                continue;
            }
            used[x as usize] = true;
            groups[g].push(x);
            let out = rec(n, sizes, groups, used, f);
            groups[g].pop();
            used[x as usize] = false;
            if out.is_some() {
                return out;
            }
        }
        None
    }
    let mut used = vec![false; n];
    used[lead as usize] = true;
    let mut groups = vec![vec![lead]];
    rec(n as u32, sizes, &mut groups, &mut used, f)
}

/// A copy of `K^{(r)}_{s_1,...,s_{r-1},p}`: a grouped sequence and `p`
/// vertices completing all its transversals.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ForbiddenWitness {
    pub sequence: GroupedSequence,
    pub tail: Vec<u32>,
}

/// Searches for `K^{(r)}_{s_1,...,s_{r-1},p}`: some canonical grouped sequence
/// whose extension set has at least `p` members. Returns the first witness in
/// canonical order.
pub fn find_forbidden(
    g: &Hypergraph,
    sizes: &[usize],
    p: usize,
    budget: u128,
) -> Result<Option<ForbiddenWitness>, GraphError> {
    check_sizes(sizes)?;
    if sizes.len() + 1 != g.uniformity() {
        return Err(GraphError::InvalidSequence(format!(
            "{} part sizes for a {}-uniform hypergraph",
            sizes.len(),
            g.uniformity()
        )));
    }
    if p == 0 {
        return Err(GraphError::InvalidSequence("tail size must be positive".into()));
    }
    let estimate = canonical_sequence_count(g.vertex_count(), sizes);
    if estimate > budget {
        return Err(GraphError::ScanBudgetExceeded { estimate, cap: budget });
    }
    Ok((0..g.vertex_count() as u32).into_par_iter().find_map_first(|lead| {
        scan_sequences_from(g.vertex_count(), sizes, lead, &mut |seq| {
            let members = extension_members(g, seq);
            (members.len() >= p).then(|| ForbiddenWitness { sequence: seq.clone(), tail: members[..p].to_vec() })
        })
    }))
}

/// Caps for [`build_from_polynomial`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct BuildCaps {
    pub max_vertices: u64,
    pub max_edge_scan: u128,
}

impl Default for BuildCaps {
    fn default() -> Self {
        BuildCaps { max_vertices: 1 << 14, max_edge_scan: 1 << 28 }
    }
}

/// The zero-set hypergraph `G_f` on `F_q^b`: `{u^1, ..., u^r}` is an edge iff
/// `f(u^1, ..., u^r) = 0`. Vertex `i` is the point with encoding `i`.
pub fn build_from_polynomial(f: &BlockPolynomial, caps: BuildCaps) -> Result<Hypergraph, GraphError> {
    if !f.is_symmetric() {
        return Err(GraphError::NotSymmetric);
    }
    let shape = f.shape();
    let ctx = f.ctx();
    let n = (ctx.order() as u128).saturating_pow(shape.b as u32);
    if n > caps.max_vertices as u128 {
        return Err(GraphError::TooLarge { what: "vertex count q^b", estimate: n, cap: caps.max_vertices as u128 });
    }
    let scan = binomial(n, shape.r as u128);
    if scan > caps.max_edge_scan {
        return Err(GraphError::TooLarge { what: "edge scan C(q^b, r)", estimate: scan, cap: caps.max_edge_scan });
    }
    let n = n as usize;
    let points = all_points(ctx, shape.b);
    let vals: Vec<Vec<Fe>> = points.iter().map(|p| f.monomial_values(p)).collect();
    let r = shape.r;

    fn rec(
        f: &BlockPolynomial,
        vals: &[Vec<Fe>],
        tensor: &[Fe],
        tuple: &mut Vec<u32>,
        r: usize,
        out: &mut Vec<u32>,
    ) {
        let start = *tuple.last().unwrap() as usize + 1;
        if tuple.len() == r - 1 {
            for (x, v) in vals.iter().enumerate().skip(start) {
                if f.ctx().dot(tensor, v).is_zero() {
                    out.extend_from_slice(tuple);
                    out.push(x as u32);
                }
            }
            return;
        }
        for (x, v) in vals.iter().enumerate().skip(start) {
            let next = f.contract(tensor, v);
            tuple.push(x as u32);
            rec(f, vals, &next, tuple, r, out);
            tuple.pop();
        }
    }

    let chunks: Vec<Vec<u32>> = (0..n)
        .into_par_iter()
        .map(|x0| {
            let mut out = Vec::new();
            let tensor = f.restrict_values(&[&vals[x0]]);
            rec(f, &vals, &tensor, &mut vec![x0 as u32], r, &mut out);
            out
        })
        .collect();
    let labels = (0..n as u64).collect();
    Ok(Hypergraph::from_sorted(r, n, chunks.concat(), Some(labels)))
}

/// Decodes a vertex label back into its field point.
pub fn label_point(f: &BlockPolynomial, label: u64) -> PointBlock {
    PointBlock::decode(f.ctx(), f.shape().b, label)
}
