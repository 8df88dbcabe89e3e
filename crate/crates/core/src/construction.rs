//! The deletion pipeline: sample `f`, build `G_f`, delete one vertex from
//! every bad sequence, and certify that `G'` avoids
//! `K^{(r)}_{s_1,...,s_{r-1},p}`.

use std::collections::BTreeSet;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::field::{Fe, FieldCtx, FieldError};
use crate::hypergraph::{
    binomial, build_from_polynomial, canonical_sequence_count, check_sizes, count_pattern, extension_set,
    find_forbidden, scan_sequences_from, BuildCaps, ForbiddenWitness, GraphError, GroupedSequence, Hypergraph,
    Pattern, PatternCount,
};
use crate::poly::{all_points, enumerate_orbit_basis, BlockPolynomial, BlockShape, PolyError};
use crate::rng;

#[derive(Debug, Error)]
pub enum ConstructionError {
    #[error("invalid part sizes: {0}")]
    InvalidSizes(String),
    #[error("invalid pattern: {0}")]
    InvalidPattern(String),
    #[error("lemma guard failed: {0}")]
    GuardViolated(String),
    #[error("budget exceeded at stage `{stage}`: estimate {estimate} > cap {cap}")]
    BudgetExceeded { stage: &'static str, estimate: u128, cap: u128 },
    #[error("certificate failed: forbidden copy survived deletion ({0:?})")]
    CertificateFailed(ForbiddenWitness),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

impl ConstructionError {
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            ConstructionError::BudgetExceeded { .. }
                | ConstructionError::Poly(PolyError::BasisTooLarge { .. })
                | ConstructionError::Graph(GraphError::TooLarge { .. } | GraphError::ScanBudgetExceeded { .. })
        )
    }
}

/// Samples drawn when estimating the threshold `c`. The estimate is the
/// maximum of a light-tailed sample, so small samples bias it low.
pub const DEFAULT_ESTIMATE_SAMPLES: usize = 10_000;

/// Resource caps, checked against cost estimates before any work starts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    pub max_vertices: u64,
    pub max_edge_scan: u128,
    pub max_sequence_scan: u128,
    pub max_basis: u128,
    pub max_evaluations: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_vertices: 1 << 14,
            max_edge_scan: 1 << 28,
            max_sequence_scan: 1 << 26,
            max_basis: 1 << 22,
            max_evaluations: 1 << 34,
        }
    }
}

impl Budget {
    pub fn check(stage: &'static str, estimate: u128, cap: u128) -> Result<(), ConstructionError> {
        if estimate > cap {
            Err(ConstructionError::BudgetExceeded { stage, estimate, cap })
        } else {
            Ok(())
        }
    }

    pub fn build_caps(&self) -> BuildCaps {
        BuildCaps { max_vertices: self.max_vertices, max_edge_scan: self.max_edge_scan }
    }
}

/// How the bad-sequence threshold `c` is obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Threshold {
    /// Supplied by the caller.
    Configured { c: usize },
    /// To be estimated by a dichotomy scan at field order `q`.
    Estimate { q: u64, samples: usize, seed: u64 },
    /// Result of such a scan.
    Estimated { c: usize, q: u64, samples: usize, seed: u64 },
}

impl Threshold {
    pub fn value(&self) -> Option<usize> {
        match *self {
            Threshold::Configured { c } | Threshold::Estimated { c, .. } => Some(c),
            Threshold::Estimate { .. } => None,
        }
    }

    pub fn mode(&self) -> &'static str {
        match self {
            Threshold::Configured { .. } => "configured",
            Threshold::Estimate { .. } => "pending-estimate",
            Threshold::Estimated { .. } => "estimated",
        }
    }
}

/// Optional inputs to [`derive_params`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Overrides {
    pub degree: Option<u32>,
    pub bad_threshold: Option<usize>,
    pub tail_size: Option<usize>,
    /// Field order for the threshold scan; defaults to `max(q, 49)`.
    pub estimate_q: Option<u64>,
    pub estimate_samples: Option<usize>,
    pub estimate_seed: Option<u64>,
    /// Turn failed lemma guards into errors instead of warnings.
    pub full_fidelity: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionParams {
    pub r: usize,
    pub part_sizes: Vec<usize>,
    pub pattern: Pattern,
    pub v: usize,
    pub e: usize,
    pub b: usize,
    pub t: usize,
    pub s: usize,
    pub degree: u32,
    pub p: u64,
    pub k: u32,
    pub q: u64,
    pub threshold: Threshold,
    pub tail_size: Option<usize>,
    pub full_fidelity: bool,
    pub warnings: Vec<String>,
}

pub fn derive_params(
    part_sizes: &[usize],
    pattern: &Pattern,
    (p, k): (u64, u32),
    overrides: &Overrides,
) -> Result<ConstructionParams, ConstructionError> {
    check_sizes(part_sizes).map_err(|e| ConstructionError::InvalidSizes(e.to_string()))?;
    let r = part_sizes.len() + 1;
    if pattern.uniformity() != r {
        return Err(ConstructionError::InvalidPattern(format!(
            "pattern `{}` is {}-uniform, sizes {part_sizes:?} need {r}",
            pattern.canonical(),
            pattern.uniformity()
        )));
    }
    let ctx = FieldCtx::new(p, k)?;
    let q = ctx.order();
    let b: usize = part_sizes.iter().product();
    let t: usize = part_sizes.iter().sum();
    let (v, e) = (pattern.vertex_count(), pattern.edge_count());
    let s = b * (t - 1) + e + 1;
    let default_degree = (b * s) as u32;
    let degree = overrides.degree.unwrap_or(default_degree);

    let mut warnings = Vec::new();
    if degree < default_degree {
        warnings.push(format!("degree {degree} is below b*s = {default_degree}"));
    }
    let guards = [
        (binomial(e as u128, 2) < q as u128, format!("C(e,2) = {} < q = {q}", binomial(e as u128, 2))),
        (binomial(v as u128, 2) < q as u128, format!("C(v,2) = {} < q = {q}", binomial(v as u128, 2))),
        (e < b * s, format!("e = {e} < b*s = {}", b * s)),
    ];
    for (ok, what) in guards {
        if !ok {
            if overrides.full_fidelity {
                return Err(ConstructionError::GuardViolated(what));
            }
            warnings.push(format!("guard fails: {what}"));
        }
    }

    let threshold = match overrides.bad_threshold {
        Some(0) => return Err(ConstructionError::InvalidSizes("bad threshold must be positive".into())),
        Some(c) => Threshold::Configured { c },
        None => Threshold::Estimate {
            q: overrides.estimate_q.unwrap_or(q.max(49)),
            samples: overrides.estimate_samples.unwrap_or(DEFAULT_ESTIMATE_SAMPLES),
            seed: overrides.estimate_seed.unwrap_or(0),
        },
    };
    if let (Some(tail), Some(c)) = (overrides.tail_size, threshold.value()) {
        if tail < c {
            return Err(ConstructionError::InvalidSizes(format!("tail size {tail} is below the threshold {c}")));
        }
    }
    Ok(ConstructionParams {
        r,
        part_sizes: part_sizes.to_vec(),
        pattern: pattern.clone(),
        v,
        e,
        b,
        t,
        s,
        degree,
        p,
        k,
        q,
        threshold,
        tail_size: overrides.tail_size,
        full_fidelity: overrides.full_fidelity,
        warnings,
    })
}

impl ConstructionParams {
    pub fn shape(&self) -> Result<BlockShape, ConstructionError> {
        Ok(BlockShape::new(self.r, self.b, self.degree)?)
    }

    pub fn field(&self) -> Result<Arc<FieldCtx>, ConstructionError> {
        Ok(Arc::new(FieldCtx::new(self.p, self.k)?))
    }

    /// Number of vertices `N = q^b`.
    pub fn vertex_count(&self) -> u128 {
        (self.q as u128).saturating_pow(self.b as u32)
    }

    /// The same parameters over another field order.
    pub fn with_order(&self, q: u64) -> Result<Self, ConstructionError> {
        let ctx = FieldCtx::with_order(q)?;
        let mut out = self.clone();
        out.p = ctx.characteristic();
        out.k = ctx.degree();
        out.q = q;
        Ok(out)
    }

    pub fn with_threshold(&self, c: usize) -> Self {
        let mut out = self.clone();
        out.threshold = Threshold::Configured { c };
        out
    }

    /// Runs the pending dichotomy scan, if any, so the threshold has a value.
    pub fn resolved(&self, budget: &Budget) -> Result<Self, ConstructionError> {
        let Threshold::Estimate { q, samples, seed } = self.threshold else {
            return Ok(self.clone());
        };
        let scan = self.with_order(q)?;
        let report = crate::analysis::dichotomy_scan(&scan, samples, seed, budget, &FSource::Random)?;
        let mut out = self.clone();
        out.threshold = Threshold::Estimated { c: report.c_est, q, samples, seed };
        Ok(out)
    }

    pub fn bad_threshold(&self) -> Option<usize> {
        self.threshold.value()
    }

    /// `p` of the forbidden `K^{(r)}_{s_1,...,s_{r-1},p}`; defaults to `c`.
    pub fn tail(&self) -> Option<usize> {
        self.tail_size.or(self.bad_threshold())
    }
}

/// Where `f` comes from. Only `Random` corresponds to the construction; the
/// others force degenerate cases.
#[derive(Debug, Clone)]
pub enum FSource {
    Random,
    Fixed(BlockPolynomial),
    Constant(Fe),
}

/// Samples or fetches `f` for one stage/index pair.
pub fn draw_polynomial(
    params: &ConstructionParams,
    source: &FSource,
    seed: u64,
    stage: &str,
    index: u64,
    budget: &Budget,
) -> Result<BlockPolynomial, ConstructionError> {
    let shape = params.shape()?;
    let ctx = params.field()?;
    match source {
        FSource::Random => {
            Budget::check("orbit basis", shape.orbit_basis_size(), budget.max_basis)?;
            let basis = enumerate_orbit_basis(shape, budget.max_basis)?;
            Ok(basis.sample(&ctx, &mut rng::stream(seed, stage, index)))
        }
        FSource::Fixed(f) => {
            if f.shape() != shape || **f.ctx() != *ctx {
                return Err(PolyError::ShapeMismatch("fixed polynomial does not match the parameters".into()).into());
            }
            Ok(f.clone())
        }
        FSource::Constant(c) => Ok(BlockPolynomial::constant(shape, ctx, *c)?),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadSequenceReport {
    /// Bad sequences with their extension-set sizes, in canonical order.
    pub bad: Vec<(GroupedSequence, usize)>,
    pub removed_vertices: BTreeSet<u32>,
}

impl BadSequenceReport {
    /// `B`, the number of bad sequences.
    pub fn count(&self) -> usize {
        self.bad.len()
    }
}

/// How extension sets are computed during the bad-sequence scan.
pub enum ExtensionRoute<'a> {
    /// Intersect completions in the materialized hypergraph.
    Adjacency(&'a Hypergraph),
    /// Solve the `b` equations `f(w^1_{j_1}, ..., x) = 0` directly.
    Polynomial(&'a BlockPolynomial),
}

/// Extension set of `seq` in `G_f` from the polynomial alone. `vals[x]` holds
/// the block monomial values of vertex `x`.
pub fn polynomial_extension_set(f: &BlockPolynomial, vals: &[Vec<Fe>], seq: &GroupedSequence) -> Vec<u32> {
    let ctx = f.ctx();
    let restricted: Vec<Vec<Fe>> = seq
        .transversals()
        .iter()
        .map(|tr| {
            let prefix: Vec<&[Fe]> = tr.iter().map(|&v| vals[v as usize].as_slice()).collect();
            f.restrict_values(&prefix)
        })
        .collect();
    (0..vals.len() as u32)
        .filter(|&x| !seq.contains(x) && restricted.iter().all(|g| ctx.dot(g, &vals[x as usize]).is_zero()))
        .collect()
}

/// Exhaustive scan over canonical grouped sequences for `|W| >= c`.
pub fn find_bad_sequences(
    route: ExtensionRoute<'_>,
    params: &ConstructionParams,
    budget: &Budget,
) -> Result<BadSequenceReport, ConstructionError> {
    let c = params
        .bad_threshold()
        .ok_or_else(|| ConstructionError::InvalidSizes("bad threshold is unresolved".into()))?;
    let sizes = &params.part_sizes;
    let (n, r) = match &route {
        ExtensionRoute::Adjacency(g) => (g.vertex_count(), g.uniformity()),
        ExtensionRoute::Polynomial(f) => {
            let n = (f.ctx().order() as u128).saturating_pow(f.shape().b as u32);
            Budget::check("vertices", n, budget.max_vertices as u128)?;
            (n as usize, f.shape().r)
        }
    };
    if r != sizes.len() + 1 {
        return Err(ConstructionError::InvalidSizes(format!("{} sizes for uniformity {r}", sizes.len())));
    }
    Budget::check("sequence scan", canonical_sequence_count(n, sizes), budget.max_sequence_scan)?;
    let vals: Vec<Vec<Fe>> = match &route {
        ExtensionRoute::Polynomial(f) => all_points(f.ctx(), f.shape().b).iter().map(|p| f.monomial_values(p)).collect(),
        ExtensionRoute::Adjacency(_) => Vec::new(),
    };
    let size_of = |seq: &GroupedSequence| -> usize {
        match &route {
            ExtensionRoute::Adjacency(g) => extension_set(g, seq).map(|w| w.size()).unwrap_or(0),
            ExtensionRoute::Polynomial(f) => polynomial_extension_set(f, &vals, seq).len(),
        }
    };
    let bad: Vec<(GroupedSequence, usize)> = (0..n as u32)
        .into_par_iter()
        .flat_map_iter(|lead| {
            let mut out = Vec::new();
            scan_sequences_from::<()>(n, sizes, lead, &mut |seq| {
                let w = size_of(seq);
                if w >= c {
                    out.push((seq.clone(), w));
                }
                None
            });
            out
        })
        .collect();
    let removed_vertices = bad.iter().map(|(seq, _)| seq.min_vertex()).collect();
    Ok(BadSequenceReport { bad, removed_vertices })
}

/// Removes the designated (smallest-id) vertex of every bad sequence.
pub fn delete_bad(g: &Hypergraph, report: &BadSequenceReport) -> Hypergraph {
    g.remove_vertices(&report.removed_vertices)
}

/// Deterministic record of one run; wall-clock data lives in [`StageTiming`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstructionSummary {
    pub r: usize,
    pub part_sizes: Vec<usize>,
    pub pattern: String,
    pub b: usize,
    pub t: usize,
    pub s: usize,
    pub degree: u32,
    pub q: u64,
    pub seed: u64,
    pub bad_threshold: usize,
    pub threshold: Threshold,
    pub tail_size: usize,
    /// SHA-256 of the polynomial's canonical text.
    pub polynomial_sha256: String,
    pub polynomial_terms: usize,
    pub vertices: u64,
    pub edges: u64,
    pub bad_sequences: usize,
    pub removed_vertices: usize,
    pub vertices_after: u64,
    pub edges_after: u64,
    pub copies: PatternCount,
    pub certificate: String,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTiming {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone)]
pub struct ConstructionResult {
    pub params: ConstructionParams,
    pub polynomial: BlockPolynomial,
    pub g: Hypergraph,
    pub report: BadSequenceReport,
    pub g_prime: Hypergraph,
    pub certificate: Option<ForbiddenWitness>,
    pub summary: ConstructionSummary,
    pub timings: Vec<StageTiming>,
}

/// Checks every stage's cost against the budget before starting.
pub fn check_budget(params: &ConstructionParams, budget: &Budget, source: &FSource) -> Result<(), ConstructionError> {
    let shape = params.shape()?;
    if matches!(source, FSource::Random) {
        Budget::check("orbit basis", shape.orbit_basis_size(), budget.max_basis)?;
    }
    let n = params.vertex_count();
    Budget::check("vertices", n, budget.max_vertices as u128)?;
    Budget::check("edge scan", binomial(n, params.r as u128), budget.max_edge_scan)?;
    Budget::check("sequence scan", canonical_sequence_count(n as usize, &params.part_sizes), budget.max_sequence_scan)?;
    Ok(())
}

pub fn run_construction(
    params: &ConstructionParams,
    seed: u64,
    budget: &Budget,
    source: &FSource,
) -> Result<ConstructionResult, ConstructionError> {
    check_budget(params, budget, source)?;
    let params = params.resolved(budget)?;
    let c = params.bad_threshold().unwrap();
    let tail = params.tail().unwrap();
    if tail < c {
        return Err(ConstructionError::InvalidSizes(format!("tail size {tail} is below the threshold {c}")));
    }
    let mut timings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |stage: &str, timings: &mut Vec<StageTiming>| {
        timings.push(StageTiming { stage: stage.into(), seconds: clock.elapsed().as_secs_f64() });
        clock = Instant::now();
    };

    let f = draw_polynomial(&params, source, seed, "polynomial", 0, budget)?;
    lap("sample", &mut timings);
    let g = build_from_polynomial(&f, budget.build_caps())?;
    lap("build", &mut timings);
    let report = find_bad_sequences(ExtensionRoute::Adjacency(&g), &params, budget)?;
    lap("bad-sequences", &mut timings);
    let g_prime = delete_bad(&g, &report);
    lap("delete", &mut timings);
    let certificate = find_forbidden(&g_prime, &params.part_sizes, tail, budget.max_sequence_scan)?;
    if let Some(w) = certificate {
        return Err(ConstructionError::CertificateFailed(w));
    }
    lap("certify", &mut timings);
    let copies = count_pattern(&g_prime, &params.pattern)?;
    lap("count", &mut timings);

    let text = f.to_text();
    let summary = ConstructionSummary {
        r: params.r,
        part_sizes: params.part_sizes.clone(),
        pattern: params.pattern.canonical(),
        b: params.b,
        t: params.t,
        s: params.s,
        degree: params.degree,
        q: params.q,
        seed,
        bad_threshold: c,
        threshold: params.threshold.clone(),
        tail_size: tail,
        polynomial_sha256: hex::encode(Sha256::digest(text.as_bytes())),
        polynomial_terms: f.term_count(),
        vertices: g.vertex_count() as u64,
        edges: g.edge_count() as u64,
        bad_sequences: report.count(),
        removed_vertices: report.removed_vertices.len(),
        vertices_after: g_prime.vertex_count() as u64,
        edges_after: g_prime.edge_count() as u64,
        copies,
        certificate: "none".into(),
        warnings: params.warnings.clone(),
    };
    Ok(ConstructionResult {
        params,
        polynomial: f,
        g,
        report,
        g_prime,
        certificate: None,
        summary,
        timings,
    })
}
