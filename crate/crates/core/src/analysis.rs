//! Statistical verifiers: separating functionals, the exact vanishing
//! probability of random symmetric polynomials, the size dichotomy of
//! extension sets, and log-log exponent fits across field sizes.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::construction::{
    polynomial_extension_set, run_construction, Budget, ConstructionError, ConstructionParams, FSource,
};
use crate::field::{Fe, FieldCtx};
use crate::hypergraph::{binomial, GroupedSequence};
use crate::poly::{all_points, enumerate_orbit_basis, BlockPolynomial, BlockShape, PointBlock};
use crate::rng;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("precondition violated: C(|V|,2) = {pairs} is not below q = {q}")]
    PreconditionViolated { pairs: u128, q: u64 },
    #[error("no separating functional found despite the precondition; this is a bug")]
    NotFound,
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("fit needs at least 3 distinct field orders, got {0}")]
    TooFewPoints(usize),
    #[error("cannot fit: mean count is zero at q = {q}")]
    DegenerateFit { q: u64 },
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

impl AnalysisError {
    pub fn is_budget(&self) -> bool {
        matches!(self, AnalysisError::Construction(e) if e.is_budget())
    }
}

fn dot(ctx: &FieldCtx, u: &[Fe], v: &[Fe]) -> Fe {
    ctx.dot(u, v)
}

/// A linear functional `L_u(x) = u . x` injective on a point set, and an
/// invertible matrix `T` with first row `u`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatingFunctional {
    pub u: Vec<Fe>,
    pub transform: Vec<Vec<Fe>>,
}

impl SeparatingFunctional {
    pub fn apply(&self, ctx: &FieldCtx, x: &PointBlock) -> PointBlock {
        PointBlock(self.transform.iter().map(|row| dot(ctx, row, x.coords())).collect())
    }
}

/// Scans nonzero `u` in increasing little-endian base-`q` order and returns
/// the first one separating every pair of `points`.
pub fn find_separating_functional(
    ctx: &FieldCtx,
    b: usize,
    points: &[PointBlock],
) -> Result<SeparatingFunctional, AnalysisError> {
    if points.iter().any(|p| p.coords().len() != b) {
        return Err(AnalysisError::InvalidInstance(format!("points must have {b} coordinates")));
    }
    let distinct: Vec<&PointBlock> = points.iter().collect::<BTreeSet<_>>().into_iter().collect();
    let pairs = binomial(distinct.len() as u128, 2);
    if pairs >= ctx.order() as u128 {
        return Err(AnalysisError::PreconditionViolated { pairs, q: ctx.order() });
    }
    let diffs: Vec<Vec<Fe>> = distinct
        .iter()
        .enumerate()
        .flat_map(|(i, a)| {
            distinct[i + 1..]
                .iter()
                .map(move |c| a.coords().iter().zip(c.coords()).map(|(&x, &y)| ctx.sub(x, y)).collect())
        })
        .collect();
    let total = (ctx.order() as u128).pow(b as u32);
    for idx in 1..total {
        let u = PointBlock::decode(ctx, b, idx as u64).0;
        if diffs.iter().all(|d| !dot(ctx, &u, d).is_zero()) {
            let pivot = u.iter().position(|x| !x.is_zero()).unwrap();
            let mut transform = vec![u.clone()];
            for j in (0..b).filter(|&j| j != pivot) {
                let mut row = vec![Fe::ZERO; b];
                row[j] = ctx.one();
                transform.push(row);
            }
            return Ok(SeparatingFunctional { u, transform });
        }
    }
    Err(AnalysisError::NotFound)
}

/// A family `U` of `r`-sets of points together with the point set `V` and
/// the three size guards of the vanishing-probability identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingInstance {
    pub u: Vec<Vec<PointBlock>>,
    pub v: Vec<PointBlock>,
    pub guard_u_pairs: bool,
    pub guard_v_pairs: bool,
    pub guard_size: bool,
}

impl VanishingInstance {
    /// `d` is the per-block degree bound of the sampled family.
    pub fn new(shape: BlockShape, q: u64, u: Vec<Vec<PointBlock>>) -> Result<Self, AnalysisError> {
        let mut seen = BTreeSet::new();
        for set in &u {
            if set.len() != shape.r {
                return Err(AnalysisError::InvalidInstance(format!("{}-set in an r = {} instance", set.len(), shape.r)));
            }
            if set.iter().any(|p| p.coords().len() != shape.b || p.coords().iter().any(|c| c.value() as u64 >= q)) {
                return Err(AnalysisError::InvalidInstance("point outside F_q^b".into()));
            }
            let pts: BTreeSet<&PointBlock> = set.iter().collect();
            if pts.len() != shape.r {
                return Err(AnalysisError::InvalidInstance("repeated point in an r-set".into()));
            }
            if !seen.insert(pts.into_iter().cloned().collect::<Vec<_>>()) {
                return Err(AnalysisError::InvalidInstance("repeated r-set".into()));
            }
        }
        let v: Vec<PointBlock> = u.iter().flatten().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let q = q as u128;
        Ok(VanishingInstance {
            guard_u_pairs: binomial(u.len() as u128, 2) < q,
            guard_v_pairs: binomial(v.len() as u128, 2) < q,
            guard_size: u.len() as u128 <= shape.d as u128,
            u,
            v,
        })
    }

    /// `count` pairwise disjoint `r`-sets on the points with encodings
    /// `0, 1, ..., count * r - 1`.
    pub fn disjoint(shape: BlockShape, ctx: &FieldCtx, count: usize) -> Result<Self, AnalysisError> {
        let u = (0..count)
            .map(|i| (0..shape.r).map(|j| PointBlock::decode(ctx, shape.b, (i * shape.r + j) as u64)).collect())
            .collect();
        Self::new(shape, ctx.order(), u)
    }

    pub fn guards_hold(&self) -> bool {
        self.guard_u_pairs && self.guard_v_pairs && self.guard_size
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub trials: usize,
    pub vanished: usize,
    pub empirical: f64,
    pub exact: f64,
    pub sigma: f64,
    pub z_score: f64,
    pub guards_hold: bool,
    /// `"within hypotheses"` or `"outside lemma hypotheses"`.
    pub label: String,
}

/// Fraction of `trials` uniform symmetric polynomials vanishing on every set
/// of `instance`, against `q^{-|U|}` under a binomial model.
pub fn lemma2_calibration(
    shape: BlockShape,
    ctx: &Arc<FieldCtx>,
    instance: &VanishingInstance,
    trials: usize,
    seed: u64,
    budget: &Budget,
) -> Result<CalibrationResult, AnalysisError> {
    Budget::check("orbit basis", shape.orbit_basis_size(), budget.max_basis)?;
    let basis = enumerate_orbit_basis(shape, budget.max_basis).map_err(ConstructionError::from)?;
    let sets: Vec<Vec<Vec<Fe>>> = instance
        .u
        .iter()
        .map(|set| set.iter().map(|p| basis.block_monomials().values(ctx, p)).collect())
        .collect();
    let vanished: usize = (0..trials)
        .into_par_iter()
        .filter(|&i| {
            let f = basis.sample(ctx, &mut rng::stream(seed, "lemma2", i as u64));
            sets.iter().all(|set| {
                let args: Vec<&[Fe]> = set.iter().map(Vec::as_slice).collect();
                f.eval_values(&args).is_zero()
            })
        })
        .count();
    let exact = (ctx.order() as f64).powi(-(instance.u.len() as i32));
    let empirical = if trials == 0 { 1.0 } else { vanished as f64 / trials as f64 };
    let sigma = (exact * (1.0 - exact) / trials.max(1) as f64).sqrt();
    let z_score = if sigma > 0.0 { (empirical - exact) / sigma } else { 0.0 };
    let guards_hold = instance.guards_hold();
    Ok(CalibrationResult {
        trials,
        vanished,
        empirical,
        exact,
        sigma,
        z_score,
        guards_hold,
        label: if guards_hold { "within hypotheses" } else { "outside lemma hypotheses" }.into(),
    })
}

/// An observation strictly inside the reported band.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BandViolation {
    pub sample: usize,
    pub size: usize,
    pub sequence: GroupedSequence,
    pub polynomial: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DichotomyReport {
    pub q: u64,
    pub samples: usize,
    /// `|W|` per sample, in sample order.
    pub sizes: Vec<usize>,
    pub histogram: BTreeMap<usize, usize>,
    /// Observations below `split` count as the small side.
    pub split: f64,
    pub small_side_max: usize,
    pub large_side_min: Option<usize>,
    pub c_est: usize,
    pub band: (f64, f64),
    pub band_empty: bool,
    pub violations: Vec<BandViolation>,
    pub warnings: Vec<String>,
}

/// Samples `(f, sequence)` pairs and records `|W|`, computed over every
/// point of `F_q^b` outside the sequence.
pub fn dichotomy_scan(
    params: &ConstructionParams,
    num_samples: usize,
    seed: u64,
    budget: &Budget,
    source: &FSource,
) -> Result<DichotomyReport, ConstructionError> {
    let shape = params.shape()?;
    let ctx = params.field()?;
    let q = ctx.order();
    let n = params.vertex_count();
    Budget::check("vertices", n, budget.max_vertices as u128)?;
    Budget::check(
        "dichotomy evaluations",
        n.saturating_mul(params.b as u128).saturating_mul(num_samples as u128),
        budget.max_evaluations,
    )?;
    let n = n as usize;
    if n < params.t {
        return Err(ConstructionError::InvalidSizes(format!("{n} points cannot hold a sequence of {}", params.t)));
    }
    let basis = match source {
        FSource::Random => {
            Budget::check("orbit basis", shape.orbit_basis_size(), budget.max_basis)?;
            Some(enumerate_orbit_basis(shape, budget.max_basis)?)
        }
        _ => None,
    };
    let fixed = match source {
        FSource::Random => None,
        other => Some(crate::construction::draw_polynomial(params, other, seed, "dichotomy-f", 0, budget)?),
    };
    let vals: Vec<Vec<Fe>> = {
        let mons = match (&basis, &fixed) {
            (Some(b), _) => b.block_monomials().clone(),
            (None, Some(f)) => f.block_monomials().clone(),
            _ => unreachable!(),
        };
        all_points(&ctx, shape.b).iter().map(|p| mons.values(&ctx, p)).collect()
    };

    let draw = |i: usize| -> (BlockPolynomial, GroupedSequence) {
        let f = match (&basis, &fixed) {
            (Some(b), _) => b.sample(&ctx, &mut rng::stream(seed, "dichotomy-f", i as u64)),
            (None, Some(f)) => f.clone(),
            _ => unreachable!(),
        };
        let mut r = rng::stream(seed, "dichotomy-seq", i as u64);
        let picked = sample_indices(&mut r, n, params.t).into_vec();
        let mut groups = Vec::new();
        let mut at = 0;
        for &s in &params.part_sizes {
            groups.push(picked[at..at + s].iter().map(|&x| x as u32).collect());
            at += s;
        }
        (f, GroupedSequence::new(groups).expect("distinct sampled vertices"))
    };
    let sizes: Vec<usize> = (0..num_samples)
        .into_par_iter()
        .map(|i| {
            let (f, seq) = draw(i);
            polynomial_extension_set(&f, &vals, &seq).len()
        })
        .collect();

    let split = q as f64 / 2.0;
    let mut histogram = BTreeMap::new();
    for &w in &sizes {
        *histogram.entry(w).or_insert(0) += 1;
    }
    let small_side_max = sizes.iter().copied().filter(|&w| (w as f64) < split).max().unwrap_or(0);
    let large_side_min = sizes.iter().copied().filter(|&w| (w as f64) >= split).min();
    let c_est = small_side_max + 1;
    let band = (c_est as f64, q as f64 - c_est as f64 * (q as f64).sqrt());
    let inside = |w: usize| (w as f64) > band.0 && (w as f64) < band.1;
    let violations: Vec<BandViolation> = sizes
        .iter()
        .enumerate()
        .filter(|&(_, &w)| inside(w))
        .map(|(i, &w)| {
            let (f, sequence) = draw(i);
            BandViolation { sample: i, size: w, sequence, polynomial: f.to_text() }
        })
        .collect();
    let mut warnings = Vec::new();
    if band.1 <= band.0 {
        warnings.push(format!("q = {q} is too small to separate: q - c*sqrt(q) = {:.3} <= c = {c_est}", band.1));
    }
    if params.degree < (params.b * params.s) as u32 {
        warnings.push(format!("degree {} is below b*s = {}", params.degree, params.b * params.s));
    }
    Ok(DichotomyReport {
        q,
        samples: num_samples,
        sizes,
        histogram,
        split,
        small_side_max,
        large_side_min,
        c_est,
        band,
        band_empty: violations.is_empty(),
        violations,
        warnings,
    })
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub q: u64,
    pub seed: u64,
    pub vertices: u64,
    pub vertices_after: u64,
    pub edges_after: u64,
    pub bad_sequences: usize,
    pub copies: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub q: u64,
    pub mean_vertices_after: f64,
    pub mean_edges_after: f64,
    pub mean_copies: f64,
    pub min_retention: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentScan {
    pub bad_threshold: usize,
    pub rows: Vec<ScanRow>,
    pub points: Vec<ScanPoint>,
    pub slope: f64,
    pub intercept: f64,
    /// `v - e/b` as a decimal and as `num/den`.
    pub target: f64,
    pub target_exact: String,
}

/// Seed of cell `(q, i)`; independent of the position of `q` in the list.
pub fn cell_seed(master: u64, q: u64, i: usize) -> u64 {
    rng::sub_seed(master, "exponent-scan", (q << 32) | i as u64)
}

/// Runs the construction for every `(q, seed)` pair and fits
/// `ln(mean copies)` against `ln(mean |V(G')|)` over the per-`q` means.
pub fn exponent_scan(
    template: &ConstructionParams,
    q_list: &[u64],
    seeds_per_q: usize,
    seed: u64,
    budget: &Budget,
) -> Result<ExponentScan, AnalysisError> {
    let qs: Vec<u64> = q_list.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    if qs.len() < 3 {
        return Err(AnalysisError::TooFewPoints(qs.len()));
    }
    let template = template.resolved(budget)?;
    let cells: Vec<(u64, usize)> = qs.iter().flat_map(|&q| (0..seeds_per_q).map(move |i| (q, i))).collect();
    let mut per_cell = Vec::with_capacity(cells.len());
    for &q in &qs {
        crate::construction::check_budget(&template.with_order(q)?, budget, &FSource::Random)?;
    }
    for &(q, i) in &cells {
        let params = template.with_order(q)?;
        let cs = cell_seed(seed, q, i);
        let res = run_construction(&params, cs, budget, &FSource::Random)?;
        per_cell.push(ScanRow {
            q,
            seed: cs,
            vertices: res.summary.vertices,
            vertices_after: res.summary.vertices_after,
            edges_after: res.summary.edges_after,
            bad_sequences: res.summary.bad_sequences,
            copies: res.summary.copies.unordered_copies,
        });
    }
    let mut points = Vec::new();
    for &q in &qs {
        let rows: Vec<&ScanRow> = per_cell.iter().filter(|r| r.q == q).collect();
        let m = rows.len() as f64;
        let mean = |f: &dyn Fn(&ScanRow) -> f64| rows.iter().map(|r| f(r)).sum::<f64>() / m;
        let mean_copies = mean(&|r| r.copies as f64);
        if mean_copies <= 0.0 {
            return Err(AnalysisError::DegenerateFit { q });
        }
        points.push(ScanPoint {
            q,
            mean_vertices_after: mean(&|r| r.vertices_after as f64),
            mean_edges_after: mean(&|r| r.edges_after as f64),
            mean_copies,
            min_retention: rows.iter().map(|r| r.vertices_after as f64 / r.vertices as f64).fold(f64::INFINITY, f64::min),
            residual: 0.0,
        });
    }
    let xs: Vec<f64> = points.iter().map(|p| p.mean_vertices_after.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.mean_copies.ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    for (p, (x, y)) in points.iter_mut().zip(xs.iter().zip(&ys)) {
        p.residual = y - (slope * x + intercept);
    }
    let target = num_rational::Ratio::new((template.v * template.b - template.e) as i64, template.b as i64);
    Ok(ExponentScan {
        bad_threshold: template.bad_threshold().unwrap(),
        rows: per_cell,
        points,
        slope,
        intercept,
        target: *target.numer() as f64 / *target.denom() as f64,
        target_exact: target.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construction::{derive_params, Overrides};
    use crate::hypergraph::Pattern;
    use crate::poly::Monomial;

    fn ctx(q: u64) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::with_order(q).unwrap())
    }

    fn pts(c: &FieldCtx, raw: &[&[u64]]) -> Vec<PointBlock> {
        raw.iter().map(|p| PointBlock(p.iter().map(|&x| c.elem(x).unwrap()).collect())).collect()
    }

    #[test]
    fn separating_small_cases() {
        let c = ctx(3);
        let one = find_separating_functional(&c, 2, &pts(&c, &[&[2, 1]])).unwrap();
        assert_eq!(one.u, vec![Fe(1), Fe(0)]);
        let two = find_separating_functional(&c, 2, &pts(&c, &[&[0, 0], &[0, 1]])).unwrap();
        assert_eq!(two.u, vec![Fe(0), Fe(1)]);
        assert_eq!(two.transform, vec![vec![Fe(0), Fe(1)], vec![Fe(1), Fe(0)]]);
        let three = pts(&c, &[&[0, 0], &[0, 1], &[1, 0]]);
        assert!(matches!(
            find_separating_functional(&c, 2, &three),
            Err(AnalysisError::PreconditionViolated { pairs: 3, q: 3 })
        ));
    }

    #[test]
    fn separating_random_sets_verified_on_all_pairs() {
        let c = ctx(11);
        for trial in 0..20 {
            let mut r = rng::stream(5, "sep-test", trial);
            let v: Vec<PointBlock> = (0..5).map(|_| PointBlock((0..3).map(|_| c.sample(&mut r)).collect())).collect();
            let distinct: BTreeSet<_> = v.iter().collect();
            let sf = find_separating_functional(&c, 3, &v).unwrap();
            let firsts: BTreeSet<Fe> = distinct.iter().map(|p| sf.apply(&c, p).coords()[0]).collect();
            assert_eq!(firsts.len(), distinct.len());
        }
    }

    #[test]
    fn instance_guards() {
        let c = ctx(5);
        let shape = BlockShape::new(2, 1, 2).unwrap();
        let one = VanishingInstance::disjoint(shape, &c, 1).unwrap();
        assert!(one.guards_hold());
        let two = VanishingInstance::disjoint(shape, &c, 2).unwrap();
        assert_eq!(two.v.len(), 4);
        assert!(two.guard_u_pairs && !two.guard_v_pairs);
        let three = VanishingInstance::disjoint(shape, &ctx(29), 3).unwrap();
        assert!(!three.guard_size);
        let dup = vec![pts(&c, &[&[1], &[1]])];
        assert!(VanishingInstance::new(shape, 5, dup).is_err());
        let repeated = vec![pts(&c, &[&[1], &[2]]), pts(&c, &[&[2], &[1]])];
        assert!(VanishingInstance::new(shape, 5, repeated).is_err());
    }

    #[test]
    fn empty_family_always_vanishes() {
        let c = ctx(7);
        let shape = BlockShape::new(2, 1, 2).unwrap();
        let inst = VanishingInstance::new(shape, 7, Vec::new()).unwrap();
        let res = lemma2_calibration(shape, &c, &inst, 100, 1, &Budget::default()).unwrap();
        assert_eq!((res.empirical, res.exact, res.z_score), (1.0, 1.0, 0.0));
    }

    fn edge_params(q: u64, c: Option<usize>) -> ConstructionParams {
        let f = FieldCtx::with_order(q).unwrap();
        let o = Overrides { bad_threshold: c, ..Default::default() };
        derive_params(&[2], &Pattern::edge(2), (f.characteristic(), f.degree()), &o).unwrap()
    }

    #[test]
    fn dichotomy_constant_polynomial() {
        let p = edge_params(7, Some(3));
        let rep = dichotomy_scan(&p, 50, 3, &Budget::default(), &FSource::Constant(Fe(1))).unwrap();
        assert!(rep.sizes.iter().all(|&w| w == 0));
        assert_eq!((rep.small_side_max, rep.c_est), (0, 1));
    }

    #[test]
    fn dichotomy_linear_polynomial_has_at_most_one_root() {
        let f = FieldCtx::with_order(11).unwrap();
        let o = Overrides { bad_threshold: Some(2), degree: Some(1), ..Default::default() };
        let p = derive_params(&[1], &Pattern::edge(2), (11, 1), &o).unwrap();
        let shape = p.shape().unwrap();
        let x1 = Monomial::new(2, 1, vec![1, 0]).unwrap();
        let lin = BlockPolynomial::from_terms(shape, Arc::new(f), vec![(x1, Fe(1))], true).unwrap();
        let rep = dichotomy_scan(&p, 200, 4, &Budget::default(), &FSource::Fixed(lin)).unwrap();
        assert!(rep.sizes.iter().all(|&w| w <= 1));
        // -w = w only at w = 0, where the root is the sequence vertex itself
        assert!(rep.sizes.contains(&1));
    }

    #[test]
    fn dichotomy_budget() {
        let p = edge_params(7, Some(3));
        let tight = Budget { max_evaluations: 100, ..Budget::default() };
        assert!(matches!(
            dichotomy_scan(&p, 50, 0, &tight, &FSource::Random),
            Err(ConstructionError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn least_squares_on_exact_line() {
        let xs = [0.0, 1.0, 2.5, 4.0];
        let ys: Vec<f64> = xs.iter().map(|x| 1.5 * x - 0.25).collect();
        let (m, c) = least_squares(&xs, &ys);
        assert!((m - 1.5).abs() < 1e-12 && (c + 0.25).abs() < 1e-12);
    }

    #[test]
    fn exponent_scan_needs_three_orders() {
        let p = edge_params(3, Some(4));
        assert!(matches!(
            exponent_scan(&p, &[3, 4, 3], 1, 0, &Budget::default()),
            Err(AnalysisError::TooFewPoints(2))
        ));
    }

    #[test]
    fn degenerate_exponent_target() {
        let f = FieldCtx::with_order(3).unwrap();
        let o = Overrides { bad_threshold: Some(4), ..Default::default() };
        let p = derive_params(&[1], &Pattern::edge(2), (f.characteristic(), 1), &o).unwrap();
        let scan = exponent_scan(&p, &[5, 7, 11], 2, 1, &Budget::default()).unwrap();
        assert_eq!(scan.target_exact, "1");
        assert_eq!(scan.rows.len(), 6);
    }
}
