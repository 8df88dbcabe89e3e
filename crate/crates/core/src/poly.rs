//! Symmetric block polynomials over `F_q`.
//!
//! A polynomial lives in `r` blocks of `b` variables each, `X^1, ..., X^r`,
//! with every monomial of degree at most `d` in each block. Symmetric
//! polynomials are stored on the orbit basis: one coefficient per orbit of
//! monomials under permutations of the blocks, keyed by the orbit's
//! representative. The representative has its block rows in non-increasing
//! lexicographic order, so `X^1_1` stands for the orbit `{X^1_1, X^2_1}`.
//!
//! Internally each block row is an index into the lexicographically sorted
//! list of per-block monomials, and the polynomial is expanded into a dense
//! `M^r` coefficient tensor (`M` = number of per-block monomials) that
//! evaluation contracts one block at a time.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::field::{Fe, FieldCtx, FieldError};

/// Default cap on the orbit basis dimension.
pub const DEFAULT_BASIS_CAP: u128 = 1 << 22;

/// Cap on the dense `M^r` coefficient tensor.
pub const DENSE_CAP: u128 = 1 << 25;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("invalid block shape: {0}")]
    InvalidShape(String),
    #[error("basis of size {count} exceeds the cap {cap}")]
    BasisTooLarge { count: u128, cap: u128 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("monomial violates the per-block degree bound {d}")]
    DegreeBound { d: u32 },
    #[error("monomial is not an orbit representative (block rows must be non-increasing)")]
    NotRepresentative,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn binomial(n: u128, k: u128) -> u128 {
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

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct BlockShape {
    pub r: usize,
    pub b: usize,
    pub d: u32,
}

impl BlockShape {
    pub fn new(r: usize, b: usize, d: u32) -> Result<Self, PolyError> {
        if r < 2 {
            return Err(PolyError::InvalidShape(format!("r = {r}, need r >= 2")));
        }
        if b < 1 {
            return Err(PolyError::InvalidShape("b = 0, need b >= 1".into()));
        }
        Ok(BlockShape { r, b, d })
    }

    /// Number of monomials in one block with total degree at most `d`.
    pub fn block_monomial_count(&self) -> u128 {
        binomial(self.d as u128 + self.b as u128, self.b as u128)
    }

    /// Dimension of the space of symmetric polynomials: multisets of size `r`
    /// drawn from the block monomials.
    pub fn orbit_basis_size(&self) -> u128 {
        let m = self.block_monomial_count();
        binomial(m + self.r as u128 - 1, self.r as u128)
    }

    pub fn dense_size(&self) -> u128 {
        self.block_monomial_count().saturating_pow(self.r as u32)
    }
}

/// A point of `F_q^b`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct PointBlock(pub Vec<Fe>);

impl PointBlock {
    pub fn coords(&self) -> &[Fe] {
        &self.0
    }

    /// Little-endian base-`q` index: `coords[0] + coords[1] q + ...`.
    pub fn encode(&self, ctx: &FieldCtx) -> u64 {
        self.0.iter().rev().fold(0, |acc, c| acc * ctx.order() + c.value() as u64)
    }

    pub fn decode(ctx: &FieldCtx, b: usize, mut index: u64) -> Self {
        let q = ctx.order();
        let mut coords = Vec::with_capacity(b);
        for _ in 0..b {
            coords.push(Fe((index % q) as u32));
            index /= q;
        }
        PointBlock(coords)
    }
}

/// Every point of `F_q^b` in encoding order.
pub fn all_points(ctx: &FieldCtx, b: usize) -> Vec<PointBlock> {
    let n = ctx.order().pow(b as u32);
    (0..n).map(|i| PointBlock::decode(ctx, b, i)).collect()
}

/// An `r x b` exponent matrix, row `i` holding the exponents of block `X^{i+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial {
    r: usize,
    b: usize,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(r: usize, b: usize, exps: Vec<u32>) -> Result<Self, PolyError> {
        if exps.len() != r * b {
            return Err(PolyError::ShapeMismatch(format!(
                "{} exponents for an {r}x{b} monomial",
                exps.len()
            )));
        }
        Ok(Monomial { r, b, exps })
    }

    pub fn from_rows(rows: &[Vec<u32>]) -> Result<Self, PolyError> {
        let r = rows.len();
        let b = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != b) {
            return Err(PolyError::ShapeMismatch("ragged exponent rows".into()));
        }
        Monomial::new(r, b, rows.concat())
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.exps[i * self.b..(i + 1) * self.b]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u32]> {
        self.exps.chunks(self.b)
    }

    pub fn block_degree(&self, i: usize) -> u32 {
        self.row(i).iter().sum()
    }

    /// The orbit representative: rows sorted into non-increasing order.
    pub fn representative(&self) -> Monomial {
        let mut rows: Vec<&[u32]> = self.rows().collect();
        rows.sort_by(|a, b| b.cmp(a));
        Monomial { r: self.r, b: self.b, exps: rows.concat() }
    }

    pub fn is_representative(&self) -> bool {
        self.rows().zip(self.rows().skip(1)).all(|(a, b)| a >= b)
    }
}

/// The per-block monomials of degree at most `d` in `b` variables, sorted
/// lexicographically by exponent vector.
#[derive(Debug, Clone)]
pub struct BlockMonomials {
    d: u32,
    exps: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, u16>,
}

impl BlockMonomials {
    fn new(b: usize, d: u32) -> Self {
        fn rec(b: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if cur.len() == b {
                out.push(cur.clone());
                return;
            }
            for e in 0..=left {
                cur.push(e);
                rec(b, left - e, cur, out);
                cur.pop();
            }
        }
        let mut exps = Vec::new();
        rec(b, d, &mut Vec::with_capacity(b), &mut exps);
        let index = exps.iter().enumerate().map(|(i, e)| (e.clone(), i as u16)).collect();
        BlockMonomials { d, exps, index }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self, i: usize) -> &[u32] {
        &self.exps[i]
    }

    pub fn index_of(&self, exps: &[u32]) -> Option<usize> {
        self.index.get(exps).map(|&i| i as usize)
    }

    /// Values of every block monomial at `point`, in monomial order.
    pub fn values(&self, ctx: &FieldCtx, point: &PointBlock) -> Vec<Fe> {
        let powers: Vec<Vec<Fe>> = point
            .coords()
            .iter()
            .map(|&x| {
                let mut p = Vec::with_capacity(self.d as usize + 1);
                p.push(ctx.one());
                for e in 1..=self.d as usize {
                    p.push(ctx.mul(p[e - 1], x));
                }
                p
            })
            .collect();
        self.exps
            .iter()
            .map(|alpha| {
                alpha
                    .iter()
                    .enumerate()
                    .fold(ctx.one(), |acc, (j, &e)| ctx.mul(acc, powers[j][e as usize]))
            })
            .collect()
    }
}

/// All distinct orderings of a multiset of block indices.
fn distinct_permutations(key: &[u16]) -> Vec<Vec<u16>> {
    let mut cur = key.to_vec();
    cur.sort_unstable();
    let mut out = vec![cur.clone()];
    loop {
        // next lexicographic permutation
        let Some(i) = (0..cur.len().saturating_sub(1)).rev().find(|&i| cur[i] < cur[i + 1]) else {
            break;
        };
        let j = (i + 1..cur.len()).rev().find(|&j| cur[j] > cur[i]).unwrap();
        cur.swap(i, j);
        cur[i + 1..].reverse();
        out.push(cur.clone());
    }
    out
}

/// Orbit representatives of the block-permutation action, i.e. a basis of
/// the symmetric polynomials of the given shape.
#[derive(Debug, Clone)]
pub struct OrbitBasis {
    shape: BlockShape,
    monomials: Arc<BlockMonomials>,
    reps: Vec<Vec<u16>>,
}

impl OrbitBasis {
    pub fn shape(&self) -> BlockShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    pub fn block_monomials(&self) -> &Arc<BlockMonomials> {
        &self.monomials
    }

    pub fn representatives(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.reps.iter().map(|k| key_to_monomial(&self.shape, &self.monomials, k))
    }

    /// Uniform element of the symmetric polynomial space: i.i.d. uniform
    /// coefficients on the orbit basis.
    pub fn sample<R: Rng + ?Sized>(&self, ctx: &Arc<FieldCtx>, rng: &mut R) -> BlockPolynomial {
        let terms = self.reps.iter().map(|k| (k.clone(), ctx.sample(rng))).collect();
        BlockPolynomial::assemble(self.shape, ctx.clone(), self.monomials.clone(), terms, true)
    }
}

fn key_to_monomial(shape: &BlockShape, mons: &BlockMonomials, key: &[u16]) -> Monomial {
    let exps = key.iter().flat_map(|&i| mons.exponents(i as usize).iter().copied()).collect();
    Monomial { r: shape.r, b: shape.b, exps }
}

fn check_dense(shape: &BlockShape) -> Result<(), PolyError> {
    let dense = shape.dense_size();
    if dense > DENSE_CAP || shape.block_monomial_count() > u16::MAX as u128 {
        return Err(PolyError::BasisTooLarge { count: dense, cap: DENSE_CAP });
    }
    Ok(())
}

/// Enumerates one representative per orbit. Callers can learn the count
/// without enumerating via [`BlockShape::orbit_basis_size`].
pub fn enumerate_orbit_basis(shape: BlockShape, cap: u128) -> Result<OrbitBasis, PolyError> {
    let count = shape.orbit_basis_size();
    if count > cap {
        return Err(PolyError::BasisTooLarge { count, cap });
    }
    check_dense(&shape)?;
    let monomials = Arc::new(BlockMonomials::new(shape.b, shape.d));
    let m = monomials.len() as u16;
    let mut reps = Vec::with_capacity(count as usize);
    fn rec(r: usize, bound: u16, cur: &mut Vec<u16>, out: &mut Vec<Vec<u16>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in 0..bound {
            cur.push(i);
            rec(r, i + 1, cur, out);
            cur.pop();
        }
    }
    // Non-increasing tuples, produced in increasing lexicographic order.
    fn top(r: usize, m: u16, out: &mut Vec<Vec<u16>>) {
        for i in 0..m {
            let mut cur = vec![i];
            rec(r, i + 1, &mut cur, out);
        }
    }
    top(shape.r, m, &mut reps);
    debug_assert_eq!(reps.len() as u128, count);
    Ok(OrbitBasis { shape, monomials, reps })
}

/// Samples `f` uniformly from the symmetric polynomials of the given shape.
pub fn sample_symmetric<R: Rng + ?Sized>(
    shape: BlockShape,
    ctx: &Arc<FieldCtx>,
    rng: &mut R,
    cap: u128,
) -> Result<BlockPolynomial, PolyError> {
    Ok(enumerate_orbit_basis(shape, cap)?.sample(ctx, rng))
}

#[derive(Debug, Clone)]
pub struct BlockPolynomial {
    shape: BlockShape,
    ctx: Arc<FieldCtx>,
    monomials: Arc<BlockMonomials>,
    /// Sorted keys with nonzero coefficients. Keys are representatives when symmetric.
    terms: Vec<(Vec<u16>, Fe)>,
    symmetric: bool,
    dense: Vec<Fe>,
}

impl PartialEq for BlockPolynomial {
    fn eq(&self, other: &Self) -> bool {
        self.shape == other.shape
            && *self.ctx == *other.ctx
            && self.symmetric == other.symmetric
            && self.terms == other.terms
    }
}

impl BlockPolynomial {
    fn assemble(
        shape: BlockShape,
        ctx: Arc<FieldCtx>,
        monomials: Arc<BlockMonomials>,
        terms: Vec<(Vec<u16>, Fe)>,
        symmetric: bool,
    ) -> Self {
        let mut merged: BTreeMap<Vec<u16>, Fe> = BTreeMap::new();
        for (k, c) in terms {
            let e = merged.entry(k).or_insert(Fe::ZERO);
            *e = ctx.add(*e, c);
        }
        let terms: Vec<(Vec<u16>, Fe)> = merged.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let m = monomials.len();
        let mut dense = vec![Fe::ZERO; m.pow(shape.r as u32)];
        let flat = |k: &[u16]| k.iter().fold(0usize, |acc, &i| acc * m + i as usize);
        for (k, c) in &terms {
            if symmetric {
                for perm in distinct_permutations(k) {
                    dense[flat(&perm)] = *c;
                }
            } else {
                dense[flat(k)] = *c;
            }
        }
        BlockPolynomial { shape, ctx, monomials, terms, symmetric, dense }
    }

    /// Builds a polynomial from explicit terms. With `symmetric`, every
    /// monomial must be an orbit representative and stands for its orbit sum.
    pub fn from_terms(
        shape: BlockShape,
        ctx: Arc<FieldCtx>,
        terms: Vec<(Monomial, Fe)>,
        symmetric: bool,
    ) -> Result<Self, PolyError> {
        check_dense(&shape)?;
        let monomials = Arc::new(BlockMonomials::new(shape.b, shape.d));
        let mut keys = Vec::with_capacity(terms.len());
        for (mono, c) in terms {
            if mono.r != shape.r || mono.b != shape.b {
                return Err(PolyError::ShapeMismatch(format!(
                    "{}x{} monomial for shape {}x{}",
                    mono.r, mono.b, shape.r, shape.b
                )));
            }
            if c.value() as u64 >= ctx.order() {
                return Err(FieldError::OutOfRange { value: c.value() as u64, q: ctx.order() }.into());
            }
            if symmetric && !mono.is_representative() {
                return Err(PolyError::NotRepresentative);
            }
            let key = mono
                .rows()
                .map(|row| monomials.index_of(row).map(|i| i as u16))
                .collect::<Option<Vec<u16>>>()
                .ok_or(PolyError::DegreeBound { d: shape.d })?;
            keys.push((key, c));
        }
        Ok(Self::assemble(shape, ctx, monomials, keys, symmetric))
    }

    pub fn zero(shape: BlockShape, ctx: Arc<FieldCtx>) -> Result<Self, PolyError> {
        Self::from_terms(shape, ctx, Vec::new(), true)
    }

    pub fn constant(shape: BlockShape, ctx: Arc<FieldCtx>, c: Fe) -> Result<Self, PolyError> {
        let one = Monomial::new(shape.r, shape.b, vec![0; shape.r * shape.b])?;
        Self::from_terms(shape, ctx, vec![(one, c)], true)
    }

    pub fn shape(&self) -> BlockShape {
        self.shape
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn block_monomials(&self) -> &Arc<BlockMonomials> {
        &self.monomials
    }

    /// Stored terms: orbit representatives (symmetric) or plain monomials.
    pub fn terms(&self) -> impl Iterator<Item = (Monomial, Fe)> + '_ {
        self.terms.iter().map(|(k, c)| (key_to_monomial(&self.shape, &self.monomials, k), *c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Result<Self, PolyError> {
        if self.shape != other.shape || *self.ctx != *other.ctx {
            return Err(PolyError::ShapeMismatch("adding polynomials of different shape or field".into()));
        }
        let symmetric = self.symmetric && other.symmetric;
        let expand = |p: &Self| -> Vec<(Vec<u16>, Fe)> {
            if p.symmetric && !symmetric {
                p.terms
                    .iter()
                    .flat_map(|(k, c)| distinct_permutations(k).into_iter().map(move |pk| (pk, *c)))
                    .collect()
            } else {
                p.terms.clone()
            }
        };
        let mut terms = expand(self);
        terms.extend(expand(other));
        Ok(Self::assemble(self.shape, self.ctx.clone(), self.monomials.clone(), terms, symmetric))
    }

    fn check_point(&self, p: &PointBlock) -> Result<(), PolyError> {
        if p.coords().len() != self.shape.b {
            return Err(PolyError::ShapeMismatch(format!(
                "point has {} coordinates, expected {}",
                p.coords().len(),
                self.shape.b
            )));
        }
        if p.coords().iter().any(|c| c.value() as u64 >= self.ctx.order()) {
            return Err(PolyError::ShapeMismatch("point coordinate outside the field".into()));
        }
        Ok(())
    }

    /// Block monomial values at a point, the input format of the `_values` methods.
    pub fn monomial_values(&self, p: &PointBlock) -> Vec<Fe> {
        self.monomials.values(&self.ctx, p)
    }

    /// Contracts the leading blocks with precomputed monomial values. The
    /// result is the coefficient tensor of the remaining blocks.
    pub fn restrict_values(&self, prefix: &[&[Fe]]) -> Vec<Fe> {
        let mut cur: Option<Vec<Fe>> = None;
        for vals in prefix {
            let src: &[Fe] = cur.as_deref().unwrap_or(&self.dense);
            cur = Some(self.contract(src, vals));
        }
        cur.unwrap_or_else(|| self.dense.clone())
    }

    /// Contracts the leading axis of a coefficient tensor (the full tensor or
    /// an output of [`Self::restrict_values`]) with one block's monomial values.
    pub fn contract(&self, tensor: &[Fe], vals: &[Fe]) -> Vec<Fe> {
        let inner = tensor.len() / self.monomials.len();
        let mut out = vec![Fe::ZERO; inner];
        for (i, &v) in vals.iter().enumerate() {
            self.ctx.axpy(&mut out, v, &tensor[i * inner..(i + 1) * inner]);
        }
        out
    }

    pub fn restrict(&self, prefix: &[PointBlock]) -> Result<Vec<Fe>, PolyError> {
        if prefix.len() > self.shape.r {
            return Err(PolyError::ShapeMismatch(format!(
                "{} points for {} blocks",
                prefix.len(),
                self.shape.r
            )));
        }
        for p in prefix {
            self.check_point(p)?;
        }
        let vals: Vec<Vec<Fe>> = prefix.iter().map(|p| self.monomial_values(p)).collect();
        let refs: Vec<&[Fe]> = vals.iter().map(Vec::as_slice).collect();
        Ok(self.restrict_values(&refs))
    }

    pub fn eval_values(&self, args: &[&[Fe]]) -> Fe {
        let (last, prefix) = args.split_last().expect("at least one block");
        let rest = self.restrict_values(prefix);
        self.ctx.dot(&rest, last)
    }

    pub fn eval(&self, args: &[PointBlock]) -> Result<Fe, PolyError> {
        if args.len() != self.shape.r {
            return Err(PolyError::ShapeMismatch(format!(
                "{} arguments for {} blocks",
                args.len(),
                self.shape.r
            )));
        }
        let rest = self.restrict(&args[..args.len() - 1])?;
        let last = &args[args.len() - 1];
        self.check_point(last)?;
        Ok(self.ctx.dot(&rest, &self.monomial_values(last)))
    }

    /// Canonical text form: field, shape, then sorted term lines
    /// `rows coefficient`, rows separated by `|`, exponents by `,`.
    pub fn to_text(&self) -> String {
        let mut s = String::from("blockpoly 1\n");
        let modulus = if self.ctx.modulus().is_empty() {
            "-".to_string()
        } else {
            self.ctx.modulus().iter().map(u32::to_string).collect::<Vec<_>>().join(",")
        };
        let _ = writeln!(s, "field {} {} {}", self.ctx.characteristic(), self.ctx.degree(), modulus);
        let _ = writeln!(s, "shape {} {} {}", self.shape.r, self.shape.b, self.shape.d);
        let _ = writeln!(s, "symmetric {}", u8::from(self.symmetric));
        let _ = writeln!(s, "terms {}", self.terms.len());
        for (mono, c) in self.terms() {
            let rows: Vec<String> = mono
                .rows()
                .map(|row| row.iter().map(u32::to_string).collect::<Vec<_>>().join(","))
                .collect();
            let _ = writeln!(s, "{} {}", rows.join("|"), c);
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, PolyError> {
        let err = |line: usize, msg: &str| PolyError::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
        let mut next = |what: &str| lines.next().ok_or_else(|| err(0, &format!("missing {what} line")));
        let num = |line: usize, tok: Option<&str>| -> Result<u64, PolyError> {
            tok.and_then(|t| t.parse().ok()).ok_or_else(|| err(line, "expected an integer"))
        };

        let (ln, header) = next("header")?;
        if header != "blockpoly 1" {
            return Err(err(ln, "expected `blockpoly 1`"));
        }
        let (ln, field) = next("field")?;
        let mut tok = field.split_whitespace();
        if tok.next() != Some("field") {
            return Err(err(ln, "expected `field p k modulus`"));
        }
        let p = num(ln, tok.next())?;
        let k = num(ln, tok.next())? as u32;
        let ctx = FieldCtx::new(p, k)?;
        let modulus = tok.next().ok_or_else(|| err(ln, "missing modulus"))?;
        let expected = if ctx.modulus().is_empty() {
            "-".to_string()
        } else {
            ctx.modulus().iter().map(u32::to_string).collect::<Vec<_>>().join(",")
        };
        if modulus != expected {
            return Err(err(ln, "modulus differs from the canonical choice"));
        }
        let (ln, shape_line) = next("shape")?;
        let mut tok = shape_line.split_whitespace();
        if tok.next() != Some("shape") {
            return Err(err(ln, "expected `shape r b d`"));
        }
        let shape = BlockShape::new(num(ln, tok.next())? as usize, num(ln, tok.next())? as usize, num(ln, tok.next())? as u32)?;
        let (ln, sym) = next("symmetric")?;
        let symmetric = match sym {
            "symmetric 1" => true,
            "symmetric 0" => false,
            _ => return Err(err(ln, "expected `symmetric 0|1`")),
        };
        let (ln, count_line) = next("terms")?;
        let count = count_line
            .strip_prefix("terms ")
            .and_then(|t| t.parse::<usize>().ok())
            .ok_or_else(|| err(ln, "expected `terms n`"))?;
        let mut terms = Vec::with_capacity(count);
        for _ in 0..count {
            let (ln, line) = next("term")?;
            let (rows, coeff) = line.split_once(' ').ok_or_else(|| err(ln, "expected `rows coefficient`"))?;
            let rows: Vec<Vec<u32>> = rows
                .split('|')
                .map(|row| row.split(',').map(|e| e.parse::<u32>()).collect::<Result<Vec<_>, _>>())
                .collect::<Result<_, _>>()
                .map_err(|_| err(ln, "bad exponent"))?;
            let mono = Monomial::from_rows(&rows).map_err(|e| err(ln, &e.to_string()))?;
            let c = ctx.elem(num(ln, Some(coeff))?).map_err(|e| err(ln, &e.to_string()))?;
            terms.push((mono, c));
        }
        Self::from_terms(shape, Arc::new(ctx), terms, symmetric)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(q: u64) -> Arc<FieldCtx> {
        Arc::new(FieldCtx::with_order(q).unwrap())
    }

    /// Term-by-term expansion straight from the representatives, with
    /// explicit powers: the independent evaluation route.
    fn naive_eval(f: &BlockPolynomial, args: &[PointBlock]) -> Fe {
        let c = f.ctx();
        let mut acc = c.zero();
        for (mono, coeff) in f.terms() {
            let rows: Vec<Vec<u32>> = mono.rows().map(<[u32]>::to_vec).collect();
            let mut orbit: Vec<Vec<Vec<u32>>> = Vec::new();
            if f.is_symmetric() {
                let idx: Vec<u16> = (0..rows.len() as u16).collect();
                for perm in permutations(&idx) {
                    let permuted: Vec<Vec<u32>> = perm.iter().map(|&i| rows[i as usize].clone()).collect();
                    if !orbit.contains(&permuted) {
                        orbit.push(permuted);
                    }
                }
            } else {
                orbit.push(rows);
            }
            for m in orbit {
                let mut term = coeff;
                for (block, row) in m.iter().enumerate() {
                    for (j, &e) in row.iter().enumerate() {
                        term = c.mul(term, c.pow(args[block].coords()[j], e as u64));
                    }
                }
                acc = c.add(acc, term);
            }
        }
        acc
    }

    fn permutations(items: &[u16]) -> Vec<Vec<u16>> {
        if items.len() <= 1 {
            return vec![items.to_vec()];
        }
        let mut out = Vec::new();
        for i in 0..items.len() {
            let mut rest = items.to_vec();
            let x = rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }

    fn random_point(c: &FieldCtx, b: usize, rng: &mut ChaCha8Rng) -> PointBlock {
        PointBlock((0..b).map(|_| c.sample(rng)).collect())
    }

    /// Brute-force orbit count: all r-tuples of bounded block monomials,
    /// grouped by their sorted row multiset.
    fn orbit_count_bruteforce(r: usize, b: usize, d: u32) -> usize {
        let mons = BlockMonomials::new(b, d);
        let m = mons.len();
        let mut seen = std::collections::HashSet::new();
        let total = m.pow(r as u32);
        for mut code in 0..total {
            let mut tuple = Vec::with_capacity(r);
            for _ in 0..r {
                tuple.push(code % m);
                code /= m;
            }
            tuple.sort_unstable();
            seen.insert(tuple);
        }
        seen.len()
    }

    #[test]
    fn orbit_basis_small_cases() {
        let basis = enumerate_orbit_basis(BlockShape::new(2, 1, 1).unwrap(), DEFAULT_BASIS_CAP).unwrap();
        let reps: Vec<Monomial> = basis.representatives().collect();
        let expect: Vec<Monomial> =
            [[0, 0], [1, 0], [1, 1]].iter().map(|e| Monomial::new(2, 1, e.to_vec()).unwrap()).collect();
        assert_eq!(reps, expect);

        let basis = enumerate_orbit_basis(BlockShape::new(2, 1, 2).unwrap(), DEFAULT_BASIS_CAP).unwrap();
        assert_eq!(basis.len(), 6);
        assert_eq!(orbit_count_bruteforce(2, 1, 2), 6);
        let reps: Vec<Vec<u32>> = basis.representatives().map(|m| m.exps).collect();
        assert_eq!(reps, vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![2, 0], vec![2, 1], vec![2, 2]]);

        let basis = enumerate_orbit_basis(BlockShape::new(3, 1, 1).unwrap(), DEFAULT_BASIS_CAP).unwrap();
        assert_eq!(basis.len(), 4);
    }

    #[test]
    fn orbit_basis_matches_bruteforce_and_formula() {
        for (r, b, d) in [(2, 2, 3), (3, 2, 2), (2, 3, 2), (4, 1, 3), (3, 1, 4)] {
            let shape = BlockShape::new(r, b, d).unwrap();
            let basis = enumerate_orbit_basis(shape, DEFAULT_BASIS_CAP).unwrap();
            assert_eq!(basis.len(), orbit_count_bruteforce(r, b, d), "{r} {b} {d}");
            assert_eq!(basis.len() as u128, shape.orbit_basis_size());
            for rep in basis.representatives() {
                assert!(rep.is_representative());
                assert_eq!(rep, rep.representative());
                for i in 0..r {
                    assert!(rep.block_degree(i) <= d);
                }
            }
        }
    }

    #[test]
    fn basis_cap_enforced() {
        let shape = BlockShape::new(3, 4, 56).unwrap();
        assert!(matches!(
            enumerate_orbit_basis(shape, DEFAULT_BASIS_CAP),
            Err(PolyError::BasisTooLarge { .. })
        ));
    }

    #[test]
    fn linear_sum_over_f3() {
        let c = ctx(3);
        let shape = BlockShape::new(2, 1, 1).unwrap();
        let x = Monomial::new(2, 1, vec![1, 0]).unwrap();
        let f = BlockPolynomial::from_terms(shape, c.clone(), vec![(x, c.one())], true).unwrap();
        let v = f.eval(&[PointBlock(vec![Fe(1)]), PointBlock(vec![Fe(2)])]).unwrap();
        assert_eq!(v, Fe(0));
    }

    #[test]
    fn product_orbit_is_plain_product() {
        let c = ctx(7);
        let shape = BlockShape::new(2, 1, 1).unwrap();
        let xy = Monomial::new(2, 1, vec![1, 1]).unwrap();
        let f = BlockPolynomial::from_terms(shape, c.clone(), vec![(xy, c.one())], true).unwrap();
        for a in c.elements() {
            for b in c.elements() {
                let (pa, pb) = (PointBlock(vec![a]), PointBlock(vec![b]));
                assert_eq!(f.eval(&[pa.clone(), pb.clone()]).unwrap(), c.mul(a, b));
                assert_eq!(f.eval(&[pb, pa]).unwrap(), c.mul(a, b));
            }
        }
    }

    #[test]
    fn constant_polynomial_sampling_is_uniform_scalar() {
        let c = ctx(5);
        let shape = BlockShape::new(2, 2, 0).unwrap();
        let basis = enumerate_orbit_basis(shape, DEFAULT_BASIS_CAP).unwrap();
        assert_eq!(basis.len(), 1);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let zeros = (0..5000).filter(|_| basis.sample(&c, &mut rng).is_zero()).count();
        let p: f64 = 0.2;
        let sigma = (5000.0 * p * (1.0 - p)).sqrt();
        assert!((zeros as f64 - 1000.0).abs() < 3.0 * sigma);
    }

    #[test]
    fn sampling_uniform_collisions() {
        // |P| = q^3 for r=2, b=1, d=1; with q=5 there are 125 polynomials.
        // Birthday oracle: expected colliding pairs among n samples is C(n,2)/125.
        let c = ctx(5);
        let basis = enumerate_orbit_basis(BlockShape::new(2, 1, 1).unwrap(), DEFAULT_BASIS_CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let mut counts: HashMap<String, u64> = HashMap::new();
        let n = 10_000u64;
        for _ in 0..n {
            *counts.entry(basis.sample(&c, &mut rng).to_text()).or_default() += 1;
        }
        assert_eq!(counts.len(), 125);
        let pairs: f64 = counts.values().map(|&k| (k * (k - 1) / 2) as f64).sum();
        let mean_pairs = (n * (n - 1) / 2) as f64 / 125.0;
        assert!((pairs - mean_pairs).abs() / mean_pairs < 0.05, "{pairs} vs {mean_pairs}");
    }

    #[test]
    fn symmetric_eval_invariant_under_all_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for (q, r, b, d) in [(7u64, 2usize, 2usize, 3u32), (9, 3, 1, 3), (5, 3, 2, 2), (4, 4, 1, 2)] {
            let c = ctx(q);
            let f = sample_symmetric(BlockShape::new(r, b, d).unwrap(), &c, &mut rng, DEFAULT_BASIS_CAP).unwrap();
            let idx: Vec<u16> = (0..r as u16).collect();
            let perms = permutations(&idx);
            for _ in 0..100 {
                let args: Vec<PointBlock> = (0..r).map(|_| random_point(&c, b, &mut rng)).collect();
                let base = f.eval(&args).unwrap();
                for p in &perms {
                    let permuted: Vec<PointBlock> = p.iter().map(|&i| args[i as usize].clone()).collect();
                    assert_eq!(f.eval(&permuted).unwrap(), base);
                }
            }
        }
    }

    #[test]
    fn eval_matches_naive_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for (q, r, b, d) in [(11u64, 2usize, 2usize, 4u32), (8, 3, 1, 3), (49, 2, 2, 8)] {
            let c = ctx(q);
            let f = sample_symmetric(BlockShape::new(r, b, d).unwrap(), &c, &mut rng, DEFAULT_BASIS_CAP).unwrap();
            for _ in 0..100 {
                let args: Vec<PointBlock> = (0..r).map(|_| random_point(&c, b, &mut rng)).collect();
                assert_eq!(f.eval(&args).unwrap(), naive_eval(&f, &args));
            }
        }
    }

    #[test]
    fn non_symmetric_eval_matches_naive() {
        let c = ctx(7);
        let shape = BlockShape::new(2, 1, 2).unwrap();
        let terms = vec![
            (Monomial::new(2, 1, vec![2, 0]).unwrap(), Fe(3)),
            (Monomial::new(2, 1, vec![0, 1]).unwrap(), Fe(5)),
        ];
        let f = BlockPolynomial::from_terms(shape, c.clone(), terms, false).unwrap();
        let args = [PointBlock(vec![Fe(2)]), PointBlock(vec![Fe(4)])];
        // 3*4 + 5*4 = 32 = 4 mod 7
        assert_eq!(f.eval(&args).unwrap(), Fe(4));
        assert_eq!(naive_eval(&f, &args), Fe(4));
    }

    #[test]
    fn linearity_of_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c = ctx(13);
        let shape = BlockShape::new(2, 2, 3).unwrap();
        let basis = enumerate_orbit_basis(shape, DEFAULT_BASIS_CAP).unwrap();
        for _ in 0..20 {
            let f = basis.sample(&c, &mut rng);
            let g = basis.sample(&c, &mut rng);
            let h = f.add(&g).unwrap();
            let args = [random_point(&c, 2, &mut rng), random_point(&c, 2, &mut rng)];
            assert_eq!(h.eval(&args).unwrap(), c.add(f.eval(&args).unwrap(), g.eval(&args).unwrap()));
        }
    }

    #[test]
    fn rejects_bad_terms() {
        let c = ctx(5);
        let shape = BlockShape::new(2, 1, 2).unwrap();
        let over = Monomial::new(2, 1, vec![3, 0]).unwrap();
        assert_eq!(
            BlockPolynomial::from_terms(shape, c.clone(), vec![(over, Fe(1))], true),
            Err(PolyError::DegreeBound { d: 2 })
        );
        let not_rep = Monomial::new(2, 1, vec![0, 1]).unwrap();
        assert_eq!(
            BlockPolynomial::from_terms(shape, c.clone(), vec![(not_rep, Fe(1))], true),
            Err(PolyError::NotRepresentative)
        );
        let f = BlockPolynomial::zero(shape, c).unwrap();
        assert!(matches!(f.eval(&[PointBlock(vec![Fe(1)])]), Err(PolyError::ShapeMismatch(_))));
        assert!(matches!(
            f.eval(&[PointBlock(vec![Fe(1), Fe(1)]), PointBlock(vec![Fe(1)])]),
            Err(PolyError::ShapeMismatch(_))
        ));
    }

    #[test]
    fn text_form_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for q in [7u64, 9] {
            let c = ctx(q);
            let f = sample_symmetric(BlockShape::new(2, 2, 3).unwrap(), &c, &mut rng, DEFAULT_BASIS_CAP).unwrap();
            let text = f.to_text();
            let g = BlockPolynomial::from_text(&text).unwrap();
            assert_eq!(f, g);
            assert_eq!(g.to_text(), text);
        }
        assert!(matches!(
            BlockPolynomial::from_text("blockpoly 1\nfield 4 1 -\n"),
            Err(PolyError::Field(FieldError::CompositeCharacteristic(4)))
        ));
        match BlockPolynomial::from_text("blockpoly 1\nfield 5 1 -\nshape 2 1 1\nsymmetric 1\nterms 1\n1|0 x\n") {
            Err(PolyError::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn point_encoding_round_trips() {
        let c = ctx(9);
        let pts = all_points(&c, 2);
        assert_eq!(pts.len(), 81);
        for (i, p) in pts.iter().enumerate() {
            assert_eq!(p.encode(&c), i as u64);
        }
        assert_eq!(pts[1], PointBlock(vec![Fe(1), Fe(0)]));
    }
}
