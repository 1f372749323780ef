//! Bounded complexes of twisted free sheaves on projective space and the
//! derived-category constructions built on them: dual, tensor, braiding,
//! eigen-splitting, cone, shift, composition.
//!
//! Conventions (fixed globally):
//! - tensor differential on the block c^i (x) d^j is d_c (x) 1 + (-1)^i 1 (x) d_d;
//! - braiding carries sign (-1)^(ij) on c^i (x) c^j;
//! - dual is the plain transpose, so dual(dual(c)) == c literally;
//! - cone(f)^k = src^(k+1) + tgt^k with differential [[-d_src, 0], [f, d_tgt]];
//! - shift(c, k)^i = c^(i+k), differential scaled by (-1)^k.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactla::{q, q_frac, RatMatrix, Q};
use crate::polyring::Poly;

/// Symmetry sign: `Plus` for orthogonal, `Minus` for symplectic.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn from_value(v: i64) -> Sign {
        if v >= 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn flip(self) -> Sign {
        Sign::from_value(-self.value())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

fn parity_sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// A direct sum of line bundles O(d_1) + ... + O(d_r).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FreeSheaf {
    pub twists: Vec<i32>,
}

static EMPTY_SHEAF: FreeSheaf = FreeSheaf { twists: Vec::new() };

impl FreeSheaf {
    pub fn new(twists: Vec<i32>) -> Self {
        FreeSheaf { twists }
    }

    pub fn zero() -> Self {
        FreeSheaf::default()
    }

    pub fn rank(&self) -> usize {
        self.twists.len()
    }

    pub fn is_zero(&self) -> bool {
        self.twists.is_empty()
    }

    pub fn dual(&self) -> FreeSheaf {
        FreeSheaf { twists: self.twists.iter().map(|t| -t).collect() }
    }

    pub fn direct_sum(&self, other: &FreeSheaf) -> FreeSheaf {
        let mut twists = self.twists.clone();
        twists.extend_from_slice(&other.twists);
        FreeSheaf { twists }
    }

    /// Twists of the tensor product, index (a, b) at a * other.rank() + b.
    pub fn tensor(&self, other: &FreeSheaf) -> FreeSheaf {
        let twists = self.twists.iter().flat_map(|a| other.twists.iter().map(move |b| a + b)).collect();
        FreeSheaf { twists }
    }
}

impl fmt::Display for FreeSheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.twists.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.twists.iter().map(|t| format!("O({t})")).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// A sheaf map between twisted free sheaves: a matrix of homogeneous
/// polynomials, entry (i, j) of degree target[i] - source[j].
#[derive(Clone, PartialEq, Eq)]
pub struct PolyMatrix {
    nvars: usize,
    source: FreeSheaf,
    target: FreeSheaf,
    entries: Vec<Poly>,
}

impl fmt::Debug for PolyMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "PolyMatrix [{}] -> [{}]", self.source, self.target)?;
        for r in 0..self.rows() {
            let row: Vec<String> = (0..self.cols()).map(|c| self.get(r, c).to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

impl PolyMatrix {
    pub fn zero(nvars: usize, source: FreeSheaf, target: FreeSheaf) -> Self {
        let entries = vec![Poly::zero(nvars); source.rank() * target.rank()];
        PolyMatrix { nvars, source, target, entries }
    }

    pub fn identity(nvars: usize, sheaf: FreeSheaf) -> Self {
        let mut m = PolyMatrix::zero(nvars, sheaf.clone(), sheaf);
        for i in 0..m.rows() {
            m.set(i, i, Poly::one(nvars));
        }
        m
    }

    /// Builds a matrix from rows of polynomials, checking every forced degree.
    pub fn new(nvars: usize, source: FreeSheaf, target: FreeSheaf, rows: Vec<Vec<Poly>>) -> Result<Self> {
        if rows.len() != target.rank() || rows.iter().any(|r| r.len() != source.rank()) {
            return Err(Error::ShapeMismatch(format!(
                "expected a {}x{} matrix for [{}] -> [{}]",
                target.rank(),
                source.rank(),
                source,
                target
            )));
        }
        let entries: Vec<Poly> = rows.into_iter().flatten().collect();
        if entries.iter().any(|p| p.nvars() != nvars) {
            return Err(Error::ShapeMismatch("polynomial variable count differs from the ambient space".into()));
        }
        let m = PolyMatrix { nvars, source, target, entries };
        m.check_degrees()?;
        Ok(m)
    }

    /// Constant matrix; entries off the degree-0 positions must vanish.
    pub fn from_constants(nvars: usize, source: FreeSheaf, target: FreeSheaf, m: &RatMatrix) -> Result<Self> {
        assert_eq!((m.rows(), m.cols()), (target.rank(), source.rank()), "constant matrix shape");
        let mut out = PolyMatrix::zero(nvars, source, target);
        for r in 0..m.rows() {
            for (c, v) in m.row(r) {
                out.set(r, *c, Poly::constant(nvars, v.clone()));
            }
        }
        out.check_degrees()?;
        Ok(out)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn source(&self) -> &FreeSheaf {
        &self.source
    }

    pub fn target(&self) -> &FreeSheaf {
        &self.target
    }

    pub fn rows(&self) -> usize {
        self.target.rank()
    }

    pub fn cols(&self) -> usize {
        self.source.rank()
    }

    pub fn get(&self, r: usize, c: usize) -> &Poly {
        &self.entries[r * self.cols() + c]
    }

    /// Unchecked store; callers keep degrees consistent.
    pub fn set(&mut self, r: usize, c: usize, p: Poly) {
        let cols = self.cols();
        self.entries[r * cols + c] = p;
    }

    pub fn required_degree(&self, r: usize, c: usize) -> i32 {
        self.target.twists[r] - self.source.twists[c]
    }

    pub fn check_degrees(&self) -> Result<()> {
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                let e = self.required_degree(r, c);
                if !self.get(r, c).is_homogeneous_of(e) {
                    return Err(Error::DegreeMismatch(format!(
                        "entry ({r}, {c}) = {} must be homogeneous of degree {e}",
                        self.get(r, c)
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn first_nonzero(&self) -> Option<(usize, usize)> {
        let i = self.entries.iter().position(|p| !p.is_zero())?;
        Some((i / self.cols(), i % self.cols()))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        if other.target != self.source {
            return Err(Error::ShapeMismatch(format!(
                "cannot compose [{}] -> [{}] after [{}] -> [{}]",
                self.source, self.target, other.source, other.target
            )));
        }
        let mut out = PolyMatrix::zero(self.nvars, other.source.clone(), self.target.clone());
        for r in 0..self.rows() {
            for k in 0..self.cols() {
                let a = self.get(r, k);
                if a.is_zero() {
                    continue;
                }
                for c in 0..other.cols() {
                    let b = other.get(k, c);
                    if b.is_zero() {
                        continue;
                    }
                    let idx = r * out.cols() + c;
                    out.entries[idx] = out.entries[idx].add(&a.mul(b));
                }
            }
        }
        Ok(out)
    }

    fn same_shape(&self, other: &PolyMatrix) -> Result<()> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ShapeMismatch(format!(
                "[{}] -> [{}] vs [{}] -> [{}]",
                self.source, self.target, other.source, other.target
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.same_shape(other)?;
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect();
        Ok(PolyMatrix { entries, ..self.clone() })
    }

    pub fn sub(&self, other: &PolyMatrix) -> Result<PolyMatrix> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PolyMatrix {
        self.scale(&-Q::one())
    }

    pub fn scale(&self, s: &Q) -> PolyMatrix {
        PolyMatrix { entries: self.entries.iter().map(|p| p.scale(s)).collect(), ..self.clone() }
    }

    /// The dual map: [target]^v -> [source]^v.
    pub fn transpose(&self) -> PolyMatrix {
        let mut out = PolyMatrix::zero(self.nvars, self.target.dual(), self.source.dual());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    /// Kronecker product `self (x) other`, index (a, b) at a * other_dim + b.
    pub fn kron(&self, other: &PolyMatrix) -> PolyMatrix {
        let source = self.source.tensor(&other.source);
        let target = self.target.tensor(&other.target);
        let mut out = PolyMatrix::zero(self.nvars, source, target);
        let (orows, ocols) = (other.rows(), other.cols());
        for r1 in 0..self.rows() {
            for c1 in 0..self.cols() {
                let a = self.get(r1, c1);
                if a.is_zero() {
                    continue;
                }
                for r2 in 0..orows {
                    for c2 in 0..ocols {
                        let b = other.get(r2, c2);
                        if !b.is_zero() {
                            out.set(r1 * orows + r2, c1 * ocols + c2, a.mul(b));
                        }
                    }
                }
            }
        }
        out
    }

    /// Adds `block` into the sub-matrix starting at (row_off, col_off).
    pub fn add_block(&mut self, row_off: usize, col_off: usize, block: &PolyMatrix) {
        for r in 0..block.rows() {
            for c in 0..block.cols() {
                let p = block.get(r, c);
                if p.is_zero() {
                    continue;
                }
                let idx = (row_off + r) * self.cols() + col_off + c;
                self.entries[idx] = self.entries[idx].add(p);
            }
        }
    }

    /// Sub-matrix on the given row and column ranges.
    pub fn sub_block(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> PolyMatrix {
        let source = FreeSheaf::new(self.source.twists[cols.clone()].to_vec());
        let target = FreeSheaf::new(self.target.twists[rows.clone()].to_vec());
        let mut out = PolyMatrix::zero(self.nvars, source, target);
        for (i, r) in rows.clone().enumerate() {
            for (j, c) in cols.clone().enumerate() {
                out.set(i, j, self.get(r, c).clone());
            }
        }
        out
    }

    pub fn evaluate(&self, point: &[Q]) -> RatMatrix {
        let mut trip = Vec::new();
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                let v = self.get(r, c).evaluate(point);
                if !v.is_zero() {
                    trip.push((r, c, v));
                }
            }
        }
        RatMatrix::from_triplets(self.rows(), self.cols(), trip)
    }

    /// Row-major entry strings, as written in input documents.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.rows()).map(|r| (0..self.cols()).map(|c| self.get(r, c).to_string()).collect()).collect()
    }
}

/// A bounded cochain complex of twisted free sheaves, stored over a contiguous
/// degree range with zero terms trimmed at both ends.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TwistedComplex {
    nvars: usize,
    lo: i32,
    terms: Vec<FreeSheaf>,
    diffs: Vec<PolyMatrix>,
}

impl TwistedComplex {
    /// `terms[k]` sits in degree `lo + k`; `diffs[k]` maps `terms[k]` to `terms[k + 1]`.
    pub fn new(nvars: usize, lo: i32, terms: Vec<FreeSheaf>, diffs: Vec<PolyMatrix>) -> Result<Self> {
        if diffs.len() + 1 != terms.len().max(1) {
            return Err(Error::ShapeMismatch(format!(
                "{} terms need {} differentials, got {}",
                terms.len(),
                terms.len().saturating_sub(1),
                diffs.len()
            )));
        }
        for (k, d) in diffs.iter().enumerate() {
            if d.source != terms[k] || d.target != terms[k + 1] || d.nvars != nvars {
                return Err(Error::ShapeMismatch(format!(
                    "differential in degree {} does not map [{}] to [{}]",
                    lo + k as i32,
                    terms[k],
                    terms[k + 1]
                )));
            }
            d.check_degrees()
                .map_err(|e| Error::DegreeMismatch(format!("differential in degree {}: {e}", lo + k as i32)))?;
        }
        Ok(Self::trimmed(nvars, lo, terms, diffs))
    }

    fn trimmed(nvars: usize, mut lo: i32, mut terms: Vec<FreeSheaf>, mut diffs: Vec<PolyMatrix>) -> Self {
        while terms.last().is_some_and(FreeSheaf::is_zero) {
            terms.pop();
            diffs.pop();
        }
        let lead = terms.iter().take_while(|t| t.is_zero()).count();
        if lead > 0 {
            terms.drain(..lead);
            diffs.drain(..lead.min(diffs.len()));
            lo += lead as i32;
        }
        if terms.is_empty() {
            lo = 0;
            diffs.clear();
        }
        TwistedComplex { nvars, lo, terms, diffs }
    }

    /// Builds from a degree map; missing differentials are zero.
    pub fn from_map(
        nvars: usize,
        terms: &BTreeMap<i32, FreeSheaf>,
        diffs: &BTreeMap<i32, PolyMatrix>,
    ) -> Result<Self> {
        let (Some(&lo), Some(&hi)) = (terms.keys().next(), terms.keys().next_back()) else {
            return Ok(Self::zero(nvars));
        };
        if let Some(&k) = diffs.keys().find(|&&k| k < lo || k >= hi) {
            return Err(Error::ShapeMismatch(format!("differential in degree {k} has no target term")));
        }
        let ts: Vec<FreeSheaf> = (lo..=hi).map(|i| terms.get(&i).cloned().unwrap_or_default()).collect();
        let ds = (lo..hi)
            .map(|i| {
                let k = (i - lo) as usize;
                diffs.get(&i).cloned().unwrap_or_else(|| PolyMatrix::zero(nvars, ts[k].clone(), ts[k + 1].clone()))
            })
            .collect();
        Self::new(nvars, lo, ts, ds)
    }

    pub fn zero(nvars: usize) -> Self {
        TwistedComplex { nvars, lo: 0, terms: Vec::new(), diffs: Vec::new() }
    }

    pub fn single(nvars: usize, sheaf: FreeSheaf, degree: i32) -> Self {
        Self::trimmed(nvars, degree, vec![sheaf], Vec::new())
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest degree with a nonzero term (0 for the zero complex).
    pub fn min_degree(&self) -> i32 {
        self.lo
    }

    /// Highest degree with a nonzero term (-1 for the zero complex).
    pub fn max_degree(&self) -> i32 {
        self.lo + self.terms.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.min_degree()..=self.max_degree()
    }

    pub fn term(&self, i: i32) -> &FreeSheaf {
        let k = i - self.lo;
        if k < 0 || k as usize >= self.terms.len() {
            &EMPTY_SHEAF
        } else {
            &self.terms[k as usize]
        }
    }

    pub fn rank(&self, i: i32) -> usize {
        self.term(i).rank()
    }

    /// d^i : term(i) -> term(i+1), zero outside the stored range.
    pub fn differential(&self, i: i32) -> PolyMatrix {
        let k = i - self.lo;
        if k >= 0 && (k as usize) < self.diffs.len() {
            self.diffs[k as usize].clone()
        } else {
            PolyMatrix::zero(self.nvars, self.term(i).clone(), self.term(i + 1).clone())
        }
    }

    pub fn differential_ref(&self, i: i32) -> Option<&PolyMatrix> {
        let k = i - self.lo;
        (k >= 0 && (k as usize) < self.diffs.len()).then(|| &self.diffs[k as usize])
    }

    /// Checks entry degrees and d^(i+1) ∘ d^i = 0 as polynomial identities.
    pub fn validate(&self) -> Result<()> {
        for i in self.degrees() {
            if let Some(d) = self.differential_ref(i) {
                d.check_degrees().map_err(|e| Error::DegreeMismatch(format!("differential in degree {i}: {e}")))?;
            }
        }
        for i in self.degrees() {
            if let (Some(d0), Some(d1)) = (self.differential_ref(i), self.differential_ref(i + 1)) {
                let dd = d1.compose(d0)?;
                if let Some((row, col)) = dd.first_nonzero() {
                    return Err(Error::NotAComplex { degree: i, row, col });
                }
            }
        }
        Ok(())
    }
}

/// Free-function form of [`TwistedComplex::validate`].
pub fn validate_complex(c: &TwistedComplex) -> Result<()> {
    c.validate()
}

/// A degree-preserving map of complexes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChainMap {
    source: TwistedComplex,
    target: TwistedComplex,
    components: BTreeMap<i32, PolyMatrix>,
}

impl ChainMap {
    /// Components outside the map are zero; shapes and degrees are checked.
    pub fn new(source: TwistedComplex, target: TwistedComplex, components: BTreeMap<i32, PolyMatrix>) -> Result<Self> {
        for (&i, m) in &components {
            if m.source != *source.term(i) || m.target != *target.term(i) {
                return Err(Error::ShapeMismatch(format!(
                    "component in degree {i} does not map [{}] to [{}]",
                    source.term(i),
                    target.term(i)
                )));
            }
            m.check_degrees()
                .map_err(|e| Error::DegreeMismatch(format!("chain map component in degree {i}: {e}")))?;
        }
        let components = components.into_iter().filter(|(_, m)| !m.is_zero()).collect();
        Ok(ChainMap { source, target, components })
    }

    pub fn identity(c: &TwistedComplex) -> Self {
        let components = c.degrees().map(|i| (i, PolyMatrix::identity(c.nvars, c.term(i).clone()))).collect();
        ChainMap { source: c.clone(), target: c.clone(), components }
    }

    pub fn zero(source: &TwistedComplex, target: &TwistedComplex) -> Self {
        ChainMap { source: source.clone(), target: target.clone(), components: BTreeMap::new() }
    }

    pub fn source(&self) -> &TwistedComplex {
        &self.source
    }

    pub fn target(&self) -> &TwistedComplex {
        &self.target
    }

    pub fn component(&self, i: i32) -> PolyMatrix {
        self.components.get(&i).cloned().unwrap_or_else(|| {
            PolyMatrix::zero(self.source.nvars, self.source.term(i).clone(), self.target.term(i).clone())
        })
    }

    /// Degrees carrying a nonzero component.
    pub fn support(&self) -> impl Iterator<Item = i32> + '_ {
        self.components.keys().copied()
    }

    /// Checks d_target ∘ f^i = f^(i+1) ∘ d_source in every degree.
    pub fn is_chain_map(&self) -> Result<()> {
        let lo = self.source.min_degree().min(self.target.min_degree()) - 1;
        let hi = self.source.max_degree().max(self.target.max_degree()) + 1;
        for i in lo..=hi {
            let lhs = self.target.differential(i).compose(&self.component(i))?;
            let rhs = self.component(i + 1).compose(&self.source.differential(i))?;
            if let Some((row, col)) = lhs.sub(&rhs)?.first_nonzero() {
                return Err(Error::NotAChainMap { degree: i, row, col });
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &ChainMap) -> Result<ChainMap> {
        if self.source != other.source || self.target != other.target {
            return Err(Error::ShapeMismatch("chain maps with different endpoints".into()));
        }
        let mut components = self.components.clone();
        for (&i, m) in &other.components {
            let sum = match components.get(&i) {
                Some(a) => a.add(m)?,
                None => m.clone(),
            };
            components.insert(i, sum);
        }
        ChainMap::new(self.source.clone(), self.target.clone(), components)
    }

    pub fn scale(&self, s: &Q) -> ChainMap {
        let components = self.components.iter().map(|(&i, m)| (i, m.scale(s))).collect();
        ChainMap { components, ..self.clone() }
    }
}

/// `second ∘ first`.
pub fn compose(second: &ChainMap, first: &ChainMap) -> Result<ChainMap> {
    if first.target != second.source {
        return Err(Error::ShapeMismatch("target of the first map is not the source of the second".into()));
    }
    let mut components = BTreeMap::new();
    for (&i, a) in &first.components {
        if let Some(b) = second.components.get(&i) {
            components.insert(i, b.compose(a)?);
        }
    }
    ChainMap::new(first.source.clone(), second.target.clone(), components)
}

pub fn is_chain_map(f: &ChainMap) -> Result<()> {
    f.is_chain_map()
}

/// One summand c^i (x) d^j of a tensor term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorBlock {
    pub left: i32,
    pub right: i32,
    pub offset: usize,
    pub left_rank: usize,
    pub right_rank: usize,
}

impl TensorBlock {
    pub fn len(&self) -> usize {
        self.left_rank * self.right_rank
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, a: usize, b: usize) -> usize {
        self.offset + a * self.right_rank + b
    }
}

/// Nonzero summands of (c (x) d)^k in increasing left degree.
pub fn tensor_blocks(c: &TwistedComplex, d: &TwistedComplex, k: i32) -> Vec<TensorBlock> {
    let mut out = Vec::new();
    let mut offset = 0;
    for i in c.degrees() {
        let j = k - i;
        let (lr, rr) = (c.rank(i), d.rank(j));
        if lr == 0 || rr == 0 {
            continue;
        }
        out.push(TensorBlock { left: i, right: j, offset, left_rank: lr, right_rank: rr });
        offset += lr * rr;
    }
    out
}

fn find_block(blocks: &[TensorBlock], left: i32) -> Option<&TensorBlock> {
    blocks.iter().find(|b| b.left == left)
}

fn tensor_range(c: &TwistedComplex, d: &TwistedComplex) -> std::ops::RangeInclusive<i32> {
    if c.is_zero() || d.is_zero() {
        #[allow(clippy::reversed_empty_ranges)]
        return 0..=-1;
    }
    (c.min_degree() + d.min_degree())..=(c.max_degree() + d.max_degree())
}

pub fn tensor(c: &TwistedComplex, d: &TwistedComplex) -> TwistedComplex {
    let nvars = c.nvars;
    let range = tensor_range(c, d);
    let lo = *range.start();
    let terms: Vec<FreeSheaf> = range
        .clone()
        .map(|k| {
            let mut s = FreeSheaf::zero();
            for b in tensor_blocks(c, d, k) {
                s = s.direct_sum(&c.term(b.left).tensor(d.term(b.right)));
            }
            s
        })
        .collect();
    let mut diffs = Vec::new();
    for k in range {
        if k == lo + terms.len() as i32 - 1 {
            break;
        }
        let src = tensor_blocks(c, d, k);
        let tgt = tensor_blocks(c, d, k + 1);
        let kk = (k - lo) as usize;
        let mut m = PolyMatrix::zero(nvars, terms[kk].clone(), terms[kk + 1].clone());
        for b in &src {
            if let Some(t) = find_block(&tgt, b.left + 1) {
                let block = c.differential(b.left).kron(&PolyMatrix::identity(nvars, d.term(b.right).clone()));
                m.add_block(t.offset, b.offset, &block);
            }
            if let Some(t) = find_block(&tgt, b.left) {
                let block = PolyMatrix::identity(nvars, c.term(b.left).clone()).kron(&d.differential(b.right));
                let block = if parity_sign(b.left as i64) < 0 { block.neg() } else { block };
                m.add_block(t.offset, b.offset, &block);
            }
        }
        diffs.push(m);
    }
    TwistedComplex::trimmed(nvars, lo, terms, diffs)
}

/// f (x) g : c (x) d -> c' (x) d', blockwise f^i (x) g^j.
pub fn tensor_maps(f: &ChainMap, g: &ChainMap) -> Result<ChainMap> {
    let source = tensor(&f.source, &g.source);
    let target = tensor(&f.target, &g.target);
    let mut components = BTreeMap::new();
    for k in source.degrees() {
        let sb = tensor_blocks(&f.source, &g.source, k);
        let tb = tensor_blocks(&f.target, &g.target, k);
        let mut m = PolyMatrix::zero(source.nvars, source.term(k).clone(), target.term(k).clone());
        for b in &sb {
            if let Some(t) = tb.iter().find(|t| t.left == b.left) {
                m.add_block(t.offset, b.offset, &f.component(b.left).kron(&g.component(b.right)));
            }
        }
        components.insert(k, m);
    }
    ChainMap::new(source, target, components)
}

/// Factor swap on c (x) c with sign (-1)^(ij) on c^i (x) c^j.
pub fn braiding(c: &TwistedComplex) -> ChainMap {
    let t = tensor(c, c);
    let mut components = BTreeMap::new();
    for k in t.degrees() {
        let blocks = tensor_blocks(c, c, k);
        let n = t.rank(k);
        let mut trip = Vec::new();
        for b in &blocks {
            let other = find_block(&blocks, b.right).expect("swapped block exists");
            let s = parity_sign(b.left as i64 * b.right as i64);
            for a in 0..b.left_rank {
                for bb in 0..b.right_rank {
                    trip.push((other.index(bb, a), b.index(a, bb), q(s)));
                }
            }
        }
        let m = RatMatrix::from_triplets(n, n, trip);
        let pm = PolyMatrix::from_constants(c.nvars, t.term(k).clone(), t.term(k).clone(), &m)
            .expect("swap preserves twists");
        components.insert(k, pm);
    }
    ChainMap { source: t.clone(), target: t, components }
}

/// The chosen eigencomplex of the braiding on c (x) c with its canonical maps.
#[derive(Clone, Debug)]
pub struct PmPart {
    pub complex: TwistedComplex,
    /// c (x) c -> part, the idempotent (1 ± θ)/2 followed by the coordinate change.
    pub projection: ChainMap,
    /// part -> c (x) c.
    pub inclusion: ChainMap,
}

/// Basis of the sign-eigenspace of θ in degree k: each entry lists
/// (coordinate, coefficient) pairs of a basis vector and its twist.
fn eigen_basis(c: &TwistedComplex, k: i32, sign: Sign) -> Vec<(Vec<(usize, i64)>, i32)> {
    let s = sign.value();
    let blocks = tensor_blocks(c, c, k);
    let mut out = Vec::new();
    for b in &blocks {
        if b.left > b.right {
            continue;
        }
        let (ti, tj) = (&c.term(b.left).twists, &c.term(b.right).twists);
        if b.left < b.right {
            let other = find_block(&blocks, b.right).expect("swapped block exists");
            let e = s * parity_sign(b.left as i64 * b.right as i64);
            for (a, &ta) in ti.iter().enumerate().take(b.left_rank) {
                for (bb, &tb) in tj.iter().enumerate().take(b.right_rank) {
                    out.push((vec![(b.index(a, bb), 1), (other.index(bb, a), e)], ta + tb));
                }
            }
        } else {
            let e = s * parity_sign(b.left as i64);
            for a in 0..b.left_rank {
                if e == 1 {
                    out.push((vec![(b.index(a, a), 1)], 2 * ti[a]));
                }
                for bb in a + 1..b.right_rank {
                    out.push((vec![(b.index(a, bb), 1), (b.index(bb, a), e)], ti[a] + ti[bb]));
                }
            }
        }
    }
    out
}

pub fn pm_part(c: &TwistedComplex, sign: Sign) -> PmPart {
    let nvars = c.nvars;
    let t = tensor(c, c);
    let mut incl = BTreeMap::new();
    let mut proj = BTreeMap::new();
    let mut part_terms = BTreeMap::new();
    for k in t.degrees() {
        let basis = eigen_basis(c, k, sign);
        let part = FreeSheaf::new(basis.iter().map(|(_, tw)| *tw).collect());
        let n = t.rank(k);
        let mut it = Vec::new();
        let mut pt = Vec::new();
        for (col, (v, _)) in basis.iter().enumerate() {
            let w = if v.len() == 1 { q(1) } else { q_frac(1, 2) };
            for &(row, e) in v {
                it.push((row, col, q(e)));
                pt.push((col, row, w.clone() * q(e)));
            }
        }
        let i_m = RatMatrix::from_triplets(n, basis.len(), it);
        let p_m = RatMatrix::from_triplets(basis.len(), n, pt);
        incl.insert(k, PolyMatrix::from_constants(nvars, part.clone(), t.term(k).clone(), &i_m).expect("twists match"));
        proj.insert(k, PolyMatrix::from_constants(nvars, t.term(k).clone(), part.clone(), &p_m).expect("twists match"));
        part_terms.insert(k, part);
    }
    let mut part_diffs = BTreeMap::new();
    for k in t.degrees() {
        if k == t.max_degree() {
            break;
        }
        let d = proj[&(k + 1)].compose(&t.differential(k).compose(&incl[&k]).expect("shapes")).expect("shapes");
        part_diffs.insert(k, d);
    }
    let complex = TwistedComplex::from_map(nvars, &part_terms, &part_diffs).expect("eigencomplex is well formed");
    let reindex = |m: BTreeMap<i32, PolyMatrix>| -> BTreeMap<i32, PolyMatrix> {
        m.into_iter().filter(|(_, pm)| pm.rows() > 0 && pm.cols() > 0).collect()
    };
    let inclusion = ChainMap::new(complex.clone(), t.clone(), reindex(incl)).expect("inclusion shapes");
    let projection = ChainMap::new(t, complex.clone(), reindex(proj)).expect("projection shapes");
    PmPart { complex, projection, inclusion }
}

/// Plain-transpose dual: term(i) = term(-i)^v, d^i = transpose(d^(-i-1)).
pub fn dual(c: &TwistedComplex) -> TwistedComplex {
    if c.is_zero() {
        return c.clone();
    }
    let lo = -c.max_degree();
    let terms: Vec<FreeSheaf> = (lo..=-c.min_degree()).map(|i| c.term(-i).dual()).collect();
    let diffs = (lo..-c.min_degree()).map(|i| c.differential(-i - 1).transpose()).collect();
    TwistedComplex::trimmed(c.nvars, lo, terms, diffs)
}

/// shift(c, k)^i = c^(i+k), differential multiplied by (-1)^k.
pub fn shift(c: &TwistedComplex, k: i32) -> TwistedComplex {
    let s = q(parity_sign(k as i64));
    TwistedComplex {
        nvars: c.nvars,
        lo: if c.is_zero() { 0 } else { c.lo - k },
        terms: c.terms.clone(),
        diffs: c.diffs.iter().map(|d| d.scale(&s)).collect(),
    }
}

/// f[k] : shift(src, k) -> shift(tgt, k), component i is f^(i+k).
pub fn shift_map(f: &ChainMap, k: i32) -> ChainMap {
    let components = f.components.iter().map(|(&i, m)| (i - k, m.clone())).collect();
    ChainMap { source: shift(&f.source, k), target: shift(&f.target, k), components }
}

/// cone(f)^k = src^(k+1) + tgt^k with differential [[-d_src, 0], [f, d_tgt]].
pub fn cone(f: &ChainMap) -> Result<TwistedComplex> {
    f.is_chain_map()?;
    let (s, t) = (&f.source, &f.target);
    let nvars = s.nvars;
    let lo = (s.min_degree() - 1).min(t.min_degree());
    let hi = (s.max_degree() - 1).max(t.max_degree());
    let term = |k: i32| s.term(k + 1).direct_sum(t.term(k));
    let terms: Vec<FreeSheaf> = (lo..=hi).map(term).collect();
    let mut diffs = Vec::new();
    for k in lo..hi {
        let mut m = PolyMatrix::zero(nvars, term(k), term(k + 1));
        let (s1, s2) = (s.rank(k + 1), s.rank(k + 2));
        m.add_block(0, 0, &s.differential(k + 1).neg());
        m.add_block(s2, 0, &f.component(k + 1));
        m.add_block(s2, s1, &t.differential(k));
        diffs.push(m);
    }
    Ok(TwistedComplex::trimmed(nvars, lo, terms, diffs))
}

/// Inclusion tgt -> cone(f) and projection cone(f) -> src[1] (the latter with
/// the sign making it a chain map for the shift convention above).
pub fn cone_maps(f: &ChainMap) -> Result<(TwistedComplex, ChainMap, ChainMap)> {
    let c = cone(f)?;
    let (s, t) = (&f.source, &f.target);
    let s1 = shift(s, 1);
    let mut incl = BTreeMap::new();
    let mut proj = BTreeMap::new();
    for k in c.degrees() {
        let (sr, tr) = (s.rank(k + 1), t.rank(k));
        if tr > 0 {
            let mut m = PolyMatrix::zero(s.nvars, t.term(k).clone(), c.term(k).clone());
            m.add_block(sr, 0, &PolyMatrix::identity(s.nvars, t.term(k).clone()));
            incl.insert(k, m);
        }
        if sr > 0 {
            let mut m = PolyMatrix::zero(s.nvars, c.term(k).clone(), s1.term(k).clone());
            m.add_block(0, 0, &PolyMatrix::identity(s.nvars, s.term(k + 1).clone()));
            proj.insert(k, m);
        }
    }
    let incl = ChainMap::new(t.clone(), c.clone(), incl)?;
    let proj = ChainMap::new(c.clone(), s1, proj)?;
    Ok((c, incl, proj))
}

/// The adjoint of a pairing matrix `psi` on W0 (x) W0 as a chain map W -> dual(W).
///
/// `psi` is given as the map W0 -> W0^v whose entry (c, b) is psi(e_c (x) e_b).
/// Because W sits in degrees <= 0 and dual(W) in degrees >= 0, the lift has a
/// single component in degree 0; the chain-map equations in degrees -1 and 0
/// are exactly the two descent identities.
pub fn lift_pairing(w: &TwistedComplex, psi: &PolyMatrix) -> Result<ChainMap> {
    if w.max_degree() > 0 {
        return Err(Error::ShapeMismatch("resolution must live in degrees <= 0".into()));
    }
    let w0 = w.term(0).clone();
    if *psi.source() != w0 || *psi.target() != w0.dual() {
        return Err(Error::ShapeMismatch(format!("pairing must map [{w0}] to [{}]", w0.dual())));
    }
    psi.check_degrees()?;
    let d = w.differential(-1);
    if let Some((r, c)) = psi.compose(&d)?.first_nonzero() {
        return Err(Error::DescentFailure(format!("psi ∘ (1 (x) d) is nonzero at entry ({r}, {c})")));
    }
    if let Some((r, c)) = d.transpose().compose(psi)?.first_nonzero() {
        return Err(Error::DescentFailure(format!("psi ∘ (d (x) 1) is nonzero at entry ({r}, {c})")));
    }
    let dw = dual(w);
    let mut components = BTreeMap::new();
    components.insert(0, psi.clone());
    let f = ChainMap::new(w.clone(), dw, components)?;
    f.is_chain_map().map_err(|e| Error::NoLift(e.to_string()))?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testgen;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(s: &str, n: usize) -> Poly {
        Poly::parse(s, n).unwrap()
    }

    fn fs(t: &[i32]) -> FreeSheaf {
        FreeSheaf::new(t.to_vec())
    }

    /// O(-2) -> O(-1)^2 by (x1, -x0) on P^2, in degrees -1, 0.
    fn koszul_p2() -> TwistedComplex {
        let d = PolyMatrix::new(3, fs(&[-2]), fs(&[-1, -1]), vec![vec![p("x1", 3)], vec![p("-x0", 3)]]).unwrap();
        TwistedComplex::new(3, -1, vec![fs(&[-2]), fs(&[-1, -1])], vec![d]).unwrap()
    }

    #[test]
    fn validate_examples() {
        koszul_p2().validate().unwrap();
        TwistedComplex::single(2, fs(&[0, 3]), 0).validate().unwrap();
        let x = PolyMatrix::new(2, fs(&[0]), fs(&[1]), vec![vec![p("x0", 2)]]).unwrap();
        let y = PolyMatrix::new(2, fs(&[1]), fs(&[2]), vec![vec![p("x0", 2)]]).unwrap();
        let c = TwistedComplex::new(2, 0, vec![fs(&[0]), fs(&[1]), fs(&[2])], vec![x, y]).unwrap();
        assert!(matches!(c.validate(), Err(Error::NotAComplex { degree: 0, .. })));
    }

    #[test]
    fn degree_mismatch_is_rejected() {
        let e = PolyMatrix::new(2, fs(&[0]), fs(&[2]), vec![vec![p("x0", 2)]]);
        assert!(matches!(e, Err(Error::DegreeMismatch(_))));
        // negative forced degree only admits zero
        assert!(PolyMatrix::new(2, fs(&[0]), fs(&[-1]), vec![vec![p("1", 2)]]).is_err());
        assert!(PolyMatrix::new(2, fs(&[0]), fs(&[-1]), vec![vec![Poly::zero(2)]]).is_ok());
    }

    #[test]
    fn dual_examples() {
        let o = TwistedComplex::single(3, fs(&[4]), 0);
        assert_eq!(dual(&o), TwistedComplex::single(3, fs(&[-4]), 0));
        let d = dual(&koszul_p2());
        assert_eq!((d.min_degree(), d.max_degree()), (0, 1));
        assert_eq!(d.term(0), &fs(&[1, 1]));
        assert_eq!(d.term(1), &fs(&[2]));
        d.validate().unwrap();
        assert_eq!(dual(&d), koszul_p2());
    }

    #[test]
    fn tensor_examples() {
        let a = TwistedComplex::single(2, fs(&[2]), 0);
        let b = TwistedComplex::single(2, fs(&[-5]), 0);
        assert_eq!(tensor(&a, &b), TwistedComplex::single(2, fs(&[-3]), 0));
        let k = koszul_p2();
        let t = tensor(&k, &k);
        assert_eq!((t.rank(-2), t.rank(-1), t.rank(0)), (1, 4, 4));
        t.validate().unwrap();
        tensor(&dual(&k), &k).validate().unwrap();
    }

    #[test]
    fn braiding_examples() {
        let c = TwistedComplex::single(2, fs(&[0, 1]), 0);
        let th = braiding(&c);
        let m = th.component(0).evaluate(&[q(1), q(1)]);
        assert_eq!(
            m,
            RatMatrix::from_i64(&[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, 1, 0, 0], &[0, 0, 0, 1]])
        );
        th.is_chain_map().unwrap();
        assert_eq!(compose(&th, &th).unwrap(), ChainMap::identity(th.source()));

        // terms in degrees 1 and 2: the c^1 (x) c^1 block swaps with sign -1,
        // the c^1 (x) c^2 and c^2 (x) c^1 blocks with sign +1
        let c2 = shift(&dual(&koszul_p2()), -1);
        let th2 = braiding(&c2);
        th2.is_chain_map().unwrap();
        let b2 = tensor_blocks(&c2, &c2, 2);
        assert_eq!(th2.component(2).get(b2[0].index(1, 0), b2[0].index(0, 1)), &p("-1", 3));
        let b3 = tensor_blocks(&c2, &c2, 3);
        assert_eq!(b3.len(), 2);
        assert_eq!(th2.component(3).get(b3[1].index(0, 0), b3[0].index(0, 0)), &p("1", 3));
    }

    #[test]
    fn pm_part_ranks() {
        let c = TwistedComplex::single(2, fs(&[0, 0]), 0);
        let plus = pm_part(&c, Sign::Plus);
        let minus = pm_part(&c, Sign::Minus);
        assert_eq!(plus.complex.rank(0), 3);
        assert_eq!(minus.complex.rank(0), 1);
        let pi = compose(&plus.projection, &plus.inclusion).unwrap();
        assert_eq!(pi, ChainMap::identity(&plus.complex));

        let dw = dual(&koszul_p2());
        let t = tensor(&dw, &dw);
        let (pp, mm) = (pm_part(&dw, Sign::Plus), pm_part(&dw, Sign::Minus));
        for k in t.degrees() {
            assert_eq!(pp.complex.rank(k) + mm.complex.rank(k), t.rank(k));
        }
        pp.complex.validate().unwrap();
        mm.complex.validate().unwrap();
        pp.inclusion.is_chain_map().unwrap();
        pp.projection.is_chain_map().unwrap();
        let sum = compose(&pp.inclusion, &pp.projection).unwrap().add(&compose(&mm.inclusion, &mm.projection).unwrap());
        assert_eq!(sum.unwrap(), ChainMap::identity(&t));
    }

    #[test]
    fn cone_examples() {
        let o = TwistedComplex::single(2, fs(&[5]), 0);
        let c = cone(&ChainMap::identity(&o)).unwrap();
        c.validate().unwrap();
        assert_eq!((c.rank(-1), c.rank(0)), (1, 1));
        let z = cone(&ChainMap::zero(&koszul_p2(), &koszul_p2())).unwrap();
        z.validate().unwrap();
        assert_eq!(z.rank(-1), 2 + 1);
        let bad = {
            let k = koszul_p2();
            let mut comps = BTreeMap::new();
            comps.insert(0, PolyMatrix::identity(3, k.term(0).clone()));
            ChainMap::new(k.clone(), k, comps).unwrap()
        };
        assert!(matches!(cone(&bad), Err(Error::NotAChainMap { .. })));
    }

    #[test]
    fn cone_maps_are_chain_maps() {
        let k = koszul_p2();
        let (_, i, p) = cone_maps(&ChainMap::identity(&k)).unwrap();
        i.is_chain_map().unwrap();
        p.is_chain_map().unwrap();
    }

    #[test]
    fn shift_roundtrip() {
        let k = koszul_p2();
        assert_eq!(shift(&shift(&k, 3), -3), k);
        assert_eq!(shift(&k, 1).min_degree(), -2);
    }

    #[test]
    fn lift_pairing_examples() {
        let w = TwistedComplex::single(2, fs(&[0, 0]), 0);
        let psi = PolyMatrix::new(2, fs(&[0, 0]), fs(&[0, 0]), vec![vec![p("0", 2), p("1", 2)], vec![p("1", 2), p("0", 2)]])
            .unwrap();
        let f = lift_pairing(&w, &psi).unwrap();
        assert_eq!(f.support().collect::<Vec<_>>(), vec![0]);

        let k = koszul_p2();
        let ip = PolyMatrix::new(
            3,
            fs(&[-1, -1]),
            fs(&[1, 1]),
            vec![vec![p("x0^2", 3), p("x0*x1", 3)], vec![p("x0*x1", 3), p("x1^2", 3)]],
        )
        .unwrap();
        let f = lift_pairing(&k, &ip).unwrap();
        f.is_chain_map().unwrap();

        let bad = PolyMatrix::new(3, fs(&[-1, -1]), fs(&[1, 1]), vec![vec![p("x0^2", 3), p("0", 3)], vec![p("0", 3), p("x1^2", 3)]])
            .unwrap();
        assert!(matches!(lift_pairing(&k, &bad), Err(Error::DescentFailure(_))));
    }

    #[test]
    fn randomized_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let c = testgen::random_complex(&mut rng, 3);
            c.validate().unwrap();
            assert_eq!(dual(&dual(&c)), c);
            let th = braiding(&c);
            th.is_chain_map().unwrap();
            assert_eq!(compose(&th, &th).unwrap(), ChainMap::identity(th.source()));
            let (pp, mm) = (pm_part(&c, Sign::Plus), pm_part(&c, Sign::Minus));
            let t = tensor(&c, &c);
            for k in t.degrees() {
                assert_eq!(pp.complex.rank(k) + mm.complex.rank(k), t.rank(k));
            }
            pp.complex.validate().unwrap();
        }
    }
}
