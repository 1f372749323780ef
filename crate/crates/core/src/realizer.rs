//! Explicit first-order deformations (F, Φ) and 2-extensions (F, G, μ) built
//! from cocycle data, together with the gauge action and the checks that tie
//! them back to the deformation complex.
//!
//! Everything is carried as presentations on generators: F is the cokernel of
//! a relation matrix, and pairings are matrices on generators that are checked
//! to kill the relations. Identities are exact polynomial matrix equalities.
//!
//! The engine does not build sheaves over X × Spec k[ε]/(ε²); the ε-action on
//! F is the nilpotent endomorphism i∘j on generators.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::cech::{default_window, global_class_representatives, GlobalComplex, GlobalTerm};
use crate::defcomplex::{build_deformation_complex, DeformationComplex, QuadraticSheaf};
use crate::error::{Error, Result};
use crate::exactla::{self, q as rat, RatMatrix, SparseVec, Q};
use crate::freecomplex::{tensor_blocks, ChainMap, FreeSheaf, PolyMatrix, TwistedComplex};
use crate::polylinear::{graded_dim, graded_piece, Equation, PolySystem, Term};
use crate::polyring::{BasisCache, Monomial, Poly};

/// A degree-one cocycle (η, Ψ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle1 {
    /// W_{-1} -> W0, a lift of η̄ : W_{-1} -> E.
    pub eta: PolyMatrix,
    /// W0 -> W0^v; entry (a, b) is Ψ(e_a (x) e_b).
    pub psi: PolyMatrix,
}

impl Cocycle1 {
    pub fn zero(q: &QuadraticSheaf) -> Self {
        let n = q.nvars();
        Cocycle1 {
            eta: PolyMatrix::zero(n, q.resolution.term(-1).clone(), q.w0().clone()),
            psi: PolyMatrix::zero(n, q.w0().clone(), q.w0().dual()),
        }
    }
}

/// A degree-two cocycle (χ, Ξ).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cocycle2 {
    /// W_{-2} -> W0.
    pub chi: PolyMatrix,
    /// W_{-1} -> W0^v; entry (c, a) is Ξ(e_c (x) e_a).
    pub xi: PolyMatrix,
}

impl Cocycle2 {
    pub fn zero(q: &QuadraticSheaf) -> Self {
        let n = q.nvars();
        Cocycle2 {
            chi: PolyMatrix::zero(n, q.resolution.term(-2).clone(), q.w0().clone()),
            xi: PolyMatrix::zero(n, q.resolution.term(-1).clone(), q.w0().dual()),
        }
    }
}

/// One verified identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
}

/// A section of j : F -> E, i.e. (σ, X) with σ∘∂ - ∂∘X = η.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splitting {
    pub sigma: PolyMatrix,
    pub x: PolyMatrix,
}

/// 0 -> E -i-> F -j-> E -> 0 with the pairing Φ on F.
///
/// Generators of F are W0 (the image of i) followed by W0 (lifting j);
/// relations are [[∂, η], [0, ∂]] on W_{-1} + W_{-1}.
#[derive(Debug, Clone)]
pub struct FirstOrderDeformation {
    /// Two-term complex F_{-1} -> F_0 whose cokernel is F.
    pub presentation: TwistedComplex,
    pub inclusion_i: PolyMatrix,
    pub projection_j: PolyMatrix,
    /// F_0 -> F_0^v, [[0, φ], [φ, Ψ]].
    pub phi: PolyMatrix,
    pub checks: Vec<IdentityCheck>,
    /// A section of j when the underlying extension splits.
    pub splitting: Option<Splitting>,
}

impl FirstOrderDeformation {
    pub fn generators(&self) -> &FreeSheaf {
        self.presentation.term(0)
    }

    pub fn relations(&self) -> PolyMatrix {
        self.presentation.differential(-1)
    }

    /// The action of ε, i∘j, on generators.
    pub fn epsilon(&self) -> PolyMatrix {
        self.inclusion_i.compose(&self.projection_j).expect("i and j are composable")
    }
}

/// 0 -> E -i-> F -f-> G -j-> E -> 0 with μ on G (x) F.
#[derive(Debug, Clone)]
pub struct TwoExtensionData {
    /// Generators W0 + W_{-1}, relations [[∂_{-1}, χ], [0, ∂_{-2}]].
    pub f_presentation: TwistedComplex,
    /// G = W0, free.
    pub g: FreeSheaf,
    pub inclusion_i: PolyMatrix,
    pub map_f: PolyMatrix,
    pub projection_j: PolyMatrix,
    /// F_0 -> G^v; entry (g, x) is μ(e_g (x) e_x). Equals [φ | -Ξ].
    pub mu: PolyMatrix,
    pub mu_class_modulus: String,
    pub checks: Vec<IdentityCheck>,
    /// χ = 0 and μ = [φ | 0].
    pub split: bool,
}

fn sum(parts: &[&FreeSheaf]) -> FreeSheaf {
    parts.iter().fold(FreeSheaf::zero(), |acc, s| acc.direct_sum(s))
}

fn offsets(parts: &[&FreeSheaf]) -> Vec<usize> {
    let mut out = Vec::with_capacity(parts.len());
    let mut acc = 0;
    for p in parts {
        out.push(acc);
        acc += p.rank();
    }
    out
}

/// Block matrix src -> tgt; each block is (target index, source index, map).
fn block(nvars: usize, src: &[&FreeSheaf], tgt: &[&FreeSheaf], blocks: &[(usize, usize, &PolyMatrix)]) -> PolyMatrix {
    let (so, to) = (offsets(src), offsets(tgt));
    let mut m = PolyMatrix::zero(nvars, sum(src), sum(tgt));
    for &(r, c, b) in blocks {
        m.add_block(to[r], so[c], b);
    }
    m
}

fn check(name: &str, holds: bool) -> IdentityCheck {
    IdentityCheck { name: name.to_string(), holds }
}

fn eq(a: Result<PolyMatrix>, b: Result<PolyMatrix>) -> bool {
    matches!((a, b), (Ok(a), Ok(b)) if a == b)
}

fn is_zero(a: Result<PolyMatrix>) -> bool {
    matches!(a, Ok(a) if a.is_zero())
}

fn symmetric(m: &PolyMatrix, s: &Q) -> bool {
    m.transpose() == m.scale(s)
}

fn expect_shape(m: &PolyMatrix, source: &FreeSheaf, target: &FreeSheaf, what: &str) -> Result<()> {
    if m.source() != source || m.target() != target {
        return Err(Error::ShapeMismatch(format!("{what} must map [{source}] to [{target}]")));
    }
    m.check_degrees()
}

/// Some K with d∘K = m, if one exists.
fn factor_through(d: &PolyMatrix, m: &PolyMatrix) -> Option<PolyMatrix> {
    if m.is_zero() {
        return Some(PolyMatrix::zero(m.nvars(), m.source().clone(), d.source().clone()));
    }
    let mut sys = PolySystem::new(m.nvars());
    let k = sys.add_unknown(m.source(), d.source());
    let sol = sys.solve(&[Equation::with_rhs(vec![Term::new(k).left(d)], m.clone())])?;
    Some(sys.to_matrix(k, &sol))
}

/// Degrees in which presentation-level exactness is checked.
fn degree_range(q: &QuadraticSheaf) -> RangeInclusive<i32> {
    let w = &q.resolution;
    let m = w.degrees().flat_map(|i| w.term(i).twists.iter().map(|t| t.abs())).max().unwrap_or(0);
    let d = m + q.nvars() as i32;
    -d..=d
}

/// Graded-piece ranks of cokernel presentations.
struct Graded {
    nvars: usize,
    cache: BasisCache,
}

impl Graded {
    fn coker_dim(&mut self, rel: &PolyMatrix, t: i32) -> usize {
        graded_dim(rel.target(), self.nvars, t) - graded_piece(rel, t, &mut self.cache).rank()
    }

    /// Rank in degree t of the map coker(..) -> coker(target_rel) induced by m.
    fn induced_rank(&mut self, m: &PolyMatrix, target_rel: &PolyMatrix, t: i32) -> usize {
        let a = graded_piece(m, t, &mut self.cache);
        let b = graded_piece(target_rel, t, &mut self.cache);
        let mut cols = a.columns();
        cols.extend(b.columns());
        RatMatrix::from_columns(a.rows(), &cols).rank() - b.rank()
    }
}

fn free_relations(nvars: usize, g: &FreeSheaf) -> PolyMatrix {
    PolyMatrix::zero(nvars, FreeSheaf::zero(), g.clone())
}

/// Checks that (η, Ψ) is a cocycle: Ψ is s-symmetric, η∘∂_{-2} lands in the
/// image of ∂_{-1}, and φ∘(1 (x) η) + Ψ∘(1 (x) ∂_{-1}) = 0.
pub fn verify_cocycle1(q: &QuadraticSheaf, c: &Cocycle1) -> Result<()> {
    let (w0, w1) = (q.w0(), q.resolution.term(-1));
    expect_shape(&c.eta, w1, w0, "eta")?;
    expect_shape(&c.psi, w0, &w0.dual(), "psi")?;
    let s = rat(q.sign.value());
    if !symmetric(&c.psi, &s) {
        return Err(Error::NotACocycle(format!("psi is not {}symmetric", if q.sign.value() < 0 { "anti" } else { "" })));
    }
    let ed = c.eta.compose(&q.d2())?;
    if factor_through(&q.d1(), &ed).is_none() {
        return Err(Error::NotACocycle("eta o d_{-2} does not lie in the image of d_{-1}".into()));
    }
    let lhs = q.pairing.compose(&c.eta)?.add(&c.psi.compose(&q.d1())?)?;
    if let Some((r, col)) = lhs.first_nonzero() {
        return Err(Error::NotACocycle(format!(
            "phi o (1 (x) eta) + psi o (1 (x) d_-1) is {} at entry ({r}, {col})",
            lhs.get(r, col)
        )));
    }
    Ok(())
}

/// Solves σ∘∂ - ∂∘X = η; a solution is a section of j.
pub fn splitting(q: &QuadraticSheaf, c: &Cocycle1) -> Option<Splitting> {
    let (w0, w1) = (q.w0(), q.resolution.term(-1));
    let d = q.d1();
    let mut sys = PolySystem::new(q.nvars());
    let sigma = sys.add_unknown(w0, w0);
    let x = sys.add_unknown(w1, w1);
    if c.eta.is_zero() {
        return Some(Splitting { sigma: sys.to_matrix(sigma, &[]), x: sys.to_matrix(x, &[]) });
    }
    let eqn = Equation::with_rhs(vec![Term::new(sigma).right(&d), Term::new(x).left(&d).negated()], c.eta.clone());
    let sol = sys.solve(&[eqn])?;
    Some(Splitting { sigma: sys.to_matrix(sigma, &sol), x: sys.to_matrix(x, &sol) })
}

/// Builds (F, Φ) from a cocycle and verifies every identity; a failing
/// identity for a verified cocycle is an internal error.
pub fn realize_first_order(q: &QuadraticSheaf, c: &Cocycle1) -> Result<FirstOrderDeformation> {
    verify_cocycle1(q, c)?;
    let n = q.nvars();
    let (w0, w1) = (q.w0(), q.resolution.term(-1));
    let w0d = w0.dual();
    let d = q.d1();
    let p = &q.pairing;
    let s = rat(q.sign.value());
    let id0 = PolyMatrix::identity(n, w0.clone());
    let id1 = PolyMatrix::identity(n, w1.clone());

    let rel = block(n, &[w1, w1], &[w0, w0], &[(0, 0, &d), (0, 1, &c.eta), (1, 1, &d)]);
    let i = block(n, &[w0], &[w0, w0], &[(0, 0, &id0)]);
    let j = block(n, &[w0, w0], &[w0], &[(0, 1, &id0)]);
    let phi = block(n, &[w0, w0], &[&w0d, &w0d], &[(0, 1, p), (1, 0, p), (1, 1, &c.psi)]);
    let first = block(n, &[w1], &[w1, w1], &[(0, 0, &id1)]);
    let second = block(n, &[w1, w1], &[w1], &[(0, 1, &id1)]);
    let ij = i.compose(&j)?;

    let mut checks = vec![
        check("Phi o theta_F = s Phi", symmetric(&phi, &s)),
        check("Phi o (1_F (x) i) = phi o (j (x) 1_E)", eq(phi.compose(&i), j.transpose().compose(p))),
        check(
            "Phi kills the relations of F",
            is_zero(phi.compose(&rel)) && is_zero(rel.transpose().compose(&phi)),
        ),
        check("Phi o (1 (x) ij) = Phi o (ij (x) 1) on generators", eq(phi.compose(&ij), ij.transpose().compose(&phi))),
        check("i maps relations of E to relations of F", eq(i.compose(&d), rel.compose(&first))),
        check("j maps relations of F to relations of E", eq(j.compose(&rel), d.compose(&second))),
        check("j o i = 0", is_zero(j.compose(&i))),
    ];

    let mut g = Graded { nvars: n, cache: BasisCache::default() };
    let exact = degree_range(q).all(|t| {
        let e = g.coker_dim(&d, t);
        g.coker_dim(&rel, t) == 2 * e && g.induced_rank(&i, &rel, t) == e && g.induced_rank(&j, &d, t) == e
    });
    checks.push(check("0 -> E -> F -> E -> 0 is exact on graded pieces", exact));

    if let Some(bad) = checks.iter().find(|c| !c.holds) {
        return Err(Error::DescentObstruction(format!("identity failed: {}", bad.name)));
    }
    let presentation = TwistedComplex::new(n, -1, vec![w1.direct_sum(w1), w0.direct_sum(w0)], vec![rel])?;
    Ok(FirstOrderDeformation {
        presentation,
        inclusion_i: i,
        projection_j: j,
        phi,
        checks,
        splitting: splitting(q, c),
    })
}

/// (η - λ∘∂, Ψ + φ∘(1 (x) λ) + φ∘(λ (x) 1)).
pub fn gauge_action(q: &QuadraticSheaf, c: &Cocycle1, lambda: &PolyMatrix) -> Result<Cocycle1> {
    expect_shape(lambda, q.w0(), q.w0(), "lambda")?;
    let p = &q.pairing;
    Ok(Cocycle1 {
        eta: c.eta.sub(&lambda.compose(&q.d1())?)?,
        psi: c.psi.add(&p.compose(lambda)?)?.add(&lambda.transpose().compose(p)?)?,
    })
}

/// The isomorphism between the realizations of c and of its gauge translate.
#[derive(Debug, Clone)]
pub struct GaugeIsomorphism {
    /// Presentation of F -> presentation of F': [[1, -λ], [0, 1]] on
    /// generators and the identity on relations.
    pub map: ChainMap,
    pub source: FirstOrderDeformation,
    pub target: FirstOrderDeformation,
    pub checks: Vec<IdentityCheck>,
}

pub fn gauge_isomorphism(q: &QuadraticSheaf, c: &Cocycle1, lambda: &PolyMatrix) -> Result<GaugeIsomorphism> {
    let c2 = gauge_action(q, c, lambda)?;
    let (src, tgt) = (realize_first_order(q, c)?, realize_first_order(q, &c2)?);
    let n = q.nvars();
    let w0 = q.w0();
    let id0 = PolyMatrix::identity(n, w0.clone());
    let neg = lambda.neg();
    let beta0 = block(n, &[w0, w0], &[w0, w0], &[(0, 0, &id0), (0, 1, &neg), (1, 1, &id0)]);
    let mut comps = std::collections::BTreeMap::new();
    comps.insert(0, beta0.clone());
    if src.presentation.rank(-1) > 0 {
        comps.insert(-1, PolyMatrix::identity(n, src.presentation.term(-1).clone()));
    }
    let map = ChainMap::new(src.presentation.clone(), tgt.presentation.clone(), comps)?;
    let pulled = beta0.transpose().compose(&tgt.phi)?.compose(&beta0)?;
    let checks = vec![
        check("beta is a chain map of presentations", map.is_chain_map().is_ok()),
        check("Phi = Phi' o (beta (x) beta)", pulled == src.phi),
        check("beta o i = i'", eq(beta0.compose(&src.inclusion_i), Ok(tgt.inclusion_i.clone()))),
        check("j' o beta = j", eq(tgt.projection_j.compose(&beta0), Ok(src.projection_j.clone()))),
    ];
    if let Some(bad) = checks.iter().find(|c| !c.holds) {
        return Err(Error::DescentObstruction(format!("gauge isomorphism: {}", bad.name)));
    }
    Ok(GaugeIsomorphism { map, source: src, target: tgt, checks })
}

/// Checks that (χ, Ξ) is a cocycle: φ∘(1 (x) χ) - Ξ∘(1 (x) ∂_{-2}) = 0,
/// ∂_{-1}^T Ξ is s-symmetric, and χ∘∂_{-3} lands in the image of ∂_{-1}.
pub fn verify_cocycle2(q: &QuadraticSheaf, c: &Cocycle2) -> Result<()> {
    let w = &q.resolution;
    let w0 = q.w0();
    expect_shape(&c.chi, w.term(-2), w0, "chi")?;
    expect_shape(&c.xi, w.term(-1), &w0.dual(), "xi")?;
    let lhs = q.pairing.compose(&c.chi)?.sub(&c.xi.compose(&q.d2())?)?;
    if let Some((r, col)) = lhs.first_nonzero() {
        return Err(Error::NotACocycle(format!(
            "phi o (1 (x) chi) - xi o (1 (x) d_-2) is {} at entry ({r}, {col})",
            lhs.get(r, col)
        )));
    }
    let m = q.d1().transpose().compose(&c.xi)?;
    if !symmetric(&m, &rat(q.sign.value())) {
        return Err(Error::NotACocycle("d_-1^T o xi violates the symmetry condition".into()));
    }
    let cd = c.chi.compose(&w.differential(-3))?;
    if factor_through(&q.d1(), &cd).is_none() {
        return Err(Error::NotACocycle("chi o d_{-3} does not lie in the image of d_{-1}".into()));
    }
    Ok(())
}

/// Builds the 2-extension of a degree-two cocycle and verifies its identities.
pub fn extract_two_extension(q: &QuadraticSheaf, c: &Cocycle2) -> Result<TwoExtensionData> {
    verify_cocycle2(q, c)?;
    let n = q.nvars();
    let w = &q.resolution;
    let (w0, w1, w2) = (q.w0(), w.term(-1), w.term(-2));
    let w0d = w0.dual();
    let (d1, d2) = (q.d1(), q.d2());
    let p = &q.pairing;
    let s = rat(q.sign.value());
    let id0 = PolyMatrix::identity(n, w0.clone());
    let id1 = PolyMatrix::identity(n, w1.clone());

    let rel = block(n, &[w1, w2], &[w0, w1], &[(0, 0, &d1), (0, 1, &c.chi), (1, 1, &d2)]);
    let i = block(n, &[w0], &[w0, w1], &[(0, 0, &id0)]);
    let f = block(n, &[w0, w1], &[w0], &[(0, 1, &d1)]);
    let j = id0.clone();
    let neg_xi = c.xi.neg();
    let mu = block(n, &[w0, w1], &[&w0d], &[(0, 0, p), (0, 1, &neg_xi)]);
    let first = block(n, &[w1], &[w1, w2], &[(0, 0, &id1)]);
    let second = block(n, &[w0, w1], &[w1], &[(0, 1, &id1)]);
    let mu_f = f.transpose().compose(&mu)?;

    let mut checks = vec![
        check("mu o (1_G (x) i) = phi o (j (x) 1_E)", eq(mu.compose(&i), j.transpose().compose(p))),
        check("mu o (f (x) 1_F) = s mu o (f (x) 1_F) o theta_F", symmetric(&mu_f, &s)),
        check("mu kills the relations of F", is_zero(mu.compose(&rel))),
        check("i maps relations of E to relations of F", eq(i.compose(&d1), rel.compose(&first))),
        check("f kills the relations of F", is_zero(f.compose(&rel))),
        check("j o f lands in the relations of E", eq(j.compose(&f), d1.compose(&second))),
        check("f o i = 0", is_zero(f.compose(&i))),
    ];

    let mut g = Graded { nvars: n, cache: BasisCache::default() };
    let g_rel = free_relations(n, w0);
    let exact = degree_range(q).all(|t| {
        let e = g.coker_dim(&d1, t);
        let fd = g.coker_dim(&rel, t);
        let gd = graded_dim(w0, n, t);
        let rf = g.induced_rank(&f, &g_rel, t);
        g.induced_rank(&i, &rel, t) == e
            && g.induced_rank(&j, &d1, t) == e
            && fd >= e
            && rf == fd - e
            && gd >= e
            && rf == gd - e
    });
    checks.push(check("0 -> E -> F -> G -> E -> 0 is exact on graded pieces", exact));

    if let Some(bad) = checks.iter().find(|c| !c.holds) {
        return Err(Error::DescentObstruction(format!("identity failed: {}", bad.name)));
    }
    let split = c.chi.is_zero() && c.xi.is_zero();
    let f_presentation = TwistedComplex::new(n, -1, vec![w1.direct_sum(w2), w0.direct_sum(w1)], vec![rel])?;
    Ok(TwoExtensionData {
        f_presentation,
        g: w0.clone(),
        inclusion_i: i,
        map_f: f,
        projection_j: j,
        mu,
        mu_class_modulus: "mu is defined modulo Psi o (1_G (x) f) for s-symmetric Psi on G (x) G".into(),
        checks,
        split,
    })
}

/// μ'' = μ + Ψ∘(1_G (x) f).
pub fn translate_mu(q: &QuadraticSheaf, data: &TwoExtensionData, psi: &PolyMatrix) -> Result<PolyMatrix> {
    expect_shape(psi, q.w0(), &q.w0().dual(), "psi")?;
    if !symmetric(psi, &rat(q.sign.value())) {
        return Err(Error::SymmetryFailure { row: 0, col: 0, detail: "psi must be s-symmetric".into() });
    }
    data.mu.add(&psi.compose(&data.map_f)?)
}

/// [φ | 0], the form of μ on a split 2-extension.
pub fn split_mu(q: &QuadraticSheaf) -> PolyMatrix {
    let n = q.nvars();
    let (w0, w1) = (q.w0(), q.resolution.term(-1));
    block(n, &[w0, w1], &[&w0.dual()], &[(0, 0, &q.pairing)])
}

/// Cocycles pulled back from global representatives of a cohomology class
/// basis in degree k of the deformation complex.
#[derive(Debug, Clone)]
pub struct ClassBasis<C> {
    pub degree: i32,
    /// Dimension of the cohomology group.
    pub dim: usize,
    /// Coordinates in the complex of global sections.
    pub coordinates: Vec<SparseVec>,
    pub cocycles: Vec<C>,
    /// No nontrivial combination of the cocycles is a coboundary of global data.
    pub independent: bool,
}

impl<C> ClassBasis<C> {
    pub fn representable(&self) -> bool {
        self.cocycles.len() == self.dim
    }
}

fn section_polys(nvars: usize, term: &GlobalTerm, coords: &[(usize, Q)]) -> Vec<Poly> {
    let mut out = vec![Poly::zero(nvars); term.bases.len()];
    for (pos, v) in coords {
        let (a, mono) = term.locate(*pos);
        out[a].add_term(Monomial(mono.to_vec()), v.clone());
    }
    out
}

fn apply(m: &PolyMatrix, v: &[Poly]) -> Vec<Poly> {
    (0..m.rows())
        .map(|r| (0..m.cols()).fold(Poly::zero(m.nvars()), |acc, c| acc.add(&m.get(r, c).mul(&v[c]))))
        .collect()
}

/// Global sections of the degree-k term of the complex, split into the
/// DW (x) W part and the (DW (x) DW)^s part (the latter mapped into DW (x) DW).
fn split_sections(dc: &DeformationComplex, glob: &GlobalComplex, k: i32, coords: &[(usize, Q)]) -> (Vec<Poly>, Vec<Poly>) {
    let nvars = dc.complex.nvars();
    let polys = match glob.term(k) {
        Some(t) => section_polys(nvars, t, coords),
        None => Vec::new(),
    };
    let a = dc.source.rank(k);
    let (src, part) = polys.split_at(a.min(polys.len()));
    let incl = dc.part.inclusion.component(k - 1);
    let full = if part.is_empty() { Vec::new() } else { apply(&incl, part) };
    (src.to_vec(), full)
}

fn cocycle1_from_sections(q: &QuadraticSheaf, dc: &DeformationComplex, src: &[Poly], full: &[Poly]) -> Cocycle1 {
    let mut c = Cocycle1::zero(q);
    let s = rat(q.sign.value());
    let dw = &dc.dual_resolution;
    if let Some(b) = tensor_blocks(dw, &q.resolution, 1).into_iter().find(|b| b.left == 1) {
        for a in 0..b.left_rank {
            for e in 0..b.right_rank {
                c.eta.set(e, a, src[b.index(a, e)].clone());
            }
        }
    }
    if let Some(b) = tensor_blocks(dw, dw, 0).into_iter().find(|b| b.left == 0) {
        for x in 0..b.left_rank {
            for y in 0..b.right_rank {
                c.psi.set(x, y, full[b.index(x, y)].scale(&s));
            }
        }
    }
    c
}

fn cocycle2_from_sections(q: &QuadraticSheaf, dc: &DeformationComplex, src: &[Poly], full: &[Poly]) -> Cocycle2 {
    let mut c = Cocycle2::zero(q);
    let ms = rat(-q.sign.value());
    let dw = &dc.dual_resolution;
    if let Some(b) = tensor_blocks(dw, &q.resolution, 2).into_iter().find(|b| b.left == 2) {
        for e in 0..b.left_rank {
            for x in 0..b.right_rank {
                c.chi.set(x, e, src[b.index(e, x)].clone());
            }
        }
    }
    if let Some(b) = tensor_blocks(dw, dw, 1).into_iter().find(|b| b.left == 0) {
        for x in 0..b.left_rank {
            for a in 0..b.right_rank {
                c.xi.set(x, a, full[b.index(x, a)].scale(&ms));
            }
        }
    }
    c
}

fn independent(glob: &GlobalComplex, k: i32, reps: &[SparseVec]) -> bool {
    let Some(term) = glob.term(k) else { return reps.is_empty() };
    let d = glob.differential(k);
    if reps.iter().any(|r| !d.mul_sparse(r).is_empty()) {
        return false;
    }
    let prev = glob.differential(k - 1);
    let base = prev.rank();
    let mut cols = prev.columns();
    cols.extend(reps.iter().cloned());
    exactla::rank(&RatMatrix::from_columns(term.dim, &cols)) == base + reps.len()
}

fn class_basis<C>(
    q: &QuadraticSheaf,
    k: i32,
    window: Option<u32>,
    convert: impl Fn(&DeformationComplex, &[Poly], &[Poly]) -> C,
) -> Result<ClassBasis<C>> {
    let dc = build_deformation_complex(q)?;
    let w = window.unwrap_or_else(|| default_window(&dc.complex));
    let (coordinates, dim) = global_class_representatives(&dc.complex, w, k)?;
    let glob = GlobalComplex::new(&dc.complex)?;
    let cocycles = coordinates
        .iter()
        .map(|v| {
            let (src, full) = split_sections(&dc, &glob, k, v);
            convert(&dc, &src, &full)
        })
        .collect();
    let independent = independent(&glob, k, &coordinates);
    Ok(ClassBasis { degree: k, dim, coordinates, cocycles, independent })
}

/// Global cocycles representing a basis of the first cohomology, as far as
/// global data reaches.
pub fn h1_basis(q: &QuadraticSheaf, window: Option<u32>) -> Result<ClassBasis<Cocycle1>> {
    class_basis(q, 1, window, |dc, src, full| cocycle1_from_sections(q, dc, src, full))
}

pub fn h2_basis(q: &QuadraticSheaf, window: Option<u32>) -> Result<ClassBasis<Cocycle2>> {
    class_basis(q, 2, window, |dc, src, full| cocycle2_from_sections(q, dc, src, full))
}

fn pick<C: Clone>(basis: &ClassBasis<C>, index: usize) -> Result<C> {
    if index >= basis.dim {
        return Err(Error::IndexOutOfRange { index, available: basis.dim });
    }
    basis.cocycles.get(index).cloned().ok_or(Error::NotGloballyRepresentable { index })
}

/// Realizes class `index` of the first cohomology basis.
pub fn realize_class(q: &QuadraticSheaf, index: usize, window: Option<u32>) -> Result<(Cocycle1, FirstOrderDeformation)> {
    let c = pick(&h1_basis(q, window)?, index)?;
    let f = realize_first_order(q, &c)?;
    Ok((c, f))
}

/// The 2-extension of class `index` of the second cohomology basis.
pub fn two_extension_class(q: &QuadraticSheaf, index: usize, window: Option<u32>) -> Result<(Cocycle2, TwoExtensionData)> {
    let c = pick(&h2_basis(q, window)?, index)?;
    let t = extract_two_extension(q, &c)?;
    Ok((c, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freecomplex::Sign;

    fn fs(t: &[i32]) -> FreeSheaf {
        FreeSheaf::new(t.to_vec())
    }

    fn pm(nvars: usize, s: &[i32], t: &[i32], rows: &[&[&str]]) -> PolyMatrix {
        let rows = rows.iter().map(|r| r.iter().map(|e| Poly::parse(e, nvars).unwrap()).collect()).collect();
        PolyMatrix::new(nvars, fs(s), fs(t), rows).unwrap()
    }

    fn hyperbolic_p1() -> QuadraticSheaf {
        let w = TwistedComplex::single(2, fs(&[0, 0]), 0);
        QuadraticSheaf::new(1, w, pm(2, &[0, 0], &[0, 0], &[&["0", "1"], &["1", "0"]]), Sign::Plus).unwrap()
    }

    fn split_symplectic() -> QuadraticSheaf {
        let w = TwistedComplex::single(2, fs(&[1, -1]), 0);
        QuadraticSheaf::new(1, w, pm(2, &[1, -1], &[-1, 1], &[&["0", "1"], &["-1", "0"]]), Sign::Minus).unwrap()
    }

    /// O(1) + O(-1) with O(1) presented as O^2 / O(-1).
    fn resolved_symplectic() -> QuadraticSheaf {
        let d = pm(2, &[-1], &[0, 0, -1], &[&["x1"], &["-x0"], &["0"]]);
        let w = TwistedComplex::new(2, -1, vec![fs(&[-1]), fs(&[0, 0, -1])], vec![d]).unwrap();
        let p = pm(2, &[0, 0, -1], &[0, 0, 1], &[&["0", "0", "x0"], &["0", "0", "x1"], &["-x0", "-x1", "0"]]);
        QuadraticSheaf::new(1, w, p, Sign::Minus).unwrap()
    }

    fn ideal_point() -> QuadraticSheaf {
        let d = pm(3, &[-2], &[-1, -1], &[&["x1"], &["-x0"]]);
        let w = TwistedComplex::new(3, -1, vec![fs(&[-2]), fs(&[-1, -1])], vec![d]).unwrap();
        let p = pm(3, &[-1, -1], &[1, 1], &[&["x0^2", "x0*x1"], &["x0*x1", "x1^2"]]);
        QuadraticSheaf::new(2, w, p, Sign::Plus).unwrap()
    }

    fn all_hold(checks: &[IdentityCheck]) -> bool {
        checks.iter().all(|c| c.holds)
    }

    #[test]
    fn zero_cocycle_is_split() {
        for q in [hyperbolic_p1(), resolved_symplectic(), ideal_point()] {
            let f = realize_first_order(&q, &Cocycle1::zero(&q)).unwrap();
            assert!(all_hold(&f.checks));
            assert!(f.splitting.is_some());
            // ε = ij squares to zero
            assert!(f.epsilon().compose(&f.epsilon()).unwrap().is_zero());
        }
    }

    #[test]
    fn resolved_symplectic_class() {
        let q = resolved_symplectic();
        q.validate().unwrap();
        let basis = h1_basis(&q, None).unwrap();
        assert_eq!(basis.dim, 1);
        assert!(basis.representable() && basis.independent);
        let (c, f) = realize_class(&q, 0, None).unwrap();
        assert!(!(c.eta.is_zero() && c.psi.is_zero()));
        assert!(all_hold(&f.checks));
        assert!(matches!(realize_class(&q, 1, None), Err(Error::IndexOutOfRange { index: 1, available: 1 })));
    }

    #[test]
    fn locally_free_class_needs_resolution() {
        let q = split_symplectic();
        assert!(matches!(realize_class(&q, 0, None), Err(Error::NotGloballyRepresentable { index: 0 })));
    }

    #[test]
    fn gauge_orbit() {
        let q = resolved_symplectic();
        let (c, _) = realize_class(&q, 0, None).unwrap();
        let lambda = pm(2, &[0, 0, -1], &[0, 0, -1], &[&["1", "2", "x0"], &["0", "-1", "x0 + 3*x1"], &["0", "0", "5"]]);
        let moved = gauge_action(&q, &c, &lambda).unwrap();
        assert_ne!(moved, c);
        verify_cocycle1(&q, &moved).unwrap();
        assert_eq!(gauge_action(&q, &moved, &lambda.neg()).unwrap(), c);
        let zero = PolyMatrix::zero(2, q.w0().clone(), q.w0().clone());
        assert_eq!(gauge_action(&q, &c, &zero).unwrap(), c);
        let iso = gauge_isomorphism(&q, &c, &lambda).unwrap();
        assert!(all_hold(&iso.checks));
        // a translate of zero realizes a split extension
        let z = gauge_action(&q, &Cocycle1::zero(&q), &lambda).unwrap();
        assert!(realize_first_order(&q, &z).unwrap().splitting.is_some());
    }

    #[test]
    fn rejects_non_cocycles() {
        let q = resolved_symplectic();
        let mut c = Cocycle1::zero(&q);
        c.eta = pm(2, &[-1], &[0, 0, -1], &[&["x0"], &["0"], &["0"]]);
        assert!(matches!(realize_first_order(&q, &c), Err(Error::NotACocycle(_))));
        let mut c = Cocycle1::zero(&q);
        c.psi = pm(2, &[0, 0, -1], &[0, 0, 1], &[&["1", "0", "0"], &["0", "0", "0"], &["0", "0", "0"]]);
        assert!(matches!(verify_cocycle1(&q, &c), Err(Error::NotACocycle(_))));
    }

    #[test]
    fn ideal_point_classes() {
        let q = ideal_point();
        let b1 = h1_basis(&q, None).unwrap();
        assert_eq!(b1.dim, 2);
        assert!(b1.representable() && b1.independent);
        for c in &b1.cocycles {
            assert!(all_hold(&realize_first_order(&q, c).unwrap().checks));
        }
        let b2 = h2_basis(&q, None).unwrap();
        assert_eq!(b2.dim, 3);
        assert!(b2.independent);
        for c in &b2.cocycles {
            assert!(c.chi.is_zero());
            let t = extract_two_extension(&q, c).unwrap();
            assert!(all_hold(&t.checks) && !t.split);
        }
    }

    #[test]
    fn two_extension_coboundaries() {
        let q = ideal_point();
        let zero = extract_two_extension(&q, &Cocycle2::zero(&q)).unwrap();
        assert!(zero.split && zero.mu == split_mu(&q));
        // Ξ = Ψ∘(1 (x) ∂) is a coboundary; μ'' = μ + Ψ∘(1 (x) f) is the split form
        let psi = pm(3, &[-1, -1], &[1, 1], &[&["x0^2", "x1*x2"], &["x1*x2", "x2^2 - x0*x1"]]);
        let c = Cocycle2 { chi: Cocycle2::zero(&q).chi, xi: psi.compose(&q.d1()).unwrap() };
        let t = extract_two_extension(&q, &c).unwrap();
        assert!(all_hold(&t.checks));
        assert_eq!(translate_mu(&q, &t, &psi).unwrap(), split_mu(&q));
    }
}
