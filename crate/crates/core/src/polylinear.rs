//! Linear systems whose unknowns are polynomial matrices between twisted free
//! sheaves. An unknown X : S -> T is coordinatised by the monomial
//! coefficients of its entries; an equation is a sum of terms c * A X B (or
//! c * A X^T B) equal to a known matrix, expanded monomial by monomial.

use std::collections::HashMap;
use std::sync::Arc;

use num_traits::Zero;

use crate::exactla::{self, normalize_sparse, RatMatrix, SparseVec, Q};
use crate::freecomplex::{FreeSheaf, PolyMatrix};
use crate::polyring::{BasisCache, Monomial, MonomialBasis, MonomialSpace, Poly};

#[derive(Debug, Clone)]
struct Unknown {
    source: FreeSheaf,
    target: FreeSheaf,
    offset: usize,
    /// Row-major (r, c) -> (offset of the entry's coordinates, its basis).
    entries: Vec<(usize, Arc<MonomialBasis>)>,
}

/// One summand `coeff * left * X * right` (X transposed if `transposed`).
/// `None` stands for an identity factor.
#[derive(Debug, Clone)]
pub struct Term {
    pub coeff: Q,
    pub left: Option<PolyMatrix>,
    pub unknown: usize,
    pub transposed: bool,
    pub right: Option<PolyMatrix>,
}

impl Term {
    pub fn new(unknown: usize) -> Self {
        Term { coeff: crate::exactla::q(1), left: None, unknown, transposed: false, right: None }
    }

    pub fn left(mut self, m: &PolyMatrix) -> Self {
        self.left = Some(m.clone());
        self
    }

    pub fn right(mut self, m: &PolyMatrix) -> Self {
        self.right = Some(m.clone());
        self
    }

    pub fn transposed(mut self) -> Self {
        self.transposed = true;
        self
    }

    pub fn scaled(mut self, c: Q) -> Self {
        self.coeff *= c;
        self
    }

    pub fn negated(self) -> Self {
        self.scaled(crate::exactla::q(-1))
    }
}

/// An equation: sum of terms = rhs (zero when `rhs` is `None`).
#[derive(Debug, Clone)]
pub struct Equation {
    pub terms: Vec<Term>,
    pub rhs: Option<PolyMatrix>,
}

impl Equation {
    pub fn homogeneous(terms: Vec<Term>) -> Self {
        Equation { terms, rhs: None }
    }

    pub fn with_rhs(terms: Vec<Term>, rhs: PolyMatrix) -> Self {
        Equation { terms, rhs: Some(rhs) }
    }
}

pub struct PolySystem {
    nvars: usize,
    unknowns: Vec<Unknown>,
    len: usize,
    cache: BasisCache,
}

type RowKey = (usize, usize, usize, Vec<i32>);

impl PolySystem {
    pub fn new(nvars: usize) -> Self {
        PolySystem { nvars, unknowns: Vec::new(), len: 0, cache: BasisCache::default() }
    }

    /// Declares an unknown map `source -> target`; returns its id.
    pub fn add_unknown(&mut self, source: &FreeSheaf, target: &FreeSheaf) -> usize {
        let offset = self.len;
        let mut entries = Vec::new();
        for &t in &target.twists {
            for &s in &source.twists {
                let b = self.cache.get(&MonomialSpace::polynomial(self.nvars, t - s));
                entries.push((self.len, Arc::clone(&b)));
                self.len += b.len();
            }
        }
        self.unknowns.push(Unknown { source: source.clone(), target: target.clone(), offset, entries });
        self.unknowns.len() - 1
    }

    /// Total number of scalar coordinates.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Coordinate range of one unknown.
    pub fn range(&self, id: usize) -> std::ops::Range<usize> {
        let u = &self.unknowns[id];
        let end = self.unknowns.get(id + 1).map_or(self.len, |v| v.offset);
        u.offset..end
    }

    /// Reads unknown `id` out of a coordinate vector.
    pub fn to_matrix(&self, id: usize, x: &[(usize, Q)]) -> PolyMatrix {
        let u = &self.unknowns[id];
        let mut m = PolyMatrix::zero(self.nvars, u.source.clone(), u.target.clone());
        let cols = u.source.rank();
        for &(pos, ref v) in x {
            if !self.range(id).contains(&pos) {
                continue;
            }
            let e = u.entries.partition_point(|(o, _)| *o <= pos) - 1;
            let (off, ref basis) = u.entries[e];
            let (r, c) = (e / cols, e % cols);
            let mut p = m.get(r, c).clone();
            p.add_term(Monomial(basis.monomials[pos - off].clone()), v.clone());
            m.set(r, c, p);
        }
        m
    }

    /// Coordinates of a concrete matrix as unknown `id`.
    pub fn from_matrix(&self, id: usize, m: &PolyMatrix) -> SparseVec {
        let u = &self.unknowns[id];
        let cols = u.source.rank();
        let mut out = Vec::new();
        for (e, (off, basis)) in u.entries.iter().enumerate() {
            for (mono, c) in m.get(e / cols, e % cols).terms() {
                let idx = basis.index_of(&mono.0).expect("entry has the forced degree");
                out.push((off + idx, c.clone()));
            }
        }
        normalize_sparse(out)
    }

    /// Polynomial contributed to output entry (r, c) of `term` by the unit
    /// coordinate sitting at unknown entry (u, v) with monomial `m`.
    fn contributions(&self, term: &Term, u: usize, v: usize, m: &Monomial) -> Vec<(usize, usize, Poly)> {
        let unk = &self.unknowns[term.unknown];
        // X' = X or X^T; the unit sits at (u, v) of X, hence at (a, b) of X'.
        let (a, b) = if term.transposed { (v, u) } else { (u, v) };
        let (xrows, xcols) = if term.transposed {
            (unk.source.rank(), unk.target.rank())
        } else {
            (unk.target.rank(), unk.source.rank())
        };
        let unit = Poly::term(m.clone(), term.coeff.clone());
        let lefts: Vec<(usize, Poly)> = match &term.left {
            None => vec![(a, unit.clone())],
            Some(l) => {
                assert_eq!(l.cols(), xrows, "left factor shape");
                (0..l.rows()).filter(|&r| !l.get(r, a).is_zero()).map(|r| (r, l.get(r, a).mul(&unit))).collect()
            }
        };
        let mut out = Vec::new();
        for (r, lp) in lefts {
            match &term.right {
                None => out.push((r, b, lp)),
                Some(rm) => {
                    assert_eq!(rm.rows(), xcols, "right factor shape");
                    for c in 0..rm.cols() {
                        let q = rm.get(b, c);
                        if !q.is_zero() {
                            out.push((r, c, lp.mul(q)));
                        }
                    }
                }
            }
        }
        out
    }

    /// Assembles (matrix, rhs) with one row per (equation, entry, monomial).
    pub fn assemble(&self, eqs: &[Equation]) -> (RatMatrix, Vec<Q>) {
        let mut rows: HashMap<RowKey, usize> = HashMap::new();
        let mut trip = Vec::new();
        let mut rhs: Vec<Q> = Vec::new();
        let mut row_of = |key: RowKey, rhs: &mut Vec<Q>| -> usize {
            let n = rows.len();
            *rows.entry(key).or_insert_with(|| {
                rhs.push(Q::zero());
                n
            })
        };
        for (ei, eq) in eqs.iter().enumerate() {
            for term in &eq.terms {
                let unk = &self.unknowns[term.unknown];
                let cols = unk.source.rank();
                for (e, (off, basis)) in unk.entries.iter().enumerate() {
                    let (u, v) = (e / cols, e % cols);
                    for (k, mono) in basis.monomials.iter().enumerate() {
                        for (r, c, p) in self.contributions(term, u, v, &Monomial(mono.clone())) {
                            for (pm, pc) in p.terms() {
                                let row = row_of((ei, r, c, pm.0.clone()), &mut rhs);
                                trip.push((row, off + k, pc.clone()));
                            }
                        }
                    }
                }
            }
            if let Some(b) = &eq.rhs {
                for r in 0..b.rows() {
                    for c in 0..b.cols() {
                        for (pm, pc) in b.get(r, c).terms() {
                            let row = row_of((ei, r, c, pm.0.clone()), &mut rhs);
                            rhs[row] += pc;
                        }
                    }
                }
            }
        }
        (RatMatrix::from_triplets(rhs.len(), self.len, trip), rhs)
    }

    /// A particular solution, or `None` if the system is inconsistent.
    pub fn solve(&self, eqs: &[Equation]) -> Option<SparseVec> {
        let (m, b) = self.assemble(eqs);
        let x = exactla::solve(&m, &b)?;
        Some(x.into_iter().enumerate().filter(|(_, v)| !v.is_zero()).collect())
    }

    /// Basis of the solution space of the homogeneous system.
    pub fn kernel(&self, eqs: &[Equation]) -> Vec<SparseVec> {
        let (m, _) = self.assemble(eqs);
        exactla::kernel_basis(&m).columns()
    }
}

/// The degree-t graded piece of a sheaf map: sum_j S_(t+s_j) -> sum_i S_(t+t_i).
pub fn graded_piece(m: &PolyMatrix, t: i32, cache: &mut BasisCache) -> RatMatrix {
    let n = m.nvars();
    let src: Vec<Arc<MonomialBasis>> =
        m.source().twists.iter().map(|&s| cache.get(&MonomialSpace::polynomial(n, t + s))).collect();
    let tgt: Vec<Arc<MonomialBasis>> =
        m.target().twists.iter().map(|&s| cache.get(&MonomialSpace::polynomial(n, t + s))).collect();
    let offs = |v: &[Arc<MonomialBasis>]| -> (Vec<usize>, usize) {
        let mut o = Vec::new();
        let mut acc = 0;
        for b in v {
            o.push(acc);
            acc += b.len();
        }
        (o, acc)
    };
    let (so, sd) = offs(&src);
    let (to, td) = offs(&tgt);
    let mut trip = Vec::new();
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            let p = m.get(r, c);
            if p.is_zero() || src[c].is_empty() {
                continue;
            }
            let block = crate::polyring::mult_matrix(p, &src[c], &tgt[r]).expect("forced degrees");
            for i in 0..block.rows() {
                for (j, v) in block.row(i) {
                    trip.push((to[r] + i, so[c] + j, v.clone()));
                }
            }
        }
    }
    RatMatrix::from_triplets(td, sd, trip)
}

/// Dimension of the degree-t piece of a free sheaf.
pub fn graded_dim(s: &FreeSheaf, nvars: usize, t: i32) -> usize {
    s.twists.iter().map(|&d| MonomialSpace::polynomial(nvars, t + d).dimension()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fs(t: &[i32]) -> FreeSheaf {
        FreeSheaf::new(t.to_vec())
    }

    fn pm(nvars: usize, s: &[i32], t: &[i32], rows: &[&[&str]]) -> PolyMatrix {
        let rows = rows.iter().map(|r| r.iter().map(|e| Poly::parse(e, nvars).unwrap()).collect()).collect();
        PolyMatrix::new(nvars, fs(s), fs(t), rows).unwrap()
    }

    #[test]
    fn roundtrip_coordinates() {
        let mut sys = PolySystem::new(2);
        let x = sys.add_unknown(&fs(&[0, -1]), &fs(&[1]));
        assert_eq!(sys.len(), 2 + 3);
        let m = pm(2, &[0, -1], &[1], &[&["x0 - x1", "x0*x1"]]);
        let v = sys.from_matrix(x, &m);
        assert_eq!(sys.to_matrix(x, &v), m);
    }

    #[test]
    fn solves_a_factorisation() {
        // X : O(-1) -> O^2 with linear entries a, b and x0*a + x1*b = x0^2 + x1^2
        let mut sys = PolySystem::new(2);
        let x = sys.add_unknown(&fs(&[-1]), &fs(&[0, 0]));
        let row = pm(2, &[0, 0], &[1], &[&["x0", "x1"]]);
        let rhs = pm(2, &[-1], &[1], &[&["x0^2 + x1^2"]]);
        let sol = sys.solve(&[Equation::with_rhs(vec![Term::new(x).left(&row)], rhs.clone())]).unwrap();
        let xm = sys.to_matrix(x, &sol);
        assert_eq!(row.compose(&xm).unwrap(), rhs);
        // x0 * a = x1^2 has no solution
        let row2 = pm(2, &[0, 0], &[1], &[&["x0", "0"]]);
        let rhs2 = pm(2, &[-1], &[1], &[&["x1^2"]]);
        assert!(sys.solve(&[Equation::with_rhs(vec![Term::new(x).left(&row2)], rhs2)]).is_none());
    }

    #[test]
    fn transposed_terms() {
        // antisymmetric constant 2x2 matrices: X + X^T = 0
        let mut sys = PolySystem::new(2);
        let x = sys.add_unknown(&fs(&[0, 0]), &fs(&[0, 0]));
        let k = sys.kernel(&[Equation::homogeneous(vec![Term::new(x), Term::new(x).transposed()])]);
        assert_eq!(k.len(), 1);
        let m = sys.to_matrix(x, &k[0]);
        assert_eq!(m.get(0, 1), &m.get(1, 0).neg());
        assert!(m.get(0, 0).is_zero());
    }

    #[test]
    fn graded_piece_dims() {
        let m = pm(3, &[-2], &[-1, -1], &[&["x1"], &["-x0"]]);
        let mut cache = BasisCache::default();
        let g = graded_piece(&m, 2, &mut cache);
        assert_eq!((g.rows(), g.cols()), (6, 1));
        assert_eq!(exactla::rank(&g), 1);
        assert_eq!(graded_dim(m.target(), 3, 2), 6);
    }
}
