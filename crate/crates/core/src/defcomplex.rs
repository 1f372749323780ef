//! Orthogonal and symplectic sheaves presented by a free resolution and a
//! pairing matrix, and their deformation complex.
//!
//! Delta = rho ∘ (1 + s θ) ∘ (1 (x) φ~) : DW (x) W -> (DW (x) DW)^s, where
//! φ~ : W -> DW is the adjoint of the pairing and rho projects onto the
//! s-eigencomplex of the braiding. The deformation complex is cone(Delta)[-1].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cech::{complex_euler, hypercohomology, les_check, CohomologyReport, LesReport};
use crate::error::{Error, Result};
use crate::exactla::{self, q as rat, Echelon, Q};
use crate::freecomplex::{
    braiding, compose, cone, dual, lift_pairing, pm_part, shift, tensor, tensor_maps, ChainMap, FreeSheaf, PmPart,
    PolyMatrix, Sign, TwistedComplex,
};
use crate::polylinear::{Equation, PolySystem, Term};

/// (E, φ): E = coker of the resolution's last differential, φ represented by
/// the pairing matrix on W0 (x) W0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadraticSheaf {
    /// Ambient dimension n of P^n.
    pub n: usize,
    /// W in degrees <= 0.
    pub resolution: TwistedComplex,
    /// W0 -> W0^v; entry (a, b) is φ(e_a (x) e_b).
    pub pairing: PolyMatrix,
    pub sign: Sign,
}

impl QuadraticSheaf {
    /// Shape checks only; run `validate` for the mathematical conditions.
    pub fn new(n: usize, resolution: TwistedComplex, pairing: PolyMatrix, sign: Sign) -> Result<Self> {
        if resolution.nvars() != n + 1 || pairing.nvars() != n + 1 {
            return Err(Error::ShapeMismatch("resolution, pairing and ambient dimension disagree".into()));
        }
        if resolution.max_degree() > 0 && !resolution.is_zero() {
            return Err(Error::ShapeMismatch("resolution must live in degrees <= 0".into()));
        }
        let w0 = resolution.term(0);
        if pairing.source() != w0 || *pairing.target() != w0.dual() {
            return Err(Error::ShapeMismatch(format!(
                "pairing must be a {}x{} matrix on W0 = [{w0}]",
                w0.rank(),
                w0.rank()
            )));
        }
        Ok(QuadraticSheaf { n, resolution, pairing, sign })
    }

    pub fn nvars(&self) -> usize {
        self.n + 1
    }

    pub fn w0(&self) -> &FreeSheaf {
        self.resolution.term(0)
    }

    /// ∂_{-1} : W_{-1} -> W_0.
    pub fn d1(&self) -> PolyMatrix {
        self.resolution.differential(-1)
    }

    /// ∂_{-2} : W_{-2} -> W_{-1}.
    pub fn d2(&self) -> PolyMatrix {
        self.resolution.differential(-2)
    }

    /// Generic rank of E: the alternating sum of the resolution ranks.
    pub fn generic_rank(&self) -> i64 {
        self.resolution.degrees().map(|i| if i % 2 == 0 { 1 } else { -1 } * self.resolution.rank(i) as i64).sum()
    }

    /// Complex, symmetry, descent and nondegeneracy, in that order.
    pub fn validate(&self) -> Result<NondegeneracyWitness> {
        self.resolution.validate()?;
        check_symmetry(self)?;
        check_nondegenerate(self)
    }
}

/// Verifies that the pairing matrix is exactly (anti)symmetric and satisfies
/// both descent identities.
pub fn check_symmetry(q: &QuadraticSheaf) -> Result<()> {
    let p = &q.pairing;
    let s = rat(q.sign.value());
    for a in 0..p.rows() {
        for b in 0..p.cols() {
            if *p.get(a, b) != p.get(b, a).scale(&s) {
                let kind = if q.sign == Sign::Plus { "symmetric" } else { "antisymmetric" };
                return Err(Error::SymmetryFailure {
                    row: a,
                    col: b,
                    detail: format!("pairing is not {kind}: entry ({a}, {b}) = {}, entry ({b}, {a}) = {}", p.get(a, b), p.get(b, a)),
                });
            }
        }
    }
    let d = q.d1();
    if let Some((r, c)) = p.compose(&d)?.first_nonzero() {
        return Err(Error::DescentFailure(format!("pairing ∘ (1 (x) d) is nonzero at entry ({r}, {c})")));
    }
    if let Some((r, c)) = d.transpose().compose(p)?.first_nonzero() {
        return Err(Error::DescentFailure(format!("pairing ∘ (d (x) 1) is nonzero at entry ({r}, {c})")));
    }
    Ok(())
}

/// Point where the pairing was found nondegenerate on the fiber.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NondegeneracyWitness {
    /// Homogeneous coordinates, x0 = 1.
    pub point: Vec<String>,
    pub fiber_rank: usize,
    pub attempts: usize,
}

pub const NONDEGENERACY_ATTEMPTS: usize = 8;
const POINT_SEED: u64 = 0x0051_ab1e;

fn random_point(rng: &mut ChaCha8Rng, nvars: usize) -> Vec<Q> {
    let mut p = vec![rat(1)];
    for _ in 1..nvars {
        let num: i64 = rng.gen_range(-97..=97);
        let den: i64 = rng.gen_range(1..=13);
        p.push(exactla::q_frac(num, den));
    }
    p
}

fn fmt_point(p: &[Q]) -> String {
    let parts: Vec<String> = p.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(" : "))
}

/// Evaluates at one point: Ok(fiber rank) if the induced form is nondegenerate,
/// Err(FiberRankDrop) if the point lies outside the locally free locus,
/// Err(Degenerate) if the form drops rank there.
pub fn check_nondegenerate_at(q: &QuadraticSheaf, point: &[Q]) -> Result<usize> {
    let generic = q.generic_rank().max(0) as usize;
    let d = q.d1().evaluate(point);
    let fiber = q.w0().rank() - exactla::rank(&d);
    if fiber > generic {
        return Err(Error::FiberRankDrop { point: fmt_point(point), fiber, generic });
    }
    // The form descends to the fiber; its rank there equals the rank of P(p).
    let rank = exactla::rank(&q.pairing.evaluate(point));
    if rank != fiber {
        return Err(Error::Degenerate { attempts: 1, point: fmt_point(point) });
    }
    Ok(fiber)
}

/// Random-point nondegeneracy with up to 8 attempts (deterministic seed).
pub fn check_nondegenerate(q: &QuadraticSheaf) -> Result<NondegeneracyWitness> {
    let mut rng = ChaCha8Rng::seed_from_u64(POINT_SEED);
    let mut last = Error::Internal("no attempts".into());
    for attempt in 1..=NONDEGENERACY_ATTEMPTS {
        let p = random_point(&mut rng, q.nvars());
        match check_nondegenerate_at(q, &p) {
            Ok(fiber_rank) => {
                return Ok(NondegeneracyWitness {
                    point: p.iter().map(|x| x.to_string()).collect(),
                    fiber_rank,
                    attempts: attempt,
                })
            }
            Err(e @ Error::FiberRankDrop { .. }) => last = e,
            Err(Error::Degenerate { point, .. }) => last = Error::Degenerate { attempts: attempt, point },
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Everything built on the way to the deformation complex.
#[derive(Debug, Clone)]
pub struct DeformationComplex {
    pub dual_resolution: TwistedComplex,
    /// φ~ : W -> DW.
    pub adjoint: ChainMap,
    /// DW (x) W.
    pub source: TwistedComplex,
    /// (DW (x) DW)^s with its inclusion and projection.
    pub part: PmPart,
    pub delta: ChainMap,
    /// cone(delta)[-1].
    pub complex: TwistedComplex,
}

pub fn build_deformation_complex(q: &QuadraticSheaf) -> Result<DeformationComplex> {
    let w = &q.resolution;
    let dw = dual(w);
    let adjoint = lift_pairing(w, &q.pairing)?;
    let one_phi = tensor_maps(&ChainMap::identity(&dw), &adjoint)?;
    let theta = braiding(&dw);
    let sym = ChainMap::identity(theta.source()).add(&theta.scale(&rat(q.sign.value())))?;
    let part = pm_part(&dw, q.sign);
    let delta = compose(&part.projection, &compose(&sym, &one_phi)?)?;
    delta.is_chain_map().map_err(|e| Error::Internal(format!("Delta is not a chain map: {e}")))?;
    let complex = shift(&cone(&delta)?, -1);
    complex.validate().map_err(|e| Error::Internal(format!("deformation complex: {e}")))?;
    Ok(DeformationComplex { dual_resolution: dw.clone(), adjoint, source: tensor(&dw, w), part, delta, complex })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EulerCheck {
    pub complex: i64,
    pub source: i64,
    pub target: i64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeformationReport {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub cohomology: CohomologyReport,
    pub les: LesReport,
    pub euler: EulerCheck,
    /// h2 = 0.
    pub formally_smooth_hint: bool,
    /// Dimension of the infinitesimal symmetries computed from the resolution.
    pub cross_check: Option<usize>,
    pub cross_check_agrees: bool,
    pub witness: NondegeneracyWitness,
}

pub fn deformation_report(q: &QuadraticSheaf, window: Option<u32>) -> Result<DeformationReport> {
    let witness = q.validate()?;
    let dc = build_deformation_complex(q)?;
    let cohomology = hypercohomology(&dc.complex, window)?;
    let les = les_check(&dc.delta, Some(cohomology.window_used.max(les_window(&dc))))?;
    let euler = EulerCheck {
        complex: complex_euler(&dc.complex),
        source: complex_euler(&dc.source),
        target: complex_euler(&dc.part.complex),
        holds: complex_euler(&dc.complex) == complex_euler(&dc.source) - complex_euler(&dc.part.complex),
    };
    let sym = infinitesimal_symmetries(q)?;
    let (h0, h1, h2) = (cohomology.h(0), cohomology.h(1), cohomology.h(2));
    Ok(DeformationReport {
        h0,
        h1,
        h2,
        formally_smooth_hint: h2 == 0,
        cross_check: Some(sym.dim),
        cross_check_agrees: sym.dim == h0,
        cohomology,
        les,
        euler,
        witness,
    })
}

fn les_window(dc: &DeformationComplex) -> u32 {
    use crate::cech::default_window;
    default_window(&dc.source).max(default_window(&dc.part.complex))
}

/// Global endomorphisms λ of E preserving φ infinitesimally.
#[derive(Debug, Clone)]
pub struct Symmetries {
    pub dim: usize,
    /// Lifts W0 -> W0 of a basis.
    pub basis: Vec<PolyMatrix>,
}

/// Solves, jointly, λ ∘ ∂ = ∂ ∘ μ (λ descends to E) and λ^T P + P λ = 0, then
/// quotients by the maps ∂ ∘ ν that vanish on E.
pub fn infinitesimal_symmetries(q: &QuadraticSheaf) -> Result<Symmetries> {
    let w0 = q.w0().clone();
    let w1 = q.resolution.term(-1).clone();
    let d = q.d1();
    let p = &q.pairing;
    let mut sys = PolySystem::new(q.nvars());
    let lam = sys.add_unknown(&w0, &w0);
    let mu = sys.add_unknown(&w1, &w1);
    let eqs = vec![
        Equation::homogeneous(vec![Term::new(lam).right(&d), Term::new(mu).left(&d).negated()]),
        Equation::homogeneous(vec![Term::new(lam).transposed().right(p), Term::new(lam).left(p)]),
    ];
    let kernel = sys.kernel(&eqs);
    let range = sys.range(lam);
    let project = |v: &[(usize, Q)]| -> Vec<(usize, Q)> {
        v.iter().filter(|(i, _)| range.contains(i)).cloned().collect()
    };

    // Maps ∂ ∘ ν, ν : W0 -> W_{-1}, vanish on E.
    let mut trivial = PolySystem::new(q.nvars());
    let nu = trivial.add_unknown(&w0, &w1);
    let mut ech = Echelon::new(sys.len());
    for k in 0..trivial.len() {
        let unit = vec![(k, rat(1))];
        let lam_m = d.compose(&trivial.to_matrix(nu, &unit))?;
        ech.insert(&sys.from_matrix(lam, &lam_m));
    }
    let mut basis = Vec::new();
    for v in &kernel {
        let pv = project(v);
        if ech.insert(&pv) {
            basis.push(sys.to_matrix(lam, &pv));
        }
    }
    Ok(Symmetries { dim: basis.len(), basis })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::Poly;

    fn fs(t: &[i32]) -> FreeSheaf {
        FreeSheaf::new(t.to_vec())
    }

    fn pm(nvars: usize, s: &[i32], t: &[i32], rows: &[&[&str]]) -> PolyMatrix {
        let rows = rows.iter().map(|r| r.iter().map(|e| Poly::parse(e, nvars).unwrap()).collect()).collect();
        PolyMatrix::new(nvars, fs(s), fs(t), rows).unwrap()
    }

    fn split(n: usize, twists: &[i32], pairing: &[&[&str]], sign: Sign) -> QuadraticSheaf {
        let w = TwistedComplex::single(n + 1, fs(twists), 0);
        let neg: Vec<i32> = twists.iter().map(|t| -t).collect();
        QuadraticSheaf::new(n, w, pm(n + 1, twists, &neg, pairing), sign).unwrap()
    }

    fn ideal_point(pairing: &[&[&str]]) -> QuadraticSheaf {
        let d = pm(3, &[-2], &[-1, -1], &[&["x1"], &["-x0"]]);
        let w = TwistedComplex::new(3, -1, vec![fs(&[-2]), fs(&[-1, -1])], vec![d]).unwrap();
        QuadraticSheaf::new(2, w, pm(3, &[-1, -1], &[1, 1], pairing), Sign::Plus).unwrap()
    }

    #[test]
    fn symmetry_checks() {
        check_symmetry(&split(1, &[0, 0], &[&["0", "1"], &["1", "0"]], Sign::Plus)).unwrap();
        let e = check_symmetry(&split(1, &[0, 0], &[&["0", "1"], &["-1", "0"]], Sign::Plus)).unwrap_err();
        assert!(matches!(e, Error::SymmetryFailure { .. }));
        check_symmetry(&ideal_point(&[&["x0^2", "x0*x1"], &["x0*x1", "x1^2"]])).unwrap();
        let e = check_symmetry(&ideal_point(&[&["x0^2", "0"], &["0", "x1^2"]])).unwrap_err();
        assert!(matches!(e, Error::DescentFailure(_)));
    }

    #[test]
    fn nondegeneracy_checks() {
        let w = check_nondegenerate(&split(1, &[0, 0], &[&["0", "1"], &["1", "0"]], Sign::Plus)).unwrap();
        assert_eq!(w.fiber_rank, 2);
        let w = check_nondegenerate(&ideal_point(&[&["x0^2", "x0*x1"], &["x0*x1", "x1^2"]])).unwrap();
        assert_eq!(w.fiber_rank, 1);
        let e = check_nondegenerate(&split(1, &[0, 0], &[&["0", "0"], &["0", "0"]], Sign::Plus)).unwrap_err();
        assert!(matches!(e, Error::Degenerate { attempts: 8, .. }));
    }

    #[test]
    fn fiber_rank_drop_at_the_point() {
        // p = (0:0:1) is where I_p is not locally free.
        let q = ideal_point(&[&["x0^2", "x0*x1"], &["x0*x1", "x1^2"]]);
        let e = check_nondegenerate_at(&q, &[rat(0), rat(0), rat(1)]).unwrap_err();
        assert!(matches!(e, Error::FiberRankDrop { fiber: 2, generic: 1, .. }));
    }

    #[test]
    fn deformation_complex_shapes() {
        let q = split(1, &[0, 0], &[&["0", "1"], &["1", "0"]], Sign::Plus);
        let dc = build_deformation_complex(&q).unwrap();
        assert_eq!(dc.source.rank(0), 4);
        assert_eq!(dc.part.complex.rank(0), 3);
        let q = ideal_point(&[&["x0^2", "x0*x1"], &["x0*x1", "x1^2"]]);
        let dc = build_deformation_complex(&q).unwrap();
        // the + part of DW^1 (x) DW^1 vanishes (rank-one odd term), so the top is degree 2
        assert_eq!((dc.complex.min_degree(), dc.complex.max_degree()), (-1, 2));
    }

    #[test]
    fn reports_for_split_bundles() {
        let r = deformation_report(&split(1, &[0, 0], &[&["0", "1"], &["1", "0"]], Sign::Plus), None).unwrap();
        assert_eq!((r.h0, r.h1, r.h2), (1, 0, 0));
        assert!(r.les.exact && r.euler.holds && r.cross_check_agrees);
        let r = deformation_report(&split(1, &[0, 0], &[&["0", "1"], &["-1", "0"]], Sign::Minus), None).unwrap();
        assert_eq!((r.h0, r.h1, r.h2), (3, 0, 0));
        let r = deformation_report(&split(1, &[1, -1], &[&["0", "1"], &["-1", "0"]], Sign::Minus), None).unwrap();
        assert_eq!((r.h0, r.h1, r.h2), (4, 1, 0));
        assert!(r.les.exact && r.cross_check_agrees);
    }

    #[test]
    fn symmetries_of_hyperbolic_plane() {
        let s = infinitesimal_symmetries(&split(1, &[0, 0], &[&["0", "1"], &["1", "0"]], Sign::Plus)).unwrap();
        assert_eq!(s.dim, 1);
        let m = &s.basis[0];
        assert_eq!(m.get(0, 0), &m.get(1, 1).neg());
        assert!(m.get(0, 1).is_zero() && m.get(1, 0).is_zero());
        let s = infinitesimal_symmetries(&split(1, &[0, 0], &[&["0", "1"], &["-1", "0"]], Sign::Minus)).unwrap();
        assert_eq!(s.dim, 3);
    }

    #[test]
    fn ideal_point_report() {
        let r = deformation_report(&ideal_point(&[&["x0^2", "x0*x1"], &["x0*x1", "x1^2"]]), None).unwrap();
        assert!(r.les.exact, "{:?}", r.les.failures);
        assert!(r.cross_check_agrees, "h0 {} vs {:?}", r.h0, r.cross_check);
        assert!(r.euler.holds);
        eprintln!("I_p: {:?}", (r.h0, r.h1, r.h2, &r.cohomology.dims));
    }
}
