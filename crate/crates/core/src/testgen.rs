//! Random small complexes for property tests. Deterministic given the RNG.

use rand::Rng;

use crate::exactla::q;
use crate::freecomplex::{tensor, FreeSheaf, PolyMatrix, TwistedComplex};
use crate::polyring::{monomial_basis, Monomial, MonomialSpace, Poly};

pub const TWIST_RANGE: std::ops::RangeInclusive<i32> = -4..=4;
pub const MAX_RANK: usize = 3;

/// Random homogeneous polynomial of degree `e` (zero when `e < 0`) with small
/// integer coefficients.
pub fn random_poly<R: Rng>(rng: &mut R, nvars: usize, e: i32) -> Poly {
    let mut out = Poly::zero(nvars);
    if e < 0 {
        return out;
    }
    for m in monomial_basis(&MonomialSpace::polynomial(nvars, e)) {
        if rng.gen_bool(0.5) {
            out.add_term(Monomial(m), q(rng.gen_range(-2..=2)));
        }
    }
    out
}

pub fn random_sheaf<R: Rng>(rng: &mut R, min_rank: usize, max_rank: usize) -> FreeSheaf {
    let r = rng.gen_range(min_rank..=max_rank);
    FreeSheaf::new((0..r).map(|_| rng.gen_range(TWIST_RANGE)).collect())
}

pub fn random_map<R: Rng>(rng: &mut R, nvars: usize, source: &FreeSheaf, target: &FreeSheaf) -> PolyMatrix {
    let rows = target
        .twists
        .iter()
        .map(|t| source.twists.iter().map(|s| random_poly(rng, nvars, t - s)).collect())
        .collect();
    PolyMatrix::new(nvars, source.clone(), target.clone(), rows).expect("degrees are forced")
}

fn two_term<R: Rng>(rng: &mut R, nvars: usize, lo: i32, a: FreeSheaf, b: FreeSheaf) -> TwistedComplex {
    let d = random_map(rng, nvars, &a, &b);
    TwistedComplex::new(nvars, lo, vec![a, b], vec![d]).expect("two-term complex")
}

fn in_bounds(c: &TwistedComplex) -> bool {
    c.degrees().all(|i| c.rank(i) <= MAX_RANK && c.term(i).twists.iter().all(|t| TWIST_RANGE.contains(t)))
}

/// A random complex with one to three terms, twists in [-4, 4] and ranks at
/// most 3. Three-term complexes arise as tensor products of two-term ones, so
/// d^2 = 0 holds by construction rather than by luck.
pub fn random_complex<R: Rng>(rng: &mut R, nvars: usize) -> TwistedComplex {
    loop {
        let lo = rng.gen_range(-2..=1);
        let c = match rng.gen_range(0..3) {
            0 => TwistedComplex::single(nvars, random_sheaf(rng, 1, MAX_RANK), lo),
            1 => {
                let a = random_sheaf(rng, 1, 2);
                let b = random_sheaf(rng, 1, MAX_RANK);
                two_term(rng, nvars, lo, a, b)
            }
            _ => {
                let a = random_sheaf(rng, 1, 1);
                let b = random_sheaf(rng, 1, 2);
                let left = two_term(rng, nvars, lo, a, b);
                let x = FreeSheaf::new(vec![rng.gen_range(-2..=0)]);
                let y = FreeSheaf::new(vec![rng.gen_range(0..=2)]);
                let right = two_term(rng, nvars, 0, x, y);
                tensor(&left, &right)
            }
        };
        if in_bounds(&c) && !c.is_zero() {
            return c;
        }
    }
}
