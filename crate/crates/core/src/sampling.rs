//! Seeded random rational elements with prescribed structure.
//!
//! Coordinates have numerators in `[-9, 9]` and denominators in `{1, 2, 3}`.
//! Every draw gets its own stream (`seed + index`), so results do not depend
//! on how draws are spread over threads.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::element::{multiply, CdElement, Element};
use crate::error::Result;
use crate::scalar::{rat, Rational, Scalar};

pub type DrawRng = ChaCha8Rng;

pub fn rng_for(seed: u64, index: u64) -> DrawRng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_add(index))
}

pub fn random_rational(rng: &mut DrawRng) -> Rational {
    rat(rng.gen_range(-9..=9), rng.gen_range(1..=3))
}

fn nonzero_rational(rng: &mut DrawRng) -> Rational {
    loop {
        let q = random_rational(rng);
        if !Scalar::is_zero(&q) {
            return q;
        }
    }
}

/// Random element whose coordinates outside `allowed` vanish; never zero.
fn random_supported(level: u32, rng: &mut DrawRng, allowed: impl Fn(usize) -> bool) -> CdElement {
    let dim = 1usize << level;
    loop {
        let coords: Vec<Rational> =
            (0..dim).map(|i| if allowed(i) { random_rational(rng) } else { rat(0, 1) }).collect();
        let e = CdElement::from_coords(level, coords).expect("length matches level");
        if !e.is_zero() {
            return e;
        }
    }
}

pub fn random_element(level: u32, rng: &mut DrawRng) -> CdElement {
    random_supported(level, rng, |_| true)
}

pub fn random_pure(level: u32, rng: &mut DrawRng) -> CdElement {
    random_supported(level, rng, |i| i != 0)
}

pub fn random_doubly_pure(level: u32, rng: &mut DrawRng) -> CdElement {
    let half = 1usize << level.saturating_sub(1);
    random_supported(level, rng, |i| i != 0 && i != half)
}

/// Sparse pure element: a few nonzero coordinates, which keeps exact
/// arithmetic at high levels cheap.
pub fn random_sparse_pure(level: u32, terms: usize, rng: &mut DrawRng) -> CdElement {
    let dim = 1usize << level;
    loop {
        let mut e = CdElement::zero(level);
        for _ in 0..terms {
            let i = rng.gen_range(1..dim);
            e = &e + &CdElement::from_terms(level, &[(i, random_rational(rng))]).expect("in range");
        }
        if !e.is_zero() {
            return e;
        }
    }
}

/// `(r, s)` with `r^2 + s^2 = 1`, from `t = p/q` as `((1-t^2)/(1+t^2), 2t/(1+t^2))`.
pub fn random_circle_point(rng: &mut DrawRng) -> (Rational, Rational) {
    let t = random_rational(rng);
    let one = rat(1, 1);
    let d = &one + &t * &t;
    ((&one - &t * &t) / &d, rat(2, 1) * &t / &d)
}

/// Rational unit vector in `R^m` by inverse stereographic projection of a
/// random rational point of `R^(m-1)`.
pub fn random_unit_vector(m: usize, rng: &mut DrawRng) -> Vec<Rational> {
    let y: Vec<Rational> = (0..m.saturating_sub(1)).map(|_| random_rational(rng)).collect();
    let ysq = y.iter().fold(rat(0, 1), |acc, v| acc + v * v);
    let d = rat(1, 1) + &ysq;
    let mut out = Vec::with_capacity(m);
    out.push((rat(1, 1) - &ysq) / &d);
    out.extend(y.iter().map(|v| rat(2, 1) * v / &d));
    out
}

/// Householder reflection `v - 2 <v,w>/<w,w> w`.
fn reflect(v: &mut [Rational], w: &[Rational]) {
    let ww = w.iter().fold(rat(0, 1), |acc, x| acc + x * x);
    if Scalar::is_zero(&ww) {
        return;
    }
    let vw = v.iter().zip(w).fold(rat(0, 1), |acc, (x, y)| acc + x * y);
    let k = rat(2, 1) * vw / ww;
    for (x, y) in v.iter_mut().zip(w) {
        *x -= &k * y;
    }
}

/// Pure, orthogonal, equal-norm `(a, b)`: the images of two distinct basis
/// directions under a product of three random rational reflections of the
/// pure subspace, scaled by a common rational.
pub fn random_stiefel_pair(level: u32, rng: &mut DrawRng) -> (CdElement, CdElement) {
    let m = (1usize << level) - 1;
    let p = rng.gen_range(0..m);
    let q = (p + rng.gen_range(1..m)) % m;
    let mut u = vec![rat(0, 1); m];
    let mut v = vec![rat(0, 1); m];
    u[p] = rat(1, 1);
    v[q] = rat(1, 1);
    for _ in 0..3 {
        let w: Vec<Rational> = (0..m).map(|_| random_rational(rng)).collect();
        reflect(&mut u, &w);
        reflect(&mut v, &w);
    }
    let k = nonzero_rational(rng);
    let embed = |x: &[Rational]| {
        let mut coords = vec![rat(0, 1)];
        coords.extend(x.iter().map(|c| c * &k));
        CdElement::from_coords(level, coords).expect("length matches level")
    };
    (embed(&u), embed(&v))
}

/// Doubly pure `a` and `b` in `H_a^perp` with `|a| = |b|`.
///
/// `b = a e_j` for a `j` outside `{0, half}` and an `a` vanishing at `j` and
/// `j + half (mod dim)`, then both are turned inside their `tilde` planes by
/// random rational circle points.
pub fn random_nontrivial_pair(level: u32, rng: &mut DrawRng) -> Result<(CdElement, CdElement)> {
    let dim = 1usize << level;
    let half = dim / 2;
    let j = loop {
        let j = rng.gen_range(1..dim);
        if j != half {
            break j;
        }
    };
    let a = random_supported(level, rng, |i| i != 0 && i != half && i != j && i != (j ^ half));
    let b = multiply(&a, &Element::basis(level, j)?)?;
    let (r, s) = random_circle_point(rng);
    let b = b.scale(&r).try_add(&b.tilde()?.scale(&s))?;
    let (r, s) = random_circle_point(rng);
    let a = a.scale(&r).try_add(&a.tilde()?.scale(&s))?;
    Ok((a, b))
}

/// Doubly pure element of rational norm: `k` times a rational unit vector
/// on the doubly pure coordinates.
pub fn random_doubly_pure_rational_norm(level: u32, rng: &mut DrawRng) -> CdElement {
    let dim = 1usize << level;
    let half = dim / 2;
    let slots: Vec<usize> = (1..dim).filter(|&i| i != half).collect();
    let u = random_unit_vector(slots.len(), rng);
    let k = nonzero_rational(rng);
    let mut coords = vec![rat(0, 1); dim];
    for (slot, c) in slots.iter().zip(u) {
        coords[*slot] = c * &k;
    }
    CdElement::from_coords(level, coords).expect("length matches level")
}

/// Pure element `c + t e~0` with `c` doubly pure of rational norm and `t != 0`.
pub fn random_promotable(level: u32, rng: &mut DrawRng) -> Result<CdElement> {
    let c = random_doubly_pure_rational_norm(level, rng);
    let unit = CdElement::symplectic_unit(level)?;
    c.try_add(&unit.scale(&nonzero_rational(rng)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let a = random_element(4, &mut rng_for(7, 3));
        let b = random_element(4, &mut rng_for(7, 3));
        assert_eq!(a, b);
        assert_ne!(a, random_element(4, &mut rng_for(7, 4)));
    }

    #[test]
    fn structured_draws() {
        for i in 0..20 {
            let mut rng = rng_for(11, i);
            assert!(random_pure(4, &mut rng).is_pure());
            assert!(random_doubly_pure(4, &mut rng).is_doubly_pure());
            let (r, s) = random_circle_point(&mut rng);
            assert_eq!(&r * &r + &s * &s, rat(1, 1));
            let u = random_unit_vector(6, &mut rng);
            assert_eq!(u.iter().fold(rat(0, 1), |acc, x| acc + x * x), rat(1, 1));
        }
    }

    #[test]
    fn stiefel_pairs_are_exact() {
        for i in 0..20 {
            let (a, b) = random_stiefel_pair(4, &mut rng_for(5, i));
            assert!(a.is_pure() && b.is_pure());
            assert_eq!(a.inner(&b).unwrap(), rat(0, 1));
            assert_eq!(a.norm_sq(), b.norm_sq());
            assert!(!a.is_zero());
        }
    }

    #[test]
    fn nontrivial_pairs_are_exact() {
        for level in 3..=5 {
            for i in 0..20 {
                let (a, b) = random_nontrivial_pair(level, &mut rng_for(9, i)).unwrap();
                assert!(a.is_doubly_pure() && b.is_doubly_pure());
                assert_eq!(a.norm_sq(), b.norm_sq());
                assert_eq!(a.inner(&b).unwrap(), rat(0, 1));
                assert_eq!(a.tilde().unwrap().inner(&b).unwrap(), rat(0, 1));
            }
        }
    }

    #[test]
    fn promotable_has_rational_norm_part() {
        for i in 0..10 {
            let e = random_promotable(4, &mut rng_for(2, i)).unwrap();
            assert!(e.is_pure() && !e.is_doubly_pure());
            assert!(e.doubly_pure_part().norm_sq().try_sqrt().is_some());
        }
    }
}
