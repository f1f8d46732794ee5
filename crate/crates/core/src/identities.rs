//! Exact identity checks on random rational draws.
//!
//! Each entry draws its inputs from a per-draw stream and evaluates both
//! sides in rational arithmetic. Operator identities are compared column by
//! column on the standard basis, which is exact and avoids forming matrix
//! products. Identities about pairs `(a, b)` draw `a` and `b` at the given
//! level, so the pair lives one level up.

use rayon::prelude::*;
use serde::Serialize;

use crate::element::{multiply, CdElement, Element};
use crate::error::{CdError, Result};
use crate::operators::block_identity_holds;
use crate::sampling::{self, rng_for, DrawRng};
use crate::scalar::{rat, Scalar};
use crate::spectrum::SCHEMA_VERSION;
use crate::stiefel::{hermitian_form, stiefel_biconditional};
use crate::zero_divisors::{construct_orthogonal, hat_symmetry_check};

pub type Check = fn(u32, &mut DrawRng) -> Result<bool>;

pub struct Identity {
    pub name: &'static str,
    pub statement: &'static str,
    pub min_level: u32,
    pub check: Check,
}

pub const REGISTRY: &[Identity] = &[
    Identity {
        name: "unit_product_is_tilde",
        statement: "a e~0 = a~ and e~0 a = -a~ (a doubly pure)",
        min_level: 2,
        check: unit_product_is_tilde,
    },
    Identity {
        name: "tilde_square",
        statement: "a a~ = -|a|^2 e~0 and a~ a = |a|^2 e~0 (a doubly pure)",
        min_level: 2,
        check: tilde_square,
    },
    Identity {
        name: "tilde_product",
        statement: "a~ b = -(ab)~ (a pure, b doubly pure)",
        min_level: 2,
        check: tilde_product,
    },
    Identity {
        name: "orthogonal_iff_tilde_sum",
        statement: "a perp b iff a~ b + b~ a = 0 (a, b doubly pure)",
        min_level: 2,
        check: orthogonal_iff_tilde_sum,
    },
    Identity {
        name: "tilde_orthogonal_iff_swap",
        statement: "a~ perp b iff ab = b~ a~ (a, b doubly pure)",
        min_level: 2,
        check: tilde_orthogonal_iff_swap,
    },
    Identity {
        name: "tilde_commute_iff_h_perp",
        statement: "a~ b = a b~ iff a perp b and a~ perp b (a, b doubly pure)",
        min_level: 2,
        check: tilde_commute_iff_h_perp,
    },
    Identity {
        name: "unit_anticommutation",
        statement: "L_a L_e~0 + L_e~0 L_a = 0, same for R (a doubly pure)",
        min_level: 2,
        check: unit_anticommutation,
    },
    Identity {
        name: "left_square_is_right_square",
        statement: "L_a^2 = R_a^2 (a pure)",
        min_level: 1,
        check: left_square_is_right_square,
    },
    Identity {
        name: "o2_invariance",
        statement: "L^2 of (ra - sb, sa + rb) is L^2_(a,b), of (ra + sb, sa - rb) is L^2_(b,a)",
        min_level: 1,
        check: o2_invariance,
    },
    Identity {
        name: "tilde_anticommutation",
        statement: "L_a L_a~ + L_a~ L_a = 0, same for R (a doubly pure)",
        min_level: 2,
        check: tilde_anticommutation,
    },
    Identity {
        name: "hat_symmetry",
        statement: "alpha chi = 0 implies hat(alpha) hat(chi) = 0",
        min_level: 3,
        check: hat_symmetry,
    },
    Identity {
        name: "split_inner_product",
        statement: "alpha chi + chi alpha = -2(<a,x> + <b,y>) e0 for pure halves",
        min_level: 1,
        check: split_inner_product,
    },
    Identity {
        name: "block_identity",
        statement: "L^2_(a,b) = ((A, -S), (S, A)) entrywise",
        min_level: 1,
        check: block_identity,
    },
    Identity { name: "flexibility", statement: "(xy)x = x(yx)", min_level: 1, check: flexibility },
    Identity {
        name: "pure_anticommute_iff_orthogonal",
        statement: "ab + ba = 0 iff a perp b (a, b pure)",
        min_level: 1,
        check: pure_anticommute_iff_orthogonal,
    },
    Identity {
        name: "stiefel_biconditional",
        statement: "(a, b) Stiefel iff (alpha, hat(alpha)) non-trivial",
        min_level: 3,
        check: stiefel_iff_nontrivial_hat,
    },
    Identity {
        name: "hermitian_tilde_linearity",
        statement: "H(x~, y) = i H(x, y)",
        min_level: 2,
        check: hermitian_tilde_linearity,
    },
    Identity {
        name: "hermitian_conjugate_symmetry",
        statement: "conj H(x, y) = H(y, x)",
        min_level: 2,
        check: hermitian_conjugate_symmetry,
    },
    Identity {
        name: "hermitian_zero_iff_h_perp",
        statement: "H(a, b) = 0 iff b in H_a^perp",
        min_level: 2,
        check: hermitian_zero_iff_h_perp,
    },
];

pub fn lookup(name: &str) -> Option<&'static Identity> {
    REGISTRY.iter().find(|i| i.name == name)
}

/// Registry entries whose name contains `filter` (all of them for `None`).
pub fn select(filter: Option<&str>) -> Vec<&'static Identity> {
    REGISTRY.iter().filter(|i| filter.map_or(true, |f| i.name.contains(f))).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityTally {
    pub name: String,
    pub level: u32,
    pub draws: usize,
    pub passed: usize,
    /// Draw indices that failed, with the error text when the check errored.
    pub failures: Vec<(u64, Option<String>)>,
}

impl IdentityTally {
    pub fn ok(&self) -> bool {
        self.passed == self.draws
    }
}

pub fn run_identity(identity: &Identity, level: u32, draws: usize, seed: u64) -> Result<IdentityTally> {
    if level < identity.min_level {
        return Err(CdError::LevelTooLow { op: identity.name, min: identity.min_level, level });
    }
    let outcomes: Vec<(u64, Result<bool>)> =
        (0..draws as u64).into_par_iter().map(|i| (i, (identity.check)(level, &mut rng_for(seed, i)))).collect();
    let failures: Vec<(u64, Option<String>)> = outcomes
        .into_iter()
        .filter_map(|(i, r)| match r {
            Ok(true) => None,
            Ok(false) => Some((i, None)),
            Err(e) => Some((i, Some(e.to_string()))),
        })
        .collect();
    Ok(IdentityTally { name: identity.name.to_string(), level, draws, passed: draws - failures.len(), failures })
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentitySweepReport {
    pub schema_version: u32,
    pub seed: u64,
    pub draws: usize,
    pub results: Vec<IdentityTally>,
    pub all_passed: bool,
}

/// Runs every selected identity at every level in `levels` where it applies.
pub fn sweep_identities(levels: &[u32], draws: usize, seed: u64, filter: Option<&str>) -> Result<IdentitySweepReport> {
    let mut results = Vec::new();
    for identity in select(filter) {
        for &level in levels.iter().filter(|&&l| l >= identity.min_level) {
            results.push(run_identity(identity, level, draws, seed)?);
        }
    }
    let all_passed = results.iter().all(IdentityTally::ok);
    Ok(IdentitySweepReport { schema_version: SCHEMA_VERSION, seed, draws, results, all_passed })
}

/// Integer coordinates. Every identity here is homogeneous in each input, so
/// it holds for a rational draw iff it holds for the draw scaled by the
/// common denominator bound.
type Int = Element<i128>;

const DENOMINATOR_LCM: i64 = 6;

fn cleared(e: CdElement) -> Int {
    let k = rat(DENOMINATOR_LCM, 1);
    let coords = e
        .coords()
        .iter()
        .map(|c| {
            let v = c * &k;
            assert!(v.is_integer(), "draw denominators divide {DENOMINATOR_LCM}");
            i128::try_from(v.to_integer()).expect("small integer")
        })
        .collect();
    Element::from_coords(e.level(), coords).expect("same level")
}

fn pure(level: u32, rng: &mut DrawRng) -> Int {
    cleared(sampling::random_pure(level, rng))
}

fn doubly_pure(level: u32, rng: &mut DrawRng) -> Int {
    cleared(sampling::random_doubly_pure(level, rng))
}

/// `(q^2 - p^2, 2pq, q^2 + p^2)` for a random `t = p/q`: an integer point on
/// the circle of radius `q^2 + p^2`.
fn circle_point(rng: &mut DrawRng) -> (i128, i128, i128) {
    let t = sampling::random_rational(rng);
    let p = i128::try_from(t.numer().clone()).expect("small");
    let q = i128::try_from(t.denom().clone()).expect("small");
    (q * q - p * p, 2 * p * q, q * q + p * p)
}

fn basis_columns<S: Scalar>(level: u32) -> impl Iterator<Item = Element<S>> {
    (0..1usize << level).map(move |i| Element::basis(level, i).expect("index in range"))
}

/// `f(e_i) = g(e_i)` for every basis vector.
fn operators_agree<S: Scalar>(
    level: u32,
    f: impl Fn(&Element<S>) -> Result<Element<S>>,
    g: impl Fn(&Element<S>) -> Result<Element<S>>,
) -> Result<bool> {
    for x in basis_columns(level) {
        if f(&x)? != g(&x)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `f(e_i) = 0` for every basis vector.
fn operator_vanishes<S: Scalar>(level: u32, f: impl Fn(&Element<S>) -> Result<Element<S>>) -> Result<bool> {
    for x in basis_columns(level) {
        if !f(&x)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

fn mul<S: Scalar>(a: &Element<S>, b: &Element<S>) -> Result<Element<S>> {
    multiply(a, b)
}

/// A positive multiple of `b` minus its projection on the span of the
/// mutually orthogonal `dirs`, computed without division.
fn project_off<S: Scalar>(b: &Element<S>, dirs: &[&Element<S>]) -> Result<Element<S>> {
    let mut out = b.clone();
    for d in dirs {
        out = out.scale(&d.norm_sq()).try_sub(&d.scale(&d.inner(&out)?))?;
    }
    Ok(out)
}

fn unit<S: Scalar>(level: u32) -> Result<Element<S>> {
    Element::symplectic_unit(level)
}

fn unit_product_is_tilde(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let a = doubly_pure(level, rng);
    let u = unit(level)?;
    let at = a.tilde()?;
    Ok(mul(&a, &u)? == at && mul(&u, &a)? == -&at)
}

fn tilde_square(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let a = doubly_pure(level, rng);
    let u = unit(level)?;
    let at = a.tilde()?;
    let n = a.norm_sq();
    Ok(mul(&a, &at)? == u.scale(&-n) && mul(&at, &a)? == u.scale(&n))
}

fn tilde_product(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let a = pure(level, rng);
    let b = doubly_pure(level, rng);
    Ok(mul(&a.tilde()?, &b)? == -&mul(&a, &b)?.tilde()?)
}

/// Evaluates a biconditional on a generic `b` and on `b` with the given
/// directions projected out, so both truth values get exercised.
fn biconditional_on<S: Scalar>(
    b: &Element<S>,
    projections: &[&[&Element<S>]],
    condition: impl Fn(&Element<S>) -> Result<bool>,
    conclusion: impl Fn(&Element<S>) -> Result<bool>,
) -> Result<bool> {
    let mut candidates = vec![b.clone()];
    for dirs in projections {
        candidates.push(project_off(b, dirs)?);
    }
    for c in &candidates {
        if condition(c)? != conclusion(c)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn orthogonal_iff_tilde_sum(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let a = doubly_pure(level, rng);
    let b = doubly_pure(level, rng);
    let at = a.tilde()?;
    biconditional_on(
        &b,
        &[&[&a], &[&at], &[&a, &at]],
        |b| Ok(a.inner(b)? == 0),
        |b| Ok(mul(&at, b)?.try_add(&mul(&b.tilde()?, &a)?)?.is_zero()),
    )
}

fn tilde_orthogonal_iff_swap(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let a = doubly_pure(level, rng);
    let b = doubly_pure(level, rng);
    let at = a.tilde()?;
    biconditional_on(
        &b,
        &[&[&a], &[&at], &[&a, &at]],
        |b| Ok(at.inner(b)? == 0),
        |b| Ok(mul(&a, b)? == mul(&b.tilde()?, &at)?),
    )
}

fn tilde_commute_iff_h_perp(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let a = doubly_pure(level, rng);
    let b = doubly_pure(level, rng);
    let at = a.tilde()?;
    biconditional_on(
        &b,
        &[&[&a], &[&at], &[&a, &at]],
        |b| Ok(a.inner(b)? == 0 && at.inner(b)? == 0),
        |b| Ok(mul(&at, b)? == mul(&a, &b.tilde()?)?),
    )
}

/// `L_p L_q + L_q L_p = 0` and `R_p R_q + R_q R_p = 0` on every basis vector.
fn left_and_right_anticommute(p: &Int, q: &Int) -> Result<bool> {
    let level = p.level();
    let left = operator_vanishes(level, |x| mul(p, &mul(q, x)?)?.try_add(&mul(q, &mul(p, x)?)?))?;
    let right = operator_vanishes(level, |x| mul(&mul(x, q)?, p)?.try_add(&mul(&mul(x, p)?, q)?))?;
    Ok(left && right)
}

fn unit_anticommutation(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let a = doubly_pure(level, rng);
    left_and_right_anticommute(&a, &unit(level)?)
}

fn tilde_anticommutation(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let a = doubly_pure(level, rng);
    left_and_right_anticommute(&a, &a.tilde()?)
}

fn left_square_is_right_square(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let a = pure(level, rng);
    operators_agree(level, |x| mul(&a, &mul(&a, x)?), |x| mul(&mul(x, &a)?, &a))
}

/// `x -> k alpha (alpha x)`.
fn left_square(alpha: &Int, k: i128) -> impl Fn(&Int) -> Result<Int> + '_ {
    move |x| Ok(mul(alpha, &mul(alpha, x)?)?.scale(&k))
}

/// With `(r, s) = (R, S) / D`, the rational statement scales to
/// `L^2_(Ra - Sb, Sa + Rb) = D^2 L^2_(a,b)`.
fn o2_invariance(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let a = pure(level, rng);
    let b = pure(level, rng);
    let (r, s, d) = circle_point(rng);
    let ab = Element::pair(&a, &b)?;
    let ba = Element::pair(&b, &a)?;
    let rotated = Element::pair(&a.scale(&r).try_sub(&b.scale(&s))?, &a.scale(&s).try_add(&b.scale(&r))?)?;
    let reflected = Element::pair(&a.scale(&r).try_add(&b.scale(&s))?, &a.scale(&s).try_sub(&b.scale(&r))?)?;
    let up = level + 1;
    Ok(operators_agree(up, left_square(&rotated, 1), left_square(&ab, d * d))?
        && operators_agree(up, left_square(&reflected, 1), left_square(&ba, d * d))?)
}

fn hat_symmetry(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let (a, b) = sampling::random_nontrivial_pair(level, rng)?;
    let pair = construct_orthogonal(&a, &b)?;
    if !pair.exact {
        return Err(CdError::Numerical("orthogonal construction left the rational path".into()));
    }
    let forward = hat_symmetry_check(&pair.alpha, &pair.chi)?;
    let alpha_hat = pair.alpha.as_exact().expect("exact").hat()?;
    let chi_hat = pair.chi.as_exact().expect("exact").hat()?;
    let backward = hat_symmetry_check(&alpha_hat.into(), &chi_hat.into())?;
    Ok(forward && backward)
}

fn split_inner_product(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let (a, b) = (pure(level, rng), pure(level, rng));
    let (x, y) = (pure(level, rng), pure(level, rng));
    let alpha = Element::pair(&a, &b)?;
    let chi = Element::pair(&x, &y)?;
    let split = a.inner(&x)? + b.inner(&y)?;
    let lhs = mul(&alpha, &chi)?.try_add(&mul(&chi, &alpha)?)?;
    let rhs = Element::one(level + 1).scale(&(-2 * split));
    Ok(lhs == rhs && alpha.inner(&chi)? == split)
}

fn block_identity(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let a = pure(level, rng);
    let b = pure(level, rng);
    block_identity_holds(&a, &b)
}

fn flexibility(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let x = cleared(sampling::random_element(level, rng));
    let y = cleared(sampling::random_element(level, rng));
    Ok(mul(&mul(&x, &y)?, &x)? == mul(&x, &mul(&y, &x)?)?)
}

fn pure_anticommute_iff_orthogonal(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let a = pure(level, rng);
    let b = pure(level, rng);
    biconditional_on(&b, &[&[&a]], |b| Ok(a.inner(b)? == 0), |b| Ok(mul(&a, b)?.try_add(&mul(b, &a)?)?.is_zero()))
}

fn stiefel_iff_nontrivial_hat(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let generic = Element::pair(&sampling::random_pure(level, rng), &sampling::random_pure(level, rng))?;
    let (a, b) = sampling::random_stiefel_pair(level, rng);
    let stiefel = Element::pair(&a, &b)?;
    for alpha in [generic, stiefel] {
        let (left, right) = stiefel_biconditional(&alpha)?;
        if left != right {
            return Ok(false);
        }
    }
    Ok(true)
}

fn hermitian_tilde_linearity(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let x = doubly_pure(level, rng);
    let y = doubly_pure(level, rng);
    Ok(hermitian_form(&x.tilde()?, &y)? == hermitian_form(&x, &y)?.times_i())
}

fn hermitian_conjugate_symmetry(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let x = doubly_pure(level, rng);
    let y = doubly_pure(level, rng);
    Ok(hermitian_form(&x, &y)?.conj() == hermitian_form(&y, &x)?)
}

fn hermitian_zero_iff_h_perp(level: u32, rng: &mut DrawRng) -> Result<bool> {
    let a = doubly_pure(level, rng);
    let b = doubly_pure(level, rng);
    let at = a.tilde()?;
    let h_a = [Element::one(level), at.clone(), a.clone(), unit(level)?];
    biconditional_on(
        &b,
        &[&[&a], &[&at], &[&a, &at]],
        |b| {
            for d in &h_a {
                if d.inner(b)? != 0 {
                    return Ok(false);
                }
            }
            Ok(true)
        },
        |b| Ok(hermitian_form(&a, b)?.is_zero()),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_identity_holds_on_a_few_draws() {
        for identity in REGISTRY {
            for level in identity.min_level.max(2)..=4 {
                let tally = run_identity(identity, level, 5, 99).unwrap();
                assert!(tally.ok(), "{} at level {level}: {:?}", identity.name, tally.failures);
            }
        }
    }

    #[test]
    fn filtering_by_substring() {
        assert_eq!(select(Some("hermitian")).len(), 3);
        assert_eq!(select(None).len(), REGISTRY.len());
        assert!(select(Some("no_such_identity")).is_empty());
        assert!(lookup("tilde_square").is_some());
    }

    #[test]
    fn a_false_identity_is_caught() {
        // Associativity fails in the octonions, so an associativity "identity"
        // must report failures.
        fn associative(level: u32, rng: &mut DrawRng) -> Result<bool> {
            let x = sampling::random_element(level, rng);
            let y = sampling::random_element(level, rng);
            let z = sampling::random_element(level, rng);
            Ok(mul(&mul(&x, &y)?, &z)? == mul(&x, &mul(&y, &z)?)?)
        }
        let fake = Identity { name: "associativity", statement: "", min_level: 0, check: associative };
        assert!(!run_identity(&fake, 3, 5, 1).unwrap().ok());
        assert!(run_identity(&fake, 2, 5, 1).unwrap().ok());
    }

    #[test]
    fn below_minimum_level_is_rejected() {
        assert!(run_identity(lookup("hat_symmetry").unwrap(), 2, 1, 0).is_err());
    }
}
