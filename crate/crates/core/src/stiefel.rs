//! Stiefel and non-trivial elements, the Hermitian form `2<x,y> - 2i<x~,y>`,
//! and a randomized sweep over Stiefel elements recording which ones are
//! zero divisors.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::element::{multiply, CdElement, Element};
use crate::error::{CdError, Result};
use crate::sampling::{self, rng_for};
use crate::scalar::Scalar;
use crate::spectrum::SCHEMA_VERSION;
use crate::zero_divisors::annihilator;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum CaseTag {
    NonTrivial,
    TildePartnerCase,
    PurePromotionCase,
    Unclassified,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WitnessInnerProducts {
    pub a_b: f64,
    pub tilde_a_b: f64,
    /// `|a|^2 - |b|^2`.
    pub norm_gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StiefelClassification {
    pub is_stiefel: bool,
    pub is_nontrivial: bool,
    pub witness_inner_products: WitnessInnerProducts,
    /// Set only for Stiefel pairs.
    pub case_tag: Option<CaseTag>,
}

fn vanishes<S: Scalar>(v: &S, scale: f64) -> bool {
    if S::EXACT {
        v.is_zero()
    } else {
        v.to_f64().abs() <= 1e-12 * scale.max(1.0)
    }
}

fn require_pure_pair<S: Scalar>(a: &Element<S>, b: &Element<S>, op: &'static str) -> Result<()> {
    if a.level() != b.level() {
        return Err(CdError::LevelMismatch { left: a.level(), right: b.level() });
    }
    if !a.is_pure() || !b.is_pure() {
        return Err(CdError::NotPure(op));
    }
    Ok(())
}

/// Parallel or zero doubly pure parts, i.e. `a` and `b` both lie in some
/// plane `span{c, e~0}`. Cauchy-Schwarz equality, exact on rationals.
fn share_promotion_plane<S: Scalar>(a: &Element<S>, b: &Element<S>) -> Result<bool> {
    let (ca, cb) = (a.doubly_pure_part(), b.doubly_pure_part());
    let ip = ca.inner(&cb)?;
    let lhs = ip.mul(&ip);
    let rhs = ca.norm_sq().mul(&cb.norm_sq());
    Ok(vanishes(&lhs.sub(&rhs), rhs.to_f64()))
}

pub fn classify<S: Scalar>(a: &Element<S>, b: &Element<S>) -> Result<StiefelClassification> {
    require_pure_pair(a, b, "classification")?;
    if a.level() < 3 {
        return Err(CdError::LevelTooLow { op: "classification", min: 3, level: a.level() });
    }
    let scale = a.norm_sq().to_f64().max(b.norm_sq().to_f64());
    let ab = a.inner(b)?;
    let tab = a.tilde()?.inner(b)?;
    let gap = a.norm_sq().sub(&b.norm_sq());
    let is_stiefel = vanishes(&ab, scale) && vanishes(&gap, scale) && !a.is_zero();
    let both_doubly_pure = a.is_doubly_pure() && b.is_doubly_pure();
    let is_nontrivial = is_stiefel && both_doubly_pure && vanishes(&tab, scale);

    let case_tag = if !is_stiefel {
        None
    } else if is_nontrivial {
        Some(CaseTag::NonTrivial)
    } else if both_doubly_pure {
        let at = a.tilde()?;
        let plus = b.try_sub(&at)?;
        let minus = b.try_add(&at)?;
        let is_pm = |d: &Element<S>| vanishes(&d.norm_sq(), scale);
        Some(if is_pm(&plus) || is_pm(&minus) { CaseTag::TildePartnerCase } else { CaseTag::Unclassified })
    } else if share_promotion_plane(a, b)? {
        Some(CaseTag::PurePromotionCase)
    } else {
        Some(CaseTag::Unclassified)
    };
    if case_tag == Some(CaseTag::Unclassified) {
        log::debug!("unclassified Stiefel pair");
    }
    Ok(StiefelClassification {
        is_stiefel,
        is_nontrivial,
        witness_inner_products: WitnessInnerProducts {
            a_b: ab.to_f64(),
            tilde_a_b: tab.to_f64(),
            norm_gap: gap.to_f64(),
        },
        case_tag,
    })
}

/// `re + i im`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Complex<S> {
    pub re: S,
    pub im: S,
}

impl<S: Scalar> Complex<S> {
    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn times_i(&self) -> Self {
        Self { re: self.im.neg(), im: self.re.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

/// `H(x, y) = 2<x, y> - 2i<x~, y>` for doubly pure `x, y`.
pub fn hermitian_form<S: Scalar>(x: &Element<S>, y: &Element<S>) -> Result<Complex<S>> {
    if x.level() != y.level() {
        return Err(CdError::LevelMismatch { left: x.level(), right: y.level() });
    }
    if !x.is_doubly_pure() || !y.is_doubly_pure() {
        return Err(CdError::NotDoublyPure("Hermitian form"));
    }
    let two = S::from_i64(2);
    Ok(Complex { re: two.mul(&x.inner(y)?), im: two.mul(&x.tilde()?.inner(y)?).neg() })
}

/// Checks `alpha chi + chi alpha = -2(<a,x> + <b,y>) e_0` for doubly pure
/// `alpha = (a,b)`, `chi = (x,y)` with pure halves, and returns
/// `<a,x> + <b,y>`.
pub fn pair_inner_product_check<S: Scalar>(alpha: &Element<S>, chi: &Element<S>) -> Result<S> {
    if alpha.level() != chi.level() {
        return Err(CdError::LevelMismatch { left: alpha.level(), right: chi.level() });
    }
    if !alpha.is_doubly_pure() || !chi.is_doubly_pure() {
        return Err(CdError::NotDoublyPure("pair inner product"));
    }
    let (a, b) = alpha.halves()?;
    let (x, y) = chi.halves()?;
    let split = a.inner(&x)?.add(&b.inner(&y)?);
    let sym = multiply(alpha, chi)?.try_add(&multiply(chi, alpha)?)?;
    let expected = Element::one(alpha.level()).scale(&S::from_i64(-2).mul(&split));
    let defect = sym.try_sub(&expected)?;
    let ok = if S::EXACT { defect.is_zero() } else { defect.norm() <= 1e-10 * alpha.norm() * chi.norm() };
    if !ok || !vanishes(&alpha.inner(chi)?.sub(&split), 1.0) {
        return Err(CdError::Numerical("split inner product identity fails".into()));
    }
    Ok(split)
}

/// `(alpha, hat(alpha))` for a Stiefel `alpha = (a, b)`, verified to be
/// non-trivial one level up.
pub fn stiefel_to_nontrivial<S: Scalar>(alpha: &Element<S>) -> Result<(Element<S>, Element<S>)> {
    let (a, b) = alpha.halves()?;
    require_pure_pair(&a, &b, "Stiefel element")?;
    if a.level() < 3 {
        return Err(CdError::LevelTooLow { op: "Stiefel element", min: 3, level: a.level() });
    }
    if !classify(&a, &b)?.is_stiefel {
        return Err(CdError::Precondition("alpha is not a Stiefel element".into()));
    }
    let hat = alpha.hat()?;
    if !classify(alpha, &hat)?.is_nontrivial {
        return Err(CdError::Numerical("(alpha, hat(alpha)) is not non-trivial".into()));
    }
    Ok((alpha.clone(), hat))
}

/// Both sides of the biconditional: whether the halves of `alpha` form a
/// Stiefel pair, and whether `(alpha, hat(alpha))` is non-trivial.
pub fn stiefel_biconditional<S: Scalar>(alpha: &Element<S>) -> Result<(bool, bool)> {
    let (a, b) = alpha.halves()?;
    require_pure_pair(&a, &b, "Stiefel element")?;
    let left = classify(&a, &b)?.is_stiefel;
    let right = classify(alpha, &alpha.hat()?)?.is_nontrivial;
    Ok((left, right))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    /// Reflected basis pair, generically outside every known case.
    Generic,
    NonTrivial,
    TildePartner,
    Promotion,
}

impl SampleKind {
    fn for_index(i: u64) -> Self {
        match i % 4 {
            0 => SampleKind::Generic,
            1 => SampleKind::NonTrivial,
            2 => SampleKind::TildePartner,
            _ => SampleKind::Promotion,
        }
    }
}

/// One exact Stiefel pair of the requested kind.
pub fn sample_stiefel(level: u32, kind: SampleKind, rng: &mut sampling::DrawRng) -> Result<(CdElement, CdElement)> {
    match kind {
        SampleKind::Generic => Ok(sampling::random_stiefel_pair(level, rng)),
        SampleKind::NonTrivial => sampling::random_nontrivial_pair(level, rng),
        SampleKind::TildePartner => {
            let a = sampling::random_doubly_pure(level, rng);
            let at = a.tilde()?;
            let b = if rand::Rng::gen_bool(rng, 0.5) { at } else { -&at };
            Ok((a, b))
        }
        SampleKind::Promotion => {
            let a = sampling::random_promotable(level, rng)?;
            let beta = crate::zero_divisors::construct_promote_pure(&a, None)?.beta;
            let beta = beta
                .as_exact()
                .cloned()
                .ok_or_else(|| CdError::Numerical("promotable sample left the exact path".into()))?;
            let b = if rand::Rng::gen_bool(rng, 0.5) { beta } else { -&beta };
            Ok((a, b))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepEntry {
    pub index: u64,
    pub kind: SampleKind,
    pub a: String,
    pub b: String,
    pub case: Option<CaseTag>,
    pub annihilator_dim: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CaseTally {
    pub count: usize,
    pub zero_divisors: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StiefelSweepReport {
    pub schema_version: u32,
    pub level: u32,
    pub count: usize,
    pub seed: u64,
    pub zero_divisors: usize,
    pub by_case: BTreeMap<String, CaseTally>,
    /// Annihilator dimension in `A_(n+1)` -> number of draws.
    pub annihilator_dims: BTreeMap<usize, usize>,
    pub unclassified_zero_divisors: Vec<SweepEntry>,
    /// Stiefel elements with trivial annihilator.
    pub failures: Vec<SweepEntry>,
}

/// Exact annihilators up to this level of the pair `(a, b)`.
pub const SWEEP_EXACT_MAX_LEVEL: u32 = 5;

fn sweep_one(level: u32, seed: u64, index: u64) -> Result<SweepEntry> {
    let mut rng = rng_for(seed, index);
    let kind = SampleKind::for_index(index);
    let (a, b) = sample_stiefel(level, kind, &mut rng)?;
    let class = classify(&a, &b)?;
    if !class.is_stiefel {
        return Err(CdError::Numerical(format!("sampler produced a non-Stiefel pair at {index}")));
    }
    let alpha = Element::pair(&a, &b)?;
    let dim = if alpha.level() <= SWEEP_EXACT_MAX_LEVEL {
        annihilator(&alpha)?.dim
    } else {
        annihilator(&alpha.to_f64())?.dim
    };
    Ok(SweepEntry { index, kind, a: a.to_string(), b: b.to_string(), case: class.case_tag, annihilator_dim: dim })
}

/// Draws `count` Stiefel pairs at level `n` (cycling through the sample
/// kinds) and records annihilator dimensions of `(a, b)` in `A_(n+1)`.
pub fn sweep_stiefel_zero_divisors(level: u32, count: usize, seed: u64) -> Result<StiefelSweepReport> {
    if level < 3 {
        return Err(CdError::LevelTooLow { op: "Stiefel sweep", min: 3, level });
    }
    let entries: Vec<SweepEntry> =
        (0..count as u64).into_par_iter().map(|i| sweep_one(level, seed, i)).collect::<Result<_>>()?;

    let mut report = StiefelSweepReport {
        schema_version: SCHEMA_VERSION,
        level,
        count,
        seed,
        zero_divisors: 0,
        by_case: BTreeMap::new(),
        annihilator_dims: BTreeMap::new(),
        unclassified_zero_divisors: Vec::new(),
        failures: Vec::new(),
    };
    for e in entries {
        let is_zd = e.annihilator_dim > 0;
        let key = e.case.map_or("None".to_string(), |c| format!("{c:?}"));
        let tally = report.by_case.entry(key).or_default();
        tally.count += 1;
        *report.annihilator_dims.entry(e.annihilator_dim).or_default() += 1;
        if is_zd {
            tally.zero_divisors += 1;
            report.zero_divisors += 1;
            if e.case == Some(CaseTag::Unclassified) {
                report.unclassified_zero_divisors.push(e);
            }
        } else {
            log::warn!("Stiefel element with trivial annihilator: ({}, {})", e.a, e.b);
            report.failures.push(e);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse_element;
    use crate::scalar::{rat, Rational};

    fn p(level: u32, s: &str) -> CdElement {
        parse_element(level, s).unwrap()
    }

    #[test]
    fn classification_examples() {
        let c = classify(&p(3, "e1"), &p(3, "e2")).unwrap();
        assert!(c.is_stiefel && c.is_nontrivial);
        assert_eq!(c.case_tag, Some(CaseTag::NonTrivial));
        let c = classify(&p(3, "e1"), &p(3, "-e5")).unwrap();
        assert!(c.is_stiefel && !c.is_nontrivial);
        assert_eq!(c.case_tag, Some(CaseTag::TildePartnerCase));
        let c = classify(&p(3, "e1"), &p(3, "2e2")).unwrap();
        assert!(!c.is_stiefel && c.case_tag.is_none());
        let c = classify(&p(4, "3/5 e1 + 4/5 e8"), &p(4, "4/5 e1 - 3/5 e8")).unwrap();
        assert_eq!(c.case_tag, Some(CaseTag::PurePromotionCase));
        assert!(classify(&p(3, "e0"), &p(3, "e1")).is_err());
    }

    #[test]
    fn hermitian_examples() {
        let h = hermitian_form(&p(3, "e1"), &p(3, "e1")).unwrap();
        assert_eq!(h, Complex { re: rat(2, 1), im: rat(0, 1) });
        let h = hermitian_form(&p(3, "e1"), &p(3, "e5")).unwrap();
        assert_eq!(h, Complex { re: rat(0, 1), im: rat(-2, 1) });
        let (x, y) = (p(4, "e1 + 2e3 - e10"), p(4, "1/2 e5 + e9 - 3e13"));
        let hxy = hermitian_form(&x, &y).unwrap();
        assert_eq!(hermitian_form(&x.tilde().unwrap(), &y).unwrap(), hxy.times_i());
        assert_eq!(hermitian_form(&y, &x).unwrap(), hxy.conj());
        assert!(hermitian_form(&p(3, "e4"), &p(3, "e1")).is_err());
    }

    #[test]
    fn pair_inner_product_examples() {
        let v = pair_inner_product_check(&p(4, "e1 + e10"), &p(4, "e1 + e11")).unwrap();
        assert_eq!(v, rat(1, 1));
        let v = pair_inner_product_check(&p(4, "e1 + e10"), &p(4, "e2 + e9")).unwrap();
        assert_eq!(v, Rational::from_integer(0.into()));
    }

    #[test]
    fn stiefel_to_nontrivial_examples() {
        let (alpha, hat) = stiefel_to_nontrivial(&p(4, "e1 + e10")).unwrap();
        assert_eq!(hat, p(4, "e2 + e9"));
        assert_eq!(alpha, p(4, "e1 + e10"));
        assert!(stiefel_to_nontrivial(&p(4, "e1 + e9")).is_err());
        assert!(stiefel_to_nontrivial(&p(4, "e1 + 2e10")).is_err());
        assert_eq!(stiefel_biconditional(&p(4, "e1 + 2e10")).unwrap(), (false, false));
    }

    #[test]
    fn sweep_at_level_three_finds_only_zero_divisors() {
        let r = sweep_stiefel_zero_divisors(3, 16, 1).unwrap();
        assert_eq!(r.count, 16);
        assert_eq!(r.zero_divisors, 16);
        assert!(r.failures.is_empty());
        assert_eq!(r.annihilator_dims.keys().copied().collect::<Vec<_>>(), vec![4]);
        let empty = sweep_stiefel_zero_divisors(3, 0, 1).unwrap();
        assert_eq!(empty.count, 0);
        assert!(empty.by_case.is_empty());
    }
}
