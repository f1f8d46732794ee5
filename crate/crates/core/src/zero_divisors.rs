//! Zero-divisor constructors in `A_(n+1)` built from elements of `A_n`,
//! annihilators, and the symmetry checks every certified pair must pass.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::element::{multiply, AnyElement, CdElement, Element, FloatElement};
use crate::error::{CdError, Result};
use crate::linalg::{self, jacobi_eigen};
use crate::matrix::FloatMatrix;
use crate::operators::{left_matrix, right_matrix};
use crate::sampling::{self, rng_for, DrawRng};
use crate::scalar::{exact_sqrt, rationalize, Rational, Scalar};
use crate::spectrum::{self, exact_eigenspace, project_off_h, SCHEMA_VERSION};

/// Relative residual `|alpha chi| / (|alpha||chi|)` accepted on the floating path.
pub const CERTIFY_TOL: f64 = 1e-9;
/// Largest denominator tried when recovering an exact spectral value.
const RATIONALIZE_MAX_DEN: i64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    OrthogonalHPerp,
    TildePartner,
    SpectralLambda,
    PurePromotion,
    KernelSolve,
}

impl Construction {
    pub fn name(self) -> &'static str {
        match self {
            Construction::OrthogonalHPerp => "orthogonal_h_perp",
            Construction::TildePartner => "tilde_partner",
            Construction::SpectralLambda => "spectral_lambda",
            Construction::PurePromotion => "pure_promotion",
            Construction::KernelSolve => "kernel_solve",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn apply<S: Scalar>(self, e: &Element<S>) -> Element<S> {
        match self {
            Sign::Plus => e.clone(),
            Sign::Minus => -e,
        }
    }

    fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroDivisorPair {
    pub alpha: AnyElement,
    pub chi: AnyElement,
    pub construction: Construction,
    /// `0` on the exact path.
    pub residual: f64,
    pub exact: bool,
    pub level: u32,
}

fn any<S: Scalar>(e: Element<S>) -> AnyElement {
    match e.to_exact() {
        Some(x) if S::EXACT => x.into(),
        _ => e.to_f64().into(),
    }
}

/// Checks `alpha chi = 0` (exactly, or to [`CERTIFY_TOL`]) and that `alpha`
/// is doubly pure; anything else is a construction bug and is reported.
pub fn certify(alpha: AnyElement, chi: AnyElement, construction: Construction) -> Result<ZeroDivisorPair> {
    let level = alpha.level();
    if let (Some(a), Some(x)) = (alpha.as_exact(), chi.as_exact()) {
        if a.is_zero() || x.is_zero() {
            return Err(CdError::ZeroElement("certified pair"));
        }
        if !multiply(a, x)?.is_zero() {
            return Err(CdError::Numerical(format!("{construction:?}: ({a}) ({x}) is not zero")));
        }
        if !a.is_doubly_pure() {
            return Err(CdError::Numerical(format!("{construction:?}: alpha is not doubly pure")));
        }
        return Ok(ZeroDivisorPair { alpha, chi, construction, residual: 0.0, exact: true, level });
    }
    let (a, x) = (alpha.to_f64(), chi.to_f64());
    let scale = a.norm() * x.norm();
    if scale == 0.0 {
        return Err(CdError::ZeroElement("certified pair"));
    }
    let residual = multiply(&a, &x)?.norm() / scale;
    if !(residual <= CERTIFY_TOL) {
        return Err(CdError::Numerical(format!("{construction:?}: residual {residual:e} exceeds {CERTIFY_TOL:e}")));
    }
    if !alpha.is_doubly_pure(1e-12 * a.norm()) {
        return Err(CdError::Numerical(format!("{construction:?}: alpha is not doubly pure")));
    }
    Ok(ZeroDivisorPair { alpha, chi, construction, residual, exact: false, level })
}

fn vanishes<S: Scalar>(v: &S, scale: f64) -> bool {
    if S::EXACT {
        v.is_zero()
    } else {
        v.to_f64().abs() <= CERTIFY_TOL * scale
    }
}

fn require_doubly_pure_nonzero<S: Scalar>(a: &Element<S>, op: &'static str) -> Result<()> {
    if a.is_zero() {
        return Err(CdError::ZeroElement(op));
    }
    if !a.is_doubly_pure() {
        return Err(CdError::NotDoublyPure(op));
    }
    Ok(())
}

/// Which inner product with `H_a` fails, if any.
fn h_perp_violation<S: Scalar>(a: &Element<S>, x: &Element<S>) -> Result<Option<&'static str>> {
    let named = [
        ("e0", Element::one(a.level())),
        ("the symplectic unit", Element::symplectic_unit(a.level())?),
        ("a", a.clone()),
        ("tilde(a)", a.tilde()?),
    ];
    for (name, v) in named {
        if !vanishes(&x.inner(&v)?, x.norm() * v.norm()) {
            return Ok(Some(name));
        }
    }
    Ok(None)
}

fn require_h_perp<S: Scalar>(a: &Element<S>, x: &Element<S>, what: &str) -> Result<()> {
    if a.level() != x.level() {
        return Err(CdError::LevelMismatch { left: a.level(), right: x.level() });
    }
    if x.is_zero() {
        return Err(CdError::Precondition(format!("{what} must be nonzero")));
    }
    if let Some(name) = h_perp_violation(a, x)? {
        return Err(CdError::Precondition(format!("{what} is not in H_a^perp: not orthogonal to {name}")));
    }
    Ok(())
}

/// First nonzero projection of a basis vector onto `H_a^perp`.
pub fn some_h_perp_vector<S: Scalar>(a: &Element<S>) -> Result<Element<S>> {
    for j in 1..a.dim() {
        let x = project_off_h(a, &Element::basis(a.level(), j)?)?;
        if x.norm() > 1e-6 {
            return Ok(x);
        }
    }
    Err(CdError::Precondition("H_a^perp is trivial below level 3".into()))
}

/// `(a, b)` with `b` in `H_a^perp` and `|a| = |b|`, annihilated by `(ã, b~)`.
pub fn construct_orthogonal<S: Scalar>(a: &Element<S>, b: &Element<S>) -> Result<ZeroDivisorPair> {
    require_doubly_pure_nonzero(a, "orthogonal construction")?;
    require_h_perp(a, b, "b")?;
    if !vanishes(&a.norm_sq().sub(&b.norm_sq()), a.norm_sq().to_f64()) {
        return Err(CdError::Precondition(format!(
            "|a|^2 = {} and |b|^2 = {} differ",
            a.norm_sq().to_f64(),
            b.norm_sq().to_f64()
        )));
    }
    let alpha = Element::pair(a, b)?;
    let chi = Element::pair(&a.tilde()?, &b.tilde()?)?;
    certify(any(alpha), any(chi), Construction::OrthogonalHPerp)
}

/// `(a, ±ã)` annihilated by `(x, ∓x~)` for any nonzero `x` in `H_a^perp`.
pub fn construct_tilde_partner<S: Scalar>(a: &Element<S>, sign: Sign, x: &Element<S>) -> Result<ZeroDivisorPair> {
    require_doubly_pure_nonzero(a, "tilde-partner construction")?;
    if a.level() < 3 {
        return Err(CdError::LevelTooLow { op: "tilde-partner construction", min: 3, level: a.level() });
    }
    require_h_perp(a, x, "x")?;
    let alpha = Element::pair(a, &sign.apply(&a.tilde()?))?;
    let chi = Element::pair(x, &sign.flip().apply(&x.tilde()?))?;
    certify(any(alpha), any(chi), Construction::TildePartner)
}

/// `(a, ±m e~0)` annihilated by `(ax, ∓m x~)`, where `x` lies in `V_sigma`,
/// `sigma` is a nonzero spectral value and `m^2 = sigma |a|^2`.
///
/// With `x = None` an eigenvector is chosen. Rational `a` whose `sigma |a|^2`
/// is a rational square stays exact.
pub fn construct_spectral<S: Scalar>(
    a: &Element<S>,
    sigma: f64,
    x: Option<&Element<S>>,
    sign: Sign,
    tol: f64,
) -> Result<ZeroDivisorPair> {
    require_doubly_pure_nonzero(a, "spectral construction")?;
    if a.level() < 3 {
        return Err(CdError::LevelTooLow { op: "spectral construction", min: 3, level: a.level() });
    }
    if !(sigma.abs() > tol) {
        return Err(CdError::Precondition(
            "the spectral value must be nonzero; use the promotion constructor for 0".into(),
        ));
    }
    if let Some(pair) = spectral_exact(a, sigma, x, sign, tol)? {
        return Ok(pair);
    }
    spectral_float(&a.to_f64(), sigma, x.map(Element::to_f64).as_ref(), sign, tol)
}

fn spectral_exact<S: Scalar>(
    a: &Element<S>,
    sigma: f64,
    x: Option<&Element<S>>,
    sign: Sign,
    tol: f64,
) -> Result<Option<ZeroDivisorPair>> {
    let Some(ea) = a.to_exact().filter(|_| S::EXACT) else {
        return Ok(None);
    };
    let Some(s) = rationalize(sigma, RATIONALIZE_MAX_DEN).filter(|q| (q.to_f64() - sigma).abs() <= tol) else {
        return Ok(None);
    };
    let Some(m) = exact_sqrt(&(&s * ea.norm_sq())) else {
        return Ok(None);
    };
    let x = match x.map(|x| x.to_exact().expect("exact scalar")) {
        Some(x) => {
            require_h_perp(&ea, &x, "x")?;
            let lhs = multiply(&ea, &multiply(&ea, &x)?)?;
            if lhs != x.scale(&-(&m * &m)) {
                return Err(CdError::Precondition(format!("x is not in V_{s}")));
            }
            x
        }
        None => match exact_eigenspace(&ea, &s)?.into_iter().next() {
            Some(x) => x,
            None => {
                return Err(CdError::Precondition(format!("{s} is not in the spectrum")));
            }
        },
    };
    let unit = CdElement::symplectic_unit(ea.level())?;
    let alpha = Element::pair(&ea, &sign.apply(&unit.scale(&m)))?;
    let chi = Element::pair(&multiply(&ea, &x)?, &sign.flip().apply(&x.tilde()?.scale(&m)))?;
    certify(alpha.into(), chi.into(), Construction::SpectralLambda).map(Some)
}

fn spectral_float(
    a: &FloatElement,
    sigma: f64,
    x: Option<&FloatElement>,
    sign: Sign,
    tol: f64,
) -> Result<ZeroDivisorPair> {
    let report = spectrum::spectrum(a, spectrum::DEFAULT_CLUSTER_TOL)?;
    let Some(cluster) = report.clusters.iter().find(|c| (c.lambda - sigma).abs() <= tol) else {
        return Err(CdError::Precondition(format!("{sigma} is not in the spectrum {:?}", report.distinct())));
    };
    let n = a.norm_sq();
    let x = match x {
        Some(x) => {
            require_h_perp(a, x, "x")?;
            let lhs = multiply(a, &multiply(a, x)?)?;
            let defect = lhs.try_add(&x.scale(&(cluster.lambda * n)))?.norm() / (n * x.norm());
            if defect > CERTIFY_TOL.max(tol) {
                return Err(CdError::Precondition(format!("x is not in V_{sigma} (relative residual {defect:e})")));
            }
            x.clone()
        }
        None => spectrum::eigenspace(a, cluster.lambda, tol.max(1e-8))?
            .vectors
            .into_iter()
            .next()
            .ok_or_else(|| CdError::Numerical("empty eigenspace for a reported cluster".into()))?,
    };
    let m = (cluster.lambda * n).sqrt();
    let unit = FloatElement::symplectic_unit(a.level())?;
    let alpha = Element::pair(a, &sign.apply(&unit.scale(&m)))?;
    let chi = Element::pair(&multiply(a, &x)?, &sign.flip().apply(&x.tilde()?.scale(&m)))?;
    certify(alpha.into(), chi.into(), Construction::SpectralLambda)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Promotion {
    pub beta: AnyElement,
    pub pair: ZeroDivisorPair,
}

/// Given pure `alpha` of level `n >= 3`, finds `beta` with `alpha ⊥ beta`,
/// `|beta| = |alpha|` and `(alpha, beta)` a zero divisor.
///
/// Writing `alpha = c + t e~0` with `c` doubly pure, `beta = (t c - |c|^2 e~0)/|c|`;
/// this is a rotation of `(|alpha| c/|c|, -|alpha| e~0)`. For doubly pure
/// `alpha`, `beta = ã`. When `c = 0`, `e_1` stands in for `c/|c|`.
///
/// `sigma = Some(v)` selects the parametrization `alpha = r c - (s v) e~0`,
/// `beta = (s v) c + r e~0` with `r^2 + (s v)^2 = 1` (both scaled by
/// `|alpha|`), valid for nonzero `v` in the spectrum of `c`; `v = 0`
/// requires `c` itself to be a zero divisor and gives `beta = -|alpha| e~0`.
pub fn construct_promote_pure<S: Scalar>(alpha: &Element<S>, sigma: Option<f64>) -> Result<Promotion> {
    if !alpha.is_pure() {
        return Err(CdError::NotPure("pure promotion"));
    }
    if alpha.is_zero() {
        return Err(CdError::ZeroElement("pure promotion"));
    }
    if alpha.level() < 3 {
        return Err(CdError::LevelTooLow { op: "pure promotion", min: 3, level: alpha.level() });
    }
    let half = alpha.dim() / 2;
    let c = alpha.doubly_pure_part();
    let t = alpha.coord(half).clone();

    if let Some(v) = sigma {
        if v.abs() <= spectrum::DEFAULT_CLUSTER_TOL {
            return promote_zero_spectral(alpha);
        }
        if !c.is_zero() {
            let report = spectrum::spectrum(&c, spectrum::DEFAULT_CLUSTER_TOL)?;
            if !report.clusters.iter().any(|k| (k.lambda - v).abs() <= 1e-8) {
                return Err(CdError::Precondition(format!("{v} is not in the spectrum of c")));
            }
        }
    } else if c == *alpha {
        let beta = alpha.tilde()?;
        let x = some_h_perp_vector(alpha)?;
        let chi = Element::pair(&x, &-&x.tilde()?)?;
        let pair = certify(any(Element::pair(alpha, &beta)?), any(chi), Construction::TildePartner)?;
        return Ok(Promotion { beta: any(beta), pair });
    }
    // sigma = Some(v) flips the e~0 sign of the reference pair, negating beta.
    let flip = sigma.is_some();

    if c.is_zero() {
        let e1 = Element::basis(alpha.level(), 1)?;
        let beta = e1.scale(&t);
        let beta = if flip { -&beta } else { beta };
        let x = some_h_perp_vector(&e1)?;
        let tail = if flip { -&x.tilde()? } else { x.tilde()? };
        let chi = Element::pair(&multiply(&e1, &x)?, &tail)?;
        let pair = certify(any(Element::pair(alpha, &beta)?), any(chi), Construction::PurePromotion)?;
        return Ok(Promotion { beta: any(beta), pair });
    }

    match (c.to_exact(), exact_sqrt(&c.norm_sq().to_rational().unwrap_or_default())) {
        (Some(ec), Some(nc)) if S::EXACT => {
            let t = t.to_rational().expect("exact scalar");
            let x = exact_eigenspace(&ec, &Rational::from_integer(1.into()))?
                .into_iter()
                .next()
                .ok_or_else(|| CdError::Numerical("V_1 is empty".into()))?;
            promote_from(&alpha.to_exact().expect("exact"), &ec, &t, &nc, &x, flip)
        }
        _ => {
            let cf = c.to_f64();
            let x = spectrum::eigenspace(&cf, 1.0, 1e-8)?
                .vectors
                .into_iter()
                .next()
                .ok_or_else(|| CdError::Numerical("V_1 is empty".into()))?;
            promote_from(&alpha.to_f64(), &cf, &t.to_f64(), &cf.norm(), &x, flip)
        }
    }
}

/// `x` must lie in `V_1(c)`.
fn promote_from<T: Scalar>(
    alpha: &Element<T>,
    c: &Element<T>,
    t: &T,
    nc: &T,
    x: &Element<T>,
    flip: bool,
) -> Result<Promotion> {
    let unit = Element::symplectic_unit(alpha.level())?;
    let beta = c.scale(&t.div(nc)).try_sub(&unit.scale(nc))?;
    let beta = if flip { -&beta } else { beta };
    let tail = x.tilde()?.scale(nc);
    let tail = if flip { -&tail } else { tail };
    let chi = Element::pair(&multiply(c, x)?, &tail)?;
    let pair = certify(any(Element::pair(alpha, &beta)?), any(chi), Construction::PurePromotion)?;
    Ok(Promotion { beta: any(beta), pair })
}

fn promote_zero_spectral<S: Scalar>(alpha: &Element<S>) -> Result<Promotion> {
    if !alpha.is_doubly_pure() {
        return Err(CdError::Precondition("spectral value 0 needs a doubly pure element".into()));
    }
    if annihilator(alpha)?.dim == 0 {
        return Err(CdError::Precondition("0 is not in the spectrum".into()));
    }
    let sign = Sign::Minus;
    let pair = construct_spectral(alpha, 1.0, None, sign, 1e-9)?;
    let beta = match &pair.alpha {
        AnyElement::Exact(e) => AnyElement::Exact(e.halves()?.1),
        AnyElement::Float(e) => AnyElement::Float(e.halves()?.1),
    };
    Ok(Promotion { beta, pair: ZeroDivisorPair { construction: Construction::PurePromotion, ..pair } })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Annihilator {
    pub element: AnyElement,
    pub basis: Vec<AnyElement>,
    pub dim: usize,
    pub exact: bool,
    /// Left and right annihilators span the same space.
    pub left_equals_right: bool,
    /// `Ker L_alpha = Ker L_(alpha~)`.
    pub tilde_kernel_equal: bool,
    /// Largest `|alpha w| / (|alpha||w|)` over the basis.
    pub residual: f64,
}

/// Singular values below this fraction of `|alpha|` count as zero.
pub const KERNEL_REL_TOL: f64 = 1e-7;

/// `Ker L_alpha`, by exact elimination for rational input and by the
/// eigenvectors of `L^T L` otherwise.
pub fn annihilator<S: Scalar>(alpha: &Element<S>) -> Result<Annihilator> {
    match alpha.to_exact().filter(|_| S::EXACT) {
        Some(e) => annihilator_exact(&e),
        None => annihilator_float(&alpha.to_f64()),
    }
}

fn annihilator_exact(alpha: &CdElement) -> Result<Annihilator> {
    let left = linalg::nullspace(&left_matrix(alpha));
    let right = linalg::nullspace(&right_matrix(alpha));
    let tilde = if alpha.level() > 0 { linalg::nullspace(&left_matrix(&alpha.tilde()?)) } else { left.clone() };
    let basis = left.iter().map(|v| Element::from_coords(alpha.level(), v.clone())).collect::<Result<Vec<_>>>()?;
    for w in &basis {
        if !multiply(alpha, w)?.is_zero() {
            return Err(CdError::Numerical("exact kernel vector does not annihilate".into()));
        }
    }
    let left_equals_right = linalg::same_span(&left, &right);
    let tilde_kernel_equal = linalg::same_span(&left, &tilde);
    if !left_equals_right || !tilde_kernel_equal {
        log::error!("annihilator symmetry fails for {alpha}");
    }
    Ok(Annihilator {
        element: alpha.clone().into(),
        dim: basis.len(),
        basis: basis.into_iter().map(Into::into).collect(),
        exact: true,
        left_equals_right,
        tilde_kernel_equal,
        residual: 0.0,
    })
}

/// Orthonormal basis of the numerical kernel of `m`, with the worst residual.
fn float_kernel(m: &FloatMatrix, scale: f64) -> Result<(Vec<Vec<f64>>, f64)> {
    let gram = m.transpose().try_mul(m)?;
    let eig = jacobi_eigen(&gram)?;
    let cutoff = (KERNEL_REL_TOL * scale).powi(2);
    let mut out = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, v) in eig.values.iter().enumerate() {
        if *v > cutoff {
            break;
        }
        let w = eig.vectors.column(k);
        let r = m.apply(&w)?.iter().map(|x| x * x).sum::<f64>().sqrt() / scale;
        worst = worst.max(r);
        out.push(w);
    }
    Ok((out, worst))
}

/// Whether the columns spanned by `a` and `b` (orthonormal sets) agree.
fn float_same_span(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    a.len() == b.len()
        && a.iter().all(|v| {
            let proj: f64 = b.iter().map(|w| v.iter().zip(w).map(|(x, y)| x * y).sum::<f64>().powi(2)).sum();
            (proj - 1.0).abs() <= 1e-6
        })
}

fn annihilator_float(alpha: &FloatElement) -> Result<Annihilator> {
    if alpha.is_zero() {
        return Err(CdError::ZeroElement("annihilator"));
    }
    let scale = alpha.norm();
    let (left, residual) = float_kernel(&left_matrix(alpha), scale)?;
    let (right, _) = float_kernel(&right_matrix(alpha), scale)?;
    let (tilde, _) = float_kernel(&left_matrix(&alpha.tilde()?), scale)?;
    if residual > CERTIFY_TOL && !left.is_empty() {
        return Err(CdError::Numerical(format!("kernel vectors have residual {residual:e} above {CERTIFY_TOL:e}")));
    }
    let left_equals_right = float_same_span(&left, &right);
    let tilde_kernel_equal = float_same_span(&left, &tilde);
    if !left_equals_right || !tilde_kernel_equal {
        log::error!("annihilator symmetry fails for {alpha}");
    }
    let basis = left
        .into_iter()
        .map(|v| Element::from_coords(alpha.level(), v).map(AnyElement::Float))
        .collect::<Result<Vec<_>>>()?;
    Ok(Annihilator {
        element: alpha.clone().into(),
        dim: basis.len(),
        basis,
        exact: false,
        left_equals_right,
        tilde_kernel_equal,
        residual,
    })
}

/// For a certified product `alpha chi = 0`, checks `hat(alpha) hat(chi) = 0`.
pub fn hat_symmetry_check(alpha: &AnyElement, chi: &AnyElement) -> Result<bool> {
    if let (Some(a), Some(x)) = (alpha.as_exact(), chi.as_exact()) {
        if a.is_zero() || x.is_zero() || !multiply(a, x)?.is_zero() {
            return Err(CdError::Precondition("needs nonzero alpha, chi with alpha chi = 0".into()));
        }
        return Ok(multiply(&a.hat()?, &x.hat()?)?.is_zero());
    }
    let (a, x) = (alpha.to_f64(), chi.to_f64());
    let scale = a.norm() * x.norm();
    if scale == 0.0 || multiply(&a, &x)?.norm() > CERTIFY_TOL * scale {
        return Err(CdError::Precondition("needs nonzero alpha, chi with alpha chi = 0".into()));
    }
    Ok(multiply(&a.hat()?, &x.hat()?)?.norm() <= CERTIFY_TOL * scale)
}

/// `None` when `alpha` is not a zero divisor; otherwise whether it is doubly pure.
pub fn zero_divisor_is_doubly_pure_check<S: Scalar>(alpha: &Element<S>) -> Result<Option<bool>> {
    if annihilator(alpha)?.dim == 0 {
        return Ok(None);
    }
    Ok(Some(alpha.is_doubly_pure()))
}

const CONSTRUCTIONS: [Construction; 4] = [
    Construction::OrthogonalHPerp,
    Construction::TildePartner,
    Construction::SpectralLambda,
    Construction::PurePromotion,
];

fn random_sign(rng: &mut DrawRng) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// One randomized instance of `construction` from inputs of level `level`.
pub fn random_construction(level: u32, construction: Construction, rng: &mut DrawRng) -> Result<ZeroDivisorPair> {
    match construction {
        Construction::OrthogonalHPerp => {
            let (a, b) = sampling::random_nontrivial_pair(level, rng)?;
            construct_orthogonal(&a, &b)
        }
        Construction::TildePartner => {
            let a = sampling::random_doubly_pure(level, rng);
            let sign = random_sign(rng);
            let x = project_off_h(&a, &sampling::random_doubly_pure(level, rng))?;
            construct_tilde_partner(&a, sign, &x)
        }
        Construction::SpectralLambda => {
            let a = if rng.gen_bool(0.5) {
                sampling::random_doubly_pure_rational_norm(level, rng)
            } else {
                sampling::random_doubly_pure(level, rng)
            };
            let sign = random_sign(rng);
            let report = spectrum::spectrum(&a, spectrum::DEFAULT_CLUSTER_TOL)?;
            let nonzero: Vec<f64> = report.distinct().into_iter().filter(|v| *v > 1e-6).collect();
            if nonzero.is_empty() {
                return Err(CdError::Numerical("spectrum has no nonzero value".into()));
            }
            let sigma = nonzero[rng.gen_range(0..nonzero.len())];
            construct_spectral(&a, sigma, None, sign, 1e-8)
        }
        Construction::PurePromotion => {
            let alpha = sampling::random_promotable(level, rng)?;
            Ok(construct_promote_pure(&alpha, None)?.pair)
        }
        Construction::KernelSolve => Err(CdError::Precondition("no randomized kernel construction".into())),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ConstructorTally {
    pub count: usize,
    pub certified: usize,
    pub exact: usize,
    /// Constructed `alpha` found to be a doubly pure zero divisor.
    pub doubly_pure_zero_divisor: usize,
    pub max_residual: f64,
    /// Annihilator dimension of `alpha` -> number of instances.
    pub annihilator_dims: BTreeMap<usize, usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructorFailure {
    pub index: u64,
    pub construction: Construction,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConstructorSweepReport {
    pub schema_version: u32,
    pub level: u32,
    pub count: usize,
    pub seed: u64,
    pub by_construction: BTreeMap<String, ConstructorTally>,
    pub failures: Vec<ConstructorFailure>,
}

struct Instance {
    construction: Construction,
    pair: ZeroDivisorPair,
    dim: usize,
    doubly_pure: bool,
}

fn checked_instance(level: u32, construction: Construction, rng: &mut DrawRng) -> Result<Instance> {
    let pair = random_construction(level, construction, rng)?;
    let verdict = match &pair.alpha {
        AnyElement::Exact(a) => (annihilator(a)?.dim, zero_divisor_is_doubly_pure_check(a)?),
        AnyElement::Float(a) => (annihilator(a)?.dim, zero_divisor_is_doubly_pure_check(a)?),
    };
    Ok(Instance { construction, pair, dim: verdict.0, doubly_pure: verdict.1 == Some(true) })
}

/// Draw `i` runs constructor `i mod 4` (orthogonal, tilde partner, spectral,
/// promotion) on inputs of level `level`; every pair is certified and every
/// `alpha` is checked to be a doubly pure zero divisor.
pub fn sweep_constructors(level: u32, count: usize, seed: u64) -> Result<ConstructorSweepReport> {
    if level < 3 {
        return Err(CdError::LevelTooLow { op: "constructor sweep", min: 3, level });
    }
    let outcomes: Vec<(u64, Construction, Result<Instance>)> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let c = CONSTRUCTIONS[i as usize % CONSTRUCTIONS.len()];
            (i, c, checked_instance(level, c, &mut rng_for(seed, i)))
        })
        .collect();
    let mut by_construction: BTreeMap<String, ConstructorTally> = BTreeMap::new();
    let mut failures = Vec::new();
    for (index, construction, outcome) in outcomes {
        let tally = by_construction.entry(construction.name().to_string()).or_default();
        tally.count += 1;
        match outcome {
            Ok(inst) => {
                tally.certified += 1;
                tally.exact += usize::from(inst.pair.exact);
                tally.doubly_pure_zero_divisor += usize::from(inst.doubly_pure);
                tally.max_residual = tally.max_residual.max(inst.pair.residual);
                *tally.annihilator_dims.entry(inst.dim).or_default() += 1;
                if !inst.doubly_pure {
                    failures.push(ConstructorFailure {
                        index,
                        construction: inst.construction,
                        error: "alpha is not a doubly pure zero divisor".into(),
                    });
                }
            }
            Err(e) => failures.push(ConstructorFailure { index, construction, error: e.to_string() }),
        }
    }
    Ok(ConstructorSweepReport { schema_version: SCHEMA_VERSION, level, count, seed, by_construction, failures })
}
