//! Left and right multiplication operators as dense matrices, the block form
//! of `L^2_(a,b)` and the Schur-complement invertibility test.

use std::ops::Deref;

use num_traits::Signed;
use serde::Serialize;

use crate::element::{multiply, AnyElement, CdElement, Element, FloatElement, DEFAULT_MAX_LEVEL};
use crate::error::{CdError, Result};
use crate::linalg::{self, jacobi_eigen};
use crate::matrix::{FloatMatrix, Matrix, RatMatrix};
use crate::scalar::{Rational, Scalar};

/// Which operator a matrix represents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Left,
    Right,
    LeftSquared,
    /// `A = L_a^2 + R_b^2`.
    SumOfSquares,
    /// `S = R_b L_a - L_a R_b`.
    Associator,
    Composite,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorMatrix<S> {
    pub kind: OperatorKind,
    pub matrix: Matrix<S>,
}

impl<S> Deref for OperatorMatrix<S> {
    type Target = Matrix<S>;
    fn deref(&self) -> &Matrix<S> {
        &self.matrix
    }
}

impl<S: Scalar> OperatorMatrix<S> {
    fn new(kind: OperatorKind, matrix: Matrix<S>) -> Self {
        Self { kind, matrix }
    }

    pub fn into_matrix(self) -> Matrix<S> {
        self.matrix
    }
}

fn warn_large(level: u32) {
    if level > DEFAULT_MAX_LEVEL {
        log::warn!("building a {0}x{0} operator matrix at level {level}", 1usize << level);
    }
}

/// Column `j` is `a * e_j`.
pub fn left_matrix<S: Scalar>(a: &Element<S>) -> OperatorMatrix<S> {
    warn_large(a.level());
    let cols: Vec<Element<S>> = (0..a.dim())
        .map(|j| {
            let e = Element::basis(a.level(), j).expect("index in range");
            multiply(a, &e).expect("same level")
        })
        .collect();
    OperatorMatrix::new(OperatorKind::Left, Matrix::from_columns(&cols))
}

/// Column `j` is `e_j * a`.
pub fn right_matrix<S: Scalar>(a: &Element<S>) -> OperatorMatrix<S> {
    warn_large(a.level());
    let cols: Vec<Element<S>> = (0..a.dim())
        .map(|j| {
            let e = Element::basis(a.level(), j).expect("index in range");
            multiply(&e, a).expect("same level")
        })
        .collect();
    OperatorMatrix::new(OperatorKind::Right, Matrix::from_columns(&cols))
}

fn square<S: Scalar>(m: &Matrix<S>) -> Matrix<S> {
    m.try_mul(m).expect("square matrix")
}

pub fn left_squared<S: Scalar>(a: &Element<S>) -> OperatorMatrix<S> {
    OperatorMatrix::new(OperatorKind::LeftSquared, square(&left_matrix(a)))
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

/// `S(x) = (a x) b - a (x b)` as the matrix `R_b L_a - L_a R_b`.
pub fn assoc_operator<S: Scalar>(a: &Element<S>, b: &Element<S>) -> Result<OperatorMatrix<S>> {
    require_pure_pair(a, b, "associator operator")?;
    let la = left_matrix(a);
    let rb = right_matrix(b);
    let s = rb.try_mul(&la)?.try_sub(&la.try_mul(&rb)?)?;
    Ok(OperatorMatrix::new(OperatorKind::Associator, s))
}

/// `(A, S)` with `A = L_a^2 + R_b^2` and `S` the associator operator, so that
/// `L^2_(a,b) = ((A, -S), (S, A))`.
pub fn block_decomposition<S: Scalar>(
    a: &Element<S>,
    b: &Element<S>,
) -> Result<(OperatorMatrix<S>, OperatorMatrix<S>)> {
    require_pure_pair(a, b, "block decomposition")?;
    if a.is_zero() || b.is_zero() {
        return Err(CdError::ZeroElement("block decomposition"));
    }
    let sum = square(&left_matrix(a)).try_add(&square(&right_matrix(b)))?;
    let s = assoc_operator(a, b)?;
    Ok((OperatorMatrix::new(OperatorKind::SumOfSquares, sum), s))
}

/// The block matrix `((A, -S), (S, A))`.
pub fn assemble_blocks<S: Scalar>(sum: &Matrix<S>, s: &Matrix<S>) -> Result<Matrix<S>> {
    Matrix::block2(sum, &s.neg(), s, sum)
}

/// Checks `L^2_(a,b) = ((A, -S), (S, A))` entrywise.
pub fn block_identity_holds<S: Scalar>(a: &Element<S>, b: &Element<S>) -> Result<bool> {
    let (sum, s) = block_decomposition(a, b)?;
    let direct = left_squared(&Element::pair(a, b)?);
    Ok(direct.matrix == assemble_blocks(&sum, &s)?)
}

/// `L_a^2 = R_a^2` for pure `a`.
pub fn l_squared_equals_r_squared<S: Scalar>(a: &Element<S>) -> Result<bool> {
    if !a.is_pure() {
        return Err(CdError::NotPure("L^2 = R^2 check"));
    }
    Ok(square(&left_matrix(a)) == square(&right_matrix(a)))
}

fn anticommute<S: Scalar>(x: &Matrix<S>, y: &Matrix<S>) -> bool {
    let xy = x.try_mul(y).expect("square");
    let yx = y.try_mul(x).expect("square");
    xy.try_add(&yx).expect("same shape").is_zero()
}

/// Outcome of the four anticommutation identities for a doubly pure `a`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Anticommutation {
    /// `R_a R_e~0 + R_e~0 R_a = 0`.
    pub right_with_symplectic: bool,
    /// `L_a L_e~0 + L_e~0 L_a = 0`.
    pub left_with_symplectic: bool,
    /// `L_a L_ã + L_ã L_a = 0`.
    pub left_with_tilde: bool,
    /// `R_a R_ã + R_ã R_a = 0`.
    pub right_with_tilde: bool,
}

impl Anticommutation {
    pub fn all(&self) -> bool {
        self.right_with_symplectic && self.left_with_symplectic && self.left_with_tilde && self.right_with_tilde
    }
}

pub fn anticommutation_check<S: Scalar>(a: &Element<S>) -> Result<Anticommutation> {
    if !a.is_doubly_pure() {
        return Err(CdError::NotDoublyPure("anticommutation check"));
    }
    let unit = Element::symplectic_unit(a.level())?;
    let at = a.tilde()?;
    let (la, ra) = (left_matrix(a), right_matrix(a));
    Ok(Anticommutation {
        right_with_symplectic: anticommute(&ra, &right_matrix(&unit)),
        left_with_symplectic: anticommute(&la, &left_matrix(&unit)),
        left_with_tilde: anticommute(&la, &left_matrix(&at)),
        right_with_tilde: anticommute(&ra, &right_matrix(&at)),
    })
}

fn circle_check<S: Scalar>(r: &S, s: &S) -> Result<()> {
    let dev = r.mul(r).add(&s.mul(s)).sub(&S::one());
    let ok = if S::EXACT { dev.is_zero() } else { dev.to_f64().abs() <= 1e-12 };
    if ok {
        Ok(())
    } else {
        Err(CdError::Precondition(format!("r^2 + s^2 must equal 1 (off by {:e})", dev.to_f64())))
    }
}

/// Rotation `(ra - sb, sa + rb)` or reflection `(ra + sb, sa - rb)`.
pub fn o2_action<S: Scalar>(
    a: &Element<S>,
    b: &Element<S>,
    r: &S,
    s: &S,
    reflect: bool,
) -> Result<(Element<S>, Element<S>)> {
    circle_check(r, s)?;
    let (ra, sb, sa, rb) = (a.scale(r), b.scale(s), a.scale(s), b.scale(r));
    if reflect {
        Ok((ra.try_add(&sb)?, sa.try_sub(&rb)?))
    } else {
        Ok((ra.try_sub(&sb)?, sa.try_add(&rb)?))
    }
}

/// Checks that the O(2) action preserves `L^2`: rotations give
/// `L^2_(a,b)`, reflections give `L^2_(b,a)`.
pub fn o2_preserves_l_squared<S: Scalar>(a: &Element<S>, b: &Element<S>, r: &S, s: &S, reflect: bool) -> Result<bool> {
    require_pure_pair(a, b, "O(2) action")?;
    let (x, y) = o2_action(a, b, r, s, reflect)?;
    let moved = left_squared(&Element::pair(&x, &y)?);
    let reference = if reflect { left_squared(&Element::pair(b, a)?) } else { left_squared(&Element::pair(a, b)?) };
    if S::EXACT {
        Ok(moved.matrix == reference.matrix)
    } else {
        let scale = reference.to_f64().max_abs().max(1.0);
        Ok(moved.to_f64().max_abs_diff(&reference.to_f64()) <= 1e-10 * scale)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InvertibilityReason {
    /// Direct full-rank computation (used when `A` is singular).
    DetNonzero,
    KernelVectorFound,
    /// `A` invertible and `-1` is not an eigenvalue of `(A^-1 S)^2`.
    SchurCriterion,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InvertibilityVerdict {
    pub invertible: bool,
    pub reason: InvertibilityReason,
    pub witness: Option<AnyElement>,
    /// `ln |det L_(a,b)|`; `None` when singular.
    pub det_log_abs: Option<f64>,
    /// `||L w|| / ||w||` for the witness.
    pub witness_residual: Option<f64>,
    pub exact: bool,
}

/// Residual threshold for floating kernel witnesses.
pub const WITNESS_RESIDUAL_TOL: f64 = 1e-9;
/// Levels up to this use rational arithmetic in [`invertibility_test`].
pub const DEFAULT_EXACT_MAX_LEVEL: u32 = 4;

/// Decides whether `L_(a,b)` is invertible for pure nonzero `a, b` of level
/// `n >= 3`. Uses the Schur complement of `A` when `A` is invertible and a
/// direct rank computation otherwise.
pub fn invertibility_test<S: Scalar>(
    a: &Element<S>,
    b: &Element<S>,
    exact_max_level: u32,
) -> Result<InvertibilityVerdict> {
    require_pure_pair(a, b, "invertibility test")?;
    if a.is_zero() || b.is_zero() {
        return Err(CdError::ZeroElement("invertibility test"));
    }
    if a.level() < 3 {
        return Err(CdError::LevelTooLow { op: "invertibility test", min: 3, level: a.level() });
    }
    match (a.to_exact(), b.to_exact()) {
        (Some(ea), Some(eb)) if a.level() <= exact_max_level => invertibility_exact(&ea, &eb),
        _ => invertibility_float(&a.to_f64(), &b.to_f64()),
    }
}

pub(crate) fn ln_abs(q: &Rational) -> f64 {
    let ln_big = |v: &num_bigint::BigInt| {
        let bits = v.bits();
        let shift = bits.saturating_sub(60);
        let top: f64 = num_traits::ToPrimitive::to_f64(&(v.abs() >> shift)).unwrap_or(f64::NAN);
        top.ln() + shift as f64 * std::f64::consts::LN_2
    };
    ln_big(q.numer()) - ln_big(q.denom())
}

fn invertibility_exact(a: &CdElement, b: &CdElement) -> Result<InvertibilityVerdict> {
    let (sum, s) = block_decomposition(a, b)?;
    let alpha = Element::pair(a, b)?;
    let l = left_matrix(&alpha);
    let singular = |l: &RatMatrix| -> Result<InvertibilityVerdict> {
        let kernel = linalg::nullspace(l);
        let w = Element::from_coords(alpha.level(), kernel[0].clone())?;
        debug_assert!(multiply(&alpha, &w)?.is_zero());
        Ok(InvertibilityVerdict {
            invertible: false,
            reason: InvertibilityReason::KernelVectorFound,
            witness: Some(w.into()),
            det_log_abs: None,
            witness_residual: Some(0.0),
            exact: true,
        })
    };
    let det_a = linalg::determinant(&sum)?;
    if Scalar::is_zero(&det_a) {
        if linalg::rank(&l) == l.rows() {
            let det = linalg::determinant(&l)?;
            return Ok(InvertibilityVerdict {
                invertible: true,
                reason: InvertibilityReason::DetNonzero,
                witness: None,
                det_log_abs: Some(ln_abs(&det)),
                witness_residual: None,
                exact: true,
            });
        }
        return singular(&l);
    }
    let inv = linalg::inverse(&sum).ok_or_else(|| CdError::Numerical("A reported invertible".into()))?;
    let schur = sum.try_add(&s.try_mul(&inv)?.try_mul(&s)?)?;
    let det_schur = linalg::determinant(&schur)?;
    if Scalar::is_zero(&det_schur) {
        return singular(&l);
    }
    // det L^2 = det(A) det(A + S A^-1 S), and det L = sqrt(det L^2) in magnitude.
    Ok(InvertibilityVerdict {
        invertible: true,
        reason: InvertibilityReason::SchurCriterion,
        witness: None,
        det_log_abs: Some(0.5 * (ln_abs(&det_a) + ln_abs(&det_schur))),
        witness_residual: None,
        exact: true,
    })
}

/// Smallest right singular vector of `m` and its residual `||m w||`.
pub(crate) fn smallest_singular_vector(m: &FloatMatrix) -> Result<(Vec<f64>, f64)> {
    let gram = m.transpose().try_mul(m)?;
    let eig = jacobi_eigen(&gram)?;
    let w = eig.vectors.column(0);
    let image = m.apply(&w)?;
    let residual = image.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok((w, residual))
}

fn invertibility_float(a: &FloatElement, b: &FloatElement) -> Result<InvertibilityVerdict> {
    let (sum, s) = block_decomposition(a, b)?;
    let alpha = Element::pair(a, b)?;
    let l = left_matrix(&alpha);
    let scale = alpha.norm_sq().max(f64::MIN_POSITIVE);
    let singular_tol = WITNESS_RESIDUAL_TOL * scale;

    let kernel_or_full = |l: &FloatMatrix| -> Result<InvertibilityVerdict> {
        let (w, residual) = smallest_singular_vector(l)?;
        let rel = residual / alpha.norm();
        if rel <= WITNESS_RESIDUAL_TOL {
            return Ok(InvertibilityVerdict {
                invertible: false,
                reason: InvertibilityReason::KernelVectorFound,
                witness: Some(Element::from_coords(alpha.level(), w)?.into()),
                det_log_abs: None,
                witness_residual: Some(rel),
                exact: false,
            });
        }
        let gram = l.transpose().try_mul(l)?;
        let det_log = 0.5 * jacobi_eigen(&gram)?.values.iter().map(|v| v.abs().ln()).sum::<f64>();
        Ok(InvertibilityVerdict {
            invertible: true,
            reason: InvertibilityReason::DetNonzero,
            witness: None,
            det_log_abs: Some(det_log),
            witness_residual: None,
            exact: false,
        })
    };

    let eig_a = jacobi_eigen(&sum)?;
    let min_a = eig_a.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min_a <= singular_tol {
        return kernel_or_full(&l);
    }
    let n = sum.rows();
    let inv = FloatMatrix::from_fn(n, n, |i, j| {
        (0..n).map(|k| eig_a.vectors.get(i, k) * eig_a.vectors.get(j, k) / eig_a.values[k]).sum()
    });
    let schur = sum.try_add(&s.try_mul(&inv)?.try_mul(&s)?)?;
    let schur = FloatMatrix::from_fn(n, n, |i, j| 0.5 * (schur.get(i, j) + schur.get(j, i)));
    let eig_m = jacobi_eigen(&schur)?;
    let min_m = eig_m.values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if min_m <= singular_tol {
        let verdict = kernel_or_full(&l)?;
        if verdict.invertible {
            return Err(CdError::Numerical("Schur complement singular but no kernel witness within tolerance".into()));
        }
        return Ok(verdict);
    }
    let det_log = 0.5
        * (eig_a.values.iter().map(|v| v.abs().ln()).sum::<f64>()
            + eig_m.values.iter().map(|v| v.abs().ln()).sum::<f64>());
    Ok(InvertibilityVerdict {
        invertible: true,
        reason: InvertibilityReason::SchurCriterion,
        witness: None,
        det_log_abs: Some(det_log),
        witness_residual: None,
        exact: false,
    })
}

/// Evaluates `det(-A) >= det(-L_a^2) + det(-R_b^2)` exactly; returns the
/// three determinants alongside the verdict.
pub fn determinant_inequality(a: &CdElement, b: &CdElement) -> Result<(bool, [Rational; 3])> {
    let (sum, _) = block_decomposition(a, b)?;
    let la2 = square(&left_matrix(a));
    let rb2 = square(&right_matrix(b));
    let d_sum = linalg::determinant(&sum.neg())?;
    let d_l = linalg::determinant(&la2.neg())?;
    let d_r = linalg::determinant(&rb2.neg())?;
    let holds = !(d_sum.clone() - (&d_l + &d_r)).is_negative();
    Ok((holds, [d_sum, d_l, d_r]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse_element;
    use crate::scalar::rat;

    fn p(level: u32, s: &str) -> CdElement {
        parse_element(level, s).unwrap()
    }

    #[test]
    fn right_matrix_of_symplectic_unit() {
        for level in 1..=4 {
            let r = right_matrix(&CdElement::symplectic_unit(level).unwrap());
            let h = 1usize << (level - 1);
            let z = RatMatrix::zeros(h, h);
            let i = RatMatrix::identity(h);
            assert_eq!(r.matrix, Matrix::block2(&z, &i.neg(), &i, &z).unwrap());
        }
    }

    #[test]
    fn left_matrix_of_unit_is_identity() {
        assert_eq!(left_matrix(&CdElement::one(4)).matrix, RatMatrix::identity(16));
    }

    #[test]
    fn left_matrix_kills_zero_divisor_partner() {
        let l = left_matrix(&p(4, "e1 + e10"));
        assert!(l.apply_element(&p(4, "-e4 + e15")).unwrap().is_zero());
    }

    #[test]
    fn transpose_is_conjugate_operator() {
        let a = p(4, "1/2 e0 + e3 - 2e9 + 3e14");
        assert_eq!(left_matrix(&a).transpose(), left_matrix(&a.conjugate()).matrix);
        assert_eq!(right_matrix(&a).transpose(), right_matrix(&a.conjugate()).matrix);
        assert!(left_matrix(&a.pure_part()).is_skew_symmetric());
    }

    #[test]
    fn associator_operator_examples() {
        let e1 = p(3, "e1");
        assert!(assoc_operator(&e1, &e1).unwrap().is_zero());
        let s = assoc_operator(&e1, &p(3, "e2")).unwrap();
        assert_eq!(s.apply_element(&p(3, "e4")).unwrap(), p(3, "-2e7"));
        assert!(s.is_skew_symmetric());
        assert!(assoc_operator(&p(3, "e0 + e1"), &e1).is_err());
    }

    #[test]
    fn block_form_for_basis_pair() {
        let (a, b) = (p(3, "e1"), p(3, "e2"));
        let (sum, s) = block_decomposition(&a, &b).unwrap();
        assert_eq!(sum.matrix, RatMatrix::identity(8).scale(&rat(-2, 1)));
        let assembled = assemble_blocks(&sum, &s).unwrap();
        assert_eq!(assembled, left_squared(&p(4, "e1 + e10")).matrix);
    }

    #[test]
    fn block_form_with_repeated_argument() {
        let a = p(3, "e1 + e2");
        assert!(block_identity_holds(&a, &a).unwrap());
        // (ax)a = a(xa) by flexibility, so S vanishes here.
        let (_, s) = block_decomposition(&a, &a).unwrap();
        assert!(s.is_zero());
    }

    #[test]
    fn l_squared_r_squared() {
        assert!(l_squared_equals_r_squared(&p(3, "e3")).unwrap());
        assert!(l_squared_equals_r_squared(&p(4, "e1 + e10")).unwrap());
        assert!(l_squared_equals_r_squared(&p(4, "e1 + e8 - 2e13")).unwrap());
        assert!(matches!(l_squared_equals_r_squared(&p(3, "e0 + e1")), Err(CdError::NotPure(_))));
    }

    #[test]
    fn anticommutation_examples() {
        assert!(anticommutation_check(&p(3, "e1")).unwrap().all());
        assert!(anticommutation_check(&p(4, "e1 + 3e10")).unwrap().all());
        assert!(anticommutation_check(&p(4, "e8")).is_err());
    }

    #[test]
    fn invertibility_examples() {
        let v = invertibility_test(&p(3, "e1"), &p(3, "e2"), 4).unwrap();
        assert!(!v.invertible);
        assert_eq!(v.reason, InvertibilityReason::KernelVectorFound);
        let w = v.witness.unwrap();
        assert!(multiply(&p(4, "e1 + e10"), w.as_exact().unwrap()).unwrap().is_zero());

        let v = invertibility_test(&p(3, "e1"), &p(3, "e1"), 4).unwrap();
        assert!(v.invertible);
        assert_eq!(v.reason, InvertibilityReason::SchurCriterion);
        let det = linalg::determinant(&left_matrix(&p(4, "e1 + e9")).matrix).unwrap();
        assert!(!det.is_zero());
        assert!((v.det_log_abs.unwrap() - ln_abs(&det)).abs() < 1e-9);

        let v = invertibility_test(&p(3, "e1"), &p(3, "2e2"), 4).unwrap();
        assert!(v.invertible);
    }

    #[test]
    fn invertibility_float_path_agrees() {
        let v = invertibility_test(&p(3, "e1"), &p(3, "e2"), 0).unwrap();
        assert!(!v.invertible && !v.exact);
        assert!(v.witness_residual.unwrap() <= WITNESS_RESIDUAL_TOL);
        let v = invertibility_test(&p(3, "e1"), &p(3, "2e2"), 0).unwrap();
        assert!(v.invertible);
        let exact = invertibility_test(&p(3, "e1"), &p(3, "2e2"), 4).unwrap();
        assert!((v.det_log_abs.unwrap() - exact.det_log_abs.unwrap()).abs() < 1e-8);
    }

    #[test]
    fn o2_action_examples() {
        let (a, b) = (p(3, "e1"), p(3, "e2"));
        let one = rat(1, 1);
        let zero = rat(0, 1);
        assert_eq!(o2_action(&a, &b, &one, &zero, false).unwrap(), (a.clone(), b.clone()));
        let (x, y) = o2_action(&a, &b, &zero, &one, false).unwrap();
        assert_eq!((x.clone(), y.clone()), (-&b, a.clone()));
        assert!(o2_preserves_l_squared(&a, &b, &zero, &one, false).unwrap());
        assert!(o2_preserves_l_squared(&a, &b, &rat(3, 5), &rat(4, 5), false).unwrap());
        assert!(o2_preserves_l_squared(&a, &b, &rat(3, 5), &rat(4, 5), true).unwrap());
        assert!(o2_action(&a, &b, &rat(1, 2), &rat(1, 2), false).is_err());
    }

    #[test]
    fn determinant_inequality_on_basis_pair() {
        let (holds, dets) = determinant_inequality(&p(3, "e1"), &p(3, "e2 + e5")).unwrap();
        assert!(holds, "{dets:?}");
    }
}
