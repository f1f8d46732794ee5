//! Spectrum of a doubly pure element: the eigenvalues of `-L^2_(a/|a|)`
//! restricted to the orthogonal complement of `H_a`, grouped in clusters
//! whose multiplicities are multiples of four.

use serde::Serialize;

use crate::element::{multiply, quaternion_subalgebra_basis, CdElement, Element, FloatElement};
use crate::error::{CdError, Result};
use crate::linalg::{self, jacobi_eigen, orthonormal_complement};
use crate::matrix::{FloatMatrix, Matrix, RatMatrix};
use crate::operators::left_matrix;
use crate::scalar::{Rational, Scalar};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;
/// Tolerances tried in turn when the default clustering breaks the mod-4 rule.
pub const CLUSTER_TOL_SWEEP: [f64; 5] = [1e-6, 1e-7, 1e-8, 1e-9, 1e-10];
pub const NEGATIVE_CLAMP: f64 = -1e-10;
pub const BASIS_ORTHOGONALITY_TOL: f64 = 1e-12;
/// Levels up to this confirm membership of 0 and 1 with exact ranks.
pub const EXACT_MEMBERSHIP_MAX_LEVEL: u32 = 4;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cluster {
    pub lambda: f64,
    /// Raw dimension of the eigenspace.
    pub multiplicity: usize,
    /// Largest `||M v - lambda v||` over the cluster's eigenvectors.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumReport {
    pub schema_version: u32,
    pub level: u32,
    /// Ascending, each cluster value repeated `multiplicity / 4` times.
    pub lambdas: Vec<f64>,
    pub clusters: Vec<Cluster>,
    pub contains_zero: bool,
    pub contains_one: bool,
    pub tolerance: f64,
    /// Whether `contains_zero` and `contains_one` were confirmed by exact ranks.
    pub exact_membership: bool,
}

impl SpectrumReport {
    pub fn max_residual(&self) -> f64 {
        self.clusters.iter().fold(0.0, |m, c| m.max(c.residual))
    }

    /// Distinct values.
    pub fn distinct(&self) -> Vec<f64> {
        self.clusters.iter().map(|c| c.lambda).collect()
    }
}

fn require_spectral_input<S: Scalar>(a: &Element<S>, op: &'static str) -> Result<()> {
    if a.is_zero() {
        return Err(CdError::ZeroElement(op));
    }
    if !a.is_doubly_pure() {
        return Err(CdError::NotDoublyPure(op));
    }
    if a.level() < 3 {
        return Err(CdError::LevelTooLow { op, min: 3, level: a.level() });
    }
    Ok(())
}

/// `-L^2_a / |a|^2` as a floating matrix.
fn normalized_operator(a: &FloatElement) -> FloatMatrix {
    let l = left_matrix(a);
    let l2 = l.try_mul(&l).expect("square");
    l2.scale(&(-1.0 / a.norm_sq()))
}

/// The restricted operator together with the basis of `H_a^perp` it is
/// expressed in (columns of `basis`).
struct Restricted {
    full: FloatMatrix,
    basis: FloatMatrix,
    matrix: FloatMatrix,
}

fn restrict(a: &FloatElement) -> Result<Restricted> {
    let h: Vec<Vec<f64>> = quaternion_subalgebra_basis(a)?.iter().map(|e| e.to_f64().into_coords()).collect();
    let comp = orthonormal_complement(a.dim(), &h, BASIS_ORTHOGONALITY_TOL);
    if comp.len() != a.dim() - 4 {
        return Err(CdError::Numerical(format!(
            "complement of H_a has dimension {} instead of {}",
            comp.len(),
            a.dim() - 4
        )));
    }
    let basis = FloatMatrix::from_fn(a.dim(), comp.len(), |i, j| comp[j][i]);
    let full = normalized_operator(a);
    let m = basis.transpose().try_mul(&full)?.try_mul(&basis)?;
    let d = m.rows();
    let matrix = FloatMatrix::from_fn(d, d, |i, j| 0.5 * (m.get(i, j) + m.get(j, i)));
    Ok(Restricted { full, basis, matrix })
}

/// Single-linkage groups of sorted values; `None` if some group size is not
/// a multiple of four.
fn cluster_indices(values: &[f64], tol: f64) -> Option<Vec<Vec<usize>>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if v - values[*g.last().expect("nonempty")] <= tol => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    groups.iter().all(|g| g.len() % 4 == 0).then_some(groups)
}

fn residual_of(full: &FloatMatrix, v: &[f64], lambda: f64) -> Result<f64> {
    let mv = full.apply(v)?;
    Ok(mv.iter().zip(v).map(|(x, y)| (x - lambda * y).powi(2)).sum::<f64>().sqrt())
}

/// Spectrum of a nonzero doubly pure `a` of level at least 3.
pub fn spectrum<S: Scalar>(a: &Element<S>, tol: f64) -> Result<SpectrumReport> {
    spectrum_with(a, tol, EXACT_MEMBERSHIP_MAX_LEVEL)
}

pub fn spectrum_with<S: Scalar>(a: &Element<S>, tol: f64, exact_max_level: u32) -> Result<SpectrumReport> {
    require_spectral_input(a, "spectrum")?;
    if !(tol > 0.0) {
        return Err(CdError::Precondition("clustering tolerance must be positive".into()));
    }
    let af = a.to_f64();
    let r = restrict(&af)?;
    let eig = jacobi_eigen(&r.matrix)?;
    let mut values = eig.values.clone();
    for v in values.iter_mut() {
        if *v < NEGATIVE_CLAMP {
            return Err(CdError::Numerical(format!("negative eigenvalue {v:e} of -L^2")));
        }
        *v = v.max(0.0);
    }

    let mut used_tol = tol;
    let groups = match cluster_indices(&values, tol) {
        Some(g) => g,
        None => {
            let found = CLUSTER_TOL_SWEEP.iter().find_map(|&t| cluster_indices(&values, t).map(|g| (t, g)));
            let (t, g) = found.ok_or_else(|| {
                CdError::Numerical(format!("no clustering tolerance gives multiplicities divisible by 4: {values:?}"))
            })?;
            log::warn!("clustering tolerance {tol:e} broke the mod-4 rule; used {t:e}");
            used_tol = t;
            g
        }
    };

    let mut clusters = Vec::with_capacity(groups.len());
    let mut lambdas = Vec::new();
    for g in &groups {
        let lambda = g.iter().map(|&i| values[i]).sum::<f64>() / g.len() as f64;
        let mut residual: f64 = 0.0;
        for &i in g {
            let v = r.basis.apply(&eig.vectors.column(i))?;
            residual = residual.max(residual_of(&r.full, &v, lambda)?);
        }
        lambdas.extend(std::iter::repeat(lambda).take(g.len() / 4));
        clusters.push(Cluster { lambda, multiplicity: g.len(), residual });
    }

    let near = |target: f64| clusters.iter().any(|c| (c.lambda - target).abs() <= used_tol.max(1e-8));
    let mut contains_zero = near(0.0);
    let mut contains_one = near(1.0);
    let mut exact_membership = false;
    if a.level() <= exact_max_level {
        if let Some(ea) = a.to_exact() {
            let (zero, one) = exact_membership_check(&ea);
            if zero != contains_zero || one != contains_one {
                log::warn!(
                    "exact membership (0: {zero}, 1: {one}) overrides floating estimate \
                     (0: {contains_zero}, 1: {contains_one})"
                );
            }
            contains_zero = zero;
            contains_one = one;
            exact_membership = true;
        }
    }

    Ok(SpectrumReport {
        schema_version: SCHEMA_VERSION,
        level: a.level(),
        lambdas,
        clusters,
        contains_zero,
        contains_one,
        tolerance: used_tol,
        exact_membership,
    })
}

fn l_squared_plus(a: &CdElement, sigma: &Rational) -> RatMatrix {
    let l = left_matrix(a);
    let l2 = l.try_mul(&l).expect("square");
    let shift = RatMatrix::identity(a.dim()).scale(&(sigma * a.norm_sq()));
    l2.try_add(&shift).expect("same shape")
}

/// Exact answers to `0 in Spec(a)` and `1 in Spec(a)`.
///
/// `Ker L^2_a` misses `H_a` entirely while `Ker(L^2_a + |a|^2 I)` contains
/// it, hence the offset of four.
pub fn exact_membership_check(a: &CdElement) -> (bool, bool) {
    let n = a.dim();
    let zero = linalg::rank(&left_matrix(a)) < n;
    let one = n - linalg::rank(&l_squared_plus(a, &Rational::from_integer(1.into()))) > 4;
    (zero, one)
}

/// Projects `x` onto `H_a^perp`. `H_a` has the orthogonal basis
/// `e_0, ã, a, e~0`, of squared norms `1, |a|^2, |a|^2, 1`, so the
/// projection is exact over the rationals.
pub fn project_off_h<S: Scalar>(a: &Element<S>, x: &Element<S>) -> Result<Element<S>> {
    let mut out = x.clone();
    for v in [Element::one(a.level()), Element::symplectic_unit(a.level())?, a.clone(), a.tilde()?] {
        let c = x.inner(&v)?.div(&v.norm_sq());
        out = out.try_sub(&v.scale(&c))?;
    }
    Ok(out)
}

/// Exact basis of `V_sigma = {x in H_a^perp : a(ax) = -sigma |a|^2 x}`.
pub fn exact_eigenspace(a: &CdElement, sigma: &Rational) -> Result<Vec<CdElement>> {
    require_spectral_input(a, "exact eigenspace")?;
    let kernel = linalg::nullspace(&l_squared_plus(a, sigma));
    let projected = kernel
        .into_iter()
        .map(|v| project_off_h(a, &Element::from_coords(a.level(), v)?))
        .collect::<Result<Vec<_>>>()?;
    let coords: Vec<Vec<Rational>> = projected.iter().map(|e| e.coords().to_vec()).collect();
    Ok(linalg::independent_subset(&coords).into_iter().map(|i| projected[i].clone()).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenspaceBasis {
    pub lambda: f64,
    /// Orthonormal.
    pub vectors: Vec<FloatElement>,
    pub residual: f64,
    /// Largest normalized inner product inside any quadruple
    /// `x, ax, tilde(ax), tilde(x)`; only meaningful when `lambda > 0`.
    pub quadruple_defect: f64,
    /// Set when `lambda` is not a cluster of the spectrum.
    pub diagnostic: Option<String>,
}

/// Orthonormal basis of `V_lambda`; an empty basis with a diagnostic when
/// `lambda` is not in the spectrum.
pub fn eigenspace<S: Scalar>(a: &Element<S>, lambda: f64, tol: f64) -> Result<EigenspaceBasis> {
    require_spectral_input(a, "eigenspace")?;
    let af = a.to_f64();
    let r = restrict(&af)?;
    let eig = jacobi_eigen(&r.matrix)?;
    let picked: Vec<usize> = (0..eig.values.len()).filter(|&i| (eig.values[i] - lambda).abs() <= tol).collect();
    if picked.is_empty() {
        return Ok(EigenspaceBasis {
            lambda,
            vectors: Vec::new(),
            residual: 0.0,
            quadruple_defect: 0.0,
            diagnostic: Some(format!("{lambda} is not within {tol:e} of any eigenvalue")),
        });
    }
    if picked.len() % 4 != 0 {
        return Err(CdError::Numerical(format!(
            "eigenspace for {lambda} has dimension {} (not divisible by 4)",
            picked.len()
        )));
    }
    let mut vectors = Vec::with_capacity(picked.len());
    let mut residual: f64 = 0.0;
    let mut quadruple_defect: f64 = 0.0;
    for &i in &picked {
        let v = r.basis.apply(&eig.vectors.column(i))?;
        residual = residual.max(residual_of(&r.full, &v, lambda)?);
        let x = Element::from_coords(a.level(), v)?;
        if lambda > tol {
            quadruple_defect = quadruple_defect.max(quadruple_orthogonality_defect(&af, &x)?);
        }
        vectors.push(x);
    }
    Ok(EigenspaceBasis { lambda, vectors, residual, quadruple_defect, diagnostic: None })
}

/// Largest `|<u, v>| / (|u||v|)` over distinct members of
/// `{x, ax, tilde(ax), tilde(x)}`.
pub fn quadruple_orthogonality_defect(a: &FloatElement, x: &FloatElement) -> Result<f64> {
    let ax = multiply(a, x)?;
    let quad = [x.clone(), ax.tilde()?, ax, x.tilde()?];
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            let denom = quad[i].norm() * quad[j].norm();
            if denom > 0.0 {
                worst = worst.max(quad[i].inner(&quad[j])?.abs() / denom);
            }
        }
    }
    Ok(worst)
}

/// `L_a^2 = a^2 I`, i.e. `a(ax) = a^2 x` for every `x`.
pub fn is_alternative<S: Scalar>(a: &Element<S>) -> Result<bool> {
    require_pure_nonzero(a, "alternativity")?;
    let l = left_matrix(a);
    let target = Matrix::identity(a.dim()).scale(&a.norm_sq().neg());
    Ok(matrix_matches(&l.try_mul(&l)?, &target))
}

/// `|ax| = |a||x|` for every `x`, i.e. `L_a^T L_a = |a|^2 I`.
pub fn is_normed<S: Scalar>(a: &Element<S>) -> Result<bool> {
    require_pure_nonzero(a, "normedness")?;
    let l = left_matrix(a);
    let target = Matrix::identity(a.dim()).scale(&a.norm_sq());
    Ok(matrix_matches(&l.transpose().try_mul(&l)?, &target))
}

fn matrix_matches<S: Scalar>(m: &Matrix<S>, target: &Matrix<S>) -> bool {
    if S::EXACT {
        m == target
    } else {
        let t = target.to_f64();
        m.to_f64().max_abs_diff(&t) <= 1e-10 * t.max_abs().max(1.0)
    }
}

fn require_pure_nonzero<S: Scalar>(a: &Element<S>, op: &'static str) -> Result<()> {
    if !a.is_pure() {
        return Err(CdError::NotPure(op));
    }
    if a.is_zero() {
        return Err(CdError::ZeroElement(op));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalNorm {
    /// `|ax| / (|a||x|)`.
    pub ratio: f64,
    pub normed_with: bool,
}

pub fn local_norm_check<S: Scalar>(a: &Element<S>, x: &Element<S>, tol: f64) -> Result<LocalNorm> {
    if a.is_zero() || x.is_zero() {
        return Err(CdError::ZeroElement("local norm check"));
    }
    let (af, xf) = (a.to_f64(), x.to_f64());
    let ratio = multiply(&af, &xf)?.norm() / (af.norm() * xf.norm());
    Ok(LocalNorm { ratio, normed_with: (ratio - 1.0).abs() <= tol })
}

/// `dim Ker(a^2 I - L_a^2)` for a nonzero element, computed on its pure part.
/// Exact for rational input up to `exact_max_level`.
pub fn kernel_dimension_bound_check<S: Scalar>(a: &Element<S>, exact_max_level: u32) -> Result<usize> {
    if a.level() < 3 {
        return Err(CdError::LevelTooLow { op: "kernel dimension bound", min: 3, level: a.level() });
    }
    let v = a.pure_part();
    if v.is_zero() {
        // A real multiple of the unit: L_a^2 = a^2 I everywhere.
        return Ok(a.dim());
    }
    let dim = match v.to_exact() {
        Some(ev) if a.level() <= exact_max_level => {
            a.dim() - linalg::rank(&l_squared_plus(&ev, &Rational::from_integer(1.into())))
        }
        _ => {
            let vf = v.to_f64();
            let m = normalized_operator(&vf);
            let sym = FloatMatrix::from_fn(m.rows(), m.cols(), |i, j| 0.5 * (m.get(i, j) + m.get(j, i)));
            let eig = jacobi_eigen(&sym)?;
            eig.values.iter().filter(|s| (*s - 1.0).abs() <= 1e-8).count()
        }
    };
    if dim < 8 {
        log::error!("dim Ker(a^2 I - L_a^2) = {dim} is below 8 for {}", v.to_f64());
    }
    Ok(dim)
}

/// For a Stiefel pair of alternative `a, b` and `(x, y)` annihilating
/// `(a, b)`, checks that `(y, x)` satisfies `-L^2_(a,b) (y,x) = 2|(a,b)|^2 (y,x)`.
pub fn mirror_symmetry_check(a: &CdElement, b: &CdElement, x: &CdElement, y: &CdElement) -> Result<bool> {
    let alpha = Element::pair(a, b)?;
    let chi = Element::pair(x, y)?;
    if chi.is_zero() || !multiply(&alpha, &chi)?.is_zero() {
        return Err(CdError::Precondition("(x, y) must be a nonzero annihilator of (a, b)".into()));
    }
    let mirrored = Element::pair(y, x)?;
    let lhs = -&multiply(&alpha, &multiply(&alpha, &mirrored)?)?;
    let two = Rational::from_integer(2.into());
    Ok(lhs == mirrored.scale(&(two * alpha.norm_sq())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::parse_element;
    use crate::scalar::rat;

    fn p(level: u32, s: &str) -> CdElement {
        parse_element(level, s).unwrap()
    }

    fn approx(values: &[f64], want: &[f64]) -> bool {
        values.len() == want.len() && values.iter().zip(want).all(|(x, y)| (x - y).abs() < 1e-9)
    }

    #[test]
    fn spectrum_of_the_worked_example() {
        let r = spectrum(&p(4, "e1 + e10"), DEFAULT_CLUSTER_TOL).unwrap();
        assert!(approx(&r.lambdas, &[0.0, 1.0, 2.0]), "{:?}", r.lambdas);
        assert!(r.contains_zero && r.contains_one && r.exact_membership);
        assert!(r.max_residual() <= 1e-10);
        assert_eq!(r.clusters.iter().map(|c| c.multiplicity).collect::<Vec<_>>(), vec![4, 4, 4]);
    }

    #[test]
    fn spectrum_of_basis_elements() {
        let r = spectrum(&p(3, "e1"), DEFAULT_CLUSTER_TOL).unwrap();
        assert!(approx(&r.lambdas, &[1.0]));
        for i in (1..16).filter(|&i| i != 8) {
            let r = spectrum(&CdElement::basis(4, i).unwrap(), DEFAULT_CLUSTER_TOL).unwrap();
            assert!(approx(&r.lambdas, &[1.0, 1.0, 1.0]), "e{i}: {:?}", r.lambdas);
            assert!(!r.contains_zero);
        }
    }

    #[test]
    fn spectrum_rejects() {
        assert!(matches!(spectrum(&p(4, "e8"), 1e-8), Err(CdError::NotDoublyPure(_))));
        assert!(matches!(spectrum(&CdElement::zero(4), 1e-8), Err(CdError::ZeroElement(_))));
        assert!(matches!(spectrum(&p(2, "e1"), 1e-8), Err(CdError::LevelTooLow { .. })));
    }

    #[test]
    fn clustering_respects_mod_four() {
        assert!(cluster_indices(&[0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0], 1e-8).is_some());
        assert!(cluster_indices(&[0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 1.0], 1e-8).is_none());
        let noisy = [1.0, 1.0 + 5e-9, 1.0 + 1e-8, 1.0 + 1.4e-8];
        assert!(cluster_indices(&noisy, 1e-9).is_none());
        assert!(cluster_indices(&noisy, 1e-8).is_some());
    }

    #[test]
    fn eigenspaces_of_the_worked_example() {
        let a = p(4, "e1 + e10");
        let v0 = eigenspace(&a, 0.0, 1e-8).unwrap();
        assert_eq!(v0.vectors.len(), 4);
        let w = p(4, "-e4 + e15").to_f64();
        let proj: f64 = v0.vectors.iter().map(|v| v.inner(&w).unwrap().powi(2)).sum();
        assert!((proj - w.norm_sq()).abs() < 1e-9);

        let v2 = eigenspace(&a, 2.0, 1e-8).unwrap();
        assert_eq!(v2.vectors.len(), 4);
        assert!(v2.quadruple_defect < 1e-9);
        let w = p(4, "e7 - e12").to_f64();
        let proj: f64 = v2.vectors.iter().map(|v| v.inner(&w).unwrap().powi(2)).sum();
        assert!((proj - w.norm_sq()).abs() < 1e-9);

        let missing = eigenspace(&a, 3.0, 1e-8).unwrap();
        assert!(missing.vectors.is_empty() && missing.diagnostic.is_some());
    }

    #[test]
    fn eigenspace_of_basis_element_is_whole_complement() {
        let v = eigenspace(&p(3, "e1"), 1.0, 1e-8).unwrap();
        assert_eq!(v.vectors.len(), 4);
    }

    #[test]
    fn exact_eigenspaces() {
        let a = p(4, "e1 + e10");
        let v0 = exact_eigenspace(&a, &rat(0, 1)).unwrap();
        assert_eq!(v0.len(), 4);
        let v1 = exact_eigenspace(&a, &rat(1, 1)).unwrap();
        assert_eq!(v1.len(), 4);
        for x in &v1 {
            assert!(project_off_h(&a, x).unwrap() == *x);
        }
        let v2 = exact_eigenspace(&a, &rat(2, 1)).unwrap();
        assert_eq!(v2.len(), 4);
        let target = p(4, "e7 - e12");
        let ax = multiply(&a, &multiply(&a, &target).unwrap()).unwrap();
        assert_eq!(ax, target.scale(&rat(-4, 1)));
    }

    #[test]
    fn alternative_and_normed() {
        let e5 = p(4, "e5");
        assert!(is_alternative(&e5).unwrap() && is_normed(&e5).unwrap());
        let a = p(4, "e1 + e10");
        assert!(!is_alternative(&a).unwrap() && !is_normed(&a).unwrap());
        assert!(is_alternative(&a.to_f64()).unwrap() == is_normed(&a.to_f64()).unwrap());
    }

    #[test]
    fn normed_with_but_not_alternating_with() {
        let a = p(4, "e1 + e10");
        let eps = p(4, "e4");
        assert!(local_norm_check(&a, &eps, 1e-12).unwrap().ratio > 0.0);
        let r = multiply(&a, &eps).unwrap().norm_sq();
        assert_eq!(r, a.norm_sq() * eps.norm_sq());
        let assoc = crate::element::associator(&a, &a, &eps).unwrap();
        assert_eq!(assoc, p(4, "2e15"));
    }

    #[test]
    fn local_norm_ratios() {
        let a = p(4, "e1 + e10");
        assert!(local_norm_check(&a, &p(4, "-e4 + e15"), 1e-12).unwrap().ratio.abs() < 1e-12);
        let r = local_norm_check(&a, &p(4, "e7 - e12"), 1e-12).unwrap().ratio;
        assert!((r * r - 2.0).abs() < 1e-12);
        assert!(local_norm_check(&p(4, "e1"), &p(4, "e2"), 1e-12).unwrap().normed_with);
    }

    #[test]
    fn kernel_dimension_examples() {
        assert_eq!(kernel_dimension_bound_check(&p(3, "e1"), 4).unwrap(), 8);
        assert_eq!(kernel_dimension_bound_check(&p(4, "e1 + e10"), 4).unwrap(), 8);
        assert_eq!(kernel_dimension_bound_check(&p(4, "e1 + e10"), 0).unwrap(), 8);
        assert!(kernel_dimension_bound_check(&p(4, "e1 + e8 + e10"), 4).unwrap() >= 8);
    }

    #[test]
    fn mirror_symmetry_on_worked_example() {
        let (a, b) = (p(3, "e1"), p(3, "e2"));
        let (x, y) = (p(3, "-e4"), p(3, "e7"));
        assert!(mirror_symmetry_check(&a, &b, &x, &y).unwrap());
    }
}
