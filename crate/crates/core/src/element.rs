//! Elements of the Cayley-Dickson algebras `A_n = R^(2^n)`.
//!
//! Basis convention: for `n >= 1`, `e_i` with `i < 2^(n-1)` is `(e_i, 0)` and
//! `e_(2^(n-1) + i)` is `(0, e_i)` in `A_(n-1) x A_(n-1)`. The element
//! `e_(2^(n-1)) = (0, e_0)` is the symplectic unit. The product is
//!
//! ```text
//! (a, b)(x, y) = (a x - conj(y) b,  y a + b conj(x))
//! ```
//!
//! applied recursively down to real multiplication in `A_0`.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{CdError, Result};
use crate::scalar::{Rational, Scalar};

/// Level cap for matrix-producing operations before a cost warning.
pub const DEFAULT_MAX_LEVEL: u32 = 10;

#[derive(Clone, Debug, PartialEq)]
pub struct Element<S> {
    level: u32,
    coords: Vec<S>,
}

/// Exact element with rational coordinates.
pub type CdElement = Element<Rational>;
/// Floating element, used where normalization makes coordinates irrational.
pub type FloatElement = Element<f64>;

/// Returned by [`Element::purity_class`].
#[derive(Clone, Debug, PartialEq)]
pub enum PurityClass<S> {
    /// A multiple of `e_0` (including zero).
    Real,
    /// Orthogonal to `e_0` and to the symplectic unit.
    DoublyPure,
    /// Pure but with a nonzero symplectic coordinate.
    Pure(PureSplit<S>),
    /// Nonzero real part together with a nonzero imaginary part.
    Mixed,
}

/// `a = c + t * e~0` with `c` doubly pure and `t != 0`.
///
/// In normalized form `a = r * (c * |a| / |c|) + s * e~0` with
/// `r = |c| / |a|` and `s = t / |a|`, so `r^2 + s^2 = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct PureSplit<S> {
    pub doubly_pure: Element<S>,
    pub symplectic: S,
    pub r: f64,
    pub s: f64,
}

impl<S: Scalar> Element<S> {
    pub fn zero(level: u32) -> Self {
        Self { level, coords: vec![S::zero(); 1usize << level] }
    }

    /// The unit `e_0`.
    pub fn one(level: u32) -> Self {
        let mut e = Self::zero(level);
        e.coords[0] = S::one();
        e
    }

    pub fn basis(level: u32, index: usize) -> Result<Self> {
        let mut e = Self::zero(level);
        if index >= e.coords.len() {
            return Err(CdError::IndexOutOfRange { index, level });
        }
        e.coords[index] = S::one();
        Ok(e)
    }

    /// The symplectic unit `e~0 = e_(2^(n-1))`.
    pub fn symplectic_unit(level: u32) -> Result<Self> {
        if level == 0 {
            return Err(CdError::LevelTooLow { op: "symplectic unit", min: 1, level });
        }
        Self::basis(level, 1usize << (level - 1))
    }

    pub fn from_coords(level: u32, coords: Vec<S>) -> Result<Self> {
        if coords.len() != 1usize << level {
            return Err(CdError::Precondition(format!(
                "level {level} needs {} coordinates, got {}",
                1usize << level,
                coords.len()
            )));
        }
        Ok(Self { level, coords })
    }

    /// Builds an element from a coordinate vector whose length is a power of two.
    pub fn from_vec(coords: Vec<S>) -> Result<Self> {
        let len = coords.len();
        if !len.is_power_of_two() {
            return Err(CdError::Precondition(format!("coordinate count {len} is not a power of two")));
        }
        Ok(Self { level: len.trailing_zeros(), coords })
    }

    /// Sparse constructor: `terms` lists `(index, coefficient)` pairs.
    pub fn from_terms(level: u32, terms: &[(usize, S)]) -> Result<Self> {
        let mut e = Self::zero(level);
        for (i, c) in terms {
            let slot = e.coords.get_mut(*i).ok_or(CdError::IndexOutOfRange { index: *i, level })?;
            *slot = slot.add(c);
        }
        Ok(e)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<S> {
        self.coords
    }

    pub fn coord(&self, i: usize) -> &S {
        &self.coords[i]
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(S::is_zero)
    }

    fn check_level(&self, other: &Self) -> Result<()> {
        if self.level != other.level {
            return Err(CdError::LevelMismatch { left: self.level, right: other.level });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(self.zip_with(other, S::add))
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.check_level(other)?;
        Ok(self.zip_with(other, S::sub))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        Self { level: self.level, coords: self.coords.iter().zip(&other.coords).map(|(a, b)| f(a, b)).collect() }
    }

    pub fn scale(&self, k: &S) -> Self {
        Self { level: self.level, coords: self.coords.iter().map(|c| c.mul(k)).collect() }
    }

    pub fn conjugate(&self) -> Self {
        let mut coords: Vec<S> = self.coords.iter().map(S::neg).collect();
        coords[0] = self.coords[0].clone();
        Self { level: self.level, coords }
    }

    /// Splits `a = (a_1, a_2)` into its two halves in `A_(n-1)`.
    pub fn halves(&self) -> Result<(Self, Self)> {
        if self.level == 0 {
            return Err(CdError::LevelTooLow { op: "halves", min: 1, level: 0 });
        }
        let h = self.dim() / 2;
        Ok((
            Self { level: self.level - 1, coords: self.coords[..h].to_vec() },
            Self { level: self.level - 1, coords: self.coords[h..].to_vec() },
        ))
    }

    /// The pair `(a, b)` as an element of the next level.
    pub fn pair(a: &Self, b: &Self) -> Result<Self> {
        a.check_level(b)?;
        let mut coords = a.coords.clone();
        coords.extend(b.coords.iter().cloned());
        Ok(Self { level: a.level + 1, coords })
    }

    /// `ã = (-a_2, a_1)`, equal to `a * e~0`.
    pub fn tilde(&self) -> Result<Self> {
        if self.level == 0 {
            return Err(CdError::LevelTooLow { op: "tilde", min: 1, level: 0 });
        }
        let h = self.dim() / 2;
        let mut coords = Vec::with_capacity(self.dim());
        coords.extend(self.coords[h..].iter().map(S::neg));
        coords.extend(self.coords[..h].iter().cloned());
        Ok(Self { level: self.level, coords })
    }

    /// `â = (a_2, a_1)`.
    pub fn hat(&self) -> Result<Self> {
        if self.level == 0 {
            return Err(CdError::LevelTooLow { op: "hat", min: 1, level: 0 });
        }
        let h = self.dim() / 2;
        let mut coords = self.coords[h..].to_vec();
        coords.extend(self.coords[..h].iter().cloned());
        Ok(Self { level: self.level, coords })
    }

    /// Scalar trace `a + conj(a) = 2 * coords[0]`.
    pub fn trace(&self) -> S {
        self.coords[0].add(&self.coords[0])
    }

    /// Euclidean inner product of coordinate vectors.
    pub fn inner(&self, other: &Self) -> Result<S> {
        self.check_level(other)?;
        Ok(dot(&self.coords, &other.coords))
    }

    pub fn norm_sq(&self) -> S {
        dot(&self.coords, &self.coords)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().to_f64().sqrt()
    }

    fn half_index(&self) -> Option<usize> {
        (self.level > 0).then(|| self.dim() / 2)
    }

    pub fn is_real(&self) -> bool {
        self.coords[1..].iter().all(S::is_zero)
    }

    pub fn is_pure(&self) -> bool {
        self.coords[0].is_zero()
    }

    pub fn is_doubly_pure(&self) -> bool {
        self.is_pure() && self.half_index().is_some_and(|h| self.coords[h].is_zero())
    }

    /// Copy with the `e_0` and `e~0` coordinates removed.
    pub fn doubly_pure_part(&self) -> Self {
        let mut c = self.clone();
        c.coords[0] = S::zero();
        if let Some(h) = self.half_index() {
            c.coords[h] = S::zero();
        }
        c
    }

    /// Copy with the `e_0` coordinate removed.
    pub fn pure_part(&self) -> Self {
        let mut c = self.clone();
        c.coords[0] = S::zero();
        c
    }

    pub fn purity_class(&self) -> PurityClass<S> {
        if self.is_real() {
            return PurityClass::Real;
        }
        if !self.is_pure() {
            return PurityClass::Mixed;
        }
        if self.is_doubly_pure() {
            return PurityClass::DoublyPure;
        }
        let h = self.dim() / 2;
        let doubly_pure = self.doubly_pure_part();
        let norm = self.norm();
        PurityClass::Pure(PureSplit {
            r: doubly_pure.norm() / norm,
            s: self.coords[h].to_f64() / norm,
            symplectic: self.coords[h].clone(),
            doubly_pure,
        })
    }

    /// Rational copy, available when `S` is exact.
    pub fn to_exact(&self) -> Option<CdElement> {
        let coords = self.coords.iter().map(S::to_rational).collect::<Option<Vec<_>>>()?;
        Some(Element { level: self.level, coords })
    }

    pub fn to_f64(&self) -> FloatElement {
        Element { level: self.level, coords: self.coords.iter().map(S::to_f64).collect() }
    }

    /// Index of each nonzero coordinate.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coords.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(i, _)| i)
    }
}

impl FloatElement {
    pub fn normalized(&self) -> Self {
        let n = self.norm();
        self.scale(&(1.0 / n))
    }

    pub fn max_abs(&self) -> f64 {
        self.coords.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.level == other.level && self.coords.iter().zip(&other.coords).all(|(a, b)| (a - b).abs() <= tol)
    }
}

pub(crate) fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc.add(&x.mul(y)))
}

/// Cayley-Dickson product. Fails when the levels differ.
pub fn multiply<S: Scalar>(a: &Element<S>, b: &Element<S>) -> Result<Element<S>> {
    a.check_level(b)?;
    Ok(Element { level: a.level, coords: cd_mul(&a.coords, &b.coords) })
}

fn conj_slice<S: Scalar>(x: &[S]) -> Vec<S> {
    let mut out: Vec<S> = x.iter().map(S::neg).collect();
    out[0] = x[0].clone();
    out
}

fn cd_mul<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    let n = a.len();
    if n == 1 {
        return vec![a[0].mul(&b[0])];
    }
    if a.iter().all(S::is_zero) || b.iter().all(S::is_zero) {
        return vec![S::zero(); n];
    }
    let h = n / 2;
    let (a1, a2) = a.split_at(h);
    let (x, y) = b.split_at(h);
    // (a1, a2)(x, y) = (a1 x - conj(y) a2, y a1 + a2 conj(x))
    let first_l = cd_mul(a1, x);
    let first_r = cd_mul(&conj_slice(y), a2);
    let second_l = cd_mul(y, a1);
    let second_r = cd_mul(a2, &conj_slice(x));
    let mut out = Vec::with_capacity(n);
    out.extend(first_l.iter().zip(&first_r).map(|(p, q)| p.sub(q)));
    out.extend(second_l.iter().zip(&second_r).map(|(p, q)| p.add(q)));
    out
}

/// Associator `(x y) z - x (y z)`.
pub fn associator<S: Scalar>(x: &Element<S>, y: &Element<S>, z: &Element<S>) -> Result<Element<S>> {
    let left = multiply(&multiply(x, y)?, z)?;
    let right = multiply(x, &multiply(y, z)?)?;
    left.try_sub(&right)
}

impl<S: Scalar> Add for &Element<S> {
    type Output = Element<S>;
    fn add(self, rhs: Self) -> Element<S> {
        self.try_add(rhs).expect("adding elements of different levels")
    }
}

impl<S: Scalar> Sub for &Element<S> {
    type Output = Element<S>;
    fn sub(self, rhs: Self) -> Element<S> {
        self.try_sub(rhs).expect("subtracting elements of different levels")
    }
}

impl<S: Scalar> Mul for &Element<S> {
    type Output = Element<S>;
    fn mul(self, rhs: Self) -> Element<S> {
        multiply(self, rhs).expect("multiplying elements of different levels")
    }
}

impl<S: Scalar> Neg for &Element<S> {
    type Output = Element<S>;
    fn neg(self) -> Element<S> {
        Element { level: self.level, coords: self.coords.iter().map(S::neg).collect() }
    }
}

/// An element that is exact when possible and floating otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyElement {
    Exact(CdElement),
    Float(FloatElement),
}

impl AnyElement {
    pub fn level(&self) -> u32 {
        match self {
            AnyElement::Exact(e) => e.level(),
            AnyElement::Float(e) => e.level(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyElement::Exact(_))
    }

    pub fn to_f64(&self) -> FloatElement {
        match self {
            AnyElement::Exact(e) => e.to_f64(),
            AnyElement::Float(e) => e.clone(),
        }
    }

    pub fn as_exact(&self) -> Option<&CdElement> {
        match self {
            AnyElement::Exact(e) => Some(e),
            AnyElement::Float(_) => None,
        }
    }

    pub fn is_doubly_pure(&self, tol: f64) -> bool {
        match self {
            AnyElement::Exact(e) => e.is_doubly_pure(),
            AnyElement::Float(e) => e.level() > 0 && e.coords()[0].abs() <= tol && e.coords()[e.dim() / 2].abs() <= tol,
        }
    }
}

impl From<CdElement> for AnyElement {
    fn from(e: CdElement) -> Self {
        AnyElement::Exact(e)
    }
}

impl From<FloatElement> for AnyElement {
    fn from(e: FloatElement) -> Self {
        AnyElement::Float(e)
    }
}

/// Orthogonal basis `(e_0, ã, a, e~0)` of the quaternion subalgebra `H_a`,
/// normalized to unit length.
///
/// Multiplication follows the quaternion table with `1 <-> e_0`,
/// `i <-> ã`, `j <-> a`, `k <-> e~0`. Exact when `|a|^2` is the square of a
/// rational, floating otherwise.
pub fn quaternion_subalgebra_basis<S: Scalar>(a: &Element<S>) -> Result<[AnyElement; 4]> {
    if a.is_zero() {
        return Err(CdError::ZeroElement("quaternion subalgebra basis"));
    }
    if !a.is_doubly_pure() {
        return Err(CdError::NotDoublyPure("quaternion subalgebra basis"));
    }
    fn build<T: Scalar>(a: &Element<T>, norm: &T) -> Result<[Element<T>; 4]> {
        let unit = a.scale(&T::one().div(norm));
        Ok([Element::one(a.level()), unit.tilde()?, unit, Element::symplectic_unit(a.level())?])
    }
    match a.norm_sq().try_sqrt() {
        Some(norm) if S::EXACT => {
            let exact: Vec<CdElement> = build(a, &norm)?
                .iter()
                .map(|e| {
                    let coords = e.coords().iter().map(|c| c.to_rational().expect("exact scalar")).collect();
                    Element::from_coords(e.level(), coords)
                })
                .collect::<Result<_>>()?;
            let [b0, b1, b2, b3]: [CdElement; 4] = exact.try_into().expect("four vectors");
            Ok([b0.into(), b1.into(), b2.into(), b3.into()])
        }
        _ => {
            let f = a.to_f64();
            let [b0, b1, b2, b3] = build(&f, &f.norm())?;
            Ok([b0.into(), b1.into(), b2.into(), b3.into()])
        }
    }
}
