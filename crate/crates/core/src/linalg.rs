//! Exact elimination over the rationals and the symmetric Jacobi eigensolver.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{CdError, Result};
use crate::matrix::{FloatMatrix, RatMatrix};
use crate::scalar::Rational;

/// Integer row-echelon form produced by fraction-free (Bareiss) elimination.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    swaps: usize,
    /// Product of the per-row factors used to clear denominators.
    row_scale: BigInt,
}

fn clear_denominators(m: &RatMatrix) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut scale = BigInt::one();
    let rows = (0..m.rows())
        .map(|i| {
            let lcm = m.row(i).iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
            scale *= &lcm;
            m.row(i).iter().map(|v| v.numer() * (&lcm / v.denom())).collect()
        })
        .collect();
    (rows, scale)
}

fn bareiss(m: &RatMatrix) -> Echelon {
    let (mut a, row_scale) = clear_denominators(m);
    let (nr, nc) = (m.rows(), m.cols());
    let mut pivots = Vec::new();
    let mut swaps = 0;
    let mut prev = BigInt::one();
    let mut r = 0;
    for k in 0..nc {
        if r == nr {
            break;
        }
        let Some(p) = (r..nr).find(|&i| !a[i][k].is_zero()) else {
            continue;
        };
        if p != r {
            a.swap(p, r);
            swaps += 1;
        }
        for i in r + 1..nr {
            for j in k + 1..nc {
                let num = &a[r][k] * &a[i][j] - &a[i][k] * &a[r][j];
                let (q, rem) = num.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
            a[i][k] = BigInt::zero();
        }
        prev = a[r][k].clone();
        pivots.push(k);
        r += 1;
    }
    Echelon { rows: a, pivots, swaps, row_scale }
}

pub fn rank(m: &RatMatrix) -> usize {
    bareiss(m).pivots.len()
}

pub fn determinant(m: &RatMatrix) -> Result<Rational> {
    if !m.is_square() {
        return Err(CdError::Precondition("determinant of a non-square matrix".into()));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Rational::one());
    }
    let e = bareiss(m);
    if e.pivots.len() < n {
        return Ok(Rational::zero());
    }
    let mut det = BigRational::new(e.rows[n - 1][n - 1].clone(), e.row_scale);
    if e.swaps % 2 == 1 {
        det = -det;
    }
    Ok(det)
}

/// Basis of `{x : M x = 0}`, one rational vector per free column, each
/// scaled to primitive integer entries.
pub fn nullspace(m: &RatMatrix) -> Vec<Vec<Rational>> {
    let e = bareiss(m);
    let nc = m.cols();
    let free: Vec<usize> = (0..nc).filter(|c| !e.pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Rational::zero(); nc];
            x[f] = Rational::one();
            for (r, &pc) in e.pivots.iter().enumerate().rev() {
                let mut acc = Rational::zero();
                for j in pc + 1..nc {
                    if !e.rows[r][j].is_zero() && !x[j].is_zero() {
                        acc += BigRational::from_integer(e.rows[r][j].clone()) * &x[j];
                    }
                }
                x[pc] = -acc / BigRational::from_integer(e.rows[r][pc].clone());
            }
            primitive(x)
        })
        .collect()
}

fn primitive(x: Vec<Rational>) -> Vec<Rational> {
    let lcm = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let ints: Vec<BigInt> = x.iter().map(|v| v.numer() * (&lcm / v.denom())).collect();
    let gcd = ints.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if gcd.is_zero() {
        return x;
    }
    let first_sign = ints.iter().find(|v| !v.is_zero()).map_or(false, |v| v.is_negative());
    ints.into_iter()
        .map(|v| {
            let v = v / &gcd;
            BigRational::from_integer(if first_sign { -v } else { v })
        })
        .collect()
}

/// Inverse by Gauss-Jordan elimination; `None` when singular.
pub fn inverse(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.rows();
    if !m.is_square() {
        return None;
    }
    let mut a = m.to_rows();
    let mut inv = RatMatrix::identity(n).to_rows();
    for k in 0..n {
        let p = (k..n).find(|&i| !a[i][k].is_zero())?;
        a.swap(p, k);
        inv.swap(p, k);
        let piv = a[k][k].clone();
        for j in 0..n {
            a[k][j] = &a[k][j] / &piv;
            inv[k][j] = &inv[k][j] / &piv;
        }
        for i in 0..n {
            if i == k || a[i][k].is_zero() {
                continue;
            }
            let f = a[i][k].clone();
            for j in 0..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
                let t = &f * &inv[k][j];
                inv[i][j] -= t;
            }
        }
    }
    RatMatrix::from_rows(inv).ok()
}

/// Indices of a maximal linearly independent subset of `vectors`, in order.
pub fn independent_subset(vectors: &[Vec<Rational>]) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for (i, _) in vectors.iter().enumerate() {
        let mut trial: Vec<Vec<Rational>> = kept.iter().map(|&k| vectors[k].clone()).collect();
        trial.push(vectors[i].clone());
        let m = RatMatrix::from_rows(trial).expect("equal lengths");
        if rank(&m) == kept.len() + 1 {
            kept.push(i);
        }
    }
    kept
}

/// `true` when the two families span the same subspace.
pub fn same_span(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> bool {
    let rank_of = |vs: Vec<Vec<Rational>>| {
        if vs.is_empty() {
            0
        } else {
            rank(&RatMatrix::from_rows(vs).expect("equal lengths"))
        }
    };
    let ra = rank_of(a.to_vec());
    let rb = rank_of(b.to_vec());
    let mut both = a.to_vec();
    both.extend(b.iter().cloned());
    ra == rb && rank_of(both) == ra
}

/// Eigen-decomposition `A = V diag(values) V^T` of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `k` is the unit eigenvector for `values[k]`.
    pub vectors: FloatMatrix,
    pub sweeps: usize,
}

pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
/// `JACOBI_OFF_DIAGONAL_TOL` times the matrix scale.
pub fn jacobi_eigen(m: &FloatMatrix) -> Result<SymmetricEigen> {
    if !m.is_square() {
        return Err(CdError::Precondition("eigenproblem of a non-square matrix".into()));
    }
    let n = m.rows();
    let mut a = m.to_rows();
    let mut v = FloatMatrix::identity(n).to_rows();
    let scale = m.frobenius().max(f64::MIN_POSITIVE);
    let off = |a: &Vec<Vec<f64>>| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i][j] * a[i][j];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > JACOBI_OFF_DIAGONAL_TOL * scale {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(CdError::Numerical(format!("Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")));
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p][q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = FloatMatrix::from_fn(n, n, |i, k| v[i][order[k]]);
    Ok(SymmetricEigen { values, vectors, sweeps })
}

/// Orthonormal basis of the orthogonal complement of `against` (assumed
/// orthonormal) inside `R^n`, by modified Gram-Schmidt over the standard
/// basis with one re-orthogonalization pass.
pub fn orthonormal_complement(n: usize, against: &[Vec<f64>], tol: f64) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = against.to_vec();
    let start = basis.len();
    for j in 0..n {
        let mut v = vec![0.0; n];
        v[j] = 1.0;
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= d * y;
                }
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > tol.sqrt() {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
        if basis.len() == n {
            break;
        }
    }
    basis.split_off(start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| rat(v, 1)).collect()).collect()).unwrap()
    }

    // Cofactor expansion, independent of the elimination path.
    fn det_cofactor(a: &[Vec<Rational>]) -> Rational {
        let n = a.len();
        if n == 1 {
            return a[0][0].clone();
        }
        let mut total = Rational::zero();
        for j in 0..n {
            let minor: Vec<Vec<Rational>> = a[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()).collect())
                .collect();
            let term = &a[0][j] * det_cofactor(&minor);
            if j % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total
    }

    #[test]
    fn determinant_matches_cofactor_expansion() {
        let a = RatMatrix::from_rows(vec![
            vec![rat(1, 2), rat(2, 1), rat(0, 1), rat(-1, 3)],
            vec![rat(3, 1), rat(-1, 1), rat(4, 1), rat(1, 1)],
            vec![rat(0, 1), rat(2, 3), rat(5, 1), rat(2, 1)],
            vec![rat(1, 1), rat(0, 1), rat(-2, 1), rat(7, 5)],
        ])
        .unwrap();
        assert_eq!(determinant(&a).unwrap(), det_cofactor(&a.to_rows()));
        let p = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(determinant(&p).unwrap(), rat(-1, 1));
    }

    #[test]
    fn singular_matrix_rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        assert_eq!(determinant(&a).unwrap(), rat(0, 1));
        let ns = nullspace(&a);
        assert_eq!(ns.len(), 1);
        let image = a.apply(&ns[0]).unwrap();
        assert!(image.iter().all(Zero::is_zero));
        assert_eq!(ns[0], vec![rat(1, 1), rat(1, 1), rat(-1, 1)]);
    }

    #[test]
    fn zero_and_identity_kernels() {
        assert_eq!(nullspace(&RatMatrix::zeros(3, 3)).len(), 3);
        assert!(nullspace(&RatMatrix::identity(3)).is_empty());
    }

    #[test]
    fn inverse_round_trip() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = inverse(&a).unwrap();
        assert_eq!(a.try_mul(&inv).unwrap(), RatMatrix::identity(3));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_none());
    }

    #[test]
    fn span_comparison() {
        let a = vec![vec![rat(1, 1), rat(0, 1)], vec![rat(1, 1), rat(1, 1)]];
        let b = vec![vec![rat(0, 1), rat(2, 1)], vec![rat(3, 1), rat(0, 1)]];
        assert!(same_span(&a, &b));
        assert!(!same_span(&a[..1], &b[..1]));
        assert_eq!(independent_subset(&[a[0].clone(), a[0].clone(), a[1].clone()]), vec![0, 2]);
    }

    #[test]
    fn jacobi_on_known_spectrum() {
        let a = FloatMatrix::from_rows(vec![vec![2.0, 1.0, 0.0], vec![1.0, 2.0, 0.0], vec![0.0, 0.0, 5.0]]).unwrap();
        let eig = jacobi_eigen(&a).unwrap();
        let want = [1.0, 3.0, 5.0];
        for (v, w) in eig.values.iter().zip(want) {
            assert!((v - w).abs() < 1e-13);
        }
        for k in 0..3 {
            let col = eig.vectors.column(k);
            let av = a.apply(&col).unwrap();
            for (x, y) in av.iter().zip(&col) {
                assert!((x - eig.values[k] * y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn complement_is_orthonormal() {
        let s = 0.5f64.sqrt();
        let against = vec![vec![s, s, 0.0, 0.0]];
        let comp = orthonormal_complement(4, &against, 1e-12);
        assert_eq!(comp.len(), 3);
        for (i, u) in comp.iter().enumerate() {
            let d: f64 = u.iter().zip(&against[0]).map(|(x, y)| x * y).sum();
            assert!(d.abs() < 1e-14);
            for (j, w) in comp.iter().enumerate() {
                let g: f64 = u.iter().zip(w).map(|(x, y)| x * y).sum();
                assert!((g - if i == j { 1.0 } else { 0.0 }).abs() < 1e-14);
            }
        }
    }
}
