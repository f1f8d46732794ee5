//! The library product against a from-scratch integer implementation of
//! `(a,b)(c,d) = (ac - conj(d) b, d a + b conj(c))`.

use cdzero::notation::parse_element;
use cdzero::scalar::rat;
use cdzero::{multiply, CdElement, Element};
use proptest::prelude::*;

fn conj(v: &[i64]) -> Vec<i64> {
    v.iter().enumerate().map(|(i, x)| if i == 0 { *x } else { -x }).collect()
}

fn add(u: &[i64], v: &[i64]) -> Vec<i64> {
    u.iter().zip(v).map(|(a, b)| a + b).collect()
}

fn sub(u: &[i64], v: &[i64]) -> Vec<i64> {
    u.iter().zip(v).map(|(a, b)| a - b).collect()
}

fn oracle(x: &[i64], y: &[i64]) -> Vec<i64> {
    if x.len() == 1 {
        return vec![x[0] * y[0]];
    }
    let h = x.len() / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let mut out = sub(&oracle(a, c), &oracle(&conj(d), b));
    out.extend(add(&oracle(d, a), &oracle(b, &conj(c))));
    out
}

fn to_element(v: &[i64]) -> CdElement {
    Element::from_vec(v.iter().map(|x| rat(*x, 1)).collect()).unwrap()
}

fn basis(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn int_vectors() -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (0u32..=6).prop_flat_map(|level| {
        let dim = 1usize << level;
        (prop::collection::vec(-9i64..=9, dim), prop::collection::vec(-9i64..=9, dim))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn library_product_matches_oracle((x, y) in int_vectors()) {
        let got = multiply(&to_element(&x), &to_element(&y)).unwrap();
        prop_assert_eq!(got, to_element(&oracle(&x, &y)));
    }
}

#[test]
fn every_basis_product_at_level_four_matches() {
    for i in 0..16 {
        for j in 0..16 {
            let (x, y) = (basis(16, i), basis(16, j));
            let got = multiply(&to_element(&x), &to_element(&y)).unwrap();
            assert_eq!(got, to_element(&oracle(&x, &y)), "e{i} e{j}");
        }
    }
}

#[test]
fn products_fixed_by_the_worked_example() {
    let p = |a: &str, b: &str| multiply(&parse_element(3, a).unwrap(), &parse_element(3, b).unwrap()).unwrap();
    let e = |s: &str| parse_element(3, s).unwrap();
    assert_eq!(p("e1", "e4"), e("e5"));
    assert_eq!(p("e7", "e2"), e("e5"));
    assert_eq!(p("e7", "e1"), e("-e6"));
    assert_eq!(p("e2", "e4"), e("e6"));
    assert_eq!(p("e1", "e2"), e("e3"));
}

#[test]
fn imaginary_units_square_to_minus_one() {
    for level in 1..=5u32 {
        for i in 1..1usize << level {
            let x = basis(1 << level, i);
            let mut want = vec![0; 1 << level];
            want[0] = -1;
            assert_eq!(oracle(&x, &x), want);
            let e = Element::basis(level, i).unwrap();
            assert_eq!(multiply(&e, &e).unwrap(), to_element(&want));
        }
    }
}
