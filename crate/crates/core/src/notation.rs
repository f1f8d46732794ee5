//! Text and JSON forms of elements.
//!
//! Text: signed linear combinations of basis names, whitespace-insensitive,
//! e.g. `e1 + 2e10 - 1/2 e16`. A term without a basis name is a multiple of
//! `e0`. JSON: `{ "level": n, "coords": ["p/q", ...] }` for exact elements and
//! numeric coordinates for floating ones.

use std::fmt;

use num_traits::{One, Signed};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::element::{AnyElement, CdElement, Element, FloatElement};
use crate::error::{CdError, Result};
use crate::scalar::{parse_rational, Rational, Scalar};

pub fn parse_element(level: u32, text: &str) -> Result<CdElement> {
    let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err(CdError::Parse("empty element".into()));
    }
    let mut out = CdElement::zero(level);
    for (negative, term) in split_terms(&compact)? {
        let (coef, index) = parse_term(term)?;
        let coef = if negative { -coef } else { coef };
        let slot = CdElement::from_terms(level, &[(index, coef)])?;
        out = &out + &slot;
    }
    Ok(out)
}

fn split_terms(s: &str) -> Result<Vec<(bool, &str)>> {
    let bytes = s.as_bytes();
    let mut terms = Vec::new();
    let mut start = 0;
    let mut negative = false;
    let mut i = 0;
    if matches!(bytes.first(), Some(b'+') | Some(b'-')) {
        negative = bytes[0] == b'-';
        start = 1;
        i = 1;
    }
    while i < bytes.len() {
        if matches!(bytes[i], b'+' | b'-') {
            terms.push((negative, &s[start..i]));
            negative = bytes[i] == b'-';
            start = i + 1;
        }
        i += 1;
    }
    terms.push((negative, &s[start..]));
    if let Some((_, t)) = terms.iter().find(|(_, t)| t.is_empty()) {
        return Err(CdError::Parse(format!("dangling sign near `{t}` in `{s}`")));
    }
    Ok(terms)
}

fn parse_term(term: &str) -> Result<(Rational, usize)> {
    let Some(pos) = term.find(['e', 'E']) else {
        return Ok((parse_rational(term)?, 0));
    };
    let (coef, rest) = term.split_at(pos);
    let digits = &rest[1..];
    if digits.is_empty() || !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(CdError::Parse(format!("bad basis name in term `{term}`")));
    }
    let index: usize = digits.parse().map_err(|_| CdError::Parse(format!("basis index too large in `{term}`")))?;
    let coef = coef.strip_suffix('*').unwrap_or(coef);
    let coef = if coef.is_empty() { <Rational as One>::one() } else { parse_rational(coef)? };
    Ok((coef, index))
}

/// Canonical text form of an exact element (`0` for zero).
pub fn format_element(e: &CdElement) -> String {
    let mut out = String::new();
    for (i, c) in e.coords().iter().enumerate() {
        if Scalar::is_zero(c) {
            continue;
        }
        let negative = c.is_negative();
        let mag = c.abs();
        if out.is_empty() {
            if negative {
                out.push('-');
            }
        } else {
            out.push_str(if negative { " - " } else { " + " });
        }
        if mag.is_one() {
        } else if mag.is_integer() {
            out.push_str(&mag.to_string());
        } else {
            out.push_str(&mag.to_string());
            out.push(' ');
        }
        out.push_str(&format!("e{i}"));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Text form of a floating element; coordinates below `cutoff` in absolute
/// value are omitted.
pub fn format_float_element(e: &FloatElement, cutoff: f64) -> String {
    let mut out = String::new();
    for (i, c) in e.coords().iter().enumerate() {
        if c.abs() <= cutoff {
            continue;
        }
        if out.is_empty() {
            if *c < 0.0 {
                out.push('-');
            }
        } else {
            out.push_str(if *c < 0.0 { " - " } else { " + " });
        }
        let mag = c.abs();
        if mag != 1.0 {
            out.push_str(&format!("{mag} "));
        }
        out.push_str(&format!("e{i}"));
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for CdElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_element(self))
    }
}

impl fmt::Display for FloatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_float_element(self, 0.0))
    }
}

impl fmt::Display for AnyElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnyElement::Exact(e) => e.fmt(f),
            AnyElement::Float(e) => e.fmt(f),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ExactJson {
    level: u32,
    coords: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct FloatJson {
    level: u32,
    coords: Vec<f64>,
}

impl Serialize for CdElement {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        ExactJson { level: self.level(), coords: self.coords().iter().map(|c| c.to_string()).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CdElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = ExactJson::deserialize(d)?;
        exact_from_json(raw).map_err(D::Error::custom)
    }
}

fn exact_from_json(raw: ExactJson) -> Result<CdElement> {
    let coords = raw.coords.iter().map(|c| parse_rational(c)).collect::<Result<Vec<_>>>()?;
    Element::from_coords(raw.level, coords)
}

impl Serialize for FloatElement {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        FloatJson { level: self.level(), coords: self.coords().to_vec() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for FloatElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FloatJson::deserialize(d)?;
        Element::from_coords(raw.level, raw.coords).map_err(D::Error::custom)
    }
}

impl Serialize for AnyElement {
    fn serialize<Z: Serializer>(&self, s: Z) -> std::result::Result<Z::Ok, Z::Error> {
        match self {
            AnyElement::Exact(e) => e.serialize(s),
            AnyElement::Float(e) => e.serialize(s),
        }
    }
}

impl<'de> Deserialize<'de> for AnyElement {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Exact(ExactJson),
            Float(FloatJson),
        }
        match Either::deserialize(d)? {
            Either::Exact(raw) => exact_from_json(raw).map(AnyElement::Exact).map_err(D::Error::custom),
            Either::Float(raw) => {
                Element::from_coords(raw.level, raw.coords).map(AnyElement::Float).map_err(D::Error::custom)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use proptest::prelude::*;

    #[test]
    fn parses_the_documented_syntax() {
        let e = parse_element(5, "e1 + 2e10 - 1/2 e16").unwrap();
        let want = CdElement::from_terms(5, &[(1, rat(1, 1)), (10, rat(2, 1)), (16, rat(-1, 2))]).unwrap();
        assert_eq!(e, want);
        assert_eq!(parse_element(5, " e1+2 e 10-1/2e16 ").unwrap(), want);
        assert_eq!(parse_element(3, "-e4 + 3").unwrap().coords()[0], rat(3, 1));
        assert_eq!(parse_element(3, "2*e3").unwrap(), CdElement::from_terms(3, &[(3, rat(2, 1))]).unwrap());
        assert!(parse_element(3, "0").unwrap().is_zero());
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(parse_element(3, "e1 +"), Err(CdError::Parse(_))));
        assert!(matches!(parse_element(3, "ex"), Err(CdError::Parse(_))));
        assert!(matches!(parse_element(3, ""), Err(CdError::Parse(_))));
        assert!(matches!(parse_element(3, "e8"), Err(CdError::IndexOutOfRange { index: 8, level: 3 })));
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_element(&parse_element(4, "-e4 + e15").unwrap()), "-e4 + e15");
        assert_eq!(format_element(&parse_element(5, "e1+2e10-1/2e16").unwrap()), "e1 + 2e10 - 1/2 e16");
        assert_eq!(format_element(&CdElement::zero(3)), "0");
    }

    #[test]
    fn json_shape() {
        let e = parse_element(1, "1/2e1").unwrap();
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(v, serde_json::json!({"level": 1, "coords": ["0", "1/2"]}));
        let back: CdElement = serde_json::from_value(v).unwrap();
        assert_eq!(back, e);
    }

    proptest! {
        #[test]
        fn text_round_trip(coords in prop::collection::vec((-9i64..=9, 1i64..=3), 8)) {
            let coords = coords.into_iter().map(|(p, q)| rat(p, q)).collect();
            let e = CdElement::from_coords(3, coords).unwrap();
            prop_assert_eq!(parse_element(3, &format_element(&e)).unwrap(), e.clone());
            let json = serde_json::to_string(&AnyElement::Exact(e.clone())).unwrap();
            let back: AnyElement = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(back, AnyElement::Exact(e));
        }
    }
}
