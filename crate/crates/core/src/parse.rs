//! Text forms of complex numbers, symbols and inner functions.
//!
//! * complex: `1.5`, `-0.3+0.1i`, `2i`, `-i`
//! * symbol: `[(1,1,0),(-1,2,0)]`, a list of `(index, re, im)` triples
//! * inner function: `z^2` or `blaschke:c=1;zeros=0.5,-0.3+0.1i`

use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{DthoError, Result};
use crate::fourier::LaurentSeries;
use crate::inner::InnerFunction;

fn parse_err(what: &'static str, reason: impl Into<String>) -> DthoError {
    DthoError::Parse { what, reason: reason.into() }
}

fn parse_f64(s: &str, what: &'static str) -> Result<f64> {
    s.trim().parse::<f64>().map_err(|e| parse_err(what, format!("`{s}`: {e}")))
}

/// Parses `a`, `bi`, `a+bi` or `a-bi`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(parse_err("complex", "empty literal"));
    }
    let Some(body) = s.strip_suffix('i') else {
        return Ok(Complex64::new(parse_f64(&s, "complex")?, 0.0));
    };
    let bytes = body.as_bytes();
    let split =
        (1..bytes.len()).rev().find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(p) => (parse_f64(&body[..p], "complex")?, &body[p..]),
        None => (0.0, body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => parse_f64(other, "complex")?,
    };
    Ok(Complex64::new(re, im))
}

fn clean_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

/// Formats as `re+imi` / `re-imi` using shortest round-trip decimals.
pub fn format_complex(z: Complex64) -> String {
    let (re, im) = (clean_zero(z.re), clean_zero(z.im));
    if im < 0.0 || (im == 0.0 && im.is_sign_negative()) {
        format!("{re}-{}i", -im)
    } else {
        format!("{re}+{im}i")
    }
}

/// Parses a symbol literal such as `[(1,1,0),(-1,2,0)]`; two-element tuples are real.
pub fn parse_symbol(text: &str) -> Result<LaurentSeries> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let inner =
        s.strip_prefix('[').and_then(|r| r.strip_suffix(']')).ok_or_else(|| parse_err("symbol", "expected `[...]`"))?;
    if inner.is_empty() {
        return Ok(LaurentSeries::zero());
    }
    let body = inner
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| parse_err("symbol", "expected `(index, re, im)` tuples"))?;
    let mut terms = Vec::new();
    for tuple in body.split("),(") {
        let parts: Vec<&str> = tuple.split(',').collect();
        let k = parts[0].parse::<i64>().map_err(|e| parse_err("symbol", format!("index `{}`: {e}", parts[0])))?;
        let (re, im) = match parts.len() {
            2 => (parse_f64(parts[1], "symbol")?, 0.0),
            3 => (parse_f64(parts[1], "symbol")?, parse_f64(parts[2], "symbol")?),
            _ => return Err(parse_err("symbol", format!("tuple `({tuple})` needs 2 or 3 entries"))),
        };
        terms.push((k, Complex64::new(re, im)));
    }
    Ok(LaurentSeries::from_terms(terms))
}

/// Formats a series in the symbol literal syntax.
pub fn format_symbol(f: &LaurentSeries) -> String {
    let body: Vec<String> =
        f.terms().map(|(k, c)| format!("({k},{},{})", clean_zero(c.re), clean_zero(c.im))).collect();
    format!("[{}]", body.join(","))
}

/// Parses `z`, `z^n` or `blaschke:c=...;zeros=...`.
pub fn parse_inner(text: &str) -> Result<InnerFunction> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if s == "z" {
        return InnerFunction::monomial(1);
    }
    if let Some(n) = s.strip_prefix("z^") {
        let n = n.parse::<u32>().map_err(|e| parse_err("inner function", format!("`{n}`: {e}")))?;
        return InnerFunction::monomial(n);
    }
    let Some(rest) = s.strip_prefix("blaschke:") else {
        return Err(parse_err("inner function", format!("`{text}` is neither `z^n` nor `blaschke:...`")));
    };
    let mut constant = Complex64::new(1.0, 0.0);
    let mut zeros = None;
    for field in rest.split(';').filter(|f| !f.is_empty()) {
        let (key, value) =
            field.split_once('=').ok_or_else(|| parse_err("inner function", format!("field `{field}` lacks `=`")))?;
        match key {
            "c" => constant = parse_complex(value)?,
            "zeros" => zeros = Some(value.split(',').map(parse_complex).collect::<Result<Vec<_>>>()?),
            other => return Err(parse_err("inner function", format!("unknown field `{other}`"))),
        }
    }
    let zeros = zeros.ok_or_else(|| parse_err("inner function", "missing `zeros=`"))?;
    InnerFunction::blaschke(zeros, constant)
}

impl FromStr for InnerFunction {
    type Err = DthoError;
    fn from_str(s: &str) -> Result<Self> {
        parse_inner(s)
    }
}

impl FromStr for LaurentSeries {
    type Err = DthoError;
    fn from_str(s: &str) -> Result<Self> {
        parse_symbol(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn complex_literals() {
        assert_eq!(parse_complex("0.5").unwrap(), c(0.5, 0.0));
        assert_eq!(parse_complex("-0.3+0.1i").unwrap(), c(-0.3, 0.1));
        assert_eq!(parse_complex("2i").unwrap(), c(0.0, 2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("1e-3-2.5e-1i").unwrap(), c(1e-3, -0.25));
        assert!(parse_complex("abc").is_err());
    }

    #[test]
    fn complex_round_trip() {
        for z in [c(1.0, 0.0), c(-0.25, 3.5), c(0.1, -0.7), c(-0.0, -0.0)] {
            assert_eq!(parse_complex(&format_complex(z)).unwrap(), z);
        }
        assert_eq!(format_complex(c(-0.0, -0.0)), "0+0i");
    }

    #[test]
    fn symbol_literal() {
        let f = parse_symbol("[(1,1,0),(-1,2,0)]").unwrap();
        let expected = LaurentSeries::from_real_terms([(1, 1.0), (-1, 2.0)]);
        assert_eq!(f, expected);
        assert_eq!(parse_symbol(&format_symbol(&f)).unwrap(), f);
        assert!(parse_symbol("[]").unwrap().is_zero());
        assert!(parse_symbol("(1,1,0)").is_err());
        assert!(parse_symbol("[(x,1,0)]").is_err());
    }

    #[test]
    fn inner_literals() {
        assert_eq!(parse_inner("z^2").unwrap(), InnerFunction::monomial(2).unwrap());
        let b = parse_inner("blaschke:c=1;zeros=0.5,-0.3+0.1i").unwrap();
        assert_eq!(b, InnerFunction::blaschke(vec![c(0.5, 0.0), c(-0.3, 0.1)], c(1.0, 0.0)).unwrap());
        assert_eq!(parse_inner(&b.to_string()).unwrap(), b);
        assert!(parse_inner("blaschke:zeros=1.5").is_err());
        assert!(parse_inner("sin").is_err());
    }
}
