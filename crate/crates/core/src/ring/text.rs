//! JSON serialization and pretty-printing of ring elements.

use super::elem::{DenomFactor, LocalizedElem};
use super::exponent::HalfExponent;
use super::poly::{Coeff, LaurentPoly};
use super::RingError;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use std::fmt;

fn int_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

fn int_from_json(v: &Value) -> Result<BigInt, RingError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| RingError::Malformed(format!("non-integer number {n}"))),
        Value::String(s) => s.parse().map_err(|_| RingError::Malformed(format!("bad integer {s:?}"))),
        _ => Err(RingError::Malformed(format!("expected integer, got {v}"))),
    }
}

/// Parses `"a"` or `"a/b"`.
pub fn parse_coeff(s: &str) -> Option<Coeff> {
    match s.split_once('/') {
        Some((a, b)) => {
            let d: BigInt = b.trim().parse().ok()?;
            let n: BigInt = a.trim().parse().ok()?;
            (!d.is_zero()).then(|| Coeff::new(n, d))
        }
        None => Some(Coeff::from_integer(s.trim().parse().ok()?)),
    }
}

impl LocalizedElem {
    /// `{"m": m, "num": [[e.., cnum, cden]..], "den": [[e.., mult]..]}`.
    pub fn to_json(&self) -> Value {
        let num: Vec<Value> = self
            .numerator()
            .terms()
            .iter()
            .map(|(e, c)| {
                let mut row: Vec<Value> = e.entries().iter().map(|&x| json!(x)).collect();
                row.push(int_to_json(c.numer()));
                row.push(int_to_json(c.denom()));
                Value::Array(row)
            })
            .collect();
        let den: Vec<Value> = self
            .denominator()
            .iter()
            .map(|f| {
                let mut row: Vec<Value> = f.character.entries().iter().map(|&x| json!(x)).collect();
                row.push(json!(f.multiplicity));
                Value::Array(row)
            })
            .collect();
        json!({ "m": self.nvars(), "num": num, "den": den })
    }

    pub fn from_json(v: &Value) -> Result<Self, RingError> {
        let bad = |s: &str| RingError::Malformed(s.to_string());
        let m = v.get("m").and_then(Value::as_u64).ok_or_else(|| bad("missing m"))? as usize;
        let exps = |row: &[Value]| -> Result<HalfExponent, RingError> {
            row.iter()
                .map(|x| x.as_i64().map(|y| y as i32).ok_or_else(|| bad("exponent must be an integer")))
                .collect::<Result<Vec<_>, _>>()
                .map(HalfExponent::from)
        };
        let mut terms = Vec::new();
        for row in v.get("num").and_then(Value::as_array).ok_or_else(|| bad("missing num"))? {
            let row = row.as_array().ok_or_else(|| bad("num row must be an array"))?;
            if row.len() != m + 2 {
                return Err(bad("num row has wrong length"));
            }
            let d = int_from_json(&row[m + 1])?;
            if d.is_zero() {
                return Err(bad("zero coefficient denominator"));
            }
            terms.push((exps(&row[..m])?, Coeff::new(int_from_json(&row[m])?, d)));
        }
        let mut den = Vec::new();
        for row in v.get("den").and_then(Value::as_array).ok_or_else(|| bad("missing den"))? {
            let row = row.as_array().ok_or_else(|| bad("den row must be an array"))?;
            if row.len() != m + 1 {
                return Err(bad("den row has wrong length"));
            }
            let character = exps(&row[..m])?;
            if character.is_zero() {
                return Err(bad("zero denominator character"));
            }
            let multiplicity =
                row[m].as_u64().ok_or_else(|| bad("multiplicity must be a positive integer"))? as u32;
            den.push(DenomFactor { character, multiplicity });
        }
        Ok(LocalizedElem::new(LaurentPoly::from_terms(m, terms), den))
    }

    pub fn pretty(&self, names: &VarNames) -> String {
        let num = names.poly(self.numerator());
        if self.denominator().is_empty() {
            return num;
        }
        let den: Vec<String> = self
            .denominator()
            .iter()
            .map(|f| {
                let b = format!("(1 - {})", names.monomial(&f.character));
                if f.multiplicity > 1 {
                    format!("{b}^{}", f.multiplicity)
                } else {
                    b
                }
            })
            .collect();
        let num = if self.numerator().len() > 1 { format!("({num})") } else { num };
        format!("{num}/({})", den.join("*"))
    }
}

impl fmt::Display for LocalizedElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.pretty(&VarNames::default_for(self.nvars())))
    }
}

/// Display names of the generators `q_i`.
#[derive(Clone, Debug)]
pub struct VarNames(pub Vec<String>);

impl VarNames {
    /// `q1, ..., qm`.
    pub fn default_for(m: usize) -> Self {
        VarNames((1..=m).map(|i| format!("q{i}")).collect())
    }

    /// `q0, ..., q{m-1}`.
    pub fn zero_based(m: usize) -> Self {
        VarNames((0..m).map(|i| format!("q{i}")).collect())
    }

    pub fn monomial(&self, e: &HalfExponent) -> String {
        let parts: Vec<String> = e
            .entries()
            .iter()
            .zip(&self.0)
            .filter(|(&c, _)| c != 0)
            .map(|(&c, n)| match (c % 2 == 0, c / 2) {
                (true, 1) => n.clone(),
                (true, k) if k > 0 => format!("{n}^{k}"),
                (true, k) => format!("{n}^{{{k}}}"),
                (false, _) => format!("{n}^{{{c}/2}}"),
            })
            .collect();
        if parts.is_empty() {
            "1".into()
        } else {
            parts.join("*")
        }
    }

    pub fn poly(&self, p: &LaurentPoly) -> String {
        if p.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (e, c)) in p.terms().iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = self.monomial(e);
            if e.is_zero() {
                out.push_str(&a.to_string());
            } else if a.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&format!("{a}*{mono}"));
            }
        }
        out
    }
}
