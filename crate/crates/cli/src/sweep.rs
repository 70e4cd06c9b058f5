//! `{k}`-templates for parameter sweeps.

use homspace::{Error, Result};

/// `c*k + d` from `k`, `k+d`, `k-d`, `c*k`, `c*k+d`, `c*k-d`.
fn parse_affine(expr: &str) -> Result<(i64, i64)> {
    let e: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("bad placeholder '{{{expr}}}'"));
    let (c, rest) = match e.split_once("*k") {
        Some((c, rest)) => (c.parse::<i64>().map_err(|_| bad())?, rest),
        None => (1, e.strip_prefix('k').ok_or_else(bad)?),
    };
    let d = match rest.chars().next() {
        None => 0,
        Some('+') => rest[1..].parse::<i64>().map_err(|_| bad())?,
        Some('-') => -rest[1..].parse::<i64>().map_err(|_| bad())?,
        Some(_) => return Err(bad()),
    };
    Ok((c, d))
}

pub fn substitute(template: &str, k: i64) -> Result<String> {
    let mut out = String::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let close = rest[open..].find('}').ok_or_else(|| Error::Parse(format!("unclosed '{{' in '{template}'")))?;
        let (c, d) = parse_affine(&rest[open + 1..open + close])?;
        let v = c
            .checked_mul(k)
            .and_then(|x| x.checked_add(d))
            .ok_or_else(|| Error::InvalidParameter("placeholder value overflows".into()))?;
        out.push_str(&v.to_string());
        rest = &rest[open + close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// One member per `k` in `from..=to`.
pub fn expand(template: &str, from: i64, to: i64) -> Result<Vec<String>> {
    if from > to {
        return Err(Error::InvalidParameter(format!("empty range {from}..={to}")));
    }
    (from..=to).map(|k| substitute(template, k)).collect()
}
