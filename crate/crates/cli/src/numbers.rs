//! Numeric flag parsing: scientific notation for counts, `p/q` for reals.

use serde::{Deserialize, Deserializer};

/// Largest count accepted from a float literal such as `1e6`.
const MAX_EXACT_FLOAT: f64 = 9_007_199_254_740_992.0;

pub fn parse_count(s: &str) -> Result<u64, String> {
    let t = s.trim().replace('_', "");
    if let Ok(v) = t.parse::<u64>() {
        return Ok(v);
    }
    let x: f64 = t.parse().map_err(|_| format!("'{s}' is not a count"))?;
    if !x.is_finite() || x < 0.0 || x.fract() != 0.0 || x > MAX_EXACT_FLOAT {
        return Err(format!("'{s}' is not a nonnegative whole number"));
    }
    Ok(x as u64)
}

pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let x = match t.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("'{s}' is not a ratio p/q"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("'{s}' is not a ratio p/q"))?;
            if q == 0.0 {
                return Err(format!("'{s}' divides by zero"));
            }
            p / q
        }
        None => t.parse().map_err(|_| format!("'{s}' is not a number"))?,
    };
    if !x.is_finite() {
        return Err(format!("'{s}' is not finite"));
    }
    Ok(x)
}

/// `3,4,5`, `3..=6` or a mix such as `1,3..=5`.
pub fn parse_levels(s: &str) -> Result<Vec<u32>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once("..=") {
            Some((a, b)) => {
                let a: u32 = a.trim().parse().map_err(|_| format!("bad level range '{part}'"))?;
                let b: u32 = b.trim().parse().map_err(|_| format!("bad level range '{part}'"))?;
                if a > b {
                    return Err(format!("empty level range '{part}'"));
                }
                out.extend(a..=b);
            }
            None => out.push(part.parse().map_err(|_| format!("bad level '{part}'"))?),
        }
    }
    if out.is_empty() {
        return Err("no levels given".into());
    }
    Ok(out)
}

/// `132` (single digits) or `1,3,2`.
pub fn parse_pattern(s: &str) -> Result<Vec<u32>, String> {
    let t = s.trim();
    if t.contains(',') {
        return t
            .split(',')
            .map(|p| p.trim().parse().map_err(|_| format!("bad pattern entry '{p}'")))
            .collect();
    }
    t.chars()
        .map(|c| c.to_digit(10).filter(|&d| d > 0).ok_or_else(|| format!("bad pattern '{s}'")))
        .collect()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Loose<T> {
    Value(T),
    Text(String),
}

pub fn de_count<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
    match Option::<Loose<serde_json::Number>>::deserialize(d)? {
        None => Ok(None),
        Some(Loose::Value(n)) => parse_count(&n.to_string()).map(Some).map_err(serde::de::Error::custom),
        Some(Loose::Text(s)) => parse_count(&s).map(Some).map_err(serde::de::Error::custom),
    }
}

pub fn de_real<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
    match Option::<Loose<f64>>::deserialize(d)? {
        None => Ok(None),
        Some(Loose::Value(x)) => Ok(Some(x)),
        Some(Loose::Text(s)) => parse_real(&s).map(Some).map_err(serde::de::Error::custom),
    }
}

pub fn de_levels<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<u32>>, D::Error> {
    match Option::<Loose<Vec<u32>>>::deserialize(d)? {
        None => Ok(None),
        Some(Loose::Value(v)) => Ok(Some(v)),
        Some(Loose::Text(s)) => parse_levels(&s).map(Some).map_err(serde::de::Error::custom),
    }
}

pub fn de_pattern<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Vec<u32>>, D::Error> {
    match Option::<Loose<Vec<u32>>>::deserialize(d)? {
        None => Ok(None),
        Some(Loose::Value(v)) => Ok(Some(v)),
        Some(Loose::Text(s)) => parse_pattern(&s).map(Some).map_err(serde::de::Error::custom),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(parse_count("1000"), Ok(1000));
        assert_eq!(parse_count("1e6"), Ok(1_000_000));
        assert_eq!(parse_count("2.5E3"), Ok(2500));
        assert_eq!(parse_count("1_000"), Ok(1000));
        assert!(parse_count("1.5").is_err());
        assert!(parse_count("-3").is_err());
        assert!(parse_count("abc").is_err());
    }

    #[test]
    fn reals() {
        assert_eq!(parse_real("1/2"), Ok(0.5));
        assert_eq!(parse_real("3 / 4"), Ok(0.75));
        assert_eq!(parse_real("1.5e-1"), Ok(0.15));
        assert!(parse_real("1/0").is_err());
        assert!(parse_real("inf").is_err());
    }

    #[test]
    fn levels_and_patterns() {
        assert_eq!(parse_levels("3,4,5"), Ok(vec![3, 4, 5]));
        assert_eq!(parse_levels("1,3..=5"), Ok(vec![1, 3, 4, 5]));
        assert!(parse_levels("5..=3").is_err());
        assert_eq!(parse_pattern("132"), Ok(vec![1, 3, 2]));
        assert_eq!(parse_pattern("1,10,2"), Ok(vec![1, 10, 2]));
        assert!(parse_pattern("102").is_err());
    }
}
