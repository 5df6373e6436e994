//! Text form of a [`DistributionSpec`].
//!
//! ```text
//! exp:RATE  geo:P  ber:P  two:A,WA,B  unif:LO,HI  pareto:X0,BETA
//! trunc(INNER,L)  blocksum(INNER,K)  surrogate(INNER,T)
//! ```
//!
//! Case-insensitive; numbers may be written as fractions such as `1/3`.

use super::DistributionSpec;
use crate::error::{Error, Result};

fn parse_error(token: &str, reason: impl Into<String>) -> Error {
    Error::Parse {
        token: token.to_string(),
        reason: reason.into(),
    }
}

fn number(token: &str) -> Result<f64> {
    let t = token.trim();
    let value = match t.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n.trim().parse().map_err(|_| parse_error(t, "not a number"))?;
            let d: f64 = d.trim().parse().map_err(|_| parse_error(t, "not a number"))?;
            n / d
        }
        None => t.parse().map_err(|_| parse_error(t, "not a number"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(parse_error(t, "not a finite number"))
    }
}

fn numbers<const N: usize>(name: &str, args: &str) -> Result<[f64; N]> {
    let parts: Vec<&str> = args.split(',').collect();
    if parts.len() != N {
        return Err(parse_error(
            args,
            format!("`{name}` takes {N} argument(s), got {}", parts.len()),
        ));
    }
    let mut out = [0.0; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = number(part)?;
    }
    Ok(out)
}

/// Splits `INNER,ARG` at the last comma outside parentheses.
fn split_wrapper_args(body: &str) -> Result<(&str, &str)> {
    let mut depth = 0i32;
    let mut cut = None;
    for (i, c) in body.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => cut = Some(i),
            _ => {}
        }
    }
    match cut {
        Some(i) => Ok((&body[..i], &body[i + 1..])),
        None => Err(parse_error(body, "expected `INNER,ARG`")),
    }
}

fn with_spec_error(token: &str, r: Result<DistributionSpec>) -> Result<DistributionSpec> {
    r.map_err(|e| match e {
        Error::InvalidParameter(msg) => parse_error(token, msg),
        other => other,
    })
}

pub fn parse(input: &str) -> Result<DistributionSpec> {
    let text: String = input
        .chars()
        .filter(|c| !c.is_whitespace())
        .collect::<String>()
        .to_lowercase();
    let text = text.as_str();
    if text.is_empty() {
        return Err(parse_error(input, "empty distribution"));
    }
    for wrapper in ["trunc", "blocksum", "surrogate"] {
        if let Some(rest) = text.strip_prefix(wrapper) {
            let Some(body) = rest.strip_prefix('(').and_then(|r| r.strip_suffix(')')) else {
                return Err(parse_error(text, format!("`{wrapper}` needs `{wrapper}(INNER,ARG)`")));
            };
            let (inner, arg) = split_wrapper_args(body)?;
            let inner = parse(inner)?;
            return match wrapper {
                "trunc" => with_spec_error(text, DistributionSpec::truncated(inner, number(arg)?)),
                "blocksum" => {
                    let k: u32 = arg
                        .parse()
                        .map_err(|_| parse_error(arg, "block size must be a positive integer"))?;
                    with_spec_error(text, DistributionSpec::block_sum(inner, k))
                }
                _ => inner
                    .bounded_surrogate(number(arg)?)
                    .map_err(|e| parse_error(text, e.to_string())),
            };
        }
    }
    let Some((name, args)) = text.split_once(':') else {
        return Err(parse_error(text, "expected `family:params`"));
    };
    let spec = match name {
        "exp" => {
            let [rate] = numbers("exp", args)?;
            DistributionSpec::exponential(rate)
        }
        "geo" => {
            let [p] = numbers("geo", args)?;
            DistributionSpec::geometric(p)
        }
        "ber" => {
            let [p] = numbers("ber", args)?;
            DistributionSpec::bernoulli(p)
        }
        "two" => {
            let [a, wa, b] = numbers("two", args)?;
            DistributionSpec::two_point(a, wa, b)
        }
        "unif" => {
            let [lo, hi] = numbers("unif", args)?;
            DistributionSpec::uniform(lo, hi)
        }
        "pareto" => {
            let [x0, beta] = numbers("pareto", args)?;
            DistributionSpec::pareto(x0, beta)
        }
        other => return Err(parse_error(other, "unknown distribution family")),
    };
    with_spec_error(text, spec)
}
