//! Plain-text instance format.
//!
//! ```text
//! # optional comment lines, only before the header
//! n B
//! mu delta weight      (n lines)
//! ```
//!
//! Numbers are written with the shortest decimal representation that parses
//! back to the same value, so `save` followed by `load` is lossless.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use super::{InstanceError, Item, KnapsackInstance};
use crate::Scalar;

pub fn load_instance<T: Scalar>(path: impl AsRef<Path>) -> Result<KnapsackInstance<T>, InstanceError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_instance(&text, name)
}

pub fn save_instance<T: Scalar>(
    instance: &KnapsackInstance<T>,
    path: impl AsRef<Path>,
) -> Result<(), InstanceError> {
    fs::write(path, to_canonical_string(instance))?;
    Ok(())
}

pub fn to_canonical_string<T: Scalar>(instance: &KnapsackInstance<T>) -> String {
    let mut out = String::with_capacity(16 * (instance.len() + 1));
    let _ = writeln!(out, "{} {}", instance.len(), instance.capacity());
    for it in instance.items() {
        let _ = writeln!(out, "{} {} {}", it.mu, it.delta, it.weight);
    }
    out
}

fn parse_error(line: usize, message: impl Into<String>) -> InstanceError {
    InstanceError::Parse {
        line,
        message: message.into(),
    }
}

fn number<T: Scalar>(field: &str, what: &str, line: usize) -> Result<T, InstanceError> {
    let value: T = field
        .parse()
        .map_err(|_| parse_error(line, format!("{what} is not a number: {field:?}")))?;
    if !value.is_finite() {
        return Err(parse_error(line, format!("{what} is not finite: {field:?}")));
    }
    Ok(value)
}

pub fn parse_instance<T: Scalar>(
    text: &str,
    name: impl Into<String>,
) -> Result<KnapsackInstance<T>, InstanceError> {
    let mut lines = text.split('\n').enumerate().map(|(i, l)| (i + 1, l));

    let (header_line, header) = loop {
        match lines.next() {
            Some((_, l)) if l.starts_with('#') => continue,
            Some(found) => break found,
            None => return Err(parse_error(1, "missing header")),
        }
    };
    let fields: Vec<&str> = header.split_ascii_whitespace().collect();
    let [n_field, capacity_field] = fields[..] else {
        return Err(parse_error(
            header_line,
            format!("malformed header: expected `n B`, got {header:?}"),
        ));
    };
    let n: usize = n_field
        .parse()
        .map_err(|_| parse_error(header_line, format!("item count is not an integer: {n_field:?}")))?;
    if n == 0 {
        return Err(parse_error(header_line, "item count must be at least 1"));
    }
    let capacity: T = number(capacity_field, "capacity", header_line)?;
    if capacity <= T::zero() {
        return Err(parse_error(header_line, format!("capacity must be positive, got {capacity}")));
    }

    let mut items = Vec::with_capacity(n);
    for _ in 0..n {
        let (line, text) = lines
            .next()
            .filter(|(_, l)| !l.is_empty())
            .ok_or_else(|| {
                parse_error(
                    header_line + items.len() + 1,
                    format!("item count mismatch: header declares {n}, found {}", items.len()),
                )
            })?;
        let fields: Vec<&str> = text.split_ascii_whitespace().collect();
        let [mu, delta, weight] = fields[..] else {
            return Err(parse_error(
                line,
                format!("expected `mu delta weight`, got {text:?}"),
            ));
        };
        let item = Item::new(
            number(mu, "mu", line)?,
            number(delta, "delta", line)?,
            number(weight, "weight", line)?,
        );
        if item.weight <= T::zero() {
            return Err(parse_error(line, format!("weight must be positive, got {}", item.weight)));
        }
        if item.mu < T::zero() || item.delta < T::zero() {
            return Err(parse_error(line, "mu and delta must be non-negative"));
        }
        items.push(item);
    }
    for (line, rest) in lines {
        if !rest.trim().is_empty() {
            return Err(parse_error(
                line,
                format!("item count mismatch: more than {n} item lines"),
            ));
        }
    }
    KnapsackInstance::new(name, items, capacity)
}
