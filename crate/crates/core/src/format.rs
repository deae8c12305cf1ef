//! Plain-text formats for permutations and twin pairs.
//!
//! Permutation files hold whitespace-separated distinct integers, optionally
//! preceded by a `# n=<ground_bound>` header line. Without the header the
//! ground bound is the maximum value. Other `#` lines are comments.
//!
//! Twin-pair files hold three content lines: the host (inline values, or the
//! single token `@` to use an externally supplied host), the first twin's
//! positions, and the second twin's positions. Optional headers: `# n=` for
//! an inline host's ground bound, `# tau=` for a closeness bound.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::perm::{Permutation, PositionSubsequence, TwinPair};

fn parse_u32(token: &str, what: &str) -> Result<u32> {
    token
        .parse::<u32>()
        .map_err(|_| Error::Parse(format!("invalid {what} token '{token}'")))
}

/// Splits a comment line into a recognized `key=value` directive, if any.
fn directive(line: &str) -> Option<(&str, &str)> {
    let body = line.strip_prefix('#')?.trim();
    let (key, value) = body.split_once('=')?;
    match key.trim() {
        k @ ("n" | "tau") => Some((k, value.trim())),
        _ => None,
    }
}

pub fn parse_permutation(text: &str) -> Result<Permutation> {
    let mut bound: Option<u32> = None;
    let mut values = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('#') {
            if let Some((key, value)) = directive(line) {
                if key != "n" {
                    return Err(Error::Parse(format!(
                        "header '{key}=' not valid in a permutation file"
                    )));
                }
                if bound.is_some() {
                    return Err(Error::Parse("duplicate n= header".into()));
                }
                bound = Some(parse_u32(value, "ground bound")?);
            }
            continue;
        }
        for token in line.split_whitespace() {
            values.push(parse_u32(token, "value")?);
        }
    }
    match bound {
        Some(n) => Permutation::new(values, n),
        None => Permutation::from_values(values),
    }
}

pub fn write_permutation(p: &Permutation) -> String {
    let mut out = String::new();
    let max = p.values().iter().copied().max().unwrap_or(0);
    if p.ground_bound() != max {
        writeln!(out, "# n={}", p.ground_bound()).unwrap();
    }
    writeln!(out, "{}", join(p.values())).unwrap();
    out
}

fn join(values: &[u32]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Parses a twin-pair file. `external_host` supplies the host when the file's
/// host line is `@`; if the file carries an inline host as well, the two must
/// agree.
pub fn parse_twin_pair(text: &str, external_host: Option<&Permutation>) -> Result<TwinPair> {
    let mut bound: Option<u32> = None;
    let mut tau: Option<u32> = None;
    let mut content: Vec<&str> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.starts_with('#') {
            if let Some((key, value)) = directive(line) {
                let slot = if key == "n" { &mut bound } else { &mut tau };
                if slot.is_some() {
                    return Err(Error::Parse(format!("duplicate {key}= header")));
                }
                *slot = Some(parse_u32(value, key)?);
            }
            continue;
        }
        if content.len() == 3 {
            if line.is_empty() {
                continue;
            }
            return Err(Error::Parse("more than three content lines".into()));
        }
        content.push(line);
    }
    if content.len() != 3 {
        return Err(Error::Parse(format!(
            "expected host, first positions, second positions; got {} content line(s)",
            content.len()
        )));
    }
    let host = if content[0] == "@" {
        if bound.is_some() {
            return Err(Error::Parse("n= header is meaningless with an @ host".into()));
        }
        external_host
            .cloned()
            .ok_or_else(|| Error::Parse("host line is '@' but no host file was supplied".into()))?
    } else {
        let values: Vec<u32> = content[0]
            .split_whitespace()
            .map(|t| parse_u32(t, "host value"))
            .collect::<Result<_>>()?;
        let inline = match bound {
            Some(n) => Permutation::new(values, n)?,
            None => Permutation::from_values(values)?,
        };
        if let Some(ext) = external_host {
            if *ext != inline {
                return Err(Error::Parse(
                    "inline host disagrees with the supplied host file".into(),
                ));
            }
        }
        inline
    };
    let positions = |line: &str, what: &str| -> Result<PositionSubsequence> {
        let ps: Vec<u32> = line
            .split_whitespace()
            .map(|t| parse_u32(t, what))
            .collect::<Result<_>>()?;
        PositionSubsequence::new(ps)
    };
    let first = positions(content[1], "first position")?;
    let second = positions(content[2], "second position")?;
    Ok(TwinPair::new(host, first, second, tau))
}

pub fn write_twin_pair(t: &TwinPair) -> String {
    let mut out = String::new();
    let max = t.host.values().iter().copied().max().unwrap_or(0);
    if t.host.ground_bound() != max {
        writeln!(out, "# n={}", t.host.ground_bound()).unwrap();
    }
    if let Some(tau) = t.closeness_bound {
        writeln!(out, "# tau={tau}").unwrap();
    }
    writeln!(out, "{}", join(t.host.values())).unwrap();
    writeln!(out, "{}", join(t.first.positions())).unwrap();
    writeln!(out, "{}", join(t.second.positions())).unwrap();
    out
}
