//! Seed-list syntax for the command line.

use crate::error::{Error, Result};

/// Upper bound on the number of seeds one list may expand to.
pub const MAX_SEEDS: u64 = 1 << 20;

/// Parses `N` (seeds `0..N`) or a comma list of seeds and inclusive
/// `a-b` ranges, e.g. `1,4-6,9`. Seeds must be distinct.
pub fn parse_seed_list(text: &str) -> Result<Vec<u64>> {
    let text = text.trim();
    let num = |s: &str| -> Result<u64> {
        s.trim()
            .parse::<u64>()
            .map_err(|_| Error::Parse(format!("bad seed `{}`", s.trim())))
    };
    let mut seeds = Vec::new();
    if !text.contains([',', '-']) {
        let n = num(text)?;
        if n == 0 || n > MAX_SEEDS {
            return Err(Error::Parse(format!("seed count must lie in 1..={MAX_SEEDS}, got {n}")));
        }
        return Ok((0..n).collect());
    }
    for part in text.split(',') {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b || b - a >= MAX_SEEDS || seeds.len() as u64 + (b - a) >= MAX_SEEDS {
                    return Err(Error::Parse(format!("bad seed range `{}`", part.trim())));
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(num(part)?),
        }
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = seeds.iter().find(|s| !seen.insert(**s)) {
        return Err(Error::Parse(format!("seed {dup} listed twice")));
    }
    Ok(seeds)
}
