//! Parsing of command-line values: truth tables, bit strings, seeds and lists.

use std::io::Read;

use anyhow::{anyhow, bail, Context, Result};
use nlbox_core::boolfn::TruthTable;

/// Reads `text`, or all of stdin when `text` is `-`.
pub fn text_or_stdin(text: &str) -> Result<String> {
    if text == "-" {
        let mut buf = String::new();
        std::io::stdin().read_to_string(&mut buf).context("reading stdin")?;
        Ok(buf.trim().to_string())
    } else {
        Ok(text.trim().to_string())
    }
}

/// A truth table in binary or `0x` hex; `n` is inferred unless given.
pub fn truth_table(text: &str, n: Option<usize>) -> Result<TruthTable> {
    let text = text_or_stdin(text)?;
    Ok(match n {
        Some(n) => TruthTable::parse(&text, n)?,
        None => TruthTable::parse_auto(&text)?,
    })
}

/// An unsigned integer in decimal or `0x` hex.
pub fn parse_u64(text: &str) -> Result<u64, String> {
    let t = text.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(&hex.replace('_', ""), 16),
        None => t.replace('_', "").parse(),
    };
    parsed.map_err(|e| format!("invalid integer '{text}': {e}"))
}

/// Input bits packed little-endian into words: decimal, or `0x` hex of any length.
pub fn parse_bits(text: &str) -> Result<Vec<u64>> {
    let t = text.trim();
    match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => {
            if hex.is_empty() {
                bail!("empty hex value");
            }
            let digits: Vec<u64> = hex
                .chars()
                .rev()
                .map(|c| c.to_digit(16).map(u64::from).ok_or_else(|| anyhow!("invalid hex digit '{c}' in '{text}'")))
                .collect::<Result<_>>()?;
            let mut words = vec![0u64; digits.len().div_ceil(16)];
            for (i, d) in digits.into_iter().enumerate() {
                words[i / 16] |= d << (4 * (i % 16));
            }
            Ok(words)
        }
        None => Ok(vec![parse_u64(t).map_err(|e| anyhow!(e))?]),
    }
}

/// Comma-separated list of values.
pub fn parse_list<T: std::str::FromStr>(text: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    text.split(',').map(|s| s.trim().parse::<T>().map_err(|e| anyhow!("invalid list entry '{s}': {e}"))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bits_and_integers() {
        assert_eq!(parse_u64("0xC0FFEE").unwrap(), 0xC0FFEE);
        assert_eq!(parse_u64("12").unwrap(), 12);
        assert!(parse_u64("zz").is_err());
        assert_eq!(parse_bits("0x1_0000000000000000".replace('_', "").as_str()).unwrap(), vec![0, 1]);
        assert_eq!(parse_bits("37").unwrap(), vec![37]);
        assert_eq!(parse_list::<usize>("3, 5,7").unwrap(), vec![3, 5, 7]);
        assert!(parse_list::<usize>("3,x").is_err());
    }

    #[test]
    fn tables() {
        assert_eq!(truth_table("00010111", None).unwrap(), TruthTable::majority(3).unwrap());
        assert_eq!(truth_table("0xe8", None).unwrap(), TruthTable::majority(3).unwrap());
        assert_eq!(truth_table("0x6", Some(2)).unwrap().n(), 2);
    }
}
