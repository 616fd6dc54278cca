use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported variable count (a 2^20-entry table).
pub const MAX_VARS: usize = 20;

/// A boolean function `g: {0,1}^n -> {0,1}` stored as a packed table.
///
/// Entry `z` holds `g(z)` where variable `z_j` (1-based) is bit `j-1` of `z`,
/// so `z_1` is the least-significant bit. Bits past `2^n` in the last word are
/// kept at zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

fn word_count(n: usize) -> usize {
    (1usize << n).div_ceil(64)
}

fn tail_mask(n: usize) -> u64 {
    let len = 1usize << n;
    if len.is_multiple_of(64) {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

impl TruthTable {
    /// The constant-0 function on `n` variables.
    pub fn zeros(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::VariableCount(n));
        }
        Ok(TruthTable { n, words: vec![0; word_count(n)] })
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize) -> bool) -> Result<Self> {
        let mut t = Self::zeros(n)?;
        for z in 0..t.len() {
            if f(z) {
                t.words[z >> 6] |= 1 << (z & 63);
            }
        }
        Ok(t)
    }

    /// Builds a table from packed words (entry `z` is bit `z % 64` of word `z / 64`).
    pub fn from_words(n: usize, words: Vec<u64>) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::VariableCount(n));
        }
        if words.len() != word_count(n) {
            return Err(Error::LengthMismatch { expected: 1 << n, actual: words.len() * 64 });
        }
        let mut t = TruthTable { n, words };
        t.clear_padding();
        Ok(t)
    }

    /// Builds a table from the low `2^n` bits of `value` (requires `n <= 6`).
    pub fn from_u64(n: usize, value: u64) -> Result<Self> {
        if n > 6 {
            return Err(Error::VariableCount(n));
        }
        Self::from_words(n, vec![value])
    }

    /// Parses a binary string (first character is index 0) or a `0x`-prefixed
    /// hex string (big-endian nibbles, bit `z` of the number is `g(z)`).
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        if n == 0 || n > MAX_VARS {
            return Err(Error::VariableCount(n));
        }
        let text = text.trim();
        let len = 1usize << n;
        if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
            let nibbles = len.div_ceil(4);
            if hex.len() != nibbles {
                return Err(Error::LengthMismatch { expected: len, actual: hex.len() * 4 });
            }
            let mut t = Self::zeros(n)?;
            for (i, ch) in hex.chars().rev().enumerate() {
                let v = ch.to_digit(16).ok_or(Error::InvalidCharacter { ch, pos: 2 + nibbles - 1 - i })? as u64;
                for b in 0..4 {
                    let z = 4 * i + b;
                    if v >> b & 1 == 1 {
                        if z >= len {
                            return Err(Error::LengthMismatch { expected: len, actual: z + 1 });
                        }
                        t.words[z >> 6] |= 1 << (z & 63);
                    }
                }
            }
            Ok(t)
        } else {
            let count = text.chars().count();
            if count != len {
                return Err(Error::LengthMismatch { expected: len, actual: count });
            }
            let mut t = Self::zeros(n)?;
            for (z, ch) in text.chars().enumerate() {
                match ch {
                    '0' => {}
                    '1' => t.words[z >> 6] |= 1 << (z & 63),
                    _ => return Err(Error::InvalidCharacter { ch, pos: z }),
                }
            }
            Ok(t)
        }
    }

    /// Parses a table and infers `n` from the text length.
    pub fn parse_auto(text: &str) -> Result<Self> {
        let t = text.trim();
        let bits = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
            Some(hex) => {
                // One nibble covers n = 1 and n = 2.
                if hex.len() == 1 {
                    let v = hex
                        .chars()
                        .next()
                        .and_then(|c| c.to_digit(16))
                        .ok_or(Error::InvalidCharacter { ch: hex.chars().next().unwrap_or(' '), pos: 2 })?;
                    return Self::parse(t, if v < 4 { 1 } else { 2 });
                }
                hex.len() * 4
            }
            None => t.chars().count(),
        };
        if bits < 2 || !bits.is_power_of_two() {
            return Err(Error::LengthMismatch { expected: bits.next_power_of_two().max(2), actual: bits });
        }
        Self::parse(t, bits.trailing_zeros() as usize)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of entries, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, z: usize) -> bool {
        self.words[z >> 6] >> (z & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, z: usize, v: bool) {
        if v {
            self.words[z >> 6] |= 1 << (z & 63);
        } else {
            self.words[z >> 6] &= !(1 << (z & 63));
        }
    }

    /// Evaluates `g` at an assignment given as a bit slice `(z_1, ..., z_n)`.
    pub fn eval_bits(&self, bits: &[bool]) -> bool {
        let z = bits.iter().enumerate().fold(0, |acc, (j, &b)| acc | (usize::from(b) << j));
        self.get(z)
    }

    pub fn weight(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_constant(&self) -> bool {
        let w = self.weight();
        w == 0 || w == self.len() as u64
    }

    pub fn negated(&self) -> Self {
        let mut t = self.clone();
        for w in &mut t.words {
            *w = !*w;
        }
        t.clear_padding();
        t
    }

    pub fn xor(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "xor of tables with different variable counts");
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect();
        TruthTable { n: self.n, words }
    }

    /// The parity `z -> popcount(z & mask) mod 2`.
    pub fn parity(n: usize, mask: usize) -> Result<Self> {
        Self::from_fn(n, |z| (z & mask).count_ones() & 1 == 1)
    }

    /// The majority function on an odd number of variables.
    pub fn majority(n: usize) -> Result<Self> {
        if n.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!("majority is a single function only for odd n, got {n}")));
        }
        Self::from_fn(n, |z| 2 * z.count_ones() as usize > n)
    }

    /// Places a `k`-variable function on the variables `vars` (0-based) of an
    /// `n`-variable table; the remaining variables are ignored.
    pub fn embed(&self, vars: &[usize], n: usize) -> Result<Self> {
        if vars.len() != self.n || vars.iter().any(|&v| v >= n) {
            return Err(Error::InvalidArgument(format!(
                "cannot embed a {}-variable function on {vars:?} of {n} variables",
                self.n
            )));
        }
        Self::from_fn(n, |z| {
            let idx = vars.iter().enumerate().fold(0, |acc, (j, &v)| acc | ((z >> v & 1) << j));
            self.get(idx)
        })
    }

    /// Restricts to the variables `vars` (0-based), fixing every other variable to 0.
    pub fn restrict_to(&self, vars: &[usize]) -> Result<Self> {
        if vars.iter().any(|&v| v >= self.n) {
            return Err(Error::InvalidArgument(format!("variables {vars:?} out of range")));
        }
        Self::from_fn(vars.len(), |idx| {
            let z = vars.iter().enumerate().fold(0, |acc, (j, &v)| acc | ((idx >> j & 1) << v));
            self.get(z)
        })
    }

    /// The binary rendering, index 0 first.
    pub fn to_binary_string(&self) -> String {
        (0..self.len()).map(|z| if self.get(z) { '1' } else { '0' }).collect()
    }

    /// The `0x` hex rendering, big-endian nibbles.
    pub fn to_hex_string(&self) -> String {
        let nibbles = self.len().div_ceil(4);
        let mut s = String::with_capacity(nibbles + 2);
        s.push_str("0x");
        for i in (0..nibbles).rev() {
            let v = (self.words[(4 * i) >> 6] >> ((4 * i) & 63)) & 0xf;
            s.push(char::from_digit(v as u32, 16).unwrap());
        }
        s
    }

    fn clear_padding(&mut self) {
        let mask = tail_mask(self.n);
        if let Some(last) = self.words.last_mut() {
            *last &= mask;
        }
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruthTable(n={}, {})", self.n, self.to_hex_string())
    }
}

impl fmt::Display for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex_string())
    }
}

#[derive(Serialize, Deserialize)]
struct TableRepr {
    n: usize,
    bits: String,
}

impl Serialize for TruthTable {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TableRepr { n: self.n, bits: self.to_hex_string() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruthTable {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = TableRepr::deserialize(d)?;
        TruthTable::parse(&repr.bits, repr.n).map_err(serde::de::Error::custom)
    }
}
