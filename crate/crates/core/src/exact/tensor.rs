//! Level-`n` tensors in `(ℝ²)^⊗n` with polynomial entries.
//!
//! Entry index `k` encodes the word `w = (i₁…iₙ)` over `{1, 2}` in
//! lexicographic order: letter `i₁` is the most significant bit, letter `1`
//! is bit `0`. So at level 2 the order is `11, 12, 21, 22`.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use super::poly::Poly2;
use crate::error::{Error, Result};

/// Letters of the word at index `idx`, each `0` (for `e₁`) or `1` (for `e₂`).
pub fn word_letters(level: usize, idx: usize) -> impl Iterator<Item = usize> {
    (0..level).rev().map(move |b| (idx >> b) & 1)
}

/// Word at index `idx` as a string over `"12"`.
pub fn word_string(level: usize, idx: usize) -> String {
    word_letters(level, idx)
        .map(|l| if l == 0 { '1' } else { '2' })
        .collect()
}

pub fn parse_word(s: &str) -> Result<(usize, usize)> {
    let mut idx = 0usize;
    for ch in s.chars() {
        let bit = match ch {
            '1' => 0,
            '2' => 1,
            _ => return Err(Error::Parse(format!("word {s:?} must be over the letters 1, 2"))),
        };
        idx = (idx << 1) | bit;
    }
    Ok((s.len(), idx))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorPoly {
    level: usize,
    entries: Vec<Poly2>,
}

impl TensorPoly {
    pub fn zero(level: usize) -> Self {
        Self {
            level,
            entries: vec![Poly2::zero(); 1 << level],
        }
    }

    pub fn scalar(p: Poly2) -> Self {
        Self {
            level: 0,
            entries: vec![p],
        }
    }

    pub fn from_entries(level: usize, entries: Vec<Poly2>) -> Result<Self> {
        if entries.len() != 1 << level {
            return Err(Error::InvalidArgument(format!(
                "level {level} needs {} entries, got {}",
                1usize << level,
                entries.len()
            )));
        }
        Ok(Self { level, entries })
    }

    /// Basis tensor `e_{i₁} ⊗ … ⊗ e_{iₙ}` with constant entry 1.
    pub fn basis(level: usize, idx: usize) -> Self {
        let mut t = Self::zero(level);
        t.entries[idx] = Poly2::one();
        t
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn entries(&self) -> &[Poly2] {
        &self.entries
    }

    pub fn entry(&self, idx: usize) -> &Poly2 {
        &self.entries[idx]
    }

    pub fn entry_mut(&mut self, idx: usize) -> &mut Poly2 {
        &mut self.entries[idx]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly2::is_zero)
    }

    /// Applies `f` to every entry.
    pub fn map(&self, f: impl Fn(&Poly2) -> Poly2) -> Self {
        Self {
            level: self.level,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl fmt::Display for TensorPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, p) in self.entries.iter().enumerate() {
            if !p.is_zero() {
                writeln!(f, "[{}] {}", word_string(self.level, idx), p)?;
            }
        }
        Ok(())
    }
}

// JSON form: {"level": n, "entries": {"12": [[i, j, "num/den"], ...], ...}}
impl Serialize for TensorPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let entries: BTreeMap<String, &Poly2> = self
            .entries
            .iter()
            .enumerate()
            .map(|(idx, p)| (word_string(self.level, idx), p))
            .collect();
        let mut st = s.serialize_struct("TensorPoly", 2)?;
        st.serialize_field("level", &self.level)?;
        st.serialize_field("entries", &entries)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for TensorPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            level: usize,
            entries: BTreeMap<String, Poly2>,
        }
        let raw = Raw::deserialize(d)?;
        if raw.level > 24 {
            return Err(de::Error::custom("tensor level too large"));
        }
        let mut t = TensorPoly::zero(raw.level);
        for (w, p) in raw.entries {
            let (len, idx) = parse_word(&w).map_err(de::Error::custom)?;
            if len != raw.level {
                return Err(de::Error::custom(format!("word {w:?} does not have length {}", raw.level)));
            }
            t.entries[idx] = p;
        }
        Ok(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat::rat;

    #[test]
    fn lexicographic_word_order() {
        let words: Vec<_> = (0..4).map(|i| word_string(2, i)).collect();
        assert_eq!(words, ["11", "12", "21", "22"]);
        assert_eq!(word_string(0, 0), "");
        assert_eq!(parse_word("21").unwrap(), (2, 2));
        assert!(parse_word("13").is_err());
    }

    #[test]
    fn entry_count_enforced() {
        assert!(TensorPoly::from_entries(2, vec![Poly2::zero(); 3]).is_err());
        assert_eq!(TensorPoly::zero(3).entries().len(), 8);
        assert_eq!(TensorPoly::zero(0).entries().len(), 1);
    }

    #[test]
    fn json_shape() {
        let mut t = TensorPoly::zero(1);
        *t.entry_mut(1) = Poly2::constant(rat(1, 2));
        let v = serde_json::to_value(&t).unwrap();
        assert_eq!(v["level"], 1);
        assert_eq!(v["entries"]["1"], serde_json::json!([]));
        assert_eq!(v["entries"]["2"], serde_json::json!([[0, 0, "1/2"]]));
        let back: TensorPoly = serde_json::from_value(v).unwrap();
        assert_eq!(back, t);
    }
}
