use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use super::qstr;
use crate::error::{domain, Result};

/// A positive solution of `a^2 + b^2 + c^2 = 3abc`, stored sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawTriple", into = "RawTriple")]
pub struct MarkovTriple([BigInt; 3]);

#[derive(Serialize, Deserialize)]
struct RawTriple(#[serde(with = "qstr::integer_array")] [BigInt; 3]);

impl TryFrom<RawTriple> for MarkovTriple {
    type Error = String;
    fn try_from(raw: RawTriple) -> std::result::Result<Self, String> {
        let [a, b, c] = raw.0;
        MarkovTriple::new(a, b, c).map_err(|e| e.to_string())
    }
}

impl From<MarkovTriple> for RawTriple {
    fn from(t: MarkovTriple) -> Self {
        RawTriple(t.0)
    }
}

fn markov_holds(a: &BigInt, b: &BigInt, c: &BigInt) -> bool {
    a * a + b * b + c * c == BigInt::from(3) * a * b * c
}

/// True iff `(a, b, c)` satisfies the Markov equation. Entries must be positive.
pub fn is_markov(a: &BigInt, b: &BigInt, c: &BigInt) -> Result<bool> {
    if !a.is_positive() || !b.is_positive() || !c.is_positive() {
        return domain(format!("Markov entries must be positive, got ({a}, {b}, {c})"));
    }
    Ok(markov_holds(a, b, c))
}

impl MarkovTriple {
    pub fn new(a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<Self> {
        let mut v = [a.into(), b.into(), c.into()];
        if !is_markov(&v[0], &v[1], &v[2])? {
            return domain(format!("({}, {}, {}) is not a Markov triple", v[0], v[1], v[2]));
        }
        v.sort();
        Ok(MarkovTriple(v))
    }

    pub fn root() -> Self {
        MarkovTriple([BigInt::one(), BigInt::one(), BigInt::one()])
    }

    pub fn entries(&self) -> &[BigInt; 3] {
        &self.0
    }

    pub fn a(&self) -> &BigInt {
        &self.0[0]
    }

    pub fn b(&self) -> &BigInt {
        &self.0[1]
    }

    pub fn c(&self) -> &BigInt {
        &self.0[2]
    }

    pub fn max_entry(&self) -> &BigInt {
        &self.0[2]
    }

    pub fn product(&self) -> BigInt {
        &self.0[0] * &self.0[1] * &self.0[2]
    }

    /// The three weights `a^2, b^2, c^2` in slot order.
    pub fn weights(&self) -> [BigInt; 3] {
        [&self.0[0] * &self.0[0], &self.0[1] * &self.0[1], &self.0[2] * &self.0[2]]
    }
}

impl fmt::Display for MarkovTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.0[0], self.0[1], self.0[2])
    }
}

/// Replace the entry in `slot` by `3 * (product of the other two) - entry`.
///
/// Slots index the sorted representation. The result is re-sorted.
pub fn mutate(t: &MarkovTriple, slot: usize) -> MarkovTriple {
    mutate_tracked(t, slot).0
}

/// Like [`mutate`], also returning the slot where the new entry landed after
/// sorting. Mutating the result at that slot gives back `t`.
pub fn mutate_tracked(t: &MarkovTriple, slot: usize) -> (MarkovTriple, usize) {
    assert!(slot < 3, "slot must be 0, 1 or 2");
    let [x, y] = [&t.0[(slot + 1) % 3], &t.0[(slot + 2) % 3]];
    let replaced = BigInt::from(3) * x * y - &t.0[slot];
    let mut v = [x.clone(), y.clone()];
    v.sort();
    // insert after equal entries so that the slot is deterministic
    let pos = v.iter().filter(|e| **e <= replaced).count();
    let mut out = Vec::with_capacity(3);
    out.extend_from_slice(&v[..pos]);
    out.push(replaced);
    out.extend_from_slice(&v[pos..]);
    let out: [BigInt; 3] = out.try_into().expect("three entries");
    debug_assert!(markov_holds(&out[0], &out[1], &out[2]));
    (MarkovTriple(out), pos)
}

/// Breadth-first closure of `(1,1,1)` under mutation, keeping triples whose
/// largest entry is at most `max_entry`. Output is sorted.
pub fn enumerate_tree(max_entry: &BigInt) -> Result<Vec<MarkovTriple>> {
    if !max_entry.is_positive() {
        return domain(format!("max_entry must be >= 1, got {max_entry}"));
    }
    let mut seen = BTreeSet::new();
    let mut queue = VecDeque::new();
    let root = MarkovTriple::root();
    seen.insert(root.clone());
    queue.push_back(root);
    while let Some(t) = queue.pop_front() {
        for slot in 0..3 {
            let next = mutate(&t, slot);
            if next.max_entry() <= max_entry && !seen.contains(&next) {
                seen.insert(next.clone());
                queue.push_back(next);
            }
        }
    }
    Ok(seen.into_iter().collect())
}

/// `[m_0, ..., m_n]` with `m_0 = m_1 = m_2 = 1` and
/// `m_{k+2} = 3 m_{k+1} m_k - m_{k-1}`.
pub fn branch_sequence(n: usize) -> Vec<BigInt> {
    let mut m: Vec<BigInt> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let next = if k < 3 {
            BigInt::one()
        } else {
            BigInt::from(3) * &m[k - 1] * &m[k - 2] - &m[k - 3]
        };
        m.push(next);
    }
    m
}
