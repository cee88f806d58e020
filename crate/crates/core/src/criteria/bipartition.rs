use std::fmt;
use std::str::FromStr;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::states::PartySystem;
use crate::{Error, Result};

/// Split of parties `{0, …, n−1}` into two nonempty groups.
///
/// Both sides are kept sorted. Parties are 0-based in the API; `Display`,
/// parsing and serialization use 1-based labels (`"1|23"`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bipartition {
    left: Vec<usize>,
    right: Vec<usize>,
}

impl Bipartition {
    pub fn new(mut left: Vec<usize>, mut right: Vec<usize>, n: usize) -> Result<Self> {
        if left.is_empty() || right.is_empty() {
            return Err(Error::InvalidBipartition("both sides must be nonempty".into()));
        }
        left.sort_unstable();
        right.sort_unstable();
        let mut seen = vec![false; n];
        for &p in left.iter().chain(&right) {
            if p >= n {
                return Err(Error::PartyOutOfRange { party: p, n });
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidBipartition(format!(
                    "party {} appears twice",
                    p + 1
                )));
            }
        }
        if let Some(p) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidBipartition(format!(
                "party {} is on neither side",
                p + 1
            )));
        }
        Ok(Bipartition { left, right })
    }

    /// Parses `"1|234"`, `"12|34"` or `"1,2|3,4"` (1-based labels).
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let (l, r) = text
            .split_once('|')
            .ok_or_else(|| Error::InvalidBipartition(format!("missing '|' in {text:?}")))?;
        let side = |s: &str| -> Result<Vec<usize>> {
            let s = s.trim();
            let labels: Vec<&str> = if s.contains(',') {
                s.split(',').map(str::trim).collect()
            } else {
                s.split("").filter(|c| !c.is_empty()).collect()
            };
            labels
                .into_iter()
                .map(|lab| match lab.parse::<usize>() {
                    Ok(v) if v >= 1 => Ok(v - 1),
                    _ => Err(Error::InvalidBipartition(format!("bad party label {lab:?}"))),
                })
                .collect()
        };
        Bipartition::new(side(l)?, side(r)?, n)
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn parties(&self) -> usize {
        self.left.len() + self.right.len()
    }

    /// Smaller side first; on a tie the side holding party 0 goes left.
    pub fn canonical(&self) -> Self {
        let swap = self.left.len() > self.right.len()
            || (self.left.len() == self.right.len() && self.left[0] > self.right[0]);
        if swap {
            Bipartition {
                left: self.right.clone(),
                right: self.left.clone(),
            }
        } else {
            self.clone()
        }
    }

    pub fn is_canonical(&self) -> bool {
        *self == self.canonical()
    }

    pub fn check_system(&self, system: &PartySystem) -> Result<()> {
        if system.parties() != self.parties() {
            return Err(Error::DimensionMismatch(format!(
                "bipartition {self} covers {} parties but the system has {}",
                self.parties(),
                system.parties()
            )));
        }
        Ok(())
    }

    /// Every canonical bipartition with `|left| ≤ ⌊n/2⌋`, ordered by left
    /// size and then lexicographically: `1|23, 2|13, 3|12` for `n = 3`.
    pub fn all_canonical(n: usize) -> Vec<Bipartition> {
        let mut out = Vec::new();
        for k in 1..=n / 2 {
            for left in combinations(n, k) {
                if 2 * k == n && left[0] != 0 {
                    continue;
                }
                let right = (0..n).filter(|p| !left.contains(p)).collect();
                out.push(Bipartition { left, right });
            }
        }
        out
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for p in start..n {
            cur.push(p);
            rec(p + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::with_capacity(k), &mut out);
    out
}

fn write_side(f: &mut fmt::Formatter<'_>, side: &[usize], wide: bool) -> fmt::Result {
    let labels: Vec<String> = side.iter().map(|p| (p + 1).to_string()).collect();
    f.write_str(&labels.join(if wide { "," } else { "" }))
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.parties() > 9;
        write_side(f, &self.left, wide)?;
        f.write_str("|")?;
        write_side(f, &self.right, wide)
    }
}

impl FromStr for Bipartition {
    type Err = Error;

    /// Infers `n` from the labels present.
    fn from_str(s: &str) -> Result<Self> {
        let n = s
            .chars()
            .filter(|c| *c != '|' && *c != ',' && !c.is_whitespace())
            .count();
        let n = if s.contains(',') {
            s.split(['|', ',']).count()
        } else {
            n
        };
        Bipartition::parse(s, n)
    }
}

impl Serialize for Bipartition {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let one = |v: &[usize]| v.iter().map(|p| p + 1).collect::<Vec<_>>();
        let mut st = serializer.serialize_struct("Bipartition", 2)?;
        st.serialize_field("left", &one(&self.left))?;
        st.serialize_field("right", &one(&self.right))?;
        st.end()
    }
}
