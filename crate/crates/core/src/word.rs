//! Words in the letters `x1..x9`, the canonical-shape test and enumeration.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{usage, Error, Result};

/// Highest admissible letter index.
pub const MAX_LETTER: u8 = 9;
/// Largest degree `enumerate_canonical` accepts.
pub const ENUMERATION_BOUND: usize = 10;

/// Nonempty word; letters are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if letters.is_empty() {
            return usage("empty word");
        }
        if let Some(&bad) = letters.iter().find(|&&l| l == 0 || l > MAX_LETTER) {
            return usage(format!("letter index {bad} outside 1..={MAX_LETTER}"));
        }
        Ok(Word(letters))
    }

    /// Panics on invalid input; for literals in code and tests.
    pub fn from_letters(letters: &[u8]) -> Self {
        Word::new(letters.to_vec()).expect("valid word")
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn deg(&self) -> usize {
        self.0.len()
    }

    pub fn deg_in(&self, letter: u8) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    /// Multidegree over letters `1..=d`.
    pub fn mdeg(&self, d: usize) -> Vec<usize> {
        let mut m = vec![0; d];
        for &l in &self.0 {
            if (l as usize) <= d {
                m[l as usize - 1] += 1;
            }
        }
        m
    }

    pub fn max_letter(&self) -> u8 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn rotate(&self, k: usize) -> Word {
        let mut v = self.0.clone();
        let len = v.len();
        v.rotate_left(k % len);
        Word(v)
    }

    /// Lexicographically least cyclic rotation.
    pub fn min_rotation(&self) -> Word {
        (0..self.deg()).map(|k| self.rotate(k)).min().expect("nonempty")
    }

    /// Occurrence shape of every letter that appears.
    pub fn shapes(&self) -> Vec<(u8, LetterShape)> {
        let letters: BTreeSet<u8> = self.0.iter().copied().collect();
        letters.into_iter().map(|l| (l, self.shape(l))).collect()
    }

    pub fn shape(&self, letter: u8) -> LetterShape {
        let pos: Vec<usize> = self.0.iter().enumerate().filter(|&(_, &l)| l == letter).map(|(i, _)| i).collect();
        match pos.as_slice() {
            [] => LetterShape::Absent,
            [_] => LetterShape::Single,
            [a, b] if b == &(a + 1) => LetterShape::Square,
            [a, b, c] if b == &(a + 1) && *c > b + 1 => LetterShape::SquareGapSingle,
            _ => LetterShape::NonCanonical,
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.shapes().iter().all(|(_, s)| *s != LetterShape::NonCanonical)
    }

    /// Parses `x1^2 x2 x1`-style text. Whitespace between factors is
    /// optional; exponents must be positive.
    pub fn parse(text: &str) -> Result<Word> {
        let s = text.as_bytes();
        let mut i = 0;
        let mut letters = Vec::new();
        let err = |pos: usize, msg: &str| Error::Parse { pos, msg: msg.to_string() };
        loop {
            while i < s.len() && s[i].is_ascii_whitespace() {
                i += 1;
            }
            if i == s.len() {
                break;
            }
            if s[i] != b'x' {
                return Err(err(i, "expected 'x'"));
            }
            i += 1;
            if i == s.len() || !(b'1'..=b'9').contains(&s[i]) {
                return Err(err(i, "expected a letter index 1..9"));
            }
            let letter = s[i] - b'0';
            i += 1;
            let mut exp = 1usize;
            if i < s.len() && s[i] == b'^' {
                i += 1;
                let start = i;
                while i < s.len() && s[i].is_ascii_digit() {
                    i += 1;
                }
                if start == i {
                    return Err(err(start, "expected an exponent"));
                }
                exp = std::str::from_utf8(&s[start..i])
                    .ok()
                    .and_then(|t| t.parse().ok())
                    .filter(|&e: &usize| e <= 64)
                    .ok_or_else(|| err(start, "exponent out of range"))?;
                if exp == 0 {
                    return Err(err(start, "exponent must be positive"));
                }
            }
            letters.extend(std::iter::repeat_n(letter, exp));
        }
        if letters.is_empty() {
            return Err(err(0, "empty word"));
        }
        Ok(Word(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut j = i;
            while j < self.0.len() && self.0[j] == l {
                j += 1;
            }
            parts.push(if j - i == 1 { format!("x{l}") } else { format!("x{l}^{}", j - i) });
            i = j;
        }
        write!(f, "{}", parts.join(" "))
    }
}

/// Occurrence pattern of one letter: `w1`, `w1 x w2`, `w1 x^2 w2`,
/// `w1 x^2 u x w2` (u nonempty), or none of these.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LetterShape {
    Absent,
    Single,
    Square,
    SquareGapSingle,
    NonCanonical,
}

/// Canonical words in letters `1..=d`: every degree up to `bound`, or only
/// multidegree `m` when given. With `cyclic`, one word per rotation class
/// (the least canonical rotation).
pub fn enumerate_canonical(d: usize, bound: usize, m: Option<&[usize]>, cyclic: bool) -> Result<Vec<Word>> {
    if bound > ENUMERATION_BOUND {
        return usage(format!("degree bound {bound} exceeds {ENUMERATION_BOUND}"));
    }
    if d == 0 || d > MAX_LETTER as usize {
        return usage(format!("letter count {d} outside 1..={MAX_LETTER}"));
    }
    if let Some(m) = m {
        if m.len() != d {
            return usage("multidegree length differs from the letter count");
        }
        if m.iter().sum::<usize>() > bound {
            return usage("multidegree exceeds the degree bound");
        }
    }
    let mut out = Vec::new();
    let degrees: Vec<usize> = match m {
        Some(m) => vec![m.iter().sum()],
        None => (1..=bound).collect(),
    };
    for deg in degrees {
        if deg == 0 {
            continue;
        }
        let mut words = Vec::new();
        let mut counts = vec![0usize; d];
        let mut cur = Vec::with_capacity(deg);
        extend_words(d, deg, m, &mut counts, &mut cur, &mut words);
        if cyclic {
            let mut seen = BTreeSet::new();
            for w in words {
                if seen.insert(w.min_rotation()) {
                    // the first canonical rotation met in lex order is the least
                    out.push(w);
                }
            }
        } else {
            out.extend(words);
        }
    }
    Ok(out)
}

fn extend_words(d: usize, deg: usize, m: Option<&[usize]>, counts: &mut [usize], cur: &mut Vec<u8>, out: &mut Vec<Word>) {
    if cur.len() == deg {
        let w = Word(cur.clone());
        if w.is_canonical() {
            out.push(w);
        }
        return;
    }
    for l in 1..=d {
        if let Some(m) = m {
            if counts[l - 1] == m[l - 1] {
                continue;
            }
        }
        // a letter occurring more than three times is never canonical
        if counts[l - 1] == 3 {
            continue;
        }
        counts[l - 1] += 1;
        cur.push(l as u8);
        extend_words(d, deg, m, counts, cur, out);
        cur.pop();
        counts[l - 1] -= 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Word {
        Word::parse(text).unwrap()
    }

    #[test]
    fn parse_and_print() {
        assert_eq!(w("x1^2 x2^2 x1").letters(), &[1, 1, 2, 2, 1]);
        assert_eq!(w("x1x2x1").letters(), &[1, 2, 1]);
        assert_eq!(w("x1^2 x2^2 x1").to_string(), "x1^2 x2^2 x1");
        assert_eq!(w(" x3 ").deg(), 1);
        assert!(matches!(Word::parse(""), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(Word::parse("x1^0"), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(Word::parse("x1 y2"), Err(Error::Parse { pos: 3, .. })));
        assert!(matches!(Word::parse("x0"), Err(Error::Parse { pos: 1, .. })));
        assert!(Word::new(vec![]).is_err());
    }

    #[test]
    fn canonical_shapes() {
        assert!(w("x1 x2 x3").is_canonical());
        assert!(!w("x1 x2 x1").is_canonical());
        assert_eq!(w("x1 x2 x1").shape(1), LetterShape::NonCanonical);
        assert!(w("x1^2 x2 x1").is_canonical());
        assert_eq!(w("x1^2 x2 x1").shape(1), LetterShape::SquareGapSingle);
        assert!(!w("x1^3").is_canonical());
        assert!(!w("x1 x2 x1^2").is_canonical());
        assert!(w("x2 x1^2 x3").is_canonical());
    }

    #[test]
    fn degrees() {
        let u = w("x1^2 x3 x1");
        assert_eq!(u.deg(), 4);
        assert_eq!(u.mdeg(3), vec![3, 0, 1]);
        assert_eq!(u.deg_in(3), 1);
        assert_eq!(w("x2 x1 x3").min_rotation(), w("x1 x3 x2"));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_canonical(1, 3, None, false).unwrap(), vec![w("x1"), w("x1^2")]);
        assert_eq!(enumerate_canonical(2, 2, Some(&[1, 1]), false).unwrap(), vec![w("x1 x2"), w("x2 x1")]);
        assert_eq!(enumerate_canonical(2, 2, Some(&[1, 1]), true).unwrap(), vec![w("x1 x2")]);
        let m222 = enumerate_canonical(3, 6, Some(&[2, 2, 2]), false).unwrap();
        assert!(m222.contains(&w("x1^2 x2^2 x3^2")));
        assert!(m222.contains(&w("x1^2 x3^2 x2^2")));
        assert!(enumerate_canonical(3, 11, None, false).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        for deg in 1..=6 {
            let all = enumerate_canonical(3, deg, None, false).unwrap();
            let mut brute = 0;
            let total = 3usize.pow(deg as u32);
            for code in 0..total {
                let mut c = code;
                let letters: Vec<u8> = (0..deg)
                    .map(|_| {
                        let l = (c % 3) as u8 + 1;
                        c /= 3;
                        l
                    })
                    .collect();
                if Word(letters).is_canonical() {
                    brute += 1;
                }
            }
            assert_eq!(all.iter().filter(|x| x.deg() == deg).count(), brute);
        }
    }
}
