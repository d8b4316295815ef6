//! Signed-alphabet words: free reduction, cyclic reduction and canonical
//! necklace storage for relator boundaries.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator or its inverse.
///
/// Ordering is by generator index, then sign (positive first). This order
/// defines the canonical rotation of a [`CyclicWord`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub generator: u32,
    pub inverse: bool,
}

impl Letter {
    pub const fn pos(generator: u32) -> Self {
        Self {
            generator,
            inverse: false,
        }
    }

    pub const fn neg(generator: u32) -> Self {
        Self {
            generator,
            inverse: true,
        }
    }

    #[inline]
    pub fn inv(self) -> Self {
        Self {
            generator: self.generator,
            inverse: !self.inverse,
        }
    }

    /// Signed 1-based index: `g+1` for forward, `-(g+1)` for inverse.
    pub fn signed(self) -> i64 {
        let v = self.generator as i64 + 1;
        if self.inverse {
            -v
        } else {
            v
        }
    }

    pub fn from_signed(v: i64) -> Result<Self> {
        if v == 0 {
            return Err(Error::ZeroIndex);
        }
        let generator = u32::try_from(v.unsigned_abs() - 1).map_err(|_| Error::ZeroIndex)?;
        Ok(Self {
            generator,
            inverse: v < 0,
        })
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "g{}'", self.generator)
        } else {
            write!(f, "g{}", self.generator)
        }
    }
}

impl Serialize for Letter {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i64(self.signed())
    }
}

impl<'de> Deserialize<'de> for Letter {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Letter::from_signed(v).map_err(serde::de::Error::custom)
    }
}

/// A finite word over signed letters. Not necessarily reduced.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self(letters)
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn is_reduced(&self) -> bool {
        self.0.windows(2).all(|p| p[0] != p[1].inv())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inv()).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `self^k` for `k >= 0`.
    pub fn pow(&self, k: usize) -> Word {
        Word(self.0.repeat(k))
    }

    pub fn rotate(&self, k: usize) -> Word {
        if self.0.is_empty() {
            return self.clone();
        }
        let mut v = self.0.clone();
        v.rotate_left(k % self.0.len());
        Word(v)
    }

    /// Unique freely reduced representative.
    pub fn free_reduce(&self) -> Word {
        free_reduce(&self.0)
    }
}

impl From<Vec<Letter>> for Word {
    fn from(v: Vec<Letter>) -> Self {
        Word(v)
    }
}

impl FromIterator<Letter> for Word {
    fn from_iter<I: IntoIterator<Item = Letter>>(iter: I) -> Self {
        Word(iter.into_iter().collect())
    }
}

pub fn free_reduce(letters: &[Letter]) -> Word {
    let mut out: Vec<Letter> = Vec::with_capacity(letters.len());
    for &l in letters {
        if out.last() == Some(&l.inv()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    Word(out)
}

/// A cyclically reduced word stored in its lexicographically least rotation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct CyclicWord(Vec<Letter>);

impl CyclicWord {
    /// Build from a word that is already freely and cyclically reduced.
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.is_empty() {
            return Err(Error::EmptyWord);
        }
        let w = Word(letters);
        if !w.is_reduced() || w.0[0] == w.0[w.len() - 1].inv() {
            return Err(Error::NotCyclicallyReduced);
        }
        let k = least_rotation(&w.0);
        let mut v = w.0;
        v.rotate_left(k);
        Ok(Self(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn to_word(&self) -> Word {
        Word(self.0.clone())
    }

    pub fn invert(&self) -> CyclicWord {
        let v: Vec<Letter> = self.0.iter().rev().map(|l| l.inv()).collect();
        let k = least_rotation(&v);
        let mut v = v;
        v.rotate_left(k);
        CyclicWord(v)
    }

    /// Letter-by-letter inverse of the stored representative, without
    /// re-canonicalizing.
    pub fn inverse_letters(&self) -> Vec<Letter> {
        self.0.iter().rev().map(|l| l.inv()).collect()
    }

    /// All `|w|` rotations of the stored representative, in offset order.
    pub fn rotations(&self) -> Vec<Word> {
        (0..self.0.len())
            .map(|k| {
                let mut v = self.0.clone();
                v.rotate_left(k);
                Word(v)
            })
            .collect()
    }
}

impl<'de> Deserialize<'de> for CyclicWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<Letter>::deserialize(d)?;
        CyclicWord::new(v).map_err(serde::de::Error::custom)
    }
}

/// Split `w` as `conjugator · core · conjugator⁻¹` with `core` cyclically
/// reduced. The conjugator absorbs the rotation that brings the core to
/// its canonical storage, so the identity holds letter-for-letter in the
/// free group.
pub fn cyclic_reduce(w: &Word) -> Result<(CyclicWord, Word)> {
    let r = w.free_reduce();
    if r.is_empty() {
        return Err(Error::EmptyWord);
    }
    let v = r.0;
    let (mut lo, mut hi) = (0usize, v.len());
    while hi - lo >= 2 && v[lo] == v[hi - 1].inv() {
        lo += 1;
        hi -= 1;
    }
    let core = &v[lo..hi];
    let k = least_rotation(core);
    let mut conj: Vec<Letter> = v[..lo].to_vec();
    conj.extend_from_slice(&core[..k]);
    let mut stored = core.to_vec();
    stored.rotate_left(k);
    Ok((CyclicWord(stored), free_reduce(&conj)))
}

/// Offset of the lexicographically least rotation (Booth's algorithm).
pub fn least_rotation<T: Ord>(s: &[T]) -> usize {
    let n = s.len();
    if n == 0 {
        return 0;
    }
    let mut f = vec![-1isize; 2 * n];
    let mut k = 0usize;
    for j in 1..2 * n {
        let sj = &s[j % n];
        let mut i = f[j - k - 1];
        while i != -1 && *sj != s[(k + i as usize + 1) % n] {
            if *sj < s[(k + i as usize + 1) % n] {
                k = j - i as usize - 1;
            }
            i = f[i as usize];
        }
        // here i == -1 or the letters match
        if i == -1 && *sj != s[k % n] {
            if *sj < s[k % n] {
                k = j;
            }
            f[j - k] = -1;
        } else {
            f[j - k] = i + 1;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const A: Letter = Letter::pos(0);
    const B: Letter = Letter::pos(1);
    const C: Letter = Letter::pos(2);

    fn w(v: &[Letter]) -> Word {
        Word(v.to_vec())
    }

    #[test]
    fn free_reduce_examples() {
        assert_eq!(w(&[A, A.inv()]).free_reduce(), Word::empty());
        assert_eq!(w(&[A, B, B.inv(), A]).free_reduce(), w(&[A, A]));
        assert_eq!(w(&[A, B, A.inv()]).free_reduce(), w(&[A, B, A.inv()]));
    }

    #[test]
    fn cyclic_reduce_examples() {
        let (core, conj) = cyclic_reduce(&w(&[A, B, A.inv()])).unwrap();
        assert_eq!(core.letters(), &[B]);
        assert_eq!(conj, w(&[A]));

        let (core, conj) = cyclic_reduce(&w(&[A, B])).unwrap();
        assert_eq!(core.letters(), &[A, B]);
        assert!(conj.is_empty());

        let (core, conj) = cyclic_reduce(&w(&[A.inv(), B, B, A])).unwrap();
        assert_eq!(core.letters(), &[B, B]);
        assert_eq!(conj, w(&[A.inv()]));

        assert!(matches!(
            cyclic_reduce(&w(&[A, B, B.inv(), A.inv()])),
            Err(Error::EmptyWord)
        ));
    }

    #[test]
    fn invert_and_rotations() {
        let ab = CyclicWord::new(vec![A, B]).unwrap();
        assert_eq!(ab.invert(), CyclicWord::new(vec![B.inv(), A.inv()]).unwrap());
        let abc = CyclicWord::new(vec![A, B, C]).unwrap();
        let rots = abc.rotations();
        assert_eq!(rots, vec![w(&[A, B, C]), w(&[B, C, A]), w(&[C, A, B])]);
        let x = CyclicWord::new(vec![A, B, A, B, B]).unwrap();
        assert_eq!(x.invert().invert(), x);
    }

    #[test]
    fn rejects_unreduced() {
        assert!(CyclicWord::new(vec![A, B, A.inv()]).is_err());
        assert!(CyclicWord::new(vec![A, A.inv(), B]).is_err());
        assert!(CyclicWord::new(vec![]).is_err());
    }

    fn letter() -> impl Strategy<Value = Letter> {
        (0u32..3, any::<bool>()).prop_map(|(g, i)| Letter {
            generator: g,
            inverse: i,
        })
    }

    fn brute_least_rotation(s: &[Letter]) -> Vec<Letter> {
        (0..s.len())
            .map(|k| {
                let mut v = s.to_vec();
                v.rotate_left(k);
                v
            })
            .min()
            .unwrap()
    }

    proptest! {
        #[test]
        fn free_reduce_idempotent(v in proptest::collection::vec(letter(), 0..30)) {
            let r = free_reduce(&v);
            prop_assert!(r.len() <= v.len());
            prop_assert!(r.is_reduced());
            prop_assert_eq!(r.free_reduce(), r);
        }

        #[test]
        fn booth_matches_brute_force(v in proptest::collection::vec(letter(), 1..20)) {
            let k = least_rotation(&v);
            let mut r = v.clone();
            r.rotate_left(k);
            prop_assert_eq!(r, brute_least_rotation(&v));
        }

        #[test]
        fn construction_is_rotation_invariant(v in proptest::collection::vec(letter(), 1..20), k in 0usize..20) {
            if let Ok((cw, _)) = cyclic_reduce(&Word(v)) {
                let rotated = cw.to_word().rotate(k);
                let again = CyclicWord::new(rotated.0).unwrap();
                prop_assert_eq!(again, cw.clone());
                prop_assert_eq!(cw.invert().invert(), cw);
            }
        }

        #[test]
        fn cyclic_reduce_conjugation_identity(v in proptest::collection::vec(letter(), 1..20)) {
            let word = Word(v);
            if let Ok((core, conj)) = cyclic_reduce(&word) {
                let back = conj.concat(&core.to_word()).concat(&conj.inverse()).free_reduce();
                prop_assert_eq!(back, word.free_reduce());
            }
        }
    }
}
