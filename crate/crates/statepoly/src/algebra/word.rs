//! Canonical symbolic words: free words, state symbols and their products.

use smallvec::SmallVec;
use std::cmp::Ordering;
use std::fmt;

/// Variable index, `0..n`.
pub type Var = u32;

/// A word in the free monoid over letters `x1..xn`. The empty word is the
/// unit.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct NcWord {
    letters: SmallVec<[Var; 8]>,
}

impl NcWord {
    pub fn empty() -> Self {
        NcWord {
            letters: SmallVec::new(),
        }
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Var>) -> Self {
        NcWord {
            letters: letters.into_iter().collect(),
        }
    }

    pub fn letter(v: Var) -> Self {
        NcWord::from_letters([v])
    }

    pub fn letters(&self) -> &[Var] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Involution: reverses the word. An anti-automorphism on concatenation.
    pub fn involution(&self) -> Self {
        NcWord {
            letters: self.letters.iter().rev().copied().collect(),
        }
    }

    /// Concatenation.
    pub fn concat(&self, other: &NcWord) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        NcWord { letters }
    }

    /// Largest variable index occurring, if any.
    pub fn max_var(&self) -> Option<Var> {
        self.letters.iter().copied().max()
    }

    /// Degree-lexicographic order: first by length, then lexicographically.
    pub fn deglex_cmp(&self, other: &NcWord) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.letters.cmp(&other.letters))
    }
}

impl Ord for NcWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.deglex_cmp(other)
    }
}

impl PartialOrd for NcWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for NcWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "1");
        }
        for (i, v) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "x{}", v + 1)?;
        }
        Ok(())
    }
}

/// A state symbol `s(w)`, canonical under `s(w) = s(w*)`: the representative
/// is the deglex minimum of the word and its reversal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SSymbol {
    rep: NcWord,
}

impl SSymbol {
    /// Canonicalizes `w` (must be nonempty) into a state symbol.
    pub fn new(w: NcWord) -> Self {
        assert!(!w.is_empty(), "state symbol of the empty word");
        let r = w.involution();
        SSymbol {
            rep: if r < w { r } else { w },
        }
    }

    /// Builds a symbol from a word already known to be canonical.
    pub(crate) fn from_canonical(rep: NcWord) -> Self {
        SSymbol { rep }
    }

    pub fn rep(&self) -> &NcWord {
        &self.rep
    }

    pub fn degree(&self) -> usize {
        self.rep.len()
    }
}

impl fmt::Debug for SSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s({:?})", self.rep)
    }
}

/// A product of state symbols, canonical as a sorted multiset. The empty
/// product is the unit of the commutative polynomial ring.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SWord {
    factors: Vec<SSymbol>,
}

impl SWord {
    pub fn one() -> Self {
        SWord::default()
    }

    pub fn single(sym: SSymbol) -> Self {
        SWord {
            factors: vec![sym],
        }
    }

    pub fn from_factors(mut factors: Vec<SSymbol>) -> Self {
        factors.sort();
        SWord { factors }
    }

    pub fn factors(&self) -> &[SSymbol] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(|s| s.degree()).sum()
    }

    /// Multiset union.
    pub fn mul(&self, other: &SWord) -> SWord {
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        factors.extend_from_slice(&self.factors);
        factors.extend_from_slice(&other.factors);
        SWord::from_factors(factors)
    }

    /// Appends one symbol.
    pub fn push(&self, sym: SSymbol) -> SWord {
        let mut factors = self.factors.clone();
        factors.push(sym);
        SWord::from_factors(factors)
    }

    /// True if `other` is contained in `self` as a multiset.
    pub fn contains_multiset(&self, other: &SWord) -> bool {
        // Both factor lists are sorted.
        let mut it = self.factors.iter();
        'outer: for want in &other.factors {
            for have in it.by_ref() {
                match have.cmp(want) {
                    Ordering::Less => continue,
                    Ordering::Equal => continue 'outer,
                    Ordering::Greater => return false,
                }
            }
            return false;
        }
        true
    }

    pub fn max_var(&self) -> Option<Var> {
        self.factors.iter().filter_map(|s| s.rep().max_var()).max()
    }
}

impl Ord for SWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.factors.cmp(&other.factors))
    }
}

impl PartialOrd for SWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for SWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for (i, s) in self.factors.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            write!(f, "{:?}", s)?;
        }
        Ok(())
    }
}

/// A scalar S-word times a free word tail; the monomial basis of nc state
/// polynomials.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct NcsWord {
    pub scalar: SWord,
    pub tail: NcWord,
}

impl NcsWord {
    pub fn one() -> Self {
        NcsWord::default()
    }

    pub fn new(scalar: SWord, tail: NcWord) -> Self {
        NcsWord { scalar, tail }
    }

    pub fn from_word(tail: NcWord) -> Self {
        NcsWord {
            scalar: SWord::one(),
            tail,
        }
    }

    pub fn from_scalar(scalar: SWord) -> Self {
        NcsWord {
            scalar,
            tail: NcWord::empty(),
        }
    }

    pub fn degree(&self) -> usize {
        self.scalar.degree() + self.tail.len()
    }

    pub fn is_one(&self) -> bool {
        self.scalar.is_one() && self.tail.is_empty()
    }

    /// Involution fixes the scalar part and reverses the tail.
    pub fn involution(&self) -> Self {
        NcsWord {
            scalar: self.scalar.clone(),
            tail: self.tail.involution(),
        }
    }

    /// Product: scalars multiply as multisets, tails concatenate.
    pub fn mul(&self, other: &NcsWord) -> NcsWord {
        NcsWord {
            scalar: self.scalar.mul(&other.scalar),
            tail: self.tail.concat(&other.tail),
        }
    }

    pub fn max_var(&self) -> Option<Var> {
        self.scalar.max_var().max(self.tail.max_var())
    }
}

impl Ord for NcsWord {
    /// Degree first; ties broken by the tail letter sequence, then the
    /// scalar multiset. This is the basis order used everywhere.
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.tail.letters().cmp(other.tail.letters()))
            .then_with(|| self.scalar.factors.cmp(&other.scalar.factors))
    }
}

impl PartialOrd for NcsWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for NcsWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.scalar.is_one(), self.tail.is_empty()) {
            (true, true) => write!(f, "1"),
            (true, false) => write!(f, "{:?}", self.tail),
            (false, true) => write!(f, "{:?}", self.scalar),
            (false, false) => write!(f, "{:?}*{:?}", self.scalar, self.tail),
        }
    }
}
