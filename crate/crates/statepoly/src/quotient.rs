//! Rewriting of words into normal forms modulo structural relations.
//!
//! A [`QuotientContext`] declares, per variable, whether it is free, a
//! binary observable (`x^2 = 1`) or a projection (`x^2 = x`), which pairs of
//! variables commute, which pairs are orthogonal (`xy = yx = 0`), and an
//! optional network structure (a party per variable plus a shared-source
//! relation between parties) under which the state symbol factorizes over
//! parties that share no source.
//!
//! Relations are compiled into normal forms by substitution rather than into
//! pairs of SDP constraints, which keeps the downstream moment matrices
//! small. Rewriting repeats three moves until a fixed point: swapping
//! adjacent commuting letters towards the lexicographically least
//! representative, cancelling or collapsing equal letters that can be
//! brought together, and collapsing the whole word to zero on an orthogonal
//! pair. Confluence is enforced by tests, not assumed.

use crate::algebra::{NcWord, NcsWord, SSymbol, SWord, Var};
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuotientError {
    #[error("variable {0} out of range")]
    VarOutOfRange(Var),
    #[error("subgroup reduction requires an all-unitary (group) context")]
    NonGroupContext,
    #[error("invalid context: {0}")]
    Invalid(String),
}

/// Structural kind of a variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    /// No relation.
    Free,
    /// Binary observable: `x* = x`, `x^2 = 1`.
    Unitary,
    /// Projection: `x* = x`, `x^2 = x`.
    Projection,
}

/// Result of rewriting a word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalForm {
    /// The word collapsed to zero (an orthogonal pair met).
    Zero,
    /// The canonical representative.
    Word(NcWord),
}

impl NormalForm {
    pub fn word(self) -> Option<NcWord> {
        match self {
            NormalForm::Zero => None,
            NormalForm::Word(w) => Some(w),
        }
    }
}

/// Rewriting context; immutable once built.
#[derive(Debug, Clone)]
pub struct QuotientContext {
    n: usize,
    kinds: Vec<VarKind>,
    commute: Vec<bool>,
    orthogonal: Vec<bool>,
    party: Vec<u32>,
    n_parties: usize,
    shares_source: Vec<bool>,
    factorize: bool,
    tracial: bool,
}

impl QuotientContext {
    /// A free context on `n` variables: no relations at all.
    pub fn free(n: usize) -> Self {
        QuotientContext {
            n,
            kinds: vec![VarKind::Free; n],
            commute: vec![false; n * n],
            orthogonal: vec![false; n * n],
            party: (0..n as u32).collect(),
            n_parties: n,
            shares_source: vec![false; n * n],
            factorize: false,
            tracial: false,
        }
    }

    /// All variables of one kind, no commutation.
    pub fn uniform(n: usize, kind: VarKind) -> Self {
        let mut q = Self::free(n);
        q.kinds = vec![kind; n];
        q
    }

    pub fn n_vars(&self) -> usize {
        self.n
    }

    pub fn kind(&self, v: Var) -> VarKind {
        self.kinds[v as usize]
    }

    pub fn set_kind(&mut self, v: Var, kind: VarKind) {
        self.kinds[v as usize] = kind;
    }

    pub fn is_group(&self) -> bool {
        self.kinds.iter().all(|k| *k == VarKind::Unitary)
    }

    pub fn commutes(&self, a: Var, b: Var) -> bool {
        a != b && self.commute[a as usize * self.n + b as usize]
    }

    pub fn set_commute(&mut self, a: Var, b: Var) {
        assert_ne!(a, b, "commutation is irreflexive");
        self.commute[a as usize * self.n + b as usize] = true;
        self.commute[b as usize * self.n + a as usize] = true;
    }

    pub fn orthogonal(&self, a: Var, b: Var) -> bool {
        a != b && self.orthogonal[a as usize * self.n + b as usize]
    }

    /// Declares `ab = ba = 0`; implies that the pair commutes.
    pub fn set_orthogonal(&mut self, a: Var, b: Var) {
        assert_ne!(a, b);
        self.orthogonal[a as usize * self.n + b as usize] = true;
        self.orthogonal[b as usize * self.n + a as usize] = true;
        self.set_commute(a, b);
    }

    /// Installs the network structure: a party per variable and the
    /// symmetric "shares a source" relation between parties. Parties that
    /// share no source factorize under the state symbol.
    pub fn set_network(
        &mut self,
        party: Vec<u32>,
        n_parties: usize,
        shared_pairs: &[(u32, u32)],
    ) -> Result<(), QuotientError> {
        if party.len() != self.n {
            return Err(QuotientError::Invalid(
                "party assignment length mismatch".into(),
            ));
        }
        if let Some(&p) = party.iter().find(|&&p| p as usize >= n_parties) {
            return Err(QuotientError::Invalid(format!("party {} out of range", p)));
        }
        self.party = party;
        self.n_parties = n_parties;
        self.shares_source = vec![false; n_parties * n_parties];
        for &(a, b) in shared_pairs {
            self.shares_source[a as usize * n_parties + b as usize] = true;
            self.shares_source[b as usize * n_parties + a as usize] = true;
        }
        self.factorize = true;
        Ok(())
    }

    pub fn set_tracial(&mut self, tracial: bool) {
        self.tracial = tracial;
    }

    pub fn is_tracial(&self) -> bool {
        self.tracial
    }

    pub fn has_network(&self) -> bool {
        self.factorize
    }

    pub fn party(&self, v: Var) -> u32 {
        self.party[v as usize]
    }

    pub fn validate(&self) -> Result<(), QuotientError> {
        for a in 0..self.n {
            if self.commute[a * self.n + a] {
                return Err(QuotientError::Invalid(
                    "commutation must be irreflexive".into(),
                ));
            }
            for b in 0..self.n {
                if self.orthogonal[a * self.n + b] {
                    if !self.commute[a * self.n + b] {
                        return Err(QuotientError::Invalid(
                            "orthogonal pairs must commute".into(),
                        ));
                    }
                    if self.factorize && self.party[a] != self.party[b] {
                        return Err(QuotientError::Invalid(
                            "orthogonal pairs must lie within one party".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn check_range(&self, w: &NcWord) -> Result<(), QuotientError> {
        match w.max_var() {
            Some(v) if v as usize >= self.n => Err(QuotientError::VarOutOfRange(v)),
            _ => Ok(()),
        }
    }

    // -- rewriting ----------------------------------------------------------

    /// Rewrites `w` to its canonical representative, or to zero.
    pub fn normalize(&self, w: &NcWord) -> NormalForm {
        self.check_range(w).expect("letters within range");
        let mut letters: Vec<Var> = w.letters().to_vec();
        loop {
            match self.find_rewrite(&letters) {
                Some(Action::Zero) => return NormalForm::Zero,
                Some(Action::Delete2(i, j)) => {
                    letters.remove(j);
                    letters.remove(i);
                }
                Some(Action::Delete1(j)) => {
                    letters.remove(j);
                }
                None => {
                    let sorted = self.trace_sort(&letters);
                    if sorted == letters {
                        return NormalForm::Word(NcWord::from_letters(letters));
                    }
                    letters = sorted;
                }
            }
        }
    }

    /// Looks for a pair of positions that can be brought adjacent: two equal
    /// letters whose gap commutes with them (cancel or collapse), or an
    /// orthogonal pair (zero). Scans in both directions so a mixed gap that
    /// clears to either side is found.
    fn find_rewrite(&self, letters: &[Var]) -> Option<Action> {
        let len = letters.len();
        for i in 0..len {
            let x = letters[i];
            for j in (i + 1)..len {
                let y = letters[j];
                if y == x {
                    match self.kind(x) {
                        VarKind::Unitary => return Some(Action::Delete2(i, j)),
                        VarKind::Projection => return Some(Action::Delete1(j)),
                        VarKind::Free => {}
                    }
                } else if self.orthogonal(x, y) {
                    return Some(Action::Zero);
                }
                if !self.commutes(x, y) {
                    break;
                }
            }
        }
        for j in (0..len).rev() {
            let y = letters[j];
            for i in (0..j).rev() {
                let x = letters[i];
                if x != y && self.orthogonal(x, y) {
                    return Some(Action::Zero);
                }
                if !self.commutes(x, y) {
                    break;
                }
            }
        }
        None
    }

    /// Lexicographically least representative of the commutation class:
    /// repeatedly emit the least letter that can commute past its prefix.
    fn trace_sort(&self, letters: &[Var]) -> Vec<Var> {
        let mut remaining: Vec<Var> = letters.to_vec();
        let mut out = Vec::with_capacity(letters.len());
        while !remaining.is_empty() {
            let mut best: Option<usize> = None;
            for p in 0..remaining.len() {
                let movable = (0..p).all(|q| self.commutes(remaining[q], remaining[p]));
                if movable && best.map(|b| remaining[p] < remaining[b]).unwrap_or(true) {
                    best = Some(p);
                }
            }
            let b = best.expect("position 0 is always movable");
            out.push(remaining.remove(b));
        }
        out
    }

    // -- state symbol canonicalization --------------------------------------

    /// The involution image of a word in this context (all letter kinds are
    /// self-adjoint, so this is reversal).
    fn star(&self, w: &NcWord) -> NcWord {
        w.involution()
    }

    /// Connected components of the parties present in `w` under the
    /// shared-source relation; each component yields one factor.
    fn split_components(&self, w: &NcWord) -> Vec<NcWord> {
        if !self.factorize || w.is_empty() {
            return vec![w.clone()];
        }
        let mut present: Vec<u32> = w.letters().iter().map(|&v| self.party(v)).collect();
        present.sort_unstable();
        present.dedup();
        if present.len() <= 1 {
            return vec![w.clone()];
        }
        fn find(root: &mut Vec<usize>, i: usize) -> usize {
            if root[i] != i {
                let r = find(root, root[i]);
                root[i] = r;
            }
            root[i]
        }
        let mut root: Vec<usize> = (0..present.len()).collect();
        for a in 0..present.len() {
            for b in (a + 1)..present.len() {
                let pa = present[a] as usize;
                let pb = present[b] as usize;
                if self.shares_source[pa * self.n_parties + pb] {
                    let (ra, rb) = (find(&mut root, a), find(&mut root, b));
                    if ra != rb {
                        root[ra] = rb;
                    }
                }
            }
        }
        let mut comp_index: Vec<Option<usize>> = vec![None; present.len()];
        let mut split: Vec<Vec<Var>> = Vec::new();
        for &v in w.letters() {
            let p = self.party(v);
            let idx = present.binary_search(&p).unwrap();
            let r = find(&mut root, idx);
            let slot = match comp_index[r] {
                Some(s) => s,
                None => {
                    comp_index[r] = Some(split.len());
                    split.push(Vec::new());
                    split.len() - 1
                }
            };
            split[slot].push(v);
        }
        split.into_iter().map(NcWord::from_letters).collect()
    }

    /// Canonical representative of the state-symbol class of a normal word:
    /// the minimum over the word and its involution image (and, in tracial
    /// contexts, all cyclic rotations of both), each re-normalized.
    fn symbol_rep(&self, w: &NcWord) -> Option<NcWord> {
        let mut seen: HashSet<NcWord> = HashSet::new();
        let mut queue: Vec<NcWord> = vec![w.clone()];
        while let Some(cur) = queue.pop() {
            if !seen.insert(cur.clone()) {
                continue;
            }
            let mut candidates = vec![self.star(&cur)];
            if self.tracial {
                let l = cur.letters();
                for k in 1..l.len() {
                    let rot: Vec<Var> = l[k..].iter().chain(l[..k].iter()).copied().collect();
                    candidates.push(NcWord::from_letters(rot));
                }
            }
            for cand in candidates {
                match self.normalize(&cand) {
                    NormalForm::Zero => return None,
                    NormalForm::Word(nf) => {
                        if !seen.contains(&nf) {
                            queue.push(nf);
                        }
                    }
                }
            }
        }
        seen.into_iter().min()
    }

    /// Canonical S-word of the state symbol of `w`: normalizes, splits into
    /// factors over non-connected party components, and canonicalizes each
    /// factor. `None` means the value is zero; an empty word contributes the
    /// unit.
    pub fn canonical_state_symbol(&self, w: &NcWord) -> Option<SWord> {
        let nf = match self.normalize(w) {
            NormalForm::Zero => return None,
            NormalForm::Word(nf) => nf,
        };
        if nf.is_empty() {
            return Some(SWord::one());
        }
        let mut factors = Vec::new();
        for comp in self.split_components(&nf) {
            let comp = match self.normalize(&comp) {
                NormalForm::Zero => return None,
                NormalForm::Word(x) => x,
            };
            if comp.is_empty() {
                continue;
            }
            let rep = self.symbol_rep(&comp)?;
            if !rep.is_empty() {
                factors.push(SSymbol::from_canonical(rep));
            }
        }
        Some(SWord::from_factors(factors))
    }

    /// Canonicalizes every factor of an S-word through this context.
    pub fn canonical_sword(&self, s: &SWord) -> Option<SWord> {
        let mut factors: Vec<SSymbol> = Vec::new();
        for f in s.factors() {
            let sub = self.canonical_state_symbol(f.rep())?;
            factors.extend_from_slice(sub.factors());
        }
        Some(SWord::from_factors(factors))
    }

    /// Canonicalizes an NCS-word: scalar through [`Self::canonical_sword`],
    /// tail through [`Self::normalize`].
    pub fn canonical_ncs(&self, m: &NcsWord) -> Option<NcsWord> {
        let scalar = self.canonical_sword(&m.scalar)?;
        let tail = self.normalize(&m.tail).word()?;
        Some(NcsWord::new(scalar, tail))
    }

    /// Canonicalizes every term of a polynomial; terms that collapse to zero
    /// are dropped, coinciding terms merge.
    pub fn canonicalize_poly<C: crate::algebra::Coeff>(
        &self,
        f: &crate::algebra::NcStatePoly<C>,
    ) -> crate::algebra::NcStatePoly<C> {
        let mut out = crate::algebra::NcStatePoly::zero();
        for (m, c) in f.terms() {
            if let Some(nm) = self.canonical_ncs(m) {
                out.add_term(nm, c.clone());
            }
        }
        out
    }

    /// Likewise for state polynomials.
    pub fn canonicalize_state_poly<C: crate::algebra::Coeff>(
        &self,
        f: &crate::algebra::StatePoly<C>,
    ) -> crate::algebra::StatePoly<C> {
        let mut out = crate::algebra::StatePoly::zero();
        for (m, c) in f.terms() {
            if let Some(ns) = self.canonical_sword(m) {
                out.add_term(ns, c.clone());
            }
        }
        out
    }

    // -- subgroup closure ----------------------------------------------------

    /// Bounded closure of the subgroup generated by `gens`: all normal words
    /// of length at most `bound` (plus slack for detours) reachable by right
    /// multiplication with the generators and their inverses. Requires an
    /// all-unitary context.
    pub fn subgroup_closure(
        &self,
        gens: &[NcWord],
        bound: usize,
    ) -> Result<Subgroup, QuotientError> {
        if !self.is_group() {
            return Err(QuotientError::NonGroupContext);
        }
        let max_gen = gens.iter().map(|g| g.len()).max().unwrap_or(0);
        let cap = bound + max_gen + 2;
        let mut steps: Vec<NcWord> = Vec::new();
        for g in gens {
            if let NormalForm::Word(nf) = self.normalize(g) {
                if !nf.is_empty() {
                    steps.push(nf.clone());
                    steps.push(self.star(&nf));
                }
            }
        }
        steps.sort();
        steps.dedup();
        let mut members: HashSet<NcWord> = HashSet::new();
        let mut frontier: Vec<NcWord> = vec![NcWord::empty()];
        members.insert(NcWord::empty());
        while let Some(w) = frontier.pop() {
            for g in &steps {
                let prod = w.concat(g);
                if let NormalForm::Word(nf) = self.normalize(&prod) {
                    if nf.len() <= cap && !members.contains(&nf) {
                        members.insert(nf.clone());
                        frontier.push(nf);
                    }
                }
            }
        }
        Ok(Subgroup { members, bound })
    }
}

enum Action {
    Zero,
    Delete2(usize, usize),
    Delete1(usize),
}

/// Memoized bounded subgroup membership.
#[derive(Debug, Clone)]
pub struct Subgroup {
    members: HashSet<NcWord>,
    bound: usize,
}

impl Subgroup {
    /// Membership of a normal word; only reliable up to the closure bound.
    pub fn contains(&self, w: &NcWord) -> bool {
        self.members.contains(w)
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn w(letters: &[Var]) -> NcWord {
        NcWord::from_letters(letters.iter().copied())
    }

    /// Two unitary letters that commute.
    fn two_commuting_unitaries() -> QuotientContext {
        let mut q = QuotientContext::uniform(2, VarKind::Unitary);
        q.set_commute(0, 1);
        q
    }

    /// CHSH-style context: x1,x2,y1,y2 unitary; x's commute with y's.
    fn chsh_context() -> QuotientContext {
        let mut q = QuotientContext::uniform(4, VarKind::Unitary);
        for a in 0..2 {
            for b in 2..4 {
                q.set_commute(a, b);
            }
        }
        q
    }

    #[test]
    fn swap_and_cancel() {
        // xyx -> y when x and y commute and are unitary
        let q = two_commuting_unitaries();
        assert_eq!(q.normalize(&w(&[0, 1, 0])), NormalForm::Word(w(&[1])));
    }

    #[test]
    fn irreducible_word_stays() {
        let q = QuotientContext::uniform(2, VarKind::Unitary);
        let word = w(&[0, 1, 0, 1]);
        assert_eq!(q.normalize(&word), NormalForm::Word(word));
    }

    #[test]
    fn orthogonal_projections_vanish() {
        let mut q = QuotientContext::uniform(2, VarKind::Projection);
        q.set_orthogonal(0, 1);
        assert_eq!(q.normalize(&w(&[0, 1])), NormalForm::Zero);
        // and even with a commuting letter in between
        let mut q3 = QuotientContext::uniform(3, VarKind::Projection);
        q3.set_orthogonal(0, 1);
        q3.set_commute(0, 2);
        assert_eq!(q3.normalize(&w(&[0, 2, 1])), NormalForm::Zero);
    }

    #[test]
    fn projection_idempotent() {
        let q = QuotientContext::uniform(1, VarKind::Projection);
        assert_eq!(q.normalize(&w(&[0, 0, 0])), NormalForm::Word(w(&[0])));
    }

    #[test]
    fn lex_least_representative() {
        let q = chsh_context();
        // y1 x1 ~ x1 y1; the x-first form is least
        assert_eq!(q.normalize(&w(&[2, 0])), NormalForm::Word(w(&[0, 2])));
        // x2 y1 x1 -> x2 x1 y1 (x2 and x1 do not commute)
        assert_eq!(q.normalize(&w(&[1, 2, 0])), NormalForm::Word(w(&[1, 0, 2])));
    }

    #[test]
    fn normalize_idempotent_on_random_words() {
        let q = chsh_context();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let len = rng.gen_range(0..10);
            let word = NcWord::from_letters((0..len).map(|_| rng.gen_range(0..4u32)));
            if let NormalForm::Word(nf) = q.normalize(&word) {
                assert_eq!(q.normalize(&nf), NormalForm::Word(nf.clone()));
            }
        }
    }

    /// All single local rewrites applicable to a word in a context.
    fn local_rewrites(q: &QuotientContext, letters: &[Var]) -> Vec<Option<Vec<Var>>> {
        let mut out = Vec::new();
        for i in 0..letters.len().saturating_sub(1) {
            let (a, b) = (letters[i], letters[i + 1]);
            if a == b {
                match q.kind(a) {
                    VarKind::Unitary => {
                        let mut v = letters.to_vec();
                        v.drain(i..=i + 1);
                        out.push(Some(v));
                    }
                    VarKind::Projection => {
                        let mut v = letters.to_vec();
                        v.remove(i + 1);
                        out.push(Some(v));
                    }
                    VarKind::Free => {}
                }
            } else if q.orthogonal(a, b) {
                out.push(None); // zero
            } else if q.commutes(a, b) {
                let mut v = letters.to_vec();
                v.swap(i, i + 1);
                out.push(Some(v));
            }
        }
        out
    }

    fn check_confluence_on(q: &QuotientContext, word: &[Var]) {
        let base = q.normalize(&w(word));
        for rw in local_rewrites(q, word) {
            let got = match rw {
                None => NormalForm::Zero,
                Some(v) => q.normalize(&w(&v)),
            };
            assert_eq!(got, base, "word {:?}", word);
        }
    }

    /// Confluence: normalize is invariant under pre-composition with any
    /// single allowed rewrite. Exhaustive up to length 6.
    #[test]
    fn confluence_exhaustive_len6() {
        let proj = {
            let mut q = QuotientContext::uniform(3, VarKind::Projection);
            q.set_orthogonal(0, 1);
            q.set_commute(0, 2);
            q.set_commute(1, 2);
            q
        };
        for q in [chsh_context(), proj] {
            let n = q.n_vars() as u32;
            for len in 1..=6usize {
                let mut word = vec![0u32; len];
                loop {
                    check_confluence_on(&q, &word);
                    let mut k = len;
                    loop {
                        if k == 0 {
                            break;
                        }
                        k -= 1;
                        word[k] += 1;
                        if word[k] < n {
                            break;
                        }
                        word[k] = 0;
                    }
                    if word.iter().all(|&c| c == 0) {
                        break;
                    }
                }
            }
        }
    }

    #[test]
    fn confluence_random_len10() {
        let q = chsh_context();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..2000 {
            let len = rng.gen_range(0..=10);
            let word: Vec<Var> = (0..len).map(|_| rng.gen_range(0..4u32)).collect();
            check_confluence_on(&q, &word);
        }
    }

    #[test]
    fn star_homomorphism() {
        let q = chsh_context();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..500 {
            let lu = rng.gen_range(0..6);
            let lv = rng.gen_range(0..6);
            let u = NcWord::from_letters((0..lu).map(|_| rng.gen_range(0..4u32)));
            let v = NcWord::from_letters((0..lv).map(|_| rng.gen_range(0..4u32)));
            // normalize(uv) = normalize(normalize(u) normalize(v))
            let uv = q.normalize(&u.concat(&v));
            let nu = q.normalize(&u).word().unwrap();
            let nv = q.normalize(&v).word().unwrap();
            assert_eq!(uv, q.normalize(&nu.concat(&nv)));
            // normalize(w*) = normalize(w)*
            let word = u.concat(&v);
            let nf_star = q.normalize(&word.involution());
            let star_nf = q.normalize(&q.normalize(&word).word().unwrap().involution());
            assert_eq!(nf_star, star_nf);
        }
    }

    fn bilocal_context() -> QuotientContext {
        // parties A = {0}, B = {1}, C = {2}; sources A-B and B-C
        let mut q = QuotientContext::uniform(3, VarKind::Unitary);
        q.set_commute(0, 1);
        q.set_commute(1, 2);
        q.set_commute(0, 2);
        q.set_network(vec![0, 1, 2], 3, &[(0, 1), (1, 2)]).unwrap();
        q
    }

    #[test]
    fn factorization_splits_non_connected_parties() {
        let q = bilocal_context();
        // x*y*z stays one factor (all parties connected through B)
        let s = q.canonical_state_symbol(&w(&[0, 1, 2])).unwrap();
        assert_eq!(s.factors().len(), 1);
        // x*z splits into s(x)s(z)
        let s = q.canonical_state_symbol(&w(&[0, 2])).unwrap();
        assert_eq!(s.factors().len(), 2);
        assert_eq!(s.factors()[0].rep(), &w(&[0]));
        assert_eq!(s.factors()[1].rep(), &w(&[2]));
    }

    #[test]
    fn bipartite_single_component() {
        let mut q = QuotientContext::uniform(2, VarKind::Unitary);
        q.set_commute(0, 1);
        q.set_network(vec![0, 1], 2, &[(0, 1)]).unwrap();
        let s = q.canonical_state_symbol(&w(&[0, 1])).unwrap();
        assert_eq!(s.factors().len(), 1);
    }

    #[test]
    fn factor_labels_stable_under_commuting_reorder() {
        let q = bilocal_context();
        let a = q.canonical_state_symbol(&w(&[0, 2, 1]));
        let b = q.canonical_state_symbol(&w(&[2, 1, 0]));
        let c = q.canonical_state_symbol(&w(&[0, 1, 2]));
        assert_eq!(a, c);
        assert_eq!(b, c);
    }

    #[test]
    fn symbol_rep_uses_involution_class() {
        // s(x1x2) = s(x2x1) in the group on two letters
        let q = QuotientContext::uniform(2, VarKind::Unitary);
        let a = q.canonical_state_symbol(&w(&[0, 1])).unwrap();
        let b = q.canonical_state_symbol(&w(&[1, 0])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tracial_identifies_cyclic_rotations() {
        let mut q = QuotientContext::uniform(3, VarKind::Unitary);
        q.set_tracial(true);
        let a = q.canonical_state_symbol(&w(&[0, 1, 2])).unwrap();
        let b = q.canonical_state_symbol(&w(&[1, 2, 0])).unwrap();
        assert_eq!(a, b);
        let mut qf = QuotientContext::uniform(3, VarKind::Unitary);
        qf.set_tracial(false);
        let c = qf.canonical_state_symbol(&w(&[0, 1, 2])).unwrap();
        let d = qf.canonical_state_symbol(&w(&[1, 2, 0])).unwrap();
        assert_ne!(c, d);
    }

    #[test]
    fn subgroup_even_words() {
        // H = <x1x2> inside <x1, x2 | xi^2 = 1> is the even-length subgroup.
        let q = QuotientContext::uniform(2, VarKind::Unitary);
        let h = q.subgroup_closure(&[w(&[0, 1])], 6).unwrap();
        assert!(h.contains(&NcWord::empty()));
        assert!(h.contains(&w(&[0, 1])));
        assert!(h.contains(&w(&[1, 0])));
        assert!(h.contains(&w(&[0, 1, 0, 1])));
        assert!(!h.contains(&w(&[0])));
        assert!(!h.contains(&w(&[0, 1, 0])));
    }

    #[test]
    fn subgroup_chsh_even() {
        // H = <x_i y_j> consists of the words of even length.
        let q = chsh_context();
        let gens: Vec<NcWord> = (0..2)
            .flat_map(|a| (2..4).map(move |b| w(&[a, b])))
            .collect();
        let h = q.subgroup_closure(&gens, 6).unwrap();
        let mut count = 0usize;
        let mut stack = vec![NcWord::empty()];
        let mut seen = HashSet::new();
        while let Some(word) = stack.pop() {
            if !seen.insert(word.clone()) {
                continue;
            }
            if word.len() % 2 == 0 {
                assert!(h.contains(&word), "{:?} should be in H", word);
                count += 1;
            } else {
                assert!(!h.contains(&word), "{:?} should not be in H", word);
            }
            if word.len() < 4 {
                for v in 0..4u32 {
                    if let NormalForm::Word(nf) = q.normalize(&word.concat(&NcWord::letter(v))) {
                        if nf.len() == word.len() + 1 {
                            stack.push(nf);
                        }
                    }
                }
            }
        }
        assert!(count > 10);
    }

    #[test]
    fn subgroup_requires_group_context() {
        let q = QuotientContext::uniform(2, VarKind::Projection);
        assert!(matches!(
            q.subgroup_closure(&[w(&[0, 1])], 4),
            Err(QuotientError::NonGroupContext)
        ));
    }
}
