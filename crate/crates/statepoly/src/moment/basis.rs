//! Enumeration of NCS-word bases over a quotient context.

use super::MomentError;
use crate::algebra::{NcWord, NcsWord, SSymbol, SWord, Var};
use crate::quotient::{NormalForm, QuotientContext};

/// An ordered basis of canonical NCS-words of degree at most `level`.
#[derive(Debug, Clone)]
pub struct Basis {
    pub words: Vec<NcsWord>,
    pub level: usize,
}

impl Basis {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

/// Normal words of length `0..=max_len` over the allowed letters, grouped by
/// length. Uses prefix closure: every prefix of a normal word is normal.
pub(crate) fn normal_words_by_length(
    q: &QuotientContext,
    allowed: &[Var],
    max_len: usize,
    cap: usize,
) -> Result<Vec<Vec<NcWord>>, MomentError> {
    let mut by_len: Vec<Vec<NcWord>> = vec![vec![NcWord::empty()]];
    let mut total = 1usize;
    for len in 1..=max_len {
        let mut next: Vec<NcWord> = Vec::new();
        for w in &by_len[len - 1] {
            for &v in allowed {
                let cand = w.concat(&NcWord::letter(v));
                if let NormalForm::Word(nf) = q.normalize(&cand) {
                    if nf == cand {
                        next.push(cand.clone());
                    }
                }
            }
        }
        next.sort();
        next.dedup();
        total += next.len();
        if total > cap {
            return Err(MomentError::BasisTooLarge { size: total, cap });
        }
        by_len.push(next);
    }
    Ok(by_len)
}

/// The alphabet of connected state-symbol classes with representatives of
/// degree `1..=max_deg`: canonical words `r` whose symbol does not split and
/// is represented by `r` itself.
pub(crate) fn symbol_classes(
    q: &QuotientContext,
    allowed: &[Var],
    max_deg: usize,
    cap: usize,
) -> Result<Vec<SSymbol>, MomentError> {
    let words = normal_words_by_length(q, allowed, max_deg, cap)?;
    let mut reps: Vec<NcWord> = Vec::new();
    for len in 1..=max_deg {
        for w in &words[len] {
            if let Some(sym) = q.canonical_state_symbol(w) {
                if sym.factors().len() == 1 && sym.factors()[0].rep() == w {
                    reps.push(w.clone());
                }
            }
        }
    }
    reps.sort();
    reps.dedup();
    Ok(reps.into_iter().map(SSymbol::from_canonical).collect())
}

/// Multisets over the symbol alphabet with total degree at most `max_deg`,
/// as canonical S-words (including the empty product).
pub(crate) fn swords_up_to(
    alphabet: &[SSymbol],
    max_deg: usize,
    cap: usize,
) -> Result<Vec<SWord>, MomentError> {
    let mut out: Vec<SWord> = Vec::new();
    let mut stack: Vec<SSymbol> = Vec::new();
    fn rec(
        alphabet: &[SSymbol],
        start: usize,
        left: usize,
        stack: &mut Vec<SSymbol>,
        out: &mut Vec<SWord>,
        cap: usize,
    ) -> Result<(), MomentError> {
        if out.len() > cap {
            return Err(MomentError::BasisTooLarge {
                size: out.len(),
                cap,
            });
        }
        out.push(SWord::from_factors(stack.clone()));
        for (k, sym) in alphabet.iter().enumerate().skip(start) {
            if sym.degree() > left {
                continue;
            }
            stack.push(sym.clone());
            rec(alphabet, k, left - sym.degree(), stack, out, cap)?;
            stack.pop();
        }
        Ok(())
    }
    rec(alphabet, 0, max_deg, &mut stack, &mut out, cap)?;
    Ok(out)
}

/// Builds the level-`d` basis: all canonical NCS-words of degree at most `d`
/// over the context, in the deglex basis order.
pub fn build_basis(q: &QuotientContext, d: usize, cap: usize) -> Result<Basis, MomentError> {
    if d == 0 {
        return Err(MomentError::LevelTooLow("level must be at least 1".into()));
    }
    let allowed: Vec<Var> = (0..q.n_vars() as Var).collect();
    build_basis_restricted(q, d, cap, &allowed, None)
}

/// As [`build_basis`], but restricted to a subset of letters (for clique
/// decompositions) and optionally to components in a subgroup (all symbol
/// factors and the tail must pass the `in_subgroup` test).
pub(crate) fn build_basis_restricted(
    q: &QuotientContext,
    d: usize,
    cap: usize,
    allowed: &[Var],
    in_subgroup: Option<&dyn Fn(&NcWord) -> bool>,
) -> Result<Basis, MomentError> {
    let words = normal_words_by_length(q, allowed, d, cap)?;
    let mut alphabet = symbol_classes(q, allowed, d, cap)?;
    if let Some(test) = in_subgroup {
        alphabet.retain(|sym| test(sym.rep()));
    }
    let swords = swords_up_to(&alphabet, d, cap)?;
    let mut out: Vec<NcsWord> = Vec::new();
    for len in 0..=d {
        for tail in &words[len] {
            if let Some(test) = in_subgroup {
                if !tail.is_empty() && !test(tail) {
                    continue;
                }
            }
            for s in &swords {
                if s.degree() + len <= d {
                    out.push(NcsWord::new(s.clone(), tail.clone()));
                }
            }
            if out.len() > cap {
                return Err(MomentError::BasisTooLarge {
                    size: out.len(),
                    cap,
                });
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(Basis {
        words: out,
        level: d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::VarKind;

    const CAP: usize = 2_000_000;

    #[test]
    fn free_two_vars_level_one() {
        let q = QuotientContext::free(2);
        let b = build_basis(&q, 1, CAP).unwrap();
        assert_eq!(b.len(), 5); // 1, x1, x2, s(x1), s(x2)
    }

    #[test]
    fn free_case_coarse_bounds() {
        // n^d <= |basis_d| - |basis_{d-1}| ... the coarse estimate bounds the
        // count of degree-<=d words: n^d <= Delta(n,d) <= (2n)^{d+1}.
        let n = 2usize;
        let q = QuotientContext::free(n);
        for d in 1..=5usize {
            let b = build_basis(&q, d, CAP).unwrap();
            let lower = n.pow(d as u32);
            let upper = (2 * n).pow(d as u32 + 1);
            assert!(
                lower <= b.len() && b.len() <= upper,
                "d={} size={} bounds=({},{})",
                d,
                b.len(),
                lower,
                upper
            );
        }
    }

    /// The published size for the four-variable cross-commuting group at
    /// level three.
    #[test]
    fn uffink_context_level3_is_209() {
        let mut q = QuotientContext::uniform(4, VarKind::Unitary);
        for a in 0..2 {
            for b in 2..4 {
                q.set_commute(a, b);
            }
        }
        let b = build_basis(&q, 3, CAP).unwrap();
        assert_eq!(b.len(), 209);
    }

    #[test]
    fn basis_is_sorted_and_unique() {
        let mut q = QuotientContext::uniform(4, VarKind::Unitary);
        for a in 0..2 {
            for b in 2..4 {
                q.set_commute(a, b);
            }
        }
        let b = build_basis(&q, 2, CAP).unwrap();
        for w in b.words.windows(2) {
            assert!(w[0] < w[1]);
        }
        assert!(b.words[0].is_one());
    }

    #[test]
    fn size_cap_errors() {
        let q = QuotientContext::free(3);
        assert!(matches!(
            build_basis(&q, 5, 100),
            Err(MomentError::BasisTooLarge { .. })
        ));
    }
}
