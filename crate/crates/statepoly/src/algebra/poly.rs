//! Sparse polynomials over S-words and NCS-words.

use super::coeff::{Coeff, Rat};
use super::word::{NcWord, NcsWord, SSymbol, SWord};
use std::collections::BTreeMap;
use std::fmt;

/// A state polynomial: a sparse map from S-words to coefficients. Zero
/// coefficients are never stored; the zero polynomial has no degree.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct StatePoly<C: Coeff> {
    terms: BTreeMap<SWord, C>,
}

/// An nc state polynomial: a sparse map from NCS-words to coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct NcStatePoly<C: Coeff> {
    terms: BTreeMap<NcsWord, C>,
}

macro_rules! common_poly_impl {
    ($poly:ident, $mono:ident) => {
        impl<C: Coeff> $poly<C> {
            pub fn zero() -> Self {
                Self {
                    terms: BTreeMap::new(),
                }
            }

            pub fn one() -> Self {
                Self::monomial($mono::default(), C::one())
            }

            pub fn constant(c: C) -> Self {
                Self::monomial($mono::default(), c)
            }

            pub fn monomial(m: $mono, c: C) -> Self {
                let mut terms = BTreeMap::new();
                if !c.is_zero() {
                    terms.insert(m, c);
                }
                Self { terms }
            }

            pub fn from_terms(terms: impl IntoIterator<Item = ($mono, C)>) -> Self {
                let mut p = Self::zero();
                for (m, c) in terms {
                    p.add_term(m, c);
                }
                p
            }

            pub fn is_zero(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn terms(&self) -> impl Iterator<Item = (&$mono, &C)> {
                self.terms.iter()
            }

            pub fn num_terms(&self) -> usize {
                self.terms.len()
            }

            pub fn coeff(&self, m: &$mono) -> C {
                self.terms.get(m).cloned().unwrap_or_else(C::zero)
            }

            /// Degree of the polynomial; `None` for the zero polynomial.
            pub fn degree(&self) -> Option<usize> {
                self.terms.keys().map(|m| m.degree()).max()
            }

            pub fn add_term(&mut self, m: $mono, c: C) {
                if c.is_zero() {
                    return;
                }
                match self.terms.entry(m) {
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(c);
                    }
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        let v = e.get().clone() + c;
                        if v.is_zero() {
                            e.remove();
                        } else {
                            *e.get_mut() = v;
                        }
                    }
                }
            }

            pub fn add(&self, other: &Self) -> Self {
                let mut r = self.clone();
                for (m, c) in other.terms.iter() {
                    r.add_term(m.clone(), c.clone());
                }
                r
            }

            pub fn neg(&self) -> Self {
                Self {
                    terms: self
                        .terms
                        .iter()
                        .map(|(m, c)| (m.clone(), c.clone().neg()))
                        .collect(),
                }
            }

            pub fn sub(&self, other: &Self) -> Self {
                self.add(&other.neg())
            }

            pub fn scale(&self, c: &C) -> Self {
                let mut r = Self::zero();
                for (m, v) in self.terms.iter() {
                    r.add_term(m.clone(), v.clone() * c.clone());
                }
                r
            }

            /// Integer power by repeated multiplication.
            pub fn pow(&self, k: u32) -> Self {
                let mut r = Self::one();
                for _ in 0..k {
                    r = r.mul(self);
                }
                r
            }

            pub fn max_var(&self) -> Option<super::word::Var> {
                self.terms.keys().filter_map(|m| m.max_var()).max()
            }
        }

        impl<C: Coeff> std::ops::Add for &$poly<C> {
            type Output = $poly<C>;
            fn add(self, rhs: Self) -> $poly<C> {
                $poly::add(self, rhs)
            }
        }

        impl<C: Coeff> std::ops::Sub for &$poly<C> {
            type Output = $poly<C>;
            fn sub(self, rhs: Self) -> $poly<C> {
                $poly::sub(self, rhs)
            }
        }

        impl<C: Coeff> std::ops::Mul for &$poly<C> {
            type Output = $poly<C>;
            fn mul(self, rhs: Self) -> $poly<C> {
                $poly::mul(self, rhs)
            }
        }

        impl<C: Coeff> std::ops::Neg for &$poly<C> {
            type Output = $poly<C>;
            fn neg(self) -> $poly<C> {
                $poly::neg(self)
            }
        }
    };
}

common_poly_impl!(StatePoly, SWord);
common_poly_impl!(NcStatePoly, NcsWord);

impl<C: Coeff> StatePoly<C> {
    /// Commutative product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Self::zero();
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in other.terms.iter() {
                r.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        r
    }

    /// Embeds into the nc state polynomials (all tails empty).
    pub fn lift(&self) -> NcStatePoly<C> {
        NcStatePoly {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (NcsWord::from_scalar(m.clone()), c.clone()))
                .collect(),
        }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> StatePoly<D> {
        let mut r = StatePoly::zero();
        for (m, c) in self.terms.iter() {
            r.add_term(m.clone(), f(c));
        }
        r
    }
}

impl StatePoly<Rat> {
    pub fn to_float(&self) -> StatePoly<f64> {
        self.map_coeffs(Coeff::to_f64)
    }
}

impl NcStatePoly<Rat> {
    pub fn to_float(&self) -> NcStatePoly<f64> {
        self.map_coeffs(Coeff::to_f64)
    }
}

impl<C: Coeff> NcStatePoly<C> {
    /// Algebra product: S-word factors multiply by multiset union, tails by
    /// concatenation.
    pub fn mul(&self, other: &Self) -> Self {
        let mut r = Self::zero();
        for (m1, c1) in self.terms.iter() {
            for (m2, c2) in other.terms.iter() {
                r.add_term(m1.mul(m2), c1.clone() * c2.clone());
            }
        }
        r
    }

    /// Involution: coefficient-wise on terms, reversing tails.
    pub fn involution(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.involution(), c.clone()))
                .collect(),
        }
    }

    /// The unital `S`-linear star map into the state polynomials: each term
    /// `s * v` maps to `s * s(v)` (or `s` when the tail is empty).
    pub fn sigma(&self) -> StatePoly<C> {
        let mut r = StatePoly::zero();
        for (m, c) in self.terms.iter() {
            let sw = if m.tail.is_empty() {
                m.scalar.clone()
            } else {
                m.scalar.push(SSymbol::new(m.tail.clone()))
            };
            r.add_term(sw, c.clone());
        }
        r
    }

    /// True when every tail is empty, i.e. the polynomial lies in the
    /// commutative subring of state polynomials.
    pub fn is_state_poly(&self) -> bool {
        self.terms.keys().all(|m| m.tail.is_empty())
    }

    /// Projects onto the state polynomials; `None` if some tail is nonempty.
    pub fn as_state_poly(&self) -> Option<StatePoly<C>> {
        if !self.is_state_poly() {
            return None;
        }
        let mut r = StatePoly::zero();
        for (m, c) in self.terms.iter() {
            r.add_term(m.scalar.clone(), c.clone());
        }
        Some(r)
    }

    /// True if `f = f*`.
    pub fn is_symmetric(&self) -> bool {
        *self == self.involution()
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> NcStatePoly<D> {
        let mut r = NcStatePoly::zero();
        for (m, c) in self.terms.iter() {
            r.add_term(m.clone(), f(c));
        }
        r
    }

    /// Convenience: the free letter `x_v` as a polynomial.
    pub fn var(v: super::word::Var) -> Self {
        Self::monomial(NcsWord::from_word(NcWord::letter(v)), C::one())
    }

    /// Convenience: the state symbol `s(w)` as a polynomial.
    pub fn sigma_of(w: NcWord) -> Self {
        Self::monomial(NcsWord::from_scalar(SWord::single(SSymbol::new(w))), C::one())
    }
}

impl<C: Coeff> fmt::Debug for StatePoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        debug_poly(f, self.terms.iter())
    }
}

impl<C: Coeff> fmt::Debug for NcStatePoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        debug_poly(f, self.terms.iter())
    }
}

fn debug_poly<'a, M: fmt::Debug + 'a, C: Coeff>(
    f: &mut fmt::Formatter<'_>,
    terms: impl Iterator<Item = (&'a M, &'a C)>,
) -> fmt::Result {
    let mut first = true;
    for (m, c) in terms {
        if !first {
            write!(f, " + ")?;
        }
        write!(f, "{}*{:?}", c, m)?;
        first = false;
    }
    if first {
        write!(f, "0")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::word::Var;

    fn x<C: Coeff>(v: Var) -> NcStatePoly<C> {
        NcStatePoly::var(v)
    }

    fn sig<C: Coeff>(letters: &[Var]) -> NcStatePoly<C> {
        NcStatePoly::sigma_of(NcWord::from_letters(letters.iter().copied()))
    }

    #[test]
    fn product_of_symbol_and_letter() {
        // s(x1)*x2 times x1 gives the single term s(x1)*x2*x1.
        let f = sig::<f64>(&[0]).mul(&x(1));
        let g = f.mul(&x(0));
        assert_eq!(g.num_terms(), 1);
        let (m, c) = g.terms().next().unwrap();
        assert_eq!(*c, 1.0);
        assert_eq!(m.tail.letters(), &[1, 0]);
        assert_eq!(m.scalar.degree(), 1);
    }

    #[test]
    fn square_expansion_with_central_symbol() {
        // (x1 + s(x2))^2 = x1^2 + 2 s(x2) x1 + s(x2)^2.
        let f = x::<f64>(0).add(&sig(&[1]));
        let sq = f.mul(&f);
        assert_eq!(sq.num_terms(), 3);
        let x1x1 = NcsWord::from_word(NcWord::from_letters([0, 0]));
        assert_eq!(sq.coeff(&x1x1), 1.0);
        let mixed = NcsWord::new(
            SWord::single(SSymbol::new(NcWord::letter(1))),
            NcWord::letter(0),
        );
        assert_eq!(sq.coeff(&mixed), 2.0);
        let s2 = NcsWord::from_scalar(SWord::from_factors(vec![
            SSymbol::new(NcWord::letter(1)),
            SSymbol::new(NcWord::letter(1)),
        ]));
        assert_eq!(sq.coeff(&s2), 1.0);
    }

    #[test]
    fn unit_law() {
        let f = x::<f64>(0).mul(&sig(&[0, 1])).add(&x(2));
        assert_eq!(f.mul(&NcStatePoly::one()), f);
        assert_eq!(NcStatePoly::one().mul(&f), f);
    }

    #[test]
    fn involution_fixes_symbols_reverses_words() {
        // x1*x2 -> x2*x1
        let f = x::<f64>(0).mul(&x(1));
        let g = f.involution();
        let m = g.terms().next().unwrap().0;
        assert_eq!(m.tail.letters(), &[1, 0]);
        // s(x1x2)*x1*x2 -> s(x1x2)*x2*x1 with the symbol unchanged
        let h = sig::<f64>(&[0, 1]).mul(&x(0)).mul(&x(1));
        let hi = h.involution();
        let m = hi.terms().next().unwrap().0;
        assert_eq!(m.scalar, SWord::single(SSymbol::new(NcWord::from_letters([0, 1]))));
        assert_eq!(m.tail.letters(), &[1, 0]);
    }

    #[test]
    fn sigma_examples() {
        // sigma(x1x2x1) = s(x1x2x1)
        let f = x::<f64>(0).mul(&x(1)).mul(&x(0));
        let s = f.sigma();
        assert_eq!(s.num_terms(), 1);
        assert_eq!(
            s.terms().next().unwrap().0,
            &SWord::single(SSymbol::new(NcWord::from_letters([0, 1, 0])))
        );
        // sigma(s(x1)*x2) = s(x1)s(x2)
        let g = sig::<f64>(&[0]).mul(&x(1));
        let s = g.sigma();
        let expect = SWord::from_factors(vec![
            SSymbol::new(NcWord::letter(0)),
            SSymbol::new(NcWord::letter(1)),
        ]);
        assert_eq!(s.terms().next().unwrap().0, &expect);
        // sigma restricted to state polynomials is the identity
        let a: StatePoly<f64> = StatePoly::from_terms([
            (SWord::single(SSymbol::new(NcWord::letter(0))), 2.0),
            (SWord::one(), -1.0),
        ]);
        assert_eq!(a.lift().sigma(), a);
    }

    #[test]
    fn sigma_respects_involution() {
        let f = x::<f64>(0).mul(&x(1)).add(&sig(&[1]).mul(&x(2)));
        assert_eq!(f.sigma(), f.involution().sigma());
    }

    #[test]
    fn zero_polynomial_has_no_degree() {
        let z = StatePoly::<f64>::zero();
        assert!(z.degree().is_none());
        // s(x1x2) - s(x2x1) cancels already at construction
        let f = sig::<f64>(&[0, 1]).sub(&sig(&[1, 0]));
        assert!(f.is_zero());
    }
}
