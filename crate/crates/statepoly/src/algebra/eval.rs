//! Numeric evaluation of (nc) state polynomials at (state, matrix tuple)
//! pairs.

use super::coeff::Coeff;
use super::poly::{NcStatePoly, StatePoly};
use super::word::NcWord;
use crate::linalg::Mat;
use rand::Rng;
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("operator count {have} is smaller than required {need}")]
    MissingOperators { have: usize, need: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("state is not valid: {0}")]
    InvalidState(String),
}

/// The state part of an evaluation: a density matrix or a unit vector.
#[derive(Debug, Clone)]
pub enum State<C: Coeff> {
    Density(Mat<C>),
    Vector(Vec<C>),
}

/// A finite-dimensional evaluation point: a state together with a tuple of
/// symmetric operators of matching dimension.
#[derive(Debug, Clone)]
pub struct Evaluation<C: Coeff> {
    pub state: State<C>,
    pub operators: Vec<Mat<C>>,
}

impl<C: Coeff> Evaluation<C> {
    pub fn dim(&self) -> usize {
        match &self.state {
            State::Density(m) => m.n,
            State::Vector(v) => v.len(),
        }
    }

    fn check_dims(&self, needed_vars: usize) -> Result<(), EvalError> {
        if self.operators.len() < needed_vars {
            return Err(EvalError::MissingOperators {
                have: self.operators.len(),
                need: needed_vars,
            });
        }
        let k = self.dim();
        for op in &self.operators {
            if op.n != k {
                return Err(EvalError::Dimension {
                    expected: k,
                    got: op.n,
                });
            }
        }
        Ok(())
    }

    /// Validates the state: trace one / unit norm within `tol`, and for
    /// density matrices positive semidefiniteness (eigenvalues above `-tol`;
    /// for exact scalars pass `tol = 0` and PSD is not re-checked here).
    pub fn validate(&self, tol: f64) -> Result<(), EvalError> {
        match &self.state {
            State::Density(m) => {
                let tr: f64 = (0..m.n).map(|i| m.get(i, i).to_f64()).sum();
                if (tr - 1.0).abs() > tol {
                    return Err(EvalError::InvalidState(format!("trace {} != 1", tr)));
                }
                let mf = m.map(Coeff::to_f64);
                let eigs = crate::linalg::sym_eigenvalues(&mf);
                if let Some(min) = eigs.first() {
                    if *min < -tol {
                        return Err(EvalError::InvalidState(format!(
                            "density matrix has eigenvalue {}",
                            min
                        )));
                    }
                }
                Ok(())
            }
            State::Vector(v) => {
                let norm2: f64 = v.iter().map(|c| c.abs_f64() * c.abs_f64()).sum();
                if (norm2.sqrt() - 1.0).abs() > tol {
                    return Err(EvalError::InvalidState(format!(
                        "vector norm {} != 1",
                        norm2.sqrt()
                    )));
                }
                Ok(())
            }
        }
    }

    /// Applies the state to an operator: `tr(rho Y)` or `<Yv, v>`.
    pub fn apply_state(&self, y: &Mat<C>) -> C {
        match &self.state {
            State::Density(rho) => {
                // tr(rho * y)
                let mut acc = C::zero();
                for i in 0..rho.n {
                    for j in 0..rho.n {
                        acc = acc + rho.get(i, j).clone() * y.get(j, i).clone();
                    }
                }
                acc
            }
            State::Vector(v) => {
                let yv = y.mat_vec(v);
                let mut acc = C::zero();
                for i in 0..v.len() {
                    acc = acc + yv[i].clone() * v[i].clone();
                }
                acc
            }
        }
    }
}

/// Memoizing word evaluator over a fixed evaluation point.
pub struct WordEvaluator<'a, C: Coeff> {
    eval: &'a Evaluation<C>,
    words: HashMap<NcWord, Mat<C>>,
    lambdas: HashMap<NcWord, C>,
}

impl<'a, C: Coeff> WordEvaluator<'a, C> {
    pub fn new(eval: &'a Evaluation<C>) -> Self {
        WordEvaluator {
            eval,
            words: HashMap::new(),
            lambdas: HashMap::new(),
        }
    }

    pub fn word(&mut self, w: &NcWord) -> Mat<C> {
        if let Some(m) = self.words.get(w) {
            return m.clone();
        }
        let k = self.eval.dim();
        let m = if w.is_empty() {
            Mat::identity(k)
        } else if w.len() == 1 {
            self.eval.operators[w.letters()[0] as usize].clone()
        } else {
            // Split in half so shared subwords get reused.
            let mid = w.len() / 2;
            let left = NcWord::from_letters(w.letters()[..mid].iter().copied());
            let right = NcWord::from_letters(w.letters()[mid..].iter().copied());
            self.word(&left).mul(&self.word(&right))
        };
        self.words.insert(w.clone(), m.clone());
        m
    }

    pub fn lambda(&mut self, w: &NcWord) -> C {
        if let Some(c) = self.lambdas.get(w) {
            return c.clone();
        }
        let m = self.word(w);
        let v = self.eval.apply_state(&m);
        self.lambdas.insert(w.clone(), v.clone());
        v
    }
}

impl<C: Coeff> StatePoly<C> {
    /// Evaluates to a scalar: each symbol `s(w)` becomes the state value of
    /// `w(X)`.
    pub fn evaluate(&self, eval: &Evaluation<C>) -> Result<C, EvalError> {
        let need = self.max_var().map(|v| v as usize + 1).unwrap_or(0);
        eval.check_dims(need)?;
        let mut we = WordEvaluator::new(eval);
        let mut acc = C::zero();
        for (m, c) in self.terms() {
            let mut term = c.clone();
            for s in m.factors() {
                term = term * we.lambda(s.rep());
            }
            acc = acc + term;
        }
        Ok(acc)
    }
}

impl<C: Coeff> NcStatePoly<C> {
    /// Evaluates to a `k x k` matrix.
    pub fn evaluate(&self, eval: &Evaluation<C>) -> Result<Mat<C>, EvalError> {
        let need = self.max_var().map(|v| v as usize + 1).unwrap_or(0);
        eval.check_dims(need)?;
        let k = eval.dim();
        let mut we = WordEvaluator::new(eval);
        let mut acc = Mat::zeros(k);
        for (m, c) in self.terms() {
            let mut coeff = c.clone();
            for s in m.scalar.factors() {
                coeff = coeff * we.lambda(s.rep());
            }
            let tail = we.word(&m.tail);
            acc = acc.add(&tail.scale(&coeff));
        }
        Ok(acc)
    }
}

/// Draws a random evaluation of dimension `k` over `n` operators: a random
/// density state and random symmetric matrices with entries in `[-1, 1]`.
pub fn random_evaluation(n: usize, k: usize, rng: &mut impl Rng) -> Evaluation<f64> {
    let mut operators = Vec::with_capacity(n);
    for _ in 0..n {
        let mut m = Mat::zeros(k);
        for i in 0..k {
            for j in 0..=i {
                let v: f64 = rng.gen_range(-1.0..1.0);
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        operators.push(m);
    }
    // rho = G G^T normalized to trace one
    let mut g = Mat::zeros(k);
    for i in 0..k {
        for j in 0..k {
            g.set(i, j, rng.gen_range(-1.0..1.0));
        }
    }
    let mut rho = g.mul(&g.transpose());
    let tr: f64 = (0..k).map(|i| rho.get(i, i)).sum();
    rho = rho.scale(&(1.0 / tr));
    Evaluation {
        state: State::Density(rho),
        operators,
    }
}

/// Searches for an evaluation witnessing that `f` is symbolically nonzero,
/// sampling random points of dimension `2*deg(f) + 1`. Returns the first
/// point where `|f|` exceeds `tol`, or `None` when the trials are exhausted
/// (the caller decides what that means). Requires `f != 0` symbolically.
pub fn random_nonzero_witness(
    f: &NcStatePoly<f64>,
    trials: usize,
    tol: f64,
    rng: &mut impl Rng,
) -> Option<Evaluation<f64>> {
    assert!(!f.is_zero(), "witness search requires a nonzero polynomial");
    let d = f.degree().unwrap_or(0);
    let k = 2 * d + 1;
    let n = f.max_var().map(|v| v as usize + 1).unwrap_or(1);
    for _ in 0..trials {
        let e = random_evaluation(n, k, rng);
        let m = f.evaluate(&e).expect("dimensions fixed by construction");
        let norm = (0..m.n)
            .flat_map(|i| (0..m.n).map(move |j| (i, j)))
            .map(|(i, j)| m.get(i, j).abs())
            .fold(0.0f64, f64::max);
        if norm > tol {
            return Some(e);
        }
    }
    None
}
