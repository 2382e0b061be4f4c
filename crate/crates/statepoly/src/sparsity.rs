//! Relaxation shrinking: correlative sparsity (variable cliques with the
//! running intersection property) and sign symmetry (GF(2) parity blocks).

use crate::algebra::{NcsWord, SWord, StatePoly, Var};
use crate::moment::{assemble_with, AssemblyOptions, Constraint, MomentError, MomentRelaxation};
use crate::quotient::QuotientContext;
use std::collections::BTreeSet;

// ---------------------------------------------------------------------------
// Sign symmetry
// ---------------------------------------------------------------------------

/// Parity vector of a monomial: total letter count per variable, mod 2,
/// packed into a 64-bit mask. Counts both symbol factors and the tail.
pub fn parity_sword(s: &SWord) -> u64 {
    let mut p = 0u64;
    for f in s.factors() {
        for &v in f.rep().letters() {
            p ^= 1u64 << v;
        }
    }
    p
}

pub fn parity_ncs(m: &NcsWord) -> u64 {
    let mut p = parity_sword(&m.scalar);
    for &v in m.tail.letters() {
        p ^= 1u64 << v;
    }
    p
}

/// A GF(2) row space with reduction, used to decide which moments the sign
/// symmetries of the problem force to zero.
#[derive(Debug, Clone, Default)]
pub struct ParitySpace {
    rows: Vec<u64>,
}

impl ParitySpace {
    pub fn insert(&mut self, mut v: u64) {
        for &r in &self.rows {
            v = v.min(v ^ r);
        }
        if v != 0 {
            self.rows.push(v);
            self.rows.sort_unstable_by(|a, b| b.cmp(a));
            // re-reduce to keep a canonical echelon basis
            let rows = std::mem::take(&mut self.rows);
            for r in rows {
                self.insert(r);
            }
        }
    }

    /// Canonical coset representative of `v` modulo the row space.
    pub fn reduce(&self, mut v: u64) -> u64 {
        for &r in &self.rows {
            v = v.min(v ^ r);
        }
        v
    }

    pub fn contains(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}

/// The sign-symmetry row space of a problem: parities of objective terms and
/// inequality-constraint terms enter directly; balanced equality pairs only
/// constrain the relative sign, so their terms enter as differences.
pub fn sign_symmetry_space(
    objective: &StatePoly<f64>,
    constraints: &[Constraint],
    n_vars: usize,
) -> Result<ParitySpace, MomentError> {
    if n_vars > 64 {
        return Err(MomentError::TooManyVariables(n_vars));
    }
    let mut space = ParitySpace::default();
    for (m, _) in objective.terms() {
        space.insert(parity_sword(m));
    }
    for c in constraints {
        let parities: Vec<u64> = c.poly.terms().map(|(m, _)| parity_ncs(m)).collect();
        match c.kind {
            crate::moment::ConstraintKind::Inequality => {
                for p in parities {
                    space.insert(p);
                }
            }
            crate::moment::ConstraintKind::EqualityPair => {
                if let Some(&first) = parities.first() {
                    for p in &parities[1..] {
                        space.insert(p ^ first);
                    }
                }
            }
        }
    }
    Ok(space)
}

/// One sign-symmetry block: the words of a basis whose parities fall in one
/// coset of the symmetry row space.
#[derive(Debug, Clone)]
pub struct ParityClass {
    /// Canonical (reduced) coset representative.
    pub representative: u64,
    /// Indices into the basis this class was computed from.
    pub members: Vec<usize>,
}

/// Partitions basis words into parity classes modulo the row space of the
/// problem's sign symmetries. Moments whose parity lies outside the row
/// space are zero, so Hankel and localizing blocks restrict to the classes.
pub fn sign_symmetry_blocks(
    objective: &StatePoly<f64>,
    constraints: &[Constraint],
    basis: &[NcsWord],
    n_vars: usize,
) -> Result<Vec<ParityClass>, MomentError> {
    let space = sign_symmetry_space(objective, constraints, n_vars)?;
    partition_by_parity(&space, basis)
}

pub(crate) fn partition_by_parity(
    space: &ParitySpace,
    basis: &[NcsWord],
) -> Result<Vec<ParityClass>, MomentError> {
    let mut classes: Vec<ParityClass> = Vec::new();
    let mut index: std::collections::HashMap<u64, usize> = std::collections::HashMap::new();
    for (i, w) in basis.iter().enumerate() {
        let rep = space.reduce(parity_ncs(w));
        let slot = *index.entry(rep).or_insert_with(|| {
            classes.push(ParityClass {
                representative: rep,
                members: Vec::new(),
            });
            classes.len() - 1
        });
        classes[slot].members.push(i);
    }
    // Deterministic order: the class containing parity zero first, then by
    // representative.
    classes.sort_by_key(|c| c.representative);
    Ok(classes)
}

// ---------------------------------------------------------------------------
// Correlative sparsity
// ---------------------------------------------------------------------------

/// A clique decomposition: variable index sets with the running intersection
/// property, plus the assignment of each constraint to a clique.
#[derive(Debug, Clone)]
pub struct CliqueDecomposition {
    pub cliques: Vec<Vec<Var>>,
    /// Index of the clique each constraint was assigned to.
    pub constraint_clique: Vec<usize>,
}

fn term_vars_sword(m: &SWord) -> BTreeSet<Var> {
    let mut s = BTreeSet::new();
    for f in m.factors() {
        s.extend(f.rep().letters().iter().copied());
    }
    s
}

fn term_vars_ncs(m: &NcsWord) -> BTreeSet<Var> {
    let mut s = term_vars_sword(&m.scalar);
    s.extend(m.tail.letters().iter().copied());
    s
}

fn poly_vars(p: &crate::algebra::NcStatePoly<f64>) -> BTreeSet<Var> {
    let mut s = BTreeSet::new();
    for (m, _) in p.terms() {
        s.extend(term_vars_ncs(m));
    }
    s
}

/// Exact check of the running intersection property, reused by tests and by
/// the detector itself.
pub fn rip_holds(cliques: &[Vec<Var>]) -> bool {
    for k in 1..cliques.len() {
        let ck: BTreeSet<Var> = cliques[k].iter().copied().collect();
        let union: BTreeSet<Var> = cliques[..k].iter().flatten().copied().collect();
        let inter: BTreeSet<Var> = ck.intersection(&union).copied().collect();
        if inter.is_empty() {
            continue;
        }
        let covered = cliques[..k].iter().any(|ci| {
            let ci: BTreeSet<Var> = ci.iter().copied().collect();
            inter.is_subset(&ci)
        });
        if !covered {
            return false;
        }
    }
    true
}

/// Builds the correlation graph (variables adjacent when they co-occur in an
/// objective term or a constraint), chordalizes it with a minimum-degree
/// heuristic, extracts maximal cliques and orders them to satisfy the
/// running intersection property. Falls back to the single full clique when
/// any of the verified invariants fails.
pub fn detect_cliques(
    objective: &StatePoly<f64>,
    constraints: &[Constraint],
    n_vars: usize,
) -> CliqueDecomposition {
    let full = || CliqueDecomposition {
        cliques: vec![(0..n_vars as Var).collect()],
        constraint_clique: vec![0; constraints.len()],
    };
    if n_vars == 0 {
        return full();
    }
    let mut adj = vec![false; n_vars * n_vars];
    let mut connect = |vars: &BTreeSet<Var>, adj: &mut Vec<bool>| {
        let vs: Vec<Var> = vars.iter().copied().collect();
        for i in 0..vs.len() {
            for j in (i + 1)..vs.len() {
                adj[vs[i] as usize * n_vars + vs[j] as usize] = true;
                adj[vs[j] as usize * n_vars + vs[i] as usize] = true;
            }
        }
    };
    for (m, _) in objective.terms() {
        connect(&term_vars_sword(m), &mut adj);
    }
    for c in constraints {
        connect(&poly_vars(&c.poly), &mut adj);
    }

    // Minimum-degree elimination with fill-in; record the filled graph and
    // the elimination order.
    let mut filled = adj.clone();
    let mut alive: Vec<bool> = vec![true; n_vars];
    let mut order: Vec<usize> = Vec::with_capacity(n_vars);
    for _ in 0..n_vars {
        let (v, _) = (0..n_vars)
            .filter(|&v| alive[v])
            .map(|v| {
                let deg = (0..n_vars)
                    .filter(|&u| alive[u] && filled[v * n_vars + u])
                    .count();
                (v, deg)
            })
            .min_by_key(|&(v, deg)| (deg, v))
            .expect("some vertex alive");
        let nbrs: Vec<usize> = (0..n_vars)
            .filter(|&u| alive[u] && filled[v * n_vars + u])
            .collect();
        for i in 0..nbrs.len() {
            for j in (i + 1)..nbrs.len() {
                filled[nbrs[i] * n_vars + nbrs[j]] = true;
                filled[nbrs[j] * n_vars + nbrs[i]] = true;
            }
        }
        alive[v] = false;
        order.push(v);
    }
    // Cliques of the chordal filled graph: v plus its not-yet-eliminated
    // neighbours, for each v in elimination order; keep maximal ones.
    let mut pos = vec![0usize; n_vars];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut cliques: Vec<BTreeSet<Var>> = Vec::new();
    for (i, &v) in order.iter().enumerate() {
        let mut c: BTreeSet<Var> = BTreeSet::new();
        c.insert(v as Var);
        for u in 0..n_vars {
            if filled[v * n_vars + u] && pos[u] > i {
                c.insert(u as Var);
            }
        }
        if !cliques.iter().any(|other| c.is_subset(other)) {
            cliques.retain(|other| !other.is_subset(&c));
            cliques.push(c);
        }
    }
    // Order cliques by the latest elimination position of their vertices;
    // for a chordal graph this ordering satisfies RIP.
    let mut cliques: Vec<(usize, Vec<Var>)> = cliques
        .into_iter()
        .map(|c| {
            let latest = c.iter().map(|&v| pos[v as usize]).max().unwrap();
            (latest, c.into_iter().collect::<Vec<_>>())
        })
        .collect();
    cliques.sort();
    let cliques: Vec<Vec<Var>> = cliques.into_iter().map(|(_, c)| c).collect();

    if !rip_holds(&cliques) {
        return full();
    }
    // Every objective term must live in a single clique.
    let in_clique = |vars: &BTreeSet<Var>| {
        cliques.iter().position(|c| {
            let cs: BTreeSet<Var> = c.iter().copied().collect();
            vars.is_subset(&cs)
        })
    };
    for (m, _) in objective.terms() {
        if in_clique(&term_vars_sword(m)).is_none() {
            return full();
        }
    }
    let mut constraint_clique = Vec::with_capacity(constraints.len());
    for c in constraints {
        match in_clique(&poly_vars(&c.poly)) {
            Some(k) => constraint_clique.push(k),
            None => return full(),
        }
    }
    CliqueDecomposition {
        cliques,
        constraint_clique,
    }
}

/// Assembles the correlative-sparsity relaxation: one Hankel block per
/// clique over the clique-restricted basis, localizing blocks per assigned
/// constraint, with moment labels unified across cliques.
pub fn assemble_cs(
    objective: &StatePoly<f64>,
    constraints: &[Constraint],
    q: &QuotientContext,
    d: usize,
    cliques: &CliqueDecomposition,
    opts: &AssemblyOptions,
) -> Result<MomentRelaxation, MomentError> {
    // Verify the invariants rather than assuming them.
    if !rip_holds(&cliques.cliques) {
        return Err(MomentError::Decomposition(
            "running intersection property violated".into(),
        ));
    }
    for (m, _) in objective.terms() {
        let vars = term_vars_sword(m);
        if !cliques.cliques.iter().any(|c| {
            let cs: BTreeSet<Var> = c.iter().copied().collect();
            vars.is_subset(&cs)
        }) {
            return Err(MomentError::Decomposition(
                "objective does not split over the cliques".into(),
            ));
        }
    }
    for (ci, c) in constraints.iter().enumerate() {
        let k = *cliques.constraint_clique.get(ci).ok_or_else(|| {
            MomentError::Decomposition("missing constraint assignment".into())
        })?;
        let cs: BTreeSet<Var> = cliques.cliques[k].iter().copied().collect();
        if !poly_vars(&c.poly).is_subset(&cs) {
            return Err(MomentError::Decomposition(format!(
                "constraint {} not supported on its clique",
                ci
            )));
        }
    }
    let mut opts = opts.clone();
    opts.cliques = Some(cliques.clone());
    assemble_with(objective, constraints, q, d, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{NcStatePoly, NcWord};
    use crate::moment::ConstraintKind;

    fn sig(letters: &[Var]) -> StatePoly<f64> {
        NcStatePoly::sigma_of(NcWord::from_letters(letters.iter().copied()))
            .as_state_poly()
            .unwrap()
    }

    #[test]
    fn parity_counts_scalar_and_tail() {
        let m = NcsWord::new(
            SWord::single(crate::algebra::SSymbol::new(NcWord::from_letters([0, 1]))),
            NcWord::from_letters([0, 2]),
        );
        // x0 appears twice (even), x1 once, x2 once
        assert_eq!(parity_ncs(&m), 0b110);
    }

    #[test]
    fn parity_space_reduction() {
        let mut s = ParitySpace::default();
        s.insert(0b011);
        s.insert(0b110);
        assert!(s.contains(0b101));
        assert!(!s.contains(0b001));
        assert_eq!(s.dim(), 2);
        // coset representatives are canonical
        assert_eq!(s.reduce(0b001), s.reduce(0b010));
    }

    #[test]
    fn chained_objective_gives_two_cliques() {
        // terms on {0,1} and {1,2}: cliques {0,1}, {1,2} with RIP
        let objective = sig(&[0, 1]).add(&sig(&[1, 2]));
        let dec = detect_cliques(&objective, &[], 3);
        assert_eq!(dec.cliques.len(), 2);
        assert!(rip_holds(&dec.cliques));
        let sets: Vec<BTreeSet<Var>> = dec
            .cliques
            .iter()
            .map(|c| c.iter().copied().collect())
            .collect();
        assert!(sets.contains(&[0, 1].into_iter().collect()));
        assert!(sets.contains(&[1, 2].into_iter().collect()));
    }

    #[test]
    fn coupled_objective_single_clique() {
        // a term spanning all three variables forces one clique
        let objective = sig(&[0, 1, 2]);
        let dec = detect_cliques(&objective, &[], 3);
        assert_eq!(dec.cliques.len(), 1);
        assert_eq!(dec.cliques[0].len(), 3);
    }

    #[test]
    fn disjoint_objectives_two_singletons() {
        let objective = sig(&[0, 0]).add(&sig(&[1, 1]));
        let dec = detect_cliques(&objective, &[], 2);
        assert_eq!(dec.cliques.len(), 2);
        assert_eq!(dec.cliques[0].len(), 1);
        assert_eq!(dec.cliques[1].len(), 1);
    }

    #[test]
    fn constraints_enter_the_graph() {
        let objective = sig(&[0]);
        let c = Constraint {
            poly: NcStatePoly::var(1).mul(&NcStatePoly::var(2)),
            kind: ConstraintKind::Inequality,
        };
        let dec = detect_cliques(&objective, &[c], 3);
        // {1,2} must be inside one clique
        assert!(dec
            .cliques
            .iter()
            .any(|cl| cl.contains(&1) && cl.contains(&2)));
    }

    #[test]
    fn rip_checker_rejects_bad_order() {
        // {0,1}, {2,3}, {1,2}: the third clique intersects the union in
        // {1,2}, which lies in neither earlier clique.
        assert!(!rip_holds(&[vec![0, 1], vec![2, 3], vec![1, 2]]));
        assert!(rip_holds(&[vec![0, 1], vec![1, 2], vec![2, 3]]));
    }
}
