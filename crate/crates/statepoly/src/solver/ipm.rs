//! Primal–dual interior point method with Mehrotra predictor–corrector and
//! HKM scaling, dense per-block linear algebra, and a rayon-parallel Schur
//! complement. Deterministic: fixed iteration order everywhere.

use super::{Entry, SdpInstance, SdpSolution, SdpStatus, SolveOptions};
use crate::linalg::{
    cholesky, cholesky_inplace_parallel, solve_cholesky_inplace, spd_inverse, Mat,
};
use rayon::prelude::*;

/// Schur diagonal regularization added before factorization.
const SCHUR_REG: f64 = 1e-12;
/// Fraction of the boundary step taken.
const STEP_FRAC: f64 = 0.98;

struct BlockData {
    dims: Vec<usize>,
    /// Per block: constraint indices touching it plus their entries there.
    per_block: Vec<Vec<(usize, Vec<(usize, usize, f64)>)>>,
    c: Vec<Mat<f64>>,
}

impl BlockData {
    fn new(inst: &SdpInstance) -> Self {
        let nb = inst.block_dims.len();
        let mut per_block: Vec<Vec<(usize, Vec<(usize, usize, f64)>)>> = vec![Vec::new(); nb];
        for (ci, entries) in inst.constraints.iter().enumerate() {
            let mut grouped: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); nb];
            for e in entries {
                grouped[e.block].push((e.i, e.j, e.value));
            }
            for (b, g) in grouped.into_iter().enumerate() {
                if !g.is_empty() {
                    per_block[b].push((ci, g));
                }
            }
        }
        BlockData {
            dims: inst.block_dims.clone(),
            per_block,
            c: inst.dense_blocks(0),
        }
    }

    /// `<A_i, M>` = tr(A_i M) for block-diagonal, not necessarily symmetric M.
    fn inner_all(&self, m: &[Mat<f64>], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (b, cons) in self.per_block.iter().enumerate() {
            let mb = &m[b];
            for (ci, entries) in cons {
                let mut acc = 0.0;
                for &(p, q, v) in entries {
                    if p == q {
                        acc += v * mb.get(p, p);
                    } else {
                        acc += v * (mb.get(p, q) + mb.get(q, p));
                    }
                }
                out[*ci] += acc;
            }
        }
    }

    /// `sum_i y_i A_i` as dense blocks.
    fn combine(&self, y: &[f64]) -> Vec<Mat<f64>> {
        let mut out: Vec<Mat<f64>> = self.dims.iter().map(|&d| Mat::zeros(d)).collect();
        for (b, cons) in self.per_block.iter().enumerate() {
            for (ci, entries) in cons {
                let w = y[*ci];
                if w == 0.0 {
                    continue;
                }
                for &(p, q, v) in entries {
                    let cur = *out[b].get(p, q) + w * v;
                    out[b].set(p, q, cur);
                    if p != q {
                        out[b].set(q, p, cur);
                    }
                }
            }
        }
        out
    }
}

fn frob_blocks(m: &[Mat<f64>]) -> f64 {
    m.iter()
        .map(|b| b.frobenius_norm().powi(2))
        .sum::<f64>()
        .sqrt()
}

fn dot_blocks(a: &[Mat<f64>], b: &[Mat<f64>]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.dot(y)).sum()
}

/// Largest step `alpha <= 1` keeping `m + alpha dm` positive definite,
/// found by bisection on Cholesky success.
fn max_step(m: &Mat<f64>, dm: &Mat<f64>) -> f64 {
    let trial = |alpha: f64| -> bool {
        let cand = m.add(&dm.scale(&alpha));
        cholesky(&cand).is_some()
    };
    if trial(1.0) {
        return 1.0;
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    for _ in 0..30 {
        let mid = 0.5 * (lo + hi);
        if trial(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

fn max_step_blocks(m: &[Mat<f64>], dm: &[Mat<f64>]) -> f64 {
    m.iter()
        .zip(dm.iter())
        .filter(|(b, _)| b.n > 0)
        .map(|(b, d)| max_step(b, d))
        .fold(1.0, f64::min)
}

/// Rayon-parallel dense product `a * b` (row blocks).
fn par_mul(a: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let n = a.n;
    if n < 128 {
        return a.mul(b);
    }
    let mut out = Mat::zeros(n);
    out.a
        .par_chunks_mut(n * 32)
        .enumerate()
        .for_each(|(chunk, rows)| {
            let i0 = chunk * 32;
            for (di, row) in rows.chunks_mut(n).enumerate() {
                let i = i0 + di;
                for k in 0..n {
                    let aik = *a.get(i, k);
                    if aik == 0.0 {
                        continue;
                    }
                    let brow = &b.a[k * n..(k + 1) * n];
                    for (r, bv) in row.iter_mut().zip(brow.iter()) {
                        *r += aik * bv;
                    }
                }
            }
        });
    out
}

/// Solves the SDP; see the module docs for the form.
pub fn solve(inst: &SdpInstance, opts: &SolveOptions) -> Result<SdpSolution, super::SdpError> {
    inst.validate()?;
    let m = inst.m();
    let data = BlockData::new(inst);
    let total_dim: usize = data.dims.iter().sum();

    if m == 0 || total_dim == 0 {
        // No constraints: X = 0 is optimal when C has no negative directions;
        // report it and let the caller interpret degenerate inputs.
        let x: Vec<Mat<f64>> = data.dims.iter().map(|&d| Mat::zeros(d)).collect();
        let s = data.c.clone();
        return Ok(SdpSolution {
            status: SdpStatus::Optimal,
            x,
            y: vec![0.0; m],
            s,
            primal_objective: 0.0,
            dual_objective: 0.0,
            primal_infeasibility: 0.0,
            dual_infeasibility: 0.0,
            iterations: 0,
        });
    }

    let norm_b = inst.b.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let norm_c = data.c.iter().map(|b| b.max_abs()).fold(0.0, f64::max);
    let xi = 10.0f64.max((1.0 + norm_b) * (total_dim as f64).sqrt());
    let eta = 10.0f64.max((1.0 + norm_c) * (total_dim as f64).sqrt());

    let mut x: Vec<Mat<f64>> = data.dims.iter().map(|&d| Mat::identity(d).scale(&xi)).collect();
    let mut s: Vec<Mat<f64>> = data
        .dims
        .iter()
        .map(|&d| Mat::identity(d).scale(&eta))
        .collect();
    let mut y = vec![0.0; m];

    let mut best: Option<SdpSolution> = None;
    let mut small_steps = 0usize;
    let mut status = SdpStatus::Stalled;
    let mut iterations = 0usize;

    let mut ax = vec![0.0; m];
    for iter in 0..opts.max_iter {
        iterations = iter + 1;
        // Residuals.
        data.inner_all(&x, &mut ax);
        let rp: Vec<f64> = inst.b.iter().zip(ax.iter()).map(|(b, a)| b - a).collect();
        let aty = data.combine(&y);
        let rd: Vec<Mat<f64>> = data
            .c
            .iter()
            .zip(s.iter())
            .zip(aty.iter())
            .map(|((c, sb), at)| c.sub(sb).sub(at))
            .collect();
        let pobj = dot_blocks(&data.c, &x);
        let dobj: f64 = inst.b.iter().zip(y.iter()).map(|(b, y)| b * y).sum();
        let pinf = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + norm_b);
        let dinf = frob_blocks(&rd) / (1.0 + norm_c);
        let gap = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());

        let current = SdpSolution {
            status: SdpStatus::Stalled,
            x: x.clone(),
            y: y.clone(),
            s: s.clone(),
            primal_objective: pobj,
            dual_objective: dobj,
            primal_infeasibility: pinf,
            dual_infeasibility: dinf,
            iterations,
        };
        let better = match &best {
            None => true,
            Some(b) => {
                gap + pinf + dinf
                    < b.relative_gap() + b.primal_infeasibility + b.dual_infeasibility
            }
        };
        if better {
            best = Some(current);
        }

        if gap <= opts.gap_tol && pinf <= opts.feas_tol && dinf <= opts.feas_tol {
            status = SdpStatus::Optimal;
            break;
        }
        let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if ynorm > 1e12 || dobj.abs() > 1e14 {
            status = SdpStatus::Infeasible;
            break;
        }

        // Factor S and invert per block.
        let s_inv: Vec<Mat<f64>> = match s
            .iter()
            .map(|b| spd_inverse(b).ok_or(()))
            .collect::<Result<Vec<_>, ()>>()
        {
            Ok(v) => v,
            Err(()) => break,
        };

        let mu = dot_blocks(&x, &s) / total_dim as f64;

        // Schur complement M[i][j] = sum_b tr(A_i X A_j S^{-1}).
        let mut schur = vec![0.0f64; m * m];
        {
            let rows: Vec<(usize, Vec<f64>)> = (0..m)
                .into_par_iter()
                .map(|i| {
                    let mut row = vec![0.0f64; m];
                    for (b, cons) in data.per_block.iter().enumerate() {
                        let Some(pos) = cons.iter().position(|(ci, _)| *ci == i) else {
                            continue;
                        };
                        let dim = data.dims[b];
                        let xb = &x[b];
                        let sib = &s_inv[b];
                        // T = X A_i S^{-1} via rank updates from A_i entries.
                        let mut t = vec![0.0f64; dim * dim];
                        for &(p, q, v) in &cons[pos].1 {
                            for r in 0..dim {
                                let xrp = v * xb.get(r, p);
                                let xrq = v * xb.get(r, q);
                                let trow = &mut t[r * dim..(r + 1) * dim];
                                let sq = &sib.a[q * dim..(q + 1) * dim];
                                if p == q {
                                    for (tv, sv) in trow.iter_mut().zip(sq.iter()) {
                                        *tv += xrp * sv;
                                    }
                                } else {
                                    let sp = &sib.a[p * dim..(p + 1) * dim];
                                    for ((tv, sv_q), sv_p) in
                                        trow.iter_mut().zip(sq.iter()).zip(sp.iter())
                                    {
                                        *tv += xrp * sv_q + xrq * sv_p;
                                    }
                                }
                            }
                        }
                        // row[j] += <A_j, T> for j >= i on this block.
                        for (cj, entries) in cons.iter() {
                            if *cj < i {
                                continue;
                            }
                            let mut acc = 0.0;
                            for &(p, q, v) in entries {
                                if p == q {
                                    acc += v * t[p * dim + p];
                                } else {
                                    acc += v * (t[p * dim + q] + t[q * dim + p]);
                                }
                            }
                            row[*cj] += acc;
                        }
                    }
                    (i, row)
                })
                .collect();
            for (i, row) in rows {
                for j in i..m {
                    schur[i * m + j] = row[j];
                    schur[j * m + i] = row[j];
                }
            }
        }

        // Regularize and factor once per iteration.
        let mut reg = SCHUR_REG;
        let factored = loop {
            let mut f = schur.clone();
            for i in 0..m {
                f[i * m + i] += reg;
            }
            if cholesky_inplace_parallel(&mut f, m) {
                break Some(f);
            }
            reg *= 100.0;
            if reg > 1.0 {
                break None;
            }
        };
        let Some(factor) = factored else {
            break;
        };

        // Shared rhs pieces.
        let mut a_sinv = vec![0.0; m];
        data.inner_all(&s_inv, &mut a_sinv);
        // W = X Rd S^{-1} per block.
        let w: Vec<Mat<f64>> = (0..data.dims.len())
            .map(|b| par_mul(&par_mul(&x[b], &rd[b]), &s_inv[b]))
            .collect();
        let mut a_w = vec![0.0; m];
        data.inner_all(&w, &mut a_w);

        let solve_newton = |rhs: &mut Vec<f64>| {
            solve_cholesky_inplace(&factor, m, rhs);
        };

        let direction = |nu: f64,
                         corr: Option<&Vec<Mat<f64>>>,
                         a_corr: Option<&Vec<f64>>|
         -> (Vec<f64>, Vec<Mat<f64>>, Vec<Mat<f64>>) {
            // M dy = b - nu A(S^{-1}) + A(X Rd S^{-1}) [+ A(corr)]
            let mut rhs: Vec<f64> = (0..m)
                .map(|i| inst.b[i] - nu * a_sinv[i] + a_w[i] + a_corr.map_or(0.0, |v| v[i]))
                .collect();
            solve_newton(&mut rhs);
            let dy = rhs;
            let at_dy = data.combine(&dy);
            // dS = Rd - A^T(dy)
            let ds: Vec<Mat<f64>> = rd.iter().zip(at_dy.iter()).map(|(r, a)| r.sub(a)).collect();
            // dX = nu S^{-1} - X - X dS S^{-1} [- corr], symmetrized
            let dx: Vec<Mat<f64>> = (0..data.dims.len())
                .map(|b| {
                    let mut dxb = s_inv[b]
                        .scale(&nu)
                        .sub(&x[b])
                        .sub(&par_mul(&par_mul(&x[b], &ds[b]), &s_inv[b]));
                    if let Some(c) = corr {
                        dxb = dxb.sub(&c[b]);
                    }
                    dxb.symmetrize()
                })
                .collect();
            (dy, dx, ds)
        };

        // Predictor.
        let (_dy_aff, dx_aff, ds_aff) = direction(0.0, None, None);
        let ap_aff = max_step_blocks(&x, &dx_aff);
        let ad_aff = max_step_blocks(&s, &ds_aff);
        let x_aff: Vec<Mat<f64>> = x
            .iter()
            .zip(dx_aff.iter())
            .map(|(xb, d)| xb.add(&d.scale(&ap_aff)))
            .collect();
        let s_aff: Vec<Mat<f64>> = s
            .iter()
            .zip(ds_aff.iter())
            .map(|(sb, d)| sb.add(&d.scale(&ad_aff)))
            .collect();
        let mu_aff = dot_blocks(&x_aff, &s_aff) / total_dim as f64;
        let sigma = ((mu_aff / mu).powi(3)).clamp(1e-8, 1.0);

        // Corrector: the second-order term dX_aff dS_aff S^{-1}.
        let corr: Vec<Mat<f64>> = (0..data.dims.len())
            .map(|b| par_mul(&par_mul(&dx_aff[b], &ds_aff[b]), &s_inv[b]))
            .collect();
        let mut a_corr = vec![0.0; m];
        data.inner_all(&corr, &mut a_corr);

        let (dy, dx, ds) = direction(sigma * mu, Some(&corr), Some(&a_corr));
        let ap = (STEP_FRAC * max_step_blocks(&x, &dx)).min(1.0);
        let ad = (STEP_FRAC * max_step_blocks(&s, &ds)).min(1.0);

        if ap < 1e-10 && ad < 1e-10 {
            small_steps += 1;
            if small_steps >= 3 {
                break;
            }
        } else {
            small_steps = 0;
        }

        for b in 0..data.dims.len() {
            x[b] = x[b].add(&dx[b].scale(&ap));
            s[b] = s[b].add(&ds[b].scale(&ad));
        }
        for i in 0..m {
            y[i] += ad * dy[i];
        }
    }

    let mut sol = best.expect("at least one iterate recorded");
    if status == SdpStatus::Optimal {
        // Report the final iterate, which met the tolerances.
        data.inner_all(&x, &mut ax);
        let rp: Vec<f64> = inst.b.iter().zip(ax.iter()).map(|(b, a)| b - a).collect();
        let aty = data.combine(&y);
        let rd: Vec<Mat<f64>> = data
            .c
            .iter()
            .zip(s.iter())
            .zip(aty.iter())
            .map(|((c, sb), at)| c.sub(sb).sub(at))
            .collect();
        sol = SdpSolution {
            status,
            primal_objective: dot_blocks(&data.c, &x),
            dual_objective: inst.b.iter().zip(y.iter()).map(|(b, y)| b * y).sum(),
            primal_infeasibility: rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (1.0 + norm_b),
            dual_infeasibility: frob_blocks(&rd) / (1.0 + norm_c),
            x,
            y,
            s,
            iterations,
        };
    } else {
        sol.status = status;
        sol.iterations = iterations;
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(block: usize, i: usize, j: usize, value: f64) -> Entry {
        Entry { block, i, j, value }
    }

    #[test]
    fn scalar_lp_as_sdp() {
        // min x s.t. x = 3, x >= 0
        let inst = SdpInstance {
            block_dims: vec![1],
            b: vec![3.0],
            objective: vec![entry(0, 0, 0, 1.0)],
            constraints: vec![vec![entry(0, 0, 0, 1.0)]],
        };
        let sol = solve(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        assert!((sol.primal_objective - 3.0).abs() < 1e-6);
        assert!((sol.x[0].get(0, 0) - 3.0).abs() < 1e-6);
    }

    #[test]
    fn diagonal_lp() {
        // min x1 + 2 x2 s.t. x1 + x2 = 1, x1 - x2 = 0.2, x >= 0 (2x2 diag)
        let inst = SdpInstance {
            block_dims: vec![2],
            b: vec![1.0, 0.2],
            objective: vec![entry(0, 0, 0, 1.0), entry(0, 1, 1, 2.0)],
            constraints: vec![
                vec![entry(0, 0, 0, 1.0), entry(0, 1, 1, 1.0)],
                vec![entry(0, 0, 0, 1.0), entry(0, 1, 1, -1.0)],
            ],
        };
        let sol = solve(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        // x1 = 0.6, x2 = 0.4, objective 1.4
        assert!((sol.primal_objective - 1.4).abs() < 1e-6);
        assert!((sol.dual_objective - 1.4).abs() < 1e-6);
    }

    #[test]
    fn smallest_eigenvalue_problem() {
        // max y s.t. A - y I >= 0 gives the smallest eigenvalue of A.
        // In primal form: min <A, X> s.t. <I, X> = 1, X >= 0.
        let a = [[2.0, 1.0, 0.0], [1.0, 3.0, 0.5], [0.0, 0.5, 1.5]];
        let mut obj = Vec::new();
        for i in 0..3 {
            for j in i..3 {
                if a[i][j] != 0.0 {
                    obj.push(entry(0, i, j, a[i][j]));
                }
            }
        }
        let inst = SdpInstance {
            block_dims: vec![3],
            b: vec![1.0],
            objective: obj,
            constraints: vec![vec![
                entry(0, 0, 0, 1.0),
                entry(0, 1, 1, 1.0),
                entry(0, 2, 2, 1.0),
            ]],
        };
        let sol = solve(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        let mut am = Mat::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                am.set(i, j, a[i.min(j)][i.max(j)]);
            }
        }
        let eigs = crate::linalg::sym_eigenvalues(&am);
        assert!((sol.primal_objective - eigs[0]).abs() < 1e-6);
    }

    #[test]
    fn two_blocks_and_duality() {
        // min tr(X1) + tr(X2) s.t. X1[0,1] ... a feasibility-style instance:
        // <E01, X1> = 1 forces an off-diagonal entry.
        let inst = SdpInstance {
            block_dims: vec![2, 2],
            b: vec![1.0, 0.5],
            objective: vec![
                entry(0, 0, 0, 1.0),
                entry(0, 1, 1, 1.0),
                entry(1, 0, 0, 1.0),
                entry(1, 1, 1, 1.0),
            ],
            constraints: vec![
                vec![entry(0, 0, 1, 0.5)],
                vec![entry(1, 0, 1, 0.5)],
            ],
        };
        let sol = solve(&inst, &SolveOptions::default()).unwrap();
        assert_eq!(sol.status, SdpStatus::Optimal);
        // min tr(X) s.t. X01 = c has optimum 2|c| (X = |c| [[1,±1],[±1,1]]),
        // so the blocks contribute 2 and 1.
        assert!((sol.primal_objective - 3.0).abs() < 1e-6, "{}", sol.primal_objective);
        assert!(sol.relative_gap() < 1e-6);
        // KKT feasibility
        assert!(sol.primal_infeasibility < 1e-7);
        assert!(sol.dual_infeasibility < 1e-7);
    }

    #[test]
    fn infeasible_detected() {
        // x = -1 with x >= 0 is infeasible.
        let inst = SdpInstance {
            block_dims: vec![1],
            b: vec![-1.0],
            objective: vec![entry(0, 0, 0, 1.0)],
            constraints: vec![vec![entry(0, 0, 0, 1.0)]],
        };
        let sol = solve(&inst, &SolveOptions::default()).unwrap();
        assert_ne!(sol.status, SdpStatus::Optimal);
    }

    #[test]
    fn random_feasible_instances_reach_kkt() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..5 {
            let dim = 4 + trial;
            let m = 3 + trial;
            // Construct a strictly feasible pair: X0 = I, S0 = I, y0 = 0,
            // b = A(I), C = S0 + 0 = I + random A-combination keeps duals okay.
            let mut constraints = Vec::new();
            for _ in 0..m {
                let mut es = Vec::new();
                for i in 0..dim {
                    for j in i..dim {
                        if rng.gen_bool(0.4) {
                            es.push(entry(0, i, j, rng.gen_range(-1.0..1.0)));
                        }
                    }
                }
                if es.is_empty() {
                    es.push(entry(0, 0, 0, 1.0));
                }
                constraints.push(es);
            }
            let inst_tmp = SdpInstance {
                block_dims: vec![dim],
                b: vec![0.0; m],
                objective: vec![],
                constraints: constraints.clone(),
            };
            let data = BlockData::new(&inst_tmp);
            let ident = vec![Mat::identity(dim)];
            let mut b = vec![0.0; m];
            data.inner_all(&ident, &mut b);
            // C = I (dual feasible with y = 0, S = I)
            let objective: Vec<Entry> = (0..dim).map(|i| entry(0, i, i, 1.0)).collect();
            let inst = SdpInstance {
                block_dims: vec![dim],
                b,
                objective,
                constraints,
            };
            let sol = solve(&inst, &SolveOptions::default()).unwrap();
            assert_eq!(sol.status, SdpStatus::Optimal, "trial {}", trial);
            assert!(sol.relative_gap() < 1e-6);
            assert!(sol.primal_infeasibility < 1e-6);
            assert!(sol.dual_infeasibility < 1e-6);
            // X PSD within tolerance
            let eigs = crate::linalg::sym_eigenvalues(&sol.x[0]);
            assert!(eigs[0] > -1e-7);
        }
    }
}
