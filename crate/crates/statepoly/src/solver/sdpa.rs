//! Bit-exact SDPA sparse (`.dat-s`) reader and writer.
//!
//! Layout: line 1 the constraint count `m`, line 2 the block count, line 3
//! the block sizes space separated (no diagonal-block shorthand), line 4 the
//! right-hand side vector, then one line per nonzero
//!
//! ```text
//! matno blockno i j value
//! ```
//!
//! with `matno` 0 for the objective, 1-based block numbers, 1-based `i <= j`
//! and values in shortest round-trip decimal form. The objective comes
//! first, then constraints by index, entries sorted by `(blockno, i, j)`.
//! On import, comment lines starting with `"` or `*` are tolerated.

use super::{Entry, SdpInstance};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SdpaError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: duplicate entry (mat {mat}, block {block}, {i}, {j})")]
    Duplicate {
        line: usize,
        mat: usize,
        block: usize,
        i: usize,
        j: usize,
    },
}

fn sorted_entries(entries: &[Entry]) -> Vec<Entry> {
    let mut v = entries.to_vec();
    v.sort_by(|a, b| (a.block, a.i, a.j).cmp(&(b.block, b.i, b.j)));
    v
}

/// Renders an instance in the SDPA sparse format.
pub fn export_sdpa_string(inst: &SdpInstance) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", inst.m());
    let _ = writeln!(out, "{}", inst.n_blocks());
    let sizes: Vec<String> = inst.block_dims.iter().map(|d| d.to_string()).collect();
    let _ = writeln!(out, "{}", sizes.join(" "));
    let bs: Vec<String> = inst.b.iter().map(|v| format!("{}", v)).collect();
    let _ = writeln!(out, "{}", bs.join(" "));
    for (mat, entries) in std::iter::once(&inst.objective)
        .chain(inst.constraints.iter())
        .enumerate()
    {
        for e in sorted_entries(entries) {
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                mat,
                e.block + 1,
                e.i + 1,
                e.j + 1,
                e.value
            );
        }
    }
    out
}

/// Writes the SDPA sparse file at `path`.
pub fn export_sdpa(inst: &SdpInstance, path: &Path) -> Result<(), SdpaError> {
    std::fs::write(path, export_sdpa_string(inst))?;
    Ok(())
}

/// Parses an SDPA sparse file.
pub fn import_sdpa(path: &Path) -> Result<SdpInstance, SdpaError> {
    let text = std::fs::read_to_string(path)?;
    import_sdpa_str(&text)
}

/// Parses SDPA sparse text.
pub fn import_sdpa_str(text: &str) -> Result<SdpInstance, SdpaError> {
    let err = |line: usize, msg: &str| SdpaError::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| {
            let t = l.trim_start();
            !t.is_empty() && !t.starts_with('"') && !t.starts_with('*')
        });

    let (ln_m, m_line) = lines.next().ok_or_else(|| err(0, "missing m line"))?;
    let m: usize = m_line
        .trim()
        .parse()
        .map_err(|_| err(ln_m, "m must be a nonnegative integer"))?;

    let (ln_nb, nb_line) = lines.next().ok_or_else(|| err(ln_m, "missing block count"))?;
    let nblocks: usize = nb_line
        .trim()
        .parse()
        .map_err(|_| err(ln_nb, "block count must be a nonnegative integer"))?;

    let (ln_sz, sz_line) = lines.next().ok_or_else(|| err(ln_nb, "missing block sizes"))?;
    let block_dims: Vec<usize> = sz_line
        .split_whitespace()
        .map(|t| {
            t.parse::<i64>()
                .ok()
                .filter(|&d| d > 0)
                .map(|d| d as usize)
                .ok_or_else(|| err(ln_sz, "block sizes must be positive integers"))
        })
        .collect::<Result<_, _>>()?;
    if block_dims.len() != nblocks {
        return Err(err(ln_sz, "block size count does not match the block count"));
    }

    // For m = 0 the b line is empty and disappears under the blank-line
    // filter; nothing to consume.
    let b: Vec<f64> = if m == 0 {
        Vec::new()
    } else {
        let (ln_b, b_line) = lines.next().ok_or_else(|| err(ln_sz, "missing b vector"))?;
        let b: Vec<f64> = b_line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| err(ln_b, "bad b entry")))
            .collect::<Result<_, _>>()?;
        if b.len() != m {
            return Err(err(ln_b, "b vector length does not match m"));
        }
        b
    };

    let mut inst = SdpInstance {
        block_dims,
        b,
        objective: Vec::new(),
        constraints: vec![Vec::new(); m],
    };
    let mut seen = std::collections::HashSet::new();
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(err(ln, "entry lines need 5 fields: matno blockno i j value"));
        }
        let mat: usize = toks[0].parse().map_err(|_| err(ln, "bad matno"))?;
        let block: usize = toks[1].parse().map_err(|_| err(ln, "bad blockno"))?;
        let i: usize = toks[2].parse().map_err(|_| err(ln, "bad row index"))?;
        let j: usize = toks[3].parse().map_err(|_| err(ln, "bad column index"))?;
        let value: f64 = toks[4].parse().map_err(|_| err(ln, "bad value"))?;
        if mat > m {
            return Err(err(ln, "matno out of range"));
        }
        if block == 0 || block > inst.block_dims.len() {
            return Err(err(ln, "blockno out of range"));
        }
        let dim = inst.block_dims[block - 1];
        if i == 0 || j == 0 || i > j || j > dim {
            return Err(err(ln, "indices must satisfy 1 <= i <= j <= block size"));
        }
        if !seen.insert((mat, block, i, j)) {
            return Err(SdpaError::Duplicate {
                line: ln,
                mat,
                block: block - 1,
                i: i - 1,
                j: j - 1,
            });
        }
        let entry = Entry {
            block: block - 1,
            i: i - 1,
            j: j - 1,
            value,
        };
        if mat == 0 {
            inst.objective.push(entry);
        } else {
            inst.constraints[mat - 1].push(entry);
        }
    }
    Ok(inst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar_instance() -> SdpInstance {
        // min x s.t. x = 3, x >= 0 (one 1x1 block)
        SdpInstance {
            block_dims: vec![1],
            b: vec![3.0],
            objective: vec![Entry {
                block: 0,
                i: 0,
                j: 0,
                value: 1.0,
            }],
            constraints: vec![vec![Entry {
                block: 0,
                i: 0,
                j: 0,
                value: 1.0,
            }]],
        }
    }

    #[test]
    fn empty_problem_is_four_lines() {
        let inst = SdpInstance {
            block_dims: vec![1],
            b: vec![],
            objective: vec![],
            constraints: vec![],
        };
        let s = export_sdpa_string(&inst);
        assert_eq!(s, "0\n1\n1\n\n");
        let back = import_sdpa_str(&s).unwrap();
        assert_eq!(back.m(), 0);
        assert_eq!(back.block_dims, vec![1]);
    }

    #[test]
    fn scalar_golden_file() {
        let s = export_sdpa_string(&scalar_instance());
        assert_eq!(s, "1\n1\n1\n3\n0 1 1 1 1\n1 1 1 1 1\n");
    }

    #[test]
    fn export_import_export_is_byte_identical() {
        let inst = SdpInstance {
            block_dims: vec![2, 3],
            b: vec![1.5, -0.25],
            objective: vec![
                Entry {
                    block: 0,
                    i: 0,
                    j: 1,
                    value: 0.1,
                },
                Entry {
                    block: 1,
                    i: 2,
                    j: 2,
                    value: -7.0,
                },
            ],
            constraints: vec![
                vec![Entry {
                    block: 0,
                    i: 0,
                    j: 0,
                    value: 1.0 / 3.0,
                }],
                vec![Entry {
                    block: 1,
                    i: 0,
                    j: 2,
                    value: 1e-9,
                }],
            ],
        };
        let s1 = export_sdpa_string(&inst);
        let back = import_sdpa_str(&s1).unwrap();
        let s2 = export_sdpa_string(&back);
        assert_eq!(s1, s2);
    }

    #[test]
    fn comments_tolerated_and_errors_positioned() {
        let ok = "\" comment\n1\n* another\n1\n1\n3\n0 1 1 1 1\n";
        assert!(import_sdpa_str(ok).is_ok());
        let bad = "1\n1\n1\n3\n0 1 2 1 1\n";
        match import_sdpa_str(bad) {
            Err(SdpaError::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("expected parse error, got {:?}", other),
        }
        let dup = "1\n1\n1\n3\n1 1 1 1 1\n1 1 1 1 2\n";
        assert!(matches!(
            import_sdpa_str(dup),
            Err(SdpaError::Duplicate { line: 6, .. })
        ));
    }
}
