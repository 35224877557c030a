//! Instance files: a self-describing text format so generated runs can be
//! replayed without regenerating.
//!
//! Layout (all floats in shortest round-trip decimal form):
//!
//! ```text
//! spectra-instance v1
//! n <n>
//! m <m>
//! q <q>
//! seed <seed>
//! pairs
//! <i> <j>        (m lines, zero-based, i <= j)
//! b
//! <value>        (m lines)
//! basis
//! <q values>     (n lines: row i holds Q[i][0..q])
//! end
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::{ProblemError, SpectraInstance};

pub fn write_instance(inst: &SpectraInstance, path: &Path) -> Result<(), ProblemError> {
    let mut out = String::new();
    let _ = writeln!(out, "spectra-instance v1");
    let _ = writeln!(out, "n {}", inst.matrix_dim());
    let _ = writeln!(out, "m {}", inst.equations());
    let _ = writeln!(out, "q {}", inst.planted_rank());
    let _ = writeln!(out, "seed {}", inst.seed());
    let _ = writeln!(out, "pairs");
    for &(i, j) in inst.pairs() {
        let _ = writeln!(out, "{i} {j}");
    }
    let _ = writeln!(out, "b");
    for v in inst.rhs() {
        let _ = writeln!(out, "{v}");
    }
    let _ = writeln!(out, "basis");
    for i in 0..inst.matrix_dim() {
        let row: Vec<String> = inst.basis().iter().map(|col| col[i].to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    let _ = writeln!(out, "end");
    std::fs::write(path, out)?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<SpectraInstance, ProblemError> {
    let content = std::fs::read_to_string(path)?;
    parse_instance(&content)
}

fn parse_instance(content: &str) -> Result<SpectraInstance, ProblemError> {
    let bad = |msg: &str| ProblemError::MalformedInstance(msg.to_string());
    let mut lines = content.lines();
    if lines.next().map(str::trim) != Some("spectra-instance v1") {
        return Err(bad("missing `spectra-instance v1` header"));
    }
    let mut header = |key: &str| -> Result<u64, ProblemError> {
        let line = lines
            .next()
            .ok_or_else(|| bad("truncated header"))?
            .trim()
            .to_string();
        let (k, v) = line
            .split_once(' ')
            .ok_or_else(|| bad("header line needs `key value`"))?;
        if k != key {
            return Err(bad(&format!("expected `{key}`, found `{k}`")));
        }
        v.parse()
            .map_err(|_| bad(&format!("bad integer for `{key}`")))
    };
    let n = header("n")? as usize;
    let m = header("m")? as usize;
    let q = header("q")? as usize;
    let seed = header("seed")?;

    if lines.next().map(str::trim) != Some("pairs") {
        return Err(bad("missing `pairs` section"));
    }
    let mut pairs = Vec::with_capacity(m);
    for _ in 0..m {
        let line = lines.next().ok_or_else(|| bad("truncated pairs"))?;
        let mut it = line.split_whitespace();
        let i: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad pair index"))?;
        let j: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("bad pair index"))?;
        if i > j || j >= n {
            return Err(bad("pair out of range (need i <= j < n)"));
        }
        pairs.push((i, j));
    }

    if lines.next().map(str::trim) != Some("b") {
        return Err(bad("missing `b` section"));
    }
    let mut b = Vec::with_capacity(m);
    for _ in 0..m {
        let line = lines.next().ok_or_else(|| bad("truncated b"))?;
        b.push(
            line.trim()
                .parse::<f64>()
                .map_err(|_| bad("bad float in b"))?,
        );
    }

    if lines.next().map(str::trim) != Some("basis") {
        return Err(bad("missing `basis` section"));
    }
    let mut basis = vec![vec![0.0; n]; q];
    for i in 0..n {
        let line = lines.next().ok_or_else(|| bad("truncated basis"))?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad("bad float in basis"))?;
        if vals.len() != q {
            return Err(bad("basis row has wrong width"));
        }
        for (c, v) in vals.into_iter().enumerate() {
            basis[c][i] = v;
        }
    }
    if lines.next().map(str::trim) != Some("end") {
        return Err(bad("missing `end` marker"));
    }

    SpectraInstance::from_parts(n, m, q, seed, pairs, b, basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::gen_spectra_instance;
    use crate::solve::NlsProblem;

    #[test]
    fn round_trip_preserves_instance() {
        let inst = gen_spectra_instance(8, 6, 3, 17).unwrap();
        let dir = std::env::temp_dir().join("lmproj-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("inst.txt");
        write_instance(&inst, &path).unwrap();
        let back = read_instance(&path).unwrap();
        assert_eq!(inst.pairs(), back.pairs());
        assert_eq!(inst.rhs(), back.rhs());
        assert_eq!(inst.x_star().data(), back.x_star().data());
        let x0 = crate::problems::spectra_start(8, 0.5);
        assert_eq!(inst.residual(&x0), back.residual(&x0));
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_instance("").is_err());
        assert!(parse_instance("spectra-instance v1\nn 3\n").is_err());
        let broken = "spectra-instance v1\nn 3\nm 1\nq 1\nseed 0\npairs\n2 1\n";
        assert!(parse_instance(broken).is_err());
    }
}
