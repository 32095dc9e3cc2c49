//! Binary linear codes given by parity-check matrices.
//!
//! Matrices are stored densely (all lengths of interest are below ~1000) with
//! the row supports precomputed, since every geometric construction iterates
//! over the support of each check.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default limit on the code dimension for exhaustive codeword enumeration.
pub const DEFAULT_MAX_DIMENSION: usize = 28;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheckMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
    supports: Vec<Vec<usize>>,
}

impl ParityCheckMatrix {
    /// Builds a matrix from row-major 0/1 entries, rejecting all-zero rows
    /// and columns.
    pub fn new(rows: usize, cols: usize, entries: Vec<u8>) -> Result<Self> {
        if rows < 1 {
            return Err(Error::InvalidMatrix("at least one row required".into()));
        }
        if cols < 2 {
            return Err(Error::InvalidMatrix("at least two columns required".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        if let Some(bad) = entries.iter().find(|&&e| e > 1) {
            return Err(Error::InvalidMatrix(format!("entry {bad} is not binary")));
        }
        let supports: Vec<Vec<usize>> = (0..rows)
            .map(|r| (0..cols).filter(|&c| entries[r * cols + c] == 1).collect())
            .collect();
        if let Some(r) = supports.iter().position(|s| s.is_empty()) {
            return Err(Error::InvalidMatrix(format!("row {} is all zero", r + 1)));
        }
        let mut col_seen = vec![false; cols];
        for s in &supports {
            for &c in s {
                col_seen[c] = true;
            }
        }
        if let Some(c) = col_seen.iter().position(|&seen| !seen) {
            return Err(Error::InvalidMatrix(format!("column {} is all zero", c + 1)));
        }
        Ok(ParityCheckMatrix {
            rows,
            cols,
            entries,
            supports,
        })
    }

    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidMatrix("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Code length n.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.entries[row * self.cols + col]
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    /// Column indices of the ones in `row` (0-based, ascending).
    pub fn row_support(&self, row: usize) -> &[usize] {
        &self.supports[row]
    }

    pub fn row_supports(&self) -> &[Vec<usize>] {
        &self.supports
    }

    pub fn column_support(&self, col: usize) -> Vec<usize> {
        (0..self.rows).filter(|&r| self.get(r, col) == 1).collect()
    }

    pub fn column_weights(&self) -> Vec<usize> {
        let mut w = vec![0; self.cols];
        for s in &self.supports {
            for &c in s {
                w[c] += 1;
            }
        }
        w
    }

    pub fn row_weights(&self) -> Vec<usize> {
        self.supports.iter().map(Vec::len).collect()
    }

    pub fn ones(&self) -> usize {
        self.supports.iter().map(Vec::len).sum()
    }

    /// True when `perm` is a permutation of the columns that maps the set of
    /// row supports onto itself.
    pub fn is_column_automorphism(&self, perm: &[usize]) -> bool {
        if perm.len() != self.cols {
            return false;
        }
        let mut seen = vec![false; self.cols];
        for &c in perm {
            if c >= self.cols || std::mem::replace(&mut seen[c], true) {
                return false;
            }
        }
        let supports: std::collections::BTreeSet<&Vec<usize>> = self.row_supports().iter().collect();
        supports.iter().all(|u| {
            let mut image: Vec<usize> = u.iter().map(|&c| perm[c]).collect();
            image.sort_unstable();
            supports.contains(&image)
        })
    }

    /// True when no two columns share more than one row, i.e. the Tanner
    /// graph has girth greater than four.
    pub fn is_four_cycle_free(&self) -> bool {
        let col_rows: Vec<Vec<usize>> = (0..self.cols).map(|c| self.column_support(c)).collect();
        let mut shared = vec![0u32; self.cols];
        for (i, rows) in col_rows.iter().enumerate() {
            shared.iter_mut().for_each(|s| *s = 0);
            for &r in rows {
                for &j in &self.supports[r] {
                    if j > i {
                        shared[j] += 1;
                        if shared[j] > 1 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Syndrome check over GF(2) for a 0/1 word.
    pub fn is_codeword(&self, word: &[u8]) -> bool {
        word.len() == self.cols
            && self
                .supports
                .iter()
                .all(|s| s.iter().filter(|&&c| word[c] & 1 == 1).count() % 2 == 0)
    }

    /// Rows packed as GF(2) bitsets.
    pub(crate) fn packed_rows(&self) -> Vec<BitRow> {
        self.supports
            .iter()
            .map(|s| {
                let mut b = BitRow::zeros(self.cols);
                for &c in s {
                    b.set(c);
                }
                b
            })
            .collect()
    }

    /// GF(2) rank.
    pub fn rank(&self) -> usize {
        rref(self.packed_rows(), self.cols).pivots.len()
    }

    pub fn dimension(&self) -> usize {
        self.cols - self.rank()
    }
}

/// Fixed-length GF(2) vector.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) struct BitRow {
    words: Vec<u64>,
}

impl BitRow {
    pub(crate) fn zeros(len: usize) -> Self {
        BitRow {
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub(crate) fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub(crate) fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub(crate) fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub(crate) fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

struct Echelon {
    rows: Vec<BitRow>,
    pivots: Vec<usize>,
}

/// Reduced row echelon form over GF(2); zero rows are dropped.
fn rref(mut rows: Vec<BitRow>, cols: usize) -> Echelon {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    Echelon { rows, pivots }
}

/// Basis of the code (null space of H over GF(2)), one row per dimension.
pub(crate) fn kernel_basis(h: &ParityCheckMatrix) -> Vec<BitRow> {
    let n = h.cols();
    let ech = rref(h.packed_rows(), n);
    let mut is_pivot = vec![false; n];
    for &p in &ech.pivots {
        is_pivot[p] = true;
    }
    (0..n)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut v = BitRow::zeros(n);
            v.set(free);
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                if row.get(free) {
                    v.set(p);
                }
            }
            v
        })
        .collect()
}

/// Visits every codeword once in Gray-code order, starting with zero.
pub(crate) fn for_each_codeword(
    h: &ParityCheckMatrix,
    max_dimension: usize,
    mut visit: impl FnMut(&BitRow),
) -> Result<usize> {
    let basis = kernel_basis(h);
    let k = basis.len();
    if k > max_dimension {
        return Err(Error::Guard {
            what: "code dimension",
            limit: max_dimension,
            actual: k,
        });
    }
    let mut word = BitRow::zeros(h.cols());
    visit(&word);
    for step in 1u64..(1u64 << k) {
        word.xor_assign(&basis[step.trailing_zeros() as usize]);
        visit(&word);
    }
    Ok(k)
}

/// All codewords as 0/1 vectors, in Gray-code order.
pub fn codewords(h: &ParityCheckMatrix, max_dimension: usize) -> Result<Vec<Vec<u8>>> {
    let n = h.cols();
    let mut out = Vec::new();
    for_each_codeword(h, max_dimension, |w| {
        out.push((0..n).map(|i| w.get(i) as u8).collect());
    })?;
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodeFacts {
    pub n: usize,
    pub k: usize,
    /// Minimum nonzero Hamming weight; `None` when the code is trivial.
    pub d_min: Option<usize>,
    pub weight_spectrum: BTreeMap<usize, u64>,
}

pub fn code_facts(h: &ParityCheckMatrix) -> Result<CodeFacts> {
    code_facts_with_guard(h, DEFAULT_MAX_DIMENSION)
}

pub fn code_facts_with_guard(h: &ParityCheckMatrix, max_dimension: usize) -> Result<CodeFacts> {
    let mut counts = vec![0u64; h.cols() + 1];
    let k = for_each_codeword(h, max_dimension, |w| counts[w.count_ones()] += 1)?;
    let weight_spectrum: BTreeMap<usize, u64> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(w, &c)| (w, c))
        .collect();
    let d_min = weight_spectrum.keys().copied().find(|&w| w > 0);
    Ok(CodeFacts {
        n: h.cols(),
        k,
        d_min,
        weight_spectrum,
    })
}

/// Hamming code of redundancy `m`: columns are the nonzero m-bit integers
/// 1..2^m-1 in increasing order, most significant bit in row 0.
pub fn hamming_code(m: usize) -> Result<ParityCheckMatrix> {
    if !(2..=5).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "hamming redundancy must be in 2..=5, got {m}"
        )));
    }
    let n = (1usize << m) - 1;
    let mut entries = vec![0u8; m * n];
    for c in 0..n {
        let v = c + 1;
        for r in 0..m {
            entries[r * n + c] = ((v >> (m - 1 - r)) & 1) as u8;
        }
    }
    ParityCheckMatrix::new(m, n, entries)
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn mul_order(x: u64, p: u64) -> u64 {
    let mut acc = x % p;
    let mut ord = 1;
    while acc != 1 {
        acc = acc * x % p;
        ord += 1;
    }
    ord
}

/// Smallest element of multiplicative order exactly `order` modulo prime `p`.
fn smallest_of_order(order: u64, p: u64) -> Option<u64> {
    (2..p).find(|&x| mul_order(x, p) == order)
}

/// Group-structured (3,5)-regular code of length 5p: a 3x5 array of p x p
/// circulant permutation matrices, block (j, k) shifted by b^j a^k mod p.
pub fn tanner_group_code(p: u64) -> Result<ParityCheckMatrix> {
    if !is_prime(p) {
        return Err(Error::InvalidArgument(format!("{p} is not prime")));
    }
    if p % 15 != 1 {
        return Err(Error::InvalidArgument(format!("{p} is not 1 mod 15")));
    }
    let a = smallest_of_order(5, p).expect("order-5 element exists when 5 | p-1");
    let b = smallest_of_order(3, p).expect("order-3 element exists when 3 | p-1");
    let pu = p as usize;
    let (rows, cols) = (3 * pu, 5 * pu);
    let mut entries = vec![0u8; rows * cols];
    let mut bj = 1u64;
    for j in 0..3 {
        let mut shift = bj;
        for k in 0..5 {
            for r in 0..pu {
                let c = (r + shift as usize) % pu;
                entries[(j * pu + r) * cols + k * pu + c] = 1;
            }
            shift = shift * a % p;
        }
        bj = bj * b % p;
    }
    ParityCheckMatrix::new(rows, cols, entries)
}

/// Generators of a group of column permutations preserving the rows of
/// [`tanner_group_code`]: the cyclic shift inside every block and the
/// multiplications by `a` and `b`, which also permute the blocks.
pub fn tanner_automorphisms(p: u64) -> Result<Vec<Vec<usize>>> {
    tanner_group_code(p)?;
    let a = smallest_of_order(5, p).expect("checked by the constructor") as usize;
    let b = smallest_of_order(3, p).expect("checked by the constructor") as usize;
    let pu = p as usize;
    let map = |f: &dyn Fn(usize, usize) -> (usize, usize)| -> Vec<usize> {
        (0..5 * pu)
            .map(|col| {
                let (k, c) = f(col / pu, col % pu);
                k * pu + c
            })
            .collect()
    };
    Ok(vec![
        map(&|k, c| (k, (c + 1) % pu)),
        map(&|k, c| ((k + 1) % 5, a * c % pu)),
        map(&|k, c| (k, b * c % pu)),
    ])
}

/// Parses the alist interchange format (1-based indices, zero padding
/// accepted).
pub fn load_alist(text: &str) -> Result<ParityCheckMatrix> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let mut last_line = 0;
    let mut next_numbers = |what: &str| -> Result<(usize, Vec<usize>)> {
        let (no, line) = lines
            .next()
            .ok_or_else(|| Error::parse(last_line + 1, format!("unexpected end of input, expected {what}")))?;
        last_line = no;
        let nums = line
            .split_whitespace()
            .map(|t| {
                t.parse::<usize>()
                    .map_err(|_| Error::parse(no, format!("invalid integer {t:?} in {what}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((no, nums))
    };

    let (no, header) = next_numbers("header")?;
    let [n, m] = header[..] else {
        return Err(Error::parse(no, "header must be `n m`"));
    };
    if n < 2 || m < 1 {
        return Err(Error::parse(no, format!("bad dimensions {n} x {m}")));
    }
    // Sizes beyond this are not alist files anyone means to load.
    if n.saturating_mul(m) > 1 << 28 {
        return Err(Error::parse(no, "matrix too large"));
    }
    let (no, maxdeg) = next_numbers("maximum degrees")?;
    let [max_col, max_row] = maxdeg[..] else {
        return Err(Error::parse(no, "expected two maximum degrees"));
    };
    let (no_cd, col_deg) = next_numbers("column degrees")?;
    if col_deg.len() != n {
        return Err(Error::parse(
            no_cd,
            format!("expected {n} column degrees, got {}", col_deg.len()),
        ));
    }
    let (no_rd, row_deg) = next_numbers("row degrees")?;
    if row_deg.len() != m {
        return Err(Error::parse(
            no_rd,
            format!("expected {m} row degrees, got {}", row_deg.len()),
        ));
    }
    if col_deg.iter().any(|&d| d > max_col) {
        return Err(Error::parse(no_cd, "column degree exceeds maximum"));
    }
    if row_deg.iter().any(|&d| d > max_row) {
        return Err(Error::parse(no_rd, "row degree exceeds maximum"));
    }

    // Lists hold `deg` 1-based indices in 1..=bound, optionally zero-padded.
    let check_list = |no: usize, list: &[usize], deg: usize, max_deg: usize, bound: usize, what: &str| -> Result<()> {
        if list.len() < deg {
            return Err(Error::parse(
                no,
                format!("degree mismatch: {what} lists {} entries, degree is {deg}", list.len()),
            ));
        }
        if list.len() > max_deg.max(deg) {
            return Err(Error::parse(no, format!("{what} has more than {max_deg} entries")));
        }
        if let Some(&bad) = list[..deg].iter().find(|&&v| v == 0 || v > bound) {
            return Err(Error::parse(
                no,
                format!("index out of range: {bad} not in 1..={bound}"),
            ));
        }
        if list[deg..].iter().any(|&v| v != 0) {
            return Err(Error::parse(
                no,
                format!("degree mismatch: {what} lists more than {deg} entries"),
            ));
        }
        Ok(())
    };

    let mut entries = vec![0u8; n * m];
    for (c, &deg) in col_deg.iter().enumerate() {
        let (no, list) = next_numbers("column list")?;
        check_list(no, &list, deg, max_col, m, &format!("column {}", c + 1))?;
        for &r in &list[..deg] {
            let e = &mut entries[(r - 1) * n + c];
            if *e == 1 {
                return Err(Error::parse(no, format!("duplicate row index {r}")));
            }
            *e = 1;
        }
    }
    let mut seen = vec![0u8; n * m];
    for (r, &deg) in row_deg.iter().enumerate() {
        let (no, list) = next_numbers("row list")?;
        check_list(no, &list, deg, max_row, n, &format!("row {}", r + 1))?;
        for &c in &list[..deg] {
            let idx = r * n + c - 1;
            if seen[idx] == 1 {
                return Err(Error::parse(no, format!("duplicate column index {c}")));
            }
            seen[idx] = 1;
            if entries[idx] != 1 {
                return Err(Error::parse(
                    no,
                    format!("degree mismatch: row {} lists column {c} which does not list it", r + 1),
                ));
            }
        }
    }
    let h = ParityCheckMatrix::new(m, n, entries).map_err(|e| Error::parse(last_line, e.to_string()))?;
    if h.row_weights() != row_deg {
        return Err(Error::parse(no_rd, "degree mismatch between row and column lists"));
    }
    Ok(h)
}

pub fn write_alist(h: &ParityCheckMatrix) -> String {
    let (n, m) = (h.cols(), h.rows());
    let cw = h.column_weights();
    let rw = h.row_weights();
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    let mut s = String::new();
    let _ = writeln!(s, "{n} {m}");
    let _ = writeln!(s, "{} {}", cw.iter().max().unwrap(), rw.iter().max().unwrap());
    let _ = writeln!(s, "{}", join(&cw));
    let _ = writeln!(s, "{}", join(&rw));
    for c in 0..n {
        let rows: Vec<usize> = h.column_support(c).iter().map(|r| r + 1).collect();
        let _ = writeln!(s, "{}", join(&rows));
    }
    for r in 0..m {
        let cols: Vec<usize> = h.row_support(r).iter().map(|c| c + 1).collect();
        let _ = writeln!(s, "{}", join(&cols));
    }
    s
}

/// Names a code: either a built-in constructor or an alist file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeSpec {
    Hamming { m: usize },
    Tanner { p: u64 },
    Alist(PathBuf),
}

pub const BUILTIN_NAMES: [&str; 6] = [
    "hamming-7-4",
    "hamming-15-11",
    "tanner-155",
    "tanner-305",
    "tanner-755",
    "tanner-905",
];

impl CodeSpec {
    /// Built-in names map to constructors; anything else is taken as a path.
    pub fn parse(s: &str) -> CodeSpec {
        match s {
            "hamming-7-4" => CodeSpec::Hamming { m: 3 },
            "hamming-15-11" => CodeSpec::Hamming { m: 4 },
            _ => match s.strip_prefix("tanner-").and_then(|t| t.parse::<u64>().ok()) {
                Some(len) if BUILTIN_NAMES.contains(&s) => CodeSpec::Tanner { p: len / 5 },
                _ => CodeSpec::Alist(PathBuf::from(s)),
            },
        }
    }

    /// Known column automorphisms of the built-in code (empty when none are
    /// known).
    pub fn automorphisms(&self) -> Result<Vec<Vec<usize>>> {
        match self {
            CodeSpec::Tanner { p } => tanner_automorphisms(*p),
            _ => Ok(Vec::new()),
        }
    }

    pub fn name(&self) -> String {
        match self {
            CodeSpec::Hamming { m } => format!("hamming-{}-{}", (1 << m) - 1, (1 << m) - 1 - m),
            CodeSpec::Tanner { p } => format!("tanner-{}", 5 * p),
            CodeSpec::Alist(path) => path.display().to_string(),
        }
    }

    /// Builds the matrix. The outer error is I/O, the inner one parsing.
    pub fn build(&self) -> std::io::Result<Result<ParityCheckMatrix>> {
        Ok(match self {
            CodeSpec::Hamming { m } => hamming_code(*m),
            CodeSpec::Tanner { p } => tanner_group_code(*p),
            CodeSpec::Alist(path) => load_alist(&std::fs::read_to_string(path)?),
        })
    }
}
