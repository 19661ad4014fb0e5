//! Term rank, SNS matrices, L-matrices.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::qualitative::SignTensor;

pub const MAX_SNS_DIM: usize = 10;
pub const MAX_L_ROWS: usize = 12;

/// Sign pattern of a matrix, entries in `{-1, 0, 1}`, 0-based access.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignMatrix {
    rows: usize,
    cols: usize,
    data: Vec<i8>,
}

impl SignMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<i8>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!("{} signs for a {rows}x{cols} matrix", data.len())));
        }
        if let Some(bad) = data.iter().find(|v| !(-1..=1).contains(*v)) {
            return Err(Error::Parse(format!("sign value {bad}")));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[&[i8]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch("ragged sign matrix".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    /// Order-2 sign tensor viewed as a matrix.
    pub fn from_sign_tensor(s: &SignTensor) -> Result<Self> {
        if s.order() != 2 {
            return Err(Error::ShapeMismatch(format!("expected a matrix, got shape {:?}", s.dims())));
        }
        Ok(unfold_pattern(s, 1))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> i8 {
        self.data[i * self.cols + j]
    }

    pub fn transpose(&self) -> Self {
        let mut data = Vec::with_capacity(self.data.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                data.push(self.get(i, j));
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }
}

/// Sign pattern of the mode-`mode` unfolding (same column order as
/// [`crate::DenseTensor::unfold`]).
pub fn unfold_pattern(s: &SignTensor, mode: usize) -> SignMatrix {
    let rows = s.shape().dim(mode);
    let cols = s.shape().num_entries() / rows;
    let mut data = vec![0; rows * cols];
    for (idx, sign) in s.iter() {
        data[(idx[mode - 1] - 1) * cols + s.unfold_column(mode, idx)] = sign.as_i8();
    }
    SignMatrix { rows, cols, data }
}

/// Nonzero entries no two of which agree in any coordinate (1-based indices,
/// sorted).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Matching {
    entries: Vec<Vec<usize>>,
}

impl Matching {
    pub fn entries(&self) -> &[Vec<usize>] {
        &self.entries
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Checks the matching conditions against `s`.
    pub fn is_valid_for(&self, s: &SignTensor) -> bool {
        self.entries.iter().all(|e| s.get(e).is_some())
            && self.entries.iter().enumerate().all(|(a, e)| {
                self.entries[a + 1..].iter().all(|f| e.iter().zip(f).all(|(x, y)| x != y))
            })
    }
}

struct MatchingSearch {
    entries: Vec<Vec<usize>>,
    dims: Vec<usize>,
    best: Vec<usize>,
    cap: usize,
}

impl MatchingSearch {
    fn compatible(&self, a: usize, b: usize) -> bool {
        self.entries[a].iter().zip(&self.entries[b]).all(|(x, y)| x != y)
    }

    /// Per mode, the number of candidates using each coordinate value.
    fn counts(&self, candidates: &[usize]) -> Vec<Vec<usize>> {
        let mut counts: Vec<Vec<usize>> = self.dims.iter().map(|&n| vec![0; n + 1]).collect();
        for &c in candidates {
            for (mode, &i) in self.entries[c].iter().enumerate() {
                counts[mode][i] += 1;
            }
        }
        counts
    }

    fn greedy(&mut self) {
        let all: Vec<usize> = (0..self.entries.len()).collect();
        let counts = self.counts(&all);
        let mut order = all;
        order.sort_by_key(|&e| {
            let scarcity: usize = self.entries[e].iter().enumerate().map(|(m, &i)| counts[m][i]).sum();
            (scarcity, e)
        });
        let mut chosen: Vec<usize> = Vec::new();
        for e in order {
            if chosen.iter().all(|&c| self.compatible(c, e)) {
                chosen.push(e);
            }
        }
        self.best = chosen;
    }

    fn search(&mut self, candidates: Vec<usize>, current: &mut Vec<usize>) {
        if current.len() > self.best.len() {
            self.best = current.clone();
        }
        if candidates.is_empty() || self.best.len() == self.cap {
            return;
        }
        let counts = self.counts(&candidates);
        let bound = counts
            .iter()
            .map(|c| c.iter().filter(|&&x| x > 0).count())
            .min()
            .unwrap_or(0)
            .min(candidates.len());
        if current.len() + bound <= self.best.len() {
            return;
        }
        // Branch on the coordinate value with the fewest candidates: either
        // one of its entries joins the matching, or the value stays unused.
        let (mode, value) = counts
            .iter()
            .enumerate()
            .flat_map(|(m, c)| c.iter().enumerate().filter(|(_, &x)| x > 0).map(move |(i, &x)| (x, m, i)))
            .min()
            .map(|(_, m, i)| (m, i))
            .expect("candidates are nonempty");
        let branch: Vec<usize> = candidates.iter().copied().filter(|&c| self.entries[c][mode] == value).collect();
        for &e in &branch {
            let next: Vec<usize> = candidates.iter().copied().filter(|&c| c != e && self.compatible(c, e)).collect();
            current.push(e);
            self.search(next, current);
            current.pop();
            if self.best.len() == self.cap {
                return;
            }
        }
        let rest: Vec<usize> = candidates.into_iter().filter(|&c| self.entries[c][mode] != value).collect();
        self.search(rest, current);
    }
}

/// Term rank: the largest number of nonzero entries no two of which share an
/// index in any mode, with a maximum matching as witness. Exact
/// branch-and-bound seeded with a greedy matching.
pub fn term_rank(s: &SignTensor) -> Matching {
    let entries: Vec<Vec<usize>> = s.iter().map(|(idx, _)| idx.clone()).collect();
    let cap = s.dims().iter().copied().min().unwrap_or(0);
    let mut search = MatchingSearch { entries, dims: s.dims().to_vec(), best: Vec::new(), cap };
    search.greedy();
    if search.best.len() < cap {
        let all: Vec<usize> = (0..search.entries.len()).collect();
        search.search(all, &mut Vec::new());
    }
    let mut entries: Vec<Vec<usize>> = search.best.iter().map(|&e| search.entries[e].clone()).collect();
    entries.sort();
    Matching { entries }
}

/// Every member of `Q(S)` is nonsingular: at least one nonzero term of the
/// determinant expansion, and all nonzero terms of one sign.
pub fn is_sns_matrix(s: &SignMatrix) -> Result<bool> {
    if s.rows != s.cols {
        return Err(Error::ShapeMismatch(format!("SNS test needs a square matrix, got {}x{}", s.rows, s.cols)));
    }
    if s.rows > MAX_SNS_DIM {
        return Err(Error::Unsupported(format!("SNS test limited to n <= {MAX_SNS_DIM}, got {}", s.rows)));
    }
    let n = s.rows;
    // seen[0]: a negative term, seen[1]: a positive term
    let mut seen = [false; 2];
    let mut used = vec![false; n];
    fn walk(s: &SignMatrix, row: usize, used: &mut [bool], sign: i8, seen: &mut [bool; 2]) -> bool {
        let n = s.rows;
        if row == n {
            seen[usize::from(sign > 0)] = true;
            return seen[0] && seen[1];
        }
        for c in 0..n {
            let v = s.get(row, c);
            if used[c] || v == 0 {
                continue;
            }
            let inversions = used[c + 1..].iter().filter(|&&u| u).count();
            let parity = if inversions % 2 == 0 { 1 } else { -1 };
            used[c] = true;
            let mixed = walk(s, row + 1, used, sign * v * parity, seen);
            used[c] = false;
            if mixed {
                return true;
            }
        }
        false
    }
    let mixed = walk(s, 0, &mut used, 1, &mut seen);
    Ok(!mixed && (seen[0] || seen[1]))
}

/// Every member of `Q(S)` has full row rank: for each nonzero signing `u` of
/// the rows, some column `j` has `(u_i s_ij)_i` nonzero and unisigned.
pub fn is_l_matrix(s: &SignMatrix) -> Result<bool> {
    let m = s.rows;
    if m > MAX_L_ROWS {
        return Err(Error::Unsupported(format!("L-matrix test limited to {MAX_L_ROWS} rows, got {m}")));
    }
    if m == 0 {
        return Ok(true);
    }
    let columns: Vec<Vec<i8>> = (0..s.cols).map(|j| (0..m).map(|i| s.get(i, j)).collect()).collect();
    let mut u = vec![0i8; m];
    // Odometer over {0, 1, -1}^m; only signings whose first nonzero entry is
    // +1 are tested (u and -u are equivalent).
    loop {
        let mut pos = 0;
        loop {
            if pos == m {
                return Ok(true);
            }
            u[pos] = match u[pos] {
                0 => 1,
                1 => -1,
                _ => 0,
            };
            if u[pos] != 0 {
                break;
            }
            pos += 1;
        }
        let first = u.iter().rposition(|&x| x != 0).expect("u is nonzero");
        if u[first] < 0 {
            continue;
        }
        let certified = columns.iter().any(|col| {
            let (mut pos, mut neg) = (false, false);
            for (a, b) in u.iter().zip(col) {
                match a * b {
                    1 => pos = true,
                    -1 => neg = true,
                    _ => {}
                }
            }
            pos != neg
        });
        if !certified {
            return Ok(false);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SnsNecessaryReport {
    /// Whether the mode-`s` unfolding pattern is an L-matrix, for `s = 1..k`.
    pub per_mode: Vec<bool>,
    /// All modes pass. `false` proves the pattern is not SNS; `true` is only
    /// necessary.
    pub overall: bool,
}

/// Necessary condition for a sign-nonsingular tensor: every member has full
/// multilinear rank, i.e. every unfolding pattern is an L-matrix.
pub fn sns_tensor_necessary(s: &SignTensor) -> Result<SnsNecessaryReport> {
    let n = s.shape().cubical_dim().ok_or_else(|| Error::NotCubical(s.dims().to_vec()))?;
    if n > MAX_L_ROWS {
        return Err(Error::Unsupported(format!("dimension {n} exceeds {MAX_L_ROWS}")));
    }
    let per_mode = (1..=s.order())
        .map(|mode| is_l_matrix(&unfold_pattern(s, mode)))
        .collect::<Result<Vec<bool>>>()?;
    let overall = per_mode.iter().all(|&b| b);
    Ok(SnsNecessaryReport { per_mode, overall })
}
