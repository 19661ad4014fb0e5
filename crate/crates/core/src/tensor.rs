//! Order-k tensors with implicit zeros.
//!
//! [`Tensor<T>`] stores only nonzero entries, keyed by 1-based multi-index
//! in a `BTreeMap`, so two tensors are equal exactly when their shapes and
//! canonical entry maps agree. [`DenseTensor`] (rational entries) carries the
//! arithmetic; the sign tensors of the qualitative module reuse the purely
//! structural operations (transposes, slices, subtensors).
//!
//! Unfoldings put the mode-`s` index on the rows and order the columns
//! lexicographically over the remaining modes, later modes varying fastest.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Debug;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::matrix::RationalMatrix;
use crate::rational::Rational;

pub type Index = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidShape("order must be at least 1".into()));
        }
        if dims.contains(&0) {
            return Err(Error::InvalidShape(format!("zero dimension in {dims:?}")));
        }
        Ok(Self { dims })
    }

    pub fn cubical(n: usize, order: usize) -> Result<Self> {
        Self::new(vec![n; order])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn order(&self) -> usize {
        self.dims.len()
    }

    /// Size of mode `mode` (1-based).
    pub fn dim(&self, mode: usize) -> usize {
        self.dims[mode - 1]
    }

    pub fn num_entries(&self) -> usize {
        self.dims.iter().product()
    }

    /// Common dimension when every mode has the same size.
    pub fn cubical_dim(&self) -> Option<usize> {
        let n = self.dims[0];
        self.dims.iter().all(|&d| d == n).then_some(n)
    }

    pub fn contains(&self, index: &[usize]) -> bool {
        index.len() == self.dims.len()
            && index.iter().zip(&self.dims).all(|(&i, &d)| i >= 1 && i <= d)
    }

    pub fn check_mode(&self, mode: usize) -> Result<()> {
        if mode == 0 || mode > self.order() {
            return Err(Error::ModeOutOfRange { mode, order: self.order() });
        }
        Ok(())
    }

    /// All multi-indices in lexicographic order, last mode fastest.
    pub fn indices(&self) -> IndexIter {
        IndexIter { dims: self.dims.clone(), next: Some(vec![1; self.dims.len()]) }
    }

    /// Row-major position of a 1-based multi-index.
    pub fn linear_index(&self, index: &[usize]) -> usize {
        index.iter().zip(&self.dims).fold(0, |acc, (&i, &d)| acc * d + (i - 1))
    }
}

pub struct IndexIter {
    dims: Vec<usize>,
    next: Option<Index>,
}

impl Iterator for IndexIter {
    type Item = Index;

    fn next(&mut self) -> Option<Index> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        for pos in (0..succ.len()).rev() {
            if succ[pos] < self.dims[pos] {
                succ[pos] += 1;
                self.next = Some(succ);
                break;
            }
            succ[pos] = 1;
        }
        Some(current)
    }
}

/// Values that may be stored in a [`Tensor`]; zero values are never stored.
pub trait Entry: Clone + PartialEq + Debug {
    fn is_zero_entry(&self) -> bool;
}

impl Entry for Rational {
    fn is_zero_entry(&self) -> bool {
        self.is_zero()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tensor<T> {
    shape: Shape,
    entries: BTreeMap<Index, T>,
}

pub type DenseTensor = Tensor<Rational>;

impl<T: Entry> Tensor<T> {
    pub fn zeros(shape: Shape) -> Self {
        Self { shape, entries: BTreeMap::new() }
    }

    /// Builds a tensor from `(index, value)` pairs; zero values are dropped
    /// and a repeated index is an error.
    pub fn from_entries(shape: Shape, entries: impl IntoIterator<Item = (Index, T)>) -> Result<Self> {
        let mut t = Self::zeros(shape);
        let mut seen = std::collections::BTreeSet::new();
        for (index, value) in entries {
            t.check_index(&index)?;
            if !seen.insert(index.clone()) {
                return Err(Error::DuplicateIndex(index));
            }
            t.set(index, value);
        }
        Ok(t)
    }

    fn check_index(&self, index: &[usize]) -> Result<()> {
        if !self.shape.contains(index) {
            return Err(Error::IndexOutOfBounds {
                index: index.to_vec(),
                shape: self.shape.dims.clone(),
            });
        }
        Ok(())
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: &[usize]) -> Option<&T> {
        self.entries.get(index)
    }

    /// Stores `value` at `index` (removing the entry when `value` is zero).
    /// Panics if `index` lies outside the shape.
    pub fn set(&mut self, index: Index, value: T) {
        assert!(self.shape.contains(&index), "index {index:?} outside {:?}", self.shape.dims);
        if value.is_zero_entry() {
            self.entries.remove(&index);
        } else {
            self.entries.insert(index, value);
        }
    }

    /// Nonzero entries in lexicographic index order.
    pub fn iter(&self) -> impl Iterator<Item = (&Index, &T)> {
        self.entries.iter()
    }

    pub fn map<U: Entry>(&self, f: impl Fn(&T) -> U) -> Tensor<U> {
        let mut out = Tensor::zeros(self.shape.clone());
        for (idx, v) in &self.entries {
            out.set(idx.clone(), f(v));
        }
        out
    }

    /// The `(p, q)` transpose: modes `p` and `q` exchanged.
    pub fn transpose(&self, p: usize, q: usize) -> Result<Self> {
        self.shape.check_mode(p)?;
        self.shape.check_mode(q)?;
        let mut dims = self.shape.dims.clone();
        dims.swap(p - 1, q - 1);
        let entries = self
            .entries
            .iter()
            .map(|(idx, v)| {
                let mut j = idx.clone();
                j.swap(p - 1, q - 1);
                (j, v.clone())
            })
            .collect();
        Ok(Self { shape: Shape { dims }, entries })
    }

    /// Generic mode permutation: mode `m` of the result is mode `perm[m-1]`
    /// of `self`.
    pub fn permute_modes(&self, perm: &[usize]) -> Result<Self> {
        let k = self.order();
        let mut seen = vec![false; k];
        if perm.len() != k || perm.iter().any(|&m| m == 0 || m > k || std::mem::replace(&mut seen[m - 1], true)) {
            return Err(Error::ShapeMismatch(format!("{perm:?} is not a permutation of 1..={k}")));
        }
        let dims = perm.iter().map(|&m| self.shape.dim(m)).collect();
        let entries = self
            .entries
            .iter()
            .map(|(idx, v)| (perm.iter().map(|&m| idx[m - 1]).collect(), v.clone()))
            .collect();
        Ok(Self { shape: Shape { dims }, entries })
    }

    /// The subtensor `A[γ_1, …, γ_k]`; each subset is re-indexed in sorted
    /// order. Repeated members of a subset are ignored.
    pub fn subtensor(&self, subsets: &[Vec<usize>]) -> Result<Self> {
        if subsets.len() != self.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} index subsets for an order {} tensor",
                subsets.len(),
                self.order()
            )));
        }
        let mut positions: Vec<HashMap<usize, usize>> = Vec::with_capacity(subsets.len());
        let mut dims = Vec::with_capacity(subsets.len());
        for (mode, subset) in subsets.iter().enumerate() {
            if subset.is_empty() {
                return Err(Error::EmptySubset(mode + 1));
            }
            let mut sorted = subset.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if let Some(&bad) = sorted.iter().find(|&&i| i == 0 || i > self.shape.dims[mode]) {
                let mut index = vec![1; self.order()];
                index[mode] = bad;
                return Err(Error::IndexOutOfBounds { index, shape: self.shape.dims.clone() });
            }
            dims.push(sorted.len());
            positions.push(sorted.iter().enumerate().map(|(p, &i)| (i, p + 1)).collect());
        }
        let entries = self
            .entries
            .iter()
            .filter_map(|(idx, v)| {
                let j: Option<Index> =
                    idx.iter().zip(&positions).map(|(i, pos)| pos.get(i).copied()).collect();
                j.map(|j| (j, v.clone()))
            })
            .collect();
        Ok(Self { shape: Shape { dims }, entries })
    }

    /// The mode-`mode` slice at position `i`, an order `k-1` tensor.
    pub fn slice(&self, mode: usize, i: usize) -> Result<Self> {
        self.shape.check_mode(mode)?;
        if self.order() < 2 {
            return Err(Error::InvalidShape("slices need order at least 2".into()));
        }
        if i == 0 || i > self.shape.dim(mode) {
            let mut index = vec![1; self.order()];
            index[mode - 1] = i;
            return Err(Error::IndexOutOfBounds { index, shape: self.shape.dims.clone() });
        }
        let mut dims = self.shape.dims.clone();
        dims.remove(mode - 1);
        let entries = self
            .entries
            .iter()
            .filter(|(idx, _)| idx[mode - 1] == i)
            .map(|(idx, v)| {
                let mut j = idx.clone();
                j.remove(mode - 1);
                (j, v.clone())
            })
            .collect();
        Ok(Self { shape: Shape { dims }, entries })
    }

    /// Column of the mode-`mode` unfolding that holds `index`.
    pub fn unfold_column(&self, mode: usize, index: &[usize]) -> usize {
        index
            .iter()
            .zip(&self.shape.dims)
            .enumerate()
            .filter(|&(m, _)| m != mode - 1)
            .fold(0, |acc, (_, (&i, &d))| acc * d + (i - 1))
    }
}

impl DenseTensor {
    /// The unit tensor of order `order` and dimension `n`.
    pub fn unit(n: usize, order: usize) -> Result<Self> {
        let shape = Shape::cubical(n, order)?;
        let entries = (1..=n).map(|i| (vec![i; order], Rational::one()));
        Self::from_entries(shape, entries)
    }

    /// Tensor from values listed in lexicographic index order.
    pub fn from_values(shape: Shape, values: Vec<Rational>) -> Result<Self> {
        if values.len() != shape.num_entries() {
            return Err(Error::ShapeMismatch(format!(
                "{} values for shape {:?}",
                values.len(),
                shape.dims()
            )));
        }
        let indices: Vec<_> = shape.indices().collect();
        Self::from_entries(shape, indices.into_iter().zip(values))
    }

    pub fn from_i64(dims: &[usize], values: &[i64]) -> Result<Self> {
        let shape = Shape::new(dims.to_vec())?;
        Self::from_values(shape, values.iter().map(|&v| Rational::from_integer(v.into())).collect())
    }

    pub fn value(&self, index: &[usize]) -> Rational {
        self.get(index).cloned().unwrap_or_else(Rational::zero)
    }

    /// All entries (zeros included) in lexicographic order.
    pub fn values(&self) -> Vec<Rational> {
        self.shape.indices().map(|idx| self.value(&idx)).collect()
    }

    pub fn to_f64_values(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.shape.num_entries()];
        for (idx, v) in self.iter() {
            out[self.shape.linear_index(idx)] = crate::rational::to_f64(v);
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        self.map(|v| v * c)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch(format!(
                "cannot add {:?} and {:?}",
                self.dims(),
                other.dims()
            )));
        }
        let mut out = self.clone();
        for (idx, v) in other.iter() {
            let sum = out.value(idx) + v;
            out.set(idx.clone(), sum);
        }
        Ok(out)
    }

    /// Mode-`mode` unfolding: an `n_s × ∏_{j≠s} n_j` matrix whose columns are
    /// the mode-`s` fibers.
    pub fn unfold(&self, mode: usize) -> Result<RationalMatrix> {
        self.shape.check_mode(mode)?;
        let rows = self.shape.dim(mode);
        let cols = self.shape.num_entries() / rows;
        let mut m = RationalMatrix::zeros(rows, cols);
        for (idx, v) in self.iter() {
            m[(idx[mode - 1] - 1, self.unfold_column(mode, idx))] = v.clone();
        }
        Ok(m)
    }

    /// `(L_1, …, L_k) · A`, where `L_i` is `c_i × n_i`.
    pub fn multilinear_transform(&self, mats: &[RationalMatrix]) -> Result<Self> {
        if mats.len() != self.order() {
            return Err(Error::ShapeMismatch(format!(
                "{} matrices for an order {} tensor",
                mats.len(),
                self.order()
            )));
        }
        let mut current = self.clone();
        for (mode, l) in mats.iter().enumerate() {
            current = current.mode_product(mode + 1, l)?;
        }
        Ok(current)
    }

    /// Applies `l` along a single mode.
    pub fn mode_product(&self, mode: usize, l: &RationalMatrix) -> Result<Self> {
        self.shape.check_mode(mode)?;
        if l.cols() != self.shape.dim(mode) {
            return Err(Error::ShapeMismatch(format!(
                "mode {mode} has size {} but the matrix has {} columns",
                self.shape.dim(mode),
                l.cols()
            )));
        }
        let mut dims = self.shape.dims.clone();
        dims[mode - 1] = l.rows();
        let mut acc: BTreeMap<Index, Rational> = BTreeMap::new();
        for (idx, v) in self.iter() {
            let col = idx[mode - 1] - 1;
            for r in 0..l.rows() {
                let c = &l[(r, col)];
                if c.is_zero() {
                    continue;
                }
                let mut j = idx.clone();
                j[mode - 1] = r + 1;
                *acc.entry(j).or_insert_with(Rational::zero) += c * v;
            }
        }
        acc.retain(|_, v| !v.is_zero());
        Ok(Self { shape: Shape::new(dims)?, entries: acc })
    }

    /// The vector `A x^{k-1}`: component `i` is `Σ a_{i i_2…i_k} x_{i_2}⋯x_{i_k}`.
    pub fn apply_power(&self, x: &[Rational]) -> Result<Vec<Rational>> {
        let n = self.shape.cubical_dim().ok_or_else(|| Error::NotCubical(self.dims().to_vec()))?;
        if x.len() != n {
            return Err(Error::ShapeMismatch(format!("vector of length {} for dimension {n}", x.len())));
        }
        let mut out = vec![Rational::zero(); n];
        for (idx, v) in self.iter() {
            let mut term = v.clone();
            for &i in &idx[1..] {
                if term.is_zero() {
                    break;
                }
                term *= &x[i - 1];
            }
            out[idx[0] - 1] += term;
        }
        Ok(out)
    }

    /// Majorization matrix `m_{ij} = a_{ij⋯j}` of an `n_1 × n_2 × ⋯ × n_2` tensor.
    pub fn majorization_matrix(&self) -> Result<RationalMatrix> {
        let dims = self.dims();
        if dims.len() < 2 || dims[1..].iter().any(|&d| d != dims[1]) {
            return Err(Error::ShapeMismatch(format!(
                "majorization matrix needs modes 2..k of equal size, got {dims:?}"
            )));
        }
        let mut m = RationalMatrix::zeros(dims[0], dims[1]);
        for (idx, v) in self.iter() {
            if idx[1..].iter().all(|&j| j == idx[1]) {
                m[(idx[0] - 1, idx[1] - 1)] = v.clone();
            }
        }
        Ok(m)
    }

    /// Order-2 tensor view of a matrix.
    pub fn from_matrix(m: &RationalMatrix) -> Result<Self> {
        let shape = Shape::new(vec![m.rows(), m.cols()])?;
        let mut t = Self::zeros(shape);
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                t.set(vec![i + 1, j + 1], m[(i, j)].clone());
            }
        }
        Ok(t)
    }
}

/// Segre outer product `α_1 ⊗ ⋯ ⊗ α_k` of nonzero vectors.
pub fn outer_product(vectors: &[Vec<Rational>]) -> Result<DenseTensor> {
    if vectors.is_empty() {
        return Err(Error::InvalidShape("outer product of zero vectors".into()));
    }
    for (pos, v) in vectors.iter().enumerate() {
        if v.iter().all(Zero::is_zero) {
            return Err(Error::ZeroVector(pos + 1));
        }
    }
    let shape = Shape::new(vectors.iter().map(Vec::len).collect())?;
    let supports: Vec<Vec<usize>> = vectors
        .iter()
        .map(|v| (0..v.len()).filter(|&i| !v[i].is_zero()).collect())
        .collect();
    let mut t = DenseTensor::zeros(shape);
    let mut partial: Vec<(Index, Rational)> = vec![(Vec::new(), Rational::one())];
    for (v, support) in vectors.iter().zip(&supports) {
        partial = partial
            .into_iter()
            .flat_map(|(idx, val)| {
                support.iter().map(move |&i| {
                    let mut j = idx.clone();
                    j.push(i + 1);
                    (j, &val * &v[i])
                })
            })
            .collect();
    }
    for (idx, v) in partial {
        t.set(idx, v);
    }
    Ok(t)
}

/// A CP expansion `Σ_j α_1^j ⊗ ⋯ ⊗ α_k^j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactorList {
    terms: Vec<Vec<Vec<Rational>>>,
}

impl FactorList {
    pub fn new(terms: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        if let Some(first) = terms.first() {
            let lens: Vec<usize> = first.iter().map(Vec::len).collect();
            for (j, term) in terms.iter().enumerate() {
                if term.iter().map(Vec::len).ne(lens.iter().copied()) {
                    return Err(Error::ShapeMismatch(format!("term {} has inconsistent lengths", j + 1)));
                }
                if let Some(pos) = term.iter().position(|v| v.iter().all(Zero::is_zero)) {
                    return Err(Error::ZeroVector(pos + 1));
                }
            }
        }
        Ok(Self { terms })
    }

    pub fn empty() -> Self {
        Self { terms: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> &[Vec<Vec<Rational>>] {
        &self.terms
    }

    /// Sum of the rank-one terms as a tensor of the given shape.
    pub fn to_tensor(&self, shape: &Shape) -> Result<DenseTensor> {
        let mut total = DenseTensor::zeros(shape.clone());
        for (j, term) in self.terms.iter().enumerate() {
            if term.iter().map(Vec::len).ne(shape.dims().iter().copied()) {
                return Err(Error::ShapeMismatch(format!(
                    "term {} does not match shape {:?}",
                    j + 1,
                    shape.dims()
                )));
            }
            total = total.add(&outer_product(term)?)?;
        }
        Ok(total)
    }
}

/// The general tensor product `A · B` of dimension-`n` tensors: for `A` of
/// order `m ≥ 2` and `B` of order `k ≥ 1` the result has order
/// `(m-1)(k-1)+1` and entries
/// `Σ a_{i i_2⋯i_m} b_{i_2 α_1} ⋯ b_{i_m α_{m-1}}`.
pub fn shao_product(a: &DenseTensor, b: &DenseTensor) -> Result<DenseTensor> {
    let n = a.shape().cubical_dim().ok_or_else(|| Error::NotCubical(a.dims().to_vec()))?;
    let nb = b.shape().cubical_dim().ok_or_else(|| Error::NotCubical(b.dims().to_vec()))?;
    if n != nb {
        return Err(Error::ShapeMismatch(format!("dimensions {n} and {nb} differ")));
    }
    let m = a.order();
    let k = b.order();
    if m < 2 {
        return Err(Error::Unsupported("left factor of a product needs order at least 2".into()));
    }
    let out_order = (m - 1) * (k - 1) + 1;
    let mut rows: Vec<Vec<(&[usize], &Rational)>> = vec![Vec::new(); n];
    for (idx, v) in b.iter() {
        rows[idx[0] - 1].push((&idx[1..], v));
    }
    let mut acc: BTreeMap<Index, Rational> = BTreeMap::new();
    for (idx, v) in a.iter() {
        let mut partial: Vec<(Index, Rational)> = vec![(vec![idx[0]], v.clone())];
        for &i in &idx[1..] {
            let row = &rows[i - 1];
            if row.is_empty() {
                partial.clear();
                break;
            }
            partial = partial
                .into_iter()
                .flat_map(|(j, val)| {
                    row.iter().map(move |(alpha, bv)| {
                        let mut j = j.clone();
                        j.extend_from_slice(alpha);
                        (j, &val * *bv)
                    })
                })
                .collect();
        }
        for (j, val) in partial {
            *acc.entry(j).or_insert_with(Rational::zero) += val;
        }
    }
    acc.retain(|_, v| !v.is_zero());
    Ok(Tensor { shape: Shape::cubical(n, out_order)?, entries: acc })
}
