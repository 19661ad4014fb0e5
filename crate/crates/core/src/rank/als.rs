//! CP decomposition by alternating least squares, in `f64`.

use nalgebra::DMatrix;
use num_traits::Zero;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use super::{Justification, RankCertificate};
use crate::rational::{round_significant, Rational};
use crate::rng::derived_rng;
use crate::tensor::{DenseTensor, FactorList, Shape};

const RIDGE: f64 = 1e-12;
/// Significant digits kept when factors are reported as rationals.
pub(crate) const FACTOR_DIGITS: u32 = 15;
/// Extra sweeps after reaching the tolerance, kept while they help.
const POLISH_SWEEPS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CpOptions {
    pub restarts: usize,
    pub iterations: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for CpOptions {
    fn default() -> Self {
        Self { restarts: 20, iterations: 500, tol: 1e-8, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum FitOutcome {
    Success(RankCertificate),
    /// No restart reached the tolerance. Says nothing about the rank.
    Failure { best_residual: f64, restarts: usize },
}

impl FitOutcome {
    pub fn is_success(&self) -> bool {
        matches!(self, FitOutcome::Success(_))
    }

    pub fn certificate(&self) -> Option<&RankCertificate> {
        match self {
            FitOutcome::Success(c) => Some(c),
            FitOutcome::Failure { .. } => None,
        }
    }
}

/// Dense `f64` view of a tensor, entries in lexicographic order, with the
/// multi-indices precomputed (0-based).
pub(crate) struct DenseF64 {
    pub dims: Vec<usize>,
    pub indices: Vec<Vec<usize>>,
}

impl DenseF64 {
    pub fn new(shape: &Shape) -> Self {
        let indices = shape.indices().map(|idx| idx.iter().map(|i| i - 1).collect()).collect();
        Self { dims: shape.dims().to_vec(), indices }
    }

    pub fn random_factors(&self, r: usize, rng: &mut impl Rng) -> Vec<DMatrix<f64>> {
        self.dims
            .iter()
            .map(|&n| DMatrix::from_fn(n, r, |_, _| rng.sample(StandardNormal)))
            .collect()
    }

    /// Values of `Σ_c u_1[:, c] ⊗ ⋯ ⊗ u_k[:, c]`.
    pub fn reconstruct(&self, factors: &[DMatrix<f64>]) -> Vec<f64> {
        let r = factors[0].ncols();
        self.indices
            .iter()
            .map(|idx| {
                (0..r)
                    .map(|c| idx.iter().zip(factors).map(|(&i, u)| u[(i, c)]).product::<f64>())
                    .sum()
            })
            .collect()
    }

    /// One sweep of mode-wise least-squares updates towards `target`.
    /// Returns `false` if the factors stopped being finite.
    pub fn sweep(&self, target: &[f64], factors: &mut [DMatrix<f64>]) -> bool {
        let k = self.dims.len();
        let r = factors[0].ncols();
        for mode in 0..k {
            // Right-hand side: unfolding times the Khatri-Rao product of the
            // other factors.
            let mut rhs = DMatrix::<f64>::zeros(self.dims[mode], r);
            for (idx, &a) in self.indices.iter().zip(target) {
                if a == 0.0 {
                    continue;
                }
                for c in 0..r {
                    let w: f64 = (0..k).filter(|&m| m != mode).map(|m| factors[m][(idx[m], c)]).product();
                    rhs[(idx[mode], c)] += a * w;
                }
            }
            let mut gram = DMatrix::<f64>::from_element(r, r, 1.0);
            for (m, u) in factors.iter().enumerate() {
                if m != mode {
                    gram.component_mul_assign(&(u.transpose() * u));
                }
            }
            for c in 0..r {
                gram[(c, c)] += RIDGE;
            }
            let rhs_t = rhs.transpose();
            let solved = match gram.clone().cholesky() {
                Some(ch) => Some(ch.solve(&rhs_t)),
                None => gram.lu().solve(&rhs_t),
            };
            match solved {
                Some(x) if x.iter().all(|v| v.is_finite()) => factors[mode] = x.transpose(),
                _ => return false,
            }
        }
        balance(factors);
        true
    }
}

/// Rescales each component so all its factor columns have equal norm.
fn balance(factors: &mut [DMatrix<f64>]) {
    let k = factors.len() as f64;
    for c in 0..factors[0].ncols() {
        let norms: Vec<f64> = factors.iter().map(|u| u.column(c).norm()).collect();
        if norms.iter().any(|&n| n == 0.0 || !n.is_finite()) {
            continue;
        }
        let mean = norms.iter().map(|n| n.ln()).sum::<f64>() / k;
        for (u, n) in factors.iter_mut().zip(&norms) {
            u.column_mut(c).scale_mut(mean.exp() / n);
        }
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn relative_residual(target: &[f64], approx: &[f64]) -> f64 {
    let diff: f64 = target.iter().zip(approx).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    let scale = norm(target);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// Factors rounded to rationals, dropping components with a zero factor.
pub(crate) fn rational_factors(factors: &[DMatrix<f64>], digits: u32) -> FactorList {
    let r = factors[0].ncols();
    let terms = (0..r)
        .map(|c| {
            factors
                .iter()
                .map(|u| u.column(c).iter().map(|&x| round_significant(x, digits)).collect::<Vec<Rational>>())
                .collect::<Vec<_>>()
        })
        .filter(|term: &Vec<Vec<Rational>>| term.iter().all(|v| v.iter().any(|x| !x.is_zero())))
        .collect();
    FactorList::new(terms).expect("zero components filtered out")
}

fn factors_to_f64(list: &FactorList, dims: &[usize]) -> Vec<DMatrix<f64>> {
    let r = list.rank();
    dims.iter()
        .enumerate()
        .map(|(m, &n)| {
            DMatrix::from_fn(n, r, |i, c| crate::rational::to_f64(&list.terms()[c][m][i]))
        })
        .collect()
}

/// Start for order-3 tensors by simultaneous diagonalisation: two random
/// contractions `M_w = A ×_m w` of the smallest mode share the factors of the
/// other two modes, so the eigenvectors of `M_1 M_2^{-1}` (on the rank-`r`
/// subspaces) give one factor and rank-one splits of the back-projected
/// slices give the rest. `None` when the pencil has complex or repeated
/// eigenvalues or `r` exceeds the two larger dimensions.
fn eigen_start(dense: &DenseF64, target: &[f64], r: usize, rng: &mut impl Rng) -> Option<Vec<DMatrix<f64>>> {
    if dense.dims.len() != 3 {
        return None;
    }
    let mut modes = [0, 1, 2];
    modes.sort_by_key(|&m| std::cmp::Reverse(dense.dims[m]));
    let [p, q, m] = modes;
    let (np, nq, nm) = (dense.dims[p], dense.dims[q], dense.dims[m]);
    if r > nq || nm < 2 {
        return None;
    }
    let mut cube = vec![0.0; np * nq * nm];
    for (idx, &x) in dense.indices.iter().zip(target) {
        cube[(idx[p] * nq + idx[q]) * nm + idx[m]] = x;
    }
    let at = |i: usize, j: usize, l: usize| cube[(i * nq + j) * nm + l];
    let contract = |w: &[f64]| DMatrix::from_fn(np, nq, |i, j| (0..nm).map(|l| w[l] * at(i, j, l)).sum::<f64>());
    let w1: Vec<f64> = (0..nm).map(|_| rng.sample(StandardNormal)).collect();
    let w2: Vec<f64> = (0..nm).map(|_| rng.sample(StandardNormal)).collect();
    let (m1, m2) = (contract(&w1), contract(&w2));

    let u = leading_vectors(&DMatrix::from_fn(np, 2 * nq, |i, j| if j < nq { m1[(i, j)] } else { m2[(i, j - nq)] }), r)?;
    let v = leading_vectors(&DMatrix::from_fn(nq, 2 * np, |j, i| if i < np { m1[(i, j)] } else { m2[(i - np, j)] }), r)?;
    let b1 = u.transpose() * &m1 * &v;
    let b2 = u.transpose() * &m2 * &v;
    let pencil = b1 * b2.try_inverse()?;
    let scale = pencil.amax().max(1.0);
    let eigenvalues = pencil.complex_eigenvalues();
    if eigenvalues.iter().any(|z| z.im.abs() > 1e-8 * scale) {
        return None;
    }
    let mut vectors = DMatrix::zeros(r, r);
    for (c, z) in eigenvalues.iter().enumerate() {
        let shifted = &pencil - DMatrix::identity(r, r) * z.re;
        let svd = shifted.svd(false, true);
        let (k, _) = svd.singular_values.argmin();
        vectors.set_column(c, &svd.v_t?.row(k).transpose());
    }
    let first = &u * vectors;
    let back = (first.transpose() * &first).try_inverse()? * first.transpose();

    let mut factors = vec![DMatrix::zeros(0, 0); 3];
    let mut second = DMatrix::zeros(nq, r);
    let mut third = DMatrix::zeros(nm, r);
    for c in 0..r {
        let slice = DMatrix::from_fn(nq, nm, |j, l| (0..np).map(|i| back[(c, i)] * at(i, j, l)).sum::<f64>());
        let svd = slice.svd(true, true);
        let (k, sigma) = svd.singular_values.argmax();
        let root = sigma.sqrt();
        second.set_column(c, &(svd.u?.column(k) * root));
        third.set_column(c, &(svd.v_t?.row(k).transpose() * root));
    }
    factors[p] = first;
    factors[q] = second;
    factors[m] = third;
    if factors.iter().any(|f| f.iter().any(|x| !x.is_finite())) {
        return None;
    }
    balance(&mut factors);
    Some(factors)
}

/// Leading `r` left singular vectors, or `None` if the rank is below `r`.
fn leading_vectors(a: &DMatrix<f64>, r: usize) -> Option<DMatrix<f64>> {
    let svd = a.clone().svd(true, false);
    let u = svd.u?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let top = svd.singular_values[order[0]];
    if order.len() < r || svd.singular_values[order[r - 1]] <= 1e-12 * top {
        return None;
    }
    Some(DMatrix::from_fn(a.nrows(), r, |i, c| u[(i, order[c])]))
}

fn polish(dense: &DenseF64, target: &[f64], factors: &mut Vec<DMatrix<f64>>, mut residual: f64) {
    for _ in 0..POLISH_SWEEPS {
        let mut next = factors.clone();
        if !dense.sweep(target, &mut next) {
            return;
        }
        let r = relative_residual(target, &dense.reconstruct(&next));
        if r >= residual {
            return;
        }
        residual = r;
        *factors = next;
    }
}

/// Searches for a rank-`r` CP decomposition of `a` with relative residual
/// below `opts.tol`. Restart `j` draws standard normal initial factors from
/// stream `j` of `opts.seed`, except that restart 0 of an order-3 tensor
/// first tries a simultaneous-diagonalisation start. The reported success is
/// the one with the smallest restart index.
pub fn cp_fit(a: &DenseTensor, r: usize, opts: &CpOptions) -> FitOutcome {
    if a.is_zero() {
        return FitOutcome::Success(RankCertificate {
            factors: Some(FactorList::empty()),
            residual: Some(0.0),
            ..RankCertificate::upper(0, Justification::Decomposition)
        });
    }
    if r == 0 {
        return FitOutcome::Failure { best_residual: 1.0, restarts: 0 };
    }
    let dense = DenseF64::new(a.shape());
    let target = a.to_f64_values();
    let run = |restart: usize| -> (Option<RankCertificate>, f64) {
        let mut rng = derived_rng(opts.seed, restart as u64);
        let start = if restart == 0 { eigen_start(&dense, &target, r, &mut rng) } else { None };
        let mut factors = match start {
            Some(f) => f,
            None => dense.random_factors(r, &mut rng),
        };
        let mut best = f64::INFINITY;
        for _ in 0..opts.iterations {
            if !dense.sweep(&target, &mut factors) {
                break;
            }
            let residual = relative_residual(&target, &dense.reconstruct(&factors));
            best = best.min(residual);
            if residual < opts.tol {
                polish(&dense, &target, &mut factors, residual);
                let list = rational_factors(&factors, FACTOR_DIGITS);
                let rounded = factors_to_f64(&list, &dense.dims);
                let residual = if list.rank() == 0 {
                    1.0
                } else {
                    relative_residual(&target, &dense.reconstruct(&rounded))
                };
                if residual < opts.tol {
                    let cert = RankCertificate {
                        exact: false,
                        factors: Some(list),
                        residual: Some(residual),
                        ..RankCertificate::upper(r, Justification::NumericFit)
                    };
                    return (Some(cert), residual);
                }
            }
        }
        (None, best)
    };
    let results: Vec<(Option<RankCertificate>, f64)> = (0..opts.restarts).into_par_iter().map(run).collect();
    let best_residual = results.iter().map(|(_, b)| *b).fold(f64::INFINITY, f64::min);
    match results.into_iter().find_map(|(c, _)| c) {
        Some(cert) => FitOutcome::Success(cert),
        None => FitOutcome::Failure { best_residual, restarts: opts.restarts },
    }
}
