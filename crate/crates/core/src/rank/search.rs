//! Searching a qualitative class for a member of low rank.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::als::{rational_factors, relative_residual, CpOptions, DenseF64, FitOutcome, FACTOR_DIGITS};
use super::{Justification, RankCertificate};
use crate::qualitative::{sign_pattern, SignTensor};
use crate::rational::round_significant;
use crate::rng::derived_rng;
use crate::tensor::{DenseTensor, FactorList};

const MIN_MAGNITUDE: f64 = 1e-2;
const MAX_MAGNITUDE: f64 = 1e2;
const SIGN_MARGIN: f64 = 1e-6;
/// Factor entries this small relative to their column are set to zero
/// before the exact check.
const SNAP: f64 = 1e-9;

/// Nearest member of `Q(S)` with magnitudes in `[1e-2, 1e2]`.
fn project(signs: &[f64], t: &[f64]) -> Vec<f64> {
    signs
        .iter()
        .zip(t)
        .map(|(&s, &x)| if s == 0.0 { 0.0 } else { s * (s * x).clamp(MIN_MAGNITUDE, MAX_MAGNITUDE) })
        .collect()
}

fn snapped(factors: &[DMatrix<f64>]) -> Vec<DMatrix<f64>> {
    factors
        .iter()
        .map(|u| {
            let mut u = u.clone();
            for mut col in u.column_iter_mut() {
                let scale = col.amax();
                col.apply(|x| {
                    if x.abs() <= SNAP * scale {
                        *x = 0.0;
                    }
                });
            }
            u
        })
        .collect()
}

/// Turns converged factors into a certificate. An exact one when the
/// rounded factors sum to a tensor with pattern exactly `S`; otherwise a
/// numerical one whose member is the rounded projection.
fn certify(s: &SignTensor, r: usize, factors: &[DMatrix<f64>], member: &[f64], tol: f64) -> Option<RankCertificate> {
    let exact = rational_factors(&snapped(factors), FACTOR_DIGITS);
    let sum = exact.to_tensor(s.shape()).ok()?;
    if sign_pattern(&sum) == *s {
        return Some(RankCertificate {
            factors: Some(exact.clone()),
            member: Some(sum),
            residual: Some(0.0),
            ..RankCertificate::upper(exact.rank(), Justification::Decomposition)
        });
    }
    let rounded: Vec<_> = member.iter().map(|&x| round_significant(x, FACTOR_DIGITS)).collect();
    let member = DenseTensor::from_values(s.shape().clone(), rounded).ok()?;
    if sign_pattern(&member) != *s {
        return None;
    }
    let list = rational_factors(factors, FACTOR_DIGITS);
    if list.rank() == 0 {
        return None;
    }
    let approx = list.to_tensor(s.shape()).ok()?.to_f64_values();
    let residual = relative_residual(&member.to_f64_values(), &approx);
    (residual < tol).then(|| RankCertificate {
        exact: false,
        factors: Some(list),
        member: Some(member),
        residual: Some(residual),
        ..RankCertificate::upper(r, Justification::NumericFit)
    })
}

/// Looks for a member of `Q(S)` of rank at most `r` by alternating between
/// projecting the current CP sum onto the sign-consistent set and one ALS
/// sweep towards that projection. Failure proves nothing.
pub fn mr_upper_search(s: &SignTensor, r: usize, opts: &CpOptions) -> FitOutcome {
    if s.is_zero() {
        return FitOutcome::Success(RankCertificate {
            factors: Some(FactorList::empty()),
            member: Some(DenseTensor::zeros(s.shape().clone())),
            residual: Some(0.0),
            ..RankCertificate::upper(0, Justification::Trivial)
        });
    }
    if r == 0 {
        return FitOutcome::Failure { best_residual: 1.0, restarts: 0 };
    }
    let dense = DenseF64::new(s.shape());
    let signs: Vec<f64> = s
        .shape()
        .indices()
        .map(|idx| f64::from(s.sign_at(&idx)))
        .collect();
    let run = |restart: usize| -> (Option<RankCertificate>, f64) {
        let mut rng = derived_rng(opts.seed, restart as u64);
        let mut factors = dense.random_factors(r, &mut rng);
        let mut best = f64::INFINITY;
        for _ in 0..opts.iterations {
            let t = dense.reconstruct(&factors);
            let member = project(&signs, &t);
            let residual = relative_residual(&member, &t);
            best = best.min(residual);
            let margin_ok = signs.iter().zip(&t).all(|(&sg, &x)| sg == 0.0 || sg * x >= SIGN_MARGIN);
            if residual < opts.tol && margin_ok {
                if let Some(cert) = certify(s, r, &factors, &member, opts.tol) {
                    return (Some(cert), residual);
                }
            }
            if !dense.sweep(&member, &mut factors) {
                break;
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
