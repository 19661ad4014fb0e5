//! Determinants of dimension-2 tensors as resultants of binary forms, and
//! sampling refutation of sign-nonsingularity.

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::format::serialize_rational_opt;
use crate::matrix::RationalMatrix;
use crate::qualitative::{sample_member, unit_member, MagnitudeRange, SignTensor};
use crate::rational::Rational;
use crate::rng::derived_rng;
use crate::tensor::DenseTensor;

/// The system `Ax^{k-1} = 0` for `n = 2`: two binary forms of degree `k - 1`.
///
/// Coefficients are listed by descending power of `x_1`: `first[j]` is the
/// coefficient of `x_1^{deg-j} x_2^j` in `f_1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryFormPair {
    pub first: Vec<Rational>,
    pub second: Vec<Rational>,
}

impl BinaryFormPair {
    pub fn new(first: Vec<Rational>, second: Vec<Rational>) -> Result<Self> {
        if first.len() != second.len() || first.len() < 2 {
            return Err(Error::ShapeMismatch(format!(
                "binary forms need equal coefficient counts >= 2, got {} and {}",
                first.len(),
                second.len()
            )));
        }
        Ok(Self { first, second })
    }

    pub fn degree(&self) -> usize {
        self.first.len() - 1
    }

    /// `2d x 2d` Sylvester matrix: `d` shifted copies of `f_1` above `d`
    /// shifted copies of `f_2`.
    pub fn sylvester_matrix(&self) -> RationalMatrix {
        let d = self.degree();
        let mut m = RationalMatrix::zeros(2 * d, 2 * d);
        for (block, coeffs) in [&self.first, &self.second].into_iter().enumerate() {
            for shift in 0..d {
                for (j, c) in coeffs.iter().enumerate() {
                    m[(block * d + shift, shift + j)] = c.clone();
                }
            }
        }
        m
    }

    /// Homogeneous resultant; zero iff the forms share a projective root.
    pub fn resultant(&self) -> Rational {
        self.sylvester_matrix().det().expect("Sylvester matrices are square")
    }
}

fn require_dim2(a_dims: &[usize]) -> Result<usize> {
    if a_dims.iter().any(|&n| n != 2) {
        return Err(Error::Unsupported(format!(
            "dimension-2 cubical tensor required, got shape {a_dims:?}"
        )));
    }
    if a_dims.len() < 2 {
        return Err(Error::Unsupported(format!("order >= 2 required, got order {}", a_dims.len())));
    }
    Ok(a_dims.len())
}

pub fn to_binary_forms(a: &DenseTensor) -> Result<BinaryFormPair> {
    let k = require_dim2(a.dims())?;
    let mut forms = [vec![Rational::zero(); k], vec![Rational::zero(); k]];
    for (idx, v) in a.iter() {
        let twos = idx[1..].iter().filter(|&&i| i == 2).count();
        forms[idx[0] - 1][twos] += v;
    }
    let [first, second] = forms;
    BinaryFormPair::new(first, second)
}

/// Determinant of a dimension-2 tensor of order `k >= 2`. Equals 1 on the
/// unit tensor and the ordinary determinant when `k = 2`.
pub fn det_dim2(a: &DenseTensor) -> Result<Rational> {
    Ok(to_binary_forms(a)?.resultant())
}

pub fn det_matrix(m: &RationalMatrix) -> Result<Rational> {
    m.det()
}

#[derive(Debug, Clone, Serialize)]
pub struct FalsificationReport {
    /// Member with determinant exactly zero: a proof that the pattern is not
    /// sign-nonsingular.
    pub counterexample: Option<DenseTensor>,
    /// Smallest `|det|` over all members tried. Evidence only.
    #[serde(serialize_with = "serialize_rational_opt")]
    pub min_abs_det: Option<Rational>,
    pub trials: usize,
    pub seed: u64,
}

/// Searches `Q(S)` for a singular member. The all-ones member is tried first,
/// then `trials` log-uniform samples, trial `t` drawing from stream `t` of
/// `seed`. The first zero by trial order is reported.
pub fn sns_falsify_sample(s: &SignTensor, trials: usize, seed: u64) -> Result<FalsificationReport> {
    require_dim2(s.dims())?;
    let probe = unit_member(s);
    let probe_det = det_dim2(&probe)?;
    if probe_det.is_zero() {
        return Ok(FalsificationReport {
            counterexample: Some(probe),
            min_abs_det: Some(probe_det),
            trials,
            seed,
        });
    }
    let range = MagnitudeRange::default();
    let results: Vec<(DenseTensor, Rational)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let member = sample_member(s, &mut derived_rng(seed, t as u64), &range);
            let det = det_dim2(&member).expect("shape already checked");
            (member, det.abs())
        })
        .collect();
    let mut min_abs = probe_det.abs();
    let mut counterexample = None;
    for (member, det) in results {
        if det.is_zero() && counterexample.is_none() {
            counterexample = Some(member);
        }
        if det < min_abs {
            min_abs = det;
        }
    }
    Ok(FalsificationReport { counterexample, min_abs_det: Some(min_abs), trials, seed })
}
