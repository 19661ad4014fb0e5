//! Cayley's hyperdeterminant and the real rank of 2×2×2 tensors.

use num_traits::{Signed, Zero};

use super::multilinear_rank;
use crate::combinatorics::{is_l_matrix, unfold_pattern};
use crate::error::{Error, Result};
use crate::qualitative::SignTensor;
use crate::rational::{int, Rational};
use crate::tensor::DenseTensor;

fn require_222(dims: &[usize]) -> Result<()> {
    if dims != [2, 2, 2] {
        return Err(Error::Unsupported(format!("shape 2x2x2 required, got {dims:?}")));
    }
    Ok(())
}

// The four complementary index pairs (i, 3-i) entering Δ.
const PAIRS: [([usize; 3], [usize; 3]); 4] = [
    ([1, 1, 1], [2, 2, 2]),
    ([1, 1, 2], [2, 2, 1]),
    ([1, 2, 1], [2, 1, 2]),
    ([1, 2, 2], [2, 1, 1]),
];

// The two quartic terms with coefficient 4.
const QUARTICS: [[[usize; 3]; 4]; 2] = [
    [[1, 1, 1], [1, 2, 2], [2, 1, 2], [2, 2, 1]],
    [[1, 1, 2], [1, 2, 1], [2, 1, 1], [2, 2, 2]],
];

/// Cayley's hyperdeterminant of a 2×2×2 tensor.
pub fn hyperdet_222(a: &DenseTensor) -> Result<Rational> {
    require_222(a.dims())?;
    let p: Vec<Rational> = PAIRS.iter().map(|(x, y)| a.value(x) * a.value(y)).collect();
    let mut delta = Rational::zero();
    for i in 0..4 {
        delta += &p[i] * &p[i];
        for j in i + 1..4 {
            delta -= int(2) * &p[i] * &p[j];
        }
    }
    for q in &QUARTICS {
        delta += int(4) * q.iter().map(|i| a.value(i)).product::<Rational>();
    }
    Ok(delta)
}

/// Real rank of a 2×2×2 tensor from its multilinear rank and the sign of Δ.
pub fn rank_222_exact(a: &DenseTensor) -> Result<usize> {
    require_222(a.dims())?;
    if a.is_zero() {
        return Ok(0);
    }
    let ml = multilinear_rank(a);
    if ml.ranks() == [1, 1, 1] {
        return Ok(1);
    }
    if ml.ranks().contains(&1) {
        return Ok(2);
    }
    Ok(if hyperdet_222(a)?.is_positive() { 2 } else { 3 })
}

/// Δ restricted to `Q(S)` is the zero polynomial: none of its twelve
/// monomials has all variables in the support of `S`.
pub fn hyperdet_vanishes_on_pattern(s: &SignTensor) -> Result<bool> {
    require_222(s.dims())?;
    let on = |i: &[usize; 3]| s.get(i).is_some();
    let pair_on: Vec<bool> = PAIRS.iter().map(|(x, y)| on(x) && on(y)).collect();
    Ok(!pair_on.iter().any(|&b| b) && !QUARTICS.iter().any(|q| q.iter().all(on)))
}

/// Every member of `Q(S)` has rank 3: Δ vanishes identically and every
/// unfolding pattern is an L-matrix (so each member has multilinear rank
/// (2, 2, 2)).
pub fn pattern_forces_rank3(s: &SignTensor) -> Result<bool> {
    if !hyperdet_vanishes_on_pattern(s)? {
        return Ok(false);
    }
    for mode in 1..=3 {
        if !is_l_matrix(&unfold_pattern(s, mode))? {
            return Ok(false);
        }
    }
    Ok(true)
}
