//! Zeroing a slice by an invertible change of basis in one mode.

use num_traits::{One, Zero};

use crate::error::Result;
use crate::matrix::RationalMatrix;
use crate::rational::Rational;
use crate::tensor::DenseTensor;

/// If `r_s(A) < n_s`, returns an invertible `P` and `B = (I, …, P, …, I)·A`
/// whose last mode-`s` slice is zero. `P` keeps the unit rows `e_i`, `i != p`,
/// and ends with a left-kernel vector `y` of the unfolding normalised to
/// `y_p = 1` at its last nonzero position `p`.
pub fn mode_compress(a: &DenseTensor, mode: usize) -> Result<Option<(RationalMatrix, DenseTensor)>> {
    a.shape().check_mode(mode)?;
    let unfolding = a.unfold(mode)?;
    let n = unfolding.rows();
    let Some(y) = unfolding.transpose().null_space().into_iter().next() else {
        return Ok(None);
    };
    let p = y.iter().rposition(|v| !v.is_zero()).expect("kernel vectors are nonzero");
    let scale = y[p].clone();
    let mut data: Vec<Rational> = Vec::with_capacity(n * n);
    for i in (0..n).filter(|&i| i != p) {
        data.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
    }
    data.extend(y.iter().map(|v| v / &scale));
    let pm = RationalMatrix::new(n, n, data)?;
    let b = a.mode_product(mode, &pm)?;
    Ok(Some((pm, b)))
}
