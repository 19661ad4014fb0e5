//! Order-2 sign inverses of tensors under the general product.
//!
//! `A` has an order-2 left inverse iff `A = P·I` for an invertible matrix
//! `P`, and an order-2 right inverse iff `A = I·Q` for an invertible `Q`.
//! The sign-level decisions ask whether every member of `Q(S)` has one.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::combinatorics::{is_sns_matrix, SignMatrix};
use crate::error::{Error, Result};
use crate::matrix::RationalMatrix;
use crate::qualitative::{Sign, SignTensor};
use crate::rational::{exact_root, Rational};
use crate::tensor::{outer_product, shao_product, DenseTensor, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum InverseReason {
    Accepted,
    /// A nonzero entry off the positions `(i, j, …, j)`.
    Structure,
    /// The majorization pattern is not an SNS matrix.
    NotSns,
    /// Some mode-1 slice does not have exactly one nonzero, or the columns
    /// `j_i` do not form a permutation.
    NotPermutation,
    /// Odd order with a negative entry.
    NegativeSign,
}

/// Right inverse witness `sgn(A) = DP·I`: `permutation[i-1] = j_i`, the
/// column of the single nonzero of slice `i`, and `signing[i-1]` its sign.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignWitness {
    pub permutation: Vec<usize>,
    pub signing: Vec<i8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InverseDecision {
    pub decision: bool,
    pub reason: InverseReason,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<SignWitness>,
}

impl InverseDecision {
    fn reject(reason: InverseReason) -> Self {
        Self { decision: false, reason, witness: None }
    }
}

fn require_order3_cubical<T>(s: &Tensor<T>) -> Result<usize>
where
    T: crate::tensor::Entry,
{
    let n = s.shape().cubical_dim().ok_or_else(|| Error::NotCubical(s.dims().to_vec()))?;
    if s.order() < 3 {
        return Err(Error::Unsupported(format!("order >= 3 required, got order {}", s.order())));
    }
    Ok(n)
}

/// Nonzeros only at `(i, j, …, j)`.
fn majorization_supported<T: crate::tensor::Entry>(t: &Tensor<T>) -> bool {
    t.iter().all(|(idx, _)| idx[2..].iter().all(|&x| x == idx[1]))
}

/// Every member of `Q(S)` has an order-2 left inverse: nonzeros only at
/// `(i, j, …, j)` and the majorization pattern is an SNS matrix.
pub fn has_sign_left_inverse_order2(s: &SignTensor) -> Result<InverseDecision> {
    let n = require_order3_cubical(s)?;
    if !majorization_supported(s) {
        return Ok(InverseDecision::reject(InverseReason::Structure));
    }
    let mut data = vec![0i8; n * n];
    for (idx, sign) in s.iter() {
        data[(idx[0] - 1) * n + idx[1] - 1] = sign.as_i8();
    }
    if !is_sns_matrix(&SignMatrix::new(n, n, data)?)? {
        return Ok(InverseDecision::reject(InverseReason::NotSns));
    }
    Ok(InverseDecision { decision: true, reason: InverseReason::Accepted, witness: None })
}

/// Every member of `Q(S)` has an order-2 right inverse: `sgn(S) = DP·I` for
/// a permutation matrix `P` and a signing `D`, with `D = I` when the order is
/// odd. The witness is unique because each slice has a single nonzero.
pub fn has_sign_right_inverse_order2(s: &SignTensor) -> Result<InverseDecision> {
    let n = require_order3_cubical(s)?;
    let k = s.order();
    let mut columns: Vec<Option<(usize, Sign)>> = vec![None; n];
    for (idx, sign) in s.iter() {
        let slot = &mut columns[idx[0] - 1];
        if slot.is_some() || idx[2..].iter().any(|&x| x != idx[1]) {
            return Ok(InverseDecision::reject(InverseReason::NotPermutation));
        }
        *slot = Some((idx[1], *sign));
    }
    let Some(entries) = columns.into_iter().collect::<Option<Vec<_>>>() else {
        return Ok(InverseDecision::reject(InverseReason::NotPermutation));
    };
    let mut seen = vec![false; n];
    for &(j, _) in &entries {
        if std::mem::replace(&mut seen[j - 1], true) {
            return Ok(InverseDecision::reject(InverseReason::NotPermutation));
        }
    }
    if k % 2 == 1 && entries.iter().any(|&(_, sign)| sign == Sign::Minus) {
        return Ok(InverseDecision::reject(InverseReason::NegativeSign));
    }
    Ok(InverseDecision {
        decision: true,
        reason: InverseReason::Accepted,
        witness: Some(SignWitness {
            permutation: entries.iter().map(|&(j, _)| j).collect(),
            signing: entries.iter().map(|&(_, sign)| sign.as_i8()).collect(),
        }),
    })
}

/// `P^{-1}` when `A = P·I` with `P` invertible, checked by
/// `P^{-1}·A = I` exactly.
pub fn left_inverse_order2(a: &DenseTensor) -> Result<Option<RationalMatrix>> {
    let n = a.shape().cubical_dim().ok_or_else(|| Error::NotCubical(a.dims().to_vec()))?;
    if a.order() < 2 {
        return Err(Error::Unsupported("order >= 2 required".into()));
    }
    if a.order() > 2 && !majorization_supported(a) {
        return Ok(None);
    }
    let Some(inv) = a.majorization_matrix()?.inverse() else {
        return Ok(None);
    };
    let product = shao_product(&DenseTensor::from_matrix(&inv)?, a)?;
    assert_eq!(product, DenseTensor::unit(n, a.order())?, "left inverse failed verification");
    Ok(Some(inv))
}

/// Right inverse `Q^{-1}` of `A = I·Q`, stored as `F^{-1}` and slice scales.
///
/// Slice `i` of `A` equals `c_i f_i^{⊗(k-1)}` for a rational row `f_i`, so
/// `q_i = c_i^{1/(k-1)} f_i` and `Q^{-1} = F^{-1} diag(c_i^{-1/(k-1)})`. The
/// roots need not be rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RightInverse {
    pub f_inverse: RationalMatrix,
    pub scales: Vec<Rational>,
    /// `k - 1`.
    pub root: u32,
}

impl RightInverse {
    /// `Q^{-1}` when every `c_i^{-1/(k-1)}` is rational.
    pub fn to_rational(&self) -> Option<RationalMatrix> {
        let n = self.scales.len();
        let roots: Vec<Rational> = self
            .scales
            .iter()
            .map(|c| exact_root(&c.recip(), self.root))
            .collect::<Option<_>>()?;
        let mut m = self.f_inverse.clone();
        for i in 0..n {
            for (j, d) in roots.iter().enumerate() {
                m[(i, j)] = &m[(i, j)] * d;
            }
        }
        Some(m)
    }

    /// Exact check: `A·F^{-1}` is diagonal with entries `c_i`, which makes
    /// `A·Q^{-1}` the unit tensor; when `Q^{-1}` is rational that product is
    /// also formed and compared directly.
    pub fn verify(&self, a: &DenseTensor) -> Result<bool> {
        let n = self.scales.len();
        let k = a.order();
        let diag = Tensor::from_entries(
            a.shape().clone(),
            self.scales.iter().enumerate().map(|(i, c)| (vec![i + 1; k], c.clone())),
        )?;
        if shao_product(a, &DenseTensor::from_matrix(&self.f_inverse)?)? != diag {
            return Ok(false);
        }
        match self.to_rational() {
            Some(q_inv) => Ok(shao_product(a, &DenseTensor::from_matrix(&q_inv)?)? == DenseTensor::unit(n, k)?),
            None => Ok(true),
        }
    }
}

impl Serialize for RightInverse {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("RightInverse", 4)?;
        st.serialize_field("f_inverse", &self.f_inverse)?;
        st.serialize_field(
            "scales",
            &self.scales.iter().map(crate::rational::format_rational).collect::<Vec<_>>(),
        )?;
        st.serialize_field("root", &self.root)?;
        st.serialize_field("inverse", &self.to_rational())?;
        st.end()
    }
}

/// Recognises `A = I·Q` with `Q` real and invertible.
pub fn right_inverse_order2(a: &DenseTensor) -> Result<Option<RightInverse>> {
    let n = a.shape().cubical_dim().ok_or_else(|| Error::NotCubical(a.dims().to_vec()))?;
    let k = a.order();
    if k < 2 {
        return Err(Error::Unsupported("order >= 2 required".into()));
    }
    let root = (k - 1) as u32;
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(n);
    let mut scales = Vec::with_capacity(n);
    for i in 1..=n {
        let slice = a.slice(1, i)?;
        let Some((first, _)) = slice.iter().next() else {
            return Ok(None);
        };
        // The mode-(k-1) fiber through the first nonzero.
        let mut at = first.clone();
        let f: Vec<Rational> = (1..=n)
            .map(|t| {
                *at.last_mut().expect("order >= 1") = t;
                slice.value(&at)
            })
            .collect();
        let base: Rational = first.iter().map(|&j| f[j - 1].clone()).product();
        if base.is_zero() {
            return Ok(None);
        }
        let c = slice.value(first) / base;
        if root.is_multiple_of(2) && !c.is_positive() {
            return Ok(None);
        }
        let power = if root == 1 {
            DenseTensor::from_values(slice.shape().clone(), f.clone())?
        } else {
            outer_product(&vec![f.clone(); root as usize])?
        };
        if power.scale(&c) != slice {
            return Ok(None);
        }
        rows.push(f);
        scales.push(c);
    }
    let Some(f_inverse) = RationalMatrix::from_rows(rows)?.inverse() else {
        return Ok(None);
    };
    let inv = RightInverse { f_inverse, scales, root };
    assert!(inv.verify(a)?, "right inverse failed verification");
    Ok(Some(inv))
}

/// `A = I·Q`, built directly: slice `i` is `q_i^{⊗(k-1)}`.
pub fn unit_times_matrix(q: &RationalMatrix, order: usize) -> Result<DenseTensor> {
    let n = q.rows();
    let mut a = DenseTensor::zeros(crate::tensor::Shape::cubical(n, order)?);
    for i in 0..n {
        let row = q.row(i).to_vec();
        if row.iter().all(Zero::is_zero) {
            continue;
        }
        let power = outer_product(&vec![row; order - 1])?;
        for (idx, v) in power.iter() {
            let mut full = vec![i + 1];
            full.extend_from_slice(idx);
            a.set(full, v.clone());
        }
    }
    Ok(a)
}

/// `A = P·I`: `p_{ij}` at `(i, j, …, j)`.
pub fn matrix_times_unit(p: &RationalMatrix, order: usize) -> Result<DenseTensor> {
    let n = p.rows();
    let mut a = DenseTensor::zeros(crate::tensor::Shape::cubical(n, order)?);
    for i in 0..n {
        for j in 0..n {
            let mut idx = vec![j + 1; order];
            idx[0] = i + 1;
            a.set(idx, p[(i, j)].clone());
        }
    }
    Ok(a)
}
