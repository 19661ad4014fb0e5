//! Sign patterns and qualitative classes.
//!
//! A qualitative class is represented by its [`SignTensor`] together with
//! [`sample_member`], which draws real members with independent magnitudes.
//! Condensation deletes, mode by mode, every slice whose sign pattern is zero
//! or equal/opposite to an earlier kept slice of the same mode. It preserves
//! the minimum rank (but not the maximum rank), and the minimum rank is one
//! exactly when the condensed pattern is a single `+` or `-`.

use std::collections::BTreeMap;
use std::ops::{Mul, Neg};

use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::RationalMatrix;
use crate::rational::{round_significant, Rational};
use crate::tensor::{DenseTensor, Entry, Index, Shape, Tensor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    /// Sign of a rational; `None` for zero.
    pub fn of(q: &Rational) -> Option<Sign> {
        if q.is_zero() {
            None
        } else if q.is_positive() {
            Some(Sign::Plus)
        } else {
            Some(Sign::Minus)
        }
    }

    pub fn of_f64(x: f64) -> Option<Sign> {
        if x > 0.0 {
            Some(Sign::Plus)
        } else if x < 0.0 {
            Some(Sign::Minus)
        } else {
            None
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Minus => -1,
            Sign::Plus => 1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.as_i8())
    }

    pub fn to_rational(self) -> Rational {
        match self {
            Sign::Minus => -Rational::one(),
            Sign::Plus => Rational::one(),
        }
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Plus => Sign::Minus,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl Entry for Sign {
    fn is_zero_entry(&self) -> bool {
        false
    }
}

pub type SignTensor = Tensor<Sign>;

impl SignTensor {
    /// Sign tensor from `-1/0/1` values in lexicographic index order.
    pub fn from_signs(dims: &[usize], values: &[i8]) -> Result<Self> {
        let shape = Shape::new(dims.to_vec())?;
        if values.len() != shape.num_entries() {
            return Err(Error::ShapeMismatch(format!("{} signs for shape {dims:?}", values.len())));
        }
        let mut entries = Vec::new();
        for (idx, &v) in shape.indices().zip(values) {
            match v {
                0 => {}
                1 => entries.push((idx, Sign::Plus)),
                -1 => entries.push((idx, Sign::Minus)),
                other => return Err(Error::Parse(format!("sign value {other}"))),
            }
        }
        Self::from_entries(shape, entries)
    }

    pub fn sign_at(&self, index: &[usize]) -> i8 {
        self.get(index).map_or(0, |s| s.as_i8())
    }

    pub fn count(&self, sign: Sign) -> usize {
        self.iter().filter(|(_, s)| **s == sign).count()
    }
}

/// Entrywise sign pattern.
pub fn sign_pattern(a: &DenseTensor) -> SignTensor {
    let mut s = SignTensor::zeros(a.shape().clone());
    for (idx, v) in a.iter() {
        if let Some(sign) = Sign::of(v) {
            s.set(idx.clone(), sign);
        }
    }
    s
}

/// Magnitudes are drawn log-uniformly from `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MagnitudeRange {
    lo: f64,
    hi: f64,
}

impl MagnitudeRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::EmptyRange { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.lo == self.hi {
            return self.lo;
        }
        rng.random_range(self.lo.ln()..=self.hi.ln()).exp()
    }
}

impl Default for MagnitudeRange {
    fn default() -> Self {
        Self { lo: 0.1, hi: 10.0 }
    }
}

/// A member of `Q(S)`: every nonzero sign receives an independent magnitude,
/// rounded to six significant digits.
pub fn sample_member<R: Rng + ?Sized>(s: &SignTensor, rng: &mut R, range: &MagnitudeRange) -> DenseTensor {
    let entries: Vec<(Vec<usize>, Rational)> = s
        .iter()
        .map(|(idx, sign)| {
            let magnitude = round_significant(range.sample(rng), 6);
            let magnitude = if magnitude.is_zero() { Rational::one() } else { magnitude };
            (idx.clone(), if *sign == Sign::Plus { magnitude } else { -magnitude })
        })
        .collect();
    DenseTensor::from_entries(s.shape().clone(), entries).expect("indices come from a valid tensor")
}

/// The member of `Q(S)` with every magnitude equal to one.
pub fn unit_member(s: &SignTensor) -> DenseTensor {
    s.map(|sign| sign.to_rational())
}

/// Per-mode permutations and ±1 signings, acting as `(D_1P_1, …, D_kP_k)`.
///
/// `perms[j][i-1]` is the image of index `i` in mode `j+1`; the signing is
/// applied after the permutation, to the permuted position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedPermutation {
    perms: Vec<Vec<usize>>,
    signings: Vec<Vec<Sign>>,
}

impl SignedPermutation {
    pub fn new(perms: Vec<Vec<usize>>, signings: Vec<Vec<Sign>>) -> Result<Self> {
        if perms.len() != signings.len() {
            return Err(Error::ShapeMismatch("one signing per permuted mode required".into()));
        }
        for (mode, (perm, signing)) in perms.iter().zip(&signings).enumerate() {
            let n = perm.len();
            let mut seen = vec![false; n];
            for &p in perm {
                if p == 0 || p > n || std::mem::replace(&mut seen[p - 1], true) {
                    return Err(Error::ShapeMismatch(format!(
                        "mode {}: {perm:?} is not a permutation of 1..={n}",
                        mode + 1
                    )));
                }
            }
            if signing.len() != n {
                return Err(Error::ShapeMismatch(format!("mode {}: signing length {}", mode + 1, signing.len())));
            }
        }
        Ok(Self { perms, signings })
    }

    pub fn identity(shape: &Shape) -> Self {
        Self {
            perms: shape.dims().iter().map(|&n| (1..=n).collect()).collect(),
            signings: shape.dims().iter().map(|&n| vec![Sign::Plus; n]).collect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(shape: &Shape, rng: &mut R) -> Self {
        use rand::seq::SliceRandom;
        let mut perms = Vec::new();
        let mut signings = Vec::new();
        for &n in shape.dims() {
            let mut p: Vec<usize> = (1..=n).collect();
            p.shuffle(rng);
            perms.push(p);
            signings.push((0..n).map(|_| if rng.random_bool(0.5) { Sign::Plus } else { Sign::Minus }).collect());
        }
        Self { perms, signings }
    }

    pub fn dims(&self) -> Vec<usize> {
        self.perms.iter().map(Vec::len).collect()
    }

    pub fn perms(&self) -> &[Vec<usize>] {
        &self.perms
    }

    pub fn signings(&self) -> &[Vec<Sign>] {
        &self.signings
    }

    /// The matrices `D_j P_j`.
    pub fn matrices(&self) -> Vec<RationalMatrix> {
        self.perms
            .iter()
            .zip(&self.signings)
            .map(|(perm, signing)| {
                let mut m = RationalMatrix::zeros(perm.len(), perm.len());
                for (i, &p) in perm.iter().enumerate() {
                    m[(p - 1, i)] = signing[p - 1].to_rational();
                }
                m
            })
            .collect()
    }
}

/// Sign pattern of `(D_1P_1, …, D_kP_k) · Ã` for any member `Ã` of `Q(S)`.
pub fn signed_permute(s: &SignTensor, g: &SignedPermutation) -> Result<SignTensor> {
    if g.dims() != s.dims() {
        return Err(Error::ShapeMismatch(format!(
            "move for shape {:?} applied to {:?}",
            g.dims(),
            s.dims()
        )));
    }
    let entries = s.iter().map(|(idx, &sign)| {
        let mut moved = Vec::with_capacity(idx.len());
        let mut out = sign;
        for (mode, &i) in idx.iter().enumerate() {
            let p = g.perms[mode][i - 1];
            out = out * g.signings[mode][p - 1];
            moved.push(p);
        }
        (moved, out)
    });
    SignTensor::from_entries(s.shape().clone(), entries)
}

type SlicePattern = BTreeMap<Index, Sign>;

fn mode_slices(s: &SignTensor, mode: usize) -> Vec<SlicePattern> {
    let mut slices = vec![SlicePattern::new(); s.shape().dim(mode)];
    for (idx, &sign) in s.iter() {
        let mut rest = idx.clone();
        rest.remove(mode - 1);
        slices[idx[mode - 1] - 1].insert(rest, sign);
    }
    slices
}

fn is_opposite(a: &SlicePattern, b: &SlicePattern) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|((ia, sa), (ib, sb))| ia == ib && *sa == -*sb)
}

/// Positions (1-based) of the mode-`mode` slices that survive one deletion
/// pass.
fn kept_slices(s: &SignTensor, mode: usize) -> Vec<usize> {
    let slices = mode_slices(s, mode);
    let mut kept: Vec<usize> = Vec::new();
    for (i, slice) in slices.iter().enumerate() {
        if slice.is_empty() {
            continue;
        }
        let redundant = kept.iter().any(|&j| {
            let other = &slices[j - 1];
            other == slice || is_opposite(other, slice)
        });
        if !redundant {
            kept.push(i + 1);
        }
    }
    kept
}

/// Condensed pattern `C(S)`. Modes are cycled in ascending order until no
/// slice can be deleted; the zero pattern condenses to the `1×⋯×1` zero.
pub fn condense(s: &SignTensor) -> SignTensor {
    if s.is_zero() {
        let shape = Shape::new(vec![1; s.order()]).expect("order is at least one");
        return SignTensor::zeros(shape);
    }
    let mut current = s.clone();
    loop {
        let mut changed = false;
        for mode in 1..=current.order() {
            let kept = kept_slices(&current, mode);
            if kept.len() < current.shape().dim(mode) {
                let subsets: Vec<Vec<usize>> = (1..=current.order())
                    .map(|m| if m == mode { kept.clone() } else { (1..=current.shape().dim(m)).collect() })
                    .collect();
                current = current.subtensor(&subsets).expect("kept slices are in range and nonempty");
                changed = true;
            }
        }
        if !changed {
            return current;
        }
    }
}

/// Whether the minimum rank over `Q(S)` equals one.
pub fn is_mr1(s: &SignTensor) -> bool {
    let c = condense(s);
    c.dims().iter().all(|&d| d == 1) && c.nnz() == 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::derived_rng;
    use crate::tensor::outer_product;
    use proptest::prelude::*;
    use rand::Rng;

    fn signs(dims: &[usize], v: &[i8]) -> SignTensor {
        SignTensor::from_signs(dims, v).unwrap()
    }

    fn gap_cube() -> SignTensor {
        signs(&[2, 2, 2], &[1, 0, 0, 1, 1, -1, 1, 1])
    }

    #[test]
    fn patterns() {
        let a = DenseTensor::from_i64(&[2, 2], &[2, 0, -3, 1]).unwrap();
        assert_eq!(sign_pattern(&a), signs(&[2, 2], &[1, 0, -1, 1]));
        let zero = DenseTensor::zeros(Shape::new(vec![2, 3]).unwrap());
        assert!(sign_pattern(&zero).is_zero());
        let sns_cube = DenseTensor::from_i64(&[2, 2, 2], &[2, 0, 0, 3, 0, 3, 0, 0]).unwrap();
        let s = sign_pattern(&sns_cube);
        let support: Vec<_> = s.iter().map(|(i, &g)| (i.clone(), g)).collect();
        assert_eq!(
            support,
            vec![(vec![1, 1, 1], Sign::Plus), (vec![1, 2, 2], Sign::Plus), (vec![2, 1, 2], Sign::Plus)]
        );
    }

    #[test]
    fn sampling() {
        let range = MagnitudeRange::default();
        let zero = SignTensor::zeros(Shape::new(vec![2, 2]).unwrap());
        assert!(sample_member(&zero, &mut derived_rng(0, 0), &range).is_zero());
        let s = gap_cube();
        let members: Vec<_> = (0..10).map(|seed| sample_member(&s, &mut derived_rng(seed, 0), &range)).collect();
        for m in &members {
            assert_eq!(sign_pattern(m), s);
            for (_, v) in m.iter() {
                let x = crate::rational::to_f64(v).abs();
                assert!((0.099..=10.01).contains(&x));
            }
        }
        for pair in members.windows(2) {
            assert_ne!(pair[0], pair[1]);
        }
        assert_eq!(sample_member(&s, &mut derived_rng(7, 3), &range), sample_member(&s, &mut derived_rng(7, 3), &range));
        assert!(MagnitudeRange::new(2.0, 1.0).is_err());
        assert!(MagnitudeRange::new(0.0, 1.0).is_err());
        let fixed = MagnitudeRange::new(1.0, 1.0).unwrap();
        assert_eq!(sample_member(&s, &mut derived_rng(1, 1), &fixed), unit_member(&s));
    }

    #[test]
    fn signed_permutations() {
        let s = gap_cube();
        assert_eq!(signed_permute(&s, &SignedPermutation::identity(s.shape())).unwrap(), s);
        let all_minus = SignedPermutation::new(
            vec![vec![1, 2]; 3],
            vec![vec![Sign::Minus; 2]; 3],
        )
        .unwrap();
        let flipped = signed_permute(&s, &all_minus).unwrap();
        assert_eq!(flipped, s.map(|g| -*g));
        let m = signs(&[2, 2], &[1, 0, 0, -1]);
        let swap = SignedPermutation::new(vec![vec![2, 1], vec![1, 2]], vec![vec![Sign::Plus; 2]; 2]).unwrap();
        assert_eq!(signed_permute(&m, &swap).unwrap(), signs(&[2, 2], &[0, -1, 1, 0]));
        assert!(SignedPermutation::new(vec![vec![1, 1]], vec![vec![Sign::Plus; 2]]).is_err());
        assert!(signed_permute(&m, &all_minus).is_err());
    }

    #[test]
    fn condensation() {
        let c = condense(&signs(&[2, 2], &[1, 1, 1, 1]));
        assert_eq!(c, signs(&[1, 1], &[1]));
        let c = condense(&signs(&[2, 2], &[1, -1, -1, 1]));
        assert_eq!(c, signs(&[1, 1], &[1]));
        assert_eq!(condense(&gap_cube()), gap_cube());
        let zero = SignTensor::zeros(Shape::new(vec![3, 2]).unwrap());
        assert_eq!(condense(&zero).dims(), &[1, 1]);
        assert!(condense(&zero).is_zero());
        // Vectors condense to a single entry.
        assert_eq!(condense(&signs(&[3], &[0, -1, 1])), signs(&[1], &[-1]));
    }

    #[test]
    fn rank_one_decision() {
        let r1 = outer_product(&[
            vec![Rational::from_integer(2.into()), Rational::zero(), Rational::from_integer((-1).into())],
            vec![Rational::from_integer((-3).into()), Rational::one()],
            vec![Rational::one(), Rational::one()],
        ])
        .unwrap();
        assert!(is_mr1(&sign_pattern(&r1)));
        assert!(!is_mr1(&SignTensor::zeros(Shape::new(vec![2, 2]).unwrap())));
        assert!(!is_mr1(&gap_cube()));
        assert!(!is_mr1(&signs(&[2, 2], &[1, 0, 0, 1])));
    }

    fn sign_tensor(dims: Vec<usize>) -> impl Strategy<Value = SignTensor> {
        let len: usize = dims.iter().product();
        prop::collection::vec(-1i8..=1, len).prop_map(move |v| SignTensor::from_signs(&dims, &v).unwrap())
    }

    fn any_sign_tensor() -> impl Strategy<Value = SignTensor> {
        prop::collection::vec(1usize..=3, 1..=4).prop_flat_map(sign_tensor)
    }

    proptest! {
        #[test]
        fn condense_is_idempotent(s in any_sign_tensor()) {
            let c = condense(&s);
            prop_assert_eq!(condense(&c), c);
        }

        #[test]
        fn mr1_invariant_under_moves(s in any_sign_tensor(), seed in any::<u64>()) {
            let mut rng = derived_rng(seed, 0);
            let g = SignedPermutation::random(s.shape(), &mut rng);
            prop_assert_eq!(is_mr1(&signed_permute(&s, &g).unwrap()), is_mr1(&s));
            let k = s.order();
            let (p, q) = (rng.random_range(1..=k), rng.random_range(1..=k));
            prop_assert_eq!(is_mr1(&s.transpose(p, q).unwrap()), is_mr1(&s));
        }

        #[test]
        fn moves_agree_with_member_transform(s in sign_tensor(vec![2, 3, 2]), seed in any::<u64>()) {
            let mut rng = derived_rng(seed, 1);
            let g = SignedPermutation::random(s.shape(), &mut rng);
            let member = sample_member(&s, &mut rng, &MagnitudeRange::default());
            let moved = member.multilinear_transform(&g.matrices()).unwrap();
            prop_assert_eq!(sign_pattern(&moved), signed_permute(&s, &g).unwrap());
        }

        #[test]
        fn subtensors_of_sign_outer_products(
            vecs in prop::collection::vec(prop::collection::vec(-1i8..=1, 1..=3), 1..=4),
            picks in prop::collection::vec(prop::collection::vec(any::<bool>(), 3), 4),
        ) {
            prop_assume!(vecs.iter().all(|v| v.iter().any(|&x| x != 0)));
            let rat: Vec<Vec<Rational>> = vecs.iter()
                .map(|v| v.iter().map(|&x| Rational::from_integer(x.into())).collect())
                .collect();
            let s = sign_pattern(&outer_product(&rat).unwrap());
            prop_assert!(is_mr1(&s));
            let subsets: Vec<Vec<usize>> = vecs.iter().zip(&picks)
                .map(|(v, p)| {
                    let chosen: Vec<usize> = (1..=v.len()).filter(|&i| p[i - 1]).collect();
                    if chosen.is_empty() { vec![1] } else { chosen }
                })
                .collect();
            let sub = s.subtensor(&subsets).unwrap();
            prop_assert!(sub.is_zero() || is_mr1(&sub));
        }
    }
}
