//! Bounds on `mr(S)` and `Mr(S)` from exact arguments and searches.

use rayon::prelude::*;
use serde::Serialize;

use super::{
    mr_upper_search, pattern_forces_rank3, rank_222_exact, rank_lower_bound, CpOptions, Justification,
    RankCertificate,
};
use crate::combinatorics::{is_l_matrix, term_rank, unfold_pattern, MAX_L_ROWS, MAX_SNS_DIM};
use crate::inverse::{has_sign_left_inverse_order2, has_sign_right_inverse_order2};
use crate::qualitative::{is_mr1, sample_member, MagnitudeRange, SignTensor};
use crate::rng::derived_rng;

/// Sampled members draw from streams offset by this, away from the search
/// restarts.
const SAMPLE_STREAM: u64 = 1 << 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsOptions {
    /// Largest rank tried by the upper search; defaults to the trivial bound
    /// `∏_{j != argmax} n_j`.
    pub r_max: Option<usize>,
    /// Members sampled for the lower bound on `Mr`.
    pub samples: usize,
    #[serde(flatten)]
    pub cp: CpOptions,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        Self { r_max: None, samples: 200, cp: CpOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundsReport {
    pub shape: Vec<usize>,
    pub term_rank: usize,
    pub mr_low: RankCertificate,
    /// `None` when the scan found nothing up to `r_max`.
    pub mr_high: Option<RankCertificate>,
    #[serde(rename = "Mr_low")]
    pub max_rank_low: RankCertificate,
    #[serde(rename = "Mr_high", skip_serializing_if = "Option::is_none")]
    pub max_rank_high: Option<RankCertificate>,
    pub options: BoundsOptions,
}

/// Every tensor has rank at most the product of all dimensions but the
/// largest.
pub fn trivial_rank_bound(dims: &[usize]) -> usize {
    let largest = dims.iter().copied().max().unwrap_or(1);
    dims.iter().product::<usize>() / largest
}

fn is_222(s: &SignTensor) -> bool {
    s.dims() == [2, 2, 2]
}

/// Best exact lower bound on the rank of every member.
fn min_rank_lower(s: &SignTensor) -> RankCertificate {
    if s.is_zero() {
        return RankCertificate::lower(0, Justification::Trivial);
    }
    let mut best = RankCertificate::lower(1, Justification::Nonzero);
    let mut offer = |value: usize, why: Justification| {
        if value > best.value {
            best = RankCertificate::lower(value, why);
        }
    };
    if let Some(n) = s.shape().cubical_dim() {
        if s.order() >= 3 && n <= MAX_SNS_DIM {
            let left = has_sign_left_inverse_order2(s).map(|d| d.decision).unwrap_or(false);
            let right = has_sign_right_inverse_order2(s).map(|d| d.decision).unwrap_or(false);
            if left || right {
                offer(n, Justification::SignInverse);
            }
        }
    }
    for mode in 1..=s.order() {
        let n = s.shape().dim(mode);
        if n <= MAX_L_ROWS && is_l_matrix(&unfold_pattern(s, mode)).unwrap_or(false) {
            offer(n, Justification::LMatrixUnfolding);
        }
    }
    if is_222(s) && pattern_forces_rank3(s).unwrap_or(false) {
        offer(3, Justification::Pattern222);
    }
    if !is_mr1(s) {
        offer(2, Justification::Condensation);
    }
    best
}

/// Best member lower bound over `samples` sampled members.
fn sampled_lower(s: &SignTensor, samples: usize, seed: u64) -> Option<RankCertificate> {
    let range = MagnitudeRange::default();
    let oracle = is_222(s);
    let results: Vec<RankCertificate> = (0..samples)
        .into_par_iter()
        .map(|t| {
            let member = sample_member(s, &mut derived_rng(seed, SAMPLE_STREAM + t as u64), &range);
            let mut cert = rank_lower_bound(&member);
            if oracle {
                let exact = rank_222_exact(&member).expect("shape checked");
                if exact > cert.value {
                    cert = RankCertificate::lower(exact, Justification::Oracle222);
                }
            }
            cert.with_member(member)
        })
        .collect();
    results.into_iter().reduce(|best, c| if c.value > best.value { c } else { best })
}

/// Combined bounds for a sign pattern:
///
/// * `mr_low`: exact arguments valid for every member (nonzero, condensation,
///   sign inverses, L-matrix unfoldings, the 2×2×2 pattern test);
/// * `mr_high`: smallest `r` certified by [`mr_upper_search`], scanning from
///   `mr_low` to `r_max`;
/// * `Mr_low`: the term rank, the best sampled member bound, or `mr_low`;
/// * `Mr_high`: 3 for 2×2×2 patterns only.
pub fn bounds_report(s: &SignTensor, opts: &BoundsOptions) -> BoundsReport {
    let matching = term_rank(s);
    let rho = matching.size();
    let mr_low = min_rank_lower(s);
    let max_rank_high = is_222(s).then(|| RankCertificate::upper(3, Justification::MaxRank222));

    let r_max = opts.r_max.unwrap_or_else(|| trivial_rank_bound(s.dims()));
    let mr_high = if s.is_zero() {
        mr_upper_search(s, 1, &opts.cp).certificate().cloned()
    } else if max_rank_high.as_ref().is_some_and(|c| c.value == mr_low.value) {
        Some(RankCertificate::upper(3, Justification::MaxRank222))
    } else {
        (mr_low.value.max(1)..=r_max).find_map(|r| mr_upper_search(s, r, &opts.cp).certificate().cloned())
    };

    let mut max_rank_low = RankCertificate { matching: Some(matching), ..RankCertificate::lower(rho, Justification::TermRank) };
    if let Some(c) = sampled_lower(s, opts.samples, opts.cp.seed) {
        if c.value > max_rank_low.value {
            max_rank_low = c;
        }
    }
    if mr_low.value > max_rank_low.value {
        max_rank_low = mr_low.clone();
    }

    BoundsReport {
        shape: s.dims().to_vec(),
        term_rank: rho,
        mr_low,
        mr_high,
        max_rank_low,
        max_rank_high,
        options: opts.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qualitative::sign_pattern;
    use crate::tensor::DenseTensor;

    fn signs(v: &[i8]) -> SignTensor {
        SignTensor::from_signs(&[2, 2, 2], v).unwrap()
    }

    #[test]
    fn unit_pattern() {
        let s = sign_pattern(&DenseTensor::unit(2, 3).unwrap());
        let r = bounds_report(&s, &BoundsOptions::default());
        assert_eq!(r.mr_low.value, 2);
        assert_eq!(r.mr_low.justification, Justification::SignInverse);
        assert_eq!(r.max_rank_low.value, 2);
        assert_eq!(r.mr_high.unwrap().value, 2);
        assert_eq!(r.max_rank_high.unwrap().value, 3);
    }

    #[test]
    fn example_pattern() {
        let s = signs(&[1, 0, 0, 1, 1, -1, 1, 1]);
        let r = bounds_report(&s, &BoundsOptions::default());
        assert_eq!(r.term_rank, 2);
        assert_eq!(r.max_rank_low.value, 3);
        assert_eq!(r.max_rank_low.justification, Justification::Oracle222);
        assert!(r.max_rank_low.value > r.term_rank);
    }

    #[test]
    fn all_plus_pattern() {
        let r = bounds_report(&signs(&[1; 8]), &BoundsOptions::default());
        assert_eq!(r.mr_low.value, 1);
        assert_eq!(r.mr_high.unwrap().value, 1);
    }

    #[test]
    fn sns_cube_pattern() {
        let s = signs(&[1, 0, 0, 1, 0, 1, 0, 0]);
        let r = bounds_report(&s, &BoundsOptions::default());
        assert_eq!(r.mr_low.value, 3);
        assert_eq!(r.mr_low.justification, Justification::Pattern222);
        assert_eq!(r.mr_high.unwrap().value, 3);
        assert_eq!(r.max_rank_low.value, 3);
    }

    #[test]
    fn zero_pattern() {
        let r = bounds_report(&signs(&[0; 8]), &BoundsOptions::default());
        assert_eq!(r.mr_low.value, 0);
        assert_eq!(r.mr_high.unwrap().value, 0);
        assert_eq!(r.max_rank_low.value, 0);
    }

    #[test]
    fn report_keys() {
        let r = bounds_report(&signs(&[1; 8]), &BoundsOptions { samples: 5, ..BoundsOptions::default() });
        let json = serde_json::to_value(&r).unwrap();
        for key in ["mr_low", "mr_high", "Mr_low", "Mr_high", "term_rank", "options"] {
            assert!(json.get(key).is_some(), "{key}");
        }
        assert_eq!(json["options"]["seed"], 0);
        assert_eq!(trivial_rank_bound(&[2, 3, 4]), 6);
    }
}
