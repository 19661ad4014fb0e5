//! Multilinear rank, the 2×2×2 real rank oracle, CP fitting, slice
//! compression and bounds on the minimum and maximum rank of a qualitative
//! class.

mod als;
mod bounds;
mod compress;
mod hyperdet;
mod search;

use serde::Serialize;

use crate::combinatorics::Matching;
use crate::tensor::{DenseTensor, FactorList};

pub use als::{cp_fit, CpOptions, FitOutcome};
pub use bounds::{bounds_report, BoundsOptions, BoundsReport};
pub use compress::mode_compress;
pub use hyperdet::{hyperdet_222, hyperdet_vanishes_on_pattern, pattern_forces_rank3, rank_222_exact};
pub use search::mr_upper_search;

/// `(r_1, …, r_k)`, the ranks of the mode unfoldings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct MultilinearRank(pub Vec<usize>);

impl MultilinearRank {
    pub fn ranks(&self) -> &[usize] {
        &self.0
    }

    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Componentwise `self <= other`.
    pub fn dominated_by(&self, other: &Self) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }
}

pub fn multilinear_rank(a: &DenseTensor) -> MultilinearRank {
    MultilinearRank(
        (1..=a.order())
            .map(|s| a.unfold(s).expect("mode in range").rank())
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundKind {
    Upper,
    Lower,
}

/// What a certificate's value rests on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Justification {
    /// Zero tensor or zero pattern.
    Trivial,
    /// Nonzero pattern: every member has rank at least one.
    Nonzero,
    /// A maximum matching of nonzero entries.
    TermRank,
    /// Rank of an unfolding of a specific member.
    UnfoldingRank,
    /// An unfolding pattern is an L-matrix, so that mode has full rank in
    /// every member.
    LMatrixUnfolding,
    /// The condensed pattern is not a single sign, so no member has rank one.
    Condensation,
    /// Order-2 sign left or right inverse.
    SignInverse,
    /// Real rank classification of a 2×2×2 member.
    #[serde(rename = "oracle-222")]
    Oracle222,
    /// The hyperdeterminant vanishes identically on the pattern and every
    /// unfolding pattern is an L-matrix.
    #[serde(rename = "pattern-222")]
    Pattern222,
    /// Maximal real rank of 2×2×2 tensors.
    #[serde(rename = "max-rank-222")]
    MaxRank222,
    /// An exact decomposition with that many terms.
    Decomposition,
    /// A numerical decomposition within the residual tolerance.
    NumericFit,
}

/// A bound on the rank of a tensor or of all members of a sign pattern,
/// together with its evidence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankCertificate {
    pub kind: BoundKind,
    pub value: usize,
    pub justification: Justification,
    /// `false` only for numerical fits.
    pub exact: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub factors: Option<FactorList>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub member: Option<DenseTensor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matching: Option<Matching>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
}

impl RankCertificate {
    pub fn lower(value: usize, justification: Justification) -> Self {
        Self {
            kind: BoundKind::Lower,
            value,
            justification,
            exact: true,
            factors: None,
            member: None,
            matching: None,
            residual: None,
        }
    }

    pub fn upper(value: usize, justification: Justification) -> Self {
        Self { kind: BoundKind::Upper, ..Self::lower(value, justification) }
    }

    pub fn with_member(mut self, member: DenseTensor) -> Self {
        self.member = Some(member);
        self
    }
}

/// `rank(A) >= max_s r_s(A)`.
pub fn rank_lower_bound(a: &DenseTensor) -> RankCertificate {
    RankCertificate::lower(multilinear_rank(a).max(), Justification::UnfoldingRank)
}
