//! Qualitative analysis of real tensors.
//!
//! Everything structural is computed in exact rational arithmetic: sign
//! patterns and their condensation, the minimum-rank-one decision, term
//! rank, L-matrix and sign-nonsingularity tests, dimension-two tensor
//! determinants and order-two sign inverses. The [`rank`] module combines
//! those exact results with a numerical CP search to bound the minimum and
//! maximum rank over a qualitative class.
//!
//! Multi-indices are 1-based throughout (`[1, 2, 2]` is the entry
//! `a_{122}`); matrix accessors on [`RationalMatrix`] are 0-based.

pub mod combinatorics;
pub mod determinant;
pub mod error;
pub mod format;
pub mod inverse;
pub mod matrix;
pub mod qualitative;
pub mod rank;
pub mod rational;
pub mod rng;
pub mod tensor;

pub use combinatorics::{
    is_l_matrix, is_sns_matrix, sns_tensor_necessary, term_rank, Matching, SignMatrix,
    SnsNecessaryReport,
};
pub use determinant::{det_dim2, det_matrix, sns_falsify_sample, to_binary_forms, BinaryFormPair};
pub use error::{Error, Result};
pub use inverse::{
    has_sign_left_inverse_order2, has_sign_right_inverse_order2, left_inverse_order2,
    right_inverse_order2, RightInverse,
};
pub use matrix::RationalMatrix;
pub use qualitative::{
    condense, is_mr1, sample_member, sign_pattern, MagnitudeRange, Sign, SignTensor,
    SignedPermutation,
};
pub use rank::{
    bounds_report, cp_fit, hyperdet_222, mode_compress, mr_upper_search, multilinear_rank,
    rank_222_exact, rank_lower_bound, BoundsOptions, BoundsReport, CpOptions, FitOutcome,
    MultilinearRank, RankCertificate,
};
pub use rational::Rational;
pub use tensor::{outer_product, shao_product, DenseTensor, FactorList, Shape, Tensor};
