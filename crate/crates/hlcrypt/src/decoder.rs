//! Multilevel majority-logic decoding.
//!
//! Coefficients are recovered degree by degree, highest first. At each
//! level every coefficient of that degree is decided by a majority vote
//! over its redundancy relations, the level's contribution
//! `sum a_j * row_j` is subtracted from the running word, and the next
//! level sees a cleaner residual. Descending order is load-bearing:
//! relations of a low-degree coefficient evaluated on the raw word are
//! polluted by the higher-degree rows, and only the subtraction removes
//! that pollution (there is a regression test for the ascending order
//! going wrong).
//!
//! After the last level the residual is `a_0 * ones + e`; its weight
//! against `n/2` decides `a_0`, and whatever remains is the error vector.

use crate::bits::BitWord;
use crate::hlcode::GeneratorMatrix;
use crate::relations::RelationDictionary;
use crate::{Error, Result};

/// One level's contribution: the partial codeword `sum a_j * row_j` over
/// the rows of that degree, and the recovered coefficients.
#[derive(Clone, Debug)]
pub struct LevelResult {
    pub partial_codeword: BitWord,
    pub partial_message: BitWord,
}

/// A full decode: the nearest codeword, its message, and the error that
/// was removed. `codeword ^ error` reproduces the decoder input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeOutcome {
    pub codeword: BitWord,
    pub message: BitWord,
    pub error: BitWord,
}

/// Decides every coefficient of one degree by majority vote on `x`.
///
/// The vote counts relations evaluating to one (`u`) and to zero (`z`)
/// and stops as soon as either side exceeds half the relation count; a
/// full pass ending in `u == z` means the word is undecodable at this
/// coefficient and surfaces as [`Error::DecodeTie`].
pub fn decode_level(
    relations: &RelationDictionary,
    degree: usize,
    x: &BitWord,
    generator: &GeneratorMatrix,
) -> Result<LevelResult> {
    if !generator.is_complete() {
        return Err(Error::IncompleteMatrix);
    }
    let params = generator.params();
    if relations.m() != params.m() {
        return Err(Error::DimensionMismatch(
            "relation dictionary and generator matrix disagree on the parameter",
        ));
    }
    if x.len() != params.n() {
        return Err(Error::LengthMismatch {
            expected: params.n(),
            actual: x.len(),
        });
    }
    let sets = relations.get(degree).ok_or(Error::MissingDegree(degree))?;

    let mut partial_codeword = BitWord::zeros(params.n())?;
    let mut partial_message = BitWord::zeros(params.k())?;
    for set in sets {
        let masks = set.masks();
        let total = masks.len();
        let mut ones = 0usize;
        let mut zeros = 0usize;
        for mask in masks {
            if x.parity_under_mask_unchecked(mask) {
                ones += 1;
            } else {
                zeros += 1;
            }
            // Majority settled; the remaining relations cannot flip it.
            if 2 * ones > total || 2 * zeros > total {
                break;
            }
        }
        if ones == zeros {
            return Err(Error::DecodeTie {
                row: set.coeff_row(),
                degree,
            });
        }
        if ones > zeros {
            partial_message.set(set.coeff_row(), true);
            partial_codeword.xor_assign_unchecked(generator.row(set.coeff_row()));
        }
    }
    Ok(LevelResult {
        partial_codeword,
        partial_message,
    })
}

/// Decodes `x = a*G + e` for any error of weight up to `t`, returning the
/// codeword, the message `a`, and the error.
pub fn decode(
    x: &BitWord,
    generator: &GeneratorMatrix,
    relations: &RelationDictionary,
) -> Result<DecodeOutcome> {
    if !generator.is_complete() {
        return Err(Error::IncompleteMatrix);
    }
    let params = generator.params();
    if relations.m() != params.m() {
        return Err(Error::DimensionMismatch(
            "relation dictionary and generator matrix disagree on the parameter",
        ));
    }
    if x.len() != params.n() {
        return Err(Error::LengthMismatch {
            expected: params.n(),
            actual: x.len(),
        });
    }
    if !relations.covers_all_rows(params.k()) {
        return Err(Error::IncompleteRelations {
            expected: params.k() - 1,
            actual: relations.total_rows(),
        });
    }

    let mut residual = x.clone();
    let mut message = BitWord::zeros(params.k())?;
    for degree in relations.degrees_descending() {
        let level = decode_level(relations, degree, &residual, generator)?;
        residual.xor_assign_unchecked(&level.partial_codeword);
        message.xor_assign_unchecked(&level.partial_message);
    }

    // residual = a_0 * ones + e; the constant coefficient is decided by
    // weight alone.
    let weight = residual.weight();
    if 2 * weight == params.n() {
        return Err(Error::DecodeConstantTie);
    }
    if 2 * weight > params.n() {
        message.set(0, true);
        residual.xor_assign_unchecked(generator.row(0));
    }
    let codeword = x.xor(&residual)?;
    Ok(DecodeOutcome {
        codeword,
        message,
        error: residual,
    })
}
