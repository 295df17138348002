//! Decoder behavior beyond the acceptance suite: the level-order
//! regression, the decoding guarantee at the full error capacity, and
//! robustness on arbitrary (undecodable) inputs.

mod common;

use hlcrypt::bits::BitWord;
use hlcrypt::decoder::decode_level;
use hlcrypt::dhh;
use hlcrypt::hlcode::{CodeParams, ComplementFreeSet, GeneratorMatrix};
use hlcrypt::relations::{redundancy_relations_set, MaskCache};
use hlcrypt::{decode, Error};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use common::{golden_code, message_from_u32};

/// Decoding must descend from the highest degree. Evaluating the
/// degree-1 relations on the raw word first, before the degree-2
/// contributions are removed, decides a_1 wrongly on this planted case,
/// while the descending decoder recovers it.
#[test]
fn ascending_level_order_misdecodes() {
    let (generator, relations) = golden_code();
    // a_7 = 1 only, plus a single error at position 0.
    let message = message_from_u32(1 << 7, 8);
    let error = BitWord::from_positions(16, &[0]).unwrap();
    let noisy = generator.encode(&message).unwrap().xor(&error).unwrap();

    // Degree 1 evaluated on the raw word: the a_1 vote comes out 5-to-3
    // for one, although a_1 = 0.
    let wrong = decode_level(&relations, 1, &noisy, &generator).unwrap();
    assert!(
        wrong.partial_message.get(1),
        "expected the raw-word vote to mis-decide a_1; the regression scenario changed"
    );

    // The descending decoder gets everything right.
    let outcome = decode(&noisy, &generator, &relations).unwrap();
    assert_eq!(outcome.message, message);
    assert_eq!(outcome.error, error);
}

/// The published guarantee: any error of weight up to t is corrected.
/// Exercised at exactly t for m in {4, 6, 8} against the raw decoder.
#[test]
fn decoding_guarantee_at_full_capacity() {
    let mut rng = ChaCha20Rng::seed_from_u64(0xdec0de);
    for m in [4u32, 6, 8] {
        let params = CodeParams::new(m).unwrap();
        let yset = ComplementFreeSet::random(m, &mut rng).unwrap();
        let generator = GeneratorMatrix::partial(m)
            .unwrap()
            .into_complete(yset.clone())
            .unwrap();
        let mut cache = MaskCache::new();
        let relations =
            redundancy_relations_set(m, Some(&yset), &mut cache, 1, params.k() - 1).unwrap();
        for _ in 0..200 {
            let message = BitWord::random(params.k(), &mut rng).unwrap();
            let codeword = generator.encode(&message).unwrap();
            let error =
                dhh::random_error_word(params.n(), params.t(), &mut rng).unwrap();
            let noisy = codeword.xor(&error).unwrap();
            let outcome = decode(&noisy, &generator, &relations).unwrap();
            assert_eq!(outcome.message, message, "m={m}");
            assert_eq!(outcome.codeword, codeword, "m={m}");
            assert_eq!(outcome.error, error, "m={m}");
        }
    }
}

/// Every 16-bit input either decodes or fails with a typed majority tie;
/// no input panics or produces an inconsistent outcome. (Beyond-capacity
/// behavior is unspecified, but it must stay safe.)
#[test]
fn all_inputs_decode_or_tie_cleanly() {
    let (generator, relations) = golden_code();
    let mut decoded = 0u32;
    let mut ties = 0u32;
    for value in 0u32..65536 {
        let mut word = BitWord::zeros(16).unwrap();
        for bit in 0..16 {
            if (value >> bit) & 1 == 1 {
                word.set(bit, true);
            }
        }
        match decode(&word, &generator, &relations) {
            Ok(outcome) => {
                assert_eq!(
                    outcome.codeword.xor(&outcome.error).unwrap(),
                    word,
                    "outcome must reassemble the input"
                );
                assert_eq!(
                    generator.encode(&outcome.message).unwrap(),
                    outcome.codeword
                );
                decoded += 1;
            }
            Err(Error::DecodeTie { row, degree }) => {
                assert!(row > 0 && row < 8);
                assert!(degree == 1 || degree == 2);
                ties += 1;
            }
            Err(Error::DecodeConstantTie) => ties += 1,
            Err(other) => panic!("unexpected error on input {value}: {other}"),
        }
    }
    assert_eq!(decoded + ties, 65536);
    // Within the guarantee region everything decodes; ties only appear
    // beyond it.
    assert!(decoded >= 256 * 17);
    assert!(ties > 0);
}

/// Decoding distinct inputs concurrently against one shared generator and
/// relation dictionary gives the same results as the serial run.
#[test]
fn concurrent_decodes_match_serial() {
    let mut rng = ChaCha20Rng::seed_from_u64(0xc0c0);
    let params = CodeParams::new(6).unwrap();
    let yset = ComplementFreeSet::random(6, &mut rng).unwrap();
    let generator = GeneratorMatrix::partial(6)
        .unwrap()
        .into_complete(yset.clone())
        .unwrap();
    let mut cache = MaskCache::new();
    let relations =
        redundancy_relations_set(6, Some(&yset), &mut cache, 1, params.k() - 1).unwrap();

    let inputs: Vec<BitWord> = (0..64)
        .map(|_| {
            let message = BitWord::random(params.k(), &mut rng).unwrap();
            let error = dhh::random_error_word(params.n(), params.t(), &mut rng).unwrap();
            generator.encode(&message).unwrap().xor(&error).unwrap()
        })
        .collect();
    let serial: Vec<_> = inputs
        .iter()
        .map(|w| decode(w, &generator, &relations).unwrap())
        .collect();

    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for chunk in inputs.chunks(16) {
            let (generator, relations) = (&generator, &relations);
            handles.push(scope.spawn(move || {
                chunk
                    .iter()
                    .map(|w| decode(w, generator, relations).unwrap())
                    .collect::<Vec<_>>()
            }));
        }
        let concurrent: Vec<_> = handles
            .into_iter()
            .flat_map(|h| h.join().unwrap())
            .collect();
        for (a, b) in serial.iter().zip(&concurrent) {
            assert_eq!(a.message, b.message);
            assert_eq!(a.error, b.error);
        }
    });
}

/// A two-bit error hitting two different relations of one coefficient
/// produces the documented tie error carrying the offending row.
#[test]
fn beyond_capacity_tie_is_reported_with_row() {
    let (generator, relations) = golden_code();
    // Positions 0 and 2 land in two different relations of a_5 (degree 2),
    // splitting its four votes 2-2.
    let word = BitWord::from_positions(16, &[0, 2]).unwrap();
    match decode(&word, &generator, &relations) {
        Err(Error::DecodeTie { row: 5, degree: 2 }) => {}
        other => panic!("expected a tie at a_5, got {other:?}"),
    }
}
