mod common;

use common::model_props::{self as props, dataset, fractions, tokens};
use common::prop_config;
use proptest::prelude::*;

proptest! {
    #![proptest_config(prop_config(128))]

    #[test]
    fn swapping_party_copies_and_fractions_leaves_bill_vector_unchanged(
        cnn: bool, seed: u64, toks in tokens(9), p in fractions(),
    ) {
        props::swapping_party_copies_and_fractions_leaves_bill_vector_unchanged(cnn, seed, &toks, p)?;
    }

    #[test]
    fn bill_vector_is_linear_in_fractions(cnn: bool, seed: u64, toks in tokens(9), p in fractions(), alpha in 0.0f64..=1.0) {
        props::bill_vector_is_linear_in_fractions(cnn, seed, &toks, p, alpha)?;
    }

    #[test]
    fn text_only_models_ignore_fractions(
        variant in prop::sample::select(vec!["mwe", "cnn", "mwe_ft", "cnn_ft"]),
        seed: u64, toks in tokens(9), p in fractions(), q in fractions(),
    ) {
        props::text_only_models_ignore_fractions(variant, seed, &toks, p, q)?;
    }

    #[test]
    fn meta_only_reads_only_the_fractions(seed: u64, a in tokens(9), b in tokens(30), p in fractions()) {
        props::meta_only_reads_only_the_fractions(seed, a, b, p)?;
    }
}

proptest! {
    #![proptest_config(prop_config(100))]

    #[test]
    fn padding_rows_stay_zero_through_training(
        variant in prop::sample::select(vec!["mwe", "cnn", "mwe_meta", "cnn_meta", "cnn_ft"]),
        seed: u64, data in dataset(), epochs in 1usize..6,
    ) {
        props::padding_rows_stay_zero_through_training(variant, seed, &data, epochs)?;
    }

    #[test]
    fn batch_loss_is_order_free(
        variant in prop::sample::select(vec!["mwe_meta", "cnn_meta", "meta_only"]),
        seed: u64, data in dataset(), rotate in 0usize..12,
    ) {
        props::batch_loss_is_order_free(variant, seed, &data, rotate)?;
    }
}
