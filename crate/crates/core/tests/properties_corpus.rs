mod common;

use common::corpus_props::{self as props, raw_corpus};
use common::prop_config;
use proptest::prelude::*;

proptest! {
    #![proptest_config(prop_config(128))]

    #[test]
    fn filter_keeps_exactly_the_contested_bills(case in raw_corpus(false, 16), threshold in 0.001f64..0.999) {
        props::filter_keeps_exactly_the_contested_bills(&case, threshold)?;
    }

    #[test]
    fn built_corpus_respects_filter_caps_and_fractions(case in raw_corpus(true, 16)) {
        props::built_corpus_respects_filter_caps_and_fractions(&case)?;
    }

    #[test]
    fn build_ignores_input_order(case in raw_corpus(false, 16)) {
        props::build_ignores_input_order(&case)?;
    }

    #[test]
    fn folds_partition_bills_within_each_session(case in raw_corpus(false, 60), k in 2usize..7, seed: u64) {
        props::folds_partition_bills_within_each_session(&case, k, seed)?;
    }

    #[test]
    fn out_of_session_tests_only_known_legislators(case in raw_corpus(false, 16)) {
        props::out_of_session_tests_only_known_legislators(&case)?;
    }
}
