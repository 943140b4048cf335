//! Fuzzes the saved-model parser.
//!
//! The parser must never panic on arbitrary text. Accepted models must
//! serialize to a canonical form that reparses to the same serialization
//! (second-generation stability), so saved models survive load/save cycles.

#![no_main]

use dsd_regress::io::{model_to_string, parse_model_str};

libfuzzer_sys::fuzz_target!(|text: &str| {
    let Ok(model) = parse_model_str(text) else {
        return;
    };

    assert!(model.m > 0, "accepted a model with m = 0");
    assert!(!model.predictors.is_empty(), "accepted a model with no predictors");

    let canonical = model_to_string(&model);
    let back = parse_model_str(&canonical).expect("canonical model text must reparse");
    assert_eq!(
        model_to_string(&back),
        canonical,
        "model serialization is not stable under reparse"
    );
});
