//! Fuzzes the simulation-study config parser.
//!
//! The parser must never panic on arbitrary text, and every accepted config
//! must carry the structural guarantees the parser promises: non-empty grids,
//! a finite truth with matching alpha/beta arity, and no linearity level on a
//! study I config. (Semantic checks such as minimum sample sizes belong to
//! the study runners, not the parser.)

#![no_main]

use dsd_regress::io::parse_config_str;
use dsd_regress::sim::StudyKind;

libfuzzer_sys::fuzz_target!(|text: &str| {
    let Ok(cfg) = parse_config_str(text) else {
        return;
    };

    assert!(cfg.p > 0, "accepted a config with no predictors");
    assert_eq!(cfg.truth.alphas.len(), cfg.p, "alpha arity differs from p");
    assert_eq!(cfg.truth.betas.len(), cfg.p, "beta arity differs from p");
    for v in cfg.truth.alphas.iter().chain(&cfg.truth.betas).chain([&cfg.truth.gamma]) {
        assert!(v.is_finite(), "accepted a non-finite coefficient");
    }
    assert!(!cfg.m_values.is_empty(), "accepted a config with no sample sizes");
    assert!(!cfg.s_a_values.is_empty(), "accepted an empty s_a grid");
    assert!(!cfg.s_b_values.is_empty(), "accepted an empty s_b grid");
    if cfg.study == StudyKind::I {
        assert!(cfg.linearity.is_none(), "study I must not carry a linearity level");
    }
});
