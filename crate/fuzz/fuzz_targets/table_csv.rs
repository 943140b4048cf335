//! Fuzzes the interval-table CSV parser.
//!
//! The parser must never panic on arbitrary bytes. Whenever it accepts an
//! input, the resulting table has to satisfy the invariants the rest of the
//! crate relies on (rectangular bounds, finite ordered endpoints, unique
//! non-empty variable names), and serializing the typed view back to CSV must
//! reparse to an identical table.

#![no_main]

use dsd_regress::io::{parse_table_bytes, table_to_csv_string};

libfuzzer_sys::fuzz_target!(|data: &[u8]| {
    let Ok(raw) = parse_table_bytes(data) else {
        return;
    };

    let m = raw.labels.len();
    assert!(m > 0, "accepted a table with no data rows");
    assert!(!raw.variables.is_empty(), "accepted a table with no variables");
    for (i, v) in raw.variables.iter().enumerate() {
        assert!(!v.name.is_empty(), "accepted an empty variable name");
        assert!(
            raw.variables[..i].iter().all(|prev| prev.name != v.name),
            "accepted duplicate variable name {:?}",
            v.name
        );
        assert_eq!(v.bounds.len(), m, "ragged bounds for {:?}", v.name);
        for &(l, u) in &v.bounds {
            assert!(l.is_finite() && u.is_finite(), "non-finite bound in {:?}", v.name);
            assert!(l <= u, "unordered bounds [{l}; {u}] in {:?}", v.name);
        }
    }

    // A typed view needs a response plus at least one predictor.
    if raw.variables.len() < 2 {
        return;
    }
    let response = raw.variables[0].name.clone();
    let table = raw
        .to_symbolic(&response, None)
        .expect("valid raw table must convert to a symbolic table");
    let text = table_to_csv_string(&table).expect("serializing a valid table");
    let back = parse_table_bytes(text.as_bytes())
        .expect("serialized table must reparse")
        .to_symbolic(&response, None)
        .expect("reparsed table must convert back");
    assert_eq!(table, back, "CSV round trip changed the table");
});
