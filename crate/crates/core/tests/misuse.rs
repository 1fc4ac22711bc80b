mod support;

use secalgo::guard::audit_report;
use secalgo::MisuseClass;
use support::misuse;

#[test]
fn every_class_is_raised_at_every_entry_point() {
    let rows = misuse::matrix();
    let failures: Vec<String> = rows
        .iter()
        .filter_map(|r| {
            r.outcome
                .as_ref()
                .err()
                .map(|e| format!("{} {}: {e}", r.class.code(), r.entry))
        })
        .collect();
    assert!(failures.is_empty(), "{failures:#?}");
    for class in [
        MisuseClass::M1K,
        MisuseClass::M1S,
        MisuseClass::M3S,
        MisuseClass::M1A,
        MisuseClass::M1H,
    ] {
        let entries: Vec<&str> = rows
            .iter()
            .filter(|r| r.class == class)
            .map(|r| r.entry.as_str())
            .collect();
        assert!(entries.iter().any(|e| e.starts_with("keygen")), "{class:?}");
        assert!(entries.iter().any(|e| e.starts_with("import")), "{class:?}");
        if class != MisuseClass::M1A {
            assert!(entries.iter().any(|e| e.starts_with("config")), "{class:?}");
        }
    }
}

#[test]
fn keys_and_headers_are_never_reused() {
    misuse::distinct_keys(100).unwrap();
    misuse::distinct_headers(1000).unwrap();
}

#[test]
fn audit_has_a_row_per_class() {
    let report = audit_report();
    assert_eq!(report.len(), 7);
    for class in MisuseClass::ALL {
        assert_eq!(report.iter().filter(|r| r.class == class).count(), 1);
    }
}
