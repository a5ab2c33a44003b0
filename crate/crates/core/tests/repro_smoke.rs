use byzagg::repro::{run_reproduction, REPRODUCTIONS};

#[test]
fn every_reproduction_passes() {
    for name in REPRODUCTIONS {
        let report = run_reproduction(name, 0).unwrap();
        for c in &report.checks {
            println!("{name}: {} {}", if c.passed { "ok" } else { "FAIL" }, c.detail);
        }
        assert!(report.passed, "{name}");
    }
}
