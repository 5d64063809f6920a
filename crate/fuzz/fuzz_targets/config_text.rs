#![no_main]

use coexsim::config::parse_config;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(cfg) = parse_config(text, &[]) else {
        return;
    };
    assert!(cfg.validate().is_ok());
    // canonical text must parse back to the same scalars
    let again = parse_config(&cfg.to_text(), &[]).expect("canonical text parses");
    let strip = |mut c: coexsim::SimConfig| {
        c.radar_pattern_table = None;
        c
    };
    assert_eq!(strip(again), strip(cfg));
});
