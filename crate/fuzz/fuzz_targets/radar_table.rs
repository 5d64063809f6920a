#![no_main]

use coexsim::antenna::TabulatedPattern;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(table) = TabulatedPattern::parse(text) else {
        return;
    };
    let peak = table.gain_db(0.0);
    for i in 0..=64 {
        let g = table.gain_db(i as f64 * std::f64::consts::PI / 64.0);
        assert!(g.is_finite() && g <= peak);
    }
});
