#![no_main]
use libfuzzer_sys::fuzz_target;
use sitecalc::validate_category;
use sitecalc::workbench::generators::builtin;

fuzz_target!(|data: &[u8]| {
    let Ok(spec) = std::str::from_utf8(data) else { return };
    // Sizes beyond a few dozen only measure the generators, not the parser.
    if let Some((_, n)) = spec.split_once(':') {
        if n.parse::<usize>().map_or(false, |n| n > 24) {
            return;
        }
    }
    if let Ok(c) = builtin(spec) {
        assert!(validate_category(&c).is_ok());
    }
});
