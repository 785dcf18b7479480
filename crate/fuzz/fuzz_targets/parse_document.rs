#![no_main]
use libfuzzer_sys::fuzz_target;
use sitecalc::workbench::doc::{emit_document, parse_document};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(doc) = parse_document(text) {
        // Anything accepted must survive a round trip unchanged.
        let emitted = emit_document(&doc);
        let again = parse_document(&emitted).expect("emitted document parses");
        assert_eq!(emit_document(&again), emitted);
    }
});
