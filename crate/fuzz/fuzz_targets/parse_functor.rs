#![no_main]
use std::sync::Arc;

use libfuzzer_sys::fuzz_target;
use sitecalc::functor::validate_functor;
use sitecalc::workbench::doc::{emit_functor, parse_category, parse_functor};

const SOURCE: &str = "category a\nobjects x y\nmorphism f : x -> y\n";
const TARGET: &str = "category b\nobjects p q\nmorphism g : p -> q\nmorphism h : q -> p\ncompose h g = id_p\ncompose g h = id_q\n";

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let a = Arc::new(parse_category(SOURCE).unwrap());
    let b = Arc::new(parse_category(TARGET).unwrap());
    if let Ok(f) = parse_functor(text, &a, &b) {
        assert!(validate_functor(&f).is_ok());
        let back = parse_functor(&emit_functor(&f), &a, &b).expect("emitted functor parses");
        assert_eq!(emit_functor(&back), emit_functor(&f));
    }
});
