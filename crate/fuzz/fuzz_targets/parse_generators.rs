#![no_main]

use libfuzzer_sys::fuzz_target;
use pseudocone::codes::hamming_code;
use pseudocone::generators::{format_generators, parse_generators};

fuzz_target!(|data: &str| {
    let h = hamming_code(3).expect("builtin");
    for code in [None, Some(&h)] {
        if let Ok(gens) = parse_generators(data, code) {
            let again = parse_generators(&format_generators(&gens), code).expect("formatted generators parse");
            assert_eq!(again, gens);
        }
    }
});
