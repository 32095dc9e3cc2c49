#![no_main]

use libfuzzer_sys::fuzz_target;
use pseudocone::codes::{load_alist, write_alist};

fuzz_target!(|data: &str| {
    if let Ok(h) = load_alist(data) {
        let again = load_alist(&write_alist(&h)).expect("written alist parses");
        assert_eq!(again, h);
    }
});
