#![no_main]

use libfuzzer_sys::fuzz_target;
use pseudocone::codes::CodeSpec;

fuzz_target!(|data: &str| {
    let spec = CodeSpec::parse(data);
    if let CodeSpec::Alist(_) = spec {
        return;
    }
    assert_eq!(CodeSpec::parse(&spec.name()), spec);
    if let CodeSpec::Hamming { .. } = spec {
        let h = spec.build().expect("no I/O").expect("valid code");
        assert_eq!(
            h.cols(),
            spec.name().split('-').nth(1).unwrap().parse::<usize>().unwrap()
        );
    }
});
