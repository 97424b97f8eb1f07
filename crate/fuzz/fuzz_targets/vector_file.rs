#![no_main]

use ergogap::stochastic_core::{parse_vector, read_vector, write_vector};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(x) = parse_vector(text) {
        let back = read_vector(&write_vector(&x), x.len()).unwrap();
        assert_eq!(back.len(), x.len());
        for (a, b) in back.iter().zip(&x) {
            assert!(a == b || (a.is_nan() && b.is_nan()));
        }
    }
});
