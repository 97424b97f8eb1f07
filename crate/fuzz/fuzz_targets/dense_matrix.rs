#![no_main]

use ergogap::stochastic_core::{parse_dense_matrix, StochasticMatrix, DEFAULT_ROW_SUM_TOL};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(d) = parse_dense_matrix(text) {
        let _ = StochasticMatrix::from_dense(&d, DEFAULT_ROW_SUM_TOL);
    }
});
