#![no_main]

use ergogap::stochastic_core::validate_stochastic;
use libfuzzer_sys::fuzz_target;

// Bytes become (column, weight) pairs: one byte of column, eight of weight,
// 0xFF ends the current row.
fuzz_target!(|data: &[u8]| {
    let mut rows = vec![Vec::new()];
    let mut i = 0;
    while i < data.len() {
        if data[i] == 0xFF {
            rows.push(Vec::new());
            i += 1;
            continue;
        }
        if i + 9 > data.len() {
            break;
        }
        let col = data[i] as usize;
        let w = f64::from_le_bytes(data[i + 1..i + 9].try_into().unwrap());
        rows.last_mut().unwrap().push((col, w));
        i += 9;
    }
    let n = rows.len();
    if let Ok(m) = validate_stochastic(rows, n, 1e-10) {
        assert_eq!(m.n(), n);
        for row in m.rows() {
            assert!(row.iter().all(|(j, w)| j < n && w > 0.0 && w.is_finite()));
        }
    }
});
