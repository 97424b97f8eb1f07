#![no_main]

use ergogap::dobrushin::dobrushin_coefficient;
use ergogap::spectral_bound::closed_subsets;
use ergogap::stochastic_core::{ingest_edge_list, DanglingPolicy};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    for policy in [
        DanglingPolicy::Uniform,
        DanglingPolicy::SelfLoop,
        DanglingPolicy::Reject,
    ] {
        let Ok(g) = ingest_edge_list(data, policy) else {
            continue;
        };
        for row in g.matrix.rows() {
            let s: f64 = row.iter().map(|(_, w)| w).sum();
            assert!((s - 1.0).abs() <= 1e-10);
        }
        if g.matrix.n() <= 64 {
            let q = dobrushin_coefficient(&g.matrix).unwrap().q;
            assert!((0.0..=1.0).contains(&q));
        }
        assert!(closed_subsets(&g.matrix, 0.0).count >= 1);
    }
});
