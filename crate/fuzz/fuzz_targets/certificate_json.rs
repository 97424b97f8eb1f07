#![no_main]

use ergogap::cli::CertificateClaim;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(doc) = serde_json::from_slice::<serde_json::Value>(data) else {
        return;
    };
    if let Some(claim) = CertificateClaim::from_json(&doc) {
        let v = claim.verify(0.5);
        assert_eq!(v.pass, v.sound && v.exact_claim_holds.unwrap_or(true));
    }
});
