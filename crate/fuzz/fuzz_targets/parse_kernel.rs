#![no_main]

use libfuzzer_sys::fuzz_target;
use wavefront_core::SpatioTemporalKernel;

fuzz_target!(|data: &[u8]| {
    let Ok(k) = serde_json::from_slice::<SpatioTemporalKernel>(data) else {
        return;
    };
    if k.validate().is_err() {
        return;
    }
    for c in [-1.0, 0.0, 2.0] {
        let top = k.abscissa(c).min(5.0);
        for z in [0.0, 0.5 * top] {
            let m = k.moment_unchecked(z, c);
            assert!(!(m < 0.0), "negative moment {m} at z = {z}, c = {c}");
        }
    }
});
