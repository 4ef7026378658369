#![no_main]

use libfuzzer_sys::fuzz_target;
use wavefront_core::io::parse_profile_csv;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok((t, phi)) = parse_profile_csv(text) {
        assert_eq!(t.len(), phi.len());
        assert!(t.iter().chain(&phi).all(|v| v.is_finite()));
    }
});
