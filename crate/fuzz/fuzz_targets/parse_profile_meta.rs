#![no_main]

use libfuzzer_sys::fuzz_target;
use wavefront_core::io::{parse_profile_meta, write_profile_meta};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(meta) = parse_profile_meta(text) {
        let again = parse_profile_meta(&write_profile_meta(&meta).unwrap()).expect("written meta parses");
        assert_eq!(format!("{meta:?}"), format!("{again:?}"));
    }
});
