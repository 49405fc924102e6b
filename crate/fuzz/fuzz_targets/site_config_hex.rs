#![no_main]

use bootperc::SiteConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(c) = SiteConfig::from_hex(text) else { return };
    assert!(c.occupied().all(|v| v < c.len()));
    let back = SiteConfig::from_hex(&c.to_hex()).expect("printed config parses");
    assert_eq!(back, c);
});
