#![no_main]

use bootperc::OffspringDistribution;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(dist) = OffspringDistribution::parse(text) else { return };
    let total: f64 = dist.atoms().iter().map(|a| a.1).sum();
    assert!((total - 1.0).abs() < 1e-6);
    assert!(dist.atoms().iter().all(|a| a.1 >= 0.0));
    for u in [0.0, 0.5, 0.999_999] {
        assert!(dist.sample_with(u) <= dist.max_offspring());
    }
});
