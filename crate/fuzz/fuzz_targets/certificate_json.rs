#![no_main]

use bootperc::{gen_subdivided_tree, FortCertificate};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(cert) = FortCertificate::from_json(text) else { return };
    let back = FortCertificate::from_json(&cert.to_json()).expect("printed certificate parses");
    assert_eq!(back, cert);
    // verification must reject, not panic, on foreign or out-of-range sets
    let t = gen_subdivided_tree(3, 2).unwrap();
    let _ = cert.verify(t.graph());
    let mut local = cert;
    local.host_hash = t.graph().fingerprint();
    if local.verify(t.graph()) {
        assert!(local.vertices.iter().all(|&v| v < t.vertex_count()));
    }
});
