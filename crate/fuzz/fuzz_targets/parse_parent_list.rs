#![no_main]

use bootperc::RootedTree;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(t) = RootedTree::parse_parent_list(text) else { return };
    t.check_invariants().expect("parsed tree is well formed");
    let again = RootedTree::parse_parent_list(&t.to_parent_list()).expect("printed tree parses");
    assert_eq!(again.to_parent_list(), t.to_parent_list());
});
