#![no_main]

use cfree::wire;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(v) = wire::parse_test_algebra(s) {
            let text = serde_json::to_string(&wire::test_algebra_to_json(&v)).unwrap();
            assert_eq!(wire::parse_test_algebra(&text).unwrap(), v);
        }
    }
});
