#![no_main]

use cfree::wire;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(v) = wire::parse_jacobi(s) {
            let text = serde_json::to_string(&wire::jacobi_to_json(&v)).unwrap();
            assert_eq!(wire::parse_jacobi(&text).unwrap(), v);
        }
    }
});
