#![no_main]
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(q) = cfree::scalar::parse_rational(data) {
        let text = cfree::scalar::format_rational(&q);
        assert_eq!(cfree::scalar::parse_rational(&text).unwrap(), q);
    }
});
