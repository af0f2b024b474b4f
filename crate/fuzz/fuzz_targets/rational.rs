#![no_main]

use libfuzzer_sys::fuzz_target;
use plumbroot::arith::{parse_pq, to_pq};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Some(x) = parse_pq(text) {
        assert_eq!(parse_pq(&to_pq(&x)), Some(x));
    }
});
