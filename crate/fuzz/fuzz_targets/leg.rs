#![no_main]

use libfuzzer_sys::fuzz_target;
use plumbroot::seifert::Leg;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(leg) = text.parse::<Leg>() {
        assert!(0 < leg.omega && leg.omega < leg.alpha);
        assert_eq!(leg.to_string().parse::<Leg>().unwrap(), leg);
    }
});
