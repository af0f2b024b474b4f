#![no_main]

use libfuzzer_sys::fuzz_target;
use plumbroot::PlumbingGraph;

fuzz_target!(|data: &[u8]| {
    // Arbitrary text must be rejected with an error, never a panic; accepted
    // graphs must survive a serialization round trip.
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(g) = PlumbingGraph::from_json(text) {
        let again = PlumbingGraph::from_spec(&g.to_spec()).expect("own spec parses");
        assert!(g.same_labeled(&again));
        assert!(g.order() >= 1.into());
    }
});
