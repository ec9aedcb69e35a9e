#![no_main]
use carnot_core::lie::spec_format::AlgebraSpec;
use carnot_core::CarnotAlgebra;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let Ok(spec) = AlgebraSpec::from_json(text) else {
        return;
    };
    if let Ok(alg) = CarnotAlgebra::from_spec(&spec) {
        // Accepted specs must survive a round trip.
        let again = CarnotAlgebra::from_spec(&alg.to_spec()).expect("round trip");
        assert_eq!(again.dim(), alg.dim());
    }
});
