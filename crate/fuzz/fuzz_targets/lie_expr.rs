#![no_main]
use std::sync::OnceLock;

use carnot_core::sard::Prolongation;
use carnot_core::CarnotAlgebra;
use libfuzzer_sys::fuzz_target;

fn prolongation() -> &'static Prolongation {
    static P: OnceLock<Prolongation> = OnceLock::new();
    P.get_or_init(|| Prolongation::with_gl(CarnotAlgebra::free(3, 3).unwrap()).unwrap())
}

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let p = prolongation();
    if let Ok(x) = p.base().parse_element(text) {
        // Formatting then parsing again is the identity.
        let back = p.base().parse_element(&p.base().format(&x)).expect("reparse");
        assert_eq!(back, x);
    }
    let _ = p.parse_element(text);
});
