#![no_main]
use carnot_core::control_format::load_control;
use carnot_core::endpoint::{endpoint, is_abnormal};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok((alg, u)) = load_control(text) {
        if alg.dim() <= 14 && u.segments() <= 16 {
            let _ = endpoint(&alg, &u);
            let _ = is_abnormal(&alg, &u);
        }
    }
});
