#![no_main]
use carnot_core::step2::{is_abnormal_point, pfaffian_membership, Step2Point};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Some((&r, rest)) = data.split_first() else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    let r = 2 + usize::from(r % 5);
    if let Ok(p) = Step2Point::parse(r, text) {
        assert_eq!(Step2Point::parse(r, &p.format()).expect("reparse"), p);
        // The rank test and the wedge equations must agree.
        assert_eq!(is_abnormal_point(&p), pfaffian_membership(&p));
    }
});
