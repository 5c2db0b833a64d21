#![no_main]
use libfuzzer_sys::fuzz_target;
use pdee::noise::PathEnsemble;

fuzz_target!(|data: &[u8]| {
    if let Ok(ensemble) = PathEnsemble::from_bytes(data) {
        // Anything accepted must re-encode to the same bytes.
        assert_eq!(ensemble.to_bytes(), data);
    }
});
