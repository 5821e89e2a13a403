#![no_main]

use ginidex::dataset::parse_dataset;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    for column in [None, Some("gdp_per_capita"), Some("value")] {
        if let Ok(sample) = parse_dataset(data, column) {
            assert!(!sample.is_empty());
            assert!(sample.values().iter().all(|x| x.is_finite() && *x >= 0.0));
        }
    }
});
