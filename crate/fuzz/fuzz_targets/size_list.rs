#![no_main]

use ginidex::dataset::parse_size_list;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(sizes) = parse_size_list(text) {
        assert!(!sizes.is_empty());
        assert!(sizes.iter().all(|&n| n > 0));
        let mut seen = sizes.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), sizes.len());
    }
});
