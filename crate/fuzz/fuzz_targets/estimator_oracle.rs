#![no_main]

use ginidex::estimators::{estimate_brute_force, estimate_weighted, IndexKind, IndexSpec, Sample};
use libfuzzer_sys::fuzz_target;

// Layout: m, i, then up to 12 little-endian u16 observations.
fuzz_target!(|data: &[u8]| {
    let [m, i, rest @ ..] = data else { return };
    let values: Vec<f64> = rest.chunks_exact(2).take(12).map(|c| f64::from(u16::from_le_bytes([c[0], c[1]]))).collect();
    let m = 2 + usize::from(*m) % 4;
    let i = 1 + usize::from(*i) % m;
    let Ok(sample) = Sample::new(values) else { return };
    for kind in [IndexKind::Lower, IndexKind::Upper, IndexKind::Combined] {
        let spec = IndexSpec::new(m, i, kind).unwrap();
        let (Ok(a), Ok(b)) = (estimate_brute_force(&sample, spec), estimate_weighted(&sample, spec)) else {
            assert!(estimate_brute_force(&sample, spec).is_err() && estimate_weighted(&sample, spec).is_err());
            continue;
        };
        let tol = 1e-10 * (1.0 + a.value.abs());
        assert!((a.value - b.value).abs() <= tol, "{kind}: {} vs {}", a.value, b.value);
    }
});
