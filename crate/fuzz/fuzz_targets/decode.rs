#![no_main]

use libfuzzer_sys::fuzz_target;
use pseudocone::codes::hamming_code;
use pseudocone::decoder::{cone_decode_success, lp_decode, ml_decode};
use pseudocone::polytope::{fundamental_cone, fundamental_polytope};

fuzz_target!(|data: &[u8]| {
    if data.len() < 7 * 8 {
        return;
    }
    let gamma: Vec<f64> = data
        .chunks_exact(8)
        .take(7)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    if gamma.iter().any(|g| !g.is_finite() || g.abs() > 1e6) {
        return;
    }
    let h = hamming_code(3).expect("builtin");
    let p = fundamental_polytope(&h).expect("small code");
    let scale = gamma.iter().fold(1.0f64, |m, g| m.max(g.abs()));
    let Ok(lp) = lp_decode(&p, &gamma) else {
        return;
    };
    let ml = ml_decode(&h, &gamma).expect("small code");
    let ml_cost: f64 = ml.iter().zip(&gamma).map(|(&b, g)| b as f64 * g).sum();
    assert!(lp.cost <= ml_cost + 1e-6 * scale);
    let _ = cone_decode_success(&fundamental_cone(&h), &gamma);
});
