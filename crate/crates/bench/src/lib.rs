//! Shared inputs for the criterion benchmarks.

use crfner::crf::Lattice;

/// A deterministic lattice with `len` positions and `labels` labels.
pub fn lattice(len: usize, labels: usize) -> Lattice {
    // Cheap LCG; benchmark inputs only need to be reproducible.
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = move || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ((state >> 11) as f64 / (1u64 << 53) as f64) * 6.0 - 3.0
    };
    let node: Vec<Vec<f64>> = (0..len).map(|_| (0..labels).map(|_| next()).collect()).collect();
    let start: Vec<f64> = (0..labels).map(|_| next()).collect();
    let trans: Vec<Vec<f64>> = (0..labels).map(|_| (0..labels).map(|_| next()).collect()).collect();
    Lattice::new(&node, &start, &trans).expect("finite scores")
}
