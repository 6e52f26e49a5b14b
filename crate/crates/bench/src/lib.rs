//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use falsilab::{Signature, Structure};

pub fn digraph_sig() -> Arc<Signature> {
    Arc::new(Signature::new("digraph").with_relation("edge", 2).expect("fresh signature"))
}

/// A digraph on `n` vertices with edges from a fixed linear congruential stream.
pub fn pseudo_random_digraph(n: usize, seed: u64) -> Structure {
    let mut m = Structure::with_size(digraph_sig(), n).expect("nonempty domain");
    let mut s = seed;
    for i in 0..n {
        for j in 0..n {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            m.set(0, &[i, j], s >> 63 == 1);
        }
    }
    m
}

/// The directed cycle on `n` vertices.
pub fn cycle(n: usize) -> Structure {
    let mut m = Structure::with_size(digraph_sig(), n).expect("nonempty domain");
    for i in 0..n {
        m.set(0, &[i, (i + 1) % n], true);
    }
    m
}
