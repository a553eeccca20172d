//! Inputs shared by the benchmarks.

use afftool_core::exact::cyclotomic;
use afftool_core::{AffineToralMap, IntMatrix, IntPoly, SymReal};

/// Block diagonal of companions of the given factors, conjugated by a fixed
/// unipotent matrix so no entry pattern is special.
pub fn mixed_matrix(factors: &[IntPoly]) -> IntMatrix {
    let d = factors
        .iter()
        .map(|p| p.companion().expect("monic"))
        .reduce(|a, b| a.direct_sum(&b))
        .expect("at least one factor");
    let n = d.rows();
    let mut u = IntMatrix::identity(n);
    for i in 0..n.saturating_sub(1) {
        u[(i, i + 1)] = 1.into();
    }
    let uinv = u.inverse_unimodular().expect("unipotent");
    &(&u * &d) * &uinv
}

/// Alternating hyperbolic and order-4 blocks, padded with `x - 1` for odd `n`.
pub fn sample_factors(n: usize) -> Vec<IntPoly> {
    let hyperbolic = IntPoly::from_i64(&[1, -3, 1]).expect("monic");
    let mut out = Vec::new();
    let mut left = n;
    let mut k = 0;
    while left >= 2 {
        out.push(if k % 2 == 0 { hyperbolic.clone() } else { cyclotomic(4).expect("small index") });
        left -= 2;
        k += 1;
    }
    if left == 1 {
        out.push(IntPoly::from_i64(&[-1, 1]).expect("monic"));
    }
    out
}

pub fn sample_map(n: usize) -> AffineToralMap {
    let a = mixed_matrix(&sample_factors(n));
    let t = (0..n).map(|i| SymReal::from_ratio(1, 2 + i as i64)).collect();
    AffineToralMap::new(a, t).expect("unimodular")
}
