//! Standard example maps used by tests, benches and the command line.

use crate::exact::IntMatrix;
use crate::toral::{AffineToralMap, SymReal};

fn half() -> SymReal {
    SymReal::from_ratio(1, 2)
}

/// `(x, y, z) -> (x + 1/2, x + y, 2x + y + z)`: unipotent, non-ergodic.
pub fn example_one() -> AffineToralMap {
    AffineToralMap::new(
        IntMatrix::from_i64_rows(&[&[1, 0, 0], &[1, 1, 0], &[2, 1, 1]]),
        vec![half(), SymReal::zero(), SymReal::zero()],
    )
    .expect("valid map")
}

/// `(x, y, z) -> (x + 1/2, x + 2y + z, y + z)`: half rotation under a cat-map fiber.
pub fn example_two() -> AffineToralMap {
    AffineToralMap::new(
        IntMatrix::from_i64_rows(&[&[1, 0, 0], &[1, 2, 1], &[0, 1, 1]]),
        vec![half(), SymReal::zero(), SymReal::zero()],
    )
    .expect("valid map")
}

pub fn cat_matrix() -> IntMatrix {
    IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]])
}

/// The linear cat map on `T^2`.
pub fn cat_map() -> AffineToralMap {
    AffineToralMap::linear_only(cat_matrix()).expect("valid map")
}

/// Rotation of the circle by a symbolic angle `alpha`.
pub fn irrational_rotation() -> AffineToralMap {
    AffineToralMap::translation_only(vec![SymReal::symbol("alpha")]).expect("valid map")
}
