//! Sublattices of Z^n stored by their column-HNF basis.

use std::fmt;

use num_traits::{One, Signed, Zero};

use super::hnf::{elementary_divisors, hnf, hnf_rank};
use super::matrix::{Int, IntMatrix};
use crate::error::{Error, Result};

/// A sublattice of Z^n. The basis is the nonzero part of the column HNF of
/// any generating set, so two lattices are equal iff their bases are equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntLattice {
    n: usize,
    basis: IntMatrix,
}

impl fmt::Debug for IntLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntLattice(n={}, basis={:?})", self.n, self.basis)
    }
}

impl IntLattice {
    /// Lattice generated by the columns of `gens` (n x k, any k).
    pub fn from_generators(gens: &IntMatrix) -> Self {
        let n = gens.rows();
        let (h, _) = hnf(gens);
        let r = hnf_rank(&h);
        IntLattice {
            n,
            basis: h.submatrix(0..n, 0..r),
        }
    }

    pub fn from_vectors(n: usize, vectors: &[Vec<Int>]) -> Self {
        Self::from_generators(&IntMatrix::from_columns(n, vectors))
    }

    pub fn zero(n: usize) -> Self {
        IntLattice {
            n,
            basis: IntMatrix::zeros(n, 0),
        }
    }

    pub fn full(n: usize) -> Self {
        IntLattice {
            n,
            basis: IntMatrix::identity(n),
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_zero(&self) -> bool {
        self.rank() == 0
    }

    /// Basis vectors as the columns of an `n x rank` HNF matrix.
    pub fn basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vec<Int>> {
        self.basis.columns()
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        if v.len() != self.n {
            return false;
        }
        let stacked = self.basis.hstack(&IntMatrix::from_columns(self.n, &[v.to_vec()]));
        IntLattice::from_generators(&stacked.expect("same row count")) == *self
    }

    pub fn contains_lattice(&self, other: &IntLattice) -> bool {
        other.basis_vectors().iter().all(|v| self.contains(v))
    }

    /// `[saturate(L) : L]`, the product of the elementary divisors of the basis.
    pub fn saturation_index(&self) -> Int {
        elementary_divisors(&self.basis).into_iter().product()
    }

    pub fn is_saturated(&self) -> bool {
        self.saturation_index().is_one()
    }

    pub fn sum(&self, other: &IntLattice) -> Result<IntLattice> {
        self.check_dim(other)?;
        Ok(IntLattice::from_generators(
            &self.basis.hstack(&other.basis)?,
        ))
    }

    /// Intersection via the kernel of `[B1 | -B2]`.
    pub fn intersect(&self, other: &IntLattice) -> Result<IntLattice> {
        self.check_dim(other)?;
        let (r1, r2) = (self.rank(), other.rank());
        if r1 == 0 || r2 == 0 {
            return Ok(IntLattice::zero(self.n));
        }
        let stacked = self.basis.hstack(&-&other.basis)?;
        let k = kernel_lattice(&stacked);
        let coeffs = k.basis.submatrix(0..r1, 0..k.rank());
        Ok(IntLattice::from_generators(&(&self.basis * &coeffs)))
    }

    /// Image `M L` of the lattice under an integer matrix.
    pub fn image(&self, m: &IntMatrix) -> Result<IntLattice> {
        if m.cols() != self.n {
            return Err(Error::DimensionMismatch("image: matrix width".into()));
        }
        Ok(IntLattice::from_generators(&m.checked_mul(&self.basis)?))
    }

    pub fn is_invariant_under(&self, m: &IntMatrix) -> bool {
        match self.image(m) {
            Ok(img) => self.contains_lattice(&img),
            Err(_) => false,
        }
    }

    /// Unimodular `W` whose first `rank` columns are the basis; needs saturation.
    pub fn complete_basis(&self) -> Result<IntMatrix> {
        if !self.is_saturated() {
            return Err(Error::Precondition(
                "basis completion needs a saturated lattice".into(),
            ));
        }
        complete_to_unimodular(&self.basis)
    }

    fn check_dim(&self, other: &IntLattice) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!(
                "lattices in Z^{} and Z^{}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    /// Largest sup-norm of a basis vector.
    pub fn basis_height(&self) -> Int {
        self.basis.max_abs_entry()
    }
}

/// Completes the columns of `p` (n x d, saturated) to a unimodular n x n matrix.
pub fn complete_to_unimodular(p: &IntMatrix) -> Result<IntMatrix> {
    let (n, d) = (p.rows(), p.cols());
    if d == 0 {
        return Ok(IntMatrix::identity(n));
    }
    // P^T V = [I | 0]  =>  W = (V^{-1})^T has P as its first d columns.
    let (h, v) = hnf(&p.transpose());
    let lead = h.submatrix(0..d, 0..d);
    if lead != IntMatrix::identity(d) {
        return Err(Error::Precondition(
            "columns do not extend to a basis of Z^n".into(),
        ));
    }
    let w = v.inverse_unimodular()?.transpose();
    debug_assert_eq!(w.submatrix(0..n, 0..d), *p);
    Ok(w)
}

/// Saturated lattice `{k in Z^m : M k = 0}`.
pub fn kernel_lattice(m: &IntMatrix) -> IntLattice {
    let cols = m.cols();
    let (h, u) = hnf(m);
    let r = hnf_rank(&h);
    IntLattice::from_generators(&u.submatrix(0..cols, r..cols))
}

/// `(L (x) Q) ∩ Z^n`.
pub fn saturate(l: &IntLattice) -> IntLattice {
    let n = l.ambient_dim();
    let k = kernel_lattice(&l.basis().transpose());
    if k.rank() == 0 {
        return IntLattice::full(n);
    }
    kernel_lattice(&k.basis().transpose())
}

/// Rank of an integer matrix.
pub fn rank(m: &IntMatrix) -> usize {
    hnf_rank(&hnf(m).0)
}

/// Whether `v` is a nonzero vector with all entries `|v_i| <= h`.
pub fn within_height(v: &[Int], h: &Int) -> bool {
    v.iter().all(|x| x.abs() <= *h) && v.iter().any(|x| !x.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int_vec;
    use proptest::prelude::*;

    #[test]
    fn example_one_fixed_kernel() {
        // A - I for the unipotent 3x3 example, and its transpose.
        let a = IntMatrix::from_i64_rows(&[&[1, 0, 0], &[1, 1, 0], &[2, 1, 1]]);
        let ami = &a - &IntMatrix::identity(3);
        let k = kernel_lattice(&ami);
        assert_eq!(k.rank(), 1);
        assert_eq!(k.basis_vectors(), vec![int_vec(&[0, 0, 1])]);
        let kt = kernel_lattice(&ami.transpose());
        assert_eq!(kt.basis_vectors(), vec![int_vec(&[1, 0, 0])]);
    }

    #[test]
    fn trivial_kernels() {
        assert!(kernel_lattice(&IntMatrix::identity(3)).is_zero());
        assert_eq!(kernel_lattice(&IntMatrix::zeros(2, 2)), IntLattice::full(2));
    }

    #[test]
    fn saturation_examples() {
        let l = IntLattice::from_vectors(2, &[int_vec(&[2, 0])]);
        assert_eq!(
            saturate(&l),
            IntLattice::from_vectors(2, &[int_vec(&[1, 0])])
        );
        // A rank-2 sublattice of Z^2 saturates to Z^2; its basis has |det| 8.
        let l = IntLattice::from_vectors(2, &[int_vec(&[2, 2]), int_vec(&[0, 4])]);
        assert_eq!(l.saturation_index(), Int::from(8));
        let s = saturate(&l);
        assert_eq!(s, IntLattice::full(2));
        assert_eq!(s.saturation_index(), Int::one());
    }

    #[test]
    fn completion_of_primitive_vector() {
        let l = IntLattice::from_vectors(3, &[int_vec(&[2, 3, 5])]);
        let s = saturate(&l);
        let w = s.complete_basis().unwrap();
        assert!(w.is_unimodular());
        assert_eq!(w.column(0), s.basis_vectors()[0]);
    }

    #[test]
    fn intersection_of_coordinate_planes() {
        let xy = IntLattice::from_vectors(3, &[int_vec(&[1, 0, 0]), int_vec(&[0, 1, 0])]);
        let yz = IntLattice::from_vectors(3, &[int_vec(&[0, 1, 0]), int_vec(&[0, 0, 1])]);
        let i = xy.intersect(&yz).unwrap();
        assert_eq!(i, IntLattice::from_vectors(3, &[int_vec(&[0, 1, 0])]));
    }

    fn small_matrix(max_r: usize, max_c: usize) -> impl Strategy<Value = IntMatrix> {
        (1..=max_r, 1..=max_c).prop_flat_map(|(r, c)| {
            prop::collection::vec(-5i64..=5, r * c).prop_map(move |v| {
                IntMatrix::from_vec(r, c, v.into_iter().map(Int::from).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn kernel_is_saturated_and_correct(m in small_matrix(4, 5)) {
            let k = kernel_lattice(&m);
            prop_assert!(k.is_saturated());
            prop_assert_eq!(k.rank(), m.cols() - rank(&m));
            prop_assert!((&m * k.basis()).is_zero());
        }

        #[test]
        fn saturate_idempotent(m in small_matrix(4, 4)) {
            let l = IntLattice::from_generators(&m);
            let s = saturate(&l);
            prop_assert_eq!(saturate(&s), s.clone());
            prop_assert!(s.contains_lattice(&l));
            prop_assert_eq!(s.rank(), l.rank());
        }

        #[test]
        fn completion_is_unimodular(m in small_matrix(5, 3)) {
            let s = saturate(&IntLattice::from_generators(&m));
            let w = s.complete_basis().unwrap();
            prop_assert!(w.is_unimodular());
            prop_assert_eq!(w.submatrix(0..s.ambient_dim(), 0..s.rank()), s.basis().clone());
        }
    }
}
