//! Ergodic hierarchy of affine toral maps.
//!
//! A character `k` has a finite orbit under `A^T` iff it lies in the periodic
//! lattice. The map is non-ergodic iff some nonzero periodic `k` of minimal
//! period `q` has integral holonomy `<S_q k, a>` with `S_q = sum_{j<q} (A^T)^j`,
//! and it is K iff the periodic lattice is zero.

use std::fmt;

use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::cyclotomic::{cyclotomic_factors, divisors, lcm};
use crate::exact::lattice::rank;
use crate::exact::roots::roots;
use crate::exact::{charpoly, cyclotomic_part, kernel_lattice, saturate, Int, IntLattice, IntMatrix, IntPoly, Rat};
use crate::json;
use crate::toral::{dot, AffineToralMap, SymReal};

/// All `A^T`-periodic integer vectors, with the sublattices of each period.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicLatticeData {
    pub lattice: IntLattice,
    /// Order of `A^T` restricted to the lattice.
    pub order: u64,
    /// `(q, ker((A^T)^q - I))` for every divisor `q` of the order, ascending.
    pub by_divisor: Vec<(u64, IntLattice)>,
}

impl PeriodicLatticeData {
    pub fn sublattice(&self, q: u64) -> Option<&IntLattice> {
        self.by_divisor.iter().find(|(d, _)| *d == q).map(|(_, l)| l)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "lattice": json::lattice(&self.lattice),
            "order": self.order,
            "by_divisor": self.by_divisor.iter().map(|(q, l)| json!({"q": q, "lattice": json::lattice(l)})).collect::<Vec<_>>(),
        })
    }
}

/// `(A^T)^q - I`.
fn shifted_power(ct: &IntMatrix, q: u64) -> IntMatrix {
    &ct.pow(q) - &IntMatrix::identity(ct.rows())
}

pub fn periodic_lattice(a: &IntMatrix) -> Result<PeriodicLatticeData> {
    let n = a.rows();
    let ct = a.transpose();
    let cp = charpoly(a)?;
    let factors = cyclotomic_factors(&cp);
    if factors.is_empty() {
        return Ok(PeriodicLatticeData {
            lattice: IntLattice::zero(n),
            order: 1,
            by_divisor: vec![(1, IntLattice::zero(n))],
        });
    }
    // Every periodic vector has a period dividing the lcm of the conductors.
    let big = factors.iter().fold(1u64, |acc, (k, _)| lcm(acc, *k));
    let lattice = kernel_lattice(&shifted_power(&ct, big));
    let order = divisors(big)
        .into_iter()
        .find(|&q| (&shifted_power(&ct, q) * lattice.basis()).is_zero())
        .unwrap_or(big);
    let by_divisor = divisors(order)
        .into_iter()
        .map(|q| (q, kernel_lattice(&shifted_power(&ct, q))))
        .collect();
    Ok(PeriodicLatticeData {
        lattice,
        order,
        by_divisor,
    })
}

/// Off-circle part of the characteristic polynomial and its rational hull.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicSubspaceData {
    /// Product of the factors with a root off the unit circle.
    pub p_off: IntPoly,
    pub cyclotomic_part: IntPoly,
    /// Saturated lattice spanning the sum of generalized eigenspaces with `|λ| != 1`.
    pub hull: IntLattice,
}

pub fn hyperbolic_subspace(a: &IntMatrix) -> Result<HyperbolicSubspaceData> {
    let cp = charpoly(a)?;
    let cyc = cyclotomic_part(&cp);
    // Kronecker: every non-cyclotomic monic irreducible factor has an off-circle root.
    let p_off = cp.div_exact(&cyc).expect("cyclotomic part divides");
    let hull = saturate(&IntLattice::from_generators(&cyc.eval_matrix(a)));
    Ok(HyperbolicSubspaceData {
        p_off,
        cyclotomic_part: cyc,
        hull,
    })
}

/// Eigenvalues on the unit circle that are not roots of unity (Salem-type),
/// located numerically from the self-reciprocal part of the off-circle factor.
pub fn unit_circle_non_torsion_eigenvalues(a: &IntMatrix) -> Result<Vec<Complex64>> {
    let h = hyperbolic_subspace(a)?;
    if h.p_off.deg() == 0 {
        return Ok(Vec::new());
    }
    let p = h.p_off.to_rat();
    let g = p.gcd(&h.p_off.reciprocal().to_rat());
    if g.deg() == 0 {
        return Ok(Vec::new());
    }
    let mut out: Vec<Complex64> = g
        .squarefree_decomposition()
        .iter()
        .flat_map(|(s, _)| roots(s))
        .filter(|z| (z.norm() - 1.0).abs() < 1e-10)
        .collect();
    out.sort_by(|x, y| x.arg().total_cmp(&y.arg()));
    Ok(out)
}

/// A nonzero character with a finite orbit and integral holonomy.
#[derive(Clone, Debug, PartialEq)]
pub struct ErgodicityWitness {
    pub q: u64,
    pub k: Vec<Int>,
    pub holonomy: SymReal,
}

impl ErgodicityWitness {
    pub fn height(&self) -> Int {
        self.k.iter().map(Signed::abs).max().unwrap_or_else(Int::zero)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q,
            "k": json::int_vec(&self.k),
            "holonomy": self.holonomy.to_json(),
        })
    }
}

/// `<S_q k, a>` for `S_q = sum_{j<q} (A^T)^j`.
pub fn holonomy(a: &IntMatrix, translation: &[SymReal], k: &[Int], q: u64) -> SymReal {
    let ct = a.transpose();
    let mut v = k.to_vec();
    let mut acc = SymReal::zero();
    for _ in 0..q {
        acc = &acc + &dot(&v, translation);
        v = ct.mul_vec(&v);
    }
    acc
}

/// Minimal `j` in `1..=cap` with `(A^T)^j k = k`.
pub fn minimal_period(ct: &IntMatrix, k: &[Int], cap: u64) -> Option<u64> {
    let mut v = k.to_vec();
    for j in 1..=cap {
        v = ct.mul_vec(&v);
        if v == k {
            return Some(j);
        }
    }
    None
}

/// Lattice of coefficient vectors `c` (w.r.t. `basis`) with `sum c_i h_i` in Z.
fn integral_holonomy_lattice(h: &[SymReal]) -> IntMatrix {
    let r = h.len();
    let mut symbols: Vec<&str> = h.iter().flat_map(|x| x.symbols()).collect();
    symbols.sort_unstable();
    symbols.dedup();
    // irrational coefficients must vanish
    let k1 = if symbols.is_empty() {
        IntMatrix::identity(r)
    } else {
        let rows: Vec<Vec<Rat>> = symbols
            .iter()
            .map(|s| h.iter().map(|x| x.coefficient(s)).collect())
            .collect();
        let m = crate::exact::RatMatrix::from_row_vecs(rows)
            .expect("rectangular")
            .clear_denominators_rows();
        kernel_lattice(&m).basis().clone()
    };
    let t = k1.cols();
    if t == 0 {
        return k1;
    }
    // rational congruence sum e_j rho_j in Z on the kernel coordinates
    let rho: Vec<Rat> = (0..t)
        .map(|j| {
            (0..r).fold(Rat::zero(), |acc, i| {
                acc + Rat::from_integer(k1[(i, j)].clone()) * h[i].rational_part()
            })
        })
        .collect();
    let d = rho
        .iter()
        .fold(Int::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let mut row: Vec<Int> = rho
        .iter()
        .map(|x| (x * Rat::from_integer(d.clone())).to_integer())
        .collect();
    row.push(d);
    let cong = kernel_lattice(&IntMatrix::from_row_vecs(vec![row]).expect("one row"));
    let proj = cong.basis().submatrix(0..t, 0..cong.rank());
    let e = IntLattice::from_generators(&proj);
    &k1 * e.basis()
}

/// Integer vectors of dimension `r` and sup-norm exactly `radius` whose first
/// nonzero entry is positive (witness conditions are symmetric under sign).
fn shell(r: usize, radius: i64) -> impl Iterator<Item = Vec<i64>> {
    let side = (2 * radius + 1) as u64;
    let total = side.pow(r as u32);
    (0..total).filter_map(move |mut idx| {
        let mut v = Vec::with_capacity(r);
        for _ in 0..r {
            v.push((idx % side) as i64 - radius);
            idx /= side;
        }
        v.reverse();
        let positive = v.iter().find(|x| **x != 0).is_some_and(|x| *x > 0);
        (positive && v.iter().map(|x| x.abs()).max() == Some(radius)).then_some(v)
    })
}

fn witness_for_period(
    a: &IntMatrix,
    translation: &[SymReal],
    data: &PeriodicLatticeData,
    q: u64,
) -> Option<ErgodicityWitness> {
    let lq = data.sublattice(q)?;
    if lq.is_zero() {
        return None;
    }
    let ct = a.transpose();
    let basis = lq.basis();
    let h: Vec<SymReal> = lq
        .basis_vectors()
        .iter()
        .map(|b| holonomy(a, translation, b, q))
        .collect();
    let coeffs = integral_holonomy_lattice(&h);
    if coeffs.cols() == 0 {
        return None;
    }
    let mq = IntLattice::from_generators(&(basis * &coeffs));
    let lower: Vec<IntMatrix> = data
        .by_divisor
        .iter()
        .filter(|(d, _)| *d < q && q.is_multiple_of(*d))
        .map(|(d, _)| shifted_power(&ct, *d))
        .collect();
    // The intersection with a saturated lower-period lattice is saturated in
    // M_q, so a full-rank intersection means M_q has no minimal-period-q element.
    for m in &lower {
        if rank(&(m * mq.basis())) == 0 {
            return None;
        }
    }
    let r = mq.rank();
    let b = mq.basis();
    for radius in 1.. {
        for c in shell(r, radius) {
            let ci: Vec<Int> = c.into_iter().map(Int::from).collect();
            let k = b.mul_vec(&ci);
            if lower.iter().all(|m| m.mul_vec(&k).iter().any(|x| !x.is_zero())) {
                let hol = holonomy(a, translation, &k, q);
                debug_assert!(hol.is_integer());
                return Some(ErgodicityWitness { q, k, holonomy: hol });
            }
        }
    }
    unreachable!("finitely many proper subspaces cannot cover a lattice")
}

/// Exact ergodicity decision with a witness when non-ergodic.
pub fn is_ergodic(f: &AffineToralMap) -> Result<(bool, Option<ErgodicityWitness>)> {
    let data = periodic_lattice(f.linear())?;
    Ok(ergodicity_from_data(f, &data))
}

fn ergodicity_from_data(
    f: &AffineToralMap,
    data: &PeriodicLatticeData,
) -> (bool, Option<ErgodicityWitness>) {
    if data.lattice.is_zero() {
        return (true, None);
    }
    let found: Vec<Option<ErgodicityWitness>> = data
        .by_divisor
        .par_iter()
        .map(|(q, _)| witness_for_period(f.linear(), f.translation(), data, *q))
        .collect();
    match found.into_iter().flatten().next() {
        Some(w) => (false, Some(w)),
        None => (true, None),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HierarchyTag {
    NonErgodic,
    ErgodicNotWeaklyMixing,
    K,
}

impl HierarchyTag {
    pub fn as_str(self) -> &'static str {
        match self {
            HierarchyTag::NonErgodic => "NonErgodic",
            HierarchyTag::ErgodicNotWeaklyMixing => "ErgodicNotWeaklyMixing",
            HierarchyTag::K => "K",
        }
    }

    pub fn is_ergodic(self) -> bool {
        self != HierarchyTag::NonErgodic
    }
}

impl fmt::Display for HierarchyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Eigenvalues `exp(2πi (phase + j) / denominator)` of the Koopman operator.
#[derive(Clone, Debug, PartialEq)]
pub struct KoopmanGenerator {
    pub phase: SymReal,
    pub denominator: u64,
}

impl KoopmanGenerator {
    pub fn to_json(&self) -> Value {
        json!({"phase": self.phase.to_json(), "denominator": self.denominator})
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationVerdict {
    pub tag: HierarchyTag,
    pub witness: Option<ErgodicityWitness>,
    pub koopman: Vec<KoopmanGenerator>,
    pub periodic: PeriodicLatticeData,
    pub notes: Vec<String>,
}

impl ClassificationVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "tag": self.tag.as_str(),
            "ergodic": self.tag.is_ergodic(),
            "weakly_mixing": self.tag == HierarchyTag::K,
            "witness": self.witness.as_ref().map(ErgodicityWitness::to_json),
            "koopman_generators": self.koopman.iter().map(KoopmanGenerator::to_json).collect::<Vec<_>>(),
            "periodic_lattice": self.periodic.to_json(),
            "notes": self.notes,
        })
    }
}

fn generators_unchecked(f: &AffineToralMap, data: &PeriodicLatticeData) -> Vec<KoopmanGenerator> {
    let mut out = Vec::new();
    if data.lattice.is_zero() {
        return out;
    }
    for (q, lq) in &data.by_divisor {
        for k in lq.basis_vectors() {
            out.push(KoopmanGenerator {
                phase: holonomy(f.linear(), f.translation(), &k, *q).reduce_mod_one(),
                denominator: *q,
            });
        }
    }
    out
}

/// Generators of the Koopman point spectrum of an ergodic map.
pub fn koopman_point_spectrum_generators(f: &AffineToralMap) -> Result<Vec<KoopmanGenerator>> {
    let data = periodic_lattice(f.linear())?;
    let (ergodic, _) = ergodicity_from_data(f, &data);
    if !ergodic {
        return Err(Error::Precondition(
            "Koopman point spectrum generators need an ergodic map".into(),
        ));
    }
    Ok(generators_unchecked(f, &data))
}

pub fn classify(f: &AffineToralMap) -> Result<ClassificationVerdict> {
    let data = periodic_lattice(f.linear())?;
    let mut notes = vec!["on tori weak mixing coincides with K: the periodic character lattice is zero".to_string()];
    if f.has_symbolic_translation() || !f.context().is_empty() {
        notes.push(format!(
            "verdict assumes 1 and the symbols {:?} are linearly independent over Q",
            f.context().symbols().iter().map(|s| s.name.as_str()).collect::<Vec<_>>()
        ));
    }
    if data.lattice.is_zero() {
        notes.push("no root-of-unity eigenvalue: conjugate to its linear part by a translation".into());
        return Ok(ClassificationVerdict {
            tag: HierarchyTag::K,
            witness: None,
            koopman: Vec::new(),
            periodic: data,
            notes,
        });
    }
    let (ergodic, witness) = ergodicity_from_data(f, &data);
    let (tag, koopman) = if ergodic {
        (HierarchyTag::ErgodicNotWeaklyMixing, generators_unchecked(f, &data))
    } else {
        (HierarchyTag::NonErgodic, Vec::new())
    };
    Ok(ClassificationVerdict {
        tag,
        witness,
        koopman,
        periodic: data,
        notes,
    })
}

/// Height bound used to cross-check the exact decision with brute force:
/// the witness height when one exists, never below `floor`.
pub fn witness_height_bound(f: &AffineToralMap, floor: u64) -> Result<Int> {
    let (_, w) = is_ergodic(f)?;
    let h = w.map(|w| w.height()).unwrap_or_else(Int::zero);
    Ok(h.max(Int::from(floor)))
}

/// Koopman generators without the ergodicity check.
pub fn koopman_generators_any(f: &AffineToralMap) -> Result<Vec<KoopmanGenerator>> {
    let data = periodic_lattice(f.linear())?;
    Ok(generators_unchecked(f, &data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int_vec;
    use crate::fixtures::{cat_map, cat_matrix, example_one, example_two, irrational_rotation};

    #[test]
    fn periodic_lattice_examples() {
        let d = periodic_lattice(&cat_matrix()).unwrap();
        assert!(d.lattice.is_zero());
        assert_eq!(d.order, 1);
        let d = periodic_lattice(&IntMatrix::identity(2)).unwrap();
        assert_eq!(d.lattice, IntLattice::full(2));
        assert_eq!(d.order, 1);
        let d = periodic_lattice(example_one().linear()).unwrap();
        assert_eq!(d.order, 1);
        assert_eq!(d.lattice.basis_vectors(), vec![int_vec(&[1, 0, 0])]);
    }

    #[test]
    fn rotation_of_order_six() {
        let phi6 = crate::exact::cyclotomic(6).unwrap().companion().unwrap();
        let d = periodic_lattice(&phi6).unwrap();
        assert_eq!(d.lattice, IntLattice::full(2));
        assert_eq!(d.order, 6);
        assert_eq!(d.by_divisor.len(), 4);
    }

    #[test]
    fn hull_examples() {
        let h = hyperbolic_subspace(&cat_matrix()).unwrap();
        assert_eq!(h.hull, IntLattice::full(2));
        let h = hyperbolic_subspace(&IntMatrix::identity(2)).unwrap();
        assert!(h.hull.is_zero());
        let h = hyperbolic_subspace(example_two().linear()).unwrap();
        assert_eq!(h.hull.rank(), 2);
        assert!(h.hull.is_saturated());
        assert!(h.hull.is_invariant_under(example_two().linear()));
        assert_eq!(h.p_off, IntPoly::from_i64(&[1, -3, 1]).unwrap());
    }

    #[test]
    fn ergodicity_examples() {
        let half = AffineToralMap::translation_only(vec![SymReal::from_ratio(1, 2)]).unwrap();
        let (e, w) = is_ergodic(&half).unwrap();
        assert!(!e);
        let w = w.unwrap();
        assert_eq!((w.q, w.k.clone()), (1, int_vec(&[2])));
        assert!(is_ergodic(&irrational_rotation()).unwrap().0);
        let (e, w) = is_ergodic(&example_one()).unwrap();
        assert!(!e);
        let w = w.unwrap();
        assert_eq!((w.q, w.k.clone()), (1, int_vec(&[2, 0, 0])));
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify(&cat_map()).unwrap().tag, HierarchyTag::K);
        assert_eq!(
            classify(&AffineToralMap::identity(2)).unwrap().tag,
            HierarchyTag::NonErgodic
        );
        let v = classify(&irrational_rotation()).unwrap();
        assert_eq!(v.tag, HierarchyTag::ErgodicNotWeaklyMixing);
        assert_eq!(
            v.koopman,
            vec![KoopmanGenerator {
                phase: SymReal::symbol("alpha"),
                denominator: 1
            }]
        );
        assert!(koopman_point_spectrum_generators(&cat_map()).unwrap().is_empty());
        assert!(koopman_point_spectrum_generators(&example_one()).is_err());
    }

    #[test]
    fn minimal_period_exclusion() {
        // A = diag(1, -1) on T^2 with a = (alpha, 1/2): e_2 has period 2 with
        // holonomy 1/2 - 1/2 = 0, so the map is non-ergodic via q = 2.
        let a = IntMatrix::from_i64_rows(&[&[1, 0], &[0, -1]]);
        let f = AffineToralMap::new(a, vec![SymReal::symbol("alpha"), SymReal::from_ratio(1, 2)]).unwrap();
        let (e, w) = is_ergodic(&f).unwrap();
        assert!(!e);
        let w = w.unwrap();
        assert_eq!(w.q, 2);
        assert_eq!(w.k, int_vec(&[0, 1]));
    }

    #[test]
    fn salem_free_for_cat() {
        assert!(unit_circle_non_torsion_eigenvalues(&cat_matrix()).unwrap().is_empty());
        let walters = IntPoly::from_i64(&[1, -1, -1, -1, 1]).unwrap().companion().unwrap();
        assert_eq!(unit_circle_non_torsion_eigenvalues(&walters).unwrap().len(), 2);
    }
}
