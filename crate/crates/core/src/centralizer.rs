//! Affine centralizers, Jordan-block constraints on centralizer derivatives,
//! and the rigidity verdict.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::cyclotomic::{cyclotomic_factors, lcm};
use crate::exact::poly::gcd_free_basis;
use crate::exact::roots::roots;
use crate::exact::{
    charpoly, cyclotomic, elementary_divisors, invariant_factors, kernel_lattice, Int, IntLattice,
    IntMatrix, Rat, RatMatrix, RatPoly,
};
use crate::json;
use crate::spectral::{classify, koopman_generators_any, HierarchyTag, KoopmanGenerator};
use crate::toral::AffineToralMap;

/// Relative tolerance under which two moduli are the same.
pub const CLUSTER_TOL: f64 = 1e-9;
/// Relative gaps above this are distinct; in between is ambiguous.
pub const SEPARATION_TOL: f64 = 10.0 * CLUSTER_TOL;

/// Basis of `{X : P X = X Q}` for `P` (s x s) and `Q` (t x t), as s x t matrices.
pub fn intertwiner_basis(p: &RatMatrix, q: &RatMatrix) -> Vec<RatMatrix> {
    let (s, t) = (p.rows(), q.rows());
    let mut sys = RatMatrix::zeros(s * t, s * t);
    let var = |k: usize, l: usize| k * t + l;
    for i in 0..s {
        for j in 0..t {
            let row = i * t + j;
            for k in 0..s {
                sys[(row, var(k, j))] += &p[(i, k)];
            }
            for l in 0..t {
                sys[(row, var(i, l))] -= &q[(l, j)];
            }
        }
    }
    sys.nullspace()
        .into_iter()
        .map(|v| RatMatrix::from_vec(s, t, v).expect("s*t entries"))
        .collect()
}

/// Basis over Q of the commutant `{B : A B = B A}`.
pub fn commutant_basis(a: &IntMatrix) -> Result<Vec<RatMatrix>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("commutant needs a square matrix".into()));
    }
    let r = a.to_rat();
    Ok(intertwiner_basis(&r, &r))
}

/// Translations `L_b` commuting with `f`: `(A - I) b` integral.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslationCentralizer {
    /// `dim ker_Q(A - I)`, the dimension of the identity component.
    pub dimension: usize,
    /// Directions of the identity component.
    pub kernel: IntLattice,
    /// Elementary divisors of `A - I` greater than one: the finite part is
    /// `prod Z/d_i`.
    pub finite_part: Vec<Int>,
}

impl TranslationCentralizer {
    pub fn finite_order(&self) -> Int {
        self.finite_part.iter().product()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dimension": self.dimension,
            "kernel": json::lattice(&self.kernel),
            "finite_part": json::int_vec(&self.finite_part),
            "finite_order": json::int(&self.finite_order()),
        })
    }
}

pub fn affine_centralizer_translations(f: &AffineToralMap) -> TranslationCentralizer {
    let n = f.dim();
    let ami = f.linear() - &IntMatrix::identity(n);
    let kernel = kernel_lattice(&ami);
    let finite_part = elementary_divisors(&ami)
        .into_iter()
        .map(|d| if d < Int::zero() { -d } else { d })
        .filter(|d| !d.is_one())
        .collect();
    TranslationCentralizer {
        dimension: kernel.rank(),
        kernel,
        finite_part,
    }
}

/// One Jordan block of `A` over C.
#[derive(Clone, Debug, PartialEq)]
pub struct JordanBlock {
    pub eigenvalue: Complex64,
    /// `(m, k)` when the eigenvalue is exactly `exp(2πi m/k)`.
    pub root_of_unity: Option<(u64, u64)>,
    pub size: usize,
    /// Blocks share an index iff their eigenvalues are exactly equal.
    pub eigen_index: usize,
    /// Blocks share a class iff their moduli agree within tolerance.
    pub modulus_class: usize,
}

impl JordanBlock {
    pub fn modulus(&self) -> f64 {
        if self.root_of_unity.is_some() {
            1.0
        } else {
            self.eigenvalue.norm()
        }
    }

    pub fn to_json(&self) -> Value {
        let ev = match self.root_of_unity {
            Some((m, k)) => json!({"root_of_unity": format!("{m}/{k}"),
                "re": self.eigenvalue.re, "im": self.eigenvalue.im}),
            None => json!({"re": self.eigenvalue.re, "im": self.eigenvalue.im}),
        };
        json!({
            "eigenvalue": ev,
            "size": self.size,
            "modulus": self.modulus(),
            "eigen_index": self.eigen_index,
            "modulus_class": self.modulus_class,
        })
    }
}

fn multiplicity(f: &RatPoly, g: &RatPoly) -> usize {
    let mut f = f.clone();
    let mut e = 0;
    while let Some(q) = f.div_exact(g) {
        f = q;
        e += 1;
    }
    e
}

fn rel_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.max(b).max(f64::MIN_POSITIVE)
}

/// Jordan blocks of `A`: exact sizes from the invariant factors of `xI - A`,
/// exact roots of unity from the cyclotomic factors, numeric roots otherwise.
pub fn jordan_blocks(a: &IntMatrix) -> Result<Vec<JordanBlock>> {
    let cp = charpoly(a)?;
    let invs = invariant_factors(a);
    let cyc: Vec<(u64, RatPoly)> = cyclotomic_factors(&cp)
        .into_iter()
        .map(|(k, _)| Ok((k, cyclotomic(k)?.to_rat())))
        .collect::<Result<_>>()?;
    let mut inputs: Vec<RatPoly> = cyc.iter().map(|(_, p)| p.clone()).collect();
    for f in &invs {
        inputs.extend(f.squarefree_decomposition().into_iter().map(|(s, _)| s));
    }
    let mut pieces = gcd_free_basis(&inputs);
    pieces.sort_by_key(|p| (p.deg(), p.to_string()));

    // (eigenvalue, root of unity, sizes)
    let mut eigen: Vec<(Complex64, Option<(u64, u64)>, Vec<usize>)> = Vec::new();
    for piece in &pieces {
        let mut sizes: Vec<usize> = invs
            .iter()
            .map(|f| multiplicity(f, piece))
            .filter(|&e| e > 0)
            .collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        match cyc.iter().find(|(_, p)| p == piece) {
            Some((k, _)) => {
                for m in (0..*k).filter(|m| m.gcd(k) == 1) {
                    let z = Complex64::from_polar(1.0, TAU * m as f64 / *k as f64);
                    eigen.push((z, Some((m, *k)), sizes.clone()));
                }
            }
            None => {
                for z in roots(piece) {
                    eigen.push((z, None, sizes.clone()));
                }
            }
        }
    }

    let modulus = |e: &(Complex64, Option<(u64, u64)>, Vec<usize>)| {
        if e.1.is_some() {
            1.0
        } else {
            e.0.norm()
        }
    };
    let mut order: Vec<usize> = (0..eigen.len()).collect();
    order.sort_by(|&i, &j| modulus(&eigen[i]).total_cmp(&modulus(&eigen[j])));
    let mut class = vec![0usize; eigen.len()];
    let mut current = 0;
    for w in 1..order.len() {
        let (prev, here) = (modulus(&eigen[order[w - 1]]), modulus(&eigen[order[w]]));
        let gap = rel_gap(prev, here);
        if gap > SEPARATION_TOL {
            current += 1;
        } else if gap > CLUSTER_TOL {
            return Err(Error::ClusteringAmbiguity(format!(
                "moduli {prev:.15} and {here:.15} differ by relative {gap:.3e}, \
                 between {CLUSTER_TOL:e} and {SEPARATION_TOL:e}"
            )));
        }
        class[order[w]] = current;
    }

    let mut blocks = Vec::new();
    for (idx, (z, rou, sizes)) in eigen.iter().enumerate() {
        for &size in sizes {
            blocks.push(JordanBlock {
                eigenvalue: *z,
                root_of_unity: *rou,
                size,
                eigen_index: idx,
                modulus_class: class[idx],
            });
        }
    }
    Ok(blocks)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolution {
    RuledOut,
    PossibleWithinTolerance,
}

impl Resolution {
    pub fn as_str(self) -> &'static str {
        match self {
            Resolution::RuledOut => "ruled-out",
            Resolution::PossibleWithinTolerance => "possible-within-tolerance",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum BlockConstraint {
    Zero,
    /// Dimension of `{B : Λ_i B = B Λ_j}`.
    Constant(usize),
    TwistedEigenfunction { omega: Complex64, resolution: Resolution },
}

impl BlockConstraint {
    pub fn to_json(&self) -> Value {
        match self {
            BlockConstraint::Zero => json!({"kind": "Zero"}),
            BlockConstraint::Constant(d) => json!({"kind": "Constant", "dim": d}),
            BlockConstraint::TwistedEigenfunction { omega, resolution } => json!({
                "kind": "TwistedEigenfunction",
                "omega": {"re": omega.re, "im": omega.im},
                "resolution": resolution.as_str(),
            }),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockConstraintTable {
    pub blocks: Vec<JordanBlock>,
    /// `entries[i][j]` constrains the `(i, j)` block of the derivative.
    pub entries: Vec<Vec<BlockConstraint>>,
}

impl BlockConstraintTable {
    pub fn get(&self, i: usize, j: usize) -> &BlockConstraint {
        &self.entries[i][j]
    }

    /// Sum of all `Constant` dimensions; equals the complex commutant dimension.
    pub fn constant_dim_sum(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .map(|c| match c {
                BlockConstraint::Constant(d) => *d,
                _ => 0,
            })
            .sum()
    }

    pub fn unresolved_twisted_pairs(&self) -> usize {
        self.entries
            .iter()
            .flatten()
            .filter(|c| {
                matches!(
                    c,
                    BlockConstraint::TwistedEigenfunction {
                        resolution: Resolution::PossibleWithinTolerance,
                        ..
                    }
                )
            })
            .count()
    }

    /// Whether two blocks with distinct eigenvalues share a modulus class.
    pub fn has_distinct_equal_modulus(&self) -> bool {
        self.blocks.iter().any(|b| {
            self.blocks
                .iter()
                .any(|c| b.eigen_index != c.eigen_index && b.modulus_class == c.modulus_class)
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "blocks": self.blocks.iter().map(JordanBlock::to_json).collect::<Vec<_>>(),
            "entries": self.entries.iter()
                .map(|r| r.iter().map(BlockConstraint::to_json).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "constant_dim_sum": self.constant_dim_sum(),
            "unresolved_twisted_pairs": self.unresolved_twisted_pairs(),
        })
    }
}

fn nilpotent_jordan(s: usize) -> RatMatrix {
    let mut m = RatMatrix::zeros(s, s);
    for i in 0..s.saturating_sub(1) {
        m[(i, i + 1)] = Rat::one();
    }
    m
}

/// Exact order of a root of unity `exp(2πi r)`, `r` rational.
fn root_order(r: &Rat) -> u64 {
    r.denom().to_u64().unwrap_or(u64::MAX)
}

fn twisted_resolution(
    bi: &JordanBlock,
    bj: &JordanBlock,
    omega: Complex64,
    koopman: &[KoopmanGenerator],
) -> Resolution {
    if koopman.iter().any(|g| !g.phase.is_rational()) {
        return Resolution::PossibleWithinTolerance;
    }
    // Rational generators span the roots of unity of order dividing n.
    let n = koopman.iter().fold(1u64, |acc, g| {
        let r = root_order(g.phase.rational_part());
        lcm(acc, r.saturating_mul(g.denominator))
    });
    if let (Some((mi, ki)), Some((mj, kj))) = (bi.root_of_unity, bj.root_of_unity) {
        let r = Rat::new(Int::from(mi), Int::from(ki)) - Rat::new(Int::from(mj), Int::from(kj));
        return if n % root_order(&r) == 0 {
            Resolution::PossibleWithinTolerance
        } else {
            Resolution::RuledOut
        };
    }
    let arg = omega.arg() / TAU * n as f64;
    let off = (arg - arg.round()).abs() * TAU / n as f64;
    if (omega.norm() - 1.0).abs() <= CLUSTER_TOL && off <= CLUSTER_TOL {
        Resolution::PossibleWithinTolerance
    } else {
        Resolution::RuledOut
    }
}

/// Constraints on the blocks `A_ij` of the derivative of a centralizer
/// element, from `Λ_i^n A_ij(x) = A_ij(f^n x) Λ_j^n`.
pub fn block_constraint_table(
    a: &IntMatrix,
    koopman: &[KoopmanGenerator],
) -> Result<BlockConstraintTable> {
    if !a.is_unimodular() {
        return Err(Error::NotUnimodular(format!("det = {}", a.det())));
    }
    let blocks = jordan_blocks(a)?;
    let mut entries = Vec::with_capacity(blocks.len());
    for bi in &blocks {
        let mut row = Vec::with_capacity(blocks.len());
        for bj in &blocks {
            let c = if bi.eigen_index == bj.eigen_index {
                let dim = intertwiner_basis(&nilpotent_jordan(bi.size), &nilpotent_jordan(bj.size)).len();
                BlockConstraint::Constant(dim)
            } else if bi.modulus_class != bj.modulus_class || koopman.is_empty() {
                BlockConstraint::Zero
            } else {
                let omega = bi.eigenvalue / bj.eigenvalue;
                BlockConstraint::TwistedEigenfunction {
                    omega,
                    resolution: twisted_resolution(bi, bj, omega, koopman),
                }
            };
            row.push(c);
        }
        entries.push(row);
    }
    Ok(BlockConstraintTable { blocks, entries })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Narrative {
    /// Lipschitz centralizer equals the affine centralizer.
    AffineRigid,
    /// Smooth centralizer is a Lie group, possibly larger than the affine one.
    LieGroup,
    /// Smooth centralizer contains an infinite-dimensional group.
    NonLie,
}

impl Narrative {
    pub fn as_str(self) -> &'static str {
        match self {
            Narrative::AffineRigid => "AffineRigid",
            Narrative::LieGroup => "LieGroup",
            Narrative::NonLie => "NonLie",
        }
    }
}

impl fmt::Display for Narrative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CentralizerVerdict {
    pub tag: HierarchyTag,
    pub translations: TranslationCentralizer,
    pub commutant_dim: usize,
    pub lie_bound: usize,
    pub narrative: Narrative,
    /// Ergodic and no two distinct eigenvalues share a modulus: the
    /// Lipschitz centralizer is affine even without weak mixing.
    pub distinct_modulus_shortcut: bool,
    /// A translational perturbation has a non-Lie smooth centralizer.
    pub perturbation_non_lie: bool,
    pub table: BlockConstraintTable,
    pub notes: Vec<String>,
}

impl CentralizerVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "tag": self.tag.as_str(),
            "narrative": self.narrative.as_str(),
            "translation_centralizer": self.translations.to_json(),
            "commutant_dim": self.commutant_dim,
            "lie_bound": self.lie_bound,
            "distinct_modulus_shortcut": self.distinct_modulus_shortcut,
            "perturbation_non_lie": self.perturbation_non_lie,
            "block_table": self.table.to_json(),
            "notes": self.notes,
        })
    }
}

pub fn centralizer_verdict(f: &AffineToralMap) -> Result<CentralizerVerdict> {
    let n = f.dim();
    let class = classify(f)?;
    let koopman = koopman_generators_any(f)?;
    let table = block_constraint_table(f.linear(), &koopman)?;
    let translations = affine_centralizer_translations(f);
    let commutant_dim = commutant_basis(f.linear())?.len();
    let ergodic = class.tag.is_ergodic();
    let mut lie_bound = table.constant_dim_sum() + table.unresolved_twisted_pairs();
    if ergodic {
        lie_bound = lie_bound.min(n);
    }
    let distinct_modulus_shortcut = ergodic && !table.has_distinct_equal_modulus();
    let narrative = match class.tag {
        HierarchyTag::K => Narrative::AffineRigid,
        HierarchyTag::ErgodicNotWeaklyMixing => Narrative::LieGroup,
        HierarchyTag::NonErgodic => Narrative::NonLie,
    };
    let mut notes = vec![
        "discrete part of the affine centralizer: finitely many generators not computed".to_string(),
    ];
    if distinct_modulus_shortcut && class.tag != HierarchyTag::K {
        notes.push("no two distinct eigenvalues share a modulus: the Lipschitz centralizer is affine".into());
    }
    if class.tag != HierarchyTag::K {
        notes.push("a translational perturbation has a centralizer that is not a Lie group (see perturb)".into());
    }
    Ok(CentralizerVerdict {
        tag: class.tag,
        translations,
        commutant_dim,
        lie_bound,
        narrative,
        distinct_modulus_shortcut,
        perturbation_non_lie: class.tag != HierarchyTag::K,
        table,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int_vec;
    use crate::exact::IntPoly;
    use crate::fixtures::{cat_map, cat_matrix, example_one, irrational_rotation};
    use crate::toral::{SymReal, SymbolContext};

    /// Direct solve of `A B = B A` on the four entries of a 2x2 `B`, by
    /// enumerating small integer matrices and counting a rank.
    fn commutant_dim_2x2_bruteforce(a: &IntMatrix) -> usize {
        let mut sols = Vec::new();
        for v in 0..81i64 {
            let e: Vec<i64> = (0..4).map(|k| (v / 3i64.pow(k)) % 3 - 1).collect();
            let b = IntMatrix::from_i64_rows(&[&[e[0], e[1]], &[e[2], e[3]]]);
            if (a * &b) == (&b * a) {
                sols.push(e.iter().map(|&x| Rat::from_integer(Int::from(x))).collect::<Vec<_>>());
            }
        }
        if sols.is_empty() {
            return 0;
        }
        RatMatrix::from_row_vecs(sols).unwrap().rank()
    }

    #[test]
    fn commutant_examples() {
        assert_eq!(commutant_basis(&cat_matrix()).unwrap().len(), 2);
        assert_eq!(commutant_dim_2x2_bruteforce(&cat_matrix()), 2);
        assert_eq!(commutant_basis(&IntMatrix::identity(2)).unwrap().len(), 4);
        let cubic = IntPoly::from_i64(&[-1, -1, 0, 1]).unwrap().companion().unwrap();
        assert_eq!(commutant_basis(&cubic).unwrap().len(), 3);
    }

    #[test]
    fn commutant_elements_commute() {
        let a = example_one().linear().to_rat();
        for b in commutant_basis(example_one().linear()).unwrap() {
            assert_eq!(&a * &b, &b * &a);
        }
    }

    #[test]
    fn translation_centralizers() {
        let t = affine_centralizer_translations(&example_one());
        assert_eq!(t.dimension, 1);
        assert_eq!(t.kernel.basis_vectors(), vec![int_vec(&[0, 0, 1])]);
        let t = affine_centralizer_translations(&cat_map());
        assert_eq!(t.dimension, 0);
        assert_eq!(t.finite_order(), Int::one());
        let t = affine_centralizer_translations(&AffineToralMap::identity(3));
        assert_eq!(t.dimension, 3);
        let minus = AffineToralMap::linear_only(IntMatrix::from_i64_rows(&[&[-1, 0], &[0, -1]])).unwrap();
        let t = affine_centralizer_translations(&minus);
        assert_eq!(t.finite_part, vec![Int::from(2), Int::from(2)]);
    }

    #[test]
    fn cat_table() {
        let t = block_constraint_table(&cat_matrix(), &[]).unwrap();
        assert_eq!(t.blocks.len(), 2);
        assert_eq!(t.get(0, 0), &BlockConstraint::Constant(1));
        assert_eq!(t.get(1, 1), &BlockConstraint::Constant(1));
        assert_eq!(t.get(0, 1), &BlockConstraint::Zero);
        assert_eq!(t.constant_dim_sum(), 2);
    }

    #[test]
    fn single_jordan_block() {
        let j = IntMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]);
        let t = block_constraint_table(&j, &[]).unwrap();
        assert_eq!(t.blocks.len(), 1);
        assert_eq!(t.blocks[0].size, 2);
        assert_eq!(t.blocks[0].root_of_unity, Some((0, 1)));
        assert_eq!(t.get(0, 0), &BlockConstraint::Constant(2));
    }

    #[test]
    fn example_one_blocks() {
        let t = block_constraint_table(example_one().linear(), &[]).unwrap();
        assert_eq!(t.blocks.len(), 1);
        assert_eq!(t.blocks[0].size, 3);
        assert_eq!(t.constant_dim_sum(), commutant_basis(example_one().linear()).unwrap().len());
    }

    #[test]
    fn walters_pairs_are_twisted() {
        let quartic = IntPoly::from_i64(&[1, -1, -1, -1, 1]).unwrap().companion().unwrap();
        let a = quartic.direct_sum(&IntMatrix::identity(1));
        let ctx = SymbolContext::new().with("theta", 0.3819660112501051).unwrap();
        let mut tr = vec![SymReal::zero(); 4];
        tr.push(SymReal::symbol("theta"));
        let f = AffineToralMap::with_context(a.clone(), tr, ctx).unwrap();
        let koop = koopman_generators_any(&f).unwrap();
        let t = block_constraint_table(&a, &koop).unwrap();
        let one = t.blocks.iter().position(|b| b.root_of_unity == Some((0, 1))).unwrap();
        let unit: Vec<usize> = (0..t.blocks.len())
            .filter(|&i| i != one && t.blocks[i].modulus_class == t.blocks[one].modulus_class)
            .collect();
        assert_eq!(unit.len(), 2);
        for &i in &unit {
            assert!(matches!(
                t.get(i, one),
                BlockConstraint::TwistedEigenfunction {
                    resolution: Resolution::PossibleWithinTolerance,
                    ..
                }
            ));
        }
    }

    #[test]
    fn verdict_examples() {
        let v = centralizer_verdict(&cat_map()).unwrap();
        assert_eq!(v.narrative, Narrative::AffineRigid);
        assert_eq!(v.lie_bound, 2);
        let v = centralizer_verdict(&irrational_rotation()).unwrap();
        assert_eq!(v.narrative, Narrative::LieGroup);
        assert_eq!(v.lie_bound, 1);
        assert!(v.distinct_modulus_shortcut);
        let v = centralizer_verdict(&example_one()).unwrap();
        assert_eq!(v.narrative, Narrative::NonLie);
        assert!(v.perturbation_non_lie);
    }

    #[test]
    fn order_four_rotation_pairs() {
        // quarter turn: eigenvalues ±i share modulus 1
        let r = IntMatrix::from_i64_rows(&[&[0, -1], &[1, 0]]);
        let t = block_constraint_table(&r, &[]).unwrap();
        assert_eq!(t.get(0, 1), &BlockConstraint::Zero);
        assert!(t.has_distinct_equal_modulus());
        let g = KoopmanGenerator { phase: SymReal::zero(), denominator: 2 };
        let t = block_constraint_table(&r, &[g]).unwrap();
        // omega = -1 lies in the group of square roots of unity
        assert!(matches!(
            t.get(0, 1),
            BlockConstraint::TwistedEigenfunction { resolution: Resolution::PossibleWithinTolerance, .. }
        ));
        let g = KoopmanGenerator { phase: SymReal::zero(), denominator: 3 };
        let t = block_constraint_table(&r, &[g]).unwrap();
        assert!(matches!(
            t.get(0, 1),
            BlockConstraint::TwistedEigenfunction { resolution: Resolution::RuledOut, .. }
        ));
    }

    fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
        let mut m = IntMatrix::identity(n);
        for &(i, j, c) in ops {
            let (i, j) = (i % n, j % n);
            if i == j {
                continue;
            }
            let mut e = IntMatrix::identity(n);
            e[(i, j)] = Int::from(c);
            m = &m * &e;
        }
        m
    }

    proptest::proptest! {
        #[test]
        fn constant_dims_match_commutant(
            n in 1usize..=4,
            ops in proptest::collection::vec((0usize..4, 0usize..4, -2i64..=2), 0..8),
        ) {
            let a = unimodular(n, &ops);
            match block_constraint_table(&a, &[]) {
                Ok(t) => {
                    proptest::prop_assert_eq!(t.constant_dim_sum(), commutant_basis(&a).unwrap().len());
                    for (i, bi) in t.blocks.iter().enumerate() {
                        for (j, bj) in t.blocks.iter().enumerate() {
                            if t.get(i, j) == &BlockConstraint::Zero && bi.modulus_class != bj.modulus_class {
                                proptest::prop_assert!(rel_gap(bi.modulus(), bj.modulus()) > SEPARATION_TOL);
                            }
                        }
                    }
                }
                Err(Error::ClusteringAmbiguity(_)) => {}
                Err(e) => proptest::prop_assert!(false, "{e}"),
            }
        }
    }
}
