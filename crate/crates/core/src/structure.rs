//! Block triangularization over GL(n, Z) and toral fibrations over a
//! finite-order base.
//!
//! All invariant sublattices are computed for `C = A^T`; a flag of
//! `C`-invariant saturated sublattices `W` gives `U = W^T` with
//! `U A U^{-1}` lower block triangular, so the first block of coordinates is
//! a factor of the map.

use std::fmt;

use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::cyclotomic::{cyclotomic_factors, lcm};
use crate::exact::{charpoly, cyclotomic, kernel_lattice, Int, IntLattice, IntMatrix, IntPoly, RatMatrix};
use crate::json;
use crate::toral::{mat_vec, AffineToralMap, SymReal};

/// Saturated `A`-invariant sublattice `ker g(A)^mult`, `mult` the multiplicity of `g`.
pub fn invariant_primitive_sublattice(a: &IntMatrix, g: &IntPoly) -> Result<IntLattice> {
    let cp = charpoly(a)?;
    let mult = cp.multiplicity_of(g);
    if mult == 0 || g.deg() == 0 {
        return Err(Error::NotAFactor);
    }
    Ok(kernel_lattice(&g.pow(mult).eval_matrix(a)))
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockTriangularization {
    /// Unimodular conjugator.
    pub u: IntMatrix,
    /// `U A U^{-1}`, lower block triangular.
    pub b: IntMatrix,
    pub block_sizes: Vec<usize>,
    pub block_charpolys: Vec<IntPoly>,
}

impl BlockTriangularization {
    pub fn block_offsets(&self) -> Vec<usize> {
        self.block_sizes
            .iter()
            .scan(0, |acc, d| {
                let s = *acc;
                *acc += d;
                Some(s)
            })
            .collect()
    }

    pub fn diagonal_block(&self, i: usize) -> IntMatrix {
        let o = self.block_offsets()[i];
        let d = self.block_sizes[i];
        self.b.submatrix(o..o + d, o..o + d)
    }

    /// Whether every block above the diagonal is zero.
    pub fn is_lower_block_triangular(&self) -> bool {
        let offs = self.block_offsets();
        for (bi, (&oi, &di)) in offs.iter().zip(&self.block_sizes).enumerate() {
            for (&oj, &dj) in offs.iter().zip(&self.block_sizes).skip(bi + 1) {
                for r in oi..oi + di {
                    for c in oj..oj + dj {
                        if !self.b[(r, c)].is_zero() {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    pub fn to_json(&self) -> Value {
        json!({
            "U": json::int_matrix(&self.u),
            "B": json::int_matrix(&self.b),
            "block_sizes": self.block_sizes,
            "block_charpolys": self.block_charpolys.iter().map(json::poly).collect::<Vec<_>>(),
        })
    }
}

/// Charpoly of `C` restricted to the span of the columns of `basis` (full column rank).
fn restricted_charpoly(c: &IntMatrix, basis: &IntMatrix) -> IntPoly {
    let r = basis.cols();
    if r == 0 {
        return IntPoly::one();
    }
    let ratb = basis.to_rat();
    let image = (c * basis).to_rat();
    let cols: Vec<Vec<_>> = (0..r)
        .map(|j| ratb.solve(&image.column(j)).expect("invariant sublattice"))
        .collect();
    let m = RatMatrix::from_columns(r, &cols);
    debug_assert!(m.is_integral());
    charpoly(&m.map(|x| x.to_integer())).expect("square")
}

/// Saturated `C`-invariant sublattice of rank `deg g` on which `C` has
/// characteristic polynomial `g`. Requires `g | charpoly(C)`.
fn split(c: &IntMatrix, g: &IntPoly) -> Result<IntLattice> {
    let n = c.rows();
    if g.deg() == 0 {
        return Ok(IntLattice::zero(n));
    }
    let k = kernel_lattice(&g.eval_matrix(c));
    if k.rank() == g.deg() && restricted_charpoly(c, k.basis()) == *g {
        return Ok(k);
    }
    if k.is_zero() {
        return Err(Error::NotAFactor);
    }
    // Krylov lattice of the first kernel vector: its charpoly mu divides g.
    let v = k.basis().column(0);
    let mut krylov = vec![v.clone()];
    let mut w = v;
    for _ in 1..g.deg() {
        w = c.mul_vec(&w);
        krylov.push(w.clone());
    }
    let s = crate::exact::saturate(&IntLattice::from_vectors(n, &krylov));
    let mu = restricted_charpoly(c, s.basis());
    let rest = g.div_exact(&mu).ok_or(Error::NotAFactor)?;
    let d = s.rank();
    let wm = s.complete_basis()?;
    let winv = wm.inverse_unimodular()?;
    let cq_full = &(&winv * c) * &wm;
    let cq = cq_full.submatrix(d..n, d..n);
    let t = split(&cq, &rest)?;
    // lift the quotient lattice back: columns W[:, d..] * t
    let tail = wm.submatrix(0..n, d..n);
    let lifted = &tail * t.basis();
    Ok(IntLattice::from_generators(&s.basis().hstack(&lifted)?))
}

/// Returns `W` (columns) with `W^{-1} C W` upper block triangular with diagonal
/// charpolys following `ordering`.
fn flag_basis(c: &IntMatrix, ordering: &[IntPoly]) -> Result<IntMatrix> {
    let n = c.rows();
    let Some((g, rest)) = ordering.split_first() else {
        return Ok(IntMatrix::identity(n));
    };
    let l = split(c, g)?;
    let d = l.rank();
    let w1 = l.complete_basis()?;
    let winv = w1.inverse_unimodular()?;
    let c1 = &(&winv * c) * &w1;
    let inner = flag_basis(&c1.submatrix(d..n, d..n), rest)?;
    let lift = IntMatrix::identity(d).direct_sum(&inner);
    Ok(&w1 * &lift)
}

/// Conjugates `A` into lower block triangular form with diagonal blocks of
/// characteristic polynomials `ordering[0], ordering[1], ...`.
pub fn block_triangularize(a: &IntMatrix, ordering: &[IntPoly]) -> Result<BlockTriangularization> {
    let cp = charpoly(a)?;
    let product = ordering.iter().fold(IntPoly::one(), |acc, g| &acc * g);
    if product != cp || ordering.iter().any(|g| !g.is_monic() || g.deg() == 0) {
        return Err(Error::Precondition(
            "ordering must consist of monic factors whose product is the characteristic polynomial".into(),
        ));
    }
    let w = flag_basis(&a.transpose(), ordering)?;
    let u = w.transpose();
    let uinv = u.inverse_unimodular()?;
    let b = &(&u * a) * &uinv;
    let out = BlockTriangularization {
        u,
        b,
        block_sizes: ordering.iter().map(IntPoly::deg).collect(),
        block_charpolys: ordering.to_vec(),
    };
    debug_assert!(out.is_lower_block_triangular());
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LayerProvenance {
    CyclotomicSplit,
    CentralSeriesSplit,
}

impl LayerProvenance {
    pub fn as_str(self) -> &'static str {
        match self {
            LayerProvenance::CyclotomicSplit => "cyclotomic-split",
            LayerProvenance::CentralSeriesSplit => "central-series-split",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TowerLayer {
    pub base_dim: usize,
    pub fiber_dim: usize,
    /// Coordinate change applied at this layer (rational for Lie algebra layers).
    pub conjugator: RatMatrix,
    pub provenance: LayerProvenance,
}

/// Ordered fibration layers; the product of the conjugators (last layer
/// leftmost) is the total coordinate change.
#[derive(Clone, Debug, PartialEq)]
pub struct TowerRecord {
    pub layers: Vec<TowerLayer>,
}

impl TowerRecord {
    pub fn total_conjugator(&self) -> Option<RatMatrix> {
        let mut it = self.layers.iter();
        let first = it.next()?.conjugator.clone();
        Some(it.fold(first, |acc, l| &l.conjugator * &acc))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "layers": self.layers.iter().map(|l| json!({
                "base_dim": l.base_dim,
                "fiber_dim": l.fiber_dim,
                "provenance": l.provenance.as_str(),
                "conjugator": json::rat_matrix(&l.conjugator),
            })).collect::<Vec<_>>(),
        })
    }
}

/// `T^{d2} -> T^n -> T^{d1}`: the map in block coordinates `x' = U x`, with a
/// finite-order linear part on the base.
#[derive(Clone, Debug, PartialEq)]
pub struct ToralFibration {
    pub base_dim: usize,
    pub fiber_dim: usize,
    /// Conductor `k` of the base block: `Phi_k(B_11) = 0`.
    pub base_conductor: u64,
    pub triangularization: BlockTriangularization,
    /// The map conjugated by `U`.
    pub conjugated: AffineToralMap,
    pub base: AffineToralMap,
    pub fiber_linear: IntMatrix,
    /// `B_21`: how base coordinates feed into the fiber.
    pub coupling: IntMatrix,
    pub fiber_translation: Vec<SymReal>,
    pub tower: TowerRecord,
}

impl ToralFibration {
    pub fn conjugator(&self) -> &IntMatrix {
        &self.triangularization.u
    }

    pub fn to_json(&self) -> Value {
        json!({
            "base_dim": self.base_dim,
            "fiber_dim": self.fiber_dim,
            "base_conductor": self.base_conductor,
            "triangularization": self.triangularization.to_json(),
            "base_linear": json::int_matrix(self.base.linear()),
            "base_translation": self.base.translation().iter().map(SymReal::to_json).collect::<Vec<_>>(),
            "fiber_linear": json::int_matrix(&self.fiber_linear),
            "coupling": json::int_matrix(&self.coupling),
            "fiber_translation": self.fiber_translation.iter().map(SymReal::to_json).collect::<Vec<_>>(),
            "tower": self.tower.to_json(),
        })
    }
}

impl fmt::Display for ToralFibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "T^{} -> T^{} -> T^{} (base conductor {}, base {}, fiber linear {})",
            self.fiber_dim,
            self.base_dim + self.fiber_dim,
            self.base_dim,
            self.base_conductor,
            self.base,
            self.fiber_linear
        )
    }
}

/// Splits off the `ker Phi_k(A^T)` factor, preferring `k = 1`, else the
/// smallest conductor dividing the characteristic polynomial.
pub fn split_cyclotomic_base(f: &AffineToralMap) -> Result<ToralFibration> {
    let a = f.linear();
    let n = f.dim();
    let cp = charpoly(a)?;
    let factors = cyclotomic_factors(&cp);
    let Some(&(k, _)) = factors.first() else {
        return Err(Error::Precondition(
            "map is K: the characteristic polynomial has no cyclotomic factor".into(),
        ));
    };
    let phi = cyclotomic(k)?;
    let c = a.transpose();
    let base_lattice = kernel_lattice(&phi.eval_matrix(&c));
    let d1 = base_lattice.rank();
    let w = base_lattice.complete_basis()?;
    let u = w.transpose();
    let uinv = u.inverse_unimodular()?;
    let b = &(&u * a) * &uinv;
    let g1 = phi.pow((d1 / phi.deg()) as u32);
    let g2 = cp.div_exact(&g1).ok_or(Error::NotAFactor)?;
    let tri = BlockTriangularization {
        u: u.clone(),
        b: b.clone(),
        block_sizes: if d1 < n { vec![d1, n - d1] } else { vec![d1] },
        block_charpolys: if d1 < n { vec![g1, g2] } else { vec![g1] },
    };
    debug_assert!(tri.is_lower_block_triangular());
    let conjugated = f.conjugate_by_unimodular(&u)?;
    let t = conjugated.translation().to_vec();
    let base = AffineToralMap::with_context(
        b.submatrix(0..d1, 0..d1),
        t[..d1].to_vec(),
        f.context().clone(),
    )?;
    let fiber_linear = b.submatrix(d1..n, d1..n);
    let coupling = b.submatrix(d1..n, 0..d1);
    Ok(ToralFibration {
        base_dim: d1,
        fiber_dim: n - d1,
        base_conductor: k,
        triangularization: tri,
        conjugated,
        base,
        fiber_linear,
        coupling,
        fiber_translation: t[d1..].to_vec(),
        tower: TowerRecord {
            layers: vec![TowerLayer {
                base_dim: d1,
                fiber_dim: n - d1,
                conjugator: u.to_rat(),
                provenance: LayerProvenance::CyclotomicSplit,
            }],
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasePeriod {
    Periodic(u64),
    NotPeriodic,
}

/// Order of a finite-order integer matrix, searched up to `cap`.
pub fn matrix_order(m: &IntMatrix, cap: u64) -> Option<u64> {
    let id = IntMatrix::identity(m.rows());
    let mut p = m.clone();
    for j in 1..=cap {
        if p == id {
            return Some(j);
        }
        p = &p * m;
    }
    None
}

/// Minimal `d` with `base^d = id`, or `NotPeriodic` when the base translation
/// has an irrational orbit.
pub fn base_period(fib: &ToralFibration) -> BasePeriod {
    let b11 = fib.base.linear();
    let Some(o) = matrix_order(b11, fib.base_conductor.max(1)) else {
        return BasePeriod::NotPeriodic;
    };
    // base^o = x + S_o t with S_o = sum_{j<o} B11^j
    let mut tau = vec![SymReal::zero(); fib.base_dim];
    let mut v = fib.base.translation().to_vec();
    for _ in 0..o {
        tau = tau.iter().zip(&v).map(|(x, y)| x + y).collect();
        v = mat_vec(b11, &v);
    }
    if tau.iter().any(|x| !x.is_rational()) {
        return BasePeriod::NotPeriodic;
    }
    let den = tau
        .iter()
        .map(|x| x.reduce_mod_one().rational_part().denom().clone())
        .fold(Int::one(), |a, b| num_integer::Integer::lcm(&a, &b));
    let den: u64 = den.try_into().unwrap_or(u64::MAX);
    BasePeriod::Periodic(o.saturating_mul(den))
}

/// Bound `order(B_11) * lcm(translation denominators)` on the base period.
pub fn base_period_bound(fib: &ToralFibration) -> Option<u64> {
    let o = matrix_order(fib.base.linear(), fib.base_conductor.max(1))?;
    let mut l = 1u64;
    for t in fib.base.translation() {
        if !t.is_rational() {
            return None;
        }
        let d: u64 = t.rational_part().denom().clone().try_into().ok()?;
        l = lcm(l, d);
    }
    Some(o * l)
}
