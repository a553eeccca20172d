//! Translational perturbations with a periodic base and explicit smooth
//! maps commuting with them.

pub mod expr;
pub mod witness;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{Int, IntMatrix, Rat};
use crate::json;
use crate::structure::{base_period, split_cyclotomic_base, BasePeriod, ToralFibration};
use crate::toral::{mat_vec, AffineToralMap, SymReal};

pub use expr::{
    commutes_exactly, NumericExpr, NumericFn, NumericMap, PeriodicFn, Profile, Ridge, SmoothMap, SmoothMapExpr};
pub use witness::{
    build_case1_witness, build_case2_witness, build_witness, diffc_embedding_generator, BumpSpec,
    Case1Witness, Case2Witness, CaseChoice, Witness,
};

/// Smallest approximation error we certify for an `f64` symbol value.
const FLOAT_FLOOR: f64 = 1e-15;

/// `f' = L_{a'} ∘ A` with a rational base translation.
#[derive(Clone, Debug, PartialEq)]
pub struct TranslationalPerturbation {
    pub original: AffineToralMap,
    pub perturbed: AffineToralMap,
    /// Rational upper bound on `max_i |a'_i - a_i|`.
    pub size: Rat,
    /// Base coordinates (in block coordinates) that were replaced.
    pub rationalized: Vec<usize>,
    pub denominators: Vec<Int>,
    /// Fibration of the perturbed map.
    pub fibration: ToralFibration,
    /// `d` with `base^d = id`.
    pub base_period: u64,
}

impl TranslationalPerturbation {
    pub fn to_json(&self) -> Value {
        json!({
            "perturbed_translation": self.perturbed.translation().iter().map(SymReal::to_json).collect::<Vec<_>>(),
            "size_bound": json::rat(&self.size),
            "rationalized_coordinates": self.rationalized,
            "denominators": json::int_vec(&self.denominators),
            "base_period": self.base_period,
            "fibration": self.fibration.to_json(),
        })
    }
}

/// First continued-fraction convergent `p/q` of `x` with a certified error
/// below `eps`, together with the bound `1/(q_k q_{k+1})`.
pub fn convergent_within(x: f64, eps: &Rat) -> Option<(Rat, Rat)> {
    let floor = Rat::new(Int::one(), Int::from(10u64.pow(15)));
    if !x.is_finite() || eps.to_f64().unwrap_or(0.0) < 10.0 * FLOAT_FLOOR {
        return None;
    }
    let (mut p0, mut q0) = (Int::one(), Int::zero());
    let a0 = x.floor();
    let (mut p1, mut q1) = (Int::from(a0 as i64), Int::one());
    let mut r = x - a0;
    for _ in 0..64 {
        if r < FLOAT_FLOOR {
            return Some((Rat::new(p1, q1), floor));
        }
        let inv = 1.0 / r;
        let a = inv.floor();
        r = inv - a;
        let ai = Int::from(a as i64);
        let (p2, q2) = (&ai * &p1 + &p0, &ai * &q1 + &q0);
        let bound = Rat::new(Int::one(), &q1 * &q2).max(floor.clone());
        if bound <= *eps {
            return Some((Rat::new(p1, q1), bound));
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
    }
    None
}

/// Replaces irrational base translations by close rationals so the base
/// becomes periodic.
pub fn rationalize_base(
    f: &AffineToralMap,
    fib: &ToralFibration,
    eps: &Rat,
) -> Result<TranslationalPerturbation> {
    if eps.is_negative() {
        return Err(Error::InvalidInput("epsilon must be non-negative".into()));
    }
    let u = fib.conjugator();
    let uinv = u.inverse_unimodular()?;
    let norm = Rat::from_integer(uinv.inf_norm());
    let local_eps = eps / &norm;
    let mut t = fib.conjugated.translation().to_vec();
    let mut rationalized = Vec::new();
    let mut denominators = Vec::new();
    let mut worst = Rat::zero();
    for i in 0..fib.base_dim {
        if t[i].is_rational() {
            continue;
        }
        if eps.is_zero() {
            return Err(Error::Precondition(format!(
                "base coordinate {i} is irrational ({}) and epsilon is 0",
                t[i]
            )));
        }
        let x = t[i].to_f64(f.context())?;
        let (r, bound) = convergent_within(x, &local_eps).ok_or_else(|| {
            Error::Precondition(format!(
                "no certified rational within {local_eps} of {x}: below the precision of the approximation"
            ))
        })?;
        denominators.push(r.denom().clone());
        t[i] = SymReal::rational(r);
        rationalized.push(i);
        worst = worst.max(bound);
    }
    let a_new = mat_vec(&uinv, &t);
    let perturbed = AffineToralMap::with_context(f.linear().clone(), a_new, f.context().clone())?;
    let fibration = split_cyclotomic_base(&perturbed)?;
    let BasePeriod::Periodic(d) = base_period(&fibration) else {
        return Err(Error::Precondition("base is still not periodic".into()));
    };
    Ok(TranslationalPerturbation {
        original: f.clone(),
        perturbed,
        size: worst * norm,
        rationalized,
        denominators,
        fibration,
        base_period: d,
    })
}

/// `x* = (I - A)^{-1} a`, the fixed point of `x -> A x + a` up to integers.
/// Not reduced mod 1, so `(I - A) x* = a` holds exactly.
pub fn twisted_fixed_point(a: &IntMatrix, t: &[SymReal]) -> Result<Vec<SymReal>> {
    let n = a.rows();
    if !a.is_square() || t.len() != n {
        return Err(Error::DimensionMismatch("twisted fixed point shape".into()));
    }
    let ima = &IntMatrix::identity(n) - a;
    if ima.det().is_zero() {
        return Err(Error::Precondition("1 is an eigenvalue of A".into()));
    }
    let inv = ima.to_rat().inverse().expect("nonzero determinant");
    Ok(rat_mat_vec(&inv, t))
}

pub(crate) fn rat_mat_vec(m: &crate::exact::RatMatrix, v: &[SymReal]) -> Vec<SymReal> {
    (0..m.rows())
        .map(|i| {
            v.iter()
                .enumerate()
                .fold(SymReal::zero(), |acc, (j, x)| &acc + &x.scale(&m[(i, j)]))
        })
        .collect()
}
