//! Numerical and brute-force cross-checks: commutation residuals on grids,
//! invariance of vector fields, and a character-search ergodicity oracle.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::cyclotomic::{conductors_up_to, lcm};
use crate::exact::{cyclotomic_part, Int, IntMatrix, IntPoly};
use crate::spectral::unit_circle_non_torsion_eigenvalues;
use crate::toral::{dot, AffineToralMap, SymReal, SymbolContext};

/// Residuals at or below this count as a pass.
pub const PASS_THRESHOLD: f64 = 1e-9;
pub const DEFAULT_PER_AXIS: usize = 32;
pub const MAX_GRID_POINTS: usize = 1_000_000;

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// A deterministic point set in `[0, 1)^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridSpec {
    dim: usize,
    per_axis: usize,
    seed: u64,
}

impl GridSpec {
    pub fn new(dim: usize, per_axis: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("grid dimension must be positive".into()));
        }
        if per_axis == 0 {
            return Err(Error::InvalidInput("grid needs at least one point per axis".into()));
        }
        Ok(GridSpec { dim, per_axis, seed })
    }

    pub fn with_default(dim: usize) -> Result<Self> {
        Self::new(dim, DEFAULT_PER_AXIS, 0)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    /// Number of points: a full product grid up to three axes, otherwise a
    /// Kronecker sequence of the same size; capped at [`MAX_GRID_POINTS`].
    pub fn len(&self) -> usize {
        let k = self.dim.min(3) as u32;
        self.per_axis
            .checked_pow(k)
            .map_or(MAX_GRID_POINTS, |t| t.min(MAX_GRID_POINTS))
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn offset(&self, axis: usize) -> f64 {
        let s = (self.seed as f64 + axis as f64 + 1.0) * GOLDEN;
        (s - s.floor()) / self.per_axis as f64
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        let total = self.len();
        let offsets: Vec<f64> = (0..self.dim).map(|i| self.offset(i)).collect();
        if self.dim <= 3 {
            let step = 1.0 / self.per_axis as f64;
            (0..total)
                .map(|mut idx| {
                    (0..self.dim)
                        .map(|i| {
                            let c = idx % self.per_axis;
                            idx /= self.per_axis;
                            offsets[i] + c as f64 * step
                        })
                        .collect()
                })
                .collect()
        } else {
            let alphas: Vec<f64> = PRIMES
                .iter()
                .cycle()
                .take(self.dim)
                .enumerate()
                .map(|(i, p)| {
                    let r = (*p as f64).sqrt() * (1 + i / PRIMES.len()) as f64;
                    r - r.floor()
                })
                .collect();
            (0..total)
                .map(|j| {
                    (0..self.dim)
                        .map(|i| {
                            let v = offsets[i] + j as f64 * alphas[i];
                            v - v.floor()
                        })
                        .collect()
                })
                .collect()
        }
    }
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// `max_i min(|d_i|, 1 - |d_i|)` for `d = x - y` reduced mod 1.
pub fn toral_distance(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| {
            let d = (a - b).rem_euclid(1.0);
            d.min(1.0 - d)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub max: f64,
    /// A point attaining the maximum.
    pub at: Vec<f64>,
    pub points: usize,
}

impl ResidualReport {
    pub fn passes(&self, threshold: f64) -> bool {
        self.max <= threshold
    }

    pub fn to_json(&self, threshold: f64) -> Value {
        json!({
            "max_residual": self.max,
            "at": self.at,
            "points": self.points,
            "threshold": threshold,
            "pass": self.passes(threshold),
        })
    }
}

fn max_over_grid<F>(grid: &GridSpec, f: F) -> ResidualReport
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let pts = grid.points();
    let n = pts.len();
    // ties broken by index so the reported point does not depend on scheduling
    let (max, idx) = pts
        .par_iter()
        .enumerate()
        .map(|(i, x)| (f(x), i))
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| match a.0.total_cmp(&b.0) {
                std::cmp::Ordering::Less => b,
                std::cmp::Ordering::Greater => a,
                std::cmp::Ordering::Equal => (a.0, a.1.min(b.1)),
            },
        );
    ResidualReport {
        max: if n == 0 { 0.0 } else { max },
        at: pts.get(idx).cloned().unwrap_or_default(),
        points: n,
    }
}

/// Sup over the grid of the toral distance between `f(g(x))` and `g(f(x))`.
pub fn commutation_residual<F, G>(f: F, g: G, grid: &GridSpec) -> ResidualReport
where
    F: Fn(&[f64]) -> Vec<f64> + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Sync,
{
    max_over_grid(grid, |x| toral_distance(&f(&g(x)), &g(&f(x))))
}

/// Numeric evaluator for an affine map, with symbols resolved.
pub fn affine_evaluator(f: &AffineToralMap) -> Result<impl Fn(&[f64]) -> Vec<f64> + Sync> {
    let a = f.numeric_translation()?;
    let m = f.linear().to_f64();
    Ok(move |x: &[f64]| crate::toral::eval_affine(&m, &a, x))
}

/// Sup-norm of `A V(x) - V(f(x))` over the grid.
pub fn vector_field_invariance<V>(f: &AffineToralMap, v: V, grid: &GridSpec) -> Result<ResidualReport>
where
    V: Fn(&[f64]) -> Vec<f64> + Sync,
{
    let fx = affine_evaluator(f)?;
    let m = f.linear().to_f64();
    Ok(max_over_grid(grid, |x| {
        let vx = v(x);
        let lhs: Vec<f64> = m
            .iter()
            .map(|row| row.iter().zip(&vx).map(|(a, b)| a * b).sum())
            .collect();
        let rhs = v(&fx(x));
        lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }))
}

#[derive(Clone, Debug, PartialEq)]
pub enum OracleOutcome {
    NonErgodicFound { k: Vec<Int>, period: u64 },
    NoneUpToHeight(Int),
}

impl OracleOutcome {
    pub fn is_ergodic(&self) -> bool {
        matches!(self, OracleOutcome::NoneUpToHeight(_))
    }
}

/// Exponent of the finite-order part of `GL(n, Z)`: every periodic character
/// has period dividing it.
pub fn period_cap(n: usize) -> u64 {
    conductors_up_to(n).into_iter().fold(1, lcm)
}

/// Searches every character with `|k|_inf <= height` for a finite orbit whose
/// summed pairing with the translation is an integer.
pub fn ergodicity_oracle(f: &AffineToralMap, height: u64) -> OracleOutcome {
    let n = f.dim();
    let ct = f.linear().transpose();
    let cap = period_cap(n);
    let small: Option<Vec<Vec<i128>>> = (0..n)
        .map(|i| (0..n).map(|j| i128::try_from(&ct[(i, j)]).ok()).collect())
        .collect();
    let test = |c: &Vec<i64>| -> Option<(Vec<Int>, u64)> {
        let q = small
            .as_ref()
            .and_then(|m| small_orbit_period(m, c, cap))
            .unwrap_or_else(|| big_orbit_period(&ct, c, cap))?;
        let k: Vec<Int> = c.iter().map(|&x| BigInt::from(x)).collect();
        let mut v = k.clone();
        let mut sum = SymReal::zero();
        for _ in 0..q {
            sum = &sum + &dot(&v, f.translation());
            v = ct.mul_vec(&v);
        }
        sum.is_integer().then_some((k, q))
    };
    for s in 1..=height.min(i64::MAX as u64) as i64 {
        let mut shell = sup_norm_shell(n, s);
        shell.sort_unstable_by(|a, b| b.cmp(a));
        if let Some((k, period)) = shell.par_iter().find_map_first(test) {
            return OracleOutcome::NonErgodicFound { k, period };
        }
    }
    OracleOutcome::NoneUpToHeight(Int::from(height))
}

/// All `v` in `Z^n` with `|v|_inf = s`, unordered.
fn sup_norm_shell(n: usize, s: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    // `i` is the first coordinate of absolute value `s`
    for i in 0..n {
        let mut v = vec![0i64; n];
        shell_fill(&mut v, 0, i, s, &mut out);
    }
    out
}

fn shell_fill(v: &mut Vec<i64>, pos: usize, first: usize, s: i64, out: &mut Vec<Vec<i64>>) {
    if pos == v.len() {
        out.push(v.clone());
        return;
    }
    let range: Vec<i64> = match pos.cmp(&first) {
        std::cmp::Ordering::Less => (1 - s..s).collect(),
        std::cmp::Ordering::Equal => vec![-s, s],
        std::cmp::Ordering::Greater => (-s..=s).collect(),
    };
    for x in range {
        v[pos] = x;
        shell_fill(v, pos + 1, first, s, out);
    }
}

/// Least `q <= cap` with `m^q k = k`; the outer `None` means overflow.
fn small_orbit_period(m: &[Vec<i128>], k: &[i64], cap: u64) -> Option<Option<u64>> {
    let k: Vec<i128> = k.iter().map(|&x| i128::from(x)).collect();
    let mut v = k.clone();
    for q in 1..=cap {
        v = m
            .iter()
            .map(|row| {
                row.iter()
                    .zip(&v)
                    .try_fold(0i128, |acc, (a, b)| acc.checked_add(a.checked_mul(*b)?))
            })
            .collect::<Option<_>>()?;
        if v == k {
            return Some(Some(q));
        }
    }
    Some(None)
}

fn big_orbit_period(m: &IntMatrix, k: &[i64], cap: u64) -> Option<u64> {
    let k: Vec<Int> = k.iter().map(|&x| BigInt::from(x)).collect();
    let mut v = k.clone();
    for q in 1..=cap {
        v = m.mul_vec(&v);
        if v == k {
            return Some(q);
        }
    }
    None
}

/// Exact test `f^d = id`; `d = 0` is rejected as meaningless.
pub fn base_periodicity_check(f: &AffineToralMap, d: u64) -> bool {
    d > 0 && i64::try_from(d).is_ok_and(|d| f.power(d).is_identity())
}

/// `x^4 + a x^3 + b x^2 + a x + 1` with no cyclotomic factor and both unit
/// circle and off-circle roots, searching `|a|, |b| <= bound` in order.
pub fn find_salem_quartic(bound: i64) -> Option<IntPoly> {
    let mut cands: Vec<(i64, i64)> = (-bound..=bound)
        .flat_map(|a| (-bound..=bound).map(move |b| (a, b)))
        .collect();
    cands.sort_by_key(|&(a, b)| (a.abs().max(b.abs()), a, b));
    cands.into_iter().find_map(|(a, b)| {
        let p = IntPoly::from_i64(&[1, a, b, a, 1]).ok()?;
        if !cyclotomic_part(&p).is_one() {
            return None;
        }
        let c = p.companion().ok()?;
        let on = unit_circle_non_torsion_eigenvalues(&c).ok()?;
        (on.len() == 2).then_some(p)
    })
}

/// The map `(x, t) -> (C x, t + theta)` on `T^5`, with `C` the companion of a
/// quartic whose unit-circle eigenvalues are `e^{±2πi theta}`.
#[derive(Clone, Debug)]
pub struct WaltersFixture {
    pub quartic: IntPoly,
    pub map: AffineToralMap,
    /// `theta` in `(0, 1/2)`.
    pub theta: f64,
    /// Complex eigenvector of `C` for `e^{2πi theta}`.
    pub eigenvector: Vec<Complex64>,
}

pub const WALTERS_SYMBOL: &str = "theta";

pub fn walters_fixture(quartic: &IntPoly) -> Result<WaltersFixture> {
    if quartic.deg() != 4 {
        return Err(Error::InvalidInput("expected a quartic".into()));
    }
    let c = quartic.companion()?;
    let lambda = unit_circle_non_torsion_eigenvalues(&c)?
        .into_iter()
        .find(|z| z.im > 0.0)
        .ok_or_else(|| Error::Precondition("no non-torsion unit-circle eigenvalue".into()))?;
    let theta = lambda.arg() / std::f64::consts::TAU;
    let m: Vec<Vec<Complex64>> = c
        .to_f64()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, x)| Complex64::new(*x, 0.0) - if i == j { lambda } else { Complex64::zero() })
                .collect()
        })
        .collect();
    let w = complex_kernel_vector(m)
        .ok_or_else(|| Error::Precondition("eigenvector solve failed".into()))?;
    let ctx = SymbolContext::new().with(WALTERS_SYMBOL, theta)?;
    let mut tr = vec![SymReal::zero(); 4];
    tr.push(SymReal::symbol(WALTERS_SYMBOL));
    let map = AffineToralMap::with_context(c.direct_sum(&IntMatrix::identity(1)), tr, ctx)?;
    Ok(WaltersFixture {
        quartic: quartic.clone(),
        map,
        theta,
        eigenvector: w,
    })
}

impl WaltersFixture {
    /// `g(x, t) = (x + Re(s e^{2πi t} w), t)`.
    pub fn generator(&self, s: Complex64) -> impl Fn(&[f64]) -> Vec<f64> + Sync + '_ {
        move |x: &[f64]| {
            let rot = Complex64::from_polar(1.0, std::f64::consts::TAU * x[4]) * s;
            let mut out: Vec<f64> = x[..4]
                .iter()
                .zip(&self.eigenvector)
                .map(|(xi, wi)| (xi + (rot * wi).re).rem_euclid(1.0))
                .collect();
            out.push(x[4]);
            out
        }
    }
}

/// A unit-norm kernel vector of a singular square matrix, by elimination
/// with partial pivoting and the last free column set to 1.
fn complex_kernel_vector(mut m: Vec<Vec<Complex64>>) -> Option<Vec<Complex64>> {
    let n = m.len();
    let tol = 1e-9;
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let p = (row..n).max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))?;
        if m[p][col].norm() < tol {
            continue;
        }
        m.swap(row, p);
        let piv = m[row][col];
        for x in m[row].iter_mut() {
            *x /= piv;
        }
        for r in 0..n {
            if r != row {
                let fct = m[r][col];
                if fct != Complex64::zero() {
                    for c in 0..n {
                        let v = m[row][c];
                        m[r][c] -= fct * v;
                    }
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == n {
            break;
        }
    }
    let free = (0..n).rev().find(|c| !pivots.contains(c))?;
    let mut v = vec![Complex64::zero(); n];
    v[free] = Complex64::new(1.0, 0.0);
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = -m[r][free];
    }
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    Some(v.into_iter().map(|z| z / norm).collect())
}
