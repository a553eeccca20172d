//! Closed-form smooth self-maps of the torus: `x -> L x + a + P(x) mod 1`
//! with `P` a vector of periodic functions.
//!
//! A periodic function is a sum of ridge terms `c * g(m.x + p)` with `g` an
//! even 1-periodic profile: either `cos(2π θ)` or a C^∞ bump supported on
//! `|θ| < h (mod 1)`. Precomposition with an affine map only changes `m` and
//! `p`, so commutation with affine maps can be decided on canonical forms.

use std::f64::consts::{E, TAU};
use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{Int, IntMatrix, Rat};
use crate::json;
use crate::toral::{dot, mat_vec, reduce_vec, vec_add, AffineToralMap, SymReal, SymbolContext};

/// Upper bound for `max |d/du e*exp(-1/(1-u^2))|` on `(-1, 1)`.
pub const BUMP_SLOPE: f64 = 2.1704;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Profile {
    /// `cos(2π θ)`.
    Cos,
    /// `e * exp(-1 / (1 - (θ/h)^2))` for `|θ| < h`, zero elsewhere, peak 1.
    Bump(Rat),
}

impl Profile {
    /// Sup of `|g'|` per unit of `θ`.
    pub fn slope_bound(&self) -> f64 {
        match self {
            Profile::Cos => TAU,
            Profile::Bump(h) => BUMP_SLOPE / h.to_f64().unwrap_or(f64::NAN),
        }
    }
}

fn bump_value(theta: f64, h: f64) -> f64 {
    let u = theta - theta.round();
    if u.abs() >= h {
        return 0.0;
    }
    let r = u / h;
    E * (-1.0 / (1.0 - r * r)).exp()
}

/// One ridge term `coeff * profile(freq . x + phase)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Ridge {
    pub coeff: Rat,
    pub freq: Vec<Int>,
    pub phase: SymReal,
    pub profile: Profile,
}

impl Ridge {
    fn key(&self) -> (Vec<Int>, Profile, String) {
        (self.freq.clone(), self.profile.clone(), self.phase.to_string())
    }

    fn canonical(mut self) -> Ridge {
        if self.freq.iter().find(|x| !x.is_zero()).is_some_and(Signed::is_negative) {
            self.freq = self.freq.iter().map(|x| -x).collect();
            self.phase = -&self.phase;
        }
        self.phase = self.phase.reduce_mod_one();
        let half = Rat::new(Int::one(), Int::from(2));
        if self.profile == Profile::Cos && *self.phase.rational_part() >= half {
            self.phase = &self.phase - &SymReal::rational(half);
            self.coeff = -self.coeff;
        }
        self
    }

    pub fn to_json(&self) -> Value {
        let profile = match &self.profile {
            Profile::Cos => json!("cos"),
            Profile::Bump(h) => json!({"bump": json::rat(h)}),
        };
        json!({
            "coeff": json::rat(&self.coeff),
            "freq": json::int_vec(&self.freq),
            "phase": self.phase.to_json(),
            "profile": profile,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let o = v
            .as_object()
            .ok_or_else(|| Error::InvalidInput(format!("ridge term must be an object: {v}")))?;
        let get = |k: &str| {
            o.get(k)
                .ok_or_else(|| Error::InvalidInput(format!("ridge term is missing {k:?}")))
        };
        let freq = get("freq")?
            .as_array()
            .ok_or_else(|| Error::InvalidInput("\"freq\" must be an array".into()))?
            .iter()
            .map(json::parse_int)
            .collect::<Result<_>>()?;
        let profile = match get("profile")? {
            Value::String(s) if s == "cos" => Profile::Cos,
            Value::Object(b) if b.len() == 1 && b.contains_key("bump") => {
                Profile::Bump(json::parse_rat(&b["bump"])?)
            }
            other => return Err(Error::InvalidInput(format!("unknown profile {other}"))),
        };
        Ok(Ridge {
            coeff: json::parse_rat(get("coeff")?)?,
            freq,
            phase: SymReal::from_json(get("phase")?)?,
            profile,
        })
    }
}

fn linear_form(freq: &[Int], phase: &SymReal) -> String {
    let mut s = String::new();
    for (i, m) in freq.iter().enumerate() {
        if m.is_zero() {
            continue;
        }
        let sign = if m.is_negative() { "-" } else { "+" };
        let mag = m.abs();
        if s.is_empty() {
            if m.is_negative() {
                s.push('-');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        if !mag.is_one() {
            s.push_str(&format!("{mag}*"));
        }
        s.push_str(&format!("x{}", i + 1));
    }
    if !phase.is_zero() || s.is_empty() {
        if s.is_empty() {
            s = phase.to_string();
        } else {
            s.push_str(&format!(" + ({phase})"));
        }
    }
    s
}

impl fmt::Display for Ridge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let arg = linear_form(&self.freq, &self.phase);
        match &self.profile {
            Profile::Cos => write!(f, "{}*cos(2π({arg}))", self.coeff),
            Profile::Bump(h) => write!(f, "{}*bump[{h}]({arg})", self.coeff),
        }
    }
}

/// A canonical sum of ridge terms on `T^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicFn {
    n: usize,
    terms: Vec<Ridge>,
}

impl PeriodicFn {
    pub fn new(n: usize, terms: Vec<Ridge>) -> Result<Self> {
        for t in &terms {
            if t.freq.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "frequency of length {} on T^{n}",
                    t.freq.len()
                )));
            }
            if let Profile::Bump(h) = &t.profile {
                if !h.is_positive() || *h > Rat::new(Int::one(), Int::from(2)) {
                    return Err(Error::InvalidInput(format!("bump half-width {h} not in (0, 1/2]")));
                }
            }
        }
        let mut terms: Vec<Ridge> = terms
            .into_iter()
            .filter(|t| !t.coeff.is_zero())
            .map(Ridge::canonical)
            .collect();
        terms.sort_by_key(|t| t.key());
        let mut merged: Vec<Ridge> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.key() == t.key() => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        Ok(PeriodicFn { n, terms: merged })
    }

    pub fn zero(n: usize) -> Self {
        PeriodicFn { n, terms: Vec::new() }
    }

    /// `coeff * cos(2π(freq . x + phase))`.
    pub fn cos(coeff: Rat, freq: Vec<Int>, phase: Rat) -> Self {
        let n = freq.len();
        PeriodicFn::new(
            n,
            vec![Ridge { coeff, freq, phase: SymReal::rational(phase), profile: Profile::Cos }],
        )
        .expect("lengths agree")
    }

    /// `coeff * sin(2π(freq . x + phase))`.
    pub fn sin(coeff: Rat, freq: Vec<Int>, phase: Rat) -> Self {
        PeriodicFn::cos(coeff, freq, phase - Rat::new(Int::one(), Int::from(4)))
    }

    /// `coeff * bump((freq . x - center) / half_width)`.
    pub fn bump(coeff: Rat, freq: Vec<Int>, center: Rat, half_width: Rat) -> Result<Self> {
        let n = freq.len();
        PeriodicFn::new(
            n,
            vec![Ridge {
                coeff,
                freq,
                phase: SymReal::rational(-center),
                profile: Profile::Bump(half_width),
            }],
        )
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[Ridge] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &PeriodicFn) -> Result<PeriodicFn> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch("adding functions on different tori".into()));
        }
        PeriodicFn::new(self.n, self.terms.iter().chain(&other.terms).cloned().collect())
    }

    pub fn scale(&self, c: &Rat) -> PeriodicFn {
        PeriodicFn::new(
            self.n,
            self.terms
                .iter()
                .map(|t| Ridge { coeff: &t.coeff * c, ..t.clone() })
                .collect(),
        )
        .expect("same shape")
    }

    /// `x -> self(M x + c)` with `M` of shape `dim x k`.
    pub fn compose_affine(&self, m: &IntMatrix, c: &[SymReal]) -> Result<PeriodicFn> {
        if m.rows() != self.n || c.len() != self.n {
            return Err(Error::DimensionMismatch("affine substitution shape".into()));
        }
        let mt = m.transpose();
        let terms = self
            .terms
            .iter()
            .map(|t| Ridge {
                coeff: t.coeff.clone(),
                freq: mt.mul_vec(&t.freq),
                phase: &t.phase + &dot(&t.freq, c),
                profile: t.profile.clone(),
            })
            .collect();
        PeriodicFn::new(m.cols(), terms)
    }

    /// Bound on `sum_i |d self / d x_i|`.
    pub fn slope_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let l1: f64 = t.freq.iter().map(|m| m.abs().to_f64().unwrap_or(f64::INFINITY)).sum();
                t.coeff.abs().to_f64().unwrap_or(f64::INFINITY) * t.profile.slope_bound() * l1
            })
            .sum()
    }

    /// Whether every frequency vector lies in `d Z^n`.
    pub fn frequencies_divisible_by(&self, d: u64) -> bool {
        let d = Int::from(d);
        self.terms
            .iter()
            .all(|t| t.freq.iter().all(|m| (m % &d).is_zero()))
    }

    pub fn numeric(&self, ctx: &SymbolContext) -> Result<NumericFn> {
        let terms = self
            .terms
            .iter()
            .map(|t| {
                Ok(NumericRidge {
                    coeff: t.coeff.to_f64().unwrap_or(f64::NAN),
                    freq: t.freq.iter().map(|m| m.to_f64().unwrap_or(f64::NAN)).collect(),
                    phase: t.phase.to_f64(ctx)?,
                    half_width: match &t.profile {
                        Profile::Cos => None,
                        Profile::Bump(h) => Some(h.to_f64().unwrap_or(f64::NAN)),
                    },
                })
            })
            .collect::<Result<_>>()?;
        Ok(NumericFn { terms })
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.terms.iter().map(Ridge::to_json).collect())
    }

    pub fn from_json(n: usize, v: &Value) -> Result<Self> {
        let terms = v
            .as_array()
            .ok_or_else(|| Error::InvalidInput("periodic function must be an array of terms".into()))?
            .iter()
            .map(Ridge::from_json)
            .collect::<Result<_>>()?;
        PeriodicFn::new(n, terms)
    }
}

impl fmt::Display for PeriodicFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct NumericRidge {
    coeff: f64,
    freq: Vec<f64>,
    phase: f64,
    half_width: Option<f64>,
}

/// A periodic function with all symbols substituted.
#[derive(Clone, Debug)]
pub struct NumericFn {
    terms: Vec<NumericRidge>,
}

impl NumericFn {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let theta = t.freq.iter().zip(x).map(|(m, xi)| m * xi).sum::<f64>() + t.phase;
                let g = match t.half_width {
                    None => (TAU * theta).cos(),
                    Some(h) => bump_value(theta, h),
                };
                t.coeff * g
            })
            .sum()
    }
}

/// `out_i = sum_j M_ij p_j`.
pub fn combine(m: &IntMatrix, p: &[PeriodicFn], n: usize) -> Result<Vec<PeriodicFn>> {
    if m.cols() != p.len() {
        return Err(Error::DimensionMismatch("combination width".into()));
    }
    (0..m.rows())
        .map(|i| {
            p.iter().enumerate().try_fold(PeriodicFn::zero(n), |acc, (j, pj)| {
                let c = &m[(i, j)];
                if c.is_zero() {
                    Ok(acc)
                } else {
                    acc.add(&pj.scale(&Rat::from_integer(c.clone())))
                }
            })
        })
        .collect()
}

/// `x -> L x + a + P(x) mod 1` on `T^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothMap {
    linear: IntMatrix,
    translation: Vec<SymReal>,
    perturbation: Vec<PeriodicFn>,
}

impl SmoothMap {
    pub fn new(linear: IntMatrix, translation: Vec<SymReal>, perturbation: Vec<PeriodicFn>) -> Result<Self> {
        let n = linear.rows();
        if !linear.is_square() || translation.len() != n || perturbation.len() != n {
            return Err(Error::DimensionMismatch("smooth map shape".into()));
        }
        if perturbation.iter().any(|p| p.dim() != n) {
            return Err(Error::DimensionMismatch("perturbation on a different torus".into()));
        }
        Ok(SmoothMap {
            linear,
            translation: reduce_vec(&translation),
            perturbation,
        })
    }

    pub fn identity(n: usize) -> Self {
        SmoothMap {
            linear: IntMatrix::identity(n),
            translation: vec![SymReal::zero(); n],
            perturbation: vec![PeriodicFn::zero(n); n],
        }
    }

    pub fn from_affine(f: &AffineToralMap) -> Self {
        SmoothMap::new(
            f.linear().clone(),
            f.translation().to_vec(),
            vec![PeriodicFn::zero(f.dim()); f.dim()],
        )
        .expect("consistent shape")
    }

    /// `x -> x + P(x)`.
    pub fn near_identity(perturbation: Vec<PeriodicFn>) -> Result<Self> {
        let n = perturbation.len();
        SmoothMap::new(IntMatrix::identity(n), vec![SymReal::zero(); n], perturbation)
    }

    pub fn dim(&self) -> usize {
        self.linear.rows()
    }

    pub fn linear(&self) -> &IntMatrix {
        &self.linear
    }

    pub fn translation(&self) -> &[SymReal] {
        &self.translation
    }

    pub fn perturbation(&self) -> &[PeriodicFn] {
        &self.perturbation
    }

    pub fn is_affine(&self) -> bool {
        self.perturbation.iter().all(PeriodicFn::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.linear.is_identity() && self.translation.iter().all(SymReal::is_zero) && self.is_affine()
    }

    /// `self ∘ g`, closed form when either side is affine.
    pub fn compose(&self, g: &SmoothMap) -> Result<SmoothMap> {
        let n = self.dim();
        if g.dim() != n {
            return Err(Error::DimensionMismatch("composing maps on different tori".into()));
        }
        let linear = &self.linear * &g.linear;
        let translation = vec_add(&mat_vec(&self.linear, &g.translation), &self.translation);
        let perturbation = if self.is_affine() {
            combine(&self.linear, &g.perturbation, n)?
        } else if g.is_affine() {
            self.perturbation
                .iter()
                .map(|p| p.compose_affine(&g.linear, &g.translation))
                .collect::<Result<_>>()?
        } else {
            return Err(Error::Precondition(
                "no closed form for a composition of two non-affine maps".into(),
            ));
        };
        SmoothMap::new(linear, translation, perturbation)
    }

    /// `V^{-1} ∘ self ∘ V` for a unimodular `V`.
    pub fn conjugate_by(&self, v: &IntMatrix) -> Result<SmoothMap> {
        let vinv = v.inverse_unimodular()?;
        let n = self.dim();
        let zero = vec![SymReal::zero(); n];
        let left = SmoothMap::new(vinv, zero.clone(), vec![PeriodicFn::zero(n); n])?;
        let right = SmoothMap::new(v.clone(), zero, vec![PeriodicFn::zero(n); n])?;
        left.compose(&self.compose(&right)?)
    }

    /// Equality as maps of the torus, decided on canonical forms.
    pub fn same_map(&self, other: &SmoothMap) -> bool {
        self.linear == other.linear
            && self
                .translation
                .iter()
                .zip(&other.translation)
                .all(|(a, b)| (a - b).is_integer())
            && self.perturbation == other.perturbation
    }

    /// Bound on the sup of `||D P||_inf`.
    pub fn slope_bound(&self) -> f64 {
        self.perturbation
            .iter()
            .map(PeriodicFn::slope_bound)
            .fold(0.0, f64::max)
    }

    pub fn numeric(&self, ctx: &SymbolContext) -> Result<NumericMap> {
        Ok(NumericMap {
            linear: self.linear.to_f64(),
            translation: self
                .translation
                .iter()
                .map(|t| t.to_f64(ctx))
                .collect::<Result<_>>()?,
            perturbation: self
                .perturbation
                .iter()
                .map(|p| p.numeric(ctx))
                .collect::<Result<_>>()?,
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "kind": "map",
            "linear": json::int_matrix(&self.linear),
            "translation": self.translation.iter().map(SymReal::to_json).collect::<Vec<_>>(),
            "perturbation": self.perturbation.iter().map(PeriodicFn::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let linear = json::parse_int_matrix(
            v.get("linear")
                .ok_or_else(|| Error::InvalidInput("map is missing \"linear\"".into()))?,
        )?;
        let n = linear.rows();
        let list = |k: &str| {
            v.get(k)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidInput(format!("map needs an array {k:?}")))
        };
        let translation = list("translation")?
            .iter()
            .map(SymReal::from_json)
            .collect::<Result<_>>()?;
        let perturbation = list("perturbation")?
            .iter()
            .map(|p| PeriodicFn::from_json(n, p))
            .collect::<Result<_>>()?;
        SmoothMap::new(linear, translation, perturbation)
    }
}

impl fmt::Display for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        for i in 0..n {
            if i > 0 {
                f.write_str("; ")?;
            }
            let lin = linear_form(&self.linear.row(i), &self.translation[i]);
            write!(f, "x{}' = {lin}", i + 1)?;
            if !self.perturbation[i].is_zero() {
                write!(f, " + {}", self.perturbation[i])?;
            }
        }
        Ok(())
    }
}

/// A smooth map with symbols substituted, ready for grid evaluation.
#[derive(Clone, Debug)]
pub struct NumericMap {
    linear: Vec<Vec<f64>>,
    translation: Vec<f64>,
    perturbation: Vec<NumericFn>,
}

impl NumericMap {
    /// Image reduced to `[0, 1)^n`.
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.linear
            .iter()
            .zip(&self.translation)
            .zip(&self.perturbation)
            .map(|((row, a), p)| {
                let v = row.iter().zip(x).map(|(m, xi)| m * xi).sum::<f64>() + a + p.eval(x);
                v.rem_euclid(1.0)
            })
            .collect()
    }
}

/// Numeric counterpart of [`SmoothMapExpr`].
#[derive(Clone, Debug)]
pub enum NumericExpr {
    Map(NumericMap),
    Compose(Vec<NumericExpr>),
}

impl NumericExpr {
    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self {
            NumericExpr::Map(m) => m.eval(x),
            NumericExpr::Compose(parts) => parts.iter().rev().fold(x.to_vec(), |acc, p| p.eval(&acc)),
        }
    }
}

/// Expression tree: a closed-form map, or a composition applied right to left.
#[derive(Clone, Debug, PartialEq)]
pub enum SmoothMapExpr {
    Map(SmoothMap),
    Compose(Vec<SmoothMapExpr>),
}

impl SmoothMapExpr {
    pub fn dim(&self) -> usize {
        match self {
            SmoothMapExpr::Map(m) => m.dim(),
            SmoothMapExpr::Compose(v) => v.first().map_or(0, SmoothMapExpr::dim),
        }
    }

    /// Collapses compositions wherever a closed form exists.
    pub fn simplify(&self) -> SmoothMapExpr {
        match self {
            SmoothMapExpr::Map(m) => SmoothMapExpr::Map(m.clone()),
            SmoothMapExpr::Compose(parts) => {
                let mut out: Vec<SmoothMapExpr> = Vec::new();
                for p in parts.iter().map(SmoothMapExpr::simplify) {
                    let merged = match (out.last(), &p) {
                        (Some(SmoothMapExpr::Map(a)), SmoothMapExpr::Map(b)) => a.compose(b).ok(),
                        _ => None,
                    };
                    match merged {
                        Some(m) => *out.last_mut().expect("nonempty") = SmoothMapExpr::Map(m),
                        None => out.push(p),
                    }
                }
                if out.len() == 1 {
                    out.pop().expect("one element")
                } else {
                    SmoothMapExpr::Compose(out)
                }
            }
        }
    }

    pub fn as_map(&self) -> Option<&SmoothMap> {
        match self {
            SmoothMapExpr::Map(m) => Some(m),
            SmoothMapExpr::Compose(_) => None,
        }
    }

    pub fn eval(&self, x: &[f64], ctx: &SymbolContext) -> Result<Vec<f64>> {
        Ok(self.numeric(ctx)?.eval(x))
    }

    pub fn numeric(&self, ctx: &SymbolContext) -> Result<NumericExpr> {
        Ok(match self {
            SmoothMapExpr::Map(m) => NumericExpr::Map(m.numeric(ctx)?),
            SmoothMapExpr::Compose(parts) => NumericExpr::Compose(
                parts.iter().map(|p| p.numeric(ctx)).collect::<Result<_>>()?,
            ),
        })
    }

    pub fn to_json(&self) -> Value {
        match self {
            SmoothMapExpr::Map(m) => m.to_json(),
            SmoothMapExpr::Compose(parts) => json!({
                "kind": "compose",
                "maps": parts.iter().map(SmoothMapExpr::to_json).collect::<Vec<_>>(),
            }),
        }
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        match v.get("kind").and_then(Value::as_str) {
            Some("map") => SmoothMap::from_json(v).map(SmoothMapExpr::Map),
            Some("compose") => {
                let parts: Vec<SmoothMapExpr> = v
                    .get("maps")
                    .and_then(Value::as_array)
                    .ok_or_else(|| Error::InvalidInput("composition needs \"maps\"".into()))?
                    .iter()
                    .map(SmoothMapExpr::from_json)
                    .collect::<Result<_>>()?;
                let n = parts.first().map(SmoothMapExpr::dim);
                if n.is_none() || parts.iter().any(|p| Some(p.dim()) != n) {
                    return Err(Error::InvalidInput("composition of maps on different tori".into()));
                }
                Ok(SmoothMapExpr::Compose(parts))
            }
            _ => Err(Error::InvalidInput("expression needs \"kind\": \"map\" or \"compose\"".into())),
        }
    }
}

impl fmt::Display for SmoothMapExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SmoothMapExpr::Map(m) => write!(f, "{m}"),
            SmoothMapExpr::Compose(parts) => {
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ∘ ")?;
                    }
                    write!(f, "[{p}]")?;
                }
                Ok(())
            }
        }
    }
}

/// Exact test of `f ∘ g = g ∘ f` on canonical forms.
pub fn commutes_exactly(f: &AffineToralMap, g: &SmoothMap) -> Result<bool> {
    let fm = SmoothMap::from_affine(f);
    Ok(fm.compose(g)?.same_map(&g.compose(&fm)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int_vec;
    use crate::fixtures::example_one;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(Int::from(p), Int::from(q))
    }

    #[test]
    fn shift_by_half_flips_odd_frequencies() {
        let f = PeriodicFn::cos(r(1, 1), int_vec(&[1]), r(0, 1));
        let shifted = f
            .compose_affine(&IntMatrix::identity(1), &[SymReal::from_ratio(1, 2)])
            .unwrap();
        assert_eq!(shifted, f.scale(&r(-1, 1)));
        assert!(f.add(&shifted).unwrap().is_zero());
    }

    #[test]
    fn sine_and_cosine_are_distinct_keys() {
        let s = PeriodicFn::sin(r(1, 1), int_vec(&[2]), r(0, 1));
        let c = PeriodicFn::cos(r(1, 1), int_vec(&[2]), r(0, 1));
        assert_ne!(s, c);
        assert_eq!(s.add(&c).unwrap().terms().len(), 2);
        // sin(-x) = -sin(x)
        let neg = s.compose_affine(&IntMatrix::from_i64_rows(&[&[-1]]), &[SymReal::zero()]).unwrap();
        assert!(neg.add(&s).unwrap().is_zero());
    }

    #[test]
    fn numeric_values() {
        let ctx = SymbolContext::new();
        let s = PeriodicFn::sin(r(1, 10), int_vec(&[2]), r(0, 1)).numeric(&ctx).unwrap();
        let x = 0.1234;
        assert!((s.eval(&[x]) - 0.1 * (2.0 * TAU * x).sin()).abs() < 1e-15);
        let b = PeriodicFn::bump(r(1, 1), int_vec(&[1]), r(1, 8), r(1, 8)).unwrap().numeric(&ctx).unwrap();
        assert!((b.eval(&[0.125]) - 1.0).abs() < 1e-15);
        assert_eq!(b.eval(&[0.3]), 0.0);
        assert_eq!(b.eval(&[0.0]), 0.0);
        assert!(b.eval(&[1.1]) > 0.0);
    }

    #[test]
    fn bump_slope_constant_is_an_upper_bound() {
        let b = PeriodicFn::bump(r(1, 1), int_vec(&[1]), r(0, 1), r(1, 2)).unwrap();
        let nb = b.numeric(&SymbolContext::new()).unwrap();
        let h = 1e-6;
        let mut worst: f64 = 0.0;
        for i in 0..20000 {
            let x = i as f64 / 20000.0;
            worst = worst.max(((nb.eval(&[x + h]) - nb.eval(&[x - h])) / (2.0 * h)).abs());
        }
        // slope per unit θ is at most BUMP_SLOPE / h with h = 1/2
        assert!(worst <= b.slope_bound());
        assert!(worst > 0.99 * b.slope_bound());
    }

    #[test]
    fn fiber_flow_commutes_with_example_one() {
        // h(x, y, z) = (x, y, z + sin(4πx)/10)
        let phi = PeriodicFn::sin(r(1, 10), int_vec(&[2, 0, 0]), r(0, 1));
        let h = SmoothMap::near_identity(vec![PeriodicFn::zero(3), PeriodicFn::zero(3), phi]).unwrap();
        assert!(commutes_exactly(&example_one(), &h).unwrap());
        // moving the same profile to the y coordinate breaks commutation
        let phi = PeriodicFn::sin(r(1, 10), int_vec(&[2, 0, 0]), r(0, 1));
        let h1 = SmoothMap::near_identity(vec![PeriodicFn::zero(3), phi, PeriodicFn::zero(3)]).unwrap();
        assert!(!commutes_exactly(&example_one(), &h1).unwrap());
    }

    #[test]
    fn composition_needs_an_affine_side() {
        let p = PeriodicFn::cos(r(1, 10), int_vec(&[1]), r(0, 1));
        let g = SmoothMap::near_identity(vec![p]).unwrap();
        assert!(g.compose(&g).is_err());
        let e = SmoothMapExpr::Compose(vec![SmoothMapExpr::Map(g.clone()), SmoothMapExpr::Map(g.clone())]);
        assert!(matches!(e.simplify(), SmoothMapExpr::Compose(_)));
        let ctx = SymbolContext::new();
        let x = [0.3];
        let once = g.numeric(&ctx).unwrap().eval(&x);
        let twice = g.numeric(&ctx).unwrap().eval(&once);
        assert!((e.eval(&x, &ctx).unwrap()[0] - twice[0]).abs() < 1e-15);
    }

    #[test]
    fn conjugation_round_trip() {
        let p = PeriodicFn::sin(r(1, 20), int_vec(&[2, 0]), r(0, 1));
        let g = SmoothMap::near_identity(vec![PeriodicFn::zero(2), p]).unwrap();
        let v = IntMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]);
        let back = g.conjugate_by(&v).unwrap().conjugate_by(&v.inverse_unimodular().unwrap()).unwrap();
        assert!(back.same_map(&g));
    }

    #[test]
    fn json_round_trip() {
        let p = PeriodicFn::sin(r(1, 20), int_vec(&[2, 0]), r(0, 1))
            .add(&PeriodicFn::bump(r(-1, 7), int_vec(&[1, 1]), r(1, 3), r(1, 8)).unwrap())
            .unwrap();
        let g = SmoothMap::new(
            IntMatrix::from_i64_rows(&[&[2, 1], &[1, 1]]),
            vec![SymReal::symbol("alpha"), SymReal::from_ratio(1, 3)],
            vec![PeriodicFn::zero(2), p],
        )
        .unwrap();
        let e = SmoothMapExpr::Compose(vec![SmoothMapExpr::Map(g.clone()), SmoothMapExpr::Map(SmoothMap::identity(2))]);
        assert_eq!(SmoothMapExpr::from_json(&e.to_json()).unwrap(), e);
        assert!(SmoothMapExpr::from_json(&json!({"kind": "compose", "maps": []})).is_err());
        assert!(SmoothMapExpr::from_json(&json!({"kind": "other"})).is_err());
    }
}
