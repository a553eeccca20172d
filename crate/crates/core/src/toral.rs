//! Affine maps `x -> A x + a` of the torus R^n / Z^n with exact translations.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{charpoly, Int, IntMatrix, IntPoly, Rat};
use crate::json;

/// An element of `Q + Q a_1 + ... + Q a_s` for declared irrational symbols
/// `a_i`, assumed linearly independent over Q together with 1.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SymReal {
    rational: Rat,
    irrational: BTreeMap<String, Rat>,
}

impl SymReal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(r: Rat) -> Self {
        SymReal {
            rational: r,
            irrational: BTreeMap::new(),
        }
    }

    pub fn from_ratio(p: i64, q: i64) -> Self {
        Self::rational(Rat::new(Int::from(p), Int::from(q)))
    }

    pub fn integer(k: Int) -> Self {
        Self::rational(Rat::from_integer(k))
    }

    /// The symbol `name` with coefficient 1.
    pub fn symbol(name: &str) -> Self {
        Self::symbol_times(name, Rat::one())
    }

    pub fn symbol_times(name: &str, c: Rat) -> Self {
        let mut irrational = BTreeMap::new();
        if !c.is_zero() {
            irrational.insert(name.to_string(), c);
        }
        SymReal {
            rational: Rat::zero(),
            irrational,
        }
    }

    pub fn from_parts(rational: Rat, irrational: impl IntoIterator<Item = (String, Rat)>) -> Self {
        let mut out = SymReal::rational(rational);
        for (s, c) in irrational {
            out = &out + &SymReal::symbol_times(&s, c);
        }
        out
    }

    pub fn rational_part(&self) -> &Rat {
        &self.rational
    }

    pub fn irrational_parts(&self) -> &BTreeMap<String, Rat> {
        &self.irrational
    }

    pub fn coefficient(&self, symbol: &str) -> Rat {
        self.irrational.get(symbol).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.irrational.keys().map(String::as_str)
    }

    pub fn is_rational(&self) -> bool {
        self.irrational.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.is_rational() && self.rational.is_zero()
    }

    /// Exact membership in Z: no irrational part and an integral rational part.
    pub fn is_integer(&self) -> bool {
        self.is_rational() && self.rational.is_integer()
    }

    /// Rational part reduced into `[0, 1)`; irrational coefficients untouched.
    pub fn reduce_mod_one(&self) -> Self {
        SymReal {
            rational: &self.rational - self.rational.floor(),
            irrational: self.irrational.clone(),
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return SymReal::zero();
        }
        SymReal {
            rational: &self.rational * c,
            irrational: self.irrational.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn scale_int(&self, k: &Int) -> Self {
        self.scale(&Rat::from_integer(k.clone()))
    }

    /// Numeric value using the context's approximations.
    pub fn to_f64(&self, ctx: &SymbolContext) -> Result<f64> {
        let mut v = self.rational.to_f64().unwrap_or(f64::NAN);
        for (s, c) in &self.irrational {
            let a = ctx
                .approx(s)
                .ok_or_else(|| Error::UnresolvedSymbol(s.clone()))?;
            v += c.to_f64().unwrap_or(f64::NAN) * a;
        }
        Ok(v)
    }

    pub fn to_json(&self) -> Value {
        if self.is_rational() {
            return json!({ "rational": json::rat(&self.rational) });
        }
        let sym: Vec<Value> = self
            .irrational
            .iter()
            .map(|(s, c)| json!([s, json::rat(c)]))
            .collect();
        let mut obj = serde_json::Map::new();
        obj.insert("symbolic".into(), Value::Array(sym));
        if !self.rational.is_zero() {
            obj.insert("rational".into(), json::rat(&self.rational));
        }
        Value::Object(obj)
    }

    /// Parses `{"rational": "p/q"}` or `{"symbolic": [[name, "p/q"], ...], "rational"?: "p/q"}`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::InvalidInput(format!("translation entry must be an object: {v}")))?;
        for key in obj.keys() {
            if !matches!(key.as_str(), "rational" | "symbolic" | "approx") {
                return Err(Error::InvalidInput(format!("unknown translation field {key:?}")));
            }
        }
        let rational = match obj.get("rational") {
            Some(r) => json::parse_rat(r)?,
            None => Rat::zero(),
        };
        let mut out = SymReal::rational(rational);
        match obj.get("symbolic") {
            None => {
                if !obj.contains_key("rational") {
                    return Err(Error::InvalidInput(
                        "translation entry needs \"rational\" or \"symbolic\"".into(),
                    ));
                }
            }
            Some(Value::Array(terms)) => {
                for t in terms {
                    let pair = t.as_array().filter(|p| p.len() == 2).ok_or_else(|| {
                        Error::InvalidInput(format!("symbolic term must be [name, \"p/q\"]: {t}"))
                    })?;
                    let name = pair[0]
                        .as_str()
                        .ok_or_else(|| Error::InvalidInput("symbol name must be a string".into()))?;
                    validate_symbol_name(name)?;
                    let c = json::parse_rat(&pair[1])?;
                    out = &out + &SymReal::symbol_times(name, c);
                }
            }
            Some(other) => {
                return Err(Error::InvalidInput(format!("\"symbolic\" must be an array: {other}")))
            }
        }
        Ok(out)
    }
}

fn validate_symbol_name(name: &str) -> Result<()> {
    let ok = !name.is_empty()
        && name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("invalid symbol name {name:?}")))
    }
}

impl Add for &SymReal {
    type Output = SymReal;
    fn add(self, rhs: &SymReal) -> SymReal {
        let mut irrational = self.irrational.clone();
        for (k, v) in &rhs.irrational {
            let e = irrational.entry(k.clone()).or_insert_with(Rat::zero);
            *e += v;
            if e.is_zero() {
                irrational.remove(k);
            }
        }
        SymReal {
            rational: &self.rational + &rhs.rational,
            irrational,
        }
    }
}

impl Sub for &SymReal {
    type Output = SymReal;
    fn sub(self, rhs: &SymReal) -> SymReal {
        self + &(-rhs)
    }
}

impl Neg for &SymReal {
    type Output = SymReal;
    fn neg(self) -> SymReal {
        self.scale(&-Rat::one())
    }
}

impl Mul<&SymReal> for &Rat {
    type Output = SymReal;
    fn mul(self, rhs: &SymReal) -> SymReal {
        rhs.scale(self)
    }
}

impl fmt::Display for SymReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.rational.is_zero() || self.irrational.is_empty() {
            parts.push(self.rational.to_string());
        }
        for (s, c) in &self.irrational {
            let term = if c.is_one() {
                s.clone()
            } else if (-c).is_one() {
                format!("-{s}")
            } else {
                format!("{c}*{s}")
            };
            parts.push(term);
        }
        let mut out = String::new();
        for (i, p) in parts.iter().enumerate() {
            if i == 0 {
                out.push_str(p);
            } else if let Some(rest) = p.strip_prefix('-') {
                out.push_str(" - ");
                out.push_str(rest);
            } else {
                out.push_str(" + ");
                out.push_str(p);
            }
        }
        write!(f, "{out}")
    }
}

impl fmt::Debug for SymReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymReal({self})")
    }
}

/// `M v` for an integer matrix acting on a vector of symbolic reals.
pub fn mat_vec(m: &IntMatrix, v: &[SymReal]) -> Vec<SymReal> {
    assert_eq!(m.cols(), v.len(), "mat_vec dimension mismatch");
    (0..m.rows())
        .map(|i| {
            v.iter()
                .enumerate()
                .filter(|(j, _)| !m[(i, *j)].is_zero())
                .fold(SymReal::zero(), |acc, (j, x)| &acc + &x.scale_int(&m[(i, j)]))
        })
        .collect()
}

/// `<k, v>` for an integer vector and a symbolic vector.
pub fn dot(k: &[Int], v: &[SymReal]) -> SymReal {
    k.iter()
        .zip(v)
        .filter(|(c, _)| !c.is_zero())
        .fold(SymReal::zero(), |acc, (c, x)| &acc + &x.scale_int(c))
}

pub fn vec_add(a: &[SymReal], b: &[SymReal]) -> Vec<SymReal> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[SymReal], b: &[SymReal]) -> Vec<SymReal> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn reduce_vec(v: &[SymReal]) -> Vec<SymReal> {
    v.iter().map(SymReal::reduce_mod_one).collect()
}

/// A declared irrational symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct Symbol {
    pub name: String,
    pub approx: Option<f64>,
}

/// Ordered, duplicate-free list of symbols with optional approximations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymbolContext {
    symbols: Vec<Symbol>,
}

impl SymbolContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, name: &str, approx: Option<f64>) -> Result<()> {
        validate_symbol_name(name)?;
        if let Some(a) = approx {
            if !a.is_finite() || a <= 0.0 || a >= 1.0 {
                return Err(Error::InvalidInput(format!(
                    "approximation of {name:?} must lie in (0, 1), got {a}"
                )));
            }
        }
        match self.symbols.iter_mut().find(|s| s.name == name) {
            Some(s) => match (s.approx, approx) {
                (Some(x), Some(y)) if x != y => return Err(Error::SymbolConflict(name.into())),
                (None, Some(_)) => s.approx = approx,
                _ => {}
            },
            None => self.symbols.push(Symbol {
                name: name.to_string(),
                approx,
            }),
        }
        Ok(())
    }

    pub fn with(mut self, name: &str, approx: f64) -> Result<Self> {
        self.declare(name, Some(approx))?;
        Ok(self)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.symbols.iter().any(|s| s.name == name)
    }

    pub fn approx(&self, name: &str) -> Option<f64> {
        self.symbols.iter().find(|s| s.name == name).and_then(|s| s.approx)
    }

    pub fn merge(&self, other: &SymbolContext) -> Result<SymbolContext> {
        let mut out = self.clone();
        for s in &other.symbols {
            out.declare(&s.name, s.approx)?;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.symbols
                .iter()
                .map(|s| match s.approx {
                    Some(a) => json!({"name": s.name, "approx": a}),
                    None => json!({"name": s.name}),
                })
                .collect(),
        )
    }
}

/// `x -> A x + a` on `T^n` with `A` unimodular and `a` symbolic.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineToralMap {
    linear: IntMatrix,
    translation: Vec<SymReal>,
    context: SymbolContext,
}

impl AffineToralMap {
    /// Validates the linear part and reduces the translation mod 1. Symbols
    /// used in the translation are declared (without approximations).
    pub fn new(linear: IntMatrix, translation: Vec<SymReal>) -> Result<Self> {
        Self::with_context(linear, translation, SymbolContext::new())
    }

    pub fn with_context(
        linear: IntMatrix,
        translation: Vec<SymReal>,
        mut context: SymbolContext,
    ) -> Result<Self> {
        let n = linear.rows();
        if n == 0 || !linear.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "linear part must be square with n >= 1, got {}x{}",
                linear.rows(),
                linear.cols()
            )));
        }
        if translation.len() != n {
            return Err(Error::DimensionMismatch(format!(
                "translation has {} entries for n = {n}",
                translation.len()
            )));
        }
        let det = linear.det();
        if !det.abs().is_one() {
            return Err(Error::NotUnimodular(det.to_string()));
        }
        for t in &translation {
            for s in t.symbols() {
                if !context.contains(s) {
                    context.declare(s, None)?;
                }
            }
        }
        Ok(AffineToralMap {
            linear,
            translation: reduce_vec(&translation),
            context,
        })
    }

    pub fn linear_only(linear: IntMatrix) -> Result<Self> {
        let n = linear.rows();
        Self::new(linear, vec![SymReal::zero(); n])
    }

    pub fn translation_only(a: Vec<SymReal>) -> Result<Self> {
        Self::new(IntMatrix::identity(a.len()), a)
    }

    pub fn identity(n: usize) -> Self {
        AffineToralMap {
            linear: IntMatrix::identity(n),
            translation: vec![SymReal::zero(); n],
            context: SymbolContext::new(),
        }
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

    pub fn context(&self) -> &SymbolContext {
        &self.context
    }

    pub fn charpoly(&self) -> IntPoly {
        charpoly(&self.linear).expect("square linear part")
    }

    pub fn is_identity(&self) -> bool {
        self.linear.is_identity() && self.translation.iter().all(SymReal::is_zero)
    }

    pub fn has_symbolic_translation(&self) -> bool {
        self.translation.iter().any(|t| !t.is_rational())
    }

    fn check_dim(&self, other: &AffineToralMap) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "maps on T^{} and T^{}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    /// `self ∘ g`.
    pub fn compose(&self, g: &AffineToralMap) -> Result<AffineToralMap> {
        self.check_dim(g)?;
        let context = self.context.merge(&g.context)?;
        Ok(AffineToralMap {
            linear: &self.linear * &g.linear,
            translation: reduce_vec(&vec_add(&mat_vec(&self.linear, &g.translation), &self.translation)),
            context,
        })
    }

    pub fn inverse(&self) -> AffineToralMap {
        let inv = self
            .linear
            .inverse_unimodular()
            .expect("linear part is unimodular");
        let t = mat_vec(&inv, &self.translation);
        AffineToralMap {
            translation: reduce_vec(&t.iter().map(|x| -x).collect::<Vec<_>>()),
            linear: inv,
            context: self.context.clone(),
        }
    }

    /// Exact `k`-th iterate; negative `k` iterates the inverse.
    pub fn power(&self, k: i64) -> AffineToralMap {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = AffineToralMap {
            context: self.context.clone(),
            ..AffineToralMap::identity(self.dim())
        };
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&sq).expect("same dimension");
            }
            e >>= 1;
            if e > 0 {
                sq = sq.compose(&sq).expect("same dimension");
            }
        }
        acc
    }

    /// `T_{-c} ∘ f ∘ T_c`: translation becomes `a + (A - I) c`.
    pub fn conjugate_by_translation(&self, c: &[SymReal]) -> Result<AffineToralMap> {
        if c.len() != self.dim() {
            return Err(Error::DimensionMismatch("translation vector length".into()));
        }
        let shift = vec_sub(&mat_vec(&self.linear, c), c);
        let mut ctx = self.context.clone();
        for x in c {
            for s in x.symbols() {
                if !ctx.contains(s) {
                    ctx.declare(s, None)?;
                }
            }
        }
        Ok(AffineToralMap {
            linear: self.linear.clone(),
            translation: reduce_vec(&vec_add(&self.translation, &shift)),
            context: ctx,
        })
    }

    /// Coordinate change `x' = U x`: linear part `U A U^{-1}`, translation `U a`.
    pub fn conjugate_by_unimodular(&self, u: &IntMatrix) -> Result<AffineToralMap> {
        if u.rows() != self.dim() || !u.is_square() {
            return Err(Error::DimensionMismatch("conjugator size".into()));
        }
        let inv = u.inverse_unimodular()?;
        Ok(AffineToralMap {
            linear: &(u * &self.linear) * &inv,
            translation: reduce_vec(&mat_vec(u, &self.translation)),
            context: self.context.clone(),
        })
    }

    /// Numeric translation using the context's approximations.
    pub fn numeric_translation(&self) -> Result<Vec<f64>> {
        self.translation.iter().map(|t| t.to_f64(&self.context)).collect()
    }

    /// Evaluates the map at a point, reducing each coordinate into `[0, 1)`.
    pub fn eval(&self, x: &[f64]) -> Result<Vec<f64>> {
        let a = self.numeric_translation()?;
        let m = self.linear.to_f64();
        Ok(eval_affine(&m, &a, x))
    }
}

/// `frac(M x + a)`, the workhorse of numeric evaluation.
pub fn eval_affine(m: &[Vec<f64>], a: &[f64], x: &[f64]) -> Vec<f64> {
    m.iter()
        .zip(a)
        .map(|(row, ai)| {
            let v: f64 = row.iter().zip(x).map(|(r, xi)| r * xi).sum::<f64>() + ai;
            v - v.floor()
        })
        .collect()
}

impl fmt::Display for AffineToralMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.dim();
        let vars: Vec<String> = (0..n).map(|i| format!("x{}", i + 1)).collect();
        let comps: Vec<String> = (0..n)
            .map(|i| {
                let mut s = String::new();
                for j in 0..n {
                    let c = &self.linear[(i, j)];
                    if c.is_zero() {
                        continue;
                    }
                    let term = if c.is_one() {
                        vars[j].clone()
                    } else if (-c).is_one() {
                        format!("-{}", vars[j])
                    } else {
                        format!("{c}{}", vars[j])
                    };
                    if s.is_empty() {
                        s = term;
                    } else if let Some(t) = term.strip_prefix('-') {
                        s = format!("{s} - {t}");
                    } else {
                        s = format!("{s} + {term}");
                    }
                }
                if !self.translation[i].is_zero() {
                    s = if s.is_empty() {
                        self.translation[i].to_string()
                    } else {
                        format!("{s} + {}", self.translation[i])
                    };
                }
                if s.is_empty() {
                    "0".into()
                } else {
                    s
                }
            })
            .collect();
        write!(f, "({}) -> ({})", vars.join(", "), comps.join(", "))
    }
}
