//! Dense univariate polynomials over Z and Q, lowest degree first.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::matrix::{Int, IntMatrix, Rat, RatMatrix};
use crate::error::{Error, Result};

/// Largest degree accepted by [`IntPoly::new`].
pub const MAX_DEGREE: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<Int>,
}

fn trim<T: Zero>(v: &mut Vec<T>) {
    while v.last().is_some_and(Zero::is_zero) {
        v.pop();
    }
}

impl IntPoly {
    /// Builds a polynomial, rejecting degrees above [`MAX_DEGREE`].
    pub fn new(coeffs: Vec<Int>) -> Result<Self> {
        let p = Self::raw(coeffs);
        match p.degree() {
            Some(d) if d > MAX_DEGREE => Err(Error::DegreeTooLarge {
                degree: d,
                max: MAX_DEGREE,
            }),
            _ => Ok(p),
        }
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| Int::from(c)).collect())
    }

    /// No degree cap; for intermediate results such as `x^k - 1`.
    pub(crate) fn raw(mut coeffs: Vec<Int>) -> Self {
        trim(&mut coeffs);
        IntPoly { coeffs }
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        IntPoly {
            coeffs: vec![Int::one()],
        }
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        IntPoly {
            coeffs: vec![Int::zero(), Int::one()],
        }
    }

    /// `x - c`
    pub fn linear_root(c: i64) -> Self {
        IntPoly {
            coeffs: vec![Int::from(-c), Int::one()],
        }
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    pub fn leading(&self) -> Option<&Int> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_some_and(One::is_one)
    }

    pub fn coeff(&self, i: usize) -> Int {
        self.coeffs.get(i).cloned().unwrap_or_else(Int::zero)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Division by a monic divisor: `self = q * d + r` with `deg r < deg d`.
    pub fn div_rem_monic(&self, d: &IntPoly) -> Result<(IntPoly, IntPoly)> {
        if !d.is_monic() {
            return Err(Error::InvalidInput("divisor must be monic".into()));
        }
        let dd = d.deg();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((IntPoly::zero(), self.clone()));
        }
        let mut q = vec![Int::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = r[i + dd].clone();
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[i + j] -= &c * dj;
            }
            q[i] = c;
        }
        Ok((IntPoly::raw(q), IntPoly::raw(r)))
    }

    /// Exact quotient by a monic divisor, `None` if the remainder is nonzero.
    pub fn div_exact_monic(&self, d: &IntPoly) -> Option<IntPoly> {
        let (q, r) = self.div_rem_monic(d).ok()?;
        r.is_zero().then_some(q)
    }

    /// Exact quotient by any nonzero divisor (via rationals).
    pub fn div_exact(&self, d: &IntPoly) -> Option<IntPoly> {
        if d.is_zero() {
            return None;
        }
        let (q, r) = self.to_rat().div_rem(&d.to_rat());
        if !r.is_zero() {
            return None;
        }
        q.to_int()
    }

    pub fn divides(&self, other: &IntPoly) -> bool {
        other.div_exact(self).is_some()
    }

    /// Multiplicity of `g` as a factor of `self` (0 if it does not divide).
    pub fn multiplicity_of(&self, g: &IntPoly) -> u32 {
        if g.deg() == 0 || self.is_zero() {
            return 0;
        }
        let mut m = 0;
        let mut p = self.clone();
        while let Some(q) = p.div_exact(g) {
            p = q;
            m += 1;
        }
        m
    }

    pub fn derivative(&self) -> IntPoly {
        IntPoly::raw(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Int::from(i))
                .collect(),
        )
    }

    /// `x^deg * p(1/x)`.
    pub fn reciprocal(&self) -> IntPoly {
        let mut c = self.coeffs.clone();
        c.reverse();
        IntPoly::raw(c)
    }

    pub fn eval(&self, x: &Int) -> Int {
        self.coeffs
            .iter()
            .rev()
            .fold(Int::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * z + c.to_f64().unwrap_or(f64::NAN)
        })
    }

    /// `p(M)` for a square integer matrix.
    pub fn eval_matrix(&self, m: &IntMatrix) -> IntMatrix {
        m.eval_poly(&self.coeffs)
    }

    pub fn eval_rat_matrix(&self, m: &RatMatrix) -> RatMatrix {
        let c: Vec<Rat> = self.coeffs.iter().map(|x| Rat::from_integer(x.clone())).collect();
        m.eval_poly(&c)
    }

    pub fn to_rat(&self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| Rat::from_integer(c.clone())).collect())
    }

    pub fn content(&self) -> Int {
        self.coeffs.iter().fold(Int::zero(), |a, b| a.gcd(b))
    }

    /// Companion matrix (subdiagonal ones, last column `-c_i`) of a monic polynomial.
    pub fn companion(&self) -> Result<IntMatrix> {
        if !self.is_monic() || self.deg() == 0 {
            return Err(Error::InvalidInput(
                "companion matrix needs a monic polynomial of degree >= 1".into(),
            ));
        }
        let n = self.deg();
        let mut m = IntMatrix::zeros(n, n);
        for i in 1..n {
            m[(i, i - 1)] = Int::one();
        }
        for i in 0..n {
            m[(i, n - 1)] = -self.coeffs[i].clone();
        }
        Ok(m)
    }

    pub fn to_i64_vec(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(ToPrimitive::to_i64).collect()
    }

    pub fn to_string_coeffs(&self) -> Vec<String> {
        self.coeffs.iter().map(ToString::to_string).collect()
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::raw((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::raw((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::raw(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![Int::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::raw(out)
    }
}

fn write_poly<T: fmt::Display + Zero + One + Signed + Clone>(
    f: &mut fmt::Formatter<'_>,
    coeffs: &[T],
) -> fmt::Result {
    if coeffs.is_empty() {
        return write!(f, "0");
    }
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        let a = c.abs();
        if first {
            if neg {
                write!(f, "-")?;
            }
        } else {
            write!(f, " {} ", if neg { '-' } else { '+' })?;
        }
        first = false;
        let unit = a.is_one();
        match (i, unit) {
            (0, _) => write!(f, "{a}")?,
            (1, true) => write!(f, "x")?,
            (1, false) => write!(f, "{a}x")?,
            (_, true) => write!(f, "x^{i}")?,
            (_, false) => write!(f, "{a}x^{i}")?,
        }
    }
    Ok(())
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.coeffs)
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

/// Characteristic polynomial `det(xI - A)` by Berkowitz's division-free algorithm.
pub fn charpoly(a: &IntMatrix) -> Result<IntPoly> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("charpoly of non-square matrix".into()));
    }
    let n = a.rows();
    if n > MAX_DEGREE {
        return Err(Error::DegreeTooLarge {
            degree: n,
            max: MAX_DEGREE,
        });
    }
    // Berkowitz: c holds coefficients highest degree first.
    let mut c: Vec<Int> = vec![Int::one()];
    for k in 0..n {
        // Leading principal (k+1)x(k+1) block: A_k = [[M, R], [S, a_kk]]
        // where M is k x k, R column k x 1, S row 1 x k.
        let akk = a[(k, k)].clone();
        let r: Vec<Int> = (0..k).map(|i| a[(i, k)].clone()).collect();
        let s: Vec<Int> = (0..k).map(|j| a[(k, j)].clone()).collect();
        // Toeplitz column: t_0 = 1, t_1 = -a_kk, t_{i+2} = -S M^i R.
        let mut t = Vec::with_capacity(k + 2);
        t.push(Int::one());
        t.push(-akk);
        let mut v = r;
        for _ in 0..k {
            let sv: Int = s.iter().zip(&v).map(|(x, y)| x * y).sum();
            t.push(-sv);
            v = (0..k)
                .map(|i| (0..k).map(|j| &a[(i, j)] * &v[j]).sum())
                .collect();
        }
        // new c = T * c where T is (k+2) x (k+1) lower Toeplitz.
        let mut nc = vec![Int::zero(); k + 2];
        for (i, nci) in nc.iter_mut().enumerate() {
            for (j, cj) in c.iter().enumerate() {
                if i >= j {
                    *nci += &t[i - j] * cj;
                }
            }
        }
        c = nc;
    }
    c.reverse();
    Ok(IntPoly::raw(c))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatPoly {
    coeffs: Vec<Rat>,
}

impl RatPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        trim(&mut coeffs);
        RatPoly { coeffs }
    }

    pub fn zero() -> Self {
        RatPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        RatPoly {
            coeffs: vec![Rat::one()],
        }
    }

    pub fn constant(c: Rat) -> Self {
        RatPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn coeff(&self, i: usize) -> Rat {
        self.coeffs.get(i).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn monic(&self) -> RatPoly {
        match self.coeffs.last() {
            None => RatPoly::zero(),
            Some(l) => {
                let inv = l.recip();
                RatPoly::new(self.coeffs.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let dd = d.deg();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (RatPoly::zero(), self.clone());
        }
        let lead_inv = d.coeffs[dd].recip();
        let mut q = vec![Rat::zero(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = &r[i + dd] * &lead_inv;
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                r[i + j] -= &c * dj;
            }
            q[i] = c;
        }
        (RatPoly::new(q), RatPoly::new(r))
    }

    pub fn div_exact(&self, d: &RatPoly) -> Option<RatPoly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn derivative(&self) -> RatPoly {
        RatPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(Int::from(i)))
                .collect(),
        )
    }

    /// Integer polynomial if every coefficient is integral.
    pub fn to_int(&self) -> Option<IntPoly> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect::<Option<Vec<_>>>()
            .map(IntPoly::raw)
    }

    /// Primitive integer multiple with positive leading coefficient.
    pub fn primitive(&self) -> IntPoly {
        let l = self
            .coeffs
            .iter()
            .fold(Int::one(), |a, c| a.lcm(c.denom()));
        let ints: Vec<Int> = self
            .coeffs
            .iter()
            .map(|c| (c * Rat::from_integer(l.clone())).to_integer())
            .collect();
        let p = IntPoly::raw(ints);
        let g = p.content();
        if g.is_zero() {
            return p;
        }
        let sign = if p.leading().is_some_and(Signed::is_negative) {
            -Int::one()
        } else {
            Int::one()
        };
        let g = g * sign;
        IntPoly::raw(p.coeffs.iter().map(|c| c / &g).collect())
    }

    /// Square-free decomposition (Yun): returns `(s_e, e)` with `self = c * prod s_e^e`,
    /// each `s_e` monic, square-free and pairwise coprime; trivial factors omitted.
    pub fn squarefree_decomposition(&self) -> Vec<(RatPoly, u32)> {
        let mut out = Vec::new();
        if self.deg() == 0 {
            return out;
        }
        let f = self.monic();
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_exact(&a0).expect("gcd divides");
        let mut c = fp.div_exact(&a0).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut e = 1;
        loop {
            let a = b.gcd(&d);
            if a.deg() > 0 {
                out.push((a.clone(), e));
            }
            b = b.div_exact(&a).expect("gcd divides");
            if b.deg() == 0 {
                break;
            }
            c = d.div_exact(&a).expect("gcd divides");
            d = &c - &b.derivative();
            e += 1;
        }
        out
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * z + c.to_f64().unwrap_or(f64::NAN)
        })
    }
}

impl Add for &RatPoly {
    type Output = RatPoly;
    fn add(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RatPoly {
    type Output = RatPoly;
    fn sub(self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RatPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RatPoly {
    type Output = RatPoly;
    fn mul(self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut out = vec![Rat::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RatPoly::new(out)
    }
}

impl Neg for &RatPoly {
    type Output = RatPoly;
    fn neg(self) -> RatPoly {
        RatPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl fmt::Display for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_poly(f, &self.coeffs)
    }
}

impl fmt::Debug for RatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatPoly({self})")
    }
}

/// Invariant factors of `xI - A` over Q[x], monic, each dividing the next;
/// trivial factors dropped. Their product is the characteristic polynomial.
pub fn invariant_factors(a: &IntMatrix) -> Vec<RatPoly> {
    let n = a.rows();
    let mut m: Vec<Vec<RatPoly>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = -Rat::from_integer(a[(i, j)].clone());
                    if i == j {
                        RatPoly::new(vec![c, Rat::one()])
                    } else {
                        RatPoly::constant(c)
                    }
                })
                .collect()
        })
        .collect();
    let mut diag = Vec::with_capacity(n);
    for t in 0..n {
        loop {
            let pivot = (t..n)
                .flat_map(|i| (t..n).map(move |j| (i, j)))
                .filter(|&(i, j)| !m[i][j].is_zero())
                .min_by_key(|&(i, j)| m[i][j].deg());
            let Some((pi, pj)) = pivot else { break };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..n {
                if m[i][t].is_zero() {
                    continue;
                }
                let (q, r) = m[i][t].div_rem(&m[t][t]);
                for j in t..n {
                    let sub = &q * &m[t][j];
                    m[i][j] = &m[i][j] - &sub;
                }
                clean &= r.is_zero();
            }
            for j in t + 1..n {
                if m[t][j].is_zero() {
                    continue;
                }
                let (q, r) = m[t][j].div_rem(&m[t][t]);
                for i in t..n {
                    let sub = &q * &m[i][t];
                    m[i][j] = &m[i][j] - &sub;
                }
                clean &= r.is_zero();
            }
            if !clean {
                continue;
            }
            let bad = (t + 1..n)
                .find(|&i| (t + 1..n).any(|j| !m[i][j].div_rem(&m[t][t]).1.is_zero()));
            match bad {
                Some(i) => {
                    for j in t..n {
                        m[t][j] = &m[t][j] + &m[i][j];
                    }
                }
                None => break,
            }
        }
        diag.push(m[t][t].monic());
    }
    diag.into_iter().filter(|p| p.deg() > 0).collect()
}

/// Refines a list of polynomials into pairwise coprime monic factors such
/// that every input is a product of powers of the output factors.
pub fn gcd_free_basis(polys: &[RatPoly]) -> Vec<RatPoly> {
    let mut basis: Vec<RatPoly> = Vec::new();
    for p in polys {
        if p.deg() == 0 {
            continue;
        }
        let mut pending = vec![p.monic()];
        while let Some(mut q) = pending.pop() {
            if q.deg() == 0 {
                continue;
            }
            let mut i = 0;
            while i < basis.len() {
                let g = basis[i].gcd(&q);
                if g.deg() == 0 {
                    i += 1;
                    continue;
                }
                let b = basis.swap_remove(i);
                let b_rest = b.div_exact(&g).expect("gcd divides");
                q = q.div_exact(&g).expect("gcd divides");
                pending.push(g);
                pending.push(b_rest);
                i = 0;
                if q.deg() == 0 {
                    break;
                }
            }
            if q.deg() > 0 {
                basis.push(q);
            }
        }
    }
    basis.sort_by(|a, b| a.deg().cmp(&b.deg()).then_with(|| format!("{a}").cmp(&format!("{b}"))));
    basis
}
