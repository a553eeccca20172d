//! Rational nilpotent Lie algebras: central series, bracket closures, the
//! K test for nilmanifold automorphisms and twisted fixed points in step 2.

use num_integer::Integer;
use num_traits::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::exact::{charpoly, cyclotomic_part, Int, IntMatrix, IntPoly, Rat, RatMatrix};
use crate::json;
use crate::structure::{LayerProvenance, TowerLayer, TowerRecord};

/// A subspace of Q^n, stored as the nonzero rows of its RREF basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vec<Rat>>,
}

impl Subspace {
    pub fn span(n: usize, vectors: &[Vec<Rat>]) -> Result<Self> {
        if vectors.iter().any(|v| v.len() != n) {
            return Err(Error::DimensionMismatch(format!("vectors not in Q^{n}")));
        }
        if vectors.is_empty() {
            return Ok(Subspace::zero(n));
        }
        let (r, pivots) = RatMatrix::from_row_vecs(vectors.to_vec())?.rref();
        Ok(Subspace {
            n,
            basis: (0..pivots.len()).map(|i| r.row(i)).collect(),
        })
    }

    pub fn zero(n: usize) -> Self {
        Subspace { n, basis: Vec::new() }
    }

    pub fn full(n: usize) -> Self {
        Subspace {
            n,
            basis: RatMatrix::identity(n).to_row_vecs(),
        }
    }

    /// Span of the given coordinate vectors `e_i`.
    pub fn coordinate(n: usize, idx: &[usize]) -> Self {
        let vs: Vec<Vec<Rat>> = idx.iter().map(|&i| unit(n, i)).collect();
        Subspace::span(n, &vs).expect("coordinate vectors")
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.n
    }

    pub fn basis(&self) -> &[Vec<Rat>] {
        &self.basis
    }

    pub fn contains(&self, v: &[Rat]) -> bool {
        let mut vs = self.basis.clone();
        vs.push(v.to_vec());
        Subspace::span(self.n, &vs).map(|s| s.dim() == self.dim()).unwrap_or(false)
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let vs: Vec<Vec<Rat>> = self.basis.iter().chain(&other.basis).cloned().collect();
        Subspace::span(self.n, &vs).expect("same ambient space")
    }

    pub fn image(&self, m: &RatMatrix) -> Subspace {
        let vs: Vec<Vec<Rat>> = self.basis.iter().map(|v| m.mul_vec(v)).collect();
        Subspace::span(m.rows(), &vs).expect("matrix image")
    }

    /// Linear forms vanishing on the subspace, as rows.
    pub fn annihilator(&self) -> Vec<Vec<Rat>> {
        if self.is_zero() {
            return RatMatrix::identity(self.n).to_row_vecs();
        }
        RatMatrix::from_row_vecs(self.basis.clone())
            .expect("rectangular")
            .nullspace()
    }

    /// Standard vectors completing the basis, chosen greedily.
    pub fn complement(&self) -> Vec<Vec<Rat>> {
        let mut cur = self.clone();
        let mut out = Vec::new();
        for i in 0..self.n {
            let e = unit(self.n, i);
            if !cur.contains(&e) {
                cur = cur.sum(&Subspace::span(self.n, std::slice::from_ref(&e)).expect("unit"));
                out.push(e);
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "dim": self.dim(),
            "basis": self.basis.iter().map(|v| json::rat_vec(v)).collect::<Vec<_>>(),
        })
    }
}

fn unit(n: usize, i: usize) -> Vec<Rat> {
    let mut v = vec![Rat::zero(); n];
    v[i] = Rat::one();
    v
}

/// Structure constants `[e_i, e_j] = sum_k c_ij^k e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalLieAlgebra {
    dim: usize,
    c: Vec<Rat>,
}

impl RationalLieAlgebra {
    /// Antisymmetric constants from triples `(i, j, k, c_ij^k)`; Jacobi is
    /// not checked.
    pub fn from_triples_unchecked(dim: usize, triples: &[(usize, usize, usize, Rat)]) -> Result<Self> {
        let mut c = vec![Rat::zero(); dim * dim * dim];
        let mut set = vec![false; dim * dim * dim];
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        for (i, j, k, v) in triples {
            let (i, j, k) = (*i, *j, *k);
            if i >= dim || j >= dim || k >= dim {
                return Err(Error::InvalidInput(format!("index out of range in ({i}, {j}, {k})")));
            }
            if i == j {
                if !v.is_zero() {
                    return Err(Error::InvalidInput(format!("[e{i}, e{i}] must vanish")));
                }
                continue;
            }
            for (a, b, val) in [(i, j, v.clone()), (j, i, -v.clone())] {
                let p = idx(a, b, k);
                if set[p] && c[p] != val {
                    return Err(Error::InvalidInput(format!(
                        "conflicting constants for [e{a}, e{b}] along e{k}"
                    )));
                }
                set[p] = true;
                c[p] = val;
            }
        }
        Ok(RationalLieAlgebra { dim, c })
    }

    /// As above, rejecting constants that violate the Jacobi identity.
    pub fn from_triples(dim: usize, triples: &[(usize, usize, usize, Rat)]) -> Result<Self> {
        let alg = Self::from_triples_unchecked(dim, triples)?;
        match jacobi_check(&alg).counterexample {
            Some((i, j, k)) => Err(Error::JacobiFailure(i, j, k)),
            None => Ok(alg),
        }
    }

    pub fn abelian(dim: usize) -> Self {
        RationalLieAlgebra {
            dim,
            c: vec![Rat::zero(); dim * dim * dim],
        }
    }

    /// `[e0, e1] = e2`.
    pub fn heisenberg() -> Self {
        Self::from_triples(3, &[(0, 1, 2, Rat::one())]).expect("Heisenberg")
    }

    /// `[e0, e_i] = e_{i+1}` for `1 <= i < dim - 1`.
    pub fn filiform(dim: usize) -> Self {
        let t: Vec<_> = (1..dim.saturating_sub(1)).map(|i| (0, i, i + 1, Rat::one())).collect();
        Self::from_triples(dim, &t).expect("filiform")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> &Rat {
        &self.c[(i * self.dim + j) * self.dim + k]
    }

    /// Whether all structure constants are integers.
    pub fn has_lattice_basis(&self) -> bool {
        self.c.iter().all(Rat::is_integer)
    }

    pub fn is_abelian(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn bracket(&self, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
        let n = self.dim;
        let mut out = vec![Rat::zero(); n];
        for i in (0..n).filter(|&i| !x[i].is_zero()) {
            for j in (0..n).filter(|&j| !y[j].is_zero()) {
                let xy = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.constant(i, j, k);
                    if !c.is_zero() {
                        *o += &xy * c;
                    }
                }
            }
        }
        out
    }

    /// Matrix of `ad(x) = [x, .]`.
    pub fn ad(&self, x: &[Rat]) -> RatMatrix {
        let n = self.dim;
        let cols: Vec<Vec<Rat>> = (0..n).map(|j| self.bracket(x, &unit(n, j))).collect();
        RatMatrix::from_columns(n, &cols)
    }

    /// Nonzero constants as `(i, j, k, value)` with `i < j`.
    pub fn triples(&self) -> Vec<(usize, usize, usize, Rat)> {
        let n = self.dim;
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in 0..n {
                    let c = self.constant(i, j, k);
                    if !c.is_zero() {
                        out.push((i, j, k, c.clone()));
                    }
                }
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.triples()
                .into_iter()
                .map(|(i, j, k, v)| json!([i, j, k, json::rat(&v)]))
                .collect(),
        )
    }

    /// Lower central series `g ⊃ [g, g] ⊃ ...` until it stabilizes.
    pub fn lower_central_series(&self) -> Vec<Subspace> {
        let n = self.dim;
        let mut out = vec![Subspace::full(n)];
        loop {
            let last = out.last().expect("nonempty");
            let mut vs = Vec::new();
            for v in last.basis() {
                for j in 0..n {
                    vs.push(self.bracket(&unit(n, j), v));
                }
            }
            let next = Subspace::span(n, &vs).expect("same space");
            if next == *last {
                return out;
            }
            out.push(next);
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series().last().is_some_and(Subspace::is_zero)
    }

    /// Nilpotency step, or `None` when not nilpotent.
    pub fn step(&self) -> Option<usize> {
        let lcs = self.lower_central_series();
        lcs.last().is_some_and(Subspace::is_zero).then(|| lcs.len() - 1)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiReport {
    pub holds: bool,
    pub counterexample: Option<(usize, usize, usize)>,
}

/// Exhaustive check of `[e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]] = 0`.
pub fn jacobi_check(alg: &RationalLieAlgebra) -> JacobiReport {
    let n = alg.dim();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let (ei, ej, ek) = (unit(n, i), unit(n, j), unit(n, k));
                let a = alg.bracket(&ei, &alg.bracket(&ej, &ek));
                let b = alg.bracket(&ej, &alg.bracket(&ek, &ei));
                let c = alg.bracket(&ek, &alg.bracket(&ei, &ej));
                if a.iter().zip(&b).zip(&c).any(|((x, y), z)| !(x + y + z).is_zero()) {
                    return JacobiReport {
                        holds: false,
                        counterexample: Some((i, j, k)),
                    };
                }
            }
        }
    }
    JacobiReport {
        holds: true,
        counterexample: None,
    }
}

/// `0 = Z_0 ⊂ Z_1 ⊂ ... ⊂ Z_u = g` with `Z_{i+1} = {x : [x, g] ⊂ Z_i}`.
pub fn upper_central_series(alg: &RationalLieAlgebra) -> Result<Vec<Subspace>> {
    let n = alg.dim();
    let mut out = vec![Subspace::zero(n)];
    loop {
        let last = out.last().expect("nonempty");
        if last.is_full() {
            return Ok(out);
        }
        let ann = last.annihilator();
        // x ∈ Z_{i+1} iff ann · ad(e_j) x = 0 for all j, since [x, e_j] = -ad(e_j) x
        let mut rows = Vec::new();
        for j in 0..n {
            let adj = alg.ad(&unit(n, j));
            for w in &ann {
                rows.push(adj.transpose().mul_vec(w));
            }
        }
        let next = if rows.is_empty() {
            Subspace::full(n)
        } else {
            let ker = RatMatrix::from_row_vecs(rows)?.nullspace();
            Subspace::span(n, &ker)?
        };
        if next == *last {
            return Err(Error::NotNilpotent);
        }
        out.push(next);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosureResult {
    pub subalgebra: Subspace,
    pub is_ideal: bool,
}

/// Smallest subalgebra containing `v`.
pub fn bracket_closure(alg: &RationalLieAlgebra, v: &Subspace) -> Result<ClosureResult> {
    let n = alg.dim();
    if v.ambient_dim() != n {
        return Err(Error::DimensionMismatch("subspace of a different algebra".into()));
    }
    let mut cur = v.clone();
    loop {
        let b = cur.basis();
        let mut vs: Vec<Vec<Rat>> = b.to_vec();
        for i in 0..b.len() {
            for j in i + 1..b.len() {
                vs.push(alg.bracket(&b[i], &b[j]));
            }
        }
        let next = Subspace::span(n, &vs)?;
        if next == cur {
            break;
        }
        cur = next;
    }
    let is_ideal = cur
        .basis()
        .iter()
        .all(|x| (0..n).all(|j| cur.contains(&alg.bracket(x, &unit(n, j)))));
    Ok(ClosureResult {
        subalgebra: cur,
        is_ideal,
    })
}

/// An invertible matrix preserving the bracket.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraAutomorphism {
    matrix: RatMatrix,
}

impl AlgebraAutomorphism {
    pub fn new(alg: &RationalLieAlgebra, m: RatMatrix) -> Result<Self> {
        let n = alg.dim();
        if m.rows() != n || m.cols() != n {
            return Err(Error::DimensionMismatch("automorphism size".into()));
        }
        if m.inverse().is_none() {
            return Err(Error::InvalidInput("automorphism is not invertible".into()));
        }
        let cols = m.columns();
        for i in 0..n {
            for j in i + 1..n {
                let lhs = m.mul_vec(&alg.bracket(&unit(n, i), &unit(n, j)));
                let rhs = alg.bracket(&cols[i], &cols[j]);
                if lhs != rhs {
                    return Err(Error::InvalidInput(format!(
                        "not an automorphism: D[e{i}, e{j}] != [De{i}, De{j}]"
                    )));
                }
            }
        }
        Ok(AlgebraAutomorphism { matrix: m })
    }

    pub fn matrix(&self) -> &RatMatrix {
        &self.matrix
    }

    /// Characteristic polynomial, required to have integer coefficients.
    pub fn integral_charpoly(&self) -> Result<IntPoly> {
        let n = self.matrix.rows();
        let l = self
            .matrix
            .data()
            .iter()
            .fold(Int::one(), |acc, x| acc.lcm(x.denom()));
        let scaled = self.matrix.scale(&Rat::from_integer(l.clone())).map(|x| x.to_integer());
        // det(xI - M/l) = l^{-n} det(lx I - M)
        let cp = charpoly(&scaled)?;
        let coeffs: Vec<Int> = cp
            .coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let r = Rat::new(c.clone(), num_traits::pow(l.clone(), n - i));
                r.is_integer()
                    .then(|| r.to_integer())
                    .ok_or_else(|| Error::Precondition("characteristic polynomial is not integral".into()))
            })
            .collect::<Result<_>>()?;
        IntPoly::new(coeffs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuotientData {
    pub dim: usize,
    /// Rows map the algebra onto quotient coordinates.
    pub projection: RatMatrix,
    /// The automorphism induced on the quotient.
    pub induced: RatMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NilKVerdict {
    pub is_k: bool,
    pub hull: Subspace,
    pub ideal: ClosureResult,
    pub quotient: Option<QuotientData>,
}

impl NilKVerdict {
    pub fn to_json(&self) -> Value {
        json!({
            "is_k": self.is_k,
            "hull": self.hull.to_json(),
            "closure": self.ideal.subalgebra.to_json(),
            "closure_is_ideal": self.ideal.is_ideal,
            "quotient": self.quotient.as_ref().map(|q| json!({
                "dim": q.dim,
                "projection": json::rat_matrix(&q.projection),
                "induced": json::rat_matrix(&q.induced),
            })),
        })
    }
}

/// Coordinates on `g / h` along a greedy standard complement of `h`.
fn quotient_by(h: &Subspace, da: &RatMatrix) -> Result<QuotientData> {
    let n = h.ambient_dim();
    let comp = h.complement();
    let q = comp.len();
    let mut cols: Vec<Vec<Rat>> = comp.clone();
    cols.extend(h.basis().iter().cloned());
    let w = RatMatrix::from_columns(n, &cols);
    let winv = w.inverse().ok_or(Error::NotAFactor)?;
    let projection = winv.submatrix(0..q, 0..n);
    let induced = &(&projection * da) * &RatMatrix::from_columns(n, &comp);
    Ok(QuotientData {
        dim: q,
        projection,
        induced,
    })
}

/// K iff the subalgebra generated by the non-cyclotomic generalized
/// eigenspaces of `DA` is everything.
pub fn is_k_nilmanifold(alg: &RationalLieAlgebra, da: &AlgebraAutomorphism) -> Result<NilKVerdict> {
    let n = alg.dim();
    let cp = da.integral_charpoly()?;
    let cyc = cyclotomic_part(&cp);
    let p_off = cp.div_exact(&cyc).ok_or(Error::NotAFactor)?;
    let kernel = p_off.eval_rat_matrix(da.matrix()).nullspace();
    let hull = Subspace::span(n, &kernel)?;
    let ideal = bracket_closure(alg, &hull)?;
    let is_k = ideal.subalgebra.is_full();
    let quotient = if is_k {
        None
    } else {
        Some(quotient_by(&ideal.subalgebra, da.matrix())?)
    };
    Ok(NilKVerdict {
        is_k,
        hull,
        ideal,
        quotient,
    })
}

/// `x * y = x + y + [x, y]/2`, valid in step at most 2.
pub fn bch(alg: &RationalLieAlgebra, x: &[Rat], y: &[Rat]) -> Vec<Rat> {
    let half = Rat::new(Int::one(), Int::from(2));
    let br = alg.bracket(x, y);
    x.iter()
        .zip(y)
        .zip(&br)
        .map(|((a, b), c)| a + b + &half * c)
        .collect()
}

/// Solves `g = a * A(g)` in the simply connected group of a step-2 algebra:
/// first on the abelianization, then a central correction.
pub fn twisted_fixed_point_nilpotent(
    alg: &RationalLieAlgebra,
    a_mat: &RatMatrix,
    a: &[Rat],
) -> Result<Vec<Rat>> {
    let n = alg.dim();
    if a.len() != n {
        return Err(Error::DimensionMismatch("translation length".into()));
    }
    match alg.step() {
        Some(s) if s <= 2 => {}
        Some(s) => return Err(Error::Precondition(format!("nilpotency step {s} exceeds 2"))),
        None => return Err(Error::NotNilpotent),
    }
    let auto = AlgebraAutomorphism::new(alg, a_mat.clone())?;
    let ima = &RatMatrix::identity(n) - auto.matrix();
    let inv = ima
        .inverse()
        .ok_or_else(|| Error::Precondition("1 is an eigenvalue of the automorphism".into()))?;
    let g1 = inv.mul_vec(a);
    let half = Rat::new(Int::one(), Int::from(2));
    let ag1 = a_mat.mul_vec(&g1);
    let rhs: Vec<Rat> = alg.bracket(a, &ag1).iter().map(|c| &half * c).collect();
    let z = inv.mul_vec(&rhs);
    Ok(g1.iter().zip(&z).map(|(x, y)| x + y).collect())
}

/// `g^{-1} * (a * A(g))`, zero exactly at a twisted fixed point.
pub fn twisted_residual(alg: &RationalLieAlgebra, a_mat: &RatMatrix, a: &[Rat], g: &[Rat]) -> Vec<Rat> {
    let rhs = bch(alg, a, &a_mat.mul_vec(g));
    let neg: Vec<Rat> = g.iter().map(|x| -x).collect();
    bch(alg, &neg, &rhs)
}

/// Layers `g/Z_i` over `Z_i/Z_{i-1}` from the upper central series, ending
/// at the abelian quotient `g/Z_{u-1}`.
pub fn central_series_tower(alg: &RationalLieAlgebra) -> Result<TowerRecord> {
    let n = alg.dim();
    let zs = upper_central_series(alg)?;
    let u = zs.len() - 1;
    // adapted basis: outermost complement first, Z_1 last
    let mut cols: Vec<Vec<Rat>> = Vec::new();
    for i in (1..=u).rev() {
        let inner = &zs[i - 1];
        let mut cur = inner.clone();
        let mut part = Vec::new();
        for v in zs[i].basis() {
            if !cur.contains(v) {
                cur = cur.sum(&Subspace::span(n, std::slice::from_ref(v))?);
                part.push(v.clone());
            }
        }
        cols.extend(part);
    }
    let w = RatMatrix::from_columns(n, &cols);
    let conj = w.inverse().ok_or(Error::NotAFactor)?;
    let mut layers = Vec::new();
    for i in 1..u {
        let fiber = zs[i].dim() - zs[i - 1].dim();
        layers.push(TowerLayer {
            base_dim: n - zs[i].dim(),
            fiber_dim: fiber,
            conjugator: if i == 1 { conj.clone() } else { RatMatrix::identity(n) },
            provenance: LayerProvenance::CentralSeriesSplit,
        });
    }
    Ok(TowerRecord { layers })
}

/// Abelian algebra view of an integer matrix, for cross-checks.
pub fn abelian_automorphism(a: &IntMatrix) -> Result<(RationalLieAlgebra, AlgebraAutomorphism)> {
    let alg = RationalLieAlgebra::abelian(a.rows());
    let da = AlgebraAutomorphism::new(&alg, a.to_rat())?;
    Ok((alg, da))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::example_one;
    use crate::spectral::{classify, HierarchyTag};
    use crate::toral::AffineToralMap;
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(Int::from(p), Int::from(q))
    }

    fn rv(v: &[i64]) -> Vec<Rat> {
        v.iter().map(|&x| r(x, 1)).collect()
    }

    fn diag(d: &[Rat]) -> RatMatrix {
        let n = d.len();
        let mut m = RatMatrix::zeros(n, n);
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    #[test]
    fn jacobi_examples() {
        assert!(jacobi_check(&RationalLieAlgebra::heisenberg()).holds);
        assert!(jacobi_check(&RationalLieAlgebra::abelian(4)).holds);
        // [e0,e1] = e2, [e2,e0] = e1 and [e1,e2] = e1 is not a Lie bracket
        let bad = RationalLieAlgebra::from_triples_unchecked(
            3,
            &[(0, 1, 2, r(1, 1)), (2, 0, 1, r(1, 1)), (1, 2, 1, r(1, 1))],
        )
        .unwrap();
        let rep = jacobi_check(&bad);
        assert!(!rep.holds);
        assert_eq!(rep.counterexample, Some((0, 1, 2)));
        assert!(matches!(
            RationalLieAlgebra::from_triples(3, &[(0, 1, 2, r(1, 1)), (2, 0, 1, r(1, 1)), (1, 2, 1, r(1, 1))]),
            Err(Error::JacobiFailure(0, 1, 2))
        ));
    }

    #[test]
    fn central_series_examples() {
        let h = upper_central_series(&RationalLieAlgebra::heisenberg()).unwrap();
        assert_eq!(h, vec![Subspace::zero(3), Subspace::coordinate(3, &[2]), Subspace::full(3)]);
        let a = upper_central_series(&RationalLieAlgebra::abelian(3)).unwrap();
        assert_eq!(a, vec![Subspace::zero(3), Subspace::full(3)]);
        let f = upper_central_series(&RationalLieAlgebra::filiform(4)).unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(f[1], Subspace::coordinate(4, &[3]));
        assert_eq!(f[2], Subspace::coordinate(4, &[2, 3]));
        // sl2 has trivial center
        let sl2 = RationalLieAlgebra::from_triples(
            3,
            &[(0, 1, 1, r(2, 1)), (0, 2, 2, r(-2, 1)), (1, 2, 0, r(1, 1))],
        )
        .unwrap();
        assert_eq!(upper_central_series(&sl2), Err(Error::NotNilpotent));
    }

    #[test]
    fn closure_examples() {
        let h = RationalLieAlgebra::heisenberg();
        let c = bracket_closure(&h, &Subspace::coordinate(3, &[0, 1])).unwrap();
        assert!(c.subalgebra.is_full());
        assert!(c.is_ideal);
        let z = bracket_closure(&h, &Subspace::zero(3)).unwrap();
        assert!(z.subalgebra.is_zero());
        let e0 = bracket_closure(&h, &Subspace::coordinate(3, &[0])).unwrap();
        assert_eq!(e0.subalgebra.dim(), 1);
        assert!(!e0.is_ideal);
        let ab = RationalLieAlgebra::abelian(3);
        let v = Subspace::span(3, &[rv(&[1, 2, 3])]).unwrap();
        assert_eq!(bracket_closure(&ab, &v).unwrap().subalgebra, v);
    }

    #[test]
    fn heisenberg_k_test() {
        let h = RationalLieAlgebra::heisenberg();
        let m = RatMatrix::from_row_vecs(vec![rv(&[2, 1, 0]), rv(&[1, 1, 0]), rv(&[0, 0, 1])]).unwrap();
        let da = AlgebraAutomorphism::new(&h, m).unwrap();
        assert_eq!(da.integral_charpoly().unwrap(), IntPoly::from_i64(&[-1, 4, -4, 1]).unwrap());
        let v = is_k_nilmanifold(&h, &da).unwrap();
        assert_eq!(v.hull, Subspace::coordinate(3, &[0, 1]));
        assert!(v.is_k);
        let id = AlgebraAutomorphism::new(&h, RatMatrix::identity(3)).unwrap();
        let v = is_k_nilmanifold(&h, &id).unwrap();
        assert!(!v.is_k);
        assert!(v.ideal.subalgebra.is_zero());
        assert_eq!(v.quotient.unwrap().dim, 3);
        // the hull would be e0 + e1, but D e2 must be det(block) e2
        let bad = RatMatrix::from_row_vecs(vec![rv(&[2, 1, 0]), rv(&[1, 1, 0]), rv(&[0, 0, 2])]).unwrap();
        assert!(AlgebraAutomorphism::new(&h, bad).is_err());
    }

    #[test]
    fn example_one_is_not_k() {
        let (alg, da) = abelian_automorphism(example_one().linear()).unwrap();
        let v = is_k_nilmanifold(&alg, &da).unwrap();
        assert!(!v.is_k);
        assert!(v.hull.is_zero());
    }

    #[test]
    fn rational_charpoly_must_be_integral() {
        let h = RationalLieAlgebra::heisenberg();
        let m = diag(&[r(2, 1), r(1, 3), r(2, 3)]);
        let da = AlgebraAutomorphism::new(&h, m).unwrap();
        assert!(matches!(is_k_nilmanifold(&h, &da), Err(Error::Precondition(_))));
        let m = diag(&[r(2, 1), r(1, 2), r(1, 1)]);
        let da = AlgebraAutomorphism::new(&h, m).unwrap();
        assert!(matches!(da.integral_charpoly(), Err(Error::Precondition(_))));
        let m = diag(&[r(-1, 1), r(-1, 1), r(1, 1)]);
        let da = AlgebraAutomorphism::new(&h, m).unwrap();
        assert_eq!(da.integral_charpoly().unwrap(), IntPoly::from_i64(&[-1, -1, 1, 1]).unwrap());
    }

    #[test]
    fn twisted_fixed_points_in_heisenberg() {
        let h = RationalLieAlgebra::heisenberg();
        let bad = diag(&[r(2, 1), r(1, 2), r(1, 1)]);
        assert!(matches!(
            twisted_fixed_point_nilpotent(&h, &bad, &rv(&[1, 1, 1])),
            Err(Error::Precondition(_))
        ));
        let a_mat = diag(&[r(2, 1), r(3, 1), r(6, 1)]);
        let a = vec![r(1, 1), r(-2, 3), r(5, 7)];
        let g = twisted_fixed_point_nilpotent(&h, &a_mat, &a).unwrap();
        assert!(twisted_residual(&h, &a_mat, &a, &g).iter().all(Zero::is_zero));
        // abelian: the plain linear solve
        let ab = RationalLieAlgebra::abelian(2);
        let m = RatMatrix::from_row_vecs(vec![rv(&[2, 1]), rv(&[1, 1])]).unwrap();
        let g = twisted_fixed_point_nilpotent(&ab, &m, &[r(1, 2), r(0, 1)]).unwrap();
        assert_eq!(g, vec![r(0, 1), r(-1, 2)]);
        assert!(twisted_fixed_point_nilpotent(&RationalLieAlgebra::filiform(4), &RatMatrix::identity(4), &rv(&[0, 0, 0, 0])).is_err());
    }

    #[test]
    fn tower_of_heisenberg() {
        let t = central_series_tower(&RationalLieAlgebra::heisenberg()).unwrap();
        assert_eq!(t.layers.len(), 1);
        assert_eq!((t.layers[0].base_dim, t.layers[0].fiber_dim), (2, 1));
        let t = central_series_tower(&RationalLieAlgebra::filiform(4)).unwrap();
        assert_eq!(t.layers.len(), 2);
        assert!(central_series_tower(&RationalLieAlgebra::abelian(2)).unwrap().layers.is_empty());
    }

    fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> IntMatrix {
        let mut m = IntMatrix::identity(n);
        for &(i, j, c) in ops {
            let (i, j) = (i % n, j % n);
            if i != j {
                let mut e = IntMatrix::identity(n);
                e[(i, j)] = Int::from(c);
                m = &m * &e;
            }
        }
        m
    }

    proptest! {
        #[test]
        fn abelian_k_agrees_with_spectral(
            n in 1usize..=4,
            ops in prop::collection::vec((0usize..4, 0usize..4, -2i64..=2), 0..8),
        ) {
            let a = unimodular(n, &ops);
            let (alg, da) = abelian_automorphism(&a).unwrap();
            let nil = is_k_nilmanifold(&alg, &da).unwrap().is_k;
            let tag = classify(&AffineToralMap::linear_only(a).unwrap()).unwrap().tag;
            prop_assert_eq!(nil, tag == HierarchyTag::K);
        }

        #[test]
        fn closure_is_idempotent_and_monotone(
            coeffs in prop::collection::vec(-3i64..=3, 8),
        ) {
            let alg = RationalLieAlgebra::filiform(4);
            let v = Subspace::span(4, &[rv(&coeffs[..4]), ]).unwrap();
            let w = v.sum(&Subspace::span(4, &[rv(&coeffs[4..])]).unwrap());
            let cv = bracket_closure(&alg, &v).unwrap().subalgebra;
            let cw = bracket_closure(&alg, &w).unwrap().subalgebra;
            prop_assert_eq!(bracket_closure(&alg, &cv).unwrap().subalgebra, cv.clone());
            prop_assert!(cw.contains_subspace(&cv));
        }

        #[test]
        fn central_series_is_characteristic(a in 1i64..4, b in -3i64..=3, c in -3i64..=3) {
            // upper triangular automorphisms of the Heisenberg algebra
            let h = RationalLieAlgebra::heisenberg();
            let m = RatMatrix::from_row_vecs(vec![rv(&[1, a, 0]), rv(&[0, 1, 0]), rv(&[b, c, 1])]).unwrap();
            let da = AlgebraAutomorphism::new(&h, m.clone()).unwrap();
            for z in upper_central_series(&h).unwrap() {
                prop_assert_eq!(z.image(da.matrix()), z);
            }
        }
    }
}
