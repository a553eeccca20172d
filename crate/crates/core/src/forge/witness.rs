//! Centralizer witnesses for a perturbation with periodic base.
//!
//! Block coordinates `(x, y)` split the torus into the base `x` and the
//! fiber `y`, with `f(x, y) = (β(x), B21 x + B22 y + t2)` and `β^d = id`.
//! If `B22^d` fixes a vector the fiber carries invariant flows (case 1);
//! otherwise the fibration is a product after an affine change of fiber
//! coordinates (case 2).

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use super::expr::{commutes_exactly, PeriodicFn, SmoothMap, SmoothMapExpr, BUMP_SLOPE};
use super::{rat_mat_vec, TranslationalPerturbation};
use crate::error::{Error, Result};
use crate::exact::{kernel_lattice, Int, IntLattice, IntMatrix, Rat, RatMatrix};
use crate::json;
use crate::structure::ToralFibration;
use crate::toral::{mat_vec, vec_sub, AffineToralMap, SymReal};

fn fiber_has_fixed_vector(fib: &ToralFibration, d: u64) -> bool {
    let b = fib.fiber_linear.pow(d);
    fib.fiber_dim > 0 && (&b - &IntMatrix::identity(fib.fiber_dim)).det().is_zero()
}

/// Functions of the base coordinates viewed on the whole torus.
fn lift_from_base(p: &PeriodicFn, base_dim: usize, n: usize) -> Result<PeriodicFn> {
    let mut proj = IntMatrix::zeros(base_dim, n);
    for i in 0..base_dim {
        proj[(i, i)] = Int::one();
    }
    p.compose_affine(&proj, &vec![SymReal::zero(); base_dim])
}

/// Invariant fiber flows: `h(x, y) = (x, y + V(x))` with `V(β x) = B22 V(x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Case1Witness {
    pub map: AffineToralMap,
    pub fibration: ToralFibration,
    pub base_period: u64,
    /// `ker(B22^d - I)` in fiber coordinates.
    pub fixed_lattice: IntLattice,
    /// First HNF basis vector of the fixed lattice.
    pub fiber_vector: Vec<Int>,
}

impl Case1Witness {
    /// The fiber vector in original coordinates.
    pub fn direction(&self) -> Vec<Int> {
        let fib = &self.fibration;
        let mut v = vec![Int::zero(); fib.base_dim];
        v.extend(self.fiber_vector.iter().cloned());
        fib.conjugator()
            .inverse_unimodular()
            .expect("unimodular conjugator")
            .mul_vec(&v)
    }

    /// Family member along the default fiber vector.
    pub fn family_member(&self, phi: &PeriodicFn) -> Result<SmoothMap> {
        self.family_member_along(phi, &self.fiber_vector)
    }

    /// `h = U^{-1} ∘ (x, y + V(x)) ∘ U` with
    /// `V(x) = (1/d) sum_{j<d} φ(β^{-j} x) B22^j v`.
    pub fn family_member_along(&self, phi: &PeriodicFn, v: &[Int]) -> Result<SmoothMap> {
        let fib = &self.fibration;
        let (d1, d2) = (fib.base_dim, fib.fiber_dim);
        let n = d1 + d2;
        if phi.dim() != d1 {
            return Err(Error::DimensionMismatch(format!(
                "base function on T^{} for a base of dimension {d1}",
                phi.dim()
            )));
        }
        if v.len() != d2 || !self.fixed_lattice.contains(v) {
            return Err(Error::InvalidInput("vector is not fixed by B22^d".into()));
        }
        let d = self.base_period;
        let weight = Rat::new(Int::one(), Int::from(d));
        let mut comps = vec![PeriodicFn::zero(n); d2];
        let mut w = v.to_vec();
        for j in 0..d {
            let back = fib.base.power(-(j as i64));
            let term = lift_from_base(&phi.compose_affine(back.linear(), back.translation())?, d1, n)?
                .scale(&weight);
            for (r, wr) in w.iter().enumerate() {
                if !wr.is_zero() {
                    comps[r] = comps[r].add(&term.scale(&Rat::from_integer(wr.clone())))?;
                }
            }
            w = fib.fiber_linear.mul_vec(&w);
        }
        let mut pert = vec![PeriodicFn::zero(n); d1];
        pert.extend(comps);
        SmoothMap::near_identity(pert)?.conjugate_by(fib.conjugator())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "case": 1,
            "base_period": self.base_period,
            "fixed_lattice": json::lattice(&self.fixed_lattice),
            "fiber_vector": json::int_vec(&self.fiber_vector),
            "direction": json::int_vec(&self.direction()),
        })
    }
}

pub fn build_case1_witness(p: &TranslationalPerturbation) -> Result<Case1Witness> {
    let fib = &p.fibration;
    let d = p.base_period;
    if fib.fiber_dim == 0 {
        return Err(Error::Precondition("the fibration has no fiber".into()));
    }
    if !fiber_has_fixed_vector(fib, d) {
        return Err(Error::Precondition(format!(
            "B22^{d} has no eigenvalue 1: use the product construction (case 2)"
        )));
    }
    let m = &fib.fiber_linear.pow(d) - &IntMatrix::identity(fib.fiber_dim);
    let fixed_lattice = kernel_lattice(&m);
    let fiber_vector = fixed_lattice.basis_vectors()[0].clone();
    Ok(Case1Witness {
        map: p.perturbed.clone(),
        fibration: fib.clone(),
        base_period: d,
        fixed_lattice,
        fiber_vector,
    })
}

/// Product trivialization `Ψ(x, y) = (x, y - G x - g0)` with
/// `Ψ ∘ f ∘ Ψ^{-1} = β × B22`.
#[derive(Clone, Debug, PartialEq)]
pub struct Case2Witness {
    pub map: AffineToralMap,
    pub fibration: ToralFibration,
    pub base_period: u64,
    /// Solution of `G B11 - B22 G = B21`.
    pub coupling_solution: IntMatrix,
    /// `g0 = (I - B22)^{-1} (t2 - G t1)`.
    pub offset: Vec<SymReal>,
}

impl Case2Witness {
    /// `Ψ` in block coordinates.
    pub fn trivialization_block(&self) -> AffineToralMap {
        let fib = &self.fibration;
        let (d1, d2) = (fib.base_dim, fib.fiber_dim);
        let n = d1 + d2;
        let mut lin = IntMatrix::identity(n);
        for i in 0..d2 {
            for j in 0..d1 {
                lin[(d1 + i, j)] = -self.coupling_solution[(i, j)].clone();
            }
        }
        let mut t = vec![SymReal::zero(); d1];
        t.extend(self.offset.iter().map(|g| -g));
        AffineToralMap::with_context(lin, t, self.map.context().clone()).expect("unimodular")
    }

    /// `Ψ` in original coordinates.
    pub fn trivialization(&self) -> Result<SmoothMap> {
        SmoothMap::from_affine(&self.trivialization_block()).conjugate_by(self.fibration.conjugator())
    }

    /// `Ψ ∘ f ∘ Ψ^{-1}` in block coordinates.
    pub fn product_form(&self) -> Result<AffineToralMap> {
        let psi = self.trivialization_block();
        psi.compose(&self.fibration.conjugated)?.compose(&psi.inverse())
    }

    /// Exact block check: `Ψ ∘ f ∘ Ψ^{-1}` equals `β × B22` with zero fiber
    /// translation.
    pub fn product_is_exact(&self) -> Result<bool> {
        let prod = self.product_form()?;
        let fib = &self.fibration;
        let d1 = fib.base_dim;
        let n = d1 + fib.fiber_dim;
        let l = prod.linear();
        let blocks_ok = (0..n).all(|i| {
            (0..n).all(|j| {
                let expected = match (i < d1, j < d1) {
                    (true, true) => fib.base.linear()[(i, j)].clone(),
                    (false, false) => fib.fiber_linear[(i - d1, j - d1)].clone(),
                    _ => Int::zero(),
                };
                l[(i, j)] == expected
            })
        });
        let t = prod.translation();
        let trans_ok = t[..d1] == *fib.base.translation() && t[d1..].iter().all(SymReal::is_zero);
        Ok(blocks_ok && trans_ok)
    }

    /// `Ψ^{-1} ∘ (ψ × id) ∘ Ψ` for `ψ = id + s` commuting with the base map
    /// and with `sup ||Ds|| < 1`.
    pub fn family_member(&self, s: &[PeriodicFn]) -> Result<SmoothMap> {
        let bound: f64 = s.iter().map(PeriodicFn::slope_bound).fold(0.0, f64::max);
        if bound >= 1.0 {
            return Err(Error::Precondition(format!(
                "id + s may fail to be a diffeomorphism: slope bound {bound:.4} >= 1"
            )));
        }
        self.member_unchecked(s)
    }

    fn member_unchecked(&self, s: &[PeriodicFn]) -> Result<SmoothMap> {
        let fib = &self.fibration;
        let (d1, d2) = (fib.base_dim, fib.fiber_dim);
        let n = d1 + d2;
        if s.len() != d1 || s.iter().any(|p| p.dim() != d1) {
            return Err(Error::DimensionMismatch("base perturbation shape".into()));
        }
        let psi = SmoothMap::near_identity(s.to_vec())?;
        if !commutes_exactly(&fib.base, &psi)? {
            return Err(Error::Precondition("ψ does not commute with the base map".into()));
        }
        let lifted: Vec<PeriodicFn> = s
            .iter()
            .map(|p| lift_from_base(p, d1, n))
            .collect::<Result<_>>()?;
        let mut pert = lifted.clone();
        pert.extend(super::expr::combine(&self.coupling_solution, &lifted, n)?);
        SmoothMap::near_identity(pert)?.conjugate_by(fib.conjugator())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "case": 2,
            "base_period": self.base_period,
            "coupling_solution": json::int_matrix(&self.coupling_solution),
            "offset": self.offset.iter().map(SymReal::to_json).collect::<Vec<_>>(),
            "trivialization": SmoothMap::from_affine(&self.trivialization_block()).to_json(),
        })
    }
}

/// Solves `G B11 - B22 G = B21` over Q.
fn solve_coupling(fib: &ToralFibration) -> Result<RatMatrix> {
    let b11 = fib.base.linear();
    let b22 = &fib.fiber_linear;
    let b21 = &fib.coupling;
    let (d1, d2) = (fib.base_dim, fib.fiber_dim);
    let m = d1 * d2;
    let var = |k: usize, l: usize| k * d1 + l;
    let mut sys = RatMatrix::zeros(m, m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..d2 {
        for j in 0..d1 {
            let row = var(i, j);
            for l in 0..d1 {
                sys[(row, var(i, l))] += Rat::from_integer(b11[(l, j)].clone());
            }
            for k in 0..d2 {
                sys[(row, var(k, j))] -= Rat::from_integer(b22[(i, k)].clone());
            }
            rhs.push(Rat::from_integer(b21[(i, j)].clone()));
        }
    }
    let g = sys.solve(&rhs).ok_or_else(|| {
        Error::Precondition("base and fiber blocks share an eigenvalue".into())
    })?;
    RatMatrix::from_vec(d2, d1, g)
}

pub fn build_case2_witness(p: &TranslationalPerturbation) -> Result<Case2Witness> {
    let fib = &p.fibration;
    let d = p.base_period;
    if fib.fiber_dim == 0 {
        return Err(Error::Precondition("the fibration has no fiber".into()));
    }
    if fiber_has_fixed_vector(fib, d) {
        return Err(Error::Precondition(format!(
            "B22^{d} has eigenvalue 1: use the fiber flow construction (case 1)"
        )));
    }
    let g = solve_coupling(fib)?;
    if !g.is_integral() {
        return Err(Error::Precondition(
            "the coupling solution is not integral: no trivialization on this torus".into(),
        ));
    }
    let g = g.map(|x| x.to_integer());
    let t1 = fib.base.translation();
    let rhs = vec_sub(&fib.fiber_translation, &mat_vec(&g, t1));
    let ima = (&IntMatrix::identity(fib.fiber_dim) - &fib.fiber_linear).to_rat();
    let inv = ima.inverse().ok_or_else(|| Error::Precondition("1 is an eigenvalue of B22".into()))?;
    Ok(Case2Witness {
        map: p.perturbed.clone(),
        fibration: fib.clone(),
        base_period: d,
        coupling_solution: g,
        offset: rat_mat_vec(&inv, &rhs),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseChoice {
    Auto,
    One,
    Two,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Case1(Case1Witness),
    Case2(Case2Witness),
}

impl Witness {
    pub fn to_json(&self) -> Value {
        match self {
            Witness::Case1(w) => w.to_json(),
            Witness::Case2(w) => w.to_json(),
        }
    }
}

/// Case 1 whenever its precondition holds under `Auto`.
pub fn build_witness(p: &TranslationalPerturbation, choice: CaseChoice) -> Result<Witness> {
    match choice {
        CaseChoice::One => build_case1_witness(p).map(Witness::Case1),
        CaseChoice::Two => build_case2_witness(p).map(Witness::Case2),
        CaseChoice::Auto => {
            if fiber_has_fixed_vector(&p.fibration, p.base_period) {
                build_case1_witness(p).map(Witness::Case1)
            } else {
                build_case2_witness(p).map(Witness::Case2)
            }
        }
    }
}

impl Witness {
    pub fn case(&self) -> u8 {
        match self {
            Witness::Case1(_) => 1,
            Witness::Case2(_) => 2,
        }
    }

    pub fn base_period(&self) -> u64 {
        match self {
            Witness::Case1(w) => w.base_period,
            Witness::Case2(w) => w.base_period,
        }
    }

    pub fn fibration(&self) -> &ToralFibration {
        match self {
            Witness::Case1(w) => &w.fibration,
            Witness::Case2(w) => &w.fibration,
        }
    }

    /// Default family member: `amplitude * sin(2π d x_1)` on the base, with
    /// amplitude 1/10 for fiber flows and 1/20 for product maps.
    pub fn sample_member(&self) -> Result<SmoothMap> {
        let fib = self.fibration();
        let d1 = fib.base_dim;
        let mut freq = vec![Int::zero(); d1];
        freq[0] = Int::from(self.base_period());
        match self {
            Witness::Case1(w) => {
                w.family_member(&PeriodicFn::sin(Rat::new(Int::one(), Int::from(10)), freq, Rat::zero()))
            }
            Witness::Case2(w) => {
                let mut s = vec![PeriodicFn::zero(d1); d1];
                s[0] = PeriodicFn::sin(Rat::new(Int::one(), Int::from(20)), freq, Rat::zero());
                w.family_member(&s)
            }
        }
    }
}

/// A bump `amplitude * bump` supported on `(support.0, support.1)` in the
/// one-dimensional base.
#[derive(Clone, Debug, PartialEq)]
pub struct BumpSpec {
    pub support: (Rat, Rat),
    pub amplitude: Rat,
}

fn circle_distance(a: &Rat, b: &Rat) -> Rat {
    let d = a - b;
    let d = &d - d.floor();
    let other = Rat::one() - &d;
    d.min(other)
}

/// A compactly supported base diffeomorphism `x + s(x)`, copied to the `d`
/// sheets of the base orbit and lifted through `Ψ`.
pub fn diffc_embedding_generator(
    p: &TranslationalPerturbation,
    w: &Case2Witness,
    bump: &BumpSpec,
) -> Result<SmoothMapExpr> {
    if p.perturbed != w.map {
        return Err(Error::InvalidInput("witness built for a different map".into()));
    }
    let fib = &w.fibration;
    if fib.base_dim != 1 {
        return Err(Error::Precondition(format!(
            "compact-support generators need a circle base, got dimension {}",
            fib.base_dim
        )));
    }
    let d = w.base_period.max(1);
    let (lo, hi) = &bump.support;
    let width = hi - lo;
    if !width.is_positive() {
        return Err(Error::InvalidInput("empty bump support".into()));
    }
    if width >= Rat::new(Int::one(), Int::from(d)) {
        return Err(Error::Precondition(format!(
            "support width {width} is not below 1/{d}: the sheets would overlap"
        )));
    }
    let half = &width / Rat::from_integer(Int::from(2));
    let center = (lo + hi) / Rat::from_integer(Int::from(2));
    let centers: Vec<Rat> = (0..d)
        .map(|j| {
            let img = fib.base.power(j as i64);
            let c = Rat::from_integer(img.linear()[(0, 0)].clone()) * &center;
            let t = img.translation()[0].rational_part().clone();
            c + t
        })
        .collect();
    for i in 0..centers.len() {
        for j in 0..i {
            if circle_distance(&centers[i], &centers[j]) < width {
                return Err(Error::Precondition("images of the support overlap".into()));
            }
        }
    }
    let slope = bump.amplitude.abs().to_f64().unwrap_or(f64::INFINITY) * BUMP_SLOPE
        / half.to_f64().unwrap_or(f64::NAN);
    if slope >= 1.0 {
        return Err(Error::Precondition(format!(
            "bump slope bound {slope:.4} >= 1: not a diffeomorphism"
        )));
    }
    let base_bump = PeriodicFn::bump(bump.amplitude.clone(), vec![Int::one()], center, half)?;
    let mut s = PeriodicFn::zero(1);
    for j in 0..d {
        // β^j ∘ (id + b) ∘ β^{-j} = id + B11^j b(β^{-j} x) on disjoint supports
        let back = fib.base.power(-(j as i64));
        let sign = Rat::from_integer(fib.base.linear().pow(j)[(0, 0)].clone());
        s = s.add(&base_bump.compose_affine(back.linear(), back.translation())?.scale(&sign))?;
    }
    Ok(SmoothMapExpr::Map(w.member_unchecked(&[s])?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::matrix::int_vec;
    use crate::fixtures::{cat_matrix, example_one, example_two};
    use crate::forge::rationalize_base;
    use crate::structure::split_cyclotomic_base;
    use crate::toral::SymbolContext;

    fn r(p: i64, q: i64) -> Rat {
        Rat::new(Int::from(p), Int::from(q))
    }

    fn perturb(f: &AffineToralMap) -> TranslationalPerturbation {
        let fib = split_cyclotomic_base(f).unwrap();
        rationalize_base(f, &fib, &r(1, 100)).unwrap()
    }

    #[test]
    fn example_one_flows() {
        let p = perturb(&example_one());
        let w = build_case1_witness(&p).unwrap();
        assert_eq!(w.fiber_vector, int_vec(&[0, 1]));
        assert_eq!(w.direction(), int_vec(&[0, 0, 1]));
        let phi = PeriodicFn::sin(r(1, 10), int_vec(&[2]), Rat::zero());
        let h = w.family_member(&phi).unwrap();
        let expected = SmoothMap::near_identity(vec![
            PeriodicFn::zero(3),
            PeriodicFn::zero(3),
            PeriodicFn::sin(r(1, 10), int_vec(&[2, 0, 0]), Rat::zero()),
        ])
        .unwrap();
        assert!(h.same_map(&expected));
        assert!(commutes_exactly(&p.perturbed, &h).unwrap());
        // an odd frequency averages away across the two sheets
        let odd = PeriodicFn::sin(r(1, 10), int_vec(&[1]), Rat::zero());
        assert!(w.family_member(&odd).unwrap().is_identity());
        assert!(build_case2_witness(&p).is_err());
    }

    #[test]
    fn example_two_product() {
        let p = perturb(&example_two());
        assert!(build_case1_witness(&p).is_err());
        let w = build_case2_witness(&p).unwrap();
        assert_eq!(w.coupling_solution, IntMatrix::from_i64_rows(&[&[0], &[-1]]));
        let prod = w.product_form().unwrap();
        let expected = AffineToralMap::new(
            IntMatrix::from_i64_rows(&[&[1, 0, 0], &[0, 2, 1], &[0, 1, 1]]),
            vec![SymReal::from_ratio(1, 2), SymReal::zero(), SymReal::zero()],
        )
        .unwrap();
        assert_eq!(prod, expected);
        assert!(w.product_is_exact().unwrap());
        let s = PeriodicFn::sin(r(1, 20), int_vec(&[2]), Rat::zero());
        let g = w.family_member(std::slice::from_ref(&s)).unwrap();
        assert!(commutes_exactly(&p.perturbed, &g).unwrap());
        // w(x, y, z) = (x + s, y, z - s)
        let expected = SmoothMap::near_identity(vec![
            PeriodicFn::sin(r(1, 20), int_vec(&[2, 0, 0]), Rat::zero()),
            PeriodicFn::zero(3),
            PeriodicFn::sin(r(-1, 20), int_vec(&[2, 0, 0]), Rat::zero()),
        ])
        .unwrap();
        assert!(g.same_map(&expected));
        // an odd frequency does not commute with the half rotation
        let odd = PeriodicFn::sin(r(1, 20), int_vec(&[1]), Rat::zero());
        assert!(w.family_member(&[odd]).is_err());
        let big = PeriodicFn::sin(r(1, 2), int_vec(&[2]), Rat::zero());
        assert!(w.family_member(&[big]).is_err());
    }

    #[test]
    fn fixed_base_reduces_to_twisted_fixed_point() {
        let a = IntMatrix::identity(1).direct_sum(&cat_matrix());
        let t = vec![SymReal::zero(), SymReal::from_ratio(1, 2), SymReal::zero()];
        let f = AffineToralMap::new(a, t).unwrap();
        let p = perturb(&f);
        assert_eq!(p.base_period, 1);
        let w = build_case2_witness(&p).unwrap();
        assert!(w.coupling_solution.is_zero());
        let x = crate::forge::twisted_fixed_point(&cat_matrix(), &t_fiber()).unwrap();
        assert_eq!(w.offset, x);
        let psi = w.trivialization_block();
        assert!(psi.linear().is_identity());
        assert!(w.product_form().unwrap().translation().iter().all(SymReal::is_zero));
    }

    fn t_fiber() -> Vec<SymReal> {
        vec![SymReal::from_ratio(1, 2), SymReal::zero()]
    }

    #[test]
    fn bump_generators() {
        let p = perturb(&example_two());
        let w = build_case2_witness(&p).unwrap();
        let spec = BumpSpec { support: (Rat::zero(), r(1, 4)), amplitude: r(1, 20) };
        let g = diffc_embedding_generator(&p, &w, &spec).unwrap();
        let g = g.as_map().unwrap();
        assert!(commutes_exactly(&p.perturbed, g).unwrap());
        let ctx = SymbolContext::new();
        let num = g.numeric(&ctx).unwrap();
        // fixed outside both sheets, moved inside
        let x = num.eval(&[0.3, 0.2, 0.7]);
        assert!((x[0] - 0.3).abs() < 1e-15 && (x[2] - 0.7).abs() < 1e-15);
        let y = num.eval(&[0.625, 0.2, 0.7]);
        assert!((y[0] - 0.675).abs() < 1e-12);
        let wide = BumpSpec { support: (Rat::zero(), r(3, 4)), amplitude: r(1, 20) };
        assert!(diffc_embedding_generator(&p, &w, &wide).is_err());
        let flat = BumpSpec { support: (Rat::zero(), r(1, 4)), amplitude: Rat::zero() };
        let id = diffc_embedding_generator(&p, &w, &flat).unwrap();
        assert!(id.as_map().unwrap().is_identity());
    }

    #[test]
    fn sample_members_match_the_examples() {
        let p = perturb(&example_one());
        let w = build_witness(&p, CaseChoice::Auto).unwrap();
        assert_eq!(w.case(), 1);
        let h = w.sample_member().unwrap();
        let z = PeriodicFn::sin(r(1, 10), int_vec(&[2, 0, 0]), Rat::zero());
        let expected = SmoothMap::near_identity(vec![PeriodicFn::zero(3), PeriodicFn::zero(3), z]).unwrap();
        assert!(h.same_map(&expected));
        let p = perturb(&example_two());
        let w = build_witness(&p, CaseChoice::Auto).unwrap();
        assert_eq!(w.case(), 2);
        assert!(commutes_exactly(&p.perturbed, &w.sample_member().unwrap()).unwrap());
        assert!(build_witness(&p, CaseChoice::One).is_err());
    }
}
