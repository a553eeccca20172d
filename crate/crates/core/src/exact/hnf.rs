//! Column Hermite normal form and Smith normal form over Z.
//!
//! Convention: `H = M * U` with `U` unimodular. Rows are scanned top to
//! bottom; each pivot is positive, entries to its left in the same row lie
//! in `[0, pivot)`, and zero columns are moved to the right.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::matrix::{Int, IntMatrix};

/// Column operation on `(a, b)`: `(a, b) <- (x a + y b, -(b/g) a + (a/g) b)`.
fn combine_columns(m: &mut IntMatrix, c: usize, j: usize, x: &Int, y: &Int, u: &Int, v: &Int) {
    for i in 0..m.rows() {
        let a = m[(i, c)].clone();
        let b = m[(i, j)].clone();
        m[(i, c)] = x * &a + y * &b;
        m[(i, j)] = u * &a + v * &b;
    }
}

fn add_column_multiple(m: &mut IntMatrix, dst: usize, src: usize, k: &Int) {
    if k.is_zero() {
        return;
    }
    for i in 0..m.rows() {
        let t = k * &m[(i, src)];
        m[(i, dst)] += t;
    }
}

fn negate_column(m: &mut IntMatrix, j: usize) {
    for i in 0..m.rows() {
        m[(i, j)] = -m[(i, j)].clone();
    }
}

/// Column Hermite normal form. Returns `(H, U)` with `H = M U`, `U` unimodular.
pub fn hnf(m: &IntMatrix) -> (IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut h = m.clone();
    let mut u = IntMatrix::identity(cols);
    let mut c = 0;
    for i in 0..rows {
        if c == cols {
            break;
        }
        for j in c + 1..cols {
            if h[(i, j)].is_zero() {
                continue;
            }
            let a = h[(i, c)].clone();
            let b = h[(i, j)].clone();
            if a.is_zero() {
                h.swap_columns(c, j);
                u.swap_columns(c, j);
                continue;
            }
            let e = a.extended_gcd(&b);
            let g = e.gcd;
            let (x, y) = (e.x, e.y);
            let nu = -(&b / &g);
            let nv = &a / &g;
            combine_columns(&mut h, c, j, &x, &y, &nu, &nv);
            combine_columns(&mut u, c, j, &x, &y, &nu, &nv);
        }
        if h[(i, c)].is_zero() {
            continue;
        }
        if h[(i, c)].is_negative() {
            negate_column(&mut h, c);
            negate_column(&mut u, c);
        }
        let p = h[(i, c)].clone();
        for j in 0..c {
            let q = h[(i, j)].div_floor(&p);
            if !q.is_zero() {
                let k = -q;
                add_column_multiple(&mut h, j, c, &k);
                add_column_multiple(&mut u, j, c, &k);
            }
        }
        c += 1;
    }
    (h, u)
}

/// Number of nonzero columns of a matrix already in column HNF.
pub fn hnf_rank(h: &IntMatrix) -> usize {
    (0..h.cols())
        .take_while(|&j| (0..h.rows()).any(|i| !h[(i, j)].is_zero()))
        .count()
}

/// Smith normal form: returns `(P, D, Q)` with `P M Q = D`, `P`, `Q` unimodular,
/// `D` diagonal with nonnegative entries `d_1 | d_2 | ...`.
pub fn snf(m: &IntMatrix) -> (IntMatrix, IntMatrix, IntMatrix) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut p = IntMatrix::identity(rows);
    let mut q = IntMatrix::identity(cols);
    let rank_bound = rows.min(cols);
    for t in 0..rank_bound {
        // smallest nonzero entry in the trailing block
        let Some((pi, pj)) = min_entry(&d, t) else {
            break;
        };
        d.swap_rows(t, pi);
        p.swap_rows(t, pi);
        d.swap_columns(t, pj);
        q.swap_columns(t, pj);
        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let k = d[(i, t)].div_floor(&d[(t, t)]);
                add_row_multiple(&mut d, i, t, &-k.clone());
                add_row_multiple(&mut p, i, t, &-k);
                if !d[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let k = d[(t, j)].div_floor(&d[(t, t)]);
                add_column_multiple(&mut d, j, t, &-k.clone());
                add_column_multiple(&mut q, j, t, &-k);
                if !d[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                let (pi, pj) = min_entry_cross(&d, t);
                d.swap_rows(t, pi);
                p.swap_rows(t, pi);
                d.swap_columns(t, pj);
                q.swap_columns(t, pj);
                continue;
            }
            // divisibility of the trailing block
            let piv = d[(t, t)].clone();
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !d[(i, j)].is_multiple_of(&piv));
            match bad {
                Some((i, _)) => {
                    add_row_multiple(&mut d, t, i, &Int::one());
                    add_row_multiple(&mut p, t, i, &Int::one());
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            for j in 0..cols {
                d[(t, j)] = -d[(t, j)].clone();
            }
            for j in 0..rows {
                p[(t, j)] = -p[(t, j)].clone();
            }
        }
    }
    (p, d, q)
}

fn min_entry(d: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, Int)> = None;
    for i in t..d.rows() {
        for j in t..d.cols() {
            let a = d[(i, j)].abs();
            if !a.is_zero() && best.as_ref().is_none_or(|b| a < b.2) {
                best = Some((i, j, a));
            }
        }
    }
    best.map(|(i, j, _)| (i, j))
}

/// Smallest nonzero entry in row `t` / column `t` of the trailing block.
fn min_entry_cross(d: &IntMatrix, t: usize) -> (usize, usize) {
    let mut best = (t, t, d[(t, t)].abs());
    for i in t + 1..d.rows() {
        let a = d[(i, t)].abs();
        if !a.is_zero() && (best.2.is_zero() || a < best.2) {
            best = (i, t, a);
        }
    }
    for j in t + 1..d.cols() {
        let a = d[(t, j)].abs();
        if !a.is_zero() && (best.2.is_zero() || a < best.2) {
            best = (t, j, a);
        }
    }
    (best.0, best.1)
}

fn add_row_multiple(m: &mut IntMatrix, dst: usize, src: usize, k: &Int) {
    if k.is_zero() {
        return;
    }
    for j in 0..m.cols() {
        let t = k * &m[(src, j)];
        m[(dst, j)] += t;
    }
}

/// Nonzero diagonal entries of the Smith form.
pub fn elementary_divisors(m: &IntMatrix) -> Vec<Int> {
    let (_, d, _) = snf(m);
    (0..d.rows().min(d.cols()))
        .map(|i| d[(i, i)].clone())
        .filter(|x| !x.is_zero())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn is_column_hnf(h: &IntMatrix) -> bool {
        let mut c = 0;
        for i in 0..h.rows() {
            if c == h.cols() {
                break;
            }
            if (c + 1..h.cols()).any(|j| !h[(i, j)].is_zero()) {
                return false;
            }
            if h[(i, c)].is_zero() {
                continue;
            }
            if !h[(i, c)].is_positive() {
                return false;
            }
            for j in 0..c {
                if h[(i, j)].is_negative() || h[(i, j)] >= h[(i, c)] {
                    return false;
                }
            }
            c += 1;
        }
        (c..h.cols()).all(|j| (0..h.rows()).all(|i| h[(i, j)].is_zero()))
    }

    #[test]
    fn small_hnf() {
        let m = IntMatrix::from_i64_rows(&[&[2, 4], &[0, 6]]);
        let (h, u) = hnf(&m);
        assert_eq!(&m * &u, h);
        assert!(u.det().abs().is_one());
        assert_eq!(h, IntMatrix::from_i64_rows(&[&[2, 0], &[0, 6]]));
    }

    #[test]
    fn identity_and_zero() {
        let (h, u) = hnf(&IntMatrix::identity(3));
        assert_eq!(h, IntMatrix::identity(3));
        assert_eq!(u, IntMatrix::identity(3));
        let z = IntMatrix::zeros(2, 2);
        let (h, u) = hnf(&z);
        assert!(h.is_zero());
        assert_eq!(u, IntMatrix::identity(2));
    }

    #[test]
    fn snf_of_diag_pair() {
        let m = IntMatrix::from_i64_rows(&[&[2, 0], &[0, 3]]);
        assert_eq!(elementary_divisors(&m), vec![Int::from(1), Int::from(6)]);
        let (p, d, q) = snf(&m);
        assert_eq!(&(&p * &m) * &q, d);
    }

    fn small_matrix(max_r: usize, max_c: usize) -> impl Strategy<Value = IntMatrix> {
        (1..=max_r, 1..=max_c).prop_flat_map(|(r, c)| {
            prop::collection::vec(-6i64..=6, r * c).prop_map(move |v| {
                IntMatrix::from_vec(r, c, v.into_iter().map(Int::from).collect()).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn hnf_contract(m in small_matrix(5, 5)) {
            let (h, u) = hnf(&m);
            prop_assert_eq!(&m * &u, h.clone());
            prop_assert!(u.det().abs().is_one());
            prop_assert!(is_column_hnf(&h));
        }

        #[test]
        fn hnf_is_canonical(m in small_matrix(4, 4), k in -3i64..=3) {
            // M and M*V (V unimodular shear) span the same column lattice.
            let c = m.cols();
            let mut v = IntMatrix::identity(c);
            if c > 1 { v[(1, 0)] = Int::from(k); }
            let (h1, _) = hnf(&m);
            let (h2, _) = hnf(&(&m * &v));
            prop_assert_eq!(h1, h2);
        }

        #[test]
        fn snf_contract(m in small_matrix(4, 4)) {
            let (p, d, q) = snf(&m);
            prop_assert!(p.det().abs().is_one());
            prop_assert!(q.det().abs().is_one());
            prop_assert_eq!(&(&p * &m) * &q, d.clone());
            let k = d.rows().min(d.cols());
            for i in 0..k {
                for j in 0..d.cols() {
                    if i != j { prop_assert!(d[(i, j)].is_zero()); }
                }
                prop_assert!(!d[(i, i)].is_negative());
                if i + 1 < k && !d[(i, i)].is_zero() {
                    prop_assert!(d[(i + 1, i + 1)].is_multiple_of(&d[(i, i)]));
                }
            }
        }
    }
}
