//! Brute-force undetermined coefficients over the rationals.
//!
//! Every unknown coefficient of degree `k` is found by evaluating the defining
//! identity with that degree's unknowns set to unit vectors, reading off the
//! resulting linear system, and solving it by Gaussian elimination. Nothing
//! here shares code with the library's recursions.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

use super::rat;

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub nvars: usize,
    pub cap: u32,
    pub terms: BTreeMap<Vec<u32>, BigRational>,
}

fn deg(e: &[u32]) -> u32 {
    e.iter().sum()
}

impl Poly {
    pub fn zero(nvars: usize, cap: u32) -> Self {
        Poly { nvars, cap, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, cap: u32, c: BigRational) -> Self {
        let mut p = Self::zero(nvars, cap);
        p.set(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, cap: u32, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars, cap);
        p.set(e, BigRational::one());
        p
    }

    pub fn univariate(cap: u32, c: &[BigRational]) -> Self {
        let mut p = Self::zero(1, cap);
        for (k, v) in c.iter().enumerate() {
            p.set(vec![k as u32], v.clone());
        }
        p
    }

    pub fn get(&self, e: &[u32]) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn set(&mut self, e: Vec<u32>, c: BigRational) {
        if deg(&e) > self.cap || c.is_zero() {
            self.terms.remove(&e);
        } else {
            self.terms.insert(e, c);
        }
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let mut out = self.clone();
        for (e, c) in &o.terms {
            let v = out.get(e) + c;
            out.set(e.clone(), v);
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Poly {
        let mut out = Poly::zero(self.nvars, self.cap);
        for (e, v) in &self.terms {
            out.set(e.clone(), v * c);
        }
        out
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        let mut out = Poly::zero(self.nvars, self.cap);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                if deg(ea) + deg(eb) > self.cap {
                    continue;
                }
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                let v = out.get(&e) + ca * cb;
                out.set(e, v);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::constant(self.nvars, self.cap, BigRational::one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// `self(g_1, ..., g_d)`.
    pub fn compose(&self, gs: &[Poly]) -> Poly {
        assert_eq!(gs.len(), self.nvars);
        let target = &gs[0];
        let mut out = Poly::zero(target.nvars, target.cap);
        for (e, c) in &self.terms {
            let mut t = Poly::constant(target.nvars, target.cap, c.clone());
            for (g, &k) in gs.iter().zip(e) {
                t = t.mul(&g.pow(k));
            }
            out = out.add(&t);
        }
        out
    }

    pub fn homogeneous(&self, k: u32) -> BTreeMap<Vec<u32>, BigRational> {
        self.terms
            .iter()
            .filter(|(e, _)| deg(e) == k)
            .map(|(e, c)| (e.clone(), c.clone()))
            .collect()
    }
}

/// All exponent vectors of total degree `k` in `d` variables.
pub fn monomials(d: usize, k: u32) -> Vec<Vec<u32>> {
    if d == 1 {
        return vec![vec![k]];
    }
    let mut out = Vec::new();
    for first in 0..=k {
        for mut rest in monomials(d - 1, k - first) {
            let mut e = vec![first];
            e.append(&mut rest);
            out.push(e);
        }
    }
    out
}

/// Solves `A x = b` (possibly overdetermined); `None` if inconsistent or
/// underdetermined.
pub fn solve(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut piv_row = 0;
    for col in 0..cols {
        let r = (piv_row..rows).find(|&r| !a[r][col].is_zero())?;
        a.swap(piv_row, r);
        b.swap(piv_row, r);
        let inv = BigRational::one() / a[piv_row][col].clone();
        for c in 0..cols {
            a[piv_row][c] = &a[piv_row][c] * &inv;
        }
        b[piv_row] = &b[piv_row] * &inv;
        for r in 0..rows {
            if r != piv_row && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in 0..cols {
                    let v = &a[piv_row][c] * &f;
                    a[r][c] = &a[r][c] - v;
                }
                let v = &b[piv_row] * &f;
                b[r] = &b[r] - v;
            }
        }
        piv_row += 1;
    }
    if (piv_row..rows).any(|r| !b[r].is_zero()) {
        return None;
    }
    Some(b[..cols].to_vec())
}

/// Fills the degree-`k` unknowns of `guess` so that `residual(guess)` has no
/// degree-`k` part. `residual` must be affine in those unknowns.
fn solve_degree(
    guess: &mut Poly,
    k: u32,
    unknowns: &[Vec<u32>],
    residual: &dyn Fn(&Poly) -> Poly,
) -> Option<()> {
    for e in unknowns {
        guess.set(e.clone(), BigRational::zero());
    }
    let base = residual(guess);
    let eqs: Vec<Vec<u32>> = {
        let mut all: Vec<Vec<u32>> = monomials(base.nvars, k);
        all.sort();
        all
    };
    let mut cols = Vec::new();
    for e in unknowns {
        let mut g = guess.clone();
        g.set(e.clone(), BigRational::one());
        let r = residual(&g);
        cols.push(eqs.iter().map(|m| r.get(m) - base.get(m)).collect::<Vec<_>>());
    }
    let a: Vec<Vec<BigRational>> = (0..eqs.len())
        .map(|i| cols.iter().map(|c| c[i].clone()).collect())
        .collect();
    let b: Vec<BigRational> = eqs.iter().map(|m| -base.get(m)).collect();
    let x = solve(a, b)?;
    for (e, v) in unknowns.iter().zip(x) {
        guess.set(e.clone(), v);
    }
    Some(())
}

/// Compositional inverse of `sum a_k X^k` (`a_0 = 0`, `a_1 != 0`).
pub fn comp_inverse(a: &[BigRational], cap: u32) -> Vec<BigRational> {
    let f = Poly::univariate(cap, a);
    let x = Poly::var(1, cap, 0);
    let mut g = Poly::zero(1, cap);
    for k in 1..=cap {
        let res = |g: &Poly| f.compose(std::slice::from_ref(g)).add(&x.scale(&rat(-1)));
        solve_degree(&mut g, k, &[vec![k]], &res).expect("inverse exists");
    }
    (0..=cap).map(|k| g.get(&[k])).collect()
}

/// The law `F` with `f(F(X,Y)) = F(f(X), f(Y))`, `F = X + Y + ...`.
pub fn lubin_tate_law(f: &[BigRational], cap: u32) -> Poly {
    let f1 = Poly::univariate(cap, f);
    let x = Poly::var(2, cap, 0);
    let y = Poly::var(2, cap, 1);
    let fx = f1.compose(std::slice::from_ref(&x));
    let fy = f1.compose(std::slice::from_ref(&y));
    let mut law = x.add(&y);
    for k in 2..=cap {
        let res = |law: &Poly| {
            f1.compose(std::slice::from_ref(law))
                .add(&law.compose(&[fx.clone(), fy.clone()]).scale(&rat(-1)))
        };
        let mut unknowns = monomials(2, k);
        unknowns.sort();
        solve_degree(&mut law, k, &unknowns, &res).expect("Lubin-Tate law exists");
    }
    law
}

/// The endomorphism `h` of `law` with `h'(0) = a`, from the homomorphism
/// identity alone (an overdetermined but consistent system per degree).
pub fn endomorphism(law: &Poly, a: &BigRational) -> Vec<BigRational> {
    let cap = law.cap;
    let x = Poly::var(2, cap, 0);
    let y = Poly::var(2, cap, 1);
    let mut h = Poly::univariate(cap, &[rat(0), a.clone()]);
    for k in 2..=cap {
        let res = |h: &Poly| {
            let left = h.compose(std::slice::from_ref(law));
            let hx = h.compose(std::slice::from_ref(&x));
            let hy = h.compose(std::slice::from_ref(&y));
            left.add(&law.compose(&[hx, hy]).scale(&rat(-1)))
        };
        solve_degree(&mut h, k, &[vec![k]], &res).expect("endomorphism exists");
    }
    (0..=cap).map(|k| h.get(&[k])).collect()
}
