//! Dense two-phase simplex with Bland's rule, generic over the field so the
//! same code runs in `f64` and in exact rationals.

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

pub trait Field: Clone + Debug + PartialOrd + Num + Signed + Neg<Output = Self> {
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Entries within this of zero count as zero.
    fn tol() -> Self;
}

impl Field for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn tol() -> Self {
        1e-9
    }
}

impl Field for BigRational {
    fn from_f64(x: f64) -> Self {
        BigRational::from_float(x).expect("finite")
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).expect("representable")
    }
    fn tol() -> Self {
        BigRational::zero()
    }
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rel {
    Le,
    Ge,
    Eq,
}

/// `min c·x` subject to `rows` and `lower ≤ x ≤ upper`; lower bounds must be
/// finite.
#[derive(Debug, Clone)]
pub struct Lp<T> {
    pub c: Vec<T>,
    pub rows: Vec<(Vec<T>, Rel, T)>,
    pub lower: Vec<T>,
    pub upper: Vec<Option<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<T> {
    Optimal { x: Vec<T>, objective: T },
    Infeasible,
    Unbounded,
}

impl<T: Field> LpOutcome<T> {
    pub fn objective(&self) -> Option<T> {
        match self {
            LpOutcome::Optimal { objective, .. } => Some(objective.clone()),
            _ => None,
        }
    }
}

impl<T: Field> Lp<T> {
    pub fn new(n: usize) -> Self {
        Lp {
            c: vec![T::zero(); n],
            rows: Vec::new(),
            lower: vec![T::zero(); n],
            upper: vec![None; n],
        }
    }

    pub fn row(&mut self, terms: &[(usize, T)], rel: Rel, rhs: T) {
        let mut a = vec![T::zero(); self.c.len()];
        for (j, v) in terms {
            a[*j] = a[*j].clone() + v.clone();
        }
        self.rows.push((a, rel, rhs));
    }

    pub fn solve(&self) -> LpOutcome<T> {
        let n = self.c.len();
        // shift to y = x − lower ≥ 0; upper bounds become rows
        let mut rows: Vec<(Vec<T>, Rel, T)> = Vec::new();
        for (a, rel, b) in &self.rows {
            let shift = dot(a, &self.lower);
            rows.push((a.clone(), *rel, b.clone() - shift));
        }
        for j in 0..n {
            if let Some(u) = &self.upper[j] {
                let mut a = vec![T::zero(); n];
                a[j] = T::one();
                rows.push((a, Rel::Le, u.clone() - self.lower[j].clone()));
            }
        }
        for (a, rel, b) in rows.iter_mut() {
            if *b < T::zero() {
                a.iter_mut().for_each(|v| *v = -v.clone());
                *b = -b.clone();
                *rel = match rel {
                    Rel::Le => Rel::Ge,
                    Rel::Ge => Rel::Le,
                    Rel::Eq => Rel::Eq,
                };
            }
        }
        let m = rows.len();
        let slacks = rows.iter().filter(|r| r.1 != Rel::Eq).count();
        let arts = rows.iter().filter(|r| r.1 != Rel::Le).count();
        let width = n + slacks + arts;
        let mut tab = vec![vec![T::zero(); width + 1]; m];
        let mut basis = vec![0; m];
        let (mut s, mut a) = (n, n + slacks);
        for (i, (coefs, rel, b)) in rows.iter().enumerate() {
            tab[i][..n].clone_from_slice(coefs);
            tab[i][width] = b.clone();
            match rel {
                Rel::Le => {
                    tab[i][s] = T::one();
                    basis[i] = s;
                    s += 1;
                }
                Rel::Ge => {
                    tab[i][s] = -T::one();
                    s += 1;
                    tab[i][a] = T::one();
                    basis[i] = a;
                    a += 1;
                }
                Rel::Eq => {
                    tab[i][a] = T::one();
                    basis[i] = a;
                    a += 1;
                }
            }
        }
        let is_art = |j: usize| j >= n + slacks;

        let mut phase1 = vec![T::zero(); width];
        for v in phase1.iter_mut().skip(n + slacks) {
            *v = T::one();
        }
        let all: Vec<bool> = vec![true; width];
        if iterate(&mut tab, &mut basis, &phase1, &all).is_err() {
            unreachable!("phase one is bounded below by zero");
        }
        let infeas = basis
            .iter()
            .zip(&tab)
            .filter(|(&j, _)| is_art(j))
            .fold(T::zero(), |acc, (_, row)| acc + row[width].clone());
        let scale = rows
            .iter()
            .fold(T::one(), |acc, r| if r.2 > acc { r.2.clone() } else { acc });
        if infeas > T::tol() * scale * T::from_f64(100.0) {
            return LpOutcome::Infeasible;
        }
        for i in 0..m {
            if is_art(basis[i]) {
                if let Some(j) = (0..n + slacks).find(|&j| tab[i][j].abs() > T::tol()) {
                    pivot(&mut tab, &mut basis, i, j);
                }
            }
        }
        let mut cost = vec![T::zero(); width];
        cost[..n].clone_from_slice(&self.c);
        let allowed: Vec<bool> = (0..width).map(|j| !is_art(j)).collect();
        if iterate(&mut tab, &mut basis, &cost, &allowed).is_err() {
            return LpOutcome::Unbounded;
        }
        let mut x = self.lower.clone();
        for (i, &j) in basis.iter().enumerate() {
            if j < n {
                x[j] = x[j].clone() + tab[i][width].clone();
            }
        }
        let objective = dot(&self.c, &x);
        LpOutcome::Optimal { x, objective }
    }
}

fn dot<T: Field>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

fn pivot<T: Field>(tab: &mut [Vec<T>], basis: &mut [usize], r: usize, j: usize) {
    let p = tab[r][j].clone();
    for v in tab[r].iter_mut() {
        *v = v.clone() / p.clone();
    }
    let prow = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r || row[j].is_zero() {
            continue;
        }
        let f = row[j].clone();
        for (v, pv) in row.iter_mut().zip(&prow) {
            *v = v.clone() - f.clone() * pv.clone();
        }
    }
    basis[r] = j;
}

/// Primal simplex from a feasible basis. `Err` means unbounded.
fn iterate<T: Field>(
    tab: &mut [Vec<T>],
    basis: &mut [usize],
    cost: &[T],
    allowed: &[bool],
) -> Result<(), ()> {
    let width = cost.len();
    loop {
        // Bland: lowest-index improving column, lowest basic index on ties
        let entering = (0..width).find(|&j| {
            if !allowed[j] || basis.contains(&j) {
                return false;
            }
            let reduced = basis
                .iter()
                .zip(tab.iter())
                .fold(cost[j].clone(), |acc, (&b, row)| {
                    acc - cost[b].clone() * row[j].clone()
                });
            reduced < -T::tol()
        });
        let Some(j) = entering else {
            return Ok(());
        };
        let mut best: Option<(usize, T)> = None;
        for (i, row) in tab.iter().enumerate() {
            if row[j] > T::tol() {
                let r = row[width].clone() / row[j].clone();
                let better = match &best {
                    None => true,
                    Some((bi, br)) => r < *br || (r == *br && basis[i] < basis[*bi]),
                };
                if better {
                    best = Some((i, r));
                }
            }
        }
        let Some((r, _)) = best else {
            return Err(());
        };
        pivot(tab, basis, r, j);
    }
}
