//! Exact linear programming over the rationals.
//!
//! Dense two-phase simplex with Bland's rule, so it always terminates. Meant
//! for the small programs that certify flows and hitting-set bounds; it makes
//! no attempt to scale.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

/// `maximize objective · x` subject to `rows`, `x >= 0`.
#[derive(Clone, Debug, Default)]
pub struct Lp {
    pub n_vars: usize,
    pub objective: Vec<(usize, BigRational)>,
    pub rows: Vec<(Vec<(usize, BigRational)>, Cmp, BigRational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { value: BigRational, x: Vec<BigRational> },
    Infeasible,
    Unbounded,
}

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

impl Lp {
    pub fn new(n_vars: usize) -> Self {
        Lp { n_vars, ..Default::default() }
    }

    pub fn add_row(&mut self, coeffs: Vec<(usize, BigRational)>, cmp: Cmp, rhs: BigRational) {
        self.rows.push((coeffs, cmp, rhs));
    }

    pub fn solve(&self) -> LpOutcome {
        Tableau::build(self).solve(self)
    }
}

struct Tableau {
    rows: Vec<Vec<BigRational>>,
    rhs: Vec<BigRational>,
    basis: Vec<usize>,
    /// Columns: originals, then one slack/surplus per inequality, then artificials.
    ncols: usize,
    first_artificial: usize,
}

impl Tableau {
    fn build(lp: &Lp) -> Self {
        let m = lp.rows.len();
        let n_slack = lp.rows.iter().filter(|r| r.1 != Cmp::Eq).count();
        let mut needs_art = Vec::with_capacity(m);
        for (_, cmp, rhs) in &lp.rows {
            let flipped = rhs.is_negative();
            let eff = match (cmp, flipped) {
                (Cmp::Le, true) => Cmp::Ge,
                (Cmp::Ge, true) => Cmp::Le,
                (c, _) => *c,
            };
            needs_art.push(eff != Cmp::Le);
        }
        let n_art = needs_art.iter().filter(|&&a| a).count();
        let first_artificial = lp.n_vars + n_slack;
        let ncols = first_artificial + n_art;
        let mut rows = Vec::with_capacity(m);
        let mut rhs = Vec::with_capacity(m);
        let mut basis = Vec::with_capacity(m);
        let mut slack = lp.n_vars;
        let mut art = first_artificial;
        for (i, (coeffs, cmp, b)) in lp.rows.iter().enumerate() {
            let sign = if b.is_negative() { -BigRational::one() } else { BigRational::one() };
            let mut row = vec![BigRational::zero(); ncols];
            for (j, a) in coeffs {
                row[*j] += a * &sign;
            }
            let mut slack_col = None;
            if *cmp != Cmp::Eq {
                let s = if *cmp == Cmp::Le { sign.clone() } else { -sign.clone() };
                row[slack] = s;
                slack_col = Some(slack);
                slack += 1;
            }
            if needs_art[i] {
                row[art] = BigRational::one();
                basis.push(art);
                art += 1;
            } else {
                basis.push(slack_col.expect("a <= row has a slack"));
            }
            rows.push(row);
            rhs.push(b * &sign);
        }
        Tableau { rows, rhs, basis, ncols, first_artificial }
    }

    fn pivot(&mut self, obj: &mut [BigRational], obj_val: &mut BigRational, r: usize, c: usize) {
        let p = self.rows[r][c].clone();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x /= &p;
            }
        }
        self.rhs[r] /= &p;
        let (pr, prhs) = (self.rows[r].clone(), self.rhs[r].clone());
        let nz: Vec<usize> = (0..self.ncols).filter(|&j| !pr[j].is_zero()).collect();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][c].is_zero() {
                continue;
            }
            let f = self.rows[i][c].clone();
            for &j in &nz {
                let d = &f * &pr[j];
                self.rows[i][j] -= d;
            }
            self.rhs[i] -= &f * &prhs;
        }
        if !obj[c].is_zero() {
            let f = obj[c].clone();
            for &j in &nz {
                let d = &f * &pr[j];
                obj[j] -= d;
            }
            *obj_val -= &f * &prhs;
        }
        self.basis[r] = c;
    }

    /// Reduced-cost row for maximising `cost · x` under the current basis.
    fn objective_row(&self, cost: &[BigRational]) -> (Vec<BigRational>, BigRational) {
        let mut obj: Vec<BigRational> = cost.iter().map(|c| -c).collect();
        let mut val = BigRational::zero();
        for (i, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.ncols {
                if !self.rows[i][j].is_zero() {
                    obj[j] += cb * &self.rows[i][j];
                }
            }
            val += cb * &self.rhs[i];
        }
        (obj, val)
    }

    /// Runs primal simplex; `false` when unbounded.
    fn run(&mut self, obj: &mut [BigRational], val: &mut BigRational, usable: usize) -> bool {
        loop {
            let Some(c) = (0..usable).find(|&j| obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(BigRational, usize)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][c];
                if !a.is_positive() {
                    continue;
                }
                let t = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bt, bi)) => t < *bt || (t == *bt && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((t, i));
                }
            }
            let Some((_, r)) = best else {
                return false;
            };
            self.pivot(obj, val, r, c);
        }
    }

    fn solve(mut self, lp: &Lp) -> LpOutcome {
        if self.first_artificial < self.ncols {
            let mut cost = vec![BigRational::zero(); self.ncols];
            for c in cost.iter_mut().skip(self.first_artificial) {
                *c = -BigRational::one();
            }
            let (mut obj, mut val) = self.objective_row(&cost);
            self.run(&mut obj, &mut val, self.ncols);
            if !val.is_zero() {
                return LpOutcome::Infeasible;
            }
            // Drive remaining artificials out of the basis, dropping redundant rows.
            let mut i = 0;
            while i < self.rows.len() {
                if self.basis[i] >= self.first_artificial {
                    match (0..self.first_artificial).find(|&j| !self.rows[i][j].is_zero()) {
                        Some(c) => self.pivot(&mut obj, &mut val, i, c),
                        None => {
                            self.rows.remove(i);
                            self.rhs.remove(i);
                            self.basis.remove(i);
                            continue;
                        }
                    }
                }
                i += 1;
            }
        }
        let mut cost = vec![BigRational::zero(); self.ncols];
        for (j, c) in &lp.objective {
            cost[*j] += c;
        }
        let (mut obj, mut val) = self.objective_row(&cost);
        if !self.run(&mut obj, &mut val, self.first_artificial) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![BigRational::zero(); lp.n_vars];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < lp.n_vars {
                x[b] = self.rhs[i].clone();
            }
        }
        LpOutcome::Optimal { value: val, x }
    }
}
