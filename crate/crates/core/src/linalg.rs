//! Dense Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::field::Rational;

pub type Matrix = Vec<Vec<Rational>>;

/// Reduced row echelon form and pivot columns.
pub fn rref(rows: &[Vec<Rational>]) -> (Matrix, Vec<usize>) {
    let mut m: Matrix = rows.to_vec();
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    rref(rows).1.len()
}

/// Basis of `{z : A z = 0}` as column vectors.
pub fn null_space(rows: &[Vec<Rational>], ncols: usize) -> Matrix {
    let (r, pivots) = rref(rows);
    let mut out = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut z = vec![Rational::zero(); ncols];
        z[free] = Rational::one();
        for (i, &pc) in pivots.iter().enumerate() {
            z[pc] = -r[i][free].clone();
        }
        out.push(z);
    }
    out
}

/// Some `z` with `A z = x`, if one exists.
pub fn solve(rows: &[Vec<Rational>], ncols: usize, x: &[Rational]) -> Option<Vec<Rational>> {
    let aug: Matrix = rows
        .iter()
        .zip(x)
        .map(|(row, xi)| {
            let mut v = row.clone();
            v.push(xi.clone());
            v
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut z = vec![Rational::zero(); ncols];
    for (i, &pc) in pivots.iter().enumerate() {
        z[pc] = r[i][ncols].clone();
    }
    Some(z)
}

/// Coefficients `c` with `Σ c_i rows_i = b`, if `b` is in the row span.
pub fn express_in_rows(rows: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let ncols = b.len();
    let t = transpose(rows, ncols);
    solve(&t, rows.len(), b)
}

pub fn transpose(rows: &[Vec<Rational>], ncols: usize) -> Matrix {
    (0..ncols).map(|c| rows.iter().map(|r| r[c].clone()).collect()).collect()
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).filter(|(x, y)| !x.is_zero() && !y.is_zero()).map(|(x, y)| x * y).sum()
}

pub fn mat_mul(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> Matrix {
    let ncols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..ncols)
                .map(|c| row.iter().zip(b).filter(|(x, _)| !x.is_zero()).map(|(x, br)| x * &br[c]).sum())
                .collect()
        })
        .collect()
}

/// Incremental echelon basis for span-membership tests.
#[derive(Clone, Debug, Default)]
pub struct SpanBuilder {
    rows: Vec<(usize, Vec<Rational>)>,
}

impl SpanBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn reduce(&self, v: &[Rational]) -> Vec<Rational> {
        let mut v = v.to_vec();
        for (p, row) in &self.rows {
            if !v[*p].is_zero() {
                let f = v[*p].clone();
                for (x, y) in v.iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v`; returns false (and changes nothing) when `v` is already in
    /// the span.
    pub fn insert(&mut self, v: &[Rational]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let inv = r[p].recip();
        for x in r.iter_mut() {
            *x *= &inv;
        }
        for (_, row) in self.rows.iter_mut() {
            if !row[p].is_zero() {
                let f = row[p].clone();
                for (x, y) in row.iter_mut().zip(&r) {
                    *x -= &f * y;
                }
            }
        }
        self.rows.push((p, r));
        true
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }
}
