//! Exact linear algebra over [`Coeff`]: an incremental echelon form on
//! polynomial vectors and small dense matrices.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use crate::coeff::Coeff;
use crate::poly::{Exp2, Poly2};

/// Incrementally built reduced echelon form of a list of polynomials,
/// remembering how each row was built from the inserted vectors.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<Row>,
    inserted: usize,
}

#[derive(Clone, Debug)]
struct Row {
    pivot: Exp2,
    vec: Poly2,
    /// `vec = Σ comb[i] * inserted[i]`.
    comb: Vec<Coeff>,
}

/// Outcome of [`Echelon::insert`].
#[derive(Clone, Debug, PartialEq)]
pub enum Insert {
    /// The vector was independent and is now inserted vector number `.0`.
    Independent(usize),
    /// The vector equals `Σ c[i] * inserted[i]`; nothing was added.
    Dependent(Vec<Coeff>),
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    /// Coordinates of `v` against the inserted vectors, if `v` lies in their span.
    pub fn coordinates(&self, v: &Poly2) -> Option<Vec<Coeff>> {
        let (rem, comb) = self.reduce(v);
        if rem.is_zero() {
            Some(comb.into_iter().map(|c| -c).collect())
        } else {
            None
        }
    }

    /// Reduces `v` by the rows. Returns the remainder and the combination
    /// `c` with `v - rem = -Σ c[i] * inserted[i]`.
    fn reduce(&self, v: &Poly2) -> (Poly2, Vec<Coeff>) {
        let mut rem = v.clone();
        let mut comb = vec![Coeff::zero(); self.inserted];
        for row in &self.rows {
            let c = rem.coeff_of(row.pivot.x, row.pivot.y);
            if c.is_zero() {
                continue;
            }
            rem = &rem - &row.vec.scale(&c);
            for (k, r) in row.comb.iter().enumerate() {
                if !r.is_zero() {
                    comb[k] = &comb[k] - &(&c * r);
                }
            }
        }
        (rem, comb)
    }

    pub fn insert(&mut self, v: &Poly2) -> Insert {
        let (rem, mut comb) = self.reduce(v);
        if rem.is_zero() {
            return Insert::Dependent(comb.into_iter().map(|c| -c).collect());
        }
        let idx = self.inserted;
        self.inserted += 1;
        comb.push(Coeff::one());
        for row in &mut self.rows {
            row.comb.push(Coeff::zero());
        }
        let (pivot, lead) = rem.leading().map(|(e, c)| (e, c.clone())).unwrap();
        let inv = lead.inv().expect("nonzero leading coefficient");
        let vec = rem.scale(&inv);
        let comb: Vec<Coeff> = comb.iter().map(|c| c * &inv).collect();
        // Keep the form reduced: clear the new pivot from older rows.
        for row in &mut self.rows {
            let c = row.vec.coeff_of(pivot.x, pivot.y);
            if c.is_zero() {
                continue;
            }
            row.vec = &row.vec - &vec.scale(&c);
            for (k, r) in comb.iter().enumerate() {
                if !r.is_zero() {
                    row.comb[k] = &row.comb[k] - &(&c * r);
                }
            }
        }
        self.rows.push(Row { pivot, vec, comb });
        Insert::Independent(idx)
    }
}

/// Dense square matrix over [`Coeff`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Mat {
    n: usize,
    data: Vec<Coeff>,
}

impl Mat {
    pub fn zeros(n: usize) -> Mat {
        Mat {
            n,
            data: vec![Coeff::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Mat {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.set(i, i, Coeff::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Coeff>>) -> Mat {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Mat {
            n,
            data: rows.into_iter().flatten().collect(),
        }
    }

    /// Builds a matrix whose `j`-th column is `cols[j]`.
    pub fn from_columns(cols: Vec<Vec<Coeff>>) -> Mat {
        let n = cols.len();
        let mut m = Mat::zeros(n);
        for (j, col) in cols.into_iter().enumerate() {
            assert_eq!(col.len(), n, "matrix must be square");
            for (i, c) in col.into_iter().enumerate() {
                m.set(i, j, c);
            }
        }
        m
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Coeff {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, c: Coeff) {
        self.data[i * self.n + j] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Coeff::is_zero)
    }

    pub fn scale(&self, c: &Coeff) -> Mat {
        Mat {
            n: self.n,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn column(&self, j: usize) -> Vec<Coeff> {
        (0..self.n).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul_vec(&self, v: &[Coeff]) -> Vec<Coeff> {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .filter(|&k| !v[k].is_zero())
                    .map(|k| self.get(i, k) * &v[k])
                    .sum()
            })
            .collect()
    }

    pub fn trace(&self) -> Coeff {
        (0..self.n).map(|i| self.get(i, i).clone()).sum()
    }

    /// Inverse by Gauss–Jordan elimination, `None` when singular.
    pub fn inverse(&self) -> Option<Mat> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Mat::identity(n);
        for col in 0..n {
            let piv = (col..n).find(|&r| !a.get(r, col).is_zero())?;
            a.swap_rows(col, piv);
            inv.swap_rows(col, piv);
            let p = a.get(col, col).inv().ok()?;
            a.scale_row(col, &p);
            inv.scale_row(col, &p);
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a.get(r, col).clone();
                if f.is_zero() {
                    continue;
                }
                a.sub_row(r, col, &f);
                inv.sub_row(r, col, &f);
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for k in 0..self.n {
            self.data.swap(i * self.n + k, j * self.n + k);
        }
    }

    fn scale_row(&mut self, i: usize, c: &Coeff) {
        for k in 0..self.n {
            let v = self.get(i, k) * c;
            self.set(i, k, v);
        }
    }

    /// row_i -= f * row_j
    fn sub_row(&mut self, i: usize, j: usize, f: &Coeff) {
        for k in 0..self.n {
            let s = self.get(j, k);
            if s.is_zero() {
                continue;
            }
            let v = self.get(i, k) - &(f * s);
            self.set(i, k, v);
        }
    }

    /// Evaluates a univariate polynomial in `X` at this matrix (Horner).
    pub fn eval_poly(&self, coeffs: &[Coeff]) -> Mat {
        let id = Mat::identity(self.n);
        let mut acc = Mat::zeros(self.n);
        for c in coeffs.iter().rev() {
            acc = &(&acc * self) + &id.scale(c);
        }
        acc
    }
}

impl Add for &Mat {
    type Output = Mat;
    fn add(self, rhs: &Mat) -> Mat {
        Mat {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Mat {
    type Output = Mat;
    fn sub(self, rhs: &Mat) -> Mat {
        Mat {
            n: self.n,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Mat {
    type Output = Mat;
    fn mul(self, rhs: &Mat) -> Mat {
        let n = self.n;
        let mut out = Mat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = rhs.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j) + &(a * b);
                    out.set(i, j, v);
                }
            }
        }
        out
    }
}

impl fmt::Debug for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Mat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for i in 0..self.n {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str("[")?;
            for j in 0..self.n {
                if j > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: i64) -> Coeff {
        Coeff::int(n)
    }

    #[test]
    fn echelon_tracks_combinations() {
        let x = Poly2::x();
        let y = Poly2::y();
        let mut e = Echelon::new();
        assert_eq!(e.insert(&(&x + &y)), Insert::Independent(0));
        assert_eq!(e.insert(&(&x - &y)), Insert::Independent(1));
        // 3X + Y = 2(X + Y) + (X - Y)
        match e.insert(&(&x.scale(&c(3)) + &y)) {
            Insert::Dependent(comb) => assert_eq!(comb, vec![c(2), c(1)]),
            other => panic!("{other:?}"),
        }
        assert_eq!(e.coordinates(&y), Some(vec![Coeff::ratio(1, 2), Coeff::ratio(-1, 2)]));
        assert_eq!(e.coordinates(&Poly2::one()), None);
    }

    #[test]
    fn inverse_and_eval() {
        let m = Mat::from_rows(vec![vec![c(1), c(2)], vec![c(3), c(4)]]);
        let inv = m.inverse().unwrap();
        assert_eq!(&m * &inv, Mat::identity(2));
        assert!(Mat::zeros(2).inverse().is_none());
        // Cayley–Hamilton: M^2 - 5M - 2 = 0
        assert!(m.eval_poly(&[c(-2), c(-5), c(1)]).is_zero());
        let a = Coeff::param("a");
        let s = Mat::from_rows(vec![vec![a.clone(), c(1)], vec![c(0), a.clone()]]);
        let si = s.inverse().unwrap();
        assert_eq!(&s * &si, Mat::identity(2));
    }
}
