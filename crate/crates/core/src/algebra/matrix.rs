//! Dense rational matrices with exact elimination.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::poly::Poly;
use super::rational::{rat, Rational};

pub type Vector = Vec<Rational>;

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(|c| c.is_zero())
}

pub fn vec_sub(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_add(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_scale(a: &[Rational], c: &Rational) -> Vector {
    a.iter().map(|x| x * c).collect()
}

/// `a + c*b`
pub fn vec_axpy(a: &[Rational], c: &Rational, b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + c * y).collect()
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        Matrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn scalar(n: usize, c: &Rational) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c.clone();
        }
        m
    }

    pub fn diag(entries: &[Rational]) -> Matrix {
        let mut m = Matrix::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<Rational>>) -> Matrix {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_int_rows(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| rat(x)).collect()).collect())
    }

    /// Matrix whose columns are the given vectors; `n` rows when empty.
    pub fn from_columns(n: usize, cols: &[Vector]) -> Matrix {
        let mut m = Matrix::zeros(n, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), n);
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn column_vector(v: &[Rational]) -> Matrix {
        Matrix { rows: v.len(), cols: 1, data: v.to_vec() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vector {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vector> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<Rational>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Rational) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vector {
        assert_eq!(self.cols, v.len());
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    /// `x^T self y`
    pub fn bilinear(&self, x: &[Rational], y: &[Rational]) -> Rational {
        dot(x, &self.mul_vec(y))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let x = &self[(i, j)];
                    if i == j {
                        x.is_one()
                    } else {
                        x.is_zero()
                    }
                })
            })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i + 1..self.cols).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn hstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut m = Matrix::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        let cols: Vec<Vector> = idx.iter().map(|&j| self.column(j)).collect();
        Matrix::from_columns(self.rows, &cols)
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Matrix) -> Matrix {
        let mut m = Matrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                m[(self.rows + i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn pow(&self, k: usize) -> Matrix {
        let mut acc = Matrix::identity(self.rows);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows).map(|i| self[(i, i)].clone()).sum()
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        // Fraction-free Gauss-Jordan on primitive integer rows; rationals
        // are formed once, when pivots are normalized.
        let (mut rows, _) = integer_lines((0..self.rows).map(|i| self.row(i).to_vec()));
        rows.iter_mut().for_each(|r| make_primitive(r));
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).filter(|&i| !rows[i][c].is_zero()).min_by_key(|&i| rows[i][c].bits()) else {
                continue;
            };
            rows.swap(r, p);
            let (head, tail) = rows.split_at_mut(r);
            let (pivot_row, rest) = tail.split_first_mut().expect("row r exists");
            for row in head.iter_mut().chain(rest.iter_mut()) {
                if row[c].is_zero() {
                    continue;
                }
                let g = pivot_row[c].gcd(&row[c]);
                let fp = &pivot_row[c] / &g;
                let fr = &row[c] / &g;
                for j in 0..self.cols {
                    let v = &row[j] * &fp - &pivot_row[j] * &fr;
                    row[j] = v;
                }
                make_primitive(row);
            }
            pivots.push(c);
            r += 1;
        }
        let mut data = Vec::with_capacity(self.rows * self.cols);
        for (i, row) in rows.into_iter().enumerate() {
            match pivots.get(i) {
                Some(&c) => {
                    let p = row[c].clone();
                    data.extend(row.into_iter().map(|x| Rational::new(x, p.clone())));
                }
                None => data.extend(row.into_iter().map(Rational::from_integer)),
            }
        }
        (Matrix { rows: self.rows, cols: self.cols, data }, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the null space, as columns.
    pub fn kernel(&self) -> Matrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut basis = Vec::with_capacity(free.len());
        for &f in &free {
            let mut v = vec![Rational::zero(); self.cols];
            v[f] = Rational::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = -r[(i, f)].clone();
            }
            basis.push(v);
        }
        Matrix::from_columns(self.cols, &basis)
    }

    /// Basis of the column space drawn from the original columns.
    pub fn column_space(&self) -> Matrix {
        let (_, pivots) = self.rref();
        self.select_columns(&pivots)
    }

    /// `(kernel basis, image basis, rank)`.
    pub fn kernel_image_rank(&self) -> (Matrix, Matrix, usize) {
        let img = self.column_space();
        let rank = img.cols();
        (self.kernel(), img, rank)
    }

    pub fn det(&self) -> Rational {
        assert!(self.is_square());
        // Bareiss elimination on rows cleared of denominators.
        let n = self.rows;
        let (mut m, dens) = integer_lines((0..n).map(|i| self.row(i).to_vec()));
        let scale = dens.iter().fold(BigInt::one(), |a, d| a * d);
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !m[i][c].is_zero()) else {
                return Rational::zero();
            };
            if p != c {
                m.swap(p, c);
                sign = -sign;
            }
            for i in c + 1..n {
                for j in c + 1..n {
                    let v = (&m[i][j] * &m[c][c] - &m[i][c] * &m[c][j]) / &prev;
                    m[i][j] = v;
                }
                m[i][c] = BigInt::zero();
            }
            prev = m[c][c].clone();
        }
        if n == 0 {
            return Rational::one();
        }
        Rational::new(sign * &m[n - 1][n - 1], scale)
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        if n == 0 {
            return Some(Matrix::zeros(0, 0));
        }
        let (r, pivots) = self.hstack(&Matrix::identity(n)).rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return None;
        }
        let mut inv = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                inv[(i, j)] = r[(i, n + j)].clone();
            }
        }
        Some(inv)
    }

    /// Unique solution `X` of `self * X = rhs`, if one exists.
    pub fn solve(&self, rhs: &Matrix) -> Option<Matrix> {
        assert_eq!(self.rows, rhs.rows);
        let n = self.cols;
        let (r, pivots) = self.hstack(rhs).rref();
        if pivots.iter().any(|&p| p >= n) || pivots.len() < n {
            return None;
        }
        let mut x = Matrix::zeros(n, rhs.cols);
        for (i, &p) in pivots.iter().enumerate() {
            for j in 0..rhs.cols {
                x[(p, j)] = r[(i, n + j)].clone();
            }
        }
        Some(x)
    }

    /// Characteristic polynomial `det(xI - A)` by Faddeev–LeVerrier.
    pub fn charpoly(&self) -> Poly {
        assert!(self.is_square());
        let n = self.rows;
        let mut c = vec![Rational::zero(); n + 1];
        c[n] = Rational::one();
        let mut m = Matrix::zeros(n, n);
        for k in 1..=n {
            m = &(self * &m) + &Matrix::scalar(n, &c[n - k + 1]);
            let am = self * &m;
            c[n - k] = -am.trace() / rat(k as i64);
        }
        Poly::new(c)
    }

    /// Monic minimal polynomial, from the first linear dependency among
    /// the powers of the matrix.
    pub fn minimal_polynomial(&self) -> Poly {
        assert!(self.is_square());
        let n = self.rows;
        // Each power is flattened into a column; stop at the first dependency.
        let mut powers: Vec<Vector> = Vec::new();
        let mut p = Matrix::identity(n);
        for k in 0..=n {
            powers.push(p.data.clone());
            let m = Matrix::from_columns(n * n, &powers);
            let ker = m.kernel();
            if ker.cols() > 0 {
                let v = ker.column(0);
                debug_assert!(!v[k].is_zero());
                return Poly::new(v).monic();
            }
            p = &p * self;
        }
        unreachable!("Cayley-Hamilton bounds the degree")
    }

    /// Columns `v, Av, A^2 v, ...` up to the first linear dependency.
    pub fn krylov(&self, v: &[Rational]) -> Matrix {
        let n = self.rows;
        let mut cols: Vec<Vector> = Vec::new();
        let mut cur = v.to_vec();
        while cols.len() < n {
            cols.push(cur.clone());
            if Matrix::from_columns(n, &cols).rank() < cols.len() {
                cols.pop();
                break;
            }
            cur = self.mul_vec(&cur);
        }
        Matrix::from_columns(n, &cols)
    }
}

/// Basis of symmetric n×n matrices `E_ii` and `E_ij + E_ji`.
pub fn symmetric_basis(n: usize) -> Vec<Matrix> {
    let mut out = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let mut m = Matrix::zeros(n, n);
            m[(i, j)] = Rational::one();
            m[(j, i)] = Rational::one();
            out.push(m);
        }
    }
    out
}

/// Basis of `{ X ∈ span(basis) : map(X) = 0 }` for a linear `map`.
pub fn kernel_in_span(basis: &[Matrix], map: impl Fn(&Matrix) -> Matrix) -> Vec<Matrix> {
    if basis.is_empty() {
        return Vec::new();
    }
    let images: Vec<Vector> = basis.iter().map(|b| map(b).data).collect();
    let rows = images[0].len();
    let k = Matrix::from_columns(rows, &images).kernel();
    k.columns()
        .into_iter()
        .map(|c| {
            let mut acc = Matrix::zeros(basis[0].rows, basis[0].cols);
            for (coef, b) in c.iter().zip(basis) {
                if !coef.is_zero() {
                    acc = &acc + &b.scale(coef);
                }
            }
            acc
        })
        .collect()
}

impl Index<(usize, usize)> for Matrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        // Integer dot products over a common denominator per row of self
        // and per column of rhs, so each entry is reduced once.
        let (an, ad) = integer_lines((0..self.rows).map(|i| self.row(i).to_vec()));
        let (bn, bd) = integer_lines((0..rhs.cols).map(|j| rhs.column(j)));
        let mut data = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = BigInt::zero();
                for (x, y) in an[i].iter().zip(&bn[j]) {
                    if !x.is_zero() && !y.is_zero() {
                        acc += x * y;
                    }
                }
                data.push(Rational::new(acc, &ad[i] * &bd[j]));
            }
        }
        Matrix { rows: self.rows, cols: rhs.cols, data }
    }
}

fn make_primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        row.iter_mut().for_each(|x| *x /= &g);
    }
}

/// Each line scaled to integers by the lcm of its denominators.
fn integer_lines(lines: impl Iterator<Item = Vector>) -> (Vec<Vec<BigInt>>, Vec<BigInt>) {
    let mut nums = Vec::new();
    let mut dens = Vec::new();
    for line in lines {
        let d = line.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
        nums.push(line.iter().map(|x| x.numer() * (&d / x.denom())).collect());
        dens.push(d);
    }
    (nums, dens)
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Matrix {
    type Output = Matrix;
    fn neg(self) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| -a).collect() }
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::ratio;

    #[test]
    fn kernel_image_rank_examples() {
        let (k, _, r) = Matrix::zeros(2, 2).kernel_image_rank();
        assert_eq!((k.cols(), r), (2, 0));
        let (k, _, r) = Matrix::identity(4).kernel_image_rank();
        assert_eq!((k.cols(), r), (0, 4));
        let (k, img, r) = Matrix::from_int_rows(&[&[1, 1], &[1, 1]]).kernel_image_rank();
        assert_eq!(r, 1);
        assert_eq!(img.cols(), 1);
        assert_eq!(k.column(0), vec![rat(-1), rat(1)]);
    }

    #[test]
    fn minimal_polynomials() {
        assert_eq!(Matrix::identity(3).minimal_polynomial(), Poly::from_ints(&[-1, 1]));
        let d = Matrix::diag(&[rat(2), ratio(1, 2)]);
        let expect = &Poly::linear(&rat(2)) * &Poly::linear(&ratio(1, 2));
        assert_eq!(d.minimal_polynomial(), expect);
        let j = Matrix::from_int_rows(&[&[1, 1], &[0, 1]]);
        assert_eq!(j.minimal_polynomial(), Poly::from_ints(&[-1, 1]).pow(2));
    }

    #[test]
    fn charpoly_and_det() {
        let a = Matrix::from_int_rows(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let cp = a.charpoly();
        assert_eq!(cp.coeff(0), -a.det());
        assert!(cp.eval_matrix(&a).is_zero());
        assert_eq!(a.det(), rat(18));
    }

    #[test]
    fn inverse_and_solve() {
        let a = Matrix::from_int_rows(&[&[2, 1], &[1, 1]]);
        let inv = a.inverse().unwrap();
        assert!((&a * &inv).is_identity());
        assert!(Matrix::from_int_rows(&[&[1, 1], &[1, 1]]).inverse().is_none());
        let b = Matrix::from_int_rows(&[&[3], &[2]]);
        assert_eq!(a.solve(&b).unwrap(), Matrix::from_int_rows(&[&[1], &[1]]));
    }
}
