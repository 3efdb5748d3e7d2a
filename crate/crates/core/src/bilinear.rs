//! Symmetric bilinear spaces over the rationals and their real invariants.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{Matrix, Rational, Sign, Vector};
use crate::error::Error;

/// Real signature: positive, negative and radical dimensions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
    pub r: usize,
}

impl Signature {
    pub fn dim(&self) -> usize {
        self.p + self.q + self.r
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.r == 0
    }

    pub fn witt_index(&self) -> usize {
        self.p.min(self.q)
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.r == 0 && self.p == self.q
    }

    /// `(-1)^q`, the discriminant sign of a nondegenerate space.
    pub fn disc(&self) -> Sign {
        Sign::pow_minus_one(self.q)
    }
}

/// Diagonalizes a symmetric matrix by congruence. Returns a basis (as
/// columns) that is orthogonal for the form together with the values
/// `B(b_i, b_i)`.
pub fn orthogonal_basis(gram: &Matrix) -> (Matrix, Vec<Rational>) {
    let n = gram.rows();
    let mut g = gram.clone();
    let mut e = Matrix::identity(n);
    let add = |g: &mut Matrix, e: &mut Matrix, c: &Rational, src: usize, dst: usize| {
        for k in 0..n {
            let v = &g[(src, k)] * c;
            g[(dst, k)] += v;
        }
        for k in 0..n {
            let v = &g[(k, src)] * c;
            g[(k, dst)] += v;
        }
        for k in 0..n {
            let v = &e[(k, src)] * c;
            e[(k, dst)] += v;
        }
    };
    let swap = |g: &mut Matrix, e: &mut Matrix, i: usize, j: usize| {
        if i == j {
            return;
        }
        for k in 0..n {
            let t = g[(i, k)].clone();
            g[(i, k)] = g[(j, k)].clone();
            g[(j, k)] = t;
        }
        for k in 0..n {
            let t = g[(k, i)].clone();
            g[(k, i)] = g[(k, j)].clone();
            g[(k, j)] = t;
            let t = e[(k, i)].clone();
            e[(k, i)] = e[(k, j)].clone();
            e[(k, j)] = t;
        }
    };
    for k in 0..n {
        let mut piv = (k..n).find(|&i| !g[(i, i)].is_zero());
        if piv.is_none() {
            let off = (k..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !g[(i, j)].is_zero());
            match off {
                Some((i, j)) => {
                    add(&mut g, &mut e, &Rational::one(), j, i);
                    piv = Some(i);
                }
                None => break,
            }
        }
        let i = piv.unwrap();
        swap(&mut g, &mut e, k, i);
        let d = g[(k, k)].clone();
        for j in k + 1..n {
            if !g[(k, j)].is_zero() {
                let c = -(&g[(k, j)] / &d);
                add(&mut g, &mut e, &c, k, j);
            }
        }
    }
    let values = (0..n).map(|i| g[(i, i)].clone()).collect();
    (e, values)
}

/// Signature of an arbitrary symmetric matrix.
pub fn signature_of_gram(gram: &Matrix) -> Signature {
    let (_, vals) = orthogonal_basis(gram);
    let mut s = Signature { p: 0, q: 0, r: 0 };
    for v in vals {
        if v.is_positive() {
            s.p += 1;
        } else if v.is_negative() {
            s.q += 1;
        } else {
            s.r += 1;
        }
    }
    s
}

/// A subspace given by a basis of linearly independent columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    basis: Matrix,
}

impl Subspace {
    /// Wraps independent columns; rejects dependent input.
    pub fn new(basis: Matrix) -> Result<Subspace, Error> {
        if basis.rank() != basis.cols() {
            return Err(Error::Precondition("subspace basis columns are dependent".into()));
        }
        Ok(Subspace { basis })
    }

    /// The column span of an arbitrary matrix.
    pub fn span(m: &Matrix) -> Subspace {
        Subspace { basis: m.column_space() }
    }

    pub fn zero(ambient_dim: usize) -> Subspace {
        Subspace { basis: Matrix::zeros(ambient_dim, 0) }
    }

    pub fn full(ambient_dim: usize) -> Subspace {
        Subspace { basis: Matrix::identity(ambient_dim) }
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        let m = self.basis.hstack(&Matrix::column_vector(v));
        m.rank() == self.dim()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        self.basis.hstack(&other.basis).rank() == self.dim()
    }

    pub fn same_as(&self, other: &Subspace) -> bool {
        self.dim() == other.dim() && self.contains_subspace(other)
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::span(&self.basis.hstack(&other.basis))
    }

    /// Whether `m` maps the subspace into itself.
    pub fn is_invariant(&self, m: &Matrix) -> bool {
        self.contains_subspace(&Subspace::span(&(m * &self.basis)))
    }
}

/// A finite-dimensional space with a symmetric bilinear form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadSpace {
    gram: Matrix,
}

impl QuadSpace {
    /// A symmetric (possibly degenerate) form.
    pub fn new(gram: Matrix) -> Result<QuadSpace, Error> {
        if !gram.is_square() {
            return Err(Error::Shape("gram matrix is not square".into()));
        }
        if !gram.is_symmetric() {
            return Err(Error::AsymmetricGram);
        }
        Ok(QuadSpace { gram })
    }

    /// A symmetric nondegenerate form, as required of an ambient space.
    pub fn nondegenerate(gram: Matrix) -> Result<QuadSpace, Error> {
        let s = QuadSpace::new(gram)?;
        if s.gram.det().is_zero() {
            return Err(Error::SingularGram);
        }
        Ok(s)
    }

    /// `diag(1,…,1,-1,…,-1)` with p ones.
    pub fn standard(p: usize, q: usize) -> QuadSpace {
        let mut d = vec![Rational::one(); p];
        d.extend(vec![-Rational::one(); q]);
        QuadSpace { gram: Matrix::diag(&d) }
    }

    /// Orthogonal sum of `t` hyperbolic planes in the basis
    /// `e_1..e_t, f_1..f_t` with `B(e_i, f_j) = δ_ij`.
    pub fn hyperbolic(t: usize) -> QuadSpace {
        let mut g = Matrix::zeros(2 * t, 2 * t);
        for i in 0..t {
            g[(i, t + i)] = Rational::one();
            g[(t + i, i)] = Rational::one();
        }
        QuadSpace { gram: g }
    }

    pub fn direct_sum(&self, other: &QuadSpace) -> QuadSpace {
        QuadSpace { gram: self.gram.direct_sum(&other.gram) }
    }

    pub fn gram(&self) -> &Matrix {
        &self.gram
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn form(&self, x: &[Rational], y: &[Rational]) -> Rational {
        self.gram.bilinear(x, y)
    }

    pub fn signature(&self) -> Signature {
        signature_of_gram(&self.gram)
    }

    pub fn disc_sign(&self) -> Result<Sign, Error> {
        Sign::of(&self.gram.det()).ok_or_else(|| Error::Precondition("degenerate form has no discriminant".into()))
    }

    pub fn witt_index(&self) -> usize {
        self.signature().witt_index()
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.signature().is_hyperbolic()
    }

    pub fn restrict_form(&self, s: &Subspace) -> QuadSpace {
        let b = s.basis();
        QuadSpace { gram: &(&b.transpose() * &self.gram) * b }
    }

    pub fn signature_of(&self, s: &Subspace) -> Signature {
        self.restrict_form(s).signature()
    }

    pub fn disc_of(&self, s: &Subspace) -> Result<Sign, Error> {
        self.restrict_form(s).disc_sign()
    }

    pub fn is_nondegenerate_on(&self, s: &Subspace) -> bool {
        !self.restrict_form(s).gram.det().is_zero()
    }

    pub fn orthogonal_complement(&self, s: &Subspace) -> Subspace {
        if s.dim() == 0 {
            return Subspace::full(self.dim());
        }
        let m = &s.basis().transpose() * &self.gram;
        Subspace { basis: m.kernel() }
    }

    pub fn are_orthogonal(&self, a: &Subspace, b: &Subspace) -> bool {
        (&(&a.basis().transpose() * &self.gram) * b.basis()).is_zero()
    }

    /// Orthogonal projection onto a nondegenerate subspace, as an ambient
    /// matrix.
    pub fn projector(&self, s: &Subspace) -> Result<Matrix, Error> {
        let b = s.basis();
        let inv = self
            .restrict_form(s)
            .gram
            .inverse()
            .ok_or_else(|| Error::Precondition("projection onto a degenerate subspace".into()))?;
        Ok(&(&(b * &inv) * &b.transpose()) * &self.gram)
    }

    /// Some vector with `B(v,v) != 0`, or `None` for the zero form.
    pub fn anisotropic_vector(&self) -> Option<Vector> {
        let (e, vals) = orthogonal_basis(&self.gram);
        vals.iter().position(|v| !v.is_zero()).map(|i| e.column(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_int_rows(rows)
    }

    #[test]
    fn signatures() {
        let s = QuadSpace::new(m(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, -1]])).unwrap();
        assert_eq!(s.signature(), Signature { p: 2, q: 1, r: 0 });
        assert_eq!(s.disc_sign().unwrap(), Sign::Minus);
        let h = QuadSpace::new(m(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(h.signature(), Signature { p: 1, q: 1, r: 0 });
        assert_eq!(QuadSpace::new(m(&[&[0]])).unwrap().signature(), Signature { p: 0, q: 0, r: 1 });
        for t in 1..4 {
            assert_eq!(QuadSpace::hyperbolic(t).disc_sign().unwrap(), Sign::pow_minus_one(t));
        }
    }

    #[test]
    fn complements_and_restrictions() {
        let h = QuadSpace::new(m(&[&[0, 1], &[1, 0]])).unwrap();
        let e1 = Subspace::new(m(&[&[1], &[0]])).unwrap();
        assert!(h.orthogonal_complement(&e1).same_as(&e1));
        let d = Subspace::new(m(&[&[1], &[1]])).unwrap();
        assert_eq!(h.restrict_form(&d).gram(), &m(&[&[2]]));
        assert_eq!(h.restrict_form(&e1).gram(), &m(&[&[0]]));
        let e = QuadSpace::standard(2, 0);
        let c = e.orthogonal_complement(&e1);
        assert!(c.same_as(&Subspace::new(m(&[&[0], &[1]])).unwrap()));
        assert_eq!(e.orthogonal_complement(&Subspace::full(2)).dim(), 0);
    }

    #[test]
    fn rejects_bad_grams() {
        assert_eq!(QuadSpace::new(m(&[&[1, 2], &[0, 1]])), Err(Error::AsymmetricGram));
        assert_eq!(QuadSpace::nondegenerate(m(&[&[1, 1], &[1, 1]])), Err(Error::SingularGram));
    }

    #[test]
    fn orthogonal_basis_diagonalizes() {
        let g = m(&[&[0, 2, 1], &[2, 0, 3], &[1, 3, 0]]);
        let (e, vals) = orthogonal_basis(&g);
        let d = &(&e.transpose() * &g) * &e;
        let expect = Matrix::diag(&vals);
        assert_eq!(d, expect);
        assert!(!e.det().is_zero());
        assert_eq!(signature_of_gram(&g).dim(), 3);
        assert!(vals.iter().all(|v| *v != rat(0)));
    }
}
