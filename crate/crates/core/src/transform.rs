//! Isometries of a nondegenerate space: validation, reflections, spinor
//! norm, kernel/image towers and group membership.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{rat, Matrix, Rational, Sign, Vector};
use crate::bilinear::{QuadSpace, Subspace};
use crate::error::Error;

/// The three groups O(V) ⊇ SO(V) ⊇ Ω(V).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GroupTag {
    O,
    SO,
    Omega,
}

impl GroupTag {
    pub const ALL: [GroupTag; 3] = [GroupTag::O, GroupTag::SO, GroupTag::Omega];

    /// Membership of an element with the given determinant and spinor norm.
    pub fn admits(self, det: Sign, theta: Sign) -> bool {
        match self {
            GroupTag::O => true,
            GroupTag::SO => det == Sign::Plus,
            GroupTag::Omega => det == Sign::Plus && theta == Sign::Plus,
        }
    }

    /// Whether `self` is a subgroup of `other`.
    pub fn within(self, other: GroupTag) -> bool {
        self >= other
    }
}

impl fmt::Display for GroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupTag::O => "O",
            GroupTag::SO => "SO",
            GroupTag::Omega => "Omega",
        })
    }
}

impl FromStr for GroupTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<GroupTag, Error> {
        match s {
            "O" => Ok(GroupTag::O),
            "SO" => Ok(GroupTag::SO),
            "Omega" => Ok(GroupTag::Omega),
            _ => Err(Error::Parse(format!("unknown group {s:?}"))),
        }
    }
}

/// An isometry of a nondegenerate quadratic space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthoMap {
    space: QuadSpace,
    matrix: Matrix,
}

impl OrthoMap {
    pub fn new(space: QuadSpace, matrix: Matrix) -> Result<OrthoMap, Error> {
        if !matrix.is_square() || matrix.rows() != space.dim() {
            return Err(Error::Shape(format!(
                "matrix is {}x{} but the space has dimension {}",
                matrix.rows(),
                matrix.cols(),
                space.dim()
            )));
        }
        if space.gram().det().is_zero() {
            return Err(Error::SingularGram);
        }
        if &(&matrix.transpose() * space.gram()) * &matrix != *space.gram() {
            return Err(Error::NotOrthogonal);
        }
        Ok(OrthoMap { space, matrix })
    }

    pub fn identity(space: &QuadSpace) -> OrthoMap {
        OrthoMap { matrix: Matrix::identity(space.dim()), space: space.clone() }
    }

    pub fn space(&self) -> &QuadSpace {
        &self.space
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `G^{-1} Mᵀ G`, exact.
    pub fn inverse(&self) -> OrthoMap {
        let g = self.space.gram();
        let gi = g.inverse().expect("ambient form is nondegenerate");
        OrthoMap { matrix: &(&gi * &self.matrix.transpose()) * g, space: self.space.clone() }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &OrthoMap) -> OrthoMap {
        debug_assert_eq!(self.space, other.space);
        OrthoMap { matrix: &self.matrix * &other.matrix, space: self.space.clone() }
    }

    pub fn neg(&self) -> OrthoMap {
        OrthoMap { matrix: -&self.matrix, space: self.space.clone() }
    }

    pub fn det(&self) -> Sign {
        Sign::of(&self.matrix.det()).expect("isometries are invertible")
    }

    pub fn is_identity(&self) -> bool {
        self.matrix.is_identity()
    }

    pub fn is_involution(&self) -> bool {
        (&self.matrix * &self.matrix).is_identity()
    }

    /// The restriction to an invariant subspace, expressed in the
    /// subspace's basis with the restricted form.
    pub fn restrict(&self, s: &Subspace) -> Result<OrthoMap, Error> {
        let b = s.basis();
        let img = &self.matrix * b;
        let coords = b
            .solve(&img)
            .ok_or_else(|| Error::Precondition("subspace is not invariant".into()))?;
        OrthoMap::new(self.space.restrict_form(s), coords)
    }

    /// Change of basis: the same map written in the basis given by the
    /// columns of `p`.
    pub fn conjugate_basis(&self, p: &Matrix) -> Result<OrthoMap, Error> {
        let pi = p.inverse().ok_or_else(|| Error::Precondition("singular change of basis".into()))?;
        let gram = &(&p.transpose() * self.space.gram()) * p;
        OrthoMap::new(QuadSpace::nondegenerate(gram)?, &(&pi * &self.matrix) * p)
    }

    /// Orthogonal sum of two isometries on the direct sum of their spaces.
    pub fn direct_sum(&self, other: &OrthoMap) -> OrthoMap {
        OrthoMap {
            space: self.space.direct_sum(&other.space),
            matrix: self.matrix.direct_sum(&other.matrix),
        }
    }
}

/// `x ↦ x - 2 B(x,v)/B(v,v) v`.
pub fn make_reflection(space: &QuadSpace, v: &[Rational]) -> Result<OrthoMap, Error> {
    let bvv = space.form(v, v);
    if bvv.is_zero() {
        return Err(Error::Precondition("reflection in an isotropic vector".into()));
    }
    let n = space.dim();
    let gv = space.gram().mul_vec(v);
    let c = rat(2) / &bvv;
    let mut m = Matrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            let d = &c * &v[i] * &gv[j];
            m[(i, j)] -= d;
        }
    }
    Ok(OrthoMap { space: space.clone(), matrix: m })
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, height: i64) -> Vector {
    (0..n).map(|_| rat(rng.gen_range(-height..=height))).collect()
}

/// Spinor norm as a real square class, by constructive Cartan–Dieudonné:
/// peel off reflections `s_w` with `w = u - ψu` anisotropic, each of which
/// enlarges the fixed space of the residual map. When the residual moves
/// space is totally isotropic, an auxiliary anisotropic reflection is
/// prepended and its sign recorded.
pub fn spinor_norm(phi: &OrthoMap, seed: u64) -> Sign {
    spinor_factorization(phi, seed).0
}

/// Spinor norm together with the reflection vectors used, in order: the map
/// equals the product of the reflections.
pub fn spinor_factorization(phi: &OrthoMap, seed: u64) -> (Sign, Vec<Vector>) {
    let space = phi.space();
    let n = phi.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theta = Sign::Plus;
    // residual = s_k ... s_1 φ ; factors collected so that φ = s_1 ... s_k residual
    let mut residual = phi.matrix().clone();
    let mut vectors: Vec<Vector> = Vec::new();
    let mut escapes = 0usize;
    while !residual.is_identity() {
        let mut found = None;
        'search: for attempt in 0..(n + 60) {
            let u = if attempt < n {
                let mut e = vec![Rational::zero(); n];
                e[attempt] = Rational::one();
                e
            } else {
                random_vector(&mut rng, n, 1 + (attempt as i64 - n as i64) / 8)
            };
            let w: Vector = u.iter().zip(residual.mul_vec(&u)).map(|(a, b)| b - a).collect();
            if !space.form(&w, &w).is_zero() {
                found = Some(w);
                break 'search;
            }
        }
        let w = match found {
            Some(w) => w,
            None => {
                escapes += 1;
                assert!(escapes <= 2 * n + 2, "spinor norm factorization failed to converge");
                let mut a;
                loop {
                    a = random_vector(&mut rng, n, 3);
                    if !space.form(&a, &a).is_zero() {
                        break;
                    }
                }
                a
            }
        };
        let s = make_reflection(space, &w).expect("anisotropic");
        theta *= Sign::of(&space.form(&w, &w)).unwrap();
        residual = s.matrix() * &residual;
        vectors.push(w);
    }
    (theta, vectors)
}

/// Zassenhaus–Wall evaluation of the spinor norm: the discriminant of the
/// form `[(1-φ)x, (1-φ)y] = B((1-φ)x, y)` on the moves space. Used as an
/// independent check of the reflection factorization.
pub fn spinor_norm_wall(phi: &OrthoMap) -> Sign {
    let n = phi.dim();
    let one_minus = &Matrix::identity(n) - phi.matrix();
    let (_, pivots) = one_minus.rref();
    // preimages x_i of a basis (1-φ)x_i of the image
    let xs: Vec<Vector> = pivots
        .iter()
        .map(|&j| {
            let mut e = vec![Rational::zero(); n];
            e[j] = Rational::one();
            e
        })
        .collect();
    let us: Vec<Vector> = xs.iter().map(|x| one_minus.mul_vec(x)).collect();
    let k = xs.len();
    let mut w = Matrix::zeros(k, k);
    for i in 0..k {
        for j in 0..k {
            w[(i, j)] = phi.space().form(&us[i], &xs[j]);
        }
    }
    Sign::of(&w.det()).unwrap_or(Sign::Plus)
}

/// Determinant, spinor norm, moved space and fixed space of an involution.
#[derive(Clone, Debug)]
pub struct InvolutionData {
    pub det: Sign,
    pub theta: Sign,
    pub bahn: Subspace,
    pub fix: Subspace,
}

/// For an involution σ the moved space is the (-1)-eigenspace, the spinor
/// norm is its discriminant and the determinant is `(-1)^{dim}`.
pub fn involution_invariants(sigma: &OrthoMap) -> Result<InvolutionData, Error> {
    if !sigma.is_involution() {
        return Err(Error::Precondition("map is not an involution".into()));
    }
    let n = sigma.dim();
    let i = Matrix::identity(n);
    let bahn = Subspace::span(&(sigma.matrix() - &i));
    let fix = Subspace::span(&(sigma.matrix() - &i).kernel());
    let theta = sigma.space().disc_of(&bahn)?;
    Ok(InvolutionData { det: Sign::pow_minus_one(bahn.dim()), theta, bahn, fix })
}

/// `Fix^j = ker(φ-1)^j`, `Bahn^j = im(φ-1)^j`, `Neg^j = ker(φ+1)^j`.
#[derive(Clone, Debug)]
pub struct Towers {
    pub fix: Subspace,
    pub bahn: Subspace,
    pub neg: Subspace,
}

/// Kernel/image towers at level `j`; `None` means the stable level
/// `j = dim V`.
pub fn space_towers(phi: &OrthoMap, j: Option<usize>) -> Towers {
    let n = phi.dim();
    let j = j.unwrap_or(n);
    let i = Matrix::identity(n);
    let a = (phi.matrix() - &i).pow(j);
    let b = (phi.matrix() + &i).pow(j);
    Towers { fix: Subspace::span(&a.kernel()), bahn: Subspace::span(&a), neg: Subspace::span(&b.kernel()) }
}

/// Fitting decomposition of ψ - 1: `(im (ψ-1)^n, ker (ψ-1)^n)`.
pub fn fitting_split(psi: &OrthoMap) -> (Subspace, Subspace) {
    let t = space_towers(psi, None);
    (t.bahn, t.fix)
}

pub fn group_membership(phi: &OrthoMap, seed: u64) -> GroupTag {
    if phi.det() == Sign::Minus {
        GroupTag::O
    } else if spinor_norm(phi, seed) == Sign::Minus {
        GroupTag::SO
    } else {
        GroupTag::Omega
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;

    fn hyp() -> QuadSpace {
        QuadSpace::new(Matrix::from_int_rows(&[&[0, 1], &[1, 0]])).unwrap()
    }

    #[test]
    fn reflections() {
        let e = QuadSpace::standard(2, 0);
        let r = make_reflection(&e, &[rat(1), rat(0)]).unwrap();
        assert_eq!(r.matrix(), &Matrix::from_int_rows(&[&[-1, 0], &[0, 1]]));
        let s = make_reflection(&hyp(), &[rat(1), rat(-1)]).unwrap();
        assert_eq!(s.matrix(), &Matrix::from_int_rows(&[&[0, 1], &[1, 0]]));
        assert!(s.is_involution());
        assert_eq!(s.det(), Sign::Minus);
        assert!(make_reflection(&hyp(), &[rat(1), rat(0)]).is_err());
    }

    #[test]
    fn spinor_norm_examples() {
        let h = hyp();
        assert_eq!(spinor_norm(&OrthoMap::identity(&h), 0), Sign::Plus);
        let swap = OrthoMap::new(h.clone(), Matrix::from_int_rows(&[&[0, 1], &[1, 0]])).unwrap();
        assert_eq!(spinor_norm(&swap, 1), Sign::Minus);
        let d = OrthoMap::new(h, Matrix::diag(&[rat(2), ratio(1, 2)])).unwrap();
        assert_eq!(spinor_norm(&d, 2), Sign::Plus);
        assert_eq!(spinor_norm_wall(&d), Sign::Plus);
        let dn = d.neg();
        assert_eq!(spinor_norm(&dn, 3), Sign::Minus);
        assert_eq!(spinor_norm_wall(&dn), Sign::Minus);
    }

    #[test]
    fn involution_data() {
        let s = QuadSpace::standard(2, 1);
        let minus = OrthoMap::identity(&s).neg();
        let d = involution_invariants(&minus).unwrap();
        assert_eq!((d.det, d.theta, d.bahn.dim()), (Sign::Minus, Sign::Minus, 3));
        let id = involution_invariants(&OrthoMap::identity(&s)).unwrap();
        assert_eq!((id.det, id.theta, id.bahn.dim()), (Sign::Plus, Sign::Plus, 0));
    }

    #[test]
    fn towers_and_fitting() {
        // a 3-dim unipotent Jordan block preserving [[0,0,1],[0,1,0],[1,0,0]]
        let g = Matrix::from_rows(vec![
            vec![rat(0), rat(0), rat(1)],
            vec![rat(0), rat(1), rat(0)],
            vec![rat(1), rat(0), rat(0)],
        ]);
        let m = Matrix::from_rows(vec![
            vec![rat(1), rat(1), ratio(-1, 2)],
            vec![rat(0), rat(1), rat(-1)],
            vec![rat(0), rat(0), rat(1)],
        ]);
        let phi = OrthoMap::new(QuadSpace::nondegenerate(g).unwrap(), m).unwrap();
        let t = space_towers(&phi, Some(1));
        assert_eq!((t.fix.dim(), t.bahn.dim()), (1, 2));
        assert!(phi.space().orthogonal_complement(&t.bahn).same_as(&t.fix));
        let (b, f) = fitting_split(&phi);
        assert_eq!((b.dim(), f.dim()), (0, 3));
    }
}
