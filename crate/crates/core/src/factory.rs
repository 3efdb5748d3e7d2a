//! Explicit reversing involutions and bireflection witnesses.
//!
//! Cyclic blocks: with the Krylov basis `A^i v`, the map `A^i v ↦ A^{-i} v`
//! is a reversing involution σ₁, and so is `β(A)σ₁` for every
//! `β = γ(A)γ(A⁻¹)⁻¹`. The determinant is toggled by `−σ₁` and the spinor
//! norm on split type 3 pieces by the sign of `β` at the real eigenvalues,
//! so a short seeded search over γ reaches every profile pair.
//!
//! Bicyclic blocks: after making the two generators isotropic, the block
//! is `diag(A, A^{-T})` on `[[0,I],[I,0]]` and `[[0,S],[S⁻¹,0]]` reverses
//! it for any symmetric invertible S with `AS = SAᵀ`.

use std::fmt;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::matrix::{kernel_in_span, symmetric_basis};
use crate::algebra::roots::isolate_real_roots;
use crate::algebra::{rat, Matrix, Poly, Rational, Sign, Vector};
use crate::bilinear::QuadSpace;
use crate::calculus::{combine_profiles, reverser_profile, DetThetaProfile};
use crate::decompose::{Block, BlockKind, Decomposition};
use crate::error::Error;
use crate::transform::{involution_invariants, GroupTag, OrthoMap};

#[derive(Clone, Copy, Debug)]
pub struct WitnessConfig {
    pub seed: u64,
    /// Random trials per block.
    pub budget: usize,
}

impl Default for WitnessConfig {
    fn default() -> Self {
        WitnessConfig { seed: 0xb1f1, budget: 500 }
    }
}

/// `φ = σ τ` with σ, τ involutions in the target group.
#[derive(Clone, Debug)]
pub struct Witness {
    pub sigma: OrthoMap,
    pub tau: OrthoMap,
    pub target_group: GroupTag,
}

/// Reasons a witness fails verification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessDefect {
    NotIsometry(&'static str),
    SigmaNotInvolution,
    TauNotInvolution,
    ProductMismatch,
    Determinant(&'static str),
    SpinorNorm(&'static str),
}

impl fmt::Display for WitnessDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WitnessDefect::NotIsometry(which) => write!(f, "{which} does not preserve the form"),
            WitnessDefect::SigmaNotInvolution => write!(f, "sigma² ≠ 1"),
            WitnessDefect::TauNotInvolution => write!(f, "tau² ≠ 1"),
            WitnessDefect::ProductMismatch => write!(f, "sigma·tau ≠ phi"),
            WitnessDefect::Determinant(which) => write!(f, "determinant of {which} is -1"),
            WitnessDefect::SpinorNorm(which) => write!(f, "spinor norm of {which} is -1"),
        }
    }
}

/// Exact check of every witness invariant.
pub fn verify_witness(w: &Witness, phi: &OrthoMap) -> Result<(), WitnessDefect> {
    let g = phi.space().gram();
    for (name, m) in [("sigma", w.sigma.matrix()), ("tau", w.tau.matrix())] {
        if &(&m.transpose() * g) * m != *g {
            return Err(WitnessDefect::NotIsometry(name));
        }
    }
    if !w.sigma.is_involution() {
        return Err(WitnessDefect::SigmaNotInvolution);
    }
    if !w.tau.is_involution() {
        return Err(WitnessDefect::TauNotInvolution);
    }
    if w.sigma.matrix() * w.tau.matrix() != *phi.matrix() {
        return Err(WitnessDefect::ProductMismatch);
    }
    for (name, m) in [("sigma", &w.sigma), ("tau", &w.tau)] {
        let inv = involution_invariants(m).expect("checked involution");
        if w.target_group != GroupTag::O && inv.det == Sign::Minus {
            return Err(WitnessDefect::Determinant(name));
        }
        if w.target_group == GroupTag::Omega && inv.theta == Sign::Minus {
            return Err(WitnessDefect::SpinorNorm(name));
        }
    }
    Ok(())
}

/// (det, Θ) of an involution given by its matrix on a space.
pub fn involution_pair(space: &QuadSpace, sigma: &Matrix) -> (Sign, Sign) {
    let n = sigma.rows();
    let bahn = crate::bilinear::Subspace::span(&(sigma - &Matrix::identity(n)));
    let theta = space.disc_of(&bahn).expect("moved space of an isometric involution is nondegenerate");
    (Sign::pow_minus_one(bahn.dim()), theta)
}

/// Whether σ is an isometric involution reversing φ.
pub fn is_reversing_involution(phi: &OrthoMap, sigma: &Matrix) -> bool {
    let g = phi.space().gram();
    let m = phi.matrix();
    (sigma * sigma).is_identity()
        && &(&sigma.transpose() * g) * sigma == *g
        && &(sigma * m) * sigma == *phi.inverse().matrix()
}

/// Profile of a rational block: the product over its real summands.
pub fn block_profile(d: &Decomposition, b: usize) -> DetThetaProfile {
    combine_profiles(&d.summands_of_block(b).map(reverser_profile).collect::<Vec<_>>())
}

fn cyclic_sigma_one(a_inv: &Matrix) -> Matrix {
    let k = a_inv.rows();
    let mut e0 = vec![rat(0); k];
    e0[0] = rat(1);
    let mut cols: Vec<Vector> = Vec::with_capacity(k);
    let mut x = e0;
    for _ in 0..k {
        let next = a_inv.mul_vec(&x);
        cols.push(x);
        x = next;
    }
    Matrix::from_columns(k, &cols)
}

/// Rational points strictly between consecutive real roots of `p`, plus
/// one below and one above them all.
fn separators(p: &Poly) -> Vec<Rational> {
    let sf = p.squarefree_decomposition().into_iter().fold(Poly::one(), |acc, (f, _)| &acc * &f);
    let iv = isolate_real_roots(&sf);
    let mut out: Vec<Rational> = Vec::with_capacity(iv.len() + 1);
    for (lo, hi) in &iv {
        if out.last() != Some(lo) {
            out.push(lo.clone());
        }
        out.push(hi.clone());
    }
    out
}

fn random_poly(rng: &mut ChaCha8Rng, deg: usize, height: i64) -> Poly {
    let mut c: Vec<_> = (0..deg).map(|_| rat(rng.gen_range(-height..=height))).collect();
    c.push(rat(1));
    Poly::new(c)
}

/// A reversing involution on a block (in the block's local basis) with the
/// requested (det, Θ).
pub fn construct_block_reverser(
    block: &Block,
    profile: DetThetaProfile,
    target: (Sign, Sign),
    rng: &mut ChaCha8Rng,
    budget: usize,
) -> Result<Matrix, Error> {
    if !profile.contains(target.0, target.1) {
        return Err(Error::Precondition(format!("target ({},{}) outside the profile {profile}", target.0, target.1)));
    }
    if budget == 0 {
        return Err(Error::BudgetExhausted("zero trial budget".into()));
    }
    match block.kind {
        BlockKind::Cyclic => cyclic_reverser(&block.map, target, rng, budget),
        BlockKind::Bicyclic => {
            let s = bicyclic_reverser(block, rng, budget)?;
            let got = involution_pair(block.map.space(), &s);
            if got != target {
                return Err(Error::Internal(format!(
                    "bicyclic reverser has ({},{}) but the profile forces ({},{})",
                    got.0, got.1, target.0, target.1
                )));
            }
            Ok(s)
        }
    }
}

fn cyclic_reverser(map: &OrthoMap, target: (Sign, Sign), rng: &mut ChaCha8Rng, budget: usize) -> Result<Matrix, Error> {
    let a = map.matrix();
    let a_inv = map.inverse().matrix().clone();
    let k = a.rows();
    let sigma1 = cyclic_sigma_one(&a_inv);
    let space = map.space();
    // Products of (x - r) over rational points r separating the real
    // eigenvalues reach every sign pattern of γ on the spectrum; random γ
    // follow once those are exhausted.
    let seps = separators(&a.minimal_polynomial());
    let patterns = 1usize << seps.len().min(10);
    for trial in 0..budget {
        let base = if trial == 0 {
            sigma1.clone()
        } else {
            let gamma = if trial < patterns {
                seps.iter()
                    .enumerate()
                    .filter(|(i, _)| trial >> i & 1 == 1)
                    .fold(Poly::one(), |g, (_, r)| &g * &Poly::linear(r))
            } else {
                let deg = 1 + (trial / 40) % k.max(1);
                random_poly(rng, deg, 1 + (trial / 20) as i64)
            };
            let ga = gamma.eval_matrix(a);
            let gai = gamma.eval_matrix(&a_inv);
            let Some(gai_inv) = gai.inverse() else { continue };
            if ga.det().is_zero() {
                continue;
            }
            &(&ga * &gai_inv) * &sigma1
        };
        for cand in [base.clone(), -&base] {
            if involution_pair(space, &cand) == target {
                debug_assert!(is_reversing_involution(map, &cand));
                return Ok(cand);
            }
        }
    }
    Err(Error::BudgetExhausted(format!("no cyclic reverser with ({},{}) in {budget} trials", target.0, target.1)))
}

/// Makes `v` isotropic for all `B(v, N^k v)` by subtracting multiples of
/// `N^{e-1-k} w`, top-down over even k.
fn isotropize(g: &Matrix, n: &Matrix, e: usize, v: &mut Vector, w: &Vector) -> Result<(), Error> {
    let npow: Vec<Matrix> = (0..e).map(|k| n.pow(k)).collect();
    let l = rat(2) * g.bilinear(v, &npow[e - 1].mul_vec(w));
    if l.is_zero() {
        return Err(Error::Internal("generators of a bicyclic block are not paired".into()));
    }
    let mut k = e - 2;
    loop {
        let b = g.bilinear(v, &npow[k].mul_vec(v));
        if !b.is_zero() {
            let shift = npow[e - 1 - k].mul_vec(w);
            let c = &b / &l;
            for (vi, si) in v.iter_mut().zip(shift) {
                *vi -= &c * si;
            }
        }
        if k < 2 {
            break;
        }
        k -= 2;
    }
    if (0..e).any(|k| !g.bilinear(v, &npow[k].mul_vec(v)).is_zero()) {
        return Err(Error::Internal("isotropic correction did not converge".into()));
    }
    Ok(())
}

fn bicyclic_reverser(block: &Block, rng: &mut ChaCha8Rng, budget: usize) -> Result<Matrix, Error> {
    let a = block.map.matrix();
    let g = block.map.space().gram();
    let e = block.exponent;
    let dim = 2 * e;
    let eps = block.prime.unit_eigenvalue().expect("bicyclic blocks sit at ±1");
    let n = a - &Matrix::scalar(dim, &eps.to_rational());
    let mut v: Vector = (0..dim).map(|i| rat((i == 0) as i64)).collect();
    let mut w: Vector = (0..dim).map(|i| rat((i == e) as i64)).collect();
    isotropize(g, &n, e, &mut v, &w)?;
    isotropize(g, &n, e, &mut w, &v)?;
    let krylov = |x: &Vector| {
        let mut cols = Vec::with_capacity(e);
        let mut y = x.clone();
        for _ in 0..e {
            let next = a.mul_vec(&y);
            cols.push(y);
            y = next;
        }
        Matrix::from_columns(dim, &cols)
    };
    let x = krylov(&v);
    let wk = krylov(&w);
    let pairing = &(&x.transpose() * g) * &wk;
    let c = pairing.inverse().ok_or_else(|| Error::Internal("isotropic halves are not dual".into()))?;
    let y = &wk * &c;
    let q = x.hstack(&y);
    let q_inv = q.inverse().ok_or_else(|| Error::Internal("dual basis is singular".into()))?;
    let ax = x.solve(&(a * &x)).ok_or_else(|| Error::Internal("Z(v) not invariant".into()))?;
    let sols = kernel_in_span(&symmetric_basis(e), |s| &(&ax * s) - &(s * &ax.transpose()));
    for trial in 0..budget {
        let height = 1 + (trial / 10) as i64;
        let mut s = Matrix::zeros(e, e);
        for b in &sols {
            s = &s + &b.scale(&rat(rng.gen_range(-height..=height)));
        }
        let Some(si) = s.inverse() else { continue };
        let mut sigma = Matrix::zeros(dim, dim);
        for i in 0..e {
            for j in 0..e {
                sigma[(i, e + j)] = s[(i, j)].clone();
                sigma[(e + i, j)] = si[(i, j)].clone();
            }
        }
        let local = &(&q * &sigma) * &q_inv;
        debug_assert!(is_reversing_involution(&block.map, &local));
        return Ok(local);
    }
    Err(Error::BudgetExhausted(format!("no invertible symmetric transposer in {budget} trials")))
}

/// Chooses per-block targets whose product satisfies `accept`.
pub fn choose_targets(
    profiles: &[DetThetaProfile],
    accept: impl Fn(Sign, Sign) -> bool,
) -> Option<Vec<(Sign, Sign)>> {
    // reach[i][state] = (previous state, chosen pair) after i blocks
    let idx = |d: Sign, t: Sign| ((d == Sign::Minus) as usize) * 2 + (t == Sign::Minus) as usize;
    let pair = |i: usize| {
        (if i >= 2 { Sign::Minus } else { Sign::Plus }, if i % 2 == 1 { Sign::Minus } else { Sign::Plus })
    };
    let mut reach: Vec<[Option<(usize, (Sign, Sign))>; 4]> = vec![[None; 4]];
    reach[0][0] = Some((0, (Sign::Plus, Sign::Plus)));
    for p in profiles {
        let prev = reach.last().unwrap();
        let mut next = [None; 4];
        for s in 0..4 {
            if prev[s].is_none() {
                continue;
            }
            let (d0, t0) = pair(s);
            for (d, t) in p.pairs() {
                let ns = idx(d0 * d, t0 * t);
                if next[ns].is_none() {
                    next[ns] = Some((s, (d, t)));
                }
            }
        }
        reach.push(next);
    }
    let last = reach.last().unwrap();
    let mut state = (0..4).find(|&s| last[s].is_some() && accept(pair(s).0, pair(s).1))?;
    let mut out = vec![(Sign::Plus, Sign::Plus); profiles.len()];
    for i in (1..reach.len()).rev() {
        let (prev, chosen) = reach[i][state].unwrap();
        out[i - 1] = chosen;
        state = prev;
    }
    Some(out)
}

/// Assembles σ blockwise from per-block reversers with the given targets
/// and returns its ambient matrix.
pub fn assemble_sigma(
    d: &Decomposition,
    phi: &OrthoMap,
    targets: &[(Sign, Sign)],
    cfg: WitnessConfig,
) -> Result<Matrix, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let n = phi.dim();
    let mut p = Matrix::zeros(n, 0);
    let mut local = Matrix::zeros(0, 0);
    for (i, b) in d.blocks.iter().enumerate() {
        let s = construct_block_reverser(b, block_profile(d, i), targets[i], &mut rng, cfg.budget)?;
        p = p.hstack(b.subspace.basis());
        local = local.direct_sum(&s);
    }
    let p_inv = p.inverse().ok_or_else(|| Error::Internal("blocks do not span the space".into()))?;
    Ok(&(&p * &local) * &p_inv)
}

/// A verified witness for bireflectionality in `g`; the verdict must have
/// been positive.
pub fn assemble_witness(phi: &OrthoMap, d: &Decomposition, g: GroupTag, cfg: WitnessConfig) -> Result<Witness, Error> {
    let profiles: Vec<_> = (0..d.blocks.len()).map(|i| block_profile(d, i)).collect();
    let targets = choose_targets(&profiles, |det, theta| g.admits(det, theta))
        .ok_or_else(|| Error::Precondition(format!("no reversing involution in {g}")))?;
    witness_from_targets(phi, d, g, &targets, cfg)
}

pub fn witness_from_targets(
    phi: &OrthoMap,
    d: &Decomposition,
    g: GroupTag,
    targets: &[(Sign, Sign)],
    cfg: WitnessConfig,
) -> Result<Witness, Error> {
    if !g.admits(phi.det(), crate::transform::spinor_norm(phi, cfg.seed)) {
        return Err(Error::Precondition(format!("element is not in {g}")));
    }
    let sigma = assemble_sigma(d, phi, targets, cfg)?;
    let tau = &sigma * phi.matrix();
    let w = Witness {
        sigma: OrthoMap::new(phi.space().clone(), sigma).map_err(|e| Error::Internal(format!("sigma: {e}")))?,
        tau: OrthoMap::new(phi.space().clone(), tau).map_err(|e| Error::Internal(format!("tau: {e}")))?,
        target_group: g,
    };
    verify_witness(&w, phi).map_err(|e| Error::Internal(format!("assembled witness fails: {e}")))?;
    Ok(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;
    use crate::decompose::{decompose, SplitConfig};

    fn hyp() -> QuadSpace {
        QuadSpace::new(Matrix::from_int_rows(&[&[0, 1], &[1, 0]])).unwrap()
    }

    #[test]
    fn hyperbolic_diagonal_target() {
        let phi = OrthoMap::new(hyp(), Matrix::diag(&[rat(2), ratio(1, 2)])).unwrap();
        let d = decompose(&phi, SplitConfig::default()).unwrap();
        let prof = block_profile(&d, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = construct_block_reverser(&d.blocks[0], prof, (Sign::Minus, Sign::Minus), &mut rng, 100).unwrap();
        let amb = &(&d.blocks[0].subspace.basis().clone() * &s) * &d.blocks[0].subspace.basis().inverse().unwrap();
        assert_eq!(amb, Matrix::from_int_rows(&[&[0, 1], &[1, 0]]));
    }

    #[test]
    fn identity_witness_in_omega() {
        let phi = OrthoMap::identity(&QuadSpace::standard(2, 0));
        let d = decompose(&phi, SplitConfig::default()).unwrap();
        let w = assemble_witness(&phi, &d, GroupTag::Omega, WitnessConfig::default()).unwrap();
        assert!(verify_witness(&w, &phi).is_ok());
        assert_eq!(involution_pair(phi.space(), w.sigma.matrix()), (Sign::Plus, Sign::Plus));
    }

    #[test]
    fn defects_are_named() {
        let phi = OrthoMap::identity(&QuadSpace::standard(1, 1));
        let r = crate::transform::make_reflection(phi.space(), &[rat(1), rat(0)]).unwrap();
        let s = crate::transform::make_reflection(phi.space(), &[rat(0), rat(1)]).unwrap();
        let rs = r.compose(&s);
        // σ = τ = rs: det +1, spinor norm −1
        let w = Witness { sigma: rs.clone(), tau: rs.clone(), target_group: GroupTag::Omega };
        assert_eq!(verify_witness(&w, &phi), Err(WitnessDefect::SpinorNorm("sigma")));
        let rot = OrthoMap::new(
            QuadSpace::standard(2, 0),
            Matrix::from_rows(vec![vec![ratio(3, 5), ratio(-4, 5)], vec![ratio(4, 5), ratio(3, 5)]]),
        )
        .unwrap();
        let bad = Witness { sigma: rot.clone(), tau: rot.inverse(), target_group: GroupTag::O };
        let id = OrthoMap::identity(&QuadSpace::standard(2, 0));
        assert_eq!(verify_witness(&bad, &id), Err(WitnessDefect::SigmaNotInvolution));
        assert_eq!(WitnessDefect::SigmaNotInvolution.to_string(), "sigma² ≠ 1");
    }

    #[test]
    fn target_selection() {
        use Sign::{Minus as M, Plus as P};
        let a = DetThetaProfile::from_pairs(&[(P, M), (M, P)]);
        let b = DetThetaProfile::single(P, M);
        let t = choose_targets(&[a, b], |d, t| d == P && t == P).unwrap();
        assert_eq!(t, vec![(P, M), (P, M)]);
        assert!(choose_targets(&[b], |d, t| d == P && t == P).is_none());
    }
}
