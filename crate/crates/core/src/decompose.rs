//! Orthogonal decomposition of an isometry into indecomposable summands.
//!
//! The rational decomposition splits V into primary components and each
//! component into cyclic or bicyclic blocks that are orthogonal and
//! nondegenerate. Each rational block is then refined over the reals: a
//! block whose prime is selfreciprocal but not `x±1` breaks into type 2*,
//! split type 3 and nonsplit type 3 pieces according to the real roots of
//! the trace polynomial; a block for a pair `h ≠ h*` breaks into split and
//! nonsplit type 3 pieces according to the real roots of `h`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::roots::{isolate_in, isolate_real_roots};
use crate::algebra::{factor_rational_poly, rat, Matrix, Poly, Rational, Sign, Vector};
use crate::bilinear::{signature_of_gram, Signature, Subspace};
use crate::error::Error;
use crate::transform::{fitting_split, OrthoMap};

/// Huppert's types of orthogonally indecomposable isometries over the reals.
///
/// `T2Minus` has minimal polynomial `(x-1)^n`, `T2Plus` has `(x+1)^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SummandType {
    T1,
    T2Plus,
    T2Minus,
    T2StarE,
    T2StarO,
    T3Split,
    T3NonSplit,
}

impl SummandType {
    pub fn is_t2pm(self) -> bool {
        matches!(self, SummandType::T2Plus | SummandType::T2Minus)
    }

    pub fn is_t2star(self) -> bool {
        matches!(self, SummandType::T2StarE | SummandType::T2StarO)
    }

    pub fn is_t3(self) -> bool {
        matches!(self, SummandType::T3Split | SummandType::T3NonSplit)
    }

    pub fn name(self) -> &'static str {
        match self {
            SummandType::T1 => "1",
            SummandType::T2Plus => "2+",
            SummandType::T2Minus => "2-",
            SummandType::T2StarE => "2e",
            SummandType::T2StarO => "2o",
            SummandType::T3Split => "3split",
            SummandType::T3NonSplit => "3nonsplit",
        }
    }
}

impl fmt::Display for SummandType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The rational prime (or reciprocal pair of primes) of a primary component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrimeKey {
    SelfReciprocal(Poly),
    Pair(Poly, Poly),
}

impl PrimeKey {
    /// The polynomial whose powers cut out the component.
    pub fn poly(&self) -> Poly {
        match self {
            PrimeKey::SelfReciprocal(g) => g.clone(),
            PrimeKey::Pair(h, hs) => h * hs,
        }
    }

    /// `Some(+1)` for `x-1`, `Some(-1)` for `x+1`.
    pub fn unit_eigenvalue(&self) -> Option<Sign> {
        match self {
            PrimeKey::SelfReciprocal(g) if *g == Poly::from_ints(&[-1, 1]) => Some(Sign::Plus),
            PrimeKey::SelfReciprocal(g) if *g == Poly::from_ints(&[1, 1]) => Some(Sign::Minus),
            _ => None,
        }
    }
}

impl fmt::Display for PrimeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimeKey::SelfReciprocal(g) => write!(f, "{g}"),
            PrimeKey::Pair(h, hs) => write!(f, "({h})({hs})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PrimaryComponent {
    pub prime: PrimeKey,
    pub subspace: Subspace,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum BlockKind {
    /// Spanned by `v, φv, φ²v, …`; the local basis is this Krylov basis.
    Cyclic,
    /// `Z(v) ⊕ Z(w)` for a pair of elementary divisors `(x±1)^e`, e even;
    /// the local basis is the Krylov basis of v followed by that of w.
    Bicyclic,
}

/// An orthogonally indecomposable summand over the rationals (which may
/// split further over the reals).
#[derive(Clone, Debug)]
pub struct Block {
    pub subspace: Subspace,
    /// φ restricted to the block, in the block's basis.
    pub map: OrthoMap,
    pub prime: PrimeKey,
    /// Power of the prime in the minimal polynomial.
    pub exponent: usize,
    pub kind: BlockKind,
    pub minpoly: Poly,
}

/// A real orthogonally indecomposable summand. Real summands of a rational
/// block need not be defined over the rationals, so a summand refers to
/// its block and carries its subspace only when it equals the block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summand {
    pub block: usize,
    pub stype: SummandType,
    pub dim: usize,
    pub signature: (usize, usize),
    pub disc: Sign,
    /// m for types 1 and 2, t for type 3.
    pub exponent: usize,
    /// Rational minimal polynomial when the summand is a whole block.
    pub minpoly: Option<String>,
}

impl Summand {
    pub fn q(&self) -> usize {
        self.signature.1
    }

    pub fn p(&self) -> usize {
        self.signature.0
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    pub components: Vec<PrimaryComponent>,
    pub blocks: Vec<Block>,
    pub summands: Vec<Summand>,
}

impl Decomposition {
    /// Multiset of `(type, dim, signature)`, sorted.
    pub fn shape(&self) -> Vec<(SummandType, usize, (usize, usize))> {
        let mut v: Vec<_> = self.summands.iter().map(|s| (s.stype, s.dim, s.signature)).collect();
        v.sort();
        v
    }

    pub fn summands_of_block(&self, b: usize) -> impl Iterator<Item = &Summand> {
        self.summands.iter().filter(move |s| s.block == b)
    }
}

/// Invariant data read by the classifier.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvariantData {
    /// `n[j]` counts elementary divisors `(x±1)^d` with `d ≡ j mod 8`.
    pub n: [usize; 8],
    pub binf_signature: (usize, usize),
    pub finf_signature: (usize, usize),
    pub summands: Vec<Summand>,
}

/// Elementary divisors via the rank formula, as `(prime, power)` with
/// repetition, sorted.
pub fn elementary_divisors(phi: &OrthoMap) -> Result<Vec<(Poly, usize)>, Error> {
    let m = phi.matrix();
    let n = phi.dim();
    let mut out = Vec::new();
    for (g, mult) in factor_rational_poly(&m.charpoly())? {
        let gm = g.eval_matrix(m);
        let mut ranks = vec![n];
        let mut p = Matrix::identity(n);
        for _ in 0..=mult {
            p = &p * &gm;
            ranks.push(p.rank());
        }
        let deg = g.deg();
        for d in 1..=mult {
            let c = ranks[d - 1] + ranks[d + 1] - 2 * ranks[d];
            debug_assert_eq!(c % deg, 0);
            for _ in 0..c / deg {
                out.push((g.clone(), d));
            }
        }
    }
    Ok(out)
}

/// Counts of elementary divisors `(x±1)^d` bucketed by `d mod 8`.
pub fn n_counts(phi: &OrthoMap) -> Result<[usize; 8], Error> {
    let mut n = [0usize; 8];
    let lin = [Poly::from_ints(&[-1, 1]), Poly::from_ints(&[1, 1])];
    for (g, d) in elementary_divisors(phi)? {
        if lin.contains(&g) {
            n[d % 8] += 1;
        }
    }
    Ok(n)
}

/// One component per selfreciprocal prime and per pair `{h, h*}`.
pub fn primary_components(phi: &OrthoMap) -> Result<Vec<PrimaryComponent>, Error> {
    let m = phi.matrix();
    let facs = factor_rational_poly(&m.charpoly())?;
    let mut used = vec![false; facs.len()];
    let mut out = Vec::new();
    for i in 0..facs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let (g, mult) = &facs[i];
        let gs = g.reciprocal()?;
        let (prime, power) = if gs == *g {
            (PrimeKey::SelfReciprocal(g.clone()), *mult)
        } else {
            let j = (0..facs.len())
                .find(|&j| !used[j] && facs[j].0 == gs)
                .ok_or_else(|| Error::Internal(format!("reciprocal of {g} missing from the characteristic polynomial")))?;
            used[j] = true;
            if facs[j].1 != *mult {
                return Err(Error::Internal("unequal multiplicities of reciprocal primes".into()));
            }
            (PrimeKey::Pair(g.clone(), gs), *mult)
        };
        let k = prime.poly().pow(power).eval_matrix(m).kernel();
        out.push(PrimaryComponent { prime, subspace: Subspace::span(&k) });
    }
    Ok(out)
}

/// Tuning for the randomized splitting step.
#[derive(Clone, Copy, Debug)]
pub struct SplitConfig {
    pub seed: u64,
    /// Random trials per split before giving up.
    pub budget: usize,
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig { seed: 0x5eed, budget: 200 }
    }
}

fn random_local(rng: &mut ChaCha8Rng, k: usize, height: i64) -> Vector {
    (0..k).map(|_| rat(rng.gen_range(-height..=height))).collect()
}

fn nilpotency_index(n: &Matrix) -> usize {
    let mut p = n.clone();
    let mut e = 1;
    while !p.is_zero() {
        p = &p * n;
        e += 1;
    }
    e
}

fn krylov_basis(a: &Matrix, v: &[Rational], len: usize) -> Matrix {
    let mut cols = Vec::with_capacity(len);
    let mut x = v.to_vec();
    for _ in 0..len {
        let next = a.mul_vec(&x);
        cols.push(x);
        x = next;
    }
    Matrix::from_columns(v.len(), &cols)
}

/// Splits one primary component into orthogonal cyclic or bicyclic blocks.
/// Returned bases are ambient columns.
pub fn split_indecomposable(
    phi: &OrthoMap,
    component: &PrimaryComponent,
    cfg: SplitConfig,
) -> Result<Vec<(Matrix, BlockKind, usize)>, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let g = component.prime.poly();
    let gdeg = g.deg();
    let linear_unit = component.prime.unit_eigenvalue().is_some();
    let gram = phi.space().gram();
    let mut current = component.subspace.basis().clone();
    let mut blocks = Vec::new();
    while current.cols() > 0 {
        let k = current.cols();
        let local = phi.restrict(&Subspace::new(current.clone())?)?;
        let a = local.matrix();
        let lg = local.space().gram();
        let nmat = g.eval_matrix(a);
        let e = nilpotency_index(&nmat);
        let top = nmat.pow(e - 1);
        let bicyclic = linear_unit && e % 2 == 0;
        let mut found: Option<Matrix> = None;
        for attempt in 0..cfg.budget {
            let h = 1 + (attempt / 20) as i64;
            let v = random_local(&mut rng, k, h);
            if crate::algebra::matrix::is_zero_vec(&top.mul_vec(&v)) {
                continue;
            }
            let basis = if bicyclic {
                let w = random_local(&mut rng, k, h);
                if crate::algebra::matrix::is_zero_vec(&top.mul_vec(&w)) {
                    continue;
                }
                krylov_basis(a, &v, e).hstack(&krylov_basis(a, &w, e))
            } else {
                krylov_basis(a, &v, gdeg * e)
            };
            let bg = &(&basis.transpose() * lg) * &basis;
            if !bg.det().is_zero() {
                found = Some(basis);
                break;
            }
        }
        let local_basis = found.ok_or_else(|| {
            Error::BudgetExhausted(format!(
                "no nondegenerate {} block for prime {} within {} trials",
                if bicyclic { "bicyclic" } else { "cyclic" },
                component.prime,
                cfg.budget
            ))
        })?;
        let ambient = &current * &local_basis;
        // complement inside the current subspace, in local coordinates
        let comp_local = (&local_basis.transpose() * lg).kernel();
        let next = &current * &comp_local;
        debug_assert!((&(&ambient.transpose() * gram) * &next).is_zero());
        blocks.push((ambient, if bicyclic { BlockKind::Bicyclic } else { BlockKind::Cyclic }, e));
        current = next;
    }
    Ok(blocks)
}

/// Sign-difference `p - q` of the symmetric form `G (ψ - r)`.
fn sweep_signature(g: &Matrix, psi: &Matrix, r: &Rational) -> i64 {
    let k = psi.rows();
    let m = g * &(psi - &Matrix::scalar(k, r));
    let s = signature_of_gram(&m);
    debug_assert_eq!(s.r, 0);
    s.p as i64 - s.q as i64
}

/// Real refinement of a rational block into summands.
fn refine_block(index: usize, block: &Block) -> Result<Vec<Summand>, Error> {
    let e = block.exponent;
    let sig = block.map.space().signature();
    let mp = Some(block.minpoly.to_string());
    let whole = |stype: SummandType| Summand {
        block: index,
        stype,
        dim: sig.dim(),
        signature: (sig.p, sig.q),
        disc: sig.disc(),
        exponent: e,
        minpoly: mp.clone(),
    };
    if let Some(ev) = block.prime.unit_eigenvalue() {
        return Ok(vec![match block.kind {
            BlockKind::Bicyclic => whole(SummandType::T1),
            BlockKind::Cyclic if ev == Sign::Plus => whole(SummandType::T2Minus),
            BlockKind::Cyclic => whole(SummandType::T2Plus),
        }]);
    }
    let two = rat(2);
    let mut out = Vec::new();
    let piece = |stype: SummandType, dim: usize, p: usize, q: usize| Summand {
        block: index,
        stype,
        dim,
        signature: (p, q),
        disc: Sign::pow_minus_one(q),
        exponent: e,
        minpoly: None,
    };
    match &block.prime {
        PrimeKey::SelfReciprocal(g) => {
            let tp = g
                .palindromic_to_trace_form()
                .ok_or_else(|| Error::Internal(format!("{g} is not palindromic")))?;
            let k = tp.deg();
            let all = isolate_real_roots(&tp);
            let inner = isolate_in(&tp, &-two.clone(), &two);
            let outer = all.len() - inner.len();
            let complex = (k - all.len()) / 2;
            if !inner.is_empty() {
                let a = block.map.matrix();
                let psi = a + &block.map.inverse().matrix().clone();
                let gr = block.map.space().gram();
                let mut cuts: Vec<Rational> = vec![-two.clone()];
                for (_, hi) in &inner[..inner.len() - 1] {
                    cuts.push(hi.clone());
                }
                cuts.push(two.clone());
                let sigs: Vec<i64> = cuts.iter().map(|r| sweep_signature(gr, &psi, r)).collect();
                let stype = if e % 2 == 0 { SummandType::T2StarE } else { SummandType::T2StarO };
                for i in 0..inner.len() {
                    let s = (sigs[i] - sigs[i + 1]) / 2;
                    let dim = 2 * e;
                    let q = (dim as i64 - s) / 2;
                    if q < 0 || q as usize > dim {
                        return Err(Error::Internal("signature sweep out of range".into()));
                    }
                    out.push(piece(stype, dim, dim - q as usize, q as usize));
                }
            }
            for _ in 0..outer {
                out.push(piece(SummandType::T3Split, 2 * e, e, e));
            }
            for _ in 0..complex {
                out.push(piece(SummandType::T3NonSplit, 4 * e, 2 * e, 2 * e));
            }
        }
        PrimeKey::Pair(h, _) => {
            let real = isolate_real_roots(h).len();
            for _ in 0..real {
                out.push(piece(SummandType::T3Split, 2 * e, e, e));
            }
            for _ in 0..(h.deg() - real) / 2 {
                out.push(piece(SummandType::T3NonSplit, 4 * e, 2 * e, 2 * e));
            }
        }
    }
    if out.len() == 1 {
        out[0].minpoly = mp;
    }
    let (p, q) = out.iter().fold((0, 0), |(p, q), s| (p + s.p(), q + s.q()));
    if (p, q) != (sig.p, sig.q) {
        return Err(Error::Internal(format!(
            "real summands of block {index} have signature ({p},{q}) but the block has ({},{})",
            sig.p, sig.q
        )));
    }
    Ok(out)
}

/// Full decomposition: components, rational blocks, real summands.
pub fn decompose(phi: &OrthoMap, cfg: SplitConfig) -> Result<Decomposition, Error> {
    let components = primary_components(phi)?;
    let mut blocks = Vec::new();
    for (ci, comp) in components.iter().enumerate() {
        let sub = SplitConfig { seed: cfg.seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(ci as u64 + 1)), ..cfg };
        for (basis, kind, e) in split_indecomposable(phi, comp, sub)? {
            let subspace = Subspace::new(basis)?;
            let map = phi.restrict(&subspace)?;
            let minpoly = map.matrix().minimal_polynomial();
            blocks.push(Block { subspace, map, prime: comp.prime.clone(), exponent: e, kind, minpoly });
        }
    }
    let mut summands = Vec::new();
    for (i, b) in blocks.iter().enumerate() {
        summands.extend(refine_block(i, b)?);
    }
    let d = Decomposition { components, blocks, summands };
    for s in &d.summands {
        summand_invariants(s)?;
    }
    for b in &d.blocks {
        summand_disc_check(b)?;
    }
    Ok(d)
}

/// Checks the type constraints of a summand; any violation signals a
/// decomposition bug.
pub fn summand_invariants(s: &Summand) -> Result<(Signature, Sign), Error> {
    let (p, q) = s.signature;
    let fail = |what: &str| Err(Error::Internal(format!("summand of type {} dim {} ({p},{q}): {what}", s.stype, s.dim)));
    if p + q != s.dim {
        return fail("signature does not add up to the dimension");
    }
    if s.disc != Sign::pow_minus_one(q) {
        return fail("discriminant differs from (-1)^q");
    }
    if (s.dim % 2 == 1) != s.stype.is_t2pm() {
        return fail("odd dimension must coincide with type 2±");
    }
    match s.stype {
        SummandType::T1 => {
            if s.dim % 4 != 0 || p != q {
                return fail("type 1 must be hyperbolic of dimension 0 mod 4");
            }
        }
        SummandType::T2Plus | SummandType::T2Minus => {
            let n = s.dim;
            let t = n / 8;
            let window = match n % 8 {
                1 => [4 * t, 4 * t + 1],
                7 => [4 * t + 3, 4 * t + 4],
                3 => [4 * t + 1, 4 * t + 2],
                _ => [4 * t + 2, 4 * t + 3],
            };
            if !window.contains(&q) || s.exponent != n {
                return fail("negative index outside the admissible window");
            }
        }
        SummandType::T2StarE => {
            if q % 2 != 0 || p != q {
                return fail("type 2e must have p = q even");
            }
        }
        SummandType::T2StarO => {
            if q % 2 != 0 || p.abs_diff(q) != 2 {
                return fail("type 2o must have even q and |p - q| = 2");
            }
        }
        SummandType::T3Split => {
            if p != s.exponent || q != s.exponent {
                return fail("split type 3 must have p = q = t");
            }
        }
        SummandType::T3NonSplit => {
            if p != 2 * s.exponent || q != 2 * s.exponent {
                return fail("nonsplit type 3 must have p = q = 2t");
            }
        }
    }
    Ok((Signature { p, q, r: 0 }, s.disc))
}

/// For an odd cyclic block at `x±1` of dimension at least 3, the
/// discriminant is minus that of the form induced on `Bahn/Fix` of the
/// unipotent part.
fn summand_disc_check(b: &Block) -> Result<(), Error> {
    let Some(ev) = b.prime.unit_eigenvalue() else { return Ok(()) };
    if b.kind != BlockKind::Cyclic || b.map.dim() < 3 {
        return Ok(());
    }
    let u = if ev == Sign::Plus { b.map.clone() } else { b.map.neg() };
    let n = u.dim();
    let bahn = Subspace::span(&(u.matrix() - &Matrix::identity(n)));
    let s = u.space().signature_of(&bahn);
    let quotient_disc = Sign::pow_minus_one(s.q);
    let disc = u.space().disc_sign()?;
    if disc != -quotient_disc {
        return Err(Error::Internal("discriminant of an odd unipotent block violates the Bahn/Fix relation".into()));
    }
    Ok(())
}

/// Invariants consumed by the classifier.
pub fn invariant_data(phi: &OrthoMap, d: &Decomposition) -> Result<InvariantData, Error> {
    let mut n = [0usize; 8];
    for b in &d.blocks {
        if b.prime.unit_eigenvalue().is_some() {
            let copies = if b.kind == BlockKind::Bicyclic { 2 } else { 1 };
            n[b.exponent % 8] += copies;
        }
    }
    let rank_counts = n_counts(phi)?;
    if rank_counts != n {
        return Err(Error::Internal(format!("block counts {n:?} disagree with rank counts {rank_counts:?}")));
    }
    if n[2] % 2 != 0 || n[6] % 2 != 0 {
        return Err(Error::Internal("odd number of elementary divisors of degree 2 or 6 mod 8".into()));
    }
    let sq = phi.compose(phi);
    let (binf, finf) = fitting_split(&sq);
    let bs = phi.space().signature_of(&binf);
    let fs = phi.space().signature_of(&finf);
    Ok(InvariantData { n, binf_signature: (bs.p, bs.q), finf_signature: (fs.p, fs.q), summands: d.summands.clone() })
}

/// Multiset of elementary divisors reassembled from the blocks, for
/// reconstruction checks.
pub fn block_elementary_divisors(d: &Decomposition) -> Result<Vec<(Poly, usize)>, Error> {
    let mut out = Vec::new();
    for b in &d.blocks {
        for (g, mult) in factor_rational_poly(&b.minpoly)? {
            let copies = if b.kind == BlockKind::Bicyclic { 2 } else { 1 };
            for _ in 0..copies {
                out.push((g.clone(), mult));
            }
        }
    }
    out.sort_by(|a, b| a.0.deg().cmp(&b.0.deg()).then_with(|| a.0.coeffs().cmp(b.0.coeffs())).then(a.1.cmp(&b.1)));
    Ok(out)
}

/// Tally of summand types, for reporting.
pub fn type_tally(d: &Decomposition) -> BTreeMap<SummandType, usize> {
    let mut m = BTreeMap::new();
    for s in &d.summands {
        *m.entry(s.stype).or_insert(0) += 1;
    }
    m
}
