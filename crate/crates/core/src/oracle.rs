//! Generators with known invariants, random Ω elements, and an independent
//! witness search used to cross-check classifier verdicts.

use std::fmt;

use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::matrix::{kernel_in_span, symmetric_basis};
use crate::algebra::{rat, Matrix, Poly, Rational, Sign, Vector};
use crate::bilinear::{QuadSpace, Subspace};
use crate::calculus::{
    element_profile, is_bireflectional_in, three_conditions_literal, DetThetaProfile, Reason, Verdict,
};
use crate::decompose::{decompose, invariant_data, Decomposition, InvariantData, SplitConfig, SummandType};
use crate::error::Error;
use crate::factory::{
    assemble_witness, block_profile, choose_targets, involution_pair, is_reversing_involution, verify_witness,
    witness_from_targets, Witness, WitnessConfig,
};
use crate::transform::{make_reflection, spinor_norm, GroupTag, OrthoMap};

/// One canonical indecomposable block.
#[derive(Clone, Debug, PartialEq)]
pub enum BlockSpec {
    /// Cyclic with minimal polynomial `(x - eigen)^dim`, dim odd. `high`
    /// selects the larger negative index of the two admissible ones.
    Odd { eigen: Sign, dim: usize, high: bool },
    /// Two elementary divisors `(x - eigen)^m`, m even (dimension 2m).
    Paired { eigen: Sign, m: usize },
    /// Minimal polynomial `(x² - y x + 1)^m` with `|y| < 2`.
    Elliptic { trace: Rational, m: usize, high: bool },
    /// Minimal polynomial `(x - λ)^t (x - 1/λ)^t`.
    Split { lambda: Rational, t: usize },
    /// Minimal polynomial `(h h*)^t` with `h = x² + b x + c`, `b² < 4c`,
    /// `c ≠ 1`.
    NonSplit { b: Rational, c: Rational, t: usize },
}

impl BlockSpec {
    pub fn expected(&self) -> (SummandType, usize) {
        match self {
            BlockSpec::Odd { eigen: Sign::Plus, dim, .. } => (SummandType::T2Minus, *dim),
            BlockSpec::Odd { dim, .. } => (SummandType::T2Plus, *dim),
            BlockSpec::Paired { m, .. } => (SummandType::T1, 2 * m),
            BlockSpec::Elliptic { m, .. } if m % 2 == 0 => (SummandType::T2StarE, 2 * m),
            BlockSpec::Elliptic { m, .. } => (SummandType::T2StarO, 2 * m),
            BlockSpec::Split { t, .. } => (SummandType::T3Split, 2 * t),
            BlockSpec::NonSplit { t, .. } => (SummandType::T3NonSplit, 4 * t),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |m: &str| Err(Error::Precondition(format!("infeasible block: {m}")));
        match self {
            BlockSpec::Odd { dim, .. } if dim % 2 == 0 => bad("odd block with even dimension"),
            BlockSpec::Paired { m, .. } if m % 2 != 0 || *m == 0 => bad("paired divisors need an even positive degree"),
            BlockSpec::Elliptic { trace, m, .. } if *m == 0 || trace.clone() * trace >= rat(4) => {
                bad("elliptic block needs |trace| < 2 and m > 0")
            }
            BlockSpec::Split { lambda, t } if *t == 0 || lambda.is_zero() || lambda.clone() * lambda == rat(1) => {
                bad("split block needs λ ≠ 0, ±1")
            }
            BlockSpec::NonSplit { b, c, t } if *t == 0 || *c == rat(1) || b.clone() * b >= rat(4) * c => {
                bad("nonsplit block needs b² < 4c and c ≠ 1")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct GenSpec {
    pub blocks: Vec<BlockSpec>,
    pub seed: u64,
}

impl GenSpec {
    /// Sorted `(type, dim)` multiset the decomposition must reproduce.
    pub fn expected_shape(&self) -> Vec<(SummandType, usize)> {
        let mut v: Vec<_> = self.blocks.iter().map(BlockSpec::expected).collect();
        v.sort();
        v
    }

    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|b| b.expected().1).sum()
    }
}

/// A random feasible block list of total dimension at most `max_dim`.
pub fn random_spec(rng: &mut ChaCha8Rng, max_dim: usize) -> GenSpec {
    let mut blocks = Vec::new();
    let mut room = max_dim;
    while room > 0 {
        let eigen = if rng.gen_bool(0.5) { Sign::Plus } else { Sign::Minus };
        let high = rng.gen_bool(0.5);
        let small = |rng: &mut ChaCha8Rng| Rational::new(rng.gen_range(-3..=3i64).into(), rng.gen_range(1..=2i64).into());
        let b = match rng.gen_range(0..5) {
            0 => {
                let dim = 2 * rng.gen_range(0..=(room - 1) / 2) + 1;
                BlockSpec::Odd { eigen, dim, high }
            }
            1 if room >= 4 => BlockSpec::Paired { eigen, m: 2 * rng.gen_range(1..=room / 4) },
            2 if room >= 2 => {
                let trace = Rational::new(rng.gen_range(-3..=3i64).into(), 2.into());
                BlockSpec::Elliptic { trace, m: rng.gen_range(1..=room / 2), high }
            }
            3 if room >= 2 => {
                let mut lambda = small(rng);
                while lambda.is_zero() || lambda.clone() * &lambda == rat(1) {
                    lambda = small(rng);
                }
                BlockSpec::Split { lambda, t: rng.gen_range(1..=room / 2) }
            }
            4 if room >= 4 => {
                let c = [rat(2), rat(3), Rational::new(1.into(), 2.into())][rng.gen_range(0..3)].clone();
                BlockSpec::NonSplit { b: rat(rng.gen_range(-1..=1)), c, t: rng.gen_range(1..=room / 4) }
            }
            _ => continue,
        };
        room -= b.expected().1;
        blocks.push(b);
        if rng.gen_bool(0.3) {
            break;
        }
    }
    GenSpec { blocks, seed: rng.gen() }
}

/// Sorted `(type, dim)` multiset of a decomposition.
pub fn type_dims(d: &Decomposition) -> Vec<(SummandType, usize)> {
    let mut v: Vec<_> = d.summands.iter().map(|s| (s.stype, s.dim)).collect();
    v.sort();
    v
}

/// Companion matrix of a monic polynomial: `e_i ↦ e_{i+1}`.
pub fn companion(f: &Poly) -> Matrix {
    let k = f.deg();
    let mut m = Matrix::zeros(k, k);
    for i in 1..k {
        m[(i, i - 1)] = Rational::one();
    }
    for i in 0..k {
        m[(i, k - 1)] = -f.coeff(i);
    }
    m
}

/// A random nonsingular symmetric form invariant under `m`.
fn invariant_gram(m: &Matrix, rng: &mut ChaCha8Rng) -> Result<Matrix, Error> {
    let k = m.rows();
    let sols = kernel_in_span(&symmetric_basis(k), |g| &(&(&m.transpose() * g) * m) - g);
    for trial in 0..200 {
        let h = 1 + trial / 20;
        let mut g = Matrix::zeros(k, k);
        for s in &sols {
            g = &g + &s.scale(&rat(rng.gen_range(-h..=h)));
        }
        if !g.det().is_zero() {
            return Ok(g);
        }
    }
    Err(Error::BudgetExhausted("no nonsingular invariant form".into()))
}

fn split_pair(a: &Matrix) -> OrthoMap {
    let k = a.rows();
    let ait = a.inverse().expect("invertible").transpose();
    let space = QuadSpace::hyperbolic(k);
    OrthoMap::new(space, a.direct_sum(&ait)).expect("diag(A, A^-T) preserves the split form")
}

fn linear(root: &Rational) -> Poly {
    Poly::linear(root)
}

fn canonical_block(b: &BlockSpec, rng: &mut ChaCha8Rng) -> Result<OrthoMap, Error> {
    b.validate()?;
    let cyclic_with_form = |f: Poly, high: bool, rng: &mut ChaCha8Rng| -> Result<OrthoMap, Error> {
        let c = companion(&f);
        let g = invariant_gram(&c, rng)?;
        let s = crate::bilinear::signature_of_gram(&g);
        let g = if (s.q > s.p) == high { g } else { -&g };
        OrthoMap::new(QuadSpace::nondegenerate(g)?, c)
    };
    match b {
        BlockSpec::Odd { eigen, dim, high } => cyclic_with_form(linear(&eigen.to_rational()).pow(*dim), *high, rng),
        BlockSpec::Elliptic { trace, m, high } => {
            let g = Poly::new(vec![rat(1), -trace.clone(), rat(1)]);
            cyclic_with_form(g.pow(*m), *high, rng)
        }
        BlockSpec::Paired { eigen, m } => Ok(split_pair(&companion(&linear(&eigen.to_rational()).pow(*m)))),
        BlockSpec::Split { lambda, t } => Ok(split_pair(&companion(&linear(lambda).pow(*t)))),
        BlockSpec::NonSplit { b, c, t } => {
            let h = Poly::new(vec![c.clone(), b.clone(), rat(1)]);
            Ok(split_pair(&companion(&h.pow(*t))))
        }
    }
}

/// A random matrix of determinant 1 with small integer entries.
pub fn random_unimodular(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut l = Matrix::identity(n);
    let mut u = Matrix::identity(n);
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] = rat(rng.gen_range(-1..=1));
            u[(j, i)] = rat(rng.gen_range(-1..=1));
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut p = Matrix::zeros(n, n);
    for (i, &j) in perm.iter().enumerate() {
        p[(i, j)] = Rational::one();
    }
    &(&l * &u) * &p
}

/// Orthogonal sum of canonical blocks, written in a random basis.
pub fn gen_canonical_element(spec: &GenSpec) -> Result<OrthoMap, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut acc: Option<OrthoMap> = None;
    for b in &spec.blocks {
        let m = canonical_block(b, &mut rng)?;
        acc = Some(match acc {
            None => m,
            Some(a) => a.direct_sum(&m),
        });
    }
    let phi = acc.ok_or_else(|| Error::Precondition("empty generator spec".into()))?;
    let p = random_unimodular(phi.dim(), &mut rng);
    phi.conjugate_basis(&p)
}

fn random_vector(rng: &mut ChaCha8Rng, n: usize, h: i64) -> Vector {
    (0..n).map(|_| rat(rng.gen_range(-h..=h))).collect()
}

/// A random anisotropic vector, optionally of a prescribed sign.
pub fn random_anisotropic(space: &QuadSpace, rng: &mut ChaCha8Rng, sign: Option<Sign>) -> Vector {
    loop {
        let v = random_vector(rng, space.dim(), 3);
        if let Some(s) = Sign::of(&space.form(&v, &v)) {
            if sign.is_none_or(|want| want == s) {
                return v;
            }
        }
    }
}

/// Product of `k` random reflections, with the signs of the reflection
/// vectors returned alongside.
pub fn random_reflection_product(space: &QuadSpace, rng: &mut ChaCha8Rng, k: usize) -> (OrthoMap, Vec<Sign>) {
    let mut m = OrthoMap::identity(space);
    let mut signs = Vec::with_capacity(k);
    for _ in 0..k {
        let v = random_anisotropic(space, rng, None);
        signs.push(Sign::of(&space.form(&v, &v)).unwrap());
        m = m.compose(&make_reflection(space, &v).expect("anisotropic"));
    }
    (m, signs)
}

/// Number of reflections used for random Ω elements.
pub fn omega_reflection_count(dim: usize) -> usize {
    (dim + dim % 2).max(4)
}

/// A product of an even number of random anisotropic reflections whose
/// signs multiply to +1.
pub fn gen_random_omega(space: &QuadSpace, seed: u64) -> Result<OrthoMap, Error> {
    if space.dim() < 2 {
        return Err(Error::Precondition("random Omega elements need dimension at least 2".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = omega_reflection_count(space.dim());
    let (m, signs) = random_reflection_product(space, &mut rng, k - 1);
    let need = signs.iter().fold(Sign::Plus, |a, &s| a * s);
    let v = random_anisotropic(space, &mut rng, Some(need));
    let phi = m.compose(&make_reflection(space, &v)?);
    debug_assert_eq!(crate::transform::group_membership(&phi, seed), GroupTag::Omega);
    Ok(phi)
}

/// `−1` on a nondegenerate subspace, as an ambient matrix.
pub fn negation_on(space: &QuadSpace, s: &Subspace) -> Result<Matrix, Error> {
    let p = space.projector(s)?;
    Ok(&Matrix::identity(space.dim()) - &p.scale(&rat(2)))
}

/// A random involution: −1 on a random nondegenerate subspace.
pub fn random_involution(space: &QuadSpace, rng: &mut ChaCha8Rng) -> OrthoMap {
    let n = space.dim();
    loop {
        let k = rng.gen_range(0..=n);
        let cols: Vec<Vector> = (0..k).map(|_| random_vector(rng, n, 2)).collect();
        let s = Subspace::span(&Matrix::from_columns(n, &cols));
        if let Ok(m) = negation_on(space, &s) {
            return OrthoMap::new(space.clone(), m).expect("reflection through a nondegenerate subspace");
        }
    }
}

/// `γ(φ) γ(φ⁻¹)⁻¹` for a random monic γ, when invertible. The roots of γ
/// are spread log-uniformly so that sign changes of γ can separate
/// eigenvalues of very different magnitudes.
fn norm_one_multiplier(phi: &OrthoMap, rng: &mut ChaCha8Rng, scale: i32) -> Option<Matrix> {
    let deg = rng.gen_range(1..=phi.dim().clamp(1, 3));
    let mut gamma = Poly::one();
    for _ in 0..deg {
        let k = rng.gen_range(-scale..=scale);
        let mut r = Rational::new(rng.gen_range(1..=3i64).into(), rng.gen_range(1..=3i64).into());
        r *= Rational::from_integer(2.into()).pow(k);
        if rng.gen_bool(0.5) {
            r = -r;
        }
        gamma = &gamma * &Poly::linear(&r);
    }
    let a = gamma.eval_matrix(phi.matrix());
    let b = gamma.eval_matrix(phi.inverse().matrix()).inverse()?;
    if a.det().is_zero() {
        return None;
    }
    Some(&a * &b)
}

/// Commuting moves used by the search and the centralizer sampler: −1 on
/// each block and each primary component of two independently seeded
/// decompositions.
fn flip_moves(phi: &OrthoMap, decs: &[&Decomposition]) -> Vec<Matrix> {
    let mut out = Vec::new();
    for d in decs {
        for b in &d.blocks {
            if let Ok(m) = negation_on(phi.space(), &b.subspace) {
                out.push(m);
            }
        }
        for c in &d.components {
            if let Ok(m) = negation_on(phi.space(), &c.subspace) {
                out.push(m);
            }
        }
    }
    out
}

/// Basis of the skew-adjoint matrices commuting with φ.
fn commuting_skew_basis(phi: &OrthoMap) -> Vec<Matrix> {
    let n = phi.dim();
    let g = phi.space().gram();
    let m = phi.matrix();
    let mut basis = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut e = Matrix::zeros(n, n);
            e[(i, j)] = Rational::one();
            basis.push(e);
        }
    }
    kernel_in_span(&basis, |x| {
        let c = &(x * m) - &(m * x);
        let s = &(g * x) + &(&x.transpose() * g);
        c.hstack(&s)
    })
}

/// Random elements of the centralizer of φ in O(V): products of Cayley
/// transforms of commuting skew-adjoint maps, blockwise negations and
/// norm-one multipliers.
pub struct CentralizerSampler {
    phi: OrthoMap,
    skew: Vec<Matrix>,
    flips: Vec<Matrix>,
    rng: ChaCha8Rng,
}

impl CentralizerSampler {
    pub fn new(phi: &OrthoMap, seed: u64) -> Result<Self, Error> {
        let d1 = decompose(phi, SplitConfig { seed, ..SplitConfig::default() })?;
        let d2 = decompose(phi, SplitConfig { seed: seed ^ 0xa5a5, ..SplitConfig::default() })?;
        Ok(CentralizerSampler {
            phi: phi.clone(),
            skew: commuting_skew_basis(phi),
            flips: flip_moves(phi, &[&d1, &d2]),
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn sample(&mut self) -> OrthoMap {
        let n = self.phi.dim();
        let mut acc = Matrix::identity(n);
        if !self.skew.is_empty() {
            loop {
                let mut x = Matrix::zeros(n, n);
                for b in &self.skew {
                    x = &x + &b.scale(&Rational::new(self.rng.gen_range(-3..=3).into(), 4.into()));
                }
                let i = Matrix::identity(n);
                if let Some(inv) = (&i - &x).inverse() {
                    acc = &inv * &(&i + &x);
                    break;
                }
            }
        }
        for f in &self.flips {
            if self.rng.gen_bool(0.5) {
                acc = &acc * f;
            }
        }
        if self.rng.gen_bool(0.5) {
            if let Some(b) = norm_one_multiplier(&self.phi, &mut self.rng, 4) {
                acc = &acc * &b;
            }
        }
        OrthoMap::new(self.phi.space().clone(), acc).expect("products of isometries are isometries")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Outcome {
    AgreePositive,
    AgreeNegativeUnfalsified,
    Conflict,
    Inconclusive,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::AgreePositive => "AGREE_POSITIVE",
            Outcome::AgreeNegativeUnfalsified => "AGREE_NEGATIVE_UNFALSIFIED",
            Outcome::Conflict => "CONFLICT",
            Outcome::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug)]
pub struct CrossReport {
    pub outcome: Outcome,
    pub verdict: Verdict,
    pub profile: DetThetaProfile,
    /// (det, Θ) of every distinct reversing involution met by the search.
    pub found: DetThetaProfile,
    /// Reversing involutions found outside the computed profile.
    pub profile_violations: usize,
    pub witness: Option<Witness>,
    /// Targets the classifier would use, reported when the search fails.
    pub targets: Option<Vec<(Sign, Sign)>>,
    pub seed: u64,
}

/// Searches the reverser coset from a factory-built involution whose
/// (det, Θ) is deliberately chosen outside `g` when possible, moving by
/// centralizer elements; every candidate is verified exactly.
pub fn search_witness(
    phi: &OrthoMap,
    d: &Decomposition,
    g: GroupTag,
    budget: usize,
    seed: u64,
) -> (Option<Witness>, DetThetaProfile, usize) {
    let mut found = DetThetaProfile::empty();
    let mut violations = 0;
    let profile = element_profile(&d.summands);
    let profiles: Vec<_> = (0..d.blocks.len()).map(|i| block_profile(d, i)).collect();
    let start_targets = choose_targets(&profiles, |det, theta| !g.admits(det, theta))
        .or_else(|| choose_targets(&profiles, |_, _| true));
    let Some(start_targets) = start_targets else { return (None, found, 0) };
    let cfg = WitnessConfig { seed, budget: 500 };
    let Ok(start) = witness_from_targets(phi, d, GroupTag::O, &start_targets, cfg) else {
        return (None, found, 0);
    };
    let sigma0 = start.sigma.matrix().clone();
    let alt = decompose(phi, SplitConfig { seed: seed ^ 0x5bd1_e995, ..SplitConfig::default() });
    let mut decs = vec![d];
    if let Ok(a) = &alt {
        decs.push(a);
    }
    let flips = flip_moves(phi, &decs);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..budget {
        let mut c = Matrix::identity(phi.dim());
        if trial > 0 {
            for f in &flips {
                if rng.gen_bool(0.5) {
                    c = &c * f;
                }
            }
            if rng.gen_bool(0.5) {
                if let Some(b) = norm_one_multiplier(phi, &mut rng, 2 + (trial / 4).min(14) as i32) {
                    c = &c * &b;
                }
            }
        }
        let cand = &c * &sigma0;
        if !is_reversing_involution(phi, &cand) {
            continue;
        }
        let (det, theta) = involution_pair(phi.space(), &cand);
        found.insert(det, theta);
        if !profile.contains(det, theta) {
            violations += 1;
        }
        if g.admits(det, theta) {
            let tau = &cand * phi.matrix();
            let w = Witness {
                sigma: OrthoMap::new(phi.space().clone(), cand).expect("checked isometry"),
                tau: match OrthoMap::new(phi.space().clone(), tau) {
                    Ok(t) => t,
                    Err(_) => continue,
                },
                target_group: g,
            };
            if verify_witness(&w, phi).is_ok() {
                return (Some(w), found, violations);
            }
        }
    }
    (None, found, violations)
}

/// Classifier verdict against the budgeted search.
pub fn cross_validate(phi: &OrthoMap, g: GroupTag, budget: usize, seed: u64) -> Result<CrossReport, Error> {
    let d = decompose(phi, SplitConfig { seed, ..SplitConfig::default() })?;
    let inv = invariant_data(phi, &d)?;
    cross_validate_with(phi, &d, &inv, g, budget, seed)
}

/// [`cross_validate`] on an existing decomposition.
pub fn cross_validate_with(
    phi: &OrthoMap,
    d: &Decomposition,
    inv: &InvariantData,
    g: GroupTag,
    budget: usize,
    seed: u64,
) -> Result<CrossReport, Error> {
    let member = g.admits(phi.det(), spinor_norm(phi, seed));
    let verdict = if member {
        is_bireflectional_in(inv, g)?
    } else {
        Verdict { group: g, reversible: false, bireflectional: false, reasons: vec![Reason::NotInGroup] }
    };
    let profile = element_profile(&d.summands);
    let (witness, found, profile_violations) =
        if member { search_witness(phi, d, g, budget, seed) } else { (None, DetThetaProfile::empty(), 0) };
    let outcome = match (verdict.bireflectional, witness.is_some()) {
        _ if profile_violations > 0 => Outcome::Conflict,
        (true, true) => Outcome::AgreePositive,
        (true, false) => Outcome::Inconclusive,
        (false, false) => Outcome::AgreeNegativeUnfalsified,
        (false, true) => Outcome::Conflict,
    };
    let targets = if outcome == Outcome::Inconclusive {
        let profiles: Vec<_> = (0..d.blocks.len()).map(|i| block_profile(d, i)).collect();
        choose_targets(&profiles, |det, theta| g.admits(det, theta))
    } else {
        None
    };
    Ok(CrossReport { outcome, verdict, profile, found, profile_violations, witness, targets, seed })
}

/// Per-signature corpus statistics.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SignatureRow {
    pub p: usize,
    pub q: usize,
    pub predicted_all: bool,
    pub total: usize,
    pub bireflectional: usize,
    pub not_bireflectional: usize,
    pub witnesses_verified: usize,
    pub agree_positive: usize,
    pub agree_negative: usize,
    pub conflicts: usize,
    pub inconclusive: usize,
    pub reversible_mismatch: usize,
    pub literal_condition_mismatch: usize,
    pub profile_violations: usize,
    pub errors: usize,
    pub inconclusive_seeds: Vec<u64>,
    pub error_messages: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub min_dim: usize,
    pub max_dim: usize,
    pub per_signature: usize,
    pub seed: u64,
    pub budget: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { min_dim: 2, max_dim: 6, per_signature: 100, seed: 2024, budget: 64 }
    }
}

#[derive(Debug)]
struct ItemResult {
    bireflectional: bool,
    witness_ok: bool,
    outcome: Outcome,
    reversible_mismatch: bool,
    literal_mismatch: bool,
    violations: usize,
    seed: u64,
}

fn corpus_item(space: &QuadSpace, seed: u64, budget: usize) -> Result<ItemResult, Error> {
    let phi = gen_random_omega(space, seed)?;
    let d = decompose(&phi, SplitConfig { seed, ..SplitConfig::default() })?;
    let inv = invariant_data(&phi, &d)?;
    let report = cross_validate_with(&phi, &d, &inv, GroupTag::Omega, budget, seed)?;
    let b = report.verdict.bireflectional;
    let witness_ok = if b {
        let w = assemble_witness(&phi, &d, GroupTag::Omega, WitnessConfig { seed, ..WitnessConfig::default() })?;
        verify_witness(&w, &phi).is_ok()
    } else {
        false
    };
    Ok(ItemResult {
        bireflectional: b,
        witness_ok,
        outcome: report.outcome,
        reversible_mismatch: report.verdict.reversible != b,
        literal_mismatch: three_conditions_literal(&inv) != b,
        violations: report.profile_violations,
        seed,
    })
}

pub fn item_seed(master: u64, p: usize, q: usize, i: usize) -> u64 {
    master ^ ((p as u64) << 48) ^ ((q as u64) << 40) ^ (i as u64).wrapping_mul(0x9e37_79b9)
}

/// All signatures with `min_dim ≤ p+q ≤ max_dim`.
pub fn corpus_signatures(cfg: &CorpusConfig) -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for n in cfg.min_dim..=cfg.max_dim {
        for p in (0..=n).rev() {
            v.push((p, n - p));
        }
    }
    v
}

pub fn run_corpus(cfg: &CorpusConfig) -> Vec<SignatureRow> {
    corpus_signatures(cfg)
        .into_par_iter()
        .map(|(p, q)| {
            let space = QuadSpace::standard(p, q);
            let results: Vec<Result<ItemResult, Error>> = (0..cfg.per_signature)
                .into_par_iter()
                .map(|i| corpus_item(&space, item_seed(cfg.seed, p, q, i), cfg.budget))
                .collect();
            let mut row = SignatureRow {
                p,
                q,
                predicted_all: crate::calculus::omega_all_bireflectional(p, q),
                total: results.len(),
                ..SignatureRow::default()
            };
            for r in results {
                match r {
                    Ok(it) => {
                        if it.bireflectional {
                            row.bireflectional += 1;
                        } else {
                            row.not_bireflectional += 1;
                        }
                        row.witnesses_verified += it.witness_ok as usize;
                        row.reversible_mismatch += it.reversible_mismatch as usize;
                        row.literal_condition_mismatch += it.literal_mismatch as usize;
                        row.profile_violations += it.violations;
                        match it.outcome {
                            Outcome::AgreePositive => row.agree_positive += 1,
                            Outcome::AgreeNegativeUnfalsified => row.agree_negative += 1,
                            Outcome::Conflict => row.conflicts += 1,
                            Outcome::Inconclusive => {
                                row.inconclusive += 1;
                                row.inconclusive_seeds.push(it.seed);
                            }
                        }
                    }
                    Err(e) => {
                        row.errors += 1;
                        row.error_messages.push(e.to_string());
                    }
                }
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::group_membership;

    fn one(b: BlockSpec) -> OrthoMap {
        gen_canonical_element(&GenSpec { blocks: vec![b], seed: 3 }).unwrap()
    }

    #[test]
    fn unipotent_dim_three_disc_minus() {
        let phi = one(BlockSpec::Odd { eigen: Sign::Plus, dim: 3, high: false });
        let sig = phi.space().signature();
        assert_eq!((sig.p, sig.q), (2, 1));
        let n = &(phi.matrix() - &Matrix::identity(3)).pow(2);
        assert!(!n.is_zero() && (phi.matrix() - &Matrix::identity(3)).pow(3).is_zero());
    }

    #[test]
    fn split_block_shape() {
        let phi = one(BlockSpec::Split { lambda: rat(2), t: 1 });
        assert_eq!(phi.matrix().charpoly(), Poly::from_ints(&[2, -5, 2]).monic());
        assert!(phi.space().is_hyperbolic());
    }

    #[test]
    fn paired_minus_is_hyperbolic_t1() {
        let spec = GenSpec { blocks: vec![BlockSpec::Paired { eigen: Sign::Minus, m: 2 }], seed: 9 };
        let phi = gen_canonical_element(&spec).unwrap();
        assert!(phi.space().is_hyperbolic());
        let d = decompose(&phi, SplitConfig::default()).unwrap();
        assert_eq!(type_dims(&d), spec.expected_shape());
    }

    #[test]
    fn infeasible_specs_rejected() {
        let bad = [
            BlockSpec::Odd { eigen: Sign::Plus, dim: 2, high: true },
            BlockSpec::Paired { eigen: Sign::Plus, m: 3 },
            BlockSpec::Elliptic { trace: rat(2), m: 1, high: true },
            BlockSpec::Split { lambda: rat(-1), t: 1 },
            BlockSpec::NonSplit { b: rat(0), c: rat(1), t: 1 },
        ];
        for b in bad {
            assert!(matches!(gen_canonical_element(&GenSpec { blocks: vec![b], seed: 0 }), Err(Error::Precondition(_))));
        }
    }

    #[test]
    fn random_omega_membership_and_determinism() {
        for (p, q) in [(3, 0), (1, 1), (2, 2)] {
            let space = QuadSpace::standard(p, q);
            let a = gen_random_omega(&space, 11).unwrap();
            assert_eq!(a, gen_random_omega(&space, 11).unwrap());
            assert_eq!(group_membership(&a, 1), GroupTag::Omega);
        }
    }

    #[test]
    fn identity_agrees_positive() {
        let phi = OrthoMap::identity(&QuadSpace::standard(2, 1));
        assert_eq!(cross_validate(&phi, GroupTag::Omega, 64, 1).unwrap().outcome, Outcome::AgreePositive);
    }

    #[test]
    fn nonsplit_in_omega_unfalsified() {
        let phi = one(BlockSpec::NonSplit { b: rat(1), c: rat(2), t: 1 });
        assert_eq!(group_membership(&phi, 0), GroupTag::Omega);
        let r = cross_validate(&phi, GroupTag::Omega, 32, 5).unwrap();
        assert_eq!(r.outcome, Outcome::AgreeNegativeUnfalsified);
        assert!(r.found.pairs().iter().all(|&(_, t)| t == Sign::Minus));
    }

    #[test]
    fn centralizer_samples_commute() {
        let phi = one(BlockSpec::Split { lambda: rat(3), t: 2 });
        let mut s = CentralizerSampler::new(&phi, 2).unwrap();
        for _ in 0..5 {
            let c = s.sample();
            assert_eq!(c.matrix() * phi.matrix(), phi.matrix() * c.matrix());
        }
    }

    #[test]
    fn random_specs_are_feasible() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let spec = random_spec(&mut rng, 10);
            assert!(spec.dim() <= 10 && spec.dim() > 0);
            assert!(spec.blocks.iter().all(|b| b.validate().is_ok()));
        }
    }
}
