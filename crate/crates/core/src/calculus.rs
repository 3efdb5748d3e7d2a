//! (det, Θ) profiles of reversing involutions and centralizers, and the
//! reversibility and bireflectionality verdicts built from them.
//!
//! An element is bireflectional in G exactly when some involution in G
//! reverses it. Every reversing involution decomposes along an orthogonal
//! decomposition into indecomposables, so the achievable (det, Θ) pairs are
//! the setwise product of the per-summand profiles. All reversers form the
//! coset σ·Cent(φ), so reversibility in G is decided by the product of the
//! reverser profile with the centralizer profile.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::Sign;
use crate::decompose::{InvariantData, Summand, SummandType};
use crate::error::Error;
use crate::transform::GroupTag;

/// A subset of {±1} × {±1} of (det, Θ) pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct DetThetaProfile(u8);

fn bit(det: Sign, theta: Sign) -> u8 {
    1 << ((det == Sign::Minus) as u8 * 2 + (theta == Sign::Minus) as u8)
}

const PAIRS: [(Sign, Sign); 4] =
    [(Sign::Plus, Sign::Plus), (Sign::Plus, Sign::Minus), (Sign::Minus, Sign::Plus), (Sign::Minus, Sign::Minus)];

impl DetThetaProfile {
    pub fn empty() -> Self {
        DetThetaProfile(0)
    }

    pub fn full() -> Self {
        DetThetaProfile(0b1111)
    }

    /// The profile of the identity: {(+1,+1)}.
    pub fn unit() -> Self {
        Self::single(Sign::Plus, Sign::Plus)
    }

    pub fn single(det: Sign, theta: Sign) -> Self {
        DetThetaProfile(bit(det, theta))
    }

    pub fn from_pairs(pairs: &[(Sign, Sign)]) -> Self {
        let mut p = Self::empty();
        for &(d, t) in pairs {
            p.insert(d, t);
        }
        p
    }

    pub fn insert(&mut self, det: Sign, theta: Sign) {
        self.0 |= bit(det, theta);
    }

    pub fn contains(&self, det: Sign, theta: Sign) -> bool {
        self.0 & bit(det, theta) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn pairs(&self) -> Vec<(Sign, Sign)> {
        PAIRS.iter().copied().filter(|&(d, t)| self.contains(d, t)).collect()
    }

    /// `{ (d1 d2, t1 t2) }` over all members.
    pub fn product(&self, other: &Self) -> Self {
        let mut out = Self::empty();
        for (d1, t1) in self.pairs() {
            for (d2, t2) in other.pairs() {
                out.insert(d1 * d2, t1 * t2);
            }
        }
        out
    }

    /// Whether some member lies in the group.
    pub fn meets(&self, g: GroupTag) -> bool {
        self.pairs().into_iter().any(|(d, t)| g.admits(d, t))
    }

    pub fn restricted_to(&self, g: GroupTag) -> Self {
        Self::from_pairs(&self.pairs().into_iter().filter(|&(d, t)| g.admits(d, t)).collect::<Vec<_>>())
    }
}

impl fmt::Display for DetThetaProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.pairs().iter().map(|(d, t)| format!("({d},{t})")).collect();
        write!(f, "{{{}}}", items.join(","))
    }
}

impl Serialize for DetThetaProfile {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<[i32; 2]> = self.pairs().iter().map(|(d, t)| [d.value(), t.value()]).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DetThetaProfile {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<[i32; 2]> = Vec::deserialize(d)?;
        let mut p = DetThetaProfile::empty();
        for [a, b] in v {
            match (Sign::from_value(a), Sign::from_value(b)) {
                (Some(x), Some(y)) => p.insert(x, y),
                _ => return Err(serde::de::Error::custom("profile entries must be +1 or -1")),
            }
        }
        Ok(p)
    }
}

/// (det, Θ) pairs of involutions reversing φ on one real indecomposable
/// summand.
pub fn reverser_profile(s: &Summand) -> DetThetaProfile {
    let q = s.q();
    match s.stype {
        SummandType::T1 => DetThetaProfile::single(Sign::Plus, Sign::pow_minus_one(s.dim / 4)),
        SummandType::T2Plus | SummandType::T2Minus => {
            let sgn = if matches!(s.dim % 8, 1 | 7) { Sign::Plus } else { Sign::Minus };
            DetThetaProfile::from_pairs(&[(Sign::Plus, sgn), (Sign::Minus, sgn * Sign::Minus.pow(q))])
        }
        SummandType::T2StarE => DetThetaProfile::single(Sign::Plus, Sign::pow_minus_one(q / 2)),
        SummandType::T2StarO => DetThetaProfile::single(Sign::Minus, Sign::pow_minus_one(q / 2)),
        SummandType::T3Split => {
            let t = s.exponent;
            let det = Sign::pow_minus_one(t);
            if t % 2 == 0 {
                DetThetaProfile::single(det, Sign::pow_minus_one(t / 2))
            } else {
                DetThetaProfile::from_pairs(&[(det, Sign::Plus), (det, Sign::Minus)])
            }
        }
        SummandType::T3NonSplit => DetThetaProfile::single(Sign::Plus, Sign::pow_minus_one(s.exponent)),
    }
}

/// Setwise product of per-summand profiles.
pub fn combine_profiles(profiles: &[DetThetaProfile]) -> DetThetaProfile {
    profiles.iter().fold(DetThetaProfile::unit(), |acc, p| acc.product(p))
}

/// (det, Θ) pairs realized by the centralizer: the group generated by −1
/// on each summand, i.e. by `((-1)^{dim U}, disc U)`. Unipotent parts,
/// type 2* parts and nonsplit type 3 parts of the centralizer lie in Ω; a
/// split type 3 summand contributes the scalings `diag(c, 1/c)` whose pair
/// `(+1, sign(c)^t)` already lies in the generated group.
pub fn centralizer_profile(summands: &[Summand]) -> DetThetaProfile {
    let mut p = DetThetaProfile::unit();
    for s in summands {
        let g = DetThetaProfile::from_pairs(&[(Sign::Plus, Sign::Plus), (Sign::pow_minus_one(s.dim), s.disc)]);
        p = p.product(&g);
    }
    p
}

/// Tags explaining a verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reason {
    Cond1,
    Cond2,
    Cond3,
    SoCriterion,
    ProfileObstruction,
    /// The element itself lies outside the requested group.
    NotInGroup,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub group: GroupTag,
    pub reversible: bool,
    pub bireflectional: bool,
    pub reasons: Vec<Reason>,
}

/// Reverser profile of the whole element.
pub fn element_profile(summands: &[Summand]) -> DetThetaProfile {
    combine_profiles(&summands.iter().map(reverser_profile).collect::<Vec<_>>())
}

pub fn is_reversible_in(summands: &[Summand], g: GroupTag) -> bool {
    element_profile(summands).product(&centralizer_profile(summands)).meets(g)
}

/// Common discriminant of the odd summands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OddDisc {
    None,
    Common(Sign),
    Mixed,
}

pub fn odd_discriminant(summands: &[Summand]) -> OddDisc {
    let mut seen: Option<Sign> = None;
    for s in summands.iter().filter(|s| s.stype.is_t2pm()) {
        match seen {
            None => seen = Some(s.disc),
            Some(d) if d != s.disc => return OddDisc::Mixed,
            _ => {}
        }
    }
    seen.map_or(OddDisc::None, OddDisc::Common)
}

/// An orthogonal summand of even dimension and discriminant −1 exists:
/// a split type 3 summand with t odd, or two odd summands of opposite
/// discriminant.
pub fn cond1(summands: &[Summand]) -> bool {
    summands.iter().any(|s| s.stype == SummandType::T3Split && s.exponent % 2 == 1)
        || odd_discriminant(summands) == OddDisc::Mixed
}

fn congruence_lhs(n: &[usize; 8]) -> usize {
    2 * n[3] + 2 * n[5] + n[2] + n[6]
}

/// `2n_3 + 2n_5 + n_2 + n_6 ≡ q(B∞(φ²)) mod 4`.
pub fn cond2(inv: &InvariantData) -> bool {
    (congruence_lhs(&inv.n) + 4 - inv.binf_signature.1 % 4) % 4 == 0
}

/// `2n_3 + 2n_5 + n_2 + n_6 ≡ p(B∞(φ²)) mod 4`.
pub fn cond3(inv: &InvariantData) -> bool {
    (congruence_lhs(&inv.n) + 4 - inv.binf_signature.0 % 4) % 4 == 0
}

/// The three-condition criterion read literally: SO-bireflectional and
/// one of cond1, cond2, cond3.
pub fn three_conditions_literal(inv: &InvariantData) -> bool {
    so_bireflectional(&inv.summands) && (cond1(&inv.summands) || cond2(inv) || cond3(inv))
}

/// The three-condition criterion with the congruences tied to the common
/// discriminant δ of the odd summands: cond2 applies when δ = +1 (or there
/// are no odd summands), cond3 when δ = −1 (or there are none).
pub fn three_conditions(inv: &InvariantData) -> (bool, Vec<Reason>) {
    let mut reasons = Vec::new();
    if !so_bireflectional(&inv.summands) {
        return (false, reasons);
    }
    let delta = odd_discriminant(&inv.summands);
    if cond1(&inv.summands) {
        reasons.push(Reason::Cond1);
    }
    if matches!(delta, OddDisc::None | OddDisc::Common(Sign::Plus)) && cond2(inv) {
        reasons.push(Reason::Cond2);
    }
    if matches!(delta, OddDisc::None | OddDisc::Common(Sign::Minus)) && cond3(inv) {
        reasons.push(Reason::Cond3);
    }
    (!reasons.is_empty(), reasons)
}

pub fn so_bireflectional(summands: &[Summand]) -> bool {
    element_profile(summands).meets(GroupTag::SO)
}

/// Bireflectionality verdict in `g`, with the reversibility verdict and
/// the Ω consistency checks.
pub fn is_bireflectional_in(inv: &InvariantData, g: GroupTag) -> Result<Verdict, Error> {
    let s = &inv.summands;
    let profile = element_profile(s);
    let reversible = is_reversible_in(s, g);
    let bireflectional = profile.meets(g);
    let mut reasons = Vec::new();
    match g {
        GroupTag::O => {}
        GroupTag::SO => reasons.push(if bireflectional { Reason::SoCriterion } else { Reason::ProfileObstruction }),
        GroupTag::Omega => {
            let (by_conditions, fired) = three_conditions(inv);
            if by_conditions != bireflectional {
                return Err(Error::Internal(format!(
                    "profile verdict {bireflectional} disagrees with the three-condition criterion {by_conditions}"
                )));
            }
            if reversible != bireflectional {
                return Err(Error::Internal(format!(
                    "reversible {reversible} but bireflectional {bireflectional} in Omega"
                )));
            }
            if bireflectional {
                reasons.push(Reason::SoCriterion);
                reasons.extend(fired);
            } else {
                reasons.push(Reason::ProfileObstruction);
            }
        }
    }
    if bireflectional && !reversible {
        return Err(Error::Internal("bireflectional but not reversible".into()));
    }
    Ok(Verdict { group: g, reversible, bireflectional, reasons })
}

/// Whether every element of Ω(p,q) is bireflectional: p, q and p+q are
/// all incongruent to 2 mod 4.
pub fn omega_all_bireflectional(p: usize, q: usize) -> bool {
    p % 4 != 2 && q % 4 != 2 && (p + q) % 4 != 2
}

/// For elements all of whose summands are of type 2±, with a common
/// discriminant δ, the spinor norm of a reversing involution with the
/// given determinant.
pub fn odd_type_theta(inv: &InvariantData, det: Sign) -> Option<Sign> {
    if !inv.summands.iter().all(|s| s.stype.is_t2pm()) {
        return None;
    }
    let base = Sign::pow_minus_one(inv.n[3] + inv.n[5]);
    match odd_discriminant(&inv.summands) {
        OddDisc::Common(Sign::Plus) => Some(base),
        OddDisc::Common(Sign::Minus) => Some(base * det),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summand(stype: SummandType, dim: usize, p: usize, q: usize, exponent: usize) -> Summand {
        Summand { block: 0, stype, dim, signature: (p, q), disc: Sign::pow_minus_one(q), exponent, minpoly: None }
    }

    use Sign::{Minus as M, Plus as P};

    #[test]
    fn summand_profiles() {
        let t2 = summand(SummandType::T2Minus, 3, 2, 1, 3);
        assert_eq!(reverser_profile(&t2), DetThetaProfile::from_pairs(&[(P, M), (M, P)]));
        let t3 = summand(SummandType::T3NonSplit, 4, 2, 2, 1);
        assert_eq!(reverser_profile(&t3), DetThetaProfile::single(P, M));
        let t1 = summand(SummandType::T1, 4, 2, 2, 2);
        assert_eq!(reverser_profile(&t1), DetThetaProfile::single(P, M));
    }

    #[test]
    fn combination_examples() {
        let t3 = reverser_profile(&summand(SummandType::T3NonSplit, 4, 2, 2, 1));
        assert_eq!(combine_profiles(&[t3, t3]), DetThetaProfile::unit());
        let t2 = reverser_profile(&summand(SummandType::T2Minus, 3, 2, 1, 3));
        let t1 = reverser_profile(&summand(SummandType::T1, 4, 2, 2, 2));
        assert_eq!(combine_profiles(&[t2, t1]), DetThetaProfile::from_pairs(&[(P, P), (M, M)]));
        let a = reverser_profile(&summand(SummandType::T2Minus, 1, 1, 0, 1));
        let b = reverser_profile(&summand(SummandType::T2Minus, 1, 0, 1, 1));
        assert_eq!(combine_profiles(&[a, b]), DetThetaProfile::full());
    }

    #[test]
    fn centralizer_examples() {
        let t1 = summand(SummandType::T1, 4, 2, 2, 2);
        assert_eq!(centralizer_profile(&[t1]), DetThetaProfile::unit());
        let lines = vec![
            summand(SummandType::T2Minus, 1, 1, 0, 1),
            summand(SummandType::T2Minus, 1, 1, 0, 1),
            summand(SummandType::T2Minus, 1, 0, 1, 1),
        ];
        assert_eq!(centralizer_profile(&lines), DetThetaProfile::full());
        let odd = summand(SummandType::T2Minus, 3, 2, 1, 3);
        assert_eq!(centralizer_profile(&[odd]), DetThetaProfile::from_pairs(&[(P, P), (M, M)]));
    }

    #[test]
    fn split_type_three_line_is_obstructed() {
        let s = vec![summand(SummandType::T3Split, 2, 1, 1, 1)];
        assert!(!is_reversible_in(&s, GroupTag::SO));
        let inv = InvariantData { n: [0; 8], binf_signature: (1, 1), finf_signature: (0, 0), summands: s };
        let v = is_bireflectional_in(&inv, GroupTag::Omega).unwrap();
        assert!(!v.bireflectional && !v.reversible);
        assert_eq!(v.reasons, vec![Reason::ProfileObstruction]);
    }

    #[test]
    fn nonsplit_rotation_pair_fails_only_in_omega() {
        let s = vec![summand(SummandType::T3NonSplit, 4, 2, 2, 1)];
        let inv = InvariantData { n: [0; 8], binf_signature: (2, 2), finf_signature: (0, 0), summands: s };
        assert!(!cond2(&inv) && !cond3(&inv) && !cond1(&inv.summands));
        assert!(is_bireflectional_in(&inv, GroupTag::SO).unwrap().bireflectional);
        assert!(!is_bireflectional_in(&inv, GroupTag::Omega).unwrap().bireflectional);
    }

    #[test]
    fn omega_all_residues() {
        assert!(omega_all_bireflectional(3, 1));
        assert!(!omega_all_bireflectional(2, 0));
        assert!(!omega_all_bireflectional(3, 3));
        assert!(omega_all_bireflectional(4, 0));
    }
}
