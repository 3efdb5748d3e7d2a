//! Interchange documents and command logic behind the binary.
//!
//! Rationals travel as strings (`"p/q"` or an integer), so documents are
//! bit-exact across platforms.

use serde::{Deserialize, Serialize};

use crate::algebra::{format_rational, parse_rational, Matrix};
use crate::bilinear::QuadSpace;
use crate::calculus::{element_profile, is_bireflectional_in, DetThetaProfile, Reason};
use crate::decompose::{decompose, invariant_data, SplitConfig, Summand};
use crate::error::Error;
use crate::factory::{assemble_witness, verify_witness, Witness, WitnessConfig};
use crate::oracle::{run_corpus, CorpusConfig, SignatureRow};
use crate::transform::{group_membership, spinor_norm, GroupTag, OrthoMap};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_NOT_BIREFLECTIONAL: i32 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementDocument {
    pub gram: Vec<Vec<String>>,
    pub matrix: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

pub fn matrix_to_strings(m: &Matrix) -> Vec<Vec<String>> {
    m.to_rows().iter().map(|r| r.iter().map(format_rational).collect()).collect()
}

pub fn matrix_from_strings(rows: &[Vec<String>], what: &str) -> Result<Matrix, Error> {
    let n = rows.len();
    let mut out = Vec::with_capacity(n);
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(Error::Shape(format!("{what} row {i} has {} entries, expected {n}", r.len())));
        }
        out.push(r.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>()?);
    }
    if n == 0 {
        return Err(Error::Shape(format!("{what} is empty")));
    }
    Ok(Matrix::from_rows(out))
}

impl ElementDocument {
    pub fn from_map(phi: &OrthoMap, label: Option<String>) -> Self {
        ElementDocument { gram: matrix_to_strings(phi.space().gram()), matrix: matrix_to_strings(phi.matrix()), label }
    }

    pub fn parse(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("element document: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents serialize")
    }

    /// Validates and loads: square, equal dimensions, symmetric
    /// nonsingular gram, orthogonal matrix.
    pub fn load(&self) -> Result<OrthoMap, Error> {
        let g = matrix_from_strings(&self.gram, "gram")?;
        let m = matrix_from_strings(&self.matrix, "matrix")?;
        if g.rows() != m.rows() {
            return Err(Error::Shape(format!("gram is {0}x{0} but matrix is {1}x{1}", g.rows(), m.rows())));
        }
        OrthoMap::new(QuadSpace::nondegenerate(g)?, m)
    }

    /// The same document with every rational in lowest terms.
    pub fn normalized(&self) -> Result<Self, Error> {
        let norm = |rows: &Vec<Vec<String>>| -> Result<Vec<Vec<String>>, Error> {
            rows.iter().map(|r| r.iter().map(|s| parse_rational(s).map(|x| format_rational(&x))).collect()).collect()
        };
        Ok(ElementDocument { gram: norm(&self.gram)?, matrix: norm(&self.matrix)?, label: self.label.clone() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupVerdict {
    pub group: GroupTag,
    pub member: bool,
    pub reversible: bool,
    pub bireflectional: bool,
    pub reasons: Vec<Reason>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessChecks {
    pub sigma_squared_identity: bool,
    pub tau_squared_identity: bool,
    pub product_equals_element: bool,
    pub sigma_in_group: bool,
    pub tau_in_group: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDocument {
    pub group: GroupTag,
    pub sigma: Vec<Vec<String>>,
    pub tau: Vec<Vec<String>>,
    pub checks: WitnessChecks,
}

impl WitnessDocument {
    pub fn new(w: &Witness, phi: &OrthoMap) -> Self {
        let g = w.target_group;
        let inside = |m: &OrthoMap| g.admits(m.det(), spinor_norm(m, 0));
        WitnessDocument {
            group: g,
            sigma: matrix_to_strings(w.sigma.matrix()),
            tau: matrix_to_strings(w.tau.matrix()),
            checks: WitnessChecks {
                sigma_squared_identity: w.sigma.is_involution(),
                tau_squared_identity: w.tau.is_involution(),
                product_equals_element: &(w.sigma.matrix() * w.tau.matrix()) == phi.matrix(),
                sigma_in_group: inside(&w.sigma),
                tau_in_group: inside(&w.tau),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Verified,
    NotBireflectional,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportDocument {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub status: Status,
    pub requested_group: GroupTag,
    /// Smallest of O, SO, Omega containing the element.
    pub membership: GroupTag,
    pub det: i32,
    pub theta: i32,
    pub signature: (usize, usize),
    pub n_counts: [usize; 8],
    pub binf_signature: (usize, usize),
    pub summands: Vec<Summand>,
    pub reverser_profile: DetThetaProfile,
    pub verdicts: Vec<GroupVerdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl ReportDocument {
    pub fn verdict(&self, g: GroupTag) -> Option<&GroupVerdict> {
        self.verdicts.iter().find(|v| v.group == g)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(l) = &self.label {
            s.push_str(&format!("label: {l}\n"));
        }
        s.push_str(&format!("status: {}\n", serde_json::to_value(self.status).unwrap().as_str().unwrap()));
        s.push_str(&format!(
            "membership: {}  det: {:+}  theta: {:+}  signature: {:?}\n",
            self.membership, self.det, self.theta, self.signature
        ));
        s.push_str(&format!("n: {:?}  B_inf signature: {:?}\n", self.n_counts, self.binf_signature));
        for x in &self.summands {
            s.push_str(&format!(
                "  summand {:<9} dim {:>2} sig {:?} disc {} minpoly {}\n",
                x.stype.name(),
                x.dim,
                x.signature,
                x.disc,
                x.minpoly.as_deref().unwrap_or("-")
            ));
        }
        s.push_str(&format!("reverser profile: {}\n", self.reverser_profile));
        for v in &self.verdicts {
            let reasons: Vec<String> =
                v.reasons.iter().map(|r| serde_json::to_value(r).unwrap().as_str().unwrap().to_string()).collect();
            s.push_str(&format!(
                "  {:<5} member {:<5} reversible {:<5} bireflectional {:<5} {}\n",
                v.group.to_string(),
                v.member,
                v.reversible,
                v.bireflectional,
                reasons.join(",")
            ));
        }
        if let Some(w) = &self.witness {
            s.push_str(&format!("witness in {}: {:?}\n", w.group, w.checks));
            s.push_str(&format!("  sigma = {:?}\n  tau   = {:?}\n", w.sigma, w.tau));
        }
        if let Some(m) = &self.message {
            s.push_str(&format!("{m}\n"));
        }
        s
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub group: GroupTag,
    pub seed: u64,
    pub budget: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options { group: GroupTag::Omega, seed: 0x5eed, budget: 500 }
    }
}

fn base_report(phi: &OrthoMap, label: Option<String>, opts: Options) -> Result<ReportDocument, Error> {
    let d = decompose(phi, SplitConfig { seed: opts.seed, ..SplitConfig::default() })?;
    let inv = invariant_data(phi, &d)?;
    let theta = spinor_norm(phi, opts.seed);
    let mut verdicts = Vec::new();
    for g in GroupTag::ALL {
        let member = g.admits(phi.det(), theta);
        let v = if member {
            let v = is_bireflectional_in(&inv, g)?;
            GroupVerdict { group: g, member, reversible: v.reversible, bireflectional: v.bireflectional, reasons: v.reasons }
        } else {
            GroupVerdict { group: g, member, reversible: false, bireflectional: false, reasons: vec![Reason::NotInGroup] }
        };
        verdicts.push(v);
    }
    let sig = phi.space().signature();
    Ok(ReportDocument {
        label,
        status: Status::Ok,
        requested_group: opts.group,
        membership: group_membership(phi, opts.seed),
        det: phi.det().value(),
        theta: theta.value(),
        signature: (sig.p, sig.q),
        n_counts: inv.n,
        binf_signature: inv.binf_signature,
        reverser_profile: element_profile(&d.summands),
        summands: inv.summands,
        verdicts,
        witness: None,
        message: None,
    })
}

/// Full report, with a witness attached when the element is
/// bireflectional in the requested group and one is found in budget.
pub fn classify(phi: &OrthoMap, label: Option<String>, opts: Options) -> Result<ReportDocument, Error> {
    let mut r = base_report(phi, label, opts)?;
    let yes = r.verdict(opts.group).is_some_and(|v| v.bireflectional);
    if yes {
        match attach_witness(phi, opts) {
            Ok(w) => r.witness = Some(w),
            Err(Error::BudgetExhausted(m)) => r.message = Some(format!("witness search inconclusive: {m}")),
            Err(e) => return Err(e),
        }
    } else {
        r.status = Status::NotBireflectional;
    }
    Ok(r)
}

fn attach_witness(phi: &OrthoMap, opts: Options) -> Result<WitnessDocument, Error> {
    let d = decompose(phi, SplitConfig { seed: opts.seed, ..SplitConfig::default() })?;
    let w = assemble_witness(phi, &d, opts.group, WitnessConfig { seed: opts.seed, budget: opts.budget })?;
    verify_witness(&w, phi).map_err(|e| Error::Internal(format!("witness fails verification: {e}")))?;
    Ok(WitnessDocument::new(&w, phi))
}

/// Witness report. A negative verdict yields status not-bireflectional;
/// an exhausted budget yields INCONCLUSIVE, never a claim of nonexistence.
pub fn witness(phi: &OrthoMap, label: Option<String>, opts: Options) -> Result<ReportDocument, Error> {
    let mut r = base_report(phi, label, opts)?;
    if !r.verdict(opts.group).is_some_and(|v| v.bireflectional) {
        r.status = Status::NotBireflectional;
        r.message = Some(format!("not bireflectional in requested group {}", opts.group));
        return Ok(r);
    }
    if opts.budget == 0 && !phi.is_identity() {
        r.status = Status::Inconclusive;
        r.message = Some("zero search budget".into());
        return Ok(r);
    }
    match attach_witness(phi, opts) {
        Ok(w) => {
            r.status = Status::Verified;
            r.witness = Some(w);
        }
        Err(Error::BudgetExhausted(m)) => {
            r.status = Status::Inconclusive;
            r.message = Some(m);
        }
        Err(e) => return Err(e),
    }
    Ok(r)
}

pub fn exit_code(r: &ReportDocument, witness_mode: bool) -> i32 {
    if witness_mode && r.status == Status::NotBireflectional {
        EXIT_NOT_BIREFLECTIONAL
    } else {
        EXIT_OK
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CorpusDocument {
    pub config: CorpusConfig,
    pub rows: Vec<SignatureRow>,
    pub conflicts: usize,
}

pub fn corpus(cfg: &CorpusConfig) -> CorpusDocument {
    let rows = run_corpus(cfg);
    let conflicts = rows.iter().map(|r| r.conflicts).sum();
    CorpusDocument { config: cfg.clone(), rows, conflicts }
}

impl CorpusDocument {
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "{:>7} {:>9} {:>5} {:>6} {:>6} {:>8} {:>6} {:>6} {:>6} {:>5}\n",
            "(p,q)", "predicted", "total", "biref", "not", "witness", "agree+", "agree-", "inconc", "CONFL"
        );
        for r in &self.rows {
            s.push_str(&format!(
                "{:>7} {:>9} {:>5} {:>6} {:>6} {:>8} {:>6} {:>6} {:>6} {:>5}\n",
                format!("({},{})", r.p, r.q),
                if r.predicted_all { "all" } else { "not all" },
                r.total,
                r.bireflectional,
                r.not_bireflectional,
                r.witnesses_verified,
                r.agree_positive,
                r.agree_negative,
                r.inconclusive,
                r.conflicts
            ));
        }
        s.push_str(&format!("total conflicts: {}\n", self.conflicts));
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(g: &[&[&str]], m: &[&[&str]]) -> ElementDocument {
        let conv = |a: &[&[&str]]| a.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        ElementDocument { gram: conv(g), matrix: conv(m), label: None }
    }

    #[test]
    fn identity_all_true_with_witness() {
        let phi = doc(&[&["1", "0"], &["0", "1"]], &[&["1", "0"], &["0", "1"]]).load().unwrap();
        let r = classify(&phi, None, Options::default()).unwrap();
        assert!(r.verdicts.iter().all(|v| v.reversible && v.bireflectional));
        assert!(r.witness.is_some());
    }

    #[test]
    fn hyperbolic_diagonal_obstructed_in_omega() {
        let phi = doc(&[&["0", "1"], &["1", "0"]], &[&["2", "0"], &["0", "1/2"]]).load().unwrap();
        let r = classify(&phi, None, Options::default()).unwrap();
        let v = r.verdict(GroupTag::Omega).unwrap();
        assert!(!v.reversible && !v.bireflectional);
        assert_eq!(v.reasons, vec![Reason::ProfileObstruction]);
        assert_eq!(serde_json::to_value(&v.reasons).unwrap(), serde_json::json!(["profile-obstruction"]));
    }

    #[test]
    fn validation_errors_are_distinct() {
        let bad_rat = doc(&[&["1/0"]], &[&["1"]]).load().unwrap_err();
        let asym = doc(&[&["1", "2"], &["0", "1"]], &[&["1", "0"], &["0", "1"]]).load().unwrap_err();
        let sing = doc(&[&["1", "1"], &["1", "1"]], &[&["1", "0"], &["0", "1"]]).load().unwrap_err();
        let nonorth = doc(&[&["1", "0"], &["0", "1"]], &[&["1", "1"], &["0", "1"]]).load().unwrap_err();
        let msgs: Vec<String> = [&bad_rat, &asym, &sing, &nonorth].iter().map(|e| e.to_string()).collect();
        for (i, a) in msgs.iter().enumerate() {
            for b in &msgs[i + 1..] {
                assert_ne!(a, b);
            }
        }
        assert!([bad_rat, asym, sing, nonorth].iter().all(|e| e.exit_code() == EXIT_VALIDATION));
    }

    #[test]
    fn zero_budget_is_inconclusive() {
        let phi = doc(&[&["1", "0"], &["0", "1"]], &[&["0", "-1"], &["1", "0"]]).load().unwrap();
        let r = witness(&phi, None, Options { group: GroupTag::O, budget: 0, ..Options::default() }).unwrap();
        assert_eq!(r.status, Status::Inconclusive);
    }
}
