//! Real root counting and isolation for square-free rational polynomials
//! via Sturm sequences.

use num_traits::{One, Signed, Zero};

use super::poly::Poly;
use super::rational::{ratio, Rational};

pub fn sturm_sequence(p: &Poly) -> Vec<Poly> {
    let mut seq = vec![p.clone(), p.derivative()];
    loop {
        let n = seq.len();
        if seq[n - 1].is_zero() {
            seq.pop();
            break;
        }
        let r = seq[n - 2].rem(&seq[n - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(-&r);
    }
    seq
}

fn variations(seq: &[Poly], x: &Rational) -> usize {
    let mut count = 0;
    let mut last: Option<bool> = None;
    for p in seq {
        let v = p.eval(x);
        if v.is_zero() {
            continue;
        }
        let pos = v.is_positive();
        if last.is_some_and(|l| l != pos) {
            count += 1;
        }
        last = Some(pos);
    }
    count
}

/// Number of distinct real roots of `p` in the half-open interval (a, b].
pub fn count_roots(p: &Poly, a: &Rational, b: &Rational) -> usize {
    let seq = sturm_sequence(p);
    variations(&seq, a).saturating_sub(variations(&seq, b))
}

/// Cauchy bound: every complex root has modulus below the returned value.
pub fn root_bound(p: &Poly) -> Rational {
    let lead = p.lead();
    let mut m = Rational::zero();
    for c in &p.coeffs()[..p.deg()] {
        let r = (c / &lead).abs();
        if r > m {
            m = r;
        }
    }
    m + Rational::one()
}

/// Disjoint isolating intervals (a, b], sorted, each containing exactly one
/// real root of the square-free polynomial `p`. Endpoints are never roots.
pub fn isolate_real_roots(p: &Poly) -> Vec<(Rational, Rational)> {
    if p.deg() == 0 {
        return Vec::new();
    }
    let seq = sturm_sequence(p);
    let b = root_bound(p);
    let mut out = Vec::new();
    let mut stack = vec![(-b.clone(), b)];
    while let Some((lo, hi)) = stack.pop() {
        let n = variations(&seq, &lo).saturating_sub(variations(&seq, &hi));
        match n {
            0 => {}
            1 => out.push((lo, hi)),
            _ => {
                let mid = split_point(p, &lo, &hi);
                stack.push((lo, mid.clone()));
                stack.push((mid, hi));
            }
        }
    }
    out.sort();
    out
}

/// A point strictly inside (lo, hi) that is not a root of `p`.
fn split_point(p: &Poly, lo: &Rational, hi: &Rational) -> Rational {
    for k in 2..64 {
        let t = ratio(1, k);
        let mid = lo + (hi - lo) * if k == 2 { t } else { ratio(k - 1, 2 * k) };
        if !p.eval(&mid).is_zero() {
            return mid;
        }
    }
    unreachable!("a nonzero polynomial has finitely many roots")
}

/// Real roots of `p` inside (a, b), returned as isolating intervals clipped
/// so that every endpoint lies in [a, b] and is not a root.
pub fn isolate_in(p: &Poly, a: &Rational, b: &Rational) -> Vec<(Rational, Rational)> {
    isolate_real_roots(p)
        .into_iter()
        .filter_map(|(lo, hi)| {
            let lo2 = if &lo < a { a.clone() } else { lo };
            let hi2 = if &hi > b { b.clone() } else { hi };
            (lo2 < hi2 && count_roots(p, &lo2, &hi2) == 1 && !p.eval(&hi2).is_zero()).then_some((lo2, hi2))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::rat;

    #[test]
    fn counts_roots_of_quadratics() {
        let p = Poly::from_ints(&[-2, 0, 1]);
        assert_eq!(count_roots(&p, &rat(-2), &rat(2)), 2);
        assert_eq!(count_roots(&p, &rat(0), &rat(2)), 1);
        let q = Poly::from_ints(&[1, 0, 1]);
        assert_eq!(count_roots(&q, &rat(-10), &rat(10)), 0);
    }

    #[test]
    fn isolates_close_roots() {
        // (y - 1/100)(y - 1/101)(y + 3)
        let p = &(&Poly::linear(&ratio(1, 100)) * &Poly::linear(&ratio(1, 101))) * &Poly::linear(&rat(-3));
        let iv = isolate_real_roots(&p);
        assert_eq!(iv.len(), 3);
        for w in iv.windows(2) {
            assert!(w[0].1 <= w[1].0);
        }
        for (lo, hi) in &iv {
            assert_eq!(count_roots(&p, lo, hi), 1);
            assert!(!p.eval(hi).is_zero() && !p.eval(lo).is_zero());
        }
    }

    #[test]
    fn isolates_within_window() {
        // y^3 - 3y has roots 0, ±sqrt(3); all inside (-2, 2)
        let p = Poly::from_ints(&[0, -3, 0, 1]);
        assert_eq!(isolate_in(&p, &rat(-2), &rat(2)).len(), 3);
        let q = Poly::from_ints(&[-5, 0, 1]);
        assert_eq!(isolate_in(&q, &rat(-2), &rat(2)).len(), 0);
    }
}
