//! Factorization of rational polynomials into monic irreducibles.
//!
//! Square-free parts are factored over the integers by factoring modulo a
//! small prime (distinct-degree plus Cantor–Zassenhaus splitting), lifting
//! the modular factorization with linear Hensel steps past the Mignotte
//! bound, and recombining lifted factors by trial division.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::poly::Poly;
use crate::error::Error;

/// Irreducible monic factors with multiplicities, sorted by degree and then
/// by coefficients.
pub fn factor_rational_poly(f: &Poly) -> Result<Vec<(Poly, usize)>, Error> {
    if f.is_zero() {
        return Err(Error::Precondition("cannot factor the zero polynomial".into()));
    }
    let mut out = Vec::new();
    for (part, mult) in f.squarefree_decomposition() {
        for g in factor_squarefree(&part) {
            out.push((g, mult));
        }
    }
    out.sort_by(|(a, ma), (b, mb)| {
        a.deg().cmp(&b.deg()).then_with(|| a.coeffs().cmp(b.coeffs())).then(ma.cmp(mb))
    });
    Ok(out)
}

/// Factors a square-free polynomial of positive degree.
fn factor_squarefree(f: &Poly) -> Vec<Poly> {
    if f.deg() <= 1 {
        return vec![f.monic()];
    }
    let ints = f.primitive_integer();
    zassenhaus(&ints).into_iter().map(|g| Poly::from_bigints(&g).monic()).collect()
}

type ZPoly = Vec<BigInt>;
type MPoly = Vec<u64>;

fn zassenhaus(f: &ZPoly) -> Vec<ZPoly> {
    let n = f.len() - 1;
    let lc = f[n].clone();

    // Choose among a few admissible primes the one with fewest modular factors.
    let mut best: Option<(u64, Vec<MPoly>)> = None;
    let mut tried = 0;
    for p in small_primes().into_iter().skip(2) {
        if (&lc % BigInt::from(p)).is_zero() {
            continue;
        }
        let fp = reduce(f, p);
        let dfp = mp_derivative(&fp, p);
        if mp_deg(&mp_gcd(&fp, &dfp, p)) != Some(0) {
            continue;
        }
        let monic = mp_monic(&fp, p);
        let facs = factor_mod_p(&monic, p);
        tried += 1;
        if best.as_ref().is_none_or(|(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        if tried >= 5 || best.as_ref().is_some_and(|(_, b)| b.len() == 1) {
            break;
        }
    }
    let (p, facs) = best.expect("some prime is admissible for a square-free polynomial");
    if facs.len() == 1 {
        return vec![f.clone()];
    }

    // Lift until p^k exceeds twice the bound on lc * (any factor's coefficients).
    let norm2: BigInt = f.iter().map(|c| c * c).sum();
    let bound = (BigInt::one() << n) * (norm2.sqrt() + BigInt::one()) * lc.abs() * 2;
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut modulus = pb.clone();
    while modulus <= bound {
        modulus *= &pb;
        k += 1;
    }
    let lifted = hensel_lift(f, &facs, p, k);
    recombine(f, lifted, &modulus)
}

fn recombine(f: &ZPoly, lifted: Vec<ZPoly>, modulus: &BigInt) -> Vec<ZPoly> {
    let mut remaining: Vec<usize> = (0..lifted.len()).collect();
    let mut rest = f.clone();
    let mut found = Vec::new();
    let mut s = 1;
    'outer: while 2 * s <= remaining.len() {
        let lc = rest.last().unwrap().clone();
        for subset in combinations(remaining.len(), s) {
            let chosen: Vec<usize> = subset.iter().map(|&i| remaining[i]).collect();
            let mut g: ZPoly = vec![lc.clone()];
            for &i in &chosen {
                g = zmul(&g, &lifted[i]);
                for c in g.iter_mut() {
                    *c = c.mod_floor(modulus);
                }
            }
            let half = modulus / 2;
            for c in g.iter_mut() {
                if *c > half {
                    *c -= modulus;
                }
            }
            let g = primitive(&g);
            if let Some(q) = zdiv_exact(&rest, &g) {
                found.push(g);
                rest = q;
                remaining.retain(|i| !chosen.contains(i));
                continue 'outer;
            }
        }
        s += 1;
    }
    if rest.len() > 1 {
        found.push(rest);
    }
    found
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(idx.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        if idx[i] == i + n - k {
            return out;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn primitive(g: &ZPoly) -> ZPoly {
    let mut content = BigInt::zero();
    for c in g {
        content = content.gcd(c);
    }
    let mut out: ZPoly = g.iter().map(|c| c / &content).collect();
    while out.last().is_some_and(|c| c.is_zero()) {
        out.pop();
    }
    if out.last().is_some_and(|c| c.is_negative()) {
        for c in out.iter_mut() {
            *c = -&*c;
        }
    }
    out
}

/// Exact division over the integers; `None` unless `d` divides `f` in Z[x].
fn zdiv_exact(f: &ZPoly, d: &ZPoly) -> Option<ZPoly> {
    let n = f.len() - 1;
    let m = d.len() - 1;
    if m > n {
        return None;
    }
    let mut r = f.clone();
    let mut q = vec![BigInt::zero(); n - m + 1];
    let ld = &d[m];
    for i in (0..=n - m).rev() {
        let (qi, rem) = r[i + m].div_rem(ld);
        if !rem.is_zero() {
            return None;
        }
        if !qi.is_zero() {
            for (j, dc) in d.iter().enumerate() {
                r[i + j] -= &qi * dc;
            }
        }
        q[i] = qi;
    }
    r.iter().all(|c| c.is_zero()).then_some(q)
}

fn zmul(a: &ZPoly, b: &ZPoly) -> ZPoly {
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Lifts `f = lc * prod facs (mod p)` to monic factors modulo `p^k`.
fn hensel_lift(f: &ZPoly, facs: &[MPoly], p: u64, k: u32) -> Vec<ZPoly> {
    let pb = BigInt::from(p);
    let modulus = pb.pow(k);
    let mut target = f.clone();
    let mut out = Vec::with_capacity(facs.len());
    for i in 0..facs.len() - 1 {
        let lc = target.last().unwrap().clone();
        let g0 = facs[i].clone();
        let mut h0: MPoly = vec![(lc.mod_floor(&pb)).to_u64().unwrap()];
        for fac in &facs[i + 1..] {
            h0 = mp_mul(&h0, fac, p);
        }
        let (g, h) = lift_pair(&target, &g0, &h0, p, k);
        out.push(g);
        target = h.iter().map(|c| c.mod_floor(&modulus)).collect();
        // keep the exact leading coefficient so degrees are preserved
        *target.last_mut().unwrap() = lc;
    }
    let lc = target.last().unwrap().clone();
    let inv = mod_inverse(&lc, &modulus);
    out.push(target.iter().map(|c| (c * &inv).mod_floor(&modulus)).collect());
    out
}

fn lift_pair(f: &ZPoly, g0: &MPoly, h0: &MPoly, p: u64, k: u32) -> (ZPoly, ZPoly) {
    let pb = BigInt::from(p);
    let (gcd, s, t) = mp_ext_gcd(g0, h0, p);
    debug_assert_eq!(gcd, vec![1]);
    let _ = s;
    let lc = f.last().unwrap().clone();
    let mut g: ZPoly = g0.iter().map(|&c| BigInt::from(c)).collect();
    let mut h: ZPoly = h0.iter().map(|&c| BigInt::from(c)).collect();
    *h.last_mut().unwrap() = lc;
    let mut pk = pb.clone();
    for _ in 1..k {
        let gh = zmul(&g, &h);
        let mut e: MPoly = Vec::with_capacity(f.len());
        for i in 0..f.len() {
            let diff = &f[i] - gh.get(i).cloned().unwrap_or_default();
            debug_assert!((&diff % &pk).is_zero());
            e.push((diff / &pk).mod_floor(&pb).to_u64().unwrap());
        }
        mp_trim(&mut e);
        let a = mp_divrem(&mp_mul(&e, &t, p), g0, p).1;
        let b = mp_divrem(&mp_sub(&e, &mp_mul(&a, h0, p), p), g0, p).0;
        for (i, c) in a.iter().enumerate() {
            g[i] += &pk * BigInt::from(*c);
        }
        for (i, c) in b.iter().enumerate() {
            h[i] += &pk * BigInt::from(*c);
        }
        pk *= &pb;
    }
    (g, h)
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    debug_assert!(e.gcd.is_one());
    e.x.mod_floor(m)
}

fn small_primes() -> Vec<u64> {
    let limit = 2000;
    let mut sieve = vec![true; limit];
    let mut out = Vec::new();
    for i in 2..limit {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j < limit {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

fn reduce(f: &ZPoly, p: u64) -> MPoly {
    let pb = BigInt::from(p);
    let mut v: MPoly = f.iter().map(|c| c.mod_floor(&pb).to_u64().unwrap()).collect();
    mp_trim(&mut v);
    v
}

// --- arithmetic in F_p[x], coefficients lowest degree first ---

fn mp_trim(a: &mut MPoly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn mp_deg(a: &MPoly) -> Option<usize> {
    a.len().checked_sub(1)
}

fn mp_sub(a: &MPoly, b: &MPoly, p: u64) -> MPoly {
    let n = a.len().max(b.len());
    let mut v: MPoly = (0..n)
        .map(|i| (a.get(i).copied().unwrap_or(0) + p - b.get(i).copied().unwrap_or(0)) % p)
        .collect();
    mp_trim(&mut v);
    v
}

fn mp_mul(a: &MPoly, b: &MPoly, p: u64) -> MPoly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut v = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            v[i + j] = (v[i + j] + x * y) % p;
        }
    }
    mp_trim(&mut v);
    v
}

fn mp_pow_scalar(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

fn mp_inv_scalar(a: u64, p: u64) -> u64 {
    mp_pow_scalar(a, p - 2, p)
}

fn mp_monic(a: &MPoly, p: u64) -> MPoly {
    let inv = mp_inv_scalar(*a.last().unwrap(), p);
    a.iter().map(|c| c * inv % p).collect()
}

fn mp_divrem(a: &MPoly, d: &MPoly, p: u64) -> (MPoly, MPoly) {
    let dd = mp_deg(d).expect("division by zero polynomial");
    let mut r = a.clone();
    if r.len() <= dd {
        return (Vec::new(), r);
    }
    let inv = mp_inv_scalar(d[dd], p);
    let mut q = vec![0u64; r.len() - dd];
    for i in (0..q.len()).rev() {
        let c = r[i + dd] * inv % p;
        q[i] = c;
        if c != 0 {
            for (j, dc) in d.iter().enumerate() {
                r[i + j] = (r[i + j] + p - c * dc % p) % p;
            }
        }
    }
    r.truncate(dd);
    mp_trim(&mut r);
    mp_trim(&mut q);
    (q, r)
}

fn mp_gcd(a: &MPoly, b: &MPoly, p: u64) -> MPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    while !b.is_empty() {
        let r = mp_divrem(&a, &b, p).1;
        a = b;
        b = r;
    }
    if a.is_empty() {
        a
    } else {
        mp_monic(&a, p)
    }
}

fn mp_ext_gcd(a: &MPoly, b: &MPoly, p: u64) -> (MPoly, MPoly, MPoly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1): (MPoly, MPoly) = (vec![1], Vec::new());
    let (mut t0, mut t1): (MPoly, MPoly) = (Vec::new(), vec![1]);
    while !r1.is_empty() {
        let (q, r) = mp_divrem(&r0, &r1, p);
        r0 = std::mem::replace(&mut r1, r);
        let s = mp_sub(&s0, &mp_mul(&q, &s1, p), p);
        s0 = std::mem::replace(&mut s1, s);
        let t = mp_sub(&t0, &mp_mul(&q, &t1, p), p);
        t0 = std::mem::replace(&mut t1, t);
    }
    let inv = mp_inv_scalar(*r0.last().unwrap(), p);
    let sc = |v: &MPoly| {
        let mut w: MPoly = v.iter().map(|c| c * inv % p).collect();
        mp_trim(&mut w);
        w
    };
    (sc(&r0), sc(&s0), sc(&t0))
}

fn mp_derivative(a: &MPoly, p: u64) -> MPoly {
    let mut v: MPoly = a.iter().enumerate().skip(1).map(|(i, c)| (i as u64 % p) * c % p).collect();
    mp_trim(&mut v);
    v
}

fn mp_powmod(base: &MPoly, e: &BigUint, m: &MPoly, p: u64) -> MPoly {
    let mut acc: MPoly = vec![1];
    let base = mp_divrem(base, m, p).1;
    for i in (0..e.bits()).rev() {
        acc = mp_divrem(&mp_mul(&acc, &acc, p), m, p).1;
        if e.bit(i) {
            acc = mp_divrem(&mp_mul(&acc, &base, p), m, p).1;
        }
    }
    acc
}

/// Factors a monic square-free polynomial over F_p (p odd) into monic
/// irreducibles.
fn factor_mod_p(f: &MPoly, p: u64) -> Vec<MPoly> {
    let mut out = Vec::new();
    let mut rest = f.clone();
    let x: MPoly = vec![0, 1];
    let mut h = x.clone();
    let mut d = 1;
    let mut rng = ChaCha8Rng::seed_from_u64(p);
    while mp_deg(&rest).unwrap_or(0) >= 2 * d {
        h = mp_powmod(&h, &BigUint::from(p), &rest, p);
        let g = mp_gcd(&mp_sub(&h, &x, p), &rest, p);
        if mp_deg(&g).unwrap_or(0) > 0 {
            equal_degree_split(&g, d, p, &mut rng, &mut out);
            rest = mp_divrem(&rest, &g, p).0;
            h = mp_divrem(&h, &rest, p).1;
        }
        d += 1;
    }
    if mp_deg(&rest).unwrap_or(0) > 0 {
        out.push(rest);
    }
    out
}

fn equal_degree_split(g: &MPoly, d: usize, p: u64, rng: &mut ChaCha8Rng, out: &mut Vec<MPoly>) {
    let n = mp_deg(g).unwrap();
    if n == d {
        out.push(g.clone());
        return;
    }
    let e = (BigUint::from(p).pow(d as u32) - BigUint::one()) / BigUint::from(2u32);
    loop {
        let mut a: MPoly = (0..n).map(|_| rng.gen_range(0..p)).collect();
        mp_trim(&mut a);
        if a.len() < 2 {
            continue;
        }
        let b = mp_sub(&mp_powmod(&a, &e, g, p), &vec![1], p);
        let c = mp_gcd(&b, g, p);
        let dc = mp_deg(&c).unwrap_or(0);
        if dc > 0 && dc < n {
            equal_degree_split(&c, d, p, rng, out);
            equal_degree_split(&mp_divrem(g, &c, p).0, d, p, rng, out);
            return;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rational::{rat, ratio};

    fn p(c: &[i64]) -> Poly {
        Poly::from_ints(c)
    }

    #[test]
    fn worked_examples() {
        let f = factor_rational_poly(&p(&[-1, 0, 1])).unwrap();
        assert_eq!(f, vec![(p(&[-1, 1]), 1), (p(&[1, 1]), 1)]);
        let f = factor_rational_poly(&p(&[1, 0, 0, 0, 1])).unwrap();
        assert_eq!(f, vec![(p(&[1, 0, 0, 0, 1]), 1)]);
        let f = factor_rational_poly(&p(&[-1, 1]).pow(3)).unwrap();
        assert_eq!(f, vec![(p(&[-1, 1]), 3)]);
    }

    /// x^4 + 1 has no rational root (candidates ±1) and no factorization
    /// into monic rational quadratics: matching coefficients of
    /// (x^2+ax+b)(x^2-ax+c) forces a(c-b)=0 and either a=0 with b+c=0, bc=1
    /// (b^2=-1, impossible) or b=c with b^2=1 and 2b=a^2 (a^2=±2, irrational).
    #[test]
    fn x4_plus_1_brute_force_oracle() {
        let f = p(&[1, 0, 0, 0, 1]);
        assert!(!f.eval(&rat(1)).is_zero() && !f.eval(&rat(-1)).is_zero());
        for b in [rat(1), rat(-1)] {
            let a2 = rat(2) * &b;
            // a^2 = 2b must have a rational solution for a quadratic split
            let has_rational_sqrt = (-40..=40)
                .flat_map(|n| (1..=40).map(move |d| ratio(n, d)))
                .any(|a| &a * &a == a2);
            assert!(!has_rational_sqrt);
        }
        assert_eq!(factor_rational_poly(&f).unwrap().len(), 1);
    }

    #[test]
    fn rational_coefficients_and_big_factors() {
        // (x - 1/3)(x^2 - 7/2 x + 1)(x^3 - 2)
        let a = Poly::linear(&ratio(1, 3));
        let b = Poly::new(vec![rat(1), ratio(-7, 2), rat(1)]);
        let c = p(&[-2, 0, 0, 1]);
        let f = &(&a * &b) * &c;
        let facs = factor_rational_poly(&f.scale(&rat(5))).unwrap();
        assert_eq!(facs.len(), 3);
        assert!(facs.contains(&(a, 1)));
        assert!(facs.contains(&(b, 1)));
        assert!(facs.contains(&(c, 1)));
    }

    #[test]
    fn cyclotomic_products() {
        // x^8 - 1 = (x-1)(x+1)(x^2+1)(x^4+1)
        let facs = factor_rational_poly(&p(&[-1, 0, 0, 0, 0, 0, 0, 0, 1])).unwrap();
        let degs: Vec<usize> = facs.iter().map(|(g, _)| g.deg()).collect();
        assert_eq!(degs, vec![1, 1, 2, 4]);
    }

    #[test]
    fn large_coefficients() {
        let a = p(&[123456789, -987654321, 1]);
        let b = p(&[-1000000007, 3, 0, 1]);
        let facs = factor_rational_poly(&(&a * &b)).unwrap();
        assert_eq!(facs, vec![(a, 1), (b, 1)]);
    }

    #[test]
    fn combinations_enumerates() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(5, 1).len(), 5);
    }
}
