//! Independent oracles and generators shared by the property and acceptance tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::Rng;
use tits_core::arith::QmodZ;
use tits_core::csa::{quaternion, tensor};
use tits_core::{BrauerClass, Csa, FieldDescriptor, Place, QuadraticForm, SquareClass, TwistedVariety};

pub const Q: FieldDescriptor = FieldDescriptor::Rational;

pub fn sq(n: i64) -> SquareClass {
    SquareClass::from_int(n, &Q).unwrap()
}

pub fn form(c: &[i64]) -> QuadraticForm {
    QuadraticForm::from_ints(c, &Q).unwrap()
}

fn split_p(mut n: i64, p: i64) -> (u32, i64) {
    let mut k = 0;
    while n % p == 0 {
        n /= p;
        k += 1;
    }
    (k, n)
}

fn euler(u: i64, p: i64) -> i8 {
    let (mut base, mut e, mut acc) = (u.rem_euclid(p), (p - 1) / 2, 1i64);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        e >>= 1;
    }
    if acc == 1 {
        1
    } else {
        -1
    }
}

/// Hilbert symbol from the textbook closed formulas; `None` is the real place.
pub fn hilbert_oracle(a: i64, b: i64, v: Option<i64>) -> i8 {
    match v {
        None => {
            if a < 0 && b < 0 {
                -1
            } else {
                1
            }
        }
        Some(2) => {
            let (al, u) = split_p(a, 2);
            let (be, w) = split_p(b, 2);
            let eps = |x: i64| ((x.rem_euclid(4) - 1) / 2) as u32 % 2;
            let omega = |x: i64| {
                let r = x.rem_euclid(8);
                if r == 3 || r == 5 {
                    1
                } else {
                    0
                }
            };
            let e = eps(u) * eps(w) + al * omega(w) + be * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Some(p) => {
            let (al, u) = split_p(a, p);
            let (be, w) = split_p(b, p);
            let mut s: i8 = if (al * be) % 2 == 1 && p % 4 == 3 { -1 } else { 1 };
            if be % 2 == 1 {
                s *= euler(u, p);
            }
            if al % 2 == 1 {
                s *= euler(w, p);
            }
            s
        }
    }
}

pub fn prime_factors(n: i64) -> Vec<i64> {
    let mut n = n.abs();
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Places relevant to a list of integers: ∞, 2 and every prime factor.
pub fn places_of(ints: &[i64]) -> Vec<Option<i64>> {
    let mut ps: BTreeSet<i64> = ints.iter().flat_map(|&x| prime_factors(x)).collect();
    ps.insert(2);
    std::iter::once(None).chain(ps.into_iter().map(Some)).collect()
}

/// Places where the Witt invariant of the diagonal form is nontrivial, computed
/// from the Hasse invariant by the dimension-mod-8 correction.
pub fn witt_oracle(coeffs: &[i64]) -> BTreeSet<Option<i64>> {
    let n = coeffs.len();
    let d: i64 = coeffs.iter().map(|&c| c.signum() * squarefree(c.abs())).product();
    let d = d.signum() * squarefree(d.abs());
    let mut out = BTreeSet::new();
    for v in places_of(coeffs) {
        let mut s = 1i8;
        for i in 0..n {
            for j in i + 1..n {
                s *= hilbert_oracle(coeffs[i], coeffs[j], v);
            }
        }
        let corr = match n % 8 {
            1 | 2 => 1,
            3 | 4 => hilbert_oracle(-1, -d, v),
            5 | 6 => hilbert_oracle(-1, -1, v),
            _ => hilbert_oracle(-1, d, v),
        };
        if s * corr == -1 {
            out.insert(v);
        }
    }
    out
}

fn squarefree(mut n: i64) -> i64 {
    let mut out = 1;
    let mut p = 2;
    while p * p <= n {
        let mut k = 0;
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        if k % 2 == 1 {
            out *= p;
        }
        p += 1;
    }
    out * n
}

/// Ramified places of a class of period ≤ 2, in the oracle's place encoding.
pub fn ramification(c: &BrauerClass) -> BTreeSet<Option<i64>> {
    c.invariants()
        .unwrap()
        .iter()
        .map(|(v, inv)| {
            assert_eq!(*inv, QmodZ::HALF, "expected a 2-torsion class");
            match v {
                Place::RealPlace => None,
                Place::FinitePrime(p) => Some(*p as i64),
            }
        })
        .collect()
}

/// Gaussian binomial coefficients by counting `d`-subsets of `{0..n-1}` by the
/// sum of their elements.
pub fn gauss_oracle(n: u64, d: u64) -> Vec<u64> {
    let mut out = vec![0u64; (d * (n - d) + 1) as usize];
    let shift = d * (d.saturating_sub(1)) / 2;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as u64 == d {
            let s: u64 = (0..n).filter(|i| mask >> i & 1 == 1).sum();
            out[(s - shift) as usize] += 1;
        }
    }
    out
}

pub fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

const PLACE_POOL: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// A random class over ℚ whose period divides `n`, balanced at 17.
pub fn random_class<R: Rng>(rng: &mut R, n: u64) -> BrauerClass {
    let mut invs: Vec<(Place, QmodZ)> = Vec::new();
    let mut total = QmodZ::ZERO;
    for &p in &PLACE_POOL {
        if rng.gen_bool(0.4) {
            let q = QmodZ::new(rng.gen_range(0..n) as i128, n).unwrap();
            total = total.checked_add(&q).unwrap();
            invs.push((Place::FinitePrime(p), q));
        }
    }
    if n.is_multiple_of(2) && rng.gen_bool(0.3) {
        invs.push((Place::RealPlace, QmodZ::HALF));
        total = total.checked_add(&QmodZ::HALF).unwrap();
    }
    invs.push((Place::FinitePrime(17), total.neg()));
    BrauerClass::rational(invs).unwrap()
}

pub fn random_quaternion_pair<R: Rng>(rng: &mut R) -> (i64, i64) {
    const POOL: [i64; 10] = [-1, 2, -2, 3, -3, 5, 7, -7, 11, 6];
    (POOL[rng.gen_range(0..POOL.len())], POOL[rng.gen_range(0..POOL.len())])
}

pub fn random_trivial_disc_form<R: rand::Rng>(rng: &mut R, n: usize) -> QuadraticForm {
    const POOL: [i64; 6] = [1, -1, 3, -3, 7, -7];
    let mut c: Vec<i64> = (0..n - 1).map(|_| POOL[rng.gen_range(0..POOL.len())]).collect();
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1 } else { -1 };
    c.push(sign * c.iter().product::<i64>());
    let q = form(&c);
    assert!(q.has_trivial_discriminant());
    q
}

/// Two varieties of the same single family, drawn from small pools so that
/// equal measures occur often.
pub fn random_pair<R: rand::Rng>(rng: &mut R) -> (TwistedVariety, TwistedVariety) {
    let quat_pool = |rng: &mut R| {
        let (a, b) = random_quaternion_pair(rng);
        quaternion(&sq(a), &sq(b), &Q).unwrap()
    };
    match rng.gen_range(0..5) {
        0 => {
            let per = [1u64, 2, 3][rng.gen_range(0..3)];
            let c = random_class(rng, per);
            let mk = |rng: &mut R| {
                let m = [1i64, 2, 5][rng.gen_range(0..3)];
                let deg = per * rng.gen_range(1..=2);
                TwistedVariety::SeveriBrauer(Csa::new(c.scale(m), deg).unwrap())
            };
            (mk(rng), mk(rng))
        }
        1 => {
            let a = tensor(&quat_pool(rng), &Csa::split(&Q, 2).unwrap()).unwrap();
            let b = tensor(&quat_pool(rng), &Csa::split(&Q, 2).unwrap()).unwrap();
            (
                TwistedVariety::grassmannian(rng.gen_range(1..4), a).unwrap(),
                TwistedVariety::grassmannian(rng.gen_range(1..4), b).unwrap(),
            )
        }
        2 => {
            let n = [3usize, 5, 6][rng.gen_range(0..3)];
            let mk = |rng: &mut R| {
                if n == 6 {
                    random_trivial_disc_form(rng, 6)
                } else {
                    let (a, b) = random_quaternion_pair(rng);
                    let mut c = vec![a, b, -a * b];
                    if n == 5 {
                        c.extend([1, -1]);
                    }
                    form(&c)
                }
            };
            (
                TwistedVariety::quadric(mk(rng)).unwrap(),
                TwistedVariety::quadric(mk(rng)).unwrap(),
            )
        }
        3 => {
            let mk = |rng: &mut R| {
                let deg = 2 * rng.gen_range(1..=3);
                TwistedVariety::quaternion_projective(Csa::new(quat_pool(rng).class().clone(), deg).unwrap()).unwrap()
            };
            (mk(rng), mk(rng))
        }
        _ => {
            let mk = |rng: &mut R| {
                let (a, b) = random_quaternion_pair(rng);
                let (c, d) = random_quaternion_pair(rng);
                tits_core::measure::involution_from_biquaternion(&sq(a), &sq(b), &sq(c), &sq(d), &Q).unwrap()
            };
            (mk(rng), mk(rng))
        }
    }
}
