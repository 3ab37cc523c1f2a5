//! Exact rational angles in R/Z and their orbits under z -> k z.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A rational angle `num/den` in lowest terms with `0 <= num < den`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Angle {
    num: BigUint,
    den: BigUint,
}

impl Angle {
    /// Reduces `p/q` modulo 1. Fails on a zero denominator.
    pub fn new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Angle> {
        let (mut p, mut q) = (p.into(), q.into());
        if q.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        if q.sign() == Sign::Minus {
            p = -p;
            q = -q;
        }
        let r = p.mod_floor(&q);
        let num = r.to_biguint().expect("mod_floor is non-negative");
        let den = q.to_biguint().expect("positive");
        Ok(Angle::reduced(num, den))
    }

    /// Shorthand for small literals. Panics if `q == 0`.
    pub fn frac(p: i64, q: i64) -> Angle {
        Angle::new(p, q).expect("nonzero denominator")
    }

    pub fn zero() -> Angle {
        Angle { num: BigUint::zero(), den: BigUint::one() }
    }

    pub fn half() -> Angle {
        Angle::frac(1, 2)
    }

    fn reduced(num: BigUint, den: BigUint) -> Angle {
        let g = num.gcd(&den);
        if g.is_one() {
            Angle { num, den }
        } else if num.is_zero() {
            Angle::zero()
        } else {
            Angle { num: num / &g, den: den / &g }
        }
    }

    fn from_parts(num: BigUint, den: BigUint) -> Angle {
        let num = num % &den;
        Angle::reduced(num, den)
    }

    pub fn num(&self) -> &BigUint {
        &self.num
    }

    pub fn den(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// The image under z -> k z.
    pub fn mul(&self, k: u64) -> Angle {
        Angle::from_parts(&self.num * k, self.den.clone())
    }

    pub fn add(&self, other: &Angle) -> Angle {
        let num = &self.num * &other.den + &other.num * &self.den;
        Angle::from_parts(num, &self.den * &other.den)
    }

    pub fn sub(&self, other: &Angle) -> Angle {
        let neg = Angle::from_parts(&other.den - &other.num, other.den.clone());
        self.add(&neg)
    }

    /// Length of the counterclockwise arc from `self` to `other`, in [0,1).
    pub fn arc_to(&self, other: &Angle) -> Angle {
        other.sub(self)
    }

    /// Whether `self` lies in the open counterclockwise arc from `a` to `b`.
    pub fn in_open_arc(&self, a: &Angle, b: &Angle) -> bool {
        let ab = a.arc_to(b);
        let ax = a.arc_to(self);
        !ax.is_zero() && ax < ab
    }

    pub fn to_f64(&self) -> f64 {
        if let (Some(n), Some(d)) = (self.num.to_u64(), self.den.to_u64()) {
            return n as f64 / d as f64;
        }
        let scaled: BigUint = (&self.num << 64u32) / &self.den;
        scaled.to_f64().unwrap_or(0.0) / 18446744073709551616.0
    }

    /// Period under multiplication by `k`, or an error when the angle is
    /// strictly preperiodic.
    pub fn period(&self, k: u64) -> Result<usize> {
        if !self.den.gcd(&BigUint::from(k)).is_one() {
            return Err(Error::PreperiodicAngle { angle: self.to_string(), base: k });
        }
        let mut n = 1usize;
        let mut x = self.mul(k);
        while x != *self {
            x = x.mul(k);
            n += 1;
        }
        Ok(n)
    }

    /// `(preperiod, period)` under multiplication by `k`.
    pub fn preperiod_period(&self, k: u64) -> (usize, usize) {
        let kb = BigUint::from(k);
        let mut x = self.clone();
        let mut l = 0;
        while !x.den.gcd(&kb).is_one() {
            x = x.mul(k);
            l += 1;
        }
        (l, x.period(k).expect("periodic after the preperiod"))
    }

    pub fn lt_half(&self) -> bool {
        &self.num * 2u32 < self.den
    }
}

impl Ord for Angle {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num.is_zero() {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Angle {
    type Err = Error;

    fn from_str(s: &str) -> Result<Angle> {
        let bad = || Error::BadAngle(s.to_string());
        let s = s.trim();
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let p: BigInt = p.parse().map_err(|_| bad())?;
        let q: BigInt = q.parse().map_err(|_| bad())?;
        Angle::new(p, q)
    }
}

/// A periodic cycle of `z -> base z`, stored in increasing order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Orbit {
    base: u64,
    angles: Vec<Angle>,
    marked: usize,
}

impl Orbit {
    /// Builds an orbit from a cycle of angles. The first angle is marked.
    pub fn from_cycle(base: u64, cycle: Vec<Angle>) -> Orbit {
        let first = cycle[0].clone();
        let mut angles = cycle;
        angles.sort();
        let marked = angles.binary_search(&first).expect("present");
        Orbit { base, angles, marked }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    /// Zero-based index of the angle the orbit was generated from.
    pub fn marked(&self) -> usize {
        self.marked
    }

    pub fn position(&self, theta: &Angle) -> Option<usize> {
        self.angles.binary_search(theta).ok()
    }

    pub fn contains(&self, theta: &Angle) -> bool {
        self.position(theta).is_some()
    }

    /// 1-based label `i` of `t_i`.
    pub fn get(&self, i: usize) -> &Angle {
        &self.angles[i - 1]
    }

    /// Number of angles in [0, 1/2).
    pub fn count_below_half(&self) -> usize {
        self.angles.iter().take_while(|a| a.lt_half()).count()
    }

    pub fn with_marked(mut self, theta: &Angle) -> Option<Orbit> {
        self.marked = self.position(theta)?;
        Some(self)
    }
}

impl fmt::Display for Orbit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.angles.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub fn angle_new(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<Angle> {
    Angle::new(p, q)
}

pub fn mul_map(k: u64, theta: &Angle) -> Angle {
    theta.mul(k)
}

/// The full cycle of `theta` under `z -> k z`.
pub fn forward_orbit(k: u64, theta: &Angle) -> Result<Orbit> {
    let q = theta.period(k)?;
    let mut cycle = Vec::with_capacity(q);
    let mut x = theta.clone();
    for _ in 0..q {
        let next = x.mul(k);
        cycle.push(x);
        x = next;
    }
    Ok(Orbit::from_cycle(k, cycle))
}

pub fn period(k: u64, theta: &Angle) -> Result<usize> {
    theta.period(k)
}
