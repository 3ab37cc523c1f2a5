//! Simulating orbits: the `q+1` tripling realizations of a doubling
//! combinatorics, the simulating pair `(O_k, O_{k-1})` of an angle `t`, and
//! the projection that collapses the gaps `[x_i, y_i]`.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::angle::{forward_orbit, Angle, Orbit};
use crate::error::{Error, Result};
use crate::perm::{combinatorics, enumerate_realizations, CyclicPerm, EnumerationLimits};

/// Whether `sigma` is realized by some doubling cycle.
pub fn is_m2_combinatorics(sigma: &CyclicPerm) -> bool {
    let q = sigma.len();
    if q == 1 {
        return true;
    }
    match sigma.degree() {
        1 => sigma.apply(q) < sigma.apply(1),
        2 => sigma.apply(q) > sigma.apply(1),
        _ => false,
    }
}

/// The tripling realizations `O_0, ..., O_q` of `sigma`, where `O_i` has
/// exactly `i` points in [0, 1/2).
pub fn realizations_ordered(sigma: &CyclicPerm, limits: EnumerationLimits) -> Result<Vec<Orbit>> {
    if !is_m2_combinatorics(sigma) {
        return Err(Error::NotM2Combinatorics(sigma.to_string()));
    }
    enumerate_realizations(sigma, 3, limits)
}

#[derive(Clone, Debug)]
pub struct SimulatingPair {
    pub t: Angle,
    /// 1-based label of `t` in its doubling orbit.
    pub k: usize,
    pub orbit: Orbit,
    pub sigma: CyclicPerm,
    /// `O_k`, containing the `x_i`.
    pub ox: Orbit,
    /// `O_{k-1}`, containing the `y_i`.
    pub oy: Orbit,
    /// The preimage of 0 among {1/3, 2/3} lying outside `[x_k, y_k]`.
    c0: Angle,
}

impl SimulatingPair {
    pub fn q(&self) -> usize {
        self.orbit.len()
    }

    pub fn x(&self, i: usize) -> &Angle {
        self.ox.get(i)
    }

    pub fn y(&self, i: usize) -> &Angle {
        self.oy.get(i)
    }

    pub fn xk(&self) -> &Angle {
        self.x(self.k)
    }

    pub fn yk(&self) -> &Angle {
        self.y(self.k)
    }

    /// `x'_k = x_k + 1/3`.
    pub fn x_prime(&self) -> Angle {
        self.xk().add(&Angle::frac(1, 3))
    }

    /// `y'_k = y_k - 1/3`.
    pub fn y_prime(&self) -> Angle {
        self.yk().sub(&Angle::frac(1, 3))
    }

    /// 1-based label of the plateau `[x_i, y_i]` containing `theta`.
    pub fn plateau_of(&self, theta: &Angle) -> Option<usize> {
        (1..=self.q()).find(|&i| self.x(i) <= theta && theta <= self.y(i))
    }

    /// Exact length of `[x_i, y_i]`.
    pub fn plateau_length(&self, i: usize) -> Angle {
        self.y(i).sub(self.x(i))
    }

    pub fn c0(&self) -> &Angle {
        &self.c0
    }
}

impl fmt::Display for SimulatingPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "t={} k={} x={} y={} x'={} y'={} Ox={} Oy={}",
            self.t,
            self.k,
            self.xk(),
            self.yk(),
            self.x_prime(),
            self.y_prime(),
            self.ox,
            self.oy
        )
    }
}

pub fn simulating_pair(t: &Angle) -> Result<SimulatingPair> {
    simulating_pair_with(t, EnumerationLimits::default())
}

pub fn simulating_pair_with(t: &Angle, limits: EnumerationLimits) -> Result<SimulatingPair> {
    let orbit = forward_orbit(2, t)?;
    let sigma = combinatorics(&orbit);
    let k = orbit.marked() + 1;
    let mut all = realizations_ordered(&sigma, limits)?;
    let ox = all.swap_remove(k);
    let oy = all.swap_remove(k - 1);
    let third = Angle::frac(1, 3);
    let (xk, yk) = (ox.get(k), oy.get(k));
    let c0 = if xk <= &third && &third <= yk { Angle::frac(2, 3) } else { third };
    Ok(SimulatingPair { t: t.clone(), k, orbit, sigma, ox, oy, c0 })
}

/// Result of projecting a tripling angle to the doubling circle.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Projection {
    /// `theta` lies in an iterated preimage of `[x_k, y_k]`; `level` is the
    /// number of iterates needed to land in some `[x_index, y_index]`.
    Plateau { level: usize, index: usize, value: Angle },
    /// `theta` is eventually periodic off the plateaus; the value is exact.
    Exact(Angle),
    /// The value lies in `[lo, hi]` (counterclockwise), of width `2^-depth`.
    Bracket { lo: Angle, hi: Angle },
}

impl Projection {
    /// Smallest closed arc known to contain the value.
    pub fn interval(&self) -> (Angle, Angle) {
        match self {
            Projection::Plateau { value, .. } | Projection::Exact(value) => (value.clone(), value.clone()),
            Projection::Bracket { lo, hi } => (lo.clone(), hi.clone()),
        }
    }

    pub fn contains(&self, v: &Angle) -> bool {
        let (lo, hi) = self.interval();
        lo == *v || hi == *v || v.in_open_arc(&lo, &hi)
    }

    pub fn value(&self) -> Option<&Angle> {
        match self {
            Projection::Plateau { value, .. } | Projection::Exact(value) => Some(value),
            Projection::Bracket { .. } => None,
        }
    }
}

fn pow2(n: usize) -> BigUint {
    BigUint::one() << n
}

fn bits(digits: &[bool]) -> BigUint {
    digits.iter().fold(BigUint::from(0u32), |acc, &b| (acc << 1) + u32::from(b))
}

/// Sum of `b_j 2^-(j+1)` for `j < digits.len()`.
fn dyadic(digits: &[bool]) -> Angle {
    Angle::new(bits(digits), pow2(digits.len())).expect("nonzero")
}

/// Projects `theta` through the monotone map that collapses each `[x_i, y_i]`
/// to `t_i` and semiconjugates tripling to doubling outside `[x_k, y_k]`.
///
/// Off the plateaus the value has binary digits `[3^n theta >= c0]`, where
/// `c0` is the preimage of 0 outside `[x_k, y_k]`.
pub fn project_angle(sp: &SimulatingPair, theta: &Angle, depth: usize) -> Projection {
    let mut digits: Vec<bool> = Vec::new();
    let mut seen: HashMap<Angle, usize> = HashMap::new();
    let mut cur = theta.clone();
    for n in 0..=depth {
        if let Some(i) = sp.plateau_of(&cur) {
            let shifted = Angle::new(sp.orbit.get(i).num().clone(), sp.orbit.get(i).den() << n).expect("nonzero");
            return Projection::Plateau { level: n, index: i, value: dyadic(&digits).add(&shifted) };
        }
        if let Some(&m) = seen.get(&cur) {
            // digits[m..n] repeat forever
            let len = n - m;
            let head = dyadic(&digits[..m]);
            let rep = Angle::new(bits(&digits[m..]), (pow2(len) - 1u32) << m).expect("nonzero");
            return Projection::Exact(head.add(&rep));
        }
        if n == depth {
            break;
        }
        seen.insert(cur.clone(), n);
        digits.push(cur >= sp.c0);
        cur = cur.mul(3);
    }
    let lo = dyadic(&digits);
    let hi = lo.add(&Angle::new(1u32, pow2(depth)).expect("nonzero"));
    Projection::Bracket { lo, hi }
}

/// `O + 1/2`, the half turn of a cycle of an odd-degree multiplication map.
pub fn rotated_orbit(o: &Orbit) -> Result<Orbit> {
    if o.base().is_multiple_of(2) {
        return Err(Error::EvenBase(o.base()));
    }
    let half = Angle::half();
    let first = o.get(o.marked() + 1).add(&half);
    let cycle: Vec<Angle> = {
        let mut v = Vec::with_capacity(o.len());
        let mut x = first;
        for _ in 0..o.len() {
            let next = x.mul(o.base());
            v.push(x);
            x = next;
        }
        v
    };
    Ok(Orbit::from_cycle(o.base(), cycle))
}

/// `t_{q-k+1}` when the doubling orbit of `t = t_k` has degree 1.
pub fn complementary_angle(t: &Angle) -> Result<Option<Angle>> {
    let orbit = forward_orbit(2, t)?;
    let sigma = combinatorics(&orbit);
    if sigma.degree() != 1 {
        return Ok(None);
    }
    let q = orbit.len();
    let k = orbit.marked() + 1;
    Ok(Some(orbit.get(q - k + 1).clone()))
}

/// Checks that every realization `O_j` with `j` outside `{k-1, k}` meets
/// the open arc `]x_k, y_k[`.
pub fn verify_nothird(sigma: &CyclicPerm, k: usize, limits: EnumerationLimits) -> Result<bool> {
    let all = realizations_ordered(sigma, limits)?;
    let (xk, yk) = (all[k].get(k).clone(), all[k - 1].get(k).clone());
    Ok(all
        .iter()
        .enumerate()
        .filter(|(j, _)| *j + 1 != k && *j != k)
        .all(|(_, o)| o.angles().iter().any(|u| u.in_open_arc(&xk, &yk))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: i64, q: i64) -> Angle {
        Angle::frac(p, q)
    }

    #[test]
    fn one_third() {
        let sp = simulating_pair(&f(1, 3)).unwrap();
        assert_eq!(sp.to_string(), "t=1/3 k=1 x=1/4 y=5/8 x'=7/12 y'=7/24 Ox=1/4,3/4 Oy=5/8,7/8");
        assert_eq!(sp.c0(), &f(2, 3));
    }

    #[test]
    fn zero() {
        let sp = simulating_pair(&Angle::zero()).unwrap();
        assert_eq!((sp.xk(), sp.yk()), (&Angle::zero(), &f(1, 2)));
    }

    #[test]
    fn two_fifths_projection() {
        let sp = simulating_pair(&f(2, 5)).unwrap();
        assert_eq!(sp.k, 2);
        assert_eq!((sp.xk(), sp.yk()), (&f(24, 80), &f(51, 80)));
        assert_eq!(project_angle(&sp, &f(2, 80), 8), Projection::Exact(f(1, 15)));
        assert_eq!(project_angle(&sp, &Angle::zero(), 8), Projection::Exact(Angle::zero()));
        assert_eq!(project_angle(&sp, &f(56, 80), 8), Projection::Plateau { level: 0, index: 3, value: f(3, 5) });
    }

    #[test]
    fn all_ones_digits() {
        // 1/2 + 1/4 + ... must come out as 1 = 0, not as a fraction with
        // numerator equal to the denominator.
        let sp = simulating_pair(&f(1, 3)).unwrap();
        let p = project_angle(&sp, &f(26, 27), 12);
        assert!(p.contains(&Angle::zero()) || p.value().is_some());
    }

    #[test]
    fn complementary() {
        assert_eq!(complementary_angle(&f(1, 7)).unwrap(), Some(f(4, 7)));
        assert_eq!(complementary_angle(&f(2, 7)).unwrap(), Some(f(2, 7)));
        assert_eq!(complementary_angle(&f(1, 5)).unwrap(), None);
    }

    #[test]
    fn rotation_is_half_turn() {
        let sp = simulating_pair(&f(1, 3)).unwrap();
        let r = rotated_orbit(&sp.ox).unwrap();
        assert_eq!(r.to_string(), "1/4,3/4");
        assert!(rotated_orbit(&forward_orbit(2, &f(1, 3)).unwrap()).is_err());
    }
}
