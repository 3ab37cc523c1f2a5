//! Cyclic combinatorics of periodic orbits on the circle.
//!
//! Labels are 1-based: for an orbit `t_1 < ... < t_q` in [0,1) the
//! combinatorics is the permutation with `f(t_i) = t_{sigma(i)}`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::angle::{Angle, Orbit};
use crate::error::{Error, Result};

/// A permutation of `{1..n}` given by its images.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Perm {
    img: Vec<usize>,
}

impl Perm {
    pub fn from_images(img: Vec<usize>) -> Result<Perm> {
        let n = img.len();
        let mut seen = vec![false; n];
        for &x in &img {
            if x == 0 || x > n || seen[x - 1] {
                return Err(Error::InvalidPermutation(format!("{img:?}")));
            }
            seen[x - 1] = true;
        }
        Ok(Perm { img })
    }

    pub fn len(&self) -> usize {
        self.img.len()
    }

    pub fn is_empty(&self) -> bool {
        self.img.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.img
    }

    pub fn apply(&self, i: usize) -> usize {
        self.img[i - 1]
    }

    pub fn compose(&self, other: &Perm) -> Perm {
        Perm { img: other.img.iter().map(|&j| self.img[j - 1]).collect() }
    }

    pub fn pow(&self, p: usize) -> Perm {
        let mut out = Perm { img: (1..=self.len()).collect() };
        for _ in 0..p {
            out = self.compose(&out);
        }
        out
    }

    /// Cycles, each starting at its least element, ordered by that element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 1..=n {
            if seen[start - 1] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut i = start;
            while !seen[i - 1] {
                seen[i - 1] = true;
                cyc.push(i);
                i = self.apply(i);
            }
            out.push(cyc);
        }
        out
    }

    /// Number of cyclic descents, at least 1.
    pub fn degree(&self) -> usize {
        let n = self.len();
        if n <= 1 {
            return 1;
        }
        (0..n).filter(|&i| self.img[i] > self.img[(i + 1) % n]).count()
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let spaced = self.len() > 9;
        for c in self.cycles() {
            let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
            write!(f, "({})", parts.join(if spaced { "," } else { "" }))?;
        }
        Ok(())
    }
}

fn split_labels(body: &str) -> Option<Vec<usize>> {
    let toks: Vec<&str> = if body.contains(|c: char| c == ',' || c.is_whitespace()) {
        body.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()).collect()
    } else {
        body.split("").filter(|t| !t.is_empty()).collect()
    };
    toks.iter().map(|t| t.parse::<usize>().ok()).collect()
}

impl Perm {
    /// Parses a product of disjoint cycles such as `(14)(23)` or
    /// `(1,10)(2,3)`; the size is the largest label.
    pub fn parse_cycles(s: &str) -> Result<Perm> {
        let bad = || Error::InvalidPermutation(s.to_string());
        let mut cycles = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('(').ok_or_else(bad)?;
            let end = body.find(')').ok_or_else(bad)?;
            cycles.push(split_labels(&body[..end]).ok_or_else(bad)?);
            rest = body[end + 1..].trim_start();
        }
        let n = cycles.iter().flatten().copied().max().ok_or_else(bad)?;
        let mut img: Vec<usize> = (1..=n).collect();
        let mut used = vec![false; n + 1];
        for c in &cycles {
            for (j, &x) in c.iter().enumerate() {
                if x == 0 || used[x] {
                    return Err(bad());
                }
                used[x] = true;
                img[x - 1] = c[(j + 1) % c.len()];
            }
        }
        Perm::from_images(img)
    }
}

/// A cyclic permutation: the combinatorics of a single periodic orbit.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CyclicPerm(Perm);

/// The combinatorics of a finite union of cycles.
pub type MultiPerm = Perm;

impl CyclicPerm {
    pub fn from_images(img: Vec<usize>) -> Result<CyclicPerm> {
        let p = Perm::from_images(img)?;
        if p.cycles().len() != 1 {
            return Err(Error::InvalidPermutation(format!("{p} is not a single cycle")));
        }
        Ok(CyclicPerm(p))
    }

    /// Parses cycle notation `(1243)`, `(1 2 4 3)` or one-line notation
    /// `[2,4,1,3]`, `2 4 1 3`.
    pub fn parse(s: &str) -> Result<CyclicPerm> {
        let bad = || Error::InvalidPermutation(s.to_string());
        let s = s.trim();
        let split = |body: &str| -> Result<Vec<usize>> { split_labels(body).ok_or_else(bad) };
        if let Some(body) = s.strip_prefix('(') {
            let body = body.strip_suffix(')').ok_or_else(bad)?;
            if body.contains('(') || body.contains(')') {
                return Err(Error::InvalidPermutation(format!("{s} has more than one cycle")));
            }
            let cyc = split(body)?;
            let n = cyc.len();
            let mut img = vec![0; n];
            for (j, &x) in cyc.iter().enumerate() {
                if x == 0 || x > n {
                    return Err(bad());
                }
                img[x - 1] = cyc[(j + 1) % n];
            }
            CyclicPerm::from_images(img)
        } else {
            let body = s.trim_start_matches('[').trim_end_matches(']');
            CyclicPerm::from_images(split(body)?)
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0.apply(i)
    }

    pub fn images(&self) -> &[usize] {
        self.0.images()
    }

    pub fn as_perm(&self) -> &Perm {
        &self.0
    }

    pub fn pow(&self, p: usize) -> Perm {
        self.0.pow(p)
    }

    pub fn degree(&self) -> usize {
        self.0.degree()
    }

    /// `p/q` when `sigma(i) = i + p mod q`; the single fixed point counts as
    /// the rotation `0`.
    pub fn rotation_number(&self) -> Option<Angle> {
        let q = self.len();
        let p = (self.apply(1) + q - 1) % q;
        let rotates = (1..=q).all(|i| self.apply(i) == (i - 1 + p) % q + 1);
        rotates.then(|| Angle::frac(p as i64, q as i64))
    }

    pub fn one_line(&self) -> String {
        let parts: Vec<String> = self.images().iter().map(|x| x.to_string()).collect();
        format!("[{}]", parts.join(","))
    }
}

impl fmt::Display for CyclicPerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl FromStr for CyclicPerm {
    type Err = Error;

    fn from_str(s: &str) -> Result<CyclicPerm> {
        CyclicPerm::parse(s)
    }
}

fn sorted_images(points: &[Angle], base: u64) -> Vec<usize> {
    points.iter().map(|x| points.binary_search(&x.mul(base)).expect("invariant set") + 1).collect()
}

pub fn combinatorics(orbit: &Orbit) -> CyclicPerm {
    CyclicPerm::from_images(sorted_images(orbit.angles(), orbit.base())).expect("an orbit is a cycle")
}

pub fn degree(sigma: &CyclicPerm) -> usize {
    sigma.degree()
}

pub fn rotation_number(sigma: &CyclicPerm) -> Option<Angle> {
    sigma.rotation_number()
}

fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Number of period-q cycles of `z -> k z` with combinatorics `sigma`.
pub fn count_realizations(sigma: &CyclicPerm, k: u64) -> Result<BigUint> {
    let q = sigma.len();
    let d = sigma.degree();
    let k = k as usize;
    if d > k {
        return Err(Error::DegreeTooHigh { degree: d, base: k as u64 });
    }
    let top = q + k - d;
    if q > 1 && sigma.apply(q) > sigma.apply(1) {
        Ok(binomial(top, q))
    } else {
        Ok(binomial(top - 1, q))
    }
}

/// Bounds the brute force enumeration over `p/(k^q - 1)`.
#[derive(Clone, Copy, Debug)]
pub struct EnumerationLimits {
    pub max_candidates: u64,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits { max_candidates: 3u64.pow(12) - 1 }
    }
}

/// All cycles of exact period `q` under `z -> k z`, each with its combinatorics.
pub fn all_orbits(k: u64, q: usize, limits: EnumerationLimits) -> Result<Vec<(Orbit, CyclicPerm)>> {
    let big = (k as u128).checked_pow(q as u32).map(|x| x - 1);
    let n = match big {
        Some(n) if n <= limits.max_candidates as u128 => n as u64,
        Some(n) => return Err(Error::InstanceTooLarge { candidates: n, limit: limits.max_candidates }),
        None => return Err(Error::InstanceTooLarge { candidates: u128::MAX, limit: limits.max_candidates }),
    };
    let mut seen = vec![false; n as usize];
    let mut out = Vec::new();
    let mut cyc = Vec::with_capacity(q);
    for p in 0..n {
        if seen[p as usize] {
            continue;
        }
        cyc.clear();
        let mut x = p;
        loop {
            seen[x as usize] = true;
            cyc.push(x);
            x = ((x as u128 * k as u128) % n as u128) as u64;
            if x == p {
                break;
            }
        }
        if cyc.len() != q {
            continue;
        }
        let mut sorted = cyc.clone();
        sorted.sort_unstable();
        let img: Vec<usize> = sorted
            .iter()
            .map(|&x| {
                let y = ((x as u128 * k as u128) % n as u128) as u64;
                sorted.binary_search(&y).expect("closed") + 1
            })
            .collect();
        let sigma = CyclicPerm::from_images(img).expect("cycle");
        let angles = cyc.iter().map(|&x| Angle::new(x, n).expect("n > 0")).collect();
        out.push((Orbit::from_cycle(k, angles), sigma));
    }
    Ok(out)
}

/// All realizations of `sigma` by `z -> k z`, ordered by the number of
/// points in [0,1/2) and then by the least angle.
pub fn enumerate_realizations(sigma: &CyclicPerm, k: u64, limits: EnumerationLimits) -> Result<Vec<Orbit>> {
    let mut found: Vec<Orbit> =
        all_orbits(k, sigma.len(), limits)?.into_iter().filter(|(_, s)| s == sigma).map(|(o, _)| o).collect();
    found.sort_by(|a, b| {
        a.count_below_half().cmp(&b.count_below_half()).then_with(|| a.angles()[0].cmp(&b.angles()[0]))
    });
    Ok(found)
}

/// Combinatorics of a union of disjoint cycles of the same map.
pub fn union_combinatorics(orbits: &[Orbit]) -> Result<MultiPerm> {
    let base = orbits.first().map(|o| o.base()).ok_or(Error::OverlappingOrbits)?;
    if orbits.iter().any(|o| o.base() != base) {
        return Err(Error::OverlappingOrbits);
    }
    let mut pts: Vec<Angle> = orbits.iter().flat_map(|o| o.angles().iter().cloned()).collect();
    pts.sort();
    if pts.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::OverlappingOrbits);
    }
    Perm::from_images(sorted_images(&pts, base))
}

/// Witness that some iterate of `sigma` splits into unlinked rotation cycles.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReductionCertificate {
    /// Number of cycles of `sigma^p`, the period of the merged orbit.
    pub p: usize,
    /// Length of each cycle.
    pub r: usize,
    /// Common rotation number `s/r`.
    pub rotation: Angle,
    pub cycles: Vec<Vec<usize>>,
}

fn cycle_rotation(perm: &Perm, cyc: &[usize]) -> Option<usize> {
    let mut support = cyc.to_vec();
    support.sort_unstable();
    let r = support.len();
    let first = support.binary_search(&perm.apply(support[0])).ok()?;
    (0..r).all(|j| perm.apply(support[j]) == support[(j + first) % r]).then_some(first)
}

/// Whether the finite sets `a` and `b` of labels are unlinked on the circle.
pub fn unlinked(a: &[usize], b: &[usize]) -> bool {
    let side = |x: usize| b.iter().filter(|&&y| y < x).count() % b.len();
    let s0 = side(a[0]);
    a.iter().all(|&x| side(x) == s0)
}

/// Every divisor `p < q` for which `sigma^p` is a product of `p` unlinked
/// rotation cycles sharing one rotation number.
pub fn reduction_certificates(sigma: &CyclicPerm) -> Vec<ReductionCertificate> {
    let q = sigma.len();
    let mut out = Vec::new();
    for p in (1..q).filter(|p| q.is_multiple_of(*p)) {
        let r = q / p;
        let pw = sigma.pow(p);
        let cycles = pw.cycles();
        if cycles.len() != p || cycles.iter().any(|c| c.len() != r) {
            continue;
        }
        let rots: Option<Vec<usize>> = cycles.iter().map(|c| cycle_rotation(&pw, c)).collect();
        let Some(rots) = rots else { continue };
        if rots.iter().any(|&s| s != rots[0]) {
            continue;
        }
        let ok = (0..p).all(|i| (0..p).all(|j| i == j || unlinked(&cycles[i], &cycles[j])));
        if ok {
            out.push(ReductionCertificate { p, r, rotation: Angle::frac(rots[0] as i64, r as i64), cycles });
        }
    }
    out
}

pub fn dynamically_reducible(sigma: &CyclicPerm) -> Option<ReductionCertificate> {
    reduction_certificates(sigma).into_iter().next()
}
