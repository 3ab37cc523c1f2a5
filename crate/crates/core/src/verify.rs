//! Exhaustive checks of the orbit combinatorics over all doubling cycles up
//! to a given period, and of the Yoccoz inequality at small centers.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;

use crate::angle::{Angle, Orbit};
use crate::cubic::CubicMap;
use crate::error::Result;
use crate::lamination::{m_partner, partner_table, PartnerPair};
use crate::lemon::centers;
use crate::perm::{all_orbits, count_realizations, union_combinatorics, CyclicPerm, EnumerationLimits, MultiPerm};
use crate::renorm::{build_wakes, classify_coland_orbit};
use crate::simulating::{rotated_orbit, simulating_pair, verify_nothird};

/// Largest period for which the Yoccoz suite computes centers.
pub const YOCCOZ_MAX_PERIOD: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub unit: &'static str,
    pub checked: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(name: &'static str, unit: &'static str) -> SuiteReport {
        SuiteReport { name, unit, checked: 0, failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ok() {
            write!(f, "OK {} {} checked", self.checked, self.unit)
        } else {
            write!(f, "FAIL {} {}/{} {} failed", self.name, self.failures.len(), self.checked, self.unit)
        }
    }
}

/// The doubling cycles of period `q` with their tripling realizations
/// `O_0, ..., O_q` (indexed by points in [0, 1/2)).
pub struct Family {
    pub doubling: Orbit,
    pub sigma: CyclicPerm,
    pub realizations: Vec<Orbit>,
}

pub fn families(q: usize, limits: EnumerationLimits) -> Result<Vec<Family>> {
    let mut by_sigma: HashMap<CyclicPerm, Vec<Orbit>> = HashMap::new();
    for (o, s) in all_orbits(3, q, limits)? {
        by_sigma.entry(s).or_default().push(o);
    }
    let mut out = Vec::new();
    for (doubling, sigma) in all_orbits(2, q, limits)? {
        let mut realizations = by_sigma.remove(&sigma).unwrap_or_default();
        realizations.sort_by_key(|o| o.count_below_half());
        out.push(Family { doubling, sigma, realizations });
    }
    Ok(out)
}

/// Realization counts against the binomial formula: `q + 1` cycles under
/// tripling and exactly one under doubling.
pub fn realize_counts(max_period: usize, limits: EnumerationLimits) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("realize-counts", "orbits");
    for q in 1..=max_period {
        for fam in families(q, limits)? {
            let n3 = fam.realizations.len();
            let c3 = count_realizations(&fam.sigma, 3)?;
            let c2 = count_realizations(&fam.sigma, 2)?;
            let ok = n3 == q + 1 && c3 == BigUint::from(q + 1) && c2 == BigUint::from(1u32);
            r.check(ok, || format!("sigma={} tripling={n3} formula={c3} doubling-formula={c2}", fam.sigma));
        }
        let n2 = all_orbits(2, q, limits)?;
        let mut seen: Vec<&CyclicPerm> = n2.iter().map(|(_, s)| s).collect();
        seen.sort_by_key(|s| s.images().to_vec());
        let before = seen.len();
        seen.dedup();
        r.check(before == seen.len(), || format!("period {q}: a doubling combinatorics is realized twice"));
    }
    Ok(r)
}

/// Whether `O_k = {x_i}` and `O_{k-1} = {y_i}` satisfy
/// `x_1 < y_1 < ... < x_k < 1/2 <= y_k < ... < x_q < y_q`.
pub fn interlaced(ok: &Orbit, ok1: &Orbit, k: usize) -> bool {
    let q = ok.len();
    let half = Angle::half();
    let mut chain = Vec::with_capacity(2 * q);
    for i in 1..=q {
        chain.push(ok.get(i).clone());
        chain.push(ok1.get(i).clone());
    }
    chain.windows(2).all(|w| w[0] < w[1]) && ok.get(k) < &half && half <= *ok1.get(k)
}

/// Interlacing of neighbouring realizations, the count of points below 1/2,
/// and the exact lengths `|I_{sigma^i(k)}| = 3^(i-1) / (3^q - 1)`.
pub fn interlace(max_period: usize, limits: EnumerationLimits) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("interlace", "pairs");
    for q in 1..=max_period {
        let denom = 3i64.pow(q as u32) - 1;
        for fam in families(q, limits)? {
            let o = &fam.realizations;
            let deployed = o.len() == q + 1 && o.iter().enumerate().all(|(j, x)| x.count_below_half() == j);
            if !deployed {
                r.check(false, || format!("sigma={}: realizations not deployed one per count", fam.sigma));
                continue;
            }
            for k in 1..=q {
                let (ox, oy) = (&o[k], &o[k - 1]);
                r.check(interlaced(ox, oy, k), || format!("sigma={} k={k}: {ox} and {oy} do not interlace", fam.sigma));
                let mut j = k;
                for i in 1..=q {
                    j = fam.sigma.apply(j);
                    let len = oy.get(j).sub(ox.get(j));
                    let want = Angle::frac(3i64.pow(i as u32 - 1), denom);
                    if len != want {
                        r.failures.push(format!("sigma={} k={k}: |I_{j}| = {len}, expected {want}", fam.sigma));
                    }
                }
            }
        }
    }
    Ok(r)
}

/// Every realization other than the simulating pair meets `]x_k, y_k[`.
pub fn nothird(max_period: usize, limits: EnumerationLimits) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("nothird", "pairs");
    for q in 1..=max_period {
        for (_, sigma) in all_orbits(2, q, limits)? {
            for k in 1..=q {
                let ok = verify_nothird(&sigma, k, limits)?;
                r.check(ok, || format!("sigma={sigma} k={k}"));
            }
        }
    }
    Ok(r)
}

/// `O_k + 1/2 = O_{q-k}` for every `k` when `sigma` is a rotation, and only
/// for `k = 0, q` when it has degree 2.
pub fn invol(max_period: usize, limits: EnumerationLimits) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("invol", "orbits");
    for q in 1..=max_period {
        for fam in families(q, limits)? {
            let rotation = fam.sigma.degree() == 1 || q == 1;
            for k in 0..=q {
                let rotated = rotated_orbit(&fam.realizations[k])?;
                let same = rotated.angles() == fam.realizations[q - k].angles();
                let expected = rotation || k == 0 || k == q;
                r.check(same == expected, || {
                    format!(
                        "sigma={} k={k}: rotated O_k {} O_(q-k)",
                        fam.sigma,
                        if same { "equals" } else { "differs from" }
                    )
                });
            }
        }
    }
    Ok(r)
}

fn crosses(a: &PartnerPair, b: &PartnerPair) -> bool {
    let inside = |x: &Angle| a.lo < *x && *x < a.hi;
    let shared = a.lo == b.lo || a.lo == b.hi || a.hi == b.lo || a.hi == b.hi;
    !shared && inside(&b.lo) != inside(&b.hi)
}

/// Partner pairs: equal periods, the partner map is an involution, and no
/// two chords of period at most `max_period` cross.
pub fn partner_tables(max_period: usize) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("partner-tables", "pairs");
    let mut all: Vec<PartnerPair> = Vec::new();
    for n in 2..=max_period {
        for pair in partner_table(n)? {
            let periods = (pair.lo.period(2)?, pair.hi.period(2)?);
            let back = (m_partner(&pair.lo)?, m_partner(&pair.hi)?);
            let ok = periods == (n, n) && back == (pair.hi.clone(), pair.lo.clone());
            r.check(ok, || format!("pair {pair}: periods {periods:?}"));
            all.push(pair);
        }
    }
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            if crosses(a, b) {
                r.failures.push(format!("{a} crosses {b}"));
            }
        }
    }
    Ok(r)
}

/// The Yoccoz inequality at the co-landing orbit of every center of period
/// at most `min(max_period, YOCCOZ_MAX_PERIOD)` lying in a limb of its
/// period.
pub fn yoccoz(max_period: usize, limits: EnumerationLimits) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("yoccoz", "centers");
    for q in 1..=max_period.min(YOCCOZ_MAX_PERIOD) {
        let cs = centers(q);
        for (orbit, _) in all_orbits(2, q, limits)? {
            for t in orbit.angles() {
                let sp = simulating_pair(t)?;
                for a in &cs {
                    let p = CubicMap::lemon(*a);
                    let lands = crate::cubic::coland_test(&p, sp.xk(), sp.yk(), q, &Default::default()).is_coland();
                    if !lands {
                        continue;
                    }
                    match build_wakes(&p, t) {
                        Ok(ws) => {
                            let rep = classify_coland_orbit(&ws);
                            r.check(rep.yoccoz_ok(), || format!("t={t} a={a}: {rep}"));
                        }
                        Err(e) => r.check(false, || format!("t={t} a={a}: {e}")),
                    }
                }
            }
        }
    }
    Ok(r)
}

/// Union of the simulating orbits of `t` with the half-turn of those of
/// `s`, as a set. Returns the combinatorics of the union.
pub fn rotated_union(t: &Angle, s: &Angle) -> Result<MultiPerm> {
    let (a, b) = (simulating_pair(t)?, simulating_pair(s)?);
    let mut orbits = vec![a.ox, a.oy];
    for o in [rotated_orbit(&b.ox)?, rotated_orbit(&b.oy)?] {
        if !orbits.iter().any(|x| x.angles() == o.angles()) {
            orbits.push(o);
        }
    }
    union_combinatorics(&orbits)
}

/// Whether the half-turn of the simulating angles of `s` is the set of
/// simulating angles of `t`.
pub fn rotated_sets_coincide(t: &Angle, s: &Angle) -> Result<bool> {
    let (a, b) = (simulating_pair(t)?, simulating_pair(s)?);
    let mut mine: Vec<Angle> = a.ox.angles().iter().chain(a.oy.angles()).cloned().collect();
    let mut theirs: Vec<Angle> =
        rotated_orbit(&b.ox)?.angles().iter().chain(rotated_orbit(&b.oy)?.angles()).cloned().collect();
    mine.sort();
    theirs.sort();
    Ok(mine == theirs)
}

pub fn run_all(max_period: usize, limits: EnumerationLimits) -> Result<Vec<SuiteReport>> {
    Ok(vec![
        realize_counts(max_period, limits)?,
        interlace(max_period, limits)?,
        nothird(max_period, limits)?,
        invol(max_period, limits)?,
        partner_tables(max_period)?,
        yoccoz(max_period, limits)?,
    ])
}
