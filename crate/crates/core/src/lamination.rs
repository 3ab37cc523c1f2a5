//! Quadratic side: Mandelbrot partner angles, orbit portraits, merging
//! predictions and the third cycle of a primitive limb.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::sync::{Mutex, OnceLock};

use crate::angle::{forward_orbit, Angle, Orbit};
use crate::error::{Error, Result};
use crate::perm::{
    all_orbits, combinatorics, dynamically_reducible, enumerate_realizations, unlinked, CyclicPerm, EnumerationLimits,
    ReductionCertificate,
};
use crate::simulating::{is_m2_combinatorics, project_angle, simulating_pair_with, Projection};

/// Largest period the partner table may be built for.
pub const MAX_PARTNER_PERIOD: usize = 24;

#[derive(Clone, Copy, Debug, Eq)]
struct Frac {
    num: u64,
    den: u64,
}

impl PartialEq for Frac {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Ord for Frac {
    fn cmp(&self, o: &Self) -> Ordering {
        (self.num as u128 * o.den as u128).cmp(&(o.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl Frac {
    fn angle(self) -> Angle {
        Angle::new(self.num, self.den).expect("nonzero")
    }

    fn from_angle(a: &Angle) -> Option<Frac> {
        use num_traits::ToPrimitive;
        Some(Frac { num: a.num().to_u64()?, den: a.den().to_u64()? })
    }

    fn key(self) -> (u64, u64) {
        let g = num_integer::gcd(self.num, self.den);
        (self.num / g, self.den / g)
    }
}

fn strictly_between(x: Frac, a: Frac, b: Frac) -> bool {
    a < x && x < b
}

fn crosses(a: (Frac, Frac), b: (Frac, Frac)) -> bool {
    strictly_between(b.0, a.0, a.1) != strictly_between(b.1, a.0, a.1)
}

/// Lavaurs' pairing of doubling-periodic angles up to some period.
#[derive(Default, Debug)]
struct PartnerTable {
    built: usize,
    chords: Vec<(Frac, Frac)>,
    by_period: Vec<Vec<(Frac, Frac)>>,
    partner: HashMap<(u64, u64), Frac>,
}

impl PartnerTable {
    fn extend_to(&mut self, period: usize) {
        if self.by_period.is_empty() {
            self.by_period = vec![Vec::new(), Vec::new()];
            self.built = 1;
        }
        while self.built < period {
            let n = self.built + 1;
            let den = (1u64 << n) - 1;
            let divisors: Vec<u64> = (1..n).filter(|d| n.is_multiple_of(*d)).map(|d| den / ((1u64 << d) - 1)).collect();
            let cands: Vec<Frac> =
                (1..den).filter(|p| divisors.iter().all(|m| p % m != 0)).map(|num| Frac { num, den }).collect();
            let mut paired = vec![false; cands.len()];
            let mut new = Vec::new();
            for ia in 0..cands.len() {
                if paired[ia] {
                    continue;
                }
                for ib in ia + 1..cands.len() {
                    if paired[ib] {
                        continue;
                    }
                    let chord = (cands[ia], cands[ib]);
                    if self.chords.iter().any(|&c| crosses(c, chord)) {
                        continue;
                    }
                    paired[ia] = true;
                    paired[ib] = true;
                    self.chords.push(chord);
                    self.partner.insert(chord.0.key(), chord.1);
                    self.partner.insert(chord.1.key(), chord.0);
                    new.push(chord);
                    break;
                }
            }
            self.by_period.push(new);
            self.built = n;
        }
    }
}

fn with_table<T>(period: usize, f: impl FnOnce(&PartnerTable) -> T) -> Result<T> {
    if period > MAX_PARTNER_PERIOD {
        return Err(Error::InstanceTooLarge { candidates: 1u128 << period, limit: 1u64 << MAX_PARTNER_PERIOD });
    }
    static TABLE: OnceLock<Mutex<PartnerTable>> = OnceLock::new();
    let mut table = TABLE.get_or_init(Default::default).lock().expect("partner table lock");
    table.extend_to(period);
    Ok(f(&table))
}

/// An unordered pair of partner angles, stored with `lo < hi`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct PartnerPair {
    pub lo: Angle,
    pub hi: Angle,
}

impl PartnerPair {
    pub fn new(a: Angle, b: Angle) -> PartnerPair {
        if a < b {
            PartnerPair { lo: a, hi: b }
        } else {
            PartnerPair { lo: b, hi: a }
        }
    }

    /// Whether the arc `[lo, hi]` contains the arc of `other`.
    pub fn contains(&self, other: &PartnerPair) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    pub fn width(&self) -> Angle {
        self.hi.sub(&self.lo)
    }
}

impl fmt::Display for PartnerPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <-> {}", self.lo, self.hi)
    }
}

/// The other parameter angle landing with `t` at a root of the Mandelbrot set.
pub fn m_partner(t: &Angle) -> Result<Angle> {
    if t.is_zero() {
        return Err(Error::ZeroAngle);
    }
    let n = t.period(2)?;
    let f = Frac::from_angle(t).ok_or_else(|| Error::InvalidInput(format!("{t} too large")))?;
    with_table(n, |tab| tab.partner[&f.key()].angle())
}

/// All partner pairs of exact period `n`, by increasing smaller angle.
pub fn partner_table(n: usize) -> Result<Vec<PartnerPair>> {
    if n < 2 {
        return Ok(Vec::new());
    }
    with_table(n, |tab| tab.by_period[n].iter().map(|&(a, b)| PartnerPair::new(a.angle(), b.angle())).collect())
}

/// 1-based labels `(i, j)`, `i < j`, of partners within one doubling orbit.
pub fn partner_pair_in_orbit(orbit: &Orbit) -> Result<Option<(usize, usize)>> {
    for i in 1..=orbit.len() {
        let t = orbit.get(i);
        if t.is_zero() {
            continue;
        }
        if let Some(j) = orbit.position(&m_partner(t)?) {
            let j = j + 1;
            return Ok(Some((i.min(j), i.max(j))));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PortraitKind {
    Trivial,
    Primitive,
    Satellite,
}

impl fmt::Display for PortraitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            PortraitKind::Trivial => "trivial",
            PortraitKind::Primitive => "primitive",
            PortraitKind::Satellite => "satellite",
        };
        f.write_str(s)
    }
}

/// The orbit portrait of a repelling cycle: for each landing point the
/// set of angles landing there.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Portrait {
    pub classes: Vec<Vec<Angle>>,
    pub kind: PortraitKind,
    /// Period of the landing points.
    pub orbit_period: usize,
    /// Period of the angles.
    pub ray_period: usize,
    /// Number of ray cycles at each landing point under the first return.
    pub cycles_per_point: usize,
    pub rotation: Angle,
    /// Shortest complementary arc of a class, counterclockwise.
    pub characteristic_arc: Option<(Angle, Angle)>,
}

impl Portrait {
    fn new(mut classes: Vec<Vec<Angle>>, kind: PortraitKind, ray_period: usize, rotation: Angle) -> Portrait {
        for c in &mut classes {
            c.sort();
        }
        classes.sort();
        let orbit_period = classes.len();
        let size = classes[0].len();
        let cycles_per_point = if kind == PortraitKind::Satellite { 1 } else { size };
        let characteristic_arc = characteristic_arc(&classes);
        Portrait { classes, kind, orbit_period, ray_period, cycles_per_point, rotation, characteristic_arc }
    }
}

impl fmt::Display for Portrait {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let classes: Vec<String> = self
            .classes
            .iter()
            .map(|c| format!("{{{}}}", c.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(
            f,
            "type={} orbit_period={} ray_period={} rotation={} classes={}",
            self.kind,
            self.orbit_period,
            self.ray_period,
            self.rotation,
            classes.join(";")
        )?;
        if let Some((a, b)) = &self.characteristic_arc {
            write!(f, " arc={a},{b}")?;
        }
        Ok(())
    }
}

fn characteristic_arc(classes: &[Vec<Angle>]) -> Option<(Angle, Angle)> {
    let mut best: Option<(Angle, Angle, Angle)> = None;
    for c in classes.iter().filter(|c| c.len() > 1) {
        for j in 0..c.len() {
            let (a, b) = (&c[j], &c[(j + 1) % c.len()]);
            let len = a.arc_to(b);
            if best.as_ref().is_none_or(|(l, _, _)| len < *l) {
                best = Some((len, a.clone(), b.clone()));
            }
        }
    }
    best.map(|(_, a, b)| (a, b))
}

fn satellite_portrait(orbit: &Orbit, cert: &ReductionCertificate) -> Portrait {
    let classes = cert.cycles.iter().map(|c| c.iter().map(|&i| orbit.get(i).clone()).collect()).collect();
    Portrait::new(classes, PortraitKind::Satellite, orbit.len(), cert.rotation.clone())
}

fn trivial_portrait(orbit: &Orbit) -> Portrait {
    Portrait::new(
        orbit.angles().iter().map(|a| vec![a.clone()]).collect(),
        PortraitKind::Trivial,
        orbit.len(),
        Angle::zero(),
    )
}

/// What merging of the `q` landing points a reducible combinatorics forces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MergePrediction {
    pub certificate: ReductionCertificate,
    /// The doubling cycle with the given combinatorics.
    pub orbit: Orbit,
    pub portrait: Portrait,
}

impl MergePrediction {
    /// Parameter limb in which the merging is realized: the characteristic arc.
    pub fn limb(&self) -> PartnerPair {
        let (a, b) = self.portrait.characteristic_arc.clone().expect("satellite portraits have arcs");
        PartnerPair::new(a, b)
    }
}

pub fn predict_merging(sigma: &CyclicPerm) -> Result<Option<MergePrediction>> {
    if !is_m2_combinatorics(sigma) {
        return Err(Error::NotM2Combinatorics(sigma.to_string()));
    }
    let Some(certificate) = dynamically_reducible(sigma) else { return Ok(None) };
    let limits = EnumerationLimits { max_candidates: 1 << MAX_PARTNER_PERIOD };
    let orbit = enumerate_realizations(sigma, 2, limits)?.remove(0);
    let portrait = satellite_portrait(&orbit, &certificate);
    Ok(Some(MergePrediction { certificate, orbit, portrait }))
}

/// Portrait of the doubling cycle `orbit` for parameters in the limb bounded by
/// the partner pair `limb`.
pub fn portrait_for_limb(orbit: &Orbit, limb: &PartnerPair) -> Result<Portrait> {
    let mut best: Option<(PartnerPair, usize)> = None;
    for i in 1..=orbit.len() {
        let t = orbit.get(i);
        if t.is_zero() {
            continue;
        }
        let wake = PartnerPair::new(t.clone(), m_partner(t)?);
        if wake.contains(limb) && best.as_ref().is_none_or(|(w, _)| wake.width() < w.width()) {
            best = Some((wake, i));
        }
    }
    let Some((wake, i)) = best else { return Ok(trivial_portrait(orbit)) };
    let t = orbit.get(i);
    let t_hat = if wake.lo == *t { wake.hi.clone() } else { wake.lo.clone() };
    if orbit.contains(&t_hat) {
        let sigma = combinatorics(orbit);
        let cert = dynamically_reducible(&sigma)
            .ok_or_else(|| Error::InvalidInput(format!("{sigma} has internal partners but no reduction")))?;
        return Ok(satellite_portrait(orbit, &cert));
    }
    let mut classes = Vec::with_capacity(orbit.len());
    let (mut a, mut b) = (t.clone(), t_hat);
    for _ in 0..orbit.len() {
        classes.push(vec![a.clone(), b.clone()]);
        a = a.mul(2);
        b = b.mul(2);
    }
    Ok(Portrait::new(classes, PortraitKind::Primitive, orbit.len(), Angle::zero()))
}

/// A tripling cycle landing on the merged cycle of a primitive limb.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ThirdCycle {
    pub orbit: Orbit,
    pub tau: CyclicPerm,
    /// For each angle of `orbit` in increasing order, the 1-based label `i`
    /// of the landing point `z_i` it shares with `x_i` and `y_i`.
    pub labels: Vec<usize>,
}

impl fmt::Display for ThirdCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let labels: Vec<String> = self.labels.iter().map(|l| l.to_string()).collect();
        write!(f, "orbit={} tau={} labels={}", self.orbit, self.tau, labels.join(","))
    }
}

fn hull_unlinked(a: &[Angle], b: &[Angle]) -> bool {
    let mut all: Vec<&Angle> = a.iter().chain(b).collect();
    all.sort();
    all.dedup();
    if all.len() != a.len() + b.len() {
        return false;
    }
    let label = |x: &Angle| all.binary_search(&x).expect("present") + 1;
    let la: Vec<usize> = a.iter().map(label).collect();
    let lb: Vec<usize> = b.iter().map(label).collect();
    unlinked(&la, &lb)
}

/// Exhaustively finds the tripling cycle that projects onto the partner
/// cycle of a primitive limb and whose angles join the polygons
/// `{x_i, y_i}` without crossings.
pub fn third_cycle(t: &Angle, limb: &PartnerPair, limits: EnumerationLimits) -> Result<ThirdCycle> {
    let sp = simulating_pair_with(t, limits)?;
    let portrait = portrait_for_limb(&sp.orbit, limb)?;
    if portrait.kind != PortraitKind::Primitive {
        return Err(Error::NotPrimitive(portrait.kind.to_string()));
    }
    let q = sp.q();
    let mut label_of: HashMap<Angle, usize> = HashMap::new();
    for class in &portrait.classes {
        let (ti, s) = if sp.orbit.contains(&class[0]) { (&class[0], &class[1]) } else { (&class[1], &class[0]) };
        label_of.insert(s.clone(), sp.orbit.position(ti).expect("orbit angle") + 1);
    }
    let mut found = Vec::new();
    for (o, tau) in all_orbits(3, q, limits)? {
        if o.angles().iter().any(|u| sp.ox.contains(u) || sp.oy.contains(u)) {
            continue;
        }
        let labels: Option<Vec<usize>> = o
            .angles()
            .iter()
            .map(|u| match project_angle(&sp, u, 2 * q) {
                Projection::Exact(v) => label_of.get(&v).copied(),
                _ => None,
            })
            .collect();
        let Some(labels) = labels else { continue };
        let polys: Vec<Vec<Angle>> = (0..q)
            .map(|j| {
                let i = labels[j];
                vec![sp.x(i).clone(), sp.y(i).clone(), o.angles()[j].clone()]
            })
            .collect();
        let ok = (0..q).all(|a| (a + 1..q).all(|b| hull_unlinked(&polys[a], &polys[b])));
        if ok {
            found.push(ThirdCycle { orbit: o, tau, labels });
        }
    }
    match found.len() {
        0 => Err(Error::NoThirdCycle),
        1 => Ok(found.remove(0)),
        n => Err(Error::NonUniqueThirdCycle(n)),
    }
}

/// Doubling orbit of `t` with its combinatorics.
pub fn doubling_orbit(t: &Angle) -> Result<(Orbit, CyclicPerm)> {
    let o = forward_orbit(2, t)?;
    let s = combinatorics(&o);
    Ok((o, s))
}
