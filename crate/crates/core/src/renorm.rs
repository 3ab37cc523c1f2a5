//! Dynamical wakes cut out by the co-landing simulating rays, membership in
//! the main renormalization locus, and classification of the co-landing
//! orbit.

use std::f64::consts::TAU;
use std::fmt;

use crate::angle::Angle;
use crate::cubic::{
    coland_test, landing_point, yoccoz_check, CoLandVerdict, CubicMap, Landing, RayOptions, YoccozCheck, C, COLAND_TOL,
};
use crate::error::{Error, Result};
use crate::lamination::{partner_table, predict_merging, third_cycle};
use crate::perm::EnumerationLimits;
use crate::simulating::{simulating_pair, SimulatingPair};

pub const BOUNDARY_MARGIN: f64 = 1e-4;
const ESCAPE: f64 = 1e3;
/// Orbit points closer than this are taken to close a cycle.
const CYCLE_TOL: f64 = 1e-9;
const ARC_POINTS: usize = 256;
/// Largest period for which third cycles are searched numerically.
const THIRD_CYCLE_MAX_PERIOD: usize = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Location {
    Inside,
    Outside,
    /// Within the margin of the boundary.
    Boundary,
}

/// Region bounded by two co-landing rays, their landing point and the arc of
/// the far equipotential through the angles between them.
#[derive(Clone, Debug)]
pub struct Wake {
    pub lo: Angle,
    pub hi: Angle,
    pub landing: C,
    pub boundary: Vec<C>,
}

impl Wake {
    fn new(map: &CubicMap, lo: &Landing, hi: &Landing, landing: C, s_start: f64) -> Wake {
        let mut boundary: Vec<C> = lo.trace.points.iter().map(|p| p.z).collect();
        boundary.push(landing);
        boundary.extend(hi.trace.points.iter().rev().map(|p| p.z));
        let y = hi.trace.angle.to_f64();
        let span = lo.trace.angle.arc_to(&hi.trace.angle).to_f64();
        let r = s_start.exp();
        for j in 1..ARC_POINTS {
            let th = y - span * j as f64 / ARC_POINTS as f64;
            boundary.push(C::from_polar(r, TAU * th) - map.a);
        }
        Wake { lo: lo.trace.angle.clone(), hi: hi.trace.angle.clone(), landing, boundary }
    }

    pub fn boundary_distance(&self, z: C) -> f64 {
        let n = self.boundary.len();
        (0..n).map(|i| segment_distance(z, self.boundary[i], self.boundary[(i + 1) % n])).fold(f64::INFINITY, f64::min)
    }

    /// Even-odd crossing test against the closed boundary polygon.
    pub fn contains(&self, z: C) -> bool {
        let n = self.boundary.len();
        let mut inside = false;
        for i in 0..n {
            let (p, q) = (self.boundary[i], self.boundary[(i + 1) % n]);
            if (p.im > z.im) != (q.im > z.im) {
                let x = p.re + (z.im - p.im) / (q.im - p.im) * (q.re - p.re);
                if z.re < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn locate(&self, z: C, margin: f64) -> Location {
        if self.boundary_distance(z) <= margin {
            Location::Boundary
        } else if self.contains(z) {
            Location::Inside
        } else {
            Location::Outside
        }
    }
}

fn segment_distance(z: C, p: C, q: C) -> f64 {
    let d = q - p;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (z - p).norm();
    }
    let s = ((z - p).re * d.re + (z - p).im * d.im) / len2;
    (z - (p + d * s.clamp(0.0, 1.0))).norm()
}

/// The wakes `W_1, ..., W_q` of a map in the limb of `t`, with the sub-wake
/// `W'_k` cut off by the rays of angles `y'_k`, `x'_k`.
#[derive(Clone, Debug)]
pub struct WakeSystem {
    pub map: CubicMap,
    pub pair: SimulatingPair,
    pub wakes: Vec<Wake>,
    pub sub_wake: Wake,
    /// Multiplier of `P^q` at `z_1`.
    pub multiplier: C,
}

impl WakeSystem {
    /// Landing point `z_i`, 1-based.
    pub fn z(&self, i: usize) -> C {
        self.wakes[i - 1].landing
    }

    pub fn wake(&self, i: usize) -> &Wake {
        &self.wakes[i - 1]
    }

    /// 1-based label of the wake containing `z`, or `Err(i)` when `z` is
    /// within `margin` of the boundary of `W_i`.
    pub fn wake_of(&self, z: C, margin: f64) -> std::result::Result<Option<usize>, usize> {
        let mut found = None;
        for (i, w) in self.wakes.iter().enumerate() {
            match w.locate(z, margin) {
                Location::Boundary => return Err(i + 1),
                Location::Inside => found = Some(i + 1),
                Location::Outside => {}
            }
        }
        Ok(found)
    }
}

fn land_pair(p: &CubicMap, lo: &Angle, hi: &Angle, opts: &RayOptions) -> Result<(Landing, Landing)> {
    let l1 = landing_point(p, lo, opts)?;
    let l2 = landing_point(p, hi, opts)?;
    let d = (l1.point - l2.point).norm();
    if d >= COLAND_TOL {
        return Err(Error::NotInLimb(format!("rays {lo} and {hi} land {d:.3e} apart")));
    }
    Ok((l1, l2))
}

pub fn build_wakes(p: &CubicMap, t: &Angle) -> Result<WakeSystem> {
    build_wakes_with(p, t, &RayOptions::default())
}

pub fn build_wakes_with(p: &CubicMap, t: &Angle, opts: &RayOptions) -> Result<WakeSystem> {
    let pair = simulating_pair(t)?;
    let mut wakes = Vec::with_capacity(pair.q());
    let mut multiplier = C::new(0.0, 0.0);
    for i in 1..=pair.q() {
        let (l1, l2) = land_pair(p, pair.x(i), pair.y(i), opts)?;
        if i == 1 {
            multiplier = l1.multiplier;
        }
        wakes.push(Wake::new(p, &l1, &l2, l1.point, opts.s_start));
    }
    let (yp, xp) = (pair.y_prime(), pair.x_prime());
    let (l1, l2) = land_pair(p, &yp, &xp, opts)?;
    let sub_wake = Wake::new(p, &l1, &l2, l1.point, opts.s_start);
    Ok(WakeSystem { map: *p, pair, wakes, sub_wake, multiplier })
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict {
    InLocus,
    /// The orbit of critical point `critical` (1 or 2) escaped at `step`.
    Escaped {
        critical: usize,
        step: usize,
    },
    /// The orbit of `critical` left the region required at `step`.
    Outside {
        critical: usize,
        step: usize,
    },
    NotInLimb,
    Inconclusive(String),
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::InLocus => write!(f, "verdict=in-locus"),
            Verdict::Escaped { critical, step } => write!(f, "verdict=escaped critical={critical} step={step}"),
            Verdict::Outside { critical, step } => write!(f, "verdict=outside critical={critical} step={step}"),
            Verdict::NotInLimb => write!(f, "verdict=not-in-limb"),
            Verdict::Inconclusive(why) => write!(f, "verdict=inconclusive reason={}", why.replace(' ', "_")),
        }
    }
}

/// Orbit of `z` under `P^step` for at most `n + 1` points, stopping early
/// once it closes up on itself. `Err(n)` when it escapes at point `n`.
fn critical_orbit(p: &CubicMap, z: C, step: usize, n: usize) -> std::result::Result<Vec<C>, usize> {
    let mut orbit = vec![z];
    let mut w = z;
    for j in 1..=n {
        w = p.iterate(w, step);
        if !w.is_finite() || w.norm() > ESCAPE {
            return Err(j);
        }
        if orbit.iter().any(|u| (u - w).norm() < CYCLE_TOL) {
            break;
        }
        orbit.push(w);
    }
    Ok(orbit)
}

/// Decides membership in the main renormalization locus of the limb of `t`
/// from the first `n_max` steps of the critical orbits.
pub fn lren_membership(p: &CubicMap, t: &Angle, n_max: usize) -> Verdict {
    let q = match t.period(2) {
        Ok(q) => q,
        Err(e) => return Verdict::Inconclusive(e.to_string()),
    };
    let [w1, w2] = p.critical_points();
    if let Err(step) = critical_orbit(p, w1, 1, n_max) {
        return Verdict::Escaped { critical: 1, step };
    }
    if let Err(step) = critical_orbit(p, w2, q, n_max) {
        return Verdict::Escaped { critical: 2, step: step * q };
    }
    match build_wakes(p, t) {
        Ok(ws) => lren_with_wakes(&ws, n_max, BOUNDARY_MARGIN),
        Err(Error::NotInLimb(_)) => Verdict::NotInLimb,
        Err(e) => Verdict::Inconclusive(e.to_string()),
    }
}

pub fn lren_with_wakes(ws: &WakeSystem, n_max: usize, margin: f64) -> Verdict {
    let p = &ws.map;
    if ws.multiplier.norm() <= 1.0 + 1e-6 {
        return Verdict::Inconclusive(format!("co-landing orbit not repelling, |lambda| = {}", ws.multiplier.norm()));
    }
    let q = ws.pair.q();
    let k = ws.pair.k;
    let [w1, w2] = p.critical_points();
    let orbit1 = match critical_orbit(p, w1, 1, n_max) {
        Ok(o) => o,
        Err(step) => return Verdict::Escaped { critical: 1, step },
    };
    let orbit2 = match critical_orbit(p, w2, q, n_max) {
        Ok(o) => o,
        Err(step) => return Verdict::Escaped { critical: 2, step: step * q },
    };
    for (n, &z) in orbit1.iter().enumerate() {
        match ws.wake_of(z, margin) {
            Err(i) => return Verdict::Inconclusive(format!("omega_1 orbit near the boundary of W_{i} at step {n}")),
            Ok(Some(_)) => return Verdict::Outside { critical: 1, step: n },
            Ok(None) => {}
        }
    }
    for (n, &z) in orbit2.iter().enumerate() {
        match (ws.wake(k).locate(z, margin), ws.sub_wake.locate(z, margin)) {
            (Location::Boundary, _) | (_, Location::Boundary) => {
                return Verdict::Inconclusive(format!("omega_2 orbit near a wake boundary at step {}", n * q))
            }
            (Location::Inside, Location::Outside) => {}
            _ => return Verdict::Outside { critical: 2, step: n * q },
        }
    }
    Verdict::InLocus
}

#[derive(Clone, Debug)]
pub struct OrbitReport {
    /// Period of the landing orbit `{z_1, ..., z_q}`.
    pub period: usize,
    pub merged: bool,
    pub third_cycle_detected: bool,
    /// Multiplier of `P^period` at `z_1`.
    pub multiplier: C,
    /// Rotation number of `P^period` on the rays landing at `z_1`.
    pub rotation: Option<Angle>,
    pub ray_cycles: usize,
    pub yoccoz: Option<YoccozCheck>,
    /// `merged` implies the combinatorics is dynamically reducible.
    pub merge_consistent: bool,
}

impl OrbitReport {
    pub fn yoccoz_ok(&self) -> bool {
        self.yoccoz.is_some_and(|y| y.holds)
    }
}

impl fmt::Display for OrbitReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "period={} merged={} third_cycle={} multiplier={:.16e},{:.16e} rotation={} ray_cycles={} yoccoz_ok={} merge_consistent={}",
            self.period,
            self.merged,
            self.third_cycle_detected,
            self.multiplier.re,
            self.multiplier.im,
            self.rotation.as_ref().map_or("none".to_string(), |r| r.to_string()),
            self.ray_cycles,
            self.yoccoz_ok(),
            self.merge_consistent
        )
    }
}

/// Rotation number and number of cycles of `m_3^p` on the angles `rays`,
/// when it acts on them as a rotation.
fn ray_rotation(rays: &[Angle], p: usize) -> Option<(Angle, usize)> {
    let mut sorted = rays.to_vec();
    sorted.sort();
    sorted.dedup();
    let n = sorted.len();
    let image = |a: &Angle| (0..p).fold(a.clone(), |x, _| x.mul(3));
    let first = image(&sorted[0]);
    let shift = sorted.iter().position(|a| *a == first)?;
    for (j, a) in sorted.iter().enumerate() {
        if image(a) != sorted[(j + shift) % n] {
            return None;
        }
    }
    let rot = Angle::new(shift as u64, n as u64).ok()?;
    let cycles = n / rot.den().to_string().parse::<usize>().ok()?;
    Some((rot, cycles))
}

fn detect_third_cycle(ws: &WakeSystem, opts: &RayOptions) -> bool {
    let q = ws.pair.q();
    if q > THIRD_CYCLE_MAX_PERIOD {
        return false;
    }
    let mut candidates = Vec::new();
    for period in 1..=q {
        let Ok(table) = partner_table(period) else { continue };
        for limb in table {
            if let Ok(tc) = third_cycle(&ws.pair.t, &limb, EnumerationLimits::default()) {
                if !candidates.iter().any(|c: &crate::lamination::ThirdCycle| c.orbit == tc.orbit) {
                    candidates.push(tc);
                }
            }
        }
    }
    candidates.iter().any(|tc| {
        let u = &tc.orbit.angles()[0];
        landing_point(&ws.map, u, opts).is_ok_and(|l| (l.point - ws.z(tc.labels[0])).norm() < COLAND_TOL)
    })
}

pub fn classify_coland_orbit(ws: &WakeSystem) -> OrbitReport {
    classify_with(ws, &RayOptions::default())
}

pub fn classify_with(ws: &WakeSystem, opts: &RayOptions) -> OrbitReport {
    let q = ws.pair.q();
    let z1 = ws.z(1);
    let mut distinct: Vec<C> = Vec::new();
    for i in 1..=q {
        if distinct.iter().all(|z| (z - ws.z(i)).norm() >= COLAND_TOL) {
            distinct.push(ws.z(i));
        }
    }
    let period = distinct.len();
    let merged = period < q;
    let (_, multiplier) = ws.map.iterate_with_derivative(z1, period);
    let rays: Vec<Angle> = (1..=q)
        .filter(|&i| (ws.z(i) - z1).norm() < COLAND_TOL)
        .flat_map(|i| [ws.pair.x(i).clone(), ws.pair.y(i).clone()])
        .collect();
    let rot = ray_rotation(&rays, period);
    let yoccoz = rot.as_ref().and_then(|(r, n)| yoccoz_check(multiplier, r, *n, 3f64.powi(period as i32), 1e-9).ok());
    let reducible = predict_merging(&ws.pair.sigma).ok().flatten().is_some();
    OrbitReport {
        period,
        merged,
        third_cycle_detected: detect_third_cycle(ws, opts),
        multiplier,
        rotation: rot.as_ref().map(|(r, _)| r.clone()),
        ray_cycles: rot.map_or(0, |(_, n)| n),
        yoccoz,
        merge_consistent: !merged || reducible,
    }
}

/// `P^(preperiod + period)(omega) = P^preperiod(omega)` for a critical point.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CriticalRelation {
    pub preperiod: usize,
    pub period: usize,
}

impl CriticalRelation {
    pub fn new(preperiod: usize, period: usize) -> CriticalRelation {
        CriticalRelation { preperiod, period }
    }

    fn residual(&self, p: &CubicMap, w: C) -> C {
        let u = p.iterate(w, self.preperiod);
        p.iterate(u, self.period) - u
    }

    /// Whether `w` satisfies no relation with a smaller preperiod or period.
    fn exact(&self, p: &CubicMap, w: C) -> bool {
        let tol = 1e-6;
        let u = p.iterate(w, self.preperiod);
        let smaller_period =
            (1..self.period).filter(|d| self.period.is_multiple_of(*d)).any(|d| (p.iterate(u, d) - u).norm() < tol);
        let smaller_pre = self.preperiod > 0 && {
            let v = p.iterate(w, self.preperiod - 1);
            (p.iterate(v, self.period) - v).norm() < tol
        };
        !smaller_period && !smaller_pre
    }
}

fn relation_residual(a: C, b: C, rel: &[CriticalRelation; 2]) -> [C; 2] {
    let p = CubicMap::new(a, b);
    let [w1, w2] = p.critical_points();
    [rel[0].residual(&p, w1), rel[1].residual(&p, w2)]
}

/// Newton in `(a, b)` for the relations on `omega_1 = 0` and
/// `omega_2 = -2a`, starting from `seed`. Returns only solutions where both
/// relations are exact.
pub fn solve_critical_relations(seed: &CubicMap, rel: [CriticalRelation; 2]) -> Option<CubicMap> {
    let (mut a, mut b) = (seed.a, seed.b);
    for _ in 0..80 {
        let f = relation_residual(a, b, &rel);
        let h = 1e-7;
        let fa = relation_residual(a + h, b, &rel);
        let fb = relation_residual(a, b + h, &rel);
        let j = [[(fa[0] - f[0]) / h, (fb[0] - f[0]) / h], [(fa[1] - f[1]) / h, (fb[1] - f[1]) / h]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if !det.is_finite() || det.norm() < 1e-14 {
            return None;
        }
        let da = (-f[0] * j[1][1] + f[1] * j[0][1]) / det;
        let db = (-f[1] * j[0][0] + f[0] * j[1][0]) / det;
        a += da;
        b += db;
        if !a.is_finite() || !b.is_finite() || a.norm() > 10.0 || b.norm() > 10.0 {
            return None;
        }
        if da.norm() + db.norm() < 1e-15 {
            break;
        }
    }
    let p = CubicMap::new(a, b);
    let [w1, w2] = p.critical_points();
    let ok = relation_residual(a, b, &rel).iter().all(|r| r.norm() < 1e-12)
        && rel[0].exact(&p, w1)
        && rel[1].exact(&p, w2)
        && (w1 - w2).norm() > 1e-6;
    ok.then_some(p)
}

/// Largest residual of the relations at `p`.
pub fn relation_error(p: &CubicMap, rel: [CriticalRelation; 2]) -> f64 {
    let f = relation_residual(p.a, p.b, &rel);
    f[0].norm().max(f[1].norm())
}

/// `omega_1` reaches a fixed point after two steps, `omega_2` has period 2.
pub const CHEBYSHEV_BASILICA: [CriticalRelation; 2] =
    [CriticalRelation { preperiod: 2, period: 1 }, CriticalRelation { preperiod: 0, period: 2 }];

/// Distinct solutions of the relations reached from a grid of seeds over
/// `|Re|, |Im| <= 1` in `a` and `<= 1.5` in `b`, in a deterministic order.
pub fn solve_critical_relations_grid(rel: [CriticalRelation; 2], per_axis: usize) -> Vec<CubicMap> {
    let grid = |lo: f64, hi: f64| -> Vec<f64> {
        (0..per_axis).map(|j| lo + (hi - lo) * j as f64 / (per_axis - 1) as f64).collect()
    };
    let (ga, gb) = (grid(-1.0, 1.0), grid(-1.5, 1.5));
    let mut out: Vec<CubicMap> = Vec::new();
    for &ar in &ga {
        for &ai in &ga {
            for &br in &gb {
                for &bi in &gb {
                    let seed = CubicMap::new(C::new(ar, ai), C::new(br, bi));
                    let Some(m) = solve_critical_relations(&seed, rel) else { continue };
                    if out.iter().all(|o| (o.a - m.a).norm() + (o.b - m.b).norm() > 1e-8) {
                        out.push(m);
                    }
                }
            }
        }
    }
    out.sort_by(|m, n| {
        (m.a.re, m.a.im, m.b.re, m.b.im).partial_cmp(&(n.a.re, n.a.im, n.b.re, n.b.im)).expect("finite")
    });
    out
}

/// Non-degenerate solutions of the Chebyshev-basilica relations.
pub fn chebyshev_basilica_candidates() -> Vec<CubicMap> {
    solve_critical_relations_grid(CHEBYSHEV_BASILICA, 7)
}

/// The cubic whose critical point `omega_1` is mapped by two iterates to a
/// repelling fixed point while `omega_2` has period 2, and at which the rays
/// of angles 1/4 and 5/8 co-land at a fixed point. Of the two such
/// solutions (exchanged by `z -> -conj(z)`) this is the one where the rays
/// 2/9 and 8/9 land at `omega_1`.
pub fn make_chebyshev_basilica() -> Result<CubicMap> {
    let opts = RayOptions::default();
    for m in chebyshev_basilica_candidates() {
        let CoLandVerdict::CoLand { point, .. } = coland_test(&m, &Angle::frac(1, 4), &Angle::frac(5, 8), 2, &opts)
        else {
            continue;
        };
        if (m.eval(point) - point).norm() >= COLAND_TOL {
            continue;
        }
        // the rays 2/9 and 8/9 land together at omega_1
        if let CoLandVerdict::CoLand { point, .. } = coland_test(&m, &Angle::frac(2, 9), &Angle::frac(8, 9), 1, &opts) {
            if point.norm() < COLAND_TOL {
                return Ok(m);
            }
        }
    }
    Err(Error::NoConvergence("no solution with a merged fixed landing point".into()))
}
