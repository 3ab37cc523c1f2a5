//! Numerics for monic centered cubics `P(z) = z^3 + 3 a z^2 + b`.
//!
//! Critical points are `0` and `-2a`; the Bottcher coordinate is
//! `phi(z) = z + a + O(1/z)` near infinity.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::angle::Angle;
use crate::error::{Error, Result};

pub type C = Complex64;

pub const POTENTIAL_TOL: f64 = 1e-9;
pub const ROOT_TOL: f64 = 1e-12;
pub const COLAND_TOL: f64 = 1e-6;
pub const SEPARATION_FLOOR: f64 = 1e-3;
pub const PARABOLIC_TOL: f64 = 1e-4;
const GREEN_ESCAPE: f64 = 1e40;
const GREEN_MAX_ITER: usize = 4000;
const PERIODIC_MAX_ITER: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CubicMap {
    pub a: C,
    pub b: C,
}

impl CubicMap {
    pub fn new(a: C, b: C) -> CubicMap {
        CubicMap { a, b }
    }

    /// The lemon family member `z^3 + 3 a z^2`.
    pub fn lemon(a: C) -> CubicMap {
        CubicMap { a, b: C::new(0.0, 0.0) }
    }

    pub fn eval(&self, z: C) -> C {
        z * z * (z + 3.0 * self.a) + self.b
    }

    pub fn derivative(&self, z: C) -> C {
        3.0 * z * (z + 2.0 * self.a)
    }

    pub fn critical_points(&self) -> [C; 2] {
        [C::new(0.0, 0.0), -2.0 * self.a]
    }

    pub fn critical_values(&self) -> [C; 2] {
        [self.b, 4.0 * self.a * self.a * self.a + self.b]
    }

    /// The points other than `omega_i` with the same image.
    pub fn cocritical_points(&self) -> [C; 2] {
        [-3.0 * self.a, self.a]
    }

    /// The conjugate map under `z -> -z`.
    pub fn negated(&self) -> CubicMap {
        CubicMap { a: -self.a, b: -self.b }
    }

    pub fn iterate(&self, mut z: C, n: usize) -> C {
        for _ in 0..n {
            z = self.eval(z);
        }
        z
    }

    /// `(P^n(z), (P^n)'(z))`.
    pub fn iterate_with_derivative(&self, mut z: C, n: usize) -> (C, C) {
        let mut d = C::new(1.0, 0.0);
        for _ in 0..n {
            d *= self.derivative(z);
            z = self.eval(z);
        }
        (z, d)
    }

    pub fn green(&self, z: C) -> f64 {
        green(self, z)
    }
}

/// Green's function `lim 3^-n log+ |P^n(z)|`, 0 on the filled Julia set.
pub fn green(p: &CubicMap, z: C) -> f64 {
    let mut w = z;
    let mut scale = 1.0;
    for _ in 0..GREEN_MAX_ITER {
        if w.norm() > GREEN_ESCAPE {
            return scale * (w + p.a).norm().ln();
        }
        w = p.eval(w);
        scale /= 3.0;
        if scale == 0.0 {
            break;
        }
    }
    0.0
}

#[derive(Clone, Copy, Debug)]
pub struct RayOptions {
    pub s_start: f64,
    pub s_end: f64,
    pub steps_per_division: usize,
    /// Newton works on `P^n` with `3^n s >= ln_radius`.
    pub ln_radius: f64,
    /// A trace has landed when its last division moved less than this.
    pub landing_tol: f64,
    pub max_newton: usize,
}

impl Default for RayOptions {
    fn default() -> Self {
        RayOptions {
            s_start: 10.0,
            s_end: 1e-6,
            steps_per_division: 24,
            ln_radius: 12.0,
            landing_tol: 1e-2,
            max_newton: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RayStatus {
    Landed,
    MaxStepsReached,
    Broken,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RayPoint {
    pub z: C,
    pub potential: f64,
}

#[derive(Clone, Debug)]
pub struct RayTrace {
    pub angle: Angle,
    pub points: Vec<RayPoint>,
    pub landing: Option<C>,
    pub status: RayStatus,
}

impl RayTrace {
    pub fn tail(&self) -> Option<C> {
        self.points.last().map(|p| p.z)
    }

    /// Distance covered by the last `steps` points.
    pub fn tail_motion(&self, steps: usize) -> f64 {
        let n = self.points.len();
        if n <= steps {
            return f64::INFINITY;
        }
        (self.points[n - 1].z - self.points[n - 1 - steps].z).norm()
    }
}

/// Drives Newton continuation down the potentials `s_start 3^(-j/S)`.
///
/// `solve(n, w, seed)` must return the point near `seed` whose `n`-th image
/// has Bottcher coordinate `w`.
pub(crate) fn trace_generic(
    theta: &Angle,
    opts: &RayOptions,
    min_n: usize,
    init: impl Fn(C) -> C,
    solve: impl Fn(usize, C, C) -> Option<C>,
) -> RayTrace {
    let steps = opts.steps_per_division.max(1);
    let mut multiples: Vec<f64> = vec![theta.to_f64()];
    let mut cur = theta.clone();
    let mut points: Vec<RayPoint> = Vec::new();
    let mut status = RayStatus::MaxStepsReached;
    let mut j = 0usize;
    loop {
        let mut s = opts.s_start * 3f64.powf(-(j as f64) / steps as f64);
        let last = s <= opts.s_end;
        if last {
            s = opts.s_end;
        }
        let mut n = min_n;
        while 3f64.powi(n as i32) * s < opts.ln_radius {
            n += 1;
        }
        while multiples.len() <= n {
            cur = cur.mul(3);
            multiples.push(cur.to_f64());
        }
        let w = C::from_polar((3f64.powi(n as i32) * s).exp(), TAU * multiples[n]);
        let seed = match points.last() {
            Some(p) => p.z,
            None => init(C::from_polar(s.exp(), TAU * multiples[0])),
        };
        let Some(z) = solve(n, w, seed) else {
            status = RayStatus::Broken;
            break;
        };
        if points.len() >= 2 {
            let k = points.len();
            let prev = (points[k - 1].z - points[k - 2].z).norm();
            if (z - points[k - 1].z).norm() > 20.0 * prev + 1e-9 {
                status = RayStatus::Broken;
                break;
            }
        }
        points.push(RayPoint { z, potential: s });
        if last {
            break;
        }
        j += 1;
    }
    let mut landing = None;
    if status != RayStatus::Broken {
        let n = points.len();
        if n > steps && (points[n - 1].z - points[n - 1 - steps].z).norm() < opts.landing_tol {
            status = RayStatus::Landed;
            landing = Some(points[n - 1].z);
        }
    }
    RayTrace { angle: theta.clone(), points, landing, status }
}

pub(crate) fn newton(max: usize, mut z: C, f: impl Fn(C) -> (C, C)) -> Option<C> {
    for _ in 0..max {
        let (v, d) = f(z);
        if !v.is_finite() || !d.is_finite() || d.norm() == 0.0 {
            return None;
        }
        let dz = v / d;
        z -= dz;
        if dz.norm() <= 1e-14 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    let (v, d) = f(z);
    (v / d).norm().lt(&(1e-10 * (1.0 + z.norm()))).then_some(z)
}

/// Traces the dynamic ray of angle `theta` from potential `s_start` down to
/// `s_end`, dividing the potential by 3 every `steps_per_division` points.
pub fn trace_ray(p: &CubicMap, theta: &Angle, opts: &RayOptions) -> RayTrace {
    let a = p.a;
    trace_generic(
        theta,
        opts,
        0,
        |w| w - a,
        |n, w, seed| {
            newton(opts.max_newton, seed, |z| {
                let (v, d) = p.iterate_with_derivative(z, n);
                (v + a - w, d)
            })
        },
    )
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PeriodicPoint {
    pub z: C,
    pub period: usize,
    /// Multiplier of the cycle, `(P^period)'(z)`.
    pub multiplier: C,
}

/// Newton on `P^q(z) - z`.
pub fn find_periodic(p: &CubicMap, q: usize, guess: C) -> Result<PeriodicPoint> {
    let mut z = guess;
    let mut last_f = f64::INFINITY;
    for _ in 0..PERIODIC_MAX_ITER {
        let (w, d) = p.iterate_with_derivative(z, q);
        let f = w - z;
        last_f = f.norm();
        let df = d - 1.0;
        if !f.is_finite() || !df.is_finite() || df.norm() == 0.0 {
            return Err(Error::NoConvergence(format!("period {q} from {guess}")));
        }
        let dz = f / df;
        if last_f <= ROOT_TOL * z.norm().max(1.0) && dz.norm() <= 1e-12 * (1.0 + z.norm()) {
            break;
        }
        z -= dz;
    }
    if last_f > ROOT_TOL * z.norm().max(1.0) {
        return Err(Error::NoConvergence(format!("period {q} from {guess}")));
    }
    let (_, multiplier) = p.iterate_with_derivative(z, q);
    Ok(PeriodicPoint { z, period: q, multiplier })
}

/// Critical points of `P^l` that map onto a critical point of `P` within
/// one step: the critical points themselves and, for `l > 1`, their
/// first preimages.
fn critical_points_of_iterate(p: &CubicMap, l: usize) -> Vec<C> {
    let mut out = p.critical_points().to_vec();
    if l > 1 {
        for c in p.critical_points() {
            // roots of z^3 + 3a z^2 + (b - c)
            let mut roots = Vec::new();
            for k in 0..3 {
                let seed = C::from_polar(1.5, TAU * (k as f64 + 0.1) / 3.0) - p.a;
                if let Some(r) = newton(PERIODIC_MAX_ITER, seed, |z| (p.eval(z) - c, p.derivative(z))) {
                    roots.push(r);
                }
            }
            out.extend(roots);
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct Landing {
    pub trace: RayTrace,
    pub point: C,
    /// Multiplier of the cycle the landing point falls into.
    pub multiplier: C,
}

/// Traces the ray of angle `theta` and refines its landing point: by Newton
/// on `P^q(z) = z` for periodic angles, and for preperiodic angles by
/// solving `P^l(z) = w` where `w` is the landing point of `3^l theta`.
pub fn landing_point(p: &CubicMap, theta: &Angle, opts: &RayOptions) -> Result<Landing> {
    let trace = trace_ray(p, theta, opts);
    if trace.status == RayStatus::Broken {
        return Err(Error::RayFailure(format!("ray {theta} is broken")));
    }
    let tail = trace.tail().ok_or_else(|| Error::RayFailure(format!("ray {theta} is empty")))?;
    let (l, q) = theta.preperiod_period(3);
    if l == 0 {
        let pp = find_periodic(p, q, tail)?;
        return Ok(Landing { trace, point: pp.z, multiplier: pp.multiplier });
    }
    let mut image = theta.clone();
    for _ in 0..l {
        image = image.mul(3);
    }
    let target = landing_point(p, &image, opts)?;
    let w = target.point;
    let z = newton(PERIODIC_MAX_ITER, tail, |z| {
        let (v, d) = p.iterate_with_derivative(z, l);
        (v - w, d)
    })
    .or_else(|| {
        // Newton stalls when the ray lands on a critical point of P^l.
        let reach = (50.0 * trace.tail_motion(opts.steps_per_division)).max(0.05);
        critical_points_of_iterate(p, l)
            .into_iter()
            .find(|&c| (c - tail).norm() < reach && (p.iterate(c, l) - w).norm() < COLAND_TOL)
    })
    .ok_or_else(|| Error::NoConvergence(format!("preimage for ray {theta}")))?;
    Ok(Landing { trace, point: z, multiplier: target.multiplier })
}

#[derive(Clone, Debug, PartialEq)]
pub enum CoLandVerdict {
    CoLand { point: C, multiplier: C },
    Distinct { first: C, second: C },
    Inconclusive(String),
}

impl CoLandVerdict {
    pub fn is_coland(&self) -> bool {
        matches!(self, CoLandVerdict::CoLand { .. })
    }
}

/// Decides whether the rays of angles `theta1` and `theta2` land at the same
/// point. `q` is the period used for periodic angles.
pub fn coland_test(p: &CubicMap, theta1: &Angle, theta2: &Angle, q: usize, opts: &RayOptions) -> CoLandVerdict {
    let land = |t: &Angle| -> Result<Landing> {
        if t.preperiod_period(3).0 == 0 {
            let trace = trace_ray(p, t, opts);
            if trace.status == RayStatus::Broken {
                return Err(Error::RayFailure(format!("ray {t} is broken")));
            }
            let tail = trace.tail().ok_or_else(|| Error::RayFailure(format!("ray {t} is empty")))?;
            let pp = find_periodic(p, q, tail)?;
            Ok(Landing { trace, point: pp.z, multiplier: pp.multiplier })
        } else {
            landing_point(p, t, opts)
        }
    };
    let (l1, l2) = match (land(theta1), land(theta2)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return CoLandVerdict::Inconclusive(e.to_string()),
    };
    for l in [&l1, &l2] {
        let tail = l.trace.tail().expect("nonempty");
        let reach = (50.0 * l.trace.tail_motion(opts.steps_per_division)).max(0.05);
        if (l.point - tail).norm() > reach {
            return CoLandVerdict::Inconclusive(format!("refined point for ray {} left the ray tail", l.trace.angle));
        }
    }
    let d = (l1.point - l2.point).norm();
    if d < COLAND_TOL {
        if (l1.multiplier - 1.0).norm() < PARABOLIC_TOL {
            return CoLandVerdict::Inconclusive("parabolic landing point".into());
        }
        CoLandVerdict::CoLand { point: l1.point, multiplier: l1.multiplier }
    } else if d > SEPARATION_FLOOR {
        CoLandVerdict::Distinct { first: l1.point, second: l2.point }
    } else {
        CoLandVerdict::Inconclusive(format!("landing points {d:e} apart"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct YoccozCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Yoccoz inequality for a repelling fixed point of a degree `degree` map
/// with `n_cycles` cycles of rays of combinatorial rotation number `rot`:
/// `|L - 2 pi i p/q|^2 / Re L <= 2 log d / (N q)`, `L` the branch of
/// `log lambda` closest to `2 pi i p/q`. For a period-`k` point of a degree
/// `d` polynomial pass `degree = d^k`.
pub fn yoccoz_check(lambda: C, rot: &Angle, n_cycles: usize, degree: f64, slack: f64) -> Result<YoccozCheck> {
    if lambda.norm() <= 1.0 {
        return Err(Error::NonRepelling(lambda.norm()));
    }
    let q = rot.den().to_string().parse::<f64>().unwrap_or(f64::INFINITY);
    let target = TAU * rot.to_f64();
    let mut l = lambda.ln();
    let k = ((target - l.im) / TAU).round();
    l.im += k * TAU;
    let off = C::new(l.re, l.im - target);
    let lhs = off.norm_sqr() / l.re;
    let rhs = 2.0 * degree.ln() / (n_cycles as f64 * q);
    Ok(YoccozCheck { lhs, rhs, holds: lhs <= rhs * (1.0 + slack) })
}

/// A normal form `P_{a,b}` conjugate to a monic cubic by `z = w + shift`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalForm {
    pub map: CubicMap,
    pub shift: C,
}

/// Conjugates `z^3 + c2 z^2 + c1 z + c0` by a translation moving a critical
/// point to 0. Each critical point gives one marking.
pub fn to_normal_form(c2: C, c1: C, c0: C) -> Vec<NormalForm> {
    let f = |z: C| ((z + c2) * z + c1) * z + c0;
    let disc = (c2 * c2 - 3.0 * c1).sqrt();
    let roots = [(-c2 + disc) / 3.0, (-c2 - disc) / 3.0];
    let scale = 1.0 + c2.norm() + c1.norm().sqrt();
    let count = if disc.norm() <= 1e-14 * scale { 1 } else { 2 };
    roots[..count]
        .iter()
        .map(|&h| NormalForm { map: CubicMap::new((3.0 * h + c2) / 3.0, f(h) - h), shift: h })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn green_of_z_cubed() {
        let p = CubicMap::new(c(0.0, 0.0), c(0.0, 0.0));
        assert!((green(&p, c(2.0, 0.0)) - 2f64.ln()).abs() < 1e-12);
        assert_eq!(green(&p, c(0.5, 0.0)), 0.0);
    }

    #[test]
    fn rays_of_z_cubed() {
        let p = CubicMap::new(c(0.0, 0.0), c(0.0, 0.0));
        let v = coland_test(&p, &Angle::zero(), &Angle::half(), 1, &RayOptions::default());
        match v {
            CoLandVerdict::Distinct { first, second } => {
                assert!((first - 1.0).norm() < 1e-9);
                assert!((second + 1.0).norm() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn yoccoz_boundary() {
        let d = 3f64;
        let bound = 2.0 * d.ln() / 2.0;
        let on = yoccoz_check(c(bound.exp(), 0.0), &Angle::zero(), 2, d, 1e-9).unwrap();
        assert!(on.holds);
        let off = yoccoz_check(c((5.0 * bound).exp(), 0.0), &Angle::zero(), 2, d, 1e-9).unwrap();
        assert!(!off.holds);
        assert!(matches!(yoccoz_check(c(0.5, 0.0), &Angle::zero(), 2, d, 0.0), Err(Error::NonRepelling(_))));
    }

    #[test]
    fn normal_forms() {
        let nf = to_normal_form(c(0.0, 0.0), c(0.0, 0.0), c(0.3, 0.1));
        assert_eq!(nf.len(), 1);
        assert_eq!(nf[0].map, CubicMap::new(c(0.0, 0.0), c(0.3, 0.1)));
        let (a, b) = (c(0.2, -0.4), c(0.1, 0.7));
        let nf = to_normal_form(3.0 * a, c(0.0, 0.0), b);
        assert_eq!(nf.len(), 2);
        assert!(nf.iter().any(|n| (n.map.a - a).norm() < 1e-15 && (n.map.b - b).norm() < 1e-15));
    }
}
