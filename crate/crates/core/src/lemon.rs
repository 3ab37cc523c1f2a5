//! The lemon family `P_a(z) = z^3 + 3 a z^2`: the internal Bottcher
//! coordinate of the free critical point, the boundary of the main
//! hyperbolic component `H_0`, parameter rays and centers.

use std::f64::consts::TAU;

use crate::angle::Angle;
use crate::cubic::{coland_test, newton, trace_generic, CoLandVerdict, CubicMap, RayOptions, RayTrace, C};
use crate::error::{Error, Result};
use crate::simulating::simulating_pair;

const DEEP: f64 = 0.02;
const BASIN_MAX_ITER: usize = 5000;
const EXTRA_LEVELS: usize = 8;

fn cis(t: f64) -> C {
    C::from_polar(1.0, TAU * t)
}

fn deep_radius(a: C) -> f64 {
    let s = 3.0 * a.norm();
    DEEP * s.min(1.0 / s)
}

/// Internal Bottcher coordinate near the superattracting fixed point 0,
/// normalized by `beta(P(z)) = beta(z)^2` and `beta'(0) = 3a`.
fn beta_deep(p: &CubicMap, z: C) -> C {
    let s = 3.0 * p.a;
    let mut acc = s * z;
    let mut w = z;
    let mut e = 0.5;
    for _ in 0..64 {
        let f = w / s;
        if f.norm() < 1e-18 {
            break;
        }
        acc *= ((1.0 + f).ln() * e).exp();
        w = p.eval(w);
        e *= 0.5;
    }
    acc
}

/// Follows `beta_a` along the orbit of `omega_2 = -2a` while `a` moves,
/// resolving square-root branches by continuity.
#[derive(Clone, Debug)]
struct KappaTracker {
    a: C,
    chain: Vec<C>,
}

impl KappaTracker {
    fn orbit(a: C) -> Option<Vec<C>> {
        let p = CubicMap::lemon(a);
        let r = deep_radius(a);
        let mut z = -2.0 * a;
        let mut out = vec![z];
        for _ in 0..BASIN_MAX_ITER {
            if z.norm() < r {
                for _ in 0..EXTRA_LEVELS {
                    z = p.eval(z);
                    out.push(z);
                }
                return Some(out);
            }
            z = p.eval(z);
            if !z.is_finite() || z.norm() > 1e6 {
                return None;
            }
            out.push(z);
        }
        None
    }

    /// Starts at a parameter small enough that the segment from 0 to
    /// `omega_2` lies in the domain of `beta`.
    fn start(a: C) -> Option<KappaTracker> {
        let p = CubicMap::lemon(a);
        let orbit = KappaTracker::orbit(a)?;
        let n = orbit.len() - EXTRA_LEVELS;
        if n != 2 {
            return None;
        }
        let mut chain = vec![C::new(0.0, 0.0); orbit.len()];
        for j in 1..orbit.len() {
            chain[j] = beta_deep(&p, orbit[j]);
        }
        let (z0, z1) = (orbit[0], orbit[1]);
        chain[0] = 3.0 * a * z0 / 3f64.sqrt() * (chain[1] / (3.0 * a * z1)).sqrt();
        Some(KappaTracker { a, chain })
    }

    fn try_step(&self, a: C) -> Option<KappaTracker> {
        let p = CubicMap::lemon(a);
        let orbit = KappaTracker::orbit(a)?;
        let n = orbit.len() - EXTRA_LEVELS - 1;
        let mut chain = vec![C::new(0.0, 0.0); orbit.len()];
        for j in n..orbit.len() {
            chain[j] = beta_deep(&p, orbit[j]);
        }
        for j in (0..n).rev() {
            let r = chain[j + 1].sqrt();
            let reference = *self.chain.get(j)?;
            let (d1, d2) = ((r - reference).norm(), (r + reference).norm());
            if d1.min(d2) > 0.25 * d1.max(d2) {
                return None;
            }
            chain[j] = if d1 <= d2 { r } else { -r };
        }
        Some(KappaTracker { a, chain })
    }

    fn move_to(&mut self, target: C) -> Result<()> {
        let from = self.a;
        let mut done = 0.0f64;
        let mut step = 1.0 / 16.0;
        while done < 1.0 {
            let next = (done + step).min(1.0);
            match self.try_step(from + (target - from) * next) {
                Some(t) => {
                    *self = t;
                    done = next;
                    step = (step * 1.5).min(0.25);
                }
                None => {
                    step *= 0.5;
                    if step < 1e-10 {
                        return Err(Error::NotInBasin);
                    }
                }
            }
        }
        Ok(())
    }

    fn kappa(&self) -> C {
        self.chain[0]
    }

    fn from_origin(a: C) -> Result<KappaTracker> {
        let start = if a.norm() > 1e-3 { a * (1e-3 / a.norm()) } else { a };
        let mut t = KappaTracker::start(start).ok_or(Error::NotInBasin)?;
        t.move_to(a)?;
        Ok(t)
    }

    /// Newton in `a` for `kappa(a) = target`, keeping the branch.
    fn solve(&mut self, target: C) -> Result<()> {
        let fail = |m: &str| Error::ContinuationFailure(format!("{m} for kappa = {target}"));
        for _ in 0..60 {
            let k = self.kappa();
            let err = k - target;
            if err.norm() < 1e-13 {
                return Ok(());
            }
            let h = 1e-7 * (1.0 + self.a.norm());
            let mut probe = self.clone();
            probe.move_to(self.a + h).map_err(|_| fail("derivative probe left the basin"))?;
            let dk = (probe.kappa() - k) / h;
            let mut da = -err / dk;
            if da.norm() > 0.05 {
                da *= 0.05 / da.norm();
            }
            let a = self.a + da;
            self.move_to(a).map_err(|_| fail("Newton step left the basin"))?;
        }
        if (self.kappa() - target).norm() < 1e-9 {
            Ok(())
        } else {
            Err(fail("no convergence"))
        }
    }
}

/// `kappa(a) = beta_a(omega_2)` for `a` in `H_0`, reached along the segment
/// from 0.
pub fn internal_kappa(a: C) -> Result<C> {
    if a.norm() < 1e-12 {
        return Ok(C::new(0.0, 0.0));
    }
    let t = KappaTracker::from_origin(a)?;
    let k = t.kappa();
    if k.norm() >= 1.0 {
        return Err(Error::NotInBasin);
    }
    Ok(k)
}

fn parabolic_residual(a: C, z: C, q: usize) -> [C; 2] {
    let p = CubicMap::lemon(a);
    let (w, d) = p.iterate_with_derivative(z, q);
    [w - z, d - 1.0]
}

/// Newton in `(a, z)` for a cycle of period `q` with multiplier 1.
pub fn refine_parabolic(a: C, z: C, q: usize) -> Option<(C, C)> {
    let (mut a, mut z) = (a, z);
    for _ in 0..60 {
        let f = parabolic_residual(a, z, q);
        let h = 1e-7;
        let fa = parabolic_residual(a + h, z, q);
        let fz = parabolic_residual(a, z + h, q);
        let j = [[(fa[0] - f[0]) / h, (fz[0] - f[0]) / h], [(fa[1] - f[1]) / h, (fz[1] - f[1]) / h]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.norm() == 0.0 || !det.is_finite() {
            return None;
        }
        let da = (-f[0] * j[1][1] + f[1] * j[0][1]) / det;
        let dz = (-f[1] * j[0][0] + f[0] * j[1][0]) / det;
        a += da;
        z += dz;
        if da.norm() + dz.norm() < 1e-15 * (1.0 + a.norm() + z.norm()) {
            break;
        }
    }
    let f = parabolic_residual(a, z, q);
    (f[0].norm() < 1e-12 && f[1].norm() < 1e-10).then_some((a, z))
}

/// The cycle of period `q` whose multiplier is closest to 1, seeded from
/// the orbit of `omega_2`.
fn near_parabolic_cycle(a: C, q: usize) -> Option<(C, C)> {
    let p = CubicMap::lemon(a);
    let mut z = -2.0 * a;
    let mut best: Option<(C, C)> = None;
    for _ in 0..200 {
        if let Ok(pp) = crate::cubic::find_periodic(&p, q, z) {
            let exact = (1..q).filter(|d| q.is_multiple_of(*d)).all(|d| (p.iterate(pp.z, d) - pp.z).norm() > 1e-8);
            let better = best.is_none_or(|(_, m)| (pp.multiplier - 1.0).norm() < (m - 1.0).norm());
            if exact && pp.z.norm() > 1e-6 && better {
                best = Some((pp.z, pp.multiplier));
            }
        }
        z = p.eval(z);
    }
    best
}

/// The point of `dH_0` where `kappa` has angle `t`: the lift of
/// `t -> e^{2 pi i t}` starting at `a(0) = -2i/3`, obtained by continuing
/// `kappa(a) = r e^{2 pi i t}` up to `r = 1 - resolution`. For periodic `t`
/// the point is then refined to the parabolic parameter.
pub fn boundary_param(t: &Angle, resolution: f64) -> Result<C> {
    let r0 = 0.5;
    let y = (r0 / (2.0 * 3f64.sqrt())).sqrt();
    let mut tr = KappaTracker::from_origin(C::new(0.0, -y))?;
    tr.solve(C::new(r0, 0.0))?;
    let tt = t.to_f64();
    let turns = (tt * 64.0).ceil().max(1.0) as usize;
    for j in 1..=turns {
        tr.solve(r0 * cis(tt * j as f64 / turns as f64))?;
    }
    let mut gap = 1.0 - r0;
    while gap > resolution {
        gap = (gap * 0.7).max(resolution);
        tr.solve((1.0 - gap) * cis(tt))?;
    }
    let approx = tr.a;
    let Ok(q) = t.period(2) else { return Ok(approx) };
    if let Some((z, _)) = near_parabolic_cycle(approx, q) {
        if let Some((a, _)) = refine_parabolic(approx, z, q) {
            if (a - approx).norm() < 0.05 {
                return Ok(a);
            }
        }
    }
    Ok(approx)
}

/// Parameter ray of angle `xi`: the points `a` whose co-critical point `a`
/// has Bottcher coordinate `e^{s + 2 pi i xi}`.
pub fn param_ray(xi: &Angle, opts: &RayOptions) -> RayTrace {
    let scale = 4f64.powf(1.0 / 3.0);
    trace_generic(
        xi,
        opts,
        1,
        |w| w / scale,
        |n, w, seed| {
            newton(opts.max_newton, seed, |a| {
                let (mut z, mut dz) = (a, C::new(1.0, 0.0));
                for _ in 0..n {
                    dz = (3.0 * z * z + 6.0 * a * z) * dz + 3.0 * z * z;
                    z = z * z * (z + 3.0 * a);
                }
                (z + a - w, dz + 1.0)
            })
        },
    )
}

/// Outcome of testing whether `a` or `-a` lies in the limb `L_0(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LimbMembership {
    pub direct: CoLandVerdict,
    pub negated: CoLandVerdict,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representative {
    Direct,
    Negated,
}

impl LimbMembership {
    /// Which of `a`, `-a` has the rays `x_k`, `y_k` co-landing.
    pub fn representative(&self) -> Option<Representative> {
        if self.direct.is_coland() {
            Some(Representative::Direct)
        } else if self.negated.is_coland() {
            Some(Representative::Negated)
        } else {
            None
        }
    }
}

/// Tests co-landing of `R(x_k)` and `R(y_k)` for `P_a` and `P_{-a}`.
pub fn is_in_limb(a: C, t: &Angle, opts: &RayOptions) -> Result<LimbMembership> {
    let sp = simulating_pair(t)?;
    let q = sp.q();
    let test = |a: C| coland_test(&CubicMap::lemon(a), sp.xk(), sp.yk(), q, opts);
    Ok(LimbMembership { direct: test(a), negated: test(-a) })
}

fn center_residual(a: C, q: usize) -> (C, C) {
    let (mut z, mut dz) = (-2.0 * a, C::new(-2.0, 0.0));
    for _ in 0..q {
        dz = (3.0 * z * z + 6.0 * a * z) * dz + 3.0 * z * z;
        z = z * z * (z + 3.0 * a);
    }
    (z + 2.0 * a, dz + 2.0)
}

fn exact_center_period(a: C, q: usize) -> bool {
    let p = CubicMap::lemon(a);
    let w = -2.0 * a;
    a.norm() > 1e-9 && (1..q).filter(|d| q.is_multiple_of(*d)).all(|d| (p.iterate(w, d) - w).norm() > 1e-8)
}

/// Center of the component of `L_0(t)` where `omega_2` has period `q(t)`,
/// by Newton on `P_a^q(-2a) = -2a`. A center found in `-L_0(t)` is
/// normalized by `a -> -a`.
pub fn find_center(t: &Angle, seed: C) -> Result<C> {
    let q = t.period(2)?;
    let a = newton(200, seed, |a| center_residual(a, q))
        .ok_or_else(|| Error::NoConvergence(format!("center of period {q} from {seed}")))?;
    if !exact_center_period(a, q) {
        return Err(Error::NoConvergence(format!("Newton reached a center of lower period at {a}")));
    }
    let m = is_in_limb(a, t, &RayOptions::default())?;
    match m.representative() {
        Some(Representative::Direct) => Ok(a),
        Some(Representative::Negated) => Ok(-a),
        None => Err(Error::WrongLimb(t.to_string())),
    }
}

/// All parameters where `omega_2` has exact period `q`, by simultaneous
/// (Aberth) iteration on the even polynomial `(P_a^q(-2a) + 2a)/a` in `u = a^2`.
pub fn centers(q: usize) -> Vec<C> {
    let m = (3usize.pow(q as u32) - 1) / 2;
    let g = |u: C| -> (C, C) {
        let a = u.sqrt();
        let (f, df) = center_residual(a, q);
        let val = f / a;
        let dval = (df / a - f / (a * a)) / (2.0 * a);
        (val, dval)
    };
    let mut roots: Vec<C> = (0..m).map(|j| C::from_polar(0.7, TAU * (j as f64 + 0.25) / m as f64)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..m {
            let (v, d) = g(roots[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d;
            let sum: C = (0..m).filter(|&j| j != i).map(|j| 1.0 / (roots[i] - roots[j])).sum();
            let w = ratio / (1.0 - ratio * sum);
            if w.is_finite() {
                roots[i] -= w;
                moved = moved.max(w.norm());
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    let mut out = Vec::new();
    for u in roots {
        let a = u.sqrt();
        let a = newton(50, a, |a| center_residual(a, q)).unwrap_or(a);
        for c in [a, -a] {
            if exact_center_period(c, q)
                && center_residual(c, q).0.norm() < 1e-9
                && out.iter().all(|o: &C| (o - c).norm() > 1e-8)
            {
                out.push(c);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kappa_small_parameters() {
        let a = C::new(0.01, 0.02);
        let k = internal_kappa(a).unwrap();
        let approx = -2.0 * 3f64.sqrt() * a * a;
        assert!((k - approx).norm() < 1e-2 * approx.norm());
        assert!((internal_kappa(-a).unwrap() - k).norm() < 1e-12);
    }

    #[test]
    fn period_one_center() {
        let a = find_center(&Angle::zero(), C::new(0.0, -0.7)).unwrap();
        assert!((a - C::new(0.0, -0.5f64.sqrt())).norm() < 1e-12);
    }
}
