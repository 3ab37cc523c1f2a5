use std::collections::BTreeSet;

use limbs_core::angle::{forward_orbit, Angle};
use limbs_core::lamination::{m_partner, partner_table, predict_merging};
use limbs_core::perm::{all_orbits, count_realizations, dynamically_reducible, CyclicPerm, EnumerationLimits, Perm};
use limbs_core::simulating::{is_m2_combinatorics, project_angle, simulating_pair, Projection};
use num_bigint::BigUint;
use proptest::prelude::*;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn mobius(n: u64) -> i64 {
    let (mut n, mut m, mut p) = (n, 1i64, 2u64);
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            m = -m;
        }
        p += 1;
    }
    if n > 1 {
        -m
    } else {
        m
    }
}

/// Number of points of exact period `q` under `x -> k x` on the circle.
fn exact_period_points(k: u64, q: u64) -> u64 {
    let s: i64 = (1..=q).filter(|d| q.is_multiple_of(*d)).map(|d| mobius(q / d) * (k.pow(d as u32) as i64 - 1)).sum();
    s as u64
}

/// Cycles of `x -> k x` on `Z / (k^q - 1)` of exact length `q`, each as the
/// sorted numerators together with the image labels.
fn naive_cycles(k: u64, q: usize) -> Vec<(Vec<u64>, Vec<usize>)> {
    let n = k.pow(q as u32) - 1;
    let mut done = BTreeSet::new();
    let mut out = Vec::new();
    for p in 0..n {
        if done.contains(&p) {
            continue;
        }
        let mut cyc = vec![p];
        let mut x = p * k % n;
        while x != p {
            cyc.push(x);
            x = x * k % n;
        }
        done.extend(cyc.iter().copied());
        if cyc.len() != q {
            continue;
        }
        let mut sorted = cyc.clone();
        sorted.sort_unstable();
        let img = sorted.iter().map(|&x| sorted.iter().position(|&y| y == x * k % n).unwrap() + 1).collect();
        out.push((sorted, img));
    }
    out
}

fn cyclic_descents(img: &[usize]) -> usize {
    let n = img.len();
    if n == 1 {
        return 1;
    }
    (0..n).filter(|&i| img[i] > img[(i + 1) % n]).count()
}

fn cycle_from_order(order: &[usize]) -> Vec<usize> {
    let mut img = vec![0; order.len()];
    for (i, &x) in order.iter().enumerate() {
        img[x - 1] = order[(i + 1) % order.len()];
    }
    img
}

fn cyclic_perm() -> impl Strategy<Value = Vec<usize>> {
    (1usize..=6).prop_flat_map(|q| Just((1..=q).collect::<Vec<_>>()).prop_shuffle()).prop_map(|o| cycle_from_order(&o))
}

fn periodic_doubling_angles(max_q: usize) -> Vec<Angle> {
    let mut out = Vec::new();
    for q in 2..=max_q {
        for (o, _) in all_orbits(2, q, EnumerationLimits::default()).unwrap() {
            out.extend(o.angles().iter().cloned());
        }
    }
    out
}

proptest! {
    #[test]
    fn angles_reduce_mod_one(p in -10_000i64..10_000, q in 1i64..5_000) {
        let a = Angle::new(p, q).unwrap();
        let r = p.rem_euclid(q) as u64;
        let g = gcd(r, q as u64);
        let (num, den) = if r == 0 { (0, 1) } else { (r / g, q as u64 / g) };
        prop_assert_eq!(a.num(), &BigUint::from(num));
        prop_assert_eq!(a.den(), &BigUint::from(den));
        prop_assert!((a.to_f64() - r as f64 / q as f64).abs() < 1e-12);
    }

    #[test]
    fn multiplication_matches_integers(p in 0u64..1_000, q in 1u64..1_000, k in 1u64..7) {
        let a = Angle::new(p, q).unwrap();
        prop_assert_eq!(a.mul(k), Angle::new(p * k, q).unwrap());
    }

    #[test]
    fn add_sub_and_order(p1 in 0i64..500, q1 in 1i64..500, p2 in 0i64..500, q2 in 1i64..500) {
        let (a, b) = (Angle::new(p1, q1).unwrap(), Angle::new(p2, q2).unwrap());
        prop_assert_eq!(a.add(&b).sub(&b), a.clone());
        let (x, y) = ((p1 % q1) * q2, (p2 % q2) * q1);
        prop_assert_eq!(a.cmp(&b), x.cmp(&y));
        prop_assert_eq!(a.to_string().parse::<Angle>().unwrap(), a);
    }

    #[test]
    fn degree_counts_cyclic_descents(img in cyclic_perm()) {
        let sigma = CyclicPerm::from_images(img.clone()).unwrap();
        prop_assert_eq!(sigma.degree(), cyclic_descents(&img));
        prop_assert_eq!(sigma.to_string().parse::<CyclicPerm>().unwrap(), sigma);
    }

    #[test]
    fn realization_formula_matches_enumeration(img in cyclic_perm()) {
        let sigma = CyclicPerm::from_images(img.clone()).unwrap();
        let q = img.len();
        for k in [2u64, 3] {
            let found = naive_cycles(k, q).iter().filter(|(_, s)| *s == img).count();
            match count_realizations(&sigma, k) {
                Ok(n) => prop_assert_eq!(n, BigUint::from(found)),
                Err(_) => {
                    prop_assert!(cyclic_descents(&img) > k as usize);
                    prop_assert_eq!(found, 0);
                }
            }
        }
    }

    #[test]
    fn projection_semiconjugates_off_the_gaps(i in 0usize..200, p in 0u64..729, n in 0u32..3) {
        let ts = periodic_doubling_angles(5);
        let t = &ts[i % ts.len()];
        let sp = simulating_pair(t).unwrap();
        let theta = Angle::new(p, 729 * 2u64.pow(n)).unwrap();
        let (a, b) = (project_angle(&sp, &theta, 40), project_angle(&sp, &theta.mul(3), 40));
        let inside_gap = theta == *sp.xk() || theta == *sp.yk() || theta.in_open_arc(sp.xk(), sp.yk());
        if let (Some(u), Some(v)) = (a.value(), b.value()) {
            if !inside_gap {
                prop_assert_eq!(u.mul(2), v.clone());
            }
        }
    }

    #[test]
    fn projection_is_monotone(i in 0usize..200, p1 in 0u64..2_000, p2 in 0u64..2_000) {
        let ts = periodic_doubling_angles(5);
        let t = &ts[i % ts.len()];
        let sp = simulating_pair(t).unwrap();
        let (lo, hi) = (p1.min(p2), p1.max(p2));
        let a = project_angle(&sp, &Angle::new(lo, 2_000).unwrap(), 40);
        let b = project_angle(&sp, &Angle::new(hi, 2_000).unwrap(), 40);
        prop_assert!(a.interval().0 <= b.interval().1);
    }
}

#[test]
fn orbit_counts_match_necklace_formula() {
    for (k, max_q) in [(2u64, 10usize), (3, 8)] {
        for q in 1..=max_q {
            let n = all_orbits(k, q, EnumerationLimits::default()).unwrap().len() as u64;
            assert_eq!(n * q as u64, exact_period_points(k, q as u64), "k={k} q={q}");
        }
    }
}

#[test]
fn library_orbits_match_naive_enumeration() {
    for (k, q) in [(2u64, 6usize), (3, 5)] {
        let mut mine: Vec<(Vec<u64>, Vec<usize>)> = all_orbits(k, q, EnumerationLimits::default())
            .unwrap()
            .into_iter()
            .map(|(o, s)| {
                let n = k.pow(q as u32) - 1;
                let nums = o
                    .angles()
                    .iter()
                    .map(|a| {
                        let scale = n / a.den().to_u64_digits().first().copied().unwrap_or(1);
                        a.num().to_u64_digits().first().copied().unwrap_or(0) * scale
                    })
                    .collect();
                (nums, s.images().to_vec())
            })
            .collect();
        let mut naive = naive_cycles(k, q);
        mine.sort();
        naive.sort();
        assert_eq!(mine, naive);
    }
}

#[test]
fn doubling_combinatorics_are_recognised() {
    for q in 1..=7 {
        for (_, sigma) in all_orbits(2, q, EnumerationLimits::default()).unwrap() {
            assert!(is_m2_combinatorics(&sigma), "{sigma}");
        }
    }
}

#[test]
fn projection_collapses_the_gaps() {
    for t in periodic_doubling_angles(6) {
        let sp = simulating_pair(&t).unwrap();
        for i in 1..=sp.q() {
            for theta in [sp.x(i), sp.y(i)] {
                match project_angle(&sp, theta, 40) {
                    Projection::Plateau { level: 0, index, value } => {
                        assert_eq!(index, i);
                        assert_eq!(&value, sp.orbit.get(i));
                    }
                    other => panic!("t={t} i={i}: {other:?}"),
                }
            }
        }
    }
}

#[test]
fn partner_counts_match_period_counts() {
    for n in 2..=10usize {
        let table = partner_table(n).unwrap();
        assert_eq!(2 * table.len() as u64, exact_period_points(2, n as u64), "period {n}");
        for pair in &table {
            assert_eq!(m_partner(&pair.lo).unwrap(), pair.hi);
            assert_eq!(pair.hi.period(2).unwrap(), n);
        }
    }
}

#[test]
fn reduction_certificates_partition_the_orbit() {
    for q in 2..=8 {
        for (_, sigma) in all_orbits(2, q, EnumerationLimits::default()).unwrap() {
            let cert = dynamically_reducible(&sigma);
            if sigma.degree() == 1 {
                // rotation cycles collapse onto a fixed point
                assert_eq!(cert.as_ref().map(|c| c.p), Some(1), "{sigma}");
            }
            if let Some(c) = cert {
                assert_eq!(c.p * c.r, q);
                let mut labels: Vec<usize> = c.cycles.iter().flatten().copied().collect();
                labels.sort_unstable();
                assert_eq!(labels, (1..=q).collect::<Vec<_>>());
                let pred = predict_merging(&sigma).unwrap().expect("reducible");
                assert_eq!(pred.portrait.orbit_period, c.p);
            }
        }
    }
}

#[test]
fn merging_of_the_period_four_satellite() {
    let orbit = forward_orbit(2, &Angle::frac(1, 5)).unwrap();
    assert_eq!(orbit.to_string(), "1/5,2/5,3/5,4/5");
    let sigma: CyclicPerm = "(1243)".parse().unwrap();
    let cert = dynamically_reducible(&sigma).unwrap();
    assert_eq!(sigma.pow(cert.p), Perm::parse_cycles("(14)(23)").unwrap());
}
