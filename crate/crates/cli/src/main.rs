//! `limbs`: command line access to the orbit combinatorics, ray tracing,
//! lemon-family numerics, verification suites and renderers.
//!
//! Output is line oriented: one record per line, each a space separated
//! list of `key=value` fields or bare words. `--parse-check` validates such
//! records read from stdin.

mod records;

use std::io::{self, BufRead};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use limbs_core::angle::Angle;
use limbs_core::cubic::{coland_test, trace_ray, CoLandVerdict, CubicMap, RayOptions, RayTrace, C};
use limbs_core::lamination::{m_partner, partner_table, portrait_for_limb, predict_merging, third_cycle, PartnerPair};
use limbs_core::lemon;
use limbs_core::perm::{all_orbits, count_realizations, enumerate_realizations, CyclicPerm, EnumerationLimits};
use limbs_core::render::{self, Palette, Window};
use limbs_core::renorm::{self, build_wakes, classify_coland_orbit, lren_membership};
use limbs_core::simulating::{realizations_ordered, simulating_pair};
use limbs_core::verify;
use limbs_core::{Error, Result};

use records::{fmt_c, parse_angle, parse_complex, parse_pair, parse_res};

#[derive(Parser, Debug)]
#[command(name = "limbs", version, about = "Lemon limbs of cubic polynomials")]
struct Cli {
    /// Read records from stdin and check that each one parses.
    #[arg(long, global = true)]
    parse_check: bool,
    /// Cap on brute-force orbit enumeration, as a number of candidates.
    #[arg(long, global = true, default_value_t = EnumerationLimits::default().max_candidates)]
    max_candidates: u64,
    #[command(subcommand)]
    cmd: Option<Cmd>,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Enumerate the cycles of exact period q under z -> kz.
    Orbits {
        #[arg(long)]
        k: u64,
        #[arg(long)]
        q: usize,
    },
    /// Simulating pair of a doubling-periodic angle.
    Simulate {
        #[arg(long, value_parser = parse_angle)]
        t: Angle,
        /// Also list every tripling realization O_0 .. O_q.
        #[arg(long)]
        realizations: bool,
    },
    /// Count or list the realizations of a cyclic permutation.
    Realize {
        #[arg(long)]
        sigma: String,
        #[arg(long, default_value_t = 3)]
        k: u64,
        #[arg(long)]
        count: bool,
    },
    /// Partner pairs of a period, or the partner of an angle.
    Partners {
        #[arg(long, conflicts_with = "t", required_unless_present = "t")]
        period: Option<usize>,
        #[arg(long, value_parser = parse_angle)]
        t: Option<Angle>,
    },
    /// Orbit portrait of the doubling cycle of t for a limb "lo,hi".
    Portrait {
        #[arg(long, value_parser = parse_angle)]
        t: Angle,
        #[arg(long, value_parser = parse_pair)]
        limb: (Angle, Angle),
    },
    /// Merging prediction for a combinatorics.
    Reduce {
        #[arg(long)]
        sigma: String,
    },
    /// The third tripling cycle sharing the landing points.
    ThirdCycle {
        #[arg(long, value_parser = parse_angle)]
        t: Angle,
        #[arg(long, value_parser = parse_pair)]
        limb: (Angle, Angle),
    },
    /// Trace a dynamic ray of P(z) = z^3 + 3a z^2 + b.
    TraceRay {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = parse_angle)]
        angle: Angle,
        #[command(flatten)]
        ray: RayArgs,
    },
    /// Decide whether two dynamic rays land together.
    Coland {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = parse_pair)]
        angles: (Angle, Angle),
        /// Period used to refine periodic landing points.
        #[arg(long)]
        period: usize,
        #[command(flatten)]
        ray: RayArgs,
    },
    /// The lemon family P_a(z) = z^3 + 3a z^2.
    #[command(subcommand)]
    Lemon(LemonCmd),
    /// Verification suites.
    #[command(subcommand)]
    Verify(VerifyCmd),
    /// Named example cubics.
    #[command(subcommand)]
    Examples(ExampleCmd),
    /// Write PPM images.
    #[command(subcommand)]
    Render(RenderCmd),
}

#[derive(Args, Debug)]
struct MapArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
    a: C,
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
    b: C,
}

impl MapArgs {
    fn map(&self) -> CubicMap {
        CubicMap::new(self.a, self.b)
    }
}

#[derive(Args, Debug)]
struct RayArgs {
    #[arg(long)]
    s_end: Option<f64>,
    #[arg(long)]
    steps_per_division: Option<usize>,
    /// Print every traced point.
    #[arg(long)]
    points: bool,
}

impl RayArgs {
    fn options(&self) -> RayOptions {
        let mut o = RayOptions::default();
        if let Some(s) = self.s_end {
            o.s_end = s;
        }
        if let Some(n) = self.steps_per_division {
            o.steps_per_division = n;
        }
        o
    }
}

#[derive(Subcommand, Debug)]
enum LemonCmd {
    /// Point a(t) of the boundary of the main hyperbolic component.
    Boundary {
        #[arg(long, value_parser = parse_angle)]
        t: Angle,
        #[arg(long, default_value_t = 1e-6)]
        resolution: f64,
    },
    /// Parameter ray of an angle.
    Ray {
        #[arg(long, value_parser = parse_angle)]
        angle: Angle,
        #[command(flatten)]
        ray: RayArgs,
    },
    /// Center in the limb of t by Newton from a seed.
    Center {
        #[arg(long, value_parser = parse_angle)]
        t: Angle,
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        seed: C,
    },
    /// All parameters where the free critical point has exact period q.
    Centers {
        #[arg(long)]
        q: usize,
    },
    /// Internal Bottcher coordinate of the free critical point.
    Kappa {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: C,
    },
    /// Test whether a or -a lies in the limb of t.
    InLimb {
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        a: C,
        #[arg(long, value_parser = parse_angle)]
        t: Angle,
    },
}

#[derive(Args, Debug)]
struct SuiteArgs {
    #[arg(long, default_value_t = 6)]
    max_period: usize,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    RealizeCounts(SuiteArgs),
    Interlace(SuiteArgs),
    Nothird(SuiteArgs),
    Invol(SuiteArgs),
    PartnerTables(SuiteArgs),
    Yoccoz(SuiteArgs),
    All(SuiteArgs),
    /// Membership in the main renormalization locus of a limb.
    Lren {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = parse_angle)]
        t: Angle,
        #[arg(long, default_value_t = 100)]
        n: usize,
    },
    /// Landing orbit of the simulating rays: period, merging, multiplier.
    Orbit {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, value_parser = parse_angle)]
        t: Angle,
    },
}

#[derive(Subcommand, Debug)]
enum ExampleCmd {
    /// The cubic intertwining z^2 - 2 and z^2 - 1.
    ChebBasilica,
}

#[derive(Args, Debug)]
struct ViewArgs {
    #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0,0")]
    center: C,
    #[arg(long, default_value_t = 1.5)]
    half_width: f64,
    #[arg(long, value_parser = parse_res, default_value = "400x400")]
    res: (usize, usize),
    #[arg(long)]
    out: PathBuf,
    /// Comma separated ray angles to overlay.
    #[arg(long, value_delimiter = ',', value_parser = parse_angle)]
    rays: Vec<Angle>,
    /// Worker threads for the pixel pass.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum RenderCmd {
    Julia {
        #[command(flatten)]
        map: MapArgs,
        #[command(flatten)]
        view: ViewArgs,
    },
    Param {
        #[command(flatten)]
        view: ViewArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.parse_check {
        return parse_check();
    }
    let Some(cmd) = cli.cmd else {
        eprintln!("error: a subcommand is required (see --help)");
        return ExitCode::from(2);
    };
    let limits = EnumerationLimits { max_candidates: cli.max_candidates };
    match run(cmd, limits) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn parse_check() -> ExitCode {
    let mut n = 0;
    for (i, line) in io::stdin().lock().lines().enumerate() {
        let line = match line {
            Ok(l) => l,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(1);
            }
        };
        if let Err(why) = records::check_record(&line) {
            eprintln!("error: line {}: {why}: {line}", i + 1);
            return ExitCode::from(1);
        }
        n += 1;
    }
    println!("parse_check=ok lines={n}");
    ExitCode::SUCCESS
}

fn print_trace(tr: &RayTrace, points: bool) {
    if points {
        for p in &tr.points {
            println!("z={} potential={:e}", fmt_c(p.z), p.potential);
        }
    }
    let status = format!("{:?}", tr.status).to_lowercase();
    let tail = tr.tail().map_or("none".to_string(), fmt_c);
    let landing = tr.landing.map_or("none".to_string(), fmt_c);
    println!("angle={} status={status} points={} tail={tail} landing={landing}", tr.angle, tr.points.len());
}

fn print_verdict(v: &CoLandVerdict) {
    match v {
        CoLandVerdict::CoLand { point, multiplier } => {
            println!("verdict=coland point={} multiplier={}", fmt_c(*point), fmt_c(*multiplier))
        }
        CoLandVerdict::Distinct { first, second } => {
            println!("verdict=distinct first={} second={}", fmt_c(*first), fmt_c(*second))
        }
        CoLandVerdict::Inconclusive(why) => println!("verdict=inconclusive reason={}", records::word(why)),
    }
}

fn report(r: &verify::SuiteReport) -> bool {
    for f in &r.failures {
        println!("failure suite={} detail={}", r.name, records::word(f));
    }
    println!("{r}");
    r.ok()
}

fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

fn run(cmd: Cmd, limits: EnumerationLimits) -> Result<ExitCode> {
    match cmd {
        Cmd::Orbits { k, q } => {
            for (o, s) in all_orbits(k, q, limits)? {
                let rot = s.rotation_number().map_or("none".to_string(), |r| r.to_string());
                println!(
                    "orbit={o} sigma={s} degree={} rotation={rot} below_half={}",
                    s.degree(),
                    o.count_below_half()
                );
            }
        }
        Cmd::Simulate { t, realizations } => {
            let sp = simulating_pair(&t)?;
            println!("{sp}");
            if realizations {
                for (j, o) in realizations_ordered(&sp.sigma, limits)?.iter().enumerate() {
                    println!("realization={j} orbit={o}");
                }
            }
        }
        Cmd::Realize { sigma, k, count } => {
            let s = CyclicPerm::parse(&sigma)?;
            if count {
                println!("{}", count_realizations(&s, k)?);
            } else {
                for o in enumerate_realizations(&s, k, limits)? {
                    println!("orbit={o} below_half={}", o.count_below_half());
                }
            }
        }
        Cmd::Partners { period, t } => {
            if let Some(t) = t {
                println!("t={t} partner={}", m_partner(&t)?);
            } else if let Some(n) = period {
                for p in partner_table(n)? {
                    println!("lo={} hi={}", p.lo, p.hi);
                }
            }
        }
        Cmd::Portrait { t, limb } => {
            let orbit = limbs_core::angle::forward_orbit(2, &t)?;
            println!("{}", portrait_for_limb(&orbit, &PartnerPair::new(limb.0, limb.1))?);
        }
        Cmd::Reduce { sigma } => {
            let s = CyclicPerm::parse(&sigma)?;
            match predict_merging(&s)? {
                None => println!("sigma={s} reducible=false"),
                Some(m) => {
                    let c = &m.certificate;
                    let limb = m.limb();
                    println!(
                        "sigma={s} reducible=true p={} r={} rotation={} power={} orbit={} limb={},{} {}",
                        c.p,
                        c.r,
                        c.rotation,
                        s.pow(c.p),
                        m.orbit,
                        limb.lo,
                        limb.hi,
                        m.portrait
                    );
                }
            }
        }
        Cmd::ThirdCycle { t, limb } => {
            println!("{}", third_cycle(&t, &PartnerPair::new(limb.0, limb.1), limits)?);
        }
        Cmd::TraceRay { map, angle, ray } => {
            print_trace(&trace_ray(&map.map(), &angle, &ray.options()), ray.points);
        }
        Cmd::Coland { map, angles: (x, y), period, ray } => {
            print_verdict(&coland_test(&map.map(), &x, &y, period, &ray.options()));
        }
        Cmd::Lemon(l) => run_lemon(l)?,
        Cmd::Verify(v) => return run_verify(v, limits),
        Cmd::Examples(ExampleCmd::ChebBasilica) => {
            let m = renorm::make_chebyshev_basilica()?;
            let res = renorm::relation_error(&m, renorm::CHEBYSHEV_BASILICA);
            println!("a={} b={} residual={res:e}", fmt_c(m.a), fmt_c(m.b));
        }
        Cmd::Render(r) => run_render(r)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn run_lemon(cmd: LemonCmd) -> Result<()> {
    match cmd {
        LemonCmd::Boundary { t, resolution } => {
            println!("t={t} a={}", fmt_c(lemon::boundary_param(&t, resolution)?));
        }
        LemonCmd::Ray { angle, ray } => print_trace(&lemon::param_ray(&angle, &ray.options()), ray.points),
        LemonCmd::Center { t, seed } => println!("t={t} a={}", fmt_c(lemon::find_center(&t, seed)?)),
        LemonCmd::Centers { q } => {
            if q == 0 || q > 8 {
                return Err(Error::InvalidInput(format!("period {q} outside 1..=8")));
            }
            for a in lemon::centers(q) {
                println!("q={q} a={}", fmt_c(a));
            }
        }
        LemonCmd::Kappa { a } => println!("a={} kappa={}", fmt_c(a), fmt_c(lemon::internal_kappa(a)?)),
        LemonCmd::InLimb { a, t } => {
            let m = lemon::is_in_limb(a, &t, &RayOptions::default())?;
            let rep = match m.representative() {
                Some(lemon::Representative::Direct) => "a",
                Some(lemon::Representative::Negated) => "-a",
                None => "none",
            };
            println!("t={t} a={} in_limb={rep}", fmt_c(a));
        }
    }
    Ok(())
}

fn run_verify(cmd: VerifyCmd, limits: EnumerationLimits) -> Result<ExitCode> {
    let ok = match cmd {
        VerifyCmd::RealizeCounts(s) => report(&verify::realize_counts(s.max_period, limits)?),
        VerifyCmd::Interlace(s) => report(&verify::interlace(s.max_period, limits)?),
        VerifyCmd::Nothird(s) => report(&verify::nothird(s.max_period, limits)?),
        VerifyCmd::Invol(s) => report(&verify::invol(s.max_period, limits)?),
        VerifyCmd::PartnerTables(s) => report(&verify::partner_tables(s.max_period)?),
        VerifyCmd::Yoccoz(s) => report(&verify::yoccoz(s.max_period, limits)?),
        VerifyCmd::All(s) => {
            let mut all = true;
            for r in verify::run_all(s.max_period, limits)? {
                print!("suite={} ", r.name);
                all &= report(&r);
            }
            all
        }
        VerifyCmd::Lren { map, t, n } => {
            let v = lren_membership(&map.map(), &t, n);
            println!("t={t} {v}");
            true
        }
        VerifyCmd::Orbit { map, t } => {
            let ws = build_wakes(&map.map(), &t)?;
            println!("t={t} {}", classify_coland_orbit(&ws));
            true
        }
    };
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run_render(cmd: RenderCmd) -> Result<()> {
    let (view, julia) = match cmd {
        RenderCmd::Julia { map, view } => (view, Some(map.map())),
        RenderCmd::Param { view } => (view, None),
    };
    let win = Window::new(view.center, view.half_width)?;
    let (w, h) = view.res;
    let palette = Palette::default();
    let opts = RayOptions::default();
    let img = with_threads(view.threads, || match julia {
        Some(p) => {
            let rays: Vec<RayTrace> = view.rays.iter().map(|t| trace_ray(&p, t, &opts)).collect();
            render::render_julia(&p, &win, (w, h), &rays, &palette)
        }
        None => {
            let rays: Vec<RayTrace> = view.rays.iter().map(|t| lemon::param_ray(t, &opts)).collect();
            render::render_param_lemon(&win, (w, h), &rays, &palette)
        }
    })?;
    render::write_ppm(&img, &view.out).map_err(|e| Error::InvalidInput(format!("{}: {e}", view.out.display())))?;
    println!("out={} width={w} height={h} bytes={}", view.out.display(), img.to_ppm().len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
