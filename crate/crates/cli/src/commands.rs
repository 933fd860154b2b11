use std::f64::consts::PI;
use std::fs;

use serde::Serialize;
use toruseq::arithmetic::{
    a4_pall_taussky, a_d_bruteforce, r4_jacobi, r_d_bruteforce, s_d_bruteforce, RepProfile,
};
use toruseq::constructions::{bourgain_pairs, pairing_radius, PairList};
use toruseq::experiments::{
    blowup_growth_scan, d2_bounded_scan, density_one_scan, eigenspace_scan, odd_log_sample,
    s4_ratio_sweep, BasisKind, EigenspaceTotal, ScanParams, ScanReport,
};
use toruseq::lattice::{enumerate_sphere, sphere_count, Eigenspace};
use toruseq::spectral::{mass_average, mass_average_quadrature, Ball};

use crate::output::{csv_records, csv_rows, emit, json};
use crate::render::{colorbar_svg, intensity_field, ppm};
use crate::source::{self, Provenance};
use crate::{
    BasisArg, BlowupArgs, Cli, CmdResult, Command, EnumerateArgs, Failure, Global, MassArgs,
    PairsArgs, RenderArgs, RepcountArgs, ScanArgs, ScanMode,
};

const SCHEMA_VERSION: u32 = 1;

/// Tolerance of the `mass --check` comparison against spatial quadrature.
const MASS_CHECK_TOL: f64 = 1e-3;

/// Above this multiplicity `blowup --ratio-exponent --check` skips the
/// pair-route recount of `S_4`.
const RATIO_CHECK_LIMIT: u64 = 20_000;

const MAX_RENDER_GRID: usize = 8192;

pub fn run(cli: &Cli) -> CmdResult {
    let g = &cli.global;
    match &cli.command {
        Command::Enumerate(a) => enumerate(a, g),
        Command::Repcount(a) => repcount(a, g),
        Command::Mass(a) => mass(a, g),
        Command::Pairs(a) => pairs(a, g),
        Command::Scan(a) => scan(a, g),
        Command::Blowup(a) => blowup(a, g),
        Command::Render(a) => render(a, g),
    }
}

fn check(ok: bool, msg: impl FnOnce() -> String) -> CmdResult {
    if ok {
        Ok(())
    } else {
        Err(Failure::Check(msg()))
    }
}

fn enumerate(a: &EnumerateArgs, g: &Global) -> CmdResult {
    let space = source::eigenspace(g, a.d, a.lambda)?;
    if g.check {
        let brute = r_d_bruteforce(a.d, a.lambda)?;
        check(space.len() as u64 == brute, || {
            format!("{} points enumerated, brute force counts {brute}", space.len())
        })?;
        if g.cache_dir.is_some() {
            check(space == enumerate_sphere(a.d, a.lambda)?, || {
                "cached eigenspace differs from a fresh enumeration".into()
            })?;
        }
    }
    emit(a.out.as_deref(), &points_csv(&space)?)
}

fn points_csv(space: &Eigenspace) -> Result<Vec<u8>, Failure> {
    let header: Vec<String> = (1..=space.dim()).map(|i| format!("x{i}")).collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    csv_records(
        &header,
        space
            .iter()
            .map(|p| p.as_slice().iter().map(|c| c.to_string()).collect::<Vec<_>>()),
    )
}

fn repcount(a: &RepcountArgs, g: &Global) -> CmdResult {
    let routes: Vec<(&str, u64)> = match a.t {
        None => {
            let mut v = vec![("orbits", sphere_count(a.d, a.n)?)];
            if a.d == 4 {
                v.push(("jacobi", r4_jacobi(a.n)?));
            }
            v.push(("bruteforce", r_d_bruteforce(a.d, a.n)?));
            v
        }
        Some(t) => {
            let fast = if a.d == 4 && a.n % 2 == 1 && t.unsigned_abs() < a.n {
                ("pall_taussky", a4_pall_taussky(a.n, t)?)
            } else {
                let profile = RepProfile::from_space(&enumerate_sphere(a.d, a.n)?);
                ("profile", profile.count(t).unwrap_or(0))
            };
            vec![fast, ("bruteforce", a_d_bruteforce(a.d, a.n, t)?)]
        }
    };
    let t = a.t.map(|t| t.to_string()).unwrap_or_default();
    let bytes = csv_records(
        &["d", "n", "t", "route", "count"],
        routes.iter().map(|(name, c)| {
            [a.d.to_string(), a.n.to_string(), t.clone(), name.to_string(), c.to_string()]
        }),
    )?;
    emit(a.out.as_deref(), &bytes)?;
    if g.check {
        let first = routes[0].1;
        check(routes.iter().all(|r| r.1 == first), || format!("routes disagree: {routes:?}"))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct MassSummary {
    schema_version: u32,
    source: Provenance,
    center: Vec<f64>,
    radius: f64,
    mass: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    quadrature: Option<f64>,
}

fn mass(a: &MassArgs, g: &Global) -> CmdResult {
    let (psi, prov) = source::load(&a.source, g)?;
    let center = a.center.clone().unwrap_or_else(|| vec![0.0; psi.dim()]);
    let ball = Ball::new(center.clone(), a.radius)?;
    let value = mass_average(&psi, &ball)?;
    let quadrature = if g.check {
        Some(mass_average_quadrature(&psi, &ball, 1e-5)?)
    } else {
        None
    };
    let summary = MassSummary {
        schema_version: SCHEMA_VERSION,
        source: prov,
        center,
        radius: a.radius,
        mass: value,
        quadrature,
    };
    emit(a.out.as_deref(), &json(&summary)?)?;
    if let Some(q) = quadrature {
        check((value - q).abs() <= MASS_CHECK_TOL, || {
            format!("frequency-space mass {value} vs spatial quadrature {q}")
        })?;
    }
    Ok(())
}

fn pairs(a: &PairsArgs, g: &Global) -> CmdResult {
    let space = source::eigenspace(g, a.d, a.lambda)?;
    let y = a.y.unwrap_or_else(|| pairing_radius(a.d, a.lambda));
    if !(y > 0.0 && y.is_finite()) {
        return Err(Failure::Usage(format!("pairing distance must be positive, got {y}")));
    }
    let list = bourgain_pairs(&space, y);
    let text = list.to_json()?;
    emit(a.out.as_deref(), format!("{text}\n").as_bytes())?;
    if g.check {
        list.check_invariants().map_err(|e| Failure::Check(e.to_string()))?;
        check(PairList::from_json(&text)? == list, || "pair list does not round-trip".into())?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ScanSummary<'a> {
    schema_version: u32,
    kind: &'a str,
    d: usize,
    lambda_min: u64,
    lambda_max: u64,
    params: &'a ScanParams,
    eigenspaces: usize,
    members: usize,
    exceptional: usize,
    density: f64,
    aggregate: f64,
    aggregate_bound: f64,
    bounds_hold: bool,
    totals: &'a [EigenspaceTotal],
}

#[derive(Serialize)]
struct PlanarSummary {
    schema_version: u32,
    kind: &'static str,
    b: f64,
    seed: u64,
    rows: usize,
    max_arc: usize,
    max_arc_lambda: Option<u64>,
    max_ratio: Option<f64>,
}

const RECORD_HEADER: [&str; 6] =
    ["lambda", "index", "discrepancy", "threshold", "exceptional", "grid_sup"];

fn scan(a: &ScanArgs, g: &Global) -> CmdResult {
    if a.mode == ScanMode::Planar {
        return planar(a, g);
    }
    let mut params = ScanParams::new(a.theta2, a.delta, g.seed);
    params.basis = match a.basis {
        BasisArg::Random => BasisKind::Random,
        BasisArg::Exponential => BasisKind::Exponential,
    };
    params.grid_sup_exponent = a.grid_sup_exponent;
    params.validate()?;
    let report: ScanReport = match a.mode {
        ScanMode::Density => {
            let lm = a
                .lambda_max
                .ok_or_else(|| Failure::Usage("--mode density needs --lambda-max".into()))?;
            density_one_scan(a.d, lm, &params)?
        }
        ScanMode::Eigenspace => {
            let l = a
                .lambda
                .ok_or_else(|| Failure::Usage("--mode eigenspace needs --lambda".into()))?;
            eigenspace_scan(a.d, l, &params)?
        }
        ScanMode::Planar => unreachable!(),
    };
    let csv = csv_rows(&report.records, &RECORD_HEADER)?;
    let summary = ScanSummary {
        schema_version: SCHEMA_VERSION,
        kind: &report.kind,
        d: report.d,
        lambda_min: report.lambda_min,
        lambda_max: report.lambda_max,
        params: &report.params,
        eigenspaces: report.totals.len(),
        members: report.members,
        exceptional: report.exceptional,
        density: report.density,
        aggregate: report.aggregate,
        aggregate_bound: report.aggregate_bound,
        bounds_hold: report.bounds_hold(),
        totals: &report.totals,
    };
    write_table_and_summary(a, &csv, &json(&summary)?)?;
    if g.check {
        check(report.bounds_hold(), || {
            let bad: Vec<u64> = report
                .totals
                .iter()
                .filter(|t| !t.within_bound())
                .map(|t| t.lambda)
                .collect();
            format!("lattice bound exceeded at λ = {bad:?}")
        })?;
    }
    Ok(())
}

fn write_table_and_summary(a: &ScanArgs, csv: &[u8], summary: &[u8]) -> CmdResult {
    if a.csv.is_some() || a.json.is_none() {
        emit(a.csv.as_deref(), csv)?;
    }
    if let Some(p) = &a.json {
        emit(Some(p), summary)?;
    }
    Ok(())
}

fn planar(a: &ScanArgs, g: &Global) -> CmdResult {
    let lambdas: Vec<u64> = match (&a.lambdas, a.lambda_max) {
        (Some(v), _) => v.clone(),
        (None, Some(lm)) => (1..=lm).collect(),
        (None, None) => {
            return Err(Failure::Usage("--mode planar needs --lambdas or --lambda-max".into()))
        }
    };
    let rows = d2_bounded_scan(&lambdas, a.b, g.seed, !a.no_grid)?;
    let csv = csv_rows(&rows, &["lambda", "multiplicity", "r", "arc_max", "grid_sup"])?;
    let best = rows.iter().max_by_key(|r| (r.arc_max, std::cmp::Reverse(r.lambda)));
    let summary = PlanarSummary {
        schema_version: SCHEMA_VERSION,
        kind: "planar",
        b: a.b,
        seed: g.seed,
        rows: rows.len(),
        max_arc: best.map_or(0, |r| r.arc_max),
        max_arc_lambda: best.map(|r| r.lambda),
        max_ratio: rows.iter().filter_map(|r| r.ratio()).reduce(f64::max),
    };
    write_table_and_summary(a, &csv, &json(&summary)?)?;
    if g.check {
        for r in &rows {
            let brute = arc_max_bruteforce(&enumerate_sphere(2, r.lambda)?, 2.0 / r.r);
            check(brute == r.arc_max, || {
                format!("λ = {}: arc_max {} vs brute force {brute}", r.lambda, r.arc_max)
            })?;
        }
    }
    Ok(())
}

/// All-pairs recount of the largest chordal cap, with the same integer
/// threshold `|μ-ν|² <= ⌊ρ²⌋`.
fn arc_max_bruteforce(space: &Eigenspace, rho: f64) -> usize {
    let bound = toruseq::lattice::radius_sq_floor(rho);
    space
        .iter()
        .map(|p| space.iter().filter(|q| p.dist_sq(q) <= bound).count())
        .max()
        .unwrap_or(0)
}

fn blowup(a: &BlowupArgs, g: &Global) -> CmdResult {
    let lambdas = match (&a.lambdas, a.lambda_min, a.lambda_max) {
        (Some(v), _, _) => v.clone(),
        (None, Some(lo), Some(hi)) => odd_log_sample(lo, hi, a.count)?,
        _ => {
            return Err(Failure::Usage(
                "give --lambdas or both --lambda-min and --lambda-max".into(),
            ))
        }
    };
    if let Some(e) = a.ratio_exponent {
        let rows = s4_ratio_sweep(&lambdas, e)?;
        let csv = csv_rows(&rows, &["lambda", "t_radius", "s_value", "r4", "ratio"])?;
        emit(a.out.as_deref(), &csv)?;
        if g.check {
            for r in rows.iter().filter(|r| r.r4 <= RATIO_CHECK_LIMIT) {
                let brute = s_d_bruteforce(4, r.lambda, r.t_radius)?;
                check(brute == r.s_value, || {
                    format!("λ = {}: S_4 = {} vs pair count {brute}", r.lambda, r.s_value)
                })?;
                let r4 = r_d_bruteforce(4, r.lambda)?;
                check(r4 == r.r4, || format!("λ = {}: R_4 = {} vs brute {r4}", r.lambda, r.r4))?;
            }
        }
        return Ok(());
    }
    let rows = blowup_growth_scan(&lambdas, &a.exponents)?;
    let csv = csv_rows(
        &rows,
        &["lambda", "a", "r", "t_radius", "s_value", "n_lambda", "lower_bound", "exact_mass"],
    )?;
    emit(a.out.as_deref(), &csv)?;
    if g.check {
        for r in &rows {
            if let Some(m) = r.exact_mass {
                check(m >= r.lower_bound, || {
                    format!("λ = {}, a = {}: mass {m} below bound {}", r.lambda, r.a, r.lower_bound)
                })?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct RenderSummary {
    schema_version: u32,
    source: Provenance,
    grid: usize,
    max_intensity: f64,
    argmax: [f64; 2],
    min_intensity: f64,
    mean_intensity: f64,
    vmax: f64,
    image: String,
    colorbar: String,
}

fn render(a: &RenderArgs, g: &Global) -> CmdResult {
    if a.grid == 0 || a.grid > MAX_RENDER_GRID {
        return Err(Failure::Usage(format!("--grid must lie in 1..={MAX_RENDER_GRID}")));
    }
    let (psi, prov) = source::load(&a.source, g)?;
    let field = intensity_field(&psi, a.grid);
    let (max, j, i) = field.max();
    let vmax = a.vmax.unwrap_or(max);
    let colorbar = a.colorbar.clone().unwrap_or_else(|| a.out.with_extension("svg"));
    fs::write(&a.out, ppm(&field, vmax))
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", a.out.display())))?;
    fs::write(&colorbar, colorbar_svg(vmax))
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", colorbar.display())))?;
    let step = 2.0 * PI / a.grid as f64;
    let summary = RenderSummary {
        schema_version: SCHEMA_VERSION,
        source: prov,
        grid: a.grid,
        max_intensity: max,
        argmax: [j as f64 * step, i as f64 * step],
        min_intensity: field.min(),
        mean_intensity: field.mean(),
        vmax,
        image: a.out.display().to_string(),
        colorbar: colorbar.display().to_string(),
    };
    emit(None, &json(&summary)?)?;
    if g.check {
        // direct summation at a spread of pixels
        let n = a.grid;
        let scale: f64 = psi.modes().iter().map(|(_, c)| c.norm()).sum::<f64>().powi(2);
        for k in 0..64usize {
            let idx = (k * 7919) % (n * n);
            let mut x = vec![0.0; psi.dim()];
            x[0] = (idx % n) as f64 * step;
            x[1] = (idx / n) as f64 * step;
            let direct = psi.intensity(&x);
            check((direct - field.values[idx]).abs() <= 1e-9 * scale.max(1.0), || {
                format!("pixel {idx}: grid value {} vs direct {direct}", field.values[idx])
            })?;
        }
        if field.resolved() {
            let mean = field.mean();
            check((mean - field.spectral_mass).abs() <= 1e-9 * field.spectral_mass.max(1.0), || {
                format!("grid mean {mean} vs spectral mass {}", field.spectral_mass)
            })?;
        }
    }
    Ok(())
}
