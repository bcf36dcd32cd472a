use std::io::Read as _;

use jacobi_pe::export;
use jacobi_pe::fsm::{
    cancel_index, cutoffs, fsm_solve, glueing_matrix, stability_check, FailureMode, FsmProblem, Rhs, Side,
};
use jacobi_pe::pseudospec::{eps_set, resolvent_field, sandwich_check, sweep_report, ResolventField};
use jacobi_pe::regions::{bidiagonal_spectra, kappa_at, region_map, IndexClass};
use jacobi_pe::symbols::{format_complex, sample_finite};
use jacobi_pe::tridiag::{inv_norm, norm_growth_profile, op_norm, sigma_min};
use jacobi_pe::{DiagonalStream, NormKind, SymbolTriple, C64};
use serde::Deserialize;
use serde_json::json;

use crate::args::{self, ShiftArg};
use crate::output::OutDir;
use crate::{CliError, Common, Done, GridArgs};

fn open(common: &Common) -> Result<OutDir, CliError> {
    OutDir::create(&common.out, args::formats(&common.format)?)
}

fn done(out: OutDir, command: &str, argv: Vec<String>, params: serde_json::Value) -> Result<Done, CliError> {
    Ok(Done {
        manifest: out.finish(command, argv, params)?,
        status: None,
    })
}

fn warn(what: &str, detail: serde_json::Value) {
    eprintln!("{}", json!({ "warning": what, "detail": detail }));
}

fn kappa_label(k: IndexClass) -> String {
    match k {
        IndexClass::Kappa(0) => "0".into(),
        IndexClass::Kappa(k) => format!("{k:+}"),
        IndexClass::NotFredholmCandidate => "none (lambda in E)".into(),
    }
}

fn eps_label(e: f64) -> String {
    format!("{e}")
}

pub fn regions(
    triple: &str,
    grid: &GridArgs,
    exact_bidiagonal: bool,
    common: &Common,
    argv: Vec<String>,
) -> Result<Done, CliError> {
    let t = args::triple(triple)?;
    let g = args::grid(&grid.window, &grid.res)?;
    let exact = if exact_bidiagonal {
        Some(bidiagonal_spectra(&t, &g)?)
    } else {
        None
    };
    let mut out = open(common)?;
    let map = region_map(&t, &g);
    let counts = map.counts();
    out.csv("regions.csv", &export::region_csv(&map))?;
    out.raster("regions.ppm", &export::region_ppm(&map))?;
    if let Some((sigma, plus)) = &exact {
        out.csv("sigma.csv", &export::mask_csv(sigma))?;
        out.raster("sigma.pbm", &export::mask_pbm(sigma))?;
        out.csv("sigma_plus.csv", &export::mask_csv(plus))?;
        out.raster("sigma_plus.pbm", &export::mask_pbm(plus))?;
    }
    let summary = json!({
        "counts": counts,
        "sigma_points": exact.as_ref().map(|(s, _)| s.count()),
        "sigma_plus_points": exact.as_ref().map(|(_, p)| p.count()),
    });
    out.json("regions.json", &summary)?;
    println!("{summary}");
    done(
        out,
        "regions",
        argv,
        json!({ "triple": t.to_string(), "grid": g, "exact_bidiagonal": exact_bidiagonal }),
    )
}

pub struct PseudospecArgs<'a> {
    pub triple: &'a str,
    pub seed: u64,
    pub grid: &'a GridArgs,
    pub sizes: &'a str,
    pub eps: &'a str,
    pub norm: &'a str,
    pub closed: bool,
}

pub fn pseudospec(a: PseudospecArgs, common: &Common, argv: Vec<String>) -> Result<Done, CliError> {
    let t = args::triple(a.triple)?;
    let g = args::grid(&a.grid.window, &a.grid.res)?;
    let sizes = args::sizes(a.sizes)?;
    let eps = args::eps_list(a.eps)?;
    let kind = args::norm(a.norm)?;
    let mut out = open(common)?;
    let stream = DiagonalStream::new(t.clone(), a.seed);
    let fields: Vec<ResolventField> = sizes
        .iter()
        .map(|&n| resolvent_field(&stream, n, &g, kind))
        .collect::<Result<_, _>>()?;
    for f in &fields {
        out.csv(&format!("field_n{}.csv", f.n), &export::field_csv(f))?;
        out.raster(&format!("field_n{}.pgm", f.n), &export::field_pgm(f))?;
        if f.failures() > 0 {
            warn("lower_bound_points", json!({ "n": f.n, "points": f.failures() }));
        }
        for &e in &eps {
            let set = eps_set(f, e, a.closed)?;
            let stem = format!("eps{}_n{}", eps_label(e), f.n);
            out.csv(&format!("{stem}.csv"), &export::mask_csv(&set.mask))?;
            out.raster(&format!("{stem}.pbm"), &export::mask_pbm(&set.mask))?;
        }
    }
    let last = fields.last().expect("sizes non-empty");
    let mut sweeps = Vec::new();
    let mut sandwiches = Vec::new();
    for &e in &eps {
        sweeps.push(sweep_report(&fields, e, 0.05)?);
        if kind == NormKind::P2 {
            sandwiches.push(sandwich_check(&t, &eps_set(last, e, a.closed)?));
        }
    }
    let summary = json!({
        "sizes": sizes,
        "failures": fields.iter().map(|f| f.failures()).collect::<Vec<_>>(),
        "sweeps": sweeps,
        "sandwich": sandwiches,
    });
    out.json("pseudospec.json", &summary)?;
    println!(
        "{}",
        json!({ "sizes": sizes, "eps": eps, "counts": sweeps.iter().map(|s| &s.counts).collect::<Vec<_>>() })
    );
    done(
        out,
        "pseudospec",
        argv,
        json!({
            "triple": t.to_string(), "seed": a.seed, "grid": g, "sizes": sizes,
            "eps": eps, "norm": kind.label(), "closed": a.closed,
        }),
    )
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TripleSpec {
    Text(String),
    Object(SymbolTriple),
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ShiftSpec {
    Text(String),
    Number(i64),
}

#[derive(Deserialize)]
struct RhsSpec {
    /// `[index, re, im]` triples.
    support: Vec<(i64, f64, f64)>,
}

#[derive(Deserialize)]
#[serde(rename_all = "lowercase")]
enum CutoffKind {
    Full,
    Linear,
}

#[derive(Deserialize)]
struct CutoffSpec {
    kind: CutoffKind,
    #[serde(default = "one")]
    step: usize,
    count: usize,
}

fn one() -> usize {
    1
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FsmJob {
    triple: TripleSpec,
    #[serde(default)]
    seed: u64,
    side: String,
    rhs: RhsSpec,
    cutoffs: CutoffSpec,
    #[serde(default)]
    shift: Option<ShiftSpec>,
    /// Solve `(A - λ) x = b`.
    #[serde(default)]
    lambda: Option<(f64, f64)>,
    #[serde(default)]
    probe_radius: Option<i64>,
    #[serde(default)]
    atol: Option<f64>,
}

fn read_job(path: &str) -> Result<String, CliError> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| CliError::io(std::path::Path::new("<stdin>"), e))?;
        Ok(s)
    } else {
        let p = std::path::Path::new(path);
        std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))
    }
}

pub fn fsm(job_path: &str, shift_flag: Option<&str>, common: &Common, argv: Vec<String>) -> Result<Done, CliError> {
    let text = read_job(job_path)?;
    let job: FsmJob = serde_json::from_str(&text).map_err(|e| CliError::parse(format!("job: {e}")))?;
    let t = match job.triple {
        TripleSpec::Text(s) => args::triple(&s)?,
        TripleSpec::Object(t) => t,
    };
    let side = match job.side.as_str() {
        "semi" | "semi-infinite" | "one-sided" => Side::SemiInfinite,
        "bi" | "bi-infinite" | "two-sided" => Side::BiInfinite,
        other => return Err(CliError::parse(format!("job: unknown side `{other}`"))),
    };
    let shift = match (shift_flag, job.shift) {
        (Some(s), _) => args::shift(s)?,
        (None, Some(ShiftSpec::Text(s))) => args::shift(&s)?,
        (None, Some(ShiftSpec::Number(k))) => args::shift(&k.to_string())?,
        (None, None) => ShiftArg::Fixed(0),
    };
    let c = &job.cutoffs;
    if c.count == 0 || c.step == 0 {
        return Err(CliError::parse("job: cutoffs need count >= 1 and step >= 1".into()));
    }
    let sizes: Vec<usize> = match c.kind {
        CutoffKind::Full => (1..=c.count).collect(),
        CutoffKind::Linear => (1..=c.count).map(|k| k * c.step).collect(),
    };
    let lambda = job.lambda.map(|(re, im)| C64::new(re, im)).unwrap_or_default();
    let kappa = kappa_at(&t, lambda);
    let entries: Vec<(i64, C64)> = job.rhs.support.iter().map(|&(i, re, im)| (i, C64::new(re, im))).collect();
    let stream = DiagonalStream::new(t.shifted(lambda), job.seed);
    let mut problem = FsmProblem::new(stream, side, Rhs::from_support(&entries), cutoffs(side, &sizes));
    if let Some(r) = job.probe_radius {
        problem.probe_radius = r;
    }
    if let Some(a) = job.atol {
        problem.atol = a;
    }
    let applied = match shift {
        ShiftArg::Fixed(0) => 0,
        ShiftArg::Fixed(k) => k,
        ShiftArg::Auto => match (kappa, side) {
            (IndexClass::Kappa(k), Side::BiInfinite) if k != 0 => k,
            _ => 0,
        },
    };
    if applied != 0 {
        problem = cancel_index(&problem, applied)?;
    }
    let rep = fsm_solve(&problem)?;

    let mut out = open(common)?;
    let summary = json!({
        "kappa": kappa_label(kappa),
        "shift": applied,
        "converged": rep.converged,
        "failure_mode": rep.failure_mode,
        "final_error_estimate": rep.final_error_estimate,
        "increments": rep.increments,
        "stability_profile": rep.stability_profile,
        "solutions": rep.solutions,
    });
    out.json("fsm_report.json", &summary)?;
    let ns: Vec<usize> = rep.solutions.iter().map(|s| (s.hi - s.lo + 1) as usize).collect();
    out.csv("profile.csv", &export::profile_csv(&ns, &rep.stability_profile))?;
    if let Some(last) = rep.solutions.last().filter(|s| !s.values.is_empty()) {
        let mut csv = String::from("j,re,im\n");
        for (k, z) in last.values.iter().enumerate() {
            csv.push_str(&format!("{},{},{}\n", last.lo + k as i64, z.re, z.im));
        }
        out.csv("solution.csv", &csv)?;
    }
    println!(
        "{}",
        json!({
            "converged": rep.converged, "failure_mode": rep.failure_mode,
            "kappa": kappa_label(kappa), "shift": applied,
            "final_error_estimate": rep.final_error_estimate,
        })
    );
    let mut result = done(
        out,
        "fsm",
        argv,
        json!({
            "triple": t.to_string(), "seed": job.seed, "side": side, "sizes": sizes,
            "lambda": format_complex(lambda), "shift": applied,
        }),
    )?;
    if rep.failure_mode == Some(FailureMode::ProfileDiverging) && shift != ShiftArg::Auto {
        result.status = Some(
            CliError::new(
                4,
                "profile_diverging",
                format!(
                    "finite section inverse norms diverge; kappa={} at lambda={}; rerun with --shift auto",
                    kappa_label(kappa),
                    format_complex(lambda)
                ),
            )
            .with_detail(json!({ "kappa": kappa_label(kappa) })),
        );
    } else if !rep.converged {
        warn("not_converged", json!({ "failure_mode": rep.failure_mode }));
    }
    Ok(result)
}

pub fn check(
    triple: &str,
    lambda: &str,
    seeds: u64,
    sizes: &str,
    common: &Common,
    argv: Vec<String>,
) -> Result<Done, CliError> {
    let t = args::triple(triple)?;
    let lambda = args::complex(lambda)?;
    let sizes = args::sizes(sizes)?;
    if seeds == 0 {
        return Err(CliError::parse("--seeds must be at least 1".into()));
    }
    let seed_list: Vec<u64> = (1..=seeds).collect();
    let kappa = kappa_at(&t, lambda);
    let evidence = stability_check(&t, lambda, &seed_list, &sizes);

    // ‖F⁻¹‖₁ = ‖reflect(F)⁻¹‖∞ and ‖F‖₁ = ‖reflect(F)‖∞
    let shifted = t.shifted(lambda);
    let mut duality = 0.0f64;
    for &seed in &seed_list {
        for &n in &sizes {
            let f = sample_finite(&shifted, n, seed)?;
            let r = f.reflect();
            for (a, b) in [
                (inv_norm(&f, NormKind::P1)?.value, inv_norm(&r, NormKind::Pinf)?.value),
                (op_norm(&f, NormKind::P1)?.value, op_norm(&r, NormKind::Pinf)?.value),
            ] {
                if a != b {
                    duality = duality.max((a - b).abs() / a.abs().max(b.abs()));
                }
            }
        }
    }
    let duality_ok = duality <= 1e-10;

    // gluing copies of F never raises the smallest singular value
    let f = sample_finite(&shifted, sizes[0], seed_list[0])?;
    let fill = (shifted.u()[0], shifted.v()[0], shifted.w()[0]);
    let sf = sigma_min(&f)?;
    let windows: Vec<f64> = (1..=4)
        .map(|copies| glueing_matrix(&f, fill, copies).and_then(|g| sigma_min(&g)))
        .collect::<Result<_, _>>()?;
    let glue_ok = windows.iter().all(|&s| s <= sf * (1.0 + 1e-8) + 1e-14);

    let pass = evidence.stable && duality_ok && glue_ok;
    let summary = json!({
        "pass": pass,
        "kappa": kappa_label(kappa),
        "lambda": format_complex(lambda),
        "stability": evidence,
        "duality_max_deviation": duality,
        "duality_ok": duality_ok,
        "glueing": { "sigma_min": sf, "windows": windows, "ok": glue_ok },
    });
    let mut out = open(common)?;
    out.json("check.json", &summary)?;
    println!(
        "{}",
        json!({
            "pass": pass, "kappa": kappa_label(kappa), "stable": evidence.stable,
            "max_inv_norm": evidence.max_inv_norm, "matrices_checked": evidence.matrices_checked,
            "witness": evidence.witness.is_some(),
        })
    );
    let witness = evidence.witness.clone();
    let mut result = done(
        out,
        "check",
        argv,
        json!({ "triple": t.to_string(), "lambda": format_complex(lambda), "seeds": seed_list, "sizes": sizes }),
    )?;
    if let Some(w) = witness {
        result.status = Some(
            CliError::new(
                5,
                "singular_section",
                format!("singular finite section of size {} found", w.matrix.n()),
            )
            .with_detail(json!({ "witness": w })),
        );
    }
    Ok(result)
}

pub fn profile(
    triple: &str,
    seed: u64,
    lambda: &str,
    sizes: &str,
    norm: &str,
    common: &Common,
    argv: Vec<String>,
) -> Result<Done, CliError> {
    let t = args::triple(triple)?;
    let lambda = args::complex(lambda)?;
    let sizes = args::sizes(sizes)?;
    let kind = args::norm(norm)?;
    let stream = DiagonalStream::new(t.clone(), seed);
    let prof = norm_growth_profile(&stream, lambda, &sizes, kind)?;
    let mut out = open(common)?;
    out.csv("profile.csv", &export::profile_csv(&sizes, &prof))?;
    out.json(
        "profile.json",
        &json!({ "kappa": kappa_label(kappa_at(&t, lambda)), "sizes": sizes, "profile": prof }),
    )?;
    println!(
        "{}",
        json!({ "sizes": sizes, "values": prof.iter().map(|e| e.value).collect::<Vec<_>>() })
    );
    done(
        out,
        "profile",
        argv,
        json!({
            "triple": t.to_string(), "seed": seed, "lambda": format_complex(lambda),
            "sizes": sizes, "norm": kind.label(),
        }),
    )
}
