//! The eleven acceptance criteria as functions of a [`RunConfig`]. Each
//! returns a self-describing [`Criterion`]; timing is left to the caller so
//! the reports stay byte-identical across runs.

use std::f64::consts::PI;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};
use squeeze_core::folding::{compose_plan, cube_to_prism, PrimitiveMap};
use squeeze_core::markov::{
    branch_sequence, build_triangle, enumerate_tree, find_fitting_triple, is_markov, FitResult, MarkovTriple, Q,
};
use squeeze_core::measure::{
    block_containment, cube, defect_volume, derive_seed, disk_neighborhood_box, lipschitz_estimate, mc_volume,
    neighborhood_curve, spectral_norm, symplecticity_scan, theorem31_check, wall_volume_in_cube, JacobianMode,
};
use squeeze_core::model::{disk_tube_volume, lagrangian_disk_distance, ou_check, triangle_torus_containment, OuCheckReport};

use crate::config::{parse_alpha, RunConfig};
use crate::error::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub summary: String,
    pub details: Value,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!("criterion {:>2} {} {}: {}", self.id, if self.passed { "PASS" } else { "FAIL" }, self.title, self.summary)
    }
}

type CheckFn = fn(&RunConfig) -> Result<Criterion, CliError>;

pub const ALL: [(u8, CheckFn); 11] = [
    (1, markov_exactness),
    (2, triangle_identities),
    (3, strip_fits),
    (4, folding_symplecticity),
    (5, cylinder_containment),
    (6, defect_scaling),
    (7, lipschitz_scaling),
    (8, oakley_usher),
    (9, minkowski_disk),
    (10, toric_containment),
    (11, reproducibility),
];

pub fn run(id: u8, cfg: &RunConfig) -> Result<Criterion, CliError> {
    let (_, f) = ALL.iter().find(|(k, _)| *k == id).ok_or_else(|| CliError::Domain(format!("no criterion {id}")))?;
    f(cfg)
}

fn seed_for(cfg: &RunConfig, id: u8) -> u64 {
    derive_seed(cfg.seed, id as u64)
}

fn max_min_ratio(v: &[f64]) -> f64 {
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    max / min
}

/// Markov numbers along the branch by repeatedly replacing the smallest
/// entry of the current triple; kept apart from the engine's recurrence.
pub fn branch_oracle(n: usize) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = vec![1.into(); n.min(2) + 1];
    let mut t: [BigInt; 3] = [1.into(), 1.into(), 1.into()];
    while out.len() <= n {
        t.sort();
        let next = BigInt::from(3) * &t[1] * &t[2] - &t[0];
        t[0] = next.clone();
        out.push(next);
    }
    out
}

pub fn markov_exactness(cfg: &RunConfig) -> Result<Criterion, CliError> {
    let max: BigInt = parse_alpha(&cfg.tree_max)?.to_integer();
    let tree = enumerate_tree(&max)?;
    let mut all_markov = true;
    for t in &tree {
        let [a, b, c] = t.entries();
        all_markov &= is_markov(a, b, c)?;
    }
    let branch = branch_sequence(cfg.branch_length);
    let branch_ok = branch == branch_oracle(cfg.branch_length);
    let last = branch.last().map(|m| m.to_string()).unwrap_or_default();
    Ok(Criterion {
        id: 1,
        title: "Markov engine exactness",
        passed: all_markov && branch_ok && !tree.is_empty(),
        summary: format!(
            "{} triples with max <= {max} satisfy a^2+b^2+c^2=3abc: {all_markov}; branch_sequence({}) matches oracle: {branch_ok}",
            tree.len(),
            cfg.branch_length
        ),
        details: json!({ "triples": tree.len(), "all_markov": all_markov, "branch_matches": branch_ok, "branch_last": last }),
    })
}

/// The first `count` triples in order of their largest entry.
fn first_triples(count: usize) -> Result<Vec<MarkovTriple>, CliError> {
    let mut bound = BigInt::from(100);
    loop {
        let mut tree = enumerate_tree(&bound)?;
        if tree.len() >= count {
            tree.sort_by(|a, b| a.max_entry().cmp(b.max_entry()).then_with(|| a.cmp(b)));
            tree.truncate(count);
            return Ok(tree);
        }
        bound = &bound * &bound;
    }
}

pub fn triangle_identities(cfg: &RunConfig) -> Result<Criterion, CliError> {
    let triples = first_triples(cfg.triangle_count)?;
    let two = Q::from_integer(2.into());
    let three = Q::from_integer(3.into());
    let mut failures = Vec::new();
    let mut checked = 0;
    for alpha_s in &cfg.triangle_alphas {
        let alpha = parse_alpha(alpha_s)?;
        for t in &triples {
            let tri = build_triangle(t, &alpha)?;
            let r = &tri.realization;
            let lambda = tri.lambda();
            let area_ok = r.area() == &alpha * &alpha / &two;
            let perimeter_ok = r.affine_perimeter() == &three * &alpha;
            let edges_ok = (0..3).all(|i| r.edge_affine_length(i) == &lambda * Q::from_integer(tri.edge_weights[i].clone()));
            let mut lengths = r.edge_affine_lengths().to_vec();
            let mut expected: Vec<Q> = t.entries().iter().map(|m| &lambda * Q::from_integer(m * m)).collect();
            lengths.sort();
            expected.sort();
            checked += 1;
            if !(area_ok && perimeter_ok && edges_ok && lengths == expected) {
                failures.push(format!("{t} at alpha = {alpha_s}"));
            }
        }
    }
    Ok(Criterion {
        id: 2,
        title: "triangle identities",
        passed: failures.is_empty() && checked == cfg.triangle_count * cfg.triangle_alphas.len(),
        summary: format!(
            "{checked} triangles: area = alpha^2/2, perimeter = 3 alpha, edges = (alpha/abc){{a^2,b^2,c^2}} exactly; {} mismatches",
            failures.len()
        ),
        details: json!({ "checked": checked, "failures": failures }),
    })
}

pub fn strip_fits(cfg: &RunConfig) -> Result<Criterion, CliError> {
    let mut rows = Vec::new();
    let mut ok = true;
    for a in &cfg.fit_alphas {
        let alpha = parse_alpha(a)?;
        match find_fitting_triple(&alpha)? {
            FitResult::Fit { triangle, fit, .. } => {
                let [m0, m1, m2] = triangle.triple.entries();
                let formula = &alpha * Q::from_integer(m0 * m1) / Q::from_integer(m2.clone());
                let good = fit.height < Q::from_integer(1.into()) && fit.height == formula && fit.verify(&triangle.realization);
                ok &= good;
                rows.push(json!({ "alpha": a, "triple": triangle.triple.to_string(), "height": fit.height.to_string(), "formula_matches": fit.height == formula, "ok": good }));
            }
            FitResult::NoFit { .. } => {
                ok = false;
                rows.push(json!({ "alpha": a, "result": "NoFit", "ok": false }));
            }
        }
    }
    for a in &cfg.no_fit_alphas {
        let alpha = parse_alpha(a)?;
        let good = matches!(find_fitting_triple(&alpha)?, FitResult::NoFit { ref certificate } if certificate.is_valid());
        ok &= good;
        rows.push(json!({ "alpha": a, "result": "NoFit", "ok": good }));
    }
    let heights: Vec<String> = rows.iter().filter_map(|r| r.get("height").map(|h| format!("{}->{}", r["alpha"].as_str().unwrap_or(""), h.as_str().unwrap_or("")))).collect();
    Ok(Criterion {
        id: 3,
        title: "half-strip fits",
        passed: ok,
        summary: format!("fits {}; NoFit certificates for {}", heights.join(", "), cfg.no_fit_alphas.join(", ")),
        details: json!({ "rows": rows }),
    })
}

pub fn folding_symplecticity(cfg: &RunConfig) -> Result<Criterion, CliError> {
    let seed = seed_for(cfg, 4);
    let tol = &cfg.tolerances;
    let mut rows = Vec::new();
    let (mut worst_a, mut worst_fd) = (0.0f64, 0.0f64);
    for &r in &cfg.radii {
        for &l in &cfg.lipschitz {
            let plan = compose_plan(r, l)?;
            let n = cfg.samples.symplecticity;
            let a = symplecticity_scan(&plan, &cube(r), n, seed, JacobianMode::Analytic)?;
            let fd = symplecticity_scan(&plan, &cube(r), n, seed, JacobianMode::FiniteDifference)?;
            worst_a = worst_a.max(a.max);
            worst_fd = worst_fd.max(fd.max);
            rows.push(json!({ "R": r, "L": l, "analytic": a, "finite_difference": fd }));
        }
    }
    let (pa, pf) = (worst_a <= tol.symplectic_analytic, worst_fd <= tol.symplectic_fd);
    Ok(Criterion {
        id: 4,
        title: "folding symplecticity",
        passed: pa && pf,
        summary: format!(
            "max |J^T Ω J - Ω| analytic {worst_a:.2e} (<= {:.0e}: {pa}), finite-difference {worst_fd:.2e} (<= {:.0e}: {pf})",
            tol.symplectic_analytic, tol.symplectic_fd
        ),
        details: json!({ "rows": rows }),
    })
}

pub fn cylinder_containment(cfg: &RunConfig) -> Result<Criterion, CliError> {
    let seed = seed_for(cfg, 5);
    let mut rows = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for &l in &cfg.containment_lipschitz {
        let plan = compose_plan(1.0, l)?;
        let rep = block_containment(&plan, cfg.samples.containment, seed)?;
        worst = worst.max(rep.max_radius_sq);
        rows.push(json!({ "L": l, "report": rep }));
    }
    let passed = worst <= 0.5 + cfg.tolerances.containment;
    Ok(Criterion {
        id: 5,
        title: "cylinder containment",
        passed,
        summary: format!("{} block samples per L, max x1^2+y1^2 = {worst:.12} (<= 0.5 + {:.0e})", cfg.samples.containment, cfg.tolerances.containment),
        details: json!({ "rows": rows }),
    })
}

pub fn defect_scaling(cfg: &RunConfig) -> Result<Criterion, CliError> {
    let seed = seed_for(cfg, 6);
    let k = cfg.tolerances.defect_sigmas;
    let mut rows = Vec::new();
    let mut scaled = Vec::new();
    let mut bounds_ok = true;
    for &l in &cfg.lipschitz {
        let plan = compose_plan(1.0, l)?;
        let est = defect_volume(&plan, 1.0, cfg.samples.defect, seed)?;
        let wall = wall_volume_in_cube(1.0, l)?;
        let upper = est.value <= wall + k * est.std_error;
        let lower = est.value >= 1e-3 / (l * l);
        bounds_ok &= upper && lower;
        scaled.push(est.value * l);
        rows.push(json!({ "L": l, "estimate": est, "defect_times_L": est.value * l, "wall_bound": wall, "below_wall": upper, "above_lower_bound": lower }));
    }
    let ratio = max_min_ratio(&scaled);
    let passed = bounds_ok && ratio <= cfg.tolerances.defect_ratio;
    let shown: Vec<String> = scaled.iter().map(|v| format!("{v:.3}")).collect();
    Ok(Criterion {
        id: 6,
        title: "defect scaling",
        passed,
        summary: format!("defect*L = [{}], max/min {ratio:.3} (<= {}); wall and 1e-3/L^2 bounds hold: {bounds_ok}", shown.join(", "), cfg.tolerances.defect_ratio),
        details: json!({ "rows": rows, "ratio": ratio }),
    })
}

pub fn lipschitz_scaling(cfg: &RunConfig) -> Result<Criterion, CliError> {
    let seed = seed_for(cfg, 7);
    let mut rows = Vec::new();
    let mut scaled = Vec::new();
    for &l in &cfg.lipschitz {
        let plan = compose_plan(1.0, l)?;
        let rep = lipschitz_estimate(&plan, &cube(1.0), cfg.samples.lipschitz, seed)?;
        scaled.push(rep.max / l);
        rows.push(json!({ "L": l, "report": rep, "lip_over_L": rep.max / l }));
    }
    let ratio = max_min_ratio(&scaled);
    let mut prism_ok = true;
    let mut prism = Vec::new();
    for &r in &cfg.radii {
        let PrimitiveMap::LinearSymplectic { matrix, .. } = cube_to_prism(r)? else {
            return Err(CliError::Internal("cube_to_prism is not linear".into()));
        };
        let (s, _) = spectral_norm(&matrix);
        prism_ok &= (s - 2.0 * r).abs() <= cfg.tolerances.spectral;
        prism.push(json!({ "R": r, "spectral_norm": s }));
    }
    let shown: Vec<String> = scaled.iter().map(|v| format!("{v:.1}")).collect();
    Ok(Criterion {
        id: 7,
        title: "Lipschitz scaling",
        passed: ratio <= cfg.tolerances.lipschitz_ratio && prism_ok,
        summary: format!("Lip/L = [{}], max/min {ratio:.3} (<= {}); cube_to_prism norm = 2R: {prism_ok}", shown.join(", "), cfg.tolerances.lipschitz_ratio),
        details: json!({ "rows": rows, "ratio": ratio, "cube_to_prism": prism }),
    })
}

pub fn oakley_usher(cfg: &RunConfig) -> Result<Criterion, CliError> {
    let rep = ou_check(cfg.samples.ou_points, cfg.samples.ou_rotations, cfg.tolerances.ou_step, seed_for(cfg, 8))?;
    Ok(Criterion {
        id: 8,
        title: "Oakley-Usher map",
        passed: rep.passes(),
        summary: format!(
            "identity {:.1e} (<= {:.0e}), Fermat {:.1e} (<= {:.0e}), SO(3) {:.1e} (<= {:.0e}), pullback {:.1e} (<= {:.0e})",
            rep.identity_error,
            OuCheckReport::IDENTITY_TOL,
            rep.fermat_residual,
            OuCheckReport::FERMAT_TOL,
            rep.equivariance_error,
            OuCheckReport::EQUIVARIANCE_TOL,
            rep.pullback_residual,
            OuCheckReport::PULLBACK_TOL
        ),
        details: serde_json::to_value(&rep)?,
    })
}

pub fn minkowski_disk(cfg: &RunConfig) -> Result<Criterion, CliError> {
    let seed = seed_for(cfg, 9);
    let r = cfg.disk_radius;
    let tol = &cfg.tolerances;
    let dist = |p: &[f64; 4]| lagrangian_disk_distance(*p, r);
    let region = |t: f64| disk_neighborhood_box(r, t);
    let (_, curve) = neighborhood_curve(dist, region, &cfg.curve_t, cfg.samples.minkowski, seed)?;
    let target = PI * r * r;
    let content = curve.content_at_2.unwrap_or(f64::NAN);
    let oracle = curve.content_t.map(|t| disk_tube_volume(r, t) / (PI * t * t));
    let dim_ok = (curve.fitted_dimension - 2.0).abs() <= tol.dimension;
    let content_ok = (content / target - 1.0).abs() <= tol.content;
    let thm = theorem31_check(dist, region, r, 1.0, &cfg.obstruction_t, cfg.samples.minkowski, derive_seed(seed, 1))?;
    let ratios_ok = thm.rows.iter().all(|row| row.ratio >= 1.0 - tol.theorem_slack);
    let cor_bound = PI * (r * r - 1.0);
    let cor_ok = content >= cor_bound;
    let ratios: Vec<String> = thm.rows.iter().map(|row| format!("{:.3}", row.ratio)).collect();
    Ok(Criterion {
        id: 9,
        title: "Minkowski estimator on the Lagrangian disk",
        passed: dim_ok && content_ok && ratios_ok && cor_ok,
        summary: format!(
            "dimension {:.3} (2 ± {}), content {content:.4} vs {target:.4} (± {:.0}%), obstruction ratios [{}] (>= {}), content >= {cor_bound:.4}: {cor_ok}",
            curve.fitted_dimension,
            tol.dimension,
            100.0 * tol.content,
            ratios.join(", "),
            1.0 - tol.theorem_slack
        ),
        details: json!({ "curve": curve, "tube_oracle_content": oracle, "theorem": thm, "content_bound": cor_bound }),
    })
}

pub fn toric_containment(cfg: &RunConfig) -> Result<Criterion, CliError> {
    let seed = seed_for(cfg, 10);
    let mut rows = Vec::new();
    let mut ok = true;
    for a in &cfg.toric_alphas {
        let alpha = parse_alpha(a)?;
        let FitResult::Fit { fit, .. } = find_fitting_triple(&alpha)? else {
            return Err(CliError::Domain(format!("alpha = {a} has no half-strip fit")));
        };
        let rep = triangle_torus_containment(&fit, cfg.samples.toric, seed)?;
        let good = rep.matches_height() && rep.max_second_action.is_some_and(|m| m < 1.0);
        ok &= good;
        rows.push(json!({ "alpha": a, "report": rep, "slack": rep.sampling_slack(), "ok": good }));
    }
    let shown: Vec<String> = rows
        .iter()
        .map(|r| format!("{}: max {:.6} vs {}", r["alpha"].as_str().unwrap_or(""), r["report"]["max_second_action"].as_f64().unwrap_or(f64::NAN), r["report"]["height"].as_str().unwrap_or("")))
        .collect();
    Ok(Criterion {
        id: 10,
        title: "toric containment",
        passed: ok,
        summary: format!("max pi|z2|^2 within sampling slack of the height: {}", shown.join("; ")),
        details: json!({ "rows": rows }),
    })
}

pub fn reproducibility(cfg: &RunConfig) -> Result<Criterion, CliError> {
    let seed = seed_for(cfg, 11);
    let n = cfg.samples.sigma;
    let ball = |p: &[f64; 4]| p.iter().map(|x| x * x).sum::<f64>() < 1.0;
    let a = mc_volume(ball, &cube(1.0), n, seed)?;
    let b = mc_volume(ball, &cube(1.0), 4 * n, seed)?;
    let halving = a.std_error / b.std_error;
    let halving_ok = (halving / 2.0 - 1.0).abs() <= cfg.tolerances.sigma_halving;
    let again = mc_volume(ball, &cube(1.0), n, seed)?;
    let identical = serde_json::to_string(&a)? == serde_json::to_string(&again)?;
    Ok(Criterion {
        id: 11,
        title: "reproducibility",
        passed: halving_ok && identical,
        summary: format!("sigma(n)/sigma(4n) = {halving:.4} (2 ± {:.0}%), repeated estimate identical: {identical}", 100.0 * cfg.tolerances.sigma_halving),
        details: json!({ "n": n, "sigma_n": a.std_error, "sigma_4n": b.std_error, "ratio": halving, "identical": identical }),
    })
}
