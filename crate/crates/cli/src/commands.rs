//! Subcommand implementations.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use coarse_core::actions::{gaussian_embedding, ActionFile, AffineAction, DescentConfig, DescentOutcome};
use coarse_core::centres::{BoundedSet, ShoppingConfig};
use coarse_core::groups::{FiniteGroup, GroupFamily, GroupFile};
use coarse_core::homeo::{commutator_certificate, ob_bounded_check, LiftFile, PLLift, Q};
use coarse_core::metric::{Point, SpaceSpec};
use coarse_core::product::{dyadic_cyclic_family, unbounded_cocycle_demo, BlockCocycle, TruncatedProduct};
use coarse_core::spectral::{expander_check, spectral_report};
use coarse_core::{rng, Error};
use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::io::{read_json, read_points, write_csv};
use crate::{
    ActionTask, ActionsArgs, CentreCheck, CentresArgs, Cli, Command, Demo, GlobalOpts, HomeoArgs, ProductArgs,
    SpectraArgs,
};

/// Inputs, seed and tolerances of a run, copied into every report.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub inputs: Vec<String>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub output: Option<String>,
}

#[derive(Serialize)]
struct Report {
    manifest: RunManifest,
    holds: bool,
    result: Value,
}

struct Outcome {
    subcommand: &'static str,
    inputs: Vec<String>,
    tolerances: Vec<(&'static str, f64)>,
    holds: bool,
    result: Value,
}

pub fn run(cli: &Cli) -> Result<bool> {
    let g = &cli.global;
    let outcome = match &cli.command {
        Command::Centres(a) => centres(g, a)?,
        Command::Spectra(a) => spectra(g, a)?,
        Command::Product(a) => product(g, a)?,
        Command::Actions(a) => actions(g, a)?,
        Command::Homeo(a) => homeo(a)?,
    };
    let holds = outcome.holds;
    let mut tolerances: BTreeMap<String, f64> = BTreeMap::new();
    tolerances.insert("tol".into(), g.tol);
    for (k, v) in outcome.tolerances {
        tolerances.insert(k.into(), v);
    }
    let report = Report {
        manifest: RunManifest {
            subcommand: outcome.subcommand.into(),
            inputs: outcome.inputs,
            seed: g.seed,
            tolerances,
            output: g.out.as_ref().map(|p| p.display().to_string()),
        },
        holds,
        result: outcome.result,
    };
    let text = serde_json::to_string_pretty(&report)? + "\n";
    match &g.out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(holds)
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

fn parse_space(spec: &str, dim: usize) -> Result<SpaceSpec, Error> {
    match spec.trim() {
        "hilbert" => SpaceSpec::hilbert(dim),
        s => match s.strip_prefix("lp:").map(str::parse::<f64>) {
            Some(Ok(p)) => SpaceSpec::lp(p, dim),
            _ => Err(Error::input(format!("space must be 'hilbert' or 'lp:P', got '{s}'"))),
        },
    }
}

fn load_set(path: &Path, space: &str) -> Result<BoundedSet, Error> {
    let rows = read_points(path)?;
    let spec = parse_space(space, rows[0].len())?;
    BoundedSet::from_rows(spec, &rows)
}

fn centres(g: &GlobalOpts, a: &CentresArgs) -> Result<Outcome> {
    let inputs: Vec<String> = a.inputs.iter().map(|p| path_str(p)).collect();
    match a.check {
        Some(CentreCheck::Nested) => {
            let [pa, pb] = a.inputs.as_slice() else {
                return Err(Error::input("--check nested needs exactly two files, A then B ⊆ A").into());
            };
            let set_a = load_set(pa, &a.space)?;
            let set_b = load_set(pb, &a.space)?;
            let za = set_a.chebyshev_centre(g.tol)?;
            let zb = set_b.chebyshev_centre(g.tol)?;
            let stability = set_a.stability_bound_check(&set_b, a.eps)?;
            let hilbert = if set_a.space().is_hilbert() {
                Some(set_a.hilbert_nested_bound(&set_b)?)
            } else {
                None
            };
            let holds = stability.holds && hilbert.is_none_or(|h| h.holds);
            Ok(Outcome {
                subcommand: "centres",
                inputs,
                tolerances: vec![("eps", a.eps)],
                holds,
                result: json!({
                    "check": "nested",
                    "space": set_a.space(),
                    "centre_a": za.centre, "rho_a": za.rho,
                    "centre_b": zb.centre, "rho_b": zb.rho,
                    "kappa": set_a.space().kappa(a.eps)?,
                    "stability": stability,
                    "hilbert_bound": hilbert,
                }),
            })
        }
        None => {
            let [path] = a.inputs.as_slice() else {
                return Err(Error::input("centres takes one file unless --check is given").into());
            };
            let set = load_set(path, &a.space)?;
            let z = set.chebyshev_centre(g.tol)?;
            let (audit, holds) = leave_one_out_audit(&set, a.eps)?;
            let shopping = match a.shopping {
                Some(budget) => Some(set.shopping_centre(&ShoppingConfig::halving(budget, a.eps0, g.tol))?),
                None => None,
            };
            Ok(Outcome {
                subcommand: "centres",
                inputs,
                tolerances: vec![("eps", a.eps), ("eps0", a.eps0)],
                holds,
                result: json!({
                    "space": set.space(),
                    "points": set.len(),
                    "centre": z.centre,
                    "rho": z.rho,
                    "iterations": z.iterations,
                    "residual": z.residual,
                    "support": z.support,
                    "stability_audit": audit,
                    "shopping": shopping,
                }),
            })
        }
    }
}

/// Number of leave-one-out subsets audited for a single set.
const AUDIT_LIMIT: usize = 64;

/// Stability bounds of `A` against `A ∖ {a_i}` for the first points.
fn leave_one_out_audit(set: &BoundedSet, eps: f64) -> Result<(Value, bool), Error> {
    let points: Vec<Point> = set.points().collect();
    if points.len() < 2 {
        return Ok((Value::Null, true));
    }
    let mut worst_margin = f64::NEG_INFINITY;
    let mut holds = true;
    let checked = points.len().min(AUDIT_LIMIT);
    for i in 0..checked {
        let rest: Vec<Point> = points
            .iter()
            .enumerate()
            .filter(|&(j, p)| j != i && *p != points[i])
            .map(|(_, p)| p.clone())
            .collect();
        if rest.is_empty() {
            continue;
        }
        let sub = BoundedSet::new(*set.space(), rest)?;
        let s = set.stability_bound_check(&sub, eps)?;
        worst_margin = worst_margin.max(s.lhs - s.bound);
        holds &= s.holds;
        if set.space().is_hilbert() {
            let h = set.hilbert_nested_bound(&sub)?;
            worst_margin = worst_margin.max(h.lhs - h.bound);
            holds &= h.holds;
        }
    }
    Ok((
        json!({ "subsets": checked, "eps": eps, "worst_margin": worst_margin, "holds": holds }),
        holds,
    ))
}

fn load_family(spec: &str, cap: usize) -> Result<GroupFamily, Error> {
    if spec.ends_with(".json") {
        let file: GroupFile = read_json(&PathBuf::from(spec))?;
        let g = FiniteGroup::from_file(file)?;
        return Ok(GroupFamily::new(spec, vec![g]));
    }
    GroupFamily::parse(spec, cap)
}

fn spectra(g: &GlobalOpts, a: &SpectraArgs) -> Result<Outcome> {
    let family = load_family(&a.family, g.cap)?;
    let report = expander_check(&family, g.threshold, g.cap)?;
    if let Some(path) = &a.csv {
        let mut rows = Vec::new();
        for m in &family.members {
            let r = spectral_report(m, g.cap)?;
            rows.extend(r.eigenvalues.iter().map(|e| vec![r.label.clone(), e.to_string()]));
        }
        write_csv(path, &["label", "eigenvalue"], rows)?;
    }
    Ok(Outcome {
        subcommand: "spectra",
        inputs: vec![a.family.clone()],
        tolerances: vec![("threshold", g.threshold)],
        holds: true,
        result: serde_json::to_value(report)?,
    })
}

fn product(g: &GlobalOpts, a: &ProductArgs) -> Result<Outcome> {
    match a.demo {
        Demo::UnboundedCocycle => {
            let family = dyadic_cyclic_family(a.levels)?;
            let lengths: Vec<usize> = (0..=6).map(|k| 1usize << k).collect();
            let report = unbounded_cocycle_demo(&family, a.levels, &lengths, g.cap)?;
            if let Some(path) = &a.csv {
                let rows = report.rows.iter().map(|r| [r.m.to_string(), r.norm.to_string()]);
                write_csv(path, &["m", "norm"], rows)?;
            }
            Ok(Outcome {
                subcommand: "product",
                inputs: vec!["unbounded-cocycle".into(), family.label.clone()],
                tolerances: vec![],
                holds: report.generator_norm < 1.0 && report.strictly_increasing,
                result: serde_json::to_value(report)?,
            })
        }
        Demo::Iteration => {
            let family = GroupFamily::parse(&a.family, g.cap)?;
            let p = TruncatedProduct::new(&family, family.len(), g.cap)?;
            let h = p.gap()?;
            if !(h > 0.0) {
                return Err(Error::input("the family has no spectral gap").into());
            }
            let k0 = (2.0 / h - 1e-12).ceil().max(1.0) as usize;
            let v0 = p.perturbed_start(0.5 / k0 as f64, g.seed)?;
            let trace = p.almost_invariant_iteration(&v0, Some(k0), a.steps, Some(g.tol))?;
            let probes = gap_probes(&p, 1000, g.seed)?;
            if let Some(path) = &a.csv {
                let rows = trace.steps.iter().map(|s| {
                    [
                        s.k.to_string(),
                        s.step.to_string(),
                        s.bound.to_string(),
                        s.sup_displacement.to_string(),
                    ]
                });
                write_csv(path, &["k", "step", "bound", "sup_displacement"], rows)?;
            }
            let holds = trace.final_sup_displacement <= g.tol && probes.1;
            Ok(Outcome {
                subcommand: "product",
                inputs: vec!["iteration".into(), a.family.clone()],
                tolerances: vec![("target", g.tol)],
                holds,
                result: json!({
                    "h": trace.h,
                    "k0": trace.k0,
                    "steps": trace.steps.len(),
                    "start_displacement": p.sup_displacement(&v0)?,
                    "final_sup_displacement": trace.final_sup_displacement,
                    "distance_to_invariant": trace.distance_to_invariant,
                    "max_step_ratio": trace.steps.iter().map(|s| s.step / s.bound).fold(0.0, f64::max),
                    "gap_probes": probes.0,
                }),
            })
        }
        Demo::Kazhdan => {
            let family = GroupFamily::parse(&a.family, g.cap)?;
            let p = TruncatedProduct::new(&family, family.len(), g.cap)?;
            let mut r = rng::split(g.seed, 1);
            let w = DVector::from_fn(p.dim(), |_, _| r.random_range(-1.0..1.0));
            let cocycle = BlockCocycle::coboundary(&p, &w)?;
            let base = DVector::zeros(p.dim());
            let c = p.generator_displacement(&cocycle, &base)?;
            let report = p.kazhdan_displacement_check(&cocycle, &base, c, a.max_len, a.samples, g.seed)?;
            Ok(Outcome {
                subcommand: "product",
                inputs: vec!["kazhdan".into(), a.family.clone()],
                tolerances: vec![],
                holds: report.holds,
                result: serde_json::to_value(report)?,
            })
        }
    }
}

/// Checks `h |pv - v| ≤ sup_c |cv - v|` on random vectors.
fn gap_probes(p: &TruncatedProduct, count: usize, seed: u64) -> Result<(Value, bool), Error> {
    let mut r = rng::split(seed, 2);
    let mut worst_ratio: f64 = 0.0;
    let mut holds = true;
    for _ in 0..count {
        let v = DVector::from_fn(p.dim(), |_, _| r.random_range(-1.0..1.0));
        let audit = p.gap_projection_inequality(&v)?;
        holds &= audit.holds;
        if audit.rhs > 0.0 {
            worst_ratio = worst_ratio.max(audit.lhs / audit.rhs);
        }
    }
    Ok((
        json!({ "probes": count, "worst_ratio": worst_ratio, "holds": holds }),
        holds,
    ))
}

fn actions(g: &GlobalOpts, a: &ActionsArgs) -> Result<Outcome> {
    let inputs = vec![format!("{:?}", a.task).to_lowercase(), path_str(&a.file)];
    if a.task == ActionTask::Gaussian {
        let points: Vec<Point> = read_points(&a.file)?.into_iter().map(Point::new).collect();
        let e = gaussian_embedding(&points, a.t)?;
        return Ok(Outcome {
            subcommand: "actions",
            inputs,
            tolerances: vec![("t", a.t), ("factor_residual", 1e-8)],
            holds: e.residual <= 1e-8,
            result: json!({
                "points": points.len(),
                "min_eigenvalue": e.min_eigenvalue,
                "residual": e.residual,
            }),
        });
    }
    let file: ActionFile = read_json(&a.file)?;
    let action = AffineAction::from_file(file)?;
    match a.task {
        ActionTask::Descend => {
            let start = match &a.start {
                Some(v) => Point::new(v.clone()),
                None => Point::zeros(action.dim()),
            };
            let cfg = DescentConfig {
                alpha: a.alpha,
                radius: a.radius,
                tol: g.tol,
                max_iters: a.max_iters,
                seed: g.seed,
                ..Default::default()
            };
            let outcome = action.fixed_point_search(&start, &cfg)?;
            if let Some(path) = &a.csv {
                let rows = outcome
                    .trace()
                    .iter()
                    .map(|s| [s.n.to_string(), s.displacement.to_string(), s.step_size.to_string()]);
                write_csv(path, &["n", "displacement", "step_size"], rows)?;
            }
            let holds = match &outcome {
                DescentOutcome::Converged { displacement, .. } => *displacement <= g.tol,
                DescentOutcome::Witness {
                    sampled_min,
                    displacement,
                    ..
                } => *sampled_min > a.alpha * displacement,
            };
            Ok(Outcome {
                subcommand: "actions",
                inputs,
                tolerances: vec![("alpha", a.alpha), ("radius", a.radius)],
                holds,
                result: serde_json::to_value(&outcome)?,
            })
        }
        ActionTask::Cocycle => {
            let defect = action.cocycle_defect(500, g.seed);
            let excess = action.lipschitz_excess(500, 10.0, g.seed);
            Ok(Outcome {
                subcommand: "actions",
                inputs,
                tolerances: vec![("cocycle", 1e-9), ("lipschitz", 1e-9)],
                holds: defect <= 1e-9 && excess <= 1e-9,
                result: json!({
                    "cocycle_defect": defect,
                    "lipschitz_excess": excess,
                }),
            })
        }
        ActionTask::Coboundary => {
            let v = action.coboundary_solve()?;
            Ok(Outcome {
                subcommand: "actions",
                inputs,
                tolerances: vec![("residual", 1e-7)],
                holds: true,
                result: json!({ "coboundary": v.is_some(), "fixed_point": v }),
            })
        }
        ActionTask::Gaussian => unreachable!("handled above"),
    }
}

fn homeo(a: &HomeoArgs) -> Result<Outcome> {
    if a.lifts.is_empty() {
        let report = commutator_certificate()?;
        return Ok(Outcome {
            subcommand: "homeo",
            inputs: vec![],
            tolerances: vec![("exact", 0.0)],
            holds: report.holds,
            result: serde_json::to_value(report)?,
        });
    }
    let bound: Q = a
        .bound
        .parse()
        .map_err(|_| Error::input(format!("'{}' is not a rational", a.bound)))?;
    let lifts = a
        .lifts
        .iter()
        .map(|p| {
            let file: LiftFile = read_json(p)?;
            PLLift::from_file(&file)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let report = ob_bounded_check(&lifts, &bound);
    Ok(Outcome {
        subcommand: "homeo",
        inputs: a.lifts.iter().map(|p| path_str(p)).collect(),
        tolerances: vec![("exact", 0.0)],
        holds: true,
        result: serde_json::to_value(report)?,
    })
}
