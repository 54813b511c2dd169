//! Command implementations producing report `results` sections.

use std::collections::BTreeMap;

use clap::ValueEnum;
use serde_json::{json, Map, Value};

use super::config::{parse_num, AnalysisConfig};
use super::report::{estimate, exact, float};
use crate::cocycle::{classify_flow, ClassificationReport, ClassifyOptions, FlowVerdict, LatticeVerdict};
use crate::error::{Error, Result};
use crate::mixing::{
    build_cube_partition, dbar_distributions, exact_result, joint_distribution, k_mixing_report, to_rational_distribution,
    vwb_report, Distribution, FlowSet, OrderedPartition, Space,
};
use crate::scalar::Rational;
use crate::shift::{Graph, Vertex};
use crate::suspension::suspend_measure;
use crate::thermo::{GibbsMeasure, Potential, DEFAULT_MAX_ITER};
use num_traits::ToPrimitive;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    AnalyzeGraph,
    Pressure,
    Measure,
    Classify,
    MixingReport,
    Dbar,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::AnalyzeGraph => "analyze-graph",
            Command::Pressure => "pressure",
            Command::Measure => "measure",
            Command::Classify => "classify",
            Command::MixingReport => "mixing-report",
            Command::Dbar => "dbar",
        }
    }

    /// Commands that sample and therefore need a seed.
    pub fn needs_seed(&self) -> bool {
        matches!(self, Command::Classify)
    }
}

fn word_text(graph: &Graph, w: &[Vertex]) -> String {
    w.iter().map(|&v| graph.name(v)).collect::<Vec<_>>().join(",")
}

fn measure(cfg: &AnalysisConfig) -> Result<GibbsMeasure> {
    GibbsMeasure::new(&cfg.graph, &cfg.potential, cfg.tolerances.pressure, DEFAULT_MAX_ITER)
}

/// Relative eigen-residual, which bounds the error in `log λ` to first order.
fn pressure_bound(m: &GibbsMeasure) -> f64 {
    let (a, b) = m.residuals();
    a.max(b)
}

pub fn run(cmd: Command, cfg: &AnalysisConfig, seed: Option<u64>) -> Result<Value> {
    match cmd {
        Command::AnalyzeGraph => analyze_graph(cfg),
        Command::Pressure => pressure(cfg),
        Command::Measure => measure_report(cfg),
        Command::Classify => classify(cfg, seed.expect("checked by caller")),
        Command::MixingReport => mixing_report(cfg),
        Command::Dbar => dbar(cfg),
    }
}

fn analyze_graph(cfg: &AnalysisConfig) -> Result<Value> {
    let g = &cfg.graph;
    let (period, classes) = g.period_and_decomposition()?;
    let mme = GibbsMeasure::new(g, &Potential::zero(g), cfg.tolerances.pressure, DEFAULT_MAX_ITER)?;
    Ok(json!({
        "vertices": g.names(),
        "edge_count": g.num_edges(),
        "transitive": g.is_transitive(),
        "mixing": g.is_mixing(),
        "period": period,
        "cyclic_classes": classes.iter().map(|c| c.iter().map(|&v| g.name(v).to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "topological_entropy": estimate(mme.log_pressure(), pressure_bound(&mme)),
    }))
}

fn pressure(cfg: &AnalysisConfig) -> Result<Value> {
    let m = measure(cfg)?;
    let bound = pressure_bound(&m);
    Ok(json!({
        "lambda": estimate(m.lambda(), bound * m.lambda()),
        "log_pressure": estimate(m.log_pressure(), bound),
        "iterations": m.iterations(),
        "period": m.period(),
        "potential_window": [m.potential().window().0, m.potential().window().1],
    }))
}

fn measure_report(cfg: &AnalysisConfig) -> Result<Value> {
    let m = measure(cfg)?;
    let g = &cfg.graph;
    let bound = pressure_bound(&m);
    let max_len = cfg.param_u64("cylinder_len", 2)?.max(1) as usize;
    let mut cylinders = Map::new();
    for len in 1..=max_len {
        for w in g.words(len) {
            cylinders.insert(word_text(g, &w), estimate(m.cylinder_mass(&w), bound));
        }
    }
    // Σ_{σy = x} g(y) - 1 over all cylinders carrying g
    let l = m.word_len();
    let mut g_residual: f64 = 0.0;
    for x in g.words(l) {
        let s: f64 = g.predecessors(x[0]).iter().map(|&v| {
            let mut y = vec![v];
            y.extend_from_slice(&x);
            m.g(&y).unwrap_or(0.0)
        }).sum();
        g_residual = g_residual.max((s - 1.0).abs());
    }
    Ok(json!({
        "log_pressure": estimate(m.log_pressure(), bound),
        "entropy": estimate(m.entropy(), bound),
        "cylinders": cylinders,
        "g_normalization_residual": float(g_residual),
        "word_len": l,
    }))
}

fn verdict_json(v: &LatticeVerdict) -> Value {
    match v {
        LatticeVerdict::Dense => json!({"kind": "Dense"}),
        LatticeVerdict::Lattice(c) => json!({"kind": "Lattice", "c": float(*c)}),
    }
}

fn classification_json(r: &ClassificationReport, exact_roof: bool) -> Value {
    let opt = |x: Option<f64>| x.map_or(Value::Null, float);
    json!({
        "classification": {
            "arithmetic": r.arithmetic,
            "c": opt(r.c),
            "theta": opt(r.theta),
            "period_p": r.period_p,
            "flow_period": opt(r.flow_period),
            "verdict": match r.verdict {
                FlowVerdict::Bernoulli => "Bernoulli",
                FlowVerdict::BernoulliTimesRotation => "BernoulliTimesRotation",
            },
        },
        "holonomy": {
            "verdict": verdict_json(&r.holonomy.verdict),
            "residual": float(r.holonomy.residual),
            "periodic_sums_verdict": verdict_json(&r.holonomy.sums_verdict),
            "loop_weights_verdict": verdict_json(&r.holonomy.loops_verdict),
            "consistent": r.holonomy.consistent,
            "sampled_weights": r.holonomy.sampled_weights.iter().map(|w| float(*w)).collect::<Vec<_>>(),
            "weights_exact": exact_roof,
        },
    })
}

fn classify(cfg: &AnalysisConfig, seed: u64) -> Result<Value> {
    let m = measure(cfg)?;
    let opts = ClassifyOptions {
        tol: cfg.tolerances.lattice,
        max_len: cfg.param_u64("max_len", 8)?.max(1) as usize,
        loops: cfg.param_u64("loops", 64)?.max(1) as usize,
        legs_per_loop: cfg.param_u64("legs", 4)? as usize,
        seed,
    };
    let report = match &cfg.roof_exact {
        Some(r) => classify_flow(&m, r, &cfg.graph, &opts)?,
        None => classify_flow(&m, &cfg.roof, &cfg.graph, &opts)?,
    };
    let mut out = classification_json(&report, cfg.roof_exact.is_some());
    out["evidence"] = json!({"max_cycle_len": opts.max_len, "loops": opts.loops, "legs_per_loop": opts.legs_per_loop});
    Ok(out)
}

fn height_set(cfg: &AnalysisConfig, param: Option<&Value>, default_hi: f64) -> Result<FlowSet> {
    let Some(param) = param else {
        return Ok(FlowSet::block(0, vec![0], 0.0, default_hi));
    };
    let obj = param.as_object().ok_or_else(|| Error::Validation { field: "params.B".into(), reason: "expected an object".into() })?;
    let word = cfg.param_word("params.B.word", obj.get("word").and_then(Value::as_str).unwrap_or(""))?;
    let anchor = obj.get("anchor").and_then(Value::as_i64).unwrap_or(0);
    let lo = obj.get("lo").map(|v| parse_num(v, "params.B.lo")).transpose()?.map_or(0.0, |n| n.float);
    let hi = obj.get("hi").map(|v| parse_num(v, "params.B.hi")).transpose()?.map_or(f64::INFINITY, |n| n.float);
    Ok(FlowSet::block(anchor, word, lo, hi))
}

fn mixing_report(cfg: &AnalysisConfig) -> Result<Value> {
    let m = measure(cfg)?;
    let fm = suspend_measure(&m, &cfg.roof)?;
    let space = Space::Flow(&fm);
    let inf_r = cfg.roof.inf();
    let n = cfg.param_u64("n", 0)? as usize;
    let delta = cfg.param_f64("delta")?.unwrap_or(inf_r.min(1.0) / 2.0);
    let t0 = cfg.param_f64("t0")?.unwrap_or(inf_r / 2.0);
    let big_n = cfg.param_u64("N", 2)?;
    let big_n_prime = cfg.param_u64("N_prime", big_n + 1)?;
    let process_len = cfg.param_u64("process_len", 1)?.max(1);
    let k_delta = cfg.param_f64("k_delta")?.unwrap_or(0.05);
    if big_n_prime < big_n {
        return Err(Error::Validation { field: "params.N_prime".into(), reason: "must be >= N".into() });
    }
    let cubes = build_cube_partition(&fm, n, delta)?;
    let gamma = cubes.to_partition();
    let b = height_set(cfg, cfg.params.get("B"), t0)?;
    let k = k_mixing_report(&space, &b, &gamma, t0, big_n, big_n_prime, k_delta)?;
    let v = vwb_report(&space, &gamma, t0, process_len, big_n, big_n_prime, cfg.tolerances.dbar_cap)?;
    let label = |l: &[usize]| l.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    Ok(json!({
        "flow_entropy": estimate(fm.entropy(), pressure_bound(&m)),
        "cube_partition": {
            "n": n,
            "delta": float(delta),
            "cubes": cubes.cubes.len(),
            "remainder_atoms": cubes.remainder.len(),
            "remainder_mass": float(cubes.remainder_mass),
        },
        "k_mixing": {
            "coverage": {"t0": float(t0), "N": big_n, "N_prime": big_n_prime},
            "delta": float(k_delta),
            "mu_B": float(k.mu_b),
            "fraction_good": float(k.fraction_good),
            "max_deviation": float(k.max_deviation),
            "flagged": k.flagged,
            "atoms": k.atoms.iter().map(|a| json!({
                "label": label(&a.label), "mass": float(a.mass), "conditional": float(a.conditional), "deviation": float(a.deviation),
            })).collect::<Vec<_>>(),
        },
        "vwb": {
            "coverage": {"t0": float(t0), "n": process_len, "N": big_n, "N_prime": big_n_prime},
            "epsilon_achieved": exact(v.epsilon_achieved, None),
            "atoms": v.atoms.iter().map(|a| json!({
                "label": label(&a.label), "mass": float(a.mass), "dbar": exact(a.dbar, None),
            })).collect::<Vec<_>>(),
        },
    }))
}

fn parse_distribution(v: &Value, field: &str) -> Result<Distribution> {
    let obj = v.as_object().ok_or_else(|| Error::Validation { field: field.into(), reason: "expected an object".into() })?;
    let mut out = BTreeMap::new();
    for (key, mass) in obj {
        let path = format!("{field}.{key}");
        let label = key
            .split(',')
            .map(|s| s.trim().parse::<usize>().map_err(|_| Error::Validation { field: path.clone(), reason: "labels must be integers".into() }))
            .collect::<Result<Vec<_>>>()?;
        let n = parse_num(mass, &path)?;
        let r = n.exact.unwrap_or_else(|| Rational::from_float(n.float).unwrap_or_default());
        out.insert(label, r);
    }
    Ok(out)
}

fn dbar(cfg: &AnalysisConfig) -> Result<Value> {
    let cap = cfg.tolerances.dbar_cap;
    let (p, q, source) = match cfg.params.get("dbar") {
        Some(param) => {
            let get = |k: &str| param.get(k).ok_or_else(|| Error::Validation { field: format!("params.dbar.{k}"), reason: "missing".into() });
            (parse_distribution(get("p")?, "params.dbar.p")?, parse_distribution(get("q")?, "params.dbar.q")?, "params")
        }
        None => {
            let len = cfg.param_u64("process_len", 2)?.max(1) as i64;
            let m = measure(cfg)?;
            let mme = GibbsMeasure::new(&cfg.graph, &Potential::zero(&cfg.graph), cfg.tolerances.pressure, DEFAULT_MAX_ITER)?;
            let seq: Vec<OrderedPartition> = (1..=len).map(|i| OrderedPartition::coordinate(&cfg.graph, i)).collect();
            let p = to_rational_distribution(&joint_distribution(&seq, &Space::Shift(&m))?);
            let q = to_rational_distribution(&joint_distribution(&seq, &Space::Shift(&mme))?);
            (p, q, "coordinates under the equilibrium measure vs the measure of maximal entropy")
        }
    };
    let coupling = dbar_distributions(&p, &q, cap)?;
    let r = exact_result(&coupling);
    let label = |l: &[usize]| l.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
    Ok(json!({
        "source": source,
        "mode": "Exact",
        "dbar": exact(r.value, Some(coupling.value.to_string())),
        "coupling": coupling.plan.iter().map(|(a, b, m)| json!({
            "from": label(a), "to": label(b), "mass": exact(m.to_f64().unwrap_or(f64::NAN), Some(m.to_string())),
        })).collect::<Vec<_>>(),
    }))
}
