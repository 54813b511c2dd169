//! Flow-invariant measures `μ = (ν × Leb) / ∫r dν` and their induced measures.

use crate::error::{Error, Result};
use crate::thermo::GibbsMeasure;

use super::flow::Roof;

/// The suspension of a Gibbs measure under a roof.
#[derive(Clone, Debug)]
pub struct FlowMeasure {
    pub base: GibbsMeasure,
    pub roof: Roof<f64>,
    /// `∫ r dν`.
    pub normalizer: f64,
}

pub fn suspend_measure(base: &GibbsMeasure, roof: &Roof<f64>) -> Result<FlowMeasure> {
    let graph = base.graph();
    let table = roof.potential().table();
    let len = roof.potential().window_len();
    if table.keys().any(|w| !graph.is_admissible(w)) || table.len() != graph.words(len).len() {
        return Err(Error::ShapeMismatch("roof table does not match the base graph".into()));
    }
    let normalizer = base.integrate(roof.potential());
    Ok(FlowMeasure { base: base.clone(), roof: roof.clone(), normalizer })
}

impl FlowMeasure {
    /// `μ(C × [a, b))` for `[a, b)` below the roof everywhere on `C`.
    pub fn block_mass(&self, anchor: i64, symbols: &[usize], lo: f64, hi: f64) -> Result<f64> {
        let inf = self.roof.inf_on(self.base.graph(), anchor, symbols);
        if hi > inf || lo < 0.0 || hi < lo {
            return Err(Error::IntervalAboveRoof { lo, hi, roof: inf });
        }
        Ok(self.base.cylinder_mass(symbols) * (hi - lo) / self.normalizer)
    }

    /// `μ(C × [a, b))` with the interval clipped at the roof of each point.
    pub fn block_mass_clipped(&self, anchor: i64, symbols: &[usize], lo: f64, hi: f64) -> f64 {
        let graph = self.base.graph();
        self.roof
            .values_on(graph, anchor, symbols)
            .into_iter()
            .map(|((_, w), r)| {
                let len = (hi.min(r) - lo.max(0.0)).max(0.0);
                self.base.cylinder_mass(&w) * len
            })
            .sum::<f64>()
            / self.normalizer
    }

    /// Kolmogorov–Sinai entropy of the flow by the Abramov formula.
    pub fn entropy(&self) -> f64 {
        self.base.entropy() / self.normalizer
    }
}

/// Recovers the base measure: `ν(C) = ∫r dν · μ(C × [0, ε)) / ε` with `ε = inf r`.
pub fn induce_measure(fm: &FlowMeasure) -> Result<GibbsMeasure> {
    let eps = fm.roof.inf();
    let masses: Vec<f64> = fm
        .base
        .words()
        .iter()
        .map(|w| fm.block_mass(0, w, 0.0, eps).map(|m| m * fm.normalizer / eps))
        .collect::<Result<_>>()?;
    fm.base.with_word_masses(&masses)
}

/// `h_μ(σ_r) = h_ν(σ) / ∫r dν`.
pub fn abramov_entropy(base_entropy: f64, fm: &FlowMeasure) -> Result<f64> {
    if base_entropy.is_nan() || base_entropy < 0.0 {
        return Err(Error::HypothesisFailed(format!("base entropy {base_entropy} must be nonnegative")));
    }
    Ok(base_entropy / fm.normalizer)
}
