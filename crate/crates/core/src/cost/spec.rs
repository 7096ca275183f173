//! JSON cost specifications:
//! `{"kind": "...", "n": ..., "params": {...}, "domain": {"box": [...], "cut_margin": ...}}`

use serde::Deserialize;

use super::{builtins, CostChart, DomainSpec};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostSpec {
    pub kind: String,
    pub n: usize,
    #[serde(default)]
    pub params: serde_json::Value,
    #[serde(default)]
    pub domain: Option<DomainSpecJson>,
}

/// `box` holds one `[lo, hi]` pair per coordinate; with n entries it applies
/// to both sides, with 2n entries the first n bound the source side.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSpecJson {
    #[serde(rename = "box")]
    pub bounds: Vec<[f64; 2]>,
    #[serde(default)]
    pub cut_margin: Option<f64>,
}

impl CostSpec {
    pub fn build(&self) -> Result<CostChart> {
        let mut chart = builtins::make_from_kind(&self.kind, self.n, &self.params)?;
        if let Some(dom) = &self.domain {
            let default_cut = chart.domain.cut_margin;
            chart.domain = dom.to_domain(self.n, default_cut)?;
        }
        Ok(chart)
    }
}

impl DomainSpecJson {
    pub fn to_domain(&self, n: usize, default_cut: f64) -> Result<DomainSpec> {
        let cut = self.cut_margin.unwrap_or(default_cut);
        let pairs: Vec<(f64, f64)> = self.bounds.iter().map(|b| (b[0], b[1])).collect();
        if pairs.iter().any(|&(lo, hi)| !(lo < hi)) {
            return Err(Error::Config("empty or inverted box bounds".into()));
        }
        if pairs.len() == n {
            Ok(DomainSpec::symmetric(&pairs, cut))
        } else if pairs.len() == 2 * n {
            Ok(DomainSpec::two_sided(&pairs[..n], &pairs[n..], cut))
        } else {
            Err(Error::Config(format!(
                "box must have {n} or {} coordinate bounds, got {}",
                2 * n,
                pairs.len()
            )))
        }
    }
}
