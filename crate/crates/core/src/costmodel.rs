//! Projected runtimes from calculation counts and measured rates.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable naming a cost-model config file.
pub const CONFIG_ENV: &str = "ZXPART_COST_MODEL";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", default, deny_unknown_fields)]
pub struct CostModel {
    /// Decomposition efficiency: a diagram with t T-spiders costs `2^{αt}`.
    pub alpha: f64,
    /// Clifford leaf evaluations per second in direct decomposition.
    pub r_decomp: f64,
    /// Leaf evaluations per second while precomputing segment tables.
    pub r_precomp: f64,
    /// Table products per second while regrouping.
    pub r_crossref: f64,
    /// Fixed per-run cost of planning, in seconds.
    pub t_overhead: f64,
    /// Projections below this many seconds are replaced by real runs in
    /// sweeps.
    pub real_run_threshold_secs: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel {
            alpha: 0.32,
            r_decomp: 1730.0,
            r_precomp: 21400.0,
            r_crossref: 412000.0,
            t_overhead: 0.0,
            real_run_threshold_secs: 100.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Estimate {
    pub calcs: f64,
    pub seconds: f64,
    pub log2_seconds: f64,
}

impl Estimate {
    fn new(calcs: f64, seconds: f64) -> Self {
        Estimate {
            calcs,
            seconds,
            log2_seconds: seconds.log2(),
        }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        let rates = [self.r_decomp, self.r_precomp, self.r_crossref];
        if rates.iter().any(|r| !(r.is_finite() && *r > 0.0)) {
            return Err(Error::Invalid("rates must be positive".into()));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::Invalid(format!("alpha must be in (0, 1], got {}", self.alpha)));
        }
        if !(self.t_overhead >= 0.0) || !(self.real_run_threshold_secs >= 0.0) {
            return Err(Error::Invalid("overhead and threshold must be non-negative".into()));
        }
        Ok(())
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    /// `S_decomp = 2^{αt}` leaf evaluations at `R_decomp`.
    pub fn estimate_decomp(&self, t: usize) -> Estimate {
        let calcs = (self.alpha * t as f64).exp2();
        Estimate::new(calcs, calcs / self.r_decomp)
    }

    /// `T_overhead + S_precomp/R_precomp + S_crossref/R_crossref`.
    pub fn estimate_smart(&self, s_precomp: f64, s_crossref: f64) -> Estimate {
        Estimate::new(
            s_precomp + s_crossref,
            self.t_overhead + s_precomp / self.r_precomp + s_crossref / self.r_crossref,
        )
    }

    /// Parses JSON (if the text starts with `{`) or flat `key=value` lines
    /// with `#` comments. Missing keys keep their defaults.
    pub fn parse(text: &str) -> Result<CostModel> {
        let cm = if text.trim_start().starts_with('{') {
            serde_json::from_str(text)?
        } else {
            let mut obj = serde_json::Map::new();
            for (i, raw) in text.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                    line: i + 1,
                    msg: "expected key=value".into(),
                })?;
                let num: f64 = v.trim().parse().map_err(|_| Error::Parse {
                    line: i + 1,
                    msg: format!("bad number {:?}", v.trim()),
                })?;
                obj.insert(k.trim().to_string(), serde_json::json!(num));
            }
            serde_json::from_value(serde_json::Value::Object(obj))?
        };
        let cm: CostModel = cm;
        cm.validate()?;
        Ok(cm)
    }

    pub fn load(path: &Path) -> Result<CostModel> {
        CostModel::parse(&std::fs::read_to_string(path)?)
    }

    /// The file named by [`CONFIG_ENV`] if set, else the defaults.
    pub fn from_env() -> Result<CostModel> {
        match std::env::var_os(CONFIG_ENV) {
            Some(p) => CostModel::load(Path::new(&p)),
            None => Ok(CostModel::default()),
        }
    }

    /// `key=value` form, loadable by [`CostModel::parse`].
    pub fn to_key_values(&self) -> String {
        format!(
            "alpha={}\nrDecomp={}\nrPrecomp={}\nrCrossref={}\ntOverhead={}\nrealRunThresholdSecs={}\n",
            self.alpha,
            self.r_decomp,
            self.r_precomp,
            self.r_crossref,
            self.t_overhead,
            self.real_run_threshold_secs
        )
    }
}
