//! Every constant of the embedding machinery as a tunable parameter.
//!
//! `paper()` uses the literal constants; `desk()` relaxes the ones that are vacuous or
//! impossible at a few hundred vertices.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineParams {
    pub profile: String,
    /// A1: `Δ^± ≤ c_maxdeg · ln n`.
    pub c_maxdeg: f64,
    /// A2: `d^±(v, V∖X) ≥ ln n / c_mindeg_inv`.
    pub c_mindeg_inv: f64,
    pub mindeg_floor: f64,
    pub a3_deg_exponent: f64,
    pub a3_expansion_exponent: f64,
    /// Multiplier on `n ln ln n / ln n` bounding `|A|` in A3.
    pub a3_size_frac: f64,
    pub partition_p: f64,
    pub partition_deg_inv: f64,
    pub partition_floor: f64,
    pub resample_budget_factor: f64,
    pub expander_ratio: f64,
    pub expander_frac: f64,
    /// `None` means `max(3, (ln n)^{1/3})`.
    pub d_extend: Option<f64>,
    /// `None` means `max(1, n / (100 d))`.
    pub m_extend: Option<f64>,
    /// Bad-set size cap as a fraction of n; `None` means `n lnlnln n / ln n`.
    pub bad_set_cap: Option<f64>,
    pub min_connect_len_factor: f64,
    pub connect_budget_frac: f64,
    pub cover_len_factor: f64,
    pub cover_deg_inv: f64,
    pub cover_deg_floor: f64,
    pub hierarchy_budget_factor: f64,
    pub spacing_factor: f64,
    pub window_frac: f64,
    /// Stream intensities as multiples of `ln n / n`.
    pub sprinkle_connect: f64,
    pub sprinkle_posa: f64,
    pub low_degree_inv: f64,
    pub low_degree_floor: f64,
    /// `i₀ = split_factor · n ln n`.
    pub split_factor: f64,
    /// Build `H_i` from the whole prefix instead of `D_{i₀}` plus edges at low vertices.
    pub use_full_prefix: bool,
    pub exact_cap: usize,
    pub sampled_trials: usize,
    pub extend_attempts: usize,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self::paper()
    }
}

fn ln(n: usize) -> f64 {
    (n.max(2) as f64).ln()
}

fn lnln(n: usize) -> f64 {
    ln(n).ln().max(f64::MIN_POSITIVE)
}

impl PipelineParams {
    pub fn paper() -> Self {
        PipelineParams {
            profile: "paper".into(),
            c_maxdeg: 100.0,
            c_mindeg_inv: 500.0,
            mindeg_floor: 0.0,
            a3_deg_exponent: 2.0 / 3.0,
            a3_expansion_exponent: 1.0 / 3.0,
            a3_size_frac: 1.0,
            partition_p: 0.2,
            partition_deg_inv: 5000.0,
            partition_floor: 0.0,
            resample_budget_factor: 50.0,
            expander_ratio: 10.0,
            expander_frac: 1.0 / 20.0,
            d_extend: None,
            m_extend: None,
            bad_set_cap: None,
            min_connect_len_factor: 10.0,
            connect_budget_frac: 1.0 / 8.0,
            cover_len_factor: 4.0,
            cover_deg_inv: 1e4,
            cover_deg_floor: 0.0,
            hierarchy_budget_factor: 4.0,
            spacing_factor: 100.0,
            window_frac: 1.0 / 100.0,
            sprinkle_connect: 1e-4,
            sprinkle_posa: 1e-4,
            low_degree_inv: 300.0,
            low_degree_floor: 0.0,
            split_factor: 9.0 / 20.0,
            use_full_prefix: false,
            exact_cap: 20,
            sampled_trials: 200,
            extend_attempts: 200,
        }
    }

    pub fn desk() -> Self {
        PipelineParams {
            profile: "desk".into(),
            mindeg_floor: 2.0,
            partition_floor: 1.0,
            d_extend: Some(3.0),
            bad_set_cap: Some(0.1),
            min_connect_len_factor: 1.0,
            cover_len_factor: 1.0,
            cover_deg_floor: 1.0,
            spacing_factor: 3.0,
            window_frac: 1.0,
            sprinkle_connect: 6.0,
            sprinkle_posa: 2.0,
            low_degree_floor: 1.0,
            use_full_prefix: true,
            sampled_trials: 60,
            ..Self::paper()
        }
    }

    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "paper" => Ok(Self::paper()),
            "desk" => Ok(Self::desk()),
            _ => Err(Error::input(format!("unknown profile {name:?} (paper, desk)"))),
        }
    }

    /// Reads `key = value` lines over a base profile (`profile = desk` selects the base).
    pub fn from_config(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        let mut base = "paper".to_string();
        for raw in text.lines() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::input(format!("expected key=value, got {raw:?}")))?;
            let (k, v) = (k.trim(), v.trim());
            if k == "profile" {
                base = v.to_string();
            } else {
                pairs.push((k.to_string(), v.to_string()));
            }
        }
        let mut value = serde_json::to_value(Self::by_name(&base)?).unwrap();
        let obj = value.as_object_mut().unwrap();
        for (k, v) in pairs {
            let slot = obj
                .get_mut(&k)
                .ok_or_else(|| Error::input(format!("unknown parameter {k:?}")))?;
            *slot = if v == "auto" {
                serde_json::Value::Null
            } else {
                serde_json::from_str(&v)
                    .map_err(|_| Error::input(format!("bad value for {k}: {v:?}")))?
            };
        }
        let p: PipelineParams = serde_json::from_value(value)
            .map_err(|e| Error::input(format!("bad parameter file: {e}")))?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_config(&self) -> String {
        let value = serde_json::to_value(self).unwrap();
        let mut s = String::new();
        for (k, v) in value.as_object().unwrap() {
            let v = match v {
                serde_json::Value::Null => "auto".to_string(),
                serde_json::Value::String(x) => x.clone(),
                other => other.to_string(),
            };
            s.push_str(&format!("{k} = {v}\n"));
        }
        s
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            self.c_maxdeg,
            self.c_mindeg_inv,
            self.partition_deg_inv,
            self.expander_ratio,
            self.expander_frac,
            self.min_connect_len_factor,
            self.cover_len_factor,
            self.cover_deg_inv,
            self.spacing_factor,
            self.window_frac,
            self.low_degree_inv,
        ];
        if positive.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::input("parameters must be positive"));
        }
        if !(self.partition_p > 0.0 && self.partition_p < 0.5) {
            return Err(Error::input("partition_p must lie in (0, 1/2)"));
        }
        if self.d_extend.is_some_and(|d| d < 3.0) {
            return Err(Error::input("d_extend must be at least 3"));
        }
        if self.m_extend.is_some_and(|m| m < 1.0) {
            return Err(Error::input("m_extend must be at least 1"));
        }
        Ok(())
    }

    pub fn a1_max_degree(&self, n: usize) -> f64 {
        self.c_maxdeg * ln(n)
    }

    pub fn a2_min_degree(&self, n: usize) -> f64 {
        (ln(n) / self.c_mindeg_inv).max(self.mindeg_floor)
    }

    pub fn a3_degree(&self, n: usize) -> f64 {
        ln(n).powf(self.a3_deg_exponent)
    }

    pub fn a3_expansion(&self, n: usize) -> f64 {
        ln(n).powf(self.a3_expansion_exponent)
    }

    pub fn a3_max_set(&self, n: usize) -> usize {
        (self.a3_size_frac * n as f64 * lnln(n) / ln(n)).floor().max(0.0) as usize
    }

    pub fn partition_threshold(&self, n: usize) -> f64 {
        (ln(n) / self.partition_deg_inv).max(self.partition_floor)
    }

    pub fn resample_budget(&self, n: usize) -> usize {
        (self.resample_budget_factor * n as f64).ceil() as usize
    }

    pub fn d_extend(&self, n: usize) -> f64 {
        self.d_extend.unwrap_or_else(|| ln(n).powf(1.0 / 3.0).max(3.0))
    }

    pub fn m_extend(&self, n: usize) -> f64 {
        self.m_extend
            .unwrap_or_else(|| (n as f64 / (100.0 * self.d_extend(n))).max(1.0))
    }

    pub fn bad_set_cap(&self, n: usize) -> usize {
        let cap = match self.bad_set_cap {
            Some(f) => f * n as f64,
            None => n as f64 * lnln(n).ln() / ln(n),
        };
        cap.floor().max(1.0) as usize
    }

    /// `ℓ₀ = ⌈factor · ln n / ln ln n⌉`.
    pub fn min_connect_len(&self, n: usize) -> usize {
        (self.min_connect_len_factor * ln(n) / lnln(n)).ceil().max(1.0) as usize
    }

    /// Half-length `h` of cover slots; slots have length `2h`.
    pub fn cover_half_len(&self, n: usize) -> usize {
        (self.cover_len_factor * ln(n) / lnln(n)).ceil().max(1.0) as usize
    }

    pub fn cover_degree(&self, n: usize) -> f64 {
        (ln(n) / self.cover_deg_inv).max(self.cover_deg_floor)
    }

    pub fn hierarchy_budget(&self, n: usize) -> usize {
        (self.hierarchy_budget_factor * ln(n) / lnln(n)).ceil().max(1.0) as usize
    }

    pub fn spacing(&self, n: usize) -> usize {
        (self.spacing_factor * ln(n) / lnln(n)).ceil().max(1.0) as usize
    }

    pub fn window_len(&self, n: usize) -> usize {
        ((self.window_frac * n as f64).floor() as usize).min(n.saturating_sub(1))
    }

    pub fn q_connect(&self, n: usize) -> f64 {
        (self.sprinkle_connect * ln(n) / n as f64).min(1.0)
    }

    pub fn q_posa(&self, n: usize) -> f64 {
        (self.sprinkle_posa * ln(n) / n as f64).min(1.0)
    }

    pub fn low_degree(&self, n: usize) -> f64 {
        (ln(n) / self.low_degree_inv).max(self.low_degree_floor)
    }

    pub fn split_index(&self, n: usize) -> usize {
        (self.split_factor * n as f64 * ln(n)).floor() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let p = PipelineParams::desk();
        let back = PipelineParams::from_config(&p.to_config()).unwrap();
        assert_eq!(p, back);
        let q = PipelineParams::from_config("profile = desk\nc_maxdeg = 50 # halve\nd_extend = auto\n").unwrap();
        assert_eq!(q.c_maxdeg, 50.0);
        assert_eq!(q.d_extend, None);
        assert!(PipelineParams::from_config("nope = 1").unwrap_err().is_input());
        assert!(PipelineParams::from_config("d_extend = 2").is_err());
    }

    #[test]
    fn paper_values() {
        let p = PipelineParams::paper();
        let n = 1000;
        assert!((p.a1_max_degree(n) - 100.0 * (1000f64).ln()).abs() < 1e-9);
        assert!((p.a2_min_degree(n) - (1000f64).ln() / 500.0).abs() < 1e-12);
        assert!(p.d_extend(n) >= 3.0);
    }
}
