//! `key = value` device/flow configuration with `#` comments.
//!
//! Every key is optional and falls back to the documented default; unknown
//! keys are an error so typos cannot silently revert a knob to its default.

use super::{tokenize, ParseError};
use crate::oil::DeviceModels;

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub models: DeviceModels,
    /// Wavelength channels per trunk.
    pub c_max: usize,
    /// Extra placement rounds the routers may request before giving up.
    pub max_placement_revisions: usize,
    /// Seed for anything randomized driven by this config.
    pub seed: u64,
    /// Minimum converter spacing along a trunk, mm.
    pub min_ring_pitch: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            models: DeviceModels::default(),
            c_max: 32,
            max_placement_revisions: 8,
            seed: 0,
            min_ring_pitch: 0.04,
        }
    }
}

pub fn parse_config(text: &str) -> Result<Config, ParseError> {
    let mut cfg = Config::default();
    let mut seen: Vec<String> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let toks = tokenize(raw);
        if toks.is_empty() {
            continue;
        }
        // Accept `key = value`, `key=value`, `key =value`, `key= value`.
        let joined: String = toks.iter().map(|(_, t)| *t).collect::<Vec<_>>().join(" ");
        let (kcol, _) = toks[0];
        let mut parts = joined.splitn(2, '=');
        let key = parts.next().unwrap_or("").trim().to_string();
        let value = match parts.next() {
            Some(v) => v.trim().to_string(),
            None => return Err(ParseError::new(line, kcol, "expected `key = value`")),
        };
        if key.is_empty() || value.is_empty() {
            return Err(ParseError::new(line, kcol, "expected `key = value`"));
        }
        if seen.contains(&key) {
            return Err(ParseError::new(line, kcol, format!("duplicate key `{key}`")));
        }
        seen.push(key.clone());

        let fnum = |what: &str| -> Result<f64, ParseError> {
            value
                .parse::<f64>()
                .map_err(|_| ParseError::new(line, kcol, format!("{what}: expected a number, got `{value}`")))
        };
        let unum = |what: &str| -> Result<u64, ParseError> {
            value
                .parse::<u64>()
                .map_err(|_| ParseError::new(line, kcol, format!("{what}: expected an integer, got `{value}`")))
        };

        match key.as_str() {
            "tau_o" => cfg.models.tau_o = fnum("tau_o")?,
            "tau_e" => cfg.models.tau_e = fnum("tau_e")?,
            "tau_conv" => cfg.models.tau_conv = fnum("tau_conv")?,
            "alpha_wg" => cfg.models.alpha_wg = fnum("alpha_wg")?,
            "loss_mod_db" => cfg.models.loss_mod_db = fnum("loss_mod_db")?,
            "p_det_sense" => cfg.models.p_det_sense = fnum("p_det_sense")?,
            "p_laser_max" => cfg.models.p_laser_max = fnum("p_laser_max")?,
            "p_channel" => cfg.models.p_channel = fnum("p_channel")?,
            "p_trunk_base" => cfg.models.p_trunk_base = fnum("p_trunk_base")?,
            "p_cross_unit" => cfg.models.p_cross_unit = fnum("p_cross_unit")?,
            "k_trunk_thm" => cfg.models.k_trunk_thm = fnum("k_trunk_thm")?,
            "k_ring_thm" => cfg.models.k_ring_thm = fnum("k_ring_thm")?,
            "lambda0" => cfg.models.lambda0 = fnum("lambda0")?,
            "drift_sens" => cfg.models.drift_sens = fnum("drift_sens")?,
            "channel_spacing" => cfg.models.channel_spacing = fnum("channel_spacing")?,
            "q_nominal" => cfg.models.q_nominal = fnum("q_nominal")?,
            "temp_threshold" => cfg.models.temp_threshold = fnum("temp_threshold")?,
            "c_max" => {
                let v = unum("c_max")?;
                if v == 0 {
                    return Err(ParseError::new(line, kcol, "c_max must be >= 1"));
                }
                cfg.c_max = v as usize;
            }
            "max_placement_revisions" => cfg.max_placement_revisions = unum("max_placement_revisions")? as usize,
            "seed" => cfg.seed = unum("seed")?,
            "min_ring_pitch" => {
                let v = fnum("min_ring_pitch")?;
                if !(v > 0.0) || !v.is_finite() {
                    return Err(ParseError::new(line, kcol, format!("min_ring_pitch must be > 0, got {v}")));
                }
                cfg.min_ring_pitch = v;
            }
            other => {
                return Err(ParseError::new(line, kcol, format!("unknown config key `{other}`")));
            }
        }
    }

    cfg.models
        .validate()
        .map_err(|e| ParseError::new(text.lines().count().max(1), 1, e.to_string()))?;
    Ok(cfg)
}
