//! Run configuration: defaults, flat key = value config files, and flag
//! overrides, validated into a single plain struct consumed by the command
//! dispatcher.

use crate::error::{Error, Result};
use crate::geometry::Branch;
use crate::sar::Model;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Catenoid,
    Eigencurve,
    Continue,
    Deflect,
    Thresholds,
    Simulate,
    Potential,
    Verify,
}

impl Command {
    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "catenoid" => Command::Catenoid,
            "eigencurve" => Command::Eigencurve,
            "continue" => Command::Continue,
            "deflect" => Command::Deflect,
            "thresholds" => Command::Thresholds,
            "simulate" => Command::Simulate,
            "potential" => Command::Potential,
            "verify" => Command::Verify,
            other => {
                return Err(Error::InvalidConfig {
                    key: "command".into(),
                    reason: format!("unknown command `{other}`"),
                })
            }
        })
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Catenoid => "catenoid",
            Command::Eigencurve => "eigencurve",
            Command::Continue => "continue",
            Command::Deflect => "deflect",
            Command::Thresholds => "thresholds",
            Command::Simulate => "simulate",
            Command::Potential => "potential",
            Command::Verify => "verify",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub sigma: f64,
    pub lambda: f64,
    pub lambda_max: f64,
    pub steps: usize,
    pub model: Model,
    pub branch: Branch,
    pub grid_n: usize,
    pub n_eta: usize,
    pub index: usize,
    pub samples: usize,
    pub c_lo: f64,
    pub c_hi: f64,
    pub t_max: f64,
    pub dt: f64,
    pub tol: f64,
    pub perturb: f64,
    pub random_perturbation: bool,
    pub seed: u64,
    pub out_dir: PathBuf,
}

/// String-valued settings collected from a config file and/or flags, highest
/// precedence last.
#[derive(Debug, Default, Clone)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

const KEYS: &[&str] = &[
    "command", "sigma", "lambda", "lambda_max", "steps", "model", "branch", "grid_n",
    "n_eta", "index", "samples", "c_lo", "c_hi", "t_max", "dt", "tol", "perturb",
    "random_perturbation", "seed", "out_dir",
];

impl Settings {
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(Error::InvalidConfig {
                key: key.into(),
                reason: "unknown configuration key".into(),
            });
        }
        self.values.insert(key.into(), value.into());
        Ok(())
    }

    /// Parses flat `key = value` text: one pair per line, `#` comments,
    /// blank lines ignored.
    pub fn load_file(&mut self, path: &std::path::Path) -> Result<()> {
        let text = std::fs::read_to_string(path)?;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::InvalidConfig {
                    key: format!("line {}", lineno + 1),
                    reason: "expected `key = value`".into(),
                });
            };
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    fn get<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.values.get(key) {
            None => Ok(default),
            Some(raw) => raw.parse().map_err(|_| Error::InvalidConfig {
                key: key.into(),
                reason: format!("cannot parse `{raw}`"),
            }),
        }
    }

    pub fn build(&self) -> Result<RunConfig> {
        let command = match self.values.get("command") {
            Some(c) => Command::parse(c)?,
            None => {
                return Err(Error::InvalidConfig {
                    key: "command".into(),
                    reason: "no command given".into(),
                })
            }
        };
        let model = match self.values.get("model").map(String::as_str) {
            None | Some("sar") => Model::Sar,
            Some("fbp") => Model::Fbp,
            Some(other) => {
                return Err(Error::InvalidConfig {
                    key: "model".into(),
                    reason: format!("expected sar or fbp, got `{other}`"),
                })
            }
        };
        let branch = match self.values.get("branch").map(String::as_str) {
            None | Some("outer") => Branch::Outer,
            Some("inner") => Branch::Inner,
            Some(other) => {
                return Err(Error::InvalidConfig {
                    key: "branch".into(),
                    reason: format!("expected inner or outer, got `{other}`"),
                })
            }
        };
        let grid_n: usize = self.get("grid_n", 201)?;
        let n_eta: usize = self.get("n_eta", crate::fbp::default_n_eta(grid_n))?;
        let cfg = RunConfig {
            command,
            sigma: self.get("sigma", 2.0)?,
            lambda: self.get("lambda", 0.01)?,
            lambda_max: self.get("lambda_max", 0.05)?,
            steps: self.get("steps", 10)?,
            model,
            branch,
            grid_n,
            n_eta,
            index: self.get("index", 0)?,
            samples: self.get("samples", 41)?,
            c_lo: self.get("c_lo", 0.5)?,
            c_hi: self.get("c_hi", 2.5)?,
            t_max: self.get("t_max", 5.0)?,
            dt: self.get("dt", 1e-3)?,
            tol: self.get("tol", 1e-10)?,
            perturb: self.get("perturb", 1e-3)?,
            random_perturbation: self.get("random_perturbation", false)?,
            seed: self.get("seed", 0)?,
            out_dir: PathBuf::from(self.get("out_dir", String::from("."))?),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl RunConfig {
    fn validate(&self) -> Result<()> {
        let bad = |key: &str, reason: &str| {
            Err(Error::InvalidConfig { key: key.into(), reason: reason.into() })
        };
        if !(self.sigma > 0.0) {
            return bad("sigma", "must be positive");
        }
        if self.grid_n < 3 || self.grid_n % 2 == 0 {
            return bad("grid_n", "must be odd and at least 3");
        }
        if self.n_eta < 3 {
            return bad("n_eta", "must be at least 3");
        }
        if !(self.tol > 0.0) {
            return bad("tol", "must be positive");
        }
        if !(self.dt > 0.0) {
            return bad("dt", "must be positive");
        }
        if !(self.t_max > 0.0) {
            return bad("t_max", "must be positive");
        }
        if self.lambda < 0.0 || self.lambda_max < 0.0 {
            return bad("lambda", "must be nonnegative");
        }
        if self.steps == 0 {
            return bad("steps", "must be at least 1");
        }
        if self.samples < 2 {
            return bad("samples", "must be at least 2");
        }
        if !(0.0 < self.c_lo && self.c_lo < self.c_hi) {
            return bad("c_lo", "need 0 < c_lo < c_hi");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_in() {
        let mut s = Settings::default();
        s.set("command", "eigencurve").unwrap();
        s.set("sigma", "2").unwrap();
        let cfg = s.build().unwrap();
        assert_eq!(cfg.grid_n, 201);
        assert_eq!(cfg.command, Command::Eigencurve);
        assert_eq!(cfg.model, Model::Sar);
    }

    #[test]
    fn even_grid_rejected() {
        let mut s = Settings::default();
        s.set("command", "catenoid").unwrap();
        s.set("grid_n", "4").unwrap();
        assert!(matches!(s.build(), Err(Error::InvalidConfig { .. })));
    }

    #[test]
    fn unknown_key_rejected() {
        let mut s = Settings::default();
        assert!(s.set("gird_n", "5").is_err());
    }

    #[test]
    fn file_layering_and_flag_override() {
        let dir = std::env::temp_dir().join("catena-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(&path, "command = catenoid\nsigma = 3.5 # comment\n\ngrid_n = 101\n").unwrap();
        let mut s = Settings::default();
        s.load_file(&path).unwrap();
        s.set("sigma", "4.0").unwrap();
        let cfg = s.build().unwrap();
        assert_eq!(cfg.sigma, 4.0);
        assert_eq!(cfg.grid_n, 101);
    }
}
