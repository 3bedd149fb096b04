use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use powrep::Instance;

use crate::{CommonArgs, InstanceArgs};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Human,
}

/// `"7"` or an inclusive range `"2..9"`.
pub fn parse_range(s: &str) -> Result<(u64, u64), String> {
    let parse = |t: &str| t.trim().parse::<u64>().map_err(|e| format!("{t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let (lo, hi) = (parse(a)?, parse(b)?);
            if lo > hi {
                return Err(format!("empty range {s}"));
            }
            Ok((lo, hi))
        }
        None => parse(s).map(|v| (v, v)),
    }
}

/// Everything a run depends on, echoed in JSON output. Integers are decimal
/// strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instance: Option<Instance>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nmax: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pool: Option<String>,
    pub format: Format,
    pub seed: String,
}

fn range_text((lo, hi): (u64, u64)) -> String {
    if lo == hi {
        lo.to_string()
    } else {
        format!("{lo}..{hi}")
    }
}

impl RunConfig {
    pub fn new(command: &str, common: &CommonArgs) -> Self {
        RunConfig {
            command: command.to_string(),
            instance: None,
            k: None,
            n: None,
            m: None,
            beta: None,
            nmax: None,
            window: None,
            pool: None,
            format: common.format,
            seed: common.seed.to_string(),
        }
    }

    pub fn with_instance(mut self, args: &InstanceArgs) -> powrep::Result<Self> {
        self.instance = Some(if args.nathanson {
            Instance::nathanson()
        } else {
            Instance::new(args.bases.clone(), args.coeffs.clone())?
        });
        Ok(self)
    }

    pub fn instance(&self) -> &Instance {
        self.instance.as_ref().expect("command takes an instance")
    }

    pub fn k(mut self, k: (u64, u64)) -> Self {
        self.k = Some(range_text(k));
        self
    }

    pub fn n(mut self, n: i64) -> Self {
        self.n = Some(n.to_string());
        self
    }

    pub fn m(mut self, m: (u64, u64)) -> Self {
        self.m = Some(range_text(m));
        self
    }

    pub fn beta(mut self, beta: Option<u64>) -> Self {
        self.beta = beta.map(|b| b.to_string());
        self
    }

    pub fn nmax(mut self, nmax: u64) -> Self {
        self.nmax = Some(nmax.to_string());
        self
    }

    pub fn window(mut self, lo: f64, hi: f64) -> Self {
        self.window = Some([lo, hi]);
        self
    }

    pub fn pool(mut self, pool: Option<&Path>) -> Self {
        self.pool = pool.map(|p| p.display().to_string());
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Cli;
    use clap::Parser;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("7"), Ok((7, 7)));
        assert_eq!(parse_range("2..9"), Ok((2, 9)));
        assert!(parse_range("9..2").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn config_round_trips() {
        let cli = Cli::try_parse_from([
            "powrep", "f", "--bases", "2,5", "--coeffs", "-3,1", "--k", "1..4", "--beta", "7",
            "--seed", "9",
        ])
        .unwrap();
        let crate::Command::F {
            instance,
            k,
            beta,
            nmax,
            common,
        } = cli.command
        else {
            panic!("parsed the wrong command")
        };
        let cfg = RunConfig::new("f", &common)
            .with_instance(&instance)
            .unwrap()
            .k(k)
            .beta(beta)
            .nmax(nmax);
        assert_eq!(cfg.instance().basis.bases(), &[2, 5]);
        assert_eq!(cfg.instance().coeffs.coeffs(), &[-3, 1]);
        assert_eq!(cfg.k.as_deref(), Some("1..4"));
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }
}
