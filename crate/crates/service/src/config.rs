use std::net::SocketAddr;
use std::time::Duration;

use subscope_core::WeightSetting;
use thiserror::Error;

pub const DEFAULT_BIND: &str = "127.0.0.1:8080";
pub const DEFAULT_MAX_UPLOAD_BYTES: usize = 50 * 1024 * 1024;
pub const DEFAULT_SESSION_TTL: Duration = Duration::from_secs(2 * 60 * 60);

#[derive(Debug, Error, PartialEq)]
#[error("invalid value `{value}` for {var}")]
pub struct ConfigError {
    pub var: &'static str,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub bind: SocketAddr,
    pub max_upload_bytes: usize,
    pub session_ttl: Duration,
    /// Applied to sessions whose creation request names no weights.
    pub default_weights: WeightSetting,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            bind: DEFAULT_BIND.parse().expect("valid literal"),
            max_upload_bytes: DEFAULT_MAX_UPLOAD_BYTES,
            session_ttl: DEFAULT_SESSION_TTL,
            default_weights: WeightSetting::Exported,
        }
    }
}

impl Config {
    /// Reads `UNSUB_BIND`, `UNSUB_MAX_UPLOAD_BYTES`, `UNSUB_SESSION_TTL_SECS`
    /// and `UNSUB_DEFAULT_WEIGHTS`; unset variables keep their defaults.
    pub fn from_env() -> Result<Self, ConfigError> {
        Self::from_lookup(|k| std::env::var(k).ok())
    }

    pub fn from_lookup<F: Fn(&str) -> Option<String>>(get: F) -> Result<Self, ConfigError> {
        fn parse<T: std::str::FromStr>(var: &'static str, value: Option<String>, into: &mut T) -> Result<(), ConfigError> {
            if let Some(value) = value {
                *into = value.trim().parse().map_err(|_| ConfigError { var, value })?;
            }
            Ok(())
        }
        let mut c = Config::default();
        parse("UNSUB_BIND", get("UNSUB_BIND"), &mut c.bind)?;
        parse("UNSUB_MAX_UPLOAD_BYTES", get("UNSUB_MAX_UPLOAD_BYTES"), &mut c.max_upload_bytes)?;
        let mut ttl = c.session_ttl.as_secs();
        parse("UNSUB_SESSION_TTL_SECS", get("UNSUB_SESSION_TTL_SECS"), &mut ttl)?;
        c.session_ttl = Duration::from_secs(ttl);
        parse("UNSUB_DEFAULT_WEIGHTS", get("UNSUB_DEFAULT_WEIGHTS"), &mut c.default_weights)?;
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use subscope_core::Weights;

    #[test]
    fn defaults_and_overrides() {
        assert_eq!(Config::from_lookup(|_| None).unwrap(), Config::default());
        let c = Config::from_lookup(|k| match k {
            "UNSUB_BIND" => Some("0.0.0.0:9000".into()),
            "UNSUB_SESSION_TTL_SECS" => Some("60".into()),
            "UNSUB_DEFAULT_WEIGHTS" => Some("1,16,550".into()),
            _ => None,
        })
        .unwrap();
        assert_eq!(c.bind.port(), 9000);
        assert_eq!(c.session_ttl, Duration::from_secs(60));
        assert_eq!(c.default_weights, WeightSetting::Fixed(Weights::new(1.0, 16.0, 550.0).unwrap()));
    }

    #[test]
    fn bad_value_names_variable() {
        let err = Config::from_lookup(|k| (k == "UNSUB_MAX_UPLOAD_BYTES").then(|| "lots".into())).unwrap_err();
        assert_eq!(err.var, "UNSUB_MAX_UPLOAD_BYTES");
    }
}
