//! Optional `key=value` config files mirroring the command-line flags.
//! Precedence is flags > config > defaults.

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use crate::{CliError, CliResult};

#[derive(Debug, Default)]
pub struct Config {
    map: HashMap<String, String>,
}

impl Config {
    /// Parse a config file. Keys are the long flag names without the leading
    /// dashes (e.g. `snr-db=2.06`); `#` starts a comment.
    pub fn load(path: Option<&Path>) -> CliResult<Config> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path)?;
        let mut map = HashMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config {}:{}: expected key=value, got `{raw}`",
                    path.display(),
                    idx + 1
                )));
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }
}

/// Flag value, else config value parsed with `FromStr`, else `None`.
pub fn resolve<T: FromStr>(flag: Option<T>, cfg: &Config, key: &str) -> CliResult<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
            CliError::Usage(format!("config value for `{key}` is invalid: `{raw}`"))
        }),
    }
}

/// Same as [`resolve`] but with a custom parser (lists, method names).
pub fn resolve_with<T>(
    flag: Option<T>,
    cfg: &Config,
    key: &str,
    parse: impl Fn(&str) -> Result<T, String>,
) -> CliResult<Option<T>> {
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.get(key) {
        None => Ok(None),
        Some(raw) => parse(raw).map(Some).map_err(|e| {
            CliError::Usage(format!("config value for `{key}` is invalid: {e}"))
        }),
    }
}

/// Missing required argument after flag/config resolution.
pub fn require<T>(value: Option<T>, key: &str) -> CliResult<T> {
    value.ok_or_else(|| CliError::Usage(format!("missing required argument --{key}")))
}

pub fn parse_dims(s: &str) -> Result<Vec<usize>, String> {
    let dims: Result<Vec<usize>, _> = s.split(',').map(|t| t.trim().parse::<usize>()).collect();
    match dims {
        Ok(d) if !d.is_empty() && d.len() <= 3 => Ok(d),
        Ok(d) => Err(format!("need 1-3 comma-separated dims, got {}", d.len())),
        Err(_) => Err(format!("bad dims `{s}`")),
    }
}

pub fn parse_dims_grid(s: &str) -> Result<Vec<Vec<usize>>, String> {
    s.split(';').map(parse_dims).collect()
}

pub fn parse_fracs(s: &str) -> Result<Vec<f64>, String> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad fraction `{t}`"))
                .and_then(|f| {
                    if f > 0.0 && f <= 1.0 {
                        Ok(f)
                    } else {
                        Err(format!("fraction {f} outside (0, 1]"))
                    }
                })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn config_parsing_and_precedence() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# comment\nfwhm = 4.5\nn=25\ndims=3,3,3").unwrap();
        let cfg = Config::load(Some(file.path())).unwrap();

        // flag wins
        assert_eq!(resolve(Some(9.0f64), &cfg, "fwhm").unwrap(), Some(9.0));
        // config fills missing
        assert_eq!(resolve::<f64>(None, &cfg, "fwhm").unwrap(), Some(4.5));
        assert_eq!(resolve::<usize>(None, &cfg, "n").unwrap(), Some(25));
        // absent everywhere
        assert_eq!(resolve::<u64>(None, &cfg, "seed").unwrap(), None);
        assert!(require::<u64>(None, "seed").is_err());

        let dims = resolve_with(None, &cfg, "dims", parse_dims).unwrap();
        assert_eq!(dims, Some(vec![3, 3, 3]));
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_dims("20,20,20").unwrap(), vec![20, 20, 20]);
        assert!(parse_dims("1,2,3,4").is_err());
        assert!(parse_dims("x").is_err());
        assert_eq!(
            parse_dims_grid("8,8,8;16,16").unwrap(),
            vec![vec![8, 8, 8], vec![16, 16]]
        );
        assert_eq!(parse_fracs("0.05,0.1").unwrap(), vec![0.05, 0.1]);
        assert!(parse_fracs("0").is_err());
        assert!(parse_fracs("1.5").is_err());
    }
}
