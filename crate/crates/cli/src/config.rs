//! `--config` files: a TOML table per subcommand whose keys are the long
//! flag names, e.g.
//!
//! ```toml
//! [sweep]
//! n = 2000
//! delta = "-0.05:0.05"
//! jobs = 4
//! ```
//!
//! Entries are spliced in front of the command-line flags, so explicit
//! flags win.

use std::fs;
use std::path::Path;

use toml::Value;

pub fn config_args(path: &Path, subcommand: &str) -> Result<Vec<String>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let doc: toml::Table = text
        .parse()
        .map_err(|e| format!("{}: {e}", path.display()))?;
    for key in doc.keys() {
        if !matches!(
            key.as_str(),
            "solve" | "sweep" | "train" | "eval" | "predict"
        ) {
            return Err(format!("{}: unknown section `{key}`", path.display()));
        }
    }
    let Some(section) = doc.get(subcommand) else {
        return Ok(Vec::new());
    };
    let table = section
        .as_table()
        .ok_or_else(|| format!("{}: `{subcommand}` must be a table", path.display()))?;
    let mut args = Vec::new();
    for (key, value) in table {
        // `max_iters` and `max-iters` both name `--max-iters`.
        let flag = format!("--{}", key.replace('_', "-"));
        match value {
            Value::Boolean(true) => args.push(flag),
            Value::Boolean(false) => {}
            Value::Integer(i) => args.push(format!("{flag}={i}")),
            Value::Float(f) => args.push(format!("{flag}={f:e}")),
            Value::String(s) => args.push(format!("{flag}={s}")),
            Value::Array(items) if items.len() == 2 => {
                let num = |v: &Value| v.as_float().or_else(|| v.as_integer().map(|i| i as f64));
                match (num(&items[0]), num(&items[1])) {
                    (Some(lo), Some(hi)) => args.push(format!("{flag}={lo:e}:{hi:e}")),
                    _ => {
                        return Err(format!(
                            "{}: `{key}` must be a [lo, hi] pair of numbers",
                            path.display()
                        ))
                    }
                }
            }
            other => {
                return Err(format!(
                    "{}: unsupported value for `{key}`: {other}",
                    path.display()
                ))
            }
        }
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tables_become_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        fs::write(&path, "[sweep]\nn = 20\ngrid = true\ndelta = [-0.1, 0.1]\nout = \"a.csv\"\n[train]\nseed = 3\n").unwrap();
        let args = config_args(&path, "sweep").unwrap();
        assert_eq!(
            args,
            vec!["--delta=-1e-1:1e-1", "--grid", "--n=20", "--out=a.csv"]
        );
        assert_eq!(config_args(&path, "train").unwrap(), vec!["--seed=3"]);
        assert!(config_args(&path, "eval").unwrap().is_empty());
        fs::write(&path, "[bogus]\nx = 1\n").unwrap();
        assert!(config_args(&path, "sweep").is_err());
    }
}
