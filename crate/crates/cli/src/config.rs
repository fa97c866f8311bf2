//! Flat `key = value` run files. One assignment per line, `#` starts a
//! comment, keys are long flag names. Boolean flags take `true`/`false`.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::args::{GLOBAL_KEYS, SUBCOMMANDS};
use crate::CliError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    pub key: String,
    pub value: String,
}

pub fn parse(text: &str) -> Result<Vec<Assignment>, CliError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", n + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(CliError::Usage(format!("config line {}: invalid key '{key}'", n + 1)));
        }
        out.push(Assignment { key, value: value.trim().to_string() });
    }
    Ok(out)
}

fn as_flags(a: &Assignment) -> Result<Vec<OsString>, CliError> {
    match a.value.as_str() {
        "true" => Ok(vec![format!("--{}", a.key).into()]),
        "false" => Ok(vec![]),
        v if a.key == "suite" => Ok(vec![v.into()]),
        v => Ok(vec![format!("--{}={v}", a.key).into()]),
    }
}

fn config_path(argv: &[OsString]) -> Option<OsString> {
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        let s = a.to_string_lossy();
        if s == "--config" {
            return it.next().cloned();
        }
        if let Some(p) = s.strip_prefix("--config=") {
            return Some(p.into());
        }
    }
    None
}

/// Splice the config file's assignments into `argv` so that the command
/// line wins: global keys go directly after the program name, the rest
/// directly after the subcommand.
pub fn expand(argv: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let Some(path) = config_path(&argv) else {
        return Ok(argv);
    };
    let text = fs::read_to_string(Path::new(&path))
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.to_string_lossy())))?;
    let assignments = parse(&text)?;

    let mut global = Vec::new();
    let mut local = Vec::new();
    for a in &assignments {
        if GLOBAL_KEYS.contains(&a.key.as_str()) {
            global.extend(as_flags(a)?);
        } else {
            local.extend(as_flags(a)?);
        }
    }

    let sub = argv.iter().position(|a| SUBCOMMANDS.contains(&a.to_string_lossy().as_ref()));
    let mut out = Vec::with_capacity(argv.len() + global.len() + local.len());
    out.push(argv[0].clone());
    out.extend(global);
    match sub {
        Some(i) => {
            out.extend(argv[1..=i].iter().cloned());
            out.extend(local);
            out.extend(argv[i + 1..].iter().cloned());
        }
        None if local.is_empty() => out.extend(argv[1..].iter().cloned()),
        None => return Err(CliError::Usage("config sets command options but no command was given".into())),
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_spacing() {
        let a = parse("# run\nr0 = 50  # separation\n\nrel_tol=1e-8\n").unwrap();
        assert_eq!(a.len(), 2);
        assert_eq!(a[0], Assignment { key: "r0".into(), value: "50".into() });
        assert_eq!(a[1].key, "rel-tol");
        assert!(parse("r0 50").is_err());
    }

    #[test]
    fn boolean_flags() {
        let a = Assignment { key: "log".into(), value: "true".into() };
        assert_eq!(as_flags(&a).unwrap(), vec![OsString::from("--log")]);
        let a = Assignment { key: "log".into(), value: "false".into() };
        assert!(as_flags(&a).unwrap().is_empty());
    }
}
