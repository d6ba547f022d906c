//! Plain-text `key=value` run configuration.
//!
//! Each key is a long flag name of the subcommand (`lambda=1.5`,
//! `e-step=0.001`); `#` starts a comment. The pairs are spliced in front of
//! the command-line flags so that later flags override them.

use std::ffi::OsString;
use std::fs;
use std::path::Path;

use crate::error::CliError;

pub fn read_flags(path: &Path) -> Result<Vec<String>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    parse_flags(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

pub fn parse_flags(text: &str) -> Result<Vec<String>, String> {
    let mut flags = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", lineno + 1))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key.is_empty() || key == "config" {
            return Err(format!("line {}: invalid key `{key}`", lineno + 1));
        }
        flags.push(format!("--{key}={}", value.trim()));
    }
    Ok(flags)
}

/// `args` with the config flags inserted right after the subcommand name.
pub fn splice(args: &[OsString], flags: Vec<String>) -> Vec<OsString> {
    let split = args.len().min(2);
    let mut merged = args[..split].to_vec();
    merged.extend(flags.into_iter().map(OsString::from));
    merged.extend_from_slice(&args[split..]);
    merged
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let flags = parse_flags("# recipe\nlambda = 1.5\n\ne_step=0.001  # fine\n").unwrap();
        assert_eq!(flags, ["--lambda=1.5", "--e-step=0.001"]);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_flags("lambda 1.5").is_err());
        assert!(parse_flags("=3").is_err());
        assert!(parse_flags("config=other.cfg").is_err());
    }

    #[test]
    fn splice_puts_file_flags_before_command_line() {
        let args: Vec<OsString> = ["dicke", "micro", "--lambda", "2"].map(OsString::from).to_vec();
        let merged = splice(&args, vec!["--lambda=1".into()]);
        assert_eq!(
            merged,
            ["dicke", "micro", "--lambda=1", "--lambda", "2"].map(OsString::from)
        );
    }
}
