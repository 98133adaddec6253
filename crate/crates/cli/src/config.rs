//! `key = value` config files, merged into the command line as long flags.

use std::collections::BTreeMap;

use anyhow::{bail, Context, Result};

pub fn parse(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            bail!("config line {}: expected key = value", i + 1);
        };
        let k = k.trim().replace('_', "-");
        if k.is_empty() {
            bail!("config line {}: empty key", i + 1);
        }
        out.insert(k, v.trim().to_string());
    }
    Ok(out)
}

/// Pulls `--config PATH` out of `args` and appends any keys it sets that are not already given.
pub fn merge(mut args: Vec<String>) -> Result<Vec<String>> {
    let Some(pos) = args.iter().position(|a| a == "--config" || a.starts_with("--config=")) else {
        return Ok(args);
    };
    let path = if let Some(p) = args[pos].strip_prefix("--config=") {
        let p = p.to_string();
        args.remove(pos);
        p
    } else {
        if pos + 1 >= args.len() {
            bail!("--config needs a path");
        }
        let p = args.remove(pos + 1);
        args.remove(pos);
        p
    };
    let text = std::fs::read_to_string(&path).with_context(|| format!("reading {path}"))?;
    for (k, v) in parse(&text)? {
        let flag = format!("--{k}");
        let present = args.iter().any(|a| a == &flag || a.starts_with(&format!("{flag}=")));
        if present {
            continue;
        }
        match v.as_str() {
            "true" => args.push(flag),
            "false" => {}
            _ => {
                args.push(flag);
                args.push(v);
            }
        }
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_and_comments() {
        let m = parse("type = A~3:outer=1,3\n# note\nstrict = true\nq_vector=1/2,1/2\n").unwrap();
        assert_eq!(m["type"], "A~3:outer=1,3");
        assert_eq!(m["strict"], "true");
        assert_eq!(m["q-vector"], "1/2,1/2");
        assert!(parse("nonsense").is_err());
    }
}
