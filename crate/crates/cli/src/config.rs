//! `key = value` config files merged into the command line; explicit flags
//! win over config entries.

use crate::error::CliError;

pub fn parse_config(text: &str, origin: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t.split_once('=').ok_or_else(|| {
            CliError::parse(format!(
                "{origin}:{}: expected 'key = value', got '{t}'",
                i + 1
            ))
        })?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty()
            || !k
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(CliError::parse(format!(
                "{origin}:{}: invalid key '{k}'",
                i + 1
            )));
        }
        out.push((k.replace('_', "-"), v.to_string()));
    }
    Ok(out)
}

/// Expands `--config <path>` into flags. A `command` key supplies the
/// subcommand when the command line has none.
pub fn merge_config(args: Vec<String>) -> Result<Vec<String>, CliError> {
    let Some(pos) = args
        .iter()
        .position(|a| a == "--config" || a.starts_with("--config="))
    else {
        return Ok(args);
    };
    let mut args = args;
    let path = if let Some(p) = args[pos].strip_prefix("--config=") {
        let p = p.to_string();
        args.remove(pos);
        p
    } else {
        if pos + 1 >= args.len() {
            return Err(CliError::parse("--config needs a file path"));
        }
        let p = args.remove(pos + 1);
        args.remove(pos);
        p
    };
    let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let entries = parse_config(&text, &path)?;
    let has_subcommand = args.len() > 1 && !args[1].starts_with('-');
    let mut head = vec![args[0].clone()];
    let mut tail: Vec<String> = args[1..].to_vec();
    if !has_subcommand {
        let cmd = entries
            .iter()
            .find(|(k, _)| k == "command")
            .ok_or_else(|| {
                CliError::parse(format!("{path}: no subcommand given and no 'command' key"))
            })?;
        let mut words = cmd.1.split_whitespace().map(str::to_string);
        head.extend(words.by_ref());
    } else {
        head.push(tail.remove(0));
        // positional of `bound` may follow the subcommand
        if head[1] == "bound" && tail.first().is_some_and(|a| !a.starts_with('-')) {
            head.push(tail.remove(0));
        }
    }
    for (k, v) in entries.iter().filter(|(k, _)| k != "command") {
        let flag = format!("--{k}");
        if tail
            .iter()
            .any(|a| a == &flag || a.starts_with(&format!("{flag}=")))
        {
            continue;
        }
        head.push(flag);
        head.push(v.clone());
    }
    head.extend(tail);
    Ok(head)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lines() {
        let c = parse_config("# x\nmu_max = 0.2\n\ntrials=5\n", "c").unwrap();
        assert_eq!(
            c,
            vec![
                ("mu-max".into(), "0.2".into()),
                ("trials".into(), "5".into())
            ]
        );
        match parse_config("a = 1\nbroken\n", "run.cfg") {
            Err(CliError::Parse(m)) => assert!(m.starts_with("run.cfg:2:")),
            other => panic!("{other:?}"),
        }
        assert!(parse_config("bad key = 1", "c").is_err());
    }

    #[test]
    fn flags_override_config() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.cfg");
        std::fs::write(&p, "command = verify\nsuite = kadec\ntrials = 5\n").unwrap();
        let args = vec![
            "riesz".into(),
            "--config".into(),
            p.display().to_string(),
            "--trials".into(),
            "9".into(),
        ];
        let merged = merge_config(args).unwrap();
        assert_eq!(
            merged,
            vec!["riesz", "verify", "--suite", "kadec", "--trials", "9"]
        );
    }
}
