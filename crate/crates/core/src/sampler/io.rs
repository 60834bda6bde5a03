//! Plain-text read pools: one configuration per line, ±1 tokens separated by
//! single spaces, no header.

use std::fmt::Write as _;
use std::path::Path;

use super::{PoolSource, SamplePool};
use crate::error::{Error, Result};
use crate::ising::SpinConfiguration;

pub fn load_external_pool(path: &Path) -> Result<SamplePool<SpinConfiguration>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_pool(&text, path)
}

pub fn parse_pool(text: &str, origin: &Path) -> Result<SamplePool<SpinConfiguration>> {
    let err = |line: usize, message: String| Error::Parse {
        path: origin.to_path_buf(),
        line,
        message,
    };
    let mut width = None;
    let mut configs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let spins = line
            .split_whitespace()
            .map(|tok| match tok {
                "1" | "+1" => Ok(1i8),
                "-1" => Ok(-1i8),
                other => Err(err(n, format!("token '{other}' is not -1 or +1"))),
            })
            .collect::<Result<Vec<i8>>>()?;
        if spins.is_empty() {
            return Err(err(n, "empty line".into()));
        }
        match width {
            None => width = Some(spins.len()),
            Some(w) if w != spins.len() => {
                return Err(err(n, format!("line has {} values, expected {w}", spins.len())))
            }
            _ => {}
        }
        configs.push(SpinConfiguration::from_raw(spins));
    }
    if configs.is_empty() {
        return Err(Error::EmptyPool);
    }
    SamplePool::<SpinConfiguration>::new(configs, PoolSource::External)
}

/// Writes reads as `1`/`-1` tokens joined by single spaces, newline-terminated.
pub fn write_pool<'a>(path: &Path, reads: impl IntoIterator<Item = &'a [i8]>) -> Result<()> {
    let mut out = String::new();
    for read in reads {
        for (i, &s) in read.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{s}");
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_signed_tokens() {
        let pool = parse_pool("1 -1 +1\n-1 -1 1", Path::new("p")).unwrap();
        assert_eq!(pool.len(), 2);
        assert_eq!(pool.configs()[0].values(), &[1, -1, 1]);
        assert_eq!(pool.source(), PoolSource::External);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_pool("", Path::new("p")), Err(Error::EmptyPool)));
        match parse_pool("1 1\n1 0\n", Path::new("p")) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_pool("1 1\n1 1 1\n", Path::new("p")) {
            Err(Error::Parse { line: 2, .. }) => {}
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn write_then_load() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("pool.txt");
        let rows: Vec<Vec<i8>> = (0..3750).map(|i| (0..16).map(|j| if (i * 7 + j) % 5 < 2 { 1 } else { -1 }).collect()).collect();
        write_pool(&path, rows.iter().map(Vec::as_slice)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with(&rows[0].iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ")));
        let pool = load_external_pool(&path).unwrap();
        assert_eq!(pool.len(), 3750);
        assert_eq!(pool.width(), Some(16));
        assert_eq!(pool.configs()[17].values(), rows[17].as_slice());
    }
}
