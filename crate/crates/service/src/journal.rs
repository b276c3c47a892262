//! Append-only JSONL record of session mutations, replayed at startup.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::session::Choice;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum Entry {
    Create {
        session: String,
        movie_id: String,
        /// Config overrides exactly as requested.
        config: Value,
    },
    Step { session: String, choice: Choice },
    Undo { session: String },
}

#[derive(Debug)]
pub struct Journal {
    path: PathBuf,
    file: Mutex<File>,
}

impl Journal {
    pub fn open(path: &Path) -> std::io::Result<Self> {
        let file = OpenOptions::new().create(true).append(true).open(path)?;
        Ok(Self {
            path: path.to_path_buf(),
            file: Mutex::new(file),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, entry: &Entry) -> std::io::Result<()> {
        let mut line = serde_json::to_string(entry).map_err(std::io::Error::other)?;
        line.push('\n');
        let mut f = self.file.lock().unwrap_or_else(|p| p.into_inner());
        f.write_all(line.as_bytes())?;
        f.flush()
    }

    /// All entries in file order. A torn final line is ignored.
    pub fn read(path: &Path) -> std::io::Result<Vec<Entry>> {
        if !path.exists() {
            return Ok(Vec::new());
        }
        let lines: Vec<String> = BufReader::new(File::open(path)?).lines().collect::<Result<_, _>>()?;
        let mut out = Vec::with_capacity(lines.len());
        for (i, line) in lines.iter().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match serde_json::from_str(line) {
                Ok(e) => out.push(e),
                Err(_) if i + 1 == lines.len() => break,
                Err(e) => {
                    return Err(std::io::Error::new(
                        std::io::ErrorKind::InvalidData,
                        format!("{}:{}: {e}", path.display(), i + 1),
                    ))
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_and_skips_torn_tail() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("j.jsonl");
        let j = Journal::open(&p).unwrap();
        let entries = vec![
            Entry::Create {
                session: "s1".into(),
                movie_id: "m".into(),
                config: serde_json::json!({"budget": 4}),
            },
            Entry::Step { session: "s1".into(), choice: Choice::AUTO },
            Entry::Step { session: "s1".into(), choice: Choice::Shot(7) },
            Entry::Undo { session: "s1".into() },
        ];
        for e in &entries {
            j.append(e).unwrap();
        }
        std::fs::OpenOptions::new().append(true).open(&p).unwrap().write_all(b"{\"op\":\"st").unwrap();
        assert_eq!(Journal::read(&p).unwrap(), entries);
    }
}
