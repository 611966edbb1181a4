use indexmap::IndexMap;
use thiserror::Error;

/// Failure while reading a settings file line by line.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: expected `key = value`, found {text:?}")]
    Malformed { line: usize, text: String },
    #[error("line {line}: empty key")]
    EmptyKey { line: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub value: String,
    /// 1-based source line; 0 for entries set programmatically.
    pub line: usize,
}

/// Ordered `key = value` table with last-write-wins semantics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SettingsTable {
    entries: IndexMap<String, Entry>,
    warnings: Vec<String>,
}

impl SettingsTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.get(key)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    /// Inserts or overrides a value. Overrides keep the key's original position.
    pub fn set(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.insert(key.into(), value.into(), 0);
    }

    fn insert(&mut self, key: String, value: String, line: usize) {
        if let Some(prev) = self.entries.get(&key) {
            if line > 0 {
                self.warnings.push(format!(
                    "line {line}: `{key}` overrides value {:?} from line {}",
                    prev.value, prev.line
                ));
                log::warn!("{}", self.warnings.last().unwrap());
            }
        }
        self.entries.insert(key, Entry { value, line });
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries.iter().map(|(k, e)| (k.as_str(), e.value.as_str()))
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Duplicate-key notices collected while parsing.
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Renders the table back to settings text, one entry per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.iter() {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(v);
            out.push('\n');
        }
        out
    }
}

/// Parses line-oriented `key = value` text. Lines whose first non-blank
/// character is `#` and blank lines are ignored.
pub fn parse_settings(text: &str) -> Result<SettingsTable, ParseError> {
    let mut table = SettingsTable::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ParseError::Malformed {
                line: line_no,
                text: raw.to_string(),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(ParseError::EmptyKey { line: line_no });
        }
        table.insert(key.to_string(), value.trim().to_string(), line_no);
    }
    Ok(table)
}
