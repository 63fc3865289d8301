use std::fmt::{self, Display};

/// Line-oriented report: `key = value` entries, optional
/// `key.formula = "..."` lines and a closing `summary:` line.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    lines: Vec<(String, String)>,
    summary: String,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn value(&mut self, key: &str, value: impl Display) -> &mut Self {
        self.lines.push((key.to_string(), value.to_string()));
        self
    }

    /// A value together with the formula it instantiates.
    pub fn with_formula(&mut self, key: &str, value: impl Display, formula: &str) -> &mut Self {
        self.value(key, value);
        self.lines
            .push((format!("{key}.formula"), format!("\"{formula}\"")));
        self
    }

    pub fn summary(&mut self, text: impl Into<String>) -> &mut Self {
        self.summary = text.into();
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.lines
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// Parses a rendered report back into `(key, value)` pairs.
    pub fn parse(text: &str) -> Vec<(String, String)> {
        text.lines()
            .filter_map(|l| l.split_once(" = "))
            .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
            .collect()
    }
}

impl Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.lines {
            writeln!(f, "{k} = {v}")?;
        }
        writeln!(f, "summary: {}", self.summary)
    }
}
