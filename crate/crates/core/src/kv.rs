//! Line-oriented `key = value` documents with `[section]` headers.
//!
//! Used for both the function catalog and run configuration. `#` starts a
//! comment line. Keys before the first header land in an unnamed section.

use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Section {
    pub name: String,
    pub entries: Vec<(String, String)>,
}

impl Section {
    pub fn new(name: impl Into<String>) -> Self {
        Section {
            name: name.into(),
            entries: Vec::new(),
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.entries.push((key.into(), value.into()));
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Document {
    pub sections: Vec<Section>,
}

impl Document {
    pub fn parse(text: &str) -> Result<Self> {
        let mut sections = vec![Section::new("")];
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| {
                    Error::Parse(format!("line {}: unterminated section header", lineno + 1))
                })?;
                sections.push(Section::new(name.trim()));
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let key = key.trim();
            if key.is_empty() {
                return Err(Error::Parse(format!("line {}: empty key", lineno + 1)));
            }
            sections
                .last_mut()
                .expect("at least the root section")
                .push(key, value.trim());
        }
        Ok(Document { sections })
    }

    pub fn root(&self) -> &Section {
        &self.sections[0]
    }

    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    /// Named sections in file order.
    pub fn named(&self) -> impl Iterator<Item = &Section> {
        self.sections.iter().filter(|s| !s.name.is_empty())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for section in &self.sections {
            if section.name.is_empty() && section.entries.is_empty() {
                continue;
            }
            if !section.name.is_empty() {
                if !out.is_empty() {
                    out.push('\n');
                }
                let _ = writeln!(out, "[{}]", section.name);
            }
            for (k, v) in &section.entries {
                let _ = writeln!(out, "{k} = {v}");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_comments() {
        let doc = Document::parse(
            "seed = 7\n# comment\n[exp]\nkind = closed_form\nparams = exp\n\n[cosh]\nkind=closed_form\n",
        )
        .unwrap();
        assert_eq!(doc.root().get("seed"), Some("7"));
        assert_eq!(doc.named().count(), 2);
        assert_eq!(doc.section("cosh").unwrap().get("kind"), Some("closed_form"));
        let again = Document::parse(&doc.render()).unwrap();
        assert_eq!(again, doc);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Document::parse("[open\n").is_err());
        assert!(Document::parse("no equals sign\n").is_err());
        assert!(Document::parse(" = 3\n").is_err());
    }
}
