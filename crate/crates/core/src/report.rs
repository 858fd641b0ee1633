//! Ordered `key=value` reports, rendered as plain text or JSON lines.

use std::fmt::Display;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum Format {
    #[default]
    Text,
    JsonLines,
}

impl Format {
    pub fn parse(text: &str) -> Option<Format> {
        match text {
            "text" => Some(Format::Text),
            "json-lines" => Some(Format::JsonLines),
            _ => None,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn extend(&mut self, other: Report) {
        self.entries.extend(other.entries);
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    /// The first value stored under `key`.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            match format {
                Format::Text => {
                    out.push_str(k);
                    out.push('=');
                    out.push_str(v);
                }
                Format::JsonLines => {
                    let mut obj = serde_json::Map::new();
                    obj.insert(k.clone(), serde_json::Value::String(v.clone()));
                    out.push_str(&serde_json::Value::Object(obj).to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_both_formats() {
        let mut r = Report::new();
        r.push("a", "3/4");
        r.push("check.ok", true);
        assert_eq!(r.render(Format::Text), "a=3/4\ncheck.ok=true\n");
        assert_eq!(
            r.render(Format::JsonLines),
            "{\"a\":\"3/4\"}\n{\"check.ok\":\"true\"}\n"
        );
        assert_eq!(r.get("check.ok"), Some("true"));
    }
}
