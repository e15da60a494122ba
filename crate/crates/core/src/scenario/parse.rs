use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SectionKind {
    Options,
    Field,
    Close,
    Torus,
    Task,
}

impl SectionKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "options" => SectionKind::Options,
            "field" => SectionKind::Field,
            "close" => SectionKind::Close,
            "torus" => SectionKind::Torus,
            "task" => SectionKind::Task,
            _ => return None,
        })
    }

    /// Keys naming another declaration, and the kind they must refer to.
    fn references(self) -> &'static [(&'static str, SectionKind)] {
        match self {
            SectionKind::Field => &[],
            SectionKind::Close => &[("left", SectionKind::Field), ("right", SectionKind::Field)],
            SectionKind::Torus => &[("field", SectionKind::Field), ("splitting", SectionKind::Field), ("ext", SectionKind::Field)],
            SectionKind::Task => &[
                ("pair", SectionKind::Close),
                ("torus", SectionKind::Torus),
                ("from", SectionKind::Torus),
                ("to", SectionKind::Torus),
                ("other", SectionKind::Torus),
                ("left", SectionKind::Field),
                ("right", SectionKind::Field),
                ("field", SectionKind::Field),
            ],
            SectionKind::Options => &[],
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            SectionKind::Options => &["title", "max_enumeration", "stage_degree"],
            SectionKind::Field => &["base", "extend"],
            SectionKind::Close => &["left", "right", "level", "left_uniformizer", "right_uniformizer"],
            SectionKind::Torus => &["kind", "field", "splitting", "ext", "rank", "generator"],
            SectionKind::Task => &[
                "op", "pair", "torus", "from", "to", "other", "map", "r", "s", "m", "stage", "left", "right", "level", "field",
                "l", "holds", "expect",
            ],
        }
    }
}

impl fmt::Display for SectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SectionKind::Options => "options",
            SectionKind::Field => "field",
            SectionKind::Close => "close",
            SectionKind::Torus => "torus",
            SectionKind::Task => "task",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
    /// 1-based column of the value
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    pub kind: SectionKind,
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a Entry> + 'a {
        self.entries.iter().filter(move |e| e.key == key)
    }

    pub fn require(&self, key: &str) -> Result<&Entry> {
        self.get(key).ok_or_else(|| Error::Parse {
            line: self.line,
            column: 1,
            message: format!("{} {} is missing the key '{key}'", self.kind, self.name),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub sections: Vec<Section>,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Scenario> {
        let mut sections: Vec<Section> = vec![];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("");
            let trimmed = content.trim();
            if trimmed.is_empty() {
                continue;
            }
            let indent = content.len() - content.trim_start().len();
            if let Some(inner) = trimmed.strip_prefix('[') {
                let inner = inner.strip_suffix(']').ok_or_else(|| Error::Parse {
                    line,
                    column: indent + trimmed.len(),
                    message: "section header must end with ']'".into(),
                })?;
                let mut parts = inner.split_whitespace();
                let kind_str = parts.next().unwrap_or("");
                let kind = SectionKind::parse(kind_str).ok_or_else(|| Error::Parse {
                    line,
                    column: indent + 2,
                    message: format!("unknown section kind '{kind_str}' (expected options, field, close, torus or task)"),
                })?;
                let name = parts.next().map(str::to_string).unwrap_or_default();
                if name.is_empty() && kind != SectionKind::Options {
                    return Err(Error::Parse { line, column: indent + 2 + kind_str.len(), message: format!("{kind} section needs a name") });
                }
                if let Some(extra) = parts.next() {
                    let col = indent + 1 + raw.trim_start().find(extra).unwrap_or(0);
                    return Err(Error::Parse { line, column: col, message: format!("unexpected '{extra}' in section header") });
                }
                sections.push(Section { kind, name, line, entries: vec![] });
                continue;
            }
            let Some(eq) = trimmed.find('=') else {
                return Err(Error::Parse { line, column: indent + 1, message: "expected 'key = value'".into() });
            };
            let Some(section) = sections.last_mut() else {
                return Err(Error::Parse { line, column: indent + 1, message: "entry outside of any section".into() });
            };
            let key = trimmed[..eq].trim().to_string();
            let after = &trimmed[eq + 1..];
            let value = after.trim().to_string();
            let column = indent + eq + 2 + (after.len() - after.trim_start().len());
            if !section.kind.keys().contains(&key.as_str()) {
                return Err(Error::Parse { line, column: indent + 1, message: format!("unknown key '{key}' in {} section", section.kind) });
            }
            if value.is_empty() {
                return Err(Error::Parse { line, column, message: format!("empty value for '{key}'") });
            }
            if key != "generator" && section.get(&key).is_some() {
                return Err(Error::Parse { line, column: indent + 1, message: format!("duplicate key '{key}'") });
            }
            section.entries.push(Entry { key, value, line, column });
        }
        let sc = Scenario { sections };
        sc.validate()?;
        Ok(sc)
    }

    fn validate(&self) -> Result<()> {
        let mut names: HashMap<&str, &Section> = HashMap::new();
        for s in &self.sections {
            if s.kind == SectionKind::Options {
                continue;
            }
            if let Some(prev) = names.insert(&s.name, s) {
                return Err(Error::Parse {
                    line: s.line,
                    column: 1,
                    message: format!("name '{}' already declared on line {}", s.name, prev.line),
                });
            }
        }
        for s in &self.sections {
            for (key, kind) in s.kind.references() {
                for e in s.all(key) {
                    // certify tasks name fields with left/right
                    let want = if s.kind == SectionKind::Task && (*key == "left" || *key == "right") {
                        if !matches!(s.get("op").map(|o| o.value.as_str()), Some("certify")) {
                            continue;
                        }
                        SectionKind::Field
                    } else {
                        *kind
                    };
                    let target = if s.kind == SectionKind::Field { None } else { Some(e.value.as_str()) };
                    if let Some(t) = target {
                        match names.get(t) {
                            Some(d) if d.kind == want => {}
                            Some(d) => {
                                return Err(Error::Parse {
                                    line: e.line,
                                    column: e.column,
                                    message: format!("'{t}' is a {}, expected a {want}", d.kind),
                                })
                            }
                            None => {
                                return Err(Error::Parse { line: e.line, column: e.column, message: format!("undeclared {want} '{t}'") })
                            }
                        }
                    }
                }
            }
            if s.kind == SectionKind::Field {
                let base = s.get("base");
                let ext = s.get("extend");
                match (base, ext) {
                    (Some(_), Some(e)) => {
                        return Err(Error::Parse { line: e.line, column: 1, message: "a field has either 'base' or 'extend'".into() })
                    }
                    (None, None) => return Err(Error::Parse { line: s.line, column: 1, message: format!("field {} needs 'base' or 'extend'", s.name) }),
                    (None, Some(e)) => {
                        let parent = e.value.split_whitespace().next().unwrap_or("");
                        match names.get(parent) {
                            Some(d) if d.kind == SectionKind::Field => {}
                            _ => return Err(Error::Parse { line: e.line, column: e.column, message: format!("undeclared field '{parent}'") }),
                        }
                    }
                    _ => {}
                }
            }
            if s.kind == SectionKind::Task {
                s.require("op")?;
            }
        }
        self.check_acyclic(&names)
    }

    fn check_acyclic(&self, names: &HashMap<&str, &Section>) -> Result<()> {
        fn visit<'a>(s: &'a Section, names: &HashMap<&str, &'a Section>, state: &mut HashMap<&'a str, u8>) -> Result<()> {
            match state.get(s.name.as_str()) {
                Some(2) => return Ok(()),
                Some(1) => {
                    return Err(Error::Parse { line: s.line, column: 1, message: format!("declaration '{}' depends on itself", s.name) })
                }
                _ => {}
            }
            state.insert(&s.name, 1);
            for dep in dependencies(s) {
                if let Some(d) = names.get(dep) {
                    visit(d, names, state)?;
                }
            }
            state.insert(&s.name, 2);
            Ok(())
        }
        let mut state = HashMap::new();
        for s in &self.sections {
            if s.kind != SectionKind::Options {
                visit(s, names, &mut state)?;
            }
        }
        Ok(())
    }

    pub fn options(&self) -> Option<&Section> {
        self.sections.iter().find(|s| s.kind == SectionKind::Options)
    }

    pub fn find(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.kind != SectionKind::Options && s.name == name)
    }

    pub fn tasks(&self) -> impl Iterator<Item = &Section> {
        self.sections.iter().filter(|s| s.kind == SectionKind::Task)
    }
}

pub(crate) fn dependencies(s: &Section) -> Vec<&str> {
    match s.kind {
        SectionKind::Field => s.get("extend").and_then(|e| e.value.split_whitespace().next()).into_iter().collect(),
        _ => s.kind.references().iter().flat_map(|(k, _)| s.all(k).map(|e| e.value.as_str())).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_and_columns() {
        let sc = Scenario::parse("[field F]\nbase = laurent 3 8\n\n[task t]\nop = filtrations # comment\n").unwrap();
        assert_eq!(sc.sections.len(), 2);
        let e = sc.sections[0].get("base").unwrap();
        assert_eq!((e.line, e.column), (2, 8));
        assert_eq!(sc.sections[1].get("op").unwrap().value, "filtrations");
    }

    #[test]
    fn undeclared_reference_has_position() {
        let err = Scenario::parse("[close C]\nleft = F\nright = G\nlevel = 2\n").unwrap_err();
        assert_eq!(err, Error::Parse { line: 2, column: 8, message: "undeclared field 'F'".into() });
    }

    #[test]
    fn rejects_bad_lines() {
        assert!(matches!(Scenario::parse("base = 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(Scenario::parse("[fields F]\n"), Err(Error::Parse { line: 1, column: 2, .. })));
        assert!(matches!(Scenario::parse("[field F]\nbase\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Scenario::parse("[field F]\ncolour = red\n"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(Scenario::parse("[field F]\nbase = laurent 3 4\n[field F]\nbase = laurent 3 4\n"), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn cycles_are_rejected() {
        let text = "[field A]\nextend = B unramified w 2\n[field B]\nextend = A unramified v 2\n";
        assert!(matches!(Scenario::parse(text), Err(Error::Parse { .. })));
    }
}
