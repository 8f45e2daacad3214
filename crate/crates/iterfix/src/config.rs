//! Line-oriented config files.
//!
//! A file holds any number of `[mapping]` stanzas (expression mappings to
//! register before the run) followed by at most one `[run]` stanza whose
//! keys the command line interprets. Lines are `key = value`, split at
//! the first `=` so expression values may contain comparison operators;
//! `#` starts a comment; blank lines separate nothing.
//!
//! ```text
//! [mapping]
//! id = halving_jump
//! domain = 0,1
//! expr = x == 1 ? 5/8 : x/2
//! fixed_points = 0
//! special_points = 1
//!
//! [run]
//! command = run
//! scheme = thakur
//! map = halving_jump
//! x1 = 0.9
//! n = 20
//! ```
//!
//! Every command emits its fully resolved settings in this format next to
//! its outputs, and re-running from that file reproduces the outputs
//! bitwise: numbers are printed in shortest round-trip form.

use std::path::Path;

use crate::error::{Error, Result};
use crate::mapping::MappingSpec;
use crate::space::{Domain, Point};

/// Ordered `key = value` pairs of one stanza.
#[derive(Clone, Debug, Default)]
pub struct KvBlock {
    entries: Vec<(String, String)>,
}

impl KvBlock {
    pub fn new(entries: Vec<(String, String)>) -> Self {
        KvBlock { entries }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|(k, _)| k.as_str())
    }
}

/// One `[mapping]` stanza, checked for shape but not yet validated as a
/// self-map (that happens at registration).
#[derive(Clone, Debug)]
pub struct MappingStanza {
    pub id: String,
    pub domain: Domain,
    pub expr: String,
    pub fixed_points: Option<Vec<Point>>,
    pub special_points: Vec<Point>,
}

impl MappingStanza {
    pub fn to_spec(&self) -> Result<MappingSpec> {
        let mut spec = MappingSpec::from_expr(&self.id, self.domain.clone(), &self.expr)?;
        if let Some(points) = &self.fixed_points {
            spec = spec.with_fixed_points(points.clone());
        }
        if !self.special_points.is_empty() {
            spec = spec.with_special_points(self.special_points.clone());
        }
        Ok(spec)
    }

    /// The stanza in file form, round-trippable through [`parse`].
    pub fn render(&self) -> String {
        let mut out = String::from("[mapping]\n");
        out.push_str(&format!("id = {}\n", self.id));
        out.push_str(&format!("dim = {}\n", self.domain.dim()));
        out.push_str(&format!("domain = {}\n", self.domain));
        out.push_str(&format!("expr = {}\n", self.expr));
        if let Some(points) = &self.fixed_points {
            out.push_str(&format!("fixed_points = {}\n", render_points(points)));
        }
        if !self.special_points.is_empty() {
            out.push_str(&format!(
                "special_points = {}\n",
                render_points(&self.special_points)
            ));
        }
        out
    }
}

#[derive(Clone, Debug, Default)]
pub struct ConfigFile {
    pub mappings: Vec<MappingStanza>,
    pub run: Option<KvBlock>,
}

fn render_points(points: &[Point]) -> String {
    points
        .iter()
        .map(|p| p.to_string())
        .collect::<Vec<_>>()
        .join(" ; ")
}

fn parse_points(s: &str, line: usize) -> Result<Vec<Point>> {
    let points: Result<Vec<Point>> = s
        .split(';')
        .map(|t| {
            t.trim().parse::<Point>().map_err(|e| Error::Config {
                line,
                detail: e.to_string(),
            })
        })
        .collect();
    let points = points?;
    if points.is_empty() {
        return Err(Error::Config {
            line,
            detail: "empty point list".to_string(),
        });
    }
    Ok(points)
}

struct RawStanza {
    name: String,
    line: usize,
    entries: Vec<(String, String, usize)>,
}

impl RawStanza {
    fn get(&self, key: &str) -> Option<(&str, usize)> {
        self.entries
            .iter()
            .find(|(k, _, _)| k == key)
            .map(|(_, v, l)| (v.as_str(), *l))
    }

    fn require(&self, key: &str) -> Result<(&str, usize)> {
        self.get(key).ok_or_else(|| Error::Config {
            line: self.line,
            detail: format!("[{}] stanza is missing key {key:?}", self.name),
        })
    }
}

const MAPPING_KEYS: [&str; 6] = ["id", "dim", "domain", "expr", "fixed_points", "special_points"];

fn build_mapping(raw: &RawStanza) -> Result<MappingStanza> {
    for (k, _, l) in &raw.entries {
        if !MAPPING_KEYS.contains(&k.as_str()) {
            return Err(Error::Config {
                line: *l,
                detail: format!("unknown [mapping] key {k:?}"),
            });
        }
    }
    let (id, _) = raw.require("id")?;
    let (domain_text, domain_line) = raw.require("domain")?;
    let domain = Domain::parse(domain_text).map_err(|e| Error::Config {
        line: domain_line,
        detail: e.to_string(),
    })?;
    if let Some((dim_text, dim_line)) = raw.get("dim") {
        let dim: usize = dim_text.parse().map_err(|_| Error::Config {
            line: dim_line,
            detail: format!("bad dim {dim_text:?}"),
        })?;
        if dim != domain.dim() {
            return Err(Error::Config {
                line: dim_line,
                detail: format!("dim = {dim} but the domain has {} coordinates", domain.dim()),
            });
        }
    }
    let (expr, _) = raw.require("expr")?;
    let fixed_points = match raw.get("fixed_points") {
        Some((v, l)) => Some(parse_points(v, l)?),
        None => None,
    };
    let special_points = match raw.get("special_points") {
        Some((v, l)) => parse_points(v, l)?,
        None => Vec::new(),
    };
    Ok(MappingStanza {
        id: id.to_string(),
        domain,
        expr: expr.to_string(),
        fixed_points,
        special_points,
    })
}

/// Parses config text. Section headers are `[mapping]` and `[run]`; at
/// most one `[run]` stanza is allowed, and keys may not repeat within a
/// stanza. Errors carry the 1-based line number.
pub fn parse(text: &str) -> Result<ConfigFile> {
    let mut stanzas: Vec<RawStanza> = Vec::new();
    for (i, raw_line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw_line.split_once('#') {
            Some((before, _)) => before.trim(),
            None => raw_line.trim(),
        };
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| Error::Config {
                line: line_no,
                detail: format!("malformed section header {line:?}"),
            })?;
            if name != "mapping" && name != "run" {
                return Err(Error::Config {
                    line: line_no,
                    detail: format!("unknown section [{name}], expected [mapping] or [run]"),
                });
            }
            stanzas.push(RawStanza {
                name: name.to_string(),
                line: line_no,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            line: line_no,
            detail: format!("expected `key = value`, got {line:?}"),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let stanza = stanzas.last_mut().ok_or_else(|| Error::Config {
            line: line_no,
            detail: "key before any section header".to_string(),
        })?;
        if stanza.entries.iter().any(|(k, _, _)| *k == key) {
            return Err(Error::Config {
                line: line_no,
                detail: format!("duplicate key {key:?} in [{}]", stanza.name),
            });
        }
        stanza.entries.push((key, value, line_no));
    }

    let mut file = ConfigFile::default();
    for raw in &stanzas {
        match raw.name.as_str() {
            "mapping" => file.mappings.push(build_mapping(raw)?),
            _ => {
                if file.run.is_some() {
                    return Err(Error::Config {
                        line: raw.line,
                        detail: "more than one [run] stanza".to_string(),
                    });
                }
                file.run = Some(KvBlock::new(
                    raw.entries
                        .iter()
                        .map(|(k, v, _)| (k.clone(), v.clone()))
                        .collect(),
                ));
            }
        }
    }
    Ok(file)
}

pub fn load(path: &Path) -> Result<ConfigFile> {
    parse(&std::fs::read_to_string(path)?)
}

/// Renders a `[run]` stanza from resolved key-value pairs.
pub fn render_run(entries: &[(String, String)]) -> String {
    let mut out = String::from("[run]\n");
    for (k, v) in entries {
        out.push_str(k);
        out.push_str(" = ");
        out.push_str(v);
        out.push('\n');
    }
    out
}
