use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::geometry::Metric;
use crate::graded::{Chart, Coordinate, FunctionSymbol, Parity, SuperScalar};
use crate::products::{ClaimId, TwistedProductSpec};

use super::expr::{parse_even_expression, parse_expression, ParseError};

/// A scenario diagnostic. `line` and `column` are 1-based; a line of 0 means
/// the problem concerns the document as a whole.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScenarioError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            f.write_str(&self.message)
        } else {
            write!(
                f,
                "line {}, column {}: {}",
                self.line, self.column, self.message
            )
        }
    }
}

impl std::error::Error for ScenarioError {}

/// A resolved scenario: the product to build and the claims to check.
#[derive(Clone, Debug)]
pub struct ScenarioDocument {
    pub spec: TwistedProductSpec,
    pub claims: Vec<ClaimId>,
    pub twist_source: String,
}

impl ScenarioDocument {
    pub fn chart(&self) -> &Arc<Chart> {
        self.spec.chart()
    }

    /// Chart index of a frame written `dx` or `x`.
    pub fn frame(&self, name: &str) -> Option<usize> {
        let chart = self.chart();
        chart
            .index_of(name)
            .or_else(|| name.strip_prefix('d').and_then(|n| chart.index_of(n)))
    }
}

const SECTIONS: [&str; 7] = [
    "chart.M1",
    "chart.M2",
    "symbols",
    "metric.M1",
    "metric.M2",
    "twist",
    "claims",
];

#[derive(Clone, Debug)]
struct Entry {
    line: usize,
    key: String,
    key_col: usize,
    value: String,
    /// Byte offset of `value` within its line.
    value_at: usize,
    text: String,
}

impl Entry {
    fn error(&self, msg: impl Into<String>) -> ScenarioError {
        ScenarioError {
            line: self.line,
            column: self.key_col,
            message: msg.into(),
        }
    }

    fn value_error(&self, e: &ParseError) -> ScenarioError {
        self.error_at(self.value_at + e.offset, e.kind.to_string())
    }

    fn error_at(&self, byte: usize, msg: impl Into<String>) -> ScenarioError {
        let byte = byte.min(self.text.len());
        ScenarioError {
            line: self.line,
            column: self.text[..byte].chars().count() + 1,
            message: msg.into(),
        }
    }
}

#[derive(Debug, Default)]
struct Section {
    line: usize,
    entries: Vec<Entry>,
}

fn split_sections(doc: &str) -> Result<BTreeMap<&'static str, Section>, ScenarioError> {
    let mut sections: BTreeMap<&'static str, Section> = BTreeMap::new();
    let mut current: Option<&'static str> = None;
    for (n, raw) in doc.lines().enumerate() {
        let line = n + 1;
        let text = raw.split('#').next().unwrap_or("");
        let trimmed = text.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = text.len() - text.trim_start().len();
        let col = raw[..indent].chars().count() + 1;
        if let Some(inner) = trimmed.strip_prefix('[') {
            let Some(name) = inner.strip_suffix(']') else {
                return Err(ScenarioError {
                    line,
                    column: col,
                    message: "unterminated section header".into(),
                });
            };
            let name = name.trim();
            let Some(&known) = SECTIONS.iter().find(|&&s| s == name) else {
                return Err(ScenarioError {
                    line,
                    column: col,
                    message: format!("unknown section [{name}]"),
                });
            };
            if sections.contains_key(known) {
                return Err(ScenarioError {
                    line,
                    column: col,
                    message: format!("duplicate section [{known}]"),
                });
            }
            sections.insert(
                known,
                Section {
                    line,
                    entries: Vec::new(),
                },
            );
            current = Some(known);
            continue;
        }
        let Some(section) = current else {
            return Err(ScenarioError {
                line,
                column: col,
                message: "entry outside of any section".into(),
            });
        };
        let Some(eq) = text.find('=') else {
            return Err(ScenarioError {
                line,
                column: col,
                message: "expected `key = value`".into(),
            });
        };
        let key = text[..eq].trim().to_string();
        let value_raw = &text[eq + 1..];
        let value_at = eq + 1 + (value_raw.len() - value_raw.trim_start().len());
        let entry = Entry {
            line,
            key,
            key_col: col,
            value: value_raw.trim().to_string(),
            value_at,
            text: raw.to_string(),
        };
        if entry.key.is_empty() {
            return Err(entry.error("missing key"));
        }
        let sec = sections.get_mut(section).expect("section exists");
        if sec.entries.iter().any(|e| e.key == entry.key) {
            return Err(entry.error(format!("duplicate key `{}`", entry.key)));
        }
        sec.entries.push(entry);
    }
    Ok(sections)
}

fn require<'s>(
    sections: &'s BTreeMap<&'static str, Section>,
    name: &str,
) -> Result<&'s Section, ScenarioError> {
    sections.get(name).ok_or_else(|| ScenarioError {
        line: 0,
        column: 0,
        message: format!("missing section [{name}]"),
    })
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_alphabetic())
        && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn name_list(e: &Entry) -> Result<Vec<String>, ScenarioError> {
    if e.value.is_empty() {
        return Ok(Vec::new());
    }
    e.value
        .split(',')
        .map(|n| {
            let n = n.trim();
            if is_identifier(n) {
                Ok(n.to_string())
            } else {
                Err(e.error(format!("invalid coordinate name `{n}`")))
            }
        })
        .collect()
}

/// Even and odd names of one factor.
fn factor_coords(sec: &Section) -> Result<(Vec<String>, Vec<String>), ScenarioError> {
    let (mut even, mut odd) = (Vec::new(), Vec::new());
    for e in &sec.entries {
        match e.key.as_str() {
            "even" => even = name_list(e)?,
            "odd" => odd = name_list(e)?,
            other => {
                return Err(e.error(format!("unknown key `{other}`, expected `even` or `odd`")))
            }
        }
    }
    Ok((even, odd))
}

struct SymbolDecl<'e> {
    entry: &'e Entry,
    deps: Vec<String>,
    invertible: bool,
    derivatives: Vec<(String, String, usize)>,
}

fn symbol_decl(e: &Entry) -> Result<SymbolDecl<'_>, ScenarioError> {
    if !is_identifier(&e.key) {
        return Err(e.error(format!("invalid symbol name `{}`", e.key)));
    }
    let mut parts = e.value.split(';');
    let raw_head = parts.next().unwrap_or("");
    let head = raw_head.trim();
    let Some(rest) = head.strip_prefix('(') else {
        return Err(e.error_at(e.value_at, "expected `(` followed by the dependency list"));
    };
    let Some(close) = rest.find(')') else {
        return Err(e.error_at(e.value_at, "unterminated dependency list"));
    };
    let deps: Vec<String> = rest[..close]
        .split(',')
        .map(|d| d.trim().to_string())
        .filter(|d| !d.is_empty())
        .collect();
    let flag = rest[close + 1..].trim();
    let invertible = match flag {
        "" => false,
        "invertible" => true,
        other => return Err(e.error(format!("unknown flag `{other}`"))),
    };
    let mut derivatives = Vec::new();
    let mut at = e.value_at + raw_head.len() + 1;
    for part in parts {
        let offset = at + (part.len() - part.trim_start().len());
        at += part.len() + 1;
        let Some((k, v)) = part.split_once('=') else {
            return Err(e.error_at(offset, "expected `dcoord = expression`"));
        };
        let coord = k.trim().strip_prefix('d').unwrap_or("").to_string();
        if !deps.contains(&coord) {
            return Err(e.error_at(
                offset,
                format!("`{}` is not a derivative along a dependency", k.trim()),
            ));
        }
        let v_at = offset + k.trim_start().len() + 1 + (v.len() - v.trim_start().len());
        derivatives.push((coord, v.trim().to_string(), v_at));
    }
    Ok(SymbolDecl {
        entry: e,
        deps,
        invertible,
        derivatives,
    })
}

fn add_symbols(
    chart: Chart,
    decls: &[SymbolDecl],
    with_derivatives: Option<&Arc<Chart>>,
) -> Result<Chart, ScenarioError> {
    let mut chart = chart;
    for d in decls {
        let deps: Vec<&str> = d.deps.iter().map(String::as_str).collect();
        let mut sym = FunctionSymbol::new(&d.entry.key, &deps, d.invertible);
        if let (Some(ctx), false) = (with_derivatives, d.derivatives.is_empty()) {
            let mut map = BTreeMap::new();
            for (coord, src, at) in &d.derivatives {
                let v = parse_even_expression(src, ctx)
                    .map_err(|err| d.entry.error_at(at + err.offset, err.kind.to_string()))?;
                if map.insert(coord.clone(), v).is_some() {
                    return Err(d
                        .entry
                        .error_at(*at, format!("derivative along `{coord}` given twice")));
                }
            }
            sym = sym
                .with_derivatives(map)
                .map_err(|err| d.entry.error(err.to_string()))?;
        }
        chart = chart
            .with_symbol(sym)
            .map_err(|err| d.entry.error(err.to_string()))?;
    }
    Ok(chart)
}

fn factor_metric(
    chart: &Arc<Chart>,
    sec: &Section,
    name: &str,
    frame: &[usize],
) -> Result<Metric, ScenarioError> {
    let mut given: BTreeMap<(usize, usize), (SuperScalar, &Entry)> = BTreeMap::new();
    for e in &sec.entries {
        let parts: Vec<&str> = e.key.split(',').map(str::trim).collect();
        let [a, b] = parts[..] else {
            return Err(e.error("metric keys name two frames, as in `dx,dy`"));
        };
        let idx = |f: &str| -> Result<usize, ScenarioError> {
            let coord = f
                .strip_prefix('d')
                .ok_or_else(|| e.error(format!("frame `{f}` must be written d<coordinate>")))?;
            chart
                .index_of(coord)
                .filter(|i| frame.contains(i))
                .ok_or_else(|| e.error(format!("`{f}` is not a frame of {name}")))
        };
        let (i, j) = (idx(a)?, idx(b)?);
        let v = parse_expression(&e.value, chart).map_err(|err| e.value_error(&err))?;
        let expected = chart.parity(i) + chart.parity(j);
        if !v.is_zero() && v.parity() != Some(expected) {
            return Err(e.error(format!(
                "g({a},{b}) must be {}",
                if expected == Parity::Odd {
                    "odd"
                } else {
                    "even"
                }
            )));
        }
        if i == j && chart.parity(i).is_odd() && !v.is_zero() {
            return Err(e.error(format!(
                "graded symmetry forces g({a},{a}) = 0 for an odd frame"
            )));
        }
        let sign = chart.parity(i).koszul(chart.parity(j));
        if let Some((prev, pe)) = given.get(&(j, i)) {
            let mirror = if sign { -&v } else { v.clone() };
            if *prev != mirror {
                return Err(e.error(format!(
                    "g({a},{b}) conflicts with line {} under graded symmetry",
                    pe.line
                )));
            }
            continue;
        }
        given.insert((i, j), (v, e));
    }
    let plain: BTreeMap<(usize, usize), SuperScalar> =
        given.into_iter().map(|(k, (v, _))| (k, v)).collect();
    let header = |msg: String| ScenarioError {
        line: sec.line,
        column: 1,
        message: msg,
    };
    let metric = Metric::from_entries(chart, frame.to_vec(), &plain)
        .map_err(|e| header(format!("{name}: {e}")))?;
    let defects = metric.validate();
    if !defects.is_empty() {
        let text: Vec<String> = defects.iter().map(|d| d.to_string()).collect();
        return Err(header(format!(
            "{name} is not a valid metric: {}",
            text.join("; ")
        )));
    }
    Ok(metric)
}

/// Parses a scenario document.
///
/// ```text
/// [chart.M1]
/// even = x
/// odd = a, b
/// [chart.M2]
/// even = y
/// [symbols]
/// h = (x, y) invertible
/// [metric.M1]
/// dx,dx = 1
/// da,db = 1
/// [metric.M2]
/// dy,dy = 1
/// [twist]
/// h = h(x,y)
/// [claims]
/// verify = all
/// ```
///
/// Metric tables list one triangle; the other is filled by graded symmetry.
/// `#` starts a comment. `[symbols]` and `[claims]` are optional, the latter
/// defaulting to every claim.
pub fn parse_scenario(doc: &str) -> Result<ScenarioDocument, ScenarioError> {
    let sections = split_sections(doc)?;
    let (e1, o1) = factor_coords(require(&sections, "chart.M1")?)?;
    let (e2, o2) = factor_coords(require(&sections, "chart.M2")?)?;

    let mut coords = Vec::new();
    let mut seen = BTreeMap::new();
    for (names, parity, factor) in [
        (&e1, Parity::Even, "chart.M1"),
        (&o1, Parity::Odd, "chart.M1"),
        (&e2, Parity::Even, "chart.M2"),
        (&o2, Parity::Odd, "chart.M2"),
    ] {
        for n in names {
            if let Some(prev) = seen.insert(n.clone(), factor) {
                let sec = &sections[factor];
                return Err(ScenarioError {
                    line: sec.line,
                    column: 1,
                    message: format!("coordinate `{n}` already declared in [{prev}]"),
                });
            }
            coords.push(Coordinate {
                name: Arc::from(n.as_str()),
                parity,
            });
        }
    }
    let m1_len = e1.len() + o1.len();
    let base = Chart::new(coords).map_err(|e| ScenarioError {
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;

    let decls = match sections.get("symbols") {
        Some(sec) => sec
            .entries
            .iter()
            .map(symbol_decl)
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };
    let opaque = add_symbols(base.clone(), &decls, None)?.into_shared();
    let chart = add_symbols(base, &decls, Some(&opaque))?.into_shared();

    let frame1: Vec<usize> = (0..m1_len).collect();
    let frame2: Vec<usize> = (m1_len..chart.dim()).collect();
    let g1 = factor_metric(&chart, require(&sections, "metric.M1")?, "M1", &frame1)?;
    let g2 = factor_metric(&chart, require(&sections, "metric.M2")?, "M2", &frame2)?;

    let twist_sec = require(&sections, "twist")?;
    let entry = match &twist_sec.entries[..] {
        [e] if e.key == "h" => e,
        [e] => return Err(e.error(format!("expected `h = ...`, found key `{}`", e.key))),
        _ => {
            return Err(ScenarioError {
                line: twist_sec.line,
                column: 1,
                message: "[twist] holds exactly one entry `h = ...`".into(),
            })
        }
    };
    let h = parse_expression(&entry.value, &chart).map_err(|e| entry.value_error(&e))?;
    if h.parity() != Some(Parity::Even) {
        return Err(entry.error_at(entry.value_at, "the twist must be even"));
    }
    h.invert().map_err(|e| {
        entry.error_at(entry.value_at, format!("the twist must be invertible: {e}"))
    })?;

    let claims = match sections.get("claims") {
        None => ClaimId::all(),
        Some(sec) => match &sec.entries[..] {
            [] => ClaimId::all(),
            [e] if e.key == "verify" => ClaimId::parse_list(&e.value)
                .map_err(|err| e.error_at(e.value_at, err.to_string()))?,
            [e, ..] => return Err(e.error("[claims] holds a single `verify = ...` entry")),
        },
    };

    let spec = TwistedProductSpec::new(g1, g2, h).map_err(|e| ScenarioError {
        line: 0,
        column: 0,
        message: e.to_string(),
    })?;
    Ok(ScenarioDocument {
        spec,
        claims,
        twist_source: entry.value.clone(),
    })
}
