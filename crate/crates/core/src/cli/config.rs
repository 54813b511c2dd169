//! Analysis configuration documents.

use std::collections::BTreeMap;

use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::scalar::{parse_rational, Rational};
use crate::shift::{Graph, Vertex};
use crate::suspension::Roof;
use crate::thermo::{HolderEnvelope, Potential};
use num_traits::ToPrimitive;

fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Validation { field: field.into(), reason: reason.into() }
}

/// A configured number: exact when written as an integer, decimal or `p/q`.
#[derive(Clone, Debug, PartialEq)]
pub struct Num {
    pub exact: Option<Rational>,
    pub float: f64,
}

/// Accepts JSON numbers, `"p/q"`, decimal strings and `"log(x)"`.
pub fn parse_num(v: &Value, field: &str) -> Result<Num> {
    let text = match v {
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.trim().to_string(),
        _ => return Err(invalid(field, "expected a number, \"p/q\" or \"log(x)\"")),
    };
    if let Some(r) = parse_rational(&text) {
        let float = r.to_f64().unwrap_or(f64::NAN);
        return Ok(Num { exact: Some(r), float });
    }
    let (sign, body) = match text.strip_prefix('-') {
        Some(rest) => (-1.0, rest.trim()),
        None => (1.0, text.as_str()),
    };
    if let Some(arg) = body.strip_prefix("log(").and_then(|s| s.strip_suffix(')')) {
        let x = parse_rational(arg).and_then(|r| r.to_f64()).or_else(|| arg.trim().parse::<f64>().ok());
        return match x {
            Some(x) if x > 0.0 => Ok(Num { exact: None, float: sign * x.ln() }),
            _ => Err(invalid(field, format!("log argument `{arg}` must be a positive number"))),
        };
    }
    match text.parse::<f64>() {
        Ok(f) if f.is_finite() => Ok(Num { exact: None, float: f }),
        _ => Err(invalid(field, format!("cannot parse `{text}` as a number"))),
    }
}

#[derive(Clone, Debug)]
pub struct Tolerances {
    pub pressure: f64,
    pub lattice: f64,
    pub dbar_cap: usize,
}

#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub graph: Graph,
    pub potential: Potential<f64>,
    pub roof: Roof<f64>,
    /// The roof in exact arithmetic when every entry is rational.
    pub roof_exact: Option<Roof<Rational>>,
    pub tolerances: Tolerances,
    pub params: Map<String, Value>,
}

fn object<'a>(v: &'a Value, field: &str) -> Result<&'a Map<String, Value>> {
    v.as_object().ok_or_else(|| invalid(field, "expected an object"))
}

fn parse_window(v: &Value, field: &str) -> Result<(i64, i64)> {
    let pair = v.as_array().filter(|a| a.len() == 2).ok_or_else(|| invalid(field, "expected [l, m]"))?;
    let get = |x: &Value| x.as_i64().ok_or_else(|| invalid(field, "window bounds must be integers"));
    let (l, m) = (get(&pair[0])?, get(&pair[1])?);
    if l > m {
        return Err(invalid(field, format!("window [{l}, {m}] is empty")));
    }
    Ok((l, m))
}

/// Table keyed by comma-joined windows.
fn parse_table(
    graph: &Graph,
    v: &Value,
    field: &str,
    memory: Option<(i64, i64)>,
) -> Result<((i64, i64), BTreeMap<Vec<Vertex>, Num>)> {
    let obj = object(v, field)?;
    let mut table = BTreeMap::new();
    let mut len = memory.map(|(l, m)| (m - l + 1) as usize);
    for (key, value) in obj {
        let path = format!("{field}.{key}");
        let word = key
            .split(',')
            .map(|name| graph.index_of(name.trim()).map_err(|_| invalid(&path, format!("unknown vertex `{}`", name.trim()))))
            .collect::<Result<Vec<_>>>()?;
        match len {
            Some(l) if l != word.len() => {
                return Err(invalid(&path, format!("window has {} symbols, expected {l}", word.len())));
            }
            _ => len = Some(word.len()),
        }
        if !graph.is_admissible(&word) {
            return Err(invalid(&path, "window is not admissible"));
        }
        table.insert(word, parse_num(value, &path)?);
    }
    let len = len.ok_or_else(|| invalid(field, "table is empty"))?;
    for w in graph.words(len) {
        if !table.contains_key(&w) {
            return Err(invalid(field, format!("missing entry for window `{}`", w.iter().map(|&v| graph.name(v)).collect::<Vec<_>>().join(","))));
        }
    }
    Ok((memory.unwrap_or((0, len as i64 - 1)), table))
}

fn positive(obj: &Map<String, Value>, key: &str, default: f64, field: &str) -> Result<f64> {
    match obj.get(key) {
        None => Ok(default),
        Some(v) => {
            let x = parse_num(v, &format!("{field}.{key}"))?.float;
            if x > 0.0 { Ok(x) } else { Err(invalid(format!("{field}.{key}"), "must be > 0")) }
        }
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<AnalysisConfig> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: format!("line {} column {}", e.line(), e.column()),
        reason: e.to_string(),
    })?;
    let root = object(&doc, "$")?;
    for key in root.keys() {
        if !["graph", "potential", "roof", "tolerances", "params"].contains(&key.as_str()) {
            return Err(invalid(key, "unknown top-level key"));
        }
    }
    let g = object(root.get("graph").ok_or_else(|| invalid("graph", "missing"))?, "graph")?;
    let names: Vec<String> = g
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| invalid("graph.vertices", "expected a list of names"))?
        .iter()
        .map(|v| v.as_str().map(str::to_string).ok_or_else(|| invalid("graph.vertices", "names must be strings")))
        .collect::<Result<_>>()?;
    let edges: Vec<(String, String)> = g
        .get("edges")
        .and_then(Value::as_array)
        .ok_or_else(|| invalid("graph.edges", "expected a list of [u, v] pairs"))?
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let pair = e.as_array().filter(|p| p.len() == 2);
            let name = |k: usize| pair.and_then(|p| p[k].as_str()).map(str::to_string);
            match (name(0), name(1)) {
                (Some(u), Some(v)) => Ok((u, v)),
                _ => Err(invalid(format!("graph.edges[{i}]"), "expected [u, v]")),
            }
        })
        .collect::<Result<_>>()?;
    for (i, (u, v)) in edges.iter().enumerate() {
        for x in [u, v] {
            if !names.contains(x) {
                return Err(invalid(format!("graph.edges[{i}]"), format!("unknown vertex `{x}`")));
            }
        }
    }
    let graph = Graph::new(&names, &edges).map_err(|e| invalid("graph", e.to_string()))?;

    let potential = match root.get("potential") {
        None => Potential::zero(&graph),
        Some(p) => {
            let p = object(p, "potential")?;
            let memory = p.get("memory").map(|m| parse_window(m, "potential.memory")).transpose()?;
            let table = p.get("table").ok_or_else(|| invalid("potential.table", "missing"))?;
            let (window, table) = parse_table(&graph, table, "potential.table", memory)?;
            let table = table.into_iter().map(|(k, v)| (k, v.float)).collect();
            Potential::from_table(&graph, window, table).map_err(|e| invalid("potential", e.to_string()))?
        }
    };

    let (roof, roof_exact) = match root.get("roof") {
        None => (Roof::constant(&graph, 1.0)?, Some(Roof::constant(&graph, Rational::from_integer(1.into()))?)),
        Some(r) => {
            let r = object(r, "roof")?;
            let memory = r.get("memory").map(|m| parse_window(m, "roof.memory")).transpose()?;
            let table = r.get("table").ok_or_else(|| invalid("roof.table", "missing"))?;
            let (window, table) = parse_table(&graph, table, "roof.table", memory)?;
            for (w, v) in &table {
                if !(v.float > 0.0) {
                    let key = w.iter().map(|&x| graph.name(x)).collect::<Vec<_>>().join(",");
                    return Err(invalid(format!("roof.{key}"), "must be > 0"));
                }
            }
            let envelope = match r.get("holder") {
                None => HolderEnvelope::default(),
                Some(h) => {
                    let h = object(h, "roof.holder")?;
                    let c = h.get("C").map(|v| parse_num(v, "roof.holder.C")).transpose()?.map_or(0.0, |n| n.float);
                    let alpha = positive(h, "alpha", 1.0, "roof.holder")?;
                    HolderEnvelope::new(c, alpha).map_err(|e| invalid("roof.holder", e.to_string()))?
                }
            };
            let floats = table.iter().map(|(k, v)| (k.clone(), v.float)).collect();
            let roof = Roof::new(Potential::from_table(&graph, window, floats)?.with_envelope(envelope))?;
            let exact = table
                .iter()
                .map(|(k, v)| v.exact.clone().map(|e| (k.clone(), e)))
                .collect::<Option<BTreeMap<_, _>>>()
                .map(|t| Potential::from_table(&graph, window, t).and_then(|p| Roof::new(p.with_envelope(envelope))))
                .transpose()?;
            (roof, exact)
        }
    };

    let empty = Map::new();
    let tol = match root.get("tolerances") {
        None => &empty,
        Some(t) => object(t, "tolerances")?,
    };
    let dbar_cap = positive(tol, "dbar_cap", crate::mixing::DEFAULT_DBAR_CAP as f64, "tolerances")?;
    let tolerances = Tolerances {
        pressure: positive(tol, "pressure", crate::thermo::DEFAULT_TOL, "tolerances")?,
        lattice: positive(tol, "lattice", crate::cocycle::DEFAULT_LATTICE_TOL, "tolerances")?,
        dbar_cap: dbar_cap as usize,
    };
    let params = match root.get("params") {
        None => Map::new(),
        Some(p) => object(p, "params")?.clone(),
    };
    Ok(AnalysisConfig { graph, potential, roof, roof_exact, tolerances, params })
}

impl AnalysisConfig {
    pub fn param_f64(&self, key: &str) -> Result<Option<f64>> {
        self.params.get(key).map(|v| parse_num(v, &format!("params.{key}")).map(|n| n.float)).transpose()
    }

    pub fn param_u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.as_u64().ok_or_else(|| invalid(format!("params.{key}"), "expected a nonnegative integer")),
        }
    }

    pub fn param_word(&self, field: &str, text: &str) -> Result<Vec<Vertex>> {
        if text.is_empty() {
            return Ok(Vec::new());
        }
        text.split(',')
            .map(|n| self.graph.index_of(n.trim()).map_err(|_| invalid(field, format!("unknown vertex `{}`", n.trim()))))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{"graph": {"vertices": ["a", "b"], "edges": [["a","a"],["a","b"],["b","a"],["b","b"]]}}"#;

    #[test]
    fn minimal_config() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.graph.num_vertices(), 2);
        assert_eq!(c.potential.constant_value(), Some(0.0));
        assert_eq!(c.roof.constant_value(), Some(1.0));
    }

    #[test]
    fn numbers() {
        assert_eq!(parse_num(&Value::from("3/4"), "x").unwrap().float, 0.75);
        assert!((parse_num(&Value::from("log(2)"), "x").unwrap().float - 2f64.ln()).abs() < 1e-16);
        assert!((parse_num(&Value::from("-log(1/3)"), "x").unwrap().float - 3f64.ln()).abs() < 1e-15);
        assert_eq!(parse_num(&serde_json::json!(1.5), "x").unwrap().exact, Some(crate::scalar::ratio(3, 2)));
        assert!(parse_num(&Value::from("log(-1)"), "x").is_err());
    }

    #[test]
    fn zero_roof_rejected() {
        let text = MINIMAL.replace("}}", r#"}, "roof": {"table": {"a": 1, "b": 0}}}"#);
        match parse_config(&text) {
            Err(Error::Validation { field, reason }) => {
                assert_eq!(field, "roof.b");
                assert_eq!(reason, "must be > 0");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_vertex_in_edge() {
        let text = MINIMAL.replace(r#"["b","b"]"#, r#"["b","c"]"#);
        assert!(matches!(parse_config(&text), Err(Error::Validation { .. })));
    }

    #[test]
    fn syntax_error_has_position() {
        assert!(matches!(parse_config("{\"graph\": "), Err(Error::Parse { .. })));
    }
}
