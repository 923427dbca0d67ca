//! CSV and JSON rendering. Both embed the program version, the command and
//! every resolved parameter, and both are deterministic.

use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct Column {
    pub name: &'static str,
    pub unit: &'static str,
}

pub fn col(name: &'static str, unit: &'static str) -> Column {
    Column { name, unit }
}

#[derive(Debug)]
pub enum Payload {
    Table { columns: Vec<Column>, rows: Vec<Vec<Value>> },
    /// Named values with units; a nested value stays structured in JSON.
    Scalar(Vec<(Column, Value)>),
}

impl Payload {
    /// CSV is the natural form of a table, JSON of a scalar.
    pub fn default_format(&self) -> Format {
        match self {
            Payload::Table { .. } => Format::Csv,
            Payload::Scalar(_) => Format::Json,
        }
    }
}

#[derive(Debug)]
pub struct Report {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub payload: Payload,
}

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn cell(v: &Value) -> String {
    match v {
        Value::Null => "nan".into(),
        Value::String(s) => quote(s),
        Value::Number(_) | Value::Bool(_) => v.to_string(),
        other => quote(&other.to_string()),
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn header(report: &Report, columns: &[&Column]) -> String {
    let params: Vec<String> = report.params.iter().map(|(k, v)| format!("{k}={v}")).collect();
    let cols: Vec<String> = columns.iter().map(|c| format!("{} [{}]", c.name, c.unit)).collect();
    format!(
        "# rotrap {VERSION} {} | {} | {}\n",
        report.command,
        params.join(" "),
        cols.join(", ")
    )
}

fn join_row(row: &[Value]) -> String {
    let cells: Vec<String> = row.iter().map(cell).collect();
    cells.join(",") + "\n"
}

fn params_json(report: &Report) -> Value {
    let mut m = Map::new();
    for (k, v) in &report.params {
        m.insert(k.clone(), Value::String(v.clone()));
    }
    Value::Object(m)
}

pub fn render(report: &Report, format: Format) -> String {
    match (&report.payload, format) {
        (Payload::Table { columns, rows }, Format::Csv) => {
            let mut out = header(report, &columns.iter().collect::<Vec<_>>());
            for r in rows {
                out += &join_row(r);
            }
            out
        }
        (Payload::Scalar(items), Format::Csv) => {
            let cols: Vec<&Column> = items.iter().map(|(c, _)| c).collect();
            let values: Vec<Value> = items.iter().map(|(_, v)| v.clone()).collect();
            header(report, &cols) + &join_row(&values)
        }
        (Payload::Table { columns, rows }, Format::Json) => {
            let cols: Vec<Value> = columns.iter().map(|c| json!({"name": c.name, "unit": c.unit})).collect();
            let doc = json!({
                "version": VERSION,
                "command": report.command,
                "params": params_json(report),
                "columns": cols,
                "rows": rows,
            });
            serde_json::to_string_pretty(&doc).expect("json values always serialise") + "\n"
        }
        (Payload::Scalar(items), Format::Json) => {
            let mut result = Map::new();
            let mut units = Map::new();
            for (c, v) in items {
                result.insert(c.name.to_string(), v.clone());
                units.insert(c.name.to_string(), Value::String(c.unit.to_string()));
            }
            let doc = json!({
                "version": VERSION,
                "command": report.command,
                "params": params_json(report),
                "result": result,
                "units": units,
            });
            serde_json::to_string_pretty(&doc).expect("json values always serialise") + "\n"
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(payload: Payload) -> Report {
        Report {
            command: "demo".into(),
            params: vec![("eps".into(), "0.001".into())],
            payload,
        }
    }

    #[test]
    fn csv_table() {
        let r = report(Payload::Table {
            columns: vec![col("r0", "length"), col("regime", "-")],
            rows: vec![vec![json!(0.5), json!("series")], vec![json!(f64::NAN), json!("a,b")]],
        });
        let s = render(&r, Format::Csv);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], format!("# rotrap {VERSION} demo | eps=0.001 | r0 [length], regime [-]"));
        assert_eq!(lines[1], "0.5,series");
        assert_eq!(lines[2], "nan,\"a,b\"");
    }

    #[test]
    fn json_scalar() {
        let r = report(Payload::Scalar(vec![(col("omega_c", "1/time"), json!(3.026))]));
        let v: Value = serde_json::from_str(&render(&r, Format::Json)).unwrap();
        assert_eq!(v["result"]["omega_c"], json!(3.026));
        assert_eq!(v["params"]["eps"], json!("0.001"));
        assert_eq!(r.payload.default_format(), Format::Json);
    }
}
