use fingap_core::Complex64 as C;
use serde_json::{json, Map, Value};

/// Rounds to 15 significant digits so that output does not depend on the
/// last bits of the arithmetic.
pub fn round15(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    if !v.is_finite() {
        return v;
    }
    format!("{v:.14e}").parse().unwrap_or(v)
}

pub fn num(v: f64) -> Value {
    if v.is_finite() {
        json!(round15(v))
    } else if v.is_nan() {
        Value::Null
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn cx(z: C) -> Value {
    json!([num(z.re), num(z.im)])
}

pub fn cxs(zs: &[C]) -> Value {
    Value::Array(zs.iter().map(|z| cx(*z)).collect())
}

/// Rounds every float in a tree built elsewhere.
pub fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap()),
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, normalize(v))).collect::<Map<_, _>>()),
        other => other,
    }
}

pub fn cell(v: f64) -> String {
    if v.is_finite() {
        format!("{}", round15(v))
    } else {
        format!("{v}")
    }
}

/// A CSV table; complex values occupy paired `_re`/`_im` columns.
#[derive(Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::Writer::from_writer(vec![]);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

pub fn cx_cells(z: C) -> [String; 2] {
    [cell(z.re), cell(z.im)]
}
