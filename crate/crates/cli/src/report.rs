//! Output model shared by all subcommands and its three renderings.

use serde_json::{json, Map, Number, Value};

use crate::args::Format;

pub const JSON_DIGITS: u32 = 17;
pub const TABLE_DIGITS: u32 = 6;

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

/// One command's output. `result` rows share `columns`, so CSV column
/// counts are fixed per subcommand.
#[derive(Debug)]
pub struct Report {
    pub input: Value,
    pub method: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub diagnostics: Map<String, Value>,
}

impl Report {
    pub fn new(input: Value, method: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Report { input, method: method.into(), columns, rows: Vec::new(), diagnostics: Map::new() }
    }

    pub fn diag(&mut self, key: &str, value: Value) {
        self.diagnostics.insert(key.to_string(), value);
    }

    pub fn render(&self, format: Format, precision: Option<u32>) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(precision.unwrap_or(JSON_DIGITS)),
            Format::Table => self.to_table(precision.unwrap_or(TABLE_DIGITS)),
        }
    }

    fn to_json(&self) -> String {
        let result: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let record: Map<String, Value> =
                    self.columns.iter().zip(row).map(|(c, cell)| (c.to_string(), cell_json(cell))).collect();
                Value::Object(record)
            })
            .collect();
        let doc = json!({
            "input": self.input,
            "method": self.method,
            "result": result,
            "diagnostics": Value::Object(self.diagnostics.clone()),
        });
        let mut out = serde_json::to_string_pretty(&doc).expect("serializable");
        out.push('\n');
        out
    }

    fn to_csv(&self, digits: u32) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| cell_text(c, digits)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn to_table(&self, digits: u32) -> String {
        let text: Vec<Vec<String>> =
            self.rows.iter().map(|row| row.iter().map(|c| cell_text(c, digits)).collect()).collect();
        let widths: Vec<usize> = self
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| text.iter().map(|r| r[i].len()).chain([c.len()]).max().unwrap_or(0))
            .collect();
        let line = |cells: Vec<&str>| {
            let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            padded.join("  ") + "\n"
        };
        let mut out = line(self.columns.clone());
        for row in &text {
            out.push_str(&line(row.iter().map(String::as_str).collect()));
        }
        out
    }
}

fn cell_json(cell: &Cell) -> Value {
    match cell {
        Cell::Int(i) => Value::from(*i),
        Cell::Float(x) => num(*x),
        Cell::Text(s) => Value::String(s.clone()),
    }
}

fn cell_text(cell: &Cell, digits: u32) -> String {
    match cell {
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) => fmt_sig(*x, digits),
        Cell::Text(s) => s.clone(),
    }
}

/// JSON number with 17 significant digits; non-finite values become null.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let n: Number = fmt_sig(x, JSON_DIGITS).parse().expect("valid JSON number");
    Value::Number(n)
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

/// `%.{digits}g`: fixed notation for exponents in `-4..digits`,
/// scientific otherwise, trailing zeros removed.
pub fn fmt_sig(x: f64, digits: u32) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let p = digits.max(1) as i32;
    let sci = format!("{:.*e}", (p - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..p).contains(&exp) {
        trim_zeros(format!("{:.*}", (p - 1 - exp) as usize, x))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(1.0 - (-1.0f64).exp(), 6), "0.632121");
        assert_eq!(fmt_sig(1.0, 6), "1");
        assert_eq!(fmt_sig(-1.77108681, 4), "-1.771");
        assert_eq!(fmt_sig(4.88e-5, 3), "4.88e-5");
        assert_eq!(fmt_sig(123456789.0, 6), "1.23457e8");
        assert_eq!(fmt_sig(0.1, 17), "0.10000000000000001");
    }

    #[test]
    fn json_numbers_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 41.81] {
            let text = num(x).to_string();
            assert_eq!(text.parse::<f64>().unwrap(), x, "{text}");
        }
        assert_eq!(num(f64::NAN), Value::Null);
    }
}
