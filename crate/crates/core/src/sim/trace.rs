use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rss::{Branch, CarPairState, MonitorVerdict};

pub const CSV_HEADER: [&str; 12] = [
    "t",
    "x1",
    "v1",
    "a1",
    "x2",
    "v2",
    "a2",
    "mode",
    "monitor_ok",
    "monitor_id",
    "invariant_J",
    "collided",
];

/// One control decision: the state it was taken in and what was chosen.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: f64,
    pub x1: f64,
    pub v1: f64,
    pub a1: f64,
    pub x2: f64,
    pub v2: f64,
    pub a2: f64,
    pub mode: Branch,
    pub monitor_ok: bool,
    pub monitor_id: Option<String>,
    pub invariant_j: bool,
    pub collided: bool,
}

impl TraceRecord {
    /// State before the decision, with the chosen accelerations.
    pub fn state(&self) -> CarPairState {
        CarPairState {
            x1: self.x1,
            v1: self.v1,
            a1: self.a1,
            x2: self.x2,
            v2: self.v2,
            a2: self.a2,
            t: self.t,
        }
    }

    pub fn verdict(&self) -> MonitorVerdict {
        MonitorVerdict {
            satisfied: self.monitor_ok,
            failed_clause: self.monitor_id.clone(),
            branch: self.mode,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

impl Trace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn first_collision(&self) -> Option<usize> {
        self.records.iter().position(|r| r.collided)
    }

    pub fn first_monitor_failure(&self) -> Option<usize> {
        self.records.iter().position(|r| !r.monitor_ok)
    }

    pub fn first_invariant_failure(&self) -> Option<usize> {
        self.records.iter().position(|r| !r.invariant_j)
    }

    /// Smallest `x2 - x1` over the recorded states.
    pub fn min_gap(&self) -> Option<f64> {
        self.records.iter().map(|r| r.x2 - r.x1).reduce(f64::min)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<(), TraceError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER)?;
        for r in &self.records {
            let floats = [r.t, r.x1, r.v1, r.a1, r.x2, r.v2, r.a2].map(format_g17);
            let row = floats.iter().map(String::as_str).chain([
                r.mode.as_str(),
                bool_str(r.monitor_ok),
                r.monitor_id.as_deref().unwrap_or(""),
                bool_str(r.invariant_j),
                bool_str(r.collided),
            ]);
            out.write_record(row)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Trace, TraceError> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers()?.clone();
        let mut col = [0usize; 12];
        for (i, name) in CSV_HEADER.iter().enumerate() {
            col[i] = header
                .iter()
                .position(|h| h.trim() == *name)
                .ok_or_else(|| TraceError::MissingColumn(name.to_string()))?;
        }
        let mut records = Vec::new();
        for (idx, row) in rdr.records().enumerate() {
            let row = row?;
            let line = idx + 2;
            let field = |i: usize| row.get(col[i]).unwrap_or("").trim();
            let num = |i: usize| -> Result<f64, TraceError> {
                field(i).parse::<f64>().map_err(|_| TraceError::Field {
                    line,
                    column: CSV_HEADER[i].to_string(),
                    value: field(i).to_string(),
                })
            };
            let flag = |i: usize| -> Result<bool, TraceError> {
                match field(i) {
                    "true" | "True" | "1" => Ok(true),
                    "false" | "False" | "0" => Ok(false),
                    other => Err(TraceError::Field {
                        line,
                        column: CSV_HEADER[i].to_string(),
                        value: other.to_string(),
                    }),
                }
            };
            let mode = field(7).parse::<Branch>().map_err(|_| TraceError::Field {
                line,
                column: "mode".into(),
                value: field(7).to_string(),
            })?;
            let id = field(9);
            records.push(TraceRecord {
                t: num(0)?,
                x1: num(1)?,
                v1: num(2)?,
                a1: num(3)?,
                x2: num(4)?,
                v2: num(5)?,
                a2: num(6)?,
                mode,
                monitor_ok: flag(8)?,
                monitor_id: (!id.is_empty()).then(|| id.to_string()),
                invariant_j: flag(10)?,
                collided: flag(11)?,
            });
        }
        Ok(Trace { records })
    }
}

#[derive(Debug, Error)]
pub enum TraceError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("trace has no `{0}` column")]
    MissingColumn(String),
    #[error("line {line}: bad {column} value `{value}`")]
    Field { line: usize, column: String, value: String },
}

fn bool_str(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// C's `%.17g`: 17 significant digits, trailing zeros removed, scientific
/// notation below `1e-4` and from `1e17` on.
pub fn format_g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.into();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.into();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let fixed = format!("{x:.*}", (16 - exp) as usize);
        trim_fraction(&fixed).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn g17_matches_c() {
        let cases = [
            (0.1, "0.10000000000000001"),
            (22.75, "22.75"),
            (1.0, "1"),
            (-8.0, "-8"),
            (1e-5, "1.0000000000000001e-05"),
            (1e17, "1e+17"),
            (123456789012345678.0, "1.2345678901234568e+17"),
            (0.0001, "0.0001"),
            (1.0 / 3.0, "0.33333333333333331"),
            (1e100, "1e+100"),
            (-0.0, "-0"),
        ];
        for (x, want) in cases {
            let got = format_g17(x);
            assert_eq!(got, want, "{x}");
        }
    }

    #[test]
    fn g17_round_trips() {
        for x in [0.1, 5e-324, f64::MAX, -1.5e-7, 6.02214076e23, 66.25] {
            assert_eq!(format_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    fn rec(t: f64, ok: bool) -> TraceRecord {
        TraceRecord {
            t,
            x1: 0.1,
            v1: 10.0,
            a1: 2.0,
            x2: 60.0,
            v2: 10.0,
            a2: -8.0,
            mode: Branch::Free,
            monitor_ok: ok,
            monitor_id: (!ok).then(|| "proper.a1".to_string()),
            invariant_j: true,
            collided: false,
        }
    }

    #[test]
    fn csv_round_trip() {
        let tr = Trace {
            records: vec![rec(0.0, true), rec(1.0, false)],
        };
        let text = tr.to_csv_string();
        assert!(text.starts_with("t,x1,v1,a1,x2,v2,a2,mode,monitor_ok,monitor_id,invariant_J,collided\n"));
        assert!(text.contains("0,0.10000000000000001,10,2,60,10,-8,free,true,,true,false"));
        assert_eq!(Trace::read_csv(text.as_bytes()).unwrap(), tr);
        assert_eq!(tr.first_monitor_failure(), Some(1));
    }

    #[test]
    fn csv_errors_name_the_line() {
        let bad = "t,x1,v1,a1,x2,v2,a2,mode,monitor_ok,monitor_id,invariant_J,collided\n0,zz,1,1,1,1,1,free,true,,true,false\n";
        let err = Trace::read_csv(bad.as_bytes()).unwrap_err().to_string();
        assert_eq!(err, "line 2: bad x1 value `zz`");
        let missing = "t,x1\n0,0\n";
        assert!(matches!(
            Trace::read_csv(missing.as_bytes()),
            Err(TraceError::MissingColumn(_))
        ));
    }
}
