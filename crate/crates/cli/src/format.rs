//! Number formatting shared by reports and CSV: 12 significant digits,
//! trailing zeros trimmed, exponent form outside `1e-5 ≤ |x| < 1e12`.

use std::io::{self, Write};

pub const SIG_DIGITS: usize = 12;

pub fn sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// CSV with a fixed header; rows are written in call order.
pub struct Csv<W: Write> {
    out: W,
    columns: usize,
}

impl<W: Write> Csv<W> {
    pub fn new(mut out: W, header: &[&str]) -> io::Result<Self> {
        writeln!(out, "{}", header.join(","))?;
        Ok(Self { out, columns: header.len() })
    }

    pub fn row(&mut self, cells: &[String]) -> io::Result<()> {
        debug_assert_eq!(cells.len(), self.columns);
        writeln!(self.out, "{}", cells.join(","))
    }

    pub fn numbers(&mut self, values: &[f64]) -> io::Result<()> {
        let cells: Vec<String> = values.iter().copied().map(sig).collect();
        self.row(&cells)
    }

    pub fn finish(mut self) -> io::Result<()> {
        self.out.flush()
    }
}
