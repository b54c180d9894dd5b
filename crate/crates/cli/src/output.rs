//! Text serialization of sweep rows and atomic file output.

use std::io::{self, Write};
use std::path::Path;

use qrg_coherence::analysis::SweepRow;

pub const CSV_HEADER: &str = "model,rg_step,subsystem,bare,flowed,coherence,derivative";

/// Shortest-form rendering of `x` rounded to 12 significant digits.
///
/// Plain decimal notation for exponents in `-5..12`, scientific otherwise.
pub fn fmt_sig(x: f64) -> String {
    const DIGITS: i32 = 12;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..DIGITS).contains(&exp) {
        let decimals = (DIGITS - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_string()
    } else {
        t.to_string()
    }
}

pub fn csv_line(row: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{}",
        row.model,
        row.rg_step,
        row.subsystem,
        fmt_sig(row.bare),
        fmt_sig(row.flowed),
        fmt_sig(row.coherence),
        row.derivative.map(fmt_sig).unwrap_or_default()
    )
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut out = String::with_capacity(64 * (rows.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&csv_line(row));
        out.push('\n');
    }
    out
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename, or to stdout when `path` is `None`.
pub fn write_output(path: Option<&Path>, contents: &str) -> io::Result<()> {
    match path {
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
            stdout.flush()
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
            tmp.write_all(contents.as_bytes())?;
            tmp.flush()?;
            tmp.persist(path).map_err(|e| e.error)?;
            Ok(())
        }
    }
}
