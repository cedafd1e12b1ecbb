//! Flat-file output conventions: `,` delimiter, `.` decimal, LF line
//! endings, doubles with 17 significant digits.

use std::io::Write;

/// Format a double with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

pub fn write_row<W: Write, S: AsRef<str>>(w: &mut W, fields: &[S]) -> std::io::Result<()> {
    let mut first = true;
    for f in fields {
        if !first {
            w.write_all(b",")?;
        }
        first = false;
        w.write_all(f.as_ref().as_bytes())?;
    }
    w.write_all(b"\n")
}
