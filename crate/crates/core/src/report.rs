//! CSV output. Numbers use Rust's locale-independent formatting and rows
//! end with a single `\n`.

use std::io::Write;

use crate::montecarlo::{CurvePoint, TheoryPoint};

pub const CURVE_HEADER: &str = "threshold,pf_sim,pd_sim,pf_theory,pd_theory";
pub const THEORY_HEADER: &str = "threshold,pf_theory,pd_theory";

/// Writes simulated curve rows and returns the number of bytes written.
pub fn emit_csv<W: Write>(points: &[CurvePoint], mut out: W) -> std::io::Result<usize> {
    let mut text = String::with_capacity(48 * (points.len() + 1));
    text.push_str(CURVE_HEADER);
    text.push('\n');
    for p in points {
        text.push_str(&format!(
            "{},{:.6},{:.6},{:.6},{:.6}\n",
            p.threshold,
            p.pf_sim.get(),
            p.pd_sim.get(),
            p.pf_theory.get(),
            p.pd_theory.get()
        ));
    }
    out.write_all(text.as_bytes())?;
    Ok(text.len())
}

/// Writes closed-form rows and returns the number of bytes written.
pub fn emit_theory_csv<W: Write>(points: &[TheoryPoint], mut out: W) -> std::io::Result<usize> {
    let mut text = String::with_capacity(32 * (points.len() + 1));
    text.push_str(THEORY_HEADER);
    text.push('\n');
    for p in points {
        text.push_str(&format!("{},{:.6},{:.6}\n", p.threshold, p.pf.get(), p.pd.get()));
    }
    out.write_all(text.as_bytes())?;
    Ok(text.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::Probability;

    #[test]
    fn empty_is_header_only() {
        let mut buf = Vec::new();
        let n = emit_csv(&[], &mut buf).unwrap();
        assert_eq!(buf, b"threshold,pf_sim,pd_sim,pf_theory,pd_theory\n");
        assert_eq!(n, buf.len());
    }

    #[test]
    fn one_point_is_two_lines() {
        let p = |x| Probability::new(x).unwrap();
        let point = CurvePoint {
            threshold: 400.0,
            pf_sim: p(0.5),
            pd_sim: p(0.9),
            pf_theory: p(0.5),
            pd_theory: p(0.9),
        };
        let mut buf = Vec::new();
        emit_csv(&[point], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().nth(1).unwrap(), "400,0.500000,0.900000,0.500000,0.900000");
        assert!(!text.contains('\r'));
    }
}
