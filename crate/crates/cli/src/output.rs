//! Number, matrix and CSV formatting.

use std::fmt::Write;

use ctcsim_core::{ComplexMatrix, DistinguishabilityRecord};

pub const CSV_HEADER: &str = "p,A,G,omega,t,Q_minus,Q_zero,R_numeric,R_paper,R_discrepancy";

/// Scientific notation with `precision` significant digits.
pub fn real(x: f64, precision: usize) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{:.*e}", precision - 1, x)
}

pub fn matrix(m: &ComplexMatrix, precision: usize) -> String {
    let mut out = String::new();
    for i in 0..m.rows() {
        let cells: Vec<String> = (0..m.cols())
            .map(|j| {
                let z = m.get(i, j);
                let sign = if z.im.is_sign_negative() && z.im != 0.0 { '-' } else { '+' };
                format!("{}{}{}i", real(z.re, precision), sign, real(z.im.abs(), precision))
            })
            .collect();
        writeln!(out, "  [{}]", cells.join(", ")).unwrap();
    }
    out
}

pub fn csv(records: &[DistinguishabilityRecord], precision: usize) -> String {
    let mut out = String::with_capacity(64 * (records.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in records {
        let d = &r.params;
        let fields = [
            d.p(),
            d.a(),
            d.g(),
            d.omega(),
            d.t(),
            r.q_minus,
            r.q_zero,
            r.r_numeric,
            r.r_paper_formula,
            r.discrepancy(),
        ];
        let row: Vec<String> = fields.iter().map(|&x| real(x, precision)).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn real_formatting() {
        assert_eq!(real(0.25, 6), "2.50000e-1");
        assert_eq!(real(-0.0, 6), "0.00000e0");
        assert_eq!(real(1.0, 15), "1.00000000000000e0");
    }

    #[test]
    fn round_trip_at_precision() {
        for x in [std::f64::consts::PI, 1e-17, -3.3e5, 0.1] {
            for prec in [6, 15, 17] {
                let s = real(x, prec);
                let back: f64 = s.parse().unwrap();
                assert_eq!(real(back, prec), s);
            }
            assert_eq!(real(x, 17).parse::<f64>().unwrap(), x);
        }
    }
}
