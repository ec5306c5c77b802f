use std::io::{self, Write};

use crate::observables::PhaseTimeSeries;

pub const HEADER: &str =
    "tau,x,y,phi_pancharatnam,phi_dynamical,phi_geometric,phi_eq5,rho11,rho22,rho33,norm_error";
pub const UNWRAPPED_COLUMN: &str = "phi_pancharatnam_unwrapped";
pub const DEVIATION_HEADER: &str = "tau,dx,dy,abs_dev";

/// 17 significant digits; `-0` prints as `0`.
pub fn format_float(v: f64) -> String {
    format!("{:.16e}", v + 0.0)
}

fn field(v: Option<f64>) -> String {
    v.map(format_float).unwrap_or_default()
}

pub fn write_series<W: Write>(out: &mut W, series: &PhaseTimeSeries, emit_unwrapped: bool) -> io::Result<()> {
    out.write_all(HEADER.as_bytes())?;
    if emit_unwrapped {
        write!(out, ",{UNWRAPPED_COLUMN}")?;
    }
    out.write_all(b"\n")?;
    let unwrapped = emit_unwrapped.then(|| series.unwrapped_pancharatnam());
    for (k, r) in series.records.iter().enumerate() {
        let pops = r.populations;
        let row = [
            Some(r.tau),
            Some(r.x),
            Some(r.y),
            r.phi_pancharatnam,
            r.phi_dynamical,
            r.phi_geometric,
            r.phi_eq5,
            pops.map(|p| p[0]),
            pops.map(|p| p[1]),
            pops.map(|p| p[2]),
            r.norm_error,
        ];
        let mut line = row.iter().map(|v| field(*v)).collect::<Vec<_>>().join(",");
        if let Some(u) = &unwrapped {
            line.push(',');
            line.push_str(&field(u[k]));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn write_deviation<W: Write>(out: &mut W, a: &PhaseTimeSeries, b: &PhaseTimeSeries) -> io::Result<()> {
    writeln!(out, "{DEVIATION_HEADER}")?;
    for (p, q) in a.records.iter().zip(&b.records) {
        let (dx, dy) = (q.x - p.x, q.y - p.y);
        writeln!(
            out,
            "{},{},{},{}",
            format_float(p.tau),
            format_float(dx),
            format_float(dy),
            format_float(dx.hypot(dy))
        )?;
    }
    Ok(())
}
