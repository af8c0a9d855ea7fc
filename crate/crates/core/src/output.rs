//! CSV rendering for sweep and DMT tables.
//!
//! Lines starting with `#` carry run metadata. Floats use Rust's shortest
//! round-trip formatting, so identical rows always render to identical bytes.

use std::io::{self, Write};

use crate::dmt::DmtScheme;
use crate::montecarlo::SweepRow;

pub const SWEEP_HEADER: &str = "sir_db,rate,scheme,p_analytic,p_mc,mc_trials,ci_low,ci_high";
pub const DMT_HEADER: &str = "scheme,r,d_closed_form,d_estimated";

/// Metadata written as `# key=value` lines ahead of the header.
pub type Meta<'a> = &'a [(&'a str, String)];

fn write_meta<W: Write + ?Sized>(w: &mut W, meta: Meta<'_>) -> io::Result<()> {
    for (k, v) in meta {
        writeln!(w, "# {k}={v}")?;
    }
    Ok(())
}

pub fn write_sweep<W: Write + ?Sized>(
    w: &mut W,
    meta: Meta<'_>,
    rows: &[SweepRow],
) -> io::Result<()> {
    write_meta(w, meta)?;
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.sir_db, r.rate, r.scheme, r.p_analytic, r.p_mc, r.mc_trials, r.ci_low, r.ci_high
        )?;
    }
    Ok(())
}

pub fn sweep_to_string(meta: Meta<'_>, rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_sweep(&mut buf, meta, rows).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("sweep CSV is ASCII")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DmtRow {
    pub scheme: DmtScheme,
    pub r: f64,
    pub d_closed_form: f64,
    pub d_estimated: Option<f64>,
}

pub fn write_dmt<W: Write + ?Sized>(w: &mut W, meta: Meta<'_>, rows: &[DmtRow]) -> io::Result<()> {
    write_meta(w, meta)?;
    writeln!(w, "{DMT_HEADER}")?;
    for r in rows {
        let est = r.d_estimated.map(|d| d.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{}", r.scheme, r.r, r.d_closed_form, est)?;
    }
    Ok(())
}
