use onc_core::dmt::{dmt_curve, estimate_diversity, DmtScheme};
use onc_core::output::DmtRow;

use crate::error::CliError;

/// SIR grid for slope estimates.
pub const ESTIMATE_GRID: [f64; 3] = [1e8, 1e9, 1e10];

/// Closed-form curves for every scheme. Each requested estimate fills the
/// relay-scheme row at that `r`, adding the row when the curve sampling
/// misses it.
pub fn dmt_table(n_points: usize, estimate_at: &[f64], k: usize) -> Result<Vec<DmtRow>, CliError> {
    let mut rows = Vec::new();
    for scheme in DmtScheme::ALL {
        let mut scheme_rows: Vec<DmtRow> = dmt_curve(scheme, n_points)?
            .into_iter()
            .map(|p| DmtRow {
                scheme,
                r: p.r,
                d_closed_form: p.d,
                d_estimated: None,
            })
            .collect();
        if scheme == DmtScheme::Onc {
            for &r in estimate_at {
                let d = estimate_diversity(r, &ESTIMATE_GRID, k)?;
                match scheme_rows.iter_mut().find(|row| row.r == r) {
                    Some(row) => row.d_estimated = Some(d),
                    None => scheme_rows.push(DmtRow {
                        scheme,
                        r,
                        d_closed_form: scheme.diversity(r)?,
                        d_estimated: Some(d),
                    }),
                }
            }
            scheme_rows.sort_by(|a, b| a.r.total_cmp(&b.r));
        }
        rows.extend(scheme_rows);
    }
    Ok(rows)
}
