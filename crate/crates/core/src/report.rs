//! CSV output.

use std::io::Write;

use crate::asymptotics::CountSeries;
use crate::census::{Cylinder, SaddleConnection};
use crate::error::Result;

fn csv_err(e: csv::Error) -> crate::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => crate::Error::Io(io),
        other => crate::Error::InvalidParameter(format!("csv: {other:?}")),
    }
}

pub fn write_saddles<W: Write>(w: W, scs: &[SaddleConnection]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["hol_x", "hol_y", "length", "start_cone", "end_cone"])
        .map_err(csv_err)?;
    for c in scs {
        out.write_record(&[
            c.holonomy.x.to_string(),
            c.holonomy.y.to_string(),
            c.length().to_string(),
            c.start_cone.to_string(),
            c.end_cone.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_cylinders<W: Write>(w: W, cyls: &[Cylinder]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["dir_x", "dir_y", "circumference", "width", "area"])
        .map_err(csv_err)?;
    for c in cyls {
        out.write_record(&[
            c.direction.x.to_string(),
            c.direction.y.to_string(),
            c.circumference.to_string(),
            c.width.to_string(),
            c.area.to_string(),
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Empty `predicted` and `ratio` cells when there is no prediction.
pub fn write_counts<W: Write>(w: W, series: &CountSeries) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["T", "count", "count_over_T2", "predicted", "ratio"])
        .map_err(csv_err)?;
    for r in &series.rows {
        let (p, q) = match series.predicted_constant {
            Some(c) => (c.to_string(), (r.count_over_t2 / c).to_string()),
            None => (String::new(), String::new()),
        };
        out.write_record(&[
            r.t.to_string(),
            r.count.to_string(),
            r.count_over_t2.to_string(),
            p,
            q,
        ])
        .map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}
