use super::{fmt_float, HarnessError, MatchReport, ResonanceRow};
use std::io::Write;
use std::path::Path;

pub const CSV_HEADER: [&str; 7] = ["method", "h", "n", "re_E", "im_E", "residual", "stability"];

fn csv_error(e: csv::Error) -> HarnessError {
    HarnessError::Io(std::io::Error::other(e))
}

pub fn write_csv<W: Write>(rows: &[ResonanceRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for row in rows {
        w.write_record(row.fields()).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_error)?;
    w.write_record(header).map_err(csv_error)?;
    for row in rows {
        w.write_record(&row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// Scatter data per `h`, the distance trend and the width ratios.
pub fn write_plot_data(report: &MatchReport, dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir)?;
    for hr in &report.per_h {
        let points = report
            .rows()
            .into_iter()
            .filter(|r| r.h == hr.h)
            .map(|r| vec![r.method.as_str().to_string(), fmt_float(r.e.re), fmt_float(r.e.im)]);
        write_table(&dir.join(format!("scatter_h{}.csv", hr.h)), &["method", "re_E", "im_E"], points)?;
    }
    let mut trend_rows = Vec::new();
    for (name, trend) in [("spectral", &report.spectral_trend), ("shooting", &report.shooting_trend)] {
        if let Some(t) = trend {
            for (h, d) in t.h.iter().zip(&t.max_distance_over_h) {
                trend_rows.push(vec![name.to_string(), fmt_float(*h), fmt_float(*d)]);
            }
        }
    }
    write_table(&dir.join("distance_vs_h.csv"), &["method", "h", "max_distance_over_h"], trend_rows)?;
    let widths = report.per_h.iter().flat_map(|hr| {
        let ns = hr.pseudo.iter().flatten().map(|p| p.n);
        ns.zip(&hr.width_ratios).map(move |(n, w)| vec![fmt_float(hr.h), n.to_string(), fmt_float(*w)])
    });
    write_table(&dir.join("width_ratio_vs_h.csv"), &["h", "n", "width_ratio"], widths)?;
    Ok(())
}

/// `resonances.csv`, `report.json` and the plot data under `dir`.
pub fn write_outputs(report: &MatchReport, dir: &Path) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir)?;
    write_csv(&report.rows(), std::fs::File::create(dir.join("resonances.csv"))?)?;
    let json = serde_json::to_string_pretty(report).map_err(|e| HarnessError::Io(std::io::Error::other(e)))?;
    std::fs::write(dir.join("report.json"), json)?;
    write_plot_data(report, dir)
}
