use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use rigidity_core::json17;

use crate::report::{Report, Series};
use crate::svg;

fn write_csv(path: &Path, series: &Series) -> Result<()> {
    let mut w = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    let mut header = vec![series.x_label.clone()];
    header.extend(series.columns.iter().map(|(label, _)| label.clone()));
    w.write_record(&header)?;
    for (row, x) in series.x.iter().enumerate() {
        let mut record = vec![json17::format(*x)];
        record.extend(
            series
                .columns
                .iter()
                .map(|(_, ys)| ys.get(row).map_or(String::new(), |y| json17::format(*y))),
        );
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `report.json`, `checks/<check>.csv` and `plots/<check>.svg` under `out`.
pub fn write_all(out: &Path, report: &Report) -> Result<()> {
    let checks_dir = out.join("checks");
    let plots_dir = out.join("plots");
    for dir in [out, &checks_dir, &plots_dir] {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    }
    for check in &report.checks {
        if let Some(series) = &check.series {
            let slug = check.slug();
            write_csv(&checks_dir.join(format!("{slug}.csv")), series)?;
            let plot = plots_dir.join(format!("{slug}.svg"));
            fs::write(&plot, svg::render(&check.name, series))
                .with_context(|| format!("cannot write {}", plot.display()))?;
        }
    }
    let mut json = serde_json::to_string_pretty(report)?;
    json.push('\n');
    let path = out.join("report.json");
    fs::write(&path, json).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}
