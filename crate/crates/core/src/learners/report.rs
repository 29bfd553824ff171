use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::eval::ConfusionMatrix;
use super::table4::EvalReport;
use crate::error::{Error, Result};
use crate::io::write_json;

fn csv_writer(path: &Path) -> Result<csv::Writer<fs::File>> {
    csv::Writer::from_path(path).map_err(|e| Error::io(path, std::io::Error::other(e)))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::io(path, std::io::Error::other(e))
}

/// Accuracy and prediction time for both feature sets, one row per classifier.
pub fn write_table4_csv(report: &EvalReport, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(["classifier", "accuracy_all", "predict_seconds_all", "accuracy_selected", "predict_seconds_selected"])
        .map_err(&err)?;
    for r in &report.rows {
        w.write_record([
            r.family.clone(),
            format!("{:.6}", r.all.accuracy),
            format!("{:.6e}", r.all.predict_seconds),
            format!("{:.6}", r.selected.accuracy),
            format!("{:.6e}", r.selected.predict_seconds),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Accuracy-only table; contains no wall-times so reruns are byte-identical.
pub fn write_accuracy_csv(report: &EvalReport, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    w.write_record(["classifier", "n_features_all", "accuracy_all", "n_features_selected", "accuracy_selected"])
        .map_err(&err)?;
    for r in &report.rows {
        w.write_record([
            r.family.clone(),
            r.all.n_features.to_string(),
            r.all.accuracy.to_string(),
            r.selected.n_features.to_string(),
            r.selected.accuracy.to_string(),
        ])
        .map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Raw counts then normalized values; first column is the predicted class.
pub fn write_confusion_csv(c: &ConfusionMatrix, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let err = csv_err(path);
    let mut header = vec!["predicted\\actual".to_string()];
    header.extend(c.classes.iter().map(|l| l.to_string()));
    header.push("kind".into());
    w.write_record(&header).map_err(&err)?;
    for (i, l) in c.classes.iter().enumerate() {
        let mut rec = vec![l.to_string()];
        rec.extend(c.counts[i].iter().map(|v| v.to_string()));
        rec.push("count".into());
        w.write_record(&rec).map_err(&err)?;
    }
    for (i, l) in c.classes.iter().enumerate() {
        let mut rec = vec![l.to_string()];
        rec.extend(c.normalized[i].iter().map(|v| format!("{v:.6}")));
        rec.push("normalized".into());
        w.write_record(&rec).map_err(&err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Heatmap of the normalized matrix as a standalone SVG document.
pub fn confusion_svg(c: &ConfusionMatrix, title: &str) -> String {
    let cell = 80;
    let (left, top) = (90, 70);
    let k = c.classes.len();
    let width = left + cell * k + 30;
    let height = top + cell * k + 60;
    let peak = c.normalized.iter().flatten().copied().fold(0.0f64, f64::max).max(1e-12);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" font-family="sans-serif" font-size="13">"#
    );
    let _ = writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-size="15">{}</text>"#, width / 2, escape(title));
    let _ = writeln!(s, r#"<text x="{}" y="50" text-anchor="middle">actual</text>"#, left + cell * k / 2);
    let _ = writeln!(
        s,
        r#"<text x="20" y="{y}" text-anchor="middle" transform="rotate(-90 20 {y})">predicted</text>"#,
        y = top + cell * k / 2
    );
    for (i, row) in c.normalized.iter().enumerate() {
        let y = top + i * cell;
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#, left - 8, y + cell / 2 + 5, c.classes[i]);
        for (j, &v) in row.iter().enumerate() {
            let x = left + j * cell;
            let shade = (255.0 * (1.0 - v / peak)).round() as u8;
            let ink = if v / peak > 0.5 { "#ffffff" } else { "#000000" };
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{y}" width="{cell}" height="{cell}" fill="rgb({shade},{shade},255)" stroke="dimgray"/>"#
            );
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" text-anchor="middle" fill="{ink}">{v:.3}</text>"#,
                x + cell / 2,
                y + cell / 2 + 5
            );
        }
    }
    for (j, l) in c.classes.iter().enumerate() {
        let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle">{l}</text>"#, left + j * cell + cell / 2, top - 6);
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes the JSON report, both CSV tables and per-model confusion CSV/SVG files.
/// Returns the paths written.
pub fn write_eval_report(report: &EvalReport, dir: &Path) -> Result<Vec<PathBuf>> {
    let conf_dir = dir.join("confusion");
    fs::create_dir_all(&conf_dir).map_err(|e| Error::io(&conf_dir, e))?;
    let mut written = Vec::new();
    let json = dir.join("eval_report.json");
    write_json(&json, report)?;
    written.push(json);
    let t4 = dir.join("table4.csv");
    write_table4_csv(report, &t4)?;
    written.push(t4);
    let acc = dir.join("accuracy.csv");
    write_accuracy_csv(report, &acc)?;
    written.push(acc);
    for r in &report.rows {
        for e in [&r.all, &r.selected] {
            let stem = format!("{}_{}", e.family, e.feature_set);
            let csv_path = conf_dir.join(format!("{stem}.csv"));
            write_confusion_csv(&e.confusion, &csv_path)?;
            let svg_path = conf_dir.join(format!("{stem}.svg"));
            let title = format!("{} ({} features, accuracy {:.3})", e.family, e.feature_set, e.accuracy);
            fs::write(&svg_path, confusion_svg(&e.confusion, &title)).map_err(|e| Error::io(&svg_path, e))?;
            written.push(csv_path);
            written.push(svg_path);
        }
    }
    Ok(written)
}
