//! Writing reports: pretty JSON, CSV and a small SVG bar chart.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

pub struct OutDir {
    root: PathBuf,
    pub written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<OutDir, CliError> {
        fs::create_dir_all(root)?;
        Ok(OutDir { root: root.to_path_buf(), written: Vec::new() })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let p = self.root.join(name);
        self.written.push(p.clone());
        p
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.path(name), text)?;
        Ok(())
    }

    pub fn csv<R: Serialize>(&mut self, name: &str, rows: impl IntoIterator<Item = R>) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(self.path(name))?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// CSV with an explicit header, for tables whose width is data-dependent.
    pub fn csv_records(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<(), CliError> {
        let mut w = csv::Writer::from_path(self.path(name))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: &str) -> Result<(), CliError> {
        fs::write(self.path(name), body)?;
        Ok(())
    }
}

/// Bar chart of witness word lengths.
pub fn histogram_svg(hist: &BTreeMap<usize, usize>, title: &str) -> String {
    let (w, h, pad) = (480.0, 240.0, 30.0);
    let max_len = hist.keys().copied().max().unwrap_or(0);
    let max_count = hist.values().copied().max().unwrap_or(1).max(1) as f64;
    let bars = max_len + 1;
    let bw = (w - 2.0 * pad) / bars as f64;
    let mut s = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" font-family=\"monospace\" font-size=\"10\">\n\
         <text x=\"{pad}\" y=\"14\">{title}</text>\n"
    );
    for k in 0..bars {
        let c = hist.get(&k).copied().unwrap_or(0);
        let bh = (h - 3.0 * pad) * c as f64 / max_count;
        let x = pad + k as f64 * bw;
        let y = h - pad - bh;
        s.push_str(&format!(
            "<rect x=\"{x:.1}\" y=\"{y:.1}\" width=\"{:.1}\" height=\"{bh:.1}\" fill=\"#4a7ab0\"/>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{k}</text>\n\
             <text x=\"{:.1}\" y=\"{:.1}\" text-anchor=\"middle\">{c}</text>\n",
            bw * 0.8,
            x + bw * 0.4,
            h - pad + 12.0,
            x + bw * 0.4,
            y - 2.0
        ));
    }
    s.push_str("</svg>\n");
    s
}
