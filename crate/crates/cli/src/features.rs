//! Feature tables on disk: `index,label,split,<coefficient columns...>`.

use std::path::Path;

use anyhow::{bail, Context};
use qupid_core::Layout;
use serde::{Deserialize, Serialize};

pub const TRAIN: &str = "train";
pub const TEST: &str = "test";

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureFile {
    pub columns: Vec<String>,
    pub index: Vec<usize>,
    pub labels: Vec<usize>,
    pub splits: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl FeatureFile {
    pub fn write(&self, path: &Path) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
        let mut header = vec!["index".to_string(), "label".into(), "split".into()];
        header.extend(self.columns.iter().cloned());
        w.write_record(&header)?;
        for (k, row) in self.rows.iter().enumerate() {
            let mut rec = vec![
                self.index[k].to_string(),
                self.labels[k].to_string(),
                self.splits[k].clone(),
            ];
            rec.extend(row.iter().map(|v| v.to_string()));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let mut r = csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        if header.len() < 3 || header[..3] != ["index", "label", "split"] {
            bail!("{}: expected header starting with index,label,split", path.display());
        }
        let mut out = Self {
            columns: header[3..].to_vec(),
            index: Vec::new(),
            labels: Vec::new(),
            splits: Vec::new(),
            rows: Vec::new(),
        };
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            let at = || format!("{}: row {}", path.display(), line + 2);
            out.index.push(rec[0].parse().with_context(at)?);
            out.labels.push(rec[1].parse().with_context(at)?);
            out.splits.push(rec[2].to_string());
            let row = rec
                .iter()
                .skip(3)
                .map(|v| v.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .with_context(at)?;
            out.rows.push(row);
        }
        if out.rows.is_empty() {
            bail!("{} has no rows", path.display());
        }
        Ok(out)
    }
}

/// Companion of a feature file describing its columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayoutFile {
    pub transform: String,
    pub channels: Vec<String>,
    pub layout: Layout,
}

impl LayoutFile {
    pub fn read(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("invalid layout file {}", path.display()))
    }
}

/// File-name friendly tag for a transform label (`coif2@log` becomes `coif2-log`).
pub fn file_tag(label: &str) -> String {
    label.replace('@', "-")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let tmp = tempfile::tempdir().unwrap();
        let f = FeatureFile {
            columns: vec!["h0_id_0_0".into(), "h0_id_0_1".into()],
            index: vec![0, 1],
            labels: vec![1, 0],
            splits: vec![TRAIN.into(), TEST.into()],
            rows: vec![vec![0.1, 2.0], vec![-3.5, 1e-17]],
        };
        let p = tmp.path().join("f.csv");
        f.write(&p).unwrap();
        assert_eq!(FeatureFile::read(&p).unwrap(), f);
    }

    #[test]
    fn rejects_bad_header() {
        let tmp = tempfile::tempdir().unwrap();
        let p = tmp.path().join("f.csv");
        std::fs::write(&p, "a,b\n1,2\n").unwrap();
        assert!(FeatureFile::read(&p).is_err());
    }
}
