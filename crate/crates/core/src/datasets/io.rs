//! Dataset directories: `clouds/{label}/{index}.csv` (or `graphs/{label}/{index}.txt`) next to
//! a `manifest.json` describing how the data was produced.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::LabeledCloudSet;
use crate::error::{io_err, Error, Result};
use crate::homology::{PointCloud, WeightedGraph};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    /// Generator name (`orbit`, `patterns`, `graphs`) or `external`.
    pub kind: String,
    pub seed: Option<u64>,
    pub params: serde_json::Value,
    pub class_names: Vec<String>,
    pub counts: Vec<usize>,
}

/// One item of a dataset directory.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemRef {
    pub label: usize,
    pub index: usize,
    pub path: PathBuf,
}

pub fn read_manifest(dir: &Path) -> Result<Option<DatasetManifest>> {
    let path = dir.join(MANIFEST_FILE);
    if !path.exists() {
        return Ok(None);
    }
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    Ok(Some(serde_json::from_str(&text)?))
}

fn write_manifest(dir: &Path, manifest: &DatasetManifest) -> Result<()> {
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(manifest)? + "\n";
    fs::write(&path, text).map_err(io_err(&path))
}

fn numeric_entries(dir: &Path, ext: Option<&str>) -> Result<Vec<(usize, PathBuf)>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        let name = match ext {
            Some(ext) => path
                .file_name()
                .and_then(|n| n.to_str())
                .and_then(|n| n.strip_suffix(ext)),
            None => path.is_dir().then(|| path.file_name().and_then(|n| n.to_str())).flatten(),
        };
        if let Some(k) = name.and_then(|n| n.parse::<usize>().ok()) {
            out.push((k, path));
        }
    }
    out.sort();
    Ok(out)
}

/// Items under `dir/subdir/{label}/{index}{ext}`, sorted by (label, index).
pub fn list_items(dir: &Path, subdir: &str, ext: &str) -> Result<Vec<ItemRef>> {
    let root = dir.join(subdir);
    if !root.is_dir() {
        return Err(Error::InvalidInput(format!("{} is not a directory", root.display())));
    }
    let mut items = Vec::new();
    for (label, class_dir) in numeric_entries(&root, None)? {
        for (index, path) in numeric_entries(&class_dir, Some(ext))? {
            items.push(ItemRef { label, index, path });
        }
    }
    Ok(items)
}

fn prepare(dir: &Path, subdir: &str, n_classes: usize) -> Result<()> {
    for c in 0..n_classes {
        let d = dir.join(subdir).join(c.to_string());
        fs::create_dir_all(&d).map_err(io_err(&d))?;
    }
    Ok(())
}

fn counts(labels: &[usize], n_classes: usize) -> Vec<usize> {
    let mut counts = vec![0; n_classes];
    for &l in labels {
        counts[l] += 1;
    }
    counts
}

/// Writes clouds to `dir/clouds/{label}/{index}.csv`, indexing within each class, plus the manifest.
pub fn write_cloud_dataset(
    dir: &Path,
    set: &LabeledCloudSet,
    kind: &str,
    seed: Option<u64>,
    params: serde_json::Value,
) -> Result<DatasetManifest> {
    let n_classes = set.n_classes();
    prepare(dir, "clouds", n_classes)?;
    let mut next = vec![0usize; n_classes];
    for (cloud, &label) in set.clouds.iter().zip(&set.labels) {
        let path = dir
            .join("clouds")
            .join(label.to_string())
            .join(format!("{}.csv", next[label]));
        next[label] += 1;
        fs::write(&path, cloud.to_csv_string()).map_err(io_err(&path))?;
    }
    let manifest = DatasetManifest {
        kind: kind.to_string(),
        seed,
        params,
        class_names: set.class_names.clone(),
        counts: counts(&set.labels, n_classes),
    };
    write_manifest(dir, &manifest)?;
    Ok(manifest)
}

/// Reads a cloud dataset. Without a manifest, class names are the label directory names.
pub fn read_cloud_dataset(dir: &Path) -> Result<(LabeledCloudSet, Vec<ItemRef>)> {
    let items = list_items(dir, "clouds", ".csv")?;
    let clouds = items
        .iter()
        .map(|it| PointCloud::read_csv(&it.path))
        .collect::<Result<Vec<_>>>()?;
    let labels: Vec<usize> = items.iter().map(|it| it.label).collect();
    let class_names = match read_manifest(dir)? {
        Some(m) => m.class_names,
        None => {
            let n = labels.iter().max().map_or(0, |m| m + 1);
            (0..n).map(|c| c.to_string()).collect()
        }
    };
    Ok((
        LabeledCloudSet {
            clouds,
            labels,
            class_names,
        },
        items,
    ))
}

pub fn write_graph_dataset(
    dir: &Path,
    graphs: &[WeightedGraph],
    labels: &[usize],
    class_names: &[String],
    seed: Option<u64>,
    params: serde_json::Value,
) -> Result<DatasetManifest> {
    let n_classes = class_names.len();
    prepare(dir, "graphs", n_classes)?;
    let mut next = vec![0usize; n_classes];
    for (g, &label) in graphs.iter().zip(labels) {
        let path = dir
            .join("graphs")
            .join(label.to_string())
            .join(format!("{}.txt", next[label]));
        next[label] += 1;
        fs::write(&path, g.to_text()).map_err(io_err(&path))?;
    }
    let manifest = DatasetManifest {
        kind: "graphs".into(),
        seed,
        params,
        class_names: class_names.to_vec(),
        counts: counts(labels, n_classes),
    };
    write_manifest(dir, &manifest)?;
    Ok(manifest)
}

pub fn read_graph_dataset(dir: &Path) -> Result<(Vec<WeightedGraph>, Vec<ItemRef>)> {
    let items = list_items(dir, "graphs", ".txt")?;
    let graphs = items
        .iter()
        .map(|it| WeightedGraph::read(&it.path))
        .collect::<Result<Vec<_>>>()?;
    Ok((graphs, items))
}
