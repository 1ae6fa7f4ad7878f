//! CSV datasets, ball sets and accuracy tables, and JSON model files.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use gbtwin_core::{AccuracyTable, BallSet, Dataset, Label, Matrix, NormParams, TrainedModel};
use serde::{Deserialize, Serialize};

/// How raw label values map to ±1.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum LabelMap {
    /// `{−1, 1}` as is, `{0, 1}` and `{1, 2}` with the smaller value as −1.
    #[default]
    Auto,
    /// The given raw value is +1, every other value −1.
    Positive(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    /// Column holding the label; `None` means the last column.
    pub label_column: Option<usize>,
    pub label_map: LabelMap,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            label_column: None,
            label_map: LabelMap::Auto,
        }
    }
}

/// Raw numeric table plus the header, if the first row was not numeric.
struct RawTable {
    header: Option<Vec<String>>,
    rows: Vec<Vec<String>>,
}

fn read_table(path: &Path) -> Result<RawTable> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec.with_context(|| format!("reading {}", path.display()))?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        rows.push(rec.iter().map(str::to_owned).collect::<Vec<_>>());
    }
    if rows.is_empty() {
        bail!("{} holds no rows", path.display());
    }
    let width = rows[0].len();
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != width) {
        bail!(
            "{}: row {} has {} columns, expected {width}",
            path.display(),
            i + 1,
            r.len()
        );
    }
    let header = if rows[0].iter().any(|f| f.parse::<f64>().is_err()) {
        Some(rows.remove(0))
    } else {
        None
    };
    if rows.is_empty() {
        bail!("{} holds a header but no data rows", path.display());
    }
    Ok(RawTable { header, rows })
}

fn map_labels(raw: &[f64], map: &LabelMap) -> Result<Vec<Label>> {
    match map {
        LabelMap::Positive(p) => Ok(raw
            .iter()
            .map(|v| if v == p { Label::Pos } else { Label::Neg })
            .collect()),
        LabelMap::Auto => {
            // first encoding that covers every value wins; its first entry is −1
            const ENCODINGS: [[f64; 2]; 3] = [[-1.0, 1.0], [0.0, 1.0], [1.0, 2.0]];
            let Some([neg, _]) = ENCODINGS.into_iter().find(|enc| raw.iter().all(|v| enc.contains(v))) else {
                let mut distinct = raw.to_vec();
                distinct.sort_by(f64::total_cmp);
                distinct.dedup();
                bail!("cannot map label values {distinct:?} to -1/+1; pass an explicit positive label");
            };
            Ok(raw
                .iter()
                .map(|v| if *v == neg { Label::Neg } else { Label::Pos })
                .collect())
        }
    }
}

/// Loads a labelled dataset. Row order is preserved.
pub fn load_csv(path: &Path, opts: &CsvOptions) -> Result<Dataset> {
    let table = read_table(path)?;
    let width = table.rows[0].len();
    if width < 2 {
        bail!("{}: need at least one feature and a label column", path.display());
    }
    let label_col = opts.label_column.unwrap_or(width - 1);
    if label_col >= width {
        bail!(
            "{}: label column {label_col} out of range (width {width})",
            path.display()
        );
    }
    let mut features = Vec::with_capacity(table.rows.len() * (width - 1));
    let mut raw_labels = Vec::with_capacity(table.rows.len());
    let line_offset = 1 + usize::from(table.header.is_some());
    for (i, row) in table.rows.iter().enumerate() {
        for (j, field) in row.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                anyhow!(
                    "{}: line {}, column {}: non-numeric value {field:?}",
                    path.display(),
                    i + line_offset,
                    j + 1
                )
            })?;
            if j == label_col {
                raw_labels.push(v);
            } else {
                features.push(v);
            }
        }
    }
    let labels = map_labels(&raw_labels, &opts.label_map).with_context(|| path.display().to_string())?;
    let x = Matrix::from_vec(table.rows.len(), width - 1, features)?;
    let mut d = Dataset::new(x, labels).with_context(|| path.display().to_string())?;
    if let Some(mut h) = table.header {
        h.remove(label_col);
        d = d.with_names(h)?;
    }
    Ok(d)
}

/// Reads a feature-only matrix (no label column).
pub fn load_features(path: &Path) -> Result<Matrix> {
    let table = read_table(path)?;
    let width = table.rows[0].len();
    let mut data = Vec::with_capacity(table.rows.len() * width);
    for (i, row) in table.rows.iter().enumerate() {
        for field in row {
            data.push(
                field
                    .parse()
                    .map_err(|_| anyhow!("{}: row {}: non-numeric value {field:?}", path.display(), i + 1))?,
            );
        }
    }
    Ok(Matrix::from_vec(table.rows.len(), width, data)?)
}

/// Writes features then the ±1 label, with a header row.
pub fn write_csv(d: &Dataset, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header: Vec<String> = match d.names() {
        Some(n) => n.to_vec(),
        None => (1..=d.n_features()).map(|j| format!("x{j}")).collect(),
    };
    header.push("label".into());
    w.write_record(&header)?;
    for (row, label) in d.features().rows().zip(d.labels()) {
        let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        rec.push(label.as_i8().to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per ball: centre coordinates, radius, label, size.
pub fn write_ballset(bs: &BallSet, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header: Vec<String> = (1..=bs.n_features()).map(|j| format!("c{j}")).collect();
    header.extend(["radius", "label", "size"].map(String::from));
    w.write_record(&header)?;
    for b in bs.balls() {
        let mut rec: Vec<String> = b.center.iter().map(|v| v.to_string()).collect();
        rec.push(b.radius.to_string());
        rec.push(b.label.as_i8().to_string());
        rec.push(b.size.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Writes a table as `dataset,<model>,…` with accuracies in `[0, 1]`.
pub fn write_accuracy_table(t: &AccuracyTable, path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = vec!["dataset".to_string()];
    header.extend(t.models().iter().cloned());
    w.write_record(&header)?;
    for (name, row) in t.datasets().iter().zip(t.acc().rows()) {
        let mut rec = vec![name.clone()];
        rec.extend(row.iter().map(|v| format!("{v:.6}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `dataset,<model>,…`. Tables whose entries exceed 1 are taken as
/// percentages and divided by 100.
pub fn read_accuracy_table(path: &Path) -> Result<AccuracyTable> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(BufReader::new(file));
    let header = reader.headers()?.clone();
    if header.len() < 2 {
        bail!(
            "{}: need a dataset column and at least one model column",
            path.display()
        );
    }
    let models: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let mut datasets = Vec::new();
    let mut values = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: row {}", path.display(), i + 2))?;
        if rec.len() != header.len() {
            bail!(
                "{}: row {} has {} fields, expected {}",
                path.display(),
                i + 2,
                rec.len(),
                header.len()
            );
        }
        datasets.push(rec[0].to_owned());
        for field in rec.iter().skip(1) {
            let v: f64 = field.parse().map_err(|_| {
                anyhow!(
                    "{}: row {}: missing or non-numeric accuracy {field:?}",
                    path.display(),
                    i + 2
                )
            })?;
            values.push(v);
        }
    }
    if values.iter().any(|v| *v > 1.0) {
        values.iter_mut().for_each(|v| *v /= 100.0);
    }
    let acc = Matrix::from_vec(datasets.len(), models.len(), values)?;
    AccuracyTable::new(models, datasets, acc).with_context(|| path.display().to_string())
}

pub const MODEL_FORMAT: &str = "gbtwin-model";
pub const MODEL_VERSION: u32 = 1;

/// A trained model with the scaling its inputs need.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    pub version: u32,
    /// Applied to raw features before prediction; absent when training skipped scaling.
    pub normalization: Option<NormParams>,
    pub trained: TrainedModel,
}

impl ModelFile {
    pub fn new(trained: TrainedModel, normalization: Option<NormParams>) -> Self {
        ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            normalization,
            trained,
        }
    }

    /// Scales raw features as during training, then predicts.
    pub fn predict(&self, raw: &Matrix) -> Result<Vec<Label>> {
        let x = match &self.normalization {
            Some(p) => p.apply(raw)?,
            None => raw.clone(),
        };
        Ok(self.trained.predict(&x)?)
    }
}

pub fn save_model(m: &ModelFile, path: &Path) -> Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, m)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let m: ModelFile =
        serde_json::from_reader(BufReader::new(file)).with_context(|| format!("parsing {}", path.display()))?;
    if m.format != MODEL_FORMAT {
        bail!("{}: not a model file (format {:?})", path.display(), m.format);
    }
    if m.version != MODEL_VERSION {
        bail!("{}: unsupported model version {}", path.display(), m.version);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn write(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn parses_plain_rows() {
        let dir = tempfile::tempdir().unwrap();
        let d = load_csv(&write(&dir, "a.csv", "1.0,2.0,1\n3.0,4.0,-1\n"), &CsvOptions::default()).unwrap();
        assert_eq!((d.len(), d.n_features()), (2, 2));
        assert_eq!(d.labels(), &[Label::Pos, Label::Neg]);
        assert_eq!(d.features().row(1), &[3.0, 4.0]);
    }

    #[test]
    fn remaps_zero_one_and_one_two() {
        let dir = tempfile::tempdir().unwrap();
        let d = load_csv(&write(&dir, "a.csv", "1,0\n2,1\n3,0\n"), &CsvOptions::default()).unwrap();
        assert_eq!(d.labels(), &[Label::Neg, Label::Pos, Label::Neg]);
        let d = load_csv(&write(&dir, "b.csv", "1,2\n2,1\n"), &CsvOptions::default()).unwrap();
        assert_eq!(d.labels(), &[Label::Pos, Label::Neg]);
        let opts = CsvOptions {
            label_column: None,
            label_map: LabelMap::Positive(7.0),
        };
        let d = load_csv(&write(&dir, "c.csv", "1,7\n2,3\n"), &opts).unwrap();
        assert_eq!(d.labels(), &[Label::Pos, Label::Neg]);
        assert!(load_csv(&write(&dir, "d.csv", "1,3\n2,5\n"), &CsvOptions::default()).is_err());
    }

    #[test]
    fn rejects_malformed_input() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_csv(&write(&dir, "a.csv", "1,2,1\n1.0,a,1\n"), &CsvOptions::default()).unwrap_err();
        assert!(format!("{err:#}").contains("non-numeric"));
        assert!(load_csv(&write(&dir, "b.csv", "1,2,1\n1,1\n"), &CsvOptions::default()).is_err());
        assert!(load_csv(&write(&dir, "c.csv", "x,y,label\n"), &CsvOptions::default()).is_err());
        assert!(load_csv(&dir.path().join("missing.csv"), &CsvOptions::default()).is_err());
    }

    #[test]
    fn header_and_label_column() {
        let dir = tempfile::tempdir().unwrap();
        let opts = CsvOptions {
            label_column: Some(0),
            label_map: LabelMap::Auto,
        };
        let d = load_csv(&write(&dir, "a.csv", "y,f1,f2\n1,0.5,0.25\n-1,1,2\n"), &opts).unwrap();
        assert_eq!(d.names().unwrap(), &["f1".to_string(), "f2".to_string()]);
        assert_eq!(d.features().row(0), &[0.5, 0.25]);
        assert_eq!(d.labels(), &[Label::Pos, Label::Neg]);
    }

    #[test]
    fn dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let d = gbtwin_core::dataset::gen_crossplane(20, 0.1, 3).unwrap();
        let p = dir.path().join("cp.csv");
        write_csv(&d, &p).unwrap();
        let back = load_csv(&p, &CsvOptions::default()).unwrap();
        assert_eq!(back.features(), d.features());
        assert_eq!(back.labels(), d.labels());
    }

    #[test]
    fn accuracy_table_percentages_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = read_accuracy_table(&write(&dir, "t.csv", "dataset,A,B\nd1,90,80.5\nd2,100,70\n")).unwrap();
        assert_eq!(t.models(), &["A".to_string(), "B".to_string()]);
        assert!((t.acc()[(0, 1)] - 0.805).abs() < 1e-12);
        let p = dir.path().join("out.csv");
        write_accuracy_table(&t, &p).unwrap();
        assert_eq!(read_accuracy_table(&p).unwrap(), t);
        assert!(read_accuracy_table(&write(&dir, "bad.csv", "dataset,A,B\nd1,0.5,\n")).is_err());
    }
}
