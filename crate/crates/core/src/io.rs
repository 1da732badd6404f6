//! JSON file formats for datasets, models, reports and benchmark summaries.
//!
//! Every real number is written with 17 significant digits so files
//! round-trip `f64` values exactly.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::dataset::{LabeledDataset, PointModel};
use crate::error::{Error, Result};
use crate::eval::EvalReport;
use crate::multiclass::OvaModel;

pub const DATASET_FORMAT: &str = "hsvm-dataset/1";
pub const MODEL_FORMAT: &str = "hsvm-model/1";
pub const REPORT_FORMAT: &str = "hsvm-report/1";
pub const PREDICTIONS_FORMAT: &str = "hsvm-predictions/1";

/// Pretty JSON with `{:.16e}` floats.
struct ExactFloats<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes `value` in the on-disk style, with a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|source| Error::Format {
        path: "<memory>".into(),
        source,
    })?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let text = to_json_string(value)?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Format {
        path: path.display().to_string(),
        source,
    })
}

fn check_format(path: &Path, found: &str, want: &str) -> Result<()> {
    if found == want {
        Ok(())
    } else {
        Err(Error::Invalid(format!(
            "{}: expected format {want:?}, found {found:?}",
            path.display()
        )))
    }
}

/// Self-describing dataset. Labels are lists of class ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetFile {
    pub format: String,
    pub model_tag: PointModel,
    pub dim: usize,
    pub class_ids: Vec<String>,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<Vec<String>>,
    #[serde(default)]
    pub metadata: Value,
}

impl DatasetFile {
    pub fn from_dataset(data: &LabeledDataset, metadata: Value) -> Self {
        let classes = data.classes();
        Self {
            format: DATASET_FORMAT.into(),
            model_tag: data.model(),
            dim: data.dim(),
            class_ids: classes.to_vec(),
            points: data.rows().to_vec(),
            labels: data
                .labels()
                .iter()
                .map(|l| l.iter().map(|&k| classes[k].clone()).collect())
                .collect(),
            metadata,
        }
    }

    pub fn to_dataset(&self) -> Result<LabeledDataset> {
        let labels = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, ids)| {
                ids.iter()
                    .map(|id| {
                        self.class_ids.iter().position(|c| c == id).ok_or_else(|| {
                            Error::Invalid(format!("point {i} has undeclared label {id:?}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        LabeledDataset::new(
            self.model_tag,
            self.dim,
            self.points.clone(),
            self.class_ids.clone(),
            labels,
        )
    }
}

pub fn write_dataset(path: &Path, data: &LabeledDataset, metadata: Value) -> Result<()> {
    write_json(path, &DatasetFile::from_dataset(data, metadata))
}

/// Reads and validates a dataset file, returning it with its metadata.
pub fn read_dataset(path: &Path) -> Result<(LabeledDataset, Value)> {
    let file: DatasetFile = read_json(path)?;
    check_format(path, &file.format, DATASET_FORMAT)?;
    let data = file.to_dataset().map_err(|e| match e {
        Error::Invalid(msg) => Error::Invalid(format!("{}: {msg}", path.display())),
        other => other,
    })?;
    Ok((data, file.metadata))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelFile {
    pub format: String,
    /// Point model of the training data; inputs must match its dimension.
    pub input_model: PointModel,
    pub dim: usize,
    #[serde(flatten)]
    pub model: OvaModel,
    pub warnings: Vec<String>,
    #[serde(default)]
    pub metadata: Value,
}

impl ModelFile {
    pub fn new(model: OvaModel, input_model: PointModel, dim: usize, metadata: Value) -> Self {
        Self {
            format: MODEL_FORMAT.into(),
            input_model,
            dim,
            warnings: model.warnings(),
            model,
            metadata,
        }
    }
}

pub fn read_model(path: &Path) -> Result<ModelFile> {
    let file: ModelFile = read_json(path)?;
    check_format(path, &file.format, MODEL_FORMAT)?;
    Ok(file)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub format: String,
    #[serde(flatten)]
    pub report: EvalReport,
    #[serde(default)]
    pub metadata: Value,
}

impl ReportFile {
    pub fn new(report: EvalReport, metadata: Value) -> Self {
        Self {
            format: REPORT_FORMAT.into(),
            report,
            metadata,
        }
    }
}

/// Per-point class probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionsFile {
    pub format: String,
    pub class_ids: Vec<String>,
    pub probabilities: Vec<Vec<f64>>,
    #[serde(default)]
    pub metadata: Value,
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_round_trip_exactly() {
        let values = vec![
            0.1,
            1.0 / 3.0,
            -2.5e-300,
            1.7976931348623157e308,
            0.0,
            5e-324,
        ];
        let text = to_json_string(&values).unwrap();
        let back: Vec<f64> = serde_json::from_str(&text).unwrap();
        assert_eq!(values, back);
        assert!(text.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn dataset_round_trip_and_validation() {
        let dir = tempdir();
        let path = dir.join("d.json");
        let data = LabeledDataset::new(
            PointModel::Ball,
            2,
            vec![vec![0.1, 0.2], vec![-0.3, 0.4]],
            vec!["a".into(), "b".into()],
            vec![vec![0, 1], vec![]],
        )
        .unwrap();
        write_dataset(&path, &data, json!({"seed": 3})).unwrap();
        let (back, meta) = read_dataset(&path).unwrap();
        assert_eq!(back, data);
        assert_eq!(meta["seed"], 3);

        let mut file: DatasetFile = read_json(&path).unwrap();
        file.labels[1] = vec!["zzz".into()];
        write_json(&path, &file).unwrap();
        assert!(matches!(read_dataset(&path), Err(Error::Invalid(_))));

        file.labels[1].clear();
        file.points[0] = vec![0.9, 0.9];
        write_json(&path, &file).unwrap();
        assert!(read_dataset(&path).is_err());
        fs::remove_dir_all(dir).ok();
    }

    #[test]
    fn missing_and_malformed_files() {
        let dir = tempdir();
        assert!(matches!(
            read_dataset(&dir.join("none.json")),
            Err(Error::Io { .. })
        ));
        let p = dir.join("bad.json");
        fs::write(&p, "{ not json").unwrap();
        assert!(matches!(read_dataset(&p), Err(Error::Format { .. })));
        fs::remove_dir_all(dir).ok();
    }

    fn tempdir() -> std::path::PathBuf {
        use std::sync::atomic::{AtomicUsize, Ordering};
        static N: AtomicUsize = AtomicUsize::new(0);
        let d = std::env::temp_dir().join(format!(
            "hsvm-io-{}-{}",
            std::process::id(),
            N.fetch_add(1, Ordering::Relaxed)
        ));
        fs::create_dir_all(&d).unwrap();
        d
    }
}
