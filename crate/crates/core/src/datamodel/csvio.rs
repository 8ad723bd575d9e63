//! Dataset CSV format: header `task,class,f0,...,f{p-1}`, one sample per
//! row, 1-based task and class ids.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ndarray::{Array2, ShapeBuilder};

use super::{DataError, TaskDataset, TaskLayout};

/// Rows of a dataset file in file order, ids converted to zero-based.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSamples {
    pub tasks: Vec<usize>,
    pub classes: Vec<usize>,
    /// `p x N`, column `i` is row `i` of the file.
    pub features: Array2<f64>,
}

impl LabeledSamples {
    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.nrows()
    }

    /// Groups the rows into a class-contiguous dataset. Task and class counts
    /// are taken from the largest ids present; every (task, class) pair must
    /// have at least two samples.
    pub fn into_dataset(self) -> Result<TaskDataset, DataError> {
        let k = self.tasks.iter().max().map_or(0, |t| t + 1);
        let m = self.classes.iter().max().map_or(0, |c| c + 1);
        let mut counts = vec![vec![0usize; m]; k];
        for (&t, &c) in self.tasks.iter().zip(&self.classes) {
            counts[t][c] += 1;
        }
        let layout = TaskLayout::new(counts, self.dim())?;
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&i| (self.tasks[i], self.classes[i]));
        TaskDataset::new(layout, self.features.select(ndarray::Axis(1), &order))
    }
}

/// Reads every row of a dataset file without imposing a layout.
pub fn read_samples(path: &Path) -> Result<LabeledSamples, DataError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| DataError::Parse {
            line: 0,
            message: e.to_string(),
        })?;
    let header = reader
        .headers()
        .map_err(|e| DataError::Parse {
            line: 1,
            message: e.to_string(),
        })?
        .clone();
    let dim = check_header(&header)?;

    let mut tasks = Vec::new();
    let mut classes = Vec::new();
    let mut data = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| DataError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        if record.len() != dim + 2 {
            return Err(DataError::Parse {
                line,
                message: format!("expected {} fields, found {}", dim + 2, record.len()),
            });
        }
        tasks.push(parse_id(&record[0], "task", line)?);
        classes.push(parse_id(&record[1], "class", line)?);
        for field in record.iter().skip(2) {
            let v: f64 = field.trim().parse().map_err(|_| DataError::Parse {
                line,
                message: format!("invalid number {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(DataError::Parse {
                    line,
                    message: format!("non-finite value {field:?}"),
                });
            }
            data.push(v);
        }
    }
    let n = tasks.len();
    let features =
        Array2::from_shape_vec((dim, n).f(), data).map_err(|e| DataError::Shape(e.to_string()))?;
    Ok(LabeledSamples {
        tasks,
        classes,
        features,
    })
}

/// Loads a training dataset (see [`LabeledSamples::into_dataset`]).
pub fn load_csv(path: &Path) -> Result<TaskDataset, DataError> {
    read_samples(path)?.into_dataset()
}

/// Writes `x` in layout order. Values use 17 significant digits, which is
/// enough for an exact round trip.
pub fn save_csv(x: &TaskDataset, path: &Path) -> Result<(), DataError> {
    let mut out = BufWriter::new(File::create(path)?);
    let layout = x.layout();
    write!(out, "task,class")?;
    for i in 0..layout.dim() {
        write!(out, ",f{i}")?;
    }
    writeln!(out)?;
    for (col, sample) in x.samples().axis_iter(ndarray::Axis(1)).enumerate() {
        let (t, j) = layout.locate(col).expect("column inside layout");
        write!(out, "{},{}", t + 1, j + 1)?;
        for v in sample.iter() {
            write!(out, ",{v:.16e}")?;
        }
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn check_header(header: &csv::StringRecord) -> Result<usize, DataError> {
    let bad = |message: String| DataError::Parse { line: 1, message };
    if header.len() < 3 || &header[0] != "task" || &header[1] != "class" {
        return Err(bad(
            "header must start with task,class and list at least one feature".into(),
        ));
    }
    for (i, name) in header.iter().skip(2).enumerate() {
        if name != format!("f{i}") {
            return Err(bad(format!(
                "feature column {} should be named f{i}, found {name:?}",
                i + 2
            )));
        }
    }
    Ok(header.len() - 2)
}

fn parse_id(field: &str, what: &str, line: u64) -> Result<usize, DataError> {
    match field.trim().parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v - 1),
        _ => Err(DataError::Parse {
            line,
            message: format!("unknown {what} id {field:?} (ids are 1-based integers)"),
        }),
    }
}
