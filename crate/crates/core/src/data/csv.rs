//! CSV datasets with a `key=value` sidecar.
//!
//! `abalone.csv` is described by `abalone.spec`:
//!
//! ```text
//! # comments and `note=` lines are kept for humans
//! name=abalone
//! n_inputs=8
//! task=fitting
//! has_header=true
//! ```
//!
//! For classification the last field of each row may be an integer class
//! label (expanded to one-hot, `n_classes` optional) or the row may already
//! carry one-hot columns.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{Dataset, Task};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CsvSpec {
    pub n_inputs: usize,
    pub task: Task,
    pub has_header: bool,
    pub name: Option<String>,
    pub n_classes: Option<usize>,
    pub notes: Vec<String>,
}

impl CsvSpec {
    pub fn new(n_inputs: usize, task: Task, has_header: bool) -> Self {
        Self {
            n_inputs,
            task,
            has_header,
            name: None,
            n_classes: None,
            notes: Vec::new(),
        }
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut n_inputs = None;
        let mut task = None;
        let mut has_header = None;
        let mut spec = CsvSpec::new(0, Task::Fitting, false);
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |msg: String| Error::parse(path, i + 1, msg);
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{line}`")))?;
            let (k, v) = (k.trim(), v.trim());
            match k {
                "n_inputs" => n_inputs = Some(v.parse().map_err(|_| bad(format!("bad n_inputs `{v}`")))?),
                "task" => task = Some(v.parse::<Task>().map_err(|e| bad(e.to_string()))?),
                "has_header" => {
                    has_header = Some(v.parse().map_err(|_| bad(format!("bad has_header `{v}`")))?)
                }
                "n_classes" => {
                    spec.n_classes = Some(v.parse().map_err(|_| bad(format!("bad n_classes `{v}`")))?)
                }
                "name" => spec.name = Some(v.to_string()),
                "note" => spec.notes.push(v.to_string()),
                other => return Err(bad(format!("unknown key `{other}`"))),
            }
        }
        let missing = |k: &str| Error::parse(path, 0, format!("missing `{k}`"));
        spec.n_inputs = n_inputs.ok_or_else(|| missing("n_inputs"))?;
        spec.task = task.ok_or_else(|| missing("task"))?;
        spec.has_header = has_header.ok_or_else(|| missing("has_header"))?;
        if spec.n_inputs == 0 {
            return Err(Error::parse(path, 0, "n_inputs must be positive"));
        }
        Ok(spec)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(n) = &self.name {
            let _ = writeln!(s, "name={n}");
        }
        let _ = writeln!(s, "n_inputs={}", self.n_inputs);
        let _ = writeln!(s, "task={}", self.task.as_str());
        let _ = writeln!(s, "has_header={}", self.has_header);
        if let Some(k) = self.n_classes {
            let _ = writeln!(s, "n_classes={k}");
        }
        for note in &self.notes {
            let _ = writeln!(s, "note={note}");
        }
        s
    }
}

/// Loads a CSV dataset. The dataset name defaults to the file stem.
pub fn load_csv(path: impl AsRef<Path>, spec: &CsvSpec) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty());

    let header: Option<Vec<String>> = if spec.has_header {
        let (_, h) = lines.next().ok_or_else(|| Error::parse(path, 1, "empty file"))?;
        Some(h.split(',').map(|f| f.trim().to_string()).collect())
    } else {
        None
    };

    let mut inputs = Vec::new();
    let mut raw_targets = Vec::new();
    let mut width = None;
    for (no, line) in lines {
        let fields = crate::grnn::parse_floats(line, no, path)?;
        let w = *width.get_or_insert(fields.len());
        if fields.len() != w {
            return Err(Error::parse(path, no, format!("expected {w} fields, found {}", fields.len())));
        }
        if w <= spec.n_inputs {
            return Err(Error::parse(
                path,
                no,
                format!("row has {w} fields but {} inputs are declared", spec.n_inputs),
            ));
        }
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::parse(path, no, "non-finite field"));
        }
        let (x, t) = fields.split_at(spec.n_inputs);
        inputs.push(x.to_vec());
        raw_targets.push((no, t.to_vec()));
    }
    if inputs.is_empty() {
        return Err(Error::parse(path, 1, "empty file"));
    }

    let label_column = spec.task == Task::Classification && raw_targets[0].1.len() == 1;
    let targets: Vec<Vec<f64>> = if label_column {
        let labels: Vec<(usize, usize)> = raw_targets
            .iter()
            .map(|(no, t)| {
                let v = t[0];
                if v >= 0.0 && v.fract() == 0.0 {
                    Ok((*no, v as usize))
                } else {
                    Err(Error::parse(path, *no, format!("class label `{v}` is not a non-negative integer")))
                }
            })
            .collect::<Result<_>>()?;
        let max = labels.iter().map(|(_, l)| *l).max().unwrap_or(0);
        let k = spec.n_classes.unwrap_or(max + 1);
        labels
            .into_iter()
            .map(|(no, l)| {
                if l >= k {
                    return Err(Error::parse(path, no, format!("class label {l} >= n_classes {k}")));
                }
                let mut row = vec![0.0; k];
                row[l] = 1.0;
                Ok(row)
            })
            .collect::<Result<_>>()?
    } else {
        raw_targets.into_iter().map(|(_, t)| t).collect()
    };

    let name = spec.name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    let mut ds = Dataset::new(name, spec.task, inputs, targets)
        .map_err(|e| Error::parse(path, 0, e.to_string()))?;
    if let Some(h) = header {
        let (xi, yi) = h.split_at(spec.n_inputs.min(h.len()));
        let target_names: Vec<String> = if label_column && yi.len() == 1 {
            (0..ds.d_out()).map(|c| format!("{}_{c}", yi[0])).collect()
        } else {
            yi.to_vec()
        };
        if xi.len() == ds.d_in() && target_names.len() == ds.d_out() {
            ds = ds.with_column_names(xi.to_vec(), target_names)?;
        }
    }
    Ok(ds)
}

/// Loads every `*.csv` in `dir` that has a `.spec` sidecar, in file-name
/// order. Each entry carries its own result so one bad file does not hide
/// the others.
pub fn load_dir(dir: impl AsRef<Path>) -> Result<Vec<(PathBuf, Result<Dataset>)>> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv") && p.with_extension("spec").exists())
        .collect();
    paths.sort();
    Ok(paths
        .into_iter()
        .map(|p| {
            let ds = CsvSpec::read(p.with_extension("spec")).and_then(|s| load_csv(&p, &s));
            (p, ds)
        })
        .collect())
}

/// Writes `<dir>/<name>.csv` (with header) and its `.spec` sidecar.
/// Classification targets are written as an integer label column.
pub fn write_csv(dataset: &Dataset, dir: impl AsRef<Path>, notes: &[String]) -> Result<PathBuf> {
    let dir = dir.as_ref();
    let path = dir.join(format!("{}.csv", dataset.name));
    let classification = dataset.task == Task::Classification;
    let mut s = String::new();
    s.push_str(&dataset.input_names.join(","));
    if classification {
        s.push_str(",class\n");
    } else {
        s.push(',');
        s.push_str(&dataset.target_names.join(","));
        s.push('\n');
    }
    for (x, t) in dataset.inputs.iter().zip(&dataset.targets) {
        let mut first = true;
        for v in x {
            if !first {
                s.push(',');
            }
            let _ = write!(s, "{v}");
            first = false;
        }
        if classification {
            let label = t.iter().position(|&v| v == 1.0).expect("one-hot row");
            let _ = write!(s, ",{label}");
        } else {
            for v in t {
                let _ = write!(s, ",{v}");
            }
        }
        s.push('\n');
    }
    std::fs::write(&path, s).map_err(|e| Error::io(&path, e))?;

    let mut spec = CsvSpec::new(dataset.d_in(), dataset.task, true);
    spec.name = Some(dataset.name.clone());
    if classification {
        spec.n_classes = Some(dataset.d_out());
    }
    spec.notes = notes.to_vec();
    let spec_path = path.with_extension("spec");
    std::fs::write(&spec_path, spec.to_text()).map_err(|e| Error::io(&spec_path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn tmp(contents: &str) -> (tempfile::TempDir, PathBuf) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        fs::write(&path, contents).unwrap();
        (dir, path)
    }

    #[test]
    fn ninety_four_rows() {
        let body: String = (0..94).map(|i| format!("{i},{}\n", i * 2)).collect();
        let (_d, path) = tmp(&body);
        let ds = load_csv(&path, &CsvSpec::new(1, Task::Fitting, false)).unwrap();
        assert_eq!((ds.rows(), ds.d_in(), ds.d_out()), (94, 1, 1));
        assert_eq!(ds.inputs[93], vec![93.0]);
        assert_eq!(ds.name, "d");
    }

    #[test]
    fn empty_file_errors() {
        let (_d, path) = tmp("");
        assert!(load_csv(&path, &CsvSpec::new(1, Task::Fitting, false)).is_err());
        let (_d, path) = tmp("a,b\n");
        assert!(load_csv(&path, &CsvSpec::new(1, Task::Fitting, true)).is_err());
    }

    #[test]
    fn labels_expand_to_one_hot() {
        let (_d, path) = tmp("f1,f2,class\n0.1,0.2,0\n0.3,0.4,2\n0.5,0.6,1\n");
        let ds = load_csv(&path, &CsvSpec::new(2, Task::Classification, true)).unwrap();
        assert_eq!(ds.d_out(), 3);
        assert_eq!(ds.targets, vec![vec![1.0, 0.0, 0.0], vec![0.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]]);
        assert_eq!(ds.input_names, vec!["f1", "f2"]);
        assert_eq!(ds.target_names, vec!["class_0", "class_1", "class_2"]);
        assert!(ds.targets.iter().all(|r| r.iter().sum::<f64>() == 1.0));
    }

    #[test]
    fn malformed_row_reports_line() {
        let (_d, path) = tmp("1,2\n3,4\n5\n");
        let err = load_csv(&path, &CsvSpec::new(1, Task::Fitting, false)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let (_d, path) = tmp("1,2\n3,abc\n");
        let err = load_csv(&path, &CsvSpec::new(1, Task::Fitting, false)).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let (_d, path) = tmp("1,0.5\n");
        assert!(load_csv(&path, &CsvSpec::new(1, Task::Classification, false)).is_err());
    }

    #[test]
    fn spec_parse() {
        let s = CsvSpec::parse(
            "# comment\nn_inputs=8\ntask=fitting\nhas_header=true\nnote=stand-in\n",
            Path::new("x.spec"),
        )
        .unwrap();
        assert_eq!(s.n_inputs, 8);
        assert!(s.has_header);
        assert_eq!(s.notes, vec!["stand-in"]);
        assert!(CsvSpec::parse("n_inputs=1\ntask=fitting\n", Path::new("x")).is_err());
        assert!(CsvSpec::parse("n_inputs=1\ntask=magic\nhas_header=false\n", Path::new("x")).is_err());
        assert!(CsvSpec::parse("n_inputs=1\ntask=fitting\nhas_header=no\n", Path::new("x")).is_err());
        assert!(CsvSpec::parse("n_inputs=1\ntask=fitting\nhas_header=true\nbogus=1\n", Path::new("x")).is_err());
    }

    #[test]
    fn write_then_load_dir() {
        let dir = tempfile::tempdir().unwrap();
        let reg = Dataset::new("reg", Task::Fitting, vec![vec![0.1, 0.2], vec![1.5, -3.0]], vec![vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let cls = Dataset::new("cls", Task::Classification, vec![vec![0.1], vec![0.2]], vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        write_csv(&reg, dir.path(), &["hello".into()]).unwrap();
        write_csv(&cls, dir.path(), &[]).unwrap();
        fs::write(dir.path().join("orphan.csv"), "1,2\n").unwrap();
        let loaded = load_dir(dir.path()).unwrap();
        assert_eq!(loaded.len(), 2);
        let cls_back = loaded[0].1.as_ref().unwrap();
        assert_eq!(cls_back.targets, cls.targets);
        assert_eq!(cls_back.inputs, cls.inputs);
        let reg_back = loaded[1].1.as_ref().unwrap();
        assert_eq!(reg_back, &reg);
    }
}
