//! Reading inputs and writing plot-ready CSV.
//!
//! Parse failures become [`Error::Input`] with the file name and line number,
//! so they surface as exit code 2.

use std::fs::File;
use std::io::Read;
use std::path::Path;

use coarse_core::Error;
use serde::de::DeserializeOwned;
use serde::Deserialize;

fn read_to_string(path: &Path) -> Result<String, Error> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
    Ok(text)
}

/// Deserialises a JSON file, reporting the failing line.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Error> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::input(format!("{}: line {}: {e}", path.display(), e.line())))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum PointsJson {
    Bare(Vec<Vec<f64>>),
    Wrapped { points: Vec<Vec<f64>> },
}

/// Reads a point set: JSON (`[[x, y, …], …]` or `{"points": …}`) when the
/// extension is `.json`, otherwise CSV with one point per row. A first CSV
/// row that does not parse as numbers is taken as a header; `#` starts a
/// comment line.
pub fn read_points(path: &Path) -> Result<Vec<Vec<f64>>, Error> {
    let rows = if path.extension().is_some_and(|e| e == "json") {
        match read_json::<PointsJson>(path)? {
            PointsJson::Bare(p) | PointsJson::Wrapped { points: p } => p,
        }
    } else {
        read_points_csv(path)?
    };
    let Some(first) = rows.first() else {
        return Err(Error::input(format!("{}: no points", path.display())));
    };
    let dim = first.len();
    if dim == 0 {
        return Err(Error::input(format!("{}: points have no coordinates", path.display())));
    }
    if let Some(i) = rows.iter().position(|r| r.len() != dim) {
        return Err(Error::input(format!(
            "{}: point {} has {} coordinates, expected {dim}",
            path.display(),
            i + 1,
            rows[i].len()
        )));
    }
    Ok(rows)
}

fn read_points_csv(path: &Path) -> Result<Vec<Vec<f64>>, Error> {
    let text = read_to_string(path)?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::input(format!("{}: {e}", path.display())))?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => {
                if let Some(bad) = row.iter().find(|x| !x.is_finite()) {
                    return Err(Error::input(format!(
                        "{}: line {line}: non-finite coordinate {bad}",
                        path.display()
                    )));
                }
                rows.push(row);
            }
            Err(_) if i == 0 => continue,
            Err(e) => {
                return Err(Error::input(format!("{}: line {line}: {e}", path.display())));
            }
        }
    }
    Ok(rows)
}

/// Writes a CSV file with the given header.
pub fn write_csv<R>(path: &Path, header: &[&str], rows: R) -> Result<(), Error>
where
    R: IntoIterator,
    R::Item: IntoIterator,
    <R::Item as IntoIterator>::Item: ToString,
{
    let fail = |e: csv::Error| Error::input(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(fail)?;
    w.write_record(header).map_err(fail)?;
    for row in rows {
        let fields: Vec<String> = row.into_iter().map(|x| x.to_string()).collect();
        w.write_record(&fields).map_err(fail)?;
    }
    w.flush().map_err(|e| Error::input(format!("{}: {e}", path.display())))
}
