use super::{DiscreteSpace, Field};
use crate::error::{Error, Result};
use std::path::Path;

fn io_err(path: &Path, e: std::io::Error) -> Error {
    Error::Io { path: path.display().to_string(), source: e }
}

/// Reads a table space from `points` (`id, coords..., weight`, with header)
/// and an optional `distances` file of `i, j, dist` triples.
pub fn read_table_csv(points: &Path, distances: Option<&Path>, dimension: f64) -> Result<DiscreteSpace> {
    let file = std::fs::File::open(points).map_err(|e| io_err(points, e))?;
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let mut rows: Vec<(usize, Vec<f64>, f64)> = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::InvalidSpace(format!("row {}: need id and weight", line + 2)));
        }
        let parse = |s: &str| -> Result<f64> {
            s.parse::<f64>()
                .map_err(|_| Error::InvalidSpace(format!("row {}: bad number `{s}`", line + 2)))
        };
        let id: usize = rec[0]
            .parse()
            .map_err(|_| Error::InvalidSpace(format!("row {}: bad id", line + 2)))?;
        let coords = (1..rec.len() - 1).map(|k| parse(&rec[k])).collect::<Result<Vec<_>>>()?;
        let w = parse(&rec[rec.len() - 1])?;
        rows.push((id, coords, w));
    }
    rows.sort_by_key(|r| r.0);
    for (k, r) in rows.iter().enumerate() {
        if r.0 != k {
            return Err(Error::InvalidSpace(format!("ids must be 0..n, missing {k}")));
        }
    }
    let n = rows.len();
    let matrix = match distances {
        None => None,
        Some(path) => {
            let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
            let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
            let mut m = vec![f64::NAN; n * n];
            for i in 0..n {
                m[i * n + i] = 0.0;
            }
            for rec in rdr.records() {
                let rec = rec?;
                let bad = || Error::InvalidSpace("distance rows must be `i,j,dist`".into());
                if rec.len() != 3 {
                    return Err(bad());
                }
                let i: usize = rec[0].parse().map_err(|_| bad())?;
                let j: usize = rec[1].parse().map_err(|_| bad())?;
                let d: f64 = rec[2].parse().map_err(|_| bad())?;
                if i >= n || j >= n {
                    return Err(Error::InvalidSpace(format!("distance row names unknown id {i} or {j}")));
                }
                if i == j && d != 0.0 {
                    return Err(Error::InvalidSpace(format!("nonzero self distance at {i}")));
                }
                // A reversed pair must agree with an existing entry.
                for (a, b) in [(i, j), (j, i)] {
                    let cur = m[a * n + b];
                    if !cur.is_nan() && a != b && (cur - d).abs() > 1e-12 * d.abs().max(1.0) {
                        return Err(Error::InvalidSpace(format!(
                            "asymmetric distance between {i} and {j}: {cur} vs {d}"
                        )));
                    }
                    m[a * n + b] = d;
                }
            }
            if let Some(k) = m.iter().position(|v| v.is_nan()) {
                return Err(Error::InvalidSpace(format!("missing distance for pair ({}, {})", k / n, k % n)));
            }
            Some(m)
        }
    };
    let weights = rows.iter().map(|r| r.2).collect();
    let coords: Vec<Vec<f64>> = rows.into_iter().map(|r| r.1).collect();
    let coords = if coords.iter().all(|c| c.is_empty()) { vec![] } else { coords };
    DiscreteSpace::from_table(coords, weights, matrix, dimension)
}

/// Writes `id, coords..., value` rows.
pub fn write_field_csv(space: &DiscreteSpace, field: &Field, path: &Path) -> Result<()> {
    field.check(space)?;
    let file = std::fs::File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    let mut header = vec!["id".to_string()];
    for a in 0..space.coord_dim() {
        header.push(format!("x{a}"));
    }
    header.push("value".into());
    w.write_record(&header)?;
    for x in 0..space.len() {
        let mut row = vec![x.to_string()];
        row.extend(space.coords(x).iter().map(|c| format!("{c:?}")));
        row.push(format!("{:?}", field.get(x)));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| io_err(path, e))?;
    Ok(())
}

/// Reads a field written by [`write_field_csv`].
pub fn read_field_csv(space: &DiscreteSpace, path: &Path) -> Result<Field> {
    let file = std::fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut rdr = csv::Reader::from_reader(file);
    let mut vals = vec![f64::NAN; space.len()];
    for rec in rdr.records() {
        let rec = rec?;
        let bad = || Error::InvalidSpace("malformed field row".into());
        let id: usize = rec.get(0).ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let v: f64 = rec.get(rec.len() - 1).ok_or_else(bad)?.parse().map_err(|_| bad())?;
        if id >= vals.len() {
            return Err(Error::ShapeMismatch { expected: space.len(), got: id + 1 });
        }
        vals[id] = v;
    }
    if vals.iter().any(|v| v.is_nan()) {
        return Err(Error::ShapeMismatch { expected: space.len(), got: vals.iter().filter(|v| !v.is_nan()).count() });
    }
    Ok(Field::new(vals))
}
