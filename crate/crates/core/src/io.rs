//! Interchange formats: the space JSON object `{"n": int, "d": [[real]]}`
//! and the points CSV with header `label,x1,...,xk`.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::metric::DistanceMatrix;

#[derive(Serialize, Deserialize)]
struct SpaceJson {
    n: usize,
    d: Vec<Vec<f64>>,
}

impl Serialize for DistanceMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SpaceJson {
            n: self.n(),
            d: self.to_rows(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for DistanceMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = SpaceJson::deserialize(deserializer)?;
        if raw.d.len() != raw.n {
            return Err(D::Error::custom(format!(
                "matrix has {} rows but n = {}",
                raw.d.len(),
                raw.n
            )));
        }
        DistanceMatrix::from_rows(&raw.d).map_err(D::Error::custom)
    }
}

pub fn read_space(reader: impl Read) -> Result<DistanceMatrix> {
    Ok(serde_json::from_reader(reader)?)
}

pub fn write_space(writer: impl Write, d: &DistanceMatrix) -> Result<()> {
    serde_json::to_writer(writer, d)?;
    Ok(())
}

/// Labeled coordinate rows; the common ground between Euclidean and L1
/// configurations.
pub struct LabeledPoints {
    pub labels: Vec<String>,
    pub points: Vec<Vec<f64>>,
}

pub fn read_points(reader: impl Read) -> Result<LabeledPoints> {
    let mut csv_reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut labels = Vec::new();
    let mut points = Vec::new();
    for record in csv_reader.records() {
        let record = record?;
        let mut fields = record.iter();
        let label = fields
            .next()
            .ok_or_else(|| Error::Degenerate("empty CSV record".into()))?
            .to_string();
        let coords: std::result::Result<Vec<f64>, _> =
            fields.map(|f| f.parse::<f64>()).collect();
        let coords = coords.map_err(|e| Error::Degenerate(format!("bad coordinate: {e}")))?;
        labels.push(label);
        points.push(coords);
    }
    if points.is_empty() {
        return Err(Error::Degenerate("no points in CSV input".into()));
    }
    Ok(LabeledPoints { labels, points })
}

pub fn write_points(
    writer: impl Write,
    labels: &[String],
    points: &[Vec<f64>],
) -> Result<()> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    let dim = points.first().map_or(0, |p| p.len());
    let mut header = vec!["label".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    csv_writer.write_record(&header)?;
    for (label, point) in labels.iter().zip(points) {
        let mut record = vec![label.clone()];
        record.extend(point.iter().map(|x| format!("{x:?}")));
        csv_writer.write_record(&record)?;
    }
    csv_writer.flush()?;
    Ok(())
}
