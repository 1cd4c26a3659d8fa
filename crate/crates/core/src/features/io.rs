//! Feature matrix CSV: a `# catalog <version>` comment line, a header of the
//! 98 catalog names followed by `instance_id,window_start,label`, then one
//! row per sample. Augmented matrices carry a trailing `copy` column.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::radar_data::InstanceId;

use super::catalog::{FeatureCatalog, NUM_FEATURES};
use super::extract::FeatureVector;

/// A feature row plus the augmentation copy it came from (0 = original).
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureRow {
    pub vector: FeatureVector,
    pub copy: Option<u32>,
}

pub fn write_feature_matrix<W: Write>(out: W, rows: &[FeatureRow], with_copy: bool) -> Result<()> {
    let catalog = FeatureCatalog::standard();
    let mut out = out;
    writeln!(out, "# catalog {}", catalog.version).map_err(|e| Error::io("<feature matrix>", e))?;
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = catalog.entries.iter().map(|e| e.name.as_str()).collect();
    header.extend(["instance_id", "window_start", "label"]);
    if with_copy {
        header.push("copy");
    }
    w.write_record(&header)?;
    for row in rows {
        let v = &row.vector;
        let mut rec: Vec<String> = v.values.iter().map(|x| x.to_string()).collect();
        rec.push(v.instance_id.0.to_string());
        rec.push(v.window_start.to_string());
        rec.push(v.label.name().to_string());
        if with_copy {
            rec.push(row.copy.unwrap_or(0).to_string());
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| Error::io("<feature matrix>", e))?;
    Ok(())
}

pub fn read_feature_matrix<R: Read>(input: R) -> Result<Vec<FeatureRow>> {
    let mut reader = BufReader::new(input);
    let mut first = String::new();
    reader.read_line(&mut first).map_err(|e| Error::io("<feature matrix>", e))?;
    let expected = &FeatureCatalog::standard().version;
    let found = first.trim().strip_prefix("# catalog ").unwrap_or("").to_string();
    if &found != expected {
        return Err(Error::FormatVersion {
            found,
            expected: expected.clone(),
        });
    }
    let mut r = csv::Reader::from_reader(reader);
    let header = r.headers()?.clone();
    let with_copy = match header.len() {
        n if n == NUM_FEATURES + 3 => false,
        n if n == NUM_FEATURES + 4 => true,
        n => {
            return Err(Error::Dimension {
                expected: NUM_FEATURES + 3,
                got: n,
            })
        }
    };
    let catalog = FeatureCatalog::standard();
    if let Some((i, _)) = header.iter().take(NUM_FEATURES).enumerate().find(|(i, h)| *h != catalog.name(*i)) {
        return Err(Error::Record {
            line: 2,
            reason: format!("header column {i} is `{}`, expected `{}`", &header[i], catalog.name(i)),
        });
    }
    let mut rows = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let rec = rec?;
        let line = k + 3;
        let bad = |reason: String| Error::Record { line, reason };
        let num = |i: usize| -> Result<f64> {
            rec[i].parse::<f64>().map_err(|_| bad(format!("column {i}: cannot parse `{}`", &rec[i])))
        };
        let values = (0..NUM_FEATURES).map(num).collect::<Result<Vec<_>>>()?;
        let instance_id = InstanceId(
            rec[NUM_FEATURES]
                .parse()
                .map_err(|_| bad(format!("bad instance_id `{}`", &rec[NUM_FEATURES])))?,
        );
        let window_start = num(NUM_FEATURES + 1)?;
        let label = rec[NUM_FEATURES + 2].parse()?;
        let copy = if with_copy {
            Some(rec[NUM_FEATURES + 3].parse().map_err(|_| bad("bad copy index".into()))?)
        } else {
            None
        };
        rows.push(FeatureRow {
            vector: FeatureVector {
                values,
                instance_id,
                window_start,
                label,
            },
            copy,
        });
    }
    Ok(rows)
}
