use std::collections::HashMap;
use std::fs::File;
use std::path::Path;

use csv::{ReaderBuilder, StringRecord, Trim};

use super::Dataset;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

struct Table {
    header: Vec<String>,
    rows: Vec<StringRecord>,
}

fn read_table(path: &Path) -> Result<Table> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(Trim::All)
        .from_reader(file);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header.is_empty() || header.iter().all(String::is_empty) {
        return Err(Error::MissingHeader);
    }
    let mut seen = HashMap::new();
    for name in &header {
        if seen.insert(name.as_str(), ()).is_some() {
            return Err(Error::DuplicateColumn(name.clone()));
        }
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::RaggedRow {
                row: i + 1,
                expected: header.len(),
                found: rec.len(),
            });
        }
        rows.push(rec);
    }
    if rows.is_empty() {
        return Err(Error::Empty("csv has no data rows"));
    }
    Ok(Table { header, rows })
}

fn column_index(header: &[String], name: &str) -> Option<usize> {
    header.iter().position(|h| h == name)
}

fn parse_cell(value: &str, row: usize, column: &str) -> Result<f64> {
    match value.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(Error::BadCell {
            row,
            column: column.to_owned(),
            value: value.to_owned(),
        }),
    }
}

/// Reads the columns `cols` of every row as numbers. Rows are numbered from
/// 1, counting data rows only.
fn numeric_block(table: &Table, cols: &[usize]) -> Result<Matrix> {
    let mut data = Vec::with_capacity(table.rows.len() * cols.len());
    for (i, rec) in table.rows.iter().enumerate() {
        for &c in cols {
            data.push(parse_cell(&rec[c], i + 1, &table.header[c])?);
        }
    }
    Matrix::new(table.rows.len(), cols.len(), data)
}

/// Loads a labeled CSV. Every column except `label_column` is a feature;
/// class indices follow the order in which labels first appear.
pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset> {
    let table = read_table(path.as_ref())?;
    let label_idx = column_index(&table.header, label_column)
        .ok_or_else(|| Error::MissingLabelColumn(label_column.to_owned()))?;
    let feature_cols: Vec<usize> = (0..table.header.len())
        .filter(|&c| c != label_idx)
        .collect();
    if feature_cols.is_empty() {
        return Err(Error::Empty("csv has no feature columns"));
    }
    let features = numeric_block(&table, &feature_cols)?;

    let mut class_names: Vec<String> = Vec::new();
    let mut labels = Vec::with_capacity(table.rows.len());
    for rec in &table.rows {
        let raw = &rec[label_idx];
        let idx = match class_names.iter().position(|c| c == raw) {
            Some(i) => i,
            None => {
                class_names.push(raw.to_owned());
                class_names.len() - 1
            }
        };
        labels.push(idx);
    }
    if class_names.len() < 2 {
        return Err(Error::SingleClass(class_names.pop().unwrap_or_default()));
    }
    let feature_names = feature_cols
        .iter()
        .map(|&c| table.header[c].clone())
        .collect();
    Dataset::new(features, labels, feature_names, class_names)
}

/// Loads a labeled CSV against a known schema: features are picked by name
/// in `feature_names` order and labels are mapped onto `class_names`.
pub fn load_csv_with_schema(
    path: impl AsRef<Path>,
    label_column: &str,
    feature_names: &[String],
    class_names: &[String],
) -> Result<Dataset> {
    let table = read_table(path.as_ref())?;
    let label_idx = column_index(&table.header, label_column)
        .ok_or_else(|| Error::MissingLabelColumn(label_column.to_owned()))?;
    let cols = feature_positions(&table.header, feature_names)?;
    let features = numeric_block(&table, &cols)?;
    let labels = table
        .rows
        .iter()
        .map(|rec| {
            let raw = &rec[label_idx];
            class_names
                .iter()
                .position(|c| c == raw)
                .ok_or_else(|| Error::UnknownClass(raw.to_owned()))
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(
        features,
        labels,
        feature_names.to_vec(),
        class_names.to_vec(),
    )
}

/// Loads the named feature columns of an unlabeled CSV. Extra columns are
/// ignored; the returned header is the full CSV header.
pub fn load_feature_matrix(
    path: impl AsRef<Path>,
    feature_names: &[String],
) -> Result<(Matrix, Vec<Vec<String>>, Vec<String>)> {
    let table = read_table(path.as_ref())?;
    let cols = feature_positions(&table.header, feature_names)?;
    let features = numeric_block(&table, &cols)?;
    let raw_rows = table
        .rows
        .iter()
        .map(|r| r.iter().map(str::to_owned).collect())
        .collect();
    Ok((features, raw_rows, table.header))
}

fn feature_positions(header: &[String], feature_names: &[String]) -> Result<Vec<usize>> {
    feature_names
        .iter()
        .map(|name| {
            column_index(header, name).ok_or_else(|| Error::MissingFeatureColumn(name.clone()))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn first_appearance_label_mapping() {
        let f = write_csv("f1,f2,label\n1,2,CAP\n3,4,COVID\n5,6,CAP\n7,8,COVID\n");
        let ds = load_csv(f.path(), "label").unwrap();
        assert_eq!(ds.n_classes(), 2);
        assert_eq!(ds.class_names(), &["CAP".to_string(), "COVID".to_string()]);
        assert_eq!(ds.labels(), &[0, 1, 0, 1]);
        assert_eq!(ds.feature_names(), &["f1".to_string(), "f2".to_string()]);
        assert_eq!(ds.features().row(3), &[7.0, 8.0]);
    }

    #[test]
    fn label_column_may_sit_anywhere() {
        let f = write_csv("y,a,b\nB,1,2\nA,3,4\n");
        let ds = load_csv(f.path(), "y").unwrap();
        assert_eq!(ds.class_names(), &["B".to_string(), "A".to_string()]);
        assert_eq!(ds.features().row(1), &[3.0, 4.0]);
    }

    #[test]
    fn bad_cell_names_row_and_column() {
        let f = write_csv("f1,f2,label\n1,2,a\n3,4,b\n5,abc,a\n");
        match load_csv(f.path(), "label") {
            Err(Error::BadCell { row, column, value }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "f2");
                assert_eq!(value, "abc");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn single_class_rejected() {
        let f = write_csv("f1,label\n1,x\n2,x\n");
        assert!(matches!(
            load_csv(f.path(), "label"),
            Err(Error::SingleClass(_))
        ));
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            load_csv("/nonexistent/x.csv", "label"),
            Err(Error::Io { .. })
        ));
        let dup = write_csv("f,f,label\n1,2,a\n");
        assert!(matches!(
            load_csv(dup.path(), "label"),
            Err(Error::DuplicateColumn(_))
        ));
        let empty = write_csv("");
        assert!(matches!(
            load_csv(empty.path(), "label"),
            Err(Error::MissingHeader)
        ));
        let nolabel = write_csv("a,b\n1,2\n");
        assert!(matches!(
            load_csv(nolabel.path(), "label"),
            Err(Error::MissingLabelColumn(_))
        ));
        let missing = write_csv("a,label\n,x\n1,y\n");
        assert!(matches!(
            load_csv(missing.path(), "label"),
            Err(Error::BadCell { row: 1, .. })
        ));
        let ragged = write_csv("a,label\n1,x\n2\n");
        assert!(matches!(
            load_csv(ragged.path(), "label"),
            Err(Error::RaggedRow { row: 2, .. })
        ));
        let inf = write_csv("a,label\ninf,x\n1,y\n");
        assert!(matches!(
            load_csv(inf.path(), "label"),
            Err(Error::BadCell { .. })
        ));
    }

    #[test]
    fn schema_load_matches_by_name() {
        let f = write_csv("b,label,a\n2,COVID,1\n4,CAP,3\n");
        let names = vec!["a".to_string(), "b".to_string()];
        let classes = vec!["CAP".to_string(), "COVID".to_string()];
        let ds = load_csv_with_schema(f.path(), "label", &names, &classes).unwrap();
        assert_eq!(ds.features().row(0), &[1.0, 2.0]);
        assert_eq!(ds.labels(), &[1, 0]);

        let other = vec!["a".to_string(), "c".to_string()];
        assert!(matches!(
            load_csv_with_schema(f.path(), "label", &other, &classes),
            Err(Error::MissingFeatureColumn(c)) if c == "c"
        ));
        let wrong = vec!["X".to_string(), "COVID".to_string()];
        assert!(matches!(
            load_csv_with_schema(f.path(), "label", &names, &wrong),
            Err(Error::UnknownClass(_))
        ));
    }
}
