//! Time-series datasets, lag embedding and temporal splits.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use ndarray::{s, Array1, Array2, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `T x D` feature matrix and a length-`T` target, rows in time order.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesDataset {
    features: Array2<f64>,
    target: Array1<f64>,
    feature_names: Vec<String>,
    target_name: String,
}

impl TimeSeriesDataset {
    pub fn new(
        features: Array2<f64>,
        target: Array1<f64>,
        feature_names: Vec<String>,
        target_name: impl Into<String>,
    ) -> Result<Self> {
        let (t, d) = features.dim();
        if target.len() != t {
            return Err(Error::InvalidDataset(format!(
                "feature matrix has {t} rows but target has {}",
                target.len()
            )));
        }
        if feature_names.len() != d {
            return Err(Error::InvalidDataset(format!(
                "{d} feature columns but {} names",
                feature_names.len()
            )));
        }
        if d == 0 {
            return Err(Error::InvalidDataset("no feature columns".into()));
        }
        if t < 2 {
            return Err(Error::TooFewRows(t));
        }
        for ((row, col), v) in features.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { row, col });
            }
        }
        for (row, v) in target.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { row, col: d });
            }
        }
        Ok(Self {
            features,
            target,
            feature_names,
            target_name: target_name.into(),
        })
    }

    /// Build a dataset from feature columns, naming them `X0..X{D-1}` and the target `Y`.
    pub fn from_columns(columns: &[Vec<f64>], target: Vec<f64>) -> Result<Self> {
        let t = target.len();
        let d = columns.len();
        let mut features = Array2::zeros((t, d));
        for (j, col) in columns.iter().enumerate() {
            if col.len() != t {
                return Err(Error::InvalidDataset(format!(
                    "column {j} has length {} but target has {t}",
                    col.len()
                )));
            }
            features.column_mut(j).assign(&ArrayView1::from(col.as_slice()));
        }
        let names = (0..d).map(|j| format!("X{j}")).collect();
        Self::new(features, Array1::from(target), names, "Y")
    }

    pub fn len(&self) -> usize {
        self.target.len()
    }

    pub fn is_empty(&self) -> bool {
        self.target.is_empty()
    }

    pub fn n_features(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn feature(&self, index: usize) -> ArrayView1<'_, f64> {
        self.features.column(index)
    }

    pub fn target(&self) -> &Array1<f64> {
        &self.target
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn target_name(&self) -> &str {
        &self.target_name
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.feature_names.iter().position(|n| n == name)
    }

    /// Largest absolute target value.
    pub fn max_abs_target(&self) -> f64 {
        self.target.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Rows `start..end` as a new dataset.
    pub fn slice_rows(&self, start: usize, end: usize) -> Result<Self> {
        Self::new(
            self.features.slice(s![start..end, ..]).to_owned(),
            self.target.slice(s![start..end]).to_owned(),
            self.feature_names.clone(),
            self.target_name.clone(),
        )
    }

    /// Keep only the given feature columns, in the given order.
    pub fn select_features(&self, indices: &[usize]) -> Result<Self> {
        for &index in indices {
            self.check_index(index)?;
        }
        Self::new(
            self.features.select(Axis(1), indices),
            self.target.clone(),
            indices.iter().map(|&i| self.feature_names[i].clone()).collect(),
            self.target_name.clone(),
        )
    }

    pub(crate) fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.n_features() {
            return Err(Error::FeatureOutOfRange {
                index,
                n_features: self.n_features(),
            });
        }
        Ok(())
    }

    /// Write as CSV: feature columns in order, target column last.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.push(&self.target_name);
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for (row, y) in self.features.rows().into_iter().zip(self.target.iter()) {
            record.clear();
            record.extend(row.iter().map(|v| format_real(*v)));
            record.push(format_real(*y));
            w.write_record(&record)?;
        }
        w.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

fn format_real(v: f64) -> String {
    // shortest representation that round-trips
    format!("{v:?}")
}

/// Feature and target lag depths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LagSpec {
    /// Number of past values taken from each feature.
    #[serde(rename = "L")]
    pub feature_lags: usize,
    /// Number of past values taken from the target.
    #[serde(rename = "M")]
    pub target_lags: usize,
}

impl LagSpec {
    pub fn new(feature_lags: usize, target_lags: usize) -> Result<Self> {
        if feature_lags == 0 || target_lags == 0 {
            return Err(Error::InvalidLags(format!(
                "L and M must be at least 1 (got L={feature_lags}, M={target_lags})"
            )));
        }
        Ok(Self {
            feature_lags,
            target_lags,
        })
    }

    pub fn max_lag(&self) -> usize {
        self.feature_lags.max(self.target_lags)
    }
}

/// Supervised rows `(Y_t ; Y_{t-1..t-M} ; X_i^{t-1..t-L})` for `t = max(L, M) .. T-1`.
#[derive(Debug, Clone)]
pub struct EmbeddedDesign {
    pub response: Array1<f64>,
    /// `n x M`; column `j` holds `Y_{t-1-j}`.
    pub target_lags: Array2<f64>,
    /// Per feature, `n x L`; column `j` holds `X_i^{t-1-j}`.
    pub feature_lags: BTreeMap<usize, Array2<f64>>,
    /// Time index of the first response row.
    pub offset: usize,
}

impl EmbeddedDesign {
    pub fn n(&self) -> usize {
        self.response.len()
    }

    /// Horizontally stack the lag blocks of `features` (in iteration order).
    pub fn stack_features<'a, I>(&self, features: I) -> Array2<f64>
    where
        I: IntoIterator<Item = &'a usize>,
    {
        let blocks: Vec<_> = features
            .into_iter()
            .map(|i| self.feature_lags[i].view())
            .collect();
        if blocks.is_empty() {
            return Array2::zeros((self.n(), 0));
        }
        ndarray::concatenate(Axis(1), &blocks).expect("lag blocks share row count")
    }
}

/// Read a CSV file with a header row; `target_column` becomes the target and all
/// other columns are features, in header order.
pub fn load_csv(path: impl AsRef<Path>, target_column: &str) -> Result<TimeSeriesDataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, target_column)
}

pub fn read_csv<R: Read>(reader: R, target_column: &str) -> Result<TimeSeriesDataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    let matches: Vec<usize> = header
        .iter()
        .enumerate()
        .filter(|(_, h)| h.as_str() == target_column)
        .map(|(i, _)| i)
        .collect();
    let target_col = match matches.as_slice() {
        [i] => *i,
        [] => return Err(Error::MissingColumn(target_column.to_owned())),
        _ => {
            return Err(Error::InvalidDataset(format!(
                "target column `{target_column}` appears more than once"
            )))
        }
    };

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); header.len()];
    for (row, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() != header.len() {
            return Err(Error::ParseError {
                row,
                col: record.len().min(header.len()),
            });
        }
        for (col, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| Error::ParseError { row, col })?;
            if !v.is_finite() {
                return Err(Error::NonFiniteValue { row, col });
            }
            columns[col].push(v);
        }
    }

    let t = columns[0].len();
    if t < 2 {
        return Err(Error::TooFewRows(t));
    }
    let target = Array1::from(std::mem::take(&mut columns[target_col]));
    let feature_cols: Vec<usize> = (0..header.len()).filter(|&c| c != target_col).collect();
    if feature_cols.is_empty() {
        return Err(Error::InvalidDataset("no feature columns besides the target".into()));
    }
    let mut features = Array2::zeros((t, feature_cols.len()));
    for (j, &c) in feature_cols.iter().enumerate() {
        features
            .column_mut(j)
            .assign(&ArrayView1::from(columns[c].as_slice()));
    }
    let names = feature_cols.iter().map(|&c| header[c].clone()).collect();
    TimeSeriesDataset::new(features, target, names, target_column)
}

fn zscore(mut col: ndarray::ArrayViewMut1<f64>, name: &str) -> Result<()> {
    let n = col.len() as f64;
    let mean = col.sum() / n;
    let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    if !(var > 0.0) || var.sqrt() <= f64::EPSILON * mean.abs().max(1.0) {
        return Err(Error::ZeroVariance(name.to_owned()));
    }
    let sd = var.sqrt();
    col.mapv_inplace(|v| (v - mean) / sd);
    Ok(())
}

/// Z-score every feature column and the target (population variance).
pub fn standardize(ds: &TimeSeriesDataset) -> Result<TimeSeriesDataset> {
    let mut out = ds.clone();
    for j in 0..out.n_features() {
        let name = out.feature_names[j].clone();
        zscore(out.features.column_mut(j), &name)?;
    }
    let name = out.target_name.clone();
    zscore(out.target.view_mut(), &name)?;
    Ok(out)
}

/// Lag-embed `ds` for the features in `subset`. Drops the first `max(L, M)` rows.
pub fn embed(
    ds: &TimeSeriesDataset,
    lags: LagSpec,
    subset: &BTreeSet<usize>,
) -> Result<EmbeddedDesign> {
    LagSpec::new(lags.feature_lags, lags.target_lags)?;
    for &i in subset {
        ds.check_index(i)?;
    }
    let t_len = ds.len();
    let offset = lags.max_lag();
    if offset >= t_len {
        return Err(Error::LagTooLarge {
            lag: offset,
            len: t_len,
        });
    }
    let n = t_len - offset;
    if n == 0 {
        return Err(Error::EmptyResult);
    }

    let response = ds.target.slice(s![offset..]).to_owned();
    let target_lags = lag_block(ds.target.view(), offset, lags.target_lags);
    let feature_lags = subset
        .iter()
        .map(|&i| (i, lag_block(ds.feature(i), offset, lags.feature_lags)))
        .collect();
    Ok(EmbeddedDesign {
        response,
        target_lags,
        feature_lags,
        offset,
    })
}

fn lag_block(series: ArrayView1<f64>, offset: usize, depth: usize) -> Array2<f64> {
    let n = series.len() - offset;
    let mut out = Array2::zeros((n, depth));
    for j in 0..depth {
        let start = offset - 1 - j;
        out.column_mut(j)
            .assign(&series.slice(s![start..start + n]));
    }
    out
}

/// Split into a time prefix of `floor(fraction * T)` rows and the remainder.
pub fn temporal_split(
    ds: &TimeSeriesDataset,
    train_fraction: f64,
) -> Result<(TimeSeriesDataset, TimeSeriesDataset)> {
    let t = ds.len();
    let degenerate = || Error::DegenerateSplit {
        len: t,
        fraction: train_fraction,
    };
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(degenerate());
    }
    let cut = (train_fraction * t as f64).floor() as usize;
    // each side must still be a valid dataset (T >= 2)
    if cut < 2 || t - cut < 2 {
        return Err(degenerate());
    }
    Ok((ds.slice_rows(0, cut)?, ds.slice_rows(cut, t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ramp(t: usize, d: usize) -> TimeSeriesDataset {
        // feature i at time t holds 1000 * (i + 1) + t; target holds t
        let cols: Vec<Vec<f64>> = (0..d)
            .map(|i| (0..t).map(|s| 1000.0 * (i + 1) as f64 + s as f64).collect())
            .collect();
        TimeSeriesDataset::from_columns(&cols, (0..t).map(|s| s as f64).collect()).unwrap()
    }

    #[test]
    fn load_three_column_csv() {
        let csv = "a,y,b\n1,2,3\n4,5,6\n7,8,9\n1,1,1\n2,2,2\n";
        let ds = read_csv(csv.as_bytes(), "y").unwrap();
        assert_eq!(ds.len(), 5);
        assert_eq!(ds.n_features(), 2);
        assert_eq!(ds.feature_names(), ["a", "b"]);
        assert_eq!(ds.target()[1], 5.0);
        assert_eq!(ds.feature(1)[2], 9.0);
    }

    #[test]
    fn load_rejects_nan_and_missing_column() {
        let csv = "a,y\n1,2\nNaN,3\n";
        assert!(matches!(
            read_csv(csv.as_bytes(), "y"),
            Err(Error::NonFiniteValue { row: 1, col: 0 })
        ));
        let csv = "a,b\n1,2\n3,4\n";
        assert!(matches!(read_csv(csv.as_bytes(), "y"), Err(Error::MissingColumn(_))));
        let csv = "a,y\n1,x\n3,4\n";
        assert!(matches!(
            read_csv(csv.as_bytes(), "y"),
            Err(Error::ParseError { row: 0, col: 1 })
        ));
        let csv = "a,y\n1,2\n";
        assert!(matches!(read_csv(csv.as_bytes(), "y"), Err(Error::TooFewRows(1))));
    }

    #[test]
    fn standardize_column() {
        let ds = TimeSeriesDataset::from_columns(&[vec![1.0, 2.0, 3.0]], vec![3.0, 1.0, 2.0]).unwrap();
        let z = standardize(&ds).unwrap();
        let col = z.feature(0);
        assert!(col.sum().abs() < 1e-12);
        assert!((col.mapv(|v| v * v).sum() / 3.0 - 1.0).abs() < 1e-12);
        let again = standardize(&z).unwrap();
        for (a, b) in z.features().iter().zip(again.features().iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn standardize_rejects_constant() {
        let ds = TimeSeriesDataset::from_columns(&[vec![5.0, 5.0, 5.0]], vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(standardize(&ds), Err(Error::ZeroVariance(n)) if n == "X0"));
    }

    #[test]
    fn embed_row_counts() {
        let ds = ramp(5, 1);
        let all: BTreeSet<usize> = [0].into();
        let e = embed(&ds, LagSpec::new(1, 1).unwrap(), &all).unwrap();
        assert_eq!(e.n(), 4);
        assert_eq!(e.response[0], 1.0);
        let e = embed(&ds, LagSpec::new(2, 3).unwrap(), &all).unwrap();
        assert_eq!(e.n(), 2);
        assert!(matches!(
            embed(&ds, LagSpec::new(5, 1).unwrap(), &all),
            Err(Error::LagTooLarge { .. })
        ));
        assert!(matches!(
            embed(&ds, LagSpec::new(1, 1).unwrap(), &[3].into()),
            Err(Error::FeatureOutOfRange { .. })
        ));
    }

    #[test]
    fn embed_target_lags_are_past_values() {
        let ds = ramp(5, 1);
        let e = embed(&ds, LagSpec::new(1, 2).unwrap(), &BTreeSet::new()).unwrap();
        let row = e.response.iter().position(|&y| y == 3.0).unwrap();
        assert_eq!(e.target_lags.row(row).to_vec(), vec![2.0, 1.0]);
    }

    #[test]
    fn lag_spec_rejects_zero() {
        assert!(LagSpec::new(0, 1).is_err());
        assert!(LagSpec::new(1, 0).is_err());
    }

    #[test]
    fn split_counts() {
        let ds = ramp(10, 2);
        let (a, b) = temporal_split(&ds, 0.6).unwrap();
        assert_eq!((a.len(), b.len()), (6, 4));
        assert_eq!(b.target()[0], 6.0);
        assert!(matches!(temporal_split(&ds, 1.0), Err(Error::DegenerateSplit { .. })));
        assert!(matches!(temporal_split(&ds, 0.0), Err(Error::DegenerateSplit { .. })));
    }

    #[test]
    fn split_of_concatenation_is_prefix() {
        let ds = ramp(639 + 228, 1);
        let (a, b) = temporal_split(&ds, 0.5).unwrap();
        assert_eq!(a.len(), 433);
        assert_eq!(a.target()[432], 432.0);
        assert_eq!(b.target()[0], 433.0);
    }

    proptest! {
        #[test]
        fn embedding_never_looks_ahead(t in 6usize..40, d in 1usize..4, l in 1usize..5, m in 1usize..5) {
            prop_assume!(l.max(m) < t);
            let ds = ramp(t, d);
            let all: BTreeSet<usize> = (0..d).collect();
            let e = embed(&ds, LagSpec::new(l, m).unwrap(), &all).unwrap();
            prop_assert_eq!(e.n(), t - l.max(m));
            for r in 0..e.n() {
                let time = e.response[r];
                prop_assert_eq!(time as usize, r + e.offset);
                for j in 0..m {
                    prop_assert_eq!(e.target_lags[[r, j]], time - 1.0 - j as f64);
                }
                for i in 0..d {
                    for j in 0..l {
                        let stamp = e.feature_lags[&i][[r, j]] - 1000.0 * (i + 1) as f64;
                        prop_assert!(stamp < time);
                        prop_assert_eq!(stamp, time - 1.0 - j as f64);
                    }
                }
            }
        }

        #[test]
        fn embedding_restricts_to_subsets(split in 0usize..4, l in 1usize..4, m in 1usize..4) {
            let ds = ramp(20, 4);
            let a: BTreeSet<usize> = (0..split).collect();
            let ab: BTreeSet<usize> = (0..4).collect();
            let lags = LagSpec::new(l, m).unwrap();
            let ea = embed(&ds, lags, &a).unwrap();
            let eab = embed(&ds, lags, &ab).unwrap();
            prop_assert_eq!(&ea.response, &eab.response);
            prop_assert_eq!(&ea.target_lags, &eab.target_lags);
            for i in &a {
                prop_assert_eq!(&ea.feature_lags[i], &eab.feature_lags[i]);
            }
        }

        #[test]
        fn split_concatenation_roundtrips(t in 4usize..60, frac in 0.05f64..0.95) {
            let ds = ramp(t, 2);
            if let Ok((a, b)) = temporal_split(&ds, frac) {
                prop_assert_eq!(a.len(), (frac * t as f64).floor() as usize);
                let feats = ndarray::concatenate(Axis(0), &[a.features().view(), b.features().view()]).unwrap();
                let tgt = ndarray::concatenate(Axis(0), &[a.target().view(), b.target().view()]).unwrap();
                prop_assert_eq!(&feats, ds.features());
                prop_assert_eq!(&tgt, ds.target());
            }
        }
    }
}
