//! Monthly time-series containers, alignment, differencing/lagging and
//! descriptive statistics.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A calendar month. Ordering is lexicographic on `(year, month)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Period {
    year: i32,
    month: u32,
}

impl Period {
    pub fn new(year: i32, month: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::InvalidPeriod(format!("{year}-{month}")));
        }
        Ok(Period { year, month })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> u32 {
        self.month
    }

    fn index(&self) -> i64 {
        self.year as i64 * 12 + (self.month as i64 - 1)
    }

    fn from_index(idx: i64) -> Self {
        Period {
            year: idx.div_euclid(12) as i32,
            month: (idx.rem_euclid(12) + 1) as u32,
        }
    }

    pub fn succ(&self) -> Self {
        self.add_months(1)
    }

    pub fn add_months(&self, n: i64) -> Self {
        Period::from_index(self.index() + n)
    }

    /// Signed number of months from `self` to `other`.
    pub fn months_until(&self, other: &Period) -> i64 {
        other.index() - self.index()
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

impl FromStr for Period {
    type Err = Error;

    /// Accepts `YYYY-MM` or `YYYY-MM-DD` (the day is ignored).
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidPeriod(s.to_string());
        let mut parts = s.trim().split('-');
        let year = parts.next().ok_or_else(bad)?.parse::<i32>().map_err(|_| bad())?;
        let month = parts.next().ok_or_else(bad)?.parse::<u32>().map_err(|_| bad())?;
        if let Some(day) = parts.next() {
            let d = day.parse::<u32>().map_err(|_| bad())?;
            if !(1..=31).contains(&d) {
                return Err(bad());
            }
        }
        if parts.next().is_some() {
            return Err(bad());
        }
        Period::new(year, month).map_err(|_| bad())
    }
}

impl Serialize for Period {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Period {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A single contiguous monthly series with no missing values.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    name: String,
    start: Period,
    values: Vec<f64>,
}

impl Series {
    pub fn new(name: impl Into<String>, start: Period, values: Vec<f64>) -> Result<Self> {
        let name = name.into();
        if values.is_empty() {
            return Err(Error::InvalidSeries {
                name,
                reason: "no observations".into(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InternalGap {
                period: start.add_months(i as i64),
                name,
            });
        }
        Ok(Series { name, start, values })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn start(&self) -> Period {
        self.start
    }

    /// Last observed period.
    pub fn end(&self) -> Period {
        self.start.add_months(self.values.len() as i64 - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, period: Period) -> Option<f64> {
        let off = self.start.months_until(&period);
        if off < 0 {
            return None;
        }
        self.values.get(off as usize).copied()
    }
}

/// Aligned `T x k` matrix of monthly observations. Column order is the
/// estimation order.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    names: Vec<String>,
    start: Period,
    data: DMatrix<f64>,
}

impl Frame {
    pub fn new(names: Vec<String>, start: Period, data: DMatrix<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(Error::DimensionMismatch("frame must be at least 1x1".into()));
        }
        if names.len() != data.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} columns",
                names.len(),
                data.ncols()
            )));
        }
        for (j, name) in names.iter().enumerate() {
            if let Some(i) = data.column(j).iter().position(|v| !v.is_finite()) {
                return Err(Error::InternalGap {
                    name: name.clone(),
                    period: start.add_months(i as i64),
                });
            }
        }
        Ok(Frame { names, start, data })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn start(&self) -> Period {
        self.start
    }

    pub fn end(&self) -> Period {
        self.start.add_months(self.data.nrows() as i64 - 1)
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    /// Number of observations `T`.
    pub fn nobs(&self) -> usize {
        self.data.nrows()
    }

    /// Number of variables `k`.
    pub fn nvars(&self) -> usize {
        self.data.ncols()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.names.iter().position(|n| n == name)?;
        Some(self.data.column(j).iter().copied().collect())
    }

    /// A new frame holding the named columns in the given order.
    pub fn select(&self, names: &[String]) -> Result<Frame> {
        let idx = names
            .iter()
            .map(|n| {
                self.names.iter().position(|m| m == n).ok_or_else(|| Error::NameMismatch {
                    expected: names.to_vec(),
                    found: self.names.clone(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let data = DMatrix::from_fn(self.nobs(), idx.len(), |i, j| self.data[(i, idx[j])]);
        Frame::new(names.to_vec(), self.start, data)
    }

    /// Split back into one [`Series`] per column.
    pub fn to_series(&self) -> Vec<Series> {
        self.names
            .iter()
            .enumerate()
            .map(|(j, n)| Series {
                name: n.clone(),
                start: self.start,
                values: self.data.column(j).iter().copied().collect(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignPolicy {
    /// Largest window covered by every series.
    Intersection,
    /// Exactly the inclusive window `[from, to]`.
    Span { from: Period, to: Period },
}

pub fn align(series: &[Series], policy: AlignPolicy) -> Result<Frame> {
    if series.is_empty() {
        return Err(Error::EmptyOverlap);
    }
    let (from, to) = match policy {
        AlignPolicy::Intersection => {
            let from = series.iter().map(|s| s.start()).max().unwrap();
            let to = series.iter().map(|s| s.end()).min().unwrap();
            (from, to)
        }
        AlignPolicy::Span { from, to } => (from, to),
    };
    if from > to {
        return Err(Error::EmptyOverlap);
    }
    let t_len = from.months_until(&to) as usize + 1;
    let mut data = DMatrix::zeros(t_len, series.len());
    for (j, s) in series.iter().enumerate() {
        for i in 0..t_len {
            let p = from.add_months(i as i64);
            data[(i, j)] = s.get(p).ok_or_else(|| Error::InternalGap {
                name: s.name().to_string(),
                period: p,
            })?;
        }
    }
    Frame::new(series.iter().map(|s| s.name().to_string()).collect(), from, data)
}

/// `order`-th difference; the output starts `order` months later.
pub fn diff(frame: &Frame, order: usize) -> Result<Frame> {
    if order == 0 {
        return Err(Error::InvalidArgument("difference order must be positive".into()));
    }
    if frame.nobs() <= order {
        return Err(Error::TooShort {
            needed: order,
            available: frame.nobs(),
        });
    }
    let mut data = frame.data.clone();
    for _ in 0..order {
        let n = data.nrows();
        data = data.rows(1, n - 1) - data.rows(0, n - 1);
    }
    Frame::new(frame.names.clone(), frame.start.add_months(order as i64), data)
}

/// Regressand/regressor pair for a `lags`-order autoregression.
///
/// `Y` holds observations `lags+1..T`; row `t` of `X` is
/// `[y_{t-1}', ..., y_{t-lags}']`, grouped by lag then variable.
pub fn lag_matrix(frame: &Frame, lags: usize) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    if lags == 0 {
        return Err(Error::InvalidArgument("lag count must be positive".into()));
    }
    let t_len = frame.nobs();
    if t_len <= lags {
        return Err(Error::TooShort {
            needed: lags,
            available: t_len,
        });
    }
    let k = frame.nvars();
    let n = t_len - lags;
    let y = frame.data.rows(lags, n).into_owned();
    let x = DMatrix::from_fn(n, k * lags, |i, c| {
        let lag = c / k + 1;
        frame.data[(i + lags - lag, c % k)]
    });
    Ok((y, x))
}

/// One row of the descriptive-statistics table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescribeRow {
    pub name: String,
    pub n_obs: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub min: f64,
    pub max: f64,
}

/// Statistics over each series' own full sample.
pub fn describe(series: &[Series]) -> Vec<DescribeRow> {
    series.iter().map(|s| describe_values(s.name(), s.values())).collect()
}

/// Sample statistics of a plain slice; standard deviation uses `n - 1`.
pub fn describe_values(name: &str, values: &[f64]) -> DescribeRow {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let std_dev = if n > 1 {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1) as f64).sqrt()
    } else {
        0.0
    };
    // a constant series must report exactly its value and zero spread
    let (mean, std_dev) = if min == max { (min, 0.0) } else { (mean.clamp(min, max), std_dev) };
    DescribeRow {
        name: name.to_string(),
        n_obs: n,
        mean,
        std_dev,
        min,
        max,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn p(y: i32, m: u32) -> Period {
        Period::new(y, m).unwrap()
    }

    fn one_col(vals: &[f64]) -> Frame {
        Frame::new(vec!["x".into()], p(2000, 1), DMatrix::from_column_slice(vals.len(), 1, vals)).unwrap()
    }

    #[test]
    fn period_rollover_and_order() {
        assert_eq!(p(1999, 12).succ(), p(2000, 1));
        assert_eq!(p(2000, 1).add_months(-1), p(1999, 12));
        assert!(p(1999, 12) < p(2000, 1));
        assert!(Period::new(2000, 13).is_err());
        assert_eq!("1978-03-01".parse::<Period>().unwrap(), p(1978, 3));
        assert_eq!(p(1959, 1).months_until(&p(2024, 8)), 787);
    }

    #[test]
    fn align_identical_spans() {
        let a = Series::new("a", p(2000, 1), vec![1.0, 2.0, 3.0]).unwrap();
        let b = Series::new("b", p(2000, 1), vec![4.0, 5.0, 6.0]).unwrap();
        let f = align(&[a, b], AlignPolicy::Intersection).unwrap();
        assert_eq!(f.nobs(), 3);
        assert_eq!(f.start(), p(2000, 1));
    }

    #[test]
    fn align_intersection_starts_at_later_series() {
        let t_a = p(1959, 1).months_until(&p(2024, 8)) as usize + 1;
        let t_b = p(1971, 11).months_until(&p(2024, 8)) as usize + 1;
        let a = Series::new("a", p(1959, 1), vec![1.0; t_a]).unwrap();
        let b = Series::new("b", p(1971, 11), vec![2.0; t_b]).unwrap();
        let f = align(&[a, b], AlignPolicy::Intersection).unwrap();
        assert_eq!(f.start(), p(1971, 11));
        assert_eq!(f.end(), p(2024, 8));
        // 1971-11..1971-12 is 2 months, 1972..2023 is 52 years, plus 8
        assert_eq!(f.nobs(), 2 + 52 * 12 + 8);
    }

    #[test]
    fn align_errors() {
        let a = Series::new("a", p(2000, 1), vec![1.0; 3]).unwrap();
        let b = Series::new("b", p(2001, 1), vec![1.0; 3]).unwrap();
        assert!(matches!(
            align(&[a.clone(), b], AlignPolicy::Intersection),
            Err(Error::EmptyOverlap)
        ));
        let err = align(
            &[a],
            AlignPolicy::Span {
                from: p(1999, 12),
                to: p(2000, 2),
            },
        )
        .unwrap_err();
        match err {
            Error::InternalGap { name, period } => {
                assert_eq!(name, "a");
                assert_eq!(period, p(1999, 12));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn diff_examples() {
        let f = one_col(&[5.0, 5.0, 5.0, 5.0]);
        assert_eq!(diff(&f, 1).unwrap().data().as_slice(), &[0.0, 0.0, 0.0]);
        let f = one_col(&[1.0, 2.0, 4.0, 7.0]);
        let d1 = diff(&f, 1).unwrap();
        assert_eq!(d1.data().as_slice(), &[1.0, 2.0, 3.0]);
        assert_eq!(d1.start(), p(2000, 2));
        let d2 = diff(&f, 2).unwrap();
        assert_eq!(d2.data().as_slice(), &[1.0, 1.0]);
        assert_eq!(d2.start(), p(2000, 3));
        assert!(matches!(diff(&one_col(&[1.0]), 1), Err(Error::TooShort { .. })));
    }

    #[test]
    fn lag_matrix_examples() {
        let f = one_col(&[10.0, 20.0, 30.0]);
        let (y, x) = lag_matrix(&f, 1).unwrap();
        assert_eq!(y.as_slice(), &[20.0, 30.0]);
        assert_eq!(x.as_slice(), &[10.0, 20.0]);

        let data = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]);
        let f = Frame::new(vec!["a".into(), "b".into()], p(2000, 1), data).unwrap();
        let (y, x) = lag_matrix(&f, 2).unwrap();
        assert_eq!((y.nrows(), x.ncols()), (2, 4));
        // first row: y_3 regressed on [y_2, y_1]
        assert_eq!(x.row(0).iter().copied().collect::<Vec<_>>(), vec![3.0, 4.0, 1.0, 2.0]);
        assert!(matches!(lag_matrix(&f, 4), Err(Error::TooShort { .. })));
    }

    #[test]
    fn describe_examples() {
        let s = Series::new("c", p(2000, 1), vec![1.0, 1.0, 1.0]).unwrap();
        let r = &describe(&[s])[0];
        assert_eq!((r.mean, r.std_dev, r.min, r.max), (1.0, 0.0, 1.0, 1.0));
        let r = describe_values("x", &[0.0, 10.0]);
        assert_eq!(r.mean, 5.0);
        // sqrt(50) with the n - 1 denominator
        assert_abs_diff_eq!(r.std_dev, 7.0710678118654755, epsilon = 1e-12);
    }

    #[test]
    fn series_rejects_non_finite() {
        assert!(matches!(
            Series::new("x", p(2000, 1), vec![1.0, f64::NAN, 2.0]),
            Err(Error::InternalGap { .. })
        ));
        assert!(Series::new("x", p(2000, 1), vec![]).is_err());
    }
}
