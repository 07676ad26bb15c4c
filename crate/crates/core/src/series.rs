//! Uniformly sampled functions of time.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};

/// A uniform sampling `t_j = t0 + j dt`, `j < len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeAxis {
    pub t0: f64,
    pub dt: f64,
    pub len: usize,
}

impl TimeAxis {
    pub fn new(t0: f64, dt: f64, len: usize) -> Result<Self> {
        ensure(t0.is_finite() && dt.is_finite() && dt > 0.0, || {
            format!("time axis needs finite t0 and dt > 0, got t0={t0}, dt={dt}")
        })?;
        ensure(len > 0, || "time axis must be non-empty".into())?;
        Ok(Self { t0, dt, len })
    }

    /// `[t0, t_end]` with `n` intervals.
    pub fn spanning(t0: f64, t_end: f64, intervals: usize) -> Result<Self> {
        ensure(t_end > t0 && intervals > 0, || format!("bad span [{t0}, {t_end}]"))?;
        Self::new(t0, (t_end - t0) / intervals as f64, intervals + 1)
    }

    #[inline]
    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |j| self.time(j))
    }

    pub fn end(&self) -> f64 {
        self.time(self.len - 1)
    }

    pub fn matches(&self, other: &TimeAxis) -> bool {
        self.len == other.len
            && (self.t0 - other.t0).abs() <= 1e-12 * (1.0 + self.t0.abs())
            && (self.dt - other.dt).abs() <= 1e-12 * self.dt
    }
}

/// Uniformly sampled real or complex function of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries<T = f64> {
    pub t0: f64,
    pub dt: f64,
    pub values: Vec<T>,
}

impl<T> TimeSeries<T> {
    pub fn new(axis: TimeAxis, values: Vec<T>) -> Result<Self> {
        if values.len() != axis.len {
            return Err(Error::Mismatch(format!(
                "axis has {} samples, got {} values",
                axis.len,
                values.len()
            )));
        }
        Ok(Self { t0: axis.t0, dt: axis.dt, values })
    }

    pub fn axis(&self) -> TimeAxis {
        TimeAxis { t0: self.t0, dt: self.dt, len: self.values.len() }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, &T)> {
        self.values.iter().enumerate().map(move |(j, v)| (self.time(j), v))
    }

    /// Every `stride`-th sample, starting with the first.
    pub fn subsample(&self, stride: usize) -> Self
    where
        T: Clone,
    {
        let stride = stride.max(1);
        Self {
            t0: self.t0,
            dt: self.dt * stride as f64,
            values: self.values.iter().step_by(stride).cloned().collect(),
        }
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> TimeSeries<U> {
        TimeSeries { t0: self.t0, dt: self.dt, values: self.values.iter().map(f).collect() }
    }
}

impl TimeSeries<f64> {
    /// Composite trapezoid rule over the whole series.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.values, self.dt)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn argmax_time(&self) -> f64 {
        let (j, _) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (j, &v)| if v > acc.1 { (j, v) } else { acc });
        self.time(j)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        self.map(|v| v * factor)
    }
}

impl TimeSeries<Complex64> {
    pub fn integral(&self) -> Complex64 {
        let n = self.values.len();
        if n < 2 {
            return Complex64::new(0.0, 0.0);
        }
        let inner: Complex64 = self.values[1..n - 1].iter().sum();
        (inner + (self.values[0] + self.values[n - 1]) * 0.5) * self.dt
    }
}

pub(crate) fn trapezoid(values: &[f64], dt: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().sum();
    (inner + 0.5 * (values[0] + values[n - 1])) * dt
}
