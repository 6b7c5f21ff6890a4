//! Streaming statistics for the Monte Carlo harness: mergeable Welford
//! summaries, the normalized limit statistics, empirical tail
//! log-probabilities, and Kolmogorov-Smirnov distances.

use crate::error::{Error, Result};
use crate::specfun::{abs_moment, BallParams};

/// Neumaier-compensated accumulator; keeps sums of n ~ 1e6 terms accurate to
/// a few ulps.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Mergeable running summary: count, mean, sum of squared deviations,
/// extremes.  `merge` is the parallel-variance combination, so chunked
/// streams can be reduced in any grouping.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentSummary {
    pub count: u64,
    pub mean: f64,
    pub m2: f64,
    pub min: f64,
    pub max: f64,
}

impl Default for MomentSummary {
    fn default() -> Self {
        Self::empty()
    }
}

impl MomentSummary {
    pub fn empty() -> Self {
        MomentSummary {
            count: 0,
            mean: 0.0,
            m2: 0.0,
            min: f64::INFINITY,
            max: f64::NEG_INFINITY,
        }
    }

    /// Welford update.
    #[inline]
    pub fn push(&mut self, value: f64) {
        self.count += 1;
        let delta = value - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (value - self.mean);
        if value < self.min {
            self.min = value;
        }
        if value > self.max {
            self.max = value;
        }
    }

    pub fn merge(&self, other: &MomentSummary) -> MomentSummary {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let count = self.count + other.count;
        let delta = other.mean - self.mean;
        let w = other.count as f64 / count as f64;
        let mean = self.mean + delta * w;
        let m2 = self.m2 + other.m2 + delta * delta * (self.count as f64 * w);
        MomentSummary {
            count,
            mean,
            m2,
            min: self.min.min(other.min),
            max: self.max.max(other.max),
        }
    }

    /// Unbiased sample variance m2/(count-1); zero below two observations.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Standard error of the sample variance under approximate normality,
    /// var * sqrt(2/(count-1)).
    pub fn variance_stderr(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        self.variance() * (2.0 / (self.count - 1) as f64).sqrt()
    }

    /// Standard error of the mean.
    pub fn mean_stderr(&self) -> f64 {
        if self.count < 2 {
            return f64::INFINITY;
        }
        (self.variance() / self.count as f64).sqrt()
    }

    pub const CSV_HEADER: &'static str = "stat,count,mean,variance,min,max";

    pub fn csv_row(&self, name: &str) -> String {
        use crate::textio::fmt_float;
        format!(
            "{},{},{},{},{},{}",
            name,
            self.count,
            fmt_float(self.mean),
            fmt_float(self.variance()),
            fmt_float(self.min),
            fmt_float(self.max)
        )
    }
}

/// Summarize a stream of values.
pub fn summarize<I: IntoIterator<Item = f64>>(values: I) -> MomentSummary {
    let mut s = MomentSummary::empty();
    for v in values {
        s.push(v);
    }
    s
}

/// Which normalization a scalar statistic carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StatisticKind {
    /// sqrt(n) (n^(1/p-1/q) ||Z||_q / M_p(q)^(1/q) - 1), the CLT statistic.
    Vn,
    /// The same with the (1 + mu_n/n)^(1/p) correction of the generalized CLT.
    VnGeneral,
    /// (sum |Y_i|^q / n)^(1/q), the LDP statistic for the Gaussian vector.
    Un,
    /// Vn / b_n at the moderate-deviation scale.
    MdpScaled,
    /// n^(1/p-1/q) ||Z||_q without centering.
    RawNorm,
}

impl StatisticKind {
    pub fn label(&self) -> &'static str {
        match self {
            StatisticKind::Vn => "vn",
            StatisticKind::VnGeneral => "vn_general",
            StatisticKind::Un => "un",
            StatisticKind::MdpScaled => "vn_over_bn",
            StatisticKind::RawNorm => "raw_norm",
        }
    }

    /// Evaluate the pinned normalization from the power-sum sufficient
    /// statistics (sum_q, sum_p, w) of one draw.
    pub fn evaluate(
        &self,
        sums: &crate::distributions::NormPowerSums,
        params: &BallParams,
        mu_n: f64,
        b_n: f64,
    ) -> Result<f64> {
        let norm_q = sums.norm_q(params.p, params.q);
        match self {
            StatisticKind::Vn => clt_statistic(norm_q, params),
            StatisticKind::VnGeneral => gen_clt_statistic(norm_q, params, mu_n),
            StatisticKind::Un => power_mean_root(sums.sum_q, params.n, params.q),
            StatisticKind::MdpScaled => {
                if !(b_n > 0.0) {
                    return Err(Error::Domain(format!("b_n must be positive, got {b_n}")));
                }
                Ok(clt_statistic(norm_q, params)? / b_n)
            }
            StatisticKind::RawNorm => raw_norm_statistic(norm_q, params),
        }
    }
}

/// CLT statistic sqrt(n) (n^(1/p-1/q) / M_p(q)^(1/q) * norm_q - 1).
pub fn clt_statistic(norm_q: f64, params: &BallParams) -> Result<f64> {
    let scale = norm_scale(params)?;
    let n = params.n as f64;
    Ok(n.sqrt() * (scale * norm_q - 1.0))
}

/// Generalized-CLT statistic with the (1 + mu_n/n)^(1/p) mixing correction.
pub fn gen_clt_statistic(norm_q: f64, params: &BallParams, mu_n: f64) -> Result<f64> {
    if !(mu_n >= 0.0 && mu_n.is_finite()) {
        return Err(Error::Domain(format!(
            "mu_n must be nonnegative, got {mu_n}"
        )));
    }
    let scale = norm_scale(params)?;
    let n = params.n as f64;
    let correction = (1.0 + mu_n / n).powf(1.0 / params.p);
    Ok(n.sqrt() * (scale * correction * norm_q - 1.0))
}

/// The centering scale n^(1/p-1/q) / M_p(q)^(1/q).
pub fn norm_scale(params: &BallParams) -> Result<f64> {
    params.validate()?;
    let n = params.n as f64;
    let m = abs_moment(params.p, params.q)?;
    Ok(n.powf(1.0 / params.p - 1.0 / params.q) / m.powf(1.0 / params.q))
}

/// Uncentered LDP statistic n^(1/p-1/q) ||Z||_q.
pub fn raw_norm_statistic(norm_q: f64, params: &BallParams) -> Result<f64> {
    params.validate()?;
    let n = params.n as f64;
    Ok(n.powf(1.0 / params.p - 1.0 / params.q) * norm_q)
}

/// (sum_q / n)^(1/q) where sum_q = sum of |Y_i|^q over a Gaussian vector.
pub fn power_mean_root(sum_q: f64, n: usize, q: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    if !(q > 0.0 && q.is_finite()) {
        return Err(Error::Domain(format!("q must be positive, got {q}")));
    }
    if sum_q < 0.0 {
        return Err(Error::Domain(format!(
            "sum_q must be nonnegative, got {sum_q}"
        )));
    }
    Ok((sum_q / n as f64).powf(1.0 / q))
}

/// log of the empirical tail probability #{v >= threshold}/count.
///
/// Returns `f64::NEG_INFINITY` as the distinguished no-exceedance sentinel;
/// callers must propagate it (the harness marks such cells
/// insufficient-samples rather than failed).
pub fn tail_logprob(values: &[f64], threshold: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::Domain("tail_logprob of an empty sample".into()));
    }
    let exceed = values.iter().filter(|&&v| v >= threshold).count();
    Ok(tail_logprob_from_counts(exceed as u64, values.len() as u64))
}

/// Same from pre-reduced exceedance counts.
pub fn tail_logprob_from_counts(exceedances: u64, total: u64) -> f64 {
    assert!(
        total > 0,
        "tail_logprob_from_counts needs a nonempty sample"
    );
    if exceedances == 0 {
        f64::NEG_INFINITY
    } else {
        (exceedances as f64 / total as f64).ln()
    }
}

/// One-sample Kolmogorov-Smirnov distance sup |F_emp - F| against a CDF.
pub fn ks_distance<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> Result<f64> {
    if sample.is_empty() {
        return Err(Error::Domain("KS distance of an empty sample".into()));
    }
    let mut xs = sample.to_vec();
    xs.sort_unstable_by(|a, b| a.partial_cmp(b).expect("NaN in KS sample"));
    let n = xs.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in xs.iter().enumerate() {
        let c = cdf(x);
        let lo = (c - i as f64 / n).abs();
        let hi = ((i + 1) as f64 / n - c).abs();
        d = d.max(lo).max(hi);
    }
    Ok(d)
}

/// Two-sample Kolmogorov-Smirnov distance.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain(
            "KS two-sample distance of an empty sample".into(),
        ));
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_unstable_by(|u, v| u.partial_cmp(v).expect("NaN in KS sample"));
    ys.sort_unstable_by(|u, v| u.partial_cmp(v).expect("NaN in KS sample"));
    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let t = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= t {
            i += 1;
        }
        while j < ys.len() && ys[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(d)
}

/// Spearman rank correlation; used for monotone-trend diagnostics over the
/// dimension ladder.  Ties get their first-encounter rank (the ladders here
/// are short and generically tie-free).
pub fn spearman_rho(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Domain(
            "spearman_rho needs two equal-length samples of size >= 2".into(),
        ));
    }
    let rank = |vals: &[f64]| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..vals.len()).collect();
        idx.sort_by(|&a, &b| {
            vals[a]
                .partial_cmp(&vals[b])
                .expect("NaN in spearman input")
        });
        let mut r = vec![0.0; vals.len()];
        for (rank_pos, &orig) in idx.iter().enumerate() {
            r[orig] = rank_pos as f64;
        }
        r
    };
    let rx = rank(xs);
    let ry = rank(ys);
    let n = xs.len() as f64;
    let mean = (n - 1.0) / 2.0;
    let mut num = 0.0;
    let mut dx = 0.0;
    let mut dy = 0.0;
    for k in 0..xs.len() {
        num += (rx[k] - mean) * (ry[k] - mean);
        dx += (rx[k] - mean).powi(2);
        dy += (ry[k] - mean).powi(2);
    }
    if dx == 0.0 || dy == 0.0 {
        return Ok(0.0);
    }
    Ok(num / (dx * dy).sqrt())
}
