/// Sample summary used for standard errors across runs or replicates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    /// Standard error of `mean`.
    pub mean_se: f64,
    /// Large-sample standard error of `variance`, sqrt((m4 - s⁴) / n).
    pub variance_se: f64,
}

pub fn summarize(xs: &[f64]) -> Summary {
    let n = xs.len();
    if n == 0 {
        return Summary {
            count: 0,
            mean: f64::NAN,
            variance: f64::NAN,
            mean_se: f64::NAN,
            variance_se: f64::NAN,
        };
    }
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / nf;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / nf;
    let variance = if n > 1 { m2 * nf / (nf - 1.0) } else { 0.0 };
    Summary {
        count: n,
        mean,
        variance,
        mean_se: (variance / nf).sqrt(),
        variance_se: ((m4 - m2 * m2).max(0.0) / nf).sqrt(),
    }
}

/// (a - b) / sqrt(se_a² + se_b²); zero when both errors vanish and a == b.
pub fn z_score(a: f64, se_a: f64, b: f64, se_b: f64) -> f64 {
    let se = se_a.hypot(se_b);
    if se == 0.0 {
        if a == b {
            0.0
        } else {
            f64::INFINITY.copysign(a - b)
        }
    } else {
        (a - b) / se
    }
}
