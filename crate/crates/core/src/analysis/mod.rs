//! Performance model of greedy power-of-two approximation: beta-distributed
//! angle errors, distance errors from scale rounding, the distortion lower
//! bound and Monte-Carlo checks against them.

pub mod beta;
mod model;
pub mod quadrature;
mod simulate;

use std::io::Write;

pub use beta::{ln_beta, ln_gamma, reg_inc_beta, reg_inc_beta_pair};
pub use model::{
    angle_error_cdf, asymptotic_threshold, distortion_lower_bound, mean_sq_angle_error, rho2_cdf, total_error,
    total_error_from, AngleErrorModel,
};
pub use simulate::{
    dkw_band, ks_distance, mean_stderr, simulate_angle_error, simulate_decomposition, CurvePoint, DecompositionCurve,
};

use crate::error::{domain, Result};

fn csv_io(e: csv::Error) -> crate::error::Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => io.into(),
        other => crate::error::malformed(format!("{other:?}")),
    }
}

impl DecompositionCurve {
    /// Columns `s,lower_bound,mean,stderr`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for p in &self.points {
            w.serialize(p).map_err(csv_io)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Angle-error CDF for each `K` on a uniform grid of `points + 1` values of
/// `r ∈ [0, 1]`, with `N = round(log2 K / rate)`. Columns `r,K<k>_N<n>`.
pub fn write_cdf_csv<W: Write>(out: W, rate: f64, ks: &[u64], points: usize) -> Result<()> {
    let models = ks
        .iter()
        .map(|&k| {
            let n = ((k as f64).log2() / rate).round().max(2.0) as usize;
            AngleErrorModel::new(n, k)
        })
        .collect::<Result<Vec<_>>>()?;
    if points == 0 {
        return Err(domain("need at least one grid interval"));
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["r".to_string()];
    header.extend(models.iter().map(|m| format!("K{}_N{}", m.k(), m.n())));
    w.write_record(&header).map_err(csv_io)?;
    for i in 0..=points {
        let r = i as f64 / points as f64;
        let mut row = vec![r.to_string()];
        row.extend(models.iter().map(|m| m.angle_error_cdf(r).to_string()));
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Per-step total error versus codebook size: for each rate and each `K`
/// with integral `N = log2 K / R`, columns `rate,N,K,total_error,root`
/// where `root = total_error^{1/R}`.
pub fn write_total_error_csv<W: Write>(out: W, rates: &[f64], ks: &[u64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rate", "N", "K", "total_error", "root"]).map_err(csv_io)?;
    for &rate in rates {
        for &k in ks {
            let n = (k as f64).log2() / rate;
            if (n - n.round()).abs() > 1e-9 || n.round() < 2.0 {
                continue;
            }
            let e = AngleErrorModel::new(n.round() as usize, k)?.total_error();
            w.write_record([rate.to_string(), n.round().to_string(), k.to_string(), e.to_string(), e.powf(1.0 / rate).to_string()])
                .map_err(csv_io)?;
        }
    }
    w.flush()?;
    Ok(())
}
