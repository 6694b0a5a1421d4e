//! Expectation values of a spinor field.
//!
//! Every moment is evaluated on the renormalized state; only `norm_sq`
//! reports the raw field, which for conditioned evolution is the
//! post-selection probability.

use crate::error::{Error, Result};
use crate::field::SpinorField;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ObservableRecord {
    pub time: f64,
    pub mean_x: f64,
    pub mean_p: f64,
    pub mean_sigma_x: f64,
    pub mean_sigma_y: f64,
    pub mean_sigma_z: f64,
    /// `⟨xσz⟩ − ⟨x⟩⟨σz⟩`
    pub correlation_xz: f64,
    /// Squared norm of the unnormalized state.
    pub norm_sq: f64,
}

impl ObservableRecord {
    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    /// Raw moment `⟨xσz⟩`.
    pub fn mean_x_sigma_z(&self) -> f64 {
        self.correlation_xz + self.mean_x * self.mean_sigma_z
    }
}

pub type ObservableSeries = Vec<ObservableRecord>;

/// Moments of `field`; `time` is left at zero for the caller to set.
pub fn observables(field: &SpinorField) -> Result<ObservableRecord> {
    let norm_sq = field.norm_sq();
    if !(norm_sq > 0.0 && norm_sq.is_finite()) {
        return Err(Error::DegenerateState { norm_sq });
    }
    let grid = field.grid();
    let dx = grid.dx();
    let (mut x1, mut sx, mut sy, mut sz, mut xsz) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for ((&x, u), d) in grid.positions().iter().zip(field.up()).zip(field.down()) {
        let (pu, pd) = (u.norm_sqr(), d.norm_sqr());
        let cross = u.conj() * d;
        x1 += x * (pu + pd);
        sx += 2.0 * cross.re;
        sy += 2.0 * cross.im;
        sz += pu - pd;
        xsz += x * (pu - pd);
    }
    let w = dx / norm_sq;
    let (mean_x, mean_sigma_z) = (x1 * w, sz * w);

    let (up_k, down_k) = field.to_momentum();
    let (mut pk, mut total) = (0.0, 0.0);
    for ((&p, u), d) in grid.momenta().iter().zip(&up_k).zip(&down_k) {
        let w = u.norm_sqr() + d.norm_sqr();
        pk += p * w;
        total += w;
    }

    Ok(ObservableRecord {
        time: 0.0,
        mean_x,
        mean_p: pk / total,
        mean_sigma_x: sx * w,
        mean_sigma_y: sy * w,
        mean_sigma_z,
        correlation_xz: xsz * w - mean_x * mean_sigma_z,
        norm_sq,
    })
}
