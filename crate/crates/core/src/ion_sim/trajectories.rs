use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::evolution::{check_initial, dirac_frame_observables, IonRun, Propagator};
use super::state::IonState;
use super::IonParams;
use crate::error::{Error, Result};
use crate::observables::{ObservableRecord, ObservableSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JumpChannel {
    /// |↑⟩ → |a⟩; ends the trajectory.
    Decay,
    /// Return to |↑⟩ after optical pumping; the state is projected onto |↑⟩.
    PumpingError,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpRecord {
    pub time: f64,
    pub channel: JumpChannel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub index: usize,
    pub jumps: Vec<JumpRecord>,
    pub decay_time: Option<f64>,
    /// A decayed ion that the final readout reports as not decayed.
    pub misread: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    pub n_total: usize,
    /// Trajectories without a decay by `t_final`.
    pub n_no_jump: usize,
    pub records: Vec<TrajectoryRecord>,
    /// Average over trajectories accepted at each sample time: those not
    /// decayed by then plus misread decays. `norm_sq` holds the accepted
    /// fraction.
    pub conditioned: ObservableSeries,
    pub accepted: Vec<usize>,
    pub master_seed: u64,
}

impl TrajectoryEnsemble {
    pub fn no_jump_fraction(&self) -> f64 {
        self.n_no_jump as f64 / self.n_total as f64
    }

    /// Binomial standard error of [`Self::no_jump_fraction`] for true
    /// probability `p`.
    pub fn binomial_sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.n_total as f64).sqrt()
    }
}

struct Trajectory {
    record: TrajectoryRecord,
    samples: Vec<Option<ObservableRecord>>,
}

/// Waiting-time Monte Carlo unraveling with two jump channels sharing the
/// operator `|↑⟩⟨↑|`: decay at rate γ and pumping error at rate γ_d.
///
/// Trajectory `i` draws from a ChaCha8 stream `i` seeded with
/// `master_seed`, so results do not depend on the thread count.
pub fn run_trajectories(
    params: &IonParams,
    initial: &IonState,
    run: &IonRun,
    n_traj: usize,
    master_seed: u64,
) -> Result<TrajectoryEnsemble> {
    if n_traj == 0 {
        return Err(Error::config("n_traj must be >= 1"));
    }
    check_initial(initial, params)?;
    let schedule = run.schedule(params)?;
    let trajectories: Vec<Trajectory> = (0..n_traj)
        .into_par_iter()
        .map(|i| single_trajectory(params, initial, schedule, master_seed, i))
        .collect::<Result<_>>()?;

    let (h, stride, n_samples) = schedule;
    let mut sums = vec![ObservableRecord::default(); n_samples + 1];
    let mut accepted = vec![0usize; n_samples + 1];
    for traj in &trajectories {
        for (k, sample) in traj.samples.iter().enumerate() {
            if let Some(r) = sample {
                accepted[k] += 1;
                let s = &mut sums[k];
                s.mean_x += r.mean_x;
                s.mean_p += r.mean_p;
                s.mean_sigma_x += r.mean_sigma_x;
                s.mean_sigma_y += r.mean_sigma_y;
                s.mean_sigma_z += r.mean_sigma_z;
                s.correlation_xz += r.correlation_xz;
            }
        }
    }
    let mut conditioned = Vec::with_capacity(n_samples + 1);
    for (k, (s, &count)) in sums.iter().zip(&accepted).enumerate() {
        let time = (k * stride) as f64 * h;
        if count == 0 {
            return Err(Error::Statistics(format!(
                "no accepted trajectories out of {n_traj} at t = {time}"
            )));
        }
        let w = 1.0 / count as f64;
        conditioned.push(ObservableRecord {
            time,
            mean_x: s.mean_x * w,
            mean_p: s.mean_p * w,
            mean_sigma_x: s.mean_sigma_x * w,
            mean_sigma_y: s.mean_sigma_y * w,
            mean_sigma_z: s.mean_sigma_z * w,
            correlation_xz: s.correlation_xz * w,
            norm_sq: count as f64 / n_traj as f64,
        });
    }
    let records: Vec<_> = trajectories.into_iter().map(|t| t.record).collect();
    let n_no_jump = records.iter().filter(|r| r.decay_time.is_none()).count();
    Ok(TrajectoryEnsemble {
        n_total: n_traj,
        n_no_jump,
        records,
        conditioned,
        accepted,
        master_seed,
    })
}

fn single_trajectory(
    params: &IonParams,
    initial: &IonState,
    (h, stride, n_samples): (f64, usize, usize),
    master_seed: u64,
    index: usize,
) -> Result<Trajectory> {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index as u64);
    let misread = rng.random::<f64>() < 1.0 - params.readout_fidelity;
    let total_rate = params.gamma + params.gamma_d;
    let decay_share = if total_rate > 0.0 {
        params.gamma / total_rate
    } else {
        1.0
    };
    let mut threshold = 1.0 - rng.random::<f64>();

    let mut propagator = Propagator::new(params, total_rate);
    let mut state = initial.clone();
    state.time = 0.0;
    let mut jumps = Vec::new();
    let mut decay_time = None;
    let mut frozen = None;
    let mut samples = Vec::with_capacity(n_samples + 1);
    samples.push(Some(dirac_frame_observables(&state, params)?));

    for s in 0..n_samples {
        if decay_time.is_none() {
            for j in 0..stride {
                let t = (s * stride + j) as f64 * h;
                propagator.step(t, h, state.amplitudes_mut());
                if state.norm_sq() >= threshold {
                    continue;
                }
                let time = t + h;
                state.time = time;
                if rng.random::<f64>() < decay_share {
                    jumps.push(JumpRecord {
                        time,
                        channel: JumpChannel::Decay,
                    });
                    decay_time = Some(time);
                    frozen = Some(decayed_record(&state)?);
                    break;
                }
                jumps.push(JumpRecord {
                    time,
                    channel: JumpChannel::PumpingError,
                });
                let n_max = state.n_max();
                state.amplitudes_mut()[n_max + 1..]
                    .iter_mut()
                    .for_each(|c| *c = Default::default());
                state = state.normalized()?;
                state.time = time;
                threshold = 1.0 - rng.random::<f64>();
            }
        }
        let sample = match decay_time {
            None => {
                state.time = ((s + 1) * stride) as f64 * h;
                state.check_truncation()?;
                Some(dirac_frame_observables(&state, params)?)
            }
            Some(_) if misread => frozen.map(|r: ObservableRecord| ObservableRecord {
                time: ((s + 1) * stride) as f64 * h,
                ..r
            }),
            Some(_) => None,
        };
        samples.push(sample);
    }
    Ok(Trajectory {
        record: TrajectoryRecord {
            index,
            jumps,
            decay_time,
            misread,
        },
        samples,
    })
}

/// Motional moments of the ion after decaying out of |↑⟩; spin moments are
/// zero because |a⟩ is outside the qubit.
fn decayed_record(state: &IonState) -> Result<ObservableRecord> {
    let n_max = state.n_max();
    let mut amplitudes = state.amplitudes().to_vec();
    amplitudes[n_max + 1..]
        .iter_mut()
        .for_each(|c| *c = Default::default());
    let mut motional = IonState::new(n_max, amplitudes)?.normalized()?;
    motional.time = state.time;
    let r = motional.observables()?;
    Ok(ObservableRecord {
        mean_sigma_x: 0.0,
        mean_sigma_y: 0.0,
        mean_sigma_z: 0.0,
        correlation_xz: 0.0,
        norm_sq: 0.0,
        ..r
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spinor::spinor;
    use num_complex::Complex64;

    #[test]
    fn seeds_are_reproducible() {
        let p = IonParams {
            n_max: 32,
            gamma_d: 1.0,
            ..IonParams::default().to_natural()
        };
        let s = IonState::coherent(Complex64::new(0.0, 1.0), spinor(1.0, 0.0), 32).unwrap();
        let run = IonRun::new(&p, 0.1).with_samples(5);
        let a = run_trajectories(&p, &s, &run, 16, 7).unwrap();
        let b = run_trajectories(&p, &s, &run, 16, 7).unwrap();
        assert_eq!(a, b);
        assert!(run_trajectories(&p, &s, &run, 0, 7).is_err());
    }
}
