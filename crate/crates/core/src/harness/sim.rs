//! Monte Carlo experiments.
//!
//! Every frame (BER) or fading realization (rates) owns a ChaCha stream
//! selected by its index under the master seed, so results do not depend on
//! how work is split across threads. Per-item results are collected in index
//! order and reduced sequentially.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{Coherence, Experiment, SimConfig};
use super::output::{Entity, ExperimentResult, Metric, Row};
use crate::analytics::{rate_ratio, LinkState};
use crate::channel::{
    channel_matrix, draw_fading, standard_complex_normal, ChannelMatrix, FadingRealization,
    NoiseModel,
};
use crate::modem::{bits_of, BitFrame, ConstellationPoint};
use crate::precoding::{assemble_transmit, PrecodingBasis};
use crate::receiver::{decoding_order, project, sic_decode, OrderMode, ProjectedSignal, SicPlan};
use crate::topology::{GroupAssignment, PowerAllocation, Topology};
use crate::{Complex, Result};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "TIMNOMA_THREADS";

/// Worker cap from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
}

fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Decoding order for one fading block.
pub fn block_order(topology: &Topology, fading: &FadingRealization, mode: OrderMode) -> Vec<usize> {
    match mode {
        OrderMode::Distance => (0..topology.user_count()).collect(),
        OrderMode::Instantaneous => {
            // sigma^2 is common to all users and does not change the order
            let gains: Vec<f64> = (0..topology.user_count())
                .map(|k| {
                    channel_matrix(topology, fading, k)
                        .map(|h| h.scale().norm_sqr())
                        .unwrap_or(0.0)
                })
                .collect();
            decoding_order(&gains)
        }
    }
}

/// Which users transmit in a BER run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Active {
    All,
    /// Only this user transmits, keeping its hybrid power share.
    Only(usize),
}

/// Per-frame error counts.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameTally {
    pub errors: Vec<u64>,
    pub bits: Vec<u64>,
    /// Sum of `|x|^2` over the frame's blocks.
    pub transmit_energy: f64,
    pub blocks: u64,
}

impl FrameTally {
    fn zero(users: usize) -> Self {
        FrameTally {
            errors: vec![0; users],
            bits: vec![0; users],
            transmit_energy: 0.0,
            blocks: 0,
        }
    }

    fn merge(&mut self, other: &FrameTally) {
        for (a, b) in self.errors.iter_mut().zip(&other.errors) {
            *a += b;
        }
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a += b;
        }
        self.transmit_energy += other.transmit_energy;
        self.blocks += other.blocks;
    }

    pub fn mean_transmit_energy(&self) -> f64 {
        self.transmit_energy / self.blocks as f64
    }
}

/// Immutable per-scenario state shared by all frames.
#[derive(Debug, Clone)]
pub struct Cell {
    pub topology: Topology,
    pub groups: GroupAssignment,
    pub power: PowerAllocation,
    pub basis: PrecodingBasis,
}

impl Cell {
    pub fn new(config: &SimConfig) -> Result<Self> {
        let topology = config.topology.clone();
        Ok(Cell {
            groups: topology.assign_groups(),
            power: topology.allocate_power(config.total_power)?,
            basis: PrecodingBasis::new(topology.group_count())?,
            topology,
        })
    }

    fn block_state(
        &self,
        config: &SimConfig,
        fading: &FadingRealization,
        active: Active,
    ) -> Result<(Vec<ChannelMatrix>, Vec<SicPlan>)> {
        let users = self.topology.user_count();
        let order = block_order(&self.topology, fading, config.order_mode);
        let channels = (0..users)
            .map(|k| channel_matrix(&self.topology, fading, k))
            .collect::<Result<_>>()?;
        let plans = (0..users)
            .map(|k| match active {
                Active::All => {
                    SicPlan::new(k, &order, self.groups.members(self.groups.group_of(k)))
                }
                Active::Only(_) => SicPlan::new(k, &order, &[k]),
            })
            .collect();
        Ok((channels, plans))
    }

    /// Simulates one frame of `bits_per_frame` bits per user, one `T`-slot
    /// block per QPSK symbol.
    ///
    /// Random draws happen in a fixed order whatever `active` is: every
    /// user's bits, then per block the fading (once per frame under
    /// [`Coherence::Frame`]) and every user's noise vector. Hybrid and
    /// single-user runs therefore see the same channel, data and noise.
    pub fn simulate_frame(
        &self,
        config: &SimConfig,
        frame: u64,
        noise: &NoiseModel,
        active: Active,
    ) -> Result<FrameTally> {
        let users = self.topology.user_count();
        let dim = self.basis.dim();
        let mut rng = stream(config.seed, frame);
        let payloads = (0..users)
            .map(|_| BitFrame::random(&mut rng, config.bits_per_frame))
            .collect::<Result<Vec<_>>>()?;

        let power = match active {
            Active::All => self.power.clone(),
            Active::Only(k) => self.power.single_active(k),
        };
        let receivers: Vec<usize> = match active {
            Active::All => (0..users).collect(),
            Active::Only(k) => vec![k],
        };

        let sd = noise.std_dev();
        let mut tally = FrameTally::zero(users);
        let mut symbols = vec![ConstellationPoint::new(Complex::new(0.0, 0.0)); users];
        let mut noise_block = vec![Complex::new(0.0, 0.0); users * dim];
        let mut state = None;
        for b in 0..payloads[0].symbol_count() {
            if state.is_none() || config.coherence == Coherence::Block {
                let fading = draw_fading(&mut rng, users);
                state = Some(self.block_state(config, &fading, active)?);
            }
            let (channels, plans) = state.as_ref().expect("fading drawn");
            for z in noise_block.iter_mut() {
                *z = standard_complex_normal(&mut rng) * sd;
            }
            for (s, p) in symbols.iter_mut().zip(&payloads) {
                *s = p.symbol(b);
            }
            let x = assemble_transmit(&symbols, &power, &self.groups, &self.basis)?;
            tally.transmit_energy += x.iter().map(|c| c.norm_sqr()).sum::<f64>();
            tally.blocks += 1;
            for &k in &receivers {
                let h = &channels[k];
                let mut y = h.apply(&x)?;
                for (yi, zi) in y.iter_mut().zip(&noise_block[k * dim..(k + 1) * dim]) {
                    *yi += zi;
                }
                let projected = ProjectedSignal {
                    value: project(&y, &self.basis, self.groups.group_of(k))?,
                    effective_channel: h.scale(),
                };
                let decision = sic_decode(&projected, &plans[k], &power);
                tally.errors[k] += payloads[k].errors_at(b, bits_of(decision.own)) as u64;
                tally.bits[k] += 2;
            }
        }
        Ok(tally)
    }

    /// All frames at one noise level, reduced in frame order.
    pub fn simulate_frames(
        &self,
        config: &SimConfig,
        noise: &NoiseModel,
        active: Active,
    ) -> Result<FrameTally> {
        let tallies = (0..config.frames)
            .into_par_iter()
            .map(|f| self.simulate_frame(config, f, noise, active))
            .collect::<Result<Vec<_>>>()?;
        let mut total = FrameTally::zero(self.topology.user_count());
        for t in &tallies {
            total.merge(t);
        }
        Ok(total)
    }
}

fn ber_row(snr_db: f64, entity: Entity, metric: Metric, errors: u64, bits: u64) -> Row {
    let p = if bits == 0 {
        0.0
    } else {
        errors as f64 / bits as f64
    };
    let stderr = if bits == 0 {
        0.0
    } else {
        (p * (1.0 - p) / bits as f64).sqrt()
    };
    Row {
        snr_db,
        entity,
        metric,
        value: p,
        samples: bits,
        stderr,
    }
}

/// Per-user and aggregate BER of the hybrid scheme at every SNR point.
pub fn run_ber_experiment(config: &SimConfig) -> Result<ExperimentResult> {
    let cell = Cell::new(config)?;
    let mut result = ExperimentResult::new();
    for &snr_db in &config.snr_grid {
        let noise = NoiseModel::from_transmit_snr_db(config.total_power, snr_db)?;
        let tally = cell.simulate_frames(config, &noise, Active::All)?;
        for k in 0..cell.topology.user_count() {
            result.push(ber_row(
                snr_db,
                Entity::User(k),
                Metric::Ber,
                tally.errors[k],
                tally.bits[k],
            ));
        }
        result.push(ber_row(
            snr_db,
            Entity::Total,
            Metric::Ber,
            tally.errors.iter().sum(),
            tally.bits.iter().sum(),
        ));
    }
    Ok(result)
}

/// Each user alone in the cell. BER keeps the user's hybrid power share;
/// the rate variant gives it the whole budget.
pub fn run_single_user_experiment(config: &SimConfig) -> Result<ExperimentResult> {
    if config.experiment == Experiment::RateSingleUser {
        return run_rates(config, RateOutput::SingleUser);
    }
    let cell = Cell::new(config)?;
    let mut result = ExperimentResult::new();
    for &snr_db in &config.snr_grid {
        let noise = NoiseModel::from_transmit_snr_db(config.total_power, snr_db)?;
        for k in 0..cell.topology.user_count() {
            let tally = cell.simulate_frames(config, &noise, Active::Only(k))?;
            result.push(ber_row(
                snr_db,
                Entity::User(k),
                Metric::BerSingleUser,
                tally.errors[k],
                tally.bits[k],
            ));
        }
    }
    Ok(result)
}

/// Fading-averaged hybrid, single-user and TDMA rates and their ratio.
pub fn run_rate_experiment(config: &SimConfig) -> Result<ExperimentResult> {
    let output = if config.experiment == Experiment::Ratio {
        RateOutput::Ratio
    } else {
        RateOutput::Full
    };
    run_rates(config, output)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RateOutput {
    Full,
    Ratio,
    SingleUser,
}

struct RateSample {
    hybrid: Vec<f64>,
    single: Vec<f64>,
    hybrid_sum: f64,
    tdma_sum: f64,
}

fn mean_and_stderr(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count() as f64;
    let mean = values.clone().sum::<f64>() / n;
    if n < 2.0 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn run_rates(config: &SimConfig, output: RateOutput) -> Result<ExperimentResult> {
    let cell = Cell::new(config)?;
    let users = cell.topology.user_count();
    let n = config.rate_realizations;
    let mut result = ExperimentResult::new();
    for &snr_db in &config.snr_grid {
        let noise = NoiseModel::from_transmit_snr_db(config.total_power, snr_db)?;
        let samples = (0..n)
            .into_par_iter()
            .map(|r| {
                let fading = draw_fading(&mut stream(config.seed, r), users);
                let link = LinkState {
                    topology: &cell.topology,
                    fading: &fading,
                    power: &cell.power,
                    groups: &cell.groups,
                    basis: &cell.basis,
                    noise: &noise,
                };
                let order = block_order(&cell.topology, &fading, config.order_mode);
                let hybrid = link.hybrid_rates(&order, snr_db)?;
                let single = link.single_user_rates(snr_db)?;
                let tdma = link.tdma_rates(snr_db)?;
                Ok(RateSample {
                    hybrid_sum: hybrid.sum,
                    tdma_sum: tdma.sum,
                    hybrid: hybrid.per_user,
                    single: single.per_user,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let row = |entity, metric, (value, stderr): (f64, f64)| Row {
            snr_db,
            entity,
            metric,
            value,
            samples: n,
            stderr,
        };
        if output != RateOutput::Ratio {
            for k in 0..users {
                if output == RateOutput::Full {
                    let stats = mean_and_stderr(samples.iter().map(|s| s.hybrid[k]));
                    result.push(row(Entity::User(k), Metric::Rate, stats));
                }
                let stats = mean_and_stderr(samples.iter().map(|s| s.single[k]));
                result.push(row(Entity::User(k), Metric::RateSingleUser, stats));
            }
        }
        if output != RateOutput::SingleUser {
            let hybrid = mean_and_stderr(samples.iter().map(|s| s.hybrid_sum));
            let tdma = mean_and_stderr(samples.iter().map(|s| s.tdma_sum));
            let ratio = rate_ratio(hybrid.0, tdma.0)?;
            result.push(row(Entity::Sum, Metric::Rate, hybrid));
            result.push(row(Entity::Sum, Metric::RateTdma, tdma));
            result.push(row(
                Entity::Sum,
                Metric::RateRatio,
                (ratio, ratio_stderr(&samples, hybrid.0, tdma.0)),
            ));
        }
    }
    Ok(result)
}

/// Delta-method standard error of `mean(hybrid) / mean(tdma)`.
fn ratio_stderr(samples: &[RateSample], mean_h: f64, mean_t: f64) -> f64 {
    let n = samples.len() as f64;
    if n < 2.0 {
        return 0.0;
    }
    let r = mean_h / mean_t;
    let var = samples
        .iter()
        .map(|s| (s.hybrid_sum - r * s.tdma_sum).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    (var / n).sqrt() / mean_t
}

/// Runs whatever `config.experiment` names.
pub fn run_experiment(config: &SimConfig) -> Result<ExperimentResult> {
    match config.experiment {
        Experiment::Ber => run_ber_experiment(config),
        Experiment::BerSingleUser | Experiment::RateSingleUser => {
            run_single_user_experiment(config)
        }
        Experiment::Rate | Experiment::Ratio => run_rate_experiment(config),
    }
}

/// Like [`run_experiment`], on a dedicated pool of `threads` workers when
/// given.
pub fn run_with_threads(config: &SimConfig, threads: Option<usize>) -> Result<ExperimentResult> {
    match threads {
        None => run_experiment(config),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("failed to build worker pool");
            pool.install(|| run_experiment(config))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::RawConfig;

    fn small(experiment: Experiment) -> SimConfig {
        let mut raw = RawConfig {
            experiment,
            ..RawConfig::default()
        };
        raw.simulation.frames = 8;
        raw.simulation.bits_per_frame = 64;
        raw.simulation.rate_realizations = 50;
        raw.simulation.snr_grid = crate::harness::config::SnrGridSpec::List(vec![10.0, 30.0]);
        raw.validate().unwrap()
    }

    #[test]
    fn noiseless_ber_is_zero() {
        let mut config = small(Experiment::Ber);
        config.snr_grid = vec![200.0];
        let result = run_ber_experiment(&config).unwrap();
        assert_eq!(result.rows().len(), 6);
        for row in result.rows() {
            assert_eq!(row.value, 0.0, "{row:?}");
            assert_eq!(row.stderr, 0.0);
        }
        assert_eq!(
            result
                .get(200.0, Entity::User(0), Metric::Ber)
                .unwrap()
                .samples,
            8 * 64
        );
    }

    #[test]
    fn frame_energy_matches_budget() {
        let mut config = small(Experiment::Ber);
        config.bits_per_frame = 6144;
        let cell = Cell::new(&config).unwrap();
        let noise = NoiseModel::new(1.0).unwrap();
        config.frames = 8;
        let tally = cell.simulate_frames(&config, &noise, Active::All).unwrap();
        assert_eq!(tally.blocks, 8 * 3072);
        let mean = tally.mean_transmit_energy();
        assert!((mean / 40.0 - 1.0).abs() < 0.01, "mean |x|^2 = {mean}");
    }

    #[test]
    fn frames_are_reproducible() {
        let config = small(Experiment::Ber);
        let cell = Cell::new(&config).unwrap();
        let noise = NoiseModel::new(0.01).unwrap();
        let a = cell
            .simulate_frame(&config, 5, &noise, Active::All)
            .unwrap();
        let b = cell
            .simulate_frame(&config, 5, &noise, Active::All)
            .unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn experiment_shapes() {
        let r = run_experiment(&small(Experiment::Rate)).unwrap();
        // per SNR: 5 users x 2 metrics + 3 sum rows
        assert_eq!(r.rows().len(), 2 * 13);
        let r = run_experiment(&small(Experiment::Ratio)).unwrap();
        assert_eq!(r.rows().len(), 2 * 3);
        let r = run_experiment(&small(Experiment::RateSingleUser)).unwrap();
        assert_eq!(r.rows().len(), 2 * 5);
        assert!(r
            .rows()
            .iter()
            .all(|row| row.metric == Metric::RateSingleUser));
        let r = run_experiment(&small(Experiment::BerSingleUser)).unwrap();
        assert_eq!(r.rows().len(), 2 * 5);
        for row in r.rows() {
            assert!((0.0..=1.0).contains(&row.value));
        }
    }

    #[test]
    fn distance_order_is_static() {
        let topo = Topology::reference();
        let fading = FadingRealization::new(vec![
            Complex::new(0.01, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(3.0, 0.0),
        ]);
        assert_eq!(
            block_order(&topo, &fading, OrderMode::Distance),
            vec![0, 1, 2, 3, 4]
        );
        assert_eq!(
            block_order(&topo, &fading, OrderMode::Instantaneous),
            vec![1, 4, 2, 3, 0]
        );
    }

    #[test]
    fn stderr_helpers() {
        let (m, s) = mean_and_stderr([1.0, 3.0].into_iter());
        assert_eq!(m, 2.0);
        assert!((s - 1.0).abs() < 1e-12);
        let row = ber_row(0.0, Entity::Total, Metric::Ber, 25, 100);
        assert!((row.stderr - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
    }
}
