//! AWGN channel, LP and ML decoders, and frame-error simulation.
//!
//! Bits map to `0 -> +1`, `1 -> -1`; the log-likelihood ratios are
//! `gamma = (2 / sigma^2) r`. LP decoding minimizes `gamma . x` over the
//! fundamental polytope. With the all-zeros word sent, it succeeds exactly
//! when `r` lies in the dual of the fundamental cone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::codes::{for_each_codeword, ParityCheckMatrix};
use crate::error::{Error, Result};
use crate::linprog::{self, Direction, FloatSliceSolver, LpProblem, LpStatus, Mode};
use crate::polytope::{ConstraintSystem, SystemKind, DEFAULT_TOLERANCE};
use crate::report::{ser_sig6, ser_sig6_vec};

/// Distance from an integer below which an LP coordinate counts as integral.
pub const INTEGRALITY_TOLERANCE: f64 = 1e-7;
/// Largest code dimension for which simulations also run the ML decoder.
pub const ML_SIMULATION_MAX_DIMENSION: usize = 20;
/// Frames that share one warm-started LP solver during simulation.
const FRAME_CHUNK: usize = 64;
/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959964;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LlrVector {
    #[serde(serialize_with = "ser_sig6_vec")]
    gamma: Vec<f64>,
    #[serde(serialize_with = "ser_sig6")]
    sigma: f64,
    #[serde(serialize_with = "ser_sig6_vec")]
    received: Vec<f64>,
}

impl LlrVector {
    pub fn from_received(received: Vec<f64>, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
        }
        if received.iter().any(|r| !r.is_finite()) {
            return Err(Error::InvalidArgument("received values must be finite".into()));
        }
        let scale = 2.0 / (sigma * sigma);
        Ok(LlrVector {
            gamma: received.iter().map(|r| scale * r).collect(),
            sigma,
            received,
        })
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn received(&self) -> &[f64] {
        &self.received
    }
}

/// BPSK modulation plus i.i.d. Gaussian noise drawn from `rng`.
pub fn awgn_transmit_with<R: Rng>(y: &[u8], sigma: f64, rng: &mut R) -> Result<LlrVector> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    if let Some(&b) = y.iter().find(|&&b| b > 1) {
        return Err(Error::InvalidArgument(format!("bit value {b} is not 0 or 1")));
    }
    let received = y
        .iter()
        .map(|&b| {
            let z: f64 = rng.sample(StandardNormal);
            1.0 - 2.0 * b as f64 + sigma * z
        })
        .collect();
    LlrVector::from_received(received, sigma)
}

/// [`awgn_transmit_with`] using a ChaCha8 stream seeded with `seed`. The
/// caller is responsible for `y` being a codeword.
pub fn awgn_transmit(y: &[u8], sigma: f64, seed: u64) -> Result<LlrVector> {
    awgn_transmit_with(y, sigma, &mut ChaCha8Rng::seed_from_u64(seed))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DecodeStatus {
    Codeword,
    Pseudo,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecodeOutcome {
    pub status: DecodeStatus,
    #[serde(serialize_with = "ser_sig6_vec")]
    pub point: Vec<f64>,
    #[serde(serialize_with = "ser_sig6")]
    pub cost: f64,
    pub ml_agrees: Option<bool>,
}

impl DecodeOutcome {
    /// The hard decision when the optimum is integral.
    pub fn codeword(&self) -> Option<Vec<u8>> {
        (self.status == DecodeStatus::Codeword).then(|| self.point.iter().map(|&v| (v > 0.5) as u8).collect())
    }

    /// Decoding succeeded for the all-zeros transmission.
    pub fn is_zero_codeword(&self) -> bool {
        self.codeword().is_some_and(|c| c.iter().all(|&b| b == 0))
    }
}

/// Minimizes `gamma . x` over the fundamental polytope in float arithmetic.
pub fn lp_decode(polytope: &ConstraintSystem, gamma: &[f64]) -> Result<DecodeOutcome> {
    lp_decode_with(polytope, gamma, Mode::Float)
}

pub fn lp_decode_with(polytope: &ConstraintSystem, gamma: &[f64], mode: Mode) -> Result<DecodeOutcome> {
    if polytope.kind() != SystemKind::Polytope {
        return Err(Error::InvalidArgument("expected a polytope system".into()));
    }
    let lp = LpProblem::new(polytope, gamma.to_vec(), Direction::Minimize);
    let res = linprog::solve(&lp, mode)?;
    if res.status != LpStatus::Optimal {
        return Err(Error::Numerical(format!("LP decoder status {:?}", res.status)));
    }
    let (status, point) = match &res.exact_point {
        Some(exact) => {
            let integral = exact.iter().all(|v| v.is_integer());
            let point = res.point.clone().expect("optimal");
            (integral, point)
        }
        None => {
            let point = res.point.clone().expect("optimal");
            let integral = point.iter().all(|v| (v - v.round()).abs() <= INTEGRALITY_TOLERANCE);
            if integral {
                let rounded: Vec<f64> = point.iter().map(|v| v.round()).collect();
                let inside = polytope.contains_f64(&rounded, DEFAULT_TOLERANCE)?;
                (inside, if inside { rounded } else { point })
            } else {
                (false, point)
            }
        }
    };
    Ok(DecodeOutcome {
        status: if status {
            DecodeStatus::Codeword
        } else {
            DecodeStatus::Pseudo
        },
        cost: point.iter().zip(gamma).map(|(x, g)| x * g).sum(),
        point,
        ml_agrees: None,
    })
}

/// True iff `r . x >= 0` on the whole cone, up to a relative tolerance.
pub fn cone_decode_success(cone: &ConstraintSystem, r: &[f64]) -> Result<bool> {
    linprog::is_nonnegative_over_cone(cone, r, DEFAULT_TOLERANCE)
}

/// Brute-force maximum-likelihood decoder over a precomputed codebook.
#[derive(Clone, Debug)]
pub struct MlDecoder {
    n: usize,
    /// Supports of all codewords, sorted lexicographically by 0/1 word.
    supports: Vec<Vec<usize>>,
}

impl MlDecoder {
    pub fn new(h: &ParityCheckMatrix, max_dimension: usize) -> Result<Self> {
        let n = h.cols();
        let mut words = Vec::new();
        for_each_codeword(h, max_dimension, |w| {
            words.push((0..n).map(|i| w.get(i) as u8).collect::<Vec<u8>>())
        })?;
        words.sort();
        let supports = words.iter().map(|w| (0..n).filter(|&i| w[i] == 1).collect()).collect();
        Ok(MlDecoder { n, supports })
    }

    pub fn len(&self) -> usize {
        self.supports.len()
    }

    pub fn is_empty(&self) -> bool {
        self.supports.is_empty()
    }

    /// Codeword of least cost; ties go to the lexicographically smallest.
    pub fn decode(&self, gamma: &[f64]) -> Result<Vec<u8>> {
        if gamma.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: gamma.len(),
            });
        }
        let mut best = (f64::INFINITY, 0);
        for (idx, s) in self.supports.iter().enumerate() {
            let cost: f64 = s.iter().map(|&i| gamma[i]).sum();
            if cost < best.0 {
                best = (cost, idx);
            }
        }
        let mut word = vec![0u8; self.n];
        for &i in &self.supports[best.1] {
            word[i] = 1;
        }
        Ok(word)
    }
}

pub fn ml_decode(h: &ParityCheckMatrix, gamma: &[f64]) -> Result<Vec<u8>> {
    MlDecoder::new(h, crate::codes::DEFAULT_MAX_DIMENSION)?.decode(gamma)
}

/// Wilson score interval for `errors` out of `frames` at 95% confidence.
pub fn wilson_interval(errors: u64, frames: u64) -> (f64, f64) {
    if frames == 0 {
        return (0.0, 1.0);
    }
    let n = frames as f64;
    let p = errors as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FerRow {
    #[serde(serialize_with = "ser_sig6")]
    pub sigma: f64,
    #[serde(serialize_with = "ser_sig6")]
    pub ebn0_db: f64,
    pub frames: u64,
    pub lp_errors: u64,
    pub ml_errors: Option<u64>,
    #[serde(serialize_with = "ser_sig6")]
    pub lp_fer: f64,
    #[serde(serialize_with = "ser_sig6_vec")]
    pub lp_ci95: Vec<f64>,
    #[serde(
        skip_serializing_if = "Option::is_none",
        serialize_with = "crate::report::ser_sig6_opt"
    )]
    pub ml_fer: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ml_ci95: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FerTable {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub rows: Vec<FerRow>,
}

impl FerTable {
    pub const CSV_HEADER: &'static str = "sigma,ebn0_db,frames,lp_errors,ml_errors";

    pub fn to_csv(&self) -> String {
        let mut out = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                crate::report::sig6(r.sigma),
                crate::report::sig6(r.ebn0_db),
                r.frames,
                r.lp_errors,
                r.ml_errors.map(|e| e.to_string()).unwrap_or_default()
            ));
        }
        out
    }
}

/// Per-frame decisions from one shared noise realization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FrameResult {
    pub lp_error: bool,
    pub ml_error: Option<bool>,
}

/// Standard normal noise of frame `frame`: stream `frame` of the seed.
pub fn frame_noise(seed: u64, frame: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(frame);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Decodes `frames` all-zeros transmissions at one noise level. Frame `f`
/// uses [`frame_noise`]`(seed, f)`, scaled by `sigma`.
pub fn simulate_frames(
    cone: &ConstraintSystem,
    ml: Option<&MlDecoder>,
    sigma: f64,
    frames: u64,
    seed: u64,
) -> Result<Vec<FrameResult>> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
    }
    let n = cone.dim();
    let starts: Vec<u64> = (0..frames).step_by(FRAME_CHUNK).collect();
    let chunks: Vec<Vec<FrameResult>> = starts
        .par_iter()
        .map(|&start| {
            let mut solver = FloatSliceSolver::new(cone)?;
            (start..(start + FRAME_CHUNK as u64).min(frames))
                .map(|f| {
                    let r: Vec<f64> = frame_noise(seed, f, n).iter().map(|z| 1.0 + sigma * z).collect();
                    let res = solver.solve(&r, Direction::Minimize)?;
                    let scale = r.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
                    let lp_error = match res.status {
                        LpStatus::Infeasible => false,
                        LpStatus::Unbounded => true,
                        LpStatus::Optimal => res.optimum.expect("optimal") < -DEFAULT_TOLERANCE * scale,
                    };
                    let ml_error = match ml {
                        Some(d) => Some(d.decode(&r)?.contains(&1)),
                        None => None,
                    };
                    Ok(FrameResult { lp_error, ml_error })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(chunks.concat())
}

/// Frame error rates of LP decoding (and ML decoding when the code is
/// small) over a list of noise levels, transmitting the all-zeros word.
pub fn simulate_fer(h: &ParityCheckMatrix, sigmas: &[f64], frames: u64, seed: u64) -> Result<FerTable> {
    if frames == 0 {
        return Err(Error::InvalidArgument("frames must be at least 1".into()));
    }
    let cone = crate::polytope::fundamental_cone(h);
    let k = h.dimension();
    let ml = if k <= ML_SIMULATION_MAX_DIMENSION {
        Some(MlDecoder::new(h, ML_SIMULATION_MAX_DIMENSION)?)
    } else {
        None
    };
    let rate = k as f64 / h.cols() as f64;
    let mut rows = Vec::with_capacity(sigmas.len());
    for &sigma in sigmas {
        let results = simulate_frames(&cone, ml.as_ref(), sigma, frames, seed)?;
        let lp_errors = results.iter().filter(|r| r.lp_error).count() as u64;
        let ml_errors = ml
            .as_ref()
            .map(|_| results.iter().filter(|r| r.ml_error == Some(true)).count() as u64);
        let ci = |e: u64| {
            let (lo, hi) = wilson_interval(e, frames);
            vec![lo, hi]
        };
        rows.push(FerRow {
            sigma,
            ebn0_db: ebn0_db(sigma, rate),
            frames,
            lp_errors,
            ml_errors,
            lp_fer: lp_errors as f64 / frames as f64,
            lp_ci95: ci(lp_errors),
            ml_fer: ml_errors.map(|e| e as f64 / frames as f64),
            ml_ci95: ml_errors.map(ci),
        });
    }
    Ok(FerTable {
        n: h.cols(),
        k,
        seed,
        rows,
    })
}

/// `Eb/N0` in dB for unit-energy BPSK at code rate `rate`.
pub fn ebn0_db(sigma: f64, rate: f64) -> f64 {
    10.0 * (1.0 / (2.0 * rate * sigma * sigma)).log10()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{codewords, hamming_code};
    use crate::polytope::{fundamental_cone, fundamental_polytope};

    #[test]
    fn llr_formula() {
        let l = LlrVector::from_received(vec![0.5, -1.0], 1.0).unwrap();
        assert_eq!(l.gamma(), &[1.0, -2.0]);
        let l = LlrVector::from_received(vec![0.5], 0.5).unwrap();
        assert_eq!(l.gamma(), &[4.0]);
        assert!(LlrVector::from_received(vec![0.5], 0.0).is_err());
        assert!(LlrVector::from_received(vec![0.5], -1.0).is_err());
    }

    #[test]
    fn transmit_is_deterministic_and_near_noiseless() {
        let y = [0u8, 1, 0, 1, 1, 0, 0];
        assert_eq!(awgn_transmit(&y, 0.7, 3).unwrap(), awgn_transmit(&y, 0.7, 3).unwrap());
        assert_ne!(awgn_transmit(&y, 0.7, 3).unwrap(), awgn_transmit(&y, 0.7, 4).unwrap());
        let l = awgn_transmit(&y, 1e-6, 1).unwrap();
        for (r, &b) in l.received().iter().zip(&y) {
            assert!((r - (1.0 - 2.0 * b as f64)).abs() < 1e-4);
        }
        assert!(awgn_transmit(&[0, 2], 1.0, 0).is_err());
    }

    #[test]
    fn lp_decode_noiseless() {
        let h = hamming_code(3).unwrap();
        let p = fundamental_polytope(&h).unwrap();
        let out = lp_decode(&p, &[2.0; 7]).unwrap();
        assert_eq!(out.status, DecodeStatus::Codeword);
        assert!(out.is_zero_codeword());

        let c = [1u8, 1, 1, 0, 0, 0, 0];
        assert!(h.is_codeword(&c));
        let gamma: Vec<f64> = c.iter().map(|&b| 2.0 * (1.0 - 2.0 * b as f64)).collect();
        for mode in [Mode::Float, Mode::Exact] {
            let out = lp_decode_with(&p, &gamma, mode).unwrap();
            assert_eq!(out.codeword().unwrap(), c.to_vec());
            let best = codewords(&h, 10)
                .unwrap()
                .iter()
                .map(|w| w.iter().zip(&gamma).map(|(&b, g)| b as f64 * g).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            assert!((out.cost - best).abs() < 1e-9);
        }
    }

    #[test]
    fn ml_examples() {
        let h = hamming_code(3).unwrap();
        assert_eq!(ml_decode(&h, &[1.0; 7]).unwrap(), vec![0; 7]);
        assert_eq!(
            ml_decode(&h, &[-1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0]).unwrap(),
            vec![1, 1, 1, 0, 0, 0, 0]
        );
        // All costs zero: every codeword ties, the zero word is smallest.
        assert_eq!(ml_decode(&h, &[0.0; 7]).unwrap(), vec![0; 7]);
        assert!(ml_decode(&h, &[0.0; 6]).is_err());
    }

    #[test]
    fn cone_success_examples() {
        let k = fundamental_cone(&hamming_code(3).unwrap());
        assert!(cone_decode_success(&k, &[1.0; 7]).unwrap());
        assert!(!cone_decode_success(&k, &[-1.0; 7]).unwrap());
    }

    #[test]
    fn wilson_matches_reference_values() {
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - 0.036994).abs() < 1e-5);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo - 0.403832).abs() < 1e-5 && (hi - 0.596168).abs() < 1e-5);
    }

    #[test]
    fn ebn0_conversion() {
        // R = 1/2, sigma = 1 gives Eb/N0 = 1 (0 dB).
        assert!(ebn0_db(1.0, 0.5).abs() < 1e-12);
        assert!((ebn0_db(0.5, 0.5) - 6.0206).abs() < 1e-4);
    }

    #[test]
    fn simulation_dominance_and_determinism() {
        let h = hamming_code(3).unwrap();
        let t = simulate_fer(&h, &[0.3, 0.8, 1.2], 300, 11).unwrap();
        assert_eq!(t, simulate_fer(&h, &[0.3, 0.8, 1.2], 300, 11).unwrap());
        for r in &t.rows {
            assert!(r.lp_errors >= r.ml_errors.unwrap());
        }
        assert_eq!(t.rows[0].lp_errors, 0);
        assert!(t.rows[2].lp_errors > 0);
        assert!(t.to_csv().starts_with("sigma,ebn0_db,frames,lp_errors,ml_errors\n"));
        assert!(simulate_fer(&h, &[0.5], 0, 1).is_err());
    }
}
