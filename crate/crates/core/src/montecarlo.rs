//! Monte Carlo estimates of the expected signature of planar Brownian motion
//! started at `z` and stopped on leaving the unit disk.
//!
//! Path `i` is driven by a ChaCha8 stream keyed by `(seed, i)`, so each path is
//! reproducible on its own. Paths are grouped in fixed-size chunks whose
//! accumulators are merged in chunk order, which makes results independent
//! of the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::tensor::word_string;

/// Largest truncation level accepted.
pub const MAX_LEVEL: usize = 8;

const CHUNK: u64 = 512;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub start: [f64; 2],
    /// Time step; each increment is `N(0, h·I₂)`.
    pub h: f64,
    /// Truncation level `N`.
    pub level: usize,
    pub paths: u64,
    pub seed: u64,
    /// Also stop a step with the Brownian-bridge probability of having crossed
    /// the tangent line to the circle during it.
    pub bridge_correction: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            start: [0.0, 0.0],
            h: 1e-4,
            level: 2,
            paths: 100_000,
            seed: 20_240_917,
            bridge_correction: true,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let [x, y] = self.start;
        if !(x.is_finite() && y.is_finite()) || x * x + y * y >= 1.0 {
            return Err(Error::InvalidArgument(format!("start ({x}, {y}) must lie in the open unit disk")));
        }
        if !(self.h.is_finite() && self.h > 0.0) {
            return Err(Error::InvalidArgument(format!("step h = {} must be positive", self.h)));
        }
        if self.level == 0 || self.level > MAX_LEVEL {
            return Err(Error::InvalidArgument(format!(
                "level N = {} must lie in 1..={MAX_LEVEL}",
                self.level
            )));
        }
        if self.paths == 0 {
            return Err(Error::InvalidArgument("paths must be at least 1".into()));
        }
        Ok(())
    }
}

fn path_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Runs one stopped walk, calling `step` with each increment. Returns the
/// number of steps taken.
fn walk(config: &SimConfig, index: u64, mut step: impl FnMut([f64; 2])) -> u64 {
    let mut rng = path_rng(config.seed, index);
    let sd = config.h.sqrt();
    let [mut x, mut y] = config.start;
    let mut r = (x * x + y * y).sqrt();
    // exp(−40) is far below the resolution of a uniform draw.
    let cutoff = 20.0 * config.h;
    let mut n = 0u64;
    loop {
        let dx: f64 = rng.sample::<f64, _>(StandardNormal) * sd;
        let dy: f64 = rng.sample::<f64, _>(StandardNormal) * sd;
        let (nx, ny) = (x + dx, y + dy);
        let nr = (nx * nx + ny * ny).sqrt();
        n += 1;
        let exited = nr >= 1.0
            || (config.bridge_correction && {
                let gap = (1.0 - r) * (1.0 - nr);
                gap < cutoff && rng.random::<f64>() < (-2.0 * gap / config.h).exp()
            });
        if exited {
            step([nx / nr - x, ny / nr - y]);
            return n;
        }
        step([dx, dy]);
        x = nx;
        y = ny;
        r = nr;
    }
}

/// A walk stopped on the unit circle.
#[derive(Clone, Debug, PartialEq)]
pub struct StoppedPath {
    pub increments: Vec<[f64; 2]>,
    /// `steps · h`.
    pub exit_time: f64,
}

impl StoppedPath {
    pub fn end_point(&self, start: [f64; 2]) -> [f64; 2] {
        self.increments
            .iter()
            .fold(start, |[x, y], [dx, dy]| [x + dx, y + dy])
    }
}

/// Increments of path `index`; the last one lands exactly on the circle
/// (radial projection of the first step found outside).
pub fn simulate_stopped_path(config: &SimConfig, index: u64) -> Result<StoppedPath> {
    config.validate()?;
    let mut increments = Vec::new();
    let steps = walk(config, index, |d| increments.push(d));
    Ok(StoppedPath {
        increments,
        exit_time: steps as f64 * config.h,
    })
}

/// Truncated tensor-algebra element over `ℝ²`, levels `0..=N` stored flat:
/// level `n` occupies `[2ⁿ − 1, 2ⁿ⁺¹ − 1)`, words indexed as in
/// [`crate::exact::tensor`] (first letter most significant, letter 1 ↦ bit 0).
#[derive(Clone, Debug, PartialEq)]
pub struct Signature {
    level: usize,
    data: Vec<f64>,
}

fn offset(n: usize) -> usize {
    (1 << n) - 1
}

impl Signature {
    pub fn identity(level: usize) -> Self {
        let mut data = vec![0.0; offset(level + 1)];
        data[0] = 1.0;
        Self { level, data }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Components of level `n`.
    pub fn level_slice(&self, n: usize) -> &[f64] {
        &self.data[offset(n)..offset(n + 1)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// `exp_N(Δ)`: level `k` is `Δ^{⊗k}/k!`.
    pub fn segment(delta: [f64; 2], level: usize) -> Self {
        let mut s = Self::identity(level);
        for k in 1..=level {
            let (lower, upper) = s.data.split_at_mut(offset(k));
            let prev = &lower[offset(k - 1)..];
            let cur = &mut upper[..1 << k];
            let inv_k = 1.0 / k as f64;
            for (i, p) in prev.iter().enumerate() {
                cur[i << 1] = p * delta[0] * inv_k;
                cur[(i << 1) | 1] = p * delta[1] * inv_k;
            }
        }
        s
    }

    /// Chen product `self ⊗ other`, truncated at the common level.
    pub fn chen(&self, other: &Self) -> Self {
        assert_eq!(self.level, other.level, "levels differ");
        let mut out = Self::identity(self.level);
        for n in 1..=self.level {
            let dst = &mut out.data[offset(n)..offset(n + 1)];
            dst.iter_mut().for_each(|v| *v = 0.0);
            for k in 0..=n {
                let a = &self.data[offset(n - k)..offset(n - k + 1)];
                let b = &other.data[offset(k)..offset(k + 1)];
                for (i, av) in a.iter().enumerate() {
                    if *av == 0.0 {
                        continue;
                    }
                    let base = i << k;
                    for (j, bv) in b.iter().enumerate() {
                        dst[base | j] += av * bv;
                    }
                }
            }
        }
        out
    }

    /// In-place `self ← self ⊗ exp_N(Δ)`, using Horner's scheme per level:
    /// `Σ_k S_{n−k} Δ^k/k! = ((S₀Δ/n + S₁)Δ/(n−1) + …)Δ/1 + S_n`.
    pub fn extend(&mut self, delta: [f64; 2]) {
        let mut acc = [0.0f64; 1 << MAX_LEVEL];
        let mut next = [0.0f64; 1 << MAX_LEVEL];
        for n in (1..=self.level).rev() {
            acc[0] = self.data[0];
            for m in 1..=n {
                let f = 1.0 / (n - m + 1) as f64;
                let base = offset(m);
                let add = m < n;
                for i in 0..1usize << (m - 1) {
                    let t = acc[i] * f;
                    let (j0, j1) = (i << 1, (i << 1) | 1);
                    next[j0] = t * delta[0] + if add { self.data[base + j0] } else { 0.0 };
                    next[j1] = t * delta[1] + if add { self.data[base + j1] } else { 0.0 };
                }
                std::mem::swap(&mut acc, &mut next);
            }
            for (d, a) in self.data[offset(n)..offset(n + 1)].iter_mut().zip(&acc) {
                *d += a;
            }
        }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Signature of the piecewise-linear path with the given increments.
pub fn signature_of_path(increments: &[[f64; 2]], level: usize) -> Signature {
    let mut s = Signature::identity(level);
    for &d in increments {
        s.extend(d);
    }
    s
}

/// `s ← s ⊗ exp₂(d)` on the flat level-≤2 layout.
fn extend_level2(s: &mut [f64; 7], d: [f64; 2]) {
    let (a, b) = (d[0], d[1]);
    let (s1, s2) = (s[1], s[2]);
    s[3] += s1 * a + 0.5 * a * a;
    s[4] += s1 * b + 0.5 * a * b;
    s[5] += s2 * a + 0.5 * b * a;
    s[6] += s2 * b + 0.5 * b * b;
    s[1] += a;
    s[2] += b;
}

/// Welford running means and second moments of every signature component
/// and of the exit time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigAccumulator {
    pub level: usize,
    pub count: u64,
    mean: Vec<f64>,
    m2: Vec<f64>,
    time_mean: f64,
    time_m2: f64,
}

impl SigAccumulator {
    pub fn new(level: usize) -> Self {
        let len = offset(level + 1);
        Self {
            level,
            count: 0,
            mean: vec![0.0; len],
            m2: vec![0.0; len],
            time_mean: 0.0,
            time_m2: 0.0,
        }
    }

    pub fn push(&mut self, sig: &[f64], exit_time: f64) {
        self.count += 1;
        let n = self.count as f64;
        for ((m, q), &x) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(sig) {
            let delta = x - *m;
            *m += delta / n;
            *q += delta * (x - *m);
        }
        let delta = exit_time - self.time_mean;
        self.time_mean += delta / n;
        self.time_m2 += delta * (exit_time - self.time_mean);
    }

    /// Combines two accumulators (Chan et al. pairwise update).
    pub fn merge(&mut self, other: &Self) {
        assert_eq!(self.level, other.level, "levels differ");
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = other.clone();
            return;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let combine = |ma: &mut f64, qa: &mut f64, mb: f64, qb: f64| {
            let delta = mb - *ma;
            *ma += delta * nb / n;
            *qa += qb + delta * delta * na * nb / n;
        };
        for i in 0..self.mean.len() {
            combine(&mut self.mean[i], &mut self.m2[i], other.mean[i], other.m2[i]);
        }
        combine(&mut self.time_mean, &mut self.time_m2, other.time_mean, other.time_m2);
        self.count += other.count;
    }

    fn stderr(&self, m2: f64) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        let n = self.count as f64;
        (m2 / (n - 1.0) / n).sqrt()
    }

    pub fn mean(&self, n: usize, word: usize) -> f64 {
        self.mean[offset(n) + word]
    }

    pub fn std_error(&self, n: usize, word: usize) -> f64 {
        self.stderr(self.m2[offset(n) + word])
    }

    pub fn exit_time(&self) -> Estimate {
        Estimate {
            mean: self.time_mean,
            std_error: self.stderr(self.time_m2),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    /// `|mean − value|` in standard errors.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.mean - value).abs() / self.std_error
    }
}

/// One estimated tensor component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentEstimate {
    pub level: usize,
    /// Word over `{1, 2}`; empty at level 0.
    pub word: String,
    pub index: usize,
    pub estimate: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SigEstimate {
    pub config: SimConfig,
    pub components: Vec<ComponentEstimate>,
    pub exit_time: Estimate,
    /// Fraction of paths that left the disk on their first step.
    pub immediate_exit_fraction: f64,
}

impl SigEstimate {
    pub fn component(&self, level: usize, index: usize) -> &ComponentEstimate {
        &self.components[offset(level) + index]
    }
}

fn run_chunk(config: &SimConfig, first: u64, last: u64) -> (SigAccumulator, u64) {
    let mut acc = SigAccumulator::new(config.level);
    let mut immediate = 0;
    if config.level <= 2 {
        for idx in first..last {
            let mut s = [0.0; 7];
            s[0] = 1.0;
            let steps = walk(config, idx, |d| extend_level2(&mut s, d));
            immediate += u64::from(steps == 1);
            acc.push(&s[..offset(config.level + 1)], steps as f64 * config.h);
        }
    } else {
        for idx in first..last {
            let mut s = Signature::identity(config.level);
            let steps = walk(config, idx, |d| s.extend(d));
            immediate += u64::from(steps == 1);
            acc.push(s.as_slice(), steps as f64 * config.h);
        }
    }
    (acc, immediate)
}

/// Per-component means and standard errors of the stopped signature.
pub fn estimate_expected_sig(config: &SimConfig) -> Result<SigEstimate> {
    config.validate()?;
    let chunks: Vec<(u64, u64)> = (0..config.paths.div_ceil(CHUNK))
        .map(|c| (c * CHUNK, ((c + 1) * CHUNK).min(config.paths)))
        .collect();
    #[cfg(feature = "parallel")]
    let parts: Vec<(SigAccumulator, u64)> = {
        use rayon::prelude::*;
        chunks.par_iter().map(|&(a, b)| run_chunk(config, a, b)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let parts: Vec<(SigAccumulator, u64)> = chunks.iter().map(|&(a, b)| run_chunk(config, a, b)).collect();

    let mut acc = SigAccumulator::new(config.level);
    let mut immediate = 0;
    for (part, imm) in &parts {
        acc.merge(part);
        immediate += imm;
    }
    let mut components = Vec::new();
    for n in 0..=config.level {
        for w in 0..1usize << n {
            components.push(ComponentEstimate {
                level: n,
                word: word_string(n, w),
                index: w,
                estimate: Estimate {
                    mean: acc.mean(n, w),
                    std_error: if n == 0 { 0.0 } else { acc.std_error(n, w) },
                },
            });
        }
    }
    Ok(SigEstimate {
        config: config.clone(),
        components,
        exit_time: acc.exit_time(),
        immediate_exit_fraction: immediate as f64 / config.paths as f64,
    })
}
