//! Seeded random test functions.
//!
//! Nonnegative inputs are drawn from a resolution-free description (spike
//! positions and masses, block depths and heights) and only then rasterized,
//! so the same `(seed, trial)` pair yields matched functions at every `K`.
//! Spikes keep their mass as the grid refines, which is what stresses
//! weak-type behavior.
//!
//! Named test functions (`walsh:3`, `quadrant`, ...) are parsed here as well.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dyadic::{DyadicInterval, GridSpec};
use crate::error::{Error, Result};
use crate::lebesgue::dyadic_singularity;
use crate::tensor::GridFunction2D;
use crate::walsh::{walsh_sample, GridFunction1D};

const MAX_SPIKES: usize = 4;
const MAX_BLOCKS: usize = 3;
const MAX_BLOCK_DEPTH: u32 = 4;

pub fn rng_for(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Uniform values in `[-1, 1]`, one per cell.
pub fn random_signed(spec: GridSpec, seed: u64) -> GridFunction1D {
    let mut rng = rng_for(seed, 0);
    let samples = (0..spec.size()).map(|_| rng.random_range(-1.0..=1.0)).collect();
    GridFunction1D::new(spec, samples).expect("length matches")
}

/// Uniform values in `[-1, 1]` on the square grid.
pub fn random_signed_2d(spec: GridSpec, seed: u64) -> GridFunction2D {
    let mut rng = rng_for(seed, 0);
    let n = spec.size();
    let samples = (0..n * n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    GridFunction2D::new(spec, samples).expect("length matches")
}

#[derive(Clone, Debug)]
struct Spike {
    position: f64,
    mass: f64,
}

#[derive(Clone, Debug)]
struct Block {
    depth: u32,
    position: f64,
    height: f64,
}

#[derive(Clone, Debug)]
struct Profile {
    spikes: Vec<Spike>,
    blocks: Vec<Block>,
}

impl Profile {
    fn draw(rng: &mut ChaCha8Rng) -> Self {
        let spikes = (0..rng.random_range(1..=MAX_SPIKES))
            .map(|_| Spike {
                position: rng.random(),
                mass: rng.random_range(0.05..1.0),
            })
            .collect();
        let blocks = (0..rng.random_range(0..=MAX_BLOCKS))
            .map(|_| Block {
                depth: rng.random_range(1..=MAX_BLOCK_DEPTH),
                position: rng.random(),
                height: rng.random_range(0.0..1.0),
            })
            .collect();
        Self { spikes, blocks }
    }

    fn rasterize(&self, spec: GridSpec) -> Vec<f64> {
        let n = spec.size();
        let mut samples = vec![0.0; n];
        for spike in &self.spikes {
            let cell = ((spike.position * n as f64) as usize).min(n - 1);
            samples[cell] += spike.mass * n as f64;
        }
        for block in &self.blocks {
            let depth = block.depth.min(spec.resolution());
            let width = n >> depth;
            let first = ((block.position * (1u64 << depth) as f64) as usize).min((1 << depth) - 1) * width;
            for v in &mut samples[first..first + width] {
                *v += block.height;
            }
        }
        samples
    }
}

/// Nonnegative spikes-plus-blocks function for `(seed, trial)`.
pub fn random_nonnegative(spec: GridSpec, seed: u64, trial: u64) -> GridFunction1D {
    let profile = Profile::draw(&mut rng_for(seed, trial));
    GridFunction1D::new(spec, profile.rasterize(spec)).expect("length matches")
}

/// Nonnegative 2D function: a sum of products of independent 1D profiles plus point spikes.
pub fn random_nonnegative_2d(spec: GridSpec, seed: u64, trial: u64) -> GridFunction2D {
    let mut rng = rng_for(seed, trial);
    let n = spec.size();
    let mut samples = vec![0.0; n * n];
    let terms = rng.random_range(1..=2);
    for _ in 0..terms {
        let a = Profile::draw(&mut rng).rasterize(spec);
        let b = Profile::draw(&mut rng).rasterize(spec);
        let weight: f64 = rng.random_range(0.1..1.0);
        for (i, ai) in a.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                samples[i * n + j] += weight * ai * bj;
            }
        }
    }
    for _ in 0..rng.random_range(0..=MAX_SPIKES) {
        let (x, y, mass): (f64, f64, f64) = (rng.random(), rng.random(), rng.random_range(0.05..1.0));
        let i = ((x * n as f64) as usize).min(n - 1);
        let j = ((y * n as f64) as usize).min(n - 1);
        samples[i * n + j] += mass * (n * n) as f64;
    }
    GridFunction2D::new(spec, samples).expect("length matches")
}

fn parse_field<T: std::str::FromStr>(token: &str, what: &str) -> Result<T> {
    token
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} '{token}'")))
}

/// `constant:C`, `walsh:J`, `indicator:DEPTH:OFFSET`, `random:SEED` (uniform in `[-1, 1]`)
/// or `spikes:SEED` (nonnegative spikes plus blocks).
pub fn named_function_1d(text: &str, spec: GridSpec) -> Result<GridFunction1D> {
    let parts: Vec<&str> = text.trim().split(':').collect();
    match parts.as_slice() {
        ["constant", c] => Ok(GridFunction1D::constant(spec, parse_field(c, "constant")?)),
        ["walsh", j] => walsh_sample(parse_field(j, "Walsh index")?, spec),
        ["indicator", depth, offset] => {
            let interval = DyadicInterval::new(parse_field(depth, "depth")?, parse_field::<u64>(offset, "offset")?)?;
            GridFunction1D::indicator(spec, &interval)
        }
        ["random", seed] => Ok(random_signed(spec, parse_field(seed, "seed")?)),
        ["spikes", seed] => Ok(random_nonnegative(spec, parse_field(seed, "seed")?, 0)),
        _ => Err(Error::Parse(format!("unknown test function '{text}'"))),
    }
}

/// `constant:C`, `quadrant` (indicator of `[0,1/2)²`), `singular` (`g ⊗ g` with `g` the
/// dyadic singularity at 0), `random:SEED` or `spikes:SEED`.
pub fn named_function_2d(text: &str, spec: GridSpec) -> Result<GridFunction2D> {
    let half = spec.size() / 2;
    let parts: Vec<&str> = text.trim().split(':').collect();
    match parts.as_slice() {
        ["constant", c] => Ok(GridFunction2D::constant(spec, parse_field(c, "constant")?)),
        ["quadrant"] => Ok(GridFunction2D::from_fn(spec, |i, j| {
            if i < half && j < half {
                1.0
            } else {
                0.0
            }
        })),
        ["singular"] => {
            let g = dyadic_singularity(spec, 0)?;
            GridFunction2D::separable(&g, &g)
        }
        ["random", seed] => Ok(random_signed_2d(spec, parse_field(seed, "seed")?)),
        ["spikes", seed] => Ok(random_nonnegative_2d(spec, parse_field(seed, "seed")?, 0)),
        _ => Err(Error::Parse(format!("unknown test function '{text}'"))),
    }
}
