//! Seeded generators of admissible densities: 0 ≤ ρ ≤ 1 with the origin
//! outside the support.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::potential::{Ball, Density, Grid};

const MAX_BALLS: usize = 8;

/// Independent stream `index` of the generator seeded by `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn direction<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-8 {
            return v.into_iter().map(|x| x / len).collect();
        }
    }
}

/// One to eight balls with centres at distance at least 2r from the origin.
///
/// Each weight is drawn from [0, 1 − Σ weights of earlier balls it meets],
/// so weights stay at most 1 wherever balls overlap.
pub fn random_ball_density<R: Rng>(rng: &mut R, n: usize) -> Density {
    let count = rng.gen_range(1..=MAX_BALLS);
    let mut balls: Vec<Ball> = Vec::with_capacity(count);
    for i in 0..count {
        let radius = rng.gen_range(0.1..1.0);
        let dist = rng.gen_range(2.0 * radius..2.0 * radius + 3.0);
        let center: Vec<f64> = direction(rng, n).into_iter().map(|x| dist * x).collect();
        let taken: f64 = balls
            .iter()
            .filter(|b| {
                let d: f64 = b.center.iter().zip(&center).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
                d < b.radius + radius
            })
            .map(|b| b.weight)
            .sum();
        let room = (1.0 - taken).max(0.0);
        let weight = if i == 0 { rng.gen_range(0.05..=1.0) } else { room * rng.gen::<f64>() };
        balls.push(Ball::new(center, radius, weight.min(room)));
    }
    let mut density = Density::new(n).expect("n >= 2");
    for b in balls {
        density = density.with_ball(b).expect("generated ball is valid");
    }
    density
}

/// A perturbed bump sampled on a `cells`^n grid of side 2 placed at
/// distance at least 1 + half-diagonal from the origin.
pub fn random_grid_density<R: Rng>(rng: &mut R, n: usize, cells: usize) -> Density {
    let side = 2.0;
    let spacing = side / cells as f64;
    let half_diag = 0.5 * side * (n as f64).sqrt();
    let dist = rng.gen_range(1.0 + half_diag..3.0 + half_diag);
    let centre: Vec<f64> = direction(rng, n).into_iter().map(|x| dist * x).collect();
    let origin: Vec<f64> = centre.iter().map(|c| c - 0.5 * side).collect();
    let noise: Vec<f64> = (0..cells.pow(n as u32)).map(|_| rng.gen_range(-0.3..0.3)).collect();
    let peak = rng.gen_range(0.3..1.0);
    let mut k = 0;
    let grid = Grid::sample(origin, spacing, vec![cells; n], |p| {
        let r2: f64 = p.iter().zip(&centre).map(|(a, b)| (a - b).powi(2)).sum();
        let bump = (1.0 - r2).max(0.0);
        let v = (peak * bump * (1.0 + noise[k])).clamp(0.0, 1.0);
        k += 1;
        v
    });
    Density::new(n).expect("n >= 2").with_grid(grid.expect("values are clamped")).expect("dimensions agree")
}
