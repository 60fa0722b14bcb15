//! Synthetic images with natural-photo statistics (high adjacent
//! correlation), used by the attack demos and the test harness.

use crate::grid::Grid;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Diagonal luminance ramp: value rises with x + y over the full 0..=255
/// range. Adjacent correlation is essentially 1.
pub fn gradient(side: usize) -> Grid<u8> {
    assert!(side >= 2);
    let scale = 255.0 / (2 * (side - 1)) as f64;
    let mut img = Grid::filled(side, side, 0u8);
    for y in 0..side {
        for x in 0..side {
            img.set(x, y, ((x + y) as f64 * scale).round() as u8);
        }
    }
    img
}

/// A bright off-center disc over a sloped background.
pub fn blob(side: usize) -> Grid<u8> {
    assert!(side >= 2);
    let cx = side as f64 * 0.4;
    let cy = side as f64 * 0.55;
    let radius = side as f64 * 0.28;
    let mut img = Grid::filled(side, side, 0u8);
    for y in 0..side {
        for x in 0..side {
            let background = 40.0 + 80.0 * (x + y) as f64 / (2 * (side - 1)) as f64;
            let d = ((x as f64 - cx).powi(2) + (y as f64 - cy).powi(2)).sqrt();
            let bump = 140.0 * (-(d / radius).powi(2)).exp();
            img.set(x, y, (background + bump).min(255.0).round() as u8);
        }
    }
    img
}

/// Smooth random field standing in for a photograph: seeded white noise,
/// box-blurred three times, then stretched to the full value range.
pub fn photo_like(side: usize, seed: u64) -> Grid<u8> {
    assert!(side >= 2);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut field: Vec<f64> = (0..side * side).map(|_| rng.gen::<f64>()).collect();
    let radius = 2i64;
    for _ in 0..3 {
        let mut blurred = vec![0.0; side * side];
        for y in 0..side as i64 {
            for x in 0..side as i64 {
                let mut sum = 0.0;
                let mut count = 0.0;
                for dy in -radius..=radius {
                    for dx in -radius..=radius {
                        let nx = x + dx;
                        let ny = y + dy;
                        if nx >= 0 && ny >= 0 && nx < side as i64 && ny < side as i64 {
                            sum += field[ny as usize * side + nx as usize];
                            count += 1.0;
                        }
                    }
                }
                blurred[y as usize * side + x as usize] = sum / count;
            }
        }
        field = blurred;
    }
    let min = field.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = field.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let span = (max - min).max(f64::MIN_POSITIVE);
    let pixels = field
        .iter()
        .map(|&v| (255.0 * (v - min) / span).round() as u8)
        .collect();
    Grid::from_vec(side, side, pixels)
}
