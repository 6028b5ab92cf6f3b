//! Lattice asymmetry: the smallest symmetric difference between `X` and a
//! translate of the lattice ball `B_{r_N} ∩ Z^d`.

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::Result;
use crate::lattice::{ball_config, diameter, faber_radius, Config};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteAsymmetry {
    pub best_shift: Vec<i32>,
    pub discrete_asym: usize,
    /// `#(B_{r_N} ∩ Z^d)`, which differs from `N` in general.
    pub cap_size: usize,
}

/// The comparison set `B_{r_N} ∩ Z^d` centred at the origin.
pub fn reference_cap(n: usize, d: usize) -> Result<Config> {
    ball_config(faber_radius(n, d), &vec![0.0; d])
}

/// In-place d-dimensional FFT of a row-major array.
fn fft_nd(buf: &mut [Complex64], shape: &[usize], planner: &mut FftPlanner<f64>, inverse: bool) {
    let mut stride = buf.len();
    for &len in shape {
        stride /= len;
        let fft = if inverse { planner.plan_fft_inverse(len) } else { planner.plan_fft_forward(len) };
        let mut line = vec![Complex64::default(); len];
        let block = len * stride;
        for start in (0..buf.len()).step_by(block) {
            for offset in 0..stride {
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = buf[start + offset + k * stride];
                }
                fft.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    buf[start + offset + k * stride] = *v;
                }
            }
        }
    }
}

fn flat_index(idx: &[i64], shape: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (&i, &s)| acc * s + i as usize)
}

/// `#(X ∩ (C + z))` for every `z` in the box `[lo, lo + shape)`, by FFT
/// convolution of the indicators (the cap is centrally symmetric).
struct OverlapTable {
    lo: Vec<i64>,
    shape: Vec<usize>,
    counts: Vec<f64>,
}

impl OverlapTable {
    fn new(x: &Config, cap: &Config) -> Self {
        let d = x.dim();
        let (xlo, xhi) = x.bounding_box();
        let (clo, chi) = cap.bounding_box();
        let shape: Vec<usize> = (0..d)
            .map(|k| ((xhi[k] - xlo[k]) + (chi[k] - clo[k]) + 1) as usize)
            .collect();
        let total: usize = shape.iter().product();
        let mut a = vec![Complex64::default(); total];
        let mut b = vec![Complex64::default(); total];
        for p in x.iter() {
            let idx: Vec<i64> = (0..d).map(|k| (p.coords()[k] - xlo[k]) as i64).collect();
            a[flat_index(&idx, &shape)].re = 1.0;
        }
        for p in cap.iter() {
            let idx: Vec<i64> = (0..d).map(|k| (p.coords()[k] - clo[k]) as i64).collect();
            b[flat_index(&idx, &shape)].re = 1.0;
        }
        let mut planner = FftPlanner::new();
        fft_nd(&mut a, &shape, &mut planner, false);
        fft_nd(&mut b, &shape, &mut planner, false);
        for (u, v) in a.iter_mut().zip(&b) {
            *u *= v;
        }
        fft_nd(&mut a, &shape, &mut planner, true);
        let scale = 1.0 / total as f64;
        OverlapTable {
            lo: (0..d).map(|k| (xlo[k] + clo[k]) as i64).collect(),
            shape,
            counts: a.iter().map(|c| c.re * scale).collect(),
        }
    }

    fn get(&self, z: &[i64]) -> usize {
        let idx: Vec<i64> = z.iter().zip(&self.lo).map(|(a, b)| a - b).collect();
        if idx.iter().zip(&self.shape).any(|(&i, &s)| i < 0 || i >= s as i64) {
            return 0;
        }
        self.counts[flat_index(&idx, &self.shape)].round() as usize
    }
}

/// Exact `min_z #(X Δ (B_{r_N} ∩ Z^d + z))` over the window
/// `[centroid - diam, centroid + diam]^d`. Ties go to the lexicographically
/// smallest shift.
pub fn discrete_asymmetry(x: &Config) -> Result<DiscreteAsymmetry> {
    let (n, d) = (x.len(), x.dim());
    let cap = reference_cap(n, d)?;
    let table = OverlapTable::new(x, &cap);
    let diam = diameter(x);
    let c = x.centroid();
    let lo: Vec<i64> = c.iter().map(|ck| (ck - diam).ceil() as i64).collect();
    let hi: Vec<i64> = c.iter().map(|ck| (ck + diam).floor() as i64).collect();
    let mut z = lo.clone();
    let mut best: Option<(usize, Vec<i64>)> = None;
    loop {
        let asym = n + cap.len() - 2 * table.get(&z);
        if best.as_ref().is_none_or(|(b, _)| asym < *b) {
            best = Some((asym, z.clone()));
        }
        // odometer, last axis fastest so the scan is lexicographic
        let mut k = d;
        loop {
            if k == 0 {
                let (discrete_asym, shift) = best.expect("window is nonempty");
                return Ok(DiscreteAsymmetry {
                    best_shift: shift.into_iter().map(|v| v as i32).collect(),
                    discrete_asym,
                    cap_size: cap.len(),
                });
            }
            k -= 1;
            if z[k] < hi[k] {
                z[k] += 1;
                break;
            }
            z[k] = lo[k];
        }
    }
}

/// `#(X Δ (B_{r_N} ∩ Z^d + z))` at one shift, directly.
pub fn symmetric_difference_at(x: &Config, shift: &[i32]) -> Result<usize> {
    let cap = reference_cap(x.len(), x.dim())?.translate(shift)?;
    let common = x.iter().filter(|p| cap.contains(p)).count();
    Ok(x.len() + cap.len() - 2 * common)
}
