//! Fourier-spectral differentiation on uniform periodic grids.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::model::BoundaryModel;

pub struct Spectral {
    dims: Vec<usize>,
    strides: Vec<usize>,
    periods: Vec<f64>,
    forward: Vec<Arc<dyn Fft<f64>>>,
    inverse: Vec<Arc<dyn Fft<f64>>>,
}

impl Spectral {
    /// Returns `None` for non-torus models.
    pub fn for_model(model: &BoundaryModel) -> Option<Self> {
        let BoundaryModel::FlatTorus {
            periods,
            resolution,
        } = model
        else {
            return None;
        };
        let mut planner = FftPlanner::new();
        let mut strides = vec![1; resolution.len()];
        for a in (0..resolution.len().saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * resolution[a + 1];
        }
        Some(Self {
            dims: resolution.clone(),
            strides,
            periods: periods.clone(),
            forward: resolution.iter().map(|&n| planner.plan_fft_forward(n)).collect(),
            inverse: resolution.iter().map(|&n| planner.plan_fft_inverse(n)).collect(),
        })
    }

    pub fn num_points(&self) -> usize {
        self.dims.iter().product()
    }

    /// Partial derivative along `axis` of a point-major field with `ncomp`
    /// components per point.
    pub fn derivative(&self, data: &[f64], ncomp: usize, axis: usize) -> Vec<f64> {
        let len = self.dims[axis];
        let stride = self.strides[axis];
        let npts = self.num_points();
        debug_assert_eq!(data.len(), npts * ncomp);
        let nlines = npts / len;
        let scale = 2.0 * PI / self.periods[axis];
        let wavenumber = |j: usize| -> f64 {
            if j < len / 2 {
                j as f64
            } else if j == len / 2 {
                0.0
            } else {
                j as f64 - len as f64
            }
        };
        let multipliers: Vec<Complex64> = (0..len)
            .map(|j| Complex64::new(0.0, scale * wavenumber(j) / len as f64))
            .collect();

        let bases: Vec<usize> = (0..npts).filter(|p| (p / stride).is_multiple_of(len)).collect();
        debug_assert_eq!(bases.len(), nlines);

        let mut out = vec![0.0; data.len()];
        let mut buf = vec![Complex64::new(0.0, 0.0); nlines * ncomp * len];
        for (l, &base) in bases.iter().enumerate() {
            for c in 0..ncomp {
                let line = &mut buf[(l * ncomp + c) * len..(l * ncomp + c + 1) * len];
                for (j, z) in line.iter_mut().enumerate() {
                    *z = Complex64::new(data[(base + j * stride) * ncomp + c], 0.0);
                }
            }
        }
        self.forward[axis].process(&mut buf);
        for line in buf.chunks_mut(len) {
            for (z, m) in line.iter_mut().zip(&multipliers) {
                *z *= m;
            }
        }
        self.inverse[axis].process(&mut buf);
        for (l, &base) in bases.iter().enumerate() {
            for c in 0..ncomp {
                let line = &buf[(l * ncomp + c) * len..(l * ncomp + c + 1) * len];
                for (j, z) in line.iter().enumerate() {
                    out[(base + j * stride) * ncomp + c] = z.re;
                }
            }
        }
        out
    }

    /// All first partials: `result[a]` is `∂_a data`.
    pub fn gradient(&self, data: &[f64], ncomp: usize) -> Vec<Vec<f64>> {
        (0..self.dims.len())
            .map(|a| self.derivative(data, ncomp, a))
            .collect()
    }
}
