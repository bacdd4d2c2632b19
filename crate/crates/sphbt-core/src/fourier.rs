//! Orthonormal sine/cosine stage of the radial transform.
//!
//! On the half-integer radial grid r_i = (i + 1/2)Δr, i = 0..N−1, with
//! momenta k_n = nΔk and Δk = π/(NΔr), the even-degree channels expand over
//! sin(k_n r_i) (n = 1..N) and the odd-degree channels over cos(k_n r_i)
//! (n = 0..N−1). With √(2/N) on interior rows and √(1/N) on the edge rows
//! (the n = N sine row, whose samples are ±1, and the constant n = 0 cosine
//! row) both matrices are orthogonal, so the inverse is the transpose.
//!
//! The O(N log N) kernels are DST-II/DCT-II from `rustdct`; the transposes
//! are realized by DST-III/DCT-III with the edge element pre-doubled (those
//! kernels halve it internally). Unit tests pin this wiring against densely
//! constructed matrices.

use std::sync::Arc;

use num_complex::Complex;
use rustdct::{DctPlanner, TransformType2And3};

use crate::real::Real;

/// Which trigonometric family a channel uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrigKind {
    /// sin(k_n r), momenta slots j = 0..N−1 holding n = j + 1.
    Sine,
    /// cos(k_n r), momenta slots j = 0..N−1 holding n = j.
    Cosine,
}

/// Planned orthonormal trigonometric transform of a fixed length.
#[derive(Clone)]
pub struct TrigStage<S: Real> {
    len: usize,
    kind: TrigKind,
    plan: Arc<dyn TransformType2And3<S>>,
}

/// Split-complex scratch for applying the real kernels to complex data.
pub struct TrigScratch<S> {
    re: Vec<S>,
    im: Vec<S>,
}

impl<S: Real> TrigStage<S> {
    pub fn new(kind: TrigKind, len: usize, planner: &mut DctPlanner<S>) -> Self {
        TrigStage {
            len,
            kind,
            plan: planner.plan_dct2(len),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn kind(&self) -> TrigKind {
        self.kind
    }

    pub fn make_scratch(&self) -> TrigScratch<S> {
        TrigScratch {
            re: vec![S::zero(); self.len],
            im: vec![S::zero(); self.len],
        }
    }

    /// Grid samples → spectral slots, real data, in place.
    pub fn forward_real(&self, data: &mut [S]) {
        assert_eq!(data.len(), self.len);
        let n = self.len;
        let interior = (S::of(2.0) / S::of_usize(n)).sqrt();
        let edge = S::one() / S::of_usize(n).sqrt();
        match self.kind {
            TrigKind::Sine => {
                self.plan.process_dst2(data);
                for v in data[..n - 1].iter_mut() {
                    *v = *v * interior;
                }
                data[n - 1] = data[n - 1] * edge;
            }
            TrigKind::Cosine => {
                self.plan.process_dct2(data);
                data[0] = data[0] * edge;
                for v in data[1..].iter_mut() {
                    *v = *v * interior;
                }
            }
        }
    }

    /// Spectral slots → grid samples, real data, in place. Exact transpose
    /// of [`forward_real`], hence the inverse of the orthonormal map.
    pub fn inverse_real(&self, data: &mut [S]) {
        assert_eq!(data.len(), self.len);
        let n = self.len;
        let interior = (S::of(2.0) / S::of_usize(n)).sqrt();
        let edge_doubled = S::of(2.0) / S::of_usize(n).sqrt();
        match self.kind {
            TrigKind::Sine => {
                for v in data[..n - 1].iter_mut() {
                    *v = *v * interior;
                }
                data[n - 1] = data[n - 1] * edge_doubled;
                self.plan.process_dst3(data);
            }
            TrigKind::Cosine => {
                data[0] = data[0] * edge_doubled;
                for v in data[1..].iter_mut() {
                    *v = *v * interior;
                }
                self.plan.process_dct3(data);
            }
        }
    }

    pub fn forward_complex(&self, data: &mut [Complex<S>], scratch: &mut TrigScratch<S>) {
        self.apply_complex(data, scratch, true);
    }

    pub fn inverse_complex(&self, data: &mut [Complex<S>], scratch: &mut TrigScratch<S>) {
        self.apply_complex(data, scratch, false);
    }

    fn apply_complex(
        &self,
        data: &mut [Complex<S>],
        scratch: &mut TrigScratch<S>,
        forward: bool,
    ) {
        assert_eq!(data.len(), self.len);
        for (v, (re, im)) in data
            .iter()
            .zip(scratch.re.iter_mut().zip(scratch.im.iter_mut()))
        {
            *re = v.re;
            *im = v.im;
        }
        if forward {
            self.forward_real(&mut scratch.re);
            self.forward_real(&mut scratch.im);
        } else {
            self.inverse_real(&mut scratch.re);
            self.inverse_real(&mut scratch.im);
        }
        for (v, (re, im)) in data
            .iter_mut()
            .zip(scratch.re.iter().zip(scratch.im.iter()))
        {
            *v = Complex::new(*re, *im);
        }
    }

    /// Densely constructed matrix row `slot` (length N over grid points),
    /// for verification.
    pub fn dense_row(&self, slot: usize) -> Vec<S> {
        let n = self.len;
        let nf = S::of_usize(n);
        let interior = (S::of(2.0) / nf).sqrt();
        let edge = S::one() / nf.sqrt();
        (0..n)
            .map(|i| {
                let arg = S::PI() * (S::of_usize(i) + S::of(0.5)) / nf;
                match self.kind {
                    TrigKind::Sine => {
                        let nn = slot + 1;
                        let scale = if nn == n { edge } else { interior };
                        scale * (S::of_usize(nn) * arg).sin()
                    }
                    TrigKind::Cosine => {
                        let scale = if slot == 0 { edge } else { interior };
                        scale * (S::of_usize(slot) * arg).cos()
                    }
                }
            })
            .collect()
    }
}
