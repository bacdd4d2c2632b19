//! Per-degree radial transform: an orthogonal fast spherical Bessel
//! transform on a uniform grid.
//!
//! The transform factors into two orthogonal stages. A trigonometric stage
//! (sine for even degree, cosine for odd, carrying the asymptotic phase
//! sign (−1)^⌈ℓ/2⌉ of the Bessel functions) moves coordinate samples to
//! Fourier coefficients in O(N log N). A Fourier-to-Bessel stage then mixes
//! the Fourier coefficients through a lower-triangular correction whose
//! rows are discrete Legendre polynomial derivatives; written in monomial
//! form the correction collapses to ⌈ℓ/2⌉ running power sums, so applying
//! it costs O(ℓN).
//!
//! Two groups of rows are applied densely instead. Rows below the first
//! regular index cannot hold degree-ℓ content and are completed with
//! discrete Legendre profiles, keeping the full matrix orthogonal. Regular
//! rows with index below 2ℓ sample their degree-(ℓ−1) polynomial on too
//! few points for the monomial form to be well conditioned, so their
//! stored rows are applied directly; there are O(ℓ) such rows, keeping the
//! whole stage at O(ℓN).

use num_complex::Complex;
use num_traits::Zero;
use rustdct::DctPlanner;

use crate::bessel::{chi_pair, chi_second};
use crate::dlop::ddlop_power_coeffs_scaled;
use crate::dlop::{ddlop_eval, dlop_eval, dlop_eval_family, dlop_norm, EvalStrategy};
use crate::error::{Error, Result};
use crate::fourier::{TrigKind, TrigStage};
use crate::real::Real;
use crate::util::{DoubleWide, Kahan, Twofold};

/// Largest transform degree accepted by [`RadialTransformPlan::new`]. The
/// cancellation mass of the monomial fast path grows geometrically with
/// the degree; double-width compensation absorbs it fully through degree
/// ~48 and to ~1e-10 here at the cap, beyond which accuracy would fall off
/// a cliff. [`RadialTransformPlan::with_max_degree`] can override it.
pub const DEGREE_CAP: usize = 64;

/// Uniform radial grid with nodes halfway between integer multiples of the
/// step: r_i = (i + 1/2)Δr for i = 0..N−1. No node sits at the origin, so
/// Coulomb-like potentials stay finite on the grid.
#[derive(Clone, Debug)]
pub struct RadialGrid<S> {
    step: S,
    count: usize,
}

impl<S: Real> RadialGrid<S> {
    pub fn new(step: S, count: usize) -> Result<Self> {
        if !(step > S::zero()) || !step.is_finite() {
            return Err(Error::Domain(format!(
                "radial step must be positive and finite, got {step:?}"
            )));
        }
        if count < 2 {
            return Err(Error::Domain(format!(
                "radial grid needs at least 2 points, got {count}"
            )));
        }
        Ok(RadialGrid { step, count })
    }

    pub fn step(&self) -> S {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Outer boundary r_max = NΔr, half a step beyond the last node.
    pub fn extent(&self) -> S {
        self.step * S::of_usize(self.count)
    }

    /// i-th node r_i = (i + 1/2)Δr.
    pub fn node(&self, i: usize) -> S {
        (S::of_usize(i) + S::of(0.5)) * self.step
    }

    pub fn nodes(&self) -> Vec<S> {
        (0..self.count).map(|i| self.node(i)).collect()
    }
}

/// Momentum grid conjugate to a [`RadialGrid`] at a given degree. Nodes are
/// k_n = nΔk with Δk = π/r_max; even degrees use n = 1..N (sine modes), odd
/// degrees n = 0..N−1 (cosine modes), so either parity class holds exactly
/// N modes. Storage slot j holds logical index n = j + parity_offset.
#[derive(Clone, Debug)]
pub struct MomentumGrid<S> {
    step: S,
    count: usize,
    parity_offset: usize,
    first_regular: usize,
}

impl<S: Real> MomentumGrid<S> {
    pub fn for_degree(degree: usize, grid: &RadialGrid<S>) -> Self {
        MomentumGrid {
            step: S::PI() / grid.extent(),
            count: grid.count(),
            parity_offset: (degree + 1) % 2,
            first_regular: degree / 2 + 1,
        }
    }

    pub fn step(&self) -> S {
        self.step
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// 1 for even degrees (no zero mode), 0 for odd.
    pub fn parity_offset(&self) -> usize {
        self.parity_offset
    }

    /// Largest logical index N_ℓ = N + parity_offset − 1.
    pub fn upper(&self) -> usize {
        self.count + self.parity_offset - 1
    }

    /// First index n₀ = ⌈(ℓ+1)/2⌉ whose transform row is a regular
    /// triangular row; rows below it are completion rows.
    pub fn first_regular(&self) -> usize {
        self.first_regular
    }

    /// Node k_n = nΔk at logical index n.
    pub fn node(&self, n: usize) -> S {
        S::of_usize(n) * self.step
    }

    /// Quadrature weight w_n = (1 − δ_{n0}/2)Δk.
    pub fn weight(&self, n: usize) -> S {
        if n == 0 {
            S::of(0.5) * self.step
        } else {
            self.step
        }
    }

    /// Logical index held in storage slot j.
    pub fn index_of_slot(&self, slot: usize) -> usize {
        slot + self.parity_offset
    }

    /// Nodes in slot order.
    pub fn nodes(&self) -> Vec<S> {
        (0..self.count)
            .map(|j| self.node(self.index_of_slot(j)))
            .collect()
    }
}

/// Which stage of the transform a vector's entries currently live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    /// Samples ψ(r_i)√Δr on the radial grid.
    Coordinate,
    /// Sine or cosine coefficients f_n.
    Fourier,
    /// Spherical Bessel coefficients b_n.
    Bessel,
}

/// A length-N complex vector tagged with its [`Representation`], so that
/// applying a stage in the wrong direction is a domain error instead of a
/// silent wrong answer.
#[derive(Clone, Debug)]
pub struct RadialVector<S: Real> {
    repr: Representation,
    values: Vec<Complex<S>>,
}

impl<S: Real> RadialVector<S> {
    pub fn new(repr: Representation, values: Vec<Complex<S>>) -> Self {
        RadialVector { repr, values }
    }

    pub fn coordinate(values: Vec<Complex<S>>) -> Self {
        Self::new(Representation::Coordinate, values)
    }

    pub fn fourier(values: Vec<Complex<S>>) -> Self {
        Self::new(Representation::Fourier, values)
    }

    pub fn bessel(values: Vec<Complex<S>>) -> Self {
        Self::new(Representation::Bessel, values)
    }

    /// Samples a radial function at the grid nodes, carrying the √Δr
    /// quadrature weight so the Euclidean norm of the vector matches the
    /// L² norm of the function.
    pub fn sample(grid: &RadialGrid<S>, f: impl Fn(S) -> Complex<S>) -> Self {
        let w = grid.step().sqrt();
        let values = (0..grid.count()).map(|i| f(grid.node(i)) * w).collect();
        Self::coordinate(values)
    }

    /// [`RadialVector::sample`] for a real-valued function.
    pub fn sample_real(grid: &RadialGrid<S>, f: impl Fn(S) -> S) -> Self {
        Self::sample(grid, |r| Complex::new(f(r), S::zero()))
    }

    pub fn repr(&self) -> Representation {
        self.repr
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Complex<S>] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex<S>] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex<S>> {
        self.values
    }

    pub fn norm(&self) -> S {
        self.values
            .iter()
            .map(|z| z.norm_sqr())
            .fold(S::zero(), |a, b| a + b)
            .sqrt()
    }
}

/// Precomputed orthogonal transform between coordinate samples and
/// spherical Bessel coefficients at one degree. Plans are immutable; all
/// apply methods are `&self` and safe to share across threads.
pub struct RadialTransformPlan<S: Real> {
    degree: usize,
    radial: RadialGrid<S>,
    momentum: MomentumGrid<S>,
    stage: TrigStage<S>,
    /// Asymptotic Bessel phase (−1)^⌈ℓ/2⌉ carried by the Fourier stage.
    sign: S,
    /// α_n by slot; densely applied slots hold their row normalizers.
    alphas: Vec<S>,
    /// Double-width α_n for the recurrence rows, where α scales the
    /// mass-carrying monomial coefficients in the transpose and single
    /// rounding would surface there.
    alpha_rec: Vec<Twofold<S>>,
    /// Rows applied densely: completion rows for n < n₀ and the
    /// ill-conditioned regular rows n₀ ≤ n < rec_start, normalizer and
    /// edge weight folded in, ordered by n from parity_offset.
    dense_rows: Vec<Vec<S>>,
    /// First row handled by the monomial recurrence.
    rec_start: usize,
    /// Monomial coefficients of the recurrence rows, ⌈ℓ/2⌉ per row (only
    /// one parity of powers survives), scaled into the (m/power_scale)^ν
    /// basis, rows n = rec_start..N_ℓ in order. Stored as double-width
    /// pairs: the alternating monomial sums cancel by the coefficient
    /// magnitude, so single rounding of ξ would bound the row error from
    /// below.
    xi: Vec<Twofold<S>>,
    /// Active powers per recurrence row.
    nnu: usize,
    /// Lowest active power: 1 for even degrees, 0 for odd.
    nu_base: usize,
    /// Power basis scale; the geometric mean of the recurrence index range.
    power_scale: S,
}

impl<S: Real> RadialTransformPlan<S> {
    /// Builds a plan with a private trigonometric planner and the default
    /// degree cap.
    pub fn new(degree: usize, grid: RadialGrid<S>) -> Result<Self> {
        let mut planner = DctPlanner::new();
        Self::with_planner(degree, grid, &mut planner)
    }

    /// Builds a plan reusing a shared planner, so that plans of many
    /// degrees on one grid share their two underlying trigonometric
    /// transforms.
    pub fn with_planner(
        degree: usize,
        grid: RadialGrid<S>,
        planner: &mut DctPlanner<S>,
    ) -> Result<Self> {
        Self::with_max_degree(degree, grid, DEGREE_CAP, planner)
    }

    /// Builds a plan with an explicit degree cap in place of
    /// [`DEGREE_CAP`]. Raising the cap trades accuracy for reach: the
    /// cancellation mass the fast path must compensate grows geometrically
    /// with the degree and exhausts the double-width headroom past the
    /// default cap.
    pub fn with_max_degree(
        degree: usize,
        grid: RadialGrid<S>,
        max_degree: usize,
        planner: &mut DctPlanner<S>,
    ) -> Result<Self> {
        if degree > max_degree {
            return Err(Error::Domain(format!(
                "transform degree {degree} exceeds the cap {max_degree}"
            )));
        }
        let momentum = MomentumGrid::for_degree(degree, &grid);
        let n = grid.count();
        let p = momentum.parity_offset();
        let n0 = momentum.first_regular();
        let nl = momentum.upper();
        if n < n0 + 1 {
            return Err(Error::Domain(format!(
                "degree {degree} needs more than {n0} grid points, got {n}"
            )));
        }
        let kind = if p == 1 {
            TrigKind::Sine
        } else {
            TrigKind::Cosine
        };
        let stage = TrigStage::new(kind, n, planner);
        let sign = if ((degree + 1) / 2) % 2 == 1 {
            -S::one()
        } else {
            S::one()
        };

        let rec_start = if degree == 0 {
            n0
        } else {
            (2 * degree).clamp(n0, nl + 1)
        };
        let nnu = if degree == 0 { 0 } else { (degree + 1) / 2 };
        let nu_base = (degree + 1) % 2;
        // power-of-two scale near the geometric mean of the recurrence
        // range, so rescaling the exact coefficients and forming m/scale
        // are both exact
        let log2_scale = if degree == 0 || rec_start > nl {
            0u32
        } else {
            ((rec_start as f64) * (nl as f64)).sqrt().log2().round() as u32
        };
        let power_scale = S::of(2.0).powi(log2_scale as i32);

        let mut xi = Vec::new();
        let mut alpha_rec = Vec::new();
        if degree > 0 && rec_start <= nl {
            xi.reserve(nnu * (nl + 1 - rec_start));
            alpha_rec.reserve(nl + 1 - rec_start);
            for row in rec_start..=nl {
                let (full, a) = ddlop_power_coeffs_scaled::<S>(degree, row, log2_scale)?;
                for q in 0..nnu {
                    xi.push(full[nu_base + 2 * q]);
                }
                alpha_rec.push(a);
            }
        }

        // Regular rows: subtracting the triangular correction leaves a row
        // of squared norm 1 − P'_ℓ(0, 2n)²/4, which α_n restores to one.
        // With P'_ℓ(0, 2n) = 2(1 − P_ℓ(−1, 2n−1))/(1 + P_ℓ(−1, 2n−1)) the
        // defect collapses to 4v/(1+v)², v = P_ℓ(−1, 2n−1); this form has
        // no cancellation even where the defect is tiny near the diagonal.
        let mut alphas = vec![S::one(); n];
        if degree > 0 {
            for row in n0..rec_start.min(nl + 1) {
                let v: S = dlop_eval(degree, -1, 2 * row - 1, EvalStrategy::DegreeRecurrence)?;
                alphas[row - p] = (S::one() + v) / (S::of(2.0) * v.sqrt());
            }
            for row in rec_start..=nl {
                alphas[row - p] = alpha_rec[row - rec_start].round();
            }
        }

        let mut dense_rows: Vec<Vec<S>> = Vec::with_capacity(rec_start - p);
        if n0 > p {
            // completion rows: even-degree profiles on the doubled grid,
            // each normalized by its own discrete norm
            let top_deg = 2 * (n0 - 1) - p;
            for row in p..n0 {
                let deg = 2 * row - p;
                let a = (S::of(2.0) / dlop_norm::<S>(deg, 2 * nl)?).sqrt();
                alphas[row - p] = a;
                dense_rows.push(vec![S::zero(); n]);
            }
            let half_w = S::of(0.5).sqrt();
            for j in 0..n {
                let m = j + p;
                let family = dlop_eval_family::<S>(top_deg, (nl - m) as i64, 2 * nl)?;
                let w = if m == 0 { half_w } else { S::one() };
                for row in p..n0 {
                    dense_rows[row - p][j] = alphas[row - p] * family[2 * row - p] * w;
                }
            }
        }
        for row in n0..rec_start {
            dense_rows.push(regular_dense_row(degree, row, p, n, alphas[row - p])?);
        }

        Ok(RadialTransformPlan {
            degree,
            radial: grid,
            momentum,
            stage,
            sign,
            alphas,
            alpha_rec,
            dense_rows,
            rec_start,
            xi,
            nnu,
            nu_base,
            power_scale,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn radial(&self) -> &RadialGrid<S> {
        &self.radial
    }

    pub fn momentum(&self) -> &MomentumGrid<S> {
        &self.momentum
    }

    fn check(&self, x: &RadialVector<S>, want: Representation) -> Result<()> {
        if x.len() != self.radial.count() {
            return Err(Error::Domain(format!(
                "vector length {} does not match grid size {}",
                x.len(),
                self.radial.count()
            )));
        }
        if x.repr() != want {
            return Err(Error::Domain(format!(
                "expected {:?} representation, got {:?}",
                want,
                x.repr()
            )));
        }
        Ok(())
    }

    /// Scaled powers (m/C)^ν for the active ν of this plan, lowest first,
    /// as double-width pairs. Power errors scale with the same cancellation
    /// mass as the sums they feed, so even one rounding to single width
    /// here would bound the transform error from below.
    #[inline]
    fn fill_powers(&self, m: usize, out: &mut [Twofold<S>]) {
        let t = S::of_usize(m) / self.power_scale;
        let t2 = Twofold::prod(t, t);
        let mut v = if self.nu_base == 0 {
            Twofold::one()
        } else {
            Twofold::of(t)
        };
        for slot in out.iter_mut() {
            *slot = v;
            v = v.mul(t2);
        }
    }

    /// Orthonormal trigonometric stage, coordinate samples to Fourier
    /// coefficients.
    pub fn fourier_forward(&self, x: &RadialVector<S>) -> Result<RadialVector<S>> {
        self.check(x, Representation::Coordinate)?;
        let mut values = x.values().to_vec();
        let mut scratch = self.stage.make_scratch();
        self.stage.forward_complex(&mut values, &mut scratch);
        if self.sign < S::zero() {
            for v in values.iter_mut() {
                *v = -*v;
            }
        }
        Ok(RadialVector::fourier(values))
    }

    /// Inverse (transpose) of [`Self::fourier_forward`].
    pub fn fourier_inverse(&self, x: &RadialVector<S>) -> Result<RadialVector<S>> {
        self.check(x, Representation::Fourier)?;
        let mut values = x.values().to_vec();
        if self.sign < S::zero() {
            for v in values.iter_mut() {
                *v = -*v;
            }
        }
        let mut scratch = self.stage.make_scratch();
        self.stage.inverse_complex(&mut values, &mut scratch);
        Ok(RadialVector::coordinate(values))
    }

    /// Fourier-to-Bessel mixing stage in O(ℓN): densely stored rows by dot
    /// products, the rest through the running power sums of the monomial
    /// expansion with compensated accumulation.
    pub fn ftb_forward(&self, x: &RadialVector<S>) -> Result<RadialVector<S>> {
        self.check(x, Representation::Fourier)?;
        let f = x.values();
        let n = f.len();
        let p = self.momentum.parity_offset();
        let nl = self.momentum.upper();
        let rec_start = self.rec_start;
        let mut b = vec![Complex::<S>::zero(); n];

        for (row, out) in self.dense_rows.iter().zip(b.iter_mut()) {
            let mut acc = Kahan::<Complex<S>>::new();
            for (rv, fv) in row.iter().zip(f) {
                acc.add(*fv * *rv);
            }
            *out = acc.value();
        }
        if rec_start > nl {
            return Ok(RadialVector::bessel(b));
        }

        let nnu = self.nnu;
        // running power sums and their products both round at double width:
        // the coefficients multiplying them are as large as the row's
        // cancellation mass, so single-width representation of the sums
        // would cap the overall accuracy at mass·ε
        let mut sig: Vec<DoubleWide<S>> = vec![DoubleWide::new(); 2 * nnu];
        let mut pw = vec![Twofold::of(S::zero()); nnu];
        // trapezoid step n → n+1 adds ½pw(n)f(n) + ½pw(n+1)f(n+1); the
        // first summand is the previous step's tail, carried over so each
        // index's powers are formed once
        let mut tail: Vec<Twofold<S>> = vec![Twofold::of(S::zero()); 2 * nnu];
        if nnu > 0 {
            if p == 0 {
                // cosine zero mode enters every running sum through its
                // ν = 0 term only, with the edge weight 1/√2
                let w = Twofold::of(S::of(0.5)).sqrt();
                sig[0].add_scaled(f[0].re, w);
                sig[1].add_scaled(f[0].im, w);
            }
            for m in 1..rec_start {
                self.fill_powers(m, &mut pw);
                let fv = f[m - p];
                for (s, w) in sig.chunks_exact_mut(2).zip(pw.iter()) {
                    s[0].add_scaled(fv.re, *w);
                    s[1].add_scaled(fv.im, *w);
                }
            }
            self.fill_powers(rec_start, &mut pw);
            let fv = f[rec_start - p];
            for ((s, t), w) in sig
                .chunks_exact_mut(2)
                .zip(tail.chunks_exact_mut(2))
                .zip(pw.iter())
            {
                let hw = w.half();
                t[0] = hw.scale(fv.re);
                t[1] = hw.scale(fv.im);
                s[0].add_two(t[0]);
                s[1].add_two(t[1]);
            }
        }

        for logical in rec_start..=nl {
            let j = logical - p;
            let row = &self.xi[(logical - rec_start) * nnu..][..nnu];
            let mut cr = DoubleWide::new();
            let mut ci = DoubleWide::new();
            for (s, c) in sig.chunks_exact(2).zip(row.iter()) {
                cr.add_scaled_two(*c, s[0].parts());
                ci.add_scaled_two(*c, s[1].parts());
            }
            let corr = Complex::new(cr.value(), ci.value());
            b[j] = (f[j] - corr) * self.alphas[j];
            if logical < nl && nnu > 0 {
                self.fill_powers(logical + 1, &mut pw);
                let fv = f[j + 1];
                for ((s, t), w) in sig
                    .chunks_exact_mut(2)
                    .zip(tail.chunks_exact_mut(2))
                    .zip(pw.iter())
                {
                    let hw = w.half();
                    s[0].add_two(t[0]);
                    s[1].add_two(t[1]);
                    t[0] = hw.scale(fv.re);
                    t[1] = hw.scale(fv.im);
                    s[0].add_two(t[0]);
                    s[1].add_two(t[1]);
                }
            }
        }
        Ok(RadialVector::bessel(b))
    }

    /// Transpose of [`Self::ftb_forward`], also in O(ℓN): the running sums
    /// accumulate backward over rows instead of forward over columns.
    pub fn ftb_inverse(&self, x: &RadialVector<S>) -> Result<RadialVector<S>> {
        self.check(x, Representation::Bessel)?;
        let b = x.values();
        let n = b.len();
        let p = self.momentum.parity_offset();
        let nl = self.momentum.upper();
        let rec_start = self.rec_start;
        let nnu = self.nnu;
        let mut f = vec![Complex::<S>::zero(); n];

        let mut st: Vec<DoubleWide<S>> = vec![DoubleWide::new(); 2 * nnu];
        let mut prev: Vec<Twofold<S>> = vec![Twofold::of(S::zero()); 2 * nnu];
        let mut pw = vec![Twofold::of(S::zero()); nnu];
        for logical in (rec_start..=nl).rev() {
            let j = logical - p;
            let row = &self.xi[(logical - rec_start) * nnu..][..nnu];
            let a = self.alphas[j];
            let bv = b[j];
            let ap = self
                .alpha_rec
                .get(logical - rec_start)
                .copied()
                .unwrap_or_else(|| Twofold::of(a));
            for ((s, pr), c) in st
                .chunks_exact_mut(2)
                .zip(prev.chunks_exact_mut(2))
                .zip(row.iter())
            {
                let ac = c.mul(ap);
                let cur_re = ac.scale(bv.re);
                let cur_im = ac.scale(bv.im);
                s[0].add_two(cur_re.half());
                s[0].add_two(pr[0].half());
                s[1].add_two(cur_im.half());
                s[1].add_two(pr[1].half());
                pr[0] = cur_re;
                pr[1] = cur_im;
            }
            self.fill_powers(logical, &mut pw);
            let mut cr = DoubleWide::new();
            let mut ci = DoubleWide::new();
            for (s, w) in st.chunks_exact(2).zip(pw.iter()) {
                cr.add_scaled_two(*w, s[0].parts());
                ci.add_scaled_two(*w, s[1].parts());
            }
            f[j] = bv * a - Complex::new(cr.value(), ci.value());
        }

        // Below the first recurrence row the step function in the row sum
        // saturates, so each output couples to one full backward sum.
        let half_w = S::of(0.5).sqrt();
        for m in p..rec_start.min(nl + 1) {
            self.fill_powers(m, &mut pw);
            let mut cr = DoubleWide::new();
            let mut ci = DoubleWide::new();
            for ((s, pr), w) in st
                .chunks_exact(2)
                .zip(prev.chunks_exact(2))
                .zip(pw.iter())
            {
                cr.add_scaled_two(*w, s[0].parts());
                cr.add_scaled_two(*w, pr[0].half());
                ci.add_scaled_two(*w, s[1].parts());
                ci.add_scaled_two(*w, pr[1].half());
            }
            let w = if m == 0 { half_w } else { S::one() };
            f[m - p] = -Complex::new(cr.value(), ci.value()) * w;
        }

        for (row, bv) in self.dense_rows.iter().zip(b.iter()) {
            for (fv, rv) in f.iter_mut().zip(row.iter()) {
                *fv = *fv + *bv * *rv;
            }
        }
        Ok(RadialVector::fourier(f))
    }

    /// Full transform, coordinate samples to Bessel coefficients.
    pub fn forward(&self, x: &RadialVector<S>) -> Result<RadialVector<S>> {
        self.ftb_forward(&self.fourier_forward(x)?)
    }

    /// Full inverse transform, Bessel coefficients to coordinate samples.
    pub fn inverse(&self, x: &RadialVector<S>) -> Result<RadialVector<S>> {
        self.fourier_inverse(&self.ftb_inverse(x)?)
    }

    /// One dense row of the mixing matrix, built entry by entry from the
    /// polynomial difference form rather than the monomial expansion; the
    /// verification route for the recurrence path.
    pub fn ftb_dense_row(&self, logical: usize) -> Result<Vec<S>> {
        let p = self.momentum.parity_offset();
        let n0 = self.momentum.first_regular();
        let nl = self.momentum.upper();
        if logical < p || logical > nl {
            return Err(Error::Domain(format!(
                "row {logical} outside the index range {p}..={nl}"
            )));
        }
        if logical < n0 {
            return Ok(self.dense_rows[logical - p].clone());
        }
        regular_dense_row(
            self.degree,
            logical,
            p,
            self.radial.count(),
            self.alphas[logical - p],
        )
    }

    /// Dense N×N mixing matrix in row-major slot order, for verification
    /// and small problems.
    pub fn materialize_ftb(&self) -> Result<Vec<S>> {
        let n = self.radial.count();
        let p = self.momentum.parity_offset();
        let mut out = Vec::with_capacity(n * n);
        for j in 0..n {
            out.extend_from_slice(&self.ftb_dense_row(j + p)?);
        }
        Ok(out)
    }

    /// Momentum nodes k_n in slot order.
    pub fn momenta(&self) -> Vec<S> {
        self.momentum.nodes()
    }

    /// Momenta shifted so the matching exact spherical Bessel function
    /// shares the plan's boundary condition: χ_ℓ(k r_max) = 0 for even
    /// degrees, χ'_ℓ(k r_max) = 0 for odd. Slots below the first regular
    /// index keep their unshifted nodes (no completion row oscillates like
    /// a Bessel function, so no root is attached to them). Near the
    /// classical turning point the true roots thin out to a spacing wider
    /// than Δk and the lowest regular modes may have no root in reach; that
    /// surfaces as a numeric error naming the mode.
    pub fn corrected_momenta(&self) -> Result<Vec<S>> {
        let mut out = self.momenta();
        let p = self.momentum.parity_offset();
        for logical in self.momentum.first_regular()..=self.momentum.upper() {
            out[logical - p] = self.corrected_momentum(logical)?;
        }
        Ok(out)
    }

    /// Corrected momentum for one logical mode, or the plain node when the
    /// mode lies below the first regular index. Errors when the mode's
    /// bracket holds no boundary root.
    pub fn corrected_momentum(&self, logical: usize) -> Result<S> {
        let kn = self.momentum.node(logical);
        if self.degree == 0 || logical < self.momentum.first_regular() {
            // sin(k_n r_max) = 0 holds exactly at the plain nodes, and no
            // completion row oscillates like a Bessel function.
            return Ok(kn);
        }
        let l = self.degree;
        let rmax = self.radial.extent();
        let dk = self.momentum.step();
        let shift = S::of_usize(l * (l + 1)) * dk * dk / (S::of(2.0) * S::PI() * S::PI());
        let seed = (kn - shift / kn) * rmax;
        Ok(boundary_root(l, kn * rmax, seed)? / rmax)
    }

    /// Synthesizes the n-th basis function on the radial nodes by running
    /// the inverse transform on a unit coefficient vector. For regular n
    /// this converges to χ_ℓ(k_n r) as the grid grows; at degree 0 it is
    /// sin(k_n r) exactly.
    pub fn basis_function(&self, logical: usize) -> Result<Vec<S>> {
        let p = self.momentum.parity_offset();
        let nl = self.momentum.upper();
        if logical < p || logical > nl {
            return Err(Error::Domain(format!(
                "mode {logical} outside the index range {p}..={nl}"
            )));
        }
        let n = self.radial.count();
        let mut e = vec![Complex::<S>::zero(); n];
        e[logical - p] = Complex::new(S::one(), S::zero());
        let psi = self.inverse(&RadialVector::bessel(e))?;
        let scale = (self.radial.extent() / S::of(2.0)).sqrt() / self.radial.step().sqrt();
        Ok(psi.values().iter().map(|z| z.re * scale).collect())
    }
}

/// One regular row of the mixing matrix in dense form, with the normalizer
/// folded in.
fn regular_dense_row<S: Real>(
    degree: usize,
    logical: usize,
    p: usize,
    count: usize,
    alpha: S,
) -> Result<Vec<S>> {
    let mut row = vec![S::zero(); count];
    let half = S::of(0.5);
    let half_w = S::of(0.5).sqrt();
    for m in p..=logical.min(count + p - 1) {
        let d: S = ddlop_entry(degree, (logical - m) as i64, 2 * logical)?;
        let theta = if m == logical { half } else { S::one() };
        let w = if m == 0 { half_w } else { S::one() };
        let mut t = theta * d * w;
        if m == logical {
            t = t + S::one();
        }
        row[m - p] = alpha * t;
    }
    Ok(row)
}

/// Polynomial-difference entry used by the dense rows. Near-diagonal rows
/// have raw entries far larger than the unit row norm, so their relative
/// accuracy has to cover that headroom; entries there go through exact
/// rational evaluation, the rest through the degree recurrence.
fn ddlop_entry<S: Real>(degree: usize, index: i64, extent: usize) -> Result<S> {
    let strategy = if extent < 8 * degree {
        EvalStrategy::ExactCoefficient
    } else {
        EvalStrategy::DegreeRecurrence
    };
    ddlop_eval(degree, index, extent, strategy)
}

/// Solves χ_ℓ(x) = 0 (even ℓ) or χ'_ℓ(x) = 0 (odd ℓ) near `center`, inside
/// the bracket center ± π/2, by Newton steps with bisection fallback.
fn boundary_root<S: Real>(l: usize, center: S, seed: S) -> Result<S> {
    let even = l % 2 == 0;
    let g = |x: S| -> Result<(S, S)> {
        let (chi, dchi) = chi_pair(l, x)?;
        if even {
            Ok((chi, dchi))
        } else {
            Ok((dchi, chi_second(l, x, chi)))
        }
    };
    let half_pi = S::PI() * S::of(0.5);
    let mut lo = center - half_pi;
    let mut hi = center + half_pi;
    let (mut glo, _) = g(lo)?;
    let (ghi, _) = g(hi)?;
    if (glo > S::zero()) == (ghi > S::zero()) {
        return Err(Error::Numeric(format!(
            "no boundary root bracketed near k r_max = {:?} at degree {l}",
            center
        )));
    }
    let tol = S::of(1e-10).max(S::epsilon() * S::of(100.0));
    let mut x = seed.max(lo + S::epsilon() * center.fabs()).min(hi);
    for _ in 0..200 {
        let (gx, dgx) = g(x)?;
        if gx.fabs() < tol {
            return Ok(x);
        }
        if (gx > S::zero()) == (glo > S::zero()) {
            lo = x;
            glo = gx;
        } else {
            hi = x;
        }
        let step = gx / dgx;
        let newton = x - step;
        x = if step.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            (lo + hi) * S::of(0.5)
        };
    }
    Err(Error::NonConvergence(format!(
        "boundary root iteration stalled near k r_max = {:?} at degree {l}",
        center
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bessel::sph_j;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_vector(repr: Representation, n: usize, rng: &mut StdRng) -> RadialVector<f64> {
        let values = (0..n)
            .map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        RadialVector::new(repr, values)
    }

    fn plan(l: usize, n: usize) -> RadialTransformPlan<f64> {
        RadialTransformPlan::new(l, RadialGrid::new(0.1, n).unwrap()).unwrap()
    }

    #[test]
    fn grid_layout() {
        let g = RadialGrid::new(0.25f64, 8).unwrap();
        assert_eq!(g.node(0), 0.125);
        assert_eq!(g.extent(), 2.0);
        let m = MomentumGrid::for_degree(3, &g);
        assert_eq!(m.parity_offset(), 0);
        assert_eq!(m.upper(), 7);
        assert_eq!(m.first_regular(), 2);
        assert!((m.step() - std::f64::consts::PI / 2.0).abs() < 1e-15);
        assert_eq!(m.weight(0), 0.5 * m.step());
        assert_eq!(m.weight(3), m.step());
        let even = MomentumGrid::for_degree(4, &g);
        assert_eq!(even.parity_offset(), 1);
        assert_eq!(even.upper(), 8);
        assert_eq!(even.first_regular(), 3);
    }

    #[test]
    fn degree_zero_mixing_is_identity() {
        let pl = plan(0, 128);
        let mut rng = StdRng::seed_from_u64(7);
        let x = random_vector(Representation::Fourier, 128, &mut rng);
        let b = pl.ftb_forward(&x).unwrap();
        for (a, e) in b.values().iter().zip(x.values()) {
            assert!((a - e).norm() < 1e-15);
        }
        let dense = pl.materialize_ftb().unwrap();
        for j in 0..128 {
            for m in 0..128 {
                let want = if j == m { 1.0 } else { 0.0 };
                assert_eq!(dense[j * 128 + m], want);
            }
        }
    }

    #[test]
    fn single_extra_row_at_degree_one() {
        let pl = plan(1, 64);
        let nl = pl.momentum().upper() as f64;
        let a = (2.0 / (2.0 * nl + 1.0)).sqrt();
        let row = pl.ftb_dense_row(0).unwrap();
        assert!((row[0] - a / 2.0f64.sqrt()).abs() < 1e-14);
        for v in &row[1..] {
            assert!((v - a).abs() < 1e-14);
        }
    }

    #[test]
    fn dense_rows_are_orthonormal() {
        for (l, n) in [(1usize, 48usize), (2, 48), (5, 64), (8, 64), (16, 96)] {
            let pl = plan(l, n);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|j| pl.ftb_dense_row(j + pl.momentum().parity_offset()).unwrap())
                .collect();
            let mut worst = 0.0f64;
            for a in 0..n {
                for b in a..n {
                    let dot: f64 = rows[a].iter().zip(&rows[b]).map(|(x, y)| x * y).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((dot - want).abs());
                }
            }
            assert!(worst < 1e-12, "l={l} worst={worst:e}");
        }
    }

    #[test]
    fn fast_forward_matches_dense() {
        let mut rng = StdRng::seed_from_u64(11);
        for (l, n) in [(1usize, 33usize), (2, 40), (5, 97), (9, 128), (16, 256)] {
            let pl = plan(l, n);
            let x = random_vector(Representation::Fourier, n, &mut rng);
            let fast = pl.ftb_forward(&x).unwrap();
            let dense = pl.materialize_ftb().unwrap();
            let scale = x.norm();
            for j in 0..n {
                let mut acc = Complex::new(0.0, 0.0);
                for m in 0..n {
                    acc += x.values()[m] * dense[j * n + m];
                }
                let err = (fast.values()[j] - acc).norm();
                assert!(err < 1e-12 * scale, "l={l} n={n} row {j}: {err:e}");
            }
        }
    }

    #[test]
    fn fast_inverse_matches_dense_transpose() {
        let mut rng = StdRng::seed_from_u64(13);
        for (l, n) in [(1usize, 33usize), (4, 50), (7, 80), (12, 160)] {
            let pl = plan(l, n);
            let x = random_vector(Representation::Bessel, n, &mut rng);
            let fast = pl.ftb_inverse(&x).unwrap();
            let dense = pl.materialize_ftb().unwrap();
            let scale = x.norm();
            for m in 0..n {
                let mut acc = Complex::new(0.0, 0.0);
                for j in 0..n {
                    acc += x.values()[j] * dense[j * n + m];
                }
                let err = (fast.values()[m] - acc).norm();
                assert!(err < 1e-12 * scale, "l={l} n={n} col {m}: {err:e}");
            }
        }
    }

    #[test]
    fn round_trip_and_norm_preservation() {
        let mut rng = StdRng::seed_from_u64(17);
        for l in [0usize, 1, 2, 3, 6, 11, 16] {
            let n = 120;
            let pl = plan(l, n);
            let x = random_vector(Representation::Coordinate, n, &mut rng);
            let b = pl.forward(&x).unwrap();
            assert_eq!(b.repr(), Representation::Bessel);
            assert!((b.norm() - x.norm()).abs() < 1e-12 * x.norm(), "l={l}");
            let back = pl.inverse(&b).unwrap();
            for (a, e) in back.values().iter().zip(x.values()) {
                assert!((a - e).norm() < 1e-12, "l={l}");
            }
        }
    }

    #[test]
    fn representation_and_length_checks() {
        let pl = plan(2, 32);
        let x = RadialVector::<f64>::fourier(vec![Complex::new(1.0, 0.0); 32]);
        assert!(pl.forward(&x).is_err());
        assert!(pl.ftb_forward(&x).is_ok());
        let short = RadialVector::<f64>::coordinate(vec![Complex::new(1.0, 0.0); 16]);
        assert!(pl.forward(&short).is_err());
        assert!(RadialTransformPlan::<f64>::new(65, RadialGrid::new(0.1, 256).unwrap()).is_err());
        assert!(RadialTransformPlan::<f64>::new(40, RadialGrid::new(0.1, 12).unwrap()).is_err());
    }

    #[test]
    fn corrected_momenta_solve_boundary_condition() {
        for l in [0usize, 1, 2, 3, 4] {
            let pl = plan(l, 128);
            let rmax = pl.radial().extent();
            let plain = pl.momenta();
            let fixed = pl.corrected_momenta().unwrap();
            let n0 = pl.momentum().first_regular();
            let p = pl.momentum().parity_offset();
            for j in 0..128 {
                let logical = j + p;
                if logical < n0 {
                    assert_eq!(fixed[j], plain[j]);
                    continue;
                }
                let (chi, dchi) = chi_pair(l, fixed[j] * rmax).unwrap();
                let resid = if l % 2 == 0 { chi } else { dchi };
                assert!(resid.abs() < 1e-10, "l={l} n={logical}: {resid:e}");
                assert!((fixed[j] - plain[j]).abs() < pl.momentum().step() / 2.0);
            }
        }
    }

    #[test]
    fn corrected_momenta_report_missing_roots() {
        // at degree 5 the lowest regular mode sits where the derivative
        // roots are spaced wider than Δk: no root to attach
        let err = plan(5, 128).corrected_momenta().unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("degree 5"), "{msg}");
    }

    #[test]
    fn corrected_momenta_match_seed_asymptotically() {
        // the seed is the leading boundary phase shift; the solved root
        // should deviate from it at the next order down in 1/k
        let pl = plan(3, 256);
        let fixed = pl.corrected_momenta().unwrap();
        let plain = pl.momenta();
        let dk = pl.momentum().step();
        let shift = |n: usize| {
            let kn = plain[n];
            3.0 * 4.0 * dk * dk / (2.0 * std::f64::consts::PI.powi(2) * kn)
        };
        for n in [20usize, 60, 120] {
            let seed = plain[n] - shift(n);
            let gap = (fixed[n] - seed).abs();
            assert!(
                gap < 2.0 * shift(n) * shift(n) / plain[n],
                "n={n} gap={gap:e}"
            );
        }
    }

    #[test]
    fn degree_zero_basis_is_exact_sine() {
        let pl = plan(0, 64);
        let ks = pl.momenta();
        for n in [1usize, 5, 30] {
            let chi = pl.basis_function(n).unwrap();
            for (i, v) in chi.iter().enumerate() {
                let want = (ks[n - 1] * pl.radial().node(i)).sin();
                assert!((v - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn basis_functions_converge_to_spherical_bessel() {
        // fixed momentum, growing box: deviation from χ_ℓ(kr) in the inner
        // region falls as Δk²
        let l = 2usize;
        let dr = 0.4f64;
        // 8Δk on the smallest grid, ≈ 0.490873843, and a shared node of all
        // three grids
        let k = 8.0 * std::f64::consts::PI / 51.2;
        let mut errs = Vec::new();
        for count in [128usize, 256, 512] {
            let grid = RadialGrid::new(dr, count).unwrap();
            let pl = RadialTransformPlan::new(l, grid).unwrap();
            let dk = pl.momentum().step();
            let n = (k / dk).round() as usize;
            assert!((pl.momentum().node(n) - k).abs() < 1e-12);
            let chi = pl.basis_function(n).unwrap();
            // fixed physical window r < 6.4 on every grid; a window growing
            // with the box would pick up the k-shift deviation ~Δk²·r and
            // cancel one convergence order
            let mut worst = 0.0f64;
            for i in 0..16 {
                let r = pl.radial().node(i);
                let x = k * r;
                let want = x * sph_j(l, x).unwrap();
                worst = worst.max((chi[i] - want).abs());
            }
            errs.push(worst);
        }
        let r1 = errs[0] / errs[1];
        let r2 = errs[1] / errs[2];
        assert!(r1 > 3.0 && r1 < 5.0, "ratios {errs:?}");
        assert!(r2 > 3.0 && r2 < 5.0, "ratios {errs:?}");
    }

    #[test]
    fn completion_modes_hold_nonregular_small_r_content() {
        // regular modes vanish like r^{ℓ+1} near the origin; the completion
        // modes carry exactly the content that cannot, so their inner-region
        // weight dwarfs a regular mode's
        let pl = plan(5, 128);
        let low = pl.basis_function(0).unwrap();
        let regular = pl.basis_function(pl.momentum().first_regular()).unwrap();
        let inner: f64 = low[..8].iter().map(|v| v.abs()).sum();
        let reg_inner: f64 = regular[..8].iter().map(|v| v.abs()).sum();
        assert!(
            inner > reg_inner * 100.0,
            "inner={inner:e} regular={reg_inner:e}"
        );
    }

    #[test]
    #[ignore]
    fn diag_entry_accuracy() {
        for deg in [8usize, 12, 16, 24, 32] {
            for mult in [2usize, 3, 4, 5, 6, 8, 10, 12] {
                let extent = mult * deg;
                let mut worst = 0.0f64;
                for idx in 0..=(extent as i64 / 2) {
                    let exact: f64 =
                        ddlop_eval(deg, idx, extent, EvalStrategy::ExactCoefficient).unwrap();
                    let rec: f64 =
                        ddlop_eval(deg, idx, extent, EvalStrategy::DegreeRecurrence).unwrap();
                    let scale = exact.abs().max(1e-300);
                    worst = worst.max((rec - exact).abs() / scale);
                }
                println!("deg={deg:2} extent/deg={mult:2} worst_rel={worst:.3e}");
            }
        }
    }

    #[test]
    #[ignore]
    fn diag_fast_row_errors() {
        let mut rng = StdRng::seed_from_u64(11);
        for (l, n) in [(12usize, 160usize), (16, 256)] {
            let pl = plan(l, n);
            let p = pl.momentum().parity_offset();
            let n0 = pl.momentum().first_regular();
            let x = random_vector(Representation::Fourier, n, &mut rng);
            let fast = pl.ftb_forward(&x).unwrap();
            let scale = x.norm();
            println!("l={l} n={n} rec_start={}", pl.rec_start);
            for j in 0..n {
                let logical = j + p;
                if logical < n0 || (logical > 4 * l && !logical.is_multiple_of(32)) {
                    continue;
                }
                let d0: f64 = ddlop_eval(l, 0, 2 * logical, EvalStrategy::ExactCoefficient)
                    .unwrap();
                let alpha = (1.0 - d0 * d0 / 4.0).sqrt().recip();
                let mut acc = Complex::new(0.0, 0.0);
                let mut raw_max = 0.0f64;
                for m in p..=logical.min(n + p - 1) {
                    let d: f64 =
                        ddlop_eval(l, (logical - m) as i64, 2 * logical, EvalStrategy::ExactCoefficient)
                            .unwrap();
                    raw_max = raw_max.max(d.abs());
                    let theta = if m == logical { 0.5 } else { 1.0 };
                    let w = if m == 0 { 0.5f64.sqrt() } else { 1.0 };
                    let mut t = theta * d * w;
                    if m == logical {
                        t += 1.0;
                    }
                    acc += x.values()[m - p] * (alpha * t);
                }
                let err = (fast.values()[j] - acc).norm() / scale;
                let mono_mass: f64 = if logical >= pl.rec_start {
                    let xi = &pl.xi[(logical - pl.rec_start) * pl.nnu..][..pl.nnu];
                    let mut pw = vec![Twofold::of(0.0); pl.nnu];
                    pl.fill_powers(logical, &mut pw);
                    xi.iter()
                        .zip(&pw)
                        .map(|(c, w)| c.hi.abs() * w.hi * alpha * logical as f64)
                        .sum()
                } else {
                    0.0
                };
                println!(
                    "  row {logical:3} err={err:.3e} entry_mass={:.3e} mono_mass={mono_mass:.3e}",
                    alpha * raw_max
                );
            }
        }
    }

    #[test]
    fn f32_plan_smoke() {
        let grid = RadialGrid::new(0.1f32, 48).unwrap();
        let pl = RadialTransformPlan::new(2, grid).unwrap();
        let x = RadialVector::sample_real(pl.radial(), |r| (-r * r).exp());
        let b = pl.forward(&x).unwrap();
        let back = pl.inverse(&b).unwrap();
        for (a, e) in back.values().iter().zip(x.values()) {
            assert!((a - e).norm() < 1e-5);
        }
    }
}
