//! Three-dimensional discrete variable representation: Gauss-Legendre
//! colatitude nodes, uniform azimuth nodes, the unitary map between node
//! values and spherical-harmonic channels, the combined transform to
//! spherical-wave coefficients on a unified momentum grid, and application
//! of the Hamiltonian matrix.
//!
//! A wavefunction sample carries the volume element: ψ_ijk =
//! Ψ(r_i, arccos η_j, φ_k)·r_i·√(Δr Δη_j Δφ), so the squared vector norm
//! is the discretized ∫|Ψ|²d³r and every transform stage is orthogonal.

use num_complex::Complex;
use num_traits::Zero;
use rayon::prelude::*;
use rustdct::DctPlanner;

use crate::error::{Error, Result};
use crate::radial::{RadialGrid, RadialTransformPlan, RadialVector};
use crate::real::Real;

/// Nodes (ascending) and weights of the n-point Gauss-Legendre rule on
/// [−1, 1], accurate to 1e−14; exact for polynomials of degree ≤ 2n−1.
pub fn gauss_legendre<S: Real>(n: usize) -> Result<(Vec<S>, Vec<S>)> {
    if n == 0 {
        return Err(Error::Domain("quadrature needs at least one node".into()));
    }
    let mut nodes = vec![S::zero(); n];
    let mut weights = vec![S::zero(); n];
    for i in 0..n.div_ceil(2) {
        // Tricomi-style initial guess, then Newton on P_n
        let mut x = S::of(
            (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos(),
        );
        let mut deriv = S::one();
        for _ in 0..64 {
            let (p, dp) = legendre_pair(n, x);
            deriv = dp;
            let dx = p / dp;
            x = x - dx;
            if dx.fabs() <= S::of(1e-16) * x.fabs().max(S::one()) {
                let (_, dp) = legendre_pair(n, x);
                deriv = dp;
                break;
            }
        }
        let w = S::of(2.0) / ((S::one() - x * x) * deriv * deriv);
        // roots come in ± pairs; store both ends symmetrically
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = S::zero();
    }
    Ok((nodes, weights))
}

/// P_n(x) and P'_n(x) by the degree recurrence.
fn legendre_pair<S: Real>(n: usize, x: S) -> (S, S) {
    let mut p_prev = S::one();
    let mut p = x;
    if n == 0 {
        return (S::one(), S::zero());
    }
    for k in 2..=n {
        let kf = S::of_usize(k);
        let next = ((S::of_usize(2 * k - 1)) * x * p - (kf - S::one()) * p_prev) / kf;
        p_prev = p;
        p = next;
    }
    let dp = S::of_usize(n) * (x * p - p_prev) / (x * x - S::one());
    (p, dp)
}

/// Normalized associated Legendre values P̄_l^m(x) for l = m..=l_max at one
/// point, with ∫P̄² dx = 1 over [−1, 1].
fn normalized_assoc_legendre<S: Real>(l_max: usize, m: usize, x: S) -> Vec<S> {
    let mut out = Vec::with_capacity(l_max + 1 - m);
    let s = ((S::one() - x) * (S::one() + x)).sqrt();
    // seed P̄_m^m, then one step up in l, then the three-term recurrence
    let mut pmm = (S::of(0.5)).sqrt();
    for k in 1..=m {
        pmm = -(S::of_usize(2 * k + 1) / S::of_usize(2 * k)).sqrt() * s * pmm;
    }
    out.push(pmm);
    if l_max == m {
        return out;
    }
    let mut prev = pmm;
    let mut cur = (S::of_usize(2 * m + 3)).sqrt() * x * pmm;
    out.push(cur);
    for l in (m + 2)..=l_max {
        let lf = l as i64;
        let mf = m as i64;
        let a = (S::of_i64(4 * lf * lf - 1) / S::of_i64(lf * lf - mf * mf)).sqrt();
        let b = (S::of_i64((lf - 1) * (lf - 1) - mf * mf)
            / S::of_i64(4 * (lf - 1) * (lf - 1) - 1))
        .sqrt();
        let next = a * (x * cur - b * prev);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out
}

/// One spherical-harmonic channel (l, m).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Channel {
    pub degree: usize,
    pub azimuthal: i64,
}

/// Angular grids and the tables of the node-to-channel transform.
///
/// Colatitude uses Gauss-Legendre nodes η_j with weights Δη_j; azimuth uses
/// N_φ uniform nodes φ_k = Δφ(k−1). Channels run over l < N_θ and the
/// signed azimuthal frequencies resolved by N_φ nodes, restricted to
/// |m| ≤ l; the map to channels is an isometry whose adjoint reconstructs
/// node values exactly on that resolved subspace.
#[derive(Clone, Debug)]
pub struct AngularBasis<S> {
    n_theta: usize,
    n_phi: usize,
    eta: Vec<S>,
    deta: Vec<S>,
    /// signed frequency per azimuthal transform slot
    freqs: Vec<i64>,
    /// channels grouped by frequency slot; group f occupies
    /// channel_offsets[f]..channel_offsets[f+1]
    channels: Vec<Channel>,
    channel_offsets: Vec<usize>,
    /// per channel: P̄_l^m(η_j)·√Δη_j over j
    projector: Vec<Vec<S>>,
    /// twiddle[f·N_φ + k] = e^{i m_f φ_k}·√(Δφ/2π)
    twiddle: Vec<Complex<S>>,
    /// unit direction (x, y, z) of node (j, k)
    directions: Vec<[S; 3]>,
}

impl<S: Real> AngularBasis<S> {
    pub fn build(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta == 0 || n_phi == 0 {
            return Err(Error::Domain(
                "angular basis needs at least one node per angle".into(),
            ));
        }
        let (eta, deta) = gauss_legendre::<S>(n_theta)?;
        // signed DFT frequencies in slot order 0, 1, …, ⌊N_φ/2⌋, −…, −1
        let freqs: Vec<i64> = (0..n_phi)
            .map(|k| {
                if k <= n_phi / 2 {
                    k as i64
                } else {
                    k as i64 - n_phi as i64
                }
            })
            .collect();
        let mut channels = Vec::new();
        let mut channel_offsets = Vec::with_capacity(n_phi + 1);
        channel_offsets.push(0);
        for &m in &freqs {
            for l in (m.unsigned_abs() as usize)..n_theta {
                channels.push(Channel {
                    degree: l,
                    azimuthal: m,
                });
            }
            channel_offsets.push(channels.len());
        }
        let mut projector = Vec::with_capacity(channels.len());
        for ch in &channels {
            let m = ch.azimuthal.unsigned_abs() as usize;
            let row: Vec<S> = eta
                .iter()
                .zip(&deta)
                .map(|(&x, &w)| {
                    let tail = normalized_assoc_legendre(ch.degree, m, x);
                    tail[ch.degree - m] * w.sqrt()
                })
                .collect();
            projector.push(row);
        }
        let dphi = S::of(2.0) * S::PI() / S::of_usize(n_phi);
        let amp = (dphi / (S::of(2.0) * S::PI())).sqrt();
        let mut twiddle = Vec::with_capacity(n_phi * n_phi);
        for &m in &freqs {
            for k in 0..n_phi {
                let arg = S::of_i64(m) * dphi * S::of_usize(k);
                twiddle.push(Complex::new(arg.cos(), arg.sin()) * amp);
            }
        }
        let mut directions = Vec::with_capacity(n_theta * n_phi);
        for &x in &eta {
            let sin_theta = ((S::one() - x) * (S::one() + x)).sqrt();
            for k in 0..n_phi {
                let phi = dphi * S::of_usize(k);
                directions.push([sin_theta * phi.cos(), sin_theta * phi.sin(), x]);
            }
        }
        Ok(AngularBasis {
            n_theta,
            n_phi,
            eta,
            deta,
            freqs,
            channels,
            channel_offsets,
            projector,
            twiddle,
            directions,
        })
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    /// Colatitude nodes η_j = cos θ_j, ascending.
    pub fn eta(&self) -> &[S] {
        &self.eta
    }

    /// Colatitude quadrature weights Δη_j.
    pub fn weights(&self) -> &[S] {
        &self.deta
    }

    /// Azimuth node φ_k.
    pub fn phi(&self, k: usize) -> S {
        S::of(2.0) * S::PI() / S::of_usize(self.n_phi) * S::of_usize(k)
    }

    pub fn channels(&self) -> &[Channel] {
        &self.channels
    }

    /// Number of angular nodes per radial shell.
    pub fn node_count(&self) -> usize {
        self.n_theta * self.n_phi
    }

    /// Unit direction vector of node (j, k).
    pub fn direction(&self, j: usize, k: usize) -> [S; 3] {
        self.directions[j * self.n_phi + k]
    }

    /// Channel values from node values on one shell. `modified` applies the
    /// extra i^l phase per channel.
    pub fn forward_shell(
        &self,
        nodes: &[Complex<S>],
        channels: &mut [Complex<S>],
        modified: bool,
    ) {
        debug_assert_eq!(nodes.len(), self.node_count());
        debug_assert_eq!(channels.len(), self.channels.len());
        let np = self.n_phi;
        let mut freq_nodes = vec![Complex::<S>::zero(); self.n_theta];
        for f in 0..np {
            let tw = &self.twiddle[f * np..(f + 1) * np];
            for (j, fj) in freq_nodes.iter_mut().enumerate() {
                let mut acc = Complex::<S>::zero();
                for (k, t) in tw.iter().enumerate() {
                    acc = acc + *t * nodes[j * np + k];
                }
                *fj = acc;
            }
            for c in self.channel_offsets[f]..self.channel_offsets[f + 1] {
                let row = &self.projector[c];
                let mut acc = Complex::<S>::zero();
                for (p, fj) in row.iter().zip(&freq_nodes) {
                    acc = acc + fj.scale(*p);
                }
                channels[c] = if modified {
                    acc * quarter_phase::<S>(self.channels[c].degree)
                } else {
                    acc
                };
            }
        }
    }

    /// Node values from channel values on one shell; adjoint of
    /// [`Self::forward_shell`].
    pub fn inverse_shell(
        &self,
        channels: &[Complex<S>],
        nodes: &mut [Complex<S>],
        modified: bool,
    ) {
        debug_assert_eq!(nodes.len(), self.node_count());
        debug_assert_eq!(channels.len(), self.channels.len());
        let np = self.n_phi;
        let mut freq_nodes = vec![Complex::<S>::zero(); self.n_theta];
        for v in nodes.iter_mut() {
            *v = Complex::zero();
        }
        for f in 0..np {
            for v in freq_nodes.iter_mut() {
                *v = Complex::zero();
            }
            for c in self.channel_offsets[f]..self.channel_offsets[f + 1] {
                let mut cv = channels[c];
                if modified {
                    cv = cv * quarter_phase::<S>(self.channels[c].degree).conj();
                }
                for (fj, p) in freq_nodes.iter_mut().zip(&self.projector[c]) {
                    *fj = *fj + cv.scale(*p);
                }
            }
            let tw = &self.twiddle[f * np..(f + 1) * np];
            for (j, fj) in freq_nodes.iter().enumerate() {
                for (k, t) in tw.iter().enumerate() {
                    nodes[j * np + k] = nodes[j * np + k] + t.conj() * fj;
                }
            }
        }
    }
}

/// i^l reduced mod 4.
fn quarter_phase<S: Real>(l: usize) -> Complex<S> {
    match l % 4 {
        0 => Complex::new(S::one(), S::zero()),
        1 => Complex::new(S::zero(), S::one()),
        2 => Complex::new(-S::one(), S::zero()),
        _ => Complex::new(S::zero(), -S::one()),
    }
}

/// Wavefunction samples on the (r_i, η_j, φ_k) grid, scaled by
/// r_i·√(Δr Δη_j Δφ); layout (i·N_θ + j)·N_φ + k.
#[derive(Clone, Debug)]
pub struct SphericalField<S> {
    n_r: usize,
    n_theta: usize,
    n_phi: usize,
    data: Vec<Complex<S>>,
}

impl<S: Real> SphericalField<S> {
    pub fn zero(grid: &RadialGrid<S>, basis: &AngularBasis<S>) -> Self {
        SphericalField {
            n_r: grid.count(),
            n_theta: basis.n_theta(),
            n_phi: basis.n_phi(),
            data: vec![Complex::zero(); grid.count() * basis.node_count()],
        }
    }

    /// Samples a physical wavefunction Ψ(r, cos θ, φ), applying the volume
    /// scaling.
    pub fn sample(
        grid: &RadialGrid<S>,
        basis: &AngularBasis<S>,
        f: impl Fn(S, S, S) -> Complex<S>,
    ) -> Self {
        let mut field = Self::zero(grid, basis);
        let dphi = S::of(2.0) * S::PI() / S::of_usize(basis.n_phi());
        let dr = grid.step();
        let mut idx = 0;
        for i in 0..field.n_r {
            let r = grid.node(i);
            for j in 0..field.n_theta {
                let eta = basis.eta()[j];
                let scale = r * (dr * basis.weights()[j] * dphi).sqrt();
                for k in 0..field.n_phi {
                    field.data[idx] = f(r, eta, basis.phi(k)).scale(scale);
                    idx += 1;
                }
            }
        }
        field
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.n_r, self.n_theta, self.n_phi)
    }

    pub fn values(&self) -> &[Complex<S>] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [Complex<S>] {
        &mut self.data
    }

    pub fn at(&self, i: usize, j: usize, k: usize) -> Complex<S> {
        self.data[(i * self.n_theta + j) * self.n_phi + k]
    }

    /// Removes the volume scaling, returning the physical value Ψ at node
    /// (i, j, k).
    pub fn physical_at(
        &self,
        grid: &RadialGrid<S>,
        basis: &AngularBasis<S>,
        i: usize,
        j: usize,
        k: usize,
    ) -> Complex<S> {
        let dphi = S::of(2.0) * S::PI() / S::of_usize(basis.n_phi());
        let scale = grid.node(i) * (grid.step() * basis.weights()[j] * dphi).sqrt();
        self.at(i, j, k).unscale(scale)
    }

    pub fn norm_sq(&self) -> S {
        let mut acc = S::zero();
        let mut carry = S::zero();
        for v in &self.data {
            let term = v.norm_sqr();
            let y = term - carry;
            let t = acc + y;
            carry = (t - acc) - y;
            acc = t;
        }
        acc
    }

    pub fn norm(&self) -> S {
        self.norm_sq().sqrt()
    }

    /// ⟨self|other⟩ with the same fixed summation order every call.
    pub fn inner(&self, other: &Self) -> Complex<S> {
        let mut re = S::zero();
        let mut im = S::zero();
        let mut cre = S::zero();
        let mut cim = S::zero();
        for (a, b) in self.data.iter().zip(&other.data) {
            let p = a.conj() * *b;
            let y = p.re - cre;
            let t = re + y;
            cre = (t - re) - y;
            re = t;
            let y = p.im - cim;
            let t = im + y;
            cim = (t - im) - y;
            im = t;
        }
        Complex::new(re, im)
    }
}

/// Spherical-wave coefficients c_{nlm} on the unified momentum grid
/// k̃_n = nΔk, n = 1..N; layout channel-major, radial contiguous: index
/// c·N + (n−1).
#[derive(Clone, Debug)]
pub struct SpectralField<S> {
    n_r: usize,
    n_channels: usize,
    data: Vec<Complex<S>>,
}

impl<S: Real> SpectralField<S> {
    pub fn zero(n_r: usize, n_channels: usize) -> Self {
        SpectralField {
            n_r,
            n_channels,
            data: vec![Complex::zero(); n_r * n_channels],
        }
    }

    pub fn radial_count(&self) -> usize {
        self.n_r
    }

    pub fn channel_count(&self) -> usize {
        self.n_channels
    }

    pub fn values(&self) -> &[Complex<S>] {
        &self.data
    }

    pub fn values_mut(&mut self) -> &mut [Complex<S>] {
        &mut self.data
    }

    /// Coefficient at unified momentum index n = 1..N of a channel.
    pub fn at(&self, channel: usize, n: usize) -> Complex<S> {
        self.data[channel * self.n_r + (n - 1)]
    }

    pub fn norm_sq(&self) -> S {
        let mut acc = S::zero();
        let mut carry = S::zero();
        for v in &self.data {
            let term = v.norm_sqr();
            let y = term - carry;
            let t = acc + y;
            carry = (t - acc) - y;
            acc = t;
        }
        acc
    }

    pub fn norm(&self) -> S {
        self.norm_sq().sqrt()
    }
}

/// Radial transform plans for every degree an angular basis can produce,
/// sharing one trigonometric planner.
pub struct PlanSet<S: Real> {
    grid: RadialGrid<S>,
    plans: Vec<RadialTransformPlan<S>>,
}

impl<S: Real> PlanSet<S> {
    pub fn build(grid: RadialGrid<S>, n_theta: usize) -> Result<Self> {
        let mut planner = DctPlanner::new();
        let mut plans = Vec::with_capacity(n_theta);
        for degree in 0..n_theta {
            plans.push(RadialTransformPlan::with_planner(
                degree,
                grid.clone(),
                &mut planner,
            )?);
        }
        Ok(PlanSet { grid, plans })
    }

    pub fn grid(&self) -> &RadialGrid<S> {
        &self.grid
    }

    pub fn degree_count(&self) -> usize {
        self.plans.len()
    }

    pub fn plan(&self, degree: usize) -> Result<&RadialTransformPlan<S>> {
        self.plans.get(degree).ok_or_else(|| {
            Error::Config(format!(
                "no radial plan prepared for degree {degree} (have 0..{})",
                self.plans.len()
            ))
        })
    }
}

/// Maps a plan's coefficient slot j to the unified-grid slot u = n−1.
///
/// Even degrees index momenta 1..N already; odd degrees own a logical
/// index 0, whose coefficient is a projection onto a non-regular
/// high-frequency function and is reassigned to the unified slot N
/// carrying k̃_N. The map is a bijection on slots, so no norm is lost.
#[inline]
fn unified_slot(parity_offset: usize, j: usize, n: usize) -> usize {
    if parity_offset == 1 {
        j
    } else {
        (j + n - 1) % n
    }
}

/// Node values to spherical-wave coefficients: the angular map on every
/// radial shell, then the degree-l radial transform of every channel, then
/// the unified-grid slot reassignment.
pub fn spectral_forward<S: Real>(
    plans: &PlanSet<S>,
    basis: &AngularBasis<S>,
    field: &SphericalField<S>,
) -> Result<SpectralField<S>> {
    let n = field.n_r;
    if n != plans.grid().count() || (field.n_theta, field.n_phi) != (basis.n_theta(), basis.n_phi())
    {
        return Err(Error::Domain("field shape does not match grids".into()));
    }
    if basis.n_theta() > plans.degree_count() {
        return Err(Error::Config(format!(
            "plans cover degrees 0..{}, basis needs 0..{}",
            plans.degree_count(),
            basis.n_theta()
        )));
    }
    let nch = basis.channels().len();
    let nodes_per_shell = basis.node_count();
    let mut inter = vec![Complex::<S>::zero(); n * nch];
    for i in 0..n {
        basis.forward_shell(
            &field.data[i * nodes_per_shell..(i + 1) * nodes_per_shell],
            &mut inter[i * nch..(i + 1) * nch],
            false,
        );
    }
    let mut out = SpectralField::zero(n, nch);
    out.data
        .par_chunks_mut(n)
        .enumerate()
        .try_for_each(|(c, chunk)| -> Result<()> {
            let plan = plans.plan(basis.channels()[c].degree)?;
            let radial: Vec<Complex<S>> = (0..n).map(|i| inter[i * nch + c]).collect();
            let coeffs = plan.forward(&RadialVector::coordinate(radial))?;
            let p = plan.momentum().parity_offset();
            for (j, v) in coeffs.values().iter().enumerate() {
                chunk[unified_slot(p, j, n)] = *v;
            }
            Ok(())
        })?;
    Ok(out)
}

/// Adjoint of [`spectral_forward`].
pub fn spectral_inverse<S: Real>(
    plans: &PlanSet<S>,
    basis: &AngularBasis<S>,
    spectral: &SpectralField<S>,
) -> Result<SphericalField<S>> {
    let n = spectral.n_r;
    if n != plans.grid().count() {
        return Err(Error::Domain("spectral shape does not match grids".into()));
    }
    let nch = basis.channels().len();
    if nch != spectral.n_channels {
        return Err(Error::Domain(
            "spectral channel count does not match the basis".into(),
        ));
    }
    let mut inter = vec![Complex::<S>::zero(); n * nch];
    let columns: Vec<Vec<Complex<S>>> = (0..nch)
        .into_par_iter()
        .map(|c| -> Result<Vec<Complex<S>>> {
            let plan = plans.plan(basis.channels()[c].degree)?;
            let p = plan.momentum().parity_offset();
            let chunk = &spectral.data[c * n..(c + 1) * n];
            let mut slots = vec![Complex::<S>::zero(); n];
            for (j, v) in slots.iter_mut().enumerate() {
                *v = chunk[unified_slot(p, j, n)];
            }
            Ok(plan.inverse(&RadialVector::bessel(slots))?.into_values())
        })
        .collect::<Result<Vec<_>>>()?;
    for (c, col) in columns.iter().enumerate() {
        for i in 0..n {
            inter[i * nch + c] = col[i];
        }
    }
    let mut field = SphericalField {
        n_r: n,
        n_theta: basis.n_theta(),
        n_phi: basis.n_phi(),
        data: vec![Complex::zero(); n * basis.node_count()],
    };
    let nodes_per_shell = basis.node_count();
    for i in 0..n {
        basis.inverse_shell(
            &inter[i * nch..(i + 1) * nch],
            &mut field.data[i * nodes_per_shell..(i + 1) * nodes_per_shell],
            false,
        );
    }
    Ok(field)
}

/// Which momenta fill the kinetic diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MomentumModel {
    /// Uniform k̃_n = nΔk for every degree.
    Plain,
    /// Per-degree momenta shifted to the roots of the outer boundary
    /// condition; the reassigned slot keeps k̃_N.
    Corrected,
}

/// The Hamiltonian p²/2 − A⃗(t)·p⃗ + U as diagonal stages between the
/// spectral transforms, with precomputed kinetic momenta and a static
/// potential table.
pub struct HamiltonianOp<S> {
    /// k_{nl} per degree l, indexed by unified slot u = n−1
    momenta: Vec<Vec<S>>,
    /// U at nodes, in SphericalField layout
    potential: Vec<S>,
    model: MomentumModel,
}

impl<S: Real> HamiltonianOp<S> {
    /// Validates the potential table and resolves the momenta choice.
    pub fn new(
        plans: &PlanSet<S>,
        basis: &AngularBasis<S>,
        model: MomentumModel,
        potential: Vec<S>,
    ) -> Result<Self> {
        let n = plans.grid().count();
        if potential.len() != n * basis.node_count() {
            return Err(Error::Domain(format!(
                "potential table has {} entries, the grid has {}",
                potential.len(),
                n * basis.node_count()
            )));
        }
        if let Some(bad) = potential.iter().position(|u| !u.is_finite()) {
            let per_shell = basis.node_count();
            return Err(Error::Numeric(format!(
                "potential is not finite at node (i={}, j={}, k={})",
                bad / per_shell,
                bad % per_shell / basis.n_phi(),
                bad % basis.n_phi()
            )));
        }
        let momenta = unified_momenta(plans, basis.n_theta(), model)?;
        Ok(HamiltonianOp {
            momenta,
            potential,
            model,
        })
    }

    pub fn model(&self) -> MomentumModel {
        self.model
    }

    /// Kinetic momenta of a degree in unified slot order.
    pub fn momenta_for(&self, degree: usize) -> &[S] {
        &self.momenta[degree]
    }

    pub fn potential(&self) -> &[S] {
        &self.potential
    }

    /// H(t)ψ with the vector potential already evaluated at the desired
    /// time.
    pub fn apply(
        &self,
        plans: &PlanSet<S>,
        basis: &AngularBasis<S>,
        field: &SphericalField<S>,
        a: [S; 3],
    ) -> Result<SphericalField<S>> {
        let n = field.n_r;
        let mut c = spectral_forward(plans, basis, field)?;
        let mut kc = c.clone();
        let half = S::of(0.5);
        for (ch, chunk) in kc.data.chunks_mut(n).enumerate() {
            let ks = &self.momenta[basis.channels()[ch].degree];
            for (v, &k) in chunk.iter_mut().zip(ks) {
                *v = v.scale(k * k * half);
            }
        }
        if a.iter().any(|x| !x.is_zero()) {
            let dk = S::PI() / plans.grid().extent();
            momentum_dvr_scale(&mut c, basis, dk, |k_len, dir| {
                Complex::new(k_len * (a[0] * dir[0] + a[1] * dir[1] + a[2] * dir[2]), S::zero())
            })?;
            for (kv, av) in kc.data.iter_mut().zip(&c.data) {
                *kv = *kv - *av;
            }
        }
        let mut out = spectral_inverse(plans, basis, &kc)?;
        for (v, (u, s)) in out.data.iter_mut().zip(self.potential.iter().zip(&field.data)) {
            *v = *v + s.scale(*u);
        }
        Ok(out)
    }
}

/// Rewrites a spectral field as g(k̃_n, n⃗_jk)·c in the momentum DVR:
/// adjoint modified angular transform per momentum shell, diagonal scale,
/// modified angular transform back.
pub(crate) fn momentum_dvr_scale<S: Real>(
    spectral: &mut SpectralField<S>,
    basis: &AngularBasis<S>,
    dk: S,
    g: impl Fn(S, [S; 3]) -> Complex<S>,
) -> Result<()> {
    let n = spectral.n_r;
    let nch = spectral.n_channels;
    let nodes = basis.node_count();
    let mut shell_ch = vec![Complex::<S>::zero(); nch];
    let mut shell_nodes = vec![Complex::<S>::zero(); nodes];
    for u in 0..n {
        for (c, v) in shell_ch.iter_mut().enumerate() {
            *v = spectral.data[c * n + u];
        }
        basis.inverse_shell(&shell_ch, &mut shell_nodes, true);
        let k_len = S::of_usize(u + 1) * dk;
        for (idx, v) in shell_nodes.iter_mut().enumerate() {
            let dir = basis.directions[idx];
            *v = *v * g(k_len, dir);
        }
        basis.forward_shell(&shell_nodes, &mut shell_ch, true);
        for (c, v) in shell_ch.iter().enumerate() {
            spectral.data[c * n + u] = *v;
        }
    }
    Ok(())
}

/// Per-degree kinetic momenta on unified slots, honoring the slot-N
/// reassignment for parity classes that own an index 0.
pub fn unified_momenta<S: Real>(
    plans: &PlanSet<S>,
    n_theta: usize,
    model: MomentumModel,
) -> Result<Vec<Vec<S>>> {
    let n = plans.grid().count();
    let mut out = Vec::with_capacity(n_theta);
    for degree in 0..n_theta {
        let plan = plans.plan(degree)?;
        let slot_momenta = channel_momenta(plan, model);
        let p = plan.momentum().parity_offset();
        let mut unified = vec![S::zero(); n];
        for (j, &k) in slot_momenta.iter().enumerate() {
            unified[unified_slot(p, j, n)] = k;
        }
        out.push(unified);
    }
    Ok(out)
}

/// Kinetic momenta of one degree in transform slot order: plain nodes, the
/// boundary-root shifts when the model asks for them, and the reassigned
/// completion slot of odd parity classes carrying the top momentum NΔk.
/// Near the classical turning point the boundary roots spread out to a
/// spacing wider than Δk and the lowest regular modes of a degree may own
/// no root; those modes sit under the centrifugal barrier, so the plain
/// node stands in there.
pub fn channel_momenta<S: Real>(
    plan: &RadialTransformPlan<S>,
    model: MomentumModel,
) -> Vec<S> {
    let grid = plan.momentum();
    let p = grid.parity_offset();
    let mut out = plan.momenta();
    if model == MomentumModel::Corrected {
        for logical in grid.first_regular()..=grid.upper() {
            if let Ok(k) = plan.corrected_momentum(logical) {
                out[logical - p] = k;
            }
        }
    }
    if p == 0 {
        // the reassigned slot represents a high-momentum projection
        out[0] = S::of_usize(grid.count()) * grid.step();
    }
    out
}
