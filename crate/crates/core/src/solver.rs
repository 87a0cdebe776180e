//! Periodic-grid simulation driver.
//!
//! Populations are stored one plane per discrete velocity (structure of
//! arrays), so streaming is a pure index permutation into a second buffer.
//! Collision is site-local; sites are partitioned across workers and the
//! result is bitwise independent of the partitioning. Diagnostic reductions
//! run serially in a fixed order.

use crate::collision::{collide_internal_site, mrt_site, RelaxationSpec};
use crate::error::{Error, Result};
use crate::hermite::equilibrium_raw_coeffs;
use crate::velset::VelocitySet;
use rayon::prelude::*;
use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

/// Spatial dimension and internal degrees of freedom of the gas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasSpec {
    pub dim: usize,
    pub s_internal: u32,
}

impl GasSpec {
    pub fn monatomic(dim: usize) -> Self {
        Self {
            dim,
            s_internal: 0,
        }
    }

    pub fn with_internal(dim: usize, s_internal: u32) -> Self {
        Self { dim, s_internal }
    }

    /// Adiabatic index `γ = 1 + 2/(D + S)`.
    pub fn gamma(&self) -> f64 {
        1.0 + 2.0 / (self.dim as f64 + self.s_internal as f64)
    }
}

/// Macroscopic fields over the whole grid, site-major.
#[derive(Clone, Debug)]
pub struct MacroFields {
    pub rho: Vec<f64>,
    /// one plane per velocity component
    pub velocity: Vec<Vec<f64>>,
    pub theta: Vec<f64>,
}

const COLLIDE_CHUNK: usize = 256;

/// Populations on a periodic grid, plus the optional internal-energy
/// populations when the gas has internal degrees of freedom.
pub struct LatticeState {
    dims: Vec<usize>,
    ncells: usize,
    set: Arc<VelocitySet>,
    gas: GasSpec,
    n_hermite: usize,
    f: Vec<Vec<f64>>,
    g: Vec<Vec<f64>>,
    back: Vec<Vec<f64>>,
    back_g: Vec<Vec<f64>>,
    post: Vec<f64>,
    post_g: Vec<f64>,
    /// per population: destination cell of each source cell
    shifts: Vec<Vec<u32>>,
    time: u64,
}

impl LatticeState {
    /// Uniform truncated equilibrium everywhere.
    pub fn uniform(
        dims: &[usize],
        set: Arc<VelocitySet>,
        gas: GasSpec,
        n_hermite: usize,
        rho: f64,
        velocity: &[f64],
        theta: f64,
    ) -> Result<Self> {
        let u = velocity.to_vec();
        Self::from_fields(dims, set, gas, n_hermite, |_| (rho, u.clone(), theta))
    }

    /// Builds per-site truncated equilibria from a field function
    /// `cell -> (rho, velocity, theta)`. With internal degrees of freedom the
    /// internal-energy populations start in local equilibrium at the same
    /// temperature.
    pub fn from_fields(
        dims: &[usize],
        set: Arc<VelocitySet>,
        gas: GasSpec,
        n_hermite: usize,
        fields: impl Fn(&[usize]) -> (f64, Vec<f64>, f64),
    ) -> Result<Self> {
        if dims.len() != set.dim() || gas.dim != set.dim() {
            return Err(Error::DimMismatch(format!(
                "grid is {}D, gas is {}D, set `{}` is {}D",
                dims.len(),
                gas.dim,
                set.name(),
                set.dim()
            )));
        }
        if dims.iter().any(|&n| n == 0) {
            return Err(Error::DimMismatch("empty grid".into()));
        }
        let kernel = set.kernel(n_hermite)?;
        let ncells: usize = dims.iter().product();
        let d = set.count();
        let mut state = Self {
            dims: dims.to_vec(),
            ncells,
            shifts: build_shifts(dims, &set),
            gas,
            n_hermite,
            f: vec![vec![0.0; ncells]; d],
            g: if gas.s_internal > 0 {
                vec![vec![0.0; ncells]; d]
            } else {
                Vec::new()
            },
            back: vec![vec![0.0; ncells]; d],
            back_g: if gas.s_internal > 0 {
                vec![vec![0.0; ncells]; d]
            } else {
                Vec::new()
            },
            post: vec![0.0; ncells * d],
            post_g: if gas.s_internal > 0 {
                vec![0.0; ncells * d]
            } else {
                Vec::new()
            },
            set,
            time: 0,
        };
        let mut stacked = vec![0.0; kernel.component_total()];
        let mut site_f = vec![0.0; d];
        let mut cell = vec![0usize; dims.len()];
        for site in 0..ncells {
            state.site_coords(site, &mut cell);
            let (rho, u, theta) = fields(&cell);
            if !(rho > 0.0) {
                return Err(Error::NonPositiveDensity {
                    rho,
                    site: Some(cell.clone()),
                });
            }
            if !(theta > 0.0) {
                return Err(Error::NonPositiveTheta(theta));
            }
            stacked.fill(0.0);
            for n in 0..=n_hermite {
                let a = equilibrium_raw_coeffs(rho, &u, theta, n)?;
                let base = kernel.order_offset(n);
                stacked[base..base + a.components().len()].copy_from_slice(a.components());
            }
            kernel.populations(&stacked, &mut site_f);
            for (i, &v) in site_f.iter().enumerate() {
                state.f[i][site] = v;
                if state.gas.s_internal > 0 {
                    state.g[i][site] = 0.5 * state.gas.s_internal as f64 * theta * v;
                }
            }
        }
        Ok(state)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ncells(&self) -> usize {
        self.ncells
    }

    pub fn set(&self) -> &Arc<VelocitySet> {
        &self.set
    }

    pub fn gas(&self) -> GasSpec {
        self.gas
    }

    pub fn n_hermite(&self) -> usize {
        self.n_hermite
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn f_plane(&self, i: usize) -> &[f64] {
        &self.f[i]
    }

    pub fn f_plane_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.f[i]
    }

    pub fn g_plane(&self, i: usize) -> Option<&[f64]> {
        self.g.get(i).map(|p| p.as_slice())
    }

    pub fn g_plane_mut(&mut self, i: usize) -> Option<&mut [f64]> {
        self.g.get_mut(i).map(|p| p.as_mut_slice())
    }

    /// Gathers the populations of one site.
    pub fn site_populations(&self, site: usize) -> Vec<f64> {
        self.f.iter().map(|plane| plane[site]).collect()
    }

    pub fn site_index(&self, cell: &[usize]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (x, n) in cell.iter().zip(&self.dims) {
            idx += x * stride;
            stride *= n;
        }
        idx
    }

    pub fn site_coords(&self, site: usize, cell: &mut [usize]) {
        let mut rest = site;
        for (slot, n) in cell.iter_mut().zip(&self.dims) {
            *slot = rest % n;
            rest /= n;
        }
    }

    /// Pure advection: population `i` at cell `x` moves to `x + c_i` under
    /// periodic wrap. No arithmetic is performed on the values.
    pub fn stream(&mut self) {
        for (i, plane) in self.f.iter().enumerate() {
            let shift = &self.shifts[i];
            let back = &mut self.back[i];
            for (src, &v) in plane.iter().enumerate() {
                back[shift[src] as usize] = v;
            }
        }
        std::mem::swap(&mut self.f, &mut self.back);
        if self.gas.s_internal > 0 {
            for (i, plane) in self.g.iter().enumerate() {
                let shift = &self.shifts[i];
                let back = &mut self.back_g[i];
                for (src, &v) in plane.iter().enumerate() {
                    back[shift[src] as usize] = v;
                }
            }
            std::mem::swap(&mut self.g, &mut self.back_g);
        }
    }

    /// Applies the collision operator to every site in place.
    pub fn collide(
        &mut self,
        relaxation: &RelaxationSpec,
        tau_internal: Option<f64>,
    ) -> Result<()> {
        self.collide_into_post(relaxation, tau_internal)?;
        let d = self.set.count();
        let post = &self.post;
        self.f.par_iter_mut().enumerate().for_each(|(i, plane)| {
            for (site, v) in plane.iter_mut().enumerate() {
                *v = post[site * d + i];
            }
        });
        if self.gas.s_internal > 0 {
            let post_g = &self.post_g;
            self.g.par_iter_mut().enumerate().for_each(|(i, plane)| {
                for (site, v) in plane.iter_mut().enumerate() {
                    *v = post_g[site * d + i];
                }
            });
        }
        Ok(())
    }

    /// One full update: collide, then stream. Uniform equilibrium is an
    /// exact fixed point; mass, momentum and total energy are conserved to
    /// round-off.
    pub fn step(&mut self, relaxation: &RelaxationSpec, tau_internal: Option<f64>) -> Result<()> {
        self.collide_into_post(relaxation, tau_internal)?;
        let d = self.set.count();
        let post = &self.post;
        let shifts = &self.shifts;
        self.back.par_iter_mut().enumerate().for_each(|(i, back)| {
            let shift = &shifts[i];
            for site in 0..back.len() {
                back[shift[site] as usize] = post[site * d + i];
            }
        });
        std::mem::swap(&mut self.f, &mut self.back);
        if self.gas.s_internal > 0 {
            let post_g = &self.post_g;
            self.back_g
                .par_iter_mut()
                .enumerate()
                .for_each(|(i, back)| {
                    let shift = &shifts[i];
                    for site in 0..back.len() {
                        back[shift[site] as usize] = post_g[site * d + i];
                    }
                });
            std::mem::swap(&mut self.g, &mut self.back_g);
        }
        self.time += 1;
        Ok(())
    }

    fn collide_into_post(
        &mut self,
        relaxation: &RelaxationSpec,
        tau_internal: Option<f64>,
    ) -> Result<()> {
        let kernel = self.set.kernel(self.n_hermite)?;
        let d = self.set.count();
        let f = &self.f;
        let g = &self.g;
        let set = &self.set;
        let gas = self.gas;
        let first_error = |a: Option<(usize, Error)>, b: Option<(usize, Error)>| match (a, b) {
            (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
            (x, None) => x,
            (None, y) => y,
        };
        let failure: Option<(usize, Error)> = if gas.s_internal == 0 {
            self.post
                .par_chunks_mut(COLLIDE_CHUNK * d)
                .enumerate()
                .map(|(chunk, out)| {
                    let mut site_f = vec![0.0; d];
                    let base = chunk * COLLIDE_CHUNK;
                    for (slot, out_site) in out.chunks_mut(d).enumerate() {
                        let site = base + slot;
                        for (i, plane) in f.iter().enumerate() {
                            site_f[i] = plane[site];
                        }
                        if let Err(e) = mrt_site(&kernel, relaxation, &site_f, None, out_site) {
                            return Some((site, e));
                        }
                    }
                    None
                })
                .reduce(|| None, first_error)
        } else {
            let post_g = &mut self.post_g;
            self.post
                .par_chunks_mut(COLLIDE_CHUNK * d)
                .zip(post_g.par_chunks_mut(COLLIDE_CHUNK * d))
                .enumerate()
                .map(|(chunk, (out, out_g))| {
                    let mut site_f = vec![0.0; d];
                    let mut site_g = vec![0.0; d];
                    let base = chunk * COLLIDE_CHUNK;
                    for (slot, (out_site, out_site_g)) in
                        out.chunks_mut(d).zip(out_g.chunks_mut(d)).enumerate()
                    {
                        let site = base + slot;
                        for i in 0..d {
                            site_f[i] = f[i][site];
                            site_g[i] = g[i][site];
                        }
                        if let Err(e) = collide_internal_site(
                            &kernel,
                            set,
                            relaxation,
                            gas.s_internal,
                            tau_internal,
                            &site_f,
                            &site_g,
                            out_site,
                            out_site_g,
                        ) {
                            return Some((site, e));
                        }
                    }
                    None
                })
                .reduce(|| None, first_error)
        };
        if let Some((site, source)) = failure {
            let mut cell = vec![0usize; self.dims.len()];
            self.site_coords(site, &mut cell);
            let source = match source {
                Error::NonPositiveDensity { rho, .. } => Error::NonPositiveDensity {
                    rho,
                    site: Some(cell),
                },
                Error::NegativeInternalEnergy { energy, .. } => Error::NegativeInternalEnergy {
                    energy,
                    site: Some(cell),
                },
                other => other,
            };
            return Err(Error::BlowUp {
                step: self.time,
                source: Box::new(source),
            });
        }
        Ok(())
    }

    /// Density, velocity and temperature fields (total temperature when the
    /// gas has internal degrees of freedom). Serial, fixed evaluation order.
    pub fn macro_fields(&self) -> Result<MacroFields> {
        let dim = self.set.dim();
        let d = self.set.count();
        let mut fields = MacroFields {
            rho: vec![0.0; self.ncells],
            velocity: vec![vec![0.0; self.ncells]; dim],
            theta: vec![0.0; self.ncells],
        };
        let s = self.gas.s_internal;
        let mut site_f = vec![0.0; d];
        for site in 0..self.ncells {
            for (i, plane) in self.f.iter().enumerate() {
                site_f[i] = plane[site];
            }
            let eint = (s > 0).then(|| self.g.iter().map(|plane| plane[site]).sum());
            let m = crate::collision::macro_from_populations(&site_f, &self.set, s, eint)
                .map_err(|e| match e {
                    Error::NonPositiveDensity { rho, .. } => {
                        let mut cell = vec![0usize; self.dims.len()];
                        self.site_coords(site, &mut cell);
                        Error::NonPositiveDensity {
                            rho,
                            site: Some(cell),
                        }
                    }
                    other => other,
                })?;
            fields.rho[site] = m.rho;
            for j in 0..dim {
                fields.velocity[j][site] = m.velocity[j];
            }
            fields.theta[site] = m.theta;
        }
        Ok(fields)
    }

    /// Total mass, summed in a fixed order.
    pub fn total_mass(&self) -> f64 {
        self.f.iter().map(|plane| plane.iter().sum::<f64>()).sum()
    }

    /// Total momentum vector.
    pub fn total_momentum(&self) -> Vec<f64> {
        let dim = self.set.dim();
        let mut mom = vec![0.0; dim];
        for (i, plane) in self.f.iter().enumerate() {
            let xi = self.set.xi(i);
            let mass: f64 = plane.iter().sum();
            for j in 0..dim {
                mom[j] += mass * xi[j];
            }
        }
        mom
    }

    /// Total energy: translational `Σ f ξ²/2` plus internal `Σ g`.
    pub fn total_energy(&self) -> f64 {
        let mut e = 0.0;
        for (i, plane) in self.f.iter().enumerate() {
            let xi_sq: f64 = self.set.xi(i).iter().map(|x| x * x).sum();
            e += 0.5 * xi_sq * plane.iter().sum::<f64>();
        }
        for plane in &self.g {
            e += plane.iter().sum::<f64>();
        }
        e
    }
}

fn build_shifts(dims: &[usize], set: &VelocitySet) -> Vec<Vec<u32>> {
    let ncells: usize = dims.iter().product();
    set.cvecs()
        .iter()
        .map(|c| {
            let mut shift = vec![0u32; ncells];
            let mut cell = vec![0usize; dims.len()];
            for (src, entry) in shift.iter_mut().enumerate() {
                let mut rest = src;
                for (slot, n) in cell.iter_mut().zip(dims) {
                    *slot = rest % n;
                    rest /= n;
                }
                let mut dst = 0usize;
                let mut stride = 1usize;
                for ((&x, &step), &n) in cell.iter().zip(c.iter()).zip(dims) {
                    let moved = (x as i64 + step).rem_euclid(n as i64) as usize;
                    dst += moved * stride;
                    stride *= n;
                }
                *entry = dst as u32;
            }
            shift
        })
        .collect()
}

// --------------------------------------------------------------------------
// Checkpoints: raw little-endian dump with a fixed header.

const CHECKPOINT_MAGIC: &[u8; 8] = b"HLBMCKP1";

/// Writes the state as a raw field dump: header (dims, d, N, S, step), then
/// the population planes in declared order as little-endian doubles, then the
/// internal-energy planes when present.
pub fn save_checkpoint(state: &LatticeState, path: &Path) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
    out.write_all(CHECKPOINT_MAGIC)?;
    out.write_all(&(state.dims.len() as u32).to_le_bytes())?;
    for &n in &state.dims {
        out.write_all(&(n as u64).to_le_bytes())?;
    }
    out.write_all(&(state.set.count() as u32).to_le_bytes())?;
    out.write_all(&(state.n_hermite as u32).to_le_bytes())?;
    out.write_all(&state.gas.s_internal.to_le_bytes())?;
    out.write_all(&state.time.to_le_bytes())?;
    for plane in state.f.iter().chain(state.g.iter()) {
        for v in plane {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a checkpoint written by [`save_checkpoint`]; the velocity set must
/// match the stored population count.
pub fn load_checkpoint(path: &Path, set: Arc<VelocitySet>) -> Result<LatticeState> {
    let mut input = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != CHECKPOINT_MAGIC {
        return Err(Error::Checkpoint("bad magic bytes".into()));
    }
    let mut u32buf = [0u8; 4];
    let mut u64buf = [0u8; 8];
    input.read_exact(&mut u32buf)?;
    let ndims = u32::from_le_bytes(u32buf) as usize;
    let mut dims = Vec::with_capacity(ndims);
    for _ in 0..ndims {
        input.read_exact(&mut u64buf)?;
        dims.push(u64::from_le_bytes(u64buf) as usize);
    }
    input.read_exact(&mut u32buf)?;
    let d = u32::from_le_bytes(u32buf) as usize;
    input.read_exact(&mut u32buf)?;
    let n_hermite = u32::from_le_bytes(u32buf) as usize;
    input.read_exact(&mut u32buf)?;
    let s_internal = u32::from_le_bytes(u32buf);
    input.read_exact(&mut u64buf)?;
    let time = u64::from_le_bytes(u64buf);
    if d != set.count() {
        return Err(Error::Checkpoint(format!(
            "checkpoint has {d} populations, set `{}` has {}",
            set.name(),
            set.count()
        )));
    }
    let gas = GasSpec {
        dim: dims.len(),
        s_internal,
    };
    let mut state = LatticeState::uniform(&dims, set, gas, n_hermite, 1.0, &vec![0.0; dims.len()], 1.0)?;
    state.time = time;
    let ncells = state.ncells;
    let planes = if s_internal > 0 { 2 * d } else { d };
    let mut buf = vec![0u8; ncells * 8];
    for p in 0..planes {
        input.read_exact(&mut buf)?;
        let plane = if p < d {
            &mut state.f[p]
        } else {
            &mut state.g[p - d]
        };
        for (site, chunk) in buf.chunks_exact(8).enumerate() {
            plane[site] = f64::from_le_bytes(chunk.try_into().expect("chunk of 8"));
        }
    }
    Ok(state)
}
