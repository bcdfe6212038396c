//! Deterministic δ-nets on unit spheres.
//!
//! Points are radial projections of the vertices of a uniform grid on the
//! surface of the cube `[−1, 1]^D`. With `n` grid intervals per edge every
//! sphere point lies within `√(D−1)/n` of a net point, because the cube
//! surface sits outside the unit ball where radial projection is
//! 1-Lipschitz. `n` is a power of two, so refining a net only adds points.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::random_unit_vector;

/// Bumped whenever the construction changes; part of the cache key.
pub const NET_VERSION: u32 = 1;

const MAGIC: &[u8; 8] = b"SEPNET01";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetKind {
    /// The whole unit sphere of `C^m`, as `S^{2m−1}`.
    Complex,
    /// Unit vectors of `C^m` modulo global phase: first coordinate real and
    /// one of each `±` pair kept. Distances are `min_θ ‖x − e^{iθ}p‖`.
    Projective,
    /// Unit sphere of `R^m` modulo sign.
    Real,
}

impl NetKind {
    fn code(self) -> u8 {
        match self {
            NetKind::Complex => 0,
            NetKind::Projective => 1,
            NetKind::Real => 2,
        }
    }

    fn from_code(c: u8) -> Result<Self> {
        match c {
            0 => Ok(NetKind::Complex),
            1 => Ok(NetKind::Projective),
            2 => Ok(NetKind::Real),
            _ => Err(Error::Malformed(format!("unknown net kind code {c}"))),
        }
    }

    /// Real dimension of the ambient space of the parametrization.
    pub fn real_dim(self, m: usize) -> usize {
        match self {
            NetKind::Complex => 2 * m,
            NetKind::Projective => 2 * m - 1,
            NetKind::Real => m,
        }
    }

    fn name(self) -> &'static str {
        match self {
            NetKind::Complex => "complex",
            NetKind::Projective => "projective",
            NetKind::Real => "real",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeltaNet {
    m: usize,
    delta: f64,
    kind: NetKind,
    dim: usize,
    coords: Vec<f64>,
}

/// Grid intervals per cube edge for covering radius `delta`.
pub fn grid_resolution(real_dim: usize, delta: f64) -> usize {
    let need = ((real_dim.max(1) - 1) as f64).sqrt() / delta;
    let mut n = 1usize;
    while (n as f64) < need {
        n *= 2;
    }
    n
}

/// Constant `C` with `|net| ≤ C·(1 + 2/δ)^D`, `D` the real dimension.
pub fn size_constant(real_dim: usize) -> f64 {
    let d = real_dim as f64;
    2.0 * d * (d - 1.0).max(1.0).powf((d - 1.0) / 2.0)
}

/// Full-sphere net in `C^m`.
pub fn build_net(m: usize, delta: f64) -> Result<DeltaNet> {
    DeltaNet::build(m, delta, NetKind::Complex)
}

impl DeltaNet {
    pub fn build(m: usize, delta: f64, kind: NetKind) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!("net radius must be positive, got {delta}")));
        }
        if m == 0 {
            return Err(Error::InvalidParameter("net dimension must be positive".into()));
        }
        let dim = kind.real_dim(m);
        if delta >= 2.0 {
            let mut coords = vec![0.0; dim];
            coords[0] = 1.0;
            return Ok(Self { m, delta, kind, dim, coords });
        }
        let n = grid_resolution(dim, delta);
        let keep_half = kind != NetKind::Complex;
        let mut coords = Vec::new();
        let mut cube = vec![0.0; dim];
        let value = |k: usize| -1.0 + 2.0 * k as f64 / n as f64;
        for axis in 0..dim {
            for sign in [-1.0, 1.0] {
                let free: Vec<usize> = (0..dim).filter(|&j| j != axis).collect();
                // coordinates before `axis` stay off ±1 so shared edges are emitted once
                let lo: Vec<usize> = free.iter().map(|&j| usize::from(j < axis)).collect();
                let hi: Vec<usize> = free.iter().map(|&j| if j < axis { n - 1 } else { n }).collect();
                if lo.iter().zip(&hi).any(|(l, h)| l > h) {
                    continue;
                }
                let mut digits = lo.clone();
                loop {
                    cube[axis] = sign;
                    for (slot, &j) in free.iter().enumerate() {
                        cube[j] = value(digits[slot]);
                    }
                    let first = cube.iter().copied().find(|&x| x != 0.0).unwrap_or(0.0);
                    if !keep_half || first > 0.0 {
                        let norm = cube.iter().map(|x| x * x).sum::<f64>().sqrt();
                        coords.extend(cube.iter().map(|x| x / norm));
                    }
                    let mut slot = 0;
                    loop {
                        if slot == digits.len() {
                            break;
                        }
                        if digits[slot] < hi[slot] {
                            digits[slot] += 1;
                            break;
                        }
                        digits[slot] = lo[slot];
                        slot += 1;
                    }
                    if slot == digits.len() {
                        break;
                    }
                }
            }
        }
        Ok(Self { m, delta, kind, dim, coords })
    }

    /// Net made of explicit points (real parametrization, unit norm).
    pub fn from_coords(m: usize, delta: f64, kind: NetKind, coords: Vec<f64>) -> Result<Self> {
        let dim = kind.real_dim(m);
        if coords.len() % dim != 0 || coords.is_empty() {
            return Err(Error::Malformed(format!(
                "{} coordinates do not form points of dimension {dim}",
                coords.len()
            )));
        }
        for p in coords.chunks(dim) {
            let norm = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > crate::tolerance::UNIT_NORM {
                return Err(Error::Malformed(format!("net point of norm {norm}")));
            }
        }
        Ok(Self { m, delta, kind, dim, coords })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn kind(&self) -> NetKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Real coordinates of point `i`.
    pub fn raw(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Writes point `i` into `out` (length `m`) without allocating.
    pub fn point_into(&self, i: usize, out: &mut [Complex<f64>]) {
        let raw = self.raw(i);
        match self.kind {
            NetKind::Complex => {
                for (z, c) in out.iter_mut().zip(raw.chunks(2)) {
                    *z = Complex::new(c[0], c[1]);
                }
            }
            NetKind::Projective => {
                out[0] = Complex::new(raw[0], 0.0);
                for (z, c) in out[1..].iter_mut().zip(raw[1..].chunks(2)) {
                    *z = Complex::new(c[0], c[1]);
                }
            }
            NetKind::Real => {
                for (z, &x) in out.iter_mut().zip(raw) {
                    *z = Complex::new(x, 0.0);
                }
            }
        }
    }

    /// Point `i` as a unit vector of `C^m` (or `R^m` for real nets).
    pub fn point(&self, i: usize) -> Vec<Complex<f64>> {
        to_complex(self.kind, self.m, self.raw(i))
    }

    /// `C·(1 + 2/δ)^D`.
    pub fn size_bound(&self) -> f64 {
        size_constant(self.dim) * (1.0 + 2.0 / self.delta).powi(self.dim as i32)
    }

    /// Distance in this net's metric between two unit vectors.
    pub fn distance(&self, x: &[Complex<f64>], p: &[Complex<f64>]) -> f64 {
        match self.kind {
            NetKind::Complex => x.iter().zip(p).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt(),
            NetKind::Projective | NetKind::Real => {
                let overlap = crate::hilbert::inner(p, x).norm();
                (2.0 - 2.0 * overlap).max(0.0).sqrt()
            }
        }
    }

    /// Index of and distance to the nearest net point (linear scan).
    pub fn nearest(&self, x: &[Complex<f64>]) -> (usize, f64) {
        (0..self.len())
            .map(|i| (i, self.distance(x, &self.point(i))))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
    }

    /// Every `stride`-th point; a deliberately weakened net.
    pub fn decimate(&self, stride: usize) -> Self {
        let coords = self
            .coords
            .chunks(self.dim)
            .step_by(stride.max(1))
            .flatten()
            .copied()
            .collect();
        Self { coords, ..self.clone() }
    }

    pub fn cache_file_name(m: usize, delta: f64, kind: NetKind) -> String {
        format!("net-{}-m{m}-d{delta:e}-v{NET_VERSION}.bin", kind.name())
    }

    pub fn write_to(&self, mut w: impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&NET_VERSION.to_le_bytes())?;
        w.write_all(&[self.kind.code()])?;
        w.write_all(&(self.m as u32).to_le_bytes())?;
        w.write_all(&self.delta.to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        let mut buf = Vec::with_capacity(self.coords.len() * 8);
        for x in &self.coords {
            buf.extend_from_slice(&x.to_le_bytes());
        }
        w.write_all(&buf)?;
        Ok(())
    }

    pub fn read_from(mut r: impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Malformed("not a net cache file".into()));
        }
        let mut u4 = [0u8; 4];
        let mut u8b = [0u8; 8];
        r.read_exact(&mut u4)?;
        let version = u32::from_le_bytes(u4);
        if version != NET_VERSION {
            return Err(Error::Malformed(format!("net cache version {version}, expected {NET_VERSION}")));
        }
        let mut code = [0u8; 1];
        r.read_exact(&mut code)?;
        let kind = NetKind::from_code(code[0])?;
        r.read_exact(&mut u4)?;
        let m = u32::from_le_bytes(u4) as usize;
        r.read_exact(&mut u8b)?;
        let delta = f64::from_le_bytes(u8b);
        r.read_exact(&mut u8b)?;
        let count = u64::from_le_bytes(u8b) as usize;
        let mut bytes = vec![0u8; count * kind.real_dim(m) * 8];
        r.read_exact(&mut bytes)?;
        let coords = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        Self::from_coords(m, delta, kind, coords)
    }
}

pub(crate) fn to_complex(kind: NetKind, m: usize, raw: &[f64]) -> Vec<Complex<f64>> {
    match kind {
        NetKind::Complex => raw.chunks(2).map(|c| Complex::new(c[0], c[1])).collect(),
        NetKind::Projective => std::iter::once(Complex::new(raw[0], 0.0))
            .chain(raw[1..].chunks(2).map(|c| Complex::new(c[0], c[1])))
            .collect(),
        NetKind::Real => raw[..m].iter().map(|&x| Complex::new(x, 0.0)).collect(),
    }
}

/// Builds a net, reading it from and storing it to `dir` when given.
pub fn build_net_cached(m: usize, delta: f64, kind: NetKind, dir: Option<&Path>) -> Result<DeltaNet> {
    let Some(dir) = dir else {
        return DeltaNet::build(m, delta, kind);
    };
    let path: PathBuf = dir.join(DeltaNet::cache_file_name(m, delta, kind));
    if let Ok(file) = fs::File::open(&path) {
        if let Ok(net) = DeltaNet::read_from(std::io::BufReader::new(file)) {
            if net.m == m && net.delta == delta && net.kind == kind {
                return Ok(net);
            }
        }
    }
    let net = DeltaNet::build(m, delta, kind)?;
    fs::create_dir_all(dir)?;
    let tmp = path.with_extension("tmp");
    {
        let mut w = std::io::BufWriter::new(fs::File::create(&tmp)?);
        net.write_to(&mut w)?;
        w.flush()?;
    }
    fs::rename(&tmp, &path)?;
    Ok(net)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub samples: usize,
    pub max_gap: f64,
    pub passed: bool,
}

/// Largest distance from `samples` random unit vectors to the net.
pub fn verify_coverage(net: &DeltaNet, samples: usize, seed: u64) -> CoverageReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_gap: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let x = match net.kind {
            NetKind::Real => {
                let v = crate::states::random_real_unit_vector(net.m, &mut rng);
                v.into_iter().map(|r| Complex::new(r, 0.0)).collect()
            }
            _ => random_unit_vector(net.m, &mut rng),
        };
        max_gap = max_gap.max(net.nearest(&x).1);
    }
    CoverageReport {
        samples: samples.max(1),
        max_gap,
        passed: max_gap <= net.delta,
    }
}
