//! Exact diagonalization of single `j`-sectors in a truncated Fock basis,
//! with a per-sector on-disk spectrum cache and degeneracy-weighted
//! histograms over all sectors.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use faer::linalg::solvers::{EvdError, SelfAdjointEigen};
use faer::{Mat, Side};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::degeneracy::log_degeneracy;
use crate::error::{DickeError, Result};
use crate::model::{ModelParams, SectorId};
use crate::sector::fmt_opt;

/// Product basis `|n⟩ ⊗ |j, m⟩` with `n ≤ n_max`, flat index `n (2j+1) + (m + j)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectorBasis {
    sector: SectorId,
    n_max: usize,
}

impl SectorBasis {
    pub fn new(sector: SectorId, n_max: usize) -> Result<Self> {
        if n_max < 1 {
            return Err(DickeError::InvalidParameter {
                name: "n_max",
                value: n_max as f64,
                reason: "photon truncation must be >= 1",
            });
        }
        Ok(SectorBasis { sector, n_max })
    }

    pub fn sector(&self) -> SectorId {
        self.sector
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// Number of `m` values, `2j + 1`.
    pub fn spin_dim(&self) -> usize {
        self.sector.multiplicity() as usize
    }

    pub fn dim(&self) -> usize {
        self.spin_dim() * (self.n_max + 1)
    }

    /// Flat index of `(n, k)` with `k = m + j`.
    pub fn index(&self, n: usize, k: usize) -> usize {
        n * self.spin_dim() + k
    }

    /// `(n, k)` of a flat index.
    pub fn state(&self, index: usize) -> (usize, usize) {
        (index / self.spin_dim(), index % self.spin_dim())
    }

    pub fn m(&self, k: usize) -> f64 {
        k as f64 - self.sector.j()
    }

    /// `⟨m+1| J_x |m⟩ = √(j(j+1) − m(m+1)) / 2` for `m = k − j`.
    fn jx_element(&self, k: usize) -> f64 {
        let j = self.sector.j();
        let m = self.m(k);
        0.5 * (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
    }

    /// `(−1)^(n + m + j)`.
    pub fn parity(&self, index: usize) -> f64 {
        let (n, k) = self.state(index);
        if (n + k) % 2 == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// Dense real-symmetric sector Hamiltonian.
pub fn build_hamiltonian(basis: &SectorBasis, params: &ModelParams) -> Result<Mat<f64>> {
    check(basis, params)?;
    Ok(assemble(basis, params))
}

fn check(basis: &SectorBasis, params: &ModelParams) -> Result<()> {
    params.validate()?;
    if basis.sector.n_atoms() != params.n_atoms {
        return Err(DickeError::InvalidSector {
            twice_j: basis.sector.twice_j(),
            n_atoms: params.n_atoms,
        });
    }
    Ok(())
}

fn assemble(basis: &SectorBasis, params: &ModelParams) -> Mat<f64> {
    let dim = basis.dim();
    let sd = basis.spin_dim();
    let coupling = 2.0 * params.lambda / params.n().sqrt();
    let mut h = Mat::<f64>::zeros(dim, dim);
    for n in 0..=basis.n_max {
        for k in 0..sd {
            let i = basis.index(n, k);
            h[(i, i)] = params.omega * n as f64 + params.omega0 * basis.m(k);
            if k + 1 < sd {
                let c = basis.jx_element(k);
                let up = basis.index(n, k + 1);
                h[(up, i)] += params.epsilon * c;
                h[(i, up)] += params.epsilon * c;
                if n < basis.n_max {
                    let v = coupling * c * ((n + 1) as f64).sqrt();
                    for (a, b) in [
                        (basis.index(n + 1, k + 1), i),
                        (basis.index(n, k + 1), basis.index(n + 1, k)),
                    ] {
                        h[(a, b)] += v;
                        h[(b, a)] += v;
                    }
                }
            }
        }
    }
    h
}

/// Everything that determines a sector spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fingerprint {
    pub omega: f64,
    pub omega0: f64,
    pub lambda: f64,
    pub n_atoms: u64,
    pub twice_j: u64,
    pub n_max: usize,
    pub epsilon: f64,
}

impl Fingerprint {
    pub fn new(params: &ModelParams, basis: &SectorBasis) -> Self {
        Fingerprint {
            omega: params.omega,
            omega0: params.omega0,
            lambda: params.lambda,
            n_atoms: params.n_atoms,
            twice_j: basis.sector.twice_j(),
            n_max: basis.n_max,
            epsilon: params.epsilon,
        }
    }

    /// Canonical one-line form, also the cache file header.
    pub fn key(&self) -> String {
        format!(
            "omega={} omega0={} lambda={} n_atoms={} twice_j={} n_max={} epsilon={}",
            self.omega, self.omega0, self.lambda, self.n_atoms, self.twice_j, self.n_max, self.epsilon
        )
    }

    pub fn file_name(&self) -> String {
        let digest = Sha256::digest(self.key().as_bytes());
        format!("spectrum-j{}-{}.csv", self.twice_j, &hex::encode(digest)[..16])
    }
}

/// Eigenvalues (ascending) and per-eigenstate `⟨J_z⟩`, `⟨J_x⟩`, `⟨Π⟩` of one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumCache {
    pub fingerprint: Fingerprint,
    pub eigenvalues: Vec<f64>,
    pub jz: Vec<f64>,
    pub jx: Vec<f64>,
    pub parity: Vec<f64>,
}

const HEADER_PREFIX: &str = "# dicke-spectrum ";

impl SpectrumCache {
    pub fn sector(&self) -> Result<SectorId> {
        SectorId::new(self.fingerprint.n_atoms, self.fingerprint.twice_j)
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{HEADER_PREFIX}{}", self.fingerprint.key())?;
        writeln!(out, "index,eigenvalue,jz,jx,parity")?;
        for i in 0..self.len() {
            writeln!(
                out,
                "{},{},{},{},{}",
                i, self.eigenvalues[i], self.jz[i], self.jx[i], self.parity[i]
            )?;
        }
        Ok(())
    }

    /// Reads a cache file; `Ok(None)` if its fingerprint differs from `expected`.
    pub fn read(path: &Path, expected: &Fingerprint) -> Result<Option<Self>> {
        let format_err = |reason: String| DickeError::Format {
            path: path.display().to_string(),
            reason,
        };
        let file = fs::File::open(path)?;
        let mut lines = BufReader::new(file).lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        if header.strip_prefix(HEADER_PREFIX) != Some(expected.key().as_str()) {
            return Ok(None);
        }
        let columns = lines.next().transpose()?.unwrap_or_default();
        if columns != "index,eigenvalue,jz,jx,parity" {
            return Err(format_err(format!("unexpected column header {columns:?}")));
        }
        let mut cache = SpectrumCache {
            fingerprint: *expected,
            eigenvalues: Vec::new(),
            jz: Vec::new(),
            jx: Vec::new(),
            parity: Vec::new(),
        };
        for (row, line) in lines.enumerate() {
            let line = line?;
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 || fields[0].parse::<usize>().ok() != Some(row) {
                return Err(format_err(format!("malformed row {row}")));
            }
            let mut values = [0.0; 4];
            for (v, f) in values.iter_mut().zip(&fields[1..]) {
                *v = f
                    .parse()
                    .map_err(|_| format_err(format!("bad number {f:?} in row {row}")))?;
            }
            cache.eigenvalues.push(values[0]);
            cache.jz.push(values[1]);
            cache.jx.push(values[2]);
            cache.parity.push(values[3]);
        }
        let expected_dim = (expected.twice_j as usize + 1) * (expected.n_max + 1);
        if cache.len() != expected_dim {
            return Err(format_err(format!(
                "{} rows, expected {expected_dim}",
                cache.len()
            )));
        }
        Ok(Some(cache))
    }
}

/// Dense eigensolve that leaves the SIMD register state clean for the caller.
///
/// faer's AVX kernels return with dirty upper YMM halves; without `vzeroupper`
/// every later SSE-encoded libm call on this thread (and threads spawned from
/// it) pays the AVX/SSE transition penalty, roughly 15x on the quadratures.
fn self_adjoint_eigen(h: &Mat<f64>) -> std::result::Result<SelfAdjointEigen<f64>, EvdError> {
    let evd = h.self_adjoint_eigen(Side::Lower);
    clear_upper_simd_state();
    evd
}

#[cfg(target_arch = "x86_64")]
fn clear_upper_simd_state() {
    if std::arch::is_x86_feature_detected!("avx") {
        // SAFETY: the instruction is available, checked at runtime just above.
        unsafe { std::arch::x86_64::_mm256_zeroupper() }
    }
}

#[cfg(not(target_arch = "x86_64"))]
fn clear_upper_simd_state() {}

/// Full dense eigendecomposition of a sector plus per-state expectation values.
pub fn diagonalize_sector(basis: &SectorBasis, params: &ModelParams) -> Result<SpectrumCache> {
    check(basis, params)?;
    diagonalize_assembled(basis, params)
}

/// [`diagonalize_sector`] without parameter validation (tests use `ε < 0`).
fn diagonalize_assembled(basis: &SectorBasis, params: &ModelParams) -> Result<SpectrumCache> {
    let h = assemble(basis, params);
    let eig_err = |reason: String| DickeError::Eigensolver {
        twice_j: basis.sector.twice_j(),
        reason,
    };
    let evd = self_adjoint_eigen(&h).map_err(|e| eig_err(format!("{e:?}")))?;
    let values = evd.S().column_vector();
    let vectors = evd.U();
    let dim = basis.dim();
    let sd = basis.spin_dim();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    if order.iter().any(|&i| !values[i].is_finite()) {
        return Err(eig_err("non-finite eigenvalue".into()));
    }
    let per_state: Vec<(f64, f64, f64, f64)> = order
        .par_iter()
        .map(|&col| {
            let v = vectors.col(col);
            let (mut jz, mut jx, mut parity) = (0.0, 0.0, 0.0);
            for i in 0..dim {
                let a = v[i];
                let p = a * a;
                let (_, k) = basis.state(i);
                jz += p * basis.m(k);
                parity += p * basis.parity(i);
                if k + 1 < sd {
                    jx += 2.0 * a * v[i + 1] * basis.jx_element(k);
                }
            }
            (values[col], jz, jx, parity)
        })
        .collect();
    Ok(SpectrumCache {
        fingerprint: Fingerprint::new(params, basis),
        eigenvalues: per_state.iter().map(|s| s.0).collect(),
        jz: per_state.iter().map(|s| s.1).collect(),
        jx: per_state.iter().map(|s| s.2).collect(),
        parity: per_state.iter().map(|s| s.3).collect(),
    })
}

/// Directory of per-sector spectrum files.
#[derive(Debug, Clone)]
pub struct CacheDir {
    root: PathBuf,
}

impl CacheDir {
    pub fn new(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(CacheDir { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path_for(&self, fingerprint: &Fingerprint) -> PathBuf {
        self.root.join(fingerprint.file_name())
    }

    /// Cached spectrum if present and matching, otherwise computed and stored.
    /// The flag is `true` on a cache hit.
    pub fn load_or_compute(
        &self,
        basis: &SectorBasis,
        params: &ModelParams,
    ) -> Result<(SpectrumCache, bool)> {
        let fp = Fingerprint::new(params, basis);
        let path = self.path_for(&fp);
        if path.exists() {
            if let Ok(Some(cache)) = SpectrumCache::read(&path, &fp) {
                return Ok((cache, true));
            }
        }
        let cache = diagonalize_sector(basis, params)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        {
            let mut out = std::io::BufWriter::new(fs::File::create(&tmp)?);
            cache.write(&mut out)?;
            out.flush()?;
        }
        fs::rename(&tmp, &path)?;
        Ok((cache, false))
    }
}

/// Spectra of every sector of `params.n_atoms`, smallest `j` first. The flag
/// is `true` when all sectors came from the cache.
pub fn diagonalize_all(
    params: &ModelParams,
    n_max: usize,
    cache: Option<&CacheDir>,
) -> Result<(Vec<SpectrumCache>, bool)> {
    params.validate()?;
    let sectors: Vec<SectorId> = SectorId::all(params.n_atoms).collect();
    let results: Result<Vec<(SpectrumCache, bool)>> = sectors
        .par_iter()
        .map(|&s| {
            let basis = SectorBasis::new(s, n_max)?;
            match cache {
                Some(dir) => dir.load_or_compute(&basis, params),
                None => Ok((diagonalize_sector(&basis, params)?, false)),
            }
        })
        .collect();
    let results = results?;
    let all_cached = results.iter().all(|r| r.1);
    Ok((results.into_iter().map(|r| r.0).collect(), all_cached))
}

/// One energy bin of a [`Histogram`]. Observables per atom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramRow {
    pub e_per_atom_center: f64,
    pub jz_per_atom: Option<f64>,
    /// Mean over states with `⟨J_x⟩ > 0` (split) or over all states.
    pub jx_plus_per_atom: Option<f64>,
    /// Mean over states with `⟨J_x⟩ < 0`; `None` when not split.
    pub jx_minus_per_atom: Option<f64>,
    /// `Σ g(N, j)` over the states in the bin.
    pub count_weighted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub n_atoms: u64,
    pub bin_width: f64,
    pub split_by_jx_sign: bool,
    pub rows: Vec<HistogramRow>,
}

impl Histogram {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "e_per_n_bin_center,jz_per_n,jx_plus_per_n,jx_minus_per_n,count_weighted"
        )?;
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{}",
                r.e_per_atom_center,
                fmt_opt(r.jz_per_atom),
                fmt_opt(r.jx_plus_per_atom),
                fmt_opt(r.jx_minus_per_atom),
                r.count_weighted
            )?;
        }
        Ok(())
    }

    /// Row whose bin contains `E/N`.
    pub fn bin_at(&self, e_per_atom: f64) -> Option<&HistogramRow> {
        self.rows
            .iter()
            .find(|r| (e_per_atom - r.e_per_atom_center).abs() <= 0.5 * self.bin_width)
    }
}

#[derive(Default, Clone, Copy)]
struct Acc {
    weight: f64,
    jz: f64,
    plus: (f64, f64),
    minus: (f64, f64),
}

fn ratio((num, den): (f64, f64)) -> Option<f64> {
    (den > 0.0).then(|| num / den)
}

/// `g(N, j)`-weighted bin averages of `⟨J_z⟩/N` and `⟨J_x⟩/N` over all sectors.
/// Bins are `[k w, (k+1) w)` in `E/N`; bins without states are reported with
/// missing observables between the first and last populated bins.
pub fn histogram_observables(
    caches: &[SpectrumCache],
    n_atoms: u64,
    bin_width: f64,
    split_by_jx_sign: bool,
) -> Result<Histogram> {
    if !(bin_width > 0.0 && bin_width.is_finite()) {
        return Err(DickeError::InvalidParameter {
            name: "bin_width",
            value: bin_width,
            reason: "must be finite and > 0",
        });
    }
    let expected = SectorId::all(n_atoms).count();
    if caches.len() != expected {
        return Err(DickeError::Analysis(format!(
            "{} sectors supplied, N = {n_atoms} has {expected}",
            caches.len()
        )));
    }
    let reference = caches[0].fingerprint;
    let n = n_atoms as f64;
    let mut bins: BTreeMap<i64, Acc> = BTreeMap::new();
    for cache in caches {
        let fp = cache.fingerprint;
        if fp.n_atoms != n_atoms
            || (fp.omega, fp.omega0, fp.lambda, fp.epsilon, fp.n_max)
                != (
                    reference.omega,
                    reference.omega0,
                    reference.lambda,
                    reference.epsilon,
                    reference.n_max,
                )
        {
            return Err(DickeError::Analysis(format!(
                "sector 2j={} has mismatched parameters",
                fp.twice_j
            )));
        }
        let g = log_degeneracy(n, fp.twice_j as f64 / (2.0 * n))?.exp();
        for i in 0..cache.len() {
            let e = cache.eigenvalues[i] / n;
            let acc = bins.entry((e / bin_width).floor() as i64).or_default();
            acc.weight += g;
            acc.jz += g * cache.jz[i] / n;
            let jx = cache.jx[i] / n;
            if !split_by_jx_sign || jx > 0.0 {
                acc.plus.0 += g * jx;
                acc.plus.1 += g;
            } else if jx < 0.0 {
                acc.minus.0 += g * jx;
                acc.minus.1 += g;
            }
        }
    }
    let (Some(&first), Some(&last)) = (bins.keys().next(), bins.keys().next_back()) else {
        return Err(DickeError::Analysis("no eigenvalues".into()));
    };
    let rows = (first..=last)
        .map(|k| {
            let acc = bins.get(&k).copied().unwrap_or_default();
            HistogramRow {
                e_per_atom_center: (k as f64 + 0.5) * bin_width,
                jz_per_atom: ratio((acc.jz, acc.weight)),
                jx_plus_per_atom: ratio(acc.plus),
                jx_minus_per_atom: if split_by_jx_sign { ratio(acc.minus) } else { None },
                count_weighted: acc.weight,
            }
        })
        .collect();
    Ok(Histogram {
        n_atoms,
        bin_width,
        split_by_jx_sign,
        rows,
    })
}
