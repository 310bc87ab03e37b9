use super::grid::{SpatialGrid, WaveFunction};
use crate::error::{domain, Result};
use crate::mathieu::tridiag::SymTridiagonal;
use num_complex::Complex64;

/// Eigenstate of the undriven grid Hamiltonian `−(k̄²/2)∂² + (Ṽ0/2) cos 2z`.
#[derive(Debug, Clone)]
pub struct Eigenstate {
    pub energy: f64,
    /// Band index: position in the energy ordering divided by the number of cells.
    pub band: usize,
    /// `+1` even, `−1` odd under `z → −z`.
    pub parity: i8,
    pub state: WaveFunction,
}

struct Candidate {
    energy: f64,
    ks: Vec<f64>,
    coeffs: Vec<f64>,
    kind: Kind,
}

#[derive(Clone, Copy, PartialEq)]
enum Kind {
    Cos,
    Sin,
}

impl Kind {
    fn parity(self) -> i8 {
        match self {
            Kind::Cos => 1,
            Kind::Sin => -1,
        }
    }
}

/// Lowest `count` eigenstates of the undriven lattice on `grid`.
///
/// The potential couples plane waves `k` and `k ± 2`, so the Hamiltonian splits
/// into tridiagonal blocks labelled by the residue `r` of the mode index modulo
/// the number of cells. Blocks `±r` are combined into cosine and sine standing
/// waves; the self-mirror blocks (`r = 0` and half the cell count) are split
/// into even and odd sub-blocks. Every state therefore has definite parity,
/// degenerate or not. The Nyquist mode is left out.
pub fn undriven_eigenbasis(
    grid: &SpatialGrid,
    v0_tilde: f64,
    kbar: f64,
    count: usize,
) -> Result<Vec<Eigenstate>> {
    if !(kbar > 0.0) {
        return domain(format!(
            "effective Planck constant must be positive, got {kbar}"
        ));
    }
    let nc = grid.n_cells() as i64;
    let m_max = grid.n_points() as i64 / 2 - 1;
    if count as i64 > 2 * m_max + 1 {
        return domain(format!(
            "requested {count} states from a basis of {}",
            2 * m_max + 1
        ));
    }
    let dk = 2.0 * std::f64::consts::PI / grid.length();
    let kin = |m: i64| 0.5 * kbar * kbar * (dk * m as f64).powi(2);
    let w = 0.25 * v0_tilde;

    let mut candidates = Vec::new();
    // `scale` maps block eigenvector entries to standing-wave amplitudes
    let mut push_block = |ms: Vec<i64>,
                          scale: &[f64],
                          diag: Vec<f64>,
                          off: Vec<f64>,
                          kinds: &[Kind]|
     -> Result<()> {
        if ms.is_empty() {
            return Ok(());
        }
        let ks: Vec<f64> = ms.iter().map(|&m| dk * m as f64).collect();
        let (values, vectors) = SymTridiagonal::new(diag, off).eigen()?;
        for (e, c) in values.into_iter().zip(vectors) {
            let coeffs: Vec<f64> = c
                .iter()
                .enumerate()
                .map(|(i, x)| x * scale.get(i).copied().unwrap_or(1.0))
                .collect();
            for &kind in kinds {
                candidates.push(Candidate {
                    energy: e,
                    ks: ks.clone(),
                    coeffs: coeffs.clone(),
                    kind,
                });
            }
        }
        Ok(())
    };

    // r = 0: even block on {1, √2 cos k_j z}, odd block on {√2 sin k_j z}
    let pos: Vec<i64> = (1..).map(|j| j * nc).take_while(|m| *m <= m_max).collect();
    let mut ms = vec![0];
    ms.extend(&pos);
    let diag = ms.iter().map(|&m| kin(m)).collect();
    let mut off = vec![w; ms.len() - 1];
    if let Some(first) = off.first_mut() {
        *first = std::f64::consts::SQRT_2 * w;
    }
    let scale: Vec<f64> = (0..ms.len())
        .map(|i| {
            if i == 0 {
                1.0
            } else {
                std::f64::consts::SQRT_2
            }
        })
        .collect();
    push_block(ms, &scale, diag, off, &[Kind::Cos])?;
    let diag = pos.iter().map(|&m| kin(m)).collect();
    push_block(
        pos.clone(),
        &[],
        diag,
        vec![w; pos.len().saturating_sub(1)],
        &[Kind::Sin],
    )?;

    // 0 < r < nc/2: chain r and its mirror −r
    for r in 1..(nc + 1) / 2 {
        let lowest = -((m_max + r) / nc);
        let ms: Vec<i64> = (lowest..)
            .map(|j| r + j * nc)
            .skip_while(|m| *m < -m_max)
            .take_while(|m| *m <= m_max)
            .collect();
        let diag = ms.iter().map(|&m| kin(m)).collect();
        let off = vec![w; ms.len().saturating_sub(1)];
        push_block(ms, &[], diag, off, &[Kind::Cos, Kind::Sin])?;
    }

    // r = nc/2: modes ±nc/2 couple to each other, giving ±w on the first diagonal entry
    if nc % 2 == 0 && nc > 0 {
        let ms: Vec<i64> = (0..)
            .map(|i| nc / 2 + i * nc)
            .take_while(|m| *m <= m_max)
            .collect();
        for (kind, sign) in [(Kind::Cos, 1.0), (Kind::Sin, -1.0)] {
            let mut diag: Vec<f64> = ms.iter().map(|&m| kin(m)).collect();
            diag[0] += sign * w;
            push_block(ms.clone(), &[], diag, vec![w; ms.len() - 1], &[kind])?;
        }
    }

    candidates.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    candidates.truncate(count);

    let zs: Vec<f64> = grid.positions().collect();
    candidates
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let amps: Vec<Complex64> = zs
                .iter()
                .map(|&z| {
                    let v: f64 =
                        c.ks.iter()
                            .zip(&c.coeffs)
                            .map(|(k, a)| match c.kind {
                                Kind::Cos => a * (k * z).cos(),
                                Kind::Sin => a * (k * z).sin(),
                            })
                            .sum();
                    Complex64::new(v, 0.0)
                })
                .collect();
            let mut state = WaveFunction::new(grid.clone(), amps, 0.0)?;
            state.normalize();
            Ok(Eigenstate {
                energy: c.energy,
                band: i / grid.n_cells(),
                parity: c.kind.parity(),
                state,
            })
        })
        .collect()
}

/// Population of each band of `basis` in `psi`; the last entry is the weight
/// left outside the basis.
pub fn band_populations(psi: &WaveFunction, basis: &[Eigenstate]) -> Vec<f64> {
    let n_bands = basis.iter().map(|e| e.band + 1).max().unwrap_or(0);
    let mut pops = vec![0.0; n_bands + 1];
    for e in basis {
        pops[e.band] += e.state.inner(psi).norm_sqr();
    }
    pops[n_bands] = (psi.norm() - pops[..n_bands].iter().sum::<f64>()).max(0.0);
    pops
}

/// Population-weighted mean band index of `psi` within `basis`.
pub fn mean_band(psi: &WaveFunction, basis: &[Eigenstate]) -> f64 {
    let pops = band_populations(psi, basis);
    let inside = &pops[..pops.len() - 1];
    let total: f64 = inside.iter().sum();
    inside
        .iter()
        .enumerate()
        .map(|(i, p)| i as f64 * p)
        .sum::<f64>()
        / total
}
