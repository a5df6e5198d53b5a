//! Brute-force verification engine: exact evolution of a two-mode coherent
//! state in a truncated Fock basis.
//!
//! The Hamiltonian conserves the total photon number, so the basis splits
//! into blocks of fixed `N = n1 + n2`. Each block is a real symmetric
//! tridiagonal matrix in the `(n1, n2) = (N - j, j)` ordering; its spectral
//! decomposition is computed once and reused for every time point, so an
//! evolution to arbitrary `t` is a single rotate-scale-rotate per block with
//! no time stepping.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::domain::{CouplerParams, InitialAmplitudes, Mode, MomentIndex, DEFAULT_MAX_ORDER};
use crate::error::CouplerError;
use crate::squeezing::MomentSource;

/// Tail-mass bound the cutoff guard enforces on the levels a moment index
/// reaches.
pub const GUARD_TAIL_LIMIT: f64 = 1e-10;

/// Default preparation tail tolerance used by the automatic cutoff.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-12;

/// Poisson upper tail `P(X > level)` for mean `eps`, summed directly in
/// log space so values far below 1e-12 stay meaningful.
pub fn poisson_tail(eps: f64, level: usize) -> f64 {
    if eps <= 0.0 {
        return 0.0;
    }
    let ln_eps = eps.ln();
    let mut ln_fact = 0.0;
    for k in 1..=level {
        ln_fact += (k as f64).ln();
    }
    let mut tail = 0.0;
    let mut k = level + 1;
    loop {
        ln_fact += (k as f64).ln();
        let term = (-eps + k as f64 * ln_eps - ln_fact).exp();
        tail += term;
        if (term < tail * 1e-18 && k as f64 > eps) || k > level + 2000 {
            break;
        }
        k += 1;
    }
    tail
}

/// Smallest total-photon cutoff whose Poisson tail is below `tail_tolerance`.
pub fn auto_cutoff(eps: f64, tail_tolerance: f64) -> Result<usize, CouplerError> {
    if !(tail_tolerance > 0.0 && tail_tolerance < 1.0) {
        return Err(CouplerError::InvalidParameter(format!(
            "tail tolerance must lie in (0, 1), got {tail_tolerance}"
        )));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(CouplerError::InvalidParameter(format!(
            "epsilon must be finite and >= 0, got {eps}"
        )));
    }
    let mut n = 0;
    while poisson_tail(eps, n) >= tail_tolerance {
        n += 1;
    }
    Ok(n)
}

/// Truncated two-mode state, organized into total-photon-number blocks.
/// `blocks[N][j]` is the amplitude of `(n1, n2) = (N - j, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockState {
    pub n_max: usize,
    pub blocks: Vec<Vec<Complex64>>,
    /// Coherent-state probability mass beyond `n_max` at preparation.
    pub tail_mass: f64,
    /// Mean total photon number of the untruncated state; drives the cutoff
    /// guard on moment evaluation.
    pub eps: f64,
}

impl FockState {
    pub fn norm_sqr(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.iter())
            .map(|a| a.norm_sqr())
            .sum()
    }

    pub fn mean_total_photon(&self) -> f64 {
        self.blocks
            .iter()
            .enumerate()
            .map(|(n, b)| n as f64 * b.iter().map(|a| a.norm_sqr()).sum::<f64>())
            .sum()
    }
}

/// Coherent state `|alpha1, alpha2>` truncated at total photon number `n_max`.
pub fn prepare_coherent(init: &InitialAmplitudes, n_max: usize) -> FockState {
    let eps = init.epsilon();
    // c[n] = alpha^n / sqrt(n!), built by recurrence
    let mode_coeffs = |alpha: Complex64| {
        let mut c = Vec::with_capacity(n_max + 1);
        c.push(Complex64::new(1.0, 0.0));
        for n in 1..=n_max {
            let prev = c[n - 1];
            c.push(prev * alpha / (n as f64).sqrt());
        }
        c
    };
    let c1 = mode_coeffs(init.alpha1);
    let c2 = mode_coeffs(init.alpha2);
    let norm = (-eps / 2.0).exp();
    let blocks = (0..=n_max)
        .map(|total| {
            (0..=total)
                .map(|j| norm * c1[total - j] * c2[j])
                .collect()
        })
        .collect();
    FockState {
        n_max,
        blocks,
        tail_mass: poisson_tail(eps, n_max),
        eps,
    }
}

/// One fixed-`N` block of the Hamiltonian with its cached spectral
/// decomposition.
#[derive(Debug, Clone)]
pub struct BlockHamiltonian {
    pub n_total: usize,
    pub matrix: DMatrix<f64>,
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
}

/// Build all blocks up to `n_max` in the frame `omega1 = +delta/2`,
/// `omega2 = -delta/2`. Diagonal entries are
/// `omega1 n1 + omega2 n2 + chi [n1(n1-1) + n2(n2-1)] + 2 chi n1 n2`
/// (the Kerr part equals `chi N(N-1)` on the whole block); off-diagonals
/// couple `(n1, n2) <-> (n1 - 1, n2 + 1)` with strength `kappa sqrt(n1 (n2+1))`.
pub fn build_blocks(params: &CouplerParams, n_max: usize) -> Result<Vec<BlockHamiltonian>, CouplerError> {
    params.validate()?;
    let (w1, w2) = (0.5 * params.delta, -0.5 * params.delta);
    let mut blocks = Vec::with_capacity(n_max + 1);
    for total in 0..=n_max {
        let dim = total + 1;
        let mut m = DMatrix::<f64>::zeros(dim, dim);
        for j in 0..dim {
            let n1 = (total - j) as f64;
            let n2 = j as f64;
            m[(j, j)] = w1 * n1
                + w2 * n2
                + params.chi * (n1 * (n1 - 1.0) + n2 * (n2 - 1.0))
                + params.cross_kerr() * n1 * n2;
            if j + 1 < dim {
                let coupling = params.kappa * (n1 * (n2 + 1.0)).sqrt();
                m[(j, j + 1)] = coupling;
                m[(j + 1, j)] = coupling;
            }
        }
        let eig = nalgebra::SymmetricEigen::new(m.clone());
        blocks.push(BlockHamiltonian {
            n_total: total,
            matrix: m,
            eigenvalues: eig.eigenvalues,
            eigenvectors: eig.eigenvectors,
        });
    }
    Ok(blocks)
}

/// Evolve a state to an arbitrary `t` through the cached decompositions:
/// `psi_N(t) = V exp(-i E t) V^T psi_N`.
pub fn evolve(state: &FockState, blocks: &[BlockHamiltonian], t: f64) -> Result<FockState, CouplerError> {
    if blocks.len() != state.n_max + 1 {
        return Err(CouplerError::DimensionMismatch {
            state_n_max: state.n_max,
            blocks_n_max: blocks.len().saturating_sub(1),
        });
    }
    let mut out = Vec::with_capacity(state.blocks.len());
    for (block, psi) in blocks.iter().zip(&state.blocks) {
        let dim = block.n_total + 1;
        if psi.len() != dim {
            return Err(CouplerError::DimensionMismatch {
                state_n_max: state.n_max,
                blocks_n_max: blocks.len() - 1,
            });
        }
        let re = DVector::from_iterator(dim, psi.iter().map(|a| a.re));
        let im = DVector::from_iterator(dim, psi.iter().map(|a| a.im));
        let mut yre = block.eigenvectors.tr_mul(&re);
        let mut yim = block.eigenvectors.tr_mul(&im);
        for k in 0..dim {
            let theta = -block.eigenvalues[k] * t;
            let (sin, cos) = theta.sin_cos();
            let (r, i) = (yre[k], yim[k]);
            yre[k] = r * cos - i * sin;
            yim[k] = r * sin + i * cos;
        }
        let ore = &block.eigenvectors * yre;
        let oim = &block.eigenvectors * yim;
        out.push((0..dim).map(|j| Complex64::new(ore[j], oim[j])).collect());
    }
    Ok(FockState {
        n_max: state.n_max,
        blocks: out,
        tail_mass: state.tail_mass,
        eps: state.eps,
    })
}

/// Mean energy `<H>` of a state under the given blocks.
pub fn mean_energy(state: &FockState, blocks: &[BlockHamiltonian]) -> Result<f64, CouplerError> {
    if blocks.len() != state.n_max + 1 {
        return Err(CouplerError::DimensionMismatch {
            state_n_max: state.n_max,
            blocks_n_max: blocks.len().saturating_sub(1),
        });
    }
    let mut energy = 0.0;
    for (block, psi) in blocks.iter().zip(&state.blocks) {
        let dim = block.n_total + 1;
        let re = DVector::from_iterator(dim, psi.iter().map(|a| a.re));
        let im = DVector::from_iterator(dim, psi.iter().map(|a| a.im));
        energy += (&block.matrix * &re).dot(&re) + (&block.matrix * &im).dot(&im);
    }
    Ok(energy)
}

/// Apply one annihilation operator to the block representation. The result
/// keeps the same cutoff; the top block becomes empty.
fn apply_lowering(blocks: &[Vec<Complex64>], mode: Mode) -> Vec<Vec<Complex64>> {
    let n_max = blocks.len() - 1;
    let mut out: Vec<Vec<Complex64>> = (0..=n_max)
        .map(|total| vec![Complex64::new(0.0, 0.0); total + 1])
        .collect();
    for total in 0..n_max {
        let src = &blocks[total + 1];
        let dst = &mut out[total];
        match mode {
            // a1: (n1, n2) -> (n1 - 1, n2), amplitude factor sqrt(n1)
            Mode::One => {
                for j in 0..=total {
                    dst[j] = ((total + 1 - j) as f64).sqrt() * src[j];
                }
            }
            // a2: (n1, n2) -> (n1, n2 - 1), amplitude factor sqrt(n2)
            Mode::Two => {
                for j in 0..=total {
                    dst[j] = ((j + 1) as f64).sqrt() * src[j + 1];
                }
            }
        }
    }
    out
}

fn lowered(blocks: &[Vec<Complex64>], mode1_times: u32, mode2_times: u32) -> Vec<Vec<Complex64>> {
    let mut current = blocks.to_vec();
    for _ in 0..mode1_times {
        current = apply_lowering(&current, Mode::One);
    }
    for _ in 0..mode2_times {
        current = apply_lowering(&current, Mode::Two);
    }
    current
}

/// Normally ordered moment computed by ladder-operator application:
/// `<psi| A1^+^n1 A2^+^n3 A1^n2 A2^n4 |psi> = <(a1^n1 a2^n3) psi | (a1^n2 a2^n4) psi>`.
///
/// Fails when the truncated state carries more than [`GUARD_TAIL_LIMIT`] of
/// probability mass above the levels the index reaches, since the result
/// would then have uncontrolled truncation bias.
pub fn oracle_moment(state: &FockState, idx: MomentIndex) -> Result<Complex64, CouplerError> {
    idx.check_order(DEFAULT_MAX_ORDER)?;
    let shift = idx.raising_order().max(idx.lowering_order()) as usize;
    if shift > 0 {
        let level = state.n_max.saturating_sub(shift);
        let tail = poisson_tail(state.eps, level);
        if tail >= GUARD_TAIL_LIMIT {
            return Err(CouplerError::CutoffTooSmall {
                n_max: state.n_max,
                n1: idx.n1,
                n2: idx.n2,
                n3: idx.n3,
                n4: idx.n4,
                level,
                tail,
                limit: GUARD_TAIL_LIMIT,
            });
        }
    }
    let left = lowered(&state.blocks, idx.n1, idx.n3);
    let right = lowered(&state.blocks, idx.n2, idx.n4);
    let mut acc = Complex64::new(0.0, 0.0);
    for (lb, rb) in left.iter().zip(&right) {
        for (l, r) in lb.iter().zip(rb) {
            acc += l.conj() * r;
        }
    }
    Ok(acc)
}

/// Reusable oracle: blocks and the prepared state are built once, then any
/// number of time points can be served from the cached decompositions.
#[derive(Debug, Clone)]
pub struct OracleEngine {
    blocks: Vec<BlockHamiltonian>,
    initial: FockState,
}

impl OracleEngine {
    pub fn new(
        params: &CouplerParams,
        init: &InitialAmplitudes,
        n_max: usize,
    ) -> Result<Self, CouplerError> {
        let blocks = build_blocks(params, n_max)?;
        let initial = prepare_coherent(init, n_max);
        Ok(Self { blocks, initial })
    }

    pub fn blocks(&self) -> &[BlockHamiltonian] {
        &self.blocks
    }

    pub fn initial_state(&self) -> &FockState {
        &self.initial
    }

    pub fn state_at(&self, t: f64) -> Result<FockState, CouplerError> {
        evolve(&self.initial, &self.blocks, t)
    }

    pub fn source_at(&self, t: f64) -> Result<OracleSource, CouplerError> {
        Ok(OracleSource {
            state: self.state_at(t)?,
            t,
            max_order: DEFAULT_MAX_ORDER,
        })
    }
}

/// Moment source backed by one evolved Fock state.
#[derive(Debug, Clone)]
pub struct OracleSource {
    state: FockState,
    t: f64,
    max_order: u32,
}

impl OracleSource {
    pub fn state(&self) -> &FockState {
        &self.state
    }
}

/// Bind prepare -> evolve -> moment evaluation behind the moment-source
/// contract, so the squeezing layer runs unchanged on the oracle.
pub fn oracle_moment_source(
    params: &CouplerParams,
    init: &InitialAmplitudes,
    t: f64,
    n_max: usize,
) -> Result<OracleSource, CouplerError> {
    OracleEngine::new(params, init, n_max)?.source_at(t)
}

impl MomentSource for OracleSource {
    fn normally_ordered_moment(&self, idx: MomentIndex) -> Result<Complex64, CouplerError> {
        idx.check_order(self.max_order)?;
        oracle_moment(&self.state, idx)
    }

    fn mean_photon(&self, mode: Mode) -> Result<f64, CouplerError> {
        let idx = match mode {
            Mode::One => MomentIndex::new(1, 1, 0, 0),
            Mode::Two => MomentIndex::new(0, 0, 1, 1),
        };
        Ok(oracle_moment(&self.state, idx)?.re)
    }

    fn time(&self) -> f64 {
        self.t
    }
}
