//! Key recovery against the BCH-subcode scheme.
//!
//! The hidden permutation only shuffles circulant blocks, so unpermuted
//! public rows must still satisfy every parity check of the underlying
//! BCH code. Writing the unknown inverse permutation as an `n0 x n0`
//! binary matrix `U`, each pair (public row, parity row) yields one
//! linear equation over the entries of `U`: the candidate field
//! representations are enumerable, and for the right one the system's
//! kernel collapses onto the true permutation matrix.

use crate::bch::{self, BchCode};
use crate::linalg::{BitVec, Permutation};
use crate::poly::RingPoly;
use crate::qcbch::{reorder_to_blocks, QcBchError, QcBchParams, QcBchPublicKey};

/// Size of the linear system as advertised by the scheme parameters:
/// `n0^2` unknowns against `p^2 (k0-1)(n0-k0)` equations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SystemDimensions {
    pub unknowns: usize,
    pub equations: usize,
}

pub fn system_dimensions(params: &QcBchParams) -> SystemDimensions {
    SystemDimensions {
        unknowns: params.n0 * params.n0,
        equations: params.p * params.p * (params.k0 - 1) * (params.n0 - params.k0),
    }
}

/// Incremental Gaussian elimination over the permutation unknowns: rows
/// are reduced as they arrive and only an independent basis is stored.
pub struct PermSystem {
    cols: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
    rows_seen: usize,
}

impl PermSystem {
    pub fn new(n0: usize) -> Self {
        PermSystem {
            cols: n0 * n0,
            rows: Vec::new(),
            pivots: Vec::new(),
            rows_seen: 0,
        }
    }

    /// Feeds one equation; returns the rank afterwards.
    pub fn add_equation(&mut self, mut eq: BitVec) -> usize {
        assert_eq!(eq.len(), self.cols);
        self.rows_seen += 1;
        loop {
            let Some(lead) = eq.support().first().copied() else {
                return self.rank();
            };
            match self.pivots.binary_search(&lead) {
                Ok(at) => {
                    let row = self.rows[at].clone();
                    eq.xor_in(&row);
                }
                Err(at) => {
                    // Clear every stored pivot column from the tail of the
                    // new row, then back-substitute it into the basis, so
                    // the basis stays fully reduced.
                    for (row, &pivot) in self.rows.iter().zip(&self.pivots) {
                        if pivot > lead && eq.get(pivot) {
                            eq.xor_in(row);
                        }
                    }
                    for row in self.rows.iter_mut() {
                        if row.get(lead) {
                            row.xor_in(&eq);
                        }
                    }
                    self.rows.insert(at, eq);
                    self.pivots.insert(at, lead);
                    return self.rank();
                }
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn rows_seen(&self) -> usize {
        self.rows_seen
    }

    /// Basis of the solution space.
    pub fn kernel(&self) -> Vec<BitVec> {
        let mut kernel = Vec::new();
        for free in 0..self.cols {
            if self.pivots.binary_search(&free).is_ok() {
                continue;
            }
            let mut vec = BitVec::zeros(self.cols);
            vec.set(free, true);
            for (row, &pivot) in self.rows.iter().zip(&self.pivots) {
                if row.get(free) {
                    vec.set(pivot, true);
                }
            }
            kernel.push(vec);
        }
        kernel
    }
}

/// Cap on the kernel dimension up to which the whole span is screened
/// for permutation matrices.
pub const KERNEL_SCREEN_CAP: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CandidateOutcome {
    /// Kernel pinned a unique permutation matrix.
    Recovered(Permutation),
    /// The system admits only the zero solution: wrong field.
    FullRank,
    /// Kernel too large to screen exhaustively.
    KernelTooLarge { dim: usize },
    /// No vector of the kernel span reshapes to a permutation matrix.
    NoPermutation { dim: usize },
    /// Several permutation matrices inside the span.
    Ambiguous { dim: usize, candidates: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateReport {
    pub prim_poly: u64,
    pub equations_used: usize,
    /// Dimension of the nullspace once all equations are in.
    pub kernel_dim: usize,
    pub outcome: CandidateOutcome,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QcBchAttack {
    /// One report per candidate field, ascending by polynomial.
    pub reports: Vec<CandidateReport>,
}

impl QcBchAttack {
    /// Fields whose equation system singled out a permutation.
    pub fn recovered(&self) -> Vec<(u64, &Permutation)> {
        self.reports
            .iter()
            .filter_map(|r| match &r.outcome {
                CandidateOutcome::Recovered(perm) => Some((r.prim_poly, perm)),
                _ => None,
            })
            .collect()
    }
}

/// Screens the kernel span for permutation matrices.
pub fn screen_kernel(kernel: &[BitVec], n0: usize) -> CandidateOutcome {
    let dim = kernel.len();
    if dim == 0 {
        return CandidateOutcome::FullRank;
    }
    if dim > KERNEL_SCREEN_CAP {
        return CandidateOutcome::KernelTooLarge { dim };
    }
    let mut found: Vec<Permutation> = Vec::new();
    for mask in 1u32..1 << dim {
        let mut vec = BitVec::zeros(n0 * n0);
        for (b, basis) in kernel.iter().enumerate() {
            if mask >> b & 1 == 1 {
                vec.xor_in(basis);
            }
        }
        if let Some(perm) = as_permutation(&vec, n0) {
            if !found.contains(&perm) {
                found.push(perm);
            }
        }
    }
    match found.len() {
        0 => CandidateOutcome::NoPermutation { dim },
        1 => CandidateOutcome::Recovered(found.pop().expect("nonempty")),
        candidates => CandidateOutcome::Ambiguous { dim, candidates },
    }
}

fn as_permutation(vec: &BitVec, n0: usize) -> Option<Permutation> {
    let mut images = vec![usize::MAX; n0];
    // Entry (r, s) sits at bit r*n0 + s; a permutation matrix picks
    // exactly one column per row and vice versa.
    for r in 0..n0 {
        let mut col = None;
        for s in 0..n0 {
            if vec.get(r * n0 + s) {
                if col.is_some() {
                    return None;
                }
                col = Some(s);
            }
        }
        let s = col?;
        images[s] = r;
    }
    if images.iter().any(|&i| i == usize::MAX) {
        return None;
    }
    Permutation::from_images(images)
}

/// One equation: pairing the public row (as blocks) with a parity row
/// (as blocks) constrains `U` by `sum_{r,s} U_{r,s} <g_r, h_s> = 0`.
pub fn equation_coeffs(g_blocks: &[RingPoly], h_blocks: &[RingPoly]) -> BitVec {
    let n0 = g_blocks.len();
    let mut eq = BitVec::zeros(n0 * n0);
    for (r, g) in g_blocks.iter().enumerate() {
        for (s, h) in h_blocks.iter().enumerate() {
            let overlap = g.star(h).expect("matching moduli");
            if overlap.weight() % 2 == 1 {
                eq.set(r * n0 + s, true);
            }
        }
    }
    eq
}

fn examine_candidate(
    params: &QcBchParams,
    public: &QcBchPublicKey,
    prim_poly: u64,
) -> CandidateReport {
    let code = bch::bch_generator(params.m, params.t, prim_poly)
        .expect("enumerated polynomial is primitive and t was validated");
    let parity = &code.parity;
    let h_rows: Vec<Vec<RingPoly>> = (0..parity.rows())
        .map(|r| {
            let word = RingPoly::from_words(params.code_length(), parity.row(r).to_vec());
            reorder_to_blocks(&word, params.n0)
        })
        .collect();

    let n0 = params.n0;
    let mut system = PermSystem::new(n0);
    'feed: for i in 0..params.k0 - 1 {
        let base: Vec<RingPoly> = (0..n0).map(|j| public.matrix.block(i, j).clone()).collect();
        for shift in 0..params.p {
            let g_blocks: Vec<RingPoly> = base.iter().map(|b| b.mul_xpow(shift)).collect();
            for h_blocks in &h_rows {
                let rank = system.add_equation(equation_coeffs(&g_blocks, h_blocks));
                if rank == n0 * n0 {
                    // Only the zero solution is left; no point feeding more.
                    break 'feed;
                }
            }
        }
    }

    let mut outcome = screen_kernel(&system.kernel(), n0);
    if let CandidateOutcome::Recovered(perm) = &outcome {
        if !unpermuted_rows_in_code(params, public, perm, &code) {
            outcome = CandidateOutcome::NoPermutation {
                dim: n0 * n0 - system.rank(),
            };
        }
    }
    CandidateReport {
        prim_poly,
        equations_used: system.rows_seen(),
        kernel_dim: n0 * n0 - system.rank(),
        outcome,
    }
}

/// Independent confirmation: undo the permutation and test every orbit
/// row for membership in the candidate code.
fn unpermuted_rows_in_code(
    params: &QcBchParams,
    public: &QcBchPublicKey,
    recovered: &Permutation,
    code: &BchCode,
) -> bool {
    // `recovered` plays the role of pi^{-1}; applying it to the public
    // columns must land every row back in the code.
    let undo = recovered.inverse();
    for i in 0..params.k0 - 1 {
        let mut blocks = vec![RingPoly::zero(params.p); params.n0];
        for j in 0..params.n0 {
            blocks[undo.apply(j)] = public.matrix.block(i, j).clone();
        }
        let word = crate::qcbch::blocks_to_codeword(&blocks);
        if !code.contains(&word) {
            return false;
        }
    }
    true
}

/// Runs the key recovery across every candidate field representation,
/// splitting candidates over `workers` threads.
pub fn recover_permutation(
    public: &QcBchPublicKey,
    workers: usize,
) -> Result<QcBchAttack, QcBchError> {
    let params = public.params;
    params.validate()?;
    let candidates = bch::enumerate_primitive_polys(params.m)?;
    let workers = workers.clamp(1, candidates.len());

    let mut indexed: Vec<(usize, CandidateReport)> = if workers == 1 {
        candidates
            .iter()
            .enumerate()
            .map(|(idx, &poly)| (idx, examine_candidate(&params, public, poly)))
            .collect()
    } else {
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for w in 0..workers {
                let candidates = &candidates;
                let public_ref = &*public;
                handles.push(scope.spawn(move || {
                    candidates
                        .iter()
                        .enumerate()
                        .skip(w)
                        .step_by(workers)
                        .map(|(idx, &poly)| (idx, examine_candidate(&params, public_ref, poly)))
                        .collect::<Vec<_>>()
                }));
            }
            handles
                .into_iter()
                .flat_map(|h| h.join().expect("candidate worker panicked"))
                .collect()
        })
    };
    indexed.sort_by_key(|(idx, _)| *idx);
    Ok(QcBchAttack {
        reports: indexed.into_iter().map(|(_, report)| report).collect(),
    })
}
