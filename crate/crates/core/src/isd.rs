//! Information-set decoding: an exact Stern work-factor calculator (big
//! integer binomials, no floating-point combinatorics) and a working
//! Stern search used by the LDPC key-recovery attack at desk scale.

use num_bigint::BigUint;
use rand::Rng;

use crate::bits;
use crate::linalg::{BinMatrix, BitVec};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IsdError {
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
}

/// Stern algorithm tuning: `g` rows taken from each half of the
/// information set, `ell` window bits used for the collision filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SternParams {
    pub g: usize,
    pub ell: usize,
    pub max_iterations: usize,
}

impl SternParams {
    pub fn new(g: usize, ell: usize, max_iterations: usize) -> Self {
        SternParams {
            g,
            ell,
            max_iterations,
        }
    }
}

/// Cost model output. All logs are base 2; the exact per-iteration cost
/// and success probability are kept as big-integer ratios.
#[derive(Debug, Clone)]
pub struct WorkFactor {
    pub n: usize,
    pub k: usize,
    pub w: usize,
    pub params: SternParams,
    pub multiplicity: u64,
    pub iteration_cost: (BigUint, BigUint),
    pub success_prob: (BigUint, BigUint),
    pub log2_iteration_cost: f64,
    pub log2_success_prob: f64,
    pub log2_multiplicity: f64,
    pub log2_total: f64,
}

pub fn binomial(n: usize, k: usize) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    if k == 0 {
        return BigUint::from(1u32);
    }
    // n! / (n-k)! divided by k!, each side as a balanced product so the
    // big-integer multiplications stay subquadratic.
    range_product(n - k + 1, n) / range_product(1, k)
}

/// Product of the inclusive range `lo..=hi`: consecutive factors are
/// packed into machine words first, then combined tree-fashion.
fn range_product(lo: usize, hi: usize) -> BigUint {
    debug_assert!(lo <= hi);
    let mut chunks: Vec<BigUint> = Vec::new();
    let mut acc: u64 = 1;
    for f in lo..=hi {
        match acc.checked_mul(f as u64) {
            Some(next) => acc = next,
            None => {
                chunks.push(BigUint::from(acc));
                acc = f as u64;
            }
        }
    }
    chunks.push(BigUint::from(acc));
    product_tree(&chunks)
}

fn product_tree(factors: &[BigUint]) -> BigUint {
    match factors.len() {
        0 => BigUint::from(1u32),
        1 => factors[0].clone(),
        n => product_tree(&factors[..n / 2]) * product_tree(&factors[n / 2..]),
    }
}

pub fn log2_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 53 {
        let v: u64 = x.iter_u64_digits().next().unwrap_or(0);
        return (v as f64).log2();
    }
    // Top 64 bits as mantissa, rest as exponent.
    let shift = bits - 53;
    let top = x >> shift;
    let v: u64 = top.iter_u64_digits().next().unwrap();
    (v as f64).log2() + shift as f64
}

pub fn log2_ratio(num: &BigUint, den: &BigUint) -> f64 {
    log2_biguint(num) - log2_biguint(den)
}

/// Expected bit-operation count of Stern's algorithm for finding one of
/// `multiplicity` weight-`w` words in an `(n, k)` code.
///
/// Per iteration, with `kl = floor(k/2)` and `kr = ceil(k/2)` (the two
/// formula halves coincide for even `k`):
///   N = (n-k)^3/2 + k(n-k)^2 + g*ell*(C(kl,g) + C(kr,g))
///       + 2g(n-k) C(kl,g) C(kr,g) / 2^ell
/// and the single-word success probability multiplies three draws: `g`
/// ones in each half of the information set and the remaining `w - 2g`
/// ones avoiding the `ell`-bit window.
pub fn stern_workfactor(
    n: usize,
    k: usize,
    w: usize,
    params: SternParams,
    multiplicity: u64,
) -> Result<WorkFactor, IsdError> {
    let (g, ell) = (params.g, params.ell);
    if k >= n || w > n || multiplicity == 0 {
        return Err(IsdError::Infeasible(format!(
            "need k < n, w <= n, multiplicity > 0; got n={n} k={k} w={w} mult={multiplicity}"
        )));
    }
    let r = n - k;
    let kl = k / 2;
    let kr = k - kl;
    if 2 * g > w || g > kl || ell > r || r + 2 * g < w {
        return Err(IsdError::Infeasible(format!(
            "weight profile impossible: n={n} k={k} w={w} g={g} ell={ell}"
        )));
    }

    let c_kl = binomial(kl, g);
    let c_kr = binomial(kr, g);

    // Iteration cost, over the common denominator 2^{ell+1}.
    let r_big = BigUint::from(r);
    let mut cost_num = (&r_big * &r_big * &r_big) << ell; // (n-k)^3 * 2^ell; halved via denominator
    cost_num += (BigUint::from(k) * &r_big * &r_big) << (ell + 1);
    cost_num += (BigUint::from(g * ell) * (&c_kl + &c_kr)) << (ell + 1);
    cost_num += BigUint::from(4 * g) * &r_big * &c_kl * &c_kr;
    let cost_den = BigUint::from(1u32) << (ell + 1);

    // Success probability for one fixed weight-w word.
    let p_num = binomial(w, g)
        * binomial(n - w, kl - g)
        * binomial(w - g, g)
        * binomial(n - kl - (w - g), kr - g)
        * binomial(r - (w - 2 * g), ell);
    let p_den = binomial(n, kl) * binomial(n - kl, kr) * binomial(r, ell);
    if p_num == BigUint::from(0u32) {
        return Err(IsdError::Infeasible(format!(
            "success probability vanishes: n={n} k={k} w={w} g={g} ell={ell}"
        )));
    }

    let log2_iteration_cost = log2_ratio(&cost_num, &cost_den);
    let log2_success_prob = log2_ratio(&p_num, &p_den);
    let log2_multiplicity = (multiplicity as f64).log2();
    Ok(WorkFactor {
        n,
        k,
        w,
        params,
        multiplicity,
        iteration_cost: (cost_num, cost_den),
        success_prob: (p_num, p_den),
        log2_iteration_cost,
        log2_success_prob,
        log2_multiplicity,
        log2_total: log2_iteration_cost - log2_success_prob - log2_multiplicity,
    })
}

/// Minimizes the work factor over a `(g, ell)` grid.
pub fn optimize_workfactor(
    n: usize,
    k: usize,
    w: usize,
    multiplicity: u64,
    g_max: usize,
    ell_max: usize,
) -> Result<WorkFactor, IsdError> {
    let mut best: Option<WorkFactor> = None;
    for g in 1..=g_max {
        for ell in 1..=ell_max {
            let params = SternParams::new(g, ell, 0);
            if let Ok(wf) = stern_workfactor(n, k, w, params, multiplicity) {
                if best.as_ref().map_or(true, |b| wf.log2_total < b.log2_total) {
                    best = Some(wf);
                }
            }
        }
    }
    best.ok_or_else(|| IsdError::Infeasible(format!("no feasible grid point for n={n} k={k} w={w}")))
}

/// log2 cost of the sparse-factor enumeration attack: choosing `m` of the
/// at most `m^2` support positions of a product, with a ring operation of
/// `p^2` bit cost per candidate.
pub fn first_strategy_cost(m: usize, p: usize) -> f64 {
    log2_biguint(&(binomial(m * m, m) * BigUint::from(p) * BigUint::from(p)))
}

/// Stern's low-weight codeword search. Returns the first codeword of
/// weight exactly `w` (in original column order), or `None` once
/// `max_iterations` information sets have been tried.
pub fn stern_search(
    gen: &BinMatrix,
    w: usize,
    params: &SternParams,
    rng: &mut impl Rng,
) -> Option<BitVec> {
    let k = gen.rows();
    let n = gen.cols();
    assert!(k < n && params.ell <= 63, "stern_search expects k < n, ell <= 63");
    assert!(params.g >= 1 && 2 * params.g <= w);
    let kl = k / 2;

    let mut columns: Vec<usize> = (0..n).collect();
    let mut is_pivot = vec![false; n];
    for _ in 0..params.max_iterations {
        // Fresh information set: the pivot columns of a reduced random
        // column shuffle.  Structured codes can make any fixed block of
        // k columns systematically dependent, so the pivots are taken
        // where they land instead of being forced to the front.
        shuffle(&mut columns, rng);
        let permuted = gen.select_columns(&columns);
        let reduced = permuted.rref();
        if reduced.rank < k {
            continue;
        }
        let m = &reduced.matrix;

        // The ell-bit collision window: the first ell redundancy columns.
        is_pivot.fill(false);
        for &c in &reduced.pivots {
            is_pivot[c] = true;
        }
        let window_cols: Vec<usize> = (0..n)
            .filter(|&c| !is_pivot[c])
            .take(params.ell)
            .collect();
        let window: Vec<u64> = (0..k)
            .map(|r| {
                let row = m.row(r);
                window_cols
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (b, &c)| {
                        acc | u64::from(bits::get_bit(row, c)) << b
                    })
            })
            .collect();

        // Bucket left-half g-subsets by window value.
        let mut buckets: std::collections::HashMap<u64, Vec<Vec<usize>>> =
            std::collections::HashMap::new();
        let mut found: Option<BitVec> = None;
        for_each_combination(kl, params.g, |left| {
            let key = left.iter().fold(0u64, |acc, &r| acc ^ window[r]);
            buckets.entry(key).or_default().push(left.to_vec());
        });
        for_each_combination(k - kl, params.g, |right_rel| {
            if found.is_some() {
                return;
            }
            let right: Vec<usize> = right_rel.iter().map(|&r| kl + r).collect();
            let key = right.iter().fold(0u64, |acc, &r| acc ^ window[r]);
            let Some(lefts) = buckets.get(&key) else {
                return;
            };
            for left in lefts {
                let mut word = BitVec::zeros(n);
                for &r in left.iter().chain(&right) {
                    word.xor_in(&m.row_bitvec(r));
                }
                if word.weight() == w {
                    // Undo the column permutation.
                    let mut original = BitVec::zeros(n);
                    for (j, &src) in columns.iter().enumerate() {
                        if word.get(j) {
                            original.set(src, true);
                        }
                    }
                    found = Some(original);
                    return;
                }
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

fn shuffle(items: &mut [usize], rng: &mut impl Rng) {
    for i in (1..items.len()).rev() {
        let j = rng.gen_range(0..=i);
        items.swap(i, j);
    }
}

/// Calls `f` on every size-`g` subset of `0..n`, lexicographically.
pub(crate) fn for_each_combination(n: usize, g: usize, mut f: impl FnMut(&[usize])) {
    if g > n {
        return;
    }
    let mut idx: Vec<usize> = (0..g).collect();
    loop {
        f(&idx);
        // Advance to the next combination.
        let mut i = g;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - g {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..g {
            idx[j] = idx[j - 1] + 1;
        }
    }
}
