//! Monte Carlo experiments on products of sparse ring elements, together
//! with the analytic bounds they are meant to reproduce.
//!
//! The sampling model throughout: `q` is a uniform ring element of weight
//! exactly `m`, and `s` is a sum of `m` independently uniform monomials
//! (so coincident monomials cancel). The product `q*s` is then a sum of
//! shifted copies of `q`, and the quantities of interest are how often
//! those copies collide.

use rand::Rng;

use crate::poly::RingPoly;

/// A Bernoulli frequency next to the analytic bound it is compared with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundEstimate {
    pub samples: usize,
    pub hits: usize,
    pub bound: f64,
}

impl BoundEstimate {
    pub fn frequency(&self) -> f64 {
        self.hits as f64 / self.samples as f64
    }

    /// Standard error of the frequency under the binomial model.
    pub fn std_error(&self) -> f64 {
        let f = self.frequency();
        (f * (1.0 - f) / self.samples as f64).sqrt()
    }
}

/// Upper bound on the probability that two distinct shifts of a weight-`m`
/// element share support: the difference set has at most m(m-1) nonzero
/// members out of p-1 possible offsets.
pub fn shift_collision_bound(p: usize, m: usize) -> f64 {
    (m * (m - 1)) as f64 / (p - 1) as f64
}

/// Lower bound on the probability that one shifted copy of `q` survives
/// intact inside `q*s`: each of the other m-1 copies independently misses
/// it with probability at least 1 - m(m-1)/(p-1).
pub fn containment_bound(p: usize, m: usize) -> f64 {
    (1.0 - shift_collision_bound(p, m)).powi(m as i32 - 1)
}

/// Lower bound on the probability that `q*s` reaches the full weight m^2,
/// i.e. that no two of the m shifted copies of `q` collide anywhere.
pub fn full_weight_bound(p: usize, m: usize) -> f64 {
    let d = (m * (m - 1)) as f64;
    (1..m)
        .map(|placed| 1.0 - d * placed as f64 / (p - placed) as f64)
        .product()
}

/// Frequency with which two distinct shifts of a random weight-`m` element
/// overlap. Compare against `shift_collision_bound`.
pub fn shift_collision_experiment(
    p: usize,
    m: usize,
    samples: usize,
    rng: &mut impl Rng,
) -> BoundEstimate {
    let mut hits = 0;
    for _ in 0..samples {
        let q = RingPoly::random_weight(p, m, rng);
        let a = rng.gen_range(0..p);
        let offset = rng.gen_range(1..p);
        let shifted_a = q.mul_xpow(a);
        let shifted_b = q.mul_xpow((a + offset) % p);
        if !shifted_a.star(&shifted_b).unwrap().is_zero() {
            hits += 1;
        }
    }
    BoundEstimate {
        samples,
        hits,
        bound: shift_collision_bound(p, m),
    }
}

/// Frequency with which the first shifted copy of `q` is contained in the
/// support of `q*s`. Compare against `containment_bound`.
pub fn support_containment_experiment(
    p: usize,
    m: usize,
    samples: usize,
    rng: &mut impl Rng,
) -> BoundEstimate {
    let mut hits = 0;
    for _ in 0..samples {
        let (q, shifts) = sample_product_parts(p, m, rng);
        let product = shifted_sum(&q, &shifts);
        let first_copy = q.mul_xpow(shifts[0]);
        if first_copy.star(&product).unwrap() == first_copy {
            hits += 1;
        }
    }
    BoundEstimate {
        samples,
        hits,
        bound: containment_bound(p, m),
    }
}

/// Frequency with which `q*s` has the maximal weight m^2. Compare against
/// `full_weight_bound`.
pub fn full_weight_experiment(
    p: usize,
    m: usize,
    samples: usize,
    rng: &mut impl Rng,
) -> BoundEstimate {
    let mut hits = 0;
    for _ in 0..samples {
        let (q, shifts) = sample_product_parts(p, m, rng);
        if shifted_sum(&q, &shifts).weight() == m * m {
            hits += 1;
        }
    }
    BoundEstimate {
        samples,
        hits,
        bound: full_weight_bound(p, m),
    }
}

fn sample_product_parts(p: usize, m: usize, rng: &mut impl Rng) -> (RingPoly, Vec<usize>) {
    let q = RingPoly::random_weight(p, m, rng);
    let shifts = (0..m).map(|_| rng.gen_range(0..p)).collect();
    (q, shifts)
}

fn shifted_sum(q: &RingPoly, shifts: &[usize]) -> RingPoly {
    let mut acc = RingPoly::zero(q.p());
    for &s in shifts {
        acc = acc.add(&q.mul_xpow(s));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::collections::BTreeSet;

    #[test]
    fn bounds_at_reference_parameters() {
        let sc = shift_collision_bound(4032, 7);
        assert!((sc - 42.0 / 4031.0).abs() < 1e-15);
        let cont = containment_bound(4032, 7);
        assert!((cont - 0.93909).abs() < 5e-5, "containment bound {cont}");
        assert!(cont >= 0.939);
        let full = full_weight_bound(4032, 7);
        assert!((full - 0.7992).abs() < 5e-4, "full-weight bound {full}");
        assert!(full >= 0.79);
    }

    // Independent oracle over plain integer sets: enumerate every support
    // of q and every pair of monomial shifts at p=7, m=2.
    fn brute_force(p: usize) -> (f64, f64, f64) {
        let mut contain = 0usize;
        let mut full = 0usize;
        let mut collide = 0usize;
        let mut contain_total = 0usize;
        let mut collide_total = 0usize;
        for u in 0..p {
            for v in u + 1..p {
                for a1 in 0..p {
                    for a2 in 0..p {
                        let copy1: BTreeSet<usize> =
                            [(u + a1) % p, (v + a1) % p].into_iter().collect();
                        let copy2: BTreeSet<usize> =
                            [(u + a2) % p, (v + a2) % p].into_iter().collect();
                        let g: BTreeSet<usize> =
                            copy1.symmetric_difference(&copy2).copied().collect();
                        if copy1.is_subset(&g) {
                            contain += 1;
                        }
                        if g.len() == 4 {
                            full += 1;
                        }
                        contain_total += 1;
                        if a1 != a2 {
                            collide_total += 1;
                            if copy1.intersection(&copy2).next().is_some() {
                                collide += 1;
                            }
                        }
                    }
                }
            }
        }
        (
            contain as f64 / contain_total as f64,
            full as f64 / contain_total as f64,
            collide as f64 / collide_total as f64,
        )
    }

    #[test]
    fn experiments_match_exhaustive_enumeration() {
        let (exact_contain, exact_full, exact_collide) = brute_force(7);
        let mut rng = ChaCha12Rng::seed_from_u64(7001);
        let n = 40_000;
        let contain = support_containment_experiment(7, 2, n, &mut rng);
        let full = full_weight_experiment(7, 2, n, &mut rng);
        let collide = shift_collision_experiment(7, 2, n, &mut rng);
        assert!(
            (contain.frequency() - exact_contain).abs() < 0.01,
            "containment {} vs exact {exact_contain}",
            contain.frequency()
        );
        assert!(
            (full.frequency() - exact_full).abs() < 0.01,
            "full weight {} vs exact {exact_full}",
            full.frequency()
        );
        assert!(
            (collide.frequency() - exact_collide).abs() < 0.01,
            "collision {} vs exact {exact_collide}",
            collide.frequency()
        );
    }

    #[test]
    fn experiments_are_deterministic_per_seed() {
        let run = || {
            let mut rng = ChaCha12Rng::seed_from_u64(99);
            support_containment_experiment(101, 3, 500, &mut rng)
        };
        let (a, b) = (run(), run());
        assert_eq!(a.hits, b.hits);
        assert_eq!(a.samples, b.samples);
    }
}
