//! Plain permutations of `{0, ..., n-1}` and their 0/1 matrices.

use rand::seq::SliceRandom;
use rand::Rng;

use super::BinMatrix;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Builds from the image list `sigma(0), sigma(1), ...`; must be a
    /// bijection.
    pub fn from_images(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Permutation(images))
    }

    pub fn random(n: usize, rng: &mut impl Rng) -> Self {
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(rng);
        Permutation(images)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &img) in self.0.iter().enumerate() {
            inv[img] = i;
        }
        Permutation(inv)
    }

    /// `(self.compose(other))(i) = self(other(i))`.
    pub fn compose(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &img)| i == img)
    }

    /// The matrix with a 1 at `(sigma(j), j)` for each column `j`.
    pub fn matrix(&self) -> BinMatrix {
        let n = self.0.len();
        let mut m = BinMatrix::zeros(n, n);
        for j in 0..n {
            m.set(self.0[j], j, true);
        }
        m
    }

    /// Reads a permutation back from a 0/1 matrix with exactly one 1 per
    /// row and per column.
    pub fn from_matrix(m: &BinMatrix) -> Option<Self> {
        if m.rows() != m.cols() {
            return None;
        }
        let n = m.rows();
        let mut images = vec![usize::MAX; n];
        for j in 0..n {
            let mut hits = (0..n).filter(|&i| m.get(i, j));
            let i = hits.next()?;
            if hits.next().is_some() {
                return None;
            }
            images[j] = i;
        }
        Permutation::from_images(images.clone())?;
        // images currently maps column -> row, which is exactly sigma.
        Some(Permutation(images))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn matrix_round_trip_and_inverse() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for _ in 0..50 {
            let sigma = Permutation::random(7, &mut rng);
            let back = Permutation::from_matrix(&sigma.matrix()).unwrap();
            assert_eq!(back, sigma);
            assert!(sigma.compose(&sigma.inverse()).is_identity());
            assert!(sigma.inverse().compose(&sigma).is_identity());
        }
    }

    #[test]
    fn non_permutation_matrices_rejected() {
        let mut m = BinMatrix::zeros(3, 3);
        m.set(0, 0, true);
        m.set(1, 0, true);
        m.set(2, 2, true);
        assert!(Permutation::from_matrix(&m).is_none());
    }

    #[test]
    fn permutation_matrix_transpose_is_inverse() {
        let mut rng = ChaCha12Rng::seed_from_u64(32);
        let sigma = Permutation::random(9, &mut rng);
        assert_eq!(sigma.matrix().transpose(), sigma.inverse().matrix());
    }
}
