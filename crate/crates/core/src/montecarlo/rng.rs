use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Standard normal draws for one path. Path `i` reads stream `i` of the
/// seeded generator (stream `i / 2` with antithetic pairing, the odd member
/// negating every draw), so its draws do not depend on scheduling.
#[derive(Debug, Clone)]
pub struct PathRng {
    inner: ChaCha8Rng,
    sign: f64,
}

impl PathRng {
    pub fn new(seed: u64, path: u64, antithetic: bool) -> Self {
        let (stream, sign) = if antithetic {
            (path / 2, if path % 2 == 0 { 1.0 } else { -1.0 })
        } else {
            (path, 1.0)
        };
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner, sign }
    }

    pub fn normal(&mut self) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.inner);
        self.sign * z
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antithetic_partners_mirror_each_other() {
        let mut a = PathRng::new(7, 4, true);
        let mut b = PathRng::new(7, 5, true);
        for _ in 0..10 {
            assert_eq!(a.normal(), -b.normal());
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = PathRng::new(7, 0, false);
        let mut b = PathRng::new(7, 1, false);
        assert_ne!(a.normal(), b.normal());
    }
}
