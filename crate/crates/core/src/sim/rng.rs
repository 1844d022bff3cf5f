use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

/// Identifies the generator and the variate transforms, so other
/// implementations can reproduce a scenario bit for bit.
pub const PRNG_NAME: &str = "xoshiro256** seeded by splitmix64; \
uniform = (next_u64 >> 11) * 2^-53; \
normal = sqrt(-2 ln(1 - u1)) * cos(2 pi u2), one normal per two uniforms";

/// Deterministic variate source for the simulator.
#[derive(Debug, Clone)]
pub struct SimRng(Xoshiro256StarStar);

impl SimRng {
    pub fn new(seed: u64) -> Self {
        Self(Xoshiro256StarStar::seed_from_u64(seed))
    }

    /// Uniform on [0, 1) with 53 bits of resolution.
    pub fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        libm::sqrt(-2.0 * libm::log(u1)) * libm::cos(2.0 * core::f64::consts::PI * u2)
    }

    pub fn fill_normal(&mut self, out: &mut [f64], scale: f64) {
        for v in out {
            *v = scale * self.normal();
        }
    }
}
