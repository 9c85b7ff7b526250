//! Fixed instances shared by the benchmarks.

use cyclorient::DefiningSequence;

/// The 24-vertex partition that is neither standard nor a blow-up.
pub fn irregular_24() -> DefiningSequence {
    "k3n24:000120001121".parse().expect("valid sequence")
}

/// The 12-vertex blow-up of `k3n6:000`.
pub fn blow_up_12() -> DefiningSequence {
    "k3n12:000121".parse().expect("valid sequence")
}
