//! Prints primitive integrals for cross-checking against tools/check_p_integrals.py.
use ccinterp_core::integrals::debug_primitives;

fn main() {
    debug_primitives();
}
